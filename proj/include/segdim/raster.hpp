// Exact rasterization of segment families onto dyadic grids, box counting
// across scales, and log-log dimension fits.
//
// Occupancy is defined set-theoretically: a cell is occupied iff its
// *closed* box intersects some segment.  The traversal below computes that
// set exactly.  Cell boundaries are the convex combinations
//     B_j(i) = ((2^k - i) * lo_j + i * hi_j) / 2^k ,
// so every geometric predicate reduces to the sign of a small integer
// combination of products of input doubles, which sign_sum() evaluates
// exactly.  Corner touches, segments running along grid planes and
// endpoints sitting on boundaries are therefore handled without epsilons,
// and the result is identical for any segment order and thread count.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <mutex>
#include <thread>
#include <unordered_set>
#include <vector>

#include "segdim/exact.hpp"
#include "segdim/geometry.hpp"

namespace segdim {

class Grid {
public:
    // Cell side is side(window) * 2^-k per axis.  k*n is capped so a packed
    // multi-index fits comfortably in 64 bits.
    Grid(Window window, int level) : window_(std::move(window)), level_(level) {
        if (level < 0) throw std::invalid_argument("grid: negative level");
        if ((std::size_t)level * window_.dim() > 30)
            throw std::invalid_argument("grid: level overflow (k*n > 30)");
    }

    const Window& window() const { return window_; }
    int level() const { return level_; }
    std::size_t dim() const { return window_.dim(); }
    std::int64_t cells_per_axis() const { return std::int64_t{1} << level_; }

    double delta() const {
        double d = 0.0;
        for (std::size_t j = 0; j < dim(); ++j)
            d = std::max(d, std::ldexp(window_.hi[j] - window_.lo[j], -level_));
        return d;
    }

    std::uint64_t pack(const std::int64_t* idx) const {
        std::uint64_t code = 0;
        for (std::size_t j = 0; j < dim(); ++j)
            code |= (std::uint64_t)idx[j] << (j * (std::size_t)level_);
        return code;
    }

    void unpack(std::uint64_t code, std::int64_t* idx) const {
        std::uint64_t mask = ((std::uint64_t)cells_per_axis()) - 1;
        for (std::size_t j = 0; j < dim(); ++j)
            idx[j] = (std::int64_t)((code >> (j * (std::size_t)level_)) & mask);
        if (level_ == 0)
            for (std::size_t j = 0; j < dim(); ++j) idx[j] = 0;
    }

    // sign of (x - B_axis(i)), exact.
    int pos_sign(double x, std::size_t axis, std::int64_t i) const {
        std::int64_t C = cells_per_axis();
        exact::Term t[3] = {{x, 1.0, C},
                            {window_.lo[axis], 1.0, -(C - i)},
                            {window_.hi[axis], 1.0, -i}};
        return exact::sign_sum(std::span<const exact::Term>(t, 3));
    }

    struct AxisPos {
        std::int64_t bucket;  // largest i in [0, 2^k] with B(i) <= x
        bool on_boundary;     // x == B(bucket)
    };

    // Locates x on the axis; throws if x is outside [lo, hi].
    AxisPos classify(double x, std::size_t axis) const {
        std::int64_t C = cells_per_axis();
        double w = window_.hi[axis] - window_.lo[axis];
        double guess = std::floor((x - window_.lo[axis]) / w * (double)C);
        std::int64_t g = (std::int64_t)std::clamp(guess, 0.0, (double)C);
        while (g > 0 && pos_sign(x, axis, g) < 0) --g;
        while (g < C && pos_sign(x, axis, g + 1) >= 0) ++g;
        int at = pos_sign(x, axis, g);
        if (at < 0 || (g == C && at > 0))
            throw std::domain_error("coordinate outside window");
        return {g, at == 0};
    }

    // Indices of the cells whose closed box contains x along this axis
    // (one cell, or two when x sits on an interior boundary).
    void touched_cells(const AxisPos& c, std::int64_t out[2], int& n) const {
        std::int64_t C = cells_per_axis();
        if (c.on_boundary) {
            if (c.bucket == 0) {
                out[0] = 0;
                n = 1;
            } else if (c.bucket == C) {
                out[0] = C - 1;
                n = 1;
            } else {
                out[0] = c.bucket - 1;
                out[1] = c.bucket;
                n = 2;
            }
        } else {
            out[0] = std::min(c.bucket, C - 1);
            n = 1;
        }
    }

private:
    Window window_;
    int level_;
};

namespace detail {

inline constexpr std::size_t kMaxDim = 30;

// Set accumulator: dense bit grid for small k*n, hash set otherwise.
class CellAccum {
public:
    CellAccum(std::size_t bits) {
        dense_ = bits <= 24;
        if (dense_) words_.resize(((std::size_t{1} << bits) + 63) / 64, 0);
    }

    void insert(std::uint64_t code) {
        if (dense_)
            words_[code >> 6] |= std::uint64_t{1} << (code & 63);
        else
            set_.insert(code);
    }

    void merge(const CellAccum& o) {
        if (dense_) {
            for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        } else {
            set_.insert(o.set_.begin(), o.set_.end());
        }
    }

    std::vector<std::uint64_t> finalize() const {
        std::vector<std::uint64_t> out;
        if (dense_) {
            for (std::size_t w = 0; w < words_.size(); ++w) {
                std::uint64_t word = words_[w];
                while (word) {
                    int b = std::countr_zero(word);
                    out.push_back((w << 6) | (std::uint64_t)b);
                    word &= word - 1;
                }
            }
        } else {
            out.assign(set_.begin(), set_.end());
            std::sort(out.begin(), out.end());
        }
        return out;
    }

private:
    bool dense_;
    std::vector<std::uint64_t> words_;
    std::unordered_set<std::uint64_t> set_;
};

// Cartesian product of per-axis index sets -> packed codes.
inline void emit_product(const Grid& g, const std::int64_t sets[][2],
                         const int sizes[], CellAccum& acc) {
    std::size_t n = g.dim();
    std::int64_t idx[kMaxDim];
    int pick[kMaxDim];
    for (std::size_t j = 0; j < n; ++j) {
        pick[j] = 0;
        idx[j] = sets[j][0];
    }
    while (true) {
        acc.insert(g.pack(idx));
        std::size_t j = 0;
        while (j < n) {
            if (pick[j] + 1 < sizes[j]) {
                ++pick[j];
                idx[j] = sets[j][pick[j]];
                break;
            }
            pick[j] = 0;
            idx[j] = sets[j][0];
            ++j;
        }
        if (j == n) break;
    }
}

// Marches one segment through the grid.  Per-axis state: the cell the open
// part of the segment currently lives in (`cur`), and the next boundary it
// will cross (`nextb`).  Static axes keep a fixed 1- or 2-cell footprint.
// At every crossing event the full product of per-axis footprints at that
// instant is emitted, which is exactly the set of cells whose closed box
// contains the crossing point; simultaneous crossings (corner touches) are
// detected as exact ties of the crossing parameters.
inline void traverse_segment(const Grid& g, const Segment& s, CellAccum& acc) {
    const std::size_t n = g.dim();
    const std::int64_t C = g.cells_per_axis();

    struct Axis {
        int dsign = 0;
        bool live = false;
        std::int64_t cur = 0;
        std::int64_t nextb = 0;
    };
    Axis ax[kMaxDim];
    Grid::AxisPos pcls[kMaxDim], qcls[kMaxDim];

    for (std::size_t j = 0; j < n; ++j) {
        pcls[j] = g.classify(s.p[j], j);
        qcls[j] = g.classify(s.q[j], j);
    }

    std::int64_t sets[kMaxDim][2];
    int sizes[kMaxDim];

    // endpoint footprints
    for (std::size_t j = 0; j < n; ++j) g.touched_cells(pcls[j], sets[j], sizes[j]);
    emit_product(g, sets, sizes, acc);
    for (std::size_t j = 0; j < n; ++j) g.touched_cells(qcls[j], sets[j], sizes[j]);
    emit_product(g, sets, sizes, acc);

    // t(nextb) < 1  <=>  q lies strictly past the boundary in the direction
    // of travel.
    auto update_live = [&](std::size_t j) {
        Axis& a = ax[j];
        if (a.dsign == 0 || a.nextb < 0 || a.nextb > C) {
            a.live = false;
            return;
        }
        int ps = g.pos_sign(s.q[j], j, a.nextb);
        a.live = (a.dsign > 0) ? ps > 0 : ps < 0;
    };

    bool any_moving = false;
    for (std::size_t j = 0; j < n; ++j) {
        Axis& a = ax[j];
        a.dsign = (s.q[j] > s.p[j]) - (s.q[j] < s.p[j]);
        if (a.dsign > 0) {
            a.cur = pcls[j].bucket; // also correct when p sits on B(bucket)
            a.nextb = a.cur + 1;
        } else if (a.dsign < 0) {
            a.cur = pcls[j].on_boundary ? pcls[j].bucket - 1
                                        : std::min(pcls[j].bucket, C - 1);
            a.nextb = a.cur;
        }
        update_live(j);
        if (a.dsign != 0) any_moving = true;
    }

    // footprint of the open interval after the march position
    auto emit_interval = [&] {
        for (std::size_t j = 0; j < n; ++j) {
            if (ax[j].dsign != 0) {
                sets[j][0] = ax[j].cur;
                sizes[j] = 1;
            } else {
                g.touched_cells(pcls[j], sets[j], sizes[j]);
            }
        }
        emit_product(g, sets, sizes, acc);
    };

    emit_interval();
    if (!any_moving) return;

    // sign of t_j1(nextb_j1) - t_j2(nextb_j2)
    auto cmp_t = [&](std::size_t j1, std::size_t j2) {
        const std::int64_t i1 = ax[j1].nextb, i2 = ax[j2].nextb;
        // NUM_j = (C - i)*lo_j + i*hi_j - C*p_j ; DEN_j = q_j - p_j
        exact::Term t[12] = {
            // NUM_1 * DEN_2
            {g.window().lo[j1], s.q[j2], C - i1},
            {g.window().lo[j1], s.p[j2], -(C - i1)},
            {g.window().hi[j1], s.q[j2], i1},
            {g.window().hi[j1], s.p[j2], -i1},
            {s.p[j1], s.q[j2], -C},
            {s.p[j1], s.p[j2], C},
            // - NUM_2 * DEN_1
            {g.window().lo[j2], s.q[j1], -(C - i2)},
            {g.window().lo[j2], s.p[j1], C - i2},
            {g.window().hi[j2], s.q[j1], -i2},
            {g.window().hi[j2], s.p[j1], i2},
            {s.p[j2], s.q[j1], C},
            {s.p[j2], s.p[j1], -C},
        };
        int sg = exact::sign_sum(std::span<const exact::Term>(t, 12));
        return sg * ax[j1].dsign * ax[j2].dsign;
    };

    bool tied[kMaxDim];
    while (true) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!ax[j].live) continue;
            if (best == n || cmp_t(j, best) < 0) best = j;
        }
        if (best == n) break;

        // crossing footprint: tied axes straddle their boundary
        for (std::size_t j = 0; j < n; ++j) {
            tied[j] = ax[j].dsign != 0 && ax[j].live &&
                      (j == best || cmp_t(j, best) == 0);
            if (ax[j].dsign == 0) {
                g.touched_cells(pcls[j], sets[j], sizes[j]);
            } else if (tied[j]) {
                sets[j][0] = ax[j].cur;
                sets[j][1] = ax[j].cur + ax[j].dsign;
                sizes[j] = 2;
            } else {
                sets[j][0] = ax[j].cur;
                sizes[j] = 1;
            }
        }
        emit_product(g, sets, sizes, acc);

        for (std::size_t j = 0; j < n; ++j) {
            if (!tied[j]) continue;
            ax[j].cur += ax[j].dsign;
            ax[j].nextb += ax[j].dsign;
            update_live(j);
        }
        emit_interval();
    }
}

inline unsigned resolve_threads(int threads) {
    if (threads > 0) return (unsigned)threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <typename Work>
inline std::vector<std::uint64_t> accumulate_parallel(const Grid& g,
                                                      std::size_t items,
                                                      int threads, Work work) {
    std::size_t bits = (std::size_t)g.level() * g.dim();
    unsigned T = resolve_threads(threads);
    if (T <= 1 || items < 2) {
        CellAccum acc(bits);
        for (std::size_t i = 0; i < items; ++i) work(i, acc);
        return acc.finalize();
    }
    T = std::min<std::size_t>(T, items);
    std::vector<CellAccum> accs(T, CellAccum(bits));
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (unsigned t = 0; t < T; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < items; i += T) work(i, accs[t]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    for (unsigned t = 1; t < T; ++t) accs[0].merge(accs[t]);
    return accs[0].finalize();
}

} // namespace detail

struct CellSet {
    Grid grid;
    std::vector<std::uint64_t> occupied; // packed indices, sorted

    std::uint64_t count() const { return occupied.size(); }
};

// Exact occupancy of the family on the grid.  Every segment must lie in
// the closed window; anything else is an error rather than a silent clip.
inline CellSet rasterize(const SegmentFamily& F, const Grid& g,
                         int threads = 1) {
    if (F.dim != 0 && F.dim != g.dim())
        throw std::invalid_argument("rasterize: family/grid dimension mismatch");
    auto occ = detail::accumulate_parallel(
        g, F.size(), threads, [&](std::size_t i, detail::CellAccum& acc) {
            try {
                detail::traverse_segment(g, F.segments[i], acc);
            } catch (const std::domain_error& e) {
                throw std::domain_error("segment " + std::to_string(i) + ": " +
                                        e.what());
            }
        });
    return CellSet{g, std::move(occ)};
}

// Occupancy of a finite point set (used for slice profiles).
inline CellSet rasterize_points(const std::vector<Coords>& pts, const Grid& g,
                                int threads = 1) {
    auto occ = detail::accumulate_parallel(
        g, pts.size(), threads, [&](std::size_t i, detail::CellAccum& acc) {
            if (pts[i].size() != g.dim())
                throw std::invalid_argument("rasterize_points: dimension");
            std::int64_t sets[detail::kMaxDim][2];
            int sizes[detail::kMaxDim];
            for (std::size_t j = 0; j < g.dim(); ++j) {
                auto c = g.classify(pts[i][j], j);
                g.touched_cells(c, sets[j], sizes[j]);
            }
            detail::emit_product(g, sets, sizes, acc);
        });
    return CellSet{g, std::move(occ)};
}

struct CurveEntry {
    int level;
    double delta;
    std::uint64_t count;
};

struct BoxCountCurve {
    std::size_t dim = 0; // ambient dimension (for the 2^n doubling law)
    std::vector<CurveEntry> entries;

    // N must be nondecreasing in k, and halving the mesh can multiply the
    // count by at most 2^n.  Violations mean corrupt input (or a broken
    // counter) and are rejected.
    void validate() const {
        for (std::size_t i = 1; i < entries.size(); ++i) {
            const CurveEntry& a = entries[i - 1];
            const CurveEntry& b = entries[i];
            if (b.level <= a.level)
                throw std::invalid_argument("box-count curve: levels not increasing");
            if (b.count < a.count)
                throw std::invalid_argument("box-count curve: counts decrease");
            if (b.level == a.level + 1 && dim > 0) {
                long double cap = (long double)a.count;
                for (std::size_t d = 0; d < dim; ++d) cap *= 2.0L;
                if ((long double)b.count > cap)
                    throw std::invalid_argument(
                        "box-count curve: count grows faster than 2^n per level");
            }
        }
    }
};

inline BoxCountCurve box_count(const SegmentFamily& F, const Window& window,
                               int k_min, int k_max, int threads = 1) {
    if (k_min >= k_max)
        throw std::invalid_argument("box_count: requires k_min < k_max");
    BoxCountCurve curve;
    curve.dim = window.dim();
    for (int k = k_min; k <= k_max; ++k) {
        Grid g{window, k};
        CellSet cells = rasterize(F, g, threads);
        curve.entries.push_back({k, g.delta(), cells.count()});
    }
    curve.validate();
    return curve;
}

struct DimensionEstimate {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int k_lo = 0;
    int k_hi = 0;
};

// Least-squares slope of log N(delta) against log(1/delta) over levels
// [k_lo, k_hi] of the curve.
inline DimensionEstimate estimate_dimension(const BoxCountCurve& curve,
                                            int k_lo, int k_hi) {
    if (k_hi - k_lo < 3)
        throw std::invalid_argument(
            "estimate_dimension: need k_hi - k_lo >= 3 (at least 4 levels)");
    std::vector<double> xs, ys;
    for (const CurveEntry& e : curve.entries) {
        if (e.level < k_lo || e.level > k_hi) continue;
        if (e.count == 0)
            throw std::invalid_argument("estimate_dimension: zero count at level " +
                                        std::to_string(e.level));
        xs.push_back(-std::log(e.delta));
        ys.push_back(std::log((double)e.count));
    }
    if (xs.size() < 4)
        throw std::invalid_argument("estimate_dimension: fewer than 4 levels in range");
    std::size_t m = xs.size();
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= (double)m;
    ybar /= (double)m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double dx = xs[i] - xbar, dy = ys[i] - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    DimensionEstimate est;
    est.k_lo = k_lo;
    est.k_hi = k_hi;
    est.slope = sxy / sxx;
    est.intercept = ybar - est.slope * xbar;
    est.r2 = (syy == 0.0) ? 1.0 : std::clamp((sxy * sxy) / (sxx * syy), 0.0, 1.0);
    // valid count data can never fit outside [0, n] (monotone counts, at
    // most 2^n growth per level)
    if (est.slope < -1e-9 ||
        (curve.dim > 0 && est.slope > (double)curve.dim + 0.1))
        throw std::logic_error("estimate_dimension: slope outside sanity band");
    return est;
}

// Box-dimension estimate of the slice at each t, rasterized on the
// (n-1)-dimensional cross-section of the window.  The fit spans the whole
// [k_min, k_max] range.
inline std::vector<std::pair<double, DimensionEstimate>> slice_profile(
    const LineFamily& L, const Window& window, const std::vector<double>& ts,
    int k_min, int k_max, int threads = 1) {
    if (L.dim != window.dim())
        throw std::invalid_argument("slice_profile: dimension mismatch");
    if (L.dim < 2) throw std::invalid_argument("slice_profile: ambient dim < 2");
    Coords lo(window.lo.x.begin() + 1, window.lo.x.end());
    Coords hi(window.hi.x.begin() + 1, window.hi.x.end());
    Window cross{Point(std::move(lo)), Point(std::move(hi))};
    std::vector<std::pair<double, DimensionEstimate>> out;
    out.reserve(ts.size());
    for (double t : ts) {
        if (t < window.lo[0] || t > window.hi[0])
            throw std::invalid_argument("slice_profile: t outside window range");
        std::vector<Point> pts = slice(L, t);
        std::vector<Coords> ys;
        ys.reserve(pts.size());
        for (Point& p : pts) ys.emplace_back(p.x.begin() + 1, p.x.end());
        BoxCountCurve curve;
        curve.dim = cross.dim();
        for (int k = k_min; k <= k_max; ++k) {
            Grid g{cross, k};
            curve.entries.push_back(
                {k, g.delta(), rasterize_points(ys, g, threads).count()});
        }
        curve.validate();
        out.emplace_back(t, estimate_dimension(curve, k_min, k_max));
    }
    return out;
}

} // namespace segdim
