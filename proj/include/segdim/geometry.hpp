// Core types and algebraic operations on points, segments and lines in R^n.
//
// Lines come in two encodings:
//   * ParamLine (a, b): the point set {(t, t*a + b)}.  Cannot represent
//     lines orthogonal to the x1 axis.
//   * GeneralLine (base, unit dir): any line.
// Conversions between the two are the backbone of the slicing and duality
// operations below.  All functions are pure; nothing here holds shared state.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace segdim {

using Coords = std::vector<double>;

inline bool all_finite(const Coords& v) {
    for (double c : v)
        if (!std::isfinite(c)) return false;
    return true;
}

inline bool lex_less(const Coords& a, const Coords& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct Point {
    Coords x;

    Point() = default;
    Point(std::initializer_list<double> v) : x(v) {}
    explicit Point(Coords v) : x(std::move(v)) {}

    std::size_t dim() const { return x.size(); }
    double operator[](std::size_t i) const { return x[i]; }
    double& operator[](std::size_t i) { return x[i]; }

    bool operator==(const Point& o) const { return x == o.x; }
};

inline void require_point(const Point& p, std::size_t min_dim = 2) {
    if (p.dim() < min_dim)
        throw std::invalid_argument("point: dimension must be at least " +
                                    std::to_string(min_dim));
    if (!all_finite(p.x))
        throw std::invalid_argument("point: coordinates must be finite");
}

// Closed nondegenerate segment [p, q].
struct Segment {
    Point p, q;

    Segment(Point p_, Point q_) : p(std::move(p_)), q(std::move(q_)) {
        require_point(p);
        require_point(q);
        if (p.dim() != q.dim())
            throw std::invalid_argument("segment: endpoint dimensions differ");
        if (p == q) throw std::invalid_argument("segment: degenerate (p == q)");
    }

    std::size_t dim() const { return p.dim(); }
};

// The line {(t, t*a + b) : t in R}; a and b have length n-1.
struct ParamLine {
    Coords a, b;

    ParamLine(Coords a_, Coords b_) : a(std::move(a_)), b(std::move(b_)) {
        if (a.empty() || a.size() != b.size())
            throw std::invalid_argument("param line: slope/intercept lengths");
        if (!all_finite(a) || !all_finite(b))
            throw std::invalid_argument("param line: entries must be finite");
    }

    std::size_t dim() const { return a.size() + 1; }
};

// Any line, as base point plus unit direction.  The direction is
// canonicalized so that its first nonzero coordinate is positive, which
// makes the encoding of a direction unique.
class GeneralLine {
public:
    GeneralLine(Point base, Coords dir) : base_(std::move(base)) {
        require_point(base_);
        if (dir.size() != base_.dim())
            throw std::invalid_argument("line: base/dir dimensions differ");
        if (!all_finite(dir))
            throw std::invalid_argument("line: direction must be finite");
        double norm2 = 0.0;
        for (double d : dir) norm2 += d * d;
        if (norm2 == 0.0)
            throw std::invalid_argument("line: zero direction");
        // keep already-unit directions bit-stable across file round trips
        if (std::fabs(norm2 - 1.0) > 1e-13) {
            double inv = 1.0 / std::sqrt(norm2);
            for (double& d : dir) d *= inv;
        }
        canonicalize(dir);
        dir_ = std::move(dir);
    }

    const Point& base() const { return base_; }
    const Coords& dir() const { return dir_; }
    std::size_t dim() const { return base_.dim(); }

    // Exact slope/intercept pair recorded by the constructor paths that
    // know it (line_from_param, extend); keeps parametric round trips
    // free of division noise.
    const std::optional<std::pair<Coords, Coords>>& recorded_param() const {
        return param_;
    }
    void record_param(Coords a, Coords b) {
        param_ = std::make_pair(std::move(a), std::move(b));
    }

private:
    static void canonicalize(Coords& dir) {
        for (double d : dir) {
            if (d != 0.0) {
                if (d < 0.0)
                    for (double& c : dir) c = -c;
                break;
            }
        }
        for (double& c : dir)
            if (c == 0.0) c = 0.0; // normalize -0.0
    }

    Point base_;
    Coords dir_;
    std::optional<std::pair<Coords, Coords>> param_;
};

// Axis-aligned box with nonempty interior.
struct Window {
    Point lo, hi;

    Window(Point lo_, Point hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        require_point(lo, 1);
        require_point(hi, 1);
        if (lo.dim() != hi.dim())
            throw std::invalid_argument("window: corner dimensions differ");
        for (std::size_t j = 0; j < lo.dim(); ++j)
            if (!(lo[j] < hi[j]))
                throw std::invalid_argument("window: requires lo < hi");
    }

    std::size_t dim() const { return lo.dim(); }

    bool contains(const Point& p) const {
        for (std::size_t j = 0; j < dim(); ++j)
            if (p[j] < lo[j] || p[j] > hi[j]) return false;
        return true;
    }

    bool contains(const Window& o) const {
        for (std::size_t j = 0; j < dim(); ++j)
            if (o.lo[j] < lo[j] || o.hi[j] > hi[j]) return false;
        return true;
    }
};

struct SegmentFamily {
    std::size_t dim = 0;
    std::vector<Segment> segments;

    SegmentFamily() = default;
    explicit SegmentFamily(std::size_t n) : dim(n) {}

    void add(Segment s) {
        if (dim == 0) dim = s.dim();
        if (s.dim() != dim)
            throw std::invalid_argument("segment family: mixed dimensions");
        segments.push_back(std::move(s));
    }

    std::size_t size() const { return segments.size(); }
};

struct LineFamily {
    std::size_t dim = 0;
    std::vector<GeneralLine> lines;
    // Present iff no line is orthogonal to the x1 axis; index-aligned
    // with `lines`.
    std::optional<std::vector<ParamLine>> param_view;

    std::size_t size() const { return lines.size(); }
};

// ---------------------------------------------------------------------------
// Parametrization

inline GeneralLine line_from_param(const Coords& a, const Coords& b) {
    if (a.empty() || a.size() != b.size())
        throw std::invalid_argument("line_from_param: slope/intercept lengths");
    if (!all_finite(a) || !all_finite(b))
        throw std::invalid_argument("line_from_param: non-finite input");
    Coords base(a.size() + 1, 0.0);
    Coords dir(a.size() + 1, 0.0);
    dir[0] = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        base[i + 1] = b[i];
        dir[i + 1] = a[i];
    }
    GeneralLine l{Point(std::move(base)), std::move(dir)};
    l.record_param(a, b);
    return l;
}

inline std::optional<ParamLine> param_from_line(const GeneralLine& l) {
    if (l.recorded_param())
        return ParamLine{l.recorded_param()->first, l.recorded_param()->second};
    const Coords& d = l.dir();
    if (d[0] == 0.0) return std::nullopt; // orthogonal to the x1 axis
    std::size_t m = l.dim() - 1;
    Coords a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = d[i + 1] / d[0];
        b[i] = l.base()[i + 1] - l.base()[0] * a[i];
    }
    return ParamLine{std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Extension

inline GeneralLine extend(const Segment& s) {
    Coords delta(s.dim());
    for (std::size_t j = 0; j < s.dim(); ++j) delta[j] = s.q[j] - s.p[j];
    GeneralLine l{s.p, delta};
    if (delta[0] != 0.0) {
        std::size_t m = s.dim() - 1;
        Coords a(m), b(m);
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = delta[i + 1] / delta[0];
            b[i] = s.p[i + 1] - s.p[0] * a[i];
        }
        l.record_param(std::move(a), std::move(b));
    }
    return l;
}

inline LineFamily extend_family(const SegmentFamily& S) {
    LineFamily F;
    F.dim = S.dim;
    F.lines.reserve(S.size());
    bool representable = true;
    for (std::size_t i = 0; i < S.size(); ++i) {
        try {
            F.lines.push_back(extend(S.segments[i]));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("extend_family: segment " +
                                        std::to_string(i) + ": " + e.what());
        }
        if (S.segments[i].q[0] - S.segments[i].p[0] == 0.0) representable = false;
    }
    if (representable) {
        std::vector<ParamLine> view;
        view.reserve(F.lines.size());
        for (const GeneralLine& l : F.lines) view.push_back(*param_from_line(l));
        F.param_view = std::move(view);
    }
    return F;
}

// ---------------------------------------------------------------------------
// Clipping

// Intersects the line with the closed box by exact parametric slab
// clipping.  Point intersections (corner touches) yield Empty since a
// Segment must have positive length.  Endpoints are clamped into the
// window so downstream exact rasterization never sees a coordinate that
// drifted out by a rounding error.
inline std::optional<Segment> clip(const GeneralLine& l, const Window& W) {
    if (l.dim() != W.dim())
        throw std::invalid_argument("clip: dimension mismatch");
    double tlo = -std::numeric_limits<double>::infinity();
    double thi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < W.dim(); ++j) {
        double d = l.dir()[j], b = l.base()[j];
        if (d == 0.0) {
            if (b < W.lo[j] || b > W.hi[j]) return std::nullopt;
            continue;
        }
        double t0 = (W.lo[j] - b) / d;
        double t1 = (W.hi[j] - b) / d;
        if (t0 > t1) std::swap(t0, t1);
        tlo = std::max(tlo, t0);
        thi = std::min(thi, t1);
        if (tlo > thi) return std::nullopt;
    }
    if (!(tlo < thi)) return std::nullopt;
    Coords e0(W.dim()), e1(W.dim());
    for (std::size_t j = 0; j < W.dim(); ++j) {
        e0[j] = std::clamp(l.base()[j] + tlo * l.dir()[j], W.lo[j], W.hi[j]);
        e1[j] = std::clamp(l.base()[j] + thi * l.dir()[j], W.lo[j], W.hi[j]);
    }
    if (e0 == e1) return std::nullopt;
    return Segment{Point(std::move(e0)), Point(std::move(e1))};
}

// ---------------------------------------------------------------------------
// Projective duality

// P(x, y) = (1/x, y/x) on {x != 0}; an involution that swaps the roles of
// slope and intercept: it carries the punched line l(a,b) \ {(0,b)} onto
// l(b,a) \ {(0,a)}.
inline Point dualize(const Point& p) {
    require_point(p);
    double x = p[0];
    if (x == 0.0)
        throw std::domain_error("dualize: point lies on the hyperplane x1 = 0");
    Coords out(p.dim());
    out[0] = 1.0 / x;
    for (std::size_t i = 1; i < p.dim(); ++i) out[i] = p[i] / x;
    return Point(std::move(out));
}

inline Segment dualize_segment(const Segment& s) {
    double x0 = s.p[0], x1 = s.q[0];
    bool positive = x0 > 0.0 && x1 > 0.0;
    bool negative = x0 < 0.0 && x1 < 0.0;
    if (!positive && !negative)
        throw std::domain_error(
            "dualize_segment: segment meets the hyperplane x1 = 0");
    return Segment{dualize(s.p), dualize(s.q)};
}

// ---------------------------------------------------------------------------
// Slices and parameter projections

// { t*a + b : (a,b) in C }, deduplicated and sorted.
inline std::vector<Coords> project_param(
    const std::vector<std::pair<Coords, Coords>>& C, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("project_param: t");
    std::vector<Coords> out;
    out.reserve(C.size());
    for (const auto& [a, b] : C) {
        Coords y(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) y[i] = t * a[i] + b[i];
        out.push_back(std::move(y));
    }
    std::sort(out.begin(), out.end(), lex_less);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Intersection of the union of L with the hyperplane x1 = t, as a
// deduplicated point set.  Requires the parametric view.
inline std::vector<Point> slice(const LineFamily& L, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("slice: t not finite");
    if (!L.param_view)
        throw std::domain_error("slice: family has no parametric view "
                                "(contains lines orthogonal to the x1 axis)");
    std::vector<Coords> pts;
    pts.reserve(L.size());
    for (const ParamLine& pl : *L.param_view) {
        Coords y(pl.dim());
        y[0] = t;
        for (std::size_t i = 0; i < pl.a.size(); ++i)
            y[i + 1] = t * pl.a[i] + pl.b[i];
        pts.push_back(std::move(y));
    }
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<Point> out;
    out.reserve(pts.size());
    for (Coords& c : pts) out.push_back(Point(std::move(c)));
    return out;
}

// ---------------------------------------------------------------------------
// Cartesian products

inline constexpr std::size_t kDefaultProductCap = 1u << 20;

// For every k-tuple of input segments emits the parameter-synchronized
// diagonal segment of their product, a segment in R^{k*n}.  Family size is
// |S|^k; the cap guards against accidental blowups.
inline SegmentFamily product_family(const SegmentFamily& S, int k,
                                    std::size_t cap = kDefaultProductCap) {
    if (k < 1) throw std::invalid_argument("product_family: k must be >= 1");
    if (S.size() == 0) return SegmentFamily{S.dim * (std::size_t)k};
    std::size_t total = 1;
    for (int i = 0; i < k; ++i) {
        if (total > cap / S.size())
            throw std::length_error("product_family: |S|^k exceeds cap");
        total *= S.size();
    }
    std::size_t n = S.dim;
    SegmentFamily out(n * (std::size_t)k);
    std::vector<std::size_t> idx((std::size_t)k, 0);
    for (std::size_t c = 0; c < total; ++c) {
        // decode c as a base-|S| tuple, first factor most significant
        std::size_t rem = c;
        for (int f = k - 1; f >= 0; --f) {
            idx[(std::size_t)f] = rem % S.size();
            rem /= S.size();
        }
        Coords p, q;
        p.reserve(n * k);
        q.reserve(n * k);
        for (int f = 0; f < k; ++f) {
            const Segment& s = S.segments[idx[(std::size_t)f]];
            p.insert(p.end(), s.p.x.begin(), s.p.x.end());
            q.insert(q.end(), s.q.x.begin(), s.q.x.end());
        }
        out.add(Segment{Point(std::move(p)), Point(std::move(q))});
    }
    return out;
}

// Builds the family {l(a,b)} from explicit parameter pairs; the
// parametric view is exact by construction.
inline LineFamily lines_from_params(
    const std::vector<std::pair<Coords, Coords>>& params) {
    LineFamily F;
    std::vector<ParamLine> view;
    view.reserve(params.size());
    F.lines.reserve(params.size());
    for (const auto& [a, b] : params) {
        F.lines.push_back(line_from_param(a, b));
        view.push_back(ParamLine{a, b});
        if (F.dim == 0) F.dim = a.size() + 1;
        if (a.size() + 1 != F.dim)
            throw std::invalid_argument("lines_from_params: mixed dimensions");
    }
    F.param_view = std::move(view);
    return F;
}

} // namespace segdim
