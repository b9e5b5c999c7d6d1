// Deterministic generators for the segment families used throughout the
// tests and the CLI: dyadic vertical combs, the quadtree embedding in R^3,
// Cantor-parameter line families and direction-complete families for the
// duality pipeline.  Identical inputs always produce bit-identical output.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "segdim/geometry.hpp"

namespace segdim {

// Vertical segments x = (2m-1)*2^-n, y in [0, 2^-n], for n = 1..N and
// m = 1..2^(n-1).  Family size 2^N - 1.
inline SegmentFamily example1_segments(int N) {
    if (N < 1 || N > 20)
        throw std::invalid_argument("example1_segments: N must be in [1, 20]");
    SegmentFamily F(2);
    for (int n = 1; n <= N; ++n) {
        double h = std::ldexp(1.0, -n);
        for (std::int64_t m = 1; m <= (std::int64_t{1} << (n - 1)); ++m) {
            double x = std::ldexp((double)(2 * m - 1), -n);
            F.add(Segment{{x, 0.0}, {x, h}});
        }
    }
    return F;
}

// The same abscissas, each segment grown to the full vertical chord of the
// unit square.  The union becomes dense in [0,1]^2 as N grows.
inline SegmentFamily example1_extended(int N) {
    if (N < 1 || N > 20)
        throw std::invalid_argument("example1_extended: N must be in [1, 20]");
    SegmentFamily F(2);
    for (int n = 1; n <= N; ++n) {
        for (std::int64_t m = 1; m <= (std::int64_t{1} << (n - 1)); ++m) {
            double x = std::ldexp((double)(2 * m - 1), -n);
            F.add(Segment{{x, 0.0}, {x, 1.0}});
        }
    }
    return F;
}

// Edge set of the depth-N truncation of the quadtree embedding: the node
// (k, l) at level n sits at ((2k-1)*2^-n, (2l-1)*2^-n, 2^-n) and connects
// to its four children at level n+1.  Root (1/2, 1/2, 1/2) at level 1;
// (4^(N+1) - 4) / 3 edges in total.
inline SegmentFamily example2_tree(int N) {
    if (N < 0 || N > 12)
        throw std::invalid_argument("example2_tree: N must be in [0, 12]");
    SegmentFamily F(3);
    for (int n = 1; n <= N; ++n) {
        std::int64_t side = std::int64_t{1} << (n - 1);
        double zp = std::ldexp(1.0, -n);
        double zc = std::ldexp(1.0, -(n + 1));
        for (std::int64_t k = 1; k <= side; ++k) {
            double xp = std::ldexp((double)(2 * k - 1), -n);
            for (std::int64_t l = 1; l <= side; ++l) {
                double yp = std::ldexp((double)(2 * l - 1), -n);
                for (int dk = 0; dk <= 1; ++dk) {
                    double xc = std::ldexp((double)(2 * (2 * k - 1 + dk) - 1),
                                           -(n + 1));
                    for (int dl = 0; dl <= 1; ++dl) {
                        double yc = std::ldexp(
                            (double)(2 * (2 * l - 1 + dl) - 1), -(n + 1));
                        F.add(Segment{{xp, yp, zp}, {xc, yc, zc}});
                    }
                }
            }
        }
    }
    return F;
}

// Deepest nodes of the depth-N tree (level N+1): 4^N points at height
// 2^-(N+1), whose xy-projection is the odd-dyadic grid of spacing 2^-N.
inline std::vector<Point> example2_leaves(int N) {
    if (N < 0 || N > 12)
        throw std::invalid_argument("example2_leaves: N must be in [0, 12]");
    std::vector<Point> out;
    std::int64_t side = std::int64_t{1} << N;
    out.reserve((std::size_t)(side * side));
    double z = std::ldexp(1.0, -(N + 1));
    for (std::int64_t k = 1; k <= side; ++k) {
        double x = std::ldexp((double)(2 * k - 1), -(N + 1));
        for (std::int64_t l = 1; l <= side; ++l) {
            double y = std::ldexp((double)(2 * l - 1), -(N + 1));
            out.push_back(Point{x, y, z});
        }
    }
    return out;
}

// Left endpoints of the depth-d middle-half Cantor construction on [0, 1]
// (keep [0, 1/4] and [3/4, 1], recurse).  2^d points, ascending, all
// exactly representable.
inline std::vector<double> cantor_quarter_points(int depth) {
    if (depth < 0 || depth > 12)
        throw std::invalid_argument("cantor_quarter_points: depth in [0, 12]");
    std::vector<double> out;
    out.reserve(std::size_t{1} << depth);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << depth); ++v) {
        double x = 0.0;
        for (int i = 1; i <= depth; ++i)
            if ((v >> (depth - i)) & 1u) x += std::ldexp(3.0, -2 * i);
        out.push_back(x);
    }
    return out;
}

// Line family {l(a,b) : a, b in the depth-truncated Cantor set}, clipped
// once to windowA (the "segments") and once to the larger windowB (the
// stand-in for fuller lines).  The two families are index-aligned and the
// windowA segment is always a subset of its windowB counterpart.
inline std::pair<SegmentFamily, SegmentFamily> cantor_dual_family(
    int depth, const Window& windowA, const Window& windowB) {
    if (windowA.dim() != 2 || windowB.dim() != 2)
        throw std::invalid_argument("cantor_dual_family: windows must be 2-D");
    if (!windowB.contains(windowA))
        throw std::invalid_argument(
            "cantor_dual_family: windowA must lie inside windowB");
    std::vector<double> pts = cantor_quarter_points(depth);
    SegmentFamily A(2), B(2);
    for (std::size_t ia = 0; ia < pts.size(); ++ia) {
        for (std::size_t ib = 0; ib < pts.size(); ++ib) {
            GeneralLine l = line_from_param({pts[ia]}, {pts[ib]});
            auto sa = clip(l, windowA);
            auto sb = clip(l, windowB);
            if (!sa || !sb)
                throw std::domain_error(
                    "cantor_dual_family: a parameter line misses the window");
            A.add(std::move(*sa));
            B.add(std::move(*sb));
        }
    }
    return {std::move(A), std::move(B)};
}

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Slope grid of direction_complete_family: M values spanning [-1, 1].
inline std::vector<double> direction_complete_slopes(int M) {
    if (M < 1) throw std::invalid_argument("direction_complete_slopes: M >= 1");
    std::vector<double> a((std::size_t)M);
    if (M == 1) {
        a[0] = -1.0;
        return a;
    }
    for (int i = 0; i < M; ++i)
        a[(std::size_t)i] = -1.0 + 2.0 * (double)i / (double)(M - 1);
    return a;
}

// M planar segments with slopes on the uniform grid of [-1, 1], each with
// x-range inside [1, 2] (bounded away from the hyperplane x1 = 0) and
// intercept b_i = 0.1*i/M.  Horizontal placement is drawn deterministically
// from the seed.  Dualizing and extending this family yields lines through
// the points (0, a_i).
inline SegmentFamily direction_complete_family(int M, double seg_len,
                                               std::uint64_t placement_seed) {
    if (M < 1)
        throw std::invalid_argument("direction_complete_family: M must be >= 1");
    if (!(seg_len > 0.0) || !(seg_len <= 1.0))
        throw std::invalid_argument(
            "direction_complete_family: seg_len must be in (0, 1]");
    std::vector<double> slopes = direction_complete_slopes(M);
    SegmentFamily F(2);
    for (int i = 0; i < M; ++i) {
        double a = slopes[(std::size_t)i];
        double w = seg_len / std::sqrt(1.0 + a * a); // x-extent
        double u = (double)(splitmix64(placement_seed + (std::uint64_t)i) >> 11) *
                   0x1p-53;
        double x0 = 1.0 + u * (1.0 - w);
        double x1 = std::min(x0 + w, 2.0);
        double b = 0.1 * (double)i / (double)M;
        F.add(Segment{{x0, a * x0 + b}, {x1, a * x1 + b}});
    }
    return F;
}

} // namespace segdim
