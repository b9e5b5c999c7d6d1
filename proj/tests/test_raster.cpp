#include <catch2/catch.hpp>

#include <random>
#include <set>

#include "segdim/construct.hpp"
#include "segdim/raster.hpp"
#include "support/oracle.hpp"

using namespace segdim;

namespace {

Window unit_square() { return Window{{0.0, 0.0}, {1.0, 1.0}}; }

std::set<std::uint64_t> to_set(const CellSet& cs) {
    return {cs.occupied.begin(), cs.occupied.end()};
}

std::set<std::pair<std::int64_t, std::int64_t>> cells2(const CellSet& cs) {
    std::set<std::pair<std::int64_t, std::int64_t>> out;
    std::int64_t idx[2];
    for (std::uint64_t code : cs.occupied) {
        cs.grid.unpack(code, idx);
        out.insert({idx[0], idx[1]});
    }
    return out;
}

SegmentFamily make2(std::initializer_list<std::array<double, 4>> rows) {
    SegmentFamily F(2);
    for (const auto& r : rows) F.add(Segment{{r[0], r[1]}, {r[2], r[3]}});
    return F;
}

void check_against_oracle(const SegmentFamily& F, const Window& w, int kmax) {
    for (int k = 0; k <= kmax; ++k) {
        CellSet got = rasterize(F, Grid{w, k});
        std::set<std::uint64_t> expect = oracle::rasterize(F, w, k);
        INFO("level " << k);
        REQUIRE(to_set(got) == expect);
    }
}

// dyadic coordinates with 12-bit mantissas: adversarial for boundary ties
double rand_dyadic(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_int_distribution<int> m(0, 1 << 12);
    return lo + (hi - lo) * std::ldexp((double)m(rng), -12);
}

} // namespace

TEST_CASE("grid rejects level overflow and classifies window edges") {
    CHECK_THROWS_AS(Grid(unit_square(), 16), std::invalid_argument);
    CHECK_THROWS_AS(Grid(Window{{0, 0, 0}, {1, 1, 1}}, 11), std::invalid_argument);
    Grid g{unit_square(), 2};
    CHECK(g.cells_per_axis() == 4);
    auto c = g.classify(1.0, 0); // == hi: clamps into the last cell
    CHECK(c.bucket == 4);
    CHECK(c.on_boundary);
    std::int64_t cells[2];
    int ncells = 0;
    g.touched_cells(c, cells, ncells);
    REQUIRE(ncells == 1);
    CHECK(cells[0] == 3);
    CHECK_THROWS_AS(g.classify(1.5, 0), std::domain_error);
    CHECK_THROWS_AS(g.classify(-0.25, 1), std::domain_error);
}

TEST_CASE("horizontal unit segment occupies one clamped row") {
    SegmentFamily F = make2({{0.0, 0.0, 1.0, 0.0}});
    CellSet cs = rasterize(F, Grid{unit_square(), 2});
    CHECK(cells2(cs) == std::set<std::pair<std::int64_t, std::int64_t>>{
                            {0, 0}, {1, 0}, {2, 0}, {3, 0}});
}

TEST_CASE("diagonal touches corner neighbors under closed-box counting") {
    SegmentFamily F = make2({{0.0, 0.0, 1.0, 1.0}});
    CellSet cs = rasterize(F, Grid{unit_square(), 2});
    // the four diagonal cells plus the six corner-touching neighbors,
    // frozen from the brute-force oracle
    std::set<std::pair<std::int64_t, std::int64_t>> expect = {
        {0, 0}, {1, 1}, {2, 2}, {3, 3},
        {0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}};
    CHECK(cells2(cs) == expect);
    CHECK(to_set(cs) == oracle::rasterize(F, unit_square(), 2));
}

TEST_CASE("segment running along an interior grid line fills both columns") {
    SegmentFamily F = make2({{0.5, 0.0, 0.5, 1.0}});
    CellSet cs = rasterize(F, Grid{unit_square(), 2});
    std::set<std::pair<std::int64_t, std::int64_t>> expect;
    for (std::int64_t y = 0; y < 4; ++y) {
        expect.insert({1, y});
        expect.insert({2, y});
    }
    CHECK(cells2(cs) == expect);
}

TEST_CASE("empty family rasterizes to the empty cell set") {
    SegmentFamily F(2);
    CHECK(rasterize(F, Grid{unit_square(), 3}).count() == 0);
}

TEST_CASE("segment outside the window is an error, not a silent clip") {
    SegmentFamily F = make2({{0.25, 0.25, 1.25, 0.5}});
    CHECK_THROWS_WITH(rasterize(F, Grid{unit_square(), 2}),
                      Catch::Contains("segment 0"));
}

TEST_CASE("unit segment box counts double per level") {
    SegmentFamily F = make2({{0.0, 0.0, 1.0, 0.0}});
    BoxCountCurve curve = box_count(F, unit_square(), 1, 4);
    REQUIRE(curve.entries.size() == 4);
    CHECK(curve.entries[0].count == 2);
    CHECK(curve.entries[1].count == 4);
    CHECK(curve.entries[2].count == 8);
    CHECK(curve.entries[3].count == 16);
}

TEST_CASE("square boundary counts 4*2^k - 4 cells") {
    SegmentFamily F = make2({{0.0, 0.0, 1.0, 0.0},
                             {1.0, 0.0, 1.0, 1.0},
                             {1.0, 1.0, 0.0, 1.0},
                             {0.0, 1.0, 0.0, 0.0}});
    BoxCountCurve curve = box_count(F, unit_square(), 1, 4);
    for (const CurveEntry& e : curve.entries)
        CHECK(e.count == 4ull * (1ull << e.level) - 4);
    CHECK(to_set(rasterize(F, Grid{unit_square(), 2})) ==
          oracle::rasterize(F, unit_square(), 2));
}

TEST_CASE("componentwise subset families never count more cells") {
    SegmentFamily small(2), large(2);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 12; ++i) {
        double x0 = rand_dyadic(rng, 0.0, 1.0), y0 = rand_dyadic(rng, 0.0, 1.0);
        double x1 = rand_dyadic(rng, 0.0, 1.0), y1 = rand_dyadic(rng, 0.0, 1.0);
        if (x0 == x1 && y0 == y1) continue;
        Segment s{{x0, y0}, {x1, y1}};
        // large family gets the full segment, small family its first half
        Point mid{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
        if (!(mid == s.p)) {
            small.add(Segment{s.p, mid});
            large.add(s);
        }
    }
    BoxCountCurve a = box_count(small, unit_square(), 1, 6);
    BoxCountCurve b = box_count(large, unit_square(), 1, 6);
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK(a.entries[i].count <= b.entries[i].count);
}

TEST_CASE("rasterizer agrees with the brute-force oracle") {
    SECTION("dyadic families in the plane") {
        std::mt19937_64 rng(17);
        for (int fam = 0; fam < 25; ++fam) {
            SegmentFamily F(2);
            for (int i = 0; i < 6; ++i) {
                Coords p{rand_dyadic(rng, 0, 1), rand_dyadic(rng, 0, 1)};
                Coords q{rand_dyadic(rng, 0, 1), rand_dyadic(rng, 0, 1)};
                if (p == q) continue;
                F.add(Segment{Point(p), Point(q)});
            }
            if (F.size() == 0) continue;
            check_against_oracle(F, unit_square(), 4);
        }
    }
    SECTION("full-precision clipped lines in the plane") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        Window w{{-1.0, -1.0}, {1.0, 1.0}};
        SegmentFamily F(2);
        while (F.size() < 10) {
            GeneralLine l = line_from_param({u(rng) * 3}, {u(rng)});
            if (auto s = clip(l, w)) F.add(std::move(*s));
        }
        check_against_oracle(F, w, 4);
    }
    SECTION("dyadic families in R^3") {
        std::mt19937_64 rng(23);
        for (int fam = 0; fam < 8; ++fam) {
            SegmentFamily F(3);
            for (int i = 0; i < 4; ++i) {
                Coords p{rand_dyadic(rng, 0, 1), rand_dyadic(rng, 0, 1),
                         rand_dyadic(rng, 0, 1)};
                Coords q{rand_dyadic(rng, 0, 1), rand_dyadic(rng, 0, 1),
                         rand_dyadic(rng, 0, 1)};
                if (p == q) continue;
                F.add(Segment{Point(p), Point(q)});
            }
            if (F.size() == 0) continue;
            check_against_oracle(F, Window{{0, 0, 0}, {1, 1, 1}}, 3);
        }
    }
    SECTION("tree edges in R^3") {
        check_against_oracle(example2_tree(2), Window{{0, 0, 0}, {1, 1, 1}}, 3);
    }
}

TEST_CASE("occupancy is independent of the thread count") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SegmentFamily F(2);
    for (int i = 0; i < 64; ++i) {
        Coords p{u(rng), u(rng)}, q{u(rng), u(rng)};
        if (p == q) continue;
        F.add(Segment{Point(p), Point(q)});
    }
    Grid g{unit_square(), 7};
    CellSet base = rasterize(F, g, 1);
    for (int threads : {2, 3, 8, 0})
        CHECK(rasterize(F, g, threads).occupied == base.occupied);
}

TEST_CASE("estimate_dimension recovers exact log-linear data") {
    SECTION("slope one") {
        BoxCountCurve c;
        c.dim = 2;
        for (int k = 1; k <= 6; ++k)
            c.entries.push_back({k, std::ldexp(1.0, -k), 1ull << k});
        DimensionEstimate e = estimate_dimension(c, 1, 6);
        CHECK(e.slope == Approx(1.0).margin(1e-12));
        CHECK(e.r2 == Approx(1.0).margin(1e-12));
    }
    SECTION("slope two") {
        BoxCountCurve c;
        c.dim = 2;
        for (int k = 1; k <= 6; ++k)
            c.entries.push_back({k, std::ldexp(1.0, -k), 1ull << (2 * k)});
        DimensionEstimate e = estimate_dimension(c, 1, 6);
        CHECK(e.slope == Approx(2.0).margin(1e-12));
        CHECK(e.r2 == Approx(1.0).margin(1e-12));
    }
    SECTION("fractional slope from N = delta^-1.5 on even levels") {
        BoxCountCurve c;
        c.dim = 2;
        for (int k = 0; k <= 6; k += 2)
            c.entries.push_back({k, std::ldexp(1.0, -k), 1ull << (3 * k / 2)});
        DimensionEstimate e = estimate_dimension(c, 0, 6);
        CHECK(e.slope == Approx(1.5).margin(1e-12));
        CHECK(e.r2 == Approx(1.0).margin(1e-12));
    }
    SECTION("constant data fits slope zero perfectly") {
        BoxCountCurve c;
        c.dim = 2;
        for (int k = 0; k <= 4; ++k)
            c.entries.push_back({k, std::ldexp(1.0, -k), 1});
        DimensionEstimate e = estimate_dimension(c, 0, 4);
        CHECK(e.slope == 0.0);
        CHECK(e.r2 == 1.0);
    }
}

TEST_CASE("estimate_dimension error paths") {
    BoxCountCurve c;
    c.dim = 2;
    for (int k = 0; k <= 5; ++k)
        c.entries.push_back({k, std::ldexp(1.0, -k), (std::uint64_t)(k == 0 ? 0 : 1)});
    CHECK_THROWS_AS(estimate_dimension(c, 0, 2), std::invalid_argument); // short
    CHECK_THROWS_AS(estimate_dimension(c, 0, 5), std::invalid_argument); // zero
    BoxCountCurve sparse;
    sparse.dim = 2;
    sparse.entries.push_back({0, 1.0, 1});
    sparse.entries.push_back({5, std::ldexp(1.0, -5), 4});
    CHECK_THROWS_AS(estimate_dimension(sparse, 0, 5), std::invalid_argument);
}

TEST_CASE("curve validation rejects impossible counts") {
    BoxCountCurve down;
    down.dim = 2;
    down.entries = {{1, 0.5, 8}, {2, 0.25, 7}};
    CHECK_THROWS_AS(down.validate(), std::invalid_argument);
    BoxCountCurve fast;
    fast.dim = 2;
    fast.entries = {{1, 0.5, 2}, {2, 0.25, 9}};
    CHECK_THROWS_AS(fast.validate(), std::invalid_argument);
    BoxCountCurve ok;
    ok.dim = 2;
    ok.entries = {{1, 0.5, 2}, {2, 0.25, 8}};
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("slice profile of a single line is flat") {
    LineFamily L = lines_from_params({{{0.25}, {0.125}}});
    Window w = unit_square();
    // generic t keeps the slice point off every dyadic boundary, so each
    // level counts exactly one cell
    auto profile = slice_profile(L, w, {1.0 / 3.0, 0.37, 0.61}, 1, 5);
    REQUIRE(profile.size() == 3);
    for (const auto& [t, est] : profile) {
        CHECK(est.slope == Approx(0.0).margin(1e-12));
        CHECK(est.r2 == 1.0);
    }
    CHECK_THROWS_AS(slice_profile(L, w, {2.0}, 1, 5), std::invalid_argument);
}

TEST_CASE("product families obey the dimension additivity bound") {
    SegmentFamily A = example1_segments(5);
    SegmentFamily P = product_family(A, 2); // 961 segments in R^4
    Window sq{{0.0, 0.0}, {1.0, 1.0}};
    Window hyper{{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0}};
    DimensionEstimate ea = estimate_dimension(box_count(A, sq, 1, 4), 1, 4);
    DimensionEstimate ep = estimate_dimension(box_count(P, hyper, 1, 4), 1, 4);
    CHECK(ep.slope <= 2.0 * ea.slope + 0.3);
}

TEST_CASE("point rasterization widens across touched boundaries") {
    Grid g{unit_square(), 2};
    // a corner point touches four closed cells
    CellSet cs = rasterize_points({{0.5, 0.5}}, g);
    CHECK(cells2(cs) == std::set<std::pair<std::int64_t, std::int64_t>>{
                            {1, 1}, {1, 2}, {2, 1}, {2, 2}});
    CellSet edge = rasterize_points({{0.25, 0.1}}, g);
    CHECK(cells2(edge) == std::set<std::pair<std::int64_t, std::int64_t>>{
                              {0, 0}, {1, 0}});
    CHECK_THROWS_AS(rasterize_points({{1.5, 0.0}}, g), std::domain_error);
}
