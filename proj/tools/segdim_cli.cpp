// segdim command-line front end.
//
// Subcommands compose through flat files: `build` emits a generator's
// segment family, `extend`/`dualize` transform families, `boxcount` counts
// occupied grid cells across dyadic scales, `dim` fits the log-log slope,
// `slice` writes a dimension profile of vertical slices.  Summary text goes
// to stdout, data only to files, so pipelines stay clean.
//
// Exit codes: 0 success, 2 usage or bad parameters, 3 unreadable or
// malformed input, 4 domain violations (punched hyperplane, vertical
// lines, segment outside window).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "segdim/construct.hpp"
#include "segdim/geometry.hpp"
#include "segdim/io.hpp"
#include "segdim/raster.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitDomain = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

segdim::Window make_window(const std::vector<double>& lo,
                           const std::vector<double>& hi, std::size_t dim) {
    if (lo.size() != dim || hi.size() != dim)
        throw UsageError("window lo/hi must each have " + std::to_string(dim) +
                         " coordinates");
    return segdim::Window{segdim::Point(segdim::Coords(lo.begin(), lo.end())),
                          segdim::Point(segdim::Coords(hi.begin(), hi.end()))};
}

segdim::SegmentFamily require_segments(const segdim::GeometryData& data,
                                       const std::string& path) {
    if (data.lines.size() != 0)
        throw segdim::ParseError(0, path + ": expected segment records only");
    return data.segments;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << body;
}

void print_summary(const segdim::SegmentFamily& F) {
    if (F.size() == 0) {
        std::cout << "segments=0\n";
        return;
    }
    segdim::Coords lo = F.segments[0].p.x, hi = lo;
    for (const segdim::Segment& s : F.segments) {
        for (std::size_t j = 0; j < F.dim; ++j) {
            lo[j] = std::min({lo[j], s.p[j], s.q[j]});
            hi[j] = std::max({hi[j], s.p[j], s.q[j]});
        }
    }
    std::cout << "segments=" << F.size() << " bbox=";
    for (std::size_t j = 0; j < F.dim; ++j)
        std::cout << (j ? "," : "[") << segdim::format_real(lo[j]);
    std::cout << "]..[";
    for (std::size_t j = 0; j < F.dim; ++j)
        std::cout << (j ? "," : "") << segdim::format_real(hi[j]);
    std::cout << "]\n";
}

struct Options {
    std::string construction;
    std::string in_path, out_path, out_b_path;
    std::vector<double> lo, hi, lo_a, hi_a, lo_b, hi_b;
    std::vector<double> t_values, t_range;
    int levels = 0, depth = -1, count = 0;
    double seg_len = 0.5;
    std::uint64_t seed = 1;
    int k_min = -1, k_max = -1, k_lo = -1, k_hi = -1;
    int t_count = 0;
    int threads = 0;
};

int run_build(const Options& opt) {
    using namespace segdim;
    SegmentFamily F;
    if (opt.construction == "example1" || opt.construction == "example1-extended") {
        if (opt.levels <= 0) throw UsageError("requires --levels N");
        F = opt.construction == "example1" ? example1_segments(opt.levels)
                                           : example1_extended(opt.levels);
    } else if (opt.construction == "example2") {
        if (opt.depth < 0) throw UsageError("requires --depth N");
        F = example2_tree(opt.depth);
        F.dim = 3;
    } else if (opt.construction == "cantor-dual") {
        if (opt.depth < 0) throw UsageError("requires --depth N");
        if (opt.out_b_path.empty()) throw UsageError("requires --out-b FILE");
        Window wa = make_window(opt.lo_a, opt.hi_a, 2);
        Window wb = make_window(opt.lo_b, opt.hi_b, 2);
        auto [A, B] = cantor_dual_family(opt.depth, wa, wb);
        std::ostringstream bodyB;
        write_segments(bodyB, B);
        write_file(opt.out_b_path, bodyB.str());
        F = std::move(A);
    } else if (opt.construction == "direction-complete") {
        if (opt.count <= 0) throw UsageError("requires --count M");
        F = direction_complete_family(opt.count, opt.seg_len, opt.seed);
    } else {
        throw UsageError("unknown construction '" + opt.construction +
                         "' (expected example1, example1-extended, example2, "
                         "cantor-dual or direction-complete)");
    }
    std::ostringstream body;
    write_segments(body, F);
    write_file(opt.out_path, body.str());
    print_summary(F);
    return kExitOk;
}

int run_extend(const Options& opt) {
    using namespace segdim;
    GeometryData data = read_geometry_file(opt.in_path);
    SegmentFamily in = require_segments(data, opt.in_path);
    if (in.size() == 0) {
        write_file(opt.out_path, "");
        std::cout << "kept=0 dropped=0\n";
        return kExitOk;
    }
    Window w = make_window(opt.lo, opt.hi, in.dim);
    SegmentFamily out(in.dim);
    std::size_t dropped = 0;
    for (const Segment& s : in.segments) {
        auto c = clip(extend(s), w);
        if (c)
            out.add(std::move(*c));
        else
            ++dropped;
    }
    std::ostringstream body;
    write_segments(body, out);
    write_file(opt.out_path, body.str());
    std::cout << "kept=" << out.size() << " dropped=" << dropped << "\n";
    return kExitOk;
}

int run_dualize(const Options& opt) {
    using namespace segdim;
    GeometryData data = read_geometry_file(opt.in_path);
    SegmentFamily in = require_segments(data, opt.in_path);
    SegmentFamily out(in.dim);
    for (std::size_t i = 0; i < in.size(); ++i) {
        try {
            out.add(dualize_segment(in.segments[i]));
        } catch (const std::domain_error& e) {
            throw std::domain_error("segment " + std::to_string(i) + ": " +
                                    e.what());
        }
    }
    std::ostringstream body;
    write_segments(body, out);
    write_file(opt.out_path, body.str());
    std::cout << "segments=" << out.size() << "\n";
    return kExitOk;
}

int run_boxcount(const Options& opt) {
    using namespace segdim;
    GeometryData data = read_geometry_file(opt.in_path);
    SegmentFamily in = require_segments(data, opt.in_path);
    if (opt.k_min < 0 || opt.k_max < 0) throw UsageError("requires --k-min and --k-max");
    Window w = make_window(opt.lo, opt.hi, in.dim == 0 ? opt.lo.size() : in.dim);
    BoxCountCurve curve = box_count(in, w, opt.k_min, opt.k_max, opt.threads);
    std::ostringstream body;
    write_curve_csv(body, curve);
    write_file(opt.out_path, body.str());
    std::cout << "levels=" << curve.entries.size() << " count_max="
              << curve.entries.back().count << "\n";
    return kExitOk;
}

int run_dim(const Options& opt) {
    using namespace segdim;
    std::ifstream in(opt.in_path);
    if (!in) throw std::runtime_error("cannot open '" + opt.in_path + "'");
    BoxCountCurve curve = read_curve_csv(in);
    if (curve.entries.empty()) throw ParseError(0, "empty count CSV");
    // default fit window: drop the two coarsest levels (pre-asymptotic)
    // and the finest one (saturates against truncation depth)
    int k_lo = opt.k_lo >= 0 ? opt.k_lo : curve.entries.front().level + 2;
    int k_hi = opt.k_hi >= 0 ? opt.k_hi : curve.entries.back().level - 1;
    DimensionEstimate est = estimate_dimension(curve, k_lo, k_hi);
    write_estimate_csv(std::cout, est);
    return kExitOk;
}

int run_slice(const Options& opt) {
    using namespace segdim;
    GeometryData data = read_geometry_file(opt.in_path);
    LineFamily L;
    if (data.segments.size() != 0 && data.lines.size() != 0)
        throw segdim::ParseError(0, "mixed segment and line records");
    if (data.segments.size() != 0)
        L = extend_family(data.segments);
    else
        L = std::move(data.lines);
    if (!L.param_view)
        throw std::domain_error(
            "input contains lines orthogonal to the x1 axis; no parametric view");
    if (opt.k_min < 0 || opt.k_max < 0) throw UsageError("requires --k-min and --k-max");
    Window w = make_window(opt.lo, opt.hi, L.dim);
    std::vector<double> ts = opt.t_values;
    if (opt.t_count > 0) {
        double lo = w.lo[0], hi = w.hi[0];
        if (opt.t_range.size() == 2) {
            lo = opt.t_range[0];
            hi = opt.t_range[1];
        } else if (!opt.t_range.empty()) {
            throw UsageError("--t-range takes exactly two values");
        }
        for (int j = 0; j < opt.t_count; ++j)
            ts.push_back(lo + (hi - lo) * ((double)j + 0.5) / (double)opt.t_count);
    }
    if (ts.empty()) throw UsageError("requires --t values or --t-count N");
    auto profile = slice_profile(L, w, ts, opt.k_min, opt.k_max, opt.threads);
    std::ostringstream body;
    write_profile_csv(body, profile);
    write_file(opt.out_path, body.str());
    std::cout << "slices=" << profile.size() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"segment-family geometry and box-dimension toolkit"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* build = app.add_subcommand("build", "generate a segment family");
    build->add_option("construction", opt.construction,
                      "example1 | example1-extended | example2 | cantor-dual | "
                      "direction-complete")
        ->required();
    build->add_option("--out", opt.out_path, "output geometry file")->required();
    build->add_option("--out-b", opt.out_b_path,
                      "second output file (cantor-dual)");
    build->add_option("--levels", opt.levels, "levels (example1 family)");
    build->add_option("--depth", opt.depth, "depth (example2, cantor-dual)");
    build->add_option("--count", opt.count, "direction count");
    build->add_option("--seg-len", opt.seg_len, "segment length, in (0,1]");
    build->add_option("--seed", opt.seed, "placement seed");
    build->add_option("--lo-a", opt.lo_a, "window A lower corner")->expected(-1);
    build->add_option("--hi-a", opt.hi_a, "window A upper corner")->expected(-1);
    build->add_option("--lo-b", opt.lo_b, "window B lower corner")->expected(-1);
    build->add_option("--hi-b", opt.hi_b, "window B upper corner")->expected(-1);

    CLI::App* extend = app.add_subcommand(
        "extend", "extend segments to lines and clip to a window");
    extend->add_option("--in", opt.in_path)->required();
    extend->add_option("--out", opt.out_path)->required();
    extend->add_option("--lo", opt.lo, "window lower corner")->expected(-1)->required();
    extend->add_option("--hi", opt.hi, "window upper corner")->expected(-1)->required();

    CLI::App* dualize = app.add_subcommand(
        "dualize", "apply the projective point-line duality to each segment");
    dualize->add_option("--in", opt.in_path)->required();
    dualize->add_option("--out", opt.out_path)->required();

    CLI::App* boxcount =
        app.add_subcommand("boxcount", "count occupied grid cells per level");
    boxcount->add_option("--in", opt.in_path)->required();
    boxcount->add_option("--out", opt.out_path, "output CSV")->required();
    boxcount->add_option("--lo", opt.lo)->expected(-1)->required();
    boxcount->add_option("--hi", opt.hi)->expected(-1)->required();
    boxcount->add_option("--k-min", opt.k_min)->required();
    boxcount->add_option("--k-max", opt.k_max)->required();
    boxcount->add_option("--threads", opt.threads, "0 = auto");

    CLI::App* dim = app.add_subcommand(
        "dim", "fit the box-dimension slope of a count CSV");
    dim->add_option("--in", opt.in_path, "count CSV")->required();
    dim->add_option("--k-lo", opt.k_lo,
                    "fit window start (default: coarsest level + 2)");
    dim->add_option("--k-hi", opt.k_hi,
                    "fit window end (default: finest level - 1)");

    CLI::App* slice = app.add_subcommand(
        "slice", "box-dimension profile of vertical slices");
    slice->add_option("--in", opt.in_path)->required();
    slice->add_option("--out", opt.out_path, "output CSV")->required();
    slice->add_option("--lo", opt.lo)->expected(-1)->required();
    slice->add_option("--hi", opt.hi)->expected(-1)->required();
    slice->add_option("--t", opt.t_values, "explicit slice positions")->expected(-1);
    slice->add_option("--t-count", opt.t_count, "number of uniform samples");
    slice->add_option("--t-range", opt.t_range, "sample range (default: window x1)")
        ->expected(-1);
    slice->add_option("--k-min", opt.k_min)->required();
    slice->add_option("--k-max", opt.k_max)->required();
    slice->add_option("--threads", opt.threads, "0 = auto");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) return run_build(opt);
        if (extend->parsed()) return run_extend(opt);
        if (dualize->parsed()) return run_dualize(opt);
        if (boxcount->parsed()) return run_boxcount(opt);
        if (dim->parsed()) return run_dim(opt);
        if (slice->parsed()) return run_slice(opt);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const segdim::ParseError& e) {
        std::cerr << "error: " << opt.in_path << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitUsage;
}
