// Text interchange.
//
// Geometry files hold one record per line, comma separated, '#' to end of
// line is a comment:
//   S,dim,p1,...,pn,q1,...,qn          segment
//   L,dim,a1,...,a(n-1),b1,...,b(n-1)  line in slope/intercept form
//   G,dim,base1,...,basen,dir1,...,dirn  any other line
// Reals are written with 17 significant digits so parsing them back
// reproduces the exact double.

#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "segdim/geometry.hpp"
#include "segdim/raster.hpp"

namespace segdim {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what),
          line(line_) {}
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct GeometryData {
    std::size_t dim = 0;
    SegmentFamily segments;
    LineFamily lines;

    bool empty() const { return segments.size() == 0 && lines.size() == 0; }
};

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& s, int lineno) {
    std::string t = trim(s);
    if (t.empty()) throw ParseError(lineno, "empty numeric field");
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ParseError(lineno, "bad numeric field '" + t + "'");
    return v;
}

inline long parse_int(const std::string& s, int lineno) {
    std::string t = trim(s);
    char* end = nullptr;
    long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw ParseError(lineno, "bad integer field '" + t + "'");
    return v;
}

} // namespace detail

inline GeometryData read_geometry(std::istream& in) {
    GeometryData data;
    bool lines_representable = true;
    std::vector<ParamLine> view;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = detail::trim(raw);
        if (line.empty()) continue;
        std::vector<std::string> f = detail::split_fields(line);
        const std::string tag = detail::trim(f[0]);
        if (f.size() < 2) throw ParseError(lineno, "missing dimension field");
        long n = detail::parse_int(f[1], lineno);
        if (n < 2 || n > 30) throw ParseError(lineno, "unsupported dimension");
        if (data.dim == 0)
            data.dim = (std::size_t)n;
        else if (data.dim != (std::size_t)n)
            throw ParseError(lineno, "mixed dimensions in one file");
        auto need = [&](std::size_t count) {
            if (f.size() != 2 + count)
                throw ParseError(lineno, "expected " + std::to_string(2 + count) +
                                             " fields, got " +
                                             std::to_string(f.size()));
        };
        try {
            if (tag == "S") {
                need(2 * (std::size_t)n);
                Coords p((std::size_t)n), q((std::size_t)n);
                for (long j = 0; j < n; ++j)
                    p[(std::size_t)j] = detail::parse_real(f[2 + (std::size_t)j], lineno);
                for (long j = 0; j < n; ++j)
                    q[(std::size_t)j] =
                        detail::parse_real(f[2 + (std::size_t)(n + j)], lineno);
                data.segments.add(Segment{Point(std::move(p)), Point(std::move(q))});
            } else if (tag == "L") {
                need(2 * ((std::size_t)n - 1));
                Coords a((std::size_t)n - 1), b((std::size_t)n - 1);
                for (long j = 0; j < n - 1; ++j)
                    a[(std::size_t)j] = detail::parse_real(f[2 + (std::size_t)j], lineno);
                for (long j = 0; j < n - 1; ++j)
                    b[(std::size_t)j] =
                        detail::parse_real(f[2 + (std::size_t)(n - 1 + j)], lineno);
                data.lines.lines.push_back(line_from_param(a, b));
                view.push_back(ParamLine{std::move(a), std::move(b)});
            } else if (tag == "G") {
                need(2 * (std::size_t)n);
                Coords base((std::size_t)n), dir((std::size_t)n);
                for (long j = 0; j < n; ++j)
                    base[(std::size_t)j] =
                        detail::parse_real(f[2 + (std::size_t)j], lineno);
                for (long j = 0; j < n; ++j)
                    dir[(std::size_t)j] =
                        detail::parse_real(f[2 + (std::size_t)(n + j)], lineno);
                GeneralLine l{Point(std::move(base)), std::move(dir)};
                if (auto pl = param_from_line(l)) {
                    view.push_back(*pl);
                } else {
                    lines_representable = false;
                }
                data.lines.lines.push_back(std::move(l));
            } else {
                throw ParseError(lineno, "unknown record tag '" + tag + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw ParseError(lineno, e.what());
        }
        data.lines.dim = data.segments.dim = data.dim;
    }
    if (lines_representable && !view.empty())
        data.lines.param_view = std::move(view);
    return data;
}

inline GeometryData read_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_geometry(in);
}

inline void write_segments(std::ostream& out, const SegmentFamily& F) {
    for (const Segment& s : F.segments) {
        out << "S," << s.dim();
        for (double c : s.p.x) out << ',' << format_real(c);
        for (double c : s.q.x) out << ',' << format_real(c);
        out << '\n';
    }
}

inline void write_lines(std::ostream& out, const LineFamily& F) {
    for (const GeneralLine& l : F.lines) {
        if (auto pl = param_from_line(l)) {
            out << "L," << l.dim();
            for (double c : pl->a) out << ',' << format_real(c);
            for (double c : pl->b) out << ',' << format_real(c);
        } else {
            out << "G," << l.dim();
            for (double c : l.base().x) out << ',' << format_real(c);
            for (double c : l.dir()) out << ',' << format_real(c);
        }
        out << '\n';
    }
}

inline void write_segments_file(const std::string& path, const SegmentFamily& F) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_segments(out, F);
}

// ---------------------------------------------------------------------------
// CSV

inline void write_curve_csv(std::ostream& out, const BoxCountCurve& curve) {
    out << "k,delta,count\n";
    for (const CurveEntry& e : curve.entries)
        out << e.level << ',' << format_real(e.delta) << ',' << e.count << '\n';
}

inline BoxCountCurve read_curve_csv(std::istream& in) {
    BoxCountCurve curve;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.empty() || line == "k,delta,count") continue;
        std::vector<std::string> f = detail::split_fields(line);
        if (f.size() != 3) throw ParseError(lineno, "expected k,delta,count");
        CurveEntry e;
        e.level = (int)detail::parse_int(f[0], lineno);
        e.delta = detail::parse_real(f[1], lineno);
        long long cnt = detail::parse_int(f[2], lineno);
        if (cnt < 0) throw ParseError(lineno, "negative count");
        e.count = (std::uint64_t)cnt;
        curve.entries.push_back(e);
    }
    curve.validate();
    return curve;
}

inline void write_estimate_csv(std::ostream& out, const DimensionEstimate& e) {
    out << "slope,intercept,r2,k_lo,k_hi\n"
        << format_real(e.slope) << ',' << format_real(e.intercept) << ','
        << format_real(e.r2) << ',' << e.k_lo << ',' << e.k_hi << '\n';
}

inline void write_profile_csv(
    std::ostream& out,
    const std::vector<std::pair<double, DimensionEstimate>>& profile) {
    out << "t,slope,r2\n";
    for (const auto& [t, est] : profile)
        out << format_real(t) << ',' << format_real(est.slope) << ','
            << format_real(est.r2) << '\n';
}

} // namespace segdim
