#include "lorentz/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lorentz {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> toks;
    std::istringstream iss(line);
    std::string t;
    while (iss >> t) {
        if (t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

// lines, comments stripped, blanks skipped
std::vector<std::vector<std::string>> read_lines(std::istream& in) {
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line)) {
        auto toks = tokenize(line);
        if (!toks.empty()) out.push_back(std::move(toks));
    }
    return out;
}

double parse_real(const std::string& s) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        require(pos == s.size(), ErrorKind::Parse, "bad number: " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorKind::Parse, "bad number: " + s);
    }
}

int parse_int(const std::string& s) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        require(pos == s.size(), ErrorKind::Parse, "bad integer: " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorKind::Parse, "bad integer: " + s);
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

DiscreteSpacetime read_spacetime(std::istream& in) {
    auto lines = read_lines(in);
    require(!lines.empty() && lines[0].size() == 2 && lines[0][0] == "spacetime" &&
                lines[0][1] == "v1",
            ErrorKind::Parse, "spacetime file: missing 'spacetime v1' header");
    size_t li = 1;

    // generator stanza?
    if (li < lines.size() && lines[li][0] == "generator") {
        const auto& g = lines[li];
        NormFamily family;
        double p = 2.0;
        if (g.size() == 2 && g[1] == "minkowski") {
            family = NormFamily::Minkowski;
        } else if (g.size() == 3 && g[1] == "hyperbolic_lp") {
            family = NormFamily::HyperbolicLp;
            p = parse_real(g[2]);
        } else {
            throw Error(ErrorKind::Parse, "spacetime file: bad generator stanza");
        }
        ++li;
        require(li + 1 < lines.size() && lines[li][0] == "extent" &&
                    lines[li + 1][0] == "resolution",
                ErrorKind::Parse, "spacetime file: generator needs extent and resolution");
        const auto& ext = lines[li];
        const auto& res = lines[li + 1];
        require(ext.size() % 2 == 1 && ext.size() >= 5, ErrorKind::Parse,
                "spacetime file: extent needs lo/hi pairs");
        int dim = static_cast<int>((ext.size() - 1) / 2);
        require(static_cast<int>(res.size()) == dim + 1, ErrorKind::Parse,
                "spacetime file: resolution arity mismatch");
        std::vector<double> lo(static_cast<size_t>(dim)), hi(static_cast<size_t>(dim));
        std::vector<int> r(static_cast<size_t>(dim));
        for (int a = 0; a < dim; ++a) {
            lo[static_cast<size_t>(a)] = parse_real(ext[static_cast<size_t>(1 + 2 * a)]);
            hi[static_cast<size_t>(a)] = parse_real(ext[static_cast<size_t>(2 + 2 * a)]);
            r[static_cast<size_t>(a)] = parse_int(res[static_cast<size_t>(1 + a)]);
        }
        if (family == NormFamily::Minkowski) return generate_minkowski_grid(dim, lo, hi, r);
        return generate_hyperbolic_lp_grid(p, dim, lo, hi, r);
    }

    require(li < lines.size() && lines[li][0] == "n" && lines[li].size() == 2, ErrorKind::Parse,
            "spacetime file: expected 'n <count>'");
    int n = parse_int(lines[li][1]);
    require(n >= 1, ErrorKind::Parse, "spacetime file: n must be positive");
    ++li;

    std::optional<std::vector<Vec>> coords;
    if (li < lines.size() && lines[li][0] == "dim") {
        require(lines[li].size() == 2, ErrorKind::Parse, "spacetime file: bad dim line");
        int d = parse_int(lines[li][1]);
        ++li;
        require(li < lines.size() && lines[li][0] == "coords", ErrorKind::Parse,
                "spacetime file: dim requires a coords block");
        ++li;
        std::vector<Vec> cs;
        for (int i = 0; i < n; ++i, ++li) {
            require(li < lines.size() && static_cast<int>(lines[li].size()) == d,
                    ErrorKind::Parse, "spacetime file: coords row arity mismatch");
            Vec row(static_cast<size_t>(d));
            for (int a = 0; a < d; ++a) row[static_cast<size_t>(a)] = parse_real(lines[li][static_cast<size_t>(a)]);
            cs.push_back(std::move(row));
        }
        coords = std::move(cs);
    }

    require(li < lines.size() && lines[li][0] == "weights", ErrorKind::Parse,
            "spacetime file: expected weights block");
    std::vector<double> weights;
    if (lines[li].size() > 1) {
        for (size_t t = 1; t < lines[li].size(); ++t) weights.push_back(parse_real(lines[li][t]));
        ++li;
        while (static_cast<int>(weights.size()) < n && li < lines.size() &&
               lines[li][0] != "ell") {
            for (const auto& t : lines[li]) weights.push_back(parse_real(t));
            ++li;
        }
    } else {
        ++li;
        while (static_cast<int>(weights.size()) < n && li < lines.size() &&
               lines[li][0] != "ell") {
            for (const auto& t : lines[li]) weights.push_back(parse_real(t));
            ++li;
        }
    }
    require(static_cast<int>(weights.size()) == n, ErrorKind::Parse,
            "spacetime file: weight count mismatch");

    require(li < lines.size() && lines[li][0] == "ell", ErrorKind::Parse,
            "spacetime file: expected ell block");
    ++li;
    std::vector<ExtendedTime> ell(static_cast<size_t>(n) * n, ExtendedTime::neg_inf());
    for (int i = 0; i < n; ++i) ell[static_cast<size_t>(i) * n + i] = ExtendedTime(0.0);
    bool closed = false;
    for (; li < lines.size(); ++li) {
        if (lines[li][0] == "end") {
            closed = true;
            ++li;
            break;
        }
        require(lines[li].size() == 3, ErrorKind::Parse, "spacetime file: ell entries are triples");
        int i = parse_int(lines[li][0]);
        int j = parse_int(lines[li][1]);
        require(i >= 0 && i < n && j >= 0 && j < n, ErrorKind::Parse,
                "spacetime file: ell index out of range");
        ExtendedTime v;
        if (lines[li][2] == "-inf") v = ExtendedTime::neg_inf();
        else if (lines[li][2] == "inf" || lines[li][2] == "+inf") v = ExtendedTime::pos_inf();
        else v = ExtendedTime(parse_real(lines[li][2]));
        ell[static_cast<size_t>(i) * n + j] = v;
    }
    require(closed, ErrorKind::Parse, "spacetime file: ell block missing 'end'");
    return DiscreteSpacetime::from_matrix(std::move(ell), std::move(weights), std::move(coords));
}

DiscreteSpacetime read_spacetime_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Parse, "cannot open spacetime file: " + path);
    return read_spacetime(in);
}

void write_spacetime(std::ostream& out, const DiscreteSpacetime& st) {
    out << "spacetime v1\n";
    if (st.is_generated() && st.grid()) {
        const GridInfo& g = *st.grid();
        out << "generator "
            << (st.family() == NormFamily::Minkowski
                    ? std::string("minkowski")
                    : "hyperbolic_lp " + format_double(st.lp_exponent()))
            << "\n";
        out << "extent";
        for (int a = 0; a < g.dim; ++a)
            out << " " << format_double(g.lo[static_cast<size_t>(a)]) << " "
                << format_double(g.hi[static_cast<size_t>(a)]);
        out << "\nresolution";
        for (int a = 0; a < g.dim; ++a) out << " " << g.resolution[static_cast<size_t>(a)];
        out << "\n";
        return;
    }
    const int n = st.n_points();
    out << "n " << n << "\n";
    if (st.has_coords()) {
        out << "dim " << st.coord_dim() << "\ncoords\n";
        for (int i = 0; i < n; ++i) {
            const Vec& c = st.coord(i);
            for (size_t a = 0; a < c.size(); ++a) out << (a ? " " : "") << format_double(c[a]);
            out << "\n";
        }
    }
    out << "weights";
    for (int i = 0; i < n; ++i) out << " " << format_double(st.weight(i));
    out << "\nell\n";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            ExtendedTime v = st.ell(i, j);
            bool is_default = (i == j) ? (v.is_finite() && v.value() == 0.0) : v.is_neg_inf();
            if (is_default) continue;
            out << i << " " << j << " ";
            if (v.is_neg_inf()) out << "-inf";
            else if (v.is_pos_inf()) out << "inf";
            else out << format_double(v.value());
            out << "\n";
        }
    out << "end\n";
}

std::string spacetime_to_string(const DiscreteSpacetime& st) {
    std::ostringstream oss;
    write_spacetime(oss, st);
    return oss.str();
}

DiscreteMeasure read_measure(std::istream& in, int n_points) {
    auto lines = read_lines(in);
    std::vector<double> w(static_cast<size_t>(n_points), 0.0);
    for (const auto& toks : lines) {
        require(toks.size() == 2, ErrorKind::Parse, "measure file: lines are 'index weight'");
        int i = parse_int(toks[0]);
        require(i >= 0 && i < n_points, ErrorKind::Parse, "measure file: index out of range");
        w[static_cast<size_t>(i)] += parse_real(toks[1]);
    }
    return DiscreteMeasure::from_weights(std::move(w), 1e-9);
}

DiscreteMeasure read_measure_file(const std::string& path, int n_points) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Parse, "cannot open measure file: " + path);
    return read_measure(in, n_points);
}

void write_measure(std::ostream& out, const DiscreteMeasure& mu) {
    for (int i : mu.support)
        out << i << " " << format_double(mu.weights[static_cast<size_t>(i)]) << "\n";
}

PathData read_path(std::istream& in) {
    auto lines = read_lines(in);
    require(!lines.empty(), ErrorKind::Parse, "path file: empty");
    PathData pd;
    pd.continuum = lines[0].size() > 2;
    for (const auto& toks : lines) {
        require(toks.size() >= 2, ErrorKind::Parse, "path file: lines are 't point' or 't x...'");
        pd.times.push_back(parse_real(toks[0]));
        if (pd.continuum) {
            Vec c;
            for (size_t i = 1; i < toks.size(); ++i) c.push_back(parse_real(toks[i]));
            pd.coords.push_back(std::move(c));
        } else {
            pd.points.push_back(parse_int(toks[1]));
        }
    }
    return pd;
}

PathData read_path_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Parse, "cannot open path file: " + path);
    return read_path(in);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) *out_ << (i ? "," : "") << names[i];
    *out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (size_t i = 0; i < values.size(); ++i) *out_ << (i ? "," : "") << format_double(values[i]);
    *out_ << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) *out_ << (i ? "," : "") << cells[i];
    *out_ << "\n";
}

std::string CsvWriter::format(double v) { return format_double(v); }

}  // namespace lorentz
