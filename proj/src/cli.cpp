#include "lorentz/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "lorentz/calculus.hpp"
#include "lorentz/curvature.hpp"
#include "lorentz/curves.hpp"
#include "lorentz/io.hpp"
#include "lorentz/spacetime.hpp"
#include "lorentz/transport.hpp"

namespace lorentz::cli {

namespace fs = std::filesystem;

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    auto sit = sections.find(section);
    if (sit == sections.end()) return fallback;
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? fallback : kit->second;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    return sit != sections.end() && sit->second.count(key) > 0;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

double to_real(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        require(pos == s.size(), ErrorKind::Parse, "bad number for " + what + ": " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorKind::Parse, "bad number for " + what + ": " + s);
    }
}

int to_int(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        require(pos == s.size(), ErrorKind::Parse, "bad integer for " + what + ": " + s);
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        throw Error(ErrorKind::Parse, "bad integer for " + what + ": " + s);
    }
}

std::vector<double> to_reals(const std::string& s, const std::string& what) {
    std::istringstream iss(s);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok) out.push_back(to_real(tok, what));
    return out;
}

std::vector<int> to_ints(const std::string& s, const std::string& what) {
    std::istringstream iss(s);
    std::vector<int> out;
    std::string tok;
    while (iss >> tok) out.push_back(to_int(tok, what));
    return out;
}

// Summary emission: deterministic key,value rows.
class Summary {
public:
    Summary(const RunConfig& cfg) : cfg_(cfg) {
        add("command", cfg.command);
        add("seed", std::to_string(cfg.seed));
        if (cfg.tol) add("tol_override", format_double(*cfg.tol));
    }
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, format_double(value)); }
    void add_flag(const std::string& key, bool pass) {
        add(key, pass ? std::string("pass") : std::string("fail"));
        all_pass_ = all_pass_ && pass;
    }
    bool all_pass() const { return all_pass_; }
    void write() const {
        fs::create_directories(cfg_.out_dir);
        std::ofstream out(fs::path(cfg_.out_dir) / "summary.csv", std::ios::binary);
        CsvWriter csv(out);
        csv.header({"key", "value"});
        for (const auto& [k, v] : rows_) csv.row_mixed({k, v});
        csv.row_mixed({"all_checks", all_pass_ ? "pass" : "fail"});
    }
    void print(std::ostream& os) const {
        for (const auto& [k, v] : rows_) os << k << " = " << v << "\n";
    }

private:
    const RunConfig& cfg_;
    std::vector<std::pair<std::string, std::string>> rows_;
    bool all_pass_ = true;
};

std::ofstream open_csv(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    std::ofstream out(fs::path(cfg.out_dir) / name, std::ios::binary);
    require(out.good(), ErrorKind::Parse, "cannot open output file " + name);
    return out;
}

DiscreteSpacetime load_spacetime(const RunConfig& cfg) {
    if (cfg.has("spacetime", "file")) return read_spacetime_file(cfg.get("spacetime", "file"));
    std::string family = cfg.get("spacetime", "family");
    require(!family.empty(), ErrorKind::Parse,
            "config needs [spacetime] file = ... or a generator (family/extent/resolution)");
    std::vector<double> extent = to_reals(cfg.get("spacetime", "extent"), "extent");
    std::vector<int> res = to_ints(cfg.get("spacetime", "resolution"), "resolution");
    require(extent.size() == 2 * res.size() && !res.empty(), ErrorKind::Parse,
            "generator stanza: extent must list lo/hi per resolution entry");
    int dim = static_cast<int>(res.size());
    std::vector<double> lo(static_cast<size_t>(dim)), hi(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        lo[static_cast<size_t>(a)] = extent[static_cast<size_t>(2 * a)];
        hi[static_cast<size_t>(a)] = extent[static_cast<size_t>(2 * a + 1)];
    }
    if (family == "minkowski") return generate_minkowski_grid(dim, lo, hi, res);
    if (family == "hyperbolic_lp")
        return generate_hyperbolic_lp_grid(to_real(cfg.get("spacetime", "p", "2"), "p"), dim, lo,
                                           hi, res);
    throw Error(ErrorKind::Parse, "unknown generator family: " + family);
}

DiscreteMeasure load_measure(const RunConfig& cfg, const DiscreteSpacetime& st,
                             const std::string& key) {
    std::string spec = cfg.get("measure", key);
    require(!spec.empty(), ErrorKind::Parse, "config needs [measure] " + key + " = ...");
    std::istringstream iss(spec);
    std::string head;
    iss >> head;
    if (head == "dirac") {
        std::string idx;
        iss >> idx;
        return DiscreteMeasure::dirac(st.n_points(), to_int(idx, key));
    }
    if (head == "uniform") {
        std::vector<int> pts;
        std::string tok;
        while (iss >> tok) pts.push_back(to_int(tok, key));
        return DiscreteMeasure::uniform_on(st.n_points(), pts, st.weights());
    }
    if (head == "uniform-diamond") {
        // uniform (w.r.t. the reference weights) on the causal diamond
        // spanned by two continuum points a, b of the generated model
        require(st.is_generated() && st.has_coords(), ErrorKind::Precondition,
                "uniform-diamond measures need a generated model spacetime");
        int d = st.coord_dim();
        std::vector<double> pts;
        std::string tok;
        while (iss >> tok) pts.push_back(to_real(tok, key));
        require(static_cast<int>(pts.size()) == 2 * d, ErrorKind::Parse,
                "uniform-diamond needs the two corner points");
        Vec a(pts.begin(), pts.begin() + d), b(pts.begin() + d, pts.end());
        std::vector<int> cells;
        for (int i = 0; i < st.n_points(); ++i) {
            if (st.norm().eval(vsub(st.coord(i), a)).is_neg_inf()) continue;
            if (st.norm().eval(vsub(b, st.coord(i))).is_neg_inf()) continue;
            cells.push_back(i);
        }
        return DiscreteMeasure::uniform_on(st.n_points(), cells, st.weights());
    }
    return read_measure_file(spec, st.n_points());
}

PointFunction load_function(const RunConfig& cfg, const DiscreteSpacetime& st,
                            const std::string& key = "f") {
    std::string spec = cfg.get("function", key);
    require(!spec.empty(), ErrorKind::Parse, "config needs [function] " + key + " = ...");
    std::istringstream iss(spec);
    std::string head;
    iss >> head;
    const int n = st.n_points();
    PointFunction f(static_cast<size_t>(n));
    if (head == "time") {
        require(st.has_coords(), ErrorKind::Precondition, "function time needs coordinates");
        for (int i = 0; i < n; ++i) f[static_cast<size_t>(i)] = ExtendedTime(st.coord(i)[0]);
        return f;
    }
    if (head == "dist-from") {
        std::string idx;
        iss >> idx;
        int o = to_int(idx, key);
        for (int i = 0; i < n; ++i) {
            ExtendedTime l = st.ell(o, i);
            f[static_cast<size_t>(i)] =
                l.is_finite() && l.value() > 0.0 ? l : ExtendedTime(0.0);  // ell(o,.)_+
        }
        return f;
    }
    if (head == "neg-dist-to") {
        std::string idx;
        iss >> idx;
        int o = to_int(idx, key);
        for (int i = 0; i < n; ++i) {
            ExtendedTime l = st.ell(i, o);
            f[static_cast<size_t>(i)] =
                l.is_neg_inf() ? ExtendedTime::pos_inf() : ExtendedTime(-l.value());
        }
        return f;
    }
    if (head == "power-to") {
        std::string idx, qs;
        iss >> idx >> qs;
        int o = to_int(idx, key);
        double q = to_real(qs, "q");
        for (int i = 0; i < n; ++i) {
            ExtendedTime l = st.ell(i, o);
            f[static_cast<size_t>(i)] = (l.is_finite() && l.value() > 0.0)
                                            ? ExtendedTime(-std::pow(l.value(), q) / q)
                                            : ExtendedTime::pos_inf();
        }
        return f;
    }
    // a file of "index value|inf|-inf" lines; unlisted points default to +inf
    std::ifstream in(head);
    require(in.good(), ErrorKind::Parse, "cannot open function file " + head);
    std::fill(f.begin(), f.end(), ExtendedTime::pos_inf());
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string is, vs;
        ls >> is >> vs;
        int i = to_int(is, "function index");
        require(i >= 0 && i < n, ErrorKind::Parse, "function index out of range");
        if (vs == "inf" || vs == "+inf") f[static_cast<size_t>(i)] = ExtendedTime::pos_inf();
        else if (vs == "-inf") f[static_cast<size_t>(i)] = ExtendedTime::neg_inf();
        else f[static_cast<size_t>(i)] = ExtendedTime(to_real(vs, "function value"));
    }
    return f;
}

std::string et_str(ExtendedTime v) {
    if (v.is_neg_inf()) return "-inf";
    if (v.is_pos_inf()) return "inf";
    return format_double(v.value());
}

// ---------------------------------------------------------------------------
// subcommand drivers
// ---------------------------------------------------------------------------

int cmd_validate(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    ValidateOptions opts;
    if (cfg.tol) opts.tol = *cfg.tol;
    opts.seed = cfg.seed;
    ValidationReport rep = validate(st, opts);
    std::ofstream out = open_csv(cfg, "validate.csv");
    CsvWriter csv(out);
    csv.header({"kind", "x", "y", "z", "lhs", "rhs"});
    for (const auto& v : rep.reverse_triangle)
        csv.row_mixed({"reverse_triangle", std::to_string(v.x), std::to_string(v.y),
                       std::to_string(v.z), et_str(v.lhs), et_str(v.rhs)});
    for (int x : rep.negative_diagonal)
        csv.row_mixed({"negative_diagonal", std::to_string(x), "", "", "", ""});
    for (const auto& v : rep.antisymmetry)
        csv.row_mixed({"antisymmetry", std::to_string(v.x), std::to_string(v.y), "",
                       et_str(v.forward), et_str(v.backward)});
    summary.add("tol", opts.tol);
    summary.add("n_points", static_cast<double>(st.n_points()));
    summary.add("triples_checked", static_cast<double>(rep.triples_checked));
    summary.add("exhaustive", rep.exhaustive ? "true" : "false");
    summary.add_flag("axioms", rep.ok());
    if (!rep.ok() && !rep.reverse_triangle.empty()) {
        const auto& w = rep.reverse_triangle.front();
        summary.add("witness_triple", std::to_string(w.x) + " " + std::to_string(w.y) + " " +
                                          std::to_string(w.z));
    }
    return rep.ok() ? 0 : 3;
}

int cmd_lq(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu = load_measure(cfg, st, "mu");
    DiscreteMeasure nu = load_measure(cfg, st, "nu");
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    LqResult res = lq_distance(st, mu, nu, q);
    std::ofstream out = open_csv(cfg, "lq.csv");
    CsvWriter csv(out);
    csv.header({"q", "value", "integral", "degenerate", "feasible", "marginal_residual",
                "optimality_residual"});
    csv.row_mixed({format_double(q), et_str(res.value), et_str(res.integral),
                   res.degenerate ? "1" : "0", res.feasible ? "1" : "0",
                   format_double(res.feasible ? res.coupling.marginal_residual(mu, nu) : 0.0),
                   format_double(res.optimality_residual)});
    if (res.feasible) {
        std::ofstream cf = open_csv(cfg, "coupling.csv");
        CsvWriter ccsv(cf);
        ccsv.header({"x", "y", "mass"});
        for (size_t r = 0; r < res.coupling.rows.size(); ++r)
            for (size_t c = 0; c < res.coupling.cols.size(); ++c) {
                double mass = res.coupling.at(static_cast<int>(r), static_cast<int>(c));
                if (mass > 0.0)
                    ccsv.row_mixed({std::to_string(res.coupling.rows[r]),
                                    std::to_string(res.coupling.cols[c]), format_double(mass)});
            }
    }
    summary.add("value", et_str(res.value));
    summary.add("optimality_tol", 1e-9);
    summary.add_flag("optimality_residual", res.optimality_residual <= 1e-9);
    return summary.all_pass() ? 0 : 3;
}

int cmd_interpolate(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu = load_measure(cfg, st, "mu");
    DiscreteMeasure nu = load_measure(cfg, st, "nu");
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    std::vector<double> ts = to_reals(cfg.get("params", "t_grid", "0.5"), "t_grid");
    std::ofstream out = open_csv(cfg, "interpolate.csv");
    CsvWriter csv(out);
    csv.header({"t", "leg1_defect", "leg2_defect", "max_point_residual", "ok"});
    IntermediateOptions iopts;
    if (cfg.tol) {
        iopts.point_tol = *cfg.tol;
        iopts.leg_tol = *cfg.tol;
    }
    double h = st.grid() ? st.grid()->max_step() : 0.0;
    summary.add("point_tol", iopts.point_tol >= 0 ? iopts.point_tol
                                                  : (st.grid() ? 4.0 * h : 1e-9));
    summary.add("leg_tol", iopts.leg_tol >= 0 ? iopts.leg_tol : std::max(1e-9, 5.0 * h));
    bool all_ok = true;
    for (double t : ts) {
        IntermediateResult r = intermediate_measure(st, mu, nu, t, q, iopts);
        csv.row_mixed({format_double(t), format_double(r.leg1_defect),
                       format_double(r.leg2_defect), format_double(r.max_point_residual),
                       r.ok ? "1" : "0"});
        std::ostringstream name;
        name << "xi_t" << format_double(t) << ".measure";
        std::ofstream mf = open_csv(cfg, name.str());
        write_measure(mf, r.xi);
        all_ok = all_ok && r.ok;
    }
    summary.add_flag("interpolation_legs", all_ok);
    return all_ok ? 0 : 3;
}

int cmd_lift(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    // slices listed as t:file pairs in [measure] slices = t0:file0 t1:file1 ...
    std::string slices = cfg.get("measure", "slices");
    require(!slices.empty(), ErrorKind::Parse, "lift needs [measure] slices = t:file ...");
    std::vector<std::pair<double, DiscreteMeasure>> interp;
    std::istringstream iss(slices);
    std::string tok;
    while (iss >> tok) {
        size_t colon = tok.find(':');
        require(colon != std::string::npos, ErrorKind::Parse, "slices entries are t:file");
        double t = to_real(tok.substr(0, colon), "slice time");
        interp.emplace_back(t, read_measure_file(tok.substr(colon + 1), st.n_points()));
    }
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    LiftResult lr = lift_to_plan(st, interp, q);
    std::ofstream out = open_csv(cfg, "lift.csv");
    CsvWriter csv(out);
    csv.header({"weight", "path"});
    for (size_t p = 0; p < lr.plan.paths.size(); ++p) {
        std::ostringstream path;
        for (size_t k = 0; k < lr.plan.paths[p].size(); ++k)
            path << (k ? "|" : "") << lr.plan.paths[p][k];
        csv.row_mixed({format_double(lr.plan.weights[p]), path.str()});
    }
    summary.add("slice_tol", 1e-9);
    summary.add("atoms", static_cast<double>(lr.plan.paths.size()));
    summary.add("slice_residual", lr.slice_residual);
    summary.add("plan_action_sum", lr.plan_action_sum);
    summary.add("dyadic_action_sum", lr.dyadic_action_sum);
    summary.add_flag("slices_reproduced", lr.slice_residual <= 1e-9);
    return summary.all_pass() ? 0 : 3;
}

int cmd_duality(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu = load_measure(cfg, st, "mu");
    DiscreteMeasure nu = load_measure(cfg, st, "nu");
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    KantorovichPotential f{load_function(cfg, st), q};
    DualityGapResult r = duality_gap(st, mu, nu, f);
    std::ofstream out = open_csv(cfg, "duality.csv");
    CsvWriter csv(out);
    csv.header({"defined", "primal", "dual", "gap"});
    csv.row_mixed({r.defined ? "1" : "0", format_double(r.primal), format_double(r.dual),
                   format_double(r.gap)});
    double tol = cfg.tol.value_or(1e-9);
    summary.add("gap", r.gap);
    summary.add("tol", tol);
    summary.add_flag("weak_duality", r.defined && r.gap <= tol);
    summary.add("strong_potential", r.defined && std::fabs(r.gap) <= tol ? "true" : "false");
    return summary.all_pass() ? 0 : 3;
}

int cmd_good_geodesic(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu0 = load_measure(cfg, st, "mu");
    int target = to_int(cfg.get("measure", "target"), "target");
    double K = to_real(cfg.get("params", "K", "0"), "K");
    double N = to_real(cfg.get("params", "N", "2"), "N");
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    double lambda = to_real(cfg.get("params", "lambda", "0.5"), "lambda");
    int depth = to_int(cfg.get("params", "depth", "1"), "depth");
    GoodGeodesicOptions opts;
    if (cfg.tol) opts.tol = *cfg.tol;
    summary.add("tol", opts.tol);
    GoodGeodesicReport rep = good_geodesic(st, mu0, target, K, N, q, lambda, depth, opts);
    std::ofstream out = open_csv(cfg, "good_geodesic.csv");
    CsvWriter csv(out);
    csv.header({"t", "s_n_lhs", "rhs", "defect", "max_density", "density_bound", "moves"});
    for (const auto& s : rep.steps) {
        double lhs = renyi_entropy(st, s.nu, N).value;
        csv.row({s.t, lhs, lhs + s.entropy_defect, s.entropy_defect, s.max_density,
                 s.density_bound, static_cast<double>(s.redistribution_moves)});
        std::ostringstream name;
        name << "nu_t" << format_double(s.t) << ".measure";
        std::ofstream mf = open_csv(cfg, name.str());
        write_measure(mf, s.nu);
    }
    summary.add("ell_q_total", rep.ell_q_total);
    summary.add("worst_geodesy_defect", rep.worst_geodesy_defect);
    summary.add_flag("density_bound", rep.density_ok);
    summary.add_flag("entropy_bound", rep.entropy_ok);
    summary.add_flag("geodesy", rep.geodesy_ok);
    if (rep.failed_cell >= 0) summary.add("failed_cell", static_cast<double>(rep.failed_cell));
    return rep.ok ? 0 : 3;
}

int cmd_tmcp(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu0 = load_measure(cfg, st, "mu");
    int target = to_int(cfg.get("measure", "target"), "target");
    double K = to_real(cfg.get("params", "K", "0"), "K");
    double N = to_real(cfg.get("params", "N", "2"), "N");
    std::vector<double> ts = to_reals(cfg.get("params", "t_grid", "0 0.25 0.5 0.75"), "t_grid");
    std::string dir = cfg.get("params", "direction", "future");
    TimeDirection direction = dir == "past" ? TimeDirection::Past : TimeDirection::Future;
    std::vector<std::pair<double, DiscreteMeasure>> interp;
    for (double t : ts)
        interp.emplace_back(t, direction == TimeDirection::Future
                                   ? dirac_interpolant(st, mu0, target, t).measure
                                   : dirac_interpolant(st, mu0, target, 1.0 - t).measure);
    TmcpOptions opts;
    if (cfg.has("params", "N_range"))
        opts.N_range = to_reals(cfg.get("params", "N_range"), "N_range");
    opts.tol = cfg.tol.value_or(8.0 * (st.grid() ? st.grid()->max_step() : 1e-9));
    opts.reduced = cfg.get("params", "reduced", "0") == "1";
    TmcpReport rep = tmcp_check(st, interp, target, K, N, direction, opts);
    std::ofstream out = open_csv(cfg, "tmcp.csv");
    CsvWriter csv(out);
    csv.header({"t", "n_prime", "s_n_lhs", "rhs", "defect"});
    for (const auto& e : rep.entries) csv.row({e.t, e.Nprime, e.lhs, e.rhs, e.defect});
    summary.add("tol", opts.tol);
    summary.add("worst_defect", rep.worst_defect);
    summary.add_flag("entropy_inequality", rep.pass);
    return rep.pass ? 0 : 3;
}

int cmd_curve_speed(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    PathData pd = read_path_file(cfg.get("path", "file"));
    std::unique_ptr<CausalCurve> curve;
    if (pd.continuum) {
        require(st.is_generated(), ErrorKind::Precondition,
                "continuum paths need a generated model spacetime");
        auto coords = pd.coords;
        auto times = pd.times;
        curve = std::make_unique<AnalyticCurve>(
            st.norm(),
            [coords, times](double t) {
                // piecewise-linear interpolation of the listed samples
                auto it = std::upper_bound(times.begin(), times.end(), t);
                size_t j = std::min(times.size() - 1,
                                    static_cast<size_t>(std::max<long>(1, it - times.begin())));
                size_t i = j - 1;
                double w = (t - times[i]) / (times[j] - times[i]);
                Vec x(coords[i].size());
                for (size_t a = 0; a < x.size(); ++a)
                    x[a] = (1 - w) * coords[i][a] + w * coords[j][a];
                return x;
            },
            static_cast<int>(times.size()) - 1);
    } else {
        curve = std::make_unique<SampledCausalPath>(st, pd.times, pd.points);
    }
    SpeedOptions sopts;
    SpeedProfile prof = causal_speed(*curve, sopts);
    std::ofstream out = open_csv(cfg, "curve_speed.csv");
    CsvWriter csv(out);
    csv.header({"t_lo", "t_hi", "density", "singular_at_t_hi", "cumulative"});
    double cum = 0.0;
    for (size_t i = 0; i + 1 < prof.interval_times.size(); ++i) {
        cum += prof.abs_density[i] * (prof.interval_times[i + 1] - prof.interval_times[i]) +
               prof.singular_mass[i + 1];
        csv.row({prof.interval_times[i], prof.interval_times[i + 1], prof.abs_density[i],
                 prof.singular_mass[i + 1], cum});
    }
    std::ofstream conv = open_csv(cfg, "curve_speed_convergence.csv");
    CsvWriter ccsv(conv);
    ccsv.header({"h", "mu_h_total"});
    for (auto [h, total] : prof.convergence) ccsv.row({h, total});
    summary.add("total", et_str(prof.total));
    summary.add("infinite_region", prof.has_infinite_region ? "true" : "false");
    if (cfg.has("params", "q")) {
        double q = to_real(cfg.get("params", "q"), "q");
        int depth = to_int(cfg.get("params", "depth", "12"), "depth");
        ActionResult aq = q_action(*curve, q, ActionMode::PartitionInfimum, depth);
        summary.add("q_action", et_str(aq.value));
    }
    return 0;
}

int cmd_slopes(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    PointFunction f = load_function(cfg, st);
    require(causality_check(st, f).empty(), ErrorKind::Precondition,
            "slopes: the function must be causal");
    SlopeOptions opts;
    if (cfg.has("params", "k_schedule"))
        opts.k_schedule = to_ints(cfg.get("params", "k_schedule"), "k_schedule");
    SlopeField sf = slopes(st, f, opts);
    std::ofstream out = open_csv(cfg, "slopes.csv");
    CsvWriter csv(out);
    csv.header({"point", "k", "forward", "backward", "steepness"});
    for (int i = 0; i < st.n_points(); ++i)
        for (size_t ki = 0; ki < sf.k_schedule.size(); ++ki)
            csv.row_mixed({std::to_string(i), std::to_string(sf.k_schedule[ki]),
                           et_str(sf.fwd[ki][static_cast<size_t>(i)]),
                           et_str(sf.bwd[ki][static_cast<size_t>(i)]),
                           et_str(sf.st[ki][static_cast<size_t>(i)])});
    summary.add("points", static_cast<double>(st.n_points()));
    return 0;
}

int cmd_mcshane(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    std::vector<int> W = to_ints(cfg.get("function", "points"), "W points");
    std::vector<double> vals = to_reals(cfg.get("function", "values"), "W values");
    require(W.size() == vals.size(), ErrorKind::Parse, "mcshane: points/values mismatch");
    PointFunction fw;
    for (double v : vals) fw.push_back(ExtendedTime(v));
    double L = to_real(cfg.get("params", "L", "1"), "L");
    ExtensionMode mode =
        cfg.get("params", "mode", "lower") == "upper" ? ExtensionMode::Upper : ExtensionMode::Lower;
    PointFunction ext = mcshane_extend(st, W, fw, L, mode);
    std::ofstream out = open_csv(cfg, "mcshane.csv");
    CsvWriter csv(out);
    csv.header({"point", "value"});
    for (int i = 0; i < st.n_points(); ++i)
        csv.row_mixed({std::to_string(i), et_str(ext[static_cast<size_t>(i)])});
    std::vector<int> all(static_cast<size_t>(st.n_points()));
    for (int i = 0; i < st.n_points(); ++i) all[static_cast<size_t>(i)] = i;
    summary.add_flag("steepness_of_extension", steepness_check(st, ext, L, all).empty());
    return summary.all_pass() ? 0 : 3;
}

int cmd_null_dist(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    PointFunction f = load_function(cfg, st);
    std::ofstream out = open_csv(cfg, "null_dist.csv");
    CsvWriter csv(out);
    csv.header({"x", "y", "distance"});
    if (cfg.has("params", "x")) {
        int x = to_int(cfg.get("params", "x"), "x");
        int y = to_int(cfg.get("params", "y"), "y");
        double d = null_distance(st, f, x, y);
        csv.row_mixed({std::to_string(x), std::to_string(y), format_double(d)});
        summary.add("distance", d);
    } else {
        auto dm = null_distance_all(st, f);
        for (int x = 0; x < st.n_points(); ++x)
            for (int y = 0; y < st.n_points(); ++y)
                csv.row_mixed({std::to_string(x), std::to_string(y),
                               format_double(dm[static_cast<size_t>(x)][static_cast<size_t>(y)])});
    }
    return 0;
}

int cmd_dalembert(const RunConfig& cfg, Summary& summary) {
    int dim = to_int(cfg.get("params", "dim", "2"), "dim");
    double p = to_real(cfg.get("params", "p", "0.5"), "p");
    double q = cfg.has("params", "q") ? to_real(cfg.get("params", "q"), "q") : p / (p - 1.0);
    double K = to_real(cfg.get("params", "K", "0"), "K");
    double N = to_real(cfg.get("params", "N", std::to_string(dim)), "N");
    std::string family = cfg.get("spacetime", "family", "minkowski");
    ComparisonForm form = cfg.get("params", "form", "power") == "lorentz"
                              ? ComparisonForm::LorentzDistance
                              : ComparisonForm::PowerPotential;
    TimeDirection direction =
        cfg.get("params", "direction", "future") == "past" ? TimeDirection::Past
                                                           : TimeDirection::Future;
    DalembertOptions opts;
    if (cfg.has("params", "resolutions"))
        opts.resolution_schedule = to_ints(cfg.get("params", "resolutions"), "resolutions");
    Vec origin(static_cast<size_t>(dim), 0.0);
    if (cfg.has("params", "origin")) {
        std::vector<double> o = to_reals(cfg.get("params", "origin"), "origin");
        require(static_cast<int>(o.size()) == dim, ErrorKind::Parse, "origin arity mismatch");
        origin = o;
    }
    // test function family: center/radius/amplitude triples or the default
    std::vector<ModelFunction> bumps;
    if (cfg.has("params", "bumps")) {
        std::vector<double> spec = to_reals(cfg.get("params", "bumps"), "bumps");
        require(spec.size() % (static_cast<size_t>(dim) + 2) == 0, ErrorKind::Parse,
                "bumps entries are center(dim) radius amplitude");
        for (size_t off = 0; off < spec.size(); off += static_cast<size_t>(dim) + 2) {
            Vec c(spec.begin() + static_cast<long>(off),
                  spec.begin() + static_cast<long>(off) + dim);
            bumps.push_back(bump_function(c, spec[off + static_cast<size_t>(dim)],
                                          spec[off + static_cast<size_t>(dim) + 1]));
        }
    } else {
        bumps = default_bump_family(dim, origin, direction, opts.resolution_schedule.front(), 1.0);
    }
    NormFamily nf = family == "hyperbolic_lp" ? NormFamily::HyperbolicLp : NormFamily::Minkowski;
    WeakFormReport rep =
        dalembert_verify(nf, dim, origin, p, q, K, N, form, direction, bumps, opts);
    std::ofstream out = open_csv(cfg, "dalembert.csv");
    CsvWriter csv(out);
    csv.header({"resolution", "lhs", "rhs", "defect"});
    for (const auto& lv : rep.levels)
        csv.row({static_cast<double>(lv.resolution), lv.lhs, lv.rhs, lv.defect});
    summary.add("final_relative_defect", rep.final_relative_defect);
    summary.add("tol_rel", opts.tol_rel);
    summary.add_flag("defect_decreasing", rep.defect_decreasing);
    summary.add_flag("final_defect_small", rep.final_relative_defect <= opts.tol_rel);
    summary.add_flag("inequality", rep.inequality_ok);
    return summary.all_pass() ? 0 : 3;
}

int cmd_brenier(const RunConfig& cfg, Summary& summary) {
    DiscreteSpacetime st = load_spacetime(cfg);
    DiscreteMeasure mu0 = load_measure(cfg, st, "mu");
    int target = to_int(cfg.get("measure", "target"), "target");
    double q = to_real(cfg.get("params", "q", "0.5"), "q");
    BrenierCheckResult res = metric_brenier_check(st, mu0, target, q);
    std::ofstream out = open_csv(cfg, "brenier.csv");
    CsvWriter csv(out);
    csv.header({"analytic_rel_deviation", "grid_rel_deviation", "grid_points"});
    csv.row({res.max_rel_deviation_analytic, res.max_rel_deviation_grid,
             static_cast<double>(res.grid_points_checked)});
    summary.add("analytic_tol", 1e-10);
    summary.add("analytic_rel_deviation", res.max_rel_deviation_analytic);
    summary.add("grid_rel_deviation", res.max_rel_deviation_grid);
    summary.add_flag("analytic_identity", res.max_rel_deviation_analytic <= 1e-10);
    return summary.all_pass() ? 0 : 3;
}

int cmd_norms(const RunConfig& cfg, Summary& summary, std::istream& stdin_stream) {
    std::string family = cfg.get("params", "family", "minkowski");
    // vectors from the [vectors] section (v0 = ..., v1 = ...) or stdin lines
    std::vector<Vec> vectors;
    if (cfg.sections.count("vectors")) {
        for (const auto& [key, val] : cfg.sections.at("vectors"))
            vectors.push_back(to_reals(val, key));
    } else {
        std::string line;
        while (std::getline(stdin_stream, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            vectors.push_back(to_reals(line, "vector"));
        }
    }
    require(!vectors.empty(), ErrorKind::Parse, "norms: no vectors given");
    int dim = cfg.has("params", "dim") ? to_int(cfg.get("params", "dim"), "dim")
                                       : static_cast<int>(vectors.front().size());
    HyperbolicNorm norm = family == "hyperbolic_lp"
                              ? HyperbolicNorm::lp(to_real(cfg.get("params", "p", "2"), "p"), dim)
                              : HyperbolicNorm::minkowski_standard(dim);
    std::ofstream out = open_csv(cfg, "norms.csv");
    CsvWriter csv(out);
    csv.header({"row", "eval", "polarize_with_prev", "parallelogram_defect_with_prev"});
    for (size_t i = 0; i < vectors.size(); ++i) {
        require(static_cast<int>(vectors[i].size()) == dim, ErrorKind::Parse,
                "vector arity mismatch");
        std::string pol = "", def = "";
        ExtendedTime e = norm.eval(vectors[i]);
        if (i > 0 && !e.is_neg_inf() && !norm.eval(vectors[i - 1]).is_neg_inf()) {
            pol = format_double(norm.polarize(vectors[i - 1], vectors[i]));
            def = format_double(norm.parallelogram_defect(vectors[i - 1], vectors[i]));
        }
        csv.row_mixed({std::to_string(i), et_str(e), pol, def});
    }
    summary.add("vectors", static_cast<double>(vectors.size()));
    return 0;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            require(line.back() == ']', ErrorKind::Parse,
                    origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::Parse,
                origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        cfg.sections[section][key] = value;
    }
    if (cfg.sections.count("run")) {
        const auto& run = cfg.sections["run"];
        if (run.count("command")) cfg.command = run.at("command");
        if (run.count("out")) cfg.out_dir = run.at("out");
        if (run.count("seed")) cfg.seed = static_cast<std::uint64_t>(std::stoull(run.at("seed")));
        if (run.count("tol")) cfg.tol = to_real(run.at("tol"), "tol");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::Parse, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

int run(const RunConfig& config) {
    Summary summary(config);
    int code = 0;
    try {
        const std::string& c = config.command;
        if (c == "validate") code = cmd_validate(config, summary);
        else if (c == "lq") code = cmd_lq(config, summary);
        else if (c == "interpolate") code = cmd_interpolate(config, summary);
        else if (c == "lift") code = cmd_lift(config, summary);
        else if (c == "duality") code = cmd_duality(config, summary);
        else if (c == "good-geodesic") code = cmd_good_geodesic(config, summary);
        else if (c == "tmcp-check") code = cmd_tmcp(config, summary);
        else if (c == "curve-speed") code = cmd_curve_speed(config, summary);
        else if (c == "slopes") code = cmd_slopes(config, summary);
        else if (c == "mcshane") code = cmd_mcshane(config, summary);
        else if (c == "null-dist") code = cmd_null_dist(config, summary);
        else if (c == "dalembert") code = cmd_dalembert(config, summary);
        else if (c == "brenier") code = cmd_brenier(config, summary);
        else if (c == "norms") code = cmd_norms(config, summary, std::cin);
        else throw Error(ErrorKind::Parse, "unknown subcommand: " + c);
    } catch (const Error& e) {
        summary.add("error", e.what());
        summary.write();
        if (!config.quiet) std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Parse: return 2;
            case ErrorKind::Numerical: return 4;
            default: return 3;
        }
    }
    summary.write();
    if (!config.quiet) summary.print(std::cout);
    return code;
}

int batch(const std::string& manifest_path, const std::string& out_dir, bool quiet) {
    (void)quiet;
    std::ifstream in(manifest_path);
    require(in.good(), ErrorKind::Parse, "cannot open manifest: " + manifest_path);
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') entries.push_back(line);
    }
    // reject duplicate output directories before executing anything
    std::vector<RunConfig> configs;
    std::set<std::string> outs;
    for (const std::string& path : entries) {
        RunConfig cfg = parse_config_file(path);
        cfg.quiet = true;  // per-entry summaries live in their output dirs
        require(outs.insert(cfg.out_dir).second, ErrorKind::Parse,
                "duplicate output directory across manifest entries: " + cfg.out_dir);
        configs.push_back(std::move(cfg));
    }
    fs::create_directories(out_dir);
    // bounded worker pool; entries are independent and write only into their
    // own output directories, so the fan-out cannot contend
    std::vector<int> codes(configs.size(), 0);
    {
        unsigned workers = std::max(1u, std::min({static_cast<unsigned>(configs.size()),
                                                  std::thread::hardware_concurrency(), 4u}));
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= configs.size()) return;
                    try {
                        codes[i] = run(configs[i]);
                    } catch (const Error& e) {
                        codes[i] = e.kind() == ErrorKind::Parse ? 2 : 3;
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
    }
    std::ofstream agg(fs::path(out_dir) / "batch.csv", std::ios::binary);
    CsvWriter csv(agg);
    csv.header({"entry", "command", "exit_code"});
    int worst = 0;
    for (size_t i = 0; i < configs.size(); ++i) {
        csv.row_mixed({entries[i], configs[i].command, std::to_string(codes[i])});
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace lorentz::cli
