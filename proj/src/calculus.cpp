#include "lorentz/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace lorentz {

std::vector<CausalityViolation> causality_check(const DiscreteSpacetime& st,
                                                const PointFunction& f) {
    const int n = st.n_points();
    require(static_cast<int>(f.size()) == n, ErrorKind::Structural,
            "causality_check: function size mismatch");
    std::vector<CausalityViolation> out;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            if (!(st.ell(x, y) >= ExtendedTime(0.0))) continue;
            if (f[static_cast<size_t>(x)] > f[static_cast<size_t>(y)])
                out.push_back({x, y, f[static_cast<size_t>(x)], f[static_cast<size_t>(y)]});
        }
    return out;
}

namespace {

double closeness(const DiscreteSpacetime& st, int x, int y, ExtendedTime l) {
    if (st.has_coords()) {
        double s = 0.0;
        const Vec& a = st.coord(x);
        const Vec& b = st.coord(y);
        for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    }
    return l.is_finite() ? l.value() : std::numeric_limits<double>::max();
}

ExtendedTime slope_quotient(ExtendedTime df, double l) {
    // (f difference) / ell over a chronological pair
    if (df.is_pos_inf()) return ExtendedTime::pos_inf();
    if (df.is_neg_inf()) return ExtendedTime::neg_inf();
    return ExtendedTime(df.value() / l);
}

}  // namespace

SlopeField slopes(const DiscreteSpacetime& st, const PointFunction& f, const SlopeOptions& opts) {
    const int n = st.n_points();
    require(static_cast<int>(f.size()) == n, ErrorKind::Structural, "slopes: size mismatch");
    SlopeField field;
    field.k_schedule = opts.k_schedule;
    field.fwd.resize(opts.k_schedule.size());
    field.bwd.resize(opts.k_schedule.size());
    field.st.resize(opts.k_schedule.size());
    for (size_t ki = 0; ki < opts.k_schedule.size(); ++ki) {
        field.fwd[ki].assign(static_cast<size_t>(n), ExtendedTime::pos_inf());
        field.bwd[ki].assign(static_cast<size_t>(n), ExtendedTime::pos_inf());
        field.st[ki].assign(static_cast<size_t>(n), ExtendedTime::pos_inf());
    }
    struct Competitor {
        double near;
        int idx;
        ExtendedTime quot;
    };
    for (int x = 0; x < n; ++x) {
        std::vector<Competitor> fut, past;
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            ExtendedTime lf = st.ell(x, y);
            if (lf.is_finite() && lf.value() > 0.0)
                fut.push_back({closeness(st, x, y, lf), y,
                               slope_quotient(f[static_cast<size_t>(y)] - f[static_cast<size_t>(x)],
                                              lf.value())});
            ExtendedTime lb = st.ell(y, x);
            if (lb.is_finite() && lb.value() > 0.0)
                past.push_back({closeness(st, x, y, lb), y,
                                slope_quotient(f[static_cast<size_t>(x)] - f[static_cast<size_t>(y)],
                                               lb.value())});
        }
        auto by_near = [](const Competitor& a, const Competitor& b) {
            return a.near != b.near ? a.near < b.near : a.idx < b.idx;
        };
        std::sort(fut.begin(), fut.end(), by_near);
        std::sort(past.begin(), past.end(), by_near);
        for (size_t ki = 0; ki < opts.k_schedule.size(); ++ki) {
            size_t k = static_cast<size_t>(opts.k_schedule[ki]);
            ExtendedTime best_f = ExtendedTime::pos_inf();
            for (size_t i = 0; i < std::min(k, fut.size()); ++i)
                if (fut[i].quot < best_f) best_f = fut[i].quot;
            ExtendedTime best_b = ExtendedTime::pos_inf();
            for (size_t i = 0; i < std::min(k, past.size()); ++i)
                if (past[i].quot < best_b) best_b = past[i].quot;
            field.fwd[ki][static_cast<size_t>(x)] = best_f;
            field.bwd[ki][static_cast<size_t>(x)] = best_b;
            field.st[ki][static_cast<size_t>(x)] = best_f < best_b ? best_f : best_b;
        }
    }
    return field;
}

namespace {

// L * ell(x,y) for the steepness inequality; unrelated pairs never
// constrain (matching "0-steep iff causal").
ExtendedTime steep_rhs(double L, ExtendedTime l) {
    if (l.is_neg_inf()) return ExtendedTime::neg_inf();
    return L * l;  // 0 * (+inf) = 0 by the scalar convention
}

}  // namespace

std::vector<SteepnessViolation> steepness_check(const DiscreteSpacetime& st,
                                                const PointFunction& f, double L,
                                                const std::vector<int>& region, double tol) {
    require(L >= 0.0, ErrorKind::Parameter, "steepness_check: L must be >= 0");
    std::vector<SteepnessViolation> out;
    for (int x : region)
        for (int y : region) {
            if (x == y) continue;
            ExtendedTime rhs = steep_rhs(L, st.ell(x, y));
            if (rhs.is_neg_inf()) continue;
            ExtendedTime lhs = f[static_cast<size_t>(y)] - f[static_cast<size_t>(x)];
            bool ok;
            if (lhs.is_pos_inf()) ok = true;
            else if (lhs.is_neg_inf()) ok = false;
            else if (rhs.is_pos_inf()) ok = false;
            else ok = lhs.value() >= rhs.value() - tol;
            if (!ok) out.push_back({x, y, lhs, rhs});
        }
    return out;
}

PointFunction mcshane_extend(const DiscreteSpacetime& st, const std::vector<int>& W,
                             const PointFunction& f_on_W, double L, ExtensionMode mode) {
    const int n = st.n_points();
    require(W.size() == f_on_W.size(), ErrorKind::Structural,
            "mcshane_extend: W and value list must match");
    for (int x = 0; x < n; ++x) {
        ExtendedTime d = st.ell(x, x);
        require(d.is_finite() && d.value() == 0.0, ErrorKind::Precondition,
                "mcshane_extend: ell must vanish on the diagonal");
    }
    // L-steepness of the data on W, with witness
    for (size_t i = 0; i < W.size(); ++i)
        for (size_t j = 0; j < W.size(); ++j) {
            if (i == j) continue;
            ExtendedTime rhs = steep_rhs(L, st.ell(W[i], W[j]));
            if (rhs.is_neg_inf()) continue;
            ExtendedTime lhs = f_on_W[j] - f_on_W[i];
            bool ok = lhs.is_pos_inf() ||
                      (!lhs.is_neg_inf() && !rhs.is_pos_inf() && lhs.value() >= rhs.value() - 1e-12);
            require(ok, ErrorKind::Precondition,
                    "mcshane_extend: input is not L-steep on W (witness pair " +
                        std::to_string(W[i]) + "," + std::to_string(W[j]) + ")");
        }
    PointFunction out(static_cast<size_t>(n));
    for (int y = 0; y < n; ++y) {
        if (mode == ExtensionMode::Lower) {
            ExtendedTime best = ExtendedTime::neg_inf();  // sup over the empty set
            for (size_t i = 0; i < W.size(); ++i) {
                ExtendedTime l = st.ell(W[i], y);
                if (l.is_neg_inf()) continue;  // x <= y fails
                if (f_on_W[i].is_neg_inf()) continue;
                ExtendedTime cand = f_on_W[i] + (L * l);
                if (cand > best) best = cand;
            }
            out[static_cast<size_t>(y)] = best;
        } else {
            ExtendedTime best = ExtendedTime::pos_inf();  // inf over the empty set
            for (size_t i = 0; i < W.size(); ++i) {
                ExtendedTime l = st.ell(y, W[i]);
                if (l.is_neg_inf()) continue;  // y <= w fails
                if (f_on_W[i].is_pos_inf()) continue;
                ExtendedTime cand = f_on_W[i] - (L * l);
                if (cand < best) best = cand;
            }
            out[static_cast<size_t>(y)] = best;
        }
    }
    return out;
}

DualityFormulaResult duality_formula_check(const DiscreteSpacetime& st, int x, int y,
                                           const std::vector<PointFunction>& candidates,
                                           double /*tol*/) {
    DualityFormulaResult res;
    res.ell_value = st.ell(x, y);
    res.inf_over_candidates = ExtendedTime::pos_inf();
    for (size_t c = 0; c < candidates.size(); ++c) {
        if (!causality_check(st, candidates[c]).empty()) {
            res.rejected.push_back(static_cast<int>(c));
            continue;
        }
        ExtendedTime diff = candidates[c][static_cast<size_t>(y)] - candidates[c][static_cast<size_t>(x)];
        if (diff < res.inf_over_candidates) {
            res.inf_over_candidates = diff;
            res.argmin = static_cast<int>(c);
        }
    }
    return res;
}

std::vector<std::vector<double>> null_distance_all(const DiscreteSpacetime& st,
                                                   const PointFunction& f) {
    const int n = st.n_points();
    require(static_cast<int>(f.size()) == n, ErrorKind::Structural, "null_distance: size mismatch");
    for (int i = 0; i < n; ++i)
        require(f[static_cast<size_t>(i)].is_finite(), ErrorKind::Precondition,
                "null_distance: f must be real-valued");
    // strict causality: x < y implies f(x) < f(y)
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            if (st.ell(x, y) >= ExtendedTime(0.0))
                require(f[static_cast<size_t>(x)].value() < f[static_cast<size_t>(y)].value(),
                        ErrorKind::Precondition,
                        "null_distance: f is not strictly causal (tie or inversion)");
        }
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y) continue;
            if (st.ell(x, y) >= ExtendedTime(0.0)) {
                double w = std::fabs(f[static_cast<size_t>(y)].value() - f[static_cast<size_t>(x)].value());
                adj[static_cast<size_t>(x)].emplace_back(y, w);
                adj[static_cast<size_t>(y)].emplace_back(x, w);
            }
        }
    const double INF = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dist(static_cast<size_t>(n),
                                          std::vector<double>(static_cast<size_t>(n), INF));
    for (int s = 0; s < n; ++s) {
        auto& d = dist[static_cast<size_t>(s)];
        d[static_cast<size_t>(s)] = 0.0;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [dv, v] = pq.top();
            pq.pop();
            if (dv > d[static_cast<size_t>(v)]) continue;
            for (auto [u, w] : adj[static_cast<size_t>(v)]) {
                if (dv + w < d[static_cast<size_t>(u)]) {
                    d[static_cast<size_t>(u)] = dv + w;
                    pq.push({d[static_cast<size_t>(u)], u});
                }
            }
        }
    }
    return dist;
}

double null_distance(const DiscreteSpacetime& st, const PointFunction& f, int x, int y) {
    require(x >= 0 && x < st.n_points() && y >= 0 && y < st.n_points(), ErrorKind::Precondition,
            "null_distance: index out of range");
    return null_distance_all(st, f)[static_cast<size_t>(x)][static_cast<size_t>(y)];
}

PerturbationReport perturbation_membership(const DiscreteSpacetime& st, const PointFunction& f,
                                           const PointFunction& g,
                                           const std::vector<double>& eps_schedule) {
    PerturbationReport rep;
    auto causal_at = [&](double eps, double sign) {
        PointFunction h(f.size());
        for (size_t i = 0; i < f.size(); ++i) h[i] = f[i] + (sign * eps) * g[i];
        return causality_check(st, h).empty();
    };
    std::vector<double> sched = eps_schedule;
    std::sort(sched.begin(), sched.end());
    std::vector<bool> plus_ok(sched.size()), both_ok(sched.size());
    for (size_t i = 0; i < sched.size(); ++i) {
        bool p = causal_at(sched[i], +1.0);
        bool m = causal_at(sched[i], -1.0);
        plus_ok[i] = p;
        both_ok[i] = p && m;
        if (p) {
            rep.largest_eps = sched[i];
            rep.member = true;
        }
        if (p && m) {
            rep.largest_eps_sym = sched[i];
            rep.symmetric_member = true;
        }
    }
    // star-shapedness: everything below the largest working eps must work
    for (size_t i = 0; i < sched.size(); ++i)
        if (sched[i] < rep.largest_eps && !plus_ok[i]) rep.star_shaped = false;
    return rep;
}

// ---------------------------------------------------------------------------
// Analytic model helpers
// ---------------------------------------------------------------------------

ExtendedTime model_subslope(const HyperbolicNorm& minkowski, const ModelFunction& f, const Vec& x) {
    return minkowski.dual_eval(f.gradient(x));
}

VerticalQuotientResult vertical_quotient(const HyperbolicNorm& minkowski, const ModelFunction& f,
                                         const ModelFunction& g, double p,
                                         std::vector<double> eps_schedule,
                                         const std::vector<Vec>& sample_points) {
    require(p != 0.0 && p < 1.0, ErrorKind::Parameter, "vertical_quotient: p must satisfy 0 != p < 1");
    std::sort(eps_schedule.begin(), eps_schedule.end(), std::greater<>());
    VerticalQuotientResult res;
    res.eps_schedule = eps_schedule;

    auto u_p = [&](ExtendedTime z) -> double {
        if (z.is_pos_inf()) return 0.0;  // u_p has vanishing slope at infinity
        double v = z.value();
        if (v == 0.0 && p < 0.0) return -std::numeric_limits<double>::infinity();
        return std::pow(v, p) / p;
    };

    // causality of f + eps g across the sampled region, per eps
    std::vector<bool> causal(eps_schedule.size(), true);
    for (size_t e = 0; e < eps_schedule.size(); ++e) {
        for (const Vec& x : sample_points) {
            Vec grad = vadd(f.gradient(x), vscale(eps_schedule[e], g.gradient(x)));
            if (minkowski.dual_eval(grad).is_neg_inf()) {
                causal[e] = false;
                break;
            }
        }
    }

    for (const Vec& x : sample_points) {
        VerticalQuotientRow row;
        row.point = x;
        ExtendedTime base = model_subslope(minkowski, f, x);
        require(!base.is_neg_inf(), ErrorKind::Precondition,
                "vertical_quotient: f is not causal at a sample point");
        if (base.is_pos_inf()) {
            // u_p flattens at infinity: the quotient is 0 by convention
            row.quotients.assign(eps_schedule.size(), 0.0);
            row.extrapolated = 0.0;
            row.analytic = 0.0;
            res.rows.push_back(std::move(row));
            continue;
        }
        double u_base = u_p(base);
        for (size_t e = 0; e < eps_schedule.size(); ++e) {
            if (!causal[e]) {
                row.quotients.push_back(-std::numeric_limits<double>::infinity());
                continue;
            }
            Vec grad = vadd(f.gradient(x), vscale(eps_schedule[e], g.gradient(x)));
            double u_eps = u_p(minkowski.dual_eval(grad));
            row.quotients.push_back((u_eps - u_base) / eps_schedule[e]);
        }
        for (size_t e = 0; e + 1 < row.quotients.size(); ++e) {
            // schedule is descending, so quotients must not decrease
            if (row.quotients[e + 1] < row.quotients[e] - 1e-9 * (1.0 + std::fabs(row.quotients[e])))
                row.monotone = false;
        }
        if (!row.monotone) res.all_monotone = false;
        size_t last = row.quotients.size() - 1;
        if (row.quotients.size() >= 2 && std::isfinite(row.quotients[last]) &&
            std::isfinite(row.quotients[last - 1])) {
            double e1 = eps_schedule[last], e2 = eps_schedule[last - 1];
            row.extrapolated = row.quotients[last] +
                               (row.quotients[last] - row.quotients[last - 1]) * e1 / (e2 - e1);
        } else {
            row.extrapolated = row.quotients[last];
        }
        double nf = base.value();
        row.analytic = bilinear(minkowski.dual_metric(), f.gradient(x), g.gradient(x)) *
                       std::pow(nf, p - 2.0);
        res.rows.push_back(std::move(row));
    }
    return res;
}

ModelFunction bump_function(Vec center, double radius, double amplitude) {
    ModelFunction bf;
    bf.value = [center, radius, amplitude](const Vec& x) {
        double s2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double d = (x[i] - center[i]) / radius;
            s2 += d * d;
        }
        if (s2 >= 1.0) return 0.0;
        return amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
    };
    bf.gradient = [center, radius, amplitude](const Vec& x) {
        Vec g(x.size(), 0.0);
        double s2 = 0.0;
        for (size_t i = 0; i < x.size(); ++i) {
            double d = (x[i] - center[i]) / radius;
            s2 += d * d;
        }
        if (s2 >= 1.0) return g;
        double val = amplitude * std::exp(1.0 - 1.0 / (1.0 - s2));
        double fac = -val / ((1.0 - s2) * (1.0 - s2));
        for (size_t i = 0; i < x.size(); ++i) g[i] = fac * 2.0 * (x[i] - center[i]) / (radius * radius);
        return g;
    };
    return bf;
}

namespace {

double minkowski_sep(const Vec& w) {
    double s = w[0] * w[0];
    for (size_t i = 1; i < w.size(); ++i) s -= w[i] * w[i];
    if (w[0] < 0.0 || s < 0.0) return -1.0;
    return std::sqrt(s);
}

}  // namespace

std::vector<ModelFunction> default_bump_family(int dim, const Vec& origin,
                                               TimeDirection direction, int /*coarsest_resolution*/,
                                               double W) {
    double sgn = direction == TimeDirection::Future ? -1.0 : 1.0;
    std::vector<ModelFunction> fam;
    Vec c1 = origin;
    c1[0] += sgn * 1.1 * W;
    fam.push_back(bump_function(c1, 0.30 * W, 1.0));
    Vec c2 = origin;
    c2[0] += sgn * 1.1 * W;
    if (dim >= 2) c2[1] += 0.25 * W;
    fam.push_back(bump_function(c2, 0.25 * W, 0.7));
    return fam;
}

WeakFormReport dalembert_verify(NormFamily family, int dim, const Vec& origin, double p, double q,
                                double K, double N, ComparisonForm form, TimeDirection direction,
                                const std::vector<ModelFunction>& test_functions,
                                const DalembertOptions& opts) {
    require(family == NormFamily::Minkowski, ErrorKind::Precondition,
            "dalembert_verify: hyperbolic lp models rejected (no smooth gradient oracle)");
    require(std::fabs(1.0 / p + 1.0 / q - 1.0) <= 1e-9, ErrorKind::Parameter,
            "dalembert_verify: p and q must be conjugate");
    require(dim >= 2 && static_cast<int>(origin.size()) == dim, ErrorKind::Structural,
            "dalembert_verify: origin dimension mismatch");
    require(!test_functions.empty(), ErrorKind::Precondition,
            "dalembert_verify: empty test function family");
    (void)q;

    const double W = opts.box_halfwidth > 0.0 ? opts.box_halfwidth : 1.0;
    const double sgn = direction == TimeDirection::Future ? -1.0 : 1.0;
    Vec lo(origin.size()), hi(origin.size());
    if (direction == TimeDirection::Future) {
        lo[0] = origin[0] - 1.6 * W;
        hi[0] = origin[0] - 0.5 * W;
    } else {
        lo[0] = origin[0] + 0.5 * W;
        hi[0] = origin[0] + 1.6 * W;
    }
    for (int a = 1; a < dim; ++a) {
        lo[static_cast<size_t>(a)] = origin[static_cast<size_t>(a)] - 0.8 * W;
        hi[static_cast<size_t>(a)] = origin[static_cast<size_t>(a)] + 0.8 * W;
    }

    WeakFormReport rep;
    for (int R : opts.resolution_schedule) {
        std::vector<double> step(static_cast<size_t>(dim));
        double cellvol = 1.0;
        for (int a = 0; a < dim; ++a) {
            step[static_cast<size_t>(a)] =
                (hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)]) / R;
            cellvol *= step[static_cast<size_t>(a)];
        }
        double hmax = *std::max_element(step.begin(), step.end());
        long long cells = 1;
        for (int a = 0; a < dim; ++a) cells *= R;
        double lhs = 0.0, rhs = 0.0;
        for (long long idx = 0; idx < cells; ++idx) {
            long long rem = idx;
            Vec x(static_cast<size_t>(dim));
            for (int a = dim - 1; a >= 0; --a) {
                x[static_cast<size_t>(a)] =
                    lo[static_cast<size_t>(a)] + (rem % R + 0.5) * step[static_cast<size_t>(a)];
                rem /= R;
            }
            // future: w = o - x (toward the tip); past: w = x - o
            Vec w(static_cast<size_t>(dim));
            for (int a = 0; a < dim; ++a)
                w[static_cast<size_t>(a)] =
                    sgn * (x[static_cast<size_t>(a)] - origin[static_cast<size_t>(a)]);
            double r = minkowski_sep(w);
            for (const ModelFunction& phi : test_functions) {
                double pv = phi.value(x);
                if (pv < 0.0) throw Error(ErrorKind::Precondition,
                                          "dalembert_verify: test function must be nonnegative");
                if (pv == 0.0) continue;
                require(r > 2.0 * hmax, ErrorKind::Precondition,
                        "dalembert_verify: test function support leaves the cone margin");
                Vec grad = phi.gradient(x);
                // velocity field grad f |df|^{p-2}: w for the power potential,
                // w / r for the Lorentz distance
                double scale = form == ComparisonForm::PowerPotential ? 1.0 : 1.0 / r;
                double pairing = 0.0;
                for (int a = 0; a < dim; ++a)
                    pairing += grad[static_cast<size_t>(a)] * w[static_cast<size_t>(a)] * scale;
                double tt = tau_tilde(K, N, r);
                double bound = form == ComparisonForm::PowerPotential ? N * tt * pv
                                                                      : (N * tt - 1.0) / r * pv;
                lhs += pairing * cellvol;
                rhs += (direction == TimeDirection::Future ? bound : -bound) * cellvol;
            }
        }
        double defect = direction == TimeDirection::Future ? rhs - lhs : lhs - rhs;
        rep.levels.push_back({R, lhs, rhs, defect});
    }
    rep.defect_decreasing = true;
    for (size_t i = 0; i + 1 < rep.levels.size(); ++i)
        if (std::fabs(rep.levels[i + 1].defect) > std::fabs(rep.levels[i].defect))
            rep.defect_decreasing = false;
    const WeakFormLevel& last = rep.levels.back();
    rep.final_relative_defect = std::fabs(last.defect) / std::max(1e-300, std::fabs(last.rhs));
    // on the sharp model the continuum defect vanishes, so the sign test is
    // meaningful only once quadrature error has settled: gate the finest level
    rep.inequality_ok = last.defect >= -opts.tol_rel * std::fabs(last.rhs);
    return rep;
}

BrenierCheckResult metric_brenier_check(const DiscreteSpacetime& grid_st,
                                        const DiscreteMeasure& mu0, int target, double q,
                                        const SlopeOptions& slope_opts) {
    require(grid_st.is_generated() && grid_st.family() == NormFamily::Minkowski,
            ErrorKind::Precondition, "metric_brenier_check: requires a Minkowski grid");
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter, "metric_brenier_check: invalid q");
    BrenierCheckResult res;
    const int n = grid_st.n_points();
    const int dim = grid_st.coord_dim();

    // analytic route: assemble df^o = r^{q-2} w-flat and compare its dual
    // norm against the exponent identity r^{q-1}
    for (int x : mu0.support) {
        ExtendedTime l = grid_st.ell(x, target);
        require(l.is_finite() && l.value() > 0.0, ErrorKind::Precondition,
                "metric_brenier_check: support point not chronologically before the target");
        double r = l.value();
        Vec w = vsub(grid_st.coord(target), grid_st.coord(x));
        Vec flat(static_cast<size_t>(dim));
        flat[0] = w[0];
        for (int a = 1; a < dim; ++a) flat[static_cast<size_t>(a)] = -w[static_cast<size_t>(a)];
        Vec df = vscale(std::pow(r, q - 2.0), flat);
        HyperbolicNorm mink = HyperbolicNorm::minkowski_standard(dim);
        ExtendedTime norm = mink.dual_eval(df);
        double route_a = norm.is_finite() ? norm.value() : -1.0;
        double route_b = std::pow(r, q - 1.0);
        res.max_rel_deviation_analytic = std::max(
            res.max_rel_deviation_analytic, std::fabs(route_a - route_b) / std::fabs(route_b));
    }

    // grid route: discrete backward slopes of f^o against ell^{q-1}
    PointFunction f(static_cast<size_t>(n), ExtendedTime::pos_inf());
    for (int i = 0; i < n; ++i) {
        ExtendedTime l = grid_st.ell(i, target);
        if (l.is_finite() && l.value() > 0.0)
            f[static_cast<size_t>(i)] = ExtendedTime(-std::pow(l.value(), q) / q);
    }
    SlopeField sf = slopes(grid_st, f, slope_opts);
    for (int x : mu0.support) {
        double truth = std::pow(grid_st.ell(x, target).value(), q - 1.0);
        // slope estimates sit below the limit; the tightest filtration level wins
        double best = -std::numeric_limits<double>::infinity();
        for (size_t ki = 0; ki < sf.k_schedule.size(); ++ki) {
            ExtendedTime v = sf.bwd[ki][static_cast<size_t>(x)];
            if (v.is_finite()) best = std::max(best, v.value());
        }
        if (!std::isfinite(best)) continue;
        res.max_rel_deviation_grid =
            std::max(res.max_rel_deviation_grid, std::fabs(best - truth) / truth);
        ++res.grid_points_checked;
    }
    return res;
}

CalculusRulesReport calculus_rules_check(const HyperbolicNorm& minkowski, const ModelFunction& f,
                                         const ModelFunction& g,
                                         const std::function<double(double)>& phi,
                                         const std::function<double(double)>& phi_prime,
                                         const std::vector<Vec>& samples, double tol) {
    (void)phi;
    CalculusRulesReport rep;
    rep.concavity_worst = std::numeric_limits<double>::infinity();
    rep.leibniz_worst = std::numeric_limits<double>::infinity();
    const double l1 = 0.7, l2 = 1.3, lam = 2.5;
    for (const Vec& x : samples) {
        double df = model_subslope(minkowski, f, x).value();
        double dg = model_subslope(minkowski, g, x).value();
        // concavity on the combination l1 f + l2 g
        Vec comb = vadd(vscale(l1, f.gradient(x)), vscale(l2, g.gradient(x)));
        double dcomb = minkowski.dual_eval(comb).as_double();
        rep.concavity_worst = std::min(rep.concavity_worst, dcomb - (l1 * df + l2 * dg));
        // positive 1-homogeneity
        double dlam = minkowski.dual_eval(vscale(lam, f.gradient(x))).as_double();
        rep.homogeneity_worst = std::max(rep.homogeneity_worst, std::fabs(dlam - lam * df));
        // chain rule |d(phi o f)| = phi'(f) |df| for nondecreasing phi
        double fp = phi_prime(f.value(x));
        double dchain = minkowski.dual_eval(vscale(fp, f.gradient(x))).as_double();
        rep.chain_rule_worst = std::max(rep.chain_rule_worst, std::fabs(dchain - fp * df));
        // Leibniz |d(fg)| >= f|dg| + g|df| for nonnegative causal f, g
        double fv = f.value(x), gv = g.value(x);
        if (fv >= 0.0 && gv >= 0.0) {
            Vec dprod = vadd(vscale(gv, f.gradient(x)), vscale(fv, g.gradient(x)));
            double dp = minkowski.dual_eval(dprod).as_double();
            rep.leibniz_worst = std::min(rep.leibniz_worst, dp - (fv * dg + gv * df));
        }
    }
    rep.concavity_ok = rep.concavity_worst >= -tol;
    rep.homogeneity_ok = rep.homogeneity_worst <= tol;
    rep.chain_ok = rep.chain_rule_worst <= tol;
    rep.leibniz_ok = rep.leibniz_worst >= -tol;
    return rep;
}

}  // namespace lorentz
