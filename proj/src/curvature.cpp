#include "lorentz/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lorentz {

double sin_kappa(double kappa, double theta) {
    require(theta >= 0.0, ErrorKind::Parameter, "sin_kappa: theta must be >= 0");
    if (kappa > 0.0) {
        double r = std::sqrt(kappa);
        return std::sin(r * theta) / r;
    }
    if (kappa == 0.0) return theta;
    double r = std::sqrt(-kappa);
    return std::sinh(r * theta) / r;
}

ExtendedTime sigma_coeff(const DistortionParams& p) {
    require(p.N > 0.0, ErrorKind::Parameter, "sigma: N must be positive");
    require(p.t >= 0.0 && p.t <= 1.0, ErrorKind::Parameter, "sigma: t must be in [0,1]");
    require(p.theta >= 0.0, ErrorKind::Parameter, "sigma: theta must be >= 0");
    if (p.K * p.theta * p.theta >= p.N * M_PI * M_PI) return ExtendedTime::pos_inf();
    if (p.theta == 0.0 || p.K == 0.0) return ExtendedTime(p.t);  // flat collapse is exact
    double kappa = p.K / p.N;
    return ExtendedTime(sin_kappa(kappa, p.t * p.theta) / sin_kappa(kappa, p.theta));
}

ExtendedTime tau_coeff(const DistortionParams& p) {
    require(p.N > 1.0, ErrorKind::Parameter, "tau: N must exceed 1");
    if (p.K == 0.0) {
        require(p.t >= 0.0 && p.t <= 1.0 && p.theta >= 0.0, ErrorKind::Parameter,
                "tau: parameters out of range");
        return ExtendedTime(p.t);  // t^{1/N} t^{(N-1)/N} = t, kept exact
    }
    DistortionParams inner = p;
    inner.N = p.N - 1.0;
    ExtendedTime s = sigma_coeff(inner);
    if (s.is_pos_inf()) return ExtendedTime::pos_inf();
    return ExtendedTime(std::pow(p.t, 1.0 / p.N) * std::pow(s.value(), (p.N - 1.0) / p.N));
}

namespace {

// x cot x and x coth x with series fallbacks near zero.
double xcot(double x) {
    if (std::fabs(x) < 1e-4) return 1.0 - x * x / 3.0 - x * x * x * x / 45.0;
    return x * std::cos(x) / std::sin(x);
}
double xcoth(double x) {
    if (std::fabs(x) < 1e-4) return 1.0 + x * x / 3.0 - x * x * x * x / 45.0;
    return x * std::cosh(x) / std::sinh(x);
}

}  // namespace

double tau_tilde(double K, double N, double theta) {
    require(N > 1.0, ErrorKind::Parameter, "tau_tilde: N must exceed 1");
    require(theta >= 0.0, ErrorKind::Parameter, "tau_tilde: theta must be >= 0");
    if (K == 0.0) return 1.0;
    if (K > 0.0) {
        double x = theta * std::sqrt(K / (N - 1.0));
        require(x <= M_PI + 1e-12, ErrorKind::Parameter,
                "tau_tilde: theta beyond pi*sqrt((N-1)/K)");
        return 1.0 / N + (N - 1.0) / N * xcot(x);
    }
    double x = theta * std::sqrt(-K / (N - 1.0));
    return 1.0 / N + (N - 1.0) / N * xcoth(x);
}

double sigma_tilde(double K, double N, double theta) {
    require(N > 0.0, ErrorKind::Parameter, "sigma_tilde: N must be positive");
    require(theta >= 0.0, ErrorKind::Parameter, "sigma_tilde: theta must be >= 0");
    if (K == 0.0) return 1.0;
    if (K > 0.0) {
        double x = theta * std::sqrt(K / N);
        require(x <= M_PI + 1e-12, ErrorKind::Parameter, "sigma_tilde: theta beyond pi*sqrt(N/K)");
        return xcot(x);
    }
    return xcoth(theta * std::sqrt(-K / N));
}

EntropyValue renyi_entropy(const DiscreteSpacetime& st, const DiscreteMeasure& mu, double N) {
    require(N > 1.0, ErrorKind::Parameter, "renyi_entropy: N must exceed 1");
    EntropyValue ev;
    ev.N = N;
    double s = 0.0;
    for (int i : mu.support) {
        double m = st.weight(i);
        double w = mu.weights[static_cast<size_t>(i)];
        if (m > 0.0)
            s += std::pow(w / m, (N - 1.0) / N) * m;
        else
            ev.singular_mass += w;  // singular part, contributes 0 to S_N
    }
    ev.value = -s;
    return ev;
}

double mass_excess(const DiscreteSpacetime& st, const DiscreteMeasure& mu, double c) {
    require(c > 0.0, ErrorKind::Parameter, "mass_excess: c must be positive");
    double excess = 0.0;
    for (int i : mu.support) {
        double m = st.weight(i);
        double w = mu.weights[static_cast<size_t>(i)];
        if (m > 0.0)
            excess += std::max(w / m - c, 0.0) * m;
        else
            excess += w;
    }
    return excess;
}

TmcpReport tmcp_check(const DiscreteSpacetime& st,
                      const std::vector<std::pair<double, DiscreteMeasure>>& geodesic, int target,
                      double K, double N, TimeDirection direction, const TmcpOptions& opts) {
    require(!geodesic.empty(), ErrorKind::Precondition, "tmcp_check: empty interpolation");
    require(N > 1.0, ErrorKind::Parameter, "tmcp_check: N must exceed 1");
    std::vector<double> N_range = opts.N_range;
    if (N_range.empty()) N_range = {N, N + 1.0, 2.0 * N};

    // reference slice: t=0 density for the future case, t=1 for the past
    const DiscreteMeasure* ref = nullptr;
    double ref_time = direction == TimeDirection::Future ? 0.0 : 1.0;
    for (const auto& [t, m] : geodesic)
        if (std::fabs(t - ref_time) < 1e-12) ref = &m;
    require(ref != nullptr, ErrorKind::Precondition,
            "tmcp_check: interpolation must contain the reference slice (t=0 future, t=1 past)");

    std::vector<double> rho(ref->support.size());
    for (size_t i = 0; i < ref->support.size(); ++i) {
        int x = ref->support[i];
        require(st.weight(x) > 0.0, ErrorKind::Precondition,
                "tmcp_check: reference measure must be absolutely continuous");
        rho[i] = ref->weights[static_cast<size_t>(x)] / st.weight(x);
        ExtendedTime l = direction == TimeDirection::Future ? st.ell(x, target) : st.ell(target, x);
        require(l.is_finite() && l.value() > 0.0, ErrorKind::Precondition,
                "tmcp_check: support point not chronologically related to the target");
    }

    TmcpReport rep;
    rep.reduced = opts.reduced;
    rep.pass = true;
    for (const auto& [t, mu_t] : geodesic) {
        for (double Np : N_range) {
            double lhs = renyi_entropy(st, mu_t, Np).value;
            double rhs = 0.0;
            for (size_t i = 0; i < ref->support.size(); ++i) {
                int x = ref->support[i];
                ExtendedTime l =
                    direction == TimeDirection::Future ? st.ell(x, target) : st.ell(target, x);
                DistortionParams dp;
                dp.K = K;
                dp.N = Np;
                dp.theta = l.value();
                dp.t = direction == TimeDirection::Future ? 1.0 - t : t;
                ExtendedTime coeff = opts.reduced ? sigma_coeff(dp) : tau_coeff(dp);
                if (coeff.is_pos_inf()) {
                    rhs = -std::numeric_limits<double>::infinity();
                    break;
                }
                rhs -= coeff.value() * std::pow(rho[i], -1.0 / Np) *
                       ref->weights[static_cast<size_t>(x)];
            }
            double defect = rhs - lhs;
            rep.entries.push_back({t, Np, lhs, rhs, defect});
            rep.worst_defect = std::min(rep.worst_defect, defect);
            if (!(defect >= -opts.tol)) rep.pass = false;
        }
    }
    return rep;
}

TmcpReport tmcp_check(const DiscreteSpacetime& st,
                      const std::vector<std::pair<double, DiscreteMeasure>>& geodesic,
                      const DiscreteMeasure& target, double K, double N, double q,
                      TimeDirection direction, const TmcpOptions& opts) {
    require(!geodesic.empty(), ErrorKind::Precondition, "tmcp_check: empty interpolation");
    require(N > 1.0, ErrorKind::Parameter, "tmcp_check: N must exceed 1");
    std::vector<double> N_range = opts.N_range;
    if (N_range.empty()) N_range = {N, N + 1.0, 2.0 * N};

    const DiscreteMeasure* ref = nullptr;
    double ref_time = direction == TimeDirection::Future ? 0.0 : 1.0;
    for (const auto& [t, m] : geodesic)
        if (std::fabs(t - ref_time) < 1e-12) ref = &m;
    require(ref != nullptr, ErrorKind::Precondition,
            "tmcp_check: interpolation must contain the reference slice");
    for (int x : ref->support)
        require(st.weight(x) > 0.0, ErrorKind::Precondition,
                "tmcp_check: reference measure must be absolutely continuous");

    LqResult lq = direction == TimeDirection::Future ? lq_distance(st, *ref, target, q)
                                                     : lq_distance(st, target, *ref, q);
    require(lq.feasible, ErrorKind::Precondition,
            "tmcp_check: no causal coupling between the reference slice and the target");

    // coupling entries (ref point, target point, mass) with the distortion
    // argument ell evaluated along the transport direction
    struct Pair {
        int ref_pt;
        double theta;
        double mass;
    };
    std::vector<Pair> pairs;
    for (size_t r = 0; r < lq.coupling.rows.size(); ++r)
        for (size_t c = 0; c < lq.coupling.cols.size(); ++c) {
            double mass = lq.coupling.at(static_cast<int>(r), static_cast<int>(c));
            if (mass <= 0.0) continue;
            int a = lq.coupling.rows[r], b = lq.coupling.cols[c];
            ExtendedTime l = st.ell(a, b);
            require(l.is_finite() && l.value() > 0.0, ErrorKind::Precondition,
                    "tmcp_check: optimal coupling hits a non-chronological pair");
            pairs.push_back({direction == TimeDirection::Future ? a : b, l.value(), mass});
        }

    TmcpReport rep;
    rep.reduced = opts.reduced;
    rep.pass = true;
    for (const auto& [t, mu_t] : geodesic) {
        for (double Np : N_range) {
            double lhs = renyi_entropy(st, mu_t, Np).value;
            double rhs = 0.0;
            for (const Pair& pr : pairs) {
                DistortionParams dp;
                dp.K = K;
                dp.N = Np;
                dp.theta = pr.theta;
                dp.t = direction == TimeDirection::Future ? 1.0 - t : t;
                ExtendedTime coeff = opts.reduced ? sigma_coeff(dp) : tau_coeff(dp);
                if (coeff.is_pos_inf()) {
                    rhs = -std::numeric_limits<double>::infinity();
                    break;
                }
                double rho = ref->weights[static_cast<size_t>(pr.ref_pt)] /
                             st.weight(pr.ref_pt);
                rhs -= coeff.value() * std::pow(rho, -1.0 / Np) * pr.mass;
            }
            double defect = rhs - lhs;
            rep.entries.push_back({t, Np, lhs, rhs, defect});
            rep.worst_defect = std::min(rep.worst_defect, defect);
            if (!(defect >= -opts.tol)) rep.pass = false;
        }
    }
    return rep;
}

namespace {

double point_residual(const DiscreteSpacetime& st, int x, int z, int y, double t, double lxy) {
    ExtendedTime xz = st.ell(x, z), zy = st.ell(z, y);
    if (!xz.is_finite() || !zy.is_finite()) return std::numeric_limits<double>::infinity();
    return std::max(std::fabs(xz.value() - t * lxy), std::fabs(zy.value() - (1.0 - t) * lxy));
}

// lattice cells within a box radius around a continuum point
std::vector<int> nearby_cells(const DiscreteSpacetime& st, const Vec& x, int radius) {
    const GridInfo& g = *st.grid();
    std::vector<int> center = g.cell_of_index(g.snap(x));
    std::vector<int> cells;
    std::vector<int> cur(center.size());
    std::function<void(size_t)> rec = [&](size_t axis) {
        if (axis == center.size()) {
            cells.push_back(g.index_of_cell(cur));
            return;
        }
        for (int d = -radius; d <= radius; ++d) {
            int c = center[axis] + d;
            if (c < 0 || c >= g.resolution[axis]) continue;
            cur[axis] = c;
            rec(axis + 1);
        }
    };
    rec(0);
    return cells;
}

using SparseCoupling = std::map<std::pair<int, int>, double>;

// disintegrate-and-glue along the shared middle marginal
SparseCoupling compose(const SparseCoupling& ab, const SparseCoupling& bc) {
    std::map<int, double> mid_mass;
    for (const auto& [key, m] : bc) mid_mass[key.first] += m;
    std::map<int, std::vector<std::pair<int, double>>> bc_rows;
    for (const auto& [key, m] : bc) bc_rows[key.first].emplace_back(key.second, m);
    SparseCoupling ac;
    for (const auto& [key, m] : ab) {
        auto it = bc_rows.find(key.second);
        if (it == bc_rows.end()) continue;
        double total = mid_mass[key.second];
        for (const auto& [c, mc] : it->second) ac[{key.first, c}] += m * mc / total;
    }
    return ac;
}

double coupling_lower_bound(const DiscreteSpacetime& st, const SparseCoupling& pi, double q) {
    // [ \int ell^q dpi ]^{1/q} certifies ell_q >= bound in both exponent
    // regimes (any explicit coupling does)
    ExtendedTime integral(0.0);
    for (const auto& [key, m] : pi) {
        ExtendedTime l = st.ell(key.first, key.second);
        if (l.is_neg_inf()) return -std::numeric_limits<double>::infinity();
        ExtendedTime term = m * pow_q(l, q);
        integral = integral + term;
        if (integral.is_pos_inf()) break;
    }
    ExtendedTime b = pow_q(integral, 1.0 / q);
    return b.as_double();
}

}  // namespace

GoodGeodesicReport good_geodesic(const DiscreteSpacetime& st, const DiscreteMeasure& mu0,
                                 int x1, double K, double N, double q, double lambda, int depth,
                                 const GoodGeodesicOptions& opts) {
    require(st.grid() && st.has_coords(), ErrorKind::Precondition,
            "good_geodesic: requires a generated grid spacetime");
    require(lambda > 0.0 && lambda < 1.0, ErrorKind::Parameter, "good_geodesic: lambda in (0,1)");
    require(depth >= 1, ErrorKind::Parameter, "good_geodesic: depth >= 1");
    require(N > 1.0, ErrorKind::Parameter, "good_geodesic: N must exceed 1");

    GoodGeodesicReport rep;
    const GridInfo& grid = *st.grid();
    const double h = grid.max_step();

    double rho0_max = 0.0, D = 0.0, ell_min = std::numeric_limits<double>::infinity();
    double stretch = 1.0;
    for (int x : mu0.support) {
        require(st.weight(x) > 0.0, ErrorKind::Precondition,
                "good_geodesic: mu0 must be absolutely continuous");
        rho0_max = std::max(rho0_max, mu0.weights[static_cast<size_t>(x)] / st.weight(x));
        ExtendedTime l = st.ell(x, x1);
        require(l.is_finite() && l.value() > 0.0, ErrorKind::Precondition,
                "good_geodesic: support must be chronologically before the target");
        D = std::max(D, l.value());
        ell_min = std::min(ell_min, l.value());
        double euc = 0.0;
        Vec d = vsub(st.coord(x1), st.coord(x));
        for (double c : d) euc += c * c;
        stretch = std::max(stretch, std::sqrt(euc) / l.value());
    }
    const double Kminus = std::max(-K, 0.0);  // negative part; factor 1 for K >= 0
    const double fiber_slack =
        opts.fiber_slack > 0.0 ? opts.fiber_slack : 6.0 * h * stretch;
    const double margin =
        opts.density_margin >= 0.0 ? opts.density_margin : std::min(0.5, 3.0 * h / ell_min);
    std::vector<double> N_range = opts.N_range;
    if (N_range.empty()) N_range = {N, N + 1.0, 2.0 * N};

    // exact ell_q against the Dirac target (unique product coupling)
    {
        ExtendedTime integral(0.0);
        for (int x : mu0.support)
            integral = integral +
                       mu0.weights[static_cast<size_t>(x)] * pow_q(st.ell(x, x1), q);
        rep.ell_q_total = pow_q(integral, 1.0 / q).as_double();
    }

    DiscreteMeasure current = mu0;
    double prev_density = rho0_max;
    std::vector<SparseCoupling> step_couplings;
    rep.density_ok = true;
    rep.entropy_ok = true;
    int moves_used = 0;

    double s = 1.0;
    for (int k = 1; k <= depth; ++k) {
        double s_new = s * (1.0 - lambda);
        double D_prev = 0.0;
        for (int x : current.support) {
            ExtendedTime l = st.ell(x, x1);
            require(l.is_finite() && l.value() > 0.0, ErrorKind::Precondition,
                    "good_geodesic: intermediate support left the chronological past");
            D_prev = std::max(D_prev, l.value());
        }
        double c_step = std::pow(1.0 - lambda, -N) *
                        std::exp(D_prev * lambda * std::sqrt(Kminus * (N - 1.0))) * prev_density;
        double c_eff = c_step * (1.0 + margin);

        // push along the product coupling toward the Dirac target; the
        // landing cell must stay inside the admissible fiber (in particular
        // causally after the source), falling back to the least-residual
        // nearby cell or to staying put at sub-cell displacements
        std::map<int, std::map<int, double>> contrib;  // landing cell -> source -> mass
        for (int x : current.support) {
            Vec dest = vadd(vscale(1.0 - lambda, st.coord(x)), vscale(lambda, st.coord(x1)));
            double lxy = st.ell(x, x1).value();
            int z0 = grid.snap(dest);
            double r0 = point_residual(st, x, z0, x1, lambda, lxy);
            if (r0 > fiber_slack) {
                int best = -1;
                double best_r = std::numeric_limits<double>::infinity();
                for (int z : nearby_cells(st, dest, 2)) {
                    double r = point_residual(st, x, z, x1, lambda, lxy);
                    if (r < best_r) {
                        best_r = r;
                        best = z;
                    }
                }
                double r_stay = point_residual(st, x, x, x1, lambda, lxy);
                if (r_stay < best_r) {
                    best_r = r_stay;
                    best = x;
                }
                if (best >= 0 && best_r < r0) z0 = best;
            }
            contrib[z0][x] += current.weights[static_cast<size_t>(x)];
        }

        auto density_of = [&](int z) {
            double mass = 0.0;
            auto it = contrib.find(z);
            if (it != contrib.end())
                for (const auto& [src, m] : it->second) mass += m;
            return mass / st.weight(z);
        };

        // admissible fiber cells per source, cached
        std::map<int, std::vector<int>> fibers;
        auto fiber_of = [&](int x) -> const std::vector<int>& {
            auto it = fibers.find(x);
            if (it != fibers.end()) return it->second;
            double lxy = st.ell(x, x1).value();
            Vec dest = vadd(vscale(1.0 - lambda, st.coord(x)), vscale(lambda, st.coord(x1)));
            std::vector<int> adm;
            for (int z : nearby_cells(st, dest, 2))
                if (point_residual(st, x, z, x1, lambda, lxy) <= fiber_slack) adm.push_back(z);
            return fibers.emplace(x, std::move(adm)).first->second;
        };

        bool stuck = false;
        while (moves_used < opts.max_moves) {
            int worst = -1;
            double worst_violation = 0.0;
            for (const auto& [z, srcs] : contrib) {
                double v = density_of(z) - c_eff;
                if (v > worst_violation + 1e-15) {
                    worst_violation = v;
                    worst = z;
                }
            }
            if (worst < 0 || worst_violation <= 1e-12 * c_eff) break;
            double excess_mass = worst_violation * st.weight(worst);
            bool moved = false;
            for (auto& [src, m] : contrib[worst]) {
                if (m <= 1e-15) continue;
                int best_cell = -1;
                double best_density = std::numeric_limits<double>::infinity();
                for (int z2 : fiber_of(src)) {
                    if (z2 == worst) continue;
                    double d2 = density_of(z2);
                    if (d2 < c_eff && d2 < best_density) {
                        best_density = d2;
                        best_cell = z2;
                    }
                }
                if (best_cell < 0) continue;
                double room = (c_eff - best_density) * st.weight(best_cell);
                double amount = std::min({m, excess_mass, room});
                if (amount <= 1e-15) continue;
                m -= amount;
                contrib[best_cell][src] += amount;
                ++moves_used;
                moved = true;
                break;
            }
            if (!moved) {
                stuck = true;
                rep.failed_cell = worst;
                break;
            }
        }

        // assemble the new slice and the step coupling
        std::vector<double> w(static_cast<size_t>(st.n_points()), 0.0);
        SparseCoupling step;
        for (const auto& [z, srcs] : contrib)
            for (const auto& [src, m] : srcs) {
                if (m <= 0.0) continue;
                w[static_cast<size_t>(z)] += m;
                step[{src, z}] += m;
            }
        current = DiscreteMeasure::from_weights(std::move(w), 1e-9);
        step_couplings.push_back(std::move(step));

        GoodGeodesicStep stepinfo;
        stepinfo.t = 1.0 - s_new;
        stepinfo.nu = current;
        stepinfo.redistribution_moves = moves_used;
        stepinfo.max_density = 0.0;
        for (int z : current.support)
            stepinfo.max_density =
                std::max(stepinfo.max_density, current.weights[static_cast<size_t>(z)] / st.weight(z));
        stepinfo.density_bound = std::pow(s_new, -N) *
                                 std::exp(D * (1.0 - s_new) * std::sqrt(Kminus * (N - 1.0))) *
                                 rho0_max;
        if (stepinfo.max_density > stepinfo.density_bound * (1.0 + margin) + opts.tol || stuck)
            rep.density_ok = false;

        // entropy certificate against the initial density
        stepinfo.entropy_defect = std::numeric_limits<double>::infinity();
        for (double Np : N_range) {
            double lhs = renyi_entropy(st, current, Np).value;
            double rhs = 0.0;
            for (int x : mu0.support) {
                DistortionParams dp;
                dp.K = K;
                dp.N = Np;
                dp.theta = st.ell(x, x1).value();
                dp.t = s_new;
                ExtendedTime coeff = tau_coeff(dp);
                if (coeff.is_pos_inf()) {
                    rhs = -std::numeric_limits<double>::infinity();
                    break;
                }
                double rho0 = mu0.weights[static_cast<size_t>(x)] / st.weight(x);
                rhs -= coeff.value() * std::pow(rho0, -1.0 / Np) *
                       mu0.weights[static_cast<size_t>(x)];
            }
            stepinfo.entropy_defect = std::min(stepinfo.entropy_defect, rhs - lhs);
        }
        if (!(stepinfo.entropy_defect >= -std::max(opts.tol, 8.0 * h * std::fabs(renyi_entropy(st, mu0, N).value))))
            rep.entropy_ok = false;

        rep.steps.push_back(std::move(stepinfo));
        prev_density = rep.steps.back().max_density;
        s = s_new;
        if (stuck) break;
    }

    // geodesy certificates from the explicit couplings: between every pair of
    // constructed slices and from every slice to the Dirac endpoint
    rep.geodesy_ok = true;
    double L = rep.ell_q_total;
    double geod_tol = std::max(opts.tol, 8.0 * h * stretch);
    std::vector<double> s_index(rep.steps.size() + 1);
    s_index[0] = 1.0;
    for (size_t k = 0; k < rep.steps.size(); ++k) s_index[k + 1] = 1.0 - rep.steps[k].t;
    std::vector<const DiscreteMeasure*> slices(rep.steps.size() + 1);
    slices[0] = &mu0;
    for (size_t k = 0; k < rep.steps.size(); ++k) slices[k + 1] = &rep.steps[k].nu;

    rep.worst_geodesy_defect = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < slices.size(); ++i) {
        SparseCoupling acc;
        for (size_t j = i + 1; j < slices.size(); ++j) {
            acc = j == i + 1 ? step_couplings[i] : compose(acc, step_couplings[j - 1]);
            double bound = coupling_lower_bound(st, acc, q);
            double defect = bound - (s_index[i] - s_index[j]) * L;
            rep.worst_geodesy_defect = std::min(rep.worst_geodesy_defect, defect);
            if (defect < -geod_tol * std::max(1.0, L)) rep.geodesy_ok = false;
        }
        // leg to the Dirac target: unique product coupling, exact value
        ExtendedTime integral(0.0);
        for (int x : slices[i]->support)
            integral = integral +
                       slices[i]->weights[static_cast<size_t>(x)] * pow_q(st.ell(x, x1), q);
        double leg = pow_q(integral, 1.0 / q).as_double();
        double defect = leg - s_index[i] * L;
        rep.worst_geodesy_defect = std::min(rep.worst_geodesy_defect, defect);
        if (defect < -geod_tol * std::max(1.0, L)) rep.geodesy_ok = false;
    }

    rep.ok = rep.density_ok && rep.entropy_ok && rep.geodesy_ok && rep.failed_cell < 0;
    return rep;
}

}  // namespace lorentz
