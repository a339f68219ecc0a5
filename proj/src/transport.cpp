#include "lorentz/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>

namespace lorentz {

DiscreteMeasure DiscreteMeasure::from_weights(std::vector<double> w, double tol) {
    DiscreteMeasure m;
    double s = 0.0;
    for (double x : w) {
        require(x >= 0.0 && std::isfinite(x), ErrorKind::Structural,
                "measure: weights must be finite and nonnegative");
        s += x;
    }
    require(std::fabs(s - 1.0) <= std::max(tol, 1e-12), ErrorKind::Structural,
            "measure: weights must sum to 1");
    m.weights = std::move(w);
    for (size_t i = 0; i < m.weights.size(); ++i)
        if (m.weights[i] > 0.0) m.support.push_back(static_cast<int>(i));
    return m;
}

DiscreteMeasure DiscreteMeasure::dirac(int n, int at) {
    require(at >= 0 && at < n, ErrorKind::Precondition, "dirac: index out of range");
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    w[static_cast<size_t>(at)] = 1.0;
    return from_weights(std::move(w));
}

DiscreteMeasure DiscreteMeasure::uniform_on(int n, const std::vector<int>& pts,
                                            const std::vector<double>& m_weights) {
    require(!pts.empty(), ErrorKind::Precondition, "uniform_on: empty point set");
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    double total = 0.0;
    for (int p : pts) total += m_weights[static_cast<size_t>(p)];
    require(total > 0.0, ErrorKind::Precondition, "uniform_on: set has zero reference mass");
    for (int p : pts) w[static_cast<size_t>(p)] = m_weights[static_cast<size_t>(p)] / total;
    return from_weights(std::move(w));
}

double DiscreteMeasure::mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double Coupling::marginal_residual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const {
    double worst = 0.0;
    for (size_t r = 0; r < rows.size(); ++r) {
        double s = 0.0;
        for (size_t c = 0; c < cols.size(); ++c) s += at(static_cast<int>(r), static_cast<int>(c));
        worst = std::max(worst, std::fabs(s - mu.weights[static_cast<size_t>(rows[r])]));
    }
    for (size_t c = 0; c < cols.size(); ++c) {
        double s = 0.0;
        for (size_t r = 0; r < rows.size(); ++r) s += at(static_cast<int>(r), static_cast<int>(c));
        worst = std::max(worst, std::fabs(s - nu.weights[static_cast<size_t>(cols[c])]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Transportation network simplex (minimization) on the causal bipartite
// graph. Arcs absent from `arcs` are structurally forbidden. Artificial arcs
// through a root node carry big-M costs; Bland's entering rule (lowest arc
// id with negative reduced cost) keeps the pivoting deterministic and
// cycle-free.
// ---------------------------------------------------------------------------
namespace {

struct Arc {
    int tail, head;
    double cost;
    double flow = 0.0;
    bool in_tree = false;
};

struct SimplexOutcome {
    bool feasible = false;
    double cost = 0.0;
    double optimality_residual = 0.0;
    std::vector<double> flow;  // per real arc
};

SimplexOutcome transportation_simplex(int m, int k, std::vector<double> a, std::vector<double> b,
                                      const std::vector<std::array<double, 3>>& real_arcs,
                                      const TransportOptions& opts) {
    const int root = m + k;
    const int n_nodes = m + k + 1;

    // balance exactly (probability inputs differ by <= 1e-12)
    double sa = std::accumulate(a.begin(), a.end(), 0.0);
    double sb = std::accumulate(b.begin(), b.end(), 0.0);
    b[static_cast<size_t>(k - 1)] += sa - sb;

    double cmax = 1.0;
    for (const auto& ra : real_arcs) cmax = std::max(cmax, std::fabs(ra[2]));
    const double bigM = (n_nodes + 1) * cmax;

    std::vector<Arc> arcs;
    arcs.reserve(real_arcs.size() + static_cast<size_t>(m + k));
    for (const auto& ra : real_arcs)
        arcs.push_back({static_cast<int>(ra[0]), m + static_cast<int>(ra[1]), ra[2]});
    const size_t n_real = real_arcs.size();
    for (int i = 0; i < m; ++i) arcs.push_back({i, root, bigM});
    for (int j = 0; j < k; ++j) arcs.push_back({root, m + j, bigM});

    // initial star tree through the root
    for (size_t t = n_real; t < arcs.size(); ++t) {
        arcs[t].in_tree = true;
        int node = arcs[t].tail == root ? arcs[t].head : arcs[t].tail;
        arcs[t].flow = node < m ? a[static_cast<size_t>(node)] : b[static_cast<size_t>(node - m)];
    }

    std::vector<int> parent(static_cast<size_t>(n_nodes), -1);
    std::vector<int> pred(static_cast<size_t>(n_nodes), -1);
    std::vector<int> depth(static_cast<size_t>(n_nodes), 0);
    std::vector<double> pot(static_cast<size_t>(n_nodes), 0.0);
    std::vector<std::vector<int>> tree_adj(static_cast<size_t>(n_nodes));

    auto rebuild = [&]() {
        for (auto& v : tree_adj) v.clear();
        for (size_t t = 0; t < arcs.size(); ++t) {
            if (!arcs[t].in_tree) continue;
            tree_adj[static_cast<size_t>(arcs[t].tail)].push_back(static_cast<int>(t));
            tree_adj[static_cast<size_t>(arcs[t].head)].push_back(static_cast<int>(t));
        }
        std::fill(parent.begin(), parent.end(), -1);
        std::deque<int> bfs{root};
        parent[static_cast<size_t>(root)] = root;
        pot[static_cast<size_t>(root)] = 0.0;
        depth[static_cast<size_t>(root)] = 0;
        while (!bfs.empty()) {
            int u = bfs.front();
            bfs.pop_front();
            for (int t : tree_adj[static_cast<size_t>(u)]) {
                int v = arcs[static_cast<size_t>(t)].tail == u ? arcs[static_cast<size_t>(t)].head
                                                               : arcs[static_cast<size_t>(t)].tail;
                if (parent[static_cast<size_t>(v)] != -1) continue;
                parent[static_cast<size_t>(v)] = u;
                pred[static_cast<size_t>(v)] = t;
                depth[static_cast<size_t>(v)] = depth[static_cast<size_t>(u)] + 1;
                // tree arcs have zero reduced cost: pot[head] = pot[tail] + cost
                if (arcs[static_cast<size_t>(t)].tail == u)
                    pot[static_cast<size_t>(v)] = pot[static_cast<size_t>(u)] + arcs[static_cast<size_t>(t)].cost;
                else
                    pot[static_cast<size_t>(v)] = pot[static_cast<size_t>(u)] - arcs[static_cast<size_t>(t)].cost;
                bfs.push_back(v);
            }
        }
    };
    rebuild();

    const double pivot_tol = 1e-12 * std::max(1.0, bigM);
    long long max_pivots = opts.max_pivots > 0
                               ? opts.max_pivots
                               : 2000 + 60LL * static_cast<long long>(m + k) *
                                              std::max<long long>(8, static_cast<long long>(n_real) / std::max(1, m + k));

    for (long long pivot = 0;; ++pivot) {
        require(pivot < max_pivots, ErrorKind::Numerical,
                "transport solver: pivot budget exhausted");
        int entering = -1;
        for (size_t t = 0; t < arcs.size(); ++t) {
            if (arcs[t].in_tree) continue;
            double cred = arcs[t].cost + pot[static_cast<size_t>(arcs[t].tail)] -
                          pot[static_cast<size_t>(arcs[t].head)];
            if (cred < -pivot_tol) { entering = static_cast<int>(t); break; }
        }
        if (entering < 0) break;

        // cycle: entering (u -> v) plus the tree path v .. u
        int u = arcs[static_cast<size_t>(entering)].tail;
        int v = arcs[static_cast<size_t>(entering)].head;
        std::vector<std::pair<int, int>> cycle;  // (arc id, sign: +1 flow up)
        cycle.emplace_back(entering, +1);
        int x = v, y = u;
        while (x != y) {
            if (depth[static_cast<size_t>(x)] >= depth[static_cast<size_t>(y)]) {
                int t = pred[static_cast<size_t>(x)];
                // cycle direction runs x -> parent(x)
                cycle.emplace_back(t, arcs[static_cast<size_t>(t)].tail == x ? +1 : -1);
                x = parent[static_cast<size_t>(x)];
            } else {
                int t = pred[static_cast<size_t>(y)];
                // cycle direction runs parent(y) -> y
                cycle.emplace_back(t, arcs[static_cast<size_t>(t)].head == y ? +1 : -1);
                y = parent[static_cast<size_t>(y)];
            }
        }

        double delta = std::numeric_limits<double>::infinity();
        int leaving = -1;
        for (const auto& [t, sign] : cycle) {
            if (sign >= 0) continue;
            double flow = arcs[static_cast<size_t>(t)].flow;
            // lowest arc id among the blocking arcs keeps the pivoting
            // Bland-deterministic and cycle-free
            if (flow < delta || (flow == delta && t < leaving)) {
                delta = flow;
                leaving = t;
            }
        }
        require(leaving >= 0, ErrorKind::Numerical, "transport solver: unbounded pivot");
        for (const auto& [t, sign] : cycle) {
            arcs[static_cast<size_t>(t)].flow += sign * delta;
            if (arcs[static_cast<size_t>(t)].flow < 0.0) arcs[static_cast<size_t>(t)].flow = 0.0;
        }
        arcs[static_cast<size_t>(entering)].in_tree = true;
        arcs[static_cast<size_t>(leaving)].in_tree = false;
        arcs[static_cast<size_t>(leaving)].flow = 0.0;
        rebuild();
    }

    SimplexOutcome out;
    out.feasible = true;
    for (size_t t = n_real; t < arcs.size(); ++t)
        if (arcs[t].flow > opts.marginal_tol) out.feasible = false;
    out.flow.resize(n_real);
    for (size_t t = 0; t < n_real; ++t) {
        out.flow[t] = arcs[t].flow;
        out.cost += arcs[t].flow * arcs[t].cost;
    }
    double resid = 0.0;
    for (size_t t = 0; t < n_real; ++t) {
        double cred = arcs[t].cost + pot[static_cast<size_t>(arcs[t].tail)] -
                      pot[static_cast<size_t>(arcs[t].head)];
        resid = std::max(resid, -cred);
        if (arcs[t].flow > opts.marginal_tol) resid = std::max(resid, std::fabs(cred));
    }
    out.optimality_residual = resid / std::max(1.0, cmax);
    return out;
}

// Edmonds-Karp feasibility check: does a causal coupling exist on the given
// arc set? Returns the (max) flow per arc if total supply is routable.
bool feasible_flow(int m, int k, const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<std::pair<int, int>>& arcs, std::vector<double>* flow_out,
                   double tol = 1e-11) {
    int S = m + k, T = m + k + 1, N = m + k + 2;
    std::vector<std::map<int, double>> cap(static_cast<size_t>(N));
    for (int i = 0; i < m; ++i) cap[static_cast<size_t>(S)][i] = a[static_cast<size_t>(i)];
    for (int j = 0; j < k; ++j) cap[static_cast<size_t>(m + j)][T] = b[static_cast<size_t>(j)];
    for (auto [i, j] : arcs) cap[static_cast<size_t>(i)][m + j] = 2.0;
    double total = std::accumulate(a.begin(), a.end(), 0.0);
    double flow = 0.0;
    while (true) {
        std::vector<int> prev(static_cast<size_t>(N), -1);
        prev[static_cast<size_t>(S)] = S;
        std::deque<int> q{S};
        while (!q.empty() && prev[static_cast<size_t>(T)] == -1) {
            int u = q.front();
            q.pop_front();
            for (const auto& [v, c] : cap[static_cast<size_t>(u)]) {
                if (c > tol && prev[static_cast<size_t>(v)] == -1) {
                    prev[static_cast<size_t>(v)] = u;
                    q.push_back(v);
                }
            }
        }
        if (prev[static_cast<size_t>(T)] == -1) break;
        double aug = std::numeric_limits<double>::infinity();
        for (int v = T; v != S; v = prev[static_cast<size_t>(v)])
            aug = std::min(aug, cap[static_cast<size_t>(prev[static_cast<size_t>(v)])][v]);
        for (int v = T; v != S; v = prev[static_cast<size_t>(v)]) {
            int u = prev[static_cast<size_t>(v)];
            cap[static_cast<size_t>(u)][v] -= aug;
            cap[static_cast<size_t>(v)][u] += aug;
        }
        flow += aug;
    }
    if (flow < total - 1e-9) return false;
    if (flow_out) {
        flow_out->assign(arcs.size(), 0.0);
        for (size_t e = 0; e < arcs.size(); ++e) {
            auto [i, j] = arcs[e];
            (*flow_out)[e] = cap[static_cast<size_t>(m + j)].count(i)
                                 ? cap[static_cast<size_t>(m + j)][i]
                                 : 0.0;  // residual backward = shipped flow
        }
    }
    return true;
}

}  // namespace

LqResult lq_distance(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double q, const TransportOptions& opts) {
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter, "lq_distance: q must satisfy 0 != q < 1");
    LqResult res;
    res.coupling.rows = mu.support;
    res.coupling.cols = nu.support;
    const int m = static_cast<int>(mu.support.size());
    const int k = static_cast<int>(nu.support.size());
    res.coupling.pi.assign(static_cast<size_t>(m) * k, 0.0);

    std::vector<double> a(static_cast<size_t>(m)), b(static_cast<size_t>(k));
    for (int i = 0; i < m; ++i) a[static_cast<size_t>(i)] = mu.weights[static_cast<size_t>(mu.support[static_cast<size_t>(i)])];
    for (int j = 0; j < k; ++j) b[static_cast<size_t>(j)] = nu.weights[static_cast<size_t>(nu.support[static_cast<size_t>(j)])];

    // causal arcs and their separations
    std::vector<std::pair<int, int>> causal_arcs;
    std::vector<ExtendedTime> sep;
    std::vector<std::pair<int, int>> infinite_arcs;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < k; ++j) {
            ExtendedTime v = st.ell(mu.support[static_cast<size_t>(i)], nu.support[static_cast<size_t>(j)]);
            if (v.is_neg_inf()) continue;
            causal_arcs.emplace_back(i, j);
            sep.push_back(v);
            if (v.is_pos_inf()) infinite_arcs.emplace_back(i, j);
        }
    }

    std::vector<double> causal_flow;
    bool causal_feasible = feasible_flow(m, k, a, b, causal_arcs, &causal_flow);
    if (!causal_feasible) {
        res.value = ExtendedTime::neg_inf();  // Pi_<=(mu, nu) is empty: sup over the empty set
        res.integral = ExtendedTime::neg_inf();
        return res;
    }
    res.feasible = true;

    auto fill_coupling = [&](const std::vector<double>& flow) {
        for (size_t e = 0; e < causal_arcs.size(); ++e)
            res.coupling.at(causal_arcs[e].first, causal_arcs[e].second) = flow[e];
    };

    if (q > 0.0 && !infinite_arcs.empty()) {
        // If mass can sit on an arc with infinite separation, the supremum
        // blows up. Usable iff the feasible flow already uses it or a
        // residual rerouting can move mass onto it.
        fill_coupling(causal_flow);
        for (size_t e = 0; e < causal_arcs.size(); ++e) {
            if (!sep[e].is_pos_inf()) continue;
            if (causal_flow[e] > 1e-12) {
                res.value = ExtendedTime::pos_inf();
                res.integral = ExtendedTime::pos_inf();
                return res;
            }
        }
        // rerouting check via one simplex run that rewards the infinite arcs
        std::vector<std::array<double, 3>> probe;
        for (size_t e = 0; e < causal_arcs.size(); ++e)
            probe.push_back({static_cast<double>(causal_arcs[e].first),
                             static_cast<double>(causal_arcs[e].second),
                             sep[e].is_pos_inf() ? -1.0 : 0.0});
        SimplexOutcome probe_out = transportation_simplex(m, k, a, b, probe, opts);
        if (probe_out.feasible && probe_out.cost < -1e-12) {
            fill_coupling(probe_out.flow);
            res.value = ExtendedTime::pos_inf();
            res.integral = ExtendedTime::pos_inf();
            return res;
        }
        // infinite arcs carry no mass in any feasible coupling: drop them
    }

    // arc set for the optimization
    std::vector<std::array<double, 3>> arcs;
    for (size_t e = 0; e < causal_arcs.size(); ++e) {
        if (sep[e].is_pos_inf() && q > 0.0) continue;  // unusable, see above
        if (q < 0.0 && sep[e].is_finite() && sep[e].value() == 0.0) continue;  // null pair
        double cost;
        if (q > 0.0)
            cost = -std::pow(sep[e].value(), q);  // maximize \int ell^q
        else
            cost = sep[e].is_pos_inf() ? 0.0 : std::pow(sep[e].value(), q);  // minimize
        arcs.push_back({static_cast<double>(causal_arcs[e].first),
                        static_cast<double>(causal_arcs[e].second), cost});
    }

    if (q < 0.0) {
        // feasibility while avoiding null pairs
        std::vector<std::pair<int, int>> strict;
        for (const auto& ar : arcs) strict.emplace_back(static_cast<int>(ar[0]), static_cast<int>(ar[1]));
        if (!feasible_flow(m, k, a, b, strict, nullptr)) {
            // every causal coupling hits a null pair: 0^q = +inf makes the
            // integral +inf, so ell_q = (+inf)^{1/q} = 0
            fill_coupling(causal_flow);
            res.value = ExtendedTime(0.0);
            res.integral = ExtendedTime::pos_inf();
            res.degenerate = true;
            return res;
        }
    }

    SimplexOutcome sol = transportation_simplex(m, k, a, b, arcs, opts);
    require(sol.feasible, ErrorKind::Numerical,
            "lq_distance: simplex infeasible after max-flow feasibility");
    res.optimality_residual = sol.optimality_residual;
    std::fill(res.coupling.pi.begin(), res.coupling.pi.end(), 0.0);
    {
        size_t e_arc = 0;
        for (size_t e = 0; e < causal_arcs.size(); ++e) {
            if (sep[e].is_pos_inf() && q > 0.0) continue;
            if (q < 0.0 && sep[e].is_finite() && sep[e].value() == 0.0) continue;
            res.coupling.at(causal_arcs[e].first, causal_arcs[e].second) = sol.flow[e_arc];
            ++e_arc;
        }
    }
    double V = q > 0.0 ? -sol.cost : sol.cost;
    if (V < 0.0) V = 0.0;
    res.integral = ExtendedTime(V);
    res.value = pow_q(ExtendedTime(V), 1.0 / q);
    return res;
}

ExtendedTime reverse_triangle_lq(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& xi, const DiscreteMeasure& nu, double q) {
    ExtendedTime full = lq_distance(st, mu, nu, q).value;
    ExtendedTime leg1 = lq_distance(st, mu, xi, q).value;
    ExtendedTime leg2 = lq_distance(st, xi, nu, q).value;
    return full - leg1 - leg2;
}

namespace {

// (1/q) ell^q with the conventions; -inf for non-causal pairs so that
// cyclically shifted sums drop out of the comparison.
ExtendedTime cyc_term(ExtendedTime l, double q) {
    if (l.is_neg_inf()) return ExtendedTime::neg_inf();
    return pow_q_over_q(l, q);
}

ExtendedTime cyc_sum(const DiscreteSpacetime& st, const std::vector<std::pair<int, int>>& pairs,
                     const std::vector<size_t>& order, double q) {
    ExtendedTime s(0.0);
    for (size_t i = 0; i < pairs.size(); ++i) {
        ExtendedTime term = cyc_term(st.ell(pairs[order[i]].first, pairs[i].second), q);
        if (term.is_neg_inf()) return ExtendedTime::neg_inf();
        s = s + term;
    }
    return s;
}

}  // namespace

CyclicalMonotonicityReport cyclical_monotonicity_check(
    const DiscreteSpacetime& st, const std::vector<std::pair<int, int>>& pairs, double q,
    double tol, int random_trials, std::uint64_t seed) {
    CyclicalMonotonicityReport rep;
    const size_t n = pairs.size();
    for (size_t i = 0; i < n; ++i) {
        ExtendedTime l = st.ell(pairs[i].first, pairs[i].second);
        if (!(l > ExtendedTime(0.0))) rep.nonchronological_pairs.push_back(i);
    }
    std::vector<size_t> identity(n);
    for (size_t i = 0; i < n; ++i) identity[i] = i;
    ExtendedTime lhs = cyc_sum(st, pairs, identity, q);

    auto check_order = [&](const std::vector<size_t>& order) {
        ExtendedTime rhs = cyc_sum(st, pairs, order, q);
        ++rep.cycles_checked;
        bool ok;
        if (rhs.is_neg_inf()) ok = true;
        else if (lhs.is_neg_inf()) ok = false;
        else if (lhs.is_pos_inf()) ok = true;
        else if (rhs.is_pos_inf()) ok = false;
        else ok = lhs.value() >= rhs.value() - tol;
        if (!ok) {
            rep.monotone = false;
            if (rep.violations.size() < 16) {
                CycleViolation v;
                v.lhs = lhs.as_double();
                v.rhs = rhs.as_double();
                v.order.resize(order.size());
                for (size_t i = 0; i < order.size(); ++i) v.order[i] = static_cast<int>(order[i]);
                rep.violations.push_back(v);
            }
        }
    };

    if (n <= 8) {
        for (size_t shift = 1; shift < n; ++shift) {
            std::vector<size_t> order(n);
            for (size_t i = 0; i < n; ++i) order[i] = (i + shift) % n;
            check_order(order);
        }
        rep.exhaustive = true;
    } else {
        std::mt19937_64 rng(seed);
        for (int trial = 0; trial < random_trials; ++trial) {
            std::vector<size_t> order = identity;
            std::shuffle(order.begin(), order.end(), rng);
            check_order(order);
        }
        rep.exhaustive = false;
    }
    return rep;
}

KantorovichPotential kantorovich_transform(const DiscreteSpacetime& st,
                                           const KantorovichPotential& f) {
    const int n = st.n_points();
    require(static_cast<int>(f.f.size()) == n, ErrorKind::Structural,
            "kantorovich_transform: potential size mismatch");
    KantorovichPotential out;
    out.q = f.q;
    out.f.assign(static_cast<size_t>(n), ExtendedTime::neg_inf());
    for (int y = 0; y < n; ++y) {
        ExtendedTime best = ExtendedTime::neg_inf();  // sup over the empty set
        for (int x = 0; x < n; ++x) {
            ExtendedTime l = st.ell(x, y);
            if (l.is_neg_inf()) continue;                        // x <= y fails
            if (!f.f[static_cast<size_t>(x)].is_finite()) continue;  // outside Dom(f)
            ExtendedTime cand = f.f[static_cast<size_t>(x)] + pow_q_over_q(l, f.q);
            if (cand > best) best = cand;
        }
        out.f[static_cast<size_t>(y)] = best;
    }
    return out;
}

std::vector<std::pair<int, int>> superdifferential(const DiscreteSpacetime& st,
                                                   const KantorovichPotential& f, double tol) {
    const int n = st.n_points();
    KantorovichPotential tf = kantorovich_transform(st, f);
    std::vector<std::pair<int, int>> out;
    for (int x = 0; x < n; ++x) {
        if (!f.f[static_cast<size_t>(x)].is_finite()) continue;
        for (int y = 0; y < n; ++y) {
            ExtendedTime l = st.ell(x, y);
            if (l.is_neg_inf()) continue;
            ExtendedTime cand = f.f[static_cast<size_t>(x)] + pow_q_over_q(l, f.q);
            if (!cand.is_finite() || !tf.f[static_cast<size_t>(y)].is_finite()) continue;
            if (std::fabs(cand.value() - tf.f[static_cast<size_t>(y)].value()) <= tol)
                out.emplace_back(x, y);
        }
    }
    return out;
}

DualityGapResult duality_gap(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, const KantorovichPotential& f) {
    DualityGapResult res;
    LqResult lq = lq_distance(st, mu, nu, f.q);
    if (lq.value.is_neg_inf()) return res;  // gap undefined without causal couplings
    ExtendedTime primal = pow_q_over_q(lq.value, f.q);
    if (!primal.is_finite()) return res;
    KantorovichPotential tf = kantorovich_transform(st, f);
    double int_f = 0.0, int_tf = 0.0;
    for (int i : mu.support) {
        if (!f.f[static_cast<size_t>(i)].is_finite()) return res;
        int_f += mu.weights[static_cast<size_t>(i)] * f.f[static_cast<size_t>(i)].value();
    }
    for (int j : nu.support) {
        if (!tf.f[static_cast<size_t>(j)].is_finite()) return res;
        int_tf += nu.weights[static_cast<size_t>(j)] * tf.f[static_cast<size_t>(j)].value();
    }
    res.defined = true;
    res.primal = primal.value();
    res.dual = int_tf - int_f;
    res.gap = res.primal - res.dual;
    return res;
}

namespace {

double point_residual(const DiscreteSpacetime& st, int x, int z, int y, double t, double lxy) {
    ExtendedTime xz = st.ell(x, z), zy = st.ell(z, y);
    if (xz.is_neg_inf() || zy.is_neg_inf() || xz.is_pos_inf() || zy.is_pos_inf())
        return std::numeric_limits<double>::infinity();
    return std::max(std::fabs(xz.value() - t * lxy), std::fabs(zy.value() - (1.0 - t) * lxy));
}

}  // namespace

IntermediateResult intermediate_measure(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, double t, double q,
                                        const IntermediateOptions& opts) {
    require(t >= 0.0 && t <= 1.0, ErrorKind::Parameter, "intermediate_measure: t must be in [0,1]");
    IntermediateResult res;
    LqResult lq = lq_distance(st, mu, nu, q);
    require(lq.value.is_finite() && lq.value.value() > 0.0, ErrorKind::Precondition,
            "intermediate_measure: ell_q(mu,nu) must be finite and positive");

    const int n = st.n_points();
    double h = st.grid() ? st.grid()->max_step() : 0.0;
    double point_tol =
        opts.point_tol >= 0.0 ? opts.point_tol : (st.grid() ? 4.0 * h : 1e-9);
    double leg_tol = opts.leg_tol >= 0.0 ? opts.leg_tol : std::max(1e-9, 5.0 * h);

    auto identity_coupling = [&](const DiscreteMeasure& m_) {
        Coupling c;
        c.rows = m_.support;
        c.cols = m_.support;
        c.pi.assign(m_.support.size() * m_.support.size(), 0.0);
        for (size_t r = 0; r < m_.support.size(); ++r)
            c.at(static_cast<int>(r), static_cast<int>(r)) =
                m_.weights[static_cast<size_t>(m_.support[r])];
        return c;
    };

    if (t == 0.0) {
        res.xi = mu;
        res.first_leg = identity_coupling(mu);
        res.second_leg = lq.coupling;
        res.ok = true;
        return res;
    }
    if (t == 1.0) {
        res.xi = nu;
        res.first_leg = lq.coupling;
        res.second_leg = identity_coupling(nu);
        res.ok = true;
        return res;
    }

    std::vector<double> xi_w(static_cast<size_t>(n), 0.0);
    std::map<std::pair<int, int>, double> leg1, leg2;  // (x,z) and (z,y) masses
    for (size_t r = 0; r < lq.coupling.rows.size(); ++r) {
        for (size_t c = 0; c < lq.coupling.cols.size(); ++c) {
            double mass = lq.coupling.at(static_cast<int>(r), static_cast<int>(c));
            if (mass <= 1e-14) continue;
            int x = lq.coupling.rows[r], y = lq.coupling.cols[c];
            ExtendedTime lxy_e = st.ell(x, y);
            require(lxy_e.is_finite(), ErrorKind::Precondition,
                    "intermediate_measure: optimal pair with non-finite separation");
            double lxy = lxy_e.value();
            int z = -1;
            double best = std::numeric_limits<double>::infinity();
            if (st.grid() && st.has_coords()) {
                Vec target = vadd(vscale(1.0 - t, st.coord(x)), vscale(t, st.coord(y)));
                int z0 = st.grid()->snap(target);
                best = point_residual(st, x, z0, y, t, lxy);
                z = z0;
            } else {
                for (int cand = 0; cand < n; ++cand) {
                    double resid = point_residual(st, x, cand, y, t, lxy);
                    if (resid < best) { best = resid; z = cand; }
                }
            }
            if (z < 0 || best > point_tol) {
                res.failed_pairs.emplace_back(x, y);
                continue;
            }
            res.max_point_residual = std::max(res.max_point_residual, best);
            xi_w[static_cast<size_t>(z)] += mass;
            leg1[{x, z}] += mass;
            leg2[{z, y}] += mass;
        }
    }
    if (!res.failed_pairs.empty()) {
        res.note = "no admissible intermediate point for some optimal pairs; refine the grid";
        return res;
    }
    res.xi = DiscreteMeasure::from_weights(std::move(xi_w), 1e-9);

    auto build = [&](const std::map<std::pair<int, int>, double>& entries, bool first) {
        Coupling c;
        c.rows = first ? mu.support : res.xi.support;
        c.cols = first ? res.xi.support : nu.support;
        c.pi.assign(c.rows.size() * c.cols.size(), 0.0);
        auto rindex = [&](int v) {
            return static_cast<int>(std::lower_bound(c.rows.begin(), c.rows.end(), v) - c.rows.begin());
        };
        auto cindex = [&](int v) {
            return static_cast<int>(std::lower_bound(c.cols.begin(), c.cols.end(), v) - c.cols.begin());
        };
        for (const auto& [key, mass] : entries) c.at(rindex(key.first), cindex(key.second)) += mass;
        return c;
    };
    res.first_leg = build(leg1, true);
    res.second_leg = build(leg2, false);

    if (opts.verify_legs) {
        double L = lq.value.value();
        ExtendedTime l1 = lq_distance(st, mu, res.xi, q).value;
        ExtendedTime l2 = lq_distance(st, res.xi, nu, q).value;
        res.leg1_defect = l1.as_double() - t * L;
        res.leg2_defect = l2.as_double() - (1.0 - t) * L;
        res.ok = std::fabs(res.leg1_defect) <= leg_tol * std::max(1.0, L) &&
                 std::fabs(res.leg2_defect) <= leg_tol * std::max(1.0, L);
    } else {
        res.ok = true;
    }
    return res;
}

DiracInterpolant dirac_interpolant(const DiscreteSpacetime& st, const DiscreteMeasure& mu0,
                                   int target, double t) {
    require(st.grid() && st.has_coords(), ErrorKind::Precondition,
            "dirac_interpolant: requires a generated grid spacetime");
    require(t >= 0.0 && t <= 1.0, ErrorKind::Parameter, "dirac_interpolant: t in [0,1]");
    const GridInfo& g = *st.grid();
    DiracInterpolant out;
    std::vector<double> w(static_cast<size_t>(st.n_points()), 0.0);
    // Each source cell contracts to a box of side (1-t) * step around the
    // affine image of its center; the mass lands on lattice cells in
    // proportion to the overlap. Interior densities of the pushforward then
    // reproduce the continuum contraction exactly, confining the
    // discretization unevenness to the boundary ring.
    std::vector<int> lo_cell(static_cast<size_t>(g.dim)), hi_cell(static_cast<size_t>(g.dim));
    for (int x : mu0.support) {
        Vec dest = vadd(vscale(1.0 - t, st.coord(x)), vscale(t, st.coord(target)));
        int z_nominal = g.snap(dest);
        out.assignment.emplace_back(x, z_nominal);
        ExtendedTime lxy = st.ell(x, target);
        if (lxy.is_finite()) {
            double resid = point_residual(st, x, z_nominal, target, t, lxy.value());
            out.max_point_residual = std::max(out.max_point_residual, resid);
        }
        double mass = mu0.weights[static_cast<size_t>(x)];
        // overlap box
        double volume = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            double half = 0.5 * (1.0 - t) * g.step[static_cast<size_t>(a)];
            double blo = dest[static_cast<size_t>(a)] - half;
            double bhi = dest[static_cast<size_t>(a)] + half;
            lo_cell[static_cast<size_t>(a)] = std::max(
                0, static_cast<int>(std::floor((blo - g.lo[static_cast<size_t>(a)]) /
                                               g.step[static_cast<size_t>(a)])));
            hi_cell[static_cast<size_t>(a)] = std::min(
                g.resolution[static_cast<size_t>(a)] - 1,
                static_cast<int>(std::floor((bhi - g.lo[static_cast<size_t>(a)]) /
                                            g.step[static_cast<size_t>(a)])));
            volume *= 2.0 * half;
        }
        if (t >= 1.0 || volume <= 0.0) {
            w[static_cast<size_t>(z_nominal)] += mass;
            continue;
        }
        std::vector<int> cell = lo_cell;
        double deposited = 0.0;
        for (;;) {
            double overlap = 1.0;
            for (int a = 0; a < g.dim; ++a) {
                double half = 0.5 * (1.0 - t) * g.step[static_cast<size_t>(a)];
                double blo = dest[static_cast<size_t>(a)] - half;
                double bhi = dest[static_cast<size_t>(a)] + half;
                double clo = g.lo[static_cast<size_t>(a)] +
                             cell[static_cast<size_t>(a)] * g.step[static_cast<size_t>(a)];
                double chi = clo + g.step[static_cast<size_t>(a)];
                overlap *= std::max(0.0, std::min(bhi, chi) - std::max(blo, clo));
            }
            if (overlap > 0.0) {
                double share = mass * overlap / volume;
                w[static_cast<size_t>(g.index_of_cell(cell))] += share;
                deposited += share;
            }
            int a = g.dim - 1;
            for (; a >= 0; --a) {
                if (++cell[static_cast<size_t>(a)] <= hi_cell[static_cast<size_t>(a)]) break;
                cell[static_cast<size_t>(a)] = lo_cell[static_cast<size_t>(a)];
            }
            if (a < 0) break;
        }
        // clipped overlap (image box leaving the grid) falls back to the
        // nominal cell so no mass is lost
        if (deposited < mass - 1e-15) w[static_cast<size_t>(z_nominal)] += mass - deposited;
    }
    out.measure = DiscreteMeasure::from_weights(std::move(w), 1e-9);
    return out;
}

DiscreteMeasure DiscretePlan::slice(int n_points, size_t k) const {
    std::vector<double> w(static_cast<size_t>(n_points), 0.0);
    for (size_t p = 0; p < paths.size(); ++p)
        w[static_cast<size_t>(paths[p][k])] += weights[p];
    return DiscreteMeasure::from_weights(std::move(w), 1e-9);
}

LiftResult lift_to_plan(const DiscreteSpacetime& st,
                        const std::vector<std::pair<double, DiscreteMeasure>>& interpolation,
                        double q, double atom_floor) {
    require(interpolation.size() >= 2, ErrorKind::Precondition,
            "lift_to_plan: need at least two time slices");
    const size_t K = interpolation.size() - 1;
    for (size_t k = 0; k < interpolation.size(); ++k) {
        double t = interpolation[k].first;
        double scaled = t * (1 << 20);
        require(std::fabs(scaled - std::llround(scaled)) < 1e-9, ErrorKind::Precondition,
                "lift_to_plan: time stamps must be dyadic");
        if (k > 0)
            require(t > interpolation[k - 1].first, ErrorKind::Precondition,
                    "lift_to_plan: time stamps must increase");
    }
    require(interpolation.front().first == 0.0 && interpolation.back().first == 1.0,
            ErrorKind::Precondition, "lift_to_plan: stamps must span [0,1]");

    LiftResult out;
    out.plan.times.resize(interpolation.size());
    for (size_t k = 0; k < interpolation.size(); ++k) out.plan.times[k] = interpolation[k].first;

    std::vector<Coupling> couplings;
    for (size_t k = 0; k < K; ++k) {
        LqResult lq = lq_distance(st, interpolation[k].second, interpolation[k + 1].second, q);
        require(!lq.value.is_neg_inf(), ErrorKind::Precondition,
                "lift_to_plan: consecutive measures not causally related at level " +
                    std::to_string(k));
        couplings.push_back(lq.coupling);
        double dt = interpolation[k + 1].first - interpolation[k].first;
        double lqq = lq.integral.is_finite() ? lq.integral.value() : 0.0;
        out.plan_action_sum += std::pow(dt, 1.0 - q) * lqq / q;
        ExtendedTime lv = lq.value;
        if (lv.is_finite())
            out.dyadic_action_sum += std::pow(dt, 1.0 - q) * std::pow(lv.value(), q) / q;
    }

    // conditional-independence gluing along shared marginals
    std::map<std::vector<int>, double> atoms;
    std::function<void(size_t, std::vector<int>&, double)> walk = [&](size_t level,
                                                                      std::vector<int>& prefix,
                                                                      double mass) {
        if (mass <= atom_floor) return;
        if (level == K) {
            atoms[prefix] += mass;
            return;
        }
        const Coupling& c = couplings[level];
        int x = prefix.back();
        auto rit = std::lower_bound(c.rows.begin(), c.rows.end(), x);
        if (rit == c.rows.end() || *rit != x) return;
        int r = static_cast<int>(rit - c.rows.begin());
        double row_mass = 0.0;
        for (size_t cc = 0; cc < c.cols.size(); ++cc) row_mass += c.at(r, static_cast<int>(cc));
        if (row_mass <= 0.0) return;
        for (size_t cc = 0; cc < c.cols.size(); ++cc) {
            double mcc = c.at(r, static_cast<int>(cc));
            if (mcc <= 0.0) continue;
            prefix.push_back(c.cols[cc]);
            walk(level + 1, prefix, mass * mcc / row_mass);
            prefix.pop_back();
        }
    };
    for (int x0 : interpolation[0].second.support) {
        std::vector<int> prefix{x0};
        walk(0, prefix, interpolation[0].second.weights[static_cast<size_t>(x0)]);
    }
    for (auto& [path, wgt] : atoms) {
        out.plan.paths.push_back(path);
        out.plan.weights.push_back(wgt);
    }

    // slice fidelity
    for (size_t k = 0; k < interpolation.size(); ++k) {
        DiscreteMeasure s = out.plan.slice(st.n_points(), k);
        for (int i = 0; i < st.n_points(); ++i)
            out.slice_residual = std::max(
                out.slice_residual,
                std::fabs(s.weights[static_cast<size_t>(i)] -
                          interpolation[k].second.weights[static_cast<size_t>(i)]));
    }
    for (size_t p = 0; p < out.plan.paths.size(); ++p) {
        ExtendedTime l = st.ell(out.plan.paths[p].front(), out.plan.paths[p].back());
        if (l.is_finite())
            out.endpoint_action_q += out.plan.weights[p] * std::pow(l.value(), q);
    }
    return out;
}

}  // namespace lorentz
