#pragma once

#include <map>
#include <vector>

#include "lorentz/curves.hpp"
#include "lorentz/spacetime.hpp"

namespace lorentz {

/// Probability measure on the points of a DiscreteSpacetime.
struct DiscreteMeasure {
    std::vector<double> weights;  // length n, nonnegative, sums to 1 (1e-12)
    std::vector<int> support;     // indices with positive weight, ascending

    static DiscreteMeasure from_weights(std::vector<double> w, double tol = 1e-12);
    static DiscreteMeasure dirac(int n, int at);
    static DiscreteMeasure uniform_on(int n, const std::vector<int>& pts,
                                      const std::vector<double>& m_weights);
    double mass() const;
};

/// Causal coupling between two measures: entries over support(mu) x
/// support(nu), concentrated on {ell >= 0}.
struct Coupling {
    std::vector<int> rows, cols;       // support indices of mu, nu
    std::vector<double> pi;            // rows.size() * cols.size(), row-major
    double at(int r, int c) const { return pi[static_cast<size_t>(r) * cols.size() + c]; }
    double& at(int r, int c) { return pi[static_cast<size_t>(r) * cols.size() + c]; }
    double marginal_residual(const DiscreteMeasure& mu, const DiscreteMeasure& nu) const;
};

struct LqResult {
    ExtendedTime value;            // ell_q(mu, nu); -inf when no causal coupling exists
    Coupling coupling;             // maximizer (meaningful when value > -inf)
    ExtendedTime integral;         // \int ell^q dpi at the optimum
    bool degenerate = false;       // q < 0 and every causal coupling hits a null pair
    double optimality_residual = 0.0;  // complementary slackness residual
    bool feasible = false;
};

struct TransportOptions {
    double marginal_tol = 1e-10;
    double optimality_tol = 1e-9;
    long long max_pivots = 0;  // 0 = automatic
};

/// q-Lorentz-Wasserstein distance sup_pi [ \int ell^q dpi ]^{1/q} over causal
/// couplings, solved exactly by a transportation network simplex on the
/// causal bipartite graph (non-causal arcs are structurally absent).
LqResult lq_distance(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double q, const TransportOptions& opts = {});

/// ell_q(mu,nu) - ell_q(mu,xi) - ell_q(xi,nu) under the infinity
/// conventions; nonnegative up to solver tolerance.
ExtendedTime reverse_triangle_lq(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& xi, const DiscreteMeasure& nu, double q);

struct CycleViolation {
    std::vector<int> order;  // permutation applied to the y side
    double lhs, rhs;
};

struct CyclicalMonotonicityReport {
    bool monotone = true;
    bool exhaustive = true;
    long long cycles_checked = 0;
    std::vector<CycleViolation> violations;
    std::vector<size_t> nonchronological_pairs;  // inputs with ell <= 0
};

/// Checks (1/q) sum ell(x_i,y_i)^q >= (1/q) sum ell(x_{i+1 mod n}, y_i)^q
/// over cyclic shifts; exhaustive shifts for n <= 8, seeded random
/// permutations above.
CyclicalMonotonicityReport cyclical_monotonicity_check(
    const DiscreteSpacetime& st, const std::vector<std::pair<int, int>>& pairs, double q,
    double tol = 1e-9, int random_trials = 2000, std::uint64_t seed = 20240901);

/// Potential values per point (extended reals) with its exponent.
struct KantorovichPotential {
    std::vector<ExtendedTime> f;
    double q = 0.5;
};

/// f^{(ell^q/q)}(y) = sup_{x <= y} [ f(x) + ell(x,y)^q / q ], exact
/// enumeration; sup over the empty set is -inf.
KantorovichPotential kantorovich_transform(const DiscreteSpacetime& st,
                                           const KantorovichPotential& f);

/// All pairs x <= y with f transform attained finitely at x (within tol).
std::vector<std::pair<int, int>> superdifferential(const DiscreteSpacetime& st,
                                                   const KantorovichPotential& f,
                                                   double tol = 1e-9);

struct DualityGapResult {
    bool defined = false;  // false when ell_q = -inf or integrals diverge
    double gap = 0.0;      // (1/q) ell_q^q - ( \int f^T dnu - \int f dmu )
    double primal = 0.0;
    double dual = 0.0;
};

/// Weak duality bounds the primal by the dual, so gap <= tol always; f is a
/// strong Kantorovich potential iff |gap| <= tol.
DualityGapResult duality_gap(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                             const DiscreteMeasure& nu, const KantorovichPotential& f);

struct IntermediateResult {
    DiscreteMeasure xi;
    Coupling first_leg;    // mu -> xi
    Coupling second_leg;   // xi -> nu
    double max_point_residual = 0.0;  // worst Z_t equality deviation over pairs
    double leg1_defect = 0.0;         // ell_q(mu,xi) - t * ell_q(mu,nu)
    double leg2_defect = 0.0;         // ell_q(xi,nu) - (1-t) * ell_q(mu,nu)
    bool ok = false;
    std::vector<std::pair<int, int>> failed_pairs;  // pairs with no admissible point
    std::string note;
};

struct IntermediateOptions {
    double point_tol = -1.0;  // admissible Z_t residual; <0 = auto (grid-scaled)
    double leg_tol = -1.0;    // tolerance on the two leg identities; <0 = auto
    bool verify_legs = true;  // re-solve ell_q for both legs (desk-scale only)
};

/// t-intermediate point measure built from an optimal coupling by moving
/// each support pair to a (near-)intermediate point; on generated grids the
/// nearest lattice point to the affine interpolant.
IntermediateResult intermediate_measure(const DiscreteSpacetime& st, const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu, double t, double q,
                                        const IntermediateOptions& opts = {});

/// Cheap interpolant toward a Dirac target on a generated grid: pushes mass
/// along straight lines and snaps to the lattice; no transport solve.
struct DiracInterpolant {
    DiscreteMeasure measure;
    double max_point_residual = 0.0;
    /// per source-point target cell (for fiber bookkeeping)
    std::vector<std::pair<int, int>> assignment;  // (source, landing cell)
};
DiracInterpolant dirac_interpolant(const DiscreteSpacetime& st, const DiscreteMeasure& mu0,
                                   int target, double t);

/// Dynamical plan: weighted path atoms whose slices are discrete measures.
struct DiscretePlan {
    std::vector<std::vector<int>> paths;  // point index per time stamp
    std::vector<double> weights;
    std::vector<double> times;  // shared time stamps

    DiscreteMeasure slice(int n_points, size_t k) const;
};

struct LiftResult {
    DiscretePlan plan;
    double slice_residual = 0.0;      // worst slice-vs-input deviation
    double endpoint_action_q = 0.0;   // sum w * ell(g0,g1)^q
    double dyadic_action_sum = 0.0;   // sum_k (1/q) ell_q(mu_k, mu_{k+1})^q dt^{1-q}
    double plan_action_sum = 0.0;     // sum_k (1/q) int ell^q dpi_k dt^{1-q}
};

/// Lifts a dyadic interpolation (t_k, mu_k) to a measure on paths by gluing
/// per-level optimal couplings along shared marginals (conditional
/// independence disintegration). Slices reproduce the inputs exactly.
LiftResult lift_to_plan(const DiscreteSpacetime& st,
                        const std::vector<std::pair<double, DiscreteMeasure>>& interpolation,
                        double q, double atom_floor = 1e-13);

}  // namespace lorentz
