#pragma once

#include <functional>
#include <vector>

#include "lorentz/curvature.hpp"
#include "lorentz/transport.hpp"

namespace lorentz {

/// Pointwise function values on a DiscreteSpacetime (extended reals).
using PointFunction = std::vector<ExtendedTime>;

struct CausalityViolation {
    int x, y;
    ExtendedTime fx, fy;
};

/// All causal pairs x <= y with f(x) > f(y); empty iff f is causal.
std::vector<CausalityViolation> causality_check(const DiscreteSpacetime& st,
                                                const PointFunction& f);

/// Forward/backward slopes on a k-nearest causal competitor filtration.
/// Function values enter directly (the semicontinuous envelopes collapse on
/// finite instances); 0/0 (no competitor) yields +inf.
struct SlopeField {
    std::vector<int> k_schedule;
    // per k: slope value per point
    std::vector<std::vector<ExtendedTime>> fwd, bwd, st;
};

struct SlopeOptions {
    std::vector<int> k_schedule = {4, 8, 16};
};

SlopeField slopes(const DiscreteSpacetime& st, const PointFunction& f,
                  const SlopeOptions& opts = {});

struct SteepnessViolation {
    int x, y;
    ExtendedTime lhs;  // f(y) - f(x)
    ExtendedTime rhs;  // L * ell(x,y)
};

/// Pairs in region x region violating f(y) - f(x) >= L ell(x,y). Unrelated
/// pairs (ell = -inf) are unconstrained for every L >= 0, matching the
/// equivalence "0-steep iff causal".
std::vector<SteepnessViolation> steepness_check(const DiscreteSpacetime& st,
                                                const PointFunction& f, double L,
                                                const std::vector<int>& region,
                                                double tol = 1e-12);

enum class ExtensionMode { Lower, Upper };

/// McShane extension of an L-steep function given on W: the lower extension
/// sup{ f(x) + L ell(x,y) } or the upper inf{ f(y) - L ell(x,y) }. Both are
/// L-steep, agree with f on W, and sandwich every L-steep extension.
PointFunction mcshane_extend(const DiscreteSpacetime& st, const std::vector<int>& W,
                             const PointFunction& f_on_W, double L, ExtensionMode mode);

struct DualityFormulaResult {
    ExtendedTime ell_value;
    ExtendedTime inf_over_candidates;
    int argmin = -1;
    std::vector<int> rejected;  // non-causal candidates
};

/// inf over given causal unit-steep candidates of f(y) - f(x) against
/// ell(x,y); the inf never dips below ell, and including the McShane
/// extension of ell(x, .) attains it.
DualityFormulaResult duality_formula_check(const DiscreteSpacetime& st, int x, int y,
                                           const std::vector<PointFunction>& candidates,
                                           double tol = 1e-9);

/// Null distance induced by a strictly causal real-valued f: shortest path
/// in the symmetrized causal graph with edge weight |f(b) - f(a)|.
/// Disconnected pairs give +inf.
double null_distance(const DiscreteSpacetime& st, const PointFunction& f, int x, int y);

/// All-pairs variant (one Dijkstra sweep per source).
std::vector<std::vector<double>> null_distance_all(const DiscreteSpacetime& st,
                                                   const PointFunction& f);

struct PerturbationReport {
    double largest_eps = 0.0;           // largest scheduled eps with f + eps g causal
    double largest_eps_sym = 0.0;       // largest eps with both signs causal
    bool member = false;                // some scheduled eps works
    bool symmetric_member = false;
    bool star_shaped = true;            // smaller scheduled eps also pass
};

PerturbationReport perturbation_membership(const DiscreteSpacetime& st, const PointFunction& f,
                                           const PointFunction& g,
                                           const std::vector<double>& eps_schedule);

// ---------------------------------------------------------------------------
// Analytic Minkowski model: closed-form functions on R^{1,k} with gradients,
// used where the smooth compatibility results provide exact values of |df|.
// ---------------------------------------------------------------------------

struct ModelFunction {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;  // coordinate gradient (d f / d x^mu)
};

/// |df| = ||df||_* on the model: sqrt(g*(df, df)) when df is
/// future-directed causal, -inf otherwise (f not causal at that point).
ExtendedTime model_subslope(const HyperbolicNorm& minkowski, const ModelFunction& f, const Vec& x);

struct VerticalQuotientRow {
    Vec point;
    std::vector<double> quotients;  // one per eps, -inf encoded as -HUGE_VAL
    double extrapolated;            // Richardson limit from the two smallest eps
    double analytic;                // dg(grad f) |df|^{p-2} via the smooth pairing
    bool monotone = true;           // nonincreasing in eps
};

struct VerticalQuotientResult {
    std::vector<double> eps_schedule;  // descending
    std::vector<VerticalQuotientRow> rows;
    bool all_monotone = true;
};

/// Vertical right differential quotients (|d(f+eps g)|^p - |df|^p)/(p eps)
/// at sample points, certified nonincreasing in eps, with the analytic
/// pairing g*(df, dg) ||df||^{p-2} as the limit cross-check. Non-causal
/// f + eps g at some eps makes that eps's quotient -inf.
VerticalQuotientResult vertical_quotient(const HyperbolicNorm& minkowski, const ModelFunction& f,
                                         const ModelFunction& g, double p,
                                         std::vector<double> eps_schedule,
                                         const std::vector<Vec>& sample_points);

/// Smooth compactly supported radial bump: amplitude * exp(1 - 1/(1-s^2))
/// for s = |x - center| / radius < 1, else 0.
ModelFunction bump_function(Vec center, double radius, double amplitude);

enum class ComparisonForm { PowerPotential, LorentzDistance };

struct WeakFormLevel {
    int resolution;
    double lhs, rhs, defect;  // future: defect = rhs - lhs; past: lhs - rhs
};

struct WeakFormReport {
    std::vector<WeakFormLevel> levels;
    bool defect_decreasing = false;
    double final_relative_defect = 0.0;
    bool inequality_ok = false;  // defect >= -tol at every level
};

struct DalembertOptions {
    std::vector<int> resolution_schedule = {16, 32, 64};
    double tol_rel = 2e-2;  // pass threshold on |defect|/|rhs| at the finest level
    double box_halfwidth = -1.0;  // spatial half-extent of the quadrature box; <0 = auto
};

/// Weak-form p-d'Alembert comparison on the flat model: quadrature of
/// d+phi(grad f)|df|^{p-2} against the distortion-coefficient bound, for the
/// power potential (+-(1/q) ell^q) or the Lorentz distance (+-ell), future
/// cone I^-(o) or past cone I^+(o). The lp model has no smooth gradient
/// oracle and is rejected.
WeakFormReport dalembert_verify(NormFamily family, int dim, const Vec& origin, double p, double q,
                                double K, double N, ComparisonForm form, TimeDirection direction,
                                const std::vector<ModelFunction>& test_functions,
                                const DalembertOptions& opts = {});

/// Convenience: a bump family admissible for the given cone (compact
/// support strictly inside, two-cell margin at the coarsest resolution).
std::vector<ModelFunction> default_bump_family(int dim, const Vec& origin,
                                               TimeDirection direction, int coarsest_resolution,
                                               double box_halfwidth);

struct BrenierCheckResult {
    double max_rel_deviation_analytic = 0.0;  // symbolic route vs exponent identity
    double max_rel_deviation_grid = 0.0;      // discrete backward slope vs ell^{q-1}
    int grid_points_checked = 0;
};

/// Metric Brenier identity along transport rays to a Dirac target:
/// |d f^o|(x) = ell(x, o)^{q-1}, via the analytic gradient on the model and
/// via discrete backward slopes on the grid.
BrenierCheckResult metric_brenier_check(const DiscreteSpacetime& grid_st,
                                        const DiscreteMeasure& mu0, int target, double q,
                                        const SlopeOptions& slope_opts = {});

struct CalculusRulesReport {
    double concavity_worst = 0.0;      // min over samples of |d(af+bg)| - a|df| - b|dg|
    double chain_rule_worst = 0.0;     // max |d(phi.f)| - phi'(f)|df| deviation
    double homogeneity_worst = 0.0;    // max |d(lambda f)| - lambda |df| deviation
    double leibniz_worst = 0.0;        // min |d(fg)| - f|dg| - g|df|
    bool concavity_ok = false, chain_ok = false, homogeneity_ok = false, leibniz_ok = false;
};

/// Pointwise calculus rules on the analytic model: concavity and Leibniz as
/// inequalities, chain rule and positive 1-homogeneity as equalities.
CalculusRulesReport calculus_rules_check(const HyperbolicNorm& minkowski, const ModelFunction& f,
                                         const ModelFunction& g,
                                         const std::function<double(double)>& phi,
                                         const std::function<double(double)>& phi_prime,
                                         const std::vector<Vec>& samples, double tol = 1e-9);

}  // namespace lorentz
