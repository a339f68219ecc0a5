#pragma once

#include <vector>

#include "lorentz/transport.hpp"

namespace lorentz {

/// Generalized sine: sin(sqrt(k) x)/sqrt(k) for k > 0, x for k = 0,
/// sinh(sqrt(-k) x)/sqrt(-k) for k < 0.
double sin_kappa(double kappa, double theta);

/// (K, N, t, theta) bundle for the distortion coefficients.
struct DistortionParams {
    double K = 0.0;
    double N = 2.0;   // > 1
    double t = 0.5;   // in [0, 1]
    double theta = 1.0;  // >= 0
};

/// sigma_{K,N}^{(t)}(theta); +inf once K theta^2 >= N pi^2.
ExtendedTime sigma_coeff(const DistortionParams& p);

/// tau_{K,N}^{(t)}(theta) = t^{1/N} sigma_{K,N-1}^{(t)}(theta)^{(N-1)/N}.
ExtendedTime tau_coeff(const DistortionParams& p);

/// d/dr tau_{K,N}^{(r)}(theta) at r = 1 (closed form); domain
/// theta <= pi sqrt((N-1)/K) when K > 0.
double tau_tilde(double K, double N, double theta);

/// d/dr sigma_{K,N}^{(r)}(theta) at r = 1; domain theta <= pi sqrt(N/K)
/// when K > 0.
double sigma_tilde(double K, double N, double theta);

struct EntropyValue {
    double value = 0.0;  // <= 0
    double N = 2.0;
    double singular_mass = 0.0;  // mass on points with zero reference weight
};

/// N-Renyi entropy S_N(mu) = -sum rho_i^{(N-1)/N} m_i over the absolutely
/// continuous part (rho_i = mu_i / m_i); the singular part contributes 0.
EntropyValue renyi_entropy(const DiscreteSpacetime& st, const DiscreteMeasure& mu, double N);

/// F_c(mu) = sum (rho - c)_+ m + singular mass; zero iff mu has density <= c.
double mass_excess(const DiscreteSpacetime& st, const DiscreteMeasure& mu, double c);

enum class TimeDirection { Future, Past };

struct TmcpEntry {
    double t;
    double Nprime;
    double lhs;     // S_{N'}(mu_t)
    double rhs;     // distortion-weighted entropy bound
    double defect;  // rhs - lhs, pass iff >= -tol
};

struct TmcpReport {
    std::vector<TmcpEntry> entries;
    double worst_defect = 0.0;
    bool pass = false;
    bool reduced = false;  // sigma coefficients instead of tau
};

struct TmcpOptions {
    std::vector<double> N_range;  // empty = {N, N+1, 2N}
    double tol = 1e-9;
    bool reduced = false;         // swap tau -> sigma (the starred variant)
};

/// Entropy inequality S_{N'}(mu_t) <= -sum tau^{(1-t)}(ell(x, x1))
/// rho0(x)^{-1/N'} mu0(x) along a given interpolation toward (future) or
/// from (past) a Dirac target; the past variant uses tau^{(t)}(ell(x0, x))
/// against the t = 1 density.
TmcpReport tmcp_check(const DiscreteSpacetime& st,
                      const std::vector<std::pair<double, DiscreteMeasure>>& geodesic, int target,
                      double K, double N, TimeDirection direction, const TmcpOptions& opts = {});

/// Diffuse-target variant: the distortion bound is integrated against an
/// optimal coupling between the reference slice and the target measure
/// (which must be chronological on its support).
TmcpReport tmcp_check(const DiscreteSpacetime& st,
                      const std::vector<std::pair<double, DiscreteMeasure>>& geodesic,
                      const DiscreteMeasure& target, double K, double N, double q,
                      TimeDirection direction, const TmcpOptions& opts = {});

struct GoodGeodesicStep {
    double t;               // time of this slice (1 - s index)
    DiscreteMeasure nu;
    double max_density;
    double density_bound;   // contraction density cap for this slice
    double entropy_defect;  // bound - S_N, pass iff >= -tol
    int redistribution_moves = 0;
};

struct GoodGeodesicReport {
    std::vector<GoodGeodesicStep> steps;
    bool density_ok = false;
    bool entropy_ok = false;
    bool geodesy_ok = false;
    double worst_geodesy_defect = 0.0;  // min over pairs of lower-bound slack
    double ell_q_total = 0.0;           // ell_q(mu0, dirac)
    bool ok = false;
    int failed_cell = -1;  // density violation survivor when not ok
};

struct GoodGeodesicOptions {
    double tol = 1e-9;
    double fiber_slack = -1.0;  // admissible Z residual for redistribution; <0 = auto
    int max_moves = 10000;
    double density_margin = -1.0;  // relative slack on the density cap; <0 = auto (grid h based)
    std::vector<double> N_range;   // for the entropy certificates
};

/// Constructs nu_{(1-lambda)^k} for k <= depth by moving mass along the
/// optimal (product) coupling toward the Dirac target, snapping to lattice
/// cells and greedily redistributing over-dense mass inside intermediate
/// fibers. The report re-verifies geodesy lower bounds (via the explicit
/// transport couplings), the density cap, and the entropy inequality.
GoodGeodesicReport good_geodesic(const DiscreteSpacetime& st, const DiscreteMeasure& mu0,
                                 int x1, double K, double N, double q, double lambda, int depth,
                                 const GoodGeodesicOptions& opts = {});

}  // namespace lorentz
