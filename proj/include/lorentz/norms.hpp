#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorentz/extended_time.hpp"
#include "lorentz/linalg.hpp"

namespace lorentz {

using Vec = std::vector<double>;

/// Conjugate exponent pair 0 != q < 1, 1/p + 1/q = 1.
struct DualityParams {
    double q = 0.5;
    double p = -1.0;

    static DualityParams from_q(double q);
    static DualityParams from_p(double p);
    /// |1/p + 1/q - 1|, must be <= 1e-12.
    double conjugacy_residual() const { return std::fabs(1.0 / p + 1.0 / q - 1.0); }
};

enum class SignatureClass { PositiveDefinite, Lorentzian, Other };

/// A positively 1-homogeneous concave "norm" on R^n with values in
/// {-inf} ∪ [0, +inf). The future cone is F = {n >= 0}. Two families:
///
///   minkowski(g):  n(v) = sqrt(g(v,v)) for future-directed causal v,
///                  -inf otherwise; g has signature (+,-,...,-).
///   lp(p):         n(v) = (v_1^p - sum_{i>=2} |v_i|^p)^(1/p) when
///                  v_1^p >= sum |v_i|^p and v_1 >= 0, -inf otherwise.
///
/// Future-directedness for the minkowski kind is fixed by the orientation
/// vector e0 (eigenvector of the unique positive eigenvalue of g), so the
/// choice is deterministic given g.
class HyperbolicNorm {
public:
    enum class Kind { Minkowski, Lp };

    static HyperbolicNorm minkowski(const SymMatrix& g);
    /// Standard Minkowski norm diag(1,-1,...,-1) on R^dim.
    static HyperbolicNorm minkowski_standard(int dim);
    static HyperbolicNorm lp(double p, int dim);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double lp_exponent() const { return p_; }
    const SymMatrix& metric() const;
    const SymMatrix& dual_metric() const;
    const Vec& time_orientation() const { return e0_; }

    /// n(v): nonnegative on the future cone, -inf off it.
    ExtendedTime eval(const Vec& v) const;

    bool in_future_cone(const Vec& v) const { return !eval(v).is_neg_inf(); }

    /// g(v, w) for the minkowski kind.
    double pairing(const Vec& v, const Vec& w) const;

    /// Dual norm of a covector, minkowski kind only (g* = g^{-1}).
    ExtendedTime dual_eval(const Vec& zeta) const;

    /// L(v) = n(v)^q / q on the future cone, -inf off it. Uses 0^q = +inf
    /// for q < 0.
    ExtendedTime lagrangian(const DualityParams& params, const Vec& v) const;

    /// H(zeta) = n*(zeta)^p / p for future-directed causal covectors.
    ExtendedTime hamiltonian(const DualityParams& params, const Vec& zeta) const;

    /// zeta(v) - n(v)^q/q - n*(zeta)^p/p; nonnegative for future-directed
    /// causal v, zeta, zero exactly on Legendre-aligned pairs.
    double fenchel_young_gap(const DualityParams& params, const Vec& v, const Vec& zeta) const;

    /// The aligned covector DL(v) = n(v)^{q-2} v-flat attaining equality.
    Vec legendre_dual(const DualityParams& params, const Vec& v) const;

    /// (x, y) := (|x+y|^2 - |x|^2 - |y|^2) / 2 for x, y in the future cone.
    double polarize(const Vec& x, const Vec& y) const;

    /// |x+2y|^2 + |x|^2 - 2|x+y|^2 - 2|y|^2; vanishes for all future pairs
    /// iff the norm is positively polarizable.
    double parallelogram_defect(const Vec& x, const Vec& y) const;

private:
    HyperbolicNorm() = default;
    Kind kind_ = Kind::Lp;
    int dim_ = 0;
    double p_ = 2.0;
    SymMatrix g_;
    SymMatrix g_inv_;
    Vec e0_;  // time orientation (minkowski kind)
};

/// Classifies a symmetric nondegenerate form by eigenvalue signs and
/// cross-checks the classification against sampled (reverse) triangle
/// inequalities on the positive cone.
struct SignatureReport {
    SignatureClass eigen_class = SignatureClass::Other;
    int positive = 0;
    int negative = 0;
    // Sampled-cone evidence: counts of violations among sampled pairs.
    int triangle_violations = 0;
    int reverse_triangle_violations = 0;
    int samples = 0;
    bool consistent = false;  // eigen classification agrees with sampling
};

SignatureReport signature_diagnostic(const SymMatrix& g, int samples = 2000,
                                     std::uint64_t seed = 20240901, double tol = 1e-9);

// small vector helpers shared across modules
inline Vec vsub(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}
inline Vec vadd(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline Vec vscale(double c, const Vec& a) {
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

}  // namespace lorentz
