#include "lorentz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lorentz {

DualityParams DualityParams::from_q(double q) {
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter,
            "DualityParams: q must satisfy 0 != q < 1");
    DualityParams d;
    d.q = q;
    d.p = q / (q - 1.0);
    require(d.conjugacy_residual() <= 1e-12, ErrorKind::Numerical,
            "DualityParams: conjugacy identity failed");
    return d;
}

DualityParams DualityParams::from_p(double p) {
    require(p != 0.0 && p < 1.0, ErrorKind::Parameter,
            "DualityParams: p must satisfy 0 != p < 1");
    DualityParams d;
    d.p = p;
    d.q = p / (p - 1.0);
    require(d.conjugacy_residual() <= 1e-12, ErrorKind::Numerical,
            "DualityParams: conjugacy identity failed");
    return d;
}

HyperbolicNorm HyperbolicNorm::minkowski(const SymMatrix& g) {
    HyperbolicNorm n;
    n.kind_ = Kind::Minkowski;
    n.dim_ = g.n;
    n.g_ = g;
    SymMatrix vecs;
    std::vector<double> eig = jacobi_eigen(g, &vecs);
    int pos = 0, neg = 0;
    for (double e : eig) {
        if (e > 1e-12) ++pos;
        if (e < -1e-12) ++neg;
    }
    require(pos == 1 && neg == g.n - 1, ErrorKind::Parameter,
            "HyperbolicNorm: metric must have signature (+,-,...,-)");
    // eigenvalues sorted ascending, so the positive one sits last
    n.e0_.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) n.e0_[static_cast<size_t>(i)] = vecs(i, g.n - 1);
    // deterministic sign: first nonzero component positive
    for (double c : n.e0_) {
        if (std::fabs(c) > 1e-14) {
            if (c < 0)
                for (double& x : n.e0_) x = -x;
            break;
        }
    }
    n.g_inv_ = invert(g);
    return n;
}

HyperbolicNorm HyperbolicNorm::minkowski_standard(int dim) {
    require(dim >= 2, ErrorKind::Parameter, "minkowski_standard: dim >= 2 required");
    std::vector<double> d(static_cast<size_t>(dim), -1.0);
    d[0] = 1.0;
    return minkowski(SymMatrix::diag(d));
}

HyperbolicNorm HyperbolicNorm::lp(double p, int dim) {
    require(p >= 1.0, ErrorKind::Parameter, "HyperbolicNorm: lp exponent must be >= 1");
    require(dim >= 2, ErrorKind::Parameter, "HyperbolicNorm: lp dim >= 2 required");
    HyperbolicNorm n;
    n.kind_ = Kind::Lp;
    n.dim_ = dim;
    n.p_ = p;
    return n;
}

const SymMatrix& HyperbolicNorm::metric() const {
    require(kind_ == Kind::Minkowski, ErrorKind::Parameter,
            "metric(): only defined for the minkowski kind");
    return g_;
}

const SymMatrix& HyperbolicNorm::dual_metric() const {
    require(kind_ == Kind::Minkowski, ErrorKind::Parameter,
            "dual_metric(): unsupported duality for the lp kind");
    return g_inv_;
}

ExtendedTime HyperbolicNorm::eval(const Vec& v) const {
    require(static_cast<int>(v.size()) == dim_, ErrorKind::Structural,
            "HyperbolicNorm::eval: dimension mismatch");
    if (kind_ == Kind::Minkowski) {
        double q = bilinear(g_, v, v);
        if (q < 0.0) return ExtendedTime::neg_inf();
        double orient = 0.0;
        for (int i = 0; i < dim_; ++i) orient += v[static_cast<size_t>(i)] * e0_[static_cast<size_t>(i)];
        bool zero = true;
        for (double c : v)
            if (c != 0.0) { zero = false; break; }
        if (zero) return ExtendedTime(0.0);
        if (orient <= 0.0) return ExtendedTime::neg_inf();
        return ExtendedTime(std::sqrt(q));
    }
    // lp kind
    double v1 = v[0];
    if (v1 < 0.0) return ExtendedTime::neg_inf();
    if (p_ == 2.0) {
        // bit-identical to the Minkowski formula
        double s = v1 * v1;
        for (int i = 1; i < dim_; ++i) s -= v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
        if (s < 0.0) return ExtendedTime::neg_inf();
        return ExtendedTime(std::sqrt(s));
    }
    double head = std::pow(v1, p_);
    double tail = 0.0;
    for (int i = 1; i < dim_; ++i) tail += std::pow(std::fabs(v[static_cast<size_t>(i)]), p_);
    if (head < tail) return ExtendedTime::neg_inf();
    return ExtendedTime(std::pow(head - tail, 1.0 / p_));
}

double HyperbolicNorm::pairing(const Vec& v, const Vec& w) const {
    require(kind_ == Kind::Minkowski, ErrorKind::Parameter,
            "pairing(): only defined for the minkowski kind");
    return bilinear(g_, v, w);
}

ExtendedTime HyperbolicNorm::dual_eval(const Vec& zeta) const {
    require(kind_ == Kind::Minkowski, ErrorKind::Parameter,
            "dual_eval(): unsupported duality for the lp kind");
    require(static_cast<int>(zeta.size()) == dim_, ErrorKind::Structural,
            "dual_eval: dimension mismatch");
    double q = bilinear(g_inv_, zeta, zeta);
    if (q < 0.0) return ExtendedTime::neg_inf();
    // zeta is future-directed iff its sharp is
    Vec sharp(static_cast<size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) sharp[static_cast<size_t>(i)] += g_inv_(i, j) * zeta[static_cast<size_t>(j)];
    double orient = 0.0;
    for (int i = 0; i < dim_; ++i) orient += sharp[static_cast<size_t>(i)] * e0_[static_cast<size_t>(i)];
    bool zero = true;
    for (double c : zeta)
        if (c != 0.0) { zero = false; break; }
    if (zero) return ExtendedTime(0.0);
    if (orient <= 0.0) return ExtendedTime::neg_inf();
    return ExtendedTime(std::sqrt(q));
}

ExtendedTime HyperbolicNorm::lagrangian(const DualityParams& params, const Vec& v) const {
    ExtendedTime n = eval(v);
    if (n.is_neg_inf()) return ExtendedTime::neg_inf();
    return pow_q_over_q(n, params.q);
}

ExtendedTime HyperbolicNorm::hamiltonian(const DualityParams& params, const Vec& zeta) const {
    ExtendedTime n = dual_eval(zeta);
    if (n.is_neg_inf()) return ExtendedTime::neg_inf();
    return pow_q_over_q(n, params.p);
}

double HyperbolicNorm::fenchel_young_gap(const DualityParams& params, const Vec& v,
                                         const Vec& zeta) const {
    ExtendedTime nv = eval(v);
    ExtendedTime nz = dual_eval(zeta);
    require(!nv.is_neg_inf() && !nz.is_neg_inf(), ErrorKind::Precondition,
            "fenchel_young_gap: inputs must be future-directed causal");
    double pair = 0.0;
    for (int i = 0; i < dim_; ++i) pair += zeta[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
    ExtendedTime lhs = pow_q_over_q(nv, params.q) + pow_q_over_q(nz, params.p);
    require(lhs.is_finite(), ErrorKind::Precondition,
            "fenchel_young_gap: null input with negative exponent");
    return pair - lhs.value();
}

Vec HyperbolicNorm::legendre_dual(const DualityParams& params, const Vec& v) const {
    require(kind_ == Kind::Minkowski, ErrorKind::Parameter,
            "legendre_dual: minkowski kind required");
    ExtendedTime nv = eval(v);
    require(nv.is_finite() && nv.value() > 0.0, ErrorKind::Precondition,
            "legendre_dual: v must be future-directed timelike");
    double scale = std::pow(nv.value(), params.q - 2.0);
    Vec flat(static_cast<size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) flat[static_cast<size_t>(i)] += g_(i, j) * v[static_cast<size_t>(j)];
    return vscale(scale, flat);
}

double HyperbolicNorm::polarize(const Vec& x, const Vec& y) const {
    ExtendedTime nx = eval(x);
    ExtendedTime ny = eval(y);
    require(!nx.is_neg_inf() && !ny.is_neg_inf(), ErrorKind::Precondition,
            "polarize: arguments must lie in the future cone");
    ExtendedTime ns = eval(vadd(x, y));
    // superadditivity keeps x+y in the cone
    double s = ns.value(), a = nx.value(), b = ny.value();
    return 0.5 * (s * s - a * a - b * b);
}

double HyperbolicNorm::parallelogram_defect(const Vec& x, const Vec& y) const {
    ExtendedTime nx = eval(x);
    ExtendedTime ny = eval(y);
    require(!nx.is_neg_inf() && !ny.is_neg_inf(), ErrorKind::Precondition,
            "parallelogram_defect: arguments must lie in the future cone");
    auto sq = [&](const Vec& v) {
        double n = eval(v).value();
        return n * n;
    };
    return sq(vadd(x, vscale(2.0, y))) + nx.value() * nx.value() - 2.0 * sq(vadd(x, y)) -
           2.0 * ny.value() * ny.value();
}

SignatureReport signature_diagnostic(const SymMatrix& g, int samples, std::uint64_t seed,
                                     double tol) {
    const int n = g.n;
    std::vector<double> eig = jacobi_eigen(g);
    double det = 1.0;
    for (double e : eig) det *= e;
    require(std::fabs(det) > tol, ErrorKind::Parameter,
            "signature_diagnostic: form is degenerate");
    SignatureReport rep;
    for (double e : eig) {
        if (e > 0) ++rep.positive;
        else ++rep.negative;
    }
    if (rep.positive == n) rep.eigen_class = SignatureClass::PositiveDefinite;
    else if (rep.positive == 1) rep.eigen_class = SignatureClass::Lorentzian;
    else rep.eigen_class = SignatureClass::Other;

    // Sampled criterion: draw pairs from the positive cone C = {g(v,v) > 0}
    // and count violations of each triangle inequality for |v| = sqrt(g(v,v)).
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto draw_cone = [&]() -> std::optional<Vec> {
        for (int tries = 0; tries < 200; ++tries) {
            Vec v(static_cast<size_t>(n));
            for (double& c : v) c = unif(rng);
            if (bilinear(g, v, v) > 1e-6) return v;
        }
        return std::nullopt;
    };
    for (int s = 0; s < samples; ++s) {
        auto va = draw_cone();
        auto vb = draw_cone();
        if (!va || !vb) break;
        // keep the pair in one cone component: flip vb if the mixed pairing
        // with va is negative and both are timelike (heuristic alignment)
        Vec a = *va, b = *vb;
        if (bilinear(g, a, b) < 0.0) {
            Vec nb = vscale(-1.0, b);
            if (bilinear(g, a, nb) > bilinear(g, a, b)) b = nb;
        }
        double na = std::sqrt(bilinear(g, a, a));
        double nb2 = bilinear(g, b, b);
        if (nb2 <= 0) continue;
        double nb = std::sqrt(nb2);
        double ns2 = bilinear(g, vadd(a, b), vadd(a, b));
        if (ns2 < 0) {
            // sum left the cone: reverse triangle |a+b| >= |a|+|b| fails
            ++rep.reverse_triangle_violations;
            ++rep.samples;
            continue;
        }
        double ns = std::sqrt(ns2);
        if (ns > na + nb + tol) ++rep.triangle_violations;
        if (ns < na + nb - tol) ++rep.reverse_triangle_violations;
        ++rep.samples;
    }
    bool tri_ok = rep.triangle_violations == 0;
    bool rev_ok = rep.reverse_triangle_violations == 0;
    switch (rep.eigen_class) {
        case SignatureClass::PositiveDefinite: rep.consistent = tri_ok; break;
        case SignatureClass::Lorentzian: rep.consistent = rev_ok; break;
        case SignatureClass::Other: rep.consistent = !tri_ok && !rev_ok; break;
    }
    return rep;
}

}  // namespace lorentz
