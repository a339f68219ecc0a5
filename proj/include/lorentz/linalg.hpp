#pragma once

#include <cmath>
#include <vector>

#include "lorentz/extended_time.hpp"

namespace lorentz {

/// Dense symmetric matrix stored row-major, sized for small dimensions
/// (norm descriptors, metric tensors).
struct SymMatrix {
    int n = 0;
    std::vector<double> a;  // n*n, row-major

    SymMatrix() = default;
    explicit SymMatrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static SymMatrix diag(const std::vector<double>& d) {
        SymMatrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n; ++i) m(i, i) = d[static_cast<size_t>(i)];
        return m;
    }
};

/// g(x, y) for a symmetric bilinear form.
inline double bilinear(const SymMatrix& g, const std::vector<double>& x,
                       const std::vector<double>& y) {
    double s = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) s += g(i, j) * x[static_cast<size_t>(i)] * y[static_cast<size_t>(j)];
    return s;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues (ascending) and fills the columns of V with eigenvectors.
inline std::vector<double> jacobi_eigen(SymMatrix m, SymMatrix* eigenvectors = nullptr) {
    const int n = m.n;
    SymMatrix v(n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<size_t>(n));
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        eig[static_cast<size_t>(i)] = m(i, i);
        order[static_cast<size_t>(i)] = i;
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (eig[static_cast<size_t>(j)] < eig[static_cast<size_t>(i)]) {
                std::swap(eig[static_cast<size_t>(i)], eig[static_cast<size_t>(j)]);
                std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
            }
    if (eigenvectors) {
        SymMatrix sorted(n);
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) sorted(r, c) = v(r, order[static_cast<size_t>(c)]);
        *eigenvectors = sorted;
    }
    return eig;
}

/// Inverse by Gauss-Jordan with partial pivoting; throws on singularity.
inline SymMatrix invert(const SymMatrix& g, double tol = 1e-12) {
    const int n = g.n;
    std::vector<std::vector<double>> aug(static_cast<size_t>(n),
                                         std::vector<double>(static_cast<size_t>(2 * n), 0.0));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = g(i, j);
        aug[static_cast<size_t>(i)][static_cast<size_t>(n + i)] = 1.0;
    }
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(aug[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::fabs(aug[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
                piv = r;
        require(std::fabs(aug[static_cast<size_t>(piv)][static_cast<size_t>(col)]) > tol,
                ErrorKind::Parameter, "invert: matrix is singular or near-singular");
        std::swap(aug[static_cast<size_t>(col)], aug[static_cast<size_t>(piv)]);
        double d = aug[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (int j = 0; j < 2 * n; ++j) aug[static_cast<size_t>(col)][static_cast<size_t>(j)] /= d;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = aug[static_cast<size_t>(r)][static_cast<size_t>(col)];
            if (f == 0.0) continue;
            for (int j = 0; j < 2 * n; ++j)
                aug[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
                    f * aug[static_cast<size_t>(col)][static_cast<size_t>(j)];
        }
    }
    SymMatrix inv(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug[static_cast<size_t>(i)][static_cast<size_t>(n + j)];
    return inv;
}

}  // namespace lorentz
