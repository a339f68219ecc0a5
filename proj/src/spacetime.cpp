#include "lorentz/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lorentz {

int GridInfo::index_of_cell(const std::vector<int>& cell) const {
    int idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * resolution[static_cast<size_t>(a)] + cell[static_cast<size_t>(a)];
    return idx;
}

std::vector<int> GridInfo::cell_of_index(int idx) const {
    std::vector<int> cell(static_cast<size_t>(dim));
    for (int a = dim - 1; a >= 0; --a) {
        cell[static_cast<size_t>(a)] = idx % resolution[static_cast<size_t>(a)];
        idx /= resolution[static_cast<size_t>(a)];
    }
    return cell;
}

Vec GridInfo::center(const std::vector<int>& cell) const {
    Vec x(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a)
        x[static_cast<size_t>(a)] =
            lo[static_cast<size_t>(a)] + (cell[static_cast<size_t>(a)] + 0.5) * step[static_cast<size_t>(a)];
    return x;
}

int GridInfo::snap(const Vec& x) const {
    std::vector<int> cell(static_cast<size_t>(dim));
    for (int a = 0; a < dim; ++a) {
        double u = (x[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)]) / step[static_cast<size_t>(a)] - 0.5;
        int c = static_cast<int>(std::lround(u));
        c = std::max(0, std::min(resolution[static_cast<size_t>(a)] - 1, c));
        cell[static_cast<size_t>(a)] = c;
    }
    return index_of_cell(cell);
}

double GridInfo::max_step() const {
    double h = 0.0;
    for (double s : step) h = std::max(h, s);
    return h;
}

DiscreteSpacetime DiscreteSpacetime::from_matrix(std::vector<ExtendedTime> ell,
                                                 std::vector<double> m_weights,
                                                 std::optional<std::vector<Vec>> coords,
                                                 std::vector<std::string> labels) {
    DiscreteSpacetime st;
    size_t n = m_weights.size();
    require(n > 0, ErrorKind::Structural, "spacetime: needs at least one point");
    require(ell.size() == n * n, ErrorKind::Structural,
            "spacetime: ell matrix size does not match weight count");
    for (double w : m_weights)
        require(w >= 0.0 && std::isfinite(w), ErrorKind::Structural,
                "spacetime: weights must be finite and nonnegative");
    if (coords) {
        require(coords->size() == n, ErrorKind::Structural,
                "spacetime: coords row count does not match weight count");
        for (const Vec& c : *coords)
            require(c.size() == (*coords)[0].size(), ErrorKind::Structural,
                    "spacetime: ragged coords");
        st.coords_ = std::move(*coords);
    }
    if (!labels.empty())
        require(labels.size() == n, ErrorKind::Structural,
                "spacetime: label count does not match weight count");
    st.n_ = static_cast<int>(n);
    st.ell_ = std::move(ell);
    st.m_ = std::move(m_weights);
    st.labels_ = std::move(labels);
    return st;
}

DiscreteSpacetime DiscreteSpacetime::generated(NormFamily family, double p,
                                               std::vector<Vec> coords,
                                               std::vector<double> m_weights,
                                               std::optional<GridInfo> grid) {
    DiscreteSpacetime st;
    size_t n = m_weights.size();
    require(n > 0 && coords.size() == n, ErrorKind::Structural,
            "spacetime: coords/weights size mismatch");
    int d = static_cast<int>(coords[0].size());
    for (const Vec& c : coords)
        require(static_cast<int>(c.size()) == d, ErrorKind::Structural, "spacetime: ragged coords");
    st.n_ = static_cast<int>(n);
    st.generated_ = true;
    st.family_ = family;
    st.p_ = family == NormFamily::Minkowski ? 2.0 : p;
    st.coords_ = std::move(coords);
    st.m_ = std::move(m_weights);
    st.norm_ = HyperbolicNorm::lp(st.p_, d);
    st.grid_ = std::move(grid);
    return st;
}

const HyperbolicNorm& DiscreteSpacetime::norm() const {
    require(norm_.has_value(), ErrorKind::Structural, "spacetime: no generator norm attached");
    return *norm_;
}

ExtendedTime DiscreteSpacetime::ell(int i, int j) const {
    if (!generated_) return ell_[static_cast<size_t>(i) * n_ + j];
    return norm_->eval(vsub(coords_[static_cast<size_t>(j)], coords_[static_cast<size_t>(i)]));
}

double DiscreteSpacetime::total_mass() const {
    double s = 0.0;
    for (double w : m_) s += w;
    return s;
}

namespace {

// ell(x,y) <= ell(x,z) - ell(y,z) with the extended-difference conventions
// and an absolute tolerance on the finite-finite branch.
bool reverse_triangle_ok(ExtendedTime xy, ExtendedTime xz, ExtendedTime yz, double tol) {
    ExtendedTime rhs = xz - yz;
    if (rhs.is_pos_inf() || xy.is_neg_inf()) return true;
    // rhs = -inf: grid round-off can misclassify near-null pairs, so a
    // left side within tol of zero is not a violation
    if (rhs.is_neg_inf()) return xy.is_finite() && xy.value() <= tol;
    if (xy.is_pos_inf()) return false;  // finite rhs
    return xy.value() <= rhs.value() + tol;
}

}  // namespace

ValidationReport validate(const DiscreteSpacetime& st, const ValidateOptions& opts) {
    const int n = st.n_points();
    ValidationReport rep;
    for (int x = 0; x < n; ++x) {
        ExtendedTime d = st.ell(x, x);
        if (d.is_neg_inf() || (d.is_finite() && d.value() < -opts.tol))
            rep.negative_diagonal.push_back(x);
    }
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            ExtendedTime v = st.ell(x, y);
            if (v.is_finite() && v.value() < -opts.tol) {
                if (rep.negative_finite.size() < opts.max_recorded)
                    rep.negative_finite.push_back(x * n + y);
            }
            if (x < y) {
                ExtendedTime fwd = st.ell(x, y), bwd = st.ell(y, x);
                if (!fwd.is_neg_inf() && !bwd.is_neg_inf()) {
                    if (rep.antisymmetry.size() < opts.max_recorded)
                        rep.antisymmetry.push_back({x, y, fwd, bwd});
                }
            }
        }
    }
    auto check_triple = [&](int x, int y, int z) {
        ExtendedTime xy = st.ell(x, y), xz = st.ell(x, z), yz = st.ell(y, z);
        ++rep.triples_checked;
        if (!reverse_triangle_ok(xy, xz, yz, opts.tol)) {
            if (rep.reverse_triangle.size() < opts.max_recorded)
                rep.reverse_triangle.push_back({x, y, z, xy, xz - yz});
        }
    };
    if (n <= opts.exhaustive_limit) {
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z) check_triple(x, y, z);
        rep.exhaustive = true;
    } else {
        std::mt19937_64 rng(opts.seed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (long long s = 0; s < opts.sample_triples; ++s)
            check_triple(pick(rng), pick(rng), pick(rng));
        rep.exhaustive = false;
    }
    return rep;
}

CausalRelations relations(const DiscreteSpacetime& st) {
    const int n = st.n_points();
    CausalRelations rel;
    rel.n = n;
    rel.leq.assign(static_cast<size_t>(n) * n, 0);
    rel.ll.assign(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            ExtendedTime v = st.ell(i, j);
            if (v >= ExtendedTime(0.0)) rel.leq[static_cast<size_t>(i) * n + j] = 1;
            if (v > ExtendedTime(0.0)) rel.ll[static_cast<size_t>(i) * n + j] = 1;
        }
    }
    return rel;
}

std::vector<int> future_past(const DiscreteSpacetime& st, int x, ConeKind kind) {
    const int n = st.n_points();
    require(x >= 0 && x < n, ErrorKind::Precondition, "future_past: point index out of range");
    std::vector<int> out;
    for (int y = 0; y < n; ++y) {
        ExtendedTime v;
        switch (kind) {
            case ConeKind::ChronoFuture: v = st.ell(x, y); if (v > ExtendedTime(0.0)) out.push_back(y); break;
            case ConeKind::ChronoPast:   v = st.ell(y, x); if (v > ExtendedTime(0.0)) out.push_back(y); break;
            case ConeKind::CausalFuture: v = st.ell(x, y); if (v >= ExtendedTime(0.0)) out.push_back(y); break;
            case ConeKind::CausalPast:   v = st.ell(y, x); if (v >= ExtendedTime(0.0)) out.push_back(y); break;
        }
    }
    return out;
}

std::vector<int> emerald(const DiscreteSpacetime& st, const std::vector<int>& X,
                         const std::vector<int>& Y) {
    require(!X.empty() && !Y.empty(), ErrorKind::Precondition, "emerald: X and Y must be nonempty");
    const int n = st.n_points();
    std::vector<uint8_t> in_fut(static_cast<size_t>(n), 0), in_past(static_cast<size_t>(n), 0);
    for (int x : X)
        for (int y : future_past(st, x, ConeKind::CausalFuture)) in_fut[static_cast<size_t>(y)] = 1;
    for (int y : Y)
        for (int z : future_past(st, y, ConeKind::CausalPast)) in_past[static_cast<size_t>(z)] = 1;
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (in_fut[static_cast<size_t>(i)] && in_past[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

namespace {

DiscreteSpacetime generate_grid(NormFamily family, double p, int dim,
                                const std::vector<double>& lo, const std::vector<double>& hi,
                                const std::vector<int>& resolution) {
    require(dim >= 2, ErrorKind::Parameter, "grid generator: dim must be >= 2 (1 time + k space)");
    require(static_cast<int>(lo.size()) == dim && static_cast<int>(hi.size()) == dim &&
                static_cast<int>(resolution.size()) == dim,
            ErrorKind::Structural, "grid generator: extent/resolution arity mismatch");
    GridInfo grid;
    grid.dim = dim;
    grid.lo = lo;
    grid.hi = hi;
    grid.resolution = resolution;
    grid.step.resize(static_cast<size_t>(dim));
    grid.cell_volume = 1.0;
    long long n = 1;
    for (int a = 0; a < dim; ++a) {
        require(resolution[static_cast<size_t>(a)] >= 2, ErrorKind::Parameter,
                "grid generator: resolution must be >= 2 per axis");
        require(hi[static_cast<size_t>(a)] > lo[static_cast<size_t>(a)], ErrorKind::Parameter,
                "grid generator: empty extent");
        grid.step[static_cast<size_t>(a)] =
            (hi[static_cast<size_t>(a)] - lo[static_cast<size_t>(a)]) / resolution[static_cast<size_t>(a)];
        grid.cell_volume *= grid.step[static_cast<size_t>(a)];
        n *= resolution[static_cast<size_t>(a)];
    }
    require(n <= 2'000'000, ErrorKind::Parameter, "grid generator: lattice too large");
    std::vector<Vec> coords;
    coords.reserve(static_cast<size_t>(n));
    for (long long idx = 0; idx < n; ++idx) {
        coords.push_back(grid.center(grid.cell_of_index(static_cast<int>(idx))));
    }
    std::vector<double> weights(static_cast<size_t>(n), grid.cell_volume);
    return DiscreteSpacetime::generated(family, p, std::move(coords), std::move(weights), grid);
}

}  // namespace

DiscreteSpacetime generate_minkowski_grid(int dim, const std::vector<double>& lo,
                                          const std::vector<double>& hi,
                                          const std::vector<int>& resolution) {
    return generate_grid(NormFamily::Minkowski, 2.0, dim, lo, hi, resolution);
}

DiscreteSpacetime generate_hyperbolic_lp_grid(double p, int dim, const std::vector<double>& lo,
                                              const std::vector<double>& hi,
                                              const std::vector<int>& resolution) {
    require(p >= 1.0, ErrorKind::Parameter, "hyperbolic lp grid: p must be >= 1");
    return generate_grid(NormFamily::HyperbolicLp, p, dim, lo, hi, resolution);
}

}  // namespace lorentz
