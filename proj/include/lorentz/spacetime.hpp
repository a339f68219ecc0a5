#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lorentz/extended_time.hpp"
#include "lorentz/norms.hpp"

namespace lorentz {

/// Regular lattice metadata kept by the grid generators; used for nearest
/// lattice point queries and neighbor searches on generated spacetimes.
struct GridInfo {
    int dim = 0;
    std::vector<double> lo, hi;     // box extent per axis
    std::vector<int> resolution;    // cells per axis
    std::vector<double> step;       // cell width per axis
    double cell_volume = 0.0;

    int index_of_cell(const std::vector<int>& cell) const;
    std::vector<int> cell_of_index(int idx) const;
    Vec center(const std::vector<int>& cell) const;
    /// Index of the lattice cell whose center is nearest to x (clamped to
    /// the box).
    int snap(const Vec& x) const;
    double max_step() const;
};

enum class NormFamily { Minkowski, HyperbolicLp };

/// Finite metric measure spacetime: point set {0..n-1}, time-separation
/// matrix ell, reference weights m. Either stores ell explicitly or derives
/// it from embedded coordinates and a hyperbolic norm (generated mode keeps
/// n^2 storage out of large grids).
class DiscreteSpacetime {
public:
    /// Explicit matrix mode. ell must be n*n row-major.
    static DiscreteSpacetime from_matrix(std::vector<ExtendedTime> ell,
                                         std::vector<double> m_weights,
                                         std::optional<std::vector<Vec>> coords = std::nullopt,
                                         std::vector<std::string> labels = {});

    /// Generated mode: ell(i,j) = n(coords[j] - coords[i]).
    static DiscreteSpacetime generated(NormFamily family, double p, std::vector<Vec> coords,
                                       std::vector<double> m_weights,
                                       std::optional<GridInfo> grid = std::nullopt);

    int n_points() const { return n_; }
    ExtendedTime ell(int i, int j) const;
    double weight(int i) const { return m_[static_cast<size_t>(i)]; }
    const std::vector<double>& weights() const { return m_; }
    double total_mass() const;

    bool has_coords() const { return !coords_.empty(); }
    const Vec& coord(int i) const { return coords_[static_cast<size_t>(i)]; }
    int coord_dim() const { return coords_.empty() ? 0 : static_cast<int>(coords_[0].size()); }
    const std::vector<std::string>& labels() const { return labels_; }

    bool is_generated() const { return generated_; }
    NormFamily family() const { return family_; }
    double lp_exponent() const { return p_; }
    const std::optional<GridInfo>& grid() const { return grid_; }
    const HyperbolicNorm& norm() const;

    bool is_explicit() const { return !generated_; }
    const std::vector<ExtendedTime>& matrix() const { return ell_; }

private:
    int n_ = 0;
    bool generated_ = false;
    std::vector<ExtendedTime> ell_;  // explicit mode
    std::vector<double> m_;
    std::vector<Vec> coords_;
    std::vector<std::string> labels_;
    NormFamily family_ = NormFamily::Minkowski;
    double p_ = 2.0;
    std::optional<HyperbolicNorm> norm_;
    std::optional<GridInfo> grid_;
};

struct TripleViolation {
    int x, y, z;
    ExtendedTime lhs;  // ell(x,y)
    ExtendedTime rhs;  // ell(x,z) - ell(y,z)
};

struct PairViolation {
    int x, y;
    ExtendedTime forward, backward;
};

/// Outcome of the rough-spacetime axiom check. Empty iff the axioms hold at
/// the given tolerance.
struct ValidationReport {
    std::vector<TripleViolation> reverse_triangle;  // ell(x,y) > ell(x,z) - ell(y,z)
    std::vector<int> negative_diagonal;             // ell(x,x) < 0
    std::vector<PairViolation> antisymmetry;        // min(ell(x,y), ell(y,x)) > -inf, x != y
    std::vector<int> negative_finite;               // flattened (i*n+j) with finite ell < 0
    bool exhaustive = true;                         // all triples checked (vs sampled)
    long long triples_checked = 0;

    bool ok() const {
        return reverse_triangle.empty() && negative_diagonal.empty() && antisymmetry.empty() &&
               negative_finite.empty();
    }
};

struct ValidateOptions {
    double tol = 1e-9;            // absolute; 0 switches to exact comparisons
    int exhaustive_limit = 200;   // n above which triples are sampled
    long long sample_triples = 200000;
    std::uint64_t seed = 20240901;
    size_t max_recorded = 64;     // cap on recorded violations per category
};

ValidationReport validate(const DiscreteSpacetime& st, const ValidateOptions& opts = {});

/// Boolean relation matrices: leq = {ell >= 0}, ll = {ell > 0}.
struct CausalRelations {
    int n = 0;
    std::vector<uint8_t> leq, ll;  // n*n row-major
    bool leq_at(int i, int j) const { return leq[static_cast<size_t>(i) * n + j] != 0; }
    bool ll_at(int i, int j) const { return ll[static_cast<size_t>(i) * n + j] != 0; }
};

CausalRelations relations(const DiscreteSpacetime& st);

enum class ConeKind { ChronoFuture, ChronoPast, CausalFuture, CausalPast };

/// I±(x) / J±(x) as sorted index sets.
std::vector<int> future_past(const DiscreteSpacetime& st, int x, ConeKind kind);

/// Causal emerald J(X, Y) = J+(X) ∩ J-(Y).
std::vector<int> emerald(const DiscreteSpacetime& st, const std::vector<int>& X,
                         const std::vector<int>& Y);

/// Samples the lattice of cell centers of [lo,hi]^dim with ell given by the
/// flat Minkowski norm; weights are cell volumes.
DiscreteSpacetime generate_minkowski_grid(int dim, const std::vector<double>& lo,
                                          const std::vector<double>& hi,
                                          const std::vector<int>& resolution);

/// Same lattice with the hyperbolic l^p norm, p >= 1.
DiscreteSpacetime generate_hyperbolic_lp_grid(double p, int dim, const std::vector<double>& lo,
                                              const std::vector<double>& hi,
                                              const std::vector<int>& resolution);

}  // namespace lorentz
