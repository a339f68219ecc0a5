#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "lorentz/spacetime.hpp"

namespace lorentz {

/// A causal curve exposed through its two-time separation
/// T(s, t) = ell(gamma_s, gamma_t), 0 <= s <= t <= 1. Everything the speed
/// and action calculus needs factors through T.
class CausalCurve {
public:
    virtual ~CausalCurve() = default;
    virtual ExtendedTime sep(double s, double t) const = 0;
    /// The curve's own sample grid (interval structure for speed profiles).
    virtual std::vector<double> sample_times() const = 0;
};

/// Monotone sequence of spacetime points with time stamps; evaluation
/// between samples is the left-continuous step function.
class SampledCausalPath final : public CausalCurve {
public:
    SampledCausalPath(const DiscreteSpacetime& st, std::vector<double> times,
                      std::vector<int> points);

    ExtendedTime sep(double s, double t) const override;
    std::vector<double> sample_times() const override { return times_; }

    const std::vector<double>& times() const { return times_; }
    const std::vector<int>& points() const { return points_; }
    int point_at(double t) const;
    const DiscreteSpacetime& spacetime() const { return *st_; }

private:
    const DiscreteSpacetime* st_;
    std::vector<double> times_;
    std::vector<int> points_;
};

/// Closed-form curve in a model space; T from the generator norm.
class AnalyticCurve final : public CausalCurve {
public:
    AnalyticCurve(HyperbolicNorm norm, std::function<Vec(double)> position, int default_samples = 16);

    ExtendedTime sep(double s, double t) const override;
    std::vector<double> sample_times() const override;
    Vec position(double t) const { return pos_(t); }

private:
    HyperbolicNorm norm_;
    std::function<Vec(double)> pos_;
    int default_samples_;
};

/// Per-interval density and per-sample atoms of the maximal measure
/// |gamma'| with nu((s,t)) <= T(s,t).
struct SpeedProfile {
    std::vector<double> interval_times;   // k+1 sample times bounding k intervals
    std::vector<double> abs_density;      // k entries (1/time)
    std::vector<double> singular_mass;    // k+1 entries, atom at each sample time
    ExtendedTime total;                   // estimate of |gamma'|([0,1])
    /// One row per h level: {h, total mass of mu_h}.
    std::vector<std::pair<double, double>> convergence;
    /// Maximal nondecreasing split when T takes +inf: finite runs of the
    /// sample grid (index ranges, inclusive); empty when T is finite.
    std::vector<std::pair<int, int>> finite_runs;
    bool has_infinite_region = false;
};

struct SpeedOptions {
    std::vector<int> h_levels = {64, 256, 1024};  // steps per level
    double tol = 1e-9;
};

SpeedProfile causal_speed(const CausalCurve& curve, const SpeedOptions& opts = {});

enum class ActionMode { PartitionInfimum, DensityIntegral };

struct ActionResult {
    ExtendedTime value;
    /// Partition sums per dyadic refinement level (PartitionInfimum mode);
    /// nonincreasing in the level.
    std::vector<ExtendedTime> level_values;
};

/// q-action A_q; PartitionInfimum evaluates the partition functional on
/// dyadic refinements of the sample grid (monotone in the refinement, so the
/// deepest level is the infimum over that family), DensityIntegral
/// integrates the speed profile density.
ActionResult q_action(const CausalCurve& curve, double q, ActionMode mode, int depth = 12,
                      const SpeedOptions& speed_opts = {});

/// Action sum of an explicit partition (the infimand of the q-action).
ExtendedTime action_partition_sum(const CausalCurve& curve, const std::vector<double>& partition,
                                  double q);

struct GeodesyReport {
    bool is_null = false;         // ell(g0,g1) = 0 classification
    bool endpoints_timelike = false;  // 0 < ell(g0,g1) < inf
    bool proportional_ok = false;     // ell(g_s,g_t) >= (t-s) ell(g0,g1) - tol, sampled pairs
    double proportional_worst = 0.0;  // most negative defect found
    bool constant_speed_ok = false;
    double speed_variation = 0.0;  // max |density - median| / median
    bool action_saturated_ok = false;  // A_q = ell^q/q within tol
    double action_defect = 0.0;
    bool null_consistent = false;  // for null paths: ell(g_s,g_t) = 0 throughout
    bool all_equivalent_hold = false;
    bool inconsistent = false;  // conditions disagree (sampling/tolerance artifact)
};

GeodesyReport geodesic_check(const CausalCurve& curve, double q, double tol = 1e-6, int depth = 10);

/// L_ell: infimum over refinements of sums of consecutive separations.
double length_ell(const CausalCurve& curve, int depth = 12);

}  // namespace lorentz
