#include "lorentz/curves.hpp"

#include <algorithm>
#include <cmath>

namespace lorentz {

SampledCausalPath::SampledCausalPath(const DiscreteSpacetime& st, std::vector<double> times,
                                     std::vector<int> points)
    : st_(&st), times_(std::move(times)), points_(std::move(points)) {
    require(times_.size() >= 2, ErrorKind::Precondition, "path: needs at least two samples");
    require(times_.size() == points_.size(), ErrorKind::Structural,
            "path: times/points length mismatch");
    require(times_.front() == 0.0 && times_.back() == 1.0, ErrorKind::Precondition,
            "path: time stamps must start at 0 and end at 1");
    for (size_t i = 0; i + 1 < times_.size(); ++i)
        require(times_[i] < times_[i + 1], ErrorKind::Precondition,
                "path: time stamps must be strictly increasing");
    for (int pidx : points_)
        require(pidx >= 0 && pidx < st.n_points(), ErrorKind::Precondition,
                "path: point index out of range");
    for (size_t i = 0; i + 1 < points_.size(); ++i) {
        ExtendedTime v = st.ell(points_[i], points_[i + 1]);
        require(v >= ExtendedTime(0.0), ErrorKind::Precondition,
                "path: samples are not monotone in the causal order");
    }
}

int SampledCausalPath::point_at(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    size_t idx = it == times_.begin() ? 0 : static_cast<size_t>(it - times_.begin()) - 1;
    return points_[idx];
}

ExtendedTime SampledCausalPath::sep(double s, double t) const {
    return st_->ell(point_at(s), point_at(t));
}

AnalyticCurve::AnalyticCurve(HyperbolicNorm norm, std::function<Vec(double)> position,
                             int default_samples)
    : norm_(std::move(norm)), pos_(std::move(position)), default_samples_(default_samples) {}

ExtendedTime AnalyticCurve::sep(double s, double t) const {
    return norm_.eval(vsub(pos_(t), pos_(s)));
}

std::vector<double> AnalyticCurve::sample_times() const {
    std::vector<double> ts(static_cast<size_t>(default_samples_) + 1);
    for (int i = 0; i <= default_samples_; ++i)
        ts[static_cast<size_t>(i)] = static_cast<double>(i) / default_samples_;
    return ts;
}

namespace {

double sep_finite(const CausalCurve& c, double s, double t) {
    ExtendedTime v = c.sep(s, t);
    require(!v.is_neg_inf(), ErrorKind::Precondition,
            "curve: separation is -inf on a sampled pair (path not causal)");
    return v.is_pos_inf() ? std::numeric_limits<double>::infinity() : v.value();
}

}  // namespace

SpeedProfile causal_speed(const CausalCurve& curve, const SpeedOptions& opts) {
    SpeedProfile prof;
    prof.interval_times = curve.sample_times();
    const std::vector<double>& ts = prof.interval_times;
    const size_t k = ts.size() - 1;

    // Split of the sample grid into maximal runs whose span separation is
    // finite; a 1-D scan along the diagonal, reported when an infinite
    // region exists.
    {
        size_t a = 0;
        while (a + 1 < ts.size()) {
            if (curve.sep(ts[a], ts[a + 1]).is_pos_inf()) {
                prof.has_infinite_region = true;
                ++a;
                continue;
            }
            size_t b = a + 1;
            while (b + 1 < ts.size() && !curve.sep(ts[b], ts[b + 1]).is_pos_inf() &&
                   !curve.sep(ts[a], ts[b + 1]).is_pos_inf())
                ++b;
            prof.finite_runs.emplace_back(static_cast<int>(a), static_cast<int>(b));
            if (b + 1 < ts.size()) prof.has_infinite_region = true;
            a = b;
            if (a + 1 < ts.size() && curve.sep(ts[a], ts[a + 1]).is_pos_inf()) ++a;
        }
        if (!prof.has_infinite_region) prof.finite_runs.clear();
    }

    auto finite_span = [&](double s, double t) {
        if (prof.has_infinite_region) {
            ExtendedTime v = curve.sep(s, t);
            return v.is_pos_inf() ? std::numeric_limits<double>::infinity() : v.value();
        }
        return sep_finite(curve, s, t);
    };

    int n_fine = 0;
    for (int n : opts.h_levels) n_fine = std::max(n_fine, n);
    require(n_fine >= 2, ErrorKind::Parameter, "causal_speed: need at least one h level >= 2");

    for (int n : opts.h_levels) {
        double h = 1.0 / n;
        double total = 0.0;
        for (int c = 0; c < n; ++c) {
            double m = finite_span(c * h, (c + 1) * h);
            if (std::isinf(m)) { total = std::numeric_limits<double>::infinity(); break; }
            total += m;
        }
        prof.convergence.emplace_back(h, total);
    }

    // Densities per sample interval from fine cells fully inside it.
    const double h = 1.0 / n_fine;
    std::vector<double> cell_mass(static_cast<size_t>(n_fine));
    for (int c = 0; c < n_fine; ++c) cell_mass[static_cast<size_t>(c)] = finite_span(c * h, (c + 1) * h);

    // First pass: a robust per-interval density guess from the interior
    // quotients (median is blind to a single atom).
    std::vector<double> density_guess(k, 0.0);
    for (size_t i = 0; i < k; ++i) {
        std::vector<double> quotients;
        for (int c = 0; c < n_fine; ++c) {
            double a = c * h, b = (c + 1) * h;
            if (a > ts[i] + 1e-15 && b < ts[i + 1] - 1e-15 &&
                !std::isinf(cell_mass[static_cast<size_t>(c)]))
                quotients.push_back(cell_mass[static_cast<size_t>(c)] / h);
        }
        if (quotients.empty()) {
            double span = finite_span(ts[i], ts[i + 1]);
            density_guess[i] = std::isinf(span) ? 0.0 : span / (ts[i + 1] - ts[i]);
        } else {
            std::sort(quotients.begin(), quotients.end());
            density_guess[i] = quotients[quotients.size() / 2];
        }
    }

    // Second pass: a cell whose mass exceeds the guessed explanation feeds
    // an atom at the nearest sample time.
    prof.singular_mass.assign(ts.size(), 0.0);
    for (int c = 0; c < n_fine; ++c) {
        double a = c * h, b = (c + 1) * h;
        double m = cell_mass[static_cast<size_t>(c)];
        if (std::isinf(m)) continue;
        double explained = 0.0;
        for (size_t i = 0; i < k; ++i) {
            double lo = std::max(a, ts[i]), hi = std::min(b, ts[i + 1]);
            if (hi > lo) explained += density_guess[i] * (hi - lo);
        }
        double excess = m - explained;
        if (excess > 10.0 * opts.tol) {
            double mid = 0.5 * (a + b);
            size_t best = 0;
            for (size_t j = 1; j < ts.size(); ++j)
                if (std::fabs(ts[j] - mid) < std::fabs(ts[best] - mid)) best = j;
            prof.singular_mass[best] += excess;
        }
    }

    // Final densities allocate the fine masses exactly (overlap-weighted),
    // minus the atom shares, so profile mass over any sampled span never
    // exceeds the separation bound beyond endpoint-cell splitting.
    prof.abs_density.assign(k, 0.0);
    {
        for (int c = 0; c < n_fine; ++c) {
            double a = c * h, b = (c + 1) * h;
            double m = cell_mass[static_cast<size_t>(c)];
            if (std::isinf(m)) continue;
            // remove the atom share recorded from this cell
            double explained = 0.0;
            for (size_t i = 0; i < k; ++i) {
                double lo = std::max(a, ts[i]), hi = std::min(b, ts[i + 1]);
                if (hi > lo) explained += density_guess[i] * (hi - lo);
            }
            double excess = m - explained;
            if (excess > 10.0 * opts.tol) m -= excess;
            for (size_t i = 0; i < k; ++i) {
                double lo = std::max(a, ts[i]), hi = std::min(b, ts[i + 1]);
                if (hi > lo) prof.abs_density[i] += m * (hi - lo) / (b - a);
            }
        }
        for (size_t i = 0; i < k; ++i) prof.abs_density[i] /= (ts[i + 1] - ts[i]);
    }

    double total = 0.0;
    for (size_t i = 0; i < k; ++i) total += prof.abs_density[i] * (ts[i + 1] - ts[i]);
    for (double a : prof.singular_mass) total += a;
    prof.total = prof.has_infinite_region ? ExtendedTime::pos_inf() : ExtendedTime(total);
    return prof;
}

ExtendedTime action_partition_sum(const CausalCurve& curve, const std::vector<double>& partition,
                                  double q) {
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter, "q_action: q must satisfy 0 != q < 1");
    ExtendedTime sum(0.0);
    for (size_t i = 0; i + 1 < partition.size(); ++i) {
        double dt = partition[i + 1] - partition[i];
        ExtendedTime t = curve.sep(partition[i], partition[i + 1]);
        require(!t.is_neg_inf(), ErrorKind::Precondition,
                "q_action: separation is -inf on a partition pair");
        ExtendedTime term = std::pow(dt, 1.0 - q) * pow_q_over_q(t, q);
        if (term.is_neg_inf()) return ExtendedTime::neg_inf();
        sum = sum + term;
        if (sum.is_pos_inf()) return sum;
    }
    return sum;
}

namespace {

std::vector<double> dyadic_refine(const std::vector<double>& base, int depth) {
    std::vector<double> part = base;
    for (int d = 0; d < depth; ++d) {
        std::vector<double> next;
        next.reserve(part.size() * 2);
        for (size_t i = 0; i + 1 < part.size(); ++i) {
            next.push_back(part[i]);
            next.push_back(0.5 * (part[i] + part[i + 1]));
        }
        next.push_back(part.back());
        part = std::move(next);
    }
    return part;
}

}  // namespace

ActionResult q_action(const CausalCurve& curve, double q, ActionMode mode, int depth,
                      const SpeedOptions& speed_opts) {
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter, "q_action: q must satisfy 0 != q < 1");
    ActionResult res;
    if (mode == ActionMode::PartitionInfimum) {
        std::vector<double> part = curve.sample_times();
        for (int d = 0; d <= depth; ++d) {
            res.level_values.push_back(action_partition_sum(curve, part, q));
            if (d < depth) part = dyadic_refine(part, 1);
        }
        res.value = res.level_values.back();
        return res;
    }
    SpeedProfile prof = causal_speed(curve, speed_opts);
    ExtendedTime sum(0.0);
    for (size_t i = 0; i + 1 < prof.interval_times.size(); ++i) {
        double dt = prof.interval_times[i + 1] - prof.interval_times[i];
        ExtendedTime term = dt * pow_q_over_q(ExtendedTime(prof.abs_density[i]), q);
        if (term.is_neg_inf()) { sum = ExtendedTime::neg_inf(); break; }
        sum = sum + term;
    }
    res.value = sum;
    return res;
}

GeodesyReport geodesic_check(const CausalCurve& curve, double q, double tol, int depth) {
    GeodesyReport rep;
    ExtendedTime l01 = curve.sep(0.0, 1.0);
    require(!l01.is_neg_inf(), ErrorKind::Precondition, "geodesic_check: endpoints not causal");

    std::vector<double> ts = curve.sample_times();

    if (l01.is_finite() && l01.value() <= tol) {
        rep.is_null = true;
        rep.null_consistent = true;
        for (size_t i = 0; i < ts.size(); ++i)
            for (size_t j = i + 1; j < ts.size(); ++j) {
                ExtendedTime v = curve.sep(ts[i], ts[j]);
                if (!(v.is_finite() && std::fabs(v.value()) <= tol)) rep.null_consistent = false;
            }
        return rep;
    }

    rep.endpoints_timelike = l01.is_finite() && l01.value() > tol;
    if (!rep.endpoints_timelike) return rep;
    const double L = l01.value();

    rep.proportional_ok = true;
    for (size_t i = 0; i < ts.size(); ++i) {
        for (size_t j = i + 1; j < ts.size(); ++j) {
            ExtendedTime v = curve.sep(ts[i], ts[j]);
            if (v.is_pos_inf()) continue;
            double defect = v.value() - (ts[j] - ts[i]) * L;
            rep.proportional_worst = std::min(rep.proportional_worst, defect);
            if (defect < -tol * std::max(1.0, L)) rep.proportional_ok = false;
        }
    }

    SpeedProfile prof = causal_speed(curve);
    std::vector<double> dens = prof.abs_density;
    std::sort(dens.begin(), dens.end());
    double med = dens[dens.size() / 2];
    double var = 0.0;
    for (double d : prof.abs_density) var = std::max(var, std::fabs(d - med));
    rep.speed_variation = var / std::max(med, 1e-300);
    bool a1_ok = prof.total.is_finite() && std::fabs(prof.total.value() - L) <= tol * std::max(1.0, L) * 10.0;
    rep.constant_speed_ok = rep.speed_variation <= tol * 100.0 && a1_ok;

    ExtendedTime aq = q_action(curve, q, ActionMode::PartitionInfimum, depth).value;
    ExtendedTime target = pow_q_over_q(l01, q);
    if (aq.is_finite() && target.is_finite()) {
        rep.action_defect = aq.value() - target.value();
        rep.action_saturated_ok = std::fabs(rep.action_defect) <= tol * std::max(1.0, std::fabs(target.value())) * 10.0;
    }

    rep.all_equivalent_hold =
        rep.proportional_ok && rep.constant_speed_ok && rep.action_saturated_ok;
    int holds = int(rep.proportional_ok) + int(rep.constant_speed_ok) + int(rep.action_saturated_ok);
    rep.inconsistent = holds != 0 && holds != 3;
    return rep;
}

double length_ell(const CausalCurve& curve, int depth) {
    std::vector<double> part = curve.sample_times();
    double value = 0.0;
    for (int d = 0; d <= depth; ++d) {
        double sum = 0.0;
        for (size_t i = 0; i + 1 < part.size(); ++i) {
            ExtendedTime v = curve.sep(part[i], part[i + 1]);
            require(!v.is_neg_inf(), ErrorKind::Precondition, "length_ell: non-causal pair");
            if (v.is_pos_inf()) return std::numeric_limits<double>::infinity();
            sum += v.value();
        }
        value = sum;  // nonincreasing under refinement; keep the deepest
        if (d < depth && part.size() < 1u << 20) part = dyadic_refine(part, 1);
    }
    return value;
}

}  // namespace lorentz
