#include <cmath>

#include "doctest.h"
#include "lorentz/curves.hpp"
#include "oracles.hpp"

using namespace lorentz;

namespace {

AnalyticCurve affine_segment(const Vec& a, const Vec& b, int samples = 16) {
    return AnalyticCurve(HyperbolicNorm::minkowski_standard(static_cast<int>(a.size())),
                         [a, b](double t) {
                             Vec x(a.size());
                             for (size_t i = 0; i < a.size(); ++i) x[i] = (1 - t) * a[i] + t * b[i];
                             return x;
                         },
                         samples);
}

// gamma_t = a + t^2 (b - a): same trace, non-affine clock
AnalyticCurve quadratic_segment(const Vec& a, const Vec& b, int samples = 16) {
    return AnalyticCurve(HyperbolicNorm::minkowski_standard(static_cast<int>(a.size())),
                         [a, b](double t) {
                             Vec x(a.size());
                             for (size_t i = 0; i < a.size(); ++i)
                                 x[i] = a[i] + t * t * (b[i] - a[i]);
                             return x;
                         },
                         samples);
}

AnalyticCurve broken_segment(const Vec& a, const Vec& mid, const Vec& b, int samples = 16) {
    return AnalyticCurve(HyperbolicNorm::minkowski_standard(static_cast<int>(a.size())),
                         [a, mid, b](double t) {
                             Vec x(a.size());
                             for (size_t i = 0; i < a.size(); ++i)
                                 x[i] = t <= 0.5 ? (1 - 2 * t) * a[i] + 2 * t * mid[i]
                                                 : (2 - 2 * t) * mid[i] + (2 * t - 1) * b[i];
                             return x;
                         },
                         samples);
}

DiscreteSpacetime jump_chain(double l) {
    std::vector<ExtendedTime> ell{ExtendedTime(0.0), ExtendedTime(l), ExtendedTime::neg_inf(),
                                  ExtendedTime(0.0)};
    return DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0});
}

}  // namespace

TEST_CASE("affine geodesic: constant density, no atoms, total = ell") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    AnalyticCurve gamma = affine_segment(a, b);
    double L = std::sqrt(3.0);
    SpeedProfile prof = causal_speed(gamma);
    for (double d : prof.abs_density) CHECK(d == doctest::Approx(L).epsilon(1e-12));
    for (double s : prof.singular_mass) CHECK(s == doctest::Approx(0.0));
    CHECK(prof.total.value() == doctest::Approx(L).epsilon(1e-9));
    CHECK(!prof.has_infinite_region);
    for (auto [h, total] : prof.convergence) CHECK(total == doctest::Approx(L).epsilon(1e-9));
}

TEST_CASE("constant path has zero speed") {
    Vec a{0.5, 0.2};
    AnalyticCurve gamma = affine_segment(a, a);
    SpeedProfile prof = causal_speed(gamma);
    for (double d : prof.abs_density) CHECK(d == 0.0);
    CHECK(prof.total.value() == doctest::Approx(0.0));
}

TEST_CASE("causal jump shows up as an atom at the sample time") {
    DiscreteSpacetime st = jump_chain(1.7);
    SampledCausalPath path(st, {0.0, 0.5, 1.0}, {0, 1, 1});
    SpeedProfile prof = causal_speed(path);
    CHECK(prof.abs_density[0] == doctest::Approx(0.0));
    CHECK(prof.abs_density[1] == doctest::Approx(0.0));
    CHECK(prof.singular_mass[1] == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(prof.total.value() == doctest::Approx(1.7).epsilon(1e-9));

    // brute-force oracle: profile mass on every dyadic interval stays below
    // the two-point separation bound
    for (int k = 1; k <= 6; ++k) {
        int n = 1 << k;
        for (int i = 0; i < n; ++i) {
            double s = static_cast<double>(i) / n, t = static_cast<double>(i + 1) / n;
            double mass_in = 0.0;
            for (size_t j = 0; j < prof.interval_times.size(); ++j)
                if (prof.interval_times[j] > s && prof.interval_times[j] <= t)
                    mass_in += prof.singular_mass[j];
            double bound = prof.interval_times.size() ? path.sep(s, t).value() : 0.0;
            CHECK(mass_in <= bound + 1e-9);
        }
    }
}

TEST_CASE("infinite separation splits the sample grid") {
    std::vector<ExtendedTime> ell(9, ExtendedTime::neg_inf());
    auto at = [&](int i, int j) -> ExtendedTime& { return ell[static_cast<size_t>(i) * 3 + j]; };
    for (int i = 0; i < 3; ++i) at(i, i) = ExtendedTime(0.0);
    at(0, 1) = ExtendedTime::pos_inf();
    at(1, 2) = ExtendedTime(1.0);
    at(0, 2) = ExtendedTime::pos_inf();
    DiscreteSpacetime st = DiscreteSpacetime::from_matrix(std::move(ell), {1, 1, 1});
    SampledCausalPath path(st, {0.0, 0.4, 1.0}, {0, 1, 2});
    SpeedProfile prof = causal_speed(path);
    CHECK(prof.has_infinite_region);
    CHECK(!prof.finite_runs.empty());
    CHECK(prof.total.is_pos_inf());
}

TEST_CASE("non-monotone path is rejected") {
    DiscreteSpacetime st = jump_chain(1.0);
    CHECK_THROWS_AS(SampledCausalPath(st, {0.0, 1.0}, {1, 0}), Error);
    CHECK_THROWS_AS(SampledCausalPath(st, {0.0, 0.5}, {0, 1}), Error);
    CHECK_THROWS_AS(SampledCausalPath(st, {0.0, 0.0, 1.0}, {0, 0, 1}), Error);
}

TEST_CASE("q-action saturates on affine geodesics for every exponent") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    double L = std::sqrt(3.0);
    AnalyticCurve gamma = affine_segment(a, b, 2);
    for (double q : {-1.0, 0.5, 0.75}) {
        ActionResult res = q_action(gamma, q, ActionMode::PartitionInfimum, 12);
        double target = std::pow(L, q) / q;
        CHECK(res.value.value() == doctest::Approx(target).epsilon(1e-9));
        for (size_t lv = 0; lv + 1 < res.level_values.size(); ++lv)
            CHECK(res.level_values[lv + 1].as_double() <=
                  res.level_values[lv].as_double() + 1e-12);
        ActionResult dens = q_action(gamma, q, ActionMode::DensityIntegral);
        CHECK(dens.value.value() == doctest::Approx(target).epsilon(1e-6));
    }
}

TEST_CASE("quadratic reparametrization loses action strictly (q = 1/2)") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    double L = std::sqrt(3.0);
    AnalyticCurve gamma = quadratic_segment(a, b);
    ActionResult res = q_action(gamma, 0.5, ActionMode::PartitionInfimum, 10);
    // closed form: int_0^1 (2 t L)^{1/2} * 2 dt = (4/3) sqrt(2 L)
    double closed = 4.0 / 3.0 * std::sqrt(2.0 * L);
    CHECK(res.value.value() == doctest::Approx(closed).epsilon(1e-5));
    double saturated = 2.0 * std::sqrt(L);
    CHECK(res.value.value() < saturated - 1e-4);
}

TEST_CASE("null path actions") {
    Vec a{0.0, 0.0}, b{1.0, 1.0};
    AnalyticCurve gamma = affine_segment(a, b);
    CHECK(q_action(gamma, 0.5, ActionMode::PartitionInfimum, 6).value.value() ==
          doctest::Approx(0.0));
    // q < 0: null subintervals poison the action to -inf via 0^q = +inf
    CHECK(q_action(gamma, -1.0, ActionMode::PartitionInfimum, 6).value.is_neg_inf());
    CHECK_THROWS_AS(q_action(gamma, 0.0, ActionMode::PartitionInfimum, 6), Error);
    CHECK_THROWS_AS(q_action(gamma, 1.5, ActionMode::PartitionInfimum, 6), Error);
}

TEST_CASE("the 1-action is reparametrization invariant; the q-action is not") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    double L = std::sqrt(3.0);
    AnalyticCurve gamma = affine_segment(a, b);
    AnalyticCurve rep = quadratic_segment(a, b);
    // A_1 (total speed mass) agrees for the curve and its reparametrization
    double a1 = causal_speed(gamma).total.value();
    double a1_rep = causal_speed(rep).total.value();
    CHECK(a1 == doctest::Approx(L).epsilon(1e-9));
    CHECK(a1_rep == doctest::Approx(L).epsilon(1e-6));
    // the q-action singles out the affine clock (strictly smaller otherwise)
    ActionResult r1 = q_action(gamma, 0.5, ActionMode::PartitionInfimum, 12);
    ActionResult r2 = q_action(rep, 0.5, ActionMode::PartitionInfimum, 12);
    CHECK(r2.value.value() <= r1.value.value() + 1e-9);
    CHECK(r2.value.value() < r1.value.value() - 1e-4);
}

TEST_CASE("the q-action never exceeds the endpoint bound") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    double L = std::sqrt(3.0);
    for (double q : {-1.0, 0.5, 0.75}) {
        double bound = std::pow(L, q) / q;
        for (int variant = 0; variant < 2; ++variant) {
            AnalyticCurve c = variant == 0 ? affine_segment(a, b) : quadratic_segment(a, b);
            ExtendedTime v = q_action(c, q, ActionMode::PartitionInfimum, 10).value;
            if (v.is_finite()) CHECK(v.value() <= bound + 1e-9);
        }
    }
}

TEST_CASE("geodesic check: affine passes everything") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    AnalyticCurve gamma = affine_segment(a, b);
    GeodesyReport rep = geodesic_check(gamma, 0.5, 1e-8);
    CHECK(rep.endpoints_timelike);
    CHECK(rep.proportional_ok);
    CHECK(rep.constant_speed_ok);
    CHECK(rep.action_saturated_ok);
    CHECK(rep.all_equivalent_hold);
    CHECK(!rep.inconsistent);
}

TEST_CASE("geodesic check: broken path fails the proportionality condition") {
    Vec a{0.0, 0.0}, mid{1.0, 0.6}, b{2.0, 0.0};
    // coordinate oracle: the reverse triangle is strict at the kink
    double leg = std::sqrt(1.0 - 0.36);
    REQUIRE(2.0 * leg < 2.0 - 1e-9);
    AnalyticCurve broken = broken_segment(a, mid, b);
    GeodesyReport rep = geodesic_check(broken, 0.5, 1e-8);
    CHECK(!rep.proportional_ok);
    CHECK(rep.proportional_worst < -1e-3);
    CHECK(!rep.all_equivalent_hold);
}

TEST_CASE("geodesic check: null classification") {
    Vec a{0.0, 0.0}, b{1.0, 1.0};
    AnalyticCurve gamma = affine_segment(a, b);
    GeodesyReport rep = geodesic_check(gamma, 0.5);
    CHECK(rep.is_null);
    CHECK(rep.null_consistent);
}

TEST_CASE("length along ell") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    double L = std::sqrt(3.0);
    CHECK(length_ell(affine_segment(a, b), 8) == doctest::Approx(L).epsilon(1e-12));
    CHECK(length_ell(quadratic_segment(a, b), 8) == doctest::Approx(L).epsilon(1e-9));
    CHECK(length_ell(affine_segment(a, a), 4) == doctest::Approx(0.0));

    Vec mid{1.0, 0.6}, c{2.0, 0.0};
    AnalyticCurve broken = broken_segment(a, mid, c);
    double broken_len = length_ell(broken, 8);
    CHECK(broken_len == doctest::Approx(2.0 * std::sqrt(0.64)).epsilon(1e-9));
    CHECK(broken_len < 2.0 - 1e-6);
    // sandwich A_1 <= L_ell <= ell(endpoints)
    double a1 = causal_speed(broken).total.value();
    CHECK(a1 <= broken_len + 1e-6);
    CHECK(broken_len <= 2.0 + 1e-12);
}

TEST_CASE("maximality sandwich for sampled subintervals") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    AnalyticCurve gamma = quadratic_segment(a, b);
    SpeedProfile prof = causal_speed(gamma);
    const auto& ts = prof.interval_times;
    for (size_t i = 0; i < ts.size(); ++i)
        for (size_t j = i + 1; j < ts.size(); ++j) {
            double mass = 0.0;
            for (size_t k = i; k < j; ++k) mass += prof.abs_density[k] * (ts[k + 1] - ts[k]);
            for (size_t k = i + 1; k < j; ++k) mass += prof.singular_mass[k];
            CHECK(mass <= gamma.sep(ts[i], ts[j]).value() + 1e-6);
        }
}

TEST_CASE("uniform partitions are asymptotically optimal") {
    Vec a{0.0, 0.0}, b{2.0, 1.0};
    std::vector<AnalyticCurve> curves;
    curves.push_back(affine_segment(a, b));
    curves.push_back(quadratic_segment(a, b));
    curves.push_back(AnalyticCurve(HyperbolicNorm::minkowski_standard(2),
                                   [=](double t) {
                                       double s = t * t * (3.0 - 2.0 * t);  // smoothstep clock
                                       Vec x(2);
                                       for (size_t i = 0; i < 2; ++i)
                                           x[i] = (1 - s) * a[i] + s * b[i];
                                       return x;
                                   },
                                   16));
    const double q = 0.5, eps = 2e-2;
    for (const AnalyticCurve& c : curves) {
        double aq = q_action(c, q, ActionMode::PartitionInfimum, 12).value.value();
        double final_fraction = 0.0;
        for (int n : {8, 32, 128}) {
            int hits = 0;
            const int offsets = 64;
            for (int o = 0; o < offsets; ++o) {
                double t0 = (o + 0.5) / offsets / n;
                double sum = 0.0;
                for (int i = -1; i < n; ++i) {
                    double lo = std::max(0.0, t0 + static_cast<double>(i) / n);
                    double hi = std::min(1.0, t0 + static_cast<double>(i + 1) / n);
                    if (hi <= lo) continue;
                    double sep = c.sep(lo, hi).value();
                    sum += std::pow(sep, q) / q * std::pow(1.0 / n, 1.0 - q);
                }
                if (sum < aq + eps) ++hits;
            }
            final_fraction = static_cast<double>(hits) / offsets;
        }
        CHECK(final_fraction > 0.9);
    }
}
