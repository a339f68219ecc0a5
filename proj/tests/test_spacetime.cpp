#include <cmath>

#include "doctest.h"
#include "lorentz/spacetime.hpp"
#include "oracles.hpp"

using namespace lorentz;

namespace {

const ExtendedTime kZero(0.0);
const ExtendedTime kNegInf = ExtendedTime::neg_inf();

DiscreteSpacetime two_point_chain(double l = 1.0) {
    std::vector<ExtendedTime> ell{kZero, ExtendedTime(l), kNegInf, kZero};
    return DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0});
}

DiscreteSpacetime three_chain(double lab, double lbc, double lac) {
    std::vector<ExtendedTime> ell(9, kNegInf);
    auto at = [&](int i, int j) -> ExtendedTime& { return ell[static_cast<size_t>(i) * 3 + j]; };
    for (int i = 0; i < 3; ++i) at(i, i) = kZero;
    at(0, 1) = ExtendedTime(lab);
    at(1, 2) = ExtendedTime(lbc);
    at(0, 2) = ExtendedTime(lac);
    return DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("minimal chain validates") {
    DiscreteSpacetime st = two_point_chain();
    ValidationReport rep = validate(st);
    CHECK(rep.ok());
    CHECK(rep.exhaustive);
}

TEST_CASE("forced reverse-triangle violation on a 3-point chain") {
    // ell(a,c) = 1.5 < 1 + 1 = ell(a,b) + ell(b,c)
    DiscreteSpacetime st = three_chain(1.0, 1.0, 1.5);
    ValidationReport rep = validate(st);
    CHECK(!rep.ok());
    REQUIRE(!rep.reverse_triangle.empty());
    bool found = false;
    for (const auto& v : rep.reverse_triangle)
        if (v.x == 0 && v.y == 1 && v.z == 2) found = true;
    CHECK(found);
    // the consistent value passes
    CHECK(validate(three_chain(1.0, 1.0, 2.0)).ok());
    CHECK(validate(three_chain(1.0, 1.0, 2.5)).ok());
}

TEST_CASE("antisymmetry and diagonal violations are reported") {
    std::vector<ExtendedTime> ell{kZero, ExtendedTime(1.0), ExtendedTime(0.5), kZero};
    DiscreteSpacetime st = DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0});
    ValidationReport rep = validate(st);
    CHECK(!rep.antisymmetry.empty());

    std::vector<ExtendedTime> ell2{ExtendedTime(-1.0), kNegInf, kNegInf, kZero};
    // note: a finite negative entry violates both range and diagonal axioms
    DiscreteSpacetime st2 = DiscreteSpacetime::from_matrix(std::move(ell2), {1.0, 1.0});
    ValidationReport rep2 = validate(st2);
    CHECK(!rep2.negative_diagonal.empty());
    CHECK(!rep2.negative_finite.empty());
}

TEST_CASE("structural errors on dimension mismatch") {
    CHECK_THROWS_AS(DiscreteSpacetime::from_matrix({kZero, kZero}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(
        DiscreteSpacetime::from_matrix({kZero}, {1.0}, std::vector<Vec>{{0.0}, {1.0}}), Error);
    CHECK_THROWS_AS(DiscreteSpacetime::from_matrix({kZero}, {-1.0}), Error);
}

TEST_CASE("relations boundary cases") {
    // ell(a,b) = 0: causal, not chronological
    DiscreteSpacetime st = two_point_chain(0.0);
    CausalRelations rel = relations(st);
    CHECK(rel.leq_at(0, 1));
    CHECK(!rel.ll_at(0, 1));
    CHECK(rel.leq_at(0, 0));  // reflexive

    // ell(a,b) = +inf: chronological
    std::vector<ExtendedTime> ell{kZero, ExtendedTime::pos_inf(), kNegInf, kZero};
    DiscreteSpacetime st2 = DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0});
    CausalRelations rel2 = relations(st2);
    CHECK(rel2.ll_at(0, 1));
    CHECK(rel2.leq_at(0, 1));

    // ell(a,b) = -inf: unrelated
    CHECK(!relations(two_point_chain()).leq_at(1, 0));
}

TEST_CASE("futures, pasts, and emeralds on a chain") {
    DiscreteSpacetime st = three_chain(1.0, 1.0, 2.0);
    auto ifut = future_past(st, 0, ConeKind::ChronoFuture);
    CHECK(ifut == std::vector<int>{1, 2});
    auto jfut = future_past(st, 0, ConeKind::CausalFuture);
    CHECK(jfut == std::vector<int>{0, 1, 2});  // contains the point itself
    auto jpast = future_past(st, 2, ConeKind::CausalPast);
    CHECK(jpast == std::vector<int>{0, 1, 2});
    CHECK_THROWS_AS(future_past(st, 7, ConeKind::ChronoFuture), Error);

    auto dia = emerald(st, {0}, {2});
    CHECK(dia == std::vector<int>{0, 1, 2});
    auto self = emerald(st, {1}, {1});
    CHECK(self == std::vector<int>{1});
    // disjoint cones
    std::vector<ExtendedTime> ell(4, kNegInf);
    ell[0] = kZero;
    ell[3] = kZero;
    DiscreteSpacetime st2 = DiscreteSpacetime::from_matrix(std::move(ell), {1.0, 1.0});
    CHECK(emerald(st2, {0}, {1}).empty());
    CHECK_THROWS_AS(emerald(st2, {}, {1}), Error);
}

TEST_CASE("minkowski grid generator") {
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -1.0}, {2.0, 1.0}, {8, 8});
    CHECK(st.n_points() == 64);
    CHECK(st.is_generated());
    // weight = cell volume
    CHECK(st.weight(0) == doctest::Approx(0.25 * 0.25));

    // two points along the time axis: delta t = 2, delta x = 0 -> ell = 2
    std::vector<ExtendedTime> ell{kZero, ExtendedTime(2.0), kNegInf, kZero};
    DiscreteSpacetime axis = DiscreteSpacetime::generated(
        NormFamily::Minkowski, 2.0, {{0.0, 0.0}, {2.0, 0.0}}, {1.0, 1.0});
    CHECK(axis.ell(0, 1).value() == doctest::Approx(2.0));
    // null pair
    DiscreteSpacetime nullpair = DiscreteSpacetime::generated(
        NormFamily::Minkowski, 2.0, {{0.0, 0.0}, {1.0, 1.0}}, {1.0, 1.0});
    CHECK(nullpair.ell(0, 1).value() == doctest::Approx(0.0));
    CHECK(nullpair.ell(1, 0).is_neg_inf());

    // validator passes, cross-checked against the naive oracle
    ValidationReport rep = validate(st);
    CHECK(rep.ok());
    CHECK(oracles::naive_axioms_hold(st, 1e-9));
}

TEST_CASE("hyperbolic lp grid generator") {
    // integer lattice steps keep the quartic cone classification exact
    DiscreteSpacetime st = generate_hyperbolic_lp_grid(4.0, 2, {0.0, -3.0}, {6.0, 3.0}, {6, 6});
    ValidationReport rep = validate(st);
    CHECK(rep.ok());
    CHECK(oracles::naive_axioms_hold(st, 1e-9));

    // p = 2 reproduces the minkowski generator bit for bit
    DiscreteSpacetime a = generate_minkowski_grid(2, {0.0, -1.0}, {2.0, 1.0}, {5, 5});
    DiscreteSpacetime b = generate_hyperbolic_lp_grid(2.0, 2, {0.0, -1.0}, {2.0, 1.0}, {5, 5});
    for (int i = 0; i < a.n_points(); ++i)
        for (int j = 0; j < a.n_points(); ++j) {
            ExtendedTime va = a.ell(i, j), vb = b.ell(i, j);
            CHECK(va.tag() == vb.tag());
            if (va.is_finite()) CHECK(va.value() == vb.value());
        }
    CHECK_THROWS_AS(generate_hyperbolic_lp_grid(0.5, 2, {0.0, -1.0}, {1.0, 1.0}, {4, 4}), Error);
    CHECK_THROWS_AS(generate_minkowski_grid(2, {0.0, -1.0}, {1.0, 1.0}, {1, 4}), Error);
}

TEST_CASE("chronological future of the origin on the grid matches the cone oracle") {
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -1.0}, {2.0, 1.0}, {10, 10});
    int origin = 0;
    // pick a central low cell
    for (int i = 0; i < st.n_points(); ++i)
        if (std::fabs(st.coord(i)[0] - 0.1) < 1e-9 && std::fabs(st.coord(i)[1] + 0.1) < 1e-9)
            origin = i;
    auto fut = future_past(st, origin, ConeKind::ChronoFuture);
    std::vector<int> expected;
    for (int i = 0; i < st.n_points(); ++i)
        if (i != origin && oracles::cone_future(st.coord(origin), st.coord(i), true))
            expected.push_back(i);
    CHECK(fut == expected);

    // causal diamond against the coordinate oracle
    int tip = 0;
    for (int i = 0; i < st.n_points(); ++i)
        if (std::fabs(st.coord(i)[0] - 1.9) < 1e-9 && std::fabs(st.coord(i)[1] + 0.1) < 1e-9)
            tip = i;
    auto dia = emerald(st, {origin}, {tip});
    std::vector<int> expected_dia;
    for (int i = 0; i < st.n_points(); ++i) {
        bool in_fut = i == origin || oracles::cone_future(st.coord(origin), st.coord(i), false);
        bool in_past = i == tip || oracles::cone_future(st.coord(i), st.coord(tip), false);
        if (in_fut && in_past) expected_dia.push_back(i);
    }
    CHECK(dia == expected_dia);
}

TEST_CASE("push-up and transitivity hold on validated spacetimes") {
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -0.6}, {1.2, 0.6}, {5, 5});
    REQUIRE(validate(st).ok());
    CausalRelations rel = relations(st);
    const int n = st.n_points();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z) {
                if (rel.leq_at(x, y) && rel.leq_at(y, z)) CHECK(rel.leq_at(x, z));
                if (rel.ll_at(x, y) && rel.ll_at(y, z)) CHECK(rel.ll_at(x, z));
                // push-up
                if (rel.ll_at(x, y) && rel.leq_at(y, z)) CHECK(rel.ll_at(x, z));
                if (rel.leq_at(x, y) && rel.ll_at(y, z)) CHECK(rel.ll_at(x, z));
            }
}

TEST_CASE("push-up holds on randomized triples above the exhaustive threshold") {
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -1.25}, {2.5, 1.25}, {20, 20});
    CausalRelations rel = relations(st);
    std::mt19937_64 g = oracles::rng(22);
    const int n = st.n_points();
    for (int s = 0; s < 200000; ++s) {
        int x = static_cast<int>(g() % n), y = static_cast<int>(g() % n),
            z = static_cast<int>(g() % n);
        if (rel.leq_at(x, y) && rel.leq_at(y, z)) CHECK(rel.leq_at(x, z));
        if (rel.ll_at(x, y) && rel.leq_at(y, z)) CHECK(rel.ll_at(x, z));
        if (rel.leq_at(x, y) && rel.ll_at(y, z)) CHECK(rel.ll_at(x, z));
    }
}

TEST_CASE("generator norm superadditivity on sampled future pairs") {
    std::mt19937_64 g = oracles::rng(21);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
        HyperbolicNorm n = HyperbolicNorm::lp(p, 3);
        for (int s = 0; s < 10000; ++s) {
            Vec v(3), w(3);
            v[1] = oracles::unif(g, -1, 1);
            v[2] = oracles::unif(g, -1, 1);
            v[0] = std::pow(std::pow(std::fabs(v[1]), p) + std::pow(std::fabs(v[2]), p), 1.0 / p) +
                   oracles::unif(g, 0.01, 1.0);
            w[1] = oracles::unif(g, -1, 1);
            w[2] = oracles::unif(g, -1, 1);
            w[0] = std::pow(std::pow(std::fabs(w[1]), p) + std::pow(std::fabs(w[2]), p), 1.0 / p) +
                   oracles::unif(g, 0.01, 1.0);
            double nv = n.eval(v).value();
            double nw = n.eval(w).value();
            double ns = n.eval(vadd(v, w)).value();
            CHECK(ns >= nv + nw - 1e-10);
        }
    }
}

TEST_CASE("validation is idempotent and deterministic") {
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -1.0}, {2.0, 1.0}, {7, 7});
    ValidationReport r1 = validate(st);
    ValidationReport r2 = validate(st);
    CHECK(r1.ok() == r2.ok());
    CHECK(r1.triples_checked == r2.triples_checked);
    CHECK(r1.reverse_triangle.size() == r2.reverse_triangle.size());
}

TEST_CASE("large instances fall back to sampled validation") {
    // dyadic steps (0.125) keep null-cone pairs exact on the lattice
    DiscreteSpacetime st = generate_minkowski_grid(2, {0.0, -1.25}, {2.5, 1.25}, {20, 20});
    ValidateOptions opts;
    opts.sample_triples = 50000;
    ValidationReport rep = validate(st, opts);
    CHECK(rep.ok());
    CHECK(!rep.exhaustive);
    CHECK(rep.triples_checked == 50000);
}
