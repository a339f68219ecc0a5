#include "doctest.h"
#include "lorentz/extended_time.hpp"

using lorentz::ExtendedTime;

namespace {
const ExtendedTime pinf = ExtendedTime::pos_inf();
const ExtendedTime ninf = ExtendedTime::neg_inf();
}  // namespace

TEST_CASE("extended difference conventions") {
    CHECK((pinf - pinf) == pinf);
    CHECK((ninf - ninf) == pinf);
    CHECK((pinf - ExtendedTime(3.0)) == pinf);
    CHECK((ninf - ExtendedTime(3.0)) == ninf);
    CHECK((ExtendedTime(3.0) - pinf) == ninf);
    CHECK((ExtendedTime(3.0) - ninf) == pinf);
    CHECK((ExtendedTime(5.0) - ExtendedTime(2.0)) == ExtendedTime(3.0));
    CHECK((ninf - pinf) == ninf);
    CHECK((pinf - ninf) == pinf);
}

TEST_CASE("extended addition is left-biased on infinities") {
    CHECK((pinf + ninf) == pinf);
    CHECK((ninf + pinf) == ninf);
    CHECK((pinf + ExtendedTime(-7.0)) == pinf);
    CHECK((ExtendedTime(-7.0) + pinf) == pinf);
    CHECK((ExtendedTime(1.0) + ExtendedTime(2.0)) == ExtendedTime(3.0));
}

TEST_CASE("zero times infinity vanishes") {
    CHECK((0.0 * pinf) == ExtendedTime(0.0));
    CHECK((0.0 * ninf) == ExtendedTime(0.0));
    CHECK((2.0 * pinf) == pinf);
    CHECK((-2.0 * pinf) == ninf);
    CHECK((2.0 * ExtendedTime(3.0)) == ExtendedTime(6.0));
}

TEST_CASE("ordering") {
    CHECK(ninf < ExtendedTime(0.0));
    CHECK(ExtendedTime(0.0) < pinf);
    CHECK(ninf < pinf);
    CHECK(!(pinf < pinf));
    CHECK(pinf <= pinf);
    CHECK(ExtendedTime(1.0) < ExtendedTime(2.0));
}

TEST_CASE("power conventions") {
    using lorentz::pow_q;
    // 0^q = +inf for q < 0, 0 for q > 0
    CHECK(pow_q(ExtendedTime(0.0), -1.0) == pinf);
    CHECK(pow_q(ExtendedTime(0.0), 0.5) == ExtendedTime(0.0));
    CHECK(pow_q(pinf, 0.5) == pinf);
    CHECK(pow_q(pinf, -2.0) == ExtendedTime(0.0));
    CHECK(pow_q(ExtendedTime(4.0), 0.5) == ExtendedTime(2.0));
    CHECK_THROWS_AS((void)pow_q(ninf, 0.5), lorentz::Error);
}

TEST_CASE("pow_q_over_q sign handling") {
    using lorentz::pow_q_over_q;
    // q = -1: 0^q / q = +inf / (-1) = -inf
    CHECK(pow_q_over_q(ExtendedTime(0.0), -1.0) == ninf);
    CHECK(pow_q_over_q(ExtendedTime(4.0), 0.5) == ExtendedTime(4.0));
    CHECK_THROWS_AS((void)pow_q_over_q(ExtendedTime(1.0), 1.5), lorentz::Error);
    CHECK_THROWS_AS((void)pow_q_over_q(ExtendedTime(1.0), 0.0), lorentz::Error);
}
