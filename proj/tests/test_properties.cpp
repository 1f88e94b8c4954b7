#include <doctest.h>

#include "property_suite.hpp"

using namespace cyclesync::test;

namespace {

void check(const PropertyReport& r) {
    INFO(r.name << ": " << r.failed << "/" << r.cases << " failed, worst " << r.worst);
    CHECK(r.cases >= 1);
    CHECK(r.failed == 0);
}

}  // namespace

TEST_CASE("random flow tables give row-stochastic networks") {
    const auto r = property_row_stochastic();
    CHECK(r.cases == kPropertyCases);
    check(r);
}

TEST_CASE("coupling spectra lie in [0, 2]") { check(property_spectral_bounds()); }

TEST_CASE("calibrated intercept puts the fixed point at (1/delta, 1)") { check(property_fixed_point()); }

TEST_CASE("AR(1) sample variance matches the stationary value") { check(property_ar1_variance()); }

TEST_CASE("band-pass filter is linear and removes linear trends") { check(property_cf_linearity()); }

TEST_CASE("band-pass filter passes in-band sinusoids and removes long waves") { check(property_cf_bands()); }

TEST_CASE("band-pass filter matches the reference oracle") {
    const auto r = property_cf_oracle();
    CHECK(r.cases == 4);
    check(r);
}

TEST_CASE("eigenbasis round trip") { check(property_eigenbasis_round_trip()); }
