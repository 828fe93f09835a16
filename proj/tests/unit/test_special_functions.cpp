#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "smalljump/special_functions.hpp"

using smalljump::incomplete_gamma;

TEST_CASE("incomplete gamma closed forms")
{
  CHECK(std::abs(incomplete_gamma(1.0, 2.0) - std::exp(-2.0)) <= 1e-12 * std::exp(-2.0));
  CHECK(incomplete_gamma(0.5, 0.0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(incomplete_gamma(2.0, 3.0) == doctest::Approx(4.0 * std::exp(-3.0)).epsilon(1e-13));
}

TEST_CASE("incomplete gamma matches boost on a grid")
{
  for (double a : { 0.05, 0.3, 0.5, 1.0 / 1.7, 0.909, 1.0, 1.4285714, 2.5, 7.0, 20.0 })
    for (double s : { 0.0, 1e-8, 0.01, 0.3, 1.0, 2.0, 5.0, 12.0, 40.0, 200.0 }) {
      const double ref = boost::math::tgamma(a, s);
      if (ref < 1e-300)
        continue;
      CHECK(incomplete_gamma(a, s) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("incomplete gamma is decreasing in s")
{
  double prev = incomplete_gamma(0.7, 0.0);
  for (int k = 1; k < 100; ++k) {
    const double v = incomplete_gamma(0.7, 0.1 * k);
    CHECK(v < prev);
    prev = v;
  }
}
