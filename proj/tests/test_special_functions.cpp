#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "cogradio/error.hpp"
#include "cogradio/special_functions.hpp"

using namespace cogradio;

TEST_CASE("erfcx matches frozen high-precision values") {
  // mpmath, 40 digits
  struct Ref {
    double x;
    double value;
  };
  const Ref refs[] = {
      {-1.5, 18.653886256262733939}, {0.5, 0.61569034419292587487},
      {5.0, 0.11070463773306862637}, {26.0, 0.021683584850562906616},
      {100.0, 0.0056416137829894329036}, {1e4, 0.000056418958072680841152},
  };
  for (const Ref& r : refs) {
    CAPTURE(r.x);
    CHECK(erfcx(r.x) == doctest::Approx(r.value).epsilon(1e-13));
  }
  CHECK(erfcx(0.0) == 1.0);
}

TEST_CASE("erfcx is continuous across the asymptotic switch") {
  const double below = erfcx(std::nextafter(10.0, 0.0));
  const double above = erfcx(10.0);
  CHECK(below == doctest::Approx(above).epsilon(1e-13));
}

TEST_CASE("regularized_upper_gamma matches Boost gamma_q") {
  for (const int k : {1, 2, 5, 16, 32, 64, 128, 512}) {
    for (const double x : {0.01, 0.5, 1.0, 5.0, 16.0, 32.0, 50.0, 80.0, 300.0, 700.0}) {
      CAPTURE(k);
      CAPTURE(x);
      const double expected = boost::math::gamma_q(static_cast<double>(k), x);
      if (expected < 1e-300) {
        CHECK(regularized_upper_gamma(k, x) < 1e-290);
      } else {
        CHECK(regularized_upper_gamma(k, x) == doctest::Approx(expected).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("regularized_upper_gamma matches the finite Poisson sum for x <= 50") {
  for (const int k : {1, 3, 10, 40}) {
    for (double x = 0.25; x <= 50.0; x += 3.5) {
      long double term = 1.0L;
      long double sum = 1.0L;
      for (int j = 1; j < k; ++j) {
        term *= x / j;
        sum += term;
      }
      const double direct = static_cast<double>(std::exp(-static_cast<long double>(x)) * sum);
      CHECK(std::abs(regularized_upper_gamma(k, x) - direct) <= 1e-12);
    }
  }
}

TEST_CASE("regularized_upper_gamma frozen values and limits") {
  CHECK(regularized_upper_gamma(16, 16.0) == doctest::Approx(0.4667448913877207497).epsilon(1e-12));
  CHECK(regularized_upper_gamma(64, 80.0) == doctest::Approx(0.029048874802733248447).epsilon(1e-12));
  CHECK(regularized_upper_gamma(512, 500.0) == doctest::Approx(0.6983879893929984265).epsilon(1e-11));
  CHECK(regularized_upper_gamma(7, 0.0) == 1.0);
  CHECK(regularized_upper_gamma(7, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(regularized_upper_gamma(7, -1.0), DomainError);
  CHECK_THROWS_AS(regularized_upper_gamma(7, std::nan("")), DomainError);
  CHECK_THROWS_AS(regularized_upper_gamma(0, 1.0), ParameterError);
  CHECK_THROWS_AS(regularized_upper_gamma(513, 1.0), ParameterError);
}

TEST_CASE("log_factorial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  CHECK(log_factorial(5) == doctest::Approx(std::log(120.0)).epsilon(1e-15));
  CHECK(log_factorial(64) == doctest::Approx(205.16819948264119854).epsilon(1e-14));
  CHECK(log_factorial(170) == doctest::Approx(706.57306224578734711).epsilon(1e-14));
}
