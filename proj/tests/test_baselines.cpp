#include <doctest.h>

#include <cmath>

#include "macfb/baselines.hpp"

using namespace macfb;

TEST_CASE("no-feedback pentagon") {
  RegionBounds b = nofb_pentagon({5, 1});
  CHECK(b.bR1 == doctest::Approx(0.5 * std::log2(6.0)).epsilon(1e-15));
  CHECK(b.bR2 == doctest::Approx(0.5 * std::log2(6.0)).epsilon(1e-15));
  CHECK(b.sum_bound() == doctest::Approx(0.5 * std::log2(11.0)).epsilon(1e-15));
  CHECK(std::abs(b.bR1 - 1.29248) < 5e-6);
  CHECK(std::abs(b.sum_bound() - 1.72972) < 5e-6);
  CHECK(b.fbCost == 0.0);
  RegionBounds z = nofb_pentagon({0, 1});
  CHECK(z.bR1 == 0.0);
  CHECK(z.sum_bound() == 0.0);
}

TEST_CASE("Ozarow sum capacity") {
  OzarowSum z = ozarow_sum_capacity({0, 1});
  CHECK(z.rho_star == doctest::Approx(0.0));
  CHECK(z.sum_bits == doctest::Approx(0.0));

  for (double snr : {0.1, 1.0, 5.0, 30.0, 1000.0}) {
    OzarowSum o = ozarow_sum_capacity({snr, 1});
    CHECK(std::abs(ozarow_residual(snr, o.rho_star)) < 1e-10);
    // Newton on the same fixed point from rho = 0.5
    double rho = 0.5;
    for (int k = 0; k < 100; ++k) {
      double a = 1 + snr * (1 - rho * rho);
      double f = a * a - 1 - 2 * snr * (1 + rho);
      double df = 2 * a * (-2 * snr * rho) - 2 * snr;
      rho -= f / df;
    }
    CHECK(o.rho_star == doctest::Approx(rho).epsilon(1e-12));
    CHECK(o.sum_bits == doctest::Approx(0.5 * std::log2(1 + 2 * snr * (1 + rho))).epsilon(1e-12));
    CHECK(o.sum_bits > nofb_pentagon({snr, 1}).sum_bound());
    CHECK(o.sum_bits < cooperation_sum_bound({snr, 1}));
  }
}

TEST_CASE("cooperation bound") {
  CHECK(cooperation_sum_bound({5, 1}) == doctest::Approx(0.5 * std::log2(21.0)).epsilon(1e-15));
  CHECK(std::abs(cooperation_sum_bound({5, 1}) - 2.19616) < 5e-6);
  CHECK(cooperation_sum_bound({0, 1}) == 0.0);
}
