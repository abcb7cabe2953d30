#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "oracles.hpp"
#include "tframe/drip.hpp"
#include "tframe/frame.hpp"
#include "tframe/measurement.hpp"

using namespace tframe;

TEST_CASE("binomial_coefficient computes and saturates") {
  REQUIRE(binomial_coefficient(10, 2) == 45);
  REQUIRE(binomial_coefficient(10, 4) == 210);
  REQUIRE(binomial_coefficient(24, 12) == 2704156);
  REQUIRE(binomial_coefficient(5, 0) == 1);
  REQUIRE(binomial_coefficient(5, 5) == 1);
  REQUIRE(binomial_coefficient(4, 5) == 0);
  REQUIRE(binomial_coefficient(200, 100) == std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("delta is zero for orthonormal measurements") {
  SeededRng rng(401);
  const std::vector<Frame> frames = {identity_frame(4), mercedes_benz_frame(),
                                     random_tight_frame(4, 6, rng)};
  for (const auto& f : frames) {
    for (const int n : {f.p(), f.p() + 3}) {
      const auto phi = orthonormal_measurement(n, f.p(), rng);
      for (int k = 1; k <= 2; ++k) {
        const auto cert = delta_exact(phi, f, k);
        REQUIRE(cert.delta < 1e-12);
        REQUIRE(cert.method == DripMethod::exact);
        REQUIRE(cert.k == k);
        REQUIRE(cert.supports_examined == binomial_coefficient(f.d(), k));
        REQUIRE(cert.samples == 0);
        const auto mc = delta_lower_mc(phi, f, k, 500, rng);
        REQUIRE(mc.delta < 1e-12);
        REQUIRE(mc.method == DripMethod::lower_bound);
        REQUIRE(mc.samples == 500);
        REQUIRE(mc.supports_examined == 0);
      }
    }
  }
}

TEST_CASE("delta of a scaled identity is the exact scalar deviation") {
  const Frame f = identity_frame(4);
  for (const double c : {2.0, 0.5}) {
    const MeasurementMatrix phi{c * Matrix::Identity(4, 4), "scaled"};
    const auto cert = delta_exact(phi, f, 2);
    REQUIRE(cert.delta == Catch::Approx(std::abs(c * c - 1.0)).margin(1e-12));
  }
}

TEST_CASE("exact delta dominates sampled deviations") {
  SeededRng rng(403);
  for (int rep = 0; rep < 5; ++rep) {
    const Frame f = identity_frame(8);
    const auto phi = gaussian_measurement(6, 8, rng);
    const auto cert = delta_exact(phi, f, 2);
    const double sampled = oracles::sampled_drip_dev(phi.phi, f.matrix(), 2, 20000, rng);
    REQUIRE(cert.delta >= sampled - 1e-9);
    const auto mc = delta_lower_mc(phi, f, 2, 20000, rng);
    REQUIRE(mc.delta <= cert.delta + 1e-9);
    REQUIRE(mc.delta >= 0.5 * cert.delta);  // 20k draws on C(8,2)=28 supports get close
  }
}

TEST_CASE("exact delta dominates sampled deviations on a wide frame") {
  SeededRng rng(405);
  const Frame f = random_tight_frame(5, 9, rng);
  const auto phi = gaussian_measurement(4, 5, rng);
  const auto cert = delta_exact(phi, f, 2);
  const double sampled = oracles::sampled_drip_dev(phi.phi, f.matrix(), 2, 20000, rng);
  REQUIRE(cert.delta >= sampled - 1e-9);
}

TEST_CASE("delta reduces to the classical RIP constant on identity frames") {
  SeededRng rng(407);
  for (int rep = 0; rep < 10; ++rep) {
    const int p = 4 + static_cast<int>(rng.below(5));
    const int n = 3 + static_cast<int>(rng.below(6));
    const int k = 1 + static_cast<int>(rng.below(3));
    const auto phi = gaussian_measurement(n, p, rng);
    const auto cert = delta_exact(phi, identity_frame(p), k);
    REQUIRE(cert.delta ==
            Catch::Approx(oracles::classical_rip_delta(phi.phi, k)).margin(1e-10));
  }
}

TEST_CASE("delta is nondecreasing in k") {
  SeededRng rng(409);
  for (int rep = 0; rep < 5; ++rep) {
    const Frame f = random_tight_frame(5, 8, rng);
    const auto phi = gaussian_measurement(4, 5, rng);
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
      const auto cert = delta_exact(phi, f, k);
      REQUIRE(cert.delta >= prev - 1e-9);
      prev = cert.delta;
    }
  }
}

TEST_CASE("monte carlo lower bound is nondecreasing in samples") {
  SeededRng setup(411);
  const Frame f = identity_frame(6);
  const auto phi = gaussian_measurement(5, 6, setup);
  double prev = 0.0;
  for (const std::uint64_t samples : {1u, 10u, 100u, 1000u, 10000u}) {
    SeededRng rng(999);  // same stream prefix each time
    const auto cert = delta_lower_mc(phi, f, 2, samples, rng);
    REQUIRE(cert.delta >= prev - 1e-15);
    prev = cert.delta;
  }
}

TEST_CASE("delta_exact is invariant to how the sparse subspaces are reached") {
  // Duplicated frame columns change the support count but not the subspaces.
  SeededRng rng(413);
  const Frame f = random_tight_frame(3, 5, rng);
  const auto phi = gaussian_measurement(3, 3, rng);
  Matrix doubled(3, 10);
  doubled << f.matrix(), f.matrix();
  const Frame f2(std::sqrt(0.5) * doubled, "doubled");
  const auto a = delta_exact(phi, f, 1);
  const auto b = delta_exact(phi, f2, 1);
  REQUIRE(a.delta == Catch::Approx(b.delta).margin(1e-10));
}

TEST_CASE("scaling Phi moves delta by the squared scale") {
  SeededRng rng(415);
  const Frame f = random_tight_frame(4, 6, rng);
  const auto phi = gaussian_measurement(5, 4, rng);
  const auto base = sparse_subspace_eigen_range(phi, f, 2);
  for (const double c : {0.5, 2.0}) {
    const MeasurementMatrix scaled{c * phi.phi, "scaled"};
    const auto cert = delta_exact(scaled, f, 2);
    const double expected =
        std::max(c * c * base.lambda_max - 1.0, 1.0 - c * c * base.lambda_min);
    REQUIRE(cert.delta == Catch::Approx(expected).margin(1e-9));
  }
}

TEST_CASE("enumeration budget refuses oversized jobs up front") {
  SeededRng rng(417);
  const Frame f = random_tight_frame(4, 25, rng);
  const auto phi = gaussian_measurement(4, 4, rng);
  try {
    delta_exact(phi, f, 12);
    FAIL("expected budget_exceeded");
  } catch (const budget_exceeded& e) {
    REQUIRE(std::string(e.what()).find("5200300") != std::string::npos);
  }
  const auto cert = delta_exact(phi, f, 12, 1e-10, 6'000'000);
  REQUIRE(cert.supports_examined == 5'200'300);
}

TEST_CASE("drip argument guards") {
  SeededRng rng(419);
  const Frame f = identity_frame(4);
  const auto phi = gaussian_measurement(3, 4, rng);
  REQUIRE_THROWS_AS(delta_exact(phi, f, 0), invalid_input);
  REQUIRE_THROWS_AS(delta_exact(phi, f, 5), invalid_input);
  REQUIRE_THROWS_AS(delta_exact(phi, identity_frame(3), 1), invalid_input);
  REQUIRE_THROWS_AS(delta_lower_mc(phi, f, 1, 0, rng), invalid_input);
  REQUIRE_THROWS_AS(delta_lower_mc(phi, f, 0, 10, rng), invalid_input);
  REQUIRE_THROWS_AS(sparse_subspace_eigen_range(phi, f, 1, 0.0), invalid_input);
}

TEST_CASE("theorem_hypothesis_holds reads certificates correctly") {
  DripCertificate cert;
  cert.k = 2;
  cert.method = DripMethod::exact;
  cert.delta = 0.0;
  REQUIRE(theorem_hypothesis_holds(cert));
  cert.delta = 0.6666;
  REQUIRE(theorem_hypothesis_holds(cert));
  cert.delta = 2.0 / 3.0;
  REQUIRE_FALSE(theorem_hypothesis_holds(cert));
  cert.delta = 0.9;
  REQUIRE_FALSE(theorem_hypothesis_holds(cert));

  cert.method = DripMethod::lower_bound;
  cert.delta = 0.70;
  REQUIRE_FALSE(theorem_hypothesis_holds(cert));
  cert.delta = 0.1;
  REQUIRE_THROWS_AS(theorem_hypothesis_holds(cert), indeterminate_result);
}
