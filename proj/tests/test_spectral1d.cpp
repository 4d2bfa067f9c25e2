#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pmc/spectral1d.hpp"

using namespace pmc;

TEST_CASE("explicit Laplacian modes") {
  const Eigenpair1D e1 = dirichlet_laplacian_mode(1, Normalization::boundary);
  CHECK(e1.nu == 1.0);
  CHECK(e1.derivative_at_0 == 1.0);
  // phi(pi/2) = sin(pi/2)/1 = 1; the midpoint is a grid node for odd sizes.
  CHECK(e1.samples((e1.grid_size - 1) / 2) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e1.samples(0) == 0.0);
  CHECK(std::abs(e1.samples(e1.grid_size - 1)) < 1e-12);

  CHECK(dirichlet_laplacian_mode(3, Normalization::boundary).nu == 9.0);

  const Eigenpair1D i1 =
      dirichlet_laplacian_mode(1, Normalization::internal, Window{0.0, pi});
  // The internal rescale of sin(x) is sqrt(2/pi).
  CHECK(i1.samples.maxCoeff() ==
        doctest::Approx(std::sqrt(2.0 / pi)).epsilon(1e-9));

  CHECK_THROWS_AS(dirichlet_laplacian_mode(0, Normalization::boundary),
                  contract_error);
  CHECK_THROWS_AS(
      dirichlet_laplacian_mode(1, Normalization::internal, Window{0.4, 0.4}),
      contract_error);
}

TEST_CASE("Sturm-Liouville eigensolver against explicit spectra") {
  SUBCASE("zero potential reproduces k^2") {
    const auto result = sturm_liouville_eigs(Potential::zero(), 10);
    CHECK(result.shift == 0.0);
    for (int k = 1; k <= 10; ++k)
      CHECK(result.eigs[static_cast<std::size_t>(k - 1)].nu ==
            doctest::Approx(static_cast<double>(k) * k).epsilon(1e-6));
  }
  SUBCASE("constant potential shifts by c") {
    const auto result = sturm_liouville_eigs(Potential::constant(2.5), 2);
    CHECK(result.eigs[0].nu == doctest::Approx(3.5).epsilon(1e-6));
    CHECK(result.eigs[1].nu == doctest::Approx(6.5).epsilon(1e-6));
  }
  SUBCASE("cos(2x) matches the fine-grid bisection oracle") {
    const auto result = sturm_liouville_eigs(Potential::cos2(), 5);
    // Oracle: Sturm bisection on finite-difference matrices at 2049 and 4097
    // points, Richardson-extrapolated; an independent algorithm and grid.
    const auto fd_diag = [](int n) {
      const double h = pi / (n - 1);
      Eigen::VectorXd diag(n - 2);
      for (int i = 0; i < n - 2; ++i)
        diag(i) = 2.0 / (h * h) + std::cos(2.0 * (i + 1) * h);
      return diag;
    };
    const double h_c = pi / 2048.0, h_f = pi / 4096.0;
    const auto coarse = oracle::tridiag_eigs_bisect(fd_diag(2049), -1.0 / (h_c * h_c), 5);
    const auto fine = oracle::tridiag_eigs_bisect(fd_diag(4097), -1.0 / (h_f * h_f), 5);
    for (int k = 0; k < 5; ++k) {
      const double reference = (4.0 * fine[static_cast<std::size_t>(k)] -
                                coarse[static_cast<std::size_t>(k)]) / 3.0;
      CHECK(result.eigs[static_cast<std::size_t>(k)].nu ==
            doctest::Approx(reference).epsilon(1e-5));
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(sturm_liouville_eigs(Potential::zero(), 0), contract_error);
    CHECK_THROWS_AS(sturm_liouville_eigs(Potential::zero(), 10, 32), contract_error);
    CHECK_THROWS_AS(sturm_liouville_eigs(Potential::zero(), 300, 1025),
                    contract_error); // K > grid/4
  }
  SUBCASE("negative potential triggers the spectrum shift") {
    const auto result = sturm_liouville_eigs(Potential::constant(-5.0), 3);
    CHECK(result.shift == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(result.eigs[0].nu == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("eigenfunction orthogonality and shift invariance") {
  const auto base = sturm_liouville_eigs(Potential::cos2(), 6);
  const double h = grid_step(base.eigs[0].grid_size);
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      const double ip = grid_inner(base.eigs[static_cast<std::size_t>(i)].samples,
                                   base.eigs[static_cast<std::size_t>(j)].samples, h);
      CHECK(std::abs(ip) < 1e-6);
    }

  // Adding a constant shifts eigenvalues exactly and keeps eigenfunctions.
  Potential shifted = Potential::from_samples(
      (Potential::cos2().samples.array() + 3.0).matrix());
  const auto moved = sturm_liouville_eigs(shifted, 6);
  for (int k = 0; k < 6; ++k) {
    CHECK(moved.eigs[static_cast<std::size_t>(k)].nu - 3.0 ==
          doctest::Approx(base.eigs[static_cast<std::size_t>(k)].nu).epsilon(1e-8));
    const double diff =
        (moved.eigs[static_cast<std::size_t>(k)].samples -
         base.eigs[static_cast<std::size_t>(k)].samples).cwiseAbs().maxCoeff();
    CHECK(diff < 1e-8);
  }
}

TEST_CASE("asymptotic gap report") {
  SUBCASE("constant potential gives vanishing xi") {
    const auto l = sturm_liouville_eigs(Potential::zero(), 8);
    const auto c = sturm_liouville_eigs(Potential::constant(0.7), 8);
    const auto report = verify_asymptotics(l.eigs, c.eigs, 0.7);
    CHECK(report.xi.cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("cos(2x): zero mean and eventually decreasing |xi|") {
    const Potential q = Potential::cos2();
    CHECK(std::abs(q.mean()) < 1e-12);
    const auto l = sturm_liouville_eigs(Potential::zero(), 20);
    const auto c = sturm_liouville_eigs(q, 20);
    const auto report = verify_asymptotics(l.eigs, c.eigs, q.mean());
    CHECK(report.eventually_decreasing);
    CHECK(report.decreasing_from <= 3);
    for (int k = 3; k < 19; ++k)
      CHECK(std::abs(report.xi(k)) <= std::abs(report.xi(k - 1)) + 1e-12);
  }
  SUBCASE("shape error on short lists") {
    const auto l = sturm_liouville_eigs(Potential::zero(), 3);
    CHECK_THROWS_AS(verify_asymptotics(l.eigs, l.eigs, 0.0), contract_error);
    const auto c = sturm_liouville_eigs(Potential::zero(), 5);
    CHECK_THROWS_AS(verify_asymptotics(l.eigs, c.eigs, 0.0), contract_error);
  }
}

TEST_CASE("transverse box spectra") {
  SUBCASE("1-D enumeration") {
    const auto s = transverse_box_spectrum(1, 10.0);
    REQUIRE(s.modes.size() == 3);
    CHECK(s.mu(1) == 1.0);
    CHECK(s.mu(2) == 4.0);
    CHECK(s.mu(3) == 9.0);
    CHECK(s.counting(10.0) == 3);
    CHECK(s.counting(0.5) == 0);
  }
  SUBCASE("2-D enumeration with multiplicity") {
    const auto s = transverse_box_spectrum(2, 9.0);
    REQUIRE(s.modes.size() == 4);
    CHECK(s.mu(1) == 2.0);
    CHECK(s.mu(2) == 5.0);
    CHECK(s.mu(3) == 5.0);
    CHECK(s.mu(4) == 8.0);
    CHECK(s.counting(8.0) == 4);
  }
  SUBCASE("counting fit: kappa_1 <= 1 for the 1-D lattice") {
    const auto s = transverse_box_spectrum(1, 1e6);
    CHECK(s.theta1 == 0.5);
    CHECK(s.kappa1 <= 1.0 + 1e-12);
    CHECK(s.kappa1 == doctest::Approx(1.0)); // attained at r = 1
  }
  SUBCASE("counting monotonicity") {
    const auto s = transverse_box_spectrum(2, 60.0);
    for (double r = 1.0; r < 60.0; r += 0.7)
      CHECK(s.counting(r) <= s.counting(r + 0.7));
  }
  SUBCASE("capacity and domain errors") {
    CHECK_THROWS_AS(transverse_box_spectrum(4, 10.0), contract_error);
    CHECK_THROWS_AS(transverse_box_spectrum(1, 0.5), contract_error);
    CHECK_THROWS_AS(transverse_box_spectrum(3, 1e9, 1000), contract_error);
  }
}

TEST_CASE("observation vectors") {
  const Eigenpair1D boundary = dirichlet_laplacian_mode(4, Normalization::boundary);
  const ObservationVector ob = observation_vector(boundary, Normalization::boundary);
  CHECK(ob.scalar_kind);
  CHECK(ob.scalar == 1.0);

  const Window full{0.0, pi};
  const Eigenpair1D internal =
      dirichlet_laplacian_mode(1, Normalization::internal, full);
  const ObservationVector oi = observation_vector(internal, Normalization::internal);
  CHECK_FALSE(oi.scalar_kind);
  const double norm2 = window_integral(
      (oi.samples.array() * oi.samples.array()).matrix(), full.a, full.b);
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(observation_vector(internal, Normalization::boundary),
                  contract_error);
  CHECK_THROWS_AS(observation_vector(boundary, Normalization::internal),
                  contract_error);
  CHECK_THROWS_AS(
      observation_vector(internal, Normalization::internal, Window{0.7, 0.7}),
      contract_error);
}
