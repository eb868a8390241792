#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <complex>
#include <random>

#include "helpers.hpp"
#include "intgeo/grassmann.hpp"

using namespace intgeo;
using Catch::Approx;

namespace {

Eigen::MatrixXd columns(std::initializer_list<int> idx, int n) {
  Eigen::MatrixXd m(n, static_cast<long>(idx.size()));
  int j = 0;
  for (int i : idx) m.col(j++) = Eigen::VectorXd::Unit(n, i);
  return m;
}

// complement whose concatenated frame [W | U] is positively oriented
Eigen::MatrixXd oriented_complement_frame(const Subspace& w) {
  Subspace u = orthogonal_complement(w);
  Eigen::MatrixXd uf = u.frame();
  Eigen::MatrixXd full(w.n(), w.n());
  full.leftCols(w.k()) = w.frame();
  full.rightCols(w.n() - w.k()) = uf;
  if (full.determinant() < 0) uf.col(uf.cols() - 1) *= -1.0;
  return uf;
}

}  // namespace

TEST_CASE("subspace frames are validated and reproducible from spans") {
  std::mt19937_64 rng(11);
  SECTION("non-orthonormal frames are rejected") {
    Eigen::MatrixXd bad(3, 2);
    bad << 1, 1, 0, 1, 0, 0;
    REQUIRE_THROWS_AS(Subspace(bad), std::invalid_argument);
  }
  SECTION("subspace_from_span keeps the span") {
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::MatrixXd m = testutil::random_matrix(6, 3, rng);
      Subspace w = subspace_from_span(m);
      Eigen::MatrixXd p_frame = w.frame() * w.frame().transpose();
      Eigen::MatrixXd p_span = m * (m.transpose() * m).inverse() * m.transpose();
      REQUIRE((p_frame - p_span).norm() < 1e-10);
    }
  }
  SECTION("dependent columns are rejected") {
    Eigen::MatrixXd m(4, 2);
    m.col(0) = Eigen::VectorXd::Unit(4, 0);
    m.col(1) = 2.0 * m.col(0);
    REQUIRE_THROWS_AS(subspace_from_span(m), std::invalid_argument);
  }
}

TEST_CASE("orthogonal complement splits the identity") {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 30; ++rep) {
    int n = 3 + static_cast<int>(rng() % 6);
    int k = 1 + static_cast<int>(rng() % static_cast<unsigned long>(n - 1));
    Subspace w = random_subspace(n, k, rng);
    Subspace u = orthogonal_complement(w);
    REQUIRE(u.k() == n - k);
    Eigen::MatrixXd sum = w.frame() * w.frame().transpose() + u.frame() * u.frame().transpose();
    REQUIRE((sum - Eigen::MatrixXd::Identity(n, n)).norm() < 1e-12);
  }
}

TEST_CASE("random subspaces have uniform mean projection") {
  std::mt19937_64 rng(13);
  const int n = 7, k = 3, reps = 20000;
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, n);
  for (int rep = 0; rep < reps; ++rep) {
    Subspace w = random_subspace(n, k, rng);
    mean += w.frame() * w.frame().transpose();
  }
  mean /= static_cast<double>(reps);
  REQUIRE((mean - (static_cast<double>(k) / n) * Eigen::MatrixXd::Identity(n, n)).norm() < 0.02);
}

TEST_CASE("calibration values on reference planes") {
  AlternatingForm phi = associative_form();
  AlternatingForm cayley = cayley_form();
  SECTION("calibrated and null planes of the 3-form") {
    REQUIRE(calibration_sq(phi, Subspace(columns({0, 1, 2}, 7))) == Approx(1.0));
    REQUIRE(calibration_sq(phi, Subspace(columns({1, 3, 5}, 7))) == Approx(1.0));
    REQUIRE(calibration_sq(phi, Subspace(columns({0, 1, 3}, 7))) == Approx(0.0).margin(1e-15));
  }
  SECTION("calibrated and null planes of the 4-form") {
    REQUIRE(calibration_sq(cayley, Subspace(columns({0, 1, 2, 3}, 8))) == Approx(1.0));
    REQUIRE(calibration_sq(cayley, Subspace(columns({0, 2, 4, 6}, 8))) == Approx(1.0));
    REQUIRE(calibration_sq(cayley, Subspace(columns({0, 1, 2, 4}, 8))) == Approx(0.0).margin(1e-15));
  }
  SECTION("value is frame independent") {
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 50; ++rep) {
      Subspace w = random_subspace(7, 3, rng);
      // re-span through a random invertible 3x3 mix
      Eigen::MatrixXd mix = testutil::random_matrix(3, 3, rng);
      while (std::abs(mix.determinant()) < 0.1) mix = testutil::random_matrix(3, 3, rng);
      Subspace w2 = subspace_from_span(w.frame() * mix);
      REQUIRE(calibration_sq(phi, w) == Approx(calibration_sq(phi, w2)).margin(1e-12));
    }
  }
  SECTION("degree and dimension mismatches throw") {
    REQUIRE_THROWS_AS(calibration_sq(phi, Subspace(columns({0, 1}, 7))), std::invalid_argument);
    REQUIRE_THROWS_AS(calibration_sq(cayley, Subspace(columns({0, 1, 2, 3}, 7))), std::invalid_argument);
  }
}

TEST_CASE("duality couples calibrations of complementary planes") {
  std::mt19937_64 rng(15);
  AlternatingForm phi = associative_form();
  AlternatingForm psi = hodge_star(phi);
  SECTION("3-form against its dual in R^7") {
    for (int rep = 0; rep < 500; ++rep) {
      Subspace w = random_subspace(7, 3, rng);
      Eigen::MatrixXd u = oriented_complement_frame(w);
      REQUIRE(eval(psi, u) == Approx(eval(phi, w.frame())).margin(1e-12));
    }
  }
  SECTION("the 4-form on R^8 is self-dual") {
    AlternatingForm cayley = cayley_form();
    REQUIRE((hodge_star(cayley) - cayley).norm() < 1e-12);
    for (int rep = 0; rep < 500; ++rep) {
      Subspace w = random_subspace(8, 4, rng);
      Eigen::MatrixXd u = oriented_complement_frame(w);
      REQUIRE(eval(cayley, u) == Approx(eval(cayley, w.frame())).margin(1e-12));
    }
  }
}

TEST_CASE("Kaehler angles on reference planes") {
  HermitianFrame h = standard_hermitian(4);
  SECTION("complex planes have zero angles") {
    KaehlerAngles ka = kaehler_angles(Subspace(columns({0, 1, 2, 3}, 8)), h);
    REQUIRE(ka.cosines(0) == Approx(1.0));
    REQUIRE(ka.cosines(1) == Approx(1.0));
  }
  SECTION("totally real planes have right angles") {
    KaehlerAngles ka = kaehler_angles(Subspace(columns({0, 2, 4, 6}, 8)), h);
    REQUIRE(ka.cosines(0) == Approx(0.0).margin(1e-14));
    REQUIRE(ka.cosines(1) == Approx(0.0).margin(1e-14));
  }
  SECTION("tilted 2-plane has the tilt as its angle") {
    for (double alpha : {0.0, 0.3, 1.0, 1.4}) {
      Eigen::MatrixXd f(8, 2);
      f.col(0) = Eigen::VectorXd::Unit(8, 0);
      f.col(1) = std::cos(alpha) * Eigen::VectorXd::Unit(8, 1) + std::sin(alpha) * Eigen::VectorXd::Unit(8, 2);
      KaehlerAngles ka = kaehler_angles(Subspace(f), h);
      REQUIRE(ka.cosines.size() == 1);
      REQUIRE(ka.cosines(0) == Approx(std::cos(alpha)).margin(1e-12));
    }
  }
  SECTION("angles are invariant under frame changes") {
    std::mt19937_64 rng(16);
    for (int rep = 0; rep < 50; ++rep) {
      Subspace w = random_subspace(8, 4, rng);
      Eigen::MatrixXd mix = testutil::random_matrix(4, 4, rng);
      while (std::abs(mix.determinant()) < 0.1) mix = testutil::random_matrix(4, 4, rng);
      Subspace w2 = subspace_from_span(w.frame() * mix);
      KaehlerAngles a = kaehler_angles(w, standard_hermitian(4));
      KaehlerAngles b = kaehler_angles(w2, standard_hermitian(4));
      REQUIRE((a.cosines - b.cosines).norm() < 1e-10);
    }
  }
}

TEST_CASE("Theta invariant fixtures and modulus identity") {
  HermitianFrame h = standard_hermitian(4);
  SECTION("totally real plane: Theta = 1, sign undetermined") {
    ThetaInvariant th = theta_invariant(Subspace(columns({0, 2, 4, 6}, 8)), h);
    REQUIRE(std::abs(th.value - std::complex<double>(1, 0)) < 1e-14);
    REQUIRE_FALSE(th.sign_determined);
  }
  SECTION("complex plane: Theta = 0") {
    ThetaInvariant th = theta_invariant(Subspace(columns({0, 1, 2, 3}, 8)), h);
    REQUIRE(std::abs(th.value) < 1e-14);
  }
  SECTION("half-dimension requirement") {
    REQUIRE_THROWS_AS(theta_invariant(Subspace(columns({0, 1, 2}, 8)), h), std::invalid_argument);
  }
  SECTION("|Theta| equals the product of angle sines") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 2000; ++rep) {
      Subspace w = random_subspace(8, 4, rng);
      KaehlerAngles ka = kaehler_angles(w, h);
      ThetaInvariant th = theta_invariant(w, h);
      double sines = std::sin(ka.theta(0)) * std::sin(ka.theta(1));
      REQUIRE(std::abs(th.value) == Approx(sines).margin(1e-10));
    }
  }
  SECTION("oriented sign survives frame changes when determined") {
    std::mt19937_64 rng(18);
    int determined = 0;
    for (int rep = 0; rep < 200; ++rep) {
      Subspace w = random_subspace(8, 4, rng);
      ThetaInvariant a = theta_invariant(w, h);
      if (!a.sign_determined) continue;
      ++determined;
      Eigen::MatrixXd mix = testutil::random_matrix(4, 4, rng);
      while (std::abs(mix.determinant()) < 0.1) mix = testutil::random_matrix(4, 4, rng);
      ThetaInvariant b = theta_invariant(subspace_from_span(w.frame() * mix), h);
      REQUIRE(std::abs(a.value - b.value) < 1e-9);
    }
    REQUIRE(determined > 150);  // degenerate restrictions are measure zero
  }
}

TEST_CASE("Cayley calibration decomposes through hermitian invariants") {
  AlternatingForm cayley = cayley_form();
  HermitianFrame h = standard_hermitian(4);
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 2000; ++rep) {
    Subspace w = random_subspace(8, 4, rng);
    double direct = calibration_sq(cayley, w);
    REQUIRE(cayley_sq_via_angles(w, h) == Approx(direct).margin(1e-10));
    // split form in one fixed frame: calibration = pfaffian of the restricted
    // Kaehler form + Re(complex determinant); both terms flip together under
    // orientation reversal, so the raw frame must be used for both
    Eigen::MatrixXd c = w.frame();
    double pf = detail::pfaffian(detail::omega_gram(c));
    std::complex<double> raw = detail::complex_coords(c).determinant();
    double split = pf + std::real(raw);
    REQUIRE(split * split == Approx(direct).margin(1e-10));
  }
}

TEST_CASE("induced complex structure on a hyperplane") {
  AlternatingForm phi = associative_form();
  SECTION("reference direction gives the block rotation") {
    Eigen::MatrixXd j = induced_complex_structure(Eigen::VectorXd::Unit(7, 0), phi);
    REQUIRE((j * Eigen::VectorXd::Unit(7, 1) + Eigen::VectorXd::Unit(7, 2)).norm() < 1e-12);
    REQUIRE((j * Eigen::VectorXd::Unit(7, 2) - Eigen::VectorXd::Unit(7, 1)).norm() < 1e-12);
    REQUIRE((j * Eigen::VectorXd::Unit(7, 0)).norm() < 1e-12);
  }
  SECTION("random directions: square, compatibility, skewness") {
    std::mt19937_64 rng(20);
    for (int rep = 0; rep < 100; ++rep) {
      Eigen::VectorXd x = testutil::random_unit(7, rng);
      Eigen::MatrixXd j = induced_complex_structure(x, phi);
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(7, 7) - x * x.transpose();
      REQUIRE((j * j + p).norm() < 1e-9);
      REQUIRE((j + j.transpose()).norm() < 1e-9);
      AlternatingForm ix = interior_product(x, phi);
      for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd v = p * testutil::random_unit(7, rng);
        Eigen::VectorXd w = p * testutil::random_unit(7, rng);
        Eigen::MatrixXd pair(7, 2);
        pair.col(0) = j * v;
        pair.col(1) = w;
        REQUIRE(eval(ix, pair) == Approx(v.dot(w)).margin(1e-9));
      }
    }
  }
  SECTION("generic 3-forms are rejected") {
    std::mt19937_64 rng(21);
    AlternatingForm junk(7, 3);
    junk.add_term({0, 1, 2}, 1.0);
    junk.add_term({0, 3, 4}, 0.5);
    REQUIRE_THROWS_AS(induced_complex_structure(Eigen::VectorXd::Unit(7, 6), junk), std::invalid_argument);
  }
}

TEST_CASE("adapted hermitian frames trivialize the 3-form on a hyperplane") {
  AlternatingForm phi = associative_form();
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd x = (rep == 0) ? Eigen::VectorXd::Unit(7, 0) : Eigen::VectorXd(testutil::random_unit(7, rng));
    HermitianFrame h = adapted_hermitian_frame(x, phi);
    REQUIRE((h.frame.transpose() * h.frame - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-10);
    REQUIRE((h.frame.transpose() * x).norm() < 1e-10);
    // the pulled-back 3-form is exactly the real part of the complex volume form
    AlternatingForm pulled = pullback(phi, h.frame);
    REQUIRE((pulled - complex_volume_re(3)).norm() < 1e-9);
    // J x_j = y_j for the induced structure
    Eigen::MatrixXd j = induced_complex_structure(x, phi);
    for (int p = 0; p < 3; ++p) REQUIRE((j * h.frame.col(2 * p) - h.frame.col(2 * p + 1)).norm() < 1e-9);
  }
}

TEST_CASE("hyperplane restriction identities of the 3-form") {
  AlternatingForm phi = associative_form();
  std::mt19937_64 rng(23);
  Eigen::VectorXd x = testutil::random_unit(7, rng);
  HermitianFrame h = adapted_hermitian_frame(x, phi);

  SECTION("3-planes: calibration is the real part of Theta") {
    for (int rep = 0; rep < 2000; ++rep) {
      Subspace w6 = random_subspace(6, 3, rng);
      Subspace w(h.frame * w6.frame());
      double cal = eval(phi, w.frame());
      ThetaInvariant th = theta_invariant(w, h);
      REQUIRE(cal == Approx(std::real(th.value)).margin(1e-10));
      KaehlerAngles ka = kaehler_angles(w, h);
      double c = ka.cosines(0);
      double rhs = 0.5 * (std::real(th.value * th.value) + 1.0 - c * c);
      REQUIRE(cal * cal == Approx(rhs).margin(1e-10));
    }
  }
  SECTION("4-planes: a complex line is always present and the complement calibration is cos(theta_2)") {
    for (int rep = 0; rep < 2000; ++rep) {
      Subspace w6 = random_subspace(6, 4, rng);
      Subspace w(h.frame * w6.frame());
      KaehlerAngles ka = kaehler_angles(w, h);
      REQUIRE(ka.cosines(0) == Approx(1.0).margin(1e-9));
      double comp = calibration_sq(phi, orthogonal_complement(w));
      REQUIRE(comp == Approx(ka.cosines(1) * ka.cosines(1)).margin(1e-10));
    }
  }
}

TEST_CASE("hermitian coordinate extraction requires containment") {
  HermitianFrame h = adapted_hermitian_frame(Eigen::VectorXd::Unit(7, 0), associative_form());
  std::mt19937_64 rng(24);
  Subspace w = random_subspace(7, 3, rng);  // generic plane leaves the hyperplane
  REQUIRE_THROWS_AS(theta_invariant(w, h), std::invalid_argument);
}
