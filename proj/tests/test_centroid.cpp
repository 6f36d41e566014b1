#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "scode/centroid.hpp"
#include "scode/gaussian.hpp"
#include "scode/random_gen.hpp"

using namespace scode;

namespace {

EstimatorConfig mc_cfg(std::int64_t samples, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  return cfg;
}

SimplicialCone wedge(double lo_deg, double hi_deg) {
  Eigen::MatrixXd g(2, 2);
  g.col(0) << std::cos(lo_deg * M_PI / 180.0), std::sin(lo_deg * M_PI / 180.0);
  g.col(1) << std::cos(hi_deg * M_PI / 180.0), std::sin(hi_deg * M_PI / 180.0);
  return SimplicialCone(g);
}

/// Generators with prescribed pairwise angles via the Gram matrix.
SimplicialCone cone_from_angles_deg(double a12, double a13, double a23) {
  Eigen::Matrix3d gram;
  gram << 1.0, std::cos(a12 * M_PI / 180.0), std::cos(a13 * M_PI / 180.0),
      std::cos(a12 * M_PI / 180.0), 1.0, std::cos(a23 * M_PI / 180.0),
      std::cos(a13 * M_PI / 180.0), std::cos(a23 * M_PI / 180.0), 1.0;
  Eigen::LLT<Eigen::Matrix3d> llt(gram);
  REQUIRE(llt.info() == Eigen::Success);
  Eigen::Matrix3d gens = llt.matrixL().transpose();
  for (int j = 0; j < 3; ++j) gens.col(j) /= gens.col(j).norm();
  return SimplicialCone(gens);
}

}  // namespace

TEST_CASE("regular-simplex cells have their axis as centroid") {
  std::mt19937_64 rng(3);
  for (int n : {2, 3}) {
    Codebook w = regular_simplex(n);
    VertexTuple v = optimal_vertices(w);
    for (double sigma : {0.5, 1.0}) {
      GaussianChannel chan{sigma, n};
      SimplicialCone cell = cell_cone(v, 0);
      EstimatorConfig cfg = mc_cfg(400000, 2024);
      CentroidResult r = centroid_fixed_point(cell, chan, cfg, 200, 1e-6);
      CHECK(r.converged);
      CHECK((r.centroid - w.word(0)).norm() <= 8e-3);
      CHECK((r.centroid - w.word(0)).norm() <= 6.0 * std::max(r.uncertainty, 1e-4));

      // start independence under the same frozen stream
      CentroidResult other = centroid_fixed_point(
          cell, chan, cfg, random_interior_point(cell, rng), 200, 1e-6);
      CHECK(other.converged);
      CHECK((other.centroid - r.centroid).norm() <= 1e-5);
    }
  }
}

TEST_CASE("the positive ray's centroid is +1") {
  SimplicialCone ray(Eigen::MatrixXd::Ones(1, 1));
  GaussianChannel chan{1.0, 1};
  CentroidResult r = centroid_fixed_point(ray, chan, mc_cfg(10000, 1), 50, 1e-9);
  CHECK(r.converged);
  CHECK(r.centroid(0) == Catch::Approx(1.0).margin(1e-15));
  CHECK(r.residual == 0.0);
}

TEST_CASE("wedge centroid matches the direct probability maximizer") {
  // independent route: golden-section maximization of the wedge probability
  // over the arc, with the quadrature backend as objective
  SimplicialCone w = wedge(90.0, 150.0);
  GaussianChannel chan{1.0, 2};
  EstimatorConfig quad = mc_cfg(1, 0);
  quad.method = EstimatorMethod::wedge_2d;

  CentroidResult r = centroid_fixed_point(w, chan, quad, 300, 1e-10);
  REQUIRE(r.converged);

  auto prob_at = [&](double theta) {
    Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    return cone_measure(w, u, chan, quad).measure;
  };
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 90.0 * M_PI / 180.0, hi = 150.0 * M_PI / 180.0;
  double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
  double f1 = prob_at(x1), f2 = prob_at(x2);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = prob_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = prob_at(x1);
    }
  }
  const double theta_best = 0.5 * (lo + hi);
  const double theta_fp = std::atan2(r.centroid(1), r.centroid(0));
  CHECK(std::abs(theta_fp - theta_best) <= 1e-3);
}

TEST_CASE("adapted frame invariants") {
  Eigen::Vector2d c(1.0, 0.0);
  Eigen::MatrixXd gens(2, 2);
  gens.col(0) = c;
  gens.col(1) << std::cos(110.0 * M_PI / 180.0), std::sin(110.0 * M_PI / 180.0);
  AdaptedFrame f = adapted_frame(c, gens);
  CHECK((f.A_inv.row(0).transpose() - c).norm() <= 1e-12);
  CHECK((f.A_inv.row(1).transpose() - f.projector * gens.col(1)).norm() <= 1e-12);
  CHECK((f.A * f.A_inv - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-10);

  std::mt19937_64 rng(17);
  for (int n : {2, 3, 4}) {
    SimplicialCone cone = random_cone(n, rng);
    Eigen::VectorXd ci = random_interior_point(cone, rng);
    AdaptedFrame fr = adapted_frame(ci, cone.generators());
    // first canonical row vector
    Eigen::RowVectorXd ctA = ci.transpose() * fr.A;
    CHECK(std::abs(ctA(0) - 1.0) <= 1e-10);
    CHECK(ctA.tail(n - 1).norm() <= 1e-10);
    // block diagonal A^T A with leading 1
    Eigen::MatrixXd ata = fr.A.transpose() * fr.A;
    CHECK(std::abs(ata(0, 0) - 1.0) <= 1e-10);
    CHECK(ata.row(0).tail(n - 1).norm() <= 1e-10);
    CHECK(ata.col(0).tail(n - 1).norm() <= 1e-10);
    // round trips
    std::normal_distribution<double> normal;
    for (int t = 0; t < 1000; ++t) {
      Eigen::VectorXd x(n);
      for (int d = 0; d < n; ++d) x(d) = normal(rng);
      CHECK((fr.from_frame(fr.to_frame(x, 0.7), 0.7) - x).norm() <= 1e-10);
    }
  }
}

TEST_CASE("adapted frame rejects degenerate projections") {
  Eigen::Vector2d c(1.0, 0.0);
  Eigen::MatrixXd gens(2, 2);
  gens.col(0) << 0.0, 1.0;
  gens.col(1) = c;  // projects to zero along c
  CHECK_THROWS_AS(adapted_frame(c, gens), SingularFrame);
}

TEST_CASE("radial mean check exceeds one") {
  SimplicialCone ray(Eigen::MatrixXd::Ones(1, 1));
  GaussianChannel chan1{1.0, 1};
  const double ray_val =
      mean_norm_check(ray, Eigen::VectorXd::Ones(1), chan1, mc_cfg(400000, 5));
  CHECK(ray_val == Catch::Approx(1.2876).margin(5e-3));

  Codebook w = regular_simplex(2);
  SimplicialCone cell = cell_cone(optimal_vertices(w), 0);
  GaussianChannel chan2{1.0, 2};
  EstimatorConfig cfg = mc_cfg(1000000, 6);
  const double val = mean_norm_check(cell, w.word(0), chan2, cfg);
  ConeMoments m = cone_conditional_mean(cell, w.word(0), chan2, cfg);
  const double se = std::sqrt(
      (w.word(0).array().square() * m.mean_std_error.array().square()).sum());
  CHECK(val - 1.0 > 3.0 * se);

  // vanishing noise: the conditional mean concentrates at c, the value
  // approaches one from above
  GaussianChannel tiny{0.05, 2};
  const double low = mean_norm_check(cell, w.word(0), tiny, mc_cfg(400000, 7));
  CHECK(low > 1.0);
  CHECK(low < 1.01);
}

TEST_CASE("radial mean check validates its inputs") {
  Codebook w = regular_simplex(2);
  SimplicialCone cell = cell_cone(optimal_vertices(w), 0);
  GaussianChannel chan{1.0, 2};
  CHECK_THROWS_AS(mean_norm_check(cell, -w.word(0), chan, mc_cfg(1000, 1)),
                  std::invalid_argument);
}

TEST_CASE("contraction certificate on a regular cell") {
  Codebook w = regular_simplex(2);
  SimplicialCone cell = cell_cone(optimal_vertices(w), 0);
  GaussianChannel chan{1.0, 2};
  ContractionReport rep = contraction_certificate(cell, chan, mc_cfg(100000, 11), 20);
  CHECK(rep.lipschitz_estimate < 1.0);
  CHECK(rep.mean_norm > 1.0);
  CHECK(rep.jacobian_spectral_bound < 1.0);
  CHECK(rep.passed);
  // analytic bound should dominate the directional finite differences,
  // up to sampling slack
  CHECK(rep.fd_directional_max <= rep.jacobian_spectral_bound + 0.15);
}

TEST_CASE("contraction certificate on the ray is the constant map") {
  SimplicialCone ray(Eigen::MatrixXd::Ones(1, 1));
  GaussianChannel chan{1.0, 1};
  ContractionReport rep = contraction_certificate(ray, chan, mc_cfg(200000, 13), 10);
  CHECK(rep.lipschitz_estimate == 0.0);
  CHECK(rep.mean_norm > 1.0);
  CHECK(rep.jacobian_spectral_bound < 1.0);
  CHECK(rep.passed);
}

TEST_CASE("contraction certificate on a skewed cone") {
  SimplicialCone skewed = cone_from_angles_deg(40.0, 70.0, 100.0);
  GaussianChannel chan{0.5, 3};
  ContractionReport rep = contraction_certificate(skewed, chan, mc_cfg(150000, 17), 15);
  CHECK(rep.passed);
}

TEST_CASE("ten random starts agree on the centroid") {
  std::mt19937_64 rng(19);
  SimplicialCone cone = random_cone(3, rng);
  GaussianChannel chan{1.0, 3};
  EstimatorConfig cfg = mc_cfg(150000, 23);
  const double tol = 1e-5;
  CentroidResult first = centroid_fixed_point(cone, chan, cfg, 300, tol);
  REQUIRE(first.converged);
  for (int s = 0; s < 10; ++s) {
    CentroidResult r = centroid_fixed_point(
        cone, chan, cfg, random_interior_point(cone, rng), 300, tol);
    REQUIRE(r.converged);
    CHECK((r.centroid - first.centroid).norm() <= 10.0 * tol);
  }
}

TEST_CASE("tangent perturbations do not beat the centroid") {
  std::mt19937_64 rng(29);
  Codebook w = regular_simplex(2);
  SimplicialCone cell = cell_cone(optimal_vertices(w), 0);
  GaussianChannel chan{1.0, 2};
  EstimatorConfig cfg = mc_cfg(300000, 31);
  CentroidResult r = centroid_fixed_point(cell, chan, cfg, 200, 1e-6);
  REQUIRE(r.converged);
  const double one_deg = M_PI / 180.0;
  for (int k = 0; k < 8; ++k) {
    Eigen::VectorXd t;
    do {
      Eigen::VectorXd g = random_unit_vector(2, rng);
      t = g - r.centroid.dot(g) * r.centroid;
    } while (t.norm() < 1e-9);
    t /= t.norm();
    Eigen::VectorXd perturbed =
        std::cos(one_deg) * r.centroid + std::sin(one_deg) * t;
    CrnComparison d = crn_compare(cell, perturbed, cell, r.centroid, chan, cfg);
    CHECK(d.difference <= 2.0 * d.std_error);
  }
}

TEST_CASE("centroid is rotation equivariant") {
  std::mt19937_64 rng(37);
  SimplicialCone cone = random_cone(2, rng);
  GaussianChannel chan{1.0, 2};
  EstimatorConfig cfg = mc_cfg(200000, 41);
  Eigen::MatrixXd rot = random_rotation(2, rng);
  CentroidResult base = centroid_fixed_point(cone, chan, cfg, 300, 1e-6);
  CentroidResult rotated = centroid_fixed_point(
      SimplicialCone(rot * cone.generators()), chan, cfg, 300, 1e-6);
  REQUIRE(base.converged);
  REQUIRE(rotated.converged);
  const double budget = 5.0 * (base.uncertainty + rotated.uncertainty) + 1e-4;
  CHECK((rotated.centroid - rot * base.centroid).norm() <= budget);
}

TEST_CASE("no tangential component remains at the converged centroid") {
  std::mt19937_64 rng(43);
  SimplicialCone cone = random_cone(3, rng);
  GaussianChannel chan{1.0, 3};
  CentroidResult r = centroid_fixed_point(cone, chan, mc_cfg(200000, 47), 300, 1e-6);
  REQUIRE(r.converged);
  // independent re-estimate of the mean at the returned centroid
  ConeMoments m = cone_conditional_mean(cone, r.centroid, chan, mc_cfg(200000, 48));
  Eigen::VectorXd tangential = m.mean - r.centroid.dot(m.mean) * r.centroid;
  CHECK(tangential.norm() <= 3.0 * m.mean_std_error.norm() + 5.0 * r.uncertainty);
}

TEST_CASE("fixed point error paths") {
  Codebook w = regular_simplex(2);
  SimplicialCone cell = cell_cone(optimal_vertices(w), 0);
  GaussianChannel chan{1.0, 2};
  CHECK_THROWS_AS(
      centroid_fixed_point(cell, chan, mc_cfg(1000, 1), -w.word(0), 50, 1e-6),
      StartOutsideCone);
  CHECK_THROWS_AS(
      centroid_fixed_point(cell, chan, mc_cfg(1000, 1), w.word(0), 50, 0.0),
      std::invalid_argument);
  // hitting the cap is reported, not thrown
  CentroidResult r =
      centroid_fixed_point(cell, chan, mc_cfg(50000, 1), w.word(0), 1, 1e-12);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.residual >= 1e-12);
}
