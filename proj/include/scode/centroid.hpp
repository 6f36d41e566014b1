#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "scode/errors.hpp"
#include "scode/gaussian.hpp"
#include "scode/geometry.hpp"
#include "scode/random_gen.hpp"

namespace scode {

/// Outcome of the fixed-point iteration c <- normalize(E[g_c | g_c in D]).
struct CentroidResult {
  Eigen::VectorXd centroid;
  int iterations = 0;
  double residual = 0.0;   // ||f(c) - c|| at the last step
  bool converged = false;
  /// Direction-error model for the returned centroid: tangential sampling
  /// noise of the mean estimate amplified by the contraction bound,
  /// ||mean stderr|| / (||h|| - 1). Zero for closed-form estimators.
  double uncertainty = 0.0;
};

/// Iterates the normalized conditional mean with a frozen sample stream:
/// every iteration reuses cfg.seed, so the empirical map is deterministic
/// and the iteration converges like a fixed-point scheme on a fixed map.
inline CentroidResult centroid_fixed_point(const SimplicialCone& cone,
                                           const GaussianChannel& chan,
                                           const EstimatorConfig& cfg,
                                           const Eigen::VectorXd& start,
                                           int max_iter, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (std::abs(start.norm() - 1.0) > 1e-9)
    throw StartOutsideCone("start vector is not unit norm");
  if (!cone.contains(start))
    throw StartOutsideCone("start vector is not strictly inside the cone");

  CentroidResult out;
  Eigen::VectorXd c = start;
  for (int it = 0; it < max_iter; ++it) {
    ConeMoments m = cone_conditional_mean(cone, c, chan, cfg);
    const double hn = m.mean.norm();
    Eigen::VectorXd next = m.mean / hn;
    out.residual = (next - c).norm();
    out.iterations = it + 1;
    c = next;
    if (hn > 1.0 + 1e-12)
      out.uncertainty = m.mean_std_error.norm() / (hn - 1.0);
    else
      out.uncertainty = m.mean_std_error.norm();
    if (out.residual < tol) {
      out.converged = true;
      break;
    }
  }
  out.centroid = c;
  return out;
}

/// Default start: the cone center (normalized generator sum).
inline CentroidResult centroid_fixed_point(const SimplicialCone& cone,
                                           const GaussianChannel& chan,
                                           const EstimatorConfig& cfg,
                                           int max_iter = 200,
                                           double tol = 1e-6) {
  return centroid_fixed_point(cone, chan, cfg, cone.center(), max_iter, tol);
}

/// Frame adapted to a unit vector c inside a cone: rows of A_inv are
/// (c, P_c v_2, ..., P_c v_n) with P_c = I - c c^T. In this frame
/// u(x) = A_inv (x - c) / sigma has first coordinate along c, and A^T A is
/// block diagonal with a leading 1.
struct AdaptedFrame {
  Eigen::VectorXd c;
  Eigen::MatrixXd A_inv;
  Eigen::MatrixXd A;
  Eigen::MatrixXd projector;

  Eigen::VectorXd to_frame(const Eigen::VectorXd& x, double sigma) const {
    return A_inv * ((x - c) / sigma);
  }
  Eigen::VectorXd from_frame(const Eigen::VectorXd& u, double sigma) const {
    return sigma * (A * u) + c;
  }
};

inline AdaptedFrame adapted_frame(const Eigen::VectorXd& c,
                                  const Eigen::MatrixXd& generators) {
  const int n = static_cast<int>(c.size());
  if (generators.rows() != n || generators.cols() != n)
    throw std::invalid_argument("adapted_frame: generators must be n x n");
  if (std::abs(c.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("adapted_frame: c must be unit norm");
  AdaptedFrame f;
  f.c = c;
  f.projector = Eigen::MatrixXd::Identity(n, n) - c * c.transpose();
  f.A_inv.resize(n, n);
  f.A_inv.row(0) = c.transpose();
  for (int j = 1; j < n; ++j)
    f.A_inv.row(j) = (f.projector * generators.col(j)).transpose();
  if (rank_ratio(f.A_inv) <= kRankRatioTol)
    throw SingularFrame("projected generators are linearly dependent");
  f.A = f.A_inv.fullPivLu().inverse();
  return f;
}

/// Estimate of E[<c, g_c> | g_c in D] for a unit interior c. Exceeding one
/// is what makes the normalized-mean map contract. Requires the cone to be
/// strictly inscribed in a half space (certified by the facet-normal sum).
inline double mean_norm_check(const SimplicialCone& cone, const Eigen::VectorXd& c,
                              const GaussianChannel& chan,
                              const EstimatorConfig& cfg) {
  if (std::abs(c.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("mean_norm_check: c must be unit norm");
  if (!cone.contains(c))
    throw std::invalid_argument("mean_norm_check: c must be strictly interior");
  cone.half_space_witness();  // throws ConeNotInHalfSpace on failure
  ConeMoments m = cone_conditional_mean(cone, c, chan, cfg);
  return c.dot(m.mean);
}

/// Empirical contraction evidence for the normalized-mean map on one cone.
struct ContractionReport {
  double mean_norm = 0.0;              // min ||E[g_c | D]|| over probe points
  double lipschitz_estimate = 0.0;     // max ||f(c)-f(c')|| / ||c-c'||
  double jacobian_spectral_bound = 0.0;  // max (1/||h||) lambda_max(cov)/sigma^2
  double fd_directional_max = 0.0;     // finite-difference cross-check
  bool passed = false;
};

/// Samples `trials` interior pairs and reports the worst empirical
/// Lipschitz ratio of the frozen-stream map, plus the analytic spectral
/// bound (1/||h||) lambda_max(cov)/sigma^2 at a handful of probe points.
/// Directional finite differences at up to 3 points cross-check the
/// analytic bound.
inline ContractionReport contraction_certificate(const SimplicialCone& cone,
                                                 const GaussianChannel& chan,
                                                 const EstimatorConfig& cfg,
                                                 int trials) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int n = cone.dim();
  std::mt19937_64 rng(derive_seed(cfg.seed, 0x5eedf00dULL));

  auto empirical_map = [&](const Eigen::VectorXd& c) {
    ConeMoments m = cone_conditional_mean(cone, c, chan, cfg);
    return std::make_pair(Eigen::VectorXd(m.mean / m.mean.norm()), m.mean.norm());
  };

  ContractionReport rep;
  rep.mean_norm = std::numeric_limits<double>::infinity();

  // analytic bound at the center and a few random interior probes
  const int probes = std::min(trials, 4);
  for (int p = 0; p < probes; ++p) {
    Eigen::VectorXd c = (p == 0) ? cone.center() : random_interior_point(cone, rng);
    ConeMoments m = cone_conditional_cov(cone, c, chan, cfg);
    const double hn = m.mean.norm();
    rep.mean_norm = std::min(rep.mean_norm, hn);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.covariance);
    rep.jacobian_spectral_bound =
        std::max(rep.jacobian_spectral_bound,
                 eig.eigenvalues().maxCoeff() / (chan.sigma * chan.sigma * hn));
  }

  // empirical Lipschitz ratios on a common frozen stream
  if (n > 1) {
    for (int t = 0; t < trials; ++t) {
      Eigen::VectorXd a = random_interior_point(cone, rng);
      Eigen::VectorXd b;
      double sep = 0.0;
      for (int attempt = 0; attempt < 50; ++attempt) {
        b = random_interior_point(cone, rng);
        sep = (a - b).norm();
        if (sep >= 0.02) break;
      }
      if (sep < 0.02) continue;
      auto [fa, ha] = empirical_map(a);
      auto [fb, hb] = empirical_map(b);
      rep.mean_norm = std::min({rep.mean_norm, ha, hb});
      rep.lipschitz_estimate =
          std::max(rep.lipschitz_estimate, (fa - fb).norm() / sep);
    }

    // directional finite differences
    std::normal_distribution<double> normal;
    for (int p = 0; p < 3; ++p) {
      Eigen::VectorXd c = random_interior_point(cone, rng);
      Eigen::VectorXd g(n);
      for (int d = 0; d < n; ++d) g(d) = normal(rng);
      Eigen::VectorXd t = g - c.dot(g) * c;
      if (t.norm() < 1e-9) continue;
      t /= t.norm();
      Eigen::VectorXd cp = c + 0.02 * t;
      cp /= cp.norm();
      if (!cone.contains(cp)) continue;
      auto [fc, hc] = empirical_map(c);
      auto [fp, hp] = empirical_map(cp);
      rep.fd_directional_max = std::max(
          rep.fd_directional_max, (fp - fc).norm() / (cp - c).norm());
    }
  }

  rep.passed = rep.mean_norm > 1.0 && rep.lipschitz_estimate < 1.0 &&
               rep.jacobian_spectral_bound < 1.0;
  return rep;
}

}  // namespace scode
