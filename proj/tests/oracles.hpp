#pragma once

// Test-only oracles, independent of the library implementation paths they
// are used to check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

/// Mean of N(mu, sigma^2) truncated to (0, inf).
inline double truncated_mean(double mu, double sigma) {
  const double alpha = -mu / sigma;
  const double lambda = normal_pdf(alpha) / (1.0 - normal_cdf(alpha));
  return mu + sigma * lambda;
}

/// Variance of N(mu, sigma^2) truncated to (0, inf).
inline double truncated_var(double mu, double sigma) {
  const double alpha = -mu / sigma;
  const double lambda = normal_pdf(alpha) / (1.0 - normal_cdf(alpha));
  return sigma * sigma * (1.0 + alpha * lambda - lambda * lambda);
}

/// P{ N(c, sigma^2 I_2) in the angular sector [theta_lo, theta_hi] } by
/// plain 2-D tensor quadrature in polar coordinates (midpoint rule). Slow
/// and simple on purpose: this is the reference the fancier routes are
/// checked against.
inline double wedge_prob_bruteforce(const Eigen::Vector2d& c, double sigma,
                                    double theta_lo, double theta_hi,
                                    int n_theta = 1500, int n_r = 1500) {
  const double r_max = c.norm() + 10.0 * sigma;
  const double dth = (theta_hi - theta_lo) / n_theta;
  const double dr = r_max / n_r;
  double total = 0.0;
  for (int it = 0; it < n_theta; ++it) {
    const double th = theta_lo + (it + 0.5) * dth;
    const double ux = std::cos(th), uy = std::sin(th);
    double inner = 0.0;
    for (int ir = 0; ir < n_r; ++ir) {
      const double r = (ir + 0.5) * dr;
      const double dx = r * ux - c.x(), dy = r * uy - c.y();
      inner += r * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
    total += inner;
  }
  return total * dth * dr / (2.0 * M_PI * sigma * sigma);
}

/// Angle of a 2-D unit vector in [0, 2pi).
inline double angle_of(const Eigen::Vector2d& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0.0) a += 2.0 * M_PI;
  return a;
}

inline Eigen::Vector2d unit_at(double angle) {
  return {std::cos(angle), std::sin(angle)};
}

/// Voronoi vertices of three unit words in the plane by the angular
/// bisector construction: the boundary ray between cyclically adjacent
/// words bisects the arc between them, and is the vertex opposite the third
/// word. Returns columns ordered so column j is the vertex opposite word j.
inline Eigen::Matrix<double, 2, 3> bisector_vertices_2d(
    const Eigen::Matrix<double, 2, 3>& words) {
  std::array<int, 3> idx = {0, 1, 2};
  std::array<double, 3> ang = {angle_of(words.col(0)), angle_of(words.col(1)),
                               angle_of(words.col(2))};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return ang[a] < ang[b]; });
  Eigen::Matrix<double, 2, 3> vertices;
  for (int k = 0; k < 3; ++k) {
    const int a = idx[k];
    const int b = idx[(k + 1) % 3];
    const int opposite = idx[(k + 2) % 3];
    double hi = ang[b];
    if (hi < ang[a]) hi += 2.0 * M_PI;
    vertices.col(opposite) = unit_at(0.5 * (ang[a] + hi));
  }
  return vertices;
}

/// Voronoi vertex opposite word j for n+1 unit words in R^n: the unit
/// direction equidistant from all words except word j, on the side closer
/// to them than to word j. Independent of the inverse-matrix construction.
inline Eigen::VectorXd equidistant_vertex(const Eigen::MatrixXd& words, int j) {
  const int n = static_cast<int>(words.rows());
  int i0 = (j == 0) ? 1 : 0;
  Eigen::MatrixXd rows(n - 1, n);
  int r = 0;
  for (int k = 0; k <= n; ++k) {
    if (k == j || k == i0) continue;
    rows.row(r++) = (words.col(i0) - words.col(k)).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  Eigen::VectorXd x = svd.matrixV().col(n - 1);
  if ((words.col(i0) - words.col(j)).dot(x) < 0.0) x = -x;
  return x / x.norm();
}

}  // namespace oracle
