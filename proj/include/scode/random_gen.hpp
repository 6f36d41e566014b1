#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "scode/geometry.hpp"

namespace scode {

inline Eigen::VectorXd random_unit_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  double n = 0.0;
  do {
    for (int d = 0; d < dim; ++d) v(d) = normal(rng);
    n = v.norm();
  } while (n < 1e-12);
  return v / n;
}

/// Haar-distributed rotation via QR of a Gaussian matrix with the sign of
/// the R diagonal fixed. Determinant may be -1; for the isometry properties
/// exercised here reflections are as good as rotations.
inline Eigen::MatrixXd random_rotation(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

/// Uniform codewords rejected until the tuple is affinely independent and
/// the pair (W, V*(W)) is valid.
inline Codebook random_codebook(int dim, std::mt19937_64& rng,
                                double min_rank_ratio = kRankRatioTol) {
  for (;;) {
    Eigen::MatrixXd words(dim, dim + 1);
    for (int i = 0; i <= dim; ++i) words.col(i) = random_unit_vector(dim, rng);
    bool distinct = true;
    for (int i = 0; i <= dim && distinct; ++i)
      for (int j = 0; j < i && distinct; ++j)
        if ((words.col(i) - words.col(j)).norm() < 1e-9) distinct = false;
    if (!distinct) continue;
    Codebook w(words);
    bool independent = true;
    for (int i = 0; i <= dim; ++i)
      if (rank_ratio(w.difference_matrix(i)) <= min_rank_ratio) {
        independent = false;
        break;
      }
    if (!independent) continue;
    if (!validate_pair(w, optimal_vertices(w)).valid) continue;
    return w;
  }
}

/// Uniform unit generators rejected until reasonably conditioned.
inline SimplicialCone random_cone(int dim, std::mt19937_64& rng,
                                  double min_rank_ratio = 0.05) {
  for (;;) {
    Eigen::MatrixXd g(dim, dim);
    for (int j = 0; j < dim; ++j) g.col(j) = random_unit_vector(dim, rng);
    if (rank_ratio(g) <= min_rank_ratio) continue;
    return SimplicialCone(std::move(g));
  }
}

/// Normalized strictly positive combination of the generators.
inline Eigen::VectorXd random_interior_point(const SimplicialCone& cone,
                                             std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const int n = cone.dim();
  Eigen::VectorXd a(n);
  for (int j = 0; j < n; ++j) a(j) = std::abs(normal(rng)) + 0.05;
  Eigen::VectorXd x = cone.generators() * a;
  return x / x.norm();
}

/// Moves x along a random tangent direction by an angle drawn uniformly
/// from (0, max_angle].
inline Eigen::VectorXd rotate_within_cap(const Eigen::VectorXd& x,
                                         double max_angle,
                                         std::mt19937_64& rng) {
  const int dim = static_cast<int>(x.size());
  if (dim == 1) return x;  // no tangent directions on S^0
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::VectorXd t;
  double n = 0.0;
  do {
    Eigen::VectorXd g = random_unit_vector(dim, rng);
    t = g - x.dot(g) * x;
    n = t.norm();
  } while (n < 1e-9);
  t /= n;
  const double angle = max_angle * uni(rng);
  return std::cos(angle) * x + std::sin(angle) * t;
}

/// Regular simplex with each word independently moved within a geodesic cap,
/// rejected until the perturbed tuple is still a valid codebook.
inline Codebook perturbed_regular_simplex(int dim, double max_angle,
                                          std::mt19937_64& rng) {
  const Codebook base = regular_simplex(dim);
  for (;;) {
    Eigen::MatrixXd words(dim, dim + 1);
    for (int i = 0; i <= dim; ++i)
      words.col(i) = rotate_within_cap(base.word(i), max_angle, rng);
    Codebook w(words);
    if (!w.is_affinely_independent()) continue;
    if (!validate_pair(w, optimal_vertices(w)).valid) continue;
    return w;
  }
}

}  // namespace scode
