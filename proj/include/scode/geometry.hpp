#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "scode/errors.hpp"

namespace scode {

inline constexpr double kUnitNormTol = 1e-12;
// Affine-independence gate: smallest singular value must exceed this fraction
// of the largest. Separates genuine degeneracy from round-off at desk scale.
inline constexpr double kRankRatioTol = 1e-8;

/// sigma_min / sigma_max of a matrix, 0 for an empty or zero matrix.
inline double rank_ratio(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

/// Ordered tuple of n+1 unit-norm words in R^n, stored as matrix columns.
///
/// Construction checks shape, unit norms and pairwise distinctness. Affine
/// independence is a property of the configuration, not the container; it is
/// queryable here and enforced by the operations that require it.
class Codebook {
 public:
  explicit Codebook(Eigen::MatrixXd words) : words_(std::move(words)) {
    const int n = static_cast<int>(words_.rows());
    if (n < 1 || words_.cols() != n + 1)
      throw InvalidGeometry("codebook must be n x (n+1) with n >= 1");
    for (int i = 0; i < words_.cols(); ++i) {
      if (std::abs(words_.col(i).norm() - 1.0) > kUnitNormTol)
        throw InvalidGeometry("codeword " + std::to_string(i) + " is not unit norm");
      for (int j = 0; j < i; ++j)
        if ((words_.col(i) - words_.col(j)).norm() < 1e-9)
          throw InvalidGeometry("codewords " + std::to_string(j) + " and " +
                                std::to_string(i) + " coincide");
    }
  }

  int dim() const { return static_cast<int>(words_.rows()); }
  int size() const { return static_cast<int>(words_.cols()); }
  const Eigen::MatrixXd& words() const { return words_; }
  Eigen::VectorXd word(int i) const { return words_.col(i); }

  /// Rows (w_i - w_j)^T for j != i in ascending j order.
  Eigen::MatrixXd difference_matrix(int i) const {
    const int n = dim();
    Eigen::MatrixXd d(n, n);
    int r = 0;
    for (int j = 0; j <= n; ++j) {
      if (j == i) continue;
      d.row(r++) = (words_.col(i) - words_.col(j)).transpose();
    }
    return d;
  }

  bool is_affinely_independent(double tol = kRankRatioTol) const {
    for (int i = 0; i <= dim(); ++i)
      if (rank_ratio(difference_matrix(i)) <= tol) return false;
    return true;
  }

 private:
  Eigen::MatrixXd words_;
};

/// Ordered tuple of n+1 unit vectors whose n-subsets generate the decision
/// cones. vertex i is the one absent from cell i.
class VertexTuple {
 public:
  explicit VertexTuple(Eigen::MatrixXd vertices) : vertices_(std::move(vertices)) {
    const int n = static_cast<int>(vertices_.rows());
    if (n < 1 || vertices_.cols() != n + 1)
      throw InvalidGeometry("vertex tuple must be n x (n+1) with n >= 1");
    for (int i = 0; i < vertices_.cols(); ++i)
      if (std::abs(vertices_.col(i).norm() - 1.0) > kUnitNormTol)
        throw InvalidGeometry("vertex " + std::to_string(i) + " is not unit norm");
  }

  int dim() const { return static_cast<int>(vertices_.rows()); }
  int size() const { return static_cast<int>(vertices_.cols()); }
  const Eigen::MatrixXd& vertices() const { return vertices_; }
  Eigen::VectorXd vertex(int i) const { return vertices_.col(i); }

  /// Columns of the tuple with vertex i removed, ascending original index.
  Eigen::MatrixXd without(int i) const {
    const int n = dim();
    Eigen::MatrixXd g(n, n);
    int c = 0;
    for (int j = 0; j <= n; ++j)
      if (j != i) g.col(c++) = vertices_.col(j);
    return g;
  }

  bool is_affinely_independent(double tol = kRankRatioTol) const {
    const int n = dim();
    for (int i = 0; i <= n; ++i) {
      Eigen::MatrixXd d(n, n);
      int r = 0;
      for (int j = 0; j <= n; ++j) {
        if (j == i) continue;
        d.row(r++) = (vertices_.col(i) - vertices_.col(j)).transpose();
      }
      if (rank_ratio(d) <= tol) return false;
    }
    return true;
  }

  bool subsets_linearly_independent(double tol = kRankRatioTol) const {
    for (int i = 0; i <= dim(); ++i)
      if (rank_ratio(without(i)) <= tol) return false;
    return true;
  }

 private:
  Eigen::MatrixXd vertices_;
};

/// Simplicial cone {sum_j a_j v_j : a_j > 0} spanned by n linearly
/// independent unit generators, with cached inward facet normals.
///
/// Facet normal e_j is orthogonal to every generator except v_j and satisfies
/// <e_j, v_j> > 0, so membership can be tested two ways: all barycentric
/// coordinates positive, or all <e_j, x> positive.
class SimplicialCone {
 public:
  explicit SimplicialCone(Eigen::MatrixXd generators)
      : generators_(std::move(generators)) {
    const int n = static_cast<int>(generators_.rows());
    if (n < 1 || generators_.cols() != n)
      throw InvalidGeometry("cone needs n generators in R^n");
    for (int j = 0; j < n; ++j)
      if (std::abs(generators_.col(j).norm() - 1.0) > kUnitNormTol)
        throw InvalidGeometry("cone generator " + std::to_string(j) +
                              " is not unit norm");
    if (rank_ratio(generators_) <= kRankRatioTol)
      throw LinearDependence("cone generators are linearly dependent");
    // Rows of G^{-1} are orthogonal to all generators but one and already
    // positively oriented (<row_j, v_j> = 1).
    Eigen::MatrixXd inv = generators_.fullPivLu().inverse();
    normals_ = inv;
    for (int j = 0; j < n; ++j) normals_.row(j) /= normals_.row(j).norm();
    lu_.compute(generators_);
  }

  int dim() const { return static_cast<int>(generators_.rows()); }
  const Eigen::MatrixXd& generators() const { return generators_; }
  /// Rows are the inward unit facet normals.
  const Eigen::MatrixXd& facet_normals() const { return normals_; }

  Eigen::VectorXd barycentric(const Eigen::VectorXd& x) const {
    return lu_.solve(x);
  }

  bool contains(const Eigen::VectorXd& x) const {
    return ((normals_ * x).array() > 0.0).all();
  }

  bool contains_barycentric(const Eigen::VectorXd& x) const {
    return (barycentric(x).array() > 0.0).all();
  }

  /// Normalized generator sum; strictly interior by construction.
  Eigen::VectorXd center() const {
    Eigen::VectorXd s = generators_.rowwise().sum();
    return s / s.norm();
  }

  /// Unit vector with positive inner product against every generator,
  /// certifying that the cone is strictly inscribed in a half space. The
  /// normalized facet-normal sum always works for a simplicial cone; the
  /// check guards numerically marginal inputs.
  Eigen::VectorXd half_space_witness() const {
    Eigen::VectorXd u = normals_.colwise().sum().transpose();
    const double nu = u.norm();
    if (nu <= 0.0) throw ConeNotInHalfSpace("degenerate facet-normal sum");
    u /= nu;
    if ((u.transpose() * generators_).minCoeff() <= 0.0)
      throw ConeNotInHalfSpace("cone is not strictly inside a half space");
    return u;
  }

 private:
  Eigen::MatrixXd generators_;
  Eigen::MatrixXd normals_;
  Eigen::FullPivLU<Eigen::MatrixXd> lu_;
};

/// Cone of decision cell i, generated by the vertices V \ i.
inline SimplicialCone cell_cone(const VertexTuple& v, int i) {
  return SimplicialCone(v.without(i));
}

/// Regular simplex codebook: n+1 unit words with pairwise inner product
/// -1/n and zero centroid. Built from the centered standard basis of
/// R^{n+1} expressed in an orthonormal basis of the all-ones complement.
inline Codebook regular_simplex(int dim) {
  if (dim < 1) throw std::invalid_argument("regular_simplex: dim must be >= 1");
  const int m = dim + 1;
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(m, 1);
  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(ones)
                          .householderQ() *
                      Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd basis = q.rightCols(dim);  // orthonormal basis of 1^perp
  const double scale = std::sqrt(static_cast<double>(m) / dim);
  Eigen::MatrixXd words(dim, m);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(m, -1.0 / m);
    u(i) += 1.0;
    words.col(i) = scale * (basis.transpose() * u);
  }
  // Fix the reflection freedom of the basis so the result is reproducible
  // (and word 0 = +1 in dimension one).
  for (int d = 0; d < dim; ++d)
    if (words(d, 0) < 0.0) words.row(d) = -words.row(d);
  return Codebook(words);
}

namespace detail {
inline void require_affinely_independent(const Codebook& w) {
  for (int i = 0; i <= w.dim(); ++i)
    if (rank_ratio(w.difference_matrix(i)) <= kRankRatioTol)
      throw AffinelyDependent("codeword difference matrix W_" +
                              std::to_string(i) + " is rank deficient");
}
}  // namespace detail

/// Normalized columns of W_i^{-1}: the generators of the Voronoi cell of
/// word i. Column k corresponds to the k-th index j != i in ascending order,
/// i.e. to vertex j. Throws AffinelyDependent on rank-deficient W_i.
inline Eigen::MatrixXd cell_generator_candidates(const Codebook& w, int i) {
  Eigen::MatrixXd wi = w.difference_matrix(i);
  if (rank_ratio(wi) <= kRankRatioTol)
    throw AffinelyDependent("codeword difference matrix W_" + std::to_string(i) +
                            " is rank deficient");
  Eigen::MatrixXd inv = wi.fullPivLu().inverse();
  for (int k = 0; k < inv.cols(); ++k) inv.col(k) /= inv.col(k).norm();
  return inv;
}

/// Optimal vertex tuple V*(W): cone(V \ i) is the Voronoi cell of word i.
///
/// Vertex j is read off as the normalized column of the inverse difference
/// matrix of any cell i != j; the shared columns of different cells agree, so
/// the lowest such cell is used.
inline VertexTuple optimal_vertices(const Codebook& w) {
  detail::require_affinely_independent(w);
  const int n = w.dim();
  Eigen::MatrixXd from_cell0 = cell_generator_candidates(w, 0);
  Eigen::MatrixXd from_cell1 = cell_generator_candidates(w, 1);
  Eigen::MatrixXd vertices(n, n + 1);
  vertices.col(0) = from_cell1.col(0);  // index 0 is absent from cell 1's rows
  for (int j = 1; j <= n; ++j) vertices.col(j) = from_cell0.col(j - 1);
  return VertexTuple(vertices);
}

/// Householder reflection of x across the origin hyperplane spanned by the
/// n-1 columns of `facet_span`. In dimension one the hyperplane is {0} and
/// the reflection is plain negation.
inline Eigen::VectorXd reflect_across_facet(const Eigen::VectorXd& x,
                                            const Eigen::MatrixXd& facet_span) {
  const auto n = x.size();
  if (facet_span.cols() != n - 1 || (n > 1 && facet_span.rows() != n))
    throw std::invalid_argument("reflect_across_facet: span must be n x (n-1)");
  if (n == 1) return -x;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(facet_span, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  if (s(0) <= 0.0 || s(s.size() - 1) / s(0) <= kRankRatioTol)
    throw DegenerateFacet("facet spanning vectors are rank deficient");
  Eigen::VectorXd u = svd.matrixU().col(n - 1);
  return x - 2.0 * u.dot(x) * u;
}

/// Vertices V \ i with vertex j also removed: the span of the facet shared
/// by cells i and j.
inline Eigen::MatrixXd facet_span(const VertexTuple& v, int i, int j) {
  const int n = v.dim();
  Eigen::MatrixXd span(n, n - 1);
  int c = 0;
  for (int k = 0; k <= n; ++k)
    if (k != i && k != j) span.col(c++) = v.vertex(k);
  return span;
}

/// Per-cell validity report for a (codebook, vertex tuple) pair.
struct PairValidity {
  Eigen::MatrixXd codebook_words;
  Eigen::MatrixXd vertex_columns;
  std::vector<bool> containment;        // w_i strictly inside cone(V \ i)
  std::vector<bool> cell_independent;   // V \ i linearly independent
  bool codebook_affinely_independent = false;
  bool vertices_affinely_independent = false;
  bool valid = false;
};

/// Reports, never throws (beyond dimension mismatch): containment of each
/// word in its cell cone via barycentric coordinates, plus the independence
/// conditions.
inline PairValidity validate_pair(const Codebook& w, const VertexTuple& v) {
  if (w.dim() != v.dim())
    throw std::invalid_argument("validate_pair: dimension mismatch");
  const int n = w.dim();
  PairValidity out;
  out.codebook_words = w.words();
  out.vertex_columns = v.vertices();
  out.containment.resize(n + 1, false);
  out.cell_independent.resize(n + 1, false);
  out.codebook_affinely_independent = w.is_affinely_independent();
  out.vertices_affinely_independent = v.is_affinely_independent();
  for (int i = 0; i <= n; ++i) {
    Eigen::MatrixXd g = v.without(i);
    if (rank_ratio(g) <= kRankRatioTol) continue;
    out.cell_independent[i] = true;
    Eigen::VectorXd alpha = g.fullPivLu().solve(w.word(i));
    out.containment[i] = (alpha.array() > 0.0).all();
  }
  bool all = out.codebook_affinely_independent && out.vertices_affinely_independent;
  for (int i = 0; i <= n; ++i) all = all && out.containment[i] && out.cell_independent[i];
  out.valid = all;
  return out;
}

/// max_{i != j} |<w_i, w_j> + 1/n|; zero exactly on regular simplices.
inline double regularity_metric(const Codebook& w) {
  const int n = w.dim();
  double worst = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      worst = std::max(worst,
                       std::abs(w.word(i).dot(w.word(j)) + 1.0 / n));
  return worst;
}

}  // namespace scode
