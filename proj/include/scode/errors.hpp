#pragma once

#include <stdexcept>
#include <string>

namespace scode {

/// Base class for all scode domain errors. Parameter misuse that is not a
/// domain condition (wrong sizes, null configs) throws std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Codebook differences W_i are rank deficient; the Voronoi vertex
/// construction is undefined.
class AffinelyDependent : public Error {
 public:
  using Error::Error;
};

/// Facet spanning vectors are rank deficient; no reflection hyperplane.
class DegenerateFacet : public Error {
 public:
  using Error::Error;
};

/// Closed-form estimator requested in an unsupported dimension.
class MethodDimMismatch : public Error {
 public:
  using Error::Error;
};

/// A conditional-moment estimate has too few samples inside the region.
class TooFewAcceptedSamples : public Error {
 public:
  using Error::Error;
};

/// Fixed-point start vector is not strictly inside the cone.
class StartOutsideCone : public Error {
 public:
  using Error::Error;
};

/// Iteration hit its cap with residual above tolerance. `cell()` names the
/// decision cell when the failure happened inside a codebook update, -1
/// otherwise.
class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& what, int cell = -1)
      : Error(what), cell_(cell) {}
  int cell() const noexcept { return cell_; }

 private:
  int cell_;
};

/// Half-space certificate for a cone failed.
class ConeNotInHalfSpace : public Error {
 public:
  using Error::Error;
};

/// Adapted frame matrix is numerically singular.
class SingularFrame : public Error {
 public:
  using Error::Error;
};

/// Facet-system construction got two identical vertex tuples.
class TuplesIdentical : public Error {
 public:
  using Error::Error;
};

/// Vectors expected to be linearly independent are not.
class LinearDependence : public Error {
 public:
  using Error::Error;
};

/// Codebook/vertex pair violates the containment or independence conditions.
class InvalidPair : public Error {
 public:
  using Error::Error;
};

/// Geometry type constructed from malformed data (non-unit rows, duplicate
/// words, shape mismatch).
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace scode
