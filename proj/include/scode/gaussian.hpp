#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "scode/errors.hpp"
#include "scode/geometry.hpp"
#include "scode/rng.hpp"

namespace scode {

/// Additive white Gaussian noise channel y = w + sigma * z.
struct GaussianChannel {
  double sigma = 1.0;
  int dim = 1;
};

enum class EstimatorMethod { plain_mc, crn_mc, exact_1d, wedge_2d };

/// Governs every stochastic estimate: sample count, stream seed, backend,
/// and the tolerance used by consistency checks built on top of estimates.
struct EstimatorConfig {
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  EstimatorMethod method = EstimatorMethod::plain_mc;
  double rel_tol = 1e-3;
};

enum class MomentLevel { measure, mean, covariance };

/// Gaussian measure and truncated moments of a region under N(c, sigma^2 I).
/// Which fields are populated depends on the requested level; `mean` and
/// `covariance` stay empty for measure-only estimates.
struct ConeMoments {
  double measure = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double std_error = 0.0;        // standard error of `measure`
  std::int64_t accepted = 0;
  Eigen::VectorXd mean_std_error;  // per-component standard error of `mean`
};

namespace detail {

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

inline void check_config(const GaussianChannel& chan, const EstimatorConfig& cfg) {
  if (chan.sigma <= 0.0) throw std::invalid_argument("sigma must be positive");
  if (chan.dim < 1) throw std::invalid_argument("dim must be positive");
  if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (cfg.rel_tol <= 0.0) throw std::invalid_argument("rel_tol must be positive");
}

struct MomentsAcc {
  MomentsAcc(int dim, MomentLevel lvl) : level(lvl) {
    if (level != MomentLevel::measure) {
      sum = Eigen::VectorXd::Zero(dim);
      sum_sq = Eigen::VectorXd::Zero(dim);
    }
    if (level == MomentLevel::covariance)
      sum_outer = Eigen::MatrixXd::Zero(dim, dim);
  }
  std::int64_t accepted = 0;
  Eigen::VectorXd sum;
  Eigen::VectorXd sum_sq;
  Eigen::MatrixXd sum_outer;
  MomentLevel level;

  void merge(const MomentsAcc& o) {
    accepted += o.accepted;
    if (level != MomentLevel::measure) {
      sum += o.sum;
      sum_sq += o.sum_sq;
    }
    if (level == MomentLevel::covariance) sum_outer += o.sum_outer;
  }
};

}  // namespace detail

/// Monte Carlo moments of {x : inward_normals * x > 0} under N(center,
/// sigma^2 I). Draws z ~ N(0, I), forms x = center + sigma z and tests the
/// facet inequalities; a single pass yields measure, conditional mean and
/// conditional covariance. A region with zero constraint rows is the whole
/// space (used by tests as the no-truncation reference).
///
/// Deterministic in (cfg.seed, cfg.samples) regardless of thread count. If
/// `stream_rotation` is given, every z is replaced by R z, which realizes
/// the rotated sample stream that makes rotation invariance exact.
inline ConeMoments estimate_region_moments(
    const Eigen::MatrixXd& inward_normals, const Eigen::VectorXd& center,
    const GaussianChannel& chan, const EstimatorConfig& cfg, MomentLevel level,
    const Eigen::MatrixXd* stream_rotation = nullptr) {
  detail::check_config(chan, cfg);
  const int n = static_cast<int>(center.size());
  if (n != chan.dim) throw std::invalid_argument("center dim mismatch");
  if (inward_normals.cols() != n && inward_normals.rows() != 0)
    throw std::invalid_argument("normal matrix dim mismatch");
  if (!center.allFinite()) throw std::invalid_argument("center must be finite");

  const int k = static_cast<int>(inward_normals.rows());
  const double sigma = chan.sigma;
  // constraint j evaluated as base_j + <scaled_row_j, z>
  Eigen::VectorXd base = inward_normals * center;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> scaled =
      sigma * inward_normals;

  detail::MomentsAcc total = reduce_sample_blocks(
      cfg.samples, cfg.seed, detail::MomentsAcc(n, level),
      [&](std::int64_t, std::int64_t count, std::mt19937_64& engine,
          detail::MomentsAcc& acc) {
        std::normal_distribution<double> normal;
        Eigen::VectorXd z(n), zr(n);
        const double* bp = base.data();
        for (std::int64_t s = 0; s < count; ++s) {
          for (int d = 0; d < n; ++d) z(d) = normal(engine);
          const double* zp = z.data();
          if (stream_rotation != nullptr) {
            zr.noalias() = (*stream_rotation) * z;
            zp = zr.data();
          }
          bool inside = true;
          for (int j = 0; j < k; ++j) {
            double dot = bp[j];
            const double* row = scaled.data() + static_cast<std::size_t>(j) * n;
            for (int d = 0; d < n; ++d) dot += row[d] * zp[d];
            if (dot <= 0.0) {
              inside = false;
              break;
            }
          }
          if (!inside) continue;
          ++acc.accepted;
          if (level == MomentLevel::measure) continue;
          for (int d = 0; d < n; ++d) {
            const double x = center(d) + sigma * zp[d];
            acc.sum(d) += x;
            acc.sum_sq(d) += x * x;
          }
          if (level == MomentLevel::covariance) {
            for (int d1 = 0; d1 < n; ++d1) {
              const double x1 = center(d1) + sigma * zp[d1];
              for (int d2 = d1; d2 < n; ++d2)
                acc.sum_outer(d1, d2) += x1 * (center(d2) + sigma * zp[d2]);
            }
          }
        }
      });

  ConeMoments out;
  out.accepted = total.accepted;
  const double nd = static_cast<double>(cfg.samples);
  out.measure = total.accepted / nd;
  if (cfg.samples > 1)
    out.std_error =
        std::sqrt(std::max(0.0, out.measure * (1.0 - out.measure) / (nd - 1.0)));

  if (level == MomentLevel::measure) return out;
  if (total.accepted < 10)
    throw TooFewAcceptedSamples("only " + std::to_string(total.accepted) +
                                " samples landed in the region");
  const double na = static_cast<double>(total.accepted);
  out.mean = total.sum / na;
  out.mean_std_error.resize(n);
  for (int d = 0; d < n; ++d) {
    const double var =
        std::max(0.0, (total.sum_sq(d) - na * out.mean(d) * out.mean(d)) / (na - 1.0));
    out.mean_std_error(d) = std::sqrt(var / na);
  }
  if (level == MomentLevel::covariance) {
    out.covariance.resize(n, n);
    for (int d1 = 0; d1 < n; ++d1)
      for (int d2 = d1; d2 < n; ++d2) {
        const double c =
            (total.sum_outer(d1, d2) - na * out.mean(d1) * out.mean(d2)) / (na - 1.0);
        out.covariance(d1, d2) = c;
        out.covariance(d2, d1) = c;
      }
  }
  return out;
}

namespace detail {

/// Closed-form moments for the one-dimensional ray cone.
inline ConeMoments exact_ray_moments(const SimplicialCone& cone,
                                     const Eigen::VectorXd& c,
                                     const GaussianChannel& chan,
                                     const EstimatorConfig& cfg) {
  const double g = cone.generators()(0, 0);  // +1 or -1
  const double sigma = chan.sigma;
  const double mu = g * c(0);  // t = g x ~ N(mu, sigma^2), truncated to t > 0
  const double alpha = -mu / sigma;
  const double lambda = std_normal_pdf(alpha) / std_normal_cdf(mu / sigma);
  ConeMoments out;
  out.measure = std_normal_cdf(mu / sigma);
  out.std_error = 0.0;
  out.accepted = cfg.samples;
  const double mean_t = mu + sigma * lambda;
  const double var_t =
      sigma * sigma * (1.0 + alpha * lambda - lambda * lambda);
  out.mean = Eigen::VectorXd::Constant(1, g * mean_t);
  out.covariance = Eigen::MatrixXd::Constant(1, 1, var_t);
  out.mean_std_error = Eigen::VectorXd::Zero(1);
  return out;
}

/// Moments of a planar wedge by 1-D angular quadrature (composite Simpson,
/// 10^4 panels). The radial integrals have closed forms:
///   int_0^inf r^k exp(-(r-a)^2 / 2sigma^2) dr,  a = <u(theta), c>.
inline ConeMoments wedge_moments_quadrature(const SimplicialCone& cone,
                                            const Eigen::VectorXd& c,
                                            const GaussianChannel& chan,
                                            const EstimatorConfig& cfg) {
  constexpr int kPanels = 10000;
  const double sigma = chan.sigma;
  const Eigen::Vector2d g1 = cone.generators().col(0);
  const Eigen::Vector2d g2 = cone.generators().col(1);
  auto angle_of = [](const Eigen::Vector2d& v) {
    double a = std::atan2(v.y(), v.x());
    return a < 0.0 ? a + 2.0 * M_PI : a;
  };
  const double cross = g1.x() * g2.y() - g1.y() * g2.x();
  double lo = angle_of(cross > 0.0 ? g1 : g2);
  double hi = angle_of(cross > 0.0 ? g2 : g1);
  if (hi < lo) hi += 2.0 * M_PI;

  const double c_sq = c.squaredNorm();
  double m0 = 0.0;
  Eigen::Vector2d m1 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d m2 = Eigen::Matrix2d::Zero();
  const double h = (hi - lo) / kPanels;
  for (int p = 0; p <= kPanels; ++p) {
    const double theta = lo + p * h;
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    const double a = u.dot(c);
    const double m = -a / sigma;
    const double e1 = std::exp(-0.5 * m * m);
    const double i0 = std::sqrt(2.0 * M_PI) * std_normal_cdf(a / sigma);
    const double i2 = m * e1 + i0;
    const double i3 = (m * m + 2.0) * e1;
    const double r1 = sigma * (a * i0 + sigma * e1);
    const double r2 = sigma * (a * a * i0 + 2.0 * a * sigma * e1 + sigma * sigma * i2);
    const double r3 = sigma * (a * a * a * i0 + 3.0 * a * a * sigma * e1 +
                               3.0 * a * sigma * sigma * i2 + sigma * sigma * sigma * i3);
    const double damp =
        std::exp(-std::max(0.0, c_sq - a * a) / (2.0 * sigma * sigma)) /
        (2.0 * M_PI * sigma * sigma);
    const double wt = (p == 0 || p == kPanels) ? 1.0 : (p % 2 == 1 ? 4.0 : 2.0);
    m0 += wt * damp * r1;
    m1 += wt * damp * r2 * u;
    m2 += wt * damp * r3 * (u * u.transpose());
  }
  const double simpson = h / 3.0;
  m0 *= simpson;
  m1 *= simpson;
  m2 *= simpson;

  ConeMoments out;
  out.measure = m0;
  out.std_error = 0.0;
  out.accepted = cfg.samples;
  out.mean = m1 / m0;
  out.covariance = m2 / m0 - out.mean * out.mean.transpose();
  out.mean_std_error = Eigen::VectorXd::Zero(2);
  return out;
}

inline ConeMoments cone_moments_dispatch(const SimplicialCone& cone,
                                         const Eigen::VectorXd& c,
                                         const GaussianChannel& chan,
                                         const EstimatorConfig& cfg,
                                         MomentLevel level) {
  check_config(chan, cfg);
  if (cone.dim() != chan.dim)
    throw std::invalid_argument("cone dimension does not match channel");
  switch (cfg.method) {
    case EstimatorMethod::exact_1d:
      if (cone.dim() != 1)
        throw MethodDimMismatch("exact_1d requires dimension 1");
      return exact_ray_moments(cone, c, chan, cfg);
    case EstimatorMethod::wedge_2d:
      if (cone.dim() != 2)
        throw MethodDimMismatch("wedge_2d requires dimension 2");
      return wedge_moments_quadrature(cone, c, chan, cfg);
    case EstimatorMethod::plain_mc:
    case EstimatorMethod::crn_mc:
      return estimate_region_moments(cone.facet_normals(), c, chan, cfg, level);
  }
  throw std::invalid_argument("unknown estimator method");
}

}  // namespace detail

/// P{ g_c in cone } for g_c ~ N(c, sigma^2 I).
inline ConeMoments cone_measure(const SimplicialCone& cone, const Eigen::VectorXd& c,
                                const GaussianChannel& chan,
                                const EstimatorConfig& cfg) {
  return detail::cone_moments_dispatch(cone, c, chan, cfg, MomentLevel::measure);
}

/// E[ g_c | g_c in cone ]. Convexity keeps the estimate inside the closed
/// cone. Throws TooFewAcceptedSamples below 10 hits.
inline ConeMoments cone_conditional_mean(const SimplicialCone& cone,
                                         const Eigen::VectorXd& c,
                                         const GaussianChannel& chan,
                                         const EstimatorConfig& cfg) {
  return detail::cone_moments_dispatch(cone, c, chan, cfg, MomentLevel::mean);
}

/// cov( g_c | g_c in cone ), symmetric PSD up to estimator noise.
inline ConeMoments cone_conditional_cov(const SimplicialCone& cone,
                                        const Eigen::VectorXd& c,
                                        const GaussianChannel& chan,
                                        const EstimatorConfig& cfg) {
  return detail::cone_moments_dispatch(cone, c, chan, cfg, MomentLevel::covariance);
}

/// Paired estimate of P{g_{ca} in A} - P{g_{cb} in B} on one shared
/// standard-normal stream (common random numbers): both configurations see
/// the identical z at every sample ordinal.
struct CrnComparison {
  double difference = 0.0;
  double std_error = 0.0;
  double measure_a = 0.0;
  double measure_b = 0.0;
};

inline CrnComparison crn_compare(const SimplicialCone& cone_a,
                                 const Eigen::VectorXd& ca,
                                 const SimplicialCone& cone_b,
                                 const Eigen::VectorXd& cb,
                                 const GaussianChannel& chan,
                                 const EstimatorConfig& cfg) {
  detail::check_config(chan, cfg);
  const int n = chan.dim;
  if (cone_a.dim() != n || cone_b.dim() != n || ca.size() != n || cb.size() != n)
    throw std::invalid_argument("crn_compare: dimension mismatch");
  const double sigma = chan.sigma;
  Eigen::VectorXd base_a = cone_a.facet_normals() * ca;
  Eigen::VectorXd base_b = cone_b.facet_normals() * cb;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
      scaled_a = sigma * cone_a.facet_normals(),
      scaled_b = sigma * cone_b.facet_normals();

  struct Acc {
    std::int64_t in_a = 0, in_b = 0, diff_sq = 0;
    void merge(const Acc& o) {
      in_a += o.in_a;
      in_b += o.in_b;
      diff_sq += o.diff_sq;
    }
  };
  auto member = [n](const Eigen::VectorXd& base,
                    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>& scaled,
                    const double* z) {
    for (int j = 0; j < scaled.rows(); ++j) {
      double dot = base(j);
      const double* row = scaled.data() + static_cast<std::size_t>(j) * n;
      for (int d = 0; d < n; ++d) dot += row[d] * z[d];
      if (dot <= 0.0) return false;
    }
    return true;
  };

  Acc total = reduce_sample_blocks(
      cfg.samples, cfg.seed, Acc{},
      [&](std::int64_t, std::int64_t count, std::mt19937_64& engine, Acc& acc) {
        std::normal_distribution<double> normal;
        Eigen::VectorXd z(n);
        for (std::int64_t s = 0; s < count; ++s) {
          for (int d = 0; d < n; ++d) z(d) = normal(engine);
          const bool a = member(base_a, scaled_a, z.data());
          const bool b = member(base_b, scaled_b, z.data());
          acc.in_a += a;
          acc.in_b += b;
          acc.diff_sq += (a != b);
        }
      });

  CrnComparison out;
  const double nd = static_cast<double>(cfg.samples);
  out.measure_a = total.in_a / nd;
  out.measure_b = total.in_b / nd;
  out.difference = (total.in_a - total.in_b) / nd;
  if (cfg.samples > 1) {
    const double mean_sq = total.diff_sq / nd;  // d in {-1,0,1} so d^2 = |d|
    const double var = std::max(0.0, (mean_sq - out.difference * out.difference) *
                                         nd / (nd - 1.0));
    out.std_error = std::sqrt(var / nd);
  }
  return out;
}

}  // namespace scode
