#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "dlim/cocycle.hpp"
#include "dlim/error.hpp"
#include "dlim/flow.hpp"
#include "dlim/rng.hpp"

namespace dlim {

/// GL(m, R)-valued cocycle over a suspension flow with the standard order
///   A(t+s, x) = A(s, T^t x) A(t, x).
/// The transposed-order ("inverse") cocycle B(t+s,x) = B(t,x) B(s,T^t x) used
/// for geodesic tracking is obtained by transposing values; both orders are
/// exposed rather than silently mixed.
class MatrixCocycle {
 public:
  using Eval = std::function<Eigen::MatrixXd(double, const FiberPoint&)>;
  using Generator = std::function<Eigen::MatrixXd(double y)>;

  MatrixCocycle(SuspensionFlow flow, int dim, Eval forward, bool invertible_time)
      : flow_(std::move(flow)),
        dim_(dim),
        forward_(std::move(forward)),
        invertible_time_(invertible_time) {}

  /// Piecewise-constant realization: A(t, (y,tau)) = B(S^{n-1}y) ... B(y)
  /// with n the roof-crossing count, identity when n = 0. Jumps only at roof
  /// crossings keep the cocycle identity exact up to float products.
  static MatrixCocycle from_base(const SuspensionFlow& flow, int dim, Generator B) {
    for (double probe : {0.1, 0.4, 0.75}) {
      const Eigen::MatrixXd M = B(probe);
      if (M.rows() != dim || M.cols() != dim) {
        throw ConfigError("matrix cocycle: generator has wrong dimensions");
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
      const double smin = svd.singularValues().minCoeff();
      const double smax = svd.singularValues().maxCoeff();
      if (!(smin > 0.0) || smax / smin > 1e8) {
        throw ConfigError("matrix cocycle: generator singular or badly conditioned");
      }
    }
    auto eval = [flow, B, dim](double t, const FiberPoint& x) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(dim, dim);
      auto step = flow.evolve_counted(x, t);
      double y = x.y;
      for (long long i = 0; i < step.crossings; ++i) {
        acc = (B(y) * acc).eval();
        y = flow.base().apply(y);
      }
      return acc;
    };
    return MatrixCocycle(flow, dim, std::move(eval), flow.base().invertible());
  }

  /// A(t, x) = diag(exp(rates_i * t)): exact continuous-time reference case.
  static MatrixCocycle diagonal_exp(const SuspensionFlow& flow, Eigen::VectorXd rates) {
    const int dim = static_cast<int>(rates.size());
    auto eval = [rates, dim](double t, const FiberPoint&) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
      for (int i = 0; i < dim; ++i) m(i, i) = std::exp(rates(i) * t);
      return m;
    };
    return MatrixCocycle(flow, dim, std::move(eval), true);
  }

  static MatrixCocycle identity(const SuspensionFlow& flow, int dim) {
    auto eval = [dim](double, const FiberPoint&) {
      return Eigen::MatrixXd::Identity(dim, dim);
    };
    return MatrixCocycle(flow, dim, std::move(eval), true);
  }

  /// Raw value; usable while exp(|chi| t) stays within double range. Negative
  /// times go through A(-t, x) = A(t, T^{-t} x)^{-1}.
  Eigen::MatrixXd operator()(double t, const FiberPoint& x) const {
    if (t >= 0.0) return forward_(t, x);
    if (!invertible_time_) {
      throw NumericError("matrix cocycle: negative time needs two-sided flow");
    }
    const FiberPoint z = flow_.evolve(x, t);
    return forward_(-t, z).inverse();
  }

  int dim() const { return dim_; }
  bool invertible_time() const { return invertible_time_; }
  const SuspensionFlow& flow() const { return flow_; }

 private:
  SuspensionFlow flow_;
  int dim_;
  Eval forward_;
  bool invertible_time_;
};

/// Seeded SL(2,R) generator: rotation times a bounded diagonal shear, both
/// hash-driven functions of the base point. det = 1 by construction.
inline MatrixCocycle random_sl2(const SuspensionFlow& flow, std::uint64_t seed,
                                double shear = 0.8) {
  auto B = [seed, shear](double y) {
    const double th = 6.283185307179586 * hash01(y, seed ^ 0x51u);
    const double s = (hash01(y, seed ^ 0xA7u) - 0.5) * 2.0 * shear;
    Eigen::Matrix2d rot;
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Eigen::Matrix2d diag;
    diag << std::exp(s), 0.0, 0.0, std::exp(-s);
    return Eigen::MatrixXd(rot * diag);
  };
  return MatrixCocycle::from_base(flow, 2, std::move(B));
}

/// Renormalized running product M(t) = A(t, x0): the stored matrix is kept
/// near unit norm and the removed scale is accumulated in log space, so
/// log-norms remain exact far beyond double range.
class MatrixWalker final : public ValueWalker {
 public:
  MatrixWalker(const MatrixCocycle& c, FiberPoint x0)
      : cocycle_(c),
        x_(x0),
        m_(Eigen::MatrixXd::Identity(c.dim(), c.dim())) {}

  void advance(double dt) override {
    m_ = (cocycle_(dt, x_) * m_).eval();
    const double norm = m_.norm();  // Frobenius rescale: bookkeeping only
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericError("matrix walker: product norm left double range");
    }
    m_ /= norm;
    log_scale_ += std::log(norm);
    x_ = cocycle_.flow().evolve(x_, dt);
    t_ += dt;
  }

  double time() const override { return t_; }
  /// ln ||A(t, x0)|| (spectral norm).
  double value() const override {
    return log_scale_ + std::log(m_.jacobiSvd().singularValues()(0));
  }
  const FiberPoint& point() const override { return x_; }

  const Eigen::MatrixXd& normalized() const { return m_; }
  double log_scale() const { return log_scale_; }

 private:
  MatrixCocycle cocycle_;  // owned copy: walkers may outlive the source
  FiberPoint x_;
  Eigen::MatrixXd m_;
  double t_ = 0.0;
  double log_scale_ = 0.0;
};

/// alpha(t, x) = ln ||A(t, x)|| (spectral norm), subadditive by
/// submultiplicativity of the norm.
inline SubadditiveCocycle log_norm_cocycle(const MatrixCocycle& A) {
  auto eval = [A](double t, const FiberPoint& x) {
    return std::log(A(t, x).jacobiSvd().singularValues()(0));
  };
  auto factory = [A](const FiberPoint& x0) -> std::unique_ptr<ValueWalker> {
    return std::make_unique<MatrixWalker>(A, x0);
  };
  return SubadditiveCocycle(A.flow(), std::move(eval), std::move(factory));
}

}  // namespace dlim
