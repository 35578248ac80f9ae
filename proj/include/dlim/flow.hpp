#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dlim/error.hpp"
#include "dlim/rng.hpp"

namespace dlim {

inline double mod1(double y) {
  double r = y - std::floor(y);
  if (r >= 1.0) r -= 1.0;
  if (r < 0.0) r = 0.0;
  return r;
}

/// Base automorphism S of the unit interval/circle with its invariant
/// probability measure nu (uniform for all built-ins). Ergodicity of the
/// built-ins is assumed, not checked.
class BaseSystem {
 public:
  enum class Kind { Rotation, Doubling, Bernoulli };

  static BaseSystem rotation(double angle) {
    BaseSystem b;
    b.kind_ = Kind::Rotation;
    b.angle_ = angle;
    return b;
  }

  static BaseSystem doubling() {
    BaseSystem b;
    b.kind_ = Kind::Doubling;
    return b;
  }

  /// Shift with seeded pseudo-random symbolic coordinates: the orbit of y is
  /// a deterministic hash chain, so S is deterministic per seed while orbits
  /// behave like i.i.d. uniform draws.
  static BaseSystem bernoulli(std::uint64_t seed) {
    BaseSystem b;
    b.kind_ = Kind::Bernoulli;
    b.seed_ = seed;
    return b;
  }

  Kind kind() const { return kind_; }

  double apply(double y) const {
    switch (kind_) {
      case Kind::Rotation: return mod1(y + angle_);
      case Kind::Doubling: return mod1(2.0 * y);
      case Kind::Bernoulli: return hash01(y, seed_);
    }
    return y;
  }

  bool invertible() const { return kind_ == Kind::Rotation; }

  double apply_inverse(double y) const {
    if (!invertible()) throw NumericError("irreversible semiflow: base has no inverse");
    return mod1(y - angle_);
  }

  double sample(Rng& rng) const { return rng.uniform(); }

  std::string name() const {
    switch (kind_) {
      case Kind::Rotation: return "rotation";
      case Kind::Doubling: return "doubling";
      case Kind::Bernoulli: return "bernoulli";
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::Rotation;
  double angle_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Positive measurable roof function with a known positive lower bound and
/// analytic mean over nu.
class RoofFunction {
 public:
  enum class Kind { Constant, Sine, Power };

  static RoofFunction constant(double height) {
    if (!(height > 0.0)) throw ConfigError("roof: constant height must be positive");
    RoofFunction r;
    r.kind_ = Kind::Constant;
    r.a_ = height;
    r.lower_ = height;
    r.mean_ = height;
    return r;
  }

  /// base + amp * sin(2 pi y); mean = base over the uniform measure.
  static RoofFunction sine(double base, double amp) {
    if (!(base - std::abs(amp) > 0.0)) throw ConfigError("roof: sine base must exceed |amp|");
    RoofFunction r;
    r.kind_ = Kind::Sine;
    r.a_ = base;
    r.b_ = amp;
    r.lower_ = base - std::abs(amp);
    r.mean_ = base;
    return r;
  }

  /// y^{-exponent} with 0 < exponent < 1, unbounded near 0. A configurable
  /// floor y >= y_floor guards the singularity; the mean 1/(1-exponent) is
  /// the analytic value of the unguarded integral.
  static RoofFunction power(double exponent, double y_floor = 1e-12) {
    if (!(exponent > 0.0 && exponent < 1.0)) {
      throw ConfigError("roof: power exponent must lie in (0,1)");
    }
    if (!(y_floor > 0.0)) throw ConfigError("roof: y_floor must be positive");
    RoofFunction r;
    r.kind_ = Kind::Power;
    r.a_ = exponent;
    r.b_ = y_floor;
    r.lower_ = 1.0;
    r.mean_ = 1.0 / (1.0 - exponent);
    return r;
  }

  double operator()(double y) const {
    double v = 0.0;
    switch (kind_) {
      case Kind::Constant: v = a_; break;
      case Kind::Sine: v = a_ + b_ * std::sin(6.283185307179586 * y); break;
      case Kind::Power: v = std::pow(std::max(y, b_), -a_); break;
    }
    if (!(v >= lower_)) {
      throw ConfigError("roof evaluated below its lower bound");
    }
    return v;
  }

  Kind kind() const { return kind_; }
  double lower_bound() const { return lower_; }
  double mean() const { return mean_; }
  double power_exponent() const { return a_; }
  double power_floor() const { return b_; }

 private:
  Kind kind_ = Kind::Constant;
  double a_ = 1.0;
  double b_ = 0.0;
  double lower_ = 1.0;
  double mean_ = 1.0;
};

/// Point (y, tau) of the suspension phase space, 0 <= tau < f(y).
struct FiberPoint {
  double y = 0.0;
  double tau = 0.0;
};

/// Suspension (special) flow over a base automorphism under a roof function:
/// points move up the fiber at unit speed and jump through S at the roof.
/// Immutable after construction; evolution is a pure function of (x, t).
class SuspensionFlow {
 public:
  SuspensionFlow(BaseSystem base, RoofFunction roof)
      : base_(std::move(base)), roof_(std::move(roof)) {}

  const BaseSystem& base() const { return base_; }
  const RoofFunction& roof() const { return roof_; }

  /// Total mass of d(mu) = d(nu) dt, i.e. the roof mean. Kept explicit and
  /// never silently renormalized to 1.
  double total_mass() const { return roof_.mean(); }

  struct Step {
    FiberPoint point;
    long long crossings = 0;
  };

  /// Evolution together with the roof-crossing count it used. Compensated
  /// (Kahan) accumulation keeps long trajectories from drifting.
  Step evolve_counted(FiberPoint x, double t) const {
    if (!(x.tau >= 0.0) || !std::isfinite(x.y) || !std::isfinite(t)) {
      throw std::invalid_argument("evolve: invalid point or time");
    }
    if (t < 0.0 && !base_.invertible()) {
      throw NumericError("irreversible semiflow: negative time needs an invertible base");
    }
    double y = x.y;
    double rem = x.tau + t;
    double comp = 0.0;  // Kahan compensation for the running remainder
    long long n = 0;
    if (rem >= 0.0) {
      for (;;) {
        const double fy = roof_(y);
        if (rem < fy) break;
        kahan_add(rem, comp, -fy);
        y = base_.apply(y);
        ++n;
        if (n > kCrossingCap) throw NumericError("evolve: crossing cap exceeded");
      }
      if (rem < 0.0) rem = 0.0;
      return {{y, rem}, n};
    }
    while (rem < 0.0) {
      y = base_.apply_inverse(y);
      kahan_add(rem, comp, roof_(y));
      --n;
      if (-n > kCrossingCap) throw NumericError("evolve: crossing cap exceeded");
    }
    const double fy = roof_(y);
    if (rem >= fy) rem = std::nextafter(fy, 0.0);
    return {{y, rem}, n};
  }

  FiberPoint evolve(FiberPoint x, double t) const { return evolve_counted(x, t).point; }

  long long return_count(FiberPoint x, double t) const {
    return evolve_counted(x, t).crossings;
  }

  /// Draw `count` mu-distributed points: base point with density f/total_mass
  /// against nu (inverse CDF for the power roof, rejection otherwise), fiber
  /// offset uniform on [0, f(y)). Deterministic given the seed.
  std::vector<FiberPoint> sample_mu(std::uint64_t seed, std::size_t count) const {
    if (count < 1) throw std::invalid_argument("sample_mu: count must be >= 1");
    Rng rng(seed);
    std::vector<FiberPoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double y = sample_base_weighted(rng);
      const double tau = rng.uniform() * roof_(y);
      out.push_back({y, tau});
    }
    return out;
  }

 private:
  static void kahan_add(double& sum, double& comp, double term) {
    const double t = term - comp;
    const double next = sum + t;
    comp = (next - sum) - t;
    sum = next;
  }

  double sample_base_weighted(Rng& rng) const {
    switch (roof_.kind()) {
      case RoofFunction::Kind::Constant:
        return base_.sample(rng);
      case RoofFunction::Kind::Power: {
        // density y^{-p}/mean on (0,1]: inverse CDF y = u^{1/(1-p)}
        const double p = roof_.power_exponent();
        const double u = rng.uniform();
        return std::max(std::pow(u, 1.0 / (1.0 - p)), roof_.power_floor());
      }
      case RoofFunction::Kind::Sine: {
        const double fmax = roof_.mean() + std::abs(roof_.mean() - roof_.lower_bound());
        for (int iter = 0; iter < kRejectionCap; ++iter) {
          const double y = base_.sample(rng);
          if (rng.uniform() * fmax <= roof_(y)) return y;
        }
        throw NumericError("sampler stalled: rejection cap exceeded for roof density");
      }
    }
    throw NumericError("sampler stalled: unknown roof kind");
  }

  static constexpr long long kCrossingCap = 200'000'000;
  static constexpr int kRejectionCap = 100'000;

  BaseSystem base_;
  RoofFunction roof_;
};

}  // namespace dlim
