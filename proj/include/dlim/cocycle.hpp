#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "dlim/error.hpp"
#include "dlim/flow.hpp"
#include "dlim/quadrature.hpp"

namespace dlim {

/// Incremental view of t -> alpha(t, x0) along a trajectory. Walkers exist so
/// estimators can sweep long time ranges in O(range) instead of O(range^2).
class ValueWalker {
 public:
  virtual ~ValueWalker() = default;
  virtual void advance(double dt) = 0;
  virtual double time() const = 0;
  virtual double value() const = 0;
  virtual const FiberPoint& point() const = 0;
};

/// Additive cocycle alpha over a suspension flow:
/// alpha(t+s, x) = alpha(t, x) + alpha(s, T^t x).
/// Constructors supply the forward-time evaluation; negative times are
/// resolved through the identity alpha(t, x) = -alpha(-t, T^t x), which needs
/// an invertible base.
class AdditiveCocycle {
 public:
  using Eval = std::function<double(double, const FiberPoint&)>;

  AdditiveCocycle(SuspensionFlow flow, Eval forward)
      : flow_(std::move(flow)), forward_(std::move(forward)) {}

  double operator()(double t, const FiberPoint& x) const {
    if (t >= 0.0) return forward_(t, x);
    const FiberPoint z = flow_.evolve(x, t);
    return -forward_(-t, z);
  }

  const SuspensionFlow& flow() const { return flow_; }

  std::unique_ptr<ValueWalker> walker(const FiberPoint& x0) const;

 private:
  SuspensionFlow flow_;
  Eval forward_;
};

class AdditiveWalker final : public ValueWalker {
 public:
  AdditiveWalker(const AdditiveCocycle& c, FiberPoint x0) : cocycle_(c), x_(x0) {}

  void advance(double dt) override {
    const double term = cocycle_(dt, x_) - comp_;
    const double next = value_ + term;
    comp_ = (next - value_) - term;
    value_ = next;
    x_ = cocycle_.flow().evolve(x_, dt);
    t_ += dt;
  }

  double time() const override { return t_; }
  double value() const override { return value_; }
  const FiberPoint& point() const override { return x_; }

 private:
  AdditiveCocycle cocycle_;  // owned copy: walkers may outlive the source
  FiberPoint x_;
  double t_ = 0.0;
  double value_ = 0.0;
  double comp_ = 0.0;
};

inline std::unique_ptr<ValueWalker> AdditiveCocycle::walker(const FiberPoint& x0) const {
  return std::make_unique<AdditiveWalker>(*this, x0);
}

/// Subadditive cocycle: alpha(t+s, x) <= alpha(t, x) + alpha(s, T^t x).
/// Values may be -inf. An optional walker factory supplies an efficient
/// incremental evaluation (e.g. renormalized matrix products); without one,
/// walkers re-evaluate from the start point.
class SubadditiveCocycle {
 public:
  using Eval = std::function<double(double, const FiberPoint&)>;
  using WalkerFactory = std::function<std::unique_ptr<ValueWalker>(const FiberPoint&)>;

  SubadditiveCocycle(SuspensionFlow flow, Eval eval, WalkerFactory factory = {})
      : flow_(std::move(flow)), eval_(std::move(eval)), factory_(std::move(factory)) {}

  double operator()(double t, const FiberPoint& x) const { return eval_(t, x); }
  const SuspensionFlow& flow() const { return flow_; }

  std::unique_ptr<ValueWalker> walker(const FiberPoint& x0) const {
    if (factory_) return factory_(x0);
    return std::make_unique<FallbackWalker>(*this, x0);
  }

 private:
  class FallbackWalker final : public ValueWalker {
   public:
    FallbackWalker(const SubadditiveCocycle& c, FiberPoint x0)
        : flow_(c.flow()), eval_(c.eval_), x0_(x0), x_(x0) {}
    void advance(double dt) override {
      t_ += dt;
      x_ = flow_.evolve(x0_, t_);
      value_ = eval_(t_, x0_);
    }
    double time() const override { return t_; }
    double value() const override { return value_; }
    const FiberPoint& point() const override { return x_; }

   private:
    SuspensionFlow flow_;
    Eval eval_;
    FiberPoint x0_;
    FiberPoint x_;
    double t_ = 0.0;
    double value_ = 0.0;
  };

  SuspensionFlow flow_;
  Eval eval_;
  WalkerFactory factory_;
};

/// Additive cocycles are the equality case of subadditivity.
inline SubadditiveCocycle as_subadditive(const AdditiveCocycle& c) {
  return SubadditiveCocycle(
      c.flow(), [c](double t, const FiberPoint& x) { return c(t, x); },
      [c](const FiberPoint& x0) { return c.walker(x0); });
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline AdditiveCocycle constant_rate_cocycle(const SuspensionFlow& flow, double rate) {
  return AdditiveCocycle(flow, [rate](double t, const FiberPoint&) { return rate * t; });
}

/// alpha(t, x) = int_0^t g(T^s x) ds, integrated fiber by fiber with
/// Gauss-Legendre panels split exactly at roof crossings (the only kinks of
/// s -> g(T^s x) for observables smooth within fibers).
inline AdditiveCocycle integral_cocycle(const SuspensionFlow& flow,
                                        std::function<double(const FiberPoint&)> g) {
  auto eval = [flow, g = std::move(g)](double t, const FiberPoint& x) {
    double acc = 0.0;
    double comp = 0.0;
    double y = x.y;
    double start = x.tau;
    double rem = x.tau + t;
    double rem_comp = 0.0;
    auto add = [&](double v) {
      const double term = v - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
    };
    for (;;) {
      const double fy = flow.roof()(y);
      const double stop = std::min(rem, fy);
      if (stop > start) {
        add(gauss8([&](double u) { return g(FiberPoint{y, u}); }, start, stop));
      }
      if (!std::isfinite(acc)) {
        throw NumericError("integral cocycle: quadrature did not stay finite on fiber");
      }
      if (rem < fy) return acc;
      const double term = -fy - rem_comp;
      const double next = rem + term;
      rem_comp = (next - rem) - term;
      rem = next;
      start = 0.0;
      y = flow.base().apply(y);
    }
  };
  return AdditiveCocycle(flow, std::move(eval));
}

/// Coboundary alpha(t, x) = h(T^t x) - h(x). Queries landing where h is
/// non-finite (within float resolution of a singular fiber top) report the
/// singularity instead of propagating NaN.
inline AdditiveCocycle coboundary(const SuspensionFlow& flow,
                                  std::function<double(const FiberPoint&)> h) {
  auto checked = [h = std::move(h)](const FiberPoint& x) {
    const double v = h(x);
    if (!std::isfinite(v)) {
      throw NumericError("coboundary: h is singular at the queried point");
    }
    return v;
  };
  auto eval = [flow, checked](double t, const FiberPoint& x) {
    return checked(flow.evolve(x, t)) - checked(x);
  };
  return AdditiveCocycle(flow, std::move(eval));
}

/// Generating data for a cocycle: the values g(t, y) = alpha(t, (y, 0)) for
/// 0 <= t <= f(y). Must satisfy g(0, y) = 0.
struct FiberData {
  std::function<double(double t, double y)> g;
};

/// Extends fiber data to the whole flow:
///   alpha(t, (y,tau)) = sum_{i<n} g(f(S^i y), S^i y)
///                     + g(tau + t - f_n(y), S^n y) - g(tau, y),
/// with n the roof-crossing count of (y, 0) over time tau + t. The result is
/// the unique cocycle with those fiber values.
inline AdditiveCocycle from_fiber_data(const SuspensionFlow& flow, FiberData data,
                                       long long crossing_cap = 100'000'000) {
  for (double probe : {0.03125, 0.5, 0.9375}) {
    if (std::abs(data.g(0.0, probe)) > 1e-12) {
      throw ConfigError("fiber data: g(0, y) must vanish");
    }
  }
  auto eval = [flow, g = std::move(data.g), crossing_cap](double t, const FiberPoint& x) {
    double acc = -g(x.tau, x.y);
    double comp = 0.0;
    double y = x.y;
    double rem = x.tau + t;
    double rem_comp = 0.0;
    long long n = 0;
    for (;;) {
      const double fy = flow.roof()(y);
      if (rem < fy) {
        return acc + g(rem, y);
      }
      const double term = g(fy, y) - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
      const double rterm = -fy - rem_comp;
      const double rnext = rem + rterm;
      rem_comp = (rnext - rem) - rterm;
      rem = rnext;
      y = flow.base().apply(y);
      if (++n > crossing_cap) {
        throw NumericError("fiber data cocycle: summation horizon cap exceeded");
      }
    }
  };
  return AdditiveCocycle(flow, std::move(eval));
}

// ---------------------------------------------------------------------------
// Built-in counterexample cocycles
// ---------------------------------------------------------------------------

/// h(y, tau) = (f(y) - tau)^{-1/2}: integrable over mu (integral 2 sqrt(f)
/// d(nu), = 2 for the unit roof) but unbounded on every fiber, so the
/// coboundary h(T^t x) - h(x) has divergent window sups along every orbit.
inline std::function<double(const FiberPoint&)> singular_height(const SuspensionFlow& flow) {
  return [flow](const FiberPoint& x) {
    const double gap = flow.roof()(x.y) - x.tau;
    if (!(gap > 0.0)) throw NumericError("singular height: queried at a fiber top");
    return 1.0 / std::sqrt(gap);
  };
}

inline AdditiveCocycle singular_coboundary(const SuspensionFlow& flow) {
  return coboundary(flow, singular_height(flow));
}

/// Cocycle with fiber values sqrt(n) at integer times t = n <= f(y) and 0 at
/// all other times, extended by the fiber-data formula. Over the y^{-p} roof
/// its unit-window sup is not mu-integrable although alpha(t, x)/t -> 0 at
/// almost every time. Integer hits are detected within hit_tol; everywhere
/// else evaluation reduces to the fiber-boundary telescoping value.
inline AdditiveCocycle integer_spike_cocycle(const SuspensionFlow& flow,
                                             double hit_tol = 1e-9) {
  if (flow.roof().kind() != RoofFunction::Kind::Power) {
    throw ConfigError("integer spike cocycle: flow must carry the unbounded power roof");
  }
  FiberData data;
  data.g = [hit_tol](double t, double /*y*/) {
    const double k = std::round(t);
    if (k < 0.5 || std::abs(t - k) > hit_tol) return 0.0;
    return std::sqrt(k);
  };
  return from_fiber_data(flow, std::move(data));
}

/// Exact sup over the unit window [0,1] of |alpha(., (y,tau))| for the spike
/// cocycle: the window meets exactly one candidate integer fiber time, the
/// smallest integer above tau, and only while it stays below the roof.
inline double spike_window_sup(const SuspensionFlow& flow, const FiberPoint& x) {
  const double fy = flow.roof()(x.y);
  const double frac = x.tau - std::floor(x.tau);
  if (frac == 0.0 && x.tau > 0.0) return std::sqrt(x.tau);  // measure-zero start
  const double next = std::floor(x.tau) + 1.0;
  return next <= fy ? std::sqrt(next) : 0.0;
}

/// Exact integral over {(y,tau): y in [cutoff,1)} of the unit-window sup,
/// with respect to d(nu) d(tau). Piecewise closed form: the tau-integral over
/// a fiber equals sum_{n <= floor(f(y))} sqrt(n), constant between the roof
/// level sets y_k = k^{-1/p}. Diverges logarithmically as cutoff -> 0, which
/// is the non-integrability witness.
inline double spike_window_sup_integral(const SuspensionFlow& flow, double y_cutoff) {
  if (flow.roof().kind() != RoofFunction::Kind::Power) {
    throw ConfigError("spike sup integral: flow must carry the power roof");
  }
  const double p = flow.roof().power_exponent();
  if (!(y_cutoff > 0.0 && y_cutoff < 1.0)) {
    throw std::invalid_argument("spike sup integral: cutoff must lie in (0,1)");
  }
  const double fmax = std::pow(std::max(y_cutoff, flow.roof().power_floor()), -p);
  const auto kmax = static_cast<long long>(std::floor(fmax));
  double total = 0.0;
  double running = 0.0;  // S(k) = sum_{n<=k} sqrt(n)
  for (long long k = 1; k <= kmax; ++k) {
    running += std::sqrt(static_cast<double>(k));
    const double hi = std::pow(static_cast<double>(k), -1.0 / p);
    const double lo = std::pow(static_cast<double>(k + 1), -1.0 / p);
    const double a = std::max(lo, y_cutoff);
    const double b = std::min(hi, 1.0);
    if (b > a) total += running * (b - a);
  }
  return total;
}

/// Stratified estimator of the same integral: geometric strata in y, uniform
/// sampling within each stratum, analytic fiber integral per sample.
inline double spike_sup_integral_stratified(const SuspensionFlow& flow, double y_cutoff,
                                            int strata, int samples_per_stratum,
                                            std::uint64_t seed) {
  if (flow.roof().kind() != RoofFunction::Kind::Power) {
    throw ConfigError("spike sup integral: flow must carry the power roof");
  }
  if (strata < 1 || samples_per_stratum < 1) {
    throw std::invalid_argument("spike sup integral: need strata, samples >= 1");
  }
  const double p = flow.roof().power_exponent();
  Rng rng(seed);
  const double ratio = std::pow(1.0 / y_cutoff, 1.0 / strata);
  double total = 0.0;
  double lo = y_cutoff;
  for (int s = 0; s < strata; ++s) {
    const double hi = (s + 1 == strata) ? 1.0 : lo * ratio;
    double acc = 0.0;
    for (int i = 0; i < samples_per_stratum; ++i) {
      const double y = rng.uniform(lo, hi);
      const auto nfib = static_cast<long long>(std::floor(std::pow(y, -p)));
      double fiber = 0.0;
      for (long long n = 1; n <= nfib; ++n) fiber += std::sqrt(static_cast<double>(n));
      acc += fiber;
    }
    total += (hi - lo) * acc / samples_per_stratum;
    lo = hi;
  }
  return total;
}

}  // namespace dlim
