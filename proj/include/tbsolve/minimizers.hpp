#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tbsolve/projection.hpp"
#include "tbsolve/treeplex.hpp"

namespace tbsolve {

// All sequence-form regret minimizers share a propose/observe protocol:
// propose() returns the decision for the current iteration, observe() feeds
// the loss incurred by that decision. Calls alternate strictly.
class SequenceMinimizer {
 public:
  virtual ~SequenceMinimizer() = default;
  virtual const SeqVector& propose() = 0;
  virtual void observe(const SeqVector& loss) = 0;
};

// Blackwell approachability shell over the treeplex: wraps any regret
// minimizer whose decision set is cone(T) into a regret minimizer over T.
// The inner minimizer exposes
//   const SeqVector& decide();       R_t, must lie in cone(T)
//   void update(const SeqVector&);   observes f(x_t, l_t)
// The decision is x_t = R_t / <R_t, a> with 0/0 resolving to the uniform
// strategy.
template <class Inner>
class Blackwell final : public SequenceMinimizer {
 public:
  // Starts from the uniform strategy: under alternation the second player
  // observes a loss before its first propose().
  Blackwell(const Treeplex* tp, Inner inner)
      : tp_(tp),
        inner_(std::move(inner)),
        r_(tp->dim(), 0.0),
        x_(uniform_strategy(*tp)) {}

  const SeqVector& propose() override {
    r_ = inner_.decide();
    double scale = 1.0;
    for (double v : r_) scale = std::max(scale, std::abs(v));
    if (!is_cone_member(*tp_, r_, 1e-6 * scale))
      throw std::logic_error("blackwell: inner minimizer left cone(T)");
    if (r_[0] <= 0.0) {
      x_ = uniform_strategy(*tp_);
    } else {
      for (int i = 0; i < tp_->dim(); ++i) x_[i] = r_[i] / r_[0];
    }
    return x_;
  }

  void observe(const SeqVector& loss) override {
    inner_.update(f_transform(x_, loss));
  }

  // R_t behind the last propose(); the hyperplane forcing identity
  // <R_t, f(x_t, l)> = 0 holds for any l.
  const SeqVector& regret_vector() const { return r_; }
  Inner& inner() { return inner_; }
  const Inner& inner() const { return inner_; }
  const Treeplex& treeplex() const { return *tp_; }

 private:
  const Treeplex* tp_;
  Inner inner_;
  SeqVector r_, x_;
};

// Predictive online mirror descent over cone(T) or the stable region:
//   R_t     = Pi(Rhat_t - eta m_t)
//   Rhat_t+1 = Pi(Rhat_t - eta f_t)
// with the previous transformed loss as prediction (m_1 = 0). Projecting onto
// cone(T) gives PTB+ (TB+ when predictions are disabled); projecting onto the
// stable region gives Smooth PTB+.
class PomdCone {
 public:
  PomdCone(const Treeplex* tp, double eta, ProjectionKind kind, bool predictive)
      : tp_(tp),
        eta_(eta),
        kind_(kind),
        predictive_(predictive),
        r_hat_(tp->dim(), 0.0),
        m_(tp->dim(), 0.0) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  }

  const SeqVector& decide() {
    if (predictive_) {
      SeqVector target = r_hat_;
      for (int i = 0; i < tp_->dim(); ++i) target[i] -= eta_ * m_[i];
      r_ = project(*tp_, target, kind_);
    } else if (kind_.set == ProjectionKind::Set::cone) {
      r_ = r_hat_;  // already in the cone, prediction is zero
    } else {
      r_ = project(*tp_, r_hat_, kind_);
    }
    return r_;
  }

  void update(const SeqVector& f_loss) {
    for (int i = 0; i < tp_->dim(); ++i) r_hat_[i] -= eta_ * f_loss[i];
    r_hat_ = project(*tp_, r_hat_, kind_);
    if (predictive_) m_ = f_loss;
  }

  const SeqVector& accumulator() const { return r_hat_; }

 private:
  const Treeplex* tp_;
  double eta_;
  ProjectionKind kind_;
  bool predictive_;
  SeqVector r_hat_, m_, r_;
};

namespace detail {

// Weighted projections are gated on the Dykstra oracle in the test suite; if
// a result ever leaves the cone the step falls back to the oracle (logged).
inline SeqVector checked_weighted_projection(const Treeplex& tp,
                                             const SeqVector& target,
                                             const SeqVector& weights) {
  SeqVector r = project(tp, target, cone_kind(), &weights);
  double scale = 1.0;
  for (double v : r) scale = std::max(scale, std::abs(v));
  if (is_cone_member(tp, r, 1e-6 * scale)) return r;
  std::fprintf(stderr,
               "tbsolve: weighted projection left cone(T); "
               "falling back to Dykstra\n");
  return dykstra_project(tp, target, cone_kind(), &weights);
}

}  // namespace detail

// AdaGrad over cone(T): per-coordinate stepsizes from accumulated squared
// losses, with the projection taken in the induced diagonal metric.
class AdaGradCone {
 public:
  AdaGradCone(const Treeplex* tp, double eta, double delta)
      : tp_(tp), eta_(eta), delta_(delta), r_(tp->dim(), 0.0), s_(tp->dim(), 0.0) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  }

  const SeqVector& decide() { return r_; }

  void update(const SeqVector& f_loss) {
    const int d = tp_->dim();
    SeqVector h(d), target(d);
    for (int i = 0; i < d; ++i) {
      s_[i] += f_loss[i] * f_loss[i];
      h[i] = std::sqrt(s_[i]) + delta_;
      target[i] = r_[i] - eta_ * f_loss[i] / h[i];
    }
    r_ = detail::checked_weighted_projection(*tp_, target, h);
  }

  const SeqVector& sum_squares() const { return s_; }

 private:
  const Treeplex* tp_;
  double eta_, delta_;
  SeqVector r_, s_;
};

// Adam over cone(T): momentum and second-moment accumulators with bias
// correction, then a diagonally weighted projection. No regret guarantee.
class AdamCone {
 public:
  AdamCone(const Treeplex* tp, double eta, double delta, double beta1,
           double beta2)
      : tp_(tp),
        eta_(eta),
        delta_(delta),
        beta1_(beta1),
        beta2_(beta2),
        r_(tp->dim(), 0.0),
        s_(tp->dim(), 0.0),
        g_(tp->dim(), 0.0) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
      throw std::invalid_argument("beta1, beta2 must lie in [0, 1)");
  }

  const SeqVector& decide() { return r_; }

  void update(const SeqVector& f_loss) {
    ++t_;
    const int d = tp_->dim();
    const double c2 = 1.0 - std::pow(beta2_, t_);
    const double c1 = 1.0 - std::pow(beta1_, t_);
    SeqVector h(d), target(d);
    for (int i = 0; i < d; ++i) {
      s_[i] = beta2_ * s_[i] + (1.0 - beta2_) * f_loss[i] * f_loss[i];
      const double s_hat = s_[i] / c2;
      g_[i] = beta1_ * g_[i] + (1.0 - beta1_) * f_loss[i];
      const double g_hat = g_[i] / c1;
      h[i] = std::sqrt(s_hat) + delta_;
      target[i] = r_[i] - eta_ * g_hat / h[i];
    }
    r_ = detail::checked_weighted_projection(*tp_, target, h);
  }

 private:
  const Treeplex* tp_;
  double eta_, delta_, beta1_, beta2_;
  long t_ = 0;
  SeqVector r_, s_, g_;
};

using TbPlus = Blackwell<PomdCone>;
using PtbPlus = Blackwell<PomdCone>;
using SmoothPtbPlus = Blackwell<PomdCone>;
using AdaGradTbPlus = Blackwell<AdaGradCone>;
using AdamTbPlus = Blackwell<AdamCone>;

inline TbPlus make_tb_plus(const Treeplex* tp, double eta = 1.0) {
  return {tp, PomdCone(tp, eta, cone_kind(), /*predictive=*/false)};
}
inline PtbPlus make_ptb_plus(const Treeplex* tp, double eta = 1.0) {
  return {tp, PomdCone(tp, eta, cone_kind(), /*predictive=*/true)};
}
inline SmoothPtbPlus make_smooth_ptb_plus(const Treeplex* tp, double eta,
                                          double r0) {
  return {tp, PomdCone(tp, eta, stable_kind(r0), /*predictive=*/true)};
}
inline AdaGradTbPlus make_adagrad_tb_plus(const Treeplex* tp, double eta,
                                          double delta = 1e-6) {
  return {tp, AdaGradCone(tp, eta, delta)};
}
inline AdamTbPlus make_adam_tb_plus(const Treeplex* tp, double eta,
                                    double delta = 1e-6, double beta1 = 0.9,
                                    double beta2 = 0.999) {
  return {tp, AdamCone(tp, eta, delta, beta1, beta2)};
}

// Single-call predictive online mirror descent on the treeplex:
//   x_t = Pi_T(x_{t-1} - eta (2 l_{t-1} - l_{t-2})),
// started from the uniform strategy.
class ScPomd final : public SequenceMinimizer {
 public:
  ScPomd(const Treeplex* tp, double eta)
      : tp_(tp),
        eta_(eta),
        x_(uniform_strategy(*tp)),
        l1_(tp->dim(), 0.0),
        l2_(tp->dim(), 0.0) {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  }

  const SeqVector& propose() override {
    double gnorm = 0.0;
    SeqVector target(tp_->dim());
    for (int i = 0; i < tp_->dim(); ++i) {
      const double g = 2.0 * l1_[i] - l2_[i];
      gnorm = std::max(gnorm, std::abs(g));
      target[i] = x_[i] - eta_ * g;
    }
    if (gnorm > 0.0) x_ = project(*tp_, target, treeplex_kind());
    return x_;
  }

  void observe(const SeqVector& loss) override {
    l2_ = std::move(l1_);
    l1_ = loss;
  }

 private:
  const Treeplex* tp_;
  double eta_;
  SeqVector x_, l1_, l2_;
};

// ---------------------------------------------------------------------------
// Simplex-level minimizers (the locals of CFR+ / PCFR+).
// ---------------------------------------------------------------------------

// Regret Matching+: x_t = R_t / ||R_t||_1 (0/0 -> uniform),
// R_{t+1} = max(0, R_t - eta g(x_t, l_t)).
class RmPlus {
 public:
  explicit RmPlus(int actions, double eta = 1.0)
      : eta_(eta), r_(actions, 0.0), z_(actions, 1.0 / actions) {}

  const std::vector<double>& propose() {
    normalize(r_);
    return z_;
  }

  void observe(const std::vector<double>& loss) {
    const auto g = g_transform(z_, loss);
    for (std::size_t i = 0; i < r_.size(); ++i)
      r_[i] = std::max(0.0, r_[i] - eta_ * g[i]);
  }

  const std::vector<double>& accumulator() const { return r_; }

 private:
  void normalize(const std::vector<double>& from) {
    double s = 0.0;
    for (double v : from) s += v;
    if (s <= 0.0) {
      std::fill(z_.begin(), z_.end(), 1.0 / z_.size());
    } else {
      for (std::size_t i = 0; i < z_.size(); ++i) z_[i] = from[i] / s;
    }
  }

  double eta_;
  std::vector<double> r_, z_;
};

// Predictive Regret Matching+: the previous g-transformed loss serves as the
// prediction applied before normalizing.
class PrmPlus {
 public:
  explicit PrmPlus(int actions, double eta = 1.0)
      : eta_(eta),
        r_(actions, 0.0),
        prev_g_(actions, 0.0),
        z_(actions, 1.0 / actions) {}

  const std::vector<double>& propose() {
    r_hat_.resize(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i)
      r_hat_[i] = std::max(0.0, r_[i] - eta_ * prev_g_[i]);
    double s = 0.0;
    for (double v : r_hat_) s += v;
    if (s <= 0.0) {
      std::fill(z_.begin(), z_.end(), 1.0 / z_.size());
    } else {
      for (std::size_t i = 0; i < z_.size(); ++i) z_[i] = r_hat_[i] / s;
    }
    return z_;
  }

  void observe(const std::vector<double>& loss) {
    const auto g = g_transform(z_, loss);
    for (std::size_t i = 0; i < r_.size(); ++i)
      r_[i] = std::max(0.0, r_[i] - eta_ * g[i]);
    prev_g_ = g;
  }

  const std::vector<double>& accumulator() const { return r_; }
  const std::vector<double>& predicted_accumulator() const { return r_hat_; }

 private:
  double eta_;
  std::vector<double> r_, prev_g_, r_hat_, z_;
};

}  // namespace tbsolve
