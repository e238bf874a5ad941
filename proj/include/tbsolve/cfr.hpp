#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "tbsolve/minimizers.hpp"
#include "tbsolve/treeplex.hpp"

namespace tbsolve {

struct CounterfactualResult {
  std::vector<std::vector<double>> local_losses;  // per infoset, per action
  std::vector<double> values;                     // V^j
};

// Bottom-up pass of the CFR decomposition: the local loss of action a at
// infoset j is the sequence loss plus the values of the child infosets,
//   l^j_a = l_(j,a) + sum_{j' in C_(j,a)} V^j',
// and V^j = sum_a x^j_a l^j_a.
inline CounterfactualResult counterfactual_losses(
    const Treeplex& tp, const std::vector<std::vector<double>>& behavioral,
    const SeqVector& loss) {
  check_aligned(tp, loss, "counterfactual_losses");
  const int m = tp.num_infosets();
  if (static_cast<int>(behavioral.size()) != m)
    throw std::invalid_argument("counterfactual_losses: behavioral profile size");
  CounterfactualResult out;
  out.local_losses.resize(m);
  out.values.assign(m, 0.0);
  for (int j = m - 1; j >= 0; --j) {
    const InfosetRecord& rec = tp.infosets()[j];
    const auto& bh = behavioral[j];
    if (static_cast<int>(bh.size()) != rec.num_actions())
      throw std::invalid_argument("counterfactual_losses: behavioral arity");
    auto& local = out.local_losses[j];
    local.resize(rec.num_actions());
    double value = 0.0;
    for (int a = 0; a < rec.num_actions(); ++a) {
      double c = loss[rec.first_seq + a];
      for (int child : tp.children_of(rec.first_seq + a)) c += out.values[child];
      local[a] = c;
      value += bh[a] * c;
    }
    out.values[j] = value;
  }
  return out;
}

// Top-down image of a behavioral profile in sequence form.
inline SeqVector behavioral_to_sequence(
    const Treeplex& tp, const std::vector<std::vector<double>>& behavioral) {
  if (static_cast<int>(behavioral.size()) != tp.num_infosets())
    throw std::invalid_argument("behavioral_to_sequence: profile size");
  SeqVector x(tp.dim(), 0.0);
  x[0] = 1.0;
  for (int j = 0; j < tp.num_infosets(); ++j) {
    const InfosetRecord& rec = tp.infosets()[j];
    for (int a = 0; a < rec.num_actions(); ++a)
      x[rec.first_seq + a] = x[rec.parent] * behavioral[j][a];
  }
  return x;
}

// CFR+ (local RM+) or PCFR+ (local PRM+) assembled into a treeplex regret
// minimizer. Per-infoset stepsizes are accepted; the decision stream does not
// depend on them.
class CfrMinimizer final : public SequenceMinimizer {
 public:
  CfrMinimizer(const Treeplex* tp, bool predictive,
               std::vector<double> infoset_eta = {})
      : tp_(tp), predictive_(predictive) {
    const int m = tp->num_infosets();
    if (infoset_eta.empty()) infoset_eta.assign(m, 1.0);
    if (static_cast<int>(infoset_eta.size()) != m)
      throw std::invalid_argument("cfr: one stepsize per infoset expected");
    bh_.resize(m);
    for (int j = 0; j < m; ++j) {
      const int na = tp->infosets()[j].num_actions();
      if (predictive_)
        prm_.emplace_back(na, infoset_eta[j]);
      else
        rm_.emplace_back(na, infoset_eta[j]);
      // Uniform initial profile: under alternation the second player
      // observes a loss before its first propose().
      bh_[j].assign(na, 1.0 / na);
    }
  }

  const SeqVector& propose() override {
    for (int j = 0; j < tp_->num_infosets(); ++j)
      bh_[j] = predictive_ ? prm_[j].propose() : rm_[j].propose();
    x_ = behavioral_to_sequence(*tp_, bh_);
    return x_;
  }

  void observe(const SeqVector& loss) override {
    const CounterfactualResult cf = counterfactual_losses(*tp_, bh_, loss);
    for (int j = 0; j < tp_->num_infosets(); ++j) {
      if (predictive_)
        prm_[j].observe(cf.local_losses[j]);
      else
        rm_[j].observe(cf.local_losses[j]);
    }
  }

  const std::vector<std::vector<double>>& behavioral() const { return bh_; }
  const std::vector<double>& local_accumulator(int j) const {
    return predictive_ ? prm_[j].accumulator() : rm_[j].accumulator();
  }

 private:
  const Treeplex* tp_;
  bool predictive_;
  std::vector<RmPlus> rm_;
  std::vector<PrmPlus> prm_;
  std::vector<std::vector<double>> bh_;
  SeqVector x_;
};

}  // namespace tbsolve
