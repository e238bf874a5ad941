#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tbsolve/cfr.hpp"
#include "tbsolve/games.hpp"
#include "tbsolve/minimizers.hpp"
#include "tbsolve/treeplex.hpp"

namespace tbsolve {

enum class Algorithm {
  tb_plus,
  ptb_plus,
  smooth_ptb_plus,
  adagrad_tb_plus,
  adam_tb_plus,
  cfr_plus,
  pcfr_plus,
  sc_pomd,
};

enum class Weighting { uniform, linear, quadratic };

// Appendix constants: the stepsize grid tried for stepsize-dependent
// algorithms, the stable-region floor, and the Adam/AdaGrad parameters.
inline constexpr double kEtaGrid[] = {0.05, 0.1, 0.5, 1.0, 2.0, 5.0};
inline constexpr double kDefaultR0 = 0.1;
inline constexpr double kDefaultDelta = 1e-6;
inline constexpr double kDefaultBeta1 = 0.9;
inline constexpr double kDefaultBeta2 = 0.999;

inline const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::tb_plus: return "tb+";
    case Algorithm::ptb_plus: return "ptb+";
    case Algorithm::smooth_ptb_plus: return "smooth-ptb+";
    case Algorithm::adagrad_tb_plus: return "adagrad-tb+";
    case Algorithm::adam_tb_plus: return "adam-tb+";
    case Algorithm::cfr_plus: return "cfr+";
    case Algorithm::pcfr_plus: return "pcfr+";
    case Algorithm::sc_pomd: return "sc-pomd";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (Algorithm a :
       {Algorithm::tb_plus, Algorithm::ptb_plus, Algorithm::smooth_ptb_plus,
        Algorithm::adagrad_tb_plus, Algorithm::adam_tb_plus,
        Algorithm::cfr_plus, Algorithm::pcfr_plus, Algorithm::sc_pomd})
    if (s == algorithm_name(a)) return a;
  return std::nullopt;
}

// Whether the decision stream depends on the value of eta.
inline bool stepsize_dependent(Algorithm a) {
  switch (a) {
    case Algorithm::tb_plus:
    case Algorithm::ptb_plus:
    case Algorithm::cfr_plus:
    case Algorithm::pcfr_plus:
      return false;
    default:
      return true;
  }
}

struct RunConfig {
  Algorithm algo = Algorithm::ptb_plus;
  bool alternation = false;
  Weighting weighting = Weighting::uniform;
  std::optional<double> eta;
  std::optional<double> r0;
  int iterations = 1000;
  int gap_every = 10;
  std::uint64_t seed = 0;
};

struct RunRecord {
  int iter = 0;
  double gap_avg = 0.0;
  double gap_last = 0.0;
  double elapsed_s = 0.0;
};

// max_{yhat} <x, M yhat> - min_{xhat} <xhat, M y> via two best responses.
inline double duality_gap(const Game& g, const SeqVector& x, const SeqVector& y) {
  SeqVector y_loss = payoff_trans_times_x(g, x);
  for (double& v : y_loss) v = -v;  // maximize <yhat, M^T x>
  const double best_attack = -best_response(g.y_treeplex, y_loss).value;
  const double best_defense = best_response(g.x_treeplex, payoff_times_y(g, y)).value;
  return best_attack - best_defense;
}

inline double iterate_weight(Weighting w, int t) {
  switch (w) {
    case Weighting::uniform: return 1.0;
    case Weighting::linear: return static_cast<double>(t);
    case Weighting::quadratic: return static_cast<double>(t) * t;
  }
  return 1.0;
}

// Incremental weighted average of a strategy stream.
class StrategyAverager {
 public:
  explicit StrategyAverager(Weighting w) : weighting_(w) {}

  void add(const SeqVector& x, int t) {
    const double w = iterate_weight(weighting_, t);
    if (avg_.empty()) avg_.assign(x.size(), 0.0);
    weight_sum_ += w;
    const double step = w / weight_sum_;
    for (std::size_t i = 0; i < x.size(); ++i)
      avg_[i] += step * (x[i] - avg_[i]);
  }

  const SeqVector& average() const {
    if (avg_.empty()) throw std::logic_error("average of an empty stream");
    return avg_;
  }
  double weight_sum() const { return weight_sum_; }

 private:
  Weighting weighting_;
  SeqVector avg_;
  double weight_sum_ = 0.0;
};

inline SeqVector weighted_average(std::span<const SeqVector> iterates,
                                  Weighting w) {
  StrategyAverager avg(w);
  for (std::size_t t = 0; t < iterates.size(); ++t)
    avg.add(iterates[t], static_cast<int>(t) + 1);
  return avg.average();
}

// Theorem stepsize policy for Smooth PTB+:
//   eta = r0 / (sqrt(8 d omega_hat^3) ||M||)
// with d = max(n1, n2) + 1, omega_hat the larger treeplex norm bound and
// ||M|| the maximum row/column l2 norm.
inline double theorem_stepsize(const Game& g, double r0) {
  const double omega_hat = std::max(max_strategy_norm(g.x_treeplex),
                                    max_strategy_norm(g.y_treeplex));
  const double d = std::max(g.x_treeplex.num_sequences(),
                            g.y_treeplex.num_sequences()) + 1.0;
  const double m_norm = max_payoff_row_col_norm(g);
  return r0 / (std::sqrt(8.0 * d * omega_hat * omega_hat * omega_hat) * m_norm);
}

inline std::unique_ptr<SequenceMinimizer> make_minimizer(const Treeplex* tp,
                                                         const RunConfig& cfg) {
  const auto need_eta = [&]() {
    if (!cfg.eta)
      throw std::invalid_argument(
          std::string("algorithm '") + algorithm_name(cfg.algo) +
          "' requires --eta (try one of {0.05, 0.1, 0.5, 1, 2, 5})");
    return *cfg.eta;
  };
  const double eta_free = cfg.eta.value_or(1.0);  // invariant algorithms
  switch (cfg.algo) {
    case Algorithm::tb_plus:
      return std::make_unique<TbPlus>(make_tb_plus(tp, eta_free));
    case Algorithm::ptb_plus:
      return std::make_unique<PtbPlus>(make_ptb_plus(tp, eta_free));
    case Algorithm::smooth_ptb_plus: {
      if (!cfg.r0 || !(*cfg.r0 > 0.0))
        throw std::invalid_argument("smooth-ptb+ requires r0 > 0");
      return std::make_unique<SmoothPtbPlus>(
          make_smooth_ptb_plus(tp, need_eta(), *cfg.r0));
    }
    case Algorithm::adagrad_tb_plus:
      return std::make_unique<AdaGradTbPlus>(
          make_adagrad_tb_plus(tp, need_eta(), kDefaultDelta));
    case Algorithm::adam_tb_plus:
      return std::make_unique<AdamTbPlus>(make_adam_tb_plus(
          tp, need_eta(), kDefaultDelta, kDefaultBeta1, kDefaultBeta2));
    case Algorithm::cfr_plus:
      return std::make_unique<CfrMinimizer>(tp, /*predictive=*/false);
    case Algorithm::pcfr_plus:
      return std::make_unique<CfrMinimizer>(tp, /*predictive=*/true);
    case Algorithm::sc_pomd:
      return std::make_unique<ScPomd>(tp, need_eta());
  }
  throw std::invalid_argument("unknown algorithm");
}

struct RunResult {
  std::vector<RunRecord> records;
  SeqVector average_x, average_y;  // final weighted averages
};

// Self-play loop, simultaneous or alternating. Records the duality gaps of
// the weighted average and of the last iterate at iteration 1, every
// `gap_every` iterations and at the final iteration.
inline RunResult run(const Game& g, const RunConfig& cfg) {
  if (cfg.iterations < 1)
    throw std::invalid_argument("iterations must be >= 1");
  if (cfg.gap_every < 1) throw std::invalid_argument("gap_every must be >= 1");

  auto px = make_minimizer(&g.x_treeplex, cfg);
  auto py = make_minimizer(&g.y_treeplex, cfg);
  StrategyAverager avg_x(cfg.weighting), avg_y(cfg.weighting);

  RunResult result;
  const auto start = std::chrono::steady_clock::now();
  for (int t = 1; t <= cfg.iterations; ++t) {
    SeqVector x_t, y_t;
    if (cfg.alternation) {
      x_t = px->propose();
      SeqVector y_loss = payoff_trans_times_x(g, x_t);
      for (double& v : y_loss) v = -v;
      py->observe(y_loss);
      y_t = py->propose();
      px->observe(payoff_times_y(g, y_t));
    } else {
      x_t = px->propose();
      y_t = py->propose();
      px->observe(payoff_times_y(g, y_t));
      SeqVector y_loss = payoff_trans_times_x(g, x_t);
      for (double& v : y_loss) v = -v;
      py->observe(y_loss);
    }
    avg_x.add(x_t, t);
    avg_y.add(y_t, t);

    if (t == 1 || t % cfg.gap_every == 0 || t == cfg.iterations) {
      RunRecord rec;
      rec.iter = t;
      rec.gap_avg = duality_gap(g, avg_x.average(), avg_y.average());
      rec.gap_last = duality_gap(g, x_t, y_t);
      rec.elapsed_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      result.records.push_back(rec);
    }
  }
  result.average_x = avg_x.average();
  result.average_y = avg_y.average();
  return result;
}

}  // namespace tbsolve
