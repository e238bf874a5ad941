#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tbsolve/treeplex.hpp"

namespace tbsolve {

// One sparse payoff entry of M in R^{(n1+1) x (n2+1)}: <x, M y> is the
// expected amount the second player receives from the first.
struct PayoffEntry {
  int row = 0;  // x-player sequence
  int col = 0;  // y-player sequence
  double value = 0.0;

  bool operator==(const PayoffEntry&) const = default;
};

struct Game {
  std::string name;
  Treeplex x_treeplex;
  Treeplex y_treeplex;
  std::vector<PayoffEntry> payoff;  // sorted by (row, col), one entry per pair

  bool operator==(const Game& other) const {
    return name == other.name && x_treeplex == other.x_treeplex &&
           y_treeplex == other.y_treeplex && payoff == other.payoff;
  }
};

inline SeqVector payoff_times_y(const Game& g, const SeqVector& y) {  // M y
  check_aligned(g.y_treeplex, y, "payoff_times_y");
  SeqVector out(g.x_treeplex.dim(), 0.0);
  for (const PayoffEntry& e : g.payoff) out[e.row] += e.value * y[e.col];
  return out;
}

inline SeqVector payoff_trans_times_x(const Game& g, const SeqVector& x) {  // M^T x
  check_aligned(g.x_treeplex, x, "payoff_trans_times_x");
  SeqVector out(g.y_treeplex.dim(), 0.0);
  for (const PayoffEntry& e : g.payoff) out[e.col] += e.value * x[e.row];
  return out;
}

inline double bilinear(const Game& g, const SeqVector& x, const SeqVector& y) {
  check_aligned(g.x_treeplex, x, "bilinear");
  check_aligned(g.y_treeplex, y, "bilinear");
  double acc = 0.0;
  for (const PayoffEntry& e : g.payoff) acc += e.value * x[e.row] * y[e.col];
  return acc;
}

// ||M||: maximum l2-norm of any row and any column.
inline double max_payoff_row_col_norm(const Game& g) {
  SeqVector row_sq(g.x_treeplex.dim(), 0.0), col_sq(g.y_treeplex.dim(), 0.0);
  for (const PayoffEntry& e : g.payoff) {
    row_sq[e.row] += e.value * e.value;
    col_sq[e.col] += e.value * e.value;
  }
  double best = 0.0;
  for (double v : row_sq) best = std::max(best, v);
  for (double v : col_sq) best = std::max(best, v);
  return std::sqrt(best);
}

// ---------------------------------------------------------------------------
// Explicit game trees. Generators build an Efg; sequence_form() folds chance
// into the payoff matrix and derives both treeplexes.
// ---------------------------------------------------------------------------

struct EfgNode {
  int player = -1;                  // -1 terminal, 0 chance, 1 or 2
  double payoff = 0.0;              // terminal: amount player 2 receives
  std::string infoset;              // decision nodes: player-local key
  std::vector<int> children;
  std::vector<double> chance_probs;  // aligned with children (chance only)
};

struct Efg {
  std::vector<EfgNode> nodes;
  int root = 0;

  int add_terminal(double payoff_to_p2) {
    nodes.push_back({-1, payoff_to_p2, {}, {}, {}});
    return static_cast<int>(nodes.size()) - 1;
  }
  int add_chance(std::vector<double> probs, std::vector<int> children) {
    if (probs.size() != children.size())
      throw std::invalid_argument("efg: chance arity mismatch");
    nodes.push_back({0, 0.0, {}, std::move(children), std::move(probs)});
    return static_cast<int>(nodes.size()) - 1;
  }
  int add_decision(int player, std::string key, std::vector<int> children) {
    if (player != 1 && player != 2)
      throw std::invalid_argument("efg: player must be 1 or 2");
    if (children.empty())
      throw std::invalid_argument("efg: decision node without actions");
    nodes.push_back({player, 0.0, std::move(key), std::move(children), {}});
    return static_cast<int>(nodes.size()) - 1;
  }
};

struct SequenceFormMaps {
  // per player (index 0 = player 1): infoset key -> infoset index
  std::unordered_map<std::string, int> infoset_index[2];
};

namespace detail {

struct InfosetInfo {
  std::pair<int, int> parent{-1, -1};  // (parent infoset, action), (-1,-1) = empty
  int num_actions = 0;
};

}  // namespace detail

// Converts a game tree to sequence form. Infosets are numbered per player in
// DFS-preorder discovery order (topological by perfect recall); chance
// probabilities are folded into the payoff entries. Entries accumulating to
// less than 1e-12 in magnitude are dropped.
inline Game sequence_form(const Efg& efg, std::string name,
                          SequenceFormMaps* maps_out = nullptr) {
  SequenceFormMaps maps;
  std::vector<detail::InfosetInfo> info[2];

  // Pass 1: discover infosets and check perfect-recall consistency. The
  // parent sequence is tracked symbolically as (infoset, action).
  {
    struct Frame {
      int node;
      std::pair<int, int> seq1, seq2;
    };
    std::vector<Frame> stack{{efg.root, {-1, -1}, {-1, -1}}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      const EfgNode& node = efg.nodes[f.node];
      if (node.player == -1) continue;
      if (node.player == 0) {
        double total = 0.0;
        for (double p : node.chance_probs) total += p;
        if (std::abs(total - 1.0) > 1e-9)
          throw std::invalid_argument("efg: chance probabilities sum to " +
                                      std::to_string(total));
        for (int c : node.children) stack.push_back({c, f.seq1, f.seq2});
        continue;
      }
      const int p = node.player - 1;
      const std::pair<int, int> parent = node.player == 1 ? f.seq1 : f.seq2;
      auto [it, fresh] = maps.infoset_index[p].try_emplace(
          node.infoset, static_cast<int>(info[p].size()));
      if (fresh) {
        info[p].push_back({parent, static_cast<int>(node.children.size())});
      } else {
        const detail::InfosetInfo& known = info[p][it->second];
        if (known.parent != parent)
          throw std::invalid_argument("efg: infoset '" + node.infoset +
                                      "' violates perfect recall");
        if (known.num_actions != static_cast<int>(node.children.size()))
          throw std::invalid_argument("efg: infoset '" + node.infoset +
                                      "' has inconsistent action counts");
      }
      const int id = it->second;
      for (int a = 0; a < static_cast<int>(node.children.size()); ++a) {
        Frame child{node.children[a], f.seq1, f.seq2};
        (node.player == 1 ? child.seq1 : child.seq2) = {id, a};
        stack.push_back(child);
      }
    }
  }

  // Sequence index layout: contiguous ranges in infoset discovery order.
  std::vector<int> first_seq[2];
  std::vector<InfosetRecord> recs[2];
  for (int p = 0; p < 2; ++p) {
    int next = 1;
    first_seq[p].resize(info[p].size());
    for (std::size_t j = 0; j < info[p].size(); ++j) {
      first_seq[p][j] = next;
      next += info[p][j].num_actions;
    }
    const auto seq_of = [&](std::pair<int, int> s) {
      return s.first < 0 ? 0 : first_seq[p][s.first] + s.second;
    };
    for (std::size_t j = 0; j < info[p].size(); ++j)
      recs[p].push_back({seq_of(info[p][j].parent), first_seq[p][j],
                         first_seq[p][j] + info[p][j].num_actions - 1});
  }

  // Pass 2: fold chance into the payoff matrix.
  std::map<std::pair<int, int>, double> acc;
  {
    struct Frame {
      int node;
      int s1, s2;
      double prob;
    };
    std::vector<Frame> stack{{efg.root, 0, 0, 1.0}};
    while (!stack.empty()) {
      const Frame f = stack.back();
      stack.pop_back();
      const EfgNode& node = efg.nodes[f.node];
      if (node.player == -1) {
        if (node.payoff != 0.0) acc[{f.s1, f.s2}] += f.prob * node.payoff;
        continue;
      }
      if (node.player == 0) {
        for (std::size_t c = 0; c < node.children.size(); ++c)
          stack.push_back(
              {node.children[c], f.s1, f.s2, f.prob * node.chance_probs[c]});
        continue;
      }
      const int p = node.player - 1;
      const int id = maps.infoset_index[p].at(node.infoset);
      for (int a = 0; a < static_cast<int>(node.children.size()); ++a) {
        Frame child{node.children[a], f.s1, f.s2, f.prob};
        (node.player == 1 ? child.s1 : child.s2) = first_seq[p][id] + a;
        stack.push_back(child);
      }
    }
  }

  Game g;
  g.name = std::move(name);
  g.x_treeplex = Treeplex(recs[0]);
  g.y_treeplex = Treeplex(recs[1]);
  for (const auto& [key, value] : acc)
    if (std::abs(value) >= 1e-12) g.payoff.push_back({key.first, key.second, value});
  if (maps_out) *maps_out = std::move(maps);
  return g;
}

struct BuiltGame {
  Game game;
  Efg tree;
  SequenceFormMaps maps;
};

// ---------------------------------------------------------------------------
// Kuhn poker. Three cards J < Q < K, one dealt to each player (six deals,
// probability 1/6 each), one chip ante. Player 1 checks or bets 1; facing a
// check, player 2 checks (showdown for the antes) or bets 1, and player 1
// then folds or calls; facing a bet, player 2 folds or calls. Showdown pays
// the pot to the higher card.
// ---------------------------------------------------------------------------
inline BuiltGame kuhn() {
  static const char* kCard = "JQK";
  Efg efg;
  std::vector<int> deals;
  std::vector<double> probs;
  for (int c1 = 0; c1 < 3; ++c1) {
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      const double win = c1 > c2 ? 1.0 : -1.0;  // showdown sign for player 1
      const std::string p1 = std::string("1:") + kCard[c1];
      const std::string p2 = std::string("2:") + kCard[c2];
      // Terminal payoffs are the amount player 2 receives.
      const int t_cc = efg.add_terminal(-win);
      const int t_cbf = efg.add_terminal(1.0);
      const int t_cbc = efg.add_terminal(-2.0 * win);
      const int t_bf = efg.add_terminal(-1.0);
      const int t_bc = efg.add_terminal(-2.0 * win);
      const int p1_cb = efg.add_decision(1, p1 + ":cb", {t_cbf, t_cbc});
      const int p2_c = efg.add_decision(2, p2 + ":c", {t_cc, p1_cb});
      const int p2_b = efg.add_decision(2, p2 + ":b", {t_bf, t_bc});
      deals.push_back(efg.add_decision(1, p1, {p2_c, p2_b}));
      probs.push_back(1.0 / 6.0);
    }
  }
  efg.root = efg.add_chance(std::move(probs), std::move(deals));
  BuiltGame out;
  out.game = sequence_form(efg, "kuhn", &out.maps);
  out.tree = std::move(efg);
  return out;
}

// ---------------------------------------------------------------------------
// Goofspiel(k), k in [2, 4]. Prizes 1..k are auctioned in ascending order;
// both players hold bid cards 1..k and bid simultaneously, the higher bid
// wins the prize and ties void it. All bids are revealed after each round.
// The final round is forced and folded into the terminal payoff. Payoffs are
// the point differential, so the game is zero-sum and symmetric.
// ---------------------------------------------------------------------------
inline BuiltGame goofspiel(int k) {
  if (k < 2 || k > 4)
    throw std::invalid_argument("goofspiel: k must be in [2, 4] (desk scale)");
  Efg efg;

  // Bitmasks of remaining bid cards; cards are 1-based values.
  const auto forced_diff = [&](int rem1, int rem2, int prize) {
    const int c1 = std::countr_zero(static_cast<unsigned>(rem1)) + 1;
    const int c2 = std::countr_zero(static_cast<unsigned>(rem2)) + 1;
    return c1 == c2 ? 0.0 : (c1 > c2 ? 1.0 : -1.0) * prize;
  };

  // Builds the decision point at round r (0-based, prize r+1).
  auto build = [&](auto&& self, int round, int rem1, int rem2, double diff,
                   const std::string& hist) -> int {
    if (round == k - 1)
      return efg.add_terminal(-(diff + forced_diff(rem1, rem2, k)));
    std::vector<int> p1_children;
    for (int c1 = 1; c1 <= k; ++c1) {
      if (!(rem1 >> (c1 - 1) & 1)) continue;
      std::vector<int> p2_children;
      for (int c2 = 1; c2 <= k; ++c2) {
        if (!(rem2 >> (c2 - 1) & 1)) continue;
        const double gain =
            c1 == c2 ? 0.0 : (c1 > c2 ? 1.0 : -1.0) * (round + 1);
        p2_children.push_back(self(self, round + 1, rem1 & ~(1 << (c1 - 1)),
                                   rem2 & ~(1 << (c2 - 1)), diff + gain,
                                   hist + ";" + std::to_string(c1) + "v" +
                                       std::to_string(c2)));
      }
      // Player 2 does not observe the current bid of player 1.
      p1_children.push_back(efg.add_decision(2, "2:" + hist, std::move(p2_children)));
    }
    return efg.add_decision(1, "1:" + hist, std::move(p1_children));
  };

  const int full = (1 << k) - 1;
  efg.root = build(build, 0, full, full, 0.0, "");
  BuiltGame out;
  out.game = sequence_form(efg, "goofspiel" + std::to_string(k), &out.maps);
  out.tree = std::move(efg);
  return out;
}

// ---------------------------------------------------------------------------
// Parameterized Leduc poker. A deck of ranks x suits cards (ranks * suits in
// [3, 6]); each player antes 1 and receives one private card, observing only
// its rank. A betting round (bet size 2) precedes the reveal of a public
// board card, then a second round (bet size 4) follows. At most `raise_cap`
// raises per round. A player facing no bet may check or raise; facing a bet
// they fold, call or raise. Showdown: a rank pairing the board wins,
// otherwise the higher rank; equal ranks split.
// ---------------------------------------------------------------------------
inline BuiltGame leduc(int ranks, int suits, int raise_cap) {
  if (ranks < 2 || suits < 1 || ranks * suits < 3 || ranks * suits > 6 ||
      raise_cap < 0 || raise_cap > 3)
    throw std::invalid_argument(
        "leduc: need ranks >= 2, 3 <= ranks*suits <= 6, 0 <= raise_cap <= 3 "
        "(desk scale)");
  const int deck = ranks * suits;
  Efg efg;

  struct Deal {
    int c1, c2;
  };
  const auto rank = [&](int card) { return card / suits; };

  // Showdown payoff to player 1 with equal contributions `pot_each`.
  const auto showdown = [&](int c1, int c2, int board, double pot_each) {
    const bool pair1 = rank(c1) == rank(board);
    const bool pair2 = rank(c2) == rank(board);
    if (pair1 != pair2) return pair1 ? pot_each : -pot_each;
    if (rank(c1) == rank(c2)) return 0.0;
    return rank(c1) > rank(c2) ? pot_each : -pot_each;
  };

  // Builds a betting state. `to_act` is 1 or 2; `owed` is the amount the
  // player to act must match; contributions include antes. Returns a node.
  // After round 1 ends without a fold, the board is dealt and round 2 starts;
  // after round 2, showdown.
  auto betting = [&](auto&& self, const Deal& deal, int board, int round,
                     std::string hist, int to_act, double owed, int raises,
                     double contrib1, double contrib2,
                     bool opponent_checked) -> int {
    const double bet_size = round == 1 ? 2.0 : 4.0;
    const int me_card = to_act == 1 ? deal.c1 : deal.c2;
    const double my_contrib = to_act == 1 ? contrib1 : contrib2;
    const std::string key = std::to_string(to_act) + ":" +
                            std::to_string(rank(me_card)) + ":" + hist;

    const auto after_round = [&](double pot_each) -> int {
      if (round == 2)
        return efg.add_terminal(-showdown(deal.c1, deal.c2, board, pot_each));
      // Reveal the board card, then run round 2.
      std::vector<int> kids;
      std::vector<double> probs;
      for (int b = 0; b < deck; ++b) {
        if (b == deal.c1 || b == deal.c2) continue;
        kids.push_back(self(self, deal, b, 2,
                            hist + "/" + std::to_string(rank(b)), 1, 0.0, 0,
                            pot_each, pot_each, false));
        probs.push_back(1.0 / (deck - 2));
      }
      return efg.add_chance(std::move(probs), std::move(kids));
    };

    std::vector<int> children;
    if (owed == 0.0) {
      // check
      children.push_back(
          opponent_checked
              ? after_round(my_contrib)
              : self(self, deal, board, round, hist + "k", 3 - to_act, 0.0,
                     raises, contrib1, contrib2, true));
    } else {
      // fold: the folder forfeits their contribution to the opponent.
      children.push_back(efg.add_terminal(to_act == 1 ? contrib1 : -contrib2));
      // call
      children.push_back(after_round(my_contrib + owed));
    }
    if (raises < raise_cap) {
      const double put_in = owed + bet_size;
      children.push_back(self(
          self, deal, board, round, hist + "r", 3 - to_act, bet_size,
          raises + 1, to_act == 1 ? contrib1 + put_in : contrib1,
          to_act == 2 ? contrib2 + put_in : contrib2, false));
    }
    return efg.add_decision(to_act, key, std::move(children));
  };

  std::vector<int> deals;
  std::vector<double> probs;
  for (int c1 = 0; c1 < deck; ++c1)
    for (int c2 = 0; c2 < deck; ++c2) {
      if (c1 == c2) continue;
      deals.push_back(betting(betting, {c1, c2}, -1, 1, "", 1, 0.0, 0, 1.0,
                              1.0, false));
      probs.push_back(1.0 / (deck * (deck - 1)));
    }
  efg.root = efg.add_chance(std::move(probs), std::move(deals));

  BuiltGame out;
  out.game = sequence_form(efg,
                           "leduc" + std::to_string(ranks) +
                               std::to_string(suits) + std::to_string(raise_cap),
                           &out.maps);
  out.tree = std::move(efg);
  return out;
}

// Depth-1 embedding of a matrix game; entries are the payoff to the column
// player (player 2).
inline BuiltGame matrix_game(const std::vector<std::vector<double>>& payoff_to_p2,
                             std::string name) {
  if (payoff_to_p2.empty() || payoff_to_p2.front().empty())
    throw std::invalid_argument("matrix_game: empty matrix");
  Efg efg;
  std::vector<int> rows;
  for (const auto& row : payoff_to_p2) {
    if (row.size() != payoff_to_p2.front().size())
      throw std::invalid_argument("matrix_game: ragged matrix");
    std::vector<int> cells;
    for (double v : row) cells.push_back(efg.add_terminal(v));
    rows.push_back(efg.add_decision(2, "2:", std::move(cells)));
  }
  efg.root = efg.add_decision(1, "1:", std::move(rows));
  BuiltGame out;
  out.game = sequence_form(efg, std::move(name), &out.maps);
  out.tree = std::move(efg);
  return out;
}

}  // namespace tbsolve
