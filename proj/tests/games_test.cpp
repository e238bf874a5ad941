#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "tbsolve/game_io.hpp"
#include "tbsolve/games.hpp"
#include "tbsolve/treeplex.hpp"
#include "test_util.hpp"

using namespace tbsolve;
using tbtest::Rng;

namespace {

// Independent expected-payoff oracle: recursive walk of the game tree,
// multiplying the players' sequence-form entries at the terminals.
double tree_expected_payoff(const BuiltGame& bg, const SeqVector& x,
                            const SeqVector& y) {
  struct Frame {
    int node;
    int s1, s2;
    double prob;
  };
  double acc = 0.0;
  std::vector<Frame> stack{{bg.tree.root, 0, 0, 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const EfgNode& node = bg.tree.nodes[f.node];
    if (node.player == -1) {
      acc += f.prob * node.payoff * x[f.s1] * y[f.s2];
      continue;
    }
    if (node.player == 0) {
      for (std::size_t c = 0; c < node.children.size(); ++c)
        stack.push_back(
            {node.children[c], f.s1, f.s2, f.prob * node.chance_probs[c]});
      continue;
    }
    const int p = node.player - 1;
    const int id = bg.maps.infoset_index[p].at(node.infoset);
    const Treeplex& tp = p == 0 ? bg.game.x_treeplex : bg.game.y_treeplex;
    const int first = tp.infosets()[id].first_seq;
    for (int a = 0; a < static_cast<int>(node.children.size()); ++a) {
      Frame child{node.children[a], f.s1, f.s2, f.prob};
      (p == 0 ? child.s1 : child.s2) = first + a;
      stack.push_back(child);
    }
  }
  return acc;
}

// Hand-rolled Kuhn oracle straight from the rules: the five betting lines of
// each of the six deals, weighted 1/6. Returns the amount player 2 receives.
double kuhn_by_hand(const BuiltGame& bg, const SeqVector& x, const SeqVector& y) {
  static const char* kCard = "JQK";
  const auto seq1 = [&](const std::string& key, int action) {
    const int id = bg.maps.infoset_index[0].at(key);
    return bg.game.x_treeplex.infosets()[id].first_seq + action;
  };
  const auto seq2 = [&](const std::string& key, int action) {
    const int id = bg.maps.infoset_index[1].at(key);
    return bg.game.y_treeplex.infosets()[id].first_seq + action;
  };
  double acc = 0.0;
  for (int c1 = 0; c1 < 3; ++c1)
    for (int c2 = 0; c2 < 3; ++c2) {
      if (c1 == c2) continue;
      const double win = c1 > c2 ? 1.0 : -1.0;  // showdown sign for player 1
      const std::string p1 = std::string("1:") + kCard[c1];
      const std::string p2 = std::string("2:") + kCard[c2];
      double v = 0.0;
      v += x[seq1(p1, 0)] * y[seq2(p2 + ":c", 0)] * -win;         // check check
      v += x[seq1(p1 + ":cb", 0)] * y[seq2(p2 + ":c", 1)] * 1.0;  // ch bet fold
      v += x[seq1(p1 + ":cb", 1)] * y[seq2(p2 + ":c", 1)] * -2.0 * win;
      v += x[seq1(p1, 1)] * y[seq2(p2 + ":b", 0)] * -1.0;         // bet fold
      v += x[seq1(p1, 1)] * y[seq2(p2 + ":b", 1)] * -2.0 * win;   // bet call
      acc += v / 6.0;
    }
  return acc;
}

}  // namespace

TEST_CASE("kuhn structure") {
  const BuiltGame bg = kuhn();
  CHECK(!bg.game.x_treeplex.validate().has_value());
  CHECK(!bg.game.y_treeplex.validate().has_value());
  CHECK(bg.game.x_treeplex.num_infosets() == 6);
  CHECK(bg.game.x_treeplex.num_sequences() == 12);
  CHECK(bg.game.y_treeplex.num_infosets() == 6);
  CHECK(bg.game.y_treeplex.num_sequences() == 12);
  CHECK(bg.game.x_treeplex.depth() == 3);   // observe card, act, maybe act again
  CHECK(bg.game.y_treeplex.depth() == 2);
  CHECK(bg.game.payoff.size() == 30);       // 6 deals x 5 betting lines
  CHECK(max_strategy_norm(bg.game.x_treeplex) == doctest::Approx(std::sqrt(7.0)));
  CHECK(max_strategy_norm(bg.game.y_treeplex) == doctest::Approx(std::sqrt(7.0)));
}

TEST_CASE("kuhn payoffs match the hand-rolled oracle") {
  const BuiltGame bg = kuhn();
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const SeqVector x = tbtest::random_feasible(bg.game.x_treeplex, rng);
    const SeqVector y = tbtest::random_feasible(bg.game.y_treeplex, rng);
    const double direct = bilinear(bg.game, x, y);
    CHECK(direct == doctest::Approx(kuhn_by_hand(bg, x, y)).epsilon(1e-12));
    CHECK(direct == doctest::Approx(tree_expected_payoff(bg, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("goofspiel(2) is the textbook two-card game") {
  const BuiltGame bg = goofspiel(2);
  CHECK(bg.game.x_treeplex.num_infosets() == 1);
  CHECK(bg.game.x_treeplex.num_sequences() == 2);
  CHECK(bg.game.y_treeplex.num_sequences() == 2);

  // Dense payoff to player 1, bids indexed low-to-high.
  double m[3][3] = {};
  for (const PayoffEntry& e : bg.game.payoff) m[e.row][e.col] = -e.value;
  CHECK(m[1][1] == 0.0);
  CHECK(m[1][2] == doctest::Approx(1.0));   // lose prize 1, win prize 2
  CHECK(m[2][1] == doctest::Approx(-1.0));
  CHECK(m[2][2] == 0.0);
  // Antisymmetry under player swap.
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) CHECK(m[i][j] == doctest::Approx(-m[j][i]));
}

TEST_CASE("goofspiel(3) structure and payoff oracle") {
  const BuiltGame bg = goofspiel(3);
  CHECK(!bg.game.x_treeplex.validate().has_value());
  CHECK(bg.game.x_treeplex.num_infosets() == 1 + 9);
  CHECK(bg.game.x_treeplex.num_sequences() == 3 + 18);
  CHECK(bg.game.y_treeplex.num_sequences() == 3 + 18);

  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const SeqVector x = tbtest::random_feasible(bg.game.x_treeplex, rng);
    const SeqVector y = tbtest::random_feasible(bg.game.y_treeplex, rng);
    CHECK(bilinear(bg.game, x, y) ==
          doctest::Approx(tree_expected_payoff(bg, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("leduc(2,2,1) validates and matches the tree walk") {
  const BuiltGame bg = leduc(2, 2, 1);
  CHECK(!bg.game.x_treeplex.validate().has_value());
  CHECK(!bg.game.y_treeplex.validate().has_value());

  // nnz(M) equals the number of nonzero accumulated terminal pairs.
  std::map<std::pair<int, int>, double> acc;
  struct Frame {
    int node;
    int s1, s2;
    double prob;
  };
  std::vector<Frame> stack{{bg.tree.root, 0, 0, 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    const EfgNode& node = bg.tree.nodes[f.node];
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
    const int id = bg.maps.infoset_index[p].at(node.infoset);
    const Treeplex& tp = p == 0 ? bg.game.x_treeplex : bg.game.y_treeplex;
    const int first = tp.infosets()[id].first_seq;
    for (int a = 0; a < static_cast<int>(node.children.size()); ++a) {
      Frame child{node.children[a], f.s1, f.s2, f.prob};
      (p == 0 ? child.s1 : child.s2) = first + a;
      stack.push_back(child);
    }
  }
  std::size_t nnz = 0;
  for (const auto& [key, v] : acc)
    if (std::abs(v) >= 1e-12) ++nnz;
  CHECK(bg.game.payoff.size() == nnz);

  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const SeqVector x = tbtest::random_feasible(bg.game.x_treeplex, rng);
    const SeqVector y = tbtest::random_feasible(bg.game.y_treeplex, rng);
    CHECK(bilinear(bg.game, x, y) ==
          doctest::Approx(tree_expected_payoff(bg, x, y)).epsilon(1e-12));
  }
}

TEST_CASE("desk-scale caps are enforced") {
  CHECK_THROWS_AS(goofspiel(5), std::invalid_argument);
  CHECK_THROWS_AS(goofspiel(1), std::invalid_argument);
  CHECK_THROWS_AS(leduc(4, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(leduc(2, 1, 1), std::invalid_argument);  // deck of 2
}

TEST_CASE("matrix game embedding") {
  const BuiltGame bg = matrix_game({{1.0, -1.0}, {-1.0, 1.0}}, "pennies");
  CHECK(bg.game.x_treeplex.num_sequences() == 2);
  CHECK(bg.game.y_treeplex.num_sequences() == 2);
  const SeqVector u{1.0, 0.5, 0.5};
  CHECK(bilinear(bg.game, u, u) == doctest::Approx(0.0));
}

TEST_CASE("save/load round trip") {
  const Game g = kuhn().game;
  std::stringstream buf;
  save_game(g, buf);
  const Game g2 = load_game(buf);
  CHECK(g2 == g);
}

TEST_CASE("truncated file is a parse error, not a crash") {
  const Game g = kuhn().game;
  std::stringstream buf;
  save_game(g, buf);
  const std::string full = buf.str();
  std::stringstream cut(full.substr(0, full.size() / 2));
  CHECK_THROWS_WITH_AS(load_game(cut), doctest::Contains("game file"),
                       std::runtime_error);
}

TEST_CASE("dangling infoset parent is a validation error naming the infoset") {
  std::stringstream buf;
  buf << R"({
    "version": "efgjson/1",
    "name": "bad",
    "treeplex_x": {"num_sequences": 2,
                   "infosets": [{"parent": 7, "first_seq": 1, "last_seq": 2}]},
    "treeplex_y": {"num_sequences": 1,
                   "infosets": [{"parent": 0, "first_seq": 1, "last_seq": 1}]},
    "payoff_triplets": []
  })";
  CHECK_THROWS_WITH_AS(load_game(buf), doctest::Contains("infoset"),
                       std::runtime_error);
}

TEST_CASE("zero-sum consistency: y loss is exactly -M^T x") {
  const BuiltGame bg = goofspiel(3);
  Rng rng(11);
  const SeqVector x = tbtest::random_feasible(bg.game.x_treeplex, rng);
  const SeqVector y = tbtest::random_feasible(bg.game.y_treeplex, rng);
  const SeqVector mty = payoff_trans_times_x(bg.game, x);
  CHECK(dot(mty, y) == doctest::Approx(bilinear(bg.game, x, y)).epsilon(1e-12));
  const SeqVector my = payoff_times_y(bg.game, y);
  CHECK(dot(my, x) == doctest::Approx(bilinear(bg.game, x, y)).epsilon(1e-12));
}
