#pragma once

#include <cmath>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "tbsolve/treeplex.hpp"

namespace tbtest {

using tbsolve::InfosetRecord;
using tbsolve::SeqVector;
using tbsolve::Treeplex;

using Rng = std::mt19937_64;

// Builds treeplexes with the canonical contiguous sequence layout.
struct TpBuilder {
  std::vector<InfosetRecord> recs;
  int next_seq = 1;

  // Returns the first sequence index of the new infoset.
  int add(int parent, int actions) {
    recs.push_back({parent, next_seq, next_seq + actions - 1});
    next_seq += actions;
    return next_seq - actions;
  }
  Treeplex build() const { return Treeplex(recs); }
};

// {1} x Delta^k
inline Treeplex simplex_tp(int k) {
  TpBuilder b;
  b.add(0, k);
  return b.build();
}

// A chain: each level one infoset with `actions` actions, the first action
// leading to the next level.
inline Treeplex chain_tp(int levels, int actions = 2) {
  TpBuilder b;
  int parent = 0;
  for (int i = 0; i < levels; ++i) parent = b.add(parent, actions);
  return b.build();
}

// Root infoset with 2 actions; every action branches into `obs` child
// infosets of 2 actions each (depth 2 with observations).
inline Treeplex bushy_tp(int obs = 2) {
  TpBuilder b;
  const int first = b.add(0, 2);
  for (int s = first; s <= first + 1; ++s)
    for (int c = 0; c < obs; ++c) b.add(s, 2);
  return b.build();
}

// Two independent decision problems glued under the root (Cartesian product).
inline Treeplex product_tp() {
  TpBuilder b;
  const int a = b.add(0, 3);
  b.add(0, 2);
  b.add(a, 2);  // one subtree below the first action of the first infoset
  return b.build();
}

// Random treeplex: grows by attaching infosets under already-created
// sequences. Depth is bounded by construction order, n stays <= ~60.
inline Treeplex random_tp(Rng& rng, int max_infosets = 12, int max_actions = 4) {
  TpBuilder b;
  std::uniform_int_distribution<int> actions_dist(1, max_actions);
  std::vector<int> open_seqs{0};
  const int m = std::uniform_int_distribution<int>(1, max_infosets)(rng);
  for (int j = 0; j < m; ++j) {
    const int pick =
        std::uniform_int_distribution<int>(0, (int)open_seqs.size() - 1)(rng);
    const int parent = open_seqs[pick];
    const int na = actions_dist(rng);
    const int first = b.add(parent, na);
    for (int s = first; s < first + na; ++s) open_seqs.push_back(s);
  }
  return b.build();
}

inline SeqVector random_vector(Rng& rng, int dim, double lo = -2.0,
                               double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  SeqVector v(dim);
  for (double& x : v) x = dist(rng);
  return v;
}

// Random feasible point of T from a random behavioral profile.
inline SeqVector random_feasible(const Treeplex& tp, Rng& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  SeqVector x(tp.dim(), 0.0);
  x[0] = 1.0;
  for (const InfosetRecord& rec : tp.infosets()) {
    double total = 0.0;
    std::vector<double> share(rec.num_actions());
    for (double& s : share) total += (s = dist(rng));
    for (int a = 0; a < rec.num_actions(); ++a)
      x[rec.first_seq + a] = x[rec.parent] * share[a] / total;
  }
  return x;
}

// Random point of cone(T): random scale times a feasible point.
inline SeqVector random_cone_point(const Treeplex& tp, Rng& rng,
                                   double max_scale = 3.0) {
  SeqVector x = random_feasible(tp, rng);
  const double t = std::uniform_real_distribution<double>(0.0, max_scale)(rng);
  for (double& v : x) v *= t;
  return x;
}

// All vertices of the treeplex (one per combination of action choices,
// including choices at unreachable infosets; duplicates are harmless).
inline std::vector<SeqVector> enumerate_vertices(const Treeplex& tp) {
  std::vector<SeqVector> out;
  std::vector<int> choice(tp.num_infosets(), 0);
  while (true) {
    SeqVector x(tp.dim(), 0.0);
    x[0] = 1.0;
    for (int j = 0; j < tp.num_infosets(); ++j) {
      const InfosetRecord& rec = tp.infosets()[j];
      x[rec.first_seq + choice[j]] = x[rec.parent];
    }
    out.push_back(std::move(x));
    int j = 0;
    for (; j < tp.num_infosets(); ++j) {
      if (++choice[j] < tp.infosets()[j].num_actions()) break;
      choice[j] = 0;
    }
    if (j == tp.num_infosets()) break;
  }
  return out;
}

inline double max_abs_diff(const SeqVector& a, const SeqVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Least-squares slope of log(ys) against log(xs).
inline double loglog_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const int n = (int)xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tbtest
