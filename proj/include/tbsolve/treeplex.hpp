#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tbsolve {

// Dense vector indexed by sequences. Index 0 is the empty-sequence
// coordinate; a vector aligned to a treeplex with n sequences has length n+1.
using SeqVector = std::vector<double>;

// One decision point of a player. The actions available at the infoset occupy
// the contiguous sequence indices [first_seq, last_seq]; parent is the
// sequence leading to the infoset (0 = empty sequence).
struct InfosetRecord {
  int parent = 0;
  int first_seq = 0;
  int last_seq = -1;

  int num_actions() const { return last_seq - first_seq + 1; }
  bool operator==(const InfosetRecord&) const = default;
};

// Checks the structural invariants of a prospective treeplex:
//   - every action range is nonempty and within [1, num_sequences],
//   - ranges are pairwise disjoint and together cover {1..num_sequences},
//   - every parent is 0 or a sequence of an infoset earlier in the ordering.
// Returns std::nullopt when valid, otherwise a diagnostic naming the first
// offending infoset.
inline std::optional<std::string> validate_structure(
    const std::vector<InfosetRecord>& infosets, int num_sequences) {
  if (num_sequences < 0) return "num_sequences is negative";
  // owner[s] = infoset whose action range contains sequence s.
  std::vector<int> owner(static_cast<std::size_t>(num_sequences) + 1, -1);
  for (std::size_t j = 0; j < infosets.size(); ++j) {
    const InfosetRecord& rec = infosets[j];
    if (rec.num_actions() <= 0)
      return "infoset " + std::to_string(j) + ": empty action set";
    if (rec.first_seq < 1 || rec.last_seq > num_sequences)
      return "infoset " + std::to_string(j) + ": sequence range [" +
             std::to_string(rec.first_seq) + ", " + std::to_string(rec.last_seq) +
             "] out of bounds";
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) {
      if (owner[s] != -1)
        return "infoset " + std::to_string(j) + ": sequence " + std::to_string(s) +
               " overlaps infoset " + std::to_string(owner[s]);
      owner[s] = static_cast<int>(j);
    }
    if (rec.parent < 0 || rec.parent > num_sequences)
      return "infoset " + std::to_string(j) + ": parent sequence " +
             std::to_string(rec.parent) + " out of bounds";
    if (rec.parent != 0) {
      const int p_owner = owner[rec.parent];
      // A parent owned by this or a later infoset is a forward/cyclic reference.
      if (p_owner == -1 || p_owner == static_cast<int>(j))
        return "infoset " + std::to_string(j) + ": parent sequence " +
               std::to_string(rec.parent) +
               " does not belong to an earlier infoset (cyclic or dangling parent)";
    }
  }
  for (int s = 1; s <= num_sequences; ++s)
    if (owner[s] == -1)
      return "sequence " + std::to_string(s) + " is not assigned to any infoset";
  return std::nullopt;
}

// Sequence-form polytope of one player:
//   T = { x >= 0 : x[0] = 1, sum_{a in A_j} x[ja] = x[p_j] for all j }.
// Infosets are stored in topological order (parents first), so a forward scan
// is a valid top-down pass and a reverse scan a valid bottom-up pass.
class Treeplex {
 public:
  Treeplex() = default;

  explicit Treeplex(std::vector<InfosetRecord> infosets)
      : infosets_(std::move(infosets)) {
    num_sequences_ = 0;
    for (const InfosetRecord& rec : infosets_) num_sequences_ += rec.num_actions();
    if (auto err = validate_structure(infosets_, num_sequences_))
      throw std::invalid_argument("invalid treeplex: " + *err);
    build_derived();
  }

  int num_sequences() const { return num_sequences_; }   // n
  int num_infosets() const { return static_cast<int>(infosets_.size()); }  // m
  int num_leaf_sequences() const { return num_leaf_sequences_; }           // l
  int depth() const { return depth_; }                                     // d
  int dim() const { return num_sequences_ + 1; }          // vector length n+1

  const std::vector<InfosetRecord>& infosets() const { return infosets_; }

  // Infosets whose parent is sequence s.
  const std::vector<int>& children_of(int seq) const { return children_[seq]; }

  std::optional<std::string> validate() const {
    return validate_structure(infosets_, num_sequences_);
  }

  bool operator==(const Treeplex& other) const {
    return infosets_ == other.infosets_;
  }

 private:
  void build_derived() {
    children_.assign(static_cast<std::size_t>(num_sequences_) + 1, {});
    for (std::size_t j = 0; j < infosets_.size(); ++j)
      children_[infosets_[j].parent].push_back(static_cast<int>(j));

    num_leaf_sequences_ = 0;
    for (int s = 1; s <= num_sequences_; ++s)
      if (children_[s].empty()) ++num_leaf_sequences_;

    // depth = max actions + observations along any root-to-leaf path; an
    // observation is made on entering infoset j when p_j has several child
    // infosets.
    depth_ = 0;
    std::vector<int> seq_depth(static_cast<std::size_t>(num_sequences_) + 1, 0);
    for (const InfosetRecord& rec : infosets_) {
      const int obs = children_[rec.parent].size() > 1 ? 1 : 0;
      const int here = seq_depth[rec.parent] + obs + 1;
      for (int s = rec.first_seq; s <= rec.last_seq; ++s) seq_depth[s] = here;
      depth_ = std::max(depth_, here);
    }
  }

  std::vector<InfosetRecord> infosets_;
  std::vector<std::vector<int>> children_;
  int num_sequences_ = 0;
  int num_leaf_sequences_ = 0;
  int depth_ = 0;
};

inline void check_aligned(const Treeplex& tp, const SeqVector& x,
                          const char* what) {
  if (static_cast<int>(x.size()) != tp.dim())
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(tp.dim()) + ", got " +
                                std::to_string(x.size()));
}

inline double dot(const SeqVector& a, const SeqVector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline bool is_cone_member(const Treeplex& tp, const SeqVector& x,
                           double tol = 1e-9) {
  check_aligned(tp, x, "is_cone_member");
  for (double v : x)
    if (v < -tol) return false;
  for (const InfosetRecord& rec : tp.infosets()) {
    double sum = 0.0;
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) sum += x[s];
    if (std::abs(sum - x[rec.parent]) > tol) return false;
  }
  return true;
}

inline bool is_member(const Treeplex& tp, const SeqVector& x,
                      double tol = 1e-9) {
  check_aligned(tp, x, "is_member");
  if (std::abs(x[0] - 1.0) > tol) return false;
  return is_cone_member(tp, x, tol);
}

inline SeqVector uniform_strategy(const Treeplex& tp) {
  SeqVector x(tp.dim(), 0.0);
  x[0] = 1.0;
  for (const InfosetRecord& rec : tp.infosets()) {
    const double share = x[rec.parent] / rec.num_actions();
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) x[s] = share;
  }
  return x;
}

// f(x, l) = l - <x, l> a with a = (1, 0, ..., 0); only coordinate 0 changes.
inline SeqVector f_transform(const SeqVector& x, const SeqVector& loss) {
  if (x.size() != loss.size())
    throw std::invalid_argument("f_transform: dimension mismatch");
  SeqVector out = loss;
  out[0] -= dot(x, loss);
  return out;
}

// Simplex version g(x, l) = l - <x, l> 1.
inline std::vector<double> g_transform(const std::vector<double>& x,
                                       const std::vector<double>& loss) {
  if (x.size() != loss.size())
    throw std::invalid_argument("g_transform: dimension mismatch");
  const double shift = dot(x, loss);
  std::vector<double> out = loss;
  for (double& v : out) v -= shift;
  return out;
}

struct BestResponse {
  SeqVector strategy;  // vertex of the treeplex
  double value = 0.0;  // <strategy, loss>
};

// argmin_{x in T} <x, loss> by bottom-up dynamic programming. Ties break
// toward the lowest action index.
inline BestResponse best_response(const Treeplex& tp, const SeqVector& loss) {
  check_aligned(tp, loss, "best_response");
  const int m = tp.num_infosets();
  std::vector<double> value(m, 0.0);
  std::vector<int> pick(m, 0);
  for (int j = m - 1; j >= 0; --j) {
    const InfosetRecord& rec = tp.infosets()[j];
    double best = 0.0;
    int best_seq = -1;
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) {
      double cost = loss[s];
      for (int child : tp.children_of(s)) cost += value[child];
      if (best_seq < 0 || cost < best) {
        best = cost;
        best_seq = s;
      }
    }
    value[j] = best;
    pick[j] = best_seq;
  }

  BestResponse br;
  br.strategy.assign(tp.dim(), 0.0);
  br.strategy[0] = 1.0;
  br.value = loss[0];
  for (int j = 0; j < m; ++j) {
    const InfosetRecord& rec = tp.infosets()[j];
    br.strategy[pick[j]] = br.strategy[rec.parent];
    if (rec.parent == 0) br.value += value[j];
  }
  return br;
}

// max_{x in T} ||x||_2. Vertices of the treeplex are 0/1 vectors, so the
// squared norm of a vertex is <x, 1> and the maximum is linear over T.
inline double max_strategy_norm(const Treeplex& tp) {
  SeqVector minus_one(tp.dim(), -1.0);
  return std::sqrt(-best_response(tp, minus_one).value);
}

}  // namespace tbsolve
