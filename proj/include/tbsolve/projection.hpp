#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tbsolve/smpl.hpp"
#include "tbsolve/treeplex.hpp"

namespace tbsolve {

// Target set of a projection: cone(T), the stable region
// C_>= = cone(T) n {x[0] >= r0}, or the treeplex T itself (t fixed at 1).
struct ProjectionKind {
  enum class Set { cone, stable, treeplex };
  Set set = Set::cone;
  double r0 = 0.0;
};

inline ProjectionKind cone_kind() { return {ProjectionKind::Set::cone, 0.0}; }

inline ProjectionKind stable_kind(double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("stable region requires r0 > 0");
  return {ProjectionKind::Set::stable, r0};
}

inline ProjectionKind treeplex_kind() {
  return {ProjectionKind::Set::treeplex, 0.0};
}

namespace detail {

inline void check_weights(const Treeplex& tp, const SeqVector* w) {
  if (w == nullptr) return;
  check_aligned(tp, *w, "projection weights");
  for (double v : *w)
    if (!(v > 0.0))
      throw std::invalid_argument("projection weights must be positive");
}

// Given the SMPL derivative f of a child value function in its own mass u,
// returns the optimal mass as a function of the water level mu:
//   mu -> max(0, f^{-1}(mu)).
// The result has zeta = alpha0 = 0 and its first breakpoint at f(0).
inline SmplFn clip_inverse(const SmplFn& f) {
  double slope = f.alpha0;
  double v = f.zeta;  // f(0), accounting for pieces active at u = 0
  std::size_t k = 0;
  while (k < f.pieces.size() && f.pieces[k].breakpoint <= 0.0) {
    slope += f.pieces[k].slope_delta;
    v -= f.pieces[k].slope_delta * f.pieces[k].breakpoint;
    ++k;
  }
  assert(slope > 0.0);
  SmplFn out;
  out.pieces.reserve(f.pieces.size() - k + 1);
  out.pieces.push_back({v, 1.0 / slope});
  double u = 0.0;
  for (; k < f.pieces.size(); ++k) {
    const double nu = f.pieces[k].breakpoint;
    v += slope * (nu - u);
    const double next = slope + f.pieces[k].slope_delta;
    out.pieces.push_back({v, 1.0 / next - 1.0 / slope});
    slope = next;
    u = nu;
  }
  return out;
}

// Inverse of the strictly increasing part of g, where g (a sum of
// clip_inverse results) is zero up to its first breakpoint. The result is the
// water level as a function of total mass t >= 0.
inline SmplFn invert_from_zero(const SmplFn& g) {
  assert(g.zeta == 0.0 && g.alpha0 == 0.0 && !g.pieces.empty());
  SmplFn out;
  double slope = g.pieces.front().slope_delta;
  double mu = g.pieces.front().breakpoint;
  out.zeta = mu;
  out.alpha0 = 1.0 / slope;
  double t = 0.0;
  for (std::size_t k = 1; k < g.pieces.size(); ++k) {
    const double nmu = g.pieces[k].breakpoint;
    t += slope * (nmu - mu);
    const double next = slope + g.pieces[k].slope_delta;
    out.pieces.push_back({t, 1.0 / next - 1.0 / slope});
    slope = next;
    mu = nmu;
  }
  return out;
}

}  // namespace detail

// Cached standard representations from the bottom-up pass of the projection:
// per-sequence derivatives in the sequence's own mass, per-infoset
// derivatives in the parent mass, and the root derivative in t of
//   v(t) = (1/2) min_{z in tT} sum_i w_i (z_i - y_i)^2.
struct LambdaBuild {
  SmplFn root;
  std::vector<SmplFn> seq_fn;      // indexed by sequence, [1..n]
  std::vector<SmplFn> infoset_fn;  // indexed by infoset
};

inline LambdaBuild lambda_build(const Treeplex& tp, const SeqVector& y,
                                const SeqVector* w = nullptr) {
  check_aligned(tp, y, "lambda_build");
  detail::check_weights(tp, w);
  const auto weight = [&](int s) { return w ? (*w)[s] : 1.0; };

  LambdaBuild out;
  out.seq_fn.resize(tp.dim());
  out.infoset_fn.resize(tp.num_infosets());

  std::vector<const SmplFn*> parts;
  std::vector<SmplFn> clips;
  for (int j = tp.num_infosets() - 1; j >= 0; --j) {
    const InfosetRecord& rec = tp.infosets()[j];
    clips.clear();
    clips.reserve(rec.num_actions());
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) {
      const SmplFn own = SmplFn::affine(weight(s), -weight(s) * y[s]);
      parts.clear();
      parts.push_back(&own);
      for (int child : tp.children_of(s)) parts.push_back(&out.infoset_fn[child]);
      out.seq_fn[s] = smpl_sum(parts);
      clips.push_back(detail::clip_inverse(out.seq_fn[s]));
    }
    parts.clear();
    for (const SmplFn& c : clips) parts.push_back(&c);
    out.infoset_fn[j] = detail::invert_from_zero(smpl_sum(parts));
  }

  const SmplFn own = SmplFn::affine(weight(0), -weight(0) * y[0]);
  parts.clear();
  parts.push_back(&own);
  for (int child : tp.children_of(0)) parts.push_back(&out.infoset_fn[child]);
  out.root = smpl_sum(parts);
  return out;
}

namespace detail {

// Top-down argument recovery at scale t_star, reusing the cached
// representations from the upward pass.
inline SeqVector recover_argument(const Treeplex& tp, const LambdaBuild& plan,
                                  double t_star) {
  SeqVector x(tp.dim(), 0.0);
  x[0] = t_star;
  for (int j = 0; j < tp.num_infosets(); ++j) {
    const InfosetRecord& rec = tp.infosets()[j];
    const double tj = x[rec.parent];
    if (tj <= 0.0) continue;  // no mass to distribute
    const double mu = smpl_eval(plan.infoset_fn[j], tj);
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) {
      const SmplFn& f = plan.seq_fn[s];
      if (smpl_eval(f, 0.0) >= mu) continue;
      x[s] = smpl_root_at(f, mu);
    }
  }
  return x;
}

}  // namespace detail

// Exact Euclidean (or diagonally weighted, argmin sum_i w_i (x_i - y_i)^2)
// projection onto cone(T), the stable region, or T.
inline SeqVector project(const Treeplex& tp, const SeqVector& y,
                         ProjectionKind kind, const SeqVector* w = nullptr) {
  if (kind.set == ProjectionKind::Set::stable && !(kind.r0 > 0.0))
    throw std::invalid_argument("stable projection requires r0 > 0");
  const LambdaBuild plan = lambda_build(tp, y, w);
  double t_star = 1.0;
  switch (kind.set) {
    case ProjectionKind::Set::treeplex:
      break;
    case ProjectionKind::Set::cone:
      if (smpl_eval(plan.root, 0.0) >= 0.0) return SeqVector(tp.dim(), 0.0);
      t_star = smpl_root(plan.root);
      break;
    case ProjectionKind::Set::stable:
      t_star = smpl_eval(plan.root, kind.r0) >= 0.0 ? kind.r0
                                                    : smpl_root(plan.root);
      break;
  }
  return detail::recover_argument(tp, plan, t_star);
}

inline SeqVector project(const Treeplex& tp, const SeqVector& y,
                         ProjectionKind kind, const SeqVector& w) {
  return project(tp, y, kind, &w);
}

// ---------------------------------------------------------------------------
// Dykstra oracle: alternating projections between the affine flow subspace
// (plus {x0 = 1} for the treeplex) and the orthant (plus {x0 >= r0} for the
// stable region). Reference implementation for verification; never on the
// hot path.
// ---------------------------------------------------------------------------

namespace detail {

// Dense Cholesky solve for the SPD systems of the affine projection.
class CholeskySolver {
 public:
  explicit CholeskySolver(std::vector<std::vector<double>> g) : l_(std::move(g)) {
    const std::size_t m = l_.size();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        double s = l_[i][k];
        for (std::size_t q = 0; q < k; ++q) s -= l_[i][q] * l_[k][q];
        l_[i][k] = s / l_[k][k];
      }
      double s = l_[i][i];
      for (std::size_t q = 0; q < i; ++q) s -= l_[i][q] * l_[i][q];
      if (!(s > 0.0)) throw std::runtime_error("constraint matrix not SPD");
      l_[i][i] = std::sqrt(s);
    }
  }

  void solve(std::vector<double>& rhs) const {
    const std::size_t m = l_.size();
    for (std::size_t i = 0; i < m; ++i) {
      double s = rhs[i];
      for (std::size_t q = 0; q < i; ++q) s -= l_[i][q] * rhs[q];
      rhs[i] = s / l_[i][i];
    }
    for (std::size_t i = m; i-- > 0;) {
      double s = rhs[i];
      for (std::size_t q = i + 1; q < m; ++q) s -= l_[q][i] * rhs[q];
      rhs[i] = s / l_[i][i];
    }
  }

 private:
  std::vector<std::vector<double>> l_;
};

}  // namespace detail

inline SeqVector dykstra_project(const Treeplex& tp, const SeqVector& y,
                                 ProjectionKind kind,
                                 const SeqVector* w = nullptr,
                                 int sweeps = 20000) {
  check_aligned(tp, y, "dykstra_project");
  detail::check_weights(tp, w);
  if (tp.num_sequences() > 500)
    throw std::invalid_argument("dykstra_project is an oracle for n <= 500");
  if (kind.set == ProjectionKind::Set::stable && !(kind.r0 > 0.0))
    throw std::invalid_argument("stable projection requires r0 > 0");
  const auto inv_weight = [&](int s) { return w ? 1.0 / (*w)[s] : 1.0; };

  // Constraint rows: one per infoset (sum of actions - parent = 0), plus
  // x0 = 1 for the treeplex kind.
  struct Row {
    std::vector<std::pair<int, double>> coef;
    double rhs = 0.0;
  };
  std::vector<Row> rows;
  rows.reserve(tp.num_infosets() + 1);
  for (const InfosetRecord& rec : tp.infosets()) {
    Row r;
    for (int s = rec.first_seq; s <= rec.last_seq; ++s) r.coef.push_back({s, 1.0});
    r.coef.push_back({rec.parent, -1.0});
    rows.push_back(std::move(r));
  }
  if (kind.set == ProjectionKind::Set::treeplex)
    rows.push_back({{{0, 1.0}}, 1.0});
  const std::size_t m = rows.size();

  // G = B W^{-1} B^T
  std::vector<std::vector<double>> g(m, std::vector<double>(m, 0.0));
  {
    std::vector<double> scatter(tp.dim(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (const auto& [idx, c] : rows[r].coef) scatter[idx] = c * inv_weight(idx);
      for (std::size_t q = r; q < m; ++q) {
        double s = 0.0;
        for (const auto& [idx, c] : rows[q].coef) s += c * scatter[idx];
        g[r][q] = g[q][r] = s;
      }
      for (const auto& [idx, c] : rows[r].coef) scatter[idx] = 0.0;
    }
  }
  const detail::CholeskySolver chol(std::move(g));

  const auto proj_affine = [&](const SeqVector& v) {
    std::vector<double> rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      double s = -rows[r].rhs;
      for (const auto& [idx, c] : rows[r].coef) s += c * v[idx];
      rhs[r] = s;
    }
    chol.solve(rhs);
    SeqVector out = v;
    for (std::size_t r = 0; r < m; ++r)
      for (const auto& [idx, c] : rows[r].coef)
        out[idx] -= inv_weight(idx) * c * rhs[r];
    return out;
  };

  const auto proj_box = [&](SeqVector v) {
    for (double& t : v) t = std::max(t, 0.0);
    if (kind.set == ProjectionKind::Set::stable) v[0] = std::max(v[0], kind.r0);
    return v;
  };

  SeqVector x = y;
  SeqVector p(tp.dim(), 0.0), q(tp.dim(), 0.0), prev;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    SeqVector ya = x;
    for (int i = 0; i < tp.dim(); ++i) ya[i] += p[i];
    const SeqVector xa = proj_affine(ya);
    for (int i = 0; i < tp.dim(); ++i) p[i] = ya[i] - xa[i];

    SeqVector yb = xa;
    for (int i = 0; i < tp.dim(); ++i) yb[i] += q[i];
    x = proj_box(yb);
    for (int i = 0; i < tp.dim(); ++i) q[i] = yb[i] - x[i];

    // The iterate can stall for a few sweeps while the corrections still
    // evolve, so the exit also requires the affine constraints to hold.
    if (!prev.empty()) {
      double move = 0.0;
      for (int i = 0; i < tp.dim(); ++i)
        move = std::max(move, std::abs(x[i] - prev[i]));
      if (move < 1e-12) {
        double resid = 0.0;
        for (const Row& r : rows) {
          double s = -r.rhs;
          for (const auto& [idx, c] : r.coef) s += c * x[idx];
          resid = std::max(resid, std::abs(s));
        }
        if (resid < 1e-10) break;
      }
    }
    prev = x;
  }
  return x;
}

inline SeqVector dykstra_project(const Treeplex& tp, const SeqVector& y,
                                 ProjectionKind kind, const SeqVector& w,
                                 int sweeps = 20000) {
  return dykstra_project(tp, y, kind, &w, sweeps);
}

}  // namespace tbsolve
