#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tbsolve {

// Standard representation of a strictly-monotonically-increasing
// piecewise-linear (SMPL) function:
//   f(t) = zeta + alpha0 * t + sum_s slope_delta_s * max(0, t - breakpoint_s)
// with strictly increasing breakpoints. Slope deltas may be negative as long
// as the cumulative slope stays positive on every piece.
struct SmplPiece {
  double breakpoint = 0.0;
  double slope_delta = 0.0;
};

struct SmplFn {
  double zeta = 0.0;
  double alpha0 = 0.0;
  std::vector<SmplPiece> pieces;  // sorted by breakpoint

  static SmplFn affine(double slope, double intercept) {
    SmplFn f;
    f.alpha0 = slope;
    f.zeta = intercept;
    return f;
  }
};

// Breakpoints closer than this are merged, summing their slope deltas.
inline constexpr double kBreakpointMergeTol = 1e-12;

inline double smpl_eval(const SmplFn& f, double t) {
  double v = f.zeta + f.alpha0 * t;
  for (const SmplPiece& p : f.pieces) {
    if (t <= p.breakpoint) break;
    v += p.slope_delta * (t - p.breakpoint);
  }
  return v;
}

// Unique t with f(t) = target. The function must be strictly increasing;
// with positive slopes on each piece the root always exists on the real line.
inline double smpl_root_at(const SmplFn& f, double target) {
  double slope = f.alpha0;
  if (f.pieces.empty()) {
    assert(slope > 0.0);
    return (target - f.zeta) / slope;
  }
  double t = f.pieces.front().breakpoint;
  double v = f.zeta + slope * t;  // running value at position t
  if (v >= target) {
    assert(slope > 0.0);
    return t - (v - target) / slope;
  }
  for (std::size_t k = 0; k < f.pieces.size(); ++k) {
    slope += f.pieces[k].slope_delta;
    if (k + 1 == f.pieces.size()) break;
    const double nt = f.pieces[k + 1].breakpoint;
    const double nv = v + slope * (nt - t);
    if (nv >= target) return t + (target - v) / slope;
    t = nt;
    v = nv;
  }
  assert(slope > 0.0);
  return t + (target - v) / slope;
}

inline double smpl_root(const SmplFn& f) { return smpl_root_at(f, 0.0); }

// Sum of SMPL functions; shared breakpoints collapse into one piece.
inline SmplFn smpl_sum(std::vector<const SmplFn*> parts) {
  SmplFn out;
  std::size_t total = 0;
  for (const SmplFn* p : parts) {
    out.zeta += p->zeta;
    out.alpha0 += p->alpha0;
    total += p->pieces.size();
  }
  std::vector<SmplPiece> merged;
  merged.reserve(total);
  for (const SmplFn* p : parts)
    merged.insert(merged.end(), p->pieces.begin(), p->pieces.end());
  std::sort(merged.begin(), merged.end(),
            [](const SmplPiece& a, const SmplPiece& b) {
              return a.breakpoint < b.breakpoint;
            });
  out.pieces.reserve(merged.size());
  for (const SmplPiece& p : merged) {
    if (!out.pieces.empty() &&
        p.breakpoint - out.pieces.back().breakpoint <= kBreakpointMergeTol) {
      out.pieces.back().slope_delta += p.slope_delta;
    } else {
      out.pieces.push_back(p);
    }
  }
  return out;
}

}  // namespace tbsolve
