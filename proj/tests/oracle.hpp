// Straight-line re-implementation of the merge-game cost terms and role solvers, written from the
// formulas alone and sharing no code with the library. Used as the reference in equivalence tests.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace oracle {

struct Body {
  double x;  // front bumper, merge frame
  double v;
  double a;  // current acceleration
  double len;
};

struct Terms {
  bool ego_ahead;
  double gap;
  std::optional<double> ttc;
  double headway;
  double risk1;
  double d2e;
  double mobility;
  double total;
};

// ramp: ego uses the ramp-side formula with `d_end`.
inline Terms cost(const Body& ego, double ego_accel, const Body& comp, bool ramp, double d_end, double dt, double th) {
  Terms t{};
  const double ego_next = ego.x + ego.v * dt + ego_accel * dt * dt / 2;
  const double comp_next = comp.x + comp.v * dt + comp.a * dt * dt / 2;
  t.ego_ahead = ego_next > comp_next;

  double gap, vr, vf, ar, af;
  if (t.ego_ahead) {
    gap = ego.x - comp.x - ego.len;
    vr = comp.v, vf = ego.v, ar = comp.a, af = ego_accel;
  } else {
    gap = comp.x - ego.x - comp.len;
    vr = ego.v, vf = comp.v, ar = ego_accel, af = comp.a;
  }
  double g = gap + (vf - vr) * dt + (af - ar) * dt * dt / 2;
  if (g < 0) g = 0;
  double vr2 = vr + ar * dt;
  if (vr2 < 0) vr2 = 0;
  double vf2 = vf + af * dt;
  if (vf2 < 0) vf2 = 0;
  t.gap = g;

  double h_den = vr2;
  if (h_den < 0.1) h_den = 0.1;
  t.headway = g / h_den;
  if (vr2 - vf2 > 0) {
    double ttc = g / (vr2 - vf2);
    if (ttc < 0) ttc = 0;
    t.ttc = ttc;
    t.risk1 = ((1 - std::tanh(ttc / th)) + (1 - std::tanh(t.headway / th))) / 2;
  } else {
    t.risk1 = (1 - std::tanh(t.headway / th)) / 2;
  }

  double v_floor = ego.v;
  if (v_floor < 0.1) v_floor = 0.1;
  t.mobility = (1 - std::tanh(ego_accel * dt / v_floor)) / 2;

  if (ramp) {
    double d = d_end;
    if (d < 0) d = 0;
    t.d2e = (1 - std::tanh(d / v_floor / th)) / 2;
    t.total = (t.risk1 + t.d2e) / 2 + t.mobility;
  } else {
    t.d2e = 0;
    t.total = t.risk1 + t.mobility;
  }
  return t;
}

enum class R { Lead, Follow };

// Minimum-cost action of one player; on equal cost the Follower action wins.
inline R brute_noncooperative(double lead, double follow) {
  const std::array<std::pair<double, R>, 2> options{{{follow, R::Follow}, {lead, R::Lead}}};
  auto best = options[0];
  for (const auto& o : options)
    if (o.first < best.first) best = o;
  return best.second;
}

// Enumerates all four role cells with infeasible diagonals, sums saturating at `inf`. On equal
// cost the cell where the ramp player follows wins.
inline std::pair<R, R> brute_cooperative(double el, double ef, double cl, double cf, bool ego_is_ramp, double inf) {
  struct Cell {
    R ego, comp;
    double cost;
  };
  const std::array<Cell, 4> cells{{
      {R::Lead, R::Lead, inf},
      {R::Lead, R::Follow, std::min(el + cf, inf)},
      {R::Follow, R::Lead, std::min(ef + cl, inf)},
      {R::Follow, R::Follow, inf},
  }};
  const Cell* best = nullptr;
  for (const auto& c : cells) {
    if (c.ego == c.comp) continue;
    if (!best || c.cost < best->cost) {
      best = &c;
    } else if (c.cost == best->cost) {
      const bool ramp_follows = ego_is_ramp ? c.ego == R::Follow : c.comp == R::Follow;
      if (ramp_follows) best = &c;
    }
  }
  return {best->ego, best->comp};
}

struct Gains {
  double k = 0.3, gamma = 1.5, tg = 1.0, tau = 0.0, adj = 1.0;
  double kv = 0.4;
  double amin = -5.0, amax = 3.0;
  double merge_gap = 5.0, merge_time = 0.5;
};

inline double clamp(double a, const Gains& g) { return a < g.amin ? g.amin : (a > g.amax ? g.amax : a); }

inline double consensus(const Body& ego, const Body& target, double extra, const Gains& g) {
  const double e = ego.x - target.x + target.len + extra + ego.v * (g.tg + g.tau);
  return clamp(-g.adj * g.k * (e + g.gamma * (ego.v - target.v)), g);
}

inline double standstill(double v, const Gains& g) {
  const double s = g.merge_gap + v * (g.merge_time - g.tg - g.tau);
  return s > 0 ? s : 0;
}

// Follower: consensus toward the competitor. Leader: free flow, capped by consensus toward the
// competitor's predecessor when that vehicle is ahead of the ego.
inline double candidate(const Body& ego, double desired, const Body& comp, const std::optional<Body>& comp_pred, R role,
                        const Gains& g) {
  if (role == R::Follow) return consensus(ego, comp, standstill(ego.v, g), g);
  const double free = clamp(g.kv * (desired - ego.v), g);
  if (comp_pred && comp_pred->x > ego.x) return std::min(free, consensus(ego, *comp_pred, standstill(ego.v, g), g));
  return free;
}

// A mainline player can follow a ramp player only if it can stop behind the end of the merge zone.
inline bool can_follow(const Body& self, const Body& ramp_other, double other_d_end, const Gains& g) {
  const double stop = self.v * self.v / (2 * -g.amin);
  const double limit = ramp_other.x + (other_d_end > 0 ? other_d_end : 0) - ramp_other.len;
  return self.x + stop <= limit;
}

}  // namespace oracle
