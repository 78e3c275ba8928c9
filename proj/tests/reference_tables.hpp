// Published reference results: raw values per (group, demand) at penetrations 0, 0.3, 0.7, 1 and
// the percentages printed next to them.

#pragma once

#include <array>
#include <vector>

#include "rampmerge/metrics.hpp"

namespace reference {

struct Series {
  rampmerge::Group group;
  double demand;
  std::array<double, 4> raw;
  std::array<double, 4> pct;
};

inline constexpr std::array<double, 4> kPenetrations{0.0, 0.3, 0.7, 1.0};

// Average speed (m/s) and improvement (%).
inline const std::array<Series, 6> kSpeed{{
    {rampmerge::Group::Ramp, 3400, {9.07, 13.61, 17.47, 19.01}, {0, 50.06, 92.61, 109.59}},
    {rampmerge::Group::Ramp, 2400, {14.88, 16.55, 18.15, 19.07}, {0, 11.22, 21.98, 28.16}},
    {rampmerge::Group::Ramp, 1400, {17.84, 18.52, 19.07, 19.11}, {0, 3.81, 6.89, 7.12}},
    {rampmerge::Group::Mainline, 3400, {14.32, 17.28, 18.65, 18.90}, {0, 20.67, 30.24, 31.98}},
    {rampmerge::Group::Mainline, 2400, {18.26, 18.48, 18.94, 19.14}, {0, 1.20, 3.72, 4.82}},
    {rampmerge::Group::Mainline, 1400, {18.94, 18.98, 19.07, 19.24}, {0, 0.21, 0.69, 1.58}},
}};

// Fuel (g/mile) and reduction (%).
inline const std::array<Series, 6> kFuel{{
    {rampmerge::Group::Ramp, 3400, {167.5, 122.88, 91.13, 77.24}, {0, 26.64, 45.59, 53.89}},
    {rampmerge::Group::Ramp, 2400, {119.71, 105.12, 86.67, 75.38}, {0, 12.19, 27.60, 37.03}},
    {rampmerge::Group::Ramp, 1400, {93.59, 86.89, 77.97, 75.14}, {0, 7.16, 16.69, 19.71}},
    {rampmerge::Group::Mainline, 3400, {121.64, 95.83, 81.29, 76.70}, {0, 21.22, 33.17, 36.95}},
    {rampmerge::Group::Mainline, 2400, {85.22, 82.20, 76.65, 73.12}, {0, 3.54, 10.06, 14.2}},
    {rampmerge::Group::Mainline, 1400, {74.89, 74.43, 74.52, 72.9}, {0, 0.61, 0.49, 2.66}},
}};

// One CellResult per published value, speed and fuel filled from the two tables (same seed).
inline std::vector<rampmerge::CellResult> cells() {
  std::vector<rampmerge::CellResult> out;
  for (std::size_t s = 0; s < kSpeed.size(); ++s)
    for (std::size_t p = 0; p < kPenetrations.size(); ++p) {
      rampmerge::CellResult c;
      c.group = kSpeed[s].group;
      c.demand_vph = kSpeed[s].demand;
      c.penetration = kPenetrations[p];
      c.seed = 0;
      c.avg_speed = kSpeed[s].raw[p];
      c.fuel_g_per_mile = kFuel[s].raw[p];
      out.push_back(c);
    }
  return out;
}

}  // namespace reference
