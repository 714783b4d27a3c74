#pragma once

#include <functional>

namespace qread {

inline constexpr double kChernoffTMin = 1e-4;
inline constexpr int kChernoffGridPoints = 21;
inline constexpr double kChernoffTTol = 1e-6;

struct ChernoffResult {
  double q_min = 1.0;
  double t_star = 0.5;
};

/// Clamp t into [kChernoffTMin, 1 - kChernoffTMin].
double clamp_chernoff_t(double t);

/// Minimizes f over t in (0,1): 21-point grid, then golden-section search
/// inside the two grid cells adjacent to the best grid point until the
/// bracket is narrower than kChernoffTTol. Never returns a value above the
/// grid minimum.
ChernoffResult minimize_over_t(const std::function<double(double)>& f);

}  // namespace qread
