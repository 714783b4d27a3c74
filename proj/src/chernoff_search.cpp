#include "qread/chernoff_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace qread {

double clamp_chernoff_t(double t) { return std::clamp(t, kChernoffTMin, 1.0 - kChernoffTMin); }

ChernoffResult minimize_over_t(const std::function<double(double)>& f) {
  ChernoffResult best{std::numeric_limits<double>::infinity(), 0.5};
  auto eval = [&](double t) {
    const double v = f(t);
    if (v < best.q_min) best = {v, t};
    return v;
  };

  constexpr int last = kChernoffGridPoints - 1;
  std::array<double, kChernoffGridPoints> grid{};
  int imin = 0;
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= last; ++i) {
    grid[i] = clamp_chernoff_t(static_cast<double>(i) / last);
    const double v = eval(grid[i]);
    if (v < vmin) {
      vmin = v;
      imin = i;
    }
  }

  // golden-section refinement in [grid[imin-1], grid[imin+1]]
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = grid[std::max(imin - 1, 0)];
  double b = grid[std::min(imin + 1, last)];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > kChernoffTTol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

}  // namespace qread
