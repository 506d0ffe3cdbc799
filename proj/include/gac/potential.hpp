#ifndef GAC_POTENTIAL_HPP
#define GAC_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gac/errors.hpp"

namespace gac {

/// Even double-well potential W(s) = sum_k c_k s^(2k).
///
/// Only even polynomials are representable, so evenness holds by
/// construction. The remaining well conditions (zeros at +-1, nonnegativity,
/// critical points exactly at -1, 0, +1, nondegenerate wells) are checked when
/// a potential is built from user coefficients.
class DoubleWell {
 public:
  /// (1 - s^2)^2 / 4, so W'(s) = s^3 - s and W''(s) = 3 s^2 - 1.
  static DoubleWell standard() { return DoubleWell({0.25, -0.5, 0.25}, true); }

  /// Coefficients of s^0, s^2, s^4, ... Throws PreconditionError if the
  /// polynomial is not a nondegenerate double well.
  static DoubleWell from_even_coefficients(std::vector<double> coeffs) {
    DoubleWell w(std::move(coeffs), false);
    w.validate();
    return w;
  }

  bool is_standard() const noexcept { return standard_; }
  const std::vector<double>& coefficients() const noexcept { return c_; }

  double W(double s) const noexcept {
    const double s2 = s * s;
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * s2 + c_[k];
    return acc;
  }

  double dW(double s) const noexcept {
    // d/ds c_k s^(2k) = 2k c_k s^(2k-1)
    const double s2 = s * s;
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;) acc = acc * s2 + 2.0 * double(k) * c_[k];
    return acc * s;
  }

  double d2W(double s) const noexcept {
    const double s2 = s * s;
    double acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 1;)
      acc = acc * s2 + 2.0 * double(k) * (2.0 * double(k) - 1.0) * c_[k];
    return acc;
  }

  double eval(double s, int order) const {
    switch (order) {
      case 0: return W(s);
      case 1: return dW(s);
      case 2: return d2W(s);
      default: throw PreconditionError("DoubleWell::eval: order must be 0, 1 or 2");
    }
  }

  /// Reaction term f = -W'.
  double f(double s) const noexcept { return -dW(s); }

 private:
  DoubleWell(std::vector<double> c, bool standard) : c_(std::move(c)), standard_(standard) {}

  void validate() const {
    require(c_.size() >= 2, "potential: need at least two even coefficients");
    for (double v : c_) require(std::isfinite(v), "potential: non-finite coefficient");
    const double scale = std::max(1.0, std::abs(c_[0]));
    require(std::abs(W(1.0)) <= 1e-12 * scale, "potential: W(+-1) must vanish");
    for (int k = 0; k <= 4000; ++k) {
      const double s = -2.0 + 4.0 * k / 4000.0;
      require(W(s) >= -1e-12 * scale, "potential: W must be nonnegative on [-2, 2]");
    }
    require(d2W(0.0) != 0.0, "potential: W''(0) must be nonzero");
    require(d2W(1.0) != 0.0, "potential: W''(1) must be nonzero (degenerate well)");
    // W' < 0 on (-inf,-1), > 0 on (-1,0), < 0 on (0,1), > 0 on (1,inf), sampled on [-1.5,1.5]
    for (int k = 0; k <= 6000; ++k) {
      const double s = -1.5 + 3.0 * k / 6000.0;
      if (std::abs(s) < 1e-9 || std::abs(std::abs(s) - 1.0) < 1e-9) continue;
      const double d = dW(s);
      const double a = std::abs(s);
      const bool want_positive = (a < 1.0) ? (s < 0.0) : (s > 0.0);
      require(want_positive ? d > 0.0 : d < 0.0,
              "potential: W' must vanish only at -1, 0, +1 on [-1.5, 1.5]");
    }
  }

  std::vector<double> c_;
  bool standard_;
};

struct ReactionConstants {
  double M;          ///< shift strictly above sup |f'| on the interval
  double l;          ///< lim_{s->0} |W'(s)| / s = |W''(0)|
  double sup_abs_d2W;
};

/// Lipschitz shift M = margin * sup_{[lo,hi]} |W''| and the linearization
/// limit l. The sup is taken over 10^4 samples plus golden-section refinement
/// around the best sample and both endpoints.
inline ReactionConstants reaction_constants(const DoubleWell& w, double lo, double hi,
                                            double margin = 1.2) {
  require(std::isfinite(lo) && std::isfinite(hi), "reaction_constants: unbounded interval");
  require(lo < hi, "reaction_constants: need lo < hi");
  require(lo <= 0.0 && 0.0 <= hi, "reaction_constants: interval must contain 0");
  require(margin >= 1.2, "reaction_constants: margin factor must be >= 1.2");

  auto g = [&](double s) { return std::abs(w.d2W(s)); };
  constexpr int kSamples = 10000;
  const double step = (hi - lo) / kSamples;
  double best = std::max(g(lo), g(hi));
  int best_k = g(lo) >= g(hi) ? 0 : kSamples;
  for (int k = 0; k <= kSamples; ++k) {
    const double v = g(lo + k * step);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  // golden-section refinement on the bracketing cell pair
  double a = lo + std::max(0, best_k - 1) * step;
  double b = lo + std::min(kSamples, best_k + 1) * step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  for (int it = 0; it < 100 && b - a > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (g(c) > g(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  best = std::max({best, g(a), g(b), g(0.5 * (a + b))});
  return ReactionConstants{margin * best, std::abs(w.d2W(0.0)), best};
}

/// g(v) = -W'(v) + M v; nondecreasing wherever M >= |W''|.
inline double shifted_reaction(const DoubleWell& w, double M, double v) noexcept {
  return -w.dW(v) + M * v;
}

}  // namespace gac

#endif  // GAC_POTENTIAL_HPP
