#include "ifeq/inverse.hpp"

#include <cmath>

namespace ifeq {

MonotoneMap make_monotone_map(const Expr& forward, const Expr& derivative, double floor,
                              double probe_halfwidth, int probe_n) {
  if (!(floor > 0) || !std::isfinite(floor))
    throw ConfigError("derivative floor must be positive and finite");
  if (!(probe_halfwidth > 0) || probe_n < 2) throw ConfigError("bad probe grid");

  const double d0 = derivative.eval(0.0);
  const int direction = d0 > 0 ? +1 : -1;
  const double denom = static_cast<double>(probe_n - 1);
  for (int i = 0; i < probe_n; ++i) {
    double x = (-probe_halfwidth * (denom - i) + probe_halfwidth * i) / denom;
    double d = derivative.eval(x);
    if (std::fabs(d) < floor)
      throw ConfigError("derivative floor violated at x = " + format_double(x) + ": |" +
                        format_double(d) + "| < " + format_double(floor));
    if ((d > 0) != (direction > 0))
      throw ConfigError("derivative changes sign at x = " + format_double(x) +
                        "; map is not monotone");
  }
  return MonotoneMap{forward, derivative, direction, floor};
}

double invert(const MonotoneMap& m, double y, double tol) {
  if (!std::isfinite(y)) throw ConfigError("invert: target must be finite");
  if (!(tol > 0)) throw ConfigError("invert: tolerance must be positive");

  // G is nondecreasing in x regardless of the map's direction.
  const double sign = m.direction > 0 ? 1.0 : -1.0;
  auto G = [&](double x) { return sign * (m.forward.eval(x) - y); };

  double x0 = m.direction * (y / m.derivative_floor);
  double g0 = G(x0);
  if (std::fabs(g0) <= tol) return x0;

  // Expand a bracket [lo, hi] with G(lo) < 0 < G(hi).
  double lo, hi, glo, ghi;
  double step = std::fmax(1.0, std::fabs(x0) / 8.0);
  if (g0 > 0) {
    hi = x0;
    ghi = g0;
    lo = x0 - step;
    glo = G(lo);
    for (int k = 0; glo > 0; ++k) {
      if (k >= 200)
        throw BracketError("bracket expansion failed after 200 doublings; forward map "
                           "appears to violate its derivative floor");
      hi = lo;
      ghi = glo;
      step *= 2;
      lo -= step;
      glo = G(lo);
    }
  } else {
    lo = x0;
    glo = g0;
    hi = x0 + step;
    ghi = G(hi);
    for (int k = 0; ghi < 0; ++k) {
      if (k >= 200)
        throw BracketError("bracket expansion failed after 200 doublings; forward map "
                           "appears to violate its derivative floor");
      lo = hi;
      glo = ghi;
      step *= 2;
      hi += step;
      ghi = G(hi);
    }
  }
  if (std::fabs(glo) <= tol) return lo;
  if (std::fabs(ghi) <= tol) return hi;

  // Safeguarded Newton: fall back to bisection whenever the Newton step
  // leaves the bracket, creeps (less than half the progress of two steps
  // ago), or fails to reduce |G|.
  double x = 0.5 * (lo + hi);
  double gx = G(x);
  double dx_old = hi - lo;
  double dx = dx_old;
  for (int it = 0; it < 200; ++it) {
    if (std::fabs(gx) <= tol) return x;
    const double d = sign * m.derivative.eval(x);  // G' >= floor > 0
    bool bisect = true;
    if (d > 0) {
      double xn = x - gx / d;
      if (xn > lo && xn < hi && std::fabs(2.0 * gx) <= std::fabs(dx_old * d)) {
        double gn = G(xn);
        if (std::fabs(gn) < std::fabs(gx)) {
          dx_old = dx;
          dx = std::fabs(xn - x);
          x = xn;
          gx = gn;
          bisect = false;
        }
      }
    }
    if (bisect) {
      dx_old = dx;
      dx = 0.5 * (hi - lo);
      double xn = lo + dx;
      if (xn == lo || xn == hi) {
        // bracket exhausted at float resolution; return the better endpoint
        return std::fabs(glo) < std::fabs(ghi) ? lo : hi;
      }
      x = xn;
      gx = G(x);
    }
    if (gx < 0) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
      ghi = gx;
    }
  }
  throw InternalError("invert: no convergence within 200 safeguarded Newton iterations");
}

double inverse_derivative(const MonotoneMap& m, double y, double tol) {
  const double x = invert(m, y, tol);
  return 1.0 / m.derivative.eval(x);
}

}  // namespace ifeq
