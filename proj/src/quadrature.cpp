#include "qhlab/quadrature.hpp"

#include <cmath>

#include "qhlab/error.hpp"

namespace qhlab {

namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double refine(const std::function<double(double)>& f, const Panel& p, double rel_tol, double abs_tol, int depth,
              QuadratureResult& out) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
  const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
  const double both = left + right;
  const double diff = both - p.whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * std::max(abs_tol, rel_tol * std::abs(both))) {
    out.error_estimate += std::abs(diff) / 15.0;
    return both + diff / 15.0;
  }
  return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, rel_tol, 0.5 * abs_tol, depth - 1, out) +
         refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, rel_tol, 0.5 * abs_tol, depth - 1, out);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                  double abs_tol, int max_depth) {
  QuadratureResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  out.evaluations = 3;
  const Panel whole{a, fa, m, fm, b, fb, simpson(a, fa, fm, b, fb)};
  out.value = refine(f, whole, rel_tol, abs_tol, max_depth, out);
  if (!std::isfinite(out.value)) throw Error(ErrorCode::kInternal, "quadrature produced a non-finite value");
  return out;
}

QuadratureResult composite_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                                   int max_panels) {
  QuadratureResult out;
  if (a == b) return out;
  // Keep the running sums of endpoint, even and odd samples so each doubling
  // only evaluates the new midpoints.
  int n = 2;
  double width = (b - a) / n;
  const double ends = f(a) + f(b);
  double evens = 0.0;
  double odds = f(a + width);
  out.evaluations = 3;
  double prev = width / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
  while (n < max_panels) {
    n *= 2;
    width = (b - a) / n;
    evens += odds;
    odds = 0.0;
    for (int i = 1; i < n; i += 2) odds += f(a + i * width);
    out.evaluations += n / 2;
    const double cur = width / 3.0 * (ends + 4.0 * odds + 2.0 * evens);
    out.error_estimate = std::abs(cur - prev);
    if (out.error_estimate <= rel_tol * std::abs(cur)) {
      out.value = cur;
      return out;
    }
    prev = cur;
  }
  out.value = prev;
  if (!std::isfinite(out.value)) throw Error(ErrorCode::kInternal, "quadrature produced a non-finite value");
  return out;
}

}  // namespace qhlab
