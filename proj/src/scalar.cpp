#include "cifuse/scalar.hpp"

#include "cifuse/error.hpp"

namespace cifuse {

ScalarOpt golden_section_min(const std::function<double(double)>& f, double lo, double hi,
                             double tol, int max_iter) {
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "empty search interval");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol && it < max_iter) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  if (fc <= fd) return {c, fc, it};
  return {d, fd, it};
}

ScalarOpt bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                      int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0};
  if (fhi == 0.0) return {hi, 0.0, 0};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bisection needs a sign change");
  }
  int it = 0;
  while (hi - lo > tol && it < max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return {mid, 0.0, it + 1};
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    ++it;
  }
  const double mid = 0.5 * (lo + hi);
  return {mid, f(mid), it};
}

}  // namespace cifuse
