#include "stefan/quadrature.hpp"

#include <array>
#include <cmath>

namespace stefan {

namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes with odd index (1, 3, 5) and the centre.
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kNodes[i];
    const double s = f(c - dx) + f(c + dx);
    kron += kKronrod[i] * s;
    if (i % 2 == 1) gauss += kGauss[i / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double abs_tol,
             double rel_tol, int depth, Panel whole) {
  if (depth <= 0 || whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.value)))
    return whole.value;
  const double c = 0.5 * (a + b);
  const Panel left = gk15(f, a, c);
  const Panel right = gk15(f, c, b);
  return adapt(f, a, c, 0.5 * abs_tol, rel_tol, depth - 1, left) +
         adapt(f, c, b, 0.5 * abs_tol, rel_tol, depth - 1, right);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, abs_tol, rel_tol, max_depth);
  return adapt(f, a, b, abs_tol, rel_tol, max_depth, gk15(f, a, b));
}

}  // namespace stefan
