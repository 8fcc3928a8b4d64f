#include "stefan/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stefan {

std::vector<double> TridiagonalSystem::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += lower[i] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

bool is_diagonally_dominant(const TridiagonalSystem& sys) {
  const std::size_t n = sys.size();
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    if (i > 0) off += std::abs(sys.lower[i]);
    if (i + 1 < n) off += std::abs(sys.upper[i]);
    if (std::abs(sys.diag[i]) < off) return false;
  }
  return true;
}

double relative_residual(const TridiagonalSystem& sys, std::span<const double> x) {
  const auto ax = sys.apply(x);
  double r2 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double r = ax[i] - sys.rhs[i];
    r2 += r * r;
    b2 += sys.rhs[i] * sys.rhs[i];
  }
  return b2 > 0.0 ? std::sqrt(r2 / b2) : std::sqrt(r2);
}

std::vector<double> thomas_solve(const TridiagonalSystem& sys, SolveDiagnostics* diagnostics) {
  const std::size_t n = sys.size();
  if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n)
    throw std::invalid_argument("thomas_solve: coefficient arrays differ in length");
  std::vector<double> x(n);
  if (n == 0) return x;

  std::vector<double> c_star(n, 0.0);
  std::vector<double> d_star(n, 0.0);
  const double tiny = std::numeric_limits<double>::min();

  double pivot = sys.diag[0];
  if (std::abs(pivot) <= tiny) throw SingularSystemError(0, "thomas_solve: zero pivot at row 0");
  c_star[0] = n > 1 ? sys.upper[0] / pivot : 0.0;
  d_star[0] = sys.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = sys.diag[i] - sys.lower[i] * c_star[i - 1];
    if (std::abs(pivot) <= tiny || !std::isfinite(pivot))
      throw SingularSystemError(i, "thomas_solve: zero pivot at row " + std::to_string(i));
    c_star[i] = i + 1 < n ? sys.upper[i] / pivot : 0.0;
    d_star[i] = (sys.rhs[i] - sys.lower[i] * d_star[i - 1]) / pivot;
  }

  x[n - 1] = d_star[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d_star[i] - c_star[i] * x[i + 1];

  if (diagnostics) {
    diagnostics->diagonally_dominant = is_diagonally_dominant(sys);
    diagnostics->relative_residual = relative_residual(sys, x);
  }
  return x;
}

}  // namespace stefan
