#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stefan {

/// Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::vector<double> rhs;

  TridiagonalSystem() = default;
  explicit TridiagonalSystem(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}

  std::size_t size() const { return diag.size(); }

  /// A x for the stored coefficients.
  std::vector<double> apply(std::span<const double> x) const;
};

class SingularSystemError : public std::runtime_error {
 public:
  SingularSystemError(std::size_t row, const std::string& what)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

struct SolveDiagnostics {
  bool diagonally_dominant = true;
  double relative_residual = 0.0;
};

/// |diag[i]| >= |lower[i]| + |upper[i]| on every row.
bool is_diagonally_dominant(const TridiagonalSystem& sys);

/// ||A x - rhs||_2 / ||rhs||_2 (absolute norm when rhs == 0).
double relative_residual(const TridiagonalSystem& sys, std::span<const double> x);

/// Forward elimination / back substitution (Thomas algorithm).
/// Throws SingularSystemError on a zero pivot. When diagnostics is given, it
/// receives the dominance check and the residual of the returned solution.
std::vector<double> thomas_solve(const TridiagonalSystem& sys, SolveDiagnostics* diagnostics = nullptr);

}  // namespace stefan
