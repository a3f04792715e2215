// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridlab {

using Real = double;
using Cx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when an input document or value violates the declared schema or a
// precondition the caller is responsible for (CLI exit code 2).
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a solver or fit fails to converge (CLI exit code 1).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline Vec linspace(double lo, double hi, int n) {
  if (n < 1) throw SchemaError("linspace: need at least one point");
  Vec out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) out[i] = lo + step * i;
  out[n - 1] = hi;
  return out;
}

// Locale-independent shortest-roundtrip float formatting for CSV/JSON output.
std::string format_double(double v);

}  // namespace gridlab
