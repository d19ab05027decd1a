#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ecrm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Bad input, bad usage, or a malformed file. The CLI maps it to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown (failed factorization, singular system). Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A (loss, output space) pair with no solver behind it.
class UnsupportedError : public InputError {
 public:
  using InputError::InputError;
};

enum class CertificateKind { exact, gap, heuristic };

struct Certificate {
  CertificateKind kind = CertificateKind::exact;
  double gap = 0.0;  // meaningful only for kind == gap

  static Certificate exact() { return {CertificateKind::exact, 0.0}; }
  static Certificate bounded(double g) { return {CertificateKind::gap, g}; }
  static Certificate heuristic() { return {CertificateKind::heuristic, 0.0}; }
};

std::string to_string(const Certificate& c);

// Lexicographic "a < b" on equal-length vectors.
inline bool lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

}  // namespace ecrm
