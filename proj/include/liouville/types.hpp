#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace liouville {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class ErrorCode {
  InvalidArgument,
  TailTooLarge,
  MaximaNotSeparated,
  DegenerateProbes,
  SizeCap,
  CoincidentPoints,
  TooFewSamples,
  BallOutsideDomain,
  FitDiverged,
  SingularKernelMatrix,
  NewtonDiverged,
  NotSingleBubble,
  NewtonStalled,
  BranchTerminated,
  PeakCountMismatch,
  ConfigError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Real dot product of two plane vectors stored as complex numbers.
inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// log(1 + e^a) without overflow.
inline double softplus(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

// e^{2 pi i l / n}
inline cplx root_of_unity(long l, long n) {
  const long k = ((l % n) + n) % n;
  return std::polar(1.0, two_pi * static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace liouville
