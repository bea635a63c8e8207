// Copyright The nonbloch Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NONBLOCH_TYPES_HPP
#define NONBLOCH_TYPES_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nonbloch
{

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVec = std::vector<double>;
using IVec = std::vector<int>;

// Complex energy in Hz: real part is the resonance frequency, imaginary part the
// decay (negative) or gain rate.
using ComplexEnergy = cplx;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorCode
{
  InvalidArgument = 1,
  DimensionMismatch = 2,
  OnSpectrum = 3,
  NoConvergence = 4,
  EigensolverFailure = 5,
  Io = 6,
  Unsupported = 7,
  Internal = 99
};

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Reduce an angle into (-pi, pi].
inline double wrap_phase(double k)
{
  double r = std::remainder(k, kTwoPi);
  if (r <= -kPi)
  {
    r += kTwoPi;
  }
  return r;
}

inline bool is_finite(cplx z)
{
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void require(bool cond, ErrorCode code, const std::string &msg)
{
  if (!cond)
  {
    throw Error(code, msg);
  }
}

}  // namespace nonbloch

#endif  // NONBLOCH_TYPES_HPP
