#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "rabi/errors.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

/// Anything that supplies the coefficients of
/// K_{n+1} + a(n) K_n + b(n) K_{n-1} = 0.
template <class C>
concept RecurrenceCoefficients = requires(const C& c, int n) {
  { c.a(n) } -> std::convertible_to<double>;
  { c.b(n) } -> std::convertible_to<double>;
};

/// Constant-coefficient recurrence; handy as an exactly solvable surrogate.
struct ConstantCoeffs {
  double a_value;
  double b_value;
  double a(int) const noexcept { return a_value; }
  double b(int) const noexcept { return b_value; }
};

/// Converged value of the ratio continued fraction at some start index.
struct CFValue {
  double value = 0.0;
  int depth = 0;
  bool converged = false;
  double residual = 0.0;  ///< |value(N) - value(2N)| at the last doubling
};

struct CFOptions {
  double rel_tol = 1e-12;
  int max_depth = 1 << 20;
  int initial_depth = 64;
};

/// Minimal-solution ratio K_{s+1}/K_s as the continued fraction
///
///   -b(s+1) / (a(s+1) - b(s+2) / (a(s+2) - ...)),
///
/// evaluated by forward modified Lentz. Convergents are compared at depths
/// 64, 128, 256, ... and the first pair with
/// |f_N - f_2N| <= rel_tol * max(1, |f_2N|) is accepted. Failing that the
/// deepest convergent is returned with converged = false.
template <RecurrenceCoefficients C>
CFValue eval_continued_fraction(const C& coeffs, int start, const CFOptions& opts = {}) {
  if (!(opts.rel_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rel_tol must be positive");
  if (opts.max_depth < 8) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 8");
  if (start < 0) throw Error(ErrorCode::InvalidArgument, "start index must be non-negative");

  constexpr double tiny = 1e-30;
  double f = tiny;
  double c = f;
  double d = 0.0;
  int checkpoint = std::min(std::max(opts.initial_depth, 1), opts.max_depth);
  double previous = 0.0;
  bool have_previous = false;
  CFValue out;

  for (int k = 1; k <= opts.max_depth; ++k) {
    const int n = start + k;
    const double num = -static_cast<double>(coeffs.b(n));
    const double den = coeffs.a(n);
    if (!std::isfinite(den) || !std::isfinite(num)) {
      throw Error(ErrorCode::CoefficientPole,
                  "non-finite recurrence coefficient at n=" + std::to_string(n));
    }
    d = den + num * d;
    if (d == 0.0) d = tiny;
    c = den + num / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    f *= c * d;

    if (k == checkpoint || k == opts.max_depth) {
      out.value = f;
      out.depth = k;
      if (have_previous) {
        out.residual = std::abs(f - previous);
        if (out.residual <= opts.rel_tol * std::max(1.0, std::abs(f))) {
          out.converged = true;
          return out;
        }
      }
      previous = f;
      have_previous = true;
      checkpoint = checkpoint > opts.max_depth / 2 ? opts.max_depth : 2 * checkpoint;
    }
  }
  return out;
}

/// Same ratio by backward recursion r_{n-1} = -b(n) / (a(n) + r_n), seeded at
/// n = tail_depth with r = tail_seed. Denominators smaller than 1e-300 are
/// nudged to +/-1e-300; DivisionBlowup is raised only if the result is not
/// finite.
template <RecurrenceCoefficients C>
double backward_recursion_ratio(const C& coeffs, int start, int tail_depth,
                                double tail_seed = 0.0) {
  if (start < 0) throw Error(ErrorCode::InvalidArgument, "start index must be non-negative");
  if (tail_depth < start + 8) {
    throw Error(ErrorCode::InvalidArgument, "tail_depth must be at least start + 8");
  }
  constexpr double floor = 1e-300;
  double r = tail_seed;
  for (int n = tail_depth; n > start; --n) {
    double den = coeffs.a(n) + r;
    if (std::abs(den) < floor) den = std::signbit(den) ? -floor : floor;
    r = -coeffs.b(n) / den;
  }
  if (!std::isfinite(r)) {
    throw Error(ErrorCode::DivisionBlowup, "backward recursion produced a non-finite ratio");
  }
  return r;
}

/// Backward recursion seeded with the asymptotic minimal ratio t2 / n.
inline double backward_recursion_ratio(const ThreeTermCoeffs& coeffs, int start,
                                       int tail_depth) {
  return backward_recursion_ratio<ThreeTermCoeffs>(
      coeffs, start, tail_depth, coeffs.minimal_scale() / static_cast<double>(tail_depth));
}

/// r_n = K_{n+1}/K_n of the minimal solution for n_lo <= n <= n_hi, each one
/// an independent continued-fraction evaluation.
template <RecurrenceCoefficients C>
std::vector<double> minimal_ratio_sequence(const C& coeffs, int n_lo, int n_hi,
                                           const CFOptions& opts = {}) {
  if (n_lo < 0 || n_hi <= n_lo) {
    throw Error(ErrorCode::InvalidArgument, "need n_hi > n_lo >= 0");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (int n = n_lo; n <= n_hi; ++n) out.push_back(eval_continued_fraction(coeffs, n, opts).value);
  return out;
}

}  // namespace rabi
