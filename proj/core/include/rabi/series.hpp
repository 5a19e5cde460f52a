#pragma once

#include <complex>
#include <vector>

#include "rabi/contfrac.hpp"
#include "rabi/model.hpp"
#include "rabi/spectral.hpp"

namespace rabi {

/// Power-series coefficients of the two wavefunction components,
/// psi_minus(z) = sum K-_n z^n and psi_plus(z) = sum K+_n z^n, n = 0..order,
/// with K-_0 = 1.
///
/// `minus` and `plus` are plain doubles and underflow to zero for large n;
/// `ratios` and `log_abs_minus` carry the same information without loss.
struct SeriesCoefficients {
  ModelParams model{};
  Sector sector = Sector::trivial();
  double energy = 0.0;
  int order = 0;
  std::vector<double> minus;
  std::vector<double> plus;
  std::vector<double> ratios;         ///< K-_{n+1}/K-_n, n = 0..order-1
  std::vector<double> log_abs_minus;  ///< log|K-_n|; -inf where K-_n == 0
  double spectral_residual = 0.0;     ///< |F(energy)|
  bool not_an_eigenvalue = false;     ///< spectral_residual > residual_cap
};

/// Minimal solution at `energy` from cumulative products of continued-fraction
/// ratios (never forward recursion). Plus-coefficients follow from
/// K+_n = delta / (E - pole(n)) K-_n.
SeriesCoefficients minimal_series(const ModelParams& model, const Sector& sector,
                                  double energy, int order, const SpectralOptions& opts = {});

/// Largest |K_{n+1} + a(n) K_n + b(n) K_{n-1}| / max(|terms|), 1 <= n < order.
double max_recurrence_residual(const SeriesCoefficients& series);

/// Consecutive-term ratios of the Bargmann norm sum,
/// |K_{n+1}|^2 w_{n+1} / (|K_n|^2 w_n) for n = 0..order-1, with
/// w_n = [2(n+q-1/4)]! (two-photon), n!(n+2kappa-1)! (two-mode), n! (driven).
std::vector<double> norm_term_ratios(const SeriesCoefficients& series);

/// Tail estimate of the norm ratio (last entry of norm_term_ratios). Requires
/// order >= 100.
double norm_tail_ratio(const SeriesCoefficients& series);

struct Wavefunction {
  std::complex<double> plus;
  std::complex<double> minus;
};

/// Partial sums at z. Throws TruncationInsufficient unless the last retained
/// term is below 1e-15 of the partial sum.
Wavefunction eval_wavefunction(const SeriesCoefficients& series, std::complex<double> z);

/// Value and first two derivatives of both components.
struct WavefunctionJet {
  Wavefunction value;
  Wavefunction first;
  Wavefunction second;
};

WavefunctionJet eval_wavefunction_jet(const SeriesCoefficients& series, std::complex<double> z);

/// Residuals of the coupled first-order/second-order ODE pair in the Bargmann
/// variable for the series' model, evaluated from term-wise derivatives.
struct OdeResidual {
  double plus_equation = 0.0;
  double minus_equation = 0.0;
  double max() const noexcept { return plus_equation > minus_equation ? plus_equation : minus_equation; }
};

OdeResidual ode_residual(const SeriesCoefficients& series, std::complex<double> z);

/// Same residual with derivatives taken by central finite differences of the
/// partial sums along the real direction (step h).
OdeResidual ode_residual_finite_difference(const SeriesCoefficients& series,
                                           std::complex<double> z, double h = 1e-3);

}  // namespace rabi
