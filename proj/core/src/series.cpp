#include "rabi/series.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rabi/errors.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

SeriesCoefficients minimal_series(const ModelParams& model, const Sector& sector,
                                  double energy, int order, const SpectralOptions& opts) {
  if (order < 2) throw Error(ErrorCode::InvalidArgument, "series order must be >= 2");
  const RecurrenceModel rec(model, sector);
  const ThreeTermCoeffs coeffs(rec, energy);

  SeriesCoefficients s;
  s.model = model;
  s.sector = sector;
  s.energy = energy;
  s.order = order;
  s.ratios.reserve(static_cast<std::size_t>(order));
  for (int n = 0; n < order; ++n) {
    s.ratios.push_back(eval_continued_fraction(coeffs, n, opts.cf).value);
  }

  s.minus.resize(static_cast<std::size_t>(order) + 1);
  s.log_abs_minus.resize(static_cast<std::size_t>(order) + 1);
  s.minus[0] = 1.0;
  s.log_abs_minus[0] = 0.0;
  for (int n = 0; n < order; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double r = s.ratios[i];
    s.minus[i + 1] = s.minus[i] * r;
    s.log_abs_minus[i + 1] = r == 0.0 ? -std::numeric_limits<double>::infinity()
                                      : s.log_abs_minus[i] + std::log(std::abs(r));
  }

  s.plus.assign(static_cast<std::size_t>(order) + 1, 0.0);
  if (rec.has_poles()) {
    for (int n = 0; n <= order; ++n) {
      const auto i = static_cast<std::size_t>(n);
      s.plus[i] = model.delta * s.minus[i] / (energy - rec.pole(n));
    }
  }

  s.spectral_residual = std::abs(s.ratios[0] + coeffs.a(0));
  s.not_an_eigenvalue = !(s.spectral_residual <= opts.residual_cap) &&
                        !slope_limited_zero(rec, energy, opts);
  return s;
}

double max_recurrence_residual(const SeriesCoefficients& s) {
  const RecurrenceModel rec(s.model, s.sector);
  double worst = 0.0;
  // Divide the relation through by K_{n-1} so underflowed coefficients don't
  // matter.
  for (int n = 1; n < s.order; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double lead = s.ratios[i] * s.ratios[i - 1];
    const double mid = rec.a(n, s.energy) * s.ratios[i - 1];
    const double tail = rec.b(n);
    const double scale = std::max({std::abs(lead), std::abs(mid), std::abs(tail)});
    if (scale > 0.0) worst = std::max(worst, std::abs(lead + mid + tail) / scale);
  }
  return worst;
}

namespace {

double log_norm_weight(const SeriesCoefficients& s, int n) {
  switch (s.model.kind) {
    case ModelKind::TwoPhoton:
      return std::lgamma(2.0 * (n + s.sector.value() - 0.25) + 1.0);
    case ModelKind::TwoMode:
      return std::lgamma(n + 1.0) + std::lgamma(n + 2.0 * s.sector.value());
    case ModelKind::DrivenRabi: break;
  }
  return std::lgamma(n + 1.0);
}

}  // namespace

std::vector<double> norm_term_ratios(const SeriesCoefficients& s) {
  std::vector<double> out;
  out.reserve(s.ratios.size());
  for (int n = 0; n < s.order; ++n) {
    const double r = s.ratios[static_cast<std::size_t>(n)];
    out.push_back(r * r * std::exp(log_norm_weight(s, n + 1) - log_norm_weight(s, n)));
  }
  return out;
}

double norm_tail_ratio(const SeriesCoefficients& s) {
  if (s.order < 100) {
    throw Error(ErrorCode::InvalidArgument, "norm_tail_ratio needs a series of order >= 100");
  }
  const RecurrenceModel rec(s.model, s.sector);
  const int n = s.order - 1;
  const double r = s.ratios.back();
  return r * r * std::exp(log_norm_weight(s, n + 1) - log_norm_weight(s, n));
}

namespace {

using cplx = std::complex<double>;

// Sums value, first and second derivative of both series at z.
WavefunctionJet sum_jet(const SeriesCoefficients& s, cplx z, bool derivatives) {
  WavefunctionJet jet{};
  // powers[k] = z^(n-k) for the current n.
  std::array<cplx, 3> powers{cplx(1.0), cplx(0.0), cplx(0.0)};
  for (int n = 0; n <= s.order; ++n) {
    const auto i = static_cast<std::size_t>(n);
    const double km = s.minus[i];
    const double kp = s.plus[i];
    jet.value.minus += km * powers[0];
    jet.value.plus += kp * powers[0];
    if (derivatives) {
      if (n >= 1) {
        jet.first.minus += static_cast<double>(n) * km * powers[1];
        jet.first.plus += static_cast<double>(n) * kp * powers[1];
      }
      if (n >= 2) {
        const double f = static_cast<double>(n) * (n - 1);
        jet.second.minus += f * km * powers[2];
        jet.second.plus += f * kp * powers[2];
      }
    }
    powers = {powers[0] * z, powers[0], powers[1]};
  }
  return jet;
}

void check_truncation(const SeriesCoefficients& s, cplx z, const Wavefunction& w) {
  if (z == cplx(0.0)) return;
  const double reference = std::max(std::abs(w.minus), std::abs(w.plus));
  const double log_tail = s.log_abs_minus.back() + s.order * std::log(std::abs(z));
  double log_tail_plus = -std::numeric_limits<double>::infinity();
  if (s.plus.back() != 0.0 || s.model.delta != 0.0) {
    const RecurrenceModel rec(s.model, s.sector);
    const double factor = std::abs(s.model.delta / (s.energy - rec.pole(s.order)));
    if (factor > 0.0) log_tail_plus = log_tail + std::log(factor);
  }
  const double limit = std::log(1e-15) + std::log(reference);
  if (!(reference > 0.0) || log_tail >= limit || log_tail_plus >= limit) {
    throw Error(ErrorCode::TruncationInsufficient,
                "series order " + std::to_string(s.order) + " too small at |z|=" +
                    std::to_string(std::abs(z)));
  }
}

}  // namespace

Wavefunction eval_wavefunction(const SeriesCoefficients& s, cplx z) {
  const Wavefunction w = sum_jet(s, z, false).value;
  check_truncation(s, z, w);
  return w;
}

WavefunctionJet eval_wavefunction_jet(const SeriesCoefficients& s, cplx z) {
  WavefunctionJet jet = sum_jet(s, z, true);
  check_truncation(s, z, jet.value);
  return jet;
}

namespace {

OdeResidual residual_from_jet(const SeriesCoefficients& s, cplx z, const WavefunctionJet& j) {
  const ModelParams& m = s.model;
  const double w = m.omega;
  const double g = m.g;
  const double e = s.energy;
  const double dl = m.delta;
  cplx plus_eq;
  cplx minus_eq;
  switch (m.kind) {
    case ModelKind::TwoPhoton: {
      const double r = bogoliubov_params(m).root_factor;
      const double q = s.sector.value();
      const double c = 2.0 * w * (2.0 - r * r);
      plus_eq = 2.0 * w * r * (z * j.first.plus + q * j.value.plus) - (0.5 * w + e) * j.value.plus +
                dl * j.value.minus;
      minus_eq = 8.0 * g * z * j.second.minus + (-c * z + 16.0 * g * q) * j.first.minus +
                 (2.0 * g * z - c * q + (0.5 * w + e) * r) * j.value.minus -
                 r * dl * j.value.plus;
      break;
    }
    case ModelKind::TwoMode: {
      const double r = bogoliubov_params(m).root_factor;
      const double k = s.sector.value();
      const double c = 2.0 * w * (2.0 - r * r);
      plus_eq = 2.0 * w * r * (z * j.first.plus + k * j.value.plus) - (w + e) * j.value.plus +
                dl * j.value.minus;
      minus_eq = 2.0 * g * z * j.second.minus + (-c * z + 4.0 * g * k) * j.first.minus +
                 (2.0 * g * z - c * k + (e + w) * r) * j.value.minus - r * dl * j.value.plus;
      break;
    }
    case ModelKind::DrivenRabi: {
      const double dr = m.drive;
      plus_eq = w * z * j.first.plus + (dr - g * g / w - e) * j.value.plus + dl * j.value.minus;
      minus_eq = (w * z - 2.0 * g) * j.first.minus - 2.0 * g * z * j.value.minus +
                 (3.0 * g * g / w - dr - e) * j.value.minus + dl * j.value.plus;
      break;
    }
  }
  return {std::abs(plus_eq), std::abs(minus_eq)};
}

}  // namespace

OdeResidual ode_residual(const SeriesCoefficients& s, cplx z) {
  return residual_from_jet(s, z, eval_wavefunction_jet(s, z));
}

OdeResidual ode_residual_finite_difference(const SeriesCoefficients& s, cplx z, double h) {
  std::array<Wavefunction, 5> f;
  for (int k = -2; k <= 2; ++k) f[static_cast<std::size_t>(k + 2)] = eval_wavefunction(s, z + double(k) * h);
  auto d1 = [&](auto get) {
    return (-get(f[4]) + 8.0 * get(f[3]) - 8.0 * get(f[1]) + get(f[0])) / (12.0 * h);
  };
  auto d2 = [&](auto get) {
    return (-get(f[4]) + 16.0 * get(f[3]) - 30.0 * get(f[2]) + 16.0 * get(f[1]) - get(f[0])) /
           (12.0 * h * h);
  };
  auto plus = [](const Wavefunction& w) { return w.plus; };
  auto minus = [](const Wavefunction& w) { return w.minus; };
  WavefunctionJet jet;
  jet.value = f[2];
  jet.first = {d1(plus), d1(minus)};
  jet.second = {d2(plus), d2(minus)};
  return residual_from_jet(s, z, jet);
}

}  // namespace rabi
