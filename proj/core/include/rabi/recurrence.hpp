#pragma once

#include <vector>

#include "rabi/model.hpp"

namespace rabi {

/// Squeezing (or displacement) parameter and the accompanying square-root
/// factor of the Bogoliubov transformation that removes the counter-rotating
/// term from one spin branch.
///
/// TwoPhoton: squeeze = tau, root_factor = Omega = sqrt(1 - 4g^2/omega^2).
/// TwoMode:   squeeze = sigma, root_factor = Lambda = sqrt(1 - g^2/omega^2).
/// Driven:    squeeze = lambda = -g, root_factor = 1.
struct BogoliubovParams {
  double squeeze = 0.0;
  double root_factor = 1.0;
};

BogoliubovParams bogoliubov_params(const ModelParams& model);

/// Characteristic scales of the recurrence at large n.
///
/// For TwoPhoton and TwoMode both solutions behave as K_{n+1}/K_n ~ t n^-1,
/// t1 for the dominant and t2 for the minimal one. For the driven model the
/// dominant ratio tends to the constant t1 = omega/2g (exponent 0) while the
/// minimal ratio behaves as (2g/omega) n^-1; t2 holds that scale.
struct AsymptoticRoots {
  double t1 = 0.0;
  double t2 = 0.0;
  int dominant_exponent = -1;
  int minimal_exponent = -1;
};

AsymptoticRoots asymptotic_roots(const ModelParams& model);

/// Energy-independent part of the three-term recurrence
///
///   K_1 + a(0) K_0 = 0,   K_{n+1} + a(n) K_n + b(n) K_{n-1} = 0  (n >= 1)
///
/// for one model and sector. The diagonal coefficient splits as
///
///   a(n; E) = regular(n; E) + residue(n) / (E - pole(n)),
///
/// with regular() linear in E. The plus-component coefficients follow from
/// K+_n = delta / (E - pole(n)) * K-_n.
class RecurrenceModel {
 public:
  /// Validates the model, the sector and |g| > zero_coupling_eps.
  RecurrenceModel(const ModelParams& model, const Sector& sector);

  const ModelParams& params() const noexcept { return model_; }
  const Sector& sector() const noexcept { return sector_; }
  const BogoliubovParams& bogoliubov() const noexcept { return bog_; }

  double pole(int n) const noexcept { return first_pole_ + n * pole_spacing_; }
  double first_pole() const noexcept { return first_pole_; }
  double pole_spacing() const noexcept { return pole_spacing_; }

  double regular(int n, double energy) const noexcept;
  double residue(int n) const noexcept;
  double b(int n) const noexcept;

  /// Full a(n; E). Not guarded against E == pole(n).
  double a(int n, double energy) const noexcept {
    if (residue_scale_ == 0.0) return regular(n, energy);
    return regular(n, energy) + residue(n) / (energy - pole(n));
  }

  /// Distance from E to the nearest pole(n), n >= 0.
  double distance_to_pole(double energy) const noexcept;

  /// True when the coefficients actually have poles (delta != 0).
  bool has_poles() const noexcept { return residue_scale_ != 0.0; }

 private:
  ModelParams model_;
  Sector sector_;
  BogoliubovParams bog_;
  double shift_ = 0.0;  // 2q or 2kappa; 0 for driven
  double first_pole_ = 0.0;
  double pole_spacing_ = 0.0;
  double slope_ = 0.0;          // n-dependence of the regular numerator
  double offset_ = 0.0;         // E-independent part of the regular numerator
  double energy_factor_ = 0.0;  // coefficient of E in the regular numerator
  double denom_scale_ = 0.0;    // 8g, 2g or 2g
  double residue_scale_ = 0.0;  // -delta^2 * root_factor
};

/// Recurrence coefficients bound to one energy.
class ThreeTermCoeffs {
 public:
  /// Throws PoleCollision if E lies within pole_collision_eps of a pole.
  ThreeTermCoeffs(const ModelParams& model, const Sector& sector, double energy);
  ThreeTermCoeffs(const RecurrenceModel& recurrence, double energy);

  double a(int n) const noexcept { return rec_.a(n, energy_); }
  double b(int n) const noexcept { return rec_.b(n); }

  double energy() const noexcept { return energy_; }
  const RecurrenceModel& recurrence() const noexcept { return rec_; }

  /// Minimal-solution ratio scale used to seed backward recursion.
  double minimal_scale() const noexcept { return minimal_scale_; }

 private:
  RecurrenceModel rec_;
  double energy_;
  double minimal_scale_ = 0.0;
};

/// E within this distance of a pole energy is a pole collision.
double pole_collision_eps(const ModelParams& model) noexcept;

/// Pole energies pole(0..n_max); also the exceptional-spectrum candidates.
std::vector<double> pole_energies(const ModelParams& model, const Sector& sector,
                                  int n_max);

/// Spectrum of the decoupled (g = 0) Hamiltonian in a sector, ascending.
///
/// TwoPhoton: n omega +/- delta for photon numbers n <= n_max of the sector's
/// parity. TwoMode: (2n + d) omega +/- delta, d = 2 kappa - 1, n <= n_max.
/// Driven: n omega +/- sqrt(delta^2 + drive^2), n <= n_max.
std::vector<double> closed_form_spectrum_g0(const ModelParams& model,
                                            const Sector& sector, int n_max);

}  // namespace rabi
