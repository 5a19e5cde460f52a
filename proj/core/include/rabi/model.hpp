#pragma once

#include <string>
#include <string_view>

namespace rabi {

enum class ModelKind { TwoPhoton, TwoMode, DrivenRabi };

std::string_view to_string(ModelKind kind) noexcept;

/// Physical parameters of one of the three Rabi-type Hamiltonians.
///
/// All energies are in the caller's units; nothing is rescaled by omega.
/// `drive` is only meaningful for DrivenRabi.
struct ModelParams {
  ModelKind kind = ModelKind::TwoPhoton;
  double omega = 1.0;
  double delta = 0.0;
  double g = 0.0;
  double drive = 0.0;

  /// Throws InvalidArgument for non-finite values, omega <= 0 or delta < 0,
  /// and CouplingOutOfRange when |2g| >= omega (TwoPhoton) or |g| >= omega
  /// (TwoMode).
  void validate() const;

  /// Same parameters with g -> -g (and drive -> -drive for DrivenRabi).
  ModelParams mirrored() const;
};

/// Closed energy interval [lo, hi].
struct Window {
  double lo = 0.0;
  double hi = 0.0;
};

/// Couplings with |g| <= zero_coupling_eps(params) are treated as decoupled.
double zero_coupling_eps(const ModelParams& params) noexcept;

/// Symmetry-sector label.
///
/// TwoPhoton sectors are q = 1/4 or 3/4 (stored as the numerator over 4),
/// TwoMode sectors are kappa = 1/2, 1, 3/2, ... (stored as 2*kappa), and the
/// driven model has a single trivial sector.
class Sector {
 public:
  enum class Kind { Q, Kappa, Trivial };

  static Sector q(int numerator_over_four);
  static Sector kappa(int twice_kappa);
  static Sector trivial() noexcept { return Sector(Kind::Trivial, 0); }

  /// Accepts "1/4", "3/4", "0.25", "0.75".
  static Sector parse_q(std::string_view text);
  /// Accepts "p/2", "p" or a decimal that is a positive half-integer.
  static Sector parse_kappa(std::string_view text);

  /// The sector compatible with `kind` by default (q=1/4, kappa=1/2, trivial).
  static Sector default_for(ModelKind kind) noexcept;

  Kind kind() const noexcept { return kind_; }
  /// q or kappa as a real number; 0 for the trivial sector.
  double value() const noexcept;
  int q_numerator() const noexcept { return kind_ == Kind::Q ? label_ : 0; }
  int twice_kappa() const noexcept { return kind_ == Kind::Kappa ? label_ : 0; }

  /// Human-readable label: "1/4", "3/2", "1", "full".
  std::string label() const;

  /// Throws SectorMismatch unless this sector belongs to `kind`.
  void check_matches(ModelKind kind) const;

  bool operator==(const Sector&) const = default;

 private:
  Sector(Kind kind, int label) noexcept : kind_(kind), label_(label) {}

  Kind kind_;
  int label_;
};

}  // namespace rabi
