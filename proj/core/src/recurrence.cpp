#include "rabi/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

BogoliubovParams bogoliubov_params(const ModelParams& model) {
  model.validate();
  const double w = model.omega;
  switch (model.kind) {
    case ModelKind::TwoPhoton: {
      const double x = 2.0 * model.g / w;
      const double root = std::sqrt(1.0 - x * x);
      // tau = -(omega/2g)(1 - Omega), rewritten to stay finite as g -> 0.
      return {-x / (1.0 + root), root};
    }
    case ModelKind::TwoMode: {
      const double y = model.g / w;
      const double root = std::sqrt(1.0 - y * y);
      return {-y / (1.0 + root), root};
    }
    case ModelKind::DrivenRabi:
      return {-model.g, 1.0};
  }
  return {};
}

namespace {

void require_coupling(const ModelParams& model) {
  if (std::abs(model.g) <= zero_coupling_eps(model)) {
    throw Error(ErrorCode::ZeroCoupling,
                "coupling g is zero; use the closed-form g=0 spectrum instead");
  }
}

}  // namespace

AsymptoticRoots asymptotic_roots(const ModelParams& model) {
  model.validate();
  require_coupling(model);
  const double w = model.omega;
  const double g = model.g;
  switch (model.kind) {
    case ModelKind::TwoPhoton: return {w / (4.0 * g), g / w, -1, -1};
    case ModelKind::TwoMode: return {w / g, g / w, -1, -1};
    case ModelKind::DrivenRabi: return {w / (2.0 * g), 2.0 * g / w, 0, -1};
  }
  return {};
}

RecurrenceModel::RecurrenceModel(const ModelParams& model, const Sector& sector)
    : model_(model), sector_(sector) {
  model.validate();
  sector.check_matches(model.kind);
  require_coupling(model);
  bog_ = bogoliubov_params(model);

  const double w = model.omega;
  const double g = model.g;
  const double d2 = model.delta * model.delta;
  const double r = bog_.root_factor;
  switch (model.kind) {
    case ModelKind::TwoPhoton: {
      const double q = sector.value();
      shift_ = 2.0 * q;
      first_pole_ = -0.5 * w + 2.0 * q * w * r;
      pole_spacing_ = 2.0 * w * r;
      slope_ = -2.0 * w * (2.0 - r * r);
      offset_ = -2.0 * q * w * (2.0 - r * r) + 0.5 * w * r;
      energy_factor_ = r;
      denom_scale_ = 8.0 * g;
      residue_scale_ = -d2 * r;
      break;
    }
    case ModelKind::TwoMode: {
      const double kappa = sector.value();
      shift_ = 2.0 * kappa;
      first_pole_ = -w + 2.0 * kappa * w * r;
      pole_spacing_ = 2.0 * w * r;
      slope_ = -2.0 * w * (2.0 - r * r);
      offset_ = -2.0 * kappa * w * (2.0 - r * r) + w * r;
      energy_factor_ = r;
      denom_scale_ = 2.0 * g;
      residue_scale_ = -d2 * r;
      break;
    }
    case ModelKind::DrivenRabi: {
      shift_ = 0.0;
      first_pole_ = model.drive - g * g / w;
      pole_spacing_ = w;
      slope_ = -w;
      offset_ = model.drive - 3.0 * g * g / w;
      energy_factor_ = 1.0;
      denom_scale_ = 2.0 * g;
      residue_scale_ = -d2;
      break;
    }
  }
}

namespace {

inline double pair_factor(ModelKind kind, int n, double shift) noexcept {
  return kind == ModelKind::DrivenRabi ? (n + 1.0) : (n + 1.0) * (n + shift);
}

}  // namespace

double RecurrenceModel::regular(int n, double energy) const noexcept {
  return (slope_ * n + offset_ + energy_factor_ * energy) /
         (denom_scale_ * pair_factor(model_.kind, n, shift_));
}

double RecurrenceModel::residue(int n) const noexcept {
  return residue_scale_ / (denom_scale_ * pair_factor(model_.kind, n, shift_));
}

double RecurrenceModel::b(int n) const noexcept {
  switch (model_.kind) {
    case ModelKind::TwoPhoton: return 1.0 / (4.0 * (n + 1.0) * (n + shift_));
    case ModelKind::TwoMode: return 1.0 / ((n + 1.0) * (n + shift_));
    case ModelKind::DrivenRabi: break;
  }
  return 1.0 / (n + 1.0);
}

double RecurrenceModel::distance_to_pole(double energy) const noexcept {
  const double k = std::max(0.0, std::round((energy - first_pole_) / pole_spacing_));
  return std::abs(energy - pole(static_cast<int>(k)));
}

double pole_collision_eps(const ModelParams& model) noexcept { return 1e-9 * model.omega; }

ThreeTermCoeffs::ThreeTermCoeffs(const ModelParams& model, const Sector& sector,
                                 double energy)
    : ThreeTermCoeffs(RecurrenceModel(model, sector), energy) {}

ThreeTermCoeffs::ThreeTermCoeffs(const RecurrenceModel& recurrence, double energy)
    : rec_(recurrence), energy_(energy) {
  if (!std::isfinite(energy)) {
    throw Error(ErrorCode::InvalidArgument, "energy must be finite");
  }
  if (rec_.has_poles() && rec_.distance_to_pole(energy) <= pole_collision_eps(rec_.params())) {
    throw Error(ErrorCode::PoleCollision,
                "energy " + std::to_string(energy) + " coincides with a pole energy");
  }
  minimal_scale_ = asymptotic_roots(rec_.params()).t2;
}

std::vector<double> pole_energies(const ModelParams& model, const Sector& sector, int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be non-negative");
  model.validate();
  sector.check_matches(model.kind);
  const double w = model.omega;
  double first = 0.0;
  double spacing = 0.0;
  switch (model.kind) {
    case ModelKind::TwoPhoton: {
      const double r = bogoliubov_params(model).root_factor;
      first = -0.5 * w + 2.0 * sector.value() * w * r;
      spacing = 2.0 * w * r;
      break;
    }
    case ModelKind::TwoMode: {
      const double r = bogoliubov_params(model).root_factor;
      first = -w + 2.0 * sector.value() * w * r;
      spacing = 2.0 * w * r;
      break;
    }
    case ModelKind::DrivenRabi:
      first = model.drive - model.g * model.g / w;
      spacing = w;
      break;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) out.push_back(first + n * spacing);
  return out;
}

std::vector<double> closed_form_spectrum_g0(const ModelParams& model, const Sector& sector,
                                            int n_max) {
  if (n_max < 0) throw Error(ErrorCode::InvalidArgument, "n_max must be non-negative");
  model.validate();
  sector.check_matches(model.kind);
  if (model.g != 0.0) {
    throw Error(ErrorCode::NotDecoupled, "closed-form spectrum requires g = 0");
  }
  const double w = model.omega;
  std::vector<double> out;
  auto add_pair = [&](double centre, double split) {
    out.push_back(centre - split);
    out.push_back(centre + split);
  };
  switch (model.kind) {
    case ModelKind::TwoPhoton: {
      const int parity = sector.q_numerator() == 1 ? 0 : 1;
      for (int n = parity; n <= n_max; n += 2) add_pair(n * w, model.delta);
      break;
    }
    case ModelKind::TwoMode: {
      const int d = sector.twice_kappa() - 1;
      for (int n = 0; n <= n_max; ++n) add_pair((2 * n + d) * w, model.delta);
      break;
    }
    case ModelKind::DrivenRabi: {
      const double split = std::hypot(model.delta, model.drive);
      for (int n = 0; n <= n_max; ++n) add_pair(n * w, split);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace rabi
