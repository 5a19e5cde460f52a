#include "rabi/model.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::TwoPhoton: return "two-photon";
    case ModelKind::TwoMode: return "two-mode";
    case ModelKind::DrivenRabi: return "driven";
  }
  return "unknown";
}

void ModelParams::validate() const {
  if (!std::isfinite(omega) || !std::isfinite(delta) || !std::isfinite(g) ||
      !std::isfinite(drive)) {
    throw Error(ErrorCode::InvalidArgument, "model parameters must be finite");
  }
  if (omega <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "omega must be positive");
  }
  if (delta < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "delta must be non-negative");
  }
  if (kind == ModelKind::TwoPhoton && std::abs(2.0 * g) >= omega) {
    throw Error(ErrorCode::CouplingOutOfRange,
                "two-photon model requires |2g| < omega (got g=" +
                    std::to_string(g) + ", omega=" + std::to_string(omega) + ")");
  }
  if (kind == ModelKind::TwoMode && std::abs(g) >= omega) {
    throw Error(ErrorCode::CouplingOutOfRange,
                "two-mode model requires |g| < omega (got g=" + std::to_string(g) +
                    ", omega=" + std::to_string(omega) + ")");
  }
  if (kind != ModelKind::DrivenRabi && drive != 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "drive amplitude is only defined for the driven model");
  }
}

ModelParams ModelParams::mirrored() const {
  ModelParams out = *this;
  out.g = -g;
  if (kind == ModelKind::DrivenRabi) out.drive = -drive;
  return out;
}

double zero_coupling_eps(const ModelParams& params) noexcept {
  return 1e-12 * params.omega;
}

Sector Sector::q(int numerator_over_four) {
  if (numerator_over_four != 1 && numerator_over_four != 3) {
    throw Error(ErrorCode::InvalidArgument, "q must be 1/4 or 3/4");
  }
  return Sector(Kind::Q, numerator_over_four);
}

Sector Sector::kappa(int twice_kappa) {
  if (twice_kappa < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "kappa must be a positive half-integer (1/2, 1, 3/2, ...)");
  }
  return Sector(Kind::Kappa, twice_kappa);
}

namespace {

bool parse_int(std::string_view text, int& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// Reads "p/d" or a decimal into a value times `denominator`, which must be
// an integer.
bool parse_rational(std::string_view text, int denominator, int& scaled) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    int p = 0;
    int d = 0;
    if (!parse_int(text.substr(0, slash), p) || !parse_int(text.substr(slash + 1), d) ||
        d <= 0 || (p * denominator) % d != 0) {
      return false;
    }
    scaled = p * denominator / d;
    return true;
  }
  double x = 0.0;
  if (!parse_double(text, x)) return false;
  const double s = x * denominator;
  if (std::abs(s - std::round(s)) > 1e-12) return false;
  scaled = static_cast<int>(std::lround(s));
  return true;
}

}  // namespace

Sector Sector::parse_q(std::string_view text) {
  int scaled = 0;
  if (!parse_rational(text, 4, scaled)) {
    throw Error(ErrorCode::InvalidArgument, "cannot parse q from '" + std::string(text) + "'");
  }
  return q(scaled);
}

Sector Sector::parse_kappa(std::string_view text) {
  int scaled = 0;
  if (!parse_rational(text, 2, scaled)) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot parse kappa from '" + std::string(text) + "'");
  }
  return kappa(scaled);
}

Sector Sector::default_for(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::TwoPhoton: return Sector(Kind::Q, 1);
    case ModelKind::TwoMode: return Sector(Kind::Kappa, 1);
    case ModelKind::DrivenRabi: break;
  }
  return trivial();
}

double Sector::value() const noexcept {
  switch (kind_) {
    case Kind::Q: return label_ / 4.0;
    case Kind::Kappa: return label_ / 2.0;
    case Kind::Trivial: break;
  }
  return 0.0;
}

std::string Sector::label() const {
  switch (kind_) {
    case Kind::Q: return std::to_string(label_) + "/4";
    case Kind::Kappa:
      return label_ % 2 == 0 ? std::to_string(label_ / 2) : std::to_string(label_) + "/2";
    case Kind::Trivial: break;
  }
  return "full";
}

void Sector::check_matches(ModelKind kind) const {
  const bool ok = (kind == ModelKind::TwoPhoton && kind_ == Kind::Q) ||
                  (kind == ModelKind::TwoMode && kind_ == Kind::Kappa) ||
                  (kind == ModelKind::DrivenRabi && kind_ == Kind::Trivial);
  if (!ok) {
    throw Error(ErrorCode::SectorMismatch, "sector " + label() +
                                               " does not belong to the " +
                                               std::string(to_string(kind)) + " model");
  }
}

}  // namespace rabi
