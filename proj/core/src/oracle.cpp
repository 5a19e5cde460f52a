#include "rabi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rabi/errors.hpp"

namespace rabi {

OracleSector map_sector(const Sector& sector) {
  switch (sector.kind()) {
    case Sector::Kind::Q:
      return PhotonParity{sector.q_numerator() == 3};
    case Sector::Kind::Kappa:
      return ModeDifference{sector.twice_kappa() - 1};
    case Sector::Kind::Trivial:
      break;
  }
  return FullSpace{};
}

Sector to_sector(const OracleSector& osector) {
  if (const auto* p = std::get_if<PhotonParity>(&osector)) return Sector::q(p->odd ? 3 : 1);
  if (const auto* m = std::get_if<ModeDifference>(&osector)) return Sector::kappa(m->d + 1);
  return Sector::trivial();
}

namespace {

void check_sector(ModelKind kind, const OracleSector& osector) {
  const bool ok = (kind == ModelKind::TwoPhoton && std::holds_alternative<PhotonParity>(osector)) ||
                  (kind == ModelKind::TwoMode && std::holds_alternative<ModeDifference>(osector)) ||
                  (kind == ModelKind::DrivenRabi && std::holds_alternative<FullSpace>(osector));
  if (!ok) {
    throw Error(ErrorCode::SectorMismatch,
                "oracle sector does not belong to the " + std::string(to_string(kind)) + " model");
  }
  if (const auto* m = std::get_if<ModeDifference>(&osector); m != nullptr && m->d < 0) {
    throw Error(ErrorCode::InvalidArgument, "mode difference must be >= 0");
  }
}

}  // namespace

TruncatedHamiltonian build_hamiltonian(const ModelParams& model, const OracleSector& osector,
                                       int N) {
  model.validate();
  check_sector(model.kind, osector);
  if (N < 4) throw Error(ErrorCode::InvalidArgument, "truncation N must be >= 4");

  const double w = model.omega;
  const double gap = model.delta;
  const double g = model.g;

  // Boson index sequence of the sector.
  int first = 0;
  int step = 1;
  if (const auto* p = std::get_if<PhotonParity>(&osector)) {
    first = p->odd ? 1 : 0;
    step = 2;
  }
  const int d = std::holds_alternative<ModeDifference>(osector)
                    ? std::get<ModeDifference>(osector).d
                    : 0;
  std::vector<int> levels;
  for (int n = first; n <= N; n += step) levels.push_back(n);
  const int dim = 2 * static_cast<int>(levels.size());

  TruncatedHamiltonian h{SymmetricBandMatrix(dim, 3), {}, N};
  h.basis.reserve(static_cast<std::size_t>(dim));
  // index(k, s): k-th boson level, s = +1 at even slots.
  auto index = [](int k, int spin) { return 2 * k + (spin > 0 ? 0 : 1); };

  for (std::size_t k = 0; k < levels.size(); ++k) {
    const int n = levels[k];
    for (int spin : {1, -1}) {
      const int i = index(static_cast<int>(k), spin);
      switch (model.kind) {
        case ModelKind::TwoPhoton:
        case ModelKind::DrivenRabi:
          h.basis.push_back({n, 0, spin});
          h.matrix.set(i, i, w * n + gap * spin);
          break;
        case ModelKind::TwoMode:
          h.basis.push_back({n + d, n, spin});
          h.matrix.set(i, i, w * (2 * n + d) + gap * spin);
          break;
      }
    }
    if (model.kind == ModelKind::DrivenRabi && model.drive != 0.0) {
      h.matrix.set(index(static_cast<int>(k), 1), index(static_cast<int>(k), -1), model.drive);
    }
    if (k + 1 < levels.size()) {
      double c = 0.0;
      switch (model.kind) {
        case ModelKind::TwoPhoton:
          c = g * std::sqrt(static_cast<double>(n + 1) * (n + 2));
          break;
        case ModelKind::TwoMode:
          c = g * std::sqrt(static_cast<double>(n + 1) * (n + d + 1));
          break;
        case ModelKind::DrivenRabi:
          c = g * std::sqrt(static_cast<double>(n + 1));
          break;
      }
      const int next = static_cast<int>(k) + 1;
      h.matrix.set(index(static_cast<int>(k), 1), index(next, -1), c);
      h.matrix.set(index(static_cast<int>(k), -1), index(next, 1), c);
    }
  }
  return h;
}

std::vector<double> eigen_lowest(const TruncatedHamiltonian& h, int k) {
  if (k < 1 || k > h.dimension()) {
    throw Error(ErrorCode::InvalidArgument, "eigen_lowest needs 1 <= k <= dimension");
  }
  std::vector<double> values = band_eigenvalues(h.matrix);
  values.resize(static_cast<std::size_t>(k));
  return values;
}

int default_oracle_truncation(const ModelParams& model, double e_max) {
  const double w = model.omega;
  const double base = std::max(e_max, 0.0) + model.delta + std::abs(model.drive);
  int n = 8;
  while (n < oracle_default_max_truncation &&
         w * n < 5.0 * (base + std::abs(model.g) * std::sqrt(static_cast<double>(n)))) {
    ++n;
  }
  return n;
}

OracleResult oracle_spectrum(const ModelParams& model, const Sector& sector, Window window,
                             int n_start, int n_max) {
  if (!(window.lo <= window.hi) || !std::isfinite(window.lo) || !std::isfinite(window.hi)) {
    throw Error(ErrorCode::EmptyWindow, "oracle window must satisfy lo <= hi");
  }
  model.validate();
  sector.check_matches(model.kind);
  const OracleSector osector = map_sector(sector);
  const double tol = 1e-9 * model.omega;

  int n = n_start > 0 ? std::max(n_start, 4) : default_oracle_truncation(model, window.hi);
  if (n > n_max) {
    throw Error(ErrorCode::TruncationCeiling,
                "starting truncation " + std::to_string(n) + " exceeds the ceiling " +
                    std::to_string(n_max));
  }
  std::vector<double> prev = band_eigenvalues(build_hamiltonian(model, osector, n).matrix);
  for (;;) {
    const int next = 2 * n;
    if (next > n_max) {
      throw Error(ErrorCode::TruncationCeiling,
                  "in-window eigenvalues not stable below N = " + std::to_string(n_max));
    }
    std::vector<double> cur = band_eigenvalues(build_hamiltonian(model, osector, next).matrix);
    bool stable = true;
    for (std::size_t i = 0; i < cur.size() && cur[i] <= window.hi + tol; ++i) {
      if (i >= prev.size() || std::abs(cur[i] - prev[i]) >= tol) {
        stable = false;
        break;
      }
    }
    if (stable) {
      OracleResult out;
      out.truncation = next;
      for (double e : cur) {
        if (e > window.hi) break;
        if (e >= window.lo) out.eigenvalues.push_back(e);
      }
      return out;
    }
    prev = std::move(cur);
    n = next;
  }
}

}  // namespace rabi
