#pragma once

#include <variant>
#include <vector>

#include "rabi/eigen.hpp"
#include "rabi/model.hpp"

namespace rabi {

struct PhotonParity {
  bool odd = false;
  bool operator==(const PhotonParity&) const = default;
};

/// n1 - n2 for the two-mode model.
struct ModeDifference {
  int d = 0;
  bool operator==(const ModeDifference&) const = default;
};

struct FullSpace {
  bool operator==(const FullSpace&) const = default;
};

using OracleSector = std::variant<PhotonParity, ModeDifference, FullSpace>;

/// q=1/4 -> even, q=3/4 -> odd, kappa -> d = 2 kappa - 1, trivial -> full.
OracleSector map_sector(const Sector& sector);
/// Inverse of map_sector.
Sector to_sector(const OracleSector& osector);

/// One basis state: boson occupations (n2 unused except for TwoMode) and the
/// sigma_z eigenvalue s = +1 / -1.
struct BasisLabel {
  int n1 = 0;
  int n2 = 0;
  int spin = 1;
};

struct TruncatedHamiltonian {
  SymmetricBandMatrix matrix;
  std::vector<BasisLabel> basis;
  int truncation = 0;

  int dimension() const noexcept { return matrix.dimension(); }
};

/// Fock-space matrix of the model restricted to `osector`, boson index up
/// to N. Basis order interleaves spin within each boson index, which keeps
/// the bandwidth at 3. Throws InvalidArgument for N < 4 and SectorMismatch
/// when the sector does not fit the model.
TruncatedHamiltonian build_hamiltonian(const ModelParams& model, const OracleSector& osector,
                                       int N);

/// k smallest eigenvalues, ascending.
std::vector<double> eigen_lowest(const TruncatedHamiltonian& h, int k);

struct OracleResult {
  std::vector<double> eigenvalues;  ///< in-window, ascending
  int truncation = 0;               ///< N of the last (stable) matrix
};

inline constexpr int oracle_default_max_truncation = 8192;

/// Smallest N >= 8 with omega*N >= 5 (e_max + delta + |drive| + |g| sqrt N).
int default_oracle_truncation(const ModelParams& model, double e_max);

/// Eigenvalues in `window`, doubling N from n_start (0 picks the default)
/// until every in-window eigenvalue moves by less than 1e-9 omega.
/// Throws TruncationCeiling if N would exceed n_max.
OracleResult oracle_spectrum(const ModelParams& model, const Sector& sector, Window window,
                             int n_start = 0, int n_max = oracle_default_max_truncation);

}  // namespace rabi
