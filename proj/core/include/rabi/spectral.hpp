#pragma once

#include <string>
#include <vector>

#include "rabi/contfrac.hpp"
#include "rabi/model.hpp"
#include "rabi/recurrence.hpp"

namespace rabi {

/// Tolerances and thresholds of the spectral pipeline. Quantities marked
/// "(x omega)" are multiplied by ModelParams::omega before use.
struct SpectralOptions {
  CFOptions cf{};
  double grid_step = 0.0;          ///< 0 selects default_grid_step()
  double root_abs_tol = 1e-12;
  double pole_guard = 1e-6;        ///< (x omega) grid points kept this far from poles
  double exceptional_eps = 1e-5;   ///< (x omega) roots this close to a pole are flagged
  double residual_cap = 1e-4;
  double blowup_threshold = 1e5;
  double refine_threshold = 1e-2;
  int tail_depth = 0;              ///< 0 selects default_tail_depth()
  int max_refine_iterations = 300;
  int threads = 1;
};

/// F(E), G(E) or Q(E) at one energy with its continued-fraction metadata.
struct SpectralSample {
  double energy = 0.0;
  double value = 0.0;
  CFValue cf{};
  bool near_pole = false;
};

/// Eigenvalue function: continued fraction at start 0 plus a(0).
/// Throws PoleCollision within pole_collision_eps of a pole energy.
SpectralSample spectral_function(const ModelParams& model, const Sector& sector,
                                 double energy, const SpectralOptions& opts = {});
SpectralSample spectral_function(const RecurrenceModel& rec, double energy,
                                 const SpectralOptions& opts = {});

/// Pole-free companion of the eigenvalue function.
///
/// Runs the recurrence backward from n = tail_depth with every pole factor
/// (E - pole(n)) cleared from the coefficients, rescaling by a positive
/// factor at each step. The result is continuous in E (for fixed depth) and
/// changes sign exactly where the depth-truncated eigenvalue function has a
/// zero; poles of the continued fraction and of a(0) leave no trace. Only
/// the sign and the location of zeros are meaningful.
double secular_numerator(const RecurrenceModel& rec, double energy, int tail_depth);

/// True when F changes sign between the doubles adjacent to `energy` with a
/// locally linear profile and |F(energy)| is below that one-ulp swing. Such a
/// zero is resolved to machine precision even if |F| exceeds residual_cap.
bool slope_limited_zero(const RecurrenceModel& rec, double energy,
                        const SpectralOptions& opts = {});

/// Backward-recursion depth large enough for energies up to e_max.
int default_tail_depth(const RecurrenceModel& rec, double e_max);

/// min(pole spacing, omega) / 40.
double default_grid_step(const ModelParams& model);

/// [min(pole_0, -omega) - delta - |drive| - 1, e_max].
Window default_window(const ModelParams& model, const Sector& sector, double e_max);

/// Sign-change enclosure of one eigenvalue. f_lo and f_hi are values of the
/// secular numerator evaluated at `depth`.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
  int depth = 0;
};

struct GridStats {
  double step = 0.0;
  int points = 0;
  int tail_depth = 0;
  int brackets = 0;
  int pole_crossings = 0;      ///< F sign flips with no zero in between
  int refined_intervals = 0;   ///< intervals subdivided by the adaptive probe
};

struct ScanReport {
  std::vector<Bracket> brackets;
  /// Local minima of |F| below refine_threshold with no sign change nearby;
  /// possible double roots.
  std::vector<double> touch_candidates;
  GridStats stats;
};

ScanReport scan_spectrum(const ModelParams& model, const Sector& sector, Window window,
                         double grid_step, const SpectralOptions& opts = {});

std::vector<Bracket> scan_brackets(const ModelParams& model, const Sector& sector,
                                   Window window, double grid_step,
                                   const SpectralOptions& opts = {});

struct RootRecord {
  double energy = 0.0;
  double residual = 0.0;  ///< |F(energy)|; +inf if energy hit a pole
  double width = 0.0;     ///< enclosure width at termination
  int iterations = 0;
  bool sign_lost = false;
  /// residual is above the cap only because F moves by more than that
  /// between neighbouring doubles: F changes sign linearly across
  /// (prev(energy), next(energy)).
  bool slope_limited = false;
};

/// Brent iteration (bisection with secant/inverse-quadratic steps) on the
/// secular numerator; the sign change is kept at every step.
RootRecord refine_root(const ModelParams& model, const Sector& sector, const Bracket& bracket,
                       double abs_tol, const SpectralOptions& opts = {});

struct FlaggedCandidate {
  enum class Reason { NearPole, ResidualExceeded, Touching, SignLost };
  double energy = 0.0;
  double residual = 0.0;
  double nearest_pole = 0.0;
  Reason reason = Reason::NearPole;
};

std::string_view to_string(FlaggedCandidate::Reason reason) noexcept;

struct SpectrumResult {
  ModelParams model{};
  Sector sector = Sector::trivial();
  Window window{};
  std::vector<RootRecord> roots;        ///< regular spectrum, ascending
  std::vector<double> poles;            ///< pole energies inside the window
  std::vector<FlaggedCandidate> flagged;
  GridStats grid{};
  std::vector<std::string> warnings;
};

/// pole_energies -> scan -> refine -> classify. Roots within exceptional_eps
/// of a pole, or with residual above residual_cap and not slope_limited, go
/// to `flagged`. Accepted slope-limited roots add a warning.
SpectrumResult compute_spectrum(const ModelParams& model, const Sector& sector, Window window,
                                const SpectralOptions& opts = {});

}  // namespace rabi
