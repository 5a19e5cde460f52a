#include "rabi/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool negative(double x) noexcept { return std::signbit(x); }

// Evaluates fn(i) for i in [0, count) on up to `threads` workers. Each index
// writes only its own slot, so the output does not depend on scheduling.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 64) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
}

double pole_guard(const ModelParams& m, const SpectralOptions& o) { return o.pole_guard * m.omega; }

double spectral_value_or_nan(const RecurrenceModel& rec, double energy,
                             const SpectralOptions& opts) {
  try {
    return spectral_function(rec, energy, opts).value;
  } catch (const Error&) {
    return kNaN;
  }
}

}  // namespace

std::string_view to_string(FlaggedCandidate::Reason reason) noexcept {
  switch (reason) {
    case FlaggedCandidate::Reason::NearPole: return "near_pole";
    case FlaggedCandidate::Reason::ResidualExceeded: return "residual_exceeded";
    case FlaggedCandidate::Reason::Touching: return "touching_zero";
    case FlaggedCandidate::Reason::SignLost: return "sign_lost";
  }
  return "unknown";
}

SpectralSample spectral_function(const RecurrenceModel& rec, double energy,
                                 const SpectralOptions& opts) {
  const ThreeTermCoeffs coeffs(rec, energy);
  SpectralSample s;
  s.energy = energy;
  s.cf = eval_continued_fraction(coeffs, 0, opts.cf);
  s.value = s.cf.value + coeffs.a(0);
  s.near_pole = rec.has_poles() && rec.distance_to_pole(energy) < pole_guard(rec.params(), opts);
  return s;
}

SpectralSample spectral_function(const ModelParams& model, const Sector& sector, double energy,
                                 const SpectralOptions& opts) {
  return spectral_function(RecurrenceModel(model, sector), energy, opts);
}

double secular_numerator(const RecurrenceModel& rec, double energy, int tail_depth) {
  if (tail_depth < 2) throw Error(ErrorCode::InvalidArgument, "tail_depth must be >= 2");
  const bool poles = rec.has_poles();
  auto pole_factor = [&](int n) { return poles ? energy - rec.pole(n) : 1.0; };
  auto cleared_a = [&](int n, double factor) {
    return poles ? rec.regular(n, energy) * factor + rec.residue(n) : rec.regular(n, energy);
  };

  // v_n = u_n * prod_{k>n} (E - pole(k)) where u solves the recurrence with
  // u_{M+1} = 0, u_M = 1.
  double v_up = 0.0;  // v_{n+1}
  double v = 1.0;     // v_n
  double factor_up = pole_factor(tail_depth + 1);
  for (int n = tail_depth; n >= 1; --n) {
    const double factor = pole_factor(n);
    const double v_down = -(factor * factor_up * v_up + cleared_a(n, factor) * v) / rec.b(n);
    v_up = v;
    v = v_down;
    factor_up = factor;
    const double scale = std::max(std::abs(v), std::abs(v_up));
    if (scale > 0.0 && std::isfinite(scale)) {
      v /= scale;
      v_up /= scale;
    }
  }
  const double factor0 = pole_factor(0);
  return factor0 * factor_up * v_up + cleared_a(0, factor0) * v;
}

bool slope_limited_zero(const RecurrenceModel& rec, double energy, const SpectralOptions& opts) {
  const double fm = spectral_value_or_nan(rec, std::nextafter(energy, -kInf), opts);
  const double f0 = spectral_value_or_nan(rec, energy, opts);
  const double fp = spectral_value_or_nan(rec, std::nextafter(energy, kInf), opts);
  const double first = std::abs(fp - fm);
  return std::isfinite(first) && std::isfinite(f0) && negative(fm) != negative(fp) &&
         std::abs(fp - 2.0 * f0 + fm) <= 0.1 * first && std::abs(f0) <= first;
}

int default_tail_depth(const RecurrenceModel& rec, double e_max) {
  const ModelParams& m = rec.params();
  const double levels = std::max(0.0, (e_max - rec.first_pole()) / rec.pole_spacing());
  double ratio = 0.0;  // minimal/dominant scale ratio per step
  switch (m.kind) {
    case ModelKind::TwoPhoton: ratio = 4.0 * m.g * m.g / (m.omega * m.omega); break;
    case ModelKind::TwoMode: ratio = m.g * m.g / (m.omega * m.omega); break;
    case ModelKind::DrivenRabi: ratio = 0.0; break;
  }
  const double rate = ratio > 0.0 ? -std::log(ratio) : 10.0;
  const double depth = 256.0 + 4.0 * std::ceil(levels) + std::ceil(60.0 / rate);
  return static_cast<int>(std::min(depth, double{1 << 18}));
}

double default_grid_step(const ModelParams& model) {
  model.validate();
  const double r = bogoliubov_params(model).root_factor;
  const double spacing =
      model.kind == ModelKind::DrivenRabi ? model.omega : 2.0 * model.omega * r;
  return std::min(spacing, model.omega) / 40.0;
}

Window default_window(const ModelParams& model, const Sector& sector, double e_max) {
  const double p0 = pole_energies(model, sector, 0).front();
  const double lo =
      std::min(p0, -model.omega) - model.delta - std::abs(model.drive) - 1.0;
  return {lo, e_max};
}

namespace {

struct Node {
  double e = 0.0;
  double psi = 0.0;
  double f = kNaN;
};

class Scanner {
 public:
  Scanner(const RecurrenceModel& rec, const SpectralOptions& opts, int depth)
      : rec_(rec), opts_(opts), depth_(depth) {}

  Node eval(double e) const {
    return {e, secular_numerator(rec_, e, depth_), spectral_value_or_nan(rec_, e, opts_)};
  }

  // Looks for hidden sign changes inside (a, b) where the endpoints agree in
  // sign; recurses a few levels while |F| stays small.
  void probe(const Node& a, const Node& b, int level, ScanReport& report) const {
    constexpr int kParts = 16;
    std::vector<Node> nodes;
    nodes.reserve(kParts + 1);
    nodes.push_back(a);
    for (int i = 1; i < kParts; ++i) nodes.push_back(eval(a.e + (b.e - a.e) * i / kParts));
    nodes.push_back(b);
    ++report.stats.refined_intervals;

    bool found = false;
    for (int i = 0; i < kParts; ++i) {
      if (negative(nodes[i].psi) != negative(nodes[i + 1].psi)) {
        report.brackets.push_back(
            {nodes[i].e, nodes[i + 1].e, nodes[i].psi, nodes[i + 1].psi, depth_});
        found = true;
      }
    }
    if (found) return;

    // Interior minimum of |F|: either recurse or record a touching candidate.
    int best = -1;
    for (int i = 1; i < kParts; ++i) {
      const double f = std::abs(nodes[i].f);
      if (std::isfinite(f) && f <= std::abs(nodes[i - 1].f) && f <= std::abs(nodes[i + 1].f) &&
          (best < 0 || f < std::abs(nodes[best].f))) {
        best = i;
      }
    }
    if (best < 0 || !(std::abs(nodes[best].f) < opts_.refine_threshold)) return;
    if (level < 3) {
      probe(nodes[best - 1], nodes[best + 1], level + 1, report);
    } else if (std::abs(nodes[best].f) < opts_.residual_cap) {
      report.touch_candidates.push_back(nodes[best].e);
    }
  }

 private:
  const RecurrenceModel& rec_;
  const SpectralOptions& opts_;
  int depth_;
};

std::vector<double> grid_nodes(const RecurrenceModel& rec, Window w, double step, double guard) {
  std::vector<double> xs;
  const auto count = static_cast<long long>(std::floor((w.hi - w.lo) / step));
  for (long long i = 0; i <= count; ++i) xs.push_back(w.lo + static_cast<double>(i) * step);
  if (xs.empty() || w.hi - xs.back() > 1e-3 * step) xs.push_back(w.hi);
  if (rec.has_poles()) {
    for (double& x : xs) {
      const double k = std::max(0.0, std::round((x - rec.first_pole()) / rec.pole_spacing()));
      const double p = rec.pole(static_cast<int>(k));
      if (std::abs(x - p) < guard) {
        const bool below = x < p ? p - guard >= w.lo : p + guard > w.hi;
        x = below ? p - guard : p + guard;
      }
    }
  }
  std::erase_if(xs, [&](double x) { return x < w.lo || x > w.hi; });
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

ScanReport scan_spectrum(const ModelParams& model, const Sector& sector, Window window,
                         double grid_step, const SpectralOptions& opts) {
  if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || !(window.lo < window.hi)) {
    throw Error(ErrorCode::InvalidArgument, "window must satisfy E_min < E_max");
  }
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw Error(ErrorCode::InvalidArgument, "grid_step must be positive");
  }
  const RecurrenceModel rec(model, sector);
  const int depth = opts.tail_depth > 0 ? opts.tail_depth : default_tail_depth(rec, window.hi);
  const Scanner scanner(rec, opts, depth);

  const std::vector<double> xs = grid_nodes(rec, window, grid_step, pole_guard(model, opts));
  if (xs.size() < 2) throw Error(ErrorCode::EmptyWindow, "no valid grid points in window");

  std::vector<Node> nodes(xs.size());
  parallel_for(static_cast<int>(xs.size()), opts.threads,
               [&](int i) { nodes[static_cast<std::size_t>(i)] = scanner.eval(xs[i]); });

  ScanReport report;
  report.stats.step = grid_step;
  report.stats.points = static_cast<int>(nodes.size());
  report.stats.tail_depth = depth;

  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const Node& a = nodes[i];
    const Node& b = nodes[i + 1];
    const bool psi_flip = negative(a.psi) != negative(b.psi);
    const bool f_finite = std::isfinite(a.f) && std::isfinite(b.f);
    const bool f_flip = f_finite && negative(a.f) != negative(b.f);
    if (psi_flip) {
      report.brackets.push_back({a.e, b.e, a.psi, b.psi, depth});
      continue;
    }
    if (f_flip) ++report.stats.pole_crossings;
    bool pole_inside = false;
    if (rec.has_poles()) {
      const double k = std::ceil((a.e - rec.first_pole()) / rec.pole_spacing());
      pole_inside = rec.pole(static_cast<int>(std::max(0.0, k))) < b.e;
    }
    const bool small_f = (std::isfinite(a.f) && std::abs(a.f) < opts.refine_threshold) ||
                         (std::isfinite(b.f) && std::abs(b.f) < opts.refine_threshold);
    if (small_f || f_flip || pole_inside) scanner.probe(a, b, 0, report);
  }

  std::sort(report.brackets.begin(), report.brackets.end(),
            [](const Bracket& x, const Bracket& y) { return x.lo < y.lo; });
  std::sort(report.touch_candidates.begin(), report.touch_candidates.end());
  report.stats.brackets = static_cast<int>(report.brackets.size());
  return report;
}

std::vector<Bracket> scan_brackets(const ModelParams& model, const Sector& sector,
                                   Window window, double grid_step,
                                   const SpectralOptions& opts) {
  return scan_spectrum(model, sector, window, grid_step, opts).brackets;
}

RootRecord refine_root(const ModelParams& model, const Sector& sector, const Bracket& bracket,
                       double abs_tol, const SpectralOptions& opts) {
  if (!(abs_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "abs_tol must be positive");
  if (!(bracket.lo < bracket.hi)) throw Error(ErrorCode::InvalidArgument, "empty bracket");
  const RecurrenceModel rec(model, sector);
  const int depth = bracket.depth > 0 ? bracket.depth
                    : opts.tail_depth > 0 ? opts.tail_depth
                                          : default_tail_depth(rec, bracket.hi);
  auto f = [&](double e) { return secular_numerator(rec, e, depth); };

  RootRecord out;
  double a = bracket.lo;
  double b = bracket.hi;
  double fa = f(a);
  double fb = f(b);
  if (negative(fa) == negative(fb) || !std::isfinite(fa) || !std::isfinite(fb)) {
    out.sign_lost = true;
    out.energy = 0.5 * (a + b);
    out.width = b - a;
    out.residual = std::abs(spectral_value_or_nan(rec, out.energy, opts));
    if (!std::isfinite(out.residual)) out.residual = std::numeric_limits<double>::infinity();
    return out;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  int it = 0;
  for (; it < opts.max_refine_iterations; ++it) {
    if (negative(fb) == negative(fc)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * abs_tol;
    const double half = 0.5 * (c - b);
    if (std::abs(half) <= tol || fb == 0.0) break;

    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p = 0.0;
      double q = 0.0;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : std::copysign(tol, half);
    fb = f(b);
    if (!std::isfinite(fb)) {
      out.sign_lost = true;
      break;
    }
  }
  out.iterations = it;
  out.width = std::abs(c - b);
  if (fb == 0.0 || out.sign_lost) {
    out.energy = fb == 0.0 ? b : 0.5 * (b + c);
  } else {
    // F can be very steep next to a root (a continuant zero sits close by at
    // weak coupling), so bisect down to neighbouring doubles and report the
    // side with the smaller |F|.
    double lo = std::min(b, c);
    double hi = std::max(b, c);
    double f_lo = lo == b ? fb : fc;
    while (std::nextafter(lo, hi) < hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if (negative(fm) == negative(f_lo)) {
        lo = mid;
        f_lo = fm;
      } else {
        hi = mid;
      }
    }
    const double r_lo = std::abs(spectral_value_or_nan(rec, lo, opts));
    const double r_hi = hi == lo ? r_lo : std::abs(spectral_value_or_nan(rec, hi, opts));
    out.energy = !(r_hi < r_lo) ? lo : hi;
  }
  out.residual = std::abs(spectral_value_or_nan(rec, out.energy, opts));
  if (!std::isfinite(out.residual)) out.residual = std::numeric_limits<double>::infinity();
  if (!out.sign_lost && std::isfinite(out.residual) && out.residual > opts.residual_cap) {
    out.slope_limited = slope_limited_zero(rec, out.energy, opts);
  }
  return out;
}

SpectrumResult compute_spectrum(const ModelParams& model, const Sector& sector, Window window,
                                const SpectralOptions& opts_in) {
  SpectralOptions opts = opts_in;
  const RecurrenceModel rec(model, sector);
  SpectrumResult result;
  result.model = model;
  result.sector = sector;
  result.window = window;

  double step = opts.grid_step > 0.0 ? opts.grid_step : default_grid_step(model);
  const double root_factor = rec.bogoliubov().root_factor;
  if (model.kind != ModelKind::DrivenRabi && root_factor < 0.05) {
    step *= root_factor / 0.05;
    result.warnings.push_back("near spectral collapse (root factor " +
                              std::to_string(root_factor) + "); grid step tightened to " +
                              std::to_string(step));
  }
  if (opts.tail_depth <= 0) opts.tail_depth = default_tail_depth(rec, window.hi);

  const ScanReport scan = scan_spectrum(model, sector, window, step, opts);
  result.grid = scan.stats;

  const double exc = opts.exceptional_eps * model.omega;
  const double k_hi = std::floor((window.hi + exc - rec.first_pole()) / rec.pole_spacing());
  for (int k = 0; k <= static_cast<int>(k_hi); ++k) {
    const double p = rec.pole(k);
    if (p >= window.lo - exc && p <= window.hi + exc) result.poles.push_back(p);
  }
  auto nearest_pole = [&](double e) {
    const double k = std::max(0.0, std::round((e - rec.first_pole()) / rec.pole_spacing()));
    return rec.pole(static_cast<int>(k));
  };

  std::vector<RootRecord> refined(scan.brackets.size());
  parallel_for(static_cast<int>(scan.brackets.size()), opts.threads, [&](int i) {
    refined[static_cast<std::size_t>(i)] =
        refine_root(model, sector, scan.brackets[static_cast<std::size_t>(i)], opts.root_abs_tol,
                    opts);
  });

  for (const RootRecord& r : refined) {
    const double pole = nearest_pole(r.energy);
    FlaggedCandidate flag{r.energy, r.residual, pole, FlaggedCandidate::Reason::NearPole};
    if (rec.has_poles() && std::abs(r.energy - pole) <= exc) {
      result.flagged.push_back(flag);
    } else if (r.sign_lost) {
      flag.reason = FlaggedCandidate::Reason::SignLost;
      result.flagged.push_back(flag);
    } else if (!(r.residual <= opts.residual_cap) && !r.slope_limited) {
      flag.reason = FlaggedCandidate::Reason::ResidualExceeded;
      result.flagged.push_back(flag);
    } else {
      if (r.slope_limited) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "root %.17g kept with |F| = %.3g: F changes sign between neighbouring doubles",
                      r.energy, r.residual);
        result.warnings.emplace_back(buf);
      }
      result.roots.push_back(r);
    }
  }
  for (double e : scan.touch_candidates) {
    result.flagged.push_back({e, std::abs(spectral_value_or_nan(rec, e, opts)), nearest_pole(e),
                              FlaggedCandidate::Reason::Touching});
  }

  std::sort(result.roots.begin(), result.roots.end(),
            [](const RootRecord& x, const RootRecord& y) { return x.energy < y.energy; });
  // Adjacent probe sub-intervals can share an endpoint root.
  const double merge = 10.0 * opts.root_abs_tol + 1e-14 * model.omega;
  result.roots.erase(std::unique(result.roots.begin(), result.roots.end(),
                                 [&](const RootRecord& x, const RootRecord& y) {
                                   return std::abs(x.energy - y.energy) <= merge;
                                 }),
                     result.roots.end());
  std::sort(result.flagged.begin(), result.flagged.end(),
            [](const FlaggedCandidate& x, const FlaggedCandidate& y) {
              return x.energy < y.energy;
            });
  return result;
}

}  // namespace rabi
