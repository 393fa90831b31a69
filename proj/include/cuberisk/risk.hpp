#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "cuberisk/adversary.hpp"
#include "cuberisk/distribution.hpp"
#include "cuberisk/parallel.hpp"
#include "cuberisk/rng.hpp"

namespace cuberisk {

enum class RiskMethod { exact, monte_carlo };
enum class RiskKind { exact_in_ball, constant_in_ball };

struct RiskEstimate {
  double value = 0.0;
  RiskMethod method = RiskMethod::exact;
  std::uint64_t samples_used = 0;
  double confidence_radius = 0.0;  // two-sided Hoeffding; 0 for exact
  std::uint64_t seed = 0;
};

struct ExactMode {};

struct McMode {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  double confidence = 0.99;
  unsigned workers = 1;
};

using RiskMode = std::variant<ExactMode, McMode>;

// Two-sided Hoeffding radius: sqrt(ln(2/gamma) / 2m) at confidence 1-gamma.
inline double hoeffding_radius(std::uint64_t samples, double confidence) {
  if (samples == 0) throw std::invalid_argument("hoeffding_radius: no samples");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0,1)");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

// Pr_{x~D}[pred(x)], either by walking the support or by seeded Monte Carlo.
// MC draws are chunked with per-chunk derived seeds, so the estimate is
// independent of the worker count.
template <class Pred>
RiskEstimate probability_of(const Distribution& d, const RiskMode& mode, Pred&& pred) {
  if (std::holds_alternative<ExactMode>(mode)) {
    if (!is_exactly_enumerable(d)) throw std::invalid_argument("exact risk requires an enumerable support");
    double mass = 0.0;
    for_each_support(d, [&](const Point& x, double p) {
      if (pred(x)) mass += p;
    });
    return RiskEstimate{std::min(mass, 1.0), RiskMethod::exact, 0, 0.0, 0};
  }
  const auto& mc = std::get<McMode>(mode);
  if (mc.samples == 0) throw std::invalid_argument("monte carlo risk requires samples > 0");
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t chunks = (mc.samples + kChunk - 1) / kChunk;
  const auto counts = run_indexed<std::uint64_t>(chunks, mc.workers, [&](std::uint64_t chunk) {
    Rng rng(derive_seed(mc.seed, chunk));
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min(begin + kChunk, mc.samples);
    std::uint64_t hits = 0;
    for (std::uint64_t i = begin; i < end; ++i)
      if (pred(d.sample(rng))) ++hits;
    return hits;
  });
  std::uint64_t hits = 0;
  for (std::uint64_t c : counts) hits += c;
  return RiskEstimate{static_cast<double>(hits) / static_cast<double>(mc.samples), RiskMethod::monte_carlo,
                      mc.samples, hoeffding_radius(mc.samples, mc.confidence), mc.seed};
}

// R^E_rho(h, c) = Pr_{x~D}[exists z in B_rho(x) with h(z) != c(z)].
template <class H, class C>
RiskEstimate exact_in_ball_risk(const H& h, const C& c, const Distribution& d, unsigned rho,
                                const RiskMode& mode = ExactMode{}, const AdversaryLimits& lim = {}) {
  if (rho > d.dim()) throw std::invalid_argument("perturbation budget exceeds dimension");
  return probability_of(d, mode, [&](const Point& x) { return min_flips_disagreement(h, c, x, rho, lim).has_value(); });
}

// R^C_rho(h, c) = Pr_{x~D}[exists z in B_rho(x) with h(z) != c(x)].
template <class H, class C>
RiskEstimate constant_in_ball_risk(const H& h, const C& c, const Distribution& d, unsigned rho,
                                   const RiskMode& mode = ExactMode{}, const AdversaryLimits& lim = {}) {
  if (rho > d.dim()) throw std::invalid_argument("perturbation budget exceeds dimension");
  return probability_of(d, mode,
                        [&](const Point& x) { return min_flips_label_change(h, c(x), x, rho, lim).has_value(); });
}

// Standard risk Pr[h(x) != c(x)]; identical to either robust risk at rho=0.
template <class H, class C>
RiskEstimate disagreement_risk(const H& h, const C& c, const Distribution& d, const RiskMode& mode = ExactMode{}) {
  return exact_in_ball_risk(h, c, d, 0, mode);
}

template <class H, class C>
RiskEstimate robust_risk(RiskKind kind, const H& h, const C& c, const Distribution& d, unsigned rho,
                         const RiskMode& mode = ExactMode{}, const AdversaryLimits& lim = {}) {
  return kind == RiskKind::exact_in_ball ? exact_in_ball_risk(h, c, d, rho, mode, lim)
                                         : constant_in_ball_risk(h, c, d, rho, mode, lim);
}

// Risk for every budget 0..rho_max from a single min-flips pass per point.
template <class H, class C>
std::vector<RiskEstimate> risk_curve(RiskKind kind, const H& h, const C& c, const Distribution& d, unsigned rho_max,
                                     const RiskMode& mode = ExactMode{}, const AdversaryLimits& lim = {}) {
  if (rho_max > d.dim()) throw std::invalid_argument("perturbation budget exceeds dimension");
  const auto min_flips = [&](const Point& x) -> std::optional<unsigned> {
    if (kind == RiskKind::exact_in_ball) {
      const auto r = min_flips_disagreement(h, c, x, rho_max, lim);
      return r ? std::optional<unsigned>(r->first) : std::nullopt;
    }
    const auto r = min_flips_label_change(h, c(x), x, rho_max, lim);
    return r ? std::optional<unsigned>(r->first) : std::nullopt;
  };
  std::vector<double> bucket(rho_max + 1, 0.0);
  std::uint64_t samples = 0;
  double radius = 0.0;
  std::uint64_t seed = 0;
  RiskMethod method = RiskMethod::exact;
  if (std::holds_alternative<ExactMode>(mode)) {
    if (!is_exactly_enumerable(d)) throw std::invalid_argument("exact risk requires an enumerable support");
    for_each_support(d, [&](const Point& x, double p) {
      if (const auto m = min_flips(x)) bucket[*m] += p;
    });
  } else {
    const auto& mc = std::get<McMode>(mode);
    method = RiskMethod::monte_carlo;
    samples = mc.samples;
    seed = mc.seed;
    radius = hoeffding_radius(mc.samples, mc.confidence);
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (mc.samples + kChunk - 1) / kChunk;
    const auto partials = run_indexed<std::vector<std::uint64_t>>(chunks, mc.workers, [&](std::uint64_t chunk) {
      Rng rng(derive_seed(mc.seed, chunk));
      std::vector<std::uint64_t> counts(rho_max + 1, 0);
      const std::uint64_t begin = chunk * kChunk;
      const std::uint64_t end = std::min(begin + kChunk, mc.samples);
      for (std::uint64_t i = begin; i < end; ++i)
        if (const auto m = min_flips(d.sample(rng))) ++counts[*m];
      return counts;
    });
    for (const auto& counts : partials)
      for (unsigned r = 0; r <= rho_max; ++r) bucket[r] += static_cast<double>(counts[r]) / static_cast<double>(samples);
  }
  std::vector<RiskEstimate> curve(rho_max + 1);
  double acc = 0.0;
  for (unsigned r = 0; r <= rho_max; ++r) {
    acc += bucket[r];
    curve[r] = RiskEstimate{std::min(acc, 1.0), method, samples, radius, seed};
  }
  return curve;
}

namespace detail {

// Mass of every radius-rho ball, by the exact shell recurrence
//   sum_i f_d(x ^ e_i) = (d+1) f_{d+1}(x) + (n-d+1) f_{d-1}(x),
// where f_d is the mass at distance exactly d. O(rho * n * 2^n).
inline std::vector<double> all_ball_masses(const std::vector<double>& pmf, unsigned n, unsigned rho) {
  const std::size_t size = pmf.size();
  std::vector<double> prev;                // f_{d-1}
  std::vector<double> cur = pmf;           // f_d
  std::vector<double> ball = pmf;          // running sum of shells
  for (unsigned d = 0; d + 1 <= rho; ++d) {
    std::vector<double> next(size, 0.0);
    for (std::size_t x = 0; x < size; ++x) {
      double g = 0.0;
      for (unsigned b = 0; b < n; ++b) g += cur[x ^ (std::size_t{1} << b)];
      if (d >= 1) g -= static_cast<double>(n - d + 1) * prev[x];
      next[x] = std::max(g / static_cast<double>(d + 1), 0.0);
    }
    for (std::size_t x = 0; x < size; ++x) ball[x] += next[x];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return ball;
}

// Exact positivity of the ball mass (boolean smearing, no float error).
inline std::vector<char> ball_positive(const std::vector<double>& pmf, unsigned n, unsigned rho) {
  std::vector<char> reach(pmf.size());
  for (std::size_t x = 0; x < pmf.size(); ++x) reach[x] = pmf[x] > 0.0 ? 1 : 0;
  for (unsigned d = 0; d < rho; ++d) {
    std::vector<char> next = reach;
    for (std::size_t x = 0; x < pmf.size(); ++x) {
      if (next[x]) continue;
      for (unsigned b = 0; b < n; ++b) {
        if (reach[x ^ (std::size_t{1} << b)]) {
          next[x] = 1;
          break;
        }
      }
    }
    reach = std::move(next);
  }
  return reach;
}

}  // namespace detail

// min over x with mu(B_rho(x)) > 0 of mu(B_rho(x)).
inline double min_ball_mass(const Distribution& d, unsigned rho) {
  if (d.dim() > 20) throw std::invalid_argument("min_ball_mass: dimension too large");
  if (rho > d.dim()) throw std::invalid_argument("min_ball_mass: radius exceeds dimension");
  const std::vector<double> pmf = dense_pmf(d);
  const auto ball = detail::all_ball_masses(pmf, d.dim(), rho);
  const auto positive = detail::ball_positive(pmf, d.dim(), rho);
  double best = 2.0;
  for (std::size_t x = 0; x < ball.size(); ++x)
    if (positive[x]) best = std::min(best, ball[x]);
  if (best > 1.5) throw std::invalid_argument("min_ball_mass: distribution has no mass");
  return std::min(best, 1.0);
}

// Instance check of the risk-threshold propositions: a robust risk below the
// instance's threshold forces h and c to agree wherever the distribution can
// see. For the exact-in-the-ball risk the threshold is the least positive
// ball mass and agreement is required at every point whose ball carries
// mass; for the constant-in-the-ball risk the threshold is the least atom
// mass and agreement is required on the support.
template <class H, class C>
bool robust_to_zero_risk_check(const H& h, const C& c, const Distribution& d, unsigned rho,
                               RiskKind kind = RiskKind::exact_in_ball, const AdversaryLimits& lim = {}) {
  if (d.dim() > 20) throw std::invalid_argument("robust_to_zero_risk_check: dimension too large");
  const double risk = robust_risk(kind, h, c, d, rho, ExactMode{}, lim).value;
  double eps = 0.0;
  std::vector<std::size_t> must_agree;
  const std::vector<double> pmf = dense_pmf(d);
  if (kind == RiskKind::exact_in_ball) {
    eps = min_ball_mass(d, rho);
    const auto positive = detail::ball_positive(pmf, d.dim(), rho);
    for (std::size_t i = 0; i < pmf.size(); ++i)
      if (positive[i]) must_agree.push_back(i);
  } else {
    eps = 2.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      if (pmf[i] > 0.0) {
        eps = std::min(eps, pmf[i]);
        must_agree.push_back(i);
      }
    }
  }
  if (risk >= eps) return true;  // implication is vacuous
  for (std::size_t i : must_agree) {
    const Point x = index_to_point(i, d.dim());
    if (h(x) != c(x)) return false;
  }
  return true;
}

}  // namespace cuberisk
