#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cuberisk/concepts.hpp"
#include "cuberisk/point.hpp"
#include "cuberisk/rng.hpp"

namespace cuberisk {

class Distribution;

struct Uniform {
  unsigned n;
};

struct Product {
  std::vector<double> p;  // per-bit probability of drawing 1
};

// Dense pmf indexed by lexicographic point rank; cdf kept alongside for
// inverse-CDF sampling.
struct TableDist {
  unsigned n;
  std::vector<double> pmf;
  std::vector<double> cdf;
};

// Positions inside one group are forced bitwise-equal; the group is all-ones
// with probability `bias`. Remaining positions are independent bits.
struct CoupledGroup {
  std::vector<unsigned> positions;
  double bias;
};

struct Coupled {
  unsigned n;
  std::vector<CoupledGroup> groups;
  std::vector<unsigned> free_positions;  // ascending
  std::vector<double> free_bias;         // aligned with free_positions
};

// Pushforward of `base` through z = phi_k(x, concept(x)).
struct Induced {
  std::shared_ptr<const Distribution> base;
  std::shared_ptr<const Concept> concept_fn;
  unsigned k;
};

class Distribution {
 public:
  using Node = std::variant<Uniform, Product, TableDist, Coupled, Induced>;

  static Distribution uniform(unsigned n) {
    check_n(n);
    return Distribution(n, Uniform{n});
  }

  static Distribution product(std::vector<double> p) {
    check_n(static_cast<unsigned>(p.size()));
    for (double v : p)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("product bias outside [0,1]");
    const unsigned n = static_cast<unsigned>(p.size());
    return Distribution(n, Product{std::move(p)});
  }

  static Distribution product(unsigned n, double p) {
    return product(std::vector<double>(n, p));
  }

  static Distribution table(unsigned n, std::vector<double> pmf) {
    if (n == 0 || n > 24) throw std::invalid_argument("table distribution requires 1 <= n <= 24");
    if (pmf.size() != (std::size_t{1} << n)) throw std::invalid_argument("table pmf has wrong size");
    double sum = 0.0;
    for (double v : pmf) {
      if (v < 0.0) throw std::invalid_argument("table pmf has negative mass");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("table pmf does not sum to 1");
    TableDist t{n, std::move(pmf), {}};
    t.cdf.resize(t.pmf.size());
    std::partial_sum(t.pmf.begin(), t.pmf.end(), t.cdf.begin());
    t.cdf.back() = 1.0;
    return Distribution(n, std::move(t));
  }

  static Distribution coupled(unsigned n, std::vector<CoupledGroup> groups, std::vector<double> free_bias) {
    check_n(n);
    std::vector<bool> taken(n, false);
    for (const auto& g : groups) {
      if (g.positions.empty()) throw std::invalid_argument("coupled group is empty");
      if (!(g.bias >= 0.0 && g.bias <= 1.0)) throw std::invalid_argument("coupled bias outside [0,1]");
      for (unsigned i : g.positions) {
        if (i >= n) throw std::invalid_argument("coupled position past dimension");
        if (taken[i]) throw std::invalid_argument("coupled groups overlap");
        taken[i] = true;
      }
    }
    Coupled c{n, std::move(groups), {}, {}};
    for (unsigned i = 0; i < n; ++i)
      if (!taken[i]) c.free_positions.push_back(i);
    if (free_bias.size() == 1 && c.free_positions.size() != 1) {
      c.free_bias.assign(c.free_positions.size(), free_bias[0]);
    } else if (free_bias.size() == c.free_positions.size()) {
      c.free_bias = std::move(free_bias);
    } else {
      throw std::invalid_argument("coupled free_bias size mismatch");
    }
    for (double v : c.free_bias)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("coupled bias outside [0,1]");
    return Distribution(n, std::move(c));
  }

  static Distribution induced(Distribution base, Concept concept_fn, unsigned k) {
    if (concept_fn.dim() != base.dim()) throw std::invalid_argument("induced: concept/base dimension mismatch");
    const unsigned dim = (2 * k + 1) * base.dim() + 1;
    check_n(dim);
    return Distribution(dim, Induced{std::make_shared<Distribution>(std::move(base)),
                                     std::make_shared<Concept>(std::move(concept_fn)), k});
  }

  unsigned dim() const { return dim_; }
  const Node& node() const { return node_; }

  double pmf(const Point& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("pmf: dimension mismatch");
    return std::visit(
        [&](const auto& node) -> double {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            return std::ldexp(1.0, -static_cast<int>(node.n));
          } else if constexpr (std::is_same_v<T, Product>) {
            double m = 1.0;
            for (unsigned i = 0; i < node.p.size(); ++i) m *= x.get(i) ? node.p[i] : 1.0 - node.p[i];
            return m;
          } else if constexpr (std::is_same_v<T, TableDist>) {
            return node.pmf[point_to_index(x)];
          } else if constexpr (std::is_same_v<T, Coupled>) {
            double m = 1.0;
            for (const auto& g : node.groups) {
              const bool b = x.get(g.positions.front());
              for (unsigned i : g.positions)
                if (x.get(i) != b) return 0.0;
              m *= b ? g.bias : 1.0 - g.bias;
            }
            for (std::size_t j = 0; j < node.free_positions.size(); ++j)
              m *= x.get(node.free_positions[j]) ? node.free_bias[j] : 1.0 - node.free_bias[j];
            return m;
          } else {
            const unsigned n = node.base->dim();
            const unsigned block = 2 * node.k + 1;
            Point base_x(n);
            for (unsigned i = 0; i < n; ++i) {
              const bool b = x.get(i * block);
              for (unsigned j = 1; j < block; ++j)
                if (x.get(i * block + j) != b) return 0.0;
              if (b) base_x.set(i, true);
            }
            if (x.get(x.dim() - 1) != evaluate(*node.concept_fn, base_x)) return 0.0;
            return node.base->pmf(base_x);
          }
        },
        node_);
  }

  Point sample(Rng& rng) const {
    return std::visit(
        [&](const auto& node) -> Point {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            Point x(node.n);
            auto w = x.words();
            for (auto& word : w) word = rng.next_u64();
            const unsigned tail = node.n & 63;
            if (tail != 0) w.back() &= (1ULL << tail) - 1;
            return x;
          } else if constexpr (std::is_same_v<T, Product>) {
            Point x(static_cast<unsigned>(node.p.size()));
            for (unsigned i = 0; i < node.p.size(); ++i)
              if (rng.bernoulli(node.p[i])) x.set(i, true);
            return x;
          } else if constexpr (std::is_same_v<T, TableDist>) {
            const double u = rng.next_unit();
            const auto it = std::upper_bound(node.cdf.begin(), node.cdf.end(), u);
            const std::size_t idx = std::min<std::size_t>(it - node.cdf.begin(), node.cdf.size() - 1);
            return index_to_point(idx, node.n);
          } else if constexpr (std::is_same_v<T, Coupled>) {
            Point x(node.n);
            for (const auto& g : node.groups) {
              if (rng.bernoulli(g.bias))
                for (unsigned i : g.positions) x.set(i, true);
            }
            for (std::size_t j = 0; j < node.free_positions.size(); ++j)
              if (rng.bernoulli(node.free_bias[j])) x.set(node.free_positions[j], true);
            return x;
          } else {
            const Point base_x = node.base->sample(rng);
            return phi_encode(base_x, evaluate(*node.concept_fn, base_x), node.k);
          }
        },
        node_);
  }

 private:
  static void check_n(unsigned n) {
    if (n == 0 || n > kMaxDim) throw std::invalid_argument("distribution dimension out of range");
  }

  Distribution(unsigned dim, Node node) : dim_(dim), node_(std::move(node)) {}

  unsigned dim_;
  Node node_;
};

// True when exact risk evaluation can walk the support directly.
inline bool is_exactly_enumerable(const Distribution& d) {
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TableDist>) {
          return true;
        } else if constexpr (std::is_same_v<T, Induced>) {
          return is_exactly_enumerable(*node.base);
        } else {
          return d.dim() <= 20;
        }
      },
      d.node());
}

// Visits every support point with its mass. The walk is the source of truth
// for exact risk sums; order is deterministic (lexicographic, or the base
// distribution's order for induced distributions).
template <class Fn>
void for_each_support(const Distribution& d, Fn&& fn) {
  std::visit(
      [&](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, TableDist>) {
          for (std::size_t i = 0; i < node.pmf.size(); ++i)
            if (node.pmf[i] > 0.0) fn(index_to_point(i, node.n), node.pmf[i]);
        } else if constexpr (std::is_same_v<T, Induced>) {
          for_each_support(*node.base, [&](const Point& x, double p) {
            fn(phi_encode(x, evaluate(*node.concept_fn, x), node.k), p);
          });
        } else {
          if (d.dim() > 20) throw std::invalid_argument("distribution support too large to enumerate");
          const std::size_t total = std::size_t{1} << d.dim();
          for (std::size_t i = 0; i < total; ++i) {
            const Point x = index_to_point(i, d.dim());
            const double p = d.pmf(x);
            if (p > 0.0) fn(x, p);
          }
        }
      },
      d.node());
}

// Dense pmf vector indexed by lexicographic rank; n <= 24.
inline std::vector<double> dense_pmf(const Distribution& d) {
  if (d.dim() > 24) throw std::invalid_argument("dense_pmf: dimension too large");
  std::vector<double> out(std::size_t{1} << d.dim(), 0.0);
  if (const auto* t = std::get_if<TableDist>(&d.node())) return t->pmf;
  const std::size_t total = out.size();
  for (std::size_t i = 0; i < total; ++i) out[i] = d.pmf(index_to_point(i, d.dim()));
  return out;
}

// Checks |log D(x) - log D(x')| <= log(alpha) over every hypercube edge.
// Product distributions are checked by the closed-form edge ratio; anything
// else is scanned densely (n <= 24). Zero mass anywhere fails the check.
inline bool verify_log_lipschitz(const Distribution& d, double alpha, std::string* reason = nullptr) {
  if (!(alpha >= 1.0)) throw std::invalid_argument("log-Lipschitz constant must be >= 1");
  const auto fail = [&](const char* why) {
    if (reason) *reason = why;
    return false;
  };
  constexpr double kRelTol = 1e-9;
  if (std::holds_alternative<Uniform>(d.node())) return true;
  if (const auto* pr = std::get_if<Product>(&d.node())) {
    for (double p : pr->p) {
      if (!(p > 0.0 && p < 1.0)) return fail("not log-Lipschitz (zero mass)");
      const double ratio = std::max(p / (1.0 - p), (1.0 - p) / p);
      if (ratio > alpha * (1.0 + kRelTol)) return fail("edge ratio exceeds alpha");
    }
    return true;
  }
  if (d.dim() > 24) throw std::invalid_argument("verify_log_lipschitz: dimension too large for dense scan");
  const std::vector<double> pmf = dense_pmf(d);
  const unsigned n = d.dim();
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) return fail("not log-Lipschitz (zero mass)");
    for (unsigned b = 0; b < n; ++b) {
      const std::size_t j = i ^ (std::size_t{1} << b);
      if (j < i) continue;
      if (pmf[j] <= 0.0) return fail("not log-Lipschitz (zero mass)");
      const double hi = std::max(pmf[i], pmf[j]);
      const double lo = std::min(pmf[i], pmf[j]);
      if (hi > alpha * lo * (1.0 + kRelTol)) return fail("edge ratio exceeds alpha");
    }
  }
  return true;
}

namespace detail {
inline std::vector<unsigned> checked_positions(std::vector<unsigned> s, unsigned n) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (!s.empty() && s.back() >= n) throw std::invalid_argument("position past dimension");
  return s;
}
}  // namespace detail

// D_{S-bar}(y) = sum over assignments to S of D(y y'); the remaining
// positions keep their relative order.
inline Distribution marginal(const Distribution& d, std::vector<unsigned> s) {
  const unsigned n = d.dim();
  if (n > 24) throw std::invalid_argument("marginal: dimension too large");
  s = detail::checked_positions(std::move(s), n);
  if (s.size() >= n) throw std::invalid_argument("marginal: no positions left");
  std::vector<unsigned> kept;
  for (unsigned i = 0, j = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
    } else {
      kept.push_back(i);
    }
  }
  const unsigned m = static_cast<unsigned>(kept.size());
  std::vector<double> out(std::size_t{1} << m, 0.0);
  const std::vector<double> pmf = dense_pmf(d);
  for (std::size_t idx = 0; idx < pmf.size(); ++idx) {
    if (pmf[idx] == 0.0) continue;
    std::size_t out_idx = 0;
    for (unsigned pos : kept) out_idx = (out_idx << 1) | ((idx >> (n - 1 - pos)) & 1u);
    out[out_idx] += pmf[idx];
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;  // renormalize away float drift
  return Distribution::table(m, std::move(out));
}

// Conditions on a predicate of the bits at positions S (passed the
// assignment restricted to S, ascending), then marginalizes S out.
inline Distribution conditional(const Distribution& d, std::vector<unsigned> s,
                                const std::function<bool(const Point&)>& predicate) {
  const unsigned n = d.dim();
  if (n > 24) throw std::invalid_argument("conditional: dimension too large");
  s = detail::checked_positions(std::move(s), n);
  if (s.empty()) throw std::invalid_argument("conditional: empty position set");
  if (s.size() >= n) throw std::invalid_argument("conditional: no positions left");
  std::vector<unsigned> kept;
  for (unsigned i = 0, j = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
    } else {
      kept.push_back(i);
    }
  }
  const unsigned m = static_cast<unsigned>(kept.size());
  std::vector<double> out(std::size_t{1} << m, 0.0);
  const std::vector<double> pmf = dense_pmf(d);
  double total = 0.0;
  for (std::size_t idx = 0; idx < pmf.size(); ++idx) {
    if (pmf[idx] == 0.0) continue;
    Point sub(static_cast<unsigned>(s.size()));
    for (std::size_t j = 0; j < s.size(); ++j)
      if ((idx >> (n - 1 - s[j])) & 1u) sub.set(static_cast<unsigned>(j), true);
    if (!predicate(sub)) continue;
    std::size_t out_idx = 0;
    for (unsigned pos : kept) out_idx = (out_idx << 1) | ((idx >> (n - 1 - pos)) & 1u);
    out[out_idx] += pmf[idx];
    total += pmf[idx];
  }
  if (total <= 0.0) throw std::domain_error("conditional: event has zero mass");
  for (double& v : out) v /= total;
  double renorm = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= renorm;
  return Distribution::table(m, std::move(out));
}

struct HidingInstance {
  Distribution dist;
  Point witness;                      // z: the pair agrees here, one flip in bias_set breaks it
  std::vector<unsigned> bias_set;     // I = union of the pair's relevant variables
};

// Product distribution drawn toward a boundary point of a non-trivial pair:
// Pr[x_i = z_i] = 1 - eta on I, 1/2 elsewhere. The witness search is
// exhaustive, lexicographic-first.
inline HidingInstance build_hiding_distribution(const Concept& c1, const Concept& c2, double eta) {
  if (c1.dim() != c2.dim()) throw std::invalid_argument("hiding distribution: dimension mismatch");
  const unsigned n = c1.dim();
  if (n > 24) throw std::invalid_argument("hiding distribution: dimension too large for witness search");
  if (!(eta >= 0.0 && eta <= 0.5)) throw std::invalid_argument("hiding bias must lie in [0, 1/2]");
  std::vector<unsigned> bias_set = relevant_vars(c1);
  for (unsigned v : relevant_vars(c2)) bias_set.push_back(v);
  bias_set = detail::checked_positions(std::move(bias_set), n);

  const std::size_t total = std::size_t{1} << n;
  for (std::size_t i = 0; i < total; ++i) {
    const Point z = index_to_point(i, n);
    if (evaluate(c1, z) != evaluate(c2, z)) continue;
    for (unsigned j : bias_set) {
      const Point zp = flip(z, {j});
      if (evaluate(c1, zp) != evaluate(c2, zp)) {
        std::vector<double> p(n, 0.5);
        for (unsigned b : bias_set) p[b] = z.get(b) ? 1.0 - eta : eta;
        return HidingInstance{Distribution::product(std::move(p)), z, bias_set};
      }
    }
  }
  throw std::invalid_argument("hiding distribution: concept pair is trivial (no witness)");
}

}  // namespace cuberisk
