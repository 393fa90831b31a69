#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cuberisk/concepts.hpp"
#include "cuberisk/point.hpp"

namespace cuberisk {

// Raised when a brute-force ball walk would exceed the enumeration budget
// and no closed form applies.
struct IntractableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdversaryLimits {
  std::uint64_t max_enumeration = 100'000'000;
};

struct AttackResult {
  bool feasible = false;
  std::optional<unsigned> min_flips;  // engaged iff feasible; nullopt reads as "infinite"
  std::optional<Point> witness;
};

namespace detail {

using Words = std::vector<std::uint64_t>;

inline Words make_mask(const std::vector<unsigned>& vars, unsigned dim) {
  Words w((dim + 63) / 64, 0);
  for (unsigned i : vars) {
    if (i >= dim) throw std::invalid_argument("conjunction variable past dimension");
    w[i >> 6] |= 1ULL << (i & 63);
  }
  return w;
}

inline unsigned count_in_mask_not_set(const Words& mask, const Point& x) {
  unsigned c = 0;
  const auto xs = x.words();
  for (std::size_t i = 0; i < mask.size(); ++i)
    c += static_cast<unsigned>(std::popcount(mask[i] & ~xs[i]));
  return c;
}

inline bool mask_empty(const Words& m) {
  for (auto w : m)
    if (w) return false;
  return true;
}

inline int lowest_bit(const Words& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i]) return static_cast<int>(i * 64 + std::countr_zero(m[i]));
  return -1;
}

}  // namespace detail

// Precomputed masks for a pair of monotone conjunctions over the same
// dimension; answers minimum-perturbation queries in O(dim/64).
class ConjPair {
 public:
  ConjPair(const std::vector<unsigned>& vars1, const std::vector<unsigned>& vars2, unsigned dim)
      : dim_(dim), a_(detail::make_mask(vars1, dim)), b_(detail::make_mask(vars2, dim)) {}

  // Minimum d such that some z at Hamming distance d from x separates the
  // pair; nullopt when the conjunctions are identical. The cost of forcing
  // c_a true and c_b false is (#zeros of x on I_a) plus one extra flip when
  // every bit of I_b \ I_a is set in x; infeasible when I_b is contained in
  // I_a.
  std::optional<unsigned> min_flips(const Point& x) const {
    check(x);
    const auto cost = [&](const detail::Words& ma, const detail::Words& mb) -> std::optional<unsigned> {
      unsigned flips = detail::count_in_mask_not_set(ma, x);
      bool diff_nonempty = false, diff_has_zero = false;
      const auto xs = x.words();
      for (std::size_t i = 0; i < ma.size(); ++i) {
        const std::uint64_t diff = mb[i] & ~ma[i];
        if (diff) diff_nonempty = true;
        if (diff & ~xs[i]) diff_has_zero = true;
      }
      if (!diff_nonempty) return std::nullopt;
      if (!diff_has_zero) flips += 1;
      return flips;
    };
    const auto c1 = cost(a_, b_), c2 = cost(b_, a_);
    if (!c1) return c2;
    if (!c2) return c1;
    return std::min(*c1, *c2);
  }

  // Same minimum together with a point achieving it.
  std::optional<std::pair<unsigned, Point>> min_flips_with_witness(const Point& x) const {
    check(x);
    std::optional<std::pair<unsigned, Point>> best;
    const auto consider = [&](const detail::Words& ma, const detail::Words& mb) {
      const auto xs = x.words();
      unsigned flips = detail::count_in_mask_not_set(ma, x);
      detail::Words diff(ma.size()), diff_zero(ma.size());
      bool diff_nonempty = false, diff_has_zero = false;
      for (std::size_t i = 0; i < ma.size(); ++i) {
        diff[i] = mb[i] & ~ma[i];
        diff_zero[i] = diff[i] & ~xs[i];
        if (diff[i]) diff_nonempty = true;
        if (diff_zero[i]) diff_has_zero = true;
      }
      if (!diff_nonempty) return;
      Point z = x;
      auto zw = z.words();
      for (std::size_t i = 0; i < ma.size(); ++i) zw[i] |= ma[i];
      if (!diff_has_zero) {
        flips += 1;
        z.set(static_cast<unsigned>(detail::lowest_bit(diff)), false);
      }
      if (!best || flips < best->first) best = {flips, std::move(z)};
    };
    consider(a_, b_);
    consider(b_, a_);
    return best;
  }

 private:
  void check(const Point& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("conjunction pair query: dimension mismatch");
  }

  unsigned dim_;
  detail::Words a_, b_;
};

// #zeros of x on the conjunction's variable set: the exact cost of reaching
// a satisfying assignment.
inline unsigned min_flips_to_satisfy(const Concept& c, const Point& x) {
  const auto vars = as_conjunction_vars(c);
  if (!vars) throw std::invalid_argument("min_flips_to_satisfy requires a monotone conjunction");
  if (x.dim() != c.dim()) throw std::invalid_argument("min_flips_to_satisfy: dimension mismatch");
  unsigned zeros = 0;
  for (unsigned i : *vars) zeros += x.get(i) ? 0 : 1;
  return zeros;
}

inline std::optional<unsigned> min_flips_conj_pair(const Concept& c1, const Concept& c2, const Point& x) {
  const auto v1 = as_conjunction_vars(c1), v2 = as_conjunction_vars(c2);
  if (!v1 || !v2) throw std::invalid_argument("min_flips_conj_pair requires monotone conjunctions");
  if (c1.dim() != c2.dim()) throw std::invalid_argument("min_flips_conj_pair: dimension mismatch");
  return ConjPair(*v1, *v2, c1.dim()).min_flips(x);
}

namespace detail {

inline void check_budget(unsigned n, unsigned rho, const AdversaryLimits& lim) {
  if (ball_size(n, rho) > lim.max_enumeration)
    throw IntractableError("ball enumeration over budget and no fast path applies");
}

// First witness in canonical ball order for an arbitrary point predicate.
template <class Pred>
std::optional<std::pair<unsigned, Point>> brute_ball_search(const Point& x, unsigned rho, const AdversaryLimits& lim,
                                                            Pred&& pred) {
  check_budget(x.dim(), rho, lim);
  std::optional<std::pair<unsigned, Point>> found;
  for_each_in_ball(BallSpec(x, rho), [&](const Point& z, unsigned d) {
    if (pred(z)) {
      found = {d, z};
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace detail

// Minimum flips (up to cap) to reach a point where h and c disagree, plus a
// witness. Generic callables are handled by ball enumeration.
template <class H, class C>
std::optional<std::pair<unsigned, Point>> min_flips_disagreement(const H& h, const C& c, const Point& x, unsigned cap,
                                                                 const AdversaryLimits& lim = {}) {
  return detail::brute_ball_search(x, cap, lim, [&](const Point& z) { return h(z) != c(z); });
}

inline std::optional<std::pair<unsigned, Point>> min_flips_disagreement(const Concept& h, const Concept& c,
                                                                        const Point& x, unsigned cap,
                                                                        const AdversaryLimits& lim = {}) {
  if (h.dim() != c.dim() || x.dim() != h.dim()) throw std::invalid_argument("disagreement query: dimension mismatch");
  const auto vh = as_conjunction_vars(h), vc = as_conjunction_vars(c);
  if (vh && vc) {
    auto r = ConjPair(*vh, *vc, h.dim()).min_flips_with_witness(x);
    if (!r || r->first > cap) return std::nullopt;
    return r;
  }
  return detail::brute_ball_search(x, cap, lim, [&](const Point& z) { return evaluate(h, z) != evaluate(c, z); });
}

// Minimum flips (up to cap) to a point where h outputs something other than
// the fixed label y.
template <class H>
std::optional<std::pair<unsigned, Point>> min_flips_label_change(const H& h, bool y, const Point& x, unsigned cap,
                                                                 const AdversaryLimits& lim = {}) {
  return detail::brute_ball_search(x, cap, lim, [&](const Point& z) { return h(z) != y; });
}

inline std::optional<std::pair<unsigned, Point>> min_flips_label_change(const Concept& h, bool y, const Point& x,
                                                                        unsigned cap, const AdversaryLimits& lim = {}) {
  if (x.dim() != h.dim()) throw std::invalid_argument("label-change query: dimension mismatch");
  const auto vars = as_conjunction_vars(h);
  if (!vars) {
    return detail::brute_ball_search(x, cap, lim, [&](const Point& z) { return evaluate(h, z) != y; });
  }
  const detail::Words mask = detail::make_mask(*vars, h.dim());
  const unsigned zeros = detail::count_in_mask_not_set(mask, x);
  const bool hx = zeros == 0;
  if (hx != y) return {{0u, x}};
  if (!y) {
    // force h(z) = 1
    if (zeros > cap) return std::nullopt;
    Point z = x;
    auto zw = z.words();
    for (std::size_t i = 0; i < mask.size(); ++i) zw[i] |= mask[i];
    return {{zeros, std::move(z)}};
  }
  // force h(z) = 0; h(x) = 1, so every conjunction bit is set
  if (detail::mask_empty(mask) || cap < 1) return std::nullopt;
  Point z = x;
  z.set(static_cast<unsigned>(detail::lowest_bit(mask)), false);
  return {{1u, std::move(z)}};
}

template <class H, class C>
AttackResult exists_disagreement_in_ball(const H& h, const C& c, const Point& x, unsigned rho,
                                         const AdversaryLimits& lim = {}) {
  if (rho > x.dim()) throw std::invalid_argument("perturbation budget exceeds dimension");
  auto r = min_flips_disagreement(h, c, x, rho, lim);
  if (!r) return {};
  return AttackResult{true, r->first, std::move(r->second)};
}

template <class H, class C>
AttackResult exists_label_change_in_ball(const H& h, const C& c, const Point& x, unsigned rho,
                                         const AdversaryLimits& lim = {}) {
  if (rho > x.dim()) throw std::invalid_argument("perturbation budget exceeds dimension");
  auto r = min_flips_label_change(h, c(x), x, rho, lim);
  if (!r) return {};
  return AttackResult{true, r->first, std::move(r->second)};
}

}  // namespace cuberisk
