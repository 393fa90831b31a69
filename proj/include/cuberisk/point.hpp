#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cuberisk/bigint.hpp"

namespace cuberisk {

inline constexpr unsigned kMaxDim = 4096;

// A point of {0,1}^n, bits packed into 64-bit words. Bit index 0 is the
// leftmost character in string renderings; bits at positions >= dim are
// kept zero so word-level operations stay exact.
class Point {
 public:
  Point() : dim_(0) {}

  explicit Point(unsigned dim) : dim_(check_dim(dim)), words_((dim + 63) / 64, 0) {}

  static Point zeros(unsigned dim) { return Point(dim); }

  static Point ones(unsigned dim) {
    Point p(dim);
    for (unsigned i = 0; i < p.words_.size(); ++i) p.words_[i] = ~0ULL;
    p.mask_tail();
    return p;
  }

  static Point from_string(std::string_view bits) {
    Point p(static_cast<unsigned>(bits.size()));
    for (unsigned i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        p.set(i, true);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("point string must contain only '0'/'1'");
      }
    }
    return p;
  }

  unsigned dim() const { return dim_; }

  bool get(unsigned i) const {
    check_index(i);
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }

  void set(unsigned i, bool v) {
    check_index(i);
    const std::uint64_t m = 1ULL << (i & 63);
    if (v) {
      words_[i >> 6] |= m;
    } else {
      words_[i >> 6] &= ~m;
    }
  }

  void toggle(unsigned i) {
    check_index(i);
    words_[i >> 6] ^= 1ULL << (i & 63);
  }

  unsigned count_ones() const {
    unsigned c = 0;
    for (std::uint64_t w : words_) c += static_cast<unsigned>(std::popcount(w));
    return c;
  }

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::string to_string() const {
    std::string s(dim_, '0');
    for (unsigned i = 0; i < dim_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.dim_ == b.dim_ && a.words_ == b.words_;
  }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

  // Lexicographic order of the string rendering (bit 0 most significant).
  friend bool lex_less(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("lex_less: dimension mismatch");
    for (unsigned i = 0; i < a.dim_; ++i) {
      const bool x = a.get(i), y = b.get(i);
      if (x != y) return y;
    }
    return false;
  }

 private:
  static unsigned check_dim(unsigned dim) {
    if (dim == 0 || dim > kMaxDim) throw std::invalid_argument("point dimension out of range");
    return dim;
  }
  void check_index(unsigned i) const {
    if (i >= dim_) throw std::out_of_range("bit index past point dimension");
  }
  void mask_tail() {
    const unsigned tail = dim_ & 63;
    if (tail != 0) words_.back() &= (1ULL << tail) - 1;
  }

  unsigned dim_;
  std::vector<std::uint64_t> words_;
};

struct BallSpec {
  Point center;
  unsigned radius;

  BallSpec(Point c, unsigned r) : center(std::move(c)), radius(r) {
    if (radius > center.dim()) throw std::invalid_argument("ball radius exceeds dimension");
  }
};

inline unsigned hamming_distance(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("hamming_distance: dimension mismatch");
  unsigned c = 0;
  const auto xs = x.words(), ys = y.words();
  for (std::size_t i = 0; i < xs.size(); ++i)
    c += static_cast<unsigned>(std::popcount(xs[i] ^ ys[i]));
  return c;
}

// |B_rho| = sum_{i<=rho} C(n, i), exact.
inline BigInt ball_size(unsigned n, unsigned rho) {
  if (rho > n) throw std::invalid_argument("ball_size: radius exceeds dimension");
  BigInt total = 1, binom = 1;
  for (unsigned i = 1; i <= rho; ++i) {
    binom = binom * (n - i + 1) / i;
    total += binom;
  }
  return total;
}

inline Point flip(const Point& x, std::span<const unsigned> indices) {
  Point z = x;
  for (unsigned i : indices) {
    if (i >= x.dim()) throw std::invalid_argument("flip: index past dimension");
    z.toggle(i);
  }
  return z;
}

inline Point flip(const Point& x, std::initializer_list<unsigned> indices) {
  return flip(x, std::span<const unsigned>(indices.begin(), indices.size()));
}

// Visits the ball around spec.center in canonical order: distance 0, 1, ...,
// ties broken by lexicographic order of the flipped index sets. Stops early
// when fn returns false. Returns false iff stopped early.
template <class Fn>
bool for_each_in_ball(const BallSpec& spec, Fn&& fn) {
  const unsigned n = spec.center.dim();
  Point z = spec.center;
  if (!fn(static_cast<const Point&>(z), 0u)) return false;
  std::vector<unsigned> comb;
  for (unsigned d = 1; d <= spec.radius; ++d) {
    comb.resize(d);
    for (unsigned i = 0; i < d; ++i) comb[i] = i;
    while (true) {
      z = spec.center;
      for (unsigned i : comb) z.toggle(i);
      if (!fn(static_cast<const Point&>(z), d)) return false;
      // next d-combination of [0, n) in lexicographic order
      int j = static_cast<int>(d) - 1;
      while (j >= 0 && comb[j] == n - d + j) --j;
      if (j < 0) break;
      ++comb[j];
      for (unsigned i = j + 1; i < d; ++i) comb[i] = comb[i - 1] + 1;
    }
  }
  return true;
}

inline std::vector<Point> enumerate_ball(const BallSpec& spec) {
  std::vector<Point> out;
  for_each_in_ball(spec, [&](const Point& z, unsigned) {
    out.push_back(z);
    return true;
  });
  return out;
}

// Rank of a point under lexicographic order; usable as a dense table index
// for n <= 24.
inline std::size_t point_to_index(const Point& x) {
  if (x.dim() > 24) throw std::invalid_argument("point_to_index: dimension too large");
  std::size_t idx = 0;
  for (unsigned i = 0; i < x.dim(); ++i) idx = (idx << 1) | (x.get(i) ? 1u : 0u);
  return idx;
}

inline Point index_to_point(std::size_t idx, unsigned n) {
  if (n > 24) throw std::invalid_argument("index_to_point: dimension too large");
  Point x(n);
  for (unsigned i = 0; i < n; ++i)
    if ((idx >> (n - 1 - i)) & 1u) x.set(i, true);
  return x;
}

}  // namespace cuberisk
