#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cuberisk/point.hpp"

namespace cuberisk {

class Concept;

// Variable set stored sorted and deduplicated; the empty conjunction is the
// constant-1 function.
struct MonotoneConjunction {
  std::vector<unsigned> vars;
};

struct Dictator {
  unsigned index;
};

struct Parity {
  std::vector<unsigned> vars;
  bool offset = false;  // f_I(x) = sum_{i in I} x_i + offset mod 2
};

struct ConstantFn {
  bool value;
};

// inner composed with a (2k+1)-fold repetition decode; input dimension is
// (2k+1)*inner.dim + 1, the trailing bit is ignored by evaluation.
struct MajorityEncoded {
  std::shared_ptr<const Concept> inner;
  unsigned k;
};

namespace detail {
inline std::vector<unsigned> sorted_vars(std::vector<unsigned> v, unsigned dim, const char* what) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  if (!v.empty() && v.back() >= dim) throw std::invalid_argument(std::string(what) + ": variable past dimension");
  return v;
}
}  // namespace detail

class Concept {
 public:
  using Node = std::variant<MonotoneConjunction, Dictator, Parity, ConstantFn, MajorityEncoded>;

  static Concept monotone_conjunction(std::vector<unsigned> vars, unsigned dim) {
    return Concept(dim, MonotoneConjunction{detail::sorted_vars(std::move(vars), dim, "conjunction")});
  }
  static Concept dictator(unsigned index, unsigned dim) {
    if (index >= dim) throw std::invalid_argument("dictator: variable past dimension");
    return Concept(dim, Dictator{index});
  }
  static Concept parity(std::vector<unsigned> vars, bool offset, unsigned dim) {
    return Concept(dim, Parity{detail::sorted_vars(std::move(vars), dim, "parity"), offset});
  }
  static Concept constant(bool value, unsigned dim) { return Concept(dim, ConstantFn{value}); }
  static Concept majority_encoded(Concept inner, unsigned k) {
    const unsigned n = inner.dim();
    const unsigned dim = (2 * k + 1) * n + 1;
    return Concept(dim, MajorityEncoded{std::make_shared<Concept>(std::move(inner)), k});
  }

  unsigned dim() const { return dim_; }
  const Node& node() const { return node_; }

  bool operator()(const Point& x) const;

  friend bool operator==(const Concept& a, const Concept& b);

 private:
  Concept(unsigned dim, Node node) : dim_(dim), node_(std::move(node)) {}

  unsigned dim_;
  Node node_;
};

// Majority vote per (2k+1)-bit block; the final bit of z is ignored.
inline Point maj_decode(const Point& z, unsigned k, unsigned n) {
  const unsigned block = 2 * k + 1;
  if (z.dim() != block * n + 1) throw std::invalid_argument("maj_decode: dimension mismatch");
  Point x(n);
  for (unsigned i = 0; i < n; ++i) {
    unsigned ones = 0;
    for (unsigned j = 0; j < block; ++j) ones += z.get(i * block + j);
    if (ones > k) x.set(i, true);
  }
  return x;
}

// z = x_1...x_1 x_2...x_2 ... x_n...x_n label, each bit repeated 2k+1 times.
inline Point phi_encode(const Point& x, bool label, unsigned k) {
  const unsigned block = 2 * k + 1;
  Point z(block * x.dim() + 1);
  for (unsigned i = 0; i < x.dim(); ++i) {
    if (x.get(i))
      for (unsigned j = 0; j < block; ++j) z.set(i * block + j, true);
  }
  if (label) z.set(z.dim() - 1, true);
  return z;
}

inline bool evaluate(const Concept& c, const Point& x) {
  if (x.dim() != c.dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, MonotoneConjunction>) {
          for (unsigned i : node.vars)
            if (!x.get(i)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Dictator>) {
          return x.get(node.index);
        } else if constexpr (std::is_same_v<T, Parity>) {
          unsigned s = node.offset ? 1 : 0;
          for (unsigned i : node.vars) s += x.get(i);
          return (s & 1u) != 0;
        } else if constexpr (std::is_same_v<T, ConstantFn>) {
          return node.value;
        } else {
          return evaluate(*node.inner, maj_decode(x, node.k, node.inner->dim()));
        }
      },
      c.node());
}

inline bool Concept::operator()(const Point& x) const { return evaluate(*this, x); }

inline bool operator==(const Concept& a, const Concept& b) {
  if (a.dim_ != b.dim_ || a.node_.index() != b.node_.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node_);
        if constexpr (std::is_same_v<T, MonotoneConjunction>) {
          return na.vars == nb.vars;
        } else if constexpr (std::is_same_v<T, Dictator>) {
          return na.index == nb.index;
        } else if constexpr (std::is_same_v<T, Parity>) {
          return na.vars == nb.vars && na.offset == nb.offset;
        } else if constexpr (std::is_same_v<T, ConstantFn>) {
          return na.value == nb.value;
        } else {
          return na.k == nb.k && *na.inner == *nb.inner;
        }
      },
      a.node_);
}

// Exhaustive extensional equality; refused above 24 bits.
inline bool concepts_equal_on_cube(const Concept& c1, const Concept& c2) {
  if (c1.dim() != c2.dim()) throw std::invalid_argument("concepts_equal_on_cube: dimension mismatch");
  if (c1.dim() > 24) throw std::invalid_argument("concepts_equal_on_cube: dimension too large for exhaustive check");
  const std::size_t total = std::size_t{1} << c1.dim();
  for (std::size_t i = 0; i < total; ++i) {
    const Point x = index_to_point(i, c1.dim());
    if (evaluate(c1, x) != evaluate(c2, x)) return false;
  }
  return true;
}

// Positions the concept's output can depend on. For encoded concepts these
// are the blocks of the inner concept's variables; the label bit is never
// read.
inline std::vector<unsigned> relevant_vars(const Concept& c) {
  return std::visit(
      [&](const auto& node) -> std::vector<unsigned> {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, MonotoneConjunction>) {
          return node.vars;
        } else if constexpr (std::is_same_v<T, Dictator>) {
          return {node.index};
        } else if constexpr (std::is_same_v<T, Parity>) {
          return node.vars;
        } else if constexpr (std::is_same_v<T, ConstantFn>) {
          return {};
        } else {
          const unsigned block = 2 * node.k + 1;
          std::vector<unsigned> out;
          for (unsigned i : relevant_vars(*node.inner))
            for (unsigned j = 0; j < block; ++j) out.push_back(i * block + j);
          return out;
        }
      },
      c.node());
}

// When the concept is a monotone conjunction in disguise (dictator, constant
// one), returns its variable set; enables the conjunction fast paths.
inline std::optional<std::vector<unsigned>> as_conjunction_vars(const Concept& c) {
  if (const auto* m = std::get_if<MonotoneConjunction>(&c.node())) return m->vars;
  if (const auto* d = std::get_if<Dictator>(&c.node())) return std::vector<unsigned>{d->index};
  if (const auto* k = std::get_if<ConstantFn>(&c.node()); k && k->value) return std::vector<unsigned>{};
  return std::nullopt;
}

// --- text format: conj:0,2 | dict:3 | parity:0,1;b=1 | const:0 | majenc(k=2):<inner>

inline std::string format_concept(const Concept& c) {
  return std::visit(
      [&](const auto& node) -> std::string {
        using T = std::decay_t<decltype(node)>;
        const auto join = [](const std::vector<unsigned>& v) {
          std::string s;
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(v[i]);
          }
          return s;
        };
        if constexpr (std::is_same_v<T, MonotoneConjunction>) {
          return "conj:" + join(node.vars);
        } else if constexpr (std::is_same_v<T, Dictator>) {
          return "dict:" + std::to_string(node.index);
        } else if constexpr (std::is_same_v<T, Parity>) {
          std::string s = "parity:" + join(node.vars);
          if (node.offset) s += ";b=1";
          return s;
        } else if constexpr (std::is_same_v<T, ConstantFn>) {
          return node.value ? "const:1" : "const:0";
        } else {
          return "majenc(k=" + std::to_string(node.k) + "):" + format_concept(*node.inner);
        }
      },
      c.node());
}

namespace detail {
inline std::vector<unsigned> parse_index_list(std::string_view s) {
  std::vector<unsigned> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find(',', pos);
    if (end == std::string_view::npos) end = s.size();
    const std::string tok(s.substr(pos, end - pos));
    if (tok.empty()) throw std::invalid_argument("empty index in concept text");
    out.push_back(static_cast<unsigned>(std::stoul(tok)));
    pos = end + 1;
  }
  return out;
}
}  // namespace detail

// dim is the dimension of the concept being parsed; for majenc the inner
// dimension is derived from it.
inline Concept parse_concept(std::string_view text, unsigned dim) {
  const auto starts = [&](std::string_view p) { return text.substr(0, p.size()) == p; };
  if (starts("conj:")) {
    return Concept::monotone_conjunction(detail::parse_index_list(text.substr(5)), dim);
  }
  if (starts("dict:")) {
    return Concept::dictator(static_cast<unsigned>(std::stoul(std::string(text.substr(5)))), dim);
  }
  if (starts("parity:")) {
    std::string_view body = text.substr(7);
    bool b = false;
    if (const auto semi = body.find(';'); semi != std::string_view::npos) {
      const std::string_view opt = body.substr(semi + 1);
      if (opt == "b=1") {
        b = true;
      } else if (opt != "b=0") {
        throw std::invalid_argument("parity option must be b=0 or b=1");
      }
      body = body.substr(0, semi);
    }
    return Concept::parity(detail::parse_index_list(body), b, dim);
  }
  if (starts("const:")) {
    const std::string_view v = text.substr(6);
    if (v != "0" && v != "1") throw std::invalid_argument("const value must be 0 or 1");
    return Concept::constant(v == "1", dim);
  }
  if (starts("majenc(k=")) {
    const std::size_t close = text.find("):");
    if (close == std::string_view::npos) throw std::invalid_argument("malformed majenc concept text");
    const unsigned k = static_cast<unsigned>(std::stoul(std::string(text.substr(9, close - 9))));
    const unsigned block = 2 * k + 1;
    if (dim < 1 || (dim - 1) % block != 0)
      throw std::invalid_argument("majenc: dimension incompatible with block size");
    const unsigned inner_dim = (dim - 1) / block;
    return Concept::majority_encoded(parse_concept(text.substr(close + 2), inner_dim), k);
  }
  throw std::invalid_argument("unknown concept text: " + std::string(text));
}

}  // namespace cuberisk
