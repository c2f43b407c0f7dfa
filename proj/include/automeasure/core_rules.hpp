#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "automeasure/rational.hpp"

namespace automeasure {

using Symbol = std::uint16_t;

/// Finite words are plain symbol sequences; the alphabet travels with the
/// rule or measure that interprets them.
using Word = std::vector<Symbol>;

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    // FNV-1a over the symbols.
    std::uint64_t h = 1469598103934665603ull;
    for (Symbol s : w) {
      h ^= s;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (w.size() << 1));
  }
};

class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw Error("alphabet must contain at least one symbol");
    if (labels_.size() > 0xFFFF) throw Error("alphabet too large");
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
      if (!seen.insert(l).second) throw Error("duplicate alphabet label '" + l + "'");
    }
  }

  /// Labels "0", "1", ..., "n-1".
  static Alphabet numbered(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return Alphabet(std::move(labels));
  }

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(Symbol s) const { return labels_.at(s); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  Symbol index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw Error("unknown symbol label '" + label + "'");
    return static_cast<Symbol>(it - labels_.begin());
  }

  bool contains(const Word& w) const noexcept {
    return std::all_of(w.begin(), w.end(), [&](Symbol s) { return s < size(); });
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> labels_;
};

/// Radius-1 local rule r : Λ×Λ → Λ, stored row-major (row = left cell).
class LocalRule {
 public:
  LocalRule() = default;

  LocalRule(Alphabet alphabet, std::vector<Symbol> table)
      : alphabet_(std::move(alphabet)), table_(std::move(table)) {
    const std::size_t n = alphabet_.size();
    if (table_.size() != n * n) {
      throw Error("rule table must have " + std::to_string(n * n) + " entries, got " +
                  std::to_string(table_.size()));
    }
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] >= n) {
        throw Error("rule table entry (" + std::to_string(i / n) + "," +
                    std::to_string(i % n) + ") out of range");
      }
    }
  }

  template <class F>
  static LocalRule from_function(Alphabet alphabet, F&& f) {
    const std::size_t n = alphabet.size();
    std::vector<Symbol> table(n * n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        table[a * n + b] = static_cast<Symbol>(f(static_cast<Symbol>(a), static_cast<Symbol>(b)));
    return LocalRule(std::move(alphabet), std::move(table));
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return alphabet_.size(); }
  Symbol operator()(Symbol a, Symbol b) const { return table_[a * size() + b]; }
  const std::vector<Symbol>& table() const noexcept { return table_; }

  bool operator==(const LocalRule&) const = default;

 private:
  Alphabet alphabet_;
  std::vector<Symbol> table_;
};

/// For every fixed right argument b, a ↦ r(a,b) is a bijection.
inline bool check_left_permutative(const LocalRule& rule) {
  const std::size_t n = rule.size();
  std::vector<char> hit(n);
  for (Symbol b = 0; b < n; ++b) {
    std::fill(hit.begin(), hit.end(), 0);
    for (Symbol a = 0; a < n; ++a) {
      auto& h = hit[rule(a, b)];
      if (h) return false;
      h = 1;
    }
  }
  return true;
}

inline bool check_right_permutative(const LocalRule& rule) {
  const std::size_t n = rule.size();
  std::vector<char> hit(n);
  for (Symbol a = 0; a < n; ++a) {
    std::fill(hit.begin(), hit.end(), 0);
    for (Symbol b = 0; b < n; ++b) {
      auto& h = hit[rule(a, b)];
      if (h) return false;
      h = 1;
    }
  }
  return true;
}

inline bool is_bipermutative(const LocalRule& rule) {
  return check_left_permutative(rule) && check_right_permutative(rule);
}

inline Word apply(const LocalRule& rule, std::span<const Symbol> w) {
  if (w.size() < 2) throw Error("apply needs a word of length at least 2");
  Word out(w.size() - 1);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) out[i] = rule(w[i], w[i + 1]);
  return out;
}

inline Word iterate(const LocalRule& rule, std::span<const Symbol> w, std::size_t t) {
  if (t >= w.size()) throw Error("iterate needs t < |w|");
  Word cur(w.begin(), w.end());
  for (std::size_t s = 0; s < t; ++s) {
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = rule(cur[i], cur[i + 1]);
    cur.pop_back();
  }
  return cur;
}

/// Left column of the space-time triangle: out_i = (τ^i(w))_0.
inline Word column_code(const LocalRule& rule, std::span<const Symbol> w) {
  Word cur(w.begin(), w.end());
  Word out;
  out.reserve(w.size());
  while (!cur.empty()) {
    out.push_back(cur.front());
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = rule(cur[i], cur[i + 1]);
    cur.pop_back();
  }
  return out;
}

/// r(a,b) = a + b mod 2.
inline LocalRule ledrappier_rule() {
  return LocalRule::from_function(Alphabet::numbered(2), [](Symbol a, Symbol b) { return (a + b) % 2; });
}

/// Commutative, bi-permutative, non-associative rule on {A,B,C}:
/// r(x,y) = -(x+y) mod 3 with A=0, B=1, C=2.
inline LocalRule triangle_rule() {
  return LocalRule::from_function(Alphabet({"A", "B", "C"}),
                                  [](Symbol a, Symbol b) { return (6 - a - b) % 3; });
}

/// Successor lists: for each (left symbol a, output o), the b with r(a,b) = o.
inline std::vector<std::vector<Symbol>> successor_table(const LocalRule& rule) {
  const std::size_t n = rule.size();
  std::vector<std::vector<Symbol>> succ(n * n);
  for (Symbol a = 0; a < n; ++a)
    for (Symbol b = 0; b < n; ++b) succ[a * n + rule(a, b)].push_back(b);
  return succ;
}

}  // namespace automeasure
