#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "automeasure/conditionals.hpp"
#include "automeasure/core_rules.hpp"
#include "automeasure/groups.hpp"
#include "automeasure/measures.hpp"

namespace automeasure {

/// Nonempty subset of Λ as a bitmask; limits set-lifted work to |Λ| ≤ 64.
using Mask = std::uint64_t;

using SetWord = std::vector<Mask>;

inline constexpr std::size_t kMaxLiftedAlphabet = 64;

inline Mask singleton(Symbol s) { return Mask{1} << s; }

inline std::size_t set_size(Mask m) { return static_cast<std::size_t>(std::popcount(m)); }

inline Mask to_mask(const std::vector<Symbol>& symbols) {
  Mask m = 0;
  for (Symbol s : symbols) m |= singleton(s);
  return m;
}

inline std::vector<Symbol> to_symbols(Mask m) {
  std::vector<Symbol> out;
  while (m) {
    out.push_back(static_cast<Symbol>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

inline std::string format_set(Mask m, const Alphabet& a) {
  std::string s = "{";
  bool first = true;
  for (Symbol x : to_symbols(m)) {
    if (!first) s += ",";
    s += a.label(x);
    first = false;
  }
  return s + "}";
}

/// τ′: (A,B) ↦ {r(a,b) : a ∈ A, b ∈ B}. Tabulated for |Λ| ≤ 8.
class SetRule {
 public:
  explicit SetRule(LocalRule base) : base_(std::move(base)) {
    const std::size_t n = base_.size();
    if (n > kMaxLiftedAlphabet) throw Error("set-lifted rules need |alphabet| <= 64");
    if (n <= 8) {
      const std::size_t sets = std::size_t{1} << n;
      table_.assign(sets * sets, 0);
      for (Mask a = 1; a < sets; ++a)
        for (Mask b = 1; b < sets; ++b) table_[a * sets + b] = compute(a, b);
    }
  }

  const LocalRule& base() const noexcept { return base_; }

  Mask operator()(Mask a, Mask b) const {
    if (!table_.empty()) return table_[a * (std::size_t{1} << base_.size()) + b];
    return compute(a, b);
  }

  SetWord apply(const SetWord& w) const {
    if (w.size() < 2) throw Error("apply needs a set word of length at least 2");
    SetWord out(w.size() - 1);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) out[i] = (*this)(w[i], w[i + 1]);
    return out;
  }

 private:
  Mask compute(Mask a, Mask b) const {
    Mask out = 0;
    for (Symbol x : to_symbols(a))
      for (Symbol y : to_symbols(b)) out |= singleton(base_(x, y));
    return out;
  }

  LocalRule base_;
  std::vector<Mask> table_;
};

inline SetRule lift_rule(const LocalRule& rule) { return SetRule(rule); }

/// All size-k subsets of an n-letter alphabet, in increasing mask order.
inline std::vector<Mask> subsets_of_size(std::size_t n, std::size_t k) {
  std::vector<Mask> out;
  if (k == 0 || k > n) return out;
  if (n > 30) throw Error("subset enumeration limited to |alphabet| <= 30");
  for (Mask m = 1; m < (Mask{1} << n); ++m)
    if (set_size(m) == k) out.push_back(m);
  return out;
}

namespace detail {

/// levels[j] holds the j-th τ′-image of the current prefix.
inline void z_extend(const SetRule& rule, const std::vector<Mask>& cands, std::size_t k, std::size_t length,
                     std::size_t steps, std::vector<SetWord>& levels, std::vector<SetWord>& out) {
  if (levels[0].size() == length) {
    out.push_back(levels[0]);
    return;
  }
  for (Mask c : cands) {
    levels[0].push_back(c);
    std::size_t pushed = 1;
    bool ok = true;
    for (std::size_t j = 1; j <= steps && levels[j - 1].size() >= 2; ++j) {
      const auto& prev = levels[j - 1];
      const Mask img = rule(prev[prev.size() - 2], prev.back());
      if (set_size(img) != k) {
        ok = false;
        break;
      }
      levels[j].push_back(img);
      ++pushed;
    }
    if (ok) z_extend(rule, cands, k, length, steps, levels, out);
    for (std::size_t j = 0; j < pushed; ++j) levels[j].pop_back();
  }
}

}  // namespace detail

/// Length-L words over size-k subsets all of whose (τ′)^n images, n ≤ N,
/// keep every component at size k. An outer approximation of Z_{τ,k}.
inline std::vector<SetWord> z_words(const LocalRule& rule, std::size_t k, std::size_t length, std::size_t steps,
                                    unsigned workers = 1) {
  if (k < 1 || k > rule.size()) throw Error("z_words needs 1 <= k <= |alphabet|");
  if (steps >= length) throw Error("z_words needs N < L");
  const SetRule lifted(rule);
  const auto cands = subsets_of_size(rule.size(), k);
  auto parts = parallel_map<std::vector<SetWord>>(cands.size(), workers, [&](std::size_t i) {
    std::vector<SetWord> out;
    std::vector<SetWord> levels(steps + 1);
    levels[0].push_back(cands[i]);
    detail::z_extend(lifted, cands, k, length, steps, levels, out);
    return out;
  });
  std::vector<SetWord> all;
  for (auto& p : parts)
    for (auto& w : p) all.push_back(std::move(w));
  return all;
}

struct GroupZWords {
  std::vector<SetWord> words;
  bool normalizer_verdict = true;
  std::optional<Subgroup> subgroup;  // common H when every word uses one
  std::vector<std::size_t> offending;  // indices of words failing the verdict
};

/// z_words for τ_G, plus whether each surviving word consists of right
/// cosets H·g of a single subgroup H with g H g⁻¹ = H.
inline GroupZWords z_words_group(const FiniteGroup& g, std::size_t k, std::size_t length, std::size_t steps,
                                 unsigned workers = 1) {
  GroupZWords out;
  out.words = z_words(group_rule(g), k, length, steps, workers);
  std::optional<Subgroup> common;
  bool mixed = false;
  for (std::size_t i = 0; i < out.words.size(); ++i) {
    std::optional<Subgroup> h;
    bool ok = true;
    for (Mask comp : out.words[i]) {
      const auto elems = to_symbols(comp);
      const Element rep = elems.front();
      std::vector<Element> cand;
      for (Symbol s : elems) cand.push_back(g.mul(s, g.inverse(rep)));
      std::sort(cand.begin(), cand.end());
      if (!is_subgroup(g, cand)) {
        ok = false;
        break;
      }
      Subgroup here{cand};
      if (h && *h != here) {
        ok = false;
        break;
      }
      h = here;
      for (Symbol s : elems) {
        for (Element x : here.elements) {
          if (!here.contains(g.mul(g.mul(s, x), g.inverse(s)))) ok = false;
        }
      }
      if (!ok) break;
    }
    if (!ok) {
      out.normalizer_verdict = false;
      out.offending.push_back(i);
      continue;
    }
    if (common && *common != *h) mixed = true;
    common = h;
  }
  if (!mixed) out.subgroup = common;
  return out;
}

/// Image of one word under the support factor: component i is the support
/// of x_i given x_{i+1}..x_{n-1}.
struct PiImage {
  Word word;
  Rational mass;
  SetWord sets;
  std::vector<bool> stable;
};

/// Support-factor images of every positive word of length n. Each component
/// conditions on at least `margin` future symbols, so images have length
/// n − margin.
inline std::vector<PiImage> pi_factor(const Measure& m, std::size_t n, std::size_t margin, const Limits& limits = {}) {
  if (margin < 1 || margin >= n) throw Error("pi_factor needs 1 <= margin < n");
  if (m.alphabet_size() > kMaxLiftedAlphabet) throw Error("support factor needs |alphabet| <= 64");
  SupportAtlas atlas(m, margin, n - 1, limits);
  std::vector<PiImage> out;
  for (auto& w : positive_words(m, n, limits.workers)) {
    PiImage img{std::move(w.word), std::move(w.mass), {}, {}};
    for (std::size_t i = 0; i + margin < n; ++i) {
      const Word future(img.word.begin() + static_cast<std::ptrdiff_t>(i + 1), img.word.end());
      const auto* e = atlas.find(future);
      if (e == nullptr) throw Error("inconsistent measure: positive word with zero-mass future");
      img.sets.push_back(to_mask(e->report.support));
      img.stable.push_back(e->stable);
    }
    out.push_back(std::move(img));
  }
  return out;
}

struct IntertwiningResult {
  bool holds = true;
  std::size_t compared = 0;
  std::size_t skipped = 0;
  std::optional<Word> counterexample;
};

/// π(τx)_i = τ′(π(x))_i wherever all three components involved have stabilized.
inline IntertwiningResult intertwining_check(const Measure& m, const LocalRule& rule, std::size_t n,
                                             std::size_t margin, const Limits& limits = {}) {
  if (n < margin + 2) throw Error("intertwining check needs n >= margin + 2");
  const SetRule lifted(rule);
  SupportAtlas atlas(m, margin, n - 1, limits);
  IntertwiningResult r;
  for (const auto& img : pi_factor(m, n, margin, limits)) {
    const Word tx = automeasure::apply(rule, img.word);
    for (std::size_t i = 0; i + 1 < img.sets.size(); ++i) {
      const Word future(tx.begin() + static_cast<std::ptrdiff_t>(i + 1), tx.end());
      const auto* e = atlas.find(future);
      if (e == nullptr) {
        // τ-image of a positive word must be positive for τ-invariant μ.
        r.holds = false;
        if (!r.counterexample) r.counterexample = img.word;
        continue;
      }
      if (!img.stable[i] || !img.stable[i + 1] || !e->stable) {
        ++r.skipped;
        continue;
      }
      ++r.compared;
      if (to_mask(e->report.support) != lifted(img.sets[i], img.sets[i + 1])) {
        r.holds = false;
        if (!r.counterexample) r.counterexample = img.word;
      }
    }
  }
  return r;
}

}  // namespace automeasure
