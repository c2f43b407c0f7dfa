#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "automeasure/core_rules.hpp"
#include "automeasure/groups.hpp"
#include "automeasure/measures.hpp"

namespace automeasure {

/// Distribution of x_0 given that x_1..x_n spell `word`.
struct ConditionalReport {
  Word word;
  std::vector<Rational> probs;  // indexed by symbol
  std::vector<Symbol> support;
  bool uniform = false;
  Rational mass;  // Σ_a μ([a·word])
  std::optional<Subgroup> coset_of;
  bool coset_violation = false;
};

/// Builds a report from the joint masses μ([a·word]) for every a.
inline ConditionalReport make_report(Word word, const std::vector<Rational>& joint) {
  ConditionalReport r;
  r.word = std::move(word);
  r.mass = 0;
  for (const auto& m : joint) r.mass += m;
  if (r.mass == 0) throw Error("conditioning word has zero mass");
  r.probs.resize(joint.size());
  for (std::size_t a = 0; a < joint.size(); ++a) {
    r.probs[a] = joint[a] / r.mass;
    if (joint[a] != 0) r.support.push_back(static_cast<Symbol>(a));
  }
  const Rational expected(1, static_cast<unsigned long>(r.support.size()));
  r.uniform = std::all_of(r.support.begin(), r.support.end(), [&](Symbol a) { return r.probs[a] == expected; });
  return r;
}

inline ConditionalReport conditional_at_zero(const Measure& m, const Word& w, const Limits& limits = {}) {
  require_depth(w.size() + 1, limits);
  if (!m.alphabet().contains(w)) throw Error("word contains a symbol outside the alphabet");
  std::vector<Rational> joint(m.alphabet_size());
  Word v(w.size() + 1);
  std::copy(w.begin(), w.end(), v.begin() + 1);
  for (Symbol a = 0; a < m.alphabet_size(); ++a) {
    v[0] = a;
    joint[a] = m.mass(v);
  }
  return make_report(w, joint);
}

/// Conditional reports for every future of length n with positive mass,
/// keyed by the future, with a stabilization flag per entry.
class SupportAtlas {
 public:
  struct Entry {
    ConditionalReport report;
    bool stable = false;  // every positive one-symbol extension has the same support
  };

  /// Builds tables for future lengths lo..hi (needs cylinders up to hi+2).
  SupportAtlas(const Measure& m, std::size_t lo, std::size_t hi, const Limits& limits) : lo_(lo) {
    require_depth(hi + 2, limits);
    tables_.reserve(hi - lo + 2);
    for (std::size_t len = lo; len <= hi + 1; ++len) tables_.push_back(build(m, len, limits.workers));
    for (std::size_t t = 0; t + 1 < tables_.size(); ++t) {
      for (auto& [w, e] : tables_[t]) e.stable = true;
      for (const auto& [w, e] : tables_[t + 1]) {
        auto& parent = tables_[t].at(Word(w.begin(), w.end() - 1));
        if (parent.report.support != e.report.support) parent.stable = false;
      }
    }
    tables_.pop_back();
  }

  const std::map<Word, Entry>& futures(std::size_t len) const { return tables_.at(len - lo_); }

  const Entry* find(const Word& future) const {
    if (future.size() < lo_ || future.size() - lo_ >= tables_.size()) return nullptr;
    const auto& t = tables_[future.size() - lo_];
    auto it = t.find(future);
    return it == t.end() ? nullptr : &it->second;
  }

  static std::map<Word, Entry> build(const Measure& m, std::size_t len, unsigned workers) {
    std::map<Word, std::vector<Rational>> joint;
    for (const auto& v : positive_words(m, len + 1, workers)) {
      auto& slot = joint[Word(v.word.begin() + 1, v.word.end())];
      if (slot.empty()) slot.assign(m.alphabet_size(), Rational(0));
      slot[v.word[0]] = v.mass;
    }
    std::map<Word, Entry> out;
    for (auto& [w, j] : joint) out.emplace(w, Entry{make_report(w, j), false});
    return out;
  }

 private:
  std::size_t lo_;
  std::vector<std::map<Word, Entry>> tables_;
};

struct CensusResult {
  std::size_t n = 0;
  Rational uniform_mass;
  Rational stabilized_mass;
  Rational stabilized_uniform_mass;
  std::size_t words = 0;
  std::vector<ConditionalReport> failures;  // non-uniform conditionals, lexicographic
};

/// Mass of length-n futures whose conditional at index 0 is exactly uniform
/// on its support. Zero-mass futures are skipped.
inline CensusResult uniformity_census(const Measure& m, std::size_t n, const Limits& limits = {}) {
  SupportAtlas atlas(m, n, n, limits);
  CensusResult r;
  r.n = n;
  r.uniform_mass = r.stabilized_mass = r.stabilized_uniform_mass = 0;
  for (const auto& [w, e] : atlas.futures(n)) {
    ++r.words;
    if (e.report.uniform) r.uniform_mass += e.report.mass;
    else r.failures.push_back(e.report);
    if (e.stable) {
      r.stabilized_mass += e.report.mass;
      if (e.report.uniform) r.stabilized_uniform_mass += e.report.mass;
    }
  }
  return r;
}

struct SupportSizeResult {
  bool holds = true;
  std::size_t compared = 0;
  std::size_t skipped = 0;  // unstabilized word or image
  std::optional<Word> counterexample;
};

/// |support given w| = |support given apply(rule, w)| for every positive
/// future w of length n+1 where both conditionals have stabilized.
inline SupportSizeResult support_size_tau_invariance(const Measure& m, const LocalRule& rule, std::size_t n,
                                                     const Limits& limits = {}) {
  if (n == 0) throw Error("support size check needs n >= 1");
  SupportAtlas atlas(m, n, n + 1, limits);
  SupportSizeResult r;
  for (const auto& [w, e] : atlas.futures(n + 1)) {
    const auto* img = atlas.find(automeasure::apply(rule, w));
    if (!e.stable || img == nullptr || !img->stable) {
      ++r.skipped;
      continue;
    }
    ++r.compared;
    if (e.report.support.size() != img->report.support.size()) {
      r.holds = false;
      if (!r.counterexample) r.counterexample = w;
    }
  }
  return r;
}

/// Fills coset_of when the support is a right coset H·g (support·g⁻¹ a subgroup).
inline void annotate_coset(ConditionalReport& r, const FiniteGroup& g) {
  if (r.probs.size() != g.order()) throw Error("measure alphabet is not the group");
  const Element rep = r.support.front();
  std::vector<Element> h;
  for (Symbol s : r.support) h.push_back(g.mul(s, g.inverse(rep)));
  std::sort(h.begin(), h.end());
  if (is_subgroup(g, h)) {
    r.coset_of = Subgroup{std::move(h)};
    r.coset_violation = false;
  } else {
    r.coset_of.reset();
    r.coset_violation = true;
  }
}

inline ConditionalReport coset_report(const Measure& m, const FiniteGroup& g, const Word& w,
                                      const Limits& limits = {}) {
  auto r = conditional_at_zero(m, w, limits);
  annotate_coset(r, g);
  return r;
}

/// Coset reports for every positive future of length n.
inline std::vector<ConditionalReport> coset_census(const Measure& m, const FiniteGroup& g, std::size_t n,
                                                   const Limits& limits = {}) {
  require_depth(n + 1, limits);
  std::vector<ConditionalReport> out;
  for (auto& [w, e] : SupportAtlas::build(m, n, limits.workers)) {
    auto r = e.report;
    annotate_coset(r, g);
    out.push_back(std::move(r));
  }
  return out;
}

struct UPartition {
  std::vector<Element> coset;                // H·w_1
  std::vector<std::vector<Element>> blocks;  // elements of the coset grouped by forced support
  std::vector<std::vector<Symbol>> forced;   // support at index 0 for each block
  std::vector<Element> zero_mass;            // elements of the coset that cannot occur
  std::optional<Subgroup> u;
  std::string diagnostic;
};

/// Splits H·w_1 by the support each y forces at index 0 given (y, w_2..w_n),
/// and recovers U ≤ H when the blocks are exactly right cosets U·y.
inline UPartition u_subgroup_partition(const Measure& m, const FiniteGroup& g, const Subgroup& h, const Word& w,
                                       const Limits& limits = {}) {
  if (w.empty()) throw Error("u_subgroup_partition needs a nonempty conditioning word");
  if (m.alphabet_size() != g.order()) throw Error("measure alphabet is not the group");
  UPartition out;
  out.coset = right_coset(g, h, w[0]);
  std::map<std::vector<Symbol>, std::vector<Element>> by_support;
  Word future = w;
  for (Element y : out.coset) {
    future[0] = static_cast<Symbol>(y);
    Word v(future.size() + 1);
    std::copy(future.begin(), future.end(), v.begin() + 1);
    std::vector<Rational> joint(g.order());
    Rational total = 0;
    for (Symbol a = 0; a < g.order(); ++a) {
      v[0] = a;
      require_depth(v.size(), limits);
      joint[a] = m.mass(v);
      total += joint[a];
    }
    if (total == 0) {
      out.zero_mass.push_back(y);
      continue;
    }
    by_support[make_report(future, joint).support].push_back(y);
  }
  // Blocks in order of their smallest element.
  std::vector<std::pair<std::vector<Element>, std::vector<Symbol>>> blocks;
  for (auto& [s, b] : by_support) blocks.emplace_back(b, s);
  std::sort(blocks.begin(), blocks.end());
  for (auto& [b, s] : blocks) {
    out.blocks.push_back(b);
    out.forced.push_back(s);
  }
  if (out.blocks.empty()) {
    out.diagnostic = "every element of the coset has zero mass";
    return out;
  }
  if (!out.zero_mass.empty()) {
    out.diagnostic = "zero-mass elements leave the coset uncovered";
    return out;
  }
  const Element y0 = out.blocks.front().front();
  std::vector<Element> u;
  for (Element y : out.blocks.front()) u.push_back(g.mul(y, g.inverse(y0)));
  std::sort(u.begin(), u.end());
  if (!is_subgroup(g, u)) {
    out.diagnostic = "first block is not a right coset of a subgroup";
    return out;
  }
  Subgroup cand{u};
  if (!is_subset(cand, h)) {
    out.diagnostic = "block subgroup is not contained in H";
    return out;
  }
  for (const auto& b : out.blocks) {
    if (right_coset(g, cand, b.front()) != b) {
      out.diagnostic = "blocks are not right cosets of a common subgroup";
      return out;
    }
  }
  out.u = std::move(cand);
  return out;
}

/// Masses μ([v]) of preimages v of w under the rule, summed by v_0.
inline std::vector<Rational> preimage_masses(const Measure& m, const LocalRule& rule, const Word& w) {
  const std::size_t n = m.alphabet_size();
  const auto succ = successor_table(rule);
  std::vector<Rational> by_first(n, Rational(0));
  Word v;
  auto extend = [&](auto&& self, Symbol first) -> void {
    const Rational mass = m.mass(v);
    if (mass == 0) return;
    if (v.size() == w.size() + 1) {
      by_first[first] += mass;
      return;
    }
    const std::size_t i = v.size() - 1;
    for (Symbol b : succ[v[i] * n + w[i]]) {
      v.push_back(b);
      self(self, first);
      v.pop_back();
    }
  };
  for (Symbol a = 0; a < n; ++a) {
    v.assign(1, a);
    extend(extend, a);
  }
  return by_first;
}

/// Distribution of x_0 given τ(x) starts with w: the atom of x in τ⁻¹B is fixed by x_0.
inline ConditionalReport conditional_given_tau(const Measure& m, const LocalRule& rule, const Word& w,
                                               const Limits& limits = {}) {
  require_depth(w.size() + 1, limits);
  if (rule.size() != m.alphabet_size()) throw Error("rule and measure alphabets differ in size");
  const auto joint = preimage_masses(m, rule, w);
  Rational total = 0;
  for (const auto& j : joint) total += j;
  if (total == 0) throw Error("image cylinder has zero mass");
  return make_report(w, joint);
}

/// −Σ_w μ(τ⁻¹[w]) Σ_a p(a|w) ln p(a|w) over images w of length n.
inline double tau_log_integral(const Measure& m, const LocalRule& rule, std::size_t n, const Limits& limits = {}) {
  require_depth(n + 1, limits);
  std::map<Word, std::vector<Rational>> joint;
  for (const auto& v : positive_words(m, n + 1, limits.workers)) {
    auto& slot = joint[automeasure::apply(rule, v.word)];
    if (slot.empty()) slot.assign(m.alphabet_size(), Rational(0));
    slot[v.word[0]] += v.mass;
  }
  double total = 0.0;
  for (const auto& [w, j] : joint) {
    Rational mass = 0;
    for (const auto& x : j) mass += x;
    for (const auto& x : j) {
      if (x == 0) continue;
      const Rational p = x / mass;
      total -= to_double(x) * log_rational(p);
    }
  }
  return total;
}

struct TailProbeResult {
  Rational determined_mass;
  std::size_t groups = 0;
  std::size_t determined_groups = 0;
};

/// Mass of length-n futures whose index-0 support is the same for every
/// positive choice of the first k future symbols (the rest held fixed).
inline TailProbeResult tail_measurability_probe(const Measure& m, std::size_t k, std::size_t n,
                                                const Limits& limits = {}) {
  if (k < 1 || k >= n) throw Error("tail probe needs 1 <= k < n");
  require_depth(n + 1, limits);
  std::map<Word, std::vector<const SupportAtlas::Entry*>> by_suffix;
  const auto table = SupportAtlas::build(m, n, limits.workers);
  for (const auto& [w, e] : table) by_suffix[Word(w.begin() + static_cast<std::ptrdiff_t>(k), w.end())].push_back(&e);
  TailProbeResult r;
  r.determined_mass = 0;
  for (const auto& [suffix, entries] : by_suffix) {
    ++r.groups;
    const bool same = std::all_of(entries.begin(), entries.end(),
                                  [&](const auto* e) { return e->report.support == entries.front()->report.support; });
    if (!same) continue;
    ++r.determined_groups;
    for (const auto* e : entries) r.determined_mass += e->report.mass;
  }
  return r;
}

}  // namespace automeasure
