#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "automeasure/conditionals.hpp"
#include "automeasure/groups.hpp"
#include "automeasure/lifted.hpp"
#include "automeasure/measures.hpp"

namespace automeasure {

/// A measure ν on set words over Λ, carried as an ordinary measure over an
/// alphabet of distinct nonempty subsets ("set symbols").
class SetMeasure {
 public:
  SetMeasure(Alphabet base, std::vector<Mask> symbols, MeasurePtr process)
      : base_(std::move(base)), symbols_(std::move(symbols)), process_(std::move(process)) {
    if (base_.size() > kMaxLiftedAlphabet) throw Error("set measures need |alphabet| <= 64");
    if (symbols_.size() != process_->alphabet_size()) throw Error("set symbol count differs from process alphabet");
    const Mask full = base_.size() == 64 ? ~Mask{0} : (Mask{1} << base_.size()) - 1;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      if (symbols_[i] == 0 || (symbols_[i] & ~full) != 0) throw Error("set symbol is empty or out of range");
      for (std::size_t j = 0; j < i; ++j)
        if (symbols_[j] == symbols_[i]) throw Error("set symbols must be distinct");
    }
  }

  const Alphabet& base_alphabet() const noexcept { return base_; }
  const std::vector<Mask>& symbols() const noexcept { return symbols_; }
  const MeasurePtr& process() const noexcept { return process_; }

  SetWord to_sets(const Word& w) const {
    SetWord s(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) s[i] = symbols_[w[i]];
    return s;
  }

  std::optional<Word> to_symbols_word(const SetWord& s) const {
    Word w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto it = std::find(symbols_.begin(), symbols_.end(), s[i]);
      if (it == symbols_.end()) return std::nullopt;
      w[i] = static_cast<Symbol>(it - symbols_.begin());
    }
    return w;
  }

  /// ν([A_0..A_n]); zero for components outside the symbol set.
  Rational mass(const SetWord& s) const {
    auto w = to_symbols_word(s);
    return w ? process_->mass(*w) : Rational(0);
  }

 private:
  Alphabet base_;
  std::vector<Mask> symbols_;
  MeasurePtr process_;
};

using SetMeasurePtr = std::shared_ptr<const SetMeasure>;

namespace detail {

inline Alphabet set_symbol_alphabet(const std::vector<Mask>& symbols, const Alphabet& base) {
  std::vector<std::string> labels;
  for (Mask m : symbols) labels.push_back(format_set(m, base));
  return Alphabet(std::move(labels));
}

}  // namespace detail

/// Point mass at the set word prefix · period^∞.
inline SetMeasurePtr set_atomic(Alphabet base, const SetWord& prefix, const SetWord& period) {
  std::vector<Mask> symbols;
  auto index = [&](Mask m) {
    auto it = std::find(symbols.begin(), symbols.end(), m);
    if (it != symbols.end()) return static_cast<Symbol>(it - symbols.begin());
    symbols.push_back(m);
    return static_cast<Symbol>(symbols.size() - 1);
  };
  Word p, q;
  for (Mask m : prefix) p.push_back(index(m));
  for (Mask m : period) q.push_back(index(m));
  auto labels = detail::set_symbol_alphabet(symbols, base);
  return std::make_shared<SetMeasure>(std::move(base), std::move(symbols),
                                      atomic(std::move(labels), std::move(p), std::move(q)));
}

/// ν on words of right cosets of H, driven by `process` over coset indices
/// in right_cosets() order (the identity coset is index 0).
inline SetMeasurePtr coset_process(const FiniteGroup& g, const Subgroup& h, MeasurePtr process) {
  const auto cosets = right_cosets(g, h);
  if (process->alphabet_size() != cosets.size()) throw Error("coset process alphabet must have |G|/|H| symbols");
  std::vector<Mask> symbols;
  for (const auto& c : cosets) symbols.push_back(to_mask(std::vector<Symbol>(c.begin(), c.end())));
  return std::make_shared<SetMeasure>(g.alphabet(), std::move(symbols), std::move(process));
}

inline SetMeasurePtr set_mixture(const std::vector<std::pair<Rational, SetMeasurePtr>>& parts) {
  if (parts.empty()) throw Error("set mixture needs at least one component");
  const Alphabet& base = parts.front().second->base_alphabet();
  std::vector<Mask> symbols;
  for (const auto& [w, s] : parts) {
    if (s->base_alphabet().size() != base.size()) throw Error("set mixture components must share an alphabet");
    for (Mask m : s->symbols())
      if (std::find(symbols.begin(), symbols.end(), m) == symbols.end()) symbols.push_back(m);
  }
  const Alphabet labels = detail::set_symbol_alphabet(symbols, base);
  std::vector<std::pair<Rational, MeasurePtr>> relabelled;
  for (const auto& [w, s] : parts) {
    std::vector<Symbol> map;
    for (Mask m : s->symbols())
      map.push_back(static_cast<Symbol>(std::find(symbols.begin(), symbols.end(), m) - symbols.begin()));
    relabelled.emplace_back(w, relabel(s->process(), labels, std::move(map)));
  }
  return std::make_shared<SetMeasure>(base, std::move(symbols), mixture(std::move(relabelled)));
}

inline SetMeasurePtr set_push_shift(const SetMeasurePtr& nu) {
  return std::make_shared<SetMeasure>(nu->base_alphabet(), nu->symbols(), push_shift(nu->process()));
}

namespace detail {

/// μ([a_0..a_n]) = Σ_{A_i ∋ a_i} ν([A_0..A_n]) / ∏|A_i|.
class SynthesizedMeasure final : public Measure {
 public:
  explicit SynthesizedMeasure(SetMeasurePtr nu)
      : Measure(nu->base_alphabet(), true), nu_(std::move(nu)) {
    const auto& syms = nu_->symbols();
    containing_.resize(alphabet_size());
    for (Symbol a = 0; a < alphabet_size(); ++a)
      for (std::size_t i = 0; i < syms.size(); ++i)
        if (syms[i] & singleton(a)) containing_[a].push_back(static_cast<Symbol>(i));
    weight_.reserve(syms.size());
    for (Mask m : syms) weight_.emplace_back(1, static_cast<unsigned long>(set_size(m)));
  }
  std::string kind() const override { return "synthesized"; }

 protected:
  Rational compute(const Word& w) const override {
    Rational total = 0;
    Word s;
    s.reserve(w.size());
    extend(w, s, Rational(1), total);
    return total;
  }

 private:
  void extend(const Word& w, Word& s, const Rational& weight, Rational& total) const {
    if (s.size() == w.size()) {
      total += weight * nu_->process()->mass(s);
      return;
    }
    for (Symbol c : containing_[w[s.size()]]) {
      s.push_back(c);
      if (nu_->process()->mass(s) != 0) extend(w, s, weight * weight_[c], total);
      s.pop_back();
    }
  }

  SetMeasurePtr nu_;
  std::vector<std::vector<Symbol>> containing_;
  std::vector<Rational> weight_;
};

}  // namespace detail

/// Builds μ from ν. The rule is only checked for left permutativity;
/// the formula itself does not use it.
inline MeasurePtr synthesize(const SetMeasurePtr& nu, const LocalRule& rule) {
  if (rule.size() != nu->base_alphabet().size()) throw Error("rule and set measure alphabets differ in size");
  if (!check_left_permutative(rule)) throw Error("synthesis requires a left-permutative rule");
  return std::make_shared<detail::SynthesizedMeasure>(nu);
}

struct SynthesisInvariance {
  InvarianceResult sigma;
  InvarianceResult tau;
};

inline SynthesisInvariance verify_synthesis_invariance(const SetMeasurePtr& nu, const LocalRule& rule, std::size_t n,
                                                       const Limits& limits = {}) {
  const auto mu = synthesize(nu, rule);
  return {check_shift_invariance(*mu, n, limits), check_rule_invariance(*mu, rule, n, limits)};
}

/// ν(τ′⁻¹[C]) = ν([C]) for all set words of length ≤ n.
inline InvarianceResult check_set_rule_invariance(const SetMeasure& nu, const LocalRule& rule, std::size_t n,
                                                  const Limits& limits = {}) {
  require_depth(n + 1, limits);
  const SetRule lifted(rule);
  InvarianceResult r;
  r.depth = n;
  for (std::size_t k = 1; k <= n; ++k) {
    std::map<SetWord, Rational> pushed, direct;
    for (const auto& v : positive_words(*nu.process(), k + 1, limits.workers))
      pushed[lifted.apply(nu.to_sets(v.word))] += v.mass;
    for (const auto& w : positive_words(*nu.process(), k, limits.workers)) direct.emplace(nu.to_sets(w.word), w.mass);
    if (pushed != direct) {
      r.invariant = false;
      return r;
    }
  }
  return r;
}

enum class RoundTripStatus { Pass, Fail, Inconclusive };

inline const char* to_string(RoundTripStatus s) {
  switch (s) {
    case RoundTripStatus::Pass: return "pass";
    case RoundTripStatus::Fail: return "fail";
    case RoundTripStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct RoundTripResult {
  RoundTripStatus status = RoundTripStatus::Inconclusive;
  bool zero_entropy_surrogate = false;
  bool injectivity_surrogate = false;
  Rational unstabilized_mass;
  std::string diagnostic;

  explicit operator bool() const noexcept { return status == RoundTripStatus::Pass; }
};

/// Pushes the synthesized μ through its support factor and compares with ν on
/// set words of length ≤ n. Each factor component conditions on at least
/// `margin` future symbols.
inline RoundTripResult round_trip_check(const SetMeasurePtr& nu, const LocalRule& rule, std::size_t n,
                                        std::size_t margin = 2, const Limits& limits = {}) {
  RoundTripResult r;
  r.unstabilized_mass = 0;
  if (!is_bipermutative(rule)) {
    r.diagnostic = "rule is not bi-permutative";
    return r;
  }
  // Zero-entropy surrogate: A_0 is determined by A_1..A_n on positive words.
  r.zero_entropy_surrogate = true;
  {
    std::map<Word, std::size_t> heads;
    for (const auto& v : positive_words(*nu->process(), n + 1, limits.workers))
      ++heads[Word(v.word.begin() + 1, v.word.end())];
    for (const auto& [tail, count] : heads)
      if (count != 1) r.zero_entropy_surrogate = false;
  }
  // Injectivity surrogate: set symbols in use are pairwise equal or disjoint.
  r.injectivity_surrogate = true;
  for (Mask a : nu->symbols())
    for (Mask b : nu->symbols())
      if (a != b && (a & b) != 0) r.injectivity_surrogate = false;
  if (!r.zero_entropy_surrogate || !r.injectivity_surrogate) {
    r.diagnostic = "hypotheses not verifiable at this depth";
    return r;
  }

  const auto mu = synthesize(nu, rule);
  const std::size_t len = n + margin;
  std::map<SetWord, Rational> pushed;
  for (const auto& img : pi_factor(*mu, len, margin, limits)) {
    const bool stable = std::all_of(img.stable.begin(), img.stable.begin() + static_cast<std::ptrdiff_t>(n),
                                    [](bool b) { return b; });
    if (!stable) {
      r.unstabilized_mass += img.mass;
      continue;
    }
    pushed[SetWord(img.sets.begin(), img.sets.begin() + static_cast<std::ptrdiff_t>(n))] += img.mass;
  }
  if (r.unstabilized_mass != 0) {
    r.diagnostic = "support factor has not stabilized on mass " + to_string(r.unstabilized_mass);
    return r;
  }
  std::map<SetWord, Rational> direct;
  for (const auto& w : positive_words(*nu->process(), n, limits.workers)) direct.emplace(nu->to_sets(w.word), w.mass);
  if (pushed == direct) {
    r.status = RoundTripStatus::Pass;
  } else {
    r.status = RoundTripStatus::Fail;
    r.diagnostic = "support-factor pushforward differs from nu";
  }
  return r;
}

struct DihedralLift {
  FiniteGroup group;
  Subgroup rotations;
  SetMeasurePtr nu;
  MeasurePtr mu;
};

/// Reads a Ledrappier-invariant zero-entropy measure on Z/2 as a measure on
/// the two cosets of C_m in D_m (m odd) and synthesizes over τ_{D_m}.
/// `check_depth` bounds the invariance and entropy checks on nu2.
inline DihedralLift dihedral_lift(std::size_t m, const MeasurePtr& nu2, std::size_t check_depth = 8,
                                  const Limits& limits = {}) {
  if (m % 2 == 0) throw Error("dihedral lift requires odd m");
  if (nu2->alphabet_size() != 2) throw Error("dihedral lift needs a measure over Z/2");
  const auto led = ledrappier_rule();
  if (!check_shift_invariance(*nu2, check_depth, limits)) throw Error("nu2 is not shift-invariant");
  if (!check_rule_invariance(*nu2, led, check_depth, limits)) throw Error("nu2 is not Ledrappier-invariant");
  const double rate = entropy_rate_estimate(*nu2, check_depth, limits);
  if (rate > 1e-9) throw Error("nu2 has positive entropy rate estimate " + std::to_string(rate));

  DihedralLift out;
  out.group = make_dihedral(m);
  std::vector<Element> rot(m);
  for (Element i = 0; i < m; ++i) rot[i] = i;
  out.rotations = make_subgroup(out.group, rot);
  // Coset index 0 is C_m (identity of D_m/C_m ≅ Z/2), index 1 is C_m·s.
  out.nu = coset_process(out.group, out.rotations, relabel(nu2, Alphabet({"C", "Cs"}), {0, 1}));
  out.mu = synthesize(out.nu, group_rule(out.group));
  return out;
}

}  // namespace automeasure
