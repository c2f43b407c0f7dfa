#pragma once

#include <cstddef>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "automeasure/core_rules.hpp"
#include "automeasure/groups.hpp"
#include "automeasure/parallel.hpp"
#include "automeasure/rational.hpp"

namespace automeasure {

inline constexpr std::size_t kDefaultDepthCap = 14;

/// Default cap on the length of queried cylinders; AUTOMEASURE_DEPTH_CAP overrides.
inline std::size_t default_depth_cap() {
  if (const char* env = std::getenv("AUTOMEASURE_DEPTH_CAP")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultDepthCap;
}

struct Limits {
  std::size_t depth_cap = default_depth_cap();
  unsigned workers = 1;
};

class DepthCapExceeded : public Error {
 public:
  DepthCapExceeded(std::size_t len, std::size_t cap)
      : Error("cylinder length " + std::to_string(len) + " exceeds depth cap " + std::to_string(cap)) {}
};

inline void require_depth(std::size_t len, const Limits& limits) {
  if (len > limits.depth_cap) throw DepthCapExceeded(len, limits.depth_cap);
}

/// A probability measure on Λ^N0 given by its exact cylinder values μ([w]).
/// Nodes are immutable once built; the memo behaves as if queries were
/// sequential, so a measure may be shared across threads.
class Measure {
 public:
  virtual ~Measure() = default;
  Measure(const Measure&) = delete;
  Measure& operator=(const Measure&) = delete;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }

  Rational mass(const Word& w) const {
    if (w.empty()) return Rational(1);
    if (!memoize_) return compute(w);
    {
      std::shared_lock lock(memo_mutex_);
      if (auto it = memo_.find(w); it != memo_.end()) return it->second;
    }
    Rational value = compute(w);
    std::unique_lock lock(memo_mutex_);
    return memo_.try_emplace(w, std::move(value)).first->second;
  }

  virtual std::string kind() const = 0;

 protected:
  Measure(Alphabet alphabet, bool memoize) : alphabet_(std::move(alphabet)), memoize_(memoize) {}

  /// Only called with nonempty words.
  virtual Rational compute(const Word& w) const = 0;

 private:
  Alphabet alphabet_;
  bool memoize_;
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<Word, Rational, WordHash> memo_;
};

using MeasurePtr = std::shared_ptr<const Measure>;

namespace detail {

inline Rational inverse_power(std::size_t base, std::size_t exp) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), base, exp);
  return Rational(mpz_class(1), den);
}

class UniformMeasure final : public Measure {
 public:
  UniformMeasure(Alphabet a, std::vector<char> allowed, std::size_t count)
      : Measure(std::move(a), false), allowed_(std::move(allowed)), count_(count) {}
  std::string kind() const override { return "uniform_subset"; }

 protected:
  Rational compute(const Word& w) const override {
    for (Symbol s : w)
      if (!allowed_[s]) return Rational(0);
    return inverse_power(count_, w.size());
  }

 private:
  std::vector<char> allowed_;
  std::size_t count_;
};

class PinnedInterleaveMeasure final : public Measure {
 public:
  PinnedInterleaveMeasure(MeasurePtr base, Symbol pin, unsigned phase)
      : Measure(base->alphabet(), false), base_(std::move(base)), pin_(pin), phase_(phase % 2) {}
  std::string kind() const override { return "pinned_interleave"; }

 protected:
  Rational compute(const Word& w) const override {
    Word free;
    free.reserve(w.size() / 2 + 1);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i % 2 == phase_) {
        if (w[i] != pin_) return Rational(0);
      } else {
        free.push_back(w[i]);
      }
    }
    return base_->mass(free);
  }

 private:
  MeasurePtr base_;
  Symbol pin_;
  unsigned phase_;
};

class ShiftPushMeasure final : public Measure {
 public:
  explicit ShiftPushMeasure(MeasurePtr base) : Measure(base->alphabet(), true), base_(std::move(base)) {}
  std::string kind() const override { return "push_shift"; }

 protected:
  Rational compute(const Word& w) const override {
    Word v(w.size() + 1);
    std::copy(w.begin(), w.end(), v.begin() + 1);
    Rational total = 0;
    for (Symbol a = 0; a < alphabet_size(); ++a) {
      v[0] = a;
      total += base_->mass(v);
    }
    return total;
  }

 private:
  MeasurePtr base_;
};

/// τ_*μ([w]) = Σ μ([v]) over v with apply(rule, v) = w, enumerated left to
/// right through the successor lists and pruned on zero-mass prefixes.
class RulePushMeasure final : public Measure {
 public:
  RulePushMeasure(MeasurePtr base, LocalRule rule)
      : Measure(base->alphabet(), true), base_(std::move(base)), rule_(std::move(rule)),
        succ_(successor_table(rule_)) {}
  std::string kind() const override { return "push_rule"; }

 protected:
  Rational compute(const Word& w) const override {
    Rational total = 0;
    Word v;
    v.reserve(w.size() + 1);
    for (Symbol a = 0; a < alphabet_size(); ++a) {
      v.assign(1, a);
      extend(w, v, total);
    }
    return total;
  }

 private:
  void extend(const Word& w, Word& v, Rational& total) const {
    const Rational m = base_->mass(v);
    if (m == 0) return;
    if (v.size() == w.size() + 1) {
      total += m;
      return;
    }
    const std::size_t i = v.size() - 1;
    for (Symbol b : succ_[v[i] * alphabet_size() + w[i]]) {
      v.push_back(b);
      extend(w, v, total);
      v.pop_back();
    }
  }

  MeasurePtr base_;
  LocalRule rule_;
  std::vector<std::vector<Symbol>> succ_;
};

/// Pushforward through x ↦ ((τ^i x)_0)_i.
class ColumnPushMeasure final : public Measure {
 public:
  ColumnPushMeasure(MeasurePtr base, LocalRule rule)
      : Measure(base->alphabet(), true), base_(std::move(base)), rule_(std::move(rule)) {}
  std::string kind() const override { return "push_column"; }

 protected:
  Rational compute(const Word& u) const override {
    // Cell v_i of a preimage fixes column entry i, so extend cell by cell.
    Rational total = 0;
    Word v;
    extend(u, v, total);
    return total;
  }

 private:
  void extend(const Word& u, Word& v, Rational& total) const {
    if (v.size() == u.size()) {
      total += base_->mass(v);
      return;
    }
    for (Symbol a = 0; a < alphabet_size(); ++a) {
      v.push_back(a);
      if (base_->mass(v) != 0 && column_code(rule_, v).back() == u[v.size() - 1]) extend(u, v, total);
      v.pop_back();
    }
  }

  MeasurePtr base_;
  LocalRule rule_;
};

class MixtureMeasure final : public Measure {
 public:
  MixtureMeasure(Alphabet a, std::vector<std::pair<Rational, MeasurePtr>> parts)
      : Measure(std::move(a), true), parts_(std::move(parts)) {}
  std::string kind() const override { return "mixture"; }

 protected:
  Rational compute(const Word& w) const override {
    Rational total = 0;
    for (const auto& [weight, m] : parts_) total += weight * m->mass(w);
    return total;
  }

 private:
  std::vector<std::pair<Rational, MeasurePtr>> parts_;
};

class AtomicMeasure final : public Measure {
 public:
  AtomicMeasure(Alphabet a, Word prefix, Word period)
      : Measure(std::move(a), false), prefix_(std::move(prefix)), period_(std::move(period)) {}
  std::string kind() const override { return "atomic"; }

  Symbol at(std::size_t i) const {
    return i < prefix_.size() ? prefix_[i] : period_[(i - prefix_.size()) % period_.size()];
  }

 protected:
  Rational compute(const Word& w) const override {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] != at(i)) return Rational(0);
    return Rational(1);
  }

 private:
  Word prefix_;
  Word period_;
};

/// Independent coupling over the product alphabet; first factor most significant.
class ProductMeasure final : public Measure {
 public:
  ProductMeasure(Alphabet a, std::vector<MeasurePtr> factors)
      : Measure(std::move(a), true), factors_(std::move(factors)) {}
  std::string kind() const override { return "product"; }

 protected:
  Rational compute(const Word& w) const override {
    std::vector<Word> parts(factors_.size(), Word(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::size_t s = w[i];
      for (std::size_t f = factors_.size(); f-- > 0;) {
        const std::size_t k = factors_[f]->alphabet_size();
        parts[f][i] = static_cast<Symbol>(s % k);
        s /= k;
      }
    }
    Rational total = 1;
    for (std::size_t f = 0; f < factors_.size() && total != 0; ++f) total *= factors_[f]->mass(parts[f]);
    return total;
  }

 private:
  std::vector<MeasurePtr> factors_;
};

/// Injective relabelling of symbols into a (possibly larger) alphabet.
class RelabelMeasure final : public Measure {
 public:
  RelabelMeasure(MeasurePtr base, Alphabet target, std::vector<Symbol> map)
      : Measure(std::move(target), false), base_(std::move(base)) {
    inverse_.assign(alphabet_size(), kNone);
    for (std::size_t s = 0; s < map.size(); ++s) {
      if (map[s] >= alphabet_size() || inverse_[map[s]] != kNone) throw Error("relabel map must be injective");
      inverse_[map[s]] = static_cast<Symbol>(s);
    }
  }
  std::string kind() const override { return "relabel"; }

 protected:
  Rational compute(const Word& w) const override {
    Word v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (inverse_[w[i]] == kNone) return Rational(0);
      v[i] = inverse_[w[i]];
    }
    return base_->mass(v);
  }

 private:
  static constexpr Symbol kNone = 0xFFFF;
  MeasurePtr base_;
  std::vector<Symbol> inverse_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Constructors

inline MeasurePtr uniform(Alphabet a) {
  const std::size_t n = a.size();
  return std::make_shared<detail::UniformMeasure>(std::move(a), std::vector<char>(n, 1), n);
}

inline MeasurePtr uniform_on_subset(Alphabet a, const std::vector<Symbol>& subset) {
  std::vector<char> allowed(a.size(), 0);
  std::size_t count = 0;
  for (Symbol s : subset) {
    if (s >= a.size()) throw Error("subset symbol out of range");
    if (!allowed[s]) ++count;
    allowed[s] = 1;
  }
  if (count == 0) throw Error("uniform_on_subset needs a nonempty subset");
  return std::make_shared<detail::UniformMeasure>(std::move(a), std::move(allowed), count);
}

/// I.i.d. uniform on the elements of H, as a measure on G^N0.
inline MeasurePtr subgroup_uniform(const FiniteGroup& g, const Subgroup& h) {
  return uniform_on_subset(g.alphabet(), std::vector<Symbol>(h.elements.begin(), h.elements.end()));
}

/// Positions ≡ phase (mod 2) carry `pin`; the remaining positions, in order,
/// are distributed as `base`.
inline MeasurePtr pinned_interleave(MeasurePtr base, Symbol pin, unsigned phase) {
  if (pin >= base->alphabet_size()) throw Error("pin symbol out of range");
  return std::make_shared<detail::PinnedInterleaveMeasure>(std::move(base), pin, phase);
}

/// σ_*μ.
inline MeasurePtr push_shift(MeasurePtr base) {
  return std::make_shared<detail::ShiftPushMeasure>(std::move(base));
}

/// τ_*μ.
inline MeasurePtr push_rule(MeasurePtr base, LocalRule rule) {
  if (rule.size() != base->alphabet_size()) throw Error("rule and measure alphabets differ in size");
  return std::make_shared<detail::RulePushMeasure>(std::move(base), std::move(rule));
}

inline MeasurePtr push_column(MeasurePtr base, LocalRule rule) {
  if (rule.size() != base->alphabet_size()) throw Error("rule and measure alphabets differ in size");
  return std::make_shared<detail::ColumnPushMeasure>(std::move(base), std::move(rule));
}

inline MeasurePtr mixture(std::vector<std::pair<Rational, MeasurePtr>> parts) {
  if (parts.empty()) throw Error("mixture needs at least one component");
  Rational total = 0;
  for (auto& [w, m] : parts) {
    w.canonicalize();
    if (w <= 0) throw Error("mixture weights must be positive");
    if (m->alphabet_size() != parts.front().second->alphabet_size())
      throw Error("mixture components must share an alphabet");
    total += w;
  }
  if (total != 1) throw Error("mixture weights sum to " + to_string(total) + ", expected 1/1");
  Alphabet a = parts.front().second->alphabet();
  return std::make_shared<detail::MixtureMeasure>(std::move(a), std::move(parts));
}

/// Point mass at prefix · period^∞.
inline MeasurePtr atomic(Alphabet a, Word prefix, Word period) {
  if (period.empty()) throw Error("atomic measure needs a nonempty period");
  if (!a.contains(prefix) || !a.contains(period)) throw Error("atomic point symbol out of range");
  return std::make_shared<detail::AtomicMeasure>(std::move(a), std::move(prefix), std::move(period));
}

inline MeasurePtr product(std::vector<MeasurePtr> factors) {
  if (factors.empty()) throw Error("product needs at least one factor");
  std::vector<std::string> labels{""};
  for (const auto& f : factors) {
    std::vector<std::string> next;
    for (const auto& l : labels)
      for (const auto& s : f->alphabet().labels()) next.push_back(l.empty() ? s : l + "," + s);
    labels = std::move(next);
  }
  if (factors.size() > 1)
    for (auto& l : labels) l = "(" + l + ")";
  return std::make_shared<detail::ProductMeasure>(Alphabet(std::move(labels)), std::move(factors));
}

inline MeasurePtr relabel(MeasurePtr base, Alphabet target, std::vector<Symbol> map) {
  if (map.size() != base->alphabet_size()) throw Error("relabel map must cover the source alphabet");
  return std::make_shared<detail::RelabelMeasure>(std::move(base), std::move(target), std::move(map));
}

// ---------------------------------------------------------------------------
// Queries

inline Rational evaluate(const Measure& m, const Word& w, const Limits& limits = {}) {
  require_depth(w.size(), limits);
  if (!m.alphabet().contains(w)) throw Error("word contains a symbol outside the alphabet");
  return m.mass(w);
}

struct WeightedWord {
  Word word;
  Rational mass;
};

namespace detail {

inline void collect_positive(const Measure& m, Word& prefix, std::size_t n, std::vector<WeightedWord>& out) {
  const Rational mass = m.mass(prefix);
  if (mass == 0) return;
  if (prefix.size() == n) {
    out.push_back({prefix, mass});
    return;
  }
  for (Symbol a = 0; a < m.alphabet_size(); ++a) {
    prefix.push_back(a);
    collect_positive(m, prefix, n, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// All words of length n with positive mass, in lexicographic order. Work is
/// split by first symbol; zero-mass prefixes are never extended.
inline std::vector<WeightedWord> positive_words(const Measure& m, std::size_t n, unsigned workers = 1) {
  if (n == 0) return {{Word{}, Rational(1)}};
  auto parts = parallel_map<std::vector<WeightedWord>>(m.alphabet_size(), workers, [&](std::size_t a) {
    std::vector<WeightedWord> out;
    Word prefix{static_cast<Symbol>(a)};
    detail::collect_positive(m, prefix, n, out);
    return out;
  });
  std::vector<WeightedWord> all;
  for (auto& p : parts)
    for (auto& w : p) all.push_back(std::move(w));
  return all;
}

struct InvarianceResult {
  bool invariant = true;
  std::size_t depth = 0;
  std::optional<Word> counterexample;

  explicit operator bool() const noexcept { return invariant; }
};

namespace detail {

/// Compares μ with the pushforward whose mass on [w] is accumulated from
/// positive words v of length |w|+1 via `image(v)`.
template <class Image>
InvarianceResult compare_with_pushforward(const Measure& m, std::size_t n, unsigned workers, Image&& image) {
  InvarianceResult result;
  result.depth = n;
  for (std::size_t k = 1; k <= n; ++k) {
    std::map<Word, Rational> pushed;
    for (const auto& v : positive_words(m, k + 1, workers)) pushed[image(v.word)] += v.mass;
    std::map<Word, Rational> direct;
    for (const auto& w : positive_words(m, k, workers)) direct.emplace(w.word, w.mass);
    if (pushed != direct) {
      result.invariant = false;
      auto a = pushed.begin();
      auto b = direct.begin();
      while (a != pushed.end() && b != direct.end() && *a == *b) {
        ++a;
        ++b;
      }
      if (a == pushed.end()) result.counterexample = b->first;
      else if (b == direct.end()) result.counterexample = a->first;
      else result.counterexample = std::min(a->first, b->first);
      return result;
    }
  }
  return result;
}

}  // namespace detail

/// μ([w]) = Σ_a μ([a·w]) for every |w| ≤ n, exactly.
inline InvarianceResult check_shift_invariance(const Measure& m, std::size_t n, const Limits& limits = {}) {
  require_depth(n + 1, limits);
  return detail::compare_with_pushforward(m, n, limits.workers,
                                          [](const Word& v) { return Word(v.begin() + 1, v.end()); });
}

/// μ([w]) = μ(τ⁻¹[w]) for every |w| ≤ n, exactly.
inline InvarianceResult check_rule_invariance(const Measure& m, const LocalRule& rule, std::size_t n,
                                              const Limits& limits = {}) {
  require_depth(n + 1, limits);
  if (rule.size() != m.alphabet_size()) throw Error("rule and measure alphabets differ in size");
  return detail::compare_with_pushforward(m, n, limits.workers, [&](const Word& v) { return automeasure::apply(rule, v); });
}

/// μ([w]) = Σ_a μ([w·a]) for every positive |w| < n.
inline bool check_consistency(const Measure& m, std::size_t n, unsigned workers = 1) {
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& w : positive_words(m, k, workers)) {
      Rational total = 0;
      Word v = w.word;
      v.push_back(0);
      for (Symbol a = 0; a < m.alphabet_size(); ++a) {
        v.back() = a;
        total += m.mass(v);
      }
      if (total != w.mass) return false;
    }
  }
  return true;
}

/// H_n = −Σ_{|w|=n} μ(w) ln μ(w), summed in lexicographic order.
inline double block_entropy(const Measure& m, std::size_t n, const Limits& limits = {}) {
  require_depth(n, limits);
  double h = 0.0;
  for (const auto& w : positive_words(m, n, limits.workers)) h -= to_double(w.mass) * log_rational(w.mass);
  return h;
}

/// H_n − H_{n−1}.
inline double entropy_rate_estimate(const Measure& m, std::size_t n, const Limits& limits = {}) {
  if (n == 0) throw Error("entropy rate needs n >= 1");
  return block_entropy(m, n, limits) - block_entropy(m, n - 1, limits);
}

}  // namespace automeasure
