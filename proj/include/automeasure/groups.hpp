#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "automeasure/core_rules.hpp"

namespace automeasure {

using Element = std::uint32_t;

inline constexpr std::size_t kMaxGroupOrder = 4096;

/// A finite group given by its Cayley table. Elements are dense indices.
class FiniteGroup {
 public:
  FiniteGroup() = default;

  /// Validates closure, identity, inverses and associativity (O(n^3)).
  FiniteGroup(std::vector<std::string> labels, std::vector<Element> cayley)
      : FiniteGroup(std::move(labels), std::move(cayley), Trusted{}) {
    const std::size_t n = order();
    for (Element a = 0; a < n; ++a)
      for (Element b = 0; b < n; ++b)
        for (Element c = 0; c < n; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) {
            throw Error("table is not associative at (" + label(a) + "," + label(b) + "," +
                        label(c) + ")");
          }
  }

  std::size_t order() const noexcept { return labels_.size(); }
  Element identity() const noexcept { return identity_; }
  Element mul(Element a, Element b) const { return cayley_[a * order() + b]; }
  Element inverse(Element a) const { return inverse_[a]; }
  const std::string& label(Element a) const { return labels_.at(a); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Element>& cayley() const noexcept { return cayley_; }

  Element index_of(const std::string& l) const {
    auto it = std::find(labels_.begin(), labels_.end(), l);
    if (it == labels_.end()) throw Error("unknown group element '" + l + "'");
    return static_cast<Element>(it - labels_.begin());
  }

  bool is_abelian() const {
    for (Element a = 0; a < order(); ++a)
      for (Element b = a + 1; b < order(); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  Alphabet alphabet() const { return Alphabet(labels_); }

  bool operator==(const FiniteGroup& o) const { return labels_ == o.labels_ && cayley_ == o.cayley_; }

  /// Constructors below build tables that are associative by construction.
  struct Trusted {};
  FiniteGroup(std::vector<std::string> labels, std::vector<Element> cayley, Trusted)
      : labels_(std::move(labels)), cayley_(std::move(cayley)) {
    const std::size_t n = labels_.size();
    if (n == 0) throw Error("group must be nonempty");
    if (n > kMaxGroupOrder) throw Error("group order exceeds " + std::to_string(kMaxGroupOrder));
    if (cayley_.size() != n * n) throw Error("Cayley table must be order x order");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != n) throw Error("duplicate element labels");
    for (Element v : cayley_)
      if (v >= n) throw Error("Cayley table entry out of range");

    std::optional<Element> id;
    for (Element e = 0; e < n && !id; ++e) {
      bool ok = true;
      for (Element a = 0; a < n && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
      if (ok) id = e;
    }
    if (!id) throw Error("table has no identity element");
    identity_ = *id;

    inverse_.assign(n, 0);
    for (Element a = 0; a < n; ++a) {
      std::optional<Element> inv;
      for (Element b = 0; b < n && !inv; ++b)
        if (mul(a, b) == identity_ && mul(b, a) == identity_) inv = b;
      if (!inv) throw Error("element '" + labels_[a] + "' has no two-sided inverse");
      inverse_[a] = *inv;
    }
  }

 private:
  std::vector<std::string> labels_;
  std::vector<Element> cayley_;
  Element identity_ = 0;
  std::vector<Element> inverse_;
};

/// Sorted element set; always a subgroup of the group it was built from.
struct Subgroup {
  std::vector<Element> elements;

  std::size_t order() const noexcept { return elements.size(); }
  bool contains(Element g) const { return std::binary_search(elements.begin(), elements.end(), g); }
  bool operator==(const Subgroup&) const = default;
  auto operator<=>(const Subgroup& o) const {
    if (order() != o.order()) return order() <=> o.order();
    return elements <=> o.elements;
  }
};

inline FiniteGroup make_cyclic(std::size_t n) {
  if (n < 1) throw Error("cyclic group needs n >= 1");
  if (n > kMaxGroupOrder) throw Error("group order exceeds " + std::to_string(kMaxGroupOrder));
  std::vector<std::string> labels;
  std::vector<Element> table(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    labels.push_back(std::to_string(a));
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = static_cast<Element>((a + b) % n);
  }
  return FiniteGroup(std::move(labels), std::move(table), FiniteGroup::Trusted{});
}

/// D_m of order 2m. Element r^k s^e has index k + m*e; s r s = r^-1.
/// Indices 0..m-1 are the rotations C_m.
inline FiniteGroup make_dihedral(std::size_t m) {
  if (m < 1) throw Error("dihedral group needs m >= 1");
  if (2 * m > kMaxGroupOrder) throw Error("group order exceeds " + std::to_string(kMaxGroupOrder));
  const std::size_t n = 2 * m;
  std::vector<std::string> labels(n);
  for (std::size_t k = 0; k < m; ++k) {
    labels[k] = "r" + std::to_string(k);
    labels[k + m] = "s" + std::to_string(k);
  }
  std::vector<Element> table(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t a = x % m, e = x / m;
    for (std::size_t y = 0; y < n; ++y) {
      const std::size_t b = y % m, f = y / m;
      const std::size_t k = e == 0 ? (a + b) % m : (a + m - b) % m;
      table[x * n + y] = static_cast<Element>(k + m * ((e + f) % 2));
    }
  }
  return FiniteGroup(std::move(labels), std::move(table), FiniteGroup::Trusted{});
}

/// Direct product; (g1,g2) has index g1*|G2| + g2.
inline FiniteGroup make_product(const FiniteGroup& g1, const FiniteGroup& g2) {
  const std::size_t n1 = g1.order(), n2 = g2.order(), n = n1 * n2;
  if (n > kMaxGroupOrder) throw Error("group order exceeds " + std::to_string(kMaxGroupOrder));
  std::vector<std::string> labels(n);
  std::vector<Element> table(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    labels[x] = "(" + g1.label(static_cast<Element>(x / n2)) + "," +
                g2.label(static_cast<Element>(x % n2)) + ")";
    for (std::size_t y = 0; y < n; ++y) {
      const Element a = g1.mul(static_cast<Element>(x / n2), static_cast<Element>(y / n2));
      const Element b = g2.mul(static_cast<Element>(x % n2), static_cast<Element>(y % n2));
      table[x * n + y] = static_cast<Element>(a * n2 + b);
    }
  }
  return FiniteGroup(std::move(labels), std::move(table), FiniteGroup::Trusted{});
}

/// Smallest subgroup containing the given elements.
inline Subgroup closure(const FiniteGroup& g, const std::vector<Element>& gens) {
  std::vector<char> in(g.order(), 0);
  std::vector<Element> elems{g.identity()};
  in[g.identity()] = 1;
  for (Element x : gens)
    if (!in[x]) {
      in[x] = 1;
      elems.push_back(x);
    }
  // Closing under right multiplication by generators suffices in a finite group.
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (Element x : gens) {
      const Element y = g.mul(elems[i], x);
      if (!in[y]) {
        in[y] = 1;
        elems.push_back(y);
      }
    }
  }
  std::sort(elems.begin(), elems.end());
  return Subgroup{std::move(elems)};
}

/// True if the set contains the identity and is closed under products.
inline bool is_subgroup(const FiniteGroup& g, const std::vector<Element>& set) {
  if (set.empty()) return false;
  std::vector<char> in(g.order(), 0);
  for (Element x : set) {
    if (x >= g.order()) return false;
    in[x] = 1;
  }
  if (!in[g.identity()]) return false;
  for (Element a : set)
    for (Element b : set)
      if (!in[g.mul(a, b)]) return false;
  return true;
}

inline Subgroup make_subgroup(const FiniteGroup& g, std::vector<Element> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  if (!is_subgroup(g, elems)) throw Error("element set is not a subgroup");
  return Subgroup{std::move(elems)};
}

inline Subgroup trivial_subgroup(const FiniteGroup& g) { return Subgroup{{g.identity()}}; }

inline Subgroup whole_group(const FiniteGroup& g) {
  std::vector<Element> all(g.order());
  for (Element i = 0; i < g.order(); ++i) all[i] = i;
  return Subgroup{std::move(all)};
}

/// All subgroups, sorted by (order, elements).
inline std::vector<Subgroup> subgroups(const FiniteGroup& g) {
  std::set<Subgroup> found;
  std::vector<Subgroup> frontier;
  for (Element x = 0; x < g.order(); ++x) {
    Subgroup c = closure(g, {x});
    if (found.insert(c).second) frontier.push_back(std::move(c));
  }
  // Every subgroup arises by adjoining one element at a time to a cyclic one.
  std::vector<Subgroup> cyclic(found.begin(), found.end());
  while (!frontier.empty()) {
    std::vector<Subgroup> next;
    for (const auto& h : frontier) {
      for (const auto& c : cyclic) {
        if (std::includes(h.elements.begin(), h.elements.end(), c.elements.begin(), c.elements.end()))
          continue;
        std::vector<Element> gens = h.elements;
        gens.insert(gens.end(), c.elements.begin(), c.elements.end());
        Subgroup k = closure(g, gens);
        if (found.insert(k).second) next.push_back(std::move(k));
      }
    }
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

inline bool is_subset(const Subgroup& small, const Subgroup& big) {
  return std::includes(big.elements.begin(), big.elements.end(), small.elements.begin(),
                       small.elements.end());
}

/// Right coset H·x as a sorted element list.
inline std::vector<Element> right_coset(const FiniteGroup& g, const Subgroup& h, Element x) {
  std::vector<Element> c;
  c.reserve(h.order());
  for (Element e : h.elements) c.push_back(g.mul(e, x));
  std::sort(c.begin(), c.end());
  return c;
}

/// Right cosets H·g, the identity coset first, then by smallest unseen element.
inline std::vector<std::vector<Element>> right_cosets(const FiniteGroup& g, const Subgroup& h) {
  std::vector<std::vector<Element>> out;
  std::vector<char> seen(g.order(), 0);
  auto take = [&](Element x) {
    auto c = right_coset(g, h, x);
    for (Element e : c) seen[e] = 1;
    out.push_back(std::move(c));
  };
  take(g.identity());
  for (Element x = 0; x < g.order(); ++x)
    if (!seen[x]) take(x);
  return out;
}

inline Subgroup normalizer(const FiniteGroup& g, const Subgroup& h) {
  std::vector<Element> n;
  for (Element x = 0; x < g.order(); ++x) {
    bool ok = true;
    for (Element e : h.elements) {
      if (!h.contains(g.mul(g.mul(x, e), g.inverse(x)))) {
        ok = false;
        break;
      }
    }
    if (ok) n.push_back(x);
  }
  return Subgroup{std::move(n)};
}

inline bool is_normal(const FiniteGroup& g, const Subgroup& h) {
  return normalizer(g, h).order() == g.order();
}

/// G/H with cosets ordered as right_cosets(); labels are "H" + representative.
inline FiniteGroup quotient(const FiniteGroup& g, const Subgroup& h) {
  if (!is_normal(g, h)) throw Error("quotient requires a normal subgroup");
  const auto cosets = right_cosets(g, h);
  const std::size_t n = cosets.size();
  std::vector<std::size_t> coset_of(g.order());
  for (std::size_t i = 0; i < n; ++i)
    for (Element e : cosets[i]) coset_of[e] = i;
  std::vector<std::string> labels(n);
  std::vector<Element> table(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = "H" + g.label(cosets[i].front());
    for (std::size_t j = 0; j < n; ++j)
      table[i * n + j] = static_cast<Element>(coset_of[g.mul(cosets[i].front(), cosets[j].front())]);
  }
  return FiniteGroup(std::move(labels), std::move(table), FiniteGroup::Trusted{});
}

/// True if some bijection of elements carries one table onto the other.
/// Brute-force; for small groups only.
inline bool is_isomorphic(const FiniteGroup& a, const FiniteGroup& b) {
  const std::size_t n = a.order();
  if (n != b.order() || n > 10) {
    if (n != b.order()) return false;
    throw Error("is_isomorphic is limited to order <= 10");
  }
  std::vector<Element> perm(n);
  for (Element i = 0; i < n; ++i) perm[i] = i;
  do {
    bool ok = true;
    for (Element x = 0; x < n && ok; ++x)
      for (Element y = 0; y < n && ok; ++y) ok = perm[a.mul(x, y)] == b.mul(perm[x], perm[y]);
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

/// τ_G: (x_i, x_{i+1}) ↦ x_i · x_{i+1}.
inline LocalRule group_rule(const FiniteGroup& g) {
  std::vector<Symbol> table(g.cayley().begin(), g.cayley().end());
  return LocalRule(g.alphabet(), std::move(table));
}

/// r(a,b) = b·a⁻¹, i.e. b − a in additive notation. Abelian groups only.
inline LocalRule difference_rule(const FiniteGroup& g) {
  if (!g.is_abelian()) throw Error("difference rule requires an Abelian group");
  return LocalRule::from_function(g.alphabet(), [&](Symbol a, Symbol b) { return g.mul(b, g.inverse(a)); });
}

/// Sufficient condition for zero entropy of the support factor: H normal and
/// |G|/|H| < |H|/C, with C the largest order of a proper subgroup of H.
/// The trivial subgroup has no proper subgroup and never qualifies.
inline bool zero_ent_suff_check(const FiniteGroup& g, const Subgroup& h) {
  if (!is_normal(g, h)) return false;
  std::size_t c = 0;
  for (const auto& k : subgroups(g))
    if (k.order() < h.order() && is_subset(k, h)) c = std::max(c, k.order());
  if (c == 0) return false;
  // |G|/|H| < |H|/C  <=>  |G|·C < |H|².
  return g.order() * c < h.order() * h.order();
}

}  // namespace automeasure
