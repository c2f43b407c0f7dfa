#pragma once

// JSON descriptions of rules, groups, measures and set measures.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "automeasure/core_rules.hpp"
#include "automeasure/groups.hpp"
#include "automeasure/measures.hpp"
#include "automeasure/synthesis.hpp"

namespace automeasure::io {

using nlohmann::json;

/// Malformed input; `where` is a file name plus JSON pointer or byte offset.
class InputError : public Error {
 public:
  InputError(const std::string& where, const std::string& what) : Error(where + ": " + what) {}
};

struct Source {
  std::string name;
  json doc;
  std::string text;
};

inline Source load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  Source s{path, {}, ss.str()};
  try {
    s.doc = json::parse(s.text);
  } catch (const json::parse_error& e) {
    throw InputError(path + " at byte " + std::to_string(e.byte), e.what());
  }
  return s;
}

/// 64-bit FNV-1a of the raw file bytes, as 16 hex digits.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 15];
  return out;
}

class Parser {
 public:
  explicit Parser(std::string file) : file_(std::move(file)) {}

  LocalRule rule(const json& j, const std::string& at = "") const {
    expect_object(j, at);
    if (j.contains("group_rule")) return group_rule(group(j["group_rule"], at + "/group_rule"));
    if (j.contains("difference_rule")) {
      try {
        return difference_rule(group(j["difference_rule"], at + "/difference_rule"));
      } catch (const InputError&) {
        throw;
      } catch (const Error& e) {
        fail(at + "/difference_rule", e.what());
      }
    }
    if (j.contains("builtin")) {
      const auto name = str(j["builtin"], at + "/builtin");
      if (name == "ledrappier") return ledrappier_rule();
      if (name == "triangle") return triangle_rule();
      fail(at + "/builtin", "unknown builtin rule '" + name + "'");
    }
    const Alphabet a = alphabet(field(j, "alphabet", at), at + "/alphabet");
    const json& t = field(j, "table", at);
    if (!t.is_array() || t.size() != a.size()) fail(at + "/table", "table must have one row per symbol");
    std::vector<Symbol> table;
    for (std::size_t r = 0; r < t.size(); ++r) {
      const std::string rat = at + "/table/" + std::to_string(r);
      if (!t[r].is_array() || t[r].size() != a.size()) fail(rat, "row must have one entry per symbol");
      for (std::size_t c = 0; c < t[r].size(); ++c) table.push_back(symbol(t[r][c], a, rat + "/" + std::to_string(c)));
    }
    return wrap(at, [&] { return LocalRule(a, std::move(table)); });
  }

  FiniteGroup group(const json& j, const std::string& at = "") const {
    expect_object(j, at);
    const auto kind = str(field(j, "kind", at), at + "/kind");
    if (kind == "cyclic") return wrap(at, [&] { return make_cyclic(count(field(j, "n", at), at + "/n")); });
    if (kind == "dihedral") return wrap(at, [&] { return make_dihedral(count(field(j, "m", at), at + "/m")); });
    if (kind == "product") {
      const json& f = field(j, "factors", at);
      if (!f.is_array() || f.empty()) fail(at + "/factors", "expected a nonempty array of groups");
      FiniteGroup g = group(f[0], at + "/factors/0");
      for (std::size_t i = 1; i < f.size(); ++i) {
        FiniteGroup h = group(f[i], at + "/factors/" + std::to_string(i));
        g = wrap(at, [&] { return make_product(g, h); });
      }
      return g;
    }
    if (kind == "table") {
      const Alphabet a = alphabet(field(j, "labels", at), at + "/labels");
      const json& t = field(j, "table", at);
      if (!t.is_array() || t.size() != a.size()) fail(at + "/table", "table must have one row per element");
      std::vector<Element> table;
      for (std::size_t r = 0; r < t.size(); ++r) {
        const std::string rat = at + "/table/" + std::to_string(r);
        if (!t[r].is_array() || t[r].size() != a.size()) fail(rat, "row must have one entry per element");
        for (std::size_t c = 0; c < t[r].size(); ++c) table.push_back(symbol(t[r][c], a, rat + "/" + std::to_string(c)));
      }
      return wrap(at, [&] { return FiniteGroup(a.labels(), std::move(table)); });
    }
    fail(at + "/kind", "unknown group kind '" + kind + "'");
  }

  Subgroup subgroup(const FiniteGroup& g, const json& j, const std::string& at) const {
    const Alphabet a = g.alphabet();
    std::vector<Element> elems;
    if (!j.is_array()) fail(at, "subgroup must be an array of elements");
    for (std::size_t i = 0; i < j.size(); ++i) elems.push_back(symbol(j[i], a, at + "/" + std::to_string(i)));
    return wrap(at, [&] { return make_subgroup(g, std::move(elems)); });
  }

  MeasurePtr measure(const json& j, const std::string& at = "") const {
    expect_object(j, at);
    const auto kind = str(field(j, "kind", at), at + "/kind");
    if (kind == "uniform") return uniform(alphabet_of(j, at));
    if (kind == "uniform_subset") {
      const Alphabet a = alphabet_of(j, at);
      const json& s = field(j, "subset", at);
      if (!s.is_array()) fail(at + "/subset", "expected an array of symbols");
      std::vector<Symbol> subset;
      for (std::size_t i = 0; i < s.size(); ++i) subset.push_back(symbol(s[i], a, at + "/subset/" + std::to_string(i)));
      return wrap(at, [&] { return uniform_on_subset(a, subset); });
    }
    if (kind == "subgroup_uniform") {
      const FiniteGroup g = group(field(j, "group", at), at + "/group");
      return subgroup_uniform(g, subgroup(g, field(j, "subgroup", at), at + "/subgroup"));
    }
    if (kind == "pinned_interleave") {
      MeasurePtr base = measure(field(j, "base", at), at + "/base");
      const Symbol pin = symbol(field(j, "pin", at), base->alphabet(), at + "/pin");
      const auto phase = count(j.value("phase", json(0)), at + "/phase", true);
      return pinned_interleave(base, pin, static_cast<unsigned>(phase));
    }
    if (kind == "push_shift") return push_shift(measure(field(j, "measure", at), at + "/measure"));
    if (kind == "push_rule") {
      MeasurePtr base = measure(field(j, "measure", at), at + "/measure");
      LocalRule r = rule(field(j, "rule", at), at + "/rule");
      const std::size_t times = count(j.value("times", json(1)), at + "/times");
      for (std::size_t i = 0; i < times; ++i) base = wrap(at, [&] { return push_rule(base, r); });
      return base;
    }
    if (kind == "push_column") {
      MeasurePtr base = measure(field(j, "measure", at), at + "/measure");
      LocalRule r = rule(field(j, "rule", at), at + "/rule");
      return wrap(at, [&] { return push_column(base, r); });
    }
    if (kind == "mixture") {
      const json& c = field(j, "components", at);
      if (!c.is_array() || c.empty()) fail(at + "/components", "expected a nonempty array");
      std::vector<std::pair<Rational, MeasurePtr>> parts;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string cat = at + "/components/" + std::to_string(i);
        expect_object(c[i], cat);
        parts.emplace_back(rational(field(c[i], "weight", cat), cat + "/weight"),
                           measure(field(c[i], "measure", cat), cat + "/measure"));
      }
      return wrap(at, [&] { return mixture(std::move(parts)); });
    }
    if (kind == "atomic") {
      const Alphabet a = alphabet_of(j, at);
      Word prefix = word(j.value("prefix", json::array()), a, at + "/prefix");
      Word period = word(field(j, "period", at), a, at + "/period");
      return wrap(at, [&] { return atomic(a, std::move(prefix), std::move(period)); });
    }
    if (kind == "product") {
      const json& f = field(j, "factors", at);
      if (!f.is_array() || f.empty()) fail(at + "/factors", "expected a nonempty array");
      std::vector<MeasurePtr> factors;
      for (std::size_t i = 0; i < f.size(); ++i) factors.push_back(measure(f[i], at + "/factors/" + std::to_string(i)));
      return wrap(at, [&] { return product(std::move(factors)); });
    }
    if (kind == "synthesized") {
      SetMeasurePtr nu = set_measure(field(j, "nu", at), at + "/nu");
      LocalRule r = rule(field(j, "rule", at), at + "/rule");
      return wrap(at, [&] { return synthesize(nu, r); });
    }
    fail(at + "/kind", "unknown measure kind '" + kind + "'");
  }

  SetMeasurePtr set_measure(const json& j, const std::string& at = "") const {
    expect_object(j, at);
    const auto kind = str(field(j, "kind", at), at + "/kind");
    if (kind == "set_atomic") {
      const Alphabet a = alphabet_of(j, at);
      SetWord prefix = set_word(j.value("prefix", json::array()), a, at + "/prefix");
      SetWord period = set_word(field(j, "period", at), a, at + "/period");
      if (period.empty()) fail(at + "/period", "period must be nonempty");
      return wrap(at, [&] { return set_atomic(a, prefix, period); });
    }
    if (kind == "coset_process") {
      const FiniteGroup g = group(field(j, "group", at), at + "/group");
      const Subgroup h = subgroup(g, field(j, "subgroup", at), at + "/subgroup");
      MeasurePtr process = measure(field(j, "measure", at), at + "/measure");
      return wrap(at, [&] { return coset_process(g, h, process); });
    }
    if (kind == "set_mixture") {
      const json& c = field(j, "components", at);
      if (!c.is_array() || c.empty()) fail(at + "/components", "expected a nonempty array");
      std::vector<std::pair<Rational, SetMeasurePtr>> parts;
      for (std::size_t i = 0; i < c.size(); ++i) {
        const std::string cat = at + "/components/" + std::to_string(i);
        expect_object(c[i], cat);
        parts.emplace_back(rational(field(c[i], "weight", cat), cat + "/weight"),
                           set_measure(field(c[i], "measure", cat), cat + "/measure"));
      }
      return wrap(at, [&] { return set_mixture(parts); });
    }
    fail(at + "/kind", "unknown set measure kind '" + kind + "'");
  }

  /// A word given as an array of symbols or a string of single-character labels.
  Word word(const json& j, const Alphabet& a, const std::string& at) const {
    Word w;
    if (j.is_string()) {
      for (char c : j.get<std::string>()) w.push_back(symbol(json(std::string(1, c)), a, at));
      return w;
    }
    if (!j.is_array()) fail(at, "expected an array of symbols");
    for (std::size_t i = 0; i < j.size(); ++i) w.push_back(symbol(j[i], a, at + "/" + std::to_string(i)));
    return w;
  }

  [[noreturn]] void fail(const std::string& at, const std::string& what) const {
    throw InputError(file_ + (at.empty() ? std::string(" at /") : " at " + at), what);
  }

 private:
  template <class F>
  auto wrap(const std::string& at, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      fail(at, e.what());
    }
  }

  void expect_object(const json& j, const std::string& at) const {
    if (!j.is_object()) fail(at, "expected an object");
  }

  const json& field(const json& j, const char* key, const std::string& at) const {
    if (!j.contains(key)) fail(at, std::string("missing field '") + key + "'");
    return j[key];
  }

  std::string str(const json& j, const std::string& at) const {
    if (!j.is_string()) fail(at, "expected a string");
    return j.get<std::string>();
  }

  std::size_t count(const json& j, const std::string& at, bool allow_zero = false) const {
    if (!j.is_number_integer() || j.get<long long>() < (allow_zero ? 0 : 1))
      fail(at, allow_zero ? "expected a nonnegative integer" : "expected a positive integer");
    return j.get<std::size_t>();
  }

  Rational rational(const json& j, const std::string& at) const {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (!j.is_string()) fail(at, "expected a rational string \"num/den\"");
    return wrap(at, [&] { return parse_rational(j.get<std::string>()); });
  }

  Alphabet alphabet(const json& j, const std::string& at) const {
    if (j.is_number_integer()) return wrap(at, [&] { return Alphabet::numbered(count(j, at)); });
    if (!j.is_array()) fail(at, "expected an array of labels or a size");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (j[i].is_string()) labels.push_back(j[i].get<std::string>());
      else if (j[i].is_number_integer()) labels.push_back(std::to_string(j[i].get<long long>()));
      else fail(at + "/" + std::to_string(i), "labels must be strings or integers");
    }
    return wrap(at, [&] { return Alphabet(std::move(labels)); });
  }

  Alphabet alphabet_of(const json& j, const std::string& at) const {
    if (j.contains("group")) return group(j["group"], at + "/group").alphabet();
    return alphabet(field(j, "alphabet", at), at + "/alphabet");
  }

  /// Integers are indices; strings are labels.
  Symbol symbol(const json& j, const Alphabet& a, const std::string& at) const {
    if (j.is_number_integer()) {
      const auto v = j.get<long long>();
      if (v < 0 || static_cast<std::size_t>(v) >= a.size()) fail(at, "symbol index out of range");
      return static_cast<Symbol>(v);
    }
    if (j.is_string()) return wrap(at, [&] { return a.index_of(j.get<std::string>()); });
    fail(at, "expected a symbol index or label");
  }

  SetWord set_word(const json& j, const Alphabet& a, const std::string& at) const {
    if (!j.is_array()) fail(at, "expected an array of symbol sets");
    SetWord out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const Word w = word(j[i], a, at + "/" + std::to_string(i));
      if (w.empty()) fail(at + "/" + std::to_string(i), "sets must be nonempty");
      out.push_back(to_mask(w));
    }
    return out;
  }

  std::string file_;
};

inline json word_json(const Word& w, const Alphabet& a) {
  json out = json::array();
  for (Symbol s : w) out.push_back(a.label(s));
  return out;
}

inline std::string word_string(const Word& w, const Alphabet& a) {
  bool single = std::all_of(a.labels().begin(), a.labels().end(), [](const auto& l) { return l.size() == 1; });
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single && i > 0) s += ",";
    s += a.label(w[i]);
  }
  return s;
}

inline json set_word_json(const SetWord& w, const Alphabet& a) {
  json out = json::array();
  for (Mask m : w) {
    json set = json::array();
    for (Symbol s : to_symbols(m)) set.push_back(a.label(s));
    out.push_back(std::move(set));
  }
  return out;
}

inline json report_json(const ConditionalReport& r, const Alphabet& a) {
  json probs = json::object();
  for (Symbol s = 0; s < r.probs.size(); ++s)
    if (r.probs[s] != 0) probs[a.label(s)] = to_string(r.probs[s]);
  json support = json::array();
  for (Symbol s : r.support) support.push_back(a.label(s));
  json out{{"word", word_string(r.word, a)},
           {"mass", to_string(r.mass)},
           {"support", support},
           {"probs", probs},
           {"uniform", r.uniform}};
  if (r.coset_of) {
    json h = json::array();
    for (Element e : r.coset_of->elements) h.push_back(a.label(static_cast<Symbol>(e)));
    out["coset_of"] = h;
  }
  if (r.coset_violation) out["coset_violation"] = true;
  return out;
}

}  // namespace automeasure::io
