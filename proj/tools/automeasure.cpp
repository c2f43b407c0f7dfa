// automeasure: command-line front end. Every subcommand prints one JSON report.
// Exit codes: 0 verified, 1 property violation, 2 usage or input error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "automeasure/conditionals.hpp"
#include "automeasure/io.hpp"
#include "automeasure/lifted.hpp"
#include "automeasure/rlp_circle.hpp"
#include "automeasure/synthesis.hpp"

namespace am = automeasure;
using nlohmann::json;

namespace {

struct Context {
  bool compact = false;
  bool timing = false;
  unsigned workers = 1;
  std::optional<std::size_t> depth_cap;
  std::vector<std::string> echo;
  json inputs = json::array();

  am::Limits limits() const {
    am::Limits l;
    if (depth_cap) l.depth_cap = *depth_cap;
    l.workers = workers;
    return l;
  }

  am::io::Source load(const std::string& path) {
    auto s = am::io::load_json_file(path);
    inputs.push_back({{"path", path}, {"fnv1a64", am::io::digest(s.text)}});
    return s;
  }

  am::MeasurePtr measure(const std::string& path) {
    auto s = load(path);
    return am::io::Parser(path).measure(s.doc);
  }
  am::SetMeasurePtr set_measure(const std::string& path) {
    auto s = load(path);
    return am::io::Parser(path).set_measure(s.doc);
  }
  am::LocalRule rule(const std::string& path) {
    auto s = load(path);
    return am::io::Parser(path).rule(s.doc);
  }
  am::FiniteGroup group(const std::string& path) {
    auto s = load(path);
    return am::io::Parser(path).group(s.doc);
  }
};

/// Comma-separated labels, or one character per symbol when there is no comma.
std::vector<std::string> split_labels(const std::string& text) {
  std::vector<std::string> out;
  if (text.find(',') == std::string::npos) {
    for (char c : text) out.emplace_back(1, c);
    return out;
  }
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

am::Word parse_word(const std::string& text, const am::Alphabet& a) {
  am::Word w;
  for (const auto& l : split_labels(text)) w.push_back(a.index_of(l));
  return w;
}

json word_json(const am::Word& w, const am::Alphabet& a) { return am::io::word_string(w, a); }

json invariance_json(const am::InvarianceResult& r, const am::Alphabet& a) {
  json j{{"invariant", r.invariant}, {"depth", r.depth}};
  if (r.counterexample) j["counterexample"] = word_json(*r.counterexample, a);
  return j;
}

json subgroup_json(const am::FiniteGroup& g, const am::Subgroup& h) {
  json out = json::array();
  for (am::Element e : h.elements) out.push_back(g.label(e));
  return out;
}

am::Subgroup parse_subgroup(const am::FiniteGroup& g, const std::string& text) {
  std::vector<am::Element> elems;
  for (const auto& l : split_labels(text)) elems.push_back(g.index_of(l));
  return am::make_subgroup(g, std::move(elems));
}

/// Entropy values are printed rounded to 12 significant digits so reports do
/// not depend on the last bit of libm.
double round12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact invariant-measure toolkit for bi-permutative cellular automata"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_flag("--json", ctx.compact, "Print the report on a single line");
  app.add_option("--workers", ctx.workers, "Worker threads for enumeration")->check(CLI::Range(1u, 256u));
  app.add_option("--depth-cap", ctx.depth_cap, "Longest cylinder that may be queried")->check(CLI::PositiveNumber);
  app.add_flag("--timing", ctx.timing, "Add wall time to the report");

  // Each leaf fills `result` and returns whether the checked property holds.
  std::function<bool(json&)> action;
  auto leaf = [](CLI::App* parent, const std::string& name, const std::string& help) {
    return parent->add_subcommand(name, help);
  };
  auto group_cmd = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    return sub;
  };

  std::string path, rule_path, group_path, word_text, subgroup_text, x_text, y_text;
  std::size_t n = 6, k = 1, length = 3, steps = 1, margin = 2, print_depth = 3, m_dihedral = 3, l_max = 12;
  std::size_t width = 8, height = 8, max_den = 200;
  std::uint64_t p = 2, q = 3;
  bool verify = false, round_trip = false;

  // rule
  auto* rule_cmd = group_cmd("rule", "Local rules");
  auto* rule_check = leaf(rule_cmd, "check", "Left/right permutativity of a rule");
  rule_check->add_option("rule", path, "Rule file")->required();
  rule_check->callback([&] {
    action = [&](json& out) {
      const auto r = ctx.rule(path);
      const bool left = am::check_left_permutative(r), right = am::check_right_permutative(r);
      out = {{"alphabet", r.alphabet().labels()}, {"left_permutative", left}, {"right_permutative", right},
             {"bipermutative", left && right}};
      return left && right;
    };
  });

  // group
  auto* grp_cmd = group_cmd("group", "Finite groups");
  auto* grp_info = leaf(grp_cmd, "info", "Order, subgroups, normality and the zero-entropy criterion");
  grp_info->add_option("group", path, "Group file")->required();
  grp_info->callback([&] {
    action = [&](json& out) {
      const auto g = ctx.group(path);
      json subs = json::array();
      for (const auto& h : am::subgroups(g)) {
        const bool normal = am::is_normal(g, h);
        json s{{"elements", subgroup_json(g, h)}, {"order", h.order()}, {"normal", normal}};
        if (normal) s["zero_entropy_sufficient"] = am::zero_ent_suff_check(g, h);
        subs.push_back(std::move(s));
      }
      const auto r = am::group_rule(g);
      out = {{"order", g.order()},
             {"labels", g.labels()},
             {"abelian", g.is_abelian()},
             {"group_rule_bipermutative", am::is_bipermutative(r)},
             {"subgroups", subs}};
      return true;
    };
  });
  auto* grp_zero = leaf(grp_cmd, "zero-ent", "Sufficient criterion for zero entropy of the coset measure");
  grp_zero->add_option("group", path, "Group file")->required();
  grp_zero->add_option("--subgroup,-H", subgroup_text, "Normal subgroup, e.g. r0,r1,r2")->required();
  grp_zero->callback([&] {
    action = [&](json& out) {
      const auto g = ctx.group(path);
      const auto h = parse_subgroup(g, subgroup_text);
      if (!am::is_normal(g, h)) throw am::Error("subgroup is not normal");
      const bool holds = am::zero_ent_suff_check(g, h);
      out = {{"subgroup", subgroup_json(g, h)}, {"normal", true}, {"zero_entropy_sufficient", holds}};
      return holds;
    };
  });

  // measure
  auto* meas_cmd = group_cmd("measure", "Cylinder measures");
  auto* meas_check = leaf(meas_cmd, "check", "Consistency, shift invariance and rule invariance");
  meas_check->add_option("measure", path, "Measure file")->required();
  meas_check->add_option("--rule", rule_path, "Rule whose invariance is checked");
  meas_check->add_option("-n", n, "Word length")->check(CLI::PositiveNumber);
  meas_check->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto lim = ctx.limits();
      am::require_depth(n + 1, lim);
      const bool consistent = am::check_consistency(*m, n + 1, lim.workers);
      const auto sigma = am::check_shift_invariance(*m, n, lim);
      out = {{"kind", m->kind()}, {"n", n}, {"consistent", consistent},
             {"shift", invariance_json(sigma, m->alphabet())}};
      bool ok = consistent && sigma.invariant;
      if (!rule_path.empty()) {
        const auto tau = am::check_rule_invariance(*m, ctx.rule(rule_path), n, lim);
        out["rule"] = invariance_json(tau, m->alphabet());
        ok = ok && tau.invariant;
      }
      return ok;
    };
  });
  auto* meas_entropy = leaf(meas_cmd, "entropy", "Block entropies and entropy-rate estimates");
  meas_entropy->add_option("measure", path, "Measure file")->required();
  meas_entropy->add_option("-n", n, "Largest block length")->check(CLI::PositiveNumber);
  meas_entropy->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto lim = ctx.limits();
      json rows = json::array();
      double prev = 0.0;
      for (std::size_t len = 1; len <= n; ++len) {
        const double h = am::block_entropy(*m, len, lim);
        rows.push_back({{"n", len}, {"block_entropy", round12(h)}, {"rate_estimate", round12(h - prev)}});
        prev = h;
      }
      out = {{"kind", m->kind()}, {"log_alphabet", round12(std::log(static_cast<double>(m->alphabet_size())))},
             {"rows", rows}};
      return true;
    };
  });
  auto* meas_eval = leaf(meas_cmd, "eval", "Exact mass of one cylinder");
  meas_eval->add_option("measure", path, "Measure file")->required();
  meas_eval->add_option("--word,-w", word_text, "Cylinder word, e.g. 0101 or r0,s1")->required();
  meas_eval->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto w = parse_word(word_text, m->alphabet());
      out = {{"word", word_json(w, m->alphabet())}, {"mass", am::to_string(am::evaluate(*m, w, ctx.limits()))}};
      return true;
    };
  });

  // conditional
  auto* cond_cmd = group_cmd("conditional", "Conditional distributions at index 0");
  auto* cond_at = leaf(cond_cmd, "at", "Conditional of x_0 given one future word");
  cond_at->add_option("measure", path, "Measure file")->required();
  cond_at->add_option("--word,-w", word_text, "Future word x_1..x_n")->required();
  cond_at->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto r = am::conditional_at_zero(*m, parse_word(word_text, m->alphabet()), ctx.limits());
      out = am::io::report_json(r, m->alphabet());
      return r.uniform;
    };
  });
  auto* cond_census = leaf(cond_cmd, "census", "Mass of futures with uniform conditionals");
  cond_census->add_option("measure", path, "Measure file")->required();
  cond_census->add_option("-n", n, "Future length")->check(CLI::PositiveNumber);
  cond_census->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto c = am::uniformity_census(*m, n, ctx.limits());
      json fails = json::array();
      for (const auto& f : c.failures) fails.push_back(am::io::report_json(f, m->alphabet()));
      out = {{"n", c.n},
             {"words", c.words},
             {"uniform_mass", am::to_string(c.uniform_mass)},
             {"stabilized_mass", am::to_string(c.stabilized_mass)},
             {"stabilized_uniform_mass", am::to_string(c.stabilized_uniform_mass)},
             {"non_uniform", fails}};
      return c.stabilized_uniform_mass == c.stabilized_mass;
    };
  });
  auto* cond_coset = leaf(cond_cmd, "coset", "Whether every conditional support is a right coset");
  cond_coset->add_option("measure", path, "Measure file over the group's elements")->required();
  cond_coset->add_option("--group,-g", group_path, "Group file")->required();
  cond_coset->add_option("-n", n, "Largest future length")->check(CLI::PositiveNumber);
  cond_coset->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto g = ctx.group(group_path);
      if (g.order() != m->alphabet_size()) throw am::Error("group order differs from the measure's alphabet size");
      std::map<std::vector<am::Element>, std::size_t> by_subgroup;
      json violations = json::array();
      std::size_t total = 0;
      for (std::size_t len = 1; len <= n; ++len) {
        for (const auto& r : am::coset_census(*m, g, len, ctx.limits())) {
          ++total;
          if (r.coset_of) ++by_subgroup[r.coset_of->elements];
          if (r.coset_violation || !r.uniform) violations.push_back(am::io::report_json(r, m->alphabet()));
        }
      }
      json subs = json::array();
      for (const auto& [elems, count] : by_subgroup) {
        json h = json::array();
        for (am::Element e : elems) h.push_back(g.label(e));
        subs.push_back({{"subgroup", h}, {"words", count}});
      }
      out = {{"n", n}, {"words", total}, {"coset_of", subs}, {"violations", violations}};
      return violations.empty();
    };
  });
  auto* cond_tail = leaf(cond_cmd, "tail-probe", "Mass of futures whose support ignores the first k symbols");
  cond_tail->add_option("measure", path, "Measure file")->required();
  cond_tail->add_option("-k", k, "Number of leading future symbols varied")->check(CLI::PositiveNumber);
  cond_tail->add_option("-n", n, "Future length")->check(CLI::PositiveNumber);
  cond_tail->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto r = am::tail_measurability_probe(*m, k, n, ctx.limits());
      out = {{"k", k},
             {"n", n},
             {"determined_mass", am::to_string(r.determined_mass)},
             {"groups", r.groups},
             {"determined_groups", r.determined_groups}};
      return true;
    };
  });
  auto* cond_tau = leaf(cond_cmd, "tau", "Support-size invariance and the conditional entropy of x given its image");
  cond_tau->add_option("measure", path, "Measure file")->required();
  cond_tau->add_option("--rule", rule_path, "Rule file")->required();
  cond_tau->add_option("-n", n, "Future length")->check(CLI::PositiveNumber);
  cond_tau->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto r = ctx.rule(rule_path);
      const auto lim = ctx.limits();
      const auto s = am::support_size_tau_invariance(*m, r, n, lim);
      out = {{"n", n},
             {"support_size_invariant", s.holds},
             {"compared", s.compared},
             {"skipped", s.skipped},
             {"log_integral", round12(am::tau_log_integral(*m, r, n, lim))}};
      if (s.counterexample) out["counterexample"] = word_json(*s.counterexample, m->alphabet());
      return s.holds;
    };
  });

  // lift
  auto* lift_cmd = group_cmd("lift", "Set-lifted automata");
  auto* lift_z = leaf(lift_cmd, "z-words", "Set words keeping size k under the lifted rule");
  lift_z->add_option("rule", path, "Rule file")->required();
  lift_z->add_option("-k", k, "Set size")->check(CLI::PositiveNumber);
  lift_z->add_option("-L", length, "Word length")->check(CLI::PositiveNumber);
  lift_z->add_option("-N", steps, "Number of lifted steps");
  lift_z->callback([&] {
    action = [&](json& out) {
      const auto r = ctx.rule(path);
      const auto words = am::z_words(r, k, length, steps, ctx.workers);
      json list = json::array();
      for (const auto& w : words) list.push_back(am::io::set_word_json(w, r.alphabet()));
      out = {{"k", k}, {"L", length}, {"N", steps}, {"count", words.size()}, {"words", list}};
      return true;
    };
  });
  auto* lift_zg = leaf(lift_cmd, "z-words-group", "z-words for a group rule, with the normalizer verdict");
  lift_zg->add_option("group", path, "Group file")->required();
  lift_zg->add_option("-k", k, "Set size")->check(CLI::PositiveNumber);
  lift_zg->add_option("-L", length, "Word length")->check(CLI::PositiveNumber);
  lift_zg->add_option("-N", steps, "Number of lifted steps");
  lift_zg->callback([&] {
    action = [&](json& out) {
      const auto g = ctx.group(path);
      const auto r = am::z_words_group(g, k, length, steps, ctx.workers);
      json list = json::array();
      for (const auto& w : r.words) list.push_back(am::io::set_word_json(w, g.alphabet()));
      out = {{"k", k}, {"L", length}, {"N", steps}, {"count", r.words.size()},
             {"normalizer_verdict", r.normalizer_verdict}, {"offending", r.offending}, {"words", list}};
      if (r.subgroup) out["subgroup"] = subgroup_json(g, *r.subgroup);
      return r.normalizer_verdict;
    };
  });
  auto* lift_int = leaf(lift_cmd, "intertwine", "Support factor intertwines the rule with its lift");
  lift_int->add_option("measure", path, "Measure file")->required();
  lift_int->add_option("--rule", rule_path, "Rule file")->required();
  lift_int->add_option("-n", n, "Word length")->check(CLI::PositiveNumber);
  lift_int->add_option("--margin", margin, "Future symbols each component conditions on")->check(CLI::PositiveNumber);
  lift_int->callback([&] {
    action = [&](json& out) {
      const auto m = ctx.measure(path);
      const auto r = am::intertwining_check(*m, ctx.rule(rule_path), n, margin, ctx.limits());
      out = {{"n", n}, {"margin", margin}, {"holds", r.holds}, {"compared", r.compared}, {"skipped", r.skipped}};
      if (r.counterexample) out["counterexample"] = word_json(*r.counterexample, m->alphabet());
      return r.holds;
    };
  });

  // synth
  auto* syn_cmd = group_cmd("synth", "Measures synthesized from set-word measures");
  auto* syn_run = leaf(syn_cmd, "run", "Synthesize a measure and list its cylinders");
  syn_run->add_option("nu", path, "Set measure file")->required();
  syn_run->add_option("--rule", rule_path, "Left-permutative rule file")->required();
  syn_run->add_option("--print-depth", print_depth, "Length of the listed cylinders");
  syn_run->add_flag("--verify", verify, "Check shift and rule invariance");
  syn_run->add_flag("--round-trip", round_trip, "Recover nu through the support factor");
  syn_run->add_option("-n", n, "Depth for --verify and --round-trip")->check(CLI::PositiveNumber);
  syn_run->callback([&] {
    action = [&](json& out) {
      const auto nu = ctx.set_measure(path);
      const auto r = ctx.rule(rule_path);
      const auto lim = ctx.limits();
      const auto mu = am::synthesize(nu, r);
      json cyl = json::object();
      for (const auto& w : am::positive_words(*mu, print_depth, lim.workers))
        cyl[am::io::word_string(w.word, mu->alphabet())] = am::to_string(w.mass);
      out = {{"print_depth", print_depth}, {"cylinders", cyl}};
      bool ok = true;
      if (verify) {
        const auto inv = am::verify_synthesis_invariance(nu, r, n, lim);
        out["shift"] = invariance_json(inv.sigma, mu->alphabet());
        out["rule"] = invariance_json(inv.tau, mu->alphabet());
        ok = ok && inv.sigma.invariant && inv.tau.invariant;
      }
      if (round_trip) {
        const auto rt = am::round_trip_check(nu, r, n, 2, lim);
        out["round_trip"] = {{"status", am::to_string(rt.status)},
                             {"zero_entropy_surrogate", rt.zero_entropy_surrogate},
                             {"injectivity_surrogate", rt.injectivity_surrogate},
                             {"diagnostic", rt.diagnostic}};
        ok = ok && rt.status != am::RoundTripStatus::Fail;
      }
      return ok;
    };
  });
  auto* syn_dih = leaf(syn_cmd, "dihedral", "Lift a zero-entropy Ledrappier measure to D_m");
  syn_dih->add_option("nu2", path, "Measure file over {0,1}")->required();
  syn_dih->add_option("-m", m_dihedral, "Odd m")->check(CLI::PositiveNumber);
  syn_dih->add_option("-n", n, "Depth of the checks")->check(CLI::PositiveNumber);
  syn_dih->callback([&] {
    action = [&](json& out) {
      const auto lim = ctx.limits();
      const auto lift = am::dihedral_lift(m_dihedral, ctx.measure(path), n, lim);
      const auto r = am::group_rule(lift.group);
      const auto sigma = am::check_shift_invariance(*lift.mu, n, lim);
      const auto tau = am::check_rule_invariance(*lift.mu, r, n, lim);
      out = {{"m", m_dihedral},
             {"n", n},
             {"shift", invariance_json(sigma, lift.mu->alphabet())},
             {"rule", invariance_json(tau, lift.mu->alphabet())},
             {"entropy_rate_estimate", round12(am::entropy_rate_estimate(*lift.mu, n, lim))},
             {"log_m", round12(std::log(static_cast<double>(m_dihedral)))}};
      return sigma.invariant && tau.invariant;
    };
  });

  // rlp
  auto* rlp_cmd = group_cmd("rlp", "Times-p times-q circle systems");
  auto add_pq = [&](CLI::App* sub) {
    sub->add_option("-p", p, "Multiplier p")->check(CLI::Range(2, 1 << 20));
    sub->add_option("-q", q, "Multiplier q")->check(CLI::Range(2, 1 << 20));
  };
  auto* rlp_counts = leaf(rlp_cmd, "counts", "Partition intersection counts for l = 2..l-max");
  add_pq(rlp_counts);
  rlp_counts->add_option("--l-max", l_max, "Largest l (at most 16)");
  rlp_counts->callback([&] {
    action = [&](json& out) {
      const am::PQSystem sys(p, q);
      json rows = json::array();
      bool ok = true;
      for (const auto& c : am::sub_exponential_report(sys, l_max)) {
        rows.push_back({{"l", c.l}, {"m", c.m}, {"max_p_over_q", c.max_p_over_q}, {"max_q_over_p", c.max_q_over_p}});
        ok = ok && c.max_p_over_q <= q + 1 && c.max_q_over_p <= 2;
      }
      out = {{"p", p}, {"q", q}, {"bound_p_over_q", q + 1}, {"bound_q_over_p", 2}, {"rows", rows}};
      return ok;
    };
  });
  auto* rlp_diag = leaf(rlp_cmd, "diagram", "Space-time digits of a rational point");
  add_pq(rlp_diag);
  rlp_diag->add_option("-x", x_text, "Rational point in [0,1)")->required();
  rlp_diag->add_option("-w", width, "Columns");
  rlp_diag->set_help_flag("--help", "Print this help message and exit");
  rlp_diag->add_option("-h,--height", height, "Rows");
  rlp_diag->callback([&] {
    action = [&](json& out) {
      const am::PQSystem sys(p, q);
      const am::RationalPoint x(am::parse_rational(x_text));
      const auto grid = am::space_time(sys, x, width, height);
      const auto digits = am::expansion(sys.base(), x, std::min(width, height));
      bool diagonal = true;
      for (std::size_t i = 0; i < digits.size(); ++i) diagonal = diagonal && grid[i][i] == digits[i];
      out = {{"p", p}, {"q", q}, {"x", am::to_string(x.value())}, {"rows", grid},
             {"expansion", digits}, {"diagonal_matches_expansion", diagonal}};
      return diagonal;
    };
  });
  auto* rlp_fiber = leaf(rlp_cmd, "fiber", "Bijectivity of S_p on S_q fibers");
  add_pq(rlp_fiber);
  rlp_fiber->add_option("-y", y_text, "Single rational point; default is every y with denominator <= --max-den");
  rlp_fiber->add_option("--max-den", max_den, "Largest denominator in the exhaustive sweep")->check(CLI::PositiveNumber);
  rlp_fiber->callback([&] {
    action = [&](json& out) {
      const am::PQSystem sys(p, q);
      std::size_t checked = 0;
      json failures = json::array();
      auto one = [&](const am::RationalPoint& y) {
        ++checked;
        if (!am::fiber_bijectivity_check(sys, y)) failures.push_back(am::to_string(y.value()));
      };
      if (!y_text.empty()) {
        one(am::RationalPoint(am::parse_rational(y_text)));
      } else {
        for (unsigned long d = 1; d <= max_den; ++d)
          for (unsigned long a = 0; a < d; ++a)
            if (std::gcd(a, d) == 1) one(am::RationalPoint(am::Rational(a, d)));
      }
      out = {{"p", p}, {"q", q}, {"checked", checked}, {"failures", failures}};
      return failures.empty();
    };
  });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Echo the command without flags that must not change the report.
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--workers") {
      ++i;
      continue;
    }
    if (a.rfind("--workers=", 0) == 0 || a == "--json" || a == "--timing") continue;
    ctx.echo.push_back(a);
  }

  const auto start = std::chrono::steady_clock::now();
  json result;
  bool ok = false;
  try {
    ok = action(result);
  } catch (const am::io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const am::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  json report{{"schema", "automeasure-report/1"},
              {"command", ctx.echo},
              {"inputs", ctx.inputs},
              {"verdict", ok ? "verified" : "violation"},
              {"result", result}};
  if (ctx.timing) {
    report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  std::cout << (ctx.compact ? report.dump() : report.dump(2)) << "\n";
  return ok ? 0 : 1;
}
