// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "automeasure/conditionals.hpp"
#include "automeasure/lifted.hpp"
#include "automeasure/rlp_circle.hpp"
#include "automeasure/synthesis.hpp"

using namespace automeasure;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << title << " -- " << o.detail
            << std::endl;
}

std::string word_str(const Word& w) {
  std::string s;
  for (Symbol x : w) s += std::to_string(x);
  return s;
}

std::vector<FiniteGroup> groups_up_to_12() {
  std::vector<FiniteGroup> out;
  for (std::size_t n = 1; n <= 12; ++n) out.push_back(make_cyclic(n));
  for (std::size_t m = 1; m <= 6; ++m) out.push_back(make_dihedral(m));
  const auto z2 = make_cyclic(2), z3 = make_cyclic(3);
  out.push_back(make_product(z2, z2));
  out.push_back(make_product(z2, make_cyclic(4)));
  out.push_back(make_product(z2, make_cyclic(6)));
  out.push_back(make_product(z3, z3));
  out.push_back(make_product(make_product(z2, z2), z2));
  out.push_back(make_product(make_product(z2, z2), z3));
  out.push_back(make_product(make_dihedral(3), z2));
  // Relabelled copies with shuffled element order, rebuilt through the
  // validating table constructor.
  std::mt19937 rng(2024);
  const std::size_t base = out.size();
  for (std::size_t i = 0; i < base; ++i) {
    const auto& g = out[i];
    const std::size_t n = g.order();
    std::vector<Element> perm(n);
    for (Element e = 0; e < n; ++e) perm[e] = e;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Element> inv(n);
    for (Element e = 0; e < n; ++e) inv[perm[e]] = e;
    std::vector<std::string> labels(n);
    std::vector<Element> table(n * n);
    for (Element a = 0; a < n; ++a) {
      labels[perm[a]] = "g" + std::to_string(a);
      for (Element b = 0; b < n; ++b) table[perm[a] * n + perm[b]] = perm[g.mul(a, b)];
    }
    out.emplace_back(std::move(labels), std::move(table));
  }
  return out;
}

MeasurePtr kitchens() {
  const auto r = ledrappier_rule();
  auto m = pinned_interleave(uniform(Alphabet::numbered(2)), 0, 0);
  return mixture({{Rational(1, 4), m},
                  {Rational(1, 4), push_shift(m)},
                  {Rational(1, 4), push_rule(m, r)},
                  {Rational(1, 4), push_rule(push_shift(m), r)}});
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(AUTOMEASURE_CLI) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return out + "\n<exit " + std::to_string(status) + ">";
}

std::string data_file(const std::string& name) { return std::string(AUTOMEASURE_DATA) + "/" + name; }

}  // namespace

int main() {
  Limits limits;

  report(1, "permutativity of group rules, triangle and constant rules", [] {
    const auto t0 = Clock::now();
    const auto groups = groups_up_to_12();
    std::size_t passed = 0;
    for (const auto& g : groups) {
      const auto r = group_rule(g);
      if (check_left_permutative(r) && check_right_permutative(r)) ++passed;
    }
    const bool tri = is_bipermutative(triangle_rule());
    const auto constant = LocalRule::from_function(Alphabet::numbered(2), [](Symbol, Symbol) { return Symbol{0}; });
    const bool cons = check_left_permutative(constant) || check_right_permutative(constant);
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << passed << "/" << groups.size() << " groups of order <= 12 bi-permutative, triangle " << tri
      << ", constant " << cons << ", " << dt << " s";
    return Outcome{passed == groups.size() && tri && !cons && dt < 1.0, d.str()};
  });

  report(2, "uniform measure baseline for Ledrappier and Z/3", [&] {
    bool ok = true;
    std::ostringstream d;
    for (const auto& rule : {ledrappier_rule(), group_rule(make_cyclic(3))}) {
      const auto u = uniform(rule.alphabet());
      std::size_t words = 0;
      for (std::size_t n = 1; n <= 10; ++n) {
        for (const auto& w : positive_words(*u, n)) {
          ++words;
          const auto r = conditional_at_zero(*u, w.word, limits);
          const bool uni = r.uniform && r.support.size() == rule.size();
          ok = ok && uni;
        }
      }
      double worst = 0;
      for (std::size_t n = 1; n <= 10; ++n)
        worst = std::max(worst, std::abs(entropy_rate_estimate(*u, n, limits) - std::log(double(rule.size()))));
      const bool inv = static_cast<bool>(check_rule_invariance(*u, rule, 6, limits));
      ok = ok && worst < 1e-9 && inv;
      d << "|L|=" << rule.size() << ": " << words << " futures uniform, max rate error " << worst
        << ", rule-invariant " << inv << "; ";
    }
    return Outcome{ok, d.str()};
  });

  report(3, "kitchens example", [&] {
    const auto mu = kitchens();
    const auto led = ledrappier_rule();
    const bool sigma = static_cast<bool>(check_shift_invariance(*mu, 8, limits));
    const bool tau = static_cast<bool>(check_rule_invariance(*mu, led, 8, limits));
    std::size_t stable = 0;
    std::vector<std::string> bad;
    const auto z2 = make_cyclic(2);
    for (std::size_t n = 2; n <= 10; ++n) {
      SupportAtlas atlas(*mu, n, n, limits);
      for (const auto& [w, e] : atlas.futures(n)) {
        if (!e.stable) continue;
        ++stable;
        auto r = e.report;
        annotate_coset(r, z2);
        if (!r.uniform || !r.coset_of)
          bad.push_back(word_str(w) + " (P(0)=" + to_string(r.probs[0]) + ")");
      }
    }
    const auto c4 = uniformity_census(*mu, 4, limits), c10 = uniformity_census(*mu, 10, limits);
    const double rate = entropy_rate_estimate(*mu, 12, limits);
    const bool rate_ok = std::abs(rate - 0.5 * std::log(2.0)) < 0.02;
    std::ostringstream d;
    d << "sigma " << sigma << ", tau " << tau << "; " << stable << " stabilized futures (n=2..10), "
      << bad.size() << " non-uniform";
    if (!bad.empty()) {
      d << " [";
      for (std::size_t i = 0; i < bad.size() && i < 4; ++i) d << (i ? ", " : "") << bad[i];
      if (bad.size() > 4) d << ", ...";
      d << "]";
    }
    d << "; census n=4 " << to_string(c4.uniform_mass) << " < n=10 " << to_string(c10.uniform_mass)
      << "; rate(12) " << rate;
    return Outcome{sigma && tau && bad.empty() && c10.uniform_mass > c4.uniform_mass && rate_ok, d.str()};
  });

  report(4, "conditional supports are right cosets of H", [&] {
    bool ok = true;
    std::ostringstream d;
    const auto z4 = make_cyclic(4);
    const auto d3 = make_dihedral(3);
    for (const auto& [g, h] : {std::pair{z4, make_subgroup(z4, {0, 2})}, std::pair{d3, make_subgroup(d3, {0, 1, 2})}}) {
      const auto m = subgroup_uniform(g, h);
      std::size_t words = 0, good = 0;
      for (std::size_t n = 1; n <= 8; ++n) {
        for (const auto& r : coset_census(*m, g, n, limits)) {
          ++words;
          if (r.uniform && r.coset_of && *r.coset_of == h) ++good;
        }
      }
      ok = ok && words == good && words > 0;
      d << "|G|=" << g.order() << ": " << good << "/" << words << "; ";
    }
    return Outcome{ok, d.str()};
  });

  report(5, "tail probe", [&] {
    bool ok = true;
    std::ostringstream d;
    const auto z4 = make_cyclic(4);
    const auto d3 = make_dihedral(3);
    const std::vector<std::pair<std::string, MeasurePtr>> cases{
        {"uniform2", uniform(Alphabet::numbered(2))},
        {"uniform3", uniform(Alphabet::numbered(3))},
        {"Z4/{0,2}", subgroup_uniform(z4, make_subgroup(z4, {0, 2}))},
        {"D3/C3", subgroup_uniform(d3, make_subgroup(d3, {0, 1, 2}))}};
    for (const auto& [name, m] : cases) {
      bool all = true;
      for (std::size_t k = 1; k <= 4; ++k) all = all && tail_measurability_probe(*m, k, 10, limits).determined_mass == 1;
      ok = ok && all;
      d << name << " " << (all ? "1" : "<1") << "; ";
    }
    const auto k = tail_measurability_probe(*kitchens(), 2, 10, limits);
    ok = ok && k.determined_mass < 1;
    d << "kitchens k=2 " << to_string(k.determined_mass);
    return Outcome{ok, d.str()};
  });

  report(6, "triangle rule admits no size-2 Z-words", [] {
    const auto tri = triangle_rule();
    const auto words = z_words(tri, 2, 3, 1);
    const SetRule lifted(tri);
    const Alphabet& a = tri.alphabet();
    const std::vector<std::pair<Mask, Mask>> pairs{{0b011, 0b011}, {0b101, 0b101}, {0b110, 0b110},
                                                   {0b011, 0b101}, {0b011, 0b110}, {0b101, 0b110}};
    bool images = true;
    std::ostringstream d;
    d << words.size() << " words; ";
    for (const auto& [x, y] : pairs) {
      const auto img = format_set(lifted(x, y), a);
      images = images && img == "{A,B,C}";
      d << format_set(x, a) << "x" << format_set(y, a) << "=" << img << " ";
    }
    return Outcome{words.empty() && images, d.str()};
  });

  report(7, "synthesis over D3 from the rotation coset", [&] {
    const auto d3 = make_dihedral(3);
    const auto rule = group_rule(d3);
    const auto nu = set_atomic(d3.alphabet(), {}, {0b000111});
    const auto mu = synthesize(nu, rule);
    const auto ref = subgroup_uniform(d3, make_subgroup(d3, {0, 1, 2}));
    std::size_t compared = 0, equal = 0;
    for (std::size_t n = 1; n <= 5; ++n) {
      Word w(n, 0);
      // every word over the six elements
      while (true) {
        ++compared;
        if (mu->mass(w) == ref->mass(w)) ++equal;
        std::size_t i = n;
        while (i > 0 && w[i - 1] == 5) w[--i] = 0;
        if (i == 0) break;
        ++w[i - 1];
      }
    }
    const auto inv = verify_synthesis_invariance(nu, rule, 5, limits);
    const auto rt = round_trip_check(nu, rule, 4, 2, limits);
    const double rate = entropy_rate_estimate(*mu, 8, limits);
    std::ostringstream d;
    d << equal << "/" << compared << " cylinders equal; invariance " << inv.sigma.invariant << "/"
      << inv.tau.invariant << "; round trip " << to_string(rt.status) << "; rate(8) " << rate;
    return Outcome{equal == compared && inv.sigma.invariant && inv.tau.invariant &&
                       rt.status == RoundTripStatus::Pass && std::abs(rate - std::log(3.0)) < 0.05,
                   d.str()};
  });

  report(8, "zero-entropy sufficient criterion", [] {
    bool ok = true;
    std::ostringstream d;
    for (std::size_t m : {3, 5, 7}) {
      const auto g = make_dihedral(m);
      std::vector<Element> rot;
      for (Element i = 0; i < m; ++i) rot.push_back(i);
      const bool v = zero_ent_suff_check(g, make_subgroup(g, rot));
      ok = ok && v;
      d << "D" << m << "/C" << m << " " << v << "; ";
    }
    const auto z4 = make_cyclic(4);
    const bool v = zero_ent_suff_check(z4, make_subgroup(z4, {0, 2}));
    ok = ok && !v;
    d << "Z4/{0,2} " << v;
    return Outcome{ok, d.str()};
  });

  report(9, "reciprocity counts and the space-time diagonal", [] {
    const auto t0 = Clock::now();
    const PQSystem sys(2, 3);
    bool ok = true;
    std::uint64_t worst_pq = 0, worst_qp = 0;
    for (std::size_t l = 2; l <= 12; ++l) {
      const auto c = reciprocity_counts(sys, l);
      const auto a = refine_partition(sys, CircleMap::P, l);
      const auto b = refine_partition(sys, CircleMap::Q, c.m);
      const auto pq = max_interior_overlap(b, a), qp = max_interior_overlap(a, b);
      ok = ok && pq == c.max_p_over_q && qp == c.max_q_over_p && pq <= 4 && qp <= 2;
      worst_pq = std::max<std::uint64_t>(worst_pq, pq);
      worst_qp = std::max<std::uint64_t>(worst_qp, qp);
    }
    std::mt19937 rng(9);
    std::size_t diag = 0;
    for (int t = 0; t < 20; ++t) {
      const unsigned long den = 1 + rng() % 500;
      const RationalPoint x(Rational(static_cast<long>(rng() % den), den));
      const auto grid = space_time(sys, x, 12, 12);
      const auto digits = expansion(sys.base(), x, 12);
      bool same = true;
      for (std::size_t i = 0; i < 12; ++i) same = same && grid[i][i] == digits[i];
      if (same) ++diag;
    }
    const double dt = seconds_since(t0);
    std::ostringstream d;
    d << "l=2..12 max counts (" << worst_pq << ", " << worst_qp << ") by exact sweep; diagonal " << diag
      << "/20; " << dt << " s";
    return Outcome{ok && diag == 20 && dt < 5.0, d.str()};
  });

  report(10, "reports identical across --workers 1 and --workers 8", [] {
    const std::vector<std::string> commands{
        "rule check " + data_file("triangle.json"),
        "group info " + data_file("d3.json"),
        "measure check " + data_file("kitchens.json") + " --rule " + data_file("ledrappier.json") + " -n 8",
        "measure entropy " + data_file("kitchens.json") + " -n 12",
        "conditional census " + data_file("kitchens.json") + " -n 10",
        "conditional coset " + data_file("subgroup_d3.json") + " --group " + data_file("d3.json") + " -n 6",
        "conditional tail-probe " + data_file("kitchens.json") + " -k 2 -n 10",
        "conditional tau " + data_file("kitchens.json") + " --rule " + data_file("ledrappier.json") + " -n 6",
        "lift z-words " + data_file("triangle.json") + " -k 2 -L 3 -N 1",
        "lift z-words-group " + data_file("d3.json") + " -k 3 -L 4 -N 3",
        "lift intertwine " + data_file("subgroup_z4.json") + " --rule " + data_file("z4_rule.json") + " -n 5",
        "synth run " + data_file("nu_c3.json") + " --rule " + data_file("d3_rule.json") + " --verify --round-trip -n 4",
        "synth dihedral " + data_file("atomic0.json") + " -m 5 -n 6",
        "rlp counts -p 2 -q 3 --l-max 12",
        "rlp diagram -p 2 -q 3 -x 1/5 -w 8 -h 8",
    };
    std::size_t same = 0, valid = 0;
    std::string first_diff;
    for (const auto& cmd : commands) {
      const auto a = run_cli(cmd + " --json --workers 1");
      const auto b = run_cli(cmd + " --json --workers 8");
      if (a == b) ++same;
      else if (first_diff.empty()) first_diff = cmd;
      if (a.find("\"schema\":\"automeasure-report/1\"") != std::string::npos) ++valid;
    }
    std::ostringstream d;
    d << same << "/" << commands.size() << " byte-identical, " << valid << " well-formed reports";
    if (!first_diff.empty()) d << "; first difference: " << first_diff;
    return Outcome{same == commands.size() && valid == commands.size(), d.str()};
  });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " of 10 criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
