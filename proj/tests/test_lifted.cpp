#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "automeasure/lifted.hpp"
#include "automeasure/synthesis.hpp"
#include "oracles.hpp"

using namespace automeasure;

namespace {

/// Brute force over every set word of length L over size-k subsets.
std::set<SetWord> z_oracle(const LocalRule& r, std::size_t k, std::size_t length, std::size_t steps) {
  const std::size_t n = r.size();
  std::vector<Mask> cands;
  for (Mask m = 1; m < (Mask{1} << n); ++m)
    if (static_cast<std::size_t>(__builtin_popcountll(m)) == k) cands.push_back(m);
  auto image = [&](Mask a, Mask b) {
    Mask out = 0;
    for (Symbol x = 0; x < n; ++x)
      for (Symbol y = 0; y < n; ++y)
        if ((a >> x & 1) && (b >> y & 1)) out |= Mask{1} << r(x, y);
    return out;
  };
  std::set<SetWord> out;
  for (const auto& idx : oracle::all_words(cands.size(), length)) {
    SetWord w;
    for (Symbol i : idx) w.push_back(cands[i]);
    SetWord cur = w;
    bool ok = true;
    for (std::size_t s = 0; s < steps && ok; ++s) {
      SetWord next;
      for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
        next.push_back(image(cur[i], cur[i + 1]));
        ok = ok && static_cast<std::size_t>(__builtin_popcountll(next.back())) == k;
      }
      cur = next;
    }
    if (ok) out.insert(w);
  }
  return out;
}

}  // namespace

TEST(SetRule, Examples) {
  const SetRule led(ledrappier_rule());
  EXPECT_EQ(led(0b11, 0b11), 0b11u);
  EXPECT_EQ(led(0b01, 0b10), 0b10u);
  const auto tri = triangle_rule();
  const SetRule t(tri);
  const Alphabet& a = tri.alphabet();
  for (Mask x : {0b011u, 0b101u, 0b110u})
    for (Mask y : {0b011u, 0b101u, 0b110u}) EXPECT_EQ(format_set(t(x, y), a), "{A,B,C}");
  for (Symbol x = 0; x < 3; ++x)
    for (Symbol y = 0; y < 3; ++y) EXPECT_EQ(t(singleton(x), singleton(y)), singleton(tri(x, y)));
}

TEST(SetRule, LargeAlphabetUntabulated) {
  std::mt19937 rng(41);
  const auto r = oracle::random_latin_rule(rng, 10);
  const SetRule s(r);
  EXPECT_EQ(s(singleton(3), singleton(4)), singleton(r(3, 4)));
  EXPECT_EQ(s(0b11, 0b1), singleton(r(0, 0)) | singleton(r(1, 0)));
}

TEST(ZWords, Examples) {
  EXPECT_TRUE(z_words(triangle_rule(), 2, 3, 1).empty());
  EXPECT_EQ(z_words(ledrappier_rule(), 1, 4, 3).size(), 16u);
  const auto full = z_words(ledrappier_rule(), 2, 4, 3);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0], SetWord(4, 0b11));
  EXPECT_THROW(z_words(ledrappier_rule(), 3, 4, 1), Error);
  EXPECT_THROW(z_words(ledrappier_rule(), 1, 3, 3), Error);
}

TEST(ZWords, MatchBruteForce) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 3 + trial % 2;
    const auto r = trial % 3 == 0 ? oracle::random_rule(rng, n) : oracle::random_latin_rule(rng, n);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto got = z_words(r, k, 4, 2, 1 + trial % 3);
      const std::set<SetWord> as_set(got.begin(), got.end());
      EXPECT_EQ(as_set.size(), got.size());
      EXPECT_EQ(as_set, z_oracle(r, k, 4, 2));
    }
  }
}

TEST(ZWordsGroup, Examples) {
  const auto z4 = make_cyclic(4);
  const auto a = z_words_group(z4, 2, 3, 2);
  EXPECT_EQ(a.words.size(), 8u);
  EXPECT_TRUE(a.normalizer_verdict);
  ASSERT_TRUE(a.subgroup.has_value());
  EXPECT_EQ(*a.subgroup, make_subgroup(z4, {0, 2}));
  for (const auto& w : a.words)
    for (Mask m : w) EXPECT_TRUE(m == 0b0101 || m == 0b1010);

  const auto d3 = make_dihedral(3);
  const auto b = z_words_group(d3, 3, 3, 2);
  EXPECT_TRUE(b.normalizer_verdict);
  EXPECT_EQ(b.words.size(), 8u);
  for (const auto& w : b.words)
    for (Mask m : w) EXPECT_TRUE(m == 0b000111 || m == 0b111000);

  const auto c = z_words_group(d3, 6, 4, 3);
  ASSERT_EQ(c.words.size(), 1u);
  EXPECT_EQ(c.words[0], SetWord(4, 0b111111));
}

TEST(ZWordsGroup, NormalizerVerdictWhenSubgroupsAreNormal) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto g = make_cyclic(n);
    for (std::size_t k = 1; k <= n; ++k)
      if (n % k == 0) EXPECT_TRUE(z_words_group(g, k, 3, 2).normalizer_verdict);
  }
  for (std::size_t m = 2; m <= 4; ++m) {
    const auto d = make_dihedral(m);
    EXPECT_TRUE(z_words_group(d, m, 3, 2).normalizer_verdict);
    EXPECT_TRUE(z_words_group(d, 2 * m, 3, 2).normalizer_verdict);
  }
}

/// Finite words may chain cosets of conjugate, non-normal subgroups:
/// H g then g⁻¹ H g. Every component still is a right coset of size k.
TEST(ZWordsGroup, NonNormalSubgroupsCanChain) {
  const auto d3 = make_dihedral(3);
  const auto r = z_words_group(d3, 2, 3, 2);
  EXPECT_FALSE(r.normalizer_verdict);
  EXPECT_FALSE(r.offending.empty());
  for (const auto& w : r.words)
    for (Mask m : w) {
      const auto e = to_symbols(m);
      ASSERT_EQ(e.size(), 2u);
      std::vector<Element> h{0, d3.mul(e[1], d3.inverse(e[0]))};
      std::sort(h.begin(), h.end());
      EXPECT_TRUE(is_subgroup(d3, h));
    }
}

TEST(PiFactor, Examples) {
  for (const auto& img : pi_factor(*uniform(Alphabet::numbered(2)), 5, 2))
    EXPECT_EQ(img.sets, SetWord(3, 0b11));
  const auto z4 = make_cyclic(4);
  const auto m = subgroup_uniform(z4, make_subgroup(z4, {0, 2}));
  for (const auto& img : pi_factor(*m, 5, 2)) EXPECT_EQ(img.sets, SetWord(3, 0b0101));
  bool singleton_seen = false, pair_seen = false;
  for (const auto& img : pi_factor(*oracle::kitchens_measure(), 8, 3))
    for (Mask s : img.sets) (set_size(s) == 1 ? singleton_seen : pair_seen) = true;
  EXPECT_TRUE(singleton_seen);
  EXPECT_TRUE(pair_seen);
}

TEST(Intertwining, Examples) {
  const auto led = ledrappier_rule();
  const auto u = intertwining_check(*uniform(Alphabet::numbered(2)), led, 6, 2);
  EXPECT_TRUE(u.holds);
  EXPECT_GT(u.compared, 0u);
  const auto z4 = make_cyclic(4);
  EXPECT_TRUE(intertwining_check(*subgroup_uniform(z4, make_subgroup(z4, {0, 2})), group_rule(z4), 5, 2).holds);
  const auto d3 = make_dihedral(3);
  const auto mu = synthesize(set_atomic(d3.alphabet(), {}, {0b000111}), group_rule(d3));
  const auto s = intertwining_check(*mu, group_rule(d3), 5, 2);
  EXPECT_TRUE(s.holds);
  EXPECT_GT(s.compared, 0u);
}
