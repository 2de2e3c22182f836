#include "randgener/num_core.hpp"

#include <gtest/gtest.h>

#include <deque>

using namespace randgener;

namespace {

std::pair<RswModulus, Trapdoor> n77() { return rsw_setup_fixture(4, 7, 11); }

}  // namespace

TEST(NumCore, EvalByHand) {
  auto [m, td] = n77();
  EXPECT_EQ(rsw_eval(m, 3, GroupElement::in(m, 2)).value(), 25);  // 2^8 = 256 = 25 mod 77
  EXPECT_EQ(rsw_eval(m, 2, GroupElement::in(m, 3)).value(), 4);   // 3^4 = 81
  EXPECT_EQ(rsw_eval(m, 1, GroupElement::in(m, 3)).value(), 9);
}

TEST(NumCore, TrapdoorByHand) {
  auto [m, td] = n77();
  EXPECT_EQ(td.phi_n, 60);
  // 2^3 mod 60 = 8; 2^8 mod 77 = 25
  EXPECT_EQ(rsw_td_eval(m, td, 3, GroupElement::in(m, 2)).value(), 25);
}

TEST(NumCore, TrapdoorMatchesEvalExhaustive77) {
  auto [m, td] = n77();
  for (int v = 1; v < 77; ++v) {
    auto x = GroupElement::try_in(m.n, v);
    if (!x) continue;
    for (std::uint64_t t = 1; t <= 70; ++t) ASSERT_EQ(rsw_eval(m, t, *x), rsw_td_eval(m, td, t, *x)) << v << " " << t;
  }
}

TEST(NumCore, TrapdoorMatchesEvalRandom) {
  SeedSource rng(11);
  auto [m, td] = rsw_setup(64, rng);
  for (int i = 0; i < 20; ++i) {
    auto x = rsw_sample(m, rng);
    std::uint64_t t = 1 + rng.next_below(5000).get_ui();
    ASSERT_EQ(rsw_eval(m, t, x), rsw_td_eval(m, td, t, x));
  }
}

TEST(NumCore, GroupMembership) {
  EXPECT_FALSE(GroupElement::try_in(77, 0));
  EXPECT_FALSE(GroupElement::try_in(77, 7));
  EXPECT_FALSE(GroupElement::try_in(77, 22));
  EXPECT_FALSE(GroupElement::try_in(77, 77));
  EXPECT_TRUE(GroupElement::try_in(77, 76));
  try {
    GroupElement::in(77, 14);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::malformed);
  }
}

TEST(NumCore, SampleRejectsNonUnits) {
  auto [m, td] = n77();
  std::deque<BigInt> stream{7, 0, 77, 11, 5};
  auto x = rsw_sample(m, [&] {
    BigInt v = stream.front();
    stream.pop_front();
    return v;
  });
  EXPECT_EQ(x.value(), 5);
  EXPECT_TRUE(stream.empty());
}

TEST(NumCore, SampleGivesUpAfterCap) {
  auto [m, td] = n77();
  EXPECT_THROW(rsw_sample(m, [] { return BigInt(7); }), Error);
}

TEST(NumCore, SampledElementsAreUnits) {
  SeedSource rng(3);
  auto [m, td] = rsw_setup(16, rng);
  for (int i = 0; i < 500; ++i) {
    auto x = rsw_sample(m, rng);
    ASSERT_EQ(gcd(x.value(), m.n), 1);
    ASSERT_GT(x.value(), 0);
    ASSERT_LT(x.value(), m.n);
  }
}

TEST(NumCore, TrapdoorMismatch) {
  auto [m, td] = n77();
  auto [m2, td2] = rsw_setup_fixture(4, 11, 23);
  try {
    rsw_td_eval(m, td2, 3, GroupElement::in(m, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::trapdoor_mismatch);
  }
}

TEST(NumCore, EvalRejectsForeignElement) {
  auto [m, td] = n77();
  EXPECT_THROW(rsw_eval(m, 3, GroupElement::in(BigInt(253), 2)), Error);
  EXPECT_THROW(rsw_eval(m, 0, GroupElement::in(m, 2)), Error);
}

TEST(NumCore, SetupProducesSafePrimes) {
  for (unsigned lambda : {16u, 24u, 32u, 64u}) {
    SeedSource rng(lambda);
    auto [m, td] = rsw_setup(lambda, rng);
    auto sp = safe_prime_pair(td);
    EXPECT_TRUE(is_safe_prime(sp.p));
    EXPECT_TRUE(is_safe_prime(sp.q));
    EXPECT_NE(sp.p, sp.q);
    EXPECT_EQ(bit_length(sp.p), lambda);
    EXPECT_EQ(bit_length(sp.q), lambda);
    EXPECT_EQ(sp.p, 2 * sp.p_prime + 1);
    EXPECT_TRUE(td.matches(m));
    EXPECT_EQ(m.lambda, lambda);
  }
}

TEST(NumCore, SetupIsDeterministic) {
  SeedSource a(99), b(99), c(100);
  EXPECT_EQ(rsw_setup(32, a).first.n, rsw_setup(32, b).first.n);
  SeedSource d(99);
  EXPECT_NE(rsw_setup(32, c).first.n, rsw_setup(32, d).first.n);
}

TEST(NumCore, SetupRejectsSmallLambda) { 
  SeedSource rng(1);
  EXPECT_THROW(rsw_setup(15, rng), Error);
}

TEST(NumCore, GenerationTimeout) {
  SeedSource rng(5);
  RswSetupOptions opts;
  opts.attempt_budget = 1;
  int timeouts = 0;
  for (int i = 0; i < 20; ++i) {
    try {
      rsw_setup(64, rng, opts);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::generation_timeout);
      ++timeouts;
    }
  }
  EXPECT_GT(timeouts, 15);
}

TEST(NumCore, FixtureValidation) {
  EXPECT_THROW(rsw_setup_fixture(4, 7, 7), Error);
  EXPECT_THROW(rsw_setup_fixture(4, 13, 7), Error);  // 13 is not safe
  EXPECT_THROW(rsw_setup_fixture(4, 5, 9), Error);
  EXPECT_NO_THROW(rsw_setup_fixture(6, 47, 59));
}

TEST(NumCore, MillerRabinAgainstSieve) {
  constexpr int limit = 20000;
  std::vector<bool> composite(limit, false);
  composite[0] = composite[1] = true;
  for (int i = 2; i * i < limit; ++i)
    if (!composite[i])
      for (int j = i * i; j < limit; j += i) composite[j] = true;
  for (int i = 0; i < limit; ++i) ASSERT_EQ(is_probable_prime(i), !composite[i]) << i;
}

TEST(NumCore, MillerRabinCarmichaelAndKnownPrimes) {
  for (long c : {561L, 1105L, 1729L, 2465L, 2821L, 6601L, 8911L, 3215031751L}) EXPECT_FALSE(is_probable_prime(c)) << c;
  BigInt m127 = (BigInt(1) << 127) - 1;
  EXPECT_TRUE(is_probable_prime(m127));
  EXPECT_FALSE(is_probable_prime(m127 * 3));
  // 2^64 - 59 is the largest prime below 2^64.
  BigInt p = (BigInt(1) << 64) - 59;
  EXPECT_TRUE(is_probable_prime(p));
  EXPECT_FALSE(is_probable_prime(p + 2));
}

TEST(NumCore, PowModAgreesWithGmp) {
  SeedSource rng(8);
  for (int i = 0; i < 200; ++i) {
    BigInt n = rng.next_bits(200) | 1;
    BigInt b = rng.next_bits(220);
    BigInt e = rng.next_bits(1 + i);
    BigInt expect;
    mpz_powm(expect.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
    ASSERT_EQ(pow_mod(b, e, n), expect);
    OpCounter ops;
    CountScope scope(ops);
    ASSERT_EQ(pow_mod(b, e, n), expect);
  }
}

TEST(NumCore, CountersTrackWork) {
  auto [m, td] = n77();
  OpCounter ops;
  {
    CountScope scope(ops);
    rsw_eval(m, 37, GroupElement::in(m, 2));
  }
  EXPECT_EQ(ops.squarings, 37u);
  EXPECT_EQ(ops.multiplications, 0u);

  OpCounter bin;
  {
    CountScope scope(bin);
    pow_mod(3, 0b101101, 77);  // 5 squarings, 3 multiplications
  }
  EXPECT_EQ(bin.multiplications, 8u);

  OpCounter outer, inner;
  {
    CountScope a(outer);
    {
      CountScope b(inner);
      rsw_eval(m, 4, GroupElement::in(m, 2));
    }
    rsw_eval(m, 2, GroupElement::in(m, 2));
  }
  EXPECT_EQ(inner.squarings, 4u);
  EXPECT_EQ(outer.squarings, 2u);
}

TEST(NumCore, EvalCancellation) {
  SeedSource rng(2);
  auto [m, td] = rsw_setup(32, rng);
  std::stop_source src;
  src.request_stop();
  try {
    rsw_eval(m, 1u << 20, rsw_sample(m, rng), src.get_token());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cancelled);
  }
}

TEST(NumCore, SerializationIsMinimalBigEndian) {
  EXPECT_EQ(to_hex(serialize(0)), "00000000");
  EXPECT_EQ(to_hex(serialize(1)), "0000000101");
  EXPECT_EQ(to_hex(serialize(400)), "000000020190");
  EXPECT_EQ(from_bytes(to_bytes(BigInt("123456789012345678901234567890"))), BigInt("123456789012345678901234567890"));
  EXPECT_EQ(bigint_from_hex(to_hex(BigInt(77))), 77);
  EXPECT_THROW(bigint_from_hex("xyz"), Error);
}

TEST(NumCore, SeedSourceStreamsAreDeterministicAndSeparated) {
  SeedSource a(1), b(1);
  EXPECT_EQ(a.next_bytes(40), b.next_bytes(40));
  EXPECT_NE(a.next_bytes(8), SeedSource(2).next_bytes(8));
  EXPECT_NE(SeedSource(1).derive("x", 0).key(), SeedSource(1).derive("x", 1).key());
  EXPECT_NE(SeedSource(1).derive("x", 0).key(), SeedSource(1).derive("y", 0).key());
  SeedSource c(4);
  for (int i = 0; i < 1000; ++i) ASSERT_LT(c.next_below(7), 7);
}
