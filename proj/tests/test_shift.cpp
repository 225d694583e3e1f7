#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"

using namespace rtm;

TEST(Shift, WordCountsMatchBruteForce) {
  for (const auto& name : fixture_names()) {
    ExperimentConfig cfg = fixture(name);
    if (name == "GEO") cfg.truncation = 5;
    RandomShift shift = build_shift(cfg);
    for (int o = 0; o < shift.base().size(); ++o)
      for (int n = 1; n <= 6; ++n) {
        auto brute = oracle::words(shift, o, n);
        auto words = admissible_words(shift, o, n);
        ASSERT_EQ(words.size(), brute.size()) << name << " n=" << n;
        EXPECT_DOUBLE_EQ(count_words(shift, o, n), static_cast<double>(brute.size()));
        for (size_t i = 0; i < words.size(); ++i) EXPECT_EQ(words[i].symbols, brute[i]);
      }
  }
}

TEST(Shift, BandRuleTruncatedAtFour) {
  ExperimentConfig cfg = fixture("NOBIP");
  cfg.truncation = 4;
  RandomShift shift = build_shift(cfg);
  EXPECT_EQ(admissible_words(shift, 0, 2).size(), 7u);
}

TEST(Shift, GoldenMeanCountsAreFibonacci) {
  RandomShift shift = build_shift(fixture("GM"));
  double f1 = 1, f2 = 2;  // words of length 0 and 1
  for (int n = 1; n <= 20; ++n) {
    EXPECT_DOUBLE_EQ(count_words(shift, 0, n), f2);
    double next = f1 + f2;
    f1 = f2;
    f2 = next;
  }
}

TEST(Shift, AdmissibilityFollowsTheEnvironment) {
  RandomShift shift = build_shift(fixture("P2"));
  EXPECT_TRUE(is_admissible(shift, 0, {1, 0, 1}));
  EXPECT_FALSE(is_admissible(shift, 0, {1, 1}));
  EXPECT_FALSE(is_admissible(shift, 1, {1, 0}));
  EXPECT_TRUE(is_admissible(shift, 1, {1, 1, 0}));
}

TEST(Shift, BipAcceptsCertifiedFixtures) {
  for (const char* name : {"FS2", "GM", "P2", "GEO", "DS3"}) {
    ExperimentConfig cfg = fixture(name);
    RandomShift shift = build_shift(cfg);
    EXPECT_TRUE(verify_bip(shift, build_certificate(cfg, shift)).ok()) << name;
  }
}

TEST(Shift, BipRejectsBandRuleWithWitness) {
  ExperimentConfig cfg = fixture("NOBIP");
  RandomShift shift = build_shift(cfg);
  BipReport rep = verify_bip(shift, build_certificate(cfg, shift));
  EXPECT_FALSE(rep.images_ok);
  ASSERT_FALSE(rep.image_failures.empty());
  EXPECT_EQ(rep.image_failures[0].omega, 0);
  EXPECT_EQ(rep.image_failures[0].a, 1);
  EXPECT_EQ(rep.truncation, 16);
  EXPECT_FALSE(search_bip_certificate(shift, 2).has_value());
}

TEST(Shift, CertificateSearchFindsSmallSets) {
  RandomShift shift = build_shift(fixture("GM"));
  auto cert = search_bip_certificate(shift);
  ASSERT_TRUE(cert.has_value());
  EXPECT_TRUE(verify_bip(shift, *cert).ok());
  EXPECT_EQ(cert->images[0], (std::vector<int>{0}));
}

TEST(Shift, MixingOnFullAndBandShifts) {
  RandomShift full = build_shift(fixture("FS2"));
  MixingTime m = mixing_time(full, 0, 0, 1, 20);
  EXPECT_TRUE(m.mixed);
  EXPECT_LE(m.N, 2);
  RandomShift band = build_shift(fixture("NOBIP"));
  EXPECT_FALSE(mixing_time(band, 0, 1, 0, 20).mixed);
}

TEST(Shift, WordsBetweenEndpoints) {
  RandomShift shift = build_shift(fixture("GM"));
  for (int n = 1; n <= 8; ++n) {
    size_t brute = 0;
    for (const auto& w : oracle::words(shift, 0, n))
      if (w.front() == 0 && shift.allowed(0, w.back(), 0)) ++brute;
    EXPECT_EQ(words_between(shift, 0, n, 0, 0).size(), brute) << n;
  }
}
