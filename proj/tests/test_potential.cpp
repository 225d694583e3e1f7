#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"

using namespace rtm;

TEST(Potential, GeometricSummabilityAtTwenty) {
  Model m = build_model(fixture("GEO"));
  Summability s = summability_bounds(m, 0);
  double expect = 1.0 - std::ldexp(1.0, -20);
  EXPECT_NEAR(s.m, expect, 1e-15);
  EXPECT_NEAR(s.M, expect, 1e-15);
  EXPECT_NEAR(s.M_with_tail, 1.0, 1e-15);
  EXPECT_TRUE(s.tail_certified);
}

TEST(Potential, GeometricTruncationLevel) {
  EXPECT_EQ(geometric_truncation(1e-6), 20);
  EXPECT_EQ(geometric_truncation(0.3), 2);
  EXPECT_THROW(geometric_truncation(0.0), Error);
}

TEST(Potential, ZeroPotentialOnCountableAlphabetIsNotTailCertified) {
  Model m = build_model(fixture("NOBIP"));
  EXPECT_FALSE(m.potential().tail_flag);
}

TEST(Potential, WeightsCarryAdjacencyAndExponential) {
  Model m = build_model(fixture("DS3"));
  ExperimentConfig cfg = fixture("DS3");
  for (int o = 0; o < 2; ++o) EXPECT_LT((m.weights(o) - cfg.matrices[o]).cwiseAbs().maxCoeff(), 1e-15);
  Model gm = build_model(fixture("GM"));
  EXPECT_EQ(gm.weights(0)(1, 1), 0.0);
  EXPECT_EQ(gm.weights(0)(1, 0), 1.0);
}

TEST(Potential, RejectsMismatchedMatrixSignum) {
  ExperimentConfig cfg = fixture("DS3");
  cfg.potentials[0].matrix[0][1] = 0.0;
  EXPECT_THROW(build_model(cfg), Error);
}

TEST(Potential, DistortionClosedFormOnCycles) {
  Model fs2 = build_model(fixture("FS2"));
  EXPECT_NEAR(distortion_B(fs2, 0), std::exp(1.0), 1e-14);  // kappa r / (1 - r) with kappa 1, r 1/2
  ExperimentConfig cfg = fixture("P2");
  cfg.kappa = {1.0, 3.0};
  Model p2 = build_model(cfg);
  // sum over k >= 1 of kappa(theta^-k omega) 2^-k
  EXPECT_NEAR(std::log(distortion_B(p2, 0)), (3.0 / 2 + 1.0 / 4) / (1 - 0.25), 1e-14);
  EXPECT_NEAR(std::log(distortion_B(p2, 1)), (1.0 / 2 + 3.0 / 4) / (1 - 0.25), 1e-14);
}

TEST(Potential, DistortionOnSampledPathBracketsTheSeries) {
  ExperimentConfig cfg = fixture("P2");
  cfg.mode = BaseMode::SampledPath;
  cfg.path = {0, 1, 1, 0, 1};
  cfg.period = 5;
  cfg.certificate.reset();
  Model m = build_model(cfg);
  Distortion d = distortion(m.potential(), m.base(), 0, 40);
  EXPECT_FALSE(d.closed_form);
  EXPECT_LE(d.lower, d.upper);
  EXPECT_NEAR(std::log(d.lower), 1.0, 1e-11);
}

TEST(Potential, BirkhoffSumsMatchDirectSum) {
  Model m = build_model(fixture("DS3"));
  Symbols w = {0, 2, 1, 1};
  // A0(0,2) A1(2,1) A0(1,1)
  double direct = std::log(0.2) + std::log(0.1) + std::log(0.5);
  EXPECT_NEAR(phi_sum(m, 0, w, 3, Eval::Exact), direct, 1e-14);
  EXPECT_NEAR(phi_sum(m, 0, w, 4, Eval::Sup), direct + std::log(0.6), 1e-14);
  EXPECT_NEAR(phi_sum(m, 0, w, 4, Eval::Inf), direct + std::log(0.1), 1e-14);
  EXPECT_NEAR(phi_sum(m, 0, w, 4, Eval::Point, {0}), direct + std::log(0.6), 1e-14);
  EXPECT_THROW(phi_sum(m, 0, w, 4, Eval::Exact), Error);
}

TEST(Potential, VariationOfLocallyConstantPotentials) {
  Model ds3 = build_model(fixture("DS3"));
  EXPECT_NEAR(variation(ds3, 1, 1), std::log(6.0), 1e-14);
  EXPECT_EQ(variation(ds3, 0, 2), 0.0);
  Model geo = build_model(fixture("GEO"));
  EXPECT_EQ(variation(geo, 0, 1), 0.0);
  EXPECT_NEAR(variation(geo, 0, 0), 19 * std::log(2.0), 1e-12);
}

TEST(Potential, ConditionsOnFixtures) {
  for (const char* name : {"FS2", "GM", "P2", "DS3", "GEO"}) {
    ExperimentConfig cfg = fixture(name);
    Model m = build_model(cfg);
    ConditionReport c = check_conditions(m, build_certificate(cfg, m.shift()));
    EXPECT_TRUE(c.H1 && c.H2 && c.Hstar && c.S1 && c.S2) << name;
  }
  ExperimentConfig cfg = fixture("DS3");
  cfg.kappa = {1.0};
  Model m = build_model(cfg);
  EXPECT_FALSE(check_conditions(m, build_certificate(cfg, m.shift())).holder1);
}
