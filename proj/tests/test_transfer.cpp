#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"

using namespace rtm;

namespace {

ExperimentConfig small(const std::string& name) {
  ExperimentConfig cfg = fixture(name);
  if (name == "GEO") cfg.truncation = 6;
  if (name == "NOBIP") cfg.truncation = 6;
  return cfg;
}

void expect_close_log(double lib, double brute, const std::string& what) {
  if (brute == 0.0) {
    EXPECT_EQ(lib, neg_inf) << what;
    return;
  }
  EXPECT_NEAR(lib, std::log(brute), 1e-12 * std::max(1.0, std::abs(std::log(brute)))) << what;
}

}  // namespace

TEST(Transfer, PartitionFunctionsMatchBruteForce) {
  for (const auto& name : fixture_names()) {
    Model m = build_model(small(name));
    AnchorFamily anchors = make_anchors(m.shift(), 0);
    for (int o = 0; o < m.base().size(); ++o) {
      PartitionSequences s = partition_sequences(m, anchors, o, 7);
      for (int n = 1; n <= 7; ++n) {
        int end = advance(m.base(), o, n);
        std::string what = name + " omega=" + std::to_string(o) + " n=" + std::to_string(n);
        expect_close_log(s.logZ[n - 1], oracle::Z(m, o, 0, n), what + " Z");
        expect_close_log(s.logCZ[n - 1], oracle::CZ(m, o, anchors.first[end], n), what + " CZ");
        expect_close_log(s.logA[n - 1], oracle::A(m, o, n), what + " A");
        if (anchors.in_a(end))
          expect_close_log(s.logCZa[n - 1], oracle::CZ(m, o, 0, n, 0), what + " CZa");
      }
    }
  }
}

TEST(Transfer, RuelleOperatorMatchesPreimageSum) {
  Model m = build_model(fixture("DS3"));
  const RandomShift& shift = m.shift();
  FiberFunction f = FiberFunction::from(shift, 0, 2, [](const Symbols& w) { return 1.0 + w[0] + 3 * w[1]; });
  FiberFunction g = ruelle_apply(m, f);
  for (size_t i = 0; i < g.words().size(); ++i) {
    const Symbols& c = g.words()[i];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += m.weights(0)(a, c[0]) * (1.0 + a + 3 * c[0]);
    EXPECT_NEAR(g.values()(i), s, 1e-14);
  }
  EXPECT_THROW(ruelle_apply(m, FiberFunction::constant(shift, 0, 3, 1.0), 1), Error);
}

TEST(Transfer, LocalPreimageRequiresAnchorInA) {
  Model m = build_model(fixture("P2"));
  AnchorFamily anchors = make_anchors(m.shift(), 1);
  EXPECT_NO_THROW(log_local_preimage_Z(m, anchors, 0, 1, 2));
  EXPECT_THROW(log_gurevic_Z(m, 0, 5, 2), Error);
}

TEST(Transfer, AnchorPointIsAdmissibleAndEventuallyPeriodic) {
  RandomShift shift = build_shift(fixture("P2"));
  AnchorPoint p = anchor_point(shift, 1, 1, 12);
  EXPECT_EQ(p.prefix.size(), 12u);
  EXPECT_EQ(p.prefix[0], 1);
  EXPECT_TRUE(is_admissible(shift, 1, p.prefix));
  EXPECT_GT(p.period, 0);
}

TEST(Transfer, PressureClosedForms) {
  struct Case {
    const char* name;
    double value;
    double tol;
  };
  for (Case c : {Case{"FS2", std::log(2.0), 1e-12}, Case{"FS2-bernoulli", 0.0, 1e-12},
                 Case{"GM", std::log((1 + std::sqrt(5.0)) / 2), 1e-10},
                 Case{"GEO", std::log(1 - std::ldexp(1.0, -20)), 1e-12},
                 Case{"P2", 0.5 * std::log(1 + std::sqrt(2.0)), 1e-10}, Case{"DS3", 0.0, 1e-12},
                 Case{"STOCH2", 0.0, 1e-12}}) {
    Model m = build_model(fixture(c.name));
    PressureEstimate p = pressure(m, make_anchors(m.shift(), 0), 0, 4);
    EXPECT_NEAR(p.value, c.value, c.tol) << c.name;
    EXPECT_NEAR(p.value_local, c.value, c.tol) << c.name;
  }
}

TEST(Transfer, PressureIndependentOfSymbolAndBound) {
  Model m = build_model(fixture("P2"));
  double ref = pressure(m, make_anchors(m.shift(), 0), 0, 4).value;
  for (int a : {0, 1})
    for (int N : {2, 4, 8}) {
      AnchorFamily anchors = make_anchors(m.shift(), a);
      try {
        PressureEstimate p = pressure(m, anchors, a, N);
        EXPECT_NEAR(p.value, ref, 1e-9) << a << " " << N;
      } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::HypothesisFail);
      }
    }
}

TEST(Transfer, OmegaStarOnPeriodTwo) {
  RandomShift shift = build_shift(fixture("P2"));
  EXPECT_EQ(omega_star(shift, 0, 4, 64), (StateSet{0, 1}));
}

TEST(Transfer, DivergenceTableBehaviour) {
  Model m = build_model(fixture("GM"));
  AnchorFamily anchors = make_anchors(m.shift(), 0);
  double P = std::log((1 + std::sqrt(5.0)) / 2);
  DivergenceTable at = divergence_diagnostic(m, anchors, 0, {0}, std::exp(-P), 60);
  EXPECT_NEAR(at.slope, 1.0, 0.05);
  DivergenceTable below = divergence_diagnostic(m, anchors, 0, {0}, 0.5 * std::exp(-P), 60);
  EXPECT_LT(below.slope, 1e-6);
  EXPECT_THROW(divergence_diagnostic(m, anchors, 0, {0}, 0.0, 10), Error);
}

TEST(Transfer, ConnectorConstantsAreAtLeastTrivial) {
  ExperimentConfig cfg = fixture("P2");
  Model m = build_model(cfg);
  BipCertificate cert = build_certificate(cfg, m.shift());
  ConnectorConstant C = constant_C(m, cert, 0, 0, 3);
  EXPECT_GE(C.value, 1.0);
  for (const auto& v : C.connectors) {
    EXPECT_EQ(v.size(), 3u);
    EXPECT_TRUE(is_admissible(m.shift(), 0, v));
  }
  ConnectorConstant D = constant_D(m, cert, 0, 0, 3);
  for (const auto& v : D.connectors) EXPECT_TRUE(is_admissible(m.shift(), 0, v));
  EXPECT_GT(D.value, 0.0);
}

TEST(Transfer, ConnectorConstantsRejectBadHypotheses) {
  ExperimentConfig cfg = fixture("NOBIP");
  Model m = build_model(cfg);
  BipCertificate cert = build_certificate(cfg, m.shift());
  EXPECT_THROW(constant_C(m, cert, 0, 3, 2), Error);
  EXPECT_THROW(constant_D(m, cert, 0, 0, 0), Error);
}
