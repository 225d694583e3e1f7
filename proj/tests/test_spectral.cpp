#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"

using namespace rtm;

namespace {

struct Fitted {
  Model model;
  AnchorFamily anchors;
  double P;
  StateSet target;
};

Fitted fitted(const std::string& name) {
  Model m = build_model(fixture(name));
  AnchorFamily anchors = make_anchors(m.shift(), 0);
  PressureEstimate p = pressure(m, anchors, 0, 4);
  return {std::move(m), anchors, p.value, p.omega_star};
}

}  // namespace

TEST(Spectral, ScheduleApproachesRadius) {
  auto s = default_schedule(std::log(2.0), 4);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[0], 0.25);
  EXPECT_DOUBLE_EQ(s[3], (1 - 1.0 / 16) / 2);
}

TEST(Spectral, PowerSeriesMatchesDirectSum) {
  for (const char* name : {"GM", "P2", "DS3"}) {
    Fitted st = fitted(name);
    double s = 0.7 * std::exp(-st.P);
    for (int o = 0; o < st.model.base().size(); ++o) {
      PartitionSequences seq = partition_sequences(st.model, st.anchors, o, 45);
      for (int N : {1, 7, 20, 45}) {
        double direct = 0.0;
        for (int n = 1; n <= N; ++n)
          if (contains(st.target, advance(st.model.base(), o, n)))
            direct += std::pow(s, n) * std::exp(seq.logCZ[n - 1]);
        EXPECT_NEAR(power_series(st.model, st.anchors, o, st.target, s, N), direct, 1e-12 * direct)
            << name << " " << o << " " << N;
      }
    }
  }
}

TEST(Spectral, SeriesBlowsUpOnlyAtTheRadius) {
  Fitted st = fitted("GM");
  long long N = auto_truncation(st.model.base(), 1e-6);
  double near = power_series(st.model, st.anchors, 0, st.target, (1 - 1e-6) * std::exp(-st.P), N);
  double far = power_series(st.model, st.anchors, 0, st.target, 0.5 * std::exp(-st.P), N);
  EXPECT_GT(near, 1e5);
  EXPECT_LT(far, 10.0);
  EXPECT_GT(auto_truncation(st.model.base(), 1e-3), 1000);
}

TEST(Spectral, QuotientOnOneStateBaseIsOne) {
  for (const char* name : {"FS2", "GM", "GEO"}) {
    Fitted st = fitted(name);
    QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 20));
    EXPECT_NEAR(q.lambda[0], 1.0, 1e-12) << name;
    EXPECT_EQ(q.violations, 0);
    EXPECT_GT(q.checks, 0);
  }
}

TEST(Spectral, QuotientReproducesCycleSpectralRadius) {
  for (const char* name : {"P2", "STOCH2", "DS3"}) {
    Fitted st = fitted(name);
    QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
    double rho = oracle::spectral_radius(oracle::cycle_product(st.model, 0));
    EXPECT_NEAR(q.lambda[0] * q.lambda[1] * std::exp(2 * st.P), rho, 1e-7) << name;
    EXPECT_NEAR(log_Lambda(st.model.base(), q.lambda, 0, 2), std::log(q.lambda[0] * q.lambda[1]), 1e-15);
    EXPECT_NEAR(log_Lambda(st.model.base(), q.lambda, 1, 5),
                2 * std::log(q.lambda[0] * q.lambda[1]) + std::log(q.lambda[1]), 1e-14);
  }
}

TEST(Spectral, DualFixedPointIsThePerronVector) {
  for (const char* name : {"GM", "P2", "DS3", "GEO"}) {
    Fitted st = fitted(name);
    DualMeasure d = dual_fixed_point(st.model, 1e-14);
    for (int o = 0; o < st.model.base().size(); ++o) {
      Eigen::VectorXd v = oracle::perron_vector(oracle::cycle_product(st.model, o));
      EXPECT_LT((d.nu[o] - v).cwiseAbs().maxCoeff(), 1e-10) << name << " " << o;
    }
  }
}

TEST(Spectral, SeriesAndDualMeasuresAgree) {
  for (const char* name : {"GM", "P2", "DS3"}) {
    Fitted st = fitted(name);
    CylinderMeasure dual = measure_from_dual(st.model, dual_fixed_point(st.model, 1e-14), 3);
    CylinderMeasure series = conformal_measure(st.model, st.anchors, st.target, st.P, 3, MeasureMethod::Series);
    EXPECT_LT(tv_distance(dual, series), 1e-6) << name;
    CylinderMeasure coarse = measure_from_dual(st.model, dual_fixed_point(st.model, 1e-14), 2);
    EXPECT_LT(refinement_defect(dual, coarse), 1e-14) << name;
    for (int o = 0; o < st.model.base().size(); ++o) EXPECT_NEAR(dual.total(o), 1.0, 1e-14);
  }
}

TEST(Spectral, ConformalityResidualDetectsPerturbation) {
  Fitted st = fitted("P2");
  QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
  CylinderMeasure mu = measure_from_dual(st.model, dual_fixed_point(st.model, 1e-14), 2);
  EXPECT_LT(conformality_residual(st.model, mu, q.lambda, st.P).value, 1e-8);
  mu.mass[0].values()(0) += 1e-3;
  mu.mass[0].values()(1) -= 1e-3;
  EXPECT_GT(conformality_residual(st.model, mu, q.lambda, st.P).value, 1e-5);
}

TEST(Spectral, EigenfunctionIsTheLeftPerronVector) {
  for (const char* name : {"GM", "P2", "DS3"}) {
    Fitted st = fitted(name);
    QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
    DualMeasure dual = dual_fixed_point(st.model, 1e-14);
    CylinderMeasure mu = measure_from_dual(st.model, dual, 1);
    EigenData eig = eigenfunction(st.model, mu, q.lambda, st.P);
    EXPECT_LT(eig.residual_re, 1e-12) << name;
    for (int o = 0; o < st.model.base().size(); ++o) {
      Eigen::VectorXd left = oracle::perron_vector(oracle::cycle_product(st.model, o).transpose());
      Eigen::VectorXd h = eig.h1[o] / eig.h1[o].sum();
      EXPECT_LT((h - left).cwiseAbs().maxCoeff(), 1e-10) << name;
      EXPECT_NEAR(eig.h1[o].dot(dual.nu[o]), 1.0, 1e-12);
    }
  }
}

TEST(Spectral, GibbsReportPassesAndCatchesPerturbation) {
  ExperimentConfig cfg = fixture("GM");
  Fitted st = fitted("GM");
  BipCertificate cert = build_certificate(cfg, st.model.shift());
  QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
  DualMeasure dual = dual_fixed_point(st.model, 1e-14);
  EXPECT_TRUE(gibbs_report(st.model, cert, dual, q.lambda, st.P, 8).all_pass());
  EXPECT_GT(gibbs_D(st.model, dual, 0), 0.0);
  dual.nu[0] << 0.999, 0.001;
  EXPECT_GT(gibbs_report(st.model, cert, dual, q.lambda, st.P, 8).violations, 0);
}

TEST(Spectral, RecurrenceIsBounded) {
  Fitted st = fitted("P2");
  QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
  RecurrenceReport r = recurrence_report(st.model, q.lambda, st.P, 0, 40);
  EXPECT_TRUE(r.bounded);
  for (int o = 0; o < 2; ++o) {
    EXPECT_GT(r.min[o], 0.0);
    EXPECT_LT(r.max[o] / r.min[o], 10.0);
  }
}

TEST(Spectral, FitRateOnGeometricSequence) {
  std::vector<int> n;
  std::vector<double> d;
  for (int k = 1; k <= 40; ++k) {
    n.push_back(k);
    d.push_back(3.0 * std::pow(0.6, k));
  }
  EXPECT_NEAR(fit_rate(n, d), 0.6, 1e-12);
}

TEST(Spectral, ExactnessRateMatchesSpectralGap) {
  Fitted st = fitted("P2");
  QuotientReport q = lambda_quotient(st.model, st.anchors, st.target, st.P, default_schedule(st.P, 30));
  DualMeasure dual = dual_fixed_point(st.model, 1e-14);
  EigenData eig = eigenfunction(st.model, measure_from_dual(st.model, dual, 1), q.lambda, st.P);
  FiberFunction f = FiberFunction::indicator(st.model.shift(), 0, 1, {0});
  DecayTable t = exactness_convergence(st.model, dual, eig, f, 60);
  // two steps per base period
  double per_step = std::sqrt(oracle::gap_ratio(oracle::cycle_product(st.model, 0)));
  // per-state lambda errors near 1e-10 leave a plateau, so fit above it
  EXPECT_NEAR(fit_rate(t.n, t.deviation, 1e-8), per_step, 0.2 * per_step);
  EXPECT_LT(t.deviation.back(), 1e-6);
}
