#include <gtest/gtest.h>

#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"
#include "rtm/run.hpp"

using namespace rtm;
using nlohmann::json;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Config, FixturesRoundTrip) {
  for (const auto& name : fixture_names()) {
    ExperimentConfig cfg = fixture(name);
    json j = cfg.to_json();
    ExperimentConfig back = ExperimentConfig::from_json(j);
    EXPECT_EQ(back.to_json(), j) << name;
    EXPECT_EQ(config_digest(back), config_digest(cfg));
    EXPECT_EQ(resolve_config(json{{"fixture", name}}).to_json(), j);
  }
}

TEST(Config, DigestTracksContent) {
  ExperimentConfig a = fixture("GM"), b = fixture("GM");
  EXPECT_EQ(config_digest(a), config_digest(b));
  EXPECT_EQ(config_digest(a).size(), 64u);
  b.run.seed = 2;
  EXPECT_NE(config_digest(a), config_digest(b));
}

TEST(Config, MergeOverridesFixture) {
  json doc = {{"fixture", "FS2"}, {"run", {{"n_max", 30}, {"seed", 5}}}};
  ExperimentConfig cfg = resolve_config(doc);
  EXPECT_EQ(cfg.run.n_max, 30);
  EXPECT_EQ(cfg.run.seed, 5u);
  EXPECT_EQ(cfg.run.q, fixture("FS2").run.q);
}

TEST(Config, UnknownFixture) {
  EXPECT_EQ(kind_of([] { fixture("XYZ"); }), ErrorKind::UnknownFixture);
  EXPECT_EQ(exit_code_for(ErrorKind::UnknownFixture), exit_code::config);
}

TEST(Config, RejectsBadDocuments) {
  json good = fixture("P2").to_json();
  good.erase("fixture");
  EXPECT_NO_THROW(resolve_config(good));

  auto broken = [&](const std::function<void(json&)>& edit) {
    json j = good;
    edit(j);
    return kind_of([&] { resolve_config(j); });
  };
  EXPECT_EQ(broken([](json& j) { j["extra"] = 1; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["run"].erase("seed"); }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["run"]["target"] = {5}; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["base"]["period"] = 0; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["base"]["mode"] = "spiral"; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["potential"]["r"] = 1.5; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["potential"]["kappa"] = {0.5}; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["certificate"]["omega_bi"] = {7}; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["shift"]["environments"][0] = {{"generator", "weird"}}; }),
            ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["run"]["n_max"] = "forty"; }), ErrorKind::ConfigError);
  EXPECT_EQ(broken([](json& j) { j["run"]["tolerances"]["pf"] = -1; }), ErrorKind::ConfigError);
}

TEST(Config, SampledPathBase) {
  json doc = fixture("P2").to_json();
  doc.erase("fixture");
  doc["base"] = {{"mode", "path"}, {"path", {0, 1, 1, 0}}};
  doc.erase("certificate");
  ExperimentConfig cfg = resolve_config(doc);
  BaseSystem base = build_base(cfg);
  EXPECT_EQ(base.size(), 4);
  EXPECT_EQ(base.label(2), 1);
  RandomShift shift = build_shift(cfg);
  EXPECT_TRUE(shift.allowed(2, 1, 1));
  EXPECT_FALSE(shift.allowed(3, 1, 1));
}

TEST(Config, CocycleFromModelWeights) {
  MatrixCocycle A = build_cocycle(fixture("GM"));
  EXPECT_EQ(A.at(0)(1, 1), 0.0);
  EXPECT_EQ(A.at(0)(0, 1), 1.0);
}

TEST(Run, CommandNames) {
  for (const char* n : {"check-bip", "pressure", "rpf", "conformal", "gibbs", "matrix-pf", "stationary", "all"})
    EXPECT_EQ(command_name(*parse_command(n)), n);
  EXPECT_FALSE(parse_command("nope").has_value());
}

TEST(Run, AllPassesOnEveryFixtureButNobip) {
  for (const auto& name : fixture_names()) {
    RunReport r = run(Command::All, fixture(name));
    int expect = name == "NOBIP" ? exit_code::bip : exit_code::ok;
    EXPECT_EQ(r.exit_code, expect) << name << " " << r.json.dump();
  }
}

TEST(Run, CsvIsDeterministic) {
  RunReport a = run(Command::All, fixture("DS3")), b = run(Command::All, fixture("DS3"));
  EXPECT_EQ(a.csv, b.csv);
  EXPECT_EQ(a.json["digest"], b.json["digest"]);
  EXPECT_TRUE(a.csv.count("stationary.csv"));
}

TEST(Run, FailedAssertionGivesAssertionCode) {
  ExperimentConfig cfg = fixture("P2");
  cfg.run.schedule_J = 10;
  RunReport r = run(Command::Rpf, cfg);
  EXPECT_EQ(r.exit_code, exit_code::assertion);
}

TEST(Run, ConvergenceFailureGivesConvergenceCode) {
  ExperimentConfig cfg = fixture("STOCH2");
  cfg.run.tol.stationary = 1e-300;
  RunReport r = run(Command::Stationary, cfg);
  EXPECT_EQ(r.exit_code, exit_code::convergence) << r.json.dump();
}
