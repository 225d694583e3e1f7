#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rtm/error.hpp"
#include "rtm/fixtures.hpp"
#include "rtm/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Random Markov shift thermodynamic formalism toolkit"};
  std::string subcommand, config_path, fixture_name, out_dir = "out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  app.add_option("subcommand", subcommand,
                 "check-bip | pressure | rpf | conformal | gibbs | matrix-pf | stationary | all | config")
      ->required();
  app.add_option("--config", config_path, "experiment config (JSON)");
  app.add_option("--fixture", fixture_name, "built-in fixture, overridden by --config entries");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized steps");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : rtm::exit_code::config;
  }

  try {
    auto cmd = rtm::parse_command(subcommand);
    if (!cmd && subcommand != "config")
      throw rtm::Error(rtm::ErrorKind::ConfigError, "unknown subcommand '" + subcommand + "'");
    if (config_path.empty() && fixture_name.empty())
      throw rtm::Error(rtm::ErrorKind::ConfigError, "need --config or --fixture");

    nlohmann::json doc = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw rtm::Error(rtm::ErrorKind::ConfigError, "cannot open config file " + config_path);
      doc = nlohmann::json::parse(in);
    }
    if (!fixture_name.empty()) doc["fixture"] = fixture_name;
    rtm::ExperimentConfig cfg = rtm::resolve_config(doc);
    if (seed) cfg.run.seed = *seed;

    if (!cmd) {
      std::cout << cfg.to_json().dump(2) << "\n";
      return 0;
    }
    rtm::RunReport rep = rtm::run(*cmd, cfg);
    rep.json["threads"] = threads;
    rtm::write_outputs(rep, cfg, out_dir);
    for (const auto& a : rep.assertions)
      std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << " value=" << a.value
                << " bound=" << a.bound << "\n";
    if (rep.json.contains("error")) std::cerr << rep.json["error"]["message"].get<std::string>() << "\n";
    std::cout << "exit " << rep.exit_code << "\n";
    return rep.exit_code;
  } catch (const rtm::Error& e) {
    std::cerr << e.what() << "\n";
    return rtm::exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return rtm::exit_code::config;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return rtm::exit_code::internal;
  }
}
