#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rtm/config.hpp"

namespace rtm {

enum class Command { CheckBip, Pressure, Rpf, Conformal, Gibbs, MatrixPf, Stationary, All };

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command cmd);

struct Assertion {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
};

struct RunReport {
  nlohmann::json json;
  std::vector<Assertion> assertions;
  std::map<std::string, std::string> csv;  // file name -> contents
  int exit_code = 0;
};

// Module errors are caught and recorded; the exit code follows the error class.
RunReport run(Command cmd, const ExperimentConfig& cfg);

// writes report.json, config.json and the CSV tables
void write_outputs(const RunReport& report, const ExperimentConfig& cfg, const std::string& dir);

}  // namespace rtm
