#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "brint/parallel.hpp"
#include "brint/rng.hpp"
#include "cli_support.hpp"

namespace brint::cli {

struct CommandOutput {
  CsvTable table;
  std::vector<std::pair<std::string, std::string>> meta;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<ParamSpec> params;
  std::function<CommandOutput(const Params&, const RngSpec&, Exec)> run;
};

const std::vector<Command>& commands();

}  // namespace brint::cli
