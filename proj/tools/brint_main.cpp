#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <map>

#include "brint/core.hpp"
#include "commands.hpp"

#ifndef BRINT_VERSION
#define BRINT_VERSION "unknown"
#endif

int main(int argc, char** argv) {
  using namespace brint::cli;
  CLI::App app{"Brownian interlacement experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(BRINT_VERSION));

  struct Slot {
    const Command* cmd;
    CLI::App* sub;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config, out;
    unsigned long long seed = 1;
    int threads = 0;
  };
  std::vector<Slot> slots;
  slots.reserve(commands().size());
  for (const auto& c : commands()) {
    slots.push_back({&c, nullptr, {}, {}, "", "", 1, 0});
    Slot& s = slots.back();
    s.sub = app.add_subcommand(c.name, c.description);
    s.sub->add_option("--config", s.config, "INI file with key = value lines");
    s.sub->add_option("--out", s.out, "CSV output path (default $BRINT_OUTPUT_DIR/<subcommand>.csv)");
    s.sub->add_option("--seed", s.seed, "master seed")->capture_default_str();
    s.sub->add_option("--threads", s.threads, "OpenMP threads (0: runtime default)");
    for (const auto& p : c.params) {
      s.options[p.key] = s.sub->add_option("--" + p.key, s.values[p.key], p.help + " [default: " + p.default_value + "]");
    }
  }
  CLI11_PARSE(app, argc, argv);

  for (auto& s : slots) {
    if (!s.sub->parsed()) continue;
    const auto start = std::chrono::steady_clock::now();
    try {
      std::map<std::string, std::string> flags;
      for (const auto& [k, opt] : s.options) {
        if (opt->count()) flags[k] = s.values[k];
      }
      std::optional<IniFile> file;
      if (!s.config.empty()) file = load_ini(s.config, s.cmd->name);
      const Params params(s.cmd->params, flags, file ? &*file : nullptr);
      if (s.threads < 0) throw ConfigError("--threads: must be nonnegative");
      if (s.threads > 0) brint::set_num_threads(s.threads);
      const auto exec = brint::num_threads() > 1 ? brint::Exec::parallel : brint::Exec::serial;
      const std::string path = output_path(s.out, s.cmd->name);
      CommandOutput out = s.cmd->run(params, brint::RngSpec{s.seed, 0, 0}, exec);
      RunInfo info{s.cmd->name, BRINT_VERSION, s.seed, brint::num_threads(), start};
      commit(path, out.table, info, params, out.meta);
      std::cout << path << '\n';
    } catch (const ConfigError& e) {
      std::cerr << "brint " << s.cmd->name << ": " << e.what() << '\n';
      return 2;
    } catch (const brint::DomainError& e) {
      std::cerr << "brint " << s.cmd->name << ": invalid parameters: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "brint " << s.cmd->name << ": " << e.what() << '\n';
      return 1;
    }
  }
  return 0;
}
