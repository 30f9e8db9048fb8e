#pragma once

// Configuration and output plumbing for the brint command line.

#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace brint::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IniEntry {
  std::string value;
  int line = 0;
};

/// `key = value` lines, `#` or `;` comments and optional `[section]` headers.
/// Keys outside any section, or in a section named after `section`, are kept.
struct IniFile {
  std::string path;
  std::map<std::string, IniEntry> entries;
};
IniFile parse_ini(std::istream& in, const std::string& path, const std::string& section);
IniFile load_ini(const std::string& path, const std::string& section);

struct ParamSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

/// Resolved parameters: command-line flag, then config file, then default.
class Params {
 public:
  Params(std::vector<ParamSpec> specs, const std::map<std::string, std::string>& flags, const IniFile* file);

  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;
  /// `key = value` lines in declaration order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

 private:
  struct Value {
    std::string text;
    std::string origin;
  };
  const Value& get(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

  std::vector<ParamSpec> specs_;
  std::map<std::string, Value> values_;
};

/// Round-trip formatting of reals; "NA" for missing values.
std::string fmt(double x);
std::string fmt(const std::optional<double>& x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add(std::vector<std::string> row);
  std::string text() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to a temporary file beside `path` and renames it into place.
void atomic_write(const std::string& path, const std::string& content);

/// `path` when given; otherwise $BRINT_OUTPUT_DIR/<name>.csv (or ./<name>.csv).
std::string output_path(const std::string& path, const std::string& name);

struct RunInfo {
  std::string subcommand;
  std::string version;
  unsigned long long seed = 0;
  int threads = 1;
  std::chrono::steady_clock::time_point start;
};

/// Commits the CSV and its `.meta` sidecar (metadata as key = value lines).
void commit(const std::string& csv_path, const CsvTable& table, const RunInfo& info, const Params& params,
            const std::vector<std::pair<std::string, std::string>>& extra);

}  // namespace brint::cli
