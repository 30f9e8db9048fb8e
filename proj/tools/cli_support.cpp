#include "cli_support.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

namespace brint::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::optional<double> to_real(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> to_integer(const std::string& s) {
  const std::string t = trim(s);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) return std::nullopt;
  return v;
}

}  // namespace

IniFile parse_ini(std::istream& in, const std::string& path, const std::string& section) {
  IniFile f;
  f.path = path;
  std::string line;
  int no = 0;
  bool active = true;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(path + ":" + std::to_string(no) + ": unterminated section header");
      active = trim(body.substr(1, body.size() - 2)) == section;
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(no) + ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError(path + ":" + std::to_string(no) + ": empty key");
    if (!active) continue;
    if (f.entries.count(key))
      throw ConfigError(path + ":" + std::to_string(no) + ": duplicate key '" + key + "' (first on line " +
                        std::to_string(f.entries[key].line) + ")");
    f.entries[key] = {trim(body.substr(eq + 1)), no};
  }
  return f;
}

IniFile load_ini(const std::string& path, const std::string& section) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_ini(in, path, section);
}

Params::Params(std::vector<ParamSpec> specs, const std::map<std::string, std::string>& flags, const IniFile* file)
    : specs_(std::move(specs)) {
  for (const auto& s : specs_) values_[s.key] = {s.default_value, "default for '" + s.key + "'"};
  if (file) {
    for (const auto& [k, e] : file->entries) {
      if (!values_.count(k)) throw ConfigError(file->path + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
      values_[k] = {e.value, file->path + ":" + std::to_string(e.line) + ": '" + k + "'"};
    }
  }
  for (const auto& [k, v] : flags) {
    if (!values_.count(k)) throw ConfigError("--" + k + ": unknown option");
    values_[k] = {v, "--" + k};
  }
}

const Params::Value& Params::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::logic_error("parameter '" + key + "' is not declared");
  return it->second;
}

void Params::fail(const std::string& key, const std::string& why) const {
  throw ConfigError(get(key).origin + ": " + why + " (got '" + get(key).text + "')");
}

const std::string& Params::str(const std::string& key) const { return get(key).text; }

double Params::real(const std::string& key) const {
  const auto v = to_real(get(key).text);
  if (!v) fail(key, "expected a real number");
  return *v;
}

long Params::integer(const std::string& key) const {
  const auto v = to_integer(get(key).text);
  if (!v) fail(key, "expected an integer");
  return *v;
}

std::size_t Params::count(const std::string& key) const {
  const long v = integer(key);
  if (v < 0) fail(key, "expected a nonnegative integer");
  return std::size_t(v);
}

bool Params::flag(const std::string& key) const {
  const std::string& t = get(key).text;
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(key, "expected true or false");
}

std::vector<double> Params::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key).text)) {
    const auto v = to_real(item);
    if (!v) fail(key, "expected a comma-separated list of reals");
    out.push_back(*v);
  }
  return out;
}

std::vector<long> Params::integers(const std::string& key) const {
  std::vector<long> out;
  for (const auto& item : split_list(get(key).text)) {
    const auto v = to_integer(item);
    if (!v) fail(key, "expected a comma-separated list of integers");
    out.push_back(*v);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> Params::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : specs_) out.emplace_back(s.key, get(s.key).text);
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "NA";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : "NA"; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw std::logic_error("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::text() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError(path + ": cannot open output for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      throw ConfigError(path + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw ConfigError(path + ": cannot move output into place: " + ec.message());
  }
}

std::string output_path(const std::string& path, const std::string& name) {
  if (!path.empty()) return path;
  const char* dir = std::getenv("BRINT_OUTPUT_DIR");
  const std::filesystem::path base = dir && *dir ? dir : ".";
  return (base / (name + ".csv")).string();
}

void commit(const std::string& csv_path, const CsvTable& table, const RunInfo& info, const Params& params,
            const std::vector<std::pair<std::string, std::string>>& extra) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - info.start).count();
  std::ostringstream meta;
  meta << "subcommand = " << info.subcommand << '\n'
       << "version = " << info.version << '\n'
       << "master_seed = " << info.seed << '\n'
       << "threads = " << info.threads << '\n'
       << "rows = " << table.rows() << '\n'
       << "wall_time_s = " << fmt(wall) << '\n';
  for (const auto& [k, v] : params.resolved()) meta << "param." << k << " = " << v << '\n';
  for (const auto& [k, v] : extra) meta << k << " = " << v << '\n';
  // The sidecar goes first so that a visible CSV always has its metadata.
  atomic_write(csv_path + ".meta", meta.str());
  atomic_write(csv_path, table.text());
}

}  // namespace brint::cli
