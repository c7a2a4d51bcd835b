#include "tsal_cli/config.hpp"

#include "tsal/errors.hpp"
#include "tsal/kernel_marginals.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace tsal::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed access to one section; remembers which keys were consumed.
class Section {
 public:
  Section(const IniDocument& doc, const std::string& name) : doc_(doc), name_(name) {
    const auto it = doc.sections.find(name);
    if (it != doc.sections.end()) entries_ = &it->second;
  }

  [[nodiscard]] std::optional<IniDocument::Entry> raw(const std::string& key) {
    known_.insert(key);
    if (!entries_) return std::nullopt;
    const auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    return it->second;
  }

  void real(const std::string& key, double& out) {
    if (auto e = raw(key)) out = parse_real(*e, key);
  }
  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (auto e = raw(key)) out = static_cast<Int>(parse_int(*e, key));
  }
  void boolean(const std::string& key, bool& out) {
    if (auto e = raw(key)) {
      if (e->value == "true" || e->value == "1") out = true;
      else if (e->value == "false" || e->value == "0") out = false;
      else fail(*e, "key '" + key + "' expects true or false");
    }
  }
  void text(const std::string& key, std::string& out) {
    if (auto e = raw(key)) out = e->value;
  }

  double parse_real(const IniDocument::Entry& e, const std::string& key) const {
    double v = 0.0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(e, "key '" + key + "' expects a number, got '" + e.value + "'");
    return v;
  }
  long long parse_int(const IniDocument::Entry& e, const std::string& key) const {
    long long v = 0;
    const char* end = e.value.data() + e.value.size();
    auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(e, "key '" + key + "' expects an integer, got '" + e.value + "'");
    return v;
  }

  [[noreturn]] void fail(const IniDocument::Entry& e, const std::string& what) const {
    throw ConfigError(doc_.source, e.line, what);
  }

  void reject_unknown() const {
    if (!entries_) return;
    for (const auto& [key, entry] : *entries_) {
      if (!known_.count(key)) fail(entry, "unknown key '" + key + "' in section [" + name_ + "]");
    }
  }

 private:
  const IniDocument& doc_;
  std::string name_;
  const std::map<std::string, IniDocument::Entry>* entries_ = nullptr;
  std::set<std::string> known_;
};

void reject_unknown_sections(const IniDocument& doc, const std::set<std::string>& allowed) {
  for (const auto& [name, entries] : doc.sections) {
    if (!allowed.count(name)) {
      const int line = entries.empty() ? 0 : entries.begin()->second.line;
      throw ConfigError(doc.source, line, "unknown section [" + name + "]");
    }
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + what : source + ": " + what),
      line_(line) {}

IniDocument parse_ini(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source = source;
  std::stringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, number, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(source, number, "empty section name");
      doc.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, number, "expected 'key = value'");
    if (section.empty()) throw ConfigError(source, number, "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source, number, "empty key");
    auto& entries = doc.sections[section];
    if (entries.count(key)) throw ConfigError(source, number, "duplicate key '" + key + "'");
    entries[key] = {trim(line.substr(eq + 1)), number};
  }
  return doc;
}

IniDocument read_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ini(buf.str(), path);
}

SystemUnderTest ExperimentConfig::make_system() const {
  if (system == "seasonal") return SystemUnderTest::seasonal(strength, noise_std);
  if (system == "drift") return SystemUnderTest::drift(noise_std);
  return SystemUnderTest::nx_surrogate({}, noise_std);
}

SalConfig ExperimentConfig::run_config(AcquisitionKind kind, std::uint64_t seed) const {
  SalConfig cfg = sal;
  cfg.acquisition = kind;
  cfg.seed = seed;
  return cfg;
}

ExperimentConfig parse_experiment(const IniDocument& doc) {
  reject_unknown_sections(doc, {"testbed", "sal", "evaluation", "output"});
  ExperimentConfig cfg;

  Section testbed(doc, "testbed");
  if (auto e = testbed.raw("system")) {
    if (e->value != "seasonal" && e->value != "drift" && e->value != "nx_surrogate")
      testbed.fail(*e, "unknown system '" + e->value + "' (expected seasonal, drift or nx_surrogate)");
    cfg.system = e->value;
  }
  testbed.real("strength", cfg.strength);
  testbed.real("noise_std", cfg.noise_std);
  testbed.reject_unknown();
  if (!(cfg.noise_std >= 0.0)) throw ConfigError(doc.source, 0, "noise_std must be non-negative");

  const SystemUnderTest sys = cfg.make_system();
  SalConfig defaults = default_config(sys, AcquisitionKind::Timspe, 0);

  Section sal(doc, "sal");
  if (auto e = sal.raw("acquisitions")) {
    cfg.acquisitions.clear();
    for (const auto& name : split_list(e->value)) {
      try {
        cfg.acquisitions.push_back(parse_acquisition(name));
      } catch (const InvalidArgument& ex) {
        sal.fail(*e, ex.what());
      }
    }
    if (cfg.acquisitions.empty()) sal.fail(*e, "acquisition list is empty");
  }
  const auto seeds = sal.raw("seeds");
  if (!seeds) throw ConfigError(doc.source, 0, "missing required key 'seeds' in section [sal]");
  for (const auto& item : split_list(seeds->value)) {
    IniDocument::Entry one{item, seeds->line};
    const long long v = sal.parse_int(one, "seeds");
    if (v < 0) sal.fail(*seeds, "seeds must be non-negative");
    cfg.seeds.push_back(static_cast<std::uint64_t>(v));
  }
  if (cfg.seeds.empty()) sal.fail(*seeds, "seed list is empty");
  sal.integer("budget", defaults.budget);
  sal.integer("n_initial", defaults.n_initial);
  sal.integer("retrain_steps", defaults.retrain_steps);
  sal.integer("initial_train_steps", defaults.initial_train_steps);
  sal.real("learning_rate", defaults.learning_rate);
  sal.real("time_window", defaults.time_window);
  sal.boolean("discrete_time_window", defaults.discrete_time_window);
  sal.real("alpha", defaults.alpha);
  sal.integer("starts", defaults.select.starts);
  sal.integer("max_restarts", defaults.select.max_restarts);
  sal.integer("max_iterations", defaults.select.max_iterations);
  sal.real("tolerance", defaults.select.tolerance);
  sal.reject_unknown();

  Section eval(doc, "evaluation");
  eval.integer("rmse_resolution", defaults.rmse_resolution);
  eval.integer("nx_test_length", defaults.nx_test_length);
  eval.integer("rmse_every", defaults.rmse_every);
  eval.integer("checkpoints", cfg.checkpoints);
  eval.reject_unknown();
  if (cfg.checkpoints < 1) throw ConfigError(doc.source, 0, "checkpoints must be >= 1");

  Section out(doc, "output");
  out.text("directory", cfg.output_dir);
  out.reject_unknown();

  cfg.sal = defaults;
  for (const auto kind : cfg.acquisitions) {
    try {
      cfg.run_config(kind, 0).validate(sys);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(doc.source, 0, ex.what());
    }
  }
  return cfg;
}

ValidationConfig parse_validation(const IniDocument& doc) {
  reject_unknown_sections(doc, {"validation"});
  ValidationConfig cfg;
  Section v(doc, "validation");
  v.text("kernel", cfg.kernel);
  v.text("measure", cfg.measure);
  v.integer("samples", cfg.samples);
  v.integer("seed", cfg.seed);
  v.integer("max_dim", cfg.max_dim);
  v.reject_unknown();
  require_marginalizable(cfg.kernel, cfg.measure);
  if (cfg.samples < 1) throw ConfigError(doc.source, 0, "samples must be >= 1");
  if (cfg.max_dim < 1 || cfg.max_dim > 4) throw ConfigError(doc.source, 0, "max_dim must lie in [1, 4]");
  return cfg;
}

}  // namespace tsal::cli
