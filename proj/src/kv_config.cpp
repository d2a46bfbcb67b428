#include "softsrocc/kv_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "softsrocc/errors.hpp"
#include "softsrocc/score_file.hpp"

namespace softsrocc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorCode::InvalidConfig, key + ": invalid value '" + value + "'");
}

double as_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

template <typename Int>
Int as_int(const std::string& key, const std::string& v) {
  Int out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

bool as_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v);
}

std::vector<std::uint64_t> as_seed_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> seeds;
  for (const auto& field : split_csv_line(v)) {
    seeds.push_back(as_int<std::uint64_t>(key, trim(field)));
  }
  if (seeds.empty()) bad_value(key, v);
  return seeds;
}

using Setter = std::function<void(AblationConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n", [](auto& c, auto& k, auto& v) { c.data.n = as_int<std::size_t>(k, v); }},
      {"dim", [](auto& c, auto& k, auto& v) { c.data.dim = as_int<std::size_t>(k, v); }},
      {"noise_sigma", [](auto& c, auto& k, auto& v) { c.data.noise_sigma = as_double(k, v); }},
      {"heteroscedastic", [](auto& c, auto& k, auto& v) { c.data.heteroscedastic = as_bool(k, v); }},
      {"lambda_mono", [](auto& c, auto& k, auto& v) { c.train.lambda_mono = as_double(k, v); }},
      {"steepness", [](auto& c, auto& k, auto& v) { c.train.soft.steepness = as_double(k, v); }},
      {"eps", [](auto& c, auto& k, auto& v) { c.train.soft.eps = as_double(k, v); }},
      {"batch_size", [](auto& c, auto& k, auto& v) { c.train.batch_size = as_int<std::size_t>(k, v); }},
      {"epochs", [](auto& c, auto& k, auto& v) { c.train.epochs = as_int<std::size_t>(k, v); }},
      {"learning_rate", [](auto& c, auto& k, auto& v) { c.train.learning_rate = as_double(k, v); }},
      {"retention_epochs",
       [](auto& c, auto& k, auto& v) { c.train.retention_epochs = as_int<std::int64_t>(k, v); }},
      {"hidden", [](auto& c, auto& k, auto& v) { c.train.hidden = as_int<std::size_t>(k, v); }},
      {"folds", [](auto& c, auto& k, auto& v) { c.train.folds = as_int<std::size_t>(k, v); }},
      {"fold_index", [](auto& c, auto& k, auto& v) { c.train.fold_index = as_int<std::size_t>(k, v); }},
      {"seeds", [](auto& c, auto& k, auto& v) { c.seeds = as_seed_list(k, v); }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = as_int<std::size_t>(k, v); }},
  };
  return table;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidConfig,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues parse_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path.string() + "'");
  return parse_key_values(in);
}

void AblationConfig::validate() const {
  data.validate();
  train.validate();
  if (seeds.empty()) throw Error(ErrorCode::InvalidConfig, "seeds: at least one seed required");
  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads: must be >= 1");
}

AblationConfig default_ablation_config() {
  AblationConfig cfg;
  cfg.data.n = 400;
  cfg.data.dim = 8;
  cfg.data.noise_sigma = 0.3;
  cfg.data.heteroscedastic = true;
  cfg.train.lambda_mono = 1.0;
  cfg.train.soft.steepness = 10.0;
  cfg.train.batch_size = 16;
  cfg.train.epochs = 30;
  cfg.train.learning_rate = 0.05;
  cfg.train.retention_epochs = 1;
  cfg.train.hidden = 16;
  cfg.train.folds = 5;
  cfg.train.fold_index = 0;
  return cfg;
}

void apply_key_values(AblationConfig& cfg, const KeyValues& kv) {
  const auto& table = setters();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw Error(ErrorCode::InvalidConfig, key + ": unknown key");
    it->second(cfg, key, value);
  }
}

KeyValues to_key_values(const AblationConfig& cfg) {
  std::string seeds;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (i) seeds += ',';
    seeds += std::to_string(cfg.seeds[i]);
  }
  return {
      {"n", std::to_string(cfg.data.n)},
      {"dim", std::to_string(cfg.data.dim)},
      {"noise_sigma", format_double(cfg.data.noise_sigma)},
      {"heteroscedastic", cfg.data.heteroscedastic ? "true" : "false"},
      {"lambda_mono", format_double(cfg.train.lambda_mono)},
      {"steepness", format_double(cfg.train.soft.steepness)},
      {"eps", format_double(cfg.train.soft.eps)},
      {"batch_size", std::to_string(cfg.train.batch_size)},
      {"epochs", std::to_string(cfg.train.epochs)},
      {"learning_rate", format_double(cfg.train.learning_rate)},
      {"retention_epochs", std::to_string(cfg.train.retention_epochs)},
      {"hidden", std::to_string(cfg.train.hidden)},
      {"folds", std::to_string(cfg.train.folds)},
      {"fold_index", std::to_string(cfg.train.fold_index)},
      {"seeds", seeds},
      {"threads", std::to_string(cfg.threads)},
  };
}

}  // namespace softsrocc
