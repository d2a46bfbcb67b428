#pragma once

// Flat `key = value` configuration files for the ablation runner.
//
//   # comment
//   n = 400
//   seeds = 1,2,3
//
// Unknown keys are an InvalidConfig error naming the key.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "softsrocc/train.hpp"

namespace softsrocc {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues parse_key_values(const std::filesystem::path& path);

struct AblationConfig {
  SyntheticSpec data{};
  TrainConfig train{};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t threads = 1;

  void validate() const;
};

/// Defaults used by the ablation runner and the acceptance suite.
AblationConfig default_ablation_config();

/// Overwrites the fields named in `kv`. Later calls win, so flag overrides
/// are applied after the file.
void apply_key_values(AblationConfig& cfg, const KeyValues& kv);

KeyValues to_key_values(const AblationConfig& cfg);

}  // namespace softsrocc
