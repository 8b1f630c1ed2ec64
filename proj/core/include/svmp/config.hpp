#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "svmp/core.hpp"
#include "svmp/kermap.hpp"
#include "svmp/pipeline.hpp"

namespace svmp::config {

/// Settings shared by the command-line tool. Files hold "key = value" lines;
/// '#' starts a comment. Keys are the field names of PoolingConfig,
/// KernelMapConfig (kernel, order, period) and SyntheticSpec, plus
/// `algorithm`. `seed` sets both the pooling and the synthetic seed.
struct CliConfig {
  PoolingConfig pooling;
  Algorithm algorithm = Algorithm::kParamTuning;
  std::optional<kermap::KernelMapConfig> kernel;  // unset means no feature map
  pipeline::SyntheticSpec synthetic;
};

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Splits text into key/value pairs; `origin` prefixes error messages.
std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& origin);

/// Applies one setting. Throws kInvalidArgument for unknown keys and kParse
/// for malformed values; `where` is prepended to the message.
void apply(CliConfig& config, const std::string& key, const std::string& value, const std::string& where = {});

void apply_text(CliConfig& config, const std::string& text, const std::string& origin);
CliConfig load(const std::filesystem::path& path);

/// Every recognized key, in a stable order.
const std::vector<std::string>& known_keys();

}  // namespace svmp::config
