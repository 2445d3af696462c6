#pragma once

#include "facegen/impression.hpp"
#include "facegen/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace facegen::cli {

// Validation failure of one configuration key (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("invalid config: " + key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  std::string model = "facegen.fgm";
  std::string out = "out";
  std::string input;    // OBJ mesh; empty means a family identity
  int identity = -1;    // -1: identity 0 for synthesize, seeded pick per chain for batch
  std::vector<ImpressionType> impressions = {ImpressionType::kFriendly};

  int identities = 200;
  int components = 10;
  int examples = 5;
  int render_size = 64;  // what the learned models see
  int export_size = 256;  // exported PPM images
  std::uint64_t data_seed = 1;

  int scorer_steps = 300;
  int embedding_steps = 300;
  int pairs = 400;
  int artists = 10;
  int base_faces = 5;
  double edit_noise = 0.1;

  OptimizerConfig optimizer;  // its seed is the chain seed
  bool baseline = false;
  int count = 5;
  int threads = 0;  // 0: hardware concurrency
};

using KeyValues = std::map<std::string, std::string>;

struct KeySpec {
  std::string name;
  std::string help;
  std::vector<std::string> commands;  // subcommands exposing the key as a flag
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeySpec>& key_specs();

// "key = value" lines; '#' starts a comment. Throws ConfigError.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::string& path);

// defaults < file < flags. Throws ConfigError naming the offending key.
RunConfig resolve_config(const KeyValues& file, const KeyValues& flags);

// Every key, one per line, in table order.
std::string config_text(const RunConfig& config);

std::string flag_name(const std::string& key);

}  // namespace facegen::cli
