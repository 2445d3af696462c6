#include "run_config.hpp"

#include "facegen/error.hpp"
#include "facegen/io/text.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace facegen::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail_key(const std::string& key, const std::string& message) { throw ConfigError(key, message); }

template <class T>
T parse_number(const std::string& key, const std::string& text, T lo, T hi) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) fail_key(key, "expected a number, got '" + text + "'");
  if (!(value >= lo && value <= hi)) {
    std::ostringstream range;
    range << "must lie in [" << lo << ", " << hi << "], got " << text;
    fail_key(key, range.str());
  }
  return value;
}

template <class T>
KeySpec integer_key(std::string name, std::string help, std::vector<std::string> commands, T RunConfig::*field, T lo,
                    T hi) {
  return {name, std::move(help), std::move(commands),
          [name, field, lo, hi](RunConfig& c, const std::string& v) { c.*field = parse_number<T>(name, v, lo, hi); },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeySpec real_key(std::string name, std::string help, std::vector<std::string> commands, double RunConfig::*field,
                 double lo, double hi) {
  return {name, std::move(help), std::move(commands),
          [name, field, lo, hi](RunConfig& c, const std::string& v) { c.*field = parse_number<double>(name, v, lo, hi); },
          [field](const RunConfig& c) { return io::format_double(c.*field); }};
}

KeySpec optimizer_key(std::string name, std::string help, double OptimizerConfig::*field, double lo, double hi) {
  return {name, std::move(help), {"synthesize", "batch"},
          [name, field, lo, hi](RunConfig& c, const std::string& v) {
            c.optimizer.*field = parse_number<double>(name, v, lo, hi);
          },
          [field](const RunConfig& c) { return io::format_double(c.optimizer.*field); }};
}

KeySpec optimizer_key(std::string name, std::string help, int OptimizerConfig::*field) {
  return {name, std::move(help), {"synthesize", "batch"},
          [name, field](RunConfig& c, const std::string& v) {
            c.optimizer.*field = parse_number<int>(name, v, 1, std::numeric_limits<int>::max());
          },
          [field](const RunConfig& c) { return std::to_string(c.optimizer.*field); }};
}

KeySpec text_key(std::string name, std::string help, std::vector<std::string> commands, std::string RunConfig::*field) {
  return {name, std::move(help), std::move(commands),
          [field](RunConfig& c, const std::string& v) { c.*field = v; },
          [field](const RunConfig& c) { return c.*field; }};
}

std::vector<ImpressionType> parse_impressions(const std::string& text) {
  std::vector<ImpressionType> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string name = trim(item);
    const auto t = parse_impression(name);
    if (!t) fail_key("impression", "unknown impression type '" + name + "'");
    out.push_back(*t);
  }
  if (out.empty()) fail_key("impression", "needs at least one impression type");
  return out;
}

const std::vector<std::string> kChains = {"synthesize", "batch"};

std::vector<std::string> all_commands() {
  return {"gen-data", "fit-pca", "learn-attrs", "train-scorer", "train-sim", "fit-priors", "synthesize", "batch", "render"};
}

std::vector<KeySpec> build_specs() {
  constexpr auto kMaxInt = std::numeric_limits<int>::max();
  constexpr auto kMaxSeed = std::numeric_limits<std::uint64_t>::max();
  std::vector<KeySpec> specs;
  specs.push_back(text_key("model", "model container path", all_commands(), &RunConfig::model));
  specs.push_back(text_key("out", "output directory", all_commands(), &RunConfig::out));
  specs.push_back(text_key("input", "input OBJ mesh (default: a family identity)", {"synthesize", "batch", "render"},
                           &RunConfig::input));
  specs.push_back(integer_key("identity", "input identity index; -1 picks automatically", kChains, &RunConfig::identity,
                              -1, kMaxInt));
  specs.push_back({"impression", "target impression type(s), comma separated", kChains,
                   [](RunConfig& c, const std::string& v) { c.impressions = parse_impressions(v); },
                   [](const RunConfig& c) {
                     std::string s;
                     for (ImpressionType t : c.impressions) s += (s.empty() ? "" : ",") + std::string(impression_name(t));
                     return s;
                   }});
  specs.push_back(integer_key("identities", "identities in the generated family", {"gen-data"}, &RunConfig::identities, 2,
                              100000));
  specs.push_back(integer_key("components", "PCA components per region", {"fit-pca"}, &RunConfig::components, 1, 10000));
  specs.push_back(integer_key("examples", "exemplar faces per learned attribute", {"learn-attrs"}, &RunConfig::examples,
                              1, 100000));
  specs.push_back(integer_key("render_size", "render size seen by the scorer and the embedding",
                              {"train-scorer", "train-sim", "synthesize", "batch"}, &RunConfig::render_size, 8, 2048));
  specs.push_back(integer_key("export_size", "width and height of exported PPM images",
                              {"gen-data", "synthesize", "batch", "render"}, &RunConfig::export_size, 8, 4096));
  specs.push_back(integer_key("data_seed", "seed for data generation and training",
                              {"gen-data", "train-scorer", "train-sim", "fit-priors"}, &RunConfig::data_seed,
                              std::uint64_t{0}, kMaxSeed));
  specs.push_back(integer_key("scorer_steps", "scorer gradient descent steps", {"train-scorer"}, &RunConfig::scorer_steps,
                              0, 1000000));
  specs.push_back(integer_key("embedding_steps", "embedding gradient descent steps", {"train-sim"},
                              &RunConfig::embedding_steps, 0, 1000000));
  specs.push_back(integer_key("pairs", "similarity training pairs", {"train-sim"}, &RunConfig::pairs, 2, 1000000));
  specs.push_back(integer_key("artists", "simulated artists per base face", {"fit-priors"}, &RunConfig::artists, 1, 10000));
  specs.push_back(integer_key("base_faces", "base faces edited by the artists", {"fit-priors"}, &RunConfig::base_faces, 1,
                              10000));
  specs.push_back(real_key("edit_noise", "artist edit noise", {"fit-priors"}, &RunConfig::edit_noise, 0.0, 10.0));
  specs.push_back(optimizer_key("lambda", "similarity weight", &OptimizerConfig::lambda, 0.0, 1e6));
  specs.push_back(optimizer_key("alpha", "Region-Move probability", &OptimizerConfig::alpha, 0.0, 1.0));
  specs.push_back(optimizer_key("t0", "initial temperature", &OptimizerConfig::t0, 0.0, 1e6));
  specs.push_back(optimizer_key("t_decrement", "temperature decrement", &OptimizerConfig::t_decrement, 0.0, 1e6));
  specs.push_back(optimizer_key("decrement_period", "iterations between temperature decrements",
                                &OptimizerConfig::decrement_period));
  specs.push_back(optimizer_key("termination_window", "iterations the termination rule looks back",
                                &OptimizerConfig::termination_window));
  specs.push_back(optimizer_key("termination_threshold", "relative best-cost change that ends a chain",
                                &OptimizerConfig::termination_threshold, 0.0, 1.0));
  specs.push_back(optimizer_key("max_iterations", "iteration cap per chain", &OptimizerConfig::max_iterations));
  specs.push_back({"beta", "attribute strengths are drawn from [-beta, beta]", kChains,
                   [](RunConfig& c, const std::string& v) {
                     const double b = parse_number<double>("beta", v, 0.0, 1e6);
                     if (!(b > 0.0)) fail_key("beta", "must be positive");
                     c.optimizer.beta_min = -b;
                     c.optimizer.beta_max = b;
                   },
                   [](const RunConfig& c) { return io::format_double(c.optimizer.beta_max); }});
  specs.push_back({"seed", "chain seed", kChains,
                   [](RunConfig& c, const std::string& v) {
                     c.optimizer.seed = parse_number<std::uint64_t>("seed", v, 0, kMaxSeed);
                   },
                   [](const RunConfig& c) { return std::to_string(c.optimizer.seed); }});
  specs.push_back({"baseline", "use the baseline sampler (true/false)", kChains,
                   [](RunConfig& c, const std::string& v) {
                     if (v == "true" || v == "1") {
                       c.baseline = true;
                     } else if (v == "false" || v == "0") {
                       c.baseline = false;
                     } else {
                       fail_key("baseline", "expected true or false, got '" + v + "'");
                     }
                   },
                   [](const RunConfig& c) { return std::string(c.baseline ? "true" : "false"); }});
  specs.push_back(integer_key("count", "chains in a batch", {"batch"}, &RunConfig::count, 1, 1000000));
  specs.push_back(integer_key("threads", "worker threads for batch; 0 uses all cores", {"batch"}, &RunConfig::threads, 0,
                              1024));
  return specs;
}

}  // namespace

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = build_specs();
  return specs;
}

std::string flag_name(const std::string& key) {
  std::string flag = "--" + key;
  for (char& ch : flag) {
    if (ch == '_') ch = '-';
  }
  return flag;
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues values;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail_key("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) fail_key("line " + std::to_string(line_no), "missing key");
    values[key] = value;
  }
  return values;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_key("config", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

RunConfig resolve_config(const KeyValues& file, const KeyValues& flags) {
  RunConfig config;
  const auto& specs = key_specs();
  auto apply = [&](const KeyValues& values) {
    for (const auto& [key, value] : values) {
      const auto it = std::find_if(specs.begin(), specs.end(), [&](const KeySpec& s) { return s.name == key; });
      if (it == specs.end()) fail_key(key, "unknown key");
      it->set(config, value);
    }
  };
  apply(file);
  apply(flags);
  if (config.model.empty()) fail_key("model", "must not be empty");
  if (config.out.empty()) fail_key("out", "must not be empty");
  try {
    config.optimizer.validate();
  } catch (const Error& e) {
    fail_key("optimizer", e.what());
  }
  return config;
}

std::string config_text(const RunConfig& config) {
  std::string text;
  for (const auto& spec : key_specs()) text += spec.name + " = " + spec.get(config) + "\n";
  return text;
}

}  // namespace facegen::cli
