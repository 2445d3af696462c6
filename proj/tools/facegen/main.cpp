#include "commands.hpp"
#include "run_config.hpp"

#include "facegen/error.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

namespace {

constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace facegen::cli;
  CLI::App app{"Data-driven synthesis of faces with personality impressions"};
  app.require_subcommand(1);

  struct Parsed {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<Parsed> parsed(commands().size());
  for (std::size_t i = 0; i < commands().size(); ++i) {
    const Command& cmd = commands()[i];
    Parsed& p = parsed[i];
    p.sub = app.add_subcommand(cmd.name, cmd.summary);
    p.sub->add_option("--config", p.config_path, "key = value run configuration file");
    for (const KeySpec& spec : key_specs()) {
      if (std::find(spec.commands.begin(), spec.commands.end(), cmd.name) == spec.commands.end()) continue;
      p.options[spec.name] = p.sub->add_option(flag_name(spec.name), p.values[spec.name],
                                               spec.help + " [" + spec.get(RunConfig{}) + "]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const Parsed& p = parsed[i];
    if (!p.sub->parsed()) continue;
    try {
      KeyValues flags;
      for (const auto& [key, option] : p.options) {
        if (option->count() > 0) flags[key] = p.values.at(key);
      }
      const KeyValues file = p.config_path.empty() ? KeyValues{} : read_config_file(p.config_path);
      const RunConfig config = resolve_config(file, flags);
      run_command(commands()[i].name, config, std::cout);
      return 0;
    } catch (const ConfigError& e) {
      std::cerr << "facegen " << commands()[i].name << ": " << e.what() << "\n";
      return kValidation;
    } catch (const facegen::Error& e) {
      std::cerr << "facegen " << commands()[i].name << ": " << e.what() << "\n";
      const bool invalid = e.code() == facegen::ErrorCode::kInvalidTask || e.code() == facegen::ErrorCode::kInvalidSpec;
      return invalid ? kValidation : kRuntime;
    } catch (const std::exception& e) {
      std::cerr << "facegen " << commands()[i].name << ": " << e.what() << "\n";
      return kRuntime;
    }
  }
  return kUsage;
}
