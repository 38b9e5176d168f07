// emtk: featurize, train, predict and evaluate empathy/distress models.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <map>
#include <optional>

#include "emtk/config.hpp"
#include "emtk/error.hpp"
#include "emtk/pipeline.hpp"

namespace {

int exit_code(emtk::ErrorKind kind) {
  switch (kind) {
    case emtk::ErrorKind::Config: return 2;
    case emtk::ErrorKind::Data: return 3;
    case emtk::ErrorKind::Numeric: return 4;
  }
  return 1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw emtk::ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-input, multi-task empathy and distress prediction"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
  app.add_flag("--print-config", print_config, "Print the effective config (stdout alone, stderr with a subcommand)");

  // Every config key is also a flag of the same dotted name.
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& [key, def] : emtk::config_keys()) {
    auto& slot = overrides[key];
    app.add_option_function<std::string>("--" + key, [&slot](const std::string& v) { slot = v; },
                                         "default: " + def)
        ->group("Config overrides");
  }

  auto* featurize = app.add_subcommand("featurize", "Clean essays and write per-split feature files");
  auto* train = app.add_subcommand("train", "Train a model on featurized data");
  auto* predict = app.add_subcommand("predict", "Write predictions for one split");
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (app.get_subcommands().empty() && !print_config) {
    std::cerr << "A subcommand is required\nRun with --help for more information.\n";
    return 2;
  }

  try {
    std::vector<std::pair<std::string, std::string>> ov;
    for (const auto& [k, v] : overrides) {
      if (v) ov.emplace_back(k, *v);
    }
    const std::string text = config_path.empty() ? std::string() : slurp(config_path);
    const emtk::RunConfig cfg = emtk::parse_run_config(text, ov);
    if (print_config) (app.get_subcommands().empty() ? std::cout : std::cerr) << emtk::dump_run_config(cfg);

    if (*featurize) emtk::cmd_featurize(cfg, std::cout);
    if (*train) emtk::cmd_train(cfg, std::cout);
    if (*predict) emtk::cmd_predict(cfg, std::cout);
    if (*evaluate) emtk::cmd_evaluate(cfg, std::cout);
  } catch (const emtk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
