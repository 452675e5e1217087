#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <thread>

#include "qgp/scenario.hpp"

namespace {

int exit_code(qgp::ErrorCategory c) { return c == qgp::ErrorCategory::numerical ? 3 : 2; }

const char* category_name(qgp::ErrorCategory c) {
  switch (c) {
    case qgp::ErrorCategory::config: return "config";
    case qgp::ErrorCategory::numerical: return "numerical";
    case qgp::ErrorCategory::usage: return "usage";
  }
  return "unknown";
}

int report(qgp::ErrorCategory category, const std::string& message, int line = 0,
           const std::string& key = {}) {
  nlohmann::json err = {{"category", category_name(category)}, {"message", message}};
  if (line > 0) err["line"] = line;
  if (!key.empty()) err["key"] = key;
  std::cerr << nlohmann::json{{"error", err}}.dump() << "\n";
  return exit_code(category);
}

}  // namespace

int main(int argc, char** argv) {
  namespace sc = qgp::scenario;
  CLI::App app{"qgplab: quantum geometric potential laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = ".";
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::uint64_t> seed;
  app.add_option("--out-dir", out_dir, "Directory for CSV and summary files");
  app.add_option("--threads", threads, "Workers for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Override the config seed");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Execute a scenario config");
  run->add_option("config", config_path, "Config file")->required();
  auto* validate = app.add_subcommand("validate", "Parse and check a config without running it");
  validate->add_option("config", config_path, "Config file")->required();
  auto* presets = app.add_subcommand("presets", "List bundled presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(qgp::ErrorCategory::usage, e.what());
  }

  try {
    if (*presets) {
      for (const auto& p : sc::list_presets()) std::cout << p.name << "\t" << p.description << "\n";
      return 0;
    }
    const sc::ScenarioConfig cfg = sc::load_config(config_path);
    if (*validate) {
      std::cout << "ok: " << cfg.name << " (" << sc::to_string(cfg.kind) << ")\n";
      return 0;
    }
    sc::RunOptions opts;
    opts.threads = threads;
    opts.seed = seed;
    const sc::RunResult r = sc::run(cfg, out_dir, opts);
    for (const auto& [key, value] : r.summary.headline) std::cout << key << " = " << value << "\n";
    return 0;
  } catch (const sc::ConfigParseError& e) {
    return report(e.category(), e.what(), e.line(), e.key());
  } catch (const qgp::Error& e) {
    return report(e.category(), e.what());
  } catch (const std::exception& e) {
    return report(qgp::ErrorCategory::numerical, e.what());
  }
}
