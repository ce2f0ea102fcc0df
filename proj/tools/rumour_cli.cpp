// Command-line front end: one subcommand per experiment kind.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rumour/experiments.hpp"
#include "rumour/parallel.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> workers;
  std::optional<double> level;
};

int execute(const std::string& kind, const Flags& flags) {
  std::ifstream in(flags.config);
  if (!in) {
    std::cerr << "cannot read config " << flags.config << '\n';
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }
  if (!doc.is_object()) {
    std::cerr << "config error: top level must be an object\n";
    return 2;
  }
  if (!doc.contains("experiment")) doc["experiment"] = kind;
  if (doc["experiment"] != kind) {
    std::cerr << "config error: file describes a '" << doc["experiment"].dump()
              << "' experiment, not '" << kind << "'\n";
    return 2;
  }
  if (flags.seed) doc["seed"] = *flags.seed;
  if (flags.out) doc["out"] = *flags.out;
  if (flags.level) doc["level"] = *flags.level;

  const auto parsed = rumour::parse_config(doc.dump());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << e << '\n';
    return 2;
  }
  const unsigned workers = flags.workers ? *flags.workers : rumour::default_workers();
  try {
    const auto res = rumour::run_experiment(*parsed.config, workers);
    std::cout << res.dir.string() << " [" << res.report.value("status", "?") << "]\n";
    for (const auto& f : res.files) std::cout << "  " << f << '\n';
    if (res.exit_code != 0) std::cerr << res.report.value("error", "") << '\n';
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and exact tools for the one-dimensional rumour process"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rumour::library_version());

  Flags flags;
  std::string chosen;
  const char* kinds[] = {"simulate", "survival", "speed", "clt", "react", "criterion", "oracle", "probe"};
  for (const char* k : kinds) {
    auto* sub = app.add_subcommand(k, std::string("run a ") + k + " experiment");
    sub->add_option("--config", flags.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
    sub->add_option("--out", flags.out, "output directory (overrides the config)");
    sub->add_option("--workers", flags.workers, "worker threads; default RUMOUR_WORKERS or all cores")
        ->check(CLI::PositiveNumber);
    sub->add_option("--level", flags.level, "confidence level")->check(CLI::Range(0.0, 1.0));
    sub->callback([&chosen, k] { chosen = k; });
  }
  CLI11_PARSE(app, argc, argv);
  return execute(chosen, flags);
}
