// sqnr_cli: sweep | squeeze-scan | transistor | pulse | validate
//
// Exit codes: 0 success, 2 configuration error, 3 numerical or tolerance failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "sqnr/commands.hpp"

namespace {

using Command = int (*)(const sqnr::RunConfig&, int, std::ostream&, std::ostream&);

struct Options {
  std::string config_path;
  std::string out_path;
  std::string preset;
  int threads = 0;
};

int run(Command cmd, const Options& o) {
  try {
    if (o.config_path.empty() && o.preset.empty()) throw sqnr::ConfigError("need --config or --preset");
    const std::optional<std::string> preset = o.preset.empty() ? std::nullopt : std::optional(o.preset);
    const sqnr::RunConfig cfg =
        o.config_path.empty() ? sqnr::parse_config(nlohmann::json::object(), preset) : sqnr::load_config(o.config_path, preset);
    const int threads = sqnr::resolve_threads(o.threads);

    std::string out_path = o.out_path;
    if (out_path.empty() && cfg.csv_path) out_path = *cfg.csv_path;
    if (out_path.empty()) return cmd(cfg, threads, std::cout, std::cerr);
    std::ofstream file(out_path, std::ios::binary);
    if (!file) throw sqnr::ConfigError("cannot open output '" + out_path + "'");
    const int code = cmd(cfg, threads, file, std::cout);
    file.close();
    if (!file) {
      std::cerr << "error: failed writing '" << out_path << "'\n";
      return sqnr::kExitNumerical;
    }
    return code;
  } catch (const sqnr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return sqnr::kExitConfig;
  } catch (const std::logic_error& e) {  // InvalidArgument, DomainError: bad parameters
    std::cerr << "config error: " << e.what() << "\n";
    return sqnr::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return sqnr::kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezing-induced nonreciprocity simulator"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option("--out", o.out_path, "output path (default: config outputs.csv, else stdout)");
    sub->add_option("--preset", o.preset, "NMS | MRS | LN-chip | custom (overrides the config preset)");
    sub->add_option("--threads", o.threads, "worker threads (default: $SQNR_THREADS, then hardware)")
        ->check(CLI::PositiveNumber);
  };

  Command chosen = nullptr;
  const std::pair<const char*, Command> table[] = {
      {"sweep", sqnr::cmd_sweep},           {"squeeze-scan", sqnr::cmd_squeeze_scan},
      {"transistor", sqnr::cmd_transistor}, {"pulse", sqnr::cmd_pulse},
      {"validate", sqnr::cmd_validate}};
  const char* help[] = {"steady-state spectrum over the sweep axis", "isolation and insertion loss versus r_p",
                        "transistor gain map", "single-photon pulse propagation",
                        "analytic vs moment and Fock cross-checks"};
  for (std::size_t i = 0; i < std::size(table); ++i) {
    CLI::App* sub = app.add_subcommand(table[i].first, help[i]);
    add_common(sub);
    sub->callback([&chosen, cmd = table[i].second] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sqnr::kExitConfig;
  }
  return run(chosen, o);
}
