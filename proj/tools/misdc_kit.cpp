// Command-line front end: configure and run order studies, convergence-region
// scans, iteration-map limit checks, and single benchmark solves.
//
//   misdc-kit <mode> --config <path> [--out <path>] [--format csv|json]
//
// Exit codes: 0 success, 2 configuration error, 3 solver failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "misdc/harness.hpp"

namespace {

void print_exception_chain(const std::exception& e, int depth = 0) {
  std::cerr << (depth == 0 ? "error: " : "  caused by: ") << e.what() << '\n';
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& nested) {
    print_exception_chain(nested, depth + 1);
  } catch (...) {
  }
}

int run(const std::string& mode, const std::string& config_path,
        const std::string& out_override, const std::string& format_override) {
  using namespace misdc::harness;

  StudyConfig cfg = parse_config_file(config_path);
  const auto cli_mode = parse_mode(mode);
  if (!cli_mode) throw misdc::ConfigError("unknown mode '" + mode + "'");
  cfg.mode = *cli_mode;
  if (!out_override.empty()) cfg.out_path = out_override;
  if (!format_override.empty()) {
    cfg.format = format_override == "json" ? OutputFormat::json : OutputFormat::csv;
  }
  cfg.validate();

  if (cfg.out_path.empty()) {
    run_study(cfg, std::cout);
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) {
      throw misdc::ConfigError("cannot open output file '" + cfg.out_path + "'");
    }
    run_study(cfg, out);
    std::cerr << "wrote " << cfg.out_path << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MISDC time-integration toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  for (const char* mode :
       {"order-study", "region-scan", "limit-check", "single-run"}) {
    auto* sub = app.add_subcommand(mode);
    sub->add_option("--config", config_path, "study configuration file")
        ->required();
    sub->add_option("--out", out_path, "output path (default: stdout or config 'out')");
    sub->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), config_path, out_path,
               format);
  } catch (const misdc::ConfigError& e) {
    print_exception_chain(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    print_exception_chain(e);
    return 2;
  } catch (const std::exception& e) {
    print_exception_chain(e);
    return 3;
  }
}
