#include "mlqg/config.hpp"
#include "mlqg/run.hpp"
#include "mlqg/sim.hpp"
#include "mlqg/verify.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int run_command(const std::string& config_path, const std::string& out_override) {
  mlqg::SimConfig config = mlqg::load_config(config_path);
  if (!out_override.empty()) config.output_directory = out_override;
  mlqg::validate(config);
  const mlqg::RunResult result = mlqg::run(config, config.output_directory, [](int step, const mlqg::State& s) {
    if (step > 0 && step % 100 == 0) std::cerr << "step " << step << "  t = " << s.time << '\n';
  });
  std::cout << "completed " << result.steps << " steps to t = " << mlqg::format_value(result.final_state.time)
            << "; output in " << config.output_directory << '\n';
  return kExitOk;
}

int verify_command(const std::string& suite) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = mlqg::suite_names();
  } else {
    names = {suite};
  }
  bool ok = true;
  for (const auto& name : names) {
    const mlqg::SuiteResult r = mlqg::run_suite(name);
    mlqg::print_suite(std::cout, r);
    std::cout.flush();
    ok = ok && r.passed();
  }
  std::cout << (ok ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';
  return ok ? kExitOk : kExitNumerical;
}

int convergence_command(const std::string& name) {
  bool ok = true;
  for (const auto& table : mlqg::run_convergence(name)) {
    mlqg::print_convergence(std::cout, table);
    ok = ok && table.passed();
  }
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-layer quasi-geostrophic solver on the unit disk"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a simulation from a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides [output] directory)");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("suite", suite, "modal, elliptic, advection, conservation, weak, twin or all")
      ->required()
      ->check(CLI::IsMember({"modal", "elliptic", "advection", "conservation", "weak", "twin", "all"}));

  std::string case_name;
  auto* convergence = app.add_subcommand("convergence", "Print a grid-refinement study");
  convergence->add_option("case", case_name, "elliptic, advection or full")
      ->required()
      ->check(CLI::IsMember({"elliptic", "advection", "full"}));

  std::string dump_path;
  auto* dump = app.add_subcommand("dump-config", "Print the canonical form of a config file");
  dump->add_option("config", dump_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return run_command(config_path, out_dir);
    if (*verify) return verify_command(suite);
    if (*convergence) return convergence_command(case_name);
    if (*dump) {
      std::cout << mlqg::dump_config(mlqg::load_config(dump_path));
      return kExitOk;
    }
  } catch (const mlqg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mlqg::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
