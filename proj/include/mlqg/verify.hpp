#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlqg {

enum class Relation { at_most, at_least, equal };

struct Check {
  std::string name;
  double measured = 0.0;
  Relation relation = Relation::at_most;
  double bound = 0.0;
  bool pass = false;
};

Check make_check(std::string name, double measured, Relation relation, double bound);

struct SuiteResult {
  std::string suite;
  std::vector<Check> checks;

  bool passed() const;
  const Check& find(const std::string& name) const;  ///< throws std::out_of_range
};

/// Property suites at fixed desk-scale resolutions.
SuiteResult verify_modal();
SuiteResult verify_elliptic();
SuiteResult verify_advection();
SuiteResult verify_conservation();
SuiteResult verify_weak();
SuiteResult verify_twin();

const std::vector<std::string>& suite_names();  ///< without "all"
/// Runs one suite by name; throws std::invalid_argument for unknown names.
SuiteResult run_suite(const std::string& name);

/// One line per check: PASS/FAIL, name, measured value, bound.
void print_suite(std::ostream& out, const SuiteResult& suite);

struct ConvergenceTable {
  std::string name;
  std::vector<int> n_r;
  std::vector<double> error;
  std::vector<double> order;  ///< order[i] between levels i and i+1
  double required_order = 1.8;

  bool passed() const;
};

ConvergenceTable convergence_bessel(const std::vector<int>& n_r);
ConvergenceTable convergence_manufactured(const std::vector<int>& n_r);
/// Solid-body rotation of a Gaussian blob for one revolution; 200 steps at
/// n_r = 64, scaled with n_r.
ConvergenceTable convergence_rotation(const std::vector<int>& n_r);
/// Nonlinear 3-layer run to t = 0.2; self-convergence between successive
/// resolutions, compared at the nodes of the coarsest grid.
ConvergenceTable convergence_full(const std::vector<int>& n_r);

/// Cases for the `convergence` subcommand: elliptic, advection, full.
std::vector<ConvergenceTable> run_convergence(const std::string& name);

void print_convergence(std::ostream& out, const ConvergenceTable& table);

}  // namespace mlqg
