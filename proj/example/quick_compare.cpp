// Runs a small paired experiment on the bundled arena and prints the report.
//
//   quick_compare [operator] [seeds]

#include <cstdlib>
#include <iostream>
#include <string>

#include "hmi/harness/config.hpp"
#include "hmi/harness/experiment.hpp"

int main(int argc, char** argv) {
  const std::string op = argc > 1 ? argv[1] : "conflict-prone+distracted";
  const std::uint64_t n = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 10;

  const auto file = hmi::load_params_file(hmi::bundled_data_path("controller.params"));
  hmi::ExperimentSpec spec;
  spec.world = hmi::load_world(hmi::bundled_data_path("arena.map"), file, {},
                               hmi::load_tier_order(hmi::bundled_data_path("criticality.ahp")));
  spec.scenario_label = "arena.map";
  spec.operators = {op};
  spec.seeds = hmi::seed_range(n);
  spec.params_file = file;

  const auto result = hmi::run_experiment(spec);
  for (const auto& row : result.per_operator.front().report.rows) std::cout << hmi::format_row(row) << "\n";
  return 0;
}
