#pragma once

#include <string>
#include <vector>

namespace pearlplus {

// One (task, adaptation budget) evaluation cell.
struct EvalCell {
  int task_index = 0;
  int budget = 0;
  int n_rollouts = 0;
  int n_failures = 0;
  double mean_return = 0.0;
  double failure_rate = 0.0;
  std::vector<double> min_brakings;  // merge family: b_min at each merge
};

struct AdaptationReport {
  std::vector<EvalCell> cells;  // ordered by (task, budget)

  double budget_mean_return(int budget) const;
  double budget_failure_rate(int budget) const;

  std::string to_csv() const;
  std::string to_json() const;
};

}  // namespace pearlplus
