#include "pearlplus/meta_report.hpp"

#include <stdexcept>

#include "json.hpp"
#include "pearlplus/csv.hpp"

namespace pearlplus {

namespace {

void collect_budget(const AdaptationReport& r, int budget, double& ret_sum, int& cells,
                    int& failures, int& rollouts) {
  ret_sum = 0.0;
  cells = failures = rollouts = 0;
  for (const EvalCell& c : r.cells) {
    if (c.budget != budget) continue;
    ret_sum += c.mean_return;
    cells += 1;
    failures += c.n_failures;
    rollouts += c.n_rollouts;
  }
  if (cells == 0) throw std::invalid_argument("AdaptationReport: no cells for budget");
}

}  // namespace

double AdaptationReport::budget_mean_return(int budget) const {
  double ret_sum;
  int cells, failures, rollouts;
  collect_budget(*this, budget, ret_sum, cells, failures, rollouts);
  return ret_sum / cells;
}

double AdaptationReport::budget_failure_rate(int budget) const {
  double ret_sum;
  int cells, failures, rollouts;
  collect_budget(*this, budget, ret_sum, cells, failures, rollouts);
  return static_cast<double>(failures) / static_cast<double>(rollouts);
}

std::string AdaptationReport::to_csv() const {
  std::string out = "task,budget,n_rollouts,n_failures,mean_return,failure_rate\n";
  for (const EvalCell& c : cells) {
    out += std::to_string(c.task_index) + ',' + std::to_string(c.budget) + ',' +
           std::to_string(c.n_rollouts) + ',' + std::to_string(c.n_failures) + ',' +
           format_double(c.mean_return) + ',' + format_double(c.failure_rate) + '\n';
  }
  return out;
}

std::string AdaptationReport::to_json() const {
  nlohmann::json j;
  nlohmann::json cell_list = nlohmann::json::array();
  std::vector<int> budgets;
  for (const EvalCell& c : cells) {
    nlohmann::json jc = {{"task", c.task_index},
                         {"budget", c.budget},
                         {"n_rollouts", c.n_rollouts},
                         {"n_failures", c.n_failures},
                         {"mean_return", c.mean_return},
                         {"failure_rate", c.failure_rate}};
    if (!c.min_brakings.empty()) jc["min_brakings"] = c.min_brakings;
    cell_list.push_back(jc);
    bool seen = false;
    for (int b : budgets) seen = seen || b == c.budget;
    if (!seen) budgets.push_back(c.budget);
  }
  j["cells"] = cell_list;

  nlohmann::json agg = nlohmann::json::array();
  // fixed bin edges for the min-braking histogram, m/s^2
  const std::vector<double> edges = {-8, -4, -2, -1, -0.5, 0, 0.5, 1, 2, 4, 8};
  for (int b : budgets) {
    nlohmann::json ja = {{"budget", b},
                         {"mean_return", budget_mean_return(b)},
                         {"failure_rate", budget_failure_rate(b)}};
    std::vector<double> braking;
    for (const EvalCell& c : cells) {
      if (c.budget != b) continue;
      braking.insert(braking.end(), c.min_brakings.begin(), c.min_brakings.end());
    }
    if (!braking.empty()) {
      std::vector<int> counts(edges.size() + 1, 0);
      for (double v : braking) {
        std::size_t bin = 0;
        while (bin < edges.size() && v >= edges[bin]) bin += 1;
        counts[bin] += 1;
      }
      ja["min_braking_histogram"] = {{"edges", edges}, {"counts", counts}};
    }
    agg.push_back(ja);
  }
  j["budgets"] = agg;
  return j.dump(2);
}

}  // namespace pearlplus
