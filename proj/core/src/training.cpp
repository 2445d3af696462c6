#include "facegen/training.hpp"

#include <algorithm>
#include <cmath>

namespace facegen {

DescentReport gradient_descent(const Objective& objective, Eigen::VectorXd& params, const DescentOptions& options) {
  DescentReport report;
  Eigen::VectorXd grad;
  double loss = objective(params, &grad);
  report.loss_history.push_back(loss);
  double step = options.initial_step;
  for (int it = 0; it < options.max_steps; ++it) {
    bool moved = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      Eigen::VectorXd trial = params - step * grad;
      Eigen::VectorXd trial_grad;
      const double trial_loss = objective(trial, &trial_grad);
      if (std::isfinite(trial_loss) && trial_loss < loss) {
        const double gain = (loss - trial_loss) / std::max(std::abs(loss), 1e-300);
        params = std::move(trial);
        grad = std::move(trial_grad);
        loss = trial_loss;
        report.loss_history.push_back(loss);
        ++report.accepted_steps;
        step *= options.grow;
        moved = gain >= options.relative_tolerance;
        break;
      }
      step *= options.shrink;
    }
    if (!moved) break;
  }
  return report;
}

}  // namespace facegen
