#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace facegen {

// Full-batch gradient descent with backtracking: a step is taken only when it
// lowers the objective, so the recorded loss sequence is strictly decreasing.
struct DescentOptions {
  int max_steps = 300;
  double initial_step = 0.5;
  double grow = 1.25;
  double shrink = 0.5;
  int max_backtracks = 40;
  // Stop once the relative improvement of an accepted step falls below this.
  double relative_tolerance = 1e-9;
};

// Returns the objective and, when grad != nullptr, writes its gradient.
using Objective = std::function<double(const Eigen::VectorXd& params, Eigen::VectorXd* grad)>;

struct DescentReport {
  std::vector<double> loss_history;  // [initial, after step 1, ...]
  int accepted_steps = 0;
};

DescentReport gradient_descent(const Objective& objective, Eigen::VectorXd& params, const DescentOptions& options);

}  // namespace facegen
