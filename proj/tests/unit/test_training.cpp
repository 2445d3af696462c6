#include "doctest.h"

#include "facegen/training.hpp"

#include <Eigen/Dense>

using namespace facegen;

TEST_CASE("descent reaches the minimizer of a quadratic") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  const Eigen::Vector3d b(1, -2, 0.5);
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = a * x - b;
    return 0.5 * x.dot(a * x) - b.dot(x);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  DescentOptions o;
  o.max_steps = 2000;
  o.relative_tolerance = 0.0;
  const DescentReport r = gradient_descent(f, x, o);
  const Eigen::VectorXd solution = a.ldlt().solve(b);
  CHECK((x - solution).norm() < 1e-6);
  REQUIRE(r.loss_history.size() == static_cast<std::size_t>(r.accepted_steps) + 1);
  for (std::size_t k = 1; k < r.loss_history.size(); ++k) CHECK(r.loss_history[k] < r.loss_history[k - 1]);
}

TEST_CASE("step budget and tolerance") {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = 2.0 * x;
    return x.squaredNorm();
  };
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 3.0);
  DescentOptions o;
  o.max_steps = 3;
  const DescentReport r = gradient_descent(f, x, o);
  CHECK(r.accepted_steps <= 3);
  CHECK(r.loss_history.front() == 36.0);
  CHECK(x.squaredNorm() == r.loss_history.back());

  Eigen::VectorXd y = Eigen::VectorXd::Constant(4, 3.0);
  o.max_steps = 0;
  const DescentReport none = gradient_descent(f, y, o);
  CHECK(none.loss_history.size() == 1u);
  CHECK(y == Eigen::VectorXd::Constant(4, 3.0));

  // A loose tolerance stops well before the budget.
  Eigen::VectorXd z = Eigen::VectorXd::Constant(4, 3.0);
  o.max_steps = 1000;
  o.relative_tolerance = 0.5;
  CHECK(gradient_descent(f, z, o).accepted_steps < 1000);
}

TEST_CASE("descent stops at a stationary point") {
  const Objective flat = [](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    if (g) *g = Eigen::VectorXd::Zero(x.size());
    return 1.0;
  };
  Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  const DescentReport r = gradient_descent(flat, x, DescentOptions{});
  CHECK(r.accepted_steps == 0);
  CHECK(x == Eigen::VectorXd::Ones(2));
}

TEST_CASE("descent lowers a nonconvex objective monotonically") {
  const Objective rosenbrock = [](const Eigen::VectorXd& p, Eigen::VectorXd* g) {
    const double x = p(0), y = p(1);
    if (g) {
      g->resize(2);
      (*g)(0) = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
      (*g)(1) = 200.0 * (y - x * x);
    }
    return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
  };
  Eigen::VectorXd p(2);
  p << -1.2, 1.0;
  DescentOptions o;
  o.max_steps = 5000;
  o.relative_tolerance = 0.0;
  const DescentReport r = gradient_descent(rosenbrock, p, o);
  for (std::size_t k = 1; k < r.loss_history.size(); ++k) CHECK(r.loss_history[k] < r.loss_history[k - 1]);
  CHECK(r.loss_history.back() < 0.01 * r.loss_history.front());
}
