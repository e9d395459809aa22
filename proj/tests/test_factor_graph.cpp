#include "rino/factor_graph.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace rino;

namespace {

/// Whitened linear residual: sqrt_info * (sum_i A_i x_i - b).
class LinearFactor final : public Factor {
 public:
  LinearFactor(std::vector<Key> keys, std::vector<Eigen::MatrixXd> a, Eigen::VectorXd b,
               Eigen::MatrixXd sqrt_info)
      : keys_(std::move(keys)), a_(std::move(a)), b_(std::move(b)),
        sqrt_info_(std::move(sqrt_info)) {}

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return static_cast<int>(b_.size()); }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override {
    Eigen::VectorXd r = -b_;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      r += a_[i] * values.as<VectorVariable>(keys_[i]).value();
    }
    if (jacobians) {
      jacobians->resize(keys_.size());
      for (std::size_t i = 0; i < keys_.size(); ++i) (*jacobians)[i] = sqrt_info_ * a_[i];
    }
    return sqrt_info_ * r;
  }

 private:
  std::vector<Key> keys_;
  std::vector<Eigen::MatrixXd> a_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd sqrt_info_;
};

Eigen::MatrixXd random_spd_sqrt(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  const Eigen::MatrixXd spd =
      m * m.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
  return Eigen::LLT<Eigen::MatrixXd>(spd).matrixL().transpose();
}

}  // namespace

TEST_CASE("robust loss weights") {
  const RobustLoss none = RobustLoss::none();
  CHECK(none.weight(0.0) == 1.0);
  CHECK(none.weight(100.0) == 1.0);
  CHECK(none.cost(2.0) == doctest::Approx(2.0));  // r^2/2

  const RobustLoss huber = RobustLoss::huber(1.345);
  CHECK(huber.weight(0.0) == 1.0);
  CHECK(huber.weight(1.0) == 1.0);
  CHECK(huber.weight(1.345) == doctest::Approx(1.0));
  CHECK(huber.weight(2.69) == doctest::Approx(0.5));
  const RobustLoss cauchy = RobustLoss::cauchy(1.0);
  CHECK(cauchy.weight(0.0) == 1.0);
  double prev = 1.0;
  for (double r = 0.1; r < 20.0; r += 0.1) {
    const double w = cauchy.weight(r);
    CHECK(w > 0.0);
    CHECK(w < prev);
    prev = w;
    CHECK(huber.weight(r) <= 1.0);
  }
}

TEST_CASE("a single linear factor converges in one undamped step") {
  std::mt19937_64 rng(1);
  FactorGraph g;
  g.add_variable(0, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(3)));
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  a(0, 1) = 0.3;
  a(2, 0) = -0.4;
  const Eigen::VectorXd b = Eigen::VectorXd::Random(3);
  g.add_factor(std::make_shared<LinearFactor>(
      std::vector<Key>{0}, std::vector<Eigen::MatrixXd>{a}, b, random_spd_sqrt(3, rng)));
  OptimizeOptions opts;
  opts.max_iterations = 1;
  opts.initial_lambda = 1e-14;
  const OptimizeResult res = g.optimize(opts);
  CHECK(res.final_cost <= res.initial_cost);
  const Eigen::VectorXd x = g.values().as<VectorVariable>(0).value();
  CHECK((a * x - b).norm() < 1e-9);
}

TEST_CASE("cost is non-increasing across accepted steps") {
  std::mt19937_64 rng(2);
  FactorGraph g;
  for (Key k = 0; k < 4; ++k) {
    g.add_variable(k, std::make_unique<VectorVariable>(Eigen::VectorXd::Random(2)));
  }
  for (Key k = 0; k + 1 < 4; ++k) {
    g.add_factor(std::make_shared<LinearFactor>(
        std::vector<Key>{k, k + 1},
        std::vector<Eigen::MatrixXd>{-Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::MatrixXd::Identity(2, 2)},
        Eigen::VectorXd::Random(2), random_spd_sqrt(2, rng)));
  }
  g.add_factor(std::make_shared<LinearFactor>(
      std::vector<Key>{0}, std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Identity(2, 2)},
      Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)));
  double cost = g.cost();
  for (int i = 0; i < 5; ++i) {
    OptimizeOptions opts;
    opts.max_iterations = 1;
    g.optimize(opts);
    CHECK(g.cost() <= cost + 1e-12);
    cost = g.cost();
  }
}

TEST_CASE("two-state chain marginalization matches dense elimination") {
  std::mt19937_64 rng(3);
  const int n = 3;

  auto build = [&](FactorGraph& g, const Eigen::MatrixXd& a0, const Eigen::MatrixXd& a01,
                   const Eigen::VectorXd& b0, const Eigen::VectorXd& b01) {
    g.add_variable(0, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(n)));
    g.add_variable(1, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(n)));
    g.add_factor(std::make_shared<LinearFactor>(
        std::vector<Key>{0}, std::vector<Eigen::MatrixXd>{a0}, b0,
        Eigen::MatrixXd::Identity(n, n)));
    g.add_factor(std::make_shared<LinearFactor>(
        std::vector<Key>{0, 1},
        std::vector<Eigen::MatrixXd>{a01, Eigen::MatrixXd::Identity(n, n)}, b01,
        Eigen::MatrixXd::Identity(n, n)));
  };

  const Eigen::MatrixXd a0 = random_spd_sqrt(n, rng);
  Eigen::MatrixXd a01 = -Eigen::MatrixXd::Identity(n, n);
  a01(0, 2) = 0.25;
  const Eigen::VectorXd b0 = Eigen::VectorXd::Random(n);
  const Eigen::VectorXd b01 = Eigen::VectorXd::Random(n);

  // reference: full batch solution and information
  FactorGraph batch;
  build(batch, a0, a01, b0, b01);
  OptimizeOptions opts;
  opts.max_iterations = 3;
  opts.initial_lambda = 1e-14;
  batch.optimize(opts);
  const Eigen::VectorXd x1_batch = batch.values().as<VectorVariable>(1).value();
  const Eigen::MatrixXd joint = batch.joint_information();
  const Eigen::MatrixXd schur =
      joint.bottomRightCorner(n, n) -
      joint.bottomLeftCorner(n, n) * joint.topLeftCorner(n, n).inverse() *
          joint.topRightCorner(n, n);

  // marginalize x0 out of an identical graph
  FactorGraph g;
  build(g, a0, a01, b0, b01);
  g.optimize(opts);
  const auto prior = g.marginalize({0});
  REQUIRE(prior != nullptr);
  CHECK(g.values().size() == 1);
  // solution of the retained state is unchanged
  CHECK((g.values().as<VectorVariable>(1).value() - x1_batch).norm() < 1e-9);
  // information of the prior equals the Schur complement
  CHECK((g.joint_information() - schur).norm() < 1e-9);
  // re-optimizing does not move the estimate (linear problem)
  g.optimize(opts);
  CHECK((g.values().as<VectorVariable>(1).value() - x1_batch).norm() < 1e-9);
}

TEST_CASE("fixed-lag smoother equals the batch solve on a linear chain") {
  std::mt19937_64 rng(4);
  const int n = 2;
  const int total = 12;
  const int lag = 4;

  std::vector<Eigen::MatrixXd> sqrts;
  std::vector<Eigen::VectorXd> targets;
  for (int i = 0; i + 1 < total; ++i) {
    sqrts.push_back(random_spd_sqrt(n, rng));
    targets.push_back(Eigen::VectorXd::Random(n));
  }
  auto between = [&](int i) {
    return std::make_shared<LinearFactor>(
        std::vector<Key>{static_cast<Key>(i), static_cast<Key>(i + 1)},
        std::vector<Eigen::MatrixXd>{-Eigen::MatrixXd::Identity(n, n),
                                     Eigen::MatrixXd::Identity(n, n)},
        targets[i], sqrts[i]);
  };
  auto prior0 = [&]() {
    return std::make_shared<LinearFactor>(
        std::vector<Key>{0}, std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Identity(n, n)},
        Eigen::VectorXd::Zero(n), 10.0 * Eigen::MatrixXd::Identity(n, n));
  };

  OptimizeOptions opts;
  opts.max_iterations = 3;
  opts.initial_lambda = 1e-14;

  // batch
  FactorGraph batch;
  for (int i = 0; i < total; ++i) {
    batch.add_variable(i, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(n)));
  }
  batch.add_factor(prior0());
  for (int i = 0; i + 1 < total; ++i) batch.add_factor(between(i));
  batch.optimize(opts);
  const Eigen::VectorXd last_batch =
      batch.values().as<VectorVariable>(total - 1).value();
  const Eigen::MatrixXd cov_batch = batch.marginal_covariance(total - 1);

  // fixed lag
  FactorGraph fl;
  fl.add_variable(0, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(n)));
  fl.add_factor(prior0());
  for (int i = 1; i < total; ++i) {
    fl.add_variable(i, std::make_unique<VectorVariable>(Eigen::VectorXd::Zero(n)));
    fl.add_factor(between(i - 1));
    fl.optimize(opts);
    if (static_cast<int>(fl.values().size()) > lag + 1) {
      fl.marginalize({static_cast<Key>(i - lag - 1)});
    }
  }
  const Eigen::VectorXd last_fl = fl.values().as<VectorVariable>(total - 1).value();
  CHECK((last_fl - last_batch).norm() < 1e-9);
  CHECK((fl.marginal_covariance(total - 1) - cov_batch).norm() < 1e-9);
}

TEST_CASE("marginal prior factor evaluates the stored gaussian") {
  // residual L^T (delta - delta*) with one vector variable
  Values lin;
  lin.insert(7, std::make_unique<VectorVariable>(Eigen::Vector2d(1.0, -2.0)));
  Eigen::MatrixXd sqrt_info_t(2, 2);
  sqrt_info_t << 2.0, 0.5, 0.0, 1.5;  // L, stored transposed inside
  Eigen::VectorXd delta_star(2);
  delta_star << 0.1, -0.3;
  MarginalPriorFactor f({7}, lin.clone(), sqrt_info_t, delta_star);

  Values vals;
  vals.insert(7, std::make_unique<VectorVariable>(Eigen::Vector2d(1.4, -1.8)));
  std::vector<Eigen::MatrixXd> jac;
  const Eigen::VectorXd r = f.evaluate(vals, &jac);
  const Eigen::Vector2d delta(0.4, 0.2);
  const Eigen::VectorXd expected = sqrt_info_t * (delta - delta_star);
  CHECK((r - expected).norm() < 1e-12);
  REQUIRE(jac.size() == 1);
  CHECK((jac[0] - sqrt_info_t).norm() < 1e-12);
}
