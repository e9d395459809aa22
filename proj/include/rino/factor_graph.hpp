#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

namespace rino {

using Key = std::uint64_t;

/// Element of a (possibly curved) state manifold. Perturbations live in a
/// local tangent space of dimension dim().
class Variable {
 public:
  virtual ~Variable() = default;
  virtual int dim() const = 0;
  /// In-place update x <- x (+) delta.
  virtual void retract(const Eigen::VectorXd& delta) = 0;
  /// delta such that this (+) delta == other (to first order).
  virtual Eigen::VectorXd local(const Variable& other) const = 0;
  virtual std::unique_ptr<Variable> clone() const = 0;
};

class VectorVariable final : public Variable {
 public:
  explicit VectorVariable(Eigen::VectorXd value) : value_(std::move(value)) {}
  int dim() const override { return static_cast<int>(value_.size()); }
  void retract(const Eigen::VectorXd& delta) override { value_ += delta; }
  Eigen::VectorXd local(const Variable& other) const override {
    return static_cast<const VectorVariable&>(other).value_ - value_;
  }
  std::unique_ptr<Variable> clone() const override {
    return std::make_unique<VectorVariable>(value_);
  }
  const Eigen::VectorXd& value() const { return value_; }
  Eigen::VectorXd& value() { return value_; }

 private:
  Eigen::VectorXd value_;
};

class Values {
 public:
  void insert(Key key, std::unique_ptr<Variable> var);
  void erase(Key key);
  bool contains(Key key) const { return vars_.count(key) != 0; }
  const Variable& at(Key key) const;
  Variable& at(Key key);
  template <typename T>
  const T& as(Key key) const {
    return static_cast<const T&>(at(key));
  }
  template <typename T>
  T& as(Key key) {
    return static_cast<T&>(at(key));
  }
  std::size_t size() const { return vars_.size(); }
  const std::map<Key, std::unique_ptr<Variable>>& map() const { return vars_; }
  Values clone() const;

 private:
  std::map<Key, std::unique_ptr<Variable>> vars_;
};

enum class LossKind { kNone, kHuber, kCauchy };

struct RobustLoss {
  LossKind kind = LossKind::kNone;
  double scale = 1.0;

  static RobustLoss none() { return {LossKind::kNone, 1.0}; }
  static RobustLoss huber(double k) { return {LossKind::kHuber, k}; }
  static RobustLoss cauchy(double c) { return {LossKind::kCauchy, c}; }

  /// rho(||r||) for the cost, with rho(r) = r^2/2 when kind == kNone.
  double cost(double r_norm) const;
  /// IRLS weight w(||r||); residual and Jacobian rows are scaled by sqrt(w).
  double weight(double r_norm) const;
};

/// Residuals are whitened: the factor applies its own sqrt-information.
class Factor {
 public:
  virtual ~Factor() = default;
  virtual const std::vector<Key>& keys() const = 0;
  virtual int residual_dim() const = 0;
  /// If jacobians is non-null it is resized to keys().size(); entry i holds
  /// d(residual)/d(delta_i) for the local perturbation of keys()[i].
  virtual Eigen::VectorXd evaluate(const Values& values,
                                   std::vector<Eigen::MatrixXd>* jacobians) const = 0;
  /// The robust loss is applied independently to consecutive residual blocks
  /// of this size (0 = whole residual as one block).
  virtual int robust_block_size() const { return 0; }
  virtual RobustLoss loss() const { return RobustLoss::none(); }
};

/// Gaussian prior left behind by marginalization: residual
/// L^T (delta - delta*) where delta stacks local coordinates of the current
/// values relative to the stored linearization points.
class MarginalPriorFactor final : public Factor {
 public:
  MarginalPriorFactor(std::vector<Key> keys, Values linearization_points,
                      Eigen::MatrixXd sqrt_info_t, Eigen::VectorXd delta_star);

  const std::vector<Key>& keys() const override { return keys_; }
  int residual_dim() const override { return static_cast<int>(sqrt_info_t_.rows()); }
  Eigen::VectorXd evaluate(const Values& values,
                           std::vector<Eigen::MatrixXd>* jacobians) const override;

  const Values& linearization_points() const { return lin_; }

 private:
  std::vector<Key> keys_;
  Values lin_;
  Eigen::MatrixXd sqrt_info_t_;  // rank x total_dim
  Eigen::VectorXd delta_star_;
  std::vector<int> offsets_;
  int total_dim_ = 0;
};

struct OptimizeOptions {
  int max_iterations = 5;
  double initial_lambda = 1e-4;
  double lambda_decrease = 0.5;
  double lambda_increase = 4.0;
  int max_retries = 8;
  double delta_tolerance = 1e-12;
  /// Called after every accepted step, before the next relinearization;
  /// lets factors refresh state-dependent noise models.
  std::function<void()> on_iteration;
};

struct OptimizeResult {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
};

class FactorGraph {
 public:
  void add_variable(Key key, std::unique_ptr<Variable> var) {
    values_.insert(key, std::move(var));
  }
  void add_factor(std::shared_ptr<Factor> factor);
  void remove_factor(const std::shared_ptr<Factor>& factor);

  Values& values() { return values_; }
  const Values& values() const { return values_; }
  const std::vector<std::shared_ptr<Factor>>& factors() const { return factors_; }

  double cost() const;
  OptimizeResult optimize(const OptimizeOptions& opts = {});

  /// Marginal covariance block of one variable at the current estimate.
  Eigen::MatrixXd marginal_covariance(Key key) const;
  /// Joint information over all variables in key order (Gauss-Newton
  /// approximation at the current estimate).
  Eigen::MatrixXd joint_information() const;

  /// Eliminates the given variables via the Schur complement over all factors
  /// touching them, removes those variables and factors, and installs the
  /// resulting Gaussian prior on the remaining connected variables.
  /// Returns the prior (null when nothing remains connected).
  std::shared_ptr<MarginalPriorFactor> marginalize(const std::vector<Key>& keys);

 private:
  struct Ordering {
    std::vector<Key> keys;
    std::map<Key, int> offset;
    int total_dim = 0;
  };
  Ordering make_ordering(const std::vector<Key>& keys) const;
  /// Accumulates H and b (= J^T W r) for the given factors under the ordering.
  void linearize(const std::vector<std::shared_ptr<Factor>>& factors, const Ordering& ord,
                 const Values& values, Eigen::MatrixXd& H, Eigen::VectorXd& b) const;
  double cost_at(const Values& values) const;

  Values values_;
  std::vector<std::shared_ptr<Factor>> factors_;
};

}  // namespace rino
