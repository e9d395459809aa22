#include "rino/factor_graph.hpp"

#include <algorithm>
#include <cmath>

namespace rino {

// ---------------------------------------------------------------- Values

void Values::insert(Key key, std::unique_ptr<Variable> var) {
  if (!var) throw std::invalid_argument("null variable");
  if (!vars_.emplace(key, std::move(var)).second) {
    throw std::invalid_argument("duplicate variable key " + std::to_string(key));
  }
}

void Values::erase(Key key) { vars_.erase(key); }

const Variable& Values::at(Key key) const {
  auto it = vars_.find(key);
  if (it == vars_.end()) throw std::out_of_range("unknown variable key " + std::to_string(key));
  return *it->second;
}

Variable& Values::at(Key key) {
  auto it = vars_.find(key);
  if (it == vars_.end()) throw std::out_of_range("unknown variable key " + std::to_string(key));
  return *it->second;
}

Values Values::clone() const {
  Values out;
  for (const auto& [key, var] : vars_) out.insert(key, var->clone());
  return out;
}

// ------------------------------------------------------------ RobustLoss

double RobustLoss::cost(double r) const {
  switch (kind) {
    case LossKind::kNone:
      return 0.5 * r * r;
    case LossKind::kHuber:
      return r <= scale ? 0.5 * r * r : scale * (r - 0.5 * scale);
    case LossKind::kCauchy: {
      const double u = r / scale;
      return 0.5 * scale * scale * std::log1p(u * u);
    }
  }
  return 0.5 * r * r;
}

double RobustLoss::weight(double r) const {
  switch (kind) {
    case LossKind::kNone:
      return 1.0;
    case LossKind::kHuber:
      return r <= scale ? 1.0 : scale / r;
    case LossKind::kCauchy: {
      const double u = r / scale;
      return 1.0 / (1.0 + u * u);
    }
  }
  return 1.0;
}

// -------------------------------------------------- MarginalPriorFactor

MarginalPriorFactor::MarginalPriorFactor(std::vector<Key> keys, Values linearization_points,
                                         Eigen::MatrixXd sqrt_info_t, Eigen::VectorXd delta_star)
    : keys_(std::move(keys)),
      lin_(std::move(linearization_points)),
      sqrt_info_t_(std::move(sqrt_info_t)),
      delta_star_(std::move(delta_star)) {
  offsets_.reserve(keys_.size());
  for (Key k : keys_) {
    offsets_.push_back(total_dim_);
    total_dim_ += lin_.at(k).dim();
  }
  if (sqrt_info_t_.cols() != total_dim_ || delta_star_.size() != total_dim_) {
    throw std::invalid_argument("marginal prior dimension mismatch");
  }
}

Eigen::VectorXd MarginalPriorFactor::evaluate(const Values& values,
                                              std::vector<Eigen::MatrixXd>* jacobians) const {
  Eigen::VectorXd delta(total_dim_);
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    const Variable& lin = lin_.at(keys_[i]);
    delta.segment(offsets_[i], lin.dim()) = lin.local(values.at(keys_[i]));
  }
  if (jacobians) {
    jacobians->resize(keys_.size());
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      const int d = lin_.at(keys_[i]).dim();
      (*jacobians)[i] = sqrt_info_t_.middleCols(offsets_[i], d);
    }
  }
  return sqrt_info_t_ * (delta - delta_star_);
}

// ------------------------------------------------------------ FactorGraph

void FactorGraph::add_factor(std::shared_ptr<Factor> factor) {
  if (!factor) throw std::invalid_argument("null factor");
  for (Key k : factor->keys()) {
    if (!values_.contains(k)) {
      throw std::invalid_argument("factor references unknown key " + std::to_string(k));
    }
  }
  factors_.push_back(std::move(factor));
}

void FactorGraph::remove_factor(const std::shared_ptr<Factor>& factor) {
  factors_.erase(std::remove(factors_.begin(), factors_.end(), factor), factors_.end());
}

FactorGraph::Ordering FactorGraph::make_ordering(const std::vector<Key>& keys) const {
  Ordering ord;
  ord.keys = keys;
  for (Key k : ord.keys) {
    ord.offset[k] = ord.total_dim;
    ord.total_dim += values_.at(k).dim();
  }
  return ord;
}

double FactorGraph::cost_at(const Values& values) const {
  double total = 0.0;
  for (const auto& f : factors_) {
    const Eigen::VectorXd r = f->evaluate(values, nullptr);
    const int block = f->robust_block_size() > 0 ? f->robust_block_size()
                                                 : static_cast<int>(r.size());
    const RobustLoss loss = f->loss();
    for (int i = 0; i < r.size(); i += block) {
      total += loss.cost(r.segment(i, std::min<int>(block, r.size() - i)).norm());
    }
  }
  return total;
}

double FactorGraph::cost() const { return cost_at(values_); }

void FactorGraph::linearize(const std::vector<std::shared_ptr<Factor>>& factors,
                            const Ordering& ord, const Values& values, Eigen::MatrixXd& H,
                            Eigen::VectorXd& b) const {
  H.setZero(ord.total_dim, ord.total_dim);
  b.setZero(ord.total_dim);
  std::vector<Eigen::MatrixXd> jacobians;
  for (const auto& f : factors) {
    Eigen::VectorXd r = f->evaluate(values, &jacobians);
    const int block = f->robust_block_size() > 0 ? f->robust_block_size()
                                                 : static_cast<int>(r.size());
    const RobustLoss loss = f->loss();
    if (loss.kind != LossKind::kNone) {
      for (int i = 0; i < r.size(); i += block) {
        const int len = std::min<int>(block, r.size() - i);
        const double s = std::sqrt(loss.weight(r.segment(i, len).norm()));
        r.segment(i, len) *= s;
        for (auto& J : jacobians) J.middleRows(i, len) *= s;
      }
    }
    const std::vector<Key>& keys = f->keys();
    for (std::size_t a = 0; a < keys.size(); ++a) {
      auto ita = ord.offset.find(keys[a]);
      if (ita == ord.offset.end()) continue;
      const int oa = ita->second;
      const int da = values.at(keys[a]).dim();
      b.segment(oa, da).noalias() += jacobians[a].transpose() * r;
      for (std::size_t c = a; c < keys.size(); ++c) {
        auto itc = ord.offset.find(keys[c]);
        if (itc == ord.offset.end()) continue;
        const int oc = itc->second;
        const int dc = values.at(keys[c]).dim();
        const Eigen::MatrixXd block_ac = jacobians[a].transpose() * jacobians[c];
        H.block(oa, oc, da, dc) += block_ac;
        if (oc != oa) H.block(oc, oa, dc, da) += block_ac.transpose();
      }
    }
  }
}

OptimizeResult FactorGraph::optimize(const OptimizeOptions& opts) {
  OptimizeResult result;
  std::vector<Key> all_keys;
  for (const auto& [key, var] : values_.map()) all_keys.push_back(key);
  const Ordering ord = make_ordering(all_keys);
  if (ord.total_dim == 0) return result;

  double lambda = opts.initial_lambda;
  double cost = cost_at(values_);
  result.initial_cost = cost;

  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    linearize(factors_, ord, values_, H, b);

    bool accepted = false;
    for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
      Eigen::MatrixXd damped = H;
      for (int i = 0; i < ord.total_dim; ++i) {
        damped(i, i) += lambda * std::max(H(i, i), 1e-12);
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(-b);
      if (!delta.allFinite()) {
        lambda *= opts.lambda_increase;
        continue;
      }
      Values trial = values_.clone();
      for (Key k : ord.keys) {
        trial.at(k).retract(delta.segment(ord.offset.at(k), trial.at(k).dim()));
      }
      const double trial_cost = cost_at(trial);
      if (trial_cost <= cost) {
        values_ = std::move(trial);
        cost = trial_cost;
        lambda = std::max(lambda * opts.lambda_decrease, 1e-12);
        accepted = true;
        result.converged = delta.norm() < opts.delta_tolerance;
        break;
      }
      lambda *= opts.lambda_increase;
    }
    ++result.iterations;
    if (accepted && opts.on_iteration) opts.on_iteration();
    if (!accepted || result.converged) break;
  }
  result.final_cost = cost;
  return result;
}

Eigen::MatrixXd FactorGraph::joint_information() const {
  std::vector<Key> all_keys;
  for (const auto& [key, var] : values_.map()) all_keys.push_back(key);
  const Ordering ord = make_ordering(all_keys);
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  linearize(factors_, ord, values_, H, b);
  return H;
}

Eigen::MatrixXd FactorGraph::marginal_covariance(Key key) const {
  std::vector<Key> all_keys;
  for (const auto& [k, var] : values_.map()) all_keys.push_back(k);
  const Ordering ord = make_ordering(all_keys);
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  linearize(factors_, ord, values_, H, b);
  // Small diagonal floor keeps the solve well posed under gauge freedom.
  for (int i = 0; i < ord.total_dim; ++i) H(i, i) += 1e-12;
  const Eigen::MatrixXd cov = H.ldlt().solve(Eigen::MatrixXd::Identity(ord.total_dim, ord.total_dim));
  const int off = ord.offset.at(key);
  const int dim = values_.at(key).dim();
  return cov.block(off, off, dim, dim);
}

std::shared_ptr<MarginalPriorFactor> FactorGraph::marginalize(const std::vector<Key>& drop) {
  // Factors touching any dropped variable, and the remaining variables they
  // connect to.
  std::vector<std::shared_ptr<Factor>> touched;
  std::vector<Key> keep;
  {
    std::map<Key, bool> dropped;
    for (Key k : drop) dropped[k] = true;
    std::map<Key, bool> keep_set;
    for (const auto& f : factors_) {
      bool touches = false;
      for (Key k : f->keys()) touches |= dropped.count(k) != 0;
      if (!touches) continue;
      touched.push_back(f);
      for (Key k : f->keys()) {
        if (!dropped.count(k)) keep_set[k] = true;
      }
    }
    for (const auto& [k, unused] : keep_set) keep.push_back(k);
  }

  // Ordering: dropped block first, kept block second.
  std::vector<Key> order_keys = drop;
  order_keys.insert(order_keys.end(), keep.begin(), keep.end());
  const Ordering ord = make_ordering(order_keys);
  int dim_m = 0;
  for (Key k : drop) dim_m += values_.at(k).dim();
  const int dim_r = ord.total_dim - dim_m;

  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  linearize(touched, ord, values_, H, b);

  std::shared_ptr<MarginalPriorFactor> prior;
  if (dim_r > 0) {
    const Eigen::MatrixXd H_mm = H.topLeftCorner(dim_m, dim_m);
    const Eigen::MatrixXd H_rm = H.bottomLeftCorner(dim_r, dim_m);
    const Eigen::MatrixXd H_rr = H.bottomRightCorner(dim_r, dim_r);
    const Eigen::VectorXd b_m = b.head(dim_m);
    const Eigen::VectorXd b_r = b.tail(dim_r);

    Eigen::LDLT<Eigen::MatrixXd> ldlt(
        H_mm + 1e-12 * Eigen::MatrixXd::Identity(dim_m, dim_m));
    Eigen::MatrixXd H_schur = H_rr - H_rm * ldlt.solve(H_rm.transpose());
    Eigen::VectorXd b_schur = b_r - H_rm * ldlt.solve(b_m);
    H_schur = 0.5 * (H_schur + H_schur.transpose());

    // Rank-revealing square root: H = V S V^T, keep positive spectrum.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H_schur);
    const double floor = std::max(1e-10, 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff());
    std::vector<int> kept;
    for (int i = 0; i < dim_r; ++i) {
      if (eig.eigenvalues()(i) > floor) kept.push_back(i);
    }
    if (!kept.empty()) {
      Eigen::MatrixXd sqrt_info_t(static_cast<int>(kept.size()), dim_r);
      Eigen::VectorXd delta_star = Eigen::VectorXd::Zero(dim_r);
      Eigen::VectorXd pinv_b = Eigen::VectorXd::Zero(dim_r);
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const double s = eig.eigenvalues()(kept[i]);
        const Eigen::VectorXd v = eig.eigenvectors().col(kept[i]);
        sqrt_info_t.row(static_cast<int>(i)) = std::sqrt(s) * v.transpose();
        pinv_b += v * (v.dot(b_schur) / s);
      }
      delta_star = -pinv_b;

      Values lin;
      for (Key k : keep) lin.insert(k, values_.at(k).clone());
      prior = std::make_shared<MarginalPriorFactor>(keep, std::move(lin),
                                                    std::move(sqrt_info_t),
                                                    std::move(delta_star));
    }
  }

  for (const auto& f : touched) remove_factor(f);
  for (Key k : drop) values_.erase(k);
  if (prior) factors_.push_back(prior);
  return prior;
}

}  // namespace rino
