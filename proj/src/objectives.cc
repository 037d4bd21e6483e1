// Copyright 2026 The EFPSN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "efpsn/objectives.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "efpsn/errors.h"

namespace efpsn {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajorMatrix> Weights(const Eigen::VectorXd& theta,
                                         int classes, int features) {
  return Eigen::Map<const RowMajorMatrix>(theta.data(), classes, features);
}

void CheckDimension(const Objective& f, const Eigen::VectorXd& x) {
  if (x.size() != f.dimension()) {
    throw InvalidArgument("objective: expected dimension " +
                          std::to_string(f.dimension()) + ", got " +
                          std::to_string(x.size()));
  }
}

// Row-wise stable softmax of logits, in place.
void SoftmaxRows(Eigen::MatrixXd& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double top = logits.row(r).maxCoeff();
    logits.row(r) = (logits.row(r).array() - top).exp();
    logits.row(r) /= logits.row(r).sum();
  }
}

}  // namespace

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd q, Eigen::VectorXd b)
    : q_(std::move(q)), b_(std::move(b)) {
  if (q_.rows() != q_.cols() || q_.rows() != b_.size()) {
    throw InvalidArgument("quadratic: Q must be square and match b");
  }
  if (!q_.isApprox(q_.transpose(), 1e-12)) {
    throw InvalidArgument("quadratic: Q must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(q_);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("quadratic: Q must be positive definite");
  }
}

double QuadraticObjective::Value(const Eigen::VectorXd& x) const {
  CheckDimension(*this, x);
  return 0.5 * x.dot(q_ * x) + b_.dot(x);
}

Eigen::VectorXd QuadraticObjective::Gradient(const Eigen::VectorXd& x) const {
  CheckDimension(*this, x);
  return q_ * x + b_;
}

Eigen::VectorXd QuadraticObjective::Minimizer() const {
  return -q_.llt().solve(b_);
}

int LogisticDimension(int classes, int features) {
  return classes * (features + 1);
}

int WeightIndex(int features, int c, int f) { return c * features + f; }

int BiasIndex(int classes, int features, int c) {
  return classes * features + c;
}

LogisticObjective::LogisticObjective(Dataset data, double l2)
    : data_(std::move(data)),
      classes_(data_.classes),
      features_(data_.dim()),
      l2_(l2) {
  if (classes_ < 2) throw InvalidArgument("logistic: need at least 2 classes");
  if (data_.features.rows() != static_cast<Eigen::Index>(data_.labels.size())) {
    throw InvalidArgument("logistic: feature rows and labels disagree");
  }
  if (data_.size() == 0) throw InvalidArgument("logistic: empty dataset");
  for (int y : data_.labels) {
    if (y < 0 || y >= classes_) throw InvalidArgument("logistic: label out of range");
  }
  if (l2_ < 0.0) throw InvalidArgument("logistic: l2 must be >= 0");
}

double LogisticObjective::Value(const Eigen::VectorXd& theta) const {
  CheckDimension(*this, theta);
  const auto w = Weights(theta, classes_, features_);
  const Eigen::VectorXd bias = theta.tail(classes_);
  Eigen::MatrixXd logits = data_.features * w.transpose();
  logits.rowwise() += bias.transpose();
  double loss = 0.0;
  for (int r = 0; r < data_.size(); ++r) {
    const double top = logits.row(r).maxCoeff();
    const double lse = top + std::log((logits.row(r).array() - top).exp().sum());
    loss += lse - logits(r, data_.labels[r]);
  }
  return loss / data_.size() + 0.5 * l2_ * theta.squaredNorm();
}

Eigen::VectorXd LogisticObjective::Gradient(const Eigen::VectorXd& theta) const {
  std::vector<int> all(data_.size());
  std::iota(all.begin(), all.end(), 0);
  return BatchGradient(theta, all);
}

Eigen::VectorXd LogisticObjective::BatchGradient(
    const Eigen::VectorXd& theta, std::span<const int> batch) const {
  CheckDimension(*this, theta);
  if (batch.empty()) throw InvalidArgument("logistic: empty batch");
  const int rows = static_cast<int>(batch.size());
  Eigen::MatrixXd x(rows, features_);
  for (int r = 0; r < rows; ++r) x.row(r) = data_.features.row(batch[r]);
  const auto w = Weights(theta, classes_, features_);
  Eigen::MatrixXd probs = x * w.transpose();
  probs.rowwise() += theta.tail(classes_).transpose();
  SoftmaxRows(probs);
  for (int r = 0; r < rows; ++r) probs(r, data_.labels[batch[r]]) -= 1.0;

  Eigen::VectorXd grad(dimension());
  Eigen::Map<RowMajorMatrix>(grad.data(), classes_, features_) =
      probs.transpose() * x / rows;
  grad.tail(classes_) = probs.colwise().sum().transpose() / rows;
  if (l2_ > 0.0) grad += l2_ * theta;
  return grad;
}

Eigen::VectorXd ClassProbabilities(const Eigen::VectorXd& theta, int classes,
                                   const Eigen::VectorXd& x) {
  const int features = static_cast<int>(x.size());
  if (theta.size() != LogisticDimension(classes, features)) {
    throw InvalidArgument("logistic: parameter size mismatch");
  }
  Eigen::MatrixXd z =
      (Weights(theta, classes, features) * x + theta.tail(classes)).transpose();
  SoftmaxRows(z);
  return z.row(0).transpose();
}

Eigen::VectorXd SampleGradient(const Eigen::VectorXd& theta, int classes,
                               const Eigen::VectorXd& x, int label) {
  const int features = static_cast<int>(x.size());
  Eigen::VectorXd residual = ClassProbabilities(theta, classes, x);
  residual(label) -= 1.0;
  Eigen::VectorXd grad(LogisticDimension(classes, features));
  Eigen::Map<RowMajorMatrix>(grad.data(), classes, features) =
      residual * x.transpose();
  grad.tail(classes) = residual;
  return grad;
}

double Accuracy(const Eigen::VectorXd& theta, const Dataset& data) {
  if (data.size() == 0) return 0.0;
  const int classes = data.classes;
  const auto w = Weights(theta, classes, data.dim());
  Eigen::MatrixXd logits = data.features * w.transpose();
  logits.rowwise() += theta.tail(classes).transpose();
  int correct = 0;
  for (int r = 0; r < data.size(); ++r) {
    Eigen::Index best = 0;
    logits.row(r).maxCoeff(&best);
    if (best == data.labels[r]) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

CoordinateMap CoordinateMap::First(int m) {
  CoordinateMap map;
  map.indices.resize(m);
  std::iota(map.indices.begin(), map.indices.end(), 0);
  return map;
}

CoordinateMap CoordinateMap::Bias(int classes, int features, int m) {
  if (m > classes) throw InvalidArgument("coordinate map: m exceeds class count");
  CoordinateMap map;
  for (int c = 0; c < m; ++c) map.indices.push_back(BiasIndex(classes, features, c));
  return map;
}

PerturbedObjective::PerturbedObjective(ObjectivePtr base, Polynomial perturbation,
                                       CoordinateMap map)
    : base_(std::move(base)),
      perturbation_(std::move(perturbation)),
      map_(std::move(map)) {
  if (!base_) throw InvalidArgument("perturb: null base objective");
  if (static_cast<int>(map_.indices.size()) != perturbation_.num_vars()) {
    throw InvalidArgument("perturb: coordinate map size must equal the "
                          "polynomial's variable count");
  }
  std::set<int> seen;
  for (int idx : map_.indices) {
    if (idx < 0 || idx >= base_->dimension()) {
      throw InvalidArgument("perturb: coordinate " + std::to_string(idx) +
                            " out of range");
    }
    if (!seen.insert(idx).second) throw InvalidArgument("perturb: duplicate coordinate");
  }
}

Eigen::VectorXd PerturbedObjective::Gather(const Eigen::VectorXd& x) const {
  Eigen::VectorXd sub(map_.indices.size());
  for (std::size_t j = 0; j < map_.indices.size(); ++j) sub(j) = x(map_.indices[j]);
  return sub;
}

double PerturbedObjective::PerturbationValue(const Eigen::VectorXd& x) const {
  CheckDimension(*this, x);
  return perturbation_.Evaluate(Gather(x));
}

Eigen::VectorXd PerturbedObjective::PerturbationGradient(
    const Eigen::VectorXd& x) const {
  CheckDimension(*this, x);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(x.size());
  const Eigen::VectorXd g = perturbation_.Gradient(Gather(x));
  for (std::size_t j = 0; j < map_.indices.size(); ++j) full(map_.indices[j]) = g(j);
  return full;
}

double PerturbedObjective::Value(const Eigen::VectorXd& x) const {
  return base_->Value(x) + PerturbationValue(x);
}

Eigen::VectorXd PerturbedObjective::Gradient(const Eigen::VectorXd& x) const {
  return base_->Gradient(x) + PerturbationGradient(x);
}

Eigen::VectorXd PerturbedObjective::BatchGradient(
    const Eigen::VectorXd& x, std::span<const int> batch) const {
  return base_->BatchGradient(x, batch) + PerturbationGradient(x);
}

std::shared_ptr<const PerturbedObjective> Perturb(ObjectivePtr base,
                                                  Polynomial perturbation,
                                                  CoordinateMap map) {
  return std::make_shared<const PerturbedObjective>(
      std::move(base), std::move(perturbation), std::move(map));
}

}  // namespace efpsn
