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

#ifndef EFPSN_OBJECTIVES_H_
#define EFPSN_OBJECTIVES_H_

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "efpsn/dataset.h"
#include "efpsn/polynomial.h"

namespace efpsn {

// A smooth local cost f_i: R^M -> R. Implementations are immutable.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dimension() const = 0;
  virtual double Value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const = 0;

  // Sample count backing a stochastic gradient; 0 for deterministic costs.
  virtual int num_samples() const { return 0; }
  // Gradient over the given sample rows. Deterministic costs ignore `batch`.
  virtual Eigen::VectorXd BatchGradient(const Eigen::VectorXd& x,
                                        std::span<const int> batch) const {
    (void)batch;
    return Gradient(x);
  }
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// f(x) = 1/2 x^T Q x + b^T x with Q symmetric positive definite.
class QuadraticObjective : public Objective {
 public:
  // Throws InvalidArgument when Q is not SPD or shapes disagree.
  QuadraticObjective(Eigen::MatrixXd q, Eigen::VectorXd b);

  int dimension() const override { return static_cast<int>(b_.size()); }
  double Value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const override;

  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::VectorXd& b() const { return b_; }
  // -Q^-1 b.
  Eigen::VectorXd Minimizer() const;

 private:
  Eigen::MatrixXd q_;
  Eigen::VectorXd b_;
};

// Multinomial logistic regression: mean softmax cross-entropy over the
// dataset plus (l2 / 2) ||theta||^2. Parameters are the C x d weight matrix
// in row-major order followed by the C biases.
class LogisticObjective : public Objective {
 public:
  // Throws InvalidArgument on shape mismatch or out-of-range labels.
  explicit LogisticObjective(Dataset data, double l2 = 0.0);

  int dimension() const override { return classes_ * (features_ + 1); }
  double Value(const Eigen::VectorXd& theta) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& theta) const override;
  int num_samples() const override { return data_.size(); }
  Eigen::VectorXd BatchGradient(const Eigen::VectorXd& theta,
                                std::span<const int> batch) const override;

  int classes() const { return classes_; }
  int features() const { return features_; }
  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
  int classes_;
  int features_;
  double l2_;
};

int LogisticDimension(int classes, int features);
int WeightIndex(int features, int c, int f);
int BiasIndex(int classes, int features, int c);

// softmax(W x + b).
Eigen::VectorXd ClassProbabilities(const Eigen::VectorXd& theta, int classes,
                                   const Eigen::VectorXd& x);
// Single-sample cross-entropy gradient: (s - onehot(y)) [x^T, 1].
Eigen::VectorXd SampleGradient(const Eigen::VectorXd& theta, int classes,
                               const Eigen::VectorXd& x, int label);
// Fraction of rows classified correctly by argmax.
double Accuracy(const Eigen::VectorXd& theta, const Dataset& data);

// Which parameter coordinates a perturbation polynomial reads.
struct CoordinateMap {
  std::vector<int> indices;

  static CoordinateMap First(int m);
  // The first m class biases of a logistic model (last-layer bias preset).
  static CoordinateMap Bias(int classes, int features, int m);
};

// f_hat(x) = f(x) + p(x[map]).
class PerturbedObjective : public Objective {
 public:
  // Throws InvalidArgument unless the map has p.num_vars() distinct in-range
  // coordinates.
  PerturbedObjective(ObjectivePtr base, Polynomial perturbation,
                     CoordinateMap map);

  int dimension() const override { return base_->dimension(); }
  double Value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& x) const override;
  int num_samples() const override { return base_->num_samples(); }
  Eigen::VectorXd BatchGradient(const Eigen::VectorXd& x,
                                std::span<const int> batch) const override;

  const Objective& base() const { return *base_; }
  const ObjectivePtr& base_ptr() const { return base_; }
  const Polynomial& perturbation() const { return perturbation_; }
  const CoordinateMap& map() const { return map_; }

  double PerturbationValue(const Eigen::VectorXd& x) const;
  // Perturbation gradient scattered into the full dimension.
  Eigen::VectorXd PerturbationGradient(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd Gather(const Eigen::VectorXd& x) const;

  ObjectivePtr base_;
  Polynomial perturbation_;
  CoordinateMap map_;
};

std::shared_ptr<const PerturbedObjective> Perturb(ObjectivePtr base,
                                                  Polynomial perturbation,
                                                  CoordinateMap map);

}  // namespace efpsn

#endif  // EFPSN_OBJECTIVES_H_
