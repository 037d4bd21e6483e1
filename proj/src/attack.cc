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

#include "efpsn/attack.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <random>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kDivergenceNorm = 1e6;

Eigen::VectorXd Softmax(const Eigen::VectorXd& z) {
  Eigen::VectorXd e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::MatrixXd SoftmaxJacobian(const Eigen::VectorXd& s) {
  Eigen::MatrixXd j = -s * s.transpose();
  j.diagonal() += s;
  return j;
}

}  // namespace

LinearSoftmax LinearSoftmax::Random(int classes, int features, double scale,
                                    uint64_t seed) {
  LinearSoftmax model;
  model.classes = classes;
  model.features = features;
  model.theta.resize(LogisticDimension(classes, features));
  Rng rng = MakeRng(seed, {stream::kAttack, 0});
  std::normal_distribution<double> normal(0.0, scale);
  for (Eigen::Index i = 0; i < model.theta.size(); ++i) model.theta(i) = normal(rng);
  return model;
}

Eigen::VectorXd LinearSoftmax::Gradient(const Eigen::VectorXd& x, int label) const {
  if (x.size() != features) throw InvalidArgument("attack: input size mismatch");
  if (label < 0 || label >= classes) throw InvalidArgument("attack: bad label");
  return SampleGradient(theta, classes, x, label);
}

void AttackConfig::Validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("attack: alpha must be positive");
  if (iterations < 1) throw InvalidArgument("attack: need at least one iteration");
  if (snapshot_every < 0) throw InvalidArgument("attack: bad snapshot interval");
}

std::optional<int> IdlgLabel(const Eigen::VectorXd& bias_gradient) {
  std::optional<int> found;
  for (Eigen::Index c = 0; c < bias_gradient.size(); ++c) {
    if (bias_gradient(c) < 0.0) {
      if (found) return std::nullopt;
      found = static_cast<int>(c);
    }
  }
  return found;
}

AttackResult DlgAttack(const LinearSoftmax& model,
                       const Eigen::VectorXd& target_grad,
                       const AttackConfig& cfg,
                       const std::optional<Eigen::VectorXd>& truth) {
  cfg.Validate();
  const int c = model.classes;
  const int d = model.features;
  if (target_grad.size() != LogisticDimension(c, d) ||
      model.theta.size() != target_grad.size()) {
    throw InvalidArgument("attack: target gradient shape mismatch");
  }
  if (truth && truth->size() != d) throw InvalidArgument("attack: truth size mismatch");

  const Eigen::Map<const RowMajorMatrix> w(model.theta.data(), c, d);
  const Eigen::VectorXd bias = model.theta.tail(c);
  const Eigen::Map<const RowMajorMatrix> target_w(target_grad.data(), c, d);
  const Eigen::VectorXd target_b = target_grad.tail(c);

  Rng rng = MakeRng(cfg.seed, {stream::kAttack, 1});
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = normal(rng);
  Eigen::VectorXd y_logits(c);
  for (int i = 0; i < c; ++i) y_logits(i) = normal(rng);

  AttackResult out;
  const std::optional<int> known = IdlgLabel(target_b);
  out.label_from_signs = known.has_value();

  auto mse_of = [&](const Eigen::VectorXd& v) {
    return truth ? (v - *truth).squaredNorm() / d
                 : std::numeric_limits<double>::quiet_NaN();
  };

  auto evaluate = [&](Eigen::VectorXd* grad_x, Eigen::VectorXd* grad_y) {
    const Eigen::VectorXd s = Softmax(w * x + bias);
    Eigen::VectorXd label_dist;
    if (known) {
      label_dist = Eigen::VectorXd::Unit(c, *known);
    } else {
      label_dist = Softmax(y_logits);
    }
    const Eigen::VectorXd r = s - label_dist;
    const Eigen::MatrixXd res_w = r * x.transpose() - target_w;
    const Eigen::VectorXd res_b = r - target_b;
    const Eigen::VectorXd back = res_w * x + res_b;  // dD/dr / 2
    if (grad_x) {
      *grad_x = 2.0 * (res_w.transpose() * r + w.transpose() * (SoftmaxJacobian(s) * back));
    }
    if (grad_y && !known) {
      *grad_y = -2.0 * (SoftmaxJacobian(label_dist) * back);
    }
    return res_w.squaredNorm() + res_b.squaredNorm();
  };

  Eigen::VectorXd gx, gy;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double loss = evaluate(&gx, &gy);
    out.loss.push_back(loss);
    if (truth) out.mse.push_back(mse_of(x));
    if (cfg.snapshot_every > 0 && it % cfg.snapshot_every == 0) {
      out.snapshots.emplace_back(it, x);
    }
    Eigen::VectorXd next = x - cfg.alpha * gx;
    if (!std::isfinite(next.norm()) || next.norm() > kDivergenceNorm) {
      out.diverged = true;
      break;
    }
    x = std::move(next);
    if (!known) y_logits -= cfg.alpha * gy;
  }

  out.x = x;
  out.final_loss = evaluate(nullptr, nullptr);
  out.final_mse = mse_of(x);
  if (cfg.snapshot_every > 0) out.snapshots.emplace_back(cfg.iterations, x);
  if (known) {
    out.label = *known;
  } else {
    Eigen::Index best = 0;
    y_logits.maxCoeff(&best);
    out.label = static_cast<int>(best);
  }
  return out;
}

std::vector<SweepPoint> AttackUnderPerturbation(
    const LinearSoftmax& model, const Eigen::VectorXd& x, int label,
    const std::vector<double>& gammas, const PerturbationSetup& setup,
    const AttackConfig& cfg) {
  cfg.Validate();
  if (setup.agent < 0 || setup.agent >= setup.net.size()) {
    throw InvalidArgument("attack: bad agent index");
  }
  Dataset sample;
  sample.classes = model.classes;
  sample.features = x.transpose();
  sample.labels = {label};
  const ObjectivePtr base = std::make_shared<const LogisticObjective>(sample);

  auto run_one = [&](double gamma) {
    if (gamma < 0.0) throw InvalidArgument("attack: gamma must be >= 0");
    Eigen::VectorXd target = base->Gradient(model.theta);
    if (gamma > 0.0) {
      NoiseConfig noise = setup.noise;
      noise.gamma = gamma;
      const PerturbationCoefficients coeffs =
          setup.zero_sum ? RunPhase1(setup.net, noise, setup.keyring, setup.seed)
                         : NonzeroSumBaseline(setup.net.size(), noise, setup.seed);
      const Eigen::VectorXd row = coeffs.eta_bar.row(setup.agent);
      const Polynomial poly =
          Phi(CoefficientVector(row.data(), row.data() + row.size()), setup.basis);
      target = PerturbedObjective(base, poly, setup.map).Gradient(model.theta);
    }
    return SweepPoint{gamma, DlgAttack(model, target, cfg, x)};
  };

  std::vector<std::future<SweepPoint>> pending;
  for (double gamma : gammas) {
    pending.push_back(std::async(std::launch::async, run_one, gamma));
  }
  std::vector<SweepPoint> out;
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

void WritePgm(const Eigen::VectorXd& image, int side, const std::string& path) {
  if (image.size() != side * side) throw InvalidArgument("pgm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path);
  out << "P5\n" << side << " " << side << "\n255\n";
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    const double v = std::clamp(image(i), 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
}

}  // namespace efpsn
