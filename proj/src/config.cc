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

#include "efpsn/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "efpsn/errors.h"

namespace efpsn {
namespace {

using nlohmann::json;

// Reads known keys from one JSON object and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(name_ + ": unknown key '" + key + "'");
    }
  }

  const std::string& name() const { return name_; }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError("config: " + message);
}

void ValidateBasis(const BasisSection& b, const std::string& where) {
  Require(b.max_degree >= 0 && b.num_vars >= 1 && b.num_elements >= 1,
          where + " needs K >= 0, m >= 1, N >= 1");
  Require(b.coordinate_map == "bias" || b.coordinate_map == "first",
          where + ".coordinate_map must be 'bias' or 'first'");
  Require(b.monomials.empty() ||
              static_cast<int>(b.monomials.size()) == b.num_elements,
          where + ".monomials must list exactly N monomials");
  if (b.monomials.empty()) {
    // Monomials of total degree <= K in m variables: C(K + m, m).
    double available = 1.0;
    for (int i = 1; i <= b.num_vars; ++i) {
      available = available * (b.max_degree + i) / i;
    }
    Require(b.num_elements <= available,
            where + ".N exceeds the number of monomials of degree <= K");
  }
}

json BasisToJson(const BasisSection& b) {
  return json{{"K", b.max_degree},       {"m", b.num_vars},
              {"N", b.num_elements},     {"seed", b.seed},
              {"monomials", b.monomials}, {"coordinate_map", b.coordinate_map}};
}

void ReadBasis(const json& j, const std::string& where, BasisSection& b) {
  Section s(j, where);
  s.Get("K", b.max_degree);
  s.Get("m", b.num_vars);
  s.Get("N", b.num_elements);
  s.Get("seed", b.seed);
  s.Get("monomials", b.monomials);
  s.Get("coordinate_map", b.coordinate_map);
  s.Finish();
}

}  // namespace

void ExperimentConfig::Validate() const {
  Require(schema_version == kConfigSchemaVersion,
          "unsupported schema_version " + std::to_string(schema_version));
  Require(graph.agents >= 1, "graph.agents must be >= 1");
  Require(objective.family == "logistic" || objective.family == "quadratic",
          "objective.family must be 'logistic' or 'quadratic'");
  Require(objective.mixture.classes >= 2, "objective.classes must be >= 2");
  Require(objective.mixture.features >= 1, "objective.features must be >= 1");
  Require(objective.mixture.samples >= graph.agents * 2,
          "objective.samples too small for the agent count");
  Require(objective.l2 >= 0.0, "objective.l2 must be >= 0");
  Require(objective.test_fraction > 0.0 && objective.test_fraction < 1.0,
          "objective.test_fraction must be in (0, 1)");
  Require(objective.quadratic_dim >= 1, "objective.quadratic_dim must be >= 1");
  Require(!noise.gammas.empty(), "noise.gammas must not be empty");
  for (double g : noise.gammas) {
    Require(std::isfinite(g) && g >= 0.0, "noise.gammas entries must be >= 0");
  }
  Require(noise.precision >= 1 && noise.precision <= 18,
          "noise.precision must be in [1, 18]");
  Require(noise.key_bits >= 16, "noise.key_bits must be >= 16");
  ValidateBasis(basis, "basis");
  ValidateBasis(attack.basis, "attack.basis");
  try {
    optimizer.schedule.Validate();
    Dp(1.0).Validate();
    attack.attack.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Require(optimizer.reference_rate > 0.0 && optimizer.reference_steps >= 1,
          "optimizer reference run needs a positive rate and steps");
  Require(static_cast<int>(dp.f_diff.size()) <= basis.num_elements,
          "dp.f_diff longer than basis.num_elements");
  Require(attack.trials >= 1 && attack.side >= 2 && attack.classes >= 2,
          "attack needs trials >= 1, side >= 2, classes >= 2");
  const int attack_dim = attack.classes * (attack.side * attack.side + 1);
  Require(attack.basis.num_vars <= (attack.basis.coordinate_map == "bias"
                                        ? attack.classes
                                        : attack_dim),
          "attack.basis.m exceeds the perturbable coordinates");
  Require(!output_dir.empty(), "output_dir must not be empty");
}

NoiseConfig ExperimentConfig::Noise(double gamma) const {
  NoiseConfig out;
  out.gamma = gamma;
  out.p_exp = noise.p_exp;
  out.n_terms = basis.num_elements;
  out.precision = noise.precision;
  out.mode = noise.mode;
  return out;
}

DPParams ExperimentConfig::Dp(double gamma) const {
  return DPParams{dp.q, noise.p_exp, gamma, dp.R};
}

BasisParams ExperimentConfig::Basis() const {
  return BasisParams{basis.max_degree, basis.num_vars, basis.num_elements,
                     basis.seed};
}

json ConfigToJson(const ExperimentConfig& cfg) {
  const auto& s = cfg.optimizer.schedule;
  const auto& a = cfg.attack.attack;
  return json{
      {"schema_version", cfg.schema_version},
      {"seed", cfg.seed},
      {"graph", {{"spec", cfg.graph.spec}, {"agents", cfg.graph.agents}}},
      {"objective",
       {{"family", cfg.objective.family},
        {"dataset_seed", cfg.objective.dataset_seed},
        {"classes", cfg.objective.mixture.classes},
        {"features", cfg.objective.mixture.features},
        {"samples", cfg.objective.mixture.samples},
        {"separation", cfg.objective.mixture.separation},
        {"noise_sd", cfg.objective.mixture.noise_sd},
        {"l2", cfg.objective.l2},
        {"test_fraction", cfg.objective.test_fraction},
        {"quadratic_dim", cfg.objective.quadratic_dim},
        {"quadratic_spread", cfg.objective.quadratic_spread}}},
      {"noise",
       {{"gammas", cfg.noise.gammas},
        {"p_exp", cfg.noise.p_exp},
        {"precision", cfg.noise.precision},
        {"mode", ZeroSumModeName(cfg.noise.mode)},
        {"key_bits", cfg.noise.key_bits}}},
      {"basis", BasisToJson(cfg.basis)},
      {"optimizer",
       {{"initial_rate", s.initial_rate},
        {"hold_steps", s.hold_steps},
        {"final_rate", s.final_rate},
        {"total_steps", s.total_steps},
        {"batch_size", cfg.optimizer.batch_size},
        {"seed", cfg.optimizer.seed},
        {"record_every", cfg.optimizer.record_every},
        {"reference_rate", cfg.optimizer.reference_rate},
        {"reference_steps", cfg.optimizer.reference_steps},
        {"reference_grad_tol", cfg.optimizer.reference_grad_tol}}},
      {"dp", {{"q", cfg.dp.q}, {"R", cfg.dp.R}, {"f_diff", cfg.dp.f_diff}}},
      {"attack",
       {{"alpha", a.alpha},
        {"iterations", a.iterations},
        {"seed", a.seed},
        {"snapshot_every", a.snapshot_every},
        {"trials", cfg.attack.trials},
        {"side", cfg.attack.side},
        {"classes", cfg.attack.classes},
        {"image_noise", cfg.attack.image_noise},
        {"model_scale", cfg.attack.model_scale},
        {"basis", BasisToJson(cfg.attack.basis)}}},
      {"output_dir", cfg.output_dir},
  };
}

ExperimentConfig ConfigFromJson(const json& j) {
  ExperimentConfig cfg;
  Section root(j, "config");
  root.Get("schema_version", cfg.schema_version);
  root.Get("seed", cfg.seed);
  root.Get("output_dir", cfg.output_dir);

  if (const json* g = root.Child("graph")) {
    Section s(*g, "graph");
    s.Get("spec", cfg.graph.spec);
    s.Get("agents", cfg.graph.agents);
    s.Finish();
  }
  if (const json* o = root.Child("objective")) {
    Section s(*o, "objective");
    auto& obj = cfg.objective;
    s.Get("family", obj.family);
    s.Get("dataset_seed", obj.dataset_seed);
    s.Get("classes", obj.mixture.classes);
    s.Get("features", obj.mixture.features);
    s.Get("samples", obj.mixture.samples);
    s.Get("separation", obj.mixture.separation);
    s.Get("noise_sd", obj.mixture.noise_sd);
    s.Get("l2", obj.l2);
    s.Get("test_fraction", obj.test_fraction);
    s.Get("quadratic_dim", obj.quadratic_dim);
    s.Get("quadratic_spread", obj.quadratic_spread);
    s.Finish();
  }
  if (const json* n = root.Child("noise")) {
    Section s(*n, "noise");
    s.Get("gammas", cfg.noise.gammas);
    s.Get("p_exp", cfg.noise.p_exp);
    s.Get("precision", cfg.noise.precision);
    std::string mode = ZeroSumModeName(cfg.noise.mode);
    s.Get("mode", mode);
    cfg.noise.mode = ParseZeroSumMode(mode);
    s.Get("key_bits", cfg.noise.key_bits);
    s.Finish();
  }
  if (const json* b = root.Child("basis")) ReadBasis(*b, "basis", cfg.basis);
  if (const json* o = root.Child("optimizer")) {
    Section s(*o, "optimizer");
    auto& opt = cfg.optimizer;
    s.Get("initial_rate", opt.schedule.initial_rate);
    s.Get("hold_steps", opt.schedule.hold_steps);
    s.Get("final_rate", opt.schedule.final_rate);
    s.Get("total_steps", opt.schedule.total_steps);
    s.Get("batch_size", opt.batch_size);
    s.Get("seed", opt.seed);
    s.Get("record_every", opt.record_every);
    s.Get("reference_rate", opt.reference_rate);
    s.Get("reference_steps", opt.reference_steps);
    s.Get("reference_grad_tol", opt.reference_grad_tol);
    s.Finish();
  }
  if (const json* d = root.Child("dp")) {
    Section s(*d, "dp");
    s.Get("q", cfg.dp.q);
    s.Get("R", cfg.dp.R);
    s.Get("f_diff", cfg.dp.f_diff);
    s.Finish();
  }
  if (const json* a = root.Child("attack")) {
    Section s(*a, "attack");
    auto& att = cfg.attack;
    s.Get("alpha", att.attack.alpha);
    s.Get("iterations", att.attack.iterations);
    s.Get("seed", att.attack.seed);
    s.Get("snapshot_every", att.attack.snapshot_every);
    s.Get("trials", att.trials);
    s.Get("side", att.side);
    s.Get("classes", att.classes);
    s.Get("image_noise", att.image_noise);
    s.Get("model_scale", att.model_scale);
    if (const json* b = s.Child("basis")) ReadBasis(*b, "attack.basis", att.basis);
    s.Finish();
  }
  root.Finish();
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
  return ConfigFromJson(j);
}

void SaveConfig(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("config: cannot write '" + path + "'");
  out << ConfigToJson(cfg).dump(2) << "\n";
}

}  // namespace efpsn
