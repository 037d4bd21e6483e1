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

#include "efpsn/harness.h"

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <sstream>

#include "efpsn/attack.h"
#include "efpsn/errors.h"
#include "efpsn/graph.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/objectives.h"
#include "efpsn/optimizer.h"
#include "efpsn/paillier.h"
#include "efpsn/polybasis.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

using nlohmann::json;

std::string FormatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Runs one pipeline stage, tagging failures with its name.
template <typename F>
auto Stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const StageFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw StageFailure(name, e.what());
  }
}

// Seeds for every random stage, all derived from the config.
struct SeedManifest {
  uint64_t root = 0;
  uint64_t dataset = 0;
  uint64_t basis = 0;
  uint64_t keyring = 0;
  uint64_t phase1 = 0;
  uint64_t baseline = 0;
  uint64_t optimizer = 0;
  uint64_t attack = 0;

  explicit SeedManifest(const ExperimentConfig& cfg)
      : root(cfg.seed),
        dataset(cfg.objective.dataset_seed),
        basis(cfg.basis.seed),
        keyring(DeriveSeed(cfg.seed, {stream::kKeygen})),
        phase1(DeriveSeed(cfg.seed, {stream::kNoiseShare})),
        baseline(DeriveSeed(cfg.seed, {stream::kBaseline})),
        optimizer(cfg.optimizer.seed),
        attack(cfg.attack.attack.seed) {}

  json ToJson() const {
    return json{{"root", root},         {"dataset", dataset},
                {"basis", basis},       {"keyring", keyring},
                {"phase1", phase1},     {"baseline", baseline},
                {"optimizer", optimizer}, {"attack", attack}};
  }
};

OrthonormalSystem BuildBasis(const BasisSection& b) {
  if (b.monomials.empty()) {
    return GenerateSystem(BasisParams{b.max_degree, b.num_vars, b.num_elements, b.seed});
  }
  std::vector<Exponent> monomials;
  for (const auto& text : b.monomials) monomials.push_back(ParseMonomial(text, b.num_vars));
  return GenerateSystemFromMonomials(monomials, b.max_degree);
}

// The unperturbed decentralized problem shared by all algorithms.
struct Problem {
  Network net;
  std::vector<ObjectivePtr> base;
  std::optional<Dataset> test;
  OrthonormalSystem basis;
  CoordinateMap map;
  Eigen::VectorXd x_star;
};

std::vector<ObjectivePtr> QuadraticFamily(const ExperimentConfig& cfg,
                                          std::vector<std::shared_ptr<const QuadraticObjective>>* typed) {
  const int d = cfg.objective.quadratic_dim;
  std::vector<ObjectivePtr> out;
  for (int i = 0; i < cfg.graph.agents; ++i) {
    Rng rng = MakeRng(cfg.objective.dataset_seed,
                      {stream::kDataset, 10, static_cast<uint64_t>(i)});
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd center(d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) a(r, c) = normal(rng);
      center(r) = cfg.objective.quadratic_spread * normal(rng);
    }
    Eigen::MatrixXd q = a.transpose() * a / d;
    q.diagonal().array() += 0.5;
    q = 0.5 * (q + q.transpose()).eval();
    auto f = std::make_shared<const QuadraticObjective>(q, -q * center);
    typed->push_back(f);
    out.push_back(f);
  }
  return out;
}

Problem BuildProblem(const ExperimentConfig& cfg) {
  Problem p;
  p.net = Stage("graph", [&] { return MakeNetwork(cfg.graph.spec, cfg.graph.agents); });
  const bool logistic = cfg.objective.family == "logistic";
  std::vector<std::shared_ptr<const QuadraticObjective>> quadratics;
  p.base = Stage("objectives", [&] {
    if (!logistic) return QuadraticFamily(cfg, &quadratics);
    const Dataset all = GaussianMixture(cfg.objective.mixture, cfg.objective.dataset_seed);
    auto [train, test] =
        TrainTestSplit(all, cfg.objective.test_fraction, cfg.objective.dataset_seed);
    p.test = std::move(test);
    std::vector<ObjectivePtr> out;
    for (Dataset& shard : SplitEvenly(train, cfg.graph.agents, cfg.objective.dataset_seed)) {
      out.push_back(std::make_shared<const LogisticObjective>(std::move(shard), cfg.objective.l2));
    }
    return out;
  });
  p.basis = Stage("basis", [&] { return BuildBasis(cfg.basis); });
  p.map = Stage("coordinate_map", [&] {
    if (logistic && cfg.basis.coordinate_map == "bias") {
      return CoordinateMap::Bias(cfg.objective.mixture.classes,
                                 cfg.objective.mixture.features, cfg.basis.num_vars);
    }
    return CoordinateMap::First(cfg.basis.num_vars);
  });
  p.x_star = Stage("reference", [&] {
    if (!logistic) return QuadraticOptimum(quadratics);
    const double rate = cfg.optimizer.reference_rate;
    CentralizedOptions opts;
    opts.grad_tol = cfg.optimizer.reference_grad_tol;
    return CentralizedGd(p.base, Schedule{rate, 0, rate, cfg.optimizer.reference_steps}, opts);
  });
  return p;
}

std::vector<ObjectivePtr> PerturbAll(const Problem& p, const Eigen::MatrixXd& eta_bar) {
  std::vector<ObjectivePtr> out;
  for (int i = 0; i < p.net.size(); ++i) {
    const Eigen::VectorXd row = eta_bar.row(i);
    out.push_back(Perturb(p.base[i],
                          Phi(CoefficientVector(row.data(), row.data() + row.size()), p.basis),
                          p.map));
  }
  return out;
}

struct RunResult {
  std::vector<ReportRow> rows;
  json final_metrics;
};

RunResult OptimizeAndMeasure(const ExperimentConfig& cfg, const Problem& p,
                             const std::vector<ObjectivePtr>& objectives,
                             const std::string& algorithm, double gamma) {
  RunResult out;
  const std::string run_id = "accuracy";
  auto push = [&](int step, const std::string& metric, double value) {
    out.rows.push_back({run_id, algorithm, gamma, step, metric, value});
  };
  DsgdOptions opts;
  opts.batch_size = cfg.optimizer.batch_size;
  opts.seed = cfg.optimizer.seed;
  opts.record_every = cfg.optimizer.record_every;
  Trajectory traj;
  try {
    traj = Dsgd(p.net, objectives, cfg.optimizer.schedule, opts);
  } catch (const Divergence& e) {
    push(0, "diverged", 1.0);
    out.final_metrics = {{"algorithm", algorithm}, {"gamma", gamma}, {"diverged", true}};
    return out;
  }
  json last;
  for (const AgentState& state : traj.states) {
    const Eigen::VectorXd mean = state.Mean();
    double loss = 0.0;
    for (const auto& f : p.base) loss += f->Value(mean);
    loss /= p.base.size();
    const double deviation = Deviation(state, p.x_star);
    const double grad_norm = AvgGradientNorm(state, p.base);
    push(state.step, "deviation", deviation);
    push(state.step, "avg_gradient_norm", grad_norm);
    push(state.step, "loss", loss);
    last = {{"algorithm", algorithm}, {"gamma", gamma},
            {"step", state.step},     {"deviation", deviation},
            {"avg_gradient_norm", grad_norm}, {"loss", loss}};
    if (p.test) {
      const double acc = Accuracy(mean, *p.test);
      push(state.step, "accuracy", acc);
      last["accuracy"] = acc;
    }
  }
  out.final_metrics = last;
  return out;
}

json Envelope(const ExperimentConfig& cfg, const std::string& kind) {
  return json{{"schema_version", kReportSchemaVersion},
              {"experiment", kind},
              {"config", ConfigToJson(cfg)},
              {"seed_manifest", SeedManifest(cfg).ToJson()}};
}

// Trial-0 reconstructions as PGM files plus a (gamma, iteration, D, MSE) trace.
void ExportAttackArtifacts(const std::vector<SweepPoint>& points, bool zero_sum,
                           int side, const std::string& dir) {
  const std::string tag = zero_sum ? "efpsn" : "nonzerosum";
  const std::filesystem::path base(dir);
  std::ofstream trace(base / ("attack_trace_" + tag + ".csv"), std::ios::binary);
  if (!trace) throw Error("report: cannot write attack trace into '" + dir + "'");
  trace << "gamma,iteration,loss,mse\n";
  for (const SweepPoint& p : points) {
    const std::string g = FormatNumber(p.gamma);
    for (std::size_t it = 0; it < p.result.loss.size(); ++it) {
      trace << g << ',' << it << ',' << FormatNumber(p.result.loss[it]) << ','
            << FormatNumber(p.result.mse[it]) << '\n';
    }
    for (const auto& [it, image] : p.result.snapshots) {
      WritePgm(image, side,
               (base / (tag + "_gamma_" + g + "_iter_" + std::to_string(it) + ".pgm")).string());
    }
  }
}

double SecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double RunReport::Find(const std::string& algorithm, double gamma,
                       const std::string& metric) const {
  double value = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.algorithm == algorithm && row.gamma == gamma && row.metric == metric) {
      value = row.value;
    }
  }
  return value;
}

RunReport RunAccuracyExperiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Stage("config", [&] { cfg.Validate(); });
  const SeedManifest seeds(cfg);
  const Problem problem = BuildProblem(cfg);
  const int n = problem.net.size();
  const std::vector<Keypair> keyring = Stage("keygen", [&] {
    return GenerateKeyring(n, cfg.noise.key_bits, seeds.keyring);
  });

  const RunResult noise_free = Stage("noisefree", [&] {
    return OptimizeAndMeasure(cfg, problem, problem.base, "noisefree", 0.0);
  });

  // The same Phase I and baseline seeds are used for every gamma, so the
  // sweep compares one noise realization at different scales.
  auto run_gamma = [&](double gamma) {
    std::vector<RunResult> results;
    if (gamma == 0.0) {
      for (const char* alg : {"efpsn", "nonzerosum", "noisefree"}) {
        results.push_back(Stage(alg, [&] {
          return OptimizeAndMeasure(cfg, problem, problem.base, alg, gamma);
        }));
      }
      return results;
    }
    const NoiseConfig noise = cfg.Noise(gamma);
    const PerturbationCoefficients zero_sum = Stage("phase1", [&] {
      return RunPhase1(problem.net, noise, keyring, seeds.phase1);
    });
    results.push_back(Stage("efpsn", [&] {
      return OptimizeAndMeasure(cfg, problem, PerturbAll(problem, zero_sum.eta_bar),
                                "efpsn", gamma);
    }));
    const PerturbationCoefficients independent = Stage("baseline", [&] {
      return NonzeroSumBaseline(n, noise, seeds.baseline);
    });
    results.push_back(Stage("nonzerosum", [&] {
      return OptimizeAndMeasure(cfg, problem, PerturbAll(problem, independent.eta_bar),
                                "nonzerosum", gamma);
    }));
    RunResult reference = noise_free;
    for (auto& row : reference.rows) row.gamma = gamma;
    reference.final_metrics["gamma"] = gamma;
    results.push_back(std::move(reference));
    return results;
  };

  std::vector<std::future<std::vector<RunResult>>> pending;
  for (double gamma : cfg.noise.gammas) {
    pending.push_back(std::async(std::launch::async, run_gamma, gamma));
  }
  RunReport report;
  report.summary = Envelope(cfg, "accuracy");
  json finals = json::array();
  for (auto& job : pending) {
    for (RunResult& r : job.get()) {
      report.rows.insert(report.rows.end(), r.rows.begin(), r.rows.end());
      finals.push_back(r.final_metrics);
    }
  }
  report.summary["final"] = finals;
  report.summary["x_star_norm"] = problem.x_star.norm();
  report.summary["mu_low"] = problem.net.mu_low();
  report.summary["mu_high"] = problem.net.mu_high();
  report.summary["wall_clock_seconds"] = SecondsSince(start);
  return report;
}

RunReport RunPrivacyExperiment(const ExperimentConfig& cfg,
                                const std::string& artifact_dir) {
  const auto start = std::chrono::steady_clock::now();
  Stage("config", [&] { cfg.Validate(); });
  const SeedManifest seeds(cfg);
  const Network net =
      Stage("graph", [&] { return MakeNetwork(cfg.graph.spec, cfg.graph.agents); });
  const OrthonormalSystem basis = Stage("basis", [&] { return BuildBasis(cfg.attack.basis); });
  const std::vector<Keypair> keyring = Stage("keygen", [&] {
    return GenerateKeyring(net.size(), cfg.noise.key_bits, seeds.keyring);
  });

  RunReport report;
  report.summary = Envelope(cfg, "privacy");
  json budgets = json::array();
  for (double gamma : cfg.noise.gammas) {
    if (gamma == 0.0) continue;
    const DPBudget b = Stage("dp_budget", [&] {
      return Budget(ComputeA(cfg.dp.f_diff, cfg.Dp(gamma)), cfg.dp.R, net.mu_low(),
                    net.mu_high());
    });
    report.rows.push_back({"privacy", "efpsn", gamma, 0, "epsilon", b.epsilon});
    report.rows.push_back({"privacy", "efpsn", gamma, 0, "delta", b.delta});
    report.rows.push_back({"privacy", "efpsn", gamma, 0, "A", b.A});
    budgets.push_back({{"gamma", gamma}, {"epsilon", b.epsilon}, {"delta", b.delta}, {"A", b.A}});
  }

  const auto& att = cfg.attack;
  const int side = att.side;
  const Dataset images = Stage("images", [&] {
    return SyntheticImages(att.classes, att.trials, att.image_noise,
                           DeriveSeed(seeds.root, {stream::kAttack, 0}), side);
  });
  std::vector<double> sweep = {0.0};
  for (double g : cfg.noise.gammas) {
    if (g > 0.0) sweep.push_back(g);
  }

  // mse_sum[algorithm][gamma index]
  std::vector<double> efpsn_sum(sweep.size(), 0.0);
  std::vector<double> nonzero_sum(sweep.size(), 0.0);
  for (int t = 0; t < att.trials; ++t) {
    const LinearSoftmax model = LinearSoftmax::Random(
        att.classes, side * side, att.model_scale,
        DeriveSeed(seeds.root, {stream::kAttack, 1, static_cast<uint64_t>(t)}));
    PerturbationSetup setup;
    setup.net = net;
    setup.noise = cfg.Noise(1.0);
    setup.noise.n_terms = basis.size();
    setup.basis = basis;
    setup.map = Stage("coordinate_map", [&] {
      return att.basis.coordinate_map == "bias"
                 ? CoordinateMap::Bias(att.classes, side * side, att.basis.num_vars)
                 : CoordinateMap::First(att.basis.num_vars);
    });
    setup.keyring = keyring;
    setup.seed = DeriveSeed(seeds.root, {stream::kAttack, 2, static_cast<uint64_t>(t)});
    AttackConfig acfg = att.attack;
    acfg.seed = DeriveSeed(seeds.attack, {static_cast<uint64_t>(t)});
    const bool export_trial = t == 0 && !artifact_dir.empty();
    if (export_trial && acfg.snapshot_every == 0) acfg.snapshot_every = 40;
    const Eigen::VectorXd x = images.features.row(t).transpose();
    const int label = images.labels[t];
    if (export_trial) {
      std::filesystem::create_directories(artifact_dir);
      WritePgm(x, side, (std::filesystem::path(artifact_dir) / "truth.pgm").string());
    }

    for (bool zero_sum : {true, false}) {
      setup.zero_sum = zero_sum;
      const std::vector<SweepPoint> points = Stage("attack", [&] {
        return AttackUnderPerturbation(model, x, label, sweep, setup, acfg);
      });
      if (export_trial) ExportAttackArtifacts(points, zero_sum, side, artifact_dir);
      for (std::size_t g = 0; g < points.size(); ++g) {
        const double gamma = points[g].gamma;
        if (gamma == 0.0 && !zero_sum) continue;  // identical to the zero-sum run
        const std::string alg =
            gamma == 0.0 ? "noisefree" : (zero_sum ? "efpsn" : "nonzerosum");
        const std::string run_id = "privacy/trial_" + std::to_string(t);
        const AttackResult& r = points[g].result;
        report.rows.push_back({run_id, alg, gamma, acfg.iterations, "attack_mse", r.final_mse});
        report.rows.push_back({run_id, alg, gamma, acfg.iterations, "attack_loss", r.final_loss});
        report.rows.push_back({run_id, alg, gamma, acfg.iterations, "label_correct",
                               r.label == label ? 1.0 : 0.0});
        (zero_sum ? efpsn_sum : nonzero_sum)[g] += r.final_mse;
      }
    }
  }

  json attack_summary = json::array();
  for (std::size_t g = 0; g < sweep.size(); ++g) {
    const double gamma = sweep[g];
    const double mean_efpsn = efpsn_sum[g] / att.trials;
    if (gamma == 0.0) {
      report.rows.push_back({"privacy", "noisefree", gamma, att.attack.iterations,
                             "attack_mse_mean", mean_efpsn});
      attack_summary.push_back({{"algorithm", "noisefree"}, {"gamma", gamma}, {"mse", mean_efpsn}});
      continue;
    }
    const double mean_nonzero = nonzero_sum[g] / att.trials;
    report.rows.push_back({"privacy", "efpsn", gamma, att.attack.iterations,
                           "attack_mse_mean", mean_efpsn});
    report.rows.push_back({"privacy", "nonzerosum", gamma, att.attack.iterations,
                           "attack_mse_mean", mean_nonzero});
    attack_summary.push_back({{"algorithm", "efpsn"}, {"gamma", gamma}, {"mse", mean_efpsn}});
    attack_summary.push_back({{"algorithm", "nonzerosum"}, {"gamma", gamma}, {"mse", mean_nonzero}});
  }
  report.summary["budgets"] = budgets;
  report.summary["attack"] = attack_summary;
  report.summary["mu_low"] = net.mu_low();
  report.summary["mu_high"] = net.mu_high();
  report.summary["wall_clock_seconds"] = SecondsSince(start);
  return report;
}

RunReport MergeReports(const std::vector<std::pair<std::string, RunReport>>& parts) {
  RunReport out;
  out.summary = json{{"schema_version", kReportSchemaVersion}, {"sections", json::object()}};
  for (const auto& [name, part] : parts) {
    out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
    out.summary["sections"][name] = part.summary;
  }
  return out;
}

std::string ReportCsv(const RunReport& report) {
  std::ostringstream out;
  out << "run_id,algorithm,gamma,step,metric,value\n";
  for (const auto& row : report.rows) {
    out << row.run_id << ',' << row.algorithm << ',' << FormatNumber(row.gamma) << ','
        << row.step << ',' << row.metric << ',' << FormatNumber(row.value) << '\n';
  }
  return out.str();
}

void WriteReport(const RunReport& report, const std::string& dir,
                 const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("report: cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base = std::filesystem::path(dir) / stem;
  std::ofstream csv(base.string() + ".csv", std::ios::binary);
  std::ofstream js(base.string() + ".json");
  if (!csv || !js) throw Error("report: cannot write into '" + dir + "'");
  csv << ReportCsv(report);
  js << report.summary.dump(2) << "\n";
}

}  // namespace efpsn
