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

// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// error, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "efpsn/attack.h"
#include "efpsn/config.h"
#include "efpsn/dp_accounting.h"
#include "efpsn/errors.h"
#include "efpsn/graph.h"
#include "efpsn/harness.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/paillier.h"
#include "efpsn/polybasis.h"
#include "efpsn/polynomial.h"
#include "efpsn/random.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out_dir;
};

efpsn::ExperimentConfig ResolveConfig(const GlobalOptions& g) {
  efpsn::ExperimentConfig cfg =
      g.config_path.empty() ? efpsn::ExperimentConfig{} : efpsn::LoadConfig(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
  cfg.Validate();
  return cfg;
}

void EmitJson(const json& j, const std::string& out_dir, const std::string& file) {
  if (out_dir.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::filesystem::create_directories(out_dir);
  const std::string path = (std::filesystem::path(out_dir) / file).string();
  std::ofstream out(path);
  if (!out) throw efpsn::Error("cannot write " + path);
  out << j.dump(2) << "\n";
  std::cout << "wrote " << path << "\n";
}

std::vector<double> ParseNumberList(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw efpsn::ConfigError("bad number '" + item + "'");
    }
  }
  return out;
}

int RunMain(int argc, char** argv) {
  CLI::App app{"Encrypted zero-sum functional perturbation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Root seed override");
  app.add_option("--out", g.out_dir, "Output directory");

  // keygen
  auto* keygen = app.add_subcommand("keygen", "Generate a Paillier keypair");
  unsigned bits = 512;
  bool random_g = false;
  keygen->add_option("--bits", bits, "Bits per prime")->capture_default_str();
  keygen->add_flag("--random-g", random_g, "Draw a random generator instead of f+1");

  // basis
  auto* basis = app.add_subcommand("basis", "Build an orthonormal polynomial system");
  efpsn::BasisParams bp{1, 1, 1, 0};
  std::string monomials;
  basis->add_option("--K", bp.max_degree, "Maximum total degree")->required();
  basis->add_option("--m", bp.num_vars, "Number of variables")->required();
  basis->add_option("--N", bp.num_elements, "Number of elements")->required();
  basis->add_option("--monomials", monomials, "Fixed monomial order, e.g. \"1,x2,x1^2*x2\"");

  // phase1
  auto* phase1 = app.add_subcommand("phase1", "Run the encrypted noise exchange once");
  double p1_gamma = 1.0;
  bool audit = false;
  phase1->add_option("--gamma", p1_gamma, "Noise magnitude")->capture_default_str();
  phase1->add_flag("--audit", audit, "Include the ciphertext transcript");

  auto* simulate = app.add_subcommand("simulate", "Run the accuracy experiment");
  auto* attack = app.add_subcommand("attack", "Run the privacy (gradient inversion) experiment");
  auto* report = app.add_subcommand("report", "Run both experiments and write one report");

  // dp-budget
  auto* dp = app.add_subcommand("dp-budget", "Closed-form privacy budget");
  efpsn::DPParams dpp;
  std::optional<double> dp_delta;
  std::optional<double> dp_a;
  std::string graph_spec = "path";
  int agents = 3;
  std::string f_diff = "1";
  dp->add_option("--gamma", dpp.gamma, "Noise magnitude")->capture_default_str();
  dp->add_option("--q", dpp.q, "Adjacency exponent")->capture_default_str();
  dp->add_option("--p", dpp.p_exp, "Noise decay exponent")->capture_default_str();
  auto* r_opt = dp->add_option("--R", dpp.R, "Tail parameter")->capture_default_str();
  dp->add_option("--delta", dp_delta, "Target delta (sets R)")->excludes(r_opt);
  dp->add_option("--graph", graph_spec, "Graph spec")->capture_default_str();
  dp->add_option("--n", agents, "Agent count")->capture_default_str();
  auto* fd_opt = dp->add_option("--f-diff", f_diff, "Coefficient difference, comma separated")
                     ->capture_default_str();
  dp->add_option("--A", dp_a, "Use this sensitivity aggregate directly")->excludes(fd_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  if (*keygen) {
    const uint64_t seed = g.seed.value_or(0);
    const efpsn::Keypair kp = efpsn::GenerateKeypair(
        bits, seed, random_g ? efpsn::GeneratorMode::kRandom : efpsn::GeneratorMode::kSimple);
    EmitJson(efpsn::KeypairToJson(kp), g.out_dir, "keypair.json");
  } else if (*basis) {
    bp.seed = g.seed.value_or(0);
    const efpsn::OrthonormalSystem sys =
        monomials.empty()
            ? efpsn::GenerateSystem(bp)
            : efpsn::GenerateSystemFromMonomials(
                  efpsn::ParseMonomialList(monomials, bp.num_vars), bp.max_degree);
    if (sys.size() != bp.num_elements) {
      throw efpsn::ConfigError("--N does not match the monomial list");
    }
    for (int k = 0; k < sys.size(); ++k) {
      std::cout << "e" << (k + 1) << " = " << sys.element(k).ToString() << "\n";
    }
    if (!g.out_dir.empty()) EmitJson(efpsn::SystemToJson(sys), g.out_dir, "basis.json");
  } else if (*phase1) {
    const efpsn::ExperimentConfig cfg = ResolveConfig(g);
    const efpsn::Network net = efpsn::MakeNetwork(cfg.graph.spec, cfg.graph.agents);
    const auto keyring = efpsn::GenerateKeyring(
        net.size(), cfg.noise.key_bits, efpsn::DeriveSeed(cfg.seed, {efpsn::stream::kKeygen}));
    efpsn::Phase1Options opts;
    opts.audit = audit;
    const auto coeffs = efpsn::RunPhase1(
        net, cfg.Noise(p1_gamma), keyring,
        efpsn::DeriveSeed(cfg.seed, {efpsn::stream::kNoiseShare}), opts);
    json rows = json::array();
    for (Eigen::Index i = 0; i < coeffs.eta_bar.rows(); ++i) {
      std::vector<double> row(coeffs.eta_bar.cols());
      for (Eigen::Index k = 0; k < coeffs.eta_bar.cols(); ++k) row[k] = coeffs.eta_bar(i, k);
      rows.push_back(row);
    }
    json out{{"gamma", p1_gamma},
             {"mode", efpsn::ZeroSumModeName(cfg.noise.mode)},
             {"precision", cfg.noise.precision},
             {"eta_bar", rows},
             {"column_sums", std::vector<double>(coeffs.eta_bar.cols())}};
    for (Eigen::Index k = 0; k < coeffs.eta_bar.cols(); ++k) {
      out["column_sums"][k] = coeffs.eta_bar.col(k).sum();
    }
    if (!coeffs.fixed_point.empty()) out["fixed_point"] = coeffs.fixed_point;
    if (coeffs.transcript) out["transcript"] = efpsn::TranscriptToJson(*coeffs.transcript);
    EmitJson(out, g.out_dir, "phase1.json");
  } else if (*simulate) {
    if (g.config_path.empty()) throw efpsn::ConfigError("simulate requires --config");
    const efpsn::ExperimentConfig cfg = ResolveConfig(g);
    efpsn::WriteReport(efpsn::RunAccuracyExperiment(cfg), cfg.output_dir, "accuracy");
    std::cout << "wrote " << cfg.output_dir << "/accuracy.{csv,json}\n";
  } else if (*attack) {
    const efpsn::ExperimentConfig cfg = ResolveConfig(g);
    const efpsn::RunReport rep = efpsn::RunPrivacyExperiment(
        cfg, (std::filesystem::path(cfg.output_dir) / "attack_images").string());
    efpsn::WriteReport(rep, cfg.output_dir, "privacy");
    std::cout << "wrote " << cfg.output_dir << "/privacy.{csv,json}\n";
  } else if (*report) {
    const efpsn::ExperimentConfig cfg = ResolveConfig(g);
    const efpsn::RunReport rep = efpsn::MergeReports(
        {{"accuracy", efpsn::RunAccuracyExperiment(cfg)},
         {"privacy", efpsn::RunPrivacyExperiment(cfg)}});
    efpsn::WriteReport(rep, cfg.output_dir, "report");
    std::cout << "wrote " << cfg.output_dir << "/report.{csv,json}\n";
  } else if (*dp) {
    const efpsn::Network net = efpsn::MakeNetwork(graph_spec, agents);
    if (dp_delta) dpp.R = efpsn::RForDelta(*dp_delta);
    try {
      dpp.Validate();
    } catch (const efpsn::InvalidArgument& e) {
      throw efpsn::ConfigError(e.what());
    }
    const double a = dp_a ? *dp_a : efpsn::ComputeA(ParseNumberList(f_diff), dpp);
    const efpsn::DPBudget b = efpsn::Budget(a, dpp.R, net.mu_low(), net.mu_high());
    EmitJson(json{{"epsilon", b.epsilon},
                  {"delta", b.delta},
                  {"A", b.A},
                  {"R", dpp.R},
                  {"mu_low", net.mu_low()},
                  {"mu_high", net.mu_high()}},
             g.out_dir, "dp_budget.json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return RunMain(argc, argv);
  } catch (const efpsn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
