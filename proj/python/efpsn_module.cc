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

// Python bindings for the main operations.

#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "efpsn/attack.h"
#include "efpsn/config.h"
#include "efpsn/dp_accounting.h"
#include "efpsn/errors.h"
#include "efpsn/graph.h"
#include "efpsn/harness.h"
#include "efpsn/noise_protocol.h"
#include "efpsn/paillier.h"
#include "efpsn/polybasis.h"

namespace py = pybind11;

namespace {

py::int_ ToPy(const efpsn::BigInt& v) {
  return py::int_(py::module_::import("builtins").attr("int")(v.get_str()));
}

efpsn::BigInt FromPy(const py::int_& v) {
  const std::string text = py::str(py::handle(v));
  return efpsn::BigInt(text);
}

efpsn::Ciphertext MakeCiphertext(const efpsn::Keypair& kp, const py::int_& value) {
  return efpsn::Ciphertext{FromPy(value), kp.pub.tag};
}

py::dict ReportToPy(const efpsn::RunReport& report) {
  py::dict out;
  out["csv"] = efpsn::ReportCsv(report);
  out["summary"] = report.summary.dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Encrypted zero-sum functional perturbation core";
  py::register_exception<efpsn::Error>(m, "Error");

  py::class_<efpsn::Keypair>(m, "Keypair")
      .def_property_readonly("f", [](const efpsn::Keypair& kp) { return ToPy(kp.f()); })
      .def_property_readonly("g", [](const efpsn::Keypair& kp) { return ToPy(kp.pub.g); })
      .def_property_readonly("bit_length", [](const efpsn::Keypair& kp) { return kp.bit_length; })
      .def("to_json", [](const efpsn::Keypair& kp) { return efpsn::KeypairToJson(kp).dump(); });

  m.def("generate_keypair",
        [](unsigned bits, uint64_t seed) { return efpsn::GenerateKeypair(bits, seed); },
        py::arg("bits"), py::arg("seed") = 0,
        "Deterministic Paillier keypair with `bits`-bit primes.");

  m.def("encrypt",
        [](const efpsn::Keypair& kp, const py::int_& plaintext, uint64_t seed) {
          gmp_randclass rng(gmp_randinit_mt);
          rng.seed(efpsn::BigInt(static_cast<unsigned long>(seed)));
          const efpsn::BigInt r = efpsn::SampleNonce(kp.pub, rng);
          const auto c = efpsn::Encrypt(efpsn::EncodeSigned(FromPy(plaintext), kp.f()),
                                        kp.pub, r);
          return ToPy(c.value);
        },
        py::arg("keypair"), py::arg("plaintext"), py::arg("seed") = 0,
        "Encrypts a signed integer with |v| < f/2.");

  m.def("decrypt",
        [](const efpsn::Keypair& kp, const py::int_& ciphertext) {
          return ToPy(efpsn::DecodeSigned(efpsn::Decrypt(MakeCiphertext(kp, ciphertext), kp),
                                          kp.f()));
        },
        py::arg("keypair"), py::arg("ciphertext"));

  m.def("homomorphic_add",
        [](const efpsn::Keypair& kp, const std::vector<py::int_>& ciphertexts) {
          std::vector<efpsn::Ciphertext> cs;
          for (const auto& c : ciphertexts) cs.push_back(MakeCiphertext(kp, c));
          return ToPy(efpsn::HomomorphicAdd(cs, kp.pub).value);
        },
        py::arg("keypair"), py::arg("ciphertexts"));

  m.def("build_basis",
        [](int k, int vars, int n, uint64_t seed, const std::string& monomials) {
          const efpsn::OrthonormalSystem sys =
              monomials.empty()
                  ? efpsn::GenerateSystem(efpsn::BasisParams{k, vars, n, seed})
                  : efpsn::GenerateSystemFromMonomials(
                        efpsn::ParseMonomialList(monomials, vars), k);
          std::vector<std::string> elements;
          for (const auto& e : sys.elements()) elements.push_back(e.ToString(6));
          py::dict out;
          out["elements"] = elements;
          out["gram"] = sys.GramMatrix();
          return out;
        },
        py::arg("K"), py::arg("m"), py::arg("N"), py::arg("seed") = 0,
        py::arg("monomials") = "");

  m.def("network",
        [](const std::string& spec, int n) {
          const efpsn::Network net = efpsn::MakeNetwork(spec, n);
          py::dict out;
          out["laplacian"] = net.laplacian();
          out["mixing"] = net.mixing();
          out["eigenvalues"] = net.eigenvalues();
          out["mu_low"] = net.mu_low();
          out["mu_high"] = net.mu_high();
          return out;
        },
        py::arg("spec"), py::arg("n"));

  m.def("phase1",
        [](const std::string& graph, int n, double gamma, double p_exp, int n_terms,
           int precision, const std::string& mode, unsigned key_bits, uint64_t seed) {
          const efpsn::Network net = efpsn::MakeNetwork(graph, n);
          efpsn::NoiseConfig cfg{gamma, p_exp, n_terms, precision,
                                 efpsn::ParseZeroSumMode(mode)};
          const auto keyring = efpsn::GenerateKeyring(n, key_bits, seed);
          const auto coeffs = efpsn::RunPhase1(net, cfg, keyring, seed);
          py::dict out;
          out["eta_bar"] = coeffs.eta_bar;
          out["fixed_point"] = coeffs.fixed_point;
          return out;
        },
        py::arg("graph"), py::arg("n"), py::arg("gamma"), py::arg("p_exp") = 1.0,
        py::arg("n_terms") = 3, py::arg("precision") = 6,
        py::arg("mode") = "quantize_first", py::arg("key_bits") = 64, py::arg("seed") = 0);

  m.def("vq_norm", &efpsn::VqNorm, py::arg("coeffs"), py::arg("q"));
  m.def("zeta", &efpsn::Zeta, py::arg("s"));
  m.def("compute_a",
        [](const std::vector<double>& f_diff, double q, double p_exp, double gamma) {
          return efpsn::ComputeA(f_diff, efpsn::DPParams{q, p_exp, gamma, 1.0});
        },
        py::arg("f_diff"), py::arg("q"), py::arg("p_exp"), py::arg("gamma"));
  m.def("budget",
        [](double a, double r, double mu_low, double mu_high) {
          const efpsn::DPBudget b = efpsn::Budget(a, r, mu_low, mu_high);
          py::dict out;
          out["epsilon"] = b.epsilon;
          out["delta"] = b.delta;
          out["A"] = b.A;
          return out;
        },
        py::arg("A"), py::arg("R"), py::arg("mu_low"), py::arg("mu_high"));

  m.def("idlg_label", &efpsn::IdlgLabel, py::arg("bias_gradient"));

  m.def("run_accuracy_experiment",
        [](const std::string& config_json) {
          return ReportToPy(efpsn::RunAccuracyExperiment(
              efpsn::ConfigFromJson(nlohmann::json::parse(config_json))));
        },
        py::arg("config_json") = "{}",
        "Runs the accuracy sweep; returns {'csv': str, 'summary': json str}.");
  m.def("run_privacy_experiment",
        [](const std::string& config_json) {
          return ReportToPy(efpsn::RunPrivacyExperiment(
              efpsn::ConfigFromJson(nlohmann::json::parse(config_json))));
        },
        py::arg("config_json") = "{}");
}
