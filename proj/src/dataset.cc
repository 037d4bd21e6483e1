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

#include "efpsn/dataset.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "efpsn/errors.h"
#include "efpsn/random.h"

namespace efpsn {
namespace {

std::vector<int> ShuffledRows(int count, uint64_t seed) {
  std::vector<int> rows(count);
  std::iota(rows.begin(), rows.end(), 0);
  Rng rng = MakeRng(seed, {stream::kDataset, 1});
  std::shuffle(rows.begin(), rows.end(), rng);
  return rows;
}

}  // namespace

Dataset Dataset::Subset(const std::vector<int>& rows) const {
  Dataset out;
  out.classes = classes;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(r) = features.row(rows[r]);
    out.labels.push_back(labels[rows[r]]);
  }
  return out;
}

Dataset GaussianMixture(const MixtureParams& params, uint64_t seed) {
  if (params.classes < 2 || params.features < 1 || params.samples < 1) {
    throw InvalidArgument("dataset: bad mixture parameters");
  }
  Rng rng = MakeRng(seed, {stream::kDataset, 0});
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd means(params.classes, params.features);
  for (int c = 0; c < params.classes; ++c)
    for (int f = 0; f < params.features; ++f)
      means(c, f) = params.separation * normal(rng);

  Dataset data;
  data.classes = params.classes;
  data.features.resize(params.samples, params.features);
  data.labels.resize(params.samples);
  for (int s = 0; s < params.samples; ++s) {
    const int y = s % params.classes;
    data.labels[s] = y;
    for (int f = 0; f < params.features; ++f) {
      data.features(s, f) = means(y, f) + params.noise_sd * normal(rng);
    }
  }
  return data;
}

std::vector<Dataset> SplitEvenly(const Dataset& data, int parts, uint64_t seed) {
  if (parts < 1 || parts > data.size()) {
    throw InvalidArgument("dataset: cannot split into that many parts");
  }
  const std::vector<int> rows = ShuffledRows(data.size(), seed);
  const int per_part = data.size() / parts;
  std::vector<Dataset> out;
  for (int p = 0; p < parts; ++p) {
    out.push_back(data.Subset(std::vector<int>(rows.begin() + p * per_part,
                                               rows.begin() + (p + 1) * per_part)));
  }
  return out;
}

std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& data,
                                           double test_fraction, uint64_t seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw InvalidArgument("dataset: test fraction must be in (0, 1)");
  }
  const std::vector<int> rows = ShuffledRows(data.size(), seed);
  const int test = std::max(1, static_cast<int>(data.size() * test_fraction));
  const int train = data.size() - test;
  return {data.Subset(std::vector<int>(rows.begin(), rows.begin() + train)),
          data.Subset(std::vector<int>(rows.begin() + train, rows.end()))};
}

Dataset SyntheticImages(int classes, int count, double noise_sd, uint64_t seed,
                        int side) {
  if (classes < 2 || count < 1 || side < 2) {
    throw InvalidArgument("dataset: bad image parameters");
  }
  const int pixels = side * side;
  // Templates depend only on the class count and side so every seed draws
  // from the same classes.
  Rng template_rng = MakeRng(0x1a6e5, {static_cast<uint64_t>(classes),
                                        static_cast<uint64_t>(side)});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd templates(classes, pixels);
  for (int c = 0; c < classes; ++c) {
    // A few random Gaussian blobs per class.
    Eigen::VectorXd img = Eigen::VectorXd::Zero(pixels);
    for (int blob = 0; blob < 3; ++blob) {
      const double cr = unit(template_rng) * (side - 1);
      const double cc = unit(template_rng) * (side - 1);
      const double width = 0.8 + unit(template_rng) * 1.5;
      for (int r = 0; r < side; ++r)
        for (int col = 0; col < side; ++col) {
          const double d2 = (r - cr) * (r - cr) + (col - cc) * (col - cc);
          img(r * side + col) += std::exp(-d2 / (2 * width * width));
        }
    }
    templates.row(c) = (img / std::max(1e-12, img.maxCoeff())).transpose();
  }

  Rng rng = MakeRng(seed, {stream::kDataset, 2});
  std::normal_distribution<double> normal(0.0, noise_sd);
  std::uniform_int_distribution<int> label(0, classes - 1);
  Dataset data;
  data.classes = classes;
  data.features.resize(count, pixels);
  data.labels.resize(count);
  for (int s = 0; s < count; ++s) {
    const int y = label(rng);
    data.labels[s] = y;
    for (int p = 0; p < pixels; ++p) {
      data.features(s, p) = std::clamp(templates(y, p) + normal(rng), 0.0, 1.0);
    }
  }
  return data;
}

void WriteDatasetCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("dataset: cannot write " + path);
  out << "label";
  for (int f = 0; f < data.dim(); ++f) out << ",x" << (f + 1);
  out << "\n";
  out.precision(17);
  for (int r = 0; r < data.size(); ++r) {
    out << data.labels[r];
    for (int f = 0; f < data.dim(); ++f) out << "," << data.features(r, f);
    out << "\n";
  }
}

}  // namespace efpsn
