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

// Seeded synthetic datasets standing in for image/classification corpora.

#ifndef EFPSN_DATASET_H_
#define EFPSN_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace efpsn {

struct Dataset {
  Eigen::MatrixXd features;  // one sample per row
  std::vector<int> labels;
  int classes = 0;

  int size() const { return static_cast<int>(labels.size()); }
  int dim() const { return static_cast<int>(features.cols()); }
  Dataset Subset(const std::vector<int>& rows) const;
};

struct MixtureParams {
  int classes = 4;
  int features = 20;
  int samples = 1000;
  double separation = 1.0;  // class means ~ N(0, separation^2 I)
  double noise_sd = 1.0;
};

// Balanced Gaussian mixture: labels cycle through the classes, samples are
// the class mean plus isotropic noise.
Dataset GaussianMixture(const MixtureParams& params, uint64_t seed);

// Shuffles and deals rows into `parts` equally sized shards (remainder
// dropped).
std::vector<Dataset> SplitEvenly(const Dataset& data, int parts, uint64_t seed);

// Splits off the last `test_fraction` of a shuffled copy.
std::pair<Dataset, Dataset> TrainTestSplit(const Dataset& data,
                                           double test_fraction, uint64_t seed);

// side x side grayscale images in [0, 1]: a smooth per-class template plus
// Gaussian pixel noise, clipped.
Dataset SyntheticImages(int classes, int count, double noise_sd, uint64_t seed,
                        int side = 8);

// Columns: label, x1..xd.
void WriteDatasetCsv(const Dataset& data, const std::string& path);

}  // namespace efpsn

#endif  // EFPSN_DATASET_H_
