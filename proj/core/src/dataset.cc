// Copyright 2026 The nnsur Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nnsur/dataset.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include <fmt/format.h>

namespace nnsur {

void Dataset::Validate() const {
  if (box.size() != input_size()) {
    throw StructuralError("dataset box does not match input size");
  }
  for (int s = 0; s < size(); ++s) {
    if (!box.Contains(inputs.col(s))) {
      throw StructuralError(fmt::format("sample {} lies outside the box", s));
    }
  }
  if (kind == TaskKind::kClassification) {
    if (static_cast<int>(labels.size()) != size()) {
      throw StructuralError("label count does not match sample count");
    }
    for (int label : labels) {
      if (label < 0 || label >= num_classes) {
        throw StructuralError(fmt::format("label {} outside [0, {})", label,
                                          num_classes));
      }
    }
  } else if (static_cast<int>(targets.size()) != size()) {
    throw StructuralError("target count does not match sample count");
  }
}

Dataset Dataset::Head(int count) const { return Slice(0, count); }

Dataset Dataset::Slice(int begin, int count) const {
  begin = std::clamp(begin, 0, size());
  count = std::clamp(count, 0, size() - begin);
  Dataset out;
  out.kind = kind;
  out.num_classes = num_classes;
  out.box = box;
  out.inputs = inputs.middleCols(begin, count);
  if (!labels.empty()) out.labels.assign(labels.begin() + begin, labels.begin() + begin + count);
  if (!targets.empty()) {
    out.targets.assign(targets.begin() + begin, targets.begin() + begin + count);
  }
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.kind == b.kind && a.num_classes == b.num_classes &&
         a.inputs.rows() == b.inputs.rows() &&
         a.inputs.cols() == b.inputs.cols() && a.inputs == b.inputs &&
         a.labels == b.labels && a.targets == b.targets && a.box == b.box;
}

Dataset MakeSyntheticClassification(int input_size, int classes, int samples,
                                    uint64_t seed,
                                    const SyntheticBlobOptions& options) {
  if (input_size <= 0 || classes < 2 || samples < 0) {
    throw StructuralError("synthetic dataset needs n0 > 0 and >= 2 classes");
  }
  std::mt19937_64 rng(seed);
  const double half = 0.5 * options.center_spread;
  std::uniform_real_distribution<double> center_dist(0.5 - half, 0.5 + half);
  Eigen::MatrixXd centers(input_size, classes);
  for (int c = 0; c < classes; ++c) {
    for (int k = 0; k < input_size; ++k) centers(k, c) = center_dist(rng);
  }

  Dataset data;
  data.kind = TaskKind::kClassification;
  data.num_classes = classes;
  data.box = Box::Uniform(input_size, 0.0, 1.0);
  data.inputs.resize(input_size, samples);
  data.labels.resize(samples);
  std::normal_distribution<double> noise(0.0, options.noise);
  for (int s = 0; s < samples; ++s) {
    const int label = s % classes;
    data.labels[s] = label;
    for (int k = 0; k < input_size; ++k) {
      data.inputs(k, s) = std::clamp(centers(k, label) + noise(rng), 0.0, 1.0);
    }
  }
  return data;
}

namespace {

constexpr uint32_t kImageMagic = 0x00000803;
constexpr uint32_t kLabelMagic = 0x00000801;

uint32_t ReadBigEndian32(std::istream& in, const std::string& path) {
  std::array<unsigned char, 4> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 4)) {
    throw IdxFormatError(fmt::format("{}: truncated header", path));
  }
  return (uint32_t{bytes[0]} << 24) | (uint32_t{bytes[1]} << 16) |
         (uint32_t{bytes[2]} << 8) | uint32_t{bytes[3]};
}

void WriteBigEndian32(std::ostream& out, uint32_t value) {
  const std::array<char, 4> bytes{static_cast<char>(value >> 24),
                                  static_cast<char>(value >> 16),
                                  static_cast<char>(value >> 8),
                                  static_cast<char>(value)};
  out.write(bytes.data(), 4);
}

std::ifstream OpenBinary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxFormatError(fmt::format("{}: cannot open", path));
  return in;
}

// Row i of the result holds how much of each source cell falls inside
// destination cell i, in source-cell units.
Eigen::MatrixXd OverlapWeights(int source, int dest) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dest, source);
  const double scale = static_cast<double>(source) / dest;
  for (int i = 0; i < dest; ++i) {
    const double lo = i * scale;
    const double hi = (i + 1) * scale;
    for (int j = static_cast<int>(std::floor(lo)); j < source && j < hi; ++j) {
      const double overlap = std::min(hi, j + 1.0) - std::max(lo, double(j));
      if (overlap > 0) w(i, j) = overlap;
    }
  }
  return w;
}

}  // namespace

Eigen::VectorXd AreaDownscale(const Eigen::VectorXd& image, int rows, int cols,
                              int out) {
  if (image.size() != static_cast<Eigen::Index>(rows) * cols || out <= 0) {
    throw StructuralError("AreaDownscale: bad image shape");
  }
  // Images are stored row-major; Map them as such.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      img(image.data(), rows, cols);
  const Eigen::MatrixXd wr = OverlapWeights(rows, out);
  const Eigen::MatrixXd wc = OverlapWeights(cols, out);
  const double cell_area =
      (static_cast<double>(rows) / out) * (static_cast<double>(cols) / out);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> small =
      (wr * img * wc.transpose()) / cell_area;
  return Eigen::Map<const Eigen::VectorXd>(small.data(), small.size());
}

Dataset LoadIdxDataset(const std::string& images_path,
                       const std::string& labels_path, int max_samples,
                       std::optional<int> downscale) {
  std::ifstream images = OpenBinary(images_path);
  std::ifstream labels = OpenBinary(labels_path);
  const uint32_t image_magic = ReadBigEndian32(images, images_path);
  if (image_magic != kImageMagic) {
    throw IdxFormatError(fmt::format("{}: bad magic number 0x{:08x}", images_path,
                                     image_magic));
  }
  const uint32_t label_magic = ReadBigEndian32(labels, labels_path);
  if (label_magic != kLabelMagic) {
    throw IdxFormatError(fmt::format("{}: bad magic number 0x{:08x}", labels_path,
                                     label_magic));
  }
  const uint32_t image_count = ReadBigEndian32(images, images_path);
  const int rows = static_cast<int>(ReadBigEndian32(images, images_path));
  const int cols = static_cast<int>(ReadBigEndian32(images, images_path));
  const uint32_t label_count = ReadBigEndian32(labels, labels_path);
  if (image_count != label_count) {
    throw IdxFormatError(fmt::format("{} holds {} images but {} holds {} labels",
                                     images_path, image_count, labels_path,
                                     label_count));
  }
  const int count = static_cast<int>(
      std::min<uint64_t>(image_count, static_cast<uint64_t>(std::max(0, max_samples))));
  const int side = downscale.value_or(0);
  const int n0 = side > 0 ? side * side : rows * cols;

  Dataset data;
  data.kind = TaskKind::kClassification;
  data.box = Box::Uniform(n0, 0.0, 1.0);
  data.inputs.resize(n0, count);
  data.labels.resize(count);
  std::vector<unsigned char> pixels(static_cast<size_t>(rows) * cols);
  Eigen::VectorXd image(rows * cols);
  int max_label = 0;
  for (int s = 0; s < count; ++s) {
    if (!images.read(reinterpret_cast<char*>(pixels.data()),
                     static_cast<std::streamsize>(pixels.size()))) {
      throw IdxFormatError(
          fmt::format("{}: truncated payload at image {}", images_path, s));
    }
    char label = 0;
    if (!labels.read(&label, 1)) {
      throw IdxFormatError(
          fmt::format("{}: truncated payload at label {}", labels_path, s));
    }
    for (size_t p = 0; p < pixels.size(); ++p) image[p] = pixels[p] / 255.0;
    data.inputs.col(s) =
        side > 0 ? AreaDownscale(image, rows, cols, side) : image;
    data.labels[s] = static_cast<unsigned char>(label);
    max_label = std::max(max_label, data.labels[s]);
  }
  data.num_classes = std::max(10, max_label + 1);
  // Area averaging can overshoot by an ulp.
  data.inputs = data.inputs.cwiseMax(0.0).cwiseMin(1.0);
  return data;
}

void WriteIdxDataset(const Dataset& data, int rows, int cols,
                     const std::string& images_path,
                     const std::string& labels_path) {
  if (data.input_size() != rows * cols) {
    throw StructuralError("WriteIdxDataset: input size is not rows * cols");
  }
  std::ofstream images(images_path, std::ios::binary);
  std::ofstream labels(labels_path, std::ios::binary);
  if (!images || !labels) throw IdxFormatError("cannot open IDX output files");
  WriteBigEndian32(images, kImageMagic);
  WriteBigEndian32(images, static_cast<uint32_t>(data.size()));
  WriteBigEndian32(images, static_cast<uint32_t>(rows));
  WriteBigEndian32(images, static_cast<uint32_t>(cols));
  WriteBigEndian32(labels, kLabelMagic);
  WriteBigEndian32(labels, static_cast<uint32_t>(data.size()));
  for (int s = 0; s < data.size(); ++s) {
    for (int p = 0; p < data.input_size(); ++p) {
      const double v = std::clamp(data.inputs(p, s), 0.0, 1.0);
      images.put(static_cast<char>(std::lround(v * 255.0)));
    }
    labels.put(static_cast<char>(data.labels[s]));
  }
}

}  // namespace nnsur
