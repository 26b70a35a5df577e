// Copyright 2026 The mdd Authors.
//
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

#include "mdd/acoustic/acoustic.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mdd/errors.h"
#include "mdd/numcore/archive.h"
#include "mdd/numcore/optimizer.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

constexpr std::string_view kClassifierMagic = "MDAM";
constexpr std::uint32_t kClassifierVersion = 1;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kProbFloor = 1e-30;

double SafeLog(double p) { return std::log(std::max(p, kProbFloor)); }

Matrix Tanh(const Matrix& m) { return m.array().tanh().matrix(); }

std::string ParseKey(const std::string& header, const std::string& key) {
  std::istringstream in(header);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  throw SchemaError("classifier header lacks " + key);
}

}  // namespace

FrameClassifier::FrameClassifier(const FrameClassifierConfig& config) : config_(config) {
  if (config.feature_dim < 1 || config.hidden < 1) throw ConfigError("invalid classifier dimensions");
  l1_ = LinearLayer::Create(params_, "am.l1", config.feature_dim, config.hidden);
  l2_ = LinearLayer::Create(params_, "am.l2", config.hidden, config.hidden);
  out_ = LinearLayer::Create(params_, "am.out", config.hidden, kNumBasePhones);
  Rng rng(DeriveSeed(config.seed, "am.init"));
  l1_.Init(params_, rng);
  l2_.Init(params_, rng);
  out_.Init(params_, rng);
  mean_ = RowVector::Zero(config.feature_dim);
  inv_std_ = RowVector::Ones(config.feature_dim);
}

Matrix FrameClassifier::Standardize(const Matrix& features) const {
  if (features.cols() != config_.feature_dim) {
    throw ShapeError("classifier expects " + std::to_string(config_.feature_dim) +
                     "-dim frames, got " + ShapeString(features));
  }
  Matrix x = features;
  x.rowwise() -= mean_;
  x.array().rowwise() *= inv_std_.array();
  return x;
}

Matrix FrameClassifier::LogPosteriors(const Matrix& features) const {
  const Matrix x = Standardize(features);
  const Matrix h1 = Tanh(l1_.Forward(params_, x));
  const Matrix h2 = Tanh(l2_.Forward(params_, h1));
  return LogSoftmaxRows(out_.Forward(params_, h2));
}

double FrameClassifier::LossAndGrad(const Matrix& frames, const std::vector<int>& labels) {
  const Matrix x = Standardize(frames);
  const Matrix h1 = Tanh(l1_.Forward(params_, x));
  const Matrix h2 = Tanh(l2_.Forward(params_, h1));
  const Matrix lp = LogSoftmaxRows(out_.Forward(params_, h2));
  const double n = static_cast<double>(frames.rows());
  Matrix dlp = Matrix::Zero(lp.rows(), lp.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < lp.rows(); ++i) {
    loss -= lp(i, labels[i]);
    dlp(i, labels[i]) = -1.0 / n;
  }
  const Matrix dz = LogSoftmaxBackward(lp, dlp);
  Matrix dh2 = out_.Backward(params_, h2, dz);
  dh2.array() *= 1.0 - h2.array().square();
  Matrix dh1 = l2_.Backward(params_, h1, dh2);
  dh1.array() *= 1.0 - h1.array().square();
  l1_.Backward(params_, x, dh1);
  return loss / n;
}

std::string FrameClassifier::Encode() const {
  TensorArchive a;
  a.version = kClassifierVersion;
  std::ostringstream h;
  h << "feature_dim=" << config_.feature_dim << "\nhidden=" << config_.hidden
    << "\nepochs=" << config_.epochs << "\nbatch_size=" << config_.batch_size
    << "\nseed=" << config_.seed << "\n";
  a.header = h.str();
  a.tensors = SnapshotParams(params_);
  a.tensors.push_back({"norm.mean", mean_});
  a.tensors.push_back({"norm.inv_std", inv_std_});
  return EncodeArchive(kClassifierMagic, a);
}

FrameClassifier FrameClassifier::Decode(const std::string& bytes, const std::string& what) {
  TensorArchive a = DecodeArchive(bytes, kClassifierMagic, kClassifierVersion, what);
  FrameClassifierConfig cfg;
  cfg.feature_dim = std::stoi(ParseKey(a.header, "feature_dim"));
  cfg.hidden = std::stoi(ParseKey(a.header, "hidden"));
  cfg.epochs = std::stoi(ParseKey(a.header, "epochs"));
  cfg.batch_size = std::stoi(ParseKey(a.header, "batch_size"));
  cfg.seed = std::stoull(ParseKey(a.header, "seed"));
  FrameClassifier c(cfg);
  if (a.tensors.size() < 2) throw SchemaError(what + ": missing normalization tensors");
  NamedTensor inv = a.tensors.back();
  a.tensors.pop_back();
  NamedTensor mean = a.tensors.back();
  a.tensors.pop_back();
  if (mean.name != "norm.mean" || inv.name != "norm.inv_std" || mean.value.rows() != 1 ||
      mean.value.cols() != cfg.feature_dim || inv.value.rows() != 1 ||
      inv.value.cols() != cfg.feature_dim) {
    throw SchemaError(what + ": bad normalization tensors");
  }
  RestoreParams(a.tensors, c.params_);
  c.mean_ = mean.value.row(0);
  c.inv_std_ = inv.value.row(0);
  return c;
}

FrameClassifier TrainFrameClassifier(const std::vector<const Utterance*>& utterances,
                                     const FrameClassifierConfig& config) {
  FrameClassifier clf(config);
  std::size_t total = 0;
  for (const auto* u : utterances) {
    if (u->frame_labels.size() != static_cast<std::size_t>(u->num_frames())) {
      throw ConfigError("utterance " + u->id + " lacks frame labels");
    }
    if (u->features.cols() != config.feature_dim) {
      throw ShapeError("utterance " + u->id + " has feature width " +
                       std::to_string(u->features.cols()));
    }
    total += u->frame_labels.size();
  }
  if (total == 0) throw ConfigError("frame classifier needs labeled frames");

  Matrix frames(static_cast<Eigen::Index>(total), config.feature_dim);
  std::vector<int> labels;
  labels.reserve(total);
  Eigen::Index row = 0;
  for (const auto* u : utterances) {
    frames.middleRows(row, u->num_frames()) = u->features;
    row += u->num_frames();
    labels.insert(labels.end(), u->frame_labels.begin(), u->frame_labels.end());
  }
  const RowVector mean = frames.colwise().mean();
  RowVector var = (frames.rowwise() - mean).array().square().colwise().mean().matrix();
  clf.mean_ = RoundToFloat(mean);
  clf.inv_std_ = RoundToFloat(var.unaryExpr([](double v) { return 1.0 / std::sqrt(v + 1e-8); }));

  AdamOptimizer opt({config.learning_rate, 0.9, 0.999, 1e-8, 5.0});
  Rng rng(DeriveSeed(config.seed, "am.shuffle"));
  std::vector<Eigen::Index> order(total);
  std::iota(order.begin(), order.end(), 0);
  const int batch = std::max(1, config.batch_size);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t start = 0; start < total; start += batch) {
      const std::size_t n = std::min<std::size_t>(batch, total - start);
      Matrix xb(static_cast<Eigen::Index>(n), config.feature_dim);
      std::vector<int> yb(n);
      for (std::size_t k = 0; k < n; ++k) {
        xb.row(k) = frames.row(order[start + k]);
        yb[k] = labels[order[start + k]];
      }
      clf.params().ZeroGrad();
      const double loss = clf.LossAndGrad(xb, yb);
      if (!std::isfinite(loss)) {
        throw NumericError("frame classifier diverged in epoch " + std::to_string(epoch));
      }
      opt.Step(clf.params());
    }
  }
  RoundParamsToFloat(clf.params());
  clf.params().ZeroGrad();
  return clf;
}

Posteriorgram ExtractPpg(const FrameClassifier& classifier, const Matrix& features) {
  return classifier.LogPosteriors(features).array().exp().matrix();
}

double FrameAccuracy(const FrameClassifier& classifier,
                     const std::vector<const Utterance*>& utterances) {
  std::size_t hit = 0;
  std::size_t total = 0;
  for (const auto* u : utterances) {
    const Matrix lp = classifier.LogPosteriors(u->features);
    for (Eigen::Index t = 0; t < lp.rows(); ++t) {
      Eigen::Index best;
      lp.row(t).maxCoeff(&best);
      hit += static_cast<int>(best) == u->frame_labels[t];
      ++total;
    }
  }
  return total ? static_cast<double>(hit) / static_cast<double>(total) : 0.0;
}

void ValidateSegmentation(const Segmentation& seg, int num_frames, int num_phones) {
  if (static_cast<int>(seg.segments.size()) != num_phones) {
    throw SchemaError("segmentation has " + std::to_string(seg.segments.size()) +
                      " segments for " + std::to_string(num_phones) + " phones");
  }
  int expected_start = 0;
  for (const auto& [start, end] : seg.segments) {
    if (start != expected_start || end <= start) {
      throw SchemaError("segmentation is not a contiguous cover with nonempty segments");
    }
    expected_start = end;
  }
  if (expected_start != num_frames) throw SchemaError("segmentation does not cover all frames");
}

Segmentation ForcedAlign(const Posteriorgram& ppg, const std::vector<int>& canonical) {
  const int frames = static_cast<int>(ppg.rows());
  const int phones = static_cast<int>(canonical.size());
  if (phones == 0) throw InfeasibleTarget("forced alignment of an empty phone sequence");
  if (phones > frames) {
    throw InfeasibleTarget("cannot align " + std::to_string(phones) + " phones to " +
                           std::to_string(frames) + " frames");
  }
  for (int c : canonical) {
    if (c < 0 || c >= ppg.cols()) throw ShapeError("canonical phone outside posteriorgram");
  }
  // best(t, j): best score of frames t..T-1 when frame t belongs to phone j.
  Matrix best = Matrix::Constant(frames, phones, kNegInf);
  best(frames - 1, phones - 1) = SafeLog(ppg(frames - 1, canonical[phones - 1]));
  for (int t = frames - 2; t >= 0; --t) {
    // Phone j at frame t leaves T-t-1 frames for phones j..L-1 (j may stay).
    const int j_min = std::max(0, phones - (frames - t));
    const int j_max = std::min(phones - 1, t);
    for (int j = j_min; j <= j_max; ++j) {
      double next = best(t + 1, j);
      if (j + 1 < phones) next = std::max(next, best(t + 1, j + 1));
      if (next != kNegInf) best(t, j) = SafeLog(ppg(t, canonical[j])) + next;
    }
  }
  Segmentation seg;
  seg.score = best(0, 0);
  int j = 0;
  int start = 0;
  for (int t = 0; t + 1 < frames; ++t) {
    if (j + 1 < phones && best(t + 1, j + 1) >= best(t + 1, j)) {
      seg.segments.emplace_back(start, t + 1);
      start = t + 1;
      ++j;
    }
  }
  seg.segments.emplace_back(start, frames);
  return seg;
}

std::vector<double> GopScores(const Posteriorgram& ppg, const Segmentation& seg,
                              const std::vector<int>& canonical) {
  ValidateSegmentation(seg, static_cast<int>(ppg.rows()), static_cast<int>(canonical.size()));
  std::vector<double> scores;
  scores.reserve(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    const auto [start, end] = seg.segments[i];
    double acc = 0.0;
    for (int t = start; t < end; ++t) {
      const double top = ppg.row(t).maxCoeff();
      acc += SafeLog(ppg(t, canonical[i])) - SafeLog(top);
    }
    scores.push_back(acc / (end - start));
  }
  return scores;
}

std::vector<int> SegmentArgmax(const Posteriorgram& ppg, const Segmentation& seg) {
  std::vector<int> out;
  for (const auto& [start, end] : seg.segments) {
    RowVector acc = RowVector::Zero(ppg.cols());
    for (int t = start; t < end; ++t) {
      for (Eigen::Index q = 0; q < ppg.cols(); ++q) acc(q) += SafeLog(ppg(t, q));
    }
    Eigen::Index best;
    acc.maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

std::vector<bool> GopDetect(const std::vector<double>& scores, double threshold) {
  std::vector<bool> out;
  out.reserve(scores.size());
  for (double s : scores) out.push_back(s < threshold);
  return out;
}

Calibration CalibrateThreshold(const std::vector<GopSample>& dev) {
  if (dev.empty()) throw ConfigError("threshold calibration needs a nonempty dev set");
  std::vector<GopSample> sorted = dev;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const GopSample& a, const GopSample& b) { return a.score < b.score; });
  const double positives = static_cast<double>(
      std::count_if(sorted.begin(), sorted.end(), [](const GopSample& s) { return s.mispronounced; }));
  auto f1 = [&](double flagged, double hits) {
    if (flagged == 0.0 || positives == 0.0 || hits == 0.0) return 0.0;
    const double p = hits / flagged;
    const double r = hits / positives;
    return 2.0 * p * r / (p + r);
  };
  // Threshold below every score flags nothing.
  Calibration best{sorted.front().score - 1.0, 0.0};
  double flagged = 0.0;
  double hits = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const double v = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == v) {
      flagged += 1.0;
      hits += sorted[i].mispronounced ? 1.0 : 0.0;
      ++i;
    }
    const double threshold = i < sorted.size() ? 0.5 * (v + sorted[i].score) : v + 1.0;
    const double score = f1(flagged, hits);
    if (score > best.f1) best = {threshold, score};
  }
  return best;
}

}  // namespace mdd
