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

#include "mdd/ctc/ctc.h"

#include <cmath>
#include <limits>
#include <string>

#include "mdd/errors.h"

namespace mdd {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNormalizationTolerance = 1e-6;

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void Validate(const Matrix& log_probs, const std::vector<int>& target, int blank) {
  const auto v = log_probs.cols();
  if (blank < 0 || blank >= v) throw ConfigError("CTC blank index outside vocabulary");
  for (int c : target) {
    if (c == blank) throw ConfigError("CTC target contains the blank symbol");
    if (c < 0 || c >= v) throw ConfigError("CTC target id " + std::to_string(c) + " outside vocabulary");
  }
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    const double m = log_probs.row(t).maxCoeff();
    const double lse = m + std::log((log_probs.row(t).array() - m).exp().sum());
    if (!std::isfinite(m) || std::abs(lse) > kNormalizationTolerance) {
      throw NumericError("CTC frame " + std::to_string(t) + " is not a log distribution");
    }
  }
}

std::vector<int> Extend(const std::vector<int>& target, int blank) {
  std::vector<int> ext(2 * target.size() + 1, blank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  return ext;
}

bool CanSkip(const std::vector<int>& ext, std::size_t s, int blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

// Log-space alpha lattice; alpha(t, s) includes the emission at frame t.
// Returns log P(target | X). Assumes feasibility.
double ForwardPass(const Matrix& lp, const std::vector<int>& ext, int blank, Matrix* alpha_out) {
  const Eigen::Index frames = lp.rows();
  const std::size_t states = ext.size();
  Matrix alpha = Matrix::Constant(frames, static_cast<Eigen::Index>(states), kNegInf);
  alpha(0, 0) = lp(0, ext[0]);
  if (states > 1) alpha(0, 1) = lp(0, ext[1]);
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha(t - 1, s - 1));
      if (CanSkip(ext, s, blank)) acc = LogAdd(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) alpha(t, s) = acc + lp(t, ext[s]);
    }
  }
  double log_p = alpha(frames - 1, states - 1);
  if (states > 1) log_p = LogAdd(log_p, alpha(frames - 1, states - 2));
  if (alpha_out) *alpha_out = std::move(alpha);
  return log_p;
}

}  // namespace

int CtcMinFrames(const std::vector<int>& target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target[i] == target[i - 1]) ++n;
  }
  return n;
}

CtcResult CtcForwardBackward(const Matrix& log_probs, const std::vector<int>& target, int blank) {
  Validate(log_probs, target, blank);
  const Eigen::Index frames = log_probs.rows();
  if (frames < CtcMinFrames(target)) {
    throw InfeasibleTarget("CTC target of length " + std::to_string(target.size()) + " needs " +
                           std::to_string(CtcMinFrames(target)) + " frames, got " +
                           std::to_string(frames));
  }
  CtcResult result;
  result.grad = Matrix::Zero(frames, log_probs.cols());
  if (frames == 0) return result;  // empty target over zero frames: P = 1

  const std::vector<int> ext = Extend(target, blank);
  const std::size_t states = ext.size();
  Matrix alpha;
  const double log_p = ForwardPass(log_probs, ext, blank, &alpha);
  if (!std::isfinite(log_p)) throw NumericError("CTC path probability underflowed to zero");

  Matrix beta = Matrix::Constant(frames, static_cast<Eigen::Index>(states), kNegInf);
  beta(frames - 1, states - 1) = log_probs(frames - 1, ext[states - 1]);
  if (states > 1) beta(frames - 1, states - 2) = log_probs(frames - 1, ext[states - 2]);
  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (std::size_t s = 0; s < states; ++s) {
      double acc = beta(t + 1, s);
      if (s + 1 < states) acc = LogAdd(acc, beta(t + 1, s + 1));
      if (s + 2 < states && CanSkip(ext, s + 2, blank)) acc = LogAdd(acc, beta(t + 1, s + 2));
      if (acc != kNegInf) beta(t, s) = acc + log_probs(t, ext[s]);
    }
  }

  for (Eigen::Index t = 0; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      const double a = alpha(t, s) + beta(t, s);
      if (a == kNegInf) continue;
      // alpha and beta both carry the frame-t emission; divide one out.
      result.grad(t, ext[s]) -= std::exp(a - log_probs(t, ext[s]) - log_p);
    }
  }
  result.loss = -log_p;
  return result;
}

double CtcLabelLogProb(const Matrix& log_probs, const std::vector<int>& target, int blank) {
  Validate(log_probs, target, blank);
  if (log_probs.rows() < CtcMinFrames(target)) return kNegInf;
  if (log_probs.rows() == 0) return 0.0;
  return ForwardPass(log_probs, Extend(target, blank), blank, nullptr);
}

std::vector<int> CtcGreedyDecode(const Matrix& log_probs, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Eigen::Index best;
    log_probs.row(t).maxCoeff(&best);
    const int sym = static_cast<int>(best);
    if (sym != prev && sym != blank) out.push_back(sym);
    prev = sym;
  }
  return out;
}

}  // namespace mdd
