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

#include "mdd/labelaug/labelaug.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

std::string KindName(SmoothingKind k) {
  switch (k) {
    case SmoothingKind::kUniform: return "uniform";
    case SmoothingKind::kUnigram: return "unigram";
    case SmoothingKind::kCbow: return "cbow";
    case SmoothingKind::kInterpolated: return "interpolated";
  }
  return "uniform";
}

SmoothingKind ParseKind(const std::string& s) {
  if (s == "uniform") return SmoothingKind::kUniform;
  if (s == "unigram") return SmoothingKind::kUnigram;
  if (s == "cbow") return SmoothingKind::kCbow;
  if (s == "interpolated") return SmoothingKind::kInterpolated;
  throw ParseError("unknown smoothing kind: " + s);
}

std::string Exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::logic_error&) {
    throw ParseError(what + ": not a number: '" + s + "'");
  }
}

// "key=value" tokens after the leading tag.
std::string HeaderValue(const std::string& header, const std::string& key) {
  std::istringstream in(header);
  std::string tok;
  while (in >> tok) {
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  }
  throw ParseError("header lacks '" + key + "': " + header);
}

}  // namespace

void SmoothingDistribution::Validate() const {
  if (probs.empty()) throw ConfigError("empty smoothing distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("smoothing distribution does not sum to 1");
}

std::string SmoothingDistribution::Describe() const {
  if (kind == SmoothingKind::kInterpolated) return "interpolated(" + Exact(beta) + ")";
  return KindName(kind);
}

SmoothingDistribution UniformDistribution(int vocab_size) {
  if (vocab_size <= 0) throw ConfigError("vocabulary must be nonempty");
  return {std::vector<double>(vocab_size, 1.0 / vocab_size), SmoothingKind::kUniform, 0.0};
}

SmoothingDistribution UnigramDistribution(const std::vector<std::vector<int>>& transcripts,
                                          int vocab_size, double add_k) {
  if (vocab_size <= 0) throw ConfigError("vocabulary must be nonempty");
  if (add_k < 0.0) throw ConfigError("add-k constant must be nonnegative");
  std::vector<double> counts(vocab_size, 0.0);
  double total = 0.0;
  for (const auto& t : transcripts) {
    for (int s : t) {
      if (s < 0 || s >= vocab_size) throw ConfigError("transcript symbol outside vocabulary");
      counts[s] += 1.0;
      total += 1.0;
    }
  }
  if (total == 0.0) throw ConfigError("unigram estimation needs nonempty transcripts");
  const double denom = total + add_k * vocab_size;
  SmoothingDistribution d;
  d.kind = SmoothingKind::kUnigram;
  d.probs.resize(vocab_size);
  for (int i = 0; i < vocab_size; ++i) d.probs[i] = (counts[i] + add_k) / denom;
  return d;
}

PhoneEmbeddings TrainCbow(const std::vector<std::vector<int>>& transcripts, int vocab_size,
                          const CbowConfig& config) {
  if (config.dim < 2) throw ConfigError("CBOW dimension must be >= 2");
  if (config.window < 1) throw ConfigError("CBOW window must be >= 1");
  if (config.epochs < 0 || !(config.learning_rate > 0.0)) {
    throw ConfigError("CBOW epochs must be >= 0 and learning rate positive");
  }
  std::size_t longest = 0;
  std::size_t total_tokens = 0;
  for (const auto& t : transcripts) {
    longest = std::max(longest, t.size());
    total_tokens += t.size();
    for (int s : t) {
      if (s < 0 || s >= vocab_size) throw ConfigError("transcript symbol outside vocabulary");
    }
  }
  if (longest <= static_cast<std::size_t>(config.window)) {
    throw ConfigError("CBOW needs at least one transcript longer than the window");
  }
  std::vector<char> excluded(vocab_size, 0);
  for (int s : config.excluded_context) {
    if (s >= 0 && s < vocab_size) excluded[s] = 1;
  }

  Rng rng(config.seed);
  const int d = config.dim;
  Matrix in_vec(vocab_size, d);
  for (Eigen::Index i = 0; i < in_vec.size(); ++i) {
    in_vec.data()[i] = rng.Uniform(-0.5, 0.5) / d;
  }
  Matrix out_vec = Matrix::Zero(vocab_size, d);

  std::vector<std::size_t> order(transcripts.size());
  std::iota(order.begin(), order.end(), 0);
  const double total_steps = static_cast<double>(total_tokens) * std::max(config.epochs, 1);
  double done = 0.0;
  std::vector<int> ctx;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    for (std::size_t si : order) {
      const auto& sent = transcripts[si];
      const int n = static_cast<int>(sent.size());
      for (int p = 0; p < n; ++p) {
        const double lr =
            config.learning_rate * std::max(1e-4, 1.0 - done / total_steps);
        done += 1.0;
        ctx.clear();
        for (int q = std::max(0, p - config.window); q <= std::min(n - 1, p + config.window); ++q) {
          if (q != p && !excluded[sent[q]]) ctx.push_back(sent[q]);
        }
        if (ctx.empty()) continue;
        RowVector h = RowVector::Zero(d);
        for (int c : ctx) h += in_vec.row(c);
        h /= static_cast<double>(ctx.size());
        Vector scores = out_vec * h.transpose();
        const double m = scores.maxCoeff();
        Vector prob = (scores.array() - m).exp();
        prob /= prob.sum();
        prob(sent[p]) -= 1.0;  // d loss / d scores
        const RowVector dh = prob.transpose() * out_vec;
        out_vec.noalias() -= lr * prob * h;
        const RowVector step = (lr / static_cast<double>(ctx.size())) * dh;
        for (int c : ctx) in_vec.row(c) -= step;
      }
    }
  }
  return {in_vec, config};
}

std::vector<double> SimilarityProfile(const PhoneEmbeddings& emb, int i) {
  const Matrix& v = emb.vectors;
  if (i < 0 || i >= v.rows()) throw ShapeError("similarity profile index out of range");
  const double ni = v.row(i).norm();
  if (!(ni > 0.0)) throw NumericError("zero-norm embedding row " + std::to_string(i));
  std::vector<double> u(v.rows());
  for (Eigen::Index j = 0; j < v.rows(); ++j) {
    const double nj = v.row(j).norm();
    if (!(nj > 0.0)) throw NumericError("zero-norm embedding row " + std::to_string(j));
    const double c = v.row(j).dot(v.row(i)) / (nj * ni);
    u[j] = std::clamp(c, -1.0, 1.0);
  }
  return u;
}

SmoothingDistribution CbowDistribution(const PhoneEmbeddings& emb) {
  const int n = static_cast<int>(emb.vectors.rows());
  if (n == 0) throw ConfigError("empty embedding matrix");
  std::vector<double> norms(n);
  for (int i = 0; i < n; ++i) {
    const auto u = SimilarityProfile(emb, i);
    double sq = 0.0;
    for (double x : u) sq += x * x;
    norms[i] = std::sqrt(sq);
  }
  const double m = *std::max_element(norms.begin(), norms.end());
  SmoothingDistribution d;
  d.kind = SmoothingKind::kCbow;
  d.probs.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) z += (d.probs[i] = std::exp(norms[i] - m));
  for (double& p : d.probs) p /= z;
  return d;
}

SmoothingDistribution InterpolateDistributions(const SmoothingDistribution& d_cbow,
                                               const SmoothingDistribution& d_uni, double beta) {
  if (d_cbow.size() != d_uni.size()) {
    throw ShapeError("cannot interpolate distributions over different vocabularies");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("interpolation weight outside [0,1]");
  SmoothingDistribution d;
  d.kind = SmoothingKind::kInterpolated;
  d.beta = beta;
  d.probs.resize(d_uni.probs.size());
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    // Endpoints are returned exactly.
    if (beta == 0.0) {
      d.probs[i] = d_uni.probs[i];
    } else if (beta == 1.0) {
      d.probs[i] = d_cbow.probs[i];
    } else {
      d.probs[i] = beta * d_cbow.probs[i] + (1.0 - beta) * d_uni.probs[i];
    }
  }
  return d;
}

KlPenaltyResult KlPenalty(const SmoothingDistribution& target, const RowVector& predicted_log) {
  if (predicted_log.size() != target.size()) throw ShapeError("KL penalty size mismatch");
  KlPenaltyResult r;
  r.grad.resize(target.size());
  for (int i = 0; i < target.size(); ++i) {
    const double t = target.probs[i];
    if (!(t > 0.0)) throw ConfigError("KL target must be strictly positive");
    r.value += t * (std::log(t) - predicted_log(i));
    r.grad(i) = -t;
  }
  return r;
}

std::string EncodeDistribution(const SmoothingDistribution& dist,
                               const std::vector<std::string>& symbols) {
  if (symbols.size() != dist.probs.size()) throw ShapeError("symbol list does not match distribution");
  std::ostringstream out;
  out << "# mdd-smoothing kind=" << KindName(dist.kind) << " beta=" << Exact(dist.beta)
      << " size=" << dist.probs.size() << "\n";
  for (std::size_t i = 0; i < symbols.size(); ++i) out << symbols[i] << ' ' << Exact(dist.probs[i]) << '\n';
  return out.str();
}

SmoothingDistribution DecodeDistribution(const std::string& text,
                                         const std::vector<std::string>& symbols) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# mdd-smoothing", 0) != 0) {
    throw ParseError("not a smoothing distribution file");
  }
  SmoothingDistribution d;
  d.kind = ParseKind(HeaderValue(header, "kind"));
  d.beta = ParseDouble(HeaderValue(header, "beta"), "beta");
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string sym, val, extra;
    if (!(fields >> sym >> val) || (fields >> extra)) {
      throw ParseError("distribution line " + std::to_string(line_no) + ": expected '<symbol> <value>'");
    }
    if (d.probs.size() >= symbols.size() || symbols[d.probs.size()] != sym) {
      throw SchemaError("distribution line " + std::to_string(line_no) + ": unexpected symbol " + sym);
    }
    d.probs.push_back(ParseDouble(val, "distribution line " + std::to_string(line_no)));
  }
  if (d.probs.size() != symbols.size()) throw SchemaError("distribution does not cover the vocabulary");
  try {
    d.Validate();
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  return d;
}

std::string EncodeEmbeddings(const PhoneEmbeddings& emb, const std::vector<std::string>& symbols) {
  if (symbols.size() != static_cast<std::size_t>(emb.vectors.rows())) {
    throw ShapeError("symbol list does not match embedding rows");
  }
  const auto& c = emb.config;
  std::ostringstream out;
  out << "# mdd-embeddings rows=" << emb.vectors.rows() << " dim=" << emb.vectors.cols()
      << " window=" << c.window << " epochs=" << c.epochs << " lr=" << Exact(c.learning_rate)
      << " seed=" << c.seed << "\n";
  for (Eigen::Index i = 0; i < emb.vectors.rows(); ++i) {
    out << symbols[i];
    for (Eigen::Index j = 0; j < emb.vectors.cols(); ++j) out << ' ' << Exact(emb.vectors(i, j));
    out << '\n';
  }
  return out.str();
}

PhoneEmbeddings DecodeEmbeddings(const std::string& text, const std::vector<std::string>& symbols) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("# mdd-embeddings", 0) != 0) {
    throw ParseError("not an embeddings file");
  }
  PhoneEmbeddings emb;
  const int rows = static_cast<int>(ParseDouble(HeaderValue(header, "rows"), "rows"));
  const int dim = static_cast<int>(ParseDouble(HeaderValue(header, "dim"), "dim"));
  emb.config.dim = dim;
  emb.config.window = static_cast<int>(ParseDouble(HeaderValue(header, "window"), "window"));
  emb.config.epochs = static_cast<int>(ParseDouble(HeaderValue(header, "epochs"), "epochs"));
  emb.config.learning_rate = ParseDouble(HeaderValue(header, "lr"), "lr");
  emb.config.seed = std::stoull(HeaderValue(header, "seed"));
  if (rows != static_cast<int>(symbols.size()) || dim < 1) throw SchemaError("embedding shape mismatch");
  emb.vectors.resize(rows, dim);
  std::string line;
  for (int i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw ParseError("embeddings file truncated at row " + std::to_string(i));
    std::istringstream fields(line);
    std::string sym;
    fields >> sym;
    if (sym != symbols[i]) throw SchemaError("embedding row " + std::to_string(i) + " has symbol " + sym);
    for (int j = 0; j < dim; ++j) {
      std::string v;
      if (!(fields >> v)) throw ParseError("embedding row " + std::to_string(i) + " is short");
      emb.vectors(i, j) = ParseDouble(v, "embedding row " + std::to_string(i));
    }
    std::string extra;
    if (fields >> extra) throw ParseError("embedding row " + std::to_string(i) + " is long");
  }
  if (!emb.vectors.allFinite()) throw SchemaError("non-finite embedding value");
  return emb;
}

}  // namespace mdd
