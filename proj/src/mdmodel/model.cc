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

#include "mdd/mdmodel/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "mdd/ctc/ctc.h"
#include "mdd/errors.h"
#include "mdd/numcore/archive.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

constexpr double kPpgRowTolerance = 1e-4;

std::string Num(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

// Rows of x grouped `d` at a time into rows of width d * F; the last group
// is zero padded.
Matrix StackFrames(const Matrix& x, int d) {
  const int t = static_cast<int>(x.rows());
  const int f = static_cast<int>(x.cols());
  Matrix out = Matrix::Zero(DownsampledLength(t, d), static_cast<Eigen::Index>(d) * f);
  for (int i = 0; i < t; ++i) out.block(i / d, (i % d) * f, 1, f) = x.row(i);
  return out;
}

RowVector Concat(const RowVector& a, const RowVector& b) {
  RowVector out(a.size() + b.size());
  out << a, b;
  return out;
}

}  // namespace

// ---- Config -------------------------------------------------------------

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("model config: " + what);
  };
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(!use_input_augmentation || ppg_dim >= 1, "ppg_dim must be >= 1");
  require(encoder_hidden >= 1 && decoder_hidden >= 1, "hidden sizes must be >= 1");
  require(attention_dim >= 1 && embedding_dim >= 1, "attention/embedding sizes must be >= 1");
  require(downsample >= 1, "downsample must be >= 1");
  require(ctc_vocab == kCtcVocabSize, "ctc_vocab must be " + std::to_string(kCtcVocabSize));
  require(att_vocab == kAttVocabSize, "att_vocab must be " + std::to_string(kAttVocabSize));
  require(lambda_train >= 0.0 && lambda_train <= 1.0, "lambda_train must lie in [0,1]");
  require(lambda_decode >= 0.0 && lambda_decode <= 1.0, "lambda_decode must lie in [0,1]");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be >= 0");
  require(beam >= 1, "beam must be >= 1");
}

std::string EncodeModelConfig(const ModelConfig& c) {
  std::ostringstream out;
  out << "feature_dim=" << c.feature_dim << "\n"
      << "use_input_augmentation=" << (c.use_input_augmentation ? 1 : 0) << "\n"
      << "ppg_dim=" << c.ppg_dim << "\n"
      << "encoder_hidden=" << c.encoder_hidden << "\n"
      << "decoder_hidden=" << c.decoder_hidden << "\n"
      << "attention_dim=" << c.attention_dim << "\n"
      << "embedding_dim=" << c.embedding_dim << "\n"
      << "downsample=" << c.downsample << "\n"
      << "ctc_vocab=" << c.ctc_vocab << "\n"
      << "att_vocab=" << c.att_vocab << "\n"
      << "lambda_train=" << Num(c.lambda_train) << "\n"
      << "lambda_decode=" << Num(c.lambda_decode) << "\n"
      << "alpha=" << Num(c.alpha) << "\n"
      << "beam=" << c.beam << "\n";
  return out.str();
}

ModelConfig DecodeModelConfig(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SchemaError("bad model config line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw SchemaError("model config lacks " + key);
    return it->second;
  };
  ModelConfig c;
  try {
    c.feature_dim = std::stoi(get("feature_dim"));
    c.use_input_augmentation = std::stoi(get("use_input_augmentation")) != 0;
    c.ppg_dim = std::stoi(get("ppg_dim"));
    c.encoder_hidden = std::stoi(get("encoder_hidden"));
    c.decoder_hidden = std::stoi(get("decoder_hidden"));
    c.attention_dim = std::stoi(get("attention_dim"));
    c.embedding_dim = std::stoi(get("embedding_dim"));
    c.downsample = std::stoi(get("downsample"));
    c.ctc_vocab = std::stoi(get("ctc_vocab"));
    c.att_vocab = std::stoi(get("att_vocab"));
    c.lambda_train = std::stod(get("lambda_train"));
    c.lambda_decode = std::stod(get("lambda_decode"));
    c.alpha = std::stod(get("alpha"));
    c.beam = std::stoi(get("beam"));
  } catch (const std::logic_error&) {
    throw SchemaError("malformed value in model config");
  }
  c.Validate();
  return c;
}

int DownsampledLength(int num_frames, int downsample) {
  return (num_frames + downsample - 1) / downsample;
}

double CombineScores(double ctc_log_prob, double att_log_prob, double lambda) {
  if (lambda == 0.0) return att_log_prob;
  if (lambda == 1.0) return ctc_log_prob;
  return lambda * ctc_log_prob + (1.0 - lambda) * att_log_prob;
}

void RankHypotheses(std::vector<Hypothesis>& hyps) {
  std::stable_sort(hyps.begin(), hyps.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.combined > b.combined; });
}

// ---- Model --------------------------------------------------------------

struct MdModel::StepCache {
  RowVector s_prev;
  Matrix act;       // T' x A, tanh(K + q)
  RowVector alpha;  // 1 x T'
  RowVector c;      // 1 x E
  RowVector x;      // [emb | c]
  GruCell::StepCache gru;
  RowVector sc;     // [s | c]
  RowVector lp;     // 1 x V
  int y_prev = 0;
};

MdModel::MdModel(const ModelConfig& config) : config_(config) {
  config_.Validate();
  const int in = config_.encoder_input_dim() * config_.downsample;
  const int e = config_.encoder_output_dim();
  encoder_ = RecurrentLayer::Create(params_, "enc", in, config_.encoder_hidden, Direction::kBidirectional);
  ctc_out_ = LinearLayer::Create(params_, "ctc.out", e, config_.ctc_vocab);
  embedding_ = params_.Add("dec.emb", config_.att_vocab, config_.embedding_dim);
  att_wk_ = params_.Add("att.wk", config_.attention_dim, e);
  att_wq_ = params_.Add("att.wq", config_.attention_dim, config_.decoder_hidden);
  att_b_ = params_.Add("att.b", 1, config_.attention_dim);
  att_v_ = params_.Add("att.v", 1, config_.attention_dim);
  decoder_ = GruCell::Create(params_, "dec.gru", config_.embedding_dim + e, config_.decoder_hidden);
  att_out_ = LinearLayer::Create(params_, "dec.out", config_.decoder_hidden + e, config_.att_vocab);
}

void MdModel::Init(std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, "mdmodel.init"));
  encoder_.Init(params_, rng);
  ctc_out_.Init(params_, rng);
  params_.InitUniform(embedding_, config_.embedding_dim, rng);
  params_.InitUniform(att_wk_, config_.encoder_output_dim(), rng);
  params_.InitUniform(att_wq_, config_.decoder_hidden, rng);
  params_.InitUniform(att_v_, config_.attention_dim, rng);
  decoder_.Init(params_, rng);
  att_out_.Init(params_, rng);
}

Matrix MdModel::EncoderInput(const Matrix& features, const Matrix* ppg) const {
  if (features.cols() != config_.feature_dim) {
    throw ShapeError("features have width " + std::to_string(features.cols()) + ", model expects " +
                     std::to_string(config_.feature_dim));
  }
  if (features.rows() < 1) throw ShapeError("empty feature matrix");
  if (!config_.use_input_augmentation) {
    if (ppg) throw ConfigError("model without input augmentation does not accept a posteriorgram");
    return features;
  }
  if (!ppg) throw ConfigError("input augmentation requires a posteriorgram");
  if (ppg->rows() != features.rows() || ppg->cols() != config_.ppg_dim) {
    throw ShapeError("posteriorgram is " + ShapeString(*ppg) + ", expected " +
                     std::to_string(features.rows()) + "x" + std::to_string(config_.ppg_dim));
  }
  for (Eigen::Index t = 0; t < ppg->rows(); ++t) {
    if (std::abs(ppg->row(t).sum() - 1.0) > kPpgRowTolerance || ppg->row(t).minCoeff() < 0.0) {
      throw ShapeError("posteriorgram row " + std::to_string(t) + " is not a distribution");
    }
  }
  Matrix out(features.rows(), features.cols() + ppg->cols());
  out << features, *ppg;
  return out;
}

Matrix MdModel::Encode(const Matrix& features, const Matrix* ppg) const {
  return encoder_.Forward(params_, StackFrames(EncoderInput(features, ppg), config_.downsample), nullptr);
}

Matrix MdModel::CtcLogProbs(const Matrix& encoded) const {
  return LogSoftmaxRows(ctc_out_.Forward(params_, encoded));
}

RowVector MdModel::DecoderStep(const Matrix& encoded, const Matrix& keys, const RowVector& s_prev,
                               int y_prev, StepCache* cache, RowVector* s_out) const {
  const RowVector q = s_prev * params_.value(att_wq_).transpose() + params_.value(att_b_);
  Matrix act = (keys.rowwise() + q).array().tanh().matrix();
  RowVector energy = (act * params_.value(att_v_).transpose()).transpose();
  RowVector alpha = (energy.array() - energy.maxCoeff()).exp().matrix();
  alpha /= alpha.sum();
  RowVector c = alpha * encoded;
  RowVector x = Concat(params_.value(embedding_).row(y_prev), c);
  GruCell::StepCache gc;
  RowVector s = decoder_.Step(params_, x, s_prev, cache ? &gc : nullptr);
  RowVector sc = Concat(s, c);
  RowVector lp = LogSoftmaxRows(att_out_.Forward(params_, sc));
  if (cache) {
    cache->s_prev = s_prev;
    cache->act = std::move(act);
    cache->alpha = alpha;
    cache->c = c;
    cache->x = std::move(x);
    cache->gru = std::move(gc);
    cache->sc = std::move(sc);
    cache->lp = lp;
    cache->y_prev = y_prev;
  }
  *s_out = std::move(s);
  return lp;
}

TeacherForcedOutput MdModel::DecodeTeacherForced(const Matrix& encoded,
                                                 const std::vector<int>& reference) const {
  if (reference.empty()) throw ShapeError("teacher forcing needs a nonempty reference");
  if (encoded.cols() != config_.encoder_output_dim()) throw ShapeError("encoder output width mismatch");
  for (int y : reference) {
    if (!IsPhoneId(y)) throw ShapeError("reference symbol out of range: " + std::to_string(y));
  }
  const Matrix keys = encoded * params_.value(att_wk_).transpose();
  const int steps = static_cast<int>(reference.size()) + 1;
  TeacherForcedOutput out;
  out.log_probs.resize(steps, config_.att_vocab);
  out.attention.resize(steps, encoded.rows());
  RowVector s = RowVector::Zero(config_.decoder_hidden);
  StepCache cache;
  for (int l = 0; l < steps; ++l) {
    const int y_prev = l == 0 ? kAttSos : reference[l - 1];
    RowVector s_new;
    out.log_probs.row(l) = DecoderStep(encoded, keys, s, y_prev, &cache, &s_new);
    out.attention.row(l) = cache.alpha;
    s = std::move(s_new);
  }
  return out;
}

double MdModel::UtteranceObjective(const MdExample& ex, double lambda,
                                   const SmoothingDistribution* smoothing, double alpha,
                                   double weight, bool with_grad, ObjectiveTerms* terms) {
  if (ex.target.empty()) throw ShapeError("utterance " + ex.id + " has an empty target");
  const Matrix xs = StackFrames(EncoderInput(ex.features, ex.ppg ? &*ex.ppg : nullptr), config_.downsample);
  RecurrentCache rc;
  const Matrix h = encoder_.Forward(params_, xs, with_grad ? &rc : nullptr);

  // CTC head.
  const Matrix ctc_lp = CtcLogProbs(h);
  const CtcResult ctc = CtcForwardBackward(ctc_lp, ex.target, kCtcBlank);

  // Attention head, teacher forced.
  const Matrix keys = h * params_.value(att_wk_).transpose();
  const int steps = static_cast<int>(ex.target.size()) + 1;
  std::vector<StepCache> caches(steps);
  RowVector s = RowVector::Zero(config_.decoder_hidden);
  double att_nll = 0.0;
  double kl = 0.0;
  std::vector<RowVector> kl_grads;
  for (int l = 0; l < steps; ++l) {
    const int y_prev = l == 0 ? kAttSos : ex.target[l - 1];
    const int y = l + 1 < steps ? ex.target[l] : kAttEos;
    RowVector s_new;
    const RowVector lp = DecoderStep(h, keys, s, y_prev, &caches[l], &s_new);
    s = std::move(s_new);
    att_nll -= lp[y];
    if (alpha > 0.0) {
      KlPenaltyResult k = KlPenalty(*smoothing, lp);
      kl += k.value;
      kl_grads.push_back(std::move(k.grad));
    }
  }
  kl /= steps;

  const double att_weight = lambda == 1.0 ? 0.0 : 1.0 - lambda;
  double total = att_weight * att_nll + alpha * kl;
  if (lambda > 0.0) total += lambda * ctc.loss;
  if (!std::isfinite(total)) throw NumericError("non-finite objective on utterance " + ex.id);
  terms->ctc += weight * ctc.loss;
  terms->att += weight * att_nll;
  terms->kl += weight * kl;
  if (!with_grad) return total;

  // Decoder backward.
  const int e = config_.encoder_output_dim();
  const int hd = config_.decoder_hidden;
  const int de = config_.embedding_dim;
  Matrix dh = Matrix::Zero(h.rows(), h.cols());
  Matrix dkeys = Matrix::Zero(keys.rows(), keys.cols());
  RowVector ds_next = RowVector::Zero(hd);
  const Matrix& wq = params_.value(att_wq_);
  const RowVector v = params_.value(att_v_);
  for (int l = steps - 1; l >= 0; --l) {
    const StepCache& c = caches[l];
    const int y = l + 1 < steps ? ex.target[l] : kAttEos;
    RowVector dlp = RowVector::Zero(config_.att_vocab);
    dlp[y] -= weight * att_weight;
    if (alpha > 0.0) dlp += (weight * alpha / steps) * kl_grads[l];
    const Matrix dlogits = LogSoftmaxBackward(c.lp, dlp);
    const RowVector dsc = att_out_.Backward(params_, c.sc, dlogits);
    RowVector ds = dsc.head(hd) + ds_next;
    RowVector dctx = dsc.tail(e);
    RowVector dx;
    RowVector ds_prev;
    decoder_.StepBackward(params_, c.x, c.gru, ds, &dx, &ds_prev);
    params_.grad(embedding_).row(c.y_prev) += dx.head(de);
    dctx += dx.tail(e);
    // c = alpha * H
    dh.noalias() += c.alpha.transpose() * dctx;
    const RowVector dalpha = (h * dctx.transpose()).transpose();
    const double dot = c.alpha.dot(dalpha);
    const RowVector denergy = (c.alpha.array() * (dalpha.array() - dot)).matrix();
    // energy_t = v . act_t
    params_.grad(att_v_).noalias() += denergy * c.act;
    const Matrix dpre = ((denergy.transpose() * v).array() * (1.0 - c.act.array().square())).matrix();
    dkeys += dpre;
    const RowVector dq = dpre.colwise().sum();
    params_.grad(att_wq_).noalias() += dq.transpose() * c.s_prev;
    params_.grad(att_b_) += dq;
    ds_prev.noalias() += dq * wq;
    ds_next = std::move(ds_prev);
  }
  params_.grad(att_wk_).noalias() += dkeys.transpose() * h;
  dh.noalias() += dkeys * params_.value(att_wk_);

  // CTC head backward.
  if (lambda > 0.0) {
    const Matrix dlogits = LogSoftmaxBackward(ctc_lp, (weight * lambda) * ctc.grad);
    dh += ctc_out_.Backward(params_, h, dlogits);
  }
  encoder_.Backward(params_, xs, rc, dh);
  return total;
}

ObjectiveTerms MdModel::Objective(const std::vector<const MdExample*>& batch, double lambda,
                                  const SmoothingDistribution* smoothing, double alpha, bool with_grad) {
  if (batch.empty()) throw ConfigError("objective over an empty batch");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0,1]");
  if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
  if (alpha > 0.0) {
    if (!smoothing) throw ConfigError("alpha > 0 requires a smoothing distribution");
    if (smoothing->size() != config_.att_vocab) {
      throw ShapeError("smoothing distribution has " + std::to_string(smoothing->size()) +
                       " entries, the attention head has " + std::to_string(config_.att_vocab));
    }
  }
  if (with_grad) params_.ZeroGrad();
  const double weight = 1.0 / static_cast<double>(batch.size());
  ObjectiveTerms terms;
  for (const MdExample* ex : batch) {
    terms.total += weight * UtteranceObjective(*ex, lambda, smoothing, alpha, weight, with_grad, &terms);
  }
  if (!std::isfinite(terms.total)) throw NumericError("non-finite objective");
  return terms;
}

std::vector<Hypothesis> MdModel::BeamSearch(const Matrix& features, const Matrix* ppg, double lambda,
                                            int beam) const {
  if (beam < 1) throw ConfigError("beam must be >= 1");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0,1]");
  const Matrix h = Encode(features, ppg);
  const Matrix keys = h * params_.value(att_wk_).transpose();
  const int max_len = 2 * static_cast<int>(h.rows());

  struct Partial {
    std::vector<int> symbols;
    RowVector s;
    double score = 0.0;
  };
  std::vector<Partial> alive(1);
  alive[0].s = RowVector::Zero(config_.decoder_hidden);
  std::vector<Hypothesis> finished;

  for (int len = 0; !alive.empty(); ++len) {
    struct Candidate {
      double score;
      int parent;
      int token;
    };
    std::vector<Candidate> candidates;
    std::vector<RowVector> states(alive.size());
    for (std::size_t p = 0; p < alive.size(); ++p) {
      const int y_prev = alive[p].symbols.empty() ? kAttSos : alive[p].symbols.back();
      const RowVector lp = DecoderStep(h, keys, alive[p].s, y_prev, nullptr, &states[p]);
      if (len == max_len) {
        // Length cap: close every survivor with its eos probability.
        candidates.push_back({alive[p].score + lp[kAttEos], static_cast<int>(p), kAttEos});
        continue;
      }
      for (int k = 0; k < config_.att_vocab; ++k) {
        if (k == kAttSos) continue;
        candidates.push_back({alive[p].score + lp[k], static_cast<int>(p), k});
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    const std::size_t keep = len == max_len ? candidates.size()
                                            : std::min<std::size_t>(beam, candidates.size());
    std::vector<Partial> next;
    for (std::size_t i = 0; i < keep; ++i) {
      const Candidate& c = candidates[i];
      if (c.token == kAttEos) {
        Hypothesis hyp;
        hyp.symbols = alive[c.parent].symbols;
        hyp.att_log_prob = c.score;
        finished.push_back(std::move(hyp));
      } else {
        Partial n;
        n.symbols = alive[c.parent].symbols;
        n.symbols.push_back(c.token);
        n.s = states[c.parent];
        n.score = c.score;
        next.push_back(std::move(n));
      }
    }
    alive = std::move(next);
    if (static_cast<int>(finished.size()) >= beam) break;
  }

  const Matrix ctc_lp = CtcLogProbs(h);
  for (auto& hyp : finished) {
    hyp.ctc_log_prob = CtcLabelLogProb(ctc_lp, hyp.symbols, kCtcBlank);
    hyp.combined = CombineScores(hyp.ctc_log_prob, hyp.att_log_prob, lambda);
  }
  RankHypotheses(finished);
  return finished;
}

Hypothesis MdModel::Decode(const MdExample& example) const {
  auto nbest = BeamSearch(example.features, example.ppg ? &*example.ppg : nullptr,
                          config_.lambda_decode, config_.beam);
  return nbest.front();
}

std::vector<int> MdModel::GreedyDecode(const Matrix& features, const Matrix* ppg) const {
  const Matrix h = Encode(features, ppg);
  const Matrix keys = h * params_.value(att_wk_).transpose();
  const int max_len = 2 * static_cast<int>(h.rows());
  std::vector<int> out;
  RowVector s = RowVector::Zero(config_.decoder_hidden);
  while (static_cast<int>(out.size()) < max_len) {
    RowVector s_new;
    RowVector lp = DecoderStep(h, keys, s, out.empty() ? kAttSos : out.back(), nullptr, &s_new);
    lp[kAttSos] = -std::numeric_limits<double>::infinity();
    Eigen::Index best = 0;
    lp.maxCoeff(&best);
    if (best == kAttEos) break;
    out.push_back(static_cast<int>(best));
    s = std::move(s_new);
  }
  return out;
}

// ---- Training -----------------------------------------------------------

void TrainConfig::Validate() const {
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("lr_decay must lie in (0,1]");
  if (decay_after < 1) throw ConfigError("decay_after must be >= 1");
}

double DevAttentionNll(const MdModel& model, const std::vector<MdExample>& dev) {
  double nll = 0.0;
  long tokens = 0;
  for (const auto& ex : dev) {
    const Matrix h = model.Encode(ex.features, ex.ppg ? &*ex.ppg : nullptr);
    const TeacherForcedOutput tf = model.DecodeTeacherForced(h, ex.target);
    for (std::size_t l = 0; l <= ex.target.size(); ++l) {
      nll -= tf.log_probs(l, l < ex.target.size() ? ex.target[l] : kAttEos);
    }
    tokens += static_cast<long>(ex.target.size()) + 1;
  }
  return tokens ? nll / static_cast<double>(tokens) : 0.0;
}

MdModel TrainMdModel(const ModelConfig& model_config, const TrainConfig& tc,
                     const std::vector<MdExample>& train, const std::vector<MdExample>& dev,
                     const SmoothingDistribution* smoothing, TrainingMetadata* metadata,
                     const std::function<void(const EpochLog&)>& on_epoch) {
  tc.Validate();
  if (train.empty()) throw ConfigError("train split is empty");
  if (dev.empty()) throw ConfigError("dev split is empty");
  MdModel model(model_config);
  model.Init(tc.seed);
  RoundParamsToFloat(model.params());
  AdamOptimizer adam(tc.adam);

  std::vector<NamedTensor> best = SnapshotParams(model.params());
  TrainingMetadata meta;
  meta.seed = tc.seed;
  double best_dev = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  const std::uint64_t shuffle_seed = DeriveSeed(tc.seed, "mdmodel.shuffle");
  const std::uint64_t augment_seed = DeriveSeed(tc.seed, "mdmodel.specaug");

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    Rng rng(DeriveSeed(shuffle_seed, static_cast<std::uint64_t>(epoch)));
    rng.Shuffle(order);
    double loss_sum = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t end = std::min(order.size(), start + tc.batch_size);
      std::vector<MdExample> augmented;
      std::vector<const MdExample*> batch;
      if (tc.spec_augment) augmented.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const MdExample& ex = train[order[i]];
        if (!tc.spec_augment) {
          batch.push_back(&ex);
          continue;
        }
        MdExample copy = ex;
        const std::uint64_t s = DeriveSeed(DeriveSeed(augment_seed, static_cast<std::uint64_t>(epoch)),
                                           static_cast<std::uint64_t>(order[i]));
        copy.features = SpecAugment(ex.features, tc.spec_policy, s);
        augmented.push_back(std::move(copy));
        batch.push_back(&augmented.back());
      }
      ObjectiveTerms terms;
      try {
        terms = model.Objective(batch, model_config.lambda_train, smoothing, model_config.alpha, true);
        adam.Step(model.params());
      } catch (const NumericError& e) {
        throw NumericError("training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
      }
      loss_sum += terms.total;
      ++batches;
    }
    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / batches;
    log.dev_att_nll = DevAttentionNll(model, dev);
    if (!std::isfinite(log.train_loss) || !std::isfinite(log.dev_att_nll)) {
      throw NumericError("training diverged in epoch " + std::to_string(epoch));
    }
    meta.epochs_run = epoch;
    if (on_epoch) on_epoch(log);
    if (log.dev_att_nll < best_dev) {
      best_dev = log.dev_att_nll;
      best = SnapshotParams(model.params());
      meta.epoch = epoch;
      meta.dev_metric = best_dev;
      since_best = 0;
    } else {
      if (++since_best >= tc.patience) break;
      if (since_best % tc.decay_after == 0) {
        adam.set_learning_rate(adam.config().learning_rate * tc.lr_decay);
      }
    }
  }
  RestoreParams(best, model.params());
  RoundParamsToFloat(model.params());
  if (metadata) *metadata = meta;
  return model;
}

}  // namespace mdd
