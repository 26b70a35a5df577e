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

#include "mdd/numcore/layers.h"

#include <cmath>

#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {
namespace {

void RequireShape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

RowVector Sigmoid(const RowVector& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

// One cell step from the input projection `a` = W x + b.
RowVector CellForward(const Matrix& u, int hidden, const RowVector& a, const RowVector& h,
                      RowVector* z_out, RowVector* r_out, RowVector* n_out) {
  const int h3 = hidden;
  RowVector uh = h * u.topRows(2 * h3).transpose();
  RowVector z = Sigmoid(a.segment(0, h3) + uh.segment(0, h3));
  RowVector r = Sigmoid(a.segment(h3, h3) + uh.segment(h3, h3));
  RowVector rh = r.cwiseProduct(h);
  RowVector an = a.segment(2 * h3, h3) + rh * u.bottomRows(h3).transpose();
  RowVector n = an.array().tanh().matrix();
  RowVector h_new = (RowVector::Ones(h3) - z).cwiseProduct(n) + z.cwiseProduct(h);
  *z_out = std::move(z);
  *r_out = std::move(r);
  *n_out = std::move(n);
  return h_new;
}

// Backward of one cell step. Accumulates dU, returns dL/da (the gradient
// w.r.t. the input projection) and writes dL/dh_prev.
RowVector CellBackward(const Matrix& u, Matrix& du, int hidden, const RowVector& h,
                       const RowVector& z, const RowVector& r, const RowVector& n,
                       const RowVector& g, RowVector* dh_prev) {
  const int hh = hidden;
  RowVector dn = g.cwiseProduct(RowVector::Ones(hh) - z);
  RowVector dz = g.cwiseProduct(h - n);
  RowVector dh = g.cwiseProduct(z);

  RowVector dan = dn.cwiseProduct(RowVector::Ones(hh) - n.cwiseProduct(n));
  RowVector rh = r.cwiseProduct(h);
  du.bottomRows(hh).noalias() += dan.transpose() * rh;
  RowVector d_rh = dan * u.bottomRows(hh);
  RowVector dr = d_rh.cwiseProduct(h);
  dh += d_rh.cwiseProduct(r);

  RowVector dar = dr.cwiseProduct(r).cwiseProduct(RowVector::Ones(hh) - r);
  RowVector daz = dz.cwiseProduct(z).cwiseProduct(RowVector::Ones(hh) - z);
  du.topRows(hh).noalias() += daz.transpose() * h;
  du.middleRows(hh, hh).noalias() += dar.transpose() * h;
  dh += daz * u.topRows(hh) + dar * u.middleRows(hh, hh);

  RowVector da(3 * hh);
  da << daz, dar, dan;
  *dh_prev = std::move(dh);
  return da;
}

}  // namespace

Matrix LinearApply(const Matrix& w, const Matrix& b, const Matrix& x) {
  RequireShape(b.rows() == 1 && b.cols() == w.rows(),
               "linear bias " + ShapeString(b) + " does not match weight " + ShapeString(w));
  RequireShape(x.cols() == w.cols(),
               "linear input " + ShapeString(x) + " does not match weight " + ShapeString(w));
  Matrix y = x * w.transpose();
  y.rowwise() += b.row(0);
  return y;
}

LinearGrads LinearBackward(const Matrix& w, const Matrix& x, const Matrix& dy) {
  RequireShape(x.cols() == w.cols() && dy.cols() == w.rows() && dy.rows() == x.rows(),
               "linear backward shape mismatch");
  LinearGrads g;
  g.dw = dy.transpose() * x;
  g.db = dy.colwise().sum();
  if (dy.rows() == 0) g.db = Matrix::Zero(1, w.rows());
  g.dx = dy * w;
  return g;
}

LinearLayer LinearLayer::Create(ParamStore& params, const std::string& prefix, int in, int out) {
  LinearLayer l;
  l.in = in;
  l.out = out;
  l.w = params.Add(prefix + ".w", out, in);
  l.b = params.Add(prefix + ".b", 1, out);
  return l;
}

void LinearLayer::Init(ParamStore& params, Rng& rng) const {
  params.InitUniform(w, in, rng);
  params.InitUniform(b, in, rng);
}

Matrix LinearLayer::Forward(const ParamStore& params, const Matrix& x) const {
  return LinearApply(params.value(w), params.value(b), x);
}

Matrix LinearLayer::Backward(ParamStore& params, const Matrix& x, const Matrix& dy) const {
  LinearGrads g = LinearBackward(params.value(w), x, dy);
  params.grad(w) += g.dw;
  params.grad(b) += g.db;
  return g.dx;
}

Matrix LogSoftmaxRows(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double m = x.row(i).maxCoeff();
    const double lse = m + std::log((x.row(i).array() - m).exp().sum());
    out.row(i) = x.row(i).array() - lse;
  }
  return out;
}

Matrix LogSoftmaxBackward(const Matrix& log_probs, const Matrix& d_log_probs) {
  RequireShape(log_probs.rows() == d_log_probs.rows() && log_probs.cols() == d_log_probs.cols(),
               "log-softmax backward shape mismatch");
  Matrix dx(log_probs.rows(), log_probs.cols());
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) {
    const double total = d_log_probs.row(i).sum();
    dx.row(i) = d_log_probs.row(i).array() - log_probs.row(i).array().exp() * total;
  }
  return dx;
}

GruCell GruCell::Create(ParamStore& params, const std::string& prefix, int in, int hidden) {
  GruCell c;
  c.in = in;
  c.hidden = hidden;
  c.w = params.Add(prefix + ".w", 3 * hidden, in);
  c.u = params.Add(prefix + ".u", 3 * hidden, hidden);
  c.b = params.Add(prefix + ".b", 1, 3 * hidden);
  return c;
}

void GruCell::Init(ParamStore& params, Rng& rng) const {
  params.InitUniform(w, in, rng);
  params.InitUniform(u, hidden, rng);
  params.InitUniform(b, hidden, rng);
}

Matrix GruCell::Forward(const ParamStore& params, const Matrix& x, bool reverse,
                        GruCache* cache) const {
  RequireShape(x.cols() == in, "recurrent input width " + std::to_string(x.cols()) +
                                   " != " + std::to_string(in));
  const Eigen::Index steps = x.rows();
  const Matrix xp = LinearApply(params.value(w), params.value(b), x);
  const Matrix& uw = params.value(u);
  Matrix out(steps, hidden);
  if (cache) {
    cache->h_prev.resize(steps, hidden);
    cache->z.resize(steps, hidden);
    cache->r.resize(steps, hidden);
    cache->n.resize(steps, hidden);
  }
  RowVector h = RowVector::Zero(hidden);
  RowVector z, r, n;
  for (Eigen::Index s = 0; s < steps; ++s) {
    const Eigen::Index t = reverse ? steps - 1 - s : s;
    RowVector h_new = CellForward(uw, hidden, xp.row(t), h, &z, &r, &n);
    if (cache) {
      cache->h_prev.row(t) = h;
      cache->z.row(t) = z;
      cache->r.row(t) = r;
      cache->n.row(t) = n;
    }
    out.row(t) = h_new;
    h = std::move(h_new);
  }
  return out;
}

Matrix GruCell::Backward(ParamStore& params, const Matrix& x, const GruCache& cache,
                         const Matrix& dh, bool reverse) const {
  const Eigen::Index steps = x.rows();
  RequireShape(dh.rows() == steps && dh.cols() == hidden, "recurrent backward shape mismatch");
  const Matrix& uw = params.value(u);
  Matrix& du = params.grad(u);
  Matrix da(steps, 3 * hidden);
  RowVector carry = RowVector::Zero(hidden);
  for (Eigen::Index s = steps - 1; s >= 0; --s) {
    const Eigen::Index t = reverse ? steps - 1 - s : s;
    RowVector g = dh.row(t) + carry;
    da.row(t) = CellBackward(uw, du, hidden, cache.h_prev.row(t), cache.z.row(t),
                             cache.r.row(t), cache.n.row(t), g, &carry);
  }
  LinearGrads lg = LinearBackward(params.value(w), x, da);
  params.grad(w) += lg.dw;
  params.grad(b) += lg.db;
  return lg.dx;
}

RowVector GruCell::Step(const ParamStore& params, const RowVector& x, const RowVector& h,
                        StepCache* cache) const {
  RequireShape(x.cols() == in && h.cols() == hidden, "recurrent step shape mismatch");
  RowVector a = x * params.value(w).transpose() + params.value(b).row(0);
  RowVector z, r, n;
  RowVector h_new = CellForward(params.value(u), hidden, a, h, &z, &r, &n);
  if (cache) {
    cache->h_prev = h;
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->n = std::move(n);
  }
  return h_new;
}

void GruCell::StepBackward(ParamStore& params, const RowVector& x, const StepCache& cache,
                           const RowVector& dh_new, RowVector* dx, RowVector* dh_prev) const {
  RowVector da = CellBackward(params.value(u), params.grad(u), hidden, cache.h_prev, cache.z,
                              cache.r, cache.n, dh_new, dh_prev);
  params.grad(w).noalias() += da.transpose() * x;
  params.grad(b) += da;
  *dx = da * params.value(w);
}

RecurrentLayer RecurrentLayer::Create(ParamStore& params, const std::string& prefix, int in,
                                      int hidden, Direction direction) {
  RecurrentLayer l;
  l.direction = direction;
  l.hidden = hidden;
  if (direction != Direction::kBackward) l.fw = GruCell::Create(params, prefix + ".fw", in, hidden);
  if (direction != Direction::kForward) l.bw = GruCell::Create(params, prefix + ".bw", in, hidden);
  return l;
}

void RecurrentLayer::Init(ParamStore& params, Rng& rng) const {
  if (direction != Direction::kBackward) fw.Init(params, rng);
  if (direction != Direction::kForward) bw.Init(params, rng);
}

Matrix RecurrentLayer::Forward(const ParamStore& params, const Matrix& x,
                               RecurrentCache* cache) const {
  RequireShape(x.rows() >= 1, "recurrent layer needs at least one frame");
  switch (direction) {
    case Direction::kForward:
      return fw.Forward(params, x, false, cache ? &cache->fw : nullptr);
    case Direction::kBackward:
      return bw.Forward(params, x, true, cache ? &cache->bw : nullptr);
    case Direction::kBidirectional: {
      Matrix out(x.rows(), 2 * hidden);
      out.leftCols(hidden) = fw.Forward(params, x, false, cache ? &cache->fw : nullptr);
      out.rightCols(hidden) = bw.Forward(params, x, true, cache ? &cache->bw : nullptr);
      return out;
    }
  }
  return {};
}

Matrix RecurrentLayer::Backward(ParamStore& params, const Matrix& x, const RecurrentCache& cache,
                                const Matrix& dh) const {
  RequireShape(dh.rows() == x.rows() && dh.cols() == output_width(),
               "recurrent layer backward shape mismatch");
  switch (direction) {
    case Direction::kForward:
      return fw.Backward(params, x, cache.fw, dh, false);
    case Direction::kBackward:
      return bw.Backward(params, x, cache.bw, dh, true);
    case Direction::kBidirectional: {
      Matrix dx = fw.Backward(params, x, cache.fw, dh.leftCols(hidden), false);
      dx += bw.Backward(params, x, cache.bw, dh.rightCols(hidden), true);
      return dx;
    }
  }
  return {};
}

}  // namespace mdd
