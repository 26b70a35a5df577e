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

#pragma once

#include <string>

#include "mdd/numcore/matrix.h"
#include "mdd/numcore/params.h"

namespace mdd {

class Rng;

// ---- Affine map -----------------------------------------------------------

// Y = X W^T + b, with W: out x in, b: 1 x out, X: n x in. ShapeError on
// disagreement.
Matrix LinearApply(const Matrix& w, const Matrix& b, const Matrix& x);

struct LinearGrads {
  Matrix dw;
  Matrix db;
  Matrix dx;
};
LinearGrads LinearBackward(const Matrix& w, const Matrix& x, const Matrix& dy);

struct LinearLayer {
  int w = -1;
  int b = -1;
  int in = 0;
  int out = 0;

  static LinearLayer Create(ParamStore& params, const std::string& prefix, int in, int out);
  void Init(ParamStore& params, Rng& rng) const;
  Matrix Forward(const ParamStore& params, const Matrix& x) const;
  // Accumulates dW, db into the store and returns dX.
  Matrix Backward(ParamStore& params, const Matrix& x, const Matrix& dy) const;
};

// ---- Log-softmax ----------------------------------------------------------

// Row-wise, with max subtraction.
Matrix LogSoftmaxRows(const Matrix& x);
// Given the forward output and dL/d(output), returns dL/dx.
Matrix LogSoftmaxBackward(const Matrix& log_probs, const Matrix& d_log_probs);

// ---- Gated recurrent cell ---------------------------------------------------

// Two-gate cell over rows of X:
//   z = sigmoid(Wz x + Uz h + bz), r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wn x + Un (r * h) + bn), h' = (1 - z) * n + z * h
// Stacked as W: 3H x in, U: 3H x H, b: 1 x 3H in z, r, n order. h0 = 0.
struct GruCache {
  Matrix h_prev;  // T x H, state entering each step
  Matrix z, r, n; // T x H
};

struct GruCell {
  int w = -1;
  int u = -1;
  int b = -1;
  int in = 0;
  int hidden = 0;

  static GruCell Create(ParamStore& params, const std::string& prefix, int in, int hidden);
  void Init(ParamStore& params, Rng& rng) const;

  // Runs over all rows; reverse=true consumes rows from last to first. Row t
  // of the output is the state after consuming row t.
  Matrix Forward(const ParamStore& params, const Matrix& x, bool reverse, GruCache* cache) const;
  Matrix Backward(ParamStore& params, const Matrix& x, const GruCache& cache,
                  const Matrix& dh, bool reverse) const;

  // Single step for decoders. Returns the new state.
  struct StepCache {
    RowVector h_prev, z, r, n;
  };
  RowVector Step(const ParamStore& params, const RowVector& x, const RowVector& h,
                 StepCache* cache) const;
  // Accumulates parameter gradients, writes dL/dx and dL/dh_prev.
  void StepBackward(ParamStore& params, const RowVector& x, const StepCache& cache,
                    const RowVector& dh_new, RowVector* dx, RowVector* dh_prev) const;
};

enum class Direction { kForward, kBackward, kBidirectional };

struct RecurrentCache {
  GruCache fw;
  GruCache bw;
};

// A recurrent layer over a T x F sequence. Bidirectional output is
// [forward states | backward states], width 2 * hidden.
struct RecurrentLayer {
  Direction direction = Direction::kBidirectional;
  GruCell fw;
  GruCell bw;
  int hidden = 0;

  static RecurrentLayer Create(ParamStore& params, const std::string& prefix, int in,
                               int hidden, Direction direction);
  void Init(ParamStore& params, Rng& rng) const;
  int output_width() const { return direction == Direction::kBidirectional ? 2 * hidden : hidden; }

  // ShapeError if T < 1 or the width disagrees.
  Matrix Forward(const ParamStore& params, const Matrix& x, RecurrentCache* cache) const;
  Matrix Backward(ParamStore& params, const Matrix& x, const RecurrentCache& cache,
                  const Matrix& dh) const;
};

}  // namespace mdd
