# Copyright 2026 The mdd Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import mdd


def log_softmax(x):
    x = x - x.max(axis=1, keepdims=True)
    return x - np.log(np.exp(x).sum(axis=1, keepdims=True))


def test_inventory():
    symbols = mdd.phone_symbols()
    assert len(symbols) == 96
    assert symbols[48 + mdd.phone_index("z")] == "*z"
    assert symbols[mdd.collapse(mdd.phone_index("ao"))] == "aa"
    with pytest.raises(mdd.SchemaError):
        mdd.phone_index("qq")


def test_alignment_and_metrics():
    dh, iy, z, d, s = (mdd.phone_index(p) for p in ("dh", "iy", "z", "d", "s"))
    ops = mdd.align([dh, iy, z], [d, iy, s])
    assert [o[0] for o in ops] == ["substitution", "match", "substitution"]
    assert mdd.edit_distance([d], []) == 1
    assert mdd.align([d], []) == [("deletion", d, None)]
    assert mdd.f1_score(43.80, 61.23) == pytest.approx(51.07, abs=0.01)
    prf = mdd.prf_from_counts(4, 5, 3)
    assert prf["precision"] == pytest.approx(0.75)
    assert prf["f1"] == pytest.approx(2 / 3)
    assert mdd.phone_error_rate([list(range(10))], [[0, 1, 7, 3, 4, 6, 7, 8, 9]]) == pytest.approx(20.0)
    md = mdd.md_prf([dh, iy, z], [d, iy, z], [d, iy, z])
    assert md["f1"] == 1.0
    with pytest.raises(mdd.ConfigError):
        mdd.phone_error_rate([], [])


def test_ctc_matches_enumeration():
    rng = np.random.default_rng(0)
    lp = log_softmax(rng.normal(size=(4, 3)))
    total = 0.0
    for path in np.ndindex(3, 3, 3, 3):
        collapsed, prev = [], None
        for sym in path:
            if sym != prev and sym != 0:
                collapsed.append(sym)
            prev = sym
        if collapsed == [1, 2]:
            total += math.exp(sum(lp[t, sym] for t, sym in enumerate(path)))
    loss, grad = mdd.ctc_loss(lp, [1, 2], 0)
    assert loss == pytest.approx(-math.log(total), abs=1e-9)
    assert grad.shape == (4, 3)
    with pytest.raises(mdd.InfeasibleTarget):
        mdd.ctc_loss(lp[:1], [1, 2], 0)


def test_distributions():
    uni = mdd.unigram_distribution([[0, 1, 1], [2]], 4)
    assert sum(uni) == pytest.approx(1.0, abs=1e-12)
    mixed = mdd.interpolate_distributions([0.5, 0.5], [0.8, 0.2], 0.1)
    assert mixed == pytest.approx([0.77, 0.23])
    assert mdd.cbow_distribution(np.ones((5, 3))) == pytest.approx([0.2] * 5)
    value, grad = mdd.kl_penalty([0.5, 0.5], np.log([0.5, 0.5]))
    assert value == pytest.approx(0.0, abs=1e-15)
    assert list(grad) == pytest.approx([-0.5, -0.5])


def test_forced_alignment_and_gop():
    ppg = np.full((5, 4), 0.1)
    ppg[:2, 1] = 0.7
    ppg[2:, 3] = 0.7
    segments, score = mdd.forced_align(ppg, [1, 3])
    assert segments == [(0, 2), (2, 5)]
    assert score == pytest.approx(5 * math.log(0.7))
    assert mdd.gop_scores(ppg, segments, [1, 3]) == [0.0, 0.0]
    threshold, f1 = mdd.calibrate_threshold([(-5.0, True), (-4.0, True), (-0.1, False), (0.0, False)])
    assert f1 == 1.0
    assert -4.0 < threshold < -0.1


def test_pipeline_runs_on_a_tiny_corpus(tmp_path):
    cfg = mdd.ExperimentConfig()
    cfg.work_dir = str(tmp_path)
    cfg.load(
        "corpus.train = 16\ncorpus.dev = 4\ncorpus.test = 12\n"
        "am.epochs = 1\nam.hidden = 16\ntrain.max_epochs = 1\n"
        "model.encoder_hidden = 8\nmodel.decoder_hidden = 8\n"
    )
    mdd.gen_corpus(cfg)
    mdd.train_am(cfg)
    mdd.extract_ppg(cfg)
    cfg.input_aug = True
    assert mdd.condition_name(cfg) == "ia"
    mdd.train_md(cfg)
    mdd.decode(cfg)
    row = mdd.evaluate(cfg, "ia")
    assert row["model"] == "CTC-ATT"
    assert row["input_aug"] is True
    assert len(row["group_md_f1"]) == 6
    assert 0.0 <= row["md"][2] <= 100.0
    rows = mdd.report(cfg)
    assert [r["model"] for r in rows] == ["CTC-ATT"]
    with pytest.raises(mdd.ConfigError):
        cfg.set("no.such.key", 1)
