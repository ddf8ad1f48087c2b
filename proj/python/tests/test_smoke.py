# Copyright 2026 The qvib Authors
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


import json
import math

import numpy as np
import pytest

import qvib


def test_schedule_axes():
    s = qvib.SimulationSchedule(2.5, 400.0)
    assert s.n_steps == 160
    assert s.d_omega_thz == pytest.approx(1.25)
    assert s.omega_max_thz == pytest.approx(200.0)


def test_kak_roundtrip():
    rng = np.random.default_rng(3)
    z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q, _ = np.linalg.qr(z)
    c = qvib.kak_compile(q)
    assert c.cnot_count <= 3
    assert qvib.phase_aligned_distance(c.unitary(), q) < 1e-9
    assert c.to_jsonl().count("\n") >= len(c.gates)


def test_simulate_and_sample():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    c = qvib.kak_compile(q)
    amp = qvib.simulate(c)
    assert np.linalg.norm(amp) == pytest.approx(1.0)
    p = np.abs(amp) ** 2
    counts = qvib.sample(p, 1000, 5)
    assert sum(counts) == 1000
    assert counts == qvib.sample(p, 1000, 5)
    assert np.allclose(qvib.apply_noise(c, 0.0), p, atol=1e-12)


def test_givens_blocks():
    g = qvib.build_grid(8, 2.0)
    k = qvib.daf_kinetic(g, 1836.0)
    v = np.diag(0.01 * np.asarray(g.points) ** 2)
    d = qvib.givens_transform(k + v)
    assert d["offdiag_residual"] <= 1e-12
    ev = np.sort(np.concatenate([np.linalg.eigvalsh(d["upper"]), np.linalg.eigvalsh(d["lower"])]))
    assert np.allclose(ev, np.linalg.eigvalsh(k + v), atol=1e-10)


def test_turnpike():
    levels = qvib.turnpike([qvib.Peak(1.0), qvib.Peak(2.0), qvib.Peak(3.0)], 0, 0.1)
    assert np.allclose(levels, [0.0, 1.0, 3.0])


def test_config_text():
    cfg = qvib.PipelineConfig.from_toml("[run]\nshots = 64\n")
    assert cfg.shots == 64
    with pytest.raises(qvib.ParseError):
        qvib.PipelineConfig.from_toml("[run]\nbogus = 1\n")


def test_in_memory_pipeline():
    cfg = qvib.PipelineConfig()
    cfg.statevector = True
    cfg.workers = 2
    mae, errors, ladders, results = qvib.run_in_memory(cfg)
    assert mae <= 0.2
    assert len(errors) == 16
    assert max(errors.values()) <= 1e-6
    assert len(ladders["x1"]) == 8
    assert len(json.loads(results)) > 2000


def test_staged_pipeline(tmp_path):
    cfg = qvib.PipelineConfig()
    cfg.statevector = True
    cfg.outdir = str(tmp_path / "o")
    with pytest.raises(qvib.IncompleteError):
        qvib.cmd_factorize(cfg)
    out = qvib.run_pipeline(cfg)
    assert out[3].startswith("run: ")
    summary = json.loads((tmp_path / "o" / "report" / "summary.json").read_text())
    assert math.isfinite(summary["mae_kcal_mol"])
    assert summary["mae_kcal_mol"] <= 0.2
