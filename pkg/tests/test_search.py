import json
from dataclasses import replace

import numpy as np
import pytest

from araki import inequalities as iq
from araki import search as se
from araki.errors import CorruptState, HypothesisViolated
from araki.functions import indicator
from araki.search import SearchConfig, confirm, load_state, refine, run_search
from araki.sweep import SweepConfig, injected_instance, run_sweep


def _first_candidate(target="conj1", grid=({"s": 1.5},), dims=(2,), seed=5):
    cfg = SearchConfig(target, grid=grid, dims=dims, budget=20, seed=seed, refine_steps=200)
    out = run_search(replace(cfg, refine_steps=0))
    return cfg, out.summary.lowest[0]


def _dump(out):
    return [r.to_dict() for r in out.records()], out.report_summary(), [r.to_dict() for r in out.confirmed]


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig("main_direct")
    with pytest.raises(HypothesisViolated):
        SearchConfig("conj1", grid=({"s": 1.0},))
    with pytest.raises(HypothesisViolated):
        SearchConfig("conj2", grid=({"p": 2.0, "q": 1.0, "r": 0.0},))
    with pytest.raises(HypothesisViolated):
        SearchConfig("conj2", grid=({"p": 0.0, "q": 1.0, "r": 0.0},))
    with pytest.raises(ValueError):
        SearchConfig("conj1", budget=0)


def test_refine_is_monotone_and_reproducible():
    cfg, cand = _first_candidate()
    a = refine(cand, cfg)
    b = refine(cand, cfg)
    assert a.gap <= cand.gap
    assert a.to_dict() == b.to_dict()
    assert a.diagnostics["start_gap"] == cand.gap
    assert a.diagnostics["refine_steps"] == 200
    assert 1e-9 <= a.diagnostics["refine_final_step"] <= 1e2
    assert a.note.endswith("refined")


@pytest.mark.parametrize("rank", [0, 1, 2])
def test_refine_payload_reproduces_gap(rank):
    cfg, cand = _first_candidate("conj2", grid=({"p": 1.0, "q": 2.0, "r": 0.5},), dims=(3,), seed=rank)
    out = refine(cand, replace(cfg, refine_steps=60), rank=rank)
    a, b, f = se._unpack(out)
    res = se.candidate_gap("conj2", out.params, a, b, f)
    assert res.gap == pytest.approx(out.gap, rel=1e-9, abs=1e-12)
    assert out.gap <= cand.gap
    # trace of A is held fixed by the step normalization
    a0, _, _ = se._unpack(cand)
    assert np.trace(a).real == pytest.approx(np.trace(a0).real, rel=1e-9)


def test_refine_commuting_candidate():
    cfg = SearchConfig("conj2", grid=({"p": 1.0, "q": 2.0, "r": 1.0},), dims=(2,), budget=6, refine_steps=50)
    s = run_sweep(SweepConfig("conj2", dims=(2,), budget=6, seed=0, grid=cfg.resolved_grid(), families=("commuting_pair",), keep_payload=True))
    cand = s.lowest[0]
    assert abs(cand.gap) < 1e-10
    out = refine(cand, cfg)
    assert out.gap <= cand.gap
    assert out.gap >= -10 * se.DEFAULT_POLICY.threshold(out.lhs, out.rhs)


def test_refine_needs_payload():
    cfg, cand = _first_candidate()
    with pytest.raises(ValueError):
        refine(replace(cand, payload=None), cfg)


def test_candidates_skip_identity_cases():
    cfg = SearchConfig("conj2", grid=({"p": 1.0, "q": 1.0, "r": 0.0}, {"p": 1.0, "q": 2.0, "r": 0.0}), dims=(2, 3), budget=30, refine_steps=0)
    out = run_search(cfg)
    assert out.records()
    assert all(r.params["p"] != r.params["q"] for r in out.records())


def test_vanishing_weight_is_not_a_candidate():
    a, b = np.diag([2.0, 1.0]).astype(complex), np.ones((2, 2), dtype=complex)
    inst = injected_instance(0, a, b)
    res = iq.gap_conjecture1(indicator(5.0), a, b, 1.5)
    assert res.lhs == res.rhs == 0.0
    assert not se._is_candidate(inst, res)
    assert se._is_candidate(inst, iq.gap_conjecture1(indicator(1.5), a, b, 1.5))


def test_search_deterministic(tmp_path):
    cfg = SearchConfig("conj1", dims=(2, 3), budget=40, refine_steps=20, refine_top=3, seed=7)
    assert _dump(run_search(cfg)) == _dump(run_search(cfg))


def test_resume_equals_uninterrupted(tmp_path):
    cfg = SearchConfig("conj1", dims=(2, 3), budget=100, refine_steps=15, refine_top=3, seed=7)
    full = run_search(cfg)
    state = tmp_path / "s.json"
    part = run_search(cfg, state_path=state, stop_after=50, checkpoint_every=10)
    assert not part.complete and part.cursor == 50
    part = run_search(cfg, state_path=state, stop_after=51)
    assert part.stage == "refine" and part.cursor == 1
    done = run_search(cfg, state_path=state)
    assert done.complete
    assert _dump(done) == _dump(full)
    assert _dump(load_state(state, cfg)) == _dump(full)


def test_corrupt_state(tmp_path):
    cfg = SearchConfig("conj1", dims=(2,), budget=10, refine_steps=0, seed=1)
    state = tmp_path / "s.json"
    run_search(cfg, state_path=state, stop_after=5)
    text = state.read_text()
    state.write_text(text.replace('"cursor":5', '"cursor":6'))
    with pytest.raises(CorruptState):
        load_state(state)
    state.write_text("not json")
    with pytest.raises(CorruptState):
        run_search(cfg, state_path=state)


def test_state_bound_to_target(tmp_path):
    cfg = SearchConfig("conj1", dims=(2,), budget=10, refine_steps=0, seed=1)
    state = tmp_path / "s.json"
    run_search(cfg, state_path=state, stop_after=5)
    with pytest.raises(ValueError, match="target"):
        run_search(SearchConfig("conj2", dims=(2,), budget=10, refine_steps=0, seed=1), state_path=state)
    with pytest.raises(ValueError):
        run_search(replace(cfg, seed=2), state_path=state)


def test_state_layout(tmp_path):
    cfg = SearchConfig("conj2", dims=(2,), budget=4, refine_steps=0, seed=1)
    state = tmp_path / "s.json"
    run_search(cfg, state_path=state)
    doc = json.loads(state.read_text())
    assert set(doc) == {"checksum", "state"}
    assert doc["state"]["kind"] == "araki-search-state"
    assert doc["state"]["version"] == 1
    assert doc["state"]["config"]["target"] == "conj2"
    assert doc["state"]["stage"] == "done"
    assert load_state(state).config.to_dict() == cfg.to_dict()


def test_fake_violation_is_not_confirmed():
    cfg, cand = _first_candidate()
    fake = replace(cand, gap=-1.0)
    assert se.is_violation(fake)
    assert not confirm(fake)
    assert not confirm(replace(fake, payload=None))


def test_confirmed_violation_sets_exit_code(monkeypatch):
    monkeypatch.setattr(se, "is_violation", lambda rec, pol=None: True)
    monkeypatch.setattr(se, "confirm", lambda rec, pol=None: True)
    out = run_search(SearchConfig("conj1", dims=(2,), budget=5, refine_steps=0, refine_top=2, seed=0))
    assert out.confirmed and out.exit_code == 3
    assert all(r.payload is not None for r in out.confirmed)
