import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maxrep import config, properness
from maxrep.hyperbolic import translation_length_h
from maxrep.max_reps import UnsupportedConstruction, trivial_rep
from maxrep.surface_group import (
    Automorphism,
    Word,
    WordError,
    WordGrowthError,
    builtin_twist,
    curve_system,
    identity_automorphism,
)

OCTAGON_LENGTH = 2 * math.acosh(1 + math.sqrt(2) / 2)


def test_task_rng_is_deterministic():
    a = properness.task_rng(3, properness.STREAM_CONE, 7).random(5)
    b = properness.task_rng(3, properness.STREAM_CONE, 7).random(5)
    c = properness.task_rng(3, properness.STREAM_CONE, 8).random(5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2 ** 32))
def test_random_cyclic_word_is_cyclically_reduced(length, seed):
    w = properness.random_cyclic_word(2, length, np.random.default_rng(seed))
    assert len(w) == length
    if length > 1:
        assert w.letters[0] != -w.letters[-1]


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000), st.integers(1, 15), st.integers(1, 15))
def test_sample_words_extends_with_budget(seed, a, b):
    from maxrep.hyperbolic import octagon_hyperbolization

    h = octagon_hyperbolization()
    small, large = sorted((a, b))
    first = properness.sample_words(h, small, 6, seed)
    second = properness.sample_words(h, large, 6, seed)
    assert second[:len(first)] == first
    traces = {round(abs(np.trace(h(w))), 8) for w in second}
    assert len(traces) == len(second)


def test_length_vector_octagon(octagon, diag2):
    system = curve_system(2)
    lv = properness.length_vector(octagon, system)
    assert len(lv.values) == 9 and all(v > 0 for v in lv.values)
    for label, v in zip(lv.labels, lv.values):
        if label in ("a1", "b1", "a2", "b2"):
            assert v == pytest.approx(OCTAGON_LENGTH, abs=1e-12)
    # the diagonal representation has exactly the hyperbolic lengths
    lv_rep = properness.length_vector(diag2, system)
    assert np.allclose(lv_rep.values, lv.values, atol=1e-6)


def test_length_vector_rejects_negative():
    with pytest.raises(ValueError):
        properness.LengthVector((1.0, -0.1), ("x", "y"), "bad")


def test_upper_lipschitz(octagon, diag2, irr2):
    words = properness.sample_words(octagon, 15, 6, 0)
    assert properness.upper_lipschitz(diag2, octagon, words).L == pytest.approx(1.0, abs=1e-6)
    assert properness.upper_lipschitz(irr2, octagon, words).L == pytest.approx(3.0, abs=1e-6)
    assert properness.upper_lipschitz(trivial_rep(2), octagon, words).L == 0.0


def test_fit_qi_rules():
    assert properness.fit_qi([]) == (1.0, 0.0)
    A, B = properness.fit_qi([(1.0, 2.0), (2.0, 3.0)])
    assert A == 2.0 and B == 0.0
    A, B = properness.fit_qi([(1.0, 1.0), (0.0, 0.5)])
    assert A == 1.0 and B == 0.5


def test_qi_monotone_in_budget(octagon, irr2):
    small = properness.qi_estimate(irr2, octagon, 8, 6, 0)
    large = properness.qi_estimate(irr2, octagon, 16, 6, 0)
    assert small.samples == 8 and large.samples == 16
    assert large.A >= small.A and large.B >= small.B - 1e-12
    assert 2.0 - 1e-9 <= large.A <= 3.0 + 1e-6


def test_qi_rejects_trivial(octagon):
    with pytest.raises(UnsupportedConstruction):
        properness.qi_estimate(trivial_rep(2), octagon, 5)


def test_orbit_identity_constant(octagon):
    probe = properness.orbit_probe(octagon, identity_automorphism(2), curve_system(2), 4)
    assert max(probe.sums) - min(probe.sums) <= 1e-12
    assert probe.k0 is None and not probe.diverges


def test_orbit_twist_grows(octagon):
    probe = properness.orbit_probe(octagon, builtin_twist("a1", 2), curve_system(2), 6)
    assert probe.ks[0] == 0
    assert probe.sums[0] == pytest.approx(properness.length_vector(octagon, curve_system(2)).total)
    assert probe.eventually_increasing and probe.k0 <= 3


def test_orbit_word_growth_guard(octagon):
    # twisting along a1 and back along b1 acts like an Anosov map on that handle, so words grow exponentially
    psi = builtin_twist("a1", 2).compose(builtin_twist("b1", 2).inverse())
    with pytest.raises(WordGrowthError):
        properness.orbit_probe(octagon, psi, curve_system(2), 60)


def test_causal_suite_small():
    r = properness.causal_suite(20, 2, 8, 0)
    for metric in ("d_y", "d_proof"):
        assert r[metric]["passed"] == 20 and r[metric]["worst_margin"] >= -1e-9


def test_lemma_suite_small(octagon, diag2):
    sampling = config.Sampling(lemma_samples=10, attainment_words=3)
    report = properness.lemma_suite(diag2, octagon, 10, 0, sampling)
    assert report["checks_total"] == 5
    assert report["pass"], report
    assert report["equivariance"]["count"] == properness.EQUIVARIANCE_CASES


def test_writers(tmp_path, octagon, diag2):
    probe = properness.orbit_probe(diag2, identity_automorphism(2), curve_system(2), 2)
    path = tmp_path / "orbit.csv"
    properness.write_orbit_csv(probe, path)
    rows = list(csv.reader(path.open()))
    assert rows[0][:2] == ["k", "sum"] and len(rows) == 4
    assert rows[0][2:] == list(probe.curve_labels)

    est = properness.qi_estimate(diag2, octagon, 5, 6, 0)
    path = tmp_path / "qi.csv"
    properness.write_qi_csv(est, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["word", "tr_h", "tr_rho", "d_J"] and len(rows) == 6
    for word, x, y, _ in rows[1:]:
        assert float(x) == pytest.approx(translation_length_h(octagon(Word.parse(word, 2))))
        assert float(y) == pytest.approx(float(x), abs=1e-6)

    path = tmp_path / "summary.json"
    properness.write_json({"a": np.float64(1.5), "b": np.nan, "c": (np.int64(2),)}, path)
    assert json.loads(path.read_text()) == {"a": 1.5, "b": "nan", "c": [2]}


def test_workers_do_not_change_results(octagon, diag2):
    words = properness.sample_words(octagon, 6, 6, 0)
    serial = properness.cone_suite(diag2, octagon, words, 0, workers=1)
    pooled = properness.cone_suite(diag2, octagon, words, 0, workers=2)
    assert repr(serial) == repr(pooled)


def test_orbit_genus_mismatch(octagon):
    psi = identity_automorphism(3)
    assert isinstance(psi, Automorphism)
    with pytest.raises(WordError):
        properness.orbit_probe(octagon, psi, curve_system(2), 1)
