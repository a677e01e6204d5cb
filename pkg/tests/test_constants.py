import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyptype import constants as c


def test_roots():
    t0 = c.solve_t0()
    assert t0.value == pytest.approx(1.14619, abs=1e-5)
    assert abs(t0.residual) <= 1e-14
    g = c.solve_log_reciprocal()
    assert g.value == pytest.approx(1.76322, abs=1e-5)
    assert math.log(g.value) == pytest.approx(1 / g.value, abs=1e-14)
    m = c.solve_midpoint_eq()
    assert m.value == pytest.approx(0.317844, abs=1e-5)
    assert abs(m.residual) <= 1e-14


def test_t0_threshold():
    t0 = c.solve_t0().value
    below = np.linspace(0, t0, 1000, endpoint=False)
    above = np.linspace(t0, 10, 1000)[1:]
    assert np.all(np.exp(below) < 2 + below)
    assert np.all(np.exp(above) > 2 + above)


def test_midpoint_interchange_inequality():
    g = c.solve_midpoint_eq().value
    assert 1 + abs(math.log(1 / g - 1)) < (1 + abs(math.log(g))) / (1 - g)


def test_k_and_anchors():
    assert c.bp_constant_k() == pytest.approx(5.7627, abs=1e-4)
    an = c.lemma2_anchors()
    assert an["ratio_small_ring"] == pytest.approx(1.47703, abs=1e-4)
    assert an["ratio_small_ring"] < 1.48
    assert an["f_t0"] == pytest.approx(0.821779, abs=1e-4)
    assert an["inverse_f_t0"] == pytest.approx(1.21687, abs=1e-4)
    assert an["inverse_f_t0"] < 1.22


def test_lemma8_bound():
    assert c.lemma8_bound(0.5) == pytest.approx(2 * (1 + math.log(2)), rel=1e-15)
    assert c.lemma8_bound(1e-12) == pytest.approx(1.0, abs=1e-10)
    assert c.lemma8_bound(0.9) == pytest.approx(33.0259, abs=1e-4)
    for bad in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            c.lemma8_bound(bad)


def test_monotone_f_examples():
    assert c.monotone_f(1, 1) == 1
    assert c.monotone_f(2, 1) == pytest.approx(1 + math.log(2))
    assert c.monotone_f(1, 2) == pytest.approx(2 * (1 + math.log(2)))
    with pytest.raises(ValueError):
        c.monotone_f(0, 1)


@given(
    st.sampled_from([0.1, 1.0, 10.0]),
    st.floats(1e-6, 100.0),
    st.floats(1e-6, 100.0),
)
def test_monotone_f_increasing(T, y1, y2):
    if y1 == y2:
        return
    y1, y2 = sorted((y1, y2))
    assert c.monotone_f(T, y1) < c.monotone_f(T, y2)


def test_c1_and_alpha():
    expected = 1 + math.log(128) / (1 + math.log(10) + math.log(16))
    assert c.c1_bound(2, 1, 4) == pytest.approx(expected, rel=1e-15)
    assert c.c1_bound(2, 1, 4) == pytest.approx(1.7987, abs=1e-4)
    assert c.c1_bound(3, 2, 2 * math.e**2) > c.c1_bound(3, 2, 4)
    with pytest.raises(ValueError):
        c.c1_bound(2, 1, 3.9)
    with pytest.raises(ValueError):
        c.c1_bound(2, 0.5, 4)
    assert c.alpha(2, 1) == 1
    assert c.alpha(3, 8) == pytest.approx(8**-0.5)
    assert c.alpha(2, 2) == 0.5


def test_grotzsch_lambda():
    assert c.grotzsch_lambda(2) == 4.0
    assert c.grotzsch_lambda(3) == pytest.approx(2 * math.e**2)


def test_solver_rejects_bad_bracket():
    with pytest.raises(ValueError):
        c.solve_bracketed(lambda x: x * x + 1, lambda x: 2 * x, -1, 1)
