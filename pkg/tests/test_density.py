import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyptype.constants import C0
from hyptype.density import (
    DensityKind,
    SamplingBudget,
    beta,
    brute_force_density,
    density_all,
    density_batch,
    eval_density,
    pair_objective,
)
from hyptype.geometry import (
    DomainError,
    contains,
    dist_to_complement,
    lemma5_domain,
    primitive_distances,
    punctured_disk,
    transform_domain,
    two_point_domain,
    unit_ball,
)
from hyptype.harness import random_domain, random_orthogonal, random_point

L, L1, L2 = DensityKind.LAMBDA, DensityKind.LAMBDA_PRIME, DensityKind.LAMBDA_PPRIME
E1 = np.array([1.0, 0.0])
O = np.zeros(2)


def test_pair_objective_examples():
    assert pair_objective(O, E1, 2 * E1) == 1.0
    assert pair_objective(O, 0.99 * E1, 2 * E1) == pytest.approx(0.99 * (1 + math.log(1.01 / 0.99)), rel=1e-15)
    assert pair_objective(O, E1, E1) == math.inf


def test_pair_objective_broadcasts():
    A = np.array([[1.0, 0.0], [0.0, 1.0]])
    B = np.array([[2.0, 0.0], [0.0, 3.0]])
    out = pair_objective(O, A, B)
    assert out.shape == (2,)
    assert out[1] == pytest.approx(1 + math.log(2))


def test_beta_examples():
    assert beta(two_point_domain(), O) == 0.0
    assert beta(unit_ball(2), [0.3, -0.2]) == pytest.approx(0.0, abs=1e-12)
    assert beta(punctured_disk(), 0.1 * E1) == pytest.approx(math.log(10), rel=1e-12)


def test_eval_two_point():
    v = eval_density(two_point_domain(), O, L2)
    assert v.reciprocal == 1.0
    np.testing.assert_array_equal(v.witness_a, E1)
    np.testing.assert_array_equal(v.witness_b, 2 * E1)
    for kind in DensityKind:
        assert eval_density(two_point_domain(3), np.zeros(3), kind).value == pytest.approx(1.0, abs=1e-12)


def test_eval_lemma5():
    D = lemma5_domain(0.01)
    lam = eval_density(D, O, L)
    assert lam.reciprocal == pytest.approx(1.0, abs=1e-12)
    assert lam.exceptional_midpoint
    np.testing.assert_allclose(lam.witness_a, E1, atol=1e-12)
    np.testing.assert_allclose(lam.witness_b, 2 * E1, atol=1e-12)
    lp = eval_density(D, O, L1)
    assert 1.0000111 <= lp.reciprocal <= 1.000075
    assert not lp.exceptional_midpoint


def test_strict_chain_lemma5():
    out = density_all(lemma5_domain(0.01), O[None, :])
    l2, l1, l = (out[k].value[0] for k in (L2, L1, L))
    assert l2 < l1 * (1 - 1e-6)
    assert l1 < l * (1 - 1e-6)


def test_brute_force_examples():
    v = brute_force_density(two_point_domain(), O, L2, grid=10)
    assert v.reciprocal == 1.0
    v = brute_force_density(lemma5_domain(0.01), O, L, grid=10_000)
    assert abs(v.reciprocal - 1) <= 1e-3
    z = 0.1 * E1
    bf = brute_force_density(punctured_disk(), z, L1, grid=10_000)
    ev = eval_density(punctured_disk(), z, L1)
    assert abs(bf.reciprocal / ev.reciprocal - 1) <= 1e-4


def test_oracle_is_never_below():
    # every oracle pair is feasible, so its value can only sit above the infimum
    rng = np.random.default_rng(5)
    for i in range(10):
        D = random_domain(rng, 2)
        z = random_point(rng, D)
        kind = list(DensityKind)[i % 3]
        bf = brute_force_density(D, z, kind, grid=400, seed=i)
        ev = eval_density(D, z, kind)
        assert ev.reciprocal <= bf.reciprocal * (1 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_chain_and_comp2(seed):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    out = density_all(D, z[None, :])
    l2, l1, l = (out[k].value[0] for k in (L2, L1, L))
    assert l2 <= l1 * (1 + 1e-9)
    assert l1 <= l * (1 + 1e-9)
    assert l <= C0 * l2 * (1 + 1e-6)
    assert l * dist_to_complement(D, z) <= 1 + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 100_000))
def test_pprime_identity(seed):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    v = eval_density(D, z, L2)
    assert v.reciprocal == pytest.approx(dist_to_complement(D, z) * (1 + beta(D, z)), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000))
def test_witness_structure(seed):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    v = eval_density(D, z, L)
    tol = 1e-9 * D.scale
    assert primitive_distances(D, v.witness_b[None, :]).min() <= tol
    if v.exceptional_midpoint:
        a, b = v.witness_a, v.witness_b
        np.testing.assert_allclose(a, 0.5 * (z + b), atol=tol)
        assert not contains(D, a)
    else:
        assert primitive_distances(D, v.witness_a[None, :]).min() <= tol


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.05, 20.0))
def test_similarity_equivariance(seed, s):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    Q = random_orthogonal(rng, D.dim)
    v = rng.uniform(-3, 3, D.dim)
    fD = transform_domain(D, s, Q, v)
    fz = s * Q @ z + v
    for kind in DensityKind:
        a = eval_density(D, z, kind)
        b = eval_density(fD, fz, kind)
        assert b.value == pytest.approx(a.value / s, rel=1e-9)
        assert a.exceptional_midpoint == b.exceptional_midpoint


def test_ball_collapse():
    rng = np.random.default_rng(2)
    for n in (2, 3):
        D = unit_ball(n)
        Z = rng.uniform(-0.5, 0.5, (50, n))
        res = density_batch(D, Z, L2)
        np.testing.assert_allclose(res.value * dist_to_complement(D, Z), 1.0, atol=1e-10)


def test_batch_matches_single():
    rng = np.random.default_rng(4)
    D = random_domain(rng, 2)
    Z = np.array([random_point(rng, D) for _ in range(6)])
    res = density_batch(D, Z, L)
    for z, val in zip(Z, res.value):
        assert eval_density(D, z, L).value == pytest.approx(val, rel=1e-12)


def test_deterministic():
    D = lemma5_domain(0.2, 3)
    z = np.array([0.1, 0.4, -0.2])
    a = eval_density(D, z, L1, SamplingBudget(seed=7))
    b = eval_density(D, z, L1, SamplingBudget(seed=7))
    assert a.reciprocal == b.reciprocal
    np.testing.assert_array_equal(a.witness_a, b.witness_a)


def test_errors():
    with pytest.raises(DomainError):
        eval_density(two_point_domain(), E1, L)
    with pytest.raises(ValueError):
        eval_density(two_point_domain(), O, "mu")
    with pytest.raises(ValueError):
        eval_density(two_point_domain(), O, L, SamplingBudget(samples=1))
    with pytest.raises(DomainError):
        brute_force_density(unit_ball(2), 2 * E1, L)


def test_unresolvable_point_rejected():
    from hyptype.geometry import DomainSpec, RemovedBall, WholeSpace

    D = DomainSpec(2, WholeSpace(), (RemovedBall([-0.6, 1.1], 0.15), RemovedBall([1.0, 0.0], 0.2)))
    z = np.array([-0.75, 1.1])  # 3e-17 outside the first ball after rounding
    assert contains(D, z)
    with pytest.raises(DomainError) as exc:
        eval_density(D, z, L)
    assert exc.value.invariant == "resolvable_point"
    assert eval_density(D, z + [-1e-9, 0], L2).value == pytest.approx(1e9, rel=1e-6)


def test_kind_parse():
    assert DensityKind.parse("lambda1") is L1
    assert DensityKind.parse("LAMBDA_PPRIME") is L2
