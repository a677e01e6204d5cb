import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyptype.geometry import (
    DomainError,
    DomainSpec,
    OpenBall,
    RemovedBall,
    RemovedPoint,
    WholeSpace,
    contains,
    dist_to_complement,
    domain_from_json,
    domain_to_json,
    in_complement,
    lemma5_domain,
    nearest_boundary_points,
    sample_boundary,
    transform_domain,
    two_point_domain,
    unit_ball,
)
from hyptype.harness import random_domain, random_orthogonal, random_point

E1 = np.array([1.0, 0.0])


def test_contains_examples():
    assert contains(unit_ball(2), [0.0, 0.0])
    assert not contains(lemma5_domain(0.01), E1)
    assert not contains(two_point_domain(), 2 * E1)


def test_dist_examples():
    assert dist_to_complement(unit_ball(2), [0, 0]) == 1.0
    assert dist_to_complement(lemma5_domain(0.01), [0, 0]) == pytest.approx(0.99, rel=1e-15)
    assert dist_to_complement(two_point_domain(), [0, 0]) == 1.0


def test_dist_outside_raises():
    with pytest.raises(DomainError) as exc:
        dist_to_complement(unit_ball(2), [2.0, 0.0])
    assert exc.value.invariant == "point_in_domain"


def test_nearest_examples():
    pts, deg = nearest_boundary_points(lemma5_domain(0.01), [0, 0])
    assert len(pts) == 1 and not deg
    np.testing.assert_allclose(pts[0], [0.99, 0.0], atol=1e-15)

    pts, deg = nearest_boundary_points(two_point_domain(), [0, 0])
    np.testing.assert_array_equal(pts[0], E1)

    pts, deg = nearest_boundary_points(unit_ball(2), [0, 0])
    assert deg
    np.testing.assert_array_equal(pts[0], E1)


def test_sample_boundary_examples():
    P = sample_boundary(two_point_domain(), 10)
    assert {tuple(p) for p in P} == {(1.0, 0.0), (2.0, 0.0)}

    P = sample_boundary(unit_ball(2), 4, seed=0)
    assert len(P) == 4
    np.testing.assert_allclose(np.linalg.norm(P, axis=1), 1.0, atol=1e-12)

    eps = 0.01
    P = sample_boundary(lemma5_domain(eps), 100)
    assert any(np.all(p == 2 * E1) for p in P)
    r = np.linalg.norm(P - E1, axis=1)
    assert np.sum(np.abs(r - eps) < 1e-12) >= 1
    assert not np.any(contains(lemma5_domain(eps), P))


def test_in_complement_examples():
    assert in_complement(lemma5_domain(0.01), E1)
    assert not in_complement(two_point_domain(), 1.5 * E1)
    assert in_complement(unit_ball(2), 2 * E1)


def test_sample_boundary_is_boundary():
    rng = np.random.default_rng(3)
    for _ in range(20):
        D = random_domain(rng)
        P = sample_boundary(D, 50, seed=1)
        assert np.all(in_complement(D, P))
        # some nearby point lies in D
        delta = 1e-8 * D.scale
        U = np.vstack([np.eye(D.dim), -np.eye(D.dim)])
        for p in P:
            probes = p + delta * U
            assert np.any(contains(D, probes))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_nearest_points_attain_distance(seed):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    d = dist_to_complement(D, z)
    assert d > 0
    pts, _ = nearest_boundary_points(D, z)
    for p in pts:
        assert abs(np.linalg.norm(z - p) - d) <= 1e-12 * d


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 100.0))
def test_similarity_equivariance(seed, s):
    rng = np.random.default_rng(seed)
    D = random_domain(rng)
    z = random_point(rng, D)
    Q = random_orthogonal(rng, D.dim)
    v = rng.uniform(-5, 5, D.dim)
    fD = transform_domain(D, s, Q, v)
    fz = s * Q @ z + v
    assert dist_to_complement(fD, fz) == pytest.approx(s * dist_to_complement(D, z), rel=1e-12)


def test_contains_and_complement_are_complementary():
    rng = np.random.default_rng(0)
    D = random_domain(rng, 2)
    Z = rng.uniform(-3, 3, (2000, 2))
    assert np.all(contains(D, Z) ^ in_complement(D, Z))


def test_removed_ball_is_closed():
    D = DomainSpec(2, WholeSpace(), (RemovedBall([0, 0], 1.0),))
    assert not contains(D, [1.0, 0.0])
    assert contains(D, [1.0 + 1e-12, 0.0])


@pytest.mark.parametrize(
    "build, invariant",
    [
        (lambda: DomainSpec(1), "dim_at_least_2"),
        (lambda: DomainSpec(2, WholeSpace(), (RemovedPoint([0, 0]),)), "complement_two_points"),
        (lambda: DomainSpec(2, WholeSpace(), (RemovedBall([0, 0], 1), RemovedBall([1.5, 0], 0.6))), "disjoint_obstacles"),
        (lambda: DomainSpec(2, OpenBall([0, 0], 1), (RemovedBall([0.5, 0], 0.5),)), "obstacle_inside_ambient"),
        (lambda: DomainSpec(2, WholeSpace(), (RemovedPoint([0, 0, 0]), RemovedPoint([1, 0]))), "dimension_match"),
        (lambda: RemovedBall([0, 0], -1), "positive_radius"),
        (lambda: RemovedPoint([np.nan, 0]), "finite_coordinates"),
    ],
)
def test_invalid_domains(build, invariant):
    with pytest.raises(DomainError) as exc:
        build()
    assert exc.value.invariant == invariant


def test_json_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(10):
        D = random_domain(rng)
        text = json.dumps(domain_to_json(D))
        D2 = domain_from_json(text)
        assert domain_to_json(D2) == domain_to_json(D)


@pytest.mark.parametrize(
    "text, invariant",
    [
        ("{not json", "valid_json"),
        ("[1, 2]", "json_object"),
        ('{"ambient": "whole_space"}', "dim_present"),
        ('{"dim": 1}', "dim_at_least_2"),
        ('{"dim": 2, "ambient": "torus"}', "ambient_type"),
        ('{"dim": 2, "obstacles": [{"cube": {}}]}', "obstacle_type"),
        ('{"dim": 2, "obstacles": [{"point": {"center": [0]}}, {"point": {"center": [1, 0]}}]}', "dimension_match"),
        ('{"dim": 2, "obstacles": [{"ball": {"center": [0, 0]}}]}', "positive_radius"),
        ('{"dim": 2, "obstacles": [{"point": {}}]}', "center_present"),
        ('{"dim": 2, "ambient": {"ball": {"center": [0, 0], "radius": 0}}}', "positive_radius"),
    ],
)
def test_json_errors_name_invariant(text, invariant):
    with pytest.raises(DomainError) as exc:
        domain_from_json(text)
    assert exc.value.invariant == invariant
