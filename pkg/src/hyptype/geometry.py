"""Domains in R^n whose complement is a finite union of points and closed balls.

A domain is an ambient region (all of R^n, or an open ball) with a finite
number of pairwise disjoint obstacles removed.  Removed balls are closed, so
the domain is open.  Every query is answered in closed form.

Points are plain numpy arrays.  Most functions accept either a single point
of shape ``(n,)`` or a batch of shape ``(N, n)`` and return a scalar or an
array accordingly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

__all__ = [
    "DomainError",
    "RemovedPoint",
    "RemovedBall",
    "WholeSpace",
    "OpenBall",
    "DomainSpec",
    "Primitive",
    "contains",
    "in_complement",
    "dist_to_complement",
    "nearest_boundary_points",
    "sample_boundary",
    "sphere_points",
    "domain_from_json",
    "domain_to_json",
    "lemma5_domain",
    "two_point_domain",
    "unit_ball",
    "punctured_disk",
    "basis_vector",
    "transform_domain",
    "resolvable",
    "RESOLUTION",
]


class DomainError(ValueError):
    """Invalid domain description or a query outside the domain.

    ``invariant`` names the violated condition so callers (and the JSON
    parser) can report it in a structured way.
    """

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _vec(x, name="point") -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DomainError("point_shape", f"{name} must be a 1-d coordinate vector")
    if not np.all(np.isfinite(v)):
        raise DomainError("finite_coordinates", f"{name} has non-finite coordinates")
    return v


@dataclass(frozen=True, eq=False)
class RemovedPoint:
    center: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))


@dataclass(frozen=True, eq=False)
class RemovedBall:
    """Closed ball removed from the ambient region."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        r = float(self.radius)
        if not (np.isfinite(r) and r > 0):
            raise DomainError("positive_radius", f"ball radius must be > 0, got {r}")
        object.__setattr__(self, "radius", r)


@dataclass(frozen=True)
class WholeSpace:
    pass


@dataclass(frozen=True, eq=False)
class OpenBall:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center, "center"))
        r = float(self.radius)
        if not (np.isfinite(r) and r > 0):
            raise DomainError("positive_radius", f"ambient radius must be > 0, got {r}")
        object.__setattr__(self, "radius", r)


Obstacle = Union[RemovedPoint, RemovedBall]
Ambient = Union[WholeSpace, OpenBall]


@dataclass(frozen=True)
class Primitive:
    """One connected piece of the boundary: a point (radius 0) or a sphere.

    ``ambient`` marks the sphere bounding an ambient ball; the domain lies
    inside it rather than outside.
    """

    center: np.ndarray
    radius: float
    ambient: bool = False

    @property
    def is_point(self) -> bool:
        return self.radius == 0.0


@dataclass(frozen=True, eq=False)
class DomainSpec:
    """D = ambient minus the union of ``obstacles``.

    Connectedness is assumed rather than checked: with pairwise disjoint
    points and closed balls strictly inside the ambient region, the
    complement of the obstacles in the ambient region is connected.
    """

    dim: int
    ambient: Ambient = field(default_factory=WholeSpace)
    obstacles: tuple = ()

    def __post_init__(self):
        n = int(self.dim)
        if n < 2:
            raise DomainError("dim_at_least_2", f"dimension must be >= 2, got {n}")
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        amb = self.ambient
        if not isinstance(amb, (WholeSpace, OpenBall)):
            raise DomainError("ambient_type", f"unsupported ambient {amb!r}")
        if isinstance(amb, OpenBall) and amb.center.shape != (n,):
            raise DomainError("dimension_match", "ambient center has wrong dimension")
        for ob in self.obstacles:
            if not isinstance(ob, (RemovedPoint, RemovedBall)):
                raise DomainError("obstacle_type", f"unsupported obstacle {ob!r}")
            if ob.center.shape != (n,):
                raise DomainError("dimension_match", "obstacle center has wrong dimension")
        obs = self.obstacles
        for i in range(len(obs)):
            ri = getattr(obs[i], "radius", 0.0)
            for j in range(i + 1, len(obs)):
                rj = getattr(obs[j], "radius", 0.0)
                if np.linalg.norm(obs[i].center - obs[j].center) <= ri + rj:
                    raise DomainError(
                        "disjoint_obstacles", f"obstacles {i} and {j} intersect"
                    )
        if isinstance(amb, OpenBall):
            for i, ob in enumerate(obs):
                r = getattr(ob, "radius", 0.0)
                if np.linalg.norm(ob.center - amb.center) + r >= amb.radius:
                    raise DomainError(
                        "obstacle_inside_ambient",
                        f"obstacle {i} is not strictly inside the ambient ball",
                    )
        elif not any(isinstance(o, RemovedBall) for o in obs) and len(obs) < 2:
            raise DomainError(
                "complement_two_points",
                "the complement of D must contain at least two points",
            )

        prims = [Primitive(o.center, float(getattr(o, "radius", 0.0))) for o in obs]
        if isinstance(amb, OpenBall):
            prims.append(Primitive(amb.center, amb.radius, ambient=True))
        object.__setattr__(self, "primitives", tuple(prims))

    @property
    def scale(self) -> float:
        """Characteristic length: largest radius or pairwise center distance."""
        cs = [p.center for p in self.primitives]
        s = max([p.radius for p in self.primitives] + [0.0])
        for i in range(len(cs)):
            for j in range(i + 1, len(cs)):
                s = max(s, float(np.linalg.norm(cs[i] - cs[j])))
        return s if s > 0 else 1.0

    def with_obstacle(self, obstacle: Obstacle) -> "DomainSpec":
        return DomainSpec(self.dim, self.ambient, self.obstacles + (obstacle,))


def _points(domain: DomainSpec, z):
    Z = np.asarray(z, dtype=float)
    single = Z.ndim == 1
    Z2 = np.atleast_2d(Z)
    if Z2.shape[-1] != domain.dim:
        raise DomainError(
            "dimension_match", f"point has dimension {Z2.shape[-1]}, domain has {domain.dim}"
        )
    return Z2, single


def primitive_distances(domain: DomainSpec, Z: np.ndarray) -> np.ndarray:
    """Unsigned distance from each row of ``Z`` to each boundary primitive, (N, k)."""
    out = np.empty((Z.shape[0], len(domain.primitives)))
    for j, p in enumerate(domain.primitives):
        out[:, j] = np.abs(np.linalg.norm(Z - p.center, axis=1) - p.radius)
    return out


def _inside(domain: DomainSpec, Z: np.ndarray) -> np.ndarray:
    ok = np.ones(Z.shape[0], dtype=bool)
    amb = domain.ambient
    if isinstance(amb, OpenBall):
        ok &= np.linalg.norm(Z - amb.center, axis=1) < amb.radius
    for ob in domain.obstacles:
        r = np.linalg.norm(Z - ob.center, axis=1)
        if isinstance(ob, RemovedBall):
            ok &= r > ob.radius
        else:
            ok &= r > 0
    return ok


#: relative distance below which a point of D is treated as lying on the boundary
RESOLUTION = 1e-13


def resolvable(domain: DomainSpec, Z: np.ndarray) -> np.ndarray:
    """Rows of ``Z`` in D whose boundary distance exceeds rounding noise.

    Nearest points are computed to about machine precision times
    (scale + |z|); closer than ``RESOLUTION`` times that, the nearest point
    can round onto z itself and the densities are not computable.
    """
    ok = _inside(domain, Z)
    d = primitive_distances(domain, Z).min(axis=1)
    return ok & (d > RESOLUTION * (domain.scale + np.abs(Z).max(axis=1)))


def contains(domain: DomainSpec, z):
    """True where ``z`` lies in D."""
    Z, single = _points(domain, z)
    ok = _inside(domain, Z)
    return bool(ok[0]) if single else ok


def in_complement(domain: DomainSpec, z):
    """True where ``z`` lies in R^n minus D (boundary included)."""
    Z, single = _points(domain, z)
    ok = ~_inside(domain, Z)
    return bool(ok[0]) if single else ok


def dist_to_complement(domain: DomainSpec, z):
    """d(z, boundary of D); raises ``DomainError`` if some z is not in D."""
    Z, single = _points(domain, z)
    if not np.all(_inside(domain, Z)):
        raise DomainError("point_in_domain", "distance queried at a point outside D")
    d = primitive_distances(domain, Z).min(axis=1)
    return float(d[0]) if single else d


def _nearest_on(p: Primitive, z: np.ndarray):
    if p.is_point:
        return p.center.copy(), False
    v = z - p.center
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return p.center + p.radius * basis_vector(len(z), 0), True
    return p.center + p.radius * v / nv, False


def nearest_boundary_points(domain: DomainSpec, z, tol: float = 1e-12):
    """Exact nearest boundary points of ``z``.

    Returns ``(points, degenerate)``.  ``points`` holds one point per
    primitive whose distance is within relative ``tol`` of the minimum.
    ``degenerate`` is True when ``z`` sits at the center of a nearest sphere,
    in which case the whole sphere is nearest and the returned point on it is
    the canonical representative ``center + r e_1``.
    """
    z = _vec(z)
    d = dist_to_complement(domain, z)
    dist = primitive_distances(domain, z[None, :])[0]
    pts, degenerate = [], False
    for j in np.flatnonzero(dist <= d * (1 + tol)):
        q, deg = _nearest_on(domain.primitives[j], z)
        pts.append(q)
        degenerate |= deg
    return pts, degenerate


def basis_vector(n: int, j: int) -> np.ndarray:
    e = np.zeros(n)
    e[j] = 1.0
    return e


def sphere_points(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Quasi-uniform unit vectors: rotated equispaced angles in 2-d, a
    randomly rotated Fibonacci lattice in 3-d, normalized Gaussians above."""
    if count <= 0:
        return np.empty((0, n))
    if n == 2:
        t = rng.uniform(0, 2 * np.pi) + 2 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    if n == 3:
        k = np.arange(count) + 0.5
        zc = 1 - 2 * k / count
        phi = np.pi * (1 + 5**0.5) * k
        s = np.sqrt(1 - zc**2)
        U = np.column_stack([s * np.cos(phi), s * np.sin(phi), zc])
        Q, R = np.linalg.qr(rng.standard_normal((3, 3)))
        Q = Q * np.sign(np.diag(R))
        return U @ Q.T
    G = rng.standard_normal((count, n))
    return G / np.linalg.norm(G, axis=1, keepdims=True)


def sample_boundary(domain: DomainSpec, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic quasi-uniform sample of the boundary, shape (M, n).

    Removed points are always included once.  The remaining budget is split
    between the spheres in proportion to r^(n-1), at least one point each,
    so M can exceed ``count`` when there are many primitives.
    """
    if count < 1:
        raise DomainError("positive_count", "count must be >= 1")
    rng = np.random.default_rng(seed)
    n = domain.dim
    prims = domain.primitives
    out = [p.center[None, :] for p in prims if p.is_point]
    spheres = [p for p in prims if not p.is_point]
    if spheres:
        left = max(count - len(out), len(spheres))
        w = np.array([p.radius ** (n - 1) for p in spheres])
        alloc = np.maximum(1, np.floor(left * w / w.sum()).astype(int))
        # hand the rounding remainder to the largest spheres
        for i in np.argsort(-w)[: max(0, left - int(alloc.sum()))]:
            alloc[i] += 1
        for p, m in zip(spheres, alloc):
            out.append(_snap_to_complement(p, p.radius * sphere_points(n, int(m), rng)))
    return np.vstack(out)


def _snap_to_complement(p: Primitive, V: np.ndarray) -> np.ndarray:
    """center + V, with rounding pushed to the closed side of the sphere so
    every returned point fails ``contains``."""
    sign = 1.0 if p.ambient else -1.0
    for k in range(1, 64):
        P = p.center + V
        r = np.linalg.norm(P - p.center, axis=1)
        bad = r < p.radius if p.ambient else r > p.radius
        if not bad.any():
            break
        V[bad] *= 1 + sign * k * np.finfo(float).eps
    return p.center + V


# --- example domains --------------------------------------------------------


def lemma5_domain(eps: float = 0.01, n: int = 2) -> DomainSpec:
    """R^n minus ({2 e_1} union closed B(e_1, eps))."""
    e = basis_vector(n, 0)
    return DomainSpec(n, WholeSpace(), (RemovedPoint(2 * e), RemovedBall(e, eps)))


def two_point_domain(n: int = 2) -> DomainSpec:
    """R^n minus {e_1, 2 e_1}."""
    e = basis_vector(n, 0)
    return DomainSpec(n, WholeSpace(), (RemovedPoint(e), RemovedPoint(2 * e)))


def unit_ball(n: int = 2) -> DomainSpec:
    return DomainSpec(n, OpenBall(np.zeros(n), 1.0), ())


def punctured_disk() -> DomainSpec:
    return DomainSpec(2, OpenBall(np.zeros(2), 1.0), (RemovedPoint(np.zeros(2)),))


# --- JSON ------------------------------------------------------------------


def _center(obj, n, where):
    try:
        c = [float(x) for x in obj["center"]]
    except (KeyError, TypeError, ValueError):
        raise DomainError("center_present", f"{where} needs a numeric 'center' list")
    if len(c) != n:
        raise DomainError("dimension_match", f"{where} center has length {len(c)}, dim is {n}")
    return c


def domain_from_json(data) -> DomainSpec:
    """Parse the JSON domain format (a str, bytes or already-decoded dict)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise DomainError("valid_json", str(exc)) from None
    if not isinstance(data, dict):
        raise DomainError("json_object", "domain description must be a JSON object")
    try:
        n = int(data["dim"])
    except (KeyError, TypeError, ValueError):
        raise DomainError("dim_present", "'dim' must be an integer") from None
    if n < 2:
        raise DomainError("dim_at_least_2", f"dimension must be >= 2, got {n}")
    amb = data.get("ambient", "whole_space")
    if amb == "whole_space":
        ambient: Ambient = WholeSpace()
    elif isinstance(amb, dict) and "ball" in amb:
        b = amb["ball"]
        ambient = OpenBall(_center(b, n, "ambient ball"), b.get("radius", float("nan")))
    else:
        raise DomainError("ambient_type", f"unsupported ambient {amb!r}")
    obstacles = []
    for i, ob in enumerate(data.get("obstacles", [])):
        if isinstance(ob, dict) and "point" in ob:
            obstacles.append(RemovedPoint(_center(ob["point"], n, f"obstacle {i}")))
        elif isinstance(ob, dict) and "ball" in ob:
            b = ob["ball"]
            obstacles.append(RemovedBall(_center(b, n, f"obstacle {i}"), b.get("radius", float("nan"))))
        else:
            raise DomainError("obstacle_type", f"obstacle {i} must be a point or a ball")
    return DomainSpec(n, ambient, tuple(obstacles))


def domain_to_json(domain: DomainSpec) -> dict:
    amb = domain.ambient
    out = {
        "dim": domain.dim,
        "ambient": "whole_space"
        if isinstance(amb, WholeSpace)
        else {"ball": {"center": amb.center.tolist(), "radius": amb.radius}},
        "obstacles": [],
    }
    for ob in domain.obstacles:
        if isinstance(ob, RemovedPoint):
            out["obstacles"].append({"point": {"center": ob.center.tolist()}})
        else:
            out["obstacles"].append({"ball": {"center": ob.center.tolist(), "radius": ob.radius}})
    return out


def transform_domain(domain: DomainSpec, s: float, Q: np.ndarray, v: Sequence[float]) -> DomainSpec:
    """Image of ``domain`` under x -> s Q x + v (Q orthogonal, s > 0)."""
    Q = np.asarray(Q, dtype=float)
    v = np.asarray(v, dtype=float)
    f = lambda c: s * (Q @ c) + v  # noqa: E731
    amb = domain.ambient
    if isinstance(amb, OpenBall):
        amb = OpenBall(f(amb.center), s * amb.radius)
    obs = []
    for ob in domain.obstacles:
        if isinstance(ob, RemovedPoint):
            obs.append(RemovedPoint(f(ob.center)))
        else:
            obs.append(RemovedBall(f(ob.center), s * ob.radius))
    return DomainSpec(domain.dim, amb, tuple(obs))
