"""Explicit quasiconformal maps with exact dilatations and exact image domains.

Four families are available:

* ``Similarity``: x -> s Q x + v;
* ``RadialStretch``: x -> x |x|^(p - 1) with p = 1/K (or p = K for the
  inverse stretch);
* ``Linear``: x -> A x;
* ``Inversion``: x -> c + r^2 (x - c) / |x - c|^2.

Dilatations come from closed-form singular values of the derivative.  For
the radial stretch with exponent p the derivative has singular value
p |x|^(p-1) in the radial direction and |x|^(p-1) in the n - 1 tangential
ones, giving K_O = 1/p and K_I = p^(1-n) for p < 1.  In the plane both equal
K; in higher dimension the maximal dilatation of x |x|^(1/K - 1) is
K^(n-1).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .constants import alpha as holder_alpha
from .constants import c1_bound, grotzsch_lambda
from .density import DensityKind, eval_density
from .geodesic import GraphParams, MetricKind, distance
from .geometry import (
    DomainError,
    DomainSpec,
    OpenBall,
    RemovedBall,
    RemovedPoint,
    WholeSpace,
    dist_to_complement,
    transform_domain,
)

__all__ = [
    "QcMap",
    "Similarity",
    "RadialStretch",
    "Linear",
    "Inversion",
    "Dilatation",
    "UnsupportedPush",
    "apply",
    "dilatation",
    "dilatation_of_matrix",
    "push_domain",
    "inverse",
    "check_qc1",
    "check_qc2",
    "qc1_constant",
    "map_from_json",
    "map_to_json",
]


class UnsupportedPush(DomainError):
    """The image of the domain is not representable exactly."""

    def __init__(self, message: str):
        super().__init__("supported_push", message)


@dataclass(frozen=True, eq=False)
class Similarity:
    s: float
    Q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        v = np.asarray(self.v, dtype=float)
        if not self.s > 0:
            raise ValueError("similarity scale must be positive")
        if Q.shape[0] != Q.shape[1] or Q.shape[0] != v.shape[0]:
            raise ValueError("Q must be square and match v")
        if not np.allclose(Q.T @ Q, np.eye(len(Q)), rtol=0, atol=1e-12):
            raise ValueError("Q must be orthogonal")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "s", float(self.s))


@dataclass(frozen=True)
class RadialStretch:
    """x |x|^(1/K - 1); with ``inverse=True`` the inverse map x |x|^(K - 1)."""

    K: float
    inverse: bool = False

    def __post_init__(self):
        if not self.K >= 1:
            raise ValueError("RadialStretch needs K >= 1")
        object.__setattr__(self, "K", float(self.K))

    @property
    def exponent(self) -> float:
        return self.K if self.inverse else 1.0 / self.K


@dataclass(frozen=True, eq=False)
class Linear:
    A: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if np.linalg.svd(A, compute_uv=False)[-1] == 0:
            raise ValueError("A must be invertible")
        object.__setattr__(self, "A", A)


@dataclass(frozen=True, eq=False)
class Inversion:
    center: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise ValueError("inversion radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))


QcMap = (Similarity, RadialStretch, Linear, Inversion)


@dataclass(frozen=True)
class Dilatation:
    K_O: float
    K_I: float
    K: float
    alpha: float


# --- evaluation -------------------------------------------------------------------


def apply(f, x):
    """Image of a point (shape (n,)) or of a batch of points (shape (N, n))."""
    X = np.asarray(x, dtype=float)
    if isinstance(f, Similarity):
        return f.s * (X @ f.Q.T) + f.v
    if isinstance(f, Linear):
        return X @ f.A.T
    if isinstance(f, RadialStretch):
        r = np.linalg.norm(X, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(r > 0, r ** (f.exponent - 1.0), 0.0)
        return X * scale
    if isinstance(f, Inversion):
        V = X - f.center
        r2 = np.sum(V * V, axis=-1, keepdims=True)
        if np.any(r2 == 0):
            raise DomainError("inversion_center", "inversion is undefined at its center")
        return f.center + f.radius**2 * V / r2
    raise TypeError(f"unsupported map {f!r}")


def dilatation_of_matrix(M) -> tuple[float, float]:
    """(K_O, K_I) of a constant derivative matrix from its singular values."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = len(M)
    sig = np.linalg.svd(M, compute_uv=False)
    J = float(np.prod(sig))
    return float(sig[0] ** n / J), float(J / sig[-1] ** n)


def dilatation(f, n: int) -> Dilatation:
    if n < 2:
        raise ValueError("n must be >= 2")
    if isinstance(f, (Similarity, Inversion)):
        KO = KI = 1.0
    elif isinstance(f, Linear):
        if len(f.A) != n:
            raise ValueError("matrix size does not match n")
        KO, KI = dilatation_of_matrix(f.A)
    elif isinstance(f, RadialStretch):
        p = f.exponent
        if p <= 1:
            KO, KI = 1.0 / p, p ** (1 - n)
        else:
            KO, KI = p ** (n - 1), p
    else:
        raise TypeError(f"unsupported map {f!r}")
    # guard against rounding pushing a conformal map just below 1
    KO, KI = max(1.0, KO), max(1.0, KI)
    K = max(KO, KI)
    return Dilatation(KO, KI, K, holder_alpha(n, K))


def inverse(f):
    if isinstance(f, Similarity):
        return Similarity(1.0 / f.s, f.Q.T, -(f.Q.T @ f.v) / f.s)
    if isinstance(f, RadialStretch):
        return RadialStretch(f.K, not f.inverse)
    if isinstance(f, Linear):
        return Linear(np.linalg.inv(f.A))
    if isinstance(f, Inversion):
        return f
    raise TypeError(f"unsupported map {f!r}")


# --- image domains -------------------------------------------------------------------


def _conformal_scale(A):
    sig = np.linalg.svd(A, compute_uv=False)
    return float(sig[0]) if sig[0] - sig[-1] <= 1e-12 * sig[0] else None


def _push_linear(f, domain):
    s = _conformal_scale(f.A)
    if s is not None:
        return transform_domain(domain, s, f.A / s, np.zeros(domain.dim))
    if isinstance(domain.ambient, OpenBall) or any(isinstance(o, RemovedBall) for o in domain.obstacles):
        raise UnsupportedPush("a non-conformal linear map sends balls to ellipsoids")
    return DomainSpec(domain.dim, WholeSpace(), tuple(RemovedPoint(f.A @ o.center) for o in domain.obstacles))


def _push_radial(f, domain):
    p = f.exponent
    n = domain.dim

    def centered(c):
        return np.linalg.norm(c) == 0.0

    amb = domain.ambient
    if isinstance(amb, OpenBall):
        if not centered(amb.center):
            raise UnsupportedPush("radial stretch of a ball not centered at the origin")
        amb = OpenBall(np.zeros(n), amb.radius**p)
    obs = []
    for ob in domain.obstacles:
        if isinstance(ob, RemovedPoint):
            obs.append(RemovedPoint(apply(f, ob.center)))
        elif centered(ob.center):
            obs.append(RemovedBall(np.zeros(n), ob.radius**p))
        else:
            raise UnsupportedPush("radial stretch of a ball not centered at the origin")
    return DomainSpec(n, amb, tuple(obs))


def _invert_sphere(f, m, r):
    """Image (center, radius) of the sphere S(m, r), which must avoid the center."""
    c, rho = f.center, f.radius
    q = float(np.dot(m - c, m - c)) - r * r
    if abs(q) <= 1e-12 * max(1.0, r * r):
        raise UnsupportedPush("sphere passes through the inversion center")
    return c + rho**2 * (m - c) / q, rho**2 * r / abs(q)


def _push_inversion(f, domain):
    c = f.center
    n = domain.dim
    amb = domain.ambient
    # which piece of the complement holds the inversion center?
    host = None
    for i, ob in enumerate(domain.obstacles):
        dist = float(np.linalg.norm(c - ob.center))
        if isinstance(ob, RemovedPoint) and dist == 0.0:
            host = ("point", i)
        elif isinstance(ob, RemovedBall) and dist < ob.radius:
            host = ("ball", i)
    if host is None and isinstance(amb, OpenBall) and np.linalg.norm(c - amb.center) > amb.radius:
        host = ("exterior", None)
    if host is None:
        raise UnsupportedPush("the inversion center must lie in the interior of the complement or be a removed point")

    obs = []
    for i, ob in enumerate(domain.obstacles):
        if host[1] == i:
            continue
        if isinstance(ob, RemovedPoint):
            obs.append(RemovedPoint(apply(f, ob.center)))
        else:
            obs.append(RemovedBall(*_invert_sphere(f, ob.center, ob.radius)))

    if host[0] == "ball":
        # the host ball turns inside out and becomes the ambient region
        hb = domain.obstacles[host[1]]
        new_amb = OpenBall(*_invert_sphere(f, hb.center, hb.radius))
        if isinstance(amb, OpenBall):
            obs.append(RemovedBall(*_invert_sphere(f, amb.center, amb.radius)))
        else:
            obs.append(RemovedPoint(c.copy()))  # image of infinity
        return DomainSpec(n, new_amb, tuple(obs))
    if host[0] == "point":
        if isinstance(amb, OpenBall):
            obs.append(RemovedBall(*_invert_sphere(f, amb.center, amb.radius)))
        else:
            obs.append(RemovedPoint(c.copy()))
        return DomainSpec(n, WholeSpace(), tuple(obs))
    return DomainSpec(n, OpenBall(*_invert_sphere(f, amb.center, amb.radius)), tuple(obs))


def push_domain(f, domain: DomainSpec) -> DomainSpec:
    """Exact image f(D) for the supported map/primitive combinations."""
    if isinstance(f, Similarity):
        if f.Q.shape[0] != domain.dim:
            raise ValueError("map dimension does not match the domain")
        return transform_domain(domain, f.s, f.Q, f.v)
    if isinstance(f, Linear):
        if f.A.shape[0] != domain.dim:
            raise ValueError("map dimension does not match the domain")
        return _push_linear(f, domain)
    if isinstance(f, RadialStretch):
        return _push_radial(f, domain)
    if isinstance(f, Inversion):
        if f.center.shape != (domain.dim,):
            raise ValueError("map dimension does not match the domain")
        return _push_inversion(f, domain)
    raise TypeError(f"unsupported map {f!r}")


# --- theorem checks -------------------------------------------------------------------


def qc1_constant(f, n: int, lambda_n: float | None = None) -> float:
    """C_1 evaluated at the map's maximal dilatation."""
    lam = grotzsch_lambda(n) if lambda_n is None else lambda_n
    return c1_bound(n, dilatation(f, n).K, lam)


def check_qc1(f, domain: DomainSpec, z, budget=None) -> float:
    """lambda_D(z) d(z) / (lambda_D'(f z) d'(f z)) with D' = f(D)."""
    image = push_domain(f, domain)
    z = np.asarray(z, dtype=float)
    fz = apply(f, z)
    num = eval_density(domain, z, DensityKind.LAMBDA, budget)
    den = eval_density(image, fz, DensityKind.LAMBDA, budget)
    # lambda d = d / reciprocal
    return (dist_to_complement(domain, z) / num.reciprocal) / (dist_to_complement(image, fz) / den.reciprocal)


def check_qc2(f, domain: DomainSpec, z, w, params: GraphParams | None = None) -> tuple[float, float]:
    """(d_D'(f z, f w), max(d, d^alpha)) with d = d_D(z, w)."""
    image = push_domain(f, domain)
    z = np.asarray(z, dtype=float)
    w = np.asarray(w, dtype=float)
    d = distance(domain, z, w, MetricKind.D_LAMBDA, params).value
    lhs = distance(image, apply(f, z), apply(f, w), MetricKind.D_LAMBDA, params).value
    a = dilatation(f, domain.dim).alpha
    return float(lhs), float(max(d, d**a))


# --- JSON ---------------------------------------------------------------------------


def map_from_json(data):
    """Parse {"similarity": {...}} / {"radial_stretch": {...}} /
    {"linear": {...}} / {"inversion": {...}}."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict) or len(data) != 1:
        raise ValueError("map description must be an object with exactly one key")
    (name, body), = data.items()
    try:
        return _map_from_body(name, body)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed {name!r} map: missing or invalid {exc}") from None


def _map_from_body(name, body):
    if name == "similarity":
        n = len(body["v"])
        return Similarity(body.get("s", 1.0), body.get("Q", np.eye(n).tolist()), body["v"])
    if name == "radial_stretch":
        return RadialStretch(float(body["K"]), bool(body.get("inverse", False)))
    if name == "linear":
        return Linear(body["A"])
    if name == "inversion":
        return Inversion(body["center"], body.get("radius", 1.0))
    raise ValueError(f"unknown map type {name!r}")


def map_to_json(f) -> dict:
    if isinstance(f, Similarity):
        return {"similarity": {"s": f.s, "Q": f.Q.tolist(), "v": f.v.tolist()}}
    if isinstance(f, RadialStretch):
        return {"radial_stretch": {"K": f.K, "inverse": f.inverse}}
    if isinstance(f, Linear):
        return {"linear": {"A": f.A.tolist()}}
    if isinstance(f, Inversion):
        return {"inversion": {"center": f.center.tolist(), "radius": f.radius}}
    raise TypeError(f"unsupported map {f!r}")
