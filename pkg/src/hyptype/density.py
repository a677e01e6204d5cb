"""The densities lambda, lambda' and lambda'' and the ring quantity beta.

All three densities share the pair objective

    P(z; a, b) = |z - a| (1 + |log(|a - b| / |z - a|)|)

and differ only in where the pair (a, b) may range:

* ``LAMBDA_PPRIME``: a a nearest boundary point of z, b on the boundary;
* ``LAMBDA_PRIME``:  a and b anywhere on the boundary;
* ``LAMBDA``:        a and b anywhere in the complement of D.

The density is the reciprocal of the infimum.

How the minimum is found
------------------------
The boundary of a supported domain is a finite union of points and spheres
(the *primitives*).  We minimise separately over every ordered pair of
primitives (A for a, P for b) and take the smallest value.

For a fixed ``a`` the distances ``|a - b|``, b in P, fill the interval
``[| |a-c| - rho |, |a-c| + rho]`` (c, rho the center and radius of P), so
the best b is the one whose distance to a is that interval's closest value
to ``|z - a|``.  The resulting objective depends on a only through
``u = |z - a|`` and ``w = |a - c|``, and is strictly increasing in u at fixed
w.  A minimiser therefore sits on the boundary of the set of reachable
``(u, w)``, which for a on a sphere A is traced by the great circle of A in
the plane through z, the center of A and c.  Each pair is thus a 1-d problem
in the angle on that circle: a uniform angular scan followed by
golden-section refinement of the best brackets.

For ``LAMBDA`` only one more family of candidates is needed: a minimising
pair with a off the boundary has a = (z + b) / 2 with b on the boundary.
Such a pair is worth ``|z - b| / 2``, and the admissible b are the boundary
points lying in the image of the complement under x -> 2x - z.  Every piece
of that set is a spherical cap (or a point), so its point nearest to z is
found in closed form.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DomainError,
    DomainSpec,
    OpenBall,
    RemovedBall,
    RemovedPoint,
    _inside,
    _points,
    basis_vector,
    nearest_boundary_points,
    primitive_distances,
    resolvable,
    sample_boundary,
    sphere_points,
)

__all__ = [
    "DensityKind",
    "DensityValue",
    "SamplingBudget",
    "pair_objective",
    "beta",
    "eval_density",
    "density_batch",
    "density_all",
    "DensityBatch",
    "brute_force_density",
]

_TIE = 1e-13
_PPRIME_CAP = 4_000_000
_GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)


class DensityKind(enum.Enum):
    LAMBDA = "lambda"
    LAMBDA_PRIME = "lambda1"
    LAMBDA_PPRIME = "lambda2"

    @classmethod
    def parse(cls, s) -> "DensityKind":
        if isinstance(s, cls):
            return s
        key = str(s).lower()
        for k in cls:
            if key in (k.value, k.name.lower()):
                return k
        raise ValueError(f"unknown density kind {s!r}")


@dataclass(frozen=True)
class SamplingBudget:
    """``samples`` angles per circle scan; ``seed`` fixes the scan phase."""

    samples: int = 2048
    seed: int = 0
    refine_iters: int = 80
    refine_brackets: int = 3


@dataclass(frozen=True, eq=False)
class DensityValue:
    value: float
    reciprocal: float
    witness_a: np.ndarray
    witness_b: np.ndarray
    exceptional_midpoint: bool = False


def pair_objective(z, a, b):
    """|z-a| (1 + |log(|a-b|/|z-a|)|); +inf when a == b.

    Broadcasts over leading axes of ``a`` and ``b``.
    """
    z, a, b = (np.asarray(x, dtype=float) for x in (z, a, b))
    u = np.linalg.norm(a - z, axis=-1)
    v = np.linalg.norm(a - b, axis=-1)
    if np.any(u == 0):
        raise ValueError("pair_objective: a coincides with z")
    with np.errstate(divide="ignore"):
        out = u * (1.0 + np.abs(np.log(v / u)))
    return float(out) if np.ndim(out) == 0 else out


# --- small vectorised helpers --------------------------------------------------


def _gap(u, lo, hi):
    """log-distance of u from [lo, hi] (zero inside).  lo == 0 is allowed."""
    with np.errstate(divide="ignore", invalid="ignore"):
        below = np.where(u < lo, np.log(lo / u), 0.0)
        above = np.where(u > hi, np.log(u / hi), 0.0)
    return below + above


def _unit_rows(V, fallback):
    """Normalise rows of V; rows that vanish get the matching row of ``fallback``."""
    nv = np.linalg.norm(V, axis=1)
    ok = nv > 0
    out = np.array(fallback, dtype=float, copy=True)
    out[ok] = V[ok] / nv[ok, None]
    return out


def _perp_rows(V, E):
    """Unit vectors orthogonal to the unit rows of E, built from V where possible
    and otherwise from the coordinate axis least aligned with E."""
    W = V - np.sum(V * E, axis=1, keepdims=True) * E
    nw = np.linalg.norm(W, axis=1)
    scale = np.maximum(np.linalg.norm(V, axis=1), 1.0)
    bad = nw <= 1e-13 * scale
    if np.any(bad):
        Eb = E[bad]
        j = np.argmin(np.abs(Eb), axis=1)
        B = np.zeros_like(Eb)
        B[np.arange(len(j)), j] = 1.0
        W[bad] = B - np.sum(B * Eb, axis=1, keepdims=True) * Eb
        nw[bad] = np.linalg.norm(W[bad], axis=1)
    return W / nw[:, None]


def _point_at_distance(a, c, rho, t, toward):
    """Points b with |b - c| = rho and |a - b| = t, kept in the plane of a, c
    and ``toward`` when that plane exists.  Row-wise."""
    A = a - c
    w = np.linalg.norm(A, axis=1)
    n = a.shape[1]
    e0 = np.tile(basis_vector(n, 0), (len(a), 1))
    U = _unit_rows(A, e0)
    T = _perp_rows(toward - c, U)
    # x = 1 - cos(phi) in factored form, so short chords keep their length
    g = w - rho
    with np.errstate(divide="ignore", invalid="ignore"):
        x = (t - g) * (t + g) / (2 * w * rho)
    x = np.where(w > 0, np.clip(x, 0.0, 2.0), 0.0)
    sphi = np.sqrt(x * (2.0 - x))
    return c + rho * ((1.0 - x)[:, None] * U + sphi[:, None] * T)


class _Best:
    """Running minimum with a deterministic tie-break on (a, b) coordinates."""

    def __init__(self, N, n):
        self.val = np.full(N, np.inf)
        self.a = np.zeros((N, n))
        self.b = np.zeros((N, n))
        self.tag = np.zeros(N, dtype=int)

    def offer(self, val, a, b, tag=0):
        val = np.asarray(val, dtype=float)
        better = val < self.val * (1 - _TIE)
        tie = ~better & (val <= self.val * (1 + _TIE)) & np.isfinite(val)
        if np.any(tie):
            idx = np.flatnonzero(tie)
            new = np.hstack([a[idx], b[idx]])
            old = np.hstack([self.a[idx], self.b[idx]])
            diff = new - old
            nz = diff != 0
            first = np.argmax(nz, axis=1)
            lex = nz.any(axis=1) & (diff[np.arange(len(idx)), first] < 0)
            better[idx[lex]] = True
        self.val = np.where(better, val, self.val)
        self.a[better] = a[better]
        self.b[better] = b[better]
        self.tag[better] = tag


# --- candidate families ----------------------------------------------------------


def _pair_range(prim, a):
    """Interval of distances |a - b|, b on ``prim``, for each row of a."""
    w = np.linalg.norm(a - prim.center, axis=1)
    return np.abs(w - prim.radius), w + prim.radius


def _offer_fixed_a(best, Z, a, prims, skip):
    """For fixed points a (one per row of Z), offer the best b on each primitive."""
    u = np.linalg.norm(Z - a, axis=1)
    for k, P in enumerate(prims):
        if k == skip:
            continue
        lo, hi = _pair_range(P, a)
        val = u * (1.0 + _gap(u, lo, hi))
        if P.is_point:
            b = np.broadcast_to(P.center, a.shape).copy()
        else:
            t = np.clip(u, lo, hi)
            b = _point_at_distance(a, P.center, P.radius, t, Z)
        best.offer(val, a, b)


def _offer_pair(best, Z, a, P):
    u = np.linalg.norm(Z - a, axis=1)
    lo, hi = _pair_range(P, a)
    val = u * (1.0 + _gap(u, lo, hi))
    if P.is_point:
        b = np.broadcast_to(P.center, a.shape).copy()
    else:
        b = _point_at_distance(a, P.center, P.radius, np.clip(u, lo, hi), Z)
    best.offer(val, a, b)


def _nearest_points(Z, prim):
    if prim.is_point:
        return np.broadcast_to(prim.center, Z.shape).copy()
    n = Z.shape[1]
    e0 = np.tile(basis_vector(n, 0), (len(Z), 1))
    return prim.center + prim.radius * _unit_rows(Z - prim.center, e0)


def _merge(best, rows, sub):
    part = _Best(len(rows), best.a.shape[1])
    part.val, part.a, part.b = best.val[rows], best.a[rows], best.b[rows]
    part.offer(sub.val, sub.a, sub.b)
    best.val[rows], best.a[rows], best.b[rows] = part.val, part.a, part.b


def _lambda_pprime(domain, Z, tol=1e-12):
    prims = domain.primitives
    dist = primitive_distances(domain, Z)
    d = dist.min(axis=1)
    best = _Best(*Z.shape)
    for j, A in enumerate(prims):
        rows = np.flatnonzero(dist[:, j] <= d * (1 + tol))
        if len(rows) == 0:
            continue
        sub = _Best(len(rows), Z.shape[1])
        _offer_fixed_a(sub, Z[rows], _nearest_points(Z[rows], A), prims, j if A.is_point else -1)
        _merge(best, rows, sub)
    return best


def _circle_objective(zn, p1, p2, wn2, r, rho):
    """Pair objective along the great circle a(t) = m + r (cos t e1 + sin t e2).

    Per-row geometry enters through |z - m| = zn and the components p1, p2 of
    c - m on e1, e2; ``t`` has one row per point (any number of columns).
    """
    zn, p1, p2 = zn[:, None], p1[:, None], p2[:, None]

    def f(t):
        ct, st = np.cos(t), np.sin(t)
        u = np.sqrt(np.maximum(zn * zn + r * r - 2 * r * zn * ct, 0.0))
        w = np.sqrt(np.maximum(wn2 + r * r - 2 * r * (p1 * ct + p2 * st), 0.0))
        return u * (1.0 + _gap(u, np.abs(w - rho), w + rho))

    return f


def _golden(f, lo, hi, iters):
    """Golden-section search, one independent bracket per row."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = f(x1[:, None])[:, 0]
    f2 = f(x2[:, None])[:, 0]
    for _ in range(iters):
        left = f1 <= f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - _GOLDEN * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + _GOLDEN * (hi - lo))
        fe = f(np.where(left, nx1, nx2)[:, None])[:, 0]
        f1, f2 = np.where(left, fe, f2), np.where(left, f1, fe)
        x1, x2 = nx1, nx2
    x = 0.5 * (lo + hi)
    return x, f(x[:, None])[:, 0]


def _circle_minimiser(Z, A, P, budget):
    """Best a on sphere A when b ranges over primitive P (rows of Z)."""
    N, n = Z.shape
    m, r = A.center, A.radius
    Zv = Z - m
    Wv = np.tile(P.center - m, (N, 1))
    e0 = np.tile(basis_vector(n, 0), (N, 1))
    e1 = _unit_rows(Zv, _unit_rows(Wv, e0))
    e2 = _perp_rows(Wv, e1)
    zn = np.linalg.norm(Zv, axis=1)
    p1 = np.sum(Wv * e1, axis=1)
    p2 = np.sum(Wv * e2, axis=1)
    wn2 = float(np.dot(P.center - m, P.center - m))

    M = int(budget.samples)
    step = 2 * np.pi / M
    phase = np.random.default_rng(budget.seed).uniform()
    grid = step * (np.arange(M) + phase)
    best_t = np.zeros(N)
    best_v = np.empty(N)
    chunk = max(1, 2_000_000 // M)
    for s in range(0, N, chunk):
        sl = slice(s, min(N, s + chunk))
        f = _circle_objective(zn[sl], p1[sl], p2[sl], wn2, r, P.radius)
        k = len(best_t[sl])
        # t = 0 is the nearest point of A to z
        bt = np.zeros(k)
        bv = f(bt[:, None])[:, 0]
        vals = f(np.broadcast_to(grid, (k, M)))
        nb = min(budget.refine_brackets, M)
        order = np.argpartition(vals, nb - 1, axis=1)[:, :nb]
        for q in range(nb):
            centre = grid[order[:, q]]
            t, v = _golden(f, centre - step, centre + step, budget.refine_iters)
            take = v < bv
            bv = np.where(take, v, bv)
            bt = np.where(take, t, bt)
        best_t[sl], best_v[sl] = bt, bv
    return m + r * (np.cos(best_t)[:, None] * e1 + np.sin(best_t)[:, None] * e2)


def _lambda_prime(domain, Z, budget, start):
    prims = domain.primitives
    dist = primitive_distances(domain, Z)
    best = _Best(*Z.shape)
    best.offer(start.val, start.a, start.b)
    for j, A in enumerate(prims):
        for k, P in enumerate(prims):
            if A.is_point and k == j:
                continue
            # every pair with a on A costs at least d(z, A); rows where that
            # already exceeds the best value cannot change the result
            rows = np.flatnonzero(dist[:, j] <= best.val * (1 + _TIE))
            if len(rows) == 0:
                break
            Zr = Z[rows]
            if A.is_point:
                a = np.broadcast_to(A.center, Zr.shape).copy()
            elif k == j:
                # own sphere: the objective only grows with |z - a|
                a = _nearest_points(Zr, A)
            else:
                a = _circle_minimiser(Zr, A, P, budget)
            sub = _Best(*Zr.shape)
            _offer_pair(sub, Zr, a, P)
            _merge(best, rows, sub)
    return best


def _complement_regions(domain):
    """Closed pieces of the complement: ('point', c, 0), ('ball', c, r),
    ('exterior', c, R)."""
    out = []
    for ob in domain.obstacles:
        if isinstance(ob, RemovedPoint):
            out.append(("point", ob.center, 0.0))
        else:
            out.append(("ball", ob.center, ob.radius))
    if isinstance(domain.ambient, OpenBall):
        out.append(("exterior", domain.ambient.center, domain.ambient.radius))
    return out


def _midpoints(domain, Z):
    """Pairs a = (z + b)/2 in the complement with b on the boundary."""
    N, n = Z.shape
    best = _Best(N, n)
    tol = 1e-12 * domain.scale
    e0 = np.tile(basis_vector(n, 0), (N, 1))
    for P in domain.primitives:
        for kind, c, R in _complement_regions(domain):
            C2 = 2 * c - Z
            R2 = 2 * R
            if P.is_point:
                b = np.broadcast_to(P.center, Z.shape).copy()
                dd = np.linalg.norm(b - C2, axis=1)
                if kind == "point":
                    ok = dd <= tol
                elif kind == "ball":
                    ok = dd <= R2 + tol
                else:
                    ok = dd >= R2 - tol
            else:
                m, rho = P.center, P.radius
                V = C2 - m
                D = np.linalg.norm(V, axis=1)
                if kind == "point":
                    ok = np.abs(D - rho) <= tol
                    b = C2.copy()
                else:
                    U = _unit_rows(V, e0)
                    zh = _unit_rows(Z - m, U)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        kappa = (rho**2 + D**2 - R2**2) / (2 * rho * D)
                    cs = np.sum(zh * U, axis=1)
                    if kind == "ball":
                        ok = np.where(D > 0, kappa <= 1.0, rho <= R2)
                        free = (D == 0) | (cs >= kappa)
                    else:
                        ok = np.where(D > 0, kappa >= -1.0, rho >= R2)
                        free = (D == 0) | (cs <= kappa)
                    kc = np.clip(np.nan_to_num(kappa), -1.0, 1.0)
                    rim = m + rho * (
                        kc[:, None] * U
                        + np.sqrt(1.0 - kc**2)[:, None] * _perp_rows(zh, U)
                    )
                    b = np.where(free[:, None], m + rho * zh, rim)
            val = np.where(ok, 0.5 * np.linalg.norm(Z - b, axis=1), np.inf)
            best.offer(val, 0.5 * (Z + b), b)
    return best


# --- public API ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DensityBatch:
    """Row-wise densities for a batch of points."""

    value: np.ndarray
    reciprocal: np.ndarray
    witness_a: np.ndarray
    witness_b: np.ndarray
    exceptional: np.ndarray


def _prepare(domain, Z, budget):
    budget = budget or SamplingBudget()
    if budget.samples < 2:
        raise ValueError("sampling budget needs at least 2 samples")
    Z, _ = _points(domain, Z)
    _require_resolvable(domain, Z)
    return Z, budget


def _require_resolvable(domain, Z):
    if not np.all(_inside(domain, Z)):
        raise DomainError("point_in_domain", "density evaluated outside D")
    if not np.all(resolvable(domain, Z)):
        raise DomainError("resolvable_point", "z lies within rounding error of the boundary")


def _batch(best, exceptional=None):
    if exceptional is None:
        exceptional = np.zeros(len(best.val), dtype=bool)
    return DensityBatch(1.0 / best.val, best.val.copy(), best.a.copy(), best.b.copy(), exceptional)


def _stages(domain, Z, budget, upto):
    """Run the nested searches up to ``upto``; each stage starts from the
    previous one, so the computed values obey lambda'' <= lambda' <= lambda."""
    out = {}
    best = _lambda_pprime(domain, Z)
    out[DensityKind.LAMBDA_PPRIME] = _batch(best)
    if upto is DensityKind.LAMBDA_PPRIME:
        return out
    best = _lambda_prime(domain, Z, budget, best)
    out[DensityKind.LAMBDA_PRIME] = _batch(best)
    if upto is DensityKind.LAMBDA_PRIME:
        return out
    mid = _midpoints(domain, Z)
    exceptional = mid.val < best.val * (1 - 1e-12)
    best.val = np.where(exceptional, mid.val, best.val)
    best.a[exceptional] = mid.a[exceptional]
    best.b[exceptional] = mid.b[exceptional]
    out[DensityKind.LAMBDA] = _batch(best, exceptional)
    return out


def density_batch(domain: DomainSpec, Z, kind, budget: SamplingBudget | None = None) -> DensityBatch:
    """Evaluate one density at every row of ``Z`` (all rows must lie in D)."""
    kind = DensityKind.parse(kind)
    Z, budget = _prepare(domain, Z, budget)
    return _stages(domain, Z, budget, kind)[kind]


def density_all(domain: DomainSpec, Z, budget: SamplingBudget | None = None) -> dict:
    """All three densities at every row of ``Z`` in one pass, keyed by kind."""
    Z, budget = _prepare(domain, Z, budget)
    return _stages(domain, Z, budget, DensityKind.LAMBDA)


def eval_density(domain: DomainSpec, z, kind, budget: SamplingBudget | None = None) -> DensityValue:
    """Density of the given kind at z, with a witness pair.

    The reported reciprocal is the pair objective evaluated at the witness,
    so it is always an attained value, i.e. an upper bound for the infimum.
    """
    z = np.asarray(z, dtype=float)
    res = density_batch(domain, z[None, :], kind, budget)
    a, b = res.witness_a[0], res.witness_b[0]
    rec = pair_objective(z, a, b)
    return DensityValue(1.0 / rec, rec, a, b, bool(res.exceptional[0]))


def beta(domain: DomainSpec, z) -> float:
    """Smallest |log(|a-b| / d(z))| over nearest boundary points a and boundary b."""
    z = np.asarray(z, dtype=float)
    res = density_batch(domain, z[None, :], DensityKind.LAMBDA_PPRIME)
    a, b = res.witness_a[0], res.witness_b[0]
    return abs(float(np.log(np.linalg.norm(a - b) / np.linalg.norm(z - a))))


# --- brute-force oracle ------------------------------------------------------------


def _complement_volume_samples(domain, count, rng):
    """Uniform samples of the solid pieces of the complement: obstacle balls
    and the shell R <= |x - c| <= 2R outside an ambient ball."""
    n = domain.dim
    pieces = []
    for ob in domain.obstacles:
        if isinstance(ob, RemovedBall):
            pieces.append((ob.center, 0.0, ob.radius))
    if isinstance(domain.ambient, OpenBall):
        amb = domain.ambient
        pieces.append((amb.center, amb.radius, 2 * amb.radius))
    if not pieces or count <= 0:
        return np.empty((0, n))
    vol = np.array([hi**n - lo**n for _, lo, hi in pieces])
    alloc = np.maximum(1, np.round(count * vol / vol.sum()).astype(int))
    out = []
    for (c, lo, hi), k in zip(pieces, alloc):
        dirs = sphere_points(n, int(k), rng)
        rad = (lo**n + rng.uniform(size=int(k)) * (hi**n - lo**n)) ** (1.0 / n)
        out.append(c + rad[:, None] * dirs)
    return np.vstack(out)


def _exhaustive_min(z, A, B, chunk_pairs=4_000_000):
    """min over a in A, b in B of the pair objective; returns (value, ia, ib)."""
    u = np.linalg.norm(A - z, axis=1)
    logu = np.log(u)
    best = (np.inf, 0, 0)
    step = max(1, chunk_pairs // max(1, len(B)))
    for s in range(0, len(A), step):
        Ac = A[s : s + step]
        d2 = np.zeros((len(Ac), len(B)))
        for k in range(A.shape[1]):
            diff = Ac[:, k, None] - B[None, :, k]
            d2 += diff * diff
        with np.errstate(divide="ignore"):
            val = u[s : s + step, None] * (1.0 + np.abs(0.5 * np.log(d2) - logu[s : s + step, None]))
        val[d2 == 0] = np.inf
        i = int(np.argmin(val))
        ia, ib = divmod(i, len(B))
        if val[ia, ib] < best[0]:
            best = (float(val[ia, ib]), s + ia, ib)
    return best


def brute_force_density(domain: DomainSpec, z, kind, grid: int = 1000, seed: int = 0) -> DensityValue:
    """Exhaustive search over sampled pairs; a test oracle with no refinement.

    ``grid`` candidates are drawn independently for each side of the pair:
    boundary samples (for ``LAMBDA`` half of them are replaced by uniform
    samples of the solid parts of the complement).  Independent draws keep
    the pair distances on a single sphere from collapsing onto the few chord
    lengths of one equispaced set.  For ``LAMBDA_PPRIME`` a is restricted to the
    exact nearest boundary points, so the grid^2 pair budget is spent on b
    (capped at ``_PPRIME_CAP`` samples); when z sits at the center of a
    nearest sphere, a also ranges over the sampled part of that sphere.
    """
    kind = DensityKind.parse(kind)
    z = np.asarray(z, dtype=float)
    _require_resolvable(domain, z[None, :])
    rng = np.random.default_rng(seed)
    if kind is DensityKind.LAMBDA:
        sides = []
        for k in range(2):
            vol = _complement_volume_samples(domain, grid // 2, rng)
            bnd = sample_boundary(domain, max(1, grid - len(vol)), seed + k)
            sides.append(np.vstack([bnd, vol]))
        A, B = sides
    elif kind is DensityKind.LAMBDA_PRIME:
        A = sample_boundary(domain, grid, seed)
        B = sample_boundary(domain, grid, seed + 1)
    else:
        pts, degenerate = nearest_boundary_points(domain, z)
        A = np.array(pts)
        if degenerate:
            B = sample_boundary(domain, grid, seed)
            d = primitive_distances(domain, z[None, :]).min()
            on = np.abs(np.linalg.norm(B - z, axis=1) - d) <= 1e-9 * domain.scale
            A = np.vstack([A, B[on]])
        else:
            # with a fixed, the whole pair budget goes to b
            B = sample_boundary(domain, min(grid * grid // len(A), _PPRIME_CAP), seed)
    val, ia, ib = _exhaustive_min(z, A, B)
    a, b = A[ia], B[ib]
    off_boundary = primitive_distances(domain, a[None, :]).min() > 1e-12 * domain.scale
    return DensityValue(1.0 / val, val, a, b, bool(kind is DensityKind.LAMBDA and off_boundary))
