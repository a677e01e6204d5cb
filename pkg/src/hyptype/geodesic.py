"""Path distances d, d', d'' and the quasihyperbolic distance k.

Each distance is the infimum of a density's line integral over arcs joining
two points.  We approximate it from above by shortest paths on a graph:

* nodes are a square lattice of spacing h (plus the two endpoints), kept
  only where the clearance d(x) is at least h/4;
* edges join nodes closer than 2.5 h whose straight segment lies in D, which
  is decided exactly (segment-to-center distances against every obstacle;
  the ambient ball is convex);
* an edge's weight is the composite Gauss-Legendre integral of the density
  along the segment.

Every graph path is a genuine arc in D, so every returned value is an upper
bound for the continuous distance.

The subdivision of an edge into quadrature panels depends only on the
geometry (never on the density kind), so all kinds share the same nodes.
Since the computed densities satisfy lambda'' <= lambda' <= lambda <= 1/d
pointwise, the four weights of every edge are ordered the same way, and so
are shortest-path values on a common graph.

The lattice is laid out in a frame built from the endpoints and the
obstacle centers, so a similarity applied to the whole configuration
transports the graph with it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .density import DensityKind, SamplingBudget, density_all, density_batch
from .geometry import (
    DomainError,
    DomainSpec,
    OpenBall,
    RemovedBall,
    _inside,
    _points,
    primitive_distances,
)

__all__ = [
    "MetricKind",
    "GraphParams",
    "PathGraph",
    "DistanceResult",
    "GraphDisconnected",
    "build_graph",
    "edge_weight",
    "distance",
    "all_distances",
]


class MetricKind(enum.Enum):
    D_LAMBDA = "d"
    D_LAMBDA_PRIME = "d1"
    D_LAMBDA_PPRIME = "d2"
    QUASIHYPERBOLIC = "quasihyperbolic"

    @classmethod
    def parse(cls, s) -> "MetricKind":
        if isinstance(s, cls):
            return s
        key = str(s).lower()
        for k in cls:
            if key in (k.value, k.name.lower()):
                return k
        if key == "k":
            return cls.QUASIHYPERBOLIC
        raise ValueError(f"unknown metric kind {s!r}")

    @property
    def density(self):
        return _DENSITY_OF.get(self)


_DENSITY_OF = {
    MetricKind.D_LAMBDA: DensityKind.LAMBDA,
    MetricKind.D_LAMBDA_PRIME: DensityKind.LAMBDA_PRIME,
    MetricKind.D_LAMBDA_PPRIME: DensityKind.LAMBDA_PPRIME,
}

#: density budget used for edge weights: a cheaper scan than the pointwise default
DEFAULT_EDGE_BUDGET = SamplingBudget(samples=64, refine_iters=40, refine_brackets=2)


class GraphDisconnected(DomainError):
    def __init__(self, message: str):
        super().__init__("graph_connected", message)


@dataclass(frozen=True)
class GraphParams:
    """Discretisation controls.

    ``h`` is the lattice spacing; ``None`` uses ``h_rel`` times the radius of
    the bounding region, which keeps the graph size scale-free.
    ``max_panels`` caps the quadrature subdivision of a single edge.
    """

    h: float | None = None
    h_rel: float = 1 / 30
    refinements: int = 0
    quad_order: int = 16
    neighbor_factor: float = 2.5
    clearance_factor: float = 0.25
    tube_factor: float = 4.0
    panel_fraction: float = 0.1
    max_panels: int = 64
    max_regrids: int = 3
    max_nodes: int = 400_000
    seed: int = 0
    budget: SamplingBudget = field(default_factory=lambda: DEFAULT_EDGE_BUDGET)


@dataclass(eq=False)
class PathGraph:
    nodes: np.ndarray
    edges: np.ndarray
    weights: dict
    meta: dict

    def matrix(self, kind) -> "coo_matrix":
        kind = MetricKind.parse(kind)
        n = len(self.nodes)
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.weights[kind]
        return coo_matrix((np.r_[w, w], (np.r_[i, j], np.r_[j, i])), shape=(n, n)).tocsr()

    def shortest(self, kind, sources=None):
        """Shortest-path values from ``sources`` (default: every node)."""
        return dijkstra(self.matrix(kind), directed=False, indices=sources)


@dataclass(frozen=True, eq=False)
class DistanceResult:
    value: float
    path: np.ndarray
    kind: MetricKind
    refinement_level: int
    is_upper_bound: bool = True
    history: tuple = ()


# --- segment geometry ---------------------------------------------------------


def _seg_center_dist(P, Q, c):
    """Distance from c to each segment [P_i, Q_i]."""
    V = Q - P
    L2 = np.einsum("ij,ij->i", V, V)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(L2 > 0, np.einsum("ij,ij->i", c - P, V) / L2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(P + t[:, None] * V - c, axis=1)


def _segments_in_domain(domain, P, Q):
    ok = _inside(domain, P) & _inside(domain, Q)
    for ob in domain.obstacles:
        r = ob.radius if isinstance(ob, RemovedBall) else 0.0
        ok &= _seg_center_dist(P, Q, ob.center) > r
    return ok


def _segment_clearance(domain, P, Q):
    """Exact min over each segment of d(x, boundary)."""
    out = np.full(len(P), np.inf)
    for p in domain.primitives:
        if p.ambient:
            far = np.maximum(np.linalg.norm(P - p.center, axis=1), np.linalg.norm(Q - p.center, axis=1))
            out = np.minimum(out, p.radius - far)
        else:
            out = np.minimum(out, _seg_center_dist(P, Q, p.center) - p.radius)
    return out


# --- quadrature ------------------------------------------------------------------


def _panels(domain, P, Q, params):
    """Panel counts per segment so that the clearance changes by at most
    ``panel_fraction`` of its minimum across each panel."""
    L = np.linalg.norm(Q - P, axis=1)
    dmin = _segment_clearance(domain, P, Q)
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.ceil(L / (params.panel_fraction * dmin))
    m = np.nan_to_num(m, nan=1.0, posinf=params.max_panels)
    return np.clip(m, 1, params.max_panels).astype(int)


def _quad_points(P, Q, panels, order):
    """Gauss-Legendre nodes and weights on every panel of every segment.

    Returns (X, W, owner): the weights already include the panel length.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    owner_panel = np.repeat(np.arange(len(P)), panels)
    k = np.concatenate([np.arange(m) for m in panels]) if len(panels) else np.empty(0, int)
    m = panels[owner_panel]
    # panel [k/m, (k+1)/m] of the unit parameter interval
    s = (k[:, None] + 0.5 * (x[None, :] + 1.0)) / m[:, None]
    V = Q - P
    X = P[owner_panel, None, :] + s[..., None] * V[owner_panel, None, :]
    L = np.linalg.norm(V, axis=1)
    W = 0.5 * w[None, :] * (L[owner_panel] / m)[:, None]
    owner = np.repeat(owner_panel, order)
    return X.reshape(-1, P.shape[1]), W.ravel(), owner


def _edge_weights(domain, P, Q, kinds, params, chunk_points=1_000_000):
    """Weights for every requested kind, processed in chunks of edges."""
    E = len(P)
    if E == 0:
        return {k: np.zeros(0) for k in kinds}
    panels = _panels(domain, P, Q, params)
    per_edge = panels * params.quad_order
    out = {k: np.empty(E) for k in kinds}
    start = 0
    while start < E:
        stop = start + max(1, int(np.searchsorted(np.cumsum(per_edge[start:]), chunk_points)))
        stop = min(E, stop)
        part = _edge_weights_chunk(domain, P[start:stop], Q[start:stop], panels[start:stop], kinds, params)
        for k in kinds:
            out[k][start:stop] = part[k]
        start = stop
    return out


def _edge_weights_chunk(domain, P, Q, panels, kinds, params):
    E = len(P)
    out = {}
    X, W, owner = _quad_points(P, Q, panels, params.quad_order)
    recip = {}
    dens = [k for k in kinds if k is not MetricKind.QUASIHYPERBOLIC]
    if MetricKind.QUASIHYPERBOLIC in kinds:
        recip[MetricKind.QUASIHYPERBOLIC] = primitive_distances(domain, X).min(axis=1)
    if len(dens) > 1:
        allk = density_all(domain, X, params.budget)
        for k in dens:
            recip[k] = allk[k.density].reciprocal
    elif dens:
        recip[dens[0]] = density_batch(domain, X, dens[0].density, params.budget).reciprocal
    for k in kinds:
        out[k] = np.bincount(owner, weights=W / recip[k], minlength=E)
    return out


def edge_weight(domain: DomainSpec, p, q, kind, quad_order: int = 16, params: GraphParams | None = None) -> float:
    """Integral of the kind's density along the segment [p, q]."""
    kind = MetricKind.parse(kind)
    params = params or GraphParams(quad_order=quad_order)
    if params.quad_order != quad_order:
        params = GraphParams(**{**params.__dict__, "quad_order": quad_order})
    P, _ = _points(domain, p)
    Q, _ = _points(domain, q)
    if np.array_equal(P, Q):
        if not _inside(domain, P)[0]:
            raise DomainError("segment_in_domain", "point is not in D")
        return 0.0
    if not _segments_in_domain(domain, P, Q)[0]:
        raise DomainError("segment_in_domain", "segment leaves D")
    return float(_edge_weights(domain, P, Q, [kind], params)[kind][0])


# --- lattice ------------------------------------------------------------------------


def _frame(domain, z, w):
    """Orthonormal axes: e1 along w - z, then obstacle centers in order of
    their distance from the midpoint, then the standard basis."""
    n = domain.dim
    m = 0.5 * (z + w)
    feats = [w - z]
    prims = sorted(domain.primitives, key=lambda p: (float(np.linalg.norm(p.center - m)), p.radius))
    feats += [p.center - m for p in prims]
    feats += list(np.eye(n))
    axes = []
    for v in feats:
        v = np.array(v, dtype=float)
        for a in axes:
            v = v - np.dot(v, a) * a
        nv = np.linalg.norm(v)
        ref = max(1.0, float(np.linalg.norm(feats[0])), domain.scale)
        if nv > 1e-9 * ref:
            axes.append(v / nv)
        if len(axes) == n:
            break
    return m, np.array(axes)


def _bounding_ball(domain, z, w):
    if isinstance(domain.ambient, OpenBall):
        return domain.ambient.center, domain.ambient.radius
    m = 0.5 * (z + w)
    ext = max(float(np.linalg.norm(p.center - m)) + p.radius for p in domain.primitives)
    return m, 4.0 * (float(np.linalg.norm(z - w)) + ext)


def _lattice_indices(origin, axes, h, center, radius, max_nodes):
    """Integer coordinates I with origin + h * I @ axes inside a ball."""
    n = len(axes)
    off = axes @ (center - origin) / h
    k = int(np.ceil(radius / h)) + 1
    count = (2 * k + 1) ** n
    if count > 8 * max_nodes:
        raise ValueError(f"lattice with spacing {h:g} is too large ({count} candidates)")
    rng = [np.arange(np.floor(o) - k, np.ceil(o) + k + 1) for o in off]
    I = np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, n)
    X = origin + h * (I @ axes)
    return I[np.linalg.norm(X - center, axis=1) <= radius]


def _lattice_in_ball(origin, axes, h, center, radius, max_nodes):
    I = _lattice_indices(origin, axes, h, center, radius, max_nodes)
    return origin + h * (I @ axes)


def _tube_nodes(origin, axes, h, path, radius, max_nodes):
    """Lattice points of spacing h within ``radius`` of the polyline."""
    pieces = []
    for p, q in zip(path[:-1], path[1:]):
        R = 0.5 * float(np.linalg.norm(q - p)) + radius
        I = _lattice_indices(origin, axes, h, 0.5 * (p + q), R, max_nodes)
        X = origin + h * (I @ axes)
        pieces.append(I[_point_seg_dist(X, p, q) <= radius])
    I = np.unique(np.vstack(pieces), axis=0)
    return origin + h * (I @ axes)


def _point_seg_dist(X, p, q):
    v = q - p
    L2 = float(np.dot(v, v))
    t = np.clip((X - p) @ v / L2, 0.0, 1.0) if L2 > 0 else np.zeros(len(X))
    return np.linalg.norm(p + t[:, None] * v - X, axis=1)


def _assemble(domain, z, w, grid, h, params, kinds, extra_nodes=(), extra_edges=(), level=0):
    """Graph on {z, w} + extra nodes + grid points with enough clearance."""
    keep = _inside(domain, grid)
    grid = grid[keep]
    if len(grid):
        grid = grid[primitive_distances(domain, grid).min(axis=1) >= params.clearance_factor * h]
    head = [z, w] + [np.asarray(x, float) for x in extra_nodes]
    nodes = np.vstack([np.array(head), grid]) if len(grid) else np.array(head)
    # merge coincident points, keeping first occurrences (z is node 0, w node 1)
    tol = 1e-9 * h
    tree = cKDTree(nodes)
    dup = np.zeros(len(nodes), dtype=bool)
    rep = np.arange(len(nodes))
    for i, j in sorted(tree.query_pairs(tol)):
        if not dup[j] and not dup[i]:
            dup[j] = True
            rep[j] = i
    if len(nodes) - dup.sum() > params.max_nodes:
        raise ValueError(f"graph would have {len(nodes) - dup.sum()} nodes (max_nodes={params.max_nodes})")
    idx = np.cumsum(~dup) - 1
    remap = idx[rep]
    nodes = nodes[~dup]
    tree = cKDTree(nodes)
    pairs = tree.query_pairs(params.neighbor_factor * h, output_type="ndarray")
    if len(extra_edges):
        ex = remap[np.asarray(extra_edges, dtype=int)]
        pairs = np.vstack([pairs.reshape(-1, 2), ex[ex[:, 0] != ex[:, 1]]])
    pairs = np.sort(pairs.reshape(-1, 2), axis=1)
    pairs = np.unique(pairs, axis=0)
    # orient each edge from its lexicographically smaller endpoint
    P, Q = nodes[pairs[:, 0]], nodes[pairs[:, 1]]
    flip = _lex_greater(P, Q)
    P2 = np.where(flip[:, None], Q, P)
    Q2 = np.where(flip[:, None], P, Q)
    ok = _segments_in_domain(domain, P2, Q2)
    pairs, P2, Q2 = pairs[ok], P2[ok], Q2[ok]
    weights = _edge_weights(domain, P2, Q2, kinds, params)
    meta = {"h": h, "level": level, "seed": params.seed, "quad_order": params.quad_order,
            "source": 0, "target": int(remap[1])}
    return PathGraph(nodes, pairs, weights, meta)


def _lex_greater(P, Q):
    diff = P - Q
    nz = diff != 0
    first = np.argmax(nz, axis=1)
    return nz.any(axis=1) & (diff[np.arange(len(P)), first] > 0)


def _check_endpoints(domain, z, w):
    Z, _ = _points(domain, z)
    W, _ = _points(domain, w)
    if not (_inside(domain, Z)[0] and _inside(domain, W)[0]):
        raise DomainError("point_in_domain", "endpoints must lie in D")
    return Z[0], W[0]


def _default_h(domain, z, w, params):
    if params.h is not None:
        if not params.h > 0:
            raise ValueError("h must be positive")
        return float(params.h)
    return _bounding_ball(domain, z, w)[1] * params.h_rel


def _kinds(kinds):
    if kinds is None:
        return list(MetricKind)
    return [MetricKind.parse(k) for k in kinds]


def build_graph(domain: DomainSpec, z, w, params: GraphParams | None = None, kinds=None, h=None) -> PathGraph:
    """Lattice graph of spacing h over the bounding region, with weights for
    the requested metric kinds (default: all four)."""
    params = params or GraphParams()
    z, w = _check_endpoints(domain, z, w)
    h = h or _default_h(domain, z, w, params)
    origin, axes = _frame(domain, z, w)
    c, R = _bounding_ball(domain, z, w)
    grid = _lattice_in_ball(origin, axes, h, c, R, params.max_nodes)
    return _assemble(domain, z, w, grid, h, params, _kinds(kinds))


def _refine_graph(domain, z, w, path_nodes, h, params, kinds, level):
    origin, axes = _frame(domain, z, w)
    grid = _tube_nodes(origin, axes, h, path_nodes, params.tube_factor * 2 * h, params.max_nodes)
    k = len(path_nodes)
    # previous path nodes follow z, w in the head; its edges are kept verbatim
    extra_nodes = path_nodes[1:-1]
    ids = np.r_[0, np.arange(2, 2 + len(extra_nodes)), 1] if k > 1 else np.array([0])
    extra_edges = np.column_stack([ids[:-1], ids[1:]]) if k > 1 else np.empty((0, 2), int)
    return _assemble(domain, z, w, grid, h, params, kinds, extra_nodes, extra_edges, level)


def _shortest_path(graph, kind):
    src, dst = graph.meta["source"], graph.meta["target"]
    dist, pred = dijkstra(graph.matrix(kind), directed=False, indices=src, return_predecessors=True)
    if not np.isfinite(dist[dst]):
        return None
    idx = [dst]
    while idx[-1] != src:
        idx.append(int(pred[idx[-1]]))
    idx = idx[::-1]
    lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(graph.edges)}
    wts = graph.weights[kind]
    total = 0.0
    for a, b in zip(idx[:-1], idx[1:]):
        total += wts[lookup[(min(a, b), max(a, b))]]
    return total, np.array(idx)


def distance(domain: DomainSpec, z, w, kind, params: GraphParams | None = None) -> DistanceResult:
    """Upper bound for the chosen distance between z and w.

    The coarse graph is rebuilt at h/2 (up to ``max_regrids`` times) while it
    does not connect z to w.  Each of the ``refinements`` rounds then halves
    h inside a tube around the current path, keeping that path available, so
    the value never increases.
    """
    kind = MetricKind.parse(kind)
    params = params or GraphParams()
    z, w = _check_endpoints(domain, z, w)
    if np.array_equal(z, w):
        return DistanceResult(0.0, np.array([z]), kind, 0)
    h = _default_h(domain, z, w, params)
    found = None
    for _ in range(params.max_regrids + 1):
        g = build_graph(domain, z, w, params, [kind], h=h)
        found = _shortest_path(g, kind)
        if found is not None:
            break
        h /= 2
    if found is None:
        raise GraphDisconnected(f"z and w are not connected at spacing {h * 2:g}")
    value, idx = found
    path = g.nodes[idx]
    history = [value]
    level = 0
    for r in range(1, params.refinements + 1):
        h /= 2
        g = _refine_graph(domain, z, w, path, h, params, [kind], r)
        found = _shortest_path(g, kind)
        if found is None:
            raise GraphDisconnected("refined graph lost the previous path")
        v, idx = found
        history.append(v)
        if v < value:
            value, path, level = v, g.nodes[idx], r
    return DistanceResult(float(value), path, kind, level, True, tuple(history))


def all_distances(domain: DomainSpec, z, w, params: GraphParams | None = None) -> dict:
    """Every metric kind on one common graph (no refinement), keyed by kind."""
    params = params or GraphParams()
    z, w = _check_endpoints(domain, z, w)
    if np.array_equal(z, w):
        return {k: 0.0 for k in MetricKind}
    h = _default_h(domain, z, w, params)
    for _ in range(params.max_regrids + 1):
        g = build_graph(domain, z, w, params, h=h)
        out = {}
        for k in MetricKind:
            found = _shortest_path(g, k)
            if found is None:
                break
            out[k] = found[0]
        else:
            return out
        h /= 2
    raise GraphDisconnected("z and w are not connected")
