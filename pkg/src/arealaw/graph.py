"""Finite graphs, hop distances, boundaries and the decay constant C_mu."""

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from .errors import GraphError

MAX_VERTICES = 4096
FAMILIES = ("path", "box", "bethe", "custom")

# site keys for lattice families: coordinate c_i in [-2**20, 2**20) packed in 21-bit fields
_KEY_OFFSET = 1 << 20
_KEY_BITS = 21


@dataclass(frozen=True, eq=False)
class Graph:
    """Connected finite graph with precomputed all-pairs hop distances.

    ``site_keys`` label each vertex by its identity in the ambient infinite
    graph (lattice coordinate for paths/boxes, level-order index for trees),
    so that nested volumes share disorder at shared sites.
    """

    n_vertices: int
    edges: np.ndarray
    dist: np.ndarray
    family: str
    coords: Optional[np.ndarray] = None
    site_keys: Optional[np.ndarray] = None
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.site_keys is None:
            object.__setattr__(self, "site_keys", np.arange(self.n_vertices, dtype=np.int64))
        for arr in (self.edges, self.dist, self.coords, self.site_keys):
            if arr is not None:
                arr.setflags(write=False)

    @property
    def degrees(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        if len(self.edges):
            np.add.at(deg, self.edges[:, 0], 1)
            np.add.at(deg, self.edges[:, 1], 1)
        return deg

    @property
    def max_degree(self):
        return int(self.degrees.max()) if self.n_vertices else 0

    def adjacency(self):
        """Dense symmetric 0/1 adjacency matrix (float)."""
        a = np.zeros((self.n_vertices, self.n_vertices))
        if len(self.edges):
            a[self.edges[:, 0], self.edges[:, 1]] = 1.0
            a[self.edges[:, 1], self.edges[:, 0]] = 1.0
        return a

    def laplacian(self):
        a = self.adjacency()
        return np.diag(a.sum(axis=1)) - a

    def center(self):
        """Vertex of minimal eccentricity; lowest index on ties."""
        return int(np.argmin(self.dist.max(axis=1)))

    def __repr__(self):
        return f"Graph(family={self.family!r}, n_vertices={self.n_vertices}, n_edges={len(self.edges)})"


@dataclass(frozen=True)
class Region:
    members: tuple
    parent_size: int

    def __post_init__(self):
        members = tuple(sorted({int(x) for x in self.members}))
        if members and (members[0] < 0 or members[-1] >= self.parent_size):
            raise ValueError(f"region members must lie in 0..{self.parent_size - 1}")
        object.__setattr__(self, "members", members)

    @property
    def mask(self):
        m = np.zeros(self.parent_size, dtype=bool)
        m[list(self.members)] = True
        return m

    @property
    def index(self):
        return np.array(self.members, dtype=np.int64)

    def complement(self):
        return Region(tuple(np.flatnonzero(~self.mask)), self.parent_size)

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return int(x) in self.members


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _csr(n, edges):
    """CSR neighbour lists (indptr, indices) of an undirected edge array."""
    if len(edges) == 0:
        return np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    return np.cumsum(indptr), dst.astype(np.int64)


def _normalize_edges(n, edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) and (edges.min() < 0 or edges.max() >= n):
        raise GraphError(f"edge endpoint outside 0..{n - 1}")
    if np.any(edges[:, 0] == edges[:, 1]):
        raise GraphError("self-loops are not allowed")
    edges = np.sort(edges, axis=1)
    if len(np.unique(edges, axis=0)) != len(edges):
        raise GraphError("duplicate edges are not allowed")
    return edges[np.lexsort((edges[:, 1], edges[:, 0]))]


def _finish(n, edges, family, cap, coords=None, site_keys=None, params=None):
    if n < 1:
        raise GraphError("graph needs at least one vertex")
    if n > cap:
        raise GraphError(f"{n} vertices exceeds the cap of {cap}")
    edges = _normalize_edges(n, edges)
    indptr, indices = _csr(n, edges)
    dist = _kernels.bfs_all_pairs(indptr, indices, n)
    if np.any(dist < 0):
        raise GraphError("graph is not connected")
    return Graph(n, edges, dist, family, coords, site_keys, dict(params or {}))


def _lattice_keys(coords):
    keys = np.zeros(len(coords), dtype=np.int64)
    for i in range(coords.shape[1]):
        keys |= (coords[:, i] + _KEY_OFFSET) << (_KEY_BITS * i)
    return keys


def path(n, cap=MAX_VERTICES):
    """Line graph 0 - 1 - ... - (n-1); coordinates centred on vertex (n-1)//2."""
    return box(1, n, cap=cap, family="path")


def box(dimension, side, cap=MAX_VERTICES, family="box"):
    """Nearest-neighbour box of ``side**dimension`` sites, row-major indexing."""
    if dimension < 1 or side < 1:
        raise GraphError("box dimension and side must be positive")
    if dimension > 3:
        raise GraphError("box dimension is limited to 3")
    n = side**dimension
    if n > cap:
        raise GraphError(f"{n} vertices exceeds the cap of {cap}")
    grid = np.array(list(product(range(side), repeat=dimension)), dtype=np.int64).reshape(n, dimension)
    strides = side ** np.arange(dimension - 1, -1, -1)
    edges = []
    for axis in range(dimension):
        has_next = grid[:, axis] < side - 1
        u = np.flatnonzero(has_next)
        edges.append(np.stack([u, u + strides[axis]], axis=1))
    edges = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    coords = grid - (side - 1) // 2
    params = {"dimension": dimension, "side": side}
    return _finish(n, edges, family, cap, coords, _lattice_keys(coords), params)


def bethe(branching, depth, regular_root=False, cap=MAX_VERTICES):
    """Finite rooted tree in level order.

    Every non-leaf vertex has ``branching`` children; with ``regular_root`` the
    root gets ``branching + 1`` so that all interior vertices share degree
    ``branching + 1``.
    """
    if branching < 1 or depth < 0:
        raise GraphError("bethe tree needs branching >= 1 and depth >= 0")
    root_children = branching + 1 if regular_root else branching
    n = 1
    level = root_children if depth >= 1 else 0
    for _ in range(depth):
        n += level
        level *= branching
        if n > cap:
            raise GraphError(f"bethe tree exceeds the cap of {cap} vertices")
    edges = []
    nxt = 1
    parents = [0]
    for d in range(depth):
        children_each = root_children if d == 0 else branching
        new_parents = []
        for p in parents:
            for _ in range(children_each):
                edges.append((p, nxt))
                new_parents.append(nxt)
                nxt += 1
        parents = new_parents
    params = {"branching": branching, "depth": depth, "regular_root": bool(regular_root)}
    return _finish(n, np.array(edges, dtype=np.int64).reshape(-1, 2), "bethe", cap, params=params)


def from_edges(edges, n_vertices=None, cap=MAX_VERTICES):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if n_vertices is None:
        n_vertices = int(edges.max()) + 1 if len(edges) else 1
    return _finish(int(n_vertices), edges, "custom", cap)


def load_edge_list(path, cap=MAX_VERTICES):
    """Read ``u v`` pairs (0-based), one per line; ``#`` starts a comment."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise GraphError(f"{path}:{lineno}: non-integer vertex in {line!r}") from None
    if not pairs:
        raise GraphError(f"{path}: no edges")
    return from_edges(pairs, cap=cap)


def build_graph(spec, cap=MAX_VERTICES):
    """Build a graph from a mapping ``{"family": ..., <size parameters>}``.

    ``path``: ``n``; ``box``: ``dimension``, ``side``; ``bethe``: ``branching``,
    ``depth`` and optional ``regular_root``; ``custom``: ``edges`` (pairs) or
    ``edge_file``.
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    try:
        if family == "path":
            return path(int(spec["n"]), cap=cap)
        if family == "box":
            return box(int(spec["dimension"]), int(spec["side"]), cap=cap)
        if family == "bethe":
            return bethe(int(spec["branching"]), int(spec["depth"]), bool(spec.get("regular_root", False)), cap=cap)
        if family == "custom":
            if "edge_file" in spec:
                return load_edge_list(spec["edge_file"], cap=cap)
            return from_edges(spec["edges"], spec.get("n_vertices"), cap=cap)
    except KeyError as exc:
        raise GraphError(f"missing size parameter {exc} for family {family!r}") from None
    raise GraphError(f"unknown graph family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------------------
# regions and geometric constants
# ---------------------------------------------------------------------------


def region(g: Graph, members: Sequence[int]) -> Region:
    return Region(tuple(members), g.n_vertices)


def centered_region(g: Graph, radius: int, center: Optional[int] = None) -> Region:
    """Box of half-width ``radius`` around the centre for lattices, hop-distance ball otherwise."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    c = g.center() if center is None else int(center)
    if g.coords is not None:
        off = np.abs(g.coords - g.coords[c]).max(axis=1)
        members = np.flatnonzero(off <= radius)
    else:
        members = np.flatnonzero(g.dist[c] <= radius)
    return Region(tuple(members), g.n_vertices)


def boundary(g: Graph, inner: Region) -> Region:
    """Sites of ``inner`` with at least one neighbour outside ``inner``."""
    mask = inner.mask
    e = g.edges
    if len(e) == 0:
        return Region((), g.n_vertices)
    cut = mask[e[:, 0]] != mask[e[:, 1]]
    ends = e[cut].ravel()
    return Region(tuple(ends[mask[ends]]), g.n_vertices)


def c_mu(g: Graph, mu: float) -> float:
    """sup_x sum_y exp(-mu d(x, y)) over the finite vertex set."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    return float(np.exp(-mu * g.dist).sum(axis=1).max())


def boundary_sum(g: Graph, inner: Region, mu: float) -> float:
    """sum over x in inner, y outside inner of exp(-mu d(x, y)); 0 if inner is everything."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    mask = inner.mask
    if mask.all() or not mask.any():
        return 0.0
    return _kernels.cross_abs_sum(np.exp(-mu * g.dist), mask)
