"""Graph families, search operators and the edge-list text format."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ._validation import check_positive_int, check_symmetric

__all__ = [
    "Graph",
    "SearchOperator",
    "EdgeListError",
    "complete_graph",
    "joined_complete",
    "simplex_pairing",
    "simplex_complete_operator",
    "hypercube",
    "cubic_lattice",
    "erdos_renyi",
    "paley",
    "latin_square_graph",
    "disjoint_union",
    "laplacian",
    "shifted_adjacency",
    "shift_operator",
    "srg_parameters",
    "load_edgelist",
    "save_edgelist",
]

OPERATOR_KINDS = ("laplacian", "shifted_adjacency", "sc_composite", "custom")


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph without self loops.

    ``edges`` holds ``(i, j, w)`` triples with ``i < j`` and ``w > 0``, sorted by
    ``(i, j)``. Use :meth:`from_edges` to build one from unordered pairs.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        check_positive_int(self.n, "n")
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise ValueError(f"self loop at vertex {i}")
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i}, {j}) out of range or not ordered i < j")
            if not (w > 0 and math.isfinite(w)):
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "Graph":
        """Accept ``(i, j)`` or ``(i, j, w)`` in either orientation."""
        out = []
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if i > j:
                i, j = j, i
            out.append((i, j, w))
        out.sort(key=lambda e: (e[0], e[1]))
        return cls(n, tuple(out))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        if self.edges:
            idx = np.array([(i, j) for i, j, _ in self.edges], dtype=int)
            w = np.array([e[2] for e in self.edges], dtype=float)
            a[idx[:, 0], idx[:, 1]] = w
            a[idx[:, 1], idx[:, 0]] = w
        return a

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def without_edge(self, i: int, j: int) -> "Graph":
        i, j = min(i, j), max(i, j)
        return Graph(self.n, tuple(e for e in self.edges if (e[0], e[1]) != (i, j)))


@dataclass(frozen=True)
class SearchOperator:
    """Real symmetric matrix playing the role of the Laplacian in ``H = gamma*L - |t><t|``.

    ``shift_applied`` is the constant already subtracted from the diagonal.
    """

    matrix: np.ndarray = field(repr=False)
    kind: str = "laplacian"
    shift_applied: float = 0.0

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        m = check_symmetric(self.matrix, "operator matrix").copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


# --------------------------------------------------------------------------- generators


def complete_graph(n: int) -> Graph:
    check_positive_int(n, "n", minimum=2)
    return Graph(n, tuple((i, j, 1.0) for i, j in itertools.combinations(range(n), 2)))


def joined_complete(n: int, a: int = 0, b: int | None = None) -> Graph:
    """Two complete graphs on ``n/2`` vertices joined by the single edge ``(a, b)``.

    Vertices ``0..n/2-1`` form the first half; ``b`` defaults to ``n/2``.
    """
    check_positive_int(n, "n", minimum=4)
    if n % 2:
        raise ValueError(f"joined complete graph needs even n, got {n}")
    h = n // 2
    if b is None:
        b = h
    if not (0 <= a < h and h <= b < n):
        raise ValueError(f"bridge ({a}, {b}) must join the halves [0,{h}) and [{h},{n})")
    edges = [(i, j, 1.0) for i, j in itertools.combinations(range(h), 2)]
    edges += [(i, j, 1.0) for i, j in itertools.combinations(range(h, n), 2)]
    edges.append((a, b, 1.0))
    return Graph.from_edges(n, edges)


def simplex_pairing(R: int) -> list[tuple[int, int]]:
    """Perfect matching between ``R+1`` blocks of ``R`` vertices, one edge per block pair.

    Slot ``r`` of block ``g`` points at block ``r`` (or ``r+1`` once past ``g``); the
    partner slot is chosen the same way from the other side, which makes the map an
    involution without fixed points.
    """
    check_positive_int(R, "R", minimum=2)
    pairs = []
    for g in range(R + 1):
        for r in range(R):
            g2 = r + (r >= g)
            r2 = g - (g > g2)
            i, j = g * R + r, g2 * R + r2
            if i < j:
                pairs.append((i, j))
    return pairs


def simplex_complete_operator(R: int, w: float) -> SearchOperator:
    """Block-diagonal complete-graph Laplacians plus the weighted connecting matrix.

    The connecting part has unit diagonal and ``-w`` on each paired entry, so every
    row sums to ``1 - w``. No ground shift is applied here.
    """
    check_positive_int(R, "R", minimum=2)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError(f"w must be positive, got {w}")
    N = R * (R + 1)
    mat = np.zeros((N, N))
    block = R * np.eye(R) - np.ones((R, R))
    for g in range(R + 1):
        s = slice(g * R, (g + 1) * R)
        mat[s, s] = block
    pairs = simplex_pairing(R)
    if len(pairs) != N // 2:
        raise ValueError("could not build a perfect cross-block pairing")
    for i, j in pairs:
        mat[i, i] += 1.0
        mat[j, j] += 1.0
        mat[i, j] -= w
        mat[j, i] -= w
    return SearchOperator(mat, kind="sc_composite")


def hypercube(nbits: int) -> Graph:
    check_positive_int(nbits, "nbits")
    N = 1 << nbits
    edges = [(i, i | (1 << b), 1.0) for i in range(N) for b in range(nbits) if not i & (1 << b)]
    return Graph.from_edges(N, edges)


def cubic_lattice(d: int, side: int) -> Graph:
    """Periodic ``d``-dimensional lattice with ``side`` (odd, >= 3) sites per axis."""
    check_positive_int(d, "d")
    check_positive_int(side, "side", minimum=3)
    if side % 2 == 0:
        raise ValueError(f"lattice side must be odd, got {side}")
    shape = (side,) * d
    N = side**d
    coords = np.array(np.unravel_index(np.arange(N), shape))
    edges = []
    for axis in range(d):
        nxt = coords.copy()
        nxt[axis] = (nxt[axis] + 1) % side
        j = np.ravel_multi_index(nxt, shape)
        edges.extend(zip(range(N), j.tolist()))
    return Graph.from_edges(N, edges)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """Each pair independently with probability ``p``, drawn from ``numpy.random.default_rng(seed)``."""
    check_positive_int(n, "n", minimum=2)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph(n, tuple((int(i), int(j), 1.0) for i, j in zip(iu[keep], ju[keep])))


def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % f for f in range(2, math.isqrt(q) + 1))


def paley(q: int) -> Graph:
    check_positive_int(q, "q", minimum=5)
    if not _is_prime(q):
        raise ValueError(f"Paley graphs are supported for primes only, got {q}")
    if q % 4 != 1:
        raise ValueError(f"Paley graph needs q = 1 mod 4, got {q}")
    residues = {(x * x) % q for x in range(1, q)}
    edges = [(i, j, 1.0) for i, j in itertools.combinations(range(q), 2) if (j - i) % q in residues]
    return Graph(q, tuple(edges))


def latin_square_graph(t: int, d: int = 3) -> Graph:
    """Cells of a ``t x t`` grid, adjacent when they share a row, column or symbol.

    ``d = 3`` uses the cyclic square ``(i + j) mod t``. Larger ``d`` needs prime
    ``t`` and ``d <= t + 1`` and uses the squares ``(i + c*j) mod t`` for
    ``c = 1..d-2``.
    """
    check_positive_int(t, "t", minimum=2)
    check_positive_int(d, "d", minimum=3)
    if d > 3 and not (_is_prime(t) and d <= t + 1):
        raise ValueError(f"latin square graph with d={d} needs prime t and d <= t+1 (t={t})")
    cells = [(i, j) for i in range(t) for j in range(t)]
    squares = range(1, d - 1)
    edges = []
    for u, v in itertools.combinations(range(t * t), 2):
        (i1, j1), (i2, j2) = cells[u], cells[v]
        if i1 == i2 or j1 == j2 or any((i1 + c * j1) % t == (i2 + c * j2) % t for c in squares):
            edges.append((u, v, 1.0))
    return Graph(t * t, tuple(edges))


def disjoint_union(gs: Sequence[Graph]) -> Graph:
    if not gs:
        raise ValueError("disjoint_union needs at least one graph")
    edges = []
    offset = 0
    for g in gs:
        edges.extend((i + offset, j + offset, w) for i, j, w in g.edges)
        offset += g.n
    return Graph(offset, tuple(edges))


def srg_parameters(g: Graph) -> tuple[int, int, int, int] | None:
    """Brute-force ``(N, k, lambda, mu)`` by scanning common neighbours of every pair.

    Returns None when the graph is not strongly regular (or is complete/empty,
    where one of the pair classes is missing).
    """
    a = (g.adjacency() > 0).astype(np.int64)
    deg = a.sum(axis=1)
    if np.any(deg != deg[0]):
        return None
    common = a @ a
    iu = np.triu_indices(g.n, 1)
    adj = a[iu] == 1
    if adj.all() or not adj.any():
        return None
    lam = np.unique(common[iu][adj])
    mu = np.unique(common[iu][~adj])
    if lam.size != 1 or mu.size != 1:
        return None
    return g.n, int(deg[0]), int(lam[0]), int(mu[0])


# --------------------------------------------------------------------------- operators


def laplacian(g: Graph) -> SearchOperator:
    a = g.adjacency()
    return SearchOperator(np.diag(a.sum(axis=1)) - a, kind="laplacian")


def shifted_adjacency(g: Graph) -> SearchOperator:
    """``a0*I - A`` with ``a0`` the largest adjacency eigenvalue (least eigenvalue 0)."""
    from .spectral import eig_sym

    a = g.adjacency()
    a0 = float(eig_sym(a).eigenvalues[-1])
    return SearchOperator(a0 * np.eye(g.n) - a, kind="shifted_adjacency", shift_applied=-a0)


def shift_operator(op: SearchOperator, c: float) -> SearchOperator:
    """Subtract ``c`` from the diagonal, accumulating it in ``shift_applied``."""
    return SearchOperator(
        op.matrix - c * np.eye(op.n), kind=op.kind, shift_applied=op.shift_applied + c
    )


# --------------------------------------------------------------------------- edge lists


class EdgeListError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def load_edgelist(text: str) -> Graph:
    """Parse ``N <count>`` followed by ``i j w`` lines (0-based; ``#`` starts a comment)."""
    n = None
    edges = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "N":
                raise EdgeListError("expected header 'N <count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise EdgeListError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 1:
                raise EdgeListError("vertex count must be positive", lineno)
            continue
        if len(parts) not in (2, 3):
            raise EdgeListError("expected 'i j w'", lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise EdgeListError(f"cannot parse {line!r}", lineno) from None
        if i == j:
            raise EdgeListError(f"self loop ({i}, {j})", lineno)
        if not (0 <= i < n and 0 <= j < n):
            raise EdgeListError(f"pair ({i}, {j}) out of range for N={n}", lineno)
        if not (w > 0 and math.isfinite(w)):
            raise EdgeListError(f"pair ({i}, {j}) has non-positive weight {w}", lineno)
        key = (min(i, j), max(i, j))
        if key in edges:
            raise EdgeListError(f"duplicate pair {key}", lineno)
        edges[key] = w
    if n is None:
        raise EdgeListError("missing 'N <count>' header")
    return Graph.from_edges(n, [(i, j, w) for (i, j), w in edges.items()])


def save_edgelist(g: Graph) -> str:
    lines = [f"N {g.n}"]
    lines += [f"{i} {j} {w!r}" for i, j, w in g.edges]
    return "\n".join(lines) + "\n"
