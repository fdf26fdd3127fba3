"""Fusion matrices of SU(3) and SU(2) module categories.

Weights are written with *shifted* labels throughout: ``{p, q}`` stands for
the Dynkin label ``(p - 1, q - 1)``, so ``F{1,1}`` is the identity and the
walls of the Weyl chamber sit at ``p = 0``, ``q = 0`` (mod N).  Inside the
alcove the matrices come from the usual tensor-product recursion; outside,
they are obtained by signed reflections and by the rotation-twisted
periodicity ``F{p+N,q} = P F{p,q}``, ``F{p,q+N} = P^2 F{p,q}``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import InternalConsistency, NotShipped, UngradedModule
from .matfmt import load_data_matrix, parse_matrix

SU2 = "SU2"
SU3 = "SU3"

# conformal level of every SU(3) module shipped with the package
SU3_LEVELS = {
    "A0": 0, "A1": 1, "A2": 2, "A3": 3, "A4": 4, "A5": 5, "A6": 6,
    "D3": 3, "D6": 6, "E5": 5, "E9": 9, "E21": 21,
}
# modules whose fundamental matrix is read from the shipped fixtures;
# the remaining A_k are generated from the alcove
_SHIPPED = ("A1", "A2", "A3", "A4", "A5", "D3", "D6", "E5", "E9", "E21")

_INT_LIMIT = 2**31


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def su3_alcove_weights(k: int) -> list[tuple[int, int]]:
    """Dynkin labels ``(p, q)`` with ``p + q <= k`` in the shipped vertex order.

    ``(p1, q1) < (p2, q2)`` when ``p1 + q1 < p2 + q2``, or when the sums are
    equal and ``q1 < q2``.
    """
    return [(t - q, q) for t in range(k + 1) for q in range(t + 1)]


def su3_alcove_fundamental(k: int) -> np.ndarray:
    """``F(1,0)`` of the fusion category A_k(SU3) itself.

    Tensoring with the fundamental irrep adds one of the weights
    ``(1,0), (-1,1), (0,-1)``; results leaving the alcove are dropped.
    """
    weights = su3_alcove_weights(k)
    index = {w: i for i, w in enumerate(weights)}
    F = np.zeros((len(weights), len(weights)), dtype=np.int64)
    for (p, q), i in index.items():
        for dp, dq in ((1, 0), (-1, 1), (0, -1)):
            j = index.get((p + dp, q + dq))
            if j is not None:
                F[i, j] += 1
    return F


def ade_adjacency(name: str) -> np.ndarray:
    """Adjacency matrix of a simply-laced Dynkin diagram (A_n, D_n, E6, E7, E8)."""
    kind, n = name[0].upper(), int(name[1:])
    edges = []
    if kind == "A" and n >= 1:
        edges = [(i, i + 1) for i in range(n - 1)]
    elif kind == "D" and n >= 4:
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    elif kind == "E" and n in (6, 7, 8):
        # chain 0 - 1 - ... - (n-2), branch node n-1 attached to node 2
        edges = [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]
    else:
        raise ValueError(f"not a simply-laced Dynkin diagram: {name!r}")
    adj = np.zeros((n, n), dtype=np.int64)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return adj


def ade_coxeter_number(name: str) -> int:
    kind, n = name[0].upper(), int(name[1:])
    if kind == "A":
        return n + 1
    if kind == "D":
        return 2 * n - 2
    return {6: 12, 7: 18, 8: 30}[n]


def grading(adjacency: np.ndarray, modulus: int) -> tuple[int, ...]:
    """Grade the vertices of a quiver so that every arrow raises the grade by one.

    Breadth-first from vertex 0, walking arrows both forwards and backwards.
    Raises UngradedModule when the graph is disconnected or some arrow
    contradicts the propagated grading.
    """
    n = adjacency.shape[0]
    grade: list[Optional[int]] = [None] * n
    grade[0] = 0
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for b in range(n):
            for nb, step in ((b, 1), (b, -1)):
                linked = adjacency[a, nb] if step == 1 else adjacency[nb, a]
                if linked and grade[nb] is None:
                    grade[nb] = (grade[a] + step) % modulus
                    queue.append(nb)
    if any(g is None for g in grade):
        raise UngradedModule("fusion graph is not connected")
    for a in range(n):
        for b in range(n):
            if adjacency[a, b] and grade[b] != (grade[a] + 1) % modulus:
                raise UngradedModule(
                    f"arrow {a}->{b} breaks the Z{modulus} grading; trivially graded modules are not supported"
                )
    return tuple(grade)


@dataclass(frozen=True)
class FusionSystem:
    """Combinatorial data of one module category."""

    name: str
    group: str
    level: int
    fundamental: np.ndarray = field(repr=False, compare=False)
    triality: Optional[tuple[int, ...]] = field(default=None, repr=False)
    parity: Optional[tuple[int, ...]] = field(default=None, repr=False)

    @property
    def coxeter(self) -> int:
        return 3 if self.group == SU3 else 2

    @property
    def N(self) -> int:
        return self.level + self.coxeter

    @property
    def rank(self) -> int:
        return int(self.fundamental.shape[0])

    @property
    def eta(self) -> int:
        return 1 if self.group == SU3 else 2

    @property
    def weyl_order(self) -> int:
        return 6 if self.group == SU3 else 2

    @property
    def lattice_rank(self) -> int:
        # |W| / |Z| = 2 for SU(3), 1 for SU(2)
        return 2 * self.rank if self.group == SU3 else self.rank

    @property
    def restricted_count(self) -> int:
        """Number of restricted hyper-roots ``|R^v|``."""
        if self.group == SU3:
            return self.rank * self.N**2 // 3
        return self.rank * self.N

    @property
    def root_count(self) -> int:
        """``|R|``: restricted hyper-roots together with their opposites for SU(3)."""
        return 2 * self.restricted_count if self.group == SU3 else self.restricted_count

    def summary(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "k": self.level,
            "N": self.N,
            "r_E": self.rank,
            "lattice_rank": self.lattice_rank,
            "R_restricted": self.restricted_count,
            "R": self.root_count,
        }


def make_su3_system(name: str, level: int, fundamental) -> FusionSystem:
    F = _frozen(fundamental)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise ValueError("fundamental fusion matrix must be square")
    if (F < 0).any():
        raise ValueError("fundamental fusion matrix must be non-negative")
    return FusionSystem(name, SU3, level, F, triality=grading(F, 3))


def make_su2_system(name: str, adjacency, level: Optional[int] = None) -> FusionSystem:
    F = _frozen(adjacency)
    if not (F == F.T).all():
        raise ValueError("SU(2) fusion graphs are unoriented: adjacency must be symmetric")
    if level is None:
        level = ade_coxeter_number(name) - 2
    return FusionSystem(name, SU2, level, F, parity=grading(F, 2))


def su3_names() -> list[str]:
    return list(SU3_LEVELS)


@lru_cache(maxsize=None)
def load_fusion_system(name: str, group: str = SU3) -> FusionSystem:
    """Return a shipped module category by name.

    SU(3) names follow the level subscript (``A2``, ``D3``, ``E21``...).
    SU(2) names are Dynkin diagrams (``A4``, ``D5``, ``E6``...).  A name may
    also be qualified as ``"SU2:E6"``.
    """
    if ":" in name:
        group, name = name.split(":", 1)
    group = group.upper()
    if group == SU2:
        try:
            return make_su2_system(name, ade_adjacency(name))
        except (ValueError, IndexError):
            raise NotShipped(name, ["A<n>", "D<n>", "E6", "E7", "E8"]) from None
    if group != SU3 or name not in SU3_LEVELS:
        raise NotShipped(name, su3_names())
    k = SU3_LEVELS[name]
    F = load_data_matrix("fusion", name) if name in _SHIPPED else su3_alcove_fundamental(k)
    return make_su3_system(name, k, F)


def load_fusion_system_file(path, name: str, level: int) -> FusionSystem:
    """Build an SU(3) system from a plain-text ``F(1,0)`` file."""
    with open(path) as fh:
        return make_su3_system(name, level, parse_matrix(fh.read()))


class FusionTable:
    """Extended, signed, periodic family ``F{p,q}`` of an SU(3) module.

    Only the alcove (``p, q >= 1``, ``p + q <= N - 1``) is stored; every
    other label is resolved on demand by :meth:`lookup`.
    """

    def __init__(self, system: FusionSystem, alcove: dict):
        self.system = system
        self.N = system.N
        self.alcove = alcove
        r = system.rank
        self.zero = _frozen(np.zeros((r, r), dtype=np.int64))
        self.P = alcove[(self.N - 2, 1)]
        identity = np.eye(r, dtype=np.int64)
        P2 = self.P @ self.P
        if not np.array_equal(P2 @ self.P, identity):
            raise InternalConsistency("rotation P = F{N-2,1} does not satisfy P^3 = 1")
        self.rotations = (_frozen(identity), self.P, _frozen(P2))
        # vertex permutation b -> sigma(b) with P[b, sigma(b)] = 1
        perm = np.argmax(self.P, axis=1)
        if not np.array_equal(self.P, identity[perm]):
            raise InternalConsistency("rotation P is not a permutation matrix")
        self.sigma = tuple(int(x) for x in perm)
        self._cache: dict = {}

    def __repr__(self):
        return f"FusionTable({self.system.name}, N={self.N}, alcove={len(self.alcove)})"

    def lookup(self, p: int, q: int) -> np.ndarray:
        key = (p, q)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._resolve(p, q)
        return hit

    __call__ = lookup

    def _resolve(self, p: int, q: int) -> np.ndarray:
        N = self.N
        r1, p0 = divmod(p, N)
        r2, q0 = divmod(q, N)
        if p0 == 0 or q0 == 0 or p0 + q0 == N:
            return self.zero
        if p0 + q0 > N:
            base = -self.alcove[(N - q0, N - p0)]
        else:
            base = self.alcove[(p0, q0)]
        turn = (r1 + 2 * r2) % 3
        if turn:
            base = self.rotations[turn] @ base
        return _frozen(base)

    def canonical_point(self, m1: int, m2: int, vertex: int) -> tuple[int, int, int]:
        """Bring a (position, vertex) pair back to the period rhombus.

        Moving a point by ``N`` along the first (second) weight direction
        acts on the vertex by ``sigma^-1`` (``sigma^-2``); the pairing with
        any other point is unchanged.
        """
        N = self.N
        r1, p0 = divmod(m1, N)
        r2, q0 = divmod(m2, N)
        for _ in range(2 * (r1 + 2 * r2) % 3):
            vertex = self.sigma[vertex]
        return p0, q0, vertex


def _alcove_dynkin(system: FusionSystem) -> dict:
    """All ``F(p,q)`` with ``p + q <= k`` from the tensor-product recursion (Dynkin labels)."""
    k = system.level
    F10 = system.fundamental
    r = system.rank
    zero = np.zeros((r, r), dtype=np.int64)
    F = {(0, 0): np.eye(r, dtype=np.int64)}

    def get(p, q):
        if p < 0 or q < 0:  # Weyl wall in shifted labels: vanishes
            return zero
        return F[(p, q)]

    for t in range(1, k + 1):
        for p in range(t, 0, -1):
            q = t - p
            if q:
                M = F10 @ get(p - 1, q) - get(p - 1, q - 1) - get(p - 2, q + 1)
            else:
                M = F10 @ get(p - 1, 0) - get(p - 2, 1)
            F[(p, q)] = M
        F[(0, t)] = F[(t, 0)].T.copy()
        # transpose symmetry F(q,p) = F(p,q)^T is a second, independent route
        for p in range(1, t):
            q = t - p
            if not np.array_equal(F[(q, p)], F[(p, q)].T):
                raise InternalConsistency(f"F({q},{p}) differs from F({p},{q})^T")
    for key, M in F.items():
        if (M < 0).any():
            raise InternalConsistency(f"alcove matrix F{key} has a negative entry")
        if np.abs(M).max(initial=0) >= _INT_LIMIT:
            raise OverflowError(f"fusion coefficient overflow at F{key}")
    return F


def build_alcove(system: FusionSystem) -> FusionTable:
    if system.group != SU3:
        raise ValueError("build_alcove handles SU(3) systems; use build_alcove_su2")
    dyn = _alcove_dynkin(system)
    alcove = {(p + 1, q + 1): _frozen(M) for (p, q), M in dyn.items()}
    return FusionTable(system, alcove)


def lookup_extended(table: FusionTable, p: int, q: int) -> np.ndarray:
    """``F{p,q}`` for arbitrary integer shifted labels."""
    return table.lookup(p, q)


class FusionTableSU2:
    """Chebyshev family ``F{n}`` of an SU(2) module, extended with period 2N."""

    def __init__(self, system: FusionSystem, alcove: dict):
        self.system = system
        self.N = system.N
        self.alcove = alcove
        r = system.rank
        self.zero = _frozen(np.zeros((r, r), dtype=np.int64))

    def __repr__(self):
        return f"FusionTableSU2({self.system.name}, N={self.N})"

    def lookup(self, n: int) -> np.ndarray:
        N = self.N
        n0 = n % (2 * N)
        if n0 % N == 0:
            return self.zero
        if n0 < N:
            return self.alcove[n0]
        return _frozen(-self.alcove[2 * N - n0])

    __call__ = lookup


def build_alcove_su2(system: FusionSystem) -> FusionTableSU2:
    if system.group != SU2:
        raise ValueError("build_alcove_su2 handles SU(2) systems")
    r = system.rank
    N = system.N
    F = {0: np.zeros((r, r), dtype=np.int64), 1: np.eye(r, dtype=np.int64)}
    for n in range(2, N):
        F[n] = F[n - 1] @ system.fundamental - F[n - 2]
    # the recursion must close: F{N} (one step past the alcove) vanishes
    closing = F[N - 1] @ system.fundamental - F[N - 2]
    if closing.any():
        raise InternalConsistency(f"{system.name}: Chebyshev recursion does not close at N={N}")
    return FusionTableSU2(system, {n: _frozen(M) for n, M in F.items() if n >= 1})
