"""Hyper-roots as points of the ribbon and the Gram matrices of their pairing.

A ribbon point is a pair (weight position, graph vertex).  Positions are
shifted labels in the period rhombus ``[0, N)^2``; the point is admissible
when ``triality(vertex) = m1 + 2 m2 (mod 3)``.  For SU(2) the position is a
single integer in ``[0, 2N)`` and admissibility is a parity condition.

The pairing of ``alpha = (m, a)`` with ``beta = (n, b)`` is the ``(a, b)``
entry of a signed sum of fusion matrices taken at ``lambda = n - m``, i.e. the
field of a hyper-root is the essential matrix of its vertex translated to its
position.
"""
from __future__ import annotations

import functools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import lattice
from .errors import BasisDegenerate, NotInLattice
from .fusion import FusionTable, FusionTableSU2
from .matfmt import format_matrix

# the six Weyl images entering the SU(3) pairing: (shift of lambda, sign)
WEYL_TERMS = (
    ((1, 1), 1), ((-2, 1), 1), ((1, -2), 1),
    ((-1, -1), -1), ((-1, 2), -1), ((2, -1), -1),
)
# weights of the fundamental irrep, shifted coordinates
FUNDAMENTAL_WEIGHTS = ((1, 0), (-1, 1), (0, -1))

BASIS_POSITIONS = {
    "B1": lambda N: [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (0, 2)],
    "B2": lambda N: [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (1, 3)],
    "B3": lambda N: [(0, 0), (1, 0), (0, 1), (N - 1, N - 2), (N - 2, N - 1), (N - 1, N - 1)],
}
LEVEL_ZERO_POSITIONS = [(1, 1), (2, 2)]


class RibbonPoint(NamedTuple):
    m1: int
    m2: int
    vertex: int

    @property
    def position(self):
        return (self.m1, self.m2)


class LinePoint(NamedTuple):
    """Ribbon point of an SU(2) module: position ``n`` and vertex."""

    n: int
    vertex: int


Point = Union[RibbonPoint, LinePoint]


def is_admissible(table, point) -> bool:
    if isinstance(table, FusionTableSU2):
        return table.system.parity[point.vertex] == point.n % 2
    return table.system.triality[point.vertex] == (point.m1 + 2 * point.m2) % 3


def enumerate_ribbon(table) -> list:
    """All admissible points of one period, lexicographic in (position, vertex)."""
    r = table.system.rank
    N = table.N
    if isinstance(table, FusionTableSU2):
        pts = [LinePoint(n, v) for n in range(2 * N) for v in range(r)]
    else:
        pts = [RibbonPoint(m1, m2, v) for m1 in range(N) for m2 in range(N) for v in range(r)]
    return [p for p in pts if is_admissible(table, p)]


class _Weyl:
    """Cache of the signed six-term matrices ``W(lambda)`` of a table."""

    def __init__(self, table: FusionTable):
        self.table = table
        self.cache: dict = {}

    def __call__(self, l1: int, l2: int) -> np.ndarray:
        key = (l1, l2)
        W = self.cache.get(key)
        if W is None:
            F = self.table.lookup
            W = sum(s * F(l1 + d1, l2 + d2) for (d1, d2), s in WEYL_TERMS)
            W.setflags(write=False)
            self.cache[key] = W
        return W

    def window(self) -> np.ndarray:
        """``W`` for all differences of rhombus positions, offset by ``N - 1``."""
        N = self.table.N
        r = self.table.system.rank
        out = np.empty((2 * N - 1, 2 * N - 1, r, r), dtype=np.int64)
        for i in range(2 * N - 1):
            for j in range(2 * N - 1):
                out[i, j] = self(i - N + 1, j - N + 1)
        return out


def _weyl(table: FusionTable) -> _Weyl:
    w = getattr(table, "_weyl", None)
    if w is None:
        w = table._weyl = _Weyl(table)
    return w


def su2_inner_product(table: FusionTableSU2, alpha: LinePoint, beta: LinePoint,
                      sa: int = 1, sb: int = 1) -> int:
    l = beta.n - alpha.n
    M = table.lookup(l + 1) - table.lookup(l - 1)
    return sa * sb * int(M[alpha.vertex, beta.vertex])


def inner_product(table, alpha: Point, beta: Point, sa: int = 1, sb: int = 1) -> int:
    """Pairing of two (signed) hyper-roots."""
    if isinstance(table, FusionTableSU2):
        return su2_inner_product(table, alpha, beta, sa, sb)
    W = _weyl(table)(beta.m1 - alpha.m1, beta.m2 - alpha.m2)
    return sa * sb * int(W[alpha.vertex, beta.vertex])


def pairing_matrix(table, rows: Sequence[Point], cols: Sequence[Point]) -> np.ndarray:
    """Inner products of every point of ``rows`` with every point of ``cols``."""
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for i, a in enumerate(rows):
        for j, b in enumerate(cols):
            out[i, j] = inner_product(table, a, b)
    return out


def all_pairs_table(table, points: Optional[Sequence[Point]] = None) -> np.ndarray:
    """The full ``|R^v| x |R^v|`` table of inner products."""
    if points is None:
        points = enumerate_ribbon(table)
    if isinstance(table, FusionTableSU2):
        return pairing_matrix(table, points, points)
    N = table.N
    window = _weyl(table).window()
    m1 = np.array([p.m1 for p in points])
    m2 = np.array([p.m2 for p in points])
    v = np.array([p.vertex for p in points])
    if (m1 < 0).any() or (m1 >= N).any() or (m2 < 0).any() or (m2 >= N).any():
        return pairing_matrix(table, points, points)
    d1 = m1[None, :] - m1[:, None] + N - 1
    d2 = m2[None, :] - m2[:, None] + N - 1
    return window[d1, d2, v[:, None], v[None, :]]


# -- bases and Gram matrices ---------------------------------------------------


@dataclass(frozen=True)
class OrderedBasis:
    label: str
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]


@dataclass
class GramMatrix:
    entries: np.ndarray
    basis: OrderedBasis
    _inverse: Optional[list] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def rows(self) -> list[list[int]]:
        return lattice.as_int_rows(self.entries)

    def inverse(self) -> list[list[Fraction]]:
        if self._inverse is None:
            self._inverse = lattice.inverse(self.rows())
        return self._inverse

    def norm(self, x) -> int:
        x = np.asarray(x, dtype=object)
        return int(x @ self.entries.astype(object) @ x)

    def to_json(self, name: str = "") -> dict:
        return {
            "name": name,
            "basis": self.basis.label,
            "points": [list(p) for p in self.basis],
            "gram": self.rows(),
        }

    def to_text(self, name: str = "") -> str:
        header = [f"{name} Gram matrix, basis {self.basis.label}".strip()]
        header.append("points: " + " ".join("{%s}" % ",".join(map(str, p)) for p in self.basis))
        return format_matrix(self.rows(), header)


def basis_positions(label: str, N: int, level: int):
    if level == 0:
        return LEVEL_ZERO_POSITIONS
    try:
        return BASIS_POSITIONS[label](N)
    except KeyError:
        raise ValueError(f"unknown basis label {label!r}; expected B1, B2 or B3") from None


def select_basis(table, label: str = "B1") -> OrderedBasis:
    """The hyper-roots sitting at the six positions of ``label``.

    Positions follow the listed order; at each position the admissible
    vertices follow the vertex order of the fusion matrix.  SU(2) modules use
    the positions 0 and 1, where every vertex is admissible exactly once.
    """
    system = table.system
    r = system.rank
    if isinstance(table, FusionTableSU2):
        pts = [LinePoint(n, v) for n in (0, 1) for v in range(r)]
    else:
        pts = [RibbonPoint(m1, m2, v)
               for (m1, m2) in basis_positions(label, table.N, system.level) for v in range(r)]
    elements = tuple(p for p in pts if is_admissible(table, p))
    if len(elements) != system.lattice_rank:
        raise BasisDegenerate(f"{label} has {len(elements)} points, expected {system.lattice_rank}")
    basis = OrderedBasis(label if system.level or system.group == "SU2" else "B0", elements)
    if lattice.determinant(pairing_matrix(table, elements, elements)) == 0:
        raise BasisDegenerate(f"{label} Gram matrix of {system.name} is singular")
    return basis


def gram_matrix(table, basis: OrderedBasis) -> GramMatrix:
    G = pairing_matrix(table, basis.elements, basis.elements)
    if not (G == G.T).all():
        raise ArithmeticError("inner product table is not symmetric")
    return GramMatrix(G, basis)


def express_in_basis(gram: GramMatrix, table, point: Point, sign: int = 1) -> list[int]:
    """Integer coordinates of a hyper-root in the basis of ``gram``."""
    v = [inner_product(table, b, point, 1, sign) for b in gram.basis]
    inv = gram.inverse()
    x = [sum((a * y for a, y in zip(row, v)), Fraction(0)) for row in inv]
    if any(c.denominator != 1 for c in x):
        raise NotInLattice(f"{point} has non-integral coordinates {x}")
    return [int(c) for c in x]


def express_all(gram: GramMatrix, table, points: Sequence[Point]) -> np.ndarray:
    """Coordinates of many points at once (rows), checked to be integral."""
    A = gram.rows()
    n = len(A)
    det = lattice.determinant(A)
    adj = [[int(det * x) for x in row] for row in gram.inverse()]
    V = pairing_matrix(table, gram.basis.elements, points).astype(object)
    X = np.array(adj, dtype=object) @ V
    bad = [j for j in range(X.shape[1]) if any(X[i, j] % det for i in range(n))]
    if bad:
        raise NotInLattice(f"{points[bad[0]]} is not in the lattice spanned by the basis")
    return (X // det).T.astype(np.int64)


def certified_rank(table, points: Sequence[Point], basis: OrderedBasis,
                   full: Optional[np.ndarray] = None) -> int:
    """Exact rank of the all-pairs table, certified through a basis.

    The basis block is nonsingular, so the rank is at least ``len(basis)``;
    it equals it exactly when every row is the combination of basis rows
    predicted by the basis coordinates.
    """
    if full is None:
        full = all_pairs_table(table, points)
    gram = gram_matrix(table, basis)
    try:
        X = express_all(gram, table, points)
    except NotInLattice:
        return lattice.rank(full)
    idx = {p: i for i, p in enumerate(points)}
    if any(p not in idx for p in basis):
        return lattice.rank(full)
    C = full[:, [idx[p] for p in basis]]
    if np.array_equal(C @ X.T, full):
        return len(basis)
    return lattice.rank(full)


# -- fields on the ribbon -------------------------------------------------------


def root_field(table, alpha: Point, sign: int = 1) -> dict:
    """Inner products of ``alpha`` with every point of the ribbon."""
    return {beta: inner_product(table, alpha, beta, sign, 1) for beta in enumerate_ribbon(table)}


def essential_matrix(table: FusionTable, a: int) -> dict:
    """``tau_a(n, b) = (F_n)_{ab}`` over the period rhombus, every vertex b."""
    N, r = table.N, table.system.rank
    return {
        RibbonPoint(m1, m2, b): int(table.lookup(m1, m2)[a, b])
        for m1 in range(N) for m2 in range(N) for b in range(r)
    }


def field_value(table: FusionTable, f: Mapping, m1: int, m2: int, b: int) -> int:
    """Value of a ribbon field at an arbitrary (position, vertex).

    Fields built from inner products satisfy ``f(n + N e1, b) = f(n, s(b))``
    with ``s`` the vertex permutation of the rotation, and ``s^2`` for
    ``e2``.  Points missing from ``f`` (non-admissible) count as zero.
    """
    return f.get(RibbonPoint(*table.canonical_point(m1, m2, b)), 0)


def check_harmonicity(table: FusionTable, f: Mapping, return_witness: bool = False):
    """Test the discrete harmonicity of a field on the ribbon.

    At every (position, vertex) of the rhombus the sum of ``f`` over the
    in-neighbours in the fusion graph must equal the sum over the three
    weight-lattice neighbours reached by adding a fundamental weight.  With
    the pairing taken at ``lambda = n - m`` this is the orientation in which
    every root field is harmonic.  At admissible points both sides vanish
    identically, so the whole rhombus is scanned.
    """
    F10 = table.system.fundamental
    N, r = table.N, table.system.rank
    tails = [[c for c in range(r) if F10[c, b]] for b in range(r)]
    for m1 in range(N):
        for m2 in range(N):
            for b in range(r):
                lhs = sum(int(F10[c, b]) * f.get(RibbonPoint(m1, m2, c), 0) for c in tails[b])
                rhs = sum(field_value(table, f, m1 + u1, m2 + u2, b) for u1, u2 in FUNDAMENTAL_WEIGHTS)
                if lhs != rhs:
                    if return_witness:
                        return False, RibbonPoint(m1, m2, b)
                    return False
    return (True, None) if return_witness else True


def project_function(gram: GramMatrix, table, f: Mapping) -> list[Fraction]:
    """Orthogonal projection of a ribbon function onto the span of the basis fields.

    Returns the coefficients ``x`` with ``p = sum_j x_j o_j``, where ``o_j`` is
    the field of the j-th basis root and orthogonality is the plain sum over
    ribbon points.
    """
    pts = enumerate_ribbon(table)
    V = pairing_matrix(table, gram.basis.elements, pts).T  # |R^v| x rank
    M = lattice.as_int_rows(V.T @ V)
    rhs = [sum(int(V[k, i]) * Fraction(f.get(p, 0)) for k, p in enumerate(pts) if V[k, i])
           for i in range(V.shape[1])]
    inv = lattice.inverse(M)
    return [sum((a * y for a, y in zip(row, rhs)), Fraction(0)) for row in inv]


def project_dirac(gram: GramMatrix, table, u: Point) -> list[Fraction]:
    """Projection of the Dirac mass at ``u``; ``N^2`` times it is the root at ``u``."""
    return project_function(gram, table, {u: 1})


def field_of_coefficients(gram: GramMatrix, table, x: Sequence) -> dict:
    pts = enumerate_ribbon(table)
    V = pairing_matrix(table, gram.basis.elements, pts)
    return {p: sum(Fraction(x[i]) * int(V[i, k]) for i in range(len(x))) for k, p in enumerate(pts)}


def gram_json(gram: GramMatrix, name: str = "") -> str:
    return json.dumps(gram.to_json(name))


# -- named pipeline -------------------------------------------------------------

LATTICE_ALIASES = {f"L{k}": f"A{k}" for k in range(7)}


def resolve_name(name: str) -> str:
    """Map lattice names ``L0..L6`` to their modules ``A0..A6``."""
    return LATTICE_ALIASES.get(name, name)


@functools.lru_cache(maxsize=None)
def system_table(name: str):
    """Fusion table of a shipped module (``"SU2:E6"`` for SU(2) graphs)."""
    from .fusion import build_alcove, build_alcove_su2, load_fusion_system

    system = load_fusion_system(resolve_name(name))
    if system.group == "SU2":
        return build_alcove_su2(system)
    return build_alcove(system)


@functools.lru_cache(maxsize=None)
def system_gram(name: str, basis: str = "B1") -> GramMatrix:
    table = system_table(name)
    return gram_matrix(table, select_basis(table, basis))
