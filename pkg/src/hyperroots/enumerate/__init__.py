"""Lattice vectors by norm: theta series and shells.

The hot loop lives in a compiled Cython kernel (``_kernel``).  When the
extension is missing, or ``HYPERROOTS_KERNEL=python`` is set, the pure-Python
twin ``_pykernel`` is used instead; both produce identical counts.
"""
from __future__ import annotations

import functools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .. import lattice
from ..errors import BudgetExceeded, NotPositiveDefinite
from . import _pykernel

try:
    from . import _kernel
except ImportError:  # extension not built
    _kernel = None

DEFAULT_BUDGET = 5_000_000_000
CONVENTION = "q-exponent = xAx"


def _pick_backend():
    want = os.environ.get("HYPERROOTS_KERNEL", "auto").lower()
    if want == "python" or _kernel is None:
        return "python"
    return "cython"


BACKEND = _pick_backend()


def kernel_for(backend: Optional[str] = None):
    backend = backend or BACKEND
    if backend == "cython":
        if _kernel is None:
            raise RuntimeError("compiled kernel not available; reinstall with a C compiler")
        return _kernel.enumerate_block
    if backend == "python":
        return _pykernel.enumerate_block
    raise ValueError(f"unknown backend {backend!r}")


@dataclass
class ThetaSeries:
    coefficients: dict
    max_norm: int
    name: str = ""

    def __getitem__(self, norm: int) -> int:
        return self.coefficients.get(norm, 0)

    def dense(self, step: int = 1) -> list[int]:
        """Counts for norms ``0, step, 2 step, ...`` up to ``max_norm``."""
        return [self[n] for n in range(0, self.max_norm + 1, step)]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "convention": CONVENTION,
            "max_norm": self.max_norm,
            "coefficients": [[n, c] for n, c in sorted(self.coefficients.items())],
        }

    @classmethod
    def from_json(cls, d: dict) -> "ThetaSeries":
        return cls({int(n): int(c) for n, c in d["coefficients"]}, int(d["max_norm"]), d.get("name", ""))

    def __str__(self):
        terms = []
        for n, c in sorted(self.coefficients.items()):
            terms.append(str(c) if n == 0 else f"{c} q^{n}")
        return " + ".join(terms) + f" + O(q^{self.max_norm + 1})"


@dataclass
class Shell:
    norm: int
    vectors: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.vectors)

    @property
    def count_with_signs(self) -> int:
        return 2 * len(self.vectors)


def _prepare(A):
    rows = lattice._square(A)
    if not lattice.is_symmetric(rows):
        raise ValueError("Gram matrix must be symmetric")
    lattice.ldl_pivots(rows)  # exact positive-definiteness check
    Ai = np.array(rows, dtype=np.int64)
    L = np.linalg.cholesky(Ai.astype(float))
    d = np.diag(L) ** 2
    Lu = L / np.diag(L)  # unit lower triangular
    mu = np.ascontiguousarray(Lu.T)  # mu[i, j] = L[j, i] for j > i
    return Ai, mu, np.ascontiguousarray(d)


def projected_count(A, bound: int) -> float:
    """Gaussian-heuristic estimate of the number of vectors of norm <= bound."""
    n = len(A)
    det = lattice.determinant(A)
    log_vol = (n / 2) * math.log(math.pi * bound) - math.lgamma(n / 2 + 1) - 0.5 * math.log(det)
    return math.exp(log_vol)


def level_profile(d, bound: int) -> list[float]:
    """Heuristic node count at each level (coordinates ``k..n-1`` fixed), halved for signs."""
    n = len(d)
    out = []
    for k in range(n):
        m = n - k
        logv = (m / 2) * math.log(math.pi * bound) - math.lgamma(m / 2 + 1) - 0.5 * float(np.log(d[k:]).sum())
        out.append(math.exp(logv) / 2)
    return out


# relative costs of the table operations, in units of one walk node
SPLIT_LOOKUP = 3.0
SPLIT_FLUSH = 0.5
SPLIT_BUILD = 1.5
SPLIT_MAX_CLASSES = 2_000_000
SPLIT_MAX_CELLS = 60_000_000


def choose_split(Ai, d, bound: int, start: int):
    """Pick the bottom block size ``k`` (0 = plain walk) from the level profile."""
    n = len(Ai)
    prof = level_profile(d, bound)
    best_k, best = 0, sum(prof)
    if any(int(Ai[i][i]) % 2 for i in range(n)):
        return best_k, best  # tables store even norms only
    det = 1
    for k in range(1, min(start, n - 1)):
        det *= d[k - 1]
        classes = round(det)
        if classes > SPLIT_MAX_CLASSES:
            break
        hits = min(classes, prof[k])
        if hits * (bound + 4) > SPLIT_MAX_CELLS:
            break
        logv = (k / 2) * math.log(math.pi * bound) - math.lgamma(k / 2 + 1) - 0.5 * math.log(det)
        # visits only bump a counter; each class is convolved with its table once
        cost = (sum(prof[k + 1:]) + prof[k] * SPLIT_LOOKUP
                + hits * (3 * math.exp(logv) * SPLIT_BUILD + SPLIT_FLUSH * bound * bound / 4))
        if cost < best:
            best_k, best = k, cost
    return best_k, best


def _split_data(Ai, k):
    Ak = [[int(v) for v in row[:k]] for row in Ai[:k]]
    H, V = lattice.hermite_columns(Ak)
    return (k, np.array(H, dtype=np.int64), np.array(V, dtype=np.int64))


def _prefixes(Ai, mu, d, bound, depth):
    """Feasible values of the top ``depth`` coordinates (canonical sign)."""
    n = len(Ai)
    bf = bound * (1 + _pykernel.REL_SLACK) + _pykernel.ABS_SLACK
    out = []
    x = [0] * n

    def rec(i, P, zero):
        if i < n - depth:
            out.append(list(x))
            return
        cc = -sum(mu[i, j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(bf - P, 0.0) / d[i]) + _pykernel.ABS_SLACK
        lo, hi = math.ceil(cc - r), math.floor(cc + r)
        if zero:
            lo = max(lo, 0)
        for xi in range(lo, hi + 1):
            x[i] = xi
            rec(i - 1, P + d[i] * (xi - cc) ** 2, zero and xi == 0)
        x[i] = 0

    rec(n - 1, 0.0, True)
    return out


BKZ_FROM_DIM = 16
# progressive block sizes; a small block first gives the large one a good start
BKZ_BLOCKS = (8, 12, 16)


@functools.lru_cache(maxsize=32)
def _reduced(key):
    A = [list(r) for r in key]
    if len(A) < BKZ_FROM_DIM:
        return lattice.lll_gram(A)
    U = [[int(i == j) for j in range(len(A))] for i in range(len(A))]
    G = A
    for b in BKZ_BLOCKS:
        G, V = lattice.bkz_gram(G, min(b, len(A)))
        U = lattice._matmul(V, U)
    return G, U


def reduced_gram(A):
    """Reduced Gram matrix and transform ``(G, H)`` used before enumeration."""
    G, H = _reduced(tuple(tuple(int(v) for v in r) for r in lattice._square(A)))
    return [list(r) for r in G], [list(r) for r in H]


def _run(A, bound: int, lo_norm: int, budget: int, threads: int, collect: bool,
         backend: Optional[str], reduce: bool = True, split: Optional[int] = None):
    H = None
    if reduce:
        # counts are basis independent; listed vectors are mapped back through H
        A, H = reduced_gram(A)
    Ai, mu, d = _prepare(A)
    n = len(Ai)
    kernel = kernel_for(backend)
    if projected_count(Ai, bound) / 2 > budget:
        raise BudgetExceeded(budget)
    depth = 0
    tasks = [[0] * n]
    if threads > 1 and n > 2:
        for depth in (1, 2, 3):
            tasks = _prefixes(Ai, mu, d, bound, depth)
            if len(tasks) >= 8 * threads:
                break
    start = n - depth
    sp = None
    if not collect:
        k = choose_split(Ai, d, bound, start)[0] if split is None else int(split)
        if k:
            sp = _split_data(Ai, k)

    def one(prefix):
        hist = np.zeros(bound + 1, dtype=np.int64)
        nodes, status, vecs = kernel(Ai, mu, d, bound, lo_norm, np.array(prefix, dtype=np.int64),
                                     start, hist, budget, collect, sp)
        return nodes, status, hist, vecs

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, tasks))
    else:
        results = [one(t) for t in tasks]
    total = np.zeros(bound + 1, dtype=np.int64)
    nodes = 0
    chunks = []
    for k, status, hist, vecs in results:
        nodes += k
        if status or nodes > budget:
            raise BudgetExceeded(budget, nodes)
        total += hist
        if collect:
            chunks.append(vecs)
    vectors = np.concatenate(chunks) if collect and chunks else np.zeros((0, n), dtype=np.int64)
    if H is not None and len(vectors):
        vectors = vectors @ np.array(H, dtype=np.int64)
    return total, vectors, nodes


def theta_series(A, max_norm: int, budget: int = DEFAULT_BUDGET, threads: int = 1,
                 backend: Optional[str] = None, name: str = "") -> ThetaSeries:
    """Exact counts of lattice vectors for every norm up to ``max_norm``."""
    max_norm = int(max_norm)
    if max_norm < 0:
        raise ValueError("max_norm must be non-negative")
    coeffs = {0: 1}
    if max_norm > 0:
        hist, _, _ = _run(A, max_norm, 1, budget, threads, False, backend)
        for norm in range(1, max_norm + 1):
            if hist[norm]:
                coeffs[norm] = 2 * int(hist[norm])
    else:
        lattice.ldl_pivots(A)
    if any(n % 2 for n in coeffs):
        raise ArithmeticError("odd norm found in an even lattice")
    return ThetaSeries(coeffs, max_norm, name)


def canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip each row so that its first nonzero coordinate is positive."""
    v = np.array(v, dtype=np.int64, copy=True)
    for row in v:
        nz = np.flatnonzero(row)
        if len(nz) and row[nz[0]] < 0:
            row *= -1
    return v


def shell(A, norm: int, budget: int = DEFAULT_BUDGET, threads: int = 1,
          backend: Optional[str] = None) -> Shell:
    """All vectors of exact norm ``norm``, one per sign pair."""
    norm = int(norm)
    if norm <= 0:
        return Shell(norm, np.zeros((0, len(A)), dtype=np.int64))
    _, vecs, _ = _run(A, norm, norm, budget, threads, True, backend)
    vecs = canonical_sign(vecs)
    if len(vecs):
        vecs = vecs[np.lexsort(vecs.T[::-1])]
    return Shell(norm, vecs)


def minimal_norm(A, budget: int = DEFAULT_BUDGET, backend: Optional[str] = None) -> int:
    """Smallest nonzero norm, found by raising the bound one step at a time."""
    bound = min(int(v) for v in np.diag(np.asarray(A, dtype=np.int64)))
    for b in range(1, bound + 1):
        th = theta_series(A, b, budget=budget, backend=backend)
        nonzero = [n for n in th.coefficients if n]
        if nonzero:
            return min(nonzero)
    return bound


def hyperroot_coordinates(gram, table) -> set:
    """Canonical-sign coordinate tuples of every hyper-root (one per sign pair)."""
    from ..ribbon import enumerate_ribbon, express_all

    X = express_all(gram, table, enumerate_ribbon(table))
    return {tuple(int(c) for c in row) for row in canonical_sign(X)}


def kissing_data(A, table, basis, budget: int = DEFAULT_BUDGET, backend: Optional[str] = None) -> dict:
    from ..ribbon import gram_matrix

    gram = gram_matrix(table, basis)
    if not np.array_equal(gram.entries, np.asarray(A, dtype=np.int64)):
        raise ValueError("A is not the Gram matrix of the given basis")
    m = minimal_norm(A, budget, backend)
    sh = shell(A, m, budget=budget, backend=backend)
    roots = hyperroot_coordinates(gram, table)
    vecs = {tuple(int(c) for c in v) for v in sh.vectors}
    return {
        "min_norm": m,
        "kissing_number": sh.count_with_signs,
        "min_vectors_are_hyperroots": vecs == roots,
        "hyperroots_in_min_shell": len(vecs & roots) * 2,
        "span_dim_of_min_shell": lattice.rank(sh.vectors) if len(sh) else 0,
    }


def shell_decomposition(A, table, basis, norm: int, budget: int = DEFAULT_BUDGET,
                        backend: Optional[str] = None) -> dict:
    """Split the shell of a given norm into hyper-roots and other vectors (signed counts)."""
    from ..ribbon import gram_matrix

    gram = gram_matrix(table, basis)
    sh = shell(A, norm, budget=budget, backend=backend)
    roots = hyperroot_coordinates(gram, table)
    vecs = {tuple(int(c) for c in v) for v in sh.vectors}
    hits = len(vecs & roots)
    th = theta_series(A, norm, budget=budget, backend=backend)
    return {
        "norm": norm,
        "total": sh.count_with_signs,
        "hyperroot_count": 2 * hits,
        "other_count": sh.count_with_signs - 2 * hits,
        "cumulative_nonzero": sum(c for n, c in th.coefficients.items() if n),
    }


def naive_theta(A, max_norm: int) -> dict:
    """Oracle: brute force over the box ``|x_i| <= sqrt(max_norm * (A^-1)_ii)``."""
    import itertools

    rows = lattice._square(A)
    inv = lattice.inverse(rows)
    n = len(rows)
    radius = [math.isqrt(int(max_norm * inv[i][i])) + 1 for i in range(n)]
    Ai = np.array(rows, dtype=np.int64)
    counts: dict = {}
    for x in itertools.product(*[range(-r, r + 1) for r in radius]):
        v = np.array(x, dtype=np.int64)
        nrm = int(v @ Ai @ v)
        if nrm <= max_norm:
            counts[nrm] = counts.get(nrm, 0) + 1
    return dict(sorted(counts.items()))
