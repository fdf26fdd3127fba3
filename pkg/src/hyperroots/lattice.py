"""Exact arithmetic on integral quadratic forms.

Exact inverses and Smith forms use sympy's ``DomainMatrix``
over ZZ / QQ (fraction-free Bareiss for determinants).  Everything returned
to callers is a plain Python ``int`` or ``fractions.Fraction``.
"""
from __future__ import annotations

import json
import math
from collections import Counter, deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from sympy import QQ, ZZ, primerange
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .errors import Inconclusive, NotPositiveDefinite

DEFAULT_PERM_BUDGET = 2_000_000


def as_int_rows(A) -> list[list[int]]:
    """Copy any 2-D integer array-like into nested lists of Python ints."""
    rows = [[int(x) for x in row] for row in A]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def _dm(A, domain=ZZ) -> DomainMatrix:
    rows = as_int_rows(A)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    return DomainMatrix([[domain(x) for x in r] for r in rows], (n, m), domain)


def _square(A) -> list[list[int]]:
    rows = as_int_rows(A)
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    return rows


def determinant(A) -> int:
    rows = _square(A)
    if not rows:
        return 1
    return int(_dm(rows).det())


def rank(A) -> int:
    rows = as_int_rows(A)
    if not rows or not rows[0]:
        return 0
    return int(_dm(rows, QQ).rank())


def inverse(A) -> list[list[Fraction]]:
    """Exact inverse with ``Fraction`` entries; ZeroDivisionError when singular."""
    rows = _square(A)
    if determinant(rows) == 0:
        raise ZeroDivisionError("singular matrix")
    inv = _dm(rows, QQ).inv().to_list()
    return [[Fraction(int(x.numerator), int(x.denominator)) for x in r] for r in inv]


def solve(A, b) -> list[Fraction]:
    """Exact solution of ``A x = b`` for square nonsingular ``A``."""
    inv = inverse(A)
    b = [int(x) for x in b]
    return [sum((a * y for a, y in zip(row, b)), Fraction(0)) for row in inv]


def smith_invariants(A) -> list[int]:
    """Invariant factors ``d_1 | d_2 | ...`` of a nonsingular integer matrix."""
    factors = [abs(int(x)) for x in invariant_factors(_dm(_square(A)))]
    return sorted(factors)


def dual_quotient(A) -> list[int]:
    """Cyclic factors (> 1) of the discriminant group ``L*/L``."""
    return [d for d in smith_invariants(A) if d > 1]


def is_symmetric(A) -> bool:
    rows = as_int_rows(A)
    n = len(rows)
    return all(rows[i][j] == rows[j][i] for i in range(n) for j in range(i))


def is_even_integral(M) -> bool:
    """Integral entries and even diagonal (works for Fraction or int matrices)."""
    for i, row in enumerate(M):
        for x in row:
            if Fraction(x).denominator != 1:
                return False
        if int(row[i]) % 2:
            return False
    return True


def ldl_pivots(A) -> list[Fraction]:
    """Pivots of the rational LDL^T factorization (the squared Cholesky diagonal).

    Raises NotPositiveDefinite on the first non-positive pivot.
    """
    rows = _square(A)
    n = len(rows)
    M = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    for k in range(n):
        d = M[k][k]
        if d <= 0:
            raise NotPositiveDefinite(f"pivot {k} is {d}; form is not positive definite")
        pivots.append(d)
        for i in range(k + 1, n):
            f = M[i][k] / d
            if f:
                Mi, Mk = M[i], M[k]
                for j in range(k + 1, n):
                    Mi[j] -= f * Mk[j]
    return pivots


def is_positive_definite(A) -> bool:
    try:
        ldl_pivots(A)
    except NotPositiveDefinite:
        return False
    return True


def _divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def modular_level(A, inv: Optional[list[list[Fraction]]] = None) -> int:
    """Smallest ``l`` such that ``l * A^-1`` is even integral."""
    if inv is None:
        inv = inverse(A)
    d = 1
    for row in inv:
        for x in row:
            d = math.lcm(d, x.denominator)

    def ok(l):
        return is_even_integral([[l * x for x in row] for row in inv])

    # any valid level is a multiple of d, and 2d always works
    level = d if ok(d) else 2 * d
    if not ok(level):
        raise ArithmeticError("no even integral rescaling of the inverse found")
    for cand in _divisors(level):
        if ok(cand):
            return cand
    return level


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol ``(a/p)`` by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def legendre_profile(delta: int, level: int, count: int = 10) -> list[tuple[int, int]]:
    out = []
    for p in primerange(3, 10**6):
        if level % p:
            out.append((int(p), legendre_symbol(delta, int(p))))
            if len(out) == count:
                break
    return out


@dataclass
class LatticeInvariants:
    rank: int
    discriminant: int
    level: int
    weight: int
    dual_quotient: list
    legendre_profile: list
    name: str = ""

    def to_json(self) -> dict:
        d = asdict(self)
        d["legendre_profile"] = [list(t) for t in self.legendre_profile]
        order = ("name", "rank", "discriminant", "level", "weight", "dual_quotient", "legendre_profile")
        return {k: d[k] for k in order}


def invariants(A, name: str = "") -> LatticeInvariants:
    rows = _square(A)
    if not is_symmetric(rows):
        raise ValueError("Gram matrix must be symmetric")
    if not is_even_integral(rows):
        raise ValueError("Gram matrix must be even integral")
    ldl_pivots(rows)
    delta = determinant(rows)
    inv = inverse(rows)
    level = modular_level(rows, inv)
    # adjugate check: A (l A^-1) = l I
    n = len(rows)
    for i in range(n):
        for j in range(n):
            s = sum(rows[i][t] * level * inv[t][j] for t in range(n))
            if s != (level if i == j else 0):
                raise ArithmeticError("inverse failed the adjugate check")
    dq = dual_quotient(rows)
    if math.prod(dq) != delta:
        raise ArithmeticError("Smith invariants do not multiply to the determinant")
    return LatticeInvariants(
        rank=n,
        discriminant=delta,
        level=level,
        weight=n // 2,
        dual_quotient=dq,
        legendre_profile=legendre_profile(delta, level),
        name=name,
    )


def invariants_json(inv: LatticeInvariants) -> str:
    return json.dumps(inv.to_json(), sort_keys=False)


# -- signed permutation equivalence -------------------------------------------


def _refined_colors(A, B):
    """Joint colour refinement of the weighted graphs ``|A|`` and ``|B|``.

    Returns per-vertex colours for A and B, or None when the colour
    histograms already prove the two matrices inequivalent.
    """
    n = len(A)
    cols = []
    for M in (A, B):
        cols.append([(M[i][i], tuple(sorted(abs(x) for x in M[i]))) for i in range(n)])
    while True:
        if Counter(cols[0]) != Counter(cols[1]):
            return None
        palette = {c: k for k, c in enumerate(sorted(set(cols[0])))}
        ids = [[palette[c] for c in cs] for cs in cols]
        nxt = []
        for M, cid in zip((A, B), ids):
            nxt.append([
                (cid[i], tuple(sorted((cid[j], abs(M[i][j])) for j in range(n) if j != i and M[i][j])))
                for i in range(n)
            ])
        if len(set(nxt[0])) == len(palette):
            if Counter(nxt[0]) != Counter(nxt[1]):
                return None
            return ids
        cols = nxt


def signed_perm_equivalent(A, B, budget: int = DEFAULT_PERM_BUDGET) -> Optional[list[tuple[int, int]]]:
    """Search a signed permutation ``S`` with ``S A S^T = B``.

    The witness is a list of pairs ``(pi_i, s_i)``: row ``i`` of ``S`` has the
    entry ``s_i`` in column ``pi_i``, i.e. ``B[i][j] = s_i s_j A[pi_i][pi_j]``.
    Returns None when no such matrix exists and raises Inconclusive when the
    search exceeds ``budget`` nodes.
    """
    A = _square(A)
    B = _square(B)
    n = len(A)
    if len(B) != n:
        return None
    if n == 0:
        return []
    if determinant(A) != determinant(B):
        return None
    colors = _refined_colors(A, B)
    if colors is None:
        return None
    cA, cB = colors

    # breadth-first order over the support graph of B, so every vertex after
    # the first of its component has an already placed neighbour
    order, seen = [], [False] * n
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in range(n):
                if B[i][j] and not seen[j]:
                    seen[j] = True
                    queue.append(j)

    perm = [-1] * n
    sign = [0] * n
    used = [False] * n
    nodes = 0

    def place(depth):
        nonlocal nodes
        if depth == n:
            return True
        i = order[depth]
        placed = order[:depth]
        for cand in range(n):
            if used[cand] or cA[cand] != cB[i] or A[cand][cand] != B[i][i]:
                continue
            nodes += 1
            if nodes > budget:
                raise Inconclusive(f"signed permutation search exceeded {budget:,} nodes")
            s = 0
            good = True
            for j in placed:
                b = B[i][j]
                a = A[cand][perm[j]]
                if abs(a) != abs(b):
                    good = False
                    break
                if b:
                    t = 1 if a * sign[j] == b else -1
                    if s == 0:
                        s = t
                    elif s != t:
                        good = False
                        break
            if not good:
                continue
            # no placed neighbour: a fresh component, whose overall sign is free
            perm[i], sign[i], used[cand] = cand, s or 1, True
            if place(depth + 1):
                return True
            used[cand] = False
        perm[i], sign[i] = -1, 0
        return False

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * n + 100))
    try:
        found = place(0)
    finally:
        sys.setrecursionlimit(limit)
    if not found:
        return None
    return [(perm[i], sign[i]) for i in range(n)]


def apply_signed_perm(A, witness: Sequence[tuple[int, int]]) -> list[list[int]]:
    """``S A S^T`` for a witness returned by :func:`signed_perm_equivalent`."""
    A = as_int_rows(A)
    return [[si * sj * A[pi][pj] for (pj, sj) in witness] for (pi, si) in witness]


# -- basis reduction ----------------------------------------------------------


def lll_gram(G, delta: Fraction = Fraction(3, 4)):
    """Integral LLL reduction of a positive definite Gram matrix.

    Works on the Gram matrix alone with exact integer Gram-Schmidt data
    (subdeterminants ``d_i`` and scaled coefficients ``lam``).  Returns
    ``(G', H)`` with ``H`` unimodular and ``G' = H G H^T``; row ``i`` of ``H``
    gives the i-th reduced vector in the original coordinates.
    """
    G = [list(r) for r in _square(G)]
    n = len(G)
    H = [[int(i == j) for j in range(n)] for i in range(n)]
    if n <= 1:
        return G, H
    num, den = delta.numerator, delta.denominator
    lam = [[0] * n for _ in range(n)]
    d = [1] * (n + 1)  # d[i + 1] is the i-th leading principal minor; d[0] = 1

    def gso_row(k):
        for j in range(k + 1):
            u = G[k][j]
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                d[k + 1] = u
        if d[k + 1] <= 0:
            raise NotPositiveDefinite("Gram matrix is not positive definite")

    def reduce(k, l):
        # b_k <- b_k - q b_l with q the nearest integer to lam[k][l] / d_l
        if 2 * abs(lam[k][l]) <= d[l + 1]:
            return
        q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
        H[k] = [a - q * b for a, b in zip(H[k], H[l])]
        G[k] = [a - q * b for a, b in zip(G[k], G[l])]
        for row in G:
            row[k] -= q * row[l]
        lam[k][l] -= q * d[l + 1]
        for i in range(l):
            lam[k][i] -= q * lam[l][i]

    def swap(k, kmax):
        H[k], H[k - 1] = H[k - 1], H[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        l = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + l * l) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - l * t) // d[k]
            lam[i][k - 1] = (B * t + l * lam[i][k]) // d[k + 1]
        d[k] = B

    d[1] = G[0][0]
    if d[1] <= 0:
        raise NotPositiveDefinite("Gram matrix is not positive definite")
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            gso_row(k)
        reduce(k, k - 1)
        # Lovasz: d_k d_{k-2} >= (delta d_{k-1}^2 - lam^2) in scaled integer form
        if den * d[k + 1] * d[k - 1] < num * d[k] * d[k] - den * lam[k][k - 1] ** 2:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                reduce(k, l)
            k += 1
    return G, H


def _float_gso(G):
    import numpy as np

    L = np.linalg.cholesky(np.array(G, dtype=float))
    d = np.diag(L) ** 2
    return (L / np.diag(L)).T, d


def _block_svp(mu, d, k, end, radius):
    """Shortest nonzero vector of the projected block ``[k, end)`` below ``radius``.

    Floating point is fine here: a wrong answer only costs reduction quality,
    every basis change is applied exactly.
    """
    m = end - k
    x = [0] * m
    best, R = None, radius

    def rec(i, P, zero):
        nonlocal best, R
        ii = k + i
        cc = -sum(mu[ii, k + j] * x[j] for j in range(i + 1, m))
        r = math.sqrt(max(R - P, 0.0) / d[ii])
        lo, hi = math.ceil(cc - r), math.floor(cc + r)
        if zero:
            lo = max(lo, 0)
        for v in range(lo, hi + 1):
            x[i] = v
            Pn = P + d[ii] * (v - cc) ** 2
            if Pn >= R:
                continue
            if i == 0:
                if not (zero and v == 0):
                    best, R = list(x), Pn
            else:
                rec(i - 1, Pn, zero and v == 0)
        x[i] = 0

    rec(m - 1, 0.0, True)
    return best


def unimodular_completion(c: Sequence[int]) -> list[list[int]]:
    """Unimodular integer matrix whose first row is the primitive vector ``c``."""
    m = len(c)
    c = [int(v) for v in c]
    Vi = [[int(i == j) for j in range(m)] for i in range(m)]
    for j in range(m - 1, 0, -1):
        a, b = c[j - 1], c[j]
        if b == 0:
            continue
        g, s, t = _egcd(a, b)
        # (c_{j-1}, c_j) -> (g, 0); rows j-1, j of the inverse transform
        r0 = [a // g * u + b // g * w for u, w in zip(Vi[j - 1], Vi[j])]
        r1 = [-t * u + s * w for u, w in zip(Vi[j - 1], Vi[j])]
        Vi[j - 1], Vi[j] = r0, r1
        c[j - 1], c[j] = g, 0
    if c[0] < 0:
        Vi[0] = [-u for u in Vi[0]]
        c[0] = -c[0]
    if c[0] != 1:
        raise ValueError("vector is not primitive")
    return Vi


def _egcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _matmul(X, Y):
    Yt = list(zip(*Y))
    return [[sum(a * b for a, b in zip(row, col)) for col in Yt] for row in X]


def bkz_gram(G, block: int = 10, delta: Fraction = Fraction(99, 100), max_tours: int = 30):
    """BKZ reduction of a Gram matrix; returns ``(G', U)`` with ``G' = U G U^T``.

    Block minima are found by floating-point enumeration, inserted through a
    unimodular completion and cleaned up by the exact integral LLL above, so
    the returned pair is always exact.
    """
    A = _square(G)
    n = len(A)
    G1, U = lll_gram(A, delta)
    if n <= 2 or block < 2:
        return G1, U
    for _ in range(max_tours):
        changed = False
        for k in range(n - 1):
            cur = _matmul(_matmul(U, A), [list(r) for r in zip(*U)])
            mu, d = _float_gso(cur)
            end = min(k + block, n)
            c = _block_svp(mu, d, k, end, 0.999 * d[k])
            if c is None:
                continue
            T = unimodular_completion(c)
            U[k:end] = _matmul(T, U[k:end])
            cur = _matmul(_matmul(U, A), [list(r) for r in zip(*U)])
            _, H = lll_gram(cur, delta)
            U = _matmul(H, U)
            changed = True
        if not changed:
            break
    Gr = _matmul(_matmul(U, A), [list(r) for r in zip(*U)])
    return Gr, U


def hermite_columns(M) -> tuple[list[list[int]], list[list[int]]]:
    """Lower-triangular ``H = M V`` with ``V`` unimodular and positive diagonal.

    The columns of ``H`` span the same lattice as the columns of the
    nonsingular square matrix ``M``.
    """
    H = [list(r) for r in _square(M)]
    n = len(H)
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(a, b, p, q, r, s):
        # (col_a, col_b) <- (p col_a + q col_b, r col_a + s col_b)
        for X in (H, V):
            for row in X:
                u, w = row[a], row[b]
                row[a], row[b] = p * u + q * w, r * u + s * w

    for i in range(n):
        for j in range(i + 1, n):
            a, b = H[i][i], H[i][j]
            if b == 0:
                continue
            g, x, y = _egcd(a, b)
            colop(i, j, x, y, -b // g, a // g)
        if H[i][i] == 0:
            raise ValueError("matrix is singular")
        if H[i][i] < 0:
            for X in (H, V):
                for row in X:
                    row[i] = -row[i]
    return H, V
