"""Pure-Python twin of the compiled enumeration kernel (same signature and results)."""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

REL_SLACK = 1e-9
ABS_SLACK = 1e-7


class _Stop(Exception):
    pass


class _Classes:
    """Norm tables for the bottom ``k`` coordinates, one per class of ``s``."""

    def __init__(self, A, mu, d, bound, k, H):
        self.A, self.mu, self.d, self.bound, self.k = A, mu, d, bound, k
        self.H = [[int(v) for v in row] for row in H]
        self.tables = {}
        self.nodes = 0

    def classify(self, s):
        r = list(s)
        for j in range(self.k):
            q = r[j] // self.H[j][j]
            if q:
                for m in range(j, self.k):
                    r[m] -= q * self.H[m][j]
        return tuple(r)

    def table(self, r):
        if r not in self.tables:
            self.tables[r] = self._build(r)
        return self.tables[r]

    def _build(self, r):
        """Counts of ``g = wAw + 2 w.r`` over ``w`` with coset norm ``<= bound``."""
        A, mu, d, k = self.A, self.mu, self.d, self.k
        Ak = np.array([row[:k] for row in A[:k]], dtype=float)
        t = np.linalg.solve(Ak, np.array(r, dtype=float))
        bf = self.bound * (1.0 + REL_SLACK) + ABS_SLACK
        counts: dict = {}
        w = [0] * k

        def rec(i, P, Eg):
            cc = -t[i] - sum(mu[i][j] * (w[j] + t[j]) for j in range(i + 1, k))
            s = r[i] + sum(A[i][j] * w[j] for j in range(i + 1, k))
            rad = math.sqrt(max(bf - P, 0.0) / d[i]) + 1e-7
            for v in range(math.ceil(cc - rad), math.floor(cc + rad) + 1):
                self.nodes += 1
                g = Eg + A[i][i] * v * v + 2 * v * s
                if i == 0:
                    counts[g] = counts.get(g, 0) + 1
                else:
                    w[i] = v
                    rec(i - 1, P + d[i] * (v - cc) ** 2, g)
            w[i] = 0

        rec(k - 1, 0.0, 0)
        return sorted(counts.items())


def enumerate_block(A, mu, d, bound, lo_norm, prefix, start, hist, budget, collect=False,
                    split=None):
    n = len(A)
    A = [[int(v) for v in row] for row in A]
    mu = [[float(v) for v in row] for row in mu]
    d = [float(v) for v in d]
    x = [int(v) for v in prefix]
    bf = bound * (1.0 + REL_SLACK) + ABS_SLACK
    out = []
    nodes = 0
    ks = 0
    classes = None
    deferred: Counter = Counter()
    if split is not None and not collect:
        ks = int(split[0])
        if not 0 < ks < start:
            raise ValueError("split level must lie below the prefix")
        classes = _Classes(A, mu, d, bound, ks, split[1])

    P, E, zero = 0.0, 0, True
    for i in range(n - 1, start - 1, -1):
        cc = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        s = sum(A[i][j] * x[j] for j in range(i + 1, n))
        P += d[i] * (x[i] - cc) ** 2
        E += A[i][i] * x[i] * x[i] + 2 * x[i] * s
        zero = zero and x[i] == 0

    if start == 0:
        if not zero and lo_norm <= E <= bound:
            hist[E] += 1
            if collect:
                out.append(list(x))
        return 1, 0, _pack(out, n, collect)

    def bottom(E, zero):
        # norm of (y, x_top) is E_top + g(y + z) - zAz - 2 z.r where s = r + A_k z
        nonlocal nodes
        nodes += 1
        s = [sum(A[j][l] * x[l] for l in range(ks, n)) for j in range(ks)]
        r = classes.classify(s)
        Ak = [row[:ks] for row in A[:ks]]
        z = _solve_int(Ak, [a - b for a, b in zip(s, r)])
        K = E - sum(z[i] * Ak[i][j] * z[j] for i in range(ks) for j in range(ks))
        K -= 2 * sum(a * b for a, b in zip(z, r))
        if not zero and lo_norm <= 1:
            # the table is added once per (class, shift) after the walk
            deferred[r, K] += 1
        else:
            for g, cnt in classes.table(r):
                nrm = K + g
                if nrm > bound:
                    break
                if zero:
                    cnt = (cnt - (nrm == 0)) // 2
                if cnt and nrm >= lo_norm:
                    hist[nrm] += cnt
        if nodes > budget:
            raise _Stop

    def level(i, P, E, zero):
        nonlocal nodes
        if i == ks - 1:
            bottom(E, zero)
            return
        cc = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        s = sum(A[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(bf - P, 0.0) / d[i]) + ABS_SLACK
        lo, hi = math.ceil(cc - r), math.floor(cc + r)
        if zero:
            lo = max(lo, 1 if i == 0 else 0)
        if i == 0:
            nodes += max(hi - lo + 1, 0)
            for x0 in range(lo, hi + 1):
                nrm = E + A[0][0] * x0 * x0 + 2 * s * x0
                if lo_norm <= nrm <= bound:
                    hist[nrm] += 1
                    if collect:
                        x[0] = x0
                        out.append(list(x))
            if nodes > budget:
                raise _Stop
            return
        for xi in range(lo, hi + 1):
            nodes += 1
            if nodes > budget:
                raise _Stop
            x[i] = xi
            level(i - 1, P + d[i] * (xi - cc) ** 2,
                  E + A[i][i] * xi * xi + 2 * xi * s, zero and xi == 0)
        x[i] = 0

    status = 0
    try:
        level(start - 1, P, E, zero)
    except _Stop:
        status = 1
    if status == 0:
        for (r, K), times in deferred.items():
            for g, cnt in classes.table(r):
                if K + g > bound:
                    break
                hist[K + g] += times * cnt
    if classes is not None:
        nodes += classes.nodes
    return nodes, status, _pack(out, n, collect)


def _solve_int(M, b):
    """Integer solution of ``M z = b`` (exact; ``M`` nonsingular)."""
    from fractions import Fraction

    k = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(bi)] for row, bi in zip(M, b)]
    for c in range(k):
        p = next(i for i in range(c, k) if aug[i][c])
        aug[c], aug[p] = aug[p], aug[c]
        for i in range(k):
            if i != c and aug[i][c]:
                f = aug[i][c] / aug[c][c]
                aug[i] = [u - f * v for u, v in zip(aug[i], aug[c])]
    z = [aug[i][k] / aug[i][i] for i in range(k)]
    assert all(v.denominator == 1 for v in z)
    return [int(v) for v in z]


def _pack(rows, n, collect):
    if not collect:
        return None
    return np.array(rows, dtype=np.int64).reshape(-1, n)
