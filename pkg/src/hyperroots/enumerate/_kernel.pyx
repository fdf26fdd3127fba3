# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Fincke-Pohst core.

Enumerates every vector whose highest nonzero coordinate is positive and whose
norm ``x.A.x`` lies in ``[lo_norm, bound]``, below a fixed prefix of top
coordinates.  Floating-point Cholesky data only prunes; each leaf norm is
recomputed in exact 64-bit integer arithmetic.

With a split level ``k`` the bottom ``k`` coordinates are not walked.  For a
fixed top part, the norms of all completions depend only on the class of
``s = A[:k, k:] x_top`` modulo ``A[:k, :k] Z^k`` plus an integer shift, so each
class gets one table of exact norm counts, built on first use.
"""
from libc.math cimport sqrt, floor, ceil, fabs, llround
from libc.stdlib cimport malloc, calloc, realloc, free

import numpy as np

DEF MAXDIM = 64
DEF ACC_LOW = 8  # base norms K + g0 start a few units below zero

cdef double REL_SLACK = 1e-9
cdef double ABS_SLACK = 1e-7


cdef struct Buffer:
    long long *data
    Py_ssize_t used
    Py_ssize_t cap


cdef int _push(Buffer *buf, long long *x, int n) noexcept nogil:
    cdef Py_ssize_t need = buf.used + n
    cdef long long *grown
    cdef int j
    if need > buf.cap:
        buf.cap = 2 * need + 1024
        grown = <long long *> realloc(buf.data, buf.cap * sizeof(long long))
        if grown == NULL:
            return -1
        buf.data = grown
    for j in range(n):
        buf.data[buf.used + j] = x[j]
    buf.used = need
    return 0


cdef struct Tables:
    int k
    int width
    long long ncls
    long long bound
    long long *H        # k x k lower-triangular Hermite form, row major
    long long *V        # H = A_k V
    long long *radix
    long long **tab
    long long **acc     # per class: visits by base norm, offset ACC_LOW
    long long *g0
    double *cr
    long long nodes


cdef inline long long _floordiv(long long a, long long b) noexcept nogil:
    cdef long long q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef long long _classify(Tables *T, long long *S, long long *r, long long *zH) noexcept nogil:
    cdef int j, m, k = T.k
    cdef long long q, idx = 0
    for j in range(k):
        r[j] = S[j]
    for j in range(k):
        q = _floordiv(r[j], T.H[j * k + j])
        zH[j] = q
        if q:
            for m in range(j, k):
                r[m] -= q * T.H[m * k + j]
        idx += r[j] * T.radix[j]
    return idx


cdef void _coset_rec(Tables *T, int i, const long long[:, ::1] A, const double[:, ::1] mu,
                     const double[::1] d, double bf, long long *r, double *t, long long *w,
                     double P, long long Eg, long long *tbl, long long g0) noexcept nogil:
    # enumerate w with (w + t) A (w + t) <= bf below level i; Eg is exact
    cdef int j
    cdef double cc = -t[i], rad, u
    cdef long long lo, hi, v, s = r[i], g
    for j in range(i + 1, T.k):
        cc -= mu[i, j] * (w[j] + t[j])
        s += A[i, j] * w[j]
    rad = bf - P
    if rad < 0.0:
        rad = 0.0
    rad = sqrt(rad / d[i]) + 1e-7
    lo = <long long> ceil(cc - rad)
    hi = <long long> floor(cc + rad)
    for v in range(lo, hi + 1):
        T.nodes += 1
        u = v - cc
        g = Eg + A[i, i] * v * v + 2 * v * s
        if i == 0:
            g = (g - g0) >> 1
            if 0 <= g < T.width:
                tbl[g] += 1
        else:
            w[i] = v
            _coset_rec(T, i - 1, A, mu, d, bf, r, t, w, P + d[i] * u * u, g, tbl, g0)
    w[i] = 0


cdef int _build(Tables *T, long long idx, long long *r, const long long[:, ::1] A,
                const double[:, ::1] mu, const double[::1] d) noexcept nogil:
    cdef int k = T.k, i, j
    cdef double t[MAXDIM]
    cdef long long w[MAXDIM]
    cdef double c = 0.0
    cdef long long *tbl
    # t = A_k^{-1} r through A_k = mu^T diag(d) mu
    for i in range(k):
        t[i] = <double> r[i]
        for j in range(i):
            t[i] -= mu[j, i] * t[j]
    for i in range(k):
        t[i] /= d[i]
    for i in range(k - 1, -1, -1):
        for j in range(i + 1, k):
            t[i] -= mu[i, j] * t[j]
        w[i] = 0
    for i in range(k):
        c += r[i] * t[i]
    tbl = <long long *> calloc(T.width, sizeof(long long))
    if tbl == NULL:
        return -1
    T.cr[idx] = c
    T.g0[idx] = <long long> floor(-c) - 2
    if T.g0[idx] & 1:
        T.g0[idx] -= 1
    _coset_rec(T, k - 1, A, mu, d, T.bound * (1.0 + REL_SLACK) + ABS_SLACK, r, t, w, 0.0, 0,
               tbl, T.g0[idx])
    T.tab[idx] = tbl
    return 0


cdef int _walk(int n, const long long[:, ::1] A, const double[:, ::1] mu, const double[::1] d,
               long long bound, long long lo_norm, const long long[::1] prefix, int start,
               long long[::1] hist, long long budget, bint collect, Buffer *buf,
               Tables *T, long long *nodes_out) noexcept nogil:
    # Row i of sig / isig holds the suffix sums sum_{k>=j} mu[i,k] x[k] and
    # sum_{k>=j} A[i,k] x[k] (column n is zero).  stale[i + 1] is the highest
    # coordinate changed since row i was refreshed, so each descent only
    # recomputes the entries that moved.
    cdef long long x[MAXDIM]
    cdef long long hi[MAXDIM]
    cdef long long E[MAXDIM + 1]
    cdef double P[MAXDIM + 1]
    cdef double c[MAXDIM]
    cdef bint zero[MAXDIM + 1]
    cdef int stale[MAXDIM + 1]
    cdef double inv_d[MAXDIM]
    cdef double sig[MAXDIM][MAXDIM + 1]
    cdef long long isig[MAXDIM][MAXDIM + 1]
    cdef long long S[MAXDIM]
    cdef long long xs[MAXDIM]
    cdef long long rr[MAXDIM]
    cdef long long zH[MAXDIM]
    cdef long long zz[MAXDIM]
    cdef double bf = bound * (1.0 + REL_SLACK) + ABS_SLACK
    cdef double t, r, cc, kf
    cdef long long nodes = 0, lo, h, x0, nrm, s, e0, a00, s2, idx, K, cnt, jlo, jhi
    cdef long long *tbl
    cdef int i, j, l, m, status = 0, dirty = n - 1
    cdef int ks = T.k if T != NULL else 0

    for i in range(n):
        x[i] = 0
        inv_d[i] = 1.0 / d[i]
        sig[i][n] = 0.0
        isig[i][n] = 0
        stale[i] = n - 1
    stale[n] = n - 1
    for i in range(ks):
        S[i] = 0
    for i in range(n):
        xs[i] = 0
    P[n] = 0.0
    E[n] = 0
    zero[n] = True
    for i in range(n - 1, start - 1, -1):
        x[i] = prefix[i]
    for i in range(n - 1, start - 1, -1):
        cc = 0.0
        s = 0
        for j in range(i + 1, n):
            cc -= mu[i, j] * x[j]
            s += A[i, j] * x[j]
        t = x[i] - cc
        P[i] = P[i + 1] + d[i] * t * t
        E[i] = E[i + 1] + A[i, i] * x[i] * x[i] + 2 * x[i] * s
        zero[i] = zero[i + 1] and x[i] == 0
    if start == 0:
        # the prefix is a full vector
        if not zero[0] and E[0] <= bound and E[0] >= lo_norm:
            hist[E[0]] += 1
            if collect and _push(buf, x, n) < 0:
                status = 2
        nodes_out[0] = 1
        return status

    i = start - 1
    while True:
        if i == ks - 1:
            # bottom block: add the table of the class of s = A[:k, k:] x_top
            for l in range(ks, dirty + 1):
                if x[l] != xs[l]:
                    s = x[l] - xs[l]
                    for j in range(ks):
                        S[j] += s * A[j, l]
                    xs[l] = x[l]
            dirty = ks - 1
            idx = _classify(T, S, rr, zH)
            if T.tab[idx] == NULL and _build(T, idx, rr, A, mu, d) < 0:
                status = 2
                break
            tbl = T.tab[idx]
            kf = P[ks] + T.cr[idx]
            K = llround(kf)
            if fabs(kf - K) > 1e-6:
                # exact shift: K = E_top - z A z - 2 z.r with z = V zH
                for j in range(ks):
                    zz[j] = 0
                    for m in range(ks):
                        zz[j] += T.V[j * ks + m] * zH[m]
                K = E[ks]
                for j in range(ks):
                    K -= 2 * zz[j] * rr[j]
                    for m in range(ks):
                        K -= zz[j] * A[j, m] * zz[m]
            nodes += 1
            # entries hold even g = g0 + 2j; add those with lo_norm <= K + g <= bound
            nrm = K + T.g0[idx]
            jhi = _floordiv(bound - nrm, 2)
            if jhi >= T.width:
                jhi = T.width - 1
            jlo = 0
            if lo_norm > nrm:
                jlo = _floordiv(lo_norm - nrm + 1, 2)
            if zero[ks]:
                # x_top = 0: drop the zero vector and keep one of each sign pair
                for j in range(jlo, jhi + 1):
                    cnt = tbl[j]
                    if nrm + 2 * j == 0:
                        cnt -= 1
                    hist[nrm + 2 * j] += cnt // 2
            elif lo_norm <= 1 and -ACC_LOW <= nrm <= bound:
                # defer: count visits per base norm, convolve with the table at the end
                if T.acc[idx] == NULL:
                    T.acc[idx] = <long long *> calloc(bound + 1 + ACC_LOW, sizeof(long long))
                    if T.acc[idx] == NULL:
                        status = 2
                        break
                T.acc[idx][nrm + ACC_LOW] += 1
            else:
                for j in range(jlo, jhi + 1):
                    hist[nrm + 2 * j] += tbl[j]
            if nodes > budget:
                status = 1
                break
            i = ks
            while i < start:
                x[i] += 1
                if x[i] <= hi[i]:
                    break
                i += 1
            if i >= start:
                break
            if i > dirty:
                dirty = i
            if stale[i] < i:
                stale[i] = i
            nodes += 1
            t = x[i] - c[i]
            P[i] = P[i + 1] + d[i] * t * t
            E[i] = E[i + 1] + A[i, i] * x[i] * x[i] + 2 * x[i] * isig[i][i + 1]
            zero[i] = zero[i + 1] and x[i] == 0
            i -= 1
            continue
        # entering level i: refresh row i of the partial sums
        for j in range(stale[i + 1], i, -1):
            sig[i][j] = sig[i][j + 1] + mu[i, j] * x[j]
            isig[i][j] = isig[i][j + 1] + A[i, j] * x[j]
        if stale[i + 1] > stale[i]:
            stale[i] = stale[i + 1]
        stale[i + 1] = i + 1
        cc = -sig[i][i + 1]
        c[i] = cc
        t = bf - P[i + 1]
        if t < 0.0:
            t = 0.0
        r = sqrt(t * inv_d[i]) + ABS_SLACK
        lo = <long long> ceil(cc - r)
        h = <long long> floor(cc + r)
        if zero[i + 1]:
            if i == 0:
                if lo < 1:
                    lo = 1
            elif lo < 0:
                lo = 0
        if i == 0:
            # leaf row: the norm is a quadratic in x0 with exact integer coefficients
            e0 = E[1]
            a00 = A[0, 0]
            s2 = 2 * isig[0][1]
            if h >= lo:
                nodes += h - lo + 1
            for x0 in range(lo, h + 1):
                nrm = e0 + a00 * x0 * x0 + s2 * x0
                if nrm <= bound and nrm >= lo_norm:
                    hist[nrm] += 1
                    if collect:
                        x[0] = x0
                        if _push(buf, x, n) < 0:
                            status = 2
                            break
            x[0] = 0
            if nodes > budget:
                status = 1
            if status:
                break
            # climb to the first level that still has room
            i = 1
            while i < start:
                x[i] += 1
                if x[i] <= hi[i]:
                    break
                i += 1
            if i >= start:
                break
        else:
            x[i] = lo
            hi[i] = h
            if lo > h:
                while True:
                    i += 1
                    if i >= start:
                        break
                    x[i] += 1
                    if x[i] <= hi[i]:
                        break
                if i >= start:
                    break
        # x[i] holds a fresh value at level i >= 1: rows below must refresh from i
        if i > dirty:
            dirty = i
        if stale[i] < i:
            stale[i] = i
        nodes += 1
        if nodes > budget:
            status = 1
            break
        t = x[i] - c[i]
        P[i] = P[i + 1] + d[i] * t * t
        E[i] = E[i + 1] + A[i, i] * x[i] * x[i] + 2 * x[i] * isig[i][i + 1]
        zero[i] = zero[i + 1] and x[i] == 0
        i -= 1
    nodes_out[0] = nodes
    if T != NULL and status == 0:
        _flush(T, bound, hist)
    return status


cdef void _flush(Tables *T, long long bound, long long[::1] hist) noexcept nogil:
    cdef long long idx, o, j, nrm, jhi, a
    cdef long long *tbl
    for idx in range(T.ncls):
        if T.acc[idx] == NULL:
            continue
        tbl = T.tab[idx]
        for o in range(bound + 1 + ACC_LOW):
            a = T.acc[idx][o]
            if a == 0:
                continue
            nrm = o - ACC_LOW
            jhi = _floordiv(bound - nrm, 2)
            if jhi >= T.width:
                jhi = T.width - 1
            for j in range(0, jhi + 1):
                if tbl[j]:
                    hist[nrm + 2 * j] += a * tbl[j]


def enumerate_block(long long[:, ::1] A, double[:, ::1] mu, double[::1] d, long long bound,
                    long long lo_norm, long long[::1] prefix, int start, long long[::1] hist,
                    long long budget, bint collect=False, split=None):
    """Run one enumeration task.

    Returns ``(nodes, status, vectors)``; status 0 is complete, 1 means the
    node budget ran out.  ``vectors`` is an ``(m, n)`` array when collecting.
    ``split`` is ``None`` or ``(k, H, V)`` with ``H = A[:k, :k] V`` the lower
    Hermite form; it only applies when counting, and needs an even lattice.
    """
    cdef int n = A.shape[0]
    cdef long long nodes = 0
    cdef int status, k = 0, j
    cdef Buffer buf
    cdef Tables T
    cdef Tables *Tp = NULL
    cdef long long[:, ::1] Hm
    cdef long long[:, ::1] Vm
    cdef long long[::1] radix
    if n > MAXDIM:
        raise ValueError(f"dimension {n} exceeds the compiled limit {MAXDIM}")
    if split is not None and not collect:
        k = int(split[0])
        if not 0 < k < start:
            raise ValueError("split level must lie below the prefix")
        Hm = np.ascontiguousarray(split[1], dtype=np.int64)
        Vm = np.ascontiguousarray(split[2], dtype=np.int64)
        radix = np.ones(k, dtype=np.int64)
        for j in range(1, k):
            radix[j] = radix[j - 1] * Hm[j - 1, j - 1]
        T.k = k
        T.ncls = radix[k - 1] * Hm[k - 1, k - 1]
        T.bound = bound
        T.width = bound // 2 + 4
        T.H = &Hm[0, 0]
        T.V = &Vm[0, 0]
        T.radix = &radix[0]
        T.nodes = 0
        T.tab = <long long **> calloc(T.ncls, sizeof(long long *))
        T.acc = <long long **> calloc(T.ncls, sizeof(long long *))
        T.g0 = <long long *> calloc(T.ncls, sizeof(long long))
        T.cr = <double *> calloc(T.ncls, sizeof(double))
        if T.tab == NULL or T.acc == NULL or T.g0 == NULL or T.cr == NULL:
            free(T.tab)
            free(T.acc)
            free(T.g0)
            free(T.cr)
            raise MemoryError("class tables")
        Tp = &T
    buf.data = NULL
    buf.used = 0
    buf.cap = 0
    with nogil:
        status = _walk(n, A, mu, d, bound, lo_norm, prefix, start, hist, budget,
                       collect, &buf, Tp, &nodes)
    if Tp != NULL:
        nodes += T.nodes
        for j in range(T.ncls):
            free(T.tab[j])
            free(T.acc[j])
        free(T.tab)
        free(T.acc)
        free(T.g0)
        free(T.cr)
    try:
        if status == 2:
            raise MemoryError("buffer allocation failed")
        vectors = None
        if collect:
            vectors = np.empty((buf.used // n if n else 0, n), dtype=np.int64)
            flat = vectors.reshape(-1)
            for j in range(buf.used):
                flat[j] = buf.data[j]
        return nodes, status, vectors
    finally:
        free(buf.data)
