"""Golden verification suite.

Each check reproduces a published value or a structural law and yields one
outcome with a short detail string.  ``quick`` checks are meant to finish in a
couple of minutes together; ``full`` adds the long enumerations.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import enumerate as en
from . import lattice, qseries, ribbon
from .errors import BudgetExceeded, HyperRootError
from .fusion import load_fusion_system, su3_names
from .matfmt import load_data_matrix

QUICK, FULL = "quick", "full"


@dataclass(frozen=True)
class Check:
    id: str
    criterion: int
    scope: str
    description: str
    run: Callable[[int], tuple]


@dataclass
class Outcome:
    check: Check
    status: str  # pass | fail | budget | error
    detail: str
    seconds: float

    @property
    def line(self) -> str:
        c = self.check
        return f"[{self.status.upper()}] criterion {c.criterion} {c.id}: {c.description} ({self.detail}; {self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"id": self.check.id, "criterion": self.check.criterion, "scope": self.check.scope,
                "status": self.status, "detail": self.detail}


def gram_rows(name: str, basis: str = "B1") -> list[list[int]]:
    return ribbon.system_gram(name, basis).rows()


# -- individual checks -----------------------------------------------------------


def _gram_equivalent(name: str):
    def run(budget):
        A = gram_rows(name)
        B = load_data_matrix("gram", name)
        w = lattice.signed_perm_equivalent(A, B)
        if w is None:
            return False, "no signed permutation"
        ok = lattice.apply_signed_perm(A, w) == [list(r) for r in B]
        return ok, "witness verified" if ok else "witness does not reproduce the matrix"
    return run


def _l1_variants(budget):
    mats = {k: load_data_matrix("gram", k) for k in ("L1", "L1p", "L1pp")}
    keys = list(mats)
    for i in range(3):
        for j in range(i + 1, 3):
            w = lattice.signed_perm_equivalent(mats[keys[i]], mats[keys[j]])
            if w is None or lattice.apply_signed_perm(mats[keys[i]], w) != mats[keys[j]]:
                return False, f"{keys[i]} vs {keys[j]} inequivalent"
    return True, "A, A', A'' pairwise equivalent"


def _det_level(name: str, det: int, level: Optional[int]):
    def run(budget):
        A = gram_rows(name)
        d = lattice.determinant(A)
        if level is None:
            return d == det, f"det {d}"
        inv = lattice.invariants(A, name)
        ok = inv.discriminant == det and inv.level == level
        return ok, f"det {inv.discriminant}, level {inv.level}"
    return run


def _dual_quotient(budget):
    A = load_data_matrix("gram", "L1")
    got = lattice.dual_quotient(A)
    half = lattice.dual_quotient([[v // 2 for v in r] for r in A])
    ok = got == [2, 4, 4, 4, 4, 8] and half == [2, 2, 2, 2, 4]
    return ok, f"A: {got}, A/2: {half}"


def _compare(got: qseries.QSeries, want: qseries.QSeries, upto: int):
    for e in range(upto + 1):
        if got[e] != want[e]:
            return False, f"q^{e}: got {got[e]}, expected {want[e]}"
    return True, f"exact to q^{upto}"


def _theta(name: str, upto: int):
    def run(budget):
        th = en.theta_series(gram_rows(name), upto, budget=budget, name=name)
        got = qseries.from_counts(th.coefficients, upto)
        return _compare(got, qseries.published_theta(name), upto)
    return run


def _theta_l0(budget):
    want = qseries.reference_series("hexagonal").substitute(3)
    upto = want.truncation
    th = en.theta_series(gram_rows("L0"), upto, budget=budget)
    return _compare(qseries.from_counts(th.coefficients, upto), want, upto)


def _l1_closed_forms(budget):
    T = qseries.reference_series("L1_D6plus").truncation
    jac = (qseries.elliptic_theta(2, 4, T) ** 6 + qseries.elliptic_theta(3, 4, T) ** 6
           + qseries.elliptic_theta(4, 4, T) ** 6).halve()
    b = {k: qseries.reference_series(f"b{k}", unit="q2") for k in (1, 4, 5)}
    comb = qseries.combine([1, 32, 60], [b[1], b[4], b[5]]).to_unit("q")
    upto = max(T, comb.truncation)
    th = en.theta_series(gram_rows("L1"), upto, budget=budget)
    got = qseries.from_counts(th.coefficients, upto)
    ok1, d1 = _compare(got, jac, T)
    ok2, d2 = _compare(got, comb, comb.truncation)
    return ok1 and ok2, f"theta functions {d1}; b-combination {d2}"


def _structural(name: str):
    def run(budget):
        table = ribbon.system_table(name)
        system = table.system
        points = ribbon.enumerate_ribbon(table)
        if 3 * len(points) != system.rank * system.N ** 2:
            return False, f"|R_v| = {len(points)}"
        gram = ribbon.system_gram(name)
        X = ribbon.express_all(gram, table, points)
        norms = np.einsum("ij,jk,ik->i", X.astype(object), gram.entries.astype(object), X.astype(object))
        if set(int(v) for v in norms) != {6}:
            return False, f"hyper-root norms {sorted(set(int(v) for v in norms))}"
        if not lattice.is_positive_definite(gram.rows()):
            return False, "Gram not positive definite"
        rk = ribbon.certified_rank(table, points, gram.basis)
        if rk != 2 * system.rank:
            return False, f"all-pairs rank {rk}"
        return True, f"|R_v|={len(points)}, rank {rk}, norms 6, PD"
    return run


def _b1_b3(name: str, upto: int):
    def run(budget):
        t1 = en.theta_series(gram_rows(name, "B1"), upto, budget=budget)
        t3 = en.theta_series(gram_rows(name, "B3"), upto, budget=budget)
        ok = t1.coefficients == t3.coefficients
        return ok, f"agree to q^{upto}" if ok else f"B1 {t1} vs B3 {t3}"
    return run


def _kissing_ak(name: str):
    def run(budget):
        gram = ribbon.system_gram(name)
        table = ribbon.system_table(name)
        kd = en.kissing_data(gram.rows(), table, gram.basis, budget=budget)
        R = table.system.root_count
        ok = kd["kissing_number"] == R and kd["min_vectors_are_hyperroots"]
        return ok, f"kissing {kd['kissing_number']} vs |R| {R}, min shell = hyper-roots: {kd['min_vectors_are_hyperroots']}"
    return run


def _kissing_d3(budget):
    gram = ribbon.system_gram("D3")
    kd = en.kissing_data(gram.rows(), ribbon.system_table("D3"), gram.basis, budget=budget)
    ok = kd["kissing_number"] == 36 and kd["span_dim_of_min_shell"] == 6
    return ok, f"kissing {kd['kissing_number']}, span {kd['span_dim_of_min_shell']}"


def _kissing_e21(budget):
    A = gram_rows("E21")
    m = en.minimal_norm(A, budget=budget)
    k = en.theta_series(A, m, budget=budget)[m]
    return k == 144 and m == 4, f"min norm {m}, kissing {k}"


def _e9_shell(budget):
    gram = ribbon.system_gram("E9")
    sh = en.shell(gram.rows(), 4, budget=budget)
    roots = en.hyperroot_coordinates(gram, ribbon.system_table("E9"))
    common = {tuple(v) for v in sh.vectors.tolist()} & roots
    ok = sh.count_with_signs == 756 and not common
    return ok, f"norm-4 shell {sh.count_with_signs}, shared with hyper-roots {2 * len(common)}"


def _harmonic(name: str):
    def run(budget):
        table = ribbon.system_table(name)
        pts = ribbon.enumerate_ribbon(table)
        bad = [p for p in pts for s in (1, -1) if not ribbon.check_harmonicity(table, ribbon.root_field(table, p, s))]
        return not bad, f"{2 * len(pts)} root fields harmonic" if not bad else f"{len(bad)} failures, first {bad[0]}"
    return run


def _projection(name: str, sample: Optional[int]):
    def run(budget):
        table = ribbon.system_table(name)
        gram = ribbon.system_gram(name)
        pts = ribbon.enumerate_ribbon(table)
        if sample is not None:
            pts = random.Random(7).sample(pts, sample)
        N2 = table.N ** 2
        for p in pts:
            proj = [N2 * c for c in ribbon.project_dirac(gram, table, p)]
            if proj != ribbon.express_in_basis(gram, table, p):
                return False, f"mismatch at {p}"
        return True, f"{len(pts)} points"
    return run


def _su2(name: str, roots: int, det: int):
    def run(budget):
        table = ribbon.system_table(f"SU2:{name}")
        gram = ribbon.system_gram(f"SU2:{name}")
        pts = ribbon.enumerate_ribbon(table)
        X = ribbon.express_all(gram, table, pts)
        norms = {int(v) for v in np.einsum("ij,jk,ik->i", X, gram.entries, X)}
        d = lattice.determinant(gram.rows())
        ok = (len(pts) == roots and norms == {2} and lattice.is_positive_definite(gram.rows()) and d == det)
        return ok, f"{len(pts)} roots, norms {sorted(norms)}, det {d}"
    return run


def _oracle(name: str, upto: int):
    def run(budget):
        A = gram_rows(name)
        fp = en.theta_series(A, upto, budget=budget).coefficients
        naive = en.naive_theta(A, upto)
        return fp == naive, f"agree to norm {upto}" if fp == naive else f"{fp} vs {naive}"
    return run


# -- registry ---------------------------------------------------------------------------


def _registry() -> list[Check]:
    C = []
    add = lambda *a: C.append(Check(*a))  # noqa: E731
    for name in ("L1", "L2", "L3", "D3", "D6", "E5", "E9", "E21"):
        add(f"gram-{name}", 1, QUICK, f"{name} B1 Gram equals the shipped matrix up to signed permutation",
            _gram_equivalent(name))
    add("gram-L1-variants", 1, QUICK, "three L1 Gram matrices pairwise equivalent", _l1_variants)
    for name, det, level in [("L0", 27, None), ("L1", 4096, 16), ("L2", 5 ** 9, 25), ("L3", 6 ** 12, 18),
                             ("L4", 7 ** 15, 49), ("D3", 3 ** 12, 18), ("D6", 3 ** 18, 54),
                             ("E5", 2 ** 30, 16), ("E9", 2 ** 24, 16), ("E21", 3 ** 12, 6)]:
        add(f"det-{name}", 2, QUICK, f"{name} det {det}" + (f", level {level}" if level else ""),
            _det_level(name, det, level))
    add("dual-L1", 3, QUICK, "L1 dual quotient Z2 x Z4^4 x Z8, halved Z2^4 x Z4", _dual_quotient)
    add("theta-L0", 4, QUICK, "L0 theta equals hexagonal series with q -> q^3", _theta_l0)
    for name, upto, scope in THETA_TARGETS:
        add(f"theta-{name}-q{upto}", 4, scope, f"{name} theta to q^{upto}", _theta(name, upto))
    add("closed-forms-L1", 5, QUICK, "L1 theta equals the theta-function and b-series identities", _l1_closed_forms)
    for name in su3_names():
        add(f"laws-{name}", 6, QUICK, f"{name} structural laws", _structural(name))
    for name, upto, scope in B1B3_TARGETS:
        add(f"b1b3-{name}" + (f"-q{upto}" if name == "E21" else ""), 6, scope, f"{name} B1 and B3 theta agree to q^{upto}", _b1_b3(name, upto))
    for k in range(7):
        add(f"kissing-A{k}", 6, QUICK if k <= 5 else FULL,
            f"A{k} kissing number equals |R| with minimal shell = hyper-roots", _kissing_ak(f"A{k}"))
    add("kissing-D3", 6, QUICK, "D3 kissing 36 spanning 6 dimensions", _kissing_d3)
    add("kissing-E21", 6, QUICK, "E21 kissing 144", _kissing_e21)
    add("shell4-E9", 6, QUICK, "E9 norm-4 shell has 756 vectors, none a hyper-root", _e9_shell)
    for name in ("A1", "A2", "D3"):
        add(f"harmonic-{name}", 7, QUICK, f"every {name} root field is harmonic", _harmonic(name))
    add("dirac-A1", 7, QUICK, "N^2 x projected Dirac = hyper-root, all A1 points", _projection("A1", None))
    add("dirac-A2", 7, QUICK, "N^2 x projected Dirac = hyper-root, 10 A2 points", _projection("A2", 10))
    add("su2-A4", 8, QUICK, "SU(2) A4: 20 roots of norm 2, det 5", _su2("A4", 20, 5))
    add("su2-E6", 8, QUICK, "SU(2) E6: 72 roots of norm 2, det 3", _su2("E6", 72, 3))
    for name in ("L0", "L1"):
        add(f"oracle-{name}", 9, QUICK, f"{name} Fincke-Pohst equals box enumeration to norm 12",
            _oracle(name, 12))
    return C


# (name, q-exponent, scope); the partition follows measured single-core runtimes
THETA_TARGETS = [
    ("L1", 46, QUICK), ("L2", 96, QUICK), ("L3", 24, QUICK), ("L3", 60, FULL), ("L4", 30, FULL),
    ("L5", 16, FULL), ("L6", 12, FULL), ("D3", 20, QUICK), ("D6", 12, QUICK), ("D6", 20, FULL),
    ("E5", 20, QUICK), ("E9", 20, QUICK), ("E21", 6, QUICK), ("E21", 8, FULL),
]
B1B3_TARGETS = [(n, 12, QUICK) for n in ("A0", "A1", "A2", "A3", "A4", "A5", "D3", "D6", "E5", "E9")] + [
    ("A6", 12, FULL), ("E21", 6, FULL), ("E21", 12, FULL)]

CHECKS = _registry()


def select(scope: str = QUICK, ids: Optional[Iterable[str]] = None) -> list[Check]:
    if scope not in (QUICK, FULL):
        raise ValueError("scope must be quick or full")
    chosen = [c for c in CHECKS if scope == FULL or c.scope == QUICK]
    if ids is not None:
        want = set(ids)
        chosen = [c for c in chosen if c.id in want]
    return chosen


def run_check(check: Check, budget: int = en.DEFAULT_BUDGET) -> Outcome:
    t = time.perf_counter()
    try:
        ok, detail = check.run(budget)
        status = "pass" if ok else "fail"
    except BudgetExceeded as exc:
        status, detail = "budget", str(exc)
    except HyperRootError as exc:
        status, detail = "error", f"{type(exc).__name__}: {exc}"
    return Outcome(check, status, detail, time.perf_counter() - t)


def run_suite(scope: str = QUICK, budget: int = en.DEFAULT_BUDGET, ids=None, report=None) -> list[Outcome]:
    out = []
    for c in select(scope, ids):
        o = run_check(c, budget)
        if report:
            report(o)
        out.append(o)
    return out
