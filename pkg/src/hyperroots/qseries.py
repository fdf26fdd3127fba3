"""Truncated integer power series for closed-form cross-checks.

Every series carries an exponent unit: ``"q"`` or ``"q2"`` (where q2 = q^2).
Lattice theta series use ``q`` with exponent equal to the norm ``x.A.x``.
Series in different units never mix silently; convert with :meth:`QSeries.to_unit`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from .errors import FractionalExponent, NotShipped

UNITS = ("q", "q2")


@dataclass(frozen=True)
class QSeries:
    """Coefficients of ``unit^0 .. unit^truncation``; higher terms are unknown."""

    coefficients: tuple
    truncation: int
    unit: str = "q"

    def __post_init__(self):
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        if self.truncation < 0:
            raise ValueError("truncation must be non-negative")
        c = [int(v) for v in self.coefficients[: self.truncation + 1]]
        c += [0] * (self.truncation + 1 - len(c))
        object.__setattr__(self, "coefficients", tuple(c))

    @classmethod
    def from_terms(cls, terms: dict, truncation: int, unit: str = "q") -> "QSeries":
        c = [0] * (truncation + 1)
        for e, v in terms.items():
            if 0 <= e <= truncation:
                c[e] += int(v)
        return cls(tuple(c), truncation, unit)

    @classmethod
    def one(cls, truncation: int, unit: str = "q") -> "QSeries":
        return cls((1,), truncation, unit)

    def __getitem__(self, e: int) -> int:
        if e > self.truncation:
            raise IndexError(f"exponent {e} beyond truncation {self.truncation}")
        return self.coefficients[e] if e >= 0 else 0

    def __len__(self):
        return self.truncation + 1

    def _check(self, other: "QSeries"):
        if not isinstance(other, QSeries):
            raise TypeError("expected a QSeries")
        if other.unit != self.unit:
            raise ValueError(f"unit mismatch: {self.unit} vs {other.unit}")

    def truncate(self, truncation: int) -> "QSeries":
        if truncation > self.truncation:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.coefficients, truncation, self.unit)

    def __add__(self, other):
        self._check(other)
        t = min(self.truncation, other.truncation)
        return QSeries(tuple(a + b for a, b in zip(self.coefficients[: t + 1], other.coefficients)), t, self.unit)

    def __neg__(self):
        return QSeries(tuple(-a for a in self.coefficients), self.truncation, self.unit)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return QSeries(tuple(other * a for a in self.coefficients), self.truncation, self.unit)
        self._check(other)
        t = min(self.truncation, other.truncation)
        a, b = self.coefficients, other.coefficients
        out = [0] * (t + 1)
        for i in range(t + 1):
            if a[i]:
                ai = a[i]
                for j in range(t + 1 - i):
                    out[i + j] += ai * b[j]
        return QSeries(tuple(out), t, self.unit)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        result = QSeries.one(self.truncation, self.unit)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def halve(self) -> "QSeries":
        """Exact division by 2; raises if any coefficient is odd."""
        if any(a % 2 for a in self.coefficients):
            raise ArithmeticError("series is not divisible by 2")
        return QSeries(tuple(a // 2 for a in self.coefficients), self.truncation, self.unit)

    def substitute(self, m: int) -> "QSeries":
        """Replace the variable by its ``m``-th power (``q -> q^m``)."""
        if m < 1:
            raise ValueError("m must be positive")
        t = m * (self.truncation + 1) - 1
        out = [0] * (t + 1)
        for e, a in enumerate(self.coefficients):
            out[m * e] = a
        return QSeries(tuple(out), t, self.unit)

    def to_unit(self, unit: str) -> "QSeries":
        """Re-express in another exponent unit (``q2 -> q`` doubles exponents)."""
        if unit == self.unit:
            return self
        if (self.unit, unit) == ("q2", "q"):
            return QSeries(self.substitute(2).coefficients, self.substitute(2).truncation, "q")
        if (self.unit, unit) == ("q", "q2"):
            if any(a for a in self.coefficients[1::2]):
                raise FractionalExponent("odd powers of q have no q2 exponent")
            return QSeries(self.coefficients[::2], self.truncation // 2, "q2")
        raise ValueError(f"unknown unit {unit!r}")

    def terms(self) -> list[tuple[int, int]]:
        return [(e, a) for e, a in enumerate(self.coefficients) if a]

    def __str__(self):
        var = "q" if self.unit == "q" else "q2"
        out = []
        for e, a in self.terms():
            mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
            if e == 0:
                body = str(abs(a))
            elif abs(a) == 1:
                body = mono
            else:
                body = f"{abs(a)} {mono}"
            if not out:
                out.append(("-" if a < 0 else "") + body)
            else:
                out.append(("- " if a < 0 else "+ ") + body)
        out.append(("+ " if out else "") + f"O({var}^{self.truncation + 1})")
        return " ".join(out)

    def to_json(self) -> dict:
        return {"unit": self.unit, "truncation": self.truncation, "coefficients": list(self.coefficients)}

    @classmethod
    def from_json(cls, d: dict) -> "QSeries":
        return cls(tuple(int(v) for v in d["coefficients"]), int(d["truncation"]), d.get("unit", "q"))


def elliptic_theta(which: int, m: int, truncation: int) -> QSeries:
    """Jacobi theta constant ``theta_which(0, q^m)`` in the unit ``q``.

    theta_3 = 1 + 2 sum q^(m n^2), theta_4 alternates signs, and
    theta_2 = 2 sum_{n>=0} q^(m (2n+1)^2 / 4), which needs ``4 | m``.
    """
    if m < 1:
        raise ValueError("m must be positive")
    c = [0] * (truncation + 1)
    if which in (3, 4):
        c[0] = 1
        n = 1
        while m * n * n <= truncation:
            c[m * n * n] += 2 * ((-1) ** n if which == 4 else 1)
            n += 1
    elif which == 2:
        if m % 4:
            raise FractionalExponent(f"theta_2(0, q^{m}) has exponents m (2n+1)^2 / 4 outside Z")
        n = 0
        while (m // 4) * (2 * n + 1) ** 2 <= truncation:
            c[(m // 4) * (2 * n + 1) ** 2] += 2
            n += 1
    else:
        raise ValueError("which must be 2, 3 or 4")
    return QSeries(tuple(c), truncation, "q")


@lru_cache(maxsize=1)
def _fixtures() -> dict:
    text = resources.files("hyperroots").joinpath("data").joinpath("series.json").read_text()
    return json.loads(text)


def reference_names(kind: str = "reference") -> list[str]:
    return sorted(_fixtures()[kind])


def reference_series(name: str, truncation: Optional[int] = None, unit: str = "q") -> QSeries:
    """Shipped closed-form fixtures: ``hexagonal``, ``b1`` .. ``b7`` and ``L1_D6plus``.

    The b-series are stored in q2 and returned in ``unit`` (q by default).
    """
    table = _fixtures()["reference"]
    if name not in table:
        raise NotShipped(name, sorted(table))
    s = QSeries.from_json(table[name]).to_unit(unit)
    return s if truncation is None else s.truncate(truncation)


def published_theta(name: str) -> QSeries:
    """Printed theta prefix of a hyper-root lattice (unit q, exponent = norm)."""
    table = _fixtures()["theta"]
    if name not in table:
        raise NotShipped(name, sorted(table))
    return QSeries.from_json(table[name]).to_unit("q")


def published_names() -> list[str]:
    return sorted(_fixtures()["theta"])


def from_counts(counts: dict, truncation: int) -> QSeries:
    """QSeries (unit q) from a ``{norm: count}`` mapping."""
    return QSeries.from_terms(counts, truncation, "q")


def combine(coeffs: Sequence[int], series: Sequence[QSeries]) -> QSeries:
    """Integer linear combination of series of one unit."""
    it = iter(zip(coeffs, series))
    c, s = next(it)
    total = c * s
    for c, s in it:
        total = total + c * s
    return total
