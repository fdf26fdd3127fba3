"""Plain-text integer matrix format.

One row per line, entries separated by whitespace, ``#`` starts a comment.
A ``.`` is accepted as a zero entry so matrices can be pasted in the
dotted style used for sparse fusion matrices.
"""
from __future__ import annotations

import io
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence


def parse_matrix(text: str) -> list[list[int]]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([0 if tok == "." else int(tok) for tok in line.split()])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if rows and len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix: rows have different lengths")
    return rows


def format_matrix(rows: Iterable[Sequence[int]], header: Iterable[str] = ()) -> str:
    rows = [list(map(int, r)) for r in rows]
    out = io.StringIO()
    for h in header:
        out.write(f"# {h}\n")
    width = max((len(str(x)) for r in rows for x in r), default=1)
    for r in rows:
        out.write(" ".join(str(x).rjust(width) for x in r) + "\n")
    return out.getvalue()


def read_matrix(path) -> list[list[int]]:
    return parse_matrix(Path(path).read_text())


def write_matrix(path, rows, header: Iterable[str] = ()) -> None:
    Path(path).write_text(format_matrix(rows, header))


def load_data_matrix(kind: str, name: str) -> list[list[int]]:
    """Read a matrix shipped inside the package (``data/<kind>/<name>.txt``)."""
    ref = resources.files("hyperroots").joinpath("data").joinpath(kind).joinpath(f"{name}.txt")
    return parse_matrix(ref.read_text())


def shipped_names(kind: str) -> list[str]:
    folder = resources.files("hyperroots").joinpath("data").joinpath(kind)
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".txt"))
