"""``hyperlattice``: batch front end for hyper-root lattices.

Exit codes: 0 success, 2 verification mismatch, 3 budget exceeded, 4 bad configuration.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import __version__, golden, lattice, ribbon
from . import enumerate as en
from .errors import BasisDegenerate, BudgetExceeded, HyperRootError, NotShipped
from .fusion import load_fusion_system, su3_names

log = logging.getLogger("hyperlattice")

EXIT_OK, EXIT_MISMATCH, EXIT_BUDGET, EXIT_CONFIG = 0, 2, 3, 4
FORMATS = ("json", "csv", "text")


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


@dataclass(frozen=True)
class RunConfig:
    system: str
    basis: str = "B1"
    max_norm: int = 16
    budget: int = en.DEFAULT_BUDGET
    fmt: str = "text"
    cache_dir: Optional[str] = None
    threads: int = 1

    def __post_init__(self):
        if self.max_norm < 0 or self.max_norm % 2:
            raise ConfigError(f"--max-norm must be a non-negative even integer, got {self.max_norm}")
        if self.budget <= 0:
            raise ConfigError("--budget must be positive")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if self.fmt not in FORMATS:
            raise ConfigError(f"--format must be one of {', '.join(FORMATS)}")

    def key(self, kind: str) -> dict:
        return {"system": self.system, "basis": self.basis, "kind": kind, "version": __version__}


# -- cache ----------------------------------------------------------------------------------


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


class Cache:
    """One JSON file per (system, basis, artifact kind), guarded by a content hash."""

    def __init__(self, directory: Optional[str]):
        self.dir = Path(directory) if directory else None

    def path(self, key: dict) -> Optional[Path]:
        if self.dir is None:
            return None
        name = f"{key['system']}_{key['basis']}_{key['kind']}.json".replace(":", "-")
        return self.dir / name

    def load(self, key: dict):
        p = self.path(key)
        if p is None or not p.exists():
            return None
        try:
            record = json.loads(p.read_text())
            body = {"config": record["config"], "payload": record["payload"]}
            if record["sha256"] != _digest(body) or record["config"] != key:
                raise ValueError("hash or config mismatch")
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("ignoring corrupt cache entry %s (%s)", p, exc)
            return None
        return record["payload"]

    def store(self, key: dict, payload) -> None:
        p = self.path(key)
        if p is None:
            return
        p.parent.mkdir(parents=True, exist_ok=True)
        body = {"config": key, "payload": payload}
        record = dict(body, sha256=_digest(body))
        tmp = p.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, sort_keys=True, indent=1) + "\n")
        os.replace(tmp, p)


def default_cache_dir() -> str:
    return os.environ.get("HYPERLATTICE_CACHE") or str(Path.home() / ".cache" / "hyperlattice")


# -- computations -------------------------------------------------------------------------------


def _gram(cfg: RunConfig) -> ribbon.GramMatrix:
    try:
        return ribbon.system_gram(cfg.system, cfg.basis)
    except NotShipped as exc:
        raise ConfigError(str(exc)) from None
    except (ValueError, BasisDegenerate) as exc:
        raise ConfigError(str(exc)) from None


def compute_gram(cfg: RunConfig, cache: Cache) -> dict:
    key = cfg.key("gram")
    hit = cache.load(key)
    if hit is not None:
        return hit
    payload = _gram(cfg).to_json(cfg.system)
    cache.store(key, payload)
    return payload


def compute_invariants(cfg: RunConfig, cache: Cache) -> dict:
    key = cfg.key("invariants")
    hit = cache.load(key)
    if hit is not None:
        return hit
    payload = lattice.invariants(_gram(cfg).rows(), cfg.system).to_json()
    cache.store(key, payload)
    return payload


def compute_theta(cfg: RunConfig, cache: Cache) -> dict:
    key = cfg.key("theta")
    hit = cache.load(key)
    if hit is not None and hit["max_norm"] >= cfg.max_norm:
        th = en.ThetaSeries.from_json(hit)
    else:
        th = en.theta_series(_gram(cfg).rows(), cfg.max_norm, budget=cfg.budget,
                             threads=cfg.threads, name=cfg.system)
        cache.store(key, th.to_json())
    coeffs = {n: c for n, c in th.coefficients.items() if n <= cfg.max_norm}
    return en.ThetaSeries(coeffs, cfg.max_norm, cfg.system).to_json()


def compute_shells(cfg: RunConfig, cache: Cache) -> dict:
    """Shell sizes split into hyper-roots and other vectors."""
    theta = compute_theta(cfg, cache)
    gram = _gram(cfg)
    roots = en.hyperroot_coordinates(gram, ribbon.system_table(cfg.system))
    A = gram.entries.astype(object)
    root_norms: dict = {}
    for v in roots:
        x = np.array(v, dtype=object)
        n = int(x @ A @ x)
        root_norms[n] = root_norms.get(n, 0) + 2
    rows = []
    for n, c in theta["coefficients"]:
        if n == 0:
            continue
        h = root_norms.get(n, 0)
        rows.append({"norm": n, "count": c, "hyperroots": h, "others": c - h})
    return {"name": cfg.system, "basis": cfg.basis, "max_norm": cfg.max_norm, "shells": rows}


# -- output ----------------------------------------------------------------------------------------


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def emit(kind: str, payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=1) + "\n"
    if kind == "gram":
        if fmt == "csv":
            return _csv(payload["gram"])
        head = f"{payload['name']} Gram matrix, basis {payload['basis']}\n"
        return head + "\n".join(" ".join(f"{v:3d}" for v in r) for r in payload["gram"]) + "\n"
    if kind == "invariants":
        items = [(k, json.dumps(v) if isinstance(v, list) else v) for k, v in payload.items()]
        if fmt == "csv":
            return _csv([("field", "value")] + items)
        return "".join(f"{k}: {v}\n" for k, v in items)
    if kind == "theta":
        if fmt == "csv":
            return _csv([("norm", "count")] + payload["coefficients"])
        return str(en.ThetaSeries.from_json(payload)) + "\n"
    if kind == "shells":
        rows = [(r["norm"], r["count"], r["hyperroots"], r["others"]) for r in payload["shells"]]
        if fmt == "csv":
            return _csv([("norm", "count", "hyperroots", "others")] + rows)
        lines = [f"{'norm':>5} {'count':>14} {'hyperroots':>11} {'others':>14}"]
        lines += [f"{a:>5} {b:>14} {c:>11} {d:>14}" for a, b, c, d in rows]
        return "\n".join(lines) + "\n"
    if kind == "list":
        cols = ["name", "k", "N", "r_E", "lattice_rank", "R"]
        rows = [[r[c] for c in cols] for r in payload]
        if fmt == "csv":
            return _csv([cols] + rows)
        lines = [" ".join(f"{c:>12}" for c in cols)]
        lines += [" ".join(f"{v:>12}" for v in r) for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(kind)


# -- commands ---------------------------------------------------------------------------------------


def common(f):
    opts = [
        click.option("--system", "-s", required=True, help="System name: A0..A6, L0..L6, D3, D6, E5, E9, E21, SU2:<graph>."),
        click.option("--basis", default="B1", show_default=True, help="Basis label B1, B2 or B3."),
        click.option("--max-norm", default=16, show_default=True, type=int, help="Largest norm (even)."),
        click.option("--budget", default=en.DEFAULT_BUDGET, show_default=True, type=int,
                     help="Enumeration node budget."),
        click.option("--threads", default=1, show_default=True, type=int, help="Enumeration threads."),
    ]
    for o in reversed(opts):
        f = o(f)
    return f


def io_options(f):
    f = click.option("--no-cache", is_flag=True, help="Neither read nor write the cache.")(f)
    f = click.option("--cache-dir", envvar="HYPERLATTICE_CACHE", default=None,
                     help="Cache directory (default $HYPERLATTICE_CACHE or ~/.cache/hyperlattice).")(f)
    f = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)(f)
    return f


def _setup(system, basis, max_norm, budget, threads, fmt, cache_dir, no_cache):
    cfg = RunConfig(system, basis, max_norm, budget, fmt, cache_dir, threads)
    cache = Cache(None if no_cache else (cache_dir or default_cache_dir()))
    return cfg, cache


@click.group()
@click.version_option(__version__)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Hyper-root lattices of SU(3) and SU(2) module categories."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@cli.command("list")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)
def cmd_list(fmt):
    """Shipped SU(3) systems with k, N, r_E, lattice rank and |R|."""
    rows = [load_fusion_system(n).summary() for n in su3_names()]
    click.echo(emit("list", rows, fmt), nl=False)


def _command(kind, compute):
    @common
    @io_options
    def run(system, basis, max_norm, budget, threads, fmt, cache_dir, no_cache):
        cfg, cache = _setup(system, basis, max_norm, budget, threads, fmt, cache_dir, no_cache)
        click.echo(emit(kind, compute(cfg, cache), fmt), nl=False)

    run.__doc__ = compute.__doc__
    return run


cli.command("gram", help="Gram matrix of the chosen basis.")(_command("gram", compute_gram))
cli.command("invariants", help="Discriminant, level, weight, dual quotient and Legendre data.")(
    _command("invariants", compute_invariants))
cli.command("theta", help="Theta series up to --max-norm.")(_command("theta", compute_theta))
cli.command("shells", help="Shell sizes up to --max-norm, split into hyper-roots and others.")(
    _command("shells", compute_shells))


@cli.command("verify")
@click.option("--scope", type=click.Choice([golden.QUICK, golden.FULL]), default=golden.QUICK, show_default=True)
@click.option("--budget", default=en.DEFAULT_BUDGET, show_default=True, type=int)
@click.option("--only", multiple=True, help="Run only the named check ids.")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text", show_default=True)
def cmd_verify(scope, budget, only, fmt):
    """Run the golden suite; exit 2 on mismatch, 3 when only budgets ran out."""
    if budget <= 0:
        raise ConfigError("--budget must be positive")
    report = (lambda o: click.echo(o.line)) if fmt == "text" else None
    outcomes = golden.run_suite(scope, budget, ids=only or None, report=report)
    if fmt == "json":
        click.echo(json.dumps([o.to_json() for o in outcomes], indent=1))
    statuses = {o.status for o in outcomes}
    n_pass = sum(o.status == "pass" for o in outcomes)
    if fmt == "text":
        click.echo(f"{n_pass}/{len(outcomes)} checks passed")
    if statuses & {"fail", "error"}:
        sys.exit(EXIT_MISMATCH)
    if "budget" in statuses:
        sys.exit(EXIT_BUDGET)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="hyperlattice", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except ConfigError as exc:
        exc.show()
        return EXIT_CONFIG
    except click.UsageError as exc:
        exc.show()
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except BudgetExceeded as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_BUDGET
    except HyperRootError as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_CONFIG
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
