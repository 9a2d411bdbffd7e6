"""Batch front door: ingest JSON inputs, run named suites, emit reports.

Reports are deterministic: identical config and seed produce byte-identical
report.json / report.csv.  Exit codes: 0 all asserted checks pass, 1
assertion failure, 2 parse/validation error, 3 quadrature non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import hardy, measure, transfer
from .decompose import analyticity_report as measure_analyticity
from .decompose import decompose as decompose_measure
from .decompose import fm_riesz_check, restrict_spectrum, sign_scan
from .lattice import LatticeCoset
from .measure import Measure, canon, make_atom
from .order import CosetPosition, OrderChain, classify_coset, validate_axioms
from .quadrature import QuadSpec

SUITES = (
    "decompose",
    "fm-riesz",
    "jensen",
    "doob",
    "burkholder",
    "ucc",
    "transfer",
    "axioms",
    "corpus-gen",
    "analytic",
    "sign-scan",
    "pushforward",
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_PARSE = 2
EXIT_QUADRATURE = 3


class ParseFailure(Exception):
    pass


@dataclass
class SuiteConfig:
    suite: str
    out: Path
    input: Optional[Path] = None
    order: Optional[Path] = None
    nu: Optional[Path] = None
    hom: Optional[Path] = None
    grid: Optional[int] = None
    seed: int = 0
    tol: Optional[float] = None
    jobs: int = 1
    count: int = 50
    analytic: bool = False
    bound: Optional[float] = None
    p: float = 0.5

    def quad(self) -> QuadSpec:
        tol = self.tol
        if tol is None:
            env = os.environ.get("RIESZKIT_TOL")
            tol = float(env) if env else 1e-6
        return QuadSpec(rel_tol=tol, start=self.grid)


def _load_json(path: Path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"cannot read {path}: {exc}") from exc


def load_order(path: Path, window_radius: Optional[int] = None):
    """An OrderChain, or a bare predicate for deliberately broken fixtures."""
    obj = _load_json(path)
    try:
        if "broken" in obj:
            spec = obj["broken"]
            if spec.get("kind") != "halfplane":
                raise ParseFailure(f"unknown broken-order kind in {path}")
            coord, minimum = int(spec["coordinate"]), int(spec["min"])
            dim = int(obj["dim"])
            return (lambda chi: chi[coord] >= minimum), dim
        return OrderChain.from_dict(obj, window_radius=window_radius), int(obj["dim"])
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseFailure(f"invalid order file {path}: {exc}") from exc


def load_chain(path: Path) -> OrderChain:
    chain, _ = load_order(path)
    if not isinstance(chain, OrderChain):
        raise ParseFailure(f"{path} holds a broken-order fixture, not a chain")
    return chain


def load_measure(path: Path) -> Measure:
    try:
        return Measure.from_dict(_load_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseFailure(f"invalid measure file {path}: {exc}") from exc


def load_poly(path: Path) -> hardy.TrigPoly:
    try:
        return hardy.TrigPoly.from_dict(_load_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseFailure(f"invalid polynomial file {path}: {exc}") from exc


def _input_files(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(
            p for p in path.iterdir() if p.suffix == ".json" and p.name != "report.json"
        )
        if not files:
            raise ParseFailure(f"no .json inputs under {path}")
        return files
    if not path.exists():
        raise ParseFailure(f"input {path} does not exist")
    return [path]


def _map_items(items, fn: Callable, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# corpus generation

def random_measure(
    chain: OrderChain,
    rng: random.Random,
    max_atoms: int = 8,
    analytic: bool = False,
    offset_span: int = 4,
    max_denominator: int = 64,
) -> Measure:
    """Seeded corpus sampler.

    Lattices are drawn uniformly from the chain subgroups (including Z^d and
    {0}); offsets from [-span, span]^d, rejected in analytic mode unless the
    coset classifies inside P or zero; phases are p/q with q <= 64;
    coefficients are uniform on the unit disk.
    """
    lattices = chain.lattices()
    dim = chain.dim
    while True:
        atoms = []
        for _ in range(rng.randint(1, max_atoms)):
            for _attempt in range(200):
                lat = lattices[rng.randrange(len(lattices))]
                xi = tuple(rng.randint(-offset_span, offset_span) for _ in range(dim))
                if analytic:
                    pos = classify_coset(chain, LatticeCoset.of(xi, lat))
                    if pos not in (CosetPosition.INSIDE_P, CosetPosition.ZERO):
                        continue
                break
            else:
                continue
            q = rng.randint(1, max_denominator)
            phase = tuple(Fraction(rng.randrange(q), q) for _ in range(dim))
            r = math.sqrt(rng.random())
            theta = 2 * math.pi * rng.random()
            atoms.append(make_atom(lat, xi, phase, r * complex(math.cos(theta), math.sin(theta))))
        mu = canon(atoms, dim=dim)
        if not mu.is_zero():
            return mu


def _suite_corpus_gen(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("corpus-gen requires --order")
    chain = load_chain(cfg.order)
    rng = random.Random(cfg.seed)
    rows = []
    for i in range(cfg.count):
        mu = random_measure(chain, rng, analytic=cfg.analytic)
        name = f"measure_{i:03d}.json"
        payload = json.dumps(mu.to_dict(), sort_keys=True, indent=2) + "\n"
        (cfg.out / name).write_text(payload)
        rows.append({"file": name, "atoms": len(mu.atoms)})
    summary = {"generated": len(rows), "analytic": cfg.analytic, "order": str(cfg.order)}
    return EXIT_OK, summary, rows


# ---------------------------------------------------------------------------
# measure suites

def _block_inside_band(chain: OrderChain, j: int, block: Measure) -> bool:
    """Atom cosets stay inside C_j and the transform vanishes on D_j exactly."""
    from .lattice import member

    cj = chain.stage_lattice(j)
    dj = chain.stage_lattice(j + 1)
    for coset in measure.support(block):
        if not member(cj, coset.offset) or not all(member(cj, r) for r in coset.lattice.basis):
            return False
    return restrict_spectrum(block, dj).is_zero()


def _suite_decompose(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.input is None or cfg.order is None:
        raise ParseFailure("decompose requires --input and --order")
    chain = load_chain(cfg.order)

    def one(path: Path) -> dict:
        mu = load_measure(path)
        d = decompose_measure(mu, chain)
        recon = d.total().isclose(mu, 1e-12)
        bands = all(_block_inside_band(chain, j, block) for j, block in d.blocks)
        return {
            "file": path.name,
            "atoms": len(mu.atoms),
            "reconstructed": recon,
            "blocks_in_bands": bands,
            "ok": recon and bands,
        }

    rows = _map_items(_input_files(cfg.input), one, cfg.jobs)
    failures = sum(not r["ok"] for r in rows)
    summary = {"measures": len(rows), "failures": failures}
    return (EXIT_OK if failures == 0 else EXIT_FAIL), summary, rows


def _suite_fm_riesz(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.input is None or cfg.order is None:
        raise ParseFailure("fm-riesz requires --input and --order")
    chain = load_chain(cfg.order)

    def one(path: Path) -> dict:
        mu = load_measure(path)
        rep = fm_riesz_check(mu, chain, seed=cfg.seed)
        rep["file"] = path.name
        rep["ok"] = rep["pass"]
        return rep

    rows = _map_items(_input_files(cfg.input), one, cfg.jobs)
    failures = sum(not r["ok"] for r in rows)
    return (EXIT_OK if failures == 0 else EXIT_FAIL), {"measures": len(rows), "failures": failures}, rows


def _suite_analytic(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.input is None or cfg.order is None:
        raise ParseFailure("analytic requires --input and --order")
    chain = load_chain(cfg.order)

    def one(path: Path) -> dict:
        rep = measure_analyticity(load_measure(path), chain).to_dict()
        rep["file"] = path.name
        return rep

    rows = _map_items(_input_files(cfg.input), one, cfg.jobs)
    counts = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    return EXIT_OK, {"measures": len(rows), "verdicts": counts}, rows


def _suite_sign_scan(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.input is None or cfg.order is None:
        raise ParseFailure("sign-scan requires --input and --order")
    chain = load_chain(cfg.order)
    quad = cfg.quad()

    def one(path: Path) -> dict:
        mu = load_measure(path)
        scan = sign_scan(decompose_measure(mu, chain), quad)
        return {
            "file": path.name,
            "max_ratio": scan["max_ratio"],
            "argmax_signs": scan["argmax_signs"],
            "quadrature_converged": scan["quadrature_converged"],
        }

    rows = _map_items(_input_files(cfg.input), one, cfg.jobs)
    bad_quad = sum(not r["quadrature_converged"] for r in rows)
    max_ratio = max((r["max_ratio"] for r in rows), default=0.0)
    over = 0
    if cfg.bound is not None:
        over = sum(r["max_ratio"] > cfg.bound for r in rows)
    summary = {"measures": len(rows), "max_ratio": max_ratio, "quadrature_failures": bad_quad}
    if bad_quad:
        return EXIT_QUADRATURE, summary, rows
    return (EXIT_FAIL if over else EXIT_OK), summary, rows


def _suite_pushforward(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.nu is None or cfg.hom is None:
        raise ParseFailure("pushforward requires --nu and --hom")
    hom = transfer.Homomorphism.from_dict(_load_json(cfg.hom))
    nu = load_measure(cfg.nu)
    pushed = transfer.pushforward(nu, hom)
    payload = json.dumps(pushed.to_dict(), sort_keys=True, indent=2) + "\n"
    (cfg.out / "pushforward.json").write_text(payload)
    return EXIT_OK, {"atoms": len(pushed.atoms)}, [{"file": "pushforward.json"}]


def _suite_transfer(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.input is None or cfg.nu is None or cfg.hom is None:
        raise ParseFailure("transfer requires --input, --nu and --hom")
    hom = transfer.Homomorphism.from_dict(_load_json(cfg.hom))
    nu = load_measure(cfg.nu)
    corpus = [load_measure(p) for p in _input_files(cfg.input)]
    quad = cfg.quad()
    if cfg.bound is not None:
        rep = transfer.transference_report(nu, hom, corpus, bound=cfg.bound, quad=quad)
    else:
        if cfg.order is None:
            raise ParseFailure("transfer without --bound requires --order for the estimation corpus")
        chain = load_chain(cfg.order)
        rng = random.Random(cfg.seed)
        polys = [hardy.random_analytic_poly(chain, rng) for _ in range(cfg.count)]
        polys.append(hardy.TrigPoly.of({(0,) * chain.dim: 1.0}))
        rep = transfer.transference_report(nu, hom, corpus, polys=polys, chain=chain, quad=quad)
    rows = rep.pop("rows")
    if not rep["quadrature_converged"]:
        return EXIT_QUADRATURE, rep, rows
    failed = rep.get("pass") is False
    return (EXIT_FAIL if failed else EXIT_OK), rep, rows


def _suite_axioms(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("axioms requires --order")
    radius = cfg.grid or 8
    loaded, dim = load_order(cfg.order)
    report = validate_axioms(loaded, radius, dim=dim)
    row = report.to_dict()
    row["window_radius"] = radius
    return (EXIT_OK if report.passed else EXIT_FAIL), row, [row]


# ---------------------------------------------------------------------------
# polynomial suites

def _poly_corpus(cfg: SuiteConfig, chain: OrderChain) -> list[tuple[str, hardy.TrigPoly]]:
    if cfg.input is not None:
        return [(p.name, load_poly(p)) for p in _input_files(cfg.input)]
    rng = random.Random(cfg.seed)
    return [
        (f"generated_{i:03d}", hardy.random_analytic_poly(chain, rng))
        for i in range(cfg.count)
    ]


def _suite_jensen(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("jensen requires --order")
    chain = load_chain(cfg.order)
    quad = QuadSpec(rel_tol=cfg.tol or 1e-5, start=cfg.grid)

    def one(item):
        name, f = item
        rep = hardy.jensen_check(f, chain, quad)
        rep["file"] = name
        return rep

    rows = _map_items(_poly_corpus(cfg, chain), one, cfg.jobs)
    failures = sum(r["verdict"] == "fail" for r in rows)
    inconclusive = sum(r["verdict"] == "inconclusive" for r in rows)
    summary = {"polys": len(rows), "failures": failures, "inconclusive": inconclusive}
    return (EXIT_OK if failures == 0 else EXIT_FAIL), summary, rows


def _suite_doob(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("doob requires --order")
    chain = load_chain(cfg.order)
    quad = cfg.quad()

    def one(item):
        name, f = item
        rep = hardy.doob_check(f, chain, grid_n=cfg.grid, quad=quad)
        rep["file"] = name
        return rep

    rows = _map_items(_poly_corpus(cfg, chain), one, cfg.jobs)
    bad_quad = sum(not r["quadrature_converged"] for r in rows)
    failures = sum(not r["pass"] for r in rows)
    summary = {"polys": len(rows), "failures": failures, "quadrature_failures": bad_quad}
    if bad_quad:
        return EXIT_QUADRATURE, summary, rows
    return (EXIT_OK if failures == 0 else EXIT_FAIL), summary, rows


def _suite_burkholder(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("burkholder requires --order")
    chain = load_chain(cfg.order)

    def one(item):
        name, f = item
        rep = hardy.burkholder_scan(f, chain, cfg.p, grid_n=cfg.grid)
        return {"file": name, "max_ratio": rep["max_ratio"], "argmax_signs": rep["argmax_signs"]}

    rows = _map_items(_poly_corpus(cfg, chain), one, cfg.jobs)
    worst = max((r["max_ratio"] for r in rows), default=0.0)
    finite = all(math.isfinite(r["max_ratio"]) for r in rows)
    summary = {"polys": len(rows), "max_ratio": worst, "finite": finite}
    return (EXIT_OK if finite else EXIT_FAIL), summary, rows


def _suite_ucc(cfg: SuiteConfig) -> tuple[int, dict, list[dict]]:
    if cfg.order is None:
        raise ParseFailure("ucc requires --order")
    chain = load_chain(cfg.order)
    quad = cfg.quad()

    def one(item):
        name, f = item
        rep = hardy.h1_unconditionality_scan(f, chain, quad)
        return {
            "file": name,
            "max_ratio": rep["max_ratio"],
            "argmax_signs": rep["argmax_signs"],
            "quadrature_converged": rep["quadrature_converged"],
        }

    rows = _map_items(_poly_corpus(cfg, chain), one, cfg.jobs)
    bad_quad = sum(not r["quadrature_converged"] for r in rows)
    worst = max((r["max_ratio"] for r in rows), default=0.0)
    finite = all(math.isfinite(r["max_ratio"]) for r in rows)
    summary = {"polys": len(rows), "max_ratio": worst, "finite": finite, "quadrature_failures": bad_quad}
    if bad_quad:
        return EXIT_QUADRATURE, summary, rows
    return (EXIT_OK if finite else EXIT_FAIL), summary, rows


_RUNNERS = {
    "decompose": _suite_decompose,
    "fm-riesz": _suite_fm_riesz,
    "jensen": _suite_jensen,
    "doob": _suite_doob,
    "burkholder": _suite_burkholder,
    "ucc": _suite_ucc,
    "transfer": _suite_transfer,
    "axioms": _suite_axioms,
    "corpus-gen": _suite_corpus_gen,
    "analytic": _suite_analytic,
    "sign-scan": _suite_sign_scan,
    "pushforward": _suite_pushforward,
}


def _write_reports(cfg: SuiteConfig, exit_code: int, summary: dict, rows: list[dict]) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    report = {
        "suite": cfg.suite,
        "seed": cfg.seed,
        "exit_code": exit_code,
        "summary": summary,
        "rows": rows,
    }
    (cfg.out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(cfg.out / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([json.dumps(row.get(c), sort_keys=True) for c in columns])


def run(cfg: SuiteConfig) -> int:
    if cfg.suite not in _RUNNERS:
        raise ParseFailure(f"unknown suite {cfg.suite!r}")
    cfg.out.mkdir(parents=True, exist_ok=True)
    exit_code, summary, rows = _RUNNERS[cfg.suite](cfg)
    _write_reports(cfg, exit_code, summary, rows)
    return exit_code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rieszkit",
        description="verification suites for coset-atom measures on tori",
    )
    parser.add_argument("suite", choices=SUITES)
    parser.add_argument("--input", type=Path, help="measure/polynomial file or directory")
    parser.add_argument("--order", type=Path, help="order chain JSON")
    parser.add_argument("--nu", type=Path, help="convolver measure JSON")
    parser.add_argument("--hom", type=Path, help="frequency-side matrix JSON")
    parser.add_argument("--grid", type=int, help="grid size (per axis) or window radius")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", type=float, help="quadrature relative tolerance")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--count", type=int, default=50, help="generated corpus size")
    parser.add_argument("--analytic", action="store_true", help="corpus-gen: analytic measures only")
    parser.add_argument("--bound", type=float, help="asserted norm bound")
    parser.add_argument("--p", type=float, default=0.5, help="exponent for burkholder")
    parser.add_argument("--out", type=Path, required=True, help="report directory")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    cfg = SuiteConfig(
        suite=args.suite,
        out=args.out,
        input=args.input,
        order=args.order,
        nu=args.nu,
        hom=args.hom,
        grid=args.grid,
        seed=args.seed,
        tol=args.tol,
        jobs=args.jobs,
        count=args.count,
        analytic=args.analytic,
        bound=args.bound,
        p=args.p,
    )
    try:
        return run(cfg)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
