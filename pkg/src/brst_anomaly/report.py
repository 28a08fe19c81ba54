"""Pipelines behind the CLI commands.

Each ``run_*`` function returns ``(payload, exit_code)``; the payload is a
JSON-ready dict that embeds the resolved configuration and the fixture
provenance.  Exit codes: 0 success, 1 failed check or unexpected verdict,
2 validation error, 3 inconclusive or empty geometry.
"""
from __future__ import annotations

import csv
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .brst import build_brst_charge, build_hamiltonian, master_equation_residuals
from .config import PROVENANCE, ConfigError, RunConfig
from .graded import var
from .obstruction import default_phi_grid, quantizability_report
from .series import HbarSeries
from .star import (
    check_associativity,
    check_d1,
    check_weyl_symmetry,
    extract_dk,
    random_poly,
    star_commutator,
)
from .torus import (
    ellipse_points,
    find_resonant_tori,
    fomenko_graph,
    gradient_norms,
    resonance_line,
    sample_sigma,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICTS = ("Anomalous", "NotObstructedAtOrder1", "Inconclusive")
ARC_COLUMNS = ("s1", "s2")
TRAJECTORY_COLUMNS = ("t", "x1", "p1", "x2", "p2")


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _envelope(command: str, cfg: RunConfig) -> dict:
    return {"report_version": 1, "command": command, "config": cfg.to_dict(), "provenance": PROVENANCE}


# -- starcheck ---------------------------------------------------------------------

def run_starcheck(cfg: RunConfig) -> tuple[dict, int]:
    cfg.validate()
    scheme = cfg.star_scheme()
    N = cfg.hbar_order
    x1 = HbarSeries.from_poly(var("x1"), N)
    p1 = HbarSeries.from_poly(var("p1"), N)
    comm = star_commutator(x1, p1, scheme) - HbarSeries.hbar(N).scale(1j)
    checks = {
        "canonical_commutator": comm.max_abs(),
        "d1_identity": check_d1(cfg.d1_samples, 4, scheme, seed=cfg.seed),
        "associativity": check_associativity(cfg.assoc_samples, 3, scheme, order=N, seed=cfg.seed),
    }
    observed = {}
    if scheme.kind == "wick":
        checks["wick_left_kernel"] = float(np.abs(scheme.W @ scheme.left_kernel().T).max())
        checks["wick_rank_defect"] = float(abs(np.linalg.matrix_rank(scheme.W) - 2))
        observed["hermiticity"] = _hermiticity(scheme, cfg)
    else:
        checks["weyl_even_odd_symmetry"] = check_weyl_symmetry(20, 4, N, seed=cfg.seed)
    failed = sorted(k for k, v in checks.items() if v > cfg.zero_tol)
    payload = _envelope("starcheck", cfg)
    payload.update({"scheme": scheme.to_dict(), "residuals": checks, "observed": observed,
                    "threshold": cfg.zero_tol, "failed": failed, "passed": not failed})
    return payload, EXIT_FAIL if failed else EXIT_OK


def _hermiticity(scheme, cfg: RunConfig) -> float:
    import random

    rng = random.Random(cfg.seed)
    worst = 0.0
    for _ in range(20):
        F = random_poly(rng, 3, ghosts=False)
        G = random_poly(rng, 3, ghosts=False)
        F = F + F.conj()
        G = G + G.conj()
        for k in range(1, cfg.hbar_order + 1):
            worst = max(worst, (extract_dk(F, G, k, scheme).conj() - extract_dk(G, F, k, scheme)).max_abs())
    return worst


# -- certify -----------------------------------------------------------------------

def parse_expect(text: str | None, observables: list[str]) -> dict[str, str]:
    if not text:
        return {}
    out = {}
    for part in text.split(","):
        part = part.strip()
        if "=" in part:
            key, val = (s.strip() for s in part.split("=", 1))
            targets = [key]
        else:
            val, targets = part, observables
        if val not in VERDICTS:
            raise ConfigError(f"--expect: unknown verdict {val!r}")
        for t in targets:
            if t not in ("s1", "s2"):
                raise ConfigError(f"--expect: unknown observable {t!r}")
            out[t] = val
    return out


def certify_payload(cfg: RunConfig, observables: list[str]) -> dict:
    cfg.validate(elliptic=True)
    sys = cfg.system()
    scheme = cfg.star_scheme()
    H = build_hamiltonian(sys)
    Q = build_brst_charge(sys, cfg.hbar_order)
    master = master_equation_residuals(Q, [scheme])
    pts = sample_sigma(sys, 500, np.random.default_rng(cfg.seed))
    grads = gradient_norms(sys, pts)
    tori = find_resonant_tori(sys)
    reports = quantizability_report(
        sys, scheme, phi_grid=default_phi_grid(cfg.phi_points), degree_cap=cfg.degree_cap,
        cert_tol=cfg.cert_tol, quad_points=cfg.quad_points, steps=cfg.orbit_steps,
        observables=tuple(observables), seed=cfg.seed,
    )
    payload = _envelope("certify", cfg)
    payload.update({
        "hamiltonian": H.to_text(),
        "brst_charge": Q.classical.to_text(),
        "master_equation": master,
        "sigma_regularity": {"samples": len(pts), "min_grad_norm": float(grads.min()),
                             "max_energy_error": float(np.max(np.abs(H.evaluate_many(pts) - sys.E)))},
        "tori": [t.to_dict() for t in tori],
        "reports": {k: v.to_dict() for k, v in reports.items()},
        "verdicts": {k: v.verdict for k, v in reports.items()},
    })
    return payload


def run_certify(cfg: RunConfig, observable: str = "both", expect: str | None = None) -> tuple[dict, int]:
    observables = ["s1", "s2"] if observable == "both" else [observable]
    if any(o not in ("s1", "s2") for o in observables):
        raise ConfigError(f"--observable must be s1, s2 or both, got {observable!r}")
    wanted = parse_expect(expect, observables)
    payload = certify_payload(cfg, observables)
    verdicts = payload["verdicts"]
    if wanted:
        mismatched = {k: v for k, v in wanted.items() if verdicts.get(k) != v}
        payload["expect"] = {"wanted": wanted, "matched": not mismatched}
        return payload, EXIT_FAIL if mismatched else EXIT_OK
    if any(v == "Inconclusive" for v in verdicts.values()):
        return payload, EXIT_INCONCLUSIVE
    return payload, EXIT_OK


# -- fomenko -------------------------------------------------------------------------

def write_csv(path: Path, columns, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return path


def run_fomenko(cfg: RunConfig, integral: str = "s2", out_dir: str | Path | None = None,
                figures: bool = True) -> tuple[dict, int]:
    cfg.validate(elliptic=True)
    sys = cfg.system()
    try:
        graph = fomenko_graph(sys, integral)
    except ValueError as exc:
        if "empty physical arc" in str(exc):
            payload = _envelope("fomenko", cfg)
            payload["error"] = str(exc)
            return payload, EXIT_INCONCLUSIVE
        raise
    tori = find_resonant_tori(sys)
    payload = _envelope("fomenko", cfg)
    payload.update({"graph": graph.to_dict(), "tori": [t.to_dict() for t in tori],
                    "black_vertices": graph.count("black"), "white_vertices": graph.count("white")})
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        arc = ellipse_points(sys, cfg.samples)
        lim = float(arc.max())
        files = {"arc": write_csv(out / "arc.csv", ARC_COLUMNS, arc)}
        for which in (1, 2):
            line = resonance_line(sys, which, (0.0, lim), cfg.samples)
            files[f"omega{which}_zero"] = write_csv(out / f"omega{which}_zero.csv", ARC_COLUMNS, line)
        (out / "fomenko.json").write_text(dumps(graph.to_dict()))
        files["graph"] = out / "fomenko.json"
        if figures:
            from .plotting import render_fomenko_figure

            files["figure"] = render_fomenko_figure(sys, tori, graph, out / "fomenko.png")
        payload["files"] = {k: str(v.name) for k, v in sorted(files.items())}
    return payload, EXIT_OK


# -- scan ------------------------------------------------------------------------------

def parse_sweep(items: list[str]) -> dict[str, list]:
    from .config import _convert

    axes: dict[str, list] = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"--sweep expects key=v1,v2,..., got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key in axes:
            raise ConfigError(f"--sweep: duplicate axis {key!r}")
        axes[key] = [_convert(key, v, f"--sweep {key}") for v in raw.split(",") if v.strip()]
    return axes


def _scan_point(args):
    cfg, point, observable = args
    entry = {"point": point}
    try:
        run_cfg = replace(cfg, **point).validate(elliptic=True)
        payload = certify_payload(run_cfg, ["s1", "s2"] if observable == "both" else [observable])
        entry.update({"status": "ok", "verdicts": payload["verdicts"], "report": payload})
    except (ConfigError, ValueError) as exc:
        entry.update({"status": "error", "error": str(exc)})
    return entry


def run_scan(cfg: RunConfig, axes: dict[str, list], observable: str = "both", jobs: int = 1) -> tuple[list, int]:
    if not axes or any(len(v) == 0 for v in axes.values()):
        return [], EXIT_OK
    keys = list(axes)
    points = [dict(zip(keys, combo)) for combo in itertools.product(*(axes[k] for k in keys))]
    work = [(cfg, p, observable) for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_point, work))
    else:
        results = [_scan_point(w) for w in work]
    return results, EXIT_OK


__all__ = [
    "EXIT_FAIL",
    "EXIT_INCONCLUSIVE",
    "EXIT_INVALID",
    "EXIT_OK",
    "dumps",
    "parse_sweep",
    "run_certify",
    "run_fomenko",
    "run_scan",
    "run_starcheck",
]
