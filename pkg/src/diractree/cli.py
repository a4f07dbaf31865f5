"""Command-line front end.

    diractree COMMAND CONFIG [--out DIR]

Commands: describe, spectrum, decompose-verify, weyl, fw-check. Without
``--out`` the report goes to stdout. Exit codes: 0 pass, 1 check failed,
2 config error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.linalg

from . import decomposition, discretize, fw_transform, halfline, spectra
from .config import ConfigError, ExperimentConfig, load_config
from .tree import TreeError, describe, truncate

__all__ = ["COMMANDS", "run", "main", "format_float"]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3

SPECTRUM_HEADER = "eigenvalue,multiplicity,source,residual"
WEYL_HEADER = "m,edge_length,residual,target_energy"


def format_float(x: float) -> str:
    return format(float(x), ".15g")


def _round(obj):
    """Floats to 15 significant digits; non-finite values become ``None``."""
    if isinstance(obj, float):
        return float(format_float(obj)) if math.isfinite(obj) else None
    if isinstance(obj, (np.floating,)):
        return _round(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _json(payload: dict) -> str:
    return json.dumps(_round(payload), sort_keys=True, indent=2) + "\n"


def _csv(header: str, rows: list) -> str:
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    return buf.getvalue()


def _describe(cfg: ExperimentConfig):
    summary = describe(cfg.tree, cfg.depth, cfg.tol)
    return EXIT_OK, {"describe.json": _json(summary.to_dict())}


def _cluster(values: np.ndarray, residuals: np.ndarray, rtol: float = 1e-9) -> list:
    groups = []
    for lam, res in zip(values, residuals):
        if groups and abs(lam - groups[-1][0]) <= rtol * max(1.0, abs(lam)):
            g = groups[-1]
            groups[-1] = (g[0], g[1] + 1, max(g[2], res))
        else:
            groups.append((lam, 1, res))
    return groups


def _spectrum(cfg: ExperimentConfig):
    target = str(cfg.command.get("target", "full"))
    lo, hi = cfg.window
    rows = []
    if target == "full":
        op = discretize.assemble_tree_operator(truncate(cfg.tree, cfg.depth), cfg.c, cfg.h)
        if op.dimension > cfg.cap:
            raise discretize.DimensionCapError(f"dimension {op.dimension} exceeds cap {cfg.cap}")
        w, V = scipy.linalg.eigh(op.matrix, subset_by_value=(lo, hi))
        res = np.linalg.norm(op.matrix @ V - V * w, axis=0) if w.size else np.zeros(0)
        for lam, mult, r in _cluster(w, res):
            rows.append((float(lam), mult, "full-tree", float(r)))
    elif target == "predicted":
        result = decomposition.predicted_spectrum(cfg.tree, cfg.c, cfg.depth, cfg.window, cfg.scan_step, cfg.tol)
        rows = [(e.eigenvalue, e.multiplicity, e.source, e.residual) for e in result.entries]
    elif target.startswith("M") and target[1:].lstrip("_").isdigit():
        k = int(target[1:].lstrip("_"))
        spec = halfline.HalflineSpec.from_tree(cfg.tree, k, cfg.depth, cfg.c)
        r = decomposition.multiplicity(cfg.tree, k)
        for lam in halfline.eigenvalues(spec, cfg.window, cfg.scan_step, cfg.tol):
            rows.append((float(lam), r, f"M_{k}", abs(halfline.secular(spec, lam))))
    else:
        raise ConfigError([f"command.target must be full, predicted or M<k>, got {target!r}"])
    return EXIT_OK, {"spectrum.csv": _csv(SPECTRUM_HEADER, rows)}


def _decompose_verify(cfg: ExperimentConfig):
    tol_match = cfg.command.get("tol_match")
    report = decomposition.verify_decomposition(
        cfg.tree, cfg.c, cfg.depth, cfg.h, cfg.window,
        tol_match=None if tol_match is None else float(tol_match),
        scan_step=cfg.scan_step, tol=cfg.tol, cap=cfg.cap,
    )
    payload = {"pass": report.passed, "tol_match": report.tol_match, "pairs": report.pairs,
               "unmatched_full": report.unmatched_full, "unmatched_predicted": report.unmatched_predicted,
               "max_distance": report.max_distance, "calibrated_error": report.calibrated_error,
               "full_count": report.full_count, "predicted_count": report.predicted_count}
    return (EXIT_OK if report.passed else EXIT_FAIL), {"decompose_verify.json": _json(payload)}


def _weyl(cfg: ExperimentConfig):
    tail = cfg.tree.tail
    if tail is None or not tail.unbounded_edges:
        raise TreeError("essential-spectrum precondition sup|e|=inf not met: the tree needs a geometric tail with q > 1")
    m_min = int(cfg.command.get("m_min", 4))
    m_max = int(cfg.command.get("m_max", 9))
    r = float(cfg.command.get("r", 1.0))
    rows = []
    for m in range(m_min, m_max + 1):
        out = spectra.weyl_residual_dirac(m, r, cfg.c, edge_length=cfg.tree.edge_length(m))
        rows.append((m, out["edge_length"], out["residual"], out["target_energy"]))
    res = [row[2] for row in rows]
    decreasing = all(b < a for a, b in zip(res, res[1:]))
    return (EXIT_OK if decreasing else EXIT_FAIL), {"weyl.csv": _csv(WEYL_HEADER, rows)}


def _fw_check(cfg: ExperimentConfig):
    n = int(cfg.command.get("n", 256))
    length = float(cfg.command.get("length", 2 * math.pi))
    samples = int(cfg.command.get("samples", 20))
    c_values = cfg.command.get("c_values", [cfg.c])
    grid = fw_transform.FourierGrid(n, length)
    rng = np.random.default_rng(cfg.seed)
    reports = []
    for c in c_values:
        for _ in range(samples):
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            reports.append(fw_transform.verify_form_identity(u, float(c), grid).to_dict())
    passed = all(r["pass"] for r in reports)
    payload = {
        "pass": passed,
        "n": n,
        "length": length,
        "seed": cfg.seed,
        "max_norm_error": max(r["norm_error"] for r in reports),
        "max_form_error": max(r["form_error"] for r in reports),
        "max_mode_error": max(r["mode_error"] for r in reports),
        "samples": reports,
    }
    return (EXIT_OK if passed else EXIT_FAIL), {"fw_check.json": _json(payload)}


COMMANDS = {
    "describe": _describe,
    "spectrum": _spectrum,
    "decompose-verify": _decompose_verify,
    "weyl": _weyl,
    "fw-check": _fw_check,
}


def _error(kind: str, messages: list) -> dict:
    return {"error.json": _json({"error": kind, "messages": list(messages)})}


def run(command: str, cfg: ExperimentConfig) -> tuple:
    """Run one command; returns ``(exit_code, {filename: text})``."""
    if command not in COMMANDS:
        return EXIT_CONFIG, _error("config", [f"unknown command {command!r}"])
    try:
        return COMMANDS[command](cfg)
    except ConfigError as exc:
        return EXIT_CONFIG, _error("config", exc.errors)
    except discretize.DimensionCapError as exc:
        return EXIT_CAP, _error("resource_cap", [str(exc)])
    except (TreeError, ValueError) as exc:
        return EXIT_CONFIG, _error("precondition", [str(exc)])


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(prog="diractree", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("config", type=Path)
    parser.add_argument("--out", type=Path, default=None, help="directory for report files")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        code, files = EXIT_CONFIG, _error("config", exc.errors)
    except OSError as exc:
        code, files = EXIT_CONFIG, _error("config", [str(exc)])
    else:
        code, files = run(args.command, cfg)

    if args.out is None:
        stream = sys.stderr if "error.json" in files else sys.stdout
        for text in files.values():
            stream.write(text)
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            with open(args.out / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
