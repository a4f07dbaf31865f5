"""Experiment config files: flat ``[section]`` blocks of ``key = value`` lines.

Values are JSON literals (numbers, ``[1, 2, 2]``) or bare words. Parsing
collects every problem before failing.
"""
from __future__ import annotations

import ast
import configparser
import json
from dataclasses import dataclass, field
from typing import Any, Optional

from .tree import GeneratingSequences, TailRule, TreeError, _validation_errors

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config"]

SECTIONS = ("tree", "physics", "numerics", "command")

NUMERICS_DEFAULTS = {
    "depth": 2,
    "h": 0.01,
    "window": [1.0, 4.0],
    "scan_step": None,
    "tol": 1e-12,
    "cap": 6000,
    "seed": 0,
}


class ConfigError(ValueError):
    def __init__(self, errors: list):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class ExperimentConfig:
    tree: GeneratingSequences
    c: float
    depth: int = 2
    h: float = 0.01
    window: tuple = (1.0, 4.0)
    scan_step: Optional[float] = None
    tol: float = 1e-12
    cap: int = 6000
    seed: int = 0
    command: dict = field(default_factory=dict)


def _unrepr(line: str) -> str:
    # some Python versions store the offending line as its repr
    try:
        out = ast.literal_eval(line)
    except (ValueError, SyntaxError):
        return line
    return out if isinstance(out, str) else line


def _value(raw: str) -> Any:
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError([f"line {exc.lineno}: expected a [section] header"]) from None
    except configparser.ParsingError as exc:
        raise ConfigError([f"line {lineno}: cannot parse {_unrepr(line).strip()!r}"
                           for lineno, line in exc.errors]) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ConfigError([f"line {exc.lineno}: {exc.message}"]) from None

    errors = []
    for sec in parser.sections():
        if sec not in SECTIONS:
            errors.append(f"unknown section [{sec}]")
    get = lambda sec, key: _value(parser[sec][key]) if parser.has_option(sec, key) else None  # noqa: E731

    # tree
    b = get("tree", "b")
    t = get("tree", "t")
    if b is None:
        errors.append("tree.b required")
    elif not (isinstance(b, list) and b and all(_is_int(x) for x in b)):
        errors.append("tree.b must be a non-empty list of integers")
        b = None
    if t is None:
        errors.append("tree.t required")
    elif not (isinstance(t, list) and t and all(_is_num(x) for x in t)):
        errors.append("tree.t must be a non-empty list of numbers")
        t = None

    tail = None
    rule = get("tree", "tail_rule")
    if rule is not None:
        b_star = get("tree", "tail_b_star")
        d = get("tree", "tail_d")
        q = get("tree", "tail_q")
        if q is None:
            q = 1.0
        tail_errors = []
        if rule not in ("arithmetic", "geometric"):
            tail_errors.append("tree.tail_rule must be 'arithmetic' or 'geometric'")
        if not (_is_int(b_star) and b_star >= 2):
            tail_errors.append("tree.tail_b_star must be an integer >= 2")
        if not (_is_num(d) and d > 0):
            tail_errors.append("tree.tail_d must be a number > 0")
        if not (_is_num(q) and q > 0):
            tail_errors.append("tree.tail_q must be a number > 0")
        errors.extend(tail_errors)
        if not tail_errors:
            tail = TailRule(b_star, rule, float(d), float(q))
    elif any(parser.has_option("tree", k) for k in ("tail_b_star", "tail_d", "tail_q")):
        errors.append("tree.tail_rule required when other tail_* keys are given")

    tree = None
    if b is not None and t is not None:
        tree_errors = _validation_errors(b, t, tail)
        errors.extend(f"tree: {e}" for e in tree_errors)
        if not tree_errors:
            tree = GeneratingSequences(tuple(b), tuple(t), tail)

    # physics
    c = get("physics", "c")
    if c is None:
        errors.append("physics.c required")
    elif not (_is_num(c) and c > 0):
        errors.append("physics.c must be a number > 0")

    # numerics
    num = dict(NUMERICS_DEFAULTS)
    if parser.has_section("numerics"):
        for key in parser["numerics"]:
            if key not in num:
                errors.append(f"unknown key numerics.{key}")
            else:
                num[key] = _value(parser["numerics"][key])
    if not (_is_int(num["depth"]) and num["depth"] >= 1):
        errors.append("numerics.depth must be an integer >= 1")
    elif tree is not None:
        try:
            tree.check_depth(num["depth"])
        except TreeError as exc:
            errors.append(f"numerics.depth: {exc}")
    if not (_is_num(num["h"]) and num["h"] > 0):
        errors.append("numerics.h must be a number > 0")
    w = num["window"]
    if not (isinstance(w, list) and len(w) == 2 and all(_is_num(x) for x in w) and w[0] < w[1]):
        errors.append("numerics.window must be [lo, hi] with lo < hi")
    if num["scan_step"] is not None and not (_is_num(num["scan_step"]) and num["scan_step"] > 0):
        errors.append("numerics.scan_step must be a number > 0")
    if not (_is_num(num["tol"]) and num["tol"] > 0):
        errors.append("numerics.tol must be a number > 0")
    if not (_is_int(num["cap"]) and num["cap"] >= 1):
        errors.append("numerics.cap must be a positive integer")
    if not (_is_int(num["seed"]) and num["seed"] >= 0):
        errors.append("numerics.seed must be a non-negative integer")

    command = {}
    if parser.has_section("command"):
        command = {k: _value(v) for k, v in parser["command"].items()}

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        tree=tree,
        c=float(c),
        depth=num["depth"],
        h=float(num["h"]),
        window=(float(w[0]), float(w[1])),
        scan_step=None if num["scan_step"] is None else float(num["scan_step"]),
        tol=float(num["tol"]),
        cap=num["cap"],
        seed=num["seed"],
        command=command,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
