"""Scenario files: a flat, sectioned ``key = value`` format.

Grammar (``#`` starts a comment, blank lines are ignored)::

    [family]
    name = lamplighter | bs | free_wreath
    m = 2            # lamplighter modulus
    r = 1            # top rank (lamplighter, free_wreath)
    k = 2            # bs multiplier

    [schedule]
    steps = 1..10    # inclusive range, or a comma list such as 1, 2, 5
    lattice = scale  # scale (P = nZ^r) | identity | rows with {n}, e.g. "{n} 0; 0 1"
    ideal = t^{n}+1  # optional; lamplighter C_m wr Z only, {n} is the step value

    [run]
    seed = 0
    out = out.csv
    jobs = 1
    checks = exp, subexp   # any of exp, MA, subexp
    tail_fraction = 0.3
    threshold = 0.05

Every error is reported with the file name, line number and field.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .groupring import Sublattice, parse
from .intlinalg import IntMatrix
from .metabelian import (
    SplitMetabelianGroup,
    StandardSubgroup,
    family_bs_module,
    family_free_wreath,
    family_lamplighter,
    subgroup_from_ideal,
    subgroup_from_lattice,
)

SECTIONS = {
    "family": {"name", "m", "r", "k"},
    "schedule": {"steps", "lattice", "ideal"},
    "run": {"seed", "out", "jobs", "checks", "tail_fraction", "threshold"},
}
CHECKS = {"exp", "MA", "subexp"}


class ConfigError(ValueError):
    def __init__(self, path, line, field, message):
        self.path, self.line, self.field = path, line, field
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: [{field}] {message}")


@dataclass
class Scenario:
    family: str
    params: dict
    steps: list[int]
    lattice: str = "scale"
    ideal: str | None = None
    seed: int = 0
    out: str | None = None
    jobs: int = 1
    checks: list[str] = field(default_factory=list)
    tail_fraction: float = 0.3
    threshold: float = 0.05
    path: str = "<scenario>"
    lines: dict = field(default_factory=dict, repr=False)

    def error(self, key, message):
        return ConfigError(self.path, self.lines.get(key, 0), key, message)

    def group(self) -> SplitMetabelianGroup:
        p = self.params
        try:
            if self.family == "lamplighter":
                return family_lamplighter(p.get("m", 2), p.get("r", 1))
            if self.family == "bs":
                return family_bs_module(p.get("k", 2))
            if self.family == "free_wreath":
                return family_free_wreath(p.get("r", 1))
        except ValueError as exc:
            raise self.error("family.name", str(exc)) from None
        raise self.error("family.name", f"unknown family {self.family!r}")

    def lattice_for(self, n: int, r: int) -> Sublattice:
        spec = self.lattice.strip()
        try:
            if spec == "scale":
                return Sublattice.scaled(n, r)
            if spec == "identity":
                return Sublattice.full(r)
            rows = [[int(x) for x in row.replace("{n}", str(n)).split()] for row in spec.split(";")]
            return Sublattice(IntMatrix.from_rows(rows))
        except ValueError as exc:
            raise self.error("schedule.lattice", f"step {n}: {exc}") from None

    def subgroup(self, G: SplitMetabelianGroup, n: int) -> StandardSubgroup:
        P = self.lattice_for(n, G.r)
        if P.rank != G.r:
            raise self.error("schedule.lattice", f"lattice rank {P.rank} but group top rank {G.r}")
        if self.ideal is None:
            return subgroup_from_lattice(G, P)
        try:
            f = parse(self.ideal.replace("{n}", str(n)), 1)
            return subgroup_from_ideal(G, f, P)
        except ValueError as exc:
            raise self.error("schedule.ideal", f"step {n}: {exc}") from None

    def schedule(self, G: SplitMetabelianGroup) -> list[StandardSubgroup]:
        return [self.subgroup(G, n) for n in self.steps]


def _parse_steps(value: str) -> list[int]:
    value = value.strip()
    if ".." in value:
        lo, hi = value.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {value}")
        return list(range(lo, hi + 1))
    steps = [int(x) for x in value.split(",") if x.strip()]
    if not steps:
        raise ValueError("no steps")
    return steps


def parse_scenario(text: str, path: str = "<scenario>") -> Scenario:
    section = None
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(path, lineno, line, "unterminated section header")
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ConfigError(path, lineno, section, f"unknown section; expected one of {sorted(SECTIONS)}")
            continue
        if "=" not in line:
            raise ConfigError(path, lineno, section or "-", f"expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(path, lineno, line.split("=")[0].strip(), "key outside of any section")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SECTIONS[section]:
            raise ConfigError(path, lineno, f"{section}.{key}", "unknown key")
        full = f"{section}.{key}"
        if full in raw:
            raise ConfigError(path, lineno, full, f"duplicate key (first set on line {raw[full][1]})")
        raw[full] = (value, lineno)

    def get(key, conv, default=None, required=False):
        if key not in raw:
            if required:
                raise ConfigError(path, 0, key, "missing required key")
            return default
        value, lineno = raw[key]
        try:
            return conv(value)
        except ValueError as exc:
            raise ConfigError(path, lineno, key, f"bad value {value!r}: {exc}") from None

    def checks(value):
        names = [c.strip() for c in value.split(",") if c.strip()]
        bad = [c for c in names if c not in CHECKS]
        if bad:
            raise ValueError(f"unknown checks {bad}; expected any of {sorted(CHECKS)}")
        return names

    def count(value):
        v = int(value)
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    params = {}
    for k in ("m", "r", "k"):
        v = get(f"family.{k}", int)
        if v is not None:
            params[k] = v
    sc = Scenario(
        family=get("family.name", str, required=True),
        params=params,
        steps=get("schedule.steps", _parse_steps, required=True),
        lattice=get("schedule.lattice", str, "scale"),
        ideal=get("schedule.ideal", str),
        seed=get("run.seed", int, 0),
        out=get("run.out", str),
        jobs=get("run.jobs", count, 1),
        checks=get("run.checks", checks, []),
        tail_fraction=get("run.tail_fraction", float, 0.3),
        threshold=get("run.threshold", float, 0.05),
        path=path,
        lines={k: v[1] for k, v in raw.items()},
    )
    # validate family parameters and the whole schedule up front
    G = sc.group()
    sc.schedule(G)
    return sc


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(path, 0, "-", f"cannot read scenario: {exc.strerror}") from None
    return parse_scenario(text, str(path))
