"""Run configuration: one TOML file per benchmark run."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from helmres.errors import HelmresError
from helmres.fem.mesh import CAVITY_JITTER_DEFAULT, ScatterGeometry


@dataclass
class RunConfig:
    benchmark: str = "cavity"
    out_dir: str = "runs/out"
    seed: int = 0
    threads: int = 1

    # fem
    h: float = 1.0 / 32.0
    degree: int = 2
    jitter: float = CAVITY_JITTER_DEFAULT

    # scatter geometry
    L: float = 0.8
    L_pml: float = 0.2
    L_obstacle: float = 1.3
    l_opening: float = 0.4
    wall_t: float = 0.1
    theta: float = 0.4 * np.pi
    obstacle: str = "neumann"
    dirichlet_edge: str = "opening"

    # solver
    tol: float = 1e-6
    max_iter: int = 2000
    restart: int = 0              # 0 means full GMRES
    record: str = "snapshots"
    snapshot_every: int = 10

    # methods to run (accel combos), e.g. "plain", "csl(ilu0)",
    # "defl(all-negative)", "csl(ilu0)+defl(3,3)"
    methods: list = field(default_factory=lambda: ["plain"])
    near_k_window: float = 1.0
    csl_tau: float = 1e-3
    csl_fill: float = 10.0

    # sweep
    k_min: float = 12.5
    k_max: float = 14.0
    k_step: float = 0.01
    k_list: list = field(default_factory=list)
    error_reference: str = "series"    # cavity: "series" | "direct" | "none"

    # single / diagnose
    k: float = 3.01 * np.sqrt(2.0) * np.pi
    n_eigs: int = 30
    bounds: list = field(default_factory=list)   # [(l, m, J), ...]

    def validate(self) -> None:
        if self.benchmark not in ("cavity", "scatter"):
            raise HelmresError(f"unknown benchmark {self.benchmark!r}")
        if not (0 < self.tol < 1):
            raise HelmresError("tol must be in (0, 1)")
        if self.degree not in (1, 2, 3):
            raise HelmresError("degree must be 1, 2, or 3")
        n = 1.0 / self.h
        if self.benchmark == "cavity" and abs(n - round(n)) > 1e-9:
            raise HelmresError("cavity h must divide 1")
        if self.restart < 0:
            raise HelmresError("restart must be >= 0")
        for m in self.methods:
            parse_method(m)

    def geometry(self) -> ScatterGeometry:
        return ScatterGeometry(L=self.L, L_pml=self.L_pml,
                               L_obstacle=self.L_obstacle,
                               l_opening=self.l_opening, wall_t=self.wall_t,
                               h=self.h)

    def sweep_ks(self) -> list[float]:
        if self.k_list:
            return [float(k) for k in self.k_list]
        n = int(round((self.k_max - self.k_min) / self.k_step))
        return [self.k_min + i * self.k_step for i in range(n + 1)]


_SECTION_KEYS = {
    "fem": {"h", "degree", "jitter"},
    "geometry": {"L", "L_pml", "L_obstacle", "l_opening", "wall_t", "theta",
                 "obstacle", "dirichlet_edge"},
    "solver": {"tol", "max_iter", "restart", "record", "snapshot_every"},
    "accel": {"methods", "near_k_window", "csl_tau", "csl_fill"},
    "sweep": {"k_min", "k_max", "k_step", "k_list", "error_reference"},
    "diagnostics": {"n_eigs", "bounds", "snapshot_every"},
    "single": {"k"},
}


def load_config(path: str | Path) -> RunConfig:
    with open(path, "rb") as f:
        raw = tomllib.load(f)
    cfg = RunConfig()
    for key in ("benchmark", "out_dir", "seed", "threads"):
        if key in raw:
            setattr(cfg, key, raw[key])
    for section, keys in _SECTION_KEYS.items():
        block = raw.get(section, {})
        for k, v in block.items():
            if k not in keys:
                raise HelmresError(f"unknown key {k!r} in [{section}]")
            setattr(cfg, k, v)
    cfg.validate()
    return cfg


def parse_method(spec: str):
    """Parse a method string into (csl_mode, deflation, additive).

    Grammar: "plain", "csl(MODE)", "defl(SELECTOR)", combos joined by "+",
    all optionally wrapped as "additive:...".  SELECTOR is "all-negative",
    "near-k", or semicolon-separated "n,m" pairs.
    """
    s = spec.strip()
    additive = s.startswith("additive:")
    if additive:
        s = s[len("additive:"):]
    csl_mode = None
    deflation = None
    if s == "plain":
        return csl_mode, deflation, additive
    for part in s.split("+"):
        part = part.strip()
        if part.startswith("csl(") and part.endswith(")"):
            mode = part[4:-1]
            if mode not in ("exact", "ilu0", "ilut"):
                raise HelmresError(f"unknown CSL mode {mode!r}")
            csl_mode = mode
        elif part.startswith("defl(") and part.endswith(")"):
            sel = part[5:-1]
            if sel in ("all-negative", "near-k"):
                deflation = sel
            else:
                modes = []
                for pair in sel.split(";"):
                    n, m = pair.split(",")
                    modes.append((int(n), int(m)))
                deflation = modes
        else:
            raise HelmresError(f"cannot parse method part {part!r}")
    return csl_mode, deflation, additive
