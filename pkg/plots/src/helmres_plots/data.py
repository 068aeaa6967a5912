"""Readers for the benchmark CLI's artifact formats.

Each loader returns plain lists/dicts of floats, exactly as stored; a
malformed record raises with the offending line number.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path


class ParseError(ValueError):
    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.path = str(path)
        self.line = line


def _read_csv(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        raise ParseError(path, 0, "empty file")
    return rows[0], rows[1:]


def _float(path, lineno, field, value):
    try:
        return float(value)
    except ValueError as e:
        raise ParseError(path, lineno, f"bad {field}: {value!r}") from e


def load_summary(path: str | Path) -> list[dict]:
    header, rows = _read_csv(path)
    idx = {name: i for i, name in enumerate(header)}
    for needed in ("k", "method", "iterations"):
        if needed not in idx:
            raise ParseError(path, 1, f"missing column {needed!r}")
    out = []
    for n, row in enumerate(rows, start=2):
        rec = {"method": row[idx["method"]]}
        for col in ("k", "iterations", "relres", "l2_error"):
            if col in idx and row[idx[col]] != "":
                rec[col] = _float(path, n, col, row[idx[col]])
        out.append(rec)
    return out


def load_trace(path: str | Path) -> dict:
    header, rows = _read_csv(path)
    if header[:2] != ["iter", "relres"]:
        raise ParseError(path, 1, "expected iter,relres[,restart_flag]")
    iters, relres, restarts = [], [], []
    for n, row in enumerate(rows, start=2):
        iters.append(int(_float(path, n, "iter", row[0])))
        relres.append(_float(path, n, "relres", row[1]))
        if len(row) > 2 and row[2] == "1":
            restarts.append(iters[-1])
    return {"iter": iters, "relres": relres, "restarts": restarts}


def load_hr(path: str | Path) -> list[dict]:
    header, rows = _read_csv(path)
    if header[:3] != ["iter", "re", "im"]:
        raise ParseError(path, 1, "expected iter,re,im,matched_eig_id,dist")
    out = []
    for n, row in enumerate(rows, start=2):
        out.append({
            "iter": int(_float(path, n, "iter", row[0])),
            "re": _float(path, n, "re", row[1]),
            "im": _float(path, n, "im", row[2]),
            "matched": int(row[3]) if len(row) > 3 and row[3] != "" else -1,
        })
    return out


def load_eigs(path: str | Path) -> list[dict]:
    header, rows = _read_csv(path)
    if header != ["id", "re", "im"]:
        raise ParseError(path, 1, "expected id,re,im")
    return [{"id": int(r[0]),
             "re": _float(path, n, "re", r[1]),
             "im": _float(path, n, "im", r[2])}
            for n, r in enumerate(rows, start=2)]


def load_bounds(path: str | Path) -> dict:
    with open(path) as f:
        return json.load(f)


def load_grid(path: str | Path) -> dict:
    header, rows = _read_csv(path)
    if header != ["re", "im", "smin"]:
        raise ParseError(path, 1, "expected re,im,smin")
    res, ims, smins = [], [], []
    for n, row in enumerate(rows, start=2):
        res.append(_float(path, n, "re", row[0]))
        ims.append(_float(path, n, "im", row[1]))
        smins.append(_float(path, n, "smin", row[2]))
    return {"re": res, "im": ims, "smin": smins}
