"""Line-oriented distance-table and map files.

Distance table::

    # comment
    points: 1 2 3
    norm: max              # optional: max | sum | euclidean
    d 1 2 80 0             # d <i> <j> <v1> [v2 ...]; one of (i, j) / (j, i) suffices
    eta 1 2 4              # eta <i> <j> <s>; missing entries default to 1

Map file (finite domains)::

    map 1 2                # T(1) = 2
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .cone import NORMS, ConeSpace
from .errors import TableFormatError
from .space import EtaConeSpace


@dataclass
class TableData:
    labels: List[str]
    d: np.ndarray
    eta: np.ndarray
    norm: str = "max"

    def to_space(self, name: str = "") -> EtaConeSpace:
        cone = ConeSpace.orthant(self.d.shape[2], self.norm)
        return EtaConeSpace.from_tables(self.labels, self.d, self.eta, cone, name)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _number(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise TableFormatError(f"not a number: {tok!r}", lineno) from None
    if not math.isfinite(v):
        raise TableFormatError(f"non-finite value {tok!r}", lineno)
    return v


def parse_table(text: str) -> TableData:
    labels: Optional[List[str]] = None
    index: Dict[str, int] = {}
    norm = "max"
    d_entries: Dict[tuple, List[float]] = {}
    eta_entries: Dict[tuple, float] = {}
    dim = None

    def lookup(tok, lineno):
        if tok not in index:
            raise TableFormatError(f"unknown point {tok!r}", lineno)
        return index[tok]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("points:"):
            if labels is not None:
                raise TableFormatError("duplicate points header", lineno)
            labels = line[len("points:"):].split()
            if not labels:
                raise TableFormatError("points header lists no points", lineno)
            if len(set(labels)) != len(labels):
                raise TableFormatError("duplicate point labels", lineno)
            index = {p: i for i, p in enumerate(labels)}
            continue
        if line.startswith("norm:"):
            norm = line[len("norm:"):].strip()
            if norm not in NORMS:
                raise TableFormatError(f"unknown norm {norm!r}", lineno)
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind not in ("d", "eta"):
            raise TableFormatError(f"unrecognised entry {kind!r}", lineno)
        if labels is None:
            raise TableFormatError("entry before the points header", lineno)
        if len(tokens) < 4:
            raise TableFormatError(f"{kind} entry needs two points and a value", lineno)
        i, j = lookup(tokens[1], lineno), lookup(tokens[2], lineno)
        values = [_number(t, lineno) for t in tokens[3:]]
        if kind == "d":
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise TableFormatError(f"expected {dim} coordinates, got {len(values)}", lineno)
            if (i, j) in d_entries and d_entries[(i, j)] != values:
                raise TableFormatError(f"conflicting entries for d {tokens[1]} {tokens[2]}", lineno)
            d_entries[(i, j)] = values
        else:
            if len(values) != 1:
                raise TableFormatError("eta entry takes a single value", lineno)
            if values[0] < 1:
                raise TableFormatError(f"eta must be >= 1, got {values[0]}", lineno)
            eta_entries[(i, j)] = values[0]

    if labels is None:
        raise TableFormatError("missing points header")
    n = len(labels)
    dim = dim or 1
    d = np.zeros((n, n, dim))
    eta = np.ones((n, n))
    for i in range(n):
        for j in range(n):
            if (i, j) in d_entries:
                d[i, j] = d_entries[(i, j)]
            elif (j, i) in d_entries:
                d[i, j] = d_entries[(j, i)]
            elif i != j:
                raise TableFormatError(f"missing distance for pair ({labels[i]}, {labels[j]})")
            if (i, j) in eta_entries:
                eta[i, j] = eta_entries[(i, j)]
            elif (j, i) in eta_entries:
                eta[i, j] = eta_entries[(j, i)]
    return TableData(labels, d, eta, norm)


def load_table(path) -> EtaConeSpace:
    path = Path(path)
    return parse_table(path.read_text()).to_space(path.stem)


def _fmt(v: float) -> str:
    return repr(float(v))


def _text_label(p) -> str:
    if isinstance(p, float) and p.is_integer():
        return str(int(p))
    return str(p)


def format_table(space: EtaConeSpace, title: str = "") -> str:
    """Serialise a finite space over the orthant to the table format."""
    if not space.points.is_finite:
        raise TableFormatError("only finite spaces can be written as tables")
    if not space.cone.is_orthant:
        raise TableFormatError("the table format stores orthant cones only")
    pts = list(space.points.points)
    labels = [_text_label(p) for p in pts]
    if any(len(lab.split()) != 1 or lab.startswith("#") for lab in labels):
        raise TableFormatError("point labels must be single tokens")
    dt, et = space.tables()
    out = []
    if title:
        out.append(f"# {title}")
    out.append("points: " + " ".join(labels))
    if space.cone.norm != "max":
        out.append(f"norm: {space.cone.norm}")
    n = len(pts)
    for i in range(n):
        for j in range(i + 1, n):
            out.append(" ".join(["d", labels[i], labels[j]] + [_fmt(v) for v in dt[i, j]]))
            if not np.array_equal(dt[i, j], dt[j, i]):
                out.append(" ".join(["d", labels[j], labels[i]] + [_fmt(v) for v in dt[j, i]]))
    for i in range(n):
        for j in range(i, n):
            if et[i, j] != 1 or et[j, i] != 1:
                out.append(f"eta {labels[i]} {labels[j]} {_fmt(et[i, j])}")
                if j != i and et[j, i] != et[i, j]:
                    out.append(f"eta {labels[j]} {labels[i]} {_fmt(et[j, i])}")
    return "\n".join(out) + "\n"


def parse_map(text: str, labels: List[str]) -> Dict[str, str]:
    known = set(labels)
    mapping: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "map" or len(tokens) != 3:
            raise TableFormatError("expected 'map <from> <to>'", lineno)
        for tok in tokens[1:]:
            if tok not in known:
                raise TableFormatError(f"unknown point {tok!r}", lineno)
        if tokens[1] in mapping and mapping[tokens[1]] != tokens[2]:
            raise TableFormatError(f"point {tokens[1]!r} mapped twice", lineno)
        mapping[tokens[1]] = tokens[2]
    missing = [p for p in labels if p not in mapping]
    if missing:
        raise TableFormatError(f"map is undefined at {missing}")
    return mapping
