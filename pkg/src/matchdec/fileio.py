"""Text formats for check matrices, matching graphs and syndromes.

Check-matrix file::

    rows cols
    r c            # one 0-indexed nonzero per line

Graph file::

    nodes N qubits Q
    u v ids weight probability    # ids: comma-separated or -1; probability: nan if unset
    boundary b0 b1 ...            # optional

Blank lines and text after ``#`` are ignored.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .exceptions import GraphValidationError
from .graph import CheckMatrix, MatchingGraph

__all__ = [
    "read_check_matrix",
    "write_check_matrix",
    "read_graph",
    "write_graph",
    "read_syndrome",
    "write_syndrome",
    "format_bits",
]


def _lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                yield lineno, line.split()


def read_check_matrix(path: str | os.PathLike) -> CheckMatrix:
    rows = cols = None
    entries = []
    for lineno, tok in _lines(path):
        try:
            vals = [int(t) for t in tok]
        except ValueError:
            raise GraphValidationError(f"{path}:{lineno}: expected integers") from None
        if len(vals) != 2:
            raise GraphValidationError(f"{path}:{lineno}: expected two fields")
        if rows is None:
            rows, cols = vals
        else:
            entries.append((vals[0], vals[1]))
    if rows is None:
        raise GraphValidationError(f"{path}: missing 'rows cols' header")
    return CheckMatrix(rows, cols, entries)


def write_check_matrix(H: CheckMatrix, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{H.num_rows} {H.num_cols}\n")
        for r, c in H.entries:
            fh.write(f"{r} {c}\n")


def read_graph(path: str | os.PathLike, validate: bool = True) -> MatchingGraph:
    """Parse a graph file.

    Problems with the header, field counts, ids outside the declared ranges
    or (when ``validate``) any graph invariant raise
    :class:`GraphValidationError`.
    """
    lines = _lines(path)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise GraphValidationError(f"{path}: empty graph file") from None
    if len(head) != 4 or head[0] != "nodes" or head[2] != "qubits":
        raise GraphValidationError(f"{path}:{lineno}: header must read 'nodes N qubits Q'")
    try:
        n, nq = int(head[1]), int(head[3])
    except ValueError:
        raise GraphValidationError(f"{path}:{lineno}: non-integer node or qubit count") from None
    g = MatchingGraph(n)
    g.num_qubits = nq
    problems = []
    for lineno, tok in lines:
        where = f"{path}:{lineno}"
        if tok[0] == "boundary":
            try:
                nodes = [int(t) for t in tok[1:]]
            except ValueError:
                problems.append(f"{where}: non-integer boundary id")
                continue
            bad = [b for b in nodes if not 0 <= b < n]
            if bad:
                problems.append(f"{where}: boundary ids {bad} outside [0, {n})")
            else:
                g.set_boundary(nodes)
            continue
        if len(tok) != 5:
            problems.append(f"{where}: expected 'u v ids weight probability'")
            continue
        try:
            u, v = int(tok[0]), int(tok[1])
            ids = [int(q) for q in tok[2].split(",")]
            w = float(tok[3])
            p = float(tok[4])
        except ValueError:
            problems.append(f"{where}: malformed edge line")
            continue
        ids = [] if ids == [-1] else ids
        if not (0 <= u < n and 0 <= v < n):
            problems.append(f"{where}: endpoint outside [0, {n})")
            continue
        if any(not 0 <= q < nq for q in ids):
            problems.append(f"{where}: qubit id outside [0, {nq})")
            continue
        if u == v or not math.isfinite(w) or w < 0:
            problems.append(f"{where}: self-loop or invalid weight {tok[3]}")
            continue
        g.add_edge(u, v, ids, w, None if math.isnan(p) else p, allow_parallel=True)
    if problems:
        raise GraphValidationError(problems)
    if validate:
        g.validate()
    return g


def write_graph(g: MatchingGraph, path: str | os.PathLike) -> None:
    """Write ``g`` so that :func:`read_graph` reproduces it exactly."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"nodes {g.num_nodes} qubits {g.num_qubits}\n")
        for e in g.edges:
            ids = ",".join(map(str, sorted(e.qubit_ids))) if e.qubit_ids else "-1"
            p = "nan" if e.error_probability is None else repr(float(e.error_probability))
            fh.write(f"{e.u} {e.v} {ids} {float(e.weight)!r} {p}\n")
        if g.boundary_nodes:
            fh.write("boundary " + " ".join(map(str, sorted(g.boundary_nodes))) + "\n")


def read_syndrome(path: str | os.PathLike) -> np.ndarray:
    """Read a 0/1 vector, whitespace-separated or as one run of digits."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    digits = "".join(text.split())
    if not digits or set(digits) - {"0", "1"}:
        raise ValueError(f"{path}: syndrome must consist of 0/1 entries")
    return np.frombuffer(digits.encode(), np.uint8) - ord("0")


def format_bits(bits) -> str:
    return " ".join(str(int(b)) for b in np.asarray(bits).ravel())


def write_syndrome(bits, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_bits(bits) + "\n")
