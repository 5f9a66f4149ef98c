"""Text formats: edge lists, node assignments (labels / partitions), CSV reports.

Edge list rows are ``src dst rel [weight]``, separated by tabs, commas or
(failing both) whitespace. ``#`` starts a comment line. Lines starting with
``#!`` are directives written by :func:`write_edge_list` so that a file
round-trips exactly::

    #! directed=false
    #! node=<label>        (one per node, in index order)
    #! relation=<name>     (one per relation, in index order)
"""
from __future__ import annotations

import csv
import io as _io
import json
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError
from .graph import MultiRelationalGraph

__all__ = [
    "load_edge_list",
    "write_edge_list",
    "read_assignment",
    "write_assignment",
    "assignment_to_labels",
    "write_csv",
]

_EDGE_HEADERS = {
    ("src", "dst", "rel"), ("src", "dst", "rel", "weight"),
    ("source", "target", "relation"), ("source", "target", "relation", "weight"),
}
_ASSIGN_HEADERS = {("node", "class"), ("node", "community"), ("node", "label")}


def _split(line):
    if "\t" in line:
        return [f.strip() for f in line.split("\t")]
    if "," in line:
        return [f.strip() for f in line.split(",")]
    return line.split()


def _rows(path):
    """Yield ``(line_number, fields)`` for data lines plus directive tuples."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#!"):
                key, _, value = stripped[2:].strip().partition("=")
                yield lineno, ("#!", key.strip(), value)
                continue
            if stripped.startswith("#"):
                continue
            yield lineno, _split(line)


def _parse_bool(value, lineno):
    v = value.strip().lower()
    if v in ("1", "true", "yes"):
        return True
    if v in ("0", "false", "no"):
        return False
    raise InputError(f"line {lineno}: bad boolean {value!r}")


def load_edge_list(path, directed=None, require_nonempty_slices=True) -> MultiRelationalGraph:
    """Read a multi-relational edge list.

    Node and relation labels receive dense indices in order of first
    appearance (directives first). ``directed=None`` defers to a
    ``#! directed=`` directive and otherwise means directed. For undirected
    input every row is an edge and is mirrored.
    """
    nodes, relations = {}, {}
    src, dst, rel, weight = [], [], [], []
    file_directed = None
    seen_data = False

    def node(label):
        return nodes.setdefault(label, len(nodes))

    def relation(name):
        return relations.setdefault(name, len(relations))

    for lineno, fields in _rows(path):
        if isinstance(fields, tuple):
            _, key, value = fields
            if key == "directed":
                file_directed = _parse_bool(value, lineno)
            elif key == "node":
                node(value)
            elif key == "relation":
                relation(value)
            else:
                raise InputError(f"line {lineno}: unknown directive {key!r}")
            continue
        if not seen_data:
            seen_data = True
            lowered = tuple(f.lower() for f in fields)
            if lowered in _EDGE_HEADERS:
                continue
            if len(fields) == 4 and not _is_number(fields[3]):
                raise InputError(f"line {lineno}: unknown header {fields!r}")
        if len(fields) not in (3, 4) or any(f == "" for f in fields):
            raise InputError(f"line {lineno}: expected 'src dst rel [weight]', got {fields!r}")
        w = 1.0
        if len(fields) == 4:
            try:
                w = float(fields[3])
            except ValueError:
                raise InputError(f"line {lineno}: bad weight {fields[3]!r}") from None
            if not np.isfinite(w):
                raise InputError(f"line {lineno}: non-finite weight")
            if w < 0:
                raise InputError(f"line {lineno}: negative weight {w}")
        src.append(node(fields[0]))
        dst.append(node(fields[1]))
        rel.append(relation(fields[2]))
        weight.append(w)

    if not src:
        raise InputError("no arcs")
    if directed is None:
        directed = True if file_directed is None else file_directed
    g = MultiRelationalGraph.from_arcs(
        len(nodes), max(len(relations), 1), src, dst, rel, weight, directed=directed,
        node_labels=list(nodes), relation_names=list(relations),
    )
    return g.validate(require_nonempty_slices=require_nonempty_slices)


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def _check_label(label):
    if any(ch in label for ch in "\t\n\r"):
        raise InputError(f"label {label!r} contains a tab or newline")
    return label


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    elif isinstance(path, _io.TextIOBase):
        yield path
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def write_edge_list(g, path):
    """Write ``g`` (single- or multi-relational) so that :func:`load_edge_list` restores it."""
    if not isinstance(g, MultiRelationalGraph):
        g = g.as_multi()
    with _open_out(path) as fh:
        fh.write(f"#! directed={'true' if g.directed else 'false'}\n")
        for label in g.node_labels:
            fh.write(f"#! node={_check_label(label)}\n")
        for name in g.relation_names:
            fh.write(f"#! relation={_check_label(name)}\n")
        fh.write("src\tdst\trel\tweight\n")
        for s, d, r, w in g.arcs():
            if not g.directed and s > d:
                continue
            fh.write(f"{g.node_labels[s]}\t{g.node_labels[d]}\t{g.relation_names[r]}\t{w!r}\n")


def read_assignment(path):
    """Read a ``node  value`` file (labels or partition) into an ordered dict."""
    out = {}
    first = True
    for lineno, fields in _rows(path):
        if isinstance(fields, tuple):
            continue
        if first:
            first = False
            if tuple(f.lower() for f in fields) in _ASSIGN_HEADERS:
                continue
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise InputError(f"line {lineno}: expected 'node value', got {fields!r}")
        if fields[0] in out:
            raise InputError(f"line {lineno}: node {fields[0]!r} assigned twice")
        out[fields[0]] = fields[1]
    if not out:
        raise InputError(f"{path}: no assignments")
    return out


def assignment_to_labels(assignment, node_labels):
    """Map an assignment onto a graph's node order.

    Returns an integer array with dense values in order of first appearance
    along ``node_labels``.
    """
    missing = [n for n in node_labels if n not in assignment]
    extra = set(assignment) - set(node_labels)
    if missing or extra:
        raise InputError(
            f"node set mismatch: {len(missing)} missing, {len(extra)} unknown"
            + (f" (e.g. {(missing or sorted(extra))[0]!r})")
        )
    codes = {}
    return np.array([codes.setdefault(assignment[n], len(codes)) for n in node_labels],
                    dtype=np.int64)


def write_assignment(path, node_labels, values, header="community"):
    with _open_out(path) as fh:
        fh.write(f"node\t{header}\n")
        for label, v in zip(node_labels, values):
            fh.write(f"{_check_label(label)}\t{v}\n")


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return "" if v is None else str(v)


def write_csv(path, columns, rows, config=None):
    """Write a CSV report preceded by a ``# mrse-kit vX config=...`` comment."""
    with _open_out(path) as fh:
        cfg = json.dumps(config or {}, sort_keys=True, default=str)
        fh.write(f"# mrse-kit v{__version__} config={cfg}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    """Read a report written by :func:`write_csv` into a list of dicts (strings)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def ensure_parent(path):
    if path not in (None, "-"):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
