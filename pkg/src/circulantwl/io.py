"""Parsers and serializers for the text formats used by the CLI.

Formats:
  configuration  "n=<int>" then n rows of n color ids
  scheme         "n=<int>" then one line "C: a,b,c" per connection set
  graph          inline "n=<int>;S=a,b,c" (circulant shorthand) or
                 "n=<int>;arcs=<color>:<i>,<j>;..." (arc-colored digraph)
"""

from __future__ import annotations

import numpy as np

from .circulant import CirculantScheme, from_connection_partition
from .core import CoherentConfig


class FormatError(ValueError):
    """Malformed input text for one of the file formats."""


def _parse_header(line: str) -> int:
    line = line.strip()
    if not line.startswith("n="):
        raise FormatError("first line must be n=<int>")
    try:
        n = int(line[2:])
    except ValueError as exc:
        raise FormatError("first line must be n=<int>") from exc
    if n < 1:
        raise FormatError("point count must be positive")
    return n


def parse_config(text: str) -> CoherentConfig:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty configuration file")
    n = _parse_header(lines[0])
    if len(lines) != n + 1:
        raise FormatError(f"expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        try:
            row = [int(v) for v in ln.split()]
        except ValueError as exc:
            raise FormatError("matrix entries must be integers") from exc
        if len(row) != n:
            raise FormatError(f"expected {n} entries per row")
        rows.append(row)
    return CoherentConfig(np.array(rows, dtype=np.int64))


def dump_config(cc: CoherentConfig) -> str:
    lines = [f"n={cc.n}"]
    for row in cc.colors:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def parse_scheme_lenient(text: str) -> tuple[CirculantScheme, bool]:
    """Parse a scheme file; returns (scheme-or-closure, was coherent)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty scheme file")
    n = _parse_header(lines[0])
    sets = []
    for ln in lines[1:]:
        body = ln.strip()
        if not body.startswith("C:"):
            raise FormatError("connection set lines must start with 'C:'")
        items = body[2:].strip()
        if not items:
            raise FormatError("empty connection set line")
        try:
            sets.append({int(v) % n for v in items.split(",")})
        except ValueError as exc:
            raise FormatError("connection set entries must be integers") from exc
    try:
        return from_connection_partition(n, sets)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def parse_scheme(text: str) -> CirculantScheme:
    scheme, coherent = parse_scheme_lenient(text)
    if not coherent:
        raise FormatError("connection partition is not coherent")
    return scheme


def dump_scheme(X: CirculantScheme) -> str:
    lines = [f"n={X.n}"]
    for conn in sorted(X.connection_sets, key=lambda s: sorted(s)):
        lines.append("C: " + ",".join(str(d) for d in sorted(conn)))
    return "\n".join(lines) + "\n"


def parse_graph_spec(text: str) -> tuple[int, np.ndarray]:
    """Inline graph input; returns the order and an arc color matrix."""
    parts = [p.strip() for p in text.strip().split(";") if p.strip()]
    if not parts:
        raise FormatError("empty graph spec")
    n = _parse_header(parts[0])
    arcs = np.zeros((n, n), dtype=np.int64)
    if len(parts) == 1:
        return n, arcs
    body = parts[1]
    if body.startswith("S="):
        items = body[2:].strip()
        conn = (
            {int(v) % n for v in items.split(",")} if items else set()
        )
        if 0 in conn:
            raise FormatError("connection set must not contain 0")
        for a in range(n):
            for d in conn:
                arcs[a, (a + d) % n] = 1
        return n, arcs
    if body.startswith("arcs="):
        for chunk in [body[5:]] + parts[2:]:
            if not chunk:
                continue
            try:
                color_part, pair = chunk.split(":")
                i, j = pair.split(",")
                arcs[int(i), int(j)] = int(color_part)
            except (ValueError, IndexError) as exc:
                raise FormatError(f"malformed arc chunk {chunk!r}") from exc
        return n, arcs
    raise FormatError("graph spec needs S=... or arcs=...")


def parse_connection_set(text: str) -> tuple[int, frozenset[int]]:
    """Circulant shorthand only; returns (n, connection set)."""
    n, arcs = parse_graph_spec(text)
    conn = frozenset(int(d) for d in np.flatnonzero(arcs[0]))
    if not np.array_equal(
        arcs, np.array([[(1 if (b - a) % n in conn else 0) for b in range(n)] for a in range(n)])
    ):
        raise FormatError("graph is not circulant shorthand")
    return n, conn
