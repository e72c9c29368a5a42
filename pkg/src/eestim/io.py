"""File formats: state vectors, real-valued images, digraph edge lists,
estimation traces, and key-value config files.

State files start with a header line -- ``<encoding> <rows> <cols>``,
``<encoding> chain <N>``, or ``<encoding> digraph <N>`` -- followed by the
site values in row-major order, whitespace-separated with arbitrary line
breaks.  ``#`` starts a comment anywhere; CRLF and LF both parse.  Floats
are written with shortest round-trip precision and a locale-independent
decimal point.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import BinaryState, Encoding, dims_size
from .errors import ParseError
from .estimators import EstimationTrace
from .models import arc_endpoints, arc_index


def _fmt(x: float) -> str:
    return repr(float(x))


def _tokens(path) -> list[tuple[int, str]]:
    out = []
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0]
            for tok in body.split():
                out.append((lineno, tok))
    return out


def _take_int(path, toks, pos, what) -> int:
    if pos >= len(toks):
        line = toks[-1][0] if toks else 1
        raise ParseError(path, line, f"unexpected end of file, expected {what}")
    lineno, tok = toks[pos]
    try:
        return int(tok)
    except ValueError:
        raise ParseError(path, lineno, f"expected {what}, got {tok!r}") from None


def read_state(path) -> BinaryState:
    """Read a binary state file (grid, chain, or digraph header)."""
    toks = _tokens(path)
    if not toks:
        raise ParseError(path, 1, "empty state file")
    lineno, enc_tok = toks[0]
    try:
        encoding = Encoding(enc_tok.lower())
    except ValueError:
        raise ParseError(path, lineno, f"unknown encoding {enc_tok!r}") from None
    pos = 1
    if pos < len(toks) and toks[pos][1] in ("chain", "digraph"):
        kind = toks[pos][1]
        n = _take_int(path, toks, pos + 1, "a size")
        dims = (kind, n)
        pos += 2
    else:
        rows = _take_int(path, toks, pos, "a row count")
        cols = _take_int(path, toks, pos + 1, "a column count")
        dims = ("grid", rows, cols)
        pos += 2
    try:
        expected = dims_size(dims)
    except Exception as exc:
        raise ParseError(path, lineno, str(exc)) from None
    body = toks[pos:]
    if len(body) != expected:
        where = body[-1][0] if body else toks[pos - 1][0]
        raise ParseError(path, where, f"expected {expected} site values, got {len(body)}")
    values = np.empty(expected, dtype=np.int8)
    lo, hi = encoding.legal_values()
    for k, (ln, tok) in enumerate(body):
        try:
            v = int(tok)
        except ValueError:
            raise ParseError(path, ln, f"bad site value {tok!r}") from None
        if v not in (lo, hi):
            raise ParseError(path, ln, f"site value {v} not in {{{lo}, {hi}}}")
        values[k] = v
    return BinaryState(values, encoding, dims)


def write_state(path, state: BinaryState):
    kind = state.dims[0]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if kind == "grid":
            rows, cols = state.dims[1], state.dims[2]
            fh.write(f"{state.encoding.value} {rows} {cols}\n")
            grid = state.values.reshape(rows, cols)
            for row in grid:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")
        elif kind == "chain":
            fh.write(f"{state.encoding.value} chain {state.dims[1]}\n")
            fh.write(" ".join(str(int(v)) for v in state.values) + "\n")
        else:
            n = state.dims[1]
            fh.write(f"{state.encoding.value} digraph {n}\n")
            ties = state.values.reshape(n, n - 1)
            for row in ties:
                fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_real_grid(path) -> np.ndarray:
    """Read a real-valued image: header ``real <rows> <cols>`` then floats."""
    toks = _tokens(path)
    if not toks:
        raise ParseError(path, 1, "empty image file")
    lineno, tag = toks[0]
    if tag.lower() != "real":
        raise ParseError(path, lineno, f"expected 'real' header, got {tag!r}")
    rows = _take_int(path, toks, 1, "a row count")
    cols = _take_int(path, toks, 2, "a column count")
    body = toks[3:]
    if len(body) != rows * cols:
        where = body[-1][0] if body else lineno
        raise ParseError(path, where, f"expected {rows * cols} values, got {len(body)}")
    out = np.empty(rows * cols)
    for k, (ln, tok) in enumerate(body):
        try:
            out[k] = float(tok)
        except ValueError:
            raise ParseError(path, ln, f"bad value {tok!r}") from None
    return out.reshape(rows, cols)


def write_real_grid(path, image: np.ndarray):
    image = np.asarray(image, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"real {image.shape[0]} {image.shape[1]}\n")
        for row in image:
            fh.write(" ".join(_fmt(v) for v in row) + "\n")


def read_digraph(path) -> BinaryState:
    """Read an edge list (header ``N``, then ``i j`` arcs) into a tie vector."""
    toks = _tokens(path)
    if not toks:
        raise ParseError(path, 1, "empty digraph file")
    n = _take_int(path, toks, 0, "a node count")
    if n < 2:
        raise ParseError(path, toks[0][0], f"need at least 2 nodes, got {n}")
    body = toks[1:]
    if len(body) % 2 != 0:
        raise ParseError(path, body[-1][0], "dangling arc endpoint")
    values = np.zeros(n * (n - 1), dtype=np.int8)
    for p in range(0, len(body), 2):
        ln = body[p][0]
        i = _take_int(path, body, p, "an arc tail")
        j = _take_int(path, body, p + 1, "an arc head")
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ParseError(path, ln, f"bad arc ({i}, {j}) for {n} nodes")
        values[arc_index(n, i, j)] = 1
    return BinaryState(values, Encoding.TIE, ("digraph", n))


def write_digraph(path, state: BinaryState):
    if state.dims[0] != "digraph":
        raise ParseError(path, 1, "edge-list format requires a digraph state")
    n = state.dims[1]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n}\n")
        for idx in np.flatnonzero(state.values):
            i, j = arc_endpoints(n, int(idx))
            fh.write(f"{i} {j}\n")


def trace_header(L: int) -> list[str]:
    return (
        ["t"]
        + [f"theta_{i + 1}" for i in range(L)]
        + [f"d_{i + 1}" for i in range(L)]
        + ["accepted"]
    )


def write_trace(path, trace: EstimationTrace):
    """One CSV row per parameter update: t, theta_1.., d_1.., accepted."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(trace_header(trace.L))
        for t in range(len(trace)):
            row = [str(t + 1)]
            row += [_fmt(v) for v in trace.theta[t]]
            row += [_fmt(v) for v in trace.d[t]]
            row.append(str(int(trace.accepted[t])))
            writer.writerow(row)


def read_trace(path) -> EstimationTrace:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty trace file") from None
        header = [h.strip() for h in header]
        if len(header) < 4 or len(header) % 2 != 0:
            raise ParseError(path, 1, f"trace header must have 2L+2 columns, got {len(header)}")
        L = (len(header) - 2) // 2
        if header != trace_header(L):
            raise ParseError(path, 1, "unexpected trace header names")
        theta, d, accepted = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 * L + 2:
                raise ParseError(path, lineno, f"expected {2 * L + 2} columns, got {len(row)}")
            try:
                theta.append([float(v) for v in row[1 : L + 1]])
                d.append([float(v) for v in row[L + 1 : 2 * L + 1]])
                accepted.append(int(row[-1]))
            except ValueError:
                raise ParseError(path, lineno, "bad numeric field") from None
    if not theta:
        raise ParseError(path, 1, "trace file has no update rows")
    return EstimationTrace(
        np.asarray(theta, dtype=np.float64),
        np.asarray(d, dtype=np.float64),
        np.asarray(accepted, dtype=np.int64),
    )


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` comments and blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline=None) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParseError(path, lineno, f"expected 'key = value', got {body!r}")
            key, value = body.split("=", 1)
            key = key.strip()
            if not key:
                raise ParseError(path, lineno, "empty config key")
            out[key] = value.strip()
    return out
