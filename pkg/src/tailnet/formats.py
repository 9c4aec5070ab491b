"""On-disk layouts for series matrices.

CSV
    ``# key: <json>`` metadata lines, then the header ``row,column,value``
    and one line per active cell. Rows and columns are 1-based; the
    personalization column is written with column label ``Q``.

Binary (little endian)
    ========  ============================================================
    bytes     content
    ========  ============================================================
    8         magic ``b"TAILMTX1"``
    8         ``uint64`` number of rows ``R``
    8         ``uint64`` number of columns ``C``
    8         ``uint64`` flag, 1 if a personalization column follows
    8         ``uint64`` length ``J`` of the JSON metadata block
    8 R       ``int64`` row lengths (the row index block)
    8 S       ``float64`` active cells, row major, ``S = sum(row lengths)``
    8 R       ``float64`` personalization column, only if the flag is set
    J         UTF-8 JSON metadata (profile, scenario, drawn ``d``)
    ========  ============================================================
"""

from __future__ import annotations

import csv
import json
import struct

import numpy as np

from .generators import DependenceScenario, SeriesMatrix
from .heavy_tail import TailProfile

MAGIC = b"TAILMTX1"
_HEAD = struct.Struct("<8sQQQQ")


def matrix_metadata(mx: SeriesMatrix) -> dict:
    scen_d = mx.scenario.d
    if isinstance(scen_d, dict):
        scen_d = {str(k): v for k, v in scen_d.items()}
    return {
        "per_column": [list(c) for c in mx.profile.per_column],
        "scenario": {"kind": mx.scenario.kind, "d": scen_d},
        "d": mx.d,
        "fingerprint": mx.fingerprint(),
        **{k: v for k, v in mx.meta.items() if k not in ("per_column", "scenario", "d", "fingerprint")},
    }


def _from_metadata(values, lengths, q, meta) -> SeriesMatrix:
    scen = meta["scenario"]
    d = scen["d"]
    if isinstance(d, dict):
        d = {int(k): v for k, v in d.items()}
    profile = TailProfile(tuple(tuple(c) for c in meta["per_column"]))
    extra = {k: v for k, v in meta.items() if k not in ("per_column", "scenario", "d", "fingerprint")}
    return SeriesMatrix(values, lengths, profile, DependenceScenario(scen["kind"], d), int(meta["d"]), q, extra)


def write_matrix_binary(mx: SeriesMatrix, path):
    meta = json.dumps(matrix_metadata(mx), sort_keys=True).encode()
    cells = mx.values[mx.active_mask()]
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, mx.n_rows, mx.n_cols, int(mx.q is not None), len(meta)))
        fh.write(mx.lengths.astype("<i8").tobytes())
        fh.write(cells.astype("<f8").tobytes())
        if mx.q is not None:
            fh.write(mx.q.astype("<f8").tobytes())
        fh.write(meta)


def read_matrix_binary(path) -> SeriesMatrix:
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, n_rows, n_cols, has_q, meta_len = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a series-matrix file")
    off = _HEAD.size
    lengths = np.frombuffer(buf, "<i8", n_rows, off).astype(np.int64)
    off += 8 * n_rows
    n_cells = int(lengths.sum())
    cells = np.frombuffer(buf, "<f8", n_cells, off)
    off += 8 * n_cells
    q = None
    if has_q:
        q = np.frombuffer(buf, "<f8", n_rows, off).copy()
        off += 8 * n_rows
    meta = json.loads(buf[off : off + meta_len].decode())
    values = np.zeros((n_rows, n_cols))
    values[np.arange(n_cols)[None, :] < lengths[:, None]] = cells
    return _from_metadata(values, lengths, q, meta)


def write_matrix_csv(mx: SeriesMatrix, path):
    meta = matrix_metadata(mx)
    rows, cols = np.nonzero(mx.active_mask())
    with open(path, "w", newline="") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {json.dumps(meta[key], sort_keys=True)}\n")
        fh.write(f"# shape: {json.dumps([mx.n_rows, mx.n_cols])}\n")
        w = csv.writer(fh)
        w.writerow(["row", "column", "value"])
        for r, c in zip(rows, cols):
            w.writerow([r + 1, c + 1, repr(float(mx.values[r, c]))])
        if mx.q is not None:
            for r, v in enumerate(mx.q):
                w.writerow([r + 1, "Q", repr(float(v))])


def read_matrix_csv(path) -> SeriesMatrix:
    meta = {}
    body = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = json.loads(val)
            else:
                body.append(line)
    n_rows, n_cols = meta.pop("shape")
    values = np.zeros((n_rows, n_cols))
    lengths = np.zeros(n_rows, dtype=np.int64)
    q = None
    reader = csv.reader(body)
    next(reader)
    for r, c, v in reader:
        r = int(r) - 1
        if c == "Q":
            if q is None:
                q = np.zeros(n_rows)
            q[r] = float(v)
            continue
        c = int(c) - 1
        values[r, c] = float(v)
        lengths[r] = max(lengths[r], c + 1)
    return _from_metadata(values, lengths, q, meta)


def read_matrix(path) -> SeriesMatrix:
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    return read_matrix_binary(path) if head == MAGIC else read_matrix_csv(path)
