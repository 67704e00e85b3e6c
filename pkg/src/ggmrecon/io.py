"""Text file formats and run manifests.

Graph files::

    n 4
    e 0 1
    e 1 2

Road descriptions::

    road a
    road b
    x a b

Blank lines and ``#`` comments are allowed in both.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from . import __version__
from .errors import InputError, ParseError
from .ggm import GgmParams
from .graph import Graph, RoadNetworkDescription

FLOAT_FMT = "{:.17g}"


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT.format(float(x))


def _lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _int_token(tok: str, path, lineno: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", path, lineno, col) from None


def parse_graph(text_lines: Iterable[tuple[int, str]], path=None) -> Graph:
    n = None
    pairs: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    for lineno, line in text_lines:
        toks = line.split()
        if n is None:
            if toks[0] != "n" or len(toks) != 2:
                raise ParseError("first line must be 'n <count>'", path, lineno)
            n = _int_token(toks[1], path, lineno, 2)
            if n < 0:
                raise ParseError("vertex count must be nonnegative", path, lineno, 2)
            continue
        if toks[0] != "e" or len(toks) != 3:
            raise ParseError("expected 'e <i> <j>'", path, lineno)
        i = _int_token(toks[1], path, lineno, 2)
        j = _int_token(toks[2], path, lineno, 3)
        for col, v in ((2, i), (3, j)):
            if not 0 <= v < n:
                raise ParseError(f"vertex {v} outside 0..{n - 1}", path, lineno, col)
        if i == j:
            raise ParseError(f"self-loop at vertex {i}", path, lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise ParseError(f"duplicate edge {key} (first on line {seen[key]})", path, lineno)
        seen[key] = lineno
        pairs.append(key)
    if n is None:
        raise ParseError("empty graph file", path)
    return Graph.from_edges(n, pairs)


def parse_graph_file(path) -> Graph:
    return parse_graph(_lines(path), path)


def format_graph(g: Graph) -> str:
    out = [f"n {g.n}"]
    out.extend(f"e {i} {j}" for i, j in g.edges)
    return "\n".join(out) + "\n"


def write_graph(path, g: Graph) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")


def parse_road_description_file(path) -> RoadNetworkDescription:
    roads: list[str] = []
    inters: list[tuple[str, ...]] = []
    for lineno, line in _lines(path):
        toks = line.split()
        if toks[0] == "road":
            if len(toks) != 2:
                raise ParseError("expected 'road <name>'", path, lineno)
            roads.append(toks[1])
        elif toks[0] == "x":
            if len(toks) < 3:
                raise ParseError("an intersection needs at least two roads", path, lineno)
            inters.append(tuple(toks[1:]))
        else:
            raise ParseError(f"unknown record {toks[0]!r}", path, lineno, 1)
    return RoadNetworkDescription(tuple(roads), tuple(inters))


def params_to_dict(p: GgmParams) -> dict:
    return {"xi": p.xi, "j": p.j, "h": [float(v) for v in p.h]}


def write_params(path, p: GgmParams) -> None:
    Path(path).write_text(json.dumps(params_to_dict(p), indent=2) + "\n", encoding="utf-8")


def read_params(path) -> GgmParams:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno, exc.colno) from None
    missing = [k for k in ("xi", "j", "h") if k not in raw]
    if missing:
        raise ParseError(f"parameter file lacks field(s) {', '.join(missing)}", path)
    return GgmParams(h=np.asarray(raw["h"], dtype=float), xi=raw["xi"], j=raw["j"])


def sample_header(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def write_matrix_csv(out: TextIO, data: np.ndarray) -> None:
    data = np.atleast_2d(data)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(sample_header(data.shape[1]))
    for row in data:
        w.writerow([fmt(v) for v in row])


def read_matrix_csv(path) -> np.ndarray:
    """Samples CSV with an ``x0,...`` header; empty cells become NaN."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise ParseError("empty CSV", path)
    header, body = rows[0], [r for r in rows[1:] if r]
    if header != sample_header(len(header)):
        raise ParseError("header must be x0,x1,...", path, 1)
    out = np.empty((len(body), len(header)))
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} columns, got {len(row)}", path, k + 2)
        for c, cell in enumerate(row):
            try:
                out[k, c] = float(cell) if cell.strip() else np.nan
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", path, k + 2, c + 1) from None
    return out


def read_mask_file(path) -> np.ndarray:
    idx = []
    for lineno, line in _lines(path):
        idx.append(_int_token(line, path, lineno, 1))
    return np.asarray(idx, dtype=np.int64)


def write_table(out: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    flags: dict
    inputs: dict = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__

    @classmethod
    def build(cls, subcommand: str, flags: dict, input_paths: Iterable, seed=None) -> "RunManifest":
        inputs = {str(p): file_digest(p) for p in input_paths if p is not None}
        clean = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(flags.items())}
        return cls(subcommand, clean, inputs, seed)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=str) + "\n"


def manifest_path(out_path) -> Path:
    return Path(str(out_path) + ".manifest.json")


class Output:
    """Text sink that is either a file (with manifest) or standard output."""

    def __init__(self, path=None):
        self.path = path
        self._buf = io.StringIO()

    def __enter__(self) -> TextIO:
        return self._buf

    def __exit__(self, exc_type, exc, tb):
        if exc_type is not None:
            return False
        if self.path is None or str(self.path) == "-":
            sys.stdout.write(self._buf.getvalue())
            sys.stdout.flush()
        else:
            Path(self.path).write_text(self._buf.getvalue(), encoding="utf-8")
        return False

    def write_manifest(self, manifest: RunManifest) -> None:
        if self.path is not None and str(self.path) != "-":
            manifest_path(self.path).write_text(manifest.to_json(), encoding="utf-8")
