"""JSON configuration documents with line-precise validation errors.

IFS document::

    {
      "maps": [{"a": 0.5, "b": 0, "c": 0, "d": 0.5, "e": 0, "f": 0}, ...],
      "probabilities": [0.5, 0.5],          # optional
      "bounds": [x0, y0, x1, y1],           # optional
      "resolution": 512,                    # optional, pixels per unit
      "seed_region": {"type": "disk", "center": [0, 0], "radius": 1},   # optional
      "tol": 0.004                          # optional, physical units
    }

Continuation documents add ``"lambdas"``, ``"block"`` (a region or
``{"type": "pgm", "path": ...}``), optional ``"eps"``, ``"margin"`` and
``"contractive"``; any map coefficient may then be ``{"base": v, "per_lambda": w}``
meaning ``v + lambda * w``.

Hopf documents hold ``"family"`` (built-in name), ``"params"``, ``"lambdas"``,
``"bounds"``, ``"resolution"``, ``"disk_radius"`` and optional ``"perturb"``.
"""
from __future__ import annotations

import json
import math
import os
import re
from dataclasses import dataclass, field
from json.decoder import JSONObject
from json.scanner import py_make_scanner
from typing import Optional

from .errors import ConfigError
from .grid import Annulus, BitGrid, Disk, Rect
from .ifs import AffineMap2, IFSystem


class LineDict(dict):
    """Dict remembering the line of its opening brace and of each key."""

    line: int = 1
    key_lines: dict

    def line_of(self, key) -> int:
        return self.key_lines.get(key, self.line)


class _LineDecoder(json.JSONDecoder):
    def __init__(self, text: str):
        super().__init__()
        self._text = text
        self._spans = []  # (start, end) of every object, for key lookup
        self.parse_object = self._parse_object
        self.scan_once = py_make_scanner(self)

    def _line(self, pos: int) -> int:
        return self._text.count("\n", 0, pos) + 1

    def _parse_object(self, s_and_end, strict, scan_once, object_hook, object_pairs_hook,
                      memo=None, _w=json.decoder.WHITESPACE.match):
        start = s_and_end[1] - 1
        pairs, end = JSONObject(s_and_end, strict, scan_once, None, list, memo, _w)
        out = LineDict(pairs)
        out.line = self._line(start)
        inner = [(a, b) for a, b in self._spans if start < a and b <= end]
        out.key_lines = {}
        for key in out:
            for m in re.finditer(re.escape(json.dumps(key)) + r"\s*:", self._text[start:end]):
                pos = start + m.start()
                if not any(a <= pos < b for a, b in inner):
                    out.key_lines[key] = self._line(pos)
                    break
        self._spans.append((start, end))
        return out, end


def loads(text: str):
    """Parse JSON text; syntax errors become :class:`ConfigError` with a line number."""
    try:
        return _LineDecoder(text).decode(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    doc = loads(text)
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", line=1)
    return doc


# field validation ----------------------------------------------------------------
def _where(doc, key, path):
    return (doc.line_of(key) if isinstance(doc, LineDict) else None), f"{path}{key}"


def _number(doc, key, path="", positive=False, nonneg=False, default=None, required=False):
    if key not in doc:
        if required:
            line = doc.line if isinstance(doc, LineDict) else None
            raise ConfigError("missing required field", line=line, key=f"{path}{key}")
        return default
    v = doc[key]
    line, name = _where(doc, key, path)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"expected a finite number, got {v!r}", line=line, key=name)
    if positive and not v > 0:
        raise ConfigError(f"must be positive, got {v!r}", line=line, key=name)
    if nonneg and v < 0:
        raise ConfigError(f"must be non-negative, got {v!r}", line=line, key=name)
    return float(v)


def _numbers(doc, key, path="", length=None, default=None, required=False, ascending=False):
    if key not in doc:
        if required:
            line = doc.line if isinstance(doc, LineDict) else None
            raise ConfigError("missing required field", line=line, key=f"{path}{key}")
        return default
    v = doc[key]
    line, name = _where(doc, key, path)
    if not isinstance(v, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x) for x in v):
        raise ConfigError("expected a list of finite numbers", line=line, key=name)
    if length is not None and len(v) != length:
        raise ConfigError(f"expected {length} numbers, got {len(v)}", line=line, key=name)
    if ascending and sorted(v) != list(v):
        raise ConfigError("values must be ascending", line=line, key=name)
    return [float(x) for x in v]


def _bounds(doc, default=None):
    b = _numbers(doc, "bounds", length=4, default=default)
    if b is not None and not (b[2] > b[0] and b[3] > b[1]):
        line, name = _where(doc, "bounds", "")
        raise ConfigError("bounds must satisfy x1 > x0 and y1 > y0", line=line, key=name)
    return tuple(b) if b is not None else None


def region_from(doc, path: str, base_dir: str = "."):
    """Region object (or a :class:`BitGrid` for ``pgm``) from its description."""
    if not isinstance(doc, dict):
        raise ConfigError("expected an object", key=path)
    kind = doc.get("type")
    line = doc.line if isinstance(doc, LineDict) else None
    if kind == "disk":
        c = _numbers(doc, "center", path + ".", length=2, default=[0.0, 0.0])
        return Disk(c[0], c[1], _number(doc, "radius", path + ".", positive=True, required=True))
    if kind == "annulus":
        c = _numbers(doc, "center", path + ".", length=2, default=[0.0, 0.0])
        inner = _number(doc, "inner", path + ".", nonneg=True, required=True)
        outer = _number(doc, "outer", path + ".", positive=True, required=True)
        if not outer > inner:
            raise ConfigError("outer radius must exceed inner radius", line=line, key=path)
        return Annulus(c[0], c[1], inner, outer)
    if kind == "rect":
        b = _numbers(doc, "bounds", path + ".", length=4, required=True)
        return Rect(*b)
    if kind == "pgm":
        p = doc.get("path")
        if not isinstance(p, str):
            raise ConfigError("pgm region needs a string 'path'", line=line, key=path + ".path")
        from .pgm import read_pgm
        full = p if os.path.isabs(p) else os.path.join(base_dir, p)
        try:
            return read_pgm(full)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read block image {full}: {exc}", line=line,
                              key=path + ".path") from None
    raise ConfigError(f"unknown region type {kind!r} (disk, annulus, rect, pgm)", line=line,
                      key=path + ".type")


def _coefficient(m, k, path, allow_family):
    if k not in m:
        line = m.line if isinstance(m, LineDict) else None
        raise ConfigError("missing map coefficient", line=line, key=f"{path}{k}")
    v = m[k]
    if allow_family and isinstance(v, dict):
        base = _number(v, "base", f"{path}{k}.", required=True)
        slope = _number(v, "per_lambda", f"{path}{k}.", default=0.0)
        return base, slope
    return _number(m, k, path, required=True), 0.0


def _maps(doc, allow_family=False):
    if "maps" not in doc:
        raise ConfigError("missing required field", line=getattr(doc, "line", None), key="maps")
    maps = doc["maps"]
    line, _ = _where(doc, "maps", "")
    if not isinstance(maps, list) or not maps:
        raise ConfigError("expected a non-empty list of maps", line=line, key="maps")
    out = []
    for i, m in enumerate(maps):
        path = f"maps[{i}]."
        if not isinstance(m, dict):
            raise ConfigError("each map must be an object with keys a..f", line=line, key=f"maps[{i}]")
        unknown = set(m) - set("abcdef") - {"name"}
        if unknown:
            bad = sorted(unknown)[0]
            raise ConfigError("unknown map field", line=m.line_of(bad) if isinstance(m, LineDict)
                              else None, key=path + bad)
        coeffs = [_coefficient(m, k, path, allow_family) for k in "abcdef"]
        name = m.get("name", f"f{i + 1}")
        out.append((coeffs, str(name), m.line if isinstance(m, LineDict) else None))
    return out


@dataclass
class IFSConfig:
    system: IFSystem
    bounds: Optional[tuple] = None
    resolution: Optional[float] = None
    seed_region: object = None
    tol: Optional[float] = None


def parse_ifs(doc, base_dir: str = ".") -> IFSConfig:
    maps = []
    for coeffs, name, line in _maps(doc):
        a, b, c, d, e, f = (v for v, _ in coeffs)
        m = AffineMap2(a, b, c, d, e, f, name)
        if not m.invertible:
            raise ConfigError("map is singular (zero determinant)", line=line, key=f"maps[{len(maps)}]")
        maps.append(m)
    probs = _numbers(doc, "probabilities")
    if probs is not None:
        line, name = _where(doc, "probabilities", "")
        if len(probs) != len(maps) or min(probs) < 0 or sum(probs) <= 0:
            raise ConfigError("need one non-negative probability per map", line=line, key=name)
    seed = doc.get("seed_region")
    cfg = IFSConfig(IFSystem(tuple(maps), probs, doc.get("name", "config")),
                    _bounds(doc), _number(doc, "resolution", positive=True),
                    region_from(seed, "seed_region", base_dir) if seed is not None else None,
                    _number(doc, "tol", positive=True))
    return cfg


@dataclass
class ContinuationConfig:
    family: object  # lam -> InvertibleIFS
    bounds: tuple
    resolution: float
    block: object  # region or BitGrid
    lambdas: list
    eps: Optional[float] = None
    margin: float = 2.0
    tol: Optional[float] = None
    contractive: bool = False
    base_lambda: float = 0.0
    coefficients: list = field(default_factory=list)

    def block_grid(self) -> BitGrid:
        from .grid import new_grid
        if isinstance(self.block, BitGrid):
            return self.block
        return new_grid(self.bounds, self.resolution, self.block)


def parse_continuation(doc, base_dir: str = ".") -> ContinuationConfig:
    from .conley import InvertibleIFS

    parsed = _maps(doc, allow_family=True)
    for i, (coeffs, _, line) in enumerate(parsed):
        a, b, c, d = (v for v, _ in coeffs[:4])
        if a * d - b * c == 0:
            raise ConfigError("map is singular at the base parameter", line=line, key=f"maps[{i}]")

    def family(lam):
        maps = []
        for coeffs, name, _ in parsed:
            vals = [base + lam * slope for base, slope in coeffs]
            maps.append(AffineMap2(*vals, name=name))
        return InvertibleIFS(tuple(maps), f"config@{lam}")

    if "block" not in doc:
        raise ConfigError("missing required field", line=getattr(doc, "line", None), key="block")
    block = region_from(doc["block"], "block", base_dir)
    bounds = _bounds(doc)
    resolution = _number(doc, "resolution", positive=True)
    if isinstance(block, BitGrid):
        bounds, resolution = block.bounds, block.resolution
    elif bounds is None or resolution is None:
        raise ConfigError("continuation needs 'bounds' and 'resolution' unless the block is a PGM",
                          line=getattr(doc, "line", None), key="bounds")
    lambdas = _numbers(doc, "lambdas", required=True, ascending=True)
    if not lambdas:
        raise ConfigError("need at least one parameter value", line=_where(doc, "lambdas", "")[0],
                          key="lambdas")
    contractive = doc.get("contractive", False)
    if not isinstance(contractive, bool):
        raise ConfigError("expected true or false", line=_where(doc, "contractive", "")[0],
                          key="contractive")
    return ContinuationConfig(family, bounds, resolution, block, lambdas,
                              _number(doc, "eps", positive=True),
                              _number(doc, "margin", positive=True, default=2.0),
                              _number(doc, "tol", nonneg=True), contractive,
                              _number(doc, "base_lambda", default=0.0),
                              [c for c, _, _ in parsed])


@dataclass
class HopfConfig:
    family: str = "neimark-sacker"
    params: dict = field(default_factory=dict)
    lambdas: list = field(default_factory=lambda: [0.01, 0.04, 0.09, 0.16])
    bounds: tuple = (-0.55, -0.55, 0.55, 0.55)
    resolution: float = 800.0
    disk_radius: float = 0.5
    perturb: list = field(default_factory=list)
    tol: Optional[float] = None


def parse_hopf(doc) -> HopfConfig:
    from .homeo import BUILTIN_FAMILIES

    cfg = HopfConfig()
    if "family" in doc:
        cfg.family = doc["family"]
        if cfg.family not in BUILTIN_FAMILIES:
            raise ConfigError(f"unknown family {cfg.family!r}", line=_where(doc, "family", "")[0],
                              key="family")
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("expected an object", line=_where(doc, "params", "")[0], key="params")
    allowed = {"omega", "b", "r_max"}
    for k in params:
        if k not in allowed:
            raise ConfigError(f"unknown family parameter (allowed: {sorted(allowed)})",
                              line=params.line_of(k) if isinstance(params, LineDict) else None,
                              key=f"params.{k}")
        cfg.params[k] = _number(params, k, "params.")
    cfg.lambdas = _numbers(doc, "lambdas", default=cfg.lambdas, ascending=True)
    cfg.bounds = _bounds(doc, default=list(cfg.bounds))
    cfg.resolution = _number(doc, "resolution", positive=True, default=cfg.resolution)
    cfg.disk_radius = _number(doc, "disk_radius", positive=True, default=cfg.disk_radius)
    cfg.perturb = _numbers(doc, "perturb", default=[])
    if any(a < 0 for a in cfg.perturb):
        raise ConfigError("amplitudes must be non-negative", line=_where(doc, "perturb", "")[0],
                          key="perturb")
    cfg.tol = _number(doc, "tol", positive=True)
    return cfg
