"""TSPLIB95 instance reading and canonical integer edge weights.

Supports the coordinate-based metrics EUC_2D, CEIL_2D, GEO and ATT with the
reference rounding rules, a fully materialised distance matrix, and
per-city neighbour lists sorted by ascending distance (ties by city index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SUPPORTED_METRICS = ("EUC_2D", "CEIL_2D", "GEO", "ATT")

_GEO_PI = 3.141592
_GEO_RADIUS = 6378.388


class ParseError(ValueError):
    """Malformed instance or tour document."""


class UnsupportedMetricError(ParseError):
    """EDGE_WEIGHT_TYPE outside the supported coordinate metrics."""


@dataclass(frozen=True)
class Instance:
    """An immutable parsed problem: coordinates, metric and derived tables.

    dist is a symmetric n x n int64 matrix with zero diagonal; neighbors[i]
    lists the other n-1 cities by ascending dist(i, .), ties broken by
    ascending city index.  Instances are safe for shared read access.
    """

    name: str
    metric: str
    coords: np.ndarray  # (n, 2) float64
    dist: np.ndarray = field(repr=False)  # (n, n) int64
    neighbors: np.ndarray = field(repr=False)  # (n, n-1) int64

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and self.metric == other.metric
            and np.array_equal(self.coords, other.coords)
        )


def _nint(x: float) -> int:
    return int(math.floor(x + 0.5))


def _geo_radians(coord: float) -> float:
    deg = _nint(coord)
    minutes = coord - deg
    return _GEO_PI * (deg + 5.0 * minutes / 3.0) / 180.0


def edge_weight(a, b, metric: str) -> int:
    """Canonical TSPLIB95 integer weight between two coordinate pairs."""
    if metric == "EUC_2D":
        return _nint(math.hypot(a[0] - b[0], a[1] - b[1]))
    if metric == "CEIL_2D":
        return int(math.ceil(math.hypot(a[0] - b[0], a[1] - b[1])))
    if metric == "ATT":
        r = math.sqrt(((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2) / 10.0)
        t = _nint(r)
        return t + 1 if t < r else t
    if metric == "GEO":
        lat_a, lon_a = _geo_radians(a[0]), _geo_radians(a[1])
        lat_b, lon_b = _geo_radians(b[0]), _geo_radians(b[1])
        q1 = math.cos(lon_a - lon_b)
        q2 = math.cos(lat_a - lat_b)
        q3 = math.cos(lat_a + lat_b)
        arg = 0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)
        arg = min(1.0, max(-1.0, arg))
        return int(_GEO_RADIUS * math.acos(arg) + 1.0)
    raise UnsupportedMetricError(f"unsupported EDGE_WEIGHT_TYPE: {metric}")


def build_matrix(coords: np.ndarray, metric: str) -> np.ndarray:
    """Full symmetric integer distance matrix for the given metric."""
    n = coords.shape[0]
    if metric in ("EUC_2D", "CEIL_2D", "ATT"):
        dx = coords[:, 0:1] - coords[:, 0:1].T
        dy = coords[:, 1:2] - coords[:, 1:2].T
        sq = dx * dx + dy * dy
        if metric == "EUC_2D":
            d = np.floor(np.sqrt(sq) + 0.5)
        elif metric == "CEIL_2D":
            d = np.ceil(np.sqrt(sq))
        else:
            r = np.sqrt(sq / 10.0)
            t = np.floor(r + 0.5)
            d = np.where(t < r, t + 1.0, t)
        dist = d.astype(np.int64)
    elif metric == "GEO":
        # scalar path: keeps acos bit-identical with edge_weight
        dist = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                w = edge_weight(coords[i], coords[j], "GEO")
                dist[i, j] = w
                dist[j, i] = w
    else:
        raise UnsupportedMetricError(f"unsupported EDGE_WEIGHT_TYPE: {metric}")
    np.fill_diagonal(dist, 0)
    return dist


def build_neighbors(dist: np.ndarray) -> np.ndarray:
    """For each city, the others sorted by ascending distance, ties by index."""
    n = dist.shape[0]
    order = np.argsort(dist, axis=1, kind="stable")
    out = np.empty((n, n - 1), dtype=np.int64)
    for i in range(n):
        row = order[i]
        out[i] = row[row != i]
    return out


def instance_from_coords(name: str, coords, metric: str = "EUC_2D") -> Instance:
    """Build an Instance directly from an (n, 2) coordinate array."""
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParseError("coords must be an (n, 2) array")
    if pts.shape[0] < 3:
        raise ParseError("an instance needs at least 3 cities")
    if metric not in SUPPORTED_METRICS:
        raise UnsupportedMetricError(f"unsupported EDGE_WEIGHT_TYPE: {metric}")
    dist = build_matrix(pts, metric)
    nbrs = build_neighbors(dist)
    for arr in (pts, dist, nbrs):
        arr.flags.writeable = False
    return Instance(name=name, metric=metric, coords=pts, dist=dist, neighbors=nbrs)


def parse_instance(text: str) -> Instance:
    """Parse a TSPLIB95 coordinate-based document into an Instance."""
    name = None
    dimension = None
    metric = None
    coords = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = lines[i]
        line = raw.strip()
        i += 1
        if not line or line == "EOF":
            continue
        key, _, value = line.partition(":")
        key = key.strip().upper()
        value = value.strip()
        if key == "NAME":
            name = value
        elif key == "DIMENSION":
            try:
                dimension = int(value)
            except ValueError:
                raise ParseError(f"line {i}: bad DIMENSION {value!r}") from None
        elif key == "EDGE_WEIGHT_TYPE":
            metric = value.upper()
            if metric not in SUPPORTED_METRICS:
                raise UnsupportedMetricError(
                    f"line {i}: unsupported EDGE_WEIGHT_TYPE {value!r}"
                )
        elif key == "NODE_COORD_SECTION":
            if dimension is None:
                raise ParseError(f"line {i}: NODE_COORD_SECTION before DIMENSION")
            while i < len(lines):
                row = lines[i].strip()
                i += 1
                if not row or row == "EOF":
                    i -= 1 if row == "EOF" else 0
                    break
                parts = row.split()
                if len(parts) != 3:
                    raise ParseError(f"line {i}: expected 'id x y', got {row!r}")
                try:
                    node = int(parts[0])
                    x, y = float(parts[1]), float(parts[2])
                except ValueError:
                    raise ParseError(f"line {i}: bad coordinate row {row!r}") from None
                if node in coords:
                    raise ParseError(f"line {i}: duplicate node id {node}")
                coords[node] = (x, y)
                if len(coords) == dimension:
                    break
    if name is None:
        raise ParseError("missing NAME keyword")
    if dimension is None:
        raise ParseError("missing DIMENSION keyword")
    if metric is None:
        raise ParseError("missing EDGE_WEIGHT_TYPE keyword")
    if len(coords) != dimension:
        raise ParseError(
            f"DIMENSION is {dimension} but NODE_COORD_SECTION has {len(coords)} rows"
        )
    if sorted(coords) != list(range(1, dimension + 1)):
        raise ParseError("node ids must be exactly 1..DIMENSION")
    pts = np.array([coords[k] for k in range(1, dimension + 1)], dtype=np.float64)
    return instance_from_coords(name, pts, metric)


def parse_instance_file(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _fmt(x: float) -> str:
    return repr(int(x)) if float(x).is_integer() else repr(float(x))


def emit_canonical(inst: Instance) -> str:
    """Canonical text form; parse_instance round-trips it exactly."""
    out = [
        f"NAME : {inst.name}",
        "TYPE : TSP",
        f"DIMENSION : {inst.n}",
        f"EDGE_WEIGHT_TYPE : {inst.metric}",
        "NODE_COORD_SECTION",
    ]
    for k in range(inst.n):
        out.append(f"{k + 1} {_fmt(inst.coords[k, 0])} {_fmt(inst.coords[k, 1])}")
    out.append("EOF")
    return "\n".join(out) + "\n"


def read_tour(text: str) -> np.ndarray:
    """Read a TSPLIB .tour document; returns 0-based city indices."""
    ids = []
    in_section = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if not in_section:
            if line.upper().startswith("TOUR_SECTION"):
                in_section = True
            continue
        for tok in line.split():
            if tok == "-1" or tok == "EOF":
                in_section = False
                break
            try:
                ids.append(int(tok))
            except ValueError:
                raise ParseError(f"line {ln}: bad tour entry {tok!r}") from None
        if not in_section:
            break
    if not ids:
        raise ParseError("no TOUR_SECTION entries found")
    return np.array(ids, dtype=np.int64) - 1


def read_tour_file(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return read_tour(fh.read())
