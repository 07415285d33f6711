"""Incidence structure of the projective space PG(3, q).

Points, lines and planes carry integer ids. Subspaces are stored both as
sorted id tuples and as Python-int bit masks over point ids, so the search
kernels can intersect them with a single ``&``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .field import DEFAULT_MAX_ORDER, Field, field_for_order


class GeometryError(ValueError):
    pass


def num_points(q: int) -> int:
    return q**3 + q**2 + q + 1


def num_lines(q: int) -> int:
    return (q**2 + 1) * (q**2 + q + 1)


def normalize(f: Field, v) -> tuple[int, ...]:
    """Scale ``v`` so its first nonzero coordinate is 1."""
    for c in v:
        if c:
            s = f.inv(c)
            return tuple(f.mul(s, x) for x in v)
    raise GeometryError("the zero vector is not a projective point")


def rank(f: Field, rows) -> int:
    """Rank over GF(q) by Gaussian elimination (independent of the incidence tables)."""
    m = [list(r) for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = f.inv(m[r][c])
        m[r] = [f.mul(s, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                t = m[i][c]
                m[i] = [f.sub(x, f.mul(t, y)) for x, y in zip(m[i], m[r])]
        r += 1
    return r


@dataclass(frozen=True, eq=False)
class Geometry:
    field: Field
    points: tuple[tuple[int, ...], ...]
    lines: tuple[tuple[int, ...], ...]
    planes: tuple[tuple[int, ...], ...]
    pair_to_line: np.ndarray = field(repr=False)
    line_masks: tuple[int, ...] = field(repr=False)
    plane_masks: tuple[int, ...] = field(repr=False)
    point_plane_mask: tuple[int, ...] = field(repr=False)
    point_index: dict = field(repr=False)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def all_points_mask(self) -> int:
        return (1 << len(self.points)) - 1

    @cached_property
    def pair_line_rows(self) -> list[list[int]]:
        """``pair_to_line`` as nested lists; list indexing is faster in hot loops."""
        return self.pair_to_line.tolist()

    @cached_property
    def line_planes(self) -> tuple[tuple[int, ...], ...]:
        out = []
        for pts in self.lines:
            m = self.point_plane_mask[pts[0]] & self.point_plane_mask[pts[1]]
            out.append(tuple(_bits(m)))
        return tuple(out)

    def point_id(self, coords) -> int:
        return self.point_index[normalize(self.field, coords)]

    def _distinct(self, *ids: int) -> None:
        if len(set(ids)) != len(ids):
            raise GeometryError(f"point ids must be pairwise distinct: {ids}")
        for i in ids:
            if not 0 <= i < len(self.points):
                raise GeometryError(f"no point with id {i}")

    def line_through(self, a: int, b: int) -> int:
        self._distinct(a, b)
        return int(self.pair_to_line[a, b])

    def collinear(self, a: int, b: int, c: int) -> bool:
        self._distinct(a, b, c)
        return bool(self.line_masks[self.pair_to_line[a, b]] >> c & 1)

    def coplanar(self, a: int, b: int, c: int, d: int) -> bool:
        self._distinct(a, b, c, d)
        ppm = self.point_plane_mask
        return (ppm[a] & ppm[b] & ppm[c] & ppm[d]) != 0

    def plane_through(self, a: int, b: int, c: int) -> int:
        self._distinct(a, b, c)
        ppm = self.point_plane_mask
        m = ppm[a] & ppm[b] & ppm[c]
        if m & (m - 1):
            raise GeometryError(f"points {a}, {b}, {c} are collinear; no unique plane")
        return m.bit_length() - 1

    def is_cap(self, ids) -> bool:
        """Cap test through the incidence tables."""
        ids = list(ids)
        if len(set(ids)) != len(ids):
            return False
        for a, b, c in itertools.combinations(ids, 3):
            if self.line_masks[self.pair_to_line[a, b]] >> c & 1:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "modulus": list(self.field.modulus),
            "points": [list(p) for p in self.points],
            "lines": [list(l) for l in self.lines],
            "planes": [list(h) for h in self.planes],
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(ids) -> int:
    m = 0
    for i in ids:
        m |= 1 << int(i)
    return m


@lru_cache(maxsize=8)
def build_geometry(q: int, max_order: int = DEFAULT_MAX_ORDER, verify: bool = True) -> Geometry:
    f = field_for_order(q, max_order)
    add = np.array(f.add_table, dtype=np.int64)
    mul = np.array(f.mul_table, dtype=np.int64)

    points = [v for v in itertools.product(range(q), repeat=4) if next(c for c in v + (1,) if c) == 1 and any(v)]
    n = len(points)
    coords = np.array(points, dtype=np.int64)
    code_to_id = np.full(q**4, -1, dtype=np.int64)
    weights = np.array([q**3, q**2, q, 1], dtype=np.int64)
    code_to_id[coords @ weights] = np.arange(n)

    # lines as row-reduced 2x4 matrices: pivots i < j
    r1s, r2s = [], []
    for i, j in itertools.combinations(range(4), 2):
        free1 = [k for k in range(i + 1, 4) if k != j]
        free2 = list(range(j + 1, 4))
        for vals1 in itertools.product(range(q), repeat=len(free1)):
            for vals2 in itertools.product(range(q), repeat=len(free2)):
                r1 = [0] * 4
                r2 = [0] * 4
                r1[i] = 1
                r2[j] = 1
                for k, x in zip(free1, vals1):
                    r1[k] = x
                for k, x in zip(free2, vals2):
                    r2[k] = x
                r1s.append(r1)
                r2s.append(r2)
    r1a = np.array(r1s, dtype=np.int64)
    r2a = np.array(r2s, dtype=np.int64)
    cols = [code_to_id[r2a @ weights]]
    for b in range(q):
        v = add[r1a, mul[b][r2a]]
        cols.append(code_to_id[v @ weights])
    line_arr = np.sort(np.stack(cols, axis=1), axis=1)
    # deterministic line order: lexicographic on sorted point ids
    line_arr = line_arr[np.lexsort(line_arr.T[::-1])]
    n_lines = len(line_arr)

    pair_to_line = np.full((n, n), -1, dtype=np.int32)
    ids = np.arange(n_lines)
    for a, b in itertools.permutations(range(q + 1), 2):
        pair_to_line[line_arr[:, a], line_arr[:, b]] = ids

    # planes x.w = 0, ordered by the normalised normal vector w
    add8 = add.astype(np.uint8)
    mul8 = mul.astype(np.uint8)
    c8 = coords.astype(np.uint8)
    dot = mul8[c8[:, None, 0], c8[None, :, 0]]  # [w, x]
    for k in range(1, 4):
        dot = add8[dot, mul8[c8[:, None, k], c8[None, :, k]]]
    inc = dot == 0
    planes = tuple(tuple(int(x) for x in np.flatnonzero(row)) for row in inc)

    lines = tuple(tuple(int(x) for x in row) for row in line_arr)
    line_masks = tuple(_mask(l) for l in lines)
    plane_masks = tuple(_mask(h) for h in planes)
    point_plane_mask = tuple(_mask(np.flatnonzero(col)) for col in inc.T)

    g = Geometry(
        field=f,
        points=tuple(points),
        lines=lines,
        planes=planes,
        pair_to_line=pair_to_line,
        line_masks=line_masks,
        plane_masks=plane_masks,
        point_plane_mask=point_plane_mask,
        point_index={p: i for i, p in enumerate(points)},
    )
    if verify:
        bad = [k for k, ok in check_invariants(g).items() if not ok]
        if bad:
            raise GeometryError(f"PG(3,{q}) failed invariant checks: {bad}")
    return g


def _distinct_per_row(table: np.ndarray) -> set[int]:
    rows = np.sort(table, axis=1)[:, 1:]  # drop the -1 diagonal entry
    return set((1 + (np.diff(rows, axis=1) != 0).sum(axis=1)).tolist())


def check_invariants(g: Geometry) -> dict[str, bool]:
    """Exact incidence counts of PG(3, q); every value should be True."""
    q = g.q
    n = num_points(q)
    tri = q * q + q + 1
    ptl = g.pair_to_line
    off_diag = ~np.eye(len(g.points), dtype=bool)
    line_counts = np.bincount(ptl[off_diag], minlength=len(g.lines)) if len(g.points) else np.array([])
    lp = g.line_planes
    planes_lines = np.bincount(np.concatenate([np.asarray(x) for x in lp]), minlength=len(g.planes))
    ppm = g.point_plane_mask
    closure = True
    for pts, hs in zip(g.lines, lp):
        m = ppm[pts[0]]
        for x in pts[1:]:
            m &= ppm[x]
        if m != _mask(hs):
            closure = False
            break
    return {
        "point_count": len(g.points) == n,
        "line_count": len(g.lines) == num_lines(q),
        "plane_count": len(g.planes) == n,
        "line_size": all(len(l) == q + 1 for l in g.lines),
        "plane_size": all(len(h) == tri for h in g.planes),
        "pair_unique_line": bool((ptl[off_diag] >= 0).all()) and bool((ptl.diagonal() == -1).all())
        and bool((line_counts == (q + 1) * q).all()),
        "pair_table_symmetric": bool((ptl == ptl.T).all()),
        "planes_per_line": all(len(hs) == q + 1 for hs in lp),
        "lines_per_plane": bool((planes_lines == tri).all()),
        "lines_per_point": _distinct_per_row(ptl) == {tri},
        "planes_per_point": all(m.bit_count() == tri for m in ppm),
        "plane_contains_line_closure": closure,
    }
