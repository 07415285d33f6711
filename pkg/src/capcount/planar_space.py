"""Labeled planar spaces, hyperfigurations, isomorphism and census.

A planar space on labels ``0..n-1`` is stored by its full lines (>= 3
points) and full planes (>= 4 points). Two-point lines and three-point planes
are implicit and never stored.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

MAX_ENUMERATION_N = 8


def _fs(groups: Iterable[Iterable[int]]) -> frozenset[frozenset[int]]:
    return frozenset(frozenset(int(x) for x in g) for g in groups)


def _sorted_sets(groups) -> list[list[int]]:
    return sorted(sorted(g) for g in groups)


@dataclass(frozen=True)
class PlanarSpace:
    n: int
    lines: frozenset = frozenset()
    planes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "lines", _fs(self.lines))
        object.__setattr__(self, "planes", _fs(self.planes))

    @cached_property
    def collinear_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(self.lines)

    def on_common_line(self, pts: Iterable[int]) -> bool:
        s = set(pts)
        return any(s <= L for L in self.lines)

    def on_common_plane(self, pts: Iterable[int]) -> bool:
        s = set(pts)
        return any(s <= P for P in self.planes)

    def relabel(self, perm: Sequence[int]) -> "PlanarSpace":
        """Image under the bijection ``label x -> perm[x]``."""
        return PlanarSpace(
            self.n,
            [[perm[x] for x in L] for L in self.lines],
            [[perm[x] for x in P] for P in self.planes],
        )

    def to_json(self) -> dict:
        return {"n": self.n, "lines": _sorted_sets(self.lines), "planes": _sorted_sets(self.planes)}

    @classmethod
    def from_json(cls, doc: dict | str) -> "PlanarSpace":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(int(doc["n"]), doc.get("lines", []), doc.get("planes", []))

    def __repr__(self):
        fmt = lambda gs: "{" + ", ".join("".join(map(str, g)) if self.n <= 10 else str(g) for g in _sorted_sets(gs)) + "}"
        return f"PlanarSpace(n={self.n}, lines={fmt(self.lines)}, planes={fmt(self.planes)})"


@dataclass(frozen=True)
class PointIndex:
    i: int
    j: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.i, self.j)


@dataclass
class ValidationReport:
    violations: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def kinds(self) -> set[str]:
        return {v[0] for v in self.violations}


def validate(ps: PlanarSpace, enforce_closure: bool = True) -> ValidationReport:
    """Collect every axiom violation of ``ps``.

    With ``enforce_closure`` three further conditions are checked, each one
    necessary for a space to have any strong realization in PG(3, q):

    * a plane holding two points of a line holds the whole line;
    * a plane is not contained in a single line;
    * a line together with any further point spans a full plane.
    """
    rep = ValidationReport()
    v = rep.violations
    n = ps.n
    for L in ps.lines:
        if len(L) < 3:
            v.append(("line_too_small", tuple(sorted(L))))
        if not all(0 <= x < n for x in L):
            v.append(("label_out_of_range", tuple(sorted(L))))
    for P in ps.planes:
        if len(P) < 4:
            v.append(("plane_too_small", tuple(sorted(P))))
        if not all(0 <= x < n for x in P):
            v.append(("label_out_of_range", tuple(sorted(P))))

    pair_lines: dict[tuple[int, int], list] = {}
    for L in ps.lines:
        for pair in itertools.combinations(sorted(L), 2):
            pair_lines.setdefault(pair, []).append(L)
    for pair, ls in sorted(pair_lines.items()):
        if len(ls) > 1:
            v.append(("pair_in_two_lines", pair))

    planes = sorted(ps.planes, key=sorted)
    for P1, P2 in itertools.combinations(planes, 2):
        common = P1 & P2
        if len(common) >= 3 and not ps.on_common_line(common):
            tri = _noncollinear_triple(ps, common)
            v.append(("triple_in_two_planes", tri))

    if enforce_closure:
        for P in planes:
            if ps.on_common_line(P):
                v.append(("plane_collinear", tuple(sorted(P))))
            for L in ps.lines:
                if len(P & L) >= 2 and not L <= P:
                    v.append(("plane_partial_line", tuple(sorted(P)), tuple(sorted(L))))
        for L in sorted(ps.lines, key=sorted):
            for x in range(n):
                if x not in L and not ps.on_common_plane(L | {x}):
                    v.append(("line_point_uncovered", tuple(sorted(L)), x))
    return rep


def _noncollinear_triple(ps: PlanarSpace, pts) -> tuple[int, ...]:
    for t in itertools.combinations(sorted(pts), 3):
        if not ps.on_common_line(t):
            return t
    raise ValueError("all triples collinear")


def is_valid(ps: PlanarSpace, enforce_closure: bool = True) -> bool:
    return validate(ps, enforce_closure).ok


def point_index(ps: PlanarSpace, p: int) -> PointIndex:
    if not 0 <= p < ps.n:
        raise IndexError(f"label {p} out of range for a space on {ps.n} points")
    return PointIndex(sum(p in P for P in ps.planes), sum(p in L for L in ps.lines))


def _hyper_ok(idx: PointIndex) -> bool:
    return idx.i >= 4 or idx.j >= 3 or (idx.i, idx.j) == (3, 0)


def is_hyperfiguration(ps: PlanarSpace) -> bool:
    return all(_hyper_ok(point_index(ps, p)) for p in range(ps.n))


# -- catalog -----------------------------------------------------------------

def _sets(*groups: str) -> list[list[int]]:
    return [[int(c) for c in g] for g in groups]


CATALOG = {
    "example_2_5": PlanarSpace(4, _sets("012"), _sets("0123")),
    "sixpoint": PlanarSpace(6, _sets("012", "345"), _sets("0123", "0124", "0125", "0345", "1345", "2345")),
    "h1": PlanarSpace(7, [], _sets("0123", "0145", "0246", "1256", "1346", "2345")),
    "h2": PlanarSpace(7, [], _sets("0123", "0145", "0246", "0356", "1256", "1346", "2345")),
    "h3": PlanarSpace(7, _sets("012"), _sets("0123", "0124", "0125", "0126", "0345", "1346", "2356")),
    "h4": PlanarSpace(7, _sets("012", "034"), _sets("01234", "0125", "0126", "0345", "0346", "1356", "2456")),
    "h5": PlanarSpace(7, _sets("0123", "456"), _sets("01234", "01235", "01236", "0456", "1456", "2456", "3456")),
    "h6": PlanarSpace(7, _sets("012", "034", "056", "135", "146", "236", "245"), _sets("0123456")),
}

HYPERFIGURATION_NAMES = ("sixpoint", "h1", "h2", "h3", "h4", "h5", "h6")


def catalog(name: str) -> PlanarSpace:
    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown planar space {name!r}; known: {sorted(CATALOG)}") from None


# -- canonical form ------------------------------------------------------------

@dataclass(frozen=True)
class IsoClass:
    canonical_encoding: tuple
    aut_size: int
    representative: PlanarSpace

    @property
    def n(self) -> int:
        return self.representative.n

    @property
    def labeled_count(self) -> int:
        """Number of distinct labeled spaces in the class."""
        from math import factorial

        return factorial(self.n) // self.aut_size

    def encoding_str(self) -> str:
        n, ls, hs = self.canonical_encoding
        return f"{n}|" + ",".join(map(str, ls)) + "|" + ",".join(map(str, hs))


def _refine(colors: list[int], line_members, plane_members, lines_of, planes_of) -> list[int]:
    n = len(colors)
    count = len(set(colors))
    while True:
        sigs = []
        for x in range(n):
            ls = sorted(tuple(sorted(colors[y] for y in line_members[k] if y != x)) for k in lines_of[x])
            hs = sorted(tuple(sorted(colors[y] for y in plane_members[k] if y != x)) for k in planes_of[x])
            sigs.append((colors[x], tuple(ls), tuple(hs)))
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [order[s] for s in sigs]
        if len(order) == count:
            return colors
        count = len(order)


@lru_cache(maxsize=200_000)
def canonical_labeling(ps: PlanarSpace) -> tuple[tuple, tuple[int, ...], int]:
    """Return ``(encoding, perm, aut_size)`` with ``ps.relabel(perm)`` canonical.

    Individualisation-refinement: colour points by incidence invariants,
    refine to an equitable colouring, then branch on every member of the
    first non-singleton cell. The least leaf encoding is canonical; the
    number of leaves achieving it is the automorphism group order.
    """
    n = ps.n
    line_members = [sorted(L) for L in ps.lines]
    plane_members = [sorted(P) for P in ps.planes]
    lines_of = [[k for k, L in enumerate(line_members) if x in L] for x in range(n)]
    planes_of = [[k for k, P in enumerate(plane_members) if x in P] for x in range(n)]

    best: list = [None, None, 0]

    def leaf(colors):
        enc = (
            tuple(sorted(sum(1 << colors[x] for x in L) for L in line_members)),
            tuple(sorted(sum(1 << colors[x] for x in P) for P in plane_members)),
        )
        if best[0] is None or enc < best[0]:
            best[0], best[1], best[2] = enc, tuple(colors), 1
        elif enc == best[0]:
            best[2] += 1

    def search(colors):
        colors = _refine(colors, line_members, plane_members, lines_of, planes_of)
        if len(set(colors)) == n:
            leaf(colors)
            return
        sizes: dict[int, int] = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        target = min(c for c, s in sizes.items() if s > 1)
        for x in range(n):
            if colors[x] == target:
                nxt = [2 * c + 1 for c in colors]
                nxt[x] = 2 * colors[x]
                search(nxt)

    if n == 0:
        return (0, (), ()), (), 1
    search([0] * n)
    enc, perm, aut = best
    return (n,) + enc, perm, aut


@lru_cache(maxsize=200_000)
def canonical_form(ps: PlanarSpace) -> IsoClass:
    enc, perm, aut = canonical_labeling(ps)
    return IsoClass(enc, aut, ps.relabel(perm))


def are_isomorphic(ps1: PlanarSpace, ps2: PlanarSpace) -> tuple[int, ...] | None:
    """A bijection ``rho`` with ``ps1.relabel(rho) == ps2``, or None."""
    if ps1.n != ps2.n:
        return None
    e1, p1, _ = canonical_labeling(ps1)
    e2, p2, _ = canonical_labeling(ps2)
    if e1 != e2:
        return None
    inv2 = [0] * ps2.n
    for y, c in enumerate(p2):
        inv2[c] = y
    rho = tuple(inv2[p1[x]] for x in range(ps1.n))
    assert ps1.relabel(rho) == ps2
    return rho


def match_catalog(ps: PlanarSpace, names: Iterable[str] = HYPERFIGURATION_NAMES) -> list[str]:
    return [nm for nm in names if are_isomorphic(ps, CATALOG[nm]) is not None]


# -- realisations in PG(3, q) ---------------------------------------------------

def induced_planar_space(g, pts: Sequence[int]) -> PlanarSpace:
    """The planar space strongly realised by the point tuple ``pts`` (label k -> pts[k])."""
    pts = [int(p) for p in pts]
    if len(set(pts)) != len(pts):
        raise ValueError(f"point ids must be distinct: {pts}")
    n = len(pts)
    ptl = g.pair_line_rows
    ppm = g.point_plane_mask
    by_line: dict[int, set[int]] = {}
    for i, j in itertools.combinations(range(n), 2):
        s = by_line.setdefault(ptl[pts[i]][pts[j]], set())
        s.add(i)
        s.add(j)
    lines = [s for s in by_line.values() if len(s) >= 3]
    line_of_pair = {}
    for l, s in by_line.items():
        for pair in itertools.combinations(sorted(s), 2):
            line_of_pair[pair] = l
    seen_planes: dict[int, set[int]] = {}
    for i, j, k in itertools.combinations(range(n), 3):
        lm = g.line_masks[line_of_pair[(i, j)]]
        if lm >> pts[k] & 1:
            continue
        m = ppm[pts[i]] & ppm[pts[j]] & ppm[pts[k]]
        h = m.bit_length() - 1
        if h not in seen_planes:
            seen_planes[h] = {x for x in range(n) if ppm[pts[x]] >> h & 1}
    planes = [s for s in seen_planes.values() if len(s) >= 4]
    return PlanarSpace(n, lines, planes)


# -- census ------------------------------------------------------------------------

def _line_choices(cands: list[frozenset[int]], start: int, used: frozenset[int]) -> Iterator[list[frozenset[int]]]:
    yield []
    for i in range(start, len(cands)):
        c = cands[i]
        if used.isdisjoint(c):
            for rest in _line_choices(cands, i + 1, used | c):
                yield [c] + rest


def extensions(R: PlanarSpace, line_free: bool = False) -> Iterator[PlanarSpace]:
    """Every valid (closed) space on ``R.n + 1`` points whose deletion of the last point is ``R``."""
    m = R.n
    v = m
    RL = sorted(R.lines, key=sorted)
    RP = sorted(R.planes, key=sorted)
    covered = {pair for L in RL for pair in itertools.combinations(sorted(L), 2)}
    if line_free:
        line_cands: list[frozenset[int]] = []
    else:
        line_cands = list(RL) + [
            frozenset(pair) for pair in itertools.combinations(range(m), 2) if pair not in covered
        ]
    triples = [
        frozenset(t)
        for t in itertools.combinations(range(m), 3)
        if not R.on_common_line(t) and not R.on_common_plane(t)
    ]
    vset = frozenset([v])
    for residues in _line_choices(line_cands, 0, frozenset()):
        extended = {r for r in residues if r in R.lines}
        S_lines = [L for L in RL if L not in extended] + [r | vset for r in residues]

        def on_line(s: frozenset[int]) -> bool:
            return any(s <= L for L in S_lines)

        cands = [P | vset for P in RP] + [L | vset for L in RL if L not in extended] + [t | vset for t in triples]
        cands = [
            Q
            for Q in cands
            if not on_line(Q) and all(len(Q & L) < 2 or L <= Q for L in S_lines)
        ]
        k = len(cands)
        compat = [[True] * k for _ in range(k)]
        for a, b in itertools.combinations(range(k), 2):
            common = cands[a] & cands[b]
            if len(common) >= 3 and not on_line(common):
                compat[a][b] = compat[b][a] = False

        def families(start: int, chosen: list[int]) -> Iterator[list[int]]:
            yield chosen
            for i in range(start, k):
                if all(compat[i][j] for j in chosen):
                    yield from families(i + 1, chosen + [i])

        for fam in families(0, []):
            Qs = [cands[i] for i in fam]
            grown = {Q - vset for Q in Qs}
            S_planes = [P for P in RP if P not in grown] + Qs
            S = PlanarSpace(m + 1, S_lines, S_planes)
            if validate(S, True).ok:
                yield S


@lru_cache(maxsize=None)
def _classes(n: int, line_free: bool) -> tuple[IsoClass, ...]:
    if n == 0:
        return (canonical_form(PlanarSpace(0)),)
    found: dict[tuple, IsoClass] = {}
    for parent in _classes(n - 1, line_free):
        for S in extensions(parent.representative, line_free):
            c = canonical_form(S)
            found.setdefault(c.canonical_encoding, c)
    return tuple(found[k] for k in sorted(found))


FILTERS = ("all", "line_free", "hyperfigurations")


def enumerate_planar_spaces(n: int, filter: str = "all", max_n: int = MAX_ENUMERATION_N) -> list[IsoClass]:
    """One representative per isomorphism class of closed planar spaces on ``n`` points."""
    if filter not in FILTERS:
        raise ValueError(f"unknown filter {filter!r}; expected one of {FILTERS}")
    if not 0 <= n <= max_n:
        raise ValueError(f"n={n} outside the supported range 0..{max_n}")
    if filter == "line_free":
        return list(_classes(n, True))
    if filter == "all":
        return list(_classes(n, False))
    if n == 0:
        return [canonical_form(PlanarSpace(0))]
    found: dict[tuple, IsoClass] = {}
    for parent in _classes(n - 1, False):
        for S in extensions(parent.representative):
            if is_hyperfiguration(S):
                c = canonical_form(S)
                found.setdefault(c.canonical_encoding, c)
    return [found[k] for k in sorted(found)]
