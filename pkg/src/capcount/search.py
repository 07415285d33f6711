"""Exhaustive counting engines over PG(3, q).

Point sets are Python-int bit masks over point ids. The cap kernel keeps a
candidate mask of points that are above the last chosen id and off every
line spanned by the chosen points; the last level is counted by popcount.
"""

from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Iterator, Sequence

from .geometry import Geometry, build_geometry, rank
from .planar_space import (
    IsoClass,
    PlanarSpace,
    canonical_form,
    validate,
)

log = logging.getLogger(__name__)

METHODS = ("plain", "triple_symmetry")
MIN_N, MAX_N = 3, 8


class SearchError(ValueError):
    pass


@dataclass
class CapCount:
    q: int
    n: int
    unordered: int
    ordered: int
    nodes_visited: int
    method: str
    seconds: float = 0.0


@dataclass
class ClassRow:
    iso: IsoClass
    unordered_count: int

    @property
    def labeled_count(self) -> int:
        return factorial(self.iso.n) // self.iso.aut_size

    @property
    def A_f(self) -> int:
        return self.iso.aut_size * self.unordered_count


@dataclass
class ClassTable:
    q: int
    n: int
    rows: list[ClassRow] = field(default_factory=list)
    nodes_visited: int = 0

    @property
    def ordered_total(self) -> int:
        return sum(r.labeled_count * r.A_f for r in self.rows)

    @property
    def unordered_total(self) -> int:
        return sum(r.unordered_count for r in self.rows)


def _check_n(n: int, lo: int = MIN_N, hi: int = MAX_N) -> None:
    if not lo <= n <= hi:
        raise SearchError(f"n={n} outside the supported range {lo}..{hi}")


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def canonical_triple(g: Geometry) -> tuple[int, int, int]:
    """Points 0, 1 and the first point off their line."""
    off = g.all_points_mask & ~g.line_masks[g.pair_to_line[0, 1]]
    return (0, 1, (off & -off).bit_length() - 1)


def ordered_noncollinear_triples(q: int) -> int:
    n = q**3 + q**2 + q + 1
    return n * (n - 1) * (n - q - 1)


class _CapKernel:
    def __init__(self, g: Geometry):
        self.ptl = g.pair_line_rows
        self.lm = g.line_masks
        self.nodes = 0

    def count(self, chosen: list[int], cand: int, k: int) -> int:
        """Sets of ``k`` more points from ``cand`` (increasing ids) keeping ``chosen`` a cap."""
        self.nodes += 1
        if k == 1:
            return cand.bit_count()
        if k == 0:
            return 1
        ptl, lm = self.ptl, self.lm
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            p = low.bit_length() - 1
            row = ptl[p]
            f = 0
            for c in chosen:
                f |= lm[row[c]]
            nxt = cand & ~f
            if k == 2:
                self.nodes += 1
                total += nxt.bit_count()
            elif nxt.bit_count() >= k - 1:
                chosen.append(p)
                total += self.count(chosen, nxt, k - 1)
                chosen.pop()
        return total

    def iterate(self, chosen: list[int], cand: int, k: int) -> Iterator[tuple[int, ...]]:
        if k == 0:
            yield tuple(chosen)
            return
        ptl, lm = self.ptl, self.lm
        while cand:
            low = cand & -cand
            cand ^= low
            p = low.bit_length() - 1
            row = ptl[p]
            f = 0
            for c in chosen:
                f |= lm[row[c]]
            chosen.append(p)
            yield from self.iterate(chosen, cand & ~f, k - 1)
            chosen.pop()


def _forbidden(g: Geometry, pts: Sequence[int]) -> int:
    f = 0
    for a, b in itertools.combinations(pts, 2):
        f |= g.line_masks[g.pair_to_line[a, b]]
    for a in pts:
        f |= 1 << a
    return f


def _root_task(args) -> tuple[int, int]:
    q, n, p = args
    g = build_geometry(q)
    k = _CapKernel(g)
    cand = g.all_points_mask & ~((1 << (p + 1)) - 1)
    return k.count([p], cand, n - 1), k.nodes


def count_caps(g: Geometry, n: int, method: str = "plain", threads: int = 1) -> CapCount:
    """Count n-caps exactly; ``ordered`` is the number of labeled n-tuples."""
    _check_n(n)
    if method in ("triple", "triple_symmetry"):
        method = "triple_symmetry"
    if method not in METHODS:
        raise SearchError(f"unknown method {method!r}")
    t0 = time.perf_counter()
    if method == "plain":
        if threads > 1:
            with ProcessPoolExecutor(threads) as ex:
                parts = list(ex.map(_root_task, [(g.q, n, p) for p in range(g.n_points)]))
            unordered = sum(c for c, _ in parts)
            nodes = sum(k for _, k in parts) + 1
        else:
            k = _CapKernel(g)
            unordered = k.count([], g.all_points_mask, n)
            nodes = k.nodes
        ordered = unordered * factorial(n)
    else:
        t = list(canonical_triple(g))
        k = _CapKernel(g)
        cand = g.all_points_mask & ~_forbidden(g, t)
        ext = k.count(t, cand, n - 3)
        nodes = k.nodes
        ordered = ordered_noncollinear_triples(g.q) * factorial(n - 3) * ext
        unordered, rem = divmod(ordered, factorial(n))
        assert rem == 0
    return CapCount(g.q, n, unordered, ordered, nodes, method, time.perf_counter() - t0)


def iter_caps(g: Geometry, n: int) -> Iterator[tuple[int, ...]]:
    """Every n-cap as an increasing id tuple."""
    _check_n(n, 1)
    yield from _CapKernel(g).iterate([], g.all_points_mask, n)


def is_cap_by_rank(g: Geometry, ids: Sequence[int]) -> bool:
    """Cap test from coordinates alone: every 3 points have rank 3."""
    f = g.field
    return all(rank(f, [g.points[a], g.points[b], g.points[c]]) == 3 for a, b, c in itertools.combinations(ids, 3))


def classify_caps(g: Geometry, n: int, method: str = "plain") -> ClassTable:
    """Bucket n-caps by the isomorphism class of the planar space they induce.

    ``plain`` walks every cap. ``triple_symmetry`` walks only caps through a
    fixed non-collinear triple; each cap found then stands for
    ``#ordered triples * (n-3)! / n!`` unordered caps of its class.
    """
    _check_n(n, MIN_N, 7)
    k = _CapKernel(g)
    per_space: dict[PlanarSpace, int] = {}
    ppm = g.point_plane_mask
    triples = list(itertools.combinations(range(n), 3))
    per_key: dict[frozenset, int] = {}

    def plane_key(cap):
        # in a cap every triple spans a plane; group labels by that plane
        groups: dict[int, set[int]] = {}
        for i, j, l in triples:
            h = ppm[cap[i]] & ppm[cap[j]] & ppm[cap[l]]
            s = groups.get(h)
            if s is None:
                groups[h] = {i, j, l}
            else:
                s.update((i, j, l))
        return frozenset(frozenset(s) for s in groups.values() if len(s) >= 4)

    if method == "plain":
        for cap in k.iterate([], g.all_points_mask, n):
            key = plane_key(cap)
            per_key[key] = per_key.get(key, 0) + 1
        scale_num, scale_den = 1, 1
    elif method in ("triple", "triple_symmetry"):
        t = list(canonical_triple(g))
        cand = g.all_points_mask & ~_forbidden(g, t)
        for rest in k.iterate(list(t), cand, n - 3):
            key = plane_key(sorted(rest))
            per_key[key] = per_key.get(key, 0) + 1
        scale_num = ordered_noncollinear_triples(g.q) * factorial(n - 3)
        scale_den = factorial(n)
    else:
        raise SearchError(f"unknown method {method!r}")
    for key, c in per_key.items():
        per_space[PlanarSpace(n, (), key)] = c
    by_class: dict[tuple, list] = {}
    for ps, c in per_space.items():
        iso = canonical_form(ps)
        slot = by_class.setdefault(iso.canonical_encoding, [iso, 0])
        slot[1] += c
    rows = []
    for enc in sorted(by_class):
        iso, c = by_class[enc]
        u, rem = divmod(c * scale_num, scale_den)
        assert rem == 0, "class count not integral"
        rows.append(ClassRow(iso, u))
    return ClassTable(g.q, n, rows, k.nodes)


# -- strong realisations -----------------------------------------------------------


def _label_order(ps: PlanarSpace, use_symmetry: bool) -> tuple[list[int], bool]:
    """Most-constrained-first order; with ``use_symmetry`` it opens on a non-collinear triple."""
    n = ps.n
    structs = list(ps.lines) + list(ps.planes)

    def score(x, placed):
        return sum(len(s & placed) for s in structs if x in s), sum(x in s for s in structs), -x

    order: list[int] = []
    fixed_triple = False
    if use_symmetry and n >= 3:
        triples = [t for t in itertools.combinations(range(n), 3) if not ps.on_common_line(t)]
        if triples:
            t = max(triples, key=lambda t: (sum(len(s & set(t)) for s in structs), [-x for x in t]))
            order = list(t)
            fixed_triple = True
    while len(order) < n:
        placed = set(order)
        x = max((y for y in range(n) if y not in placed), key=lambda y: score(y, placed))
        order.append(x)
    return order, fixed_triple


def _constraint_plan(ps: PlanarSpace, order: list[int]):
    """For each position: pair constraints and triple constraints against earlier labels."""
    plan = []
    for k, x in enumerate(order):
        earlier = order[:k]
        pairs = []
        for i, j in itertools.combinations(range(k), 2):
            pairs.append((i, j, ps.on_common_line((earlier[i], earlier[j], x))))
        triples = []
        feasible = True
        for i, j, l in itertools.combinations(range(k), 3):
            tri = (earlier[i], earlier[j], earlier[l])
            quad = tri + (x,)
            want = ps.on_common_plane(quad) or ps.on_common_line(quad)
            if ps.on_common_line(tri):
                # images of a collinear triple plus any point are coplanar
                if not want:
                    feasible = False
                continue
            triples.append((i, j, l, want))
        plan.append((pairs, triples, feasible))
    return plan


class _RealizationKernel:
    def __init__(self, g: Geometry, plan):
        self.ptl = g.pair_line_rows
        self.lm = g.line_masks
        self.pm = g.plane_masks
        self.ppm = g.point_plane_mask
        self.plan = plan
        self.n = len(plan)
        self.nodes = 0

    def candidates(self, k: int, img: list[int], unused: int) -> int:
        pairs, triples, feasible = self.plan[k]
        if not feasible:
            return 0
        cand = unused
        ptl, lm = self.ptl, self.lm
        for i, j, want in pairs:
            m = lm[ptl[img[i]][img[j]]]
            cand = cand & m if want else cand & ~m
            if not cand:
                return 0
        ppm = self.ppm
        for i, j, l, want in triples:
            h = (ppm[img[i]] & ppm[img[j]] & ppm[img[l]]).bit_length() - 1
            m = self.pm[h]
            cand = cand & m if want else cand & ~m
            if not cand:
                return 0
        return cand

    def count(self, k: int, img: list[int], unused: int) -> int:
        self.nodes += 1
        cand = self.candidates(k, img, unused)
        if k == self.n - 1:
            return cand.bit_count()
        total = 0
        for p in _bits(cand):
            img.append(p)
            total += self.count(k + 1, img, unused & ~(1 << p))
            img.pop()
        return total

    def iterate(self, k: int, img: list[int], unused: int):
        if k == self.n:
            yield tuple(img)
            return
        for p in _bits(self.candidates(k, img, unused)):
            img.append(p)
            yield from self.iterate(k + 1, img, unused & ~(1 << p))
            img.pop()


@dataclass
class RealizationCount:
    q: int
    count: int
    nodes_visited: int
    method: str
    seconds: float = 0.0


def realization_count(g: Geometry, ps: PlanarSpace, use_symmetry: bool = True) -> RealizationCount:
    """Strong realisations of ``ps`` with search statistics."""
    rep = validate(ps, True)
    if not rep.ok:
        raise SearchError(f"invalid planar space: {rep.violations[:3]}")
    t0 = time.perf_counter()
    if ps.n == 0:
        return RealizationCount(g.q, 1, 0, "plain")
    if ps.n > g.n_points:
        return RealizationCount(g.q, 0, 0, "plain")
    order, fixed = _label_order(ps, use_symmetry)
    kern = _RealizationKernel(g, _constraint_plan(ps, order))
    if fixed:
        t = list(canonical_triple(g))
        # the fixed triple must itself satisfy the constraints at positions 1, 2
        if ps.n == 3:
            total = 1
        else:
            unused = g.all_points_mask & ~sum(1 << p for p in t)
            total = kern.count(3, t, unused)
        total *= ordered_noncollinear_triples(g.q)
        method = "triple_symmetry"
    else:
        total = kern.count(0, [], g.all_points_mask)
        method = "plain"
    return RealizationCount(g.q, total, kern.nodes, method, time.perf_counter() - t0)


def count_strong_realizations(g: Geometry, ps: PlanarSpace, use_symmetry: bool = True) -> int:
    return realization_count(g, ps, use_symmetry).count


def iter_realizations(g: Geometry, ps: PlanarSpace) -> Iterator[tuple[int, ...]]:
    """Every strong realisation as a tuple ``(sigma(0), ..., sigma(n-1))``."""
    order, _ = _label_order(ps, False)
    kern = _RealizationKernel(g, _constraint_plan(ps, order))
    for img in kern.iterate(0, [], g.all_points_mask):
        sigma = [0] * ps.n
        for lab, p in zip(order, img):
            sigma[lab] = p
        yield tuple(sigma)


# -- decomposition ---------------------------------------------------------------------


@dataclass
class DecompositionReport:
    q: int
    n: int
    ordered_count: int
    table_total: int
    class_checks: list[tuple[IsoClass, int, int]]  # (class, A_f from table, recount)

    @property
    def total_ok(self) -> bool:
        return self.ordered_count == self.table_total

    @property
    def mismatches(self) -> list[tuple[IsoClass, int, int]]:
        return [c for c in self.class_checks if c[1] != c[2]]

    @property
    def passed(self) -> bool:
        return self.total_ok and not self.mismatches and all(
            not c[0].representative.lines for c in self.class_checks
        )


def verify_decomposition(
    g: Geometry, n: int, classify_method: str = "plain", count_method: str = "triple_symmetry"
) -> DecompositionReport:
    """Check that per-class realisation counts add up to the ordered cap count."""
    table = classify_caps(g, n, classify_method)
    cc = count_caps(g, n, count_method)
    checks = []
    for row in table.rows:
        recount = count_strong_realizations(g, row.iso.representative)
        checks.append((row.iso, row.A_f, recount))
        if recount != row.A_f:
            log.error("q=%d n=%d class %s: table %d vs recount %d", g.q, n, row.iso.representative, row.A_f, recount)
    return DecompositionReport(g.q, n, cc.ordered, table.ordered_total, checks)


# -- maximum caps ------------------------------------------------------------------------

EXACT_MAX_CAP_Q = (2, 3)


def _elliptic_quadric(g: Geometry) -> list[int]:
    """Zeros of x0^2 + x0 x1 + c x1^2 + x2 x3 with t^2 + t + c irreducible."""
    f = g.field
    c = next(
        c for c in range(f.q)
        if all(f.add(f.add(f.mul(t, t), t), c) != 0 for t in range(f.q))
    )
    out = []
    for i, (x0, x1, x2, x3) in enumerate(g.points):
        val = f.add(f.add(f.mul(x0, x0), f.mul(x0, x1)), f.add(f.mul(c, f.mul(x1, x1)), f.mul(x2, x3)))
        if val == 0:
            out.append(i)
    return out


def elliptic_quadric(g: Geometry) -> list[int]:
    pts = _elliptic_quadric(g)
    if not g.is_cap(pts):
        raise AssertionError("quadric is not a cap")
    return pts


def max_cap(g: Geometry, mode: str = "exact") -> list[int]:
    """A largest cap (``exact``, q in {2, 3}) or a verified large cap (``lower_bound``).

    ``lower_bound`` grows an elliptic quadric greedily; it certifies only that
    caps of that size exist.
    """
    if mode == "lower_bound":
        cap = elliptic_quadric(g)
        forb = _forbidden(g, cap)
        for p in range(g.n_points):
            if not forb >> p & 1:
                forb |= 1 << p
                for c in cap:
                    forb |= g.line_masks[g.pair_to_line[p, c]]
                cap.append(p)
        assert g.is_cap(cap)
        return cap
    if mode != "exact":
        raise SearchError(f"unknown mode {mode!r}")
    if g.q not in EXACT_MAX_CAP_Q:
        raise SearchError(f"exact maximum cap search supports q in {EXACT_MAX_CAP_Q}, got {g.q}")
    return _branch_and_bound(g)


def max_cap_size(g: Geometry, mode: str = "exact") -> int:
    return len(max_cap(g, mode))


def _branch_and_bound(g: Geometry, seed: bool = True) -> list[int]:
    """Every cap of size >= 3 is equivalent to one through the canonical triple."""
    ptl, lm = g.pair_line_rows, g.line_masks
    start = list(canonical_triple(g))
    cand0 = g.all_points_mask & ~_forbidden(g, start)
    best = elliptic_quadric(g) if seed else list(start)
    if len(best) < 3:
        best = list(start)
    best_box = [best]

    def rec(chosen: list[int], cand: int):
        size = len(chosen)
        if size > len(best_box[0]):
            best_box[0] = list(chosen)
        while cand:
            if size + cand.bit_count() <= len(best_box[0]):
                return
            low = cand & -cand
            cand ^= low
            p = low.bit_length() - 1
            row = ptl[p]
            f = 0
            for c in chosen:
                f |= lm[row[c]]
            chosen.append(p)
            rec(chosen, cand & ~f)
            chosen.pop()

    rec(start, cand0)
    return best_box[0]
