import itertools
import json
import random

import pytest

from capcount.geometry import (
    GeometryError,
    build_geometry,
    check_invariants,
    normalize,
    num_lines,
    num_points,
    rank,
)
from oracles import subspace_counts

SUPPORTED = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
SMALL = [2, 3, 4, 5]


@pytest.mark.parametrize("q", SUPPORTED)
def test_counts(q):
    g = build_geometry(q)
    n_pts, n_lines = subspace_counts(q)
    assert g.n_points == n_pts == num_points(q)
    assert len(g.lines) == n_lines == num_lines(q)
    assert len(g.planes) == n_pts


@pytest.mark.parametrize("q", SUPPORTED)
def test_invariants(q):
    inv = check_invariants(build_geometry(q))
    assert inv and all(inv.values()), inv


def test_spot_values():
    assert (num_points(2), num_lines(2)) == (15, 35)
    assert (num_points(3), num_lines(3)) == (40, 130)
    assert (num_points(4), num_lines(4)) == (85, 357)


def test_collinear_coplanar_examples():
    g = build_geometry(2)
    a, b, c = g.point_id((1, 0, 0, 0)), g.point_id((0, 1, 0, 0)), g.point_id((1, 1, 0, 0))
    d = g.point_id((0, 0, 1, 0))
    assert g.collinear(a, b, c)
    assert not g.collinear(a, b, d)
    assert g.coplanar(a, b, c, d)
    assert not g.coplanar(a, b, d, g.point_id((0, 0, 0, 1)))
    assert g.point_id((1, 1, 0, 0)) == g.point_id(normalize(g.field, (1, 1, 0, 0)))


def test_plane_through_collinear_raises():
    g = build_geometry(2)
    a, b = 0, 1
    c = next(x for x in range(g.n_points) if x not in (a, b) and g.collinear(a, b, x))
    with pytest.raises(GeometryError):
        g.plane_through(a, b, c)


@pytest.mark.parametrize("q", [3, 4, 5])
def test_scalar_multiples_normalize_together(q):
    g = build_geometry(q)
    f = g.field
    for v in itertools.product(range(q), repeat=4):
        if any(v):
            p = g.point_id(v)
            assert g.points[p] == normalize(f, v)
    mult = {}
    for v in itertools.product(range(q), repeat=4):
        if any(v):
            mult[normalize(f, v)] = mult.get(normalize(f, v), 0) + 1
    assert set(mult.values()) == {q - 1}


@pytest.mark.parametrize("q", SMALL)
def test_plane_meets_line(q):
    g = build_geometry(q)
    sizes = {bin(pm & lm).count("1") for pm in g.plane_masks for lm in g.line_masks}
    assert sizes == {1, q + 1}


@pytest.mark.parametrize("q", SMALL)
def test_collinear_matches_rank(q):
    g = build_geometry(q)
    rng = random.Random(q)
    for _ in range(2000):
        a, b, c = rng.sample(range(g.n_points), 3)
        assert g.collinear(a, b, c) == (rank(g.field, [g.points[i] for i in (a, b, c)]) == 2)
    for _ in range(1000):
        pts = rng.sample(range(g.n_points), 4)
        assert g.coplanar(*pts) == (rank(g.field, [g.points[i] for i in pts]) <= 3)


def test_is_cap():
    g = build_geometry(2)
    assert g.is_cap([g.point_id(v) for v in [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]])
    assert not g.is_cap([g.point_id(v) for v in [(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)]])


def test_json_dump(tmp_path):
    g = build_geometry(2)
    path = tmp_path / "g.json"
    g.dump(path)
    doc = json.loads(path.read_text())
    assert doc == json.loads(json.dumps(g.to_json()))
    assert len(doc["points"]) == 15


def test_unsupported_order():
    with pytest.raises(ValueError):
        build_geometry(6)
    with pytest.raises(ValueError):
        build_geometry(32)
