import numpy as np
import pytest

from rclc.errors import EmptyIntersection, InvalidBox
from rclc.geometry import BoundingBox, align_box, compressed_area, union_box

from conftest import random_box, rasterized_union


def test_box_invariants():
    box = BoundingBox(10, 20, 30, 50)
    assert (box.width, box.height, box.area) == (20, 30, 600)
    with pytest.raises(InvalidBox):
        BoundingBox(10, 10, 10, 20)
    with pytest.raises(InvalidBox):
        BoundingBox(-1, 0, 5, 5)


def test_union_examples():
    assert union_box(BoundingBox(10, 10, 50, 50), BoundingBox(30, 30, 70, 70)) \
        == BoundingBox(10, 10, 70, 70)
    a = BoundingBox(3, 4, 9, 11)
    assert union_box(a, a) == a
    assert union_box(BoundingBox(0, 0, 2, 2), BoundingBox(100, 100, 102, 102)) \
        == BoundingBox(0, 0, 102, 102)


def test_union_algebra(rng):
    for _ in range(200):
        a = random_box(rng, 200, 150)
        b = random_box(rng, 200, 150)
        c = random_box(rng, 200, 150)
        u = union_box(a, b)
        assert u == union_box(b, a)
        assert union_box(union_box(a, b), c) == union_box(a, union_box(b, c))
        assert u.contains(a) and u.contains(b)
        # minimality: every edge of the union is pinned by an input corner
        assert u.x0 in (a.x0, b.x0) and u.y0 in (a.y0, b.y0)
        assert u.x1 in (a.x1, b.x1) and u.y1 in (a.y1, b.y1)


def test_compressed_area_examples():
    assert compressed_area(BoundingBox(100, 100, 200, 200),
                           BoundingBox(150, 150, 250, 250)) \
        == BoundingBox(100, 100, 250, 250)
    same = BoundingBox(5, 6, 20, 30)
    assert compressed_area(same, same) == same


def test_compressed_area_displacement_closed_form():
    # same-size boxes displaced by (dx, dy) cover (w+|dx|)(h+|dy|)
    current = BoundingBox(130, 100, 230, 200)
    reference = BoundingBox(100, 100, 200, 200)
    got = compressed_area(current, reference)
    assert got.area == (100 + 30) * 100 == 13000
    assert got.as_tuple() == rasterized_union(current, reference)


def test_compressed_area_matches_rasterized_union(rng):
    for _ in range(200):
        a = random_box(rng, 120, 90)
        b = random_box(rng, 120, 90)
        assert compressed_area(a, b).as_tuple() == rasterized_union(a, b)
        assert compressed_area(a, b).contains(a)
        assert compressed_area(a, b).contains(b)


def test_compressed_area_monotone_in_motion():
    w, h = 40, 25
    base = BoundingBox(100, 100, 100 + w, 100 + h)
    last_area = 0
    for dx in range(0, 60, 5):
        moved = BoundingBox(100 + dx, 100, 100 + dx + w, 100 + h)
        area = compressed_area(moved, base).area
        assert area == (w + dx) * h
        assert area >= last_area
        last_area = area
    for dy in range(1, 20):
        moved = BoundingBox(100, 100 + dy, 100 + w, 100 + dy + h)
        assert compressed_area(moved, base).area == w * (h + dy)


def test_align_box_examples():
    assert align_box(BoundingBox(13, 9, 61, 43), 16, 1920, 1080) \
        == BoundingBox(0, 0, 64, 48)
    aligned = BoundingBox(32, 16, 64, 48)
    assert align_box(aligned, 16, 1920, 1080) == aligned
    assert align_box(BoundingBox(1910, 1070, 1930, 1090), 16, 1920, 1080) \
        == BoundingBox(1904, 1056, 1920, 1080)


def test_align_box_grid_one_is_identity():
    box = BoundingBox(13, 9, 61, 43)
    assert align_box(box, 1, 100, 100) == box


def test_align_box_contains_frame_intersection(rng):
    for grid in (2, 4, 8, 16):
        for _ in range(100):
            b = random_box(rng, 140, 100)
            if b.x0 >= 128 or b.y0 >= 96:
                continue  # no frame intersection
            out = align_box(b, grid, 128, 96)
            clipped = BoundingBox(b.x0, b.y0, min(b.x1, 128), min(b.y1, 96))
            assert out.contains(clipped)
            for coord, limit in ((out.x0, 128), (out.y0, 96)):
                assert coord % grid == 0
            assert out.x1 % grid == 0 or out.x1 == 128
            assert out.y1 % grid == 0 or out.y1 == 96


def test_align_box_empty_intersection():
    with pytest.raises(EmptyIntersection):
        align_box(BoundingBox(200, 10, 220, 30), 16, 128, 128)
