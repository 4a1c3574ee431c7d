import math
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from origami_motor.errors import GeometryError, ParameterError
from origami_motor.geometry import CylinderSpec, KreslingCell, side_length
from origami_motor.pattern import (
    SvgStyle,
    build_pattern,
    crease_table,
    emit_svg,
    generate_crease_pattern,
    generate_electrode_layout,
)

DATA = Path(__file__).parent / "data"
ROTOR = CylinderSpec(KreslingCell.from_degrees(30, 10, 57), 2, "rotor")
STATOR = CylinderSpec(KreslingCell.from_degrees(41, 8, 57), 2, "stator")
SVG_NS = "{http://www.w3.org/2000/svg}"


def seg_dist(p, a, b):
    """Distance from point p to segment ab."""
    p, a, b = map(np.asarray, (p, a, b))
    ab = b - a
    t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def poly_seg_dist(poly, a, b):
    """Minimum distance between a convex polygon's boundary and a segment (no crossing assumed)."""
    n = len(poly)
    d = min(seg_dist(p, a, b) for p in poly)
    for k in range(n):
        p, q = poly[k], poly[(k + 1) % n]
        d = min(d, seg_dist(a, p, q), seg_dist(b, p, q))
    return d


def point_in_convex(p, poly):
    cross = []
    for k in range(len(poly)):
        e = poly[(k + 1) % len(poly)] - poly[k]
        r = p - poly[k]
        cross.append(e[0] * r[1] - e[1] * r[0])
    cross = np.array(cross)
    return bool(np.all(cross >= 0) or np.all(cross <= 0))


@pytest.mark.parametrize("spec, verts, diags", [(ROTOR, 36, 22), (STATOR, 30, 18)])
def test_lattice_counts(spec, verts, diags):
    pat = generate_crease_pattern(spec)
    N, M = spec.cell.N, spec.M
    assert len(pat.vertices) == (N + 2) * (M + 1) == verts
    assert len(pat.diagonals()) == (N + 1) * M == diags
    assert pat.width == pytest.approx((N + 1) * side_length(spec.cell), abs=1e-12)
    kinds = [c.kind for c in pat.creases]
    assert kinds.count("mountain") == (N + 1) * (M - 1)
    assert kinds.count("perforation") == N * M
    assert kinds.count("border") == 2 * (N + 1) + 2 * M


def test_rotor_width_value():
    assert generate_crease_pattern(ROTOR).width == pytest.approx(11 * 18.541, abs=5e-3)


def test_diagonal_angle_is_theta0():
    pat = generate_crease_pattern(ROTOR)
    for c in pat.diagonals():
        (x1, y1), (x2, y2) = pat.segment(c)
        assert math.degrees(math.atan2(y2 - y1, x2 - x1)) == pytest.approx(57.0, abs=1e-9)


def test_chirality_mirrors_diagonals():
    right = generate_crease_pattern(ROTOR, "right")
    left = generate_crease_pattern(ROTOR, "left")
    assert np.array_equal(right.vertices, left.vertices)
    rd = {(c.start, c.end) for c in right.diagonals()}
    ld = {(c.start, c.end) for c in left.diagonals()}
    assert rd.isdisjoint(ld)
    assert len(ld) == len(rd)
    for c in left.diagonals():
        (x1, y1), (x2, y2) = left.segment(c)
        assert x2 < x1 and y2 > y1
    with pytest.raises(ParameterError):
        generate_crease_pattern(ROTOR, "up")


def test_zero_angle_cannot_be_laid_out():
    with pytest.raises(GeometryError):
        generate_crease_pattern(CylinderSpec(KreslingCell(30.0, 4, 0.0), 1))


def test_stator_strips_follow_diagonals():
    pat = build_pattern(STATOR)
    strips = pat.electrode_regions
    assert len(strips) == 18
    assert sum(e.electrical for e in strips) == 16
    assert {e.column for e in strips if not e.electrical} == {STATOR.cell.N}
    diags = pat.diagonals()
    for e in strips:
        p0, q0 = map(np.asarray, e.centerline)
        seg = next(pat.segment(c) for c in diags if seg_dist(p0, *pat.segment(c)) < 1e-9)
        assert seg_dist(q0, *seg) < 1e-9
        centroid = e.polygon.mean(axis=0)
        assert seg_dist(centroid, *seg) < 1e-9
        widths = [seg_dist(p, *seg) for p in e.polygon]
        assert widths == pytest.approx([0.75] * 4, abs=1e-9)


def test_rotor_pads_clear_every_crease():
    pat = build_pattern(ROTOR)
    pads = pat.electrode_regions
    assert len(pads) == 22
    assert sum(e.electrical for e in pads) == 20
    for e in pads:
        assert len(e.polygon) >= 3
        for c in pat.creases:
            assert poly_seg_dist(e.polygon, *map(np.asarray, pat.segment(c))) >= 1.0 - 1e-9


def test_rotor_pads_inside_their_cell():
    pat = build_pattern(ROTOR)
    V, v = pat.vertices, pat.vertex_index
    for e in pat.electrode_regions:
        i, j = e.column, e.row
        cell = np.array([V[v(i, j)], V[v(i + 1, j)], V[v(i + 1, j + 1)], V[v(i, j + 1)]])
        assert all(point_in_convex(p, cell) for p in e.polygon)


def test_layout_role_mismatch():
    with pytest.raises(ParameterError):
        generate_electrode_layout(ROTOR, role="stator")


def test_svg_is_well_formed():
    svg = emit_svg(build_pattern(ROTOR))
    root = ET.fromstring(svg.encode("utf-8"))
    assert root.tag == SVG_NS + "svg"
    assert root.get("width").endswith("mm")
    groups = {g.get("id"): g for g in root.iter(SVG_NS + "g")}
    assert set(groups) == {"tabs", "creases", "electrodes"}
    assert len(groups["creases"]) == len(build_pattern(ROTOR).creases)
    assert len(groups["electrodes"]) == 22
    dashes = [ln.get("stroke-dasharray") for ln in groups["creases"]]
    assert dashes.count("2,1") == 22


def test_svg_document_width():
    pat = build_pattern(ROTOR)
    xmin, _, xmax, _ = pat.bounds()
    root = ET.fromstring(emit_svg(pat, SvgStyle(margin=5.0)).encode())
    assert float(root.get("viewBox").split()[2]) == pytest.approx(xmax - xmin + 10.0, abs=1e-4)


def test_regeneration_is_byte_identical():
    a = emit_svg(build_pattern(ROTOR)).encode("utf-8")
    b = emit_svg(build_pattern(ROTOR)).encode("utf-8")
    assert a == b
    assert crease_table(build_pattern(STATOR)) == crease_table(build_pattern(STATOR))


def test_matches_frozen_svg():
    frozen = (DATA / "rotor_right.svg").read_bytes()
    assert emit_svg(build_pattern(ROTOR)).encode("utf-8") == frozen


def test_crease_table_rows():
    table = crease_table(generate_crease_pattern(STATOR)).splitlines()
    assert table[0] == "x1_mm,y1_mm,x2_mm,y2_mm,kind"
    assert len(table) == 1 + len(generate_crease_pattern(STATOR).creases)
    assert all(row.count(",") == 4 for row in table)
