"""Flat Kresling crease patterns with electrode layouts, exported as SVG.

The flat sheet is a lattice of ``N + 1`` sheared parallelogram cells per row
(one extra column is the glued overlap) and ``M`` rows. Cell ``(i, j)`` has
its lower-left corner at ``(i*a + j*s, j*h)`` where the shear ``s`` puts the
fold diagonal at ``theta0`` to the base. Lengths are millimetres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from shapely.geometry import LineString, Polygon

from .errors import GeometryError, ParameterError
from .geometry import CylinderSpec, deployed_geometry

Chirality = Literal["right", "left"]
CREASE_KINDS = ("mountain", "valley", "border", "perforation")


@dataclass(frozen=True)
class Crease:
    start: int
    end: int
    kind: str


@dataclass(frozen=True)
class Electrode:
    polygon: np.ndarray
    kind: str  # "stator-strip" or "rotor-pad"
    column: int
    row: int
    electrical: bool
    centerline: tuple | None = None


@dataclass
class CreasePattern:
    vertices: np.ndarray
    creases: list
    tabs: list
    columns: int
    rows: int
    a: float
    h: float
    shear: float
    chirality: str
    role: str
    electrode_regions: list = field(default_factory=list)

    @property
    def width(self) -> float:
        """Horizontal extent of one row of cells."""
        return self.columns * self.a

    def vertex_index(self, i: int, j: int) -> int:
        return j * (self.columns + 1) + i

    def diagonals(self) -> list:
        return [c for c in self.creases if c.kind == "valley"]

    def segment(self, crease: Crease) -> tuple:
        return tuple(self.vertices[crease.start]), tuple(self.vertices[crease.end])

    def bounds(self) -> tuple:
        pts = [self.vertices] + [np.asarray(t) for t in self.tabs]
        pts = np.vstack(pts)
        return float(pts[:, 0].min()), float(pts[:, 1].min()), float(pts[:, 0].max()), float(pts[:, 1].max())


def _tab(p, q, depth, outward):
    """Trapezoid tab on edge p->q, extruded by ``depth`` along ``outward``."""
    p, q = np.asarray(p), np.asarray(q)
    u = (q - p) / np.linalg.norm(q - p)
    inset = min(depth, 0.25 * np.linalg.norm(q - p))
    off = np.array([0.0, outward * depth])
    return np.array([p, q, q - inset * u + off, p + inset * u + off])


def generate_crease_pattern(spec: CylinderSpec, chirality: Chirality = "right",
                            tab_depth: float = 4.0) -> CreasePattern:
    """Lay out the flat crease pattern for one cylinder.

    Horizontal row creases are mountains, cell diagonals valleys, interior
    verticals perforated folds and the outline a border. ``chirality``
    selects which diagonal of each cell is folded; the vertex lattice is the
    same for both.
    """
    if chirality not in ("right", "left"):
        raise ParameterError(f"chirality must be 'right' or 'left', got {chirality!r}")
    if spec.cell.theta0 <= 0:
        raise GeometryError("theta0 must be positive to lay out a diagonal")
    geo = deployed_geometry(spec)
    a, h = geo.a, geo.h
    shear = h / math.tan(spec.cell.theta0) - a
    cols, rows = spec.cell.N + 1, spec.M

    jj, ii = np.meshgrid(np.arange(rows + 1), np.arange(cols + 1), indexing="ij")
    vertices = np.column_stack([(ii * a + jj * shear).ravel(), (jj * h).ravel()]).astype(float)

    def v(i, j):
        return j * (cols + 1) + i

    creases = []
    for j in range(rows + 1):
        kind = "border" if j in (0, rows) else "mountain"
        creases.extend(Crease(v(i, j), v(i + 1, j), kind) for i in range(cols))
    for i in range(cols + 1):
        kind = "border" if i in (0, cols) else "perforation"
        creases.extend(Crease(v(i, j), v(i, j + 1), kind) for j in range(rows))
    for j in range(rows):
        for i in range(cols):
            if chirality == "right":
                creases.append(Crease(v(i, j), v(i + 1, j + 1), "valley"))
            else:
                creases.append(Crease(v(i + 1, j), v(i, j + 1), "valley"))

    tabs = []
    if tab_depth > 0:
        for i in range(cols):
            tabs.append(_tab(vertices[v(i, 0)], vertices[v(i + 1, 0)], tab_depth, -1.0))
        for i in range(cols):
            tabs.append(_tab(vertices[v(i, rows)], vertices[v(i + 1, rows)], tab_depth, 1.0))

    return CreasePattern(vertices, creases, tabs, cols, rows, a, h, shear, chirality, spec.role)


def _strip(p, q, width, inset):
    p, q = np.asarray(p, float), np.asarray(q, float)
    length = np.linalg.norm(q - p)
    if length <= 2 * inset:
        raise GeometryError("diagonal too short for the strip inset")
    u = (q - p) / length
    n = np.array([-u[1], u[0]]) * (width / 2)
    p0, q0 = p + inset * u, q - inset * u
    return np.array([p0 - n, q0 - n, q0 + n, p0 + n]), (tuple(p0), tuple(q0))


def _pad(triangle, edge, inset, pad_width):
    """Part of ``triangle`` inset from its folds and within ``pad_width`` of ``edge``."""
    face = Polygon(triangle).buffer(-inset, join_style="mitre")
    if face.is_empty:
        raise GeometryError("cell face too small for the pad inset")
    band = LineString(edge).buffer(pad_width + inset, cap_style="flat")
    region = face.intersection(band)
    if region.is_empty or region.geom_type != "Polygon":
        raise GeometryError("pad region is empty")
    coords = np.array(region.exterior.coords)[:-1]
    # fix the starting vertex so output is stable across shapely versions
    start = int(np.lexsort((coords[:, 1], coords[:, 0]))[0])
    return np.roll(coords, -start, axis=0)


def generate_electrode_layout(spec: CylinderSpec, role=None, pattern: CreasePattern | None = None,
                              strip_width: float = 1.5, pad_inset: float = 1.0,
                              pad_width: float = 3.0) -> list:
    """Electrode polygons for a stator (strips) or rotor (pads).

    Stator strips run along every fold diagonal. Rotor pads sit in the face
    beside each vertical edge, one per cell and row so no pad crosses a
    fold. Electrodes in the overlap column are drawn but not electrical.
    """
    role = role or spec.role
    if role != spec.role:
        raise ParameterError(f"role {role!r} does not match the {spec.role!r} spec")
    pattern = pattern or generate_crease_pattern(spec)
    V = pattern.vertices
    v = pattern.vertex_index
    n_active = pattern.columns - 1
    out = []
    for j in range(pattern.rows):
        for i in range(pattern.columns):
            electrical = i < n_active
            if pattern.chirality == "right":
                diag = (V[v(i, j)], V[v(i + 1, j + 1)])
                face = (V[v(i, j)], V[v(i + 1, j)], V[v(i + 1, j + 1)])
            else:
                diag = (V[v(i + 1, j)], V[v(i, j + 1)])
                face = (V[v(i + 1, j)], V[v(i + 1, j + 1)], V[v(i, j + 1)])
            if role == "stator":
                poly, center = _strip(*diag, strip_width, pad_inset)
                out.append(Electrode(poly, "stator-strip", i, j, electrical, center))
            else:
                edge = (V[v(i + 1, j)], V[v(i + 1, j + 1)])
                poly = _pad(face, edge, pad_inset, pad_width)
                out.append(Electrode(poly, "rotor-pad", i, j, electrical))
    return out


@dataclass(frozen=True)
class SvgStyle:
    margin: float = 5.0
    stroke: float = 0.2
    border_stroke: float = 0.6
    mountain_color: str = "#d62728"
    valley_color: str = "#1f77b4"
    border_color: str = "#000000"
    perforation_color: str = "#555555"
    electrode_fill: str = "#b87333"
    dummy_fill: str = "#e0c0a0"
    tab_fill: str = "#eeeeee"
    decimals: int = 4


def _fmt(x: float, decimals: int) -> str:
    s = f"{x:.{decimals}f}"
    return "0" + s[2:] if s.startswith("-0") and float(s) == 0 else s


def emit_svg(pattern: CreasePattern, style: SvgStyle = SvgStyle()) -> str:
    """Render the pattern as an SVG 1.1 document in millimetre units."""
    xmin, ymin, xmax, ymax = pattern.bounds()
    m, d = style.margin, style.decimals
    width, height = xmax - xmin + 2 * m, ymax - ymin + 2 * m

    def pt(p):
        return f"{_fmt(p[0] - xmin + m, d)},{_fmt(ymax - p[1] + m, d)}"

    def line(p, q, attrs):
        (x1, y1), (x2, y2) = pt(p).split(","), pt(q).split(",")
        return f'    <line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"{attrs}/>'

    def polygon(poly, attrs):
        return f'    <polygon points="{" ".join(pt(p) for p in poly)}"{attrs}/>'

    sw, bw = _fmt(style.stroke, d), _fmt(style.border_stroke, d)
    crease_style = {
        "mountain": f' stroke="{style.mountain_color}" stroke-width="{sw}"',
        "valley": f' stroke="{style.valley_color}" stroke-width="{sw}" stroke-dasharray="2,1"',
        "perforation": f' stroke="{style.perforation_color}" stroke-width="{sw}" stroke-dasharray="0.5,0.5"',
        "border": f' stroke="{style.border_color}" stroke-width="{bw}"',
    }
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width, d)}mm" height="{_fmt(height, d)}mm" '
        f'viewBox="0 0 {_fmt(width, d)} {_fmt(height, d)}">',
        f"  <title>{pattern.role} crease pattern, {pattern.columns} columns x {pattern.rows} rows, "
        f"{pattern.chirality} chirality</title>",
        '  <g id="tabs" fill="{}" stroke="{}" stroke-width="{}">'.format(style.tab_fill, style.border_color, sw),
    ]
    out.extend(polygon(tab, "") for tab in pattern.tabs)
    out.append("  </g>")
    out.append('  <g id="creases" fill="none" stroke-linecap="round">')
    for kind in ("border", "mountain", "valley", "perforation"):
        for c in pattern.creases:
            if c.kind == kind:
                out.append(line(*pattern.segment(c), crease_style[kind]))
    out.append("  </g>")
    out.append('  <g id="electrodes" stroke="none">')
    for e in pattern.electrode_regions:
        fill = style.electrode_fill if e.electrical else style.dummy_fill
        out.append(polygon(e.polygon, f' fill="{fill}" class="{e.kind}" data-cell="{e.column},{e.row}"'))
    out.append("  </g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def crease_table(pattern: CreasePattern) -> str:
    """Crease list as CSV ``x1_mm,y1_mm,x2_mm,y2_mm,kind``."""
    lines = ["x1_mm,y1_mm,x2_mm,y2_mm,kind"]
    for c in pattern.creases:
        (x1, y1), (x2, y2) = pattern.segment(c)
        lines.append(f"{float(x1)!r},{float(y1)!r},{float(x2)!r},{float(y2)!r},{c.kind}")
    return "\n".join(lines) + "\n"


def build_pattern(spec: CylinderSpec, chirality: Chirality = "right", **layout) -> CreasePattern:
    """Crease pattern with its electrode layout attached."""
    pattern = generate_crease_pattern(spec, chirality)
    pattern.electrode_regions = generate_electrode_layout(spec, pattern=pattern, **layout)
    return pattern
