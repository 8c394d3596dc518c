"""SVG map of safe/unsafe cells projected onto two input dimensions."""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..nsa import DetectorSet
from .ground_truth import GroundTruth, Label

COLORS = {Label.UNSAFE: "#d62728", Label.SAFE: "#2ca02c", Label.UNKNOWN: "#bdbdbd"}
PLOT = 400
MARGIN = 60
LEGEND_W = 150


def _num(v: float) -> str:
    return format(v, ".6g")


def render_region_map(
    gt: GroundTruth,
    ds: DetectorSet | None = None,
    dims: tuple[int, int] = (0, 1),
    title: str = "Safe and unsafe sub-requirements",
) -> str:
    """Cells that project onto the same rectangle are merged: the rectangle is
    unsafe if any of them is unsafe, safe if all are safe, unknown otherwise."""
    if not gt.cells:
        raise ValueError("ground truth has no cells")
    a, b = dims
    nd = gt.cells[0].ndim
    if not (0 <= a < nd and 0 <= b < nd) or a == b:
        raise ValueError(f"dims {dims} invalid for {nd}-d cells")

    groups: dict[tuple[float, float, float, float], list[Label]] = {}
    for c in gt.cells:
        key = (c.dims[a].lo, c.dims[a].hi, c.dims[b].lo, c.dims[b].hi)
        groups.setdefault(key, []).append(gt.label(c.id))
    outlined = set()
    if ds is not None:
        for det in ds.detectors:
            c = gt.cell(det.id)
            outlined.add((c.dims[a].lo, c.dims[a].hi, c.dims[b].lo, c.dims[b].hi))

    xlo = min(k[0] for k in groups)
    xhi = max(k[1] for k in groups)
    ylo = min(k[2] for k in groups)
    yhi = max(k[3] for k in groups)
    xspan = (xhi - xlo) or 1.0
    yspan = (yhi - ylo) or 1.0

    def px(x):
        return MARGIN + (x - xlo) / xspan * PLOT

    def py(y):
        return MARGIN + (yhi - y) / yspan * PLOT

    width = 2 * MARGIN + PLOT + LEGEND_W
    height = 2 * MARGIN + PLOT
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{escape(title)}</title>',
        f'<text x="{MARGIN}" y="{MARGIN / 2:.0f}" font-family="sans-serif" font-size="14">'
        f"{escape(title)}</text>",
    ]
    for key in sorted(groups):
        labels = groups[key]
        if Label.UNSAFE in labels:
            lab = Label.UNSAFE
        elif all(l is Label.SAFE for l in labels):
            lab = Label.SAFE
        else:
            lab = Label.UNKNOWN
        x0, x1, y0, y1 = key
        n_unsafe = sum(l is Label.UNSAFE for l in labels)
        parts.append(
            f'<rect class="cell {lab.value}" x="{px(x0):.3f}" y="{py(y1):.3f}" '
            f'width="{px(x1) - px(x0):.3f}" height="{py(y0) - py(y1):.3f}" '
            f'fill="{COLORS[lab]}" stroke="white" stroke-width="1" '
            f'data-cells="{len(labels)}" data-unsafe="{n_unsafe}"/>'
        )
    for key in sorted(outlined):
        x0, x1, y0, y1 = key
        parts.append(
            f'<rect class="detector" x="{px(x0) + 2:.3f}" y="{py(y1) + 2:.3f}" '
            f'width="{max(px(x1) - px(x0) - 4, 0):.3f}" height="{max(py(y0) - py(y1) - 4, 0):.3f}" '
            f'fill="none" stroke="black" stroke-width="2"/>'
        )

    font = 'font-family="sans-serif" font-size="11"'
    bottom, right = MARGIN + PLOT, MARGIN + PLOT
    parts += [
        f'<rect class="frame" x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" '
        f'fill="none" stroke="black"/>',
        f'<text x="{MARGIN}" y="{bottom + 16}" {font}>{_num(xlo)}</text>',
        f'<text x="{right}" y="{bottom + 16}" text-anchor="end" {font}>{_num(xhi)}</text>',
        f'<text x="{MARGIN + PLOT / 2:.0f}" y="{bottom + 36}" text-anchor="middle" {font}>input {a}</text>',
        f'<text x="{MARGIN - 6}" y="{bottom}" text-anchor="end" {font}>{_num(ylo)}</text>',
        f'<text x="{MARGIN - 6}" y="{MARGIN + 10}" text-anchor="end" {font}>{_num(yhi)}</text>',
        f'<text x="{MARGIN / 2:.0f}" y="{MARGIN + PLOT / 2:.0f}" text-anchor="middle" {font} '
        f'transform="rotate(-90 {MARGIN / 2:.0f} {MARGIN + PLOT / 2:.0f})">input {b}</text>',
    ]
    lx = MARGIN + PLOT + 20
    entries = [(COLORS[Label.UNSAFE], "unsafe"), (COLORS[Label.SAFE], "safe"),
               (COLORS[Label.UNKNOWN], "unknown")]
    for i, (color, text) in enumerate(entries):
        y = MARGIN + 20 * i
        parts.append(f'<rect class="legend" x="{lx}" y="{y}" width="12" height="12" fill="{color}"/>')
        parts.append(f'<text x="{lx + 18}" y="{y + 10}" {font}>{text}</text>')
    if outlined:
        y = MARGIN + 60
        parts.append(f'<rect class="legend" x="{lx}" y="{y}" width="12" height="12" fill="none" '
                     f'stroke="black" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 18}" y="{y + 10}" {font}>detector</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
