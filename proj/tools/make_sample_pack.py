#!/usr/bin/env python3
"""Regenerates the bundled sample asset pack under assets/sample_pack.

The pack is small and hand-parameterized: twelve VIF layout families at
several point counts, a set of VG card designs, connection designs for the
four drawable styles, three pivot graphics and a handful of palettes.

Usage: tools/make_sample_pack.py [output_dir]
"""

import json
import math
import random
import sys
from pathlib import Path

FORMAT_VERSION = 1

CLASS_NAMES = [
    "landscape", "portrait", "clock", "star", "up-ladder", "down-ladder",
    "spiral", "zigzag", "bowl", "dome", "wave", "snake",
]


def lerp(a, b, t):
    return a + (b - a) * t


def layout_points(cls, n):
    ts = [i / (n - 1) for i in range(n)]
    if cls == "landscape":
        return [(lerp(0.12, 0.88, t), 0.5) for t in ts]
    if cls == "portrait":
        return [(0.5, lerp(0.12, 0.88, t)) for t in ts]
    if cls == "clock":
        pts = []
        for i in range(n):
            a = -math.pi / 2 + 2 * math.pi * i / n
            pts.append((0.5 + 0.34 * math.cos(a), 0.5 + 0.34 * math.sin(a)))
        return pts
    if cls == "star":
        pts = []
        for i in range(n):
            a = -math.pi / 2 + 2 * math.pi * i / n
            r = 0.38 if i % 2 == 0 else 0.2
            pts.append((0.5 + r * math.cos(a), 0.5 + r * math.sin(a)))
        return pts
    if cls == "up-ladder":
        return [(lerp(0.15, 0.85, t), lerp(0.85, 0.15, t)) for t in ts]
    if cls == "down-ladder":
        return [(lerp(0.15, 0.85, t), lerp(0.15, 0.85, t)) for t in ts]
    if cls == "spiral":
        pts = []
        for i in range(n):
            a = -math.pi / 2 + math.radians(80) * i
            r = lerp(0.38, 0.12, i / (n - 1))
            pts.append((0.5 + r * math.cos(a), 0.5 + r * math.sin(a)))
        return pts
    if cls == "zigzag":
        return [(lerp(0.12, 0.88, t), 0.3 if i % 2 == 0 else 0.7)
                for i, t in enumerate(ts)]
    if cls == "bowl":
        return [(lerp(0.12, 0.88, t), 0.25 + 0.5 * (1 - (2 * t - 1) ** 2))
                for t in ts]
    if cls == "dome":
        return [(lerp(0.12, 0.88, t), 0.75 - 0.5 * (1 - (2 * t - 1) ** 2))
                for t in ts]
    if cls == "wave":
        return [(lerp(0.12, 0.88, t),
                 0.5 + 0.25 * math.sin(2 * math.pi * 1.25 * t + math.pi / 5))
                for t in ts]
    if cls == "snake":
        return [(0.25 if i % 2 == 0 else 0.75, lerp(0.15, 0.85, t))
                for i, t in enumerate(ts)]
    raise ValueError(cls)


# Per-class point counts. Three-point variants are only kept for families
# whose three-point shape stays distinct from the others.
COUNTS = {
    "landscape": [3, 4, 5, 6, 7, 8],
    "portrait": [3, 4, 5, 6, 7, 8],
    "clock": [4, 5, 6, 7, 8],
    "star": [4, 6, 8],
    "up-ladder": [3, 4, 5, 6],
    "down-ladder": [3, 4, 5, 6],
    "spiral": [4, 5, 6, 7],
    "zigzag": [4, 5, 6, 7, 8],
    "bowl": [4, 5, 6, 7],
    "dome": [4, 5, 6, 7],
    "wave": [5, 6, 7, 8],
    "snake": [4, 5, 6, 7, 8],
}


def fit_unit(points):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    w = max(xs) - min(xs)
    h = max(ys) - min(ys)
    ext = max(w, h)
    s = 1.0 / ext if ext > 1e-12 else 1.0
    cx = (max(xs) + min(xs)) / 2
    cy = (max(ys) + min(ys)) / 2
    return [((x - cx) * s + 0.5, (y - cy) * s + 0.5) for x, y in points]


def shape_distance(a, b):
    a = fit_unit(a)
    b = fit_unit(b)
    fwd = sum(math.dist(p, q) for p, q in zip(a, b)) / len(a)
    rev = sum(math.dist(p, q) for p, q in zip(a, reversed(b))) / len(a)
    return min(fwd, rev)


def make_layouts():
    layouts = []
    for cid, cls in enumerate(CLASS_NAMES):
        for n in COUNTS[cls]:
            pts = [(round(x, 4), round(y, 4)) for x, y in layout_points(cls, n)]
            layouts.append({
                "id": f"vif-{cls}-{n}",
                "points": [list(p) for p in pts],
                "cluster": cid,
                "source": "sample-pack",
            })
    # Same-count shapes must stay apart for sketch retrieval to be meaningful.
    for i, a in enumerate(layouts):
        for b in layouts[i + 1:]:
            if len(a["points"]) != len(b["points"]):
                continue
            d = shape_distance(a["points"], b["points"])
            if d < 0.08:
                raise SystemExit(f"layouts too similar: {a['id']} {b['id']} {d:.3f}")
    return layouts


VG_SHAPES = {
    "card": '<rect class="accent" x="0" y="0" width="{w}" height="{h}" rx="14" fill="#4477aa"/>',
    "pill": '<rect class="accent" x="0" y="0" width="{w}" height="{h}" rx="{r}" fill="#4477aa"/>',
    "badge": '<ellipse class="accent" cx="{cx}" cy="{cy}" rx="{cx}" ry="{cy}" fill="#4477aa"/>',
    "hexagon": '<polygon class="accent" points="{hex}" fill="#4477aa"/>',
    "tag": '<polygon class="accent" points="{tag}" fill="#4477aa"/>',
    "shield": '<path class="accent" d="{shield}" fill="#4477aa"/>',
}

# (shape, native w, h, slots)
VG_SPECS = [
    ("card", 200, 160, ["title", "text"]),
    ("card", 200, 180, ["title", "text", "label"]),
    ("card", 220, 200, ["title", "text", "label", "image"]),
    ("card", 200, 140, ["text"]),
    ("card", 180, 180, ["title", "text", "image"]),
    ("pill", 220, 100, ["title", "text"]),
    ("pill", 200, 90, ["label", "text"]),
    ("pill", 160, 80, ["label"]),
    ("pill", 220, 110, ["title", "label"]),
    ("badge", 160, 160, ["label", "text"]),
    ("badge", 170, 170, ["title", "text"]),
    ("badge", 140, 140, ["label"]),
    ("badge", 180, 180, ["title", "text", "label", "image"]),
    ("badge", 160, 160, ["image", "title"]),
    ("hexagon", 180, 160, ["title", "text"]),
    ("hexagon", 180, 160, ["label", "text"]),
    ("hexagon", 200, 180, ["title", "text", "label"]),
    ("hexagon", 160, 140, ["text"]),
    ("tag", 210, 110, ["title", "text"]),
    ("tag", 200, 100, ["label", "title"]),
    ("tag", 220, 130, ["title", "text", "label"]),
    ("shield", 160, 190, ["title", "text", "label"]),
    ("shield", 150, 180, ["label", "text"]),
    ("shield", 170, 200, ["title", "text", "label", "image"]),
    ("card", 200, 120, ["title"]),
    ("pill", 240, 120, ["text"]),
    ("hexagon", 190, 170, ["title", "text", "image"]),
    ("shield", 160, 180, ["title", "text"]),
]


def slot_rects(w, h, slots):
    """Stack the slots vertically inside an inset box."""
    inset_x = w * 0.14
    inset_y = h * 0.14
    inner_w = w - 2 * inset_x
    inner_h = h - 2 * inset_y
    weights = {"image": 1.4, "label": 0.8, "title": 0.8, "text": 1.6}
    order = [s for s in ["image", "label", "title", "text"] if s in slots]
    total = sum(weights[s] for s in order)
    rects = {}
    y = inset_y
    for s in order:
        sh = inner_h * weights[s] / total
        rects[s] = [round(inset_x, 2), round(y, 2), round(inner_w, 2), round(sh, 2)]
        y += sh
    return rects


def shape_markup(shape, w, h):
    hexpts = " ".join(f"{x:.1f},{y:.1f}" for x, y in [
        (w * 0.25, 0), (w * 0.75, 0), (w, h / 2), (w * 0.75, h), (w * 0.25, h), (0, h / 2)])
    tagpts = " ".join(f"{x:.1f},{y:.1f}" for x, y in [
        (0, 0), (w * 0.82, 0), (w, h / 2), (w * 0.82, h), (0, h)])
    shield = (f"M0,0 L{w},0 L{w},{h * 0.6:.1f} Q{w},{h * 0.85:.1f} {w / 2},{h} "
              f"Q0,{h * 0.85:.1f} 0,{h * 0.6:.1f} Z")
    return VG_SHAPES[shape].format(w=w, h=h, r=h / 2, cx=w / 2, cy=h / 2,
                                   hex=hexpts, tag=tagpts, shield=shield)


def make_vgs(rng):
    vgs = []
    for i, (shape, w, h, slots) in enumerate(VG_SPECS):
        vid = f"vg-{shape}-{i:02d}"
        rects = slot_rects(w, h, slots)
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{w}" height="{h}">',
            "  " + shape_markup(shape, w, h),
            f'  <rect class="accent-shade" x="{w * 0.06:.1f}" y="{h * 0.06:.1f}" '
            f'width="{w * 0.88:.1f}" height="{h * 0.88:.1f}" rx="8" fill="#ffffff" fill-opacity="0.12"/>',
        ]
        for s in ["image", "label", "title", "text"]:
            if s in rects:
                x, y, rw, rh = rects[s]
                parts.append(f'  <rect id="ph-{s}" x="{x}" y="{y}" width="{rw}" height="{rh}" fill="none"/>')
        parts.append("</svg>")
        # Each design appears in 1..6 layout clusters.
        k = rng.randint(1, 6)
        clusters = sorted(rng.sample(range(12), k))
        meta = {
            "id": vid,
            "placeholders": rects,
            "anchor": [w / 2, h],
            "native_size": [w, h],
            "clusters": clusters,
        }
        vgs.append((vid, "\n".join(parts) + "\n", meta))
    # Every cluster must have a title+text design, a text-only-capable
    # design and a label-capable design.
    for c in range(12):
        for need in (["title", "text"], ["label"], ["text"], ["title", "text", "label"]):
            if not any(c in m["clusters"] and all(s in m["placeholders"] for s in need)
                       for _, _, m in vgs):
                cand = [m for _, _, m in vgs if all(s in m["placeholders"] for s in need)]
                m = cand[c % len(cand)]
                m["clusters"] = sorted(set(m["clusters"]) | {c})
    return vgs


CONNECTION_SPECS = {
    "Regular": [
        ("arrow", '<path d="M0,10 L86,10" stroke="#555555" stroke-width="3" fill="none"/>'
                  '<polygon points="84,3 100,10 84,17" fill="#555555"/>'),
        ("dots", "".join(f'<circle cx="{5 + 10 * i}" cy="10" r="3" fill="#555555"/>' for i in range(10))),
        ("dash", '<path d="M0,10 L100,10" stroke="#555555" stroke-width="3" stroke-dasharray="8 5" fill="none"/>'),
        ("chevrons", "".join(f'<polyline points="{8 + 22 * i},3 {18 + 22 * i},10 {8 + 22 * i},17" '
                             f'stroke="#555555" stroke-width="3" fill="none"/>' for i in range(4))),
    ],
    "Alternate": [
        ("bold-arrow", '<path d="M0,10 L80,10" stroke="#555555" stroke-width="6" fill="none"/>'
                       '<polygon points="78,0 100,10 78,20" fill="#555555"/>'),
        ("double-line", '<path d="M0,6 L100,6 M0,14 L100,14" stroke="#555555" stroke-width="2" fill="none"/>'),
        ("bracket", '<path d="M2,2 L2,10 L98,10 L98,18" stroke="#555555" stroke-width="3" fill="none"/>'),
    ],
    "Pivot": [
        ("spoke", '<path d="M0,10 L100,10" stroke="#555555" stroke-width="2" fill="none"/>'
                  '<circle cx="100" cy="10" r="4" fill="#555555"/>'),
        ("ray", '<polygon points="0,8 100,0 100,20 0,12" fill="#555555" fill-opacity="0.5"/>'),
        ("beaded", '<path d="M0,10 L100,10" stroke="#555555" stroke-width="1.5" fill="none"/>'
                   + "".join(f'<circle cx="{20 * i}" cy="10" r="3" fill="#555555"/>' for i in range(1, 5))),
    ],
    "FlowShape": [
        ("arc-arrow", '<path d="M0,16 Q50,-4 90,10" stroke="#555555" stroke-width="3" fill="none"/>'
                      '<polygon points="86,3 100,12 86,17" fill="#555555"/>'),
        ("swoosh", '<path d="M0,18 C30,0 70,0 100,10 C70,6 30,8 0,18 Z" fill="#555555"/>'),
        ("wave-link", '<path d="M0,10 Q12.5,0 25,10 T50,10 T75,10 T100,10" stroke="#555555" stroke-width="3" fill="none"/>'),
    ],
}


def make_connections():
    out = []
    for style, designs in CONNECTION_SPECS.items():
        for name, body in designs:
            cid = f"conn-{style.lower()}-{name}"
            svg = ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 20" width="100" height="20">\n'
                   f"  {body}\n</svg>\n")
            meta = {"id": cid, "style_class": style, "native_length_axis": "x",
                    "native_size": [100, 20]}
            out.append((cid, svg, meta))
    return out


PIVOTS = {
    "pivot-globe": ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100" width="100" height="100">\n'
                    '  <circle cx="50" cy="50" r="46" fill="#2a9d8f"/>\n'
                    '  <ellipse cx="50" cy="50" rx="20" ry="46" fill="none" stroke="#ffffff" stroke-width="3"/>\n'
                    '  <path d="M4,50 L96,50 M12,28 L88,28 M12,72 L88,72" stroke="#ffffff" stroke-width="3"/>\n'
                    "</svg>\n"),
    "pivot-bulb": ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100" width="100" height="100">\n'
                   '  <circle cx="50" cy="40" r="32" fill="#f4a261"/>\n'
                   '  <rect x="36" y="70" width="28" height="22" rx="4" fill="#264653"/>\n'
                   "</svg>\n"),
    "pivot-donut": ('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100" width="100" height="100">\n'
                    '  <circle cx="50" cy="50" r="40" fill="none" stroke="#e76f51" stroke-width="16"/>\n'
                    '  <path d="M50,10 A40,40 0 0,1 90,50" fill="none" stroke="#264653" stroke-width="16"/>\n'
                    "</svg>\n"),
}

PALETTES = [
    {"id": "pal-ink", "background": "#ffffff",
     "series": ["#1b263b", "#415a77", "#2f3e46", "#3d405b", "#22333b", "#4a4e69"],
     "text_color": "#ffffff"},
    {"id": "pal-ocean", "background": "#ffffff",
     "series": ["#03045e", "#023e8a", "#0077b6", "#005f73", "#0a9396", "#1d3557"],
     "text_color": "#ffffff"},
    {"id": "pal-forest", "background": "#ffffff",
     "series": ["#081c15", "#1b4332", "#2d6a4f", "#40916c", "#344e41", "#3a5a40"],
     "text_color": "#ffffff"},
    {"id": "pal-ember", "background": "#ffffff",
     "series": ["#9d0208", "#6a040f", "#370617", "#800f2f", "#a4133c", "#590d22"],
     "text_color": "#ffffff"},
    {"id": "pal-pastel", "background": "#3e2723",
     "series": ["#ffd6a5", "#fdffb6", "#caffbf", "#9bf6ff", "#a0c4ff", "#ffc6ff"],
     "text_color": "#222222"},
    {"id": "pal-sand", "background": "#4e342e",
     "series": ["#fefae0", "#faedcd", "#e9edc9", "#ccd5ae", "#d4a373", "#f1e3d3"],
     "text_color": "#222222"},
    {"id": "pal-neon", "background": "#111111",
     "series": ["#f72585", "#b5179e", "#7209b7", "#4cc9f0", "#4361ee", "#3a0ca3"],
     "text_color": "#ffffff"},
    {"id": "pal-sunrise", "background": "#ffffff",
     "series": ["#ffb703", "#fb8500", "#ffd166", "#f4a261", "#e9c46a", "#f6bd60"],
     "text_color": "#222222"},
]

# Hand-authored connection-style table: style class -> VIF cluster ids in
# which that style was observed.
C_VIF_TABLE = {
    "FlowShape": [2, 3, 6, 8, 9],
    "Regular": [0, 1, 4, 5, 7, 8, 9, 10, 11],
    "Alternate": [0, 1, 7, 10, 11],
    "Pivot": [2, 3, 6],
    "None": [4, 5, 11],
}


def fnv1a64(data: bytes) -> str:
    h = 0xcbf29ce484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001b3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "assets" / "sample_pack"
    rng = random.Random(20231)
    files = {}
    for layout in make_layouts():
        files[f"layouts/{layout['id']}.json"] = dump_json(layout)
    vgs = make_vgs(rng)
    for vid, svg, meta in vgs:
        files[f"vgs/{vid}.svg"] = svg
        files[f"vgs/{vid}.meta.json"] = dump_json(meta)
    conns = make_connections()
    for cid, svg, meta in conns:
        files[f"connections/{cid}.svg"] = svg
        files[f"connections/{cid}.meta.json"] = dump_json(meta)
    for pid, svg in PIVOTS.items():
        files[f"pivots/{pid}.svg"] = svg
    files["palettes.json"] = dump_json(PALETTES)
    files["c_vif_table.json"] = dump_json(C_VIF_TABLE)

    counts = {
        "layouts": sum(1 for f in files if f.startswith("layouts/")),
        "vgs": len(vgs),
        "connections": len(conns),
        "pivots": len(PIVOTS),
        "palettes": len(PALETTES),
    }
    manifest = {
        "format_version": FORMAT_VERSION,
        "name": "infoforge-sample-pack",
        "counts": counts,
        "checksums": {path: fnv1a64(body.encode()) for path, body in sorted(files.items())},
    }
    files["manifest.json"] = dump_json(manifest)

    for sub in ["layouts", "vgs", "connections", "pivots"]:
        d = root / sub
        d.mkdir(parents=True, exist_ok=True)
        for old in d.iterdir():
            old.unlink()
    for path, body in files.items():
        p = root / path
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(body)
    print(f"wrote {len(files)} files to {root}: {counts}")


if __name__ == "__main__":
    main()
