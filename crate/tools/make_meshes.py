"""Generate the polygonal mesh files under meshes/.

Voronoi-Lloyd meshes of the unit square (seeds reflected across the four
sides so every cell is clipped to the square) and an eight-element mesh of
interlocking hook-shaped polygons that are not star-shaped.

    python3 tools/make_meshes.py [outdir]
"""

import sys
from pathlib import Path

import numpy as np
from scipy.spatial import Voronoi
from shapely.geometry import Polygon, box
from shapely.ops import unary_union

SEED = 20231
VORONOI_SIZES = [4, 10, 20, 40, 80, 160, 320]
LLOYD_ITERS = 200
SNAP = 1e-12
MERGE = 1e-9


def reflect(pts):
    x, y = pts[:, 0], pts[:, 1]
    return np.vstack([
        pts,
        np.column_stack([-x, y]),
        np.column_stack([2.0 - x, y]),
        np.column_stack([x, -y]),
        np.column_stack([x, 2.0 - y]),
    ])


def voronoi_cells(seeds):
    vor = Voronoi(reflect(seeds))
    cells = []
    for i in range(len(seeds)):
        region = vor.regions[vor.point_region[i]]
        assert -1 not in region and region, "unbounded cell"
        cells.append(vor.vertices[region])
    return cells


def centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xs, ys = np.roll(x, -1), np.roll(y, -1)
    cross = x * ys - xs * y
    a = cross.sum() / 2.0
    return np.array([((x + xs) * cross).sum(), ((y + ys) * cross).sum()]) / (6.0 * a)


def lloyd(n, rng):
    seeds = rng.random((n, 2))
    for _ in range(LLOYD_ITERS):
        seeds = np.array([centroid(c) for c in voronoi_cells(seeds)])
    return voronoi_cells(seeds)


def snap(v):
    v = np.where(np.abs(v) < SNAP, 0.0, v)
    return np.where(np.abs(v - 1.0) < SNAP, 1.0, v)


def signed_area(p):
    x, y = p[:, 0], p[:, 1]
    return 0.5 * (x * np.roll(y, -1) - np.roll(x, -1) * y).sum()


def conform(polys):
    """Global vertex numbering; merges near-coincident points and inserts
    every vertex lying on another polygon's edge so edges match."""
    verts, cells = [], []

    def index(p):
        for j, q in enumerate(verts):
            if abs(p[0] - q[0]) < MERGE and abs(p[1] - q[1]) < MERGE:
                return j
        verts.append((float(p[0]), float(p[1])))
        return len(verts) - 1

    for poly in polys:
        poly = snap(np.asarray(poly, dtype=float))
        if signed_area(poly) < 0:
            poly = poly[::-1]
        ids = []
        for p in poly:
            j = index(p)
            if not ids or ids[-1] != j:
                ids.append(j)
        if ids[0] == ids[-1]:
            ids.pop()
        cells.append(ids)

    vs = np.array(verts)
    out = []
    for ids in cells:
        full = []
        for a, b in zip(ids, ids[1:] + ids[:1]):
            full.append(a)
            pa, pb = vs[a], vs[b]
            d = pb - pa
            l2 = d @ d
            hits = []
            for j, pj in enumerate(vs):
                if j in (a, b):
                    continue
                t = (pj - pa) @ d / l2
                if 0.0 < t < 1.0 and np.linalg.norm(pa + t * d - pj) < MERGE:
                    hits.append((t, j))
            full.extend(j for _, j in sorted(hits))
        out.append(full)
    return vs, out


def write(path, vs, cells, label="R"):
    count = {}
    for c in cells:
        for a, b in zip(c, c[1:] + c[:1]):
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
    bnd = sorted(k for k, v in count.items() if v == 1)
    lines = [f"vertices {len(vs)}"]
    lines += [f"{i} {float(x)!r} {float(y)!r}" for i, (x, y) in enumerate(vs)]
    lines.append(f"elements {len(cells)}")
    lines += [f"{i} " + " ".join(map(str, c)) for i, c in enumerate(cells)]
    lines.append(f"boundary {len(bnd)}")
    lines += [f"{a} {b} {label}" for a, b in bnd]
    path.write_text("\n".join(lines) + "\n")


# Two interlocking spiral hooks on a 5x5 grid of a horizontal strip; rows
# listed top to bottom.
HOOKS = ["AAAAB", "ABBAB", "ABAAB", "ABBBB", "AAAAB"]


def hook_cells(strips=4):
    shapes = {}
    for who in "AB":
        squares = [
            box(c, 4 - r, c + 1, 5 - r)
            for r, row in enumerate(HOOKS)
            for c, ch in enumerate(row)
            if ch == who
        ]
        poly = unary_union(squares).simplify(0)
        assert isinstance(poly, Polygon) and len(poly.interiors) == 0
        shapes[who] = np.array(poly.exterior.coords[:-1])
    h = 1.0 / strips
    cells = []
    for s in range(strips):
        for who in "AB":
            p = shapes[who]
            cells.append(np.column_stack([p[:, 0] / 5, s * h + p[:, 1] * h / 5]))
    return cells


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "meshes")
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    for n in VORONOI_SIZES:
        vs, cells = conform(lloyd(n, rng))
        write(out / f"voronoi_{n:03d}.mesh", vs, cells)
    vs, cells = conform(lloyd(8, rng))
    write(out / "p_mesh_a.mesh", vs, cells)
    vs, cells = conform(hook_cells())
    write(out / "p_mesh_b.mesh", vs, cells)


if __name__ == "__main__":
    main()
