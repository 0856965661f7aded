"""Triangle meshes of the timelike surface and their OBJ/CSV output.

Removing the light-cone lines ``x1 + x4 = p`` and ``x1 - x4 = q`` splits the
domain into open regions.  A region is labelled by the signs of
``x1 + x4 - p`` and ``x1 - x4 - q``; grid cells are triangulated only when
all four corners are valid and carry the same label, so no triangle crosses
a removed line.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .surface import SurfaceModel, eval_timelike_grid

__all__ = ["MeshComponent", "Mesh", "build_mesh", "component_ids", "write_obj", "write_mesh"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshComponent:
    component_id: tuple
    vertices: np.ndarray
    """Rows ``(x1, x4, X1, X2, X3)``."""
    triangles: np.ndarray
    """Zero-based vertex indices, shape ``(t, 3)``."""

    @property
    def label(self) -> str:
        return "".join("p" if s > 0 else "m" for s in self.component_id) or "0"


@dataclass(frozen=True)
class Mesh:
    components: tuple
    samples: np.ndarray
    """Rows ``(component index or -1, x1, x4, X1, X2, X3)`` for every grid node."""


def component_ids(m: SurfaceModel, x1: np.ndarray, x4: np.ndarray) -> np.ndarray:
    """Sign pattern per point, shape ``x1.shape + (len(lines1) + len(lines2),)``."""
    s, d = x1 + x4, x1 - x4
    cols = [np.sign(s - p) for p in m.lines1] + [np.sign(d - q) for q in m.lines2]
    if not cols:
        return np.zeros(x1.shape + (0,), dtype=int)
    return np.stack(cols, axis=-1).astype(int)


def build_mesh(m: SurfaceModel, box, grid: int) -> Mesh:
    (a0, a1), (b0, b1) = box
    xs, ys = np.linspace(a0, a1, grid), np.linspace(b0, b1, grid)
    X1, X4 = np.meshgrid(xs, ys, indexing="ij")
    vals, valid = eval_timelike_grid(m, X1, X4)
    ids = component_ids(m, X1, X4)

    labels: dict = {}
    comp_of_node = np.full(X1.shape, -1, dtype=int)
    for i, j in zip(*np.nonzero(valid)):
        key = tuple(int(s) for s in ids[i, j])
        comp_of_node[i, j] = labels.setdefault(key, len(labels))

    c00, c10 = comp_of_node[:-1, :-1], comp_of_node[1:, :-1]
    c11, c01 = comp_of_node[1:, 1:], comp_of_node[:-1, 1:]
    good = (c00 >= 0) & (c00 == c10) & (c00 == c11) & (c00 == c01)

    keys = sorted(labels, key=lambda k: tuple(-s for s in k))
    comps = []
    flat = lambda i, j: i * grid + j
    for key in keys:
        c = labels[key]
        ci, cj = np.nonzero(good & (c00 == c))
        if ci.size == 0:
            continue
        tris = np.concatenate(
            [
                np.stack([flat(ci, cj), flat(ci + 1, cj), flat(ci + 1, cj + 1)], axis=1),
                np.stack([flat(ci, cj), flat(ci + 1, cj + 1), flat(ci, cj + 1)], axis=1),
            ]
        )
        tris = tris[np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0]))]
        used = np.unique(tris)
        remap = np.full(grid * grid, -1, dtype=int)
        remap[used] = np.arange(used.size)
        ii, jj = np.divmod(used, grid)
        verts = np.column_stack([X1[ii, jj], X4[ii, jj], vals[ii, jj]])
        comps.append(MeshComponent(key, verts, remap[tris]))

    order = {comp.component_id: n for n, comp in enumerate(comps)}
    comp_index = np.full(X1.shape, -1, dtype=int)
    for key, c in labels.items():
        if key in order:
            comp_index[comp_of_node == c] = order[key]
    samples = np.column_stack([comp_index.ravel(), X1.ravel(), X4.ravel(), vals.reshape(-1, 3)])
    return Mesh(tuple(comps), samples)


def write_obj(path: Path, comp: MeshComponent) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# timelike surface component {comp.label}\n")
        fh.write("# vertex coordinates (X1, X2, X3); metric dx^2 + dy^2 - dz^2 not applied\n")
        for row in comp.vertices:
            fh.write("v %.12g %.12g %.12g\n" % (row[2], row[3], row[4]))
        for a, b, c in comp.triangles + 1:
            fh.write(f"f {a} {b} {c}\n")


def write_mesh(mesh: Mesh, out_dir, stem: str = "surface") -> list[Path]:
    """One OBJ per component plus ``<stem>_samples.csv``; returns OBJ paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if not mesh.components:
        log.warning("every grid cell is excluded or crosses a light-cone line; no mesh written")
    for n, comp in enumerate(mesh.components, start=1):
        p = out / f"{stem}_{n}_{comp.label}.obj"
        write_obj(p, comp)
        paths.append(p)
    with open(out / f"{stem}_samples.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["component", "x1", "x4", "X1", "X2", "X3"])
        for row in mesh.samples:
            comp = int(row[0])
            rest = ["" if not np.isfinite(x) else repr(float(x)) for x in row[1:]]
            w.writerow([comp if comp >= 0 else ""] + rest)
    return paths
