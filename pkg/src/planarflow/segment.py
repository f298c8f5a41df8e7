"""Binary image segmentation as a planar many-source many-sink minimum cut.

Every pixel is a grid vertex.  Neighbouring pixels are joined in both
directions with a capacity that is large when their intensities are close.
A pixel brighter than the threshold gets a pendant source vertex, a darker
one a pendant sink, with capacity proportional to the distance from the
threshold.  Pendants sit in a face next to their pixel, so the graph stays
planar and no super-terminal is needed.  Foreground is whatever stays on the
source side of the minimum cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engines import FlowNetwork, FlowProblem
from .io import Instance
from .planar import build_from_rotation
from .solver import SolverConfig, extract_cut, solve


@dataclass
class Segmentation:
    mask: np.ndarray  # bool, True = foreground
    value: int
    instance: Instance


def image_instance(img: np.ndarray, threshold: float | None = None, smoothness: float = 20.0,
                   sigma: float = 20.0, data_weight: float = 1.0) -> tuple[Instance, int]:
    """Instance for a grayscale image; also returns the number of pixels."""
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or min(img.shape) < 2:
        raise ValueError("need a 2-D image of at least 2 x 2 pixels")
    h, w = img.shape
    thr = float(img.mean()) if threshold is None else float(threshold)
    npx = h * w
    flat = img.ravel()
    data = np.rint(np.abs(flat - thr) * data_weight).astype(np.int64)
    fg = flat > thr
    bg = flat < thr
    pend = np.nonzero((fg | bg) & (data > 0))[0].tolist()
    pid = {p: npx + k for k, p in enumerate(pend)}
    rot = []
    for i in range(h):
        for j in range(w):
            nb = []
            if j + 1 < w:
                nb.append(i * w + j + 1)
            if i > 0:
                nb.append((i - 1) * w + j)
            if j > 0:
                nb.append(i * w + j - 1)
            if i + 1 < h:
                nb.append((i + 1) * w + j)
            p = i * w + j
            if p in pid:
                nb.append(pid[p])
            rot.append(nb)
    for p in pend:
        rot.append([p])
    g = build_from_rotation(rot)
    cap = np.zeros(g.num_darts, dtype=np.int64)
    t = g.tail
    sources, sinks = [], []
    for e in range(g.num_edges):
        u, v = t[2 * e], t[2 * e + 1]
        if u >= npx or v >= npx:
            px, x = (v, u) if u >= npx else (u, v)
            # dart 2e runs u -> v
            if fg[px]:
                cap[2 * e if u == x else 2 * e + 1] = data[px]
            else:
                cap[2 * e if u == px else 2 * e + 1] = data[px]
            continue
        diff = flat[u] - flat[v]
        c = int(round(smoothness * np.exp(-diff * diff / (2 * sigma * sigma))))
        cap[2 * e] = cap[2 * e + 1] = c
    for p in pend:
        (sources if fg[p] else sinks).append(pid[p])
    return Instance(g, cap, tuple(sources), tuple(sinks)), npx


def segment_image(img: np.ndarray, threshold: float | None = None, smoothness: float = 20.0,
                  sigma: float = 20.0, data_weight: float = 1.0,
                  config: SolverConfig | None = None) -> Segmentation:
    inst, npx = image_instance(img, threshold, smoothness, sigma, data_weight)
    h, w = np.asarray(img).shape
    if not inst.sources or not inst.sinks:
        mask = np.full((h, w), bool(inst.sources))
        return Segmentation(mask, 0, inst)
    res = solve(FlowProblem(inst.network), config)
    cut = extract_cut(inst.network, res.flow)
    mask = np.zeros(npx, dtype=bool)
    mask[[v for v in cut.reachable if v < npx]] = True
    return Segmentation(mask.reshape(h, w), res.value, inst)


def read_pgm(path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def write_pgm(path, img: np.ndarray) -> None:
    """Boolean arrays are written as black and white masks."""
    from PIL import Image

    img = np.asarray(img)
    if img.dtype == bool:
        arr = np.where(img, 255, 0).astype(np.uint8)
    else:
        arr = np.clip(img, 0, 255).astype(np.uint8)
    Image.fromarray(arr, mode="L").save(path, format="PPM")
