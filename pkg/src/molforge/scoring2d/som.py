"""Kohonen self-organizing map classifier with per-neuron ZOOM refinement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

_CHUNK = 256


@dataclass(frozen=True)
class SOMVerdict:
    label: object | None  # None = unclassified (empty BMU histogram)
    confidence: float
    neuron: int
    depth: int = 0


@dataclass
class SOMGrid:
    width: int
    height: int
    codebook: np.ndarray  # (width*height, dim), standardized space
    classes: tuple  # sorted class labels, column order of neuron_labels
    neuron_labels: np.ndarray  # (width*height, n_classes) hit counts
    mean: np.ndarray
    scale: np.ndarray
    members: list[np.ndarray] = field(default_factory=list, repr=False)
    children: dict[int, "SOMGrid"] = field(default_factory=dict)
    zoom_threshold: float | None = None
    initial_qe: float = float("nan")
    final_qe: float = float("nan")

    @property
    def dim(self) -> int:
        return self.codebook.shape[1]

    def transform(self, vectors) -> np.ndarray:
        x = np.asarray(vectors, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.dim:
            raise ValueError(f"vector dimension {x.shape[1]} does not match grid dimension {self.dim}")
        return (x - self.mean) / self.scale

    def bmus(self, vectors) -> np.ndarray:
        return _bmus(self.transform(vectors), self.codebook)[0]


def _bmus(x: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best-matching unit per row and its Euclidean distance."""
    wn = (w * w).sum(axis=1)
    idx = np.empty(len(x), dtype=np.int64)
    dist = np.empty(len(x))
    for s in range(0, len(x), _CHUNK):
        xc = x[s : s + _CHUNK]
        d2 = (xc * xc).sum(axis=1)[:, None] - 2.0 * xc @ w.T + wn[None, :]
        k = np.argmin(d2, axis=1)
        idx[s : s + _CHUNK] = k
        dist[s : s + _CHUNK] = np.sqrt(np.maximum(d2[np.arange(len(xc)), k], 0.0))
    return idx, dist


def _coords(width: int, height: int) -> np.ndarray:
    return np.array([(i % width, i // width) for i in range(width * height)], dtype=np.float64)


def som_train(vectors, labels, width: int = 100, height: int = 100, epochs: int = 20,
              rng: np.random.Generator | None = None, lr_start: float = 1.0, lr_end: float = 0.02,
              _norm: tuple[np.ndarray, np.ndarray] | None = None) -> SOMGrid:
    """Batch Kohonen training.

    Vectors are standardized per column.  The codebook starts uniform within
    the data range.  Each epoch computes BMUs, forms the Gaussian
    neighbourhood-weighted batch mean per neuron and moves the codebook
    toward it by the learning rate, which falls linearly from lr_start to
    lr_end; the radius falls geometrically from max(width, height)/2 to 1.
    Label histograms and members come from a final BMU pass.  If training
    ends with a higher quantization error than the initial codebook, the
    initial codebook is kept.
    """
    if rng is None:
        raise ValueError("som_train needs an rng")
    x = np.asarray(vectors, dtype=np.float64)
    labels = list(labels)
    if x.ndim != 2 or len(x) == 0:
        raise ValueError("som_train needs a non-empty 2D array of vectors")
    if len(labels) != len(x):
        raise ValueError("labels are not aligned with vectors")
    if width < 1 or height < 1 or epochs < 1:
        raise ValueError("width, height and epochs must be positive")
    if _norm is None:
        mean = x.mean(axis=0)
        scale = x.std(axis=0)
        scale[scale == 0] = 1.0
    else:
        mean, scale = _norm
    z = (x - mean) / scale
    n_neurons = width * height
    lo, hi = z.min(axis=0), z.max(axis=0)
    w = lo + (hi - lo) * rng.random((n_neurons, z.shape[1]))
    init = w.copy()
    coords = _coords(width, height)
    r0 = max(max(width, height) / 2.0, 1.0)
    for t in range(epochs):
        frac = t / (epochs - 1) if epochs > 1 else 1.0
        radius = r0 * (1.0 / r0) ** frac
        lr = lr_start + (lr_end - lr_start) * frac
        bmu, _ = _bmus(z, w)
        num = np.zeros_like(w)
        den = np.zeros(n_neurons)
        for s in range(0, len(z), _CHUNK):
            g = coords[bmu[s : s + _CHUNK]]
            d2 = ((g[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)
            h = np.exp(-d2 / (2.0 * radius * radius))
            num += h.T @ z[s : s + _CHUNK]
            den += h.sum(axis=0)
        ok = den > 1e-12
        target = num[ok] / den[ok][:, None]
        w[ok] += lr * (target - w[ok])
    qe0 = float(_bmus(z, init)[1].mean())
    qe1 = float(_bmus(z, w)[1].mean())
    if qe1 > qe0:
        w, qe1 = init, qe0
    classes = tuple(sorted(set(labels), key=repr))
    col = {c: k for k, c in enumerate(classes)}
    bmu, _ = _bmus(z, w)
    hist = np.zeros((n_neurons, len(classes)), dtype=np.int64)
    np.add.at(hist, (bmu, [col[c] for c in labels]), 1)
    order = np.argsort(bmu, kind="stable")
    bounds = np.searchsorted(bmu[order], np.arange(n_neurons + 1))
    members = [order[bounds[k] : bounds[k + 1]] for k in range(n_neurons)]
    return SOMGrid(width, height, w, classes, hist, mean, scale, members,
                   initial_qe=qe0, final_qe=qe1)


def quantization_error(grid: SOMGrid, vectors) -> float:
    return float(_bmus(grid.transform(vectors), grid.codebook)[1].mean())


def _verdict(grid: SOMGrid, k: int, depth: int) -> SOMVerdict:
    row = grid.neuron_labels[k]
    total = int(row.sum())
    if total == 0:
        return SOMVerdict(None, 0.0, k, depth)
    j = int(np.argmax(row))  # ties go to the first class in sorted order
    return SOMVerdict(grid.classes[j], row[j] / total, k, depth)


def som_classify(grid: SOMGrid, vector, _depth: int = 0) -> SOMVerdict:
    """Majority label of the BMU histogram; low-confidence BMUs with a ZOOM child delegate to it."""
    if grid.neuron_labels is None or grid.neuron_labels.size == 0:
        raise ValueError("grid is untrained")
    k = int(grid.bmus(vector)[0])
    v = _verdict(grid, k, _depth)
    child = grid.children.get(k)
    if child is not None and grid.zoom_threshold is not None and v.confidence < grid.zoom_threshold:
        return som_classify(child, vector, _depth + 1)
    return v


def accuracy(grid: SOMGrid, vectors, labels) -> float:
    labels = list(labels)
    if not labels:
        return 0.0
    hits = sum(som_classify(grid, v).label == y for v, y in zip(np.asarray(vectors, dtype=np.float64), labels))
    return hits / len(labels)


def zoom_side(m: int, cap: int = 20) -> int:
    return min(cap, math.ceil(math.sqrt(5 * m)))


def zoom_refine(grid: SOMGrid, vectors, labels, threshold: float = 0.8,
                rng: np.random.Generator | None = None, min_hits: int = 10,
                epochs: int = 20) -> SOMGrid:
    """Train a child SOM for each neuron whose majority fraction < threshold.

    Only neurons with at least ``min_hits`` training vectors qualify; the
    child side is ceil(sqrt(5 m)) capped at 20.  A child is kept only when
    it classifies that neuron's training vectors at least as well as the
    parent's majority label, so refinement cannot lower training accuracy.
    """
    if rng is None:
        raise ValueError("zoom_refine needs an rng")
    x = np.asarray(vectors, dtype=np.float64)
    labels = list(labels)
    children = {}
    for k in range(grid.width * grid.height):
        idx = grid.members[k] if k < len(grid.members) else np.array([], dtype=np.int64)
        m = len(idx)
        if m < min_hits:
            continue
        v = _verdict(grid, k, 0)
        if v.confidence >= threshold:
            continue
        side = zoom_side(m)
        sub_x = x[idx]
        sub_y = [labels[i] for i in idx]
        child = som_train(sub_x, sub_y, side, side, epochs, rng, _norm=(grid.mean, grid.scale))
        parent_hits = sum(y == v.label for y in sub_y)
        child_hits = sum(som_classify(child, row).label == y for row, y in zip(sub_x, sub_y))
        if child_hits >= parent_hits:
            children[k] = child
    return replace(grid, children=children, zoom_threshold=threshold)
