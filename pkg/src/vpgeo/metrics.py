"""Keypoint accuracy, cuboid quality and verification precision/recall."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .cuboid import Box2D, Cuboid2D
from .errors import NoPositives, ZeroVector
from .vploss import vp_loss

CQ_FLOOR = 1e-12


@dataclass(frozen=True)
class PckConfig:
    alpha: float = 0.1

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


class PrPoint(NamedTuple):
    precision: float
    recall: float
    threshold: float


def pck(pred: Cuboid2D, gt: Cuboid2D, box: Box2D, cfg: PckConfig = PckConfig()) -> float:
    """Fraction of vertices within ``alpha * max(w, h)`` of their labeled match."""
    if pred.frame != gt.frame:
        raise ValueError("pred and gt must share a frame")
    dist = np.hypot(*(pred.vertices - gt.vertices).T)
    return float(np.mean(dist <= cfg.alpha * max(box.w, box.h)))


def cuboid_quality(c: Cuboid2D) -> float:
    """``-ln(vp_loss)``, with the loss floored at 1e-12 (ceiling about 27.631)."""
    return -math.log(max(vp_loss(c).value, CQ_FLOOR))


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("cosine similarity of a zero vector")
    return float(np.clip(np.dot(a / na, b / nb), -1.0, 1.0))


def pr_curve(scores: Iterable[tuple[float, bool]]) -> tuple[list[PrPoint], float]:
    """Sweep every distinct score as a threshold, highest first.

    A pair is predicted positive when its score is >= the threshold. AP is
    the step-wise sum of precision times recall increments.
    """
    pairs = [(float(s), bool(flag)) for s, flag in scores]
    n_pos = sum(flag for _, flag in pairs)
    if n_pos == 0:
        raise NoPositives("pr_curve needs at least one positive pair")
    pairs.sort(key=lambda p: -p[0])

    points = []
    ap = 0.0
    tp = fp = 0
    prev_recall = 0.0
    i = 0
    while i < len(pairs):
        thr = pairs[i][0]
        while i < len(pairs) and pairs[i][0] == thr:
            if pairs[i][1]:
                tp += 1
            else:
                fp += 1
            i += 1
        precision = tp / (tp + fp)
        recall = tp / n_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
        points.append(PrPoint(precision, recall, thr))
    return points, ap
