"""Window-level confusion rates for detections against ground truth.

The evaluation unit is the sliding window: a window is truth-positive when
a ground-truth crossing falls inside it, and a detection claims every
window containing its position. A true positive needs both localization
(within the match radius) and the correct over-wire; a detection at the
right place naming the wrong wire counts as one false positive plus one
false negative. Rates are normalized by the total event count so they
always sum to 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from math import dist

import numpy as np

from .scanner import WindowRect
from .synth import GroundTruth
from .verdict import Tangle

MATCH_RADIUS_PX = 10.0


@dataclass(frozen=True)
class ConfusionRates:
    tp: float
    tn: float
    fp: float
    fn: float

    @property
    def accuracy(self) -> float:
        """(TP + TN) / (TP + TN + FP + FN)."""
        total = self.tp + self.tn + self.fp + self.fn
        if total == 0:
            return 0.0
        return (self.tp + self.tn) / total

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "accuracy": self.accuracy,
        }


def resolve_over_wire(tangle: Tangle, truth: GroundTruth, radius: int = 3) -> int | None:
    """Map a detection's over-patch pixels back to a wire index.

    Each patch pixel votes for the wire of its nearest labeled pixel
    (expanding square rings, so a thick wire adjacent to a thin one cannot
    outvote it by sheer body area). None when the detection carries no
    pixel provenance or no wire is within reach.
    """
    if truth.wire_labels is None or not tangle.over_pixels:
        return None
    labels = truth.wire_labels
    h, w = labels.shape
    votes: Counter[int] = Counter()
    for x, y in tangle.over_pixels:
        for r in range(radius + 1):
            y_lo, y_hi = max(0, y - r), min(h, y + r + 1)
            x_lo, x_hi = max(0, x - r), min(w, x + r + 1)
            block = labels[y_lo:y_hi, x_lo:x_hi]
            hits = block[block >= 0]
            if hits.size:
                ids, counts = np.unique(hits, return_counts=True)
                # one vote per pixel, split toward the ring majority
                votes[int(ids[np.argmax(counts)])] += 1
                break
    if not votes:
        return None
    # deterministic: most votes, lowest wire index on ties
    return min(votes, key=lambda wid: (-votes[wid], wid))


def evaluate(
    detections: list[Tangle],
    truth: GroundTruth,
    windows: list[WindowRect],
    match_radius: float = MATCH_RADIUS_PX,
) -> ConfusionRates:
    """Score detections per window and normalize to rates summing to 1.

    The over-wire check runs only when it can: detections parsed back from
    JSON carry no pixel provenance, and scoring then degrades to
    localization only.
    """
    over_ids = {id(t): resolve_over_wire(t, truth) for t in detections}
    tp = tn = fp = fn = 0
    for rect in windows:
        xings = [c for c in truth.crossings if rect.contains(*c.position)]
        dets = [t for t in detections if rect.contains(*t.position)]
        if not xings and not dets:
            tn += 1
        elif not xings:
            fp += 1
        elif not dets:
            fn += 1
        else:
            matched = False
            for t in dets:
                for c in xings:
                    if dist(t.position, c.position) > match_radius:
                        continue
                    over = over_ids[id(t)]
                    if over is None or over == c.over_wire:
                        matched = True
                        break
                if matched:
                    break
            if matched:
                tp += 1
            else:
                fp += 1
                fn += 1
    total = tp + tn + fp + fn
    if total == 0:
        return ConfusionRates(0.0, 0.0, 0.0, 0.0)
    return ConfusionRates(tp / total, tn / total, fp / total, fn / total)
