from __future__ import annotations

import math

import numpy as np


class RunningMean:
    """Chunked mean/variance accumulator (pairwise merge of chunk moments).
    Chunk sums use math.fsum: numpy's SIMD reductions may round differently
    depending on buffer alignment, which would break byte-identical reruns."""

    def __init__(self) -> None:
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, values: np.ndarray) -> None:
        k = values.size
        if k == 0:
            return
        mean_b = math.fsum(values.tolist()) / k
        m2_b = math.fsum(((values - mean_b) ** 2).tolist())
        n = self.n + k
        delta = mean_b - self.mean
        self.mean += delta * k / n
        self.m2 += m2_b + delta * delta * self.n * k / n
        self.n = n

    def merge(self, other: "RunningMean") -> None:
        if other.n == 0:
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n

    @property
    def std_error(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)
