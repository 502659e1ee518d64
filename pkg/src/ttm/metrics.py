"""Evaluation metrics: AUC (rank-sum, tie-aware), accuracy, RMSE."""

from __future__ import annotations

import math

import numpy as np

from .nn import InputError, ShapeError


class UndefinedMetricError(ValueError):
    """Metric is undefined for this input (e.g. single-class AUC)."""


def auc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative.

    Rank-sum (Mann-Whitney U) computation with average ranks for ties, so
    tied pairs count 1/2.  Requires both classes present.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if s.shape != y.shape:
        raise ShapeError("auc: scores and labels differ in length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("auc needs both classes present")
    order = np.argsort(s, kind="mergesort")
    sorted_s = s[order]
    ranks = np.empty(s.shape[0])
    i = 0
    while i < s.shape[0]:
        j = i
        while j + 1 < s.shape[0] and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum = float(np.sum(ranks[y == 1]))
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_pairwise(scores, labels) -> float:
    """O(n^2) enumeration oracle for auc(); kept for tests."""
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    pos = s[y == 1]
    neg = s[y == 0]
    if pos.size == 0 or neg.size == 0:
        raise UndefinedMetricError("auc needs both classes present")
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (float(wins) + 0.5 * float(ties)) / (pos.size * neg.size)


def accuracy(scores, labels, threshold: float = 0.5) -> float:
    """Fraction of correct hard decisions; score > threshold predicts 1."""
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if s.shape != y.shape:
        raise ShapeError("accuracy: scores and labels differ in length")
    if s.size == 0:
        raise InputError("accuracy: empty input")
    return float(np.mean((s > threshold).astype(np.float64) == y))


def rmse(pred, target) -> float:
    p = np.asarray(pred, dtype=np.float64).reshape(-1)
    t = np.asarray(target, dtype=np.float64).reshape(-1)
    if p.shape != t.shape:
        raise ShapeError("rmse: shapes differ")
    if p.size == 0:
        raise InputError("rmse: empty input")
    return math.sqrt(float(np.mean((p - t) ** 2)))
