"""Switch distribution over sequences of experts.

:class:`SwitchEnsemble` mixes ``N`` arbitrary sequential predictors with a
prior that lets the best expert change over time. Each step costs O(N).
Weights are held in the log2 domain since they shrink geometrically with
the length of the sequence.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

Schedule = Callable[[int], float]


def decaying_rate(t: int) -> float:
    """Switch rate 1/t."""
    return 1.0 / t


def constant_rate(alpha: float) -> Schedule:
    def schedule(t: int) -> float:
        return alpha

    return schedule


def _log2_add(x: float, y: float) -> float:
    if x == -math.inf:
        return y
    if y == -math.inf:
        return x
    if x < y:
        x, y = y, x
    return x + math.log2(1.0 + 2.0 ** (y - x))


def _log2(x: float) -> float:
    return math.log2(x) if x > 0.0 else -math.inf


class SwitchEnsemble:
    """Incremental switch-distribution mixture of ``n_models`` predictors.

    ``schedule(t)`` gives the switch rate used between step ``t - 1`` and
    step ``t``; only ``t >= 2`` is ever queried.
    """

    def __init__(self, n_models: int, schedule: Schedule = decaying_rate):
        if n_models < 2:
            raise ValueError("a switch ensemble needs at least two models")
        self.n_models = n_models
        self.schedule = schedule
        self.log_weights = np.full(n_models, -math.log2(n_models))
        self.step = 1
        self.total_log_prob = 0.0

    @property
    def weights(self) -> np.ndarray:
        return np.exp2(self.log_weights)

    def step_update(self, cond_probs: Sequence[float]) -> float:
        """Feed one symbol's conditional probabilities, one per model.

        Returns the ensemble's conditional probability of that symbol.
        """
        if len(cond_probs) != self.n_models:
            raise ValueError(
                f"expected {self.n_models} probabilities, got {len(cond_probs)}"
            )
        log_rho = []
        for p in cond_probs:
            p = float(p)
            if not (math.isfinite(p) and 0.0 <= p <= 1.0):
                raise ValueError(f"conditional probability out of range: {p!r}")
            log_rho.append(_log2(p))

        n = self.n_models
        joint = [lw + lr for lw, lr in zip(self.log_weights, log_rho)]
        log_r = -math.inf
        for v in joint:
            log_r = _log2_add(log_r, v)

        alpha = self.schedule(self.step + 1)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"switch rate out of range: {alpha!r}")
        log_share = _log2(alpha) + log_r - math.log2(n - 1)
        stay = ((1.0 - alpha) * n - 1.0) / (n - 1)
        log_stay = _log2(stay) if stay > 0.0 else -math.inf
        if stay < 0.0:
            # alpha > (N - 1) / N makes the self-transition coefficient negative,
            # which the log-domain update cannot represent.
            new = np.exp2(joint) * stay + 2.0**log_share
            self.log_weights = np.array([_log2(max(w, 0.0)) for w in new])
        else:
            self.log_weights = np.array(
                [_log2_add(log_share, log_stay + v) for v in joint]
            )

        cond = 2.0 ** (log_r - self.total_log_prob)
        self.total_log_prob = log_r
        self.step += 1
        return cond


def ensemble_step(ens: SwitchEnsemble, cond_probs: Sequence[float]) -> tuple[SwitchEnsemble, float]:
    p = ens.step_update(cond_probs)
    return ens, p


def switch_prior_weight(indices: Sequence[int], n_models: int, schedule: Schedule = decaying_rate) -> float:
    """log2 prior weight of an expert index sequence (indices are 1-based)."""
    if n_models < 2:
        raise ValueError("a switch prior needs at least two models")
    log_w = 0.0
    prev = None
    for t, i in enumerate(indices, start=1):
        if not 1 <= i <= n_models:
            raise ValueError(f"model index {i} outside 1..{n_models}")
        if prev is None:
            log_w = -math.log2(n_models)
        else:
            alpha = schedule(t)
            factor = (1.0 - alpha) if i == prev else alpha / (n_models - 1)
            log_w += _log2(factor)
        prev = i
    return log_w


def switch_count(indices: Sequence[int]) -> int:
    return sum(1 for x, y in zip(indices, indices[1:]) if x != y)
