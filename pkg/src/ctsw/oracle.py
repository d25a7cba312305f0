"""Brute-force reference implementations for small inputs.

Everything here works in exact rational arithmetic (:class:`fractions.Fraction`)
by direct enumeration, sharing no code with the incremental models. Sizes are
limited by precondition: these are test oracles, not compressors.

Suffix strings are written in natural order: the last character is the most
recent bit. A history before the first symbol is taken as all zeros, matching
the codec.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

HALF = Fraction(1, 2)


# ------------------------------------------------------------------ KT


def kt_probability(bits: Sequence[int]) -> Fraction:
    a = b = 0
    p = Fraction(1)
    for bit in bits:
        if bit:
            p *= Fraction(2 * b + 1, 2 * (a + b + 1))
            b += 1
        else:
            p *= Fraction(2 * a + 1, 2 * (a + b + 1))
            a += 1
    return p


def kt_closed_form(a: int, b: int) -> float:
    """KT probability of any string with ``a`` zeros and ``b`` ones, via the
    Beta integral: B(a + 1/2, b + 1/2) / B(1/2, 1/2)."""
    return math.exp(
        math.lgamma(a + 0.5) + math.lgamma(b + 0.5) - math.lgamma(a + b + 1.0) - math.log(math.pi)
    )


# ------------------------------------------------------------------ suffix sets


@lru_cache(maxsize=None)
def _suffix_sets(depth: int) -> tuple[frozenset, ...]:
    sets = [frozenset({""})]
    if depth > 0:
        smaller = _suffix_sets(depth - 1)
        for s1, s2 in itertools.product(smaller, repeat=2):
            sets.append(frozenset({s + "1" for s in s1} | {s + "0" for s in s2}))
    return tuple(sets)


def enumerate_suffix_sets(depth: int) -> list[frozenset]:
    """All complete, proper suffix sets of depth at most ``depth``."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth > 4:
        raise ValueError("enumeration is limited to depth <= 4 (|C_5| = 458330)")
    return list(_suffix_sets(depth))


def is_proper(suffix_set) -> bool:
    return not any(s != t and t.endswith(s) for s in suffix_set for t in suffix_set)


def is_complete(suffix_set) -> bool:
    """Every history has a suffix in the set (checked over all histories as
    long as the deepest member)."""
    d = max(len(s) for s in suffix_set)
    for hist in itertools.product("01", repeat=d):
        h = "".join(hist)
        if not any(h.endswith(s) for s in suffix_set):
            return False
    return True


def suffix_set_depth(suffix_set) -> int:
    return max(len(s) for s in suffix_set)


def internal_nodes(suffix_set) -> set[str]:
    """Contexts of the internal nodes of the suffix tree."""
    return {s[len(s) - k :] for s in suffix_set for k in range(len(s))}


def structure_cost(suffix_set, depth: int) -> int:
    """Length of the pre-order structure code: one bit per internal node,
    one per leaf shallower than ``depth``."""
    leaves = sum(1 for s in suffix_set if len(s) < depth)
    return len(internal_nodes(suffix_set)) + leaves


def gamma(k: float) -> float:
    if k < 0:
        raise ValueError("gamma is defined for k >= 0")
    if k < 1:
        return float(k)
    return 0.5 * math.log2(k) + 1.0


# ------------------------------------------------------------------ contexts


def padded(bits: Sequence[int], depth: int) -> list[int]:
    return [0] * depth + list(bits)


def context_positions(bits: Sequence[int], context: str, depth: int) -> list[int]:
    """1-based times t whose preceding bits (zero-padded) end in ``context``."""
    hist = padded(bits, depth)
    L = len(context)
    out = []
    for t in range(1, len(bits) + 1):
        i = depth + t - 1  # index of x_t in hist
        window = "".join(str(v) for v in hist[i - L : i]) if L else ""
        if window == context:
            out.append(t)
    return out


def subsequence(bits: Sequence[int], context: str, depth: int) -> list[int]:
    return [bits[t - 1] for t in context_positions(bits, context, depth)]


# ------------------------------------------------------------------ CTW


def brute_ctw(bits: Sequence[int], depth: int) -> Fraction:
    """Sum over every suffix set of depth <= D of 2^-cost times the product
    of KT probabilities of the matching subsequences."""
    if depth > 3:
        raise ValueError("brute_ctw is limited to depth <= 3")
    total = Fraction(0)
    for S in enumerate_suffix_sets(depth):
        term = Fraction(1, 2 ** structure_cost(S, depth))
        for s in S:
            term *= kt_probability(subsequence(bits, s, depth))
        total += term
    return total


# ------------------------------------------------------------------ switching


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def exact_decaying_rate(t: int) -> Fraction:
    return Fraction(1, t)


def brute_prior(indices: Sequence[int], n_models: int, schedule=exact_decaying_rate) -> Fraction:
    """Prior weight of a 1-based expert index sequence, by the recursion."""
    if not indices:
        return Fraction(1)
    w = Fraction(1, n_models)
    for t in range(2, len(indices) + 1):
        alpha = _exact(schedule(t))
        if indices[t - 1] == indices[t - 2]:
            w *= 1 - alpha
        else:
            w *= alpha / (n_models - 1)
    return w


def _conditionals(models, bits):
    """cond[j][t] = rho_j(x_{t+1} | x_{1:t}) as exact fractions."""
    return [[_exact(m(bits[:t], bits[t])) for t in range(len(bits))] for m in models]


def brute_switch(bits: Sequence[int], models: Sequence[Callable], schedule=exact_decaying_rate) -> Fraction:
    """Switch-distribution probability of ``bits`` by summing over all N^n
    expert index sequences.

    Each model is called as ``model(history, symbol)`` and returns the
    conditional probability of ``symbol``.
    """
    n, N = len(bits), len(models)
    if N ** n > 3**8:
        raise ValueError("too many index sequences to enumerate")
    cond = _conditionals(models, bits)
    total = Fraction(0)
    for seq in itertools.product(range(1, N + 1), repeat=n):
        term = brute_prior(seq, N, schedule)
        for t, j in enumerate(seq):
            term *= cond[j - 1][t]
        total += term
    return total


def brute_switch_weight(bits: Sequence[int], models: Sequence[Callable], t: int, j: int,
                        schedule=exact_decaying_rate) -> Fraction:
    """Marginal over index sequences whose t-th entry is ``j`` (1-based),
    weighted by the experts' probabilities of the first t - 1 symbols."""
    N = len(models)
    cond = _conditionals(models, bits[: t - 1])
    total = Fraction(0)
    for head in itertools.product(range(1, N + 1), repeat=t - 1):
        term = brute_prior(head + (j,), N, schedule)
        for k, i in enumerate(head):
            term *= cond[i - 1][k]
        total += term
    return total


# ------------------------------------------------------------------ CTS


def brute_cts(bits: Sequence[int], depth: int) -> Fraction:
    """Context-tree switching probability by enumerating, at every internal
    context, all 2^{n_c} expert sequences.

    The switch rate between the (k-1)-th and k-th symbols of a context is
    1 / (t + 1), where t is the global time of the (k-1)-th one.
    """
    if depth > 2 or len(bits) > 10:
        raise ValueError("brute_cts is limited to depth <= 2 and n <= 10")
    bits = list(bits)
    n = len(bits)

    def values(context: str, d: int) -> list[Fraction]:
        """cts value of the context for every prefix x_{1:t}, t = 0..n."""
        times = context_positions(bits, context, depth)
        if d == 0:
            out = []
            sub = []
            for t in range(n + 1):
                if t in times:
                    sub.append(bits[t - 1])
                out.append(kt_probability(sub))
            return out
        v0 = values("0" + context, d - 1)
        v1 = values("1" + context, d - 1)
        sub = [bits[t - 1] for t in times]
        kt_prefix = [kt_probability(sub[:k]) for k in range(len(sub) + 1)]
        kt_ratio = [kt_prefix[k] / kt_prefix[k - 1] for k in range(1, len(sub) + 1)]
        split_ratio = [(v0[t] / v0[t - 1]) * (v1[t] / v1[t - 1]) for t in times]

        out = []
        for t in range(n + 1):
            m = sum(1 for u in times if u <= t)
            total = Fraction(0)
            for seq in itertools.product((0, 1), repeat=m):
                w = HALF if m else Fraction(1)
                for k in range(1, m):
                    alpha = Fraction(1, times[k - 1] + 1)
                    w *= (1 - alpha) if seq[k] == seq[k - 1] else alpha
                term = w
                for k, choice in enumerate(seq):
                    term *= kt_ratio[k] if choice == 0 else split_ratio[k]
                total += term
            out.append(total)
        return out

    return values("", depth)[n]


# ------------------------------------------------------------------ PSTs


@dataclass(frozen=True)
class PstModel:
    """Prediction suffix tree: suffix set plus P(next bit = 1) per leaf."""

    suffix_set: frozenset
    params: Mapping[str, float]

    def __post_init__(self):
        if not is_proper(self.suffix_set):
            raise ValueError("suffix set is not proper")
        if not is_complete(self.suffix_set):
            raise ValueError("suffix set is not complete")
        if set(self.params) != set(self.suffix_set):
            raise ValueError("need exactly one parameter per suffix")
        for s, theta in self.params.items():
            if not 0.0 <= theta <= 1.0:
                raise ValueError(f"parameter for {s!r} outside [0, 1]")

    @property
    def depth(self) -> int:
        return suffix_set_depth(self.suffix_set)

    def context_of(self, history: Sequence[int]) -> str:
        d = self.depth
        recent = list(history[max(len(history) - d, 0) :]) if d else []
        tail = "".join(str(v) for v in [0] * (d - len(recent)) + recent)
        for s in self.suffix_set:
            if tail.endswith(s):
                return s
        raise AssertionError("complete suffix set must match")


EXAMPLE_PST = PstModel(frozenset({"1", "10", "00"}), {"1": 0.1, "10": 0.3, "00": 0.5})


def pst_sample(pst: PstModel, n: int, seed: int) -> list[int]:
    rng = random.Random(seed)
    out: list[int] = []
    for _ in range(n):
        theta = pst.params[pst.context_of(out)]
        out.append(1 if rng.random() < theta else 0)
    return out


def pst_counts(pst: PstModel, bits: Sequence[int]) -> dict[str, tuple[int, int]]:
    counts = {s: [0, 0] for s in pst.suffix_set}
    d = pst.depth
    for t, bit in enumerate(bits):
        counts[pst.context_of(bits[max(t - d, 0) : t])][bit] += 1
    return {s: (c[0], c[1]) for s, c in counts.items()}


def pst_log_prob(pst: PstModel, bits: Sequence[int]) -> float:
    """log2 of the product over leaves of theta^ones * (1 - theta)^zeros."""
    total = 0.0
    for s, (a, b) in pst_counts(pst, bits).items():
        theta = pst.params[s]
        for p, k in ((theta, b), (1.0 - theta, a)):
            if k:
                if p == 0.0:
                    return -math.inf
                total += k * math.log2(p)
    return total


def random_pst(suffix_set, rng: random.Random, grid: Sequence[float] | None = None) -> PstModel:
    grid = grid if grid is not None else [i / 10 for i in range(11)]
    return PstModel(frozenset(suffix_set), {s: rng.choice(grid) for s in sorted(suffix_set)})


# ------------------------------------------------------------------ bounds


@dataclass(frozen=True)
class BoundReport:
    """Terms of the redundancy bounds for one (model, data) pair, in bits."""

    model_cost: float
    param_cost: float
    switch_cost: float
    data_cost: float
    realized: float

    @property
    def ctw_bound(self) -> float:
        return self.model_cost + self.param_cost + self.data_cost

    @property
    def cts_bound(self) -> float:
        return self.model_cost + self.switch_cost + self.param_cost + self.data_cost

    def holds(self, switching: bool, coding_slack: float = 0.0) -> bool:
        bound = self.cts_bound if switching else self.ctw_bound
        return self.realized < bound + coding_slack


def bound_report(pst: PstModel, bits: Sequence[int], depth: int, realized: float) -> BoundReport:
    """``realized`` is the code length to judge: -log2 of the model
    probability, or an actual coded length in bits."""
    S = pst.suffix_set
    n = len(bits)
    size = len(S)
    return BoundReport(
        model_cost=structure_cost(S, depth),
        param_cost=size * gamma(n / size),
        switch_cost=(pst.depth + 1) * math.log2(n) if n else 0.0,
        data_cost=-pst_log_prob(pst, bits),
        realized=realized,
    )
