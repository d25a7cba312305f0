"""Quick equivalence checks of the incremental models against the
brute-force oracles, for ``ctsw selftest``."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable

from . import oracle
from .codec import compress, decompress
from .model import ContextTree, ModelConfig, Variant
from .switching import SwitchEnsemble


def _bernoulli(theta: float):
    return lambda history, symbol: theta if symbol else 1.0 - theta


def _check_ctw(rng: random.Random) -> float:
    worst = 0.0
    for _ in range(60):
        depth = rng.randint(0, 3)
        bits = [rng.randint(0, 1) for _ in range(rng.randint(0, 12))]
        tree = ContextTree(ModelConfig(depth, Variant.CTW))
        for b in bits:
            tree.update(b)
        ref = float(oracle.brute_ctw(bits, depth))
        worst = max(worst, abs(2.0 ** tree.log_prob() / ref - 1.0))
    return worst


def _check_cts(rng: random.Random) -> float:
    worst = 0.0
    for _ in range(60):
        depth = rng.randint(0, 1)
        bits = [rng.randint(0, 1) for _ in range(rng.randint(0, 8))]
        tree = ContextTree(ModelConfig(depth, Variant.CTS))
        for b in bits:
            tree.update(b)
        ref = float(oracle.brute_cts(bits, depth))
        worst = max(worst, abs(2.0 ** tree.log_prob() / ref - 1.0))
    return worst


def _check_switch(rng: random.Random) -> float:
    worst = 0.0
    for _ in range(20):
        n_models = rng.randint(2, 3)
        thetas = [rng.choice([0.1, 0.2, 0.5, 0.8, 0.9]) for _ in range(n_models)]
        models = [_bernoulli(t) for t in thetas]
        bits = [rng.randint(0, 1) for _ in range(rng.randint(1, 6))]
        ens = SwitchEnsemble(n_models)
        for t, b in enumerate(bits):
            ens.step_update([m(bits[:t], b) for m in models])
        ref = float(oracle.brute_switch(bits, models))
        worst = max(worst, abs(2.0 ** ens.total_log_prob / ref - 1.0))
    return worst


def _check_round_trip(rng: random.Random) -> float:
    for variant in Variant:
        for depth in (0, 8, 48):
            data = bytes(rng.randrange(4) + 97 for _ in range(rng.randint(0, 400)))
            if decompress(compress(data, variant=variant, depth=depth)) != data:
                return 1.0
    return 0.0


def _check_counts(rng: random.Random) -> float:
    got = [len(oracle.enumerate_suffix_sets(d)) for d in range(5)]
    kraft = max(abs(sum(Fraction(1, 2 ** oracle.structure_cost(S, d)) for S in oracle.enumerate_suffix_sets(d)) - 1)
                for d in range(5))
    return 0.0 if got == [1, 2, 5, 26, 677] and kraft == 0 else 1.0


CHECKS: list[tuple[str, Callable[[random.Random], float], float]] = [
    ("CTW vs suffix-set enumeration", _check_ctw, 1e-9),
    ("CTS vs expert-sequence enumeration", _check_cts, 1e-9),
    ("switch ensemble vs index-sequence enumeration", _check_switch, 1e-10),
    ("suffix-set counts and code completeness", _check_counts, 0.0),
    ("codec round trip", _check_round_trip, 0.0),
]


def run_selftest(report: Callable[[str], None] = print, seed: int = 2012) -> bool:
    rng = random.Random(seed)
    ok = True
    for name, check, tol in CHECKS:
        err = check(rng)
        passed = math.isfinite(err) and err <= tol
        ok &= passed
        report(f"{'PASS' if passed else 'FAIL'}  {name}  (worst error {err:.2e}, tolerance {tol:g})")
    return ok
