"""Depth-bounded context-tree models: CTW and CTS over binary streams."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _kernels as K
from .kt import KtCounts


class Variant(enum.IntEnum):
    CTW = 0
    CTS = 1
    CTS_STAR = 2

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, text: str) -> "Variant":
        key = text.strip().lower().replace("-", "_").replace("*", "_star")
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown variant {text!r}") from None


@dataclass(frozen=True)
class ModelConfig:
    depth: int = 48
    variant: Variant = Variant.CTS
    count_scale: float = 1.0
    init_s: float = 0.5
    init_k: float = 0.5

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if not 0.0 < self.count_scale <= 1.0:
            raise ValueError("count_scale must lie in (0, 1]")
        if not (0.0 < self.init_s < 1.0 and 0.0 < self.init_k < 1.0):
            raise ValueError("initial switch weights must lie in (0, 1)")
        if abs(self.init_s + self.init_k - 1.0) > 1e-12:
            raise ValueError("init_s + init_k must equal 1")

    @classmethod
    def for_variant(cls, variant: Variant | str, depth: int = 48) -> "ModelConfig":
        """Standard settings: plain KT and 1/2-1/2 weights, or the enhanced CTS*."""
        if isinstance(variant, str):
            variant = Variant.parse(variant)
        variant = Variant(variant)
        if variant is Variant.CTS_STAR:
            return cls(depth, variant, count_scale=0.98, init_s=0.925, init_k=0.075)
        return cls(depth, variant)

    @property
    def is_switching(self) -> bool:
        return self.variant is not Variant.CTW

    @property
    def byte_decomposed(self) -> bool:
        return self.variant is Variant.CTS_STAR

    @property
    def label(self) -> str:
        return f"{self.variant.label}{self.depth}"

    def initial_share(self) -> float:
        """Weight of the KT expert at a fresh node."""
        return self.init_k if self.is_switching else 0.5


@dataclass(frozen=True)
class CtsNode:
    """Snapshot of one context-tree node.

    For CTW nodes ``log_k``/``log_s`` are None; the mixture uses fixed 1/2
    weights.
    """

    context: str
    kt: KtCounts
    log_model: float
    log_k: float | None
    log_s: float | None


class NodePool:
    """Growable arrays holding every node of one or more context trees."""

    def __init__(self, capacity: int = 1024):
        capacity = max(int(capacity), 16)
        self.child = np.full((capacity, 2), -1, dtype=np.int32)
        self.cnt = np.zeros((capacity, 2), dtype=np.float32)
        self.nf = np.zeros((capacity, K.LOG_FIELDS), dtype=np.float64)
        # node count, history position, coder bit position, decoder shifts
        self.meta = np.zeros(4, dtype=np.int64)

    @property
    def capacity(self) -> int:
        return self.child.shape[0]

    @property
    def size(self) -> int:
        return int(self.meta[K.N_NODES])

    def reserve(self, extra: int) -> None:
        need = self.size + extra
        if need <= self.capacity:
            return
        new_cap = max(need, int(self.capacity * 1.5) + 16)
        self.child = _grow(self.child, new_cap, -1)
        self.cnt = _grow(self.cnt, new_cap, 0)
        self.nf = _grow(self.nf, new_cap, 0)

    def add_root(self, init_share: float) -> int:
        self.reserve(1)
        return K.new_node(self.child, self.cnt, self.nf, self.meta, init_share)

    def nbytes(self) -> int:
        return self.child.nbytes + self.cnt.nbytes + self.nf.nbytes


def _grow(arr: np.ndarray, rows: int, fill) -> np.ndarray:
    out = np.full((rows,) + arr.shape[1:], fill, dtype=arr.dtype)
    out[: arr.shape[0]] = arr
    return out


class _TreeModel:
    """Shared machinery for models whose nodes live in a :class:`NodePool`."""

    n_trees = 1

    def __init__(self, config: ModelConfig, pool: NodePool | None = None):
        self.config = config
        self.pool = pool if pool is not None else NodePool()
        self._share = config.initial_share()
        self.roots = [self.pool.add_root(self._share) for _ in range(self.n_trees)]
        depth = config.depth
        self.hist = np.zeros(max(depth, 1), dtype=np.int64)
        self._hist_pos = 0
        self.seen = np.zeros(self.n_trees, dtype=np.int64)
        self._path = np.empty(depth + 1, dtype=np.int64)
        self._xis = np.empty(depth + 1)
        self._conds = np.empty(depth + 1)

    @property
    def depth(self) -> int:
        return self.config.depth

    @property
    def node_count(self) -> int:
        return self.pool.size

    def _tree(self) -> int:
        return 0

    def _locate(self, create: bool) -> int:
        tree = self._tree()
        pool = self.pool
        if create:
            pool.reserve(self.depth + 1)
        pool.meta[K.HIST_POS] = self._hist_pos
        K.find_path(pool.child, pool.cnt, pool.nf, pool.meta, self.roots[tree], self.hist,
                    self.depth, self._path, create, self._share)
        return tree

    def _predict_path(self, symbol: int) -> float:
        return K.predict(self.pool.cnt, self.pool.nf, self._path, self.depth, self._share,
                         symbol, self._xis, self._conds)

    def predict(self, symbol: int) -> float:
        """Conditional probability of ``symbol`` given the history. Does not
        modify the model."""
        self._locate(create=False)
        return self._predict_path(1 if symbol else 0)

    def update(self, symbol: int):
        symbol = 1 if symbol else 0
        tree = self._locate(create=True)
        self._predict_path(symbol)
        cfg = self.config
        K.commit(self.pool.cnt, self.pool.nf, self._path, self.depth, cfg.is_switching,
                 cfg.count_scale, self.seen[tree], symbol, self._xis, self._conds)
        self.seen[tree] += 1
        self._advance(symbol)
        return self

    def _advance(self, symbol: int) -> None:
        self._push(symbol)

    def _push(self, bit: int) -> None:
        if self.depth:
            self.hist[self._hist_pos] = bit
            self._hist_pos = (self._hist_pos + 1) % self.depth

    def log_prob(self) -> float:
        """log2 probability the model assigns to everything seen so far."""
        return float(sum(self.pool.nf[r, K.MODEL] for r in self.roots))

    def _snapshot(self, i: int, context: str) -> CtsNode:
        a, b = (float(v) for v in self.pool.cnt[i])
        log_kt, log_model, share, _ = (float(v) for v in self.pool.nf[i])
        kt = KtCounts(a, b, log_kt)
        if not self.config.is_switching:
            return CtsNode(context, kt, log_model, None, None)
        # the two switch weights always sum to the node's model value
        return CtsNode(context, kt, log_model,
                       log_model + math.log2(share), log_model + math.log2(1.0 - share))

    def _walk(self, root: int) -> Iterator[CtsNode]:
        stack = [(root, "")]
        while stack:
            i, ctx = stack.pop()
            yield self._snapshot(i, ctx)
            for bit in (0, 1):
                j = int(self.pool.child[i, bit])
                if j >= 0:
                    stack.append((j, str(bit) + ctx))

    def _lookup(self, root: int, context: str) -> CtsNode | None:
        i = root
        for ch in reversed(context):
            i = int(self.pool.child[i, int(ch)])
            if i < 0:
                return None
        return self._snapshot(i, context)


class ContextTree(_TreeModel):
    """A single CTW or CTS model over a flat bit stream.

    The context of each bit is the preceding ``depth`` bits, with the history
    before the first bit taken to be all zeros.
    """

    @property
    def root(self) -> int:
        return self.roots[0]

    @property
    def symbols_seen(self) -> int:
        return int(self.seen[0])

    def update_bits(self, bits: Iterable[int], trace: bool = False) -> np.ndarray | None:
        """Absorb many bits in one compiled call; optionally return the root
        log2 value after each one."""
        arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits), dtype=np.int64)
        pool = self.pool
        pool.reserve(arr.shape[0] * (self.depth + 1))
        pool.meta[K.HIST_POS] = self._hist_pos
        out = np.empty(arr.shape[0] if trace else 0)
        cfg = self.config
        K.absorb_bits(arr, pool.child, pool.cnt, pool.nf, pool.meta, self.root, self.hist,
                      self.seen, self.depth, cfg.is_switching, cfg.count_scale, self._share, out)
        self._hist_pos = int(pool.meta[K.HIST_POS])
        return out if trace else None

    def context(self) -> str:
        """Current context, most recent bit last."""
        d = self.depth
        recent = [int(self.hist[(self._hist_pos - 1 - j) % d]) for j in range(d)] if d else []
        return "".join(str(b) for b in reversed(recent))

    def node(self, context: str) -> CtsNode | None:
        """Node for ``context`` (most recent bit last), None if never visited."""
        return self._lookup(self.root, context)

    def nodes(self) -> Iterator[CtsNode]:
        return self._walk(self.root)


class ByteDecomposedModel(_TreeModel):
    """Binary decomposition of bytes: one context tree per within-byte prefix.

    Bit ``i`` of a byte goes to the tree owned by the byte's first ``i`` bits
    (255 trees). All trees share one context: the last ``depth`` bits of the
    preceding whole bytes. Each tree runs its own switch-rate clock.
    """

    n_trees = 255

    def __init__(self, config: ModelConfig, pool: NodePool | None = None):
        super().__init__(config, pool)
        self.prefix = 1
        self._pending: list[int] = []

    def _tree(self) -> int:
        return self.prefix - 1

    def _advance(self, symbol: int) -> None:
        self._pending.append(symbol)
        self.prefix = (self.prefix << 1) | symbol
        if len(self._pending) == 8:
            for bit in self._pending:
                self._push(bit)
            self._pending = []
            self.prefix = 1

    def tree_nodes(self, prefix: str) -> Iterator[CtsNode]:
        """Nodes of the tree that codes the bit following ``prefix``."""
        return self._walk(self.roots[self._prefix_index(prefix)])

    def tree_symbols(self, prefix: str) -> int:
        return int(self.seen[self._prefix_index(prefix)])

    @staticmethod
    def _prefix_index(prefix: str) -> int:
        if len(prefix) > 7:
            raise ValueError("a byte prefix has at most 7 bits")
        return int("1" + prefix, 2) - 1


def make_model(config: ModelConfig) -> ContextTree | ByteDecomposedModel:
    """Bit-level model the codec uses for ``config``."""
    if config.byte_decomposed:
        return ByteDecomposedModel(config)
    return ContextTree(config)


def model_predict(tree, symbol: int) -> float:
    return tree.predict(symbol)


def model_update(tree, symbol: int):
    return tree.update(symbol)


def model_log_prob(tree) -> float:
    return tree.log_prob()
