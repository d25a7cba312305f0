"""Compiled inner loops shared by the context-tree models and the codec.

Node pool layout (structure of arrays, indexed by node id):

* ``child[i, bit]``  int32 id of the child for the next older context bit, -1 if absent
* ``cnt[i, 0..1]``   float32 zero/one counts
* ``nf[i, KT]``      log2 KT probability of the node's subsequence
* ``nf[i, MODEL]``   log2 model value (CTW or CTS mixture) of that subsequence
* ``nf[i, SHARE]``   linear weight of the KT expert in the node's two-way mix.
                     CTS: k / (k + s). CTW: KT / (KT + product of children).
* ``nf[i, LOGBETA]`` CTW only: log2(KT / product of children)

Since the two expert weights of a node always sum to its model value, the
node's conditional probability of the next bit is ``w * xi + (1 - w) * z``,
with ``xi`` the KT conditional and ``z`` the conditional of the child on the
current path. Predicting is therefore pure arithmetic; logs are only taken
when a bit is committed.

History rings hold the most recent ``depth`` context bits;
``hist[(pos - 1 - j) % depth]`` is the j-th most recent bit.
"""

import math

import numpy as np
from numba import njit

LOG_FIELDS = 4
KT, MODEL, SHARE, LOGBETA = 0, 1, 2, 3

PRECISION = 32
FULL = (1 << PRECISION) - 1
HALF = 1 << (PRECISION - 1)
QUARTER = 1 << (PRECISION - 2)
THREE_QUARTERS = HALF + QUARTER
P_MIN = 2.0**-20
P_MAX = 1.0 - 2.0**-20

# coder state slots: low, high, pending, (decoder) value
LOW, HIGH, PENDING, VALUE = 0, 1, 2, 3
# meta slots: node count, history ring position, bits written / read, renorm shifts
N_NODES, HIST_POS, BITPOS, SHIFTS = 0, 1, 2, 3


@njit(cache=True)
def _log2(p):
    if p == 0.5:
        return -1.0
    return math.log2(p)


@njit(cache=True)
def new_node(child, cnt, nf, meta, init_share):
    i = meta[N_NODES]
    meta[N_NODES] = i + 1
    child[i, 0] = -1
    child[i, 1] = -1
    cnt[i, 0] = 0.0
    cnt[i, 1] = 0.0
    nf[i, KT] = 0.0
    nf[i, MODEL] = 0.0
    nf[i, SHARE] = init_share
    nf[i, LOGBETA] = 0.0
    return i


@njit(cache=True)
def find_path(child, cnt, nf, meta, root, hist, depth, path, create, init_share):
    """Fill ``path[0..depth]`` with node ids from root to leaf (-1 if missing)."""
    node = root
    path[0] = root
    pos = meta[HIST_POS]
    for d in range(depth):
        if node < 0:
            path[d + 1] = -1
            continue
        bit = hist[(pos - 1 - d) % depth]
        nxt = child[node, bit]
        if nxt < 0 and create:
            nxt = new_node(child, cnt, nf, meta, init_share)
            child[node, bit] = nxt
        path[d + 1] = nxt
        node = nxt


@njit(cache=True)
def predict(cnt, nf, path, depth, init_share, bit, xis, conds):
    """Conditional probability of ``bit`` at every path node, leaf to root.

    ``xis[d]`` receives the KT conditional and ``conds[d]`` the mixture
    conditional at depth ``d``. Missing nodes behave as fresh ones. Returns
    the root conditional.
    """
    z = 1.0
    for d in range(depth, -1, -1):
        node = path[d]
        if node >= 0:
            a = np.float64(cnt[node, 0])
            b = np.float64(cnt[node, 1])
            w = nf[node, SHARE]
        else:
            a = 0.0
            b = 0.0
            w = init_share
        if bit:
            xi = (b + 0.5) / (a + b + 1.0)
        else:
            xi = (a + 0.5) / (a + b + 1.0)
        if d == depth:
            c = xi
        else:
            c = w * xi + (1.0 - w) * z
        xis[d] = xi
        conds[d] = c
        z = c
    return z


@njit(cache=True)
def commit(cnt, nf, path, depth, is_cts, scale, seen, bit, xis, conds):
    """Write the state after ``bit`` into every path node.

    ``xis``/``conds`` must come from :func:`predict` for the same ``bit``.
    ``seen`` is the number of symbols this tree absorbed before ``bit``.
    """
    # switch rate applied after the n-th symbol is 1 / (n + 1), n = seen + 1
    alpha = 1.0 / (seen + 2.0)
    stay = 1.0 - 2.0 * alpha
    log_z = 0.0
    for d in range(depth, -1, -1):
        node = path[d]
        xi = xis[d]
        c = conds[d]
        lxi = _log2(xi)
        lc = _log2(c)
        nf[node, KT] += lxi
        nf[node, MODEL] += lc
        if d < depth:
            if is_cts:
                nf[node, SHARE] = alpha + stay * (nf[node, SHARE] * xi / c)
            else:
                lb = nf[node, LOGBETA] + lxi - log_z
                nf[node, LOGBETA] = lb
                if lb >= 0.0:
                    nf[node, SHARE] = 1.0 / (1.0 + 2.0 ** (-lb))
                else:
                    e = 2.0**lb
                    nf[node, SHARE] = e / (1.0 + e)
        a = np.float64(cnt[node, 0])
        b = np.float64(cnt[node, 1])
        if bit:
            b += 1.0
        else:
            a += 1.0
        if scale != 1.0:
            a *= scale
            b *= scale
        cnt[node, 0] = a
        cnt[node, 1] = b
        log_z = lc


@njit(cache=True)
def push_history(hist, meta, depth, bit):
    if depth > 0:
        pos = meta[HIST_POS]
        hist[pos] = bit
        meta[HIST_POS] = (pos + 1) % depth


# ---------------------------------------------------------------- coder core


@njit(cache=True)
def clamp(p):
    if p < P_MIN:
        return P_MIN
    if p > P_MAX:
        return P_MAX
    return p


@njit(cache=True)
def _put_bit(out, meta, bit):
    pos = meta[BITPOS]
    if bit:
        out[pos >> 3] |= np.uint8(0x80 >> (pos & 7))
    meta[BITPOS] = pos + 1


@njit(cache=True)
def _emit(coder, out, meta, bit):
    _put_bit(out, meta, bit)
    for _ in range(coder[PENDING]):
        _put_bit(out, meta, 1 - bit)
    coder[PENDING] = 0


@njit(cache=True)
def encode_bit(coder, out, meta, p_one, bit):
    low = coder[LOW]
    high = coder[HIGH]
    span = high - low + 1
    split = np.int64(span * clamp(p_one))
    if bit:
        high = low + split - 1
    else:
        low = low + split
    while True:
        if high < HALF:
            _emit(coder, out, meta, 0)
        elif low >= HALF:
            _emit(coder, out, meta, 1)
            low -= HALF
            high -= HALF
        elif low >= QUARTER and high < THREE_QUARTERS:
            coder[PENDING] += 1
            low -= QUARTER
            high -= QUARTER
        else:
            break
        low = low << 1
        high = (high << 1) | 1
    coder[LOW] = low
    coder[HIGH] = high


@njit(cache=True)
def finish_encoder(coder, out, meta):
    coder[PENDING] += 1
    if coder[LOW] < QUARTER:
        _emit(coder, out, meta, 0)
    else:
        _emit(coder, out, meta, 1)


@njit(cache=True)
def _get_bit(payload, meta):
    pos = meta[BITPOS]
    meta[BITPOS] = pos + 1
    if (pos >> 3) >= payload.shape[0]:
        return 0
    return (payload[pos >> 3] >> (7 - (pos & 7))) & 1


@njit(cache=True)
def start_decoder(coder, payload, meta):
    coder[LOW] = 0
    coder[HIGH] = FULL
    coder[PENDING] = 0
    value = 0
    for _ in range(PRECISION):
        value = (value << 1) | _get_bit(payload, meta)
    coder[VALUE] = value


@njit(cache=True)
def decode_bit(coder, payload, meta, p_one):
    low = coder[LOW]
    high = coder[HIGH]
    value = coder[VALUE]
    span = high - low + 1
    split = np.int64(span * clamp(p_one))
    if value < low + split:
        bit = 1
        high = low + split - 1
    else:
        bit = 0
        low = low + split
    while True:
        if high < HALF:
            pass
        elif low >= HALF:
            low -= HALF
            high -= HALF
            value -= HALF
        elif low >= QUARTER and high < THREE_QUARTERS:
            low -= QUARTER
            high -= QUARTER
            value -= QUARTER
        else:
            break
        low = low << 1
        high = (high << 1) | 1
        value = (value << 1) | _get_bit(payload, meta)
        meta[SHIFTS] += 1
    coder[LOW] = low
    coder[HIGH] = high
    coder[VALUE] = value
    return bit


# ------------------------------------------------------------ stream drivers


@njit(cache=True)
def encode_stream(data, start, child, cnt, nf, meta, hist, seen, coder, out,
                  depth, is_cts, byte_mode, scale, init_share):
    """Model and arithmetic-code ``data[start:]``.

    Returns the index of the first byte not yet coded; the caller grows the
    node pool or output buffer and calls again when it is short of the end.
    """
    path = np.empty(depth + 1, np.int64)
    xis = np.empty(depth + 1)
    conds = np.empty(depth + 1)
    cap = child.shape[0]
    out_cap = out.shape[0] * 8
    i = start
    while i < data.shape[0]:
        if meta[N_NODES] + 8 * (depth + 1) > cap:
            return i
        if meta[BITPOS] + coder[PENDING] + 8 * 64 > out_cap:
            return i
        byte = data[i]
        prefix = 1
        for k in range(8):
            bit = (byte >> (7 - k)) & 1
            tree = prefix - 1 if byte_mode else 0
            n = seen[tree]
            find_path(child, cnt, nf, meta, tree, hist, depth, path, True, init_share)
            p_one = predict(cnt, nf, path, depth, init_share, 1, xis, conds)
            encode_bit(coder, out, meta, p_one, bit)
            if not bit:
                predict(cnt, nf, path, depth, init_share, 0, xis, conds)
            commit(cnt, nf, path, depth, is_cts, scale, n, bit, xis, conds)
            seen[tree] = n + 1
            if byte_mode:
                prefix = (prefix << 1) | bit
            else:
                push_history(hist, meta, depth, bit)
        if byte_mode:
            for k in range(8):
                push_history(hist, meta, depth, (byte >> (7 - k)) & 1)
        i += 1
    return i


@njit(cache=True)
def decode_stream(payload, out, start, child, cnt, nf, meta, hist, seen, coder,
                  depth, is_cts, byte_mode, scale, init_share):
    """Mirror of :func:`encode_stream`, writing decoded bytes into ``out``."""
    path = np.empty(depth + 1, np.int64)
    xis = np.empty(depth + 1)
    conds = np.empty(depth + 1)
    cap = child.shape[0]
    i = start
    while i < out.shape[0]:
        if meta[N_NODES] + 8 * (depth + 1) > cap:
            return i
        prefix = 1
        byte = 0
        for k in range(8):
            tree = prefix - 1 if byte_mode else 0
            n = seen[tree]
            find_path(child, cnt, nf, meta, tree, hist, depth, path, True, init_share)
            p_one = predict(cnt, nf, path, depth, init_share, 1, xis, conds)
            bit = decode_bit(coder, payload, meta, p_one)
            if not bit:
                predict(cnt, nf, path, depth, init_share, 0, xis, conds)
            commit(cnt, nf, path, depth, is_cts, scale, n, bit, xis, conds)
            seen[tree] = n + 1
            byte = (byte << 1) | bit
            if byte_mode:
                prefix = (prefix << 1) | bit
            else:
                push_history(hist, meta, depth, bit)
        if byte_mode:
            for k in range(8):
                push_history(hist, meta, depth, (byte >> (7 - k)) & 1)
        out[i] = byte
        i += 1
    return i


@njit(cache=True)
def absorb_bits(bits, child, cnt, nf, meta, root, hist, seen, depth, is_cts, scale,
                init_share, trace):
    """Update a single flat tree with ``bits``; ``trace`` receives root log values."""
    path = np.empty(depth + 1, np.int64)
    xis = np.empty(depth + 1)
    conds = np.empty(depth + 1)
    for j in range(bits.shape[0]):
        bit = bits[j]
        find_path(child, cnt, nf, meta, root, hist, depth, path, True, init_share)
        predict(cnt, nf, path, depth, init_share, bit, xis, conds)
        commit(cnt, nf, path, depth, is_cts, scale, seen[0], bit, xis, conds)
        seen[0] += 1
        push_history(hist, meta, depth, bit)
        if trace.shape[0] > j:
            trace[j] = nf[root, MODEL]
