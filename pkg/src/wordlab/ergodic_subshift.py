# The strictly-ergodic construction driven by a growth function f:
#
#   b = f(1) = alphabet size, c_0 = 1, N_k = b c_0 ... c_k
#   branch rule:  N_k^2 <= 2 f(2^{k+2})  ->  c_{k+1} = N_k
#                 N_k^2 >  2 f(2^{k+2})  ->  c_{k+1} = floor(2 f(2^{k+2})/N_k),
#                                            c_{k+2} = 1
#   invariants:   1 <= c_{k+1} <= N_k,   f(2^k) <= N_k <= 2 f(2^{k+1})
#
#   W(0) = Sigma, W(k+1) = W(k) C(k) with C(k) subset of W(k), |C(k)| = c_k;
#   U(k) is an ordered queue; when c_k = 1 and the head u_1 fits (|u_1| <= 2^k)
#   the chosen C(k) = {v} has prefix u_1 and the head is consumed.
#
#   I_n = [a_n, b_n] = convex hull of {phi_u(w) : w in W(n)}, Delta_n = b_n - a_n
#     I_{n+1} <= I_n + [0, d/2^{n+1}]          (d = |u|)
#     Delta_{n+1} <= Delta_n + d/2^{n+1},  and <= Delta_n/2 + d/2^{n+1} if c_n = 1
#
#   Every factor of the subshift splits into W-blocks with increasing then
#   decreasing levels (binary-expansion decomposition).

import random
import string
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .growth_functions import GrowthTable, check_growth_properties
from .words_core import count_occurrences, max_bytes_budget


@dataclass
class ErgodicParams:
    f: GrowthTable = None
    max_level: int = 8
    choice_policy: str = "lexicographic"   # or "seeded-random"
    seed: int = 0
    memory_budget: int = None

    def __post_init__(self):
        if self.f is None:
            raise ValueError("a growth table f is required")
        if self.f(1) < 2:
            raise ValueError("f(1) = alphabet size must be >= 2")
        if self.max_level < 1:
            raise ValueError("max_level must be >= 1")
        if self.choice_policy not in ("lexicographic", "seeded-random"):
            raise ValueError("unknown choice_policy %r" % self.choice_policy)
        rep = check_growth_properties(self.f)
        if not rep["nondecreasing"]:
            raise ValueError("f must be non-decreasing")
        if not rep["submultiplicative"]:
            raise ValueError("f must be submultiplicative on the tabulated "
                             "range; violations: %r" % rep["violating_pairs"][:3])


@dataclass
class CSequence:
    c: list
    N: list
    ones: set


def build_c_sequence(params):
    """c_0..c_K and N_k = b c_0...c_k by the exact branch rule."""
    f, K = params.f, params.max_level
    if f.n_max < 2 ** (K + 2):
        raise ValueError("horizon: f must be tabulated through 2^(K+2) = %d "
                         "(have %d)" % (2 ** (K + 2), f.n_max))
    b = f(1)
    c, N = [1], [b]
    forced_one = set()
    for k in range(K):
        if (k + 1) in forced_one:
            nxt = 1
        elif N[k] ** 2 <= 2 * f(2 ** (k + 2)):
            nxt = N[k]
        else:
            nxt = (2 * f(2 ** (k + 2))) // N[k]
            forced_one.add(k + 2)
        c.append(nxt)
        N.append(N[k] * nxt)
    ones = {k for k, v in enumerate(c) if v == 1}
    # invariants
    assert c[0] == 1
    for k in range(K):
        assert 1 <= c[k + 1] <= N[k], "c_%d out of range" % (k + 1)
    for k in range(K + 1):
        assert f(2 ** k) <= N[k] <= 2 * f(2 ** (k + 1)), "N_%d sandwich fails" % k
    if ones == {0}:
        raise ValueError("no k >= 1 with c_k = 1 on the tabulated range: "
                         "f is not subexponential there, or the horizon is "
                         "too short")
    return CSequence(c=c, N=N, ones=ones)


@dataclass
class ErgodicLevel:
    k: int
    W: list                       # sorted when the policy is lexicographic
    C: list = None                # chosen subset, None at the deepest level
    queue_head: str = None
    queue_len: int = 0
    consumed: bool = False


@dataclass
class ErgodicLevels:
    params: ErgodicParams
    cseq: CSequence
    levels: list
    alphabet: str
    queue: list = field(default_factory=list)
    run_log: list = field(default_factory=list)

    @property
    def deepest(self):
        return len(self.levels) - 1

    def W(self, k):
        return self.levels[k].W


def build_ergodic_levels(params, cseq=None):
    """Levels 0..K with the queue bookkeeping and a JSON-ready run log."""
    cseq = cseq or build_c_sequence(params)
    K = params.max_level
    b = params.f(1)
    if b > len(string.ascii_lowercase):
        raise ValueError("alphabet size %d exceeds 26 letters" % b)
    alphabet = string.ascii_lowercase[:b]
    budget = max_bytes_budget(params.memory_budget)
    need = sum(cseq.N[max(k - 1, 0)] * 2 ** k for k in range(K + 1))
    if need > budget:
        raise ValueError("budget: levels need about %d bytes (budget %d)"
                         % (need, budget))
    rng = random.Random(params.seed)
    lex = params.choice_policy == "lexicographic"

    W = sorted(alphabet)
    queue = list(W) if lex else rng.sample(W, len(W))
    levels = []
    log = []
    for k in range(K + 1):
        c_k = cseq.c[k]
        head = queue[0]
        lv = ErgodicLevel(k=k, W=W, queue_head=head, queue_len=len(queue))
        levels.append(lv)
        log.append({"k": k, "c_k": c_k, "W_size": len(W),
                    "queue_len": len(queue), "consumed_head": False})
        if k == K:
            break
        consume = (c_k == 1) and (2 ** k >= len(head))
        if consume:
            cand = sorted(v for v in W if v.startswith(head))
            assert cand, ("construction invariant violated: no word of W(%d) "
                          "has prefix %r" % (k, head))
            C = [cand[0] if lex else rng.choice(cand)]
        else:
            C = sorted(W)[:c_k] if lex else sorted(rng.sample(W, c_k))
        lv.C = C
        lv.consumed = consume
        log[-1]["consumed_head"] = consume
        W = sorted(w + v for w in W for v in C)
        assert len(W) == len(lv.W) * c_k, "W(%d) lost words" % (k + 1)
        appended = list(W) if lex else rng.sample(W, len(W))
        queue = queue + appended
        if consume:
            queue = queue[1:]
    return ErgodicLevels(params=params, cseq=cseq, levels=levels,
                         alphabet=alphabet, queue=queue, run_log=log)


@dataclass
class FrequencyInterval:
    u: str
    n: int
    a: Fraction
    b: Fraction

    @property
    def delta(self):
        return self.b - self.a


def frequency_interval(levels, u, n):
    """Exact I_n = [min, max] of phi_u over W(n)."""
    if not (0 <= n <= levels.deepest):
        raise ValueError("level %d not built" % n)
    if len(u) > 2 ** n:
        raise ValueError("|u| must be <= 2^n")
    if len(u) == 0:
        raise ValueError("empty pattern")
    counts = [count_occurrences(u, w) for w in levels.W(n)]
    denom = 2 ** n
    return FrequencyInterval(u=u, n=n,
                             a=Fraction(min(counts), denom),
                             b=Fraction(max(counts), denom))


def interval_rows(levels, u, n_max=None):
    """(n, a_n, b_n, Delta_n) rows for every built level, exact rationals."""
    n_lo = 0
    while 2 ** n_lo < len(u):
        n_lo += 1
    n_hi = levels.deepest if n_max is None else min(n_max, levels.deepest)
    return [(n, iv.a, iv.b, iv.delta)
            for n in range(n_lo, n_hi + 1)
            for iv in [frequency_interval(levels, u, n)]]


def verify_interval_nesting(levels, u):
    """a_n monotone, the two Delta recursions, and the explicit window bound
    Delta_{n+1} <= 2^{-k_n} Delta_{n0} + d (2^{-(n0+1)} + ... + 2^{-(n+1)})
    for every window [n0, n], all in exact rationals."""
    rows = interval_rows(levels, u)
    if len(rows) < 3:
        raise ValueError("need at least 3 built levels covering |u|")
    d = len(u)
    ns = [r[0] for r in rows]
    a = {r[0]: r[1] for r in rows}
    b = {r[0]: r[2] for r in rows}
    delta = {r[0]: r[3] for r in rows}
    S = levels.cseq.ones
    mono = all(a[n1] >= a[n0] for n0, n1 in zip(ns, ns[1:]))
    contain = all(a[n1] >= a[n0] and b[n1] <= b[n0] + Fraction(d, 2 ** n1)
                  for n0, n1 in zip(ns, ns[1:]))
    rec1 = all(delta[n1] <= delta[n0] + Fraction(d, 2 ** n1)
               for n0, n1 in zip(ns, ns[1:]))
    rec2 = all(delta[n + 1] <= delta[n] / 2 + Fraction(d, 2 ** (n + 1))
               for n in ns[:-1] if n in S and n + 1 in delta)
    window = True
    for i, n0 in enumerate(ns):
        for n in ns[i:-1]:
            k_n = len([m for m in S if n0 <= m <= n])
            tail = sum(Fraction(1, 2 ** (m + 1)) for m in range(n0, n + 1))
            if delta[n + 1] > Fraction(delta[n0], 2 ** k_n) + d * tail:
                window = False
    report = {
        "u": u, "d": d, "levels": ns,
        "a_monotone": bool(mono),
        "containment": bool(contain),
        "delta_recursion_all_n": bool(rec1),
        "delta_recursion_S": bool(rec2),
        "window_bound": bool(window),
        "intervals": [(n, str(a[n]), str(b[n]), str(delta[n])) for n in ns],
        "pass": bool(mono and contain and rec1 and rec2 and window),
    }
    return report


# ---------------------------------------------------------------------------
# binary-expansion decomposition of factors

def _prefix_blocks(v, Wsets):
    """v a nonempty prefix of a W(t) word -> blocks of decreasing levels."""
    blocks = []
    while v:
        m = len(v).bit_length() - 1          # 2^m <= |v|
        head, v = v[:2 ** m], v[2 ** m:]
        assert head in Wsets[m], "prefix block is not in W(%d)" % m
        blocks.append((m, head))
    return blocks


def _suffix_blocks(v, Wsets):
    """v a nonempty suffix of a built word -> blocks of increasing levels."""
    out = []
    while v:
        L = len(v)
        if L & (L - 1) == 0 and v in Wsets[L.bit_length() - 1]:
            out.append((L.bit_length() - 1, v))
            break
        t = (L - 1).bit_length()             # 2^{t-1} < |v| <= 2^t
        tail = v[-(2 ** (t - 1)):]
        assert tail in Wsets[t - 1], "suffix block is not in W(%d)" % (t - 1)
        out.append((t - 1, tail))
        v = v[:-(2 ** (t - 1))]
    return out[::-1]


def decompose_factor(levels, v):
    """v = u_1...u_r w_1...w_s with u_i in W(n_i), w_j in W(m_j),
    n_1 < ... < n_r and m_1 > ... > m_s, via the binary-expansion procedure."""
    if not v:
        raise ValueError("empty factor")
    Wsets = [frozenset(lv.W) for lv in levels.levels]
    t = host = None
    for k, lv in enumerate(levels.levels):
        if 2 ** k < len(v):
            continue
        for w in lv.W:
            if v in w:
                t, host = k, w
                break
        if t is not None:
            break
    if t is None:
        raise ValueError("not a factor of any built word (deepest level %d)"
                         % levels.deepest)
    if v in Wsets[t]:
        inc, dec = [], [(t, v)]
    else:
        # t >= 1 and, by minimality of t, every occurrence straddles the middle
        h = 2 ** (t - 1)
        i = host.find(v)
        assert i < h < i + len(v), "occurrence does not straddle the middle"
        inc = _suffix_blocks(v[:h - i], Wsets)
        dec = _prefix_blocks(v[h - i:], Wsets)
    blocks = inc + dec
    # validation
    assert "".join(w for _, w in blocks) == v
    inc_levels = [m for m, _ in inc]
    dec_levels = [m for m, _ in dec]
    assert inc_levels == sorted(inc_levels) and len(set(inc_levels)) == len(inc_levels)
    assert dec_levels == sorted(dec_levels, reverse=True) \
        and len(set(dec_levels)) == len(dec_levels)
    for m, w in blocks:
        assert w in Wsets[m], "block is not a W(%d) member" % m
    return {"v": v, "blocks": blocks, "r": len(inc), "s": len(dec),
            "minimal_level": t}


# ---------------------------------------------------------------------------
# finite reflections of the complexity sandwich and the frequency limit

def language_complexity(levels, n, depth=None):
    """Count of distinct length-n factors of the built words, with a
    stabilization label: the deepest two levels must agree for "stabilized"
    (every built word is a prefix of a deeper one, so factors of level d
    cover the factors of all shallower levels)."""
    if depth is None:
        depth = levels.deepest
        while depth > 1 and len(levels.W(depth)) * 2 ** depth > 8 * 10 ** 6:
            depth -= 1
    if not (1 <= n <= 2 ** (depth - 1)):
        raise ValueError("need 1 <= n <= 2^(depth-1)")

    def count(d):
        seen = set()
        for w in levels.W(d):
            for i in range(len(w) - n + 1):
                seen.add(w[i:i + n])
        return len(seen)

    deep, shallow = count(depth), count(depth - 1)
    assert deep >= shallow
    return {"n": n, "count": deep, "depth": depth,
            "label": "stabilized" if deep == shallow else "lower bound"}


def verify_sandwich(levels, k_max=None):
    """Dyadic-scale reflection of f <= p <= n f: for each k,
    f(2^k) <= |W(k+1)| and |W(k)| <= p_built(2^k) <= 2^k |W(k+1)|."""
    f = levels.params.f
    K = levels.deepest
    if k_max is None:
        k_max = K - 1
    k_max = min(k_max, K - 1)
    report = {}
    for k in range(0, k_max + 1):
        sizes = {"W_k": len(levels.W(k)), "W_k1": len(levels.W(k + 1))}
        lower = f(2 ** k) <= sizes["W_k1"]
        try:
            p = language_complexity(levels, 2 ** k)["count"]
        except ValueError:
            p = None
        mid = p is None or sizes["W_k"] <= p
        upper = p is None or p <= 2 ** k * sizes["W_k1"]
        report[k] = {"f_2k": f(2 ** k), "p_built": p, **sizes,
                     "lower_ok": bool(lower), "count_ok": bool(mid and upper)}
        assert lower and mid and upper, "sandwich fails at k=%d" % k
    return report


def verify_frequency_deviation(levels, u, n):
    """Every length-2^n window of every W(n+3) word stays within the bound
    assembled from the finite interval data:
        |phi_u(xi) - mid| < min_t (err_t + 2^{t+1}/N) + (2n+1) d / N
    where N = 2^n, mid = midpoint of the deepest I_k, and err_t bounds
    |phi_u(z) - mid| over W(k) for k in [t, deepest]."""
    if n + 3 > levels.deepest:
        raise ValueError("need level n+3 = %d built" % (n + 3))
    d = len(u)
    N = 2 ** n
    if d > N:
        raise ValueError("|u| must be <= 2^n")
    rows = interval_rows(levels, u)
    a = {r[0]: r[1] for r in rows}
    b = {r[0]: r[2] for r in rows}
    deepest = rows[-1][0]
    mid = (a[deepest] + b[deepest]) / 2
    best = None
    for t in [r[0] for r in rows if r[0] <= n]:
        err_t = max(max(mid - a[k], b[k] - mid) for k in a if k >= t)
        cand = err_t + Fraction(2 ** (t + 1), N)
        if best is None or cand < best[0]:
            best = (cand, t)
    bound = best[0] + Fraction((2 * n + 1) * d, N)

    # exact min/max of Phi_u over all windows, vectorized per word
    pat = np.frombuffer(u.encode("latin1"), dtype=np.uint8)
    lo_phi, hi_phi = None, None
    for w in levels.W(n + 3):
        arr = np.frombuffer(w.encode("latin1"), dtype=np.uint8)
        hits = np.ones(len(arr) - d + 1, dtype=bool)
        for j in range(d):
            hits &= arr[j:len(arr) - d + 1 + j] == pat[j]
        cs = np.concatenate(([0], np.cumsum(hits)))
        # occurrences fully inside [i, i+N): starts in [i, i+N-d]
        counts = cs[N - d + 1:len(arr) - d + 2] - cs[:len(arr) - N + 1]
        lo = int(counts.min())
        hi = int(counts.max())
        lo_phi = lo if lo_phi is None else min(lo_phi, lo)
        hi_phi = hi if hi_phi is None else max(hi_phi, hi)
    max_dev = max(abs(Fraction(lo_phi, N) - mid), abs(Fraction(hi_phi, N) - mid))
    ok = max_dev < bound
    return {"u": u, "n": n, "N": N, "mid": str(mid), "t_star": best[1],
            "bound": str(bound), "max_deviation": str(max_dev),
            "pass": bool(ok)}
