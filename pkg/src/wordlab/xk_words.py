# The three-letter construction over Sigma = {0,1,2}:
#
#   n_k = 3^{k-1}, X_1 = {1,2}, X_2 = X_1 0 X_1
#   checkpoints k_1 = 2, k_{l+1} = (k_l - 1) 2^r + 1 for a fixed r >= 2
#   squaring phase (k_l < m <= k_l + r):
#       X_m = X_{m-1} 0^{n_{m-1}} X_{m-1}   (all pairs), s_m = s_{m-1}^2
#   chained phase (k_l + r < m <= k_{l+1}):
#       enumerate X_{m-1} = {a_1, ..., a_s} and set
#       X_m = { a_i 0^{n_{m-1}} a_{i+1 mod s} },  s_m = s_{m-1}
#
# w is a limit word whose factors of length <= 3^{d-1} are exactly the factors
# of the words of X_{d+1}.  Every X_k word starts and ends in {1,2}; every
# X_k word extends to X_{k'} words on both sides across 0-blocks.
#
# The derivative-spike checkpoint (r=2, l=1) certifies
#   t s^2 + p(81) <= p(162) <= 11 t s^2,   t = 27, s = 256,
# by explicit witness families, and exhibits m in [82,162] with p'(m) >= s^2/3.

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .words_core import (
    Fingerprinter,
    WindowCensus,
    WindowHasher,
    factor_set,
    max_bytes_budget,
)

# certified rational lower bound for alpha = log 4 / log 3: 3^29 < 4^23
_ALPHA_LO = (29, 23)
assert 3**29 < 4**23


@dataclass
class XkParams:
    r: int = 2
    max_level: int = 8
    memory_budget: int = None

    def __post_init__(self):
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if self.max_level < 2:
            raise ValueError("max_level must be >= 2")


@dataclass
class XkLevel:
    k: int
    n: int                       # n_k = 3^{k-1}
    s: int                       # |X_k|, exact
    phase: str                   # "base" | "squaring" | "chained"
    words: list = None           # sorted word list when explicit, else None

    @property
    def explicit(self):
        return self.words is not None


def checkpoints(r, up_to):
    """k_1, k_2, ... not exceeding up_to."""
    ks = [2]
    while True:
        nxt = (ks[-1] - 1) * 2**r + 1
        if nxt > up_to:
            break
        ks.append(nxt)
    return ks


def _phase(m, r):
    """Phase of level m >= 3."""
    ks = checkpoints(r, m)
    kl = max(k for k in ks if k < m)
    return "squaring" if m <= kl + r else "chained"


def build_xk_levels(params):
    """Levels 1..max_level; word lists explicit while they fit the budget."""
    budget = max_bytes_budget(params.memory_budget)
    levels = [None, XkLevel(k=1, n=1, s=2, phase="base", words=["1", "2"])]
    for m in range(2, params.max_level + 1):
        n_prev = levels[m - 1].n
        s_prev = levels[m - 1].s
        n_m = 3 * n_prev
        if m == 2:
            phase = "squaring"          # the defining step X_2 = X_1 0 X_1
        else:
            phase = _phase(m, params.r)
        s_m = s_prev * s_prev if phase == "squaring" else s_prev
        words = None
        parent = levels[m - 1]
        if parent.explicit and s_m * n_m <= budget:
            zeros = "0" * n_prev
            if phase == "squaring":
                words = sorted(a + zeros + b for a in parent.words for b in parent.words)
            else:
                enum = parent.words     # already sorted: lexicographic enumeration
                s = len(enum)
                words = sorted(enum[i] + zeros + enum[(i + 1) % s] for i in range(s))
            assert len(set(words)) == s_m, "level %d word count != s_%d" % (m, m)
        levels.append(XkLevel(k=m, n=n_m, s=s_m, phase=phase, words=words))
    return levels


class XkOracle:
    """Exact language oracle for the limit word w of the construction.

    Queries are answered from the deepest explicit level; lengths beyond
    n_E (E = deepest explicit level) are out of reach and raise.
    """

    def __init__(self, params=None):
        self.params = params or XkParams()
        self.levels = build_xk_levels(self.params)
        self.E = max(lv.k for lv in self.levels[1:] if lv.explicit)
        self._hosts = {}
        self._census = {}

    def level(self, k):
        if not (1 <= k <= len(self.levels) - 1):
            raise ValueError("level %d not built (max_level=%d)" % (k, len(self.levels) - 1))
        return self.levels[k]

    def min_sufficient_level(self, n):
        """Minimal d with n <= 3^{d-1}; factors of length n live in X_{d+1}."""
        d = 1
        while 3 ** (d - 1) < n:
            d += 1
        return d

    def search_host(self, d):
        """Concatenation w_1 0^{n_d} w_2 0^{n_d} ... w_s 0^{n_d} w_1 of X_d.

        Its length-n windows for n <= n_d are exactly the factors L_w(n):
        in-word windows, boundary windows (suffix)0^i / 0^i(prefix), and 0^n
        all occur, and nothing else can appear.
        """
        lv = self.level(d)
        if not lv.explicit:
            raise ValueError("budget: level %d is implicit; factor queries need "
                             "an explicit level" % d)
        if d not in self._hosts:
            zeros = "0" * lv.n
            self._hosts[d] = zeros.join(lv.words) + zeros + lv.words[0]
        return self._hosts[d]

    def _host_level_for(self, n):
        d = self.min_sufficient_level(n)
        if d > self.E:
            raise ValueError("budget: factors of length %d need level %d explicit "
                             "(deepest explicit is %d)" % (n, d, self.E))
        return d

    def census(self, cap, d=None):
        """Window census of the level-d search host (d defaults to minimal)."""
        if d is None:
            d = self._host_level_for(cap)
        if cap > self.level(d).n:
            raise ValueError("census cap %d exceeds n_%d" % (cap, d))
        key = (d, cap)
        if key not in self._census:
            self._census[key] = WindowCensus(self.search_host(d), cap)
        return self._census[key]

    def complexity(self, n):
        """Exact p_w(n)."""
        if n == 0:
            return 1
        d = self._host_level_for(n)
        # reuse any cached census of the same host that is deep enough
        for (dd, cap), c in self._census.items():
            if dd == d and cap >= n:
                return c.count(n)
        cap = min(self.level(d).n, max(64, 1 << (n - 1).bit_length()))
        return self.census(cap, d=d).count(n)

    def contains(self, u):
        if u == "":
            return True
        d = self._host_level_for(len(u))
        return u in self.search_host(d)


def xk_factor_set(oracle, n, mode="auto"):
    """Exact L_w(n) as a FactorSet."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = oracle._host_level_for(n)
    # use the smallest explicit host that already covers n (cheapest windows)
    return factor_set([oracle.search_host(d)], n, mode=mode)


def xk_complexity_table(oracle, n_lo, n_hi):
    """Exact p_w(n) for n in [n_lo, n_hi], derivative, and the growth bound
    p_w(n) <= 4 * 3^(alpha 2^r + 1) * n^(alpha 2^r + 1) certified via the
    rational lower bound alpha >= 29/23 (3^29 < 4^23)."""
    if not (1 <= n_lo <= n_hi):
        raise ValueError("bad range")
    d = oracle._host_level_for(n_hi)
    census = oracle.census(n_hi, d=d)
    p = {n: census.count(n) for n in range(n_lo, n_hi + 1)}
    dp = {n: p[n] - p[n - 1] for n in range(n_lo + 1, n_hi + 1)}
    r = oracle.params.r
    p_lo, q_lo = _ALPHA_LO
    twor = 2**r
    bound_ok = {}
    for n in range(n_lo, n_hi + 1):
        # p <= 4 * 3 * 4^{2^r} * n * n^{alpha 2^r}; with alpha >= p_lo/q_lo it is
        # enough that p^q_lo <= (12 * 4^{2^r} * n)^q_lo * n^{p_lo 2^r}
        rhs = (12 * 4**twor * n) ** q_lo * n ** (p_lo * twor)
        bound_ok[n] = p[n] ** q_lo <= rhs
    return {"p": p, "p_prime": dp, "bound_alpha_2r_ok": bound_ok}


def verify_xk_structure(oracle, k_max=None):
    """The structural facts, checked exhaustively on explicit levels:
    (1) every word starts and ends in {1,2};
    (2) each word of X_k extends to X_{k+1} words across 0^{n_k} on both sides;
    (3) prefixes/suffixes of length n_d of deeper-level words are X_d words
        (shorter prefixes follow by prefix closure)."""
    if k_max is None:
        k_max = oracle.E
    report = {"boundary_letters": {}, "extension": {}, "pushdown": {}}
    for k in range(1, min(k_max, oracle.E) + 1):
        lv = oracle.level(k)
        ok = all(wd[0] in "12" and wd[-1] in "12" for wd in lv.words)
        report["boundary_letters"][k] = ok
        assert ok, "level %d word with 0 at the boundary" % k
    for k in range(1, min(k_max, oracle.E - 1) + 1):
        lv, nxt = oracle.level(k), oracle.level(k + 1)
        zeros = "0" * lv.n
        prefixes = set(wd[:lv.n + lv.n] for wd in nxt.words)
        suffixes = set(wd[-(lv.n + lv.n):] for wd in nxt.words)
        ok = all((wd + zeros) in prefixes and (zeros + wd) in suffixes
                 for wd in lv.words)
        report["extension"][k] = ok
        assert ok, "extension fact fails at level %d" % k
    for k in range(2, min(k_max, oracle.E) + 1):
        lv = oracle.level(k)
        for d in range(1, k):
            nd = oracle.level(d).n
            dset = set(oracle.level(d).words)
            ok = all(wd[:nd] in dset and wd[-nd:] in dset for wd in lv.words)
            report["pushdown"].setdefault(k, {})[d] = ok
            assert ok, "pushdown fails: level %d prefixes at depth %d" % (k, d)
    return report


def spike_parameters(oracle, l):
    """(t, s, n, window) of the checkpoint l: t = n_{k_l+r}, s = s_{k_l+r},
    n = n_{k_{l+1}}, window = [n+1, n+3t]."""
    r = oracle.params.r
    ks = checkpoints(r, 10**9)
    if l < 1 or l + 1 > len(ks):
        raise ValueError("no checkpoint l=%d" % l)
    kl, kl1 = ks[l - 1], ks[l]
    t = 3 ** (kl + r - 1)
    n = 3 ** (kl1 - 1)
    # s_{k_l + r}: squaring squares s at each of the r steps after k_l,
    # and the chained phase keeps it constant up to k_{l+1}
    s = 2
    for m in range(2, kl + r + 1):
        phase = "squaring" if (m == 2 or _phase(m, r) == "squaring") else "chained"
        s = s * s if phase == "squaring" else s
    return t, s, n, (n + 1, n + 3 * t)


def verify_derivative_spike(oracle, l=1, epsilon=Fraction(1, 2), audit_seed=0):
    """The two-sided estimate at checkpoint l and the derivative spike.

    Certifies t s^2 + p(n) <= p(n+3t) <= 11 t s^2 (11 is the proof constant)
    by (a) an exact window census and (b) the two explicit witness families:
      A: one extension u_a a v_a (|u_a| = t, |v_a| = 2t) per factor a of
         length n, taken at its first interior occurrence in the search host
         (re-chosen to avoid the xi shape when a != 0^n);
      B: xi_{u,v,i} = 0^i u 0^n v 0^{t-i} for u, v in X_{k_l+r}, 0 <= i <= t.
    Their fingerprint sets are certified distinct (audited) and overlap in
    exactly one word.  Returns the report with the spike position m.
    """
    r = oracle.params.r
    t, s, n, (wlo, whi) = spike_parameters(oracle, l)
    ks = checkpoints(r, 10**9)
    d_host = ks[l] + 1                    # X_{k_{l+1}} feeds the host of depth k_{l+1}
    if d_host > oracle.E:
        raise ValueError("budget: checkpoint l=%d needs level %d explicit" % (l, d_host))
    assert oracle.level(d_host).n >= whi, "host level too shallow for the window"
    host = oracle.search_host(d_host)
    L = len(host)
    census = oracle.census(whi, d=d_host)

    p = {m: census.count(m) for m in range(n, whi + 1)}
    ts2 = t * s * s

    # --- family A ------------------------------------------------------
    sa, lcp, vlen = census.sa, census.lcp, census.vlen
    sa = np.asarray(sa, dtype=np.int64)
    bid = np.cumsum(np.asarray(lcp) < n)          # block id by shared n-prefix
    valid = np.asarray(vlen) >= n
    vbid = bid[valid]
    vpos = sa[valid]
    # representative: smallest margined position per block
    margin_ok = (vpos >= t) & (vpos <= L - (n + 2 * t))
    big = np.int64(L + 1)
    cand = np.where(margin_ok, vpos, big)
    starts = np.flatnonzero(np.concatenate(([True], np.diff(vbid) != 0)))
    reps = np.minimum.reduceat(cand, starts)
    assert len(reps) == p[n], "n-block count %d != p(n)=%d" % (len(reps), p[n])
    assert int(reps.max()) <= L, "a length-%d factor has no margined occurrence" % n
    wh = WindowHasher(host)
    ext_starts = reps - t
    h1, h2 = wh.window_raw(n + 3 * t, starts=ext_starts)
    fam_a_list = [(int(a) << 64) | int(b) for a, b in zip(h1.tolist(), h2.tolist())]
    fam_a = set(fam_a_list)
    assert len(fam_a) == p[n], "family A extensions are not injective"

    # --- family B ------------------------------------------------------
    fp = Fingerprinter()
    xk = oracle.level(ks[l - 1] + r)      # X_{k_l + r}
    assert xk.s == s and xk.n == t
    uraws = {u: fp.raw(u) for u in xk.words}
    zraw = [fp.raw("0" * i) for i in range(t + 1)]
    znraw = fp.raw("0" * n)
    fam_b = set()
    mids = {}
    for u in xk.words:
        mu = fp.combine(uraws[u], t, znraw)       # u 0^n
        mids[u] = mu
    for u in xk.words:
        for v in xk.words:
            core = fp.combine(mids[u], t + n, uraws[v])        # u 0^n v
            for i in range(t + 1):
                pre = fp.combine(zraw[i], i, core)             # 0^i u 0^n v
                full = fp.combine(pre, i + 2 * t + n, zraw[t - i])
                fam_b.add((full[0] << 64) | full[1])
    expect_b = (t + 1) * s * s
    assert len(fam_b) == expect_b, "family B is not injective"

    # audit: 1% of family B rebuilt as strings, fingerprints must match and
    # sampled members must be factors of w
    rng = random.Random(audit_seed)
    audit_n = max(1, expect_b // 100)
    zeros_n = "0" * n
    seen = {}
    factor_checks = 0
    for _ in range(audit_n):
        u = rng.choice(xk.words)
        v = rng.choice(xk.words)
        i = rng.randrange(t + 1)
        xi = "0" * i + u + zeros_n + v + "0" * (t - i)
        h = fp.fingerprint(xi)
        assert h in fam_b
        prev = seen.get(h)
        assert prev is None or prev == xi, "fingerprint collision in audit"
        seen[h] = xi
        if factor_checks < 64:
            assert xi in host, "xi is not a factor"
            factor_checks += 1

    # --- overlap -------------------------------------------------------
    # the extensions are ours to choose: whenever the extension of some
    # a != 0^n happens to take the xi shape, re-choose a later occurrence
    # whose extension leaves family B (one always exists: an occurrence
    # whose following 0-run is longer than n cannot look like any xi)
    p0 = host.find(zeros_n)
    ends = np.append(starts[1:], len(vbid))
    rechosen = 0
    for j, fpj in enumerate(fam_a_list):
        if fpj not in fam_b:
            continue
        if int(reps[j]) == p0:
            continue                      # the extension of 0^n stays
        block_pos = sorted(int(x) for x in vpos[starts[j]:ends[j]]
                           if t <= int(x) <= L - (n + 2 * t))
        new_fp = None
        for q in block_pos:
            ext = host[q - t:q + n + 2 * t]
            h = fp.fingerprint(ext)
            if h not in fam_b:
                new_fp = h
                break
        assert new_fp is not None, "no collision-free extension for block %d" % j
        fam_a.discard(fpj)
        fam_a.add(new_fp)
        fam_a_list[j] = new_fp
        rechosen += 1
    assert len(fam_a) == p[n], "family A injectivity lost after re-choosing"
    overlap = fam_a & fam_b
    assert len(overlap) == 1, "family overlap is not a singleton: %d" % len(overlap)
    # the overlap is the extension of 0^n: first occurrence sits right after
    # the first component of the first host word
    xi0 = host[p0 - t:p0 + n + 2 * t]
    assert fp.fingerprint(xi0) in overlap

    union = len(fam_a) + len(fam_b) - len(overlap)
    lower_ok = p[whi] >= ts2 + p[n]
    lower_fam_ok = union >= ts2 + p[n]
    upper_ok = p[whi] <= 11 * ts2
    assert p[whi] >= union, "census contradicts the witness families"
    assert lower_ok and lower_fam_ok and upper_ok

    # --- the spike -----------------------------------------------------
    best_m, best_dp = None, -1
    for m in range(wlo, whi + 1):
        dpm = p[m] - p[m - 1]
        if dpm > best_dp:
            best_m, best_dp = m, dpm
    assert 3 * best_dp >= s * s, "no m with p'(m) >= s^2/3 in the window"
    eps = Fraction(epsilon)
    pe, qe = eps.numerator, eps.denominator
    # p'(m) >= p(m) / m^epsilon  <=>  p'(m)^q m^p >= p(m)^q
    eps_ok = best_dp**qe * best_m**pe >= p[best_m] ** qe

    return {
        "r": r, "l": l, "t": t, "s": s,
        "window": [wlo, whi],
        "p_n": p[n], "p_n3t": p[whi], "ts2": ts2,
        "family_a": len(fam_a), "family_b": len(fam_b), "overlap": len(overlap),
        "lower_ok": bool(lower_ok), "lower_family_ok": bool(lower_fam_ok),
        "upper_11ts2_ok": bool(upper_ok), "upper_constant": "11 (proof constant)",
        "m": best_m, "p_m": p[best_m], "dp_m": best_dp,
        "spike_ok": bool(3 * best_dp >= s * s),
        "epsilon": str(eps), "lhs": best_dp, "rhs_note": "p(m)/m^epsilon",
        "epsilon_ok": bool(eps_ok),
        "audit_sample": audit_n, "extensions_rechosen": rechosen,
        "pass": bool(lower_ok and lower_fam_ok and upper_ok
                     and 3 * best_dp >= s * s and eps_ok),
    }
