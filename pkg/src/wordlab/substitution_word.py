# The two-letter substitution family over {a,b}:
#
#   alpha_0 = a, beta_0 = b
#   alpha_{j+1} = (alpha_j^2 beta_j)^{n_{j+1}},  beta_{j+1} = (beta_j^2 alpha_j)^{n_{j+1}}
#   N_k = |alpha_k| = prod_j 3 n_j,   Ntilde_k = N_k - 3 N_{k-1} = 3(n_k - 1) N_{k-1}
#
# w is the limit of the alpha_k (each alpha_k is a prefix of alpha_{k+1}).
# Facts used as oracles here:
#   * every factor of w of length <= Ntilde_k is a window of alpha_k beta_k
#     or beta_k alpha_k, and conversely every such window is a factor
#   * every factor of length 7 N_k contains both alpha_k beta_k and
#     beta_k alpha_k, giving Rec_w(Ntilde_k) <= 7 N_k
#   * alpha_k beta_k and beta_k alpha_k have no period d <= Ntilde_k
#
# The exponent gamma >= 1 drives n_{j+1} = max{2, ceil(N_j^{gamma-1}/3)}.

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .words_core import (
    Fingerprinter,
    WindowCensus,
    WindowHasher,
    count_occurrences,
    factor_set,
    max_bytes_budget,
    min_period,
    occurrence_positions,
    sliding_containment_scan,
)


def integer_root(x, q):
    """floor(x^(1/q)) for non-negative integers, exact."""
    if x < 0 or q < 1:
        raise ValueError("bad root arguments")
    if x in (0, 1) or q == 1:
        return x
    r = int(round(x ** (1.0 / q)))
    r = max(r, 1)
    while r**q > x:
        r -= 1
    while (r + 1) ** q <= x:
        r += 1
    return r


def ceil_rational_power_over_3(N, expo):
    """max{2, ceil(N^expo / 3)} with expo a non-negative Fraction, exact.

    m = ceil(N^expo/3) is the least integer with (3m)^q >= N^p, expo = p/q.
    """
    expo = Fraction(expo)
    if expo < 0:
        raise ValueError("exponent must be >= 0")
    p, q = expo.numerator, expo.denominator
    target = N**p
    r = integer_root(target, q)
    x = r if r**q == target else r + 1     # x = ceil(N^expo)
    return max(2, (x + 2) // 3)


@dataclass
class SubstParams:
    gamma: Fraction = None
    n_list: list = None                    # explicit n_1, n_2, ... (all >= 2)
    max_bytes: int = None

    def __post_init__(self):
        if (self.gamma is None) == (self.n_list is None):
            raise ValueError("give exactly one of gamma or n_list")
        if self.gamma is not None:
            self.gamma = Fraction(self.gamma)
            if self.gamma < 1:
                raise ValueError("gamma must be >= 1")
        if self.n_list is not None and any(n < 2 for n in self.n_list):
            raise ValueError("all n_j must be >= 2")


def choose_n_sequence(params, J=None):
    """(n_j) for j = 1..J plus the j_1 report for N_j^gamma <= N_{j+1} <= 2 N_j^gamma.

    With gamma given: n_1 = 2, n_{j+1} = max{2, ceil(N_j^(gamma-1)/3)}.
    J defaults to the deepest level whose master words fit the byte budget.
    """
    budget = max_bytes_budget(params.max_bytes)
    ns = []
    Ns = [1]
    j = 0
    while True:
        if params.n_list is not None:
            if j >= len(params.n_list):
                break
            nxt = params.n_list[j]
        elif j == 0:
            nxt = 2
        else:
            nxt = ceil_rational_power_over_3(Ns[-1], params.gamma - 1)
        N_next = Ns[-1] * 3 * nxt
        if 2 * N_next > budget:
            if J is None:
                break
            raise ValueError("budget: level %d master words need %d bytes > %d"
                             % (j + 1, 2 * N_next, budget))
        ns.append(nxt)
        Ns.append(N_next)
        j += 1
        if J is not None and j >= J:
            break
    if not ns:
        raise ValueError("budget: cannot build even level 1")

    j1 = None
    if params.gamma is not None:
        p, q = params.gamma.numerator, params.gamma.denominator
        ok = [Ns[j] ** p <= Ns[j + 1] ** q <= (2**q) * Ns[j] ** p
              for j in range(1, len(Ns) - 1)]
        j1 = len(Ns) - 1
        for j in range(len(ok), 0, -1):
            if not ok[j - 1]:
                break
            j1 = j
    return ns, Ns[1:], j1


@dataclass
class SubstLevels:
    params: SubstParams
    n: list                      # n[j] for j = 1..K (index 0 unused)
    N: list                      # N[k] for k = 0..K, N[0] = 1
    Nt: list                     # Nt[k] = Ntilde_k for k = 1..K (index 0 is 0)
    alpha: list                  # alpha[k], k = 0..K
    beta: list
    K: int
    j1: int = None
    _census: dict = field(default_factory=dict, repr=False)

    def AB(self, k):
        return self.alpha[k] + self.beta[k]

    def BA(self, k):
        return self.beta[k] + self.alpha[k]

    def min_level_for(self, n):
        """Minimal k with n <= Ntilde_k; factors that long live in AB_k/BA_k."""
        for k in range(1, self.K + 1):
            if n <= self.Nt[k]:
                return k
        raise ValueError("depth: n=%d exceeds Ntilde_%d=%d; build deeper levels"
                         % (n, self.K, self.Nt[self.K]))

    def contains(self, u):
        """Is u a factor of w?"""
        if u == "":
            return True
        k = self.min_level_for(len(u))
        return u in self.AB(k) or u in self.BA(k)

    def census(self, k, need=None):
        """Window census of AB_k | BA_k (memoized, cap grown on demand)."""
        need = self.Nt[k] if need is None else min(need, self.Nt[k])
        cached = self._census.get(k)
        if cached is None or cached.cap < need:
            cap = self.Nt[k]
            if 2 * self.N[k] > 100_000:
                # large level: keep the sort depth close to what is asked for
                cap = min(cap, max(4096, 1 << (need - 1).bit_length()))
            host = self.AB(k) + "|" + self.BA(k)
            cached = WindowCensus(host, cap, separators="|")
            self._census[k] = cached
        return cached

    def complexity(self, n):
        """Exact p_w(n)."""
        if n == 0:
            return 1
        k = self.min_level_for(n)
        return self.census(k, need=n).count(n)


def build_substitution_levels(params, K=None):
    ns, Ns, j1 = choose_n_sequence(params, J=K)
    n = [0] + list(ns)
    K = len(ns)
    N = [1] + list(Ns)
    Nt = [0] + [N[k] - 3 * N[k - 1] for k in range(1, K + 1)]
    alpha = ["a"]
    beta = ["b"]
    for j in range(1, K + 1):
        a, b = alpha[-1], beta[-1]
        alpha.append((a + a + b) * n[j])
        beta.append((b + b + a) * n[j])
    levels = SubstLevels(params=params, n=n, N=N, Nt=Nt,
                         alpha=alpha, beta=beta, K=K, j1=j1)
    for k in range(K + 1):
        assert len(levels.alpha[k]) == N[k] == len(levels.beta[k])
        if k >= 1:
            assert Nt[k] == 3 * (n[k] - 1) * N[k - 1]
            assert N[k] <= 2 * Nt[k] <= 2 * N[k]
    return levels


def subst_factor_set(levels, n):
    """Exact L_w(n) from the minimal sufficient master words."""
    k = levels.min_level_for(n)
    return factor_set([levels.AB(k), levels.BA(k)], n)


def densities(levels, k):
    """Letter frequencies of alpha_k and beta_k; counted and closed-form."""
    if not (0 <= k <= levels.K):
        raise ValueError("level %d not built" % k)
    a_in_alpha = Fraction(count_occurrences("a", levels.alpha[k]), levels.N[k])
    a_in_beta = Fraction(count_occurrences("a", levels.beta[k]), levels.N[k])
    closed_alpha = Fraction(3**k + 1, 2 * 3**k)
    closed_beta = Fraction(3**k - 1, 2 * 3**k)
    assert a_in_alpha == closed_alpha, "phi_a(alpha_%d) != (1+3^-%d)/2" % (k, k)
    assert a_in_beta == closed_beta, "phi_a(beta_%d) != (1-3^-%d)/2" % (k, k)
    return {
        "phi_a_alpha": a_in_alpha,
        "phi_b_alpha": 1 - a_in_alpha,
        "phi_a_beta": a_in_beta,
        "phi_b_beta": 1 - a_in_beta,
    }


def beta_cubed_positions(levels, k):
    """1-indexed starts of beta_k^3 in alpha_{k+1}beta_{k+1}, with the window
    check N_{k+1} - 3N_k + 2 <= i <= N_{k+1}; mirrored alpha_k^3 check too."""
    if k + 1 > levels.K:
        raise ValueError("level %d not built" % (k + 1))
    lo = levels.N[k + 1] - 3 * levels.N[k] + 2
    hi = levels.N[k + 1]
    out = {}
    for name, cube, host in (
        ("beta_cubed_in_AB", levels.beta[k] * 3, levels.AB(k + 1)),
        ("alpha_cubed_in_BA", levels.alpha[k] * 3, levels.BA(k + 1)),
    ):
        pos = [i + 1 for i in occurrence_positions(cube, host)]
        for i in pos:
            assert lo <= i <= hi, "%s occurrence at %d outside [%d,%d]" % (name, i, lo, hi)
        out[name] = {"positions": pos, "window": (lo, hi)}
    return out


def _pattern_stats_find(host, patterns):
    """pattern -> minimal uniform window length for host, via direct scans."""
    res = sliding_containment_scan(host, len(host), sorted(patterns))
    return res.min_window_lengths


def _pattern_stats_hash(host, patterns, n):
    """Same as _pattern_stats_find but via vectorized window fingerprints."""
    wh = WindowHasher(host)
    h1, h2 = wh.window_raw(n)
    order = np.lexsort((h2, h1))       # stable: positions ascend within groups
    s1, s2 = h1[order], h2[order]
    newgrp = np.empty(len(order), dtype=bool)
    newgrp[0] = True
    newgrp[1:] = (np.diff(s1.view(np.int64)) != 0) | (np.diff(s2.view(np.int64)) != 0)
    starts = np.flatnonzero(newgrp)
    ends = np.append(starts[1:], len(order))
    pos = order.astype(np.int64)
    firsts = pos[starts]
    lasts = pos[ends - 1]
    gaps = np.zeros(len(pos), dtype=np.int64)
    gaps[1:] = np.diff(pos)
    gaps[starts] = 0
    maxgap = np.maximum.reduceat(gaps, starts)
    L = len(host)
    table = {}
    for i in range(len(starts)):
        mk = max(int(firsts[i]) + n, n + int(maxgap[i]) - 1, L - int(lasts[i]))
        table[(int(s1[starts[i]]), int(s2[starts[i]]))] = mk
    fp = Fingerprinter()
    out = {}
    for p in patterns:
        out[p] = table.get(fp.raw(p), L + 1)
    return out


def recurrence_function(levels, n, cross_check=None):
    """Exact Rec_w(n) with a failing-window certificate at Rec-1.

    Rec_w(n) is the least K such that every length-K factor of w contains
    every length-n factor.  Upper bound 7 N_k with k minimal such that
    n <= Ntilde_k; candidate lengths live inside the level-m master words
    where 7 N_k <= Ntilde_m.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    k = levels.min_level_for(n)
    upper = 7 * levels.N[k]
    try:
        m = levels.min_level_for(upper)
    except ValueError:
        raise ValueError("depth: recurrence at n=%d needs a level m with "
                         "Ntilde_m >= %d" % (n, upper))
    patterns = sorted(subst_factor_set(levels, n).members)
    hosts = [("AB", levels.AB(m)), ("BA", levels.BA(m))]
    rec = 0
    rec_host = None
    per_host = {}
    for name, host in hosts:
        if len(patterns) * len(host) <= 2 * 10**8:
            stats = _pattern_stats_find(host, patterns)
        else:
            stats = _pattern_stats_hash(host, patterns, n)
        per_host[name] = stats
        worst = max(stats.values())
        assert worst <= len(host), "a length-%d factor is missing from %s_%d" % (n, name, m)
        if worst > rec:
            rec = worst
            rec_host = (name, host)
    assert rec <= upper, "Rec_w(%d)=%d exceeds the 7 N_k bound %d" % (n, rec, upper)

    # monotone binary search over the containment predicate, as a guard
    if cross_check is None:
        cross_check = len(patterns) * len(hosts[0][1]) <= 2 * 10**7
    if cross_check:
        lo, hi = n, upper
        while lo < hi:
            mid = (lo + hi) // 2
            good = all(sliding_containment_scan(h, mid, patterns).ok for _, h in hosts)
            if good:
                hi = mid
            else:
                lo = mid + 1
        assert lo == rec, "binary search %d disagrees with closed form %d" % (lo, rec)

    certificate = None
    if rec - 1 >= n:
        res = sliding_containment_scan(rec_host[1], rec - 1, patterns)
        assert not res.ok
        certificate = {
            "host": rec_host[0],
            "host_level": m,
            "window_length": rec - 1,
            "failing_window": res.failing_window,
            "missing_pattern": res.missing_pattern,
        }
    return {"n": n, "rec": rec, "level": k, "host_level": m,
            "upper_bound_7Nk": upper, "certificate": certificate}


def verify_substitution_lemmas(levels, k_max, rec_samples=(), p_max=None):
    """Consolidated checks: the every-7N_k containment, aperiodicity,
    p(n) vs 14n, and recurrence bound/exponent diagnostics."""
    report = {"gamma": str(levels.params.gamma) if levels.params.gamma is not None else None}

    every7 = {}
    for k in range(0, k_max + 1):
        need = 7 * levels.N[k]
        m = levels.min_level_for(need)
        pats = [levels.AB(k), levels.BA(k)]
        ok = all(sliding_containment_scan(h, need, pats).ok
                 for h in (levels.AB(m), levels.BA(m)))
        every7[k] = ok
        assert ok, "a length-%d factor misses alpha_%d beta_%d or its mirror" % (need, k, k)
    report["every_7Nk_contains_both_masters"] = every7

    aper = {}
    for k in range(1, k_max + 1):
        pa = min_period(levels.AB(k), levels.Nt[k])
        pb = min_period(levels.BA(k), levels.Nt[k])
        aper[k] = (pa, pb)
        assert pa is None and pb is None, \
            "period <= Ntilde_%d found in a master word" % k
    report["aperiodic_up_to_Ntilde"] = aper

    if p_max is None:
        p_max = min(levels.Nt[min(k_max + 1, levels.K)], 2000)
    p_ok = True
    p_table = {}
    for n in range(1, p_max + 1):
        p = levels.complexity(n)
        p_table[n] = p
        if not (p >= n + 1):
            p_ok = False
        if n >= levels.Nt[1] and not (p <= 14 * n):
            p_ok = False
    assert p_ok, "complexity bounds n+1 <= p(n) <= 14n violated"
    report["p_bounds_ok"] = True
    report["p_max_checked"] = p_max

    gamma = levels.params.gamma
    recs = {}
    for n in rec_samples:
        r = recurrence_function(levels, n)
        entry = {"rec": r["rec"]}
        if gamma is not None:
            p, q = gamma.numerator, gamma.denominator
            # lower floor Rec_w(n) >= 3^-gamma n^gamma and upper 14 2^gamma n^gamma
            entry["lower_floor_ok"] = (r["rec"] ** q) * (3**p) >= n**p
            entry["upper_14_2g_ok"] = r["rec"] ** q <= (14**q) * (2**p) * (n**p)
            entry["exponent_diag"] = math.log(r["rec"]) / math.log(n) if n > 1 else None
            if gamma == 1:
                entry["exponent_note"] = "uninformative at gamma=1"
        recs[n] = entry
    report["recurrence_samples"] = recs
    return report
