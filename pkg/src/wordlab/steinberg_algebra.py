# Exact arithmetic in the convolution algebra of the subshift groupoid
# (underlying set Z x X, X the subshift of a uniformly recurrent word w):
#
#   basis rule   1_{{p} x A} * 1_{{q} x B} = 1_{{p+q} x (B cap T^{-q}(A))}
#   generators   1_T = 1_{{1} x X},  1_T^{-1} = 1_{{-1} x X},
#                1_s = 1_{{0} x {x : x[0] = s}}
#   identities   1_T * 1_T^{-1} = 1,   sum_s 1_s = 1,
#                1_s * 1_T^{*d} = 1_{{d} x {x : x[d] = s}}
#   filtration   W_N = span of 1_{{d} x (full pattern on [-N,N])}, |d| <= N,
#                dim W_N = (2N+1) p_w(2N+1),  W_N <= V^{8N},  V^N <= W_N
#
# Elements are finite sums of terms (degree d, window_lo, pattern) -> coeff,
# where the pattern is a full assignment on the contiguous window and the
# empty pattern stands for the whole space X.  Membership of patterns in the
# language is delegated to a LanguageOracle (duck-typed: alphabet, contains,
# complexity), so the same algebra works over any of the words built here.

import random
from dataclasses import dataclass
from fractions import Fraction

from .substitution_word import integer_root, recurrence_function, subst_factor_set
from .words_core import min_period


class SubstLanguage:
    """Language oracle over {a, b} backed by substitution levels."""

    def __init__(self, levels):
        self.levels = levels
        self.alphabet = "ab"
        self._memo = {}

    def contains(self, u):
        v = self._memo.get(u)
        if v is None:
            v = self.levels.contains(u)
            self._memo[u] = v
        return v

    def complexity(self, n):
        return self.levels.complexity(n)


class XkLanguage:
    """Language oracle over {0, 1, 2} backed by an X_k oracle."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.alphabet = "012"
        self._memo = {}

    def contains(self, u):
        v = self._memo.get(u)
        if v is None:
            v = self.oracle.contains(u)
            self._memo[u] = v
        return v

    def complexity(self, n):
        return self.oracle.complexity(n)


def _completions(lang, lo, hi, fixed):
    """All language words on [lo, hi] consistent with the fixed positions."""
    if all(p in fixed for p in range(lo, hi + 1)):
        word = "".join(fixed[p] for p in range(lo, hi + 1))
        return [word] if lang.contains(word) else []
    out = [""]
    for pos in range(lo, hi + 1):
        want = fixed.get(pos)
        nxt = []
        for prefix in out:
            for ch in ((want,) if want else lang.alphabet):
                cand = prefix + ch
                if lang.contains(cand):
                    nxt.append(cand)
        out = nxt
        if not out:
            break
    return out


@dataclass(frozen=True)
class GroupoidPoint:
    degree: int
    lo: int
    word: str                     # sample on [lo, lo+len-1], stands for any
                                  # point of X extending it


class AlgebraElement:
    """Finite k-linear combination of basis characteristic functions.

    terms: dict (degree, window_lo, pattern) -> nonzero coefficient;
    pattern "" (with window_lo 0) is the full space X.  Coefficients are
    exact rationals by default, or integers mod a prime when char is set.
    """

    __slots__ = ("lang", "char", "terms")

    def __init__(self, lang, terms=None, char=None):
        self.lang = lang
        self.char = char
        self.terms = {}
        for key, c in (terms or {}).items():
            c = self._c(c)
            if c:
                self.terms[key] = c

    def _c(self, x):
        return int(x) % self.char if self.char else Fraction(x)

    def is_zero(self):
        return not self.terms

    def degrees(self):
        return sorted({d for d, _, _ in self.terms})

    def homogeneous_degree(self):
        ds = self.degrees()
        return ds[0] if len(ds) == 1 else None

    def window_radius(self):
        """Smallest N with the element in W_N (degrees and windows)."""
        n = 0
        for d, lo, pat in self.terms:
            n = max(n, abs(d))
            if pat:
                n = max(n, abs(lo), abs(lo + len(pat) - 1))
        return n

    def __add__(self, other):
        assert self.lang is other.lang and self.char == other.char
        out = dict(self.terms)
        for key, c in other.terms.items():
            s = self._c(out.get(key, 0) + c)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return AlgebraElement(self.lang, out, self.char)

    def __neg__(self):
        return AlgebraElement(self.lang,
                              {k: -c for k, c in self.terms.items()}, self.char)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, scalar):
        return AlgebraElement(self.lang,
                              {k: self._c(scalar) * c
                               for k, c in self.terms.items()}, self.char)

    def __mul__(self, other):
        return convolve(self, other)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (self.char == other.char
                and canonicalize(self).terms == canonicalize(other).terms)

    def __repr__(self):
        body = " + ".join("%s*1_(%d,[%d..],%r)" % (c, d, lo, pat)
                          for (d, lo, pat), c in sorted(self.terms.items()))
        return "<AlgebraElement %s>" % (body or "0")

    def to_json(self):
        pats = [k for k in self.terms if k[2]]
        window = ([min(k[1] for k in pats),
                   max(k[1] + len(k[2]) - 1 for k in pats)] if pats else [])
        terms = []
        for (d, lo, pat), c in sorted(self.terms.items()):
            num, den = ((int(c), 1) if self.char
                        else (c.numerator, c.denominator))
            terms.append({"d": d, "window_lo": lo, "pattern": pat,
                          "coeff_num": num, "coeff_den": den})
        return {"field": ("F%d" % self.char) if self.char else "Q",
                "window": window, "terms": terms}


def zero(lang, char=None):
    return AlgebraElement(lang, {}, char)


def make_generators(lang, char=None):
    """one, T, Tinv, and the letter projections proj[s]."""
    one = AlgebraElement(lang, {(0, 0, ""): 1}, char)
    T = AlgebraElement(lang, {(1, 0, ""): 1}, char)
    Tinv = AlgebraElement(lang, {(-1, 0, ""): 1}, char)
    proj = {s: AlgebraElement(lang, {(0, 0, s): 1}, char)
            for s in lang.alphabet}
    return {"one": one, "T": T, "Tinv": Tinv, "proj": proj}


def _term_mul(lang, t1, t2):
    """Basis rule for a single pair of terms -> list of result term keys."""
    d1, lo1, p1 = t1
    d2, lo2, p2 = t2
    d = d1 + d2
    fixed = {lo2 + i: ch for i, ch in enumerate(p2)}
    for i, ch in enumerate(p1):                # T^{-d2}(A): window shifts +d2
        pos = lo1 + d2 + i
        if fixed.get(pos, ch) != ch:
            return []                          # conflicting cylinder: empty
        fixed[pos] = ch
    if not fixed:
        return [(d, 0, "")]
    lo, hi = min(fixed), max(fixed)
    return [(d, lo, v) for v in _completions(lang, lo, hi, fixed)]


def convolve(f, g, canonical=True):
    """Bilinear extension of the basis rule; canonicalized by default."""
    assert f.lang is g.lang and f.char == g.char, "mixed algebras"
    out = {}
    for t1, c1 in f.terms.items():
        for t2, c2 in g.terms.items():
            c = f._c(c1 * c2)
            if not c:
                continue
            for key in _term_mul(f.lang, t1, t2):
                s = f._c(out.get(key, 0) + c)
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    res = AlgebraElement(f.lang, out, f.char)
    return canonicalize(res) if canonical else res


def convolve_many(factors, canonical=False):
    out = factors[0]
    for fct in factors[1:]:
        out = convolve(out, fct, canonical=False)
    return canonicalize(out) if canonical else out


def canonicalize(f):
    """Normal form: all patterns on one common window, merged, zero-free,
    then the window is trimmed greedily at both ends whenever every pattern
    group carries all language-consistent extensions with equal coefficients.
    Idempotent; equal elements get equal term maps."""
    lang, char = f.lang, f.char
    terms = {}
    for (d, lo, pat), c in f.terms.items():
        if pat and not lang.contains(pat):
            continue                           # not in the language: empty set
        key = (d, 0, "") if not pat else (d, lo, pat)
        s = f._c(terms.get(key, 0) + c)
        if s:
            terms[key] = s
        else:
            terms.pop(key, None)
    pats = [k for k in terms if k[2]]
    if not pats:
        return AlgebraElement(lang, terms, char)
    lo = min(k[1] for k in pats)
    hi = max(k[1] + len(k[2]) - 1 for k in pats)
    expanded = {}
    for (d, l, pat), c in terms.items():
        fixed = {l + i: ch for i, ch in enumerate(pat)}
        for v in _completions(lang, lo, hi, fixed):
            key = (d, lo, v)
            s = f._c(expanded.get(key, 0) + c)
            if s:
                expanded[key] = s
            else:
                expanded.pop(key, None)
    terms = expanded

    def try_trim(side):
        nonlocal terms, lo, hi
        if not terms or hi < lo:
            return False
        groups = {}
        for (d, l, v), c in terms.items():
            stem = v[:-1] if side == "right" else v[1:]
            groups.setdefault((d, stem), {})[v[-1] if side == "right" else v[0]] = c
        for (d, stem), by_letter in groups.items():
            exts = {ch for ch in lang.alphabet
                    if lang.contains(stem + ch if side == "right" else ch + stem)}
            if set(by_letter) != exts or len(set(by_letter.values())) != 1:
                return False
        new_lo = lo if side == "right" else lo + 1
        out = {}
        for (d, stem), by_letter in groups.items():
            key = (d, 0, "") if stem == "" else (d, new_lo, stem)
            out[key] = next(iter(by_letter.values()))
        terms = out
        lo = new_lo
        hi = hi - 1 if side == "right" else hi
        return True

    progress = True
    while progress and any(k[2] for k in terms):
        progress = try_trim("right") or try_trim("left")
    return AlgebraElement(lang, terms, char)


def evaluate_at(f, point):
    """Sum of coefficients of the terms matched by the sampled point."""
    s_lo, s_hi = point.lo, point.lo + len(point.word) - 1
    total = f._c(0)
    for (d, lo, pat), c in f.terms.items():
        if d != point.degree:
            continue
        if pat:
            if lo < s_lo or lo + len(pat) - 1 > s_hi:
                raise ValueError("insufficient sample: term window [%d, %d] "
                                 "not covered" % (lo, lo + len(pat) - 1))
            if any(point.word[lo + i - s_lo] != ch for i, ch in enumerate(pat)):
                continue
        total = f._c(total + c)
    return total


def vanishes_on_sample(f, degree, lo, word):
    """True when every degree-matching term conflicts with the sample on the
    overlap, so f vanishes at every point of X extending the sample."""
    s_hi = lo + len(word) - 1
    for (d, l, pat), _ in f.terms.items():
        if d != degree:
            continue
        conflict = False
        for i, ch in enumerate(pat):
            pos = l + i
            if lo <= pos <= s_hi and word[pos - lo] != ch:
                conflict = True
                break
        if not conflict:
            return False
    return True


def naive_convolution_value(f, g, point):
    """Definition-chasing (f*g)(point) = sum_{d2} f(., T^{d2} x) g(d2, x);
    brute-force oracle for evaluate_at(convolve(f, g), point)."""
    total = f._c(0)
    for d2 in g.degrees():
        fv = evaluate_at(f, GroupoidPoint(point.degree - d2,
                                          point.lo - d2, point.word))
        gv = evaluate_at(g, GroupoidPoint(d2, point.lo, point.word))
        total = f._c(total + fv * gv)
    return total


def w_basis_dimension(lang, N):
    """dim W_N = (2N+1) p_w(2N+1), with a doubling-ratio growth diagnostic."""
    if N < 0:
        raise ValueError("N must be >= 0")
    p = lang.complexity(2 * N + 1)
    dim = (2 * N + 1) * p
    out = {"N": N, "p_2N1": p, "dim": dim}
    if N >= 1:
        p2 = lang.complexity(4 * N + 1)
        out["dim_2N"] = (4 * N + 1) * p2
        out["ratio_2N_over_N"] = Fraction((4 * N + 1) * p2, dim)
    return out


# ---------------------------------------------------------------------------
# the two constructive proofs

def witness_product(f, l=None):
    """For 0 != f supported in W_n: find (k, xi) with f(k, xi) != 0, build
    W = {x : x[-n-p, n+q] = alpha_{l+1} beta_{l+1}} around an embedding of
    xi[-n, n], check the three conditions, and certify
        1_{{-k} x T^k(W)} * f * 1_{{0} x W} = (sum of matched coeffs) 1_{{0} x W}.
    Aperiodicity of the master word stands in for condition (iii)."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    lang = f.lang
    if not isinstance(lang, SubstLanguage):
        raise ValueError("witness_product needs the substitution language")
    levels = lang.levels
    n = f.window_radius()
    if l is None:
        l = 0
        while levels.Nt[l + 1] < 2 * n + 1:
            l += 1
            if l + 1 > levels.K:
                raise ValueError("depth: no built level with Ntilde >= %d"
                                 % (2 * n + 1))
    if 2 * n + 1 > levels.Nt[l + 1]:
        raise ValueError("depth: 2n+1 = %d exceeds Ntilde_%d" % (2 * n + 1, l + 1))

    # locate a nonzero value of f: a degree and a language completion of the
    # pattern hull at which the matching coefficients do not cancel
    pats = [k for k in f.terms if k[2]]
    hull_lo = min([k[1] for k in pats], default=0)
    hull_hi = max([k[1] + len(k[2]) - 1 for k in pats], default=-1)
    found = None
    for k in f.degrees():
        for v in (_completions(lang, hull_lo, hull_hi, {})
                  if hull_hi >= hull_lo else [""]):
            total = f._c(0)
            A = []
            for (d, lo, pat), c in f.terms.items():
                if d != k:
                    continue
                if all(v[lo + i - hull_lo] == ch for i, ch in enumerate(pat)):
                    total = f._c(total + c)
                    A.append((d, lo, pat))
            if total:
                found = (k, v, A, total)
                break
        if found:
            break
    assert found is not None, "nonzero element with no nonzero value"
    k, v, A, total = found

    # extend the sample to [-n, n] and embed it in the master word
    fixed = {} if hull_hi < hull_lo else {hull_lo + i: ch
                                          for i, ch in enumerate(v)}
    xi_win = _completions(lang, -n, n, fixed)[0]
    AB = levels.AB(l + 1)
    host = "AB"
    pos = AB.find(xi_win)
    if pos < 0:
        AB = levels.BA(l + 1)
        host = "BA"
        pos = AB.find(xi_win)
    assert pos >= 0, "xi[-n, n] does not factor the level-%d masters" % (l + 1)
    p, q = pos, len(AB) - (2 * n + 1) - pos
    w_lo = -n - p
    W_term = (0, w_lo, AB)

    # (i) every matched term contains W; (ii) unmatched terms are excluded
    for (d, lo, pat) in A:
        assert d == k
        for i, ch in enumerate(pat):
            assert AB[lo + i - w_lo] == ch, "condition (i) fails"
    cond2 = True
    for (d, lo, pat) in f.terms:
        if (d, lo, pat) in A:
            continue
        if d != k:
            continue
        clash = any(AB[lo + i - w_lo] != ch for i, ch in enumerate(pat))
        cond2 = cond2 and clash
    assert cond2, "condition (ii) fails"
    # (iii) W cap T^d(W) = empty for 0 < |d| <= 2n via aperiodicity
    if n >= 1:
        assert min_period(AB, 2 * n) is None, "condition (iii) fails"

    left = AlgebraElement(lang, {(-k, w_lo - k, AB): 1}, f.char)
    right = AlgebraElement(lang, {W_term: 1}, f.char)
    lhs = convolve(convolve(left, f, canonical=False), right, canonical=False)
    rhs = total * AlgebraElement(lang, {W_term: 1}, f.char)
    ok = canonicalize(lhs).terms == canonicalize(rhs).terms
    assert ok, "witness product does not collapse to (sum alpha_i) 1_W"
    num = total if f.char else str(total)
    return {"k": k, "n": n, "l": l, "host": host, "p": p, "q": q,
            "matched_terms": len(A), "sum_alpha": num,
            "W_in_filtration": 2 * levels.N[l + 1],
            "left_in_filtration": 2 * levels.N[l + 1] + n,
            "pass": bool(ok)}


def verify_unit_decomposition(lang, l):
    """1 = sum over u in L_w(7 N_{l+1}) of 1_{{0} x I_u}, each summand being
    the displayed six-factor chain through 1_{{0} x W}; audits the maximum
    left/right filtration degrees against 12 N_{l+1} and 9 N_{l+1}."""
    if not isinstance(lang, SubstLanguage):
        raise ValueError("verify_unit_decomposition needs the substitution "
                         "language")
    levels = lang.levels
    if l + 1 > levels.K:
        raise ValueError("depth: level %d not built" % (l + 1))
    N = levels.N[l + 1]
    AB = levels.AB(l + 1)
    n = (levels.Nt[l + 1] - 1) // 2
    # the standalone embedding: xi = the prefix of AB, so p = 0
    p = 0
    q = 2 * N - (2 * n + 1)
    w_lo = -n
    words = sorted(subst_factor_set(levels, 7 * N).members)
    one = AlgebraElement(lang, {(0, 0, ""): 1})
    total = zero(lang)
    max_left = max_right = 0
    for u in words:
        e_u = u.find(AB)
        if e_u < 0:
            raise AssertionError("length-%d factor without the masters: %r"
                                 % (7 * N, u[:40]))
        t_u = 7 * N - e_u - 2 * N
        assert e_u + t_u == 5 * N
        eta, theta = u[:e_u], u[e_u + 2 * N:]
        chain = []
        if eta:
            chain.append(AlgebraElement(lang, {(0, 0, eta): 1}))
        chain.append(AlgebraElement(lang, {(-(n + p + e_u), 0, ""): 1}))
        chain.append(AlgebraElement(lang, {(0, w_lo, AB): 1}))
        chain.append(AlgebraElement(lang, {(-(n + q + 1), 0, ""): 1}))
        if theta:
            chain.append(AlgebraElement(lang, {(0, 0, theta): 1}))
        chain.append(AlgebraElement(lang, {(e_u + 2 * N, 0, ""): 1}))
        prod = convolve_many(chain, canonical=False)
        expect = {(0, 0, u): prod._c(1)}
        assert prod.terms == expect, "chain does not reproduce I_u"
        total = total + prod
        max_left = max(max_left, n + p + 2 * e_u)
        max_right = max(max_right, (n + q + 1) + t_u + e_u + 2 * N)
    assert max_left <= 12 * N and max_right <= 9 * N
    total = canonicalize(total)
    ok = total.terms == one.terms
    assert ok, "sum of I_u terms does not canonicalize to 1"
    c_measured = max(-(-max_left // N), -(-max_right // N))
    return {"l": l, "N_l1": N, "terms": len(words), "n": n, "p": p, "q": q,
            "max_left_degree": max_left, "left_bound_12N": 12 * N,
            "max_right_degree": max_right, "right_bound_9N": 9 * N,
            "c_measured": c_measured, "pass": bool(ok)}


def _ceil_K(gamma, n):
    """Least integer K with K n^gamma >= 4 * 2^gamma (2n+1)^gamma."""
    g = Fraction(gamma)
    pg, qg = g.numerator, g.denominator
    lhs_base = n ** pg
    rhs = 4 ** qg * 2 ** pg * (2 * n + 1) ** pg
    K = 1
    while K ** qg * lhs_base < rhs:
        K += 1
    return K


def _ceil_power(K, n, gamma):
    """ceil(K * n^gamma) for rational gamma >= 1."""
    g = Fraction(gamma)
    pg, qg = g.numerator, g.denominator
    val = K ** qg * n ** pg
    r = integer_root(val, qg)
    return r if r ** qg == val else r + 1


def ret_bracket_report(lang, n, l=None, seed=0):
    """Finite-scale bracket on the return function:
      lower: Ret_V(8n) >= ceil((Rec_w(n) - n) / 2), certified by the witness
             pair (u, v): u a length-n factor, v a factor of length Rec-1
             with no occurrence of u, and sampled type-(*) products vanishing
             on v;
      upper: the constructive machinery's degree budget 8 (c+3) ceil(K n^gamma)
             with c measured by the unit-decomposition audit and K from the
             master-length estimate."""
    if not isinstance(lang, SubstLanguage):
        raise ValueError("ret_bracket_report needs the substitution language")
    levels = lang.levels
    rec = recurrence_function(levels, n)
    R = rec["rec"]
    s = (R - 1 - n) // 2                      # v has length 2s + n (>= R - 2)
    lower = -(-(R - n) // 2)
    cert = rec["certificate"]
    report = {"n": n, "rec": R, "scale_8n": 8 * n, "lower_Ret": lower}
    if cert is not None and s >= n:
        host = (levels.AB(cert["host_level"]) if cert["host"] == "AB"
                else levels.BA(cert["host_level"]))
        v = host[cert["failing_window"]:cert["failing_window"] + R - 1]
        u = cert["missing_pattern"]
        assert u not in v and len(u) == n
        v = v[:2 * s + n]
        assert u not in v
        # sampled type-(*) products 1_{{d} x Z} * a * 1_{{d'} x Z'} vanish
        # at (0, x) for any x extending the sample v on [-s, s+n-1]
        a = AlgebraElement(lang, {(0, 0, u): 1})
        rng = random.Random(seed)
        vanish = True
        for _ in range(8):
            d1, d2 = rng.randint(-s, s), rng.randint(-s, s)
            i = rng.randrange(len(host) - (2 * s + 1))
            z = AlgebraElement(lang, {(d1, -s, host[i:i + 2 * s + 1]): 1})
            i = rng.randrange(len(host) - (2 * s + 1))
            z2 = AlgebraElement(lang, {(d2, -s, host[i:i + 2 * s + 1]): 1})
            prod = convolve(convolve(z, a, canonical=False), z2,
                            canonical=False)
            vanish = vanish and all(
                vanishes_on_sample(prod, d, -s, v) for d in prod.degrees())
        report["witness_u"] = u
        report["witness_v_len"] = len(v)
        report["type_star_vanish"] = bool(vanish)
        assert vanish
    gamma = levels.params.gamma
    if gamma is None:
        raise ValueError("ret_bracket_report needs gamma-driven levels")
    K = _ceil_K(gamma, n)
    if l is None:
        l = 0
        while levels.Nt[l + 1] < 2 * n + 1:
            l += 1
            if l + 1 > levels.K:
                raise ValueError("depth: no built level with Ntilde >= %d"
                                 % (2 * n + 1))
    c = 12                                    # proof constant; audit measures
    report["upper"] = {
        "gamma": str(Fraction(gamma)), "l": l, "K": K,
        "master_len_2N": 2 * levels.N[l + 1],
        "master_len_le_K_n_gamma": 2 * levels.N[l + 1] <= _ceil_power(K, n, gamma),
        "degree_budget_8_c3_Kn": 8 * (c + 3) * _ceil_power(K, n, gamma),
    }
    return report
