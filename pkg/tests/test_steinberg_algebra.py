import random
from fractions import Fraction

import pytest

from wordlab.steinberg_algebra import (
    AlgebraElement,
    GroupoidPoint,
    SubstLanguage,
    XkLanguage,
    canonicalize,
    convolve,
    evaluate_at,
    make_generators,
    naive_convolution_value,
    ret_bracket_report,
    vanishes_on_sample,
    verify_unit_decomposition,
    w_basis_dimension,
    witness_product,
    zero,
)
from wordlab.substitution_word import SubstParams, build_substitution_levels


@pytest.fixture(scope="module")
def lang():
    return SubstLanguage(build_substitution_levels(SubstParams(gamma=2)))


@pytest.fixture(scope="module")
def gens(lang):
    return make_generators(lang)


def rand_elem(lang, rng, host, char=None):
    t = {}
    for _ in range(rng.randint(1, 3)):
        d = rng.randint(-2, 2)
        lo = rng.randint(-2, 0)
        L = rng.randint(0, 2)
        i = rng.randrange(len(host) - 3)
        key = (d, lo, host[i:i + L]) if L else (d, 0, "")
        t[key] = rng.randint(-3, 3)
    return AlgebraElement(lang, t, char)


def test_generator_identities(lang, gens):
    one, T, Tinv, proj = gens["one"], gens["T"], gens["Tinv"], gens["proj"]
    assert convolve(T, Tinv) == one
    assert convolve(Tinv, T) == one
    assert proj["a"] + proj["b"] == one
    for g in (one, T, Tinv, proj["a"], proj["b"]):
        assert g.homogeneous_degree() is not None


def test_proj_shift_identities(lang, gens):
    T, Tinv, proj = gens["T"], gens["Tinv"], gens["proj"]
    # 1_s * 1_T^{*d} = 1_{{d} x {x[d]=s}}
    got = convolve(proj["a"], T)
    assert got.terms == {(1, 1, "a"): Fraction(1)}
    # T^{*(-d)} * 1_s * T^{*d} = 1_{{0} x {x[d]=s}}
    d = 3
    Td = convolve(convolve(T, T), T)
    Tmd = convolve(convolve(Tinv, Tinv), Tinv)
    got = convolve(convolve(Tmd, proj["b"]), Td)
    assert got.terms == {(0, 3, "b"): Fraction(1)}


def test_canonicalize_rules(lang, gens):
    one = gens["one"]
    e = AlgebraElement(lang, {(0, 0, "a"): 1, (0, 0, "b"): 1})
    assert canonicalize(e) == one
    assert canonicalize(AlgebraElement(lang, {(0, 0, "bbbb"): 7})).is_zero()
    assert canonicalize(one + zero(lang)) == one
    # idempotent and commutes with scalars
    rng = random.Random(1)
    host = lang.levels.AB(3)
    for _ in range(50):
        f = rand_elem(lang, rng, host)
        c1 = canonicalize(f)
        assert canonicalize(c1).terms == c1.terms
        assert canonicalize(3 * f).terms == (3 * c1).terms


def test_evaluate(lang, gens):
    one, T = gens["one"], gens["T"]
    assert evaluate_at(one, GroupoidPoint(0, -2, "aabaa")) == 1
    assert evaluate_at(T, GroupoidPoint(1, 0, "ab")) == 1
    assert evaluate_at(T, GroupoidPoint(0, 0, "ab")) == 0
    e = AlgebraElement(lang, {(0, -3, "aab"): 2})
    with pytest.raises(ValueError):
        evaluate_at(e, GroupoidPoint(0, 0, "ab"))


def test_convolution_against_naive(lang):
    rng = random.Random(0)
    host = lang.levels.AB(3)
    for _ in range(300):
        f, g = rand_elem(lang, rng, host), rand_elem(lang, rng, host)
        i = rng.randrange(len(host) - 30)
        pt = GroupoidPoint(rng.randint(-4, 4), -12, host[i:i + 25])
        assert evaluate_at(convolve(f, g, canonical=False), pt) \
            == naive_convolution_value(f, g, pt)


def test_associativity_and_units(lang, gens):
    one = gens["one"]
    rng = random.Random(7)
    host = lang.levels.AB(3)
    for _ in range(1000):
        a = rand_elem(lang, rng, host)
        b = rand_elem(lang, rng, host)
        c = rand_elem(lang, rng, host)
        left = convolve(convolve(a, b, canonical=False), c)
        right = convolve(a, convolve(b, c, canonical=False))
        assert left.terms == right.terms
    for _ in range(50):
        f = rand_elem(lang, rng, host)
        cf = canonicalize(f)
        assert convolve(one, f).terms == cf.terms
        assert convolve(f, one).terms == cf.terms


def test_degree_additivity(lang):
    rng = random.Random(3)
    host = lang.levels.AB(3)
    for _ in range(200):
        p, q = rng.randint(-3, 3), rng.randint(-3, 3)
        i, j = rng.randrange(100), rng.randrange(100)
        f = AlgebraElement(lang, {(p, rng.randint(-2, 0), host[i:i + 2]): 1})
        g = AlgebraElement(lang, {(q, rng.randint(-2, 0), host[j:j + 2]): 1})
        out = convolve(f, g, canonical=False)
        assert all(d == p + q for d, _, _ in out.terms)


def test_prime_field(lang):
    gens5 = make_generators(lang, char=5)
    one, proj = gens5["one"], gens5["proj"]
    assert (proj["a"] + proj["b"]) == one
    f = 5 * proj["a"]
    assert f.is_zero()
    assert convolve(gens5["T"], gens5["Tinv"]) == one


def test_w_basis_dimension(lang):
    assert w_basis_dimension(lang, 0)["dim"] == 2
    r = w_basis_dimension(lang, 1)
    assert r["dim"] == 3 * lang.complexity(3)
    assert r["ratio_2N_over_N"] > 1
    with pytest.raises(ValueError):
        w_basis_dimension(lang, -1)


def test_xk_language_adapter():
    from wordlab.xk_words import XkOracle, XkParams
    xl = XkLanguage(XkOracle(XkParams(r=2, max_level=5)))
    gens = make_generators(xl)
    s = zero(xl)
    for p in gens["proj"].values():
        s = s + p
    assert canonicalize(s) == gens["one"]
    assert w_basis_dimension(xl, 1)["dim"] == 3 * xl.complexity(3)


def test_witness_product(lang, gens):
    proj = gens["proj"]
    rep = witness_product(proj["a"], l=1)
    assert rep["pass"] and rep["sum_alpha"] == "1"
    rep = witness_product(proj["a"] - proj["b"], l=1)
    assert rep["pass"] and rep["sum_alpha"] in ("1", "-1")
    f = AlgebraElement(lang, {(1, -1, "aba"): Fraction(2, 3),
                              (0, 0, "ab"): 1})
    rep = witness_product(f, l=1)
    assert rep["pass"] and rep["n"] == 1
    with pytest.raises(ValueError):
        witness_product(zero(lang))


def test_unit_decomposition_l0(lang):
    rep = verify_unit_decomposition(lang, 0)
    assert rep["pass"]
    assert rep["max_left_degree"] <= rep["left_bound_12N"]
    assert rep["max_right_degree"] <= rep["right_bound_9N"]
    assert rep["terms"] == lang.complexity(7 * lang.levels.N[1])


def test_ret_bracket(lang):
    rep = ret_bracket_report(lang, 18)
    assert rep["rec"] >= 36
    assert rep["lower_Ret"] >= 9
    assert rep["type_star_vanish"]
    assert rep["upper"]["master_len_le_K_n_gamma"]


def test_vanishes_on_sample(lang):
    f = AlgebraElement(lang, {(0, 0, "aaa"): 1})
    assert vanishes_on_sample(f, 0, 0, "aab")
    assert not vanishes_on_sample(f, 0, 0, "aa")   # no conflict on overlap
