import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wordlab.words_core import (
    Alphabet,
    Fingerprinter,
    WindowCensus,
    WindowHasher,
    count_occurrences,
    factor_set,
    frequency,
    min_period,
    naive_containment,
    occurrence_positions,
    sliding_containment_scan,
)

words01 = st.text(alphabet="01", min_size=0, max_size=40)


def test_count_occurrences_overlapping():
    assert count_occurrences("aa", "aaaa") == 3
    assert count_occurrences("aba", "ababa") == 2
    assert count_occurrences("b", "aaa") == 0


def test_count_occurrences_empty_pattern_rejected():
    with pytest.raises(ValueError):
        count_occurrences("", "abc")


def test_frequency_exact_rational():
    # phi_u(w) = Phi_u(w)/|w|
    assert frequency("a", "aabaab") == Fraction(2, 3)
    assert frequency("aa", "aaaa") == Fraction(3, 4)
    assert frequency("b", "aaaa") == 0
    assert frequency("a", "aabaab" * 5) == Fraction(2, 3)
    with pytest.raises(ValueError):
        frequency("a", "")


def test_subadditivity_of_occurrence_counts():
    # Phi_u(w0) + Phi_u(w1) <= Phi_u(w0 w1) <= Phi_u(w0) + Phi_u(w1) + |u| - 1
    rng = random.Random(12345)
    for _ in range(10_000):
        u = "".join(rng.choice("ab") for _ in range(rng.randint(1, 5)))
        w0 = "".join(rng.choice("ab") for _ in range(rng.randint(0, 30)))
        w1 = "".join(rng.choice("ab") for _ in range(rng.randint(0, 30)))
        lo = count_occurrences(u, w0) + count_occurrences(u, w1) if u else 0
        mid = count_occurrences(u, w0 + w1)
        assert lo <= mid <= lo + len(u) - 1


@given(u=st.text(alphabet="01", min_size=1, max_size=6), w0=words01, w1=words01)
@settings(max_examples=300)
def test_subadditivity_property(u, w0, w1):
    lo = count_occurrences(u, w0) + count_occurrences(u, w1)
    mid = count_occurrences(u, w0 + w1)
    assert lo <= mid <= lo + len(u) - 1


def test_min_period():
    assert min_period("abab") == 2
    assert min_period("aaaa") == 1
    assert min_period("abcab") == 3
    assert min_period("abc", d_max=2) is None
    assert min_period("a") == 1


def test_alphabet():
    sigma = Alphabet("012")
    assert len(sigma) == 3 and "1" in sigma and sigma.index("2") == 2
    with pytest.raises(ValueError):
        sigma.validate("013")
    with pytest.raises(ValueError):
        Alphabet("aa")


def test_factor_set_exact():
    fs = factor_set("aabab", 2)
    assert not fs.fingerprint_mode
    assert fs.members == frozenset({"aa", "ab", "ba"})
    assert len(fs) == 3
    assert "ab" in fs and "bb" not in fs and "abc" not in fs


def test_factor_set_host_order_invariance():
    rng = random.Random(5)
    hosts = ["".join(rng.choice("01") for _ in range(rng.randint(3, 30))) for _ in range(8)]
    for n in (1, 2, 4):
        a = factor_set(hosts, n)
        b = factor_set(list(reversed(hosts)), n)
        assert a.members == b.members


def test_factor_set_fingerprint_mode_agrees_with_exact():
    rng = random.Random(9)
    host = "".join(rng.choice("012") for _ in range(4000))
    for n in (1, 3, 9):
        exact = factor_set(host, n, mode="exact")
        fp = factor_set(host, n, mode="fingerprint")
        assert fp.fingerprint_mode and fp.count == exact.count
        for w in list(exact.members)[:50]:
            assert w in fp
        assert fp.audit_sample_size > 0


def test_fingerprint_combine_matches_direct():
    fp = Fingerprinter()
    rng = random.Random(1)
    for _ in range(500):
        a = "".join(rng.choice("012ab") for _ in range(rng.randint(0, 25)))
        b = "".join(rng.choice("012ab") for _ in range(rng.randint(0, 25)))
        assert fp.combine(fp.raw(a), len(a), fp.raw(b)) == fp.raw(a + b)


def test_window_hasher_matches_python_fingerprints():
    fp = Fingerprinter()
    rng = random.Random(2)
    host = "".join(rng.choice("012") for _ in range(800))
    wh = WindowHasher(host)
    for n in (1, 2, 7, 80):
        packed = wh.window_packed(n)
        for i in range(0, len(host) - n + 1, 53):
            assert int(packed[i]) == fp.fingerprint(host[i:i + n])


def _brute_counts(host, cap, seps):
    out = {}
    for n in range(1, cap + 1):
        out[n] = len(set(host[i:i + n] for i in range(len(host) - n + 1)
                         if not any(s in host[i:i + n] for s in seps)))
    return out


def test_window_census_python_path():
    rng = random.Random(3)
    for _ in range(20):
        host = "".join(rng.choice("01|") for _ in range(rng.randint(1, 50)))
        cap = rng.randint(1, 15)
        c = WindowCensus(host, cap, separators="|")
        brute = _brute_counts(host, cap, "|")
        for n in range(1, cap + 1):
            assert c.count(n) == brute[n]


def test_window_census_numpy_path():
    rng = random.Random(4)
    host = "".join(rng.choice("012") for _ in range(250_000))
    c = WindowCensus(host, 24)
    for n in (1, 2, 3, 11, 24):
        assert c.count(n) == len(set(host[i:i + n] for i in range(len(host) - n + 1)))


def test_window_census_numpy_path_with_separator():
    rng = random.Random(6)
    host = "".join(rng.choice("01#") for _ in range(200_000))
    c = WindowCensus(host, 10, separators="#")
    brute = _brute_counts(host, 10, "#")
    for n in range(1, 11):
        assert c.count(n) == brute[n]


def test_sliding_containment_scan_vs_naive():
    rng = random.Random(8)
    for _ in range(200):
        host = "".join(rng.choice("01") for _ in range(rng.randint(3, 40)))
        K = rng.randint(1, len(host))
        pats = list(set("".join(rng.choice("01") for _ in range(rng.randint(1, K)))
                        for _ in range(3)))
        r = sliding_containment_scan(host, K, pats)
        ok, fail, pat = naive_containment(host, K, pats)
        assert r.ok == ok
        if not ok:
            assert (r.failing_window, r.missing_pattern) == (fail, pat)


def test_sliding_containment_min_lengths_are_minimal():
    rng = random.Random(11)
    for _ in range(100):
        host = "".join(rng.choice("01") for _ in range(rng.randint(5, 40)))
        p = "".join(rng.choice("01") for _ in range(rng.randint(1, 3)))
        if p not in host:
            continue
        r = sliding_containment_scan(host, len(host), [p])
        mk = r.min_window_lengths[p]
        assert naive_containment(host, mk, [p])[0]
        if mk > len(p) and mk - 1 >= len(p):
            assert not naive_containment(host, mk - 1, [p])[0]


def test_scan_input_validation():
    with pytest.raises(ValueError):
        sliding_containment_scan("abc", 5, ["a"])
    with pytest.raises(ValueError):
        sliding_containment_scan("abc", 2, ["abc"])
    with pytest.raises(ValueError):
        sliding_containment_scan("abc", 2, [""])


def test_occurrence_positions():
    assert occurrence_positions("aa", "aaaa") == [0, 1, 2]
    assert occurrence_positions("x", "aaaa") == []
