# Batch front-end: build the word families, run the analyzers and the
# lemma-verification suites, and emit deterministic CSV/JSON reports.
#
# Exit codes:
#   0  success, every verification in the run passed
#   1  at least one verification failed; the failing witness is serialized
#   2  usage or resource errors
#
# Determinism contract: identical invocations produce identical bytes.  All
# randomized choices flow through the single recorded seed, which appears in
# every report header.  CSV cells hold exact rationals as "num/den"; JSON
# reports carry a versioned schema tag.

import argparse
import json
import math
import os
import random
import sys
from fractions import Fraction

from .growth_functions import (
    GrowthTable,
    build_superlinear_witness,
    check_growth_properties,
    discrete_derivative,
    verify_witness,
)
from .words_core import max_bytes_budget

SCHEMA = "wordlab-report/1"
MIN_MAX_BYTES = 64 * 2**20


class UsageError(Exception):
    pass


class VerificationFailure(Exception):
    """Carries the failing witness for serialization."""

    def __init__(self, witness):
        super().__init__("verification failed")
        self.witness = witness


def _rat(x):
    """Exact "num/den" rendering; integers stay plain."""
    if isinstance(x, Fraction):
        return "%d/%d" % (x.numerator, x.denominator) if x.denominator != 1 \
            else str(x.numerator)
    return x


def _jsonable(x):
    if isinstance(x, Fraction):
        return _rat(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        seq = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(v) for v in seq]
    if isinstance(x, bytes):
        return x.decode("ascii", "replace")
    return x


def parse_range(text):
    """"LO..HI" or a single integer."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
    else:
        lo = hi = int(text)
    if lo > hi or lo < 1:
        raise UsageError("bad range %r" % text)
    return lo, hi


def load_config(path):
    """Plain-text key=value defaults; flags override."""
    out = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError("config line without '=': %r" % line)
                k, v = line.split("=", 1)
                out[k.strip().replace("-", "_")] = v.strip()
    except OSError as e:
        raise UsageError("cannot read config %s: %s" % (path, e))
    return out


def emit_report(payload, args, rows=None, columns=None, passed=True):
    """Serialize a run deterministically.

    JSON output is the full payload under a versioned header.  CSV output
    needs tabular rows; the header line records seed and command so that
    every report carries its provenance.
    """
    command = "%s %s" % (args.family, args.command)
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "command": command,
            "seed": args.seed,
            "pass": passed,
            "report": _jsonable(payload),
        }
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    else:
        if rows is None:
            raise UsageError("command %s has no CSV form; use --format json"
                             % command)
        lines = ["# schema=%s command=%s seed=%d pass=%s"
                 % (SCHEMA, command.replace(" ", ":"), args.seed, passed)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(str(_rat(c)) for c in row))
        text = "\n".join(lines) + "\n"
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as e:
            raise UsageError("unwritable output path %s: %s" % (args.output, e))
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- families

def _growth_table(args):
    return GrowthTable.from_name(args.g, args.n_max)


def run_growth(args):
    g = _growth_table(args)
    if args.command == "build":
        w = build_superlinear_witness(g)
        deriv, flag = discrete_derivative(w.f)
        rows = [(n, w.f.values[n], deriv.values[n], w.omega[n])
                for n in range(1, w.f.n_max + 1)]
        payload = {
            "g": args.g,
            "n_max": args.n_max,
            "d_sequence": w.d,
            "n0": w.n0,
            "superlinear_from": w.superlinear_from,
            "derivative_flag": flag,
            "table": rows if args.format == "json" else "see CSV",
        }
        emit_report(payload, args, rows=rows,
                    columns=["n", "f", "f_prime", "omega"])
        return True
    # check
    w = build_superlinear_witness(g)
    checks = verify_witness(w)
    props = check_growth_properties(w.f)
    del props["doubling_ratios"]          # diagnostic bulk, not a check
    # the construction promises monotonicity, the doubling square bound and
    # the telescoping bound; submultiplicativity of f is diagnostic only
    # (it genuinely fails at the marked jumps f(2 d_i) = i f(d_i))
    payload = {"witness_checks": checks, "f_properties": props}
    ok = props["nondecreasing"] and all(
        checks[k] for k in ("strictly_increasing", "doubling_square_bound",
                            "telescoping_bound", "f_below_g_from_n0"))
    emit_report(payload, args, passed=ok)
    if not ok:
        raise VerificationFailure(payload)
    return ok


def run_xk(args):
    from .xk_words import (
        XkOracle,
        XkParams,
        verify_derivative_spike,
        verify_xk_structure,
        xk_complexity_table,
    )
    oracle = XkOracle(XkParams(r=args.r, max_level=args.max_level,
                               memory_budget=args.max_bytes))
    if args.command == "build":
        rows = [(lv.k, lv.n, lv.s, lv.phase,
                 "explicit" if lv.explicit else "implicit")
                for lv in oracle.levels[1:]]
        emit_report({"r": args.r, "levels": rows}, args, rows=rows,
                    columns=["k", "n_k", "s_k", "phase", "storage"])
        return True
    if args.command == "complexity":
        lo, hi = parse_range(args.n)
        t = xk_complexity_table(oracle, lo, hi)
        rows = [(n, t["p"][n], t["p_prime"].get(n, ""),
                 t["bound_alpha_2r_ok"][n])
                for n in range(lo, hi + 1)]
        ok = all(t["bound_alpha_2r_ok"].values())
        emit_report({"range": [lo, hi], "table": rows}, args, rows=rows,
                    columns=["n", "p", "p_prime", "bound_ok"], passed=ok)
        if not ok:
            raise VerificationFailure({"bound_alpha_2r_ok":
                                       t["bound_alpha_2r_ok"]})
        return True
    if args.command == "verify-structure":
        rep = verify_xk_structure(oracle)
        ok = (all(rep["boundary_letters"].values())
              and all(rep["extension"].values())
              and all(all(d.values()) for d in rep["pushdown"].values()))
        emit_report(rep, args, passed=ok)
        if not ok:
            raise VerificationFailure(rep)
        return True
    # verify-spike
    rep = verify_derivative_spike(oracle, l=args.l,
                                  epsilon=Fraction(args.epsilon),
                                  audit_seed=args.seed)
    emit_report(rep, args, passed=rep["pass"])
    if not rep["pass"]:
        raise VerificationFailure(rep)
    return True


_ERGODIC_F = {
    "2^ceil-sqrt": lambda n: 2 ** (math.isqrt(n)
                                   + (0 if math.isqrt(n) ** 2 == n else 1)),
    "const-2": lambda n: 2,
}


def run_ergodic(args):
    from .ergodic_subshift import (
        ErgodicParams,
        build_ergodic_levels,
        decompose_factor,
        interval_rows,
        verify_interval_nesting,
    )
    if args.f not in _ERGODIC_F:
        raise UsageError("unknown f %r; choose from %s"
                         % (args.f, sorted(_ERGODIC_F)))
    table = GrowthTable.from_function(_ERGODIC_F[args.f],
                                      max(2 ** (args.max_level + 2), 16))
    params = ErgodicParams(f=table, max_level=args.max_level,
                           choice_policy=args.policy, seed=args.seed,
                           memory_budget=args.max_bytes)
    levels = build_ergodic_levels(params)
    if args.command == "build":
        rows = [(row["k"], row["c_k"], row["W_size"], row["queue_len"],
                 row["consumed_head"]) for row in levels.run_log]
        payload = {"f": args.f, "policy": args.policy,
                   "c": levels.cseq.c, "N": levels.cseq.N,
                   "ones": sorted(levels.cseq.ones), "log": rows}
        emit_report(payload, args, rows=rows,
                    columns=["k", "c_k", "W_size", "queue_len", "consumed"])
        return True
    if args.command == "intervals":
        rows = interval_rows(levels, args.u)
        rep = verify_interval_nesting(levels, args.u)
        emit_report({"u": args.u, "rows": rows, "nesting": rep}, args,
                    rows=rows, columns=["n", "a_n", "b_n", "delta_n"],
                    passed=rep["pass"])
        if not rep["pass"]:
            raise VerificationFailure(rep)
        return True
    # decompose
    d = decompose_factor(levels, args.word)
    rows = [(m, blk) for m, blk in d["blocks"]]
    emit_report({"word": args.word, "decomposition": d}, args,
                rows=rows, columns=["level", "block"])
    return True


def _subst_levels(args):
    from .substitution_word import SubstParams, build_substitution_levels
    if args.n_list:
        params = SubstParams(n_list=[int(x) for x in args.n_list.split(",")],
                             max_bytes=args.max_bytes)
    else:
        params = SubstParams(gamma=Fraction(args.gamma),
                             max_bytes=args.max_bytes)
    return build_substitution_levels(params, K=args.levels)


def run_subst(args):
    from .substitution_word import (
        beta_cubed_positions,
        densities,
        recurrence_function,
        verify_substitution_lemmas,
    )
    levels = _subst_levels(args)
    if args.command == "build":
        rows = [(k, levels.n[k] if k else "", levels.N[k], levels.Nt[k])
                for k in range(levels.K + 1)]
        emit_report({"gamma": args.gamma, "K": levels.K, "table": rows},
                    args, rows=rows, columns=["k", "n_k", "N_k", "Ntilde_k"])
        return True
    if args.command == "complexity":
        lo, hi = parse_range(args.n)
        rows, ok = [], True
        prev = None
        for n in range(lo, hi + 1):
            p = levels.complexity(n)
            good = p >= n + 1 and (n < levels.Nt[1] or p <= 14 * n)
            ok = ok and good
            rows.append((n, p, "" if prev is None else p - prev, good))
            prev = p
        emit_report({"range": [lo, hi], "table": rows}, args, rows=rows,
                    columns=["n", "p", "p_prime", "bounds_ok"], passed=ok)
        if not ok:
            raise VerificationFailure({"rows": rows})
        return True
    if args.command == "densities":
        rows = []
        for k in range(levels.K + 1):
            d = densities(levels, k)
            rows.append((k, d["phi_a_alpha"], d["phi_b_alpha"],
                         d["phi_a_beta"], d["phi_b_beta"]))
        emit_report({"table": rows}, args, rows=rows,
                    columns=["k", "phi_a_alpha", "phi_b_alpha",
                             "phi_a_beta", "phi_b_beta"])
        return True
    if args.command == "recurrence":
        rows = []
        for n in [int(x) for x in args.n.split(",")]:
            r = recurrence_function(levels, n)
            rows.append((n, r["rec"], r["upper_bound_7Nk"]))
        emit_report({"table": rows}, args, rows=rows,
                    columns=["n", "rec", "upper_7Nk"])
        return True
    # verify
    rec_samples = [int(x) for x in args.rec_samples.split(",")] \
        if args.rec_samples else []
    try:
        rep = verify_substitution_lemmas(levels, args.k_max,
                                         rec_samples=rec_samples,
                                         p_max=args.p_max)
        extra = {"beta_cubed": {k: beta_cubed_positions(levels, k)
                                for k in range(min(args.k_max, levels.K - 1)
                                               + 1)}}
    except AssertionError as e:
        raise VerificationFailure({"failed_assertion": str(e)})
    rep.update(extra)
    emit_report(rep, args)
    return True


def _algebra_language(args):
    from .steinberg_algebra import SubstLanguage
    return SubstLanguage(_subst_levels(args))


def run_algebra(args):
    from .steinberg_algebra import (
        AlgebraElement,
        convolve,
        make_generators,
        ret_bracket_report,
        verify_unit_decomposition,
        w_basis_dimension,
        witness_product,
        zero,
    )
    lang = _algebra_language(args)
    if args.command == "identities":
        gens = make_generators(lang)
        one, T, Tinv, proj = (gens["one"], gens["T"], gens["Tinv"],
                              gens["proj"])
        rep = {
            "T_Tinv_is_one": convolve(T, Tinv) == one
            and convolve(Tinv, T) == one,
            "projections_sum_to_one": sum(proj.values(), zero(lang)) == one,
        }
        d = 3
        Td = Tmd = one
        for _ in range(d):
            Td, Tmd = convolve(Td, T), convolve(Tmd, Tinv)
        s = sorted(lang.alphabet)[0]
        rep["conjugation_formula"] = (
            convolve(convolve(Tmd, proj[s]), Td).terms
            == {(0, d, s): Fraction(1)})
        rng = random.Random(args.seed)
        host = lang.levels.AB(min(3, lang.levels.K))

        def rand_elem():
            t = {}
            for _ in range(rng.randint(1, 3)):
                i = rng.randrange(len(host) - 3)
                L = rng.randint(0, 2)
                key = (rng.randint(-2, 2), rng.randint(-2, 0),
                       host[i:i + L]) if L else (rng.randint(-2, 2), 0, "")
                t[key] = rng.randint(-3, 3)
            return AlgebraElement(lang, t)

        assoc = True
        for _ in range(args.trials):
            a, b, c = rand_elem(), rand_elem(), rand_elem()
            lhs = convolve(convolve(a, b, canonical=False), c)
            rhs = convolve(a, convolve(b, c, canonical=False))
            assoc = assoc and lhs.terms == rhs.terms
        rep["associativity_random_triples"] = assoc
        grade = True
        for _ in range(args.trials):
            i, j = rng.randrange(len(host) - 2), rng.randrange(len(host) - 2)
            p, q = rng.randint(-3, 3), rng.randint(-3, 3)
            f = AlgebraElement(lang, {(p, 0, host[i:i + 2]): 1})
            g = AlgebraElement(lang, {(q, 0, host[j:j + 2]): 1})
            grade = grade and all(dd == p + q
                                  for dd, _, _ in convolve(f, g,
                                                           canonical=False
                                                           ).terms)
        rep["degree_additivity_random_pairs"] = grade
        rep["trials"] = args.trials
        ok = all(v for k, v in rep.items() if k != "trials")
        emit_report(rep, args, passed=ok)
        if not ok:
            raise VerificationFailure(rep)
        return True
    if args.command == "witness-product":
        gens = make_generators(lang)
        if args.random:
            rng = random.Random(args.seed)
            host = lang.levels.AB(min(3, lang.levels.K))
            reports = []
            for i in range(args.random):
                terms = {}
                while not terms:
                    for _ in range(rng.randint(1, 4)):
                        d = rng.randint(-3, 3)
                        L = rng.randint(1, 3)
                        lo = rng.randint(-3, 4 - L)
                        j = rng.randrange(len(host) - 4)
                        c = rng.randint(-3, 3)
                        if c:
                            terms[(d, lo, host[j:j + L])] = c
                rep = witness_product(AlgebraElement(lang, terms), l=args.l)
                reports.append(rep)
                if not rep["pass"]:
                    emit_report({"trial": i, "report": rep}, args,
                                passed=False)
                    raise VerificationFailure(rep)
            payload = {"trials": args.random,
                       "all_pass": True,
                       "sample": reports[0]}
            emit_report(payload, args)
            return True
        f = gens["proj"][args.proj]
        rep = witness_product(f, l=args.l)
        emit_report(rep, args, passed=rep["pass"])
        if not rep["pass"]:
            raise VerificationFailure(rep)
        return True
    if args.command == "decompose-identity":
        try:
            rep = verify_unit_decomposition(lang, args.l)
        except AssertionError as e:
            raise VerificationFailure({"failed_assertion": str(e)})
        emit_report(rep, args, passed=rep["pass"])
        if not rep["pass"]:
            raise VerificationFailure(rep)
        return True
    if args.command == "ret-bracket":
        rep = ret_bracket_report(lang, args.n, seed=args.seed)
        ok = rep["type_star_vanish"] and rep["upper"]["master_len_le_K_n_gamma"]
        emit_report(rep, args, passed=ok)
        if not ok:
            raise VerificationFailure(rep)
        return True
    # dims
    rows = []
    for N in range(args.N + 1):
        r = w_basis_dimension(lang, N)
        rows.append((N, r["dim"], r.get("ratio_2N_over_N", "")))
    emit_report({"table": rows}, args, rows=rows,
                columns=["N", "dim_W_N", "ratio_2N_over_N"])
    return True


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--output", default=None, help="file path; default stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--max-bytes", type=int, default=None,
                        help="resource budget; env WORDLAB_MAX_BYTES honored")
    common.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults")

    p = argparse.ArgumentParser(prog="wordlab")
    fam = p.add_subparsers(dest="family", required=True)

    g = fam.add_parser("growth")
    g.add_argument("--g", default="n^2", help="id | n^2 | nlogn")
    g.add_argument("--n-max", type=int, default=4096)
    gs = g.add_subparsers(dest="command", required=True)
    gs.add_parser("build", parents=[common])
    gs.add_parser("check", parents=[common])

    x = fam.add_parser("xk")
    x.add_argument("--r", type=int, default=2)
    x.add_argument("--max-level", type=int, default=5)
    xs = x.add_subparsers(dest="command", required=True)
    xs.add_parser("build", parents=[common])
    xc = xs.add_parser("complexity", parents=[common])
    xc.add_argument("--n", required=True, help="LO..HI")
    xs.add_parser("verify-structure", parents=[common])
    xv = xs.add_parser("verify-spike", parents=[common])
    xv.add_argument("--l", type=int, default=1)
    xv.add_argument("--epsilon", default="1/2")

    e = fam.add_parser("ergodic")
    e.add_argument("--f", default="2^ceil-sqrt")
    e.add_argument("--max-level", type=int, default=8)
    e.add_argument("--policy", default="lexicographic",
                   choices=("lexicographic", "seeded-random"))
    es = e.add_subparsers(dest="command", required=True)
    es.add_parser("build", parents=[common])
    ei = es.add_parser("intervals", parents=[common])
    ei.add_argument("--u", required=True)
    ed = es.add_parser("decompose", parents=[common])
    ed.add_argument("--word", required=True)

    s = fam.add_parser("subst")
    s.add_argument("--gamma", default="2")
    s.add_argument("--n-list", default=None, help="explicit n_1,n_2,...")
    s.add_argument("--levels", type=int, default=None)
    ss = s.add_subparsers(dest="command", required=True)
    ss.add_parser("build", parents=[common])
    sc = ss.add_parser("complexity", parents=[common])
    sc.add_argument("--n", required=True, help="LO..HI")
    ss.add_parser("densities", parents=[common])
    sr = ss.add_parser("recurrence", parents=[common])
    sr.add_argument("--n", required=True, help="comma-separated lengths")
    sv = ss.add_parser("verify", parents=[common])
    sv.add_argument("--k-max", type=int, default=2)
    sv.add_argument("--rec-samples", default="")
    sv.add_argument("--p-max", type=int, default=None)

    a = fam.add_parser("algebra")
    a.add_argument("--gamma", default="2")
    a.add_argument("--n-list", default=None)
    a.add_argument("--levels", type=int, default=None)
    as_ = a.add_subparsers(dest="command", required=True)
    ai = as_.add_parser("identities", parents=[common])
    ai.add_argument("--trials", type=int, default=1000)
    aw = as_.add_parser("witness-product", parents=[common])
    aw.add_argument("--l", type=int, default=None)
    aw.add_argument("--proj", default="a")
    aw.add_argument("--random", type=int, default=0,
                    help="verify this many seeded random elements of W_3")
    ad = as_.add_parser("decompose-identity", parents=[common])
    ad.add_argument("--l", type=int, default=0)
    ar = as_.add_parser("ret-bracket", parents=[common])
    ar.add_argument("--n", type=int, default=18)
    an = as_.add_parser("dims", parents=[common])
    an.add_argument("--N", type=int, default=2)
    return p


_RUNNERS = {
    "growth": run_growth,
    "xk": run_xk,
    "ergodic": run_ergodic,
    "subst": run_subst,
    "algebra": run_algebra,
}


_INT_KEYS = {"seed", "workers", "max_bytes", "trials", "l", "N", "k_max",
             "levels", "p_max", "r", "max_level", "n_max", "random"}
_STR_KEYS = {"format", "output", "g", "f", "policy", "gamma", "n", "u",
             "word", "proj", "epsilon", "n_list", "rec_samples"}


def parse_and_dispatch(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        # config supplies defaults only; flags given on the command line win,
        # and keys that do not apply to this command are ignored
        if args.config:
            defaults = load_config(args.config)
            for key, raw in defaults.items():
                if key not in _INT_KEYS | _STR_KEYS:
                    raise UsageError("config key %r is not a flag" % key)
                if "--" + key.replace("_", "-") in argv:
                    continue
                if hasattr(args, key):
                    setattr(args, key,
                            int(raw) if key in _INT_KEYS else raw)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    except UsageError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2
    except (IndexError, ValueError) as e:
        sys.stderr.write("error: bad --config usage: %s\n" % e)
        return 2
    try:
        if args.max_bytes is None and os.environ.get("WORDLAB_MAX_BYTES"):
            args.max_bytes = max_bytes_budget()
        if args.max_bytes is not None and args.max_bytes < MIN_MAX_BYTES:
            raise UsageError("max_bytes must be >= %d" % MIN_MAX_BYTES)
        if args.workers < 1:
            raise UsageError("workers must be >= 1")
        _RUNNERS[args.family](args)
        return 0
    except VerificationFailure as e:
        sys.stderr.write(json.dumps(
            {"schema": SCHEMA, "witness": _jsonable(e.witness)},
            sort_keys=True) + "\n")
        return 1
    except UsageError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2
    except (ValueError, MemoryError) as e:
        sys.stderr.write("error: %s\n" % e)
        return 2


def main():
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
