"""Command line front end: ``ssdual <subcommand> ...``.

Chains, posets and vectors travel as JSON (see :mod:`ssdual.io`); profiles
and cutoff tables as CSV.  Exit status is 0 on success, 1 when an input is
rejected, 2 when a verification check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import analysis, coupon, duality, fsst, io, markov, poset
from .numerics import format_rational, to_rational

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2

RATIONAL_HELP = "rationals are written num/den (e.g. 1/3) or as integers"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for failed checks here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# -- argument helpers -------------------------------------------------------

def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _values(text: str, flag: str, exact: bool = True) -> list:
    """A comma-separated list or a path to a JSON list."""
    if os.path.isfile(text):
        return io.vector_from_json(_read(text), "exact" if exact else "float", key=flag.lstrip("-"))
    try:
        return [to_rational(x, allow_float=not exact) for x in text.split(",")]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _ints(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated integers, got {text!r}") from None


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag}: expected comma-separated numbers, got {text!r}") from None


def _broadcast(values: list, d: int, flag: str) -> list:
    if len(values) == 1:
        return values * d
    if len(values) != d:
        raise UsageError(f"{flag}: expected 1 or {d} values, got {len(values)}")
    return values


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _g(x) -> str:
    return f"{float(x):.6g}"


def _exact_or_g(x) -> str:
    return format_rational(x) if isinstance(x, Fraction) else _g(x)


def _load_chain(path: str, mode: str | None = None):
    return io.chain_from_json(_read(path), mode)


def _aligned(chain, pi, pos):
    """Reorder ``chain`` (and ``pi``, given in the chain's order) to the poset numbering."""
    if chain.labels == pos.labels:
        return chain, pi
    try:
        order = [chain.labels.index(s) for s in pos.labels]
    except ValueError:
        raise duality.LabelMismatch("chain and poset have different state labels") from None
    if len(order) != chain.size:
        raise duality.LabelMismatch("chain and poset have different state labels")
    return chain.permuted(order), None if pi is None else [pi[i] for i in order]


# -- subcommands ------------------------------------------------------------

def cmd_coupon(a):
    p = _values(a.p, "--p")
    N = _broadcast(_ints(a.N, "--N"), len(p), "--N")
    return io.chain_to_json(coupon.coupon_chain(coupon.CouponParams(p, N)))


def cmd_antidual_uniform(a):
    p = _values(a.p, "--p")
    N = _broadcast(_ints(a.N, "--N"), len(p), "--N")
    return io.chain_to_json(coupon.antidual_uniform(coupon.CouponParams(p, N)))


def cmd_antidual_product(a):
    return io.chain_to_json(coupon.antidual_product(_values(a.p, "--p"), _values(a.a, "--a")))


def cmd_cube_walk(a):
    return io.chain_to_json(coupon.cube_walk(_values(a.alpha, "--alpha"), _values(a.beta, "--beta")))


def cmd_fsst(a):
    chain = fsst.fsst_chain(_values(a.pi, "--pi"), _values(a.p, "--p"), _values(a.a, "--a"))
    return io.chain_to_json(chain)


def cmd_pure(a):
    return io.chain_to_json(fsst.pure_chain(_values(a.pi, "--pi")))


def cmd_pair(a):
    p = to_rational(a.p)
    if a.which in ("path", "cube"):
        path, cube = fsst.hypercube_pair(a.d, p)
        return io.chain_to_json(path if a.which == "path" else cube)
    birth, star = fsst.hypercube_pair_duals(a.d, p)
    return io.chain_to_json(birth if a.which == "path-dual" else star)


def cmd_antidual(a):
    pos = io.poset_from_json(_read(a.poset))
    star, pi = _aligned(_load_chain(a.chain, "exact"), _values(a.pi, "--pi"), pos)
    return io.chain_to_json(duality.antidual(star, pi, pos))


def cmd_ssd(a):
    pos = io.poset_from_json(_read(a.poset))
    chain, _ = _aligned(_load_chain(a.chain, "exact"), None, pos)
    return io.chain_to_json(duality.ssd(chain, pos))


def cmd_verify(a):
    pos = io.poset_from_json(_read(a.poset))
    pi = _values(a.pi, "--pi")
    primal, pi = _aligned(_load_chain(a.primal, "exact"), pi, pos)
    dual, _ = _aligned(_load_chain(a.dual, "exact"), None, pos)
    report = duality.verify_duality(primal, dual, duality.build_link(pos, pi))
    checks = [c.to_dict() for c in report.checks]
    try:
        sharp = analysis.verify_sharp_pair(primal, dual, pi, a.k).to_dict()
    except markov.NotAbsorbing as exc:
        sharp = {"name": "sharp-pair", "ok": False, "error": str(exc)}
    checks.append(sharp)
    ok = all(c["ok"] for c in checks)
    body = json.dumps({"ok": ok, "checks": checks}, indent=2) + "\n"
    if not ok:
        first = next(c["name"] for c in checks if not c["ok"])
        print(f"verification failed: {first}", file=sys.stderr)
    return body, (EXIT_OK if ok else EXIT_FAILED)


def cmd_profile(a):
    chain = _load_chain(a.chain, a.mode)
    exact = a.mode == "exact" and not isinstance(chain, io.FloatChain)
    pi = _values(a.pi, "--pi", exact=exact)
    tail = None
    if a.dual:
        tail = markov.absorption_tail(_load_chain(a.dual, "exact"), a.k)
    if exact:
        sep, tv = analysis.profiles(chain, pi, a.k)
    else:
        if isinstance(chain, io.FloatChain):
            nu, P = chain.nu, chain.P
        else:
            nu, P = [float(x) for x in chain.nu], chain.P.to_float()
        sep, tv = analysis.float_profiles(nu, P, [float(x) for x in pi], a.k)
    lines = ["k,sep,tv,tail"]
    for k in range(a.k + 1):
        t = _exact_or_g(tail[k]) if tail is not None else ""
        lines.append(f"{k},{_exact_or_g(sep[k])},{_exact_or_g(tv[k])},{t}")
    return "\n".join(lines) + "\n"


def cmd_mixture_tail(a):
    mix = fsst.GeometricMixture(_values(a.a, "--a"), _values(a.p, "--p"))
    lines = ["k,tail"] + [f"{k},{format_rational(t)}" for k, t in enumerate(fsst.mixture_tail(mix, a.k))]
    return "\n".join(lines) + "\n"


def cmd_simulate(a):
    p = _values(a.p, "--p", exact=False)
    if a.d is not None:
        p = _broadcast(p, a.d, "--p")
    N = _broadcast(_ints(a.N, "--N"), len(p), "--N")
    sample = analysis.simulate_coupon_T(p, N, a.trials, a.seed, method=a.method, workers=a.workers)
    grid = _floats(a.grid, "--grid") if a.grid else []
    lines = [f"# trials={sample.trials} seed={sample.seed} mean={_g(sample.mean)} variance={_g(sample.variance)}", "t,tail"]
    lines += [f"{_g(t)},{_g(q)}" for t, q in zip(grid, sample.tail_grid(grid))]
    return "\n".join(lines) + "\n"


def cmd_cutoff(a):
    if a.family == "classic":
        fam = analysis.Classic()
    elif a.family == "piecewise":
        if not (a.lams and a.cuts):
            raise UsageError("--lams and --cuts are required for the piecewise family")
        fam = analysis.Piecewise(_floats(a.lams, "--lams"), _floats(a.cuts, "--cuts"))
    elif a.family == "n_copies":
        fam = analysis.NCopies(a.N)
    elif a.family == "log_weights":
        fam = analysis.LogWeights(a.N, a.exponent)
    else:
        raise analysis.UnknownFamily(f"unknown family {a.family!r}")
    table = analysis.cutoff_experiment(
        fam, a.d, a.trials, _floats(a.c, "--c"), a.seed, centering=a.centering, workers=a.workers
    )
    return table.to_csv()


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ssdual", description="Strong stationary duality toolkit.")
    ap.add_argument("--max-states", type=int, default=None,
                    help="cap on poset/state-space size (default: $SSDUAL_MAX_STATES or 4096)")
    ap.add_argument("-o", "--out", default=None, help="write output to this file instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, epilog=RATIONAL_HELP):
        sp = sub.add_parser(name, help=help, description=help, epilog=epilog)
        sp.set_defaults(func=func)
        return sp

    vec = "comma-separated list or path to a JSON list"

    sp = add("coupon", cmd_coupon, "Generalized coupon collector chain (JSON).")
    sp.add_argument("--p", required=True, help=f"coupon probabilities p_1..p_d, sum <= 1 ({vec})")
    sp.add_argument("--N", default="1", help="copies needed per type, one value or d values")

    sp = add("antidual-uniform", cmd_antidual_uniform,
             "Sharp antidual of the coupon chain with uniform stationary law (JSON).")
    sp.add_argument("--p", required=True, help=f"coupon probabilities ({vec})")
    sp.add_argument("--N", default="1", help="copies needed per type, one value or d values")

    sp = add("antidual-product", cmd_antidual_product,
             "Sharp antidual on {0,1}^d with product stationary law (JSON).")
    sp.add_argument("--p", required=True, help=f"coupon probabilities ({vec})")
    sp.add_argument("--a", required=True, help=f"stationary weights a_j in (0,1) ({vec})")

    sp = add("cube-walk", cmd_cube_walk, "Walk on {0,1}^d flipping coordinate k up w.p. alpha_k, down w.p. beta_k (JSON).")
    sp.add_argument("--alpha", required=True, help=vec)
    sp.add_argument("--beta", required=True, help=vec)

    sp = add("fsst", cmd_fsst, "Skip-free chain on {1..M} with law pi and FSST sum_i a_i G(p_i..p_{M-1}) (JSON).")
    sp.add_argument("--pi", required=True, help=f"stationary law, M positive entries ({vec})")
    sp.add_argument("--p", required=True, help=f"birth probabilities p_1..p_{{M-1}} ({vec})")
    sp.add_argument("--a", required=True, help=f"mixture weights a_1..a_M ({vec})")

    sp = add("pure", cmd_pure, "Chain from state 1 whose FSST is M-1 almost surely (JSON).")
    sp.add_argument("--pi", required=True, help=f"stationary law ({vec})")

    sp = add("pair", cmd_pair, "Path/hypercube chains sharing the FSST sum_k Geo(k p), or their duals (JSON).")
    sp.add_argument("--d", type=int, required=True, help="dimension, d >= 2")
    sp.add_argument("--p", required=True, help="rational in (0, 1/d]")
    sp.add_argument("--which", choices=["path", "cube", "path-dual", "cube-dual"], default="path")

    sp = add("antidual", cmd_antidual, "Generic sharp antidual of an absorbing chain (JSON).")
    sp.add_argument("--chain", required=True, help="absorbing chain JSON")
    sp.add_argument("--pi", required=True, help=f"target stationary law in the chain's state order ({vec})")
    sp.add_argument("--poset", required=True, help='poset JSON: {"labels","zeta"} or {"product": [N_1,...]}')

    sp = add("ssd", cmd_ssd, "Generic sharp strong stationary dual of an ergodic chain (JSON).")
    sp.add_argument("--chain", required=True, help="ergodic chain JSON")
    sp.add_argument("--poset", required=True, help="poset JSON")

    sp = add("verify", cmd_verify,
             "Duality report plus sep = absorption tail for k = 0..K (JSON); exit 2 names the first failing check.")
    sp.add_argument("--primal", required=True, help="ergodic chain JSON")
    sp.add_argument("--dual", required=True, help="absorbing chain JSON")
    sp.add_argument("--pi", required=True, help=f"stationary law of the primal ({vec})")
    sp.add_argument("--poset", required=True, help="poset JSON")
    sp.add_argument("--k", type=int, default=50, help="last step checked (default 50)")

    profile_help = ("CSV k,sep,tv,tail for k = 0..K; exact values as num/den, float values "
                    "with 6 significant digits; tail is filled when --dual is given.")
    for name in ("sep", "tv"):
        sp = add(name, cmd_profile, f"{'Separation' if name == 'sep' else 'Total variation'} profile. {profile_help}")
        sp.add_argument("--chain", required=True, help="chain JSON")
        sp.add_argument("--pi", required=True, help=f"stationary law ({vec})")
        sp.add_argument("--k", type=int, required=True, help="number of steps K >= 0")
        sp.add_argument("--dual", default=None, help="absorbing chain JSON for the tail column")
        sp.add_argument("--mode", choices=["exact", "float"], default="exact")

    sp = add("mixture-tail", cmd_mixture_tail, "CSV k,tail with exact P(T > k) of a geometric mixture.")
    sp.add_argument("--a", required=True, help=f"weights a_1..a_M ({vec})")
    sp.add_argument("--p", required=True, help=f"parameters p_1..p_{{M-1}} ({vec})")
    sp.add_argument("--k", type=int, required=True, help="last step K")

    sp = add("simulate", cmd_simulate,
             "Monte Carlo absorption time of the coupon collector; CSV t,tail after a summary comment.",
             epilog="probabilities may be decimals or num/den; time is counted in steps")
    sp.add_argument("--p", required=True, help=f"coupon probabilities ({vec}); one value with --d")
    sp.add_argument("--d", type=int, default=None, help="number of types when --p is a single value")
    sp.add_argument("--N", default="1", help="copies per type, one value or d values")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    sp.add_argument("--grid", default="", help="comma-separated times t for P(T > t)")
    sp.add_argument("--method", choices=["skip", "steps"], default="skip")
    sp.add_argument("--workers", type=int, default=1, help="threads; output does not depend on it")

    sp = add("cutoff", cmd_cutoff,
             "Empirical P(T > t_d + c w_d) against 1 - exp(-exp(-c)); CSV c,empirical,limit,d,trials,t_d,w_d.",
             epilog="times are in steps; floats printed with 6 significant digits")
    sp.add_argument("--family", required=True, help="classic, piecewise, n_copies or log_weights")
    sp.add_argument("--d", type=int, required=True, help="number of coupon types")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True, help="RNG seed (required)")
    sp.add_argument("--c", default="-2,-1,0,1,2,3", help="window offsets c")
    sp.add_argument("--N", type=int, default=2, help="copies per type (n_copies, log_weights)")
    sp.add_argument("--exponent", type=float, default=0.5, help="log_weights exponent in (0,1)")
    sp.add_argument("--lams", default=None, help="piecewise density values, first strictly smallest")
    sp.add_argument("--cuts", default=None, help="right ends of the pieces, last is 1")
    sp.add_argument("--centering", choices=["stated", "limit"], default="stated")
    sp.add_argument("--workers", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.max_states is not None:
        os.environ[poset.ENV_MAX_STATES] = str(args.max_states)
    try:
        result = args.func(args)
    except UsageError as exc:
        print(f"ssdual {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ArithmeticError, TypeError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text, code = result if isinstance(result, tuple) else (result, EXIT_OK)
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
