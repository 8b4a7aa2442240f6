"""Command-line entry point: ``perfectmc {sample,verify,mixing,bench}``.

Exit codes: 0 success, 1 verification failure or certificate violation,
2 usage or parse error, 3 resource budget exceeded.
"""

import argparse
import csv
import json
import sys
import time
from collections import Counter
from fractions import Fraction

import numpy as np

from .core import as_rational, transition_matrix
from .errors import CertificateViolation, DomainError, ModelError, PerfectMCError, ResourceError
from .gallery import GraphSpec, lazy_walk, load_chain
from .mixing import (
    PowerCache,
    RowIterator,
    audit_certificate,
    distance_profile,
    tau_l1_brute,
    tau_uniform_brute,
    verify_l2_linf_identity,
    verify_linf_from_l1,
    verify_norm_chain,
)
from .samplers import PerfectSampler, certificate_eps, default_eps, make_certificate, mixture_identity, reject_identity
from .stationary import StationaryVector, check_reversible, is_stationary
from .stats import binomial_z, chi_square, frequencies, mean_z

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _frac(x):
    return str(Fraction(x))


def _parse_cert(text):
    if text in ("brute", "gap", "ell1"):
        return text, None
    if text.startswith("user:"):
        try:
            t = int(text[5:])
        except ValueError:
            raise UsageError(f"bad user certificate {text!r}") from None
        if t < 0:
            raise UsageError("user certificate time must be nonnegative")
        return "user", t
    raise UsageError("--cert must be brute, gap, ell1 or user:T")


def _parse_eps(text):
    if text is None:
        return None
    try:
        eps = as_rational(text)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --eps {text!r}: {exc}") from None
    if eps <= 0:
        raise UsageError("--eps must be positive")
    return eps


def _parse_seed(text):
    try:
        seed = int(text, 0)
    except ValueError:
        raise UsageError(f"bad --seed {text!r}") from None
    if not 0 <= seed < 1 << 64:
        raise UsageError("--seed must be an unsigned 64-bit integer")
    return seed


def _setup(args):
    """Chain, exact stationary vector, transition matrix and sampler for ``args``."""
    g = load_chain(args.chain)
    chain = g.chain.tabulated() if args.simulator == "table" else g.chain
    if not 0 <= args.start < chain.size:
        raise UsageError(f"--start must lie in [0, {chain.size})")
    P = transition_matrix(chain)
    st = StationaryVector(g.pi, g.pi.min_support_mass())
    source, user_t = _parse_cert(args.cert)
    eps = _parse_eps(args.eps)
    if eps is None:
        eps = default_eps(chain.size, args.mode)
    cert = make_certificate(P, st, source, certificate_eps(eps, args.mode), user_t=user_t, cache=PowerCache(P))
    sampler = PerfectSampler(chain, args.start, args.mode, cert, stationary=st)
    return g, chain, P, st, sampler


def _open_out(args):
    if args.out in (None, "-"):
        return sys.stdout, False
    return open(args.out, "w", encoding="utf-8", newline=""), True


def _emit_json(obj, out):
    out.write(json.dumps(obj, sort_keys=True) + "\n")


def _summary(g, sampler, reports):
    n = len(reports)
    counts = Counter(r.state for r in reports)
    branches = Counter(r.branch for r in reports)
    return {
        "chain": g.name,
        "states": g.chain.size,
        "mode": sampler.mode,
        "certificate": sampler.certificate.to_dict(),
        "draws": n,
        "empirical": {g.chain.space.label(s): counts[s] / n for s in sorted(counts)},
        "branches": dict(sorted(branches.items())),
        "oracle_invocations": sum(r.oracle_invoked for r in reports),
        "mean_steps": sum(r.steps_simulated for r in reports) / n,
        "mean_bits": sum(r.bits_used for r in reports) / n,
        "mean_iterations": sum(r.iterations for r in reports) / n,
    }


def cmd_sample(args):
    g, chain, P, st, sampler = _setup(args)
    reports = sampler.sample(args.n, _parse_seed(args.seed), workers=args.workers)
    out, close = _open_out(args)
    try:
        if args.format == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["state", "label", "branch", "steps", "bits", "oracle", "iterations"])
            for r in reports:
                w.writerow([r.state, chain.space.label(r.state), r.branch, r.steps_simulated,
                            r.bits_used, int(r.oracle_invoked), r.iterations])
        else:
            for r in reports:
                _emit_json(r.to_dict(chain.space), out)
            _emit_json({"summary": _summary(g, sampler, reports)}, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def cmd_verify(args):
    started = time.perf_counter()
    g, chain, P, st, sampler = _setup(args)
    pi = st.dist
    eps, t = sampler.eps, sampler.t
    report = {"chain": g.name, "states": chain.size, "certificate": sampler.certificate.to_dict()}
    failures = []

    report["stationary"] = is_stationary(P, pi)
    if not report["stationary"]:
        failures.append(("stationary", None))
    reversible = check_reversible(P, pi)
    report["reversible"] = reversible

    p = RowIterator(chain).distribution(args.start, t)
    ok, state = mixture_identity(p, pi, eps)
    report["mixture_identity"] = {"ok": ok, "state": state}
    if not ok:
        failures.append(("mixture_identity", state))
    if eps <= Fraction(1, 2):
        ok, state = reject_identity(p, pi, eps)
        report["reject_identity"] = {"ok": ok, "state": state}
        if not ok:
            failures.append(("reject_identity", state))
    else:
        report["reject_identity"] = {"ok": None, "state": None, "note": "eps > 1/2"}
    report["certificate_audit"] = audit_certificate(chain, pi, sampler.certificate)

    cache = PowerCache(P)
    identities = {}
    for s in (1, 2, 4):
        row = {"norm_chain": verify_norm_chain(P, pi, s, cache),
               "linf_from_l1": verify_linf_from_l1(P, pi, s, cache)}
        if reversible:
            row["l2_linf"] = verify_l2_linf_identity(P, pi, s, cache)
        identities[str(s)] = row
        for k, v in row.items():
            if not v:
                failures.append((f"{k}@t={s}", None))
    report["distance_identities"] = identities

    if not failures:
        reports = sampler.sample(args.n, _parse_seed(args.seed), workers=args.workers)
        counts = frequencies([r.state for r in reports], chain.size)
        chi = chi_square(counts, list(pi))
        oracle = sum(r.oracle_invoked for r in reports)
        report["chi_square"] = {"statistic": chi.statistic, "dof": chi.dof, "p_value": chi.p_value,
                                "bins": chi.bins, "pass": chi.p_value > args.alpha}
        if sampler.mode == "mixture":
            report["branch_z"] = binomial_z(oracle, args.n, eps / (1 + eps))
        report["mean_steps"] = sum(r.steps_simulated for r in reports) / args.n
        report["mean_bits"] = sum(r.bits_used for r in reports) / args.n
    report["failures"] = [{"check": c, "state": s} for c, s in failures]
    report["ok"] = not failures and report.get("chi_square", {}).get("pass", False)
    if args.timing:
        report["wall_clock_s"] = time.perf_counter() - started
    out, close = _open_out(args)
    try:
        _emit_json(report, out)
    finally:
        if close:
            out.close()
    for c, s in failures:
        print(f"verification failed: {c}" + ("" if s is None else f" at state {s}"), file=sys.stderr)
    if not report["certificate_audit"]:
        print(f"certificate violation: Dinf({t}) exceeds {eps}", file=sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _parse_ints(text, what):
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad {what} list {text!r}") from None
    if not vals or any(v < 0 for v in vals):
        raise UsageError(f"{what} must be nonnegative integers")
    return vals


def ratio_study(sizes):
    """Rows ``(n, tau_U(1/n), tau_quarter, ratio)`` for the lazy walk on K_n."""
    rows = []
    for n in sizes:
        g = lazy_walk(GraphSpec.complete(n))
        P = transition_matrix(g.chain)
        cache = PowerCache(P)
        tu = tau_uniform_brute(P, g.pi, Fraction(1, n), cache=cache).t
        tq = tau_l1_brute(P, g.pi, cache=cache)
        rows.append((n, tu, tq, Fraction(tu, tq)))
    return rows


def cmd_mixing(args):
    out, close = _open_out(args)
    try:
        if args.ratio_study:
            rows = ratio_study(_parse_ints(args.sizes, "size"))
            if args.format == "json":
                for n, tu, tq, r in rows:
                    _emit_json({"n": n, "tau_uniform": tu, "tau_quarter": tq, "ratio": _frac(r)}, out)
            else:
                w = csv.writer(out, lineterminator="\n")
                w.writerow(["n", "tau_uniform", "tau_quarter", "ratio"])
                for n, tu, tq, r in rows:
                    w.writerow([n, tu, tq, _frac(r)])
            return EXIT_OK
        if args.chain is None:
            raise UsageError("--chain is required unless --ratio-study is given")
        g = load_chain(args.chain)
        P = transition_matrix(g.chain)
        cache = PowerCache(P)
        ts = _parse_ints(args.t, "t")
        rows = [distance_profile(P, g.pi, t, cache) for t in ts]
        if args.format == "json":
            for d in rows:
                _emit_json({"t": d.t, "D1": _frac(d.d1), "TV": _frac(d.d1 / 2),
                            "D2_squared": _frac(d.d2_sq), "Dinf": _frac(d.dinf)}, out)
        else:
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["t", "D1", "TV", "D2_squared", "Dinf"])
            for d in rows:
                w.writerow([d.t, _frac(d.d1), _frac(d.d1 / 2), _frac(d.d2_sq), _frac(d.dinf)])
        if args.certificate:
            st = StationaryVector(g.pi, g.pi.min_support_mass())
            eps = _parse_eps(args.eps) or default_eps(g.chain.size)
            for spec in args.certificate:
                source, user_t = _parse_cert(spec)
                cert = make_certificate(P, st, source, eps, user_t=user_t, cache=cache)
                _emit_json({"certificate": cert.to_dict()}, out)
    finally:
        if close:
            out.close()
    return EXIT_OK


def _percentiles(values):
    arr = np.asarray(values, dtype=float)
    return {k: float(np.percentile(arr, q)) for k, q in (("p50", 50), ("p90", 90), ("p99", 99))} | {
        "mean": float(arr.mean()), "max": float(arr.max())}


def cmd_bench(args):
    started = time.perf_counter()
    g, chain, P, st, sampler = _setup(args)
    reports = sampler.sample(args.n, _parse_seed(args.seed), workers=args.workers)
    n, eps, t = len(reports), sampler.eps, sampler.t
    oracle = sum(r.oracle_invoked for r in reports)
    cheap_steps_ok = all(r.steps_simulated == t for r in reports if r.branch == "cheap")
    out = {
        "chain": g.name,
        "mode": sampler.mode,
        "certificate": sampler.certificate.to_dict(),
        "draws": n,
        "steps": _percentiles([r.steps_simulated for r in reports]),
        "bits": _percentiles([r.bits_used for r in reports]),
        "oracle_rate": oracle / n,
        "cheap_steps_equal_t": cheap_steps_ok,
    }
    if sampler.mode == "mixture":
        out["expected_oracle_rate"] = float(eps / (1 + eps))
        out["oracle_z"] = binomial_z(oracle, n, eps / (1 + eps))
    else:
        out["mean_iterations"] = sum(r.iterations for r in reports) / n
        out["expected_iterations"] = float(1 + eps)
        out["iterations_z"] = mean_z([r.iterations for r in reports], 1 + eps, eps * (1 + eps))
    if args.timing:
        out["wall_clock_s"] = time.perf_counter() - started
    fh, close = _open_out(args)
    try:
        _emit_json(out, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="perfectmc", description="Perfect samplers from simulatable Markov chains.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, chain_required=True):
        p.add_argument("--chain", required=chain_required, help="chain JSON (inline or file path)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--eps", help="approximation error as num/den")

    def sampling(p, n_default):
        common(p)
        p.add_argument("--mode", choices=("mixture", "reject"), default="mixture")
        p.add_argument("--cert", default="brute", help="brute, gap, ell1 or user:T")
        p.add_argument("--n", type=int, default=n_default)
        p.add_argument("--seed", default="0")
        p.add_argument("--start", type=int, default=0)
        p.add_argument("--simulator", choices=("local", "table"), default="local")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sample", help="draw exact samples")
    sampling(p, 1)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="exact identities plus a chi-square check")
    sampling(p, 100_000)
    p.add_argument("--alpha", type=float, default=1e-3, help="chi-square significance level")
    p.add_argument("--timing", action="store_true", help="include wall-clock time")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mixing", help="exact distance trajectories and certificates")
    common(p, chain_required=False)
    p.set_defaults(format="csv")
    p.add_argument("--t", default="0,1,2,4,8", help="comma-separated times")
    p.add_argument("--certificate", action="append", help="brute, gap, ell1 or user:T (repeatable)")
    p.add_argument("--ratio-study", action="store_true", help="tau_U(1/n) over the quarter time on lazy K_n")
    p.add_argument("--sizes", default="8,16,32,64")
    p.set_defaults(func=cmd_mixing)

    p = sub.add_parser("bench", help="step, bit and oracle statistics")
    sampling(p, 10_000)
    p.add_argument("--timing", action="store_true", help="include wall-clock time")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "n", 1) < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "alpha", 0.5) <= 0 or getattr(args, "alpha", 0.5) >= 1:
        print("error: --alpha must lie in (0, 1)", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CertificateViolation as exc:
        where = "" if exc.state is None else f" (state {exc.state})"
        print(f"certificate violation: {exc}{where}", file=sys.stderr)
        return EXIT_FAIL
    except ResourceError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ModelError, DomainError, PerfectMCError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
