"""Command-line front end: ``verify``, ``oscillator`` and ``spectrum``.

Exit codes: 0 when every check passed (or was exactly corrected by the
fitter), 1 on any failed check or positivity violation, 2 on usage errors.
Rationals are written as ``"p/q"`` strings in structured output.
"""

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
HERMITIAN_TOL = 1e-10


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    ns: list
    sub: str = "all"
    fit: bool = False
    fmt: str = "text"
    out: str = None
    jobs: int = 1


# --------------------------------------------------------------------------
# parsing helpers

def _rational(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def _rational_list(text):
    if text is None:
        return None
    parts = [p for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty list")
    return [_rational(p) for p in parts]


def _int_list(text):
    vals = _rational_list(text)
    if vals is None:
        return None
    if any(v.denominator != 1 or v < 0 for v in vals):
        raise UsageError(f"expected nonnegative integers: {text!r}")
    return [int(v) for v in vals]


def _subs_for(n, sub):
    """Sub-structure indices requested for dimension ``n``."""
    if sub == "all":
        return [1] + list(range(2, n))
    try:
        k = int(sub)
    except ValueError:
        raise UsageError(f"--sub must be 'all', 1 or an index i; got {sub!r}") from None
    if k == 1 or 2 <= k <= n - 1:
        return [k]
    raise UsageError(f"--sub {k} outside 1 and 2..{n - 1} for n={n}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(text, out):
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _status_word(status):
    return {"pass": "PASS", "corrected": "CORRECTED", "fail": "FAIL"}.get(status, status.upper())


def _record_lines(rec, show_tables):
    line = f"{_status_word(rec['status']):<9} {rec['id']}  residual_terms={rec['residual_terms']}  {rec['elapsed_ms']:.1f} ms"
    out = [line]
    if rec.get("outcome"):
        out.append(f"          {rec['outcome']}")
    if show_tables or rec["status"] != "pass":
        for key in ("printed_coefficients", "fitted_coefficients"):
            table = rec.get(key)
            if not table:
                continue
            out.append(f"          {key.split('_')[0]}:")
            for lab, coeffs in table.items():
                terms = ", ".join(f"{m or '1'}: {c}" for m, c in coeffs.items())
                out.append(f"            {lab}: {{{terms}}}")
    return out


# --------------------------------------------------------------------------
# verify

def _verify_task(args):
    """One (n, sub) unit of work; top-level so it can run in a worker process."""
    from . import casimir, qalg

    n, sub, fit = args
    if sub is None:
        return [r.to_record() for r in qalg.verify_integrals(n) + qalg.verify_cartan(n)]
    if sub == 1:
        reps = qalg.verify_substructure1(n, fit=fit)
    else:
        reps = qalg.verify_substructure_i(n, sub, fit=fit)
    reps += casimir.verify_casimirs(n, [sub])
    return [r.to_record() for r in reps]


def run_verify(cfg):
    tasks = []
    for n in cfg.ns:
        tasks.append((n, None, cfg.fit))
        tasks += [(n, s, cfg.fit) for s in _subs_for(n, cfg.sub)]
    if cfg.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_verify_task, tasks))  # map keeps task order
    else:
        results = [_verify_task(t) for t in tasks]
    records = [rec for chunk in results for rec in chunk]
    code = EXIT_FAIL if any(r["status"] == "fail" for r in records) else EXIT_OK
    return code, {"command": "verify", "records": records}


# --------------------------------------------------------------------------
# oscillator

def _pvals_from(args, n):
    from .oscillator import PositivityError, v_from_beta

    if args.pvals is not None and args.beta is not None:
        raise UsageError("give either --pvals or --beta, not both")
    if args.beta is not None:
        betas = _rational_list(args.beta)
        if len(betas) == 1:
            betas = betas * (n - 1)
        if len(betas) != n - 1:
            raise UsageError(f"need 1 or {n - 1} values for --beta")
        # 1 + 8 beta < 0 is a positivity failure whatever the branch; it
        # propagates as a check failure, not a usage error
        try:
            for b in betas:
                v_from_beta(b, 1)
            if args.branch is None:
                raise UsageError("--beta needs --branch +1 or -1 (v_i = +-sqrt((1 + 8 beta_i)/4))")
            return [v_from_beta(b, args.branch) + Fraction(1, 2) for b in betas]
        except PositivityError:
            raise
        except ValueError as e:
            raise UsageError(str(e)) from None
    pvals = _rational_list(args.pvals)
    if pvals is None:
        return None
    if len(pvals) != n - 1:
        raise UsageError(f"need {n - 1} values for --pvals")
    return pvals


def run_oscillator(args):
    from . import oscillator as osc
    from .spectrum import QuantumNumbers, m_last

    n = args.n
    subs = _subs_for(n, args.sub)
    records = []
    extra = {}
    pvals, positivity = None, None
    if args.p is not None:
        if subs != [1]:
            raise UsageError("representations are built for --sub 1 only")
        try:
            pvals = _pvals_from(args, n)
        except osc.PositivityError as e:
            positivity = e
        else:
            if pvals is None:
                raise UsageError("--p needs --pvals or --beta")
        ns = _int_list(args.ns) if args.ns else [0] * (n - 2)
        if len(ns) != n - 2:
            raise UsageError(f"need {n - 2} values for --ns")
        gamma = _rational(args.gamma)
    for s in subs:
        params = osc.WeightParams(n=n) if s == 1 else osc.WeightParams(n=n, i=s)
        records.append(osc.verify_factorization(s, params).to_record())
        real = osc.realize_substructure(s, params, args.weights, None if s == 1 else args.relations)
        records += [r.to_record() for r in real.reports]
    if args.p is not None:
        t0 = time.perf_counter()
        if positivity is not None:
            records.append(_rep_failure(n, args.p, str(positivity), t0))
            return EXIT_FAIL, {"command": "oscillator", "records": records}
        qn = QuantumNumbers.from_p(args.p, ns, pvals)
        m = m_last(qn)
        params = osc.sub1_rep_params(n, m, gamma, args.p)
        phi = osc.phi1(params, "expanded")
        try:
            rep = osc.build_rep(phi, args.p, params.u)
        except (osc.PositivityError, osc.BoundaryError) as e:
            records.append(_rep_failure(n, args.p, f"{type(e).__name__}: {e}", t0))
            return EXIT_FAIL, {"command": "oscillator", "records": records}
        exact = rep.check_exact()
        herm = rep.check_hermitian()
        good = all(v == 0 for v in exact.values()) and all(v < HERMITIAN_TOL for v in herm.values())
        records.append({
            "id": f"osc_rep[n={n}] p={args.p}",
            "tag": "osc_rep",
            "n": n,
            "i": None,
            "status": "pass" if good else "fail",
            "residual_terms": sum(1 for v in exact.values() if v != 0),
            "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3),
            "outcome": f"{rep.dim}-dimensional representation, u = {rep.u}, m = {m}",
            "extra": {
                "dim": rep.dim,
                "energy": params.h,
                "phi_values": rep.phi_values,
                "exact_residuals": exact,
                "hermitian_relative_residuals": herm,
            },
        })
        if args.matrices:
            extra["matrices"] = rep.to_text()
    code = EXIT_FAIL if any(r["status"] == "fail" for r in records) else EXIT_OK
    return code, {"command": "oscillator", "records": records, **extra}


def _rep_failure(n, p, message, t0):
    return {
        "id": f"osc_rep[n={n}] p={p}",
        "tag": "osc_rep",
        "n": n,
        "i": None,
        "status": "fail",
        "residual_terms": 0,
        "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3),
        "outcome": f"positivity error: {message}" if "PositivityError" not in message else message,
    }


# --------------------------------------------------------------------------
# spectrum

def run_spectrum(args):
    from . import spectrum as sp
    from .oscillator import PositivityError

    gamma = _rational(args.gamma)
    report = {"command": "spectrum", "records": [], "levels": []}
    code = EXIT_OK
    if args.n is not None:
        n = args.n
        try:
            pvals = _pvals_from(args, n)
        except PositivityError as e:
            report["error"] = str(e)
            return EXIT_FAIL, report
        if pvals is None:
            if not args.check_sov:
                raise UsageError("spectrum needs --pvals or --beta")
        elif args.bound is not None:
            levels = sp.enumerate_levels(n, pvals, gamma, _rational(args.bound), args.n_lower)
            report["levels"] = [
                {
                    "D": lv.D,
                    "energy": lv.energy,
                    "coefficient": lv.coefficient,
                    "degeneracy_algebraic": lv.degeneracy_algebraic,
                    "degeneracy_sov": lv.degeneracy_sov,
                }
                for lv in levels
            ]
        elif not args.check_sov:
            raise UsageError("spectrum needs --bound")
    if args.check_sov:
        if args.n is not None:
            cases = [(args.n, pvals if pvals is not None else [Fraction(1)] * (args.n - 1))]
        else:
            cases = [(n, [Fraction(k)] * (n - 1)) for n in (2, 3, 4, 5) for k in (0, 1)]
        kmax = int(_rational(args.kmax))
        for n, pv in cases:
            t0 = time.perf_counter()
            try:
                count = sp.sweep_sov_agreement(n, pv, kmax, args.n_lower)
                status, outcome = "pass", f"algebraic = sov on {count} tuples"
            except AssertionError as e:
                status, outcome, count = "fail", str(e), 0
                code = EXIT_FAIL
            report["records"].append({
                "id": f"sov_sweep[n={n}] p_i={','.join(str(x) for x in pv)} kmax={kmax}",
                "tag": "sov_sweep",
                "n": n,
                "i": None,
                "status": status,
                "residual_terms": 0 if status == "pass" else 1,
                "elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3),
                "outcome": outcome,
            })
    return code, report


def _spectrum_text(report, gamma):
    lines = []
    if report.get("levels"):
        lines.append(f"{'D':>8}  {'E':>14}  {'E/gamma^2':>12}  {'deg(alg)':>8}  {'deg(sov)':>8}")
        for lv in report["levels"]:
            lines.append(
                f"{str(lv['D']):>8}  {str(lv['energy']):>14}  {str(lv['coefficient']):>12}"
                f"  {lv['degeneracy_algebraic']:>8}  {lv['degeneracy_sov']:>8}"
            )
    elif "levels" in report and not report.get("records") and "error" not in report:
        lines.append("no levels below the bound")
    if "error" in report:
        lines.append(f"FAIL      positivity error: {report['error']}")
    return lines


# --------------------------------------------------------------------------
# entry point

def build_parser():
    parser = argparse.ArgumentParser(
        prog="kepler-qalg",
        description="Exact verification of the quadratic algebras of the n-dimensional "
                    "Kepler-Coulomb system with beta_i/x_i^2 terms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text", dest="fmt")
        p.add_argument("--out", help="write the report here instead of stdout")

    v = sub.add_parser("verify", help="integrals, Cartan relations, sub-structures, Casimirs")
    v.add_argument("--n", type=int)
    v.add_argument("--all", action="store_true", help="sweep n = 2, 3, 4")
    v.add_argument("--extended", action="store_true", help="include n = 5 in --all (slow)")
    v.add_argument("--sub", default="all", help="'all', 1 or a sub-structure index i")
    v.add_argument("--fit", action="store_true", help="always report fitted coefficient tables")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for independent (n, i) tasks")
    common(v)

    o = sub.add_parser("oscillator", help="structure functions, shift realizations, representations")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--sub", default="1")
    o.add_argument("--weights", choices=("one-sided", "printed"), default="one-sided")
    o.add_argument("--relations", choices=("fitted", "printed"), default="fitted",
                   help="sub-structure i relation tables to realize")
    o.add_argument("--p", type=int, help="build the (p+1)-dimensional representation")
    o.add_argument("--gamma", default="1")
    o.add_argument("--pvals", help="p_1,...,p_{n-1}")
    o.add_argument("--beta", help="beta_i (one value or n-1 values)")
    o.add_argument("--branch", type=int, choices=(1, -1), help="sign of v_i for --beta")
    o.add_argument("--ns", help="n_2,...,n_{n-1} (default all 0)")
    o.add_argument("--matrices", action="store_true", help="include the exact matrices")
    common(o)

    s = sub.add_parser("spectrum", help="energy levels and the separation-of-variables cross-check")
    s.add_argument("--n", type=int)
    s.add_argument("--pvals")
    s.add_argument("--beta")
    s.add_argument("--branch", type=int, choices=(1, -1))
    s.add_argument("--gamma", default="1")
    s.add_argument("--bound", help="largest principal quantity D")
    s.add_argument("--check-sov", action="store_true")
    s.add_argument("--kmax", default="6", help="excitation bound of the SoV sweep")
    s.add_argument("--n-lower", type=int, default=0, help="lower bound of N_1, N_2")
    common(s)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on bad flags
    try:
        if getattr(args, "n", None) is not None and args.n < 2:
            raise UsageError("n must be >= 2")
        if args.command == "verify":
            if args.all:
                ns = [2, 3, 4] + ([5] if args.extended else [])
            elif args.n is not None:
                ns = [args.n]
            else:
                raise UsageError("verify needs --n or --all")
            if args.jobs < 1:
                raise UsageError("--jobs must be >= 1")
            cfg = RunConfig("verify", ns, args.sub, args.fit, args.fmt, args.out, args.jobs)
            for n in ns:
                _subs_for(n, args.sub)
            code, report = run_verify(cfg)
        elif args.command == "oscillator":
            if args.p is not None and args.p < 0:
                raise UsageError("--p must be >= 0")
            code, report = run_oscillator(args)
        else:
            if args.n_lower < 0:
                raise UsageError("--n-lower must be >= 0")
            code, report = run_spectrum(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    report["exit_code"] = code
    if args.fmt == "json":
        _emit(json.dumps(_jsonable(report), indent=2) + "\n", args.out)
    else:
        show = getattr(args, "fit", False)
        lines = []
        for rec in report["records"]:
            lines += _record_lines(rec, show)
        if args.command == "spectrum":
            lines += _spectrum_text(report, args.gamma)
        if report.get("matrices"):
            lines.append(report["matrices"].rstrip("\n"))
        for rec in report["records"]:
            for k, v in rec.get("extra", {}).items():
                if rec.get("tag") == "osc_rep":
                    lines.append(f"          {k}: {_jsonable(v)}")
        npass = sum(r["status"] == "pass" for r in report["records"])
        ncorr = sum(r["status"] == "corrected" for r in report["records"])
        nfail = sum(r["status"] == "fail" for r in report["records"])
        if report["records"]:
            lines.append(f"{npass} pass, {ncorr} corrected, {nfail} fail")
        _emit("\n".join(lines) + "\n", args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
