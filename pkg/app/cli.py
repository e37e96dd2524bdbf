"""
Command-line interface

Every subcommand builds one CommandReport, prints it as JSON (default) or as
a text table, and maps the outcome to the exit code: 0 when every assertion
passed, 1 when one failed, 2 for usage and precondition errors.
"""

import argparse
import logging
import sys
import time
from contextlib import contextmanager, nullcontext
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence

from . import __version__
from .config_manager import ConfigManager
from .congruence import (
    NewSpaceSpec, eisenstein_eigenspace_mod, identity_coset_comparison, new_subspace, rational_newform_eigendata,
    verify_T1, verify_T2, verify_T3,
)
from .cosets import canonical, psi
from .eisenstein import (
    EpsSystem, eis_minus_identity_coset, eis_minus_level1, eis_plus, eis_plus_from_atkin_lehner,
)
from .exactlinalg import (
    RATIONALS, CoefficientDomain, DomainMatrix, Subspace, charpoly, equal, identity, serialize_matrix,
)
from .exactmath import format_rational, is_square_free, sigma, t1_conditions
from .heckealgebra import (
    DoubleCosetSpec, atkin_lehner_matrix, configure_solver, delta_restricted, eq_star_check,
    hecke_element, hecke_matrix, is_hecke_element, second_realization, sigma_operator,
)
from .logging_config import apply_config, setup_logging
from .oracles import dim_oracle, ramanujan_tau
from .periodspace import build_W, include, parity_subspace, satisfies_relations, split_pm, trace
from .prometheus_metrics import ComputationMetrics
from .reference_data import EXAMPLE_5_1, EXAMPLE_5_2, EXAMPLE_5_3, EXAMPLES, RAMANUJAN, T2_CASES
from .scanner import scan_T1
from .schemas import CommandReport
from .template_renderer import ReportRenderer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


# ── Run context ───────────────────────────────────────────────────────────────

class CommandContext:
    """Parsed arguments, configuration, metrics and timings of one run"""

    def __init__(self, args: argparse.Namespace, config: ConfigManager,
                 metrics: Optional[ComputationMetrics] = None):
        self.args = args
        self.config = config
        self.metrics = metrics
        self.realization = getattr(args, "realization", None) or config.get("hecke", "realization")
        self.timings: Dict[str, float] = {}

    @contextmanager
    def timed(self, operation: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            with self.metrics.time(operation) if self.metrics else nullcontext():
                yield
        finally:
            self.timings[operation] = self.timings.get(operation, 0.0) + time.perf_counter() - start

    def record_dimension(self, level: int, w: int, domain: CoefficientDomain, dim: int):
        if self.metrics:
            self.metrics.record_dimension(level, w, str(domain), dim)

    def report(self, command: str, **params) -> CommandReport:
        return CommandReport(command=command, params={k: v for k, v in params.items() if v is not None})


# ── Argument helpers ──────────────────────────────────────────────────────────

def _signed_unit(text: str) -> int:
    value = str(text).strip().replace("−", "-")
    if value not in ("+1", "1", "-1"):
        raise argparse.ArgumentTypeError(f"expected +1 or -1, got '{text}'")
    return int(value)


def _int_range(text: str) -> List[int]:
    """'4-12', '4:12' (inclusive) or '4,6,8'."""
    text = str(text).strip()
    try:
        if "," in text:
            return sorted({int(x) for x in text.split(",") if x.strip()})
        for sep in (":", "-"):
            if sep in text[1:]:
                lo, hi = text.split(sep, 1)
                return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 4-12 or a list like 4,6,8, got '{text}'")


def _selector(text: str) -> tuple:
    """'2=-10' → (2, -10)."""
    n, sep, value = str(text).partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected n=value, got '{text}'")
    try:
        return int(n), int(value.replace("−", "-"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected n=value with integers, got '{text}'")


def _weight(args: argparse.Namespace) -> int:
    """Polynomial degree w from --w, or k-2 from --weight/-k."""
    if getattr(args, "w", None) is not None:
        return args.w
    if getattr(args, "weight", None) is not None:
        return args.weight - 2
    raise ValueError("Give the weight with --weight/-k (modular weight) or --w (polynomial degree)")


def _k(args: argparse.Namespace) -> int:
    return _weight(args) + 2


def _domain(args: argparse.Namespace) -> CoefficientDomain:
    return CoefficientDomain.parse(getattr(args, "mod", None) or "Q")


def _require(args: argparse.Namespace, *names: str):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ValueError(f"Missing required option(s): {', '.join('--' + n.replace('_', '-') for n in missing)}")


def _exact(values: Sequence) -> List[str]:
    return [format_rational(v) for v in values]


def _matrix_results(M: DomainMatrix) -> Dict[str, object]:
    return {"matrix": serialize_matrix(M), "charpoly": _exact(charpoly(M)), "size": M.shape[0]}


# ── Commands ──────────────────────────────────────────────────────────────────

def cmd_dim(ctx: CommandContext) -> CommandReport:
    """dim W_w(N), dim W⁺, dim W⁻ and the Eichler-Shimura comparison."""
    args = ctx.args
    _require(args, "level")
    N, w, domain = args.level, _weight(args), _domain(args)
    report = ctx.report("dim", level=N, w=w, mod=str(domain))
    with ctx.timed("build_W"):
        W = build_W(N, w, domain)
        plus, minus = split_pm(W)
    ctx.record_dimension(N, w, domain, W.dim)
    report.results.update(dimW=W.dim, dimWplus=plus.dim, dimWminus=minus.dim)
    if not domain.characteristic and w >= 2:
        oracle = dim_oracle(N, w + 2)
        report.results["oracle"] = oracle.to_json()
        report.add("eichler_shimura_plus", plus.dim == oracle.modular,
                   {"dimWplus": plus.dim, "dimM": oracle.modular})
        report.add("eichler_shimura_minus", minus.dim == oracle.cusp,
                   {"dimWminus": minus.dim, "dimS": oracle.cusp})
    return report


def cmd_basis(ctx: CommandContext) -> CommandReport:
    """Basis of W_w(N) (or of one δ-parity part) as polynomial tuples."""
    args = ctx.args
    _require(args, "level")
    N, w, domain = args.level, _weight(args), _domain(args)
    report = ctx.report("basis", level=N, w=w, mod=str(domain), parity=args.parity)
    with ctx.timed("build_W"):
        W = build_W(N, w, domain)
        space = parity_subspace(W, args.parity) if args.parity else W
    elements = space.elements()
    report.results.update(dim=space.dim, basis=[P.to_json() for P in elements])
    report.add("relations_hold", all(satisfies_relations(P) for P in elements))
    return report


def cmd_hecke_matrix(ctx: CommandContext) -> CommandReport:
    """Matrix of T_n on W_w(N) with the relation and commutation checks."""
    args = ctx.args
    _require(args, "level", "n")
    N, w, domain, n = args.level, _weight(args), _domain(args), args.n
    report = ctx.report("hecke-matrix", level=N, w=w, mod=str(domain), n=n, realization=ctx.realization)
    with ctx.timed("hecke_element"):
        element = hecke_element(n, ctx.realization)
    with ctx.timed("hecke_matrix"):
        H = hecke_matrix(N, w, domain, n, ctx.realization)
    report.results.update(_matrix_results(H))
    report.results["element_terms"] = len(element)
    report.add("hecke_element_relation", is_hecke_element(element, n), {"terms": len(element)})

    D = delta_restricted(N, w, domain)
    report.add("commutes_with_delta", equal(H * D, D * H))

    W = build_W(N, w, domain)
    with ctx.timed("second_realization"):
        other = W.restrict(sigma_operator(N, w, domain, DoubleCosetSpec.hecke(n, N),
                                          second_realization(n, ctx.realization)))
    report.add("realization_independent", equal(H, other))
    return report


def cmd_al_matrix(ctx: CommandContext) -> CommandReport:
    """Matrix of the normalized Atkin-Lehner operator W_Q on W_w(N)."""
    args = ctx.args
    _require(args, "level")
    N, w, domain = args.level, _weight(args), _domain(args)
    Q = args.q or N
    report = ctx.report("al-matrix", level=N, w=w, mod=str(domain), Q=Q, realization=ctx.realization)
    with ctx.timed("al_matrix"):
        A = atkin_lehner_matrix(N, w, domain, Q, ctx.realization)
    report.results.update(_matrix_results(A))
    size = A.shape[0]
    report.add("involution", equal(A * A, identity(size, domain.field())))
    star = eq_star_check(DoubleCosetSpec.atkin_lehner(Q, N))
    report.add("coset_bijection", star.ok,
               {"gamma_cosets": star.gamma_cosets, "sl2_cosets": star.sl2_cosets})
    if is_square_free(N) and N > 1:
        n = next(m for m in (2, 3, 5, 7, 11, 13) if N % m)
        H = hecke_matrix(N, w, domain, n, ctx.realization)
        report.add(f"commutes_with_T{n}", equal(A * H, H * A))
    return report


def cmd_eisenstein(ctx: CommandContext) -> CommandReport:
    """Even Eisenstein class (closed form) or the odd identity-coset value."""
    args = ctx.args
    _require(args, "level")
    N, w, domain = args.level, _weight(args), _domain(args)
    eps = EpsSystem.parse(args.eps or "+1", N)
    report = ctx.report("eisenstein", level=N, w=w, mod=str(domain), eps=str(eps),
                        parity=args.parity or 1)
    if args.parity == -1:
        with ctx.timed("eis_minus"):
            ext = eis_minus_level1(w + 2) if N == 1 else eis_minus_identity_coset(N, eps, w + 2)
        report.results["identity_coset"] = ext.to_json()
        report.results["identity_coset_text"] = str(ext)
        return report

    with ctx.timed("eis_plus"):
        P = eis_plus(N, eps, w)
    if domain.characteristic:
        P = P.reduce_mod(domain.characteristic)
    report.results["components"] = P.to_json()
    report.results["nonzero"] = not P.is_zero()
    report.add("relations_hold", satisfies_relations(P))
    report.add("in_W", build_W(N, w, domain).contains_poly(P))
    if args.cross_check and not domain.characteristic:
        with ctx.timed("eis_plus_from_atkin_lehner"):
            other = eis_plus_from_atkin_lehner(N, eps, w, ctx.realization)
        report.add("atkin_lehner_sum_identity", (P - other).is_zero())
    return report


def cmd_trace(ctx: CommandContext) -> CommandReport:
    """Trace from level N to level M and the trace∘include identity."""
    args = ctx.args
    _require(args, "level", "to")
    N, M, w, domain = args.level, args.to, _weight(args), _domain(args)
    if M < 1 or N % M:
        raise ValueError(f"Level {M} does not divide {N}")
    report = ctx.report("trace", level=N, to=M, w=w, mod=str(domain))
    index = psi(N) // psi(M)
    with ctx.timed("trace"):
        W_N = build_W(N, w, domain)
        W_M = build_W(M, w, domain)
        traced = [trace(P, M) for P in W_N.elements()]
        round_trip = [(trace(include(P, N), M) - P.scale(index)).is_zero() for P in W_M.elements()]
    image = Subspace.span([P.to_vector() for P in traced], W_M.ambient_dim, domain.field())
    report.results.update(dimW_N=W_N.dim, dimW_M=W_M.dim, index=index, trace_rank=image.dim)
    report.add("trace_in_W", all(W_M.contains_poly(P) for P in traced))
    report.add("trace_include_scalar", all(round_trip), {"index": index})
    return report


def cmd_new_dim(ctx: CommandContext) -> CommandReport:
    """Dimension of the p-new subspace with optional parity and Atkin-Lehner sign."""
    args = ctx.args
    _require(args, "level", "p")
    N, w, domain, p = args.level, _weight(args), _domain(args), args.p
    al = {p: args.al_sign} if args.al_sign else None
    report = ctx.report("new-dim", level=N, w=w, mod=str(domain), p=p, parity=args.parity,
                        al_sign=args.al_sign)
    with ctx.timed("new_subspace"):
        space = new_subspace(NewSpaceSpec.create(N, w, domain, p, al, args.parity, ctx.realization))
    ctx.record_dimension(N, w, domain, space.dim)
    report.results["dim"] = space.dim
    if not domain.characteristic and w >= 2:
        report.results["oracle"] = dim_oracle(N, w + 2, p).to_json()
    return report


def _t1_report(report: CommandReport, k: int, p: int, eps: int, ell: int, ctx: CommandContext):
    with ctx.timed("verify_T1"):
        result = verify_T1(k, p, eps, ell, ctx.realization)
    conditions = result.conditions
    report.results.update(
        case=conditions.case,
        witnesses=conditions.witnesses,
        targets={str(n): v for n, v in result.targets.items()},
        charpolys_mod=result.charpolys_mod,
        eisenstein_eigenspace_dim=result.eisenstein_eigenspace_dim,
        identity_coset_matches=result.identity_coset_matches,
    )
    if result.odd_route is not None:
        odd = result.odd_route
        report.results["odd_route"] = {
            "eigenspace_dim": odd.eigenspace_dim,
            "principal_part_vanishes": odd.principal_part_vanishes,
            "target_nonzero": odd.target_nonzero,
            "matches": odd.matches,
            "reason": odd.reason,
        }
    for name, ok in conditions.checks.items():
        report.add(f"condition_{name}", ok)
    if not conditions.ok:
        return result
    if result.membership is not None:
        report.add("eisenstein_class_in_new_subspace", result.membership)
    report.add("eisenstein_class_nonzero", bool(result.nonzero))
    for n, ok in result.roots.items():
        report.add(f"eigensystem_root_T{n}", ok, {"target": result.targets.get(n)})
    return result


def cmd_verify_t1(ctx: CommandContext) -> CommandReport:
    args = ctx.args
    _require(args, "p", "eps", "ell")
    k = _k(args)
    report = ctx.report("verify-t1", k=k, p=args.p, eps=args.eps, ell=args.ell, realization=ctx.realization)
    _t1_report(report, k, args.p, args.eps, args.ell, ctx)
    return report


def _t2_report(report: CommandReport, N: int, p: int, w: int, ell: int, ctx: CommandContext,
               prefix: str = ""):
    with ctx.timed("verify_T2"):
        result = verify_T2(N, p, w, ell, ctx.realization)
    key = f"{prefix}N{N}_p{p}_w{w}_ell{ell}" if prefix else None
    values = {"dimQ": result.dim_q, "dimF": result.dim_fl, "anomaly": result.anomaly,
              "expected_anomaly": result.expected_anomaly, "surjective": result.surjective}
    if key:
        report.results[key] = values
    else:
        report.results.update(values)
    report.add(f"{key or 'reduction'}_anomaly_as_expected", result.passed, values)
    return result


def cmd_verify_t2(ctx: CommandContext) -> CommandReport:
    args = ctx.args
    _require(args, "level", "p", "ell")
    w = _weight(args)
    report = ctx.report("verify-t2", level=args.level, p=args.p, w=w, ell=args.ell, realization=ctx.realization)
    _t2_report(report, args.level, args.p, w, args.ell, ctx)
    return report


def _t3_report(report: CommandReport, M: int, p: int, k: int, eps: int, ell: int, g, ctx: CommandContext):
    with ctx.timed("verify_T3"):
        result = verify_T3(M, p, k, eps, ell, g, ctx.realization)
    report.results.update(
        lambda_p=format_rational(result.lambda_p),
        lambda_target=result.lambda_target,
        newform_ap=result.newform_ap,
        targets={str(n): v for n, v in result.targets.items()},
        charpolys_mod=result.charpolys_mod,
    )
    report.add("lambda_p_congruence", result.lambda_congruence,
               {"lambda_p": format_rational(result.lambda_p), "target": result.lambda_target})
    report.add("denominator_condition", result.denominator_condition,
               {"plus": result.denominator_plus, "minus": result.denominator_minus})
    for n, ok in result.roots.items():
        report.add(f"eigensystem_root_T{n}", ok, {"target": result.targets.get(n)})
    return result


def cmd_verify_t3(ctx: CommandContext) -> CommandReport:
    args = ctx.args
    _require(args, "level", "p", "eps", "ell", "selector")
    M, k = args.level, _k(args)
    report = ctx.report("verify-t3", level=M, k=k, p=args.p, eps=args.eps, ell=args.ell,
                        selector=f"{args.selector[0]}={args.selector[1]}", realization=ctx.realization)
    with ctx.timed("newform_eigendata"):
        g = rational_newform_eigendata(M, k, args.selector, realization=ctx.realization)
    report.results["g"] = g.to_json()
    _t3_report(report, M, args.p, k, args.eps, args.ell, g, ctx)
    return report


def cmd_scan_t1(ctx: CommandContext) -> CommandReport:
    """Scan (k, p) for Eisenstein congruences, optionally verifying every hit."""
    args = ctx.args
    _require(args, "k_range", "p_range")
    verify = args.verify or bool(ctx.config.get("scan", "verify", default=False))
    checkpoint = args.checkpoint or ctx.config.get("scan", "checkpoint")
    if args.resume and not checkpoint:
        raise ValueError("--resume needs a checkpoint file (--checkpoint or scan.checkpoint)")
    report = ctx.report("scan-t1", k_range=args.k_range, p_range=args.p_range, verify=verify)
    with ctx.timed("scan_T1"):
        rows = scan_T1(args.k_range, args.p_range, verify,
                       Path(checkpoint) if checkpoint else None, args.resume)
    report.results.update(hits=len(rows), rows=rows)
    if verify:
        for row in rows:
            report.add(f"verify_T1_k{row['k']}_p{row['p']}_eps{row['eps']:+d}_ell{row['ell']}",
                       bool(row.get("verified")))
    return report


# ── Worked examples ───────────────────────────────────────────────────────────

def _reproduce_ramanujan(ctx: CommandContext, report: CommandReport):
    data = RAMANUJAN
    with ctx.timed("hecke_matrix"):
        H = hecke_matrix(data["N"], data["k"] - 2, RATIONALS, data["n"], ctx.realization)
    poly = [Fraction(c) for c in charpoly(H)]
    e, t = data["eisenstein"], data["tau"]
    # (x - e)(x - t)^2
    expected = [Fraction(1), Fraction(-(e + 2 * t)), Fraction(2 * e * t + t * t), Fraction(-e * t * t)]
    report.results["charpoly_T2"] = _exact(poly)
    report.add("charpoly_roots", poly == expected, {"expected": _exact(expected)})
    report.add("tau_oracle", ramanujan_tau(data["n"]) == t, {"tau": ramanujan_tau(data["n"])})
    report.add("eisenstein_eigenvalue", sigma(data["n"], data["k"] - 1) == e)
    report.add("congruence_mod_691", (e - t) % data["ell"] == 0, {"difference": e - t})


def _reproduce_5_1(ctx: CommandContext, report: CommandReport):
    data = EXAMPLE_5_1
    k, p, eps, ell = data["k"], data["p"], data["eps"], data["ell"]
    _t1_report(report, k, p, eps, ell, ctx)
    for n, value in data["eisenstein_targets"].items():
        report.add(f"sigma_{k - 1}({n})", sigma(n, k - 1) == value, {"value": sigma(n, k - 1)})
        a_n = data["newform"][n]
        report.add(f"newform_a{n}_congruence", (a_n - value) % ell == 0, {"a_n": a_n})


def _reproduce_5_2(ctx: CommandContext, report: CommandReport):
    data = EXAMPLE_5_2
    k, p, eps, ell = data["k"], data["p"], data["eps"], data["ell"]
    conditions = t1_conditions(k, p, eps, ell)
    report.results.update(case=conditions.case, conditions=conditions.checks, witnesses=conditions.witnesses)
    if conditions.ok and conditions.divides_plus:
        with ctx.timed("eisenstein_eigenspace"):
            eigen, reduced = eisenstein_eigenspace_mod(k, p, eps, ell, ctx.realization)
        report.results.update(eisenstein_eigenspace_dim=eigen.dim,
                              eigenvector_congruence_forced=eigen.dim == 1,
                              reduced_class_nonzero=not reduced.is_zero(),
                              identity_coset_matches=identity_coset_comparison(eigen, reduced))


def _components_equal(P, expected: Dict[tuple, tuple]) -> Dict[str, bool]:
    result = {}
    for (c, d), coeffs in expected.items():
        label = canonical(c, d, P.N)
        result[str(label)] = [Fraction(x) for x in P[label]] == [Fraction(x) for x in coeffs]
    return result


def _proportional_mod(P, Q, ell: int) -> bool:
    """P ≡ λQ mod ℓ for a unit λ."""
    u = [x for x in P.reduce_mod(ell).to_vector()]
    v = [x for x in Q.reduce_mod(ell).to_vector()]
    pivot = next((i for i, x in enumerate(v) if int(x) % ell), None)
    if pivot is None or int(u[pivot]) % ell == 0:
        return False
    scale = int(u[pivot]) * pow(int(v[pivot]), -1, ell)
    return all((int(a) - scale * int(b)) % ell == 0 for a, b in zip(u, v))


def _reproduce_5_3(ctx: CommandContext, report: CommandReport):
    data = EXAMPLE_5_3
    k, p, eps, ell = data["k"], data["p"], data["eps"], data["ell"]
    with ctx.timed("newform_eigendata"):
        g = rational_newform_eigendata(p, k, data["g_selector"], realization=ctx.realization)
    report.results["g"] = g.to_json()
    for n, value in data["g_eigenvalues"].items():
        report.add(f"g_lambda_{n}", g.eigenvalues.get(n) == value,
                   {"value": format_rational(g.eigenvalues[n]) if n in g.eigenvalues else None})
    report.add("g_atkin_lehner_sign", g.al_signs.get(p) == data["g_al_sign"], {"al_signs": g.al_signs.get(p)})
    report.add("g_denominator", g.den == data["g_den"], {"den": g.den})
    matches = _components_equal(g.components, data["g_components"])
    report.add("g_components_exact", all(matches.values()), matches)

    eis = eis_plus(p, EpsSystem.uniform(p, eps), k - 2)
    report.add(f"g_congruent_to_eisenstein_mod_{ell}", _proportional_mod(g.components, eis, ell))

    raise_data = data["raise"]
    _t3_report(report, raise_data["M"], raise_data["p"], raise_data["k"], raise_data["eps"],
               raise_data["ell"], g, ctx)
    for n in (3, 5):
        a_n = data["raised_newform"][n]
        report.add(f"raised_newform_a{n}_congruence",
                   (Fraction(a_n) - g.eigenvalues[n]).numerator % raise_data["ell"] == 0, {"a_n": a_n})


def _reproduce_t2(ctx: CommandContext, report: CommandReport):
    for case in T2_CASES:
        result = _t2_report(report, case["N"], case["p"], case["w"], case["ell"], ctx, prefix="case_")
        if result.anomaly != case["anomaly"]:
            logger.warning(f"Reduction anomaly for {case}: dimQ={result.dim_q} dimF={result.dim_fl}")


REPRODUCERS = {
    "5.1": _reproduce_5_1,
    "5.2": _reproduce_5_2,
    "5.3": _reproduce_5_3,
    "ramanujan": _reproduce_ramanujan,
    "t2": _reproduce_t2,
}


def cmd_reproduce(ctx: CommandContext) -> CommandReport:
    example = ctx.args.example
    report = ctx.report("reproduce", example=example, realization=ctx.realization)
    REPRODUCERS[example](ctx, report)
    return report


# ── Parser ────────────────────────────────────────────────────────────────────

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to JSON configuration file")
    common.add_argument("--json", action="store_true", help="JSON output (default)")
    common.add_argument("--format", choices=["json", "table"], help="Output format (default: from config)")
    common.add_argument("--out", help="Write the report to FILE instead of stdout")
    common.add_argument("--metrics-file", help="Export Prometheus metrics to this textfile")
    common.add_argument("--timings", action="store_true", help="Include wall-clock timings in the report")
    common.add_argument("--realization", choices=["ceil", "nearest"], help="Hecke element construction")

    space = argparse.ArgumentParser(add_help=False)
    space.add_argument("--level", "-N", type=int, help="Level N")
    space.add_argument("--weight", "-k", "--k", dest="weight", type=int, help="Modular weight k = w+2")
    space.add_argument("--w", type=int, help="Polynomial degree w")
    space.add_argument("--mod", help="Coefficient field: Q (default) or a prime")

    parser = argparse.ArgumentParser(
        prog="periods",
        description="Period polynomials for Γ₀(N): spaces, Hecke and Atkin-Lehner operators, congruences",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    sub = parser.add_subparsers(dest="command", help="Command to run")
    parents = [common, space]

    # dim
    sub.add_parser("dim", parents=parents, help="Dimensions of W, W+ and W-")

    # basis
    p = sub.add_parser("basis", parents=parents, help="Basis of W or one parity part")
    p.add_argument("--parity", type=_signed_unit, help="+1 for W+, -1 for W-")

    # hecke-matrix
    p = sub.add_parser("hecke-matrix", parents=parents, help="Matrix of T_n on W")
    p.add_argument("--n", type=int, help="Hecke index, coprime to N")

    # al-matrix
    p = sub.add_parser("al-matrix", parents=parents, help="Matrix of the normalized Atkin-Lehner operator")
    p.add_argument("--q", "--Q", dest="q", type=int, help="Exact divisor Q of N (default: N)")

    # eisenstein
    p = sub.add_parser("eisenstein", parents=parents, help="Eisenstein period polynomial")
    p.add_argument("--eps", help="Atkin-Lehner signs: +1, -1 or p=±1,q=±1")
    p.add_argument("--parity", type=_signed_unit, help="+1 even class (default), -1 odd identity-coset value")
    p.add_argument("--cross-check", action="store_true", help="Compare with the Atkin-Lehner sum")

    # trace
    p = sub.add_parser("trace", parents=parents, help="Trace to a lower level")
    p.add_argument("--to", type=int, help="Target level M dividing N")

    # new-dim
    p = sub.add_parser("new-dim", parents=parents, help="Dimension of the p-new subspace")
    p.add_argument("--p", type=int, help="Prime exactly dividing N")
    p.add_argument("--parity", type=_signed_unit, help="Restrict to W+ (+1) or W- (-1)")
    p.add_argument("--al-sign", "--eps", dest="al_sign", type=_signed_unit, help="Atkin-Lehner sign at p")

    # verify-t1
    p = sub.add_parser("verify-t1", parents=parents, help="Eisenstein congruence at prime level")
    p.add_argument("--p", type=int, help="Prime level")
    p.add_argument("--eps", type=_signed_unit, help="Atkin-Lehner sign")
    p.add_argument("--ell", type=int, help="Prime modulus")

    # verify-t2
    p = sub.add_parser("verify-t2", parents=parents, help="Surjectivity of reduction on p-new subspaces")
    p.add_argument("--p", type=int, help="Prime exactly dividing N")
    p.add_argument("--ell", type=int, help="Prime modulus")

    # verify-t3
    p = sub.add_parser("verify-t3", parents=parents, help="Level raising of a rational eigenform")
    p.add_argument("--p", type=int, help="New prime, not dividing the level")
    p.add_argument("--eps", type=_signed_unit, help="Atkin-Lehner sign at p")
    p.add_argument("--ell", type=int, help="Prime modulus")
    p.add_argument("--selector", type=_selector, help="Eigenform selector n=λ_n, e.g. 2=-10")

    # scan-t1
    p = sub.add_parser("scan-t1", parents=[common], help="Scan weights and primes for Eisenstein congruences")
    p.add_argument("--k-range", type=_int_range, help="Weights, e.g. 4-20")
    p.add_argument("--p-range", type=_int_range, help="Levels, e.g. 2-100")
    p.add_argument("--verify", action="store_true", help="Run verify-t1 on every hit")
    p.add_argument("--checkpoint", help="JSON checkpoint file")
    p.add_argument("--resume", action="store_true", help="Resume from the checkpoint")

    # reproduce
    p = sub.add_parser("reproduce", parents=[common], help="Reproduce a worked example")
    p.add_argument("--example", choices=EXAMPLES, required=True, help="Example to reproduce")

    return parser


COMMANDS = {
    "dim": cmd_dim,
    "basis": cmd_basis,
    "hecke-matrix": cmd_hecke_matrix,
    "al-matrix": cmd_al_matrix,
    "eisenstein": cmd_eisenstein,
    "trace": cmd_trace,
    "new-dim": cmd_new_dim,
    "verify-t1": cmd_verify_t1,
    "verify-t2": cmd_verify_t2,
    "verify-t3": cmd_verify_t3,
    "scan-t1": cmd_scan_t1,
    "reproduce": cmd_reproduce,
}


# ── Output ────────────────────────────────────────────────────────────────────

def render(report: CommandReport, ctx: CommandContext) -> str:
    args = ctx.args
    fmt = "json" if args.json else (args.format or ctx.config.get("output", "format", default="json"))
    if fmt == "table":
        return ReportRenderer().render(report.to_dict())
    indent = ctx.config.get("output", "indent", default=2)
    return report.to_json(indent=indent) + "\n"


def emit(text: str, out: Optional[str]):
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one subcommand and print its report

    Returns:
        0 if every assertion passed, 1 if one failed or the computation broke down,
        2 on usage or precondition errors
    """
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        config = ConfigManager(args.config)
    except SystemExit:
        return EXIT_USAGE
    apply_config(config)
    configure_solver(config.get("hecke", "solver_max_bound", default=4))

    metrics_file = args.metrics_file or config.get("metrics", "textfile")
    metrics = ComputationMetrics() if (metrics_file or config.get("metrics", "enabled", default=False)) else None
    ctx = CommandContext(args, config, metrics)

    try:
        report = COMMANDS[args.command](ctx)
    except ValueError as e:
        logger.error(f"{args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED

    if args.timings:
        report.timings = {k: round(v, 6) for k, v in sorted(ctx.timings.items())}
    if metrics:
        for assertion in report.assertions:
            metrics.record_assertion(args.command, assertion.passed)
        if metrics_file:
            metrics.write(metrics_file)

    emit(render(report, ctx), args.out)
    failed = [a.name for a in report.assertions if not a.passed]
    if failed:
        logger.warning(f"{args.command}: {len(failed)} assertion(s) failed: {', '.join(failed)}")
        return EXIT_FAILED
    logger.info(f"{args.command}: {len(report.assertions)} assertion(s) passed")
    return EXIT_OK
