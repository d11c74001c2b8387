#!/usr/bin/env python3
"""
Repring workbench command line.

Every subcommand prints one JSON document (a CommandResult, or an ErrorResult
on failure) to stdout; logs go to stderr. Exit codes: 0 success, 1 verified
negative answer, 2 undecided within the search bound, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NoReturn

import structlog
from sympy import Poly, Symbol, SympifyError, sympify

from characters import (
    ClassFunction,
    VirtualCharacter,
    character_table,
    from_cyclic,
    mackey_audit,
    to_cyclic,
)
from config import Settings, get_settings
from cyclicring import CyclicRingElem
from cyclotomic import cyclotomic, format_poly, psi_idempotent
from errors import InputError, WorkbenchError
from groups import (
    PermGroup,
    cyclic_class_representatives,
    eppo_witness,
    parse_group,
    parse_subgroup,
    subgroups,
)
from homalg import (
    FPModule,
    is_flat,
    kunneth_ends,
    parse_module,
    parse_ring,
    tor1,
    tor1_by_invariants,
    verify_ses,
)
from lifting import assemble_and_glue, brauer_coefficients
from localization import (
    MultSet,
    UnitAnswer,
    UnitProfile,
    certificates_equal,
    is_unit,
    model_kgroups,
    restricted_profile,
)
from models import (
    CharacterRow,
    ClassInfo,
    CommandResult,
    ErrorDetail,
    ErrorResult,
    GroupSummary,
    Verdict,
    VerificationEntry,
)

logger = structlog.get_logger(__name__)

T = Symbol("t")


def configure_logging(settings: Settings, level: str | None = None) -> None:
    """structlog over the stdlib root logger, writing to stderr."""
    logging.basicConfig(
        stream=sys.stderr,
        format="%(message)s",
        level=getattr(logging, (level or settings.log_level).upper()),
        force=True,
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.dev.ConsoleRenderer(colors=False)
            if settings.log_format == "console"
            else structlog.processors.JSONRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )


# ---------------------------------------------------------------------------
# Input parsing
# ---------------------------------------------------------------------------


def parse_polynomial(text: str) -> list[Fraction]:
    """Coefficients (constant first) of a polynomial in t with rational coefficients."""
    try:
        expr = sympify(text, locals={"t": T})
        poly = Poly(expr, T)
    except (SympifyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot parse polynomial {text!r}") from exc
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        if not c.is_Rational:
            raise InputError(f"coefficient {c} of {text!r} is not rational")
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return coeffs


def parse_element(H: PermGroup, text: str) -> ClassFunction:
    """A polynomial in t (H cyclic, t for its generator) or a JSON list of coordinates."""
    stripped = text.strip()
    if stripped.startswith("["):
        coords = _json_ints(stripped)
        return VirtualCharacter.from_coords(H, coords).class_function
    if not H.is_cyclic:
        raise InputError(f"{H.label} is not cyclic; give irreducible coordinates instead")
    x = CyclicRingElem.from_coeffs(H.order, parse_polynomial(stripped))
    return from_cyclic(x, H)


def _json_ints(text: str) -> list[int]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {text!r}") from exc
    if not isinstance(data, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in data
    ):
        raise InputError(f"expected a list of integers: {text!r}")
    return data


def parse_profile(G: PermGroup, text: str) -> MultSet:
    """
    ';'-separated generators: an integer, a JSON list of irreducible coordinates,
    or `values:` followed by comma-separated class values.
    """
    gens: list[ClassFunction] = []
    for part in (p.strip() for p in text.split(";")):
        if not part:
            continue
        if part.startswith("values:"):
            try:
                values = [Fraction(v.strip()) for v in part[7:].split(",")]
            except ValueError as exc:
                raise InputError(f"bad class values in {part!r}") from exc
            gens.append(ClassFunction.from_rationals(G, values))
        elif part.startswith("["):
            gens.append(VirtualCharacter.from_coords(G, _json_ints(part)).class_function)
        else:
            try:
                gens.append(ClassFunction.constant(G, int(part)))
            except ValueError as exc:
                raise InputError(f"bad profile generator {part!r}") from exc
    return MultSet(G, tuple(gens))


# ---------------------------------------------------------------------------
# Payload helpers
# ---------------------------------------------------------------------------


@dataclass
class Outcome:
    inputs: dict[str, Any]
    outputs: dict[str, Any]
    verification: list[VerificationEntry] = field(default_factory=list)
    exit_code: int = 0


def _frac(x: Fraction | int) -> int | str:
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def _answer_payload(answer: UnitAnswer) -> dict[str, Any]:
    return {
        "verdict": answer.verdict.value,
        "bound": answer.bound,
        "detail": answer.describe(),
    }


def _exit_for(answer: UnitAnswer) -> int:
    if answer.is_nonunit:
        return 1
    return 0 if answer.is_unit else 2


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_group(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    summary = GroupSummary(
        name=args.group,
        order=G.order,
        degree=G.degree,
        generators=[g.cycle_notation() for g in G.generators],
        exponent=G.exponent,
        is_abelian=G.is_abelian,
        is_cyclic=G.is_cyclic,
        is_eppo=eppo_witness(G) is None,
        classes=[
            ClassInfo(
                representative=c.representative.cycle_notation(),
                size=c.size,
                order=c.element_order,
            )
            for c in G.classes
        ],
        subgroup_count=len(subgroups(G)),
    )
    return Outcome({"group": args.group}, summary.model_dump())


def cmd_eppo(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    witness = eppo_witness(G)
    outputs: dict[str, Any] = {"eppo": witness is None}
    if witness is not None:
        outputs["witness_order"] = witness.order()
        outputs["witness"] = witness.cycle_notation()
    return Outcome({"group": args.group}, outputs)


def cmd_chartab(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    table = character_table(G)
    outputs = {
        "classes": [
            ClassInfo(
                representative=c.representative.cycle_notation(),
                size=c.size,
                order=c.element_order,
            ).model_dump()
            for c in G.classes
        ],
        "value_level": G.value_level,
        "irreducibles": [
            CharacterRow(degree=int(chi.degree()), values=chi.describe()).model_dump()
            for chi in table.irreducibles
        ],
    }
    checks = [
        VerificationEntry(check="orthogonality", passed=table.check_orthogonality()),
        VerificationEntry(
            check="degree_sum",
            passed=sum(d * d for d in table.degrees) == G.order,
            detail=f"sum of squared degrees vs order {G.order}",
        ),
    ]
    return Outcome({"group": args.group}, outputs, checks)


def cmd_psi(args: argparse.Namespace) -> Outcome:
    psi = psi_idempotent(args.k, args.n)
    square = psi * psi
    checks = [VerificationEntry(check="idempotent", passed=square.coeffs == psi.coeffs)]
    outputs = {"psi": [_frac(c) for c in psi.coeffs], "text": str(psi)}
    return Outcome({"k": args.k, "n": args.n}, outputs, checks)


def cmd_phi(args: argparse.Namespace) -> Outcome:
    if args.n < 1:
        raise InputError("n must be positive")
    phi = cyclotomic(args.n)
    return Outcome({"n": args.n}, {"phi": list(phi.coeffs), "text": format_poly(phi.coeffs)})


def cmd_mackey_audit(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    tally = mackey_audit(G)
    checks = [
        VerificationEntry(
            check=name,
            passed=t.passed,
            detail=f"{t.checked} checked"
            + (f", first failure {t.first_failure}" if t.failed else ""),
        )
        for name, t in tally.items()
    ]
    outputs = {name: {"checked": t.checked, "failed": t.failed} for name, t in tally.items()}
    return Outcome({"group": args.group}, outputs, checks)


def cmd_brauer(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    decomposition = brauer_coefficients(G)
    outputs = {
        "coefficients": [
            {"subgroup": H.label, "order": H.order, "coords": list(phi.coords)}
            for H, phi in decomposition.entries.items()
        ]
    }
    checks = [VerificationEntry(check="sum_of_inductions_is_one", passed=decomposition.verify())]
    return Outcome({"group": args.group}, outputs, checks)


def cmd_certify(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    S = parse_profile(G, args.profile)
    inputs: dict[str, Any] = {"group": args.group, "profile": args.profile, "bound": args.bound}
    tables = []
    for H in cyclic_class_representatives(G):
        restricted = restricted_profile(S, H)
        tables.append(
            {
                "subgroup": H.label,
                "order": H.order,
                "generators": [str(to_cyclic(g)) for g in restricted.generators],
            }
        )
    outputs: dict[str, Any] = {
        "group": G.label,
        "generators": S.coordinates(),
        "divisible_primes": UnitProfile(S).divisible_primes,
        "cyclic_subgroups": tables,
        "kgroups": [k.model_dump() for k in model_kgroups(S)],
    }
    checks: list[VerificationEntry] = []
    exit_code = 0
    if args.element:
        K = parse_subgroup(G, args.subgroup) if args.subgroup else G.whole
        f = parse_element(K, args.element)
        inputs.update(element=args.element, subgroup=K.label)
        answer = is_unit(f, restricted_profile(S, K), args.bound)
        outputs["unit_query"] = _answer_payload(answer)
        checks.append(_answer_check(answer, f, restricted_profile(S, K)))
        exit_code = _exit_for(answer)
    if args.compare is not None:
        S2 = parse_profile(G, args.compare)
        inputs["compare"] = args.compare
        comparison = certificates_equal(S, S2, args.bound)
        outputs["comparison"] = {
            "verdict": comparison.verdict.value,
            "detail": comparison.describe(),
            "undecided": comparison.undecided_count,
        }
        if comparison.verdict is Verdict.DISTINCT and comparison.answer is not None:
            source, target = (S, S2) if comparison.side == "first" else (S2, S)
            assert comparison.generator_index is not None
            g = source.generators[comparison.generator_index]
            checks.append(_answer_check(comparison.answer, g, target))
        if comparison.verdict is Verdict.UNDECIDED:
            exit_code = max(exit_code, 2)
    return Outcome(inputs, outputs, checks, exit_code)


def _answer_check(answer: UnitAnswer, f: ClassFunction, S: MultSet) -> VerificationEntry:
    if answer.witness is not None:
        return VerificationEntry(
            check="unit_witness", passed=answer.witness.verify(f, S), detail=answer.describe()
        )
    if answer.certificate is not None:
        return VerificationEntry(
            check="nonunit_certificate",
            passed=answer.certificate.verify(f, S),
            detail=answer.describe(),
        )
    return VerificationEntry(check="undecided", passed=True, detail=answer.describe())


def cmd_lift(args: argparse.Namespace) -> Outcome:
    G = parse_group(args.group)
    K = parse_subgroup(G, args.subgroup)
    S = parse_profile(G, args.profile)
    f = parse_element(K, args.element)
    result = assemble_and_glue(G, K, f, UnitProfile(S), args.bound)
    outputs = {
        "f_tilde": list(result.f_tilde.coords),
        "multiplier": str(result.multiplier),
        "primes": result.primes,
        "families": [
            {
                "prime": fam.prime,
                "members": len(fam.entries),
                "identity_value": str(fam[fam.members()[0]].degree()),
            }
            for fam in result.families
        ],
        "brauer": [
            {"subgroup": H.label, "coords": list(phi.coords)}
            for H, phi in result.brauer.entries.items()
        ],
    }
    inputs = {
        "group": args.group,
        "subgroup": K.label,
        "element": args.element,
        "profile": args.profile,
        "bound": args.bound,
    }
    return Outcome(inputs, outputs, result.verification)


def _modules(args: argparse.Namespace) -> tuple[FPModule, FPModule]:
    ring = parse_ring(args.ring)
    return parse_module(ring, args.m), parse_module(ring, args.n)


def cmd_tor(args: argparse.Namespace) -> Outcome:
    M, N = _modules(args)
    result = tor1(M, N)
    moved, moves = M.random_unimodular_moves(args.seed)
    checks = [
        VerificationEntry(
            check="invariant_oracle", passed=result.is_isomorphic(tor1_by_invariants(M, N))
        ),
        VerificationEntry(check="symmetry", passed=result.is_isomorphic(tor1(N, M))),
        VerificationEntry(
            check="presentation_independence",
            passed=result.is_isomorphic(tor1(moved, N)),
            detail="; ".join(moves) or "no moves applied",
        ),
    ]
    outputs = {
        "tor": result.describe(),
        "m": M.describe(),
        "n": N.describe(),
        "m_flat": is_flat(M),
    }
    inputs = {"ring": args.ring, "m": args.m, "n": args.n, "seed": args.seed}
    return Outcome(inputs, outputs, checks)


def cmd_kunneth(args: argparse.Namespace) -> Outcome:
    M, N = _modules(args)
    left, right = kunneth_ends(M, N)
    outputs: dict[str, Any] = {"tensor": left.describe(), "tor": right.describe()}
    checks: list[VerificationEntry] = []
    exit_code = 0
    inputs = {"ring": args.ring, "m": args.m, "n": args.n}
    if args.middle is not None:
        middle = parse_module(M.ring, args.middle)
        report = verify_ses((left, right), middle)
        outputs["ses"] = report.summary().model_dump()
        inputs["middle"] = args.middle
        checks = [
            VerificationEntry(check="rank_additive", passed=report.rank_additive),
            VerificationEntry(
                check="torsion_multiplicative",
                passed=report.torsion_multiplicative,
                detail=f"|middle| = {middle.torsion_order()}, "
                f"|ends| = {left.torsion_order()} * {right.torsion_order()}",
            ),
            VerificationEntry(check="split_forced", passed=report.split_forced),
        ]
        exit_code = 0 if report.consistent else 1
    return Outcome(inputs, outputs, checks, exit_code)


COMMANDS: dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "group": cmd_group,
    "eppo": cmd_eppo,
    "chartab": cmd_chartab,
    "psi": cmd_psi,
    "phi": cmd_phi,
    "mackey-audit": cmd_mackey_audit,
    "brauer": cmd_brauer,
    "certify": cmd_certify,
    "lift": cmd_lift,
    "tor": cmd_tor,
    "kunneth": cmd_kunneth,
}


# ---------------------------------------------------------------------------
# Argument parsing and the entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise InputError(message)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--human", action="store_true", help="indented output")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing")
    common.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        default=None,
        help="override LOG_LEVEL",
    )
    common.add_argument("--bound", type=int, default=settings.unit_bound)
    common.add_argument("--seed", type=int, default=settings.default_seed)

    parser = _Parser(prog="repring", description="Repring workbench command line.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in ("group", "eppo", "chartab", "mackey-audit", "brauer"):
        sub.add_parser(name, parents=[common]).add_argument("--group", required=True)
    psi = sub.add_parser("psi", parents=[common])
    psi.add_argument("--k", type=int, required=True)
    psi.add_argument("--n", type=int, required=True)
    sub.add_parser("phi", parents=[common]).add_argument("--n", type=int, required=True)
    certify = sub.add_parser("certify", parents=[common])
    certify.add_argument("--group", required=True)
    certify.add_argument("--profile", required=True)
    certify.add_argument("--compare", default=None)
    certify.add_argument("--subgroup", default=None)
    certify.add_argument("--element", default=None)
    lift = sub.add_parser("lift", parents=[common])
    for flag in ("--group", "--subgroup", "--element", "--profile"):
        lift.add_argument(flag, required=True)
    for name in ("tor", "kunneth"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--ring", default="z")
        p.add_argument("--m", required=True)
        p.add_argument("--n", required=True)
        if name == "kunneth":
            p.add_argument("--middle", default=None)
    return parser


def _emit(document: CommandResult | ErrorResult, human: bool) -> None:
    sys.stdout.write(document.model_dump_json(indent=2 if human else None))
    sys.stdout.write("\n")


def run(argv: Sequence[str] | None = None) -> int:
    """Parse, dispatch, print the JSON result and return the exit code."""
    settings = get_settings()
    argv = list(sys.argv[1:] if argv is None else argv)
    human = "--human" in argv
    command: str | None = None
    configure_logging(settings)
    try:
        args = build_parser(settings).parse_args(argv)
        command = args.command
        if args.log_level:
            configure_logging(settings, args.log_level)
        if args.bound < 0:
            raise InputError("--bound must be non-negative")
        started = time.perf_counter()
        outcome = COMMANDS[args.command](args)
        elapsed = int((time.perf_counter() - started) * 1000)
        result = CommandResult(
            command=args.command,
            inputs=outcome.inputs,
            outputs=outcome.outputs,
            verification=outcome.verification,
            timing_ms=elapsed if (args.timing or settings.include_timing) else None,
        )
        exit_code = outcome.exit_code
        if exit_code == 0 and not result.all_passed:
            logger.error("verification_failed", command=command)
            exit_code = 3
        logger.info("command_finished", command=command, exit_code=exit_code)
        _emit(result, human)
        return exit_code
    except WorkbenchError as exc:
        logger.warning("command_failed", command=command, kind=exc.kind, error=str(exc))
        error = ErrorDetail(type=exc.kind, message=str(exc))
        _emit(ErrorResult(command=command, error=error, exit_code=exc.exit_code), human)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        logger.exception("command_crashed", command=command)
        error = ErrorDetail(type="internal", message=str(exc))
        _emit(ErrorResult(command=command, error=error, exit_code=3), human)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
