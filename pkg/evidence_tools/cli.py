"""Command-line interface: ``python -m evidence_tools <command> ...``.

Inputs are file paths or ``-`` for standard input; ``-o`` selects the output
file (standard output by default). Domain errors exit with status 1 and a
JSON object on standard error; malformed input and usage errors exit with 2.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Callable, Sequence

from . import codec, corpus
from .cases import (
    bpa_from_cases,
    condition_by_cases,
    ingest_cases,
    load_distribution,
    load_mapping,
    mapping_variable,
    naive_serial_condition,
    probability_from_cases,
    random_set_lift,
    serial_condition,
)
from .conditionals import (
    Cover,
    Strategy,
    approximate_conditional,
    conditional_independence,
    correctness_witness,
    is_cano_type,
    is_marginally_consistent,
)
from .config import DEFAULT_LIMITS, Limits
from .errors import EvidenceError, FormatError, FrameError
from .feasibility import Method, cano_conditional_exists, decomposition_exists
from .mass import MassFunction, box_hull, classify, combine, condition_shafer, marginalize, vacuous_extend
from .network import (
    parse_evidence,
    propagate,
    reorient_for_target,
    validate_polytree,
    verify,
)

logger = logging.getLogger(__name__)

USAGE_ERRORS = (FrameError, FormatError)


# ==== I/O ====


def read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


def write_text(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def read_mass(path: str) -> MassFunction:
    """Mass JSON, or a case CSV whose bpa is taken."""
    text = read_text(path)
    if text.lstrip().startswith("{"):
        return codec.load_mass(text)
    return bpa_from_cases(ingest_cases(text))


def names(text: str) -> list[str]:
    out = [n.strip() for n in text.split(",") if n.strip()]
    if not out:
        raise argparse.ArgumentTypeError("expected a comma-separated list of variables")
    return out


def value_set(text: str) -> tuple[str, ...]:
    out = tuple(v.strip() for v in text.split("|") if v.strip())
    if not out:
        raise argparse.ArgumentTypeError("expected values separated by |")
    return out


def condition_item(text: str) -> tuple[str, tuple[str, ...]]:
    var, sep, values = text.partition("=")
    if not sep or not var.strip():
        raise argparse.ArgumentTypeError(f"condition {text!r} is not of the form VAR=v1|v2")
    return var.strip(), value_set(values)


# ==== commands ====


def cmd_bpa(args, limits):
    return codec.mass_to_json(bpa_from_cases(ingest_cases(read_text(args.cases))))


def cmd_prob(args, limits):
    return codec.mass_to_json(probability_from_cases(ingest_cases(read_text(args.cases))))


def cmd_condition(args, limits):
    if args.mode == "cases":
        result = condition_by_cases(ingest_cases(read_text(args.input)), args.var, args.set)
    else:
        result = condition_shafer(read_mass(args.input), args.var, args.set)
    return codec.mass_to_json(result)


def cmd_serial_condition(args, limits):
    table = ingest_cases(read_text(args.cases))
    procedure = naive_serial_condition if args.naive else serial_condition
    return codec.mass_to_json(procedure(table, args.cond))


def cmd_combine(args, limits):
    result, conflict = combine(read_mass(args.left), read_mass(args.right))
    document = codec.mass_to_json(result)
    document["conflict"] = codec.rational(conflict)
    return document


def cmd_marginalize(args, limits):
    return codec.mass_to_json(marginalize(read_mass(args.mass), args.vars))


def cmd_extend(args, limits):
    frame = codec.frame_from_json(codec.loads(read_text(args.frame)))
    return codec.mass_to_json(vacuous_extend(read_mass(args.mass), frame))


def cmd_classify(args, limits):
    return {"classification": classify(read_mass(args.mass), limits).value}


def cmd_hull(args, limits):
    return codec.mass_to_json(box_hull(read_mass(args.mass)))


def cmd_lift(args, limits):
    probabilities = load_distribution(read_text(args.distribution))
    mapping = load_mapping(read_text(args.mapping))
    return codec.mass_to_json(random_set_lift(probabilities, mapping, mapping_variable(args.variable, mapping)))


def cmd_approx_cond(args, limits):
    m = read_mass(args.mass)
    if args.hull:
        m = box_hull(m)
    result = approximate_conditional(m, args.given, args.strategy, args.seed, cover=args.cover, limits=limits)
    return codec.approximation_to_json(result)


def cmd_exists_cond(args, limits):
    return codec.certificate_to_json(cano_conditional_exists(read_mass(args.mass), args.given, args.solver, limits=limits))


def cmd_exists_decomp(args, limits):
    return codec.certificate_to_json(decomposition_exists(read_mass(args.mass), args.given, args.solver, limits=limits))


def cmd_check_consistency(args, limits):
    m, cond = read_mass(args.mass), read_mass(args.cond)
    return {
        "consistent": is_marginally_consistent(m, args.given, cond),
        "canoType": is_cano_type(cond, args.given),
    }


def cmd_check_correctness(args, limits):
    found = correctness_witness(read_mass(args.reference), read_mass(args.approx), joint=args.joint, limits=limits)
    return {
        "marginallyCorrect": found is None,
        "variable": None if found is None else found[0],
        "witness": None if found is None else codec.focal_to_json(found[1]),
    }


def cmd_indep(args, limits):
    return {"independent": conditional_independence(read_mass(args.mass), args.p, args.q, args.r)}


def cmd_net_validate(args, limits):
    problems = validate_polytree(codec.load_network(read_text(args.network)))
    return {"valid": not problems, "violations": problems}


def cmd_reorient(args, limits):
    net = codec.load_network(read_text(args.network))
    return codec.oriented_to_json(reorient_for_target(net, args.target, args.strategy, args.seed, limits=limits))


def cmd_propagate(args, limits):
    net = codec.load_network(read_text(args.network))
    oriented = reorient_for_target(net, args.target, args.strategy, args.seed, limits=limits)
    return codec.mass_to_json(propagate(oriented, parse_evidence(args.evidence)))


def cmd_verify(args, limits):
    net = codec.load_network(read_text(args.network))
    reference = read_mass(args.reference) if args.reference else None
    report = verify(
        net,
        parse_evidence(args.evidence),
        args.target,
        reference=reference,
        strategy=args.strategy,
        seed=args.seed,
        limits=limits,
    )
    return codec.verification_to_json(report)


def audit(limits: Limits = DEFAULT_LIMITS) -> dict:
    """Findings on the bundled instances whose verdicts are open questions."""
    forty_sixty = corpus.forty_sixty()
    cano = cano_conditional_exists(forty_sixty, ["X"], limits=limits)
    self_consistent = not cano.feasible or is_marginally_consistent(forty_sixty, ["X"], cano.witness)
    net = corpus.reverse_direction_network()
    evidence = corpus.REVERSE_DIRECTION_EVIDENCE
    return {
        "fortySixtyMarginallyConsistentConditional": {
            "given": ["X"],
            "certificate": codec.certificate_to_json(cano),
            "witnessRevalidates": self_consistent,
            "agreesWithNonExistenceClaim": not cano.feasible,
        },
        "exactDecomposition": {
            "belAnd": codec.certificate_to_json(decomposition_exists(corpus.bel_and(), ["X", "Y"], limits=limits)),
            "fortySixty": codec.certificate_to_json(decomposition_exists(forty_sixty, ["X"], limits=limits)),
        },
        "reverseDirection": {
            "evidence": {k: sorted(v) for k, v in evidence.observations.items()},
            "oneWay": codec.verification_to_json(verify(net, evidence, "X", reference=forty_sixty, limits=limits)),
            "baseline": codec.verification_to_json(
                verify(net, evidence, "X", reference=forty_sixty, baseline=True, limits=limits)
            ),
        },
    }


def cmd_audit(args, limits):
    return audit(limits)


# ==== parser ====


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evidence_tools", description="Case-based belief function toolkit.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    parser.add_argument("--max-frame", type=int, help="largest joint frame for existence deciders")
    parser.add_argument("--budget", type=int, help="node budget of the exhaustive search")
    parser.add_argument("--restarts", type=int, help="restarts of the stochastic strategy")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-o", "--output", default="-", help="output file (default: standard output)")
        p.set_defaults(handler=handler)
        return p

    def strategy_options(p: argparse.ArgumentParser, default: Strategy) -> None:
        p.add_argument("--strategy", choices=[s.value for s in Strategy], default=default.value)
        p.add_argument("--seed", type=int)

    p = command("bpa", cmd_bpa, "case CSV to mass JSON")
    p.add_argument("cases")
    p = command("prob", cmd_prob, "singleton case CSV to a probability mass JSON")
    p.add_argument("cases")

    p = command("condition", cmd_condition, "condition on VAR in SET")
    p.add_argument("input", help="case CSV (cases mode) or mass JSON / case CSV (shafer mode)")
    p.add_argument("--mode", choices=["shafer", "cases"], default="cases")
    p.add_argument("--var", required=True)
    p.add_argument("--set", required=True, type=value_set, help="values separated by |")

    p = command("serial-condition", cmd_serial_condition, "apply conditions one after another")
    p.add_argument("cases")
    p.add_argument("--cond", action="append", required=True, type=condition_item, help="VAR=v1|v2, repeatable")
    p.add_argument("--naive", action="store_true", help="intersect per-condition selections without updating")

    p = command("combine", cmd_combine, "Dempster's rule on two mass functions")
    p.add_argument("left")
    p.add_argument("right")

    p = command("marginalize", cmd_marginalize, "marginalize onto variables")
    p.add_argument("mass")
    p.add_argument("--vars", required=True, type=names)

    p = command("extend", cmd_extend, "vacuous extension onto a frame")
    p.add_argument("mass")
    p.add_argument("--frame", required=True, help="JSON with a \"variables\" list")

    p = command("classify", cmd_classify, "proper, pseudo or invalid")
    p.add_argument("mass")
    p = command("hull", cmd_hull, "replace focal sets by their box hulls")
    p.add_argument("mass")

    p = command("lift", cmd_lift, "belief induced by a distribution and a set-valued mapping")
    p.add_argument("distribution", help="CSV source,probability")
    p.add_argument("mapping", help="CSV source,values")
    p.add_argument("--variable", default="X")

    p = command("approx-cond", cmd_approx_cond, "marginally correct conditional approximation")
    p.add_argument("mass")
    p.add_argument("--given", required=True, type=names)
    p.add_argument("--hull", action="store_true", help="box-hull the input first")
    p.add_argument(
        "--cover", choices=[c.value for c in Cover], default=Cover.UNION.value,
        help="tight gives sharper conditionals that are not safe to condition on",
    )
    strategy_options(p, Strategy.GREEDY)

    for name, handler, text in (
        ("exists-cond", cmd_exists_cond, "does a marginally consistent Cano conditional exist"),
        ("exists-decomp", cmd_exists_decomp, "does an exact marginal-times-conditional decomposition exist"),
    ):
        p = command(name, handler, text)
        p.add_argument("mass")
        p.add_argument("--given", required=True, type=names)
        p.add_argument("--solver", choices=[m.value for m in Method], default=Method.LINEAR.value)

    p = command("check-consistency", cmd_check_consistency, "is a conditional marginally consistent")
    p.add_argument("mass")
    p.add_argument("--given", required=True, type=names)
    p.add_argument("--cond", required=True, help="conditional mass JSON")

    p = command("check-correctness", cmd_check_correctness, "is an approximation marginally correct")
    p.add_argument("reference")
    p.add_argument("approx")
    p.add_argument("--joint", action="store_true", help="compare on every subset of the joint frame")

    p = command("indep", cmd_indep, "conditional independence of p and q given r")
    p.add_argument("mass")
    p.add_argument("--p", required=True, type=names)
    p.add_argument("--q", required=True, type=names)
    p.add_argument("--r", required=True, type=names)

    p = command("net-validate", cmd_net_validate, "check a network JSON")
    p.add_argument("network")

    for name, handler, text in (
        ("reorient", cmd_reorient, "orient every edge toward a target"),
        ("propagate", cmd_propagate, "posterior of a target by one-way message passing"),
        ("verify", cmd_verify, "compare propagation with the exact posterior"),
    ):
        p = command(name, handler, text)
        p.add_argument("network")
        p.add_argument("--target", required=True)
        strategy_options(p, Strategy.EXHAUSTIVE)
        if name != "reorient":
            p.add_argument("--evidence", action="append", default=[], help="VAR=v1|v2, repeatable")
        if name == "verify":
            p.add_argument("--reference", help="mass JSON or case CSV holding the exact joint")

    command("audit", cmd_audit, "findings on the bundled instances")
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def report_error(exc: EvidenceError) -> None:
    document = {"error": type(exc).__name__, "message": str(exc)}
    document.update({k: v for k, v in exc.details().items() if v is not None})
    sys.stderr.write(json.dumps(document, ensure_ascii=False) + "\n")


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "strategy", None) == Strategy.STOCHASTIC.value and args.seed is None:
        parser.error("--strategy stochastic needs --seed")
    configure_logging(args.verbose)
    limits = DEFAULT_LIMITS.override(
        existence_frame_max=args.max_frame, search_budget=args.budget, stochastic_restarts=args.restarts
    )
    try:
        document = args.handler(args, limits)
        write_text(codec.dumps(document), args.output)
    except USAGE_ERRORS as exc:
        report_error(exc)
        return 2
    except EvidenceError as exc:
        report_error(exc)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
