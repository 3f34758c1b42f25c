"""Exact existence deciders for Cano-type conditionals.

Unknowns are the masses x_C of every candidate set C over the joint frame
whose projection onto p is all of Ξ_p, i.e. C meets every fiber {ξ} × Ξ_rest.
Such a C never conflicts with the vacuously extended marginal m↓p, so the
combination is linear in x:

    (m↓p ⊕ cond)(S) = Σ_C x_C Σ_{A : A↑ ∩ C = S} m↓p(A).

Two systems are built from this: per-variable marginals equal to those of m
(``cano_conditional_exists``) or the full joint equal to m
(``decomposition_exists``). Both are solved over ``Fraction`` either by a
phase-one simplex with Bland's rule or by enumerating basic solutions.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

from .config import DEFAULT_LIMITS, Limits
from .conditionals import combine_with_marginal, is_cano_type, is_marginally_consistent, split_variables
from .errors import CapacityError, EvidenceError, MassError
from .frames import FocalSet, cylinder, project_set, projection_map
from .mass import MassFunction, marginalize

logger = logging.getLogger(__name__)


class Method(str, Enum):
    LINEAR = "linear-feasibility"
    EXHAUSTIVE = "exhaustive"


class Verdict(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class ExistenceCertificate:
    verdict: Verdict
    method: Method
    witness: MassFunction | None = None
    candidates: int = 0

    @property
    def feasible(self) -> bool:
        return self.verdict is Verdict.FEASIBLE


# ==== exact linear algebra ====


def solve_exact(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Unique solution of a linear system by Gauss-Jordan elimination.

    Returns None when the system is inconsistent or its columns are dependent.
    """
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivot_row = 0
    for col in range(n):
        pivot = next((i for i in range(pivot_row, len(aug)) if aug[i][col] != 0), None)
        if pivot is None:
            return None
        aug[pivot_row], aug[pivot] = aug[pivot], aug[pivot_row]
        lead = aug[pivot_row][col]
        aug[pivot_row] = [v / lead for v in aug[pivot_row]]
        for i in range(len(aug)):
            if i != pivot_row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[pivot_row])]
        pivot_row += 1
    if any(row[-1] != 0 for row in aug[pivot_row:]):
        return None
    return [aug[i][-1] for i in range(n)]


def simplex_feasible(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """A vertex of {x ≥ 0 : A x = b}, or None when the polytope is empty.

    Phase one of the tableau simplex with one artificial per row; Bland's rule
    picks the lowest-index entering column and breaks ratio ties by the
    lowest basic index, which rules out cycling.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    tableau = []
    for i, (row, b) in enumerate(zip(rows, rhs)):
        sign = -1 if b < 0 else 1
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        tableau.append([sign * Fraction(v) for v in row] + artificial + [sign * Fraction(b)])
    basis = [n + i for i in range(m)]
    cost = [-sum((tableau[i][j] for i in range(m)), Fraction(0)) for j in range(n)] + [Fraction(0)] * m
    cost.append(-sum((tableau[i][-1] for i in range(m)), Fraction(0)))

    pivots = 0
    while True:
        entering = next((j for j in range(n + m) if cost[j] < 0), None)
        if entering is None:
            break
        ratios = [
            (tableau[i][-1] / tableau[i][entering], basis[i], i) for i in range(m) if tableau[i][entering] > 0
        ]
        if not ratios:
            break
        _, _, leaving = min(ratios)
        lead = tableau[leaving][entering]
        tableau[leaving] = [v / lead for v in tableau[leaving]]
        for i in range(m):
            if i != leaving and tableau[i][entering] != 0:
                f = tableau[i][entering]
                tableau[i] = [a - f * b for a, b in zip(tableau[i], tableau[leaving])]
        f = cost[entering]
        cost = [a - f * b for a, b in zip(cost, tableau[leaving])]
        basis[leaving] = entering
        pivots += 1

    logger.debug("simplex phase one: %d pivot(s), residual %s", pivots, -cost[-1])
    if cost[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = tableau[i][-1]
    return x


def vertex_feasible(
    rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction], limits: Limits = DEFAULT_LIMITS
) -> list[Fraction] | None:
    """Search the basic solutions of {x ≥ 0 : A x = b} one column subset at a time."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    width = min(m, n)
    total = sum(math.comb(n, k) for k in range(1, width + 1))
    if total > limits.vertex_combinations_max:
        raise CapacityError(
            f"vertex enumeration needs {total} column subsets, above the limit {limits.vertex_combinations_max}"
        )
    for k in range(1, width + 1):
        for cols in itertools.combinations(range(n), k):
            sub = [[row[j] for j in cols] for row in rows]
            solution = solve_exact(sub, rhs)
            if solution is not None and all(v >= 0 for v in solution):
                x = [Fraction(0)] * n
                for j, v in zip(cols, solution):
                    x[j] = v
                return x
    return None


# ==== candidate systems ====


def candidate_sets(m: MassFunction, p: Iterable[str], limits: Limits = DEFAULT_LIMITS) -> list[FocalSet]:
    """Every subset of the joint frame whose projection onto p is the whole p-frame."""
    frame = m.frame
    if frame.size > limits.existence_frame_max:
        raise CapacityError(f"|Ξ| = {frame.size} exceeds the existence limit {limits.existence_frame_max}")
    p_names, _ = split_variables(frame, p)
    pmap = projection_map(frame, p_names)
    fibers: dict[int, list[int]] = defaultdict(list)
    for i, xi in enumerate(pmap):
        fibers[xi].append(i)
    fiber_size = len(fibers[0])
    count = ((1 << fiber_size) - 1) ** len(fibers)
    if count > limits.existence_candidates_max:
        raise CapacityError(f"{count} candidate sets exceed the limit {limits.existence_candidates_max}")
    choices = []
    for xi in sorted(fibers):
        members = fibers[xi]
        choices.append(
            [sum(1 << members[k] for k in range(fiber_size) if sel >> k & 1) for sel in range(1, 1 << fiber_size)]
        )
    return sorted(
        (FocalSet(frame, sum(combo)) for combo in itertools.product(*choices)), key=lambda f: f.sort_key
    )


def _pieces(marginal: MassFunction, candidate: FocalSet) -> dict[FocalSet, Fraction]:
    out: dict[FocalSet, Fraction] = defaultdict(Fraction)
    for a, v in marginal.items():
        out[cylinder(a, candidate.frame) & candidate] += v
    return out


def _system(
    targets: dict[Hashable, Fraction], columns: list[dict[Hashable, Fraction]]
) -> tuple[list[int], list[list[Fraction]], list[Fraction]]:
    """Rows over the target keys plus Σx = 1, restricted to the columns that can be nonzero.

    Coefficients are nonnegative, so a column with weight on a key whose
    target is zero must itself be zero and is dropped.
    """
    live = [i for i, col in enumerate(columns) if all(targets.get(k, 0) > 0 for k, v in col.items() if v > 0)]
    keys = [k for k, v in targets.items() if v > 0]
    rows = [[columns[i].get(k, Fraction(0)) for i in live] for k in keys]
    rhs = [targets[k] for k in keys]
    rows.append([Fraction(1)] * len(live))
    rhs.append(Fraction(1))
    logger.debug("%d of %d candidate columns survive presolve, %d rows", len(live), len(columns), len(rows))
    return live, rows, rhs


def _decide(
    m: MassFunction,
    p: Iterable[str],
    keyed,
    targets: dict[Hashable, Fraction],
    method: Method,
    limits: Limits,
) -> ExistenceCertificate:
    if not m.is_proper:
        raise MassError("existence deciders need a proper mass function")
    p = tuple(p)
    candidates = candidate_sets(m, p, limits)
    marginal = marginalize(m, m.frame.ordered(p))
    columns = [keyed(_pieces(marginal, c)) for c in candidates]
    live, rows, rhs = _system(targets, columns)
    if method is Method.LINEAR:
        x = simplex_feasible(rows, rhs)
    else:
        x = vertex_feasible(rows, rhs, limits)
    if x is None:
        return ExistenceCertificate(Verdict.INFEASIBLE, method, None, len(candidates))
    witness = MassFunction(m.frame, [(candidates[i], v) for i, v in zip(live, x) if v > 0])
    return ExistenceCertificate(Verdict.FEASIBLE, method, witness, len(candidates))


def cano_conditional_exists(
    m: MassFunction, p: Iterable[str], method: Method | str = Method.LINEAR, *, limits: Limits = DEFAULT_LIMITS
) -> ExistenceCertificate:
    """Decide whether some Cano-type conditional reproduces every single-variable marginal of m."""
    method, p = Method(method), tuple(p)
    names = m.frame.names

    def keyed(pieces):
        out: dict[Hashable, Fraction] = defaultdict(Fraction)
        for s, v in pieces.items():
            for name in names:
                out[(name, project_set(s, [name]).bits)] += v
        return out

    targets = {(name, f.bits): v for name in names for f, v in marginalize(m, [name]).items()}
    cert = _decide(m, p, keyed, targets, method, limits)
    if cert.feasible and not (is_cano_type(cert.witness, p) and is_marginally_consistent(m, p, cert.witness)):
        raise EvidenceError("solver witness failed re-validation as a marginally consistent conditional")
    logger.info("marginally consistent conditional given %s: %s (%s)", ",".join(p), cert.verdict.value, method.value)
    return cert


def decomposition_exists(
    m: MassFunction, p: Iterable[str], method: Method | str = Method.LINEAR, *, limits: Limits = DEFAULT_LIMITS
) -> ExistenceCertificate:
    """Decide whether m = m↓p ⊕ cond exactly for some Cano-type conditional."""
    method, p = Method(method), tuple(p)

    def keyed(pieces):
        return {s.bits: v for s, v in pieces.items()}

    targets = {f.bits: v for f, v in m.items()}
    cert = _decide(m, p, keyed, targets, method, limits)
    if cert.feasible and not (is_cano_type(cert.witness, p) and combine_with_marginal(m, p, cert.witness) == m):
        raise EvidenceError("solver witness failed re-validation as an exact decomposition")
    logger.info("exact decomposition given %s: %s (%s)", ",".join(p), cert.verdict.value, method.value)
    return cert
