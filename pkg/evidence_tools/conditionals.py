"""A-priori (Cano-type) conditionals and their marginally correct approximation.

Given a proper bpa ``m`` with box focals and a set ``p`` of conditioning
variables, the residual table holds

    g(A_p, A_rest) = m(A_p × A_rest) / m↓p(A_p).

Each iteration selects one positive entry per row, takes the smallest
selected value gMin, builds a cover a(ξ) of rest-configurations for every
configuration ξ of Ξ_p and puts gMin on the focal ⋃ {ξ} × a(ξ). Every row
sums to the same value at all times, so the loop ends with all rows at zero
and the conditional masses summing to one.

The cover is the union a(ξ) = ⋃ { r(A_p) : ξ ∈ A_p }. Whichever ξ of A_p is
observed later, a(ξ) still holds all of r(A_p), so conditioning the result
on the p-variables never believes more than the data. Configurations in no
row get the whole rest frame. ``Cover.TIGHT`` shrinks a(ξ) towards the
intersection of the selected sets instead; it is sharper on a single table
but is not safe to condition on, and edge reversal never uses it.

The quality q accumulates gMin · m↓p(A_p) · |r(A_p)| / |⋃_{ξ∈A_p} a(ξ)|. It
lies in (0, 1] and equals 1 exactly when every cover reproduces the
selected sets, which is when the conditional is marginally consistent.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .errors import FrameError, MassError, NonBoxFocalError, TotalConflictError
from .frames import FocalSet, JointFrame, box, projection_map
from .mass import (
    MassFunction,
    belief_table,
    combine,
    condition_on,
    marginalize,
    vacuous_extend,
)

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    GREEDY = "greedy"
    EXHAUSTIVE = "exhaustive"
    STOCHASTIC = "stochastic"


class Cover(str, Enum):
    UNION = "union"
    TIGHT = "tight"


def split_variables(frame: JointFrame, p: Iterable[str]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    p_names = frame.ordered(p)
    if not p_names:
        raise FrameError("the conditioning variables must not be empty")
    rest = tuple(n for n in frame.names if n not in p_names)
    if not rest:
        raise FrameError("the conditioning variables must leave at least one variable")
    return p_names, rest


@dataclass(frozen=True)
class ResidualTable:
    """g-values per row A_p (over the p-frame) and column A_rest (over the rest-frame)."""

    frame: JointFrame
    p_frame: JointFrame
    rest_frame: JointFrame
    marginal: MassFunction
    rows: dict[FocalSet, dict[FocalSet, Fraction]] = field(compare=False)

    def g(self, a_p: FocalSet, a_rest: FocalSet) -> Fraction:
        return self.rows.get(a_p, {}).get(a_rest, Fraction(0))

    def row_sum(self, a_p: FocalSet) -> Fraction:
        return sum(self.rows[a_p].values(), Fraction(0))


def residual_table(m: MassFunction, p: Iterable[str]) -> ResidualTable:
    if not m.is_proper:
        raise MassError("the residual table needs a proper mass function")
    frame = m.frame
    p_names, rest = split_variables(frame, p)
    p_frame, rest_frame = frame.subframe(p_names), frame.subframe(rest)
    marginal = marginalize(m, p_names)
    rows: dict[FocalSet, dict[FocalSet, Fraction]] = {}
    for focal, value in m.items():
        comps = focal.box_components()
        if comps is None:
            raise NonBoxFocalError(f"focal set {focal.describe()} is not a box; apply box_hull first")
        by_name = dict(zip(frame.names, comps))
        a_p = box({n: by_name[n] for n in p_names}, p_frame)
        a_rest = box({n: by_name[n] for n in rest}, rest_frame)
        rows.setdefault(a_p, {})[a_rest] = value / marginal[a_p]
    ordered = {
        a_p: dict(sorted(entries.items(), key=lambda kv: kv[0].sort_key))
        for a_p, entries in sorted(rows.items(), key=lambda kv: kv[0].sort_key)
    }
    return ResidualTable(frame, p_frame, rest_frame, marginal, ordered)


@dataclass(frozen=True)
class Iteration:
    selection: dict[FocalSet, FocalSet]
    cover: tuple[FocalSet, ...]
    g_min: Fraction
    focal: FocalSet
    contribution: Fraction

    def cover_union(self, a_p: FocalSet) -> FocalSet:
        rest_frame = self.cover[0].frame
        bits = 0
        for xi in a_p.indices:
            bits |= self.cover[xi].bits
        return FocalSet(rest_frame, bits)

    @property
    def is_exact(self) -> bool:
        return all(self.cover_union(a_p) == r for a_p, r in self.selection.items())


@dataclass(frozen=True)
class ApproximationTrace:
    iterations: tuple[Iteration, ...]

    def __len__(self):
        return len(self.iterations)


@dataclass(frozen=True)
class ApproximationResult:
    conditional: MassFunction
    quality: Fraction
    trace: ApproximationTrace
    strategy: Strategy
    cover: Cover = Cover.UNION


def quality(trace: ApproximationTrace, marginal: MassFunction) -> Fraction:
    q = Fraction(0)
    for it in trace.iterations:
        if set(it.selection) != set(marginal.focals):
            raise MassError("trace rows do not match the focals of the marginal")
        for a_p, r in it.selection.items():
            q += it.g_min * marginal[a_p] * len(r) / len(it.cover_union(a_p))
    return q


class _Approximator:
    """Search state shared by the strategies of :func:`approximate_conditional`."""

    def __init__(
        self,
        table: ResidualTable,
        limits: Limits,
        first_selection: Mapping[FocalSet, FocalSet] | None,
        cover: Cover = Cover.UNION,
    ):
        self.table = table
        self.limits = limits
        self.cover_fn = self.union_cover if cover is Cover.UNION else self.tight_cover
        self.row_keys = tuple(table.rows)
        self.columns = tuple(tuple(entries) for entries in table.rows.values())
        self.row_indices = tuple(tuple(a_p.indices) for a_p in self.row_keys)
        self.weights = tuple(table.marginal[a_p] for a_p in self.row_keys)
        self.p_size = table.p_frame.size
        self.rest_full = table.rest_frame.full_bits
        frame = table.frame
        self.pmap = projection_map(frame, table.p_frame.names)
        self.rmap = projection_map(frame, table.rest_frame.names)
        self.support = sorted({xi for idx in self.row_indices for xi in idx})
        self.pins = self._pins(first_selection or {})
        self.nodes = 0
        self.exhausted = False
        self.memo: dict[tuple, tuple[Fraction, tuple[Iteration, ...]]] = {}

    def _pins(self, first_selection: Mapping[FocalSet, FocalSet]) -> dict[int, int]:
        pins = {}
        for a_p, a_rest in first_selection.items():
            if a_p not in self.table.rows:
                raise MassError(f"{a_p.describe()} is not a row of the residual table")
            row = self.row_keys.index(a_p)
            if self.table.g(a_p, a_rest) <= 0:
                raise MassError(f"g({a_p.describe()}, {a_rest.describe()}) is not positive")
            pins[row] = self.columns[row].index(a_rest)
        return pins

    def initial_state(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(entries.values()) for entries in self.table.rows.values())

    @staticmethod
    def remaining(state) -> Fraction:
        return sum(state[0], Fraction(0))

    def choices(self, state, first: bool) -> list[tuple[int, ...]]:
        per_row = []
        for row, values in enumerate(state):
            if first and row in self.pins:
                per_row.append((self.pins[row],))
            else:
                per_row.append(tuple(j for j, v in enumerate(values) if v > 0))
        return per_row

    # covers

    def _unions(self, cover: Sequence[int]) -> list[int]:
        unions = []
        for idx in self.row_indices:
            bits = 0
            for xi in idx:
                bits |= cover[xi]
            unions.append(bits)
        return unions

    def _score(self, r_bits: Sequence[int], cover: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for w, r, u in zip(self.weights, r_bits, self._unions(cover)):
            total += w * Fraction(r.bit_count(), u.bit_count())
        return total

    def union_cover(self, r_bits: Sequence[int]) -> list[int]:
        cover = [0] * self.p_size
        for idx, r in zip(self.row_indices, r_bits):
            for xi in idx:
                cover[xi] |= r
        return [c or self.rest_full for c in cover]

    def maximal_cover(self, r_bits: Sequence[int]) -> list[int | None]:
        cover: list[int | None] = [None] * self.p_size
        for idx, r in zip(self.row_indices, r_bits):
            for xi in idx:
                cover[xi] = r if cover[xi] is None else cover[xi] & r
        return cover

    def _damage(self, r_bits, cover, xi: int, y: int) -> Fraction:
        total = Fraction(0)
        for w, idx, r in zip(self.weights, self.row_indices, r_bits):
            if xi in idx and not r >> y & 1:
                if not any(cover[other] >> y & 1 for other in idx):
                    total += w
        return total

    def tight_cover(self, r_bits: Sequence[int]) -> list[int]:
        """Intersection of the selected sets, repaired until every row is covered."""
        cover = [self.rest_full if c is None else c for c in self.maximal_cover(r_bits)]
        order = sorted(range(len(self.row_keys)), key=lambda row: len(self.row_indices[row]))
        for row in order:
            idx, r = self.row_indices[row], r_bits[row]
            covered = 0
            for xi in idx:
                covered |= cover[xi]
            missing = r & ~covered
            y = 0
            while missing:
                if missing & 1:
                    xi = min(idx, key=lambda x: (self._damage(r_bits, cover, x, y), x))
                    cover[xi] |= 1 << y
                missing >>= 1
                y += 1
        union = self.union_cover(r_bits)
        for xi in self.support:
            if cover[xi] == 0:
                options = [y for y in range(self.rest_full.bit_length()) if union[xi] >> y & 1]
                y = min(options, key=lambda y: (self._damage(r_bits, cover, xi, y), y))
                cover[xi] = 1 << y
        return cover

    # steps

    def step(self, state, sel: Sequence[int]) -> tuple[Iteration, tuple]:
        rest_frame = self.table.rest_frame
        r_sets = [self.columns[row][j] for row, j in enumerate(sel)]
        r_bits = [r.bits for r in r_sets]
        g_min = min(state[row][j] for row, j in enumerate(sel))
        cover = self.cover_fn(r_bits)
        bits = 0
        for i, (pi, ri) in enumerate(zip(self.pmap, self.rmap)):
            if cover[pi] >> ri & 1:
                bits |= 1 << i
        contribution = g_min * self._score(r_bits, cover)
        iteration = Iteration(
            selection=dict(zip(self.row_keys, r_sets)),
            cover=tuple(FocalSet(rest_frame, c) for c in cover),
            g_min=g_min,
            focal=FocalSet(self.table.frame, bits),
            contribution=contribution,
        )
        next_state = tuple(
            tuple(v - g_min if j == sel[row] else v for j, v in enumerate(values))
            for row, values in enumerate(state)
        )
        logger.debug(
            "iteration: gMin %s, focal %s, contribution %s", g_min, iteration.focal.describe(), contribution
        )
        return iteration, next_state

    def run_greedy(self, state, first: bool) -> tuple[Fraction, tuple[Iteration, ...]]:
        path, q = [], Fraction(0)
        while self.remaining(state) > 0:
            sel = tuple(max(options, key=lambda j: state[row][j]) for row, options in enumerate(self.choices(state, first)))
            first = False
            it, state = self.step(state, sel)
            path.append(it)
            q += it.contribution
        return q, tuple(path)

    def run_random(self, rng: np.random.Generator) -> tuple[Fraction, tuple[Iteration, ...]]:
        state, first, path, q = self.initial_state(), True, [], Fraction(0)
        while self.remaining(state) > 0:
            sel = []
            for row, options in enumerate(self.choices(state, first)):
                weights = np.array([float(state[row][j]) for j in options])
                sel.append(options[int(rng.choice(len(options), p=weights / weights.sum()))])
            first = False
            it, state = self.step(state, sel)
            path.append(it)
            q += it.contribution
        return q, tuple(path)

    def search(self, state, first: bool) -> tuple[Fraction, tuple[Iteration, ...]]:
        if self.remaining(state) == 0:
            return Fraction(0), ()
        if self.exhausted:
            return self.run_greedy(state, first)
        key = (state, first)
        if key in self.memo:
            return self.memo[key]
        bound = self.remaining(state)
        best: tuple[Fraction, tuple[Iteration, ...]] | None = None
        steps = []
        for sel in itertools.product(*self.choices(state, first)):
            self.nodes += 1
            if self.nodes > self.limits.search_budget:
                if not self.exhausted:
                    logger.warning(
                        "search budget of %d nodes exhausted; completing the remaining subtrees greedily",
                        self.limits.search_budget,
                    )
                self.exhausted = True
                best = self.run_greedy(state, first)
                break
            steps.append(self.step(state, sel))
        # exact steps first
        steps.sort(key=lambda s: s[0].g_min - s[0].contribution)
        for it, next_state in steps:
            if best is not None and it.contribution + bound - it.g_min <= best[0]:
                continue
            q_rest, path_rest = self.search(next_state, False)
            q = it.contribution + q_rest
            if best is None or q > best[0]:
                best = (q, (it,) + path_rest)
            if q == bound:
                break
        self.memo[key] = best
        return best


def approximate_conditional(
    m: MassFunction,
    p: Iterable[str],
    strategy: Strategy | str = Strategy.GREEDY,
    seed: int | None = None,
    *,
    first_selection: Mapping[FocalSet, FocalSet] | None = None,
    cover: Cover | str = Cover.UNION,
    limits: Limits = DEFAULT_LIMITS,
) -> ApproximationResult:
    """Construct a Cano-type conditional whose combination with m↓p is marginally correct.

    ``first_selection`` fixes the first iteration's selected set for the listed
    rows; the strategy chooses the others. ``cover`` picks the cover built for
    each selection.
    """
    strategy, cover = Strategy(strategy), Cover(cover)
    if strategy is Strategy.STOCHASTIC and seed is None:
        raise ValueError("the stochastic strategy needs a seed")
    table = residual_table(m, p)
    search = _Approximator(table, limits, first_selection, cover)
    if strategy is Strategy.GREEDY:
        _, path = search.run_greedy(search.initial_state(), True)
    elif strategy is Strategy.EXHAUSTIVE:
        _, path = search.search(search.initial_state(), True)
    else:
        rng = np.random.default_rng(seed)
        best = None
        for _ in range(limits.stochastic_restarts):
            q, path = search.run_random(rng)
            if best is None or q > best[0]:
                best = (q, path)
            if q == 1:
                break
        _, path = best

    trace = ApproximationTrace(path)
    conditional = MassFunction(table.frame, [(it.focal, it.g_min) for it in path])
    q = quality(trace, table.marginal)
    logger.info("%s approximation (%s cover): %d iteration(s), quality %s", strategy.value, cover.value, len(path), q)
    return ApproximationResult(conditional, q, trace, strategy, cover)


def combine_with_marginal(m: MassFunction, p: Iterable[str], cond: MassFunction) -> MassFunction:
    """m↓p, vacuously extended, combined with ``cond``."""
    if cond.frame != m.frame:
        raise FrameError("the conditional must live on the frame of the joint")
    extended = vacuous_extend(marginalize(m, m.frame.ordered(p)), m.frame)
    combined, _ = combine(extended, cond)
    return combined


def is_marginally_consistent(m: MassFunction, p: Iterable[str], cond: MassFunction) -> bool:
    combined = combine_with_marginal(m, p, cond)
    return all(marginalize(m, [v]) == marginalize(combined, [v]) for v in m.frame.names)


def is_cano_type(cond: MassFunction, p: Iterable[str]) -> bool:
    return marginalize(cond, cond.frame.ordered(p)).is_vacuous


def correctness_witness(
    ref: MassFunction, approx: MassFunction, *, joint: bool = False, limits: Limits = DEFAULT_LIMITS
) -> tuple[str | None, FocalSet] | None:
    """First set on which the approximation believes more than the reference, or None.

    Per-variable by default; ``joint`` compares every subset of the full frame
    and reports ``None`` as the variable.
    """
    if ref.frame != approx.frame:
        raise FrameError("reference and approximation live on different frames")
    scopes = [None] if joint else list(ref.frame.names)
    for name in scopes:
        r = ref if name is None else marginalize(ref, [name])
        a = approx if name is None else marginalize(approx, [name])
        bel_r, bel_a = belief_table(r, limits), belief_table(a, limits)
        for bits in range(bel_r.size):
            if bel_a[bits] > bel_r[bits]:
                return name, FocalSet(r.frame, bits)
    return None


def marginally_correct(
    ref: MassFunction, approx: MassFunction, *, joint: bool = False, limits: Limits = DEFAULT_LIMITS
) -> bool:
    return correctness_witness(ref, approx, joint=joint, limits=limits) is None


def conditional_independence(
    m: MassFunction, p: Iterable[str], q: Iterable[str], r: Iterable[str]
) -> bool:
    """Whether p and q are independent given every conditioning event over r."""
    groups = [set(p), set(q), set(r)]
    if any(not g for g in groups):
        raise FrameError("p, q and r must all be nonempty")
    if groups[0] & groups[1] or groups[0] & groups[2] or groups[1] & groups[2]:
        raise FrameError("p, q and r must be disjoint")
    frame = m.frame
    p_names, q_names, r_names = (frame.ordered(g) for g in groups)
    r_frame = frame.subframe(r_names)
    pq_frame = frame.subframe(p_names + q_names)
    for bits in range(1, r_frame.full_bits + 1):
        event = FocalSet(r_frame, bits)
        try:
            conditioned = condition_on(m, event)
        except TotalConflictError:
            continue
        joint = marginalize(conditioned, pq_frame.names)
        product, _ = combine(
            vacuous_extend(marginalize(conditioned, p_names), pq_frame),
            vacuous_extend(marginalize(conditioned, q_names), pq_frame),
        )
        if joint != product:
            logger.debug("dependence given %s", event.describe())
            return False
    return True
