"""Mass functions and the belief calculus in exact rational arithmetic."""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Mapping
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Union

import numpy as np
import pandas as pd

from . import lattice
from .config import DEFAULT_LIMITS, Limits
from .errors import CapacityError, FrameError, MassError, TotalConflictError
from .frames import FocalSet, JointFrame, box, cylinder, project_set

logger = logging.getLogger(__name__)

Number = Union[Fraction, int, str]


class Classification(str, Enum):
    PROPER = "proper"
    PSEUDO = "pseudo"
    INVALID = "invalid"


def as_fraction(value: Number) -> Fraction:
    if isinstance(value, float):
        raise MassError("masses are exact rationals, not floats")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise MassError(f"not a rational number: {value!r}") from exc


class MassFunction(Mapping):
    """A basic probability assignment over a joint frame.

    Immutable. Zero masses are dropped; the empty set may not carry mass and
    the masses must sum to exactly one. Negative masses are allowed so that
    pseudo-belief functions can be represented and classified.
    """

    def __init__(self, frame: JointFrame, assignments: Mapping | Iterable = ()):
        items = assignments.items() if isinstance(assignments, Mapping) else assignments
        acc: dict[FocalSet, Fraction] = defaultdict(Fraction)
        for focal, value in items:
            if focal.frame != frame:
                raise FrameError(f"focal set {focal!r} is not over {frame!r}")
            acc[focal] += as_fraction(value)
        masses = {f: v for f, v in acc.items() if v != 0}
        if any(not f for f in masses):
            raise MassError("the empty set carries mass")
        total = sum(masses.values(), Fraction(0))
        if total != 1:
            raise MassError(f"masses sum to {total}, not 1")
        self.frame = frame
        self._masses = dict(sorted(masses.items(), key=lambda kv: kv[0].sort_key))

    @classmethod
    def vacuous(cls, frame: JointFrame) -> "MassFunction":
        return cls(frame, {frame.full(): Fraction(1)})

    @classmethod
    def categorical(cls, focal: FocalSet) -> "MassFunction":
        return cls(focal.frame, {focal: Fraction(1)})

    def __getitem__(self, focal: FocalSet) -> Fraction:
        return self._masses[focal]

    def __iter__(self):
        return iter(self._masses)

    def __len__(self):
        return len(self._masses)

    def mass(self, focal: FocalSet) -> Fraction:
        return self._masses.get(focal, Fraction(0))

    @property
    def focals(self) -> tuple[FocalSet, ...]:
        return tuple(self._masses)

    def __eq__(self, other):
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.frame == other.frame and self._masses == other._masses

    def __hash__(self):
        return hash((self.frame, frozenset(self._masses.items())))

    @cached_property
    def classification(self) -> Classification:
        return classify(self)

    @property
    def is_proper(self) -> bool:
        return all(v > 0 for v in self._masses.values())

    @property
    def is_vacuous(self) -> bool:
        return len(self._masses) == 1 and self.frame.full() in self._masses

    def __repr__(self):
        body = ", ".join(f"{f.describe()}: {v}" for f, v in self._masses.items())
        return f"MassFunction({body})"


def _check_frame(m: MassFunction, focal: FocalSet):
    if focal.frame != m.frame:
        raise FrameError("set and mass function live on different frames")


def belief_of(m: MassFunction, focal: FocalSet) -> Fraction:
    _check_frame(m, focal)
    return sum((v for f, v in m.items() if f <= focal), Fraction(0))


def plausibility_of(m: MassFunction, focal: FocalSet) -> Fraction:
    _check_frame(m, focal)
    return sum((v for f, v in m.items() if f.bits & focal.bits), Fraction(0))


def commonality_of(m: MassFunction, focal: FocalSet) -> Fraction:
    _check_frame(m, focal)
    return sum((v for f, v in m.items() if focal <= f), Fraction(0))


def mass_table(m: MassFunction, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    if m.frame.size > limits.dense_lattice_max:
        raise CapacityError(f"|Ξ| = {m.frame.size} exceeds the dense lattice limit {limits.dense_lattice_max}")
    table = lattice.empty_table(m.frame.size)
    for f, v in m.items():
        table[f.bits] = v
    return table


def belief_table(m: MassFunction, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Bel on every subset, indexed by membership bits."""
    return lattice.subset_zeta(mass_table(m, limits))


def plausibility_table(m: MassFunction, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    bel = belief_table(m, limits)
    full = m.frame.full_bits
    return np.array([1 - bel[full & ~k] for k in range(bel.size)], dtype=object)


def commonality_table(m: MassFunction, limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    return lattice.superset_zeta(mass_table(m, limits))


def mass_from_belief(bel, frame: JointFrame, limits: Limits = DEFAULT_LIMITS) -> MassFunction:
    """Möbius inversion of a belief function tabulated on every subset.

    ``bel`` is either an array of length 2**|Ξ| indexed by membership bits or
    a mapping from focal sets (or bit masks) to values.
    """
    size = 1 << frame.size
    if isinstance(bel, Mapping):
        values = {(k.bits if isinstance(k, FocalSet) else int(k)): as_fraction(v) for k, v in bel.items()}
    else:
        values = {k: as_fraction(v) for k, v in enumerate(bel)}
    if values.get(0, Fraction(0)) != 0 or values.get(frame.full_bits) != 1:
        raise MassError("a belief function needs Bel(∅) = 0 and Bel(Ξ) = 1")

    if frame.size <= limits.dense_lattice_max:
        if len(values) != size:
            raise MassError(f"belief must be tabulated on all {size} subsets, got {len(values)}")
        table = lattice.empty_table(frame.size)
        for k, v in values.items():
            table[k] = v
        masses = lattice.subset_mobius(table)
        pairs = [(FocalSet(frame, k), masses[k]) for k in range(1, size) if masses[k] != 0]
        if masses[0] != 0:
            raise MassError("Möbius inversion puts mass on the empty set")
    else:
        # sparse: only subsets present in the table contribute
        pairs = []
        for a, _ in values.items():
            total = Fraction(0)
            for b, vb in values.items():
                if b & ~a == 0:
                    sign = -1 if (a & ~b).bit_count() % 2 else 1
                    total += sign * vb
            if total != 0 and a:
                pairs.append((FocalSet(frame, a), total))
    return MassFunction(frame, pairs)


def classify(m: MassFunction, limits: Limits = DEFAULT_LIMITS) -> Classification:
    if m.is_proper:
        return Classification.PROPER
    if m.frame.size <= limits.dense_lattice_max:
        q_values = commonality_table(m, limits)
        nonnegative = all(q >= 0 for q in q_values)
    else:
        # Q(A) equals Q of the intersection of all focals containing A, or 0
        closure = lattice.intersection_closure(f.bits for f in m)
        nonnegative = all(
            sum((v for f, v in m.items() if c & ~f.bits == 0), Fraction(0)) >= 0 for c in closure
        )
    return Classification.PSEUDO if nonnegative else Classification.INVALID


def marginalize(m: MassFunction, names: Iterable[str]) -> MassFunction:
    sub = m.frame.subframe(tuple(names))
    if sub == m.frame:
        return m
    return MassFunction(sub, [(project_set(f, sub.names), v) for f, v in m.items()])


def vacuous_extend(m: MassFunction, frame: JointFrame) -> MassFunction:
    if m.frame == frame:
        return m
    return MassFunction(frame, [(cylinder(f, frame), v) for f, v in m.items()])


def _require_proper(m: MassFunction, role: str):
    if not m.is_proper:
        raise MassError(f"{role} must be a proper mass function (got {m.classification.value})")


def combine(m1: MassFunction, m2: MassFunction) -> tuple[MassFunction, Fraction]:
    """Dempster's rule. Returns the normalised combination and the conflict k."""
    if m1.frame != m2.frame:
        raise FrameError("combination needs both mass functions on the same frame")
    _require_proper(m1, "left operand")
    _require_proper(m2, "right operand")
    frame = m1.frame
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for f1, v1 in m1.items():
        for f2, v2 in m2.items():
            acc[f1.bits & f2.bits] += v1 * v2
    conflict = acc.pop(0, Fraction(0))
    if conflict == 1:
        raise TotalConflictError()
    scale = 1 - conflict
    return MassFunction(frame, [(FocalSet(frame, b), v / scale) for b, v in acc.items()]), conflict


def combine_all(masses: Iterable[MassFunction]) -> MassFunction:
    masses = list(masses)
    if not masses:
        raise MassError("nothing to combine")
    result = masses[0]
    for m in masses[1:]:
        result, _ = combine(result, m)
    return result


def condition_on(m: MassFunction, event: FocalSet) -> MassFunction:
    """Shafer conditioning on an event given over the frame or one of its subframes."""
    if not event:
        raise FrameError("cannot condition on the empty event")
    result, conflict = combine(m, MassFunction.categorical(cylinder(event, m.frame)))
    logger.debug("conditioning on %s: conflict %s", event.describe(), conflict)
    return result


def condition_shafer(m: MassFunction, var: str, values: Iterable[str]) -> MassFunction:
    sub = m.frame.subframe([var])
    values = tuple(values)
    if not values:
        raise FrameError("conditioning set is empty")
    return condition_on(m, box({var: values}, sub))


def box_hull(m: MassFunction) -> MassFunction:
    """Replace every focal set by the cross product of its projections."""
    frame = m.frame
    hulls = []
    for f, v in m.items():
        comps = {name: f.component(name) for name in frame.names}
        hulls.append((box(comps, frame), v))
    return MassFunction(frame, hulls)


def pignistic(m: MassFunction) -> dict[tuple[str, ...], Fraction]:
    """Pignistic probability BetP over configurations with positive value."""
    out: dict[tuple[str, ...], Fraction] = defaultdict(Fraction)
    for f, v in m.items():
        share = v / len(f)
        for config in f.members:
            out[config] += share
    return {c: out[c] for c in m.frame.configurations if out.get(c)}


def focal_summary(m: MassFunction) -> pd.DataFrame:
    """One row per focal set in canonical order: mass, Bel, Pl and Q as rational strings."""
    rows = []
    for f, v in m.items():
        rows.append(
            {
                "focal": f.describe(),
                "mass": str(v),
                "Bel": str(belief_of(m, f)),
                "Pl": str(plausibility_of(m, f)),
                "Q": str(commonality_of(m, f)),
                "decimal": float(v),
            }
        )
    return pd.DataFrame(rows, columns=["focal", "mass", "Bel", "Pl", "Q", "decimal"])
