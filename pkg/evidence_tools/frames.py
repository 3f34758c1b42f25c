"""Variables, joint frames and focal sets.

A joint frame enumerates its configurations in lexicographic order of
(variable order, domain order), i.e. the order of ``itertools.product`` over
the domains. A focal set is a dense bit-membership over that enumeration:
bit i is set when configuration i belongs to the set.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from operator import mul
from typing import Iterable, Mapping, Sequence

from .errors import FrameError

LABEL_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        if not self.name:
            raise FrameError("variable name must be nonempty")
        if not self.domain:
            raise FrameError(f"variable {self.name!r} has an empty domain")
        if len(set(self.domain)) != len(self.domain):
            raise FrameError(f"variable {self.name!r} repeats a value label")

    def index(self, label: str) -> int:
        try:
            return self.domain.index(label)
        except ValueError:
            raise FrameError(f"unknown value {label!r} for variable {self.name!r}") from None


@dataclass(frozen=True)
class JointFrame:
    variables: tuple[Variable, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise FrameError("a frame needs at least one variable")
        names = [v.name for v in self.variables]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise FrameError(f"duplicate variable name(s): {', '.join(duplicates)}")

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def size(self) -> int:
        return reduce(mul, (len(v.domain) for v in self.variables), 1)

    @cached_property
    def full_bits(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def strides(self) -> tuple[int, ...]:
        strides = []
        step = 1
        for v in reversed(self.variables):
            strides.append(step)
            step *= len(v.domain)
        return tuple(reversed(strides))

    @cached_property
    def configurations(self) -> tuple[tuple[str, ...], ...]:
        return tuple(itertools.product(*(v.domain for v in self.variables)))

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise FrameError(f"unknown variable {name!r}")

    def config_index(self, config: Sequence[str]) -> int:
        if len(config) != len(self.variables):
            raise FrameError(f"configuration {tuple(config)} does not match frame {self.names}")
        return sum(v.index(label) * s for v, label, s in zip(self.variables, config, self.strides))

    def ordered(self, names: Iterable[str]) -> tuple[str, ...]:
        """Validate ``names`` against the frame and return them in frame order."""
        wanted = set(names)
        unknown = wanted - set(self.names)
        if unknown:
            raise FrameError(f"unknown variable(s): {', '.join(sorted(unknown))}")
        return tuple(n for n in self.names if n in wanted)

    def subframe(self, names: Iterable[str]) -> "JointFrame":
        ordered = self.ordered(names)
        if not ordered:
            raise FrameError("a subframe needs at least one variable")
        if ordered == self.names:
            return self
        return JointFrame(tuple(self.variable(n) for n in ordered))

    def contains_frame(self, other: "JointFrame") -> bool:
        mine = {v.name: v for v in self.variables}
        return all(mine.get(v.name) == v for v in other.variables)

    def full(self) -> "FocalSet":
        return FocalSet(self, self.full_bits)

    def empty(self) -> "FocalSet":
        return FocalSet(self, 0)

    def __repr__(self):
        return "JointFrame(" + ", ".join(f"{v.name}{{{','.join(v.domain)}}}" for v in self.variables) + ")"


def build_frame(variables: Sequence[Variable | tuple[str, Sequence[str]]]) -> JointFrame:
    if not variables:
        raise FrameError("variable list is empty")
    converted = [v if isinstance(v, Variable) else Variable(v[0], tuple(v[1])) for v in variables]
    return JointFrame(tuple(converted))


@lru_cache(maxsize=512)
def projection_map(frame: JointFrame, names: tuple[str, ...]) -> tuple[int, ...]:
    """For every configuration index of ``frame``, its index in the subframe on ``names``."""
    sub = frame.subframe(names)
    positions = [frame.names.index(n) for n in sub.names]
    return tuple(
        sum(frame.variables[p].index(config[p]) * s for p, s in zip(positions, sub.strides))
        for config in frame.configurations
    )


class FocalSet:
    """A subset of a frame's configurations, with an optional recorded box form."""

    __slots__ = ("frame", "bits", "_box")

    def __init__(self, frame: JointFrame, bits: int, box: tuple[frozenset, ...] | None = None):
        if bits < 0 or bits > frame.full_bits:
            raise FrameError("membership bits exceed the frame")
        self.frame = frame
        self.bits = bits
        self._box = box

    @classmethod
    def from_members(cls, frame: JointFrame, configs: Iterable[Sequence[str]]) -> "FocalSet":
        bits = 0
        for config in configs:
            bits |= 1 << frame.config_index(config)
        return cls(frame, bits)

    def __eq__(self, other):
        if not isinstance(other, FocalSet):
            return NotImplemented
        return self.bits == other.bits and self.frame == other.frame

    def __hash__(self):
        return hash((self.frame, self.bits))

    def __len__(self):
        return self.bits.bit_count()

    def __bool__(self):
        return self.bits != 0

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, config):
        return bool(self.bits >> self.frame.config_index(config) & 1)

    def _same_frame(self, other: "FocalSet"):
        if self.frame != other.frame:
            raise FrameError("focal sets live on different frames")

    def __and__(self, other: "FocalSet") -> "FocalSet":
        self._same_frame(other)
        return FocalSet(self.frame, self.bits & other.bits)

    def __or__(self, other: "FocalSet") -> "FocalSet":
        self._same_frame(other)
        return FocalSet(self.frame, self.bits | other.bits)

    def __le__(self, other: "FocalSet") -> bool:
        self._same_frame(other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other: "FocalSet") -> bool:
        return other <= self

    def complement(self) -> "FocalSet":
        return FocalSet(self.frame, self.frame.full_bits & ~self.bits)

    @property
    def indices(self) -> list[int]:
        bits, out, i = self.bits, [], 0
        while bits:
            if bits & 1:
                out.append(i)
            bits >>= 1
            i += 1
        return out

    @property
    def members(self) -> tuple[tuple[str, ...], ...]:
        configs = self.frame.configurations
        return tuple(configs[i] for i in self.indices)

    def component(self, name: str) -> frozenset:
        self.frame.variable(name)
        position = self.frame.names.index(name)
        return frozenset(config[position] for config in self.members)

    def box_components(self) -> tuple[frozenset, ...] | None:
        """Per-variable value sets when the set is a cross product, else None."""
        if self._box is None and self.bits:
            comps = tuple(self.component(n) for n in self.frame.names)
            if reduce(mul, (len(c) for c in comps), 1) == len(self):
                self._box = comps
        return self._box

    @property
    def is_box(self) -> bool:
        return self.box_components() is not None

    @property
    def sort_key(self) -> str:
        # descending membership bitstring, character i = configuration i
        inverted = self.frame.full_bits & ~self.bits
        return format(inverted, f"0{self.frame.size}b")[::-1]

    def describe(self) -> str:
        comps = self.box_components()
        if comps is not None:
            parts = []
            for v, comp in zip(self.frame.variables, comps):
                parts.append("{" + ",".join(x for x in v.domain if x in comp) + "}")
            return "×".join(parts)
        return "{" + ",".join("(" + ",".join(c) + ")" for c in self.members) + "}"

    def __repr__(self):
        return f"FocalSet({self.describe()})"


def box(components: Mapping[str, Iterable[str]], frame: JointFrame, *, fill: bool = False) -> FocalSet:
    """Cross product of per-variable value sets.

    With ``fill`` the variables missing from ``components`` take their full domain.
    """
    unknown = set(components) - set(frame.names)
    if unknown:
        raise FrameError(f"unknown variable(s): {', '.join(sorted(unknown))}")
    index_sets = []
    comps = []
    for v in frame.variables:
        if v.name not in components:
            if not fill:
                raise FrameError(f"no component given for variable {v.name!r}")
            values = v.domain
        else:
            values = tuple(components[v.name])
        if not values:
            raise FrameError(f"empty component for variable {v.name!r}")
        idx = sorted({v.index(x) for x in values})
        index_sets.append(idx)
        comps.append(frozenset(v.domain[i] for i in idx))
    bits = 0
    for combo in itertools.product(*index_sets):
        bits |= 1 << sum(i * s for i, s in zip(combo, frame.strides))
    return FocalSet(frame, bits, tuple(comps))


def project_set(focal: FocalSet, names: Iterable[str]) -> FocalSet:
    frame = focal.frame
    names = tuple(names)
    if not names:
        raise FrameError("projection needs at least one variable")
    sub = frame.subframe(names)
    if sub == frame:
        return focal
    comps = focal._box
    if comps is not None:
        keep = {n: comps[frame.names.index(n)] for n in sub.names}
        return box(keep, sub)
    pmap = projection_map(frame, sub.names)
    bits = 0
    for i in focal.indices:
        bits |= 1 << pmap[i]
    return FocalSet(sub, bits)


def cylinder(focal: FocalSet, frame: JointFrame) -> FocalSet:
    """Vacuous extension of a set over a subframe onto ``frame``."""
    sub = focal.frame
    if sub == frame:
        return focal
    if not frame.contains_frame(sub) or frame.ordered(sub.names) != sub.names:
        raise FrameError(f"{sub!r} is not a subframe of {frame!r}")
    comps = focal._box
    if comps is not None:
        return box(dict(zip(sub.names, comps)), frame, fill=True)
    pmap = projection_map(frame, frame.ordered(sub.names))
    bits = 0
    for i, j in enumerate(pmap):
        if focal.bits >> j & 1:
            bits |= 1 << i
    return FocalSet(frame, bits)
