"""Bundled worked instances and seeded random instance generators."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .cases import CaseTable, bpa_from_cases, ingest_cases
from .frames import FocalSet, JointFrame, Variable, box, build_frame
from .mass import MassFunction
from .network import EvidenceSet, EvidentialPolytree, build_network

# --- case tables ---

Y_TABLE_CSV = """X,count
x1,10
x1|x2,20
x2|x3,30
x3,40
"""

BEL_AND_CSV = """X,Y,Z,count
t,t,t,10
t,f,f,10
f,t,f,10
f,f,f,10
t,t|f,t|f,10
f,t|f,f,10
t|f,t,t|f,10
t|f,f,f,10
t|f,t|f,t|f,20
"""

FORTY_SIXTY_CSV = """X,Z,count
x1,z1,40
x1|x2,z2,60
"""

SERIAL_PITFALL_CSV = """X
x1|x2
x2|x3
"""

SERIAL_PITFALL_CONDITIONS = [("X", ("x1", "x2")), ("X", ("x2", "x3"))]

LIFT_PROBABILITIES = {"y1": Fraction(1, 10), "y2": Fraction(1, 5), "y3": Fraction(3, 10), "y4": Fraction(2, 5)}
LIFT_MAPPING = {"y1": ("x1",), "y2": ("x1", "x2"), "y3": ("x2", "x3"), "y4": ("x3",)}
LIFT_VARIABLE = Variable("X", ("x1", "x2", "x3"))


def y_table() -> CaseTable:
    return ingest_cases(Y_TABLE_CSV)


def bel_and() -> MassFunction:
    return bpa_from_cases(ingest_cases(BEL_AND_CSV))


def m_and(frame: JointFrame | None = None) -> MassFunction:
    """Mass 1 on the graph of Z = X AND Y."""
    frame = frame or bel_and().frame
    graph = [("t", "t", "t"), ("t", "f", "f"), ("f", "t", "f"), ("f", "f", "f")]
    return MassFunction.categorical(FocalSet.from_members(frame, graph))


def forty_sixty() -> MassFunction:
    return bpa_from_cases(ingest_cases(FORTY_SIXTY_CSV))


XZ_FRAME = build_frame([("X", ("x1", "x2")), ("Z", ("z1", "z2"))])


def box_ambiguity() -> tuple[MassFunction, MassFunction, MassFunction]:
    """Three bpas with the same box hull but different conditionals given X = x1."""
    m1 = MassFunction.categorical(XZ_FRAME.full())
    m2 = MassFunction.categorical(FocalSet.from_members(XZ_FRAME, [("x1", "z1"), ("x2", "z2")]))
    m3 = MassFunction.categorical(FocalSet.from_members(XZ_FRAME, [("x1", "z2"), ("x2", "z1")]))
    return m1, m2, m3


BACKTRACKING_FRAME = build_frame([("X", ("x1", "x2", "x3")), ("Y", ("y1", "y2"))])

_BACKTRACKING_FOCALS = [
    (xs, ys, w)
    for xs in (("x1",), ("x2",), ("x3",), ("x1", "x2"), ("x1", "x3"), ("x2", "x3"))
    for ys, w in ((("y1",), 1), (("y2",), 2))
]


def backtracking_instance() -> MassFunction:
    """Every row of X splits 1:2 between {y1} and {y2}.

    Quality 1 needs the same selection in all rows at every step. Pinning the
    first selection to {y1} on some rows leaves greedy below 1; a search over
    selections reaches it.
    """
    return MassFunction(
        BACKTRACKING_FRAME,
        [(box({"X": xs, "Y": ys}, BACKTRACKING_FRAME), Fraction(w, 18)) for xs, ys, w in _BACKTRACKING_FOCALS],
    )


def backtracking_pins() -> dict[FocalSet, FocalSet]:
    """First selection {y1} on the rows {x1}, {x2} and {x1,x2}."""
    x_frame = BACKTRACKING_FRAME.subframe(["X"])
    y_frame = BACKTRACKING_FRAME.subframe(["Y"])
    y1 = box({"Y": ["y1"]}, y_frame)
    return {box({"X": xs}, x_frame): y1 for xs in (["x1"], ["x2"], ["x1", "x2"])}


def conditioning_corpus() -> dict[str, tuple[MassFunction, tuple[str, ...]]]:
    """Box-focal instances with their conditioning variables."""
    m1, _, _ = box_ambiguity()
    return {
        "bel_and": (bel_and(), ("X", "Y")),
        "forty_sixty": (forty_sixty(), ("X",)),
        "m1": (m1, ("X",)),
        "backtracking": (backtracking_instance(), ("X",)),
    }


# --- networks ---


def m1_chain_network() -> EvidentialPolytree:
    """X -> Z with a vacuous root and the full-box conditional."""
    m1, _, _ = box_ambiguity()
    return build_network(XZ_FRAME, [("X", "Z")], {"X": MassFunction.vacuous(XZ_FRAME.subframe(["X"])), "Z": m1})


def reverse_direction_network() -> EvidentialPolytree:
    """X -> Z built from the 40/60 table: its X-marginal and its tight conditional."""
    x_frame = XZ_FRAME.subframe(["X"])
    val_x = MassFunction(
        x_frame,
        {box({"X": ["x1"]}, x_frame): Fraction(2, 5), box({"X": ["x1", "x2"]}, x_frame): Fraction(3, 5)},
    )
    val_z = MassFunction.categorical(FocalSet.from_members(XZ_FRAME, [("x1", "z1"), ("x2", "z2")]))
    return build_network(XZ_FRAME, [("X", "Z")], {"X": val_x, "Z": val_z})


REVERSE_DIRECTION_EVIDENCE = EvidenceSet({"Z": frozenset({"z2"})})


# --- random instances ---


def _random_subset(rng: np.random.Generator, size: int) -> int:
    return int(rng.integers(1, 1 << size))


def _random_masses(rng: np.random.Generator, focals: list[FocalSet]) -> MassFunction:
    weights = [int(w) for w in rng.integers(1, 10, size=len(focals))]
    total = sum(weights)
    return MassFunction(focals[0].frame, [(f, Fraction(w, total)) for f, w in zip(focals, weights)])


def random_frame(rng: np.random.Generator, max_variables: int = 3, max_values: int = 3, min_variables: int = 1) -> JointFrame:
    count = int(rng.integers(min_variables, max_variables + 1))
    variables = []
    for i in range(count):
        size = int(rng.integers(1 if count > 1 else 2, max_values + 1))
        name = "XYZW"[i] if i < 4 else f"V{i}"
        variables.append(Variable(name, tuple(f"{name.lower()}{k + 1}" for k in range(size))))
    return build_frame(variables)


def random_proper_bpa(rng: np.random.Generator, frame: JointFrame, max_focals: int = 6) -> MassFunction:
    count = int(rng.integers(1, max_focals + 1))
    focals = [FocalSet(frame, _random_subset(rng, frame.size)) for _ in range(count)]
    return _random_masses(rng, focals)


def random_box_bpa(rng: np.random.Generator, frame: JointFrame, max_focals: int = 6) -> MassFunction:
    count = int(rng.integers(1, max_focals + 1))
    focals = []
    for _ in range(count):
        comps = {}
        for v in frame.variables:
            bits = _random_subset(rng, len(v.domain))
            comps[v.name] = [x for i, x in enumerate(v.domain) if bits >> i & 1]
        focals.append(box(comps, frame))
    return _random_masses(rng, focals)


def random_singleton_bpa(rng: np.random.Generator, frame: JointFrame, max_focals: int = 6) -> MassFunction:
    count = int(rng.integers(1, max_focals + 1))
    focals = [FocalSet(frame, 1 << int(rng.integers(0, frame.size))) for _ in range(count)]
    return _random_masses(rng, focals)


def random_split(rng: np.random.Generator, frame: JointFrame) -> tuple[str, ...]:
    """A random nonempty proper subset of the frame's variables."""
    names = list(frame.names)
    size = int(rng.integers(1, len(names)))
    chosen = set(rng.choice(len(names), size=size, replace=False).tolist())
    return tuple(n for i, n in enumerate(names) if i in chosen)


def random_cano_conditional(rng: np.random.Generator, family: JointFrame, node: str, max_focals: int = 3) -> MassFunction:
    """Random conditional of ``node`` given the other variables of ``family``; every focal meets every fiber."""
    others = tuple(n for n in family.names if n != node)
    parent_frame = family.subframe(others)
    child = family.variable(node)
    focals = []
    for _ in range(int(rng.integers(1, max_focals + 1))):
        members = []
        for config in parent_frame.configurations:
            assignment = dict(zip(others, config))
            bits = _random_subset(rng, len(child.domain))
            for i, value in enumerate(child.domain):
                if bits >> i & 1:
                    assignment[node] = value
                    members.append(tuple(assignment[n] for n in family.names))
        focals.append(FocalSet.from_members(family, members))
    return _random_masses(rng, focals)


BINARY_STRUCTURES: dict[str, list[tuple[str, str]]] = {
    "single": [],
    "pair": [("X", "Y")],
    "chain": [("X", "Y"), ("Y", "Z")],
    "fork": [("X", "Y"), ("X", "Z")],
    "collider": [("X", "Z"), ("Y", "Z")],
}


def random_binary_network(rng: np.random.Generator, structure: str) -> EvidentialPolytree:
    edges = BINARY_STRUCTURES[structure]
    names = sorted({n for e in edges for n in e} or {"X"})
    frame = build_frame([(n, (f"{n.lower()}1", f"{n.lower()}2")) for n in names])
    valuations = {}
    for node in names:
        parents = [u for u, v in edges if v == node]
        family = frame.subframe([node, *parents])
        if parents:
            valuations[node] = random_cano_conditional(rng, family, node)
        else:
            valuations[node] = random_proper_bpa(rng, family, max_focals=3)
    return build_network(frame, edges, valuations)
