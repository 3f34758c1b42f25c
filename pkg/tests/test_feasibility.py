from fractions import Fraction as F

import pytest

from evidence_tools.conditionals import combine_with_marginal, is_cano_type, is_marginally_consistent
from evidence_tools.config import Limits
from evidence_tools.errors import CapacityError, MassError
from evidence_tools.feasibility import (
    Method,
    Verdict,
    cano_conditional_exists,
    candidate_sets,
    decomposition_exists,
    simplex_feasible,
    solve_exact,
    vertex_feasible,
)
from evidence_tools.frames import box
from evidence_tools.mass import MassFunction, marginalize

ONE, ZERO = F(1), F(0)


def test_solve_exact():
    assert solve_exact([[F(2), ONE], [ONE, ONE]], [F(3), F(2)]) == [ONE, ONE]
    assert solve_exact([[ONE, ONE], [ONE, ONE]], [ONE, F(2)]) is None
    assert solve_exact([[ONE, ONE]], [ONE]) is None


def test_simplex_finds_a_nonnegative_point():
    rows = [[ONE, ONE, ZERO], [ZERO, ONE, ONE]]
    x = simplex_feasible(rows, [F(1, 2), F(1, 2)])
    assert x is not None
    assert all(v >= 0 for v in x)
    assert [sum(a * v for a, v in zip(row, x)) for row in rows] == [F(1, 2), F(1, 2)]


def test_simplex_detects_infeasibility():
    assert simplex_feasible([[ONE, ONE], [ONE, ONE]], [ONE, F(2)]) is None
    assert simplex_feasible([[ONE, -ONE]], [-ONE]) == [ZERO, ONE]
    assert simplex_feasible([[ONE, ONE]], [-ONE]) is None


def test_vertex_enumeration_agrees_with_simplex():
    rows = [[ONE, ONE, ZERO], [ZERO, ONE, ONE], [ONE, ONE, ONE]]
    for rhs in ([F(1, 2), F(1, 2), ONE], [ONE, ONE, ONE], [ONE, ONE, F(3)]):
        assert (vertex_feasible(rows, rhs) is None) == (simplex_feasible(rows, rhs) is None)


def test_vertex_enumeration_capacity():
    rows = [[ONE] * 30 for _ in range(10)]
    with pytest.raises(CapacityError):
        vertex_feasible(rows, [ONE] * 10, Limits(vertex_combinations_max=1000))


def test_candidates_meet_every_fiber(forty_sixty):
    candidates = candidate_sets(forty_sixty, ["X"])
    assert len(candidates) == 9
    assert all(is_cano_type(MassFunction.categorical(c), ["X"]) for c in candidates)
    assert [c.sort_key for c in candidates] == sorted(c.sort_key for c in candidates)


def test_candidate_limits(bel_and):
    with pytest.raises(CapacityError):
        candidate_sets(bel_and, ["X", "Y"], Limits(existence_frame_max=4))
    with pytest.raises(CapacityError):
        candidate_sets(bel_and, ["X"], Limits(existence_candidates_max=100))


@pytest.mark.parametrize("method", list(Method))
def test_forty_sixty_has_a_consistent_cano_conditional(forty_sixty, method):
    cert = cano_conditional_exists(forty_sixty, ["X"], method)
    assert cert.verdict is Verdict.FEASIBLE
    assert cert.method is method
    assert cert.candidates == 9
    assert is_cano_type(cert.witness, ["X"])
    assert is_marginally_consistent(forty_sixty, ["X"], cert.witness)


def test_known_consistent_conditional_for_forty_sixty(forty_sixty):
    frame = forty_sixty.frame
    cond = MassFunction(
        frame,
        {box({"X": ["x1", "x2"], "Z": ["z1"]}, frame): F(2, 5), box({"X": ["x1", "x2"], "Z": ["z2"]}, frame): F(3, 5)},
    )
    assert is_marginally_consistent(forty_sixty, ["X"], cond)
    assert combine_with_marginal(forty_sixty, ["X"], cond) != forty_sixty


@pytest.mark.parametrize("method", list(Method))
def test_forty_sixty_has_no_exact_decomposition(forty_sixty, method):
    cert = decomposition_exists(forty_sixty, ["X"], method)
    assert cert.verdict is Verdict.INFEASIBLE
    assert cert.witness is None
    assert not cert.feasible


def test_bel_and_has_no_exact_decomposition(bel_and):
    cert = decomposition_exists(bel_and, ["X", "Y"])
    assert cert.verdict is Verdict.INFEASIBLE
    assert cert.candidates == 81


def test_bel_and_has_a_consistent_cano_conditional(bel_and):
    cert = cano_conditional_exists(bel_and, ["X", "Y"])
    assert cert.feasible
    assert is_marginally_consistent(bel_and, ["X", "Y"], cert.witness)


def test_exact_decomposition_is_found_when_it_exists(forty_sixty):
    frame = forty_sixty.frame
    cond = MassFunction(
        frame,
        {box({"X": ["x1", "x2"], "Z": ["z1"]}, frame): F(1, 4), frame.full(): F(3, 4)},
    )
    joint = combine_with_marginal(forty_sixty, ["X"], cond)
    cert = decomposition_exists(joint, ["X"])
    assert cert.feasible
    assert combine_with_marginal(joint, ["X"], cert.witness) == joint
    assert marginalize(cert.witness, ["X"]).is_vacuous


def test_deciders_need_proper_input(forty_sixty):
    frame = forty_sixty.frame
    pseudo = MassFunction(
        frame,
        {
            box({"X": ["x1"], "Z": ["z1", "z2"]}, frame): F(1, 2),
            box({"X": ["x1", "x2"], "Z": ["z1"]}, frame): F(1, 2),
            frame.full(): F(1, 2),
            box({"X": ["x1"], "Z": ["z1"]}, frame): F(-1, 2),
        },
    )
    with pytest.raises(MassError):
        decomposition_exists(pseudo, ["X"])
