from fractions import Fraction as F

import numpy as np
import pytest

from evidence_tools import corpus
from evidence_tools.conditionals import (
    Cover,
    Strategy,
    approximate_conditional,
    combine_with_marginal,
    conditional_independence,
    correctness_witness,
    is_cano_type,
    is_marginally_consistent,
    marginally_correct,
    quality,
    residual_table,
    split_variables,
)
from evidence_tools.config import Limits
from evidence_tools.errors import FrameError, MassError, NonBoxFocalError
from evidence_tools.frames import box, build_frame
from evidence_tools.mass import MassFunction, condition_on, marginalize


def test_split_variables(bel_and):
    assert split_variables(bel_and.frame, ["Y", "X"]) == (("X", "Y"), ("Z",))
    with pytest.raises(FrameError):
        split_variables(bel_and.frame, [])
    with pytest.raises(FrameError):
        split_variables(bel_and.frame, ["X", "Y", "Z"])


def test_residual_table_of_forty_sixty(forty_sixty):
    table = residual_table(forty_sixty, ["X"])
    xf, zf = table.p_frame, table.rest_frame
    x1, xx = box({"X": ["x1"]}, xf), xf.full()
    assert list(table.rows) == [xx, x1]
    assert table.g(x1, box({"Z": ["z1"]}, zf)) == 1
    assert table.g(xx, box({"Z": ["z2"]}, zf)) == 1
    assert table.g(x1, box({"Z": ["z2"]}, zf)) == 0
    assert all(table.row_sum(a) == 1 for a in table.rows)


def test_residual_rows_sum_to_one(bel_and):
    table = residual_table(bel_and, ["X", "Y"])
    assert all(table.row_sum(a) == 1 for a in table.rows)


def test_residual_table_needs_boxes(m_and):
    with pytest.raises(NonBoxFocalError):
        residual_table(m_and, ["X", "Y"])


def test_forty_sixty_union_cover(forty_sixty):
    for strategy in (Strategy.GREEDY, Strategy.EXHAUSTIVE):
        result = approximate_conditional(forty_sixty, ["X"], strategy)
        assert result.cover is Cover.UNION
        assert result.quality == F(1, 2)
        (focal,) = result.conditional
        assert set(focal.members) == {("x1", "z1"), ("x1", "z2"), ("x2", "z2")}
        (it,) = result.trace.iterations
        assert [c.describe() for c in it.cover] == ["{z1,z2}", "{z2}"]
        assert not is_marginally_consistent(forty_sixty, ["X"], result.conditional)
        assert marginally_correct(forty_sixty, combine_with_marginal(forty_sixty, ["X"], result.conditional))


def test_forty_sixty_tight_cover(forty_sixty):
    for strategy in (Strategy.GREEDY, Strategy.EXHAUSTIVE):
        result = approximate_conditional(forty_sixty, ["X"], strategy, cover="tight")
        assert result.quality == F(7, 10)
        assert len(result.conditional) == 1
        (focal,) = result.conditional
        assert set(focal.members) == {("x1", "z1"), ("x2", "z2")}
        assert not is_marginally_consistent(forty_sixty, ["X"], result.conditional)
        assert marginally_correct(forty_sixty, combine_with_marginal(forty_sixty, ["X"], result.conditional))


def test_tight_cover_is_not_safe_to_condition_on():
    frame = build_frame([("X", ("x1", "x2")), ("Y", ("y1", "y2"))])
    joint = MassFunction(
        frame,
        {box({"X": ["x1"], "Y": ["y1"]}, frame): F(1, 5), box({"X": ["x2"], "Y": ["y1", "y2"]}, frame): F(4, 5)},
    )
    y1 = box({"Y": ["y1"]}, frame.subframe(["Y"]))
    exact = marginalize(condition_on(joint, y1), ["X"])
    assert exact == marginalize(joint, ["X"])

    def posterior(cover):
        cond = approximate_conditional(joint, ["Y"], cover=cover).conditional
        return marginalize(condition_on(combine_with_marginal(joint, ["Y"], cond), y1), ["X"])

    assert posterior("union").is_vacuous
    assert marginally_correct(exact, posterior("union"))
    assert posterior("tight") == MassFunction.categorical(box({"X": ["x1"]}, exact.frame))
    assert not marginally_correct(exact, posterior("tight"))


def test_backtracking_needs_search(backtracking):
    pinned = approximate_conditional(backtracking, ["X"], first_selection=corpus.backtracking_pins())
    assert not pinned.trace.iterations[0].is_exact
    assert pinned.quality < 1

    assert approximate_conditional(backtracking, ["X"]).quality == 1

    searched = approximate_conditional(
        backtracking, ["X"], Strategy.EXHAUSTIVE, first_selection=corpus.backtracking_pins()
    )
    assert searched.quality < 1
    searched = approximate_conditional(backtracking, ["X"], Strategy.EXHAUSTIVE)
    assert searched.quality == 1
    assert all(it.is_exact for it in searched.trace.iterations)
    assert is_marginally_consistent(backtracking, ["X"], searched.conditional)


def test_exhausted_budget_falls_back_to_greedy(backtracking, caplog):
    result = approximate_conditional(backtracking, ["X"], Strategy.EXHAUSTIVE, limits=Limits(search_budget=3))
    assert 0 < result.quality <= 1
    assert "budget" in caplog.text


def test_first_selection_is_checked(backtracking):
    table = residual_table(backtracking, ["X"])
    x3 = box({"X": ["x3"]}, table.p_frame)
    with pytest.raises(MassError):
        approximate_conditional(backtracking, ["X"], first_selection={x3: table.rest_frame.full()})
    with pytest.raises(MassError):
        approximate_conditional(backtracking, ["X"], first_selection={table.p_frame.full(): box({"Y": ["y1"]}, table.rest_frame)})


def test_stochastic_strategy_is_seeded(backtracking):
    with pytest.raises(ValueError):
        approximate_conditional(backtracking, ["X"], Strategy.STOCHASTIC)
    first = approximate_conditional(backtracking, ["X"], "stochastic", seed=7)
    second = approximate_conditional(backtracking, ["X"], "stochastic", seed=7)
    assert first.conditional == second.conditional
    assert first.quality == second.quality
    assert 0 < first.quality <= 1


def test_quality_rejects_foreign_marginals(forty_sixty):
    result = approximate_conditional(forty_sixty, ["X"])
    other = MassFunction.vacuous(forty_sixty.frame.subframe(["X"]))
    with pytest.raises(MassError):
        quality(result.trace, other)


@pytest.mark.parametrize("seed", range(4))
def test_singleton_focals_always_reach_quality_one(seed):
    # 25 instances per seed
    rng = np.random.default_rng(100 + seed)
    for _ in range(25):
        frame = corpus.random_frame(rng, max_variables=3, max_values=3, min_variables=2)
        m = corpus.random_singleton_bpa(rng, frame)
        p = corpus.random_split(rng, frame)
        result = approximate_conditional(m, p)
        assert result.quality == 1
        assert is_cano_type(result.conditional, p)
        assert is_marginally_consistent(m, p, result.conditional)


def _check_quality_semantics(m, p):
    result = approximate_conditional(m, p)
    assert 0 < result.quality <= 1
    assert sum(result.conditional.values()) == 1
    assert is_cano_type(result.conditional, p)
    assert (result.quality == 1) == is_marginally_consistent(m, p, result.conditional)
    assert marginally_correct(m, combine_with_marginal(m, p, result.conditional))


@pytest.mark.parametrize("name", sorted(corpus.conditioning_corpus()))
def test_quality_semantics_on_corpus(name):
    m, p = corpus.conditioning_corpus()[name]
    _check_quality_semantics(m, p)


@pytest.mark.parametrize("seed", range(4))
def test_quality_semantics_on_random_boxes(seed):
    # 50 instances per seed
    rng = np.random.default_rng(200 + seed)
    for _ in range(50):
        frame = corpus.random_frame(rng, max_variables=3, max_values=3, min_variables=2)
        m = corpus.random_box_bpa(rng, frame)
        _check_quality_semantics(m, corpus.random_split(rng, frame))


@pytest.mark.parametrize("cover", list(Cover))
@pytest.mark.parametrize("strategy", list(Strategy))
def test_every_strategy_and_cover_is_marginally_correct(strategy, cover):
    rng = np.random.default_rng(300 + len(strategy.value) + len(cover.value))
    limits = Limits(search_budget=2_000, stochastic_restarts=4)
    for n in range(30):
        frame = corpus.random_frame(rng, max_variables=3, max_values=2, min_variables=2)
        m = corpus.random_box_bpa(rng, frame)
        p = corpus.random_split(rng, frame)
        result = approximate_conditional(m, p, strategy, seed=n, cover=cover, limits=limits)
        assert result.cover is cover
        assert 0 < result.quality <= 1
        assert sum(result.conditional.values()) == 1
        assert is_cano_type(result.conditional, p)
        assert (result.quality == 1) == is_marginally_consistent(m, p, result.conditional)
        assert marginally_correct(m, combine_with_marginal(m, p, result.conditional))


def test_bel_and_consistency_without_decomposition(bel_and, m_and):
    assert is_cano_type(m_and, ["X", "Y"])
    assert is_marginally_consistent(bel_and, ["X", "Y"], m_and)
    combined = combine_with_marginal(bel_and, ["X", "Y"], m_and)
    for name in ("X", "Y", "Z"):
        assert marginalize(combined, [name]) == marginalize(bel_and, [name])
    assert combined != bel_and


def test_correctness_witness(forty_sixty):
    frame = forty_sixty.frame
    sharper = MassFunction.categorical(box({"X": ["x1"], "Z": ["z1"]}, frame))
    found = correctness_witness(forty_sixty, sharper)
    assert found is not None
    name, witness = found
    assert name == "X"
    assert witness.describe() == "{x1}"
    assert correctness_witness(forty_sixty, MassFunction.vacuous(frame)) is None
    joint = correctness_witness(forty_sixty, sharper, joint=True)
    assert joint[0] is None
    assert witness.frame != joint[1].frame


def test_correctness_requires_same_frame(forty_sixty, bel_and):
    with pytest.raises(FrameError):
        correctness_witness(forty_sixty, bel_and)


def test_conditional_independence(bel_and):
    assert not conditional_independence(bel_and, ["X"], ["Y"], ["Z"])
    assert conditional_independence(MassFunction.vacuous(bel_and.frame), ["X"], ["Y"], ["Z"])
    with pytest.raises(FrameError):
        conditional_independence(bel_and, ["X"], ["X"], ["Z"])
    with pytest.raises(FrameError):
        conditional_independence(bel_and, ["X"], [], ["Z"])
