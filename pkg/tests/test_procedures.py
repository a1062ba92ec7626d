import pytest
from hypothesis import given, settings, strategies as st

from fixedwidth.procedures import (GUARANTEED_WIDTH, PROCEDURES, InitialStage, RecordedSource,
                                   conservative_size, cost_batch_policy, min_obs_batch_policy,
                                   min_obs_single_policy, naive_policy, run_conservative,
                                   run_fully_seq_min_obs, run_naive_sequential,
                                   run_seq_batch_min_cost, run_two_stage_min_cost,
                                   run_two_stage_min_obs)
from fixedwidth.sim import BernoulliStreams, make_bernoulli_source
from fixedwidth.stats import CostModel, TargetSpec

TARGET = TargetSpec(0.05, 0.05, 10)
LOOSE = TargetSpec(0.05, 0.1, 6)
SEQUENTIAL = sorted(GUARANTEED_WIDTH - {"conservative"})


def initial_from(streams, m=50):
    return InitialStage(streams.count("x", 0, m), m, streams.count("y", 0, m), m)


def run(name, p_x, p_y, seed, target=LOOSE, costs=CostModel(), trace=True, m=50):
    streams = BernoulliStreams(p_x, p_y, seed)
    return PROCEDURES[name](streams.source(m, m), target, costs, initial_from(streams, m),
                            trace=trace)


class TestConservative:
    def test_sizes(self):
        assert conservative_size(TargetSpec(0.05, 0.05)) == 769
        assert conservative_size(TargetSpec(0.05, 0.1)) == 193

    @given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 2 ** 32))
    @settings(max_examples=25, deadline=None)
    def test_always_achieves(self, px, py, seed):
        out = run_conservative(make_bernoulli_source(px, py, seed), TargetSpec(0.05, 0.05),
                               CostModel(), InitialStage(25, 50, 25, 50))
        assert (out.m_x, out.m_y) == (769, 769)
        assert out.achieved and out.ci.half_width <= 0.05

    def test_cost_excludes_initial_stage(self):
        out = run_conservative(make_bernoulli_source(0.3, 0.2, 1), TargetSpec(0.05, 0.05),
                               CostModel(5, 1), InitialStage(15, 50, 10, 50))
        assert out.total_cost == (769 - 50) * 5 + (769 - 50)
        assert out.observations == 2 * (769 - 50)


class TestTwoStage:
    def test_expert_opinion_symmetric(self):
        out = run_two_stage_min_cost(make_bernoulli_source(0.5, 0.5, 3), TargetSpec(0.05, 0.05),
                                     CostModel(), InitialStage(p_x=0.5, p_y=0.5))
        assert (out.m_x, out.m_y, out.stage_count) == (769, 769, 1)

    def test_no_further_draws_when_planned_sizes_met(self):
        src = RecordedSource([], [])
        out = run_two_stage_min_cost(src, TargetSpec(0.05, 0.05), CostModel(),
                                     InitialStage(1000, 2000, 1000, 2000))
        assert (out.m_x, out.m_y, out.stage_count, out.total_cost) == (2000, 2000, 0, 0)
        assert out.achieved

    def test_min_obs_draws(self):
        out = run_two_stage_min_obs(make_bernoulli_source(0.3, 0.2, 11), TargetSpec(0.05, 0.05),
                                    CostModel(), InitialStage(15, 50, 10, 50), trace=True)
        assert (out.trace[0].b_x, out.trace[0].b_y) == (554, 478)

    def test_min_obs_equal_split(self):
        out = run_two_stage_min_obs(make_bernoulli_source(0.4, 0.4, 2), TargetSpec(0.05, 0.05),
                                    CostModel(), InitialStage(20, 50, 20, 50))
        assert out.m_x == out.m_y

    def test_degenerate_initial_sample(self):
        out = run_two_stage_min_cost(make_bernoulli_source(0.0, 0.0, 5), TargetSpec(0.05, 0.05),
                                     CostModel(), InitialStage(0, 50, 0, 50))
        # minimax planning keeps the plan finite; the raw interval has width 0
        assert out.m_x > 50 and out.ci.half_width == 0.0


class TestPolicies:
    def test_naive_even_and_odd(self):
        even, odd = naive_policy(TARGET), naive_policy(TARGET.with_batch(5))
        assert [even(0, 1, 0, 1, s) for s in (1, 2)] == [(5, 5), (5, 5)]
        assert [odd(0, 1, 0, 1, s) for s in (1, 2, 3)] == [(3, 2), (2, 3), (3, 2)]

    def test_cost_batch_equal_needs(self):
        assert cost_batch_policy(TARGET, CostModel())(25, 50, 25, 50, 1) == (5, 5)

    def test_cost_batch_x_need_zero(self):
        # m_x far above the X target: every draw goes to Y
        assert cost_batch_policy(TARGET, CostModel())(1000, 2000, 5, 10, 1) == (0, 10)

    def test_min_obs_single_tie_goes_to_x(self):
        policy = min_obs_single_policy(TARGET)
        assert policy(20, 50, 20, 50, 1) == (1, 0)
        assert policy(20, 50, 30, 50, 1) == (1, 0)   # 0.4 and 0.6 share tau = 0.24
        assert policy(10, 50, 25, 50, 1) == (0, 1)
        assert policy(25, 50, 10, 50, 1) == (1, 0)

    def test_min_obs_batch_symmetric_half(self):
        assert min_obs_batch_policy(TARGET)(20, 60, 20, 60, 1) == (5, 5)

    def test_min_obs_batch_clamps(self):
        policy = min_obs_batch_policy(TARGET)
        # sqrt(tau_x)(m_y + B) < sqrt(tau_y) m_x gives a negative gamma
        assert policy(25, 500, 25, 50, 1) == (0, 10)
        # and the mirror image exceeds one
        assert policy(25, 50, 25, 500, 1) == (10, 0)

    @given(st.integers(1, 400), st.integers(1, 6), st.data())
    def test_equivalence_on_symmetric_instances(self, m, half, data):
        # equal costs, equal counts and equal means: naive, cost and min-obs batching agree
        target = TARGET.with_batch(2 * half)
        w = data.draw(st.integers(0, m))
        picks = {naive_policy(target)(w, m, w, m, 1),
                 cost_batch_policy(target, CostModel(3, 3))(w, m, w, m, 1),
                 min_obs_batch_policy(target)(w, m, w, m, 1)}
        assert picks == {(half, half)}

    @given(st.integers(1, 500), st.integers(1, 500), st.sampled_from([1, 3, 5]), st.data())
    def test_equal_costs_match_unit_costs(self, mx, my, c, data):
        wx, wy = data.draw(st.integers(0, mx)), data.draw(st.integers(0, my))
        a = cost_batch_policy(TARGET, CostModel(c, c))(wx, mx, wy, my, 1)
        b = cost_batch_policy(TARGET, CostModel())(wx, mx, wy, my, 1)
        assert a == b

    @given(st.integers(1, 500), st.integers(1, 500), st.sampled_from([(1, 1), (5, 1), (1, 3)]),
           st.integers(1, 12), st.data())
    def test_population_swap(self, mx, my, costs, batch, data):
        wx, wy = data.draw(st.integers(0, mx)), data.draw(st.integers(0, my))
        target = TARGET.with_batch(batch)
        for make, kw, kw_swapped in (
                (cost_batch_policy, dict(costs=CostModel(*costs)),
                 dict(costs=CostModel(*reversed(costs)))),
                (min_obs_batch_policy, {}, {})):
            bx, by = make(target, **kw)(wx, mx, wy, my, 1)
            sy, sx = make(target, **kw_swapped)(wy, my, wx, mx, 1)
            assert bx + by == sx + sy == batch
            # round-half-away favours whichever side is passed first, so an
            # exact half-way split may move by one observation
            assert abs(bx - sx) <= 1


class TestSequentialProperties:
    @pytest.mark.parametrize("name", SEQUENTIAL)
    @given(st.sampled_from([0.05, 0.2, 0.5, 0.8]), st.sampled_from([0.1, 0.3, 0.5]),
           st.integers(0, 2 ** 32))
    @settings(max_examples=15, deadline=None)
    def test_stopping_sound_and_budget_conserved(self, name, px, py, seed):
        out = run(name, px, py, seed)
        assert out.achieved and out.ci.half_width <= LOOSE.epsilon
        per_stage = 1 if name == "fully-seq-min-obs" else LOOSE.batch
        assert out.stage_count == len(out.trace)
        for rec in out.trace:
            assert rec.b_x + rec.b_y == per_stage
        # every stage but the last still had H above target
        assert all(rec.half_width > LOOSE.epsilon for rec in out.trace[:-1])
        assert out.m_x + out.m_y == 100 + per_stage * out.stage_count

    @pytest.mark.parametrize("name", sorted(PROCEDURES))
    def test_deterministic(self, name):
        a = run(name, 0.3, 0.2, 42, trace=True)
        b = run(name, 0.3, 0.2, 42, trace=True)
        assert a == b

    def test_stop_check_before_first_stage(self):
        # already narrow enough: no stage at all
        init = InitialStage(1000, 2000, 1000, 2000)
        for name in SEQUENTIAL:
            out = PROCEDURES[name](RecordedSource([], []), LOOSE, CostModel(), init)
            assert out.stage_count == 0 and out.total_cost == 0

    def test_naive_symmetric_increments(self):
        out = run("naive-seq", 0.5, 0.5, 9, target=TARGET)
        assert {(r.b_x, r.b_y) for r in out.trace} == {(5, 5)}

    def test_fully_seq_tie_draws_x_first(self):
        src = RecordedSource([1] * 1000, [1] * 1000)
        out = run_fully_seq_min_obs(src, LOOSE, CostModel(), InitialStage(25, 50, 25, 50),
                                    trace=True)
        assert (out.trace[0].b_x, out.trace[0].b_y) == (1, 0)

    def test_plan_costs_only_change_allocation(self):
        streams = BernoulliStreams(0.3, 0.2, 4)
        init = initial_from(streams)
        priced = run_seq_batch_min_cost(streams.source(50, 50), TARGET, CostModel(5, 1), init,
                                        plan_costs=CostModel(1, 1))
        unit = run_seq_batch_min_cost(streams.source(50, 50), TARGET, CostModel(1, 1), init)
        assert (priced.m_x, priced.m_y) == (unit.m_x, unit.m_y)
        assert priced.total_cost == 5 * (unit.m_x - 50) + (unit.m_y - 50)

    def test_recorded_source_exhaustion(self):
        with pytest.raises(IndexError, match="exhausted"):
            run_naive_sequential(RecordedSource([0, 1], [0, 1]), LOOSE, CostModel(),
                                 InitialStage(25, 50, 25, 50))


class TestInitialStage:
    def test_prior_required_for_empty_population(self):
        with pytest.raises(ValueError, match="required"):
            InitialStage(0, 0, 5, 10)

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_prior_range(self, p):
        with pytest.raises(ValueError):
            InitialStage(p_x=p, p_y=0.5)

    def test_estimates(self):
        assert InitialStage(0, 4, 2, 4).estimates() == (pytest.approx(1 / 6), 0.5)
        assert InitialStage(p_x=0.1, p_y=0.2).estimates() == (0.1, 0.2)
