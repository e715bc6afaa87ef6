"""Model registry, metadata, and the spatial PD reference model."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from evonet.attrs import integer, parse_attr_range, real
from evonet.errors import ModelError
from evonet.generators import GridSpec, Neighborhood, square_grid
from evonet.graph import build_graph
from evonet.models import (
    Model,
    ModelContext,
    ModelMeta,
    ModelRegistry,
    PD_META,
    PDParams,
    PrisonersDilemma,
    meta_from_json,
    pd_accumulate,
    pd_payoff,
    resolve_model,
)
from evonet.rng import Pcg32

from oracle import pd_oracle_run

PD_SCHEMA = {"strategy": parse_attr_range("int{0,1,2,3}")}


def make_ctx(graph, temptation=1.8, seed=0):
    return ModelContext(graph=graph, params={"temptation": real(temptation)}, rng=Pcg32(seed))


def stepped(graph, temptation, steps=1):
    model = PrisonersDilemma()
    ctx = make_ctx(graph, temptation)
    assert model.init(ctx), ctx.error
    for _ in range(steps):
        model.step(ctx)
    return graph


class TestRegistry:
    def test_round_trip(self):
        reg = ModelRegistry()
        meta = ModelMeta(id="m1", version=1)
        reg.register(meta, PrisonersDilemma)
        assert reg.resolve("m1").factory is PrisonersDilemma

    def test_unknown_id_names_the_id(self):
        reg = ModelRegistry()
        with pytest.raises(ModelError, match="nosuch"):
            reg.resolve("nosuch")

    def test_duplicate_registration(self):
        reg = ModelRegistry()
        meta = ModelMeta(id="m1", version=1)
        reg.register(meta, PrisonersDilemma)
        with pytest.raises(ModelError, match="already registered"):
            reg.register(ModelMeta(id="m1", version=2), PrisonersDilemma)

    def test_builtin_pd_resolves_by_default(self):
        plugin = resolve_model("prisonersDilemma")
        assert plugin.meta.id == "prisonersDilemma"


class TestMetadata:
    def test_shipped_pd_metadata(self):
        assert PD_META.id == "prisonersDilemma"
        assert PD_META.version == 1
        assert PD_META.node_attrs["strategy"].to_spec() == "int{0,1,2,3}"
        assert PD_META.params["temptation"].to_spec() == "double[0,10]"
        assert PD_META.edge_attrs == {}

    def test_meta_from_mapping(self):
        meta = meta_from_json(
            {"id": "toy", "version": 3, "nodeAttrs": {"alive": "bool"}, "params": {}}
        )
        assert meta.node_attrs["alive"].to_spec() == "bool"

    def test_missing_key(self):
        with pytest.raises(ModelError, match="id"):
            meta_from_json({"version": 1})


class TestPayoff:
    T18 = PDParams(temptation=1.8)

    def test_reward(self):
        assert pd_payoff(True, True, self.T18) == 1.0

    def test_punishment(self):
        assert pd_payoff(False, False, self.T18) == 0.0

    def test_temptation_and_sucker(self):
        assert pd_payoff(False, True, self.T18) == 1.8
        assert pd_payoff(True, False, self.T18) == 0.0

    def test_temptation_range_enforced(self):
        with pytest.raises(ModelError):
            PDParams(temptation=10.5)
        with pytest.raises(ModelError):
            PDParams(temptation=-0.1)


class TestAccumulate:
    def test_cooperator_surrounded_by_cooperators(self):
        # star: center 0 with 4 cooperating neighbors -> 4R + self R = 5
        g = build_graph(False, 5, [(0, i) for i in range(1, 5)], node_schema=PD_SCHEMA)
        assert pd_accumulate(g, 0, PDParams(1.8)) == 5.0

    def test_defector_surrounded_by_cooperators(self):
        g = build_graph(False, 5, [(0, i) for i in range(1, 5)], node_schema=PD_SCHEMA)
        g.set_attr(0, "strategy", integer(1))
        assert pd_accumulate(g, 0, PDParams(1.8)) == pytest.approx(7.2)

    def test_isolated_cooperator_self_interaction_only(self):
        g = build_graph(False, 1, [], node_schema=PD_SCHEMA)
        assert pd_accumulate(g, 0, PDParams(1.8)) == 1.0

    @given(
        st.integers(2, 9),
        st.integers(0, 2**32),
        st.floats(min_value=0.0, max_value=10.0, allow_nan=False),
    )
    @settings(max_examples=40)
    def test_bounds(self, n, seed, t):
        rng = Pcg32(seed)
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.next_bool()]
        g = build_graph(False, n, pairs, node_schema=PD_SCHEMA)
        for i in range(n):
            g.set_attr(i, "strategy", integer(rng.next_int(0, 3)))
        p = PDParams(t)
        for i in range(n):
            total = pd_accumulate(g, i, p)
            assert 0.0 <= total <= (g.degree(i) + 1) * max(1.0, t)


class TestInit:
    def test_valid_graph(self):
        g = square_grid(GridSpec(3, 3), node_schema=PD_SCHEMA)
        model = PrisonersDilemma()
        ctx = make_ctx(g, 1.8)
        assert model.init(ctx) is True
        assert model._params.temptation == 1.8

    def test_strategy_out_of_encoding_fails_with_message(self):
        g = square_grid(GridSpec(3, 3), node_schema=PD_SCHEMA)
        g.column("strategy")[2] = 7  # bypass validation on purpose
        model = PrisonersDilemma()
        ctx = make_ctx(g)
        assert model.init(ctx) is False
        assert "7" in ctx.error

    def test_missing_param_fails(self):
        g = square_grid(GridSpec(3, 3), node_schema=PD_SCHEMA)
        ctx = ModelContext(graph=g, params={}, rng=Pcg32(0))
        assert PrisonersDilemma().init(ctx) is False
        assert "temptation" in ctx.error


def defection_ids(graph):
    strat = np.asarray(graph.column("strategy"))
    return set(np.flatnonzero(strat % 2 == 1).tolist())


class TestStep:
    def test_all_cooperators_is_fixed_point(self):
        g = square_grid(GridSpec(7, 7, periodic=True), node_schema=PD_SCHEMA)
        stepped(g, 1.8, steps=5)
        assert defection_ids(g) == set()
        assert set(np.asarray(g.column("strategy")).tolist()) == {0}

    def test_all_defectors_is_fixed_point(self):
        g = square_grid(GridSpec(6, 5), node_schema=PD_SCHEMA)
        for i in range(g.node_count):
            g.set_attr(i, "strategy", integer(1))
        stepped(g, 1.8, steps=5)
        assert set(np.asarray(g.column("strategy")).tolist()) == {1}

    def test_fig5_step1_closed_cross(self):
        g = square_grid(GridSpec(99, 99, periodic=True), node_schema=PD_SCHEMA)
        g.set_attr(4900, "strategy", integer(1))
        stepped(g, 1.8, steps=1)
        cross = {4900, 4900 - 99, 4900 + 99, 4899, 4901}
        assert defection_ids(g) == cross
        strat = np.asarray(g.column("strategy"))
        assert strat[4900] == 1  # stayed defector
        assert all(strat[i] == 3 for i in cross - {4900})  # new defectors
        coop = int((strat % 2 == 0).sum())
        assert coop == 9796

    def test_fig5_step2_manhattan_ball(self):
        g = square_grid(GridSpec(99, 99, periodic=True), node_schema=PD_SCHEMA)
        g.set_attr(4900, "strategy", integer(1))
        stepped(g, 1.8, steps=2)
        ball = set()
        for dc in range(-2, 3):
            for dr in range(-2, 3):
                if abs(dc) + abs(dr) <= 2:
                    ball.add((49 + dr) * 99 + (49 + dc))
        assert defection_ids(g) == ball
        assert len(ball) == 13

    def test_matches_oracle_on_small_grids(self):
        for periodic in (False, True):
            for t in (0.5, 1.8):
                for seed in (0, 1, 2):
                    spec = GridSpec(5, 5, periodic=periodic)
                    g = square_grid(spec, node_schema=PD_SCHEMA)
                    rng = Pcg32(seed)
                    init = [rng.next_int(0, 3) for _ in range(25)]
                    for i, s in enumerate(init):
                        g.set_attr(i, "strategy", integer(s))
                    adjacency = [g.neighbors(i) for i in range(25)]
                    expected = pd_oracle_run(init, adjacency, t, steps=10)
                    model = PrisonersDilemma()
                    ctx = make_ctx(g, t)
                    assert model.init(ctx)
                    for step_expected in expected:
                        model.step(ctx)
                        got = np.asarray(g.column("strategy")).tolist()
                        assert got == step_expected

    def test_matches_oracle_on_moore_grid(self):
        # Moore degree 8 reaches payoff coincidences like 5T == 9 at
        # T=1.8; bit-identical accumulation keeps engine and oracle
        # agreeing anyway.
        spec = GridSpec(5, 5, periodic=True, neighborhood=Neighborhood.MOORE)
        g = square_grid(spec, node_schema=PD_SCHEMA)
        rng = Pcg32(9)
        init = [rng.next_int(0, 3) for _ in range(25)]
        for i, s in enumerate(init):
            g.set_attr(i, "strategy", integer(s))
        adjacency = [g.neighbors(i) for i in range(25)]
        expected = pd_oracle_run(init, adjacency, 1.8, steps=15)
        model = PrisonersDilemma()
        ctx = make_ctx(g, 1.8)
        assert model.init(ctx)
        for step_expected in expected:
            model.step(ctx)
            assert np.asarray(g.column("strategy")).tolist() == step_expected

    def test_isolated_nodes_keep_their_flag(self):
        g = build_graph(False, 3, [], node_schema=PD_SCHEMA)
        g.set_attr(1, "strategy", integer(1))
        stepped(g, 1.8, steps=3)
        assert np.asarray(g.column("strategy")).tolist() == [0, 1, 0]

    def test_recoding_marks_new_cooperators(self):
        # One defector between two cooperators on a path; with T=0.5 the
        # center cooperator pair outearns the defector after step 1 and it
        # flips back, recoded 2.
        g = build_graph(False, 5, [(0, 1), (1, 2), (2, 3), (3, 4)], node_schema=PD_SCHEMA)
        g.set_attr(2, "strategy", integer(1))
        init = [0, 0, 1, 0, 0]
        adjacency = [g.neighbors(i) for i in range(5)]
        expected = pd_oracle_run(init, adjacency, 0.5, steps=4)
        model = PrisonersDilemma()
        ctx = make_ctx(g, 0.5)
        assert model.init(ctx)
        for step_expected in expected:
            model.step(ctx)
            assert np.asarray(g.column("strategy")).tolist() == step_expected


class TestModelContract:
    def test_default_model_has_no_step(self):
        with pytest.raises(NotImplementedError):
            Model().step(None)

    def test_converged_default_false(self):
        g = build_graph(False, 1, [], node_schema=PD_SCHEMA)
        assert PrisonersDilemma().converged(make_ctx(g)) is False
