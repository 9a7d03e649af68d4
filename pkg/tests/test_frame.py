import pytest
from hypothesis import given
import hypothesis.strategies as st

from eclc import (
    Atom,
    CostModel,
    Diamond,
    Frame,
    PathCost,
    UnknownWorldError,
    World,
    accessible,
    eval_diamond,
    eval_prop,
    hop_distance,
    path_cost,
)
from gen import small_frames

from oracles import brute_force_hop_distance

PHI = Atom("Phi")


def chain(energies=(10.0, 10.0, 10.0), deltas=(2.0, 2.0)):
    worlds = [World(f"w{i}", e, 0.0, 4) for i, e in enumerate(energies)]
    edges = [(f"w{i}", f"w{i+1}", d) for i, d in enumerate(deltas)]
    return Frame(worlds, edges)


class TestAccessible:
    def test_edge_within_budget(self):
        frame = chain(energies=(10.0, 10.0), deltas=(2.0,))
        assert accessible(frame, "w0", "w1") is True

    def test_edge_exceeding_budget(self):
        frame = chain(energies=(10.0, 10.0), deltas=(12.0,))
        assert accessible(frame, "w0", "w1") is False

    def test_reverse_of_one_way_chain(self):
        frame = chain()
        assert accessible(frame, "w1", "w0") is False

    def test_unknown_world_raises(self):
        frame = chain()
        with pytest.raises(UnknownWorldError):
            accessible(frame, "w0", "zz")
        with pytest.raises(UnknownWorldError):
            accessible(frame, "zz", "w0")

    @given(small_frames())
    def test_accessible_implies_edge(self, frame):
        for src in frame.worlds:
            for dst in frame.worlds:
                if accessible(frame, src, dst):
                    assert (src, dst) in frame.edges

    @given(small_frames(), st.floats(min_value=0, max_value=100, allow_nan=False))
    def test_monotone_in_energy(self, frame, boost):
        before = {
            (s, d): accessible(frame, s, d) for s in frame.worlds for d in frame.worlds
        }
        richer = frame.copy()
        for world in richer.worlds.values():
            world.energy += boost
        for (s, d), was in before.items():
            if was:
                assert accessible(richer, s, d)


class TestEvalDiamond:
    def test_reachable_within_budget(self, unit_model):
        frame = chain(deltas=(2.0, 2.0))
        frame.worlds["w1"].props[PHI] += 1
        assert eval_diamond(frame, "w0", PHI, 3.0, unit_model) is True

    def test_zero_budget_with_positive_edges(self, unit_model):
        frame = chain(deltas=(2.0, 2.0))
        frame.worlds["w1"].props[PHI] += 1
        assert eval_diamond(frame, "w0", PHI, 0.0, unit_model) is False

    def test_absent_everywhere(self, unit_model):
        frame = chain()
        assert eval_diamond(frame, "w0", PHI, 99.0, unit_model) is False

    def test_brute_force_successor_scan(self, unit_model):
        frame = Frame(
            [World("a", 5.0, 0.0, 2), World("b", 5.0, 0.0, 2), World("c", 5.0, 0.0, 2)],
            [("a", "b", 2.0), ("a", "c", 7.0)],
        )
        frame.worlds["b"].props[PHI] += 1
        frame.worlds["c"].props[PHI] += 1
        expected = any(
            delta <= frame.worlds["a"].energy and delta <= 3.0 and PHI in frame.worlds[dst].props
            for (src, dst), delta in frame.edges.items()
            if src == "a"
        )
        assert eval_diamond(frame, "a", PHI, 3.0, unit_model) is expected is True

    @given(small_frames(), st.floats(min_value=0, max_value=30, allow_nan=False),
           st.floats(min_value=0, max_value=30, allow_nan=False))
    def test_monotone_in_budget(self, frame, budget, extra):
        model = CostModel({})
        for wid in frame.worlds:
            frame.worlds[wid].props[PHI] += 1
        for src in frame.worlds:
            if eval_diamond(frame, src, PHI, budget, model):
                assert eval_diamond(frame, src, PHI, budget + extra, model)


class TestEvalProp:
    def test_membership(self, unit_model):
        frame = chain()
        frame.worlds["w0"].props[PHI] += 1
        assert eval_prop(frame, "w0", PHI, unit_model) == 1
        assert eval_prop(frame, "w1", PHI, unit_model) == 0

    def test_diamond_dispatch(self, unit_model):
        frame = chain(deltas=(2.0, 2.0))
        frame.worlds["w1"].props[PHI] += 1
        assert eval_prop(frame, "w0", Diamond(3.0, PHI), unit_model) == 1
        assert eval_prop(frame, "w0", Diamond(1.0, PHI), unit_model) == 0


class TestHopDistance:
    def test_identity(self):
        frame = chain()
        assert hop_distance(frame, "w0", "w0") == 0

    def test_two_step_chain(self):
        frame = chain()
        assert hop_distance(frame, "w0", "w2") == 2

    def test_unreachable_reverse(self):
        frame = chain()
        assert hop_distance(frame, "w2", "w0") is None

    def test_infeasible_edge_blocks(self):
        frame = chain(energies=(1.0, 10.0, 10.0), deltas=(5.0, 2.0))
        assert hop_distance(frame, "w0", "w2") is None

    @given(small_frames())
    def test_matches_brute_force(self, frame):
        ids = list(frame.worlds)
        for src in ids:
            for dst in ids:
                assert hop_distance(frame, src, dst) == brute_force_hop_distance(frame, src, dst)

    @given(small_frames())
    def test_triangle_inequality(self, frame):
        ids = list(frame.worlds)
        dist = {(a, b): hop_distance(frame, a, b) for a in ids for b in ids}
        for a in ids:
            for b in ids:
                for c in ids:
                    ab, bc, ac = dist[(a, b)], dist[(b, c)], dist[(a, c)]
                    if ab is not None and bc is not None:
                        assert ac is not None and ac <= ab + bc


class TestPathCost:
    def test_chain_cost(self):
        frame = chain(deltas=(2.0, 3.0))
        assert path_cost(frame, "w0", "w2") == PathCost(2, 5.0)

    def test_unreachable(self):
        frame = chain()
        assert path_cost(frame, "w2", "w0") is None

    def test_prefers_fewer_hops(self):
        frame = Frame(
            [World("a", 9.0, 0.0, 2), World("b", 9.0, 0.0, 2), World("c", 9.0, 0.0, 2)],
            [("a", "c", 9.0), ("a", "b", 0.5), ("b", "c", 0.5)],
        )
        assert path_cost(frame, "a", "c") == PathCost(1, 9.0)


class TestFrameValidation:
    def test_duplicate_world(self):
        with pytest.raises(ValueError):
            Frame([World("w", 1.0, 0.0, 1), World("w", 2.0, 0.0, 1)], [])

    def test_edge_to_undeclared_world(self):
        with pytest.raises(ValueError):
            Frame([World("w", 1.0, 0.0, 1)], [("w", "zz", 1.0)])

    def test_negative_delta_e(self):
        with pytest.raises(ValueError):
            Frame([World("a", 1.0, 0.0, 1), World("b", 1.0, 0.0, 1)], [("a", "b", -1.0)])

    def test_world_invariants(self):
        with pytest.raises(ValueError):
            World("w", -1.0, 0.0, 1)
        with pytest.raises(ValueError):
            World("w", 1.0, -0.5, 1)
        with pytest.raises(ValueError):
            World("w", 1.0, 0.0, 0)

    def test_copy_is_deep(self):
        frame = chain()
        frame.worlds["w0"].props[PHI] += 1
        dup = frame.copy()
        dup.worlds["w0"].props[PHI] += 5
        dup.worlds["w0"].energy = 0.0
        assert frame.worlds["w0"].props[PHI] == 1
        assert frame.worlds["w0"].energy == 10.0
