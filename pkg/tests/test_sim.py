import random
from dataclasses import replace

import pytest

from eclc import (
    Atom,
    Bang,
    CostModel,
    ScenarioError,
    Tensor,
    decohere,
    derive_trial_seed,
    parse_scenario,
    run_accessibility,
    run_coherence,
    run_reciprocity,
    run_scenario,
)
from eclc import scenarios
from eclc.sim import chain_order, report_to_json, per_world_csv, run_reciprocity_trial, trials_csv


def load(name):
    return parse_scenario(scenarios.read(name))


class TestDeriveTrialSeed:
    def test_deterministic(self):
        assert derive_trial_seed(42, 7) == derive_trial_seed(42, 7)

    def test_distinct_streams(self):
        assert derive_trial_seed(42, 0) != derive_trial_seed(42, 1)

    def test_64_bit_range(self):
        for index in range(50):
            assert 0 <= derive_trial_seed((1 << 64) - 1, index) < (1 << 64)


class TestDecohere:
    def test_atom_rewrite(self):
        assert decohere(Atom("Entangled", ("A", "B"))) == Atom("Decohered_Entangled", ("A", "B"), False)

    def test_classical_leaf_untouched(self):
        classical = Atom("Classical", ("o",), False)
        assert decohere(classical) == classical

    def test_composite_rewrites_each_coherent_leaf(self):
        phi = Tensor(Atom("E"), Atom("Classical", ("o",), False))
        out = decohere(phi)
        assert out == Tensor(Atom("Decohered_E", (), False), Atom("Classical", ("o",), False))

    def test_wrapper_preserved(self):
        assert decohere(Bang(Atom("Q"))) == Bang(Atom("Decohered_Q", (), False))


class TestChainOrder:
    def test_shipped_chain(self):
        assert chain_order(load("coherence").frame) == ["w1", "w2", "w3"]

    def test_rejects_branching(self):
        config = parse_scenario(
            "world a { energy=1.0, kappa=0.0, lambda=1 }\n"
            "world b { energy=1.0, kappa=0.0, lambda=1 }\n"
            "world c { energy=1.0, kappa=0.0, lambda=1 }\n"
            "edge a -> b { deltaE=0.0 }\nedge a -> c { deltaE=0.0 }\n"
        )
        with pytest.raises(ScenarioError):
            chain_order(config.frame)

    def test_rejects_two_components(self):
        config = parse_scenario(
            "world a { energy=1.0, kappa=0.0, lambda=1 }\n"
            "world b { energy=1.0, kappa=0.0, lambda=1 }\n"
        )
        with pytest.raises(ScenarioError):
            chain_order(config.frame)


class TestRunCoherence:
    def test_shipped_trajectory(self):
        report = run_coherence(load("coherence"))
        pis = [row.pi for row in report.per_world]
        assert pis == [1.0, 0.61, 0.19]
        assert report.fit is not None
        assert report.fit.rate == pytest.approx(0.7631517470916164, abs=1e-9)

    def test_pi_strictly_decreasing(self):
        report = run_coherence(load("coherence"))
        pis = [row.pi for row in report.per_world]
        assert all(a > b for a, b in zip(pis, pis[1:]))

    def test_zero_inflation_limit(self):
        # vanishing coupling: the curvature surcharge goes to zero and
        # nothing decoheres, whatever the budgets
        config = load("coherence")
        config = replace(config, cost_model=CostModel({}, default_cost=1.0, alpha=1e-12))
        for world in config.frame.worlds.values():
            world.lam = 100
        report = run_coherence(config)
        assert [row.pi for row in report.per_world] == [1.0, 1.0, 1.0]

    def test_kind_mismatch(self):
        with pytest.raises(ScenarioError):
            run_coherence(load("reciprocity"))

    def test_monotone_over_random_chains(self):
        rng = random.Random(31337)
        for _ in range(25):
            n = rng.randint(2, 5)
            kappas = sorted(round(rng.uniform(0, 3), 2) for _ in range(n))
            lines = ["scenario coherence", f"alpha = {rng.choice([0.25, 0.75, 1.5])}"]
            for i in range(n):
                lines.append(
                    f"world w{i} {{ energy={round(rng.uniform(0, 30), 1)}, kappa={kappas[i]}, lambda=6 }}"
                )
            for i in range(n - 1):
                lines.append(f"edge w{i} -> w{i+1} {{ deltaE=0.0 }}")
            for _ in range(rng.randint(1, 12)):
                phi = rng.choice(["E", "E * Entangled(A,B)", "~Junk", "Quantum(q)"])
                lines.append(f"prop w0 : {phi}")
            report = run_coherence(parse_scenario("\n".join(lines)))
            pis = [row.pi for row in report.per_world]
            assert all(a >= b for a, b in zip(pis, pis[1:])), pis

    def test_mean_depth_reported(self):
        report = run_coherence(load("coherence"))
        assert [row.mean_proof_depth for row in report.per_world] == [3.0, 3.0, 3.0]


class TestRunReciprocity:
    def test_shipped_split(self):
        report = run_reciprocity(load("reciprocity"))
        forward = [t for t in report.trials if t.direction == "forward"]
        reverse = [t for t in report.trials if t.direction == "reverse"]
        assert sum(t.success for t in forward) == 50
        assert sum(t.success for t in reverse) == 24
        assert len(report.trials) == 100

    def test_noise_zero_is_deterministic(self):
        config = replace(load("reciprocity"), noise=0.0)
        report = run_reciprocity(config)
        for direction in ("forward", "reverse"):
            rates = {t.success for t in report.trials if t.direction == direction}
            assert len(rates) == 1  # all trials identical: 0% or 100%

    def test_symmetry_control(self):
        # symmetric capacities, costs, and edge weights with no jitter:
        # any asymmetry would be an implementation artifact
        base = scenarios.read("reciprocity").replace("lambda=3", "lambda=12").replace("noise = 0.8", "noise = 0.0")
        report = run_reciprocity(parse_scenario(base))
        forward = sum(t.success for t in report.trials if t.direction == "forward")
        reverse = sum(t.success for t in report.trials if t.direction == "reverse")
        assert forward == reverse == 50
        starved = base.replace("lambda=12", "lambda=1")
        report = run_reciprocity(parse_scenario(starved))
        forward = sum(t.success for t in report.trials if t.direction == "forward")
        reverse = sum(t.success for t in report.trials if t.direction == "reverse")
        assert forward == reverse == 0

    def test_trial_order_invariance(self):
        config = load("reciprocity")
        report = run_reciprocity(config)
        indices = list(range(config.trials))
        random.Random(5).shuffle(indices)
        permuted = [run_reciprocity_trial(config, index, config.seed) for index in indices]
        fwd = sum(f.success for f, _ in permuted)
        rev = sum(r.success for _, r in permuted)
        assert fwd == sum(t.success for t in report.trials if t.direction == "forward")
        assert rev == sum(t.success for t in report.trials if t.direction == "reverse")

    def test_requires_two_worlds(self):
        with pytest.raises(ScenarioError):
            run_reciprocity(replace(load("coherence"), scenario_kind="reciprocity"))

    def test_per_world_rows(self):
        report = run_reciprocity(load("reciprocity"))
        assert [row.world for row in report.per_world] == ["wA", "wB"]
        assert report.per_world[0].access_fraction == 1.0
        assert report.per_world[1].access_fraction == pytest.approx(0.48)


class TestRunAccessibility:
    def test_shipped_decline(self):
        report = run_accessibility(load("accessibility"))
        access = [row.access_fraction for row in report.per_world]
        assert access[0] == 1.0
        assert access[-1] == 0.0
        assert all(a >= b for a, b in zip(access, access[1:]))
        assert access[2] == pytest.approx(22 / 30)

    def test_entropy_trace_starts_at_zero(self):
        report = run_accessibility(load("accessibility"))
        assert report.per_world[0].entropy == 0.0

    def test_unbounded_capacity_full_access(self):
        text = scenarios.read("accessibility").replace("lambda=8", "lambda=100")
        text = "\n".join(
            line if not line.startswith("observer") else line.rsplit("=", 1)[0] + "=4"
            for line in text.splitlines()
        )
        report = run_accessibility(parse_scenario(text))
        assert [row.access_fraction for row in report.per_world] == [1.0] * 5

    def test_kind_mismatch(self):
        with pytest.raises(ScenarioError):
            run_accessibility(load("coherence"))

    def test_needs_observers(self):
        text = "\n".join(
            line for line in scenarios.read("accessibility").splitlines() if not line.startswith("observer")
        )
        with pytest.raises(ScenarioError):
            run_accessibility(parse_scenario(text))


class TestReports:
    def test_bit_identical_runs(self):
        for name in scenarios.NAMES:
            first = run_scenario(load(name))
            second = run_scenario(load(name))
            assert report_to_json(first) == report_to_json(second)
            assert per_world_csv(first) == per_world_csv(second)
            assert trials_csv(first) == trials_csv(second)

    def test_csv_shapes(self):
        report = run_scenario(load("reciprocity"))
        lines = trials_csv(report).splitlines()
        assert lines[0] == "trial,direction,success,proof_depth,failure_reason"
        assert len(lines) == 101
        per_world = per_world_csv(report).splitlines()
        assert per_world[0] == "world,kappa,pi,access_fraction,entropy,mean_proof_depth"
        assert len(per_world) == 3

    def test_json_fields_per_kind(self):
        coherence = run_scenario(load("coherence"))
        assert coherence.fit is not None and coherence.fisher_p is None
        reciprocity = run_scenario(load("reciprocity"))
        assert reciprocity.fit is None and reciprocity.fisher_p is not None
        accessibility = run_scenario(load("accessibility"))
        assert accessibility.fit is None and accessibility.fisher_p is None

    def test_seed_echoed(self):
        report = run_scenario(load("reciprocity"))
        assert report.seed == 9
