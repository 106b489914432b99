import math

import numpy as np
import pytest

from lobound.exceptions import InputError, SolverError
from lobound.fock import BeamSplitter, gate_custom, gate_ns, gate_sign
from lobound.primal import (
    NetworkPoint,
    build_constraints,
    convex_point,
    inner_max,
    optimal_point,
    outer_search,
    point_probability,
    random_eps,
    simulate_gate,
    success_probability,
    sweep_n,
)
from tests.conftest import NS_KNEE


class TestNetworkPoint:
    def test_valid(self):
        point = NetworkPoint(BeamSplitter(0.5), [0.6, 0.8j], [0.5, 0.5])
        assert point.n == 1
        assert np.array_equal(point.alpha, [0.6, 0.0])
        assert np.array_equal(point.beta, [0.0, 0.8])
        with pytest.raises(ValueError):
            point.x[0] = 1.0

    def test_unnormalized_eps(self):
        with pytest.raises(InputError):
            NetworkPoint(BeamSplitter(0.5), [1.0, 1.0], [0.0, 0.0])

    def test_weights_outside_ball(self):
        with pytest.raises(InputError):
            NetworkPoint(BeamSplitter(0.5), [1.0, 0.0], [1.0, 0.1])

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            NetworkPoint(BeamSplitter(0.5), [1.0, 0.0], [0.0])

    def test_as_dict(self, ns_point):
        data = ns_point.as_dict()
        assert data["t"] == ns_point.bs.t
        assert data["n"] == 2
        assert len(data["eps"]) == len(data["x"]) == 3


class TestConstraints:
    def test_shapes(self, ns, rng):
        cs = build_constraints(ns, BeamSplitter(0.3, 1.0), random_eps(rng, 4))
        assert cs.c.shape == cs.d.shape == (3, 5)
        assert cs.cutoff == 2
        assert cs.size == 5
        assert len(cs.equality_rows()) == 2 + 3

    def test_unnormalized(self, ns):
        with pytest.raises(InputError):
            build_constraints(ns, BeamSplitter(0.3), [0.5, 0.5])

    def test_real_gate_real_eps(self, ns):
        # real gate, phi = 0 and real eps: no imaginary constraint parts
        cs = build_constraints(ns, BeamSplitter(-0.4), [0.6, 0.8])
        assert np.all(cs.d == 0.0)


class TestInnerMax:
    def test_identity(self):
        identity = gate_custom([0.0, 0.0])
        assert success_probability(identity, BeamSplitter(1.0), [1.0, 0.0, 0.0]) == pytest.approx(
            1.0
        )

    def test_identity_splitter_cannot_flip_sign(self, ns):
        assert success_probability(ns, BeamSplitter(1.0), [1.0, 0.0, 0.0]) == 0.0

    def test_solution_satisfies_constraints(self, ns, rng):
        for _ in range(10):
            cs = build_constraints(ns, BeamSplitter(rng.uniform(-1, 1)), random_eps(rng, 5))
            solution = inner_max(cs)
            assert solution.amplitude >= 0.0
            assert np.linalg.norm(solution.x) <= 1.0 + 1e-12
            assert np.all(np.abs(cs.residuals(solution.x)) <= 1e-10)

            if solution.amplitude > 0:
                assert cs.c[0] @ solution.x == pytest.approx(solution.amplitude)

    def test_optimal_point(self, ns, rng):
        bs = BeamSplitter(0.2, 0.4)
        eps = random_eps(rng, 3)
        point, probability = optimal_point(ns, bs, eps)
        assert probability == pytest.approx(success_probability(ns, bs, eps))
        assert point_probability(point, ns) == pytest.approx(probability)

    def test_sign_of_eps_irrelevant(self, ns, rng):
        for _ in range(10):
            bs = BeamSplitter(rng.uniform(-1, 1), rng.uniform(0, 6))
            eps = random_eps(rng, 6)
            flipped = inner_max(build_constraints(ns, bs, -eps)).amplitude
            assert flipped == pytest.approx(inner_max(build_constraints(ns, bs, eps)).amplitude)

    def test_simulation_reproduces_amplitude(self, ns, rng):
        y = np.array([0.6, 0.48j, 0.64])

        for _ in range(10):
            bs = BeamSplitter(rng.uniform(-1, 1), rng.uniform(0, 6))
            point, probability = optimal_point(ns, bs, random_eps(rng, 8))
            assert probability > 0
            result = simulate_gate(point, ns, y)
            assert result.probability == pytest.approx(probability, abs=1e-10)
            assert result.fidelity == pytest.approx(1.0, abs=1e-9)


class TestRandomEps:
    def test_normalized(self, rng):
        for n in range(6):
            eps = random_eps(rng, n)
            assert eps.shape == (n + 1,)
            assert abs(np.sum(np.abs(eps) ** 2) - 1.0) <= 1e-14

    def test_seeded(self):
        first = random_eps(np.random.default_rng(3), 4)
        assert np.array_equal(first, random_eps(np.random.default_rng(3), 4))

    def test_negative(self, rng):
        with pytest.raises(InputError):
            random_eps(rng, -1)

    def test_real(self, rng):
        eps = random_eps(rng, 5, real=True)
        assert np.all(eps.imag == 0.0)
        assert abs(np.sum(eps.real ** 2) - 1.0) <= 1e-14


class TestConvexPoint:
    def test_ns_reference(self, ns, knee_splitter):
        point, probability = convex_point(ns, knee_splitter, 2)
        assert probability == pytest.approx(0.25, abs=1e-9)
        assert point.bs.t == NS_KNEE

    def test_reference_fixture(self, ns, ns_point):
        assert point_probability(ns_point, ns) == pytest.approx(0.25, abs=1e-9)

    def test_polygon_loss(self, phase_gate):
        # the square keeps at least cos(pi / 4)^2 of the finer polygon's probability
        bs = BeamSplitter(0.3, 0.5)
        found = {sides: convex_point(phase_gate, bs, 4, sides=sides) for sides in (4, 64)}
        coarse, fine = (0.0 if found[s] is None else found[s][1] for s in (4, 64))
        assert coarse >= 0.5 * fine - 1e-12

    def test_never_exceeds_quarter(self, ns, rng):
        for _ in range(20):
            bs = BeamSplitter(rng.uniform(-1, 1), rng.uniform(0, 2 * math.pi))
            found = convex_point(ns, bs, int(rng.integers(0, 5)))

            if found is not None:
                assert found[1] <= 0.25 + 1e-9

    def test_identity_splitter(self, ns):
        assert convex_point(ns, BeamSplitter(1.0), 2) is None

    def test_invalid(self, ns, knee_splitter):
        with pytest.raises(InputError):
            convex_point(ns, knee_splitter, -1)
        with pytest.raises(InputError):
            convex_point(ns, knee_splitter, 2, sides=5)


class TestOuterSearch:
    def test_bounded_and_seeded(self, ns):
        first = outer_search(ns, 2, restarts=3, seed=7)
        second = outer_search(ns, 2, restarts=3, seed=7)
        assert first.probability == second.probability
        assert first.as_dict() == second.as_dict()
        assert 0.0 < first.probability <= 0.25 + 1e-9
        assert first.max_evaluated <= 0.25 + 1e-9
        assert first.restarts == 3
        assert first.failed == 0
        assert len(first.outcomes) == 3

    def test_worker_count_irrelevant(self, ns):
        serial = outer_search(ns, 2, restarts=2, seed=11, workers=1)
        pooled = outer_search(ns, 2, restarts=2, seed=11, workers=2)
        assert serial.as_dict() == pooled.as_dict()

    def test_evaluations_counted(self, ns, mocker):
        import lobound.primal

        spy = mocker.spy(lobound.primal, "convex_point")
        result = outer_search(ns, 2, restarts=2, seed=1)
        assert spy.call_count == result.evaluations + result.restarts

    def test_failed_restarts(self, ns, mocker):
        mocker.patch("lobound.primal.convex_point", side_effect=SolverError("boom"))
        with pytest.warns(UserWarning, match="boom"):
            result = outer_search(ns, 2, restarts=2, seed=0)
        assert result.failed == 2
        assert result.point is None
        assert result.probability == 0.0
        assert result.best_restart == -1

    @pytest.mark.parametrize("n, restarts", [(-1, 2), (2, 0)])
    def test_invalid(self, ns, n, restarts):
        with pytest.raises(InputError):
            outer_search(ns, n, restarts=restarts)

    def test_sweep_n(self, ns):
        results = sweep_n(ns, 3, restarts=1, seed=5)
        assert [result.n for result in results] == [2, 3]


class TestSimulate:
    def test_reference_network(self, ns, ns_point):
        y = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
        result = simulate_gate(ns_point, ns, y)
        assert result.probability == pytest.approx(0.25, abs=1e-9)
        assert result.fidelity == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(result.output, 0.5 * ns.target(y), atol=1e-9)

    def test_single_photon_input(self, ns, ns_point):
        result = simulate_gate(ns_point, ns, [0.0, 0.0, 1.0])
        assert result.probability == pytest.approx(0.25, abs=1e-9)
        assert result.as_dict()["output"][2] == pytest.approx([-0.5, 0.0], abs=1e-9)

    def test_zero_probability(self, ns):
        point = NetworkPoint(BeamSplitter(0.5), [1.0], [0.0])
        result = simulate_gate(point, ns, [1.0, 0.0, 0.0])
        assert result.probability == 0.0
        assert result.fidelity == 0.0

    @pytest.mark.parametrize("y", [[1.0, 0.0], [1.0, 1.0, 0.0]])
    def test_invalid_input(self, ns, ns_point, y):
        with pytest.raises(InputError):
            simulate_gate(ns_point, ns, y)

    def test_higher_gate(self):
        # more auxiliary levels than gate levels: a non trivial network exists
        gate = gate_sign(3)
        found = convex_point(gate, BeamSplitter(-0.5), 5)
        assert found is not None
        point, probability = found
        assert probability > 0
        result = simulate_gate(point, gate, [0.5, 0.5, 0.5, 0.5])
        assert result.probability == pytest.approx(probability, abs=1e-9)
        assert result.fidelity == pytest.approx(1.0, abs=1e-9)
