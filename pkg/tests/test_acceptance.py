"""
Reference runs at full scale; deselect with ``-m "not slow"``.
"""
import math

import numpy as np
import pytest

from lobound.certificate import find_certificate, ns_certificate, phase_bound
from lobound.commands.duality import GAP_TOL, _DrawTask, check_draw
from lobound.fock import gate_phase, gate_sign
from lobound.utils import default_workers, parallel_map
from tests.conftest import comparable

pytestmark = pytest.mark.slow

SIGN3_BOUND = 4 * (1.0 / 6.0 + 1e-3) ** 2


class TestNonLinearSignShift:
    def test_certify(self, run_cli):
        status, document = run_cli(
            "certify", "--gate", "ns", "--grid", "4001", "--kmax", "1000", "--tol", "1e-10"
        )
        assert status == 0
        result = document["result"]
        assert result["passed"]
        assert result["bound"] == 0.25
        assert result["verification"]["max_value"] == pytest.approx(0.25, abs=1e-10)

    def test_optimize(self, run_cli):
        options = ("optimize", "--gate", "ns", "--n", "2", "--restarts", "200", "--seed", "42")
        status, first = run_cli(*options, out="first.json", workers=None)
        assert status == 0
        assert 0.249 <= first["result"]["probability"] <= 0.25 + 1e-6
        assert first["result"]["max_evaluated"] <= 0.25 + 1e-9

        _, second = run_cli(*options, out="second.json", workers=None)
        assert comparable(first) == comparable(second)


class TestPhaseCurve:
    @pytest.mark.parametrize("step", range(21))
    def test_search_matches_closed_form(self, step):
        phi2 = step * math.pi / 10
        closed = phase_bound(phi2)
        assert closed == pytest.approx((3.0 - math.cos(math.pi - phi2)) ** 2 / 16.0, abs=1e-12)
        cert = find_certificate(
            gate_phase(phi2), t_points=401, k_max=300, workers=default_workers()
        )
        assert cert.bound <= closed + 5e-3


class TestThreePhotonSignShift:
    def test_find_cert_and_optimize(self, run_cli, tmp_path):
        status, found = run_cli(
            "find-cert",
            "--gate",
            "sign:3",
            "--grid",
            "2001",
            "--kmax",
            "500",
            out="find.json",
            workers=None,
        )
        assert status == 0
        assert found["result"]["delta"] <= 1.0 / 6.0 + 1e-3
        assert found["result"]["bound"] <= 0.1124

        options = ("optimize", "--gate", "sign:3", "--n", "3", "--restarts", "200")
        status, first = run_cli(*options, out="first.json", workers=None)
        assert status == 0
        assert first["result"]["max_evaluated"] <= found["result"]["bound"] + 1e-6
        assert first["result"]["probability"] <= found["result"]["bound"] + 1e-6

        _, second = run_cli(*options, out="second.json", workers=None)
        assert comparable(first) == comparable(second)


class TestWeakDuality:
    def test_random_draws(self):
        certificates = [
            ns_certificate(),
            find_certificate(gate_sign(3), t_points=201, k_max=100),
            find_certificate(gate_phase(2.0), t_points=201, k_max=100),
        ]
        children = np.random.SeedSequence(2022).spawn(1000)
        tasks = [
            _DrawTask(index, certificates[index % 3].gate, certificates[index % 3], 10, child)
            for index, child in enumerate(children)
        ]
        outcomes = parallel_map(check_draw, tasks, default_workers())

        for outcome in outcomes:
            assert outcome.error is None, outcome
            assert outcome.gap >= -GAP_TOL, outcome
            assert outcome.primal_probability <= outcome.bound + 1e-9
