import math

import numpy as np
import pytest

from lobound.certificate import (
    BAND_K_CAP,
    CertificateFamily,
    ConstantPiece,
    bound,
    build_dual_solution,
    dumps,
    find_certificate,
    loads,
    ns_certificate,
    phase_bound,
    point_bound,
    ratio_table,
    verify,
    w_ratio,
)
from lobound.exceptions import (
    InfeasibleError,
    InputError,
    SerializationError,
    UnverifiedCertificateError,
)
from lobound.fock import BeamSplitter, g_general, gate_custom, gate_ns, gate_phase
from lobound.primal import random_eps
from lobound.sdp import assemble, check_dual_feasible, dual_matrix
from tests.conftest import NS_KNEE


@pytest.fixture(scope="module")
def small_ns_cert():
    return find_certificate(gate_ns(), t_points=41, k_max=60)


class TestCertificateFamily:
    def test_ns(self, ns_cert):
        assert ns_cert.delta == 0.25
        assert ns_cert.bound == 0.25
        assert not ns_cert.tabulated
        assert len(ns_cert.pieces) == 3

    @pytest.mark.parametrize(
        "t, expected",
        [
            (-1.0, (0.125, 0.0)),
            (-0.6, (0.25 / 1.6, 0.0)),
            (NS_KNEE, (0.0, 0.25 / (1.0 + NS_KNEE ** 2))),
            (-0.1, (0.0, 0.25 / 1.01)),
            (0.0, (0.25, 0.125)),
            (1.0, (0.25, 0.125)),
        ],
    )
    def test_ns_values(self, ns_cert, t, expected):
        assert ns_cert.s(t) == pytest.approx(expected)

    def test_out_of_range(self, ns_cert):
        with pytest.raises(InputError):
            ns_cert.s(1.5)

    def test_partition(self, ns):
        with pytest.raises(InputError):
            CertificateFamily(ns, (ConstantPiece(-1.0, 0.5, (0.0, 0.0)),), 0.5)
        with pytest.raises(InputError):
            CertificateFamily(
                ns,
                (ConstantPiece(-1.0, 0.0, (0.0, 0.0)), ConstantPiece(0.1, 1.0, (0.0, 0.0))),
                0.5,
            )
        with pytest.raises(InputError):
            CertificateFamily(ns, (ConstantPiece(-1.0, 1.0, (0.0,)),), 0.5)
        with pytest.raises(InputError):
            CertificateFamily(ns, (ConstantPiece(-1.0, 1.0, (-0.1, 0.0)),), 0.5)
        with pytest.raises(InputError):
            CertificateFamily(ns, (ConstantPiece(-1.0, 1.0, (0.0, 0.0)),), math.inf)

    def test_trivial_certificate(self, ns):
        # s = 0 gives |w_k| = |t|^k / 2
        cert = CertificateFamily(ns, (ConstantPiece(-1.0, 1.0, (0.0, 0.0)),), 0.5)
        assert verify(cert, t_points=101, k_max=40).passed
        assert bound(cert, t_points=101, k_max=40) == 1.0


class TestRatio:
    @pytest.mark.parametrize("t", [-0.95, -0.6, NS_KNEE, -0.3, -0.05])
    def test_ns_vacuum_level(self, ns, ns_cert, t):
        assert w_ratio(ns, ns_cert.s(t), t, 0) == pytest.approx(-0.25, abs=1e-12)

    def test_ns_single_photon_left(self, ns, ns_cert):
        for t in np.linspace(-1.0, NS_KNEE, 7, endpoint=False):
            assert w_ratio(ns, ns_cert.s(t), t, 1) == pytest.approx(0.25, abs=1e-12)

    def test_bounded_on_samples(self, ns, ns_cert):
        for t in np.linspace(-1.0, 1.0, 57):
            for k in range(30):
                assert abs(w_ratio(ns, ns_cert.s(t), t, k)) <= 0.25 + 1e-12

    def test_table_matches_scalar(self, ns, ns_cert):
        ts = np.linspace(-0.9, 0.9, 7)
        s_rows = np.array([ns_cert.s(t) for t in ts])
        table = ratio_table(ns.cosines(), s_rows, ts, np.arange(12))

        for row, t in enumerate(ts):
            for k in range(12):
                assert table[row, k] == pytest.approx(w_ratio(ns, s_rows[row], t, k), abs=1e-13)

    def test_invalid(self, ns):
        with pytest.raises(InputError):
            w_ratio(ns, [0.1], 0.0, 0)
        with pytest.raises(InputError):
            w_ratio(ns, [0.1, -0.1], 0.0, 0)


class TestVerify:
    def test_ns_certificate(self, ns_cert):
        report = verify(ns_cert, t_points=801, k_max=200)
        assert report.passed, report.as_dict()
        assert report.max_value == pytest.approx(0.25, abs=1e-9)
        assert report.max_estimate <= 0.25 + 1e-10
        assert report.bound == 0.25
        assert report.as_dict()["note"]
        assert bound(ns_cert, report) == 0.25
        assert report.band_unsettled > 0
        assert report.tail_horizon == BAND_K_CAP + 1

    def test_too_small_delta(self, ns_cert):
        cert = ns_cert.with_delta(0.2)
        report = verify(cert, t_points=201, k_max=50)
        assert not report.passed
        assert report.max_estimate > 0.2
        with pytest.raises(UnverifiedCertificateError) as exc_info:
            bound(cert, report)
        assert exc_info.value.report is report

    def test_report_for_other_certificate(self, ns_cert):
        report = verify(ns_cert, t_points=201, k_max=50)
        with pytest.raises(UnverifiedCertificateError):
            bound(ns_cert.with_delta(0.3), report)

    def test_band_tail(self, ns):
        # |w_k| stays within delta for k <= k_max but reaches about 1.29 near k = 10^4
        pieces = (
            ConstantPiece(-1.0, 0.9999, (0.0, 0.0)),
            ConstantPiece(0.9999, 1.0, (2.0, 0.0)),
        )
        cert = CertificateFamily(ns, pieces, 0.5)
        report = verify(cert, t_points=201, k_max=50)
        assert not report.passed
        assert report.band_unsettled > 0
        assert report.max_value > 1.0
        assert report.argmax_k > 50
        assert report.argmax_t >= 0.9999

    @pytest.mark.parametrize(
        "options", [{"t_points": 1}, {"k_max": 1}, {"tol": 0.0}, {"eta": 1.0}]
    )
    def test_invalid(self, ns_cert, options):
        with pytest.raises(InputError):
            verify(ns_cert, **options)


class TestPhaseBound:
    def test_consistency_points(self):
        assert phase_bound(0.0) == 1.0
        assert phase_bound(math.pi) == 0.25
        assert phase_bound(2 * math.pi) == 1.0

    def test_curve(self):
        for phi2 in np.linspace(0.0, 2 * math.pi, 21):
            expected = (3.0 - math.cos(math.pi - phi2)) ** 2 / 16.0
            assert phase_bound(phi2) == pytest.approx(expected, abs=1e-12)

    def test_symmetric(self):
        assert phase_bound(1.0) == pytest.approx(phase_bound(2 * math.pi - 1.0), abs=1e-12)


class TestFindCertificate:
    def test_ns(self, small_ns_cert):
        assert small_ns_cert.tabulated
        assert small_ns_cert.derived
        assert len(small_ns_cert.pieces) == 40
        assert small_ns_cert.k_max == 60
        assert small_ns_cert.grid == 41
        # the network of probability 1/4 is a lower bound
        assert 0.24 <= small_ns_cert.delta < 1.0
        assert verify(small_ns_cert, t_points=81, k_max=60).passed

    def test_identity_gate(self):
        cert = find_certificate(gate_phase(0.0), t_points=21, k_max=30)
        assert cert.bound == pytest.approx(1.0, abs=5e-3)

    @pytest.mark.parametrize("options", [{"t_points": 1}, {"k_max": 1}])
    def test_invalid(self, options):
        with pytest.raises(InputError):
            find_certificate(gate_ns(), **options)

    def test_workers(self, small_ns_cert):
        pooled = find_certificate(gate_ns(), t_points=41, k_max=60, workers=2)
        assert pooled.delta == small_ns_cert.delta
        assert pooled.pieces == small_ns_cert.pieces


class TestSerialization:
    def test_round_trip(self, small_ns_cert):
        restored = loads(dumps(small_ns_cert))
        assert restored.delta == small_ns_cert.delta
        assert restored.pieces == small_ns_cert.pieces
        assert restored.gate == small_ns_cert.gate
        assert (restored.k_max, restored.grid, restored.derived) == (60, 41, True)

    def test_closed_form_family(self, ns_cert):
        with pytest.raises(SerializationError):
            dumps(ns_cert)

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "not a certificate\n",
            "# lobound certificate\ngate ns\ndelta x\nk_max 1\ngrid 2\nderived 0\nheader\n"
            "-1.0 1.0 0.0 0.0\n",
            "# lobound certificate\ngate ns\ndelta 0.5\nk_max -\ngrid -\nderived 0\nheader\n"
            "-1.0 1.0 0.0\n",
            "# lobound certificate\ngate bogus\ndelta 0.5\nk_max -\ngrid -\nderived 0\nheader\n"
            "-1.0 1.0 0.0 0.0\n",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(SerializationError):
            loads(text)

    def test_custom_gate(self):
        gate = gate_custom([0.3, 2.0])
        cert = CertificateFamily(gate, (ConstantPiece(-1.0, 1.0, (0.0, 0.0)),), 0.5, 40, 2)
        assert loads(dumps(cert)).gate == gate


class TestDualSolution:
    def test_point_bound(self, ns, ns_cert, ns_point):
        assert point_bound(ns_cert, ns, ns_point.bs, ns_point.eps) == pytest.approx(0.25)

    def test_multipliers(self, ns, ns_cert, ns_point):
        sol, gamma = build_dual_solution(ns_cert, ns, ns_point.bs, ns_point.eps)
        s = ns_cert.s(ns_point.bs.t)
        assert sol.v.shape == (2 * ns.cutoff + 2,)
        assert sol.v[0] == -s[0]
        assert sol.v[1] == -s[1]
        assert sol.v[-1] == 1.0
        assert np.all(np.diag(sol.W) == 0.0)
        assert gamma == 1.0

    def test_phase_raises_gamma(self, ns, ns_cert, rng):
        _, gamma = build_dual_solution(ns_cert, ns, BeamSplitter(0.5, 1.0), random_eps(rng, 2))
        s = ns_cert.s(0.5)
        expected = 1.0 + 2 * (s[0] * (1 - math.cos(1.0)) + s[1] * (1 - math.cos(2.0)))
        assert gamma == pytest.approx(expected)

    def test_wrong_gate(self, ns_cert, ns_point):
        with pytest.raises(InputError):
            build_dual_solution(ns_cert, gate_phase(1.0), ns_point.bs, ns_point.eps)

    def test_multipliers_at_phase(self, ns, ns_cert, rng):
        sol, _ = build_dual_solution(ns_cert, ns, BeamSplitter(0.5, 0.7), random_eps(rng, 3))
        s = ns_cert.s(0.5)
        assert sol.v[0] == pytest.approx(-math.cos(0.7) * s[0])
        assert sol.v[ns.cutoff + 1] == pytest.approx(-math.sin(0.7) * s[0])
        assert sol.v[ns.cutoff + 2] == pytest.approx(-math.sin(1.4) * s[1])
        assert sol.v[ns.cutoff] == 0.0

    def test_border_is_weighted_ratio(self, ns, ns_cert, rng):
        for _ in range(20):
            bs = BeamSplitter(rng.uniform(-1.0, 1.0))
            eps = random_eps(rng, int(rng.integers(0, 6)))
            sol, gamma = build_dual_solution(ns_cert, ns, bs, eps)
            border = dual_matrix(sol, assemble(ns, bs, eps, gamma)).entries[1, 2:]
            s = ns_cert.s(bs.t)
            expected = [eps[k].real * w_ratio(ns, s, bs.t, k) for k in range(eps.size)]
            assert np.allclose(border, expected, atol=1e-12)

    @pytest.mark.parametrize("gate", [gate_ns(), gate_phase(2.0)])
    def test_border_away_from_zero_phase(self, gate, rng):
        cert = CertificateFamily(gate, (ConstantPiece(-1.0, 1.0, (0.3, 0.15)),), 0.4)
        sines = np.sin(gate.phases)

        for _ in range(20):
            bs = BeamSplitter(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 6.0))
            eps = random_eps(rng, 4)
            sol, gamma = build_dual_solution(cert, gate, bs, eps)
            border = dual_matrix(sol, assemble(gate, bs, eps, gamma)).entries[1, 2:]

            for k in range(eps.size):
                levels = [g_general(j, k, bs.t) for j in (1, 2)]
                ratio = w_ratio(gate, (0.3, 0.15), bs.t, k) - (gamma - 1.0) * bs.t ** k
                imaginary = 0.3 * sines[0] * levels[0] + 0.15 * sines[1] * levels[1]
                expected = eps[k].real * ratio - eps[k].imag * imaginary
                assert border[k] == pytest.approx(expected, abs=1e-12)

    def test_gamma_and_objective(self, ns, ns_cert, rng):
        for _ in range(50):
            bs = BeamSplitter(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 6.3))
            sol, gamma = build_dual_solution(ns_cert, ns, bs, random_eps(rng, 5))
            assert gamma >= 1.0
            assert sol.objective <= 2 * ns_cert.delta + 1e-12
            assert np.all(sol.z >= 0)

    def test_feasible_at_zero_phase(self, ns, ns_cert, rng):
        for _ in range(30):
            bs = BeamSplitter(rng.uniform(-1.0, 1.0))
            eps = random_eps(rng, int(rng.integers(0, 8)))
            sol, gamma = build_dual_solution(ns_cert, ns, bs, eps)
            report = check_dual_feasible(sol, assemble(ns, bs, eps, gamma))
            assert report.feasible, report.as_dict()
            assert point_bound(ns_cert, ns, bs, eps) <= 0.25 + 1e-12

    def test_invalid_certificate_is_infeasible(self, ns, ns_point):
        empty = CertificateFamily(ns, (ConstantPiece(-1.0, 1.0, (0.0, 0.0)),), 0.0)
        sol, gamma = build_dual_solution(empty, ns, ns_point.bs, ns_point.eps)
        assert sol.objective == 0.0
        report = check_dual_feasible(sol, assemble(ns, ns_point.bs, ns_point.eps, gamma))
        assert not report.feasible

        with pytest.raises(InfeasibleError):
            point_bound(empty, ns, ns_point.bs, ns_point.eps)

    def test_radius_too_small_is_infeasible(self, ns, ns_point):
        # a feasible dual would bound the reference amplitude 1/2 by 2 * 0.2
        tight = CertificateFamily(ns, ns_certificate().pieces, 0.2)
        sol, gamma = build_dual_solution(tight, ns, ns_point.bs, ns_point.eps)
        assert not check_dual_feasible(sol, assemble(ns, ns_point.bs, ns_point.eps, gamma)).feasible
