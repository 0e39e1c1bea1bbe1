import numpy as np
import pytest

from hybridbath.coeffs import (ANDERSON_SERIES, CoefficientReport, integrate_anderson_coeffs,
                               integrate_dephasing_qubit_coeffs, integrate_single_qubit_coeffs,
                               integrate_two_qubit_coeffs, time_grid, two_qubit_memory_estimate)
from hybridbath.errors import InvalidArgumentError, ResourceError, SingularityError
from hybridbath.kernels import kernel_ou, kernel_single_mode, zero_kernel

from oracles import riccati_reference


class TestTimeGrid:
    def test_grid(self):
        np.testing.assert_allclose(time_grid(1.0, 0.25), [0, 0.25, 0.5, 0.75, 1.0])

    @pytest.mark.parametrize("horizon,dt", [(1.0, 0.0), (0.1, 0.2), (1.0, 0.3)])
    def test_rejects(self, horizon, dt):
        with pytest.raises(InvalidArgumentError):
            time_grid(horizon, dt)


class TestSingleQubit:
    def test_no_coupling(self):
        rep = integrate_single_qubit_coeffs(kernel_single_mode(0, 1), kernel_single_mode(0, 1),
                                            1.0, 2.0, 0.01)
        assert np.all(rep["F"] == 0)

    def test_tangent_point(self):
        # sqrt(2) * 0.5 * tan(sqrt(2) * 0.5 * 0.5)
        k = kernel_single_mode(0.5, 1.0)
        rep = integrate_single_qubit_coeffs(k, k, 1.0, 0.5, 0.001)
        assert rep["F"][-1] == pytest.approx(0.2610, abs=5e-5)
        assert rep["F"][-1] == pytest.approx(np.sqrt(2) * 0.5 * np.tan(0.5 * np.sqrt(2) * 0.5),
                                             abs=1e-9)

    def test_tangent_law(self):
        lam = 0.2
        k = kernel_single_mode(lam, 1.0)
        t_star = np.pi / 2 / (np.sqrt(2) * lam)
        rep = integrate_single_qubit_coeffs(k, k, 1.0, 4.4, 0.001)
        mask = rep.times <= 0.8 * t_star
        exact = np.sqrt(2) * lam * np.tan(np.sqrt(2) * lam * rep.times[mask])
        np.testing.assert_allclose(rep["F"][mask], exact, atol=1e-6)

    @pytest.mark.parametrize("kb,kf,omega", [
        (kernel_single_mode(0.2, 1.3), kernel_single_mode(0.2, 0.7), 1.0),
        (kernel_ou(0.5, 0.4, 0.3), kernel_ou(0.2, 1.0, -0.5), 0.8),
    ])
    def test_matches_riccati(self, kb, kf, omega):
        rep = integrate_single_qubit_coeffs(kb, kf, omega, 4.0, 0.002)
        np.testing.assert_allclose(rep["F"], riccati_reference([kb, kf], omega, rep.times),
                                   atol=1e-8)

    def test_hybrid_additivity(self):
        kb, kf = kernel_ou(0.5, 0.4, 0.3), kernel_single_mode(0.3, 1.1)
        a = integrate_single_qubit_coeffs(kb, kf, 1.0, 2.0, 0.01)
        b = integrate_single_qubit_coeffs(kb + kf, zero_kernel(), 1.0, 2.0, 0.01)
        np.testing.assert_allclose(a["F"], b["F"], atol=1e-14)

    def test_blowup_guard(self):
        lam, dt = 0.2, 0.001
        k = kernel_single_mode(lam, 1.0)
        t_star = np.pi / 2 / (np.sqrt(2) * lam)
        with pytest.raises(SingularityError) as info:
            integrate_single_qubit_coeffs(k, k, 1.0, 7.0, dt)
        assert abs(info.value.time - t_star) <= 2 * dt
        assert info.value.exit_code == 3

    def test_diagonal_enforced(self):
        seen = []
        k = kernel_ou(1.0, 0.5, 0.2)
        integrate_single_qubit_coeffs(k, k, 1.0, 0.5, 0.05,
                                      observer=lambda t, f: seen.append(f["f"][-1]))
        assert seen and all(v == 1.0 for v in seen)

    def test_first_order_or_better(self):
        k = kernel_ou(1.0, 0.5, 0.0)
        runs = [integrate_single_qubit_coeffs(k, k, 1.0, 4.0, dt)["F"] for dt in (0.04, 0.02, 0.01)]
        d1 = np.max(np.abs(runs[1][::2] - runs[0]))
        d2 = np.max(np.abs(runs[2][::2] - runs[1]))
        assert d1 / d2 >= 1.8

    def test_unknown_scheme(self):
        with pytest.raises(InvalidArgumentError):
            integrate_single_qubit_coeffs(zero_kernel(), zero_kernel(), 1.0, 1.0, 0.1,
                                          scheme="simpson")


class TestDephasing:
    def test_g_matches_riccati(self):
        lam = 0.3
        kf = kernel_single_mode(lam, 1.0)
        rep = integrate_dephasing_qubit_coeffs(zero_kernel(), kf, 1.0, 3.0, 0.002)
        np.testing.assert_allclose(rep["G"], riccati_reference([kf], 1.0, rep.times), atol=1e-8)
        # resonant: dG/dt = lam^2 + G^2
        np.testing.assert_allclose(rep["G"], lam * np.tan(lam * rep.times), atol=1e-8)

    def test_f_closed_form(self):
        G, g, phi = 0.6, 0.5, 1.2
        rep = integrate_dephasing_qubit_coeffs(kernel_ou(G, g, phi), zero_kernel(), 1.0, 4.0, 0.01)
        exact = G / 2 * (1 - np.exp((-g + 1j * phi) * rep.times)) / (g - 1j * phi)
        np.testing.assert_allclose(rep["F"], exact, atol=1e-7)

    def test_zero(self):
        rep = integrate_dephasing_qubit_coeffs(zero_kernel(), zero_kernel(), 1.0, 1.0, 0.1)
        assert np.all(rep["F"] == 0) and np.all(rep["G"] == 0)


class TestTwoQubit:
    K = kernel_ou(1.0, 0.5, 0.0)

    def test_boundary_conditions_every_step(self):
        checks = []

        def observer(t, f):
            m = len(f["f1"]) - 1
            ok = (f["f1"][m] == 1 and f["g1"][m] == 1 and f["f2"][m] == 0 and f["g2"][m] == 0
                  and all(np.all(f[k][m, :] == 0) for k in ("f3", "f4", "g3", "g4"))
                  and np.array_equal(f["f3"][:m, m], -4j * f["f2"][:m])
                  and np.array_equal(f["f4"][:m, m], -4j * f["f2"][:m])
                  and np.array_equal(f["g3"][:m, m], -4j * f["g2"][:m])
                  and np.array_equal(f["g4"][:m, m], -4j * f["g1"][:m] + 4j * f["g2"][:m]))
            checks.append(ok)

        integrate_two_qubit_coeffs(self.K, self.K, 1.0, 1.0, 0.05, observer=observer)
        assert len(checks) == 20 and all(checks)

    def test_series_start_at_zero(self):
        rep = integrate_two_qubit_coeffs(self.K, self.K, 1.0, 0.5, 0.05)
        assert rep.names == ["F1", "F2", "F3p", "F4p", "G1", "G2", "G3p", "G4p"]
        assert all(rep[n][0] == 0 for n in rep.names)

    def test_no_fermionic_bath(self):
        rep = integrate_two_qubit_coeffs(self.K, zero_kernel(), 1.0, 2.0, 0.05)
        for name in ("G1", "G2", "G3p", "G4p"):
            assert np.max(np.abs(rep[name])) < 1e-14
        assert np.max(np.abs(rep["F1"])) > 0.1

    def test_cross_term_present(self):
        rep = integrate_two_qubit_coeffs(self.K, self.K, 1.0, 3.0, 0.05)
        assert np.max(np.abs(rep["F4p"])) > 1e-6

    def test_weak_coupling_matches_single_channel(self):
        # to leading order f1 ~ exp(i omega (t - s)) so F1 ~ int K e^{i omega u} du
        k = kernel_ou(1e-6, 0.5, 0.0)
        rep = integrate_two_qubit_coeffs(k, k, 1.0, 2.0, 0.02)
        r = -0.5 + 1j
        exact = 0.5e-6 * np.expm1(r * rep.times) / r
        # the first step is a plain trapezoid, later ones are corrected
        np.testing.assert_allclose(rep["F1"], exact, atol=5e-13)

    def test_memory_budget(self):
        assert two_qubit_memory_estimate(6.0, 0.02) < 1.5e9
        with pytest.raises(ResourceError) as info:
            integrate_two_qubit_coeffs(self.K, self.K, 1.0, 100.0, 0.01)
        assert info.value.exit_code == 4


class TestAnderson:
    KERNELS = dict(alpha=kernel_ou(0.05, 0.5, 0.0), K_La=kernel_ou(0.012, 0.4, 0.75),
                   K_Lc=kernel_ou(0.017, 0.3, 1.1), K_Ra=kernel_ou(0.044, 0.45, 1.2),
                   K_Rc=kernel_ou(0.034, 0.5, 1.65))

    def test_f1_constant(self):
        seen = []
        rep = integrate_anderson_coeffs(**self.KERNELS, epsilon=1.0, horizon=5.0, dt=0.05,
                                        observer=lambda t, f: seen.append(f["f1"]))
        assert all(np.all(f == 1.0) for f in seen)
        exact = 0.025 * (1 - np.exp(-0.5 * rep.times)) / 0.5
        np.testing.assert_allclose(rep["F1"], exact, atol=1e-7)
        assert rep.names == list(ANDERSON_SERIES)

    def test_zero_fermionic_kernels(self):
        z = zero_kernel()
        rep = integrate_anderson_coeffs(self.KERNELS["alpha"], z, z, z, z, 1.0, 5.0, 0.05)
        for name in ("F_Lc", "F_Rc", "F_La", "F_Ra"):
            assert np.max(np.abs(rep[name])) < 1e-14

    def test_single_c_channel_is_single_qubit(self):
        # only K_Lc: the c field obeys the single-qubit equation
        z = zero_kernel()
        k = kernel_ou(0.3, 0.4, 0.9)
        a = integrate_anderson_coeffs(z, z, k, z, z, 1.0, 3.0, 0.01)
        b = integrate_single_qubit_coeffs(k, z, 1.0, 3.0, 0.01)
        np.testing.assert_allclose(a["F_Lc"], b["F"], atol=1e-14)

    def test_markov_flattening(self):
        fast = {name: type(k)(tuple((w * 10, r.real * 10 + 1j * r.imag) for w, r in k.terms))
                for name, k in self.KERNELS.items()}
        rep = integrate_anderson_coeffs(**fast, epsilon=1.0, horizon=10.0, dt=0.01)
        late = rep.times > 5 / 3.0
        for name in rep.names:
            s = rep[name][late]
            assert np.max(np.abs(s - s[-1])) / abs(s[-1]) <= 0.01, name


def test_report_interpolation():
    rep = CoefficientReport(np.array([0.0, 1.0]), {"F": np.array([0.0, 2.0 + 2.0j])})
    assert rep.at("F", 0.25) == pytest.approx(0.5 + 0.5j)
    assert rep.names == ["F"]
