"""Coefficient functions of the O and Q operators on a growing triangular grid.

Every model reduces to fields ``f(t, s)`` (and for the two-qubit model
``f(t, s, s')``) that evolve in ``t`` pointwise in the history variables,
coupled only through memory integrals ``F(t) = int_0^t K(t, s) f(t, s) ds``.
Only the current-``t`` slice of each field is stored.  A step from ``t_n`` to
``t_{n+1}`` advances every stored history point with classical RK4; at each
stage the memory integrals are re-evaluated from the stage slice, with the
diagonal value ``f(tau, tau)`` taken from the boundary condition.  After the
step the new history row (and column) is filled in from the boundary
conditions, so those hold exactly at every accepted step.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ResourceError, SingularityError
from .kernels import QUADRATURE_SCHEMES, stage_integral, stage_weights

BLOWUP_GUARD = 1e6
MEMORY_BUDGET = 1.5e9  # bytes, for two-time fields

@dataclass
class CoefficientReport:
    """Named complex coefficient series on a uniform time grid."""

    times: np.ndarray
    values: dict
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.values[name]

    @property
    def names(self):
        return list(self.values)

    def at(self, name, t):
        """Linear interpolation of series ``name`` at time(s) ``t``."""
        series = self.values[name]
        return np.interp(t, self.times, series.real) + 1j * np.interp(t, self.times, series.imag)


def time_grid(horizon, dt):
    """Uniform grid ``0, dt, ..., horizon``; ``horizon`` must be a multiple of ``dt``."""
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    if not horizon >= dt:
        raise InvalidArgumentError(f"horizon {horizon} must be at least dt {dt}")
    n_steps = int(round(horizon / dt))
    if abs(n_steps * dt - horizon) > 1e-9 * max(horizon, 1.0):
        raise InvalidArgumentError(f"horizon {horizon} is not a multiple of dt {dt}")
    return np.arange(n_steps + 1) * dt


class _FieldIntegrator:
    """Shared machinery: kernel lag tables, stage memory integrals, guard."""

    def __init__(self, kernels, horizon, dt, scheme, guard):
        if scheme not in QUADRATURE_SCHEMES:
            raise InvalidArgumentError(f"unknown quadrature scheme {scheme!r}")
        self.times = time_grid(horizon, dt)
        self.n_steps = len(self.times) - 1
        self.dt = float(dt)
        self.scheme = scheme
        self.guard = guard
        self.kernels = dict(kernels)
        self._zero = {name: k.is_zero for name, k in self.kernels.items()}
        self._k0 = {name: k.diagonal for name, k in self.kernels.items()}
        self._tables = {
            name: {c: k.lag_table(self.dt, self.n_steps + 1, c * self.dt) for c in (0.0, 0.5, 1.0)}
            for name, k in self.kernels.items()
        }
        self._weights = {}

    def _kernel_weights(self, name, c, n):
        key = (name, c, n)
        if key not in self._weights:
            if len(self._weights) > 64:
                self._weights.clear()
            nodes, end = stage_weights(n, self.dt, c * self.dt, self.scheme)
            self._weights[key] = (nodes * self._tables[name][c][n::-1], end * self._k0[name])
        return self._weights[key]

    def memory(self, name, c, n, values, end_value):
        """``int_0^{t_n + c dt} K(tau, s) f(tau, s) ds`` along the first axis of ``values``."""
        if self._zero[name]:
            return np.zeros(values.shape[1:], dtype=complex) if values.ndim > 1 else 0j
        w, w_end = self._kernel_weights(name, c, n)
        return w @ values + w_end * end_value

    def check(self, n_next, fields, values):
        t = self.times[n_next]
        for name, v in values.items():
            mag = abs(v)
            if not np.isfinite(mag) or mag > self.guard:
                raise SingularityError(t, name, mag)
        for name, arr in fields.items():
            if not np.all(np.isfinite(arr)):
                raise SingularityError(t, name)


def _rk4(y, deriv, dt):
    """One classical RK4 step for a dict of arrays; ``deriv(c, Y)`` returns a dict."""
    k = deriv(0.0, y)
    acc = {name: y[name] + dt / 6.0 * k[name] for name in y}
    stage = {name: np.empty_like(acc[name]) for name in y}
    for c, a, w in ((0.5, 0.5, 1 / 3), (0.5, 0.5, 1 / 3), (1.0, 1.0, 1 / 6)):
        for name in y:
            np.multiply(k[name], a * dt, out=stage[name])
            stage[name] += y[name]
        k = deriv(c, stage)
        for name in y:
            np.multiply(k[name], w * dt, out=stage[name])
            acc[name] += stage[name]
    return acc


def _single_field_coeffs(kernel, omega, horizon, dt, scheme, guard, name, observer):
    """Shared integrator for ``d/dt f = [i omega + F(t)] f``, ``f(t, t) = 1``."""
    eng = _FieldIntegrator({"k": kernel}, horizon, dt, scheme, guard)
    N = eng.n_steps
    f = np.zeros(N + 1, dtype=complex)
    f[0] = 1.0
    F = np.zeros(N + 1, dtype=complex)

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(N):
            def deriv(c, Y, n=n):
                Fc = eng.memory("k", c, n, Y["f"], 1.0)
                return {"f": (1j * omega + Fc) * Y["f"]}

            f[:n + 1] = _rk4({"f": f[:n + 1]}, deriv, eng.dt)["f"]
            f[n + 1] = 1.0
            F[n + 1] = eng.memory("k", 0.0, n + 1, f[:n + 2], 1.0)
            eng.check(n + 1, {"f": f[:n + 2]}, {name: F[n + 1]})
            if observer is not None:
                observer(eng.times[n + 1], {"f": f[:n + 2]})
    return eng.times, F


def integrate_single_qubit_coeffs(kernel_b, kernel_f, omega, horizon, dt,
                                  scheme="gregory", guard=BLOWUP_GUARD, observer=None):
    """Coefficient ``F(t)`` of the exact single-qubit O = Q = f(t, s) sigma_minus.

    The bosonic and fermionic baths enter only through ``K_b + K_f``.

    Raises
    ------
    SingularityError
        When ``|F|`` exceeds ``guard`` (the resonant single-mode case follows
        a tangent law and diverges at ``sqrt(2) lambda t = pi/2``).
    """
    times, F = _single_field_coeffs(kernel_b + kernel_f, omega, horizon, dt, scheme,
                                    guard, "F", observer)
    return CoefficientReport(times, {"F": F},
                             {"model": "single_qubit", "scheme": scheme, "dt": dt})


def integrate_dephasing_qubit_coeffs(kernel_b, kernel_f, omega, horizon, dt,
                                     scheme="gregory", guard=BLOWUP_GUARD, observer=None):
    """Zeroth-order coefficients for L_b = sigma_z (dephasing), L_f = sigma_minus.

    ``G`` comes from the field ``g(t, s)`` driven by ``K_f``; the bosonic
    operator stays ``sigma_z`` so ``F(t) = int_0^t K_b(t, s) ds``.
    """
    times, G = _single_field_coeffs(kernel_f, omega, horizon, dt, scheme, guard, "G", observer)
    N = len(times) - 1
    lags = kernel_b.lag_table(dt, N)
    F = np.zeros(N + 1, dtype=complex)
    if not kernel_b.is_zero:
        for n in range(1, N + 1):
            F[n] = stage_integral(lags[:n + 1], None, dt, scheme=scheme)
    return CoefficientReport(times, {"G": G, "F": F},
                             {"model": "dephasing_qubit", "scheme": scheme, "dt": dt})


_TWO_QUBIT_SERIES = ("F1", "F2", "F3p", "F4p", "G1", "G2", "G3p", "G4p")


def two_qubit_memory_estimate(horizon, dt):
    """Bytes held by the two-time fields (four fields, about six working copies)."""
    n = int(round(horizon / dt)) + 1
    return 4 * 6 * n * n * 16


def integrate_two_qubit_coeffs(kernel_b, kernel_f, omega, horizon, dt,
                               scheme="gregory", guard=BLOWUP_GUARD,
                               memory_budget=MEMORY_BUDGET, observer=None):
    """Full coefficient system of the two-qubit model with kappa_B = 1.

    Integrates the one-time fields ``f1, f2, g1, g2`` and the two-time fields
    ``f3, f4, g3, g4`` and reports ``F1, F2, G1, G2`` together with the
    aggregated noise coefficients ``F3p = int ds' K_b(t, s') F3(t, s')`` (and
    likewise ``F4p``, ``G3p``, ``G4p`` with the matching kernel).

    Two-time fields are stored as ``[s index, s' index]``.  The source terms
    ``i F3 + i G3`` in the one-time equations are evaluated at ``s' = s``.
    On the corner ``s = s' = t`` the row condition ``f(t, t, s') = 0`` is
    applied; for ``g4`` it disagrees with the column condition
    ``g4(t, s, t) = -4i g1 + 4i g2``, which is kept as given everywhere else.
    """
    need = two_qubit_memory_estimate(horizon, dt)
    if need > memory_budget:
        raise ResourceError(
            f"two-time fields need ~{need / 1e6:.0f} MB, budget is {memory_budget / 1e6:.0f} MB")
    eng = _FieldIntegrator({"b": kernel_b, "f": kernel_f}, horizon, dt, scheme, guard)
    N = eng.n_steps
    one = {name: np.zeros(N + 1, dtype=complex) for name in ("f1", "f2", "g1", "g2")}
    two = {name: np.zeros((N + 1, N + 1), dtype=complex) for name in ("f3", "f4", "g3", "g4")}
    one["f1"][0] = one["g1"][0] = 1.0
    out = {name: np.zeros(N + 1, dtype=complex) for name in _TWO_QUBIT_SERIES}
    w = omega

    def deriv_factory(n):
        def deriv(c, Y):
            mem = eng.memory
            F1 = mem("b", c, n, Y["f1"], 1.0)
            F2 = mem("b", c, n, Y["f2"], 0.0)
            G1 = mem("f", c, n, Y["g1"], 1.0)
            G2 = mem("f", c, n, Y["g2"], 0.0)
            S3 = mem("b", c, n, Y["f3"], 0.0) + mem("f", c, n, Y["g3"], 0.0)
            S4 = mem("b", c, n, Y["f4"], 0.0) + mem("f", c, n, Y["g4"], 0.0)
            A = F1 + G1
            B = F2 + G2
            d = {}
            for x in ("f", "g"):
                x1, x2, x3, x4 = Y[x + "1"], Y[x + "2"], Y[x + "3"], Y[x + "4"]
                d[x + "1"] = 1j * w * x1 + 4.0 * B * x1 + 1j * S3
                d[x + "2"] = (1j * w * x2 + x1 * (4.0 * B - A) - 0.5j * S3
                              + x2 * (2.0 * A - 4.0 * B))
                src = 2.0 * x1 - 4.0 * x2
                d3 = (2j * w + 2.0 * A) * x3
                d3 += src[:, None] * S3
                d4 = (2j * w + 2.0 * A) * x4
                d4 += src[:, None] * S4
                d[x + "3"] = d3
                d[x + "4"] = d4
            return d
        return deriv

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(N):
            m = n + 1
            y = {k: v[:m] for k, v in one.items()}
            y.update({k: v[:m, :m] for k, v in two.items()})
            new = _rk4(y, deriv_factory(n), eng.dt)
            for k in one:
                one[k][:m] = new[k]
            for k in two:
                two[k][:m, :m] = new[k]
            del new, y

            # boundary conditions on the new history row/column
            one["f1"][m] = one["g1"][m] = 1.0
            one["f2"][m] = one["g2"][m] = 0.0
            for k in two:
                two[k][m, :m + 1] = 0.0
            two["f3"][:m, m] = -4j * one["f2"][:m]
            two["f4"][:m, m] = -4j * one["f2"][:m]
            two["g3"][:m, m] = -4j * one["g2"][:m]
            two["g4"][:m, m] = -4j * one["g1"][:m] + 4j * one["g2"][:m]

            ones = {k: v[:m + 1] for k, v in one.items()}
            twos = {k: v[:m + 1, :m + 1] for k, v in two.items()}
            out["F1"][m] = eng.memory("b", 0.0, m, ones["f1"], 1.0)
            out["F2"][m] = eng.memory("b", 0.0, m, ones["f2"], 0.0)
            out["G1"][m] = eng.memory("f", 0.0, m, ones["g1"], 1.0)
            out["G2"][m] = eng.memory("f", 0.0, m, ones["g2"], 0.0)
            for kname, fld, series in (("b", "f3", "F3p"), ("b", "f4", "F4p"),
                                       ("f", "g3", "G3p"), ("f", "g4", "G4p")):
                per_sprime = eng.memory(kname, 0.0, m, twos[fld], 0.0)
                out[series][m] = eng.memory(kname, 0.0, m, per_sprime, 0.0)
            eng.check(m, twos, {k: out[k][m] for k in out})
            if observer is not None:
                fields = dict(ones)
                fields.update(twos)
                observer(eng.times[m], fields)

    return CoefficientReport(eng.times, out,
                             {"model": "two_qubit", "scheme": scheme, "dt": dt,
                              "corner_rule": "row"})


ANDERSON_SERIES = ("F1", "F_Lc", "F_Rc", "F_La", "F_Ra")


def integrate_anderson_coeffs(alpha, K_La, K_Lc, K_Ra, K_Rc, epsilon, horizon, dt,
                              scheme="gregory", guard=BLOWUP_GUARD, observer=None):
    """Zeroth-order coefficients of the Anderson dot in a hybrid bath.

    ``f1`` obeys ``d/dt f1 = 0`` (so it stays 1), the ``c`` fields grow with
    ``+(i eps + S)`` and the ``a`` fields with ``-(i eps + S)``, where
    ``S = F1 + F_La + F_Ra + F_Lc + F_Rc``.  All fields start from 1 on the
    diagonal.
    """
    kernels = {"alpha": alpha, "La": K_La, "Lc": K_Lc, "Ra": K_Ra, "Rc": K_Rc}
    eng = _FieldIntegrator(kernels, horizon, dt, scheme, guard)
    N = eng.n_steps
    fields = {name: np.zeros(N + 1, dtype=complex) for name in ("f1", "Lc", "Rc", "La", "Ra")}
    for arr in fields.values():
        arr[0] = 1.0
    out = {name: np.zeros(N + 1, dtype=complex) for name in ANDERSON_SERIES}
    kernel_of = {"f1": "alpha", "Lc": "Lc", "Rc": "Rc", "La": "La", "Ra": "Ra"}
    series_of = {"f1": "F1", "Lc": "F_Lc", "Rc": "F_Rc", "La": "F_La", "Ra": "F_Ra"}

    def deriv_factory(n):
        def deriv(c, Y):
            S = sum(eng.memory(kernel_of[k], c, n, Y[k], 1.0) for k in Y)
            rate = 1j * epsilon + S
            return {"f1": np.zeros_like(Y["f1"]),
                    "Lc": rate * Y["Lc"], "Rc": rate * Y["Rc"],
                    "La": -rate * Y["La"], "Ra": -rate * Y["Ra"]}
        return deriv

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(N):
            m = n + 1
            new = _rk4({k: v[:m] for k, v in fields.items()}, deriv_factory(n), eng.dt)
            for k, arr in fields.items():
                arr[:m] = new[k]
                arr[m] = 1.0
                out[series_of[k]][m] = eng.memory(kernel_of[k], 0.0, m, arr[:m + 1], 1.0)
            eng.check(m, {k: v[:m + 1] for k, v in fields.items()},
                      {k: out[k][m] for k in out})
            if observer is not None:
                observer(eng.times[m], {k: v[:m + 1] for k, v in fields.items()})
    return CoefficientReport(eng.times, out,
                             {"model": "anderson", "scheme": scheme, "dt": dt})
