"""Time-dependent master equations of the form

    d rho / dt = -i [H, rho] + sum_j ( c_j(t) [A_j rho, B_j] + h.c. )

integrated with classical RK4 on the row-major vectorised density matrix.
Coefficient series live on the coefficient grid and are linearly
interpolated at the RK4 half steps.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import dag, is_hermitian
from .coeffs import time_grid
from .errors import IntegrationError, InvalidArgumentError

TRACE_TOLERANCE = 1e-6
POSITIVITY_THRESHOLD = -1e-6


@dataclass
class DissipatorTerm:
    """One ``c(t) [A rho, B] + h.c.`` contribution."""

    coefficient: np.ndarray
    left_op: np.ndarray
    right_op: np.ndarray
    label: str = ""


@dataclass
class MasterGenerator:
    hamiltonian: np.ndarray
    terms: list
    times: np.ndarray

    def __post_init__(self):
        self.hamiltonian = np.asarray(self.hamiltonian, dtype=complex)
        self.times = np.asarray(self.times, dtype=float)
        for term in self.terms:
            if len(term.coefficient) != len(self.times):
                raise InvalidArgumentError(
                    f"coefficient {term.label!r} has {len(term.coefficient)} samples, "
                    f"grid has {len(self.times)}")

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def superoperators(self):
        """``(L_H, [(S_j, Sbar_j), ...])`` acting on row-major ``vec(rho)``.

        ``S_j`` implements ``rho -> [A rho, B]`` and ``Sbar_j`` its Hermitian
        conjugate ``rho -> B^dag rho A^dag - rho A^dag B^dag``.
        """
        d = self.dim
        eye = np.eye(d, dtype=complex)
        H = self.hamiltonian
        L_H = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
        supers = []
        for term in self.terms:
            A = np.asarray(term.left_op, dtype=complex)
            B = np.asarray(term.right_op, dtype=complex)
            S = np.kron(A, B.T) - np.kron(B @ A, eye)
            Ad, Bd = dag(A), dag(B)
            Sbar = np.kron(Bd, Ad.T) - np.kron(eye, (Ad @ Bd).T)
            supers.append((S, Sbar))
        return L_H, supers

    def coefficients_at(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.array([np.interp(t, self.times, term.coefficient.real)
                         + 1j * np.interp(t, self.times, term.coefficient.imag)
                         for term in self.terms]).reshape(len(self.terms), len(t))

    def liouvillians(self, t):
        """Stack of generator matrices at the times ``t``."""
        L_H, supers = self.superoperators()
        t = np.atleast_1d(t)
        out = np.broadcast_to(L_H, (len(t),) + L_H.shape).copy()
        if supers:
            c = self.coefficients_at(t)
            S = np.array([s for s, _ in supers])
            Sbar = np.array([sb for _, sb in supers])
            out += np.einsum("jt,jab->tab", c, S) + np.einsum("jt,jab->tab", c.conj(), Sbar)
        return out

    def rhs(self, t, rho):
        """``d rho / dt`` at time ``t`` (coefficients interpolated)."""
        rho = np.asarray(rho, dtype=complex)
        drho = -1j * (self.hamiltonian @ rho - rho @ self.hamiltonian)
        coeffs = self.coefficients_at(t)[:, 0] if self.terms else []
        for c, term in zip(coeffs, self.terms):
            A, B = term.left_op, term.right_op
            comm = A @ rho @ B - B @ A @ rho
            drho = drho + c * comm + np.conj(c) * dag(comm)
        return drho


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def element(self, i, j):
        """Series of the 0-based matrix element ``rho[i, j]``."""
        return self.states[:, i, j]


def evolve(gen, rho0, horizon, dt):
    """Integrate the master equation from ``rho0`` over ``[0, horizon]``.

    The trace is never renormalised; a drift above ``TRACE_TOLERANCE``
    raises :class:`IntegrationError`.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    d = gen.dim
    if rho0.shape != (d, d):
        raise InvalidArgumentError(f"initial state shape {rho0.shape} != ({d}, {d})")
    if not is_hermitian(rho0, 1e-10) or abs(np.trace(rho0) - 1) > 1e-8:
        raise InvalidArgumentError("initial state must be Hermitian with unit trace")
    times = time_grid(horizon, dt)
    if gen.terms and gen.times[-1] < times[-1] - 1e-9 * max(1.0, horizon):
        raise InvalidArgumentError(
            f"coefficient series end at t={gen.times[-1]}, horizon is {horizon}")
    N = len(times) - 1

    fine = np.arange(2 * N + 1) * (0.5 * dt)
    L = gen.liouvillians(fine)
    states = np.empty((N + 1, d, d), dtype=complex)
    states[0] = rho0
    r = rho0.reshape(-1).copy()
    max_drift = 0.0
    for n in range(N):
        La, Lm, Lb = L[2 * n], L[2 * n + 1], L[2 * n + 2]
        k1 = La @ r
        k2 = Lm @ (r + 0.5 * dt * k1)
        k3 = Lm @ (r + 0.5 * dt * k2)
        k4 = Lb @ (r + dt * k3)
        r = r + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = r.reshape(d, d)
        drift = abs(np.trace(rho) - 1.0)
        if not np.isfinite(drift) or drift > TRACE_TOLERANCE:
            raise IntegrationError(
                f"trace drift {drift:.3g} at t={times[n + 1]:.17g} exceeds {TRACE_TOLERANCE}")
        max_drift = max(max_drift, drift)
        states[n + 1] = rho

    herm = float(np.max(np.abs(states - np.conj(np.transpose(states, (0, 2, 1))))))
    return Trajectory(times, states, {"max_trace_drift": float(max_drift),
                                      "max_hermiticity_error": herm})


@dataclass
class PositivityReport:
    min_eigenvalue: float
    time_of_min: float
    warning: bool
    threshold: float = POSITIVITY_THRESHOLD


def positivity_monitor(traj, threshold=POSITIVITY_THRESHOLD):
    """Smallest eigenvalue of rho(t) along a trajectory.

    Approximate (zeroth-order) generators may dip below zero transiently;
    that is flagged, not raised.
    """
    herm = 0.5 * (traj.states + np.conj(np.transpose(traj.states, (0, 2, 1))))
    lows = np.linalg.eigvalsh(herm)[:, 0]
    i = int(np.argmin(lows))
    return PositivityReport(float(lows[i]), float(traj.times[i]), bool(lows[i] < threshold),
                            threshold)
