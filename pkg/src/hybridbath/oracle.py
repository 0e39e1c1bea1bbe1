"""Exact reference dynamics: system plus a few explicit bath modes.

The total state is ``system (x) bosons (x) fermions`` starting from the
bath vacuum.  The Schrodinger equation is solved exactly (eigendecomposition)
for small spaces and with RK4 otherwise, and the system factor is kept by
partial trace.
"""

from dataclasses import dataclass, field

import numpy as np

from .algebra import boson_ops, dag, embed, fermion_ops, identity, kron, trace_distance
from .coeffs import time_grid
from .errors import IntegrationError, InvalidArgumentError, ResourceError
from .master import Trajectory

MAX_DIM = 4096
EXACT_DIM = 256
NORM_TOLERANCE = 1e-6
COMMUTATION_CLASSES = ("commutative", "anti-commutative")


@dataclass
class TotalSystemSpec:
    """Finite total system.

    Attributes
    ----------
    system_hamiltonian : ndarray
    boson_modes : list of (Omega, lambda, cutoff)
    fermion_modes : list of (epsilon, mu)
    coupling_b, coupling_f : ndarray
        System coupling operators ``L_b`` and ``L_f``.
    commutation_class : {'commutative', 'anti-commutative'}
        In the anti-commutative class the bath fermions carry the system
        parity string so that ``{L_f, c_k} = 0``.
    initial_state : ndarray
        System state vector; the baths start in their vacuum.
    system_parity : ndarray, optional
        Defaults to ``I - 2 L_f^dag L_f``, the parity of a single fermionic
        system mode with ``L_f`` its annihilator.
    """

    system_hamiltonian: np.ndarray
    coupling_b: np.ndarray
    coupling_f: np.ndarray
    initial_state: np.ndarray
    boson_modes: list = field(default_factory=list)
    fermion_modes: list = field(default_factory=list)
    commutation_class: str = "commutative"
    system_parity: np.ndarray = None

    def __post_init__(self):
        if self.commutation_class not in COMMUTATION_CLASSES:
            raise InvalidArgumentError(
                f"commutation class must be one of {COMMUTATION_CLASSES}, "
                f"got {self.commutation_class!r}")
        self.system_hamiltonian = np.asarray(self.system_hamiltonian, dtype=complex)
        self.initial_state = np.asarray(self.initial_state, dtype=complex)
        if self.initial_state.shape != (self.system_dim,):
            raise InvalidArgumentError("initial state must be a system state vector")
        if abs(np.vdot(self.initial_state, self.initial_state) - 1) > 1e-10:
            raise InvalidArgumentError("initial state must be normalised")

    @property
    def system_dim(self):
        return self.system_hamiltonian.shape[0]

    @property
    def dims(self):
        return ([self.system_dim] + [int(m[2]) for m in self.boson_modes]
                + ([2 ** len(self.fermion_modes)] if self.fermion_modes else []))

    @property
    def total_dim(self):
        return int(np.prod([self.system_dim] + [int(m[2]) for m in self.boson_modes])
                   * 2 ** len(self.fermion_modes))

    def with_cutoff(self, cutoff):
        modes = [(w, g, cutoff) for w, g, _ in self.boson_modes]
        return TotalSystemSpec(self.system_hamiltonian, self.coupling_b, self.coupling_f,
                               self.initial_state, modes, list(self.fermion_modes),
                               self.commutation_class, self.system_parity)


def total_operators(spec):
    """Total-space operators of ``spec``.

    Returns a dict with ``H``, ``L_b``, ``L_f``, lists ``b`` and ``c`` of
    bath annihilators, and the factor dimensions ``dims`` (system, each
    boson, the joint fermion register).
    """
    if spec.total_dim > MAX_DIM:
        raise ResourceError(f"total dimension {spec.total_dim} exceeds {MAX_DIM}")
    ds = spec.system_dim
    cutoffs = [int(m[2]) for m in spec.boson_modes]
    nf = len(spec.fermion_modes)
    dims = [ds] + cutoffs + ([2 ** nf] if nf else [])

    def on_system(op):
        return embed(np.asarray(op, dtype=complex), dims, 0)

    bs = [embed(boson_ops(cut)[0], dims, 1 + i) for i, cut in enumerate(cutoffs)]
    if spec.commutation_class == "anti-commutative":
        parity = spec.system_parity
        if parity is None:
            lf = np.asarray(spec.coupling_f, dtype=complex)
            parity = identity(ds) - 2 * dag(lf) @ lf
        string = kron(parity, *[identity(c) for c in cutoffs])
    else:
        string = identity(int(np.prod([ds] + cutoffs)))
    cs = [kron(string, fermion_ops(nf, k)[0]) for k in range(nf)]

    Lb = on_system(spec.coupling_b)
    Lf = on_system(spec.coupling_f)
    H = on_system(spec.system_hamiltonian)
    for b, (omega, lam, _) in zip(bs, spec.boson_modes):
        H = H + omega * dag(b) @ b + lam * (dag(b) @ Lb + b @ dag(Lb))
    for c, (eps, mu) in zip(cs, spec.fermion_modes):
        H = H + eps * dag(c) @ c + mu * (dag(c) @ Lf + dag(Lf) @ c)
    return {"H": H, "L_b": Lb, "L_f": Lf, "b": bs, "c": cs, "dims": dims}


def _initial_vector(spec, dims):
    vac = [np.eye(d, dtype=complex)[0] for d in dims[1:]]
    return kron(spec.initial_state, *vac) if vac else spec.initial_state.copy()


def _reduce(psi, ds):
    """Reduced system states from a stack of total state vectors."""
    psi = psi.reshape(psi.shape[0], ds, -1)
    return np.einsum("tia,tja->tij", psi, psi.conj())


def oracle_evolve(spec, horizon, dt):
    """Reduced system trajectory from the exact total dynamics.

    ``diagnostics`` records the worst norm drift, the worst change of
    ``<H_tot>`` and the method used.
    """
    ops = total_operators(spec)
    H = ops["H"]
    times = time_grid(horizon, dt)
    psi0 = _initial_vector(spec, ops["dims"])
    e0 = float(np.real(np.vdot(psi0, H @ psi0)))

    if H.shape[0] <= EXACT_DIM:
        method = "eigendecomposition"
        energies, vecs = np.linalg.eigh(H)
        amp = vecs.conj().T @ psi0
        psi = (np.exp(-1j * np.outer(times, energies)) * amp) @ vecs.T
    else:
        method = "rk4"
        norm_h = np.linalg.norm(H, 2)
        sub = max(1, int(np.ceil(norm_h * dt / 0.1)))
        h = dt / sub
        psi = np.empty((len(times), H.shape[0]), dtype=complex)
        psi[0] = v = psi0
        mH = -1j * H
        for n in range(1, len(times)):
            for _ in range(sub):
                k1 = mH @ v
                k2 = mH @ (v + 0.5 * h * k1)
                k3 = mH @ (v + 0.5 * h * k2)
                k4 = mH @ (v + h * k3)
                v = v + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            drift = abs(np.vdot(v, v).real - 1.0)
            if drift > NORM_TOLERANCE:
                raise IntegrationError(f"norm drift {drift:.3g} at t={times[n]:.17g}")
            psi[n] = v

    norms = np.einsum("ta,ta->t", psi.conj(), psi).real
    energy = np.einsum("ta,ab,tb->t", psi.conj(), H, psi).real
    states = _reduce(psi, spec.system_dim)
    return Trajectory(times, states, {
        "method": method,
        "total_dim": int(H.shape[0]),
        "max_norm_drift": float(np.max(np.abs(norms - 1.0))),
        "max_energy_drift": float(np.max(np.abs(energy - e0))),
    })


@dataclass
class ComparisonReport:
    times: np.ndarray
    distances: np.ndarray

    @property
    def max_distance(self):
        return float(np.max(self.distances))

    @property
    def time_of_max(self):
        return float(self.times[int(np.argmax(self.distances))])


def compare_to_master(oracle_traj, master_traj):
    """Trace distance between two trajectories at every common grid time."""
    if (len(oracle_traj.times) != len(master_traj.times)
            or not np.allclose(oracle_traj.times, master_traj.times, rtol=0, atol=1e-12)):
        raise InvalidArgumentError("trajectories are on different time grids")
    if oracle_traj.states.shape != master_traj.states.shape:
        raise InvalidArgumentError(
            f"state shapes differ: {oracle_traj.states.shape} vs {master_traj.states.shape}")
    dist = np.array([trace_distance(a, b)
                     for a, b in zip(oracle_traj.states, master_traj.states)])
    return ComparisonReport(np.asarray(master_traj.times), dist)


def cutoff_sensitivity(spec, horizon, dt, raised_cutoff=None, base=None):
    """Max trace distance between runs at the spec's cutoff and a raised one.

    ``raised_cutoff`` defaults to twice the largest cutoff in ``spec``;
    ``base`` may pass in an existing trajectory at the spec's own cutoff.
    """
    if not spec.boson_modes:
        return 0.0
    if raised_cutoff is None:
        raised_cutoff = 2 * max(int(m[2]) for m in spec.boson_modes)
    if base is None:
        base = oracle_evolve(spec, horizon, dt)
    raised = oracle_evolve(spec.with_cutoff(raised_cutoff), horizon, dt)
    return compare_to_master(raised, base).max_distance
