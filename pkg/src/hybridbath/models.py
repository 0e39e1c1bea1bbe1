"""Catalog of worked models: operators, kernels, coefficient systems, generators.

Parameters are plain nested dicts (the ``parameters`` section of a run
configuration).  Kernel entries are tagged unions::

    {"type": "single_mode", "coupling": 0.2, "frequency": 1.0}
    {"type": "ou", "Gamma": 0.017, "gamma": 0.3, "phi": 1.1}
    {"type": "sum", "terms": [<kernel>, ...]}
    {"type": "zero"}

Coupling scales multiply the weights of bosonic (``c_b``) and fermionic
(``c_f``) kernels, which is the same as scaling the couplings by their
square roots.
"""

import copy
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import coeffs
from .algebra import dag, identity, kron, pauli, projector
from .errors import ConfigError, HybridBathError
from .kernels import (kernel_ou, kernel_single_mode, kernel_sum,
                      markov_limit_diagnostic, zero_kernel)
from .master import DissipatorTerm, MasterGenerator, evolve, positivity_monitor
from .oracle import TotalSystemSpec

MODEL_NAMES = ("single_qubit", "two_qubit", "dephasing_qubit", "anderson")

# kernel name -> bath type, per model
KERNEL_ROLES = {
    "single_qubit": {"K_b": "b", "K_f": "f"},
    "dephasing_qubit": {"K_b": "b", "K_f": "f"},
    "two_qubit": {"K_b": "b", "K_f": "f"},
    "anderson": {"alpha": "b", "La": "f", "Lc": "f", "Ra": "f", "Rc": "f"},
}

_FREQUENCY = {"single_qubit": "omega", "dephasing_qubit": "omega", "two_qubit": "omega",
              "anderson": "epsilon"}

MARKOV_FRACTION = 0.1

_DEFAULTS = {
    "single_qubit": {
        "parameters": {
            "omega": 1.0,
            "kernels": {"K_b": {"type": "single_mode", "coupling": 0.2, "frequency": 1.0},
                        "K_f": {"type": "single_mode", "coupling": 0.2, "frequency": 1.0}},
            "c_b": 1.0, "c_f": 1.0, "initial_state": "plus"},
        "grid": {"horizon": 3.0, "dt": 0.001},
    },
    "dephasing_qubit": {
        "parameters": {
            "omega": 1.0,
            "kernels": {"K_b": {"type": "single_mode", "coupling": 0.2, "frequency": 1.0},
                        "K_f": {"type": "single_mode", "coupling": 0.2, "frequency": 1.0}},
            "c_b": 1.0, "c_f": 1.0, "initial_state": "plus"},
        "grid": {"horizon": 5.0, "dt": 0.001},
    },
    "two_qubit": {
        "parameters": {
            "omega": 1.0,
            "kernels": {"K_b": {"type": "ou", "Gamma": 1.0, "gamma": 0.5, "phi": 0.0},
                        "K_f": {"type": "ou", "Gamma": 1.0, "gamma": 0.5, "phi": 0.0}},
            "kappa_b": 1, "c_b": 1.0, "c_f": 1.0, "initial_state": "plus,plus"},
        "grid": {"horizon": 6.0, "dt": 0.02},
    },
    "anderson": {
        "parameters": {
            "epsilon": 1.0,
            "kernels": {"alpha": {"type": "ou", "Gamma": 0.05, "gamma": 0.5, "phi": 0.0},
                        "Lc": {"type": "ou", "Gamma": 0.017, "gamma": 0.3, "phi": 1.1},
                        "Rc": {"type": "ou", "Gamma": 0.034, "gamma": 0.5, "phi": 1.65},
                        "La": {"type": "ou", "Gamma": 0.012, "gamma": 0.4, "phi": 0.75},
                        "Ra": {"type": "ou", "Gamma": 0.044, "gamma": 0.45, "phi": 1.2}},
            "c_b": 1.0, "c_f": 1.0, "initial_state": "plus"},
        "grid": {"horizon": 30.0, "dt": 0.05},
    },
}

_QUBIT_STATES = {
    "excited": np.array([1.0, 0.0], dtype=complex),
    "ground": np.array([0.0, 1.0], dtype=complex),
    "plus": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2),
    "minus": np.array([1.0, -1.0], dtype=complex) / np.sqrt(2),
}


def default_parameters(name):
    """Documented default ``parameters`` section for model ``name``."""
    _check_name(name)
    return copy.deepcopy(_DEFAULTS[name]["parameters"])


def default_grid(name):
    _check_name(name)
    return dict(_DEFAULTS[name]["grid"])


def _check_name(name):
    if name not in MODEL_NAMES:
        raise ConfigError("model", f"unknown model {name!r}; expected one of {MODEL_NAMES}")


def _number(value, path, minimum=None, strict=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    if minimum is not None and (value <= minimum if strict else value < minimum):
        raise ConfigError(path, f"must be {'>' if strict else '>='} {minimum}, got {value}")
    return float(value)


def _require(mapping, key, path):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return mapping[key]


def kernel_from_config(cfg, path="kernel"):
    """Build a :class:`CorrelationKernel` from a tagged kernel entry."""
    if not isinstance(cfg, dict):
        raise ConfigError(path, "kernel entry must be an object")
    kind = _require(cfg, "type", path)
    if kind == "single_mode":
        lam = _number(_require(cfg, "coupling", path), f"{path}.coupling", 0.0)
        return kernel_single_mode(lam, _number(_require(cfg, "frequency", path),
                                               f"{path}.frequency"))
    if kind == "ou":
        Gamma = _number(_require(cfg, "Gamma", path), f"{path}.Gamma", 0.0)
        gamma = _number(_require(cfg, "gamma", path), f"{path}.gamma", 0.0, strict=True)
        return kernel_ou(Gamma, gamma, _number(_require(cfg, "phi", path), f"{path}.phi"))
    if kind == "sum":
        terms = _require(cfg, "terms", path)
        if not isinstance(terms, list):
            raise ConfigError(f"{path}.terms", "expected a list of kernels")
        return kernel_sum(*[kernel_from_config(t, f"{path}.terms.{i}")
                            for i, t in enumerate(terms)])
    if kind == "zero":
        return zero_kernel()
    raise ConfigError(f"{path}.type", f"unknown kernel type {kind!r}")


def _initial_vector(name, cfg, path):
    n_qubits = 2 if name == "two_qubit" else 1
    if isinstance(cfg, str):
        labels = [s.strip() for s in cfg.split(",")]
        if len(labels) != n_qubits or any(s not in _QUBIT_STATES for s in labels):
            raise ConfigError(path, f"expected {n_qubits} comma-separated labels from "
                                    f"{sorted(_QUBIT_STATES)}, got {cfg!r}")
        return kron(*[_QUBIT_STATES[s] for s in labels])
    if isinstance(cfg, dict) and "amplitudes" in cfg:
        amps = cfg["amplitudes"]
        dim = 2 ** n_qubits
        try:
            vec = np.array([complex(a[0], a[1]) for a in amps])
        except (TypeError, IndexError, ValueError):
            raise ConfigError(f"{path}.amplitudes", "expected [re, im] pairs") from None
        norm = np.linalg.norm(vec)
        if vec.shape != (dim,) or norm == 0:
            raise ConfigError(f"{path}.amplitudes", f"expected {dim} non-zero amplitudes")
        return vec / norm
    raise ConfigError(path, "expected a label string or {'amplitudes': [[re, im], ...]}")


@dataclass
class ModelSpec:
    """Fully wired model.

    ``kernels`` already include the coupling scales; ``parameters`` keeps the
    raw input so the spec can be rebuilt with one knob changed.
    """

    name: str
    parameters: dict
    system_hamiltonian: np.ndarray
    couplings: dict
    kernels: dict
    commutation_class: str
    coupling_scales: dict
    initial_vector: np.ndarray
    grid: tuple
    frequency: float
    kappa_b: int = 1

    @property
    def initial_state(self):
        return projector(self.initial_vector)

    @property
    def horizon(self):
        return self.grid[0]

    @property
    def dt(self):
        return self.grid[1]


def build_model(name, parameters, grid=None):
    """Wire model ``name`` from a complete ``parameters`` mapping.

    Parameters
    ----------
    name : str
        One of ``MODEL_NAMES``.
    parameters : dict
        Frequency (``omega``, or ``epsilon`` for the dot), ``kernels``,
        ``c_b``, ``c_f`` and, for ``two_qubit``, ``kappa_b``.
        ``initial_state`` is optional.
    grid : dict or tuple, optional
        ``{"horizon": ..., "dt": ...}``; defaults to the model's grid.

    Raises
    ------
    ConfigError
        On a missing or invalid field; the error names its dotted path.
    """
    _check_name(name)
    if not isinstance(parameters, dict):
        raise ConfigError("parameters", "expected an object")
    p = "parameters"
    freq_key = _FREQUENCY[name]
    freq = _number(_require(parameters, freq_key, p), f"{p}.{freq_key}")
    c_b = _number(_require(parameters, "c_b", p), f"{p}.c_b", 0.0)
    c_f = _number(_require(parameters, "c_f", p), f"{p}.c_f", 0.0)
    kcfg = _require(parameters, "kernels", p)
    kernels = {}
    for kname, role in KERNEL_ROLES[name].items():
        k = kernel_from_config(_require(kcfg, kname, f"{p}.kernels"), f"{p}.kernels.{kname}")
        kernels[kname] = k.scaled(c_b if role == "b" else c_f)
    extra = sorted(set(kcfg) - set(KERNEL_ROLES[name]))
    if extra:
        raise ConfigError(f"{p}.kernels.{extra[0]}", f"not a kernel of model {name}")

    kappa = 1
    if name == "two_qubit":
        kappa = _require(parameters, "kappa_b", p)
        if isinstance(kappa, bool) or kappa not in (0, 1):
            raise ConfigError(f"{p}.kappa_b",
                              f"only kappa_b in {{0, 1}} is supported, got {kappa!r}")
        kappa = int(kappa)

    state_cfg = parameters.get("initial_state", _DEFAULTS[name]["parameters"]["initial_state"])
    psi0 = _initial_vector(name, state_cfg, f"{p}.initial_state")

    if grid is None:
        grid = default_grid(name)
    if isinstance(grid, dict):
        horizon = _number(_require(grid, "horizon", "grid"), "grid.horizon", 0.0, strict=True)
        dt = _number(_require(grid, "dt", "grid"), "grid.dt", 0.0, strict=True)
    else:
        horizon, dt = (float(v) for v in grid)
    try:
        coeffs.time_grid(horizon, dt)
    except HybridBathError as exc:
        raise ConfigError("grid", str(exc)) from None

    sm, sz = pauli("minus"), pauli("z")
    if name == "two_qubit":
        I2 = identity(2)
        H = 0.5 * freq * (kron(sz, I2) + kron(I2, sz))
        L = kron(sm, I2) + kappa * kron(I2, sm)
        couplings = {"L_b": L, "L_f": L}
    elif name == "anderson":
        d = sm
        H = freq * dag(d) @ d
        couplings = {"L_b": dag(d) @ d, "L_f": d}
    else:
        H = 0.5 * freq * sz
        couplings = {"L_b": sz if name == "dephasing_qubit" else sm, "L_f": sm}

    return ModelSpec(
        name=name, parameters=copy.deepcopy(parameters), system_hamiltonian=H,
        couplings=couplings, kernels=kernels,
        commutation_class="anti-commutative" if name == "anderson" else "commutative",
        coupling_scales={"c_b": c_b, "c_f": c_f}, initial_vector=psi0,
        grid=(horizon, dt), frequency=freq, kappa_b=kappa)


def integrate_coefficients(spec, observer=None):
    """Coefficient report of ``spec`` on its grid."""
    k, w = spec.kernels, spec.frequency
    horizon, dt = spec.grid
    if spec.name == "single_qubit" or (spec.name == "two_qubit" and spec.kappa_b == 0):
        return coeffs.integrate_single_qubit_coeffs(k["K_b"], k["K_f"], w, horizon, dt,
                                                    observer=observer)
    if spec.name == "dephasing_qubit":
        return coeffs.integrate_dephasing_qubit_coeffs(k["K_b"], k["K_f"], w, horizon, dt,
                                                       observer=observer)
    if spec.name == "two_qubit":
        return coeffs.integrate_two_qubit_coeffs(k["K_b"], k["K_f"], w, horizon, dt,
                                                 observer=observer)
    return coeffs.integrate_anderson_coeffs(k["alpha"], k["La"], k["Lc"], k["Ra"], k["Rc"],
                                            w, horizon, dt, observer=observer)


def generator(spec, report):
    """Master-equation generator of ``spec`` driven by ``report``."""
    H, times = spec.system_hamiltonian, report.times
    sm, sp, sz = pauli("minus"), pauli("plus"), pauli("z")
    if spec.name == "single_qubit":
        terms = [DissipatorTerm(report["F"], sm, sp, "F")]
    elif spec.name == "dephasing_qubit":
        terms = [DissipatorTerm(report["G"], sm, sp, "G"),
                 DissipatorTerm(report["F"], sz, sz, "F")]
    elif spec.name == "two_qubit":
        I2 = identity(2)
        if spec.kappa_b == 0:
            terms = [DissipatorTerm(report["F"], kron(sm, I2), kron(sp, I2), "F")]
        else:
            L = spec.couplings["L_b"]
            O1 = L
            O2 = (kron(sz, I2) + kron(I2, sz)) @ L
            Ld = dag(L)
            terms = [DissipatorTerm(report["F1"], O1, Ld, "F1"),
                     DissipatorTerm(report["F2"], O2, Ld, "F2"),
                     DissipatorTerm(report["G1"], O1, Ld, "G1"),
                     DissipatorTerm(report["G2"], O2, Ld, "G2")]
    else:
        d = spec.couplings["L_f"]
        n = dag(d) @ d
        # a channel: [Q_a rho, L_a^dag] with Q_a = F_a d^dag, L_a = d^dag; the
        # "as_printed" variant is (F_La + F_Ra)[d, d^dag rho], the opposite sign
        sign = -1.0 if spec.parameters.get("a_term", "general") == "as_printed" else 1.0
        terms = [DissipatorTerm(report["F_Lc"] + report["F_Rc"], d, dag(d), "F_Lc+F_Rc"),
                 DissipatorTerm(sign * (report["F_La"] + report["F_Ra"]), dag(d), d,
                                "F_La+F_Ra"),
                 DissipatorTerm(report["F1"], n, n, "F1")]
    return MasterGenerator(H, terms, times)


def memory_classification(spec):
    """Memory time of every kernel and a Markovian / non-Markovian label.

    A kernel counts as Markovian when its memory time is below
    ``MARKOV_FRACTION`` of the horizon.
    """
    out = {}
    for name, k in spec.kernels.items():
        tau = markov_limit_diagnostic(k, spec.horizon)
        out[name] = {"memory_time": tau,
                     "regime": "markovian" if tau < MARKOV_FRACTION * spec.horizon
                     else "non-markovian"}
    return out


@dataclass
class RunResult:
    spec: ModelSpec
    coefficients: coeffs.CoefficientReport
    trajectory: object
    diagnostics: dict = field(default_factory=dict)

    @property
    def times(self):
        return self.trajectory.times


def run(spec):
    """Integrate coefficients, assemble the generator and evolve the state."""
    report = integrate_coefficients(spec)
    traj = evolve(generator(spec, report), spec.initial_state, spec.horizon, spec.dt)
    pos = positivity_monitor(traj)
    order = "zeroth-order" if spec.name in ("dephasing_qubit", "anderson") or (
        spec.name == "two_qubit" and spec.kappa_b == 1) else "exact"
    return RunResult(spec, report, traj, {
        "generator": order,
        "positivity": {"min_eigenvalue": pos.min_eigenvalue, "time_of_min": pos.time_of_min,
                       "warning": pos.warning},
        "max_trace_drift": traj.diagnostics["max_trace_drift"],
        "max_hermiticity_error": traj.diagnostics["max_hermiticity_error"],
        "memory": memory_classification(spec),
    })


SCALAR_KNOBS = ("c_f", "c_b", "kappa_b", "omega", "epsilon")


def with_knob(spec, knob, value):
    """Rebuild ``spec`` with one parameter replaced.

    ``knob`` is a top-level parameter name from ``SCALAR_KNOBS`` or a dotted
    path into a kernel entry such as ``kernels.Lc.Gamma``.
    """
    params = copy.deepcopy(spec.parameters)
    if knob in SCALAR_KNOBS:
        applies = (knob in ("c_f", "c_b") or knob == _FREQUENCY[spec.name]
                   or (knob == "kappa_b" and spec.name == "two_qubit"))
        if not applies:
            raise ConfigError("knob", f"knob {knob!r} does not apply to model {spec.name}")
        params[knob] = int(value) if knob == "kappa_b" and float(value).is_integer() else value
    elif knob.startswith("kernels."):
        keys = knob.split(".")
        node = params
        try:
            for key in keys[:-1]:
                node = node[int(key)] if isinstance(node, list) else node[key]
            if isinstance(node, list) or keys[-1] not in node or keys[-1] == "type":
                raise KeyError(keys[-1])
        except (KeyError, IndexError, ValueError, TypeError):
            raise ConfigError("knob", f"no kernel parameter at {knob!r}") from None
        node[keys[-1]] = value
    else:
        raise ConfigError("knob", f"unknown sweep knob {knob!r}")
    return build_model(spec.name, params, spec.grid)


def _run_value(args):
    spec, knob, value, collect = args
    try:
        return run(with_knob(spec, knob, value))
    except HybridBathError as exc:
        if collect:
            return exc
        raise


def sweep(spec, knob, values, workers=1, collect_errors=False):
    """Independent runs, one per knob value, returned in input order.

    With ``collect_errors`` a failing value yields its exception in place
    of a :class:`RunResult` instead of aborting the sweep.
    """
    values = list(values)
    if not values:
        raise ConfigError("values", "sweep needs at least one value")
    for v in values:
        _number(v, "values", 0.0 if knob in ("c_f", "c_b") else None)
    with_knob(spec, knob, values[0])  # reject an unknown knob before fanning out
    jobs = [(spec, knob, v, collect_errors) for v in values]
    if workers <= 1 or len(values) == 1:
        return [_run_value(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(values))) as pool:
        return list(pool.map(_run_value, jobs))


def _modes(kernel, path):
    """Bath modes ``(frequency, coupling)`` realising a single-mode kernel sum."""
    modes = []
    for w, r in kernel.terms:
        if w == 0:
            continue
        if r.real != 0 or abs(w.imag) > 0 or w.real < 0:
            raise ConfigError(path, "oracle requires single-mode kernels")
        modes.append((-r.imag, float(np.sqrt(w.real))))
    return modes


def oracle_spec(spec, boson_cutoff=12):
    """Finite total system equivalent to ``spec`` (single-mode kernels only)."""
    k = spec.kernels
    p = "parameters.kernels"
    if spec.name == "anderson":
        modes = {name: _modes(k[name], f"{p}.{name}") for name in KERNEL_ROLES["anderson"]}
        for name in ("La", "Ra"):
            if modes[name]:
                raise ConfigError(f"{p}.{name}",
                                  "oracle supports only empty-dot (c) fermion baths")
        bosons = modes["alpha"]
        fermions = modes["Lc"] + modes["Rc"]
    else:
        bosons = _modes(k["K_b"], f"{p}.K_b")
        fermions = _modes(k["K_f"], f"{p}.K_f")
    if len(fermions) > 4 or len(bosons) > 2:
        raise ConfigError(p, "oracle supports at most 2 boson and 4 fermion modes")
    return TotalSystemSpec(
        spec.system_hamiltonian, spec.couplings["L_b"], spec.couplings["L_f"],
        spec.initial_vector, [(w, g, boson_cutoff) for w, g in bosons], fermions,
        spec.commutation_class)


__all__ = [
    "MODEL_NAMES", "KERNEL_ROLES", "ModelSpec", "RunResult", "build_model", "default_grid",
    "default_parameters", "generator", "integrate_coefficients", "kernel_from_config",
    "memory_classification", "oracle_spec", "run", "sweep", "with_knob",
]
