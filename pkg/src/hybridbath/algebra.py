"""Dense operator algebra for qubits, truncated bosonic modes and fermionic modes.

Operators are plain complex ``numpy`` arrays.  Basis conventions used
throughout the package:

* qubit: index 0 is the excited state, index 1 the ground state, so that
  ``sigma_z = diag(1, -1)`` and ``sigma_minus @ e0 = e1``;
* bosonic and fermionic modes: Fock number basis, index ``n`` holds ``n``
  quanta;
* composite spaces are ordered system (x) bosons (x) fermions, and
  ``kron(a, b)`` puts ``a`` on the slow (leftmost) index.
"""

from functools import reduce

import numpy as np

from .errors import InvalidArgumentError

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "plus": np.array([[0, 1], [0, 0]], dtype=complex),
    "minus": np.array([[0, 0], [1, 0]], dtype=complex),
    "identity": np.eye(2, dtype=complex),
}


def pauli(which):
    """Return a 2x2 Pauli-type matrix.

    Parameters
    ----------
    which : {'x', 'y', 'z', 'plus', 'minus', 'identity'}

    Returns
    -------
    numpy.ndarray
        A fresh copy; ``pauli('minus')`` maps the excited state (index 0)
        to the ground state (index 1).
    """
    try:
        return _PAULI[which].copy()
    except KeyError:
        raise InvalidArgumentError(f"unknown Pauli operator {which!r}") from None


def identity(dim):
    return np.eye(dim, dtype=complex)


def dag(a):
    return np.conj(np.transpose(a))


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


def is_hermitian(a, atol=1e-12):
    """True iff ``max|A - A^dagger| <= atol``."""
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - dag(a)), initial=0.0) <= atol)


def kron(*ops):
    """Tensor product of one or more operators (or state vectors), left to right."""
    if not ops:
        raise InvalidArgumentError("kron needs at least one operand")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in ops])


def boson_ops(cutoff):
    """Truncated annihilation and creation operators on ``cutoff`` Fock levels."""
    if int(cutoff) != cutoff or cutoff < 2:
        raise InvalidArgumentError(f"boson cutoff must be an integer >= 2, got {cutoff!r}")
    b = np.diag(np.sqrt(np.arange(1, int(cutoff))), k=1).astype(complex)
    return b, dag(b)


def fermion_ops(n_modes, mode):
    """Annihilation/creation operators of one mode among ``n_modes`` fermions.

    The Jordan-Wigner string is built in, so the returned operators obey the
    canonical anticommutation relations on the ``2**n_modes`` dimensional
    Fock space.
    """
    if int(n_modes) != n_modes or n_modes < 1:
        raise InvalidArgumentError(f"n_modes must be a positive integer, got {n_modes!r}")
    if int(mode) != mode or not 0 <= mode < n_modes:
        raise InvalidArgumentError(f"mode index {mode!r} out of range for {n_modes} modes")
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    parity = np.diag([1.0, -1.0]).astype(complex)
    factors = [parity] * mode + [lower] + [identity(2)] * (n_modes - mode - 1)
    c = kron(*factors)
    return c, dag(c)


def fermion_parity(n_modes):
    """(-1)**N on ``n_modes`` fermionic modes."""
    return kron(*([np.diag([1.0, -1.0]).astype(complex)] * n_modes))


def embed(op, dims, index):
    """Place ``op`` on tensor factor ``index`` of a product space with factor sizes ``dims``."""
    dims = [int(d) for d in dims]
    if op.shape != (dims[index], dims[index]):
        raise InvalidArgumentError(
            f"operator of shape {op.shape} does not fit factor {index} of dims {dims}")
    factors = [identity(d) for d in dims]
    factors[index] = op
    return kron(*factors)


def partial_trace(rho, dims, keep):
    """Trace out every tensor factor of ``rho`` not listed in ``keep``.

    Parameters
    ----------
    rho : numpy.ndarray
        Square matrix on the product space.
    dims : sequence of int
        Factor dimensions; their product must equal ``rho.shape[0]``.
    keep : int or sequence of int
        Factors to retain, in the order they should appear in the result.
    """
    rho = np.asarray(rho)
    dims = [int(d) for d in dims]
    keep = [keep] if np.isscalar(keep) else list(keep)
    total = int(np.prod(dims))
    if rho.ndim != 2 or rho.shape != (total, total):
        raise InvalidArgumentError(
            f"density matrix of shape {rho.shape} does not match factor dims {dims}")
    if len(set(keep)) != len(keep) or any(not 0 <= k < len(dims) for k in keep):
        raise InvalidArgumentError(f"invalid factor selection {keep!r} for dims {dims}")

    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    tensor = rho.reshape(dims + dims)
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    dk = int(np.prod([dims[i] for i in keep]))
    dr = total // dk
    tensor = tensor.transpose(perm).reshape(dk, dr, dk, dr)
    return np.trace(tensor, axis1=1, axis2=3)


def ket(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def trace_distance(rho, sigma):
    """(1/2) * trace norm of ``rho - sigma`` for Hermitian arguments."""
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + dag(diff))
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
