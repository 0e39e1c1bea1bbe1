"""Bath correlation kernels and memory-integral quadrature.

A kernel is a finite exponential sum ``K(t, s) = sum_k w_k exp(r_k (t - s))``
evaluated for ``t >= s``.  Single-mode baths give purely imaginary rates,
Ornstein-Uhlenbeck baths decaying ones, and a hybrid bath seen through one
coupling operator is the concatenation of the term lists.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import InvalidArgumentError

QUADRATURE_SCHEMES = ("trapezoid", "gregory")


@dataclass(frozen=True)
class CorrelationKernel:
    """Exponential-sum two-time correlation function.

    Attributes
    ----------
    terms : tuple of (complex, complex)
        ``(weight, rate)`` pairs.
    """

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((complex(w), complex(r)) for w, r in self.terms)
        object.__setattr__(self, "terms", terms)

    def __call__(self, t, s):
        return self.at_lag(np.asarray(t, dtype=float) - np.asarray(s, dtype=float))

    def at_lag(self, lag):
        """K as a function of ``t - s``."""
        lag = np.asarray(lag, dtype=float)
        out = np.zeros(lag.shape, dtype=complex)
        for w, r in self.terms:
            out = out + w * np.exp(r * lag)
        return out if out.ndim else complex(out)

    def __add__(self, other):
        if not isinstance(other, CorrelationKernel):
            return NotImplemented
        return CorrelationKernel(self.terms + other.terms)

    def scaled(self, factor):
        """Kernel with every weight multiplied by ``factor``."""
        return CorrelationKernel(tuple((w * factor, r) for w, r in self.terms))

    @property
    def diagonal(self):
        """K(t, t), the sum of weights."""
        return complex(sum(w for w, _ in self.terms))

    @property
    def is_zero(self):
        return all(w == 0 for w, _ in self.terms)

    def lag_table(self, dt, n_max, offset=0.0):
        """Samples ``K(m*dt + offset)`` for ``m = 0 .. n_max``.

        With ``tau = t_n + offset`` the slice ``table[n::-1]`` holds
        ``K(tau, s_j)`` for ``j = 0 .. n`` on the grid ``s_j = j*dt``.
        """
        return np.asarray(self.at_lag(np.arange(n_max + 1) * dt + offset), dtype=complex)


def kernel_single_mode(coupling, frequency):
    """``lambda**2 exp(-i Omega (t - s))`` for a single bath mode."""
    if coupling < 0:
        raise InvalidArgumentError(f"coupling must be non-negative, got {coupling}")
    return CorrelationKernel(((coupling ** 2, -1j * frequency),))


def kernel_ou(Gamma, gamma, phi):
    """Ornstein-Uhlenbeck kernel ``(Gamma/2) exp((-gamma + i phi)(t - s))``."""
    if Gamma < 0:
        raise InvalidArgumentError(f"Gamma must be non-negative, got {Gamma}")
    if not gamma > 0:
        raise InvalidArgumentError(f"OU decay rate gamma must be positive, got {gamma}")
    return CorrelationKernel(((Gamma / 2.0, -gamma + 1j * phi),))


def kernel_sum(*kernels):
    out = CorrelationKernel()
    for k in kernels:
        out = out + k
    return out


def zero_kernel():
    return CorrelationKernel()


def stage_integral(values, end_value, dt, offset=0.0, scheme="gregory"):
    r"""Integrate samples over ``[0, t_n + offset]``.

    ``values[j]`` holds the integrand at ``s_j = j*dt`` (``j = 0..n``, extra
    trailing axes allowed) and ``end_value`` its value at ``t_n + offset``,
    which is only used when ``offset > 0``.

    ``scheme='trapezoid'`` is the composite trapezoid rule, with a single
    trapezoid on the short last panel.  ``scheme='gregory'`` adds the
    endpoint-derivative correction to the uniform part and integrates the
    short panel with the quadratic through ``s_{n-1}, s_n, t_n + offset``;
    it is third order in ``dt`` for smooth integrands.
    """
    values = np.asarray(values)
    n = values.shape[0] - 1
    if n < 0:
        raise InvalidArgumentError("no samples to integrate")
    if n == 0:
        total = np.zeros_like(values[0])
    else:
        total = dt * (values.sum(axis=0) - 0.5 * (values[0] + values[n]))
        if scheme == "gregory" and n >= 2:
            total = total - dt / 24.0 * (3.0 * values[0] - 4.0 * values[1] + values[2]
                                         + 3.0 * values[n] - 4.0 * values[n - 1]
                                         + values[n - 2])
    if offset > 0:
        h = offset
        if scheme == "trapezoid" or n == 0:
            total = total + 0.5 * h * (values[n] + end_value)
        else:
            total = total + (-h ** 3 / (6.0 * dt * (dt + h)) * values[n - 1]
                             + (h ** 2 / (6.0 * dt) + 0.5 * h) * values[n]
                             + (h ** 2 / 3.0 + 0.5 * dt * h) / (h + dt) * end_value)
    return total


def stage_weights(n, dt, offset=0.0, scheme="gregory"):
    """Quadrature weights equivalent to :func:`stage_integral`.

    Returns ``(nodes, end)`` such that the integral equals
    ``nodes @ values + end * end_value``.
    """
    nodes = np.full(n + 1, dt)
    end = 0.0
    if n == 0:
        nodes[0] = 0.0
    else:
        nodes[0] = nodes[n] = 0.5 * dt
        if scheme == "gregory" and n >= 2:
            c = dt / 24.0
            nodes[0] -= 3 * c
            nodes[1] += 4 * c
            nodes[2] -= c
            nodes[n] -= 3 * c
            nodes[n - 1] += 4 * c
            nodes[n - 2] -= c
    if offset > 0:
        h = offset
        if scheme == "trapezoid" or n == 0:
            nodes[n] += 0.5 * h
            end = 0.5 * h
        else:
            nodes[n - 1] += -h ** 3 / (6.0 * dt * (dt + h))
            nodes[n] += h ** 2 / (6.0 * dt) + 0.5 * h
            end = (h ** 2 / 3.0 + 0.5 * dt * h) / (h + dt)
    return nodes, end


@dataclass
class MemoryIntegralAccumulator:
    """Running trapezoid for ``F(t) = int_0^t K(t, s) f(t, s) ds``.

    ``samples`` is the current slice ``f(t, s_j)``; each call to
    :func:`memory_integral_step` appends the diagonal sample ``f(t, t)`` for
    the next grid time and recomputes ``value``.
    """

    grid_step: float
    samples: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    value: complex = 0j

    def __post_init__(self):
        if not self.grid_step > 0:
            raise InvalidArgumentError(f"grid step must be positive, got {self.grid_step}")
        self.samples = np.asarray(self.samples, dtype=complex)

    @property
    def time(self):
        return max(len(self.samples) - 1, 0) * self.grid_step

    def set_slice(self, values):
        """Replace the stored samples ``f(t, s_j)`` for the current ``t``."""
        values = np.asarray(values, dtype=complex)
        if values.shape != self.samples.shape:
            raise InvalidArgumentError(
                f"slice of length {values.shape} does not match {self.samples.shape}")
        self.samples = values


def memory_integral_step(acc, kernel, new_diagonal):
    """Append ``f(t, t)`` and return the trapezoid value of ``F(t)``."""
    acc.samples = np.append(acc.samples, complex(new_diagonal))
    n = len(acc.samples) - 1
    lags = kernel.lag_table(acc.grid_step, n)[::-1]
    acc.value = complex(stage_integral(lags * acc.samples, None, acc.grid_step,
                                       scheme="trapezoid"))
    return acc.value


def markov_limit_diagnostic(kernel, horizon):
    """Memory time ``int_0^horizon |K(u)| du / |K(0)|``.

    Decaying kernels saturate at their correlation time (``1/gamma`` for an
    OU term); undamped single-mode kernels return ``horizon``.
    """
    if not horizon > 0:
        raise InvalidArgumentError(f"horizon must be positive, got {horizon}")
    k0 = abs(kernel.diagonal)
    if k0 == 0:
        return 0.0
    if len(kernel.terms) == 1:
        w, r = kernel.terms[0]
        if r.real == 0:
            return float(horizon)
        return float(abs(w) * np.expm1(r.real * horizon) / r.real / k0)
    area, _ = integrate.quad(lambda u: abs(kernel.at_lag(u)), 0.0, horizon, limit=500)
    return float(area / k0)
