"""
Series Engine Module
Truncated holomorphic power series a(z) = sum_{n>=1} a_n z^n, the companion
series used by the surface fields, and the closed-form circular arc integral
that drives the flow.
"""

import functools
import logging
from dataclasses import dataclass

import mpmath as mp

from errors import NonFiniteError

logger = logging.getLogger(__name__)

DEFAULT_BITS = 192
MIN_BITS = 64
DEFAULT_ORDER = 8

DERIVED_KINDS = ('divide_by_n', 'divide_by_in', 'shift_derivative')


@dataclass(frozen=True)
class Precision:
    """Working precision and the tolerance ladder derived from it."""

    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < MIN_BITS:
            raise ValueError(f"mantissa_bits must be an integer >= {MIN_BITS}, got {self.bits}")

    def workprec(self):
        return mp.workprec(self.bits)

    @property
    def tau(self):
        """Unit-scale residual tolerance 2^(-bits/2)."""
        with self.workprec():
            return mp.power(2, -mp.mpf(self.bits) / 2)

    @property
    def zero_tol(self):
        return 10 * self.tau

    @property
    def fd_tol(self):
        return 1000 * self.tau

    @property
    def witness_tol(self):
        return 1000 * self.tau

    @property
    def fd_step(self):
        with self.workprec():
            return mp.power(2, -mp.mpf(self.bits) / 3)

    @property
    def point_tol(self):
        with self.workprec():
            return mp.power(2, -2 * mp.mpf(self.bits) / 3)


def at_working_precision(method):
    """Run a method of an object carrying ``.precision`` at that precision."""
    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        with mp.workprec(self.precision.bits):
            return method(self, *args, **kwargs)
    return wrapper


def is_finite(x):
    """True unless x is NaN or infinite (real or complex)."""
    return not (mp.isnan(x) or mp.isinf(x))


def as_complex(z, what="argument"):
    """Convert to mpc, rejecting NaN and infinities."""
    value = mp.mpc(z)
    if not is_finite(value):
        raise NonFiniteError(what)
    return value


def as_real(x, what="argument"):
    """
    Convert to mpf at the current working precision.

    Args:
        x: Number or numeric string
        what: Name used in the error message

    Returns:
        mpf: The converted value

    Raises:
        NonFiniteError: if x is NaN or infinite
    """
    value = mp.mpf(x)
    if not is_finite(value):
        raise NonFiniteError(what)
    return value


@dataclass(frozen=True)
class HoloSeries:
    """Truncated series a_1 z + ... + a_N z^N (no constant term)."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("truncation order must be positive")
        object.__setattr__(self, 'coeffs', tuple(as_complex(c, "coefficient") for c in self.coeffs))

    @property
    def truncation_order(self):
        return len(self.coeffs)

    def coefficient(self, n):
        """a_n for n >= 1; zero beyond the truncation order."""
        if n < 1:
            return mp.mpc(0)
        return self.coeffs[n - 1] if n <= len(self.coeffs) else mp.mpc(0)

    @classmethod
    def from_pairs(cls, pairs, prec=None):
        """Build from a config list of [re, im] pairs, index 1 first."""
        bits = (prec or Precision()).bits
        with mp.workprec(bits):
            coeffs = []
            for pair in pairs:
                if isinstance(pair, (list, tuple)) and len(pair) == 2:
                    coeffs.append(mp.mpc(mp.mpf(pair[0]), mp.mpf(pair[1])))
                else:
                    coeffs.append(mp.mpc(mp.mpf(pair)))
            return cls(tuple(coeffs))

    def to_pairs(self):
        return [[mp.nstr(c.real, 30), mp.nstr(c.imag, 30)] for c in self.coeffs]

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)


def eval_series(s, z, prec=None):
    """Horner evaluation of sum a_n z^n, highest degree first."""
    bits = (prec or Precision()).bits
    with mp.workprec(bits):
        z = as_complex(z)
        acc = mp.mpc(0)
        for c in reversed(s.coeffs):
            acc = (acc + c) * z
        return acc


def derived_series(s, kind):
    """Companion series: a_n/n, a_n/(i n), or the shifted series a_{n+1}."""
    if kind == 'divide_by_n':
        return HoloSeries(tuple(c / n for n, c in enumerate(s.coeffs, start=1)))
    if kind == 'divide_by_in':
        return HoloSeries(tuple(c / (mp.mpc(0, 1) * n) for n, c in enumerate(s.coeffs, start=1)))
    if kind == 'shift_derivative':
        # a(z)/z = a_1 + sum_{n>=1} a_{n+1} z^n; the constant a_1 stays with the caller.
        shifted = s.coeffs[1:]
        return HoloSeries(shifted if shifted else (mp.mpc(0),))
    raise ValueError(f"unknown derived series kind: {kind!r} (expected one of {DERIVED_KINDS})")


def series_add(s1, s2):
    """Coefficientwise sum; the longer truncation order wins."""
    n = max(s1.truncation_order, s2.truncation_order)
    return HoloSeries(tuple(s1.coefficient(k) + s2.coefficient(k) for k in range(1, n + 1)))


def series_over_z(s, z, prec=None):
    """a(z)/z, finite at z = 0 where it equals a_1."""
    bits = (prec or Precision()).bits
    with mp.workprec(bits):
        return s.coeffs[0] + eval_series(derived_series(s, 'shift_derivative'), z, prec)


def arc_integral(s, z2, t, prec=None):
    """Closed form of the integral of a(z2 e^{i tau}) over tau in [0, t].

    Each term a_n z2^n (e^{int} - 1)/(in) is written as
    a_n z2^n (sin(nt) + 2i sin^2(nt/2)) / n, which has no cancellation near t = 0.
    """
    bits = (prec or Precision()).bits
    with mp.workprec(bits):
        z2 = as_complex(z2)
        t = as_real(t)
        if t == 0 or z2 == 0:
            return mp.mpc(0)
        total = mp.mpc(0)
        power = mp.mpc(1)
        for n, c in enumerate(s.coeffs, start=1):
            power *= z2
            half = mp.sin(n * t / 2)
            total += c * power * mp.mpc(mp.sin(n * t), 2 * half * half) / n
        return total


def arc_integral_quadrature(s, z2, t, prec=None):
    """Adaptive quadrature of a(z2 e^{i tau}) along the arc; reference for arc_integral."""
    bits = (prec or Precision()).bits
    with mp.workprec(bits):
        z2 = as_complex(z2)
        t = as_real(t)
        return mp.quad(lambda tau: eval_series(s, z2 * mp.expj(tau), prec), [0, t])
