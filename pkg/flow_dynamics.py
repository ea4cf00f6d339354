"""
Flow Dynamics Module
The generator H(z1, z2) = L^alpha(z1) a(z2) d/dz1 + i z2 d/dz2, its closed-form
flow phi_t, a fixed-step fourth-order integration of the same flow, and the
rotation flow R_t(z1, z2) = (z1, z2 e^{it}) of the radial case.
"""

import logging
from dataclasses import dataclass, field

import mpmath as mp

from errors import BranchError, GuardError, NonFiniteError
from series_engine import (
    HoloSeries, Precision, arc_integral, as_complex, as_real,
    at_working_precision, eval_series, is_finite,
)

logger = logging.getLogger(__name__)

MAX_FLOW_TIME = 2 * mp.pi


def L_alpha(alpha, z1):
    """(e^{alpha z1} - 1)/alpha, or z1 when alpha is exactly zero."""
    if alpha == 0:
        return z1
    return mp.expm1(alpha * z1) / alpha


@dataclass(frozen=True)
class VectorField:
    """H^{a,alpha}; ``rotation`` scales the i z2 d/dz2 part."""

    a: HoloSeries
    alpha: object
    precision: Precision = field(default_factory=Precision)
    rotation: object = 1

    def __post_init__(self):
        with self.precision.workprec():
            object.__setattr__(self, 'alpha', as_real(self.alpha, 'alpha'))
            object.__setattr__(self, 'rotation', as_real(self.rotation, 'rotation'))

    @at_working_precision
    def eval_field(self, z1, z2):
        """(H1, H2) at (z1, z2)."""
        z1 = as_complex(z1, 'z1')
        z2 = as_complex(z2, 'z2')
        return L_alpha(self.alpha, z1) * eval_series(self.a, z2, self.precision), mp.mpc(0, self.rotation) * z2


@dataclass(frozen=True)
class LinearField:
    """c1 z1 d/dz1 + c2 z2 d/dz2; covers i beta z2 d/dz2, z1 d/dz1 and the zero field."""

    c1: object = 0
    c2: object = 0
    precision: Precision = field(default_factory=Precision)

    def __post_init__(self):
        with self.precision.workprec():
            object.__setattr__(self, 'c1', as_complex(self.c1, 'c1'))
            object.__setattr__(self, 'c2', as_complex(self.c2, 'c2'))

    @classmethod
    def rotation(cls, beta, precision=None):
        """
        The rotation field i beta z2 d/dz2.

        Args:
            beta: Real rotation speed
            precision: Precision of the field (default 192 bits)

        Returns:
            LinearField: Field with c1 = 0 and c2 = i beta
        """
        precision = precision or Precision()
        with precision.workprec():
            return cls(0, mp.mpc(0, mp.mpf(beta)), precision)

    @at_working_precision
    def eval_field(self, z1, z2):
        """(c1 z1, c2 z2)."""
        return self.c1 * as_complex(z1, 'z1'), self.c2 * as_complex(z2, 'z2')


@dataclass(frozen=True)
class FlowMap:
    """phi_t^{a,alpha}, guarded to the principal branch of the logarithm."""

    a: HoloSeries
    alpha: object
    precision: Precision = field(default_factory=Precision)

    def __post_init__(self):
        with self.precision.workprec():
            object.__setattr__(self, 'alpha', as_real(self.alpha, 'alpha'))

    @property
    def alpha_is_zero(self):
        return self.alpha == 0

    def field(self):
        """The generator H with the same (a, alpha) and precision as this flow."""
        return VectorField(self.a, self.alpha, self.precision)

    @at_working_precision
    def flow(self, t, z1, z2):
        """
        phi_t for any real t, composed from closed-form steps of at most 2 pi.

        Args:
            t: Flow time
            z1, z2: Start point

        Returns:
            tuple: (w1, w2) = phi_t(z1, z2)

        Raises:
            BranchError: if an intermediate step leaves the principal branch
        """
        t = as_real(t, 't')
        steps = max(1, int(mp.ceil(abs(t) / MAX_FLOW_TIME)))
        step = t / steps
        w1, w2 = as_complex(z1, 'z1'), as_complex(z2, 'z2')
        for _ in range(steps):
            w1, w2 = self.flow_closed(step, w1, w2)
        return w1, w2

    @at_working_precision
    def flow_closed(self, t, z1, z2):
        """
        Closed-form phi_t(z1, z2) for |t| <= 2 pi.

        Args:
            t: Flow time
            z1, z2: Start point

        Returns:
            tuple: (w1, w2), with w2 = z2 e^{it}

        Raises:
            BranchError: if 1 + (e^{-alpha z1} - 1) e^{I} leaves the right half-plane
        """
        t = as_real(t, 't')
        z1 = as_complex(z1, 'z1')
        z2 = as_complex(z2, 'z2')
        if abs(t) > MAX_FLOW_TIME:
            raise ValueError("flow time limited to |t| <= 2*pi per call; compose via the group law")
        if t == 0:
            return z1, z2
        rotated = z2 * mp.expj(t)
        I = arc_integral(self.a, z2, t, self.precision)
        if I == 0:
            return z1, rotated
        if self.alpha_is_zero:
            return z1 * mp.exp(I), rotated
        # w - 1 = (e^{-alpha z1} - 1) e^{I}
        u = mp.expm1(-self.alpha * z1) * mp.exp(I)
        if mp.re(1 + u) <= 0:
            raise BranchError(t=t)
        return -mp.log1p(u) / self.alpha, rotated

    @at_working_precision
    def flow_ode(self, t, z1, z2, steps):
        """Classical fourth-order Runge-Kutta with ``steps`` equal steps."""
        t = as_real(t, 't')
        z1 = as_complex(z1, 'z1')
        z2 = as_complex(z2, 'z2')
        if int(steps) < 1:
            raise ValueError("steps must be a positive integer")
        if t == 0:
            return z1, z2

        def rhs(y1, y2):
            return L_alpha(self.alpha, y1) * eval_series(self.a, y2, self.precision), mp.mpc(0, 1) * y2

        h = t / int(steps)
        y1, y2 = z1, z2
        for _ in range(int(steps)):
            k1 = rhs(y1, y2)
            k2 = rhs(y1 + h / 2 * k1[0], y2 + h / 2 * k1[1])
            k3 = rhs(y1 + h / 2 * k2[0], y2 + h / 2 * k2[1])
            k4 = rhs(y1 + h * k3[0], y2 + h * k3[1])
            y1 = y1 + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y2 = y2 + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            if not (is_finite(y1) and is_finite(y2)):
                raise NonFiniteError("flow state")
        return y1, y2


def rotation_flow(t, z1, z2, prec=None):
    """
    R_t(z1, z2) = (z1, z2 e^{it}).

    Args:
        t: Rotation angle
        z1, z2: Point to rotate
        prec: Precision to evaluate at (default 192 bits)

    Returns:
        tuple: (z1, z2 e^{it})
    """
    with (prec or Precision()).workprec():
        t = as_real(t, 't')
        z1 = as_complex(z1, 'z1')
        z2 = as_complex(z2, 'z2')
        if t == 0:
            return z1, z2
        return z1, z2 * mp.expj(t)


def generator_check(f, v, z1, z2, h):
    """max over components of |(phi_h - phi_{-h})/(2h) - H| at (z1, z2)."""
    with f.precision.workprec():
        h = as_real(h, 'h')
        forward = f.flow_closed(h, z1, z2)
        backward = f.flow_closed(-h, z1, z2)
        H = v.eval_field(z1, z2)
        return max(abs((forward[k] - backward[k]) / (2 * h) - H[k]) for k in range(2))


def flow_trace(f, m, z1, z2, times):
    """Rows (t, z1(t), z2(t), |rho|) along phi_t; stops at the first guard failure.

    Times longer than 2 pi are composed through ``FlowMap.flow``.
    Returns (rows, error) where ``error`` is None for a complete trace.
    """
    rows = []
    with f.precision.workprec():
        for t in times:
            try:
                w1, w2 = f.flow(t, z1, z2)
                rho = m.eval_rho(w1, w2)
            except (BranchError, GuardError) as e:
                logger.warning("Trace stopped at t=%s: %s", mp.nstr(mp.mpf(t), 8), e)
                return rows, e
            rows.append({
                't': mp.mpf(t),
                'z1': w1,
                'z2': w2,
                'rho_residual': abs(rho),
            })
    return rows, None
