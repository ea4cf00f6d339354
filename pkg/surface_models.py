"""
Surface Models Module
Defining functions of the infinite-type model hypersurface M(a, alpha, p, q)
and of the radially symmetric hypersurface Re z1 + P(z2) + Im z1 Q(z2, Im z1) = 0,
with analytic and finite-difference Wirtinger derivatives of their scalar fields.
"""

import logging
from dataclasses import dataclass, field, replace

import mpmath as mp
import numpy as np

from errors import ConfigError, DomainError, GuardError, SingularDerivativeError, SurfaceSolveError
from series_engine import (
    HoloSeries, Precision, as_complex, as_real, at_working_precision,
    derived_series, eval_series, series_over_z,
)

logger = logging.getLogger(__name__)

FIELDS = ('R', 'P1', 'P', 'Q0', 'F')
METHODS = ('analytic', 'finite_difference')

DEFAULT_COS_GUARD = 0.1
DEFAULT_POS_GUARD = 0.1
SHRINK_SAMPLES = 1000
SHRINK_RINGS = 4
SHRINK_T_STEPS = 11
MAX_SHRINKS = 40


def within_radius(z, radius):
    """|z| <= radius, allowing the last few bits of rounding in |z|."""
    return abs(z) <= radius * (1 + 16 * mp.eps)


def _poly_eval(coeffs, x):
    """sum coeffs[k] x^k by Horner."""
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_derivative(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs))[1:]


@dataclass(frozen=True)
class RadialProfile:
    """Radial data p(r), q(r) with closed-form first derivatives.

    ``inverse_power``: p(r) = -c r^(-s) + sum p_poly[k] r^k.
    ``callable``: p and p' supplied as a pair of functions of r.
    q(r) = sum q_poly[k] r^k with q_poly[0] == 0.
    """

    family: str = 'inverse_power'
    c: object = 1
    s: object = 1
    p_poly: tuple = ()
    q_poly: tuple = ()
    p_func: object = None
    dp_func: object = None

    def __post_init__(self):
        if self.family == 'inverse_power':
            if not (mp.mpf(self.c) > 0 and mp.mpf(self.s) > 0):
                raise ValueError("inverse_power profile needs c > 0 and s > 0")
            object.__setattr__(self, 'c', mp.mpf(self.c))
            object.__setattr__(self, 's', mp.mpf(self.s))
        elif self.family == 'callable':
            if self.p_func is None or self.dp_func is None:
                raise ValueError("callable profile needs both p and p'")
        else:
            raise ValueError(f"unknown profile family {self.family!r}")
        object.__setattr__(self, 'p_poly', tuple(mp.mpf(x) for x in self.p_poly))
        object.__setattr__(self, 'q_poly', tuple(mp.mpf(x) for x in self.q_poly))
        if self.q_poly and self.q_poly[0] != 0:
            raise ValueError("q(0) must be 0")

    def p(self, r):
        if self.family == 'callable':
            return mp.mpf(self.p_func(r))
        return -self.c * mp.power(r, -self.s) + _poly_eval(self.p_poly, r)

    def dp(self, r):
        if self.family == 'callable':
            return mp.mpf(self.dp_func(r))
        return self.c * self.s * mp.power(r, -self.s - 1) + _poly_eval(_poly_derivative(self.p_poly), r)

    def q(self, r):
        return _poly_eval(self.q_poly, r)

    def dq(self, r):
        return _poly_eval(_poly_derivative(self.q_poly), r)

    def g(self, r):
        """e^{p(r)} extended by g(0) = 0."""
        if r == 0:
            return mp.mpf(0)
        return mp.exp(self.p(r))

    def to_dict(self):
        if self.family == 'callable':
            raise ConfigError("callable profiles cannot be serialized")
        return {
            'p': {'family': 'inverse_power', 'c': mp.nstr(self.c, 30), 's': mp.nstr(self.s, 30),
                  'poly': [mp.nstr(x, 30) for x in self.p_poly]},
            'q': {'poly': [mp.nstr(x, 30) for x in self.q_poly]},
        }


@dataclass(frozen=True)
class SurfacePoint:
    z1: object
    z2: object
    rho: object

    @property
    def t(self):
        return self.z1.imag


@dataclass(frozen=True)
class ModelSurface:
    """M(a, alpha, p, q): rho = Re z1 + P(z2) + F(z2, Im z1).

    Build with ``ModelSurface.build`` so that eps0 and delta0 are shrunk until
    every guard holds on the sampled domain.
    """

    a: HoloSeries
    alpha: object
    profile: RadialProfile
    eps0: object
    delta0: object
    precision: Precision = field(default_factory=Precision)
    cos_guard: object = DEFAULT_COS_GUARD
    pos_guard: object = DEFAULT_POS_GUARD
    point_tol: object = None

    def __post_init__(self):
        with self.precision.workprec():
            for name in ('alpha', 'eps0', 'delta0', 'cos_guard', 'pos_guard'):
                object.__setattr__(self, name, as_real(getattr(self, name), name))
            if self.eps0 <= 0 or self.delta0 <= 0:
                raise DomainError("eps0 and delta0 must be positive")
            if self.point_tol is None:
                object.__setattr__(self, 'point_tol', self.precision.point_tol)
            else:
                object.__setattr__(self, 'point_tol', as_real(self.point_tol, 'point_tol'))
            object.__setattr__(self, '_over_n', derived_series(self.a, 'divide_by_n'))
            object.__setattr__(self, '_over_in', derived_series(self.a, 'divide_by_in'))

    @classmethod
    def build(cls, a, alpha, profile, eps0, delta0, precision=None, **guards):
        """
        Construct a model and shrink its domain until every guard holds.

        Args:
            a: HoloSeries of the generator
            alpha: Real alpha (any sign)
            profile: RadialProfile supplying p and q
            eps0, delta0: Initial domain radii for z2 and Im z1
            precision: Working precision (default 192 bits)
            **guards: Optional cos_guard, pos_guard, point_tol

        Returns:
            ModelSurface: Model with a guard-safe (eps0, delta0)

        Raises:
            GuardError: if 40 halvings do not satisfy the guards
        """
        model = cls(a, alpha, profile, eps0, delta0, precision or Precision(), **guards)
        return model.shrink_domain()

    @property
    def alpha_is_zero(self):
        # exact flag, never a magnitude test
        return self.alpha == 0

    def with_alpha(self, alpha):
        """Same model with another alpha, domain re-shrunk for it."""
        return replace(self, alpha=alpha).shrink_domain()

    # -- domain -------------------------------------------------------------

    def _z2(self, z2):
        z2 = as_complex(z2)
        if not within_radius(z2, self.eps0):
            raise DomainError("outside eps0")
        return z2

    def _cos_checked(self, x):
        c = mp.cos(x)
        if abs(c) < self.cos_guard:
            raise GuardError("cosine guard")
        return c

    @at_working_precision
    def shrink_domain(self):
        """Halve eps0 / delta0 until the guards hold on nested sample circles."""
        eps0, delta0 = self.eps0, self.delta0
        for _ in range(MAX_SHRINKS):
            trial = replace(self, eps0=eps0, delta0=delta0)
            verdict = trial._guard_violation()
            if verdict is None:
                if eps0 != self.eps0 or delta0 != self.delta0:
                    logger.info("Domain shrunk to eps0=%s delta0=%s", mp.nstr(eps0, 8), mp.nstr(delta0, 8))
                return trial
            logger.debug("Guard '%s' violated at eps0=%s delta0=%s", verdict,
                         mp.nstr(eps0, 8), mp.nstr(delta0, 8))
            if verdict == 't':
                delta0 = delta0 / 2
            else:
                eps0 = eps0 / 2
        raise GuardError("guards could not be satisfied by shrinking eps0, delta0")

    def _guard_violation(self):
        """'z' if a guard fails at t = 0, 't' if it fails only for some |t| <= delta0."""
        per_ring = SHRINK_SAMPLES // SHRINK_RINGS
        samples = []
        for ring in range(1, SHRINK_RINGS + 1):
            radius = self.eps0 * ring / SHRINK_RINGS
            for k in range(per_ring):
                z2 = radius * mp.expj(2 * mp.pi * k / per_ring)
                R = self.eval_R(z2)
                if abs(mp.cos(R)) < self.cos_guard:
                    return 'z'
                if not self.alpha_is_zero and 1 + self.alpha * self.eval_P1(z2) < self.pos_guard:
                    return 'z'
                samples.append(R)
        if self.alpha_is_zero:
            return None
        ts = [self.delta0 * (2 * mp.mpf(k) / (SHRINK_T_STEPS - 1) - 1) for k in range(SHRINK_T_STEPS)]
        for R in samples:
            if any(abs(mp.cos(R + self.alpha * t)) < self.cos_guard for t in ts):
                return 't'
        return None

    # -- scalar fields --------------------------------------------------------

    @at_working_precision
    def eval_R(self, z2):
        """R(z2) = q(|z2|) - Re sum a_n z2^n / n."""
        z2 = self._z2(z2)
        r = abs(z2)
        if r == 0:
            return mp.mpf(0)
        return self.profile.q(r) - mp.re(eval_series(self._over_n, z2, self.precision))

    @at_working_precision
    def eval_Q0(self, z2):
        """Q0(z2) = tan R(z2), guarded."""
        R = self.eval_R(z2)
        self._cos_checked(R)
        return mp.tan(R)

    @at_working_precision
    def eval_P1(self, z2):
        """P1(z2) = e^{p(|z2|) + Re sum a_n z2^n/(i n)} / |cos R(z2)|, zero at the origin."""
        z2 = self._z2(z2)
        r = abs(z2)
        if r == 0:
            return mp.mpf(0)
        R = self.eval_R(z2)
        c = self._cos_checked(R)
        exponent = self.profile.p(r) + mp.re(eval_series(self._over_in, z2, self.precision)) - mp.log(abs(c))
        return mp.exp(exponent)

    @at_working_precision
    def eval_P(self, z2):
        """P(z2) = log(1 + alpha P1)/alpha, or P1 when alpha is zero."""
        P1 = self.eval_P1(z2)
        if self.alpha_is_zero:
            return P1
        if 1 + self.alpha * P1 < self.pos_guard:
            raise GuardError("positivity guard")
        return mp.log1p(self.alpha * P1) / self.alpha

    @at_working_precision
    def eval_F(self, z2, t):
        """F(z2, t) with both cosine guards checked."""
        t = as_real(t, 't')
        R = self.eval_R(z2)
        c0 = self._cos_checked(R)
        if t == 0:
            return mp.mpf(0)
        if self.alpha_is_zero:
            return mp.tan(R) * t
        ct = self._cos_checked(R + self.alpha * t)
        return -mp.log(abs(ct / c0)) / self.alpha

    @at_working_precision
    def eval_F_t(self, z2, t):
        """Partial derivative of F in t."""
        t = as_real(t, 't')
        R = self.eval_R(z2)
        self._cos_checked(R)
        shifted = R + self.alpha * t
        self._cos_checked(shifted)
        return mp.tan(shifted)

    @at_working_precision
    def eval_Q_from_F(self, z2, t):
        """Q(z2, t) = F(z2, t)/t, with the limit F_t(z2, 0) at t = 0."""
        t = as_real(t, 't')
        if t == 0:
            return self.eval_F_t(z2, t)
        return self.eval_F(z2, t) / t

    @at_working_precision
    def eval_rho(self, z1, z2):
        """rho(z1, z2) = Re z1 + P(z2) + F(z2, Im z1)."""
        z1 = as_complex(z1, 'z1')
        return mp.re(z1) + self.eval_P(z2) + self.eval_F(z2, mp.im(z1))

    def on_surface_z1(self, z2, t):
        """The z1 with Im z1 = t and rho(z1, z2) = 0."""
        with self.precision.workprec():
            t = as_real(t, 't')
            return mp.mpc(-self.eval_P(z2) - self.eval_F(z2, t), t)

    def eval_field(self, name, z2, t=0):
        """Evaluate one of the scalar fields R, P1, P, Q0, F by name."""
        if name == 'R':
            return self.eval_R(z2)
        if name == 'Q0':
            return self.eval_Q0(z2)
        if name == 'P1':
            return self.eval_P1(z2)
        if name == 'P':
            return self.eval_P(z2)
        if name == 'F':
            return self.eval_F(z2, t)
        raise ValueError(f"unknown field {name!r} (expected one of {FIELDS})")

    # -- Wirtinger derivatives ------------------------------------------------

    @at_working_precision
    def wirtinger(self, name, z2, t=0, method='analytic'):
        """d/dz2 = (d/dx - i d/dy)/2 of a real field."""
        if name not in FIELDS:
            raise ValueError(f"unknown field {name!r} (expected one of {FIELDS})")
        z2 = self._z2(z2)
        t = as_real(t, 't')
        if method == 'finite_difference':
            return self._wirtinger_fd(name, z2, t)
        if method != 'analytic':
            raise ValueError(f"unknown method {method!r} (expected one of {METHODS})")
        if z2 == 0:
            raise SingularDerivativeError()

        r = abs(z2)
        d_r = mp.conj(z2) / (2 * r)
        a_over_z = series_over_z(self.a, z2, self.precision)
        d_R = self.profile.dq(r) * d_r - a_over_z / 2
        if name == 'R':
            return d_R
        R = self.eval_R(z2)
        self._cos_checked(R)
        Q0 = mp.tan(R)
        if name == 'Q0':
            return (1 + Q0 * Q0) * d_R
        if name == 'F':
            if self.alpha_is_zero:
                return t * (1 + Q0 * Q0) * d_R
            self._cos_checked(R + self.alpha * t)
            return (mp.tan(R + self.alpha * t) - Q0) / self.alpha * d_R
        P1 = self.eval_P1(z2)
        # d log P1 = p'(r) dr + d Re(B) + tan(R) dR, with B' = a(z)/(i z)
        d_P1 = P1 * (self.profile.dp(r) * d_r - mp.mpc(0, 1) * a_over_z / 2 + Q0 * d_R)
        if name == 'P1' or self.alpha_is_zero:
            return d_P1
        return d_P1 / (1 + self.alpha * P1)

    def _wirtinger_fd(self, name, z2, t):
        h = self.precision.fd_step
        f = lambda z: self.eval_field(name, z, t)
        fx = (f(z2 + h) - f(z2 - h)) / (2 * h)
        fy = (f(z2 + mp.mpc(0, h)) - f(z2 - mp.mpc(0, h))) / (2 * h)
        return mp.mpc(fx, -fy) / 2

    def to_dict(self):
        """JSON-ready description that load_model reads back."""
        data = {
            'alpha': '0' if self.alpha_is_zero else mp.nstr(self.alpha, 30),
            'a': self.a.to_pairs(),
            'eps0': mp.nstr(self.eps0, 30),
            'delta0': mp.nstr(self.delta0, 30),
            'precision_bits': self.precision.bits,
        }
        data.update(self.profile.to_dict())
        return data


@dataclass(frozen=True)
class RadialSurface:
    """rho = Re z1 + P(|z2|) + Im z1 Q(|z2|, Im z1) with P = e^{p}."""

    profile: RadialProfile
    Q_terms: tuple = ()
    eps0: object = '0.15'
    delta0: object = '0.3'
    precision: Precision = field(default_factory=Precision)
    point_tol: object = None

    def __post_init__(self):
        with self.precision.workprec():
            terms = []
            for i, j, c in self.Q_terms:
                if int(i) < 0 or int(j) < 0:
                    raise ValueError("Q exponents must be non-negative")
                if int(i) == 0 and int(j) == 0 and mp.mpf(c) != 0:
                    raise ValueError("Q(0, 0) must be 0")
                terms.append((int(i), int(j), mp.mpf(c)))
            object.__setattr__(self, 'Q_terms', tuple(terms))
            object.__setattr__(self, 'eps0', as_real(self.eps0, 'eps0'))
            object.__setattr__(self, 'delta0', as_real(self.delta0, 'delta0'))
            if self.point_tol is None:
                object.__setattr__(self, 'point_tol', self.precision.point_tol)
            else:
                object.__setattr__(self, 'point_tol', as_real(self.point_tol, 'point_tol'))

    def _r(self, z2):
        z2 = as_complex(z2)
        if not within_radius(z2, self.eps0):
            raise DomainError("outside eps0")
        return z2, abs(z2)

    def Q(self, r, t):
        """
        Evaluate Q(r, t) = sum c r^i t^j.

        Args:
            r: Radius |z2|
            t: Im z1

        Returns:
            mpf: Q at (r, t)
        """
        return mp.fsum(c * mp.power(r, i) * mp.power(t, j) for i, j, c in self.Q_terms)

    def Q_r(self, r, t):
        """Partial derivative of Q in r."""
        return mp.fsum(i * c * mp.power(r, i - 1) * mp.power(t, j) for i, j, c in self.Q_terms if i > 0)

    def Q_t(self, r, t):
        """Partial derivative of Q in t."""
        return mp.fsum(j * c * mp.power(r, i) * mp.power(t, j - 1) for i, j, c in self.Q_terms if j > 0)

    @at_working_precision
    def eval_P(self, z2):
        """P(|z2|) = e^{p(|z2|)}."""
        _, r = self._r(z2)
        return self.profile.g(r)

    @at_working_precision
    def eval_radial_rho(self, z1, z2):
        """rho(z1, z2) of the radial surface."""
        z1 = as_complex(z1, 'z1')
        _, r = self._r(z2)
        t = mp.im(z1)
        return mp.re(z1) + self.profile.g(r) + t * self.Q(r, t)

    @at_working_precision
    def rho_z1(self, z1, z2):
        """d rho / d z1 = 1/2 + (Q + t Q_t) / (2i)."""
        z1 = as_complex(z1, 'z1')
        _, r = self._r(z2)
        t = mp.im(z1)
        return mp.mpf(1) / 2 + (self.Q(r, t) + t * self.Q_t(r, t)) / mp.mpc(0, 2)

    @at_working_precision
    def rho_z2(self, z1, z2):
        """d rho / d z2 = (P'(r) + t Q_r(r, t)) conj(z2) / (2r)."""
        z1 = as_complex(z1, 'z1')
        z2, r = self._r(z2)
        if r == 0:
            raise SingularDerivativeError()
        t = mp.im(z1)
        radial = self.profile.dp(r) * self.profile.g(r) + t * self.Q_r(r, t)
        return radial / (2 * r) * mp.conj(z2)

    def to_dict(self):
        """JSON-ready description that load_model reads back."""
        data = {
            'kind': 'radial',
            'Q': {'poly': [[i, j, mp.nstr(c, 30)] for i, j, c in self.Q_terms]},
            'eps0': mp.nstr(self.eps0, 30),
            'delta0': mp.nstr(self.delta0, 30),
            'precision_bits': self.precision.bits,
        }
        data['p'] = self.profile.to_dict()['p']
        return data


def sample_surface(m, n, annulus, t_range, seed):
    """Deterministic points on a ModelSurface or RadialSurface.

    z2 is uniform (by area) in the annulus, Im z1 uniform in t_range.
    """
    r_min, r_max = annulus
    t_min, t_max = t_range
    if not r_min > 0:
        raise DomainError("annulus r_min must be positive (origin excluded)")
    if r_max > m.eps0 or r_min > r_max:
        raise DomainError("annulus must lie within eps0")
    if t_min < -m.delta0 or t_max > m.delta0 or t_min > t_max:
        raise DomainError("t range must lie within delta0")
    if n <= 0:
        return []

    rng = np.random.default_rng(seed)
    radii = np.sqrt(rng.uniform(float(r_min) ** 2, float(r_max) ** 2, size=n))
    angles = rng.uniform(0.0, 2 * np.pi, size=n)
    ts = rng.uniform(float(t_min), float(t_max), size=n)

    points = []
    with m.precision.workprec():
        for radius, angle, t in zip(radii, angles, ts):
            z2 = mp.mpf(float(radius)) * mp.expj(mp.mpf(float(angle)))
            t = mp.mpf(float(t))
            if isinstance(m, RadialSurface):
                z1 = _solve_radial(m, z2, t)
                rho = m.eval_radial_rho(z1, z2)
            else:
                z1 = m.on_surface_z1(z2, t)
                rho = m.eval_rho(z1, z2)
            if abs(rho) > m.point_tol:
                raise SurfaceSolveError(f"|rho|={mp.nstr(abs(rho), 5)} exceeds point_tol")
            points.append(SurfacePoint(z1, z2, rho))
    logger.debug("Sampled %d surface points (seed=%s)", len(points), seed)
    return points


def _solve_radial(rs, z2, t):
    """Root of x -> rho(x + it, z2) started from the closed-form guess."""
    r = abs(z2)
    guess = -rs.profile.g(r) - t * rs.Q(r, t)
    try:
        x = mp.findroot(lambda x: rs.eval_radial_rho(mp.mpc(x, t), z2), guess)
    except (ValueError, ZeroDivisionError) as e:
        raise SurfaceSolveError(str(e))
    return mp.mpc(mp.re(x), t)


def load_model(config, precision_bits=None):
    """Build a ModelSurface or RadialSurface from a parsed JSON model definition."""
    try:
        bits = int(precision_bits or config.get('precision_bits', 192))
        precision = Precision(bits)
        with precision.workprec():
            profile = _profile_from_config(config)
            eps0 = mp.mpf(config.get('eps0', '0.15'))
            delta0 = mp.mpf(config.get('delta0', '0.3'))
            point_tol = config.get('point_tol')
            if config.get('kind') == 'radial':
                terms = [tuple(term) for term in config.get('Q', {}).get('poly', [])]
                return RadialSurface(profile, tuple(terms), eps0, delta0, precision, point_tol)
            if 'alpha' not in config or 'a' not in config:
                raise ConfigError("model needs 'alpha' and 'a'")
            alpha = mp.mpf(str(config['alpha']))
            a = HoloSeries.from_pairs(config['a'], precision)
            guards = {k: mp.mpf(v) for k, v in config.get('guards', {}).items()
                      if k in ('cos_guard', 'pos_guard')}
            return ModelSurface.build(a, alpha, profile, eps0, delta0, precision,
                                      point_tol=point_tol, **guards)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (DomainError, GuardError)):
            raise
        raise ConfigError(f"invalid model definition: {e}")


def _profile_from_config(config):
    p_cfg = config.get('p', {'family': 'inverse_power', 'c': 1, 's': 1})
    if p_cfg.get('family', 'inverse_power') != 'inverse_power':
        raise ConfigError(f"unsupported p family {p_cfg.get('family')!r}")
    q_cfg = config.get('q', {'poly': []})
    return RadialProfile(
        'inverse_power',
        c=mp.mpf(str(p_cfg.get('c', 1))),
        s=mp.mpf(str(p_cfg.get('s', 1))),
        p_poly=tuple(mp.mpf(str(x)) for x in p_cfg.get('poly', [])),
        q_poly=tuple(mp.mpf(str(x)) for x in q_cfg.get('poly', [])),
    )
