"""
Verification Suite Module
Residual checks and asymptotic probes for the model hypersurfaces: tangency
of the generator, invariance under the flow, group law, the identities behind
the invariance proof, vanishing-order and dilation probes, falsification of
perturbed maps and recovery of the flow parameter.

Every check returns a CheckReport. Uniqueness statements about the whole
stability group cannot be decided numerically; the falsification and recovery
checks only report consistency with them.
"""

import logging
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
import pandas as pd

from errors import (
    BranchError, DegenerateProbeError, DomainError, GuardError, IdentityUndefinedError,
    ParameterMismatchError, UnobservableParameterError,
)
from flow_dynamics import FlowMap, LinearField, generator_check, rotation_flow
from series_engine import as_complex, at_working_precision, eval_series

logger = logging.getLogger(__name__)

IDENTITIES = ('i', 'ii', 'iii', 'iv', 'v')
UPPER = 'max_le_tol'
LOWER = 'max_ge_tol'
CUSTOM = 'custom'

VANISHING_THRESHOLD = 1e-10
EXPANSION_FINAL_TOL = 0.05
SLOPE_TOL = 0.1
ODE_RATIO = 1 / 16
ODE_RATIO_TOL = 0.2
RADIAL_INVARIANCE_TOL = '1e-30'


def _nstr(x, digits=6):
    if isinstance(x, (mp.mpf, mp.mpc)):
        return mp.nstr(x, digits)
    return x


@dataclass
class CheckReport:
    """Outcome of one check.

    For criterion ``max_le_tol``, passed iff max_residual <= tolerance_used.
    ``max_ge_tol`` is used by falsification witnesses; ``custom`` checks
    document their rule in ``notes``.
    """

    check_name: str
    points_evaluated: int
    max_residual: object
    mean_residual: object
    tolerance_used: object
    passed: bool
    criterion: str = UPPER
    rows: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    sub_reports: list = field(default_factory=list)

    @classmethod
    def from_residuals(cls, name, residuals, tolerance, rows=None, criterion=UPPER, notes=None):
        """
        Summarize per-point residuals against a tolerance.

        Args:
            name: Check name
            residuals: Iterable of non-negative residuals
            tolerance: Threshold for the criterion
            rows: Per-point rows kept for CSV output
            criterion: UPPER (max <= tol) or LOWER (max >= tol)
            notes: Extra report notes

        Returns:
            CheckReport: An empty residual list never passes
        """
        residuals = list(residuals)
        n = len(residuals)
        if n:
            max_residual = max(residuals)
            mean_residual = mp.fsum(residuals) / n
        else:
            max_residual = mean_residual = mp.mpf(0)
        if criterion == UPPER:
            passed = n >= 1 and max_residual <= tolerance
        elif criterion == LOWER:
            passed = n >= 1 and max_residual >= tolerance
        else:
            raise ValueError("custom criteria must set passed explicitly")
        return cls(name, n, max_residual, mean_residual, tolerance, bool(passed),
                   criterion, rows or [], notes or {})

    @classmethod
    def combine(cls, name, sub_reports, notes=None):
        """Custom report that passes iff every sub-report passes."""
        upper = [r for r in sub_reports if r.criterion == UPPER]
        pool = upper or sub_reports
        return cls(
            name,
            sum(r.points_evaluated for r in sub_reports),
            max((r.max_residual for r in pool), default=mp.mpf(0)),
            max((r.mean_residual for r in pool), default=mp.mpf(0)),
            max((r.tolerance_used for r in pool), default=mp.mpf(0)),
            all(r.passed for r in sub_reports) and bool(sub_reports),
            CUSTOM,
            notes=notes or {'rule': 'passes iff every sub-report passes'},
            sub_reports=list(sub_reports),
        )

    def to_dict(self, with_rows=False):
        """JSON-ready dict, numbers rendered with 6 significant digits."""
        doc = {
            'check_name': self.check_name,
            'points_evaluated': self.points_evaluated,
            'max_residual': _nstr(self.max_residual),
            'mean_residual': _nstr(self.mean_residual),
            'tolerance_used': _nstr(self.tolerance_used),
            'pass': self.passed,
            'criterion': self.criterion,
            'notes': {k: _nstr(v) for k, v in self.notes.items()},
            'sub_reports': [r.to_dict(with_rows) for r in self.sub_reports],
        }
        if with_rows:
            doc['rows'] = self.frame_rows()
        return doc

    def frame_rows(self):
        return [{k: _nstr(v, 12) for k, v in row.items()} for row in self.rows]

    def to_frame(self):
        """Per-point rows, including those of the sub-reports."""
        frames = []
        if self.rows:
            frame = pd.DataFrame(self.frame_rows())
            frame.insert(0, 'check_name', self.check_name)
            frames.append(frame)
        frames.extend(r.to_frame() for r in self.sub_reports)
        frames = [f for f in frames if not f.empty]
        if not frames:
            return pd.DataFrame(columns=['check_name'])
        return pd.concat(frames, ignore_index=True, sort=False)


def _loglog_slope(xs, ys):
    """Least-squares slope of log10(y) against log10(x)."""
    lx = np.log10(np.array([float(x) for x in xs]))
    ly = np.log10(np.array([float(y) for y in ys]))
    return float(np.polyfit(lx, ly, 1)[0])


def _same_parameters(m, alpha, a):
    if alpha != m.alpha:
        return False
    return a.coeffs == m.a.coeffs


# -- tangency and invariance ----------------------------------------------------

@at_working_precision
def tangency_residual(m, v, z1, z2):
    """|Re(rho_z1 H1 + rho_z2 H2)| with analytic Wirtinger derivatives."""
    t = mp.im(z1)
    H1, H2 = v.eval_field(z1, z2)
    rho_z1 = mp.mpf(1) / 2 + m.eval_F_t(z2, t) / mp.mpc(0, 2)
    rho_z2 = m.wirtinger('P', z2, t) + m.wirtinger('F', z2, t)
    return abs(mp.re(rho_z1 * H1 + rho_z2 * H2))


def check_tangency(m, v, pts, strict=True, criterion=UPPER, tolerance=None, name='tangency'):
    """Re H tangent to M at every sample point."""
    with m.precision.workprec():
        if strict and hasattr(v, 'a') and not _same_parameters(m, v.alpha, v.a):
            raise ParameterMismatchError("vector field (a, alpha) differs from the model")
        rows, residuals = [], []
        for k, p in enumerate(pts):
            residual = tangency_residual(m, v, p.z1, p.z2)
            residuals.append(residual)
            rows.append({'index': k, 'z2': p.z2, 't': p.t, 'residual': residual})
        if tolerance is None:
            tolerance = m.precision.zero_tol if criterion == UPPER else m.precision.witness_tol
        return CheckReport.from_residuals(name, residuals, tolerance, rows, criterion)


def check_invariance(m, f, pts, times):
    """|rho(phi_t(p))| over points and times."""
    with m.precision.workprec():
        rows, residuals = [], []
        for k, p in enumerate(pts):
            for t in times:
                w1, w2 = f.flow_closed(t, p.z1, p.z2)
                residual = abs(m.eval_rho(w1, w2))
                residuals.append(residual)
                rows.append({'index': k, 't_flow': mp.mpf(t), 'residual': residual})
        return CheckReport.from_residuals('invariance', residuals, m.precision.zero_tol, rows)


def check_group_law(f, pts, pairs):
    """phi_s(phi_t(z)) = phi_{s+t}(z) and phi_{-t}(phi_t(z)) = z."""
    with f.precision.workprec():
        rows, residuals = [], []
        for k, (s, t) in enumerate(pairs):
            p = pts[k % len(pts)]
            s, t = mp.mpf(s), mp.mpf(t)
            once = f.flow_closed(t, p.z1, p.z2)
            twice = f.flow_closed(s, *once)
            direct = f.flow_closed(s + t, p.z1, p.z2)
            back = f.flow_closed(-t, *once)
            composition = max(abs(twice[j] - direct[j]) for j in range(2))
            inverse = max(abs(back[0] - p.z1), abs(back[1] - p.z2))
            residual = max(composition, inverse)
            residuals.append(residual)
            rows.append({'index': k, 's': s, 't': t, 'composition': composition,
                         'inverse': inverse, 'residual': residual})
        return CheckReport.from_residuals('group_law', residuals, f.precision.zero_tol, rows)


def check_generator(f, v, pts, hs=(1e-2, 1e-3, 1e-4), name='generator'):
    """Central-difference flow derivative against H; log-log slope must be 2."""
    with f.precision.workprec():
        rows, deviations = [], []
        for k, p in enumerate(pts):
            errors = [generator_check(f, v, p.z1, p.z2, h) for h in hs]
            slope = _loglog_slope(hs, errors)
            deviations.append(mp.mpf(abs(slope - 2)))
            row = {'index': k, 'slope': slope}
            row.update({f'residual_h{j}': e for j, e in enumerate(errors)})
            rows.append(row)
        return CheckReport.from_residuals(name, deviations, mp.mpf(SLOPE_TOL), rows,
                                          notes={'measure': '|slope - 2|'})


def check_ode_agreement(f, pts, t=1, steps_list=(16, 32, 64)):
    """flow_ode against flow_closed: error ratio per step doubling close to 1/16."""
    with f.precision.workprec():
        rows, deviations = [], []
        for k, p in enumerate(pts):
            exact = f.flow_closed(t, p.z1, p.z2)
            errors = []
            for steps in steps_list:
                y = f.flow_ode(t, p.z1, p.z2, steps)
                errors.append(max(abs(y[j] - exact[j]) for j in range(2)))
            ratios = [errors[j + 1] / errors[j] for j in range(len(errors) - 1)]
            deviation = max(abs(ratio / ODE_RATIO - 1) for ratio in ratios)
            deviations.append(deviation)
            row = {'index': k, 'deviation': deviation}
            row.update({f'error_steps{s}': e for s, e in zip(steps_list, errors)})
            rows.append(row)
        return CheckReport.from_residuals('ode', deviations, mp.mpf(ODE_RATIO_TOL), rows,
                                          notes={'measure': '|16 * e(2k)/e(k) - 1|'})


# -- identities ------------------------------------------------------------------

@at_working_precision
def identity_residual(m, which, z2, t, method='analytic'):
    """|left-hand side - right-hand side| of one identity at (z2, t)."""
    z2 = as_complex(z2)
    t = mp.mpf(t)
    i = mp.mpc(0, 1)
    a = eval_series(m.a, z2, m.precision)
    Q0 = m.eval_Q0(z2)
    half_term = mp.mpf(1) / 2 + Q0 / (2 * i)
    if which == 'i':
        return abs(mp.re(i * z2 * m.wirtinger('Q0', z2, t, method) + (1 + Q0 * Q0) / 2 * i * a))
    if which == 'ii':
        P1 = m.eval_P1(z2)
        return abs(mp.re(i * z2 * m.wirtinger('P1', z2, t, method) - half_term * a * P1))
    if which == 'iii':
        if m.alpha_is_zero:
            raise IdentityUndefinedError()
        P = m.eval_P(z2)
        factor = mp.expm1(-m.alpha * P) / m.alpha
        return abs(mp.re(i * z2 * m.wirtinger('P', z2, t, method) + factor * half_term * a))
    if which == 'iv':
        F = m.eval_F(z2, t)
        lhs = (i + m.eval_F_t(z2, t)) * mp.exp(m.alpha * (i * t - F))
        return abs(lhs - (i + Q0))
    if which == 'v':
        F_z = m.wirtinger('F', z2, t, method)
        return abs(mp.re(2 * i * m.alpha * z2 * F_z + (m.eval_F_t(z2, t) - Q0) * i * a))
    raise ValueError(f"unknown identity {which!r} (expected one of {IDENTITIES})")


def check_identity(m, which, pts_z2, ts, cross_check=True):
    """Residuals of one identity, with a finite-difference cross-check."""
    if which == 'iii' and m.alpha_is_zero:
        raise IdentityUndefinedError()
    with m.precision.workprec():
        ts = list(ts)
        if len(ts) == 1:
            ts = ts * len(pts_z2)
        if len(ts) != len(pts_z2):
            raise ValueError("pts_z2 and ts must have the same length")
        rows, residuals, fd_residuals = [], [], []
        for k, (z2, t) in enumerate(zip(pts_z2, ts)):
            if as_complex(z2) == 0:
                raise DomainError("identities are checked away from z2 = 0")
            residual = identity_residual(m, which, z2, t)
            residuals.append(residual)
            row = {'index': k, 'z2': z2, 't': mp.mpf(t), 'residual': residual}
            if cross_check:
                fd = identity_residual(m, which, z2, t, 'finite_difference')
                fd_residuals.append(fd)
                row['residual_fd'] = fd
            rows.append(row)
        report = CheckReport.from_residuals(f'identity_{which}', residuals, m.precision.zero_tol, rows)
        if cross_check and fd_residuals:
            worst_fd = max(fd_residuals)
            report.notes['max_residual_fd'] = worst_fd
            report.notes['fd_tolerance'] = m.precision.fd_tol
            report.passed = report.passed and worst_fd <= m.precision.fd_tol
        return report


def check_wirtinger_agreement(m, pts_z2, ts):
    """|analytic - finite difference| for every field at every sample."""
    with m.precision.workprec():
        rows, residuals = [], []
        for k, (z2, t) in enumerate(zip(pts_z2, ts)):
            for name in ('R', 'P1', 'P', 'Q0', 'F'):
                diff = abs(m.wirtinger(name, z2, t, 'analytic') - m.wirtinger(name, z2, t, 'finite_difference'))
                residuals.append(diff)
                rows.append({'index': k, 'field': name, 'residual': diff})
        return CheckReport.from_residuals('wirtinger_agreement', residuals, m.precision.fd_tol, rows)


# -- probes on the radial profile ------------------------------------------------------

def _require_decreasing(radii):
    radii = [mp.mpf(r) for r in radii]
    if not radii or any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if any(radii[j + 1] >= radii[j] for j in range(len(radii) - 1)):
        raise ValueError("radii must be strictly decreasing")
    return radii


def probe_infinite_vanishing(profile, orders, radii, threshold=VANISHING_THRESHOLD, tail=3):
    """Table of e^{p(r)}/r^k; each k needs a decreasing tail ending below threshold."""
    radii = _require_decreasing(radii)
    rows, finals, verdicts = [], [], []
    for k in orders:
        values = [profile.g(r) / mp.power(r, k) for r in radii]
        for r, value in zip(radii, values):
            rows.append({'order': k, 'r': r, 'value': value})
        last = values[-tail:]
        monotone = all(last[j + 1] < last[j] for j in range(len(last) - 1))
        finals.append(values[-1])
        verdicts.append(monotone and values[-1] <= threshold)
    passed = bool(verdicts) and all(verdicts)
    return CheckReport('vanishing', len(rows), max(finals, default=mp.mpf(0)),
                       mp.fsum(finals) / max(len(finals), 1), mp.mpf(threshold), passed, CUSTOM, rows,
                       {'rule': 'decreasing tail and final value <= tolerance for every order'})


def probe_dilation(profile, alpha, radii):
    """Ratios e^{p(alpha r) - p(r)}; a finite positive limit would need alpha = 1."""
    alpha = mp.mpf(alpha)
    if alpha == 1:
        raise DegenerateProbeError()
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    radii = _require_decreasing(radii)
    ratios = [mp.exp(profile.p(alpha * r) - profile.p(r)) for r in radii]
    rows = [{'r': r, 'ratio': ratio} for r, ratio in zip(radii, ratios)]
    steps = list(zip(ratios, ratios[1:]))
    if alpha > 1:
        passed = all(b > a for a, b in steps) and ratios[-1] >= 10 * ratios[0]
        direction = 'increasing to +inf'
    else:
        passed = all(b < a for a, b in steps) and ratios[-1] * 10 <= ratios[0]
        direction = 'decreasing to 0'
    return CheckReport('dilation', len(rows), max(ratios), mp.fsum(ratios) / len(ratios),
                       ratios[0], bool(passed and len(ratios) >= 2), CUSTOM, rows,
                       {'rule': f'strictly {direction}, gaining a factor 10 over the table',
                        'alpha': alpha})


def check_expansion(profile, z_samples, beta_scale, direction=1, precision=None):
    """First-order expansion of P(|z + z beta|) - P(|z|) for beta = s P(z) u."""
    u = as_complex(direction)
    scales = [mp.mpf(s) for s in beta_scale]
    rows, verdicts, finals = [], [], []
    skipped = 0
    floor = precision.fd_tol if precision is not None else mp.mpf(0)
    for k, z in enumerate(z_samples):
        z = as_complex(z)
        r = abs(z)
        P = profile.g(r)
        bound = max(1, abs(r * profile.dp(r)))
        errors = []
        for s in scales:
            beta = s * P * u
            lhs = profile.g(abs(z + z * beta)) - P
            predicted = P * r * profile.dp(r) * mp.re(beta)
            row = {'index': k, 'z': z, 'scale': s, 'lhs': lhs, 'predicted': predicted}
            if predicted == 0:
                skipped += 1
                row['quadratic_bound_ok'] = abs(lhs) <= abs(beta) ** 2 * P * bound
                verdicts.append(row['quadratic_bound_ok'])
            else:
                ratio = lhs / predicted
                row['ratio'] = ratio
                errors.append((s, abs(ratio - 1)))
            rows.append(row)
        if errors:
            ok = errors[-1][1] <= EXPANSION_FINAL_TOL
            for (s0, e0), (s1, e1) in zip(errors, errors[1:]):
                if e1 > floor and e1 > 1.5 * e0 * (s1 / s0):
                    ok = False
            finals.append(errors[-1][1])
            verdicts.append(ok)
    return CheckReport('expansion', len(rows), max(finals, default=mp.mpf(0)),
                       mp.fsum(finals) / max(len(finals), 1), mp.mpf(EXPANSION_FINAL_TOL),
                       bool(verdicts) and all(verdicts), CUSTOM, rows,
                       {'rule': '|ratio - 1| shrinks linearly in the scale and ends <= tolerance',
                        'skipped': skipped})


def probe_log_derivative_growth(profile, radii):
    """|r p'(r)| grows without bound as r -> 0+."""
    radii = _require_decreasing(radii)
    values = [abs(r * profile.dp(r)) for r in radii]
    rows = [{'r': r, 'r_dp': v} for r, v in zip(radii, values)]
    increasing = all(values[j + 1] > values[j] for j in range(len(values) - 1))
    passed = increasing and len(values) >= 2 and values[-1] >= 2 * values[0]
    return CheckReport('log_growth', len(rows), values[-1], mp.fsum(values) / len(values),
                       2 * values[0], bool(passed), CUSTOM, rows,
                       {'rule': 'strictly increasing and at least doubling over the table'})


# -- perturbed maps, recovery ----------------------------------------------------

@dataclass(frozen=True)
class PerturbedMap:
    """phi_{t_base} plus sum eta_kj z1^k z2^j (component 1) and eps_kj z1^k z2^j (component 2)."""

    base: FlowMap
    t_base: object
    eps: tuple = ()
    eta: tuple = ()

    def __call__(self, z1, z2):
        with self.base.precision.workprec():
            w1, w2 = self.base.flow_closed(self.t_base, z1, z2)
            for (k, j), c in self.eta:
                w1 += c * mp.power(z1, k) * mp.power(z2, j)
            for (k, j), c in self.eps:
                w2 += c * mp.power(z1, k) * mp.power(z2, j)
            return w1, w2


def residual_of_map(m, g, pts, criterion=UPPER, tolerance=None, name='map_residual'):
    """|rho(g(p))| per point; guard failures are recorded, not raised."""
    with m.precision.workprec():
        rows, residuals = [], []
        failures = 0
        for k, p in enumerate(pts):
            try:
                w1, w2 = g(p.z1, p.z2)
                residual = abs(m.eval_rho(w1, w2))
            except (BranchError, GuardError, DomainError) as e:
                failures += 1
                logger.debug("%s: point %d skipped (%s)", name, k, e)
                rows.append({'index': k, 'error': str(e)})
                continue
            residuals.append(residual)
            rows.append({'index': k, 'residual': residual})
        if tolerance is None:
            tolerance = m.precision.zero_tol if criterion == UPPER else m.precision.witness_tol
        report = CheckReport.from_residuals(name, residuals, tolerance, rows, criterion)
        report.notes['guard_failures'] = failures
        return report


def recover_flow_parameter(samples):
    """Mean of arg(w2 / z2) over samples ((z1, z2), (w1, w2)) with z2 != 0."""
    angles = []
    for (z1, z2), (w1, w2) in samples:
        z2 = as_complex(z2)
        if z2 == 0:
            continue
        angles.append(mp.arg(as_complex(w2) / z2))
    if not angles:
        raise UnobservableParameterError()
    return mp.fsum(angles) / len(angles)


def check_recovery(f, z2_samples, targets):
    """
    Recover known flow times from images of sample points.

    Args:
        f: FlowMap producing the images
        z2_samples: z2 values of the start points (z1 = 0)
        targets: Flow times in (-pi, pi) to recover

    Returns:
        CheckReport: |recovered - target| per target, tolerance zero_tol
    """
    with f.precision.workprec():
        rows, residuals = [], []
        for t_star in targets:
            t_star = mp.mpf(t_star)
            samples = [((mp.mpc(0), z2), f.flow_closed(t_star, 0, z2)) for z2 in z2_samples]
            estimate = recover_flow_parameter(samples)
            residual = abs(estimate - t_star)
            residuals.append(residual)
            rows.append({'t_star': t_star, 'recovered': estimate, 'residual': residual})
        return CheckReport.from_residuals('recover', residuals, f.precision.zero_tol, rows)


# -- defect transport along the flow -------------------------------------------

@at_working_precision
def defect_rate(m, z2, g):
    """g' predicted along the flow for the defect g = rho(z(t))."""
    a = eval_series(m.a, z2, m.precision)
    coupling = mp.re((mp.mpf(1) / 2 + m.eval_Q0(z2) / mp.mpc(0, 2)) * a)
    if m.alpha_is_zero:
        return 2 * g * coupling
    return 2 * mp.expm1(m.alpha * g) / m.alpha * mp.exp(-m.alpha * m.eval_P(z2)) * coupling


def check_defect_transport(m, f, pts, times, offset='1e-3'):
    """Start off the surface by ``offset`` in Re z1 and compare d/dt rho(phi_t) with its transport law."""
    with m.precision.workprec():
        h = m.precision.fd_step
        offset = mp.mpf(offset)
        rows, residuals = [], []
        for k, p in enumerate(pts):
            z1 = p.z1 + offset
            for t in times:
                t = mp.mpf(t)
                g = lambda s: m.eval_rho(*f.flow_closed(s, z1, p.z2))
                observed = (g(t + h) - g(t - h)) / (2 * h)
                predicted = defect_rate(m, p.z2 * mp.expj(t), g(t))
                residual = abs(observed - predicted)
                residuals.append(residual)
                rows.append({'index': k, 't_flow': t, 'defect': g(t), 'residual': residual})
        return CheckReport.from_residuals('defect', residuals, m.precision.fd_tol, rows)


# -- alpha -> 0 ----------------------------------------------------------------------

def check_alpha_limit(m, pts, alphas=('1e-6', '1e-8', '1e-10'), t_flow='0.5', max_error='1e-8'):
    """F, P and phi_t at small alpha against the alpha = 0 formulas: O(alpha) with slope 1."""
    with m.precision.workprec():
        alphas = [mp.mpf(x) for x in alphas]
        t_flow = mp.mpf(t_flow)
        base = m.with_alpha(0)
        base_flow = FlowMap(m.a, 0, m.precision)
        variants = [(alpha, m.with_alpha(alpha), FlowMap(m.a, alpha, m.precision)) for alpha in alphas]
        rows, deviations = [], []
        worst = mp.mpf(0)
        for k, p in enumerate(pts):
            t = p.t
            reference = {
                'F': base.eval_F(p.z2, t),
                'P': base.eval_P1(p.z2),
                'flow': base_flow.flow_closed(t_flow, p.z1, p.z2),
            }
            errors = {'F': [], 'P': [], 'flow': []}
            for alpha, model, flow in variants:
                errors['F'].append(abs(model.eval_F(p.z2, t) - reference['F']))
                errors['P'].append(abs(model.eval_P(p.z2) - reference['P']))
                image = flow.flow_closed(t_flow, p.z1, p.z2)
                errors['flow'].append(max(abs(image[j] - reference['flow'][j]) for j in range(2)))
            for quantity, errs in errors.items():
                if all(e > 0 for e in errs):
                    slope = _loglog_slope(alphas, errs)
                    deviation = mp.mpf(abs(slope - 1))
                else:
                    slope, deviation = None, mp.mpf(0)
                deviations.append(deviation)
                worst = max(worst, errs[-1])
                rows.append({'index': k, 'quantity': quantity, 'slope': slope, 'error_min_alpha': errs[-1]})
        report = CheckReport.from_residuals('alpha_limit', deviations, mp.mpf(SLOPE_TOL), rows,
                                            notes={'measure': '|slope - 1|', 'max_error_min_alpha': worst})
        report.passed = report.passed and worst <= mp.mpf(max_error)
        return report


# -- radial surfaces -----------------------------------------------------------------

def check_radial(rs, pts, times, betas=(1, '-0.5', 2)):
    """Rotation invariance, tangency of i beta z2 d/dz2, and the z1 d/dz1 witness."""
    with rs.precision.workprec():
        rows, residuals = [], []
        for k, p in enumerate(pts):
            for t in times:
                w1, w2 = rotation_flow(t, p.z1, p.z2, rs.precision)
                residual = abs(rs.eval_radial_rho(w1, w2))
                residuals.append(residual)
                rows.append({'index': k, 't_flow': mp.mpf(t), 'residual': residual})
        invariance = CheckReport.from_residuals('radial_rotation_invariance', residuals,
                                                min(rs.precision.tau, mp.mpf(RADIAL_INVARIANCE_TOL)), rows)

        rows, residuals = [], []
        for beta in betas:
            field_ = LinearField.rotation(beta, rs.precision)
            for k, p in enumerate(pts):
                residual = radial_tangency_residual(rs, field_, p.z1, p.z2)
                residuals.append(residual)
                rows.append({'index': k, 'beta': mp.mpf(beta), 'residual': residual})
        rotation = CheckReport.from_residuals('radial_rotation_tangency', residuals,
                                              rs.precision.zero_tol, rows)

        euler = LinearField(1, 0, rs.precision)
        rows, residuals = [], []
        for k, p in enumerate(pts):
            residual = radial_tangency_residual(rs, euler, p.z1, p.z2)
            residuals.append(residual)
            rows.append({'index': k, 'residual': residual})
        witness = CheckReport.from_residuals('radial_euler_witness', residuals,
                                             rs.precision.witness_tol, rows, LOWER)
        return CheckReport.combine('radial', [invariance, rotation, witness],
                                   {'rule': 'consistency with the rotation-only stability group'})


@at_working_precision
def radial_tangency_residual(rs, v, z1, z2):
    """|Re(rho_z1 H1 + rho_z2 H2)| on the radial surface."""
    H1, H2 = v.eval_field(z1, z2)
    return abs(mp.re(rs.rho_z1(z1, z2) * H1 + rs.rho_z2(z1, z2) * H2))
