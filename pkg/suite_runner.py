"""
Suite Runner Module
Loads a suite configuration, runs the selected verification suites against a
model and assembles the reports in a deterministic order.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import mpmath as mp
import numpy as np
import pandas as pd

from errors import ConfigError
from flow_dynamics import FlowMap, LinearField, VectorField
from surface_models import ModelSurface, RadialSurface, load_model, sample_surface
from utils import atomic_write_text, format_residual, load_json_config, validate_model_config, write_frame_csv
from verification_suite import (
    IDENTITIES, LOWER, CheckReport, PerturbedMap, check_alpha_limit, check_defect_transport,
    check_expansion, check_generator, check_group_law, check_identity, check_invariance,
    check_ode_agreement, check_radial, check_recovery, check_tangency, check_wirtinger_agreement,
    probe_dilation, probe_infinite_vanishing, probe_log_derivative_growth, residual_of_map,
)

logger = logging.getLogger(__name__)

SUITES = (
    'tangency', 'invariance', 'group_law', 'generator', 'identities', 'vanishing',
    'dilation', 'expansion', 'perturbation', 'recover', 'radial', 'alpha_limit',
    'ode', 'defect', 'log_growth',
)
PROFILE_SUITES = ('vanishing', 'dilation', 'expansion', 'log_growth')

INVARIANCE_TIMES = ('0.1', '-0.1', '0.5', '-0.5', '1.0')
GROUP_LAW_PAIRS = 50
GROUP_LAW_BOUND = 0.5
IDENTITY_POINTS = 50
SUBGRID_POINTS = 10
VANISHING_ORDERS = tuple(range(1, 21))
VANISHING_RADII = ('0.02', '0.01', '0.005')
DILATION_ALPHA = 2
DILATION_RADII = ('0.05', '0.04', '0.03', '0.02', '0.01')
EXPANSION_SAMPLES = ('0.05', '0.03+0.04j', '-0.02+0.01j')
EXPANSION_SCALES = ('1', '0.1', '0.01')
PERTURBATION_TIME = '0.3'
PERTURBATION_SIZE = '1e-3'
PERTURBATION_MIN_RADIUS = 0.05
RECOVERY_SAMPLES = 5
DEFECT_TIMES = ('0.1', '0.5')
LOG_GROWTH_RADII = ('0.1', '0.05', '0.02', '0.01', '0.005')
MISMATCH_WITNESS = '1e-6'


@dataclass(frozen=True)
class SuiteConfig:
    """One model, one suite run. Paths are resolved against the config file."""

    model: Path
    suites: tuple = SUITES
    radial_model: Path = None
    n: int = 100
    annulus: tuple = ('0.02', '0.1')
    t_range: tuple = ('-0.2', '0.2')
    seed: int = 12345
    precision_bits: int = None
    out: Path = Path('reports/check_report.json')
    csv: bool = False
    field_alpha: object = None

    def __post_init__(self):
        for name in ('model', 'radial_model', 'out'):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, Path(value))
        object.__setattr__(self, 'suites', tuple(self.suites))
        if not self.suites:
            raise ConfigError("suite selection is empty")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown} (expected a subset of {list(SUITES)})")
        if int(self.n) < 1:
            raise ConfigError("n must be at least 1")
        if len(self.annulus) != 2 or len(self.t_range) != 2:
            raise ConfigError("annulus and t_range need two entries each")

    @classmethod
    def from_file(cls, path, **overrides):
        """
        Load a suite config from JSON.

        Args:
            path: Suite config file; relative paths inside resolve against its folder
            **overrides: Field values that win over the file (None is ignored)

        Returns:
            SuiteConfig: Validated configuration
        """
        path = Path(path)
        doc = load_json_config(path)
        return cls.from_dict(doc, path.parent, **overrides)

    @classmethod
    def from_dict(cls, doc, base_dir='.', **overrides):
        """Build from a parsed document; see ``from_file``."""
        base_dir = Path(base_dir)
        if 'model' not in doc and 'model' not in overrides:
            raise ConfigError("suite config needs a 'model' path")

        def resolve(value):
            return None if value is None else base_dir / value

        fields = {
            'model': resolve(doc.get('model')),
            'radial_model': resolve(doc.get('radial_model')),
            'suites': tuple(doc.get('suites', SUITES)),
            'n': int(doc.get('n', 100)),
            'annulus': tuple(str(x) for x in doc.get('annulus', ('0.02', '0.1'))),
            't_range': tuple(str(x) for x in doc.get('t_range', ('-0.2', '0.2'))),
            'seed': int(doc.get('seed', 12345)),
            'precision_bits': doc.get('precision_bits'),
            'out': resolve(doc['out']) if 'out' in doc else Path('reports/check_report.json'),
            'csv': bool(doc.get('csv', False)),
            'field_alpha': doc.get('field_alpha'),
        }
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**fields)


def load_model_file(path, precision_bits=None):
    """Read, validate and build a model definition."""
    config = load_json_config(path)
    ok, message = validate_model_config(config)
    if not ok:
        raise ConfigError(f"{path}: {message}")
    return load_model(config, precision_bits)


class SuiteRunner:
    """Runs the configured suites against one model and keeps the reports in suite order."""

    def __init__(self, config, model, radial=None):
        self.config = config
        self.model = model
        self.radial = radial
        self.precision = model.precision
        self.reports = []
        self._points = None

    @classmethod
    def from_config(cls, config):
        """Load the model (and radial model when needed) named by a SuiteConfig."""
        model = load_model_file(config.model, config.precision_bits)
        radial = None
        if 'radial' in config.suites:
            if isinstance(model, RadialSurface):
                radial = model
            elif config.radial_model is None:
                raise ConfigError("suite 'radial' needs a 'radial_model'")
            else:
                radial = load_model_file(config.radial_model, config.precision_bits)
                if not isinstance(radial, RadialSurface):
                    raise ConfigError("'radial_model' must have kind 'radial'")
        needs_model = [s for s in config.suites if s not in ('radial',) + PROFILE_SUITES]
        if needs_model and not isinstance(model, ModelSurface):
            raise ConfigError(f"suites {needs_model} need a model surface, not a radial one")
        return cls(config, model, radial)

    # -- shared inputs -------------------------------------------------------

    def _mpf_pair(self, pair):
        return tuple(mp.mpf(str(x)) for x in pair)

    def points(self):
        """Seeded sample grid on the model, built once."""
        if self._points is None:
            with self.precision.workprec():
                self._points = sample_surface(
                    self.model, self.config.n, self._mpf_pair(self.config.annulus),
                    self._mpf_pair(self.config.t_range), self.config.seed,
                )
            logger.info("Sampled %d points on the model", len(self._points))
        return self._points

    def flow(self):
        return FlowMap(self.model.a, self.model.alpha, self.precision)

    def _times(self, values):
        return [mp.mpf(v) for v in values]

    # -- running -------------------------------------------------------------

    def run_suites(self):
        """Run every selected suite in config order."""
        self.reports = []
        for name in self.config.suites:
            logger.info("Running suite %s", name)
            with self.precision.workprec():
                report = getattr(self, f'suite_{name}')()
            logger.info("Suite %s %s (max residual %s)", name,
                        'passed' if report.passed else 'FAILED', format_residual(report.max_residual))
            self.reports.append(report)
        return self.reports

    @property
    def passed(self):
        return bool(self.reports) and all(r.passed for r in self.reports)

    def suite_tangency(self):
        m = self.model
        pts = self.points()
        if self.config.field_alpha is not None:
            field_ = VectorField(m.a, mp.mpf(str(self.config.field_alpha)), self.precision)
            return check_tangency(m, field_, pts, strict=False)

        subs = [check_tangency(m, VectorField(m.a, m.alpha, self.precision), pts)]
        subs.append(check_tangency(m, LinearField(0, 0, self.precision), pts, name='tangency_zero_field'))
        other_alpha = 1 if m.alpha_is_zero else 0
        subs.append(check_tangency(
            m, VectorField(m.a, other_alpha, self.precision), pts, strict=False,
            criterion=LOWER, tolerance=mp.mpf(MISMATCH_WITNESS), name='tangency_mismatched_alpha',
        ))
        if not m.a.is_zero():
            subs.append(check_tangency(
                m, LinearField.rotation(1, self.precision), pts,
                criterion=LOWER, name='tangency_rotation_only',
            ))
        return CheckReport.combine('tangency', subs)

    def suite_invariance(self):
        return check_invariance(self.model, self.flow(), self.points(), self._times(INVARIANCE_TIMES))

    def suite_group_law(self):
        rng = np.random.default_rng(self.config.seed)
        draws = rng.uniform(-GROUP_LAW_BOUND, GROUP_LAW_BOUND, size=(GROUP_LAW_PAIRS, 2))
        pairs = [(mp.mpf(float(s)), mp.mpf(float(t))) for s, t in draws]
        return check_group_law(self.flow(), self.points(), pairs)

    def suite_generator(self):
        f = self.flow()
        return check_generator(f, f.field(), self.points()[:SUBGRID_POINTS])

    def suite_identities(self):
        pts = self.points()[:IDENTITY_POINTS]
        z2s = [p.z2 for p in pts]
        ts = [p.t for p in pts]
        subs = []
        for which in IDENTITIES:
            if which == 'iii' and self.model.alpha_is_zero:
                logger.info("Identity iii skipped for alpha=0")
                continue
            subs.append(check_identity(self.model, which, z2s, ts))
        subs.append(check_wirtinger_agreement(self.model, z2s, ts))
        notes = {'rule': 'passes iff every sub-report passes'}
        if self.model.alpha_is_zero:
            notes['skipped'] = 'identity_iii'
        return CheckReport.combine('identities', subs, notes)

    def _profile(self):
        return self.model.profile

    def suite_vanishing(self):
        return probe_infinite_vanishing(self._profile(), VANISHING_ORDERS, self._times(VANISHING_RADII))

    def suite_dilation(self):
        return probe_dilation(self._profile(), DILATION_ALPHA, self._times(DILATION_RADII))

    def suite_expansion(self):
        samples = [mp.mpc(complex(z)) for z in EXPANSION_SAMPLES]
        scales = self._times(EXPANSION_SCALES)
        real_beta = check_expansion(self._profile(), samples, scales, 1, self.precision)
        imaginary_beta = check_expansion(self._profile(), samples, scales, 1j, self.precision)
        real_beta.check_name = 'expansion_real_beta'
        imaginary_beta.check_name = 'expansion_imaginary_beta'
        return CheckReport.combine('expansion', [real_beta, imaginary_beta])

    def suite_log_growth(self):
        return probe_log_derivative_growth(self._profile(), self._times(LOG_GROWTH_RADII))

    def suite_perturbation(self):
        m = self.model
        f = self.flow()
        pts = [p for p in self.points() if abs(p.z2) >= PERTURBATION_MIN_RADIUS] or self.points()
        t_base = mp.mpf(PERTURBATION_TIME)
        size = mp.mpf(PERTURBATION_SIZE)
        witness = 1000 * self.precision.zero_tol
        subs = [residual_of_map(m, PerturbedMap(f, t_base), pts, name='perturbation_zero')]
        for label, eps, eta in (
            ('perturbation_eps02', (((0, 2), size),), ()),
            ('perturbation_eps11', (((1, 1), size),), ()),
            ('perturbation_eta10', (), (((1, 0), size),)),
        ):
            subs.append(residual_of_map(m, PerturbedMap(f, t_base, eps, eta), pts,
                                        criterion=LOWER, tolerance=witness, name=label))
        return CheckReport.combine('perturbation', subs,
                                   {'rule': 'consistency with rigidity: exact flow passes, perturbed maps are witnessed'})

    def suite_recover(self):
        z2s = [p.z2 for p in self.points()[:RECOVERY_SAMPLES]]
        targets = [mp.mpf(0), mp.mpf('0.3'), -mp.pi + mp.mpf('0.01')]
        return check_recovery(self.flow(), z2s, targets)

    def suite_radial(self):
        rs = self.radial
        with rs.precision.workprec():
            pts = sample_surface(rs, self.config.n, self._mpf_pair(self.config.annulus),
                                 self._mpf_pair(self.config.t_range), self.config.seed)
            return check_radial(rs, pts, self._times(INVARIANCE_TIMES))

    def suite_alpha_limit(self):
        return check_alpha_limit(self.model, self.points()[:SUBGRID_POINTS])

    def suite_ode(self):
        return check_ode_agreement(self.flow(), self.points()[:SUBGRID_POINTS])

    def suite_defect(self):
        return check_defect_transport(self.model, self.flow(), self.points()[:SUBGRID_POINTS],
                                      self._times(DEFECT_TIMES))

    # -- output --------------------------------------------------------------

    def to_document(self):
        """Report document written by ``write_reports``."""
        return {
            'model': self.model.to_dict(),
            'precision_bits': self.precision.bits,
            'reports': [r.to_dict() for r in self.reports],
            'passed': self.passed,
        }

    def write_reports(self, out=None, csv=None):
        """JSON document at ``out``; per-check CSV files next to it when ``csv``."""
        out = Path(out or self.config.out)
        csv = self.config.csv if csv is None else csv
        atomic_write_text(out, json.dumps(self.to_document(), indent=2, sort_keys=True) + '\n')
        written = [out]
        if csv:
            for report in self.reports:
                path = out.with_name(f"{out.stem}_{report.check_name}.csv")
                write_frame_csv(report.to_frame(), path)
                written.append(path)
        return written

    def reports_frame(self):
        """One summary row per suite."""
        rows = [{
            'check_name': r.check_name,
            'points_evaluated': r.points_evaluated,
            'max_residual': format_residual(r.max_residual),
            'tolerance_used': format_residual(r.tolerance_used),
            'criterion': r.criterion,
            'pass': r.passed,
        } for r in self.reports]
        return pd.DataFrame(rows, columns=['check_name', 'points_evaluated', 'max_residual',
                                           'tolerance_used', 'criterion', 'pass'])

    def display_summary(self):
        """Print the suite summary table."""
        if not self.reports:
            print("\n❌ No suites were run.")
            return

        passed = sum(r.passed for r in self.reports)
        total = len(self.reports)

        print("\n" + "=" * 70)
        print("📊 CHECK SUMMARY")
        print("=" * 70)
        print(f"Precision: {self.precision.bits} bits")
        print(f"Suites Passed: {passed}/{total}")
        print("")
        for r in self.reports:
            marker = "✅" if r.passed else "❌"
            print(f"  {marker} {r.check_name:<14} max={format_residual(r.max_residual):>14}  "
                  f"tol={format_residual(r.tolerance_used):>12}  n={r.points_evaluated}")
            for sub in r.sub_reports:
                sub_marker = "✅" if sub.passed else "❌"
                print(f"      {sub_marker} {sub.check_name:<30} max={format_residual(sub.max_residual)}")
        print("=" * 70)
