"""
Utility Functions Module
Contains helpers for config loading, validation, number formatting and atomic file output.
"""

import json
import logging
import os
import tempfile
from pathlib import Path

import mpmath as mp
import pandas as pd

from errors import ConfigError

logger = logging.getLogger(__name__)


def load_json_config(path):
    """
    Read a JSON config file.

    Args:
        path: Path to the file

    Returns:
        dict: Parsed document

    Raises:
        ConfigError: if the file is missing or is not valid JSON
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open(encoding='utf-8') as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}")
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    logger.debug("Loaded config %s", path)
    return doc


def validate_model_config(config, required_keys=('alpha', 'a')):
    """Validate a model definition before it is built."""
    if not config:
        return False, "Model config is empty"

    if config.get('kind') == 'radial':
        terms = config.get('Q', {}).get('poly', [])
        bad = [term for term in terms if not (isinstance(term, list) and len(term) == 3)]
        if bad:
            return False, f"Q.poly entries must be [i, j, c]: {bad}"
        return True, "Model validation passed"

    missing_keys = [key for key in required_keys if key not in config]
    if missing_keys:
        return False, f"Missing keys: {missing_keys}"

    if not isinstance(config['a'], list) or not config['a']:
        return False, "Series 'a' must be a nonempty list of [re, im] pairs"

    try:
        mp.mpf(str(config['alpha']))
        for key in ('eps0', 'delta0'):
            if key in config and mp.mpf(str(config[key])) <= 0:
                return False, f"{key} must be positive"
    except (TypeError, ValueError) as e:
        return False, f"Unparseable number: {e}"

    return True, "Model validation passed"


def parse_times(text):
    """Parse 'start:stop:step' (stop inclusive) or a comma-separated list into mpf values."""
    text = text.strip()
    try:
        if ':' in text:
            start, stop, step = (mp.mpf(part) for part in text.split(':'))
            if step <= 0 or stop < start:
                raise ValueError("need step > 0 and stop >= start")
            count = int(mp.nint((stop - start) / step))
            return [start + k * step for k in range(count + 1)]
        return [mp.mpf(part) for part in text.split(',') if part.strip()]
    except ValueError as e:
        raise ConfigError(f"bad times specification {text!r}: {e}")


def parse_pair(text, what="pair"):
    """Parse 'a,b' into two mpf values."""
    parts = [part for part in text.split(',') if part.strip()]
    if len(parts) != 2:
        raise ConfigError(f"{what} needs two comma-separated numbers, got {text!r}")
    try:
        return mp.mpf(parts[0]), mp.mpf(parts[1])
    except ValueError as e:
        raise ConfigError(f"bad {what} {text!r}: {e}")


def parse_complex(text, what="complex number"):
    """Parse '0.05+0.02i' (or with j) at the current working precision."""
    try:
        return mp.mpc(mp.mpmathify(text.replace(' ', '').replace('i', 'j')))
    except (AttributeError, TypeError, ValueError) as e:
        raise ConfigError(f"bad {what} {text!r}: {e}")


def format_residual(value, digits=6):
    """Format a multiprecision residual for display."""
    return mp.nstr(value, digits) if isinstance(value, (mp.mpf, mp.mpc)) else str(value)


def atomic_write_text(path, text):
    """Write text via a temporary file in the target directory and os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("Wrote %s", path)


def write_frame_csv(frame, path):
    """Write a DataFrame as CSV atomically."""
    atomic_write_text(path, frame.to_csv(index=False))


def points_frame(points, digits=30):
    """SurfacePoints as columns re_z1, im_z1, re_z2, im_z2, rho_residual."""
    rows = [{
        're_z1': mp.nstr(mp.re(p.z1), digits),
        'im_z1': mp.nstr(mp.im(p.z1), digits),
        're_z2': mp.nstr(mp.re(p.z2), digits),
        'im_z2': mp.nstr(mp.im(p.z2), digits),
        'rho_residual': mp.nstr(abs(p.rho), 6),
    } for p in points]
    return pd.DataFrame(rows, columns=['re_z1', 'im_z1', 're_z2', 'im_z2', 'rho_residual'])


def trace_frame(rows, digits=30):
    """flow_trace rows as columns t, re_z1, im_z1, re_z2, im_z2, rho_residual."""
    records = [{
        't': mp.nstr(row['t'], digits),
        're_z1': mp.nstr(mp.re(row['z1']), digits),
        'im_z1': mp.nstr(mp.im(row['z1']), digits),
        're_z2': mp.nstr(mp.re(row['z2']), digits),
        'im_z2': mp.nstr(mp.im(row['z2']), digits),
        'rho_residual': mp.nstr(row['rho_residual'], 6),
    } for row in rows]
    return pd.DataFrame(records, columns=['t', 're_z1', 'im_z1', 're_z2', 'im_z2', 'rho_residual'])
