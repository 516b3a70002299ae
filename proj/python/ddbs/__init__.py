"""Distance-dependent beam-split training simulator."""

import json as _json

from . import _ddbs
from ._ddbs import InfeasibleFocus, __version__, fresnel_amplitude

__all__ = [
    "InfeasibleFocus",
    "__version__",
    "angle_beamwidth",
    "coverage_fraction",
    "delays",
    "delays_csv",
    "design",
    "distance_beamwidth",
    "fresnel_amplitude",
    "gain_kernel",
    "pattern_csv",
    "preset",
    "roundtrip_pattern_csv",
    "sweep",
    "train",
]


def _dump(doc):
    return doc if isinstance(doc, str) else _json.dumps(doc)


def preset(name="desk"):
    """Experiment spec preset ("desk" or "full") as a dict."""
    return _json.loads(_ddbs.preset_json(name))


def design(inputs):
    """Design a pilot plan; returns (plan dict including its cfg, summary text)."""
    plan, summary = _ddbs.design_json(_dump(inputs))
    return _json.loads(plan), summary


def delays(plan):
    """(N_t x K delay matrix in seconds, selection bits) of the fixed TD network."""
    return _ddbs.delays(_dump(plan))


def delays_csv(plan):
    return _ddbs.delays_csv(_dump(plan))


def pattern_csv(plan):
    return _ddbs.pattern_csv(_dump(plan))


def roundtrip_pattern_csv(text):
    return _ddbs.roundtrip_pattern_csv(text)


def coverage_fraction(plan, n_theta=200, n_alpha=50):
    return _ddbs.coverage_fraction(_dump(plan), n_theta, n_alpha)


def train(scheme, theta, r, snr_db=15.0, spec=None, trial=0):
    """One training trial for a user at (theta, r); returns the estimate with its rate."""
    return _json.loads(_ddbs.train_json("" if spec is None else _dump(spec), scheme, theta, r, snr_db, trial))


def sweep(spec=None):
    """Monte Carlo sweep; returns (CSV text, summary dict)."""
    csv, summary = _ddbs.sweep_json("" if spec is None else _dump(spec))
    return csv, _json.loads(summary)


def gain_kernel(cfg, x, y):
    return _ddbs.gain_kernel(_dump(cfg), x, y)


def angle_beamwidth(cfg, freq):
    return _ddbs.angle_beamwidth(_dump(cfg), freq)


def distance_beamwidth(cfg, freq):
    return _ddbs.distance_beamwidth(_dump(cfg), freq)
