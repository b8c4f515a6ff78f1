"""Python front end for the closed-loop energy optimization simulator.

The heavy lifting lives in the C++ extension; this wrapper speaks plain
dicts instead of JSON strings.
"""

import json

from . import _core

__all__ = [
    "Simulator",
    "default_config",
    "discretize_period",
    "discretize_deadline",
]


def default_config():
    """The built-in run configuration as a dict."""
    return json.loads(_core.default_config())


def discretize_period(period_s, tau_s):
    """Model period expressed in base periods."""
    return _core.discretize_period(period_s, tau_s)


def discretize_deadline(time_s, tau_s):
    """Largest whole number of base periods that fits in the deadline."""
    return _core.discretize_deadline(time_s, tau_s)


class Simulator:
    """Holds one configuration and its deadline table.

    Building the table dominates startup, so construct once and reuse for
    every seed.
    """

    def __init__(self, config=None):
        payload = "" if config is None else json.dumps(config)
        self._sim = _core.Simulator(payload)

    @property
    def config(self):
        return json.loads(self._sim.config())

    def run_episode(self, seed):
        """One closed-loop episode; returns the summary dict."""
        return json.loads(self._sim.run_episode(seed))

    def run_batch(self):
        """All configured seeds; returns per-episode summaries plus the
        aggregate over completed episodes."""
        return json.loads(self._sim.run_batch())
