"""
Run configuration and file formats.

Loop file (JSON)::

    {"N": 512, "samples": [[x, y, z], ...]}

Phase-state file (JSON)::

    {"positions": [[x, y, z], ...], "velocities": [[vx, vy, vz], ...]}

Trajectory file (CSV), rows grouped by time then body::

    t,body,x,y,z,vx,vy,vz

Every file is written to a temporary sibling and renamed into place, so a
failed command never leaves a partial file behind.
"""

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .choreography import BodySystem, DiscreteLoop
from .integrator import PhaseState
from .minimizer import MinimizeOptions


class ConfigError(ValueError):
    pass


def _fmt(x, digits=17):
    return format(float(x), f".{digits}g")


def atomic_write(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def loop_to_json(loop):
    rows = ",\n    ".join("[" + ", ".join(_fmt(c) for c in p) + "]" for p in loop.samples)
    return f'{{\n  "N": {loop.N},\n  "samples": [\n    {rows}\n  ]\n}}\n'


def write_loop(path, loop):
    atomic_write(path, loop_to_json(loop))


def read_loop(path):
    """Parse a loop file; raises ConfigError on malformed content or off-sphere samples."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read loop file {path}: {err}") from err
    if not isinstance(doc, dict) or set(doc) != {"N", "samples"}:
        raise ConfigError(f"loop file {path} must have exactly the keys 'N' and 'samples'")
    samples = np.asarray(doc["samples"], dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3 or samples.shape[0] != doc["N"]:
        raise ConfigError(f"loop file {path}: expected {doc['N']} samples of 3 coordinates, got {samples.shape}")
    try:
        return DiscreteLoop(samples)
    except ValueError as err:
        raise ConfigError(f"loop file {path}: {err}") from err


def write_state(path, state):
    doc = {"positions": state.positions.tolist(), "velocities": state.velocities.tolist()}
    atomic_write(path, json.dumps(doc, indent=2) + "\n")


def read_state(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
        if set(doc) != {"positions", "velocities"}:
            raise ConfigError("state file must have exactly the keys 'positions' and 'velocities'")
        return PhaseState(np.asarray(doc["positions"], dtype=float), np.asarray(doc["velocities"], dtype=float))
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"cannot read state file {path}: {err}") from err


def trajectory_to_csv(traj):
    lines = ["t,body,x,y,z,vx,vy,vz"]
    for t, qs, vs in zip(traj.times, traj.positions, traj.velocities):
        tt = _fmt(t, 12)
        for b, (q, v) in enumerate(zip(qs, vs)):
            lines.append(",".join([tt, str(b)] + [_fmt(c) for c in q] + [_fmt(c) for c in v]))
    return "\n".join(lines) + "\n"


def write_trajectory(path, traj):
    atomic_write(path, trajectory_to_csv(traj))


def write_report(path, report):
    atomic_write(path, json.dumps(report, indent=2) + "\n")


@dataclass
class IntegratorConfig:
    T: float = 1.0
    h: float = 1e-4


@dataclass
class Tolerances:
    el_residual: float = 1e-3
    symmetry: float = 1e-10
    closure: float = 1e-4


@dataclass
class Outputs:
    loop: str = None
    report: str = None
    trajectory: str = None


@dataclass
class RunConfig:
    n: int = 3
    masses: list = None
    N: int = 512
    loop: str = "test-loop"
    state: str = None
    minimizer: dict = field(default_factory=dict)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    outputs: Outputs = field(default_factory=Outputs)

    @property
    def system(self):
        return BodySystem(self.n, self.masses)

    @property
    def minimize_options(self):
        return MinimizeOptions(N=self.N, **self.minimizer)

    def validate(self):
        try:
            self.system
            self.minimize_options
        except (TypeError, ValueError) as err:
            raise ConfigError(str(err)) from err
        if int(self.N) != self.N or self.N < max(8 * self.n, 8):
            raise ConfigError(f"N must be an integer of at least 8 per body, got {self.N}")
        if not (self.integrator.T > 0 and self.integrator.h > 0):
            raise ConfigError("integrator T and h must be positive")
        return self


def _strict(cls, doc, where):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    return cls(**doc)


def parse_config(doc):
    """Build a RunConfig from a decoded JSON document, rejecting unknown keys."""
    doc = dict(doc)
    sub = {"integrator": IntegratorConfig, "tolerances": Tolerances, "outputs": Outputs}
    for key, cls in sub.items():
        if key in doc:
            doc[key] = _strict(cls, doc[key], key)
    if "minimizer" in doc:
        allowed = {f.name for f in fields(MinimizeOptions)} - {"N"}
        if not isinstance(doc["minimizer"], dict):
            raise ConfigError("minimizer must be a JSON object")
        unknown = set(doc["minimizer"]) - allowed
        if unknown:
            raise ConfigError(f"unknown key(s) in minimizer: {', '.join(sorted(unknown))}")
    return _strict(RunConfig, doc, "config").validate()


def load_config(path):
    if path is None:
        return RunConfig().validate()
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_config(doc)


def config_to_dict(cfg):
    return asdict(cfg)
