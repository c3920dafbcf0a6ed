"""Run configuration: YAML tree with embedded defaults, validation, hashing.

A run is described by one human-editable YAML mapping; every key has a
default so an empty file (or none) is a valid config.  The resolved
tree is hashed (sha256 of canonical JSON, first 12 hex digits) and the
hash is stamped on every CSV row a run emits, so outputs are traceable
to the exact configuration that produced them.
"""

import hashlib
import json
from copy import deepcopy

import yaml

__all__ = ["ConfigError", "default_config", "load_config", "config_hash"]


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


ONE_CHANNEL_DEFAULTS = {
    "kind": "one_channel_exp_well",
    "gamma": 1.5,
    "n_basis": 2,  # bound radial functions; highest index n_l = n_basis + 1
    "mu": 1.0,
    "r_max": 40.0,
    "panels": 64,
    "order": 16,
}

# physics-scan settings need a large orthogonalized basis to converge
# (see README); the published-size 12-primitive layout is kept by the
# fidelity defaults below instead
SJ_DEFAULTS = {
    "kind": "secrest_johnson",
    "gamma": 1.5,
    "n_basis": 60,
    "mu": 0.6667,
    "r_max": 100.0,
    "panels": 160,
    "order": 16,
    "n_channels": 8,
    "a": 10.0,
    "alpha": 0.3,
    "beta": 2.0,
    "m": 1.0,
}

# the Table-1-style SJ layout: 4 channels x 3 bound functions = 12
# primitives, orthogonalized to an 8x8 block
SJ_COMPACT = {
    "gamma": 0.5,
    "n_basis": 3,
    "n_channels": 4,
    "r_max": 60.0,
    "panels": 64,
}

DEFAULTS = {
    "problem": dict(ONE_CHANNEL_DEFAULTS),
    "scan": {
        "start": 0.1,
        "stop": 2.0,
        "count": 20,
        "convention": "wavenumber",  # 1-d only: wavenumber | total_energy
    },
    "inverter": "classical",
    "vqls": {
        "depth": 3,
        "restarts": 8,
        "maxiter": 2000,
        "target": 1e-6,
        "polish_rounds": 6,
        "drop_tol": 1e-12,
    },
    "ortho": {
        "cutoff": 0.1,
        "target_n_q": None,
    },
    "cc": {
        "r_min": 0.0,
        "r_max": None,  # per-problem default when null
        "n_steps": None,
        "n_channels": None,
        "wall": 1e10,
    },
    "convergence": {
        # capped at 8 functions: beyond that the primitive overlap is so
        # ill-conditioned that the classical inverse-quality gate trips
        "n_basis_values": [2, 3, 4, 6, 8],
        "gamma_values": [1.0, 1.5, 2.0],
        "k": 0.55,
    },
    "fidelity": {
        "depths": [1, 3],
        "energy": None,  # per-kind default: 0.55 (1-d), 3.8 (SJ)
    },
    "scaling": {
        "pairs": ["ethylene", "benzene", "naphthalene"],
    },
    "seed": 1234,
    "jobs": 1,
    "plots": True,
}


def _deep_merge(base: dict, override: dict, path: str = "") -> dict:
    out = deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {where}")
        if isinstance(base[key], dict) and isinstance(value, dict):
            out[key] = _deep_merge(base[key], value, where)
        else:
            out[key] = deepcopy(value)
    return out


def default_config(kind: str = "one_channel_exp_well") -> dict:
    cfg = deepcopy(DEFAULTS)
    if kind == "secrest_johnson":
        cfg["problem"] = dict(SJ_DEFAULTS)
        cfg["scan"] = {
            "start": 3.4,
            "stop": 4.9,
            "count": 11,
            "convention": "total_energy",
        }
        cfg["ortho"] = {"cutoff": 1e-12, "target_n_q": None}
        # 8-channel CC truncation still moves S by ~6e-3 here; 12 is
        # converged well below the scan tolerances
        cfg["cc"]["n_channels"] = 12
    elif kind != "one_channel_exp_well":
        raise ConfigError(f"unknown problem kind {kind!r}")
    return cfg


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Resolve path (YAML) + CLI overrides against the embedded defaults."""
    user: dict = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a YAML mapping")
        user = loaded
    kind = (
        user.get("problem", {}).get("kind")
        or DEFAULTS["problem"]["kind"]
    )
    cfg = default_config(kind)
    try:
        cfg = _deep_merge(cfg, user)
    except ConfigError:
        raise
    if overrides:
        cfg = _deep_merge(cfg, overrides)
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    prob = cfg["problem"]
    if prob["kind"] not in ("one_channel_exp_well", "secrest_johnson"):
        raise ConfigError(f"unknown problem kind {prob['kind']!r}")
    if prob["gamma"] <= 0:
        raise ConfigError("problem.gamma must be positive")
    if prob["n_basis"] < 1:
        raise ConfigError("problem.n_basis must be at least 1")
    scan = cfg["scan"]
    if scan["count"] < 1:
        raise ConfigError("scan.count must be positive (energy grid nonempty)")
    if scan["start"] <= 0 or scan["stop"] < scan["start"]:
        raise ConfigError("scan energy window must be positive and ordered")
    if scan["convention"] not in ("wavenumber", "total_energy"):
        raise ConfigError("scan.convention must be wavenumber or total_energy")
    if cfg["inverter"] not in ("classical", "vqls"):
        raise ConfigError("inverter must be classical or vqls")
    if cfg["vqls"]["depth"] < 1:
        raise ConfigError("vqls.depth must be at least 1")
    if cfg["seed"] is not None and not isinstance(cfg["seed"], int):
        raise ConfigError("seed must be an integer or null")
    jobs = cfg["jobs"]
    if not isinstance(jobs, int) or jobs < 1:
        raise ConfigError("jobs must be a positive integer")
    ortho = cfg["ortho"]
    if ortho["cutoff"] is not None and ortho["cutoff"] <= 0:
        raise ConfigError("ortho.cutoff must be positive")


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
