"""Experiment configuration: INI-style files, CLI overrides, provenance hash.

A config file has sections [experiment], [spectrum], [measurement], [noise],
[sweep], [solvers], [cooperative], [prediction]; every key has a default, so
minimal files stay short. Unknown keys are rejected to catch typos early.
"""

import configparser
import hashlib
from dataclasses import asdict, dataclass, field

EXPERIMENT_KINDS = (
    "nmse_vs_snr",
    "error_gain_vs_m",
    "miss_detect_cdf",
    "timing_table",
    "coherence_study",
    "cooperative_round",
)

KNOWN_SOLVERS = ("lasso", "wlasso", "wlasso_scaled", "bp", "omp", "cosamp", "assamp")

_DEFAULT_SWEEPS = {
    "nmse_vs_snr": ("0", "5", "10", "15", "20"),
    "error_gain_vs_m": ("15", "20", "25", "30", "35", "40", "45"),
    "coherence_study": ("gaussian", "bernoulli", "circulant"),
    "timing_table": ("timing",),
    "miss_detect_cdf": ("drift",),
    "cooperative_round": ("round",),
}


class ConfigError(ValueError):
    """Raised for unreadable, unknown, or inconsistent configuration input."""


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment, seeded end to end."""

    kind: str = "nmse_vs_snr"
    trials: int = 200
    master_seed: int = 20260808
    out_dir: str = "results"
    # spectrum
    n: int = 100
    block_sizes: tuple = (25, 25, 25, 25)
    block_probs: tuple = (0.6, 0.04, 0.02, 0.02)
    amplitude: str = "rayleigh"
    # measurement
    matrix_kind: str = "gaussian"
    m: int = 27
    # noise
    snr_db: float = 7.0
    # sweep
    sweep: tuple = ()
    # solvers
    solvers: tuple = ("lasso", "wlasso", "omp", "cosamp", "assamp")
    eps_delta: float = 0.1
    max_iter: int = 5000
    tol: float = 1e-6
    omp_k_max: int = 0  # 0 = derive from expected total sparsity
    cosamp_k: int = 0
    assamp_step: int = 0
    energy_threshold: float = 0.25
    # cooperative
    su_count: int = 5
    su_branches: int = 4
    su_scans: int = 2
    shadow_su: int = 0
    shadow_band: int = 0
    shadow_db: float = 20.0
    fusion_mode: str = "vote"
    quorum: float = 0.5
    # prediction
    lag: int = 5
    m_rule_c: float = 2.0
    drift_probs_end: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"unknown experiment kind {self.kind!r}; expected one of {EXPERIMENT_KINDS}"
            )
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.sweep:
            self.sweep = _DEFAULT_SWEEPS[self.kind]
        if not self.sweep:
            raise ConfigError("sweep values must be non-empty")
        unknown = [s for s in self.solvers if s not in KNOWN_SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solvers {unknown}; expected among {KNOWN_SOLVERS}")
        if not self.solvers:
            raise ConfigError("solver list must be non-empty")
        if len(self.block_sizes) != len(self.block_probs):
            raise ConfigError("block_sizes and block_probs must have equal length")
        if sum(self.block_sizes) != self.n:
            raise ConfigError(
                f"block_sizes sum to {sum(self.block_sizes)}, expected n={self.n}"
            )
        if self.fusion_mode not in ("vote", "pool"):
            raise ConfigError(f"fusion_mode must be 'vote' or 'pool', got {self.fusion_mode!r}")
        if self.drift_probs_end and len(self.drift_probs_end) != len(self.block_sizes):
            raise ConfigError("drift_probs_end must match the number of blocks")


_SECTION_FIELDS = {
    "experiment": ("kind", "trials", "master_seed", "out_dir"),
    "spectrum": ("n", "block_sizes", "block_probs", "amplitude"),
    "measurement": ("matrix_kind", "m"),
    "noise": ("snr_db",),
    "sweep": ("values",),
    "solvers": (
        "names",
        "eps_delta",
        "max_iter",
        "tol",
        "omp_k_max",
        "cosamp_k",
        "assamp_step",
        "energy_threshold",
    ),
    "cooperative": (
        "su_count",
        "su_branches",
        "su_scans",
        "shadow_su",
        "shadow_band",
        "shadow_db",
        "fusion_mode",
        "quorum",
    ),
    "prediction": ("lag", "m_rule_c", "drift_probs_end"),
}

_KEY_ALIASES = {"values": "sweep", "names": "solvers"}


_INT_KEYS = {
    "trials", "master_seed", "n", "m", "max_iter", "omp_k_max", "cosamp_k",
    "assamp_step", "su_count", "su_branches", "su_scans", "shadow_su",
    "shadow_band", "lag",
}
_FLOAT_KEYS = {
    "snr_db", "eps_delta", "tol", "energy_threshold", "shadow_db", "quorum",
    "m_rule_c",
}


def _coerce(name: str, raw: str):
    raw = raw.strip()
    if name in ("sweep", "solvers"):
        return tuple(tok.strip() for tok in raw.split(",") if tok.strip())
    if name == "block_sizes":
        return tuple(int(tok) for tok in raw.split(",") if tok.strip())
    if name in ("block_probs", "drift_probs_end"):
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    if name in _INT_KEYS:
        return int(raw)
    if name in _FLOAT_KEYS:
        return float(raw)
    return raw


def parse_config(path) -> ExperimentConfig:
    """Read a config file, filling unspecified keys from the defaults."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    values = {}
    for section in parser.sections():
        if section not in _SECTION_FIELDS:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SECTION_FIELDS[section]
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            name = _KEY_ALIASES.get(key, key)
            try:
                values[name] = _coerce(name, raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key}: {exc}") from exc
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def apply_overrides(cfg: ExperimentConfig, seed=None, out=None, solvers=None, trials=None):
    """Apply CLI flag overrides on top of a parsed config."""
    if seed is not None:
        cfg.master_seed = int(seed)
    if out is not None:
        cfg.out_dir = str(out)
    if solvers is not None:
        chosen = tuple(tok.strip() for tok in str(solvers).split(",") if tok.strip())
        unknown = [s for s in chosen if s not in KNOWN_SOLVERS]
        if unknown:
            raise ConfigError(f"unknown solvers {unknown}")
        if not chosen:
            raise ConfigError("solver override must name at least one solver")
        cfg.solvers = chosen
    if trials is not None:
        if int(trials) < 1:
            raise ConfigError("trials override must be >= 1")
        cfg.trials = int(trials)
    return cfg


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable short hash over every effective config field."""
    canon = "\n".join(f"{k}={v!r}" for k, v in sorted(asdict(cfg).items()))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_config_echo(cfg: ExperimentConfig, path):
    """Write the effective configuration back out as an INI file."""
    parser = configparser.ConfigParser()
    for section, keys in _SECTION_FIELDS.items():
        parser[section] = {}
        for key in keys:
            name = _KEY_ALIASES.get(key, key)
            val = getattr(cfg, name)
            if isinstance(val, tuple):
                val = ", ".join(str(v) for v in val)
            parser[section][key] = str(val)
    with open(path, "w") as fh:
        fh.write(f"# config_hash={config_hash(cfg)}\n")
        parser.write(fh)
