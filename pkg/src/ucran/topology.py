"""Network geometry, large-scale fading and user-centric cluster formation.

Every source of randomness draws from ``numpy.random.default_rng((seed, TAG))``
where TAG is one of the stream constants below.  The campaign harness derives
trial seeds as ``master_seed + trial_index``, so two algorithms evaluated at
the same trial seed see identical RRH/user placements, shadowing and fading.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Per-trial random sub-streams.  Baseline randomness gets its own stream so
# that random user removal (Con) or random user sampling (Ortho) never
# perturbs the physical realization shared by all algorithms.
STREAM_PLACEMENT = 0
STREAM_SHADOWING = 1
STREAM_FADING = 2
STREAM_BASELINE = 3


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    """Generator for one of a trial's independent randomness sub-streams."""
    return np.random.default_rng((int(seed), int(stream)))


@dataclass(frozen=True)
class SimConfig:
    """All scenario parameters, in SI-ish units (meters, milliwatts, dB).

    Defaults describe a 700 m x 700 m area with 36 RRHs and 24 users, per-RRH
    power cap of 100 mW, 200 mW pilots, a reuse cap of 4 per pilot, mmWave
    fronthaul links limited to 3 users each, and a 4 bit/s/Hz rate target.
    Path loss follows 128.1 + 37.6 log10(d_km) dB with 8 dB log-normal
    shadowing; noise power defaults to -104 dBm.
    """

    area_side: float = 700.0
    num_rrhs: int = 36
    num_users: int = 24
    cluster_size: int = 4
    antennas_per_rrh: int = 2
    pilot_count: int = 4
    reuse_cap: int = 4
    rrh_power_cap: float = 100.0      # mW
    pilot_power: float = 200.0        # mW
    noise_power: float = 10.0 ** -10.4  # mW  (-104 dBm)
    rate_req: float = 4.0             # bit/s/Hz
    fronthaul_cap: int = 3            # users per fronthaul link
    pathloss_exponent: float = 37.6   # dB per decade of distance
    pathloss_intercept: float = 128.1  # dB at 1 km
    shadowing_stddev: float = 8.0     # dB
    min_distance: float = 1.0         # m, clamp below this
    cluster_by_gain: bool = False     # rank candidate RRHs by gain instead of distance
    master_seed: int = 1

    def __post_init__(self):
        counts = {
            "num_rrhs": self.num_rrhs,
            "num_users": self.num_users,
            "cluster_size": self.cluster_size,
            "antennas_per_rrh": self.antennas_per_rrh,
            "pilot_count": self.pilot_count,
            "reuse_cap": self.reuse_cap,
            "fronthaul_cap": self.fronthaul_cap,
        }
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {value!r}")
        if self.cluster_size > self.num_rrhs:
            raise ValueError("cluster_size cannot exceed num_rrhs")
        for name in ("rrh_power_cap", "pilot_power", "noise_power"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("area_side", "min_distance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.shadowing_stddev < 0:
            raise ValueError("shadowing_stddev must be >= 0")
        if self.rate_req < 0:
            raise ValueError("rate_req must be >= 0")


@dataclass(frozen=True)
class NetworkInstance:
    """One realization of the network.  Treated as immutable once built.

    ``alpha[i, k]`` is the linear large-scale power gain from RRH i to user k,
    ``clusters[k]`` the candidate serving set (nearest RRHs first).  Both are
    None straight after placement and get filled in by :func:`build_network`.
    """

    rrh_positions: np.ndarray            # (I, 2) m
    user_positions: np.ndarray           # (K, 2) m
    alpha: np.ndarray | None = None      # (I, K) linear gain
    clusters: np.ndarray | None = None   # (K, L) RRH indices

    @property
    def num_rrhs(self) -> int:
        return self.rrh_positions.shape[0]

    @property
    def num_users(self) -> int:
        return self.user_positions.shape[0]


def generate_topology(config: SimConfig, seed: int) -> NetworkInstance:
    """Drop RRHs and users i.i.d. uniformly over the square service area."""
    rng = stream_rng(seed, STREAM_PLACEMENT)
    rrh = rng.uniform(0.0, config.area_side, size=(config.num_rrhs, 2))
    users = rng.uniform(0.0, config.area_side, size=(config.num_users, 2))
    return NetworkInstance(rrh_positions=rrh, user_positions=users)


def pairwise_distances(rrh_positions: np.ndarray, user_positions: np.ndarray) -> np.ndarray:
    """Euclidean RRH-to-user distance matrix, shape (I, K)."""
    diff = rrh_positions[:, None, :] - user_positions[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def compute_large_scale(
    rrh_positions: np.ndarray,
    user_positions: np.ndarray,
    config: SimConfig,
    seed: int,
) -> np.ndarray:
    """Linear power gains: path loss over clamped distance plus shadowing.

    PL(d) = intercept + exponent * log10(d / 1000) in dB, d clamped below
    ``min_distance``; shadowing is i.i.d. log-normal with the configured dB
    standard deviation.
    """
    dist = pairwise_distances(rrh_positions, user_positions)
    dist = np.maximum(dist, config.min_distance)
    pl_db = config.pathloss_intercept + config.pathloss_exponent * np.log10(dist / 1000.0)
    rng = stream_rng(seed, STREAM_SHADOWING)
    shadow_db = config.shadowing_stddev * rng.standard_normal(dist.shape)
    return 10.0 ** ((-pl_db + shadow_db) / 10.0)


def build_clusters(instance: NetworkInstance, cluster_size: int, by_gain: bool = False) -> np.ndarray:
    """Candidate serving sets: the nearest ``cluster_size`` RRHs per user.

    Ordered nearest first; distance ties break toward the lower RRH index.
    With ``by_gain`` the ranking uses large-scale gain (descending) instead.
    """
    num_rrhs = instance.num_rrhs
    if cluster_size > num_rrhs:
        raise ValueError("cluster_size cannot exceed the number of RRHs")
    if by_gain:
        if instance.alpha is None:
            raise ValueError("gain-based clustering requires alpha")
        key = -instance.alpha
    else:
        key = pairwise_distances(instance.rrh_positions, instance.user_positions)
    rrh_ids = np.arange(num_rrhs)
    clusters = np.empty((instance.num_users, cluster_size), dtype=np.int64)
    for k in range(instance.num_users):
        order = np.lexsort((rrh_ids, key[:, k]))
        clusters[k] = order[:cluster_size]
    return clusters


def build_network(config: SimConfig, seed: int) -> NetworkInstance:
    """Placement, large-scale gains and clusters for one trial seed."""
    inst = generate_topology(config, seed)
    alpha = compute_large_scale(inst.rrh_positions, inst.user_positions, config, seed)
    inst = dataclasses.replace(inst, alpha=alpha)
    clusters = build_clusters(inst, config.cluster_size, by_gain=config.cluster_by_gain)
    return dataclasses.replace(inst, clusters=clusters)


# --- plain-text config files -------------------------------------------------

_BOOL_STRINGS = {"true": True, "false": False, "1": True, "0": False,
                 "yes": True, "no": False}


def _coerce(name: str, text: str, target_type) -> object:
    if target_type is bool:
        try:
            return _BOOL_STRINGS[text.strip().lower()]
        except KeyError:
            raise ValueError(f"config key {name!r}: cannot parse boolean from {text!r}")
    if target_type is int:
        return int(text)
    if target_type is float:
        return float(text)
    return text


def load_config_file(path: str | Path) -> dict:
    """Parse a ``key = value`` config file into a dict of SimConfig fields.

    Blank lines and ``#`` comments are ignored.  Unknown keys are an error so
    typos do not silently fall back to defaults.
    """
    fields = {f.name: f.type for f in dataclasses.fields(SimConfig)}
    # Field annotations are strings under `from __future__ import annotations`.
    type_map = {"float": float, "int": int, "bool": bool, "str": str}
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in fields:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        annotation = fields[key] if isinstance(fields[key], str) else fields[key].__name__
        values[key] = _coerce(key, text.strip(), type_map[annotation])
    return values


def make_config(config_file: str | Path | None = None, **overrides) -> SimConfig:
    """SimConfig from an optional file plus keyword overrides (overrides win)."""
    values: dict[str, object] = {}
    if config_file is not None:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(**values)
