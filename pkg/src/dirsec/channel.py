"""Monte-Carlo channel generation: geometry, path loss, fading, CSI error.

Every link family is distance-attenuated Rayleigh fading: entry =
sqrt(linear path-loss gain) * CN(0, 1), drawn independently per
subcarrier (no frequency correlation is imposed; the narrowband-flat
per-subcarrier model gives no tap-delay profile to correlate with).

Randomness is counter-based (Philox) and keyed: every (purpose, key...)
pair gets its own independent stream derived from one master seed, so
results do not depend on execution order of the surrounding sweep.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .secrecy import CHANNEL_FAMILIES, ChannelSet, SystemConfig

_DUMP_HEADER = "# dirsec-channelset v1"


@dataclass(frozen=True)
class SceneGeometry:
    """Node positions (meters, 2-D) and the path-loss law parameters.

    Defaults are the reference deployment: Alice at the origin, IRS 1
    above her, IRS 2 down-range above the Bob/Eve axis.  ``zeta_*`` are
    the per-link path-loss exponents; the inter-IRS hop is nearly
    line-of-sight (1.1) while the unassisted Alice/Eve-side links decay
    fastest (3.0).
    """

    pos_alice: tuple = (0.0, 0.0)
    pos_irs1: tuple = (10.0, 10.0)
    pos_irs2: tuple = (50.0, 10.0)
    pos_bob: tuple = (60.0, 0.0)
    pos_eve: tuple = (40.0, 0.0)
    pl0_db: float = -30.0
    d0_m: float = 1.0
    zeta_a_i1: float = 2.5
    zeta_a_i2: float = 3.0
    zeta_i1_b: float = 3.0
    zeta_i1_e: float = 3.0
    zeta_i2_b: float = 2.5
    zeta_i2_e: float = 2.5
    zeta_i1_i2: float = 1.1

    def __post_init__(self):
        for name in ("zeta_a_i1", "zeta_a_i2", "zeta_i1_b", "zeta_i1_e",
                     "zeta_i2_b", "zeta_i2_e", "zeta_i1_i2"):
            if not float(getattr(self, name)) > 0.0:
                raise ValueError(f"{name} must be positive")
        if not self.d0_m > 0.0:
            raise ValueError("d0_m must be positive")

    def distance(self, a: str, b: str) -> float:
        pa = np.asarray(getattr(self, f"pos_{a}"), dtype=float)
        pb = np.asarray(getattr(self, f"pos_{b}"), dtype=float)
        return float(np.linalg.norm(pa - pb))


@dataclass(frozen=True)
class CeeConfig:
    """Channel-estimation error level, as NMSE delta = E|E|^2 / E|H|^2."""

    delta: float = 0.0

    def __post_init__(self):
        if self.delta < 0.0:
            raise ValueError("delta must be >= 0")


# (transmitter, receiver, exponent attribute) per channel family
_LINKS = {
    "g_a_i1": ("alice", "irs1", "zeta_a_i1"),
    "g_a_i2": ("alice", "irs2", "zeta_a_i2"),
    "g_i1_b": ("irs1", "bob", "zeta_i1_b"),
    "g_i1_e": ("irs1", "eve", "zeta_i1_e"),
    "g_i2_b": ("irs2", "bob", "zeta_i2_b"),
    "g_i2_e": ("irs2", "eve", "zeta_i2_e"),
    "g_i1_i2": ("irs1", "irs2", "zeta_i1_i2"),
}


def path_loss_linear(d: float, zeta: float, geo: SceneGeometry) -> float:
    """Linear power gain 10^(PL/10) with PL = pl0_db - 10*zeta*log10(d/d0)."""
    if not d > 0.0:
        raise ValueError(f"distance must be positive, got {d}")
    pl_db = geo.pl0_db - 10.0 * zeta * np.log10(d / geo.d0_m)
    return float(10.0 ** (pl_db / 10.0))


def family_gains(geo: SceneGeometry) -> dict:
    """Per-family linear power gains implied by the scene geometry."""
    gains = {}
    for name, (tx, rx, zeta_attr) in _LINKS.items():
        d = geo.distance(tx, rx)
        gains[name] = path_loss_linear(d, float(getattr(geo, zeta_attr)), geo)
    return gains


def _family_shapes(cfg: SystemConfig) -> dict:
    return {
        "g_a_i1": (cfg.n_sub, cfg.n_irs1, cfg.m_tx),
        "g_a_i2": (cfg.n_sub, cfg.n_irs2, cfg.m_tx),
        "g_i1_b": (cfg.n_sub, cfg.n_bob, cfg.n_irs1),
        "g_i1_e": (cfg.n_sub, cfg.n_eve, cfg.n_irs1),
        "g_i2_b": (cfg.n_sub, cfg.n_bob, cfg.n_irs2),
        "g_i2_e": (cfg.n_sub, cfg.n_eve, cfg.n_irs2),
        "g_i1_i2": (cfg.n_sub, cfg.n_irs2, cfg.n_irs1),
    }


def keyed_sequence(master_seed: int, *key) -> np.random.SeedSequence:
    """SeedSequence for a named purpose, stable across platforms and runs.

    The key tuple (strings/ints) is hashed so that independent purposes
    ("chan", realization 3) vs ("cee", realization 3) never collide and
    adding sweep points does not shift other streams.
    """
    digest = hashlib.blake2s(repr((int(master_seed),) + key).encode()).digest()
    return np.random.SeedSequence(int.from_bytes(digest[:16], "little"))


def keyed_rng(master_seed: int, *key) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(keyed_sequence(master_seed, *key)))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def _cn01(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        / np.sqrt(2.0)


def generate(cfg: SystemConfig, geo: SceneGeometry, seed) -> ChannelSet:
    """Draw one ChannelSet realization; deterministic given the seed."""
    rng = as_rng(seed)
    gains = family_gains(geo)
    shapes = _family_shapes(cfg)
    families = {}
    for name in CHANNEL_FAMILIES:  # fixed draw order, part of the seed contract
        families[name] = np.sqrt(gains[name]) * _cn01(rng, shapes[name])
    return ChannelSet(**families)


def inject_cee(ch: ChannelSet, cee: CeeConfig, seed) -> ChannelSet:
    """Estimated channels H_hat = H - E with per-matrix error power.

    For each (family, subcarrier) matrix the error variance is
    sigma_E^2 = delta * |H|_F^2 / elementcount, i.e. the NMSE of that
    matrix concentrates at delta.  The error stream is independent of
    the channel stream (separate seed).
    """
    if cee.delta == 0.0:
        return ch.replace()
    rng = as_rng(seed)
    families = {}
    for name in CHANNEL_FAMILIES:
        h = getattr(ch, name)
        k, rows, cols = h.shape
        sq_norms = np.sum(np.abs(h) ** 2, axis=(1, 2))
        sigma2 = cee.delta * sq_norms / (rows * cols)
        err = np.sqrt(sigma2)[:, None, None] * _cn01(rng, h.shape)
        families[name] = h - err
    return ChannelSet(**families)


def dump_channels(ch: ChannelSet, path) -> None:
    """Write a ChannelSet as line-oriented text (see :func:`load_channels`).

    Format: a version header, then per family a line
    ``family <name> <K> <rows> <cols>``, then per subcarrier a line
    ``subcarrier <k>`` followed by rows*cols lines ``<re> <im>`` in
    row-major order.  Floats are shortest round-trip reprs, so a
    dump/load cycle is exact.
    """
    with open(path, "w") as fh:
        fh.write(_DUMP_HEADER + "\n")
        for name in CHANNEL_FAMILIES:
            arr = getattr(ch, name)
            k, rows, cols = arr.shape
            fh.write(f"family {name} {k} {rows} {cols}\n")
            for ki in range(k):
                fh.write(f"subcarrier {ki}\n")
                for val in arr[ki].ravel():
                    fh.write(f"{float(val.real)!r} {float(val.imag)!r}\n")


def load_channels(path) -> ChannelSet:
    with open(path) as fh:
        lines = (line.rstrip("\n") for line in fh)
        header = next(lines, "")
        if header != _DUMP_HEADER:
            raise ValueError(f"unrecognized channel dump header: {header!r}")
        families = {}
        line = next(lines, None)
        while line is not None:
            parts = line.split()
            if len(parts) != 5 or parts[0] != "family":
                raise ValueError(f"expected family header, got {line!r}")
            name, k, rows, cols = parts[1], int(parts[2]), int(parts[3]), int(parts[4])
            arr = np.empty((k, rows, cols), dtype=complex)
            for ki in range(k):
                sub = next(lines, "")
                if sub != f"subcarrier {ki}":
                    raise ValueError(f"expected 'subcarrier {ki}', got {sub!r}")
                flat = np.empty(rows * cols, dtype=complex)
                for idx in range(rows * cols):
                    re_s, im_s = next(lines).split()
                    flat[idx] = float(re_s) + 1j * float(im_s)
                arr[ki] = flat.reshape(rows, cols)
            families[name] = arr
            line = next(lines, None)
    missing = set(CHANNEL_FAMILIES) - set(families)
    if missing:
        raise ValueError(f"dump missing families: {sorted(missing)}")
    return ChannelSet(**families)
