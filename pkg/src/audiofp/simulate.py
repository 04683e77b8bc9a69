"""Synthetic device classes and user populations.

Real devices differ in their audio stacks; some browsers additionally
produce differing digests across repeated runs ("fickleness").  This
module is an explicit synthetic stand-in for both effects so that the
collation, stability and diversity machinery can be exercised at desk
scale: a per-class spectral offset provides cross-device diversity, and
a small per-profile set of micro-offsets, sampled per iteration, makes
repeated runs land in a finite digest set.
"""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass, field

import numpy as np

from .dsp import FrequencyFrame
from .synth import AudioBuffer

# offset amplitudes, in dB: class signature and within-profile variants
_BASE_DB = 0.5
_MICRO_DB = 0.05


def stable_seed(*parts) -> int:
    """A 64-bit seed derived from the parts, stable across runs and hosts."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(
        hashlib.blake2b(text.encode(), digest_size=8).digest(), "little"
    )


def rng_for(*parts) -> np.random.Generator:
    return np.random.default_rng(stable_seed(*parts))


@dataclass(frozen=True)
class DeviceProfile:
    """One device/browser stack: a class signature plus fickleness knobs.

    ``variant_count`` is the total number of distinct outputs the profile
    can produce per vector (the clean render counts as variant 0), and
    ``fickleness_p`` the per-iteration probability of drawing a random
    variant instead of the clean one.
    """

    class_id: str
    perturb_seed: int = 0
    variant_count: int = 1
    fickleness_p: float = 0.0

    def __post_init__(self):
        if self.variant_count < 1:
            raise ValueError("variant_count must be >= 1")
        if not 0.0 <= self.fickleness_p <= 1.0:
            raise ValueError("fickleness_p must be in [0, 1]")


@functools.lru_cache(maxsize=4096)
def _base_offset(class_id: str, nbins: int) -> np.ndarray:
    off = rng_for("base", class_id).uniform(-_BASE_DB, _BASE_DB, nbins)
    off.flags.writeable = False
    return off


@functools.lru_cache(maxsize=4096)
def _micro_offsets(class_id: str, perturb_seed: int, variant_count: int, nbins: int):
    """Fixed per-profile micro-offset table; row 0 is the clean variant."""
    table = np.zeros((variant_count, nbins))
    if variant_count > 1:
        rng = rng_for("micro", class_id, perturb_seed)
        table[1:] = rng.uniform(-_MICRO_DB, _MICRO_DB, (variant_count - 1, nbins))
    table.flags.writeable = False
    return table


@functools.lru_cache(maxsize=65536)
def choose_variant(profile: DeviceProfile, iteration: int) -> int:
    """Which variant this iteration lands on; 0 is the clean render."""
    if profile.fickleness_p <= 0.0 or profile.variant_count == 1:
        return 0
    rng = rng_for("pick", profile.class_id, profile.perturb_seed, iteration)
    if rng.random() >= profile.fickleness_p:
        return 0
    return int(rng.integers(0, profile.variant_count))


def apply_variant(frame: FrequencyFrame, profile: DeviceProfile, variant: int) -> FrequencyFrame:
    off = _base_offset(profile.class_id, len(frame))
    if variant:
        off = off + _micro_offsets(
            profile.class_id, profile.perturb_seed, profile.variant_count, len(frame)
        )[variant]
    return FrequencyFrame(np.maximum(frame.bins + off, frame.floor_db), frame.floor_db)


def perturb(frame: FrequencyFrame, profile: DeviceProfile, iteration: int) -> FrequencyFrame:
    """Perturb an analyser frame the way this device would.

    The class base offset is always applied; with probability
    ``fickleness_p`` (seeded by profile and iteration, hence repeatable)
    one of the profile's fixed micro-offsets is added on top.
    """
    return apply_variant(frame, profile, choose_variant(profile, iteration))


def perturb_buffer(buf: AudioBuffer, profile: DeviceProfile) -> AudioBuffer:
    """Class base offset for full-buffer vectors: a seeded gain, no fickleness."""
    gain_db = rng_for("dcgain", profile.class_id).uniform(-_BASE_DB, _BASE_DB)
    return AudioBuffer(buf.sample_rate, buf.samples * 10.0 ** (gain_db / 20.0))


# ---------------------------------------------------------------------------
# population synthesis

_OS_POOL = [
    ("Windows NT 10.0; Win64; x64", 0.785),
    ("Macintosh; Intel Mac OS X 10_15_7", 0.094),
    ("Linux; Android 11", 0.069),
    ("X11; Linux x86_64", 0.052),
]
_COUNTRY_POOL = ["US", "IN", "BR", "IT", "DE", "GB", "CA", "FR", "ES", "MX"]
_SAMPLE_RATES = [(48000.0, 0.768), (44100.0, 0.227), (96000.0, 0.003), (16000.0, 0.002)]
_CHANNEL_COUNTS = [(2, 0.90), (6, 0.04), (8, 0.02), (1, 0.02), (4, 0.01), (0, 0.01)]
_BASE_LATENCIES = [(0.01, 0.60), (0.0, 0.12), (0.005, 0.10), (0.02, 0.08),
                   (0.04, 0.05), (0.08, 0.03), (0.16, 0.02)]


def zipf_weights(n: int, exponent: float = 1.2) -> np.ndarray:
    """Normalized Zipf-like popularity weights over n classes."""
    w = np.arange(1, n + 1, dtype=np.float64) ** -exponent
    return w / w.sum()


@dataclass
class PopulationConfig:
    num_users: int
    num_classes: int
    seed: int = 0
    iterations: int = 30
    zipf_exponent: float = 1.2
    class_weights: np.ndarray | None = None
    browser_mix: dict[str, float] = field(
        default_factory=lambda: {"chrome": 0.904, "firefox": 0.096}
    )
    family_fickleness: dict[str, tuple[int, float]] = field(
        default_factory=lambda: {"chrome": (26, 0.12), "firefox": (26, 0.005)}
    )

    def __post_init__(self):
        if self.num_users < 0 or self.num_classes < 1:
            raise ValueError("need num_users >= 0 and num_classes >= 1")
        if self.class_weights is None:
            self.class_weights = zipf_weights(self.num_classes, self.zipf_exponent)
        else:
            self.class_weights = np.asarray(self.class_weights, dtype=np.float64)
        if len(self.class_weights) != self.num_classes:
            raise ValueError("class_weights length must equal num_classes")
        if abs(self.class_weights.sum() - 1.0) > 1e-9:
            raise ValueError("class_weights must sum to 1")
        if abs(sum(self.browser_mix.values()) - 1.0) > 1e-9:
            raise ValueError("browser_mix fractions must sum to 1")
        for fam in self.browser_mix:
            if fam not in self.family_fickleness:
                raise ValueError(f"no fickleness entry for family {fam!r}")


def paper_like_config(seed: int = 20930) -> PopulationConfig:
    """The desk-scale default: 2093 users, 95 device classes, Zipf weights,
    a mostly-fickle majority family and a ~9.6% stable minority family."""
    return PopulationConfig(num_users=2093, num_classes=95, seed=seed)


def _assign_families(cfg: PopulationConfig) -> list[str]:
    """Give every class one browser family, matching the mix by class weight.

    Classes never span families, so user clusters stay browser-homogeneous.
    Greedy largest-deficit assignment over classes in weight order.
    """
    families = sorted(cfg.browser_mix)
    target = {f: cfg.browser_mix[f] for f in families}
    got = {f: 0.0 for f in families}
    out = [""] * cfg.num_classes
    for idx in np.argsort(-cfg.class_weights, kind="stable"):
        deficit = {f: target[f] - got[f] for f in families}
        fam = max(families, key=lambda f: deficit[f])
        out[idx] = fam
        got[fam] += float(cfg.class_weights[idx])
    return out


def _weighted_choice(rng: np.random.Generator, pool) -> object:
    values = [v for v, _ in pool]
    weights = np.array([w for _, w in pool], dtype=np.float64)
    return values[int(rng.choice(len(values), p=weights / weights.sum()))]


def _ua_string(family: str, rng: np.random.Generator) -> str:
    os_part = _weighted_choice(rng, _OS_POOL)
    if family == "firefox":
        ver = int(rng.integers(88, 94))
        return f"Mozilla/5.0 ({os_part}; rv:{ver}.0) Gecko/20100101 Firefox/{ver}.0"
    ver = int(rng.integers(88, 94))
    build = int(rng.integers(4000, 4700))
    return (
        f"Mozilla/5.0 ({os_part}) AppleWebKit/537.36 (KHTML, like Gecko) "
        f"Chrome/{ver}.0.{build}.0 Safari/537.36"
    )


def profile_for_class(cfg: PopulationConfig, class_idx: int, families: list[str]) -> DeviceProfile:
    family = families[class_idx]
    variants, fickle = cfg.family_fickleness[family]
    return DeviceProfile(
        class_id=f"c{class_idx:04d}",
        perturb_seed=stable_seed("pseed", cfg.seed, class_idx),
        variant_count=variants,
        fickleness_p=fickle,
    )


def generate_population(cfg: PopulationConfig) -> list:
    """Run the full engine for every simulated user; returns UserRecords.

    Users draw a device class by popularity weight (the first
    ``num_classes`` users cover each class once so every class is
    populated), the class determines the browser family and fickleness,
    and all per-user randomness streams from (seed, user index) so
    generation order never matters.
    """
    # deferred: vectors/data sit above this module in the import graph
    from .data import AudioConfig, UserRecord
    from .vectors import run_all

    families = _assign_families(cfg)
    base_ts = 1_616_000_000.0 + (cfg.seed % 100_000)
    # finite per-family UA pools shared across classes, so the same UA string
    # recurs with users of different device classes (spanning UAs)
    ua_pools = {
        fam: [
            _ua_string(fam, rng_for("uapool", cfg.seed, fam, j))
            for j in range(max(2, round(cfg.num_users * cfg.browser_mix[fam] / 16)))
        ]
        for fam in cfg.browser_mix
    }
    canvas_pool = max(1, round(cfg.num_users * 0.17))
    fonts_pool = max(1, round(cfg.num_users * 0.33))
    records = []
    for i in range(cfg.num_users):
        rng = rng_for("user", cfg.seed, i)
        if i < cfg.num_classes:
            class_idx = i
        else:
            class_idx = int(rng.choice(cfg.num_classes, p=cfg.class_weights))
        family = families[class_idx]
        profile = profile_for_class(cfg, class_idx, families)
        per_vector = run_all(profile, cfg.iterations)
        canvas = hashlib.md5(
            f"canvas|{cfg.seed}|{_zipf_draw(rng, canvas_pool)}".encode()
        ).hexdigest()
        fonts = hashlib.md5(
            f"fonts|{cfg.seed}|{_zipf_draw(rng, fonts_pool)}".encode()
        ).hexdigest()
        records.append(
            UserRecord(
                user_id=f"u{i:05d}",
                ip_digest=hashlib.md5(f"ip|{cfg.seed}|{i}".encode()).hexdigest(),
                ua=ua_pools[family][_zipf_draw(rng, len(ua_pools[family]))],
                audio_config=AudioConfig(
                    sample_rate=float(_weighted_choice(rng, _SAMPLE_RATES)),
                    max_channel_count=int(_weighted_choice(rng, _CHANNEL_COUNTS)),
                    base_latency=float(_weighted_choice(rng, _BASE_LATENCIES)),
                ),
                per_vector=per_vector,
                canvas=canvas,
                fonts=fonts,
                country=str(rng.choice(_COUNTRY_POOL)),
                timestamp=base_ts + 150.0 * i,
            )
        )
    return records


def _zipf_draw(rng: np.random.Generator, pool_size: int, exponent: float = 1.2) -> int:
    return int(rng.choice(pool_size, p=zipf_weights(pool_size, exponent)))
