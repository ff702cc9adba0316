"""Experiment configuration: section/key=value files with documented defaults.

The format is plain INI text (configparser). Every key below is optional;
omitted keys take the defaults shown in ``DEFAULT_CONFIG_TEXT``, which
mirror the reference simulation setup: an 8x8 dual-polarized (0/+90)
transmit panel at half-wavelength spacing, 7 users with 2x2 dual-polarized
receive arrays, 2 GHz carrier, 12 rays of 20 sub-paths each.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

from .geometry import ArrayGeometry

METHODS = ("direct", "method1", "method2", "method3")
NORMALIZATIONS = ("entire", "per_user", "per_stream")

DEFAULT_CONFIG_TEXT = """\
[array]
n_azimuth = 8
n_elevation = 8
n_pol = 2
spacing_az_wl = 0.5
spacing_el_wl = 0.5
pol_slants_deg = 0,90
pattern = parameterized

[user_array]
n_azimuth = 2
n_elevation = 2
n_pol = 2
spacing_az_wl = 0.5
spacing_el_wl = 0.5
pol_slants_deg = 0,90
pattern = isotropic

[channel]
carrier_hz = 2e9
n_rb_total = 4
n_sc_per_rb = 12
subcarrier_spacing_hz = 15e3
n_rays = 12
n_subpaths = 20
delay_spread_s = 100e-9
speed_kmh = 3
time_s = 0
; cluster angle spreads around each user's mean direction
spread_aod_deg = 30
spread_zod_deg = 5
spread_aoa_deg = 60
spread_zoa_deg = 10
; per-sub-path jitter inside a cluster
subpath_spread_az_deg = 5
subpath_spread_zen_deg = 1
; user mean directions drawn uniformly from these ranges
aod_center_range_deg = -60,60
zod_center_range_deg = 80,100
aoa_center_range_deg = -180,180
zoa_center_range_deg = 80,100
xpr_mean_db = 8
xpr_std_db = 3
; blank = pure non-line-of-sight
ricean_k =

[experiment]
users = 7
streams_per_user = 2
methods = direct,method1,method2,method3
normalizations = entire,per_user,per_stream
pu_granularities = 1
seed = 1
seeds = 1

[link]
snr_db = 20
noise_power = 1.0
; blank = one power unit per stream (total = number of streams)
power_budget =
; blank = uncapped Shannon rate; 6 approximates a 64QAM ceiling
rate_cap_bits =
"""


@dataclass(frozen=True)
class SamplerConfig:
    """Synthetic per-user ray statistics."""

    n_rays: int = 12
    n_subpaths: int = 20
    delay_spread_s: float = 100e-9
    speed_kmh: float = 3.0
    spread_aod_deg: float = 30.0
    spread_zod_deg: float = 5.0
    spread_aoa_deg: float = 60.0
    spread_zoa_deg: float = 10.0
    subpath_spread_az_deg: float = 5.0
    subpath_spread_zen_deg: float = 1.0
    aod_center_range_deg: tuple[float, float] = (-60.0, 60.0)
    zod_center_range_deg: tuple[float, float] = (80.0, 100.0)
    aoa_center_range_deg: tuple[float, float] = (-180.0, 180.0)
    zoa_center_range_deg: tuple[float, float] = (80.0, 100.0)
    xpr_mean_db: float = 8.0
    xpr_std_db: float = 3.0
    ricean_k: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    tx_array: ArrayGeometry = field(
        default_factory=lambda: ArrayGeometry(8, 8, 2, pattern="parameterized")
    )
    rx_array: ArrayGeometry = field(default_factory=lambda: ArrayGeometry(2, 2, 2))
    users: int = 7
    streams_per_user: int = 2
    carrier_hz: float = 2e9
    n_rb_total: int = 4
    n_sc_per_rb: int = 12
    subcarrier_spacing_hz: float = 15e3
    time_s: float = 0.0
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    methods: tuple[str, ...] = METHODS
    normalizations: tuple[str, ...] = NORMALIZATIONS
    pu_granularities: tuple[int, ...] = (1,)
    seed: int = 1
    n_seeds: int = 1
    snr_db: float = 20.0
    noise_power: float = 1.0
    power_budget: float | None = None
    rate_cap_bits: float | None = None

    @property
    def nt(self) -> int:
        return self.tx_array.n_elements

    @property
    def user_antennas(self) -> int:
        return self.rx_array.n_elements

    @property
    def wavelength_m(self) -> float:
        return 299792458.0 / self.carrier_hz

    @property
    def rho_f(self) -> float:
        return self.noise_power * 10.0 ** (self.snr_db / 10.0)

    def validate(self) -> "ExperimentConfig":
        k, s = self.users, self.streams_per_user
        if k < 1:
            raise ValueError(f"[experiment] users must be >= 1, got {k}")
        if s < 1:
            raise ValueError(f"[experiment] streams_per_user must be >= 1, got {s}")
        if s > self.user_antennas:
            raise ValueError(
                f"[experiment] streams_per_user = {s} exceeds user antennas {self.user_antennas}"
            )
        if k * s > self.nt:
            raise ValueError(
                f"[experiment] users * streams_per_user = {k * s} exceeds "
                f"transmit antennas {self.nt}"
            )
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"[experiment] methods: unknown method {m!r}")
        for nm in self.normalizations:
            if nm not in NORMALIZATIONS:
                raise ValueError(f"[experiment] normalizations: unknown mode {nm!r}")
        if not self.methods:
            raise ValueError("[experiment] methods must not be empty")
        if not self.normalizations:
            raise ValueError("[experiment] normalizations must not be empty")
        for g in self.pu_granularities:
            if g < 1 or self.n_rb_total % g != 0:
                raise ValueError(
                    f"[experiment] pu_granularities: {g} does not divide "
                    f"[channel] n_rb_total = {self.n_rb_total}"
                )
        if self.n_seeds < 1:
            raise ValueError(f"[experiment] seeds must be >= 1, got {self.n_seeds}")
        if self.noise_power <= 0:
            raise ValueError(f"[link] noise_power must be > 0, got {self.noise_power}")
        if self.sampler.n_rays < 1 or self.sampler.n_subpaths < 1:
            raise ValueError("[channel] n_rays and n_subpaths must be >= 1")
        return self


def _geometry_from(section, context: str) -> ArrayGeometry:
    slants = tuple(float(x) for x in section.get("pol_slants_deg").split(","))
    try:
        return ArrayGeometry(
            n_azimuth=section.getint("n_azimuth"),
            n_elevation=section.getint("n_elevation"),
            n_pol=section.getint("n_pol"),
            spacing_az=section.getfloat("spacing_az_wl"),
            spacing_el=section.getfloat("spacing_el_wl"),
            pol_slants_deg=slants,
            pattern=section.get("pattern"),
        )
    except ValueError as exc:
        raise ValueError(f"[{context}] {exc}") from None


def _float_or_none(section, key: str) -> float | None:
    raw = section.get(key, "").strip()
    return float(raw) if raw else None


def _pair(section, key: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in section.get(key).split(","))
    return lo, hi


def _csv(section, key: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in section.get(key).split(",") if x.strip())


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read_string(DEFAULT_CONFIG_TEXT)
    overlay = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    overlay.read_file(io.StringIO(text))
    for section in overlay.sections():
        if section not in parser:
            raise ValueError(f"unknown config section [{section}]")
        for key, value in overlay[section].items():
            if key not in parser[section]:
                raise ValueError(f"unknown config key [{section}] {key}")
            parser[section][key] = value

    chan = parser["channel"]
    sampler = SamplerConfig(
        n_rays=chan.getint("n_rays"),
        n_subpaths=chan.getint("n_subpaths"),
        delay_spread_s=chan.getfloat("delay_spread_s"),
        speed_kmh=chan.getfloat("speed_kmh"),
        spread_aod_deg=chan.getfloat("spread_aod_deg"),
        spread_zod_deg=chan.getfloat("spread_zod_deg"),
        spread_aoa_deg=chan.getfloat("spread_aoa_deg"),
        spread_zoa_deg=chan.getfloat("spread_zoa_deg"),
        subpath_spread_az_deg=chan.getfloat("subpath_spread_az_deg"),
        subpath_spread_zen_deg=chan.getfloat("subpath_spread_zen_deg"),
        aod_center_range_deg=_pair(chan, "aod_center_range_deg"),
        zod_center_range_deg=_pair(chan, "zod_center_range_deg"),
        aoa_center_range_deg=_pair(chan, "aoa_center_range_deg"),
        zoa_center_range_deg=_pair(chan, "zoa_center_range_deg"),
        xpr_mean_db=chan.getfloat("xpr_mean_db"),
        xpr_std_db=chan.getfloat("xpr_std_db"),
        ricean_k=_float_or_none(chan, "ricean_k"),
    )
    exp = parser["experiment"]
    link = parser["link"]
    cfg = ExperimentConfig(
        tx_array=_geometry_from(parser["array"], "array"),
        rx_array=_geometry_from(parser["user_array"], "user_array"),
        users=exp.getint("users"),
        streams_per_user=exp.getint("streams_per_user"),
        carrier_hz=chan.getfloat("carrier_hz"),
        n_rb_total=chan.getint("n_rb_total"),
        n_sc_per_rb=chan.getint("n_sc_per_rb"),
        subcarrier_spacing_hz=chan.getfloat("subcarrier_spacing_hz"),
        time_s=chan.getfloat("time_s"),
        sampler=sampler,
        methods=_csv(exp, "methods"),
        normalizations=_csv(exp, "normalizations"),
        pu_granularities=tuple(int(x) for x in _csv(exp, "pu_granularities")),
        seed=exp.getint("seed"),
        n_seeds=exp.getint("seeds"),
        snr_db=link.getfloat("snr_db"),
        noise_power=link.getfloat("noise_power"),
        power_budget=_float_or_none(link, "power_budget"),
        rate_cap_bits=_float_or_none(link, "rate_cap_bits"),
    )
    return cfg.validate()


def load_config(path: str | None) -> ExperimentConfig:
    """Parse a config file; ``None`` yields the documented defaults."""
    if path is None:
        return parse_config("")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def with_seeds(cfg: ExperimentConfig, n_seeds: int) -> ExperimentConfig:
    return replace(cfg, n_seeds=n_seeds).validate()
