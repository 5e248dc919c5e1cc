"""Experiment configuration: parsing, validation and derived link objects."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .. import fec
from ..channel import FadingProcessParams
from ..errors import ConfigError, DecPilotError
from ..fec import CodeSpec, CrcSpec
from ..modem import Constellation, make_constellation
from ..pilots import LIST_POLICIES, PilotPolicy

_CODE_FAMILIES = ("extended_hamming", "ebch")


@dataclass(frozen=True)
class CodeConfig:
    family: str = "extended_hamming"
    m: int = 5
    t: int = 2  # eBCH only
    product: bool = False
    systematic: bool = True


@dataclass(frozen=True)
class DecoderConfig:
    kind: str = "hard"  # hard | soft; product codes always decode hard row/column
    list_size: int = 1
    max_queries: int = 10**6
    iterations: int = 4
    max_log: bool = False


@dataclass(frozen=True)
class LinkConfig:
    code: CodeConfig = field(default_factory=CodeConfig)
    crc: CrcSpec | None = None
    modulation: int = 4
    waveform: str = "single_carrier"  # single_carrier | ofdm
    num_subcarriers: int = 0
    # decorrelation interval in symbols (single carrier) or OFDM symbols
    decorrelation_interval: float = 25_000.0
    phi: float = 0.5
    sigma_f_sq: float = 1.0
    delay_profile: tuple[float, ...] = (1.0,)
    policies: tuple[PilotPolicy, ...] = ()
    training_interval: int = 100
    ebn0_db: tuple[float, ...] = (6.0,)
    blocks_per_point: int = 1000
    seed: int = 0
    decoder: DecoderConfig = field(default_factory=DecoderConfig)

    # ------------------------------------------------------------ derived

    @property
    def ofdm(self) -> bool:
        return self.waveform == "ofdm"

    @cached_property
    def code_spec(self) -> CodeSpec:
        return build_code(self.code, self.seed)

    @property
    def constellation(self) -> Constellation:
        return make_constellation(self.modulation)

    @property
    def symbols_per_block(self) -> int:
        return self.code_spec.n // self.constellation.bits_per_symbol

    @property
    def info_bits(self) -> int:
        """Payload bits per block, excluding CRC bits."""
        return self.code_spec.k - (self.crc.width if self.crc else 0)

    @property
    def steps_per_decorrelation(self) -> float:
        if self.ofdm:
            return float(self.decorrelation_interval)
        return self.decorrelation_interval / self.symbols_per_block

    @property
    def fading(self) -> FadingProcessParams:
        kw = dict(sigma_f_sq=self.sigma_f_sq, phi=self.phi, decorrelation_interval=self.steps_per_decorrelation)
        if self.ofdm:
            return FadingProcessParams.per_subcarrier(self.num_subcarriers, **kw)
        return FadingProcessParams(delay_profile=self.delay_profile, **kw)

    def with_policy(self, policy: PilotPolicy) -> PilotPolicy:
        return replace(policy, training_interval=self.training_interval)

    def validate(self) -> "LinkConfig":
        try:
            code = self.code_spec
            const = self.constellation
            self.fading
        except DecPilotError as exc:
            raise ConfigError(str(exc)) from exc
        if self.waveform not in ("single_carrier", "ofdm"):
            raise ConfigError(f"unknown waveform {self.waveform!r}")
        if code.n % const.bits_per_symbol:
            raise ConfigError("codeword length must fill whole symbols")
        if self.ofdm:
            if self.symbols_per_block != self.num_subcarriers:
                raise ConfigError(
                    f"OFDM needs n/log2(M) = num_subcarriers ({self.symbols_per_block} != {self.num_subcarriers})"
                )
            if len(self.delay_profile) != 1:
                raise ConfigError("OFDM subcarriers are flat; drop the delay profile")
        elif len(self.delay_profile) > 1 and self.symbols_per_block < 2 * len(self.delay_profile):
            raise ConfigError("block too short for multi-tap least squares")
        if not self.policies:
            raise ConfigError("at least one pilot policy is required")
        if self.training_interval < 2:
            raise ConfigError("training_interval must be >= 2")
        if self.blocks_per_point < 10 * self.training_interval:
            raise ConfigError("blocks_per_point must cover at least 10 training intervals")
        if not self.ebn0_db:
            raise ConfigError("no Eb/N0 points")
        if self.info_bits <= 0:
            raise ConfigError("CRC does not fit in the code dimension")
        if self.decoder.kind not in ("hard", "soft"):
            raise ConfigError(f"unknown decoder kind {self.decoder.kind!r}")
        for p in self.policies:
            if p.kind == "threshold" and not self.ofdm:
                raise ConfigError("threshold policy needs the OFDM waveform")
            if p.kind == "crc_gated" and self.crc is None and not p.genie_crc:
                raise ConfigError("crc_gated policy needs a CRC")
            if p.kind in LIST_POLICIES and (self.decoder.kind != "soft" or code.structure == "product"):
                raise ConfigError(f"{p.kind} policy needs the soft list decoder on a single code")
        return self

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["crc"] = None if self.crc is None else asdict(self.crc)
        d["policies"] = [asdict(p) for p in self.policies]
        d["delay_profile"] = list(self.delay_profile)
        d["ebn0_db"] = list(self.ebn0_db)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


_CODE_CACHE: dict[tuple, CodeSpec] = {}


def build_code(cfg: CodeConfig, seed: int) -> CodeSpec:
    key = (cfg, seed if not cfg.systematic else None)
    if key in _CODE_CACHE:
        return _CODE_CACHE[key]
    if cfg.family == "extended_hamming":
        code = fec.make_extended_hamming(cfg.m)
    elif cfg.family == "ebch":
        code = fec.make_ebch(cfg.m, cfg.t)
    else:
        raise ConfigError(f"unknown code family {cfg.family!r}")
    if not cfg.systematic:
        if cfg.product:
            raise ConfigError("non-systematic product codes are not supported")
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5C4A]))
        code = fec.make_nonsystematic(code, rng)
    if cfg.product:
        code = fec.make_product(code)
    _CODE_CACHE[key] = code
    return code


def _parse_policy(item: Any) -> PilotPolicy:
    if isinstance(item, str):
        return PilotPolicy(kind=item)
    if isinstance(item, dict):
        return PilotPolicy(**item)
    raise ConfigError(f"cannot parse policy {item!r}")


def _parse_crc(item: Any) -> CrcSpec | None:
    if item in (None, False, "none"):
        return None
    if isinstance(item, int):
        presets = {11: fec.CRC11, 24: fec.CRC24}
        if item not in presets:
            raise ConfigError(f"no default CRC polynomial for width {item}")
        return presets[item]
    if isinstance(item, dict):
        poly = item["poly"]
        if isinstance(poly, str):
            poly = int(poly, 0)
        return CrcSpec(width=int(item["width"]), poly=poly, init=int(item.get("init", 0)), xorout=int(item.get("xorout", 0)))
    raise ConfigError(f"cannot parse crc {item!r}")


def config_from_dict(raw: dict[str, Any]) -> LinkConfig:
    raw = dict(raw)
    try:
        kw: dict[str, Any] = {}
        if "code" in raw:
            kw["code"] = CodeConfig(**raw.pop("code"))
        if "decoder" in raw:
            kw["decoder"] = DecoderConfig(**raw.pop("decoder"))
        if "crc" in raw:
            kw["crc"] = _parse_crc(raw.pop("crc"))
        if "waveform" in raw and isinstance(raw["waveform"], dict):
            wf = raw.pop("waveform")
            kw["waveform"] = wf.get("kind", "single_carrier")
            kw["num_subcarriers"] = int(wf.get("num_subcarriers", 0))
        if "channel" in raw:
            ch = dict(raw.pop("channel"))
            if "delay_profile" in ch:
                ch["delay_profile"] = tuple(float(v) for v in ch["delay_profile"])
            kw.update(ch)
        policies = raw.pop("policies", raw.pop("policy", ()))
        if isinstance(policies, (str, dict)):
            policies = [policies]
        kw["policies"] = tuple(_parse_policy(p) for p in policies)
        if "ebn0_db" in raw:
            e = raw.pop("ebn0_db")
            kw["ebn0_db"] = tuple(float(v) for v in (e if isinstance(e, (list, tuple)) else [e]))
        kw.update(raw)
        cfg = LinkConfig(**kw)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    cfg = replace(cfg, policies=tuple(cfg.with_policy(p) for p in cfg.policies))
    return cfg.validate()


def load_config(path: str | Path, seed: int | None = None) -> LinkConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")
    if seed is not None:
        raw["seed"] = seed
    return config_from_dict(raw)
