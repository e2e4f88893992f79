"""TOML config files.

Layout (every table except the model ones is optional)::

    mode = "discrete"          # or "continuous"
    n_steps = 200000
    seed = 12345

    [x_law]                    # family + its parameters
    family = "constant"
    value = 1

    [nu_law]
    pmf = [[1, 1.0]]           # [k, probability] pairs
    truncation = "min"         # or "conditional"

    [bonus]
    scheme = "full_bonus"      # equal_split (z_law) | full_bonus | exchangeable_iid (y_law)
    [bonus.y_law]
    family = "constant"
    value = 1

    [run]       j_max, tail_grid, checkpoints, max_steps, replicas
    [solver]    J, window, h, t_max
    [analysis]  tail_fraction, sup_tolerance
    [inclusion] weights, k, draws

Law families: ``discrete_pmf`` (support = [[value, p], ...]), ``constant``
(value), ``exponential`` (rate), ``gamma`` (shape, scale), ``uniform``
(lo, hi). Unknown keys anywhere are an error.
"""
from __future__ import annotations

import copy
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import DEFAULT_MAX_STEPS
from .laws import FAMILIES, WeightLaw
from .model import BONUS_SCHEMES, AuthorCountLaw, ModelConfig, Mode

LAW_PARAMS = {
    "discrete_pmf": ("support",),
    "constant": ("value",),
    "exponential": ("rate",),
    "gamma": ("shape", "scale"),
    "uniform": ("lo", "hi"),
}

SECTIONS = {
    "run": {"j_max": 10, "tail_grid": None, "checkpoints": None, "max_steps": DEFAULT_MAX_STEPS, "replicas": 1},
    "solver": {"J": 100_000, "window": None, "h": 0.01, "t_max": 50.0},
    "analysis": {"tail_fraction": 0.01, "sup_tolerance": None},
    "inclusion": {"weights": None, "k": 2, "draws": 1_000_000},
}
TOP_KEYS = {"mode", "n_steps", "seed", "x_law", "nu_law", "bonus", *SECTIONS}


class ConfigError(ValueError):
    pass


@dataclass
class Settings:
    model: ModelConfig
    run: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    inclusion: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)

    @property
    def digest(self) -> str:
        """SHA-256 of the effective (post-override) config."""
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _unknown(where, got, allowed):
    extra = sorted(set(got) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(extra)}")


def parse_law(table: dict, where: str) -> WeightLaw:
    if not isinstance(table, dict) or "family" not in table:
        raise ConfigError(f"{where}: needs a 'family' key")
    fam = table["family"]
    if fam not in FAMILIES:
        raise ConfigError(
            f"A2/A7: {where} family {fam!r} is not in the finite-MGF whitelist {sorted(FAMILIES)}"
        )
    params = LAW_PARAMS[fam]
    _unknown(where, table, ("family", *params))
    missing = [p for p in params if p not in table]
    if missing:
        raise ConfigError(f"{where}: missing {', '.join(missing)}")
    if fam == "discrete_pmf":
        try:
            support = tuple((v, float(p)) for v, p in table["support"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: support must be [[value, probability], ...]") from exc
        return FAMILIES[fam](support)
    return FAMILIES[fam](*(table[p] for p in params))


def parse_model(raw: dict) -> ModelConfig:
    for key in ("x_law", "nu_law", "bonus"):
        if key not in raw:
            raise ConfigError(f"missing table [{key}]")
    try:
        mode = Mode(raw.get("mode", "discrete"))
    except ValueError as exc:
        raise ConfigError(f"mode must be 'discrete' or 'continuous', got {raw.get('mode')!r}") from exc

    nu = raw["nu_law"]
    _unknown("[nu_law]", nu, ("pmf", "truncation"))
    if "pmf" not in nu:
        raise ConfigError("[nu_law]: missing pmf")
    try:
        nu_law = AuthorCountLaw(tuple((k, p) for k, p in nu["pmf"]), nu.get("truncation", "min"))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[nu_law]: {exc}") from exc

    bonus = raw["bonus"]
    scheme = bonus.get("scheme")
    if scheme not in BONUS_SCHEMES:
        raise ConfigError(f"[bonus]: scheme must be one of {sorted(BONUS_SCHEMES)}, got {scheme!r}")
    cls, law_key = BONUS_SCHEMES[scheme]
    _unknown("[bonus]", bonus, ("scheme", law_key))
    if law_key not in bonus:
        raise ConfigError(f"[bonus]: scheme {scheme} needs a [bonus.{law_key}] table")

    return ModelConfig(
        x_law=parse_law(raw["x_law"], "[x_law]"),
        nu_law=nu_law,
        bonus=cls(parse_law(bonus[law_key], f"[bonus.{law_key}]")),
        mode=mode,
        n_steps=int(raw.get("n_steps", 1000)),
        seed=int(raw.get("seed", 0)),
    )


def apply_overrides(raw: dict, overrides: dict) -> dict:
    """Copy of ``raw`` with dotted-key overrides (e.g. ``solver.h``) applied."""
    out = copy.deepcopy(raw)
    for dotted, value in overrides.items():
        if value is None:
            continue
        *path, last = dotted.split(".")
        node = out
        for p in path:
            node = node.setdefault(p, {})
        node[last] = value
    return out


def from_dict(raw: dict) -> Settings:
    _unknown("top level", raw, TOP_KEYS)
    sections = {}
    for name, defaults in SECTIONS.items():
        table = raw.get(name, {})
        _unknown(f"[{name}]", table, defaults)
        sections[name] = {**defaults, **table}
    return Settings(parse_model(raw), raw=raw, **sections)


def load(path, overrides: dict | None = None) -> Settings:
    path = Path(path)
    with path.open("rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(apply_overrides(raw, overrides or {}))
