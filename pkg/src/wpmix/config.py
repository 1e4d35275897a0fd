"""JSON experiment configurations: loading, validation and model construction."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from . import laws
from .errors import ConfigurationError
from .mixture import BivariateModel, WpMixtureModel, make_model

__all__ = [
    "RADIAL_FAMILIES",
    "MIXING_FAMILIES",
    "load_schema",
    "parse_config",
    "load_config",
    "ExperimentConfig",
    "load_experiment",
    "build_radial",
    "build_mixing",
    "build_model",
]

# family name -> (constructor, required parameter names)
RADIAL_FAMILIES = {
    "kotz3": (laws.kotz3_radial, ("K", "N", "r", "delta")),
    "exponential": (laws.exponential_radial, ()),
    "finite_endpoint": (laws.finite_endpoint_radial, ("c1", "c2", "lam", "x_F")),
    "pareto": (laws.pareto_radial, ("lam", "gamma")),
    "power_endpoint": (laws.power_endpoint_radial, ("gamma",)),
}
MIXING_FAMILIES = {
    "beta": (laws.beta_mixing, ("a", "alpha")),
    "uniform": (laws.uniform_mixing, ()),
    "power_beta": (laws.power_beta_mixing, ("delta", "a", "b")),
    "spherical": (laws.spherical_mixing, ("d", "m")),
    "point_mass": (laws.point_mass_mixing, ("at",)),
}
_INTEGER_PARAMS = {"d", "m"}


def load_schema(name: str = "config") -> dict:
    text = resources.files("wpmix").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _line_of(text: str, path) -> int | None:
    # best effort: line of the last key on the error path
    keys = [p for p in path if isinstance(p, str)]
    if not keys:
        return None
    pattern = re.compile(r'"' + re.escape(keys[-1]) + r'"\s*:')
    match = pattern.search(text)
    return text.count("\n", 0, match.start()) + 1 if match else None


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse and schema-validate configuration text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    validator = jsonschema.Draft202012Validator(load_schema("config"))
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "(root)"
        line = _line_of(text, list(err.absolute_path))
        anchor = f"{source}:{line}" if line else source
        raise ConfigurationError(f"{anchor}: {where}: {err.message}")
    return data


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path)


@dataclass(frozen=True)
class ExperimentConfig:
    """A schema-valid configuration split into its parts.

    ``blocks`` holds the command blocks (``sample``, ``cond``, ...) and
    ``raw`` the whole document as parsed.
    """

    seed: int
    model: dict | None = None
    blocks: dict = field(default_factory=dict)
    output_path: str | None = None
    fmt: str = "csv"
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        output = data.get("output", {})
        blocks = {k: v for k, v in data.items() if k not in ("schema", "seed", "model", "output")}
        return cls(seed=int(data["seed"]), model=data.get("model"), blocks=blocks,
                   output_path=output.get("path"), fmt=output.get("format", "csv"), raw=data)

    def block(self, name: str):
        return self.blocks.get(name)


def load_experiment(path: str) -> ExperimentConfig:
    return ExperimentConfig.from_mapping(load_config(path))


def _build(spec: dict, families: dict, what: str):
    family = spec.get("family")
    if family not in families:
        raise ConfigurationError(f"unknown {what} family {family!r}")
    ctor, names = families[family]
    params = dict(spec.get("params", {}))
    missing = [n for n in names if n not in params]
    extra = [n for n in params if n not in names]
    if missing or extra:
        raise ConfigurationError(
            f"{what} family {family!r} takes parameters {list(names)}; "
            f"missing {missing}, unexpected {extra}"
        )
    args = [int(params[n]) if n in _INTEGER_PARAMS else float(params[n]) for n in names]
    return ctor(*args)


def build_radial(spec: dict) -> laws.RadialLaw:
    return _build(spec, RADIAL_FAMILIES, "radial")


def build_mixing(spec: dict) -> laws.MixingLaw:
    return _build(spec, MIXING_FAMILIES, "mixing")


_BIVARIATE_KEYS = {"rho", "q1", "q2"}
_MIXTURE_KEYS = {"d", "I", "A", "q_I", "q_J", "plus_prob_I", "plus_prob_J"}


def build_model(block: dict | None) -> WpMixtureModel | BivariateModel:
    """A :class:`BivariateModel` when ``rho`` is given, else a :class:`WpMixtureModel`."""
    if block is None:
        raise ConfigurationError("this command needs a model block")
    radial = build_radial(block["radial"])
    mixing = build_mixing(block["mixing"])
    p = float(block["p"])
    if "rho" in block:
        clash = sorted(_MIXTURE_KEYS & block.keys())
        if clash:
            raise ConfigurationError(f"bivariate model (rho given) does not take {clash}")
        return BivariateModel(float(block["rho"]), p, radial, mixing,
                              float(block.get("q1", 0.5)), float(block.get("q2", 0.5)))
    clash = sorted(_BIVARIATE_KEYS & block.keys())
    if clash:
        raise ConfigurationError(f"{clash} only apply to the bivariate model (give rho)")
    if "d" not in block or "I" not in block:
        raise ConfigurationError("model needs d and I (or rho for the bivariate model)")
    return make_model(
        block["I"], int(block["d"]), p, radial, mixing, block.get("A"),
        q_I=float(block.get("q_I", 2.0)), q_J=float(block.get("q_J", 2.0)),
        plus_prob_I=float(block.get("plus_prob_I", 0.5)),
        plus_prob_J=float(block.get("plus_prob_J", 0.5)),
    )
