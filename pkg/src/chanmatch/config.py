"""Experiment configuration files.

Flat ``section.key = value`` lines, ``#`` starts a comment::

    grid.axes = 0:100:1                  # 2D: 0:200:1, 0:160:1
    class.0.prior = 0.8
    class.0.component.0.mean = 30        # 2D: 50, 50
    class.0.component.0.sigma = 15       # 2D: cov = 75, 200, 50 (mm, nn, mn)
    class.0.component.0.weight = 1       # optional for a single component
    class.1.prior = 0.2
    class.1.pmf_path = class1.csv        # empirical weights instead of components
    class.1.smooth = true                # replace the pmf by a fitted Gaussian
    init.kind = threshold1d              # vertical | horizontal | threshold1d | random | file
    init.z_prime = 50
    init.n_labels = 3
    init.seed = 0
    init.path = init.csv
    cm.max_iters = 50
    cm.mi_tol = 0
    cm.eps = 1e-12
    output.dir = out
    output.render = false

Relative paths are resolved against the config file's directory.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import (
    CmConfig,
    Partition,
    init_horizontal,
    init_random,
    init_threshold_1d,
    init_vertical,
)
from .errors import ChanMatchError, ConfigurationError
from .generators import (
    ClassSetup,
    ClassSpec,
    Component,
    Gaussian1D,
    Gaussian2D,
    discretize,
    smooth_empirical,
)
from .outputs import read_partition, read_pmf_csv
from .probability import Axis, FeatureGrid

INIT_KINDS = ("vertical", "horizontal", "threshold1d", "random", "file")
_LINE = re.compile(r"^\s*([A-Za-z0-9_.]+)\s*=\s*(.*?)\s*$")


class ConfigError(ConfigurationError):
    """A config file is unreadable or a field is invalid; message names the field."""


@dataclass
class ExperimentConfig:
    grid: FeatureGrid
    classes: list  # ClassSpec, or a pmf array for empirical classes
    priors: list[float]
    init: dict = field(default_factory=dict)
    cm: CmConfig = field(default_factory=CmConfig)
    out_dir: Path | None = None
    render: bool = False

    def build_setup(self) -> ClassSetup:
        cond = [
            discretize(c, self.grid) if isinstance(c, ClassSpec) else np.asarray(c)
            for c in self.classes
        ]
        return ClassSetup(self.grid, np.asarray(self.priors), np.stack(cond))

    def build_init(self, setup: ClassSetup) -> Partition:
        kind = self.init.get("kind", "vertical" if self.grid.ndim == 2 else "threshold1d")
        n_labels = self.init.get("n_labels", setup.n_classes)
        try:
            if kind == "vertical":
                return init_vertical(self.grid, n_labels)
            if kind == "horizontal":
                return init_horizontal(self.grid, n_labels)
            if kind == "threshold1d":
                if "z_prime" not in self.init:
                    raise ConfigError("init.z_prime: required for threshold1d")
                return init_threshold_1d(self.grid, self.init["z_prime"])
            if kind == "random":
                return init_random(self.grid, n_labels, self.init.get("seed", 0))
            if "path" not in self.init:
                raise ConfigError("init.path: required for kind=file")
            return read_partition(self.init["path"], self.grid, self.init.get("n_labels"))
        except ConfigError:
            raise
        except ChanMatchError as exc:
            raise ConfigError(f"init.{kind}: {exc}") from exc


def _floats(key, value, n=None):
    try:
        vals = [float(v) for v in value.split(",")]
    except ValueError:
        raise ConfigError(f"{key}: expected number(s), got {value!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{key}: expected {n} value(s), got {len(vals)}")
    return vals


def _int(key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _bool(key, value):
    v = value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def parse_lines(text: str, source: str = "<config>") -> dict[str, str]:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = m.groups()
        if key in fields:
            raise ConfigError(f"{source}:{lineno}: {key} given twice")
        fields[key] = value
    return fields


def _parse_grid(fields) -> FeatureGrid:
    if "grid.axes" not in fields:
        raise ConfigError("grid.axes: missing")
    axes = []
    for part in fields["grid.axes"].split(","):
        bits = part.strip().split(":")
        if len(bits) != 3:
            raise ConfigError(f"grid.axes: axis {part.strip()!r} is not lo:hi:step")
        try:
            axes.append(Axis(*(float(b) for b in bits)))
        except ValueError as exc:
            raise ConfigError(f"grid.axes: {exc}") from None
    try:
        return FeatureGrid(tuple(axes))
    except ChanMatchError as exc:
        raise ConfigError(f"grid.axes: {exc}") from None


def _parse_component(fields, prefix, ndim):
    mean_key = f"{prefix}.mean"
    if mean_key not in fields:
        raise ConfigError(f"{mean_key}: missing")
    mean = _floats(mean_key, fields[mean_key], ndim)
    key = f"{prefix}.sigma" if ndim == 1 else f"{prefix}.cov"
    if key not in fields:
        raise ConfigError(f"{key}: missing")
    try:
        if ndim == 1:
            return Gaussian1D(mean[0], _floats(key, fields[key], 1)[0])
        return Gaussian2D(mean[0], mean[1], *_floats(key, fields[key], 3))
    except ConfigError:
        raise
    except ChanMatchError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config(text, base_dir=path.parent, source=str(path))


def parse_config(text: str, base_dir=Path("."), source="<config>") -> ExperimentConfig:
    fields = parse_lines(text, source)
    grid = _parse_grid(fields)

    known = re.compile(
        r"^(grid\.axes|class\.\d+\.(prior|pmf_path|smooth)|class\.\d+\.component\.\d+\.(mean|sigma|cov|weight)"
        r"|init\.(kind|z_prime|n_labels|seed|path)|cm\.(max_iters|mi_tol|eps)|output\.(dir|render))$"
    )
    for key in fields:
        if not known.match(key):
            raise ConfigError(f"{key}: unknown field")

    class_ids = sorted({int(k.split(".")[1]) for k in fields if k.startswith("class.")})
    if not class_ids:
        raise ConfigError("class.0.prior: no classes defined")
    if class_ids != list(range(len(class_ids))):
        raise ConfigError(f"class.{len(class_ids)}: class indices must be 0..n-1")

    classes, priors = [], []
    for ci in class_ids:
        pkey = f"class.{ci}.prior"
        if pkey not in fields:
            raise ConfigError(f"{pkey}: missing")
        (prior,) = _floats(pkey, fields[pkey], 1)
        if not 0 < prior <= 1:
            raise ConfigError(f"{pkey}: must be in (0, 1]")
        priors.append(prior)
        pmf_key = f"class.{ci}.pmf_path"
        if pmf_key in fields:
            try:
                pmf = read_pmf_csv(base_dir / fields[pmf_key], grid)
                if _bool(f"class.{ci}.smooth", fields.get(f"class.{ci}.smooth", "false")):
                    pmf = smooth_empirical(pmf, grid)
            except ConfigError:
                raise
            except (ChanMatchError, OSError) as exc:
                raise ConfigError(f"{pmf_key}: {exc}") from None
            classes.append(pmf)
            continue
        comp_ids = sorted(
            {int(k.split(".")[3]) for k in fields if k.startswith(f"class.{ci}.component.")}
        )
        if not comp_ids:
            raise ConfigError(f"class.{ci}.component.0.mean: class has no components")
        comps = []
        for k in comp_ids:
            prefix = f"class.{ci}.component.{k}"
            shape = _parse_component(fields, prefix, grid.ndim)
            wkey = f"{prefix}.weight"
            weight = _floats(wkey, fields[wkey], 1)[0] if wkey in fields else 1.0 / len(comp_ids)
            comps.append(Component(weight, shape))
        try:
            spec = ClassSpec(prior, tuple(comps))
            discretize(spec, grid)
        except ChanMatchError as exc:
            raise ConfigError(f"class.{ci}: {exc}") from None
        classes.append(spec)

    if abs(sum(priors) - 1.0) > 1e-9:
        raise ConfigError(f"class.*.prior: priors sum to {sum(priors)!r}, not 1")

    init: dict = {}
    if "init.kind" in fields:
        kind = fields["init.kind"]
        if kind not in INIT_KINDS:
            raise ConfigError(f"init.kind: unknown kind {kind!r} (expected one of {', '.join(INIT_KINDS)})")
        init["kind"] = kind
    if "init.z_prime" in fields:
        init["z_prime"] = _floats("init.z_prime", fields["init.z_prime"], 1)[0]
    if "init.n_labels" in fields:
        init["n_labels"] = _int("init.n_labels", fields["init.n_labels"])
    if "init.seed" in fields:
        init["seed"] = _int("init.seed", fields["init.seed"])
    if "init.path" in fields:
        init["path"] = base_dir / fields["init.path"]

    cm_kw = {}
    if "cm.max_iters" in fields:
        cm_kw["max_iters"] = _int("cm.max_iters", fields["cm.max_iters"])
    if "cm.mi_tol" in fields:
        cm_kw["mi_tol"] = _floats("cm.mi_tol", fields["cm.mi_tol"], 1)[0]
    if "cm.eps" in fields:
        cm_kw["channel_smoothing_eps"] = _floats("cm.eps", fields["cm.eps"], 1)[0]
    try:
        cm = CmConfig(**cm_kw)
    except ChanMatchError as exc:
        raise ConfigError(f"cm: {exc}") from None

    out_dir = base_dir / fields["output.dir"] if "output.dir" in fields else None
    render = _bool("output.render", fields.get("output.render", "false"))
    return ExperimentConfig(grid, classes, priors, init, cm, out_dir, render)
