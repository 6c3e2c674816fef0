"""Experiment configuration files.

Grammar: an INI file (``configparser`` syntax, ``#`` or ``;`` comments) with
the sections and keys below.  Every key is optional unless marked; any key or
section not listed is an error.  Lists are comma separated.

    [experiment]
    kind          area_law | thermal_sweep | correlator | selfcheck
                  (must agree with the CLI subcommand if given)

    [graph]
    family        path | box | bethe | custom            (default path)
    dimension     box dimension, 1..3                     (default 1)
    branching     bethe branching number                  (default 2)
    regular_root  bethe root gets branching + 1 children  (default false)
    edge_file     custom: edge list file, one "u v" per line
    sizes         volume parameters n: path has 2n+1 sites, box has side
                  2n+1, bethe has depth n; ignored for custom (default 20)

    [region]
    radius        half-width of the centred block Lambda_0  (default 2)
    sites         explicit vertex indices; overrides radius
    complement    use the complement of the region instead  (default false)

    [model]
    m, lam, g     mass, coupling, disorder strength        (default 1, 1, 1)

    [disorder]
    distribution  uniform | table                          (default uniform)
    k_max         upper end of the support                 (default 1)
    table         density table file (two columns: bin upper edge, density)

    [thermal]
    betas         inverse temperatures                     (default none)
    ground        also run the ground state                (default true)

    [correlator]
    max_distance  largest distance tabulated               (default 15)

    [run]
    samples       disorder samples per volume              (default 100)
    seed          master seed, 0 <= seed < 2**64           (default 0)
    out           output path prefix                       (default results/run)
    workers       worker processes                         (default 1)
"""

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

from .. import disorder as dis

KINDS = ("area_law", "thermal_sweep", "correlator", "selfcheck")

_KEYS = {
    "experiment": {"kind"},
    "graph": {"family", "dimension", "branching", "regular_root", "edge_file", "sizes"},
    "region": {"radius", "sites", "complement"},
    "model": {"m", "lam", "g"},
    "disorder": {"distribution", "k_max", "table"},
    "thermal": {"betas", "ground"},
    "correlator": {"max_distance"},
    "run": {"samples", "seed", "out", "workers"},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "area_law"
    family: str = "path"
    dimension: int = 1
    branching: int = 2
    regular_root: bool = False
    edge_file: Optional[str] = None
    sizes: tuple = (20,)
    radius: int = 2
    sites: Optional[tuple] = None
    complement: bool = False
    m: float = 1.0
    lam: float = 1.0
    g: float = 1.0
    distribution: str = "uniform"
    k_max: float = 1.0
    table: Optional[str] = None
    betas: tuple = ()
    ground: bool = True
    max_distance: int = 15
    samples: int = 100
    seed: int = 0
    out: str = "results/run"
    workers: int = 1
    _table_data: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        validate(self)

    def echo(self) -> dict:
        """Resolved settings that determine the results (no output path or worker count)."""
        d = asdict(self)
        for key in ("out", "workers", "_table_data", "table"):
            d.pop(key)
        if self._table_data is not None:
            d["table_edges"], d["table_density"] = (list(x) for x in self._table_data)
        for key, val in d.items():
            if isinstance(val, tuple):
                d[key] = list(val)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.echo(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def disorder_spec(self) -> dis.DisorderSpec:
        if self.distribution == "uniform":
            return dis.DisorderSpec("uniform", self.k_max, self.seed)
        edges, density = self._table_data
        return dis.DisorderSpec("table", self.k_max, self.seed, edges, density)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def validate(cfg: ExperimentConfig):
    _require(cfg.kind in KINDS, f"unknown experiment kind {cfg.kind!r}")
    _require(cfg.family in ("path", "box", "bethe", "custom"), f"unknown graph family {cfg.family!r}")
    _require(1 <= cfg.dimension <= 3, "dimension must be 1, 2 or 3")
    _require(cfg.branching >= 1, "branching must be at least 1")
    _require(cfg.family != "custom" or cfg.edge_file, "custom graphs need graph.edge_file")
    _require(len(cfg.sizes) >= 1 and all(n >= 0 for n in cfg.sizes), "sizes must be non-empty and non-negative")
    _require(cfg.radius >= 0, "radius must be non-negative")
    _require(cfg.sites is None or len(cfg.sites) >= 1, "sites must not be empty")
    _require(cfg.m > 0, "m must be positive")
    _require(cfg.lam >= 0, "lam must be non-negative")
    _require(cfg.g > 0, "g must be positive")
    _require(cfg.k_max > 0, "k_max must be positive")
    _require(cfg.distribution in ("uniform", "table"), f"unknown distribution {cfg.distribution!r}")
    _require(cfg.distribution == "uniform" or cfg._table_data is not None, "table distribution needs disorder.table")
    _require(all(b > 0 for b in cfg.betas), "betas must be positive")
    _require(cfg.ground or cfg.betas or cfg.kind in ("correlator", "selfcheck"), "nothing to run: ground = false and no betas")
    _require(cfg.max_distance >= 1, "max_distance must be at least 1")
    _require(cfg.samples >= 1, "samples must be at least 1")
    _require(0 <= cfg.seed < 2**64, "seed must lie in [0, 2**64)")
    _require(cfg.workers >= 1, "workers must be at least 1")
    if cfg.kind == "correlator":
        _require(len(cfg.sizes) == 1, "correlator runs take a single size")
    if cfg.sites is None and cfg.family in ("path", "box", "bethe") and cfg.kind != "correlator":
        _require(cfg.radius <= min(cfg.sizes), "region radius exceeds the smallest volume")
    if cfg.distribution == "table":
        try:
            dis.DisorderSpec("table", cfg.k_max, cfg.seed, *cfg._table_data)
        except ValueError as exc:
            raise ConfigError(f"density table: {exc}") from None


def _ints(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _floats(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def parse(text: str, base_dir: Path = Path("."), kind: Optional[str] = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for section in cp.sections():
        if section not in _KEYS:
            raise ConfigError(f"unknown section [{section}]")
        extra = set(cp[section]) - _KEYS[section]
        if extra:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(extra))}")

    def get(section, key, conv, default=None):
        if not cp.has_option(section, key):
            return default
        raw = cp.get(section, key)
        try:
            return conv(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} = {raw!r} is not valid") from None

    def boolean(raw):
        states = configparser.ConfigParser.BOOLEAN_STATES
        if raw.strip().lower() not in states:
            raise ValueError(raw)
        return states[raw.strip().lower()]

    def path_of(raw):
        p = Path(raw.strip())
        return str(p if p.is_absolute() else base_dir / p)

    kw = {}
    file_kind = get("experiment", "kind", str.strip)
    if kind is not None and file_kind is not None and file_kind != kind:
        raise ConfigError(f"config is for {file_kind!r} but the command runs {kind!r}")
    kw["kind"] = kind or file_kind or "area_law"
    spec = [
        ("graph", "family", str.strip), ("graph", "dimension", int), ("graph", "branching", int),
        ("graph", "regular_root", boolean), ("graph", "edge_file", path_of), ("graph", "sizes", _ints),
        ("region", "radius", int), ("region", "sites", _ints), ("region", "complement", boolean),
        ("model", "m", float), ("model", "lam", float), ("model", "g", float),
        ("disorder", "distribution", str.strip), ("disorder", "k_max", float), ("disorder", "table", path_of),
        ("thermal", "betas", _floats), ("thermal", "ground", boolean),
        ("correlator", "max_distance", int),
        ("run", "samples", int), ("run", "seed", int), ("run", "out", str.strip), ("run", "workers", int),
    ]
    for section, key, conv in spec:
        val = get(section, key, conv)
        if val is not None:
            kw[key] = val
    if kw.get("table"):
        try:
            tab = dis.load_density_table(kw["table"], kw.get("k_max"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read density table: {exc}") from None
        kw["_table_data"] = (tab.edges, tab.density)
        kw.setdefault("k_max", tab.k_max)
    try:
        return ExperimentConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load(path, kind: Optional[str] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse(text, path.parent, kind)
