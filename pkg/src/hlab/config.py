"""Experiment configuration: a line-based INI file with per-module sections.

Example::

    [datasets]
    synthA = data/synthA.csv
    class_col.synthA = label     ; optional, default: last column

    [cv]
    repeats = 1
    folds = 3
    seed = 42

    [hardness]
    repeats = 2
    folds = 5
    learner.ib1.kind = knn       ; omit learner.* for the default set
    learner.ib1.k = 1

    [filter]
    tau = 0.75

    [boost]
    iterations = 10

    [curriculum]
    trigger = epochs:100         ; or "convergence"
    initial_ih = 0
    filtered_initial_ih = 0.5
    step = 0.1
    prune_between = true

    [methods]
    orig = plain:mlp
    ih75 = plain:mlp filtered
    ab   = adaboost:mlp
    cl75 = curriculum:mlp filtered

Method values are ``kind:base`` plus optional tokens: the flag
``filtered`` (apply the [filter] tau before training) and ``key=value``
overrides for the method's own parameters.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .curriculum import Schedule
from .ensemble import METHOD_KINDS
from .errors import ConfigError
from .learners import LearnerSpec, default_learner_set, learner_set_hash, validate_learner_set
from .util import content_hash

_BASE_SHORTHAND = {
    "mlp": ("mlp", "mlp"),
    "c45": ("c45-tree", "c45"),
    "knn": ("knn", "knn"),
    "nb": ("naive-bayes", "nb"),
    "per": ("perceptron", "per"),
    "rf": ("random-forest", "rf"),
    "stump": ("decision-stump", "stump"),
}


def coerce(value: str):
    """Best-effort typed view of a config value."""
    text = value.strip()
    lowered = text.lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def parse_trigger(text: str) -> tuple[str, int]:
    """"epochs:<n>" or "convergence" -> (trigger, n)."""
    text = text.strip()
    if text == "convergence":
        return "convergence", 0
    if text.startswith("epochs:"):
        try:
            n = int(text.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad trigger {text!r}") from None
        if n < 1:
            raise ConfigError("trigger epoch count must be >= 1")
        return "every_n_epochs", n
    raise ConfigError(f"bad trigger {text!r}; use 'epochs:<n>' or 'convergence'")


@dataclass(frozen=True)
class MethodSpec:
    """One experiment method: a kind, a base learner, optional filtering."""

    name: str
    kind: str
    base: str
    filtered: bool = False
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise ConfigError(
                f"unknown method kind {self.kind!r}; expected one of {METHOD_KINDS}"
            )

    def render(self) -> str:
        tokens = [f"{self.kind}:{self.base}"]
        if self.filtered:
            tokens.append("filtered")
        tokens.extend(f"{k}={v}" for k, v in sorted(self.params.items()))
        return " ".join(tokens)


def parse_method(name: str, value: str) -> MethodSpec:
    tokens = value.split()
    if not tokens or ":" not in tokens[0]:
        raise ConfigError(f"method {name!r} must start with '<kind>:<base>'")
    kind, _, base = tokens[0].partition(":")
    filtered = False
    params = {}
    for token in tokens[1:]:
        if token == "filtered":
            filtered = True
        elif "=" in token:
            key, _, raw = token.partition("=")
            params[key] = coerce(raw)
        else:
            raise ConfigError(f"method {name!r}: unexpected token {token!r}")
    return MethodSpec(name=name, kind=kind, base=base, filtered=filtered, params=params)


def default_methods(base: str = "mlp") -> list[MethodSpec]:
    """The standard comparison grid: orig, filtered, both boosters,
    curriculum, and the three filtered compositions."""
    return [
        MethodSpec("orig", "plain", base),
        MethodSpec("ih75", "plain", base, filtered=True),
        MethodSpec("ab", "adaboost", base),
        MethodSpec("mb", "multiboost", base),
        MethodSpec("cl", "curriculum", base),
        MethodSpec("ab75", "adaboost", base, filtered=True),
        MethodSpec("mb75", "multiboost", base, filtered=True),
        MethodSpec("cl75", "curriculum", base, filtered=True),
    ]


def parse_learner_entries(items) -> list[LearnerSpec]:
    """``learner.<name>.kind`` / ``learner.<name>.<param>`` entries."""
    grouped: dict[str, dict] = {}
    order: list[str] = []
    for key, value in items:
        if not key.startswith("learner."):
            continue
        parts = key.split(".")
        if len(parts) != 3:
            raise ConfigError(f"bad learner entry {key!r}")
        _, name, param = parts
        if name not in grouped:
            grouped[name] = {}
            order.append(name)
        grouped[name][param] = value
    specs = []
    for name in order:
        entry = dict(grouped[name])
        kind = entry.pop("kind", None)
        if kind is None:
            raise ConfigError(f"learner {name!r} is missing its kind")
        specs.append(
            LearnerSpec(kind=str(kind), name=name,
                        params={k: coerce(v) for k, v in entry.items()})
        )
    return specs


@dataclass
class ExperimentConfig:
    datasets: dict[str, str]  # name -> path
    class_cols: dict[str, str | None]
    cv_repeats: int
    cv_folds: int
    master_seed: int
    ih_repeats: int
    ih_folds: int
    learners: list[LearnerSpec]
    tau: float
    boost_iterations: int
    curriculum_trigger: str
    curriculum_n: int
    curriculum_initial_ih: float
    curriculum_filtered_initial_ih: float
    curriculum_step: float
    prune_between: bool
    methods: list[MethodSpec]
    output_dir: str | None = None

    def resolve_base(self, base: str) -> LearnerSpec:
        for spec in self.learners:
            if spec.name == base:
                return spec
        if base in _BASE_SHORTHAND:
            kind, name = _BASE_SHORTHAND[base]
            return LearnerSpec(kind, name)
        raise ConfigError(
            f"method base {base!r} is neither a configured learner nor a "
            f"shorthand ({sorted(_BASE_SHORTHAND)})"
        )

    def schedule_for(self, method: MethodSpec) -> Schedule:
        trigger = self.curriculum_trigger
        n = self.curriculum_n
        if "trigger" in method.params:
            trigger, n = parse_trigger(str(method.params["trigger"]))
        default_initial = (
            self.curriculum_filtered_initial_ih
            if method.filtered
            else self.curriculum_initial_ih
        )
        initial = float(method.params.get("initial_ih", default_initial))
        step = float(method.params.get("step", self.curriculum_step))
        return Schedule(initial_ih=initial, step=step, trigger=trigger, n=max(n, 1))

    def validate(self) -> None:
        if not self.datasets:
            raise ConfigError("no datasets configured")
        for name, path in self.datasets.items():
            if not os.path.exists(path):
                raise ConfigError(f"dataset {name!r}: path {path!r} does not exist")
        if not self.methods:
            raise ConfigError("no methods configured")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ConfigError("method names must be unique")
        validate_learner_set(self.learners)
        for method in self.methods:
            self.resolve_base(method.base)
            if method.kind == "curriculum":
                self.schedule_for(method)
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError("filter tau must lie in (0, 1]")
        if self.cv_folds < 2 or self.ih_folds < 2:
            raise ConfigError("fold counts must be >= 2")
        if self.cv_repeats < 1 or self.ih_repeats < 1:
            raise ConfigError("repeat counts must be >= 1")

    def config_hash(self) -> str:
        """Digest of everything that affects results (dataset *contents*
        included, output locations excluded)."""
        dataset_digests = []
        for name in sorted(self.datasets):
            with open(self.datasets[name], "rb") as fh:
                payload = fh.read()
            dataset_digests.append(
                content_hash(name, payload, self.class_cols.get(name) or "")
            )
        return content_hash(
            *dataset_digests,
            learner_set_hash(self.learners),
            self.cv_repeats,
            self.cv_folds,
            self.master_seed,
            self.ih_repeats,
            self.ih_folds,
            self.tau,
            self.boost_iterations,
            self.curriculum_trigger,
            self.curriculum_n,
            self.curriculum_initial_ih,
            self.curriculum_filtered_initial_ih,
            self.curriculum_step,
            self.prune_between,
            *[m.name + "=" + m.render() for m in self.methods],
        )


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keep dataset/learner/method name case
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file {path!r} not found")

    datasets = {}
    class_cols = {}
    if parser.has_section("datasets"):
        for key, value in parser.items("datasets"):
            if key.startswith("class_col."):
                class_cols[key.split(".", 1)[1]] = value.strip()
            else:
                datasets[key] = _relative_to(path, value.strip())

    cv = parser["cv"] if parser.has_section("cv") else {}
    hardness = parser["hardness"] if parser.has_section("hardness") else {}
    filt = parser["filter"] if parser.has_section("filter") else {}
    boost = parser["boost"] if parser.has_section("boost") else {}
    curr = parser["curriculum"] if parser.has_section("curriculum") else {}

    learners = parse_learner_entries(hardness.items() if hardness else [])
    if not learners:
        learners = default_learner_set()

    methods = []
    if parser.has_section("methods"):
        for name, value in parser.items("methods"):
            methods.append(parse_method(name, value))
    if not methods:
        methods = default_methods()

    trigger, n = parse_trigger(str(curr.get("trigger", "epochs:100")))

    cfg = ExperimentConfig(
        datasets=datasets,
        class_cols=class_cols,
        cv_repeats=int(cv.get("repeats", 5)),
        cv_folds=int(cv.get("folds", 10)),
        master_seed=int(cv.get("seed", 0)),
        ih_repeats=int(hardness.get("repeats", cv.get("repeats", 5))),
        ih_folds=int(hardness.get("folds", cv.get("folds", 10))),
        learners=learners,
        tau=float(filt.get("tau", 0.75)),
        boost_iterations=int(boost.get("iterations", 10)),
        curriculum_trigger=trigger,
        curriculum_n=max(n, 1),
        curriculum_initial_ih=float(curr.get("initial_ih", 0.0)),
        curriculum_filtered_initial_ih=float(curr.get("filtered_initial_ih", 0.5)),
        curriculum_step=float(curr.get("step", 0.1)),
        prune_between=str(curr.get("prune_between", "true")).strip().lower()
        in ("true", "yes", "on", "1"),
        methods=methods,
        output_dir=parser.get("output", "dir", fallback=None),
    )
    cfg.validate()
    return cfg


def _relative_to(config_path, value):
    if os.path.isabs(value):
        return value
    return os.path.normpath(os.path.join(os.path.dirname(os.path.abspath(config_path)), value))
