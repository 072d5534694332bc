from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, TypeVar

from soficlab.core.groups import Group, IntegerGroup, group_from_spec
from soficlab.core.microstates import (
    DEFAULT_BUDGET,
    Microstate,
    MicrostateSampler,
    sampler_from_spec,
)
from soficlab.core.microstates.entropy import MAX_EXACT_LABELINGS
from soficlab.core.models import FiniteModel, SoficApproximationSeq, model_from_spec
from soficlab.core.oracles import (
    Alphabet,
    CylinderOracle,
    ObservableTower,
    SymbolMap,
    WindowDistribution,
    oracle_from_spec,
)
from soficlab.core.transport import Criterion

logger = logging.getLogger(__name__)

T = TypeVar("T")

SEED_ENV = "SOFICLAB_SEED"

# fields each op cannot run without; "goodness" needs a model or a sequence
REQUIRED: dict[str, tuple[str, ...]] = {
    "goodness": (),
    "distance": ("distributions",),
    "fit": ("model", "oracle", "microstate", "m"),
    "search": ("model", "oracle", "m", "epsilon"),
    "entropy": ("model", "oracle", "m", "epsilon"),
    "trace": ("sequence", "oracle", "m", "epsilon"),
    "dq": ("model", "sampler", "oracle", "m", "epsilon", "pairs"),
    "product_check": ("microstates", "m"),
    "witness": ("oracle", "source", "m", "epsilon"),
    "power": ("sequence", "oracle", "n_max", "m", "epsilon"),
    "sofic_witness": ("sequence", "oracle", "k", "m"),
    "diagonal": ("tower", "oracles", "sequence", "m"),
}
OPS = frozenset(REQUIRED)
SEEDED_OPS = frozenset({"search", "trace", "dq", "power", "sofic_witness", "diagonal"})

FIELDS = frozenset(
    {
        "op",
        "group",
        "model",
        "sequence",
        "oracle",
        "source",
        "oracles",
        "distributions",
        "microstate",
        "microstates",
        "sampler",
        "tower",
        "k",
        "k_max",
        "m",
        "epsilon",
        "epsilons",
        "budget",
        "pairs",
        "seed",
        "mode",
        "samples",
        "criterion",
        "window",
        "n_max",
    }
)


class ConfigError(ValueError):
    """An invalid experiment config, naming the offending field path."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


def _wrap(path: str, build: Callable[[], T]) -> T:
    try:
        return build()
    except ConfigError:
        raise
    except KeyError as e:
        raise ConfigError(path, str(e.args[0]) if e.args else "missing key") from None
    except (ValueError, TypeError) as e:
        raise ConfigError(path, str(e)) from None


def _integer(data: Mapping[str, Any], name: str, minimum: int) -> int | None:
    value = data.get(name)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(name, f"expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(name, f"must be at least {minimum}, got {value}")
    return value


def _number(data: Mapping[str, Any], name: str) -> float | None:
    value = data.get(name)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if value <= 0:
        raise ConfigError(name, f"must be positive, got {value}")
    return float(value)


def _resolve_seed(data: Mapping[str, Any], env: Mapping[str, str]) -> int | None:
    seed = _integer(data, "seed", 0)
    if seed is not None:
        return seed
    text = env.get(SEED_ENV)
    if text is None or not text.strip():
        return None
    try:
        seed = int(text)
    except ValueError:
        raise ConfigError("seed", f"{SEED_ENV}={text!r} is not an integer") from None
    if seed < 0:
        raise ConfigError("seed", f"{SEED_ENV} must be nonnegative, got {seed}")
    return seed


@dataclass
class ExperimentConfig:
    """A parsed experiment config.

    Specs of groups, models, oracles and samplers stay JSON-shaped here;
    `build` turns them into library objects.
    """

    op: str
    group: dict[str, Any] | None = None
    model: dict[str, Any] | None = None
    sequence: list[dict[str, Any]] | None = None
    oracle: dict[str, Any] | None = None
    source: dict[str, Any] | None = None
    oracles: list[dict[str, Any]] | None = None
    distributions: list[dict[str, Any]] | None = None
    microstate: str | list[str] | None = None
    microstates: list[dict[str, Any]] | None = None
    sampler: dict[str, Any] | None = None
    tower: dict[str, Any] | None = None
    k: int | None = None
    k_max: int | None = None
    m: int | None = None
    epsilon: float | None = None
    epsilons: list[float] | None = None
    budget: int | None = None
    pairs: int | None = None
    seed: int | None = None
    mode: str = "exact"
    samples: int = 100_000
    criterion: Criterion = Criterion.WINDOW
    window: int = 1
    n_max: int | None = None
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    @classmethod
    def from_dict(
        cls, data: Mapping[str, Any], env: Mapping[str, str] | None = None
    ) -> ExperimentConfig:
        """Parse and check a config mapping.

        Args:
            data (Mapping[str, Any]): the decoded JSON config.
            env (Mapping[str, str] | None, optional): environment used for
                the seed fallback. Defaults to os.environ.

        Raises:
            ConfigError: for unknown fields, bad values, a missing required
                field or a missing seed on a randomized op.

        Returns:
            ExperimentConfig: the parsed config.
        """
        if not isinstance(data, Mapping):
            raise ConfigError("<root>", "config must be a JSON object")
        unknown = sorted(set(data) - FIELDS)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        op = data.get("op")
        if op not in OPS:
            raise ConfigError("op", f"expected one of {sorted(OPS)}, got {op!r}")
        for name in REQUIRED[op]:
            if data.get(name) is None:
                raise ConfigError(name, f"required by op {op!r}")

        mode = data.get("mode", "exact")
        if mode not in ("exact", "montecarlo"):
            raise ConfigError("mode", f"expected 'exact' or 'montecarlo', got {mode!r}")
        try:
            criterion = Criterion(data.get("criterion", Criterion.WINDOW.value))
        except ValueError:
            raise ConfigError(
                "criterion", f"expected 'window' or 'upper', got {data.get('criterion')!r}"
            ) from None

        epsilons = data.get("epsilons")
        if epsilons is not None:
            if not isinstance(epsilons, list) or not all(
                isinstance(e, (int, float)) and not isinstance(e, bool) and e > 0
                for e in epsilons
            ):
                raise ConfigError("epsilons", "expected a list of positive numbers")
            epsilons = [float(e) for e in epsilons]

        for name in ("sequence", "oracles", "distributions", "microstates"):
            value = data.get(name)
            if value is not None and (not isinstance(value, list) or not value):
                raise ConfigError(name, "expected a nonempty list")
        for name in ("group", "model", "oracle", "source", "sampler", "tower"):
            value = data.get(name)
            if value is not None and not isinstance(value, Mapping):
                raise ConfigError(name, "expected an object")

        seed = _resolve_seed(data, os.environ if env is None else env)
        randomized = op in SEEDED_OPS or (op == "entropy" and mode == "montecarlo")
        if randomized and seed is None:
            raise ConfigError("seed", f"op {op!r} is randomized and needs a seed (or {SEED_ENV})")

        config = cls(
            op=op,
            group=data.get("group"),
            model=data.get("model"),
            sequence=data.get("sequence"),
            oracle=data.get("oracle"),
            source=data.get("source"),
            oracles=data.get("oracles"),
            distributions=data.get("distributions"),
            microstate=data.get("microstate"),
            microstates=data.get("microstates"),
            sampler=data.get("sampler"),
            tower=data.get("tower"),
            k=_integer(data, "k", 1),
            k_max=_integer(data, "k_max", 1),
            m=_integer(data, "m", 1),
            epsilon=_number(data, "epsilon"),
            epsilons=epsilons,
            budget=_integer(data, "budget", 1),
            pairs=_integer(data, "pairs", 1),
            seed=seed,
            mode=mode,
            samples=_integer(data, "samples", 1) or 100_000,
            criterion=criterion,
            window=_integer(data, "window", 1) or 1,
            n_max=_integer(data, "n_max", 1),
            raw=dict(data),
        )
        if op == "goodness":
            if (config.model is None) == (config.sequence is None):
                raise ConfigError("model", "goodness needs exactly one of 'model' or 'sequence'")
            if config.model is not None and config.k is None:
                raise ConfigError("k", "required by op 'goodness' on a single model")
            if config.sequence is not None and config.k_max is None:
                raise ConfigError("k_max", "required by op 'goodness' on a sequence")
        return config

    def to_dict(self) -> dict[str, Any]:
        """The config echo: the input mapping with the resolved seed filled in."""
        echo = dict(self.raw)
        if self.seed is not None:
            echo["seed"] = self.seed
        return echo

    @property
    def budget_or_default(self) -> int:
        if self.budget is not None:
            return self.budget
        return 10_000 if self.op == "witness" else DEFAULT_BUDGET

    def warnings(self) -> list[str]:
        """Threshold warnings that do not stop a run."""
        out = []
        if self.m is not None:
            floor = 1.0 / (self.m + 1)
            for name, eps in [("epsilon", self.epsilon)] + [
                (f"epsilons[{i}]", e) for i, e in enumerate(self.epsilons or [])
            ]:
                if eps is not None and eps <= floor:
                    out.append(
                        f"{name}={eps:g} <= 1/(m+1)={floor:g}: the threshold is unattainable "
                        f"under the 'upper' criterion; raise m to at least {int(1 / eps)}"
                    )
        return out

    def build(self) -> Experiment:
        """Construct every referenced object without running the op.

        Raises:
            ConfigError: if a spec is invalid or the combination is unsupported.
        """
        explicit = _wrap("group", lambda: group_from_spec(self.group)) if self.group else None
        fallback = explicit or IntegerGroup()

        model = (
            _wrap("model", lambda: model_from_spec(self.model, fallback))
            if self.model is not None
            else None
        )
        models = [
            _wrap(f"sequence[{i}]", lambda spec=spec: model_from_spec(spec, fallback))
            for i, spec in enumerate(self.sequence or [])
        ]
        sequence = _wrap("sequence", lambda: SoficApproximationSeq(models)) if models else None

        group: Group = explicit or (
            model.group if model is not None else sequence.group if sequence else fallback
        )
        if model is not None and model.group != group:
            raise ConfigError("model", f"acts by {model.group}, the config group is {group}")
        if sequence is not None and sequence.group != group:
            raise ConfigError("sequence", f"acts by {sequence.group}, the config group is {group}")

        oracle = (
            _wrap("oracle", lambda: oracle_from_spec(self.oracle, group))
            if self.oracle is not None
            else None
        )
        source = (
            _wrap("source", lambda: oracle_from_spec(self.source, group))
            if self.source is not None
            else None
        )
        oracles = [
            _wrap(f"oracles[{i}]", lambda spec=spec: oracle_from_spec(spec, group))
            for i, spec in enumerate(self.oracles or [])
        ]
        specs = self.distributions or []
        shared = None
        if specs and not any(isinstance(s, Mapping) and "alphabet" in s for s in specs):
            shared = _wrap("distributions", lambda: WindowDistribution.shared_alphabet(specs))
        distributions = [
            _wrap(
                f"distributions[{i}]",
                lambda spec=spec: WindowDistribution.from_dict(spec, shared),
            )
            for i, spec in enumerate(specs)
        ]
        if self.op == "distance" and len(distributions) != 2:
            raise ConfigError("distributions", f"expected two distributions, got {len(distributions)}")

        microstate = None
        if self.microstate is not None and model is not None and oracle is not None:
            microstate = _wrap(
                "microstate", lambda: _labels(model, oracle.alphabet, self.microstate)
            )
        microstates = [
            _wrap(f"microstates[{i}]", lambda spec=spec: _microstate_from_spec(spec, fallback))
            for i, spec in enumerate(self.microstates or [])
        ]
        if self.op == "product_check" and len(microstates) != 2:
            raise ConfigError("microstates", f"expected two microstates, got {len(microstates)}")

        sampler = None
        if self.sampler is not None and oracle is not None:
            sampler = _wrap("sampler", lambda: sampler_from_spec(self.sampler, oracle.alphabet))

        tower = _wrap("tower", lambda: _tower_from_spec(self.tower)) if self.tower else None
        if self.op == "diagonal":
            if tower is None or sequence is None:
                raise ConfigError("tower", "diagonal needs a tower and a sequence")
            if not len(oracles) == len(sequence) == tower.levels:
                raise ConfigError(
                    "oracles",
                    f"need one oracle and one model per tower level ({tower.levels}), "
                    f"got {len(oracles)} and {len(sequence)}",
                )
            if self.epsilons is not None and len(self.epsilons) != tower.levels:
                raise ConfigError("epsilons", f"need one epsilon per tower level ({tower.levels})")
        if self.op == "entropy" and self.mode == "exact" and model is not None and oracle is not None:
            if oracle.alphabet.size**model.size > MAX_EXACT_LABELINGS:
                raise ConfigError(
                    "mode",
                    f"exact counting needs |A|^n <= 2^24, got {oracle.alphabet.size}^{model.size}",
                )

        return Experiment(
            config=self,
            group=group,
            model=model,
            sequence=sequence,
            oracle=oracle,
            source=source,
            oracles=oracles,
            distributions=distributions,
            microstate=microstate,
            microstates=microstates,
            sampler=sampler,
            tower=tower,
        )


def _labels(model: FiniteModel, alphabet: Alphabet, labels: str | list[str]) -> Microstate:
    if isinstance(labels, str):
        return Microstate(model, alphabet, alphabet.parse_pattern(labels))
    return Microstate(model, alphabet, alphabet.encode(labels))


def _microstate_from_spec(spec: Mapping[str, Any], group: Group) -> Microstate:
    """{"model": {...}, "alphabet": "ab", "labels": "abab"}."""
    for name in ("model", "alphabet", "labels"):
        if name not in spec:
            raise ValueError(f"microstate requires field {name!r}")
    model = model_from_spec(spec["model"], group)
    return _labels(model, Alphabet.of(spec["alphabet"]), spec["labels"])


def _tower_from_spec(spec: Mapping[str, Any]) -> ObservableTower:
    """{"alphabets": ["ab", "abcd"], "steps": [{"a": "a", "b": "a", "c": "b", "d": "b"}]}.

    steps[i] maps level i+2 onto level i+1.
    """
    if "alphabets" not in spec:
        raise ValueError("tower requires field 'alphabets'")
    alphabets = [Alphabet.of(a) for a in spec["alphabets"]]
    steps = spec.get("steps", [])
    if len(steps) != len(alphabets) - 1:
        raise ValueError(f"tower needs {len(alphabets) - 1} steps, got {len(steps)}")
    maps = [
        SymbolMap.from_dict(alphabets[i + 1], alphabets[i], step) for i, step in enumerate(steps)
    ]
    return ObservableTower.from_steps(alphabets, maps)


@dataclass
class Experiment:
    """A config with every referenced object built."""

    config: ExperimentConfig
    group: Group
    model: FiniteModel | None = None
    sequence: SoficApproximationSeq | None = None
    oracle: CylinderOracle | None = None
    source: CylinderOracle | None = None
    oracles: list[CylinderOracle] = field(default_factory=list)
    distributions: list[WindowDistribution] = field(default_factory=list)
    microstate: Microstate | None = None
    microstates: list[Microstate] = field(default_factory=list)
    sampler: MicrostateSampler | None = None
    tower: ObservableTower | None = None


def load_config(path: str | Path, env: Mapping[str, str] | None = None) -> ExperimentConfig:
    """Read and parse a JSON experiment config.

    Raises:
        ConfigError: if the file cannot be read, is not JSON or does not validate.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError("<file>", f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("<json>", f"line {e.lineno} column {e.colno}: {e.msg}") from None
    return ExperimentConfig.from_dict(data, env)
