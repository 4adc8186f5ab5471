from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

from wooley.decider import DEFAULT_NODE_BUDGET, SearchConfig, SearchMode


BUDGET_ENV = "WOOLEY_BUDGET"


@dataclass(frozen=True)
class SearchSettings:
    node_budget: int = DEFAULT_NODE_BUDGET
    mode: str = "complete"  # complete|heuristic
    # Heuristic restarts 1.. shuffle with random.Random(seed + restart).
    seed: int = 0
    restarts: int = 4
    # 0 = no override; a smaller bound than the forced one makes runs incomplete.
    max_factors: int = 0
    # Search nodes go to the DEBUG log.
    transcript: bool = False

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ValueError(f"node_budget must be positive, got {self.node_budget}")
        if self.mode not in {m.value for m in SearchMode}:
            raise ValueError(f"unknown search mode: {self.mode!r}")
        if self.max_factors < 0:
            raise ValueError(f"max_factors must be >= 0, got {self.max_factors}")


@dataclass(frozen=True)
class SurveySettings:
    workers: int = 0  # 0 = os.cpu_count()
    # Node budget for the bounded probes of nonfree.
    probe_budget: int = 200_000
    use_known: bool = True


@dataclass(frozen=True)
class OutputSettings:
    json: bool = False
    max_exp: int = 16
    limit: int = 64
    max_steps: int = 100_000


@dataclass(frozen=True)
class AppConfig:
    search: SearchSettings = SearchSettings()
    survey: SurveySettings = SurveySettings()
    output: OutputSettings = OutputSettings()

    def search_config(self) -> SearchConfig:
        s = self.search
        return SearchConfig(
            node_budget=s.node_budget,
            max_factors_override=s.max_factors or None,
            mode=SearchMode(s.mode),
            emit_transcript=s.transcript,
            seed=s.seed,
            restarts=s.restarts,
        )


def _deep_get(d: dict[str, Any], path: list[str], default: Any) -> Any:
    cur: Any = d
    for p in path:
        if not isinstance(cur, dict) or p not in cur:
            return default
        cur = cur[p]
    return cur


def _read_raw(p: Path) -> dict[str, Any]:
    ext = p.suffix.lower()
    if ext in (".toml",):
        import tomllib

        return tomllib.loads(p.read_bytes().decode("utf-8"))
    if ext in (".yaml", ".yml"):
        try:
            import yaml  # type: ignore
        except Exception as e:  # pragma: no cover
            raise RuntimeError(
                "YAML config requested but PyYAML is not installed. "
                "Install with: pip install -e '.[yaml]'"
            ) from e
        return yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    raise ValueError(f"Unsupported config extension: {ext}")


def config_from_dict(raw: dict[str, Any]) -> AppConfig:
    search, survey, output = SearchSettings(), SurveySettings(), OutputSettings()
    return AppConfig(
        search=SearchSettings(
            node_budget=int(_deep_get(raw, ["search", "node_budget"], search.node_budget)),
            mode=str(_deep_get(raw, ["search", "mode"], search.mode)).lower(),
            seed=int(_deep_get(raw, ["search", "seed"], search.seed)),
            restarts=int(_deep_get(raw, ["search", "restarts"], search.restarts)),
            max_factors=int(_deep_get(raw, ["search", "max_factors"], search.max_factors)),
            transcript=bool(_deep_get(raw, ["search", "transcript"], search.transcript)),
        ),
        survey=SurveySettings(
            workers=int(_deep_get(raw, ["survey", "workers"], survey.workers)),
            probe_budget=int(_deep_get(raw, ["survey", "probe_budget"], survey.probe_budget)),
            use_known=bool(_deep_get(raw, ["survey", "use_known"], survey.use_known)),
        ),
        output=OutputSettings(
            json=bool(_deep_get(raw, ["output", "json"], output.json)),
            max_exp=int(_deep_get(raw, ["output", "max_exp"], output.max_exp)),
            limit=int(_deep_get(raw, ["output", "limit"], output.limit)),
            max_steps=int(_deep_get(raw, ["output", "max_steps"], output.max_steps)),
        ),
    )


def load_config(path: str | Path) -> AppConfig:
    """
    Load config from TOML or YAML (optional dependency).
    Missing keys fall back to the dataclass defaults.
    """
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"Config file not found: {p}")
    return config_from_dict(_read_raw(p))


def apply_env(config: AppConfig, environ: Mapping[str, str] | None = None) -> AppConfig:
    """WOOLEY_BUDGET overrides the node budget from defaults or the config file."""
    env = os.environ if environ is None else environ
    value = env.get(BUDGET_ENV)
    if value is None or not value.strip():
        return config
    try:
        budget = int(value)
    except ValueError as e:
        raise ValueError(f"{BUDGET_ENV} must be an integer, got {value!r}") from e
    return replace(config, search=replace(config.search, node_budget=budget))
