"""Plain-text scenario configuration: key=value lines, strict key checking.

No environment variables and no hidden defaults at run time: every run
resolves to an explicit key/value mapping that is embedded verbatim in the
output headers, so a table plus its header reproduces the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .finite import FiniteSizeParams
from .network import BasisStrategy, Family, NetworkConfig
from .noise import NoiseParams


class ConfigError(Exception):
    """Invalid configuration; carries `source` and `line` when known."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = ""
        if source is not None:
            prefix = source if line is None else f"{source}:{line}"
            prefix += ": "
        super().__init__(prefix + message)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_float(text: str) -> float:
    return float(text)

def _parse_int(text: str) -> int:
    return int(text, 10)

def _parse_str(text: str) -> str:
    return text.strip()


# key -> parser; presence here is what makes a key legal.
SCHEMA: dict[str, Callable[[str], object]] = {
    "network.N": _parse_int,
    "network.d_km": _parse_float,
    "network.d_A_km": _parse_float,
    "network.d_B_km": _parse_float,
    "noise.f_D": _parse_float,
    "memory.T2_s": _parse_float,
    "memory.Tp_s": _parse_float,
    "protocol.family": _parse_str,
    "protocol.memories": _parse_bool,
    "protocol.basis_strategy": _parse_str,
    "protocol.p_key": _parse_float,
    "finite.L": _parse_float,
    "finite.block_size": _parse_float,
    "finite.epsilon": _parse_float,
    "finite.eps_rob": _parse_float,
    "finite.eps_EC": _parse_float,
    "mc.samples": _parse_int,
    "mc.seed": _parse_int,
    "sweep.parameter": _parse_str,
    "sweep.from": _parse_float,
    "sweep.to": _parse_float,
    "sweep.steps": _parse_int,
    "sweep.log": _parse_bool,
    "output.path": _parse_str,
}

SWEEPABLE = (
    "network.d_km",
    "network.d_A_km",
    "network.d_B_km",
    "network.N",
    "noise.f_D",
    "protocol.p_key",
    "finite.L",
    "finite.block_size",
)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    log: bool


@dataclass(frozen=True)
class Scenario:
    network: NetworkConfig
    noise: NoiseParams
    families: tuple[Family, ...]
    memories: bool
    basis_strategy: BasisStrategy | None
    p_key: float
    finite: FiniteSizeParams | None
    mc_samples: int
    seed: int
    sweep: SweepSpec | None
    output_path: str | None
    resolved: dict[str, str]


def parse_kv_text(
    text: str, source: str, into: dict[str, tuple[str, str, int]] | None = None
) -> dict[str, tuple[str, str, int]]:
    """Parse `key = value` lines; '#' starts a comment.  Returns
    key -> (value, source, line).  Unknown and duplicate keys are errors."""
    items = {} if into is None else into
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw_line.strip()!r}", source, line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}", source, line_no)
        if key in items:
            raise ConfigError(f"duplicate configuration key {key!r}", source, line_no)
        if not value:
            raise ConfigError(f"empty value for {key!r}", source, line_no)
        items[key] = (value, source, line_no)
    return items


def load_config(
    path: str | None, overrides: Iterable[str] = ()
) -> dict[str, tuple[str, str, int]]:
    """Read an optional config file, then apply `key=value` override strings
    (later sources replace earlier keys)."""
    items: dict[str, tuple[str, str, int]] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}", path) from exc
        parse_kv_text(text, path, items)
    for index, override in enumerate(overrides, start=1):
        parsed = parse_kv_text(override, f"--set[{index}]")
        for key, value in parsed.items():
            items[key] = value
    return items


def _value(
    items: dict[str, tuple[str, str, int]], key: str, default=None
):
    if key not in items:
        return default
    text, source, line = items[key]
    try:
        return SCHEMA[key](text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key}: {exc}", source, line) from exc


def _fail_on(items, key, message):
    if key in items:
        _, source, line = items[key]
        raise ConfigError(message, source, line)
    raise ConfigError(message)


def resolve_scenario(items: dict[str, tuple[str, str, int]]) -> Scenario:
    """Validate a parsed key/value mapping into a runnable scenario."""
    try:
        return _resolve(items)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve(items: dict[str, tuple[str, str, int]]) -> Scenario:
    n_parties = _value(items, "network.N", 3)
    d_sym = _value(items, "network.d_km")
    if d_sym is not None:
        if "network.d_A_km" in items or "network.d_B_km" in items:
            _fail_on(items, "network.d_km", "network.d_km excludes network.d_A_km/d_B_km")
        network = NetworkConfig.make_symmetric(n_parties, d_sym)
    else:
        d_a = _value(items, "network.d_A_km", 50.0)
        d_b = _value(items, "network.d_B_km", 4.0)
        network = NetworkConfig(n_parties, d_a, d_b)
    noise = NoiseParams(
        f_depol=_value(items, "noise.f_D", 0.01),
        t2_s=_value(items, "memory.T2_s", 1.0),
        prep_time_s=_value(items, "memory.Tp_s", 2e-6),
    )
    family_text = _value(items, "protocol.family", "mQSS")
    try:
        families = tuple(Family(part.strip()) for part in family_text.split(","))
    except ValueError:
        _fail_on(items, "protocol.family", f"unknown protocol family in {family_text!r}")
    strategy_text = _value(items, "protocol.basis_strategy")
    strategy = None
    if strategy_text is not None:
        try:
            strategy = BasisStrategy(strategy_text)
        except ValueError:
            _fail_on(items, "protocol.basis_strategy", f"unknown strategy {strategy_text!r}")
    if strategy is BasisStrategy.PRESHARED and Family.MQSS in families:
        _fail_on(items, "protocol.basis_strategy", "mQSS requires active basis switching")
    p_key = _value(items, "protocol.p_key", 1.0)
    finite = None
    rounds = _value(items, "finite.L")
    block = _value(items, "finite.block_size")
    if rounds is not None or block is not None:
        if rounds is not None and block is not None:
            _fail_on(items, "finite.L", "set only one of finite.L and finite.block_size")
        finite = FiniteSizeParams(
            epsilon=_value(items, "finite.epsilon", 1e-10),
            rounds=rounds,
            block_size=block,
            eps_rob=_value(items, "finite.eps_rob"),
            eps_ec=_value(items, "finite.eps_EC"),
            mc_samples=_value(items, "mc.samples", 1000),
            seed=_value(items, "mc.seed", 1),
        )
    elif any(key.startswith("finite.") for key in items):
        _fail_on(
            items,
            "finite.epsilon",
            "finite.* keys need finite.L or finite.block_size",
        )
    sweep = None
    if "sweep.parameter" in items:
        parameter = _value(items, "sweep.parameter")
        if parameter not in SWEEPABLE:
            _fail_on(items, "sweep.parameter", f"cannot sweep {parameter!r}")
        for required in ("sweep.from", "sweep.to", "sweep.steps"):
            if required not in items:
                _fail_on(items, "sweep.parameter", f"sweep needs {required}")
        steps = _value(items, "sweep.steps")
        if steps < 2:
            _fail_on(items, "sweep.steps", "sweep.steps must be >= 2")
        sweep = SweepSpec(
            parameter,
            _value(items, "sweep.from"),
            _value(items, "sweep.to"),
            steps,
            _value(items, "sweep.log", False),
        )
    elif any(key.startswith("sweep.") for key in items):
        _fail_on(items, "sweep.from", "sweep.* keys need sweep.parameter")
    return Scenario(
        network=network,
        noise=noise,
        families=families,
        memories=_value(items, "protocol.memories", False),
        basis_strategy=strategy,
        p_key=p_key,
        finite=finite,
        mc_samples=_value(items, "mc.samples", 1000),
        seed=_value(items, "mc.seed", 1),
        sweep=sweep,
        output_path=_value(items, "output.path"),
        resolved={key: items[key][0] for key in sorted(items)},
    )
