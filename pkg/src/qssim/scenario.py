"""Scenario files: a flat key=value format (TOML-compatible subset).

Example::

    # collusion run
    attack = "wang"
    n_agents = 3
    rounds = 2000
    seed = 7

Unknown keys are rejected, values are range-checked with the offending key
named, and emit/parse round-trips are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .adversaries import AttackKind
from .protocol import ProtocolConfig


class ScenarioError(ValueError):
    """Malformed or out-of-range scenario text."""


@dataclass(frozen=True)
class Scenario:
    protocol: ProtocolConfig
    attack: AttackKind = AttackKind.NONE
    p_legal: float = 0.5
    alpha: float = 0.01
    replicates: int = 1
    output_path: str = "out"

    def validate(self) -> None:
        try:
            self.protocol.validate()
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        if not 0.0 <= self.p_legal <= 1.0:
            raise ScenarioError(f"p_legal must be in [0, 1], got {self.p_legal}")
        if not 0.0 < self.alpha < 1.0:
            raise ScenarioError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.replicates < 1:
            raise ScenarioError(f"replicates must be >= 1, got {self.replicates}")

    @property
    def scenario_id(self) -> str:
        p = self.protocol
        return f"{self.attack.value}-n{p.n_agents}-r{p.rounds}"


_INT_KEYS = {"n_agents", "rounds", "seed", "replicates"}
_FLOAT_KEYS = {"p_control", "p_hadamard", "p_legal", "alpha"}
_STR_KEYS = {"attack", "output_path"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS
_REQUIRED = {"n_agents", "rounds", "seed"}


def _parse_value(key: str, raw: str, lineno: int):
    raw = raw.strip()
    if not raw:
        raise ScenarioError(f"line {lineno}: empty value for {key}")
    if key in _STR_KEYS:
        if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
            return raw[1:-1]
        if raw.replace("_", "").isalnum():
            return raw
        raise ScenarioError(f"line {lineno}: {key} needs a quoted string, got {raw}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ScenarioError(f"line {lineno}: {key} needs an integer, got {raw}") from None
    try:
        return float(raw)
    except ValueError:
        raise ScenarioError(f"line {lineno}: {key} needs a number, got {raw}") from None


def parse_scenario(text: str) -> Scenario:
    """Parse and validate scenario text; defaults fill whatever is omitted."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ScenarioError(f"line {lineno}: expected key = value, got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ScenarioError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, lineno)

    missing = _REQUIRED - values.keys()
    if missing:
        raise ScenarioError(f"missing required keys: {', '.join(sorted(missing))}")

    attack_raw = values.get("attack", "none")
    try:
        attack = AttackKind(attack_raw)
    except ValueError:
        valid = ", ".join(k.value for k in AttackKind)
        raise ScenarioError(f"attack must be one of {valid}, got {attack_raw!r}") from None

    protocol = ProtocolConfig(
        n_agents=values["n_agents"],
        rounds=values["rounds"],
        seed=values["seed"],
        p_control=values.get("p_control", 0.5),
        p_hadamard=values.get("p_hadamard", 0.5),
    )
    scenario = Scenario(
        protocol=protocol,
        attack=attack,
        p_legal=values.get("p_legal", 0.5),
        alpha=values.get("alpha", 0.01),
        replicates=values.get("replicates", 1),
        output_path=values.get("output_path", "out"),
    )
    scenario.validate()
    return scenario


def emit_scenario(s: Scenario) -> str:
    """Canonical text that parses back to an equal Scenario."""
    p = s.protocol
    lines = [
        f"n_agents = {p.n_agents}",
        f"rounds = {p.rounds}",
        f"seed = {p.seed}",
        f"p_control = {p.p_control}",
        f"p_hadamard = {p.p_hadamard}",
        f'attack = "{s.attack.value}"',
        f"p_legal = {s.p_legal}",
        f"alpha = {s.alpha}",
        f"replicates = {s.replicates}",
        f'output_path = "{s.output_path}"',
    ]
    return "\n".join(lines) + "\n"


def with_key(s: Scenario, key: str, raw: str) -> Scenario:
    """Scenario with one key replaced by a raw text value (sweep support)."""
    if key not in _ALL_KEYS:
        raise ScenarioError(f"unknown key {key!r}")
    value = _parse_value(key, raw, 0)
    if key in ("n_agents", "rounds", "seed", "p_control", "p_hadamard"):
        new = replace(s, protocol=replace(s.protocol, **{key: value}))
    elif key == "attack":
        try:
            new = replace(s, attack=AttackKind(value))
        except ValueError:
            valid = ", ".join(k.value for k in AttackKind)
            raise ScenarioError(f"attack must be one of {valid}, got {value!r}") from None
    else:
        new = replace(s, **{key: value})
    new.validate()
    return new
