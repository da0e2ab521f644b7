"""Scenario definition, JSON ingestion and assumption checks."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from .numerics import EpsError, format_rational, parse_rational

__all__ = [
    "Scenario",
    "ScenarioError",
    "ValidationReport",
    "validate_scenario",
    "load_scenario",
    "scenario_from_dict",
    "scenario_to_dict",
]


class ScenarioError(ValueError):
    """Input that cannot be turned into a Scenario at all."""


@dataclass(frozen=True)
class Scenario:
    """A two-sender game with partially informed senders.

    Actions are identified with states; the receiver is paid 1 for matching
    the state.  ``partition1``/``partition2`` map block names to the states in
    the block.  Utilities are keyed ``(state, action)``; missing entries are 0.
    """

    states: tuple
    prior: dict
    partition1: dict
    partition2: dict
    utility_s1: dict
    utility_s2: dict
    action_only: bool = True
    belief_dependent_tiebreak: bool = False
    name: str = ""
    reference: dict = field(default_factory=dict, compare=False)

    # -- index views used by the solvers ----------------------------------
    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    @cached_property
    def n(self) -> int:
        return len(self.states)

    @cached_property
    def p(self) -> tuple:
        return tuple(Fraction(self.prior.get(s, 0)) for s in self.states)

    @cached_property
    def support(self) -> tuple:
        return tuple(i for i, q in enumerate(self.p) if q > 0)

    @cached_property
    def blocks1(self) -> tuple:
        return tuple(self.partition1)

    @cached_property
    def blocks2(self) -> tuple:
        return tuple(self.partition2)

    @cached_property
    def block_of1(self) -> tuple:
        return _block_lookup(self.states, self.partition1)

    @cached_property
    def block_of2(self) -> tuple:
        return _block_lookup(self.states, self.partition2)

    @cached_property
    def u1(self) -> tuple:
        return _utility_matrix(self.states, self.utility_s1)

    @cached_property
    def u2(self) -> tuple:
        return _utility_matrix(self.states, self.utility_s2)

    def info1(self, state: str) -> str:
        return self.block_of1[self.index[state]]

    def info2(self, state: str) -> str:
        return self.block_of2[self.index[state]]

    def relabeled(self, mapping: dict) -> "Scenario":
        """Apply a state bijection consistently to every field."""
        m = dict(mapping)
        return Scenario(
            states=tuple(m[s] for s in self.states),
            prior={m[s]: v for s, v in self.prior.items()},
            partition1={k: tuple(m[s] for s in v) for k, v in self.partition1.items()},
            partition2={k: tuple(m[s] for s in v) for k, v in self.partition2.items()},
            utility_s1={(m[t], m[a]): v for (t, a), v in self.utility_s1.items()},
            utility_s2={(m[t], m[a]): v for (t, a), v in self.utility_s2.items()},
            action_only=self.action_only,
            belief_dependent_tiebreak=self.belief_dependent_tiebreak,
            name=self.name,
            reference=self.reference,
        )

    def __hash__(self):
        return id(self)


def _block_lookup(states, partition):
    where = {}
    for name, members in partition.items():
        for s in members:
            where.setdefault(s, name)
    return tuple(where.get(s) for s in states)


def _utility_matrix(states, table):
    return tuple(
        tuple(Fraction(table.get((t, a), 0)) for a in states) for t in states
    )


@dataclass
class ValidationReport:
    valid: bool
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            "valid": self.valid,
            "violations": [{"assumption": a, "detail": d} for a, d in self.violations],
        }


def _is_partition(states, partition):
    seen = []
    for members in partition.values():
        seen.extend(members)
    return sorted(seen) == sorted(states) and len(seen) == len(set(seen))


def _refines(fine, coarse):
    """True when every block of ``fine`` sits inside one block of ``coarse``."""
    blocks = [set(v) for v in coarse.values()]
    return all(any(set(f) <= c for c in blocks) for f in fine.values())


def validate_scenario(s: Scenario) -> ValidationReport:
    v = []
    if not s.states:
        v.append(("input", "state list is empty"))
        return ValidationReport(False, v)
    if len(set(s.states)) != len(s.states):
        v.append(("input", "duplicate state identifiers"))
    extra = set(s.prior) - set(s.states)
    missing = set(s.states) - set(s.prior)
    if extra or missing:
        v.append(
            ("prior", f"prior keys do not match states (extra={sorted(extra)}, missing={sorted(missing)})")
        )
    if any(Fraction(q) < 0 for q in s.prior.values()):
        v.append(("prior", "negative prior entry"))
    total = sum((Fraction(q) for q in s.prior.values()), Fraction(0))
    if total != 1:
        v.append(("prior", f"prior sums to {format_rational(total)}, not 1"))

    ok_parts = True
    for label, part in (("partition1", s.partition1), ("partition2", s.partition2)):
        if not _is_partition(s.states, part):
            v.append(("partition", f"{label} is not a partition of the state list"))
            ok_parts = False
        if any(len(m) == 0 for m in part.values()):
            v.append(("partition", f"{label} has an empty block"))
            ok_parts = False

    n = len(s.states)
    if len(s.partition1) >= n:
        v.append(("A1", f"|partition1| = {len(s.partition1)} is not below |states| = {n}"))
    if len(s.partition2) >= n:
        v.append(("A1", f"|partition2| = {len(s.partition2)} is not below |states| = {n}"))

    if ok_parts:
        b1 = sorted(sorted(m) for m in s.partition1.values())
        b2 = sorted(sorted(m) for m in s.partition2.values())
        if b1 == b2:
            v.append(("A2", "both senders hold the same partition"))
        else:
            if _refines(s.partition1, s.partition2):
                v.append(("A3", "partition1 refines partition2 (sender 1 is more informed)"))
            if _refines(s.partition2, s.partition1):
                v.append(("A3", "partition2 refines partition1 (sender 2 is more informed)"))
        if not missing and not extra:
            support = {t for t in s.states if Fraction(s.prior[t]) > 0}
            for t in s.states:
                if t not in support:
                    continue
                b1m = next(set(m) for m in s.partition1.values() if t in m)
                b2m = next(set(m) for m in s.partition2.values() if t in m)
                cell = b1m & b2m & support
                if cell != {t}:
                    v.append(
                        ("A4", f"state {t} is not pinned down by both blocks (cell {sorted(cell)})")
                    )

    if not missing and not extra:
        support = [t for t in s.states if Fraction(s.prior[t]) > 0]
        for label, table in (("utility_s1", s.utility_s1), ("utility_s2", s.utility_s2)):
            for key in table:
                t, a = key
                if t not in s.states or a not in s.states:
                    v.append(("utility", f"{label} refers to unknown state/action {key}"))
            gaps = [(t, a) for t in support for a in support if (t, a) not in table]
            if gaps:
                v.append(("utility", f"{label} undefined on supported pairs, e.g. {gaps[0]}"))
    return ValidationReport(not v, v)


# -- JSON -----------------------------------------------------------------


def _parse_partition(raw, label):
    if isinstance(raw, dict):
        return {str(k): tuple(v) for k, v in raw.items()}
    if isinstance(raw, list):
        out = {}
        for block in raw:
            if not isinstance(block, list):
                raise ScenarioError(f"{label}: blocks must be arrays of state names")
            out[",".join(block)] = tuple(block)
        return out
    raise ScenarioError(f"{label} must be an array of arrays or an object")


def _parse_utility(raw, states, label):
    if not isinstance(raw, dict):
        raise ScenarioError(f"{label} must be an object")
    table = {}
    action_only = True
    for key, val in raw.items():
        try:
            q = parse_rational(val)
        except EpsError as exc:
            raise ScenarioError(f"{label}[{key}]: {exc}") from exc
        if "|" in key:
            action_only = False
            t, a = key.split("|", 1)
            table[(t, a)] = q
        else:
            for t in states:
                table[(t, key)] = q
    return table, action_only


def scenario_from_dict(d: dict) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("scenario document must be a JSON object")
    try:
        states = tuple(d["states"])
        prior_raw = d["prior"]
        p1 = _parse_partition(d["partition1"], "partition1")
        p2 = _parse_partition(d["partition2"], "partition2")
    except KeyError as exc:
        raise ScenarioError(f"missing field {exc.args[0]!r}") from exc
    if not isinstance(prior_raw, dict):
        raise ScenarioError("prior must be an object")
    prior = {}
    for k, val in prior_raw.items():
        try:
            prior[k] = parse_rational(val)
        except EpsError as exc:
            raise ScenarioError(f"prior[{k}]: {exc}") from exc
    u1, ao1 = _parse_utility(d.get("utility_s1", {}), states, "utility_s1")
    u2, ao2 = _parse_utility(d.get("utility_s2", {}), states, "utility_s2")
    return Scenario(
        states=states,
        prior=prior,
        partition1=p1,
        partition2=p2,
        utility_s1=u1,
        utility_s2=u2,
        action_only=ao1 and ao2,
        belief_dependent_tiebreak=bool(d.get("belief_dependent_tiebreak", False)),
        name=str(d.get("name", "")),
        reference=_parse_reference(d.get("reference_values", {})),
    )


def _parse_reference(raw):
    """Externally reported utility triples keyed by order, for discrepancy flags."""
    if not isinstance(raw, dict):
        raise ScenarioError("reference_values must be an object")
    out = {}
    for order, vals in raw.items():
        if not isinstance(vals, dict):
            raise ScenarioError("reference_values entries must be objects")
        try:
            out[order] = {k: parse_rational(v) for k, v in vals.items()}
        except EpsError as exc:
            raise ScenarioError(f"reference_values[{order}]: {exc}") from exc
    return out


def scenario_to_dict(s: Scenario) -> dict:
    def util(table):
        if s.action_only:
            return {a: format_rational(table.get((s.states[0], a), 0)) for a in s.states}
        return {f"{t}|{a}": format_rational(v) for (t, a), v in sorted(table.items())}

    return {
        "name": s.name,
        "states": list(s.states),
        "prior": {k: format_rational(v) for k, v in s.prior.items()},
        "partition1": {k: list(v) for k, v in s.partition1.items()},
        "partition2": {k: list(v) for k, v in s.partition2.items()},
        "utility_s1": util(s.utility_s1),
        "utility_s2": util(s.utility_s2),
        "belief_dependent_tiebreak": s.belief_dependent_tiebreak,
        **(
            {"reference_values": {o: {k: format_rational(v) for k, v in d.items()} for o, d in s.reference.items()}}
            if s.reference
            else {}
        ),
    }


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    return scenario_from_dict(doc)
