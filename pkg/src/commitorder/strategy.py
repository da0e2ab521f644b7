"""Signalling commitments, signal relabelling and the permutation-free test."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .numerics import ONE, ZERO, Eps, EpsError, as_eps, format_eps, parse_eps

__all__ = [
    "Commitment1",
    "Commitment2",
    "CommitmentError",
    "PermutationWitness",
    "PermutationCheck",
    "permute_signals",
    "is_permutation_free",
    "truthful1",
    "truthful2",
    "silent1",
    "constant2",
    "load_commitment",
    "commitment_from_dict",
]


class CommitmentError(ValueError):
    pass


def _row_problems(row, where):
    out = []
    total = ZERO
    for sig, v in row.items():
        if v < 0:
            out.append(f"{where}: negative probability for {sig}")
        total = total + v
    if total != ONE:
        out.append(f"{where}: row sums to {format_eps(total)}")
    return out


@dataclass(frozen=True)
class Commitment1:
    """Sender 1's map from her information set to a distribution over signals."""

    signals: tuple
    kernel: dict  # block -> {signal: Eps}

    def prob(self, block, signal) -> Eps:
        return self.kernel.get(block, {}).get(signal, ZERO)

    def problems(self, s) -> list:
        out = []
        if len(self.signals) != len(set(self.signals)):
            out.append("duplicate S1 signals")
        if len(self.signals) > len(s.partition1):
            out.append(
                f"{len(self.signals)} S1 signals exceed |partition1| = {len(s.partition1)}"
            )
        for block in s.partition1:
            row = self.kernel.get(block)
            if row is None:
                out.append(f"missing row for information set {block}")
                continue
            if set(row) - set(self.signals):
                out.append(f"row {block} uses unknown signals")
            out.extend(_row_problems(row, f"row {block}"))
        return out

    def to_dict(self) -> dict:
        return {
            "signals": list(self.signals),
            "kernel": {
                b: {w: format_eps(v) for w, v in row.items()} for b, row in self.kernel.items()
            },
        }

    @property
    def has_tilt(self) -> bool:
        return any(not v.is_exact for row in self.kernel.values() for v in row.values())


@dataclass(frozen=True)
class Commitment2:
    """Sender 2's map from (her information set, S1's signal) to a distribution."""

    signals: tuple
    kernel: dict  # (block2, w1) -> {signal: Eps}

    def prob(self, block, w1, signal) -> Eps:
        return self.kernel.get((block, w1), {}).get(signal, ZERO)

    def problems(self, s, s1_signals) -> list:
        out = []
        if len(self.signals) != len(set(self.signals)):
            out.append("duplicate S2 signals")
        for block in s.partition2:
            for w1 in s1_signals:
                row = self.kernel.get((block, w1))
                if row is None:
                    out.append(f"missing row for ({block}, {w1})")
                    continue
                if set(row) - set(self.signals):
                    out.append(f"row ({block}, {w1}) uses unknown signals")
                out.extend(_row_problems(row, f"row ({block}, {w1})"))
        return out

    def depends_on_w1(self) -> bool:
        by_block = {}
        for (b, _), row in self.kernel.items():
            clean = {k: v for k, v in row.items() if v != 0}
            if b in by_block and by_block[b] != clean:
                return True
            by_block[b] = clean
        return False

    def to_dict(self) -> dict:
        nested = {}
        for (b, w1), row in self.kernel.items():
            nested.setdefault(b, {})[w1] = {w: format_eps(v) for w, v in row.items()}
        return {"signals": list(self.signals), "kernel": nested}

    @property
    def has_tilt(self) -> bool:
        return any(not v.is_exact for row in self.kernel.values() for v in row.values())


# -- constructors ---------------------------------------------------------


def truthful1(s) -> Commitment1:
    sigs = tuple(s.partition1)
    return Commitment1(sigs, {b: {b: ONE} for b in sigs})


def silent1(s, signal="silent") -> Commitment1:
    return Commitment1((signal,), {b: {signal: ONE} for b in s.partition1})


def truthful2(s, s1_signals) -> Commitment2:
    sigs = tuple(s.partition2)
    return Commitment2(sigs, {(b, w): {b: ONE} for b in sigs for w in s1_signals})


def constant2(rows: dict, signals, s1_signals) -> Commitment2:
    """Same row for every S1 signal: ``rows`` maps block2 -> {signal: prob}."""
    return Commitment2(
        tuple(signals),
        {(b, w): {k: as_eps(v) for k, v in row.items()} for b, row in rows.items() for w in s1_signals},
    )


# -- JSON -----------------------------------------------------------------


def _parse_row(raw, where):
    if not isinstance(raw, dict):
        raise CommitmentError(f"{where}: row must be an object")
    try:
        return {str(k): parse_eps(v) for k, v in raw.items()}
    except EpsError as exc:
        raise CommitmentError(f"{where}: {exc}") from exc


def commitment_from_dict(d: dict):
    """Build a Commitment1 (flat kernel) or Commitment2 (kernel nested by S1 signal)."""
    if not isinstance(d, dict) or "signals" not in d or "kernel" not in d:
        raise CommitmentError("commitment needs 'signals' and 'kernel'")
    signals = tuple(d["signals"])
    kernel = d["kernel"]
    if not isinstance(kernel, dict):
        raise CommitmentError("kernel must be an object")
    nested = kernel and all(
        isinstance(v, dict) and v and all(isinstance(x, dict) for x in v.values())
        for v in kernel.values()
    )
    if nested:
        out = {}
        for b, by_w1 in kernel.items():
            for w1, row in by_w1.items():
                out[(b, w1)] = _parse_row(row, f"kernel[{b}][{w1}]")
        return Commitment2(signals, out)
    return Commitment1(signals, {b: _parse_row(row, f"kernel[{b}]") for b, row in kernel.items()})


def load_commitment(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CommitmentError(f"{path}: invalid JSON ({exc})") from exc
    return commitment_from_dict(doc)


# -- permutations ---------------------------------------------------------


def permute_signals(g1: Commitment1, perm: dict) -> Commitment1:
    """Relabel S1's signals: mass sent on ``w`` is sent on ``perm[w]`` instead."""
    if set(perm) != set(g1.signals) or sorted(perm.values()) != sorted(g1.signals):
        raise CommitmentError("permutation is not a bijection on the signal set")
    kernel = {b: {perm[w]: v for w, v in row.items()} for b, row in g1.kernel.items()}
    return Commitment1(g1.signals, kernel)


def relabel_s1_in_g2(g2: Commitment2, perm: dict) -> Commitment2:
    """Apply the same S1-signal relabelling to S2's kernel keys."""
    return Commitment2(g2.signals, {(b, perm.get(w, w)): row for (b, w), row in g2.kernel.items()})


@dataclass
class PermutationWitness:
    permutation: dict
    s1_commitment: Commitment1
    gain: Fraction

    def to_dict(self):
        return {
            "permutation": dict(self.permutation),
            "s1_commitment": self.s1_commitment.to_dict(),
            "gain": str(self.gain),
        }


@dataclass
class PermutationCheck:
    free: bool
    witness: PermutationWitness | None = None
    candidates_checked: int = 0
    grid: str = ""

    def __bool__(self):
        return self.free

    def to_dict(self):
        return {
            "permutation_free": self.free,
            "witness": self.witness.to_dict() if self.witness else None,
            "candidates_checked": self.candidates_checked,
            "grid": self.grid,
        }


def is_permutation_free(s, g2: Commitment2, g1_set, grid_label: str = "") -> PermutationCheck:
    """Search ``g1_set`` and every relabelling of its signals for a strict S2 gain.

    ``g1_set`` is an iterable of Commitment1 (grid points and/or specific
    candidates).  A True verdict is relative to that set.
    """
    from .equilibrium import expected_utilities

    checked = 0
    best = None
    for g1 in g1_set:
        checked += 1
        base = expected_utilities(s, g1, g2).s2
        sigs = list(g1.signals)
        for image in itertools.permutations(sigs):
            perm = dict(zip(sigs, image))
            if all(k == v for k, v in perm.items()):
                continue
            alt = expected_utilities(s, permute_signals(g1, perm), g2).s2
            gain = alt - base
            if gain > 0 and (best is None or gain > best.gain):
                best = PermutationWitness(perm, g1, gain)
    return PermutationCheck(best is None, best, checked, grid_label)
