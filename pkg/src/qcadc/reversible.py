"""Reversible extension of elementary rules and the self-duality test.

An irreversible nearest-neighbor rule f becomes reversible by adjoining a
fourth cell that accumulates the update XOR-wise:
(s1, s2, s3, s4) -> (s1, s2, s3, s4 ^ f(s1, s2, s3)).  The resulting 16-state
map is an involution, hence a permutation, for every rule.  Self-duality
(f commuting with global complement) is what lets the quantized rule
decouple past from present configurations.
"""
from __future__ import annotations

from dataclasses import dataclass

from .ca import RuleTable, rule_from_wolfram


@dataclass(frozen=True)
class ExtendedRule:
    """A rule's 16-state reversible extension.

    ``table[s]`` is the image of the 4-bit state s read as the binary
    number s1 s2 s3 s4.  Instances built by :func:`extend_rule` keep the
    first three bits fixed; hand-built tables may violate that (useful as
    negative controls).
    """
    base: RuleTable
    table: tuple[int, ...]

    def apply(self, s1: int, s2: int, s3: int, s4: int) -> tuple[int, int, int, int]:
        out = self.table[(s1 << 3) | (s2 << 2) | (s3 << 1) | s4]
        return ((out >> 3) & 1, (out >> 2) & 1, (out >> 1) & 1, out & 1)


def extend_rule(rule: RuleTable) -> ExtendedRule:
    """Adjoin the XOR-accumulating fourth cell to an elementary rule."""
    table = []
    for s in range(16):
        s1, s2, s3, s4 = (s >> 3) & 1, (s >> 2) & 1, (s >> 1) & 1, s & 1
        table.append((s1 << 3) | (s2 << 2) | (s3 << 1) | (s4 ^ rule(s1, s2, s3)))
    return ExtendedRule(rule, tuple(table))


def is_permutation(ext: ExtendedRule) -> bool:
    """True iff the 16-state map is a bijection."""
    return sorted(ext.table) == list(range(16))


def is_involution(ext: ExtendedRule) -> bool:
    """True iff applying the map twice is the identity."""
    return all(ext.table[ext.table[s]] == s for s in range(16))


def is_self_dual(rule: RuleTable) -> bool:
    """True iff f(~a, ~b, ~c) == ~f(a, b, c) for all eight neighborhoods."""
    return all(rule(1 - a, 1 - b, 1 - c) == 1 - rule(a, b, c)
               for a in (0, 1) for b in (0, 1) for c in (0, 1))


def audit_all_rules() -> list[tuple[int, bool, bool]]:
    """(code, self_dual, permutation_ok) for every elementary rule."""
    rows = []
    for code in range(256):
        rule = rule_from_wolfram(code)
        rows.append((code, is_self_dual(rule), is_permutation(extend_rule(rule))))
    return rows
