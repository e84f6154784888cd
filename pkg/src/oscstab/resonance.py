"""Integer resonance detection and frequency-multiplier bookkeeping.

An order-N resonance among pairwise distinct integers k_1..k_q is a relation
``c_1 k_1 + ... + c_q k_q = 0`` with relatively prime integer coefficients
and ``|c_1| + ... + |c_q| = N``.  Certificates are canonicalized so that the
first nonzero coefficient is positive; among several annihilators the one
minimal in right-to-left lexicographic order is reported, which keeps the
reported relation on the lowest-index values possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import KappaSearchError, KappaStructureError
from .liealg import IndexSets

# Relations that hold by construction for every third-order frequency tuple
# (k1, k2, k1+k2, k2-k1); negations are folded away by canonicalization and
# integer multiples by the gcd filter.
IMPOSED_RELATIONS = ((1, 1, -1, 0), (1, -1, 0, 1))


@dataclass(frozen=True)
class ResonanceCertificate:
    """Witness of an integer relation: sum(c_i * k_i) == 0."""

    coefficients: tuple
    order: int
    kappas: tuple

    def relation(self) -> str:
        parts = []
        for c, k in zip(self.coefficients, self.kappas):
            if c == 0:
                continue
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{'-' if c < 0 else '+'} {mag}({k})")
        text = " ".join(parts).lstrip("+ ")
        return f"{text} = 0"


def _weight_tuples(length: int, total: int):
    """All integer tuples of the given length with sum(|c_i|) == total."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for w in range(-total, total + 1):
        for rest in _weight_tuples(length - 1, total - abs(w)):
            yield (w,) + rest


def _is_canonical(c: Sequence[int]) -> bool:
    for v in c:
        if v != 0:
            return v > 0
    return False


def _setwise_gcd(c: Sequence[int]) -> int:
    g = 0
    for v in c:
        g = math.gcd(g, abs(v))
    return g


def annihilators(k: Sequence[int], order: int) -> list:
    """All canonical relatively-prime tuples of the given order annihilating k."""
    kk = tuple(int(v) for v in k)
    found = []
    for c in _weight_tuples(len(kk), order):
        if not _is_canonical(c):
            continue
        if _setwise_gcd(c) != 1:
            continue
        if sum(ci * ki for ci, ki in zip(c, kk)) == 0:
            found.append(c)
    found.sort(key=lambda c: c[::-1])
    return found


def find_resonance(
    k: Sequence[int], order: int, exclude: Iterable[tuple] = ()
) -> Optional[ResonanceCertificate]:
    """First canonical order-N relation among k, or None if there is none."""
    kk = tuple(int(v) for v in k)
    if any(v == 0 for v in kk):
        raise ValueError(f"resonance check requires nonzero integers, got {kk}")
    if len(set(kk)) != len(kk):
        raise ValueError(f"resonance check requires pairwise distinct integers, got {kk}")
    if order < 2:
        raise ValueError(f"resonance order must be at least 2, got {order}")
    excluded = {tuple(e) for e in exclude}
    for c in annihilators(kk, order):
        if c in excluded:
            continue
        return ResonanceCertificate(coefficients=c, order=order, kappas=kk)
    return None


@dataclass
class KappaAssignment:
    """Oscillation frequency multipliers for the control law.

    ``second_order`` maps each ordered pair in S2 to its positive multiplier.
    ``third_order`` maps each ordered triple in S3 to the full four-tuple
    (k1, k2, k3, k4) with k3 = k1 + k2 and k4 = k2 - k1.  k4 is stored
    signed; distinctness uses |k4| and a negative k4 simply flips the sign
    of the third-order control amplitude through the real cube root.
    """

    second_order: dict
    third_order: dict

    @classmethod
    def assign(cls, sets: IndexSets, second: Sequence[int] = (), third: Sequence = ()):
        """Build an assignment from values listed in S2 / S3 order.

        ``third`` entries are (k1, k2) pairs; the dependent k3, k4 are filled in.
        """
        if len(second) != len(sets.s2):
            raise KappaStructureError(
                f"expected {len(sets.s2)} second-order multipliers, got {len(second)}"
            )
        if len(third) != len(sets.s3):
            raise KappaStructureError(
                f"expected {len(sets.s3)} third-order multiplier pairs, got {len(third)}"
            )
        so = {pair: int(v) for pair, v in zip(sets.s2, second)}
        to = {}
        for triple, (k1, k2) in zip(sets.s3, third):
            k1, k2 = int(k1), int(k2)
            to[triple] = (k1, k2, k1 + k2, k2 - k1)
        return cls(second_order=so, third_order=to)

    def structural_errors(self) -> list:
        errs = []
        for pair, v in self.second_order.items():
            if not isinstance(v, int) or v <= 0:
                errs.append(f"second-order multiplier for {pair} must be a positive integer, got {v!r}")
        for triple, ks in self.third_order.items():
            if len(ks) != 4:
                errs.append(f"third-order entry for {triple} must have four components, got {ks!r}")
                continue
            k1, k2, k3, k4 = ks
            if k1 <= 0 or k2 <= 0:
                errs.append(f"third-order k1, k2 for {triple} must be positive, got ({k1}, {k2})")
            if k3 != k1 + k2:
                errs.append(f"third-order k3 for {triple} must equal k1 + k2, got {k3} != {k1 + k2}")
            if k4 != k2 - k1:
                errs.append(f"third-order k4 for {triple} must equal k2 - k1, got {k4} != {k2 - k1}")
        return errs

    def stored_values(self) -> list:
        """All multipliers in deterministic order, |k4| for the signed slot."""
        vals = [v for v in self.second_order.values()]
        for k1, k2, k3, k4 in self.third_order.values():
            vals.extend([k1, k2, k3, abs(k4)])
        return vals


@dataclass(frozen=True)
class KappaDiagnostics:
    passed: bool
    duplicates: tuple
    certificates: tuple  # ((triple, ResonanceCertificate), ...)
    cross_warnings: tuple

    def messages(self) -> list:
        msgs = []
        for v in self.duplicates:
            msgs.append(f"duplicate multiplier value {v}")
        for triple, cert in self.certificates:
            msgs.append(
                f"non-imposed order-{cert.order} resonance for {triple}: "
                f"{cert.relation()} with coefficients {cert.coefficients} on {cert.kappas}"
            )
        for w in self.cross_warnings:
            msgs.append(f"cross-tuple resonance (warning only): {w}")
        return msgs


def validate_kappa(assignment: KappaAssignment) -> KappaDiagnostics:
    """Check distinctness and per-tuple absence of non-imposed resonances.

    Per third-order tuple, the check runs on (k1, k2, k3, k4) at order 3
    with the two defining relations excluded; at most one certificate is
    reported per tuple.  Resonances across distinct tuples are reported as
    warnings only and do not fail the validation.
    """
    errs = assignment.structural_errors()
    if errs:
        raise KappaStructureError("; ".join(errs))

    values = assignment.stored_values()
    seen = set()
    duplicates = []
    for v in values:
        if v in seen and v not in duplicates:
            duplicates.append(v)
        seen.add(v)

    certificates = []
    for triple, ks in assignment.third_order.items():
        if len(set(abs(k) for k in ks)) != 4:
            continue  # already reported through the distinctness check
        cert = find_resonance(ks, 3, exclude=IMPOSED_RELATIONS)
        if cert is not None:
            certificates.append((triple, cert))

    cross = []
    triples = list(assignment.third_order.items())
    for i in range(len(triples)):
        for j in range(i + 1, len(triples)):
            (ta, ka), (tb, kb) = triples[i], triples[j]
            combined = tuple(ka) + tuple(kb)
            if len(set(combined)) != len(combined):
                continue
            for c in annihilators(combined, 3):
                touches_a = any(v != 0 for v in c[:4])
                touches_b = any(v != 0 for v in c[4:])
                if touches_a and touches_b:
                    cross.append(f"{ta} and {tb}: coefficients {c} on {combined}")
                    break

    passed = not duplicates and not certificates
    return KappaDiagnostics(
        passed=passed,
        duplicates=tuple(duplicates),
        certificates=tuple(certificates),
        cross_warnings=tuple(cross),
    )


def search_kappa(sets: IndexSets, bound: int) -> KappaAssignment:
    """Deterministic smallest-first assignment passing validate_kappa.

    Second-order entries take the smallest unused positive integers; each
    third-order tuple then takes the lexicographically smallest (k1, k2)
    whose derived four-tuple keeps the whole assignment valid.  All stored
    values (|k4| included) must lie in 1..bound.
    """
    if bound < 1:
        raise KappaSearchError(f"bound must be positive, got {bound}")
    second = []
    assignment = KappaAssignment(second_order={}, third_order={})

    def admissible(cand: KappaAssignment) -> bool:
        diag = validate_kappa(cand)
        return diag.passed

    used = set()
    for pair in sets.s2:
        placed = False
        for v in range(1, bound + 1):
            if v in used:
                continue
            trial = KappaAssignment(
                second_order={**assignment.second_order, pair: v},
                third_order=dict(assignment.third_order),
            )
            if admissible(trial):
                assignment = trial
                used.add(v)
                second.append(v)
                placed = True
                break
        if not placed:
            raise KappaSearchError(
                f"no second-order multiplier for {pair} below bound {bound}"
            )

    for triple in sets.s3:
        placed = False
        for k1 in range(1, bound + 1):
            for k2 in range(1, bound + 1):
                if k1 == k2:
                    continue
                k3, k4 = k1 + k2, k2 - k1
                if k3 > bound or abs(k4) > bound:
                    continue
                trial = KappaAssignment(
                    second_order=dict(assignment.second_order),
                    third_order={**assignment.third_order, triple: (k1, k2, k3, k4)},
                )
                if admissible(trial):
                    assignment = trial
                    placed = True
                    break
            if placed:
                break
        if not placed:
            raise KappaSearchError(
                f"no third-order multiplier pair for {triple} below bound {bound}"
            )

    return assignment
