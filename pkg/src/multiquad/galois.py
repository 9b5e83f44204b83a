"""The Galois group of K = Q(sqrt(a_1), ..., sqrt(a_n), zeta_d) over Q,
realised as pairs (f, signs): zeta_d -> zeta_d**f and sqrt(a_i) -> signs[i] *
sqrt(a_i). The field itself is never materialised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Sequence

from . import arith
from .errors import ConsistencyError, DomainError
from .patterns import (
    ResidueClass,
    SignPattern,
    count_pattern_group,
    pattern_group_keys,
    verify_group_keys,
    symbol_on_class,
)
from .subsetlat import (
    ProblemInstance,
    SubgroupClass,
    active_class,
    active_subgroup,
    quotient_order,
    sqf_of_subset,
    subgroup,
)


def _require_cyclotomic(inst: ProblemInstance) -> None:
    if inst.d < 3:
        raise DomainError(f"zeta_d needs d >= 3, got d = {inst.d}")


@dataclass(frozen=True)
class GaloisElement:
    inst: ProblemInstance
    f: int
    signs: SignPattern

    def __post_init__(self) -> None:
        if self.signs.n != self.inst.n:
            raise DomainError("signs do not match |S|")

    @property
    def key(self) -> tuple[int, int]:
        return self.f, self.signs.negative_mask

    def zeta_exponent(self) -> int:
        """sigma(zeta_d) = zeta_d ** zeta_exponent()."""
        return self.f

    def sqrt_sign(self, i: int) -> int:
        """sigma(sqrt(a_i)) = sqrt_sign(i) * sqrt(a_i)."""
        return self.signs.theta[i]

    def inverse(self) -> "GaloisElement":
        return GaloisElement(self.inst, pow(self.f, -1, self.inst.d), self.signs)

    def is_member(self) -> bool:
        return is_member(self.inst, self.f, self.signs)

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        return compose(self, other)

    def __str__(self) -> str:
        return f"({self.f}; {self.signs})"


def is_member(inst: ProblemInstance, f: int, signs: SignPattern) -> bool:
    """Whether (f, signs) is trivial on the active subgroup, i.e. an automorphism."""
    rc = ResidueClass(f, inst.d)
    neg = signs.negative_mask
    for T in active_subgroup(inst):
        theta = -1 if bin(T & neg).count("1") & 1 else 1
        if theta != symbol_on_class(sqf_of_subset(inst, T), rc):
            return False
    return True


@dataclass(frozen=True)
class GaloisGroup:
    inst: ProblemInstance
    elements: tuple[GaloisElement, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: object) -> bool:
        return isinstance(g, GaloisElement) and g.inst == self.inst and g.key in self._keys

    @cached_property
    def _keys(self) -> frozenset[tuple[int, int]]:
        return frozenset(g.key for g in self.elements)

    @property
    def identity(self) -> GaloisElement:
        return GaloisElement(self.inst, 1, SignPattern.constant(1, self.inst.n))

    def element(self, f: int, signs: SignPattern) -> GaloisElement:
        g = GaloisElement(self.inst, f % self.inst.d or self.inst.d, signs)
        if g not in self:
            raise DomainError(f"{g} is not in the group")
        return g


@dataclass(frozen=True)
class CancellationReport:
    degree: int
    h_order: int
    quotient_order: int
    full: int

    @property
    def holds(self) -> bool:
        return self.degree * self.quotient_order * self.h_order == self.full


def degree(inst: ProblemInstance) -> int:
    """[K:Q] = 2**n * phi(d) / |D_i| for the active class of d."""
    _require_cyclotomic(inst)
    return count_pattern_group(inst)


def build_group(inst: ProblemInstance) -> GaloisGroup:
    _require_cyclotomic(inst)
    keys = pattern_group_keys(inst)
    verify_group_keys(keys, inst.d)
    n = inst.n
    elements = tuple(GaloisElement(inst, f, SignPattern.from_mask(v, n)) for f, v in keys)
    group = GaloisGroup(inst, elements)
    if group.order != degree(inst):
        raise ConsistencyError(f"enumerated {group.order} automorphisms, expected {degree(inst)}")
    if group.identity not in group:
        raise ConsistencyError("identity missing from Galois group")
    return group


def compose(g1: GaloisElement, g2: GaloisElement) -> GaloisElement:
    """Componentwise product (f1*f2 mod d, signs1*signs2)."""
    if g1.inst != g2.inst:
        raise DomainError("cannot compose automorphisms of different fields")
    d = g1.inst.d
    return GaloisElement(g1.inst, g1.f * g2.f % d or d, g1.signs * g2.signs)


def admissibility_error(inst: ProblemInstance, p: int) -> str | None:
    """Why p cannot carry a Frobenius element, or None when it can."""
    if p < 3 or not arith.is_prime(p):
        return f"{p} is not an odd prime"
    if inst.d % p == 0:
        return f"{p} divides d = {inst.d}"
    for a in inst.S:
        if a % p == 0:
            return f"{p} divides a_i = {a}"
    return None


def frobenius(inst: ProblemInstance, p: int) -> GaloisElement:
    """Frobenius at an unramified odd prime: (p mod d, ((a_i/p))_i)."""
    _require_cyclotomic(inst)
    p = int(p)
    why = admissibility_error(inst, p)
    if why:
        raise DomainError(why)
    signs = SignPattern(tuple(arith.legendre(a, p) for a in inst.S))
    g = GaloisElement(inst, p % inst.d, signs)
    if not g.is_member():
        raise ConsistencyError(f"Frobenius at {p} is not an automorphism: {g}")
    return g


def multi_cyclotomic(S: Sequence[int], moduli: Iterable[int]) -> GaloisGroup:
    """Group of Q(sqrt(a_i), zeta_d1, ..., zeta_dk) = group for d = lcm(d_j)."""
    moduli = [int(m) for m in moduli]
    if not moduli:
        raise DomainError("at least one modulus is required")
    if any(m < 3 for m in moduli):
        raise DomainError(f"every modulus must be >= 3, got {moduli}")
    d = reduce(math.lcm, moduli)
    return build_group(ProblemInstance(tuple(S), d))


def cancellation(inst: ProblemInstance) -> CancellationReport:
    """Split 2**n * phi(d) / degree into the quadratic part |H| and the
    cyclotomic part |D_i / H|."""
    deg = degree(inst)
    h = len(subgroup(inst, SubgroupClass.H))
    q = quotient_order(inst, active_class(inst.d))
    report = CancellationReport(deg, h, q, (1 << inst.n) * arith.euler_phi(inst.d))
    if not report.holds:
        raise ConsistencyError(f"cancellation identity fails: {report}")
    return report
