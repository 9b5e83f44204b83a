"""Choice-of-signs algebra: residue patterns of S modulo primes in a fixed
class f mod d, the main-term constant, exact densities, and the group of
admissible pairs (f, theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import arith
from .errors import CapacityError, ConsistencyError, DomainError, SymbolNotClassConstant
from .subsetlat import (
    ProblemInstance,
    SubgroupClass,
    SubsetSubgroup,
    active_subgroup,
    sqf_of_subset,
)

ENUM_MAX_N = 16
ENUM_BUDGET = 1 << 24
# pairwise closure check above this size falls back to the generated-span test
_PAIRWISE_LIMIT = 4096


@dataclass(frozen=True)
class SignPattern:
    """A sign theta(a_i) in {-1, +1} for each element of S."""

    theta: tuple[int, ...]

    def __post_init__(self) -> None:
        theta = tuple(int(t) for t in self.theta)
        if any(t not in (1, -1) for t in theta):
            raise DomainError(f"signs must be +1 or -1, got {self.theta!r}")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "SignPattern":
        return cls(tuple(-1 if mask >> i & 1 else 1 for i in range(n)))

    @classmethod
    def constant(cls, sign: int, n: int) -> "SignPattern":
        return cls((sign,) * n)

    @property
    def n(self) -> int:
        return len(self.theta)

    @property
    def negative_mask(self) -> int:
        """Bitmask of the indices where theta is -1."""
        m = 0
        for i, t in enumerate(self.theta):
            if t < 0:
                m |= 1 << i
        return m

    def __mul__(self, other: "SignPattern") -> "SignPattern":
        if self.n != other.n:
            raise DomainError("sign patterns of different length")
        return SignPattern(tuple(a * b for a, b in zip(self.theta, other.theta)))

    def __str__(self) -> str:
        return ",".join("+1" if t > 0 else "-1" for t in self.theta)


@dataclass(frozen=True)
class ResidueClass:
    """A reduced residue class f mod d, normalised to 1 <= f <= d."""

    f: int
    d: int

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 1:
            raise DomainError(f"modulus must be positive, got {d}")
        f = int(self.f) % d or d
        if math.gcd(f, d) != 1:
            raise DomainError(f"gcd({self.f}, {d}) != 1")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "d", d)


@dataclass(frozen=True)
class PatternGroupElement:
    rc: ResidueClass
    sp: SignPattern

    def __mul__(self, other: "PatternGroupElement") -> "PatternGroupElement":
        d = self.rc.d
        if other.rc.d != d:
            raise DomainError("elements of different moduli")
        return PatternGroupElement(ResidueClass(self.rc.f * other.rc.f % d, d), self.sp * other.sp)

    @property
    def key(self) -> tuple[int, int]:
        return self.rc.f, self.sp.negative_mask


@dataclass(frozen=True)
class DensityResult:
    constant_C: int
    density_numerator: int
    density_denominator: int
    feasible: bool
    active: SubgroupClass
    subgroup_order: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.density_numerator, self.density_denominator)


def theta_of_subset(sp: SignPattern, T: int) -> int:
    """Product of the signs selected by T; the empty product is +1."""
    if T < 0 or T >> sp.n:
        raise DomainError(f"mask {T:#x} invalid for {sp.n} signs")
    return -1 if bin(T & sp.negative_mask).count("1") & 1 else 1


def _class_constant(s: int, d: int) -> bool:
    if d % abs(s):
        return False
    r = s % 4
    return r == 1 or (r == 3 and d % 4 == 0) or (r == 2 and d % 8 == 0)


def symbol_on_class(s: int, rc: ResidueClass) -> int:
    """Common value of (s/p) over primes p = f mod d.

    Defined when |s| divides d and the conductor of Q(sqrt(s)) divides d:
    s = 1 mod 4, or s = 3 mod 4 with 4 | d, or s = 2 mod 4 with 8 | d. The
    value is the Kronecker character of the field discriminant at f.
    """
    if not arith.is_squarefree(s):
        raise DomainError(f"{s} is not squarefree")
    if not _class_constant(s, rc.d):
        raise SymbolNotClassConstant(
            f"({s}/p) is not constant on primes p = {rc.f} mod {rc.d}"
        )
    return arith.kronecker(arith.fundamental_discriminant(s), rc.f)


def _check_instance(inst: ProblemInstance, sp: SignPattern, rc: ResidueClass) -> None:
    if sp.n != inst.n:
        raise DomainError(f"theta has {sp.n} signs but |S| = {inst.n}")
    if rc.d != inst.d:
        raise DomainError(f"class modulus {rc.d} differs from instance modulus {inst.d}")


def mu(inst: ProblemInstance, sp: SignPattern, rc: ResidueClass, T: int) -> int:
    """theta(T) * (sqf(T)/f) for T in the active subgroup."""
    _check_instance(inst, sp, rc)
    return theta_of_subset(sp, T) * symbol_on_class(sqf_of_subset(inst, T), rc)


def _density(inst: ProblemInstance, C: int) -> Fraction:
    return Fraction(C, (1 << inst.n) * arith.euler_phi(inst.d))


def main_term_constant(inst: ProblemInstance, sp: SignPattern, rc: ResidueClass) -> DensityResult:
    """Sum of mu over the active subgroup; equals its order or zero."""
    _check_instance(inst, sp, rc)
    sub = active_subgroup(inst)
    C = sum(mu(inst, sp, rc, T) for T in sub)
    if C not in (0, len(sub)):
        raise ConsistencyError(f"main-term constant {C} is neither 0 nor |{sub.cls}| = {len(sub)}")
    dens = _density(inst, C)
    return DensityResult(
        constant_C=C,
        density_numerator=dens.numerator,
        density_denominator=dens.denominator,
        feasible=C > 0,
        active=sub.cls,
        subgroup_order=len(sub),
    )


def is_feasible(inst: ProblemInstance, sp: SignPattern, rc: ResidueClass) -> bool:
    """Whether theta(T) = (sqf(T)/f) on the whole active subgroup."""
    _check_instance(inst, sp, rc)
    return all(
        theta_of_subset(sp, T) == symbol_on_class(sqf_of_subset(inst, T), rc)
        for T in active_subgroup(inst)
    )


def units(d: int) -> list[int]:
    """Z_d^* as representatives in [1, d]."""
    return [f for f in range(1, d + 1) if math.gcd(f, d) == 1]


def count_pattern_group(inst: ProblemInstance) -> int:
    """Closed form 2**n * phi(d) / |D_i| for the active class."""
    q, r = divmod((1 << inst.n) * arith.euler_phi(inst.d), len(active_subgroup(inst)))
    if r:
        raise ConsistencyError("|D_i| does not divide 2**n * phi(d)")
    return q


def _basis_symbols(inst: ProblemInstance, sub: SubsetSubgroup, fs: Sequence[int]) -> tuple[tuple[int, ...], np.ndarray]:
    """Basis of the active subgroup and, per f, the bit pattern of
    [(sqf(b)/f) = -1] over the basis."""
    basis = sub.basis
    target = np.zeros(len(fs), dtype=np.int64)
    for j, b in enumerate(basis):
        s = sqf_of_subset(inst, b)
        for k, f in enumerate(fs):
            if symbol_on_class(s, ResidueClass(f, inst.d)) < 0:
                target[k] |= 1 << j
    return basis, target


def _theta_keys(n: int, basis: Sequence[int]) -> np.ndarray:
    """For each negative-mask v, bit j = parity of |v & basis[j]|."""
    masks = np.arange(1 << n, dtype=np.int64)
    keys = np.zeros(1 << n, dtype=np.int64)
    for j, b in enumerate(basis):
        keys |= (np.bitwise_count(masks & b).astype(np.int64) & 1) << j
    return keys


def _check_budget(inst: ProblemInstance) -> None:
    if inst.n > ENUM_MAX_N:
        raise CapacityError(f"|S| = {inst.n} exceeds enumeration limit {ENUM_MAX_N}")
    if arith.euler_phi(inst.d) << inst.n > ENUM_BUDGET:
        raise CapacityError(f"phi(d) * 2**n exceeds enumeration budget {ENUM_BUDGET}")


def pattern_group_keys(inst: ProblemInstance) -> list[tuple[int, int]]:
    """Sorted (f, negative-mask) pairs with mu trivial on the active subgroup.

    Because mu is a homomorphism it is trivial on the subgroup exactly when it
    is trivial on a basis, so each f needs one vectorised comparison.
    """
    _check_budget(inst)
    sub = active_subgroup(inst)
    fs = units(inst.d)
    basis, target = _basis_symbols(inst, sub, fs)
    keys = _theta_keys(inst.n, basis)
    out = []
    for f, t in zip(fs, target):
        out.extend((f, int(v)) for v in np.flatnonzero(keys == t))
    return out


def verify_group_keys(keys: list[tuple[int, int]], d: int) -> None:
    elements = set(keys)
    if (1 % d or d, 0) not in elements:
        raise ConsistencyError("pattern group is missing the identity")
    if len(elements) <= _PAIRWISE_LIMIT:
        for f1, v1 in keys:
            for f2, v2 in keys:
                if ((f1 * f2 % d or d), v1 ^ v2) not in elements:
                    raise ConsistencyError("pattern group is not closed")
        return
    # generated-span test: grow a subgroup from members, never leaving the set
    def mul(a, b):
        return (a[0] * b[0]) % d or d, a[1] ^ b[1]

    span = {(1 % d or d, 0)}
    for g in keys:
        if g in span:
            continue
        grown = set(span)
        rep = g
        while rep not in span:
            new = {mul(h, rep) for h in span}
            if not new <= elements:
                raise ConsistencyError("pattern group is not closed")
            grown |= new
            rep = mul(rep, g)
        span = grown
    if span != elements:
        raise ConsistencyError("pattern group span differs from member set")


def enumerate_pattern_group(inst: ProblemInstance) -> list[PatternGroupElement]:
    """All (f, theta) in Z_d^* x {+-1}^n with mu trivial on the active class,
    ordered by f then by negative-mask."""
    keys = pattern_group_keys(inst)
    verify_group_keys(keys, inst.d)
    n, d = inst.n, inst.d
    return [PatternGroupElement(ResidueClass(f, d), SignPattern.from_mask(v, n)) for f, v in keys]


def feasible_patterns(inst: ProblemInstance, rc: ResidueClass) -> list[SignPattern]:
    """Every theta realizable for infinitely many primes p = f mod d."""
    if rc.d != inst.d:
        raise DomainError("class modulus differs from instance modulus")
    sub = active_subgroup(inst)
    basis, target = _basis_symbols(inst, sub, [rc.f])
    keys = _theta_keys(inst.n, basis)
    return [SignPattern.from_mask(int(v), inst.n) for v in np.flatnonzero(keys == target[0])]
