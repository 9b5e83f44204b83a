"""The power set of S as an elementary abelian 2-group under symmetric
difference, and its subgroups D0 >= D1 >= D2 and H.

Subsets are bitmasks (bit i set iff a_i is selected). The squarefree part of
every subset product is tracked as an XOR of per-element signature vectors:
bit 0 records a negative sign and bit k+1 records the k-th distinct prime.
Because each sqf(a_i) is squarefree, the signature of sqf(T) is the XOR of
the signatures of its members, so every subgroup predicate becomes a bitmask
test on a table of 2**n signatures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import arith
from .errors import CapacityError, ConsistencyError, DomainError

MAX_N = 24

SubsetMask = int


class SubgroupClass(str, enum.Enum):
    D0 = "D0"
    D1 = "D1"
    D2 = "D2"
    H = "H"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProblemInstance:
    """An ordered list of non-zero integers a_1..a_n and a modulus d."""

    S: tuple[int, ...]
    d: int
    sqf_parts: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        S = tuple(int(a) for a in self.S)
        if len(S) > MAX_N:
            raise CapacityError(f"|S| = {len(S)} exceeds {MAX_N}")
        if any(a == 0 for a in S):
            raise DomainError("S must consist of non-zero integers")
        if not isinstance(self.d, (int, np.integer)) or int(self.d) < 1:
            raise DomainError(f"modulus d must be a positive integer, got {self.d!r}")
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "sqf_parts", tuple(arith.sqf(a) for a in S))

    @property
    def n(self) -> int:
        return len(self.S)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def with_modulus(self, d: int) -> "ProblemInstance":
        return ProblemInstance(self.S, d)

    def check_mask(self, T: SubsetMask) -> int:
        T = int(T)
        if T < 0 or T >> self.n:
            raise DomainError(f"mask {T:#x} is not a subset of a {self.n}-element set")
        return T

    def members(self, T: SubsetMask) -> tuple[int, ...]:
        """The elements of S selected by ``T``."""
        return tuple(a for i, a in enumerate(self.S) if T >> i & 1)

    def mask_of(self, indices: Iterable[int]) -> int:
        T = 0
        for i in indices:
            if not 0 <= i < self.n:
                raise DomainError(f"index {i} out of range for n = {self.n}")
            T |= 1 << i
        return T

    @cached_property
    def _encoding(self) -> "_Encoding":
        return _Encoding.build(self.sqf_parts, self.d)


@dataclass(frozen=True)
class _Encoding:
    primes: tuple[int, ...]
    vectors: tuple[int, ...]
    words: int
    # bits of primes that do not divide d
    outside_d: int
    two: int
    # sign bit plus primes = 3 mod 4: parity gives sqf mod 4 for odd sqf
    three: int

    @classmethod
    def build(cls, parts: Sequence[int], d: int) -> "_Encoding":
        primes = sorted({p for s in parts for p in arith.factor(s).primes})
        index = {p: k + 1 for k, p in enumerate(primes)}
        vectors = []
        for s in parts:
            v = 1 if s < 0 else 0
            for p in arith.factor(s).primes:
                v |= 1 << index[p]
            vectors.append(v)
        outside = two = 0
        three = 1
        for p, k in index.items():
            if d % p:
                outside |= 1 << k
            if p == 2:
                two |= 1 << k
            elif p % 4 == 3:
                three |= 1 << k
        words = (len(primes) + 1 + 63) // 64
        return cls(tuple(primes), tuple(vectors), words, outside, two, three)

    def value(self, signature: int) -> int:
        v = -1 if signature & 1 else 1
        for k, p in enumerate(self.primes):
            if signature >> (k + 1) & 1:
                v *= p
        return v

    def split(self, x: int) -> np.ndarray:
        return np.array(
            [(x >> (64 * w)) & 0xFFFFFFFFFFFFFFFF for w in range(self.words)],
            dtype=np.uint64,
        )


def _signature(inst: ProblemInstance, T: int) -> int:
    sig = 0
    vectors = inst._encoding.vectors
    i = 0
    while T:
        if T & 1:
            sig ^= vectors[i]
        T >>= 1
        i += 1
    return sig


@lru_cache(maxsize=64)
def signature_table(inst: ProblemInstance) -> np.ndarray:
    """Signatures of sqf(T) for all 2**n masks, shape (2**n, words), uint64."""
    enc = inst._encoding
    table = np.zeros((1, enc.words), dtype=np.uint64)
    for v in enc.vectors:
        table = np.concatenate([table, table ^ enc.split(v)])
    return table


def _membership(inst: ProblemInstance, cls: SubgroupClass) -> np.ndarray:
    enc = inst._encoding
    table = signature_table(inst)
    if cls is SubgroupClass.H:
        return ~table.any(axis=1)
    member = ~(table & enc.split(enc.outside_d)).any(axis=1)
    if cls is SubgroupClass.D0:
        return member
    member &= ~(table & enc.split(enc.two)).any(axis=1)
    if cls is SubgroupClass.D1:
        return member
    parity = np.bitwise_count(table & enc.split(enc.three)).sum(axis=1) & 1
    return member & (parity == 0)


def sqf_of_subset(inst: ProblemInstance, T: SubsetMask) -> int:
    """Signed squarefree part of the product of the elements selected by T."""
    T = inst.check_mask(T)
    return inst._encoding.value(_signature(inst, T))


def active_class(d: int) -> SubgroupClass:
    """Which D-subgroup governs modulus d: D2 if 4 does not divide d, D1 if
    4 exactly divides it, D0 when 8 | d."""
    if d < 1:
        raise DomainError(f"modulus must be positive, got {d}")
    if d % 4:
        return SubgroupClass.D2
    if d % 8:
        return SubgroupClass.D1
    return SubgroupClass.D0


def in_class(s: int, d: int, cls: SubgroupClass) -> bool:
    """Defining predicate of a class, applied to a squarefree value s."""
    if cls is SubgroupClass.H:
        return s == 1
    if d % abs(s):
        return False
    if cls is SubgroupClass.D0:
        return True
    if cls is SubgroupClass.D1:
        return s % 4 in (1, 3)
    return s % 4 == 1


@dataclass(frozen=True)
class SubsetSubgroup:
    cls: SubgroupClass
    n: int
    members: tuple[int, ...]
    modulus: Optional[int]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, T: object) -> bool:
        return T in self._member_set

    @cached_property
    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def basis(self) -> tuple[int, ...]:
        """A GF(2) basis drawn greedily from the members, smallest first."""
        span = {0}
        out = []
        for T in self.members:
            if T not in span:
                out.append(T)
                span |= {x ^ T for x in span}
        return tuple(out)

    def array(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)


def _check_closed(members: np.ndarray, n: int) -> None:
    """Exact XOR-closure test: the span generated from ``members`` must not
    leave the set. Cost is linear in the subgroup size."""
    inside = np.zeros(1 << n, dtype=bool)
    inside[members] = True
    if not inside[0]:
        raise ConsistencyError("subgroup does not contain the empty set")
    in_span = np.zeros(1 << n, dtype=bool)
    span = np.zeros(1, dtype=np.int64)
    in_span[0] = True
    while True:
        missing = members[~in_span[members]]
        if not len(missing):
            break
        new = span ^ missing[0]
        if not inside[new].all():
            raise ConsistencyError("subgroup is not closed under symmetric difference")
        in_span[new] = True
        span = np.concatenate([span, new])
    if len(span) != len(members):
        raise ConsistencyError("span and member count disagree")


def subgroup(inst: ProblemInstance, cls: SubgroupClass | str) -> SubsetSubgroup:
    """Enumerate D0, D1, D2 (for inst.d) or H over all 2**n subsets."""
    return _subgroup(inst, SubgroupClass(cls))


@lru_cache(maxsize=256)
def _subgroup(inst: ProblemInstance, cls: SubgroupClass) -> SubsetSubgroup:
    members = np.flatnonzero(_membership(inst, cls)).astype(np.int64)
    _check_closed(members, inst.n)
    modulus = None if cls is SubgroupClass.H else inst.d
    return SubsetSubgroup(cls, inst.n, tuple(int(T) for T in members), modulus)


@dataclass(frozen=True)
class Coset:
    representative: int
    members: tuple[int, ...]
    common_sqf: Optional[int]


@dataclass(frozen=True)
class CosetDecomposition:
    subgroup: SubsetSubgroup
    cosets: tuple[Coset, ...]

    def __len__(self) -> int:
        return len(self.cosets)

    def coset_of(self, T: int) -> Coset:
        for c in self.cosets:
            if T in c.members:
                return c
        raise DomainError(f"mask {T} is not in the decomposed power set")


def coset_decomposition(inst: ProblemInstance, sub: SubsetSubgroup) -> CosetDecomposition:
    """Partition P(S) into cosets T xor sub, each labelled by its least mask.

    ``common_sqf`` is the shared squarefree part when all members agree on it
    (always the case for H), otherwise None.
    """
    if sub.n != inst.n:
        raise DomainError("subgroup and instance have different n")
    size = 1 << inst.n
    label = np.full(size, -1, dtype=np.int64)
    sub_arr = sub.array()
    table = signature_table(inst)
    cosets = []
    rep = 0
    while rep < size:
        block = np.sort(sub_arr ^ rep)
        label[block] = len(cosets)
        sigs = table[block]
        common = None
        if (sigs == sigs[0]).all():
            common = sqf_of_subset(inst, rep)
        cosets.append(Coset(rep, tuple(int(T) for T in block), common))
        unassigned = np.flatnonzero(label[rep:] < 0)
        rep = rep + int(unassigned[0]) if len(unassigned) else size
    return CosetDecomposition(sub, tuple(cosets))


def quotient_order(inst: ProblemInstance, cls: SubgroupClass | str) -> int:
    """|D_i| / |H|: the number of distinct squarefree values realized in D_i."""
    cls = SubgroupClass(cls)
    if cls is SubgroupClass.H:
        raise DomainError("quotient order is defined for D0, D1, D2 only")
    big = subgroup(inst, cls)
    h = subgroup(inst, SubgroupClass.H)
    if not h._member_set <= big._member_set:
        raise ConsistencyError(f"H is not contained in {cls}")
    q, r = divmod(len(big), len(h))
    if r:
        raise ConsistencyError(f"|H| = {len(h)} does not divide |{cls}| = {len(big)}")
    return q


def active_subgroup(inst: ProblemInstance) -> SubsetSubgroup:
    return subgroup(inst, active_class(inst.d))


def index_of(big: SubsetSubgroup, small: SubsetSubgroup) -> int:
    if not small._member_set <= big._member_set:
        raise DomainError(f"{small.cls} is not contained in {big.cls}")
    return len(big) // len(small)


def popcount(x: int) -> int:
    return bin(x).count("1")


def log2_exact(m: int) -> int:
    k = m.bit_length() - 1
    if m != 1 << k:
        raise ConsistencyError(f"{m} is not a power of two")
    return k


__all__ = [
    "MAX_N",
    "Coset",
    "CosetDecomposition",
    "ProblemInstance",
    "SubgroupClass",
    "SubsetSubgroup",
    "active_class",
    "active_subgroup",
    "coset_decomposition",
    "in_class",
    "index_of",
    "quotient_order",
    "signature_table",
    "sqf_of_subset",
    "subgroup",
]
