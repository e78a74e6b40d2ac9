"""Subsets of the discrete cube {0,1}^n and their boundary functionals.

Vertex ``v`` is an integer in ``[0, 2**n)``; coordinate ``j`` of ``v`` is bit
``j`` and the neighbour of ``v`` across coordinate ``j`` is ``v ^ (1 << j)``.
A set is stored as a Python integer bitmask whose bit ``v`` records membership
of vertex ``v``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

MAX_DIMENSION = 24
BATCH_MAX_DIMENSION = 6  # masks must fit in uint64


class Side(str, enum.Enum):
    """Which boundary profile a moment is taken of."""

    H = "h"
    H_COMPLEMENT = "h_complement"
    W = "w"


def check_dimension(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"dimension must be an integer, got {n!r}")
    if not 1 <= n <= MAX_DIMENSION:
        raise ValueError(f"dimension must satisfy 1 <= n <= {MAX_DIMENSION}, got {n}")
    return int(n)


def _nbytes(n: int) -> int:
    return max(1, (1 << n) // 8)


@dataclass(frozen=True, order=True)
class CubeSet:
    """A subset of the n-cube held as a membership bitmask."""

    n: int
    mask: int

    def __post_init__(self) -> None:
        check_dimension(self.n)
        if not 0 <= self.mask < (1 << (1 << self.n)):
            raise ValueError("bitmask does not fit 2**n vertices")

    @classmethod
    def empty(cls, n: int) -> CubeSet:
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> CubeSet:
        return cls(n, (1 << (1 << n)) - 1)

    @classmethod
    def from_vertices(cls, n: int, vertices: Iterable[int]) -> CubeSet:
        check_dimension(n)
        mask = 0
        for v in vertices:
            if not 0 <= v < (1 << n):
                raise ValueError(f"vertex {v} outside the {n}-cube")
            mask |= 1 << v
        return cls(n, mask)

    @classmethod
    def from_members(cls, n: int, members: np.ndarray) -> CubeSet:
        members = np.asarray(members, dtype=bool)
        if members.shape != (1 << n,):
            raise ValueError(f"membership vector must have length {1 << n}")
        packed = np.packbits(members, bitorder="little").tobytes()
        return cls(n, int.from_bytes(packed, "little"))

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def cardinality(self) -> int:
        return self.mask.bit_count()

    @property
    def measure(self) -> Fraction:
        return Fraction(self.cardinality, self.size)

    def members(self) -> np.ndarray:
        raw = np.frombuffer(self.mask.to_bytes(_nbytes(self.n), "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.size].astype(bool)

    def vertices(self) -> list[int]:
        return np.flatnonzero(self.members()).tolist()

    def __contains__(self, v: int) -> bool:
        return bool(self.mask >> v & 1)

    def complement(self) -> CubeSet:
        return CubeSet(self.n, self.mask ^ ((1 << self.size) - 1))

    def transform(self, perm: Optional[Iterable[int]] = None, flip: int = 0) -> CubeSet:
        """Image under ``v -> permute_bits(v, perm) ^ flip``.

        ``perm[j]`` is the coordinate that coordinate ``j`` is sent to.
        """
        idx = np.arange(self.size, dtype=np.int64)
        image = np.zeros_like(idx)
        perm = list(range(self.n)) if perm is None else list(perm)
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of range(n)")
        for j, pj in enumerate(perm):
            image |= ((idx >> j) & 1) << pj
        image ^= flip
        out = np.zeros(self.size, dtype=bool)
        out[image[self.members()]] = True
        return CubeSet.from_members(self.n, out)

    def to_hex(self) -> str:
        return f"n={self.n}:" + self.mask.to_bytes(_nbytes(self.n), "little").hex()

    @classmethod
    def from_hex(cls, text: str) -> CubeSet:
        head, sep, body = text.strip().partition(":")
        if not sep or not head.startswith("n="):
            raise ValueError(f"expected 'n=<n>:<hex>', got {text!r}")
        n = check_dimension(int(head[2:]))
        raw = bytes.fromhex(body)
        if len(raw) != _nbytes(n):
            raise ValueError(f"hex body must encode {_nbytes(n)} bytes for n={n}")
        return cls(n, int.from_bytes(raw, "little"))

    def __str__(self) -> str:
        return self.to_hex()


@dataclass(frozen=True)
class BoundaryProfile:
    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != (1 << self.n,):
            raise ValueError("profile length must be 2**n")

    @property
    def support(self) -> CubeSet:
        return CubeSet.from_members(self.n, self.values > 0)

    def total(self) -> int:
        return int(self.values.sum(dtype=np.int64))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoundaryProfile):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class Moment:
    """``E g^beta`` for a boundary profile ``g``.

    At ``beta == 1`` the integer ``exact_numerator`` (the profile sum) is kept so
    that the moment equals ``exact_numerator / 2**n`` exactly.
    """

    n: int
    beta: float
    value: float
    exact_numerator: Optional[int] = None

    @property
    def exact(self) -> Optional[Fraction]:
        if self.exact_numerator is None:
            return None
        return Fraction(self.exact_numerator, 1 << self.n)


def _neighbour_counts(members: np.ndarray, n: int) -> np.ndarray:
    """Per-vertex count of neighbours outside the set, for vertices in the set.

    ``members`` may carry leading batch axes; the vertex axis is last.
    """
    idx = np.arange(1 << n)
    h = np.zeros(members.shape, dtype=np.int8)
    outside = ~members
    for j in range(n):
        h += members & outside[..., idx ^ (1 << j)]
    return h


def h_profile(A: CubeSet) -> BoundaryProfile:
    return BoundaryProfile(A.n, _neighbour_counts(A.members(), A.n))


def h_complement_profile(A: CubeSet) -> BoundaryProfile:
    return h_profile(A.complement())


def w_profile(A: CubeSet) -> BoundaryProfile:
    m = A.members()
    return BoundaryProfile(A.n, _neighbour_counts(m, A.n) + _neighbour_counts(~m, A.n))


def profile(A: CubeSet, side: Side | str = Side.H) -> BoundaryProfile:
    side = Side(side)
    if side is Side.H:
        return h_profile(A)
    if side is Side.H_COMPLEMENT:
        return h_complement_profile(A)
    return w_profile(A)


def edge_boundary(A: CubeSet) -> int:
    """``|∇A|``, the number of edges leaving ``A``."""
    return h_profile(A).total()


def power_table(n: int, beta: float) -> np.ndarray:
    """``k**beta`` for ``k = 0..n`` with the convention ``0**beta == 0``."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    k = np.arange(n + 1, dtype=np.float64)
    table = k**beta
    table[0] = 0.0
    return table


def moment_of_profile(prof: BoundaryProfile, beta: float) -> Moment:
    counts = np.bincount(prof.values.astype(np.int64), minlength=prof.n + 1)
    table = power_table(prof.n, beta)
    value = math.fsum(int(c) * float(p) for c, p in zip(counts, table)) / (1 << prof.n)
    exact = prof.total() if beta == 1 else None
    return Moment(prof.n, float(beta), value, exact)


def moment(A: CubeSet, beta: float, side: Side | str = Side.H) -> Moment:
    """``2**-n * sum_v g(v)**beta`` for the chosen boundary profile ``g``."""
    return moment_of_profile(profile(A, side), beta)


def subcube(n: int, k: int) -> CubeSet:
    """Vertices whose bits ``0..k-1`` are all zero (co-dimension ``k``)."""
    check_dimension(n)
    if not 0 <= k <= n:
        raise ValueError(f"co-dimension must satisfy 0 <= k <= n, got k={k}, n={n}")
    idx = np.arange(1 << n)
    return CubeSet.from_members(n, (idx & ((1 << k) - 1)) == 0)


def popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    pc = np.zeros_like(idx)
    for j in range(n):
        pc += (idx >> j) & 1
    return pc


def hamming_ball(n: int, center: int, r: float) -> CubeSet:
    check_dimension(n)
    if not 0 <= center < (1 << n):
        raise ValueError(f"center {center} outside the {n}-cube")
    radius = min(math.floor(r), n)
    dist = popcounts(n)[np.arange(1 << n) ^ center]
    return CubeSet.from_members(n, dist <= radius)


def hamming_sphere(n: int, center: int, r: int) -> CubeSet:
    check_dimension(n)
    dist = popcounts(n)[np.arange(1 << n) ^ center]
    return CubeSet.from_members(n, dist == r)


def is_subcube(A: CubeSet) -> bool:
    """True when ``A`` is a face of the cube (some coordinates fixed), of any orientation."""
    verts = A.vertices()
    if not verts:
        return False
    free = 0
    for v in verts:
        free |= v ^ verts[0]
    return len(verts) == 1 << free.bit_count()


def is_hamming_ball(A: CubeSet) -> bool:
    card = A.cardinality
    if card == 0:
        return False
    sizes = np.cumsum([math.comb(A.n, i) for i in range(A.n + 1)])
    hits = np.flatnonzero(sizes == card)
    if hits.size == 0:
        return False
    r = int(hits[0])
    members = A.members()
    pc = popcounts(A.n)
    idx = np.arange(A.size)
    for c in A.vertices():
        if np.array_equal(members, pc[idx ^ c] <= r):
            return True
    return False


# -- batch kernels over many small sets at once -------------------------------


def membership_matrix(n: int, masks: np.ndarray) -> np.ndarray:
    """Boolean matrix ``(len(masks), 2**n)`` of memberships for uint64 masks."""
    if n > BATCH_MAX_DIMENSION:
        raise ValueError(f"batch kernels support n <= {BATCH_MAX_DIMENSION}")
    masks = np.asarray(masks, dtype=np.uint64)
    shifts = np.arange(1 << n, dtype=np.uint64)
    return ((masks[:, None] >> shifts) & np.uint64(1)).astype(bool)


def batch_profiles(n: int, masks: np.ndarray, side: Side | str = Side.H) -> np.ndarray:
    side = Side(side)
    members = membership_matrix(n, masks)
    if side is Side.H:
        return _neighbour_counts(members, n)
    if side is Side.H_COMPLEMENT:
        return _neighbour_counts(~members, n)
    return _neighbour_counts(members, n) + _neighbour_counts(~members, n)


def batch_histograms(n: int, masks: np.ndarray, side: Side | str = Side.H) -> np.ndarray:
    """Counts of vertices with profile value ``k`` for ``k = 0..n``, one row per set."""
    prof = batch_profiles(n, masks, side)
    return np.stack([(prof == k).sum(axis=1) for k in range(n + 1)], axis=1)


def batch_moments(n: int, masks: np.ndarray, beta: float, side: Side | str = Side.H) -> np.ndarray:
    hist = batch_histograms(n, masks, side)
    return hist.astype(np.float64) @ power_table(n, beta) / (1 << n)
