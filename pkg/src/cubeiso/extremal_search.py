"""Exhaustive and symmetry-reduced minimisation of boundary moments at small n.

Candidates of fixed cardinality are walked in colex order (Gosper's successor),
which for masks of fixed popcount is the same as ascending integer order. This
makes witness lists deterministic and lets the stream be cut into contiguous
rank ranges that are reduced independently.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np

from .cube_core import (
    CubeSet,
    Side,
    batch_moments,
    batch_profiles,
    check_dimension,
    is_hamming_ball,
    is_subcube,
    membership_matrix,
    moment,
)
from .errors import ResourceRefusal

WITNESS_CAP = 16
DEFAULT_BUDGET = 2**31
TIE_TOL = 1e-12
CHUNK = 1 << 14

EXHAUSTIVE_MAX_N = 4
SYMMETRY_MAX_N = 5


def gosper_next(x: int) -> int:
    """Next integer above ``x`` with the same number of set bits."""
    if x <= 0:
        raise ValueError("Gosper successor needs a positive mask")
    c = x & -x
    r = x + c
    return (((r ^ x) >> 2) // c) | r


def colex_unrank(m: int, rank: int) -> int:
    """The ``rank``-th (0-based) mask of popcount ``m`` in ascending order."""
    mask = 0
    for k in range(m, 0, -1):
        c = k - 1
        while math.comb(c + 1, k) <= rank:
            c += 1
        rank -= math.comb(c, k)
        mask |= 1 << c
    return mask


def iter_fixed_popcount(universe: int, m: int, start_rank: int = 0, count: Optional[int] = None) -> Iterator[int]:
    """Masks over ``universe`` bits with popcount ``m``, ascending, from ``start_rank``."""
    total = math.comb(universe, m)
    stop = total if count is None else min(total, start_rank + count)
    if start_rank >= stop:
        return
    if m == 0:
        yield 0
        return
    x = colex_unrank(m, start_rank)
    for _ in range(stop - start_rank):
        yield x
        x = gosper_next(x)


def _masks_array(universe: int, m: int, start_rank: int, count: int) -> np.ndarray:
    return np.fromiter(iter_fixed_popcount(universe, m, start_rank, count), dtype=np.uint64)


# -- hyperoctahedral symmetry -------------------------------------------------


@lru_cache(maxsize=None)
def symmetry_table(n: int) -> np.ndarray:
    """``table[g, v]`` = image of vertex ``v`` under signed permutation ``g``.

    Rows run over all ``n! * 2**n`` maps ``v -> permute_bits(v) ^ flip``.
    """
    if n > SYMMETRY_MAX_N:
        raise ValueError(f"symmetry reduction supports n <= {SYMMETRY_MAX_N}")
    idx = np.arange(1 << n, dtype=np.int64)
    rows = []
    for perm in itertools.permutations(range(n)):
        base = np.zeros_like(idx)
        for j, pj in enumerate(perm):
            base |= ((idx >> j) & 1) << pj
        for flip in range(1 << n):
            rows.append(base ^ flip)
    table = np.array(rows, dtype=np.int64)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _image_bits(n: int) -> np.ndarray:
    return np.left_shift(np.uint64(1), symmetry_table(n).astype(np.uint64))


def canonical_masks(n: int, masks: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Least mask in the orbit of each input mask; all inputs share one popcount."""
    masks = np.asarray(masks, dtype=np.uint64)
    out = np.empty_like(masks)
    bits = _image_bits(n)
    shifts = np.arange(1 << n, dtype=np.uint64)
    for lo in range(0, masks.size, chunk):
        block = masks[lo : lo + chunk]
        members = ((block[:, None] >> shifts) & np.uint64(1)).astype(bool)
        images = np.zeros((block.size, bits.shape[0]), dtype=np.uint64)
        for i in range(block.size):
            verts = np.flatnonzero(members[i])
            if verts.size:
                images[i] = np.bitwise_or.reduce(bits[:, verts], axis=1)
        out[lo : lo + chunk] = images.min(axis=1)
    return out


def canonical_form(A: CubeSet) -> CubeSet:
    """Least bitmask in the orbit of ``A`` under coordinate permutations and flips."""
    if A.n > SYMMETRY_MAX_N:
        raise ValueError(f"canonical_form supports n <= {SYMMETRY_MAX_N}, got {A.n}")
    return CubeSet(A.n, int(canonical_masks(A.n, np.array([A.mask], dtype=np.uint64))[0]))


def orbit_work_estimate(n: int, size: int) -> int:
    """Raw candidate count that orbit generation up to ``size`` stands in for.

    Each level extends about ``C(N, k) / |G|`` representatives and canonicalises
    each extension against all ``|G|`` group elements, so the vertex-level work
    is of the order of the unreduced extension count.
    """
    N = 1 << n
    return sum(math.comb(N, k) * (N - k) for k in range(size))


def orbit_representatives(n: int, size: int) -> np.ndarray:
    """Canonical masks of every orbit of ``size``-subsets, ascending.

    Built level by level: every orbit of size ``k+1`` contains a one-point
    extension of a canonical ``k``-set, so extending all representatives and
    re-canonicalising visits every orbit.
    """
    N = 1 << n
    reps = np.zeros(1, dtype=np.uint64)
    for k in range(size):
        ext = []
        for rep in reps.tolist():
            free = [v for v in range(N) if not rep >> v & 1]
            ext.append(np.array([rep | (1 << v) for v in free], dtype=np.uint64))
        cand = np.unique(np.concatenate(ext))
        reps = np.unique(canonical_masks(n, cand))
    return reps


# -- results and cache --------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    n: int
    m: int
    beta: float
    side: str
    min_value: float
    witnesses: tuple[CubeSet, ...]
    witness_is_subcube: bool
    witness_is_hamming_ball: bool
    method: str
    sets_examined: int

    @property
    def key(self) -> tuple:
        return (self.n, self.m, self.beta, self.side, self.method)

    def to_record(self, timestamp: Optional[float] = None) -> dict:
        return {
            "key": list(self.key),
            "min_value": self.min_value,
            "witnesses": [w.to_hex() for w in self.witnesses],
            "sets_examined": self.sets_examined,
            "timestamp": time.time() if timestamp is None else timestamp,
        }

    @classmethod
    def from_record(cls, record: dict) -> SearchResult:
        n, m, beta, side, method = record["key"]
        witnesses = tuple(CubeSet.from_hex(h) for h in record["witnesses"])
        return cls(
            n=n,
            m=m,
            beta=float(beta),
            side=side,
            min_value=record["min_value"],
            witnesses=witnesses,
            witness_is_subcube=any(is_subcube(w) for w in witnesses),
            witness_is_hamming_ball=any(is_hamming_ball(w) for w in witnesses),
            method=method,
            sets_examined=record["sets_examined"],
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "beta": self.beta,
            "side": self.side,
            "min_value": self.min_value,
            "witnesses": [w.to_hex() for w in self.witnesses],
            "witness_is_subcube": self.witness_is_subcube,
            "witness_is_hamming_ball": self.witness_is_hamming_ball,
            "method": self.method,
            "sets_examined": self.sets_examined,
        }


class SearchCache:
    """Append-only JSON-lines store of finished searches (single writer)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def _key(self, n: int, m: int, beta: float, side: str, method: str) -> list:
        return [n, m, float(beta), Side(side).value, method]

    def get(self, n: int, m: int, beta: float, side: str, method: str) -> Optional[SearchResult]:
        if not self.path.exists():
            return None
        key = self._key(n, m, beta, side, method)
        with self.path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record["key"] == key:
                    return SearchResult.from_record(record)
        return None

    def put(self, result: SearchResult) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(json.dumps(result.to_record(), sort_keys=True) + "\n")


# -- minimisation -------------------------------------------------------------


def _range_min(args: tuple) -> float:
    n, m, beta, side, start, count = args
    masks = _masks_array(1 << n, m, start, count)
    return float(batch_moments(n, masks, beta, side).min())


def _range_witnesses(args: tuple) -> list[int]:
    n, m, beta, side, start, count, threshold, cap = args
    masks = _masks_array(1 << n, m, start, count)
    values = batch_moments(n, masks, beta, side)
    return masks[values <= threshold][:cap].tolist()


def _map(fn, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _finish(n, m, beta, side, method, masks: Sequence[int], examined: int) -> SearchResult:
    witnesses = tuple(CubeSet(n, int(x)) for x in masks)
    return SearchResult(
        n=n,
        m=m,
        beta=float(beta),
        side=side.value,
        min_value=moment(witnesses[0], beta, side).value,
        witnesses=witnesses,
        witness_is_subcube=any(is_subcube(w) for w in witnesses),
        witness_is_hamming_ball=any(is_hamming_ball(w) for w in witnesses),
        method=method,
        sets_examined=examined,
    )


def _exhaustive(n, m, beta, side, cap, budget, workers) -> SearchResult:
    total = math.comb(1 << n, m)
    if total > budget:
        raise ResourceRefusal(f"{total} candidate sets exceed the budget of {budget}")
    ranges = [(start, min(CHUNK, total - start)) for start in range(0, total, CHUNK)]
    mins = _map(_range_min, [(n, m, beta, side, s, c) for s, c in ranges], workers)
    best = min(mins)
    threshold = best + TIE_TOL
    found: list[int] = []
    # second pass over qualifying ranges, in order, so the witness list is the
    # ascending prefix of all near-minimisers regardless of how ranges were split
    for (start, count), local in zip(ranges, mins):
        if local <= threshold and len(found) < cap:
            found += _range_witnesses((n, m, beta, side, start, count, threshold, cap - len(found)))
    return _finish(n, m, beta, side, "exhaustive", found, total)


def _symmetry_reduced(n, m, beta, side, cap, budget) -> SearchResult:
    N = 1 << n
    size = min(m, N - m)
    work = orbit_work_estimate(n, size)
    if work > budget:
        raise ResourceRefusal(f"orbit generation covers ~{work} candidates, exceeding the budget of {budget}")
    reps = orbit_representatives(n, size)
    if size != m:
        full = np.uint64((1 << N) - 1) if N < 64 else np.uint64(2**64 - 1)
        reps = reps ^ full
    values = batch_moments(n, reps, beta, side)
    threshold = values.min() + TIE_TOL
    chosen = reps[values <= threshold]
    if size != m:
        chosen = canonical_masks(n, chosen)
    chosen = np.unique(chosen)[:cap]
    return _finish(n, m, beta, side, "symmetry_reduced", chosen.tolist(), int(reps.size))


def min_moment(
    n: int,
    m: int,
    beta: float,
    side: Side | str = Side.H,
    method: str = "exhaustive",
    *,
    witness_cap: int = WITNESS_CAP,
    budget: int = DEFAULT_BUDGET,
    override_budget: bool = False,
    workers: int = 1,
    cache: Optional[SearchCache] = None,
) -> SearchResult:
    """Minimum of ``E g_A^beta`` over all ``A`` with ``|A| = m``.

    ``method="exhaustive"`` scans every candidate (n <= 4).
    ``method="symmetry_reduced"`` scans one representative per orbit of the
    hyperoctahedral group (n <= 5); at n = 5 only small or co-small ``m`` fit the
    default budget, so it is a best-effort tool there.
    """
    check_dimension(n)
    side = Side(side)
    if not 0 <= m <= 1 << n:
        raise ValueError(f"cardinality must satisfy 0 <= m <= 2**n, got {m}")
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if cache is not None:
        hit = cache.get(n, m, beta, side.value, method)
        if hit is not None:
            return hit
    budget = math.inf if override_budget else budget
    if method == "exhaustive":
        if n > EXHAUSTIVE_MAX_N:
            raise ResourceRefusal(f"exhaustive search supports n <= {EXHAUSTIVE_MAX_N}")
        result = _exhaustive(n, m, beta, side, witness_cap, budget, workers)
    elif method == "symmetry_reduced":
        if n > SYMMETRY_MAX_N:
            raise ResourceRefusal(f"symmetry-reduced search supports n <= {SYMMETRY_MAX_N}")
        result = _symmetry_reduced(n, m, beta, side, witness_cap, budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    if cache is not None:
        cache.put(result)
    return result


# -- partitions ---------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """A partition ``(A, B, W)`` of the vertex set."""

    a: CubeSet
    b: CubeSet
    w: CubeSet
    n: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.a.n == self.b.n == self.w.n:
            raise ValueError("partition blocks live in different dimensions")
        object.__setattr__(self, "n", self.a.n)
        if self.a.mask & self.b.mask or self.a.mask & self.w.mask or self.b.mask & self.w.mask:
            raise ValueError("partition blocks overlap")
        if self.a.mask | self.b.mask | self.w.mask != CubeSet.full(self.n).mask:
            raise ValueError("partition blocks do not cover the cube")

    @classmethod
    def from_labels(cls, n: int, labels: str) -> Partition:
        if len(labels) != 1 << n or set(labels) - set("ABW"):
            raise ValueError("labels must be a string over {A, B, W} of length 2**n")
        blocks = {c: CubeSet.from_vertices(n, [v for v, l in enumerate(labels) if l == c]) for c in "ABW"}
        return cls(blocks["A"], blocks["B"], blocks["W"])

    @property
    def labels(self) -> str:
        return "".join("A" if v in self.a else "B" if v in self.b else "W" for v in range(1 << self.n))

    def cut_edges(self) -> int:
        """``|∇(A, B)|``: edges with one end in ``A`` and the other in ``B``."""
        a, b = self.a.members(), self.b.members()
        idx = np.arange(1 << self.n)
        return int(sum(int((a & b[idx ^ (1 << j)]).sum()) for j in range(self.n)))

    def functional(self, beta: float, K: float) -> float:
        return self.cut_edges() + K * self.n**beta * self.w.cardinality


def min_partition_functional(n: int, beta: float, K: float) -> tuple[float, Partition]:
    """Minimum of ``|∇(A,B)| + K n^beta |W|`` over partitions with ``|A| = 2**(n-1)``.

    For fixed ``A`` the colouring of the rest separates vertex by vertex: a vertex
    outside ``A`` costs its number of ``A``-neighbours in ``B`` and ``K n^beta`` in
    ``W``, so the optimum takes the cheaper label (``B`` on ties).
    """
    check_dimension(n)
    if n > EXHAUSTIVE_MAX_N:
        raise ResourceRefusal(f"partition search supports n <= {EXHAUSTIVE_MAX_N}")
    penalty = K * n**beta
    masks = _masks_array(1 << n, 1 << (n - 1), 0, math.comb(1 << n, 1 << (n - 1)))
    hc = batch_profiles(n, masks, Side.H_COMPLEMENT).astype(np.int64)
    outside = ~membership_matrix(n, masks)
    to_w = outside & (hc > penalty)
    cut = np.where(to_w, 0, hc).sum(axis=1)
    values = cut + penalty * to_w.sum(axis=1)
    best = int(np.flatnonzero(values <= values.min() + TIE_TOL)[0])
    a = CubeSet(n, int(masks[best]))
    w = CubeSet.from_members(n, to_w[best])
    b = CubeSet.from_members(n, outside[best] & ~to_w[best])
    part = Partition(a, b, w)
    return part.functional(beta, K), part

