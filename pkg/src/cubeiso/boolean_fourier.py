"""Fourier-Walsh analysis of functions on the discrete cube.

Vertex ``v`` is read as the point ``x`` with ``x_j = +1`` when bit ``j`` of ``v`` is 0
and ``x_j = -1`` when it is 1. A function is a numpy array of shape ``(2**n,)`` or
``(2**n, d)`` for vector values; trailing axes are carried through every operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cube_core import CubeSet, hamming_ball, popcounts
from .errors import ResourceRefusal

EXACT_TALAGRAND_MAX_N = 13
SEMIGROUP_MAX_N = 6
MAX_VECTOR_DIM = 8
MC_SAMPLES = 100_000


def dimension_of(f: np.ndarray) -> int:
    size = np.shape(f)[0]
    n = size.bit_length() - 1
    if size < 1 or 1 << n != size:
        raise ValueError(f"function length {size} is not a power of two")
    return n


def _as_function(f) -> np.ndarray:
    arr = np.asarray(f, dtype=np.float64)
    if arr.ndim not in (1, 2):
        raise ValueError("functions are arrays of shape (2**n,) or (2**n, d)")
    if arr.ndim == 2 and not 1 <= arr.shape[1] <= MAX_VECTOR_DIM:
        raise ValueError(f"vector values must have dimension 1..{MAX_VECTOR_DIM}")
    dimension_of(arr)
    return arr


def _butterfly(values: np.ndarray) -> np.ndarray:
    """Unnormalised Hadamard transform along axis 0."""
    out = np.array(values, dtype=np.float64, copy=True)
    n = dimension_of(out)
    tail = out.shape[1:]
    for j in range(n):
        view = out.reshape((-1, 2, 1 << j) + tail)
        a = view[:, 0].copy()
        b = view[:, 1]
        view[:, 0] = a + b
        view[:, 1] = a - b
    return out


def walsh_transform(f) -> np.ndarray:
    """Coefficients ``f^(S) = E f(x) x^S`` indexed by the subset mask ``S``."""
    f = _as_function(f)
    return _butterfly(f) / f.shape[0]


def inverse_walsh(coeffs) -> np.ndarray:
    return _butterfly(_as_function(coeffs))


def character(n: int, S: int) -> np.ndarray:
    """The Walsh function ``x^S``."""
    v = np.arange(1 << n)
    return 1.0 - 2.0 * (popcounts(n)[v & S] & 1)


def levels(n: int) -> np.ndarray:
    """``|S|`` for every subset mask."""
    return popcounts(n)


def norm(f, p: float) -> float:
    """``(E |f|^p)^(1/p)`` with the Euclidean norm for vector values; ``p = inf`` allowed."""
    f = _as_function(f)
    mag = np.abs(f) if f.ndim == 1 else np.linalg.norm(f, axis=1)
    if math.isinf(p):
        return float(mag.max())
    return (math.fsum((mag**p).tolist()) / mag.size) ** (1 / p)


# -- gradients ----------------------------------------------------------------


def partial_difference(f, j: int) -> np.ndarray:
    """``D_j f(x) = (f(x) - f(x with x_j negated)) / 2``."""
    f = _as_function(f)
    n = dimension_of(f)
    if not 0 <= j < n:
        raise ValueError(f"direction {j} out of range for n={n}")
    idx = np.arange(1 << n) ^ (1 << j)
    return (f - f[idx]) / 2


def all_partial_differences(f) -> np.ndarray:
    """Stacked ``D_j f`` with shape ``(n, 2**n, ...)``."""
    f = _as_function(f)
    return np.stack([partial_difference(f, j) for j in range(dimension_of(f))])


def gradient_squares(f) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise ``|grad f|^2`` and ``|M f|^2`` with ``M`` keeping only positive parts.

    For indicators ``4|M 1_A|^2 = h_A`` and ``4|grad 1_A|^2 = w_A`` hold exactly in floats.
    """
    f = _as_function(f)
    if f.ndim != 1:
        raise ValueError("gradients are defined here for real-valued functions")
    D = all_partial_differences(f)
    return (D**2).sum(axis=0), (np.maximum(D, 0.0) ** 2).sum(axis=0)


def gradient_norms(f) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise ``|grad f|`` and ``|M f|``."""
    grad2, mono2 = gradient_squares(f)
    return np.sqrt(grad2), np.sqrt(mono2)


def indicator(A: CubeSet) -> np.ndarray:
    return A.members().astype(np.float64)


def sign_function(A: CubeSet) -> np.ndarray:
    """``1 - 2 * 1_A``: -1 on ``A`` and +1 off it."""
    return 1.0 - 2.0 * indicator(A)


# -- heat semigroup -----------------------------------------------------------


def heat(f, t: float) -> np.ndarray:
    """``e^{-t Delta} f``: the coefficient at ``S`` is scaled by ``e^{-t|S|}``."""
    if t < 0:
        raise ValueError("heat time must be non-negative")
    f = _as_function(f)
    coeffs = walsh_transform(f)
    mult = np.exp(-t * levels(dimension_of(f)))
    return inverse_walsh(coeffs * mult.reshape((-1,) + (1,) * (f.ndim - 1)))


def laplacian_heat(f, t: float) -> np.ndarray:
    """``Delta e^{-t Delta} f = -(d/dt) e^{-t Delta} f``."""
    f = _as_function(f)
    k = levels(dimension_of(f))
    coeffs = walsh_transform(f) * (k * np.exp(-t * k)).reshape((-1,) + (1,) * (f.ndim - 1))
    return inverse_walsh(coeffs)


def check_semigroup_identity(f, t: float) -> float:
    """Max error of ``Delta e^{-t Delta} f = (e^{2t}-1)^{-1/2} E_xi sum_j delta_j D_j f(xi x)``.

    ``xi_j = +-1`` with probability ``(1 +- e^{-t})/2``; the expectation is a
    ``2**n``-term sum, so the check is limited to ``n <= 6``.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    f = _as_function(f)
    n = dimension_of(f)
    if n > SEMIGROUP_MAX_N:
        raise ResourceRefusal(f"exact expectation over xi needs n <= {SEMIGROUP_MAX_N}")
    size = 1 << n
    mean = math.exp(-t)
    sd = math.sqrt(1 - mean * mean)
    u = np.arange(size)
    bits = (u[:, None] >> np.arange(n)) & 1  # bit 1 means xi_j = -1
    xi = 1.0 - 2.0 * bits
    weight = np.prod(np.where(bits == 1, (1 - mean) / 2, (1 + mean) / 2), axis=1)
    delta = (xi - mean) / sd  # (size, n)
    D = all_partial_differences(f)  # (n, size, ...)
    # xi x as a vertex is v ^ u
    shifted = D[:, u[:, None] ^ u[None, :]]  # (n, u, v, ...)
    coef = (weight[:, None] * delta).T  # (n, u)
    rhs = np.einsum("ju,juv...->v...", coef, shifted) / math.sqrt(math.expm1(2 * t))
    return float(np.max(np.abs(laplacian_heat(f, t) - rhs)))


# -- Talagrand functional -----------------------------------------------------


def _signs(n: int, verts: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * ((verts[:, None] >> np.arange(n)) & 1)


def talagrand_Df_norm(f, p: float, *, chunk: int = 1 << 10) -> float:
    """``(E ||sum_j x'_j D_j f(x)||^p)^(1/p)`` over independent uniform ``x, x'``, exactly.

    The double expectation costs ``4**n``; it is computed in blocks of ``x'`` with a
    fixed summation order.
    """
    if not 1 <= p <= 2:
        raise ValueError("p must lie in [1, 2]")
    f = _as_function(f)
    n = dimension_of(f)
    if n > EXACT_TALAGRAND_MAX_N:
        raise ResourceRefusal(f"exact Talagrand norm needs n <= {EXACT_TALAGRAND_MAX_N}; use the Monte Carlo variant")
    D = all_partial_differences(f)
    if D.ndim == 2:
        D = D[..., None]
    size = 1 << n
    partial = []
    for start in range(0, size, chunk):
        S = _signs(n, np.arange(start, min(size, start + chunk)))  # (c, n)
        vec = np.einsum("cj,jvd->cvd", S, D)
        partial.append(math.fsum((np.linalg.norm(vec, axis=2) ** p).sum(axis=1).tolist()))
    return (math.fsum(partial) / (size * size)) ** (1 / p)


def talagrand_Df_norm_mc(f, p: float, samples: int = MC_SAMPLES, seed: int = 0) -> tuple[float, float]:
    """Monte Carlo estimate of :func:`talagrand_Df_norm` and its standard error."""
    if not 1 <= p <= 2:
        raise ValueError("p must lie in [1, 2]")
    f = _as_function(f)
    n = dimension_of(f)
    rng = np.random.default_rng(seed)
    D = all_partial_differences(f)
    if D.ndim == 2:
        D = D[..., None]
    xs = rng.integers(0, 1 << n, size=samples)
    S = _signs(n, rng.integers(0, 1 << n, size=samples))
    vec = np.einsum("sj,jsd->sd", S, D[:, xs])
    vals = np.linalg.norm(vec, axis=1) ** p
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    if mean == 0:
        return 0.0, se ** (1 / p)
    return mean ** (1 / p), se * mean ** (1 / p - 1) / p


# -- spectral statistics ------------------------------------------------------


@dataclass(frozen=True)
class SpectralStats:
    n: int
    variance: float
    W: float
    tails: tuple[float, ...]  # tails[d] = sum_{|S| >= d} f^(S)^2, d = 0..n+1

    def tail(self, d: int) -> float:
        return self.tails[min(max(d, 0), self.n + 1)]

    def to_dict(self) -> dict:
        return {"n": self.n, "variance": self.variance, "W": self.W, "tails": list(self.tails)}


def level_weights(f) -> np.ndarray:
    """``sum_{|S| = k} f^(S)^2`` for ``k = 0..n``."""
    f = _as_function(f)
    n = dimension_of(f)
    sq = walsh_transform(f) ** 2
    if sq.ndim == 2:
        sq = sq.sum(axis=1)
    k = levels(n)
    return np.array([math.fsum(sq[k == d].tolist()) for d in range(n + 1)])


def spectral_stats(f) -> SpectralStats:
    f = _as_function(f)
    n = dimension_of(f)
    w = level_weights(f)
    tails = tuple(math.fsum(w[d:].tolist()) for d in range(n + 2))
    D = all_partial_differences(f)
    mags = np.abs(D) if D.ndim == 2 else np.linalg.norm(D, axis=2)
    W = math.fsum((math.fsum(row.tolist()) / (1 << n)) ** 2 for row in mags)
    return SpectralStats(n, tails[1], W, tails)


@dataclass(frozen=True)
class FBoundRatio:
    lhs: float
    rhs: float
    ratio: float
    argmax_d: int

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio, "argmax_d": self.argmax_d}


def fbound_ratio(f, p: float) -> FBoundRatio:
    """``||grad f||_p`` against ``sup_d tail(d)^(1/p) sqrt(d)``; reported, not asserted."""
    if not 1 <= p <= 2:
        raise ValueError("p must lie in [1, 2]")
    f = _as_function(f)
    if f.ndim != 1 or not np.all(np.abs(f) == 1):
        raise ValueError("fbound_ratio expects a +-1 valued function")
    grad, _ = gradient_norms(f)
    lhs = norm(grad, p)
    stats = spectral_stats(f)
    rhs_terms = [stats.tail(d) ** (1 / p) * math.sqrt(d) for d in range(stats.n + 1)]
    d_best = int(np.argmax(rhs_terms))
    rhs = rhs_terms[d_best]
    return FBoundRatio(lhs, rhs, lhs / rhs if rhs > 0 else math.inf, d_best)


# -- noise stability ----------------------------------------------------------


def stability(f, rho: float) -> float:
    """``Stab_rho(f) = sum_S rho^{|S|} f^(S)^2``."""
    w = level_weights(f)
    return math.fsum(float(rho**k * w[k]) for k in range(w.size))


def noise_sensitivity(f, delta: float) -> float:
    """``P(f(x) != f(y))`` for delta-correlated pairs of a +-1 valued ``f``."""
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    return (1 - stability(f, 1 - 2 * delta)) / 2


def noise_stability_suite(f, p: float = 1.0, q: float = 2.0, t: float = 0.5, delta: Optional[float] = None) -> dict:
    """Ratios around the heat semigroup; only the hypercontractive ratio is asserted (``<= 1``)."""
    if q != 2:
        raise ValueError("only the Euclidean case q = 2 is supported")
    if t <= 0:
        raise ValueError("t must be positive")
    f = _as_function(f)
    n = dimension_of(f)
    l2 = norm(f, 2)
    if l2 == 0:
        raise ValueError("degenerate function with ||f||_2 = 0")
    ft = heat(f, t)
    drift = norm(f - ft, p)
    df = talagrand_Df_norm(f, p) if n <= EXACT_TALAGRAND_MAX_N else talagrand_Df_norm_mc(f, p)[0]
    scale = (-math.expm1(-2 * t)) ** (1 / q) * df
    eps = -math.expm1(-2 * t)
    hyper = norm(ft, 2) / (l2 * (norm(f, 1) / l2) ** (eps / (2 - eps)))
    report = {
        "n": n,
        "p": p,
        "q": q,
        "t": t,
        "drift": drift,
        "Df_norm": df,
        "stability_ratio": drift / scale if scale > 0 else (0.0 if drift == 0 else math.inf),
        "hypercontractive_ratio": hyper,
        "hypercontractive_ok": hyper <= 1 + 1e-9,
    }
    if f.ndim == 1 and np.all(np.abs(f) == 1):
        delta = -math.expm1(-t) / 2 if delta is None else delta
        stats = spectral_stats(f)
        grad, _ = gradient_norms(f)
        ns = noise_sensitivity(f, delta)
        lower = stats.variance * (1 - (stats.W / stats.variance) ** (delta / (2 - delta))) if stats.variance > 0 else 0.0
        d = max(1, round(1 / t))
        report.update(
            {
                "delta": delta,
                "noise_sensitivity": ns,
                "sqrt_delta_grad_l1": math.sqrt(delta) * norm(grad, 1),
                "variance_W_lower_shape": lower,
                "tail_degree": d,
                "tail_drift_ratio": norm(f - heat(f, 1 / d), p) / stats.tail(d) ** (1 / p) if stats.tail(d) > 0 else math.inf,
            }
        )
    return report


# -- corpus -------------------------------------------------------------------


def dictator(n: int, j: int = 0) -> np.ndarray:
    return character(n, 1 << j)


def parity(n: int) -> np.ndarray:
    return character(n, (1 << n) - 1)


def majority(n: int) -> np.ndarray:
    """``sign(sum_j x_j)`` for odd ``n``."""
    if n % 2 == 0:
        raise ValueError("majority needs odd n")
    return np.where(popcounts(n) < n / 2, 1.0, -1.0)


def tribes(n: int, width: int) -> np.ndarray:
    """OR of ANDs over consecutive blocks of ``width`` coordinates; -1 encodes True (``x_j = -1``)."""
    if width < 1 or n % width:
        raise ValueError("tribes needs width dividing n")
    v = np.arange(1 << n)
    block = (1 << width) - 1
    hit = np.zeros(1 << n, dtype=bool)
    for b in range(n // width):
        hit |= ((v >> (b * width)) & block) == block
    return np.where(hit, -1.0, 1.0)


def half_cube_function(n: int, j: int = 0) -> np.ndarray:
    """``1 - 2 * 1_A`` for ``A = {bit j = 1}``; equal to the dictator ``x_j``."""
    return sign_function(CubeSet.from_members(n, (np.arange(1 << n) >> j) & 1 == 1))


def hamming_ball_function(n: int, r: float, center: int = 0) -> np.ndarray:
    return sign_function(hamming_ball(n, center, r))


def corpus(name: str) -> np.ndarray:
    """Functions by name: ``dictator<n>``, ``parity<n>``, ``maj<n>``, ``tribes<n>`` (width 2), ``halfcube<n>``, ``ball<n>``."""
    import re

    match = re.fullmatch(r"(dictator|parity|maj|tribes|halfcube|ball)(\d+)", name)
    if not match:
        raise ValueError(f"unknown corpus function {name!r}")
    kind, n = match.group(1), int(match.group(2))
    if kind == "dictator":
        return dictator(n)
    if kind == "parity":
        return parity(n)
    if kind == "maj":
        return majority(n)
    if kind == "tribes":
        return tribes(n, 2)
    if kind == "halfcube":
        return half_cube_function(n)
    return hamming_ball_function(n, (n - 1) / 2)


STANDARD_CORPUS = ("dictator3", "maj3", "maj5", "parity4", "tribes4", "halfcube4", "ball5")
MONOTONE_CORPUS = ("dictator3", "maj3", "maj5", "tribes4", "halfcube4", "ball5")
