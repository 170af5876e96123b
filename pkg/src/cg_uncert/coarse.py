"""Coarse-grained measurement statistics.

Binning of continuous densities into fixed-width windows, discrete variances
and Renyi entropies of the resulting probability vectors, generalized
histogram profiles (flat or truncated-Gaussian within each bin), densities
reconstructed from binned data, the variance/entropy decomposition
identities, and a finite-statistics inverse-CDF sampler.

Grid convention: bin j of a grid (width eta, offset) covers
[offset + (j - 1/2) eta, offset + (j + 1/2) eta), half-open on the right,
with center z_j = offset + j eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .numerics import DEFAULT_QUAD, NonConvergence, QuadSpec, gauss_legendre_panels, integrate
from .relations import DomainError
from .specfun import bin_profile_norm, ghf_ent_shape, ghf_var_shape
from .states import Density1D

__all__ = [
    "EPS_TAIL",
    "MAX_BINS",
    "TailBudgetExceeded",
    "WidthMismatch",
    "BinnedDistribution",
    "GhfSpec",
    "RECTANGLE",
    "TRUNCATED_GAUSSIAN",
    "rectangle",
    "truncated_gaussian",
    "ReconstructedPdf",
    "bin_density",
    "discrete_variance",
    "discrete_renyi",
    "ghf_variance",
    "ghf_entropy",
    "reconstruct_pdf",
    "decompose_stats",
    "sample_counts",
]

EPS_TAIL = 1e-9
MAX_BINS = 10 ** 6

RECTANGLE = "rectangle"
TRUNCATED_GAUSSIAN = "truncated_gaussian"

# |a| eta^2 beyond this makes the profile exp(-a u^2/eta^2) itself overflow
# pointwise in double precision; the shape functions reach further but the
# profile could never be evaluated or sampled, so the spec type rejects it.
_MAX_PROFILE_T = 2500.0


class TailBudgetExceeded(RuntimeError):
    """Bin enumeration hit the bin budget before capturing 1 - EPS_TAIL."""


class WidthMismatch(ValueError):
    """Histogram profile width does not match the binned grid width."""


@dataclass(frozen=True)
class GhfSpec:
    """Per-bin histogram profile: flat, or exp(-a (u/eta)^2) truncated to the
    bin (a > 0 concentrates toward the center, a < 0 toward the edges)."""

    family: str
    eta: float
    a: float = 0.0

    def __post_init__(self) -> None:
        if self.family not in (RECTANGLE, TRUNCATED_GAUSSIAN):
            raise ValueError(f"unknown profile family {self.family!r}")
        if not (self.eta > 0.0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be positive and finite, got {self.eta}")
        if self.family == RECTANGLE:
            if self.a != 0.0:
                raise ValueError("rectangle profile takes no shape parameter")
        else:
            if not math.isfinite(self.a):
                raise ValueError("shape parameter a must be finite")
            if abs(self.a) * self.eta ** 2 > _MAX_PROFILE_T:
                raise ValueError(
                    f"|a|*eta^2 = {abs(self.a) * self.eta ** 2:g} too extreme "
                    f"to represent (limit {_MAX_PROFILE_T:g})")

    @property
    def t(self) -> float:
        return self.a * self.eta ** 2


def rectangle(eta: float) -> GhfSpec:
    return GhfSpec(RECTANGLE, eta)


def truncated_gaussian(eta: float, a: float) -> GhfSpec:
    return GhfSpec(TRUNCATED_GAUSSIAN, eta, a)


@dataclass(frozen=True)
class BinnedDistribution:
    width: float
    offset: float
    probs: dict  # bin index -> probability
    tail_mass: float

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValueError(f"width must be positive and finite, got {self.width}")
        if not math.isfinite(self.offset):
            raise ValueError("offset must be finite")
        if not self.probs:
            raise ValueError("need at least one bin")
        cleaned = {}
        for j, p in self.probs.items():
            if p < -1e-12:
                raise ValueError(f"negative probability {p} in bin {j}")
            cleaned[int(j)] = max(float(p), 0.0)
        object.__setattr__(self, "probs", cleaned)
        tail = float(self.tail_mass)
        if tail < -1e-12:
            raise ValueError(f"negative tail mass {tail}")
        tail = max(tail, 0.0)
        if tail > EPS_TAIL + 1e-12:
            raise ValueError(f"tail mass {tail} exceeds the budget {EPS_TAIL}")
        object.__setattr__(self, "tail_mass", tail)
        total = math.fsum(cleaned.values()) + tail
        if abs(total - 1.0) > 1e-9 + 1e-12:
            raise ValueError(f"probabilities plus tail sum to {total}, not 1")

    def center(self, j: int) -> float:
        return self.offset + j * self.width

    def arrays(self) -> tuple:
        """(bin indices, probabilities) as aligned numpy arrays."""
        j = np.array(sorted(self.probs), dtype=np.int64)
        p = np.array([self.probs[int(i)] for i in j], dtype=float)
        return j, p


@dataclass(frozen=True)
class ReconstructedPdf:
    """Density assembled as sum_j p_j * D(x - z_j) with the profile D
    confined to one bin; evaluates to 0 outside the binned range."""

    base: BinnedDistribution
    ghf: GhfSpec

    def __post_init__(self) -> None:
        if abs(self.ghf.eta - self.base.width) > 1e-12 * self.base.width:
            raise WidthMismatch(
                f"profile width {self.ghf.eta} != grid width {self.base.width}")
        j, p = self.base.arrays()
        jmin, jmax = int(j[0]), int(j[-1])
        dense = np.zeros(jmax - jmin + 1)
        dense[j - jmin] = p
        object.__setattr__(self, "_jmin", jmin)
        object.__setattr__(self, "_dense", dense)

    def eval(self, x):
        b, g = self.base, self.ghf
        x = np.asarray(x, dtype=float)
        j = np.floor((x - b.offset) / b.width + 0.5).astype(np.int64)
        idx = j - self._jmin
        valid = (idx >= 0) & (idx < self._dense.size)
        pj = np.where(valid, self._dense[np.clip(idx, 0, self._dense.size - 1)], 0.0)
        if g.family == RECTANGLE:
            return pj / g.eta
        v = (x - (b.offset + j * b.width)) / g.eta
        t = g.t
        return pj * np.exp(-t * v * v) / (g.eta * bin_profile_norm(t))

    def density(self) -> Density1D:
        b = self.base
        j, p = b.arrays()
        half = 0.5 * b.width
        lo = b.center(int(j[0])) - half
        hi = b.center(int(j[-1])) + half
        edges = tuple(b.center(int(i)) - half for i in j[1:])
        mean = float(np.dot(p, b.offset + j * b.width))
        m2 = discrete_variance(b) + ghf_variance(self.ghf) + mean ** 2
        return Density1D(eval=self.eval, support=(lo, hi), discontinuities=edges,
                         known_mean=mean, known_m2=m2)


# ---------------------------------------------------------------------------
# binning


def _bin_edges(j, width: float, offset: float):
    lo = offset + (np.asarray(j, dtype=float) - 0.5) * width
    return lo, lo + width


def _clean_block_masses(d: Density1D, j_arr: np.ndarray, width: float,
                        offset: float, spec: QuadSpec) -> np.ndarray:
    """Masses of bins lying fully inside the support with no interior cuts,
    by fixed-order panel quadrature with an order cross-check."""
    lo, hi = _bin_edges(j_arr, width, offset)
    if d.osc_scale is not None:
        per = max(1, int(math.ceil(2.0 * width / d.osc_scale)))
    else:
        per = 1
    if per == 1:
        lo_p, hi_p = lo, hi
    else:
        steps = np.arange(per) / per
        lo_p = (lo[:, None] + width * steps[None, :]).ravel()
        hi_p = lo_p + width / per
    v16 = gauss_legendre_panels(d.eval, lo_p, hi_p, 16).reshape(len(j_arr), per).sum(axis=1)
    v32 = gauss_legendre_panels(d.eval, lo_p, hi_p, 32).reshape(len(j_arr), per).sum(axis=1)
    bad = np.abs(v32 - v16) > np.maximum(1e-15, 1e-12 * np.abs(v32))
    if np.any(bad):
        for i in np.nonzero(bad)[0]:
            v32[i] = integrate(lambda x: float(d.eval(x)), float(lo[i]), float(hi[i]), spec)
    return np.maximum(v32, 0.0)


def _single_bin_mass(d: Density1D, j: int, width: float, offset: float,
                     cuts, spec: QuadSpec) -> float:
    lo_s, hi_s = d.support
    a = offset + (j - 0.5) * width
    b = a + width
    a = max(a, lo_s)
    b = min(b, hi_s)
    if not a < b:
        return 0.0
    points = [a] + [c for c in cuts if a < c < b] + [b]
    total = 0.0
    for left, right in zip(points[:-1], points[1:]):
        total += integrate(lambda x: float(d.eval(x)), left, right, spec)
    return max(total, 0.0)


def bin_density(d: Density1D, eta: float, offset: float = 0.0,
                spec: QuadSpec = DEFAULT_QUAD) -> BinnedDistribution:
    """Bin a density on the grid (eta, offset).

    Bins are enumerated outward from the heaviest one until the cumulative
    mass reaches 1 - EPS_TAIL; integrals split at density discontinuities
    and support edges.
    """
    if not (eta > 0.0 and math.isfinite(eta)):
        raise ValueError(f"bin width must be positive and finite, got {eta}")
    lo_s, hi_s = d.support
    cuts = sorted(d.discontinuities)

    def j_of(x: float) -> int:
        return int(math.floor((x - offset) / eta + 0.5))

    for x0 in (d.known_mean,
               0.5 * (lo_s + hi_s) if math.isfinite(lo_s) and math.isfinite(hi_s) else None,
               0.0):
        if x0 is not None and math.isfinite(x0):
            break

    def is_clean(j: int) -> bool:
        a = offset + (j - 0.5) * eta
        b = a + eta
        if a < lo_s or b > hi_s:
            return False
        return not any(a < c < b for c in cuts)

    def masses_for(js: list) -> dict:
        out = {}
        clean = [j for j in js if is_clean(j)]
        if clean:
            vals = _clean_block_masses(d, np.array(clean, dtype=np.int64), eta, offset, spec)
            out.update(zip(clean, (float(v) for v in vals)))
        for j in js:
            if j not in out:
                out[j] = _single_bin_mass(d, j, eta, offset, cuts, spec)
        return out

    j0 = j_of(x0)
    seeds = [j0 - 1, j0, j0 + 1]
    masses = masses_for(seeds)
    start = max(seeds, key=lambda j: masses[j])
    # re-anchor on the seed trio's heaviest and grow outward from it
    jl = j0 - 1
    jr = j0 + 1
    cum = math.fsum(masses.values())
    block_l = block_r = 16
    left_open = True
    right_open = True
    target = 1.0 - EPS_TAIL
    while cum < target:
        if not (left_open or right_open):
            raise NonConvergence(
                f"binning stalled at cumulative mass {cum!r}; density may not "
                f"be normalized")
        if len(masses) > MAX_BINS:
            raise TailBudgetExceeded(
                f"more than {MAX_BINS} bins needed to reach 1 - {EPS_TAIL}")
        grew = False
        if left_open:
            js = list(range(jl - block_l, jl))
            edge_hi = offset + (jl - 0.5) * eta  # right edge of the new block
            if edge_hi <= lo_s:
                left_open = False
            else:
                new = masses_for(js)
                masses.update(new)
                cum += math.fsum(new.values())
                jl -= block_l
                block_l = min(block_l * 2, 8192)
                grew = True
        if cum >= target:
            break
        if right_open:
            js = list(range(jr + 1, jr + 1 + block_r))
            edge_lo = offset + (jr + 0.5) * eta  # left edge of the new block
            if edge_lo >= hi_s:
                right_open = False
            else:
                new = masses_for(js)
                masses.update(new)
                cum += math.fsum(new.values())
                jr += block_r
                block_r = min(block_r * 2, 8192)
                grew = True
        if not grew and not (left_open or right_open):
            continue  # loop guard above raises
    # drop empty bins at the extremes, keep interior zeros
    keys = sorted(masses)
    while keys and masses[keys[0]] <= 0.0 and keys[0] != start:
        del masses[keys.pop(0)]
    while keys and masses[keys[-1]] <= 0.0 and keys[-1] != start:
        del masses[keys.pop()]
    return BinnedDistribution(width=eta, offset=offset, probs=masses,
                              tail_mass=max(0.0, 1.0 - cum))


# ---------------------------------------------------------------------------
# discrete statistics


def discrete_variance(b: BinnedDistribution) -> float:
    """Variance of the bin-center distribution sum_j p_j at z_j."""
    j, p = b.arrays()
    z = b.offset + j.astype(float) * b.width
    mean = float(np.dot(p, z))
    return float(np.dot(p, (z - mean) ** 2))


def discrete_renyi(b: BinnedDistribution, alpha: float) -> float:
    """Renyi entropy of order alpha of the bin probabilities, in nats.

    alpha = 1 is the Shannon branch, alpha = inf the min-entropy; the tail
    mass (below EPS_TAIL) is ignored.
    """
    if not alpha > 0.0:
        raise DomainError(f"entropy order must be positive, got {alpha}")
    _, p = b.arrays()
    p = p[p > 0.0]
    if alpha == 1.0:
        return float(-np.dot(p, np.log(p))) + 0.0
    if math.isinf(alpha):
        return -math.log(float(np.max(p))) + 0.0
    return float(logsumexp(alpha * np.log(p))) / (1.0 - alpha) + 0.0


def ghf_variance(g: GhfSpec) -> float:
    """Variance of the per-bin profile around the bin center."""
    if g.family == RECTANGLE:
        return g.eta ** 2 / 12.0
    return g.eta ** 2 * ghf_var_shape(g.t)


def ghf_entropy(g: GhfSpec) -> float:
    """Shannon entropy of the per-bin profile (maximal, ln eta, when flat)."""
    if g.family == RECTANGLE:
        return math.log(g.eta)
    return math.log(g.eta) + ghf_ent_shape(g.t)


def reconstruct_pdf(b: BinnedDistribution, g: GhfSpec) -> ReconstructedPdf:
    """Density with the per-bin profile placed at each occupied bin."""
    return ReconstructedPdf(base=b, ghf=g)


def decompose_stats(b: BinnedDistribution, g: GhfSpec) -> tuple:
    """(variance, Shannon entropy) of the reconstructed density via the exact
    decomposition: discrete part plus profile part."""
    if abs(g.eta - b.width) > 1e-12 * b.width:
        raise WidthMismatch(f"profile width {g.eta} != grid width {b.width}")
    return (discrete_variance(b) + ghf_variance(g),
            discrete_renyi(b, 1.0) + ghf_entropy(g))


# ---------------------------------------------------------------------------
# finite-statistics sampling

_CDF_POINTS = 1 << 16


def _sampling_window(d: Density1D) -> tuple:
    lo, hi = d.support
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    m = d.known_mean if d.known_mean is not None else 0.0
    if d.known_mean is not None and d.known_m2 is not None:
        var = max(d.known_m2 - d.known_mean ** 2, 0.0)
        s = math.sqrt(var) if var > 0.0 else 1.0
    else:
        s = 1.0
    w = 8.0 * s
    for _ in range(60):
        a = lo if math.isfinite(lo) else m - w
        b = hi if math.isfinite(hi) else m + w
        edges = np.linspace(a, b, 4097)
        mass = float(np.sum(gauss_legendre_panels(d.eval, edges[:-1], edges[1:], 8)))
        if mass >= 1.0 - 0.5 * EPS_TAIL:
            return a, b
        w *= 2.0
    raise NonConvergence("sampling window did not capture the required mass")


def sample_counts(d: Density1D, eta: float, offset: float, n: int,
                  seed: int) -> BinnedDistribution:
    """Empirical bin frequencies from n inverse-CDF draws.

    The CDF is tabulated on a fixed fine grid (so results are deterministic
    for a given seed) and inverted by linear interpolation.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if not (eta > 0.0 and math.isfinite(eta)):
        raise ValueError(f"bin width must be positive and finite, got {eta}")
    a, b = _sampling_window(d)
    xs = np.linspace(a, b, _CDF_POINTS)
    seg = gauss_legendre_panels(d.eval, xs[:-1], xs[1:], 8)
    cdf = np.concatenate(([0.0], np.cumsum(seg)))
    cdf /= cdf[-1]
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    x = np.interp(u, cdf, xs)
    j = np.floor((x - offset) / eta + 0.5).astype(np.int64)
    idx, counts = np.unique(j, return_counts=True)
    probs = {int(i): float(c) / n for i, c in zip(idx, counts)}
    return BinnedDistribution(width=eta, offset=offset, probs=probs, tail_mass=0.0)
