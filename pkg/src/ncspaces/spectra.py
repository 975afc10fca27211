"""Band spectra of the discrete magnetic Laplacian h = u + u* + v + v* at
rational flux, Hausdorff distances between band unions, and continuity scans.

At flux p/q the operator reduces over two Bloch phases to the q x q family

    H(k1, k2) = diag(2 cos(k2 + 2 pi p j / q))
                + raising/lowering on the cyclic superdiagonals,
                  with corner entries e^{+-i q k1};

its spectrum is the union over (k1, k2) of the q eigenvalue curves, and each
sorted eigenvalue branch sweeps out one closed band.
"""
from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateFitError, SizeCapError, ValidationError

MERGE_TOL = 1e-9
DEFAULT_Q_CAP = 200


def bloch_matrix(p: int, q: int, k1: float, k2: float) -> np.ndarray:
    """The q x q Hermitian Bloch matrix at flux p/q and phases (k1, k2)."""
    if q < 1:
        raise ValidationError("q must be a positive integer")
    j = np.arange(q)
    h = np.diag(2.0 * np.cos(k2 + 2.0 * np.pi * p * j / q)).astype(complex)
    if q == 1:
        h[0, 0] += 2.0 * np.cos(k1)
        return h
    for i in range(q - 1):
        h[i + 1, i] += 1.0
        h[i, i + 1] += 1.0
    h[0, q - 1] += np.exp(1j * q * k1)
    h[q - 1, 0] += np.exp(-1j * q * k1)
    return h


@dataclass(frozen=True)
class BandSpectrum:
    """Sorted disjoint closed intervals approximating a spectrum."""

    bands: Tuple[Tuple[float, float], ...]
    p: int
    q: int
    phase_grid: int

    def __post_init__(self):
        for a, b in self.bands:
            if b < a:
                raise ValidationError(f"band [{a}, {b}] is inverted")
        for (_, b1), (a2, _) in zip(self.bands, self.bands[1:]):
            if a2 <= b1:
                raise ValidationError("bands must be sorted and disjoint")

    @property
    def flux(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def min(self) -> float:
        return self.bands[0][0]

    @property
    def max(self) -> float:
        return self.bands[-1][1]

    def total_width(self) -> float:
        return sum(b - a for a, b in self.bands)


def merge_intervals(
    intervals: Sequence[Tuple[float, float]], tol: float = MERGE_TOL
) -> Tuple[Tuple[float, float], ...]:
    """Sort and merge intervals that overlap or touch within tol."""
    ivs = sorted((float(a), float(b)) for a, b in intervals)
    out: List[List[float]] = []
    for a, b in ivs:
        if out and a <= out[-1][1] + tol:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


def _eigenvalue_sweep(p: int, q: int, resolution: int, chunk: int = 0) -> np.ndarray:
    """Min/max of each sorted eigenvalue branch over the phase grid: (2, q)."""
    if chunk <= 0:
        # keep the staged Bloch stack around 60 MB
        chunk = max(1, int(6e7 / (resolution * q * q * 16)))
    ks = 2.0 * np.pi * np.arange(resolution) / resolution
    j = np.arange(q)
    lo = np.full(q, np.inf)
    hi = np.full(q, -np.inf)
    base = np.zeros((q, q), dtype=complex)
    if q > 1:
        for i in range(q - 1):
            base[i + 1, i] = 1.0
            base[i, i + 1] = 1.0
    for start in range(0, resolution, chunk):
        k1s = ks[start : start + chunk]
        stack = np.broadcast_to(base, (len(k1s), resolution, q, q)).copy()
        if q > 1:
            corner = np.exp(1j * q * k1s)
            stack[:, :, 0, q - 1] += corner[:, None]
            stack[:, :, q - 1, 0] += np.conj(corner)[:, None]
        else:
            stack[:, :, 0, 0] += 2.0 * np.cos(k1s)[:, None]
        diag = 2.0 * np.cos(ks[None, :, None] + 2.0 * np.pi * p * j[None, None, :] / q)
        ii = np.arange(q)
        stack[:, :, ii, ii] += diag
        evs = np.linalg.eigvalsh(stack.reshape(-1, q, q))
        lo = np.minimum(lo, evs.min(axis=0))
        hi = np.maximum(hi, evs.max(axis=0))
    return np.stack([lo, hi])


def amo_spectrum(
    p: int,
    q: int,
    phase_resolution: int = 128,
    q_cap: int = DEFAULT_Q_CAP,
) -> BandSpectrum:
    """Union of the Bloch eigenvalue branches at flux p/q over the phase grid.

    Branch extrema are smooth in the phases, so the interval hull of each
    branch converges to the true band at second order in the grid pitch.
    """
    if q < 1:
        raise ValidationError("q must be a positive integer")
    if phase_resolution < 16:
        raise ValidationError("phase resolution must be >= 16")
    if q > q_cap:
        raise SizeCapError(f"q = {q} exceeds the cost guard {q_cap}")
    sweep = _eigenvalue_sweep(p % q if q else p, q, phase_resolution)
    bands = merge_intervals(zip(sweep[0], sweep[1]))
    return BandSpectrum(bands, p, q, phase_resolution)


# -- Hausdorff distance ----------------------------------------------------------


def _point_to_bands(x: float, bands: Sequence[Tuple[float, float]]) -> float:
    return min(
        0.0 if a <= x <= b else min(abs(x - a), abs(x - b)) for a, b in bands
    )


def _directed(a_bands, b_bands) -> float:
    """sup over the first set of the distance to the second.

    The supremum over a union of intervals is attained at an interval endpoint
    or at a gap midpoint of the other set lying inside this one.
    """
    candidates = [e for ab in a_bands for e in ab]
    for (_, b1), (a2, _) in zip(b_bands, b_bands[1:]):
        mid = 0.5 * (b1 + a2)
        if any(a <= mid <= b for a, b in a_bands):
            candidates.append(mid)
    return max(_point_to_bands(x, b_bands) for x in candidates)


def hausdorff_distance(a: BandSpectrum, b: BandSpectrum) -> float:
    """Exact Hausdorff distance between two closed interval unions."""
    if not a.bands or not b.bands:
        raise ValidationError("cannot measure distance to an empty spectrum")
    return max(_directed(a.bands, b.bands), _directed(b.bands, a.bands))


# -- continuity scan ----------------------------------------------------------------


@dataclass(frozen=True)
class HolderScanResult:
    base: Fraction
    offsets: List[Fraction]
    distances: List[float]
    slope: float
    intercept: float
    c_fit: float                   # max D / sqrt(delta): makes the bound pointwise
    lip_half_ok: bool              # D(delta) <= c_fit * sqrt(delta) for every row
    excluded_zero_offsets: int
    decade_span: float


def holder_scan(
    base: Fraction,
    offsets: Sequence[Fraction],
    phase_resolution: int = 128,
    q_cap: int = DEFAULT_Q_CAP,
    jobs: Optional[int] = None,
) -> HolderScanResult:
    """Hausdorff distance D(delta) between the spectra at base and base+delta
    for each offset, with a least-squares fit of log D against log delta.

    Zero offsets give D = 0 and are excluded from the fit (but counted).  The
    fit needs at least two distinct positive offsets; a span under two decades
    is allowed but flagged in `decade_span` since the fitted exponent is then
    poorly conditioned.
    """
    base = Fraction(base)
    offsets = [Fraction(x) for x in offsets]
    zero_count = sum(1 for x in offsets if x == 0)
    work = sorted(set(x for x in offsets if x != 0))
    if any(x < 0 for x in work):
        raise ValidationError("offsets must be nonnegative")
    if len(work) < 2:
        raise DegenerateFitError(
            "need at least two distinct positive offsets for a fit"
        )
    fluxes = [base] + [base + x for x in work]
    for fl in fluxes:
        if fl.denominator > q_cap:
            raise SizeCapError(
                f"flux {fl} has q = {fl.denominator} > cost guard {q_cap}"
            )

    def spectrum(fl: Fraction) -> BandSpectrum:
        return amo_spectrum(fl.numerator, fl.denominator, phase_resolution, q_cap)

    if jobs is not None and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            specs = list(ex.map(spectrum, fluxes))
    else:
        specs = [spectrum(fl) for fl in fluxes]
    base_spec, rest = specs[0], specs[1:]
    dists = [hausdorff_distance(base_spec, s) for s in rest]

    span = float(np.log10(float(work[-1]) / float(work[0])))
    if span < 2.0:
        warnings.warn(
            f"offsets span only {span:.2f} decades; exponent fit is poorly conditioned",
            stacklevel=2,
        )
    pos = [(float(x), d) for x, d in zip(work, dists) if d > 0]
    if len(pos) < 2:
        raise DegenerateFitError("fewer than two nonzero distances; cannot fit")
    ld = np.log([x for x, _ in pos])
    lD = np.log([d for _, d in pos])
    slope, intercept = np.polyfit(ld, lD, 1)
    c_fit = max(d / float(x) ** 0.5 for x, d in pos)
    ok = all(d <= c_fit * float(x) ** 0.5 + 1e-12 for x, d in zip(work, dists))
    return HolderScanResult(
        base,
        work,
        dists,
        float(slope),
        float(intercept),
        float(c_fit),
        bool(ok),
        zero_count,
        span,
    )


def coprime_fluxes(q_max: int) -> List[Fraction]:
    """All reduced fluxes p/q in [0, 1) with q <= q_max."""
    if q_max < 1:
        raise ValidationError("q_max must be >= 1")
    out = [Fraction(0, 1)]
    for q in range(1, q_max + 1):
        for p in range(1, q):
            if gcd(p, q) == 1:
                out.append(Fraction(p, q))
    return sorted(set(out))
