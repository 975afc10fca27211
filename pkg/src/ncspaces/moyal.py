"""Star products on grid functions, the twisted regular representation, and
Sobolev bookkeeping.

The engine fixes the symmetric cocycle once and for all:

    sigma_theta(s, t) = exp((i/2) theta(s, t)),   theta(s, t) = s . Theta t,

so the frequency-side product is

    (f * g)^(t) = integral fhat(s) ghat(t - s) exp((i/2) theta(s, t - s)) ds
                = integral fhat(s) ghat(t - s) exp((i/2) theta(s, t)) ds,

and the position-side double integral consistent with it is

    (f * g)(x) = (2 pi)^-d  II  f(x + (1/2) Theta s) g(x + t) e^{-i s.t} ds dt.

The t-integral is a pure Fourier transform of g (it carries no twist), so the
double quadrature factorizes exactly on the extended lattice:

    (f * g)(x) = integral f(x + (1/2) Theta s) ghat(s) e^{i s.x} ds.

moyal_direct evaluates that s-quadrature with trigonometric interpolation for
the shifted f samples; twisted_convolve performs the frequency-side sum with
zero padding (no wraparound).  The two routes share only the transform
utilities, so their agreement is a meaningful cross-check.

A "full" phase convention exp(i theta(s, t-s)) is also reachable: it is the
symmetric convention at doubled theta, which is exactly how the adapter
implements it (the two multipliers differ, so no same-theta unitary
equivalence exists; see regular_rep_matrix).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma, pi, sqrt
from typing import List

import numpy as np

from .errors import SizeCapError, ValidationError
from .gridfn import (
    GridFunction,
    freq_grid_vectors,
    l2_norm,
    to_frequency,
    to_position,
)
from .linalg import spectral_norm
from .skew import SkewMatrix

DIRECT_CAP = 4096  # M^d cap for the position-side quadrature
MATRIX_CAP = 4096  # M^d cap for dense representation matrices


def _check_theta(f: GridFunction, theta: SkewMatrix):
    if theta.dim != f.dim:
        raise ValidationError(f"theta dimension {theta.dim} != grid dimension {f.dim}")


# -- star product: position-side quadrature -----------------------------------


def moyal_direct(f: GridFunction, g: GridFunction, theta: SkewMatrix) -> GridFunction:
    """Star product by quadrature of the double oscillatory integral.

    The inner t-integral is done in closed form (it is the transform of g);
    the remaining s-quadrature uses trigonometric interpolation of f at the
    sheared points x + (1/2) Theta s.  Cost is O(M^{2d} log M); guarded to
    d <= 2 and M^d <= DIRECT_CAP.
    """
    f.require_same_grid(g)
    _check_theta(f, theta)
    if f.side != "position":
        raise ValidationError("moyal_direct expects position-side functions")
    if f.dim > 2:
        raise ValidationError("direct quadrature is limited to d <= 2")
    m, d = f.points, f.dim
    n = m**d
    if n > DIRECT_CAP:
        raise SizeCapError(f"M^d = {n} exceeds direct-quadrature cap {DIRECT_CAP}")

    fhat = to_frequency(f)
    ghat = to_frequency(g)
    svecs = freq_grid_vectors(f if f.side == "frequency" else fhat)  # (n, d)
    theta_arr = theta.as_array()
    freqs = fhat.freq_axis()
    x = f.axis()
    ds = fhat.freq_step**d

    out = np.zeros((m,) * d, dtype=complex)
    ghat_flat = ghat.values.reshape(-1)
    chunk = max(1, 262144 // n)
    # f(x + a) = sum_m fhat(m) e^{i m.x} e^{i m.a}: one phase twist per shift a
    mode_axes = [freqs] * d
    for start in range(0, n, chunk):
        sblock = svecs[start : start + chunk]            # (c, d)
        shifts = 0.5 * sblock @ theta_arr.T              # a = (1/2) Theta s
        twist = np.ones((len(sblock),) + (m,) * d, dtype=complex)
        for ax in range(d):
            ph = np.exp(1j * np.outer(shifts[:, ax], mode_axes[ax]))
            shape = [len(sblock)] + [1] * d
            shape[1 + ax] = m
            twist *= ph.reshape(shape)
        shifted = _inverse_many(fhat.values[None, ...] * twist, f)
        carrier = np.ones((len(sblock),) + (m,) * d, dtype=complex)
        for ax in range(d):
            ph = np.exp(1j * np.outer(sblock[:, ax], x))
            shape = [len(sblock)] + [1] * d
            shape[1 + ax] = m
            carrier *= ph.reshape(shape)
        coeff = ghat_flat[start : start + chunk].reshape((-1,) + (1,) * d)
        out += (coeff * shifted * carrier).sum(axis=0)
    return GridFunction(d, f.half_length, m, out * ds)


def _inverse_many(fhat_stack: np.ndarray, like: GridFunction) -> np.ndarray:
    """Batched inverse transform over the leading axis (ascending freq order)."""
    m, d = like.points, like.dim
    j = np.arange(m) - m // 2
    signs = (-1.0) ** (j % 2)
    phase = signs
    for _ in range(d - 1):
        phase = np.multiply.outer(phase, signs)
    raw = np.fft.ifftshift(fhat_stack * phase, axes=tuple(range(1, d + 1)))
    vals = np.fft.ifftn(raw, axes=tuple(range(1, d + 1)))
    return vals * (2.0 * np.pi) ** d / (like.step**d)


# -- star product: frequency-side twisted convolution --------------------------


def twisted_convolve(
    fhat: GridFunction, ghat: GridFunction, theta: SkewMatrix
) -> GridFunction:
    """(f*g)^(t) = sum_s fhat(s) ghat(t-s) exp((i/2) theta(s,t)) ds.

    ghat is zero-padded outside its box (linear, not cyclic, convolution): the
    twist phase is not periodic in s, so wraparound would be wrong.  Output is
    reported on the input frequency box.
    """
    fhat.require_same_grid(ghat)
    _check_theta(fhat, theta)
    if fhat.side != "frequency":
        raise ValidationError("twisted_convolve expects frequency-side functions")
    m, d = fhat.points, fhat.dim
    theta_arr = theta.as_array()
    freqs = fhat.freq_axis()
    ds = fhat.freq_step**d

    pad = np.zeros((2 * m,) * d, dtype=complex)
    pad[tuple(slice(m // 2, m // 2 + m) for _ in range(d))] = ghat.values

    out = np.zeros((m,) * d, dtype=complex)
    fvals = fhat.values
    # skip negligible rows of fhat: they cannot contribute above round-off
    fmax = np.abs(fvals).max()
    if fmax == 0.0:
        return GridFunction(d, fhat.half_length, m, out, side="frequency")
    threshold = fmax * 1e-18
    idx_iter = np.ndindex(*(m,) * d)
    for idx in idx_iter:
        c = fvals[idx]
        if abs(c) <= threshold:
            continue
        s = np.array([freqs[i] for i in idx])
        w = theta_arr.T @ s  # theta(s, t) = (Theta^T s) . t
        phase = np.ones((m,) * d, dtype=complex)
        for ax in range(d):
            ph = np.exp(0.5j * w[ax] * freqs)
            shape = [1] * d
            shape[ax] = m
            phase *= ph.reshape(shape)
        block = pad[tuple(slice(m - i, 2 * m - i) for i in idx)]
        out += c * phase * block
    return GridFunction(d, fhat.half_length, m, out * ds, side="frequency")


def star_product_fourier(
    f: GridFunction, g: GridFunction, theta: SkewMatrix
) -> GridFunction:
    """Position-side star product through the frequency route."""
    return to_position(twisted_convolve(to_frequency(f), to_frequency(g), theta))


# -- regular representation ----------------------------------------------------


def regular_rep_matrix(
    f: GridFunction,
    theta: SkewMatrix,
    convention: str = "half",
    size_cap: int = MATRIX_CAP,
) -> np.ndarray:
    """Dense matrix of the twisted left multiplication by f on the frequency grid.

    With the engine's cocycle the action on a frequency vector g is

        (L_f g)(t) = sum_{t'} fhat(t - t') exp((i/2) theta(t - t', t')) g(t') ds,

    where fhat vanishes outside its box.  convention="full" uses the phase
    exp(i theta(s, t-s)) instead; that multiplier is the square of the
    symmetric one, so the full convention is implemented as (and tested to be)
    the symmetric convention at 2 theta.
    """
    _check_theta(f, theta)
    if convention == "full":
        return regular_rep_matrix(f, theta.scaled(2), convention="half", size_cap=size_cap)
    if convention != "half":
        raise ValidationError(f"unknown convention {convention!r}")
    fhat = to_frequency(f) if f.side == "position" else f
    m, d = fhat.points, fhat.dim
    n = m**d
    if n > size_cap:
        raise SizeCapError(f"matrix dimension M^d = {n} exceeds cap {size_cap}")
    tvecs = freq_grid_vectors(fhat)  # (n, d)
    theta_arr = theta.as_array()
    ds = fhat.freq_step**d

    # look up fhat at t - t' (zero outside the box), one axis at a time
    axes_idx = np.stack(
        np.meshgrid(*([np.arange(m)] * d), indexing="ij"), axis=-1
    ).reshape(n, d)
    valid = np.ones((n, n), dtype=bool)
    lin = np.zeros((n, n), dtype=np.int64)
    for ax in range(d):
        di = axes_idx[:, ax][:, None] - axes_idx[:, ax][None, :] + m // 2
        valid &= (di >= 0) & (di < m)
        lin = lin * m + np.clip(di, 0, m - 1)
    entries = fhat.values.reshape(-1)[lin]
    entries[~valid] = 0.0
    # theta(t - t', t') = theta(t, t') because theta(t', t') = 0
    phase = np.exp(0.5j * (tvecs @ theta_arr @ tvecs.T))
    return entries * phase * ds


def rep_operator_norm(mat: np.ndarray) -> float:
    return spectral_norm(mat)


def interior_frequency_mask(f: GridFunction, margin_fraction: float = 0.5) -> np.ndarray:
    """Boolean mask of frequency points with |s|_sup <= margin_fraction * s_max."""
    fhat = f if f.side == "frequency" else to_frequency(f)
    vec = freq_grid_vectors(fhat)
    smax = np.abs(fhat.freq_axis()).max()
    return np.all(np.abs(vec) <= margin_fraction * smax + 1e-12, axis=1)


def twisted_involution(fhat: GridFunction) -> GridFunction:
    """fstar^(s) = conj(fhat(-s)); the cocycle factor sigma(s,-s) is 1."""
    if fhat.side != "frequency":
        raise ValidationError("twisted_involution expects a frequency-side function")
    flipped = fhat.values.copy()
    for ax in range(fhat.dim):
        flipped = np.flip(flipped, axis=ax)
        # ascending order holds -M/2 .. M/2-1: a flip maps j to -j only after
        # rolling the unpaired -M/2 row back to the front
        flipped = np.roll(flipped, 1, axis=ax)
    return GridFunction(
        fhat.dim, fhat.half_length, fhat.points, np.conj(flipped), side="frequency"
    )


# -- Sobolev norms and the quantization constant -------------------------------


def sobolev_norm(f: GridFunction, alpha: float) -> float:
    """|| (1 + |s|^2)^{alpha/2} fhat ||_2 with Plancherel weights."""
    if alpha < 0:
        raise ValidationError("alpha must be >= 0")
    fhat = to_frequency(f) if f.side == "position" else f
    s2 = np.zeros((fhat.points,) * fhat.dim)
    ax = fhat.freq_axis() ** 2
    for a in range(fhat.dim):
        shape = [1] * fhat.dim
        shape[a] = fhat.points
        s2 = s2 + ax.reshape(shape)
    weight = (1.0 + s2) ** alpha
    total = (weight * np.abs(fhat.values) ** 2).sum() * fhat.freq_step**fhat.dim
    return float(np.sqrt(total * (2.0 * np.pi) ** fhat.dim))


@dataclass(frozen=True)
class QuantizationConstant:
    alpha: float
    dim: int
    path_constant: float
    value: float


def sphere_surface(d: int) -> float:
    """Surface measure of the unit (d-1)-sphere in R^d."""
    return 2.0 * pi ** (d / 2.0) / gamma(d / 2.0)


def quantization_constant(alpha: float, d: int, path_constant: float) -> QuantizationConstant:
    """(V_d / (2 alpha - d - 2))^{1/2} * C; finite exactly when alpha > d/2 + 1."""
    if d < 1:
        raise ValidationError("dimension must be positive")
    if alpha <= d / 2.0 + 1.0:
        raise ValidationError(
            f"alpha must exceed d/2 + 1 = {d / 2 + 1}; the frequency integral diverges"
        )
    value = sqrt(sphere_surface(d) / (2.0 * alpha - d - 2.0)) * path_constant
    return QuantizationConstant(alpha, d, path_constant, value)


# -- dimension reduction --------------------------------------------------------


@dataclass(frozen=True)
class DimensionReductionReport:
    epsilons: List[float]
    norms: List[float]
    reference_norm: float
    deviations: List[float]
    bounds: List[float]       # beta_n * ||f||_2 ||g||_2 (||phi_n||_2 = 1)
    betas: List[float]
    observed_rate: float


def _bump(tgrid: np.ndarray, eps: float) -> np.ndarray:
    """Squared-cosine bump on [-eps, eps], unit L2 norm."""
    v = np.where(np.abs(tgrid) <= eps, np.cos(np.pi * tgrid / (2.0 * eps)) ** 2, 0.0)
    return v * np.sqrt(4.0 / (3.0 * eps))


def dimension_reduction_check(
    f: GridFunction,
    theta: SkewMatrix,
    n_steps: int,
    g: GridFunction = None,
    support_fraction: float = 0.5,
    allow_singular: bool = False,
    quad_points: int = 129,
) -> DimensionReductionReport:
    """Compare the twisted action of f restricted to the first d-1 frequency
    axes against the (d-1)-dimensional twisted multiplication, through states
    whose last-axis frequency profile is a unit bump phi_n on [-eps_n, eps_n],
    eps_n = 2^{-n}.

    The defect comes only from the phase exp((i/2) sum_j theta_jd s_j t_d) - 1,
    so it is bounded by beta_n ||phi_n||_2 ||f||_2 ||g||_2 and vanishes
    linearly in eps_n.
    """
    d = theta.dim
    if f.dim != d - 1:
        raise ValidationError(f"f must live on d-1 = {d - 1} axes, has {f.dim}")
    if not allow_singular:
        arr = theta.as_array()
        sv = np.linalg.svd(arr, compute_uv=False)
        if sv[-1] <= 1e-8 * max(sv[0], 1.0):
            raise ValidationError("theta is singular; pass allow_singular=True to probe anyway")
    if n_steps < 1:
        raise ValidationError("need at least one step")
    if g is None:
        g = GridFunction.gaussian(f.dim, f.half_length, f.points, sigma=1.0)
    f.require_same_grid(g)

    fhat = to_frequency(f)
    # enforce a compactly supported frequency profile by hard truncation
    svec = freq_grid_vectors(fhat)
    smax = np.abs(fhat.freq_axis()).max()
    mask = np.all(np.abs(svec) <= support_fraction * smax, axis=1).reshape(fhat.values.shape)
    fhat = GridFunction(
        fhat.dim, fhat.half_length, fhat.points, fhat.values * mask, side="frequency"
    )
    ghat = to_frequency(g)

    theta_hat = theta.principal_submatrix(d - 1)
    ref = twisted_convolve(fhat, ghat, theta_hat)  # (d-1)-dimensional product
    ds = fhat.freq_step ** (d - 1)
    two_pi_d = (2.0 * np.pi) ** d

    # coupling frequency: w(s) = sum_{j<d} theta_jd s_j for every s in the box
    coup = np.array([theta.entry(j, d - 1) for j in range(d - 1)], dtype=float)
    w_all = svec @ coup

    norm_f = l2_norm(f)
    norm_g = l2_norm(g)
    ref_l2 = float(
        np.sqrt(((np.abs(ref.values) ** 2).sum() * ds) * (2.0 * np.pi) ** (d - 1))
    )

    fflat = fhat.values.reshape(-1)
    # the (d-1)-dimensional twisted shift of ghat for every support point of fhat
    active = np.nonzero(np.abs(fflat) > 0)[0]
    m = fhat.points
    pad = np.zeros((2 * m,) * (d - 1), dtype=complex)
    pad[tuple(slice(m // 2, m // 2 + m) for _ in range(d - 1))] = ghat.values
    freqs = fhat.freq_axis()
    theta_hat_arr = theta_hat.as_array()

    if len(active) == 0:
        raise ValidationError("f has no frequency support left after truncation")

    shifted_terms = []
    for flat_idx in active:
        idx = np.unravel_index(flat_idx, (m,) * (d - 1))
        s = np.array([freqs[i] for i in idx])
        wv = theta_hat_arr.T @ s
        phase = np.ones((m,) * (d - 1), dtype=complex)
        for ax in range(d - 1):
            ph = np.exp(0.5j * wv[ax] * freqs)
            shape = [1] * (d - 1)
            shape[ax] = m
            phase *= ph.reshape(shape)
        block = pad[tuple(slice(m - i, 2 * m - i) for i in idx)]
        shifted_terms.append(fflat[flat_idx] * phase * block)
    shifted_terms = np.array(shifted_terms)  # (n_active, grid...)

    epsilons, norms, devs, bounds, betas = [], [], [], [], []
    for nstep in range(1, n_steps + 1):
        eps = 2.0 ** (-nstep)
        tgrid = np.linspace(-eps, eps, quad_points)
        dt = tgrid[1] - tgrid[0]
        # scaled so the synthesized d-dimensional state has the same L2 norm as g
        phi = _bump(tgrid, eps) / np.sqrt(2.0 * np.pi)
        beta = float(np.abs(np.exp(0.5j * np.outer(w_all[active], tgrid)) - 1).max())

        norm_sq = 0.0
        dev_sq = 0.0
        for td, ph_val in zip(tgrid, phi):
            osc = np.exp(0.5j * w_all[active] * td).reshape((-1,) + (1,) * (d - 1))
            t_slice = (shifted_terms * osc).sum(axis=0) * ds
            norm_sq += (np.abs(t_slice) ** 2).sum() * ds * ph_val**2 * dt
            dev_sq += (np.abs(t_slice - ref.values) ** 2).sum() * ds * ph_val**2 * dt
        norms.append(float(np.sqrt(norm_sq * two_pi_d)))
        devs.append(float(np.sqrt(dev_sq * two_pi_d)))
        bounds.append(beta * norm_f * norm_g)
        betas.append(beta)
        epsilons.append(eps)

    pos = [(e, dv) for e, dv in zip(epsilons, devs) if dv > 0]
    if len(pos) >= 2:
        le = np.log([p[0] for p in pos])
        ld = np.log([p[1] for p in pos])
        rate = float(np.polyfit(le, ld, 1)[0])
    else:
        rate = float("nan")
    return DimensionReductionReport(
        epsilons, norms, ref_l2, devs, bounds, betas, rate
    )
