"""Discretized one-parameter unitary groups, generator/group norm equivalence,
unitary-field assembly identities, and the interpolation-constant audit.

Translations act by Fourier phases (exact group law for every real parameter);
modulations are diagonal.  On a self-dual grid the two families are exchanged
by the transform, and the commutation phase closes exactly whenever the shift
lands on the grid lattice and the modulation on the dual lattice.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .linalg import HermitianExponential, hermiticity_defect, spectral_norm
from .symplectic import GridSpec


# -- translation / modulation groups ------------------------------------------


def _dft_matrices(grid: GridSpec):
    m = grid.points
    idx = np.arange(m)
    w = np.exp(-2j * np.pi * np.outer(idx, idx) / m)
    return w, w.conj().T / m  # forward, inverse


def translation_unitary(s: float, grid: GridSpec) -> np.ndarray:
    """(u(s) f)(x) = f(x + s) as a dense unitary, diagonal in the Fourier basis."""
    fwd, inv = _dft_matrices(grid)
    phases = np.exp(1j * grid.frequencies() * s)
    return inv @ (phases[:, None] * fwd)


def modulation_unitary(t: float, grid: GridSpec) -> np.ndarray:
    """(v(t) f)(x) = exp(i x t) f(x): a diagonal unitary."""
    return np.diag(np.exp(1j * grid.axis() * t))


@dataclass(frozen=True)
class WeylResidualReport:
    residual: float              # defect applied to the reference state
    operator_defect: float       # raw spectral norm of the defect
    shift: float                 # theta * s, the translation actually applied
    commensurate_shift: bool     # theta*s on the grid lattice
    commensurate_modulation: bool  # t on the dual lattice


def weyl_residual(
    theta: float, s: float, t: float, grid: GridSpec, state_width_fraction: float = 32.0
) -> WeylResidualReport:
    """Defect of u(theta s) v(t) = exp(i s t theta) v(t) u(theta s) on the grid.

    The translation group is built for the generator theta * (-i d/dx), i.e.
    u acts by translation by theta*s.  The defect vanishes identically exactly
    when theta*s sits on the grid lattice and t on the dual lattice; off the
    lattices its full operator norm stays O(1) however fine the grid is (the
    modulation symbol leaks across the periodic wrap), so the headline
    residual is the defect applied to a reference Gaussian state of width
    L / state_width_fraction, which the refining grid progressively resolves.
    The raw operator norm is reported alongside.
    """
    shift = theta * s
    u = translation_unitary(shift, grid)
    v = modulation_unitary(t, grid)
    phase = np.exp(1j * s * t * theta)
    defect = u @ v - phase * (v @ u)
    x = grid.axis()
    sigma = grid.half_length / state_width_fraction
    psi = np.exp(-(x**2) / (2.0 * sigma**2)).astype(complex)
    psi /= np.linalg.norm(psi)
    res = float(np.linalg.norm(defect @ psi))
    tol = 1e-9
    com_s = abs(shift / grid.step - round(shift / grid.step)) < tol
    com_t = abs(t / grid.dual_step - round(t / grid.dual_step)) < tol
    return WeylResidualReport(
        res, spectral_norm(defect), shift, bool(com_s), bool(com_t)
    )


# -- generator vs group distance ------------------------------------------------


@dataclass(frozen=True, eq=False)
class HermitianPair:
    first: np.ndarray
    second: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.first, dtype=complex)
        b = np.asarray(self.second, dtype=complex)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError("need two square matrices of equal size")
        if hermiticity_defect(a) > 1e-12 or hermiticity_defect(b) > 1e-12:
            raise ValidationError("matrices must be Hermitian to 1e-12")
        object.__setattr__(self, "first", a)
        object.__setattr__(self, "second", b)

    @property
    def size(self) -> int:
        return self.first.shape[0]

    def difference_norm(self) -> float:
        return spectral_norm(self.first - self.second)


@dataclass(frozen=True)
class GeneratorBoundReport:
    difference_norm: float
    necessity_ok: bool           # ||e^{iPt} - e^{iP't}|| <= ||P - P'|| |t| at all samples
    max_necessity_excess: float
    slope_estimate: float        # sup over small t of the ratio; recovers ||P - P'||
    slope_relative_error: float


def generator_bound_check(
    pair: HermitianPair, ts: Sequence[float], small_t_count: int = 8
) -> GeneratorBoundReport:
    """Matrix form of the equivalence between a bounded generator difference
    and a Lipschitz bound on the unitary groups.

    Necessity: ||exp(iPt) - exp(iP't)|| <= ||P - P'|| |t| for every sampled t.
    Sufficiency direction: the small-t ratio sup_t ||...||/|t| recovers
    ||P - P'||; only the samples below 0.01/||P - P'|| enter the estimate.
    """
    ts = [float(t) for t in ts if t != 0.0]
    if not ts:
        raise ValidationError("need at least one nonzero sample time")
    dnorm = pair.difference_norm()
    ea = HermitianExponential(pair.first)
    eb = HermitianExponential(pair.second)
    excess = 0.0
    ratios: List[Tuple[float, float]] = []
    for t in ts:
        gap = spectral_norm(ea.at(t) - eb.at(t))
        excess = max(excess, gap - dnorm * abs(t))
        ratios.append((abs(t), gap / abs(t)))
    cutoff = 0.01 / dnorm if dnorm > 0 else float("inf")
    small = [r for t, r in ratios if t <= cutoff]
    if not small:
        small = [r for _, r in sorted(ratios)[:small_t_count]]
    slope = max(small)
    rel = abs(slope - dnorm) / dnorm if dnorm > 0 else 0.0
    return GeneratorBoundReport(
        dnorm,
        excess <= 1e-10 * max(1.0, dnorm),
        float(excess),
        float(slope),
        float(rel),
    )


# -- unitary-field assembly -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitaryField:
    """A sampled C^1 field (x, y) -> U(k), backed by a callable.

    Finite differences probe the field at stencil points chosen at check
    time, so the field is sampled on demand; `box` bounds the arguments the
    caller promises to cover and `step` is the default stencil width.
    """

    fn: Callable[[float, float], np.ndarray]
    step: float = 1e-3
    box: float = 50.0
    dfdx: Optional[Callable[[float, float], np.ndarray]] = None
    dfdy: Optional[Callable[[float, float], np.ndarray]] = None

    def sample(self, x: float, y: float) -> np.ndarray:
        if abs(x) > self.box or abs(y) > self.box:
            raise ValidationError(
                f"argument ({x:.3g},{y:.3g}) outside the sampled box {self.box}"
            )
        u = np.asarray(self.fn(x, y), dtype=complex)
        if u.ndim == 0:
            u = u.reshape(1, 1)
        defect = spectral_norm(u.conj().T @ u - np.eye(u.shape[0]))
        if defect > 1e-10:
            raise ValidationError(f"field sample at ({x},{y}) is not unitary ({defect:.1e})")
        return u

    def fd_x(self, x: float, y: float, h: float) -> np.ndarray:
        return (self.sample(x + h, y) - self.sample(x - h, y)) / (2.0 * h)

    def fd_y(self, x: float, y: float, h: float) -> np.ndarray:
        return (self.sample(x, y + h) - self.sample(x, y - h)) / (2.0 * h)


def _factor_args(deltas: np.ndarray, j: int, x: Sequence[float]) -> List[Tuple[float, float]]:
    """Arguments (x_k, delta_kj x_j) of the factors of the j-th composed field."""
    return [(x[k], deltas[k, j] * x[j]) for k in range(j)]


def composed_field(w: UnitaryField, deltas: np.ndarray, j: int) -> Callable:
    """w_j(x) = w(x_0, d_0j x_j) w(x_1, d_1j x_j) ... w(x_{j-1}, d_{j-1,j} x_j).

    Axis indices are 0-based; j >= 1.  The empty product (j = 0) is the identity.
    """

    def field(x: Sequence[float]) -> np.ndarray:
        out = None
        for (a, b) in _factor_args(deltas, j, x):
            u = w.sample(a, b)
            out = u if out is None else out @ u
        if out is None:
            k = w.sample(0.0, 0.0).shape[0]
            return np.eye(k, dtype=complex)
        return out

    return field


def assembled_field(w: UnitaryField, deltas: np.ndarray, d: int) -> Callable:
    """W(x) = w_1(x) w_2(x) ... w_{d-1}(x) (0-based axis labels)."""
    parts = [composed_field(w, deltas, j) for j in range(1, d)]

    def field(x: Sequence[float]) -> np.ndarray:
        out = parts[0](x)
        for p in parts[1:]:
            out = out @ p(x)
        return out

    return field


def _fd_along(field: Callable, x: Sequence[float], axis: int, h: float) -> np.ndarray:
    xp = list(x)
    xm = list(x)
    xp[axis] += h
    xm[axis] -= h
    return (np.asarray(field(xp)) - np.asarray(field(xm))) / (2.0 * h)


@dataclass(frozen=True)
class AssemblyReport:
    step: float
    chain_rule_residual: float      # (a): d w_k / d x_j vs single-factor form, j < k
    diagonal_identity_residual: float  # (b): d w_j / d x_j - i sum_k d_kj x_k w_j
    triangle_ok: bool               # (c): assembled derivative bound
    triangle_slack: float
    probes: int


def check_assembly_identities(
    w: UnitaryField,
    deltas: np.ndarray,
    d: int,
    probes: Sequence[Sequence[float]],
    h: Optional[float] = None,
) -> AssemblyReport:
    """Finite-difference validation of the composed-field derivative identities.

    (a) For j < k the derivative of w_k along axis j has a single non-identity
        factor, the x-derivative of w at (x_j, delta_jk x_k).
    (b) Along the diagonal axis,
            d w_j / d x_j - i sum_{k<j} delta_kj x_k w_j
          = sum_{k<j} delta_kj w(...) [dw/dy - i x_k w](x_k, delta_kj x_j) w(...),
        every term conjugated by the other factors in place.
    (c) The assembled W = w_1 ... w_{d-1} then satisfies the triangle bound
            || dW/dx_j - i sum_{k<j} delta_kj x_k W || <= sum of per-factor norms.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape != (d, d):
        raise ValidationError(f"deltas must be {d}x{d}")
    if h is None:
        h = w.step
    probes = [list(map(float, p)) for p in probes]
    if not probes:
        raise ValidationError("need at least one probe point")
    for p in probes:
        if len(p) != d:
            raise ValidationError("probe dimension mismatch")

    res_a = 0.0
    res_b = 0.0
    tri_ok = True
    tri_slack = float("inf")
    for x in probes:
        fields = {j: composed_field(w, deltas, j) for j in range(1, d)}
        # (a) off-diagonal derivatives
        for k in range(1, d):
            for j in range(k):
                fd = _fd_along(fields[k], x, j, h)
                factors = [w.sample(a, b) for (a, b) in _factor_args(deltas, k, x)]
                factors[j] = w.fd_x(x[j], deltas[j, k] * x[k], h)
                prod = factors[0]
                for f in factors[1:]:
                    prod = prod @ f
                res_a = max(res_a, spectral_norm(fd - prod))
        # (b) diagonal identity
        for j in range(1, d):
            wj = fields[j](x)
            fd = _fd_along(fields[j], x, j, h)
            lhs = fd - 1j * sum(deltas[k, j] * x[k] for k in range(j)) * wj
            rhs = np.zeros_like(wj)
            base = [w.sample(a, b) for (a, b) in _factor_args(deltas, j, x)]
            for k in range(j):
                term = list(base)
                mid = (
                    w.fd_y(x[k], deltas[k, j] * x[j], h)
                    - 1j * x[k] * w.sample(x[k], deltas[k, j] * x[j])
                )
                term[k] = mid
                prod = term[0]
                for f in term[1:]:
                    prod = prod @ f
                rhs = rhs + deltas[k, j] * prod
            res_b = max(res_b, spectral_norm(lhs - rhs))
        # (c) triangle bound for the assembled field
        big = assembled_field(w, deltas, d)
        for j in range(d):
            fd = _fd_along(big, x, j, h)
            lhs = spectral_norm(
                fd - 1j * sum(deltas[k, j] * x[k] for k in range(j)) * np.asarray(big(x))
            )
            bound = 0.0
            for k in range(j):
                mid = (
                    w.fd_y(x[k], deltas[k, j] * x[j], h)
                    - 1j * x[k] * w.sample(x[k], deltas[k, j] * x[j])
                )
                bound += abs(deltas[k, j]) * spectral_norm(mid)
            for k in range(j + 1, d):
                bound += spectral_norm(w.fd_x(x[j], deltas[j, k] * x[k], h))
            slack = bound - lhs + 50.0 * h**2  # finite-difference headroom
            tri_ok = tri_ok and (lhs <= bound + 50.0 * h**2)
            tri_slack = min(tri_slack, slack)
    return AssemblyReport(h, res_a, res_b, tri_ok, tri_slack, len(probes))


def assembly_convergence_order(
    w: UnitaryField,
    deltas: np.ndarray,
    d: int,
    probes: Sequence[Sequence[float]],
    h0: float,
    halvings: int = 2,
) -> Tuple[List[float], float]:
    """Deviation of identity (b) at h0, h0/2, ...; fitted order in h."""
    hs = [h0 / 2**i for i in range(halvings + 1)]
    devs = [
        check_assembly_identities(w, deltas, d, probes, h).diagonal_identity_residual
        for h in hs
    ]
    order = float(np.polyfit(np.log(hs), np.log(devs), 1)[0])
    return devs, order


def richardson_step_probe(w: UnitaryField, x: float, y: float, h0: float = 1e-2) -> float:
    """Three-point probe for a finite-difference step: shrink h0 until the
    Richardson estimate of the x-derivative stabilizes to ~1% and return it."""
    h = h0
    for _ in range(8):
        d1 = w.fd_x(x, y, h)
        d2 = w.fd_x(x, y, h / 2.0)
        err = spectral_norm(d2 - d1)
        scale = max(spectral_norm(d2), 1e-12)
        if err <= 0.01 * scale:
            return h / 2.0
        h /= 2.0
    return h


# -- interpolation constant audit ---------------------------------------------


def refinement_step_bound(theta_gap, level_bound, k: int):
    """One level of the two-constant recursion: 1224 sqrt(gap/k) + 45 b / k."""
    if isinstance(theta_gap, Fraction) and _is_square(k):
        return 1224 * _sqrt_fraction(theta_gap / k) + Fraction(45) * level_bound / k
    return 1224.0 * float(theta_gap / k) ** 0.5 + 45.0 * float(level_bound) / k


def _is_square(k: int) -> bool:
    return k >= 0 and isqrt(k) ** 2 == k


def _sqrt_fraction(f: Fraction):
    num, den = f.numerator, f.denominator
    if _is_square(num) and _is_square(den):
        return Fraction(isqrt(num), isqrt(den))
    return float(f) ** 0.5


@dataclass(frozen=True)
class AuditReport:
    k: int
    target: float
    holds: bool
    slack: float
    one_step_value: float            # 1224 + 45 * target / sqrt(k)
    level_bounds: List[float]        # normalized bound per refinement level
    exact: bool


def audit_interpolation_constants(
    k: int, target, levels: int = 6
) -> AuditReport:
    """Check that the per-step bound map keeps the normalized constant below
    `target` across refinement levels.

    Scaled to level n (grid pitch k^-n), one refinement maps a normalized
    bound B to 1224 + 45 B / sqrt(k); the audit reproduces the closing
    arithmetic at k = 8100: 1224 + 2500 * 45 / 90 = 2474 <= 2500.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    exact = _is_square(k)
    root = Fraction(isqrt(k)) if exact else float(k) ** 0.5
    tgt = Fraction(target) if exact and not isinstance(target, float) else float(target)
    b = tgt
    level_bounds = [float(b)]
    worst = b
    for _ in range(levels):
        b = 1224 + 45 * b / root
        level_bounds.append(float(b))
        worst = max(worst, b)
    one_step = 1224 + 45 * tgt / root
    slack = tgt - one_step
    return AuditReport(
        k,
        float(tgt),
        bool(worst <= tgt),
        float(slack),
        float(one_step),
        level_bounds,
        exact,
    )


def refinement_grid(k: int, n: int) -> Iterator[Fraction]:
    """Lazy level-n grid {j / k^n : |j| <= (n+1) k^n}, ascending."""
    if k < 1 or n < 0:
        raise ValidationError("need k >= 1 and n >= 0")
    den = k**n
    bound = (n + 1) * den
    for j in range(-bound, bound + 1):
        yield Fraction(j, den)
