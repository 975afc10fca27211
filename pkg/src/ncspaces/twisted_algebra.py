"""Twisted group algebra of Z^d.

Monomials u^m = u_1^{m_1} ... u_d^{m_d} multiply by

    u^m u^{m'} = exp(2*pi*i * c(m, m')) u^{m+m'},
    c(m, m')   = - sum_{j<k} theta_{jk} m_k m'_j,

which is the multiplication induced by letting u^m act on the l2(Z^d) basis
|m'> with that same phase.  c is bilinear in (m, m'), so the cocycle identity
holds exactly; for rational theta every phase exponent is an exact Fraction.

Polynomials carry either complex (float) coefficients or exact Cyclotomic
coefficients; the exact mode is available whenever theta is rational and
makes product/trace/involution identities checkable with zero error.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import ThetaMismatchError, ValidationError
from .phases import TWO_PI, Cyclotomic, PhaseExponent
from .skew import SkewMatrix, upper_pairs

MultiIndex = Tuple[int, ...]
Coefficient = Union[complex, Cyclotomic]

COEFF_DROP_TOL = 1e-15  # float path only: drop |c| below this during normalization


def as_multi_index(m: Sequence[int]) -> MultiIndex:
    t = tuple(int(x) for x in m)
    if any(x != y for x, y in zip(t, m)):
        raise ValidationError(f"multi-index {m!r} has non-integer entries")
    return t


def add_index(m: MultiIndex, m2: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(m, m2))


def neg_index(m: MultiIndex) -> MultiIndex:
    return tuple(-a for a in m)


def phase_order(theta: SkewMatrix) -> int:
    """Order Q of the root-of-unity lattice holding all structure phases."""
    return lcm(4, theta.denominator_lcm())


def structure_exponent(m: Sequence[int], m2: Sequence[int], theta: SkewMatrix):
    """Raw exponent c(m, m') = -sum_{j<k} theta_jk m_k m'_j (not reduced)."""
    m = as_multi_index(m)
    m2 = as_multi_index(m2)
    if len(m) != theta.dim or len(m2) != theta.dim:
        raise ValidationError(
            f"multi-index dimension {len(m)}/{len(m2)} != theta dimension {theta.dim}"
        )
    if theta.is_rational:
        total = Fraction(0)
    else:
        total = 0.0
    for (j, k), v in zip(upper_pairs(theta.dim), theta.upper):
        mk = m[k] * m2[j]
        if mk:
            total = total - v * mk
    return total


def structure_phase(m: Sequence[int], m2: Sequence[int], theta: SkewMatrix) -> PhaseExponent:
    """Phase exponent with u^m u^{m'} = exp(2*pi*i*c) u^{m+m'}, reduced mod 1."""
    c = structure_exponent(m, m2, theta)
    if isinstance(c, Fraction):
        return PhaseExponent.from_fraction(c)
    return PhaseExponent.from_float(c)


def _phase_complex(c) -> complex:
    """exp(2*pi*i*c) with the exponent reduced into [0,1) first."""
    if isinstance(c, Fraction):
        c = float(c % 1)
    else:
        c = c % 1.0
    return cmath.exp(1j * TWO_PI * c)


class NCPolynomial:
    """Finitely supported sum a = sum_m alpha_m u^m over a fixed theta."""

    __slots__ = ("theta", "coeffs", "exact")

    def __init__(
        self,
        theta: SkewMatrix,
        coeffs: Dict[MultiIndex, Coefficient],
        exact: bool = None,
    ):
        self.theta = theta
        exact_flags = {isinstance(c, Cyclotomic) for c in coeffs.values()}
        if len(exact_flags) > 1:
            raise ValidationError("cannot mix exact and float coefficients")
        if exact is None:
            # inferred from the coefficients; empty polynomials default to float,
            # so operations pass the flag through explicitly
            self.exact = exact_flags == {True}
        else:
            if exact_flags and exact_flags != {exact}:
                raise ValidationError("coefficient types contradict the exact flag")
            self.exact = exact
        if self.exact:
            if not theta.is_rational:
                raise ValidationError("exact coefficients require rational theta")
            q = phase_order(theta)
            for c in coeffs.values():
                if c.order != q:
                    raise ValidationError(
                        f"coefficient order {c.order} != phase order {q} of theta"
                    )
        norm: Dict[MultiIndex, Coefficient] = {}
        for m, c in coeffs.items():
            mi = as_multi_index(m)
            if len(mi) != theta.dim:
                raise ValidationError(
                    f"term {mi} has dimension {len(mi)}, algebra has d={theta.dim}"
                )
            if self.exact:
                if not c.is_zero:
                    norm[mi] = c
            else:
                c = complex(c)
                if abs(c) >= COEFF_DROP_TOL:
                    norm[mi] = c
        self.coeffs = norm

    # -- constructors --------------------------------------------------

    @classmethod
    def monomial(cls, theta: SkewMatrix, m: Sequence[int], coeff=1.0) -> "NCPolynomial":
        return cls(theta, {as_multi_index(m): coeff})

    @classmethod
    def exact_monomial(cls, theta: SkewMatrix, m: Sequence[int], re=1, im=0) -> "NCPolynomial":
        q = phase_order(theta)
        return cls(theta, {as_multi_index(m): Cyclotomic.from_gaussian(q, re, im)})

    @classmethod
    def one(cls, theta: SkewMatrix, exact: bool = False) -> "NCPolynomial":
        if exact:
            return cls.exact_monomial(theta, (0,) * theta.dim, 1)
        return cls.monomial(theta, (0,) * theta.dim, 1.0)

    @classmethod
    def zero(cls, theta: SkewMatrix) -> "NCPolynomial":
        return cls(theta, {})

    # -- basic queries ---------------------------------------------------

    @property
    def dim(self) -> int:
        return self.theta.dim

    def degree(self) -> int:
        """Max sup-norm of a supported multi-index (0 for the zero polynomial)."""
        if not self.coeffs:
            return 0
        return max(max(abs(x) for x in m) for m in self.coeffs)

    def coefficient(self, m: Sequence[int]) -> Coefficient:
        mi = as_multi_index(m)
        if mi in self.coeffs:
            return self.coeffs[mi]
        if self.exact:
            return Cyclotomic.zero(phase_order(self.theta))
        return 0j

    def to_float(self) -> "NCPolynomial":
        if not self.exact:
            return self
        return NCPolynomial(
            self.theta,
            {m: c.to_complex() for m, c in self.coeffs.items()},
            exact=False,
        )

    def allclose(self, other: "NCPolynomial", tol: float = 1e-12) -> bool:
        if self.theta != other.theta:
            return False
        a, b = self.to_float(), other.to_float()
        keys = set(a.coeffs) | set(b.coeffs)
        return all(abs(a.coefficient(m) - b.coefficient(m)) <= tol for m in keys)

    def __eq__(self, other):
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        return (
            self.theta == other.theta
            and self.exact == other.exact
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.theta, tuple(sorted(self.coeffs))))

    def __repr__(self):
        n = len(self.coeffs)
        return f"NCPolynomial(d={self.dim}, {n} term{'s' if n != 1 else ''})"

    # -- arithmetic --------------------------------------------------------

    def _check_compatible(self, other: "NCPolynomial"):
        if self.theta != other.theta:
            raise ThetaMismatchError("operands have different theta")
        if self.exact != other.exact:
            raise ValidationError("cannot mix exact and float polynomials")

    def __add__(self, other: "NCPolynomial") -> "NCPolynomial":
        self._check_compatible(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            if m in out:
                out[m] = out[m] + c
            else:
                out[m] = c
        return NCPolynomial(self.theta, out, exact=self.exact)

    def __sub__(self, other: "NCPolynomial") -> "NCPolynomial":
        return self + other.scale(-1)

    def scale(self, factor) -> "NCPolynomial":
        if self.exact:
            return NCPolynomial(
                self.theta,
                {m: c.scale(factor) for m, c in self.coeffs.items()},
                exact=True,
            )
        return NCPolynomial(
            self.theta, {m: c * complex(factor) for m, c in self.coeffs.items()}
        )


def poly_mul(a: NCPolynomial, b: NCPolynomial) -> NCPolynomial:
    """Product with coefficients sum_{m+m'=n} alpha_m beta_m' exp(2 pi i c(m,m'))."""
    a._check_compatible(b)
    out: Dict[MultiIndex, Coefficient] = {}
    for m, ca in a.coeffs.items():
        for m2, cb in b.coeffs.items():
            n = add_index(m, m2)
            c = structure_exponent(m, m2, a.theta)
            if a.exact:
                term = (ca * cb).rotate(c)
                out[n] = out[n] + term if n in out else term
            else:
                term = ca * cb * _phase_complex(c)
                out[n] = out.get(n, 0j) + term
    return NCPolynomial(a.theta, out, exact=a.exact)


def poly_adjoint(a: NCPolynomial) -> NCPolynomial:
    """Involution: (u^m)* = exp(-2 pi i c(m,-m)) u^{-m}, coefficients conjugated."""
    out: Dict[MultiIndex, Coefficient] = {}
    for m, c in a.coeffs.items():
        nm = neg_index(m)
        e = structure_exponent(m, nm, a.theta)
        if a.exact:
            out[nm] = c.conjugate().rotate(-e)
        else:
            out[nm] = c.conjugate() * _phase_complex(-e)
    return NCPolynomial(a.theta, out, exact=a.exact)


def trace(a: NCPolynomial) -> Coefficient:
    """The canonical trace: the coefficient at m = 0."""
    return a.coefficient((0,) * a.dim)


def cond_expectation(a: NCPolynomial, j: int) -> NCPolynomial:
    """Projection killing every term with m_j != 0 (axis j is 0-based)."""
    if not (0 <= j < a.dim):
        raise ValidationError(f"axis {j} out of range for d={a.dim}")
    return NCPolynomial(
        a.theta, {m: c for m, c in a.coeffs.items() if m[j] == 0}, exact=a.exact
    )


def transference(a: NCPolynomial, z: Sequence) -> NCPolynomial:
    """Coefficient at m multiplied by prod_j z_j^{m_j}.

    Each z_j is a unimodular complex number, or a Fraction number of turns
    (z_j = exp(2 pi i t_j)), which keeps exact polynomials exact.
    """
    if len(z) != a.dim:
        raise ValidationError(f"z has length {len(z)}, expected {a.dim}")
    turns = all(isinstance(x, (Fraction, int)) for x in z)
    if not turns:
        zc = [complex(x) for x in z]
        for x in zc:
            if abs(abs(x) - 1.0) > 1e-12:
                raise ValidationError(f"z entry {x} is not unimodular")
        af = a.to_float()
        out = {}
        for m, c in af.coeffs.items():
            w = c
            for x, mj in zip(zc, m):
                if mj:
                    w = w * x ** mj
            out[m] = w
        return NCPolynomial(a.theta, out, exact=False)
    tz = [Fraction(x) for x in z]
    out = {}
    for m, c in a.coeffs.items():
        t = sum((x * mj for x, mj in zip(tz, m)), Fraction(0))
        if a.exact:
            out[m] = c.rotate(t)
        else:
            out[m] = c * _phase_complex(t)
    return NCPolynomial(a.theta, out, exact=a.exact)


# -- GNS truncation ---------------------------------------------------------


def _box_indices(dim: int, radius: int) -> np.ndarray:
    """All multi-indices with sup-norm <= radius, C-ordered, shape (count, dim)."""
    side = np.arange(-radius, radius + 1)
    grids = np.meshgrid(*([side] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def gns_matrix(a: NCPolynomial, radius: int) -> np.ndarray:
    """Matrix of a acting on basis {|m'> : sup-norm(m') <= radius}.

    The action sends |m'> to exp(2 pi i c(m, m')) |m+m'>; images leaving the
    box are dropped (hard truncation, no wraparound), so columns whose target
    escapes simply lose that contribution.
    """
    if radius < 0:
        raise ValidationError("truncation radius must be >= 0")
    d = a.dim
    box = _box_indices(d, radius)
    n = box.shape[0]
    side = 2 * radius + 1
    theta_arr = a.theta.as_array()
    out = np.zeros((n, n), dtype=complex)
    af = a.to_float()
    for m, coeff in af.coeffs.items():
        mv = np.array(m)
        # c(m, m') is linear in m': c = -(v . m') with v_j = sum_{k>j} theta_jk m_k
        v = np.array(
            [sum(theta_arr[j, k] * m[k] for k in range(j + 1, d)) for j in range(d)]
        )
        phases = np.exp(-1j * TWO_PI * (box @ v))
        target = box + mv
        ok = np.all(np.abs(target) <= radius, axis=1)
        cols = np.nonzero(ok)[0]
        shifted = target[cols] + radius
        rows = np.zeros(len(cols), dtype=int)
        for ax in range(d):
            rows = rows * side + shifted[:, ax]
        out[rows, cols] += coeff * phases[cols]
    return out


def gns_vacuum_index(radius: int, dim: int) -> int:
    """Flat index of |0> in the box basis used by gns_matrix."""
    side = 2 * radius + 1
    idx = 0
    for _ in range(dim):
        idx = idx * side + radius
    return idx


# -- cocycle diagnostics ------------------------------------------------------


@dataclass(frozen=True)
class CocycleReport:
    samples: int
    max_associativity_defect: float
    max_normalization_defect: float
    exact: bool


def cocycle_validate(theta: SkewMatrix, triples: Iterable) -> CocycleReport:
    """Check sigma(m,m')sigma(m+m',m'') = sigma(m,m'+m'')sigma(m',m'') and
    sigma(m,0) = sigma(0,m) = 1 over the sample triples.

    Defects are circle distances of exponent differences to 0; they vanish
    identically for rational theta.
    """
    triples = [tuple(as_multi_index(m) for m in t) for t in triples]
    if not triples:
        raise ValidationError("sample list must be nonempty")
    zero = (0,) * theta.dim
    max_assoc = 0.0
    max_norm = 0.0
    for m, m2, m3 in triples:
        lhs = structure_exponent(m, m2, theta) + structure_exponent(add_index(m, m2), m3, theta)
        rhs = structure_exponent(m, add_index(m2, m3), theta) + structure_exponent(m2, m3, theta)
        diff = lhs - rhs
        if isinstance(diff, Fraction):
            dv = PhaseExponent.from_fraction(diff).circle_distance_to_zero()
        else:
            dv = PhaseExponent.from_float(diff).circle_distance_to_zero()
        max_assoc = max(max_assoc, dv)
        for g in (m, m2, m3):
            e1 = structure_phase(g, zero, theta).circle_distance_to_zero()
            e2 = structure_phase(zero, g, theta).circle_distance_to_zero()
            max_norm = max(max_norm, e1, e2)
    return CocycleReport(len(triples), max_assoc, max_norm, theta.is_rational)
