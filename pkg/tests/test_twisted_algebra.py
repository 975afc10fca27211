"""Tests for the twisted polynomial algebra over Z^d."""
import numpy as np
import pytest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from ncspaces.errors import ThetaMismatchError, ValidationError
from ncspaces.phases import Cyclotomic
from ncspaces.skew import SkewMatrix
from ncspaces import twisted_algebra as ta
from ncspaces.twisted_algebra import (
    NCPolynomial,
    cocycle_validate,
    cond_expectation,
    gns_matrix,
    gns_vacuum_index,
    poly_adjoint,
    poly_mul,
    structure_phase,
    trace,
    transference,
)
from ncspaces.finite_reps import clock_shift

THETA_QUARTER = SkewMatrix.from_upper(2, {(0, 1): Fraction(1, 4)})
THETA_THIRD = SkewMatrix.from_upper(2, {(0, 1): Fraction(1, 3)})


def rational_theta(rng, d, max_den=9):
    entries = {}
    for j in range(d):
        for k in range(j + 1, d):
            den = int(rng.integers(1, max_den + 1))
            entries[(j, k)] = Fraction(int(rng.integers(-den, den + 1)), den)
    return SkewMatrix.from_upper(d, entries)


def random_poly(rng, theta, terms=5, max_exp=2):
    coeffs = {}
    for _ in range(terms):
        m = tuple(int(x) for x in rng.integers(-max_exp, max_exp + 1, size=theta.dim))
        coeffs[m] = coeffs.get(m, 0.0) + complex(rng.standard_normal(), rng.standard_normal())
    return NCPolynomial(theta, coeffs)


class TestStructurePhase:
    def test_no_cross_term(self):
        ph = structure_phase((1, 0), (0, 1), THETA_QUARTER)
        assert ph.exact == 0

    def test_quarter_phase_value(self):
        ph = structure_phase((0, 1), (1, 0), THETA_QUARTER)
        assert ph.exact == Fraction(3, 4)  # -1/4 mod 1
        assert ph.phase() == pytest.approx(-1j, abs=1e-15)

    def test_quarter_phase_against_clock_shift(self):
        # independent oracle: 4x4 clock/shift matrices at 1/4
        u, v = clock_shift(1, 4).matrices
        vu = v @ u
        uv = u @ v
        scalar = vu[np.abs(uv) > 0.5][0] / uv[np.abs(uv) > 0.5][0]
        assert scalar == pytest.approx(
            structure_phase((0, 1), (1, 0), THETA_QUARTER).phase(), abs=1e-14
        )

    def test_zero_theta(self):
        theta = SkewMatrix.zero(3)
        ph = structure_phase((2, -1, 3), (1, 4, -2), theta)
        assert ph.exact == 0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            structure_phase((1, 0, 0), (0, 1), THETA_QUARTER)


class TestPolyMul:
    def test_uv_coefficient(self):
        u = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        v = NCPolynomial.monomial(THETA_QUARTER, (0, 1))
        prod = poly_mul(u, v)
        assert set(prod.coeffs) == {(1, 1)}
        assert prod.coeffs[(1, 1)] == pytest.approx(1.0)

    def test_vu_coefficient(self):
        u = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        v = NCPolynomial.monomial(THETA_QUARTER, (0, 1))
        prod = poly_mul(v, u)
        assert prod.coeffs[(1, 1)] == pytest.approx(np.exp(-0.5j * np.pi), abs=1e-15)

    def test_gns_oracle_for_products(self):
        # multiply in the truncated l2(Z^2) picture and read the coefficient back
        u = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        v = NCPolynomial.monomial(THETA_QUARTER, (0, 1))
        radius = 3
        g = gns_matrix(u, radius) @ gns_matrix(v, radius)
        vac = gns_vacuum_index(radius, 2)
        target = gns_vacuum_index(radius, 2) + (2 * radius + 1) + 1  # |(1,1)>
        assert g[target, vac] == pytest.approx(poly_mul(u, v).coeffs[(1, 1)], abs=1e-14)
        g2 = gns_matrix(v, radius) @ gns_matrix(u, radius)
        assert g2[target, vac] == pytest.approx(poly_mul(v, u).coeffs[(1, 1)], abs=1e-14)

    def test_unit_element(self):
        rng = np.random.default_rng(0)
        theta = rational_theta(rng, 3)
        b = random_poly(rng, theta)
        one = NCPolynomial.one(theta)
        assert poly_mul(one, b).allclose(b, 1e-14)
        assert poly_mul(b, one).allclose(b, 1e-14)

    def test_theta_mismatch_rejected(self):
        u = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        w = NCPolynomial.monomial(THETA_THIRD, (1, 0))
        with pytest.raises(ThetaMismatchError):
            poly_mul(u, w)

    def test_commutation_phase_identity(self):
        # u_j u_k = exp(2 pi i theta_jk) u_k u_j as single-term polynomials
        rng = np.random.default_rng(1)
        theta = rational_theta(rng, 4)
        for j in range(4):
            for k in range(4):
                if j == k:
                    continue
                ej = tuple(int(a == j) for a in range(4))
                ek = tuple(int(a == k) for a in range(4))
                lhs = poly_mul(
                    NCPolynomial.monomial(theta, ej), NCPolynomial.monomial(theta, ek)
                )
                rhs = poly_mul(
                    NCPolynomial.monomial(theta, ek), NCPolynomial.monomial(theta, ej)
                )
                phase = np.exp(2j * np.pi * float(theta.entry(j, k)))
                assert lhs.coeffs[tuple(a + b for a, b in zip(ej, ek))] == pytest.approx(
                    phase * rhs.coeffs[tuple(a + b for a, b in zip(ej, ek))], abs=1e-14
                )


class TestExactArithmetic:
    def test_exact_associativity_dict_equality(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            d = int(rng.integers(1, 5))
            theta = rational_theta(rng, d)
            q = ta.phase_order(theta)

            def rand_exact():
                coeffs = {}
                for _ in range(int(rng.integers(1, 9))):
                    m = tuple(int(x) for x in rng.integers(-2, 3, size=d))
                    c = Cyclotomic.root(q, int(rng.integers(0, q)), int(rng.integers(1, 4)))
                    coeffs[m] = coeffs[m] + c if m in coeffs else c
                return NCPolynomial(theta, coeffs)

            a, b, c = rand_exact(), rand_exact(), rand_exact()
            assert poly_mul(poly_mul(a, b), c) == poly_mul(a, poly_mul(b, c))

    def test_float_associativity_irrational(self):
        rng = np.random.default_rng(3)
        theta = SkewMatrix.from_upper(3, [np.sqrt(2) / 10, np.pi / 7, 0.31])
        for _ in range(20):
            a, b, c = (random_poly(rng, theta, terms=6) for _ in range(3))
            assert poly_mul(poly_mul(a, b), c).allclose(poly_mul(a, poly_mul(b, c)), 1e-12)

    def test_exact_monomial_unitarity(self):
        a = NCPolynomial.exact_monomial(THETA_THIRD, (1, 1))
        prod = poly_mul(a, poly_adjoint(a))
        assert prod == NCPolynomial.one(THETA_THIRD, exact=True)


class TestAdjoint:
    def test_monomial_adjoint(self):
        a = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        b = poly_adjoint(a)
        assert set(b.coeffs) == {(-1, 0)}
        assert b.coeffs[(-1, 0)] == pytest.approx(1.0)

    def test_scalar_conjugation(self):
        a = NCPolynomial.monomial(THETA_QUARTER, (0, 0), 2 + 1j)
        assert poly_adjoint(a).coeffs[(0, 0)] == pytest.approx(2 - 1j)

    def test_unitarity_of_monomials(self):
        a = NCPolynomial.monomial(THETA_THIRD, (1, 1))
        assert poly_mul(a, poly_adjoint(a)).allclose(NCPolynomial.one(THETA_THIRD), 1e-14)

    def test_involution_is_involutive(self):
        rng = np.random.default_rng(4)
        theta = rational_theta(rng, 3)
        a = random_poly(rng, theta)
        assert poly_adjoint(poly_adjoint(a)).allclose(a, 1e-14)

    def test_antihomomorphism(self):
        rng = np.random.default_rng(5)
        theta = rational_theta(rng, 2)
        a, b = random_poly(rng, theta), random_poly(rng, theta)
        assert poly_adjoint(poly_mul(a, b)).allclose(
            poly_mul(poly_adjoint(b), poly_adjoint(a)), 1e-12
        )

    def test_positivity_of_trace(self):
        rng = np.random.default_rng(6)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta)
        val = trace(poly_mul(poly_adjoint(a), a))
        expected = sum(abs(c) ** 2 for c in a.coeffs.values())
        assert val.imag == pytest.approx(0.0, abs=1e-12)
        assert val.real == pytest.approx(expected, rel=1e-12)


class TestTrace:
    def test_unit(self):
        assert trace(NCPolynomial.one(THETA_QUARTER)) == pytest.approx(1.0)

    def test_offdiagonal_vanishes(self):
        assert trace(NCPolynomial.monomial(THETA_QUARTER, (2, -1))) == 0

    def test_linearity(self):
        a = NCPolynomial(THETA_QUARTER, {(0, 0): 3.0, (1, 0): 5.0})
        assert trace(a) == pytest.approx(3.0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_trace_commutation(self, seed):
        rng = np.random.default_rng(seed)
        theta = rational_theta(rng, int(rng.integers(1, 4)))
        a, b = random_poly(rng, theta, 4), random_poly(rng, theta, 4)
        assert trace(poly_mul(a, b)) == pytest.approx(trace(poly_mul(b, a)), abs=1e-12)


class TestConditionalExpectation:
    def test_kills_moving_axis(self):
        a = NCPolynomial(THETA_QUARTER, {(1, 0): 1.0, (0, 1): 1.0})
        out = cond_expectation(a, 0)
        assert set(out.coeffs) == {(0, 1)}

    def test_full_chain_is_trace(self):
        rng = np.random.default_rng(7)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta)
        out = cond_expectation(cond_expectation(a, 0), 1)
        expected = trace(a)
        if abs(expected) < 1e-15:
            assert not out.coeffs
        else:
            assert set(out.coeffs) == {(0, 0)}
            assert out.coeffs[(0, 0)] == pytest.approx(expected)

    def test_idempotent_and_commuting(self):
        rng = np.random.default_rng(8)
        theta = rational_theta(rng, 3)
        a = random_poly(rng, theta, 7)
        p1 = cond_expectation(a, 1)
        assert cond_expectation(p1, 1) == p1
        assert cond_expectation(cond_expectation(a, 0), 2) == cond_expectation(
            cond_expectation(a, 2), 0
        )

    def test_coefficientwise_contraction(self):
        rng = np.random.default_rng(9)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta, 6)
        out = cond_expectation(a, 0)
        for m, c in out.coeffs.items():
            assert abs(c) <= abs(a.coeffs[m]) + 1e-15

    def test_axis_out_of_range(self):
        a = NCPolynomial.one(THETA_QUARTER)
        with pytest.raises(ValidationError):
            cond_expectation(a, 2)
        with pytest.raises(ValidationError):
            cond_expectation(a, -1)


class TestTransference:
    def test_identity(self):
        rng = np.random.default_rng(10)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta)
        assert transference(a, [1.0, 1.0]).allclose(a, 1e-15)

    def test_single_factor(self):
        a = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        out = transference(a, [1j, 1.0])
        assert out.coeffs[(1, 0)] == pytest.approx(1j)

    def test_multiplicative(self):
        rng = np.random.default_rng(11)
        a = random_poly(rng, THETA_THIRD, 5)
        b = random_poly(rng, THETA_THIRD, 5)
        angles = rng.uniform(0, 2 * np.pi, size=2)
        z = [np.exp(1j * t) for t in angles]
        assert transference(poly_mul(a, b), z).allclose(
            poly_mul(transference(a, z), transference(b, z)), 1e-12
        )

    def test_exact_turns(self):
        a = NCPolynomial.exact_monomial(THETA_THIRD, (1, 2))
        out = transference(a, [Fraction(1, 4), Fraction(1, 3)])
        # z^m rotates by 1/4 + 2/3 = 11/12
        expected = Cyclotomic.one(ta.phase_order(THETA_THIRD)).rotate(Fraction(11, 12))
        assert out.coeffs[(1, 2)] == expected

    def test_rejects_non_unimodular(self):
        a = NCPolynomial.one(THETA_QUARTER)
        with pytest.raises(ValidationError):
            transference(a, [0.5, 1.0])


class TestGnsMatrix:
    def test_identity_polynomial(self):
        g = gns_matrix(NCPolynomial.one(THETA_QUARTER), 2)
        assert g.shape == (25, 25)
        assert np.abs(g - np.eye(25)).max() == 0

    def test_generator_entries_match_phase_formula(self):
        # action on |m'>: phase exp(-2 pi i theta_01 m_1 m'_0) for m = (1, 0): no phase
        g = gns_matrix(NCPolynomial.monomial(THETA_QUARTER, (1, 0)), 2)
        side = 5
        for m0 in range(-2, 2):  # target must stay in the box
            for m1 in range(-2, 3):
                col = (m0 + 2) * side + (m1 + 2)
                row = (m0 + 3) * side + (m1 + 2)
                assert g[row, col] == pytest.approx(1.0)
        # and u_2 = u^{(0,1)} picks up exp(-2 pi i theta m'_0)
        g2 = gns_matrix(NCPolynomial.monomial(THETA_QUARTER, (0, 1)), 2)
        for m0 in range(-2, 3):
            for m1 in range(-2, 2):
                col = (m0 + 2) * side + (m1 + 2)
                row = (m0 + 2) * side + (m1 + 3)
                assert g2[row, col] == pytest.approx(
                    np.exp(-2j * np.pi * 0.25 * m0), abs=1e-14
                )

    def test_interior_block_multiplicativity(self):
        rng = np.random.default_rng(12)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta, 3, max_exp=1)
        b = random_poly(rng, theta, 3, max_exp=1)
        radius = 4
        ga, gb = gns_matrix(a, radius), gns_matrix(b, radius)
        gab = gns_matrix(poly_mul(a, b), radius)
        # vectors supported in radius - deg(a) - deg(b) see the exact action
        inner = radius - a.degree() - b.degree()
        side = 2 * radius + 1
        vec = np.zeros(side * side, dtype=complex)
        for m0 in range(-inner, inner + 1):
            for m1 in range(-inner, inner + 1):
                vec[(m0 + radius) * side + (m1 + radius)] = rng.standard_normal()
        assert np.abs(gab @ vec - ga @ (gb @ vec)).max() < 1e-13

    def test_trace_as_vacuum_expectation(self):
        rng = np.random.default_rng(13)
        theta = rational_theta(rng, 2)
        a = random_poly(rng, theta, 5)
        radius = a.degree()
        g = gns_matrix(a, radius)
        vac = gns_vacuum_index(radius, 2)
        assert g[vac, vac] == pytest.approx(trace(a), abs=1e-14)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValidationError):
            gns_matrix(NCPolynomial.one(THETA_QUARTER), -1)

    def test_clock_shift_relation_on_interior(self):
        # commutator of the GNS generators reproduces the clock/shift phase
        g1 = gns_matrix(NCPolynomial.monomial(THETA_QUARTER, (1, 0)), 3)
        g2 = gns_matrix(NCPolynomial.monomial(THETA_QUARTER, (0, 1)), 3)
        side = 7
        vec = np.zeros(side * side, dtype=complex)
        for m0 in range(-1, 2):
            for m1 in range(-1, 2):
                vec[(m0 + 3) * side + (m1 + 3)] = 1.0 + m0 - 0.5 * m1
        sigma = np.exp(2j * np.pi * 0.25)
        assert np.abs(g1 @ (g2 @ vec) - sigma * (g2 @ (g1 @ vec))).max() < 1e-13


class TestCocycle:
    def test_zero_theta(self):
        rep = cocycle_validate(SkewMatrix.zero(2), [((1, 2), (3, -1), (0, 4))])
        assert rep.max_associativity_defect == 0
        assert rep.max_normalization_defect == 0

    def test_exhaustive_small_box_rational(self):
        theta = THETA_THIRD
        rng_range = range(-2, 3)
        triples = [
            ((a, b), (c, d), (e, f))
            for a in rng_range for b in rng_range
            for c in rng_range for d in rng_range
            for e in rng_range for f in rng_range
        ]
        rep = cocycle_validate(theta, triples[:: 7])  # decimated but wide coverage
        assert rep.exact
        assert rep.max_associativity_defect == 0
        assert rep.max_normalization_defect == 0

    def test_irrational_defect_small(self):
        theta = SkewMatrix.from_upper(2, [np.sqrt(2) / 10])
        rng = np.random.default_rng(14)
        triples = [tuple(map(tuple, rng.integers(-50, 51, size=(3, 2)))) for _ in range(1000)]
        rep = cocycle_validate(theta, triples)
        assert rep.max_associativity_defect <= 1e-12

    def test_empty_samples_rejected(self):
        with pytest.raises(ValidationError):
            cocycle_validate(THETA_THIRD, [])


class TestNormalization:
    def test_zero_coefficients_dropped(self):
        a = NCPolynomial(THETA_QUARTER, {(1, 0): 1e-16, (0, 1): 1.0})
        assert set(a.coeffs) == {(0, 1)}

    def test_cancellation_normalizes(self):
        a = NCPolynomial.monomial(THETA_QUARTER, (1, 0))
        assert not (a - a).coeffs

    def test_wrong_dimension_key_rejected(self):
        with pytest.raises(ValidationError):
            NCPolynomial(THETA_QUARTER, {(1, 0, 0): 1.0})
