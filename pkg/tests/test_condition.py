import math

import numpy as np
import pytest

from charcond import condition as C
from charcond.linalg import Spectrum, eigenvalues, polynomial_roots, sample_ginibre
from charcond.polynomial import Polynomial, char_poly_from_spectrum
from charcond.rng import complex_normals, derive_seed, make_rng

P_QUAD = Polynomial([2, -3, 1])  # (X-1)(X-2)
P_SQDIFF = Polynomial([-1, 0, 1])  # (X-1)(X+1)


class TestClosedForms:
    def test_linear_at_root(self):
        # ||X-1|| = sqrt(2), |p'| = 1, ||(1,1)|| = sqrt(2)
        assert C.ln_cond(Polynomial([-1, 1]), 1.0) == pytest.approx(math.log(2))

    def test_quadratic_euclidean(self):
        # sqrt(14) * sqrt(3) / (1 * 1) = sqrt(42)
        assert C.ln_cond(P_QUAD, 1.0) == pytest.approx(0.5 * math.log(42))

    def test_quadratic_weyl(self):
        # sqrt(9.5) * 2 / (1 * 1)
        assert C.ln_cond_weyl(P_QUAD, 1.0) == pytest.approx(math.log(2 * math.sqrt(9.5)))

    def test_sqdiff_weyl(self):
        # sqrt(2) * 2 / (1 * 2) = sqrt(2)
        assert C.ln_cond_weyl(P_SQDIFF, 1.0) == pytest.approx(0.5 * math.log(2))

    def test_componentwise_values(self):
        # (1/|p'|) * sum |a_k| : (1/2)*(1+0+1) = 1 and (1/1)*(2+3+1) = 6
        assert C.ln_cond_componentwise(P_SQDIFF, 1.0) == pytest.approx(0.0)
        assert C.ln_cond_componentwise(P_QUAD, 1.0) == pytest.approx(math.log(6))

    def test_projective_value(self):
        # cond_weyl * 1/sqrt(2) = sqrt(19)
        assert C.ln_mu_projective(P_QUAD, 1.0) == pytest.approx(0.5 * math.log(19))

    def test_projective_below_weyl(self):
        rng = make_rng(3)
        for k in range(25):
            p = Polynomial(complex_normals(rng, 7))
            for z in polynomial_roots(p):
                assert C.ln_mu_projective(p, z) <= C.ln_cond_weyl(p, z) + 1e-12

    def test_projective_identity_exact(self):
        rng = make_rng(4)
        p = Polynomial(complex_normals(rng, 9))
        for z in polynomial_roots(p):
            r = abs(z)
            expected = (
                C.ln_cond_weyl(p, z)
                + math.log(r)
                - 0.5 * (2 * math.log(r) + math.log1p(r**-2) if r > 1 else math.log1p(r**2))
            )
            assert C.ln_mu_projective(p, z) == pytest.approx(expected, abs=1e-14)

    def test_linear_scale_accessors(self):
        assert C.cond(P_QUAD, 1.0) == pytest.approx(math.sqrt(42))
        assert C.cond_weyl(P_QUAD, 1.0) == pytest.approx(2 * math.sqrt(9.5))
        assert C.cond_componentwise(P_QUAD, 1.0) == pytest.approx(6.0)
        assert C.mu_projective(P_QUAD, 1.0) == pytest.approx(math.sqrt(19))

    def test_linear_scale_overflow_signalled(self):
        # a cluster of simple roots at scale 1e-140 drives the condition
        # number past the double-precision ceiling (ln ~ 968 here) while
        # the derivative stays representable and clearly simple
        r = 1e-140
        p = char_poly_from_spectrum([r, 1.5 * r, 2 * r, 1.0])
        assert C.ln_cond(p, r) > 709
        with pytest.raises(OverflowError):
            C.cond(p, r)


class TestErrors:
    def test_zero_root_rejected(self):
        with pytest.raises(ValueError, match="zero root"):
            C.ln_cond(Polynomial([0, 1]), 0.0)

    def test_multiple_zero_rejected(self):
        p = Polynomial([1, -2, 1])  # (X-1)^2
        with pytest.raises(ValueError, match="numerically multiple"):
            C.ln_cond(p, 1.0)

    def test_zero_polynomial_rejected(self):
        with pytest.raises(ValueError):
            C.ln_cond(Polynomial([0.0]), 1.0)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            C.ln_cond(Polynomial([3.0]), 1.0)


class TestInvariances:
    def test_unit_scalar_invariance(self):
        rng = make_rng(6)
        p = Polynomial(complex_normals(rng, 8))
        q = Polynomial(p.coeffs * np.exp(0.777j))
        for z in polynomial_roots(p):
            assert C.ln_cond(q, z) == pytest.approx(C.ln_cond(p, z), abs=1e-12)
            assert C.ln_cond_weyl(q, z) == pytest.approx(C.ln_cond_weyl(p, z), abs=1e-12)
            assert C.ln_cond_componentwise(q, z) == pytest.approx(
                C.ln_cond_componentwise(p, z), abs=1e-12
            )
            assert C.ln_mu_projective(q, z) == pytest.approx(
                C.ln_mu_projective(p, z), abs=1e-12
            )

    def test_componentwise_positive_scaling(self):
        rng = make_rng(7)
        p = Polynomial(complex_normals(rng, 6))
        for c in (1e-100, 0.5, 3.0, 1e80):
            q = Polynomial(p.coeffs * c)
            for z in polynomial_roots(p):
                assert C.ln_cond_componentwise(q, z) == pytest.approx(
                    C.ln_cond_componentwise(p, z), abs=1e-12
                )

    def test_universal_floor_on_random_polynomials(self):
        rng = make_rng(8)
        for k in range(60):
            deg = 1 + int(rng.random() * 12)
            p = Polynomial(complex_normals(rng, deg + 1))
            for z in polynomial_roots(p):
                if abs(z) == 0:
                    continue
                assert C.ln_cond(p, z) >= -math.log(deg) - 1e-9


class TestPairProductBound:
    def test_equal_pair(self):
        assert C.ln_pair_product_bound([1.0, 1.0], 0) == pytest.approx(math.log(0.5))

    def test_one_two(self):
        assert C.ln_pair_product_bound([1.0, 2.0], 0) == pytest.approx(math.log(2 / 3))

    def test_single_modulus_empty_product(self):
        assert C.ln_pair_product_bound([5.0], 0) == 0.0

    def test_zero_modulus_sentinel(self):
        assert C.ln_pair_product_bound([0.0, 1.0], 1) == -math.inf

    def test_index_validated(self):
        with pytest.raises(ValueError):
            C.ln_pair_product_bound([1.0, 2.0], 2)

    def test_matches_direct_product(self):
        rng = make_rng(9)
        r = rng.random(10) + 0.1
        for i in range(10):
            direct = sum(
                math.log(r[i] * r[j] / (r[i] + r[j])) for j in range(10) if j != i
            )
            assert C.ln_pair_product_bound(r, i) == pytest.approx(direct, abs=1e-10)


class TestCondProfile:
    def test_diag_1_2_matches_hand_values(self):
        s = eigenvalues(np.diag([1.0, 2.0]))
        prof = C.cond_profile(char_poly_from_spectrum(s.eigenvalues), s)
        by_lam = {round(r.lam.real): r for r in prof.records}
        assert by_lam[1].ln_cond == pytest.approx(0.5 * math.log(42))
        assert by_lam[1].ln_cond_weyl == pytest.approx(math.log(2 * math.sqrt(9.5)))
        assert by_lam[1].ln_cw == pytest.approx(math.log(6))
        assert by_lam[1].ln_mu == pytest.approx(0.5 * math.log(19))
        assert by_lam[1].ln_pair_bound == pytest.approx(math.log(2 / 3))
        # at lambda = 2: ||p||*||(1,2,4)||/(2*|p'(2)|) = sqrt(14*21)/2
        assert by_lam[2].ln_cond == pytest.approx(0.5 * math.log(14 * 21) - math.log(2))
        assert prof.ln_cond_min <= prof.ln_cond_max

    def test_profile_matches_scalar_ops(self):
        s = eigenvalues(sample_ginibre(12, 44))
        p = char_poly_from_spectrum(s.eigenvalues)
        prof = C.cond_profile(p, s)
        for rec in prof.records:
            assert rec.ln_cond == pytest.approx(C.ln_cond(p, rec.lam), abs=1e-13)
            assert rec.ln_cw == pytest.approx(
                C.ln_cond_componentwise(p, rec.lam), abs=1e-13
            )

    def test_inconsistent_pair_rejected(self):
        s = eigenvalues(np.diag([1.0, 2.0]))
        with pytest.raises(ValueError, match="inconsistent"):
            C.cond_profile(Polynomial([5, -3, 1]), s)

    def test_degree_mismatch_rejected(self):
        s = eigenvalues(np.diag([1.0, 2.0]))
        with pytest.raises(ValueError, match="degree"):
            C.cond_profile(Polynomial([-6, 11, -6, 1]), s)

    def test_multiple_eigenvalue_flagged_not_poisoning(self):
        # (X-1)^2 (X-4): derivative vanishes at the double root
        s = Spectrum(np.array([1.0, 1.0, 4.0]))
        p = char_poly_from_spectrum(s.eigenvalues)
        prof = C.cond_profile(p, s)
        assert prof.n_flagged == 2
        good = [r for r in prof.records if not r.multiple]
        assert len(good) == 1 and good[0].lam == 4.0
        assert math.isfinite(prof.ln_cond_min)

    def test_all_multiple_rejected(self):
        s = Spectrum(np.array([1.0, 1.0]))
        p = char_poly_from_spectrum(s.eigenvalues)
        with pytest.raises(ValueError, match="multiple"):
            C.cond_profile(p, s)

    def test_chain_inequality_on_ginibre(self):
        # every flavor dominates the pair product bound
        for k in range(40):
            s = eigenvalues(sample_ginibre(20, derive_seed(321, k)))
            prof = C.cond_profile(char_poly_from_spectrum(s.eigenvalues), s)
            for rec in prof.records:
                assert rec.ln_cond >= rec.ln_pair_bound - 1e-6
                assert rec.ln_cond_weyl >= rec.ln_pair_bound - 1e-6
                assert rec.ln_mu >= rec.ln_pair_bound - 1e-6

    def test_mean_ln_cond_between_extremes(self):
        s = eigenvalues(sample_ginibre(15, 2))
        prof = C.cond_profile(char_poly_from_spectrum(s.eigenvalues), s)
        assert prof.ln_cond_min <= prof.mean_ln_cond <= prof.ln_cond_max


class TestOracle:
    def test_linear_polynomial_converges(self):
        got = C.finite_difference_cond_oracle(Polynomial([-1, 1]), 1.0, ndirs=2000, seed=3)
        assert got == pytest.approx(math.log(2), abs=0.05)

    def test_oracle_is_first_order_lower_estimate(self):
        rng = make_rng(10)
        for k in range(5):
            p = Polynomial(complex_normals(rng, 5))
            for z in polynomial_roots(p):
                got = C.finite_difference_cond_oracle(p, z, ndirs=400, seed=k)
                assert got <= C.ln_cond(p, z) + 0.01

    def test_degree_five_convergence(self):
        rng = make_rng(11)
        p = Polynomial(complex_normals(rng, 6))
        for j, z in enumerate(polynomial_roots(p)):
            got = C.finite_difference_cond_oracle(p, z, ndirs=2000, seed=j)
            assert got == pytest.approx(C.ln_cond(p, z), abs=0.05)

    def test_deterministic(self):
        p = Polynomial([2, -3, 1])
        a = C.finite_difference_cond_oracle(p, 1.0, ndirs=300, seed=5)
        b = C.finite_difference_cond_oracle(p, 1.0, ndirs=300, seed=5)
        assert a == b

    def test_ndirs_validated(self):
        with pytest.raises(ValueError):
            C.finite_difference_cond_oracle(P_QUAD, 1.0, ndirs=10, seed=1)
