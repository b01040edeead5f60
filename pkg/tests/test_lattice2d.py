import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from truncrack import (
    DegenerateInput,
    IterationCapExceeded,
    IVec2,
    LatticeBasis,
    SearchSpaceExceeded,
    SingularBasis,
    WeightedForm,
    gauss_reduce,
    nearest_lattice_point,
    rect_search,
    round_half_to_zero,
    solution_basis,
    solve_coeffs,
    truncate_decimal,
)
from truncrack.lattice2d import coefficient_box

# The worked toy instance used throughout: z=6173, p=22, q=5, u=22131.
Z, P, Q, U = 6173, 22, 5, 22131
B1, B2 = 1 << 14, 1 << 5
FORM = WeightedForm.for_rectangle(B1, B2)


def worked_family():
    return solution_basis(Z, P, Q, U)


def worked_reduced():
    reduced, _ = gauss_reduce(worked_family().basis(), FORM)
    return reduced


def random_family(rng, max_p=16):
    p = rng.randint(3, max_p)
    z = rng.randint(1, (1 << p) - 1)
    q = rng.randint(0, max(0, p // 2))
    u = rng.randint(0, (1 << (p - q)) - 1)
    return solution_basis(z, p, q, u)


class TestSolutionBasis:
    def test_worked_particular_solution(self):
        fam = worked_family()
        assert fam.v0 == IVec2(115, 1703)

    def test_worked_generators(self):
        fam = worked_family()
        assert fam.g1 == IVec2(114, -3490582)
        assert fam.g2 == IVec2(115, -3484409)
        assert fam.basis().det() == 1 << 22

    def test_zero_token(self):
        fam = solution_basis(97, 10, 3, 0)
        assert fam.v0 == IVec2(0, 0)
        assert fam.g1 == IVec2(0, -(1 << 10))
        assert fam.g2 == IVec2(1, 97 - (1 << 10))

    def test_zero_multiplier_rejected(self):
        with pytest.raises(DegenerateInput):
            solution_basis(0, 10, 3, 5)

    def test_vectors_satisfy_congruences(self):
        rng = random.Random(7)
        for _ in range(200):
            fam = random_family(rng)
            modulus = 1 << fam.modulus_exp
            basis = fam.basis()
            assert basis.contains(fam.g1)
            assert basis.contains(fam.g2)
            assert 0 <= fam.v0.y < fam.z
            assert abs(basis.det()) == modulus

    def test_proof_variant_spans_same_lattice(self):
        rng = random.Random(11)
        for _ in range(50):
            p = rng.randint(4, 14)
            z = rng.randint(1, (1 << p) - 1)
            q = rng.randint(0, p // 2)
            u = rng.randint(0, (1 << (p - q)) - 1)
            form = WeightedForm(wx=1, wy=1)
            red_a, _ = gauss_reduce(solution_basis(z, p, q, u).basis(), form)
            red_b, _ = gauss_reduce(
                solution_basis(z, p, q, u, proof_variant=True).basis(), form
            )
            got = {red_a.u1, -red_a.u1, red_a.u2, -red_a.u2}
            assert red_b.u1 in got and red_b.u2 in got


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (Fraction(1, 2), 0),
            (Fraction(-1, 2), 0),
            (Fraction(0), 0),
            (Fraction(3, 2), 1),
            (Fraction(-3, 2), -1),
            (Fraction(13790, 1000), 14),
            (Fraction(-10208, 1000), -10),
            (7, 7),
        ],
    )
    def test_examples(self, value, expected):
        assert round_half_to_zero(value) == expected

    @given(value=st.fractions())
    def test_nearest_with_ties_toward_zero(self, value):
        result = round_half_to_zero(value)
        assert isinstance(result, int)
        assert abs(value - result) <= Fraction(1, 2)
        if abs(value - result) == Fraction(1, 2):
            other = 2 * value - result  # the equally-near integer
            assert abs(result) <= abs(other)


class TestGaussReduce:
    def test_worked_reduction(self):
        reduced = worked_reduced()
        expected = {IVec2(-25140, 28), IVec2(25140, -28), IVec2(-33973, -129), IVec2(33973, 129)}
        assert reduced.u1 in expected and reduced.u2 in expected
        assert reduced.u1 not in (reduced.u2, -reduced.u2)
        assert abs(reduced.det()) == 1 << 22
        assert reduced.is_reduced(FORM)

    def test_fixed_point(self):
        reduced = worked_reduced()
        again, passes = gauss_reduce(reduced, FORM)
        assert (again.u1, again.u2) == (reduced.u1, reduced.u2)
        assert passes == 1

    def test_orthogonal_basis_unchanged(self):
        basis = LatticeBasis(IVec2(1, 0), IVec2(0, 1 << 8), modulus_exp=8, z=0)
        reduced, passes = gauss_reduce(basis, WeightedForm(wx=1, wy=1))
        assert (reduced.u1, reduced.u2) == (basis.u1, basis.u2)
        assert passes == 1

    def test_degenerate_rejected(self):
        basis = LatticeBasis(IVec2(2, 4), IVec2(1, 2), modulus_exp=4, z=1)
        with pytest.raises(DegenerateInput):
            gauss_reduce(basis, WeightedForm(wx=1, wy=1))

    def test_iteration_cap(self):
        # A Fibonacci-skewed basis needs ~one pass per index; with
        # modulus_exp=1 the cap is 64 passes, far too few on purpose.
        a, b = 1, 1
        for _ in range(400):
            a, b = b, a + b
        basis = LatticeBasis(IVec2(b, a), IVec2(a, b - a), modulus_exp=1, z=0)
        with pytest.raises(IterationCapExceeded):
            gauss_reduce(basis, WeightedForm(wx=1, wy=1))

    def test_per_step_invariants_random(self):
        rng = random.Random(99)
        for _ in range(60):
            fam = random_family(rng)
            form = WeightedForm(wx=rng.randint(1, 9), wy=rng.randint(1, 9))
            target_det = abs(fam.basis().det())
            state = {"u1": fam.g1, "u2": fam.g2}
            def check(step, state=state, form=form, target_det=target_det):
                det = step.u1.x * step.u2.y - step.u1.y * step.u2.x
                assert abs(det) == target_det
                replaced = step.u1 if step.target == "u1" else step.u2
                if step.c != 0:
                    assert form.norm_sq(replaced) < form.norm_sq(state[step.target])
                state["u1"], state["u2"] = step.u1, step.u2
            reduced, passes = gauss_reduce(fam.basis(), form, on_step=check)
            assert passes <= 64 * fam.modulus_exp
            cross = abs(form.inner(reduced.u1, reduced.u2))
            assert 2 * cross <= min(form.norm_sq(reduced.u1), form.norm_sq(reduced.u2))

    def test_membership_closed_under_combinations(self):
        rng = random.Random(5)
        reduced = worked_reduced()
        for _ in range(100):
            a1, a2 = rng.randint(-50, 50), rng.randint(-50, 50)
            combo = reduced.u1.scaled(a1) + reduced.u2.scaled(a2)
            assert reduced.contains(combo)

    def test_span_preserved(self):
        # Original generators must be integer combinations of the output.
        rng = random.Random(31)
        for _ in range(40):
            fam = random_family(rng)
            form = WeightedForm(wx=1, wy=rng.randint(1, 16))
            reduced, _ = gauss_reduce(fam.basis(), form)
            for g in (fam.g1, fam.g2):
                a1, a2 = solve_coeffs(reduced, g)
                assert a1.denominator == 1 and a2.denominator == 1


class TestSolveCoeffs:
    def test_worked_coefficients(self):
        # In the orientation with u1=(-25140,28), u2=(-33973,-129).
        basis = LatticeBasis(IVec2(-25140, 28), IVec2(-33973, -129), modulus_exp=22, z=Z)
        a1, a2 = solve_coeffs(basis, IVec2(115, 1703))
        assert a1 == Fraction(57841184, 1 << 22)
        assert a2 == Fraction(-42816640, 1 << 22)
        assert truncate_decimal(a1) == "13.790"
        assert truncate_decimal(a2) == "-10.208"

    def test_worked_corner_coefficients(self):
        # Exact Cramer solve of the four rectangle corners, truncated at
        # three decimals.  Pinned from independent hand evaluation.
        basis = LatticeBasis(IVec2(-25140, 28), IVec2(-33973, -129), modulus_exp=22, z=Z)
        v = IVec2(115, 1703)
        corners = [v, v - IVec2(B1, 0), v - IVec2(0, B2), v - IVec2(B1, B2)]
        expected = [
            ("13.790", "-10.208"),
            ("14.294", "-10.098"),
            ("13.531", "-10.016"),
            ("14.035", "-9.907"),
        ]
        for corner, (want1, want2) in zip(corners, expected):
            a1, a2 = solve_coeffs(basis, corner)
            assert (truncate_decimal(a1), truncate_decimal(a2)) == (want1, want2)

    def test_identity_cases(self):
        basis = worked_reduced()
        assert solve_coeffs(basis, basis.u1) == (1, 0)
        assert solve_coeffs(basis, IVec2(0, 0)) == (0, 0)

    def test_reconstruction(self):
        rng = random.Random(17)
        basis = worked_reduced()
        for _ in range(50):
            v = IVec2(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
            a1, a2 = solve_coeffs(basis, v)
            x = a1 * basis.u1.x + a2 * basis.u2.x
            y = a1 * basis.u1.y + a2 * basis.u2.y
            assert (x, y) == (v.x, v.y)
            assert ((1 << 22) % a1.denominator) == 0

    def test_singular(self):
        basis = LatticeBasis(IVec2(2, 4), IVec2(1, 2), modulus_exp=4, z=1)
        with pytest.raises(SingularBasis):
            solve_coeffs(basis, IVec2(1, 1))


class TestNearestPoint:
    def test_worked_rounding(self):
        basis = LatticeBasis(IVec2(-25140, 28), IVec2(-33973, -129), modulus_exp=22, z=Z)
        assert nearest_lattice_point(basis, IVec2(115, 1703), FORM) == (14, -10)

    def test_worked_residual(self):
        reduced = worked_reduced()
        v = IVec2(115, 1703)
        a1, a2 = nearest_lattice_point(reduced, v, FORM)
        residual = v - reduced.u1.scaled(a1) - reduced.u2.scaled(a2)
        assert residual == IVec2(12345, 21)

    def test_lattice_point_maps_to_zero_residual(self):
        reduced = worked_reduced()
        v = reduced.u1.scaled(3) - reduced.u2.scaled(7)
        a1, a2 = nearest_lattice_point(reduced, v, FORM)
        assert v - reduced.u1.scaled(a1) - reduced.u2.scaled(a2) == IVec2(0, 0)

    def test_floor_mode(self):
        basis = LatticeBasis(IVec2(-25140, 28), IVec2(-33973, -129), modulus_exp=22, z=Z)
        assert nearest_lattice_point(basis, IVec2(115, 1703), FORM, mode="floor") == (13, -11)

    def test_rounding_alone_can_miss_minimum(self):
        # Frozen instance where a coefficient lands exactly on a half
        # integer: plain rounding (ties toward zero) keeps norm 25 while
        # the true nearest point has norm 18.  The neighbourhood scan in
        # nearest_lattice_point recovers the minimum.
        basis = LatticeBasis(IVec2(-8, 0), IVec2(1, -2), modulus_exp=4, z=14)
        form = WeightedForm(wx=1, wy=9)
        assert basis.is_reduced(form)
        v = IVec2(-5, 3)
        a1, a2 = solve_coeffs(basis, v)
        assert (a1, a2) == (Fraction(7, 16), Fraction(-3, 2))
        plain = (round_half_to_zero(a1), round_half_to_zero(a2))
        assert plain == (0, -1)
        plain_norm = form.norm_sq(v - basis.u1.scaled(0) - basis.u2.scaled(-1))
        assert plain_norm == 25
        best = nearest_lattice_point(basis, v, form)
        best_norm = form.norm_sq(v - basis.u1.scaled(best[0]) - basis.u2.scaled(best[1]))
        assert best == (0, -2) and best_norm == 18

    def test_matches_exhaustive_small(self):
        rng = random.Random(2024)
        for _ in range(60):
            fam = random_family(rng, max_p=8)
            form = WeightedForm(wx=rng.randint(1, 4) ** 2, wy=rng.randint(1, 4) ** 2)
            reduced, _ = gauss_reduce(fam.basis(), form)
            a1t, a2t = rng.randint(-30, 30), rng.randint(-30, 30)
            v = reduced.u1.scaled(a1t) + reduced.u2.scaled(a2t) + IVec2(
                rng.randint(-3, 3), rng.randint(-3, 3)
            )
            c1, c2 = nearest_lattice_point(reduced, v, form)
            got = form.norm_sq(v - reduced.u1.scaled(c1) - reduced.u2.scaled(c2))
            best = min(
                form.norm_sq(v - reduced.u1.scaled(b1) - reduced.u2.scaled(b2))
                for b1 in range(-50, 51)
                for b2 in range(-50, 51)
            )
            assert got == best


class TestRectSearch:
    def test_worked_answer(self):
        reduced = worked_reduced()
        hits = rect_search(reduced, IVec2(115, 1703), B1, B2)
        assert hits == [IVec2(12345, 21)]

    def test_zero_target(self):
        reduced = worked_reduced()
        hits = rect_search(reduced, IVec2(0, 0), B1, B2)
        assert IVec2(0, 0) in hits

    def test_rejects_bad_bounds(self):
        with pytest.raises(ValueError):
            rect_search(worked_reduced(), IVec2(0, 0), 0, 32)

    def test_cap(self):
        with pytest.raises(SearchSpaceExceeded):
            rect_search(worked_reduced(), IVec2(115, 1703), B1, B2, cap=3)

    def test_matches_membership_scan(self):
        rng = random.Random(404)
        for _ in range(30):
            p = rng.randint(6, 12)
            z = rng.randint(1, (1 << p) - 1)
            q = rng.randint(1, p // 2)
            m = rng.randint(2, 8)
            u = rng.randint(0, (1 << (p - q)) - 1)
            fam = solution_basis(z, p, q, u)
            b1, b2 = 1 << m, 1 << q
            form = WeightedForm.for_rectangle(b1, b2)
            reduced, _ = gauss_reduce(fam.basis(), form)
            hits = rect_search(reduced, fam.v0, b1, b2)
            modulus = 1 << p
            expected = [
                (x, y)
                for x in range(b1)
                for y in range(b2)
                if ((fam.v0.x - x) * z - (fam.v0.y - y)) % modulus == 0
            ]
            assert [(s.x, s.y) for s in hits] == sorted(expected)

    def test_sorted_by_x(self):
        rng = random.Random(8)
        for _ in range(20):
            fam = random_family(rng, max_p=10)
            b1, b2 = 1 << 6, 1 << 4
            form = WeightedForm.for_rectangle(b1, b2)
            reduced, _ = gauss_reduce(fam.basis(), form)
            hits = rect_search(reduced, fam.v0, b1, b2)
            assert [s.x for s in hits] == sorted(s.x for s in hits)

    def test_scaling_invariance(self):
        rng = random.Random(70)
        for _ in range(25):
            fam = random_family(rng)
            b1 = 1 << rng.randint(2, 8)
            b2 = 1 << rng.randint(1, 5)
            form = WeightedForm.for_rectangle(b1, b2)
            scaled = WeightedForm(wx=7 * form.wx, wy=7 * form.wy)
            red_a, it_a = gauss_reduce(fam.basis(), form)
            red_b, it_b = gauss_reduce(fam.basis(), scaled)
            assert (red_a.u1, red_a.u2, it_a) == (red_b.u1, red_b.u2, it_b)
            assert rect_search(red_a, fam.v0, b1, b2) == rect_search(red_b, fam.v0, b1, b2)
            assert nearest_lattice_point(red_a, fam.v0, form) == nearest_lattice_point(
                red_b, fam.v0, scaled
            )


class TestCoefficientBox:
    def test_contains_winning_pair(self):
        reduced = worked_reduced()
        lo1, hi1, lo2, hi2 = coefficient_box(reduced, IVec2(115, 1703), B1, B2)
        a1, a2 = nearest_lattice_point(reduced, IVec2(115, 1703), FORM)
        assert lo1 <= a1 <= hi1 and lo2 <= a2 <= hi2


class TestDecimalFormatting:
    @pytest.mark.parametrize(
        "value,expected",
        [
            (Fraction(57841184, 1 << 22), "13.790"),
            (Fraction(-42816640, 1 << 22), "-10.208"),
            (Fraction(0), "0.000"),
            (Fraction(-1, 2), "-0.500"),
            (Fraction(1999, 1000), "1.999"),
        ],
    )
    def test_truncates_toward_zero(self, value, expected):
        assert truncate_decimal(value) == expected
