"""Continuum closed forms: exponential inner products, Euler limits, index."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from prodsys.fock import (
    GridError,
    HorizonMismatchError,
    StepFunction,
    UnitLabel,
    euler_norm_defect,
    euler_product,
    exp_inner,
    guichardet_eval,
    index_from_units,
    root_inner,
    weyl_on_coherent,
)
from prodsys.linalg import InvalidInputError

RNG = np.random.default_rng(11)


def step(dim, pieces, horizon=1):
    return StepFunction.from_pieces(dim, pieces, horizon)


class TestStepFunction:
    def test_overlap_rejected(self):
        with pytest.raises(InvalidInputError):
            step(1, [(0, Fraction(1, 2), [1.0]), (Fraction(1, 4), 1, [2.0])])

    def test_out_of_horizon_rejected(self):
        with pytest.raises(InvalidInputError):
            step(1, [(0, 2, [1.0])])

    def test_value_and_gaps(self):
        f = step(2, [(Fraction(1, 4), Fraction(1, 2), [1.0, 0.0])])
        assert np.allclose(f.value_at(Fraction(1, 4)), [1.0, 0.0])
        assert np.allclose(f.value_at(Fraction(1, 2)), [0.0, 0.0])
        segs = f.segments()
        assert [(float(a), float(b)) for a, b, _ in segs] == \
            [(0.0, 0.25), (0.25, 0.5), (0.5, 1.0)]

    def test_addition_refines_breakpoints(self):
        f = step(1, [(0, Fraction(1, 2), [1.0])])
        g = step(1, [(Fraction(1, 4), 1, [2.0])])
        h = f + g
        assert np.allclose(h.value_at(Fraction(1, 8)), [1.0])
        assert np.allclose(h.value_at(Fraction(3, 8)), [3.0])
        assert np.allclose(h.value_at(Fraction(3, 4)), [2.0])


class TestExpInner:
    def test_vacuum_normalisation(self):
        zero = StepFunction.zero(2, 1)
        assert exp_inner(zero, zero) == 1.0

    def test_constant_directions(self):
        c = np.array([0.7, -0.2j])
        d = np.array([0.1, 1.0])
        t = Fraction(3, 4)
        f = step(2, [(0, t, c)], horizon=t)
        g = step(2, [(0, t, d)], horizon=t)
        expected = cmath.exp(float(t) * np.vdot(c, d))
        assert abs(exp_inner(f, g) - expected) < 1e-14

    def test_partial_overlap_quarter(self):
        f = step(1, [(0, Fraction(1, 2), [1.0])])
        g = step(1, [(Fraction(1, 4), 1, [1.0])])
        assert abs(exp_inner(f, g) - math.exp(0.25)) < 1e-14

    def test_hermitian(self):
        f = step(2, [(0, Fraction(1, 3), [1.0, 2.0j])])
        g = step(2, [(Fraction(1, 6), Fraction(2, 3), [0.5j, 1.0])])
        assert abs(exp_inner(f, g) - np.conj(exp_inner(g, f))) < 1e-14

    def test_factorises_over_time_splits(self):
        f = step(1, [(0, Fraction(2, 3), [1.0 + 0.5j])])
        g = step(1, [(Fraction(1, 3), 1, [0.3 - 0.1j])])
        s = Fraction(1, 2)
        whole = exp_inner(f, g)
        split = exp_inner(f.window(0, s), g.window(0, s)) \
            * exp_inner(f.window(s, 1), g.window(s, 1))
        assert abs(whole - split) < 1e-14

    def test_horizon_mismatch(self):
        with pytest.raises(HorizonMismatchError):
            exp_inner(StepFunction.zero(1, 1), StepFunction.zero(1, 2))


class TestRootInner:
    def test_time_scaling(self):
        c = np.array([1.0])
        assert root_inner(c, c, 2.0) == 2.0

    def test_orthogonal_directions(self):
        assert root_inner([1.0, 0.0], [0.0, 1.0], 5.0) == 0.0

    def test_additivity_in_time(self):
        c = np.array([1.0, 1.0j])
        d = np.array([0.5, -2.0])
        s, t = 0.7, 1.6
        assert abs(root_inner(c, d, s + t)
                   - root_inner(c, d, s) - root_inner(c, d, t)) < 1e-14

    def test_matches_discretised_quadrature(self):
        # oracle: Riemann sum of <c 1_[0,t), d 1_[0,t)> on a fine grid
        c = np.array([1.0, 1.0j])
        d = np.array([1.0j, 1.0])
        t = 1.0
        cells = 4096
        quad = sum(np.vdot(c, d) * (t / cells) for _ in range(cells))
        assert abs(root_inner(c, d, t) - quad) < 1e-10

    def test_nonpositive_time(self):
        with pytest.raises(ValueError):
            root_inner([1.0], [1.0], 0.0)


class TestEulerProduct:
    def test_zero_direction(self):
        g = step(1, [(0, 1, [1.0])])
        result = euler_product(g, np.array([0.0]), 1, 4)
        assert result.product_value == 1.0
        assert result.limit_value == 1.0
        assert result.gap == 0.0

    def test_unit_direction_level_four(self):
        g = step(1, [(0, 1, [1.0])])
        result = euler_product(g, np.array([1.0]), 1, 4)
        assert abs(result.product_value - (1 + 1 / 16) ** 16) < 1e-12
        assert abs(result.limit_value - math.e) < 1e-12
        assert abs(result.gap - 0.08035) < 1e-3

    def test_gap_decreases_with_refinement(self):
        g = step(2, [(0, Fraction(1, 2), [1.0, 0.0]),
                     (Fraction(1, 2), 1, [0.5, 0.5])])
        c = np.array([0.8, 0.3])
        gaps = [euler_product(g, c, 1, n).gap for n in range(1, 9)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_multi_piece_limit_is_exponential_inner(self):
        g = step(1, [(0, Fraction(1, 4), [0.5]), (Fraction(1, 4), 1, [1.5])])
        c = np.array([1.0])
        result = euler_product(g, c, 1, 6)
        coherent = step(1, [(0, 1, c)])
        assert abs(result.limit_value - exp_inner(g, coherent)) < 1e-14

    def test_off_grid_breakpoint(self):
        g = step(1, [(0, Fraction(1, 3), [1.0])])
        with pytest.raises(GridError):
            euler_product(g, np.array([1.0]), 1, 4)


class TestEulerNormDefect:
    def test_zero_direction(self):
        assert euler_norm_defect(np.array([0.0]), 1.0, 3) == 0.0

    def test_unit_level_four(self):
        assert abs(euler_norm_defect(np.array([1.0]), 1.0, 4) - 0.0804) < 5e-4

    def test_strictly_decreasing(self):
        values = [euler_norm_defect(np.array([1.0]), 1.0, n) for n in range(12)]
        assert all(v > 0 for v in values)
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_first_order_error_ratio(self):
        # oracle: exp(u) - (1 + u/N)^N ~ u^2 exp(u) / (2N), so halving rate 1/2
        for u in (0.5, 1.0, 2.0):
            c = np.array([math.sqrt(u)])
            r = euler_norm_defect(c, 1.0, 11) / euler_norm_defect(c, 1.0, 10)
            assert abs(r - 0.5) < 5e-3


class TestGuichardet:
    def test_empty_configuration(self):
        g = step(1, [(0, 1, [2.0])])
        out = guichardet_eval(g, [])
        assert out.shape == (1,)
        assert out[0] == 1.0

    def test_single_point(self):
        c = np.array([0.3, 0.4])
        g = step(2, [(0, 1, c)])
        assert np.allclose(guichardet_eval(g, [Fraction(3, 10)]), c)

    def test_straddling_breakpoint(self):
        c0 = np.array([1.0, 0.0])
        c1 = np.array([0.0, 1.0])
        g = step(2, [(0, Fraction(1, 2), c0), (Fraction(1, 2), 1, c1)])
        got = guichardet_eval(g, [Fraction(1, 4), Fraction(3, 4)])
        assert np.allclose(got, np.kron(c0, c1))

    def test_point_outside_horizon(self):
        g = step(1, [(0, 1, [1.0])])
        with pytest.raises(ValueError):
            guichardet_eval(g, [Fraction(3, 2)])


class TestWeyl:
    def test_zero_displacement(self):
        k = step(1, [(0, 1, [1.0])])
        phase, shifted = weyl_on_coherent(StepFunction.zero(1, 1), k)
        assert phase == 1.0
        assert shifted.pieces == k.pieces

    def test_zero_target(self):
        h = step(1, [(0, 1, [2.0])])
        phase, shifted = weyl_on_coherent(h, StepFunction.zero(1, 1))
        assert phase == 1.0
        assert np.allclose(shifted.value_at(Fraction(1, 2)), [2.0])

    def test_imaginary_displacement_phase(self):
        h = step(1, [(0, 1, [1.0j])])
        k = step(1, [(0, 1, [1.0])])
        phase, shifted = weyl_on_coherent(h, k)
        assert abs(phase - cmath.exp(1.0j)) < 1e-14
        assert abs(abs(phase) - 1.0) < 1e-14
        assert np.allclose(shifted.value_at(0), [1.0 + 1.0j])


class TestIndexFromUnits:
    def test_single_unit(self):
        assert index_from_units([UnitLabel(0.5, [1.0])]) == 0

    def test_direction_family(self):
        units = [UnitLabel(0.1 * k, d) for k, d in enumerate(
            [np.zeros(2), np.eye(2)[0], np.eye(2)[1]])]
        assert index_from_units(units) == 2
        # oracle: rank of the span of pairwise differences
        diffs = np.column_stack([np.eye(2)[0], np.eye(2)[1],
                                 np.eye(2)[0] - np.eye(2)[1]])
        assert np.linalg.matrix_rank(diffs) == 2

    def test_drift_only_family(self):
        c = np.array([1.0, 2.0])
        units = [UnitLabel(lam, c) for lam in (0.0, 1.0, -2.0j)]
        assert index_from_units(units) == 0

    def test_invariance_under_common_drift_and_unitary(self):
        rng = np.random.default_rng(3)
        dirs = [rng.normal(size=3) for _ in range(4)]
        units = [UnitLabel(0.2 * k, d) for k, d in enumerate(dirs)]
        base = index_from_units(units)
        shifted = [UnitLabel(u.drift + 1.7 - 0.3j, u.direction) for u in units]
        assert index_from_units(shifted) == base
        q, _ = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        rotated = [UnitLabel(u.drift, q @ u.direction) for u in units]
        assert index_from_units(rotated) == base

    def test_empty_family(self):
        with pytest.raises(InvalidInputError):
            index_from_units([])
