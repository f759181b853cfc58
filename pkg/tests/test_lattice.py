"""Lattice systems: sections, seeds, generation, flips and refinement nets."""

import math

import numpy as np
import pytest

from prodsys.lattice import (
    AdditSection,
    Composition,
    EvaluationError,
    InvalidInclusionSystemError,
    InvalidUnitError,
    LatticeInclusionSystem,
    LatticeProductSystem,
    LatticeSubsystem,
    addit_decompose,
    addit_inner,
    addit_root_space,
    addit_section,
    composition_net_inner,
    compositions,
    flip_unitary,
    full_subsystem,
    generate_product_system,
    single_excitation_inclusion,
    solve_addit_seeds,
    standard_system,
    unit_line_subsystem,
    unit_section,
)
from prodsys.linalg import orthonormalize, same_subspace, span, subspace_distance

RNG = np.random.default_rng(7)


def random_unit(g, rng=RNG):
    v = rng.normal(size=g) + 1j * rng.normal(size=g)
    return v / np.linalg.norm(v)


class TestUnitSection:
    def test_standard_vector(self):
        got = unit_section([1.0, 0.0], 3)
        expected = np.zeros(8)
        expected[0] = 1.0
        assert np.allclose(got, expected)

    def test_norm_power(self):
        v = random_unit(3)
        assert abs(np.linalg.norm(unit_section(v, 5)) - 1.0) < 1e-12

    def test_uniform_vector_kron_oracle(self):
        v = np.array([1.0, 1.0]) / math.sqrt(2)
        got = unit_section(v, 2)
        assert np.allclose(got, np.kron(v, v))
        assert np.allclose(got, 0.5)

    def test_zero_vector_rejected(self):
        with pytest.raises(InvalidUnitError):
            unit_section([0.0, 0.0], 2)


class TestAdditSection:
    def test_level_one_is_seed(self):
        a1 = np.array([0.3, 1.0 - 2.0j])
        u = np.array([1.0, 0.0])
        assert np.allclose(addit_section(u, a1, 1), a1)

    def test_orthogonal_seed_level_two(self):
        u = np.array([1.0, 0.0])
        a1 = np.array([0.0, 1.0])
        got = addit_section(u, a1, 2)
        expected = np.kron(u, a1) + np.kron(a1, u)
        assert np.allclose(got, expected)
        assert abs(np.vdot(got, got).real - 2.0) < 1e-12

    def test_mixed_seed_norm_matches_split_formula(self):
        u = np.array([1.0, 0.0])
        a1 = np.array([1.0, 1.0])
        got = addit_section(u, a1, 3)
        # trivial part contributes n^2 |<u,a1>|^2, root part n |a1 - <u,a1> u|^2
        assert abs(np.vdot(got, got).real - (9.0 + 3.0)) < 1e-12

    def test_additivity_exact(self):
        for _ in range(10):
            g = int(RNG.integers(2, 4))
            u = random_unit(g)
            a1 = RNG.normal(size=g) + 1j * RNG.normal(size=g)
            for m in range(1, 4):
                for n in range(1, 4):
                    lhs = addit_section(u, a1, m + n)
                    rhs = (np.kron(addit_section(u, a1, m), unit_section(u, n))
                           + np.kron(unit_section(u, m), addit_section(u, a1, n)))
                    assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestAdditDecompose:
    def test_unit_seed(self):
        u = random_unit(3)
        lam, root = addit_decompose(u, u)
        assert abs(lam - 1.0) < 1e-12
        assert np.linalg.norm(root) < 1e-12

    def test_orthogonal_seed(self):
        u = np.array([1.0, 0.0])
        lam, root = addit_decompose(u, [0.0, 2.0])
        assert lam == 0.0
        assert np.allclose(root, [0.0, 2.0])

    def test_mixed_seed(self):
        lam, root = addit_decompose([1.0, 0.0], [2.0, 3.0j])
        assert lam == 2.0
        assert np.allclose(root, [0.0, 3.0j])

    def test_reconstruction(self):
        u = random_unit(4)
        a1 = RNG.normal(size=4) + 1j * RNG.normal(size=4)
        lam, root = addit_decompose(u, a1)
        assert np.allclose(lam * u + root, a1)
        assert abs(np.vdot(u, root)) < 1e-12


class TestAdditInner:
    def test_trivial_scaling(self):
        u = random_unit(2)
        assert abs(addit_inner(u, u, u, 4) - 16.0) < 1e-12

    def test_root_against_trivial(self):
        u = np.array([1.0, 0.0])
        assert addit_inner(u, [0.0, 1.0], u, 5) == 0.0

    def test_closed_form_example(self):
        u = np.array([1.0, 0.0])
        a1 = np.array([1.0, 1.0])
        assert abs(addit_inner(u, a1, a1, 3) - 12.0) < 1e-12

    def test_matches_brute_force(self):
        for _ in range(20):
            g = int(RNG.integers(2, 4))
            n = int(RNG.integers(1, 6))
            u = random_unit(g)
            a1 = RNG.normal(size=g) + 1j * RNG.normal(size=g)
            b1 = RNG.normal(size=g) + 1j * RNG.normal(size=g)
            brute = np.vdot(addit_section(u, a1, n), addit_section(u, b1, n))
            assert abs(addit_inner(u, a1, b1, n) - brute) < 1e-10

    def test_positive_definite_on_seeds(self):
        u = random_unit(3)
        for _ in range(10):
            a1 = RNG.normal(size=3) + 1j * RNG.normal(size=3)
            for n in (1, 3, 5):
                assert addit_inner(u, a1, a1, n).real > 1e-12

    def test_section_wrapper(self):
        system = standard_system(2)
        a = AdditSection(system, np.array([1.0, 2.0]))
        b = AdditSection(system, np.array([0.5, -1.0j]))
        brute = np.vdot(a.section(3), b.section(3))
        assert abs(a.inner(b, 3) - brute) < 1e-10


class TestSolveAdditSeeds:
    def test_full_system_returns_slot_space(self):
        for g in (2, 3):
            system = standard_system(g)
            seeds = solve_addit_seeds(full_subsystem(system, 5))
            assert seeds.rank == g
            root = addit_root_space(full_subsystem(system, 5))
            assert root.rank == g - 1

    def test_full_system_seeds_satisfy_constraints(self):
        # independent residual oracle on the returned basis vectors
        g = 3
        system = standard_system(g)
        sub = LatticeSubsystem(system, span(system.reference_unit, np.eye(g)[1]), 4)
        seeds = solve_addit_seeds(sub)
        for k in range(seeds.rank):
            for n in range(1, 5):
                vec = addit_section(system.reference_unit, seeds.basis[:, k], n)
                proj = sub.level(n).project(vec)
                assert np.linalg.norm(vec - proj) < 1e-9

    def test_unit_line_only_trivial_addits(self):
        system = standard_system(3)
        line = unit_line_subsystem(system, 5)
        seeds = solve_addit_seeds(line)
        assert seeds.rank == 1
        assert same_subspace(seeds, span(system.reference_unit))
        assert addit_root_space(line).rank == 0

    def test_intermediate_subsystem(self):
        system = standard_system(3)
        sub = LatticeSubsystem(system, span(system.reference_unit, np.eye(3)[1]), 5)
        seeds = solve_addit_seeds(sub)
        assert seeds.rank == 2
        assert addit_root_space(sub).rank == 1

    def test_unit_outside_subsystem_rejected(self):
        system = standard_system(3)
        sub = LatticeSubsystem(system, span(np.eye(3)[1]), 3)
        with pytest.raises(InvalidUnitError):
            solve_addit_seeds(sub)


class TestGeneration:
    def test_product_system_is_fixed_point(self):
        system = standard_system(2)
        sub = LatticeSubsystem(system, span(system.reference_unit), 4)
        inc = LatticeInclusionSystem(system, sub.levels)
        gen = generate_product_system(inc)
        for n in range(1, 5):
            assert subspace_distance(gen.level(n), sub.level(n)) < 1e-10
        assert gen.generation_defect < 1e-10

    def test_single_excitation_pattern_generates_full(self):
        for g in (2, 3):
            system = standard_system(g)
            inc = single_excitation_inclusion(system, 4)
            assert [inc.level(n).rank for n in range(1, 5)] == \
                [1 + n * (g - 1) for n in range(1, 5)]
            gen = generate_product_system(inc)
            assert all(gen.level(n).rank == g ** n for n in range(1, 5))

    def test_generated_contains_inputs_and_idempotent(self):
        system = standard_system(3)
        inc = single_excitation_inclusion(system, 4)
        gen = generate_product_system(inc)
        from prodsys.linalg import contains
        for n in range(1, 5):
            assert contains(gen.level(n), inc.level(n))
        again = generate_product_system(LatticeInclusionSystem(system, gen.levels))
        for n in range(1, 5):
            assert subspace_distance(again.level(n), gen.level(n)) < 1e-10

    def test_incompatible_levels_rejected(self):
        system = standard_system(2)
        levels = [span(np.eye(2)[0]), span(np.kron(np.eye(2)[1], np.eye(2)[1]))]
        with pytest.raises(InvalidInclusionSystemError):
            LatticeInclusionSystem(system, levels)

    def test_product_compatibility_validation(self):
        system = standard_system(2)
        bad = [span(np.eye(2)[0]),
               orthonormalize(np.eye(4)[:, :2])]
        with pytest.raises(ValueError):
            LatticeSubsystem.from_levels(system, bad)


class TestFlip:
    def test_identity_cases(self):
        assert np.allclose(flip_unitary(2, 3, 0), np.eye(8))
        assert np.allclose(flip_unitary(2, 3, 3), np.eye(8))

    def test_swap_two_slots(self):
        g = 3
        x = RNG.normal(size=g) + 1j * RNG.normal(size=g)
        y = RNG.normal(size=g) + 1j * RNG.normal(size=g)
        flip = flip_unitary(g, 2, 1)
        assert np.allclose(flip @ np.kron(x, y), np.kron(y, x))

    def test_group_law_via_permutation_composition(self):
        g = 2
        for n in range(2, 6):
            for k1 in range(n + 1):
                for k2 in range(n + 1):
                    lhs = flip_unitary(g, n, k1) @ flip_unitary(g, n, k2)
                    rhs = flip_unitary(g, n, (k1 + k2) % n)
                    assert np.allclose(lhs, rhs)

    def test_unitary(self):
        f = flip_unitary(2, 4, 3)
        assert np.allclose(f @ f.conj().T, np.eye(16))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            flip_unitary(2, 3, 4)


class TestCompositions:
    def test_count(self):
        for n in range(1, 7):
            assert sum(1 for _ in compositions(n)) == 2 ** (n - 1)

    def test_validation(self):
        with pytest.raises(ValueError):
            Composition(3, (1, 1))
        with pytest.raises(ValueError):
            Composition(3, (0, 3))


class TestCompositionNet:
    def test_coherent_unit_euler_sequence(self):
        net = composition_net_inner(lambda t: np.array([1.0, math.sqrt(t)]),
                                    None, T=1.0, depth=10)
        for row in net:
            expected = (1.0 + 2.0 ** -row.level) ** row.slots
            assert abs(row.unit_value - expected) < 1e-12
        values = [row.unit_value for row in net]
        assert all(a < b for a, b in zip(values, values[1:]))
        assert values[-1] < math.e

    def test_vacuum_constant(self):
        net = composition_net_inner(lambda t: np.array([1.0, 0.0]), None,
                                    T=2.0, depth=6)
        assert all(abs(row.unit_value - 1.0) < 1e-15 for row in net)

    def test_root_net_constant_with_boundedness(self):
        T, c2 = 1.5, 1.0
        net = composition_net_inner(
            lambda t: np.array([1.0, 0.0]),
            lambda t: np.array([0.0, math.sqrt(c2 * t)]),
            T=T, depth=8)
        for row in net:
            assert abs(row.addit_value - T * c2) < 1e-12
            assert row.addit_value <= c2 * (T + T * T) + 1e-12

    def test_cross_terms_match_brute_force(self):
        u = np.array([1.0, 0.0])
        a = np.array([0.5, 0.25])  # not orthogonal to u
        net = composition_net_inner(lambda t: u, lambda t: a, T=1.0, depth=3)
        for row in net:
            brute = np.vdot(addit_section(u, a, row.slots),
                            addit_section(u, a, row.slots)).real
            assert abs(row.addit_value - brute) < 1e-12

    def test_evaluator_failure(self):
        def broken(t):
            raise KeyError(t)
        with pytest.raises(EvaluationError):
            composition_net_inner(broken, None, T=1.0, depth=2)


class TestSystemTypes:
    def test_unnormalised_reference_rejected(self):
        with pytest.raises(InvalidUnitError):
            LatticeProductSystem(2, np.array([1.0, 1.0]))

    def test_subsystem_level_powers(self):
        system = standard_system(2)
        sub = full_subsystem(system, 3)
        assert sub.level(3).rank == 8
        assert sub.level(2).ambient_dim == 4
