"""
Tests for finite-field geometry and the brute-force point-count oracles.
"""

import pytest

from app.projgeom import (
    MAX_PRIME,
    PrimeField,
    Subspace,
    TetraConfig,
    b_closure_counts,
    count_arrangement_complement,
    count_conic_fiber,
    count_open_flag_orbit,
    count_stratum,
    cross_ratio,
    enumerate_subspaces,
    flag_independence,
    gaussian_binomial,
    oracle_count,
    points_cross_ratio,
    random_flag,
    run_oracle,
    small_prime_failures,
    standard_flag,
    verify_oracles,
)
from app.tetra_common import OracleResult


class TestPrimeField:
    @pytest.mark.parametrize("p", [1, 4, 9, MAX_PRIME + 1])
    def test_rejects_non_primes_and_large_primes(self, p):
        with pytest.raises(ValueError):
            PrimeField(p)

    def test_inverse(self):
        fld = PrimeField(7)
        assert all(a * fld.inv(a) % 7 == 1 for a in range(1, 7))
        with pytest.raises(ZeroDivisionError):
            fld.inv(0)


class TestSubspaces:
    @pytest.mark.parametrize("q", [2, 3])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_enumeration_matches_gaussian_binomial(self, q, k):
        subs = enumerate_subspaces(q, k)
        assert len(subs) == gaussian_binomial(4, k, q)
        assert len(set(subs)) == len(subs)

    def test_gaussian_binomial_values(self):
        assert gaussian_binomial(4, 2, 2) == 35
        assert gaussian_binomial(3, 1, 5) == 31
        assert gaussian_binomial(4, 5, 2) == 0

    def test_canonical_form(self):
        a = Subspace.span(5, [(1, 2, 0, 0), (0, 1, 0, 0)])
        b = Subspace.span(5, [(1, 0, 0, 0), (3, 3, 0, 0)])
        assert a == b
        assert a.dim == 2

    def test_annihilator_and_meet(self):
        plane = Subspace.span(3, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)])
        assert plane.annihilator() == Subspace.point(3, (0, 0, 0, 1))
        other = Subspace.span(3, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)])
        assert plane.meet(other) == Subspace.span(3, [(1, 0, 0, 0), (0, 1, 0, 0)])
        assert len(plane.points()) == 13
        assert len(plane.meet(other).hyperplanes_through()) == 4

    def test_zero_vector_is_not_a_point(self):
        with pytest.raises(ValueError):
            Subspace.point(3, (0, 0, 0, 0))

    def test_bad_dimension(self):
        with pytest.raises(ValueError):
            enumerate_subspaces(2, 4)


class TestConfigurations:
    def test_standard_flag_is_a_flag(self):
        flag = standard_flag(PrimeField(3))
        assert flag.line.contains(flag.point)
        assert flag.plane.contains(flag.line)
        dual = flag.dual()
        assert (dual.point.dim, dual.line.dim, dual.plane.dim) == (1, 2, 3)

    def test_random_flag_is_seeded(self):
        fld = PrimeField(5)
        assert random_flag(fld, 3) == random_flag(fld, 3)

    def test_tetrahedron_incidences(self):
        points = {i: Subspace.point(3, tuple(int(j == i - 1) for j in range(4))) for i in range(1, 5)}
        config = TetraConfig.from_points(3, points)
        assert config.incidence_failures() == []
        assert len(config.planes) == 14


class TestCrossRatio:
    @pytest.mark.parametrize("lam", [2, 3, 4, 5, 6])
    def test_normalization(self, lam):
        fld = PrimeField(7)
        assert cross_ratio(fld, (0, 1), (1, 1), (1, 0), (lam, 1)) == lam

    def test_coincident_points(self):
        with pytest.raises(ValueError):
            cross_ratio(PrimeField(5), (0, 1), (0, 2), (1, 0), (2, 1))

    def test_points_on_a_line(self):
        fld = PrimeField(7)
        vectors = [(0, 1, 0, 0), (1, 1, 0, 0), (1, 0, 0, 0), (3, 1, 0, 0)]
        points = [Subspace.point(7, v) for v in vectors]
        assert points_cross_ratio(fld, points) == 3

    def test_points_not_collinear(self):
        fld = PrimeField(5)
        vectors = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (1, 1, 1, 0)]
        with pytest.raises(ValueError):
            points_cross_ratio(fld, [Subspace.point(5, v) for v in vectors])


class TestOracles:
    @pytest.mark.parametrize("q", [2, 3])
    def test_open_stratum(self, q):
        assert count_stratum("X0", q) == q ** 6

    def test_open_flag_orbit_ignores_base_flag(self):
        fld = PrimeField(3)
        assert count_open_flag_orbit(3) == count_open_flag_orbit(3, random_flag(fld, 7)) == 729

    @pytest.mark.parametrize("type_name", ["A", "Astar"])
    @pytest.mark.parametrize("q", [2, 3])
    def test_collapsed_points_or_planes(self, type_name, q):
        assert count_stratum(type_name, q) == q ** 3 * (q - 1) ** 2

    @pytest.mark.parametrize("q", [2, 3])
    def test_b_stratum(self, q):
        assert count_stratum("B", q) == q ** 2 * (q - 1) ** 2 * (q - 2)

    def test_b_closure_is_unique(self):
        closure = b_closure_counts(standard_flag(PrimeField(3)))
        assert set(closure) == {1}

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            count_stratum("C", 3)
        with pytest.raises(ValueError):
            oracle_count("nope", 3)

    @pytest.mark.parametrize("q,expected", [(2, 0), (3, 0), (5, 6), (7, 20)])
    def test_arrangement_complement(self, q, expected):
        assert count_arrangement_complement(q) == expected

    def test_conic_pencil(self):
        pencil = count_conic_fiber(5)
        assert pencil.members == 6
        assert len(pencil.smooth) == 3
        assert pencil.on_conic == [6, 6, 6]
        assert pencil.off_arrangement == [2, 2, 2]
        assert pencil.fiber == 2

    def test_triple_shift_stratum(self):
        assert oracle_count("ABAstar", 5) == 12
        assert oracle_count("ABAstar", 3) == 0

    def test_run_oracle_against_table(self):
        result = run_oracle("X0", 2)
        assert result.match
        assert result.oracle_count == result.table_count == 64

    def test_flag_independence(self):
        assert len(set(flag_independence("Astar", 3))) == 1


class TestVerifyOracles:
    def test_section(self):
        section = verify_oracles(primes=(2, 3), types=("X0", "A", "Astar", "B", "arrangement"))
        assert section.passed, section.failures
        names = {c.name for c in section.checks}
        assert "X0:q=2" in names
        assert "subspaces:q=3" in names
        assert "b_closure_unique:q=3" in names

    def test_small_prime_failures_are_isolated(self):
        results = [
            OracleResult(type="B", q=2, oracle_count=1, table_count=0, match=False),
            OracleResult(type="B", q=5, oracle_count=300, table_count=300, match=True),
            OracleResult(type="A", q=3, oracle_count=1, table_count=0, match=False),
        ]
        assert small_prime_failures(results) == ["B q=2"]

    @pytest.mark.slow
    def test_default_primes(self):
        section = verify_oracles()
        assert section.passed, section.failures


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
