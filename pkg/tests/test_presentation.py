"""
Tests for the ring presentation: generators, relation families, linear
elimination and the S4 action.
"""

import pytest

from app.hypersimplex import TRANSPOSITIONS, perm_from_cycle
from app.presentation import (
    ELIMINATED,
    SURVIVORS,
    VARIABLES,
    Y_VARIABLES,
    act_polynomial,
    act_variable,
    build_presentation,
    eliminate_linear,
    export_presentation,
    family_i_rank,
    field_domain,
    linear_matrix,
    reduce_to_survivors,
)


@pytest.fixture(scope="module")
def presentation():
    return build_presentation()


@pytest.fixture(scope="module")
def reduced(presentation):
    return eliminate_linear(presentation)


class TestGenerators:
    def test_counts(self):
        assert len(VARIABLES) == 37
        assert len(Y_VARIABLES) == 14
        assert len(ELIMINATED) == 11
        assert len(SURVIVORS) == 26
        assert {"y1", "y12", "y123"} <= set(SURVIVORS)

    def test_field_names(self):
        assert field_domain("GF2").mod == 2
        with pytest.raises(ValueError):
            field_domain("GF5")


class TestRelations:
    def test_family_sizes(self, presentation):
        sizes = presentation.family_sizes()
        assert sizes["i"] == 24
        assert sizes["ii"] == 99
        assert sizes["iv"] == 40
        assert sizes["iii"] > 0

    def test_base_chain_flag_relations(self):
        assert build_presentation("base_chain").family_sizes()["iv"] == 3

    def test_unknown_flag_relation_choice(self):
        with pytest.raises(ValueError):
            build_presentation("some")

    def test_family_i_rank(self, presentation):
        assert family_i_rank(presentation) == 11

    def test_disjoint_divisors_are_monomials(self, presentation):
        for rel in presentation.family("ii"):
            assert len(rel.poly.terms()) == 1
            assert rel.poly.LC == 1

    def test_linear_matrix_rejects_quadratics(self, presentation):
        with pytest.raises(ValueError):
            linear_matrix(presentation.family("ii")[:1], VARIABLES)

    def test_flag_relations_survive_mod_2(self, presentation):
        assert len(presentation.polynomials("GF2")) == len(presentation.relations)


class TestElimination:
    def test_reduced_generators(self, reduced):
        assert reduced.generators == SURVIVORS
        assert set(reduced.substitution) == set(ELIMINATED)
        assert reduced.family_sizes()["i"] == 0

    def test_linear_relations_vanish(self, presentation, reduced):
        for rel in presentation.family("i"):
            assert not reduce_to_survivors(rel.poly, reduced)

    def test_survivors_map_to_themselves(self, presentation, reduced):
        y1 = presentation.ring.gens[VARIABLES.index("y1")]
        image = reduce_to_survivors(y1, reduced)
        assert image == reduced.ring.gens[SURVIVORS.index("y1")]

    def test_substitution_is_linear(self, reduced):
        for image in reduced.substitution.values():
            assert all(sum(m) == 1 for m in image.monoms())

    def test_export(self, reduced):
        text = export_presentation(reduced)
        lines = text.splitlines()
        assert lines[0].startswith("# generators: a b astar")
        assert len(lines) == 1 + len(ELIMINATED) + len(reduced.relations)
        assert any(line.startswith("[iv] ") for line in lines)


class TestSymmetricGroup:
    @pytest.mark.parametrize(
        "perm,name,image",
        [
            (perm_from_cycle(1, 2), "c1", "c2"),
            (perm_from_cycle(3, 4), "d13", "d14"),
            (perm_from_cycle(1, 4), "y123", "y234"),
            (perm_from_cycle(1, 2), "astar", "astar"),
        ],
    )
    def test_act_variable(self, perm, name, image):
        assert act_variable(perm, name) == image

    def test_bad_variable_name(self):
        with pytest.raises(ValueError):
            act_variable(perm_from_cycle(1, 2), "C1")

    @pytest.mark.parametrize("family", ["ii", "iii"])
    def test_families_are_stable_up_to_sign(self, presentation, family):
        polys = {rel.poly for rel in presentation.family(family)}
        for t in TRANSPOSITIONS:
            for p in polys:
                image = act_polynomial(t, p)
                assert image in polys or -image in polys


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
