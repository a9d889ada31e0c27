from __future__ import annotations

import pytest

from cablegrid.blocks import (
    interlocking_via_slides,
    is_homogeneous_twisting,
    is_interlocking,
    meridian_sequence,
    steps_ok,
)
from cablegrid.cable import (
    TREFOIL_BLOCKS,
    CablingSpec,
    ConstructionError,
    ConstructionParams,
    axis_point_count,
    build_steps_configuration,
    edge_path_count,
    iterated_descriptor,
    superimpose_cable,
)
from cablegrid.grid import alexander, braid_of, classical_invariants, meridian_linking, validate
from cablegrid.laurent import LaurentPoly

TREFOIL = LaurentPoly.from_map({0: 1, 1: -1, 2: 1})


def torus_alexander(p: int, q: int) -> LaurentPoly:
    """(t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1)) by exact polynomial division."""
    num = [0] * (p * q + 2)
    for e, c in ((p * q + 1, 1), (p * q, -1), (1, -1), (0, 1)):
        num[e] += c
    for m in (p, q):
        out = [0] * (len(num) - m)
        rem = num[:]
        for e in range(len(rem) - 1, m - 1, -1):
            c = rem[e]
            out[e - m] = c
            rem[e] -= c
            rem[e - m] += c
        assert not any(rem)
        num = out
    return LaurentPoly.from_map(dict(enumerate(num))).normalized()


class TestSpec:
    def test_descriptor_single(self):
        assert iterated_descriptor(CablingSpec(((2, 3),))) == "C(U,(2,3))"

    def test_descriptor_nested(self):
        assert iterated_descriptor(CablingSpec(((2, 3), (2, 3)))) == "C(C(U,(2,3)),(2,3))"

    def test_non_coprime(self):
        with pytest.raises(ValueError):
            CablingSpec(((2, 4),))

    def test_json(self):
        spec = CablingSpec(((2, 3), (3, 5)))
        assert CablingSpec.from_json(spec.to_json()) == spec
        params = ConstructionParams(2, (5,), "reversed")
        assert ConstructionParams.from_json(params.to_json()) == params


class TestCounts:
    def test_formula_k1(self):
        spec = CablingSpec(((2, 3),))
        assert axis_point_count(spec, 1) == 12
        assert edge_path_count(spec) == 2

    def test_formula_two_levels(self):
        spec = CablingSpec(((2, 3), (3, 5)))
        assert axis_point_count(spec, 2) == 44
        assert edge_path_count(spec) == 6

    @pytest.mark.parametrize("p", [1, 3, 5, 7, 9, 11])
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_odd_builds_match_formula(self, p, k):
        spec = CablingSpec(((p, 2),))
        s = build_steps_configuration(spec, ConstructionParams(k))
        assert s.axis_points == axis_point_count(spec, k) == (2 * k + 3) * p + 2
        assert s.metadata["edge_paths"] == p

    def test_even_product_is_a_link(self):
        with pytest.raises(ConstructionError, match="components"):
            build_steps_configuration(CablingSpec(((2, 3),)), ConstructionParams(1))


class TestConstructor:
    @pytest.mark.parametrize("orientation", ["forward", "reversed"])
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_postconditions(self, k, orientation):
        s = build_steps_configuration(CablingSpec(((3, 2),)), ConstructionParams(k, (), orientation))
        p = s.presentation
        assert steps_ok(s)
        assert is_homogeneous_twisting(p)
        assert is_interlocking(p) and interlocking_via_slides(p)

    def test_two_levels(self):
        s = build_steps_configuration(CablingSpec(((3, 2), (3, 2))), ConstructionParams(0, (26,)))
        assert s.axis_points == 29
        assert steps_ok(s) and is_interlocking(s.presentation)

    def test_reversed_is_mirror_relabeling(self):
        spec = CablingSpec(((3, 2),))
        fwd = build_steps_configuration(spec, ConstructionParams(1))
        rev = build_steps_configuration(spec, ConstructionParams(1, (), "reversed"))
        N = fwd.axis_points
        mirrored = sorted(
            ((-b.theta_top) % N, (-b.theta_bot) % N, (-b.z_right) % N, (-b.z_left) % N)
            for b in fwd.presentation.blocks
        )
        assert mirrored == sorted(
            (b.theta_bot, b.theta_top, b.z_left, b.z_right) for b in rev.presentation.blocks
        )

    def test_bad_twist_count_length(self):
        with pytest.raises(ConstructionError):
            build_steps_configuration(CablingSpec(((3, 2), (3, 2))), ConstructionParams(0))

    def test_prefix_3_k0_is_the_trefoil_fixture(self, trefoil_steps):
        s = build_steps_configuration(CablingSpec(((3, 2),)), ConstructionParams(0))
        assert s.presentation == trefoil_steps.presentation


class TestFixtures:
    def test_trefoil_block_count(self, trefoil_steps):
        assert trefoil_steps.presentation.l == TREFOIL_BLOCKS == 11

    def test_trefoil_predicates(self, trefoil_steps):
        p = trefoil_steps.presentation
        assert is_homogeneous_twisting(p) and is_interlocking(p)

    def test_cable_invariants(self, cable):
        ci = classical_invariants(cable)
        assert (ci.n, ci.ell, ci.sl, ci.tb, ci.r) == (8, 11, 3, 5, 2)

    def test_cable_alexander_matches_cabling_formula(self, cable):
        # companion trefoil, winding 3 around it, torus pattern T(3,2)
        assert alexander(cable) == (TREFOIL.substitute_power(3) * torus_alexander(3, 2)).normalized()

    def test_meridians_link_three_times(self, trefoil_steps, cable):
        specs = meridian_sequence(trefoil_steps)
        assert len(specs) == 11
        assert [meridian_linking(cable, m) for m in specs] == [3] * 11

    def test_flyped(self, cable, cable_flyped):
        assert validate(cable_flyped) == []
        assert classical_invariants(cable_flyped).sl == 3
        assert alexander(cable_flyped) == alexander(cable)
        assert braid_of(cable_flyped) != braid_of(cable)


class TestSuperimpose:
    def test_p_too_small_for_k(self):
        s = build_steps_configuration(CablingSpec(((3, 2),)), ConstructionParams(1))
        with pytest.raises(ConstructionError, match="p_h"):
            superimpose_cable(s, (2, 3))

    def test_k1_meridians(self):
        s = build_steps_configuration(CablingSpec(((3, 2),)), ConstructionParams(1))
        d = superimpose_cable(s, (4, 3))
        assert validate(d) == []
        counts = {meridian_linking(d, m) for m in meridian_sequence(s)}
        assert counts == {3}
        assert min(counts) >= 2

    def test_non_coprime_final_pair(self, trefoil_steps):
        with pytest.raises(ConstructionError):
            superimpose_cable(trefoil_steps, (2, 4))

    def test_five_strand_companion(self):
        s = build_steps_configuration(CablingSpec(((5, 2),)), ConstructionParams(0))
        d = superimpose_cable(s, (2, 3))
        assert validate(d) == []
        expected = torus_alexander(2, 5).substitute_power(3) * torus_alexander(3, 5)
        assert alexander(d) == expected.normalized()
