from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cablegrid.blocks import (
    BlockPresentation,
    InvalidPresentationError,
    StepsConfiguration,
    check_chain,
    homogeneity_violations,
    interlocking_via_slides,
    interlocking_witnesses,
    is_homogeneous_twisting,
    is_interlocking,
    is_valid,
    lambda_leaves,
    meridian_sequence,
    slide_back,
    slide_top_side,
    validate_presentation,
    validate_steps,
)
from cablegrid.cable import CablingSpec, ConstructionParams, build_steps_configuration
from cablegrid.sampling import random_presentation

# Four blocks, k=1, whose right-side heights 2, 1, 3, 0 break the triple rule at block 1.
NON_HOMOGENEOUS = [(0, 1, 0, 2), (2, 3, 2, 1), (1, 0, 1, 3), (3, 2, 3, 0)]


@pytest.fixture(scope="module")
def non_homogeneous() -> BlockPresentation:
    return BlockPresentation.from_sides(NON_HOMOGENEOUS, 1, 4, 4)


@pytest.fixture(scope="module")
def k1_config() -> StepsConfiguration:
    return build_steps_configuration(CablingSpec(((3, 2),)), ConstructionParams(1))


def presentations():
    return st.tuples(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 3)).map(
        lambda a: random_presentation(random.Random(a[0]), a[1], a[2])
    )


def statuses(report) -> dict[str, str]:
    return {c.condition: c.status for c in report}


def triple_scan(z: list[int]) -> bool:
    """Independent restatement of the homogeneity rule on right-side heights."""
    n = len(z)
    for i in range(n):
        a, b, c, d = (z[(i + s) % n] for s in (-1, 0, 1, 2))
        up_turn = c < a < b
        down_turn = b < a < c
        if up_turn and not (c < d < b):
            return False
        if down_turn and not (b < d < c):
            return False
    return True


class TestValidation:
    def test_trefoil_fixture_passes(self, trefoil_steps):
        assert "fail" not in statuses(validate_presentation(trefoil_steps.presentation)).values()

    def test_duplicate_theta_bot(self, trefoil_steps):
        p = trefoil_steps.presentation
        blocks = list(p.blocks)
        blocks[1] = replace(blocks[1], theta_bot=blocks[0].theta_bot)
        bad = BlockPresentation(tuple(blocks), p.k, p.W, p.Z)
        assert statuses(validate_presentation(bad))["(2)"] == "fail"

    def test_broken_height_chain(self, trefoil_steps):
        p = trefoil_steps.presentation
        blocks = list(p.blocks)
        blocks[0] = replace(blocks[0], z_right=blocks[3].z_right)
        bad = BlockPresentation(tuple(blocks), p.k, p.W, p.Z)
        assert statuses(validate_presentation(bad))["(4)"] == "fail"

    def test_constructor_output_passes(self, k1_config):
        assert "fail" not in statuses(validate_presentation(k1_config.presentation)).values()

    def test_invalid_refused_by_leaves(self):
        bad = BlockPresentation.from_sides([(0, 1, 0, 1), (0, 2, 1, 0)], 0, 3, 2)
        with pytest.raises(InvalidPresentationError):
            lambda_leaves(bad)

    def test_json_round_trip(self, trefoil_steps):
        again = StepsConfiguration.from_json(trefoil_steps.to_json())
        assert again == trefoil_steps

    @given(presentations())
    def test_random_presentations_valid(self, p):
        assert is_valid(p)


class TestLeaves:
    def test_trefoil_leaves_cross_next_block(self, trefoil_steps):
        p = trefoil_steps.presentation
        leaves = lambda_leaves(p)
        assert len(leaves) == 11
        for leaf in leaves:
            assert leaf.blocks_crossed == ((leaf.index + 1) % 11,)
            assert len(leaf.rho_points) == 3

    def test_k1_leaves_have_four_points(self, k1_config):
        assert {len(leaf.rho_points) for leaf in lambda_leaves(k1_config.presentation)} == {4}

    @given(presentations())
    def test_one_leaf_per_block(self, p):
        leaves = lambda_leaves(p)
        assert len(leaves) == p.l
        assert all(len(leaf.rho_points) == p.k + 3 for leaf in leaves)


class TestHomogeneity:
    def test_trefoil(self, trefoil_steps):
        assert is_homogeneous_twisting(trefoil_steps.presentation)

    def test_counterexample(self, non_homogeneous):
        assert is_valid(non_homogeneous)
        assert not is_homogeneous_twisting(non_homogeneous)
        assert homogeneity_violations(non_homogeneous) == [1]

    def test_constructor_output(self, k1_config):
        p = k1_config.presentation
        assert is_homogeneous_twisting(p)
        assert triple_scan([b.z_right for b in p.blocks])

    @given(presentations())
    def test_matches_triple_scan(self, p):
        assert is_homogeneous_twisting(p) == triple_scan([b.z_right for b in p.blocks])


class TestInterlocking:
    def test_trefoil(self, trefoil_steps):
        p = trefoil_steps.presentation
        assert is_interlocking(p)
        assert interlocking_via_slides(p)

    def test_single_block_unknot(self):
        u = BlockPresentation.from_sides([(0, 1, 0, 0)], 0, 2, 1)
        assert is_valid(u)
        assert not is_interlocking(u)
        assert not interlocking_via_slides(u)

    def test_counterexample(self, non_homogeneous):
        assert not is_interlocking(non_homogeneous)
        assert not interlocking_via_slides(non_homogeneous)

    def test_constructor_witnesses(self, k1_config):
        p = k1_config.presentation
        result = interlocking_witnesses(p)
        assert result.value
        assert all(check_chain(p, j, chain) for j, chain in enumerate(result.witnesses))

    @given(presentations())
    def test_implementations_agree(self, p):
        assert is_interlocking(p) == interlocking_via_slides(p)

    @given(presentations())
    def test_witnesses_recheck(self, p):
        for j, chain in enumerate(interlocking_witnesses(p).witnesses):
            if chain is not None:
                assert check_chain(p, j, chain)


class TestSlides:
    def test_slide_succeeds_on_counterexample(self, non_homogeneous):
        res = slide_top_side(non_homogeneous, 1)
        assert res.ok
        assert is_valid(res.presentation)
        assert slide_back(res.presentation, 1, res.original_top) == non_homogeneous

    def test_trefoil_obstructed(self, trefoil_steps):
        p = trefoil_steps.presentation
        for i in range(p.l):
            res = slide_top_side(p, i)
            assert not res.ok
            assert res.obstruction
            assert check_chain(p, i, res.obstruction)

    @given(presentations(), st.integers(0, 7))
    def test_slide_round_trip(self, p, i):
        res = slide_top_side(p, i % p.l)
        if res.ok:
            assert is_valid(res.presentation)
            assert slide_back(res.presentation, i % p.l, res.original_top) == p


class TestSteps:
    def test_constructor_output(self, k1_config):
        assert "fail" not in statuses(validate_steps(k1_config)).values()

    def test_trefoil_fixture_warns_on_k0(self, trefoil_steps):
        report = statuses(validate_steps(trefoil_steps))
        assert "fail" not in report.values()
        assert report["(vii)"] == "warning"

    def test_broken_attachment(self, trefoil_steps):
        attach = list(trefoil_steps.attachments)
        attach[0] = (0, 2)
        broken = StepsConfiguration(trefoil_steps.presentation, trefoil_steps.disc_heights, tuple(attach))
        assert statuses(validate_steps(broken))["(iii)"] == "fail"

    def test_meridian_count(self, trefoil_steps):
        assert len(meridian_sequence(trefoil_steps)) == 11
