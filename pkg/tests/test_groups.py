import itertools
import random

import pytest

from deckindex.errors import InputError, ResourceError
from deckindex.groups import (
    BoxFolnerScheme,
    FiniteGroup,
    FreeAbelianGroup,
    FreeGroup,
    SurfaceGroup,
    cyclic_group,
    folner_average,
    group_from_document,
    group_to_document,
    trivial_group,
)


def brute_force_ball_count(group, radius):
    """Independent BFS over generator moves, relying only on element equality."""
    seen = {group.identity()}
    frontier = [group.identity()]
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for t in group._signed_tokens():
                h = group.multiply_token(g, t)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return len(seen)


Z2 = FreeAbelianGroup(2)
F2 = FreeGroup(2)
S2GROUP = SurfaceGroup(2)
C6 = cyclic_group(6)

ALL_KINDS = [Z2, F2, S2GROUP, C6]


class TestNormalForm:
    def test_abelian_cancellation(self):
        assert Z2.normal_form(["a", "b", "-a"]) == ["b"]
        assert Z2.parse_word("a b -a") == (0, 1)

    def test_free_reduction(self):
        assert F2.normal_form(["a", "b", "-b", "a"]) == ["a", "a"]

    def test_surface_relator_is_identity(self):
        w = ["a1", "b1", "-a1", "-b1", "a2", "b2", "-a2", "-b2"]
        assert S2GROUP.normal_form(w) == []

    def test_unknown_generator_rejected(self):
        with pytest.raises(InputError):
            Z2.normal_form(["a", "q"])

    @pytest.mark.parametrize("group", ALL_KINDS)
    def test_idempotent_up_to_length_12(self, group):
        rng = random.Random(7)
        tokens = group._signed_tokens()
        for _ in range(300):
            w = [rng.choice(tokens) for _ in range(rng.randint(0, 12))]
            nf = group.normal_form(w)
            assert group.normal_form(nf) == nf

    @pytest.mark.parametrize("group", ALL_KINDS)
    def test_w_times_w_inverse_is_identity(self, group):
        rng = random.Random(11)
        tokens = group._signed_tokens()
        for _ in range(200):
            w = [rng.choice(tokens) for _ in range(rng.randint(0, 8))]
            winv = [-t for t in reversed(w)]
            assert group.element_of(w + winv) == group.identity()

    @pytest.mark.parametrize("group", ALL_KINDS)
    def test_equal_products_have_identical_forms(self, group):
        rng = random.Random(13)
        tokens = group._signed_tokens()
        for _ in range(100):
            w = [rng.choice(tokens) for _ in range(rng.randint(0, 10))]
            cut = rng.randint(0, len(w))
            a = group.element_of(w[:cut])
            b = group.element_of(w[cut:])
            assert group.multiply(a, b) == group.element_of(w)


class TestWordMetric:
    @pytest.mark.parametrize("group", ALL_KINDS)
    def test_symmetry_and_identity_on_ball_2(self, group):
        ball = sorted(group.ball(2), key=group.sort_key)
        for g in ball:
            for h in ball:
                d = group.distance(g, h)
                assert d == group.distance(h, g)
                assert (d == 0) == (g == h)

    @pytest.mark.parametrize("group", [Z2, F2, C6])
    def test_triangle_inequality_exhaustive_ball_3(self, group):
        ball = sorted(group.ball(3), key=group.sort_key)
        for g, h, k in itertools.product(ball, repeat=3):
            assert group.distance(g, k) <= group.distance(g, h) + group.distance(h, k)

    def test_triangle_inequality_surface_sampled(self):
        ball2 = sorted(S2GROUP.ball(2), key=S2GROUP.sort_key)
        for g, h, k in itertools.product(ball2, repeat=3):
            assert S2GROUP.distance(g, k) <= S2GROUP.distance(g, h) + S2GROUP.distance(h, k)
        rng = random.Random(3)
        ball3 = sorted(S2GROUP.ball(3), key=S2GROUP.sort_key)
        for _ in range(20000):
            g, h, k = (rng.choice(ball3) for _ in range(3))
            assert S2GROUP.distance(g, k) <= S2GROUP.distance(g, h) + S2GROUP.distance(h, k)


class TestBalls:
    def test_z2_ball_counts(self):
        for r in range(5):
            assert len(Z2.ball(r)) == 2 * r * r + 2 * r + 1
        assert len(Z2.ball(2)) == 13

    def test_f2_ball_counts(self):
        for r in range(5):
            assert len(F2.ball(r)) == 2 * 3**r - 1
        assert len(F2.ball(2)) == 17

    def test_radius_zero_is_identity(self):
        for group in ALL_KINDS:
            assert group.ball(0) == {group.identity()}

    @pytest.mark.parametrize("group,rmax", [(Z2, 4), (F2, 4), (C6, 4)])
    def test_matches_independent_bfs(self, group, rmax):
        for r in range(rmax + 1):
            assert len(group.ball(r)) == brute_force_ball_count(group, r)

    def test_surface_ball_counts(self):
        # Free-tree counts 4g(4g-1)^(r-1) hold up to r=3 (the relator has
        # length 8, so no two distinct words of length <= 3 coincide); at
        # r = 4 each of the 16 rotations of the relator and its inverse
        # splits into two length-4 halves, merging 8 pairs of tree words.
        expected_spheres = [1, 8, 56, 392, 8 * 7**3 - 8]
        total = 0
        for r, s in enumerate(expected_spheres):
            total += s
            assert len(S2GROUP.ball(r)) == total
        assert total == 3193

    def test_budget_error_names_flag(self):
        with pytest.raises(ResourceError, match="--radius"):
            F2.ball(9)

    def test_deck_word_lengths_match_bfs_level(self):
        for group in ALL_KINDS:
            for g, d in group.ball_with_distances(3).items():
                assert group.length(g) == d


class _ConstPlusFinite:
    def __init__(self, group, constant, finite):
        self.group = group
        self.constant = constant
        self.finite = finite

    def value(self, g):
        return self.constant + self.finite.get(g, 0)


class TestFolner:
    def test_constant_function_averages_to_constant(self):
        scheme = Z2.folner_scheme()
        f = _ConstPlusFinite(Z2, 2, {})
        for t in (1, 2, 5):
            assert folner_average(scheme, f, t) == 2

    def test_finite_mass_dilutes(self):
        from fractions import Fraction
        scheme = Z2.folner_scheme()
        f = _ConstPlusFinite(Z2, 0, {(0, 0): 7, (1, 0): -2})
        for t in (1, 2, 4):
            assert folner_average(scheme, f, t) == Fraction(5, (2 * t + 1) ** 2)

    def test_box_side_five_example(self):
        from fractions import Fraction
        scheme = Z2.folner_scheme()
        f = _ConstPlusFinite(Z2, 1, {(0, 0): 3})
        assert folner_average(scheme, f, 2) == 1 + Fraction(3, 25)

    def test_average_error_bounded_by_mass_over_box(self):
        from fractions import Fraction
        rng = random.Random(5)
        scheme = Z2.folner_scheme()
        for _ in range(20):
            c = rng.randint(-4, 4)
            finite = {(rng.randint(-2, 2), rng.randint(-2, 2)): rng.randint(-5, 5)
                      for _ in range(rng.randint(0, 4))}
            f = _ConstPlusFinite(Z2, c, finite)
            mass = sum(abs(v) for v in finite.values())
            for t in (2, 3, 6):
                err = abs(folner_average(scheme, f, t) - c)
                assert err <= Fraction(mass, (2 * t + 1) ** 2)

    def test_box_ratio_nonincreasing_and_bounded(self):
        from fractions import Fraction
        scheme = Z2.folner_scheme()
        ratios = [scheme.ratio(t) for t in range(2, 9)]
        for a, b in zip(ratios, ratios[1:]):
            assert b < a
        for t, rho in zip(range(2, 9), ratios):
            assert rho <= Fraction(4, t)

    def test_whole_group_scheme_has_zero_ratio(self):
        scheme = C6.folner_scheme()
        assert scheme.ratio(1) == 0
        assert scheme.ratio(3) == 0

    def test_nonamenable_kinds_have_no_scheme(self):
        assert F2.folner_scheme() is None
        assert S2GROUP.folner_scheme() is None
        assert not F2.amenable and not S2GROUP.amenable


class TestFiniteGroup:
    def test_table_validation(self):
        with pytest.raises(InputError):
            FiniteGroup([[0, 1], [1, 1]])

    def test_cyclic_structure(self):
        g = cyclic_group(6)
        t = g.parse_word("t")
        assert g.multiply(t, t) == 2
        assert g.inverse(t) == 5
        assert g.length(5) == 1  # t^-1 is a geodesic of length 1
        assert len(g.ball(3)) == 6
        assert g.normal_form(["t", "t", "t", "t", "t", "t"]) == []

    def test_trivial_group(self):
        g = trivial_group()
        assert g.identity() == 0
        assert len(g.ball(4)) == 1


class TestDocuments:
    @pytest.mark.parametrize("group", ALL_KINDS)
    def test_round_trip(self, group):
        doc = group_to_document(group)
        g2 = group_from_document(doc)
        assert group_to_document(g2) == doc
        assert type(g2) is type(group)

    def test_bad_kind(self):
        with pytest.raises(InputError):
            group_from_document({"kind": "braid", "rank": 3})
