import random
from fractions import Fraction

import pytest

from deckindex.chains import ClassFunction
from deckindex.complexes import PeriodicComplex
from deckindex.errors import InputError
from deckindex.fixtures import torus_grid
from deckindex.groups import FreeAbelianGroup, FreeGroup, SurfaceGroup, cyclic_group
from deckindex.ufh import (
    CayleyGraph,
    SkeletonGraph,
    bound_finite_mass,
    decide_class,
    flow_certificate,
    folner_search,
    isoperimetric_probe,
    minimal_flow_capacity,
    verify_certificate,
)

Z1 = FreeAbelianGroup(1)
Z2 = FreeAbelianGroup(2)
F2 = FreeGroup(2)
SURF = SurfaceGroup(2)


class TestFolnerSearch:
    def test_z2_half(self):
        t, members, ratio = folner_search(Z2, Fraction(1, 2), r=1)
        assert ratio < Fraction(1, 2)
        assert len(members) == (2 * t + 1) ** 2
        # smallest index: the previous index fails the bound
        if t > 1:
            scheme = Z2.folner_scheme(1)
            assert scheme.ratio(t - 1) >= Fraction(1, 2)

    def test_finite_group_whole(self):
        g = cyclic_group(5)
        t, members, ratio = folner_search(g, Fraction(1, 100), r=1)
        assert t == 1 and len(members) == 5 and ratio == 0

    def test_nonamenable_gate(self):
        with pytest.raises(InputError, match="flow certificates"):
            folner_search(F2, Fraction(1, 2))


class TestIsoperimetricProbe:
    def test_z2_ratios_decrease(self):
        rows = isoperimetric_probe(CayleyGraph(Z2), range(1, 7))
        ratios = [row["ratio"] for row in rows]
        assert ratios[5 - 1] < ratios[2 - 1]
        for row in rows:
            r = row["radius"]
            assert row["ball"] == 2 * r * r + 2 * r + 1
            assert row["boundary"] == 4 * (r + 1)

    def test_f2_ratios_bounded_below(self):
        rows = isoperimetric_probe(CayleyGraph(F2), range(1, 7))
        for row in rows:
            assert row["ratio"] >= Fraction(1, 2)

    def test_finite_component_ratio_zero(self):
        g = cyclic_group(6)
        rows = isoperimetric_probe(CayleyGraph(g), [3, 4])
        assert rows[0]["ratio"] == 0 and rows[1]["ratio"] == 0

    def test_skeleton_graph_degree_bound(self):
        pc = PeriodicComplex(torus_grid())
        sk = SkeletonGraph(pc)
        assert sk.degree_bound() == 6
        assert len(sk.ball(1)) == 7


class TestBoundFiniteMass:
    def test_single_mass_on_z2(self):
        f = ClassFunction(Z2, 0, {(0, 0): 1})
        chain, region, interior = bound_finite_mass(Z2, f)
        bdry = chain.boundary()
        for v in Z2.ball(interior):
            assert bdry.get(v, 0) == f.value(v)
        assert chain.max_coefficient() <= 1

    def test_dipole_is_global_path(self):
        u, v = (2, 1), (-1, 0)
        f = ClassFunction(Z2, 0, {u: 1, v: -1})
        chain, _, _ = bound_finite_mass(Z2, f)
        # net-zero mass: boundary matches everywhere, not only on a region
        assert chain.boundary() == {u: 1, v: -1}

    def test_mass_three_on_free_group(self):
        f = ClassFunction(F2, 0, {F2.identity(): 3})
        chain, region, interior = bound_finite_mass(F2, f)
        assert region == 6
        bdry = chain.boundary()
        for g in F2.ball(interior):
            assert bdry.get(g, 0) == f.value(g)
        assert chain.max_coefficient() <= 3

    def test_rejects_constant_part(self):
        with pytest.raises(InputError):
            bound_finite_mass(Z2, ClassFunction(Z2, 1, {}))


class TestFlowCertificate:
    def test_f2_uniform_capacity_two(self):
        graph = CayleyGraph(F2)
        one = ClassFunction(F2, 1, {})
        for radius in (3, 4, 5, 6):
            res = flow_certificate(graph, one, radius, capacity=2)
            assert res.feasible
            bdry = res.chain.boundary()
            for v in F2.ball(radius - 1):
                assert bdry.get(v, 0) == 1
            assert res.chain.max_coefficient() <= 2

    def test_z2_minimal_capacity_grows(self):
        graph = CayleyGraph(Z2)
        one = ClassFunction(Z2, 1, {})
        c4 = minimal_flow_capacity(graph, one, 4)
        c8 = minimal_flow_capacity(graph, one, 8)
        assert c8 > c4

    def test_z2_infeasible_at_fixed_capacity(self):
        graph = CayleyGraph(Z2)
        one = ClassFunction(Z2, 1, {})
        res = flow_certificate(graph, one, 8, capacity=1)
        assert not res.feasible and res.deficit > 0

    def test_zero_function_feasible_with_empty_chain(self):
        graph = CayleyGraph(F2)
        zero = ClassFunction(F2, 0, {})
        res = flow_certificate(graph, zero, 4, capacity=2)
        assert res.feasible and res.chain.edges == {}

    def test_feasibility_monotone_in_capacity(self):
        rng = random.Random(9)
        graph = CayleyGraph(Z2)
        ball = sorted(Z2.ball(2), key=Z2.sort_key)
        for _ in range(5):
            f = ClassFunction(Z2, 0, {rng.choice(ball): rng.randint(-3, 3)
                                      for _ in range(3)})
            statuses = [flow_certificate(graph, f, 4, c).feasible for c in (1, 2, 3)]
            for a, b in zip(statuses, statuses[1:]):
                assert (not a) or b


class TestDecideClass:
    def test_z_constant_two_nonzero_by_mean(self):
        f = ClassFunction(Z1, 2, {})
        cert = decide_class(Z1, f)
        assert cert.verdict == "nonzero-by-mean"
        assert Fraction(cert.payload["limit"]) == 2
        assert cert.verifier_result["verified"]
        for row in cert.payload["averages"]:
            assert Fraction(row["average"]) == 2

    def test_f2_constant_plus_finite_flow(self):
        f = ClassFunction(F2, 5, {F2.identity(): 2})
        cert = decide_class(F2, f)
        assert cert.verdict == "zero-by-truncated-flow"
        assert cert.verifier_result["verified"]
        assert "finite evidence" in cert.payload["note"]

    def test_z2_finite_mass_boundary(self):
        f = ClassFunction(Z2, 0, {Z2.identity(): 7})
        cert = decide_class(Z2, f)
        assert cert.verdict == "zero-by-boundary"
        assert cert.verifier_result["verified"]

    def test_finite_group_sum_rule(self):
        g = cyclic_group(4)
        f = ClassFunction(g, 0, {0: 2, 1: -2})
        cert = decide_class(g, f)
        assert cert.verdict == "zero-by-boundary"
        f2 = ClassFunction(g, 1, {})
        cert2 = decide_class(g, f2)
        assert cert2.verdict == "nonzero-by-mean"
        assert Fraction(cert2.payload["limit"]) == 1

    def test_surface_group_flow(self):
        f = ClassFunction(SURF, 1, {})
        cert = decide_class(SURF, f, flow_radii=(2, 3))
        assert cert.verdict == "zero-by-truncated-flow"
        assert cert.verifier_result["verified"]

    @pytest.mark.parametrize("group", [Z2, F2])
    def test_coinvariant_relation_vanishes(self, group):
        rng = random.Random(17)
        ball = sorted(group.ball(2), key=group.sort_key)
        gens = group.generators()
        for _ in range(25):
            f = ClassFunction(group, 0,
                              {rng.choice(ball): rng.randint(-3, 3) for _ in range(3)})
            for gen in gens:
                diff = f - f.translate(gen)
                cert = decide_class(group, diff)
                assert cert.verdict in ("zero-by-boundary", "zero-by-truncated-flow")
                assert cert.verifier_result["verified"]

    def test_certificate_document_shape(self):
        f = ClassFunction(Z2, 0, {(1, 1): 1})
        cert = decide_class(Z2, f)
        doc = cert.to_document()
        assert set(doc) == {"verdict", "group", "function", "payload",
                            "verifier_result"}


class TestVerifierRejectsTampering:
    def test_tampered_boundary_fails(self):
        f = ClassFunction(Z2, 0, {Z2.identity(): 2})
        cert = decide_class(Z2, f)
        cert.payload["chain"] = cert.payload["chain"][1:]
        assert not verify_certificate(cert)["verified"]

    def test_tampered_mean_fails(self):
        f = ClassFunction(Z1, 3, {})
        cert = decide_class(Z1, f)
        cert.payload["averages"][0]["average"] = "4"
        assert not verify_certificate(cert)["verified"]
