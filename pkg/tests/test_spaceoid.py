import numpy as np
import pytest

from cstardual.errors import EndpointMismatch
from cstardual.generators import GenParams, gen_morphism_pair, gen_spaceoid
from cstardual.spaceoid import (
    FiniteSpaceoid,
    SpaceoidMorphism,
    apply_gauge,
    compose_morphisms,
    gauge_fix,
    identity_morphism,
    invert_morphism,
    is_gauge_trivial,
    morphisms_equal,
    spaceoids_isomorphic,
    validate_morphism,
    validate_spaceoid,
)


class TestValidateSpaceoid:
    def test_single_point(self, s0_spaceoid):
        assert validate_spaceoid(s0_spaceoid).ok

    def test_e1(self, e1_spaceoid):
        assert validate_spaceoid(e1_spaceoid).ok

    def test_duplicate_target_rejected(self):
        bad = FiniteSpaceoid(
            ["A", "B"], {"A": ["1", "2"], "B": ["1'", "2'"]},
            {("A", "B"): [("1", "1'"), ("1", "2'")],
             ("B", "A"): [("1'", "1"), ("2'", "1")]})
        report = validate_spaceoid(bad)
        assert not report.ok
        assert any(f.check == "target_injective" for f in report.failures)

    def test_missing_inverse_rejected(self):
        bad = FiniteSpaceoid(
            ["A", "B"], {"A": ["1"], "B": ["1'"]},
            {("A", "B"): [("1", "1'")], ("B", "A"): []})
        report = validate_spaceoid(bad)
        assert any(f.check == "inverse_present" for f in report.failures)

    def test_missing_closure_rejected(self, chain3_spaceoid):
        pts = {key: list(v) for key, v in chain3_spaceoid.points.items()}
        pts[("A", "C")] = []
        pts[("C", "A")] = []
        bad = FiniteSpaceoid(chain3_spaceoid.objects, chain3_spaceoid.base_sets, pts)
        report = validate_spaceoid(bad)
        assert any(f.check == "closure" for f in report.failures)

    def test_nonunimodular_phase_rejected(self, e1_spaceoid):
        bad = FiniteSpaceoid(
            e1_spaceoid.objects, e1_spaceoid.base_sets, e1_spaceoid.points,
            {("A", "B", 0): 2.0})
        report = validate_spaceoid(bad)
        assert any(f.check == "nu_unimodular" for f in report.failures)

    def test_at_infinity_checks_present(self, e1_spaceoid):
        report = validate_spaceoid(e1_spaceoid)
        assert "sections_vanish_at_infinity" in report.checks_run
        assert "converging_at_infinity" in report.checks_run

    def test_relation_closure_of_composites(self):
        for seed in range(20):
            S = gen_spaceoid(GenParams(seed=seed, n_objects=4, max_base=3,
                                       edge_density=0.8))
            for A in S.objects:
                for B in S.objects:
                    for C in S.objects:
                        if len({A, B, C}) < 3:
                            continue
                        rel_ab = {(t, s) for t, s in S.points[(A, B)]}
                        rel_bc = {(t, s) for t, s in S.points[(B, C)]}
                        rel_ac = {(t, s) for t, s in S.points[(A, C)]}
                        composed = {(t1, s2) for t1, s1 in rel_ab
                                    for t2, s2 in rel_bc if s1 == t2}
                        assert composed <= rel_ac


class TestComposeMorphisms:
    def test_identity_neutral(self, e1_spaceoid):
        ident = identity_morphism(e1_spaceoid)
        m = SpaceoidMorphism(
            e1_spaceoid, e1_spaceoid, {"A": "A", "B": "B"},
            {A: {x: x for x in e1_spaceoid.base_sets[A]} for A in "AB"},
            {("A", "B", 0): 1j, ("B", "A", 0): -1j})
        assert validate_morphism(m).ok
        eq, _ = morphisms_equal(compose_morphisms(ident, m), m)
        assert eq
        eq, _ = morphisms_equal(compose_morphisms(m, ident), m)
        assert eq

    def test_scalar_automorphisms_multiply(self, full2_spaceoid):
        S = full2_spaceoid

        def scalar_auto(alpha):
            return SpaceoidMorphism(
                S, S, {"A": "A", "B": "B"},
                {A: {x: x for x in S.base_sets[A]} for A in "AB"},
                {("A", "B", 0): alpha, ("B", "A", 0): np.conj(alpha)})

        a, b = np.exp(0.3j), np.exp(1.1j)
        m = compose_morphisms(scalar_auto(a), scalar_auto(b))
        assert m.scalar(("A", "B", 0)) == pytest.approx(a * b)

    def test_imaginary_scalars_square_to_minus_one(self, e1_spaceoid):
        def phase(alpha):
            return SpaceoidMorphism(
                e1_spaceoid, e1_spaceoid, {"A": "A", "B": "B"},
                {A: {x: x for x in e1_spaceoid.base_sets[A]} for A in "AB"},
                {("A", "B", 0): alpha, ("B", "A", 0): np.conj(alpha)})

        m = compose_morphisms(phase(1j), phase(1j))
        assert m.scalar(("A", "B", 0)) == pytest.approx(-1.0)

    def test_endpoint_mismatch(self, e1_spaceoid, s0_spaceoid):
        ident1 = identity_morphism(e1_spaceoid)
        ident0 = identity_morphism(s0_spaceoid)
        with pytest.raises(EndpointMismatch):
            compose_morphisms(ident1, ident0)

    def test_associative_and_unital_on_generated_triples(self):
        from cstardual.duality import evaluation_transform

        for seed in range(12):
            params = GenParams(seed=seed, n_objects=3, max_base=3,
                               edge_density=0.8, phase_mode="random")
            m1, m2 = gen_morphism_pair(params)
            # third leg with nontrivial maps: evaluation onto the spectrum
            m3 = evaluation_transform(m2.target)
            lhs = compose_morphisms(compose_morphisms(m1, m2), m3)
            rhs = compose_morphisms(m1, compose_morphisms(m2, m3))
            eq, dev = morphisms_equal(lhs, rhs, tol=1e-12)
            assert eq, (seed, dev)
            for m in (m1, m2):
                left_unit = compose_morphisms(identity_morphism(m.source), m)
                right_unit = compose_morphisms(m, identity_morphism(m.target))
                assert morphisms_equal(left_unit, m, tol=1e-12)[0]
                assert morphisms_equal(right_unit, m, tol=1e-12)[0]


class TestGaugeFix:
    def test_trivial_input_unchanged(self, e1_spaceoid):
        fixed, lam = gauge_fix(e1_spaceoid)
        assert is_gauge_trivial(fixed)
        assert all(abs(v - 1) < 1e-12 for v in lam.values())

    def test_single_edge_phase_removed(self, e1_spaceoid):
        theta = np.exp(0.77j)
        twisted = apply_gauge(e1_spaceoid, {("A", "B", 0): theta})
        assert validate_spaceoid(twisted).ok
        fixed, _ = gauge_fix(twisted)
        assert is_gauge_trivial(fixed)

    def test_three_chain_coboundary(self, chain3_spaceoid):
        twisted = apply_gauge(chain3_spaceoid, {("A", "B", 0): 1j})
        assert twisted.c(("A", "B", 0), ("B", "C", 0)) == pytest.approx(1j)
        assert validate_spaceoid(twisted).ok
        fixed, lam = gauge_fix(twisted)
        assert is_gauge_trivial(fixed)
        assert validate_spaceoid(fixed).ok

    def test_idempotent(self):
        S = gen_spaceoid(GenParams(seed=9, n_objects=4, max_base=3,
                                   edge_density=0.9, phase_mode="random"))
        fixed, _ = gauge_fix(S)
        fixed2, lam2 = gauge_fix(fixed)
        assert all(abs(v - 1) < 1e-12 for v in lam2.values())
        ok, _ = morphisms_equal(identity_morphism(fixed), identity_morphism(fixed2))

    def test_preserves_isomorphism_class(self):
        for seed in range(10):
            S = gen_spaceoid(GenParams(seed=seed, n_objects=3, max_base=3,
                                       edge_density=0.7, phase_mode="random"))
            fixed, _ = gauge_fix(S)
            assert spaceoids_isomorphic(S, fixed) is not None


class TestIsomorphism:
    def test_self_isomorphic(self, e1_spaceoid):
        m = spaceoids_isomorphic(e1_spaceoid, e1_spaceoid)
        assert m is not None and validate_morphism(m).ok

    def test_relabeled_base(self, e1_spaceoid):
        other = FiniteSpaceoid(
            ["A", "B"], {"A": ["u", "v"], "B": ["x", "y", "z"]},
            {("A", "B"): [("u", "z")], ("B", "A"): [("z", "u")]})
        m = spaceoids_isomorphic(e1_spaceoid, other)
        assert m is not None
        inv = invert_morphism(m)
        assert validate_morphism(inv).ok
        eq, _ = morphisms_equal(compose_morphisms(m, inv),
                                identity_morphism(e1_spaceoid))
        assert eq

    def test_emptied_hom_set_not_isomorphic(self, e1_spaceoid):
        other = FiniteSpaceoid(
            ["A", "B"], {"A": ["1", "2"], "B": ["1'", "2'", "3'"]}, {})
        assert spaceoids_isomorphic(e1_spaceoid, other) is None

    def test_object_permutation_found(self, e1_spaceoid):
        flipped = FiniteSpaceoid(
            ["A", "B"], {"B": ["1", "2"], "A": ["1'", "2'", "3'"]},
            {("B", "A"): [("1", "1'")], ("A", "B"): [("1'", "1")]})
        m = spaceoids_isomorphic(e1_spaceoid, flipped)
        assert m is not None
        assert m.obj_map == {"A": "B", "B": "A"}

    def test_gauge_twisted_still_isomorphic(self, chain3_spaceoid):
        twisted = apply_gauge(chain3_spaceoid, {("A", "B", 0): np.exp(2.1j),
                                                ("B", "C", 0): np.exp(-0.4j)})
        m = spaceoids_isomorphic(chain3_spaceoid, twisted)
        assert m is not None and validate_morphism(m).ok


class TestMorphismValidation:
    def test_component_breaking_map_rejected(self, e1_spaceoid, full2_spaceoid):
        # send the singleton base point 2 onto the linked point x: the image
        # component covers {A,B} but the source component is only {A}
        m = SpaceoidMorphism(
            e1_spaceoid, full2_spaceoid, {"A": "A", "B": "B"},
            {"A": {"1": "x", "2": "x"},
             "B": {"1'": "y", "2'": "y", "3'": "y"}},
            {("A", "B", 0): 1.0, ("B", "A", 0): 1.0})
        report = validate_morphism(m)
        assert not report.ok
        assert any(f.check == "component_preserving" for f in report.failures)

    def test_missing_image_point_rejected(self, full2_spaceoid, e1_spaceoid):
        m = SpaceoidMorphism(
            full2_spaceoid, e1_spaceoid, {"A": "A", "B": "B"},
            {"A": {"x": "2"}, "B": {"y": "2'"}}, {})
        report = validate_morphism(m)
        assert not report.ok
        assert any(f.check == "point_map_defined" for f in report.failures)

    def test_generated_morphisms_valid(self):
        for seed in range(15):
            params = GenParams(seed=seed, n_objects=1 + seed % 4,
                               max_base=1 + seed % 3, edge_density=0.8,
                               phase_mode="random")
            m1, m2 = gen_morphism_pair(params)
            assert validate_morphism(m1).ok
            assert validate_morphism(m2).ok
