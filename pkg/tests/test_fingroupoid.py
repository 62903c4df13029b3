import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folioid import fingroupoid as fg
from folioid.errors import NotComposable, StructureError, ThetaIllDefined


def swap_inverse(g: fg.FiniteGroupoid, arrow: int) -> fg.FiniteGroupoid:
    """Corrupt the inverse table on one non-loop arrow."""
    inv = dict(g.inv)
    other = next(a for a in g.arrows if a != arrow and a != inv[arrow])
    inv[arrow] = other
    return fg.FiniteGroupoid(g.objects, g.arrows, g.src, g.tgt, g.unit, inv, g.mul)


class TestValidateGroupoid:
    def test_pair_groupoid_valid(self):
        report = fg.validate_groupoid(fg.pair_groupoid(3))
        assert report.valid
        assert report.to_json() == {"valid": True, "violations": []}

    def test_swapped_inverse_reports_axiom_v(self):
        g = fg.pair_groupoid(3)
        bad = swap_inverse(g, arrow=1)  # arrow (0,1)
        report = fg.validate_groupoid(bad)
        assert not report.valid
        axioms = {v.axiom for v in report.violations}
        assert any(a.startswith("v_inverse") for a in axioms)
        witnessed = [v.witness for v in report.violations if v.axiom == "v_inverse"]
        assert any(w[0] == 1 for w in witnessed)

    def test_cyclic_group_valid(self):
        assert fg.validate_groupoid(fg.cyclic_group_groupoid(3)).valid

    def test_malformed_table_is_structural(self):
        g = fg.pair_groupoid(2)
        src = dict(g.src)
        src[0] = 99
        bad = fg.FiniteGroupoid(g.objects, g.arrows, src, g.tgt, g.unit, g.inv, g.mul)
        with pytest.raises(StructureError):
            fg.validate_groupoid(bad)

    def test_non_composable_query_raises(self):
        g = fg.pair_groupoid(2)
        with pytest.raises(NotComposable):
            g.compose(0, 3)  # (0,0) after (1,1)


def conjugation_oracle(g: fg.FiniteGroupoid, n: frozenset) -> bool:
    """Independent brute-force conjugation check via raw table lookups."""
    for loop in n:
        if g.src[loop] != g.tgt[loop]:
            continue
        for a in g.arrows:
            if g.src[a] != g.src[loop]:
                continue
            conj = g.mul[(g.mul[(a, loop)], g.inv[a])]
            if conj not in n:
                return False
    return True


class TestNormalSubgroupoid:
    def test_block_subgroupoid_is_normal(self):
        g = fg.pair_groupoid(4)
        n = fg.pair_block_subgroupoid(4, [[0, 1], [2, 3]])
        ok, witness = fg.is_normal_subgroupoid(g, n)
        assert ok and witness is None
        assert conjugation_oracle(g, n)

    def test_units_only_is_normal(self):
        g = fg.pair_groupoid(4)
        ok, _ = fg.is_normal_subgroupoid(g, g.unit_arrows())
        assert ok

    def test_trivial_subgroup_of_z2(self):
        g = fg.cyclic_group_groupoid(2)
        ok, _ = fg.is_normal_subgroupoid(g, frozenset({0}))
        assert ok
        assert conjugation_oracle(g, frozenset({0}))

    def test_non_wide_subset_raises_naming_closure(self):
        g = fg.pair_groupoid(3)
        with pytest.raises(ValueError, match="not wide"):
            fg.is_normal_subgroupoid(g, frozenset({g.unit[0]}))

    def test_non_closed_subset_raises(self):
        g = fg.pair_groupoid(3)
        # units plus a single non-loop arrow: misses its inverse
        n = set(g.unit_arrows()) | {1}
        with pytest.raises(ValueError, match="inversion"):
            fg.is_normal_subgroupoid(g, frozenset(n))


class TestQuotientByNormalSubgroupoid:
    def test_pair_blocks_gives_pair_on_two_objects(self):
        g = fg.pair_groupoid(4)
        n = fg.pair_block_subgroupoid(4, [[0, 1], [2, 3]])
        q = fg.quotient_by_normal_subgroupoid(g, n)
        # oracle: brute-force class enumeration says 2 object classes, 4 arrow classes
        assert len(q.objects) == 2 and len(q.arrows) == 4
        assert fg.find_isomorphism(q, fg.pair_groupoid(2)) is not None

    def test_units_quotient_is_identity_up_to_relabeling(self):
        g = fg.pair_groupoid(3)
        q = fg.quotient_by_normal_subgroupoid(g, g.unit_arrows())
        assert fg.find_isomorphism(q, g) is not None

    def test_z4_mod_2z4_is_z2(self):
        g = fg.cyclic_group_groupoid(4)
        q = fg.quotient_by_normal_subgroupoid(g, frozenset({0, 2}))
        # coset table oracle: {0,2} and {1,3}
        assert len(q.arrows) == 2
        assert fg.find_isomorphism(q, fg.cyclic_group_groupoid(2)) is not None


def block_projection_morphism():
    g = fg.pair_groupoid(4)
    blocks = {0: 0, 1: 0, 2: 1, 3: 1}
    q = fg.pair_groupoid(2)
    arrow_map = {a * 4 + b: blocks[a] * 2 + blocks[b]
                 for a in range(4) for b in range(4)}
    return fg.FiniteMorphism(g, q, arrow_map, blocks)


class TestKernel:
    def test_block_projection_kernel(self):
        f = block_projection_morphism()
        k = fg.kernel_of_morphism(f)
        assert k == fg.pair_block_subgroupoid(4, [[0, 1], [2, 3]])

    def test_identity_kernel_is_units(self):
        g = fg.pair_groupoid(3)
        f = fg.FiniteMorphism(g, g, {a: a for a in g.arrows}, {p: p for p in g.objects})
        assert fg.kernel_of_morphism(f) == g.unit_arrows()

    def test_z4_to_z2_kernel(self):
        g4, g2 = fg.cyclic_group_groupoid(4), fg.cyclic_group_groupoid(2)
        f = fg.FiniteMorphism(g4, g2, {x: x % 2 for x in range(4)}, {0: 0})
        assert fg.kernel_of_morphism(f) == frozenset({0, 2})

    @given(st.integers(2, 4), st.lists(st.integers(0, 1), min_size=2, max_size=4))
    @settings(max_examples=25, deadline=None)
    def test_kernel_always_normal_pair_projections(self, n, labels):
        # random two-block partitions of {0..n-1} induce projection morphisms
        labels = (labels + [0] * n)[:n]
        if len(set(labels)) == 1:
            labels[0] = 1 - labels[0] if n > 1 else labels[0]
        g = fg.pair_groupoid(n)
        m = len(set(labels))
        relabel = {v: i for i, v in enumerate(sorted(set(labels)))}
        blocks = {p: relabel[labels[p]] for p in range(n)}
        q = fg.pair_groupoid(m)
        arrow_map = {a * n + b: blocks[a] * m + blocks[b]
                     for a in range(n) for b in range(n)}
        f = fg.FiniteMorphism(g, q, arrow_map, blocks)
        k = fg.kernel_of_morphism(f)  # raises if the kernel is not normal
        ok, _ = fg.is_normal_subgroupoid(g, k)
        assert ok

    @given(st.sampled_from([(4, 2), (6, 3), (6, 2), (8, 4)]))
    @settings(max_examples=10, deadline=None)
    def test_kernel_always_normal_group_reductions(self, sizes):
        n, m = sizes
        gn, gm = fg.cyclic_group_groupoid(n), fg.cyclic_group_groupoid(m)
        f = fg.FiniteMorphism(gn, gm, {x: x % m for x in range(n)}, {0: 0})
        k = fg.kernel_of_morphism(f)
        assert k == frozenset(range(0, n, m))


class TestNSS:
    def test_basegp_discrete_nss_valid(self):
        g = fg.pair_groupoid(4)
        nss = fg.pair_block_nss(4, [[0, 1], [2, 3]])
        assert fg.validate_nss(g, nss).valid

    def test_vb_discrete_nss_valid(self):
        g = fg.group_bundle_groupoid(4, 2)
        nss = fg.group_bundle_nss(4, 2, [0, 2])
        assert fg.validate_nss(g, nss).valid

    def test_condition2_violation_witnessed(self):
        g = fg.pair_groupoid(4)
        nss = fg.pair_block_nss(4, [[0, 1], [2, 3]])
        theta = dict(nss.theta)
        # send the unit coset over 1 at (0,1) somewhere wrong
        key = ((0, 1), fg.coset_rep(g, nss.n_arrows, g.unit[1]))
        theta[key] = fg.coset_rep(g, nss.n_arrows, g.unit[1])
        mutated = fg.NormalSubgroupoidSystem(nss.n_arrows, nss.relation, theta)
        report = fg.validate_nss(g, mutated)
        assert not report.valid
        assert any(v.axiom == "nss_condition_2" for v in report.violations)

    def test_theta_conflicting_table_raises(self):
        g = fg.pair_groupoid(4)
        n = fg.pair_block_subgroupoid(4, [[0, 1], [2, 3]])
        rel = {(p, q) for p in range(2) for q in range(2)} | {(p, p) for p in range(4)}
        # two representatives of one coset sent to different cosets
        entries = {((0, 1), 1 * 4 + 0): 0, ((0, 1), 1 * 4 + 1): 2 * 4 + 2}
        with pytest.raises(ThetaIllDefined):
            fg.make_nss(g, n, rel, entries)


class TestQuotientByNSS:
    def test_basegp_agrees_with_normal_quotient(self):
        g = fg.pair_groupoid(4)
        n = fg.pair_block_subgroupoid(4, [[0, 1], [2, 3]])
        q_n = fg.quotient_by_normal_subgroupoid(g, n)
        q_s, proj = fg.quotient_by_nss(g, fg.pair_block_nss(4, [[0, 1], [2, 3]]))
        assert fg.find_isomorphism(q_s, fg.pair_groupoid(2)) is not None
        assert fg.find_isomorphism(q_n, q_s) is not None
        assert fg.validate_morphism(proj).valid

    def test_vb_quotients_differ(self):
        g = fg.group_bundle_groupoid(4, 2)
        n = frozenset(m * 4 + x for m in range(2) for x in (0, 2))
        q_n = fg.quotient_by_normal_subgroupoid(g, n)
        q_s, proj = fg.quotient_by_nss(g, fg.group_bundle_nss(4, 2, [0, 2]))
        # N-quotient keeps both objects; the system quotient merges them
        assert len(q_n.objects) == 2 and len(q_s.objects) == 1
        assert fg.find_isomorphism(q_n, fg.group_bundle_groupoid(2, 2)) is not None
        assert fg.find_isomorphism(q_s, fg.cyclic_group_groupoid(2)) is not None
        assert fg.find_isomorphism(q_n, q_s) is None
        assert fg.validate_morphism(proj).valid

    def test_trivial_nss_returns_g(self):
        g = fg.pair_groupoid(3)
        q, proj = fg.quotient_by_nss(g, fg.trivial_nss(g))
        assert fg.find_isomorphism(q, g) is not None
        assert fg.validate_morphism(proj).valid


class TestJsonRoundTrip:
    def test_round_trip(self):
        g = fg.pair_groupoid(3)
        data = fg.groupoid_to_json(g)
        assert set(data) == {"objects", "arrows", "src", "tgt", "unit", "inv", "mul"}
        g2 = fg.groupoid_from_json(data)
        assert fg.validate_groupoid(g2).valid
        assert g2.mul == dict(g.mul)

    def test_bad_file_raises_structure_error(self):
        data = fg.groupoid_to_json(fg.pair_groupoid(2))
        data["src"] = data["src"][:-1]
        with pytest.raises(StructureError):
            fg.groupoid_from_json(data)
