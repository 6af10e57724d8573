import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings

import boxsteer as bx
from strategies import chsh_values, facet_local, nonlocal_ensembles

BITS = (0, 1)

CATALOG_HASH = "843f5f0aaa8bd927"


def uniform_box():
    row = ((F(1, 4),) * 2,) * 2
    return bx.BipartiteBox(((row, row), (row, row)))


def noisy_pr(v: F) -> bx.BipartiteBox:
    pr = bx.PRBox(0, 0, 0).as_bipartite_box()
    flat = uniform_box()
    table = tuple(
        tuple(
            tuple(
                tuple(
                    v * pr.prob(x, y, a, b) + (1 - v) * flat.prob(x, y, a, b)
                    for b in BITS
                )
                for a in BITS
            )
            for y in BITS
        )
        for x in BITS
    )
    return bx.BipartiteBox(table)


def signalling_box():
    table = tuple(
        tuple(
            tuple(
                tuple(F(1) if (a == y and b == 0) else F(0) for b in BITS)
                for a in BITS
            )
            for y in BITS
        )
        for x in BITS
    )
    return bx.BipartiteBox(table)


class TestCatalog:
    def test_counts_and_labels(self):
        labels = bx.catalog_labels()
        assert len(labels) == 24
        assert len(set(labels)) == 24
        assert labels[0] == "S00xS00"
        assert labels[15] == "S11xS11"
        assert labels[16] == "PR000"
        assert labels[23] == "PR111"

    def test_all_vertices_no_signalling(self):
        for alice, bob in bx.catalog_products():
            assert bx.is_no_signalling(
                bx.product_box(alice.as_local_box(), bob.as_local_box())
            )
        for pr in bx.catalog_prs():
            assert bx.is_no_signalling(pr.as_bipartite_box())

    def test_vertices_extremal(self):
        # no vertex is a mixture of the other 23
        from boxsteer.polytope import _catalog_columns, solve_nonneg_exact

        columns = _catalog_columns()
        for v in range(24):
            others = tuple(
                col + (F(1),) for j, col in enumerate(columns) if j != v
            )
            rhs = list(columns[v]) + [F(1)]
            assert solve_nonneg_exact(others, rhs) is None

    def test_hash_frozen(self):
        assert bx.catalog_hash() == CATALOG_HASH


class TestDecompose:
    def test_pr_box_is_its_own_vertex(self):
        ensemble = bx.decompose(bx.PRBox(0, 0, 0).as_bipartite_box())
        assert {m.label: m.weight for m in ensemble.members} == {"PR000": F(1)}

    def test_product_vertex(self):
        box = bx.product_box(
            bx.SBox(0, 1).as_local_box(), bx.SBox(1, 0).as_local_box()
        )
        ensemble = bx.decompose(box)
        assert {m.label: m.weight for m in ensemble.members} == {"S01xS10": F(1)}

    def test_uniform_box_remixes(self):
        ensemble = bx.decompose(uniform_box())
        assert bx.mix_nonlocal(ensemble) == uniform_box()
        assert sum(m.weight for m in ensemble.members) == 1

    def test_deterministic(self):
        box = noisy_pr(F(5, 8))
        assert bx.decompose(box) == bx.decompose(box)

    @settings(max_examples=60, deadline=None)
    @given(nonlocal_ensembles())
    def test_round_trip(self, ensemble):
        box = bx.mix_nonlocal(ensemble)
        recovered = bx.decompose(box)
        assert bx.mix_nonlocal(recovered) == box
        assert sum(m.weight for m in recovered.members) == 1

    def test_blind_plan_ensemble_round_trips(self):
        plan = bx.plan_blind_steering(bx.TargetState(F(1, 4), F(1, 2)))
        box = bx.mix_nonlocal(plan.ensemble)
        assert bx.mix_nonlocal(bx.decompose(box)) == box


class TestIsLocal:
    def test_pr_vertices_nonlocal(self):
        for pr in bx.catalog_prs():
            assert not bx.is_local(pr.as_bipartite_box())

    def test_product_vertices_local(self):
        for alice, bob in bx.catalog_products():
            assert bx.is_local(
                bx.product_box(alice.as_local_box(), bob.as_local_box())
            )

    def test_uniform_box_local(self):
        assert bx.is_local(uniform_box())

    def test_noise_transition(self):
        # the facet oracle puts the local boundary of v*PR + (1-v)*uniform
        # at v* = 2 / max_facet(PR); both routes must agree there
        vstar = F(2) / max(chsh_values(bx.PRBox(0, 0, 0).as_bipartite_box()))
        assert vstar == F(1, 2)
        assert bx.is_local(noisy_pr(vstar))
        assert bx.is_local(noisy_pr(vstar - F(1, 16)))
        assert not bx.is_local(noisy_pr(vstar + F(1, 16)))
        assert not bx.is_local(noisy_pr(F(1)))
        assert bx.is_local(noisy_pr(F(0)))

    @settings(max_examples=60, deadline=None)
    @given(nonlocal_ensembles())
    def test_agrees_with_facet_oracle(self, ensemble):
        box = bx.mix_nonlocal(ensemble)
        assert bx.is_local(box) == facet_local(box)

    def test_decompose_on_local_boxes_remixes(self):
        # witnesses are not unique, so only the remix is checked
        for v in (F(0), F(1, 4), F(1, 2)):
            ensemble = bx.decompose(noisy_pr(v))
            assert bx.mix_nonlocal(ensemble) == noisy_pr(v)


class TestScenarioErrors:
    def test_wrong_shape_rejected(self):
        base = bx.LocalBox(((F(1, 3),) * 3, (F(1, 3),) * 3))
        box = bx.product_box(base, bx.SBox(0, 0).as_local_box())
        with pytest.raises(bx.ValidationError):
            bx.decompose(box)
        with pytest.raises(bx.ValidationError):
            bx.is_local(box)

    def test_signalling_rejected(self):
        with pytest.raises(bx.SignallingError):
            bx.decompose(signalling_box())
        with pytest.raises(bx.SignallingError):
            bx.is_local(signalling_box())


class TestSolver:
    def test_infeasible_returns_none(self):
        from boxsteer.polytope import solve_nonneg_exact

        columns = ((F(1), F(0)), (F(0), F(1)))
        assert solve_nonneg_exact(columns, [F(-1), F(1)]) is None

    def test_negative_rhs_feasible(self):
        from boxsteer.polytope import solve_nonneg_exact

        columns = ((F(-1), F(0)), (F(0), F(1)))
        solution = solve_nonneg_exact(columns, [F(-2), F(3)])
        assert solution == [F(2), F(3)]
