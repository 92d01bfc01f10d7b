"""Suite-wide invariants, partly randomized: coefficient structure of
mass linear pairs, equivariance of the verdict under lattice symmetries,
balanced in-class combinations, restrictions to symmetric faces, and
blowup round trips."""

import random
from fractions import Fraction as Fr
from functools import lru_cache

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from masslin import (
    HPolytope,
    blowdown,
    blowup,
    center_of_mass,
    equivalence_classes,
    mass_linear_test,
    restrict_to_face,
)
from _suite import combine_conormals, report_for, suite_pairs, suite_polytopes


@lru_cache(maxsize=1)
def _ml_pairs():
    return tuple(p for p in suite_pairs() if report_for(p).verdict)


@lru_cache(maxsize=1)
def _small_pairs():
    return tuple(p for p in suite_pairs() if p.poly.n_facets <= 6)


def _dot(u, v):
    return sum(Fr(a) * Fr(b) for a, b in zip(u, v))


class TestCoefficientStructure:
    def test_gamma_sums_to_zero(self):
        for pair in _ml_pairs():
            assert sum(report_for(pair).gamma) == 0, pair.name

    def test_functional_is_conormal_combination(self):
        for pair in _ml_pairs():
            gamma = report_for(pair).gamma
            rebuilt = tuple(
                sum(g * eta[r] for g, eta in zip(gamma, pair.poly.conormals))
                for r in range(pair.poly.dim)
            )
            assert rebuilt == tuple(Fr(h) for h in pair.H), pair.name

    def test_at_least_two_asymmetric_facets(self):
        for pair in _ml_pairs():
            rep = report_for(pair)
            assert len(rep.asymmetric) >= 2 or not any(pair.H), pair.name

    def test_asymmetric_facets_are_pervasive_or_flat(self):
        for pair in _ml_pairs():
            rep = report_for(pair)
            for i in rep.asymmetric:
                assert rep.pervasive[i] or rep.flat[i], (pair.name, i)

    def test_exceptional_facet_is_symmetric(self):
        seen = 0
        for pair in _ml_pairs():
            if pair.origin != "blowup":
                continue
            if not pair.poly.labels[0].startswith("E"):
                continue
            assert report_for(pair).gamma[0] == 0, pair.name
            seen += 1
        assert seen >= 3

    def test_euler_relation_across_suite(self):
        for sp in suite_polytopes():
            total = sum((-1) ** f.dimension for f in sp.poly.face_lattice.values())
            assert total == 1, sp.name


class TestRestriction:
    def test_symmetric_facet_restrictions_match(self):
        seen = 0
        for pair in _ml_pairs():
            rep = report_for(pair)
            if not rep.asymmetric:
                continue
            for i in sorted(rep.symmetric):
                face = pair.poly.face(frozenset({i}))
                if face is None or face.dimension < 1:
                    continue
                res = restrict_to_face(pair.poly, pair.H, {i})
                sub = mass_linear_test(res.poly, res.functional)
                assert sub.verdict, (pair.name, i)
                restricted = {
                    res.facet_origin[j]: g
                    for j, g in enumerate(sub.gamma)
                    if g != 0
                }
                original = {j: rep.gamma[j] for j in rep.asymmetric}
                assert restricted == original, (pair.name, i)
                seen += 1
                break
        assert seen >= 10


class TestEquivariance:
    @given(data=st.data())
    @settings(max_examples=20, deadline=None)
    def test_translation(self, data):
        pair = data.draw(st.sampled_from(_small_pairs()))
        xi = data.draw(
            st.tuples(*[st.integers(-3, 3) for _ in range(pair.poly.dim)])
        )
        rep0 = report_for(pair)
        rep1 = mass_linear_test(pair.poly.translate(xi), pair.H)
        assert rep0.verdict == rep1.verdict
        assert rep0.gamma == rep1.gamma
        assert rep0.symmetric == rep1.symmetric

    @given(data=st.data())
    @settings(max_examples=20, deadline=None)
    def test_lattice_map(self, data):
        pair = data.draw(st.sampled_from(_small_pairs()))
        n = pair.poly.dim
        T = [[Fr(i == j) for j in range(n)] for i in range(n)]
        for _ in range(data.draw(st.integers(1, 3))):
            i = data.draw(st.integers(0, n - 1))
            j = data.draw(st.integers(0, n - 1))
            c = data.draw(st.integers(-2, 2))
            if i == j:
                continue
            for col in range(n):
                T[i][col] += c * T[j][col]
        mapped = pair.poly.apply_lattice_map(T)
        newH = tuple(_dot(row, pair.H) for row in T)
        rep0 = report_for(pair)
        rep1 = mass_linear_test(mapped, newH)
        assert rep0.verdict == rep1.verdict
        assert rep0.gamma == rep1.gamma
        assert rep0.asymmetric == rep1.asymmetric

    @given(data=st.data())
    @settings(max_examples=20, deadline=None)
    def test_facet_permutation(self, data):
        pair = data.draw(st.sampled_from(_small_pairs()))
        order = data.draw(st.permutations(range(pair.poly.n_facets)))
        rep0 = report_for(pair)
        rep1 = mass_linear_test(pair.poly.permute_facets(order), pair.H)
        assert rep0.verdict == rep1.verdict
        if rep0.verdict:
            assert rep1.gamma == tuple(rep0.gamma[i] for i in order)
        assert rep1.asymmetric == frozenset(
            order.index(i) for i in rep0.asymmetric
        )


class TestBalancedCombinations:
    @given(data=st.data())
    @settings(max_examples=10, deadline=None)
    def test_in_class_balance_is_mass_linear_with_beta_pairing(self, data):
        sp = data.draw(
            st.sampled_from(
                [s for s in suite_polytopes() if s.poly.n_facets <= 7]
            )
        )
        poly = sp.poly
        multi = [
            sorted(c) for c in equivalence_classes(poly).classes if len(c) > 1
        ]
        assume(multi)
        beta = [0] * poly.n_facets
        for cls in multi:
            picks = data.draw(
                st.tuples(*[st.integers(-2, 2) for _ in cls[:-1]])
            )
            for member, b in zip(cls, picks):
                beta[member] = b
            beta[cls[-1]] = -sum(picks)
        H = combine_conormals(poly, dict(enumerate(beta)))
        assume(any(H))
        rep = mass_linear_test(poly, H)
        assert rep.verdict

        rng = random.Random(data.draw(st.integers(0, 10**6)))
        radius = poly.chamber_radius()
        for _ in range(5):
            kappa = tuple(
                k + r * Fr(rng.randint(-8, 8), 16)
                for k, r in zip(poly.support, radius)
            )
            moved = HPolytope(poly.dim, poly.conormals, kappa)
            assert _dot(H, center_of_mass(moved)) == _dot(beta, kappa)


class TestBlowupRoundTrip:
    @given(data=st.data())
    @settings(max_examples=25, deadline=None)
    def test_blowdown_inverts_blowup(self, data):
        sp = data.draw(st.sampled_from(suite_polytopes()))
        poly = sp.poly
        faces = [
            f.index_set
            for f in sorted(poly.face_lattice.values(), key=lambda f: sorted(f.index_set))
            if 0 <= f.dimension <= poly.dim - 2
        ]
        assume(faces)
        I = data.draw(st.sampled_from(faces))
        blown = blowup(poly, I)
        report = blowdown(blown, 0)
        assert report.ok
        assert report.polytope == poly
        shifted = tuple(i + 1 for i in sorted(I))
        assert shifted == report.index_set or shifted in report.alternatives
