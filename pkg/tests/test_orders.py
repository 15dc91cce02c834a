"""Ordering axioms and basis algebra, checked against brute-force oracles."""

import itertools
import random

import pytest

from wsts.errors import UsageError
from wsts.orders import (
    CHANNEL_ORDER,
    MARKING_ORDER,
    OMEGA,
    PREFIX_ORDER,
    VECTOR_ORDER,
    Configuration,
    MinBasis,
    is_omega,
    leq_dickson,
    leq_omega,
    leq_prefix,
    leq_subword,
    maximal_elements,
    minimize,
    omega_add,
    product_leq,
)


def subword_oracle(u, v):
    """u embeds in v iff u appears among the subsequences of v."""
    n = len(v)
    for mask in range(1 << n):
        sub = tuple(v[i] for i in range(n) if mask >> i & 1)
        if sub == tuple(u):
            return True
    return False


def random_vector(rng, dim, bound=9):
    return tuple(rng.randint(0, bound) for _ in range(dim))


def random_omega_vector(rng, dim, bound=9):
    return tuple(OMEGA if rng.random() < 0.2 else rng.randint(0, bound) for _ in range(dim))


def random_word(rng, alphabet="ab", max_len=5):
    return tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_len)))


class TestOrderingAxioms:
    """Reflexivity and transitivity on large seeded samples."""

    def test_dickson_reflexive_transitive(self):
        rng = random.Random(11)
        for _ in range(10000):
            d = rng.randint(1, 4)
            x, y, z = (random_vector(rng, d, 4) for _ in range(3))
            assert leq_dickson(x, x)
            if leq_dickson(x, y) and leq_dickson(y, z):
                assert leq_dickson(x, z)

    def test_omega_reflexive_transitive(self):
        rng = random.Random(12)
        for _ in range(10000):
            d = rng.randint(1, 4)
            x, y, z = (random_omega_vector(rng, d, 4) for _ in range(3))
            assert leq_omega(x, x)
            if leq_omega(x, y) and leq_omega(y, z):
                assert leq_omega(x, z)

    def test_subword_reflexive_transitive(self):
        rng = random.Random(13)
        for _ in range(10000):
            u, v, w = (random_word(rng) for _ in range(3))
            assert leq_subword(u, u)
            if leq_subword(u, v) and leq_subword(v, w):
                assert leq_subword(u, w)

    def test_prefix_reflexive_transitive(self):
        rng = random.Random(14)
        for _ in range(10000):
            u, v, w = (random_word(rng) for _ in range(3))
            assert leq_prefix(u, u)
            if leq_prefix(u, v) and leq_prefix(v, w):
                assert leq_prefix(u, w)

    def test_antisymmetry_on_samples(self):
        rng = random.Random(15)
        for _ in range(2000):
            x, y = random_vector(rng, 3), random_vector(rng, 3)
            if leq_dickson(x, y) and leq_dickson(y, x):
                assert x == y
            u, v = random_word(rng), random_word(rng)
            if leq_subword(u, v) and leq_subword(v, u):
                assert u == v


class TestSubwordAgainstOracle:
    def test_exhaustive_two_letter_words(self):
        words = []
        for n in range(7):
            words.extend(itertools.product("ab", repeat=n))
        short = [w for w in words if len(w) <= 4]
        for u in short:
            for v in words:
                assert leq_subword(u, v) == subword_oracle(u, v), (u, v)

    def test_prefix_implies_subword(self):
        rng = random.Random(16)
        for _ in range(5000):
            u, v = random_word(rng, "abc"), random_word(rng, "abc")
            if leq_prefix(u, v):
                assert leq_subword(u, v)

    def test_prefix_incomparable_family(self):
        # a, ba, bba, bbba, ... is an infinite antichain under prefix
        family = [tuple("b" * k + "a") for k in range(8)]
        for u, v in itertools.combinations(family, 2):
            assert not leq_prefix(u, v)
            assert not leq_prefix(v, u)
        # yet under subword every pair with fewer b's embeds in the longer
        assert leq_subword(family[0], family[3])


class TestOmegaArithmetic:
    def test_omega_is_top(self):
        assert leq_omega((5,), (OMEGA,))
        assert not leq_omega((OMEGA,), (5,))
        assert leq_omega((OMEGA,), (OMEGA,))

    def test_saturating_add(self):
        assert omega_add(3, 4) == 7
        assert omega_add(3, -2) == 1
        assert is_omega(omega_add(OMEGA, -100))
        assert is_omega(omega_add(OMEGA, 100))

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(UsageError):
            leq_dickson((1, 2), (1, 2, 3))
        with pytest.raises(UsageError):
            leq_omega((1,), (1, 2))


class TestProductOrder:
    def test_control_states_must_match(self):
        a = Configuration("p", (0, 0))
        b = Configuration("q", (5, 5))
        assert not product_leq(a, b, leq_dickson)
        assert product_leq(a, Configuration("p", (1, 0)), leq_dickson)

    def test_channel_order_per_channel(self):
        a = Configuration("p", (("a",), ()))
        b = Configuration("p", (("b", "a"), ("c",)))
        assert CHANNEL_ORDER.leq(a, b)
        c = Configuration("p", ((), ("c", "c")))
        assert not CHANNEL_ORDER.leq(c, b)


class TestMinimize:
    def test_drops_dominated_and_duplicates(self):
        pts = [
            Configuration("p", (1, 2)),
            Configuration("p", (1, 2)),
            Configuration("p", (2, 2)),
            Configuration("p", (0, 5)),
            Configuration("q", (0, 0)),
        ]
        basis = minimize(pts, VECTOR_ORDER)
        assert [(c.state, c.payload) for c in basis] == [
            ("p", (0, 5)),
            ("p", (1, 2)),
            ("q", (0, 0)),
        ]

    def test_result_is_antichain_and_idempotent(self):
        rng = random.Random(17)
        for _ in range(300):
            pts = [
                Configuration(rng.choice("pq"), random_vector(rng, 2, 5))
                for _ in range(rng.randint(0, 12))
            ]
            basis = minimize(pts, VECTOR_ORDER)
            for x, y in itertools.combinations(basis.elements, 2):
                assert not VECTOR_ORDER.leq(x, y)
                assert not VECTOR_ORDER.leq(y, x)
            again = minimize(basis.elements, VECTOR_ORDER)
            assert again.elements == basis.elements

    def test_upward_closure_preserved(self):
        rng = random.Random(18)
        grid = [
            Configuration(s, (i, j))
            for s in "pq"
            for i in range(7)
            for j in range(7)
        ]
        for _ in range(200):
            pts = [
                Configuration(rng.choice("pq"), random_vector(rng, 2, 5))
                for _ in range(rng.randint(1, 8))
            ]
            basis = minimize(pts, VECTOR_ORDER)
            for g in grid:
                direct = any(VECTOR_ORDER.leq(p, g) for p in pts)
                assert basis.contains(g) == direct

    def test_channel_words_minimize(self):
        pts = [
            Configuration("p", (("a", "b"),)),
            Configuration("p", (("a",),)),
            Configuration("p", (("b", "a", "b"),)),
            Configuration("q", ((),)),
        ]
        basis = minimize(pts, CHANNEL_ORDER)
        assert [(c.state, c.payload) for c in basis] == [
            ("p", (("a",),)),
            ("q", ((),)),
        ]


class TestBasisAlgebra:
    def grid(self, bound):
        return [
            Configuration(s, (i, j))
            for s in "pq"
            for i in range(bound + 1)
            for j in range(bound + 1)
        ]

    def random_basis(self, rng):
        pts = [
            Configuration(rng.choice("pq"), random_vector(rng, 2, 4))
            for _ in range(rng.randint(0, 6))
        ]
        return minimize(pts, VECTOR_ORDER)

    def test_includes_matches_grid_containment(self):
        # entries stay <= 4, so containment over the 0..8 grid together with
        # upward closure decides containment everywhere
        rng = random.Random(19)
        grid = self.grid(8)
        for _ in range(200):
            a, b = self.random_basis(rng), self.random_basis(rng)
            grid_subset = all(a.contains(g) for g in grid if b.contains(g))
            assert a.includes(b) == grid_subset

    def test_union_is_pointwise_or(self):
        rng = random.Random(20)
        grid = self.grid(8)
        for _ in range(200):
            a, b = self.random_basis(rng), self.random_basis(rng)
            u = a.union(b)
            for g in grid:
                assert u.contains(g) == (a.contains(g) or b.contains(g))

    def test_empty_basis(self):
        empty = MinBasis((), VECTOR_ORDER)
        assert not empty.contains(Configuration("p", (0, 0)))
        full = minimize([Configuration("p", (0, 0))], VECTOR_ORDER)
        assert full.includes(empty)
        assert not empty.includes(full)
        assert empty.union(full).elements == full.elements

    def test_includes_on_words(self):
        rng = random.Random(21)
        words = []
        for n in range(5):
            words.extend(itertools.product("ab", repeat=n))
        grid = [Configuration("p", (w,)) for w in words]
        for _ in range(150):
            pts_a = [Configuration("p", (random_word(rng, "ab", 3),)) for _ in range(rng.randint(0, 4))]
            pts_b = [Configuration("p", (random_word(rng, "ab", 3),)) for _ in range(rng.randint(0, 4))]
            a = minimize(pts_a, CHANNEL_ORDER)
            b = minimize(pts_b, CHANNEL_ORDER)
            grid_subset = all(a.contains(g) for g in grid if b.contains(g))
            assert a.includes(b) == grid_subset

    def test_mixed_orderings_rejected(self):
        a = minimize([Configuration("p", (0, 0))], VECTOR_ORDER)
        b = minimize([Configuration("p", ((),))], CHANNEL_ORDER)
        with pytest.raises(UsageError):
            a.includes(b)
        with pytest.raises(UsageError):
            a.union(b)


class TestMaximalElements:
    def test_dual_of_minimize(self):
        pts = [
            Configuration("p", (1, 2)),
            Configuration("p", (2, 2)),
            Configuration("p", (0, 5)),
        ]
        top = maximal_elements(pts, VECTOR_ORDER)
        assert [(c.state, c.payload) for c in top] == [("p", (0, 5)), ("p", (2, 2))]

    def test_omega_markings(self):
        pts = [
            Configuration("p", (OMEGA, 0)),
            Configuration("p", (3, 0)),
            Configuration("p", (1, 1)),
        ]
        top = maximal_elements(pts, MARKING_ORDER)
        payloads = [c.payload for c in top]
        assert (1, 1) in payloads
        assert len(top) == 2 and any(is_omega(p[0]) for p in payloads)


class TestDeterminism:
    def test_canonical_order_stable_under_permutation(self):
        rng = random.Random(22)
        pts = [Configuration(rng.choice("pq"), random_vector(rng, 3, 6)) for _ in range(15)]
        reference = minimize(pts, VECTOR_ORDER).elements
        for _ in range(20):
            rng.shuffle(pts)
            assert minimize(pts, VECTOR_ORDER).elements == reference

    def test_prefix_order_bundle_usable(self):
        a = Configuration("p", (("a", "b"),))
        b = Configuration("p", (("a", "b", "c"),))
        assert PREFIX_ORDER.leq(a, b)
        assert not PREFIX_ORDER.leq(b, a)
