import itertools
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperreg import AddressVector, InputError, address_space, leq, restrictions
from hyperreg.addresses import address_space_size


def addr_strategy(a=(5, 3, 2)):
    @st.composite
    def build(draw):
        ell = draw(st.integers(2, min(a[0], 4)))
        x1 = tuple(sorted(draw(
            st.sets(st.integers(1, a[0]), min_size=ell, max_size=ell)
        )))
        j_max = draw(st.integers(1, min(len(a), ell - 1)))
        labels = tuple(
            tuple(
                draw(st.integers(1, a[j - 1]))
                for _ in range(comb(ell, j))
            )
            for j in range(2, j_max + 1)
        )
        return AddressVector(x1, labels)
    return build()


class TestAddressVector:
    def test_strictly_increasing_enforced(self):
        with pytest.raises(InputError):
            AddressVector((2, 1))
        with pytest.raises(InputError):
            AddressVector((0, 1))

    def test_label_count_enforced(self):
        with pytest.raises(InputError):
            AddressVector((1, 2, 3), ((1, 2),))  # needs C(3,2)=3 labels

    def test_label_lookup_lexicographic(self):
        x = AddressVector((1, 2, 4), ((7, 8, 9),))
        assert x.label(2, (1, 2)) == 7
        assert x.label(2, (1, 4)) == 8
        assert x.label(2, (2, 4)) == 9
        assert x.label(1, (2,)) == 2

    def test_truncate(self):
        x = AddressVector((1, 2, 3), ((1, 2, 1),))
        assert x.truncate(1) == AddressVector((1, 2, 3))
        assert x.truncate(2) == x

    def test_restrict_keeps_induced_labels(self):
        x = AddressVector((1, 2, 4), ((7, 8, 9),))
        y = x.restrict((1, 4), 2)
        assert y == AddressVector((1, 4), ((8,),))

    @given(addr_strategy())
    @settings(max_examples=60, deadline=None)
    def test_encode_decode_round_trip(self, x):
        assert AddressVector.decode(x.encode()) == x

    def test_decode_rejects_garbage(self):
        with pytest.raises(InputError):
            AddressVector.decode("1,2;x")


class TestRestrictionOrder:
    def test_reflexive(self):
        x = AddressVector((1, 3), ((2,),))
        assert leq(x, x)

    def test_restriction_is_below(self):
        x = AddressVector((1, 2, 4), ((7, 8, 9),))
        for S in itertools.combinations(x.x1, 2):
            assert leq(x.restrict(S, 2), x)

    def test_label_mismatch_not_below(self):
        x = AddressVector((1, 2), ((1,),))
        y = AddressVector((1, 2), ((2,),))
        assert not leq(y, x)

    @given(addr_strategy(), addr_strategy())
    @settings(max_examples=60, deadline=None)
    def test_antisymmetry(self, x, y):
        if leq(x, y) and leq(y, x):
            # same ground set and same labels on all shared levels up to
            # the smaller level_max; equality requires equal level_max
            assert set(x.x1) == set(y.x1)

    def test_restrictions_count(self):
        x = AddressVector((1, 2, 5), ((1, 2, 1),))
        out = restrictions(x, 2, 3)
        assert len(out) == comb(3, 2)
        assert all(leq(y, x) for y in out)

    def test_restrictions_truncation_level(self):
        x = AddressVector((1, 2, 5), ((1, 2, 1),))
        out = restrictions(x, 2, 2)
        assert all(y.level_max == 1 for y in out)

    def test_identity_restriction(self):
        x = AddressVector((1, 2, 5), ((1, 2, 1),))
        (y,) = restrictions(x, 3, 2)
        assert y == x.truncate(1)

    def test_oversize_rejected(self):
        with pytest.raises(InputError):
            restrictions(AddressVector((1, 2)), 3, 2)


class TestAddressSpace:
    @pytest.mark.parametrize(
        "ell,j_max,a",
        [(2, 1, (4,)), (3, 2, (4, 2)), (2, 1, (3, 2)), (3, 2, (5, 3)), (4, 3, (5, 2, 2))],
    )
    def test_enumeration_matches_size_formula(self, ell, j_max, a):
        space = address_space(ell, j_max, a)
        assert len(space) == address_space_size(ell, j_max, a)
        assert len(set(space)) == len(space)

    def test_ell_above_a1_empty(self):
        assert address_space(5, 1, (4,)) == []

    def test_size_bound(self):
        # |A(j+1, j, a)| <= T^(2^(j+1) - 1) with T = max a
        for a in [(4, 2), (3, 3), (5, 2, 2)]:
            T = max(a)
            for j in range(1, len(a)):
                assert address_space_size(j + 1, j, a) <= T ** (2 ** (j + 1) - 1)
