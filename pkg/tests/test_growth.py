import math

import pytest

from groupwalk.errors import InvalidParameterError, NotGeneratingError
from groupwalk.groups import (
    canonical_generators,
    generator_set,
    make_cyclic,
    make_heisenberg,
    make_product,
)
from groupwalk.growth import check_moderate_growth, growth_profile, minimal_A


def bfs_ball_oracle(group, members):
    """Independent pure-python ball growth for generating sets containing id."""
    seen = {group.id_index}
    frontier = [group.id_index]
    volumes = []
    while len(seen) < group.order:
        nxt = []
        for a in frontier:
            for s in members:
                b = group.op(a, s)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
        volumes.append(len(seen))
    return volumes


def product_set_oracle(group, members):
    current = set(members)
    volumes = [len(current)]
    while volumes[-1] < group.order:
        current = {group.op(a, s) for a in current for s in members}
        volumes.append(len(current))
        if len(volumes) > 4 * group.order:
            raise AssertionError("oracle ran away")
    return volumes


@pytest.mark.parametrize("n", range(2, 41))
def test_cycle_diameter_is_half_n(n):
    g = make_cyclic(n)
    prof = growth_profile(g, canonical_generators(g))
    assert prof.diameter == n // 2


def test_z10_profile_matches_oracle():
    g = make_cyclic(10)
    gens = canonical_generators(g)
    prof = growth_profile(g, gens)
    assert prof.diameter == 5
    assert list(prof.volumes) == bfs_ball_oracle(g, gens.members)


def test_sqrt_jump_cycle_diameter():
    n = 9
    g = make_cyclic(n)
    r = int(math.isqrt(n))
    gens = generator_set(g, {0, 1, n - 1, r, n - r})
    prof = growth_profile(g, gens)
    assert list(prof.volumes) == bfs_ball_oracle(g, gens.members)
    assert prof.diameter == 2


@pytest.mark.parametrize("n", [9, 25, 100, 625, 2500])
def test_sqrt_jump_diameter_scaling_band(n):
    g = make_cyclic(n)
    r = int(math.isqrt(n))
    gens = generator_set(g, {0, 1 % n, (n - 1) % n, r % n, (n - r) % n})
    rho = growth_profile(g, gens).diameter
    assert 0.25 <= rho / math.sqrt(n) <= 4.0


def test_heisenberg_3_diameter_bracket():
    g = make_heisenberg(3)
    prof = growth_profile(g, canonical_generators(g))
    assert 2 <= prof.diameter <= 5


def test_product_diameter_is_sum_of_factor_diameters():
    cases = [
        [make_cyclic(3), make_cyclic(5)],
        [make_cyclic(5), make_cyclic(7)],
        [make_heisenberg(3), make_cyclic(4)],
    ]
    for factors in cases:
        rho_sum = sum(
            growth_profile(f, canonical_generators(f)).diameter for f in factors)
        p = make_product(factors)
        prof = growth_profile(p, canonical_generators(p))
        assert prof.diameter == rho_sum


def test_volumes_non_decreasing_and_v1_is_set_size():
    for group in [make_cyclic(17), make_heisenberg(4)]:
        gens = canonical_generators(group)
        prof = growth_profile(group, gens)
        assert prof.volumes[0] == len(gens.members)
        assert all(a <= b for a, b in zip(prof.volumes, prof.volumes[1:]))
        assert prof.volumes[-1] == group.order
        assert all(v < group.order for v in prof.volumes[:-1])


def test_product_sets_without_identity():
    g = make_cyclic(5)
    gens = generator_set(g, {1, 4})
    prof = growth_profile(g, gens)
    assert list(prof.volumes) == product_set_oracle(g, (1, 4))
    assert prof.diameter == 4


def test_periodic_product_sets_rejected():
    g = make_cyclic(2)
    gens = generator_set(g, {1})  # generates as a subgroup, but E^m alternates
    with pytest.raises(NotGeneratingError):
        growth_profile(g, gens)


def test_trivial_group_rejected():
    g = make_cyclic(1)
    with pytest.raises(InvalidParameterError):
        growth_profile(g, canonical_generators(g))


class TestModerateGrowth:
    def test_cycle_has_1_1_growth(self):
        g = make_cyclic(10)
        prof = growth_profile(g, canonical_generators(g))
        assert check_moderate_growth(prof, 1.0, 1.0).satisfied

    def test_heisenberg_has_48_3_growth(self):
        g = make_heisenberg(3)
        prof = growth_profile(g, canonical_generators(g))
        assert check_moderate_growth(prof, 48.0, 3.0).satisfied

    def test_huge_A_is_vacuous(self):
        g = make_heisenberg(4)
        prof = growth_profile(g, canonical_generators(g))
        assert check_moderate_growth(prof, 1e9, 7.0).satisfied

    def test_invalid_parameters(self):
        g = make_cyclic(6)
        prof = growth_profile(g, canonical_generators(g))
        with pytest.raises(InvalidParameterError):
            check_moderate_growth(prof, 0.0, 1.0)
        with pytest.raises(InvalidParameterError):
            minimal_A(prof, -1.0)

    @pytest.mark.parametrize("builder,d,ceiling", [
        (lambda: make_cyclic(10), 1.0, 1.0),
        (lambda: make_heisenberg(4), 3.0, 48.0),
    ])
    def test_minimal_A_tight(self, builder, d, ceiling):
        g = builder()
        prof = growth_profile(g, canonical_generators(g))
        a_min = minimal_A(prof, d)
        assert a_min <= ceiling + 1e-12
        assert check_moderate_growth(prof, a_min, d).satisfied
        assert not check_moderate_growth(prof, a_min * (1.0 - 1e-9), d).satisfied

    def test_sqrt_jump_cycle_d2(self):
        # order-sqrt(n) jumps give quadratic-type growth
        n = 49
        g = make_cyclic(n)
        gens = generator_set(g, {0, 1, n - 1, 7, n - 7})
        prof = growth_profile(g, gens)
        assert check_moderate_growth(prof, minimal_A(prof, 2.0), 2.0).satisfied
