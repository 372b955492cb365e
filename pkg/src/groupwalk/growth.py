"""Volume growth of Cayley graphs and moderate-growth certificates.

V(m) is the size of the m-fold product set E^m. When the generating set
contains the identity this equals the radius-m ball and is computed by BFS;
otherwise E^m is expanded exactly as iterated set products. The diameter is
the least m >= 1 with V(m) = |G|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NotGeneratingError
from .groups import GeneratorSet, GroupTable


@dataclass(frozen=True)
class GrowthProfile:
    volumes: tuple[int, ...]          # V(1), ..., V(rho)
    diameter: int
    group_order: int
    label: str = ""

    def volume(self, m: int) -> int:
        """V(m); constant |G| beyond the diameter."""
        if m < 1:
            raise InvalidParameterError("volume index starts at 1")
        return self.volumes[min(m, self.diameter) - 1]


@dataclass(frozen=True)
class ModerateGrowthCert:
    A: float
    d: float
    satisfied: bool


def growth_profile(group: GroupTable, gens: GeneratorSet) -> GrowthProfile:
    """Volume sequence and diameter of the Cayley graph (G, E)."""
    if group.order < 2:
        raise InvalidParameterError("growth profile needs |G| >= 2 (diameter undefined)")
    members = np.asarray(gens.members, dtype=np.int64)
    if group.id_index in gens.members:
        volumes = _ball_volumes(group, members)
    else:
        volumes = _product_set_volumes(group, members)
    return GrowthProfile(tuple(volumes), len(volumes), group.order, group.label)


def _ball_volumes(group: GroupTable, members: np.ndarray) -> list[int]:
    seen = np.zeros(group.order, dtype=bool)
    seen[group.id_index] = True
    frontier = np.array([group.id_index], dtype=np.int64)
    volumes = []
    count = 1
    while count < group.order:
        nxt = np.unique(np.concatenate([group.op(frontier, g) for g in members]))
        fresh = nxt[~seen[nxt]]
        if fresh.size == 0:
            raise NotGeneratingError(
                f"{group.label}: E*m stalls at {count} < {group.order} elements")
        seen[fresh] = True
        count += fresh.size
        frontier = fresh
        volumes.append(count)
    return volumes


def _product_set_volumes(group: GroupTable, members: np.ndarray) -> list[int]:
    # without id in E the sets E^m need not be nested, so expand them exactly
    current = np.unique(members)
    volumes = [int(current.size)]
    cap = 2 * group.order + 4
    while volumes[-1] < group.order:
        if len(volumes) > cap:
            raise NotGeneratingError(
                f"{group.label}: E^m never covers the group (periodic product sets)")
        current = np.unique(np.concatenate([group.op(current, g) for g in members]))
        volumes.append(int(current.size))
    return volumes


def check_moderate_growth(profile: GrowthProfile, A: float, d: float) -> ModerateGrowthCert:
    """Does V(m)/V(rho) >= (1/A)(m/rho)^d hold for every 1 <= m <= rho?"""
    if A <= 0 or d <= 0:
        raise InvalidParameterError("moderate growth needs A > 0 and d > 0")
    rho = profile.diameter
    v_rho = profile.volumes[-1]
    ok = all(
        profile.volumes[m - 1] / v_rho >= (m / rho) ** d / A
        for m in range(1, rho + 1)
    )
    return ModerateGrowthCert(A, d, ok)


def minimal_A(profile: GrowthProfile, d: float) -> float:
    """Smallest A for which the (A, d) certificate passes.

    Always >= 1 because the m = rho term contributes exactly 1.
    """
    if d <= 0:
        raise InvalidParameterError("moderate growth needs d > 0")
    rho = profile.diameter
    v_rho = profile.volumes[-1]
    return max((m / rho) ** d * v_rho / profile.volumes[m - 1] for m in range(1, rho + 1))
