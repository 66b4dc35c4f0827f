"""
Dehn-Thurston coordinates of integral multi-curves relative to a pants decomposition.

A point is a pair of vectors (m, t): intersection numbers with the pants
curves and twisting numbers around them. Integral points form a semigroup
cut out by two conditions: a zero intersection number forces a
non-negative twist, and the intersection numbers around every pair of
pants add up to an even number.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .asymptotics import require_hyperbolic, surface_exponent
from .exceptions import DomainError, InvalidPantsError

logger = logging.getLogger(__name__)

PUNCTURE = -1


@dataclass(frozen=True)
class PantsDecomposition:
    """Pairs of pants as 3-slot tuples of curve indices; -1 marks a puncture."""
    g: int
    n: int
    regions: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(tuple(r) for r in self.regions))
        try:
            require_hyperbolic(self.g, self.n)
        except DomainError as e:
            raise InvalidPantsError(str(e), g=self.g, n=self.n)
        if self.n_curves < 1:
            raise InvalidPantsError(f"S_{{{self.g},{self.n}}} has no pants curves", g=self.g, n=self.n)
        expected_regions = 2 * self.g - 2 + self.n
        if len(self.regions) != expected_regions:
            raise InvalidPantsError(
                f"Expected {expected_regions} pairs of pants, got {len(self.regions)}", g=self.g, n=self.n
            )
        if any(len(region) != 3 for region in self.regions):
            raise InvalidPantsError("Every pair of pants has exactly three slots", g=self.g, n=self.n)

        slots = [s for region in self.regions for s in region]
        if slots.count(PUNCTURE) != self.n:
            raise InvalidPantsError(
                f"Expected {self.n} puncture slots, got {slots.count(PUNCTURE)}", g=self.g, n=self.n
            )
        for curve in range(self.n_curves):
            if slots.count(curve) != 2:
                raise InvalidPantsError(
                    f"Curve {curve} appears in {slots.count(curve)} slots, expected 2", g=self.g, n=self.n
                )
        stray = sorted({s for s in slots if s != PUNCTURE and not 0 <= s < self.n_curves})
        if stray:
            raise InvalidPantsError(f"Unknown curve indices {stray}", g=self.g, n=self.n)
        if not self._is_connected():
            raise InvalidPantsError("The pants graph is not connected", g=self.g, n=self.n)

    @property
    def n_curves(self) -> int:
        return 3 * self.g - 3 + self.n

    def _is_connected(self) -> bool:
        owners: Dict[int, list[int]] = {}
        for r, region in enumerate(self.regions):
            for s in region:
                if s != PUNCTURE:
                    owners.setdefault(s, []).append(r)
        reached = {0}
        frontier = [0]
        while frontier:
            r = frontier.pop()
            for s in self.regions[r]:
                for other in owners.get(s, ()):
                    if other not in reached:
                        reached.add(other)
                        frontier.append(other)
        return len(reached) == len(self.regions)

    def multiplicity(self, region: int, curve: int) -> int:
        return self.regions[region].count(curve)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'PantsDecomposition':
        try:
            regions = tuple(
                tuple(PUNCTURE if s is None else int(s) for s in region) for region in data["regions"]
            )
            return cls(g=int(data["g"]), n=int(data["n"]), regions=regions)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidPantsError(f"Malformed pants description: {e}") from e

    def to_dict(self) -> Dict[str, Any]:
        return {"g": self.g, "n": self.n, "regions": [list(r) for r in self.regions]}


def standard_pants(g: int, n: int) -> PantsDecomposition:
    """A chain of pairs of pants; free cuffs take the punctures first, the rest close up in pairs."""
    require_hyperbolic(g, n)
    n_regions = 2 * g - 2 + n
    if 3 * g - 3 + n < 1:
        raise DomainError(f"S_{{{g},{n}}} has no pants decomposition with curves", g=g, n=n)

    regions: list[list[Optional[int]]] = []
    free: list[tuple[int, int]] = []
    for k in range(n_regions):
        region: list[Optional[int]] = []
        if k > 0:
            region.append(k - 1)
        if k < n_regions - 1:
            region.append(k)
        while len(region) < 3:
            free.append((k, len(region)))
            region.append(None)
        regions.append(region)

    next_curve = n_regions - 1
    for index, (k, position) in enumerate(free):
        if index < n:
            regions[k][position] = PUNCTURE
        elif (index - n) % 2 == 0:
            regions[k][position] = next_curve
        else:
            regions[k][position] = next_curve
            next_curve += 1
    return PantsDecomposition(g=g, n=n, regions=tuple(tuple(r) for r in regions))


@dataclass(frozen=True)
class DTPoint:
    m: tuple[int, ...]
    t: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(self.m))
        object.__setattr__(self, "t", tuple(self.t))
        if len(self.m) != len(self.t):
            raise ValueError(f"Intersection and twist vectors differ in length ({len(self.m)} vs {len(self.t)})")

    def __add__(self, other: 'DTPoint') -> 'DTPoint':
        return DTPoint(
            tuple(a + b for a, b in zip(self.m, other.m)),
            tuple(a + b for a, b in zip(self.t, other.t)),
        )

    def twisted(self, curve: int) -> 'DTPoint':
        """Full twist around one pants curve: t_i -> t_i + m_i."""
        t = list(self.t)
        t[curve] += self.m[curve]
        return DTPoint(self.m, tuple(t))


def semigroup_contains(p: DTPoint, pd: PantsDecomposition) -> bool:
    if len(p.m) != pd.n_curves:
        raise ValueError(f"Point has {len(p.m)} coordinates, the decomposition has {pd.n_curves} curves")
    if any(m < 0 for m in p.m):
        return False
    if any(m == 0 and t < 0 for m, t in zip(p.m, p.t)):
        return False
    return all(sum(p.m[s] for s in region if s != PUNCTURE) % 2 == 0 for region in pd.regions)


def _parity_masks(pd: PantsDecomposition) -> list[int]:
    """Bit r of entry i is set when curve i meets region r an odd number of times."""
    masks = [0] * pd.n_curves
    for r, region in enumerate(pd.regions):
        for curve in range(pd.n_curves):
            if region.count(curve) % 2:
                masks[curve] |= 1 << r
    return masks


def count_IL(pd: PantsDecomposition, L: int) -> int:
    """Number of points with m_i > 0, 0 <= t_i < m_i, sum m_i <= L in the semigroup.

    Each admissible m contributes prod m_i twist choices. The sum over m runs
    as a dynamic program over (partial sum, region parities), using running
    sums by parity so each curve costs O(L) per parity state.
    """
    if L <= 0:
        return 0
    masks = _parity_masks(pd)
    states = 1 << len(pd.regions)
    # table[mask][s]: weighted count of partial vectors with sum s and parities mask
    table = [[0] * (L + 1) for _ in range(states)]
    table[0][0] = 1
    for mask_i in masks:
        new = [[0] * (L + 1) for _ in range(states)]
        for mask in range(states):
            row = table[mask]
            if not any(row):
                continue
            # running sums of row[s] and s*row[s] over s of each parity, s < t
            acc = [0, 0]
            acc_s = [0, 0]
            for t in range(1, L + 1):
                s = t - 1
                acc[s & 1] += row[s]
                acc_s[s & 1] += s * row[s]
                # m = t - s odd: s has the other parity than t
                odd = t * acc[(t + 1) & 1] - acc_s[(t + 1) & 1]
                # m even >= 2: s has the parity of t and s <= t - 2 (s = t - 1 has other parity)
                even = t * acc[t & 1] - acc_s[t & 1]
                if odd:
                    new[mask ^ mask_i][t] += odd
                if even:
                    new[mask][t] += even
        table = new
    return sum(table[0])


def count_IL_direct(pd: PantsDecomposition, L: int) -> int:
    """Direct summation over all m-vectors; exponential in the number of curves."""
    total = 0
    for m in product(range(1, L + 1), repeat=pd.n_curves):
        if sum(m) > L:
            continue
        if all(sum(m[s] for s in region if s != PUNCTURE) % 2 == 0 for region in pd.regions):
            weight = 1
            for value in m:
                weight *= value
            total += weight
    return total


def _gf2_rank(rows: Sequence[int]) -> int:
    rank = 0
    rows = [r for r in rows if r]
    while rows:
        pivot = max(rows)
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows if r != pivot]
        rows = [r for r in rows if r]
        rank += 1
    return rank


def semigroup_index(pd: PantsDecomposition) -> int:
    """Index of the integral semigroup in Z^(2 Np): 2 to the rank of the region parity system."""
    rows = []
    for region in pd.regions:
        row = 0
        for curve in range(pd.n_curves):
            if region.count(curve) % 2:
                row |= 1 << curve
        rows.append(row)
    index = 2 ** _gf2_rank(rows)
    logger.debug(f"Semigroup index {index} for pants of S_{{{pd.g},{pd.n}}}")
    return index


def leb_A1(n_curves: int) -> Fraction:
    """Lebesgue measure of {0 <= y_i < x_i, sum x_i <= 1}: 1/(2 Np)!."""
    if n_curves < 1:
        raise DomainError("The number of pants curves must be positive")
    return Fraction(1, factorial(2 * n_curves))


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int


def leb_A1_monte_carlo(
    n_curves: int, samples: int = 1_000_000, seed: Optional[int] = None, chunk: int = 100_000
) -> MonteCarloEstimate:
    """Estimate Leb(A_1) as vol(simplex) * E[prod x_i] with x uniform on the simplex."""
    if n_curves < 1 or samples < 1:
        raise DomainError("Monte Carlo needs a positive number of curves and samples")
    rng = np.random.default_rng(seed)
    simplex_volume = 1.0 / factorial(n_curves)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    while remaining:
        size = min(chunk, remaining)
        points = rng.dirichlet(np.ones(n_curves + 1), size=size)[:, :n_curves]
        values = np.prod(points, axis=1)
        total += float(values.sum())
        total_sq += float((values ** 2).sum())
        remaining -= size
    mean = total / samples
    variance = max(total_sq / samples - mean ** 2, 0.0)
    return MonteCarloEstimate(
        mean=simplex_volume * mean,
        stderr=simplex_volume * (variance / samples) ** 0.5,
        samples=samples,
    )


def volume_limit_check(pd: PantsDecomposition, L: int) -> tuple[Fraction, Fraction]:
    """(count_IL / L^(2 Np), Leb(A_1) / index) for trend comparison."""
    if L < 1:
        raise DomainError("L must be positive")
    ratio = Fraction(count_IL(pd, L), L ** (2 * pd.n_curves))
    return ratio, leb_A1(pd.n_curves) / semigroup_index(pd)


def _check_stab_index(stab_index: int) -> None:
    if stab_index < 1:
        raise DomainError(f"Stabilizer index must be a positive integer, got {stab_index}")


def pants_frequency(pd: PantsDecomposition, stab_index: int) -> Fraction:
    """c(P) = Leb(A_1) / [Stab(P) : Stab_*(P)]."""
    _check_stab_index(stab_index)
    return leb_A1(pd.n_curves) / stab_index


def pants_thurston_volume(pd: PantsDecomposition, stab_index: int) -> Fraction:
    """Thurston measure of the unit ball around P in the quotient by Stab_*(P)."""
    _check_stab_index(stab_index)
    return leb_A1(pd.n_curves) / (stab_index * 2 ** surface_exponent(pd.g, pd.n))
