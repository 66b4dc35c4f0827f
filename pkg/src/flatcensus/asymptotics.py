"""
Closed-form asymptotic constants for counts of square-tiled surfaces.

Constants are exact rationals times a power of pi and, where the Masur-Veech
constant b_{g,n} enters, a power of the symbol ``b``. Nothing here evaluates
b_{g,n} numerically; the census provides empirical estimates instead.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import comb, factorial
from typing import TYPE_CHECKING, Dict, Optional

import sympy

from .curve_type import CurveKind, simple_curve_type
from .exceptions import DomainError

if TYPE_CHECKING:
    from .census.models import CountTable

logger = logging.getLogger(__name__)

B_SYMBOL = sympy.Symbol("b_gn", positive=True)


class Provenance(str, Enum):
    EXACT = "exact"
    EMPIRICAL = "empirical"
    SYMBOLIC_IN_B = "symbolic-in-b"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AsymConstant:
    """rational * pi**pi_power * b**b_power"""
    rational: Fraction
    pi_power: int = 0
    provenance: Provenance = Provenance.EXACT
    b_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "rational", Fraction(self.rational))
        if self.b_power and self.provenance == Provenance.EXACT:
            object.__setattr__(self, "provenance", Provenance.SYMBOLIC_IN_B)
        if not self.b_power and self.provenance == Provenance.SYMBOLIC_IN_B:
            raise ValueError("A constant without a b factor cannot be symbolic in b")

    @staticmethod
    def _combined(a: 'AsymConstant', b: 'AsymConstant', b_power: int) -> Provenance:
        if Provenance.EMPIRICAL in (a.provenance, b.provenance):
            return Provenance.EMPIRICAL
        return Provenance.SYMBOLIC_IN_B if b_power else Provenance.EXACT

    def __mul__(self, other: 'AsymConstant | Fraction | int') -> 'AsymConstant':
        if not isinstance(other, AsymConstant):
            return AsymConstant(self.rational * other, self.pi_power, self.provenance, self.b_power)
        b_power = self.b_power + other.b_power
        return AsymConstant(
            rational=self.rational * other.rational,
            pi_power=self.pi_power + other.pi_power,
            provenance=self._combined(self, other, b_power),
            b_power=b_power,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: 'AsymConstant | Fraction | int') -> 'AsymConstant':
        if not isinstance(other, AsymConstant):
            return AsymConstant(self.rational / other, self.pi_power, self.provenance, self.b_power)
        b_power = self.b_power - other.b_power
        return AsymConstant(
            rational=self.rational / other.rational,
            pi_power=self.pi_power - other.pi_power,
            provenance=self._combined(self, other, b_power),
            b_power=b_power,
        )

    def as_sympy(self) -> sympy.Expr:
        value = sympy.Rational(self.rational.numerator, self.rational.denominator)
        return value * sympy.pi ** self.pi_power * B_SYMBOL ** self.b_power

    def __float__(self) -> float:
        if self.b_power:
            raise ValueError("A constant symbolic in b has no numeric value")
        return float(self.as_sympy().evalf(17))

    def to_dict(self, name: Optional[str] = None) -> dict:
        data = {
            "rational_num": self.rational.numerator,
            "rational_den": self.rational.denominator,
            "pi_power": self.pi_power,
            "b_power": self.b_power,
            "provenance": self.provenance.value,
        }
        return {"name": name, **data} if name is not None else data


def _exact(value: Fraction | int) -> AsymConstant:
    return AsymConstant(Fraction(value))


def require_hyperbolic(g: int, n: int) -> None:
    if g < 0 or n < 0 or 2 - 2 * g - n >= 0:
        raise DomainError(f"Surface class (g={g}, n={n}) is not hyperbolic: need 2 - 2g - n < 0", g=g, n=n)


def surface_exponent(g: int, n: int) -> int:
    """2g - 3 + n, the power of two relating the Thurston measure normalizations."""
    require_hyperbolic(g, n)
    return 2 * g - 3 + n


def lattice_dimension(g: int, n: int) -> int:
    """6g - 6 + 2n, the growth exponent of s(gamma, *, L)."""
    require_hyperbolic(g, n)
    return 6 * g - 6 + 2 * n


# --- frequencies of simple closed curves ---------------------------------------

GENUS2_SEPARATING = Fraction(1, 27648)
GENUS2_NONSEPARATING = Fraction(1, 576)


def freq_genus2(kind: CurveKind | str) -> AsymConstant:
    if isinstance(kind, str):
        kind = CurveKind.from_string(kind)
    return _exact(GENUS2_SEPARATING if kind == CurveKind.SEPARATING else GENUS2_NONSEPARATING)


def freq_genus2_ratio() -> AsymConstant:
    return freq_genus2(CurveKind.SEPARATING) / freq_genus2(CurveKind.NONSEPARATING)


def genus2_pair_ratio() -> AsymConstant:
    ratio = freq_genus2_ratio()
    return ratio * ratio


def _check_genus0(n: int, i: int, allow_symmetric: bool = False) -> None:
    if n < 4 or not (2 <= i <= n - 2) or (2 * i == n and not allow_symmetric):
        raise DomainError(f"Genus-0 split i={i} is outside 2 <= i <= n-2, 2i != n for n={n}", g=0, n=n)


def freq_genus0(n: int, i: int) -> AsymConstant:
    """Frequency of a curve cutting S_{0,n} into disks with i and n-i punctures."""
    _check_genus0(n, i)
    denominator = 2 ** (n - 4) * factorial(i - 2) * factorial(n - i - 2) * (2 * n - 6)
    return _exact(Fraction(1, denominator))


def freq_genus0_ratio(n: int, i: int, j: int) -> Fraction:
    _check_genus0(n, i, allow_symmetric=True)
    _check_genus0(n, j, allow_symmetric=True)
    return Fraction(comb(n - 4, i - 2), comb(n - 4, j - 2))


def _check_genusg(g: int, i: int) -> None:
    if g < 2 or not (1 <= i <= g - 1):
        raise DomainError(f"Genus split i={i} is outside 1 <= i <= g-1 for g={g}", g=g, n=0)


def freq_genusg_split(g: int, i: int) -> AsymConstant:
    """Frequency of a curve cutting S_{g,0} into pieces of genus i and g-i.

    The symmetric split 2i = g counts twice, which recovers the genus-2
    separating constant.
    """
    _check_genusg(g, i)
    denominator = (
        2 ** (3 * g - 2) * 24 ** g * factorial(i) * factorial(g - i)
        * factorial(3 * i - 2) * factorial(3 * (g - i) - 2) * (6 * g - 6)
    )
    value = Fraction(1, denominator)
    if 2 * i == g:
        value *= 2
    return _exact(value)


def freq_genusg_ratio(g: int, i: int, j: int) -> Fraction:
    """Binomial form of freq(g, i) / freq(g, j), before symmetric-split doubling."""
    _check_genusg(g, i)
    _check_genusg(g, j)
    return Fraction(comb(g, i) * comb(3 * g - 4, 3 * i - 2), comb(g, j) * comb(3 * g - 4, 3 * j - 2))


# --- limit constants ---------------------------------------------------------

def b_symbol() -> AsymConstant:
    return AsymConstant(Fraction(1), b_power=1)


def thm12_constant(c: AsymConstant, g: int, n: int) -> AsymConstant:
    """Limit of s(gamma, *, L) / L^(6g-6+2n): c / 2^(2g-3+n)."""
    return c / 2 ** surface_exponent(g, n)


def thm11_constant(c1: AsymConstant, c2: AsymConstant, g: int, n: int) -> AsymConstant:
    """Limit of s(gamma1, gamma2, L) / L^(6g-6+2n): c1 c2 / (2^(2g-3+n) b)."""
    return c1 * c2 / 2 ** surface_exponent(g, n) / b_symbol()


def mgn_from_b(g: int, n: int) -> AsymConstant:
    """m_{g,n} = b_{g,n} / 2^(2g-3+n)."""
    return b_symbol() / 2 ** surface_exponent(g, n)


def thm14_constant(
    c1: AsymConstant, c2: AsymConstant, g: int, n: int, m: Optional[AsymConstant] = None
) -> AsymConstant:
    """c1 c2 / (2^(4g-6+2n) m); ``m`` defaults to its expression through b."""
    if m is None:
        m = mgn_from_b(g, n)
    return c1 * c2 / 2 ** (2 * surface_exponent(g, n)) / m


def epsilon(g: int, n: int) -> int:
    """Order of the subgroup of the mapping class group fixing every simple closed curve."""
    require_hyperbolic(g, n)
    if (g, n) == (0, 4):
        return 4
    if (g, n) in ((1, 1), (1, 2), (2, 0)):
        return 2
    return 1


def r_const(g: int, n: int) -> AsymConstant:
    return _exact(Fraction(1, 2 ** surface_exponent(g, n)))


def nu_scaling(g: int, n: int) -> AsymConstant:
    return _exact(2 ** surface_exponent(g, n))


# --- named predictions ---------------------------------------------------------

@dataclass(frozen=True)
class ComparisonTarget:
    """A limit to compare against census data.

    ``numerator`` and ``denominator`` are (h_type, v_type) keys with ``None``
    meaning any type; ratio targets set ``denominator``. Single-type targets
    divide by L**exponent, by default L**(6g-6+2n).
    """
    name: str
    constant: AsymConstant
    numerator: tuple[Optional[str], Optional[str]]
    denominator: Optional[tuple[Optional[str], Optional[str]]] = None
    exponent: Optional[int] = None

    @property
    def is_ratio(self) -> bool:
        return self.denominator is not None


def _split_keys(g: int, n: int) -> Dict[int, str]:
    if g == 0:
        splits = [i for i in range(2, n - 1) if 2 * i != n]
        return {i: simple_curve_type(g, n, CurveKind.SEPARATING, marked_split=i).key for i in splits}
    if n == 0 and g >= 3:
        return {i: simple_curve_type(g, n, CurveKind.SEPARATING, genus_split=i).key for i in range(1, g // 2 + 1)}
    return {}


def _split_frequency(g: int, n: int, i: int) -> AsymConstant:
    return freq_genus0(n, i) if g == 0 else freq_genusg_split(g, i)


def predictions(g: int, n: int) -> Dict[str, AsymConstant]:
    """All named closed-form predictions available for S_{g,n}."""
    require_hyperbolic(g, n)
    result: Dict[str, AsymConstant] = {}
    if (g, n) == (2, 0):
        sep, nonsep = freq_genus2(CurveKind.SEPARATING), freq_genus2(CurveKind.NONSEPARATING)
        result["freq-sep"] = sep
        result["freq-nonsep"] = nonsep
        result["ratio-sep-nonsep"] = freq_genus2_ratio()
        result["ratio-sep2-nonsep2"] = genus2_pair_ratio()
        result["thm12-sep"] = thm12_constant(sep, g, n)
        result["thm12-nonsep"] = thm12_constant(nonsep, g, n)
    for i in _split_keys(g, n):
        frequency = _split_frequency(g, n, i)
        result[f"freq-split-{i}"] = frequency
        result[f"thm12-split-{i}"] = thm12_constant(frequency, g, n)
    result["epsilon"] = _exact(epsilon(g, n))
    result["r"] = r_const(g, n)
    result["nu"] = nu_scaling(g, n)
    result["mgn"] = mgn_from_b(g, n)
    return result


def comparison_targets(g: int, n: int) -> list[ComparisonTarget]:
    """Predictions that census buckets can be checked against."""
    available = predictions(g, n)
    targets = []
    if (g, n) == (2, 0):
        sep = simple_curve_type(g, n, CurveKind.SEPARATING, genus_split=1).key
        nonsep = simple_curve_type(g, n, CurveKind.NONSEPARATING).key
        targets += [
            ComparisonTarget("thm12-sep", available["thm12-sep"], (sep, None)),
            ComparisonTarget("thm12-nonsep", available["thm12-nonsep"], (nonsep, None)),
            ComparisonTarget("ratio-sep-nonsep", available["ratio-sep-nonsep"], (sep, None), (nonsep, None)),
            ComparisonTarget("ratio-sep2-nonsep2", available["ratio-sep2-nonsep2"], (sep, sep), (nonsep, nonsep)),
        ]
    for i, key in _split_keys(g, n).items():
        targets.append(ComparisonTarget(f"thm12-split-{i}", available[f"thm12-split-{i}"], (key, None)))
    targets.append(ComparisonTarget("mgn", available["mgn"], (None, None), exponent=2 * lattice_dimension(g, n)))
    return targets


@dataclass(frozen=True)
class ComparisonRow:
    L: int
    name: str
    empirical: Optional[Fraction]
    predicted: AsymConstant

    @property
    def ratio(self) -> Optional[float]:
        """empirical / predicted, when both are numeric and non-zero."""
        if self.empirical is None or self.predicted.b_power or self.predicted.rational == 0:
            return None
        return float(self.empirical) / float(self.predicted)


def _bucket_sum(ct: 'CountTable', L: int, key: tuple[Optional[str], Optional[str]]) -> Fraction:
    h_key, v_key = key
    return sum(
        (
            w for (area, h, v), w in ct.counts.items()
            if area <= L and (h_key is None or h == h_key) and (v_key is None or v == v_key)
        ),
        Fraction(0),
    )


def compare_report(ct: 'CountTable', targets: Optional[list[ComparisonTarget]] = None) -> list[ComparisonRow]:
    """Empirical values per completed area next to their predicted limits.

    Single-type targets are normalized by a power of L; ratio targets compare
    two bucket sums directly, so b_{g,n} never enters.
    """
    if targets is None:
        targets = comparison_targets(ct.g, ct.n)
    rows = []
    if ct.complete_area < 1:
        return rows
    dimension = lattice_dimension(ct.g, ct.n)
    for L in range(1, ct.complete_area + 1):
        for target in targets:
            numerator = _bucket_sum(ct, L, target.numerator)
            if target.is_ratio:
                denominator = _bucket_sum(ct, L, target.denominator)
                empirical = numerator / denominator if denominator else None
            else:
                exponent = dimension if target.exponent is None else target.exponent
                empirical = numerator / Fraction(L) ** exponent
            rows.append(ComparisonRow(L=L, name=target.name, empirical=empirical, predicted=target.constant))
    logger.debug(f"Comparison report with {len(rows)} rows for (g={ct.g}, n={ct.n})")
    return rows
