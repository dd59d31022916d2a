"""Word growth: Cayley-graph BFS for finite groups, generating families,
rational growth series of the polygon Fuchsian groups, and the comparison
between the two.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src import config
from src.errors import GrowthInputError, ResourceLimitError, SearchExhaustedError
from src.formats import write_csv
from src.metrics import BFS_NODES_VISITED
from src.psl2 import element_order, standard_generators
from src.signatures import EpimorphismWitness, Signature, find_epimorphism

logger = logging.getLogger(__name__)


# --- Finite groups ---

@dataclass(frozen=True)
class CyclicElem:
    """Residue mod n under addition, multiplicative notation."""
    value: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise GrowthInputError(f"cyclic group order must be >= 1, got {self.n}")
        object.__setattr__(self, "value", self.value % self.n)

    def __mul__(self, other: "CyclicElem") -> "CyclicElem":
        if other.n != self.n:
            raise GrowthInputError(f"Z_{self.n} and Z_{other.n} elements do not mix")
        return CyclicElem(self.value + other.value, self.n)

    def inverse(self) -> "CyclicElem":
        return CyclicElem(-self.value, self.n)


@dataclass(frozen=True)
class GrowthTable:
    spheres: Tuple[int, ...]
    balls: Tuple[int, ...]
    saturated_at: Optional[int] = None

    @classmethod
    def from_spheres(cls, spheres: Sequence[int], saturated_at: Optional[int] = None) -> "GrowthTable":
        balls, total = [], 0
        for a in spheres:
            total += a
            balls.append(total)
        return cls(tuple(spheres), tuple(balls), saturated_at)

    @classmethod
    def from_balls(cls, balls: Sequence[int], saturated_at: Optional[int] = None) -> "GrowthTable":
        spheres = [balls[0]] + [balls[k] - balls[k - 1] for k in range(1, len(balls))]
        return cls(tuple(spheres), tuple(balls), saturated_at)

    @property
    def nmax(self) -> int:
        return len(self.balls) - 1


def cayley_growth(gens: Sequence, nmax: int, budget: Optional[int] = None) -> GrowthTable:
    """Sphere and ball sizes of the Cayley graph over S u S^-1, radius <= nmax.

    Elements only need ``__mul__``, ``inverse()`` and hashing. After
    saturation the table is padded so balls are defined through ``nmax``.
    """
    gens = list(gens)
    if not gens:
        raise GrowthInputError("empty generator list")
    if nmax < 0:
        raise GrowthInputError(f"nmax must be >= 0, got {nmax}")
    budget = config.BFS_NODE_BUDGET if budget is None else budget
    steps = list(dict.fromkeys(s for g in gens for s in (g, g.inverse())))
    identity = gens[0] * gens[0].inverse()

    seen = {identity}
    frontier = [identity]
    spheres = [1]
    saturated_at = None
    for k in range(1, nmax + 1):
        nxt = []
        for x in frontier:
            for s in steps:
                y = x * s
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        if len(seen) > budget:
            raise ResourceLimitError(f"Cayley BFS exceeded node budget {budget}", module="growth")
        if not nxt:
            saturated_at = k - 1
            spheres += [0] * (nmax - k + 1)
            break
        spheres.append(len(nxt))
        frontier = nxt
    else:
        # ball may already be the whole group at radius nmax
        if all(x * s in seen for x in frontier for s in steps):
            saturated_at = nmax
    BFS_NODES_VISITED.labels(kind="cayley").inc(len(seen))
    if saturated_at is not None:
        logger.info("Cayley BFS saturated at radius %d with %d elements", saturated_at, len(seen))
    return GrowthTable.from_spheres(spheres, saturated_at)


def family_growth(tables: Sequence[GrowthTable], nmax: int) -> GrowthTable:
    """Pointwise maximum of the balls through nmax."""
    if not tables:
        raise GrowthInputError("empty family")
    short = [t.nmax for t in tables if t.nmax < nmax]
    if short:
        raise GrowthInputError(f"inconsistent nmax: member tables stop at {short}, need {nmax}")
    balls = [max(t.balls[k] for t in tables) for k in range(nmax + 1)]
    saturated = [t.saturated_at for t in tables]
    saturated_at = max(saturated) if all(s is not None for s in saturated) else None
    return GrowthTable.from_balls(balls, saturated_at)


def cyclic_family_growth(pairs: Iterable[Tuple[int, int]], variant: str, nmax: int) -> GrowthTable:
    """Family Z_{p q}: one generator, or x of order p with y of order q."""
    pairs = list(pairs)
    if nmax < 1:
        raise GrowthInputError(f"nmax must be >= 1, got {nmax}")
    if variant not in ("one-gen", "two-gen"):
        raise GrowthInputError(f"unknown variant {variant!r}")
    tables = []
    for p, q in pairs:
        if math.gcd(p, q) != 1:
            raise GrowthInputError(f"pair ({p}, {q}) is not coprime")
        n = p * q
        if variant == "one-gen":
            gens = [CyclicElem(1, n)]
        else:
            gens = [CyclicElem(q, n), CyclicElem(p, n)]
        tables.append(cayley_growth(gens, nmax))
    return family_growth(tables, nmax)


@dataclass(frozen=True)
class ExponentFit:
    exponent: float
    window: Tuple[int, int]


def exponent_fit(table: GrowthTable) -> ExponentFit:
    """Polynomial growth degree from a log-log fit of the spheres.

    Uses radii 1..K where K is the last radius before the sphere sizes first
    decrease (or vanish). Ball exponent = sphere exponent + 1.
    """
    a = table.spheres
    end = 1
    while end + 1 < len(a) and a[end + 1] >= a[end] and a[end + 1] > 0:
        end += 1
    if end < 2 or a[1] == 0:
        raise GrowthInputError("unsaturated window too short for a fit")
    k = np.arange(1, end + 1, dtype=float)
    slope, _ = np.polyfit(np.log(k), np.log(np.array(a[1:end + 1], dtype=float)), 1)
    return ExponentFit(float(slope) + 1.0, (1, end))


@dataclass
class FamilySweep:
    family: GrowthTable
    tables: Dict[int, GrowthTable] = field(default_factory=dict)


def family_sweep(p_list: Sequence[int], nmax: int) -> FamilySweep:
    """PSL_2(F_p) family with generators S, T for every p."""
    if not p_list:
        raise GrowthInputError("empty prime list")
    tables = {p: cayley_growth(standard_generators(p), nmax) for p in p_list}
    for p, t in tables.items():
        logger.info("p=%d: ball(%d) = %d, saturated at %s", p, nmax, t.balls[-1], t.saturated_at)
    return FamilySweep(family_growth(list(tables.values()), nmax), tables)


# --- Rational growth series ---

@dataclass(frozen=True)
class RationalSeries:
    numerator: Tuple[int, ...]
    denominator: Tuple[int, ...]

    def __post_init__(self):
        if not self.denominator or self.denominator[0] != 1:
            raise GrowthInputError("denominator must have constant term 1")


def polygon_series(n: int, variant: str) -> RationalSeries:
    """Growth function of the 4n-gon group: cone3 -> (n; 3), smooth -> (n; -)."""
    if n < 1:
        raise GrowthInputError(f"polygon parameter must be >= 1, got {n}")
    if variant == "cone3":
        m = 6 * n
    elif variant == "smooth":
        if n < 2:
            raise GrowthInputError("smooth polygon needs n >= 2 (n = 1 is not hyperbolic)")
        m = 2 * n
    else:
        raise GrowthInputError(f"unknown variant {variant!r}")
    numerator = (1,) + (2,) * (m - 1) + (1,)
    denominator = (1,) + (2 - 4 * n,) * (m - 1) + (1,)
    return RationalSeries(numerator, denominator)


def series_coeffs(s: RationalSeries, N: int) -> List[int]:
    """a_0..a_N of numerator/denominator, by the linear recurrence."""
    num, den = s.numerator, s.denominator
    a: List[int] = []
    for k in range(N + 1):
        value = num[k] if k < len(num) else 0
        for j in range(1, min(k, len(den) - 1) + 1):
            value -= den[j] * a[k - j]
        a.append(value)
    return a


@dataclass(frozen=True)
class GrowthRate:
    lam: float
    dominant_root_check: float
    agrees: bool
    exponential: bool


def _largest_real_root(coeffs: Sequence[int]) -> float:
    c = np.array(coeffs, dtype=float)
    bound = 1.0 + float(np.max(np.abs(c[1:]))) / abs(c[0])
    grid = np.linspace(bound, 0.0, 4096)
    values = np.polyval(c, grid)
    signs = np.sign(values)
    change = np.nonzero(signs[1:] != signs[:-1])[0]
    if not len(change):
        return float("nan")
    hi, lo = grid[change[0]], grid[change[0] + 1]
    f_hi = np.polyval(c, hi)
    for _ in range(200):
        mid = (lo + hi) / 2
        f_mid = np.polyval(c, mid)
        if np.sign(f_mid) == np.sign(f_hi):
            hi, f_hi = mid, f_mid
        else:
            lo = mid
    return float((lo + hi) / 2)


def growth_rate(s: RationalSeries, N: Optional[int] = None) -> GrowthRate:
    """Ratio a_N / a_{N-1} against the largest real root of the reciprocal denominator."""
    N = config.GROWTH_RATE_TERMS if N is None else N
    if N < 2:
        raise GrowthInputError(f"need N >= 2, got {N}")
    a = series_coeffs(s, N)
    lam = float(Fraction(a[N], a[N - 1])) if a[N - 1] else float("nan")
    # reciprocal polynomial z^m den(1/z), highest degree first, is den itself
    root = _largest_real_root(s.denominator)
    agrees = bool(abs(lam - root) <= 1e-6 * abs(root)) if root == root else False
    if lam <= 1:
        logger.warning("series is not exponential: ratio %.6g", lam)
    return GrowthRate(lam, root, agrees, lam > 1)


# --- Quotients against the Fuchsian group ---

@dataclass
class ComparisonRow:
    k: int
    gamma_p: int
    gamma_fuchsian: int

    @property
    def equal(self) -> bool:
        return self.gamma_p == self.gamma_fuchsian


@dataclass
class Comparison:
    p: int
    signature: Signature
    rows: List[ComparisonRow]
    witness: Optional[EpimorphismWitness] = None
    inconclusive: bool = False

    @property
    def inequality_holds(self) -> bool:
        return all(r.gamma_p <= r.gamma_fuchsian for r in self.rows)

    @property
    def equality_depth(self) -> int:
        """Largest k with equality at every radius up to k (-1 if none)."""
        depth = -1
        for r in self.rows:
            if not r.equal:
                break
            depth = r.k
        return depth

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "signature": self.signature.text(),
            "inconclusive": self.inconclusive,
            "rows": [
                {"k": r.k, "gamma_p": r.gamma_p, "gamma_gamma": r.gamma_fuchsian, "equal": r.equal}
                for r in self.rows
            ],
            "inequality_holds": self.inequality_holds,
            "equality_depth": self.equality_depth,
        }


def _polygon_for(sig: Signature) -> RationalSeries:
    if sig.periods == (3,) and sig.h >= 1:
        return polygon_series(sig.h, "cone3")
    if not sig.periods and sig.h >= 2:
        return polygon_series(sig.h, "smooth")
    raise GrowthInputError(f"no polygon growth series for {sig}; expected (n; 3) or (n; -)")


def _ball_one_intact(w: EpimorphismWitness) -> bool:
    gens = w.hyperbolic
    radius_one = {x for g in gens for x in (g, g.inverse())}
    return len(radius_one) == 2 * len(gens) and all(element_order(g) > 2 for g in gens)


def compare_quotient_vs_fuchsian(
    p: int,
    sig: Signature,
    nmax: int,
    seed: int = 0,
    budget: Optional[int] = None,
    attempts: int = 20,
) -> Comparison:
    """Growth of PSL_2(F_p) w.r.t. the images of A_i, B_i against the polygon group."""
    series = _polygon_for(sig)
    witness = None
    try:
        for offset in range(attempts):
            candidate = find_epimorphism(sig, p, budget=budget, seed=seed + offset)
            if _ball_one_intact(candidate):
                witness = candidate
                break
            logger.debug("seed %d: images collapse the radius-one ball, retrying", seed + offset)
    except SearchExhaustedError as e:
        logger.warning("comparison for %s at p=%d is inconclusive: %s", sig, p, e)
    if witness is None:
        return Comparison(p, sig, [], None, inconclusive=True)

    quotient = cayley_growth(witness.hyperbolic, nmax)
    fuchsian = series_coeffs(series, nmax)
    rows, total = [], 0
    for k in range(nmax + 1):
        total += fuchsian[k]
        rows.append(ComparisonRow(k, quotient.balls[k], total))
    report = Comparison(p, sig, rows, witness)
    if not report.inequality_holds:
        logger.error("quotient ball exceeds Fuchsian ball for %s at p=%d", sig, p)
    logger.info("p=%d %s: equality through radius %d", p, sig, report.equality_depth)
    return report


# --- Export ---

def growth_table_to_csv(table: GrowthTable) -> str:
    return write_csv(["k", "sphere", "ball"], ((k, a, b) for k, (a, b) in enumerate(zip(table.spheres, table.balls))))


def growth_table_to_json(table: GrowthTable) -> dict:
    return {"spheres": list(table.spheres), "balls": list(table.balls), "saturated_at": table.saturated_at}


def growth_table_from_json(data: dict) -> GrowthTable:
    return GrowthTable(tuple(data["spheres"]), tuple(data["balls"]), data.get("saturated_at"))
