"""Signatures of PSL_2(F_p)-actions on surfaces, p = 3 (mod 4).

Deciders (``admissible``, ``key_lemma_check``) work in exact rationals.
Existence is backed by ``find_epimorphism``, a seeded rejection-sampling
search for a surface-kernel epimorphism whose output is always re-verified.
A failed search only means the budget ran out.
"""
from __future__ import annotations

import enum
import logging
import random
from collections import Counter as TallyCounter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import divisors, isprime
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from src import config
from src.chartab import CharacterTable, build_character_table, class_index
from src.errors import (
    ConditionViolatedError,
    MissingPeriodError,
    NoFuchsianGroupError,
    NotAdmissibleError,
    NumericInstabilityError,
    ResourceLimitError,
    SearchExhaustedError,
    SignatureFormatError,
    UnsupportedCongruenceError,
    UnsupportedPeriodError,
)
from src.ffield import check_odd_prime
from src.formats import format_matrix, format_signature_text, parse_matrix, parse_signature_text
from src.metrics import EPI_SAMPLES_TOTAL
from src.psl2 import (
    ConjClassLabel,
    PSL2Elem,
    class_representative,
    classify_conjugacy,
    commutator,
    conjugacy_class,
    element_order,
    elements_by_order,
    enumerate_group,
    generates_group,
    group_order,
    inverse,
)

logger = logging.getLogger(__name__)


# --- Signatures ---

@dataclass(frozen=True)
class Signature:
    h: int
    periods: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.h < 0:
            raise SignatureFormatError(f"orbit genus must be >= 0, got {self.h}")
        if any(m < 2 for m in self.periods):
            raise SignatureFormatError(f"periods must be >= 2, got {list(self.periods)}")
        object.__setattr__(self, "periods", tuple(sorted(int(m) for m in self.periods)))

    @property
    def r(self) -> int:
        return len(self.periods)

    def text(self) -> str:
        return format_signature_text(self.h, self.periods)

    def __str__(self) -> str:
        return f"({self.h}; {','.join(map(str, self.periods)) if self.periods else '-'})"


def parse_signature(text: str) -> Signature:
    h, periods = parse_signature_text(text)
    return Signature(h, periods)


def _require_congruence(p: int) -> int:
    p = check_odd_prime(p)
    if p % 4 != 3:
        raise UnsupportedCongruenceError(f"p={p} is not 3 mod 4", module="signatures")
    return p


# --- Period alphabet ---

class PeriodRole(str, enum.Enum):
    TWO = "2"
    THREE = "3"
    FOUR = "4"
    FIVE = "5"
    D = "d"
    HALF_MINUS = "(p-1)/2"
    HALF_PLUS = "(p+1)/2"
    P = "p"


def d_value(p: int) -> Optional[int]:
    """Least e >= 7 dividing (p-1)/2 or (p+1)/2, or None."""
    candidates = [e for n in ((p - 1) // 2, (p + 1) // 2) for e in divisors(n) if e >= 7]
    return min(candidates) if candidates else None


@dataclass(frozen=True)
class PeriodAlphabet:
    p: int
    entries: Dict[PeriodRole, int]  # role -> integer, first role wins on collisions
    d: Optional[int]

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.entries.values())))

    def role_of(self, m: int) -> PeriodRole:
        for role, value in self.entries.items():
            if value == m:
                return role
        raise UnsupportedPeriodError(f"period {m} is not an element order of PSL2(F_{self.p})")


def period_alphabet(p: int) -> PeriodAlphabet:
    p = check_odd_prime(p)
    lo, hi = (p - 1) // 2, (p + 1) // 2
    d = d_value(p)
    candidates = [
        (PeriodRole.TWO, 2),
        (PeriodRole.THREE, 3),
        (PeriodRole.FOUR, 4 if lo % 4 == 0 or hi % 4 == 0 else None),
        (PeriodRole.FIVE, 5 if lo % 5 == 0 or hi % 5 == 0 else None),
        (PeriodRole.D, d),
        (PeriodRole.HALF_MINUS, lo),
        (PeriodRole.HALF_PLUS, hi),
        (PeriodRole.P, p),
    ]
    entries: Dict[PeriodRole, int] = {}
    taken = set()
    for role, value in candidates:
        if value is None or value < 2 or value in taken:
            continue
        entries[role] = value
        taken.add(value)
    return PeriodAlphabet(p, entries, d)


def multiplicities(sig: Signature, p: int) -> Dict[PeriodRole, int]:
    alphabet = period_alphabet(p)
    counts = {role: 0 for role in PeriodRole}
    for m in sig.periods:
        counts[alphabet.role_of(m)] += 1
    return counts


# --- Riemann-Hurwitz ---

def period_sum(sig: Signature) -> Fraction:
    return sum((1 - Fraction(1, m) for m in sig.periods), Fraction(0))


def hyperbolic_area(sig: Signature) -> Fraction:
    """2h - 2 + sum(1 - 1/m), in units of 2*pi."""
    return 2 * sig.h - 2 + period_sum(sig)


def rh_genus(sig: Signature, p: int) -> Fraction:
    n = group_order(p)
    return 1 + n * (sig.h - 1) + Fraction(n, 2) * period_sum(sig)


@dataclass(frozen=True)
class Decision:
    ok: bool
    reason: str

    def __bool__(self) -> bool:
        return self.ok


def admissible(sig: Signature, p: int) -> Decision:
    p = _require_congruence(p)
    alphabet = period_alphabet(p)
    for m in sig.periods:
        alphabet.role_of(m)

    genus = rh_genus(sig, p)
    if sig.h >= 2:
        ok, reason = True, "h >= 2"
    elif sig.h == 1:
        ok = sig.r >= 1
        reason = "h = 1 with periods" if ok else "h = 1 needs at least one period"
    else:
        s = period_sum(sig)
        ok = s >= 2
        reason = f"h = 0, sum(1-1/m) = {s} {'>=' if ok else '<'} 2"
    if genus.denominator != 1 or genus < 0:
        return Decision(False, f"{reason}; genus {genus} is not a nonnegative integer")
    return Decision(ok, f"{reason}; genus {genus}")


# --- Key lemma ---

@dataclass(frozen=True)
class KeyLemmaResult:
    ineq1: bool
    ineq2: bool
    applicable: bool
    lhs1: Fraction
    lhs2: Fraction

    @property
    def holds(self) -> bool:
        return self.ineq1 or self.ineq2


def key_lemma_applicable(p: int) -> bool:
    d = d_value(p)
    return p >= 13 and p % 5 in (1, 4) and p % 8 not in (1, 7) and d is not None and d >= 15


def key_lemma_check(sig: Signature, p: int) -> KeyLemmaResult:
    """Both unified inequalities evaluated term by term as displayed."""
    p = _require_congruence(p)
    a = multiplicities(sig, p)
    d = d_value(p)
    R = PeriodRole
    tail = (
        a[R.HALF_MINUS] * Fraction(p - 3, p - 1)
        + a[R.HALF_PLUS] * Fraction(p - 1, p + 1)
        + a[R.P] * Fraction(p - 1, p)
    )
    lhs1 = (
        2 * (sig.h - 1)
        + Fraction(a[R.TWO] - 1, 2)
        + Fraction(2 * a[R.THREE] - 1, 3)
        + Fraction(3 * a[R.FOUR], 4)
        + Fraction(4 * a[R.FIVE], 5)
        + tail
    )
    bracket = (
        Fraction(a[R.TWO], 2)
        + Fraction(2 * a[R.THREE], 3)
        + Fraction(3 * a[R.FOUR], 4)
        + Fraction(4 * a[R.FIVE], 5)
        + tail
    )
    if d is not None:
        lhs1 += Fraction((d - 1) * a[R.D] + 1, d)
        bracket += Fraction((d - 1) * a[R.D], d)
    lhs2 = 20 * (sig.h - 1) + 10 * bracket
    return KeyLemmaResult(lhs1 >= 0, lhs2 >= 1, key_lemma_applicable(p), lhs1, lhs2)


# --- Extension principle ---

def extend_signature(sig: Signature, m: int, p: Optional[int] = None) -> Signature:
    if m not in sig.periods:
        raise MissingPeriodError(f"period {m} does not occur in {sig}")
    if m != 2 and not (m % 2 == 1 and isprime(m)):
        raise ConditionViolatedError(f"{m} is neither 2 nor an odd prime")
    extended = Signature(sig.h, sig.periods + (m,))
    if p is not None:
        if group_order(p) % m:
            raise ConditionViolatedError(f"{m} does not divide |PSL2(F_{p})|")
        genus = rh_genus(extended, p)
        if genus.denominator != 1:
            raise ConditionViolatedError(f"genus of {extended} is {genus}, not an integer")
    return extended


# --- Class products ---

@dataclass(frozen=True)
class ClassProductCount:
    count: int
    char_sum: complex

    @property
    def nonvanishing(self) -> bool:
        return abs(self.char_sum) > config.NONVANISH_THRESHOLD


def class_product_count(
    p: int, class_x: ConjClassLabel, g: PSL2Elem, table: Optional[CharacterTable] = None
) -> ClassProductCount:
    """#{(u, v) : u in Cl(X), v in Cl(X)^-1, uv = g} from the character table."""
    table = table if table is not None else build_character_table(p)
    x_col = class_index(table, class_representative(class_x, p))
    g_col = class_index(table, g)
    char_sum = sum(
        abs(ch.values[x_col]) ** 2 * ch.values[g_col].conjugate() / ch.degree for ch in table.chars
    )
    size = table.classes[x_col].size
    exact = size * size / table.group_order * char_sum
    count = round(exact.real)
    residue = abs(exact - count)
    if residue > config.ROUNDING_RESIDUE:
        raise NumericInstabilityError(f"class product count {exact} is {residue:.2e} away from an integer")
    return ClassProductCount(int(count), complex(char_sum))


def class_product_bruteforce(
    p: int, class_x: ConjClassLabel, g: PSL2Elem, elements: Optional[Sequence[PSL2Elem]] = None
) -> int:
    elements = elements if elements is not None else enumerate_group(p)
    cl = conjugacy_class(class_representative(class_x, p), elements)
    cl_inv = {inverse(u) for u in cl}
    return sum(1 for u in cl if inverse(u) * g in cl_inv)


@dataclass(frozen=True)
class CommutatorEvidence:
    x_class: ConjClassLabel
    g_class: ConjClassLabel
    char_sum: complex
    count: int


def commutator_evidence(m: int, p: int, table: Optional[CharacterTable] = None) -> List[CommutatorEvidence]:
    """For each class g of order m and each class X: does g = [x, h] with x in Cl(X)?"""
    table = table if table is not None else build_character_table(p)
    out: List[CommutatorEvidence] = []
    for g_label in table.classes:
        g = class_representative(g_label, p)
        if element_order(g) != m:
            continue
        for x_label in table.classes:
            res = class_product_count(p, x_label, g, table)
            out.append(CommutatorEvidence(x_label, g_label, res.char_sum, res.count))
    return out


# --- Epimorphisms ---

@dataclass(frozen=True)
class EpimorphismWitness:
    signature: Signature
    images: Tuple[PSL2Elem, ...]
    seed: int
    p: int
    stream: int = field(default=0, compare=False)

    @property
    def hyperbolic(self) -> Tuple[PSL2Elem, ...]:
        return self.images[: 2 * self.signature.h]

    @property
    def elliptic(self) -> Tuple[PSL2Elem, ...]:
        return self.images[2 * self.signature.h:]


def relation_product(images: Sequence[PSL2Elem], h: int, p: int) -> PSL2Elem:
    prod = PSL2Elem.identity(p)
    for i in range(h):
        prod = prod * commutator(images[2 * i], images[2 * i + 1])
    for c in images[2 * h:]:
        prod = prod * c
    return prod


def verify_epimorphism(w: EpimorphismWitness, p: Optional[int] = None) -> Decision:
    p = p if p is not None else w.p
    sig = w.signature
    if len(w.images) != 2 * sig.h + sig.r:
        return Decision(False, f"shape mismatch: {len(w.images)} images for {sig}")
    if any(g.p != p for g in w.images):
        return Decision(False, "modulus mismatch")
    for j, (c, m) in enumerate(zip(w.elliptic, sig.periods), start=1):
        if element_order(c) != m:
            return Decision(False, f"order mismatch: C{j} has order {element_order(c)}, expected {m}")
    if not relation_product(w.images, sig.h, p).is_identity():
        return Decision(False, "product relation fails")
    if not generates_group(w.images, p):
        return Decision(False, "proper subgroup: images do not generate PSL2")
    return Decision(True, "ok")


def _search_stream(sig: Signature, p: int, budget: int, rng: random.Random) -> Tuple[PSL2Elem, ...]:
    pools = elements_by_order(p)
    everything = [g for pool in pools.values() for g in pool]
    for m in sig.periods:
        if m not in pools:
            raise UnsupportedPeriodError(f"no elements of order {m} in PSL2(F_{p})")
    h = sig.h

    for _ in range(budget):
        if sig.r >= 1:
            hyper = [rng.choice(everything) for _ in range(2 * h)]
            cs = [rng.choice(pools[m]) for m in sig.periods[:-1]]
            prefix = relation_product(hyper + cs, h, p)
            last = inverse(prefix)
            if element_order(last) != sig.periods[-1]:
                EPI_SAMPLES_TOTAL.labels(outcome="order").inc()
                continue
            images = tuple(hyper + cs + [last])
        else:
            # last commutator solved: need B with B a^-1 B^-1 = a^-1 q, a = A_h
            hyper = [rng.choice(everything) for _ in range(2 * h - 1)]
            q = inverse(relation_product(hyper[:-1], h - 1, p))
            a_inv = inverse(hyper[-1])
            target = a_inv * q
            if classify_conjugacy(target) != classify_conjugacy(a_inv):
                EPI_SAMPLES_TOTAL.labels(outcome="order").inc()
                continue
            solutions = [b for b in everything if b * a_inv * inverse(b) == target]
            images = tuple(hyper + [rng.choice(solutions)])
        if not generates_group(images, p):
            EPI_SAMPLES_TOTAL.labels(outcome="generation").inc()
            continue
        EPI_SAMPLES_TOTAL.labels(outcome="accepted").inc()
        return images
    raise SearchExhaustedError(f"no epimorphism for {sig} within {budget} samples")


def find_epimorphism(
    sig: Signature, p: int, budget: Optional[int] = None, seed: int = 0, streams: Optional[int] = None
) -> EpimorphismWitness:
    p = _require_congruence(p)
    area = hyperbolic_area(sig)
    if area <= 0:
        raise NoFuchsianGroupError(f"{sig} has hyperbolic area {area} <= 0")
    decision = admissible(sig, p)
    if not decision:
        raise NotAdmissibleError(f"{sig} is not admissible for p={p}: {decision.reason}")

    budget = config.EPI_SAMPLE_BUDGET if budget is None else budget
    streams = config.EPI_STREAMS if streams is None else max(1, streams)
    per_stream = max(1, budget // streams)
    stream_no = 0

    def attempt() -> EpimorphismWitness:
        nonlocal stream_no
        stream = stream_no
        stream_no += 1
        rng = random.Random(seed * 1_000_003 + stream)
        logger.debug("search %s p=%d: stream %d, %d samples", sig, p, stream, per_stream)
        images = _search_stream(sig, p, per_stream, rng)
        return EpimorphismWitness(sig, images, seed, p, stream)

    retrying = Retrying(
        stop=stop_after_attempt(streams),
        retry=retry_if_exception_type(SearchExhaustedError),
        reraise=True,
    )
    try:
        witness = retrying(attempt)
    except SearchExhaustedError:
        logger.warning("Поиск эпиморфизма для %s (p=%d) не дал результата: бюджет %d исчерпан", sig, p, budget)
        raise SearchExhaustedError(f"no epimorphism for {sig} within {budget} samples (inconclusive)")

    check = verify_epimorphism(witness, p)
    if not check:  # pragma: no cover
        raise SearchExhaustedError(f"search produced an invalid witness: {check.reason}")
    logger.info("Epimorphism for %s onto PSL2(F_%d) found in stream %d", sig, p, witness.stream)
    return witness


def split_branch_image(w: EpimorphismWitness, j: int, seed: int = 0, budget: Optional[int] = None) -> EpimorphismWitness:
    """Witness for the signature with period m_j doubled: C_j replaced by C_j1 * C_j2."""
    sig, p = w.signature, w.p
    if not 0 <= j < sig.r:
        raise MissingPeriodError(f"no branch point C{j + 1} in {sig}")
    m = sig.periods[j]
    extended = extend_signature(sig, m, p)
    cj = w.elliptic[j]
    pool = elements_by_order(p)[m]
    rng = random.Random(seed)
    budget = config.EPI_SAMPLE_BUDGET if budget is None else budget
    k = 2 * sig.h + j
    for _ in range(budget):
        first = rng.choice(pool)
        second = inverse(first) * cj
        if element_order(second) != m:
            continue
        images = w.images[:k] + (first, second) + w.images[k + 1:]
        witness = EpimorphismWitness(extended, images, seed, p)
        if verify_epimorphism(witness, p):
            return witness
    raise SearchExhaustedError(f"could not split C{j + 1} of {sig} within {budget} samples")


def genus_lift_witness(w: EpimorphismWitness, h: int) -> EpimorphismWitness:
    """(0; m1, m2, m3) witness -> (h; -) witness with A1 = C1, A2 = C2, all else trivial."""
    if w.signature.h != 0 or w.signature.r != 3:
        raise ConditionViolatedError(f"genus lift needs a triangle witness, got {w.signature}")
    if h < 2:
        raise ConditionViolatedError(f"genus lift needs h >= 2, got {h}")
    p = w.p
    e = PSL2Elem.identity(p)
    c1, c2, _ = w.elliptic
    images = [c1, e, c2, e] + [e] * (2 * h - 4)
    witness = EpimorphismWitness(Signature(h), tuple(images), w.seed, p)
    check = verify_epimorphism(witness, p)
    if not check:
        raise ConditionViolatedError(f"lifted witness fails: {check.reason}")
    return witness


def genus_one_generating_pairs(m: int, p: int, elements: Optional[Sequence[PSL2Elem]] = None) -> int:
    """Number of pairs (A, B) with [A, B] of order m generating PSL2(F_p).

    Exhaustive over G x G, so it decides (1; m) outright where the random
    search can only give up. Zero means no surface-kernel epimorphism exists.
    """
    p = _require_congruence(p)
    n = group_order(p)
    if n * n > config.PSL_ENUM_BUDGET:
        raise ResourceLimitError(f"{n}^2 pairs exceed budget {config.PSL_ENUM_BUDGET}", module="signatures")
    elements = elements if elements is not None else enumerate_group(p)
    count = 0
    for a in elements:
        for b in elements:
            if element_order(commutator(a, b)) == m and generates_group((a, b), p):
                count += 1
    logger.info("(1; %d) over PSL2(F_%d): %d generating pairs", m, p, count)
    return count


def witness_to_json(w: EpimorphismWitness) -> dict:
    return {
        "signature": w.signature.text(),
        "p": w.p,
        "seed": w.seed,
        "stream": w.stream,
        "images": [format_matrix(g) for g in w.images],
    }


def witness_from_json(data: dict) -> EpimorphismWitness:
    p = int(data["p"])
    return EpimorphismWitness(
        signature=parse_signature(data["signature"]),
        images=tuple(parse_matrix(s, p) for s in data["images"]),
        seed=int(data.get("seed", 0)),
        p=p,
        stream=int(data.get("stream", 0)),
    )


# --- Consistency of the unified inequalities with the case analysis ---

@dataclass
class ConsistencyReport:
    p: int
    samples: int
    seed: int
    applicable: bool
    table: Dict[Tuple[bool, bool], int]  # (admissible, key lemma) -> count
    per_h: Dict[int, Dict[str, int]]
    disagreements: List[Tuple[str, bool, bool]]

    @property
    def agreement(self) -> int:
        return self.table.get((True, True), 0) + self.table.get((False, False), 0)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "samples": self.samples,
            "seed": self.seed,
            "applicable": self.applicable,
            "agreement": self.agreement,
            "table": {f"admissible={a},key_lemma={k}": n for (a, k), n in sorted(self.table.items())},
            "per_h": {str(h): v for h, v in sorted(self.per_h.items())},
            "disagreements": [
                {"signature": s, "admissible": a, "key_lemma": k} for s, a, k in self.disagreements
            ],
        }


def consistency_report(p: int, samples: int = 1000, seed: int = 0, keep: int = 10) -> ConsistencyReport:
    p = _require_congruence(p)
    values = period_alphabet(p).values
    rng = random.Random(seed)
    table: TallyCounter = TallyCounter()
    per_h: Dict[int, Dict[str, int]] = {}
    disagreements: List[Tuple[str, bool, bool]] = []
    for _ in range(samples):
        h = rng.randint(0, 3)
        periods = tuple(rng.choice(values) for _ in range(rng.randint(0, 5)))
        sig = Signature(h, periods)
        adm = bool(admissible(sig, p))
        key = key_lemma_check(sig, p).holds
        table[(adm, key)] += 1
        bucket = per_h.setdefault(h, {"agree": 0, "disagree": 0})
        if adm == key:
            bucket["agree"] += 1
        else:
            bucket["disagree"] += 1
            if len(disagreements) < keep:
                disagreements.append((sig.text(), adm, key))
    report = ConsistencyReport(p, samples, seed, key_lemma_applicable(p), dict(table), per_h, disagreements)
    logger.info("Consistency p=%d: %d/%d agree", p, report.agreement, samples)
    return report
