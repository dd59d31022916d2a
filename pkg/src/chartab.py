"""Complex character table of PSL_2(F_p) for p = 3 (mod 4).

Six families of irreducible characters: U (trivial), V (Steinberg, degree p),
W[k] (principal series, degree p+1), chi_phi[l] (discrete series, degree p-1)
and the two half-discrete characters chi' and chi'' of degree (p-1)/2.

Several entries of the classical printed table are ambiguous. Each one is
kept as a named reading in ``resolutions``; the printed reading is tried
first and replaced by the corrected one when orthogonality fails.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src import config
from src.cache import JsonCache
from src.errors import (
    CharacterIndexError,
    DegenerateTableError,
    ModulusMismatchError,
    UnsupportedCongruenceError,
)
from src.ffield import check_odd_prime, discrete_log, prime_field
from src.formats import complex_pair, pair_complex, write_csv
from src.metrics import CHARTAB_BUILD_SECONDS, LAST_ORTHOGONALITY_DEFECT
from src.psl2 import ClassKind, ConjClassLabel, PSL2Elem, class_labels, classify_conjugacy, eigenvalue

logger = logging.getLogger(__name__)

PRINTED = "printed"
CORRECTED = "corrected"

# ambiguous entries, in the order they are decided
AMBIGUOUS_ENTRIES = ("W.split", "V.order_two", "chi_phi.order_two", "chi_psi.order_two", "unipotent.uv")


@dataclass(frozen=True)
class Character:
    family: str  # U | V | W | chi_phi | chi_prime | chi_dprime
    degree: int
    values: Tuple[complex, ...]
    index: Optional[int] = None

    @property
    def name(self) -> str:
        return self.family if self.index is None else f"{self.family}[{self.index}]"


@dataclass(frozen=True)
class CharacterTable:
    p: int
    classes: Tuple[ConjClassLabel, ...]
    chars: Tuple[Character, ...]
    tolerance: float = 1e-9
    resolutions: Dict[str, str] = field(default_factory=dict, compare=False)

    @property
    def group_order(self) -> int:
        return sum(c.size for c in self.classes)

    def matrix(self) -> np.ndarray:
        return np.array([ch.values for ch in self.chars], dtype=complex)


# --- Building ---

def _unit_cos(num: int, den: int) -> float:
    return math.cos(2 * math.pi * num / den)


def _rows(p: int, classes: Sequence[ConjClassLabel], readings: Dict[str, str]) -> List[Character]:
    field_ = prime_field(p)
    half_deg = (p - 1) // 2
    root_p = math.sqrt(p) if readings["unipotent.uv"] == CORRECTED else float(p)
    u = complex(-0.5, root_p / 2)
    v = u.conjugate()

    # discrete logs of class eigenvalues: base g on F_p*, base gamma on C
    logs: List[Optional[int]] = []
    for label in classes:
        ev = eigenvalue(label)
        logs.append(None if ev is None else discrete_log(ev, field_))
    # the trace-zero class has eigenvalue i = gamma^((p+1)/4) in C
    i_log = (p + 1) // 4

    def row(values_by_kind) -> Tuple[complex, ...]:
        return tuple(complex(values_by_kind(label, j)) for label, j in zip(classes, logs))

    chars: List[Character] = [Character("U", 1, tuple(1 + 0j for _ in classes))]

    v_order_two = 1 if readings["V.order_two"] == PRINTED else -1

    def steinberg(label, j):
        return {
            ClassKind.IDENTITY: p,
            ClassKind.UNIPOTENT_1: 0,
            ClassKind.UNIPOTENT_EPS: 0,
            ClassKind.SPLIT: 1,
            ClassKind.NONSPLIT: -1,
            ClassKind.ORDER_TWO: v_order_two,
        }[label.kind]

    chars.append(Character("V", p, row(steinberg)))

    w_scale = 0.5 if readings["W.split"] == PRINTED else 1.0
    for k in range(2, half_deg, 2):
        def principal(label, j, k=k):
            if label.kind is ClassKind.IDENTITY:
                return p + 1
            if label.kind in (ClassKind.UNIPOTENT_1, ClassKind.UNIPOTENT_EPS):
                return 1
            if label.kind is ClassKind.SPLIT:
                return w_scale * 2 * _unit_cos(k * j, p - 1)
            return 0
        chars.append(Character("W", p + 1, row(principal), index=k))

    for l in range(2, (p + 1) // 2, 2):
        def discrete(label, j, l=l):
            if label.kind is ClassKind.IDENTITY:
                return p - 1
            if label.kind in (ClassKind.UNIPOTENT_1, ClassKind.UNIPOTENT_EPS):
                return -1
            if label.kind is ClassKind.SPLIT:
                return 0
            if label.kind is ClassKind.NONSPLIT:
                return -2 * _unit_cos(l * j, p + 1)
            if readings["chi_phi.order_two"] == PRINTED:
                return -2  # phi(-1) = 1 for characters trivial on -1
            return -2 * _unit_cos(l * i_log, p + 1)
        chars.append(Character("chi_phi", p - 1, row(discrete), index=l))

    psi_order_two = -1 if readings["chi_psi.order_two"] == PRINTED else -((-1) ** i_log)
    for family, at_one, at_eps in (("chi_prime", u, v), ("chi_dprime", v, u)):
        def half_discrete(label, j, at_one=at_one, at_eps=at_eps):
            if label.kind is ClassKind.IDENTITY:
                return half_deg
            if label.kind is ClassKind.UNIPOTENT_1:
                return at_one
            if label.kind is ClassKind.UNIPOTENT_EPS:
                return at_eps
            if label.kind is ClassKind.SPLIT:
                return 0
            if label.kind is ClassKind.NONSPLIT:
                return -((-1) ** j)
            return psi_order_two
        chars.append(Character(family, half_deg, row(half_discrete)))
    return chars


def _defect_of(p: int, classes, chars, tolerance: float) -> float:
    return orthogonality_defect(CharacterTable(p, tuple(classes), tuple(chars), tolerance))


def build_character_table(p: int, tolerance: Optional[float] = None) -> CharacterTable:
    p = check_odd_prime(p)
    if p % 4 != 3:
        raise UnsupportedCongruenceError(f"p={p} is not 3 mod 4")
    if p < 7:
        raise DegenerateTableError(f"p={p} is too small for the generic table")
    tol = config.CHARTAB_TOLERANCE if tolerance is None else tolerance

    with CHARTAB_BUILD_SECONDS.time():
        classes = class_labels(p)
        readings = {name: CORRECTED for name in AMBIGUOUS_ENTRIES}
        for name in AMBIGUOUS_ENTRIES:
            trial = dict(readings, **{name: PRINTED})
            defect = _defect_of(p, classes, _rows(p, classes, trial), tol)
            if defect <= tol:
                readings = trial
            else:
                logger.warning(
                    "p=%d: printed reading of %s fails orthogonality (defect %.3g), using corrected value",
                    p, name, defect,
                )
        table = CharacterTable(p, classes, tuple(_rows(p, classes, readings)), tol, dict(readings))
        defect = orthogonality_defect(table)
    LAST_ORTHOGONALITY_DEFECT.set(defect)
    if defect > tol:
        raise DegenerateTableError(f"p={p}: orthogonality defect {defect:.3g} above tolerance {tol:g}")
    logger.info("Character table for PSL2(F_%d): %d characters, defect %.2e", p, len(table.chars), defect)
    return table


# --- Evaluation ---

def class_index(table: CharacterTable, g: PSL2Elem) -> int:
    if g.p != table.p:
        raise ModulusMismatchError(f"element mod {g.p} evaluated on table for p={table.p}", module="chartab")
    label = classify_conjugacy(g)
    for i, c in enumerate(table.classes):
        if c == label:
            return i
    raise CharacterIndexError(f"class {label} not in table")  # pragma: no cover


def char_value(table: CharacterTable, index: int, g: PSL2Elem) -> complex:
    if not 0 <= index < len(table.chars):
        raise CharacterIndexError(f"character index {index} out of range 0..{len(table.chars) - 1}")
    return table.chars[index].values[class_index(table, g)]


def orthogonality_defect(table: CharacterTable) -> float:
    """Max deviation in the row and column orthogonality relations."""
    sizes = np.array([c.size for c in table.classes], dtype=float)
    weights = np.sqrt(sizes / sizes.sum())
    y = table.matrix() * weights  # unitary iff both relations hold
    rows = y @ y.conj().T
    cols = y.conj().T @ y
    defect = max(
        np.abs(rows - np.eye(rows.shape[0])).max(),
        np.abs(cols - np.eye(cols.shape[0])).max(),
    )
    return float(defect)


# --- Export ---

def _class_to_json(label: ConjClassLabel) -> dict:
    param = label.parameter
    return {
        "kind": label.kind.value,
        "param": list(param) if isinstance(param, tuple) else param,
        "size": label.size,
    }


def _class_from_json(item: dict, p: int) -> ConjClassLabel:
    param = item.get("param")
    if isinstance(param, list):
        param = tuple(param)
    return ConjClassLabel(ClassKind(item["kind"]), param, int(item["size"]), p)


def table_to_json(table: CharacterTable) -> dict:
    return {
        "p": table.p,
        "tolerance": table.tolerance,
        "resolutions": dict(table.resolutions),
        "classes": [_class_to_json(c) for c in table.classes],
        "characters": [
            {
                "family": ch.family,
                "index": ch.index,
                "degree": ch.degree,
                "values": [complex_pair(z) for z in ch.values],
            }
            for ch in table.chars
        ],
    }


def table_from_json(data: dict) -> CharacterTable:
    p = int(data["p"])
    classes = tuple(_class_from_json(c, p) for c in data["classes"])
    chars = tuple(
        Character(
            family=ch["family"],
            degree=int(ch["degree"]),
            values=tuple(pair_complex(v) for v in ch["values"]),
            index=ch.get("index"),
        )
        for ch in data["characters"]
    )
    if any(len(ch.values) != len(classes) for ch in chars):
        raise DegenerateTableError("character rows do not match the class list")
    return CharacterTable(
        p, classes, chars, float(data.get("tolerance", config.CHARTAB_TOLERANCE)), dict(data.get("resolutions", {}))
    )


def table_to_csv(table: CharacterTable) -> str:
    header = ["character", "degree"] + [str(c) for c in table.classes]
    rows = [
        [ch.name, ch.degree] + [f"{z.real:.12g}{z.imag:+.12g}j" for z in ch.values]
        for ch in table.chars
    ]
    return write_csv(header, rows)


def load_or_build_table(p: int, cache: Optional[JsonCache] = None) -> CharacterTable:
    """Cached build; a cached table reproduces the built one entry for entry."""
    cache = cache if cache is not None else JsonCache()
    cached = cache.get("chartab", p)
    if cached is not None:
        try:
            return table_from_json(cached)
        except (KeyError, TypeError, ValueError, DegenerateTableError) as e:
            logger.warning(f"Кэш таблицы p={p} не читается, пересчитываем: {e}")
    table = build_character_table(p)
    cache.put("chartab", p, table_to_json(table))
    return table
