"""Text formats: matrices, signatures, complex values and CSV tables."""
from __future__ import annotations

import csv
import io
import re
from typing import Iterable, List, Sequence, Tuple

from src.errors import InvalidModulusError, SignatureFormatError
from src.psl2 import PSL2Elem

_MATRIX_RE = re.compile(
    r"^\s*\[\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*,\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*\]\s*(?:mod\s+(\d+))?\s*$"
)


def format_matrix(g: PSL2Elem) -> str:
    return str(g)


def parse_matrix(text: str, p: int | None = None) -> PSL2Elem:
    """Parse "[[a,b],[c,d]] mod p"; the trailing modulus may be supplied as ``p`` instead."""
    m = _MATRIX_RE.match(text or "")
    if not m:
        raise InvalidModulusError(f"bad matrix literal {text!r}", module="psl2")
    a, b, c, d = (int(m.group(i)) for i in range(1, 5))
    modulus = int(m.group(5)) if m.group(5) else p
    if modulus is None:
        raise InvalidModulusError(f"no modulus in {text!r}", module="psl2")
    if p is not None and modulus != p:
        raise InvalidModulusError(f"matrix is mod {modulus}, expected mod {p}", module="psl2")
    return PSL2Elem.from_matrix(a, b, c, d, modulus)


def parse_signature_text(text: str) -> Tuple[int, Tuple[int, ...]]:
    """"h:m1,m2,..." or "h:-" -> (h, periods)."""
    if text is None or ":" not in text:
        raise SignatureFormatError(f"expected 'h:m1,m2,...', got {text!r}")
    head, _, tail = text.strip().partition(":")
    try:
        h = int(head.strip())
    except ValueError:
        raise SignatureFormatError(f"bad genus {head.strip()!r}")
    tail = tail.strip()
    if tail in ("-", ""):
        return h, ()
    try:
        periods = tuple(int(x.strip()) for x in tail.split(","))
    except ValueError:
        raise SignatureFormatError(f"bad period list {tail!r}")
    return h, periods


def format_signature_text(h: int, periods: Sequence[int]) -> str:
    return f"{h}:{','.join(str(m) for m in periods) if periods else '-'}"


def complex_pair(z: complex, digits: int = 12) -> List[float]:
    re_, im_ = round(z.real, digits), round(z.imag, digits)
    # no negative zeros in exported files
    return [re_ + 0.0, im_ + 0.0]


def pair_complex(pair: Sequence[float]) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def write_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
