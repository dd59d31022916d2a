"""PSL_2(F_p): elements, orders, enumeration, conjugacy classes, subgroup closure.

Elements are unit-determinant 2x2 matrices taken modulo +-I. Of the two matrices
m and -m exactly one is stored: the one whose first nonzero entry in the scan
order a, b, c, d lies in ``[1, (p-1)/2]``.
"""
from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

from src import config
from src.errors import InvalidModulusError, ModulusMismatchError, ResourceLimitError
from src.ffield import (
    QuadExtElement,
    check_odd_prime,
    ext_mul,
    norm_one_generator,
    prime_field,
    sqrt_mod,
)
from src.metrics import BFS_NODES_VISITED, GROUP_ELEMENTS_ENUMERATED

logger = logging.getLogger(__name__)

Quad = Tuple[int, int, int, int]


def group_order(p: int) -> int:
    return p * (p * p - 1) // 2


def _canon(a: int, b: int, c: int, d: int, p: int) -> Quad:
    # det = 1 forces a != 0 or b != 0
    lead = a if a else b
    if lead > (p - 1) // 2:
        return ((-a) % p, (-b) % p, (-c) % p, (-d) % p)
    return (a, b, c, d)


def _mul(x: Quad, y: Quad, p: int) -> Quad:
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return _canon(
        (a1 * a2 + b1 * c2) % p,
        (a1 * b2 + b1 * d2) % p,
        (c1 * a2 + d1 * c2) % p,
        (c1 * b2 + d1 * d2) % p,
        p,
    )


def _inv(x: Quad, p: int) -> Quad:
    a, b, c, d = x
    return _canon(d, (-b) % p, (-c) % p, a, p)


IDENTITY_QUAD: Quad = (1, 0, 0, 1)


@dataclass(frozen=True, slots=True)
class PSL2Elem:
    a: int
    b: int
    c: int
    d: int
    p: int

    @classmethod
    def from_matrix(cls, a: int, b: int, c: int, d: int, p: int) -> "PSL2Elem":
        """Validate a unit-determinant matrix and return its canonical class."""
        p = check_odd_prime(p)
        a, b, c, d = a % p, b % p, c % p, d % p
        if (a * d - b * c) % p != 1:
            raise InvalidModulusError(f"determinant of [[{a},{b}],[{c},{d}]] is not 1 mod {p}", module="psl2")
        return cls(*_canon(a, b, c, d, p), p)

    @classmethod
    def identity(cls, p: int) -> "PSL2Elem":
        return cls(1, 0, 0, 1, p)

    @property
    def key(self) -> Quad:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return (self.a + self.d) % self.p

    def is_identity(self) -> bool:
        return self.key == IDENTITY_QUAD

    def __mul__(self, other: "PSL2Elem") -> "PSL2Elem":
        return group_op(self, other)

    def inverse(self) -> "PSL2Elem":
        return inverse(self)

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.p}"


def _wrap(q: Quad, p: int) -> PSL2Elem:
    return PSL2Elem(q[0], q[1], q[2], q[3], p)


def group_op(g: PSL2Elem, h: PSL2Elem) -> PSL2Elem:
    if g.p != h.p:
        raise ModulusMismatchError(f"cannot multiply elements mod {g.p} and mod {h.p}")
    return _wrap(_mul(g.key, h.key, g.p), g.p)


def inverse(g: PSL2Elem) -> PSL2Elem:
    return _wrap(_inv(g.key, g.p), g.p)


def power(g: PSL2Elem, k: int) -> PSL2Elem:
    if k < 0:
        g, k = inverse(g), -k
    result, base = IDENTITY_QUAD, g.key
    while k:
        if k & 1:
            result = _mul(result, base, g.p)
        base = _mul(base, base, g.p)
        k >>= 1
    return _wrap(result, g.p)


def commutator(x: PSL2Elem, y: PSL2Elem) -> PSL2Elem:
    """[x, y] = x y x^-1 y^-1."""
    return x * y * inverse(x) * inverse(y)


def standard_generators(p: int) -> Tuple[PSL2Elem, PSL2Elem]:
    """S = (0 -1; 1 0) of order 2 and T = (1 1; 0 1) of order p."""
    return (
        PSL2Elem.from_matrix(0, -1, 1, 0, p),
        PSL2Elem.from_matrix(1, 1, 0, 1, p),
    )


def element_order(g: PSL2Elem) -> int:
    """Least k >= 1 with g^k = +-I, by repeated multiplication (orders never exceed p)."""
    p, x = g.p, g.key
    k, cur = 1, x
    while cur != IDENTITY_QUAD:
        cur = _mul(cur, x, p)
        k += 1
    return k


def _iter_group(p: int) -> Iterator[Quad]:
    half = (p - 1) // 2
    for a in range(p):
        if a == 0:
            # bc = -1, b leads
            for b in range(1, half + 1):
                c = (-pow(b, -1, p)) % p
                for d in range(p):
                    yield (0, b, c, d)
            continue
        if a > half:
            continue
        a_inv = pow(a, -1, p)
        for b in range(p):
            for c in range(p):
                yield (a, b, c, ((1 + b * c) * a_inv) % p)


def enumerate_group(p: int, budget: Optional[int] = None) -> List[PSL2Elem]:
    """All p(p^2-1)/2 canonical elements, in scan order."""
    p = check_odd_prime(p)
    budget = config.PSL_ENUM_BUDGET if budget is None else budget
    n = group_order(p)
    if n > budget:
        raise ResourceLimitError(f"|PSL2(F_{p})| = {n} exceeds enumeration budget {budget}")
    elements = [_wrap(q, p) for q in _iter_group(p)]
    GROUP_ELEMENTS_ENUMERATED.inc(len(elements))
    return elements


# --- Conjugacy classes ---

class ClassKind(str, enum.Enum):
    IDENTITY = "identity"
    UNIPOTENT_1 = "unipotent-1"
    UNIPOTENT_EPS = "unipotent-eps"
    SPLIT = "split"
    NONSPLIT = "nonsplit"
    ORDER_TWO = "order-two"


_KIND_RANK = {kind: i for i, kind in enumerate(ClassKind)}

ClassParam = Union[None, int, Tuple[int, int]]


@dataclass(frozen=True)
class ConjClassLabel:
    kind: ClassKind
    parameter: ClassParam = None
    size: int = field(default=0, compare=False)
    p: int = field(default=0, compare=False)

    def sort_key(self):
        param = self.parameter
        if param is None:
            param = ()
        elif isinstance(param, int):
            param = (param,)
        return (_KIND_RANK[self.kind], param)

    def __str__(self) -> str:
        if self.parameter is None:
            return self.kind.value
        if isinstance(self.parameter, tuple):
            x, y = self.parameter
            return f"{self.kind.value}({x}+{y}r)"
        return f"{self.kind.value}({self.parameter})"


def class_size(kind: ClassKind, p: int) -> int:
    if kind is ClassKind.IDENTITY:
        return 1
    if kind in (ClassKind.UNIPOTENT_1, ClassKind.UNIPOTENT_EPS):
        return (p * p - 1) // 2
    if kind is ClassKind.SPLIT:
        return p * (p + 1)
    if kind is ClassKind.NONSPLIT:
        return p * (p - 1)
    # trace-zero class: elliptic when p = 3 mod 4, split when p = 1 mod 4
    return p * (p - 1) // 2 if p % 4 == 3 else p * (p + 1) // 2


def _label(kind: ClassKind, param: ClassParam, p: int) -> ConjClassLabel:
    return ConjClassLabel(kind, param, class_size(kind, p), p)


def _split_param(x: int, p: int) -> int:
    x_inv = pow(x, -1, p)
    return min(x, x_inv, (-x) % p, (-x_inv) % p)


def _nonsplit_param(x: int, y: int, p: int) -> Tuple[int, int]:
    return min((x % p, y % p), (x % p, (-y) % p), ((-x) % p, y % p), ((-x) % p, (-y) % p))


def classify_conjugacy(g: PSL2Elem) -> ConjClassLabel:
    """Algebraic class label from trace, residuosity and eigenvalues."""
    p = g.p
    if g.is_identity():
        return _label(ClassKind.IDENTITY, None, p)
    field_ = prime_field(p)
    t = g.trace
    if t == 0:
        return _label(ClassKind.ORDER_TWO, None, p)
    if t in (2, p - 2):
        a, b, c, d = g.key
        if t == p - 2:
            b, c = (-b) % p, (-c) % p
        witness = b if b else (-c) % p
        kind = ClassKind.UNIPOTENT_1 if field_.is_square(witness) else ClassKind.UNIPOTENT_EPS
        return _label(kind, None, p)
    disc = (t * t - 4) % p
    half = pow(2, -1, p)
    if field_.is_square(disc):
        s = sqrt_mod(disc, p)
        x = ((t + s) * half) % p
        return _label(ClassKind.SPLIT, _split_param(x, p), p)
    # eigenvalue zeta = t/2 + y sqrt(eps), with eps*y^2 = t^2/4 - 1
    y = sqrt_mod(disc * pow(4 * field_.epsilon, -1, p), p)
    return _label(ClassKind.NONSPLIT, _nonsplit_param(t * half, y, p), p)


@lru_cache(maxsize=None)
def class_labels(p: int) -> Tuple[ConjClassLabel, ...]:
    """All classes of PSL_2(F_p), p >= 5, in column order."""
    p = check_odd_prime(p)
    if p < 5:
        raise InvalidModulusError(f"class list needs p >= 5, got {p}", module="psl2")
    labels = [
        _label(ClassKind.IDENTITY, None, p),
        _label(ClassKind.UNIPOTENT_1, None, p),
        _label(ClassKind.UNIPOTENT_EPS, None, p),
    ]
    split_params = set()
    for x in range(2, p - 1):
        if (x * x) % p == p - 1:
            continue  # x^2 = -1: the trace-zero class
        split_params.add(_split_param(x, p))
    labels += [_label(ClassKind.SPLIT, x, p) for x in sorted(split_params)]

    field_ = prime_field(p)
    gamma = norm_one_generator(p)
    nonsplit_params = set()
    z = gamma
    for _ in range(p):  # gamma^1 .. gamma^p
        if z.y != 0 and z.x != 0:  # excludes +-1 (y = 0) and zeta^2 = -1 (x = 0)
            nonsplit_params.add(_nonsplit_param(z.x, z.y, p))
        z = ext_mul(z, gamma, field_)
    labels += [_label(ClassKind.NONSPLIT, key, p) for key in sorted(nonsplit_params)]
    labels.append(_label(ClassKind.ORDER_TWO, None, p))
    return tuple(labels)


def class_representative(label: ConjClassLabel, p: Optional[int] = None) -> PSL2Elem:
    p = p or label.p
    eps = prime_field(p).epsilon
    kind = label.kind
    if kind is ClassKind.IDENTITY:
        return PSL2Elem.identity(p)
    if kind is ClassKind.UNIPOTENT_1:
        return PSL2Elem.from_matrix(1, 1, 0, 1, p)
    if kind is ClassKind.UNIPOTENT_EPS:
        return PSL2Elem.from_matrix(1, eps, 0, 1, p)
    if kind is ClassKind.SPLIT:
        x = label.parameter
        return PSL2Elem.from_matrix(x, 0, 0, pow(x, -1, p), p)
    if kind is ClassKind.NONSPLIT:
        x, y = label.parameter
        return PSL2Elem.from_matrix(x, eps * y, y, x, p)
    return PSL2Elem.from_matrix(0, -1, 1, 0, p)


def eigenvalue(label: ConjClassLabel) -> Union[int, QuadExtElement, None]:
    """Eigenvalue behind a semisimple label (x for split, zeta for nonsplit)."""
    if label.kind is ClassKind.SPLIT:
        return label.parameter
    if label.kind is ClassKind.NONSPLIT:
        x, y = label.parameter
        return QuadExtElement(x, y, label.p)
    return None


def conjugacy_class(g: PSL2Elem, elements: Optional[Sequence[PSL2Elem]] = None) -> Set[PSL2Elem]:
    """Explicit class of g as a conjugation orbit (brute force; test oracle)."""
    p = g.p
    elements = elements if elements is not None else enumerate_group(p)
    x = g.key
    orbit = {_mul(_mul(h.key, x, p), _inv(h.key, p), p) for h in elements}
    return {_wrap(q, p) for q in orbit}


def sl2_class_count(p: int) -> int:
    """Conjugacy class count of SL_2(F_p) by brute-force orbits over all p(p^2-1) matrices."""
    p = check_odd_prime(p)
    mats: List[Quad] = []
    for a in range(p):
        for b in range(p):
            for c in range(p):
                for d in range(p):
                    if (a * d - b * c) % p == 1:
                        mats.append((a, b, c, d))

    def mul(x: Quad, y: Quad) -> Quad:
        return (
            (x[0] * y[0] + x[1] * y[2]) % p,
            (x[0] * y[1] + x[1] * y[3]) % p,
            (x[2] * y[0] + x[3] * y[2]) % p,
            (x[2] * y[1] + x[3] * y[3]) % p,
        )

    seen: Set[Quad] = set()
    count = 0
    for m in mats:
        if m in seen:
            continue
        count += 1
        for h in mats:
            h_inv = (h[3], (-h[1]) % p, (-h[2]) % p, h[0])
            seen.add(mul(mul(h, m), h_inv))
    return count


def closure(gens: Iterable[PSL2Elem], cap: Optional[int] = None, p: Optional[int] = None) -> Set[PSL2Elem]:
    """Subgroup generated by ``gens``, by breadth-first closure under right multiplication.

    An empty ``gens`` gives the trivial subgroup, but only when ``p`` is passed:
    without a generator there is no modulus to build the identity from.
    """
    gens = list(gens)
    if not gens:
        if p is None:
            raise InvalidModulusError("empty generator list needs an explicit p", module="psl2")
        return {PSL2Elem.identity(p)}
    p = gens[0].p
    if any(g.p != p for g in gens):
        raise ModulusMismatchError("generators over different moduli")
    cap = config.PSL_ENUM_BUDGET if cap is None else cap
    steps = list({g.key for g in gens})
    seen: Set[Quad] = {IDENTITY_QUAD}
    frontier = deque([IDENTITY_QUAD])
    while frontier:
        x = frontier.popleft()
        for s in steps:
            y = _mul(x, s, p)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise ResourceLimitError(f"closure exceeded cap {cap}")
                frontier.append(y)
    BFS_NODES_VISITED.labels(kind="closure").inc(len(seen))
    return {_wrap(q, p) for q in seen}


def generates_group(gens: Sequence[PSL2Elem], p: int) -> bool:
    n = group_order(p)
    return len(closure(gens, cap=n, p=p)) == n


@lru_cache(maxsize=None)
def elements_by_order(p: int) -> Dict[int, Tuple[PSL2Elem, ...]]:
    """Pools of elements keyed by exact order, in scan order."""
    pools: Dict[int, List[PSL2Elem]] = {}
    for g in enumerate_group(p):
        pools.setdefault(element_order(g), []).append(g)
    logger.debug("PSL2(F_%d) order pools: %s", p, {k: len(v) for k, v in sorted(pools.items())})
    return {k: tuple(v) for k, v in pools.items()}
