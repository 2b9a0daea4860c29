"""Finite universal algebras given by total operation tables.

Carriers are integer ranges ``{0..n-1}``. An operation of arity ``k`` is a
numpy array of shape ``(n,) * k`` (a 0-d array for constants), so every law
check is a vectorised comparison over all argument tuples at once.

Products use a mixed-radix encoding of tuples: for factor sizes
``(n_1, ..., n_m)`` the tuple ``(x_1, ..., x_m)`` is stored as
``sum(x_i * prod(n_j for j > i))``, i.e. the first component is the most
significant digit (numpy's C-order ``ravel_multi_index``).
"""

import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from math import prod
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from fibra.services.errors import (
    ArityMismatch,
    CapExceeded,
    ElementOutOfRange,
    EmptyList,
    MissingTable,
    NotAGroup,
    NotBijective,
    NotClosed,
    OutOfRangeEntry,
    SchemaViolation,
    SignatureMismatch,
    SizeMismatch,
    UnknownSymbol,
)
from fibra.utils.enumeration_cache import get_enumeration_cache
from fibra.utils.permutations import Perm, compose, identity, inverse

logger = logging.getLogger(__name__)

DEFAULT_AUTOMORPHISM_CAP = 8


@dataclass(frozen=True)
class Signature:
    """Ordered operation symbols with their arities."""

    ops: Tuple[Tuple[str, int], ...] = ()

    def __post_init__(self):
        ops = tuple((str(symbol), int(arity)) for symbol, arity in self.ops)
        object.__setattr__(self, "ops", ops)
        seen = set()
        for symbol, arity in ops:
            if not symbol:
                raise SchemaViolation(
                    "Operation symbols must be non-empty", {"field": "signature"}
                )
            if symbol in seen:
                raise SchemaViolation(
                    f"Duplicate operation symbol '{symbol}'",
                    {"field": "signature", "symbol": symbol},
                )
            if arity < 0:
                raise SchemaViolation(
                    f"Negative arity for '{symbol}'",
                    {"field": "signature", "symbol": symbol},
                )
            seen.add(symbol)

    @property
    def symbols(self) -> Tuple[str, ...]:
        return tuple(symbol for symbol, _ in self.ops)

    @property
    def constants(self) -> Tuple[str, ...]:
        """Symbols of arity 0."""
        return tuple(symbol for symbol, arity in self.ops if arity == 0)

    def arity(self, symbol: str) -> int:
        for name, arity in self.ops:
            if name == symbol:
                return arity
        raise UnknownSymbol(f"Unknown operation symbol '{symbol}'", {"symbol": symbol})

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols


GROUP_SIGNATURE = Signature((("*", 2), ("inv", 1), ("e", 0)))


def _frozen_array(values: Any) -> np.ndarray:
    array = np.array(values, dtype=np.int64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A carrier ``{0..size-1}`` with one total table per signature symbol.

    Build instances through :func:`validate_algebra` when the tables come from
    untrusted data; the constructor re-checks closure and totality anyway.
    """

    signature: Signature
    size: int
    tables: Tuple[Tuple[str, np.ndarray], ...]

    def __post_init__(self):
        if int(self.size) < 1:
            raise SchemaViolation(
                "Carrier size must be positive", {"field": "size", "size": self.size}
            )
        given = dict(self.tables)
        for symbol in given:
            if symbol not in self.signature:
                raise UnknownSymbol(
                    f"Table given for unknown symbol '{symbol}'", {"symbol": symbol}
                )
        ordered = []
        for symbol, arity in self.signature.ops:
            if symbol not in given:
                raise MissingTable(f"No table for '{symbol}'", {"symbol": symbol})
            table = _frozen_array(given[symbol])
            if table.shape != (self.size,) * arity:
                raise ArityMismatch(
                    f"Table for '{symbol}' has shape {table.shape}, "
                    f"expected {(self.size,) * arity}",
                    {"symbol": symbol, "shape": list(table.shape)},
                )
            bad = np.argwhere((table < 0) | (table >= self.size))
            if bad.size:
                index = tuple(int(i) for i in bad[0])
                raise OutOfRangeEntry(
                    f"Entry {int(table[index])} of '{symbol}' at {index} "
                    f"is outside the carrier of size {self.size}",
                    {"symbol": symbol, "index": list(index), "value": int(table[index])},
                )
            ordered.append((symbol, table))
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(self, "tables", tuple(ordered))

    @cached_property
    def _table_index(self) -> Dict[str, np.ndarray]:
        return dict(self.tables)

    @cached_property
    def _key(self) -> Tuple[Any, ...]:
        return (
            self.signature,
            self.size,
            tuple((symbol, table.tobytes()) for symbol, table in self.tables),
        )

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"FiniteAlgebra(size={self.size}, symbols={list(self.signature.symbols)})"

    @property
    def elements(self) -> range:
        return range(self.size)

    def table(self, symbol: str) -> np.ndarray:
        """Return the read-only table of ``symbol``."""
        self.signature.arity(symbol)
        return self._table_index[symbol]

    def constant(self, symbol: str) -> int:
        """Return the designated element of a 0-ary symbol."""
        if self.signature.arity(symbol) != 0:
            raise ArityMismatch(f"'{symbol}' is not a constant", {"symbol": symbol})
        return int(self._table_index[symbol][()])

    def with_table(self, symbol: str, table: Any) -> "FiniteAlgebra":
        """Return a copy with the table of ``symbol`` replaced."""
        self.signature.arity(symbol)
        tables = tuple(
            (name, table if name == symbol else current) for name, current in self.tables
        )
        return FiniteAlgebra(self.signature, self.size, tables)


def _check_nesting(raw: Any, depth: int, size: int, symbol: str, path: Tuple[int, ...]):
    if depth == 0:
        if isinstance(raw, bool) or not isinstance(raw, (int, np.integer)):
            raise ArityMismatch(
                f"Table for '{symbol}' has a non-element entry at {path}",
                {"symbol": symbol, "index": list(path)},
            )
        return
    if not isinstance(raw, (list, tuple)) or len(raw) != size:
        got = len(raw) if isinstance(raw, (list, tuple)) else "scalar"
        raise ArityMismatch(
            f"Table for '{symbol}' at {path} has {got} rows, expected {size}",
            {"symbol": symbol, "index": list(path), "rows": got, "expected": size},
        )
    for i, row in enumerate(raw):
        _check_nesting(row, depth - 1, size, symbol, path + (i,))


def validate_algebra(
    signature: Signature, size: int, raw_tables: Mapping[str, Any]
) -> FiniteAlgebra:
    """Build a FiniteAlgebra from nested-list tables.

    Args:
        signature: Operation symbols and arities
        size: Carrier size n
        raw_tables: symbol -> nested list of depth arity (a bare int for constants)

    Returns:
        The validated algebra

    Raises:
        MissingTable: a signature symbol has no table
        ArityMismatch: a table is not a full ``n**k`` nesting
        OutOfRangeEntry: an entry lies outside ``{0..n-1}``
    """
    if isinstance(size, bool) or int(size) < 1:
        raise SchemaViolation("Carrier size must be positive", {"field": "size"})
    for symbol in raw_tables:
        if symbol not in signature:
            raise UnknownSymbol(
                f"Table given for unknown symbol '{symbol}'", {"symbol": symbol}
            )
    tables = []
    for symbol, arity in signature.ops:
        if symbol not in raw_tables:
            raise MissingTable(f"No table for '{symbol}'", {"symbol": symbol})
        raw = raw_tables[symbol]
        _check_nesting(raw, arity, size, symbol, ())
        tables.append((symbol, np.array(raw, dtype=np.int64)))
    return FiniteAlgebra(signature, size, tuple(tables))


def evaluate(alg: FiniteAlgebra, op: str, args: Sequence[int]) -> int:
    """Apply operation ``op`` to ``args`` by table lookup."""
    arity = alg.signature.arity(op)
    if len(args) != arity:
        raise ArityMismatch(
            f"'{op}' takes {arity} arguments, got {len(args)}",
            {"symbol": op, "arity": arity, "given": len(args)},
        )
    for position, value in enumerate(args):
        if not 0 <= value < alg.size:
            raise ElementOutOfRange(
                f"Argument {value} is outside the carrier of size {alg.size}",
                {"position": position, "value": value},
            )
    return int(alg.table(op)[tuple(args)])


@dataclass(frozen=True)
class AlgebraMap:
    """A total function between the carriers of two algebras."""

    source: FiniteAlgebra
    target: FiniteAlgebra
    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        object.__setattr__(self, "mapping", mapping)
        if len(mapping) != self.source.size:
            raise SizeMismatch(
                f"Map has {len(mapping)} values for a source of size {self.source.size}",
                {"values": len(mapping), "source_size": self.source.size},
            )
        for x, y in enumerate(mapping):
            if not 0 <= y < self.target.size:
                raise ElementOutOfRange(
                    f"Map sends {x} to {y}, outside the target of size {self.target.size}",
                    {"element": x, "value": y},
                )

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @property
    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and sorted(self.mapping) == list(
            range(self.target.size)
        )

    def inverse(self) -> "AlgebraMap":
        if not self.is_bijective:
            raise NotBijective("Map is not a bijection", {"mapping": list(self.mapping)})
        return AlgebraMap(self.target, self.source, inverse(self.mapping))


def identity_map(alg: FiniteAlgebra) -> AlgebraMap:
    """Identity endomorphism of ``alg``."""
    return AlgebraMap(alg, alg, identity(alg.size))


def compose_maps(b: AlgebraMap, a: AlgebraMap) -> AlgebraMap:
    """Return b . a (apply ``a`` first)."""
    if a.target != b.source:
        raise SignatureMismatch("Maps do not compose: a.target != b.source")
    return AlgebraMap(a.source, b.target, compose(b.mapping, a.mapping))


def homomorphism_violation(m: AlgebraMap) -> Optional[Tuple[str, Tuple[int, ...]]]:
    """Return the first (symbol, argument tuple) where ``m`` breaks a law, or None."""
    if m.source.signature != m.target.signature:
        raise SignatureMismatch(
            "Source and target have different signatures",
            {
                "source": list(m.source.signature.symbols),
                "target": list(m.target.signature.symbols),
            },
        )
    mapping = np.asarray(m.mapping, dtype=np.int64)
    for symbol, arity in m.source.signature.ops:
        src = m.source.table(symbol)
        dst = m.target.table(symbol)
        if arity == 0:
            if mapping[src[()]] != dst[()]:
                return symbol, ()
            continue
        lhs = mapping[src]
        rhs = dst[np.ix_(*([mapping] * arity))]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            return symbol, tuple(int(i) for i in bad[0])
    return None


def is_homomorphism(m: AlgebraMap) -> bool:
    """Check m(w(x1..xk)) = w(m(x1)..m(xk)) for every symbol and tuple."""
    return homomorphism_violation(m) is None


def is_automorphism(alg: FiniteAlgebra, perm: Sequence[int]) -> bool:
    """Check that ``perm`` is a bijective endomorphism of ``alg``."""
    m = AlgebraMap(alg, alg, tuple(perm))
    return m.is_bijective and is_homomorphism(m)


def enumerate_automorphisms(
    alg: FiniteAlgebra, cap: int = DEFAULT_AUTOMORPHISM_CAP
) -> List[AlgebraMap]:
    """List all automorphisms of ``alg`` in lexicographic order of their tables.

    Raises:
        CapExceeded: the carrier is larger than ``cap``
    """
    if alg.size > cap:
        raise CapExceeded(
            f"Automorphism search over {alg.size}! bijections exceeds the cap "
            f"of carrier size {cap}",
            {"size": alg.size, "cap": cap},
        )
    cache = get_enumeration_cache()
    key = ("automorphisms", alg)
    cached = cache.get(key)
    if cached is not None:
        return list(cached)

    # Constants are fixed by every automorphism.
    fixed = [alg.constant(symbol) for symbol in alg.signature.constants]
    found = []
    for perm in itertools.permutations(range(alg.size)):
        if any(perm[c] != c for c in fixed):
            continue
        candidate = AlgebraMap(alg, alg, perm)
        if homomorphism_violation(candidate) is None:
            found.append(candidate)
    logger.info(f"Enumerated {len(found)} automorphisms of algebra of size {alg.size}")
    cache.set(key, tuple(found))
    return found


def automorphism_perms(
    alg: FiniteAlgebra, cap: int = DEFAULT_AUTOMORPHISM_CAP
) -> FrozenSet[Perm]:
    return frozenset(m.mapping for m in enumerate_automorphisms(alg, cap))


def encode_tuple(dims: Sequence[int], values: Sequence[int]) -> int:
    """Mixed-radix index of ``values``; the first component is most significant."""
    if len(dims) != len(values):
        raise SizeMismatch("Tuple length does not match the number of factors")
    for position, (value, dim) in enumerate(zip(values, dims)):
        if not 0 <= value < dim:
            raise ElementOutOfRange(
                f"Component {value} is outside the factor of size {dim}",
                {"position": position, "value": value},
            )
    return int(np.ravel_multi_index(tuple(int(v) for v in values), tuple(dims)))


def decode_index(dims: Sequence[int], index: int) -> Tuple[int, ...]:
    """Inverse of :func:`encode_tuple`."""
    if not 0 <= index < prod(dims):
        raise ElementOutOfRange(
            f"Index {index} is outside a product of size {prod(dims)}", {"value": index}
        )
    return tuple(int(v) for v in np.unravel_index(int(index), tuple(dims)))


def _common_signature(factors: Sequence[FiniteAlgebra]) -> Signature:
    if not factors:
        raise EmptyList("Product of an empty list of algebras")
    signature = factors[0].signature
    for position, factor in enumerate(factors):
        if factor.signature != signature:
            raise SignatureMismatch(
                f"Factor {position} has a different signature", {"factor": position}
            )
    return signature


def product_algebra(factors: Sequence[FiniteAlgebra]) -> FiniteAlgebra:
    """Componentwise product of algebras sharing a signature."""
    signature = _common_signature(factors)
    dims = tuple(f.size for f in factors)
    size = prod(dims)
    tables = []
    for symbol, arity in signature.ops:
        if arity == 0:
            units = [f.constant(symbol) for f in factors]
            tables.append((symbol, np.array(encode_tuple(dims, units))))
            continue
        grid = np.indices((size,) * arity)
        decoded = [np.unravel_index(grid[j], dims) for j in range(arity)]
        components = [
            factor.table(symbol)[tuple(decoded[j][i] for j in range(arity))]
            for i, factor in enumerate(factors)
        ]
        tables.append((symbol, np.ravel_multi_index(tuple(components), dims)))
    return FiniteAlgebra(signature, size, tuple(tables))


def projection(
    product: FiniteAlgebra, factors: Sequence[FiniteAlgebra], i: int
) -> AlgebraMap:
    """The map sending an encoded tuple to its ``i``-th component."""
    dims = tuple(f.size for f in factors)
    if prod(dims) != product.size:
        raise SizeMismatch("Factors do not match the product size")
    mapping = tuple(decode_index(dims, k)[i] for k in range(product.size))
    return AlgebraMap(product, factors[i], mapping)


def subalgebra_closed(alg: FiniteAlgebra, subset: Iterable[int]) -> bool:
    """Check that ``subset`` holds every constant and is closed under every operation."""
    elements = sorted(set(int(v) for v in subset))
    for value in elements:
        if not 0 <= value < alg.size:
            raise ElementOutOfRange(
                f"Element {value} is outside the carrier of size {alg.size}",
                {"value": value},
            )
    members = np.asarray(elements, dtype=np.int64)
    for symbol, arity in alg.signature.ops:
        table = alg.table(symbol)
        if arity == 0:
            if int(table[()]) not in elements:
                return False
            continue
        if not elements:
            continue
        values = table[np.ix_(*([members] * arity))]
        if not np.isin(values, members).all():
            return False
    return True


def subalgebra(alg: FiniteAlgebra, subset: Iterable[int]) -> Tuple[FiniteAlgebra, AlgebraMap]:
    """Re-index a closed subset as an algebra of its own plus its inclusion map.

    The i-th element of the subalgebra is the i-th smallest member of ``subset``.
    """
    elements = sorted(set(int(v) for v in subset))
    if not elements:
        raise EmptyList("A subalgebra needs at least one element")
    if not subalgebra_closed(alg, elements):
        raise NotClosed("Subset is not closed under the operations", {"subset": elements})
    members = np.asarray(elements, dtype=np.int64)
    lookup = np.full(alg.size, -1, dtype=np.int64)
    lookup[members] = np.arange(len(elements))
    tables = []
    for symbol, arity in alg.signature.ops:
        table = alg.table(symbol)
        if arity == 0:
            tables.append((symbol, lookup[table[()]]))
        else:
            tables.append((symbol, lookup[table[np.ix_(*([members] * arity))]]))
    sub = FiniteAlgebra(alg.signature, len(elements), tuple(tables))
    return sub, AlgebraMap(sub, alg, tuple(elements))


@dataclass(frozen=True)
class GroupStructure:
    """An algebra whose designated symbols satisfy the group axioms."""

    algebra: FiniteAlgebra
    mul: str = "*"
    inv: str = "inv"
    unit: str = "e"

    def __post_init__(self):
        if not is_group(self.algebra, self.mul, self.inv, self.unit):
            raise NotAGroup(
                "Tables do not satisfy the group axioms",
                {"mul": self.mul, "inv": self.inv, "unit": self.unit},
            )

    @property
    def order(self) -> int:
        return self.algebra.size

    @property
    def unit_element(self) -> int:
        return self.algebra.constant(self.unit)

    @property
    def mul_table(self) -> np.ndarray:
        return self.algebra.table(self.mul)

    @property
    def inv_table(self) -> np.ndarray:
        return self.algebra.table(self.inv)

    def multiply(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def invert(self, a: int) -> int:
        return int(self.inv_table[a])

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul_table, self.mul_table.T))


def is_group(alg: FiniteAlgebra, mul: str, inv: str, unit: str) -> bool:
    """Check associativity, two-sided unit and two-sided inverses by enumeration."""
    for symbol, expected in ((mul, 2), (inv, 1), (unit, 0)):
        arity = alg.signature.arity(symbol)
        if arity != expected:
            raise ArityMismatch(
                f"'{symbol}' has arity {arity}, expected {expected}",
                {"symbol": symbol, "arity": arity, "expected": expected},
            )
    m = alg.table(mul)
    i = alg.table(inv)
    e = alg.constant(unit)
    r = np.arange(alg.size)
    left = m[m[:, :, None], r[None, None, :]]
    right = m[r[:, None, None], m[None, :, :]]
    if not np.array_equal(left, right):
        return False
    if not (np.array_equal(m[e, :], r) and np.array_equal(m[:, e], r)):
        return False
    return bool((m[r, i] == e).all() and (m[i, r] == e).all())


def opposite_group(g: GroupStructure) -> GroupStructure:
    """The group with a *op b = b * a; unit and inverse are unchanged."""
    if not is_group(g.algebra, g.mul, g.inv, g.unit):
        raise NotAGroup("Opposite of a non-group")
    flipped = g.algebra.with_table(g.mul, g.mul_table.T)
    return GroupStructure(flipped, g.mul, g.inv, g.unit)


def _group_from_elements(
    elements: Sequence[Any], multiply, mul: str, inv: str, unit: str
) -> GroupStructure:
    index = {element: position for position, element in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for a, b in itertools.product(range(n), repeat=2):
        table[a, b] = index[multiply(elements[a], elements[b])]
    unit_index = next(a for a in range(n) if np.array_equal(table[a], np.arange(n)))
    inverses = [int(np.flatnonzero(table[a] == unit_index)[0]) for a in range(n)]
    signature = Signature(((mul, 2), (inv, 1), (unit, 0)))
    algebra = FiniteAlgebra(
        signature, n, ((mul, table), (inv, inverses), (unit, unit_index))
    )
    return GroupStructure(algebra, mul, inv, unit)


def cyclic_group(n: int, mul: str = "*", inv: str = "inv", unit: str = "e") -> GroupStructure:
    """Z_n under addition mod n."""
    return _group_from_elements(list(range(n)), lambda a, b: (a + b) % n, mul, inv, unit)


def symmetric_group(k: int, mul: str = "*", inv: str = "inv", unit: str = "e") -> GroupStructure:
    """S_k on permutations listed lexicographically; a * b applies b first."""
    elements = list(itertools.permutations(range(k)))
    return _group_from_elements(elements, compose, mul, inv, unit)


def direct_product_group(groups: Sequence[GroupStructure]) -> GroupStructure:
    if not groups:
        raise EmptyList("Product of an empty list of groups")
    first = groups[0]
    algebra = product_algebra([g.algebra for g in groups])
    return GroupStructure(algebra, first.mul, first.inv, first.unit)


def trivial_algebra(size: int, signature: Signature = Signature()) -> FiniteAlgebra:
    """An algebra whose operations are all constantly 0 (no operations by default)."""
    tables = tuple(
        (symbol, np.zeros((size,) * arity, dtype=np.int64)) for symbol, arity in signature.ops
    )
    return FiniteAlgebra(signature, size, tables)
