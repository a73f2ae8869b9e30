"""Finite algebras as flat operation tables, term-operation clones, and
operation classifiers.

Tables use row-major mixed-radix order: the value of an ``arity``-ary
operation at ``(a_0, ..., a_{k-1})`` is stored at index
``sum(a_i * size**(arity - 1 - i))``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

VARIABLE_NAMES = ("x", "y", "z", "u", "v", "w")


class AlgebraError(ValueError):
    """Raised for malformed algebra descriptions."""


class CloneCapExceeded(RuntimeError):
    """Raised when a clone slice outgrows the requested cap."""


def variable_name(i: int, arity: int) -> str:
    if arity <= len(VARIABLE_NAMES):
        return VARIABLE_NAMES[i]
    return f"x{i + 1}"


def argument_grid(size: int, arity: int) -> np.ndarray:
    """Return an ``(arity, size**arity)`` array; column j is the j-th tuple."""
    if arity == 0:
        return np.zeros((0, 1), dtype=np.int64)
    axes = np.indices((size,) * arity).reshape(arity, -1)
    return axes.astype(np.int64)


def table_index(args: Sequence[np.ndarray], size: int) -> np.ndarray:
    idx = np.zeros_like(np.asarray(args[0]), dtype=np.int64)
    for a in args:
        idx = idx * size + a
    return idx


# --------------------------------------------------------------------------
# terms (provenance of generated operations)


@dataclass(frozen=True)
class Term:
    """A term over basic operation names and projection variables.

    ``op`` is None for a projection onto variable ``var``.
    """

    op: str | None = None
    args: tuple["Term", ...] = ()
    var: int = 0

    @staticmethod
    def variable(i: int) -> "Term":
        return Term(None, (), i)

    def depth(self) -> int:
        if self.op is None:
            return 0
        return 1 + max(a.depth() for a in self.args)

    def evaluate(self, alg: "FiniteAlgebra", arity: int) -> np.ndarray:
        """Table of this term as an ``arity``-ary operation of ``alg``."""
        grid = argument_grid(alg.size, arity)
        return self._eval(alg, grid)

    def _eval(self, alg: "FiniteAlgebra", grid: np.ndarray) -> np.ndarray:
        if self.op is None:
            return grid[self.var]
        table = alg.table(self.op)
        vals = [a._eval(alg, grid) for a in self.args]
        return table[table_index(vals, alg.size)]

    def render(self, arity: int) -> str:
        if self.op is None:
            return variable_name(self.var, arity)
        return f"{self.op}({','.join(a.render(arity) for a in self.args)})"


# --------------------------------------------------------------------------
# algebras


@dataclass(frozen=True)
class BasicOperation:
    name: str
    arity: int
    table: tuple[int, ...]


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str
    size: int
    basic_ops: tuple[BasicOperation, ...]

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError(f"{self.name}: size must be >= 1, got {self.size}")
        seen = set()
        for op in self.basic_ops:
            if op.name in seen:
                raise AlgebraError(f"{self.name}: duplicate operation name {op.name!r}")
            seen.add(op.name)
            if op.arity < 0:
                raise AlgebraError(f"{self.name}: operation {op.name!r} has negative arity")
            expected = self.size ** op.arity
            if len(op.table) != expected:
                raise AlgebraError(
                    f"{self.name}: operation {op.name!r} table has length "
                    f"{len(op.table)}, expected {expected}"
                )
            for i, v in enumerate(op.table):
                if not 0 <= v < self.size:
                    raise AlgebraError(
                        f"{self.name}: operation {op.name!r} entry at index {i} "
                        f"is {v}, outside 0..{self.size - 1}"
                    )

    @property
    def signature(self) -> tuple[tuple[str, int], ...]:
        return tuple((op.name, op.arity) for op in self.basic_ops)

    def operation(self, name: str) -> BasicOperation:
        for op in self.basic_ops:
            if op.name == name:
                return op
        raise KeyError(name)

    def table(self, name: str) -> np.ndarray:
        return np.asarray(self.operation(name).table, dtype=np.int64)

    def apply(self, name: str, *args: int) -> int:
        op = self.operation(name)
        if len(args) != op.arity:
            raise ValueError(f"{name} expects {op.arity} arguments, got {len(args)}")
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return op.table[idx]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "ops": [
                {"name": op.name, "arity": op.arity, "table": list(op.table)}
                for op in self.basic_ops
            ],
        }


def make_algebra(spec: Mapping) -> FiniteAlgebra:
    """Build a validated algebra from its JSON description."""
    if not isinstance(spec, Mapping):
        raise AlgebraError("algebra description must be a JSON object")
    try:
        name = str(spec.get("name", "unnamed"))
        size = spec["size"]
        ops_spec = spec["ops"]
    except KeyError as exc:
        raise AlgebraError(f"algebra description is missing key {exc.args[0]!r}") from None
    if not isinstance(size, int) or isinstance(size, bool):
        raise AlgebraError(f"{name}: size must be an integer")
    ops = []
    for k, op in enumerate(ops_spec):
        try:
            opname, arity, table = op["name"], op["arity"], op["table"]
        except (KeyError, TypeError):
            raise AlgebraError(f"{name}: operation #{k} needs name, arity and table") from None
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in table):
            raise AlgebraError(f"{name}: operation {opname!r} table must contain integers")
        ops.append(BasicOperation(str(opname), int(arity), tuple(table)))
    return FiniteAlgebra(name, size, tuple(ops))


def _from_function(name: str, size: int, opname: str, arity: int, fn) -> FiniteAlgebra:
    table = tuple(fn(*t) for t in itertools.product(range(size), repeat=arity))
    return FiniteAlgebra(name, size, (BasicOperation(opname, arity, table),))


def make_semilattice() -> FiniteAlgebra:
    """The 2-element meet semilattice ({0,1}, min)."""
    return _from_function("B", 2, "meet", 2, min)


def make_majority_first(n: int) -> FiniteAlgebra:
    """Majority on tuples with a repeated entry, first argument otherwise."""
    if n < 2:
        raise AlgebraError(f"majority-first algebra needs n >= 2, got {n}")

    def f(a, b, c):
        if a == b or a == c:
            return a
        if b == c:
            return b
        return a

    return _from_function(f"A{n}", n, "f", 3, f)


def make_meet3() -> FiniteAlgebra:
    return _from_function("D", 2, "f", 3, lambda a, b, c: min(a, b, c))


def product(lhs: FiniteAlgebra, rhs: FiniteAlgebra, name: str | None = None) -> FiniteAlgebra:
    """Direct product; the pair (i, j) is encoded as ``i * rhs.size + j``."""
    if lhs.signature != rhs.signature:
        raise AlgebraError(
            f"signature mismatch: {lhs.name} has {lhs.signature}, {rhs.name} has {rhs.signature}"
        )
    size = lhs.size * rhs.size
    ops = []
    for lop, rop in zip(lhs.basic_ops, rhs.basic_ops):
        table = []
        for args in itertools.product(range(size), repeat=lop.arity):
            li = ri = 0
            for a in args:
                li = li * lhs.size + a // rhs.size
                ri = ri * rhs.size + a % rhs.size
            table.append(lop.table[li] * rhs.size + rop.table[ri])
        ops.append(BasicOperation(lop.name, lop.arity, tuple(table)))
    return FiniteAlgebra(name or f"{lhs.name}x{rhs.name}", size, tuple(ops))


def builtin_algebras() -> dict[str, FiniteAlgebra]:
    c = FiniteAlgebra("C", 2, make_majority_first(2).basic_ops)
    d = make_meet3()
    return {
        "B": make_semilattice(),
        "A2": make_majority_first(2),
        "A3": make_majority_first(3),
        "C": c,
        "D": d,
        "CxD": product(c, d, "CxD"),
    }


def load_algebra(ref: str) -> FiniteAlgebra:
    """Resolve a built-in algebra name, falling back to a JSON file path."""
    builtins = builtin_algebras()
    if ref in builtins:
        return builtins[ref]
    path = Path(ref)
    if not path.exists():
        raise AlgebraError(f"unknown algebra {ref!r}: not a built-in name and no such file")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"{ref}: invalid JSON ({exc})") from None
    return make_algebra(spec)


# --------------------------------------------------------------------------
# term operations and clones


@dataclass(frozen=True)
class TermOperation:
    size: int
    arity: int
    table: tuple[int, ...]
    provenance: Term | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.table) != self.size ** self.arity:
            raise ValueError(
                f"table length {len(self.table)} does not match size {self.size} "
                f"and arity {self.arity}"
            )

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __call__(self, *args: int) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.table[idx]

    def describe(self) -> str:
        if self.provenance is None:
            return "<table>"
        return self.provenance.render(self.arity)


def projection(size: int, arity: int, i: int) -> TermOperation:
    grid = argument_grid(size, arity)
    return TermOperation(size, arity, tuple(int(v) for v in grid[i]), Term.variable(i))


def operation_from_term(alg: FiniteAlgebra, term: Term, arity: int) -> TermOperation:
    table = term.evaluate(alg, arity)
    return TermOperation(alg.size, arity, tuple(int(v) for v in table), term)


@dataclass(frozen=True)
class CloneSlice:
    algebra: FiniteAlgebra
    arity: int
    members: tuple[TermOperation, ...]
    rounds: int

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, op):
        return any(op == m for m in self.members)

    def index(self, op: TermOperation) -> int:
        return self.members.index(op)

    def idempotent(self) -> tuple[TermOperation, ...]:
        return tuple(m for m in self.members if is_idempotent(m))


def generate_term_operations(alg: FiniteAlgebra, arity: int, cap: int = 10_000) -> CloneSlice:
    """All ``arity``-ary term operations of ``alg``, by closure from projections.

    Each round composes every basic operation with argument tuples that use at
    least one member discovered in the previous round, so every member is
    reached at its minimal term depth.
    """
    if arity < 1:
        raise ValueError("arity must be >= 1")
    if cap <= 0:
        raise ValueError("cap must be positive")
    size = alg.size
    start = [projection(size, arity, i) for i in range(arity)]
    tables: list[np.ndarray] = []
    terms: list[Term] = []
    index: dict[bytes, int] = {}
    for p in start:
        key = p.array.astype(np.int64).tobytes()
        if key not in index:
            index[key] = len(tables)
            tables.append(p.array)
            terms.append(p.provenance)
    if len(tables) > cap:
        raise CloneCapExceeded(f"clone larger than cap {cap}")

    frontier_start = 0
    rounds = 0
    while frontier_start < len(tables):
        rounds += 1
        old = frontier_start
        end = len(tables)
        stacked = np.stack(tables[:end])
        for op in alg.basic_ops:
            optable = np.asarray(op.table, dtype=np.int64)
            r = op.arity
            if r == 0:
                continue
            # tuples in range(end)^r with at least one index >= old
            for first_new in range(r):
                ranges = [range(0, old)] * first_new + [range(old, end)] + [range(0, end)] * (r - 1 - first_new)
                if any(len(rg) == 0 for rg in ranges):
                    continue
                for head in itertools.product(*ranges[:-1]):
                    last = np.arange(ranges[-1].start, ranges[-1].stop)
                    idx = np.zeros((len(last), stacked.shape[1]), dtype=np.int64)
                    for h in head:
                        idx = idx * size + stacked[h]
                    idx = idx * size + stacked[last]
                    results = optable[idx]
                    for row, j in zip(results, last):
                        key = row.tobytes()
                        if key in index:
                            continue
                        index[key] = len(tables)
                        tables.append(row)
                        args = tuple(terms[h] for h in head) + (terms[int(j)],)
                        terms.append(Term(op.name, args))
                        if len(tables) > cap:
                            raise CloneCapExceeded(
                                f"clone larger than cap {cap} ({alg.name}, arity {arity})"
                            )
        frontier_start = end

    members = [
        TermOperation(size, arity, tuple(int(v) for v in t), term)
        for t, term in zip(tables, terms)
    ]
    members.sort(key=lambda m: m.table)
    return CloneSlice(alg, arity, tuple(members), rounds)


# --------------------------------------------------------------------------
# classification


def is_idempotent(op: TermOperation) -> bool:
    return all(op(*([a] * op.arity)) == a for a in range(op.size))


def projection_index(op: TermOperation) -> int | None:
    for i in range(op.arity):
        if op == projection(op.size, op.arity, i):
            return i
    return None


def _one_off_tables(op: TermOperation) -> list[np.ndarray]:
    """Binary tables of op(x,..,x,y,x,..,x) for each position of y."""
    grid = argument_grid(op.size, 2)
    x, y = grid
    out = []
    table = op.array
    for pos in range(op.arity):
        args = [y if i == pos else x for i in range(op.arity)]
        out.append(table[table_index(args, op.size)])
    return out


def is_nu(op: TermOperation) -> bool:
    if op.arity < 2:
        return False
    x = argument_grid(op.size, 2)[0]
    return all(np.array_equal(t, x) for t in _one_off_tables(op))


def is_wnu(op: TermOperation) -> bool:
    if op.arity < 2 or not is_idempotent(op):
        return False
    tables = _one_off_tables(op)
    return all(np.array_equal(t, tables[0]) for t in tables[1:])


@dataclass(frozen=True)
class Classification:
    is_projection: bool
    projection_index: int | None
    is_idempotent: bool
    is_majority: bool
    is_nu: bool
    is_wnu: bool

    def flags(self) -> str:
        names = []
        if self.is_projection:
            names.append(f"projection({self.projection_index + 1})")
        for attr, label in (("is_idempotent", "idempotent"), ("is_majority", "majority"),
                            ("is_nu", "nu"), ("is_wnu", "wnu")):
            if getattr(self, attr):
                names.append(label)
        return " ".join(names) or "-"


def classify_operation(op: TermOperation) -> Classification:
    pi = projection_index(op)
    nu = is_nu(op)
    return Classification(
        is_projection=pi is not None,
        projection_index=pi,
        is_idempotent=is_idempotent(op),
        is_majority=op.arity == 3 and nu,
        is_nu=nu,
        is_wnu=is_wnu(op),
    )


def compose(alg: FiniteAlgebra, opname: str, args: Iterable[TermOperation]) -> TermOperation:
    """Apply a basic operation pointwise to term operations of equal arity."""
    args = list(args)
    arity = args[0].arity
    table = alg.table(opname)[table_index([a.array for a in args], alg.size)]
    prov = None
    if all(a.provenance is not None for a in args):
        prov = Term(opname, tuple(a.provenance for a in args))
    return TermOperation(alg.size, arity, tuple(int(v) for v in table), prov)
