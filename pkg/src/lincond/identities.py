"""Linear identities over abstract term symbols.

A linear term is a variable or a single symbol applied to variables.  An
identity is stored in a normal form: variables are renamed in order of first
occurrence and the two sides are oriented so the pair is least, which makes
an identity equal to its flip and to any variable renaming of itself.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .algebra import (
    VARIABLE_NAMES,
    FiniteAlgebra,
    TermOperation,
    argument_grid,
    generate_term_operations,
    is_idempotent,
    table_index,
)

VAR_INDEX = {name: i for i, name in enumerate(VARIABLE_NAMES)}


class IdentitySyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + message)


# --------------------------------------------------------------------------
# terms and identities


@dataclass(frozen=True)
class Var:
    name: str

    def variables(self) -> tuple[str, ...]:
        return (self.name,)

    def rename(self, mapping: Mapping[str, str]) -> "Var":
        return Var(mapping[self.name])

    def key(self) -> tuple:
        return (0, "", (VAR_INDEX[self.name],))

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple[str, ...]

    def variables(self) -> tuple[str, ...]:
        return self.args

    def rename(self, mapping: Mapping[str, str]) -> "App":
        return App(self.symbol, tuple(mapping[a] for a in self.args))

    def key(self) -> tuple:
        return (1, self.symbol, tuple(VAR_INDEX[a] for a in self.args))

    def __str__(self):
        return f"{self.symbol}({','.join(self.args)})"


LinearTerm = Var | App


def reduce_idempotent(t: LinearTerm) -> LinearTerm:
    """Replace s(v,...,v) by v."""
    if isinstance(t, App) and len(set(t.args)) == 1:
        return Var(t.args[0])
    return t


def _first_occurrence(terms: Sequence[LinearTerm]) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for t in terms:
        for v in t.variables():
            if v not in mapping:
                mapping[v] = VARIABLE_NAMES[len(mapping)]
    return mapping


@dataclass(frozen=True, order=False)
class Identity:
    lhs: LinearTerm
    rhs: LinearTerm

    @staticmethod
    def of(lhs: LinearTerm, rhs: LinearTerm) -> "Identity":
        """Normalized identity lhs ≈ rhs."""
        best = None
        for a, b in ((lhs, rhs), (rhs, lhs)):
            m = _first_occurrence((a, b))
            cand = (a.rename(m), b.rename(m))
            k = (cand[0].key(), cand[1].key())
            if best is None or k < best[0]:
                best = (k, cand)
        return Identity(*best[1])

    def key(self) -> tuple:
        return (self.lhs.key(), self.rhs.key())

    def is_reflexive(self) -> bool:
        return self.lhs == self.rhs

    def variables(self) -> tuple[str, ...]:
        seen = dict.fromkeys(self.lhs.variables() + self.rhs.variables())
        return tuple(seen)

    def symbols(self) -> frozenset[str]:
        return frozenset(t.symbol for t in (self.lhs, self.rhs) if isinstance(t, App))

    def substitute(self, mapping: Mapping[str, str]) -> "Identity":
        full = {v: mapping.get(v, v) for v in self.variables()}
        return Identity.of(self.lhs.rename(full), self.rhs.rename(full))

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True)
class IdentitySystem:
    signature: tuple[tuple[str, int], ...]
    identities: tuple[Identity, ...]

    def __post_init__(self):
        names = [s for s, _ in self.signature]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate symbol in signature {self.signature}")
        arities = dict(self.signature)
        for ident in self.identities:
            for t in (ident.lhs, ident.rhs):
                if isinstance(t, App):
                    if t.symbol not in arities:
                        raise ValueError(f"unknown symbol {t.symbol!r} in {ident}")
                    if len(t.args) != arities[t.symbol]:
                        raise ValueError(
                            f"{t.symbol} has arity {arities[t.symbol]} but is applied "
                            f"to {len(t.args)} variables in {ident}"
                        )

    @staticmethod
    def build(signature: Iterable[tuple[str, int]], identities: Iterable[Identity]) -> "IdentitySystem":
        """Normalize, drop reflexive identities, dedupe and sort."""
        norm = {Identity.of(i.lhs, i.rhs) for i in identities}
        norm = sorted((i for i in norm if not i.is_reflexive()), key=Identity.key)
        return IdentitySystem(tuple(signature), tuple(norm))

    @property
    def arities(self) -> dict[str, int]:
        return dict(self.signature)

    @property
    def variable_count(self) -> int:
        return max((len(i.variables()) for i in self.identities), default=0)

    def __len__(self):
        return len(self.identities)

    def __iter__(self) -> Iterator[Identity]:
        return iter(self.identities)

    def __contains__(self, ident: Identity) -> bool:
        return Identity.of(ident.lhs, ident.rhs) in self.identities

    def subsystem(self, identities: Iterable[Identity]) -> "IdentitySystem":
        return IdentitySystem.build(self.signature, identities)

    def union(self, other: "IdentitySystem") -> "IdentitySystem":
        return IdentitySystem.build(self.signature, self.identities + other.identities)

    def __str__(self):
        return format_system(self)


# --------------------------------------------------------------------------
# DSL


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>[0-9]+)|(?P<eq>=|≈)|(?P<punct>[/;(),])"
)


def _tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise IdentitySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            value = m.group()
            yield (kind if kind != "punct" else value, value, line, col)
        pos = m.end()
    yield ("eof", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, text: str):
        self.tokens = list(_tokenize(text))
        self.i = 0
        self.signature: list[tuple[str, int]] = []

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self, kind: str):
        tok = self.peek()
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise IdentitySyntaxError(f"expected {kind!r}, found {shown!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def parse(self) -> IdentitySystem:
        identities: list[Identity] = []
        while self.peek()[0] != "eof":
            if self.peek()[0] == ";":
                self.i += 1
            elif self.peek()[0] == "name" and self.peek(1)[0] == "/":
                self.declaration()
            else:
                identities.extend(self.statement())
        return IdentitySystem.build(self.signature, identities)

    def declaration(self):
        name_tok = self.take("name")
        self.take("/")
        arity_tok = self.take("int")
        arity = int(arity_tok[1])
        if not 1 <= arity <= len(VARIABLE_NAMES):
            raise IdentitySyntaxError(f"arity of {name_tok[1]} must be 1..6", arity_tok[2], arity_tok[3])
        if name_tok[1] in VAR_INDEX:
            raise IdentitySyntaxError(f"{name_tok[1]!r} is a variable name", name_tok[2], name_tok[3])
        if any(s == name_tok[1] for s, _ in self.signature):
            raise IdentitySyntaxError(f"symbol {name_tok[1]!r} declared twice", name_tok[2], name_tok[3])
        self.signature.append((name_tok[1], arity))
        if self.peek()[0] != "eof":
            self.take(";")

    def statement(self) -> list[Identity]:
        terms = [self.term()]
        while self.peek()[0] == "eq":
            self.i += 1
            terms.append(self.term())
        if len(terms) < 2:
            tok = self.peek()
            raise IdentitySyntaxError("expected '=' in identity", tok[2], tok[3])
        if self.peek()[0] != "eof":
            self.take(";")
        return [Identity.of(a, b) for a, b in zip(terms, terms[1:])]

    def term(self) -> LinearTerm:
        tok = self.take("name")
        name, line, col = tok[1], tok[2], tok[3]
        if self.peek()[0] != "(":
            if name not in VAR_INDEX:
                raise IdentitySyntaxError(
                    f"{name!r} is not a variable (variables are {', '.join(VARIABLE_NAMES)})", line, col
                )
            return Var(name)
        arities = dict(self.signature)
        if name not in arities:
            raise IdentitySyntaxError(f"unknown symbol {name!r}", line, col)
        self.take("(")
        args = [self.variable()]
        while self.peek()[0] == ",":
            self.i += 1
            args.append(self.variable())
        self.take(")")
        if len(args) != arities[name]:
            raise IdentitySyntaxError(
                f"{name} has arity {arities[name]} but got {len(args)} arguments", line, col
            )
        return App(name, tuple(args))

    def variable(self) -> str:
        tok = self.take("name")
        if self.peek()[0] == "(":
            raise IdentitySyntaxError("nested terms are not linear", tok[2], tok[3])
        if tok[1] not in VAR_INDEX:
            raise IdentitySyntaxError(f"{tok[1]!r} is not a variable", tok[2], tok[3])
        return tok[1]


def parse_system(text: str) -> IdentitySystem:
    """Parse the identity DSL, e.g. ``"p/3; p(x,x,y) = p(x,y,y) = x;"``."""
    return _Parser(text).parse()


def format_system(sys: IdentitySystem) -> str:
    lines = ["; ".join(f"{s}/{a}" for s, a in sys.signature) + ";"]
    lines.extend(f"{i};" for i in sys.identities)
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# interpretations


@dataclass(frozen=True)
class Interpretation:
    algebra: FiniteAlgebra
    ops: tuple[tuple[str, TermOperation], ...]

    def __post_init__(self):
        for name, op in self.ops:
            if op.size != self.algebra.size:
                raise ValueError(f"operation for {name} is not over {self.algebra.name}")

    def __getitem__(self, symbol: str) -> TermOperation:
        for name, op in self.ops:
            if name == symbol:
                return op
        raise KeyError(symbol)

    def as_dict(self) -> dict[str, TermOperation]:
        return dict(self.ops)

    def describe(self) -> dict[str, str]:
        return {name: op.describe() for name, op in self.ops}


def _side_values(t: LinearTerm, grid: np.ndarray, table: np.ndarray | None, size: int):
    if isinstance(t, Var):
        return grid[VAR_INDEX[t.name]]
    return table[table_index([grid[VAR_INDEX[a]] for a in t.args], size)]


def identity_holds(ident: Identity, ops: Mapping[str, TermOperation], size: int) -> bool:
    """Exhaustively evaluate one identity over all assignments of its variables."""
    grid = argument_grid(size, max(1, len(ident.variables())))
    sides = []
    for t in (ident.lhs, ident.rhs):
        table = ops[t.symbol].array if isinstance(t, App) else None
        sides.append(_side_values(t, grid, table, size))
    return bool(np.array_equal(sides[0], sides[1]))


def satisfies(interp: Interpretation, sys: IdentitySystem) -> bool:
    ops = interp.as_dict()
    missing = {s for s, _ in sys.signature} - ops.keys()
    if missing:
        raise ValueError(f"interpretation does not cover {sorted(missing)}")
    for s, a in sys.signature:
        if ops[s].arity != a:
            raise ValueError(f"{s} has arity {a}, interpreted by an operation of arity {ops[s].arity}")
    return all(identity_holds(i, ops, interp.algebra.size) for i in sys.identities)


@functools.lru_cache(maxsize=256)
def clone_slice(alg: FiniteAlgebra, arity: int, cap: int = 10_000):
    return generate_term_operations(alg, arity, cap)


def candidate_operations(alg: FiniteAlgebra, arity: int, idempotent_only: bool = True,
                         cap: int = 10_000) -> tuple[TermOperation, ...]:
    members = clone_slice(alg, arity, cap).members
    if idempotent_only:
        members = tuple(m for m in members if is_idempotent(m))
    return members


def find_interpretations(alg: FiniteAlgebra, sys: IdentitySystem, idempotent_only: bool = True,
                         cap: int = 10_000, limit: int | None = None) -> list[Interpretation]:
    """All interpretations of the signature in the clone of ``alg`` satisfying ``sys``.

    Symbols are assigned in signature order; an identity is checked as soon as
    all its symbols are assigned.
    """
    symbols = [s for s, _ in sys.signature]
    cands = [candidate_operations(alg, a, idempotent_only, cap) for _, a in sys.signature]
    pending: list[list[Identity]] = [[] for _ in symbols]
    for ident in sys.identities:
        level = max((symbols.index(s) for s in ident.symbols()), default=-1)
        if level < 0:
            # variable-only identity: x = y holds only in a trivial algebra
            if alg.size > 1 and ident.lhs != ident.rhs:
                return []
            continue
        pending[level].append(ident)

    found: list[Interpretation] = []

    def search(level: int, chosen: dict[str, TermOperation]) -> bool:
        if level == len(symbols):
            found.append(Interpretation(alg, tuple((s, chosen[s]) for s in symbols)))
            return limit is not None and len(found) >= limit
        for op in cands[level]:
            chosen[symbols[level]] = op
            if all(identity_holds(i, chosen, alg.size) for i in pending[level]):
                if search(level + 1, chosen):
                    return True
        chosen.pop(symbols[level], None)
        return False

    search(0, {})
    return found


# --------------------------------------------------------------------------
# theories


def term_universe(signature: Sequence[tuple[str, int]], num_vars: int,
                  idempotent: bool = False) -> list[LinearTerm]:
    """All linear terms over the first ``num_vars`` variables.

    With ``idempotent`` set, applications to a single repeated variable are
    left out (they equal that variable).
    """
    names = VARIABLE_NAMES[:num_vars]
    terms: list[LinearTerm] = [Var(v) for v in names]
    for s, a in signature:
        for args in itertools.product(names, repeat=a):
            if idempotent and len(set(args)) == 1:
                continue
            terms.append(App(s, args))
    return terms


def term_tables(interp: Interpretation, terms: Sequence[LinearTerm], num_vars: int) -> list[bytes]:
    size = interp.algebra.size
    grid = argument_grid(size, num_vars)
    ops = interp.as_dict()
    out = []
    for t in terms:
        table = ops[t.symbol].array if isinstance(t, App) else None
        out.append(np.ascontiguousarray(_side_values(t, grid, table, size)).tobytes())
    return out


def theory_of(interp: Interpretation, num_vars: int) -> IdentitySystem:
    """Every linear identity in at most ``num_vars`` variables that ``interp`` satisfies."""
    if num_vars not in (1, 2, 3):
        raise ValueError("num_vars must be 1, 2 or 3")
    signature = tuple((s, op.arity) for s, op in interp.ops)
    terms = term_universe(signature, num_vars)
    groups: dict[bytes, list[LinearTerm]] = {}
    for t, tab in zip(terms, term_tables(interp, terms, num_vars)):
        groups.setdefault(tab, []).append(t)
    identities = [
        Identity.of(a, b)
        for members in groups.values()
        for a, b in itertools.combinations(members, 2)
    ]
    return IdentitySystem.build(signature, identities)


def two_variable_consequence(sys: IdentitySystem) -> IdentitySystem:
    """Replace each three-variable identity by its instances identifying two variables.

    Stored identities have their variables renamed, so "z" is not a stable
    name; taking every identification covers z -> x and z -> y for whichever
    variable played the role of z in the original text.
    """
    if sys.variable_count > 3:
        raise ValueError("two_variable_consequence needs at most 3 variables")
    out: list[Identity] = []
    for ident in sys.identities:
        vs = ident.variables()
        if len(vs) == 3:
            out.extend(ident.substitute({b: a}) for a, b in itertools.combinations(vs, 2))
        else:
            out.append(ident)
    return sys.subsystem(out)


# --------------------------------------------------------------------------
# closure and canonical form


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def classes(self) -> list[tuple[int, ...]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return [tuple(c) for c in out.values()]


@dataclass(frozen=True)
class Closure:
    """Equivalence relation on linear terms in ``num_vars`` variables generated
    by a system under transitivity, injective renaming and (optionally)
    idempotence."""

    signature: tuple[tuple[str, int], ...]
    num_vars: int
    terms: tuple[LinearTerm, ...]
    classes: tuple[tuple[int, ...], ...]  # nontrivial classes, sorted

    def pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset(p for c in self.classes for p in itertools.combinations(c, 2))

    def term_classes(self) -> list[list[LinearTerm]]:
        return [[self.terms[i] for i in c] for c in self.classes]


def closure(sys: IdentitySystem, num_vars: int | None = None, idempotent: bool = True,
            extra: Iterable[Identity] = ()) -> Closure:
    identities = list(sys.identities) + list(extra)
    if num_vars is None:
        num_vars = max([sys.variable_count, 1] + [len(i.variables()) for i in identities])
    terms = term_universe(sys.signature, num_vars, idempotent)
    index = {t: i for i, t in enumerate(terms)}
    uf = _UnionFind(len(terms))
    names = VARIABLE_NAMES[:num_vars]
    for ident in identities:
        vs = ident.variables()
        if len(vs) > num_vars:
            raise ValueError(f"{ident} uses more than {num_vars} variables")
        for image in itertools.permutations(names, len(vs)):
            m = dict(zip(vs, image))
            a = ident.lhs.rename(m)
            b = ident.rhs.rename(m)
            if idempotent:
                a, b = reduce_idempotent(a), reduce_idempotent(b)
            uf.union(index[a], index[b])
    classes = sorted(c for c in uf.classes() if len(c) > 1)
    return Closure(tuple(sys.signature), num_vars, tuple(terms), tuple(classes))


@dataclass(frozen=True)
class Symmetry:
    """Symbol renaming combined with per-symbol argument permutations.

    ``perms[s]`` lists, for each argument slot of the image term, which slot
    of the original term it reads from.
    """

    rename: tuple[tuple[str, str], ...]
    perms: tuple[tuple[str, tuple[int, ...]], ...]

    def apply(self, t: LinearTerm) -> LinearTerm:
        if isinstance(t, Var):
            return t
        perm = dict(self.perms)[t.symbol]
        return App(dict(self.rename)[t.symbol], tuple(t.args[j] for j in perm))


def symmetries(signature: Sequence[tuple[str, int]]) -> list[Symmetry]:
    """Every combination of same-arity symbol renaming and argument permutation."""
    symbols = [s for s, _ in signature]
    arities = dict(signature)
    by_arity: dict[int, list[str]] = {}
    for s in symbols:
        by_arity.setdefault(arities[s], []).append(s)
    renamings = [{}]
    for group in by_arity.values():
        renamings = [
            {**r, **dict(zip(group, perm))}
            for r in renamings
            for perm in itertools.permutations(group)
        ]
    perm_choices = [list(itertools.permutations(range(arities[s]))) for s in symbols]
    out = []
    for r in renamings:
        for perms in itertools.product(*perm_choices):
            out.append(Symmetry(tuple(sorted(r.items())), tuple(zip(symbols, perms))))
    return out


def _partition_key(term_classes: Iterable[Iterable[LinearTerm]]) -> tuple:
    return tuple(sorted(tuple(sorted(t.key() for t in c)) for c in term_classes))


def canonical_key(sys: IdentitySystem, idempotent: bool = True) -> tuple:
    """Least image of the system's closure under all symmetries."""
    return _canonical(sys, idempotent)[0]


def _canonical(sys: IdentitySystem, idempotent: bool):
    cl = closure(sys, idempotent=idempotent)
    best = None
    for g in symmetries(sys.signature):
        image = [[g.apply(t) for t in c] for c in cl.term_classes()]
        k = _partition_key(image)
        if best is None or k < best[0]:
            best = (k, image)
    return best[0], best[1], cl.num_vars


def spanning_system(signature, term_classes: Iterable[Sequence[LinearTerm]], num_vars: int,
                    idempotent: bool = True) -> IdentitySystem:
    """A small system whose closure is the given partition.

    Each class contributes the chain of its sorted members; identities already
    implied by the kept ones are skipped.
    """
    chain: list[Identity] = []
    for c in term_classes:
        members = sorted(c, key=lambda t: t.key())
        chain.extend(Identity.of(a, b) for a, b in zip(members, members[1:]))
    chain = sorted(set(chain), key=Identity.key)
    kept: list[Identity] = []
    base = IdentitySystem(tuple(signature), ())
    current = closure(base, num_vars, idempotent).pairs()
    for ident in chain:
        cl = closure(base, num_vars, idempotent, extra=kept + [ident]).pairs()
        if cl != current:
            kept.append(ident)
            current = cl
    for ident in list(kept):
        rest = [k for k in kept if k != ident]
        if closure(base, num_vars, idempotent, extra=rest).pairs() == current:
            kept = rest
    return IdentitySystem.build(signature, kept)


def canonicalize(sys: IdentitySystem, idempotent: bool = True) -> IdentitySystem:
    """Canonical representative up to symbol/argument permutations, variable
    renaming, side swaps, ordering and (by default) idempotence."""
    _, image, num_vars = _canonical(sys, idempotent)
    return spanning_system(sys.signature, image, num_vars, idempotent)


def equivalent(a: IdentitySystem, b: IdentitySystem, idempotent: bool = True) -> bool:
    return a.signature == b.signature and canonical_key(a, idempotent) == canonical_key(b, idempotent)
