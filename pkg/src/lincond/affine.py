"""Idempotent reducts of modules: realizability of linear identity systems.

In the full idempotent reduct of a module over Z_n every k-ary term operation
is ``c_1 x_1 + ... + c_k x_k`` with ``c_1 + ... + c_k = 1``.  A linear identity
holds for such an assignment iff the coefficients of every variable agree on
both sides, so realizability reduces to an integer congruence system
``A c = b (mod n)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import argument_grid
from .identities import VAR_INDEX, App, Identity, IdentitySystem, Var
from .snf import invariant_factors, prime_factors, primes, rank_mod_p, solve_mod_prime

DEFAULT_BRUTE_BOUND = 50
WITNESS_ENUMERATION_LIMIT = 200_000


@dataclass(frozen=True)
class AffineOperation:
    modulus: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if any(not 0 <= c < self.modulus for c in self.coefficients):
            raise ValueError(f"coefficients {self.coefficients} are not reduced mod {self.modulus}")
        if sum(self.coefficients) % self.modulus != 1 % self.modulus:
            raise ValueError(f"coefficients {self.coefficients} do not sum to 1 mod {self.modulus}")

    @property
    def arity(self) -> int:
        return len(self.coefficients)

    def __call__(self, *args: int) -> int:
        return sum(c * a for c, a in zip(self.coefficients, args)) % self.modulus

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coefficients):
            if c:
                var = list(VAR_INDEX)[i] if self.arity <= 6 else f"x{i + 1}"
                terms.append(var if c == 1 else f"{c}{var}")
        return " + ".join(terms)


def enumerate_idempotent_affine(n: int, k: int) -> list[AffineOperation]:
    """Every idempotent affine k-ary operation over Z_n, in lexicographic order."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 and k >= 1")
    out = []
    for head in itertools.product(range(n), repeat=k - 1):
        out.append(AffineOperation(n, head + ((1 - sum(head)) % n,)))
    return out


def _eval_side(t, assignment: Mapping[str, AffineOperation], grid: np.ndarray, n: int) -> np.ndarray:
    if isinstance(t, Var):
        return grid[VAR_INDEX[t.name]] % n
    coeffs = assignment[t.symbol].coefficients
    total = np.zeros(grid.shape[1], dtype=np.int64)
    for c, a in zip(coeffs, t.args):
        total = total + c * grid[VAR_INDEX[a]]
    return total % n


def affine_satisfies(assignment: Mapping[str, AffineOperation], sys: IdentitySystem, n: int) -> bool:
    """Exhaustive check over all assignments of Z_n values to the variables."""
    for s, op in assignment.items():
        if op.modulus != n:
            raise ValueError(f"{s} is an operation mod {op.modulus}, expected mod {n}")
    for ident in sys.identities:
        grid = argument_grid(n, max(1, len(ident.variables())))
        if not np.array_equal(_eval_side(ident.lhs, assignment, grid, n),
                              _eval_side(ident.rhs, assignment, grid, n)):
            return False
    return True


# --------------------------------------------------------------------------
# coefficient systems


@dataclass(frozen=True)
class CoefficientSystem:
    unknowns: tuple[tuple[str, int], ...]
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[int, ...]
    provenance: tuple[tuple, ...]

    def augmented(self) -> list[list[int]]:
        return [list(row) + [b] for row, b in zip(self.matrix, self.rhs)]

    def rows(self) -> list[list[int]]:
        return [list(row) for row in self.matrix]

    def describe(self) -> list[str]:
        out = []
        for row, b, prov in zip(self.matrix, self.rhs, self.provenance):
            terms = [f"{'+' if c > 0 else '-'}{abs(c) if abs(c) != 1 else ''}{s}{i + 1}"
                     for c, (s, i) in zip(row, self.unknowns) if c]
            lhs = " ".join(terms).lstrip("+") or "0"
            out.append(f"{lhs} = {b}    [{prov[0]} / {prov[1]}]")
        return out


def _coefficients(t, var: str, column: Mapping[tuple[str, int], int], width: int):
    row = [0] * width
    const = 0
    if isinstance(t, Var):
        const = int(t.name == var)
    else:
        for i, a in enumerate(t.args):
            if a == var:
                row[column[(t.symbol, i)]] += 1
    return row, const


def coefficient_system(sys: IdentitySystem) -> CoefficientSystem:
    """One row per identity and variable, plus one idempotency row per symbol.

    Row signs are normalized so the first nonzero matrix entry is positive.
    """
    unknowns = tuple((s, i) for s, a in sys.signature for i in range(a))
    column = {u: j for j, u in enumerate(unknowns)}
    width = len(unknowns)
    matrix, rhs, prov = [], [], []
    for ident in sys.identities:
        for v in ident.variables():
            lrow, lconst = _coefficients(ident.lhs, v, column, width)
            rrow, rconst = _coefficients(ident.rhs, v, column, width)
            row = [x - y for x, y in zip(lrow, rrow)]
            b = rconst - lconst
            lead = next((x for x in row if x), 0)
            if lead < 0:
                row, b = [-x for x in row], -b
            matrix.append(tuple(row))
            rhs.append(b)
            prov.append((str(ident), v))
    for s, a in sys.signature:
        row = [0] * width
        for i in range(a):
            row[column[(s, i)]] = 1
        matrix.append(tuple(row))
        rhs.append(1)
        prov.append((s, "idempotency"))
    return CoefficientSystem(unknowns, tuple(matrix), tuple(rhs), tuple(prov))


def congruence_solvable(cs: CoefficientSystem, n: int) -> bool:
    from .snf import solve_mod

    return solve_mod(cs.rows(), list(cs.rhs), n) is not None


# --------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Realizable:
    modulus: int
    witness: tuple[tuple[str, AffineOperation], ...]

    status = "realizable"

    def to_json(self) -> dict:
        return {
            "status": "realizable",
            "modulus": self.modulus,
            "witness": {s: list(op.coefficients) for s, op in self.witness},
        }


@dataclass(frozen=True)
class PrimeRank:
    p: int
    rank_a: int
    rank_ab: int


@dataclass(frozen=True)
class Unrealizable:
    invariant_factors_a: tuple[int, ...]
    invariant_factors_ab: tuple[int, ...]
    primes_tested: tuple[PrimeRank, ...]
    brute_bound: int = field(default=0, compare=False)

    status = "unrealizable"

    def to_json(self) -> dict:
        return {
            "status": "unrealizable",
            "invariant_factors_A": list(self.invariant_factors_a),
            "invariant_factors_Ab": list(self.invariant_factors_ab),
            "primes_tested": [
                {"p": r.p, "rankA": r.rank_a, "rankAb": r.rank_ab} for r in self.primes_tested
            ],
        }


Verdict = Realizable | Unrealizable


def verdict_from_json(data: Mapping) -> Verdict:
    if data["status"] == "realizable":
        n = data["modulus"]
        return Realizable(n, tuple((s, AffineOperation(n, tuple(c))) for s, c in data["witness"].items()))
    return Unrealizable(
        tuple(data["invariant_factors_A"]),
        tuple(data["invariant_factors_Ab"]),
        tuple(PrimeRank(r["p"], r["rankA"], r["rankAb"]) for r in data["primes_tested"]),
    )


class VerdictInconsistency(AssertionError):
    """The algebraic decision disagreed with direct evaluation."""


def _witness_key(solution: Sequence[int], cs: CoefficientSystem, signature) -> tuple:
    # sparsest first, then weight on earlier argument positions
    key, j = [], 0
    for _, a in signature:
        coeffs = solution[j:j + a]
        j += a
        key.append((sum(1 for c in coeffs if c), tuple(reversed(coeffs))))
    return tuple(key)


def witness_mod_prime(sys: IdentitySystem, p: int, cs: CoefficientSystem | None = None):
    """Preferred witness modulo a prime, or None when unsolvable."""
    cs = cs or coefficient_system(sys)
    sol = solve_mod_prime(cs.rows(), list(cs.rhs), p)
    if sol is None:
        return None
    particular, basis = sol
    best = particular
    if p ** len(basis) <= WITNESS_ENUMERATION_LIMIT:
        best = min(
            (
                [(x + sum(c * v[i] for c, v in zip(combo, basis))) % p for i, x in enumerate(particular)]
                for combo in itertools.product(range(p), repeat=len(basis))
            ),
            key=lambda s: _witness_key(s, cs, sys.signature),
        )
    return _assignment(best, sys.signature, p)


def _assignment(solution: Sequence[int], signature, n: int) -> tuple[tuple[str, AffineOperation], ...]:
    out, j = [], 0
    for s, a in signature:
        out.append((s, AffineOperation(n, tuple(int(c) % n for c in solution[j:j + a]))))
        j += a
    return tuple(out)


def _realizable(sys: IdentitySystem, n: int, cs: CoefficientSystem) -> Realizable:
    witness = witness_mod_prime(sys, n, cs)
    if witness is None or not affine_satisfies(dict(witness), sys, n):
        raise VerdictInconsistency(f"rank analysis says mod {n} is solvable but no witness checks out")
    return Realizable(n, witness)


def prime_analysis(cs: CoefficientSystem):
    """Return ``(prime or None, factors_a, factors_ab, tested)``.

    The prime is one modulo which the congruence system is solvable; when the
    ranks over Q agree it is the least prime dividing no invariant factor.
    """
    a = cs.rows()
    ab = cs.augmented()
    fa = invariant_factors(a) if a and a[0] else []
    fab = invariant_factors(ab)
    if len(fa) == len(fab):
        bad = {q for d in fa + fab for q in prime_factors(d)}
        p = next(q for q in primes() if q not in bad)
        return p, fa, fab, ()
    tested = []
    for p in prime_factors(fab[-1]):
        tested.append(PrimeRank(p, rank_mod_p(a, p), rank_mod_p(ab, p)))
    good = [r.p for r in tested if r.rank_a == r.rank_ab]
    return (min(good) if good else None), fa, fab, tuple(tested)


def is_realizable(sys: IdentitySystem) -> bool:
    """Fast path: True iff the system holds in some full idempotent module reduct."""
    return prime_analysis(coefficient_system(sys))[0] is not None


def finite_ring_verdict(sys: IdentitySystem, brute_bound: int = DEFAULT_BRUTE_BOUND) -> Verdict:
    """Decide realizability in full idempotent reducts of modules over finite rings.

    Solvable modulo some n > 1 iff solvable modulo some prime.  With equal
    ranks over Q almost every prime works; otherwise only primes dividing the
    last invariant factor of ``[A|b]`` can, and each is checked by rank.  An
    Unrealizable answer is cross-checked by brute search for every modulus up
    to ``brute_bound``.
    """
    cs = coefficient_system(sys)
    p, fa, fab, tested = prime_analysis(cs)
    if p is not None:
        return _realizable(sys, p, cs)
    if brute_bound >= 2:
        for n in range(2, brute_bound + 1):
            found = brute_force_witness(sys, n)
            if found is not None:
                raise VerdictInconsistency(f"certificate claims unrealizable but mod {n} has {found}")
    return Unrealizable(tuple(fa), tuple(fab), tested, brute_bound)


def verdict_mod(sys: IdentitySystem, n: int) -> Realizable | None:
    """Preferred witness modulo a given n (prime or composite), or None."""
    if n < 2:
        raise ValueError("modulus must be >= 2")
    if len(prime_factors(n)) == 1 and prime_factors(n)[0] == n:
        w = witness_mod_prime(sys, n)
        return Realizable(n, w) if w is not None else None
    found = brute_force_witness(sys, n)
    return Realizable(n, found) if found is not None else None


# --------------------------------------------------------------------------
# brute search (independent of the linear algebra above)


def _basis_points(num_vars: int) -> np.ndarray:
    """The zero assignment and each unit assignment, as columns."""
    pts = np.zeros((num_vars, num_vars + 1), dtype=np.int64)
    for v in range(num_vars):
        pts[v, v + 1] = 1
    return pts


def _side_on_points(t, coeff_arrays: Mapping[str, np.ndarray], pts: np.ndarray, n: int) -> np.ndarray:
    """Values of one side for a batch of candidates: shape (batch, points)."""
    if isinstance(t, Var):
        return pts[VAR_INDEX[t.name]][None, :] % n
    coeffs = coeff_arrays[t.symbol]  # (batch, arity)
    vals = np.zeros((coeffs.shape[0], pts.shape[1]), dtype=np.int64)
    for i, a in enumerate(t.args):
        vals += coeffs[:, i:i + 1] * pts[VAR_INDEX[a]][None, :]
    return vals % n


def _holds(ident: Identity, coeff_arrays, n: int) -> np.ndarray:
    # both sides are affine maps, so agreement on an affine basis is agreement everywhere
    pts = _basis_points(max(1, len(ident.variables())))
    lhs = _side_on_points(ident.lhs, coeff_arrays, pts, n)
    rhs = _side_on_points(ident.rhs, coeff_arrays, pts, n)
    return np.all(lhs == rhs, axis=1)


def brute_force_witness(sys: IdentitySystem, n: int):
    """Search every idempotent affine assignment mod n; return one or None."""
    symbols = [s for s, _ in sys.signature]
    arity = dict(sys.signature)
    cands = {}
    for s in symbols:
        ops = np.array([op.coefficients for op in enumerate_idempotent_affine(n, arity[s])], dtype=np.int64)
        own = [i for i in sys.identities if i.symbols() == frozenset({s})]
        keep = np.ones(len(ops), dtype=bool)
        for ident in own:
            keep &= _holds(ident, {s: ops}, n)
        cands[s] = ops[keep]
        if not len(cands[s]):
            return None
    for ident in sys.identities:
        if not ident.symbols() and ident.lhs != ident.rhs:
            return None
    mixed = [i for i in sys.identities if len(i.symbols()) > 1]

    def search(level: int, chosen: dict[str, np.ndarray]):
        s = symbols[level]
        if level == len(symbols) - 1:
            batch = {k: np.repeat(v[None, :], len(cands[s]), axis=0) for k, v in chosen.items()}
            batch[s] = cands[s]
            ok = np.ones(len(cands[s]), dtype=bool)
            for ident in mixed:
                if ident.symbols() <= batch.keys():
                    ok &= _holds(ident, batch, n)
            hits = np.flatnonzero(ok)
            if len(hits):
                final = {**chosen, s: cands[s][hits[0]]}
                return tuple((t, AffineOperation(n, tuple(int(c) for c in final[t]))) for t in symbols)
            return None
        for row in cands[s]:
            nxt = {**chosen, s: row}
            single = {k: v[None, :] for k, v in nxt.items()}
            if all(_holds(i, single, n)[0] for i in mixed if i.symbols() <= nxt.keys()):
                found = search(level + 1, nxt)
                if found is not None:
                    return found
        return None

    if not symbols:
        return ()
    return search(0, {})
