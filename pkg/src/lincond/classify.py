"""Three-filter search for candidate systems on small signatures.

A candidate system must hold in the test algebra with a projection/majority
clone (default C), hold in the 2-element semilattice B, and fail in every
full idempotent reduct of a module over a finite ring.  For each pair of
interpretations the two theories are intersected; unrealizable intersections
are descended to their minimal unrealizable sub-relations, which are then
reported up to symmetry.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .affine import Unrealizable, coefficient_system, finite_ring_verdict, prime_analysis
from .algebra import FiniteAlgebra, builtin_algebras
from .identities import (
    VARIABLE_NAMES,
    Identity,
    IdentitySystem,
    Interpretation,
    LinearTerm,
    candidate_operations,
    canonical_key,
    canonicalize,
    closure,
    find_interpretations,
    reduce_idempotent,
    satisfies,
    spanning_system,
    term_tables,
    term_universe,
)
from .systems import EXPECTED_FINAL, EXPECTED_SURVIVORS, named

SIGNATURE_CLASSES: dict[str, tuple[tuple[str, int], ...]] = {
    "one-binary": (("t", 2),),
    "two-binary": (("t", 2), ("s", 2)),
    "one-ternary": (("p", 3),),
    "binary+ternary": (("t", 2), ("p", 3)),
    "two-ternary": (("p", 3), ("q", 3)),
}

Relation = frozenset  # of frozenset blocks of term indices, nontrivial blocks only


# --------------------------------------------------------------------------
# relations on the term universe


class TermSpace:
    """Linear terms in ``num_vars`` variables modulo idempotence, with the
    action of variable permutations on term indices."""

    def __init__(self, signature: Sequence[tuple[str, int]], num_vars: int):
        self.signature = tuple(signature)
        self.num_vars = num_vars
        self.terms: list[LinearTerm] = term_universe(signature, num_vars, idempotent=True)
        self.index = {t: i for i, t in enumerate(self.terms)}
        names = VARIABLE_NAMES[:num_vars]
        self.actions: list[tuple[int, ...]] = []
        for perm in itertools.permutations(names):
            m = dict(zip(names, perm))
            self.actions.append(tuple(self.index[t.rename(m)] for t in self.terms))

    def relation_from_labels(self, labels: Sequence) -> Relation:
        blocks: dict = {}
        for i, lab in enumerate(labels):
            blocks.setdefault(lab, []).append(i)
        return frozenset(frozenset(b) for b in blocks.values() if len(b) > 1)

    def relation_from_system(self, sys: IdentitySystem) -> Relation:
        cl = closure(sys, self.num_vars, idempotent=True)
        # closure enumerates the same universe in the same order
        return frozenset(frozenset(c) for c in cl.classes)

    def block_terms(self, rel: Relation) -> list[list[LinearTerm]]:
        return [[self.terms[i] for i in sorted(b)] for b in sorted(rel, key=sorted)]

    def chain_identities(self, rel: Relation) -> list[Identity]:
        out = set()
        for block in rel:
            members = sorted(block)
            out.update(Identity.of(self.terms[a], self.terms[b]) for a, b in zip(members, members[1:]))
        return sorted(out, key=Identity.key)

    def system(self, rel: Relation) -> IdentitySystem:
        return spanning_system(self.signature, self.block_terms(rel), self.num_vars)

    def core(self, labels: dict[int, int]) -> Relation:
        """Largest permutation-invariant relation below the given partition."""
        n = len(self.terms)
        keys = [tuple(labels.get(g[i], -1 - g[i]) for g in self.actions) for i in range(n)]
        return self.relation_from_labels(keys)


class RealizabilityCache:
    def __init__(self, space: TermSpace):
        self.space = space
        self.memo: dict[Relation, bool] = {}

    def unrealizable(self, rel: Relation) -> bool:
        if rel not in self.memo:
            sys = IdentitySystem.build(self.space.signature, self.space.chain_identities(rel))
            self.memo[rel] = prime_analysis(coefficient_system(sys))[0] is None
        return self.memo[rel]


def _single_splits(rel: Relation):
    """Every partition obtained by cutting one block in two, as a label map."""
    blocks = sorted((sorted(b) for b in rel))
    base: dict[int, int] = {}
    for k, b in enumerate(blocks):
        for i in b:
            base[i] = k
    fresh = len(blocks)
    for k, b in enumerate(blocks):
        head, rest = b[0], b[1:]
        for mask in range(2 ** len(rest) - 1):
            labels = dict(base)
            for bit, i in enumerate(rest):
                if mask >> bit & 1:
                    labels[i] = k
                else:
                    labels[i] = fresh
            labels[head] = k
            yield labels


def minimal_relations(space: TermSpace, rel: Relation, cache: RealizabilityCache | None = None) -> list[Relation]:
    """Minimal permutation-invariant unrealizable relations below ``rel``."""
    cache = cache or RealizabilityCache(space)
    if not cache.unrealizable(rel):
        raise ValueError("relation is realizable; nothing to minimize")
    seen = {rel}
    stack = [rel]
    minimal = []
    while stack:
        cur = stack.pop()
        is_min = True
        for labels in _single_splits(cur):
            child = space.core(labels)
            if cache.unrealizable(child):
                is_min = False
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        if is_min:
            minimal.append(cur)
    return sorted(minimal, key=lambda r: sorted(sorted(b) for b in r))


def minimal_unrealizable_subsystems(sys: IdentitySystem) -> list[IdentitySystem]:
    """All minimal sub-systems (up to transitive consequence) that are still unrealizable."""
    if isinstance(finite_ring_verdict(sys, brute_bound=0), Unrealizable) is False:
        raise ValueError("system is realizable in some module reduct")
    num_vars = max(2, sys.variable_count)
    space = TermSpace(sys.signature, num_vars)
    rel = space.relation_from_system(sys)
    return [space.system(r) for r in minimal_relations(space, rel)]


# --------------------------------------------------------------------------
# interpretations of a signature in a test algebra


def all_interpretations(alg: FiniteAlgebra, signature, idempotent_only: bool = True) -> list[Interpretation]:
    cands = [candidate_operations(alg, a, idempotent_only) for _, a in signature]
    return [
        Interpretation(alg, tuple((s, op) for (s, _), op in zip(signature, combo)))
        for combo in itertools.product(*cands)
    ]


def interpretation_json(interp: Interpretation) -> dict:
    return {
        "algebra": interp.algebra.name,
        "ops": {s: {"term": op.describe(), "table": list(op.table)} for s, op in interp.ops},
    }


# --------------------------------------------------------------------------
# reports


@dataclass
class Example3Status:
    realized: bool
    witnesses: list[Interpretation] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "status": "realized-with-witness" if self.realized else "not-realized",
            "witness": interpretation_json(self.witnesses[0]) if self.witnesses else None,
            "witness_count": len(self.witnesses),
        }


@dataclass
class Survivor:
    system: IdentitySystem
    label: str | None
    witness_a: Interpretation
    witness_b: Interpretation
    certificate: Unrealizable
    minimal_subsystems: list[IdentitySystem]
    example3: Example3Status | None = None

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "system": [str(i) for i in self.system.identities],
            "witness_A": interpretation_json(self.witness_a),
            "witness_B": interpretation_json(self.witness_b),
            "certificate": self.certificate.to_json(),
            "minimal_subsystems": [[str(i) for i in s.identities] for s in self.minimal_subsystems],
        }
        if self.example3 is not None:
            out["example3"] = self.example3.to_json()
        return out


@dataclass
class SurvivorReport:
    signature_class: str
    num_vars: int
    test_a: str
    test_b: str
    pairs_examined: int
    theories_examined: int
    unrealizable_theories: int
    survivors: list[Survivor]

    def labels(self) -> list[str | None]:
        return [s.label for s in self.survivors]

    def to_json(self) -> dict:
        return {
            "class": self.signature_class,
            "num_vars": self.num_vars,
            "test_algebras": {"A": self.test_a, "B": self.test_b},
            "pairs_examined": self.pairs_examined,
            "theories_examined": self.theories_examined,
            "unrealizable_theories": self.unrealizable_theories,
            "survivors": [s.to_json() for s in self.survivors],
        }


def known_labels(signature) -> dict[tuple, str]:
    """Canonical keys of the named two-ternary systems."""
    if tuple(signature) != SIGNATURE_CLASSES["two-ternary"]:
        return {}
    return {canonical_key(named(n)): n for n in ("S-CAND", "S-NEW", "S-MAJ", "S-3", "S-PM-FULL", "S-MM-FULL")}


def classify_signature(cls: str, test_a: FiniteAlgebra | None = None, test_b: FiniteAlgebra | None = None,
                       num_vars: int = 2) -> SurvivorReport:
    builtins = builtin_algebras()
    test_a = test_a or builtins["C"]
    test_b = test_b or builtins["B"]
    signature = SIGNATURE_CLASSES[cls]
    space = TermSpace(signature, num_vars)
    cache = RealizabilityCache(space)

    def labelled(alg):
        out = []
        for interp in all_interpretations(alg, signature):
            out.append((interp, term_tables(interp, space.terms, num_vars)))
        return out

    side_a, side_b = labelled(test_a), labelled(test_b)
    theories: dict[Relation, tuple[Interpretation, Interpretation]] = {}
    for (ia, ta), (ib, tb) in itertools.product(side_a, side_b):
        rel = space.relation_from_labels(list(zip(ta, tb)))
        theories.setdefault(rel, (ia, ib))

    survivors: dict[tuple, Survivor] = {}
    unrealizable = 0
    labels = known_labels(signature)
    for rel, (ia, ib) in sorted(theories.items(), key=lambda kv: sorted(sorted(b) for b in kv[0])):
        if not cache.unrealizable(rel):
            continue
        unrealizable += 1
        for m in minimal_relations(space, rel, cache):
            sys = space.system(m)
            key = canonical_key(sys)
            if key in survivors:
                continue
            canon = canonicalize(sys)
            cert = finite_ring_verdict(canon, brute_bound=0)
            wa = _witness(test_a, canon, ia, sys)
            wb = _witness(test_b, canon, ib, sys)
            survivors[key] = Survivor(canon, labels.get(key), wa, wb, cert, [canon])

    ordered = sorted(survivors.values(), key=lambda s: (s.label is None, s.label or "", str(s.system)))
    return SurvivorReport(cls, num_vars, test_a.name, test_b.name, len(side_a) * len(side_b),
                          len(theories), unrealizable, ordered)


def _witness(alg: FiniteAlgebra, canon: IdentitySystem, source: Interpretation, sys: IdentitySystem) -> Interpretation:
    if satisfies(source, canon):
        return source
    found = find_interpretations(alg, canon, limit=1)
    if not found:
        raise AssertionError(f"{alg.name} lost a witness for {canon} (source system {sys})")
    return found[0]


def check_example3(sys: IdentitySystem, alg: FiniteAlgebra | None = None) -> Example3Status:
    """Search the ternary clone of C x D for interpretations of ``sys``."""
    alg = alg or builtin_algebras()["CxD"]
    found = find_interpretations(alg, sys)
    return Example3Status(bool(found), found)


@dataclass
class FullReport:
    classes: dict[str, SurvivorReport]
    final_candidates: list[Survivor]
    findings: list[str]

    def final_labels(self) -> list[str | None]:
        return [s.label for s in self.final_candidates]

    def to_json(self) -> dict:
        return {
            "classes": {k: v.to_json() for k, v in self.classes.items()},
            "final_candidates": [
                {"label": s.label, "system": [str(i) for i in s.system.identities]}
                for s in self.final_candidates
            ],
            "findings": self.findings,
        }


def full_report(num_vars: int = 2) -> FullReport:
    classes = {name: classify_signature(name, num_vars=num_vars) for name in SIGNATURE_CLASSES}
    findings = []
    for name, rep in classes.items():
        if name != "two-ternary" and rep.survivors:
            findings.append(f"{name}: expected no survivors, found {len(rep.survivors)}")
    two = classes["two-ternary"]
    for s in two.survivors:
        s.example3 = check_example3(s.system)
    got = sorted(str(lab) for lab in two.labels())
    if got != sorted(EXPECTED_SURVIVORS):
        findings.append(f"two-ternary survivors {got} differ from expected {sorted(EXPECTED_SURVIVORS)}")
    final = [s for s in two.survivors if s.example3 and s.example3.realized]
    final_labels = sorted(str(s.label) for s in final)
    if final_labels != sorted(EXPECTED_FINAL):
        findings.append(f"final candidates {final_labels} differ from expected {list(EXPECTED_FINAL)}")
    return FullReport(classes, final, findings)
