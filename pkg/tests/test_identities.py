import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from lincond import systems
from lincond.algebra import generate_term_operations, make_majority_first, make_semilattice, projection
from lincond.identities import (
    App,
    Identity,
    IdentitySyntaxError,
    IdentitySystem,
    Interpretation,
    Var,
    canonical_key,
    canonicalize,
    closure,
    equivalent,
    find_interpretations,
    format_system,
    parse_system,
    satisfies,
    symmetries,
    term_universe,
    theory_of,
    two_variable_consequence,
)


def op_named(alg, arity, flag):
    from lincond.algebra import classify_operation

    for m in generate_term_operations(alg, arity):
        if flag(classify_operation(m)):
            return m
    raise LookupError


@pytest.fixture(scope="module")
def c_ops():
    c = make_majority_first(2)
    pi1 = projection(2, 3, 0)
    maj = op_named(c, 3, lambda k: k.is_majority)
    return c, pi1, maj


@pytest.fixture(scope="module")
def b_meet3():
    b = make_semilattice()
    return b, op_named(b, 3, lambda k: k.is_wnu)


# ---------------------------------------------------------------- parsing


def test_parse_s_cand():
    s = parse_system("p/3; q/3; p(x,x,y)=p(x,y,y); p(x,y,x)=q(x,x,y)=q(x,y,x)=q(y,x,x)")
    assert len(s) == 4
    assert s.signature == (("p", 3), ("q", 3))
    assert s.variable_count == 2
    assert equivalent(s, systems.named("S-CAND"))


def test_reflexive_dropped():
    assert len(parse_system("p/3; p(x,y,z)=p(x,y,z)")) == 0


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("p/2; p(x,y,z)=x", 1, 6, "arity 2"),
        ("p/3;\nq(x,y,z)=x;", 2, 1, "unknown symbol"),
        ("p/3;\np(x,y,p(x,y,z))=x;", 2, 7, "nested"),
        ("p/3; p(x,y,z) x;", 1, 15, "expected"),
    ],
)
def test_parse_errors(text, line, col, fragment):
    with pytest.raises(IdentitySyntaxError, match=fragment) as info:
        parse_system(text)
    assert (info.value.line, info.value.col) == (line, col)


def test_parse_comments_and_approx():
    s = parse_system("# header\np/3; # ternary\np(x,x,y) ≈ x; # left\n")
    assert s.identities == (Identity.of(Var("x"), App("p", ("x", "x", "y"))),)


@pytest.mark.parametrize("name", sorted(systems.SOURCES))
def test_format_round_trip(name):
    s = systems.named(name)
    assert parse_system(format_system(s)) == s


def test_identity_is_unordered():
    a, b = App("p", ("x", "y", "y")), App("q", ("y", "x", "x"))
    assert Identity.of(a, b) == Identity.of(b, a)
    renamed = Identity.of(App("p", ("z", "u", "u")), App("q", ("u", "z", "z")))
    assert renamed == Identity.of(a, b)


def test_system_rejects_unknown_symbol():
    with pytest.raises(ValueError, match="unknown symbol"):
        IdentitySystem((("p", 3),), (Identity.of(Var("x"), App("q", ("x", "y", "x"))),))


# ---------------------------------------------------------------- canonical form


def test_subset_one_matches_s_cand():
    s1 = systems.system(systems.SUBSET_1)
    assert canonicalize(s1) == canonicalize(systems.named("S-CAND"))


@pytest.mark.parametrize("name", sorted(systems.SOURCES))
def test_canonicalize_idempotent(name):
    c = canonicalize(systems.named(name))
    assert canonicalize(c) == c
    assert equivalent(c, systems.named(name))


def _naive_partition(sys):
    """Equivalence classes of 2-variable terms mod idempotence, by brute merging."""
    def norm(t):
        if isinstance(t, Var):
            return t.name
        if len(set(t.args)) == 1:
            return t.args[0]
        return (t.symbol, t.args)

    universe = {"x", "y"} | {(s, a) for s in ("p", "q") for a in itertools.product("xy", repeat=3)
                             if len(set(a)) > 1}
    blocks = {t: {t} for t in universe}
    for ident in sys.identities:
        for m in ({"x": "x", "y": "y"}, {"x": "y", "y": "x"}):
            a, b = norm(ident.lhs.rename(m)), norm(ident.rhs.rename(m))
            merged = blocks[a] | blocks[b]
            for t in merged:
                blocks[t] = merged
    return frozenset(frozenset(b) for b in blocks.values() if len(b) > 1)


def test_s_cand_and_s_maj_not_in_same_orbit():
    target = _naive_partition(systems.named("S-MAJ"))
    source = systems.named("S-CAND")
    for sym_map in ({"p": "p", "q": "q"}, {"p": "q", "q": "p"}):
        for pp in itertools.permutations(range(3)):
            for qp in itertools.permutations(range(3)):
                perm = {"p": pp, "q": qp}

                def move(t):
                    if isinstance(t, Var):
                        return t
                    return App(sym_map[t.symbol], tuple(t.args[j] for j in perm[t.symbol]))

                image = IdentitySystem.build(
                    source.signature, [Identity.of(move(i.lhs), move(i.rhs)) for i in source])
                assert _naive_partition(image) != target
    assert canonicalize(source) != canonicalize(systems.named("S-MAJ"))


def test_symmetry_count():
    assert len(symmetries((("p", 3), ("q", 3)))) == 2 * 36
    assert len(symmetries((("t", 2), ("p", 3)))) == 12


# ---------------------------------------------------------------- satisfaction


def test_meet_satisfies_s_cand(b_meet3):
    b, m3 = b_meet3
    assert satisfies(Interpretation(b, (("p", m3), ("q", m3))), systems.named("S-CAND"))


def test_projection_majority_satisfies_s_cand(c_ops):
    c, pi1, maj = c_ops
    assert satisfies(Interpretation(c, (("p", pi1), ("q", maj))), systems.named("S-CAND"))
    assert not satisfies(Interpretation(c, (("p", pi1), ("q", pi1))), systems.named("S-CAND"))


def test_find_interpretations_c(c_ops):
    c, pi1, maj = c_ops
    found = find_interpretations(c, systems.named("S-CAND"))
    pairs = {(i["p"], i["q"]) for i in found}
    assert (pi1, maj) in pairs
    # oracle: exhaust the 4 x 4 grid
    clone = generate_term_operations(c, 3).members
    expected = {(p, q) for p in clone for q in clone
                if satisfies(Interpretation(c, (("p", p), ("q", q))), systems.named("S-CAND"))}
    assert pairs == expected


def test_find_interpretations_b_s_pm_full():
    assert find_interpretations(make_semilattice(), systems.named("S-PM-FULL")) == []


def test_find_interpretations_swap_symmetric(c_ops):
    c, _, maj = c_ops
    found = find_interpretations(c, parse_system("p/3; p(x,y,z) = p(y,x,z);"))
    assert any(i["p"] == maj for i in found)
    for i in found:
        op = i["p"]
        assert all(op(a, b, d) == op(b, a, d) for a, b, d in itertools.product(range(2), repeat=3))


def test_find_interpretations_deterministic():
    a = find_interpretations(make_majority_first(2), systems.named("S-CAND"))
    b = find_interpretations(make_majority_first(2), systems.named("S-CAND"))
    assert a == b


# ---------------------------------------------------------------- theories


def test_theory_projection_majority(c_ops):
    c, pi1, maj = c_ops
    th = theory_of(Interpretation(c, (("p", pi1), ("q", maj))), 2)
    assert Identity.of(App("p", ("x", "x", "y")), App("p", ("x", "y", "y"))) in th
    assert Identity.of(App("q", ("x", "x", "y")), App("q", ("x", "y", "x"))) in th
    assert Identity.of(App("p", ("x", "y", "y")), App("q", ("x", "y", "y"))) not in th


def test_theory_meet(b_meet3):
    b, m3 = b_meet3
    th = theory_of(Interpretation(b, (("p", m3), ("q", m3))), 2)
    assert Identity.of(App("p", ("x", "y", "x")), App("q", ("x", "x", "y"))) in th


def _all_identities(signature, num_vars):
    terms = term_universe(signature, num_vars)
    return [Identity.of(a, b) for a, b in itertools.combinations(terms, 2)]


def test_theory_is_exact(c_ops):
    c, pi1, maj = c_ops
    interp = Interpretation(c, (("p", pi1), ("q", maj)))
    th = theory_of(interp, 2)
    sig = (("p", 3), ("q", 3))
    for ident in _all_identities(sig, 2):
        single = IdentitySystem.build(sig, [ident])
        if ident.is_reflexive():
            continue
        assert (ident in th) == satisfies(interp, single), ident


# ---------------------------------------------------------------- two-variable consequence


def test_consequence_swap():
    s = parse_system("p/3; p(x,y,z) = p(x,z,y);")
    assert two_variable_consequence(s) == parse_system("p/3; p(x,y,x) = p(x,x,y);")


def test_consequence_unchanged():
    s = systems.named("S-CAND")
    assert two_variable_consequence(s) == s


def test_consequence_rotated():
    s = parse_system("p/3; p(x,y,x) = p(z,x,z);")
    cons = two_variable_consequence(s)
    for ident in parse_system("p/3; p(x,y,x) = p(x,x,x); p(x,y,x) = p(y,x,y);"):
        assert ident in cons
    # the only other instance identifies x with y
    extra = set(cons.identities) - set(parse_system("p/3; p(x,y,x) = p(x,x,x); p(x,y,x) = p(y,x,y);"))
    assert extra == {Identity.of(App("p", ("x", "y", "x")), App("p", ("y", "y", "y")))}


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(term_universe((("p", 3), ("q", 3)), 3)),
                          st.sampled_from(term_universe((("p", 3), ("q", 3)), 3))), min_size=1, max_size=3))
def test_consequence_is_identifications(pairs):
    sys = IdentitySystem.build((("p", 3), ("q", 3)), [Identity.of(a, b) for a, b in pairs])
    cons = two_variable_consequence(sys)
    assert cons.variable_count <= 2
    allowed = set()
    for ident in sys.identities:
        if len(ident.variables()) < 3:
            allowed.add(ident)
        for a, b in itertools.permutations(ident.variables(), 2):
            allowed.add(ident.substitute({b: a}))
    assert set(cons.identities) <= allowed


# ---------------------------------------------------------------- properties

SIG = (("p", 3), ("q", 3))
TERMS3 = term_universe(SIG, 3)
TERMS2 = term_universe(SIG, 2)


def random_system(terms, max_size=4):
    pair = st.tuples(st.sampled_from(terms), st.sampled_from(terms))
    return st.lists(pair, min_size=1, max_size=max_size).map(
        lambda ps: IdentitySystem.build(SIG, [Identity.of(a, b) for a, b in ps]))


TEST_ALGEBRAS = [make_semilattice(), make_majority_first(2)]
TEST_ALGEBRAS[0] = type(TEST_ALGEBRAS[0])("B3", 2, (type(TEST_ALGEBRAS[0].basic_ops[0])(
    "f", 3, tuple(min(a, b, c) for a in range(2) for b in range(2) for c in range(2))),))


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(random_system(TERMS2 + TERMS3[:12], 3))
def test_canonicalize_preserves_satisfiability(sys):
    c = canonicalize(sys)
    assert canonicalize(c) == c
    for alg in TEST_ALGEBRAS:
        assert bool(find_interpretations(alg, sys, limit=1)) == bool(find_interpretations(alg, c, limit=1))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(TERMS2), min_size=2, max_size=5))
def test_chain_expansion(chain):
    text = "p/3; q/3;\n" + " = ".join(map(str, chain)) + ";"
    sys = parse_system(text)
    pairs = IdentitySystem.build(SIG, [Identity.of(a, b) for a, b in itertools.combinations(chain, 2)])
    for alg in TEST_ALGEBRAS:
        for interp in find_interpretations(alg, IdentitySystem(SIG, ()), idempotent_only=False):
            assert satisfies(interp, sys) == satisfies(interp, pairs)


@settings(max_examples=60, deadline=None)
@given(random_system(TERMS3, 4), st.data())
def test_monotone_and_consequence(sys, data):
    sub = sys.subsystem(data.draw(st.lists(st.sampled_from(sys.identities), unique=True))) if len(sys) else sys
    cons = two_variable_consequence(sys)
    for alg in TEST_ALGEBRAS:
        for interp in find_interpretations(alg, sys):
            assert satisfies(interp, sub)
            assert satisfies(interp, cons)


@settings(max_examples=40, deadline=None)
@given(random_system(TERMS3, 3))
def test_closure_contains_system(sys):
    cl = closure(sys)
    for ident in sys.identities:
        assert closure(sys, extra=[ident]).pairs() == cl.pairs()
    assert canonical_key(sys) == canonical_key(canonicalize(sys))
