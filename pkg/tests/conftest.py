import itertools

import pytest

from lincond.algebra import builtin_algebras


@pytest.fixture(scope="session")
def algebras():
    return builtin_algebras()


def naive_clone(alg, arity):
    """Closure by plain tuples and sets; shares no code with the library."""
    tuples = list(itertools.product(range(alg.size), repeat=arity))
    members = {tuple(t[i] for t in tuples) for i in range(arity)}
    ops = [(op.arity, op.table) for op in alg.basic_ops]
    while True:
        new = set()
        for r, table in ops:
            for args in itertools.product(sorted(members), repeat=r):
                row = []
                for k in range(len(tuples)):
                    idx = 0
                    for a in args:
                        idx = idx * alg.size + a[k]
                    row.append(table[idx])
                row = tuple(row)
                if row not in members:
                    new.add(row)
        if not new:
            return members
        members |= new


# acceptance results, printed once at the end of the run
ACCEPTANCE: list[tuple[int, str, bool, float, float]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, elapsed, limit in sorted(ACCEPTANCE):
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title}  ({elapsed:.2f}s, limit {limit:g}s)")
