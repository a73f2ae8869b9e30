"""Named systems on two ternary symbols p, q, and the Z_5 witnesses for the
proper subsets of the projection/majority candidate."""

from __future__ import annotations

from .identities import IdentitySystem, parse_system

HEADER = "p/3; q/3;\n"

SOURCES = {
    # projection + majority in the majority algebra
    "S-PM-FULL": "x = p(x,x,y) = p(x,y,y) = p(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x);",
    "S-3": "p(x,x,y) = p(x,y,y) = p(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x);",
    "S-CAND": "p(x,x,y) = p(x,y,y);\np(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x);",
    "S-NEW": "x = q(x,y,x);\np(x,y,y) = p(x,y,x);\np(x,x,y) = q(x,x,y) = q(y,x,x);",
    # two majority terms
    "S-MM-FULL": "x = p(x,x,y) = p(x,y,x) = p(y,x,x) = q(y,x,x) = q(x,y,x) = q(x,x,y);",
    "S-MAJ": "x = p(x,x,y);\np(x,y,x) = p(y,x,x) = q(y,x,x) = q(x,y,x) = q(x,x,y);",
}

# proper subsets of S-CAND with a realizing pair mod 5 (p coefficients, q coefficients)
MINIMALITY_WITNESSES = [
    ("p(x,y,x) = q(x,x,y) = q(x,y,x) = q(y,x,x);", (2, 2, 2), (2, 2, 2)),
    ("p(x,x,y) = p(x,y,y); q(x,x,y) = q(x,y,x) = q(y,x,x);", (1, 0, 0), (2, 2, 2)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,x,y); q(x,y,x) = q(y,x,x);", (1, 0, 0), (3, 3, 0)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,x,y) = q(y,x,x);", (1, 0, 0), (0, 1, 0)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,x,y) = q(x,y,x);", (1, 0, 0), (1, 0, 0)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,y,x); q(x,x,y) = q(y,x,x);", (1, 0, 0), (3, 0, 3)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,y,x) = q(x,x,y);", (1, 0, 0), (1, 0, 0)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(x,y,x) = q(y,x,x);", (1, 0, 0), (0, 0, 1)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(y,x,x) = q(x,y,x);", (1, 0, 0), (0, 0, 1)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(y,x,x) = q(x,x,y);", (1, 0, 0), (0, 1, 0)),
    ("p(x,x,y) = p(x,y,y); p(x,y,x) = q(y,x,x); q(x,x,y) = q(x,y,x);", (1, 0, 0), (0, 3, 3)),
]

# S-3 subsets worked out alongside the minimality argument
SUBSET_1 = "p(x,x,y) = p(x,y,y);\np(x,y,x) = q(y,x,x) = q(x,y,x) = q(x,x,y);"
SUBSET_2 = "p(x,x,y) = p(x,y,x);\np(x,y,y) = q(y,x,x) = q(x,y,x) = q(x,x,y);"
SUBSET_2_WITNESS = ((4, 1, 1), (2, 2, 2))  # p = 4x + y + z, q = 2x + 2y + 2z

# Z_5 ternary list as printed: 22 rows, 21 distinct ("2x + 4z" appears twice)
PRINTED_Z5_LIST = [
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (4, 2, 0), (4, 0, 2), (0, 4, 2),
    (2, 4, 0), (2, 0, 4), (2, 0, 4),
    (3, 0, 3), (3, 3, 0), (0, 3, 3),
    (1, 2, 3), (1, 3, 2), (2, 1, 3),
    (2, 3, 1), (3, 2, 1), (3, 1, 2),
    (4, 1, 1), (1, 1, 4), (1, 4, 1),
    (2, 2, 2),
]


def named(name: str) -> IdentitySystem:
    return parse_system(HEADER + SOURCES[name])


def system(text: str) -> IdentitySystem:
    return parse_system(HEADER + text)


EXPECTED_SURVIVORS = ("S-CAND", "S-NEW", "S-MAJ")
EXPECTED_FINAL = ("S-CAND",)
