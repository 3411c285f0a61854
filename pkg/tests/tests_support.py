"""Shared order specs and oracle builders for the test suite."""

from loft.bind import oracle_for_complex

SQRT2_SPEC = {
    "backend": "zn",
    "field": "sqrt2",
    "rank": 2,
    "chain": [[1, {"coords": [0, 1]}]],
}

LAMBDA_TORUS_SPEC = {
    "backend": "zn",
    "field": "lambda6",
    "rank": 2,
    "chain": [[1, {"coords": [0, 1]}]],
}

LEX_YX_SPEC = {
    "backend": "zn",
    "field": "sqrt2",
    "rank": 2,
    "chain": [[0, 1], [1, 0]],
}

OCT8_LEX_SPEC = {
    "backend": "surface_lex",
    "field": "lambda6",
    "h1_functional": [
        1,
        {"coords": [0, 1]},
        {"coords": [0, 0, 1]},
        {"coords": [0, 0, 0, 1]},
    ],
    "depth2_functional": [
        0,
        1,
        {"coords": [0, 1]},
        {"coords": [0, 0, 1]},
        {"coords": [0, 0, 0, 1]},
        {"coords": [0, 0, 0, 0, -1]},
    ],
}

OCT8_H1_PARTIAL_SPEC = {
    "backend": "surface_lex",
    "field": "lambda6",
    "h1_functional": [
        1,
        {"coords": [0, 1]},
        {"coords": [0, 0, 1]},
        {"coords": [0, 0, 0, 1]},
    ],
}

T3_LEX_SPEC = {
    "backend": "zn",
    "field": "lambda6",
    "rank": 3,
    "chain": [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
}

T3_LAMBDA_SPEC = {
    "backend": "zn",
    "field": "lambda6",
    "rank": 3,
    "chain": [[1, {"coords": [0, 1]}, {"coords": [0, 0, 1]}]],
}


def sqrt2_torus_oracle(tri):
    return oracle_for_complex(SQRT2_SPEC, tri)


def lex_torus_oracle(tri):
    return oracle_for_complex(LEX_YX_SPEC, tri)


def oct8_surface_oracle(tri, depth2=True):
    spec = OCT8_LEX_SPEC if depth2 else OCT8_H1_PARTIAL_SPEC
    return oracle_for_complex(spec, tri)
