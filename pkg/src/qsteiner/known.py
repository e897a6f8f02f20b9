"""Concrete groups for the binary q-analog of the Fano plane (v = 7).

Matrices are written row by row exactly as they are usually displayed; row
``i`` is the image of ``e_i`` under the right action.
"""

from .gf2 import Gf2Matrix

_G2 = [
    "0100000",
    "1000000",
    "0001000",
    "0010000",
    "0000010",
    "0000100",
    "0000001",
]

_G31 = [
    "0100000",
    "1100000",
    "0001000",
    "0011000",
    "0000010",
    "0000110",
    "0000001",
]

_G32 = [
    "0100000",
    "1100000",
    "0001000",
    "0011000",
    "0000100",
    "0000010",
    "0000001",
]

_G4 = [
    "1100000",
    "0110000",
    "0010000",
    "0001100",
    "0000110",
    "0000011",
    "0000001",
]

_N31 = [
    _G31,
    [
        "0101010",
        "1010100",
        "1100000",
        "0100000",
        "0000110",
        "0000010",
        "0000001",
    ],
    [
        "0101010",
        "1111110",
        "1000000",
        "0100000",
        "0010000",
        "0001000",
        "0000001",
    ],
]

NORMALIZER_G31_ORDER = 362880


def from_strings(rows: list[str]) -> Gf2Matrix:
    return Gf2Matrix.from_bits([[int(c) for c in r] for r in rows])


def g2() -> Gf2Matrix:
    return from_strings(_G2)


def g31() -> Gf2Matrix:
    return from_strings(_G31)


def g32() -> Gf2Matrix:
    return from_strings(_G32)


def g4() -> Gf2Matrix:
    return from_strings(_G4)


def normalizer_g31_generators() -> list[Gf2Matrix]:
    return [from_strings(m) for m in _N31]
