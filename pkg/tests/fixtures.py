"""Published polynomial tables, transcribed verbatim, plus independent oracle values."""

from fractions import Fraction as F

# Y_n coefficients, ascending powers of t
VY_TABLE = {
    0: [1],
    1: [0, 1],
    2: [4, 0, 0, 1],
    3: [-80, 0, 0, 20, 0, 0, 1],
    4: [0, 11200, 0, 0, 0, 0, 0, 60, 0, 0, 1],
    5: [-6272000, 0, 0, -3136000, 0, 0, 78400, 0, 0, 2800, 0, 0, 140, 0, 0, 1],
}


def _sparse(deg, terms):
    out = [F(0)] * (deg + 1)
    for k, c in terms.items():
        out[k] = F(c)
    return out


# monic D_n as printed in the table
DISC_TABLE = {
    1: _sparse(1, {1: 1}),
    2: _sparse(3, {3: 1, 0: F(27, 8)}),
    3: _sparse(6, {6: 1, 3: F(35, 2), 0: F(-243, 4)}),
    4: _sparse(10, {10: 1, 7: F(215, 4), 4: F(89, 8), 1: F(4084101, 512)}),
    5: _sparse(15, {15: 1, 12: F(255, 2), 9: F(76211, 32), 6: F(3730405, 64),
                    3: F(-8700637815, 4096), 0: F(-125005275, 32)}),
}

# D_5 from a sympy determinant + discriminant computation (independent oracle);
# it differs from the table only in the t^9 coefficient
DISC5_SYMPY = _sparse(15, {15: 1, 12: F(255, 2), 9: F(76221, 32), 6: F(3730405, 64),
                           3: F(-8700637815, 4096), 0: F(-125005275, 32)})

# (A_n, B_n) as printed in the Airy lemma table
AIRY_TABLE = {
    0: ([0, 1], [1]),
    1: ([0, 0, F(1, 3)], [0, F(1, 3)]),
    2: ([F(-1, 5), 0, 0, F(1, 5)], [0, 0, F(1, 5)]),
    3: ([0, 0, 0, 0, F(1, 7)], [F(-3, 7), 0, 0, F(1, 7)]),
    4: ([0, 0, F(-2, 9), 0, 0, F(1, 9)], [0, F(4, 9), 0, 0, F(1, 9)]),
}
