"""
Reference data for the worked examples
Parameters, newform coefficients and period-polynomial components used by
`reproduce` and the acceptance tests.
"""

from fractions import Fraction

# Level 19, weight 6: Eisenstein congruence modulo 7 with ε = +1.
EXAMPLE_5_1 = {
    "k": 6, "p": 19, "eps": 1, "ell": 7,
    # f = q - 2q^2 - q^3 - 28q^4 - 24q^5
    "newform": {1: 1, 2: -2, 3: -1, 4: -28, 5: -24},
    "eisenstein_targets": {2: 33, 3: 244, 5: 3126},
}

# Level 5, weight 40: congruence holds but the eigenvector congruence is not forced.
EXAMPLE_5_2 = {"k": 40, "p": 5, "eps": -1, "ell": 71}

# Level 7, weight 6: Eisenstein congruence modulo 43, and the rational newform g
# with λ₂ = -10 raised to level 14 modulo 11.
EXAMPLE_5_3 = {
    "k": 6, "p": 7, "eps": 1, "ell": 43,
    "g_selector": (2, -10),
    "g_eigenvalues": {2: -10, 3: -14, 5: -56},
    "g_al_sign": 1,
    "g_den": 2,
    # Normalized P⁺(g), coefficients from degree 0 up
    "g_components": {
        (0, 1): (1, 0, 0, 0, -49),
        (1, 1): (49, 0, 0, 0, -49),
        (1, 2): (6, -86, Fraction(-129, 2), Fraction(-43, 2), 80),
        (1, 3): (-80, Fraction(-43, 2), Fraction(129, 2), -86, -6),
    },
    "raise": {"M": 7, "p": 2, "k": 6, "eps": -1, "ell": 11},
    # f = q + 4q^2 + 8q^3 + 16q^4 + 10q^5 at level 14
    "raised_newform": {1: 1, 2: 4, 3: 8, 4: 16, 5: 10},
}

RAMANUJAN = {"N": 1, "k": 12, "n": 2, "ell": 691, "eisenstein": 2049, "tau": -24}

T2_CASES = (
    {"N": 7, "p": 7, "w": 2, "ell": 11, "anomaly": 0},
    {"N": 7, "p": 7, "w": 2, "ell": 5, "anomaly": 1},
    {"N": 14, "p": 2, "w": 4, "ell": 11, "anomaly": 0},
)

EXAMPLES = ("5.1", "5.2", "5.3", "ramanujan", "t2")
