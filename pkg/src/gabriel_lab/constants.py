"""Sharp and working constants of the Gabriel-type inequalities."""

import math

C_GABRIEL = 2.0
C_FRAZER = 1.0
C_LEMMA_SUM = 2.0


def sec_power(p):
    """``sec^p(pi / 2p)`` through the half-angle form ``((1 + cos(pi/p)) / 2)^(-p/2)``.

    The half-angle form is exact at ``p = 2`` in floating point, so the two
    branches of the main constant meet at exactly 4.
    """
    if p <= 0.5:
        raise ValueError("sec^p(pi/2p) needs p > 1/2")
    return ((1.0 + math.cos(math.pi / p)) / 2.0) ** (-p / 2.0)


def sec(x):
    return 1.0 / math.cos(x)


def c_rf(p):
    return 0.5 * sec_power(p)


def c_main(p):
    if p <= 1:
        raise ValueError("main constant is defined for p > 1")
    return 4.0 if p >= 2 else 2.0 * sec_power(p)


def a_small_p(p):
    """Constant of the mixed-homogeneity bound for ``0 < p < 1``."""
    if not 0 < p < 1:
        raise ValueError("A(p) is defined for 0 < p < 1")
    return 2.0 * (2 * math.pi) ** (1 - p) * (1.0 + sec(math.pi * p / 2))


def c_circle(p, r):
    if p < 1:
        raise ValueError("circle constant is defined for p >= 1")
    return 1.0 if p >= 2 else 1.0 + r


def c_kalaj(p):
    return (1.0 - abs(math.cos(math.pi / p))) ** (-p / 2.0)


def kalaj_chain(p):
    """``2^{p/2+1} c_kalaj(p)``, the constant reached through Kalaj's bound."""
    return 2.0 ** (p / 2 + 1) * c_kalaj(p)


def c_kolmogorov(p):
    return (2 * math.pi) ** (1 - p) * sec(math.pi * p / 2)


def c_jensen(p):
    return (2 * math.pi) ** (1 - p)


def c_hilbert(theta):
    return 2 * math.pi / (math.sin(theta / 2) + math.cos(theta / 2))


TABLE = {
    "gabriel": lambda p: C_GABRIEL,
    "frazer": lambda p: C_FRAZER,
    "lemma_sum": lambda p: C_LEMMA_SUM,
    "main": c_main,
    "riesz_fejer": c_rf,
    "small_p": a_small_p,
    "kalaj": c_kalaj,
    "kolmogorov": c_kolmogorov,
}
