"""Independent high-precision reference implementations for the tests.

Every law is re-implemented here directly from its formula using mpmath at
60 significant digits, taking coefficients as plain name->value mappings
(JSON naming, so the Abnar shape exponent arrives as "lambda").  The package
under test never imports this module; agreement between the two is evidence,
not tautology.
"""

from mpmath import mp, mpf

mp.dps = 60


def kaplan_loss(c, n, d):
    n, d = mpf(n), mpf(d)
    inner = (mpf(c["n_c"]) / n) ** (mpf(c["alpha_n"]) / mpf(c["alpha_d"])) + mpf(c["d_c"]) / d
    return inner ** mpf(c["alpha_d"])


def hoffmann_loss(c, n, d):
    n, d = mpf(n), mpf(d)
    return mpf(c["e"]) + mpf(c["a"]) / n ** mpf(c["alpha"]) + mpf(c["b"]) / d ** mpf(c["beta"])


def frantar_loss(c, n, d, s):
    n, d, s = mpf(n), mpf(d), mpf(s)
    gain = mpf(c["a_s"]) * (1 - s) ** mpf(c["b_s"]) + mpf(c["c_s"])
    return gain * (1 / n) ** mpf(c["b_n"]) + (mpf(c["a_d"]) / d) ** mpf(c["b_d"]) + mpf(c["c"])


def frantar_reform_loss(c, n, d, s):
    n, d, s = mpf(n), mpf(d), mpf(s)
    gain = mpf(c["a_s"]) * (1 - s) ** mpf(c["b_s"]) + mpf(c["c_s"])
    return mpf(c["e"]) + gain / n ** mpf(c["alpha"]) + mpf(c["b"]) / d ** mpf(c["beta"])


def abnar_loss(c, n, d, s):
    n, d, s = mpf(n), mpf(d), mpf(s)
    density = 1 - s
    return (
        mpf(c["e"])
        + mpf(c["a"]) / n ** mpf(c["alpha"])
        + mpf(c["b"]) / d ** mpf(c["beta"])
        + mpf(c["c"]) / density ** mpf(c["lambda"])
        + mpf(c["d_coef"]) / (density ** mpf(c["delta"]) * n ** mpf(c["gamma"]))
    )


def generalized_loss(c, n, d, s):
    n, d, s = mpf(n), mpf(d), mpf(s)
    density = 1 - s
    return (
        mpf(c["e"]) * density ** mpf(c["gamma"])
        + (mpf(c["a"]) * density ** mpf(c["alpha"]) + mpf(c["c"]) * s) / n ** mpf(c["alpha"])
        + mpf(c["b"]) / d ** mpf(c["beta"])
    )


LOSS_FNS = {
    "kaplan": lambda c, n, d, s: kaplan_loss(c, n, d),
    "hoffmann": lambda c, n, d, s: hoffmann_loss(c, n, d),
    "frantar": frantar_loss,
    "frantar_reform": frantar_reform_loss,
    "abnar": abnar_loss,
    "generalized": generalized_loss,
}


def loss(law: str, coeff_doc, n, d, s=0):
    """Evaluate a law by id on JSON-named coefficients, at 60 digits."""
    return LOSS_FNS[law](coeff_doc, n, d, s)


def rel_err(approx: float, exact) -> float:
    """|approx - exact| / |exact| with the exact value at full precision."""
    exact = mpf(exact)
    return float(abs(mpf(approx) - exact) / abs(exact))
