"""Derivation of on-line run parameters: delay, window length and the
division truncation radius, certified by exact field comparisons where the
constants stay in the quadratic field and by escalating rational intervals
otherwise.  Every returned exponent is minimal: the defining inequality is
re-checked to fail one step earlier.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .errors import DomainError
from .field import RationalInterval, RealQuad, sqrt_interval
from .numeration import NumerationSystem
from .region import OLCertificate, VARIANT_MU_NU

_MAX_EXP = 4096


@dataclass(frozen=True)
class ParamSet:
    delta: int
    window_l: int
    mode: str
    alpha: Fraction | None = None
    d_min: RationalInterval | None = None


def _first_k(pred, start: int) -> int:
    k = start
    while k < start + _MAX_EXP:
        if pred(k):
            return k
        k += 1
    raise DomainError("no exponent satisfies the inequality within the search cap")


def _certainly_less(lhs_fn, rhs_fn) -> bool:
    """Strict comparison of interval-valued quantities with escalation;
    raises when undecidable at the precision cap."""
    prec = Fraction(1, 10**6)
    for _ in range(24):
        lhs = lhs_fn(prec)
        rhs = rhs_fn(prec)
        if lhs.hi < rhs.lo:
            return True
        if lhs.lo >= rhs.hi:
            return False
        prec /= 2**12
    raise DomainError("comparison undecided within interval resolution")


def mult_params(sys: NumerationSystem, cert: OLCertificate) -> ParamSet:
    if cert.variant == VARIANT_MU_NU:
        raise DomainError("mu/nu certificates use the dedicated frontier derivation")
    eps_half = cert.epsilon / 2
    beta_abs = sys.abs_beta_exact()
    a_exact = sys.a_sq.sqrt_exact()
    if beta_abs is not None:
        c_delta = (sys.a_sq + sys.a_sq) / (beta_abs - 1)
        delta = _first_k(lambda k: (eps_half * beta_abs**k - c_delta).sign() > 0, 1)
    else:
        def c_delta_iv(prec):
            ab = sys.abs_beta(prec)
            return 2 * sys.a_sq.to_interval(prec) / (ab - 1)

        delta = _first_k(
            lambda k: _certainly_less(c_delta_iv, lambda p: cert.epsilon.to_interval(p) * sys.abs_beta(p).pow_int(k) / 2),
            1,
        )
    if beta_abs is not None and a_exact is not None:
        c_l = a_exact / (beta_abs - 1)
        window_l = _first_k(lambda k: (eps_half * beta_abs**k - c_l).sign() > 0, 0)
    else:
        def c_l_iv(prec):
            ab = sys.abs_beta(prec)
            return sys.a_max(prec) / (ab - 1)

        window_l = _first_k(
            lambda k: _certainly_less(c_l_iv, lambda p: cert.epsilon.to_interval(p) * sys.abs_beta(p).pow_int(k) / 2),
            0,
        )
    return ParamSet(delta=delta, window_l=window_l, mode="mult")


ALPHA_FRACTION = Fraction(7, 8)
_GRID = 10**9


def round_down(fr: Fraction, grid: int = _GRID) -> Fraction:
    return Fraction(floor(fr * grid), grid)


def round_up(fr: Fraction, grid: int = _GRID) -> Fraction:
    return Fraction(ceil(fr * grid), grid)


def div_params(sys: NumerationSystem, cert: OLCertificate, d_min: RationalInterval) -> ParamSet:
    if cert.variant == VARIANT_MU_NU:
        raise DomainError("mu/nu certificates use the dedicated frontier derivation")
    if d_min.lo <= 0:
        raise DomainError("the divisor lower bound must be certainly positive")

    def alpha_sup(prec):
        eps = cert.epsilon.to_interval(prec)
        denom = 1 + sys.abs_beta(prec) * cert.k_bound + eps
        return (eps / 2) * RationalInterval.point(d_min.lo) / denom

    alpha = round_down(ALPHA_FRACTION * alpha_sup(Fraction(1, 10**9)).lo, 10**12)
    if alpha <= 0:
        raise DomainError("alpha derivation collapsed to zero")
    # defining inequality check for the chosen alpha
    if not _certainly_less(
        lambda p: RationalInterval.point(alpha) * (1 + sys.abs_beta(p) * cert.k_bound + cert.epsilon.to_interval(p)),
        lambda p: cert.epsilon.to_interval(p) * RationalInterval.point(d_min.lo) / 2,
    ):
        raise DomainError("alpha inequality not satisfiable at this precision")

    def delta_lhs(prec):
        a = sys.a_max(prec)
        ab = sys.abs_beta(prec)
        eps = cert.epsilon.to_interval(prec)
        return (a / RationalInterval.point(d_min.lo)) * (1 + a / (ab - 1) + cert.k_bound + eps)

    delta = _first_k(
        lambda k: _certainly_less(delta_lhs, lambda p: cert.epsilon.to_interval(p) * sys.abs_beta(p).pow_int(k) / 2),
        1,
    )
    window_l = _first_k(
        lambda k: _certainly_less(
            lambda p: sys.a_max(p) / (sys.abs_beta(p).pow_int(k) * (sys.abs_beta(p) - 1)),
            lambda p: RationalInterval.point(alpha),
        ),
        0,
    )
    return ParamSet(delta=delta, window_l=window_l, mode="div", alpha=alpha, d_min=d_min)


def integer_base_delay(beta: int, a: int) -> int:
    """Smallest delay for an integer base >= 2 with symmetric digits -a..a."""
    if beta < 2:
        raise DomainError("integer base must be at least 2")
    if not (Fraction(beta, 2) <= a <= beta - 1):
        raise DomainError("digit bound must satisfy beta/2 <= a <= beta - 1")
    rhs = Fraction(2 * a + 1, 2)
    def holds(delta: int) -> bool:
        return Fraction(beta, 2) + Fraction(2 * a * a, beta**delta * (beta - 1)) <= rhs
    return _first_k(holds, 1)


# -- Eisenstein mu/nu frontier -------------------------------------------------------


@dataclass(frozen=True)
class FrontierPoint:
    delta: int
    window_l: int
    mu: Fraction
    nu: Fraction


_SQRT3 = RealQuad.sqrt_d(3)
_R_BUDGET = RealQuad(0, 1, 6, 3)  # sqrt(3)/6


def _budget_ok(mu: Fraction, nu: Fraction) -> bool:
    lhs = _SQRT3 * RealQuad.from_fraction(mu) + RealQuad.from_fraction(nu)
    return (_R_BUDGET - lhs).sign() >= 0


def _eis_constants(prec: Fraction):
    s3 = sqrt_interval(3, prec)
    s7 = sqrt_interval(7, prec)
    d_max = s7 / 2
    d_min = s3 * (6 - s7) / 18
    k = s3 / 3
    r = s3 / 6
    return s3, s7, d_max, d_min, k, r


def _eis_mult_mins(delta: int, L: int, prec: Fraction):
    s3, s7, _, _, _, _ = _eis_constants(prec)
    mu_min = s7 / s3.pow_int(L)
    nu_min = s7 / s3.pow_int(delta)
    return mu_min, nu_min


def _eis_div_mins(delta: int, L: int, mu: RationalInterval, prec: Fraction):
    s3, s7, d_max, d_min, k, r = _eis_constants(prec)
    mu_min = 2 * d_max * (s3 * k + r + 1) / (d_min * s3.pow_int(L))
    nu_min = (d_max + 1 + k + mu) / (d_min * s3.pow_int(delta))
    return mu_min, nu_min


_WITNESS_MARGINS = (
    Fraction(21, 20),
    Fraction(101, 100),
    Fraction(1001, 1000),
    Fraction(1000001, 1000000),
)


def _eis_feasible(kind: str, delta: int, L: int) -> FrontierPoint | None:
    prec = Fraction(1, 10**8)
    for _ in range(12):
        if kind == "mult":
            mu_min, nu_min0 = _eis_mult_mins(delta, L, prec)
        else:
            mu_min, _ = _eis_div_mins(delta, L, RationalInterval.point(0), prec)
        for margin in _WITNESS_MARGINS:
            mu_w = round_up(mu_min.hi * margin)
            if kind == "mult":
                nu_min = nu_min0
            else:
                _, nu_min = _eis_div_mins(delta, L, RationalInterval.point(mu_w), prec)
            nu_w = round_up(nu_min.hi * margin)
            if _budget_ok(mu_w, nu_w):
                return FrontierPoint(delta, L, mu_w, nu_w)
        # certainly infeasible? lower bounds already break the budget
        if kind == "mult":
            nu_lb = nu_min0
        else:
            _, nu_lb = _eis_div_mins(delta, L, RationalInterval.point(mu_min.lo), prec)
        lhs_lo = RealQuad.from_fraction(mu_min.lo) * _SQRT3 + RealQuad.from_fraction(nu_lb.lo)
        if (lhs_lo - _R_BUDGET).sign() > 0:
            return None
        prec /= 2**10
    raise DomainError("mu/nu feasibility undecided within interval resolution")


def eisenstein_params(kind: str, max_exp: int = 24) -> list[FrontierPoint]:
    """Pareto frontier of (delta, L) pairs admitting rational mu, nu > 0
    within the covering budget, with re-verified witnesses."""
    if kind not in ("mult", "div"):
        raise DomainError("kind must be 'mult' or 'div'")
    found: list[FrontierPoint] = []
    best_l: int | None = None
    for delta in range(1, max_exp + 1):
        hi = best_l if best_l is not None else max_exp + 1
        choice: FrontierPoint | None = None
        for L in range(1, hi):
            point = _eis_feasible(kind, delta, L)
            if point is not None:
                choice = point
                break
        if choice is None:
            continue
        if best_l is None or choice.window_l < best_l:
            found.append(choice)
            best_l = choice.window_l
    for point in found:
        assert _budget_ok(point.mu, point.nu)
    return found
