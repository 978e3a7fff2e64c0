"""Bundled numeration systems: system, certificate, preprocessing rules and
run parameters, self-validated at load time.

Presets: golden-square (base (3+sqrt5)/2), golden-mean, knuth (base 2i),
eisenstein (base -1+omega), integer:<b>:<m>:<M>, base4.  Alphabets are
ordered by (|digit|, positives first) so that nearest-digit ties resolve to
the smaller digit, matching the specialized selection rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, log

from .errors import CertificateError, DomainError, ParseError
from .field import ComplexQuad, RationalInterval, RealQuad
from .numeration import NumerationSystem, make_system
from .online_div import DivSelectFn
from .online_mul import (
    ExactFn,
    SelectFn,
    extended_mult_exact,
    extended_mult_select,
    generic_mult_exact,
    generic_mult_select,
)
from .params import FrontierPoint, ParamSet, div_params, eisenstein_params, mult_params
from .preprocess import PreprocessSpec, RewriteRule, dmin_lower_bound, expand_rules, verify_rules
from .region import (
    ConvexPolygon,
    OLCertificate,
    VARIANT_MU_NU,
    complex_parallelogram_certificate,
    real_interval_certificate,
    verify_certificate,
)
from .select import golden_d_rule, golden_m_rule

_IV = Fraction(1, 10**9)


@dataclass
class Preset:
    name: str
    sys: NumerationSystem
    cert: OLCertificate
    div_cert: OLCertificate
    preprocess: PreprocessSpec | None
    mult_params: ParamSet
    div_params: ParamSet | None
    generic_mult_params: ParamSet
    generic_div_params: ParamSet | None
    mult_select: SelectFn
    mult_exact: ExactFn
    div_select: DivSelectFn | None
    frontier_mult: tuple[FrontierPoint, ...] = ()
    frontier_div: tuple[FrontierPoint, ...] = ()
    notes: str = ""
    _max_int_mult: int | None = None
    _max_int_div: int | None = None

    def max_int_mult(self) -> int:
        if self._max_int_mult is None:
            self._max_int_mult = _int_window_ceiling(self, self.cert.mult_fatten())
        return self._max_int_mult

    def max_int_div(self) -> int:
        if self._max_int_div is None:
            fatten = self.div_cert.div_fatten(self.sys)
            self._max_int_div = _int_window_ceiling(self, fatten, scaled_by_divisor=True)
        return self._max_int_div


def _int_window_ceiling(preset: Preset, fatten: RealQuad, scaled_by_divisor: bool = False) -> int:
    sys = preset.sys
    reach = sys.abs_beta(_IV) * preset.cert.k_bound + fatten.to_interval(_IV)
    if scaled_by_divisor:
        reach = reach * sys.d_max(_IV)
    b = reach.hi + (sys.a_max(_IV) / (sys.abs_beta(_IV) - 1)).hi
    rules = preset.preprocess.rules if preset.preprocess else ()
    d0 = None
    for depth in range(1, 9):
        if len(sys.alphabet) ** depth > 500_000:
            break
        iv = dmin_lower_bound(sys, rules, depth)
        if iv.lo > 0:
            d0 = iv.lo
            break
    if d0 is None:
        raise DomainError("no positive leading-prefix bound: integer window unbounded")
    ab_lo = sys.abs_beta(_IV).lo
    return max(1, ceil(log(float(max(b / d0, Fraction(2)))) / log(float(ab_lo))) + 1)


def _int_digits(values: list[int]) -> tuple[list[ComplexQuad], list[str]]:
    ordered = sorted(values, key=lambda v: (abs(v), v < 0))
    return [ComplexQuad.from_int(v) for v in ordered], [str(v) for v in ordered]


def _validate(preset: Preset) -> Preset:
    for cert in {id(preset.cert): preset.cert, id(preset.div_cert): preset.div_cert}.values():
        result = verify_certificate(preset.sys, cert)
        if not result.passed:
            raise CertificateError(f"preset {preset.name}: bundled certificate failed verification: {result.reason}")
    if preset.preprocess:
        for rule, ok in verify_rules(preset.sys, preset.preprocess.rules):
            if not ok:
                raise CertificateError(f"preset {preset.name}: rule {rule} does not preserve value")
    return preset


def _golden_square() -> Preset:
    beta = ComplexQuad(RealQuad(3, 1, 2, 5))
    digits, symbols = _int_digits([-1, 0, 1])
    sys = make_system(beta, digits, symbols)
    cert = real_interval_certificate(sys)
    d_min = dmin_lower_bound(sys, (), 1)  # exact 1/beta^2
    spec = PreprocessSpec(rules=(), d_min=d_min, analysis_depth=1)
    gen_mult = mult_params(sys, cert)
    gen_div = div_params(sys, cert, d_min)
    pub_mult = ParamSet(delta=4, window_l=3, mode="mult")
    pub_div = ParamSet(delta=6, window_l=9, mode="div", alpha=gen_div.alpha, d_min=d_min)

    def mult_select(s, c, w):
        return golden_m_rule(s, w)

    def div_select(s, c, w, d):
        return golden_d_rule(s, w, d)

    return Preset(
        name="golden-square",
        sys=sys,
        cert=cert,
        div_cert=cert,
        preprocess=spec,
        mult_params=pub_mult,
        div_params=pub_div,
        generic_mult_params=gen_mult,
        generic_div_params=gen_div,
        mult_select=mult_select,
        mult_exact=generic_mult_exact,
        div_select=div_select,
        notes="specialized window rules; generic parameters exposed alongside",
    )


def _golden_mean() -> Preset:
    beta = ComplexQuad(RealQuad(1, 1, 2, 5))
    digits, symbols = _int_digits([-1, 0, 1])
    sys = make_system(beta, digits, symbols)
    cert = real_interval_certificate(sys)
    one = sys.index_of_symbol("1")
    neg = sys.index_of_symbol("-1")
    zero = sys.zero_index
    seeds = [
        RewriteRule((one, zero, neg), (zero, one, zero)),
        RewriteRule((one, neg, zero), (zero, zero, one)),
        RewriteRule((one, neg, neg), (zero, zero, zero)),
    ]
    rules = tuple(expand_rules(sys, seeds))
    d_min = dmin_lower_bound(sys, rules, 3)  # exact 1/beta^5
    spec = PreprocessSpec(rules=rules, d_min=d_min, analysis_depth=3)
    gen_mult = mult_params(sys, cert)
    gen_div = div_params(sys, cert, d_min)
    return Preset(
        name="golden-mean",
        sys=sys,
        cert=cert,
        div_cert=cert,
        preprocess=spec,
        mult_params=gen_mult,
        div_params=gen_div,
        generic_mult_params=gen_mult,
        generic_div_params=gen_div,
        mult_select=generic_mult_select,
        mult_exact=generic_mult_exact,
        div_select=None,
    )


def _knuth() -> Preset:
    beta = ComplexQuad(RealQuad(0), RealQuad(2))
    digits, symbols = _int_digits([-2, -1, 0, 1, 2])
    sys = make_system(beta, digits, symbols)
    f = Fraction
    oblong = ConvexPolygon([
        ComplexQuad(RealQuad(5, 0, 9), RealQuad(-11, 0, 9)),
        ComplexQuad(RealQuad(5, 0, 9), RealQuad(11, 0, 9)),
        ComplexQuad(RealQuad(-5, 0, 9), RealQuad(11, 0, 9)),
        ComplexQuad(RealQuad(-5, 0, 9), RealQuad(-11, 0, 9)),
    ])
    cert = OLCertificate(oblong, RealQuad(1, 0, 18))
    d_min = RationalInterval.point(f(1, 6))  # via the odd/even digit split
    spec = PreprocessSpec(rules=(), d_min=d_min, analysis_depth=1)
    gen_mult = mult_params(sys, cert)
    gen_div = div_params(sys, cert, d_min)
    return Preset(
        name="knuth",
        sys=sys,
        cert=cert,
        div_cert=cert,
        preprocess=spec,
        mult_params=gen_mult,
        div_params=gen_div,
        generic_mult_params=gen_mult,
        generic_div_params=gen_div,
        mult_select=generic_mult_select,
        mult_exact=generic_mult_exact,
        div_select=None,
    )


def eisenstein_system() -> NumerationSystem:
    half = RealQuad(1, 0, 2)
    s36 = RealQuad(0, 1, 2, 3)  # sqrt(3)/2
    omega = ComplexQuad(-half, s36)
    omega2 = ComplexQuad(-half, -s36)
    beta = ComplexQuad(RealQuad(-3, 0, 2), s36)
    values = [
        ComplexQuad.zero(), ComplexQuad.from_int(1), ComplexQuad.from_int(-1),
        omega, -omega, omega2, -omega2,
    ]
    symbols = ["0", "1", "-1", "w", "-w", "W", "-W"]
    return make_system(beta, values, symbols)


def eisenstein_hexagon() -> ConvexPolygon:
    half = RealQuad(1, 0, 2)
    s36 = RealQuad(0, 1, 6, 3)  # sqrt(3)/6
    s33 = RealQuad(0, 1, 3, 3)  # sqrt(3)/3
    z = RealQuad(0)
    return ConvexPolygon([
        ComplexQuad(half, -s36),
        ComplexQuad(half, s36),
        ComplexQuad(z, s33),
        ComplexQuad(-half, s36),
        ComplexQuad(-half, -s36),
        ComplexQuad(z, -s33),
    ])


def eisenstein_rules(sys: NumerationSystem) -> tuple[RewriteRule, ...]:
    idx = {s: sys.index_of_symbol(s) for s in sys.symbols}
    z, p1, m1 = idx["0"], idx["1"], idx["-1"]
    w, mw, w2, mw2 = idx["w"], idx["-w"], idx["W"], idx["-W"]
    seeds = [
        RewriteRule((p1, p1), (z, w)),                 # beta + (1 - omega) = 0
        RewriteRule((p1, mw), (z, m1)),
        RewriteRule((p1, z, w), (z, w, p1)),           # beta^2 + beta + omega - omega^2 = 0
        RewriteRule((p1, z, mw2), (z, m1, mw)),
        RewriteRule((p1, mw2, w), (z, w, w2)),
        RewriteRule((p1, mw2, mw2), (z, w, mw)),
        RewriteRule((p1, z, m1), (z, w, mw)),          # beta^2 - omega beta + omega - 1 = 0
        RewriteRule((p1, w2, m1), (z, m1, mw)),
        RewriteRule((p1, w2, w), (z, m1, p1)),
    ]
    return tuple(expand_rules(sys, seeds))


def _eisenstein() -> Preset:
    sys = eisenstein_system()
    hexagon = eisenstein_hexagon()
    r = RealQuad(0, 1, 6, 3)  # sqrt(3)/6, the maximal covering slack
    front_mult = tuple(eisenstein_params("mult"))
    front_div = tuple(eisenstein_params("div"))
    mult_choice = front_mult[0]  # delay-minimal pair
    div_choice = front_div[-1]   # window-minimal pair
    cert = OLCertificate(
        hexagon, r, variant=VARIANT_MU_NU,
        mu=RealQuad.from_fraction(mult_choice.mu), nu=RealQuad.from_fraction(mult_choice.nu),
    )
    div_cert = OLCertificate(
        hexagon, r, variant=VARIANT_MU_NU,
        mu=RealQuad.from_fraction(div_choice.mu), nu=RealQuad.from_fraction(div_choice.nu),
    )
    rules = eisenstein_rules(sys)
    d_min = dmin_lower_bound(sys, rules, 3, precision=Fraction(1, 10**7))
    spec = PreprocessSpec(rules=rules, d_min=d_min, analysis_depth=3)
    alpha = _eisenstein_alpha(sys, div_choice.mu, d_min)
    p_mult = ParamSet(delta=mult_choice.delta, window_l=mult_choice.window_l, mode="mult")
    p_div = ParamSet(delta=div_choice.delta, window_l=div_choice.window_l, mode="div", alpha=alpha, d_min=d_min)
    return Preset(
        name="eisenstein",
        sys=sys,
        cert=cert,
        div_cert=div_cert,
        preprocess=spec,
        mult_params=p_mult,
        div_params=p_div,
        generic_mult_params=p_mult,
        generic_div_params=p_div,
        mult_select=generic_mult_select,
        mult_exact=generic_mult_exact,
        div_select=None,
        frontier_mult=front_mult,
        frontier_div=front_div,
        notes="mu/nu bookkeeping; parameters from the feasibility frontier",
    )


def _eisenstein_alpha(sys: NumerationSystem, mu: Fraction, d_min: RationalInterval) -> Fraction:
    # alpha = mu * D_min / (2 (1 + |beta| K + r)), rounded down
    from .params import round_down

    prec = Fraction(1, 10**9)
    ab = sys.abs_beta(prec)
    k = RealQuad(0, 1, 3, 3).to_interval(prec)
    r = RealQuad(0, 1, 6, 3).to_interval(prec)
    denom = 1 + ab * k + r
    return round_down(mu * d_min.lo / (2 * denom.hi), 10**12)


def _integer_preset(b: int, m: int, M: int) -> Preset:
    if b == 0 or abs(b) < 2:
        raise DomainError("integer base must satisfy |b| >= 2")
    if not (m <= 0 <= M):
        raise DomainError("alphabet must contain zero")
    beta = ComplexQuad.from_int(b)
    digits, symbols = _int_digits(list(range(m, M + 1)))
    sys = make_system(beta, digits, symbols)
    cert = real_interval_certificate(sys)
    spec = _integer_preprocess(sys, b, m, M)
    gen_mult = mult_params(sys, cert)
    gen_div = div_params(sys, cert, spec.d_min) if spec.d_min.lo > 0 else None
    nonneg = b > 1 and m == 0
    return Preset(
        name=f"integer:{b}:{m}:{M}",
        sys=sys,
        cert=cert,
        div_cert=cert,
        preprocess=spec,
        mult_params=gen_mult,
        div_params=gen_div,
        generic_mult_params=gen_mult,
        generic_div_params=gen_div,
        mult_select=extended_mult_select if nonneg else generic_mult_select,
        mult_exact=extended_mult_exact if nonneg else generic_mult_exact,
        div_select=None,
    )


def _integer_preprocess(sys: NumerationSystem, b: int, m: int, M: int) -> PreprocessSpec:
    zero = sys.zero_index
    if (b, m, M) == (2, -1, 1):
        one = sys.index_of_symbol("1")
        neg = sys.index_of_symbol("-1")
        rules = tuple(expand_rules(sys, [RewriteRule((one, neg), (zero, one))]))
        return PreprocessSpec(rules=rules, d_min=dmin_lower_bound(sys, rules, 2), analysis_depth=2)
    if (b, m, M) == (3, -1, 2):
        neg = sys.index_of_symbol("-1")
        two = sys.index_of_symbol("2")
        rules = (RewriteRule((neg, two), (zero, neg)),)
        return PreprocessSpec(rules=rules, d_min=dmin_lower_bound(sys, rules, 2), analysis_depth=2)
    # no rules: usable when zero has only the trivial representation
    depth = 1
    best = dmin_lower_bound(sys, (), 1)
    for d in range(2, 7):
        if best.lo > 0 or len(sys.alphabet) ** d > 500_000:
            break
        depth = d
        best = dmin_lower_bound(sys, (), d)
    return PreprocessSpec(rules=(), d_min=best, analysis_depth=depth)


@lru_cache(maxsize=None)
def load_preset(name: str) -> Preset:
    if name == "golden-square":
        return _validate(_golden_square())
    if name == "golden-mean":
        return _validate(_golden_mean())
    if name == "knuth":
        return _validate(_knuth())
    if name == "eisenstein":
        return _validate(_eisenstein())
    if name == "base4":
        return _validate(_integer_preset(4, -2, 2))
    if name.startswith("integer:"):
        parts = name.split(":")
        if len(parts) != 4:
            raise ParseError("integer preset syntax: integer:<base>:<min>:<max>")
        try:
            b, m, M = int(parts[1]), int(parts[2]), int(parts[3])
        except ValueError as exc:
            raise ParseError("integer preset syntax: integer:<base>:<min>:<max>") from exc
        return _validate(_integer_preset(b, m, M))
    raise ParseError(f"unknown preset {name!r}")


PRESET_NAMES = ("golden-square", "golden-mean", "knuth", "eisenstein", "base4")
