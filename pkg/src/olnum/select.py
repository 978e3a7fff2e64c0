"""Windowed digit selection.

A window keeps the full integer part of an auxiliary value plus its first L
fractional digits, together with a certified bound on the discarded tail.
Selection evaluates the window exactly and applies the certificate's digit
selector; specialized rules for the golden-square, Knuth and
Eisenstein systems are provided alongside, plus lookup-table synthesis over
the finitely many windows that fit a bounded domain.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import ceil, log

from .errors import CertificateError, DomainError
from .field import ComplexQuad, RationalInterval, RealQuad
from .numeration import DigitString, NumerationSystem, eval_digits
from .preprocess import RewriteRule, dmin_lower_bound
from .region import (
    ConvexPolygon,
    OLCertificate,
    VARIANT_MU_NU,
    digit_select,
    digit_select_total,
    nearest_digit,
    region_contains,
    region_dist_sq,
)

_IV_PREC = Fraction(1, 10**9)


@dataclass(frozen=True)
class Window:
    digits: DigitString
    L: int
    tail_bound: RationalInterval

    def int_len(self) -> int:
        return len(self.digits.int_digits)


def generic_tail_bound(sys: NumerationSystem, L: int) -> RationalInterval:
    """Enclosure of A / (|beta|^L (|beta| - 1)), the worst-case tail of any
    stream truncated after L fractional digits."""
    a = sys.a_max(_IV_PREC)
    ab = sys.abs_beta(_IV_PREC)
    return a / (ab.pow_int(L) * (ab - 1))


def truncate(sys: NumerationSystem, ds: DigitString, L: int) -> Window:
    if L < 0:
        raise DomainError("window length must be non-negative")
    kept = ds.frac_digits[:L]
    dropped = ds.frac_digits[L:]
    if all(i == sys.zero_index for i in dropped):
        tail = RationalInterval.point(0)
    else:
        tail = generic_tail_bound(sys, L)
    return Window(DigitString(ds.int_digits, kept), L, tail)


def window_encode(sys: NumerationSystem, cert: OLCertificate, value: ComplexQuad, L: int, max_shift: int = 64) -> Window:
    """Exact digit window of a field value: scale into the region, emit the
    integer part plus L fractional digits via the certificate selector.  The
    tail is the exact residual, bounded by K * |beta|^-L."""
    if value.is_zero():
        return Window(
            DigitString.make(sys, [sys.zero_index], [sys.zero_index] * L),
            L,
            RationalInterval.point(0),
        )
    shift = 0
    r = value
    while not region_contains(cert.region, r) and shift <= max_shift:
        r = r * sys.inv_base
        shift += 1
    if shift > max_shift:
        # not reachable by scaling down: try scaling up (values below a
        # region that sits right of zero)
        shift = 0
        r = value
        while not region_contains(cert.region, r):
            r = r * sys.base
            shift -= 1
            if -shift > max_shift:
                raise DomainError("value not reducible into the certificate region")
    digits: list[int] = []
    n_emit = shift + L if shift >= 0 else max(L + shift, 0)
    for _ in range(n_emit):
        t = r * sys.base
        idx = digit_select(cert, sys, t)
        digits.append(idx)
        r = t - sys.digit(idx)
    if r.is_zero():
        tail = RationalInterval.point(0)
    else:
        tail = cert.k_bound / sys.abs_beta(_IV_PREC).pow_int(L)
    if shift >= 0:
        int_part = digits[:shift] if shift else [sys.zero_index]
        frac_part = digits[shift:]
    else:
        int_part = [sys.zero_index]
        frac_part = [sys.zero_index] * (-shift) + digits
    return Window(DigitString.make(sys, int_part, frac_part), L, tail)


def window_value(sys: NumerationSystem, w: Window) -> ComplexQuad:
    return eval_digits(sys, w.digits)


def _tail_below(tail: RationalInterval, radius: RealQuad) -> bool:
    return (radius - RealQuad.from_fraction(tail.hi)).sign() > 0


# -- generic Select functions ---------------------------------------------------


def select_m(cert: OLCertificate, sys: NumerationSystem, w: Window) -> int:
    radius = cert.trunc_radius()
    if not _tail_below(w.tail_bound, radius):
        raise DomainError("window tail bound too large for the truncation radius")
    return digit_select(cert, sys, window_value(sys, w))


def select_m_extended(cert: OLCertificate, sys: NumerationSystem, w: Window) -> int:
    """Select for non-negative alphabets (base > 1, digits 0..M): emits 0
    while the value is still below the region's reach."""
    if cert.variant == VARIANT_MU_NU or not cert.region.is_interval:
        raise DomainError("extended select applies to interval certificates only")
    lam, _ = cert.region.interval_bounds()
    if lam.sign() <= 0:
        raise DomainError("extended select applies when the region lies right of zero")
    value = window_value(sys, w)
    threshold = sys.base.re * lam - cert.epsilon / 2
    if value.is_real() and (value.re - threshold).sign() < 0:
        return sys.zero_index
    return select_m(cert, sys, w)


def _scaled_ball_fits(cert: OLCertificate, sys: NumerationSystem, v: ComplexQuad, delta: ComplexQuad, digit_index: int) -> bool:
    """Division test without complex division: the disk of radius eps*|delta|
    around v lies inside delta * (region + digit)."""
    a = sys.digit(digit_index)
    eps = cert.epsilon
    if cert.region.is_interval:
        if not (v.is_real() and delta.is_real()):
            return False
        lo, hi = cert.region.interval_bounds()
        dr = delta.re
        s = dr.sign()
        if s == 0:
            return False
        lhs = (v.re - (lo + a.re + eps) * dr) * s
        rhs = (((hi + a.re) - eps) * dr - v.re) * s
        return lhs.sign() >= 0 and rhs.sign() >= 0
    dsq = delta.norm_sq()
    eps_sq_scaled = eps * eps * dsq * dsq
    for gx, gy, c, nsq in cert.region.halfplanes():
        c_a = c + gx * a.re + gy * a.im
        g = ComplexQuad(gx, gy) * delta
        margin = g.re * v.re + g.im * v.im - c_a * dsq
        if margin.sign() < 0:
            return False
        if (margin * margin - eps_sq_scaled * nsq).sign() < 0:
            return False
    return True


def select_d(
    cert: OLCertificate,
    sys: NumerationSystem,
    w: Window,
    d: Window,
    alpha: Fraction,
    d_min: RationalInterval | None = None,
) -> int:
    alpha_rq = RealQuad.from_fraction(alpha)
    if not _tail_below(w.tail_bound, alpha_rq) or not _tail_below(d.tail_bound, alpha_rq):
        raise DomainError("window tail bound too large for alpha")
    v = window_value(sys, w)
    delta = window_value(sys, d)
    if delta.is_zero():
        raise DomainError("divisor window evaluates to zero")
    if d_min is not None:
        lo_sq = RealQuad.from_fraction(d_min.lo * d_min.lo)
        if (delta.norm_sq() - lo_sq).sign() < 0:
            raise DomainError("divisor window below the certified minimum modulus")
    return select_d_exact(cert, sys, v, delta)


def select_d_exact(cert: OLCertificate, sys: NumerationSystem, v: ComplexQuad, delta: ComplexQuad) -> int:
    if cert.variant == VARIANT_MU_NU:
        best, best_d = 0, None
        for i, a in enumerate(sys.alphabet):
            dd = (v - a * delta).norm_sq()
            if best_d is None or (dd - best_d).sign() < 0:
                best, best_d = i, dd
        return best
    best: int | None = None
    best_d: RealQuad | None = None
    for i, a in enumerate(sys.alphabet):
        if _scaled_ball_fits(cert, sys, v, delta, i):
            dd = (v - a * delta).norm_sq()
            if best_d is None or (dd - best_d).sign() < 0:
                best, best_d = i, dd
    if best is None:
        raise CertificateError("no digit qualifies for the scaled selection test")
    return best


# -- specialized selection rules ---------------------------------------------------


def _padded_window_digits(sys: NumerationSystem, w: Window, n_int: int, n_frac: int) -> list[int]:
    ints = list(w.digits.int_digits)
    while len(ints) < n_int:
        ints.insert(0, sys.zero_index)
    extra = ints[:-n_int] if len(ints) > n_int else []
    if any(i != sys.zero_index for i in extra):
        raise DomainError("window integer part too long for this preset rule")
    ints = ints[-n_int:]
    fracs = list(w.digits.frac_digits[:n_frac])
    while len(fracs) < n_frac:
        fracs.append(sys.zero_index)
    return ints + fracs


def _digit_values(sys: NumerationSystem, idxs: list[int]) -> list[int]:
    out = []
    for i in idxs:
        v = sys.digit(i)
        out.append(v.re.a if v.re.q == 1 and v.re.b == 0 else None)
    if any(x is None for x in out):
        raise DomainError("preset rule needs integer digits")
    return out  # type: ignore[return-value]


def golden_m_rule(sys: NumerationSystem, w: Window) -> int:
    """Lexicographic selection on the five-digit window z_-1 z_0 . z_1 z_2 z_3
    over {-1, 0, 1}."""
    z = _digit_values(sys, _padded_window_digits(sys, w, 2, 3))
    plus = z > [0, 1, -1, -1, 0] or (z[:4] == [0, 0, 1, 1] and z[4] != -1)
    minus = z < [0, -1, 1, 1, 0] or (z[:4] == [0, 0, -1, -1] and z[4] != 1)
    target = 1 if plus else (-1 if minus else 0)
    idx = _index_of_int(sys, target)
    return idx


def golden_d_rule(sys: NumerationSystem, v: Window, d: Window) -> int:
    """Sign test on 2V -/+ Delta; the divisor sign is decided by its most
    significant nonzero digit (the classical form assumes d_1 = 1)."""
    if v.L < 9 or d.L < 9:
        raise DomainError("the division sign rule needs nine fractional digits")
    vv = window_value(sys, v)
    dd = window_value(sys, d)
    if not (vv.is_real() and dd.is_real()):
        raise DomainError("the division sign rule is for the real system")
    d_sign = _leading_sign(sys, d)
    if d_sign == 0:
        raise DomainError("divisor window has no nonzero digit")
    two_v = vv.re + vv.re
    if ((two_v - dd.re).sign()) * d_sign > 0:
        return _index_of_int(sys, 1)
    if ((two_v + dd.re).sign()) * d_sign < 0:
        return _index_of_int(sys, -1)
    return sys.zero_index


def _leading_sign(sys: NumerationSystem, w: Window) -> int:
    for idx in list(w.digits.int_digits) + list(w.digits.frac_digits):
        if idx != sys.zero_index:
            return sys.digit(idx).re.sign()
    return 0


def knuth_digit_rule(sys: NumerationSystem, w: Window) -> int:
    value = window_value(sys, w)
    re = value.re
    half = RealQuad(1, 0, 2)
    three_half = RealQuad(3, 0, 2)
    if (re - three_half).sign() > 0:
        return _index_of_int(sys, 2)
    if (re - half).sign() > 0:
        return _index_of_int(sys, 1)
    if (re + half).sign() >= 0:
        return _index_of_int(sys, 0)
    if (re + three_half).sign() >= 0:
        return _index_of_int(sys, -1)
    return _index_of_int(sys, -2)


def eisenstein_digit_rule(sys: NumerationSystem, w: Window) -> int:
    return nearest_digit(sys, window_value(sys, w))


def _index_of_int(sys: NumerationSystem, n: int) -> int:
    idx = sys.index_of_value(ComplexQuad.from_int(n))
    if idx is None:
        raise DomainError(f"digit {n} not in the alphabet")
    return idx


_SPECIALIZED = {
    "golden_m": lambda sys, windows: golden_m_rule(sys, windows[0]),
    "golden_d": lambda sys, windows: golden_d_rule(sys, windows[0], windows[1]),
    "knuth_digit": lambda sys, windows: knuth_digit_rule(sys, windows[0]),
    "eisenstein_digit": lambda sys, windows: eisenstein_digit_rule(sys, windows[0]),
}


def specialized_select(preset: str, sys: NumerationSystem, *windows: Window) -> int:
    try:
        fn = _SPECIALIZED[preset]
    except KeyError:
        raise DomainError(f"unknown specialized rule {preset!r}") from None
    need = 2 if preset == "golden_d" else 1
    if len(windows) != need:
        raise DomainError(f"rule {preset!r} takes {need} window(s)")
    return fn(sys, list(windows))


# -- lookup tables ------------------------------------------------------------------


@dataclass(frozen=True)
class SelectTable:
    entries: dict[tuple[int, ...], int]
    window_shape: tuple[int, int]

    def lookup(self, sys: NumerationSystem, w: Window) -> int:
        n_int, L = self.window_shape
        key = tuple(_padded_window_digits(sys, w, n_int, L))
        try:
            return self.entries[key]
        except KeyError:
            raise DomainError("window outside the synthesized table") from None

    def serialize(self, sys: NumerationSystem) -> str:
        n_int, _ = self.window_shape
        lines = []
        for key in sorted(self.entries):
            toks = [sys.symbol(i) for i in key[:n_int]] + ["."] + [sys.symbol(i) for i in key[n_int:]]
            lines.append(" ".join(toks) + " -> " + sys.symbol(self.entries[key]))
        return "\n".join(lines) + "\n"


def _frac_reach(sys: NumerationSystem, L: int) -> Fraction:
    """Upper bound on |sum of L fractional digits|."""
    a = sys.a_max(_IV_PREC)
    ab = sys.abs_beta(_IV_PREC)
    return (a / (ab - 1)).hi


def max_int_window(
    sys: NumerationSystem,
    cert: OLCertificate,
    domain: ConvexPolygon,
    L: int,
    rules: tuple[RewriteRule, ...] = (),
    depth_cap: int = 12,
    refine: bool = True,
) -> int:
    """Largest number of integer positions a window can occupy while its value
    can still meet the domain.  Finite only when irreducible leading prefixes
    are bounded away from zero; otherwise raises.  With refine=False only the
    analytic ceiling is returned."""
    d0 = _leading_value_floor(sys, rules, depth_cap)
    b_iv = _domain_reach(sys, domain) + _frac_reach(sys, L)
    ratio = b_iv / d0
    ab = sys.abs_beta(_IV_PREC)
    bound = ceil(log(float(max(ratio, Fraction(2)))) / log(float(ab.lo))) + 1
    bound = max(bound, 1)
    if not refine:
        return bound
    reach_sq = RealQuad.from_fraction(_frac_reach(sys, L) ** 2)
    prune_sq = RealQuad.from_fraction(
        ((sys.a_max(_IV_PREC) / (ab - 1)).hi + b_iv + 1) ** 2
    )
    best = 0
    stack: list[tuple[int, ComplexQuad]] = []
    for idx in range(len(sys.alphabet)):
        if idx != sys.zero_index:
            stack.append((1, sys.digit(idx)))
    while stack:
        depth, value = stack.pop()
        if (region_dist_sq(domain, value) - reach_sq).sign() <= 0:
            best = max(best, depth)
        if depth >= bound:
            continue
        for idx in range(len(sys.alphabet)):
            nxt = value * sys.base + sys.digit(idx)
            if (nxt.norm_sq() - prune_sq).sign() <= 0:
                stack.append((depth + 1, nxt))
    return best


def _domain_reach(sys: NumerationSystem, domain: ConvexPolygon) -> Fraction:
    best = Fraction(0)
    for v in domain.vertices:
        best = max(best, v.abs_interval(_IV_PREC).hi)
    return best


def _leading_value_floor(sys: NumerationSystem, rules, depth_cap: int) -> Fraction:
    n_digits = len(sys.alphabet)
    for depth in range(1, depth_cap + 1):
        if n_digits**depth > 500_000:
            break
        iv = dmin_lower_bound(sys, rules, depth)
        if iv.lo > 0:
            return iv.lo
    raise DomainError(
        "window enumeration budget exceeded: zero may have a non-trivial representation"
    )


def synthesize_table(
    sys: NumerationSystem,
    cert: OLCertificate,
    L: int,
    domain: ConvexPolygon,
    rules: tuple[RewriteRule, ...] | None = None,
    max_entries: int = 1_000_000,
) -> SelectTable:
    rule_set = tuple(rules) if rules else ()
    n_int = max_int_window(sys, cert, domain, L, rule_set)
    n_positions = n_int + L
    count = len(sys.alphabet) ** n_positions
    if count > max_entries:
        raise DomainError(f"table of {count} entries exceeds the budget")
    entries: dict[tuple[int, ...], int] = {}
    indices = range(len(sys.alphabet))
    for combo in product(indices, repeat=n_positions):
        if rule_set and _rule_applies_at_leading(sys, combo, rule_set):
            continue
        ds = DigitString(tuple(combo[:n_int]), tuple(combo[n_int:]))
        value = eval_digits(sys, ds)
        entries[combo] = digit_select_total(cert, sys, value)
    return SelectTable(entries, (n_int, L))


def _rule_applies_at_leading(sys, combo, rules) -> bool:
    lead = 0
    while lead < len(combo) and combo[lead] == sys.zero_index:
        lead += 1
    if lead == len(combo):
        return False
    tail = combo[lead:]
    for rule in rules:
        k = len(rule.lhs)
        if len(tail) >= k and tuple(tail[:k]) == rule.lhs:
            return True
    return False
