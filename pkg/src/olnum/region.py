"""Geometric certificates for on-line digit selection.

A certificate pairs a bounded convex region I (a real interval or a convex
polygon with quadratic-field coordinates) with a slack epsilon such that
every point of the epsilon-fattened beta*I admits a digit a whose shifted
region I+a contains the whole epsilon-ball.  Verification is exact: all
comparisons reduce to integer sign decisions on squared distances.

Real systems live on the real line (1-D balls are intervals); complex
systems use 2-D polygons.  The mu/nu variant keeps the region un-eroded and
selects by nearest digit; its covering is checked at fattening |beta|*mu+nu.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional, Sequence

from .errors import CertificateError, DomainError
from .field import ComplexQuad, RationalInterval, RealQuad
from .numeration import NumerationSystem

_RQ0 = RealQuad(0)

VARIANT_SINGLE = "single_epsilon"
VARIANT_MU_NU = "mu_nu"


def _cross(o: ComplexQuad, p: ComplexQuad, q: ComplexQuad) -> RealQuad:
    return (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)


class ConvexPolygon:
    """Counterclockwise convex polygon; the 2-vertex degenerate form encodes
    a real interval [lo, hi]."""

    __slots__ = ("vertices", "_halfplanes")

    def __init__(self, vertices: Sequence[ComplexQuad]):
        pts = tuple(vertices)
        if len(pts) < 2:
            raise CertificateError("region needs at least two vertices")
        if len(pts) == 2:
            a, b = pts
            if not (a.is_real() and b.is_real()):
                raise CertificateError("two-vertex region must be a real interval")
            if (b.re - a.re).sign() <= 0:
                raise CertificateError("interval endpoints out of order")
        else:
            for i, p in enumerate(pts):
                if p == pts[(i + 1) % len(pts)]:
                    raise CertificateError("repeated polygon vertex")
            signs = [
                _cross(pts[i], pts[(i + 1) % len(pts)], pts[(i + 2) % len(pts)]).sign()
                for i in range(len(pts))
            ]
            if all(s < 0 for s in signs):
                pts = tuple(reversed(pts))
                signs = [-s for s in signs]
            if not all(s > 0 for s in signs):
                raise CertificateError("region not strictly convex")
        object.__setattr__(self, "vertices", pts)
        object.__setattr__(self, "_halfplanes", None)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("ConvexPolygon is immutable")

    @property
    def is_interval(self) -> bool:
        return len(self.vertices) == 2

    @property
    def ambient_d(self) -> int:
        for v in self.vertices:
            d = v.re.d or v.im.d
            if d:
                return d
        return 0

    def interval_bounds(self) -> tuple[RealQuad, RealQuad]:
        a, b = self.vertices
        return a.re, b.re

    def halfplanes(self) -> list[tuple[RealQuad, RealQuad, RealQuad, RealQuad]]:
        """(gx, gy, c, nsq) per edge with the interior satisfying
        gx*x + gy*y >= c."""
        cached = self._halfplanes
        if cached is None:
            cached = _poly_halfplanes(self.vertices)
            object.__setattr__(self, "_halfplanes", cached)
        return cached

    def translate(self, a: ComplexQuad) -> ConvexPolygon:
        return ConvexPolygon([v + a for v in self.vertices])

    def scale(self, c: ComplexQuad) -> ConvexPolygon:
        if self.is_interval:
            if not c.is_real():
                raise DomainError("cannot scale a real interval by a complex factor")
            lo, hi = self.interval_bounds()
            a, b = lo * c.re, hi * c.re
            if (b - a).sign() < 0:
                a, b = b, a
            return ConvexPolygon([ComplexQuad(a), ComplexQuad(b)])
        return ConvexPolygon([v * c for v in self.vertices])

    def mirror(self) -> ConvexPolygon:
        return self.scale(ComplexQuad.from_int(-1))

    def conjugate(self) -> ConvexPolygon:
        if self.is_interval:
            return self
        return ConvexPolygon([v.conj() for v in self.vertices])

    def to_list(self) -> list[dict]:
        return [v.to_dict() for v in self.vertices]

    def __repr__(self) -> str:
        return f"ConvexPolygon({[str(v) for v in self.vertices]})"


def _poly_halfplanes(pts) -> list[tuple[RealQuad, RealQuad, RealQuad, RealQuad]]:
    out = []
    n = len(pts)
    for i in range(n):
        v, w = pts[i], pts[(i + 1) % n]
        tx, ty = w.re - v.re, w.im - v.im
        gx, gy = -ty, tx
        c = gx * v.re + gy * v.im
        out.append((gx, gy, c, gx * gx + gy * gy))
    return out


def region_contains(region: ConvexPolygon, p: ComplexQuad) -> bool:
    if region.is_interval:
        if not p.is_real():
            return False
        lo, hi = region.interval_bounds()
        return (p.re - lo).sign() >= 0 and (hi - p.re).sign() >= 0
    for gx, gy, c, _ in region.halfplanes():
        if (gx * p.re + gy * p.im - c).sign() < 0:
            return False
    return True


def _segment_dist_sq(p: ComplexQuad, a: ComplexQuad, b: ComplexQuad) -> tuple[RealQuad, ComplexQuad]:
    ab = b - a
    ap = p - a
    t_num = ab.re * ap.re + ab.im * ap.im
    if t_num.sign() <= 0:
        return ap.norm_sq(), a
    t_den = ab.norm_sq()
    if (t_num - t_den).sign() >= 0:
        bp = p - b
        return bp.norm_sq(), b
    closest = a + ab * ComplexQuad(t_num / t_den)
    return (p - closest).norm_sq(), closest


def region_dist_sq(region: ConvexPolygon, p: ComplexQuad) -> RealQuad:
    if region_contains(region, p):
        return _RQ0
    pts = region.vertices
    if region.is_interval:
        d, _ = _segment_dist_sq(p, pts[0], pts[1])
        return d
    best: RealQuad | None = None
    n = len(pts)
    for i in range(n):
        d, _ = _segment_dist_sq(p, pts[i], pts[(i + 1) % n])
        if best is None or (d - best).sign() < 0:
            best = d
    assert best is not None
    return best


# -- clipping ------------------------------------------------------------------


def _clip(points: list[ComplexQuad], gx: RealQuad, gy: RealQuad, c: RealQuad, keep_ge: bool) -> list[ComplexQuad]:
    if not points:
        return []
    out: list[ComplexQuad] = []
    n = len(points)
    sides = []
    for p in points:
        s = gx * p.re + gy * p.im - c
        sides.append(s if keep_ge else -s)
    for i in range(n):
        cur, nxt = points[i], points[(i + 1) % n]
        s_cur, s_nxt = sides[i], sides[(i + 1) % n]
        sg_cur, sg_nxt = s_cur.sign(), s_nxt.sign()
        if sg_cur >= 0:
            out.append(cur)
        if (sg_cur > 0 and sg_nxt < 0) or (sg_cur < 0 and sg_nxt > 0):
            t = s_cur / (s_cur - s_nxt)
            out.append(cur + (nxt - cur) * ComplexQuad(t))
    return out


def _area2(points: list[ComplexQuad]) -> RealQuad:
    acc = _RQ0
    n = len(points)
    for i in range(n):
        p, q = points[i], points[(i + 1) % n]
        acc = acc + (p.re * q.im - q.re * p.im)
    return acc


def _positive_area(points: list[ComplexQuad]) -> bool:
    return len(points) >= 3 and _area2(points).sign() > 0


def _subtract(pieces: list[list[ComplexQuad]], halfplanes) -> list[list[ComplexQuad]]:
    """Split each piece into the parts outside the convex set given by
    halfplanes (interior: g.x >= c)."""
    out: list[list[ComplexQuad]] = []
    for piece in pieces:
        rem = piece
        for gx, gy, c, _ in halfplanes:
            outside = _clip(rem, gx, gy, c, keep_ge=False)
            if _positive_area(outside):
                out.append(outside)
            rem = _clip(rem, gx, gy, c, keep_ge=True)
            if not _positive_area(rem):
                rem = []
                break
    return out


def _mitered_offset(poly: ConvexPolygon, amount: RealQuad) -> list[ComplexQuad]:
    """Outer polygon containing the rounded offset; vertices are the
    intersections of adjacent outward-shifted edge lines."""
    planes = poly.halfplanes()
    hint = poly.ambient_d
    shifted = []
    for gx, gy, c, nsq in planes:
        norm = nsq.sqrt_exact(hint)
        if norm is None:
            raise CertificateError(
                "edge length is not representable in the field; exact offset impossible"
            )
        shifted.append((gx, gy, c - amount * norm))
    pts: list[ComplexQuad] = []
    n = len(shifted)
    for i in range(n):
        g1x, g1y, c1 = shifted[i]
        g2x, g2y, c2 = shifted[(i + 1) % n]
        det = g1x * g2y - g2x * g1y
        if det.sign() == 0:
            raise CertificateError("degenerate corner in offset polygon")
        x = (c1 * g2y - c2 * g1y) / det
        y = (g1x * c2 - g2x * c1) / det
        pts.append(ComplexQuad(x, y))
    return pts


def _inward_planes(poly: ConvexPolygon, shift_by: ComplexQuad, erosion: RealQuad):
    """Half-planes of erode(poly + shift_by, erosion)."""
    out = []
    hint = poly.ambient_d
    for gx, gy, c, nsq in poly.halfplanes():
        c_shift = c + gx * shift_by.re + gy * shift_by.im
        if erosion.sign() > 0:
            norm = nsq.sqrt_exact(hint)
            if norm is None:
                raise CertificateError(
                    "edge length is not representable in the field; exact erosion impossible"
                )
            c_shift = c_shift + erosion * norm
        out.append((gx, gy, c_shift, nsq))
    return out


def poly_erode(poly: ConvexPolygon, amount: RealQuad) -> Optional[ConvexPolygon]:
    """Inward offset; None when the erosion is empty (or degenerate)."""
    if amount.sign() < 0:
        raise DomainError("erosion amount must be non-negative")
    if poly.is_interval:
        lo, hi = poly.interval_bounds()
        lo2, hi2 = lo + amount, hi - amount
        if (hi2 - lo2).sign() <= 0:
            return None
        return ConvexPolygon([ComplexQuad(lo2), ComplexQuad(hi2)])
    pts = list(poly.vertices)
    for gx, gy, c, nsq in _inward_planes(poly, ComplexQuad.zero(), amount):
        pts = _clip(pts, gx, gy, c, keep_ge=True)
        if not pts:
            return None
    if not _positive_area(pts):
        return None
    cleaned: list[ComplexQuad] = []
    n = len(pts)
    for i in range(n):
        o, p, q = pts[i - 1], pts[i], pts[(i + 1) % n]
        if p != o and _cross(o, p, q).sign() != 0:
            cleaned.append(p)
    if len(cleaned) < 3:
        return None
    return ConvexPolygon(cleaned)


# -- separation ---------------------------------------------------------------


def _segments_cross(a, b, c, d) -> bool:
    o1 = _cross(a, b, c).sign()
    o2 = _cross(a, b, d).sign()
    o3 = _cross(c, d, a).sign()
    o4 = _cross(c, d, b).sign()
    if o1 != o2 and o3 != o4:
        return True
    # collinear touching counts as contact
    for (p, q, r, s) in ((a, b, c, o1), (a, b, d, o2), (c, d, a, o3), (c, d, b, o4)):
        if s == 0 and _between(p, q, r):
            return True
    return False


def _between(p, q, r) -> bool:
    return (
        (min(p.re, q.re) - r.re).sign() <= 0 <= (max(p.re, q.re) - r.re).sign()
        and (min(p.im, q.im) - r.im).sign() <= 0 <= (max(p.im, q.im) - r.im).sign()
    )


def _point_in_ccw(points: list[ComplexQuad], p: ComplexQuad) -> bool:
    n = len(points)
    for i in range(n):
        if _cross(points[i], points[(i + 1) % n], p).sign() < 0:
            return False
    return True


def _min_dist_sq(points_a: list[ComplexQuad], points_b: list[ComplexQuad]) -> tuple[RealQuad, ComplexQuad]:
    """Exact squared distance between two convex CCW point lists, with a
    witness point on the first set realizing it."""
    na, nb = len(points_a), len(points_b)
    for i in range(na):
        for j in range(nb):
            if _segments_cross(points_a[i], points_a[(i + 1) % na], points_b[j], points_b[(j + 1) % nb]):
                return _RQ0, points_a[i]
    if _point_in_ccw(points_b, points_a[0]):
        return _RQ0, points_a[0]
    if _point_in_ccw(points_a, points_b[0]):
        return _RQ0, points_b[0]
    best: RealQuad | None = None
    best_pt = points_a[0]
    for i in range(na):
        p = points_a[i]
        for j in range(nb):
            d, _ = _segment_dist_sq(p, points_b[j], points_b[(j + 1) % nb])
            if best is None or (d - best).sign() < 0:
                best, best_pt = d, p
    for j in range(nb):
        p = points_b[j]
        for i in range(na):
            d, closest = _segment_dist_sq(p, points_a[i], points_a[(i + 1) % na])
            if best is None or (d - best).sign() < 0:
                best, best_pt = d, closest
    assert best is not None
    return best, best_pt


# -- certificates ---------------------------------------------------------------


@dataclass(frozen=True)
class ParallelogramWitness:
    x0: RealQuad
    a2: RealQuad
    vertex_a: ComplexQuad
    vertex_b: ComplexQuad


@dataclass(frozen=True)
class VerifyResult:
    passed: bool
    witness: ComplexQuad | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.passed


class OLCertificate:
    def __init__(
        self,
        region: ConvexPolygon,
        epsilon: RealQuad,
        variant: str = VARIANT_SINGLE,
        mu: RealQuad | None = None,
        nu: RealQuad | None = None,
        witness: ParallelogramWitness | None = None,
        k_precision: Fraction = Fraction(1, 10**12),
    ):
        if epsilon.sign() <= 0:
            raise CertificateError("epsilon must be positive")
        if variant not in (VARIANT_SINGLE, VARIANT_MU_NU):
            raise CertificateError(f"unknown certificate variant {variant!r}")
        if variant == VARIANT_MU_NU and (mu is None or nu is None):
            raise CertificateError("mu/nu variant requires both mu and nu")
        self.region = region
        self.epsilon = epsilon
        self.variant = variant
        self.mu = mu
        self.nu = nu
        self.witness = witness
        self.contains_zero = region_contains(region, ComplexQuad.zero())
        self.k_bound = _k_bound(region, k_precision)
        self._scaled: dict[ComplexQuad, ConvexPolygon] = {}

    # largest |x| over the region, attained at a vertex
    def beta_region(self, sys: NumerationSystem) -> ConvexPolygon:
        cached = self._scaled.get(sys.base)
        if cached is None:
            cached = self.region.scale(sys.base)
            self._scaled[sys.base] = cached
        return cached

    def trunc_radius(self) -> RealQuad:
        if self.variant == VARIANT_MU_NU:
            assert self.mu is not None
            return self.mu / 2
        return self.epsilon / 2

    def select_fatten(self) -> RealQuad:
        if self.variant == VARIANT_MU_NU:
            assert self.mu is not None
            return self.epsilon + self.mu / 2
        return self.epsilon

    def mult_fatten(self) -> RealQuad:
        return self.epsilon if self.variant == VARIANT_MU_NU else self.epsilon / 2

    def div_fatten(self, sys: NumerationSystem) -> RealQuad:
        if self.variant == VARIANT_MU_NU:
            beta_abs = sys.abs_beta_exact()
            if beta_abs is None:
                raise CertificateError("|beta| is not a field element; mu/nu bookkeeping unavailable")
            assert self.mu is not None and self.nu is not None
            return beta_abs * self.mu + self.nu
        return self.epsilon / 2

    def to_dict(self) -> dict:
        out = {
            "vertices": self.region.to_list(),
            "epsilon": self.epsilon.to_dict(),
            "variant": self.variant,
        }
        if self.mu is not None:
            out["mu"] = self.mu.to_dict()
        if self.nu is not None:
            out["nu"] = self.nu.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> OLCertificate:
        region = ConvexPolygon([ComplexQuad.from_dict(v) for v in obj["vertices"]])
        epsilon = RealQuad.from_dict(obj["epsilon"])
        variant = obj.get("variant", VARIANT_SINGLE)
        mu = RealQuad.from_dict(obj["mu"]) if "mu" in obj else None
        nu = RealQuad.from_dict(obj["nu"]) if "nu" in obj else None
        return cls(region, epsilon, variant=variant, mu=mu, nu=nu)


def _k_bound(region: ConvexPolygon, precision: Fraction) -> RationalInterval:
    los, his = [], []
    for v in region.vertices:
        iv = v.abs_interval(precision)
        los.append(iv.lo)
        his.append(iv.hi)
    return RationalInterval(max(los), max(his))


# -- certificate constructors ---------------------------------------------------


def real_interval_certificate(sys: NumerationSystem) -> OLCertificate:
    if not sys.is_real:
        raise DomainError("interval certificates require a real base and digits")
    rng = sys.contiguous_range()
    if rng is None:
        raise DomainError("interval certificates require a contiguous integer alphabet")
    m, M = rng
    beta = sys.base.re
    size = M - m + 1
    if (abs(beta) - size).sign() >= 0:
        raise DomainError("alphabet is not redundant: need #A > |beta|")
    if beta.sign() > 0:
        eps = (RealQuad(size) - beta) / (RealQuad(2) * (beta + 1))
        rho = (RealQuad(M) - RealQuad(2) * eps) / (beta - 1)
        lam = (RealQuad(m) + RealQuad(2) * eps) / (beta - 1)
    else:
        eps = (RealQuad(size) + beta) / (RealQuad(2) * (RealQuad(1) - beta))
        rho = (RealQuad(1 - m)) / (RealQuad(1) - beta)
        lam = (RealQuad(-M - 1)) / (RealQuad(1) - beta)
    region = ConvexPolygon([ComplexQuad(lam), ComplexQuad(rho)])
    return OLCertificate(region, eps)


def complex_parallelogram_certificate(sys: NumerationSystem, max_eps_steps: int = 20) -> OLCertificate:
    base = sys.base
    if base.is_real():
        raise DomainError("parallelogram construction needs a non-real base")
    rng = sys.contiguous_range()
    if rng is None or rng[0] != -rng[1]:
        raise DomainError("parallelogram construction needs a symmetric contiguous integer alphabet")
    M = rng[1]
    bb = sys.beta_norm_sq
    two_re = abs(base.re + base.re)
    if ((bb + two_re) - RealQuad(2 * M + 1)).sign() >= 0:
        raise DomainError("insufficient alphabet: need #A > beta*conj(beta) + |beta + conj(beta)|")

    beta1 = base if base.re.sign() <= 0 else -base
    need_conj = beta1.im.sign() < 0
    beta0 = beta1.conj() if need_conj else beta1
    re0, im0 = beta0.re, beta0.im

    coeff0 = bb - RealQuad(2) * re0 - 1
    ub0 = RealQuad(M) / coeff0
    x0 = (RealQuad(1, 0, 2) + ub0) / 2
    coeff1 = bb - re0
    ub1 = (RealQuad(M) + x0 * (re0 + 1)) / coeff1
    u = (x0 + ub1) / 2
    a2 = u * im0
    a1 = -(re0 * u) - x0
    b1 = a1 + x0 + x0
    va = ComplexQuad(a1, a2)
    vb = ComplexQuad(b1, a2)

    # construction inequalities, all exact
    checks = [
        (x0 + x0 - 1).sign() > 0,
        ((beta0 * vb).im - (-(beta0 * va)).im).sign() == 0,
        (va.im - (beta0 * vb).im).sign() > 0,
        ((beta0 * vb).re - (va.re - M)).sign() > 0,
        ((beta0 * va).re - ((-vb).re - M)).sign() > 0,
    ]
    if not all(checks):
        raise CertificateError("parallelogram construction inequalities failed")

    region0 = ConvexPolygon([va, -vb, -va, vb])
    region = region0.conjugate() if need_conj else region0
    witness = ParallelogramWitness(x0=x0, a2=a2, vertex_a=va, vertex_b=vb)

    for k in range(1, max_eps_steps + 1):
        eps = RealQuad(1, 0, 2**k)
        cert = OLCertificate(region, eps, witness=witness)
        if verify_certificate(sys, cert).passed:
            return cert
    raise CertificateError("epsilon grid search exhausted without a verifiable certificate")


# -- verification -----------------------------------------------------------------


def verify_certificate(sys: NumerationSystem, cert: OLCertificate) -> VerifyResult:
    if cert.variant == VARIANT_MU_NU:
        return _verify_mu_nu(sys, cert)
    if cert.region.is_interval:
        return _verify_interval(sys, cert)
    return _verify_polygon(sys, cert)


def _verify_interval(sys: NumerationSystem, cert: OLCertificate) -> VerifyResult:
    if not sys.is_real:
        return VerifyResult(False, reason="interval region with a complex base")
    lo, hi = cert.region.interval_bounds()
    eps = cert.epsilon
    beta = sys.base.re
    e1, e2 = lo * beta, hi * beta
    if (e2 - e1).sign() < 0:
        e1, e2 = e2, e1
    p_lo, p_hi = e1 - eps, e2 + eps
    covers: list[tuple[RealQuad, RealQuad]] = []
    for d in sys.alphabet:
        a = d.re
        q_lo, q_hi = lo + a + eps, hi + a - eps
        if (q_hi - q_lo).sign() >= 0:
            covers.append((q_lo, q_hi))
    covers.sort(key=cmp_to_key(lambda s, t: (s[0] - t[0]).sign()))
    cur = p_lo
    for q_lo, q_hi in covers:
        if (q_lo - cur).sign() > 0:
            gap_hi = q_lo if (q_lo - p_hi).sign() < 0 else p_hi
            if (gap_hi - cur).sign() > 0:
                return VerifyResult(False, ComplexQuad((cur + gap_hi) / 2), "uncovered gap")
        if (q_hi - cur).sign() > 0:
            cur = q_hi
        if (cur - p_hi).sign() >= 0:
            return VerifyResult(True)
    if (cur - p_hi).sign() >= 0:
        return VerifyResult(True)
    return VerifyResult(False, ComplexQuad((cur + p_hi) / 2), "uncovered tail")


def _verify_polygon(sys: NumerationSystem, cert: OLCertificate) -> VerifyResult:
    eps = cert.epsilon
    q_planes = []
    for d in sys.alphabet:
        planes = _inward_planes(cert.region, d, eps)
        pts = list(cert.region.translate(d).vertices)
        for gx, gy, c, _ in planes:
            pts = _clip(pts, gx, gy, c, keep_ge=True)
            if not pts:
                break
        if pts and _positive_area(pts):
            q_planes.append(planes)
    return _covering_check(sys, cert.region, eps, q_planes)


def _verify_mu_nu(sys: NumerationSystem, cert: OLCertificate) -> VerifyResult:
    if cert.mu is None or cert.nu is None:
        raise CertificateError("mu/nu variant requires both mu and nu")
    if cert.mu.sign() <= 0 or cert.nu.sign() <= 0:
        return VerifyResult(False, reason="mu and nu must be positive")
    f = cert.div_fatten(sys)  # |beta|*mu + nu
    if (cert.epsilon - f).sign() < 0:
        return VerifyResult(False, reason="budget |beta|*mu + nu exceeds the covering radius")
    q_planes = [_inward_planes(cert.region, d, _RQ0) for d in sys.alphabet]
    return _covering_check(sys, cert.region, f, q_planes)


def _covering_check(sys, region: ConvexPolygon, fatten: RealQuad, q_planes) -> VerifyResult:
    scaled = region.scale(sys.base)
    outer = _mitered_offset(scaled, fatten)
    pieces = [outer]
    for planes in q_planes:
        pieces = _subtract(pieces, planes)
        if not pieces:
            return VerifyResult(True)
    f_sq = fatten * fatten
    scaled_pts = list(scaled.vertices)
    for piece in pieces:
        dist, pt = _min_dist_sq(piece, scaled_pts)
        if (dist - f_sq).sign() <= 0:
            return VerifyResult(False, pt, "uncovered point in the fattened region")
    return VerifyResult(True)


# -- digit selection -----------------------------------------------------------


def fattened_domain(sys: NumerationSystem, cert: OLCertificate, fatten: RealQuad) -> ConvexPolygon:
    """Convex superset of the fattened beta*I (exact miter for polygons,
    exact endpoints for intervals)."""
    scaled = cert.beta_region(sys)
    if scaled.is_interval:
        lo, hi = scaled.interval_bounds()
        return ConvexPolygon([ComplexQuad(lo - fatten), ComplexQuad(hi + fatten)])
    return ConvexPolygon(_mitered_offset(scaled, fatten))


def ball_fits(cert: OLCertificate, sys: NumerationSystem, v: ComplexQuad, digit_index: int) -> bool:
    """Exact test: the epsilon-ball around v lies inside region + digit."""
    w = v - sys.digit(digit_index)
    eps = cert.epsilon
    if cert.region.is_interval:
        if not w.is_real():
            return False
        lo, hi = cert.region.interval_bounds()
        return (w.re - (lo + eps)).sign() >= 0 and ((hi - eps) - w.re).sign() >= 0
    if not region_contains(cert.region, w):
        return False
    eps_sq = eps * eps
    for gx, gy, c, nsq in cert.region.halfplanes():
        margin = gx * w.re + gy * w.im - c
        if (margin * margin - eps_sq * nsq).sign() < 0:
            return False
    return True


def nearest_digit(sys: NumerationSystem, v: ComplexQuad) -> int:
    best = 0
    best_d: RealQuad | None = None
    for i, a in enumerate(sys.alphabet):
        d = (v - a).norm_sq()
        if best_d is None or (d - best_d).sign() < 0:
            best, best_d = i, d
    return best


def digit_select(cert: OLCertificate, sys: NumerationSystem, v: ComplexQuad) -> int:
    """Digit selector realized by the certificate: returns a with
    B(v, eps) inside region + a; nearest-qualifying with alphabet-order ties.
    The mu/nu variant selects the nearest digit."""
    fatten = cert.select_fatten()
    dist = region_dist_sq(cert.beta_region(sys), v)
    if (dist - fatten * fatten).sign() > 0:
        raise DomainError("value outside the digit selection domain")
    if cert.variant == VARIANT_MU_NU:
        return nearest_digit(sys, v)
    best: int | None = None
    best_d: RealQuad | None = None
    for i, a in enumerate(sys.alphabet):
        if ball_fits(cert, sys, v, i):
            d = (v - a).norm_sq()
            if best_d is None or (d - best_d).sign() < 0:
                best, best_d = i, d
    if best is None:
        raise CertificateError("no digit qualifies: certificate does not cover the selection domain")
    return best


def digit_select_total(cert: OLCertificate, sys: NumerationSystem, v: ComplexQuad) -> int:
    """Total extension used for table synthesis: nearest-qualifying when any
    digit's ball test passes, plain nearest otherwise."""
    if cert.variant == VARIANT_MU_NU:
        return nearest_digit(sys, v)
    best: int | None = None
    best_d: RealQuad | None = None
    for i, a in enumerate(sys.alphabet):
        if ball_fits(cert, sys, v, i):
            d = (v - a).norm_sq()
            if best_d is None or (d - best_d).sign() < 0:
                best, best_d = i, d
    if best is not None:
        return best
    return nearest_digit(sys, v)
