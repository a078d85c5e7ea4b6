"""LR-type interval-valued intuitionistic fuzzy numbers.

A number is stored as its mean value ``a`` plus eight non-negative spreads in
the order::

    (l_mu_L, r_mu_L, l_mu_U, r_mu_U, l_nu_L, r_nu_L, l_nu_U, r_nu_U)

i.e. lower membership, upper membership, lower non-membership and upper
non-membership, left spread first.  The four supports are nested as

    [a - l_mu_L, a + r_mu_L] <= [a - l_mu_U, a + r_mu_U]
        <= [a - l_nu_U, a + r_nu_U] <= [a - l_nu_L, a + r_nu_L]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

TOL = 1e-9

SPREAD_NAMES = ("l_mu_L", "r_mu_L", "l_mu_U", "r_mu_U",
                "l_nu_L", "r_nu_L", "l_nu_U", "r_nu_U")

# (smaller, larger) index pairs that must hold for an LR-type number
NESTING_PAIRS = (
    (0, 2),  # l_mu_U >= l_mu_L
    (1, 3),  # r_mu_U >= r_mu_L
    (6, 4),  # l_nu_L >= l_nu_U
    (7, 5),  # r_nu_L >= r_nu_U
    (0, 4),  # l_nu_L >= l_mu_L
    (1, 5),  # r_nu_L >= r_mu_L
    (2, 6),  # l_nu_U >= l_mu_U
    (3, 7),  # r_nu_U >= r_mu_U
)

# levels from innermost to outermost support: (left index, right index)
LEVELS = {"mu_L": (0, 1), "mu_U": (2, 3), "nu_U": (6, 7), "nu_L": (4, 5)}
LEVEL_ORDER = ("mu_L", "mu_U", "nu_U", "nu_L")


class IvifnError(ValueError):
    pass


class SpreadNegative(IvifnError):
    pass


class NestingViolated(IvifnError):
    pass


class ShapeMismatch(IvifnError):
    pass


class OutOfRange(IvifnError):
    pass


def _simpson(f, a, b, tol, depth=50):
    # adaptive composite Simpson
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2.0, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def integrate(f: Callable[[float], float], a: float = 0.0, b: float = 1.0,
              tol: float = 1e-10) -> float:
    """Adaptive Simpson quadrature of ``f`` over ``[a, b]``."""
    return _simpson(f, a, b, tol)


@dataclass(frozen=True)
class ShapeSpec:
    """A reference function f together with its inverse on (0, 1].

    ``inverse_integral`` is the constant int_0^1 f^{-1}(alpha) d alpha which is
    all the score and accuracy indices need from a shape.
    """

    name: str
    kind: str = "custom"
    function: Callable[[float], float] | None = field(default=None, compare=False, repr=False)
    inverse: Callable[[float], float] | None = field(default=None, compare=False, repr=False)
    inverse_integral: float = field(default=0.5, compare=False)

    def __post_init__(self):
        if self.kind not in ("linear", "custom"):
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if not self.inverse_integral > 0:
            raise ValueError("inverse_integral must be positive")

    @classmethod
    def custom(cls, name, function, inverse, inverse_integral=None):
        if inverse_integral is None:
            inverse_integral = integrate(lambda t: inverse(t) if t > 0 else inverse(1e-300))
        return cls(name=name, kind="custom", function=function, inverse=inverse,
                   inverse_integral=float(inverse_integral))

    def __call__(self, x):
        return self.function(x)


def _linear(x):
    return max(0.0, 1.0 - x)


def _linear_inv(alpha):
    return 1.0 - alpha


LINEAR = ShapeSpec(name="linear", kind="linear", function=_linear,
                   inverse=_linear_inv, inverse_integral=0.5)
LINEAR_SHAPES = (LINEAR, LINEAR, LINEAR, LINEAR)


class Interval(NamedTuple):
    lo: float
    hi: float

    def contains(self, other: "Interval", tol: float = TOL) -> bool:
        return self.lo <= other.lo + tol and other.hi <= self.hi + tol


class NestedSupports(NamedTuple):
    mu_L: Interval
    mu_U: Interval
    nu_U: Interval
    nu_L: Interval


class Cuts(NamedTuple):
    alpha_lower: Interval
    alpha_upper: Interval
    beta_lower: Interval
    beta_upper: Interval


@dataclass(frozen=True)
class Ivifn:
    """An LR-type IVIFN ``(a; l_mu_L, r_mu_L, l_mu_U, r_mu_U; l_nu_L, r_nu_L, l_nu_U, r_nu_U)``.

    Construct through :func:`ivifn` (or :meth:`Ivifn.of`) to get validation.
    Shapes are ``(L, R, L', R')``.
    """

    a: float
    spreads: tuple
    shapes: tuple = LINEAR_SHAPES

    @classmethod
    def of(cls, a, *spreads, shapes=LINEAR_SHAPES):
        if len(spreads) == 1 and not isinstance(spreads[0], (int, float)):
            spreads = tuple(spreads[0])
        return validate(a, spreads, shapes)

    @classmethod
    def crisp(cls, value: float, shapes=LINEAR_SHAPES) -> "Ivifn":
        return cls(float(value), (0.0,) * 8, tuple(shapes))

    @property
    def l_mu_L(self): return self.spreads[0]

    @property
    def r_mu_L(self): return self.spreads[1]

    @property
    def l_mu_U(self): return self.spreads[2]

    @property
    def r_mu_U(self): return self.spreads[3]

    @property
    def l_nu_L(self): return self.spreads[4]

    @property
    def r_nu_L(self): return self.spreads[5]

    @property
    def l_nu_U(self): return self.spreads[6]

    @property
    def r_nu_U(self): return self.spreads[7]

    def as_tuple(self) -> tuple:
        return (self.a,) + tuple(self.spreads)

    def is_crisp(self) -> bool:
        return all(s == 0 for s in self.spreads)

    def to_json(self) -> dict:
        names = {s.name for s in self.shapes}
        if names != {"linear"}:
            raise ValueError("only linear-shape numbers are serialisable")
        return {"a": self.a, "spreads": list(self.spreads), "shape": "linear"}

    @classmethod
    def from_json(cls, obj) -> "Ivifn":
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            return cls.crisp(obj)
        if isinstance(obj, str):
            return parse_tuple(obj)
        if not isinstance(obj, dict):
            raise IvifnError(f"expected an IVIFN object, got {type(obj).__name__}")
        try:
            a, spreads = obj["a"], obj["spreads"]
        except KeyError as exc:
            raise IvifnError(f"IVIFN object missing field {exc.args[0]!r}") from None
        shape = obj.get("shape", "linear")
        if shape != "linear":
            raise IvifnError(f"unsupported shape {shape!r} (only 'linear' is serialisable)")
        if not isinstance(spreads, (list, tuple)) or len(spreads) != 8:
            raise IvifnError("'spreads' must be a list of 8 numbers")
        return validate(a, spreads)

    def __str__(self):
        return format_ivifn(self)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, Ivifn):
            return mul(self, other)
        return scalar_mul(other, self)

    __rmul__ = __mul__

    def __neg__(self):
        return scalar_mul(-1.0, self)


def _fmt(v: float, decimals: int = 4) -> str:
    s = f"{v:.{decimals}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


fmt_number = _fmt


def format_ivifn(x: Ivifn, decimals: int = 4) -> str:
    f = lambda v: _fmt(v, decimals)
    s = [f(v) for v in x.spreads]
    return f"({f(x.a)};{','.join(s[:4])};{','.join(s[4:])})"


def parse_tuple(text: str) -> Ivifn:
    """Parse the ``(a; s1,s2,s3,s4; s5,s6,s7,s8)`` notation (linear shapes)."""
    body = text.strip()
    if body.endswith("_LR"):
        body = body[:-3]
    body = body.strip().lstrip("(").rstrip(")")
    parts = [p for p in body.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 9:
        raise IvifnError(f"expected 9 components, got {len(parts)} in {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise IvifnError(f"non-numeric component in {text!r}") from None
    return validate(vals[0], vals[1:])


def validate(a, spreads: Sequence[float], shapes=LINEAR_SHAPES, tol: float = TOL) -> Ivifn:
    """Check the LR conditions and return an :class:`Ivifn`.

    Raises :class:`SpreadNegative` or :class:`NestingViolated` naming the first
    inequality that fails.
    """
    spreads = tuple(float(s) for s in spreads)
    if len(spreads) != 8:
        raise IvifnError(f"expected 8 spreads, got {len(spreads)}")
    a = float(a)
    if not all(math.isfinite(v) for v in (a,) + spreads):
        raise IvifnError("IVIFN components must be finite")
    shapes = tuple(shapes)
    if len(shapes) != 4:
        raise IvifnError("expected four shapes (L, R, L', R')")
    for name, s in zip(SPREAD_NAMES, spreads):
        if s < -tol:
            raise SpreadNegative(f"{name} = {s} < 0")
    for small, large in NESTING_PAIRS:
        if spreads[large] < spreads[small] - tol:
            raise NestingViolated(
                f"{SPREAD_NAMES[large]}={spreads[large]:g} < {SPREAD_NAMES[small]}={spreads[small]:g}")
    spreads = tuple(max(s, 0.0) for s in spreads)
    return Ivifn(a, spreads, shapes)


ivifn = Ivifn.of


def supports(x: Ivifn) -> NestedSupports:
    a, s = x.a, x.spreads
    return NestedSupports(*(Interval(a - s[LEVELS[lv][0]], a + s[LEVELS[lv][1]])
                            for lv in LEVEL_ORDER))


def alpha_cuts(x: Ivifn, alpha: float) -> tuple[Interval, Interval]:
    """Lower and upper membership alpha-cuts."""
    if not 0.0 < alpha <= 1.0:
        raise OutOfRange(f"alpha={alpha} not in (0, 1]")
    L, R, Lp, Rp = x.shapes
    a, s = x.a, x.spreads
    lower = Interval(a - s[0] * L.inverse(alpha), a + s[1] * R.inverse(alpha))
    upper = Interval(a - s[2] * Lp.inverse(alpha), a + s[3] * Rp.inverse(alpha))
    return lower, upper


def beta_cuts(x: Ivifn, beta: float) -> tuple[Interval, Interval]:
    """Lower and upper non-membership beta-cuts."""
    if not 0.0 < beta <= 1.0:
        raise OutOfRange(f"beta={beta} not in (0, 1]")
    L, R, Lp, Rp = x.shapes
    a, s = x.a, x.spreads
    g = 1.0 - beta
    lower = Interval(a - s[4] * L.inverse(g), a + s[5] * R.inverse(g))
    upper = Interval(a - s[6] * Lp.inverse(g), a + s[7] * Rp.inverse(g))
    return lower, upper


def cuts(x: Ivifn, alpha: float, beta: float) -> Cuts:
    if not (0.0 < alpha <= 1.0 and 0.0 < beta <= 1.0) or alpha + beta > 1.0 + 1e-12:
        raise OutOfRange(f"need alpha, beta in (0, 1] with alpha + beta <= 1, got {alpha}, {beta}")
    return Cuts(*alpha_cuts(x, alpha), *beta_cuts(x, beta))


def intersect(i: Interval, j: Interval) -> Interval | None:
    lo, hi = max(i.lo, j.lo), min(i.hi, j.hi)
    return Interval(lo, hi) if lo <= hi else None


def alpha_beta_cuts(x: Ivifn, alpha: float, beta: float) -> tuple:
    """Lower and upper (alpha, beta)-cuts; ``None`` where the intersection is empty."""
    c = cuts(x, alpha, beta)
    return intersect(c.alpha_lower, c.beta_lower), intersect(c.alpha_upper, c.beta_upper)


def _check_shapes(x: Ivifn, y: Ivifn):
    if x.shapes != y.shapes:
        raise ShapeMismatch("operands use different shape functions")


def add(x: Ivifn, y: Ivifn) -> Ivifn:
    _check_shapes(x, y)
    return Ivifn(x.a + y.a, tuple(p + q for p, q in zip(x.spreads, y.spreads)), x.shapes)


def _swap_sides(s):
    return (s[1], s[0], s[3], s[2], s[5], s[4], s[7], s[6])


def sub(x: Ivifn, y: Ivifn) -> Ivifn:
    _check_shapes(x, y)
    return Ivifn(x.a - y.a, tuple(p + q for p, q in zip(x.spreads, _swap_sides(y.spreads))),
                 x.shapes)


def scalar_mul(lam: float, x: Ivifn) -> Ivifn:
    lam = float(lam)
    s = x.spreads
    out = []
    for i in range(0, 8, 2):
        l, r = s[i], s[i + 1]
        out += [max(lam * l, -lam * r), max(lam * r, -lam * l)]
    # max(0*l, -0*r) can be -0.0
    return Ivifn(lam * x.a, tuple(v + 0.0 for v in out), x.shapes)


def interval_mul(p: float, q: float, u: float, v: float) -> Interval:
    prods = (p * u, p * v, q * u, q * v)
    return Interval(min(prods), max(prods))


def mul(x: Ivifn, y: Ivifn) -> Ivifn:
    """Product of two numbers via the interval product of each nested support."""
    _check_shapes(x, y)
    m = x.a * y.a
    sx, sy = supports(x), supports(y)
    spreads = [0.0] * 8
    for lv, ix, iy in zip(LEVEL_ORDER, sx, sy):
        lo, hi = interval_mul(ix.lo, ix.hi, iy.lo, iy.hi)
        li, ri = LEVELS[lv]
        spreads[li] = max(m - lo, 0.0)
        spreads[ri] = max(hi - m, 0.0)
    return Ivifn(m, tuple(spreads), x.shapes)


def characteristic_points(x: Ivifn) -> tuple:
    """The nine ordered abscissas from the outer-left support end to the outer-right one."""
    a, s = x.a, x.spreads
    return (a - s[4], a - s[6], a - s[2], a - s[0], a,
            a + s[1], a + s[3], a + s[7], a + s[5])


def sign_class(x: Ivifn) -> int:
    """Class 1..10: index of the first characteristic point that is >= 0 (10 if none)."""
    for k, p in enumerate(characteristic_points(x), start=1):
        if p >= 0:
            return k
    return 10


def is_nonnegative(x: Ivifn) -> bool:
    return x.a - x.l_nu_L >= 0


def membership(x: Ivifn, t: float) -> tuple[float, float, float, float]:
    """``(mu_L, mu_U, nu_L, nu_U)`` evaluated at abscissa ``t``."""
    L, R, Lp, Rp = x.shapes
    a, s = x.a, x.spreads

    def flank(left_spread, right_spread, fl, fr):
        if t == a:
            return 1.0
        if t < a:
            return fl((a - t) / left_spread) if a - left_spread <= t else 0.0
        return fr((t - a) / right_spread) if t <= a + right_spread else 0.0

    mu_l = flank(s[0], s[1], L, R)
    mu_u = flank(s[2], s[3], Lp, Rp)
    nu_l = 1.0 - flank(s[4], s[5], L, R)
    nu_u = 1.0 - flank(s[6], s[7], Lp, Rp)
    return mu_l, mu_u, nu_l, nu_u
