"""Score/accuracy indices and the seven-key lexicographic order on IVIFNs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .ivifn import TOL, Ivifn, IvifnError, ShapeMismatch, integrate

LABELS = ("S", "A", "M", "C", "D", "G", "H")


class OrderingViolated(IvifnError):
    pass


class LexKey(NamedTuple):
    s: float
    acc: float
    m: float
    c: float
    d: float
    g: float
    h: float


@dataclass(frozen=True)
class KeyPermutation:
    order: tuple = LABELS

    def __post_init__(self):
        if sorted(self.order) != sorted(LABELS) or len(self.order) != 7:
            raise ValueError(f"not a permutation of {''.join(LABELS)}: {self.order!r}")

    @classmethod
    def parse(cls, text: str) -> "KeyPermutation":
        return cls(tuple(text.strip().upper()))

    @property
    def indices(self) -> tuple:
        return tuple(LABELS.index(c) for c in self.order)

    def __str__(self):
        return "".join(self.order)


DEFAULT_PERM = KeyPermutation()


def spread_weights(shapes) -> tuple:
    """``(-I_L, I_R, -I_L', I_R') / 4``, applied to each group of four spreads.

    I_f is the shape constant int_0^1 f^{-1}; the mean value cancels in the
    score and contributes 2a to the accuracy.
    """
    iL, iR, iLp, iRp = (sh.inverse_integral for sh in shapes)
    return (-iL / 4.0, iR / 4.0, -iLp / 4.0, iRp / 4.0)


def score(x: Ivifn) -> float:
    w = spread_weights(x.shapes)
    s = x.spreads
    mu = w[0] * s[0] + w[1] * s[1] + w[2] * s[2] + w[3] * s[3]
    nu = w[0] * s[4] + w[1] * s[5] + w[2] * s[6] + w[3] * s[7]
    return mu - nu


def accuracy(x: Ivifn) -> float:
    w = spread_weights(x.shapes)
    s = x.spreads
    mu = w[0] * s[0] + w[1] * s[1] + w[2] * s[2] + w[3] * s[3]
    nu = w[0] * s[4] + w[1] * s[5] + w[2] * s[6] + w[3] * s[7]
    return 2.0 * x.a + mu + nu


def _cut_integrals(x: Ivifn, tol: float):
    L, R, Lp, Rp = x.shapes
    a, s = x.a, x.spreads

    def mu(al):
        return (a - s[0] * L.inverse(al) + a + s[1] * R.inverse(al)
                + a - s[2] * Lp.inverse(al) + a + s[3] * Rp.inverse(al))

    def nu(be):
        g = 1.0 - be
        return (a - s[4] * L.inverse(g) + a + s[5] * R.inverse(g)
                + a - s[6] * Lp.inverse(g) + a + s[7] * Rp.inverse(g))

    return integrate(mu, 0.0, 1.0, tol) / 4.0, integrate(nu, 0.0, 1.0, tol) / 4.0


def score_by_quadrature(x: Ivifn, tol: float = 1e-10) -> float:
    """Score index computed by integrating the cut endpoints numerically."""
    m, n = _cut_integrals(x, tol)
    return m - n


def accuracy_by_quadrature(x: Ivifn, tol: float = 1e-10) -> float:
    m, n = _cut_integrals(x, tol)
    return m + n


def tivifn_indices(t: Sequence[float]) -> tuple[float, float]:
    """Closed-form (S, A) of a triangular IVIFN given by its nine abscissas.

    ``t = (b1L, b1U, a1U, a1L, a2, a3L, a3U, b3U, b3L)``, non-decreasing.
    """
    t = [float(v) for v in t]
    if len(t) != 9:
        raise OrderingViolated("need nine abscissas")
    for i in range(8):
        if t[i] > t[i + 1] + TOL:
            raise OrderingViolated(f"abscissa {i + 1} ({t[i]}) exceeds abscissa {i + 2} ({t[i + 1]})")
    b1L, b1U, a1U, a1L, a2, a3L, a3U, b3U, b3L = t
    s = (a1L + a3L + a1U + a3U - b1L - b3L - b1U - b3U) / 8.0
    acc = (a1L + a3L + a1U + a3U + 8.0 * a2 + b1L + b3L + b1U + b3U) / 8.0
    return s, acc


def tivifn_from_abscissas(t: Sequence[float]) -> Ivifn:
    from .ivifn import validate
    b1L, b1U, a1U, a1L, a2, a3L, a3U, b3U, b3L = (float(v) for v in t)
    return validate(a2, (a2 - a1L, a3L - a2, a2 - a1U, a3U - a2,
                         a2 - b1L, b3L - a2, a2 - b1U, b3U - a2))


def raw_key(x: Ivifn) -> LexKey:
    a, s = x.a, x.spreads
    return LexKey(score(x), accuracy(x), a, a - s[0], a - s[2], a - s[6], a - s[4])


def lex_key(x: Ivifn, perm: KeyPermutation = DEFAULT_PERM) -> tuple:
    k = raw_key(x)
    if perm.order == LABELS:
        return k
    return tuple(k[i] for i in perm.indices)


def compare_keys(k1: Sequence[float], k2: Sequence[float], tol: float = TOL) -> int:
    for u, v in zip(k1, k2):
        if abs(u - v) > tol:
            return -1 if u < v else 1
    return 0


def compare(x: Ivifn, y: Ivifn, perm: KeyPermutation = DEFAULT_PERM, tol: float = TOL) -> int:
    """-1 if x precedes y, 0 if all seven keys tie, +1 otherwise."""
    if x.shapes != y.shapes:
        raise ShapeMismatch("cannot rank numbers with different shapes")
    return compare_keys(lex_key(x, perm), lex_key(y, perm), tol)


def ivifn_equal(x: Ivifn, y: Ivifn, tol: float = TOL) -> bool:
    return abs(x.a - y.a) <= tol and all(abs(p - q) <= tol for p, q in zip(x.spreads, y.spreads))


def precedes(x: Ivifn, y: Ivifn, perm: KeyPermutation = DEFAULT_PERM, tol: float = TOL) -> bool:
    """Weak order x <= y."""
    return compare(x, y, perm, tol) <= 0
