"""Riemann theta function and order-2 theta characteristics.

Characteristics are stored in the integer convention: a characteristic is a
pair of vectors m, n in {0,1}^g and the series is

    theta[m;n](z, Z) = sum_k exp(pi*i*t(k+m/2) Z (k+m/2) + 2*pi*i*t(k+m/2)(z+n/2))

summed over the cube |k|_inf <= R.  The truncation radius R is the fixed
point of

    R -> ceil( sqrt(g)*b/lam + sqrt((log((2R+1)^g / tail_tol) + pi*g*b^2/lam)
                                    / (pi*lam)) ) + 2

with lam the smallest eigenvalue of Im(Z) and b = |Im z|_inf.  For |k|_inf = r
the summand is bounded by exp(-pi*lam*(r-1/2)^2 + 2*pi*sqrt(g)*b*(r+1/2)), so
with the +2 safety margin the absolute truncation error is below tail_tol.
Terms are accumulated shell by shell (increasing |k|_inf) with exact
compensated summation, so results are reproducible bit-for-bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ParameterError, TruncationError
from .siegel import blocks, lu_solve, min_eig_im, siegel_action, symplectic_check


@dataclass(frozen=True)
class ThetaCharacteristic:
    """An order-2 characteristic: vectors m, n in {0,1}^g."""

    m: tuple[int, ...]
    n: tuple[int, ...]

    def __post_init__(self):
        if len(self.m) != len(self.n):
            raise DimensionError("m and n must have the same length")
        if not all(v in (0, 1) for v in self.m + self.n):
            raise ParameterError("characteristic entries must be 0 or 1")

    @property
    def g(self) -> int:
        return len(self.m)


def parity(ch: ThetaCharacteristic) -> str:
    """'even' iff t(m).n is even."""
    dot = sum(a * b for a, b in zip(ch.m, ch.n))
    return "even" if dot % 2 == 0 else "odd"


def all_characteristics(g: int):
    """All 2^(2g) order-2 characteristics, lexicographic in (m, n)."""
    vecs = [tuple((i >> j) & 1 for j in reversed(range(g))) for i in range(2**g)]
    return [ThetaCharacteristic(m, n) for m in vecs for n in vecs]


@dataclass(frozen=True)
class TruncationPolicy:
    tail_tol: float = 1e-14
    max_radius: int = 60

    def __post_init__(self):
        if self.tail_tol <= 0 or self.max_radius < 1:
            raise ParameterError("tail_tol and max_radius must be positive")


DEFAULT_POLICY = TruncationPolicy()


def truncation_radius(lam: float, g: int, policy: TruncationPolicy,
                      im_z_norm: float = 0.0) -> int:
    """Fixed point of the documented radius recursion."""
    if lam <= 0:
        raise TruncationError("Im(Z) is not positive definite")
    b = float(im_z_norm)
    R = 2
    for _ in range(200):
        count = g * math.log(2 * R + 1)
        arg = (count - math.log(policy.tail_tol) + math.pi * g * b * b / lam)
        R_new = math.ceil(math.sqrt(g) * b / lam + math.sqrt(arg / (math.pi * lam))) + 2
        if R_new <= R:
            return R
        R = R_new
        if R > policy.max_radius:
            raise TruncationError(
                f"required radius {R} exceeds max_radius {policy.max_radius} "
                f"(Im(Z) too small: lambda_min = {lam:.3e})"
            )
    return R


@lru_cache(maxsize=32)
def _cube(g: int, R: int):
    """Integer cube |k|_inf <= R with its |k|_inf shell index."""
    axes = np.arange(-R, R + 1)
    k = np.stack(np.meshgrid(*([axes] * g), indexing="ij"), axis=-1).reshape(-1, g)
    shell = np.abs(k).max(axis=1)
    return k, shell


def _shell_sum(terms: np.ndarray, shell: np.ndarray, R: int) -> complex:
    parts_re, parts_im = [], []
    for r in range(R + 1):
        block = terms[shell == r]
        parts_re.append(float(np.sum(block.real)))
        parts_im.append(float(np.sum(block.imag)))
    return complex(math.fsum(parts_re), math.fsum(parts_im))


def theta_char(ch: ThetaCharacteristic, z, Z,
               policy: TruncationPolicy = DEFAULT_POLICY,
               radius: int | None = None) -> complex:
    """Theta with characteristic ch at argument z and period matrix Z."""
    Z = np.asarray(Z, dtype=complex)
    g = ch.g
    if Z.shape != (g, g):
        raise DimensionError(f"Z has shape {Z.shape}, expected ({g}, {g})")
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape != (g,):
        raise DimensionError(f"z has length {z.shape[0]}, expected {g}")
    lam = min_eig_im(Z)
    if radius is None:
        radius = truncation_radius(lam, g, policy, float(np.abs(z.imag).max()))
    k, shell = _cube(g, radius)
    v = k + np.asarray(ch.m, dtype=float) / 2.0
    w = z + np.asarray(ch.n, dtype=float) / 2.0
    quad = np.einsum("ki,ij,kj->k", v, Z, v)
    expo = 1j * math.pi * quad + 2j * math.pi * (v @ w)
    return _shell_sum(np.exp(expo), shell, radius)


def riemann_theta(z, Z, policy: TruncationPolicy = DEFAULT_POLICY,
                  radius: int | None = None) -> complex:
    """The plain Riemann theta function (zero characteristic)."""
    Z = np.asarray(Z, dtype=complex)
    g = Z.shape[0]
    zero = ThetaCharacteristic((0,) * g, (0,) * g)
    return theta_char(zero, z, Z, policy, radius)


def theta_null(ch: ThetaCharacteristic, Z,
               policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Theta constant: theta[ch](0, Z)."""
    return theta_char(ch, np.zeros(ch.g), Z, policy)


def char_transform(M, ch: ThetaCharacteristic) -> ThetaCharacteristic:
    """Characteristic ch' such that theta[ch'](M(z, Z)) is proportional to
    theta[ch](z, Z), reduced mod 2.

    With M = [[a, b], [c, d]] and the shift vectors p = diag(c t(d)),
    q = diag(a t(b)):

        m' = d m - c n + p,   n' = -b m + a n + q   (mod 2).

    Raises ParameterError if M is not symplectic.
    """
    M = np.asarray(M)
    if not symplectic_check(M):
        raise ParameterError("char_transform requires a symplectic matrix")
    g = M.shape[0] // 2
    if g != ch.g:
        raise DimensionError(f"matrix genus {g} != characteristic genus {ch.g}")
    a, b, c, d = blocks(np.rint(M).astype(np.int64))
    p = np.diag(c @ d.T)
    q = np.diag(a @ b.T)
    m = np.asarray(ch.m)
    n = np.asarray(ch.n)
    m2 = (d @ m - c @ n + p) % 2
    n2 = (-b @ m + a @ n + q) % 2
    return ThetaCharacteristic(tuple(int(x) for x in m2), tuple(int(x) for x in n2))


def modular_transform_point(M, z, Z):
    """The symplectic action on (z, Z): (t(cZ+d)^-1 z, (aZ+b)(cZ+d)^-1)."""
    Z = np.asarray(Z, dtype=complex)
    z = np.asarray(z, dtype=complex).reshape(-1)
    a, b, c, d = blocks(np.asarray(M, dtype=complex))
    den = c @ Z + d
    return lu_solve(den.T, z), siegel_action(M, Z)


def modular_magnitude_check(M, ch: ThetaCharacteristic, z, Z,
                            policy: TruncationPolicy = DEFAULT_POLICY) -> float:
    """Magnitude-level residual of the modular transformation formula.

    Returns | |theta[ch'](M(z,Z))| - |det(cZ+d)|^(1/2) * |exp(pi*i*t(z)(cZ+d)^-1 c z)|
    * |theta[ch](z,Z)| | with ch' = char_transform(M, ch).  The eighth root of
    unity in the exact formula has magnitude one and drops out.
    """
    Z = np.asarray(Z, dtype=complex)
    z = np.asarray(z, dtype=complex).reshape(-1)
    ch2 = char_transform(M, ch)
    a, b, c, d = blocks(np.asarray(M, dtype=complex))
    den = c @ Z + d
    z2, Z2 = modular_transform_point(M, z, Z)
    lhs = abs(theta_char(ch2, z2, Z2, policy))
    factor = math.sqrt(abs(np.linalg.det(den)))
    phase = abs(np.exp(1j * math.pi * (z @ lu_solve(den, c @ z))))
    rhs = factor * phase * abs(theta_char(ch, z, Z, policy))
    return abs(lhs - rhs)
