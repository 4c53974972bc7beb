"""Numerical distributions near configuration-space diagonals.

Geometry and conventions
------------------------

A configuration of n labelled points in R^d is reduced by translation
invariance: x_1 is pinned to the origin and the ambient space of the kernels
is R^m with m = (n-1) d, coordinates the concatenation of x_2, ..., x_n.
Kernel variants:

* ``HomogeneousPower``: |x|^(-k) on R^m minus the origin, k rational.
* ``PropagatorProduct``: prod over edges G(x_i - x_j)^multiplicity with the
  Green function G(x) = |x|^(-(d-2)) for d >= 3, -log|x| for d = 2 and |x|
  for d = 1, constant factors fixed to 1 throughout.
* ``MollifiedDelta``: a derivative of a delta on the partial diagonal
  {x_i = x_j for i, j in I}, mollified by a product of Gaussians of width
  ``width`` in the difference directions.
* ``LinearCombination``: finite formal sums of the above.

The scaling degree of a kernel t is the infimum over s such that
lambda^s <t(lambda .), omega> -> 0 as lambda -> 0 for every test function
(the convergence requirement is part of the definition). It is computed
symbolically per variant, and estimated numerically by regressing
log |<t(lambda .), omega>| on log lambda over a geometric grid.

Quadrature is a fixed-resolution tensor-product midpoint rule on the box
[-L, L]^m. The resolution must be even so that no node lands on a coordinate
hyperplane through the origin (midpoint nodes sit at -L + (i + 1/2) h, which
hits 0 only for odd resolutions). Pairings are deterministic: same inputs,
same grid, same summation order, bit-identical output within a platform.

Extension across the origin subtracts a Taylor polynomial weighted by a bump
w with w(0) = 1: <t-bar, omega> = <t, omega - w . sum_(|beta| <= rho)
x^beta del^beta omega(0) / beta!> with subtraction order
rho = max(floor(sd) - m, -1); rho = -1 means no subtraction. Only this
single-collapse extension (all points to one) is implemented; iterated
partial-diagonal extensions are out of scope here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from egdeform.combinatorics import (
    MultiIndex,
    SubsetMask,
    enumerate_multi_indices,
)

Edge = tuple[int, int]

#: pairings whose magnitude drops below this are treated as lost to underflow
UNDERFLOW_FLOOR = 1e-300
# a pairing whose magnitude falls this far below its absolute mass is pure
# cancellation noise, not signal
CANCELLATION_FLOOR = 1e-12

#: a test function is treated as vanishing near the origin when its Gaussian
#: center is at least this many widths away (exp(-18) and below)
ORIGIN_CLEARANCE_WIDTHS = 6.0


class NotComputableError(ValueError):
    """No symbolic rule applies to this kernel."""


class DivergenceError(ValueError):
    """The requested pairing is a divergent integral; quadrature would lie."""


class UnreliableEstimateError(RuntimeError):
    """A numeric estimate hit underflow or degenerate data; carries partials."""

    def __init__(self, message: str, lam_values=None, pairings=None):
        super().__init__(message)
        self.lam_values = lam_values
        self.pairings = pairings


class DiagonalSupportError(RuntimeError):
    """Two extensions of one kernel differ by more than a diagonal term."""


@dataclass(frozen=True)
class ScalingDegreeValue:
    """A rational scaling degree, or the infinite flag."""

    value: Fraction | None = None
    infinite: bool = False

    def __post_init__(self) -> None:
        # exactly one of the two must be set
        if self.infinite == (self.value is not None):
            raise ValueError("set either a finite value or the infinite flag")

    @classmethod
    def finite(cls, v) -> "ScalingDegreeValue":
        return cls(value=Fraction(v))

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __float__(self) -> float:
        if self.infinite:
            return math.inf
        return float(self.value)


@dataclass(frozen=True)
class HomogeneousPower:
    """|x|^(-exponent) on R^ambient minus the origin."""

    exponent: Fraction
    ambient: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.ambient < 1:
            raise ValueError("ambient dimension must be >= 1")


@dataclass(frozen=True)
class PropagatorProduct:
    """prod over edges (i, j) of G(x_i - x_j)^multiplicity on n labelled points.

    ``edges`` maps pairs (i, j), i < j, to multiplicities >= 1, stored as a
    sorted tuple so the value is hashable and canonical. An empty edge set is
    the constant kernel 1.
    """

    n_points: int
    d: int
    edges: tuple[tuple[Edge, int], ...]

    def __post_init__(self) -> None:
        if self.n_points < 1:
            raise ValueError("need at least one point")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        canon = tuple(sorted((tuple(e), int(m)) for e, m in self.edges))
        for (i, j), m in canon:
            if not (1 <= i < j <= self.n_points):
                raise ValueError(f"edge {(i, j)} is not an ordered point pair")
            if m < 1:
                raise ValueError("edge multiplicities must be >= 1")
        object.__setattr__(self, "edges", canon)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.edges)


@dataclass(frozen=True)
class MollifiedDelta:
    """A Gaussian-mollified del^alpha delta on the diagonal {x_i = x_j, i, j in I}.

    ``subset`` lives on the point labels {1..n_points}; ``alpha`` is an ambient
    multi-index of length (n_points - 1) d. Symbolically the kernel is treated
    as the exact delta derivative (scaling degree d (|I| - 1) + |alpha|);
    numerically it is the smooth product of difference Gaussians of width
    ``width``, differentiated analytically.
    """

    n_points: int
    d: int
    subset: SubsetMask
    alpha: MultiIndex
    width: float = 1e-3

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError("a diagonal needs at least two points")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.subset.n != self.n_points:
            raise ValueError("subset parent does not match the point count")
        if self.subset.size < 2:
            raise ValueError("a diagonal collapses at least two points")
        if len(self.alpha) != (self.n_points - 1) * self.d:
            raise ValueError(
                f"alpha must have length {(self.n_points - 1) * self.d}"
            )
        if not self.width > 0:
            raise ValueError("mollifier width must be positive")


def origin_delta(
    m: int, alpha: MultiIndex | Sequence[int] | None = None, width: float = 1e-3
) -> MollifiedDelta:
    """The mollified del^alpha delta at the origin of R^m (two points, full collapse)."""
    if alpha is None:
        alpha = MultiIndex.zero(m)
    elif not isinstance(alpha, MultiIndex):
        alpha = MultiIndex(tuple(alpha))
    return MollifiedDelta(
        n_points=2,
        d=m,
        subset=SubsetMask.full(2),
        alpha=alpha,
        width=width,
    )


@dataclass(frozen=True)
class LinearCombination:
    """A finite formal sum of kernels with scalar coefficients."""

    terms: tuple[tuple[Union[Fraction, int, float], "Kernel"], ...]

    def __post_init__(self) -> None:
        dims = {ambient_dim(k) for _, k in self.terms}
        if len(dims) > 1:
            raise ValueError("combination mixes ambient dimensions")


Kernel = Union[HomogeneousPower, PropagatorProduct, MollifiedDelta, LinearCombination]


def ambient_dim(kernel: Kernel) -> int | None:
    """Dimension of the reduced configuration space the kernel lives on."""
    if isinstance(kernel, HomogeneousPower):
        return kernel.ambient
    if isinstance(kernel, (PropagatorProduct, MollifiedDelta)):
        return (kernel.n_points - 1) * kernel.d
    if isinstance(kernel, LinearCombination):
        dims = {ambient_dim(k) for _, k in kernel.terms}
        return dims.pop() if dims else None
    raise TypeError(f"not a kernel: {type(kernel).__name__}")


def _point_block(pts: np.ndarray, j: int, d: int) -> np.ndarray:
    """Coordinates of point j (1-based) under the x_1 = 0 pinning."""
    if j == 1:
        return np.zeros((pts.shape[0], d))
    return pts[:, (j - 2) * d : (j - 1) * d]


def _green_values(r: np.ndarray, d: int) -> np.ndarray:
    if d >= 3:
        return r ** float(-(d - 2))
    if d == 2:
        return -np.log(r)
    return r


def _hermite_he(k: int, u: np.ndarray) -> np.ndarray:
    """Probabilists' Hermite polynomial He_k, by recursion."""
    if k == 0:
        return np.ones_like(u)
    prev, cur = np.ones_like(u), u.copy()
    for j in range(1, k):
        prev, cur = cur, u * cur - j * prev
    return cur

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _gaussian_derivative(k: int, v: np.ndarray, eps: float) -> np.ndarray:
    """k-th derivative of the width-eps Gaussian mollifier at v.

    d^k/dv^k [exp(-v^2 / (2 eps^2)) / (eps sqrt(2 pi))]
      = eps^(-k-1) (-1)^k He_k(v / eps) N(v / eps).
    """
    u = v / eps
    dens = np.exp(-0.5 * u * u) / _SQRT_2PI
    return ((-1.0) ** k) * eps ** (-(k + 1)) * _hermite_he(k, u) * dens


def _mollified_delta_values(kernel: MollifiedDelta, pts: np.ndarray) -> np.ndarray:
    members = kernel.subset.members
    d = kernel.d
    base = members[0]
    rest = members[1:]
    # factor (t, c): the 1-d Gaussian in v = x_{rest[t], c} - x_{base, c}
    factors = [(t, c) for t in range(len(rest)) for c in range(d)]
    findex = {f: i for i, f in enumerate(factors)}

    # expand del^alpha of the product into terms (coefficient, per-factor orders)
    terms: list[tuple[float, tuple[int, ...]]] = [(1.0, (0,) * len(factors))]
    for a, repeats in enumerate(kernel.alpha):
        point = a // d + 2
        comp = a % d
        for _ in range(repeats):
            nxt: list[tuple[float, tuple[int, ...]]] = []
            for coeff, orders in terms:
                for t, member in enumerate(rest):
                    sign = 0
                    if member == point:
                        sign = 1
                    elif base == point:
                        sign = -1
                    if sign:
                        idx = findex[(t, comp)]
                        bumped = list(orders)
                        bumped[idx] += 1
                        nxt.append((coeff * sign, tuple(bumped)))
            terms = nxt
            if not terms:
                return np.zeros(pts.shape[0])

    diffs = [
        _point_block(pts, member, d) - _point_block(pts, base, d) for member in rest
    ]
    out = np.zeros(pts.shape[0])
    for coeff, orders in terms:
        val = np.full(pts.shape[0], coeff)
        for (t, c), k in zip(factors, orders):
            val = val * _gaussian_derivative(k, diffs[t][:, c], kernel.width)
        out += val
    return out


def kernel_values(kernel: Kernel, pts: np.ndarray) -> np.ndarray:
    """Evaluate a kernel pointwise on an (N, m) array of ambient points."""
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be an (N, m) array")
    m = ambient_dim(kernel)
    if m is not None and pts.shape[1] != m:
        raise ValueError(f"kernel lives on R^{m}, got points in R^{pts.shape[1]}")

    if isinstance(kernel, HomogeneousPower):
        r = np.linalg.norm(pts, axis=1)
        return r ** float(-kernel.exponent)
    if isinstance(kernel, PropagatorProduct):
        out = np.ones(pts.shape[0])
        for (i, j), mult in kernel.edges:
            diff = _point_block(pts, i, kernel.d) - _point_block(pts, j, kernel.d)
            r = np.linalg.norm(diff, axis=1)
            out = out * _green_values(r, kernel.d) ** mult
        return out
    if isinstance(kernel, MollifiedDelta):
        return _mollified_delta_values(kernel, pts)
    if isinstance(kernel, LinearCombination):
        out = np.zeros(pts.shape[0])
        for coeff, member in kernel.terms:
            out = out + float(coeff) * kernel_values(member, pts)
        return out
    raise TypeError(f"not a kernel: {type(kernel).__name__}")


@dataclass(frozen=True)
class TestFunction:
    """A Gaussian bump times a monomial: x^beta exp(-|x - center|^2 / (2 width^2))."""

    # not a unit-test container, despite what collection heuristics think
    __test__ = False

    center: tuple[float, ...]
    width: float
    polynomial_factor: MultiIndex | None = None

    def __post_init__(self) -> None:
        if not self.width > 0:
            raise ValueError("width must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        beta = self.polynomial_factor
        if beta is not None and not isinstance(beta, MultiIndex):
            beta = MultiIndex(tuple(beta))
            object.__setattr__(self, "polynomial_factor", beta)
        if beta is not None and len(beta) != len(self.center):
            raise ValueError("polynomial factor length must match the dimension")

    @classmethod
    def gaussian(cls, m: int, width: float = 1.0) -> "TestFunction":
        return cls(center=(0.0,) * m, width=width)

    @property
    def dimension(self) -> int:
        return len(self.center)

    @property
    def polynomial_order(self) -> int:
        return 0 if self.polynomial_factor is None else self.polynomial_factor.order

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        center = np.asarray(self.center)
        out = np.exp(-np.sum((pts - center) ** 2, axis=1) / (2.0 * self.width**2))
        if self.polynomial_factor is not None:
            for c, b in enumerate(self.polynomial_factor):
                if b:
                    out = out * pts[:, c] ** b
        return out

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        return self.values(pts)

    def derivative_at_zero(self, beta: MultiIndex) -> float:
        """del^beta of this function at the origin, computed analytically.

        Per component, derivatives of x^b exp(-(x - c)^2 / (2 s^2)) follow the
        polynomial recursion p_(k+1) = p_k' - p_k (x - c)/s^2; evaluation at 0
        is then exact up to float rounding.
        """
        if len(beta) != self.dimension:
            raise ValueError("derivative multi-index length mismatch")
        out = 1.0
        for comp in range(self.dimension):
            b = (
                self.polynomial_factor[comp]
                if self.polynomial_factor is not None
                else 0
            )
            out *= _factor_derivative_at_zero(
                b, self.center[comp], self.width, beta[comp]
            )
        return out


def _factor_derivative_at_zero(b: int, c: float, s: float, k: int) -> float:
    # p(x) coefficients, lowest power first, for p_0 = x^b
    coeffs = [0.0] * b + [1.0]
    inv_s2 = 1.0 / (s * s)
    for _ in range(k):
        deriv = [coeffs[i] * i for i in range(1, len(coeffs))]
        shift = [v * c * inv_s2 for v in coeffs]  # +p c / s^2
        minus_x = [0.0] + [-v * inv_s2 for v in coeffs]  # -p x / s^2
        size = max(len(deriv), len(shift), len(minus_x))
        nxt = [0.0] * size
        for i, v in enumerate(deriv):
            nxt[i] += v
        for i, v in enumerate(shift):
            nxt[i] += v
        for i, v in enumerate(minus_x):
            nxt[i] += v
        coeffs = nxt
    return coeffs[0] * math.exp(-c * c / (2.0 * s * s)) if coeffs else 0.0


@dataclass(frozen=True)
class QuadratureSpec:
    """Tensor-product midpoint rule on [-half_width, half_width]^m.

    ``resolution`` nodes per axis, even so that no node coordinate is exactly
    zero (nodes sit at -L + (i + 1/2) h). Grids above ~2e7 nodes are refused;
    this is a desk-scale tool.
    """

    resolution: int
    half_width: float

    def __post_init__(self) -> None:
        if self.resolution < 2 or self.resolution % 2:
            raise ValueError("resolution must be even and >= 2")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    def axis_nodes(self) -> np.ndarray:
        h = 2.0 * self.half_width / self.resolution
        return -self.half_width + (np.arange(self.resolution) + 0.5) * h

    def nodes(self, m: int) -> np.ndarray:
        if m < 1:
            raise ValueError("dimension must be >= 1")
        if self.resolution**m > 2 * 10**7:
            raise ValueError("grid too large; lower the resolution or dimension")
        axes = [self.axis_nodes()] * m
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, m)

    def cell_volume(self, m: int) -> float:
        return (2.0 * self.half_width / self.resolution) ** m


def _raw_pairing(
    kernel: Kernel,
    omega_values: np.ndarray,
    pts: np.ndarray,
    volume: float,
    scale: float = 1.0,
) -> tuple[float, float]:
    """Grid pairing and its absolute mass (for cancellation diagnostics)."""
    kv = kernel_values(kernel, pts * scale if scale != 1.0 else pts)
    products = kv * omega_values
    return (
        float(np.sum(products) * volume),
        float(np.sum(np.abs(products)) * volume),
    )


def _divergence_guard(kernel: Kernel, omega: TestFunction, m: int) -> None:
    if isinstance(kernel, LinearCombination):
        for _, member in kernel.terms:
            _divergence_guard(member, omega, m)
        return
    if not isinstance(kernel, HomogeneousPower):
        return
    effective = float(kernel.exponent) - omega.polynomial_order
    if effective < m:
        return
    clearance = ORIGIN_CLEARANCE_WIDTHS * omega.width
    if math.sqrt(sum(c * c for c in omega.center)) <= clearance:
        raise DivergenceError(
            f"|x|^-{kernel.exponent} against this test function diverges at the "
            f"origin (effective exponent {effective} >= dimension {m}); "
            "extend the kernel first"
        )


def pair(kernel: Kernel, omega: TestFunction, quadrature: QuadratureSpec) -> float:
    """<t, omega> by the midpoint rule. Deterministic for identical inputs.

    Raises DivergenceError when a homogeneous factor makes the integral
    divergent at the origin and the test function does not stay clear of it
    (center within 6 widths). Mollified kernels are smooth and never guarded.
    """
    m = ambient_dim(kernel)
    if m is None:
        m = omega.dimension
    if omega.dimension != m:
        raise ValueError("test function dimension does not match the kernel")
    _divergence_guard(kernel, omega, m)
    pts = quadrature.nodes(m)
    return _raw_pairing(kernel, omega.values(pts), pts, quadrature.cell_volume(m))[0]


def scaling_degree_symbolic(kernel: Kernel) -> ScalingDegreeValue:
    """Scaling degree by variant-specific rules.

    * HomogeneousPower(k): k.
    * MollifiedDelta on the diagonal of I with derivative alpha, treated as
      the exact delta derivative: d (|I| - 1) + |alpha|.
    * PropagatorProduct with total edge multiplicity E: E (d - 2) for d >= 3;
      0 for d = 2 (powers of logs scale below any power); -E for d = 1 where
      G = |x| is homogeneous of degree +1.
    * LinearCombination: the maximum over members; the empty combination (the
      zero kernel) has none and raises NotComputableError.
    """
    if isinstance(kernel, HomogeneousPower):
        return ScalingDegreeValue.finite(kernel.exponent)
    if isinstance(kernel, MollifiedDelta):
        return ScalingDegreeValue.finite(
            kernel.d * (kernel.subset.size - 1) + kernel.alpha.order
        )
    if isinstance(kernel, PropagatorProduct):
        e = kernel.total_multiplicity
        if kernel.d >= 3:
            return ScalingDegreeValue.finite(e * (kernel.d - 2))
        if kernel.d == 2:
            return ScalingDegreeValue.finite(0)
        return ScalingDegreeValue.finite(-e)
    if isinstance(kernel, LinearCombination):
        values = [
            scaling_degree_symbolic(member)
            for coeff, member in kernel.terms
            if coeff
        ]
        if not values:
            raise NotComputableError("the zero kernel has no scaling degree")
        if any(v.infinite for v in values):
            return ScalingDegreeValue(infinite=True)
        return ScalingDegreeValue.finite(max(v.value for v in values))
    raise NotComputableError(f"no rule for {type(kernel).__name__}")


def geometric_grid(lam_min: float, count: int = 12) -> tuple[float, ...]:
    """A geometric grid of ``count`` points from lam_min up to 1 inclusive."""
    if not 0 < lam_min < 1:
        raise ValueError("lam_min must lie in (0, 1)")
    if count < 2:
        raise ValueError("need at least two grid points")
    return tuple(lam_min ** ((count - 1 - i) / (count - 1)) for i in range(count))


def scaling_degree_numeric(
    kernel: Kernel,
    omega: TestFunction,
    lam_grid: Sequence[float],
    quadrature: QuadratureSpec,
) -> float:
    """Estimate the scaling degree as minus the log-log regression slope.

    Pairs t(lambda .) against omega on the fixed grid for each lambda in the
    grid (at least 8 points in (0, 1]) and regresses log |<t(lambda .), omega>|
    on log lambda. Underflowing, vanishing, or non-finite pairings raise
    UnreliableEstimateError carrying the partial data.
    """
    lams = [float(l) for l in lam_grid]
    if len(lams) < 8:
        raise ValueError("the lambda grid needs at least 8 points")
    if any(not 0 < l <= 1 for l in lams):
        raise ValueError("lambda grid points must lie in (0, 1]")
    m = ambient_dim(kernel)
    if m is None:
        m = omega.dimension
    if omega.dimension != m:
        raise ValueError("test function dimension does not match the kernel")
    pts = quadrature.nodes(m)
    ov = omega.values(pts)
    volume = quadrature.cell_volume(m)
    pairs = [_raw_pairing(kernel, ov, pts, volume, scale=lam) for lam in lams]
    values = [v for v, _ in pairs]
    bad = [
        v
        for v, mass in pairs
        if not math.isfinite(v)
        or abs(v) < UNDERFLOW_FLOOR
        or abs(v) < CANCELLATION_FLOOR * mass
    ]
    if bad:
        raise UnreliableEstimateError(
            "pairings underflowed or cancelled to noise; scaling degree "
            "estimate would be meaningless",
            lam_values=tuple(lams),
            pairings=tuple(values),
        )
    slope = np.polyfit(np.log(lams), np.log(np.abs(values)), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class ExtendedKernel:
    """A kernel extended across the origin by weighted Taylor subtraction."""

    base: Kernel
    subtraction_order: int
    weight: TestFunction

    def __post_init__(self) -> None:
        if self.weight.polynomial_order != 0 or any(
            c != 0.0 for c in self.weight.center
        ):
            raise ValueError("the weight must be a plain Gaussian centered at 0")


def extend(kernel: Kernel, weight: TestFunction) -> ExtendedKernel:
    """Extend a kernel whose only singularity sits at the origin.

    The subtraction order is rho = max(floor(sd) - m, -1); rho = -1 leaves the
    pairing untouched (the kernel was already integrable against smooth
    bumps).
    """
    sd = scaling_degree_symbolic(kernel)
    if sd.infinite:
        raise NotComputableError("cannot extend a kernel of infinite scaling degree")
    m = ambient_dim(kernel)
    if m is None:
        raise NotComputableError("the zero kernel needs no extension")
    if weight.dimension != m:
        raise ValueError("weight dimension does not match the kernel")
    rho = max(math.floor(sd.value) - m, -1)
    return ExtendedKernel(base=kernel, subtraction_order=rho, weight=weight)


def extended_pair(
    ext: ExtendedKernel, omega: TestFunction, quadrature: QuadratureSpec
) -> float:
    """<t-bar, omega>: pair the base against the Taylor-subtracted test function."""
    m = ambient_dim(ext.base)
    if omega.dimension != m:
        raise ValueError("test function dimension does not match the kernel")
    pts = quadrature.nodes(m)
    ov = omega.values(pts)
    rho = ext.subtraction_order
    if rho >= 0:
        wv = ext.weight.values(pts)
        taylor = np.zeros(pts.shape[0])
        for beta in enumerate_multi_indices(m, rho):
            coeff = omega.derivative_at_zero(beta) / beta.factorial()
            if coeff == 0.0:
                continue
            mono = np.ones(pts.shape[0])
            for c, b in enumerate(beta):
                if b:
                    mono = mono * pts[:, c] ** b
            taylor += coeff * mono
        ov = ov - wv * taylor
    return _raw_pairing(ext.base, ov, pts, quadrature.cell_volume(m))[0]


@dataclass(frozen=True)
class DiagonalTerm:
    """One counterterm: coefficient times del^alpha of delta on the diagonal of I.

    ``label`` is the power word the counterterm deforms (at least two
    entries); ``alpha`` is an ambient multi-index of length (n - 1) d.
    """

    label: tuple[int, ...]
    subset: SubsetMask
    alpha: MultiIndex
    coefficient: Union[Fraction, float]

    def __post_init__(self) -> None:
        if len(self.label) < 2:
            raise ValueError("labels carry at least two entries")
        if any(i < 0 for i in self.label):
            raise ValueError("label entries are non-negative powers")
        if self.subset.n != len(self.label):
            raise ValueError("subset parent must match the label length")
        if self.subset.size < 2:
            raise ValueError("diagonals collapse at least two points")
        n = len(self.label)
        if len(self.alpha) % (n - 1):
            raise ValueError(
                f"alpha length {len(self.alpha)} is not a multiple of n - 1 = {n - 1}"
            )


@dataclass(frozen=True)
class DiagonalDistribution:
    """A finite formal sum of diagonal terms sharing one label."""

    terms: tuple[DiagonalTerm, ...]

    def __post_init__(self) -> None:
        labels = {t.label for t in self.terms}
        if len(labels) > 1:
            raise ValueError("terms must share one label")
        lengths = {len(t.alpha) for t in self.terms}
        if len(lengths) > 1:
            raise ValueError("terms must share one ambient dimension")
        canon = tuple(
            sorted(
                (t for t in self.terms if t.coefficient),
                key=lambda t: (t.subset.mask, t.alpha.components),
            )
        )
        object.__setattr__(self, "terms", canon)

    @property
    def label(self) -> tuple[int, ...] | None:
        return self.terms[0].label if self.terms else None

    @property
    def level(self) -> int | None:
        return len(self.terms[0].label) - 1 if self.terms else None

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class AmbiguityFit:
    """Result of fitting the difference of two extensions to diagonal terms."""

    distribution: DiagonalDistribution
    residual: float
    coefficients: dict[MultiIndex, float] = field(compare=False, default_factory=dict)


def extension_ambiguity(
    e1: ExtendedKernel,
    e2: ExtendedKernel,
    probe_orders: int,
    quadrature: QuadratureSpec,
    label: tuple[int, ...] = (0, 0),
    rtol: float = 1e-8,
) -> AmbiguityFit:
    """Fit e2 - e1 to a combination of delta derivatives at the origin.

    Convention: the returned distribution is the correction d carrying the
    first extension to the second, e2 = e1 + d, under the plain pairing
    <del^beta delta, omega> = del^beta omega(0). For subtraction order 0 this
    gives c_0 = integral of (w_1 - w_2)(x) t(x) dx, w_i being the weights.

    Probes are Gaussians of widths 0.5 and 1.0 times monomials x^beta with
    |beta| <= probe_orders; the fit is least squares over the probe family and
    the relative residual must stay below ``rtol`` (else the difference was
    not supported on the diagonal and DiagonalSupportError is raised).
    """
    if e1.base != e2.base:
        raise ValueError("ambiguity is defined for extensions of one base kernel")
    m = ambient_dim(e1.base)
    rho = e1.subtraction_order
    if probe_orders < max(rho, 0):
        raise ValueError("probe_orders must reach the subtraction order")
    betas = enumerate_multi_indices(m, max(rho, 0))
    probes = [
        TestFunction(center=(0.0,) * m, width=w, polynomial_factor=beta)
        for w in (0.5, 1.0)
        for beta in enumerate_multi_indices(m, probe_orders)
    ]
    y = np.array(
        [
            extended_pair(e2, p, quadrature) - extended_pair(e1, p, quadrature)
            for p in probes
        ]
    )
    a = np.array([[p.derivative_at_zero(beta) for beta in betas] for p in probes])
    norm_y = float(np.linalg.norm(y))
    if norm_y == 0.0:
        coeffs = np.zeros(len(betas))
        residual = 0.0
    else:
        coeffs, *_ = np.linalg.lstsq(a, y, rcond=None)
        residual = float(np.linalg.norm(a @ coeffs - y) / norm_y)
    if residual > rtol:
        raise DiagonalSupportError(
            f"extension difference is not diagonal: relative residual {residual:.3e}"
        )
    n = len(label)
    subset = SubsetMask.full(n)
    terms = tuple(
        DiagonalTerm(label=label, subset=subset, alpha=beta, coefficient=float(c))
        for beta, c in zip(betas, coeffs)
        if c != 0.0
    )
    return AmbiguityFit(
        distribution=DiagonalDistribution(terms),
        residual=residual,
        coefficients={beta: float(c) for beta, c in zip(betas, coeffs)},
    )
