"""Toy Fock embedding: discrete hat spaces against exponential vectors.

Step functions are piecewise-constant noise arguments f: [0, T) -> C^d,
zero after T.  Exponential vectors are never materialized; all inner
products reduce to the closed forms

    <eps(f), eps(g)> = exp( integral <f(s), g(s)> ds ),
    D_j* eps(g) restricted to cell j of an h-grid  ->  (1, h^{1/2} g_j),

with g constant on each cell.  An n-step walk matrix element between
exponential vectors therefore factorizes into a left-to-right
convolution of n scalar functionals (one per grid cell), which is how
walk_matrix_element avoids materializing the (d+1)^n-dimensional
iterate; the materialized route (toy_matrix_element composed with
convolution_iterates) agrees and is used as a cross-check at small n.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import convolve_functionals
from .linalg import as_complex_array, readonly
from .serialize import FormatError
from .structure_maps import OperatorMap

__all__ = [
    "PartitionMismatch",
    "StepFunction",
    "GridSpec",
    "embed_vector",
    "toy_matrix_element",
    "walk_matrix_element",
    "step_hat_vectors",
    "step_function_to_payload",
    "step_function_from_payload",
]

#: relative tolerance for grid/partition alignment
ALIGN_RTOL = 1e-9


class PartitionMismatch(ValueError):
    """A step function is not constant on the cells of the requested grid."""


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on [0, total_time), zero afterwards.

    values[k] is the constant C^d value held for durations[k].
    """

    durations: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        durations = np.asarray(self.durations, dtype=float)
        values = np.atleast_2d(as_complex_array(self.values))
        if durations.ndim != 1 or values.shape[0] != durations.shape[0]:
            raise ValueError("durations and values must align, one value row per segment")
        if durations.size == 0 or np.any(durations <= 0):
            raise ValueError("segment durations must be positive and nonempty")
        durations = durations.copy()
        durations.setflags(write=False)
        object.__setattr__(self, "durations", durations)
        object.__setattr__(self, "values", readonly(values))

    @classmethod
    def constant(cls, value, duration: float) -> "StepFunction":
        return cls(durations=np.array([duration]), values=np.atleast_2d(as_complex_array(value)))

    @classmethod
    def from_segments(cls, segments) -> "StepFunction":
        """segments: iterable of (duration, value) pairs."""
        durations, values = zip(*segments)
        return cls(durations=np.array(durations, dtype=float), values=np.array([np.atleast_1d(v) for v in values]))

    @property
    def noise_dim(self) -> int:
        return self.values.shape[1]

    @property
    def total_time(self) -> float:
        return float(np.sum(self.durations))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    def value_at(self, s: float) -> np.ndarray:
        """f(s); zero vector outside [0, total_time)."""
        if s < 0 or s >= self.total_time - ALIGN_RTOL * max(1.0, self.total_time):
            return np.zeros(self.noise_dim, dtype=complex)
        k = int(np.searchsorted(self.breakpoints, s, side="right") - 1)
        k = min(max(k, 0), len(self.durations) - 1)
        return self.values[k].copy()

    def restrict(self, a: float, b: float) -> "StepFunction":
        """The function s -> f(a + s) on [0, b - a), for [a, b) inside the support grid."""
        if b <= a:
            raise ValueError("empty restriction window")
        cuts = sorted({0.0, b - a} | {float(t - a) for t in self.breakpoints if a < t < b})
        segments = []
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            segments.append((hi - lo, self.value_at(a + 0.5 * (lo + hi))))
        return StepFunction.from_segments(segments)

    def overlap(self, other: "StepFunction", a: float = 0.0, b: float | None = None) -> complex:
        """integral_a^b <self(s), other(s)> ds (first argument conjugated)."""
        if self.noise_dim != other.noise_dim:
            raise ValueError("step functions have different noise dimensions")
        upper = max(self.total_time, other.total_time)
        b = upper if b is None else min(b, upper)
        if b <= a:
            return 0.0 + 0.0j
        cuts = sorted(
            {a, b}
            | {float(t) for t in self.breakpoints if a < t < b}
            | {float(t) for t in other.breakpoints if a < t < b}
        )
        total = 0.0 + 0.0j
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            total += (hi - lo) * np.vdot(self.value_at(mid), other.value_at(mid))
        return complex(total)

    def exponential_inner(self, other: "StepFunction") -> complex:
        """<eps(self), eps(other)> = exp(full overlap integral)."""
        return complex(np.exp(self.overlap(other)))


@dataclass(frozen=True)
class GridSpec:
    """A uniform grid of n cells of width h covering [0, n h)."""

    h: float
    n: int

    def __post_init__(self):
        if self.h <= 0 or self.n < 0:
            raise ValueError("grid requires h > 0 and n >= 0")

    @property
    def horizon(self) -> float:
        return self.h * self.n

    @classmethod
    def from_time(cls, t: float, h: float) -> "GridSpec":
        """Floor convention: n = floor(t / h), tolerant of float division dust."""
        if h <= 0:
            raise ValueError("step length h must be positive")
        return cls(h=h, n=int(np.floor(t / h + ALIGN_RTOL)))

    def cell_start(self, j: int) -> float:
        return (j - 1) * self.h


def _on_grid(t: float, h: float) -> bool:
    ratio = t / h
    return abs(ratio - round(ratio)) <= ALIGN_RTOL * max(1.0, abs(ratio))


def _validate_alignment(f: StepFunction, grid: GridSpec):
    for t in f.breakpoints:
        if t < grid.horizon * (1 - ALIGN_RTOL) and not _on_grid(float(t), grid.h):
            raise PartitionMismatch(
                f"step-function breakpoint {t:g} is not a multiple of h = {grid.h:g}; "
                "the grid must refine the step partition"
            )


def step_hat_vectors(f: StepFunction, grid: GridSpec) -> np.ndarray:
    """Rows (1, h^{1/2} f_j) for cells j = 1..n: the embedded exponential factors."""
    _validate_alignment(f, grid)
    out = np.empty((grid.n, f.noise_dim + 1), dtype=complex)
    root_h = np.sqrt(grid.h)
    for j in range(1, grid.n + 1):
        mid = grid.cell_start(j) + 0.5 * grid.h
        out[j - 1, 0] = 1.0
        out[j - 1, 1:] = root_h * f.value_at(mid)
    return out


def embed_vector(v, grid: GridSpec, j: int, f: StepFunction) -> complex:
    """<D_j (z, c), eps(f) restricted to cell j> for the j-th cell embedding.

    D_j sends (z, c) to the Fock vector with vacuum component z and
    one-particle component h^{-1/2} c on [(j-1)h, jh); pairing against
    the exponential vector of f gives conj(z) + h^{-1/2} <c, integral of
    f over the cell>.
    """
    v = as_complex_array(v)
    if not 1 <= j <= max(grid.n, 1):
        raise ValueError(f"cell index {j} outside 1..{grid.n}")
    z, c = v[0], v[1:]
    lo = grid.cell_start(j)
    box = StepFunction.constant(c, grid.h)
    integral = box.overlap(f.restrict(lo, lo + grid.h)) if f.total_time > lo else 0.0
    return complex(np.conjugate(z) + integral / np.sqrt(grid.h))


def _tail_factor(f: StepFunction, g: StepFunction, start: float) -> complex:
    return complex(np.exp(f.overlap(g, a=start)))


def toy_matrix_element(a_matrix, f: StepFunction, g: StepFunction, grid: GridSpec) -> complex:
    """<eps(f), (D A D* (x) I) eps(g)> for A on the n-fold hat-space power.

    D embeds the n hat-space factors onto the first n cells of the grid;
    beyond the horizon the ambient exponential vectors contribute the
    scalar tail exp(integral_{nh} <f, g>).
    """
    a_matrix = as_complex_array(a_matrix)
    dim = (f.noise_dim + 1) ** grid.n
    if a_matrix.shape != (dim, dim):
        raise ValueError(f"operator has shape {a_matrix.shape}, expected ({dim}, {dim})")
    u = step_hat_vectors(f, grid)
    v = step_hat_vectors(g, grid)
    left = np.array([1.0 + 0.0j])
    right = np.array([1.0 + 0.0j])
    for j in range(grid.n):
        left = np.kron(left, u[j])
        right = np.kron(right, v[j])
    return complex(np.vdot(left, a_matrix @ right) * _tail_factor(f, g, grid.horizon))


def walk_matrix_element(
    psi: OperatorMap, b_coeffs, f: StepFunction, g: StepFunction, t: float, h: float
) -> complex:
    """<eps(f), (D psi^{*n}(b) D* (x) I) eps(g)> with n = floor(t / h).

    Computed in factorized form: the j-th cell contributes the functional
    lambda_j(b_i) = <(1, h^{1/2} f_j), psi(b_i) (1, h^{1/2} g_j)> and the
    matrix element is (lambda_1 * ... * lambda_n)(b) times the tail
    factor, a chain of n coefficient-space convolutions.
    """
    src = psi.source
    b_coeffs = _as_coeffs(src, b_coeffs)
    grid = GridSpec.from_time(t, h)
    if psi.dim != f.noise_dim + 1 or f.noise_dim != g.noise_dim:
        raise ValueError(
            f"walk step acts on hat dimension {psi.dim} but step functions have "
            f"noise dimension {f.noise_dim}/{g.noise_dim}"
        )
    u = step_hat_vectors(f, grid)
    v = step_hat_vectors(g, grid)
    # lambda_j[i] = <u_j, psi(b_i) v_j>
    lams = np.einsum("ja,iab,jb->ji", np.conjugate(u), psi.mats, v)
    out = src.counit if grid.n == 0 else lams[0]
    for j in range(1, grid.n):
        out = convolve_functionals(src, out, lams[j])
    return complex(np.dot(out, b_coeffs) * _tail_factor(f, g, grid.horizon))


def _as_coeffs(src, b_coeffs) -> np.ndarray:
    if isinstance(b_coeffs, (int, np.integer)):
        return src.basis_coeffs(int(b_coeffs))
    arr = as_complex_array(b_coeffs)
    if arr.shape != (src.dim,):
        raise ValueError(f"element coefficients have shape {arr.shape}, expected ({src.dim},)")
    return arr


def step_function_to_payload(f: StepFunction) -> list:
    """Rows [duration, [re, im], ...] with one complex pair per noise component."""
    rows = []
    for dur, val in zip(f.durations, f.values):
        rows.append([float(dur)] + [[float(np.real(z)), float(np.imag(z))] for z in val])
    return rows


def step_function_from_payload(rows) -> StepFunction:
    if not isinstance(rows, (list, tuple)) or not rows:
        raise FormatError("step function payload must be a nonempty list of rows")
    durations = []
    values = []
    width = None
    for row in rows:
        if not isinstance(row, (list, tuple)) or len(row) < 2:
            raise FormatError(f"step-function row {row!r} must be [duration, [re, im], ...]")
        durations.append(float(row[0]))
        comps = []
        for pair in row[1:]:
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise FormatError(f"step-function component {pair!r} must be [re, im]")
            comps.append(complex(pair[0], pair[1]))
        if width is None:
            width = len(comps)
        elif width != len(comps):
            raise FormatError("step-function rows have inconsistent noise dimensions")
        values.append(comps)
    return StepFunction(durations=np.array(durations), values=np.array(values, dtype=complex))
