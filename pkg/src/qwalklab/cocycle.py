"""Markov-regular convolution cocycles evaluated between exponential vectors.

For a generator phi on the hat space of the noise dimension d, the
cocycle's matrix element between exponential vectors of step functions
f, g is an ordered convolution product over the common refinement of
their partitions:

    <eps(f), l_t(b) eps(g)> =
        (exp_*(D_1 phi_{c_1,d_1}) * ... * exp_*(D_m phi_{c_m,d_m}))(b)
        x exp(integral_t <f, g>),

where on each refinement interval of length D_k the functions hold the
constant values c_k, d_k and

    phi_{c,d}(b) = <hat(c), phi(b) hat(d)> + <c, d> eps(b)

is the associated-semigroup generator.  The per-(c, d) semigroup
matrices are cached, keyed by the values, inside a CocycleEvaluator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convolution import ConvolutionSemigroup, convolve_functionals
from .fock import GridSpec, StepFunction, _as_coeffs, walk_matrix_element
from .linalg import as_complex_array
from .structure_maps import (
    ImplementingTriple,
    OperatorMap,
    cp_generator_from_triple,
    structure_map_from_pair,
)
from .walk import build_walk

__all__ = [
    "GeneratorMismatch",
    "assoc_generator",
    "CocycleEvaluator",
    "cocycle_matrix_element",
    "CrossValidationRow",
    "cross_validate_against_walk",
]


class GeneratorMismatch(ValueError):
    """The supplied generator does not come from the supplied triple."""


def assoc_generator(phi: OperatorMap, c, d) -> np.ndarray:
    """phi_{c,d} = <hat(c), phi(.) hat(d)> + <c, d> eps(.), as a coefficient row."""
    hat = phi.hat
    c = np.atleast_1d(as_complex_array(c))
    d = np.atleast_1d(as_complex_array(d))
    chat, dhat = hat.hat(c), hat.hat(d)
    vals = np.einsum("a,iab,b->i", np.conjugate(chat), phi.mats, dhat)
    return vals + np.vdot(c, d) * phi.source.counit


class CocycleEvaluator:
    """Evaluates one cocycle's matrix elements, caching per-(c, d) semigroups."""

    def __init__(self, phi: OperatorMap):
        self.phi = phi
        self.source = phi.source
        self.hat = phi.hat
        self._semigroups: dict[bytes, ConvolutionSemigroup] = {}

    def _semigroup(self, c: np.ndarray, d: np.ndarray) -> ConvolutionSemigroup:
        key = np.ascontiguousarray(c).tobytes() + b"|" + np.ascontiguousarray(d).tobytes()
        sg = self._semigroups.get(key)
        if sg is None:
            sg = ConvolutionSemigroup(self.source, assoc_generator(self.phi, c, d))
            self._semigroups[key] = sg
        return sg

    def matrix_element(self, b_coeffs, f: StepFunction, g: StepFunction, t: float) -> complex:
        """<eps(f), l_t(b) eps(g)>; b may be a basis index or coefficients."""
        if t < 0:
            raise ValueError("time must be nonnegative")
        d = self.hat.noise_dim
        if f.noise_dim != d or g.noise_dim != d:
            raise ValueError(
                f"step functions have noise dimension {f.noise_dim}/{g.noise_dim}, "
                f"generator expects {d}"
            )
        b_coeffs = _as_coeffs(self.source, b_coeffs)
        cuts = sorted(
            {0.0, t}
            | {float(s) for s in f.breakpoints if 0.0 < s < t}
            | {float(s) for s in g.breakpoints if 0.0 < s < t}
        )
        out = self.source.counit
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (lo + hi)
            lam = self._semigroup(f.value_at(mid), g.value_at(mid)).at(hi - lo)
            out = convolve_functionals(self.source, out, lam)
        tail = np.exp(f.overlap(g, a=t))
        return complex(np.dot(out, b_coeffs) * tail)


def cocycle_matrix_element(phi: OperatorMap, b_coeffs, f: StepFunction, g: StepFunction, t: float) -> complex:
    """One-shot form of CocycleEvaluator(...).matrix_element."""
    return CocycleEvaluator(phi).matrix_element(b_coeffs, f, g, t)


@dataclass(frozen=True)
class CrossValidationRow:
    h: float
    n_steps: int
    walk_value: complex
    cocycle_value: complex

    @property
    def error(self) -> float:
        return abs(self.walk_value - self.cocycle_value)


def cross_validate_against_walk(
    phi: OperatorMap,
    triple: ImplementingTriple,
    b_coeffs,
    f: StepFunction,
    g: StepFunction,
    t: float,
    h_list,
    chi=None,
    generator_tol: float = 1e-10,
) -> list[CrossValidationRow]:
    """Walk matrix elements against the cocycle limit over a list of step lengths.

    Refuses to run if phi does not match the generator rebuilt from the
    triple (so walks and limit provably belong to the same object).
    """
    chi = phi.source.counit if chi is None else as_complex_array(chi)
    rebuilt = (
        structure_map_from_pair(triple, chi)
        if triple.D is None
        else cp_generator_from_triple(triple, chi)
    )
    mismatch = rebuilt.distance(phi)
    if mismatch > generator_tol:
        raise GeneratorMismatch(
            f"generator rebuilt from the triple differs from phi by {mismatch:.3e} "
            f"(tolerance {generator_tol:g})"
        )
    evaluator = CocycleEvaluator(phi)
    limit = evaluator.matrix_element(b_coeffs, f, g, t)
    rows = []
    for h in sorted({float(h) for h in h_list}, reverse=True):
        psi = build_walk(triple, chi, h)
        walk_value = walk_matrix_element(psi, b_coeffs, f, g, t, h)
        rows.append(
            CrossValidationRow(
                h=h,
                n_steps=GridSpec.from_time(t, h).n,
                walk_value=walk_value,
                cocycle_value=limit,
            )
        )
    return rows
