# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Distinguishability metrics for pairs of states.

Fidelity uses the squared convention, F(ρ, σ) = ‖√ρ √σ‖²_tr, so two pure
states have F = |⟨ψ|φ⟩|².
"""

import dataclasses
import math
from typing import Iterable, Tuple

import numpy as np
import scipy.linalg

from . import consts
from . import enums
from . import linalg

TOL = consts.DEFAULT_TOLERANCES

PURIFIER = "purifier"


def _same_layout(s0, s1):
    if s0.layout.labels != s1.layout.labels or s0.layout.dims != s1.layout.dims:
        raise linalg.LinalgError(
            f"states live on different layouts: {s0.layout.labels} vs {s1.layout.labels}"
        )


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def fidelity(s0: linalg.DensityOperator, s1: linalg.DensityOperator) -> float:
    _same_layout(s0, s1)
    root = linalg.hermitian_sqrt(s0) @ linalg.hermitian_sqrt(s1)
    return _clamp01(linalg.trace_norm(root) ** 2)


def reduced_fidelity(
    psi0: linalg.PureState, psi1: linalg.PureState, keep: Iterable[str]
) -> float:
    """F(Tr_rest ψ0, Tr_rest ψ1) without forming either reduced state."""
    _same_layout(psi0, psi1)
    keep = set(psi0.layout.select(keep).labels)
    traced = [label for label in psi0.layout.labels if label not in keep]
    _, overlap2 = uhlmann_align(psi0, psi1, traced)
    return overlap2


@dataclasses.dataclass(frozen=True, eq=False)
class HelstromResult:
    probability: float
    # Guess 0 on p0, guess 1 on p1.
    p0: linalg.LinearOp
    p1: linalg.LinearOp


def helstrom(s0: linalg.DensityOperator, s1: linalg.DensityOperator) -> HelstromResult:
    """Optimal equal-prior discrimination between s0 and s1."""
    _same_layout(s0, s1)
    diff = s0.matrix - s1.matrix
    vals, vecs = np.linalg.eigh((diff + diff.conj().T) / 2)
    pos = vecs[:, vals > 0]
    p0 = pos @ pos.conj().T
    p1 = np.eye(diff.shape[0]) - p0
    targets = s0.layout.labels
    return HelstromResult(
        probability=0.5 + linalg.trace_norm(diff) / 4,
        p0=linalg.LinearOp(p0, targets),
        p1=linalg.LinearOp(p1, targets),
    )


def uhlmann_align(
    psi0: linalg.PureState, psi1: linalg.PureState, local: Iterable[str]
) -> Tuple[linalg.LinearOp, float]:
    """Unitary U on `local` maximizing |⟨ψ0|(U ⊗ I)|ψ1⟩|.

    U is taken from the polar decomposition of the cross-Gram matrix, so
    ⟨ψ0|U|ψ1⟩ comes out real and nonnegative.
    """
    _same_layout(psi0, psi1)
    sub = psi0.layout.select(local)
    layout = psi0.layout
    local_axes = [layout.index(label) for label in sub.labels]
    rest_axes = [i for i in range(len(layout.dims)) if i not in local_axes]

    def split(psi):
        t = np.transpose(psi.tensor, local_axes + rest_axes)
        return t.reshape(sub.total_dim, -1)

    x0 = split(psi0)
    x1 = split(psi1)
    cross = x1 @ x0.conj().T
    w, p = scipy.linalg.polar(cross)
    overlap = float(np.trace(p).real)
    return linalg.LinearOp(w.conj().T, sub.labels), overlap * overlap


def purification(rho: linalg.DensityOperator, label: str = PURIFIER) -> linalg.PureState:
    if label in rho.layout.labels:
        raise linalg.LinalgError(f"purifier label {label!r} already in use")
    dim = rho.layout.total_dim
    vals, vecs = np.linalg.eigh(rho.matrix)
    if vals.size and vals[0] < -TOL.structural:
        raise linalg.LinalgError("cannot purify a non-PSD operator")
    amps = vecs * np.sqrt(np.clip(vals, 0, None))
    layout = rho.layout.concat(
        linalg.RegisterLayout.of(
            (label, dim, enums.Party.CHANNEL), max_amplitudes=rho.layout.max_amplitudes
        )
    )
    return linalg.PureState.from_vector(layout, amps)


def fidelity_sum_max(
    s0: linalg.DensityOperator, s1: linalg.DensityOperator
) -> Tuple[float, linalg.DensityOperator]:
    """max over σ of F(s0, σ) + F(s1, σ), together with a maximizing σ.

    Both states are purified, the purification of s1 is Uhlmann-aligned to the
    one of s0 on the purifying register, and the top eigenvector of
    |φ0⟩⟨φ0| + |φ1⟩⟨φ1| is traced back down. The nonzero spectrum of that
    operator is read off the 2x2 Gram matrix of the two vectors.
    """
    _same_layout(s0, s1)
    if s0.layout.total_dim == 1:
        return 2.0, s0
    phi0 = purification(s0)
    phi1 = purification(s1)
    u, _ = uhlmann_align(phi0, phi1, [PURIFIER])
    phi1 = linalg.apply(u, phi1)
    vecs = np.stack([phi0.amplitudes, phi1.amplitudes], axis=1)
    gram = vecs.conj().T @ vecs
    vals, gvecs = np.linalg.eigh(gram)
    top = vecs @ gvecs[:, -1]
    xi = linalg.PureState.from_vector(phi0.layout, top).normalize()
    witness = xi.reduced(s0.layout.labels)
    return float(vals[-1]), witness


def fvg_bounds(s0: linalg.DensityOperator, s1: linalg.DensityOperator) -> Tuple[float, float]:
    f = fidelity(s0, s1)
    return 2 * (1 - math.sqrt(f)), 2 * math.sqrt(1 - f)


@dataclasses.dataclass(frozen=True)
class MetricReport:
    fidelity: float
    trace_norm_diff: float
    helstrom: float
    fvg_lower: float
    fvg_upper: float

    @property
    def consistent(self) -> bool:
        tol = TOL.derived
        return (
            self.fvg_lower - tol <= self.trace_norm_diff <= self.fvg_upper + tol
            and abs(self.helstrom - (0.5 + self.trace_norm_diff / 4)) <= TOL.clamp
        )


def metric_report(s0: linalg.DensityOperator, s1: linalg.DensityOperator) -> MetricReport:
    tn = linalg.trace_norm(s0.matrix - s1.matrix)
    lower, upper = fvg_bounds(s0, s1)
    return MetricReport(
        fidelity=fidelity(s0, s1),
        trace_norm_diff=tn,
        helstrom=0.5 + tn / 4,
        fvg_lower=lower,
        fvg_upper=upper,
    )


def random_pure_state(dim: int, rng: np.random.Generator, label: str = "q") -> linalg.PureState:
    layout = linalg.RegisterLayout.of((label, dim, enums.Party.CHANNEL))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return linalg.PureState(layout, v / np.linalg.norm(v))


def random_density(dim: int, rng: np.random.Generator, label: str = "q") -> linalg.DensityOperator:
    # Trace an equal-sized ancilla out of a Haar-random pure state.
    layout = linalg.RegisterLayout.of((label, dim, enums.Party.CHANNEL))
    v = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    v /= np.linalg.norm(v)
    return linalg.DensityOperator(layout, v @ v.conj().T)
