# SPDX-FileCopyrightText: 2026 The bcflip authors
#
# SPDX-License-Identifier: MIT

"""Dense complex linear algebra over small labeled tensor-product spaces.

A register layout is an ordered list of labeled subsystems (qubits, qutrits).
Amplitude vectors and density matrices are stored flat, in the big-endian
order given by the layout, so that ``numpy.kron`` of two states lines up with
the concatenation of their layouts.
"""

import dataclasses
import math
from typing import Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import consts
from . import enums

TOL = consts.DEFAULT_TOLERANCES


class LinalgError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class Subsystem:
    label: str
    dim: int
    owner: enums.Party


@dataclasses.dataclass(frozen=True)
class RegisterLayout:
    subsystems: Tuple[Subsystem, ...] = ()
    max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES

    def __post_init__(self):
        seen = set()
        for sub in self.subsystems:
            if sub.label in seen:
                raise LinalgError(f"duplicate register label {sub.label!r}")
            if sub.dim < 2:
                raise LinalgError(f"register {sub.label!r} has dimension {sub.dim}")
            seen.add(sub.label)
        if self.total_dim > self.max_amplitudes:
            raise LinalgError(
                f"layout needs {self.total_dim} amplitudes, cap is {self.max_amplitudes}"
            )

    @classmethod
    def of(
        cls,
        *registers: Tuple[str, int, enums.Party],
        max_amplitudes: int = consts.DEFAULT_MAX_AMPLITUDES,
    ) -> "RegisterLayout":
        return cls(
            subsystems=tuple(Subsystem(*r) for r in registers),
            max_amplitudes=max_amplitudes,
        )

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(s.label for s in self.subsystems)

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def index(self, label: str) -> int:
        for i, sub in enumerate(self.subsystems):
            if sub.label == label:
                return i
        raise LinalgError(f"unknown register {label!r}")

    def dim_of(self, label: str) -> int:
        return self.subsystems[self.index(label)].dim

    def owned_by(self, owner: enums.Party) -> Tuple[str, ...]:
        return tuple(s.label for s in self.subsystems if s.owner == owner)

    def select(self, labels: Iterable[str]) -> "RegisterLayout":
        wanted = set(labels)
        for label in wanted:
            self.index(label)
        return dataclasses.replace(
            self, subsystems=tuple(s for s in self.subsystems if s.label in wanted)
        )

    def concat(self, other: "RegisterLayout") -> "RegisterLayout":
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise LinalgError(f"register labels collide: {sorted(clash)}")
        return dataclasses.replace(
            self, subsystems=self.subsystems + other.subsystems
        )


def _as_complex(values) -> np.ndarray:
    return np.asarray(values, dtype=np.complex128)


@dataclasses.dataclass(frozen=True, eq=False)
class PureState:
    """A (possibly unnormalized) state vector over a register layout.

    Unnormalized states are residuals left behind by projections; their
    squared norm is the probability weight of the branch that produced them.
    """

    layout: RegisterLayout
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = _as_complex(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape[0] != self.layout.total_dim:
            raise LinalgError(
                f"{amps.shape[0]} amplitudes for a layout of dimension {self.layout.total_dim}"
            )
        if self.normalized and abs(self.norm2 - 1) > TOL.structural:
            raise LinalgError(f"state claims to be normalized but has weight {self.norm2}")

    @classmethod
    def from_vector(
        cls, layout: RegisterLayout, vector, normalized: Optional[bool] = None
    ) -> "PureState":
        amps = _as_complex(vector).reshape(-1)
        if normalized is None:
            normalized = abs(np.vdot(amps, amps).real - 1) <= TOL.structural
        return cls(layout=layout, amplitudes=amps, normalized=normalized)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: "PureState") -> complex:
        if self.layout.labels != other.layout.labels:
            raise LinalgError("inner product of states on different layouts")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def normalize(self) -> "PureState":
        norm2 = self.norm2
        if norm2 <= 0:
            raise LinalgError("cannot normalize the zero vector")
        return PureState(self.layout, self.amplitudes / math.sqrt(norm2), True)

    def to_density(self) -> "DensityOperator":
        return DensityOperator(
            layout=self.layout,
            matrix=np.outer(self.amplitudes, self.amplitudes.conj()),
            weight=self.norm2,
            validate=False,
        )

    def reduced(self, keep: Iterable[str]) -> "DensityOperator":
        """Partial trace straight from the amplitudes, skipping the full |ψ⟩⟨ψ|."""
        sub = self.layout.select(keep)
        keep_axes = [self.layout.index(label) for label in sub.labels]
        rest_axes = [i for i in range(len(self.layout.dims)) if i not in keep_axes]
        x = np.transpose(self.tensor, keep_axes + rest_axes).reshape(sub.total_dim, -1)
        return DensityOperator(
            layout=sub, matrix=x @ x.conj().T, weight=self.norm2, validate=False
        )


@dataclasses.dataclass(frozen=True, eq=False)
class DensityOperator:
    layout: RegisterLayout
    matrix: np.ndarray
    weight: float = 1.0
    validate: bool = dataclasses.field(default=True, repr=False)

    def __post_init__(self):
        mat = _as_complex(self.matrix)
        dim = self.layout.total_dim
        if mat.shape != (dim, dim):
            raise LinalgError(f"matrix of shape {mat.shape} for dimension {dim}")
        object.__setattr__(self, "matrix", mat)
        if not self.validate:
            return
        if np.max(np.abs(mat - mat.conj().T), initial=0) > TOL.structural:
            raise LinalgError("density operator is not Hermitian")
        if abs(np.trace(mat).real - self.weight) > TOL.structural:
            raise LinalgError(
                f"density operator has trace {np.trace(mat).real}, expected {self.weight}"
            )
        if np.linalg.eigvalsh(mat)[0] < -TOL.structural:
            raise LinalgError("density operator has a negative eigenvalue")

    @classmethod
    def maximally_mixed(cls, layout: RegisterLayout) -> "DensityOperator":
        dim = layout.total_dim
        return cls(layout=layout, matrix=np.eye(dim) / dim)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclasses.dataclass(frozen=True, eq=False)
class LinearOp:
    matrix: np.ndarray
    targets: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrix", _as_complex(self.matrix))
        object.__setattr__(self, "targets", tuple(self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise LinalgError(f"repeated target in {self.targets}")
        rows, cols = self.matrix.shape
        if rows != cols:
            raise LinalgError("operators must be square")

    def dagger(self) -> "LinearOp":
        return LinearOp(self.matrix.conj().T, self.targets)

    def is_unitary(self, tol: float = TOL.structural) -> bool:
        eye = np.eye(self.matrix.shape[0])
        return bool(np.max(np.abs(self.matrix.conj().T @ self.matrix - eye)) <= tol)

    def is_projector(self, tol: float = TOL.structural) -> bool:
        m = self.matrix
        return bool(
            np.max(np.abs(m - m.conj().T), initial=0) <= tol
            and np.max(np.abs(m @ m - m), initial=0) <= tol
        )

    def complement(self) -> "LinearOp":
        return LinearOp(np.eye(self.matrix.shape[0]) - self.matrix, self.targets)


State = Union[PureState, DensityOperator]


def tensor(a: State, b: State) -> State:
    layout = a.layout.concat(b.layout)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState.from_vector(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(
            layout=layout,
            matrix=np.kron(a.matrix, b.matrix),
            weight=a.weight * b.weight,
            validate=False,
        )
    raise LinalgError("tensor product needs two states of the same kind")


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    sub = rho.layout.select(keep)
    n = len(rho.layout.dims)
    keep_axes = [rho.layout.index(label) for label in sub.labels]
    rest_axes = [i for i in range(n) if i not in keep_axes]
    dk = sub.total_dim
    dr = rho.layout.total_dim // dk
    t = rho.matrix.reshape(rho.layout.dims + rho.layout.dims)
    t = np.transpose(
        t, keep_axes + rest_axes + [n + i for i in keep_axes] + [n + i for i in rest_axes]
    ).reshape(dk, dr, dk, dr)
    return DensityOperator(
        layout=sub,
        matrix=np.einsum("ijkj->ik", t),
        weight=rho.weight,
        validate=False,
    )


def _matrix_of(m) -> np.ndarray:
    if isinstance(m, DensityOperator):
        return m.matrix
    return _as_complex(m)


def hermitian_sqrt(rho) -> np.ndarray:
    """PSD square root by eigen-decomposition.

    Eigenvalues down to -1e-10 are treated as rounding noise and clamped to
    zero; anything more negative is rejected.
    """
    mat = _matrix_of(rho)
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    if vals.size and vals[0] < -TOL.structural:
        raise LinalgError(f"matrix is not positive semidefinite (eigenvalue {vals[0]})")
    roots = np.sqrt(np.clip(vals, 0, None))
    return (vecs * roots) @ vecs.conj().T


def trace_norm(m) -> float:
    return float(np.linalg.svd(_matrix_of(m), compute_uv=False).sum())


def _check_targets(op: LinearOp, layout: RegisterLayout) -> Tuple[int, ...]:
    axes = tuple(layout.index(label) for label in op.targets)
    need = math.prod(layout.dims[a] for a in axes)
    if op.matrix.shape[0] != need:
        raise LinalgError(
            f"operator of dimension {op.matrix.shape[0]} on targets {op.targets} of dimension {need}"
        )
    return axes


def _apply_tensor(op: LinearOp, s: PureState) -> np.ndarray:
    axes = _check_targets(op, s.layout)
    k = len(axes)
    tdims = tuple(s.layout.dims[a] for a in axes)
    op_t = op.matrix.reshape(tdims + tdims)
    out = np.tensordot(op_t, s.tensor, axes=(tuple(range(k, 2 * k)), axes))
    return np.moveaxis(out, tuple(range(k)), axes)


def apply(op: LinearOp, s: PureState) -> PureState:
    return PureState.from_vector(s.layout, _apply_tensor(op, s))


def apply_controlled(
    op: LinearOp, s: PureState, controls: Sequence[str], mask
) -> PureState:
    """Apply `op` on the branch where the control registers match `mask`.

    `mask` is a boolean array indexed by the basis values of `controls` (in
    the order given). The result equals the block-diagonal controlled
    operator acting on `s`.
    """
    controls = tuple(controls)
    if set(controls) & set(op.targets):
        raise LinalgError("control and target registers overlap")
    mask = np.asarray(mask, dtype=bool)
    axes = [s.layout.index(label) for label in controls]
    dims = tuple(s.layout.dims[a] for a in axes)
    if mask.shape != dims:
        raise LinalgError(f"mask of shape {mask.shape} for controls of dimensions {dims}")
    order = np.argsort(axes)
    if controls:
        mask = np.transpose(mask, order)
    shape = [1] * len(s.layout.dims)
    for a in axes:
        shape[a] = s.layout.dims[a]
    full = mask.reshape(shape)
    out = np.where(full, _apply_tensor(op, s), s.tensor)
    return PureState.from_vector(s.layout, out)


def project(p: LinearOp, s: PureState) -> Tuple[float, PureState]:
    if not p.is_projector():
        raise LinalgError(f"operator on {p.targets} is not a projector")
    residual = apply(p, s)
    residual = PureState(residual.layout, residual.amplitudes, normalized=False)
    return residual.norm2, residual


def basis_state(layout: RegisterLayout, values: Mapping[str, int]) -> PureState:
    amps = np.zeros(layout.dims, dtype=np.complex128)
    index = tuple(values.get(label, 0) for label in layout.labels)
    amps[index] = 1
    return PureState(layout, amps)


def extend(s: PureState, sub: Subsystem, vector) -> PureState:
    fresh = PureState(RegisterLayout((sub,), s.layout.max_amplitudes), vector)
    layout = s.layout.concat(fresh.layout)
    return PureState.from_vector(layout, np.kron(s.amplitudes, fresh.amplitudes))


def projector(vector) -> np.ndarray:
    v = _as_complex(vector).reshape(-1)
    return np.outer(v, v.conj())


def unitary_with_first_column(vector) -> np.ndarray:
    """A unitary whose first column is the normalized `vector` (Householder)."""
    v = _as_complex(vector).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise LinalgError("cannot complete the zero vector")
    v = v / norm
    phase = v[0] / abs(v[0]) if abs(v[0]) > TOL.clamp else 1
    w = v / phase
    u = -w
    u[0] += 1
    unorm2 = np.vdot(u, u).real
    if unorm2 < TOL.clamp:
        return phase * np.eye(v.shape[0], dtype=np.complex128)
    return phase * (np.eye(v.shape[0]) - 2 * np.outer(u, u.conj()) / unorm2)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def embed(block, dim: int) -> np.ndarray:
    block = _as_complex(block)
    out = np.eye(dim, dtype=np.complex128)
    k = block.shape[0]
    out[:k, :k] = block
    return out


def level_swap(dim: int, i: int, j: int) -> np.ndarray:
    perm = np.eye(dim, dtype=np.complex128)
    perm[[i, j]] = perm[[j, i]]
    return perm
