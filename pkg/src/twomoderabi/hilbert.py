"""Truncated Fock space of one qubit and two boson modes, with dense operator algebra.

Basis states are |s, n1, n2> with qubit level s in {0 = g, 1 = e} and photon
numbers n_j <= n_max_j.  The flat index is qubit-major,

    index = s*(n_max1+1)*(n_max2+1) + n1*(n_max2+1) + n2,

so parity and excitation sectors are contiguous unions of index slices.
Everything is stored dense complex128; operators and states are frozen after
construction and safe to share between parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Largest total dimension make_space accepts (dense storage gets expensive fast).
DEFAULT_MAX_DIM = 6000


class SpaceMismatchError(ValueError):
    """Operands are bound to different Hilbert spaces."""


class DimensionLimitError(RuntimeError):
    """Requested space exceeds the configured dense-storage limit."""


@dataclass(frozen=True)
class HilbertSpace:
    """Qubit (x) mode-1 (x) mode-2 product space with per-mode cutoffs."""

    n_max1: int
    n_max2: int

    def __post_init__(self):
        if self.n_max1 < 1 or self.n_max2 < 1:
            raise ValueError(f"cutoffs must be >= 1, got ({self.n_max1}, {self.n_max2})")

    @property
    def dim(self) -> int:
        return 2 * (self.n_max1 + 1) * (self.n_max2 + 1)

    @property
    def mode_dims(self) -> tuple[int, int]:
        return self.n_max1 + 1, self.n_max2 + 1

    def index(self, s: int, n1: int, n2: int) -> int:
        d1, d2 = self.mode_dims
        if s not in (0, 1):
            raise ValueError(f"qubit level must be 0 (g) or 1 (e), got {s}")
        if not (0 <= n1 <= self.n_max1 and 0 <= n2 <= self.n_max2):
            raise ValueError(f"photon numbers ({n1}, {n2}) outside cutoffs")
        return (s * d1 + n1) * d2 + n2

    def levels(self, index: int) -> tuple[int, int, int]:
        """Inverse of index(): flat index -> (s, n1, n2)."""
        d1, d2 = self.mode_dims
        if not 0 <= index < self.dim:
            raise ValueError(f"index {index} outside [0, {self.dim})")
        index, n2 = divmod(index, d2)
        s, n1 = divmod(index, d1)
        return s, n1, n2

    def level_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(s, n1, n2) occupation arrays over the full basis, in index order."""
        d1, d2 = self.mode_dims
        s = np.repeat(np.arange(2), d1 * d2)
        n1 = np.tile(np.repeat(np.arange(d1), d2), 2)
        n2 = np.tile(np.arange(d2), 2 * d1)
        return s, n1, n2


def make_space(n_max1: int, n_max2: int, max_dim: int = DEFAULT_MAX_DIM) -> HilbertSpace:
    """Build a truncated space, rejecting cutoffs < 1 and dimensions above max_dim."""
    if n_max1 < 1 or n_max2 < 1:
        raise ValueError(f"cutoffs must be >= 1, got ({n_max1}, {n_max2})")
    dim = 2 * (n_max1 + 1) * (n_max2 + 1)
    if dim > max_dim:
        raise DimensionLimitError(
            f"dimension {dim} exceeds the configured limit {max_dim}; "
            f"lower the cutoffs or raise max_dim"
        )
    return HilbertSpace(n_max1, n_max2)


def _require_same_space(*objs):
    space = objs[0].space
    for obj in objs[1:]:
        if obj.space != space:
            raise SpaceMismatchError(
                f"operands live on different spaces: {space} vs {obj.space}"
            )
    return space


class Operator:
    """Dense complex matrix bound to a HilbertSpace.

    The hermitian flag is a promise (max|A - A^dag| < 1e-12), set by builders
    that construct exactly Hermitian matrices and propagated conservatively
    through arithmetic.
    """

    __slots__ = ("space", "data", "hermitian")

    def __init__(self, space: HilbertSpace, data: np.ndarray, hermitian: bool = False):
        data = np.asarray(data, dtype=np.complex128)
        if data.shape != (space.dim, space.dim):
            raise ValueError(f"matrix shape {data.shape} does not match dim {space.dim}")
        data = np.ascontiguousarray(data)
        data.flags.writeable = False
        self.space = space
        self.data = data
        self.hermitian = hermitian

    def dag(self) -> "Operator":
        return Operator(self.space, self.data.conj().T, hermitian=self.hermitian)

    def hermiticity_defect(self) -> float:
        """max|A - A^dag|, the actual deviation regardless of the flag."""
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def __add__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.data + other.data,
                        hermitian=self.hermitian and other.hermitian)

    def __sub__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.data - other.data,
                        hermitian=self.hermitian and other.hermitian)

    def __neg__(self) -> "Operator":
        return Operator(self.space, -self.data, hermitian=self.hermitian)

    def __mul__(self, scalar) -> "Operator":
        scalar = complex(scalar)
        return Operator(self.space, scalar * self.data,
                        hermitian=self.hermitian and scalar.imag == 0.0)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        _require_same_space(self, other)
        return Operator(self.space, self.data @ other.data)

    def __repr__(self):
        tag = "hermitian " if self.hermitian else ""
        return f"<{tag}Operator {self.data.shape[0]}x{self.data.shape[1]} on {self.space}>"


class QuantumState:
    """Complex amplitude vector bound to a HilbertSpace.

    Constructors in this package return unit-norm states; apply() may return
    unnormalized ones, so callers renormalize explicitly when needed.
    """

    __slots__ = ("space", "amplitudes")

    def __init__(self, space: HilbertSpace, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (space.dim,):
            raise ValueError(f"amplitude shape {amplitudes.shape} does not match dim {space.dim}")
        amplitudes = np.ascontiguousarray(amplitudes)
        amplitudes.flags.writeable = False
        self.space = space
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuantumState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return QuantumState(self.space, self.amplitudes / n)

    def __add__(self, other: "QuantumState") -> "QuantumState":
        _require_same_space(self, other)
        return QuantumState(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "QuantumState") -> "QuantumState":
        _require_same_space(self, other)
        return QuantumState(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "QuantumState":
        return QuantumState(self.space, complex(scalar) * self.amplitudes)

    __rmul__ = __mul__

    def __repr__(self):
        return f"<QuantumState dim={self.space.dim} norm={self.norm():.6f}>"


_QUBIT_LEVELS = {"g": 0, "e": 1, 0: 0, 1: 1}


def basis_state(space: HilbertSpace, s, n1: int, n2: int) -> QuantumState:
    """Product basis state |s, n1, n2>; s may be 0/1 or 'g'/'e'."""
    try:
        s = _QUBIT_LEVELS[s]
    except (KeyError, TypeError):
        raise ValueError(f"qubit level must be 0/1 or 'g'/'e', got {s!r}") from None
    amps = np.zeros(space.dim, dtype=np.complex128)
    amps[space.index(s, n1, n2)] = 1.0
    return QuantumState(space, amps)


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim, dtype=np.complex128), hermitian=True)


def _mode_annihilation(d: int) -> np.ndarray:
    a = np.zeros((d, d), dtype=np.complex128)
    for n in range(1, d):
        a[n - 1, n] = np.sqrt(n)
    return a


def annihilation(space: HilbertSpace, mode: int) -> Operator:
    """Lowering operator of the given mode (1 or 2), identity on the other slots."""
    d1, d2 = space.mode_dims
    eye_q = np.eye(2)
    if mode == 1:
        full = np.kron(eye_q, np.kron(_mode_annihilation(d1), np.eye(d2)))
    elif mode == 2:
        full = np.kron(eye_q, np.kron(np.eye(d1), _mode_annihilation(d2)))
    else:
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    return Operator(space, full)


def creation(space: HilbertSpace, mode: int) -> Operator:
    return annihilation(space, mode).dag()


def number(space: HilbertSpace, mode: int) -> Operator:
    """Photon-number operator, built diagonally so eigenvalues are exact integers."""
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    _, n1, n2 = space.level_arrays()
    diag = n1 if mode == 1 else n2
    return Operator(space, np.diag(diag.astype(np.complex128)), hermitian=True)


# 2x2 qubit matrices in the (g, e) = (index 0, index 1) ordering, so
# sigma_z|e> = +|e>, sigma_+ = |e><g|, and sigma_x sigma_y = i sigma_z holds.
_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=np.complex128),
    "z": np.array([[-1, 0], [0, 1]], dtype=np.complex128),
    "+": np.array([[0, 0], [1, 0]], dtype=np.complex128),
    "-": np.array([[0, 1], [0, 0]], dtype=np.complex128),
}


def pauli(space: HilbertSpace, axis: str) -> Operator:
    """Pauli or ladder operator on the qubit slot; axis in {x, y, z, +, -}."""
    try:
        q = _PAULI[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z, +, -; got {axis!r}") from None
    d1, d2 = space.mode_dims
    full = np.kron(q, np.eye(d1 * d2))
    return Operator(space, full, hermitian=axis in ("x", "y", "z"))


def combine(terms) -> Operator:
    """Linear combination sum(c_i * A_i); the hermitian flag is set from the result."""
    terms = list(terms)
    if not terms:
        raise ValueError("combine() needs at least one term")
    space = _require_same_space(*[op for _, op in terms])
    acc = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for coeff, op in terms:
        acc += complex(coeff) * op.data
    out = Operator(space, acc)
    out.hermitian = out.hermiticity_defect() < 1e-12
    return out


def adjoint(a: Operator) -> Operator:
    return a.dag()


def multiply(a: Operator, b: Operator) -> Operator:
    return a @ b


def commutator(a: Operator, b: Operator) -> Operator:
    _require_same_space(a, b)
    return Operator(a.space, a.data @ b.data - b.data @ a.data)


def expectation(a: Operator, psi: QuantumState) -> complex:
    _require_same_space(a, psi)
    return complex(np.vdot(psi.amplitudes, a.data @ psi.amplitudes))


def apply(a: Operator, psi: QuantumState) -> QuantumState:
    """A|psi>, not renormalized."""
    _require_same_space(a, psi)
    return QuantumState(psi.space, a.data @ psi.amplitudes)


def inner(psi: QuantumState, phi: QuantumState) -> complex:
    """<psi|phi>, conjugate-linear in the first argument."""
    _require_same_space(psi, phi)
    return complex(np.vdot(psi.amplitudes, phi.amplitudes))


def interior_projector(space: HilbertSpace, margin: int = 2) -> Operator:
    """Diagonal projector onto n1 <= n_max1 - margin and n2 <= n_max2 - margin.

    Truncation corrupts matrix identities only at the top Fock levels, so
    verification compares operators on this interior block.
    """
    _, n1, n2 = space.level_arrays()
    keep = (n1 <= space.n_max1 - margin) & (n2 <= space.n_max2 - margin)
    return Operator(space, np.diag(keep.astype(np.complex128)), hermitian=True)


def total_photon_projector(space: HilbertSpace, max_total: int) -> Operator:
    """Diagonal projector onto n1 + n2 <= max_total.

    Mode-mixing unitaries act within fixed n1+n2 manifolds, which the truncated
    space represents completely only up to min(n_max1, n_max2); conjugation
    identities are exact on this projector when max_total stays below that.
    """
    _, n1, n2 = space.level_arrays()
    keep = (n1 + n2) <= max_total
    return Operator(space, np.diag(keep.astype(np.complex128)), hermitian=True)
