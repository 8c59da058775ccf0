"""Hermitian eigensolution, symmetry-sector splitting, eigenstate labeling, and
truncation-convergence control."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .hilbert import (
    HilbertSpace,
    Operator,
    QuantumState,
    _require_same_space,
)
from .models import (
    ModelParams,
    ResonanceError,
    build_hamiltonian,
    conserved_ops,
    displacement_d,
)

#: Relative scale below which two eigenvalues count as degenerate.
DEGENERACY_RTOL = 1e-9
#: Commutator bound a candidate symmetry must satisfy before sector splitting.
SECTOR_COMM_TOL = 1e-8
#: Sector eigenvalues are snapped to this grid (parity and excitation labels
#: are exact half-integers; the tolerance only guards float noise).
SECTOR_GRID = 0.5
SECTOR_GRID_TOL = 1e-6


class ConvergenceError(RuntimeError):
    """Truncation growth hit the cap before the observable settled."""

    def __init__(self, message, last_n=None, last_value=None):
        super().__init__(message)
        self.last_n = last_n
        self.last_value = last_value


@dataclass(frozen=True)
class SectorLabel:
    """(parity, secondary quantum number, ordering within the sector)."""

    parity: int
    secondary: int | None
    j: int

    def astuple(self):
        return (self.parity, self.secondary, self.j)


@dataclass
class EigenSystem:
    """Ascending eigenenergies with eigenstates and optional sector labels."""

    energies: np.ndarray
    states: list[QuantumState]
    labels: list[SectorLabel] | None = None

    def __len__(self):
        return len(self.energies)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    """Make the first significant amplitude real positive (deterministic sign)."""
    idx = np.argmax(np.abs(vec) > 1e-8 * np.max(np.abs(vec)))
    a = vec[idx]
    if a == 0:
        return vec
    return vec * (a.conjugate() / abs(a))


def _degenerate_clusters(energies: np.ndarray):
    clusters, start = [], 0
    for i in range(1, len(energies) + 1):
        if i == len(energies) or (
            energies[i] - energies[i - 1]
            > DEGENERACY_RTOL * max(1.0, abs(energies[i]))
        ):
            clusters.append(slice(start, i))
            start = i
    return clusters


def eigensolve(
    h: Operator,
    k: int | None = None,
    resolve: tuple[Operator, ...] = (),
    method: str = "dense",
) -> EigenSystem:
    """Lowest k eigenpairs of a Hermitian operator (all of them when k is None).

    Degenerate clusters are rotated into eigenbases of the operators in
    ``resolve`` (in order), then every vector gets a deterministic phase, so
    repeated runs return identical output.  method="lanczos" switches to an
    iterative solver with a fixed start vector; the dense path is the default.
    """
    if not h.hermitian and h.hermiticity_defect() > 1e-10:
        raise ValueError("eigensolve requires a Hermitian operator")
    dim = h.space.dim
    if k is not None and not 1 <= k <= dim:
        raise ValueError(f"k must be in [1, {dim}], got {k}")

    if method == "lanczos" and k is not None and k < dim - 1:
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        w, v = scipy.sparse.linalg.eigsh(h.data, k=k, which="SA", v0=v0)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
    elif k is None or k == dim:
        w, v = scipy.linalg.eigh(h.data)
    else:
        w, v = scipy.linalg.eigh(h.data, subset_by_index=(0, k - 1))

    for cluster in _degenerate_clusters(w):
        if cluster.stop - cluster.start > 1 and resolve:
            block = v[:, cluster]
            for op in resolve:
                _require_same_space(h, op)
                sub = block.conj().T @ op.data @ block
                sw, sv = scipy.linalg.eigh(0.5 * (sub + sub.conj().T))
                block = block @ sv
            v[:, cluster] = block
    for i in range(v.shape[1]):
        v[:, i] = _fix_phase(v[:, i])

    states = [QuantumState(h.space, v[:, i]) for i in range(v.shape[1])]
    return EigenSystem(np.asarray(w, dtype=float), states)


@dataclass
class SectorBlock:
    """One symmetry sector: eigenvalue, projected Hamiltonian, embedding map."""

    value: float
    hamiltonian: np.ndarray
    embedding: np.ndarray  # dim x block_dim isometry; columns are sector basis vectors

    @property
    def dim(self):
        return self.hamiltonian.shape[0]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        return self.embedding @ vec


def sector_split(h: Operator, s: Operator, comm_tol: float = SECTOR_COMM_TOL):
    """Split h into blocks over the eigenspaces of the conserved operator s.

    s must commute with h to within comm_tol and have a spectrum on the
    half-integer grid.  The blocks' direct sum reproduces h's spectrum;
    each embedding reconstructs full-space eigenvectors.
    """
    _require_same_space(h, s)
    defect = float(np.max(np.abs(h.data @ s.data - s.data @ h.data)))
    if defect > comm_tol:
        raise ValueError(
            f"operator is not conserved: max|[H,S]| = {defect:.3e} > {comm_tol:.0e}"
        )

    dim = h.space.dim
    offdiag = s.data - np.diag(np.diag(s.data))
    if np.max(np.abs(offdiag)) < 1e-12:
        values = np.real(np.diag(s.data))
        basis = np.eye(dim, dtype=np.complex128)
    else:
        values, basis = scipy.linalg.eigh(s.data)

    snapped = np.round(values / SECTOR_GRID) * SECTOR_GRID
    if np.max(np.abs(values - snapped)) > SECTOR_GRID_TOL:
        raise ValueError("sector operator spectrum is not on the half-integer grid")

    blocks = []
    for val in np.unique(snapped):
        cols = np.where(snapped == val)[0]
        emb = np.ascontiguousarray(basis[:, cols])
        block = emb.conj().T @ h.data @ emb
        block = 0.5 * (block + block.conj().T)
        blocks.append(SectorBlock(float(val), block, emb))
    assert sum(b.dim for b in blocks) == dim
    return blocks


# ---------------------------------------------------------------------------
# Embedded Rabi problem (qubit x one mode), used for resonant-field labeling.


@dataclass
class RabiSpectrum:
    """Parity-resolved spectrum of the single-mode Rabi model.

    Index order of the vectors is qubit-major: s*(n_max+1) + n.
    """

    energies: np.ndarray
    parities: np.ndarray  # +-1 per level
    js: np.ndarray  # ordering within the parity sector
    vectors: np.ndarray  # column per level


def rabi_eigensystem(omega0: float, omega: float, g: float, n_max: int) -> RabiSpectrum:
    d = n_max + 1
    a = np.zeros((d, d))
    for n in range(1, d):
        a[n - 1, n] = np.sqrt(n)
    h = (
        0.5 * omega0 * np.kron(np.diag([-1.0, 1.0]), np.eye(d))
        + omega * np.kron(np.eye(2), np.diag(np.arange(d, dtype=float)))
        + g * np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), a + a.T)
    )
    s = np.repeat([0, 1], d)
    n = np.tile(np.arange(d), 2)
    parity_diag = np.where((s + n) % 2 == 0, 1, -1)

    energies, parities, js, vectors = [], [], [], []
    for pval in (1, -1):
        ix = np.where(parity_diag == pval)[0]
        w, v = scipy.linalg.eigh(h[np.ix_(ix, ix)])
        for j in range(len(w)):
            full = np.zeros(2 * d, dtype=np.complex128)
            full[ix] = _fix_phase(v[:, j].astype(np.complex128))
            energies.append(w[j])
            parities.append(pval)
            js.append(j)
            vectors.append(full)
    order = np.lexsort((np.negative(parities), energies))  # energy, then + before -
    return RabiSpectrum(
        energies=np.array([energies[i] for i in order]),
        parities=np.array([parities[i] for i in order], dtype=int),
        js=np.array([js[i] for i in order], dtype=int),
        vectors=np.column_stack([vectors[i] for i in order]),
    )


def labeled_levels_h1(p: ModelParams, n_max1: int, n_b_max: int, k: int):
    """Lowest k levels of the resonant two-field sigma_x model as
    (energy, parity, n_b, j) tuples, from the embedded Rabi problem."""
    if not p.resonant:
        raise ResonanceError("labeling by (parity, n_b, j) requires omega1 = omega2")
    rabi = rabi_eigensystem(p.omega0, p.omega1, p.g, n_max1)
    rows = []
    for n_b in range(n_b_max + 1):
        for i in range(len(rabi.energies)):
            rows.append(
                (rabi.energies[i] + p.omega1 * n_b, int(rabi.parities[i]), n_b, int(rabi.js[i]))
            )
    rows.sort()
    return rows[:k]


def label_spectrum_h1(p: ModelParams, space: HilbertSpace, k: int) -> EigenSystem:
    """Labeled eigensystem of the resonant sigma_x model.

    Energies are omega*n_b plus the embedded Rabi levels; the parity label is
    the Rabi-sector parity, as used to color the spectral branches.  States
    are rebuilt in the lab frame by tensoring the Rabi vectors with |n_b> and
    undoing the mode displacement, so they are accurate away from the cutoff.
    """
    if not p.resonant:
        raise ResonanceError("labeling by (parity, n_b, j) requires omega1 = omega2")
    rabi = rabi_eigensystem(p.omega0, p.omega1, p.g, space.n_max1)
    entries = []
    for n_b in range(space.n_max2 + 1):
        for i in range(len(rabi.energies)):
            entries.append((rabi.energies[i] + p.omega1 * n_b, n_b, i))
    entries.sort()
    entries = entries[:k]

    d_inv = displacement_d(space, -p.xi)  # D(xi)^dag = D(-xi)
    d1, d2 = space.mode_dims
    energies, states, labels = [], [], []
    for energy, n_b, i in entries:
        vec = rabi.vectors[:, i]  # qubit-major over (s, n1)
        full = np.zeros(space.dim, dtype=np.complex128)
        for s in range(2):
            for n1 in range(d1):
                amp = vec[s * d1 + n1]
                if amp != 0:
                    full[space.index(s, n1, n_b)] = amp
        lab = d_inv.data @ full
        lab = _fix_phase(lab / np.linalg.norm(lab))
        energies.append(energy)
        states.append(QuantumState(space, lab))
        labels.append(SectorLabel(int(rabi.parities[i]), n_b, int(rabi.js[i])))
    return EigenSystem(np.array(energies), states, labels)


def labeled_levels_h2_equal(p: ModelParams, space: HilbertSpace, k: int):
    """Lowest k levels of the resonant equal-coupling sigma_x/sigma_y model as
    (energy, parity, n_d, j) tuples, via the excitation-imbalance sectors of
    its displaced form."""
    blocks = _h2_equal_blocks(p, space)
    rows = []
    for n_d, block in blocks:
        w = scipy.linalg.eigvalsh(block.hamiltonian)
        parity = 1 if n_d % 2 == 0 else -1
        for j, e in enumerate(w):
            rows.append((float(e), parity, n_d, j))
    rows.sort()
    return rows[:k]


def _h2_equal_blocks(p: ModelParams, space: HilbertSpace):
    if not p.resonant:
        raise ResonanceError("sector labeling requires omega1 = omega2")
    if abs(p.g1 - p.g2) > 1e-12 * max(1.0, p.g):
        raise ValueError("sector labeling requires g1 = g2")
    h = build_hamiltonian("h2rf", p, space)
    ops = conserved_ops(space)
    blocks = sector_split(h, ops["n_script"])
    parity_diag = np.real(np.diag(ops["parity"].data))
    out = []
    for block in blocks:
        n_d = int(round(block.value))  # integer grid under the documented offset
        # every basis state of a sector carries the same parity (-1)^n_d
        occupied = np.where(np.abs(block.embedding).sum(axis=1) > 0)[0]
        assert np.all(parity_diag[occupied] == (1 if n_d % 2 == 0 else -1))
        out.append((n_d, block))
    return out


def label_spectrum_h2_equal(p: ModelParams, space: HilbertSpace, k: int) -> EigenSystem:
    """Labeled eigensystem of the resonant equal-coupling model.

    Each excitation-imbalance sector n_d carries a single parity (-1)^n_d, so
    the label triple is (parity, n_d, j) with j ordering energies inside the
    sector.  Eigenvectors are those of the displaced (mode-rotated) frame.
    """
    blocks = _h2_equal_blocks(p, space)
    entries = []
    for n_d, block in blocks:
        w, v = scipy.linalg.eigh(block.hamiltonian)
        parity = 1 if n_d % 2 == 0 else -1
        for j in range(len(w)):
            entries.append((float(w[j]), parity, n_d, j, block, v[:, j]))
    entries.sort(key=lambda e: (e[0], e[2], e[3]))
    entries = entries[:k]
    energies, states, labels = [], [], []
    for e, parity, n_d, j, block, vec in entries:
        full = _fix_phase(block.embed(vec))
        energies.append(e)
        states.append(QuantumState(space, full))
        labels.append(SectorLabel(parity, n_d, j))
    return EigenSystem(np.array(energies), states, labels)


def converge_truncation(
    builder,
    observable,
    tol: float,
    n_start: int = 4,
    n_step: int = 2,
    n_cap: int = 64,
    k: int = 8,
):
    """Grow the cutoff until the observable settles.

    builder maps a cutoff n_max to an Operator; observable maps the solved
    EigenSystem to a real number.  Returns (n_max, value) at the smallest
    tested cutoff whose value moved less than tol from the previous one.
    Raises ConvergenceError when n_cap is reached first.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prev = None
    n = n_start
    while n <= n_cap:
        h = builder(n)
        es = eigensolve(h, k=min(k, h.space.dim))
        value = float(observable(es))
        if prev is not None and abs(value - prev) < tol:
            return n, value
        prev = value
        n += n_step
    raise ConvergenceError(
        f"observable did not settle to {tol:g} by n_max = {n_cap}",
        last_n=n - n_step,
        last_value=prev,
    )
