"""Effective one-particle Hamiltonian: assembly, diagonalization, calculus.

The oscillator system on a box reduces to the real symmetric matrix

    h[x, x] = coupling * deg(x) + k[x] / 2
    h[x, y] = -coupling            for nearest neighbors x, y

(the lattice Laplacian plus random diagonal). All correlation formulas are
functions of its spectral data: eigenvalues ``eigvals`` (ascending), mode
frequencies ``freqs = sqrt(eigvals)``, and the orthogonal eigenvector matrix
``vectors`` with one column per mode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import KField
from .errors import DegenerateSpectrum, NearSingular
from .lattice import LatticeBox

#: relative gap below which two eigenvalues count as degenerate
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class EffectiveHamiltonian:
    box: LatticeBox
    matrix: np.ndarray


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition of an effective Hamiltonian with positive spectrum."""

    box: LatticeBox
    eigvals: np.ndarray  # ascending, all > 0
    freqs: np.ndarray    # positive square roots of eigvals
    vectors: np.ndarray  # orthogonal, columns are unit eigenvectors

    @property
    def n_modes(self) -> int:
        return self.eigvals.size

    @property
    def min_freq(self) -> float:
        return float(self.freqs[0])

    def min_relative_gap(self) -> float:
        """Smallest eigenvalue gap relative to the larger of the pair."""
        w = self.eigvals
        if w.size < 2:
            return np.inf
        return float(np.min(np.diff(w) / w[1:]))

    def require_simple(self) -> None:
        """Reject samples whose mode labeling is ambiguous."""
        if self.min_relative_gap() < DEGENERACY_RTOL:
            raise DegenerateSpectrum(
                f"minimal relative gap {self.min_relative_gap():.3e} "
                f"< {DEGENERACY_RTOL:.0e}"
            )


@dataclass(frozen=True)
class ExcitationVector:
    """Nonnegative occupation numbers, one per mode in ascending-frequency order."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 1 or (c < 0).any():
            raise ValueError("excitation counts must be a 1-d nonnegative array")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @classmethod
    def zeros(cls, n_modes: int) -> "ExcitationVector":
        return cls(np.zeros(n_modes, dtype=np.int64))

    @classmethod
    def from_pairs(cls, pairs, n_modes: int) -> "ExcitationVector":
        """Build from sparse (mode_index, count) pairs; unlisted modes are 0."""
        c = np.zeros(n_modes, dtype=np.int64)
        for mode, count in pairs:
            if not 0 <= int(mode) < n_modes:
                raise ValueError(f"mode index {mode} out of range for {n_modes} modes")
            c[int(mode)] = int(count)
        return cls(c)

    @property
    def n_modes(self) -> int:
        return self.counts.size

    @property
    def norm_inf(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0

    @property
    def norm_1(self) -> int:
        return int(self.counts.sum())


def build_h(kf: KField) -> EffectiveHamiltonian:
    """Assemble the effective Hamiltonian for one disorder realization."""
    n = kf.box.n_sites
    h = np.zeros((n, n))
    np.fill_diagonal(h, kf.k / 2.0)
    for i, j in kf.box.edges():
        h[i, i] += kf.coupling
        h[j, j] += kf.coupling
        h[i, j] -= kf.coupling
        h[j, i] -= kf.coupling
    return EffectiveHamiltonian(box=kf.box, matrix=h)


def spectrum_bounds(kf: KField, k_max: float | None = None) -> tuple[float, float]:
    """A-priori interval containing the whole spectrum of ``build_h(kf)``.

    The lattice Laplacian part is bounded between 0 and 4*dim*coupling, so the
    spectrum lies in ``[min(k)/2, 4*dim*coupling + k_max/2]``.
    """
    if k_max is None:
        k_max = kf.k_max
    lo = float(kf.k.min()) / 2.0
    hi = 4.0 * kf.box.dim * kf.coupling + float(k_max) / 2.0
    return lo, hi


def diagonalize(h: EffectiveHamiltonian, eps_pos: float = 1e-12) -> SpectralData:
    """Eigendecomposition with a positivity guard and fixed column signs.

    Raises ``NearSingular`` if any eigenvalue falls below ``eps_pos`` (with an
    absolutely continuous spring distribution this is a probability-zero
    event; such samples are rejected rather than regularized). Each column is
    flipped so that its first entry of largest magnitude is positive.
    """
    w, vec = np.linalg.eigh(h.matrix)
    if w[0] < eps_pos:
        raise NearSingular(f"lowest eigenvalue {w[0]:.3e} < {eps_pos:.0e}")
    lead = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[lead, np.arange(vec.shape[1])])
    vec = vec * signs
    w = w.copy()
    w.setflags(write=False)
    vec.setflags(write=False)
    freqs = np.sqrt(w)
    freqs.setflags(write=False)
    return SpectralData(box=h.box, eigvals=w, freqs=freqs, vectors=vec)


def func_calc(sd: SpectralData, f) -> np.ndarray:
    """Apply a scalar function to the effective Hamiltonian spectrally.

    Returns ``vectors @ diag(f(eigvals)) @ vectors.T``; complex if ``f`` is.
    """
    fw = np.asarray(f(sd.eigvals))
    return (sd.vectors * fw) @ sd.vectors.T


def mode_diagonal(sd: SpectralData, excitations: ExcitationVector) -> np.ndarray:
    """Real symmetric matrix diagonal in the mode basis with given weights.

    Requires a simple spectrum: with a repeated eigenvalue the per-mode
    projections are ambiguous and the sample is rejected.
    """
    if excitations.n_modes != sd.n_modes:
        raise ValueError(
            f"excitation vector has {excitations.n_modes} entries, "
            f"expected {sd.n_modes}"
        )
    sd.require_simple()
    return (sd.vectors * excitations.counts.astype(float)) @ sd.vectors.T
