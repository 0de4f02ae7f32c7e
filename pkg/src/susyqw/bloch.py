"""Floquet-Bloch operators, band structure, symmetry checks and winding numbers.

The one-period bulk evolution restricted to wave number k is a 4x4 unitary
on (sublattice x coin).  In the site-local primed basis it anticommutes with
the sublattice Pauli CELL_Z (unitary supersymmetry) and is chiral under the
coin Pauli COIN_Y; together these pin protected gaps at quasi-energy 0, pi
(lambda = +-1) and pi/2, 3pi/2 (lambda = +-i).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PhaseTransitionError, SymmetryViolationError
from .operators import (CELL_X, CELL_Y, CELL_Z, COIN_X, COIN_Y, COIN_Z, ID4,
                        SX, coin_matrix, shift_phase)
from .walk import Frame

_UNIT_CIRCLE_TOL = 1e-10


def band_condition_value(k, phi1: float, phi2: float):
    """Re[lambda^2] demanded by the dispersion relation at wave number k."""
    return np.cos(phi1) * np.cos(phi2) * np.cos(k) - np.sin(phi1) * np.sin(phi2)


def protected_gaps(phi1: float, phi2: float) -> tuple[float, float]:
    """Analytic quasi-energy gaps at lambda = +-1 and lambda = +-i."""
    amp = abs(np.cos(phi1) * np.cos(phi2))
    off = np.sin(phi1) * np.sin(phi2)
    c_max = np.clip(amp - off, -1.0, 1.0)
    c_min = np.clip(-amp - off, -1.0, 1.0)
    gap_real = float(np.arccos(c_max) / 2)
    gap_imag = float((np.pi - np.arccos(c_min)) / 2)
    return gap_real, gap_imag


def quasi_energies(lams: np.ndarray) -> np.ndarray:
    """epsilon = -arg(lambda) mod 2pi."""
    return np.mod(-np.angle(lams), 2 * np.pi)


def _circle_distance(eps, target):
    return np.abs(np.mod(eps - target + np.pi, 2 * np.pi) - np.pi)


@dataclass(frozen=True, eq=False)
class BlochOperator:
    matrix: np.ndarray  # 4x4 complex
    k: float
    phi1: float
    phi2: float
    frame: Frame


def bloch_operator(k: float, phi1: float, phi2: float,
                   frame: Frame = Frame.LAB) -> BlochOperator:
    """4x4 one-step unitary at wave number k.

    Lab frame:     [[0, sx f(-k) sx C(phi2)], [f(k) C(phi1), 0]]
    Primed frame:  half-angle coins attached on both sides of each block.
    """
    u = np.zeros((4, 4), dtype=complex)
    upper = SX @ shift_phase(-k) @ SX
    lower = shift_phase(k)
    if frame is Frame.LAB:
        u[:2, 2:] = upper @ coin_matrix(phi2)
        u[2:, :2] = lower @ coin_matrix(phi1)
    else:
        h1, h2 = coin_matrix(phi1 / 2), coin_matrix(phi2 / 2)
        u[:2, 2:] = h1 @ upper @ h2
        u[2:, :2] = h2 @ lower @ h1
    return BlochOperator(u, float(k), float(phi1), float(phi2), frame)


def to_primed(op: BlochOperator) -> BlochOperator:
    """Conjugate a lab-frame Bloch operator into the primed basis."""
    if op.frame is Frame.PRIMED:
        return op
    v = np.zeros((4, 4), dtype=complex)
    v[:2, :2] = coin_matrix(op.phi1 / 2)
    v[2:, 2:] = coin_matrix(op.phi2 / 2)
    return BlochOperator(v @ op.matrix @ v.conj().T, op.k, op.phi1, op.phi2, Frame.PRIMED)


@dataclass(frozen=True)
class SymmetryReport:
    chiral_residual: float
    susy_residual: float


def check_symmetries(op: BlochOperator) -> SymmetryReport:
    """Operator-norm residuals of the chiral and supersymmetry relations.

    Both vanish (< 1e-12) in the primed frame; a lab-frame operator is
    transformed first, so the report always refers to the primed algebra.
    """
    u = to_primed(op).matrix
    chiral = np.linalg.norm(COIN_Y @ u @ COIN_Y - u.conj().T, 2)
    susy = np.linalg.norm(CELL_Z @ u @ CELL_Z + u, 2)
    return SymmetryReport(float(chiral), float(susy))


def susy_partners(k: float, phi1: float, phi2: float,
                  frame: Frame = Frame.LAB) -> tuple[np.ndarray, np.ndarray]:
    """The two 2x2 partner walks whose direct sum is u(k)^2."""
    u = bloch_operator(k, phi1, phi2, frame).matrix
    u12, u21 = u[:2, 2:], u[2:, :2]
    return u12 @ u21, u21 @ u12


@dataclass(frozen=True, eq=False)
class BandStructure:
    """Connected bands over a sorted k grid, gauge-fixed eigenvectors included."""

    k_grid: np.ndarray          # (nk,)
    eigenvalues: np.ndarray     # (nk, 4), unit circle, band-ordered
    quasienergies: np.ndarray   # (nk, 4)
    eigenvectors: np.ndarray    # (nk, 4, 4), column b is band b
    phi1: float
    phi2: float
    frame: Frame

    def gap_at_real(self) -> float:
        """Minimal quasi-energy distance to lambda = +-1 over the grid."""
        eps = self.quasienergies
        return float(min(_circle_distance(eps, 0.0).min(), _circle_distance(eps, np.pi).min()))

    def gap_at_imag(self) -> float:
        """Minimal quasi-energy distance to lambda = +-i over the grid."""
        eps = self.quasienergies
        return float(min(_circle_distance(eps, np.pi / 2).min(),
                         _circle_distance(eps, 3 * np.pi / 2).min()))


def _eig_on_circle(mat: np.ndarray, k: float) -> tuple[np.ndarray, np.ndarray]:
    try:
        lam, vec = np.linalg.eig(mat)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails on 4x4
        raise np.linalg.LinAlgError(f"eigensolver failed at k={k}") from exc
    mod = np.abs(lam)
    if np.max(np.abs(mod - 1.0)) > _UNIT_CIRCLE_TOL:
        raise np.linalg.LinAlgError(f"eigenvalues off the unit circle at k={k}")
    return lam / mod, vec


def _fix_gauge(vec: np.ndarray) -> np.ndarray:
    """Largest-magnitude component made real positive."""
    j = int(np.argmax(np.abs(vec)))
    phase = vec[j] / abs(vec[j])
    return vec / phase


def band_structure(phi1: float, phi2: float,
                   k_grid: np.ndarray | None = None,
                   resolution: int = 512,
                   frame: Frame = Frame.PRIMED) -> BandStructure:
    """Diagonalize the Bloch operator over a k grid and connect the bands.

    Bands are matched between neighbouring k points by maximal eigenvector
    overlap (eigenvalue proximity breaks ties) and labelled by ascending
    quasi-energy at the first grid point.  Eigenvalues are projected onto
    the unit circle; the projection delta is asserted below 1e-10.
    """
    if k_grid is None:
        k_grid = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    ks = np.asarray(k_grid, dtype=float)
    if ks.size == 0:
        raise ValueError("k grid is empty")
    if np.any(np.diff(ks) < 0):
        raise ValueError("k grid must be sorted")

    nk = ks.size
    lams = np.empty((nk, 4), dtype=complex)
    vecs = np.empty((nk, 4, 4), dtype=complex)
    for i, k in enumerate(ks):
        lam, vec = _eig_on_circle(bloch_operator(k, phi1, phi2, frame).matrix, k)
        if i == 0:
            order = np.argsort(quasi_energies(lam))
        else:
            order = _match_bands(vecs[i - 1], lams[i - 1], vec, lam)
        lam, vec = lam[order], vec[:, order]
        for b in range(4):
            v = _fix_gauge(vec[:, b])
            if i > 0:
                ov = np.vdot(vecs[i - 1][:, b], v)
                if abs(ov) > 1e-12:
                    v = v * (ov.conjugate() / abs(ov))
            vec[:, b] = v
        lams[i], vecs[i] = lam, vec
    return BandStructure(ks, lams, quasi_energies(lams), vecs,
                         float(phi1), float(phi2), frame)


def _match_bands(prev_vecs, prev_lams, vec, lam) -> np.ndarray:
    """Greedy maximal-overlap assignment of new eigenpairs to band slots."""
    score = np.abs(prev_vecs.conj().T @ vec) ** 2
    score = score - 1e-9 * np.abs(prev_lams[:, None] - lam[None, :])
    order = np.full(4, -1)
    for _ in range(4):
        a, b = np.unravel_index(np.argmax(score), score.shape)
        order[a] = b
        score[a, :] = -np.inf
        score[:, b] = -np.inf
    return order


def quadruple_closure_distance(lams: np.ndarray) -> float:
    """Set distance between {lambda_j} and its image under conjugation and negation."""
    lams = np.asarray(lams)
    worst = 0.0
    for image in (lams.conj(), -lams, -lams.conj()):
        d = np.abs(lams[:, None] - image[None, :]).min(axis=0).max()
        worst = max(worst, float(d))
    return worst


_PAIR_OPS = (
    (COIN_X @ (ID4 + CELL_Z), COIN_Z @ (ID4 + CELL_Z)),
    (COIN_X @ (ID4 - CELL_Z), COIN_Z @ (ID4 - CELL_Z)),
    (CELL_X @ (ID4 - COIN_Y), CELL_Y @ (ID4 - COIN_Y)),
)

_RADIUS_TOL = 1e-6


def torus_angles(vec: np.ndarray, radius_tol: float = _RADIUS_TOL) -> tuple[float, float, float]:
    """The three torus angles (alpha, beta, gamma) of a bulk eigenvector.

    Each angle comes from a (cos, sin) pair of operator expectations that
    lies on the unit circle for bulk eigenstates away from lambda = +-1, +-i;
    a pair radius off 1 beyond ``radius_tol`` raises SymmetryViolationError.
    """
    v = np.asarray(vec, dtype=complex)
    if v.shape != (4,):
        raise ValueError("expected a 4-component Bloch eigenvector")
    nrm = np.linalg.norm(v)
    if abs(nrm - 1.0) > 1e-8:
        v = v / nrm
    angles = []
    for op_cos, op_sin in _PAIR_OPS:
        c = float(np.vdot(v, op_cos @ v).real)
        s = float(np.vdot(v, op_sin @ v).real)
        r = np.hypot(c, s)
        if abs(r - 1.0) > radius_tol:
            raise SymmetryViolationError(
                f"state violates bulk symmetry constraints (pair radius {r:.6f})")
        angles.append(float(np.arctan2(s / r, c / r)))
    return tuple(angles)


@dataclass(frozen=True)
class WindingReport:
    """Integer torus-angle windings per band plus gap sizes and residuals."""

    phi1: float
    phi2: float
    resolution: int
    windings: tuple[tuple[int, int, int], ...]   # per band: (w_alpha, w_beta, w_gamma)
    residuals: tuple[float, ...]                 # per band, max |accumulated/2pi - integer|
    gap_at_real: float
    gap_at_imag: float


def winding_numbers(phi1: float, phi2: float, resolution: int = 512) -> WindingReport:
    """Accumulate the torus angles along a closed k loop and round to integers."""
    if resolution < 256:
        raise ValueError("winding needs resolution >= 256")
    bands = band_structure(phi1, phi2, resolution=resolution, frame=Frame.PRIMED)
    gap_real, gap_imag = bands.gap_at_real(), bands.gap_at_imag()
    if min(gap_real, gap_imag) < 1e-6:
        raise PhaseTransitionError("cannot compute winding at a phase transition")

    # Close the loop: diagonalize k = 2pi and match it to the last grid point.
    lam_end, vec_end = _eig_on_circle(bloch_operator(2 * np.pi, phi1, phi2, Frame.PRIMED).matrix,
                                   2 * np.pi)
    order = _match_bands(bands.eigenvectors[-1], bands.eigenvalues[-1], vec_end, lam_end)
    vec_end = vec_end[:, order]

    windings, residuals = [], []
    for b in range(4):
        path = [torus_angles(bands.eigenvectors[i][:, b]) for i in range(bands.k_grid.size)]
        path.append(torus_angles(vec_end[:, b]))
        arr = np.asarray(path)
        deltas = np.mod(np.diff(arr, axis=0) + np.pi, 2 * np.pi) - np.pi
        total = deltas.sum(axis=0) / (2 * np.pi)
        w = np.rint(total)
        windings.append(tuple(int(x) for x in w))
        residuals.append(float(np.abs(total - w).max()))
    return WindingReport(float(phi1), float(phi2), resolution,
                         tuple(windings), tuple(residuals), gap_real, gap_imag)
