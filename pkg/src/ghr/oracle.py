"""Brute-force ground truth on finite-dimensional Hilbert spaces.

A model is a Hermitian ``H`` and a unit state ``xi``. The trajectory
``xi(t) = exp(i t H~) xi`` has derivatives ``xi^(n) = (i H~)**n xi`` with
``H~ = H - <H>``. The real metric is ``g(x, y) = Re <x|y>`` (conjugate-linear
in the first slot) and the complex structure is multiplication by ``i``.
Gram-Schmidt over the odd derivatives gives the orthogonal vectors ``Psi_k``
whose norms, projection coefficients and numerators are compared against the
determinant formulas of :mod:`ghr.bound`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .bound import Status, bound_series, numerator_U, orthogonal_norm, projection_coefficient
from .errors import DegenerateFrame, GhrError, InvalidSpec, NonHermitian
from .moments import MomentSequence, Spectrum, moments_of
from .scalar import sign_power

# Psi_k counts as vanished when |Psi_k|**2 <= VANISH_EPS |xi^(k)|**2
VANISH_EPS = 1e-20
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
# |U_k| / (k mu_(k-1)) above which a vanished frame is classed Divergent
NUMERATOR_EPS = 1e-10


@dataclass(frozen=True)
class QuantumModel:
    hamiltonian: np.ndarray
    state: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=np.complex128)
        psi = np.asarray(self.state, dtype=np.complex128)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] != psi.shape[0]:
            raise InvalidSpec("hamiltonian must be square and match the state dimension")
        if not _is_hermitian(h):
            raise NonHermitian("hamiltonian is not Hermitian")
        if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
            raise InvalidSpec("state must have unit norm")
        h.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "state", psi)

    @property
    def dim(self) -> int:
        return self.state.shape[0]

    def mean_energy(self) -> float:
        return float(np.real(np.vdot(self.state, self.hamiltonian @ self.state)))

    def deviation(self) -> np.ndarray:
        """H~ = H - <H> 1."""
        return self.hamiltonian - self.mean_energy() * np.eye(self.dim)

    def spectrum(self) -> Spectrum:
        """Energy levels with Born probabilities in this state."""
        w, v = np.linalg.eigh(self.hamiltonian)
        probs = np.abs(v.conj().T @ self.state) ** 2
        probs = probs / probs.sum()
        return Spectrum(tuple((float(e), float(p)) for e, p in zip(w, probs)))


def _is_hermitian(x: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(x)))) if x.size else 1.0
    return bool(np.max(np.abs(x - x.conj().T), initial=0.0) <= HERMITIAN_TOL * scale)


@dataclass(frozen=True)
class SpectrumModel:
    """Diagonal model: ``levels`` holds (eigenvalue, complex amplitude) pairs."""

    levels: tuple


@dataclass(frozen=True)
class RandomModel:
    seed: int
    dim: int


def build_model(spec: Union[SpectrumModel, RandomModel]) -> QuantumModel:
    if isinstance(spec, SpectrumModel):
        if not spec.levels:
            raise InvalidSpec("spectrum model needs at least one level")
        energies = np.array([float(e) for e, _ in spec.levels])
        amps = np.array([complex(a) for _, a in spec.levels])
        norm = np.linalg.norm(amps)
        if not norm > 0 or not np.isfinite(norm):
            raise InvalidSpec("amplitudes are not normalizable")
        return QuantumModel(np.diag(energies).astype(np.complex128), amps / norm)
    if isinstance(spec, RandomModel):
        if spec.dim < 2:
            raise InvalidSpec("random models need dim >= 2")
        rng = np.random.default_rng(spec.seed)
        a = rng.standard_normal((spec.dim, spec.dim)) + 1j * rng.standard_normal((spec.dim, spec.dim))
        h = (a + a.conj().T) / 2
        z = rng.standard_normal(spec.dim) + 1j * rng.standard_normal(spec.dim)
        return QuantumModel(h, z / np.linalg.norm(z))
    raise InvalidSpec(f"unknown model spec {spec!r}")


def g(x: np.ndarray, y: np.ndarray) -> float:
    """Real metric: Re <x|y>."""
    return float(np.real(np.vdot(x, y)))


@dataclass(frozen=True)
class DerivativeFrame:
    """Derivatives of the trajectory and their odd-order Gram-Schmidt frame.

    ``psi[i]``, ``measured_N[i]`` and ``coeffs[i]`` belong to k = 2i + 1.
    ``projections[i, j]`` is the measured coefficient of ``Psi_(2j+1)`` in
    ``xi^(2i+1)``; ``coeffs[i, j]`` the coefficient of ``xi^(2j+1)`` in
    ``Psi_(2i+1)``. ``vanished_at`` is the first odd k whose ``Psi_k``
    vanished; its row is filled but excluded from :attr:`k_valid`.
    """

    n_max: int
    xi_derivs: np.ndarray
    psi: np.ndarray
    measured_N: np.ndarray
    measured_mu: MomentSequence
    coeffs: np.ndarray
    projections: np.ndarray
    vanished_at: Optional[int] = None

    @property
    def k_valid(self) -> list:
        """Odd k whose Psi_k is nonvanishing."""
        count = len(self.measured_N) if self.vanished_at is None else (self.vanished_at - 1) // 2
        return [2 * i + 1 for i in range(count)]


def _stack_real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=-1)


def derivative_frame(model: QuantumModel, n_max: int) -> DerivativeFrame:
    if n_max < 1 or n_max % 2 == 0:
        raise ValueError(f"n_max must be a positive odd integer, got {n_max}")
    gen = 1j * model.deviation()
    xs = [model.state.copy()]
    for _ in range(n_max):
        xs.append(gen @ xs[-1])
    xs = np.array(xs)

    mu = np.zeros(2 * n_max + 1)
    for m in range(n_max + 1):
        mu[2 * m] = g(xs[m], xs[m])
        if m < n_max:
            # <xi^(m)|xi^(m+1)> = i mu_(2m+1)
            mu[2 * m + 1] = float(np.imag(np.vdot(xs[m], xs[m + 1])))
    mu[1] = 0.0
    measured_mu = MomentSequence(tuple(float(x) for x in mu))

    odd = xs[1::2]
    ks = np.arange(1, n_max + 1, 2)
    thresholds = VANISH_EPS * np.array([mu[2 * k] for k in ks])
    psi_r, proj, norms, count = _kernels.mgs_reorth(_stack_real(odd), thresholds)
    d = model.dim
    psi = psi_r[:, :d] + 1j * psi_r[:, d:]
    rows = min(count + 1, len(ks))

    coeffs = np.zeros((len(ks), len(ks)))
    for i in range(rows):
        coeffs[i, i] = 1.0
        for j in range(i):
            coeffs[i] -= proj[i, j] * coeffs[j]
    vanished_at = int(ks[count]) if count < len(ks) else None
    return DerivativeFrame(
        n_max=n_max,
        xi_derivs=xs,
        psi=psi[:rows],
        measured_N=norms[:rows],
        measured_mu=measured_mu,
        coeffs=coeffs[:rows, :rows],
        projections=proj[:rows, :rows],
        vanished_at=vanished_at,
    )


def _coefficient_numerator(frame: DerivativeFrame, i: int) -> float:
    mu = frame.measured_mu
    total = 0.0
    for jj in range(i + 1):
        j = 2 * jj + 1
        moment = 1.0 if j == 1 else mu[j - 1]  # mu_0 = 1 by definition, not as measured
        total += frame.coeffs[i, jj] * sign_power((j - 1) // 2) * j * moment
    return total


def expansion_numerators(frame: DerivativeFrame, k_max: Optional[int] = None) -> list:
    """U_k = sum_j c_j (-1)**((j-1)/2) j mu_(j-1) over the measured expansion.

    Returns values for k = 1, 3, ..., k_max (default: every nonvanishing k).
    Asking past a vanished ``Psi_k`` raises :class:`DegenerateFrame`.
    """
    valid = frame.k_valid
    if k_max is None:
        k_max = valid[-1] if valid else 0
    if frame.vanished_at is not None and k_max >= frame.vanished_at:
        raise DegenerateFrame(f"Psi_{frame.vanished_at} vanished; U_{k_max} is undefined")
    return [_coefficient_numerator(frame, (k - 1) // 2) for k in range(1, k_max + 1, 2)]


def expectation_and_variance(model: QuantumModel, observable) -> tuple[float, float]:
    x = np.asarray(observable, dtype=np.complex128)
    if x.shape != (model.dim, model.dim):
        raise InvalidSpec("observable shape does not match the model")
    if not _is_hermitian(x):
        raise NonHermitian("observable is not Hermitian")
    xi = model.state
    mean = g(xi, x @ xi) / g(xi, xi)
    dev = x @ xi - mean * xi
    return mean, g(dev, dev) / g(xi, xi)


def evolve(model: QuantumModel, t: float) -> np.ndarray:
    """xi(t) = exp(i t H~) xi(0) by eigendecomposition."""
    w, v = np.linalg.eigh(model.deviation())
    return v @ (np.exp(1j * t * w) * (v.conj().T @ model.state))


def fisher_information(model: QuantumModel, t: float = 0.0) -> float:
    """4 g(xi', xi') at time t; equals 4 Var(H) and is constant in t."""
    xi = evolve(model, t) if t else model.state
    vel = 1j * (model.deviation() @ xi)
    return 4.0 * g(vel, vel)


# ---------------------------------------------------------------------------
# cross validation
# ---------------------------------------------------------------------------

def rel_err(measured, expected) -> float:
    measured, expected = float(measured), float(expected)
    if expected == 0.0:
        return abs(measured)
    return abs(measured - expected) / abs(expected)


@dataclass
class TermCheck:
    k: int
    n_err: float
    u_err: float
    f_err: float


@dataclass
class ValidationReport:
    dim: int
    k_max: int
    tolerance: float
    mu_err: float = 0.0
    terms: list = field(default_factory=list)
    frame_vanished_at: Optional[int] = None
    engine_status: Optional[str] = None
    engine_stopped_at: Optional[int] = None
    frame_status: Optional[str] = None
    consistent: bool = True
    variance_zero: bool = False
    error: Optional[str] = None

    @property
    def worst(self) -> dict:
        return {
            "mu": self.mu_err,
            "N": max((t.n_err for t in self.terms), default=0.0),
            "F": max((t.f_err for t in self.terms), default=0.0),
            "U": max((t.u_err for t in self.terms), default=0.0),
        }

    @property
    def failures(self) -> list:
        out = [f"{name} rel err {err:.3e} at k<={self.k_max}" for name, err in self.worst.items() if not err < self.tolerance]
        if not self.consistent:
            out.append(
                f"degeneracy mismatch: frame {self.frame_status} at k={self.frame_vanished_at}, "
                f"engine {self.engine_status} at k={self.engine_stopped_at}"
            )
        if self.error:
            out.append(self.error)
        return out

    @property
    def passed(self) -> bool:
        return not self.failures


def cross_validate(model: QuantumModel, k_max: int, tolerance: float = 1e-8) -> ValidationReport:
    """Compare the determinant formulas with measured frame geometry.

    Spectral moments (from the eigendecomposition of H) feed the bound
    engine; the frame supplies norms, projection coefficients, numerators and
    moments measured on the derivative vectors themselves.
    """
    report = ValidationReport(model.dim, k_max, tolerance)
    frame = derivative_frame(model, k_max)
    spectral = moments_of(model.spectrum(), 2 * k_max)
    var = spectral[2]
    report.mu_err = max(rel_err(frame.measured_mu[2 * m], spectral[2 * m]) for m in range(k_max + 1))

    if not var > 0 or frame.measured_mu[2] == 0:
        report.variance_zero = True
        report.frame_vanished_at = frame.vanished_at
        return report

    try:
        series = bound_series(spectral, k_max)
    except GhrError as exc:
        report.error = f"bound engine failed: {exc}"
        return report
    stop = series.terms[-1]
    if stop.status is not Status.REGULAR:
        report.engine_status = str(stop.status)
        report.engine_stopped_at = stop.k

    for k in frame.k_valid:
        if report.engine_stopped_at is not None and k >= report.engine_stopped_at:
            break
        i = (k - 1) // 2
        n_err = rel_err(frame.measured_N[i], orthogonal_norm(spectral, k))
        u_err = rel_err(_coefficient_numerator(frame, i), numerator_U(spectral, k))
        f_err = max(
            (rel_err(frame.projections[i, jj], projection_coefficient(spectral, k, 2 * jj + 1)) for jj in range(i)),
            default=0.0,
        )
        report.terms.append(TermCheck(k, n_err, u_err, f_err))

    report.frame_vanished_at = frame.vanished_at
    if frame.vanished_at is not None:
        k = frame.vanished_at
        u = _coefficient_numerator(frame, (k - 1) // 2)
        divergent = abs(u) > NUMERATOR_EPS * k * frame.measured_mu[k - 1]
        report.frame_status = str(Status.DIVERGENT if divergent else Status.TRUNCATED)
    report.consistent = (
        report.frame_vanished_at == report.engine_stopped_at and report.frame_status == report.engine_status
    )
    return report


@dataclass
class EnsembleResult:
    runs: list  # (dim, seed, ValidationReport)

    @property
    def passed(self) -> bool:
        return all(r.passed for _, _, r in self.runs)

    def worst(self) -> dict:
        out = {"mu": 0.0, "N": 0.0, "F": 0.0, "U": 0.0}
        for _, _, r in self.runs:
            for key, val in r.worst.items():
                out[key] = max(out[key], val)
        return out


def run_ensemble(dims: Iterable[int], seeds: Sequence[int], k_max: int, tolerance: float = 1e-8) -> EnsembleResult:
    """Cross-validate seeded random models; results keep (dim, seed) input order."""
    runs = []
    for dim in dims:
        for seed in seeds:
            model = build_model(RandomModel(seed, dim))
            runs.append((dim, seed, cross_validate(model, k_max, tolerance)))
    return EnsembleResult(runs)


def frame_capacity(model: QuantumModel, tol: float = 1e-9) -> int:
    """Dimension of the odd-derivative span.

    Odd derivatives are H~ p(H~**2) xi, so the count is the number of distinct
    nonzero (E - <H>)**2 over levels carrying weight.
    """
    spec = model.spectrum()
    mean = model.mean_energy()
    scale = max([abs(e - mean) for e, _ in spec.levels] + [1.0])
    squares = sorted((e - mean) ** 2 for e, p in spec.levels if p > tol and abs(e - mean) > tol * scale)
    distinct = 0
    for i, s2 in enumerate(squares):
        if i == 0 or s2 - squares[i - 1] > tol * scale**2:
            distinct += 1
    return distinct
