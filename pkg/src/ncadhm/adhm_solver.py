"""Numerical solution of the deformed ADHM equations.

The equations are solved over the real and imaginary parts of (B1, B2, I, J)
with a Levenberg-Marquardt iteration on the stacked residual vector: the 2k^2
real components of the complex equation plus the k^2 real components of the
Hermitian one.  The same Jacobian feeds the moduli-dimension analysis, which
counts null directions of the constraint map at a solution and splits off
the gauge orbit and the global frame rotations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hopf_twist import TwistModel
from .monad import ADHMData, ShapeError, adhm_residual, _dag


class NoConvergence(Exception):
    def __init__(self, message, best_residual=None, best=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best = best


class NotASolution(Exception):
    pass


@dataclass
class SolveConfig:
    max_iterations: int = 200
    damping: float = 1e-3
    tolerance: float = 1e-12
    multistarts: int = 8
    rng_seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.multistarts < 1:
            raise ValueError("multistarts must be >= 1")


@dataclass
class JacobianAnalysis:
    singular_values: np.ndarray
    rank_threshold: float
    raw_nullity: int
    framed_dimension: int
    gauge_dimension: int
    frame_rotation_rank: int
    degenerate: bool = False

    def to_json_dict(self):
        return {"singular_values": [float(s) for s in self.singular_values],
                "rank_threshold": float(self.rank_threshold),
                "raw_nullity": int(self.raw_nullity),
                "framed_dimension": int(self.framed_dimension),
                "gauge_dimension": int(self.gauge_dimension),
                "frame_rotation_rank": int(self.frame_rotation_rank),
                "degenerate": bool(self.degenerate)}


# -- residual and Jacobian ------------------------------------------------------

def _herm_components(h):
    """Independent real components of a Hermitian k x k matrix (k^2 of them)."""
    k = h.shape[0]
    out = [h[i, i].real for i in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            out.extend([h[i, j].real, h[i, j].imag])
    return out


def residual_vector(data: ADHMData) -> np.ndarray:
    mu = data.model.mu
    B1, B2, I, J = data.B1, data.B2, data.I, data.J
    ceq = np.conj(mu) * B1 @ B2 - mu * B2 @ B1 + I @ J
    herm = (B1 @ _dag(B1) - _dag(B1) @ B1 + B2 @ _dag(B2) - _dag(B2) @ B2
            + I @ _dag(I) - _dag(J) @ J
            - data.model.zeta_level * np.eye(data.k))
    return np.concatenate([ceq.real.ravel(), ceq.imag.ravel(),
                           np.array(_herm_components(herm))])


def _directional_derivative(data: ADHMData, delta: ADHMData) -> np.ndarray:
    mu = data.model.mu
    B1, B2, I, J = data.B1, data.B2, data.I, data.J
    dB1, dB2, dI, dJ = delta.B1, delta.B2, delta.I, delta.J
    dceq = (np.conj(mu) * (dB1 @ B2 + B1 @ dB2)
            - mu * (dB2 @ B1 + B2 @ dB1) + dI @ J + I @ dJ)
    dherm = (dB1 @ _dag(B1) + B1 @ _dag(dB1) - _dag(dB1) @ B1 - _dag(B1) @ dB1
             + dB2 @ _dag(B2) + B2 @ _dag(dB2) - _dag(dB2) @ B2 - _dag(B2) @ dB2
             + dI @ _dag(I) + I @ _dag(dI) - _dag(dJ) @ J - _dag(J) @ dJ)
    return np.concatenate([dceq.real.ravel(), dceq.imag.ravel(),
                           np.array(_herm_components(dherm))])


def constraint_jacobian(data: ADHMData) -> np.ndarray:
    """Exact real Jacobian of the 3k^2 constraints in the 4k^2+8k variables."""
    k = data.k
    nvars = 4 * k * k + 8 * k
    cols = []
    for i in range(nvars):
        v = np.zeros(nvars)
        v[i] = 1.0
        delta = ADHMData.from_parameter_vector(k, data.model, v)
        cols.append(_directional_derivative(data, delta))
    return np.array(cols).T


# -- Levenberg-Marquardt ---------------------------------------------------------

def _lm_minimize(data: ADHMData, cfg: SolveConfig):
    lam = cfg.damping
    r = residual_vector(data)
    cost = float(r @ r)
    history = [np.sqrt(cost)]
    for _ in range(cfg.max_iterations):
        if _residual_sum(data) <= cfg.tolerance:
            break
        Jm = constraint_jacobian(data)
        g = Jm.T @ r
        A = Jm.T @ Jm
        diag = np.diag(A).copy()
        diag[diag < 1e-12] = 1e-12
        accepted = False
        for _ in range(60):
            step = np.linalg.solve(A + lam * np.diag(diag), -g)
            cand = ADHMData.from_parameter_vector(
                data.k, data.model, data.parameter_vector() + step)
            rc = residual_vector(cand)
            cc = float(rc @ rc)
            if cc < cost:
                data, r, cost = cand, rc, cc
                lam = max(lam / 3.0, 1e-14)
                accepted = True
                break
            lam *= 10.0
            if lam > 1e12:
                break
        history.append(np.sqrt(cost))
        if not accepted:
            break
    return data, history


def _residual_sum(data: ADHMData) -> float:
    c, h = adhm_residual(data)
    return c + h


def solve(k: int, model: TwistModel, zeta: float | None = None,
          cfg: SolveConfig | None = None) -> ADHMData:
    """Best-of-multistarts solution of the model's ADHM equations.

    ``zeta`` defaults to the model's deformation level and is validated
    against it otherwise.  Deterministic for a fixed config and seed; ties
    between starts break on residual, then on parameter norm.
    """
    if k < 1:
        raise ShapeError("k must be >= 1")
    cfg = cfg or SolveConfig()
    if zeta is not None and abs(zeta - model.zeta_level) > 1e-12:
        raise ShapeError(
            f"zeta {zeta} does not match the model level {model.zeta_level}")
    scale = max(1.0, np.sqrt(abs(model.zeta_level)))
    best = None
    best_key = None
    rng = np.random.default_rng(cfg.rng_seed)
    for start in range(cfg.multistarts):
        child = np.random.default_rng(rng.integers(0, 2 ** 63 - 1))

        def gauss(shape):
            return scale * (child.standard_normal(shape)
                            + 1j * child.standard_normal(shape))

        init = ADHMData(k, model, gauss((k, k)), gauss((k, k)),
                        gauss((k, 2)), gauss((2, k)))
        cand, _ = _lm_minimize(init, cfg)
        key = (_residual_sum(cand), float(np.linalg.norm(
            cand.parameter_vector())))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    if best_key[0] > cfg.tolerance:
        raise NoConvergence(
            f"best residual {best_key[0]:.3e} above tolerance "
            f"{cfg.tolerance:.1e}", best_residual=best_key[0], best=best)
    return best


def solve_history(k, model, cfg=None):
    """Single-start run returning the accepted-step residual history."""
    cfg = cfg or SolveConfig(multistarts=1)
    rng = np.random.default_rng(cfg.rng_seed)
    scale = max(1.0, np.sqrt(abs(model.zeta_level)))

    def gauss(shape):
        return scale * (rng.standard_normal(shape)
                        + 1j * rng.standard_normal(shape))

    init = ADHMData(k, model, gauss((k, k)), gauss((k, k)),
                    gauss((k, 2)), gauss((2, k)))
    return _lm_minimize(init, cfg)


# -- gauge distance ----------------------------------------------------------------

def _unitary_from_params(x, k):
    """exp of the antihermitian matrix packed in k^2 real parameters."""
    H = np.zeros((k, k), dtype=complex)
    at = 0
    for i in range(k):
        H[i, i] = x[at]
        at += 1
    for i in range(k):
        for j in range(i + 1, k):
            H[i, j] = x[at] + 1j * x[at + 1]
            H[j, i] = x[at] - 1j * x[at + 1]
            at += 2
    w, V = np.linalg.eigh(H)
    return V @ np.diag(np.exp(1j * w)) @ _dag(V)


def _gauge_objective(a: ADHMData, b: ADHMData, g) -> float:
    gb = b.gauge_apply(g)
    return (np.linalg.norm(a.B1 - gb.B1) ** 2
            + np.linalg.norm(a.B2 - gb.B2) ** 2
            + np.linalg.norm(a.I - gb.I) ** 2
            + np.linalg.norm(a.J - gb.J) ** 2)


def _gauge_summed_norm(a: ADHMData, b: ADHMData, g) -> float:
    gb = b.gauge_apply(g)
    return (np.linalg.norm(a.B1 - gb.B1) + np.linalg.norm(a.B2 - gb.B2)
            + np.linalg.norm(a.I - gb.I) + np.linalg.norm(a.J - gb.J))


def _procrustes_init(a: ADHMData, b: ADHMData):
    """Unitary maximizing the linear part of the I/J alignment."""
    M = b.I @ _dag(a.I) + _dag(b.J) @ a.J
    U, _, Vh = np.linalg.svd(M)
    return _dag(U @ Vh)


def gauge_distance(a: ADHMData, b: ADHMData, multistarts: int = 6,
                   rng_seed: int = 0, iterations: int = 300) -> float:
    """min over U(k) of the summed Frobenius distance between a and g . b.

    Nelder-Mead-free: damped Gauss-Newton on the k^2 gauge parameters from
    several starts (identity, the I/J Procrustes alignment, random).
    """
    if a.k != b.k or a.model.kind != b.model.kind:
        raise ShapeError("gauge distance needs matching k and model")
    k = a.k
    n = k * k
    rng = np.random.default_rng(rng_seed)
    starts = [np.zeros(n)]
    try:
        g0 = _procrustes_init(a, b)
        w, V = np.linalg.eig(g0)
        H = V @ np.diag(np.angle(w)) @ np.linalg.inv(V)
        x0 = []
        for i in range(k):
            x0.append(H[i, i].real)
        for i in range(k):
            for j in range(i + 1, k):
                x0.extend([H[i, j].real, H[i, j].imag])
        starts.append(np.array(x0))
    except np.linalg.LinAlgError:
        pass
    for _ in range(multistarts - len(starts)):
        starts.append(rng.standard_normal(n) * np.pi / 2)

    best = np.inf
    for x in starts:
        x = x.copy()
        f = _gauge_objective(a, b, _unitary_from_params(x, k))
        step = 0.5
        for _ in range(iterations):
            grad = np.zeros(n)
            eps = 1e-6
            for i in range(n):
                xp = x.copy()
                xp[i] += eps
                grad[i] = (_gauge_objective(a, b, _unitary_from_params(xp, k))
                           - f) / eps
            gn = np.linalg.norm(grad)
            if gn < 1e-14:
                break
            improved = False
            for _ in range(40):
                xc = x - step * grad / max(gn, 1e-30)
                fc = _gauge_objective(a, b, _unitary_from_params(xc, k))
                if fc < f:
                    x, f = xc, fc
                    step *= 1.3
                    improved = True
                    break
                step *= 0.5
                if step < 1e-15:
                    break
            if not improved:
                break
        best = min(best, _gauge_summed_norm(a, b, _unitary_from_params(x, k)))
    return float(best)


# -- moduli dimensions ----------------------------------------------------------

def _gauge_tangent_vectors(data: ADHMData) -> np.ndarray:
    """Tangent directions of the U(k) orbit, one row per u(k) basis element."""
    k = data.k
    rows = []
    basis = []
    for i in range(k):
        H = np.zeros((k, k), dtype=complex)
        H[i, i] = 1j
        basis.append(H)
    for i in range(k):
        for j in range(i + 1, k):
            H = np.zeros((k, k), dtype=complex)
            H[i, j] = 1.0
            H[j, i] = -1.0
            basis.append(H)
            H = np.zeros((k, k), dtype=complex)
            H[i, j] = 1j
            H[j, i] = 1j
            basis.append(H)
    for X in basis:
        d = ADHMData(k, data.model, X @ data.B1 - data.B1 @ X,
                     X @ data.B2 - data.B2 @ X, X @ data.I, -data.J @ X)
        rows.append(d.parameter_vector())
    return np.array(rows)


def _frame_tangent_vectors(data: ADHMData) -> np.ndarray:
    """Tangent directions of the global su(2) frame rotations on (I, J)."""
    k = data.k
    paulis = [np.array([[0, 1], [1, 0]], dtype=complex),
              np.array([[0, -1j], [1j, 0]], dtype=complex),
              np.array([[1, 0], [0, -1]], dtype=complex)]
    rows = []
    for s in paulis:
        X = 1j * s
        d = ADHMData(k, data.model, np.zeros((k, k)), np.zeros((k, k)),
                     data.I @ X, -X @ data.J)
        rows.append(d.parameter_vector())
    return np.array(rows)


def moduli_dimension(data: ADHMData, residual_tol: float = 1e-10,
                     rank_factor: float = 1e-7) -> JacobianAnalysis:
    """Null-space dimensions of the constraint map at a solution."""
    if _residual_sum(data) > residual_tol:
        raise NotASolution(
            f"residual {_residual_sum(data):.3e} above {residual_tol:.1e}")
    k = data.k
    Jm = constraint_jacobian(data)
    sv = np.linalg.svd(Jm, compute_uv=False)
    smax = sv[0] if len(sv) else 0.0
    thr = rank_factor * smax
    rank = int(np.sum(sv >= thr)) if smax > 0 else 0
    nvars = 4 * k * k + 8 * k
    raw_nullity = nvars - rank
    gauge_dim = k * k
    framed = raw_nullity - gauge_dim

    G = _gauge_tangent_vectors(data)
    F = _frame_tangent_vectors(data)
    # project the frame directions off the gauge tangent space
    if np.linalg.norm(G) > 0:
        Q, _ = np.linalg.qr(G.T)
        F_perp = F - (F @ Q) @ Q.T
    else:
        F_perp = F
    fsv = np.linalg.svd(F_perp, compute_uv=False)
    fscale = max(np.linalg.norm(F), 1e-30)
    frame_rank = int(np.sum(fsv >= 1e-7 * fscale))

    return JacobianAnalysis(
        singular_values=sv, rank_threshold=thr, raw_nullity=raw_nullity,
        framed_dimension=framed, gauge_dimension=gauge_dim,
        frame_rotation_rank=frame_rank,
        degenerate=rank < 3 * k * k)
