"""Numerical certificates for structural properties of the billiard map.

Each check samples random phase points (deterministically seeded), measures a
residual that is exactly zero for the true dynamics, and reports the worst
case together with error quantiles.  Samples on which the map is undefined
(escape, corner, grazing) are skipped and counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collision import MassParams
from .dynamics import (State, TrajectoryRecord, billiard_map, random_state,
                       reverse_state)
from .errors import BilliardError
from .geometry import Table, frame_at

__all__ = [
    "CheckReport", "check_reversibility", "check_measure_invariance",
    "check_eigen_structure", "check_energy",
]

_QUANTS = (0.5, 0.9, 0.99, 1.0)


@dataclass
class CheckReport:
    check_name: str
    samples: int
    skipped: int
    max_error: float
    tol: float
    passed: bool
    quantiles: dict = field(default_factory=dict)
    detail: str = ""

    def to_json_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "samples": self.samples,
            "skipped": self.skipped,
            "max_error": self.max_error,
            "tol": self.tol,
            "passed": self.passed,
            "quantiles": self.quantiles,
            "detail": self.detail,
        }


def _finish(name: str, errors: list[float], skipped: int, tol: float,
            detail: str = "") -> CheckReport:
    if errors:
        arr = np.array(errors)
        quants = {f"q{q}": float(np.quantile(arr, q)) for q in _QUANTS}
        max_err = float(arr.max())
    else:
        quants = {}
        max_err = math.inf
    return CheckReport(check_name=name, samples=len(errors), skipped=skipped,
                       max_error=max_err, tol=tol,
                       passed=bool(errors) and max_err <= tol,
                       quantiles=quants, detail=detail)


def _state_distance(a: State, b: State) -> float:
    dp = float(np.max(np.abs(a.loc.position - b.loc.position)))
    dv = float(np.max(np.abs(a.v - b.v)))
    return max(dp, dv)


def check_reversibility(table: Table, params: MassParams,
                        n_samples: int = 200, tol: float = 1e-9,
                        seed: int = 0,
                        reversal_params: MassParams | None = None) -> CheckReport:
    """Certify R T R T = identity where R(q, v) = (q, -C_q v).

    Passing a different ``reversal_params`` deliberately breaks the involution
    and serves as a negative control.
    """
    rev = reversal_params if reversal_params is not None else params
    rng = np.random.default_rng(seed)
    errors, skipped = [], 0
    while len(errors) < n_samples:
        xi = random_state(table, rng)
        try:
            eta, _ = billiard_map(table, params, xi)
            back, _ = billiard_map(table, params, reverse_state(rev, eta))
        except BilliardError:
            skipped += 1
            continue
        errors.append(_state_distance(reverse_state(rev, back), xi))
    return _finish("reversibility", errors, skipped, tol)


def _equal_area_coords(v: np.ndarray, frame) -> np.ndarray:
    """Area-preserving disc chart of the outgoing hemisphere about e3."""
    u = np.array([float(v @ frame.e1), float(v @ frame.e2)])
    v3 = float(v @ frame.e3)
    return u * math.sqrt(2.0 / (1.0 + v3))


def _state_from_equal_area(table: Table, piece_index: int, s: float,
                           a: np.ndarray) -> State:
    r2 = float(a @ a)
    if r2 >= 2.0:
        raise ValueError("equal-area coordinates out of range")
    loc = frame_at(table, piece_index, s)
    scale = math.sqrt(1.0 - 0.25 * r2)
    f = loc.frame
    v = a[0] * scale * f.e1 + a[1] * scale * f.e2 + (1.0 - 0.5 * r2) * f.e3
    return State(loc, v)


def check_measure_invariance(table: Table, params: MassParams,
                             n_samples: int = 100, tol: float = 1e-5,
                             fd_step: float = 1e-6, seed: int = 1,
                             specular: bool = False,
                             max_jacobian: float = 50.0) -> CheckReport:
    """Certify invariance of the cosine measure on boundary x hemisphere.

    In coordinates (s, a1, a2), with (a1, a2) the area-preserving disc chart
    of the velocity hemisphere, the invariant density is v.e3, so the residual
    | |det dT| * (v'.e3)/(v.e3) - 1 | must vanish.  The determinant is taken
    by central differences; samples whose finite-difference stencil is not
    contained in one smooth branch of the map, or whose Jacobian entries
    exceed ``max_jacobian`` (truncation error then swamps the tolerance at
    the fixed step size), are skipped and counted.
    """
    rng = np.random.default_rng(seed)
    piece_info = [(p.length, p.closed) for p in table.pieces]

    def image(piece_index, s, a):
        xi = _state_from_equal_area(table, piece_index, s, a)
        eta, _ = billiard_map(table, params, xi, specular=specular)
        return (eta.loc.piece_index, eta.loc.s,
                _equal_area_coords(eta.v, eta.loc.frame), eta)

    errors, skipped = [], 0
    attempts = 0
    while len(errors) < n_samples and attempts < 50 * n_samples:
        attempts += 1
        xi = random_state(table, rng)
        s0 = xi.loc.s
        a0 = _equal_area_coords(xi.v, xi.loc.frame)
        k = xi.loc.piece_index
        try:
            k_im, _, _, eta = image(k, s0, a0)
        except (BilliardError, ValueError):
            skipped += 1
            continue
        cols = []
        ok = True
        for j in range(3):
            probes = []
            for sign in (1.0, -1.0):
                s, a = s0, a0.copy()
                if j == 0:
                    s = s + sign * fd_step
                    length, closed = piece_info[k]
                    if closed:
                        s %= length
                else:
                    a[j - 1] += sign * fd_step
                try:
                    kp, sp, ap, _ = image(k, s, a)
                except (BilliardError, ValueError):
                    ok = False
                    break
                if kp != k_im:
                    ok = False
                    break
                probes.append(np.array([sp, ap[0], ap[1]]))
            if not ok:
                break
            d = probes[0] - probes[1]
            length_im, closed_im = piece_info[k_im]
            if closed_im:
                d[0] = (d[0] + 0.5 * length_im) % length_im - 0.5 * length_im
            cols.append(d / (2.0 * fd_step))
        if not ok:
            skipped += 1
            continue
        jac = np.array(cols).T
        if float(np.max(np.abs(jac))) > max_jacobian:
            skipped += 1
            continue
        ratio = float(eta.v @ eta.loc.frame.e3) / float(xi.v @ xi.loc.frame.e3)
        errors.append(abs(abs(float(np.linalg.det(jac))) * ratio - 1.0))
    return _finish("measure_invariance", errors, skipped, tol)


def check_eigen_structure(matrix: np.ndarray, tol: float = 1e-6) -> CheckReport:
    """Certify the eigenvalue structure of a 4x4 orbit-segment derivative.

    Expects a double eigenvalue 1 from the flow and energy directions, plus a
    reciprocal pair: either real {r, 1/r} or a conjugate pair on the unit
    circle.
    """
    eigs = np.linalg.eigvals(np.asarray(matrix, dtype=float))
    order = np.argsort(np.abs(eigs - 1.0))
    unit_pair = eigs[order[:2]]
    other = eigs[order[2:]]
    err_unit = float(np.max(np.abs(unit_pair - 1.0)))
    err_recip = float(abs(other[0] * other[1] - 1.0))
    if abs(other[0].imag) <= tol:
        detail = "real reciprocal pair"
        err_case = float(max(abs(other[0].imag), abs(other[1].imag)))
    else:
        detail = "conjugate pair on the unit circle"
        err_case = float(max(abs(abs(other[0]) - 1.0), abs(abs(other[1]) - 1.0)))
    errors = [err_unit, err_recip, err_case]
    return _finish("eigen_structure", errors, 0, tol, detail=detail)


def check_energy(record: TrajectoryRecord, tol: float = 1e-12) -> CheckReport:
    """Certify that the speed stays exactly 1 along a recorded trajectory."""
    errors = [abs(float(np.linalg.norm(xi.v)) - 1.0) for xi in record.states]
    return _finish("energy", errors, 0, tol)
