"""Newton-Raphson refinement of a rover position from one RSSI value and a bearing.

The residual system is

    F1(x, y) = rssi_2d(AA, x, y, phi) - r_aa_measured
    F2(x, y) = atan2(y, x) - phi

with the analytic Jacobian derived directly from these expressions. No damping
or line search is applied; failures are reported through ``NewtonOutcome.status``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    PATH_LOSS_INTERCEPT,
    PATH_LOSS_OFFSET,
    PATH_LOSS_SLOPE,
    ModelDomainError,
)

_LOSS_DERIV = PATH_LOSS_SLOPE / math.log(10.0)


class NewtonStatus(str, enum.Enum):
    CONVERGED_STEP = "ConvergedStep"
    MAX_ITERATIONS = "MaxIterations"
    SINGULAR_JACOBIAN = "SingularJacobian"
    DIVERGED_NON_FINITE = "DivergedNonFinite"


class SingularJacobianError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NewtonConfig:
    step_tolerance: float = 1e-10
    max_iterations: int = 100
    fd_step: float = 1e-6

    def __post_init__(self):
        if not self.step_tolerance > 0:
            raise ValueError("step_tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be > 0")


@dataclass
class NewtonOutcome:
    solution: tuple[float, float]
    iterations: int
    status: NewtonStatus
    final_residual_norm: float
    step_norms: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is NewtonStatus.CONVERGED_STEP


def _check_candidate(x: float, y: float) -> None:
    if x == 0.0 and y == 0.0:
        raise ModelDomainError("residual system undefined at the origin")


def implied_distance(phi: float, r_aa_measured: float) -> float:
    """rho + 0.31 at which the AA model reproduces ``r_aa_measured``."""
    gain = 5.0 * (math.cos(2.0 * phi) - 1.0)
    return 10.0 ** ((gain + PATH_LOSS_INTERCEPT - r_aa_measured) / PATH_LOSS_SLOPE)


def residual(candidate: tuple[float, float], phi: float, r_aa_measured: float) -> tuple[float, float]:
    """(AA model minus measurement, bearing minus phi).

    F1 is evaluated as -(14.69/ln 10) * log1p((rho + 0.31 - D) / D), which
    equals rssi_2d(AA) - r_aa but keeps full relative precision near the root.
    The direct difference of two ~-120 dBm values floors the Newton step at
    ~1e-10 mm for ranges near 1e5 mm.
    """
    x, y = candidate
    _check_candidate(x, y)
    target = implied_distance(phi, r_aa_measured)
    rho = math.hypot(x, y)
    return (
        -_LOSS_DERIV * math.log1p((rho + PATH_LOSS_OFFSET - target) / target),
        math.atan2(y, x) - phi,
    )


def jacobian_analytic(candidate: tuple[float, float]) -> np.ndarray:
    x, y = candidate
    _check_candidate(x, y)
    rho = math.hypot(x, y)
    rho2 = rho * rho
    if rho2 == 0.0:
        raise ModelDomainError(f"Jacobian underflows at {candidate}")
    radial = -_LOSS_DERIV / (rho * (rho + PATH_LOSS_OFFSET))
    return np.array([[radial * x, radial * y], [-y / rho2, x / rho2]])


def jacobian_fd(
    candidate: tuple[float, float], phi: float, r_aa_measured: float, fd_step: float = 1e-6
) -> np.ndarray:
    """Central finite-difference Jacobian with step ``fd_step * |candidate|``."""
    x, y = candidate
    h = fd_step * math.hypot(x, y)
    jac = np.empty((2, 2))
    for col, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
        plus = residual((x + dx, y + dy), phi, r_aa_measured)
        minus = residual((x - dx, y - dy), phi, r_aa_measured)
        jac[:, col] = (np.array(plus) - np.array(minus)) / (2.0 * h)
    return jac


def solve_2x2(
    jac: np.ndarray, rhs: tuple[float, float], abs_tol: float = 1e-300, rel_tol: float = 1e-14
) -> tuple[float, float]:
    """Cramer's rule. Raises SingularJacobianError on a (near-)zero determinant.

    The relative test compares det against the product of the row magnitudes,
    so badly scaled but regular systems are not flagged.
    """
    (a, b), (c, d) = jac
    det = a * d - b * c
    scale = max(abs(a), abs(b)) * max(abs(c), abs(d))
    if not math.isfinite(det) or abs(det) <= abs_tol or abs(det) <= rel_tol * scale:
        raise SingularJacobianError(f"singular Jacobian, det={det!r}")
    r1, r2 = rhs
    return (r1 * d - b * r2) / det, (a * r2 - c * r1) / det


def newton_solve(
    initial: tuple[float, float],
    phi: float,
    r_aa_measured: float,
    config: NewtonConfig | None = None,
) -> NewtonOutcome:
    config = config or NewtonConfig()
    x, y = map(float, initial)
    _check_candidate(x, y)
    status = NewtonStatus.MAX_ITERATIONS
    steps: list[float] = []
    k = 0
    for k in range(1, config.max_iterations + 1):
        try:
            f1, f2 = residual((x, y), phi, r_aa_measured)
            dx, dy = solve_2x2(jacobian_analytic((x, y)), (-f1, -f2))
        except SingularJacobianError:
            status = NewtonStatus.SINGULAR_JACOBIAN
            break
        except ModelDomainError:
            # iterate hit the origin
            status = NewtonStatus.SINGULAR_JACOBIAN
            break
        x_new, y_new = float(x + dx), float(y + dy)
        step = math.hypot(dx, dy)
        if not (math.isfinite(x_new) and math.isfinite(y_new) and math.isfinite(step)):
            status = NewtonStatus.DIVERGED_NON_FINITE
            break
        x, y = x_new, y_new
        steps.append(step)
        if step < config.step_tolerance:
            status = NewtonStatus.CONVERGED_STEP
            break

    try:
        final = math.hypot(*residual((x, y), phi, r_aa_measured))
    except ModelDomainError:
        final = math.inf
    return NewtonOutcome(
        solution=(x, y),
        iterations=k,
        status=status,
        final_residual_norm=final,
        step_norms=steps,
    )
