"""
Integración numérica de paso fijo
=================================

✅ RK4 clásico sobre estado complejo (numpy complex128)
✅ Símbolos exponenciales E evaluados como exp(rate·t)
✅ Corte temprano por explosión (|estado| > SystemConfig.BLOWUP_THRESHOLD)
✅ Deriva de integrales primeras, orden observado y exponente de explosión
"""

import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import sympy

from core.algebra import RatExpr, to_complex
from core.config import SystemConfig
from core.errors import BlowUp, NonFiniteState, NotNumeric, NotPolynomial
from core.field import VField

logger = logging.getLogger(__name__)

RHS = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class Trajectory:
    """Muestras (t_k, x_k) de una integración."""

    variables: tuple[str, ...]
    times: np.ndarray
    states: np.ndarray
    step: float
    method: str = "rk4"
    blew_up: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.times)


# ==========================================
# COMPILACIÓN A NUMPY
# ==========================================


def _rates(v: VField) -> tuple[tuple[str, complex], ...]:
    return tuple((e.name, to_complex(e.rate)) for e in v.expsyms)


def _compile(
    expressions: Sequence[RatExpr],
    statevars: Sequence[str],
    rates: Sequence[tuple[str, complex]],
    what: str,
) -> Callable[[float, np.ndarray], np.ndarray]:
    """Lambdify de expresiones exactas; los E se calculan a partir de t."""
    allowed = set(statevars) | {name for name, _ in rates}
    for expr in expressions:
        stray = set(expr.variables) - allowed
        if stray:
            raise NotNumeric(f"{what}: unbound parameters {sorted(stray)}")

    args = [sympy.Symbol(name) for name in statevars] + [sympy.Symbol(n) for n, _ in rates]
    fn = sympy.lambdify(args, [expr.to_sympy() for expr in expressions], modules="numpy")
    rate_values = np.array([r for _, r in rates], dtype=complex)

    def evaluate(t: float, state: np.ndarray) -> np.ndarray:
        exps = np.exp(rate_values * t)
        return np.array(fn(*state, *exps), dtype=complex)

    return evaluate


def compile_field(v: VField, params: Mapping[str, Any] | None = None) -> RHS:
    """
    Convierte el campo en f(t, x) -> dx/dt complejo.

    Raises:
        NotNumeric: Si quedan parámetros sin valor
    """
    bound = v.with_params(params or {})
    if bound.params:
        raise NotNumeric(f"{v.name}: parameters without values {list(bound.params)}")
    return _compile(bound.components, bound.statevars, _rates(bound), v.name)


def rk4_step(f: RHS, t: float, state: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, state)
    k2 = f(t + h / 2, state + h / 2 * k1)
    k3 = f(t + h / 2, state + h / 2 * k2)
    k4 = f(t + h, state + h * k3)
    return state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


# ==========================================
# INTEGRACIÓN
# ==========================================


def integrate(
    v: VField,
    x0: Sequence[complex],
    t_span: tuple[float, float],
    step: float,
    params: Mapping[str, Any] | None = None,
    threshold: float | None = None,
    strict: bool = False,
) -> Trajectory:
    """
    Integra con RK4 de paso fijo desde t_span[0] hasta t_span[1].

    Args:
        v: Campo vectorial (parámetros fijados o dados en `params`)
        x0: Estado inicial
        t_span: (t0, t1) con t1 > t0
        step: Paso h > 0
        params: Valores de parámetros
        threshold: Cota de explosión; por defecto SystemConfig.BLOWUP_THRESHOLD
        strict: Lanza BlowUp en lugar de marcar la trayectoria

    Returns:
        Trajectory con `blew_up` si se detuvo antes de t1

    Raises:
        NotNumeric: Parámetros sin valor
        NonFiniteState: Si aparece NaN o infinito
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if step <= 0 or t1 <= t0:
        raise ValueError(f"invalid integration window {t_span} with step {step}")
    if len(x0) != v.dimension:
        raise ValueError(f"{v.name}: initial state has {len(x0)} entries, expected {v.dimension}")

    f = compile_field(v, params)
    limit = threshold or SystemConfig.BLOWUP_THRESHOLD
    n_steps = int(round((t1 - t0) / step))

    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, v.dimension), dtype=complex)
    times[0] = t0
    states[0] = np.asarray(x0, dtype=complex)
    trajectory = Trajectory(v.statevars, times, states, step)

    state = states[0]
    for k in range(n_steps):
        t = t0 + k * step
        state = rk4_step(f, t, state, step)
        if not np.all(np.isfinite(state)):
            raise NonFiniteState(f"{v.name}: non-finite state at t={t + step:.6g}")
        times[k + 1] = t0 + (k + 1) * step
        states[k + 1] = state
        if np.max(np.abs(state)) > limit:
            message = f"{v.name}: |state| exceeded {limit:.3g} at t={times[k + 1]:.6g}"
            if strict:
                raise BlowUp(message)
            logger.info("💥 %s", message)
            trajectory.times = times[: k + 2]
            trajectory.states = states[: k + 2]
            trajectory.blew_up = True
            trajectory.notes.append(message)
            break

    logger.debug("🔢 %s: %d RK4 steps (h=%g)", v.name, len(trajectory) - 1, step)
    return trajectory


def drift_check(
    traj: Trajectory,
    f: RatExpr,
    v: VField | None = None,
    params: Mapping[str, Any] | None = None,
) -> float:
    """
    Deriva máxima |F(t_k, x_k) - F(t_0, x_0)| de una integral primera.

    Args:
        traj: Trayectoria
        f: Integral primera (puede contener símbolos E)
        v: Campo de origen, para las tasas de los E
        params: Valores de parámetros presentes en f
    """
    expr = f.evaluate(params) if params else f
    rates = _rates(v) if v is not None else ()
    evaluate = _compile([expr], traj.variables, rates, "integral")
    values = np.array([evaluate(t, x)[0] for t, x in zip(traj.times, traj.states)])
    return float(np.max(np.abs(values - values[0])))


def convergence_order(
    v: VField,
    x0: Sequence[complex],
    t_end: float,
    step: float,
    params: Mapping[str, Any] | None = None,
) -> float:
    """
    Orden observado por Richardson con pasos h, h/2 y h/4.

    Returns:
        log2(|x_h - x_{h/2}| / |x_{h/2} - x_{h/4}|), ≈ 4 para RK4
    """
    finals = [
        integrate(v, x0, (0.0, t_end), step / 2**k, params).final_state for k in range(3)
    ]
    coarse = np.linalg.norm(finals[0] - finals[1])
    fine = np.linalg.norm(finals[1] - finals[2])
    if fine == 0:
        raise NotNumeric(f"{v.name}: step {step} already at round-off level")
    order = float(np.log2(coarse / fine))
    logger.info("📈 %s: observed order %.3f", v.name, order)
    return order


def _coefficient_value(c: Any, params: Mapping[str, Any] | None) -> complex:
    if isinstance(c, RatExpr):
        try:
            return to_complex(c.value_at(dict(params or {})))
        except (NotPolynomial, ZeroDivisionError) as e:
            raise NotNumeric(f"coefficient {c} needs parameter values") from e
    return to_complex(c)


def blowup_exponent(
    v: VField,
    exponents: Sequence[int],
    coefficients: Sequence[Any],
    params: Mapping[str, Any] | None = None,
    tau0: float = 1e-3,
    step: float | None = None,
    var: str | None = None,
) -> float:
    """
    Exponente de explosión ajustado a partir de datos iniciales de una rama.

    Arranca en t=0 con x = a·(-τ0)^-m (polo en t ≈ τ0), integra hasta el
    corte por explosión y ajusta la pendiente de log|x| contra log(τ0 - t).

    Args:
        v: Campo vectorial
        exponents: Exponentes m de cada variable
        coefficients: Coeficientes a (Q(i) o funciones racionales de los parámetros)
        params: Valores de los parámetros
        tau0: Distancia inicial al polo
        step: Paso RK4 (por defecto tau0·1e-4)
        var: Variable a ajustar (por defecto la primera)

    Returns:
        Pendiente, ≈ -m para la variable elegida
    """
    target = var or v.statevars[0]
    index = v.statevars.index(target)
    h = step or tau0 * 1e-4
    x0 = [
        _coefficient_value(c, params) * (-tau0) ** (-e)
        for c, e in zip(coefficients, exponents)
    ]
    traj = integrate(v, x0, (0.0, tau0 * (1 - 1e-3)), h, params)

    distance = tau0 - traj.times
    magnitude = np.abs(traj.states[:, index])
    window = distance > 0
    slope, _ = np.polyfit(np.log(distance[window]), np.log(magnitude[window]), 1)
    logger.info("💥 %s: fitted exponent of %s = %.4f", v.name, target, slope)
    return float(slope)


def export_csv(traj: Trajectory, path: str | Path) -> Path:
    """Escribe t y las partes real/imaginaria de cada variable."""
    path = Path(path)
    columns = [traj.times]
    header = ["t"]
    for j, name in enumerate(traj.variables):
        columns += [traj.states[:, j].real, traj.states[:, j].imag]
        header += [f"re_{name}", f"im_{name}"]
    np.savetxt(
        path,
        np.column_stack(columns),
        delimiter=",",
        header=",".join(header),
        comments="",
        fmt="%.17g",
    )
    return path
