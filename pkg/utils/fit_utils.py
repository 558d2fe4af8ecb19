"""
Ajuste por mínimos cuadrados ponderados del modelo de espín a trazas MORS.

Los parámetros positivos (scale, ε, Γ_com, Γ_pump) se optimizan en
coordenadas logarítmicas y las frecuencias en lineales. El optimizador es
`lmfit.Minimizer` con el método de región de confianza de scipy y
jacobiano por diferencias centrales (paso relativo 10⁻⁶).
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from lmfit import Minimizer, Parameters
from scipy.signal import find_peaks, peak_widths, savgol_filter
from scipy.stats import linregress, qmc

from models.errors import DomainError, InitializationError, MorsekitError, RegressionError
from models.fit import (
    LOG_PARAMETERS,
    PARAMETER_NAMES,
    ConsistencyReport,
    DegeneracyScan,
    FitProblem,
    FitResult,
)
from models.settings import settings
from models.species import CESIUM
from models.spin import SpinModel, geometric_weights, magnetic_numbers
from models.trace import SpectrumTrace
from utils.spectrum_utils import add_gaussian_noise, coherent_sum, dc_faraday, mors
from utils.spin_utils import coupling_weights, epsilon_from_orientation, line_table
from utils.zeeman_utils import qz_splitting

logger = logging.getLogger("Fitter")

RELATIVE_STEP = 1e-6

_LOG_FLOOR = {"scale": 1e-300, "epsilon": 1e-6, "gamma_com": 1e-3, "gamma_pump": 1e-3}
_STEP_FLOOR = {
    "scale": 1e-300,
    "epsilon": 1e-6,
    "gamma_com": 1.0,
    "gamma_pump": 1.0,
    "omega_center": 1.0,
    "omega_split": 1.0,
}
_ORIENTATION_LIMIT = 7.0


# === EVALUACIÓN DEL MODELO ===

def model_values(params: Dict[str, float], grid: np.ndarray, F: float = 4.0) -> np.ndarray:
    """scale·|Σ_m C²Δρ_m / (i(ω_m − ω) − Γ_m/2)|² con los seis parámetros naturales."""
    amplitude = coherent_sum(
        F,
        params["epsilon"],
        params["gamma_com"],
        params["gamma_pump"],
        params["omega_center"],
        params["omega_split"],
        grid,
    )
    return params["scale"] * (amplitude.real**2 + amplitude.imag**2)


def model_from_parameters(params: Dict[str, float], F: float = 4.0) -> SpinModel:
    """SpinModel con amplitude = 1 y N = sqrt(scale)."""
    return SpinModel.from_atom_number(
        float(np.sqrt(params["scale"])),
        params["epsilon"],
        F=F,
        gamma_com=max(params["gamma_com"], 0.0),
        gamma_pump=max(params["gamma_pump"], 0.0),
        omega_center=params["omega_center"],
        omega_split=params["omega_split"],
        amplitude=1.0,
    )


def parameters_from_model(model: SpinModel) -> Dict[str, float]:
    return {
        "scale": model.amplitude * model.atom_number**2,
        "epsilon": model.epsilon,
        "gamma_com": model.gamma_com,
        "gamma_pump": model.gamma_pump,
        "omega_center": model.omega_center,
        "omega_split": model.omega_split,
    }


def weights_for(trace: SpectrumTrace, scheme: str = "uniform", floor: Optional[float] = None) -> np.ndarray:
    """Pesos uniformes o tipo Poisson w = 1/max(y, piso)."""
    if scheme == "uniform":
        return np.ones_like(trace.values)
    if scheme == "poisson":
        level = floor if floor is not None else 1e-3 * float(np.max(np.abs(trace.values)))
        if level <= 0:
            raise DomainError("El piso de los pesos Poisson debe ser positivo")
        return 1.0 / np.maximum(trace.values, level)
    raise DomainError(f"Esquema de pesos desconocido '{scheme}' (uniform | poisson)")


# === COORDENADAS INTERNAS ===

class _Coordinates:
    """Traducción entre parámetros naturales y las variables de lmfit."""

    def __init__(self, free: Sequence[str], fixed: Dict[str, float], F: float, population_coordinate: str):
        self.free = list(free)
        self.fixed = dict(fixed)
        self.F = F
        self.population_coordinate = population_coordinate

    def internal_name(self, name: str) -> str:
        if name == "epsilon" and self.population_coordinate == "orientation":
            return "atanh_orientation"
        if name in LOG_PARAMETERS:
            return f"log_{name}"
        return name

    def to_internal(self, name: str, value: float) -> float:
        if name == "epsilon" and self.population_coordinate == "orientation":
            p = float(np.dot(magnetic_numbers(self.F), geometric_weights(self.F, value)) / self.F)
            return float(np.clip(np.arctanh(np.clip(p, -1 + 1e-15, 1 - 1e-15)), -_ORIENTATION_LIMIT, _ORIENTATION_LIMIT))
        if name in LOG_PARAMETERS:
            return float(np.log(max(value, _LOG_FLOOR[name])))
        return float(value)

    def to_natural(self, name: str, value: float) -> float:
        if name == "epsilon" and self.population_coordinate == "orientation":
            return epsilon_from_orientation(self.F, float(np.tanh(value)))
        if name in LOG_PARAMETERS:
            return float(np.exp(value))
        return float(value)

    def internal_bounds(self, name: str, bounds: Optional[Tuple[float, float]]) -> Tuple[float, float]:
        if name == "epsilon" and self.population_coordinate == "orientation":
            if bounds is None:
                return -_ORIENTATION_LIMIT, _ORIENTATION_LIMIT
            # ε alto ↔ p bajo
            return self.to_internal(name, bounds[1]), self.to_internal(name, bounds[0])
        if bounds is None:
            return -np.inf, np.inf
        low, high = bounds
        if name in LOG_PARAMETERS:
            return (np.log(low) if low > 0 else -np.inf), (np.log(high) if np.isfinite(high) else np.inf)
        return low, high

    def natural(self, internal: Dict[str, float]) -> Dict[str, float]:
        values = dict(self.fixed)
        for name in self.free:
            values[name] = self.to_natural(name, internal[self.internal_name(name)])
        return values


def _residual(params: Parameters, coords: _Coordinates, grid: np.ndarray, data: np.ndarray, sqrt_w: np.ndarray) -> np.ndarray:
    natural = coords.natural(params.valuesdict())
    return sqrt_w * (model_values(natural, grid, coords.F) - data)


def _build_parameters(coords: _Coordinates, start: Dict[str, float], bounds: Dict[str, Tuple[float, float]]) -> Parameters:
    params = Parameters()
    for name in coords.free:
        low, high = coords.internal_bounds(name, bounds.get(name))
        value = float(np.clip(coords.to_internal(name, start[name]), low, high))
        params.add(coords.internal_name(name), value=value, min=low, max=high, vary=True)
    return params


def _minimize(coords: _Coordinates, params: Parameters, grid: np.ndarray, data: np.ndarray, sqrt_w: np.ndarray):
    minimizer = Minimizer(_residual, params, fcn_args=(coords, grid, data, sqrt_w), nan_policy="raise")
    return minimizer.minimize(
        method="least_squares",
        jac="3-point",
        diff_step=RELATIVE_STEP,
        ftol=settings.fit_ftol,
        xtol=settings.fit_xtol,
        gtol=settings.fit_ftol,
        max_nfev=settings.fit_max_evaluations,
    )


# === SENSIBILIDADES ===

def sensitivity_matrix(
    params: Dict[str, float],
    names: Sequence[str],
    grid: np.ndarray,
    F: float = 4.0,
    relative_step: float = RELATIVE_STEP,
) -> np.ndarray:
    """
    Derivadas ∂MORS/∂θ por diferencias centrales (paso relativo), con cada
    columna normalizada a norma 1.
    """
    grid = np.asarray(grid, dtype=float)
    columns = []
    for name in names:
        step = relative_step * max(abs(params[name]), _STEP_FLOOR[name])
        up = dict(params, **{name: params[name] + step})
        down = dict(params, **{name: params[name] - step})
        columns.append((model_values(up, grid, F) - model_values(down, grid, F)) / (2.0 * step))
    matrix = np.column_stack(columns)
    norms = np.linalg.norm(matrix, axis=0)
    return matrix / np.where(norms > 0, norms, 1.0)


def singular_values(matrix: np.ndarray) -> np.ndarray:
    """Valores singulares en orden decreciente."""
    return np.linalg.svd(matrix, compute_uv=False)


# === INICIALIZACIÓN ===

def _smoothed(values: np.ndarray) -> np.ndarray:
    if values.size < 15:
        return values
    window = max(5, (values.size // 150) | 1)
    return savgol_filter(values, window, 3)


def _width_hz(trace: SpectrumTrace, values: np.ndarray, index: int) -> float:
    _, _, left, right = peak_widths(values, [index], rel_height=0.5)
    positions = np.arange(values.size)
    return float(np.interp(right[0], positions, trace.frequencies) - np.interp(left[0], positions, trace.frequencies))


def _epsilon_from_pair(F: float, m_low: float, height_low: float, height_high: float) -> float:
    """ε a partir de las alturas de las líneas m_low y m_low+1."""
    weights = coupling_weights(F)
    k = int(round(m_low + F))
    if height_low <= 0 or height_high <= 0:
        return 0.5
    ratio = np.sqrt(height_low / height_high) * weights[k + 1] / weights[k]
    return float(np.clip(ratio, 0.01, 100.0))


def initialize(
    trace: SpectrumTrace,
    F: float = 4.0,
    hyperfine_hz: float = CESIUM.hyperfine_splitting,
    prominence: float = 0.05,
) -> Dict[str, float]:
    """
    Semilla heurística de los seis parámetros.

    ω_split: mediana del espaciado entre máximos detectados (si hay uno solo,
    ν_QZ a la frecuencia de Larmor ≈ frecuencia del máximo). ω_center: el
    peine de 2F líneas se alinea con el máximo global probando cada posición
    y signo. Γ_com: FWHM del pico más alto. ε: razón de alturas del pico más
    alto y su vecino más alto (0.5 si no hay vecino). scale: altura.

    Raises:
        InitializationError: Traza plana, vacía o sin valores positivos
    """
    y = np.asarray(trace.values, dtype=float)
    f = trace.frequencies
    if y.size < 3 or np.max(y) <= 0 or np.ptp(y) == 0:
        raise InitializationError("La traza es plana o no tiene señal positiva")

    smooth = _smoothed(y)
    peaks, _ = find_peaks(smooth, prominence=prominence * float(np.max(smooth)))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(smooth))])
    tallest = int(peaks[np.argmax(smooth[peaks])])
    width = _width_hz(trace, smooth, tallest) if 0 < tallest < y.size - 1 else float(np.ptp(f) / 10.0)

    if peaks.size == 1:
        center = float(f[tallest])
        split = float(qz_splitting(abs(center), hyperfine_hz))
        seed = {
            "epsilon": 0.5,
            "gamma_com": max(width, 1e-3),
            "gamma_pump": 0.0,
            "omega_center": center,
            "omega_split": split,
        }
        logger.info(f"Un solo pico: ω_split inicial = ν_QZ({center:.1f} Hz) = {split:.3f} Hz")
    else:
        freqs = f[peaks]
        spacing = float(np.median(np.diff(freqs)))
        gamma = float(min(max(width, 1e-3), spacing))
        seed = _align_comb(trace, smooth, peaks, tallest, spacing, gamma, F)

    unit = dict(seed, scale=1.0)
    peak_model = float(np.max(model_values(unit, f, F)))
    seed["scale"] = float(np.max(y)) / peak_model if peak_model > 0 else 1.0
    logger.info(
        "Semilla: " + ", ".join(f"{k}={seed[k]:.6g}" for k in PARAMETER_NAMES)
    )
    return {k: seed[k] for k in PARAMETER_NAMES}


def _align_comb(
    trace: SpectrumTrace,
    smooth: np.ndarray,
    peaks: np.ndarray,
    tallest: int,
    spacing: float,
    gamma: float,
    F: float,
) -> Dict[str, float]:
    """Prueba cada posición del pico más alto dentro del peine y ambos signos de ω_split."""
    f = trace.frequencies
    y = trace.values
    f_top = float(f[tallest])
    neighbours = [int(p) for p in peaks if p != tallest and abs(abs(f[p] - f_top) - spacing) < 0.3 * spacing]
    neighbour = max(neighbours, key=lambda p: smooth[p]) if neighbours else None

    best: Optional[Tuple[float, Dict[str, float]]] = None
    for sign in (1.0, -1.0):
        split = sign * spacing
        for m_top in np.arange(-F, F - 0.5, 1.0):
            center = f_top - split * (m_top + 0.5)
            epsilon = 0.5
            if neighbour is not None:
                m_next = m_top + round((f[neighbour] - f_top) / split)
                if -F <= m_next <= F - 1:
                    if m_next < m_top:
                        epsilon = _epsilon_from_pair(F, m_next, smooth[neighbour], smooth[tallest])
                    else:
                        epsilon = _epsilon_from_pair(F, m_top, smooth[tallest], smooth[neighbour])
            candidate = {
                "epsilon": epsilon,
                "gamma_com": gamma,
                "gamma_pump": 0.0,
                "omega_center": float(center),
                "omega_split": float(split),
            }
            shape = model_values(dict(candidate, scale=1.0), f, F)
            peak = float(np.max(shape))
            if peak <= 0:
                continue
            cost = float(np.sum((shape * (np.max(y) / peak) - y) ** 2))
            if best is None or cost < best[0]:
                best = (cost, candidate)

    if best is None:
        raise InitializationError("No se pudo alinear el peine de líneas con la traza")
    return best[1]


# === AJUSTE ===

def _relative_residual(residual: np.ndarray, data: np.ndarray, sqrt_w: np.ndarray) -> float:
    norm = float(np.linalg.norm(sqrt_w * data))
    return float(np.linalg.norm(residual)) / norm if norm > 0 else float(np.linalg.norm(residual))


def _restart_box(coords: _Coordinates, best: Dict[str, float], bounds: Dict[str, Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    """Caja de muestreo en coordenadas internas alrededor del mejor punto."""
    lows, highs = [], []
    width = max(best.get("gamma_com", 1.0) + best.get("gamma_pump", 0.0), 1.0)
    for name in coords.free:
        value = coords.to_internal(name, best[name])
        if name == "epsilon" and coords.population_coordinate == "orientation":
            half = 1.0
        elif name in LOG_PARAMETERS:
            half = np.log(4.0)
        elif name == "omega_center":
            half = width
        else:
            half = max(0.5 * abs(best[name]), width)
        low, high = value - half, value + half
        b_low, b_high = coords.internal_bounds(name, bounds.get(name))
        lows.append(max(low, b_low))
        highs.append(min(high, b_high))
    return np.asarray(lows), np.asarray(highs)


def fit(problem: FitProblem) -> FitResult:
    """
    Minimizador local de Σ wᵢ (MORS(ωᵢ; θ) − yᵢ)².

    Si el ajuste no converge o el residuo relativo supera
    `settings.restart_threshold`, se relanza desde los puntos de un
    hipercubo latino (semilla fija) y se conserva el mejor. Con ecuaciones
    normales singulares o sensibilidades casi colineales se marca
    `degenerate` y se emite un warning.
    """
    trace = problem.trace
    grid, data = trace.frequencies, trace.values
    weights = problem.weights if problem.weights is not None else np.ones_like(data)
    sqrt_w = np.sqrt(weights)

    seed = dict(problem.initial) if problem.initial else initialize(trace, F=problem.F)
    start = {**seed, **problem.fixed_values}
    missing = [name for name in PARAMETER_NAMES if name not in start]
    if missing:
        raise DomainError(f"Faltan valores para: {missing}")
    for name in problem.free_parameters:
        if name in LOG_PARAMETERS and start[name] <= 0:
            start[name] = _LOG_FLOOR[name] if name != "gamma_pump" else max(0.05 * start.get("gamma_com", 1.0), 1e-3)

    fixed = {name: float(start[name]) for name in PARAMETER_NAMES if name not in problem.free_parameters}
    coords = _Coordinates(problem.free_parameters, fixed, problem.F, problem.population_coordinate)

    logger.info(f"Ajustando {len(grid)} puntos, libres: {problem.free_parameters}")
    result = _minimize(coords, _build_parameters(coords, start, problem.bounds), grid, data, sqrt_w)
    relative = _relative_residual(result.residual, data, sqrt_w)
    restarts_used = 0
    evaluations = int(result.nfev)

    if problem.restarts and (not result.success or relative > settings.restart_threshold):
        logger.warning(
            f"Ajuste inicial {'no convergió' if not result.success else f'con residuo relativo {relative:.3g}'}; "
            f"reiniciando desde {settings.restart_points} puntos"
        )
        best_natural = coords.natural(result.params.valuesdict())
        lows, highs = _restart_box(coords, best_natural, problem.bounds)
        sampler = qmc.LatinHypercube(d=len(coords.free), seed=0)
        samples = qmc.scale(sampler.random(settings.restart_points), lows, np.maximum(highs, lows + 1e-12))
        for sample in samples:
            params = _build_parameters(coords, start, problem.bounds)
            for name, value in zip(coords.free, sample):
                params[coords.internal_name(name)].set(value=float(value))
            try:
                candidate = _minimize(coords, params, grid, data, sqrt_w)
            except (MorsekitError, ValueError, np.linalg.LinAlgError) as e:
                logger.warning(f"Reinicio descartado: {e}")
                continue
            restarts_used += 1
            evaluations += int(candidate.nfev)
            better = (candidate.success and not result.success) or (
                candidate.success == result.success and candidate.chisqr < result.chisqr
            )
            if better:
                result = candidate
        relative = _relative_residual(result.residual, data, sqrt_w)

    natural = coords.natural(result.params.valuesdict())
    model = model_from_parameters(natural, problem.F)

    uncertainties = _uncertainties(coords, result, natural)
    sensitivity = sensitivity_matrix(natural, coords.free, grid, problem.F)
    svals = singular_values(sensitivity * sqrt_w[:, None])
    condition = float(svals[-1] / svals[0]) if svals[0] > 0 else 0.0
    degenerate = result.covar is None or condition < settings.degeneracy_condition
    if degenerate:
        logger.warning(
            f"Ecuaciones normales casi singulares (σ_min/σ_max = {condition:.2e}); "
            "los parámetros no son identificables por separado, ver degeneracy_scan"
        )

    rows = line_table(model)
    fit_result = FitResult(
        model=model,
        scale=natural["scale"],
        orientation=model.orientation,
        j_z=model.j_z,
        line_widths=[row["width_hz"] for row in rows],
        line_centers=[row["center_hz"] for row in rows],
        residual_norm=float(np.linalg.norm(result.residual)),
        relative_residual=relative,
        reduced_chi_square=float(result.redchi) if np.isfinite(result.redchi) else None,
        parameter_uncertainties=uncertainties,
        converged=bool(result.success),
        iterations=evaluations,
        restarts_used=restarts_used,
        degenerate=bool(degenerate),
        singular_values=[float(s) for s in svals],
        free_parameters=list(coords.free),
        message=str(result.message),
    )
    logger.info(
        f"Ajuste {'convergido' if fit_result.converged else 'NO convergido'}: "
        f"p={fit_result.orientation:.4f}, Γ_com={model.gamma_com:.3f} Hz, "
        f"ω_split={model.omega_split:.3f} Hz, residuo relativo={relative:.3e}"
    )
    return fit_result


def _uncertainties(coords: _Coordinates, result, natural: Dict[str, float]) -> Dict[str, Optional[float]]:
    """Errores locales (curvatura escalada por la varianza residual) en coordenadas naturales."""
    out: Dict[str, Optional[float]] = {}
    for name in coords.free:
        stderr = result.params[coords.internal_name(name)].stderr
        if stderr is None or not np.isfinite(stderr):
            out[name] = None
            continue
        if name == "epsilon" and coords.population_coordinate == "orientation":
            p = float(np.tanh(result.params[coords.internal_name(name)].value))
            sigma_p = (1.0 - p**2) * stderr
            out["orientation"] = float(sigma_p)
            out[name] = float(abs(_depsilon_dp(coords.F, p)) * sigma_p)
        elif name in LOG_PARAMETERS:
            out[name] = float(natural[name] * stderr)
        else:
            out[name] = float(stderr)
    if "epsilon" in coords.free and coords.population_coordinate == "epsilon" and out.get("epsilon") is not None:
        out["orientation"] = float(abs(_dp_depsilon(coords.F, natural["epsilon"])) * out["epsilon"])
    return out


def _orientation_of(F: float, epsilon: float) -> float:
    return float(np.dot(magnetic_numbers(F), geometric_weights(F, epsilon)) / F)


def _dp_depsilon(F: float, epsilon: float) -> float:
    h = RELATIVE_STEP * epsilon
    return (_orientation_of(F, epsilon + h) - _orientation_of(F, epsilon - h)) / (2.0 * h)


def _depsilon_dp(F: float, p: float) -> float:
    slope = _dp_depsilon(F, epsilon_from_orientation(F, p))
    return 1.0 / slope if slope != 0 else np.inf


# === CONSISTENCIA Y DEGENERACIÓN ===

def consistency_check(fits: Sequence, theta_dc: Sequence[float]) -> ConsistencyReport:
    """
    Recta de J_z ajustado frente a θ_DC.

    Raises:
        RegressionError: Longitudes distintas, menos de tres puntos o θ_DC sin dispersión
    """
    j_z = np.asarray([f.j_z if isinstance(f, FitResult) else float(f) for f in fits], dtype=float)
    theta = np.asarray(theta_dc, dtype=float)
    if j_z.size != theta.size:
        raise RegressionError(f"Longitudes distintas: {j_z.size} ajustes, {theta.size} ángulos")
    if j_z.size < 3:
        raise RegressionError("Se necesitan al menos tres puntos")
    if np.ptp(theta) == 0 or np.ptp(j_z) == 0:
        raise RegressionError("Dispersión degenerada: la regresión no está definida")

    line = linregress(theta, j_z)
    rms = float(np.sqrt(np.mean(j_z**2)))
    report = ConsistencyReport(
        slope=float(line.slope),
        intercept=float(line.intercept),
        intercept_ratio=abs(float(line.intercept)) / rms if rms > 0 else 0.0,
        correlation=float(line.rvalue),
        slope_stderr=float(line.stderr),
        points=int(j_z.size),
        negative_slope=bool(line.slope < 0),
    )
    if report.negative_slope:
        logger.warning(f"Pendiente negativa en J_z vs θ_DC ({report.slope:.4g}): datos anticorrelacionados")
    return report


def degeneracy_scan(
    trace: SpectrumTrace,
    p_grid: Sequence[float],
    F: float = 4.0,
) -> DegeneracyScan:
    """
    Para cada p fijo ajusta scale, Γ_pump y ω_center con Γ_com = ω_split = 0.
    Cada ajuste arranca desde el anterior.
    """
    f, y = trace.frequencies, trace.values
    if np.max(y) <= 0:
        raise InitializationError("La traza no tiene señal positiva")
    top = int(np.argmax(y))
    width = _width_hz(trace, y, top) if 0 < top < y.size - 1 else float(np.ptp(f) / 10.0)
    current = {"scale": 1.0, "gamma_pump": max(width, 1e-3), "omega_center": float(f[top])}

    rows: Dict[str, List] = {k: [] for k in ("orientations", "j_z", "gamma_pump", "omega_center", "scale", "residual_norm", "converged")}
    for p in p_grid:
        epsilon = epsilon_from_orientation(F, float(p))
        fixed = {"epsilon": epsilon, "gamma_com": 0.0, "omega_split": 0.0}
        shape = model_values({**current, **fixed, "scale": 1.0}, f, F)
        initial = {**current, **fixed, "scale": float(np.max(y) / np.max(shape))}
        problem = FitProblem(
            trace=trace,
            free_parameters=["scale", "gamma_pump", "omega_center"],
            fixed_values=fixed,
            initial=initial,
            F=F,
            restarts=False,
        )
        result = fit(problem)
        current = {
            "scale": result.scale,
            "gamma_pump": result.model.gamma_pump,
            "omega_center": result.model.omega_center,
        }
        atom_number = float(np.sqrt(result.scale))
        rows["orientations"].append(float(p))
        rows["j_z"].append(atom_number * F * float(p))
        rows["gamma_pump"].append(result.model.gamma_pump)
        rows["omega_center"].append(result.model.omega_center)
        rows["scale"].append(result.scale)
        rows["residual_norm"].append(result.residual_norm)
        rows["converged"].append(result.converged)
        logger.info(f"p={p:.4f}: J_z={rows['j_z'][-1]:.6g}, Γ_pump={result.model.gamma_pump:.4f} Hz")

    return DegeneracyScan(**rows)


# === FAMILIAS SINTÉTICAS ===

def synthesize_family(
    base: SpinModel,
    orientations: Sequence[float],
    atom_numbers: Sequence[float],
    grid: np.ndarray,
    noise_level: float = 0.0,
    seed: int = 0,
) -> List[Tuple[SpectrumTrace, float]]:
    """Trazas MORS y su θ_DC para una familia de (p, N) con el resto de `base`."""
    family = []
    for index, (p, n) in enumerate(zip(orientations, atom_numbers)):
        params = base.model_dump(exclude={"n4", "epsilon"})
        model = SpinModel.from_orientation(p, atom_number=n, **params)
        trace, _ = mors(model, grid)
        if noise_level > 0:
            trace = add_gaussian_noise(trace, noise_level, seed + index)
        family.append((trace, dc_faraday(model.populations, model.atom_number)))
    return family
