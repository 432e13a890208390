"""
Experiment runner: scenario configs, tau sweeps, CSV/JSON persistence,
and reproducibility manifests.

Output schemas (all floats printed as %.17e so reruns are bit-identical):
  complexity_tau=<tau>.csv : u, C, survival, re_phi0, im_phi0, ...
  lanczos_tau=<tau>.csv    : n, a_n, b_n  (b_0 printed as 0)
  summary.json             : per-tau FOTOC long-u average, IPR, first-pair residuals
  manifest.json            : every resolved default and tolerance
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .hilbert import SpinChainSpec, eigendecompose, ising_hamiltonian, local_perturbation
from .dynamics import (StateVector, evolved_initial_state, fotoc_long_u_average, ipr)
from .krylov import (NORMALIZATION_TOL, amplitudes, default_termination_threshold,
                     lanczos, thermo_identities)
from .liealg import (AlgebraModel, closed_form_lanczos, b1_model, ipr_model,
                     su11_coherent_amplitudes)
from .hilbert import DEGENERACY_TOL

FLOAT_FMT = "%.17e"

SCENARIOS = ("spin_chain", "lie_su2", "lie_su11", "ipr_study")

_CHAIN_KEYS = {"n_sites", "boundary", "pre", "post"}
_COUPLING_KEYS = {"J", "h", "g"}
_ALGEBRA_KEYS = {"kind", "alpha", "j", "bargmann_h", "f_tau", "cutoff"}
_TOP_KEYS = {"scenario", "chain", "w_site", "theta", "eigenstate_index",
             "tau_list", "u_max", "u_steps", "phi_columns", "algebra", "output_dir"}


class ConfigError(ValueError):
    """Invalid scenario configuration; the message lists every violation."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("invalid configuration:\n  - " + "\n  - ".join(violations))


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    tau_list: tuple[float, ...]
    u_max: float
    u_steps: int
    output_dir: str
    chain: dict | None = None
    w_site: int | None = None
    theta: float = math.pi / 2
    eigenstate_index: int | str = "mid"
    phi_columns: int = 8
    algebra: dict | None = None

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        violations = validate_config_dict(d)
        if violations:
            raise ConfigError(violations)
        return ScenarioConfig(
            scenario=d["scenario"],
            tau_list=tuple(float(t) for t in d["tau_list"]),
            u_max=float(d["u_max"]),
            u_steps=int(d["u_steps"]),
            output_dir=str(d["output_dir"]),
            chain=d.get("chain"),
            w_site=d.get("w_site"),
            theta=float(d.get("theta", math.pi / 2)),
            eigenstate_index=d.get("eigenstate_index", "mid"),
            phi_columns=int(d.get("phi_columns", 8)),
            algebra=d.get("algebra"),
        )

    def u_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.u_max, self.u_steps)

    def algebra_model(self) -> AlgebraModel:
        a = dict(self.algebra or {})
        return AlgebraModel(
            kind=a.get("kind", "su11"),
            alpha=float(a.get("alpha", 0.3)),
            j=a.get("j"),
            bargmann_h=float(a.get("bargmann_h", 0.25)),
            f_tau=a.get("f_tau", "linear"),
            cutoff=int(a.get("cutoff", 256)),
        )


def validate_config_dict(d: dict) -> list[str]:
    """Collect every violation instead of stopping at the first."""
    v: list[str] = []
    unknown = set(d) - _TOP_KEYS
    if unknown:
        v.append(f"unknown keys: {sorted(unknown)}")
    scenario = d.get("scenario")
    if scenario not in SCENARIOS:
        v.append(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    taus = d.get("tau_list")
    if not isinstance(taus, (list, tuple)) or not taus:
        v.append("tau_list must be a nonempty array")
    else:
        if any(taus[i] >= taus[i + 1] for i in range(len(taus) - 1)):
            v.append("tau_list must be strictly ascending")
    if not isinstance(d.get("u_steps"), int) or d.get("u_steps", 0) < 2:
        v.append("u_steps must be an integer >= 2")
    if not isinstance(d.get("u_max"), (int, float)) or d.get("u_max", 0) <= 0:
        v.append("u_max must be a positive number")
    if "output_dir" not in d:
        v.append("output_dir is required")
    if "phi_columns" in d and (not isinstance(d["phi_columns"], int) or d["phi_columns"] < 1):
        v.append("phi_columns must be a positive integer")

    if scenario == "spin_chain":
        chain = d.get("chain")
        if not isinstance(chain, dict):
            v.append("spin_chain scenario requires a chain object")
        else:
            unknown = set(chain) - _CHAIN_KEYS
            if unknown:
                v.append(f"unknown chain keys: {sorted(unknown)}")
            n_sites = chain.get("n_sites")
            if not isinstance(n_sites, int) or n_sites < 2:
                v.append("chain.n_sites must be an integer >= 2")
            if chain.get("boundary", "periodic") not in ("periodic", "open"):
                v.append("chain.boundary must be 'periodic' or 'open'")
            for which in ("pre", "post"):
                couplings = chain.get(which)
                if not isinstance(couplings, dict) or set(couplings) - _COUPLING_KEYS \
                        or "J" not in couplings or "h" not in couplings:
                    v.append(f"chain.{which} must carry J, h and optionally g")
            if isinstance(n_sites, int) and isinstance(d.get("w_site"), int):
                if not 1 <= d["w_site"] <= n_sites:
                    v.append(f"w_site {d['w_site']} out of range 1..{n_sites}")
        idx = d.get("eigenstate_index", "mid")
        if idx != "mid" and not isinstance(idx, int):
            v.append("eigenstate_index must be an integer or 'mid'")
    elif scenario in ("lie_su2", "lie_su11", "ipr_study"):
        algebra = d.get("algebra")
        if not isinstance(algebra, dict):
            v.append(f"{scenario} scenario requires an algebra object")
        else:
            unknown = set(algebra) - _ALGEBRA_KEYS
            if unknown:
                v.append(f"unknown algebra keys: {sorted(unknown)}")
            try:
                kind = algebra.get("kind", "su11")
                AlgebraModel(kind=kind, alpha=float(algebra.get("alpha", 0.3)),
                             j=algebra.get("j"),
                             bargmann_h=float(algebra.get("bargmann_h", 0.25)),
                             f_tau=algebra.get("f_tau", "linear"),
                             cutoff=int(algebra.get("cutoff", 256)))
            except (ValueError, TypeError) as exc:
                v.append(f"algebra: {exc}")
    return v


def load_config(path: str | Path) -> ScenarioConfig:
    with open(path) as fh:
        return ScenarioConfig.from_dict(json.load(fh))


# --- presets -----------------------------------------------------------------

DEFAULT_TAU_LIST = [0.1, 1.0, 5.0, 20.0, 100.0, 500.0]

PRESET_CHAINS = {
    "case1": ({"J": 1.0, "h": 0.4, "g": 0.0}, {"J": 1.0, "h": 0.7, "g": 0.0}),
    "case2": ({"J": 1.0, "h": 0.4, "g": 0.0}, {"J": 1.0, "h": 1.4, "g": -0.6}),
    "case3": ({"J": 0.8, "h": 1.2, "g": -0.6}, {"J": 1.0, "h": 1.4, "g": -0.6}),
}

PRESETS = tuple(PRESET_CHAINS) + ("lie-su11", "ipr-study")


def preset_config(name: str, output_dir: str, n_sites: int = 10,
                  alpha: float | None = None) -> dict:
    """Config dict for a named preset; chain parameters follow the reference
    figure captions, with n_sites at desk scale by default."""
    if name in PRESET_CHAINS:
        pre, post = PRESET_CHAINS[name]
        return {
            "scenario": "spin_chain",
            "chain": {"n_sites": n_sites, "boundary": "periodic",
                      "pre": dict(pre), "post": dict(post)},
            "theta": math.pi / 2,
            "eigenstate_index": "mid",
            "tau_list": list(DEFAULT_TAU_LIST),
            "u_max": 50.0,
            "u_steps": 2000,
            "output_dir": output_dir,
        }
    if name == "lie-su11":
        return {
            "scenario": "lie_su11",
            "algebra": {"kind": "su11", "alpha": 0.3, "f_tau": "linear", "cutoff": 256},
            "tau_list": [0.5, 1.0, 2.0],
            "u_max": 2.0,
            "u_steps": 500,
            "output_dir": output_dir,
        }
    if name == "ipr-study":
        return {
            "scenario": "ipr_study",
            "algebra": {"kind": "su11", "alpha": 0.3 if alpha is None else alpha,
                        "f_tau": "linear", "cutoff": 256},
            "tau_list": [round(0.1 * k, 10) for k in range(201)],
            "u_max": 1.0,
            "u_steps": 2,
            "output_dir": output_dir,
        }
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")


# --- persistence helpers -----------------------------------------------------

def _fmt(x: float) -> str:
    return FLOAT_FMT % x


def _fmt_tau(tau: float) -> str:
    return format(tau, "g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _write_complexity_csv(path: Path, u_grid, complexity, survival, phi, n_phi: int) -> None:
    n_phi = min(n_phi, phi.shape[0])
    header = ["u", "C", "survival"]
    for n in range(n_phi):
        header += [f"re_phi{n}", f"im_phi{n}"]
    rows = []
    for k in range(len(u_grid)):
        row = [float(u_grid[k]), float(complexity[k]), float(survival[k])]
        for n in range(n_phi):
            row += [float(phi[n, k].real), float(phi[n, k].imag)]
        rows.append(row)
    _write_csv(path, header, rows)


def _write_lanczos_csv(path: Path, a: np.ndarray, b: np.ndarray) -> None:
    rows = [[n, float(a[n]), float(b[n - 1]) if n >= 1 else 0.0] for n in range(len(a))]
    _write_csv(path, ["n", "a_n", "b_n"], rows)


@dataclass(frozen=True)
class RunReport:
    output_dir: str
    files: tuple[str, ...]
    summary: dict


def _saturation(values: np.ndarray, window_fraction: float):
    n = len(values)
    window = values[n - max(1, int(round(window_fraction * n))):]
    mean = float(np.mean(window))
    std = float(np.std(window))
    rel = float("inf") if abs(mean) < 1e-300 else std / mean
    return mean, std, rel


def saturation_stats(trace, window_fraction: float) -> dict:
    """Mean / std / relative fluctuation of C(u) over the trailing window."""
    if not 0 < window_fraction <= 0.5:
        raise ValueError(f"window_fraction must be in (0, 0.5], got {window_fraction}")
    mean, std, rel = _saturation(np.asarray(trace.complexity, dtype=float), window_fraction)
    return {"mean": mean, "std": std, "rel_fluct": rel}


# --- runner ------------------------------------------------------------------

def _resolve_w_site(config: ScenarioConfig, n_sites: int) -> int:
    return config.w_site if config.w_site is not None else math.ceil(n_sites / 2)


def _resolve_eigenstate_index(config: ScenarioConfig, dim: int) -> int:
    if config.eigenstate_index == "mid":
        return dim // 2
    idx = int(config.eigenstate_index)
    if not 0 <= idx < dim:
        raise ConfigError([f"eigenstate_index {idx} out of range 0..{dim - 1}"])
    return idx


def run(config: ScenarioConfig, preset_name: str | None = None) -> RunReport:
    """Execute a scenario sweep and persist traces, coefficients and manifest."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: list[str] = []
    summary: dict = {"scenario": config.scenario, "per_tau": {}}
    manifest = {
        "code_version": __version__,
        "preset": preset_name,
        "scenario": config.scenario,
        "tau_list": list(config.tau_list),
        "u_max": config.u_max,
        "u_steps": config.u_steps,
        "phi_columns": config.phi_columns,
        "float_format": FLOAT_FMT,
        "normalization_tolerance": NORMALIZATION_TOL,
        "degeneracy_tolerance": DEGENERACY_TOL,
    }

    if config.scenario == "spin_chain":
        chain = config.chain
        n_sites = chain["n_sites"]
        boundary = chain.get("boundary", "periodic")
        pre = SpinChainSpec(n_sites=n_sites, J=chain["pre"]["J"], h=chain["pre"]["h"],
                            g=chain["pre"].get("g", 0.0), boundary=boundary)
        post = SpinChainSpec(n_sites=n_sites, J=chain["post"]["J"], h=chain["post"]["h"],
                             g=chain["post"].get("g", 0.0), boundary=boundary)
        H0_op = ising_hamiltonian(pre)
        H1_op = ising_hamiltonian(post)
        H0 = eigendecompose(H0_op)
        H1 = eigendecompose(H1_op)
        w_site = _resolve_w_site(config, n_sites)
        W = local_perturbation(w_site, config.theta, n_sites)
        idx = _resolve_eigenstate_index(config, pre.dim)
        E0 = StateVector(H0.eigenvectors[:, idx])
        u_grid = config.u_grid()
        manifest.update({
            "n_sites": n_sites, "boundary": boundary, "w_site": w_site,
            "theta": config.theta, "eigenstate_index": idx,
            "eigenstate_energy": float(H0.eigenvalues[idx]),
            "pre_quench": {"J": pre.J, "h": pre.h, "g": pre.g},
            "post_quench": {"J": post.J, "h": post.h, "g": post.g},
            "lanczos_termination_threshold": default_termination_threshold(H0_op.entries),
        })
        for tau in config.tau_list:
            psi_tau = evolved_initial_state(E0, W, H1, tau)
            K = lanczos(H0_op, psi_tau)
            trace = amplitudes(K, H0, psi_tau, u_grid)
            thermo = thermo_identities(E0, W, H0_op, H0, H1, tau)
            long_u = fotoc_long_u_average(E0, W, H0, H1, tau)
            ipr_value = ipr(psi_tau, H0)
            label = _fmt_tau(tau)
            cpath = out / f"complexity_tau={label}.csv"
            lpath = out / f"lanczos_tau={label}.csv"
            _write_complexity_csv(cpath, u_grid, trace.complexity, trace.survival,
                                  trace.phi, config.phi_columns)
            _write_lanczos_csv(lpath, K.a, K.b)
            files += [cpath.name, lpath.name]
            summary["per_tau"][label] = {
                "tau": tau,
                "krylov_dim": K.dim_krylov,
                "fotoc_long_u_average": long_u,
                "ipr": ipr_value,
                "a0": thermo.a0, "mean_h0": thermo.mean_h0,
                "a0_residual": thermo.a0_residual,
                "b1_sq": thermo.b1_sq, "variance_h0": thermo.variance_h0,
                "b1_residual": thermo.b1_residual,
                "saturation": _saturation(trace.complexity, 0.25)[2],
            }

    elif config.scenario in ("lie_su2", "lie_su11"):
        model = config.algebra_model()
        u_grid = config.u_grid()
        manifest.update({"algebra": asdict(model)})
        for tau in config.tau_list:
            if config.scenario == "lie_su11":
                trace = su11_coherent_amplitudes(model, tau, u_grid)
                n_max = model.cutoff // 2
            else:
                from .dynamics import StateVector as SV
                from .liealg import effective_observable
                _, O_ef = effective_observable(model, tau)
                e0 = np.zeros(O_ef.dim, dtype=np.complex128)
                e0[0] = 1.0
                psi0 = SV(e0)
                K = lanczos(O_ef, psi0)
                trace = amplitudes(K, eigendecompose(O_ef), psi0, u_grid)
                n_max = int(2 * model.j)
            a, b = closed_form_lanczos(model, tau, n_max)
            label = _fmt_tau(tau)
            cpath = out / f"complexity_tau={label}.csv"
            lpath = out / f"lanczos_tau={label}.csv"
            _write_complexity_csv(cpath, u_grid, trace.complexity, trace.survival,
                                  trace.phi, config.phi_columns)
            _write_lanczos_csv(lpath, a, np.abs(b))
            files += [cpath.name, lpath.name]
            summary["per_tau"][label] = {
                "tau": tau,
                "max_complexity": float(np.max(trace.complexity)),
                "final_survival": float(trace.survival[-1]),
            }

    elif config.scenario == "ipr_study":
        model = config.algebra_model()
        taus = np.asarray(config.tau_list, dtype=float)
        b1 = b1_model(model.alpha, taus)
        iprs = ipr_model(model.alpha, taus)
        manifest.update({"algebra": asdict(model)})
        label = _fmt_tau(model.alpha)
        path = out / f"ipr_study_alpha={label}.csv"
        _write_csv(path, ["tau", "b1", "ipr"],
                   [[float(t), float(x), float(y)] for t, x, y in zip(taus, b1, iprs)])
        files.append(path.name)
        summary["alpha"] = model.alpha
        summary["max_b1"] = float(np.max(b1))
        summary["min_ipr"] = float(np.min(iprs))

    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    files += ["summary.json", "manifest.json"]
    return RunReport(output_dir=str(out), files=tuple(files), summary=summary)
