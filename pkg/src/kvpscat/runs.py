"""Run orchestration: energy scans, convergence studies, fidelity tables,
resource estimates.  Each run writes CSV rows (stamped with the config
hash), a JSON summary, and figure companions.

Energy points are independent; with jobs > 1 they are dispatched to a
process pool and the rows are reassembled in energy order, so output is
deterministic regardless of completion order.
"""

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import ccref, kvp, scaling, vqls
from .basis import orthogonalize, overlap_matrix
from .config import SJ_COMPACT, config_hash
from .matelem import assemble, one_channel_exp_well, secrest_johnson, to_ortho

__all__ = [
    "run_scan",
    "run_convergence",
    "run_fidelity_table",
    "run_scaling",
    "run_cc_only",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.12e}"


def _write_csv(path: Path, fieldnames, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in fieldnames])


def _write_json(path: Path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _problem(cfg: dict, value: float, convention: str | None = None):
    """Build the problem at one grid point (k or total energy)."""
    p = cfg["problem"]
    common = dict(
        gamma=p["gamma"],
        n_l=p["n_basis"] + 1,
        mu=p["mu"],
        r_max=p["r_max"],
        panels=p["panels"],
        order=p["order"],
    )
    if p["kind"] == "one_channel_exp_well":
        convention = convention or cfg["scan"]["convention"]
        if convention == "wavenumber":
            return one_channel_exp_well(k=value, **common)
        return one_channel_exp_well(energy=value, **common)
    return secrest_johnson(
        energy=value,
        n_channels=p["n_channels"],
        a=p["a"],
        alpha=p["alpha"],
        beta=p["beta"],
        m=p["m"],
        **common,
    )


def _cc_grid(cfg: dict, problem) -> ccref.CcGrid:
    cc = cfg["cc"]
    base = ccref.default_grid(problem)
    return ccref.CcGrid(
        r_min=cc["r_min"] if cc["r_min"] is not None else base.r_min,
        r_max=cc["r_max"] if cc["r_max"] is not None else base.r_max,
        n_steps=cc["n_steps"] if cc["n_steps"] is not None else base.n_steps,
    )


def _opt_config(cfg: dict, seed) -> vqls.OptConfig:
    v = cfg["vqls"]
    return vqls.OptConfig(
        restarts=v["restarts"],
        maxiter=v["maxiter"],
        target=v["target"],
        seed=seed,
        polish_rounds=v["polish_rounds"],
    )


def _solve_kvp(cfg: dict, problem, seed):
    return kvp.solve(
        problem,
        cfg["inverter"],
        depth=cfg["vqls"]["depth"],
        opt=_opt_config(cfg, seed),
        ortho_cutoff=cfg["ortho"]["cutoff"],
        target_n_q=cfg["ortho"]["target_n_q"],
    )


def _scan_point(args):
    """One energy point of a scan; runs in a worker process."""
    cfg, idx, value = args
    try:
        problem = _problem(cfg, value)
        seed = None if cfg["seed"] is None else [cfg["seed"], idx]
        result = _solve_kvp(cfg, problem, seed)
        reference = ccref.solve_cc(
            problem, _cc_grid(cfg, problem), n_channels=cfg["cc"]["n_channels"],
            wall=cfg["cc"]["wall"],
        )
        p_kvp = kvp.probabilities(result)
        p_cc = kvp.probabilities(reference)
        fid_min = (
            float(np.min(result.fidelities))
            if result.fidelities is not None
            else None
        )
        rows = []
        n_open = min(result.n_open, reference.n_open)
        for i in range(n_open):
            for f in range(n_open):
                rows.append(
                    {
                        "energy": value,
                        "channel_from": i,
                        "channel_to": f,
                        "re_s_kvp": result.s[f, i].real,
                        "im_s_kvp": result.s[f, i].imag,
                        "re_s_cc": reference.s[f, i].real,
                        "im_s_cc": reference.s[f, i].imag,
                        "prob_kvp": p_kvp[f, i],
                        "prob_cc": p_cc[f, i],
                        "unitarity_defect": result.unitarity_defect,
                        "fidelity_min": fid_min,
                    }
                )
        return idx, rows, None
    except Exception as exc:  # per-energy failures recorded, scan continues
        return idx, [], f"{type(exc).__name__}: {exc}"


SCAN_FIELDS = [
    "energy",
    "channel_from",
    "channel_to",
    "re_s_kvp",
    "im_s_kvp",
    "re_s_cc",
    "im_s_cc",
    "prob_kvp",
    "prob_cc",
    "unitarity_defect",
    "fidelity_min",
    "config_hash",
]


def _energy_grid(cfg: dict) -> np.ndarray:
    scan = cfg["scan"]
    return np.linspace(scan["start"], scan["stop"], scan["count"])


def _dispatch(cfg, tasks, worker):
    if cfg["jobs"] > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            results = list(pool.map(worker, tasks))
    else:
        results = [worker(t) for t in tasks]
    return sorted(results, key=lambda r: r[0])


def run_scan(cfg: dict, out_dir) -> tuple[int, dict]:
    """Energy scan: solver + reference S-matrices, probabilities, defects."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    grid = _energy_grid(cfg)
    tasks = [(cfg, i, float(e)) for i, e in enumerate(grid)]
    results = _dispatch(cfg, tasks, _scan_point)

    rows, errors = [], []
    for idx, point_rows, error in results:
        if error is not None:
            errors.append({"energy": float(grid[idx]), "error": error})
            continue
        for r in point_rows:
            r["config_hash"] = chash
            rows.append(r)
    _write_csv(out / "scan.csv", SCAN_FIELDS, rows)

    summary = {
        "config": cfg,
        "config_hash": chash,
        "rows": len(rows),
        "errors": errors,
        "max_abs_s_deviation": max(
            (
                abs(complex(r["re_s_kvp"], r["im_s_kvp"])
                    - complex(r["re_s_cc"], r["im_s_cc"]))
                for r in rows
            ),
            default=None,
        ),
        "max_prob_deviation": max(
            (abs(r["prob_kvp"] - r["prob_cc"]) for r in rows), default=None
        ),
        "max_unitarity_defect": max(
            (r["unitarity_defect"] for r in rows), default=None
        ),
    }
    _write_json(out / "scan_summary.json", summary)
    if cfg["plots"] and rows:
        from . import plotting

        label = (
            "wavenumber k"
            if cfg["problem"]["kind"] == "one_channel_exp_well"
            and cfg["scan"]["convention"] == "wavenumber"
            else "total energy"
        )
        plotting.scan_figure(rows, out / "scan_smatrix.png", label)
        plotting.probability_figure(rows, out / "scan_probabilities.png", label)
    return (2 if errors else 0), summary


def _convergence_point(args):
    cfg, idx, gamma, n_basis = args
    try:
        sub = json.loads(json.dumps(cfg))
        sub["problem"]["gamma"] = gamma
        sub["problem"]["n_basis"] = n_basis
        problem = _problem(sub, cfg["convergence"]["k"], convention="wavenumber")
        result = kvp.solve(problem, "classical")
        return idx, {"gamma": gamma, "n_basis": n_basis, "s": result.s[0, 0]}, None
    except Exception as exc:
        return idx, {}, f"{type(exc).__name__}: {exc}"


CONV_FIELDS = [
    "gamma",
    "n_basis",
    "re_s_kvp",
    "im_s_kvp",
    "re_s_cc",
    "im_s_cc",
    "frac_err_re",
    "frac_err_im",
    "abs_frac_err",
    "config_hash",
]


def run_convergence(cfg: dict, out_dir) -> tuple[int, dict]:
    """Basis-set convergence of the single-channel S vs the reference."""
    if cfg["problem"]["kind"] != "one_channel_exp_well":
        raise ValueError("convergence study is defined for the 1-d problem")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    k = cfg["convergence"]["k"]
    problem = _problem(cfg, k, convention="wavenumber")
    s_cc = ccref.solve_cc(problem, _cc_grid(cfg, problem)).s[0, 0]

    tasks = []
    idx = 0
    for gamma in cfg["convergence"]["gamma_values"]:
        for n_basis in cfg["convergence"]["n_basis_values"]:
            tasks.append((cfg, idx, float(gamma), int(n_basis)))
            idx += 1
    results = _dispatch(cfg, tasks, _convergence_point)

    rows, errors = [], []
    for _, payload, error in results:
        if error is not None:
            errors.append(error)
            continue
        s = payload["s"]
        frac = (s_cc - s) / s_cc
        rows.append(
            {
                "gamma": payload["gamma"],
                "n_basis": payload["n_basis"],
                "re_s_kvp": s.real,
                "im_s_kvp": s.imag,
                "re_s_cc": s_cc.real,
                "im_s_cc": s_cc.imag,
                "frac_err_re": frac.real,
                "frac_err_im": frac.imag,
                "abs_frac_err": abs(frac),
                "config_hash": chash,
            }
        )
    _write_csv(out / "convergence.csv", CONV_FIELDS, rows)
    summary = {
        "config": cfg,
        "config_hash": chash,
        "reference_s": [s_cc.real, s_cc.imag],
        "errors": errors,
        "max_abs_frac_err_smallest_basis": max(
            (
                r["abs_frac_err"]
                for r in rows
                if r["n_basis"] == min(cfg["convergence"]["n_basis_values"])
            ),
            default=None,
        ),
    }
    _write_json(out / "convergence_summary.json", summary)
    if cfg["plots"] and rows:
        from . import plotting

        plotting.convergence_figure(rows, out / "convergence.png")
    return (2 if errors else 0), summary


FIDELITY_FIELDS = [
    "depth",
    "column",
    "fidelity",
    "norm_q",
    "cost_final",
    "cost_local_final",
    "iterations",
    "converged",
    "wall_time_s",
    "config_hash",
]


def _fidelity_matrix(cfg: dict):
    """The symmetric block the fidelity table inverts, per problem kind."""
    prob = dict(cfg["problem"])
    if prob["kind"] == "secrest_johnson":
        prob.update(SJ_COMPACT)
        energy = cfg["fidelity"].get("energy") or 3.8
        sub = dict(cfg, problem=prob)
        problem = _problem(sub, energy)
        mats = assemble(problem)
        xform = orthogonalize(
            overlap_matrix(problem.basis, problem.channels), 0.1
        )
        return to_ortho(mats, xform).m
    energy = cfg["fidelity"].get("energy") or 0.55
    problem = _problem(cfg, energy, convention="total_energy")
    return assemble(problem).m


def run_fidelity_table(cfg: dict, out_dir) -> tuple[int, dict]:
    """Per-column inversion fidelity and cost for each ansatz depth."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    m = _fidelity_matrix(cfg)
    oracle = np.linalg.inv(m)
    rows = []
    for depth in cfg["fidelity"]["depths"]:
        start = time.perf_counter()
        result = vqls.invert(
            m, depth, _opt_config(cfg, cfg["seed"]), oracle=oracle,
            drop_tol=cfg["vqls"]["drop_tol"],
        )
        elapsed = time.perf_counter() - start
        for col, sol in enumerate(result.columns):
            rows.append(
                {
                    "depth": depth,
                    "column": col,
                    "fidelity": result.fidelities[col],
                    "norm_q": sol.norm_q,
                    "cost_final": sol.cost_final,
                    "cost_local_final": sol.cost_local_final,
                    "iterations": sol.iterations,
                    "converged": sol.converged,
                    "wall_time_s": elapsed / len(result.columns),
                    "config_hash": chash,
                }
            )
    _write_csv(out / "fidelity.csv", FIDELITY_FIELDS, rows)
    summary = {
        "config": cfg,
        "config_hash": chash,
        "matrix_dim": int(m.shape[0]),
        "min_fidelity_by_depth": {
            str(d): min(
                r["fidelity"] for r in rows if r["depth"] == d
            )
            for d in cfg["fidelity"]["depths"]
        },
    }
    _write_json(out / "fidelity_summary.json", summary)
    if cfg["plots"] and rows:
        from . import plotting

        plotting.fidelity_figure(rows, out / "fidelity.png")
    return 0, summary


SCALING_FIELDS = [
    "name",
    "n_atoms_total",
    "vib_modes",
    "qubits",
    "pauli_terms",
    "ref_qubits",
    "ref_pauli_terms",
    "delta_qubits",
    "delta_pauli_terms",
    "config_hash",
]


def run_scaling(cfg: dict, out_dir) -> tuple[int, dict]:
    """Qubit and Pauli-term estimates for the configured molecule pairs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    rows = []
    for entry in cfg["scaling"]["pairs"]:
        if isinstance(entry, str):
            if entry not in scaling.PRESETS:
                raise ValueError(f"unknown molecule pair preset {entry!r}")
            pair, ref_q, ref_p = scaling.PRESETS[entry]
        else:
            ref_q = entry.pop("ref_qubits", None)
            ref_p = entry.pop("ref_pauli_terms", None)
            pair = scaling.MoleculePair(**entry)
        n_q = scaling.qubit_count(pair)
        n_p = scaling.pauli_term_count(pair)
        rows.append(
            {
                "name": pair.name,
                "n_atoms_total": pair.n_atoms_total,
                "vib_modes": scaling.vib_modes(pair),
                "qubits": n_q,
                "pauli_terms": n_p,
                "ref_qubits": ref_q,
                "ref_pauli_terms": ref_p,
                "delta_qubits": None if ref_q is None else n_q - ref_q,
                "delta_pauli_terms": None if ref_p is None else n_p - ref_p,
                "config_hash": chash,
            }
        )
    _write_csv(out / "scaling.csv", SCALING_FIELDS, rows)
    summary = {"config": cfg, "config_hash": chash, "rows": rows}
    _write_json(out / "scaling_summary.json", summary)
    if cfg["plots"] and rows:
        from . import plotting

        plotting.scaling_figure(rows, out / "scaling.png")
    return 0, summary


def _cc_point(args):
    cfg, idx, value = args
    try:
        problem = _problem(cfg, value)
        reference = ccref.solve_cc(
            problem, _cc_grid(cfg, problem), n_channels=cfg["cc"]["n_channels"],
            wall=cfg["cc"]["wall"],
        )
        probs = kvp.probabilities(reference)
        rows = []
        for i in range(reference.n_open):
            for f in range(reference.n_open):
                rows.append(
                    {
                        "energy": value,
                        "channel_from": i,
                        "channel_to": f,
                        "re_s_cc": reference.s[f, i].real,
                        "im_s_cc": reference.s[f, i].imag,
                        "prob_cc": probs[f, i],
                        "unitarity_defect": reference.unitarity_defect,
                        "symmetry_defect": reference.symmetry_defect,
                    }
                )
        return idx, rows, None
    except Exception as exc:
        return idx, [], f"{type(exc).__name__}: {exc}"


CC_FIELDS = [
    "energy",
    "channel_from",
    "channel_to",
    "re_s_cc",
    "im_s_cc",
    "prob_cc",
    "unitarity_defect",
    "symmetry_defect",
    "config_hash",
]


def run_cc_only(cfg: dict, out_dir) -> tuple[int, dict]:
    """Reference coupled-channel scan without the variational solver."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chash = config_hash(cfg)
    grid = _energy_grid(cfg)
    tasks = [(cfg, i, float(e)) for i, e in enumerate(grid)]
    results = _dispatch(cfg, tasks, _cc_point)
    rows, errors = [], []
    for idx, point_rows, error in results:
        if error is not None:
            errors.append({"energy": float(grid[idx]), "error": error})
            continue
        for r in point_rows:
            r["config_hash"] = chash
            rows.append(r)
    _write_csv(out / "cc.csv", CC_FIELDS, rows)
    summary = {
        "config": cfg,
        "config_hash": chash,
        "rows": len(rows),
        "errors": errors,
        "max_unitarity_defect": max(
            (r["unitarity_defect"] for r in rows), default=None
        ),
    }
    _write_json(out / "cc_summary.json", summary)
    return (2 if errors else 0), summary
