"""Command-line front end.

Every command writes one JSON report (``schema_version`` 1) to ``--out``
or stdout. Settings come from built-in defaults, then an optional
``--config`` file of ``key = value`` lines, then explicit flags.

Exit status: 0 on success, 2 when a checked property is violated, 1 on
usage, domain or accuracy errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import functionals as F
from . import inequalities as I
from . import ode_lab as O
from . import suite as S
from .errors import HyperWehrlError, PropertyViolation
from .su11_states import basis_state, coherent_coeffs, random_state

SCHEMA_VERSION = 1
EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


def _float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _center(text) -> list[float]:
    parts = _float_list(text)
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise ValueError("center must be 're,im'")
    return parts


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _level(text) -> str:
    if text not in S.LEVELS:
        raise ValueError(f"level must be one of {sorted(S.LEVELS)}")
    return text


def _preset(text) -> str:
    name = str(text).replace("-", "_")
    if name not in ("paper_literal", "extremizer_consistent"):
        raise ValueError("preset must be paper-literal or extremizer-consistent")
    return name


# key -> (parser, help)
KEYS = {
    "k": (float, "representation index k (half-integer >= 1)"),
    "q": (float, "exponent q"),
    "p": (float, "exponent p for a single L^p norm"),
    "seed": (int, "first random seed"),
    "seeds": (int, "number of consecutive seeds (random states)"),
    "state": (str, "coherent | basis:m | random"),
    "center": (_center, "coherent-state center 're,im'"),
    "M": (int, "top basis index of random states"),
    "renyi": (_float_list, "comma-separated Renyi orders"),
    "minimize": (_bool, "run the radial minimizer instead of a state"),
    "grid_size": (int, "minimizer grid intervals"),
    "t": (_float_list, "comma-separated energies"),
    "k_max": (int, "largest index in the entropy-energy infimum"),
    "k_tilde": (_float_list, "comma-separated half-plane family indices"),
    "preset": (_preset, "paper-literal | extremizer-consistent"),
    "kq": (float, "product kq (> 2)"),
    "gamma": (float, "nonlinearity ratio a/b"),
    "alpha": (float, "initial value u(0)"),
    "tau_max": (float, "integration horizon"),
    "tol": (float, "bisection tolerance"),
    "level": (_level, "smoke | desk | deep"),
    "checks": (lambda s: [x for x in str(s).split(",") if x], "subset of suite checks"),
    "timing": (_bool, "include wall-clock timings (breaks byte-identical output)"),
    "out": (str, "JSON output path (default stdout)"),
    "csv": (str, "CSV output path"),
}

STATE_KEYS = ("k", "state", "center", "seed", "seeds", "M")
ODE_KEYS = ("preset", "kq", "gamma", "tau_max")
COMMANDS = {
    "entropy": STATE_KEYS + ("renyi", "p"),
    "fisher": STATE_KEYS + ("q",),
    "sobolev": STATE_KEYS + ("q", "minimize", "grid_size", "csv"),
    "norm-bound": STATE_KEYS + ("q",),
    "entropy-energy": ("t", "k", "k_max", "csv"),
    "family": ("k_tilde",),
    "shoot": ODE_KEYS + ("alpha", "csv"),
    "ground-state": ODE_KEYS + ("tol",),
    "admissibility": ODE_KEYS + ("alpha",),
    "suite": ("level", "checks", "timing"),
}
DEFAULTS = {
    "k": 1.0, "q": 3.0, "p": None, "seed": 0, "seeds": 1, "state": "coherent",
    "center": [0.0, 0.0], "M": S.RANDOM_M, "renyi": [], "minimize": False,
    "grid_size": 2000, "t": [1.0, 5.0, 25.0, 100.0], "k_max": 2000, "k_tilde": [2.0, 3.0],
    "preset": "extremizer_consistent", "kq": 3.0, "gamma": None, "alpha": None,
    "tau_max": 40.0, "tol": 1e-10, "level": "desk", "checks": None, "timing": False,
    "out": None, "csv": None,
}
COMMAND_DEFAULTS = {"entropy-energy": {"k": 100.0}}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperwehrl", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for cmd, keys in COMMANDS.items():
        sp = sub.add_parser(cmd)
        sp.add_argument("--config", default=None, help="key = value settings file")
        for key in keys + ("out",):
            conv, help_ = KEYS[key]
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=str,
                            default=argparse.SUPPRESS, help=help_)
    return parser


def read_config(path: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            key, val = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def resolve(command: str, flags: dict, config_path: str | None) -> dict:
    """Defaults, then file, then flags; unknown keys are rejected."""
    allowed = set(COMMANDS[command]) | {"out"}
    raw = read_config(config_path) if config_path else {}
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
    raw.update(flags)
    cfg = {k: DEFAULTS[k] for k in sorted(allowed)}
    cfg.update(COMMAND_DEFAULTS.get(command, {}))
    for key, val in raw.items():
        try:
            cfg[key] = KEYS[key][0](val)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# state construction and per-state work
# ---------------------------------------------------------------------------


def make_state(cfg: dict, seed: int | None = None):
    kind = cfg["state"]
    k = cfg["k"]
    if kind == "coherent":
        c = cfg["center"]
        return coherent_coeffs(complex(c[0], c[1]), k)
    if kind.startswith("basis:"):
        return basis_state(int(kind.split(":", 1)[1]), k)
    if kind == "random":
        return random_state(cfg["M"], k, cfg["seed"] if seed is None else seed)
    raise UsageError(f"unknown state {kind!r}")


def _state_job(args):
    command, cfg, seed = args
    psi = make_state(cfg, seed)
    k = psi.kval
    row = {"state": psi.label, "seed": seed if cfg["state"] == "random" else None}
    violations = []
    if psi.tail_flag:
        row["tail_warning"] = psi.tail
    if command == "entropy":
        rep = F.entropy_report(psi, cfg["renyi"])
        bound, conj = I.wehrl_bound(k)
        row.update(rep.to_dict())
        row["index_bound"] = bound
        row["conjecture"] = conj
        row["conjecture_consistent"] = rep.wehrl >= conj - 1e-8
        if cfg["p"] is not None:
            row["lp_norm"] = F.lp_norm_q(psi, cfg["p"])
        if rep.wehrl < bound - 1e-8:
            violations.append(f"entropy below bound (seed {seed})")
    elif command == "fisher":
        rep = F.fisher_integral(psi, cfg["q"])
        row.update(rep.to_dict())
        if rep.rel_residual >= 1e-7:
            violations.append(f"Fisher identity residual {rep.rel_residual:.3g}")
    elif command == "sobolev":
        rep = I.sobolev_check(psi, k, cfg["q"])
        row.update(rep.to_dict())
        if not rep.holds:
            violations.append("Sobolev inequality violated")
    elif command == "norm-bound":
        rep = I.norm_estimate_check(psi, k, cfg["q"])
        row.update(rep.to_dict())
        if not rep.holds:
            violations.append("norm estimate violated")
    return row, violations


def _pool_map(fn, jobs):
    workers = S.worker_count()
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def run_state_command(command: str, cfg: dict):
    if cfg["seeds"] < 1:
        raise UsageError("seeds must be >= 1")
    if cfg["seeds"] > 1 and cfg["state"] != "random":
        raise UsageError("--seeds needs --state random")
    seeds = [cfg["seed"] + i for i in range(cfg["seeds"])]
    out = _pool_map(_state_job, [(command, cfg, s) for s in seeds])
    rows = [r for r, _ in out]
    violations = [v for _, vs in out for v in vs]
    result = rows[0] if len(rows) == 1 else {"rows": rows}
    return result, violations


def run_sobolev_minimizer(cfg: dict):
    prof, val = I.minimize_sobolev_functional(cfg["k"], cfg["q"], grid_size=cfg["grid_size"])
    target = I.norm_constant(cfg["k"], cfg["q"])
    if cfg["csv"]:
        prof.to_csv(cfg["csv"])
    result = {"value": val, "constant": target, "rel_error": (val - target) / target,
              "shape_error": I.profile_shape_error(prof), "meta": prof.meta}
    violations = []
    if val < target * (1 - 1e-4):
        violations.append("minimized quotient below the sharp constant")
    return result, violations


def run_entropy_energy(cfg: dict):
    pts = [I.phi_star(t, cfg["k_max"]) for t in cfg["t"]]
    if cfg["csv"]:
        with open(cfg["csv"], "w") as fh:
            fh.write("t,phi_star,phi_r2,minimizing_k\n")
            for p in pts:
                fh.write(f"{p.t:.17g},{p.phi_star:.17g},{p.phi_r2:.17g},{p.minimizing_k:g}\n")
    k = cfg["k"]
    gap = I.beckner_tangent_gap(k)
    result = {"points": [p.to_dict() for p in pts],
              "tangent_gap": {"k": k, "gap": gap,
                              "series_order2": I.tangent_gap_series(k, 2),
                              "series_order4": I.tangent_gap_series(k, 4)}}
    violations = [f"phi_star not below planar value at t={p.t}" for p in pts if not p.strict]
    return result, violations


def run_family(cfg: dict):
    rows = [I.sobolev_family_check(kt).to_dict() for kt in cfg["k_tilde"]]
    violations = [f"family inequality violated at k_tilde={r['params']['k_tilde']}"
                  for r in rows if not r["holds"]]
    return {"rows": rows}, violations


def ode_params(cfg: dict) -> O.OdeParams:
    kq = cfg["kq"]
    gamma = cfg["gamma"]
    if gamma is None:
        gamma = kq / (kq - 2) if cfg["preset"] == "extremizer_consistent" else 1.0
        cfg["gamma"] = gamma
    return O.OdeParams.from_preset(cfg["preset"], kq, gamma)


def run_shoot(cfg: dict):
    P = ode_params(cfg)
    alpha = 1.0 if cfg["alpha"] is None else cfg["alpha"]
    cfg["alpha"] = alpha
    tr = O.shoot(alpha, P, cfg["tau_max"])
    if cfg["csv"]:
        tr.to_csv(cfg["csv"])
    result = tr.summary()
    result["critical_points"] = O.critical_points(P).__dict__
    ok, inc = O.energy_monotone(tr)
    result["energy_max_increase_rel"] = inc
    return result, [] if ok else ["energy increased along the trajectory"]


def run_ground_state(cfg: dict):
    P = ode_params(cfg)
    gs = O.bisect_ground_state(P, tol_alpha=cfg["tol"], tau_max=cfg["tau_max"])
    res = gs.to_dict()
    res["params"] = P.as_dict()
    if P.preset == "extremizer_consistent":
        res["exact_residual"] = O.exact_solution_residual(P, gs.alpha)
    return res, []


def run_admissibility(cfg: dict):
    P = ode_params(cfg)
    alpha = cfg["alpha"]
    if alpha is None:
        alpha = O.bisect_ground_state(P, tau_max=cfg["tau_max"]).alpha
        cfg["alpha"] = alpha
    rep = O.admissibility_report(alpha, P, cfg["tau_max"])
    return rep, [] if rep["ok"] else ["admissibility check failed"]


def run_suite(cfg: dict):
    names = cfg["checks"]
    if names:
        bad = [n for n in names if n not in S.CHECKS]
        if bad:
            raise UsageError(f"unknown checks: {', '.join(bad)}")
    results = S.run_checks(cfg["level"], names)
    rows = [r.to_dict(cfg["timing"]) for r in results]
    violations = [r.name for r in results if not r.passed]
    return {"checks": rows, "passed": sum(r.passed for r in results),
            "total": len(results)}, violations


def execute(command: str, cfg: dict):
    if command in ("entropy", "fisher", "norm-bound"):
        return run_state_command(command, cfg)
    if command == "sobolev":
        return run_sobolev_minimizer(cfg) if cfg["minimize"] else run_state_command(command, cfg)
    return {
        "entropy-energy": run_entropy_energy,
        "family": run_family,
        "shoot": run_shoot,
        "ground-state": run_ground_state,
        "admissibility": run_admissibility,
        "suite": run_suite,
    }[command](cfg)


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def emit(doc: dict, path: str | None) -> None:
    text = json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    config_path = ns.pop("config", None)
    try:
        cfg = resolve(command, ns, config_path)
        result, violations = execute(command, cfg)
    except (UsageError, OSError) as exc:
        print(f"hyperwehrl: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except PropertyViolation as exc:
        emit({"schema_version": SCHEMA_VERSION, "command": command, "status": "violation",
              "violations": [str(exc)], "report": exc.report}, ns.get("out"))
        return EXIT_VIOLATION
    except (HyperWehrlError, ValueError) as exc:
        print(f"hyperwehrl: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    doc = {"schema_version": SCHEMA_VERSION, "command": command, "config": cfg,
           "status": "violation" if violations else "ok", "violations": violations,
           "result": result}
    emit(doc, cfg.get("out"))
    return EXIT_VIOLATION if violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
