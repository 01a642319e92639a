"""Command-line front end: config parsing, experiment orchestration, CSV
emission, exit-code discipline.

Commands: sweep | resonance | split-check | wavefunction | propagate |
linear-oracle.  Every run is described by a YAML config (unknown keys are
rejected); a few common flags (--out, --threads, --seed) override config
values.  Exit codes: 0 success, 1 compute failure, 2 usage/config error.

CSV outputs are deterministic: floats at 17 significant digits and a
``# config-hash:`` provenance line derived from the canonical config.
"""

from __future__ import annotations

import hashlib
import json
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click
import yaml

from .errors import ConfigError, GPScatterError, NoSteadyState
from .integrator import IntegratorConfig
from .linref import potential_matrix, transmission
from .model import (
    DoubleGaussian,
    PhysicalParams,
    Potential,
    RectangularWell,
    Zero,
    load_tabulated,
    support,
)
from .resonance import find_resonance, split_check, sweep
from .scatter import Direction, ScatterProblem, WaveState, solve_scattering
from .tdse import Absorber, Grid, SourceSpec, propagate, steady_state_transmission

__all__ = ["RunConfig", "TDConfig", "load_config", "main"]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

_POTENTIAL_KEYS = {
    "rectangular_well": {"kind", "V0", "a"},
    "double_gaussian": {"kind", "V0", "b", "alpha"},
    "tabulated": {"kind", "path"},
    "zero": {"kind"},
}
_PARAMS_KEYS = {"mu", "g", "m", "hbar"}
_INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "max_step", "min_step", "max_steps"}
_TD_KEYS = {
    "x_lo", "x_hi", "n", "dt", "f0", "x0", "t_final", "snapshot_every",
    "convergence", "window", "probe", "ramp_time", "absorber", "t_max",
}
_ABSORBER_KEYS = {"width", "strength"}
_TOP_KEYS = {
    "potential", "params", "C", "direction", "mu_range", "n_points",
    "bracket", "xprime", "random_cuts", "tol_mu", "tol_T", "integrator",
    "n_samples", "conjugate", "td", "out", "threads", "seed",
    "e_range", "n_energies", "n_segments", "same_direction",
}


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


def _as_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{where} must be a number or a [re, im] pair")


def _complex_out(z: complex):
    return float(z.real) if z.imag == 0.0 else [float(z.real), float(z.imag)]


def _as_pair(value, where: str) -> tuple[float, float]:
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        lo, hi = float(value[0]), float(value[1])
        if not lo < hi:
            raise ConfigError(f"{where} must satisfy lo < hi, got [{lo}, {hi}]")
        return (lo, hi)
    raise ConfigError(f"{where} must be a [lo, hi] pair")


@dataclass(frozen=True)
class TDConfig:
    grid: Grid
    absorber: Absorber
    f0: complex
    x0: float | None = None
    t_final: float = 600.0
    t_max: float = 600.0
    snapshot_every: float | None = None
    convergence: float = 0.01
    window: float = 30.0
    probe: tuple[float, float] | None = None
    ramp_time: float = 20.0


@dataclass(frozen=True)
class RunConfig:
    pot: Potential
    pot_spec: dict
    params: PhysicalParams
    C: complex = 1.0 + 0.0j
    direction: Direction = Direction.LEFT_TO_RIGHT
    mu_range: tuple[float, float] | None = None
    n_points: int = 101
    bracket: tuple[float, float] | None = None
    xprime: tuple[float, ...] = ()
    random_cuts: int = 0
    tol_mu: float = 1e-8
    tol_T: float = 1e-6
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    n_samples: int = 1000
    conjugate: bool = False
    td: TDConfig | None = None
    out: str | None = None
    threads: int = 1
    seed: int = 0
    e_range: tuple[float, float] = (0.05, 10.0)
    n_energies: int = 200
    n_segments: int = 2048
    same_direction: bool = False

    def to_mapping(self) -> dict:
        """Canonical form: parsing it back yields an equal RunConfig."""
        out: dict = {
            "potential": dict(self.pot_spec),
            "params": {
                "mu": self.params.mu,
                "g": self.params.g,
                "m": self.params.m,
                "hbar": self.params.hbar,
            },
            "C": _complex_out(self.C),
            "direction": self.direction.value,
            "n_points": self.n_points,
            "tol_mu": self.tol_mu,
            "tol_T": self.tol_T,
            "integrator": {
                "rel_tol": self.integrator.rel_tol,
                "abs_tol": self.integrator.abs_tol,
                "max_step": self.integrator.max_step,
                "min_step": self.integrator.min_step,
                "max_steps": self.integrator.max_steps,
            },
            "n_samples": self.n_samples,
            "conjugate": self.conjugate,
            "threads": self.threads,
            "seed": self.seed,
            "e_range": list(self.e_range),
            "n_energies": self.n_energies,
            "n_segments": self.n_segments,
            "same_direction": self.same_direction,
        }
        if self.mu_range is not None:
            out["mu_range"] = list(self.mu_range)
        if self.bracket is not None:
            out["bracket"] = list(self.bracket)
        if self.xprime:
            out["xprime"] = list(self.xprime)
        if self.random_cuts:
            out["random_cuts"] = self.random_cuts
        if self.out is not None:
            out["out"] = self.out
        if self.td is not None:
            td: dict = {
                "x_lo": self.td.grid.x_lo,
                "x_hi": self.td.grid.x_hi,
                "n": self.td.grid.n,
                "dt": self.td.grid.dt,
                "absorber": {
                    "width": self.td.absorber.width,
                    "strength": self.td.absorber.strength,
                },
                "f0": _complex_out(self.td.f0),
                "t_final": self.td.t_final,
                "t_max": self.td.t_max,
                "convergence": self.td.convergence,
                "window": self.td.window,
                "ramp_time": self.td.ramp_time,
            }
            if self.td.x0 is not None:
                td["x0"] = self.td.x0
            if self.td.snapshot_every is not None:
                td["snapshot_every"] = self.td.snapshot_every
            if self.td.probe is not None:
                td["probe"] = list(self.td.probe)
            out["td"] = td
        return out

    def config_hash(self) -> str:
        # Fingerprint what determines the computed values: output
        # destination and worker count never change the numbers, so two
        # runs of the same physics hash identically.
        mapping = self.to_mapping()
        mapping.pop("out", None)
        mapping.pop("threads", None)
        canon = json.dumps(mapping, sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


def _parse_potential(spec) -> tuple[Potential, dict]:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("potential must be a mapping with a 'kind' key")
    kind = spec["kind"]
    if kind not in _POTENTIAL_KEYS:
        raise ConfigError(
            f"unknown potential kind {kind!r}; expected one of "
            f"{sorted(_POTENTIAL_KEYS)}"
        )
    _reject_unknown(spec, _POTENTIAL_KEYS[kind], f"potential ({kind})")
    try:
        if kind == "rectangular_well":
            pot: Potential = RectangularWell(float(spec["V0"]), float(spec["a"]))
        elif kind == "double_gaussian":
            pot = DoubleGaussian(
                float(spec["V0"]), float(spec["b"]), float(spec["alpha"])
            )
        elif kind == "tabulated":
            pot = load_tabulated(str(spec["path"]))
        else:
            pot = Zero()
    except KeyError as exc:
        raise ConfigError(f"potential ({kind}) missing key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential parameters: {exc}") from None
    canonical = {"kind": kind}
    for key in sorted(_POTENTIAL_KEYS[kind] - {"kind"}):
        canonical[key] = spec[key] if kind == "tabulated" else float(spec[key])
    return pot, canonical


def parse_config(mapping: dict) -> RunConfig:
    if not isinstance(mapping, dict):
        raise ConfigError("config root must be a mapping")
    _reject_unknown(mapping, _TOP_KEYS, "config")
    if "potential" not in mapping or "params" not in mapping:
        raise ConfigError("config requires 'potential' and 'params' sections")
    pot, pot_spec = _parse_potential(mapping["potential"])

    pr = mapping["params"]
    if not isinstance(pr, dict):
        raise ConfigError("params must be a mapping")
    _reject_unknown(pr, _PARAMS_KEYS, "params")
    if "mu" not in pr:
        raise ConfigError("params requires mu")
    try:
        params = PhysicalParams(
            mu=float(pr["mu"]),
            g=float(pr.get("g", 0.0)),
            m=float(pr.get("m", 1.0)),
            hbar=float(pr.get("hbar", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad params: {exc}") from None

    kwargs: dict = {}
    if "integrator" in mapping:
        icfg = mapping["integrator"]
        _reject_unknown(icfg, _INTEGRATOR_KEYS, "integrator")
        defaults = IntegratorConfig()
        try:
            kwargs["integrator"] = IntegratorConfig(
                rel_tol=float(icfg.get("rel_tol", defaults.rel_tol)),
                abs_tol=float(icfg.get("abs_tol", defaults.abs_tol)),
                max_step=float(icfg.get("max_step", defaults.max_step)),
                min_step=float(icfg.get("min_step", defaults.min_step)),
                max_steps=int(icfg.get("max_steps", defaults.max_steps)),
            )
        except ValueError as exc:
            raise ConfigError(f"bad integrator config: {exc}") from None

    if "direction" in mapping:
        try:
            kwargs["direction"] = Direction(mapping["direction"])
        except ValueError:
            raise ConfigError(
                f"direction must be one of {[d.value for d in Direction]}"
            ) from None
    if "C" in mapping:
        kwargs["C"] = _as_complex(mapping["C"], "C")
    if "mu_range" in mapping:
        kwargs["mu_range"] = _as_pair(mapping["mu_range"], "mu_range")
    if "bracket" in mapping:
        kwargs["bracket"] = _as_pair(mapping["bracket"], "bracket")
    if "e_range" in mapping:
        kwargs["e_range"] = _as_pair(mapping["e_range"], "e_range")
    if "xprime" in mapping:
        xs = mapping["xprime"]
        if isinstance(xs, (int, float)):
            xs = [xs]
        if not isinstance(xs, (list, tuple)) or not all(
            isinstance(v, (int, float)) for v in xs
        ):
            raise ConfigError("xprime must be a number or list of numbers")
        kwargs["xprime"] = tuple(float(v) for v in xs)
    for key, kind in [
        ("n_points", int), ("random_cuts", int), ("n_samples", int),
        ("threads", int), ("seed", int), ("n_energies", int),
        ("n_segments", int), ("tol_mu", float), ("tol_T", float),
    ]:
        if key in mapping:
            try:
                kwargs[key] = kind(mapping[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key} must be a {kind.__name__}") from None
    for key in ("conjugate", "same_direction"):
        if key in mapping:
            if not isinstance(mapping[key], bool):
                raise ConfigError(f"{key} must be a boolean")
            kwargs[key] = mapping[key]
    if "out" in mapping:
        kwargs["out"] = str(mapping["out"])

    if "td" in mapping:
        td = mapping["td"]
        _reject_unknown(td, _TD_KEYS, "td")
        for req in ("x_lo", "x_hi", "n", "dt", "absorber"):
            if req not in td:
                raise ConfigError(f"td requires {req}")
        ab = td["absorber"]
        _reject_unknown(ab, _ABSORBER_KEYS, "td.absorber")
        try:
            grid = Grid(
                x_lo=float(td["x_lo"]), x_hi=float(td["x_hi"]),
                n=int(td["n"]), dt=float(td["dt"]),
            )
            absorber = Absorber(
                width=float(ab["width"]), strength=float(ab["strength"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad td config: {exc}") from None
        kwargs["td"] = TDConfig(
            grid=grid,
            absorber=absorber,
            f0=_as_complex(td.get("f0", 0.0), "td.f0"),
            x0=float(td["x0"]) if "x0" in td else None,
            t_final=float(td.get("t_final", 600.0)),
            t_max=float(td.get("t_max", td.get("t_final", 600.0))),
            snapshot_every=(
                float(td["snapshot_every"]) if "snapshot_every" in td else None
            ),
            convergence=float(td.get("convergence", 0.01)),
            window=float(td.get("window", 30.0)),
            probe=_as_pair(td["probe"], "td.probe") if "probe" in td else None,
            ramp_time=float(td.get("ramp_time", 20.0)),
        )

    return RunConfig(pot=pot, pot_spec=pot_spec, params=params, **kwargs)


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from None
    return parse_config(raw)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _apply_overrides(cfg: RunConfig, out, threads, seed) -> RunConfig:
    from dataclasses import replace

    if out is not None:
        cfg = replace(cfg, out=out)
    if threads is not None:
        cfg = replace(cfg, threads=threads)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    return cfg


def _require_out(cfg: RunConfig) -> Path:
    if cfg.out is None:
        raise ConfigError("this command writes a file: set 'out' or pass --out")
    return Path(cfg.out)


def _write_csv(path: Path, cfg: RunConfig, header: str, rows: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# config-hash: {cfg.config_hash()}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _config_arg(func):
    func = click.option("--seed", type=int, default=None,
                        help="Seed for randomized choices (overrides config).")(func)
    func = click.option("--threads", type=int, default=None,
                        help="Worker threads for sweeps (overrides config).")(func)
    func = click.option("--out", type=click.Path(), default=None,
                        help="Output path (overrides config).")(func)
    func = click.option("--config", "config_path", type=click.Path(exists=True),
                        required=True, help="YAML run configuration.")(func)
    return func


def _load(config_path, out, threads, seed) -> RunConfig:
    return _apply_overrides(load_config(config_path), out, threads, seed)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

@click.group()
def main() -> None:
    """Nonlinear (Gross-Pitaevskii) barrier-scattering toolkit."""


@main.command("sweep")
@_config_arg
def cmd_sweep(config_path, out, threads, seed) -> None:
    """Transmission vs chemical potential; CSV mu,T2,status."""
    cfg = _load(config_path, out, threads, seed)
    if cfg.mu_range is None:
        raise ConfigError("sweep requires mu_range")
    path = _require_out(cfg)
    curve = sweep(
        cfg.pot, cfg.params, cfg.mu_range[0], cfg.mu_range[1], cfg.n_points,
        cfg.C, cfg.direction, cfg.integrator, cfg.threads,
    )
    rows = [
        f"{_fmt(mu)},{_fmt(t2) if t2 is not None else ''},{status}"
        for mu, t2, status in curve.points
    ]
    _write_csv(path, cfg, "mu,T2,status", rows)
    n_ok = sum(1 for s in curve.status if s == "ok")
    frac = n_ok / len(curve.points)
    click.echo(f"wrote {path} ({n_ok}/{len(curve.points)} points ok)")
    if frac < 0.9:
        raise _ComputeFailure(f"only {frac:.0%} of sweep points solved")


@main.command("resonance")
@_config_arg
def cmd_resonance(config_path, out, threads, seed) -> None:
    """Locate a unit-transmission resonance inside the config bracket."""
    cfg = _load(config_path, out, threads, seed)
    if cfg.bracket is None:
        raise ConfigError("resonance requires bracket")
    mu_res = find_resonance(
        cfg.pot, cfg.params, cfg.bracket, cfg.C, cfg.tol_mu, cfg.tol_T,
        cfg.integrator,
    )
    result = solve_scattering(
        ScatterProblem(cfg.pot, cfg.params.with_mu(mu_res), C=cfg.C,
                       direction=cfg.direction),
        cfg.integrator,
    )
    click.echo(
        f"unit-transmission resonance in ({_fmt(cfg.bracket[0])}, "
        f"{_fmt(cfg.bracket[1])}): 1 - T2 = {1.0 - result.T2:.3e}, "
        f"|A| = {abs(result.A):.6g}, kA = {result.kA:.6g}"
    )
    click.echo(f"mu_res={_fmt(mu_res)}")
    if cfg.out is not None:
        _write_csv(Path(cfg.out), cfg, "mu_res,T2",
                   [f"{_fmt(mu_res)},{_fmt(result.T2)}"])


@main.command("split-check")
@_config_arg
def cmd_split_check(config_path, out, threads, seed) -> None:
    """Six transmissions and theorem residuals for each requested cut."""
    cfg = _load(config_path, out, threads, seed)
    path = _require_out(cfg)
    cuts = list(cfg.xprime)
    if cfg.random_cuts:
        rng = random.Random(cfg.seed)
        lo, hi = support(cfg.pot)
        if not lo < hi:
            raise ConfigError("random_cuts needs a potential with finite support")
        cuts.extend(rng.uniform(lo, hi) for _ in range(cfg.random_cuts))
    if not cuts:
        raise ConfigError("split-check requires xprime and/or random_cuts")
    rows = []
    n_fail = 0
    for xp in cuts:
        rep = split_check(cfg.pot, cfg.params, cfg.params.mu, xp, cfg.C,
                          cfg.integrator)
        n_fail += len(rep.errors)
        cells = [_fmt(xp), _fmt(rep.mu)]
        for value in (rep.T2_full_LR, rep.T2_full_RL, rep.T2_L_LR,
                      rep.T2_L_RL, rep.T2_R_LR, rep.T2_R_RL, rep.r1, rep.r2):
            cells.append(_fmt(value) if value is not None else "")
        cells.append(";".join(f"{k}={v}" for k, v in sorted(rep.errors.items())))
        rows.append(",".join(cells))
    _write_csv(
        path, cfg,
        "xprime,mu,T2_full_LR,T2_full_RL,T2_L_LR,T2_L_RL,T2_R_LR,T2_R_RL,"
        "r1,r2,errors",
        rows,
    )
    total = 6 * len(cuts)
    click.echo(f"wrote {path} ({total - n_fail}/{total} sub-solves ok)")
    if n_fail > 0.1 * total:
        raise _ComputeFailure(f"{n_fail}/{total} sub-solves failed")


@main.command("wavefunction")
@_config_arg
def cmd_wavefunction(config_path, out, threads, seed) -> None:
    """Sampled stationary wavefunction as CSV (ascending x)."""
    cfg = _load(config_path, out, threads, seed)
    path = _require_out(cfg)
    problem = ScatterProblem(cfg.pot, cfg.params, C=cfg.C,
                             direction=cfg.direction)
    result = solve_scattering(problem, cfg.integrator,
                              n_samples=max(cfg.n_samples, 2))
    assert result.wavefunction is not None
    samples = list(result.wavefunction)
    if samples[0].x > samples[-1].x:
        samples.reverse()
    chi: dict[float, complex] = {}
    header = "x,re_psi,im_psi,density,current"
    if cfg.conjugate:
        chi = _conjugate_retrace(problem, cfg, result.wavefunction)
        header += ",re_chi,im_chi"
    rows = []
    for s in samples:
        j = s.current(cfg.params)
        row = (
            f"{_fmt(s.x)},{_fmt(s.psi.real)},{_fmt(s.psi.imag)},"
            f"{_fmt(abs(s.psi) ** 2)},{_fmt(j)}"
        )
        if cfg.conjugate:
            c = chi[s.x]
            row += f",{_fmt(c.real)},{_fmt(c.imag)}"
        rows.append(row)
    _write_csv(path, cfg, header, rows)
    click.echo(f"wrote {path} ({len(samples)} samples, T2 = {_fmt(result.T2)})")


def _conjugate_retrace(
    problem: ScatterProblem, cfg: RunConfig, states: tuple[WaveState, ...]
) -> dict[float, complex]:
    """Conjugated field re-integrated across the exact sample positions."""
    from .integrator import integrate

    upstream = states[-1]
    chi = WaveState(upstream.x, upstream.psi.conjugate(),
                    upstream.dpsi.conjugate())
    values = {chi.x: chi.psi}
    for target in reversed(states[:-1]):
        chi = integrate(chi, target.x, problem.params, problem.pot,
                        cfg.integrator)
        values[chi.x] = chi.psi
    return values


@main.command("propagate")
@_config_arg
def cmd_propagate(config_path, out, threads, seed) -> None:
    """Drive the time-dependent field; snapshot CSVs plus a T2 line."""
    cfg = _load(config_path, out, threads, seed)
    if cfg.td is None:
        raise ConfigError("propagate requires a td section")
    td = cfg.td
    lo, _hi = support(cfg.pot)
    x0 = td.x0 if td.x0 is not None else lo - 2.0
    if td.snapshot_every is not None:
        base = _require_out(cfg)
        snaps = propagate(
            cfg.pot, cfg.params, SourceSpec(td.f0, x0, cfg.params.mu),
            td.grid, td.absorber, td.t_final, td.snapshot_every,
            ramp_time=td.ramp_time,
        )
        x = td.grid.points()
        for idx, snap in enumerate(snaps):
            p = base.with_name(f"{base.stem}_{idx:04d}{base.suffix or '.csv'}")
            rows = [
                f"{_fmt(xv)},{_fmt(pv.real)},{_fmt(pv.imag)},{_fmt(abs(pv) ** 2)}"
                for xv, pv in zip(x, snap.psi)
            ]
            _write_csv(p, cfg, f"# t: {_fmt(snap.t)}\nx,re_psi,im_psi,density",
                       rows)
        click.echo(f"wrote {len(snaps)} snapshots to {base.parent}")
    if td.f0 == 0.0:
        click.echo("T2=nan")
        return
    try:
        t2 = steady_state_transmission(
            cfg.pot, cfg.params, cfg.params.mu, td.f0, td.grid, td.absorber,
            td.convergence, t_max=td.t_max, window=td.window, probe=td.probe,
            x0=td.x0, ramp_time=td.ramp_time,
        )
    except NoSteadyState as exc:
        click.echo("T2=nan")
        raise _ComputeFailure(str(exc)) from None
    click.echo(f"T2={_fmt(t2)}")


@main.command("linear-oracle")
@_config_arg
def cmd_linear_oracle(config_path, out, threads, seed) -> None:
    """Cross-check the g=0 ODE pipeline against the transfer-matrix method."""
    cfg = _load(config_path, out, threads, seed)
    path = _require_out(cfg)
    if cfg.params.g != 0.0:
        raise ConfigError("linear-oracle requires g = 0")
    lo, hi = cfg.e_range
    if not 0.0 < lo < hi:
        raise ConfigError("e_range must satisfy 0 < lo < hi")
    rows = []
    max_diff = 0.0
    n_fail = 0
    for i in range(cfg.n_energies):
        e = lo + (hi - lo) * i / max(cfg.n_energies - 1, 1)
        t2_matrix = transmission(
            potential_matrix(cfg.pot, e, cfg.params.m, cfg.params.hbar,
                             cfg.n_segments)
        )
        try:
            t2_ode = solve_scattering(
                ScatterProblem(cfg.pot, cfg.params.with_mu(e), C=cfg.C),
                cfg.integrator,
            ).T2
        except GPScatterError as exc:
            rows.append(f"{_fmt(e)},,{_fmt(t2_matrix)},,{type(exc).__name__}")
            n_fail += 1
            continue
        diff = abs(t2_ode - t2_matrix)
        max_diff = max(max_diff, diff)
        rows.append(f"{_fmt(e)},{_fmt(t2_ode)},{_fmt(t2_matrix)},{_fmt(diff)},ok")
    _write_csv(path, cfg, "E,T2_ode,T2_matrix,abs_diff,status", rows)
    click.echo(f"wrote {path}")
    click.echo(f"max_abs_diff={_fmt(max_diff)}")
    if n_fail > 0.1 * cfg.n_energies:
        raise _ComputeFailure(f"{n_fail}/{cfg.n_energies} ODE solves failed")


# --------------------------------------------------------------------------
# exit-code discipline
# --------------------------------------------------------------------------

class _ComputeFailure(Exception):
    """Raised by commands to signal exit code 1 after partial output."""


_original_main = main.main


def _main_with_exit_codes(*args, **kwargs):
    kwargs["standalone_mode"] = False
    try:
        return _original_main(*args, **kwargs)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(130)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    except _ComputeFailure as exc:
        click.echo(f"compute failure: {exc}", err=True)
        sys.exit(1)
    except GPScatterError as exc:
        click.echo(f"compute failure: {type(exc).__name__}: {exc}", err=True)
        sys.exit(1)


main.main = _main_with_exit_codes  # type: ignore[method-assign]
