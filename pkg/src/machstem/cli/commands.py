"""
Command line interface for machstem.
Every verb validates a RunConfig and hands it to run(), which returns the exit code.
"""

import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import click
import numpy as np
import orjson
import pydantic

from machstem import __version__
from machstem.cli.report import report_render
from machstem.models.core import (
    ErrorCode,
    FluidState,
    FrequencyPoint,
    MachStemError,
    NotFoundError,
    PlanarShock,
    ShockStrength,
    StrengthKind,
    ValidationError,
)
from machstem.models.documents import RunConfig
from machstem.services.asymptotics import asymptotic_checks
from machstem.services.eos import bethe_weyl_report, find_weak_regime, load_eos, thermo_eval
from machstem.services.machstem import continue_family, verify_family
from machstem.services.normal_modes import lopatinskii, normalized_lopatinskii
from machstem.services.shock import galilean_shift, solve_downstream
from machstem.services.stability import (
    c_star,
    classify,
    prop1_sweep,
    proposition1_check,
    relation_check,
    scan_real_roots,
    solve_v,
    worksheet_from_shock,
)
from machstem.utils.logging import configure_logging, get_logger
from machstem.utils.pool import map_ordered
from machstem.utils.serialization import (
    FAMILY_COLUMNS,
    artifact,
    dumps,
    family_payload,
    family_rows,
    load_family,
    load_shock,
    shock_payload,
    to_plain,
    write_artifact,
    write_csv,
)

logger = get_logger("cli")

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_NUMERICAL = 3
EXIT_INPUT = 4

EXIT_CODES: dict[ErrorCode, int] = {
    ErrorCode.VALIDATION: EXIT_INVARIANT,
    ErrorCode.ADMISSIBILITY: EXIT_INVARIANT,
    ErrorCode.DOMAIN: EXIT_INPUT,
    ErrorCode.CONFIG: EXIT_INPUT,
}

SCAN_COLUMNS = ("re_z", "im_z", "eta", "re_delta", "im_delta", "normalized_abs")


def exit_code_for(code: ErrorCode | str) -> int:
    """Exit status for an error code; numerical failures default to 3."""
    return EXIT_CODES.get(ErrorCode(code), EXIT_NUMERICAL)


@dataclass
class Outcome:
    """What a verb produced, before it is written anywhere."""
    kind: str
    payload: Any
    exit_code: int = EXIT_OK
    error: Optional[dict[str, Any]] = None
    csv: Optional[tuple[Sequence[str], list[list[Any]]]] = None


# Verb handlers

def _thermo(config: RunConfig) -> Outcome:
    assert config.eos_path is not None
    eos = load_eos(config.eos_path)
    return Outcome("thermo", thermo_eval(eos, config.params["tau"], config.params["s"]))


def _eos_report(config: RunConfig) -> Outcome:
    assert config.eos_path is not None
    p = config.params
    report = bethe_weyl_report(load_eos(config.eos_path), tuple(p["tau_range"]), tuple(p["s_range"]), tuple(p["grid"]))
    return Outcome("bethe_weyl", report)


def _eos_find_weak(config: RunConfig) -> Outcome:
    assert config.eos_path is not None
    p = config.params
    search = find_weak_regime(
        load_eos(config.eos_path), tuple(p["tau0_range"]), tuple(p["s0_range"]), tuple(p["ratio_range"]), p["grid"]
    )
    if search.found:
        return Outcome("weak_search", search)
    error = NotFoundError(f"no weakly stable shock among {search.evaluated} evaluated (best margin {search.best_margin:.6g})")
    return Outcome("weak_search", search, exit_code_for(error.code), error.to_dict())


def _shock_solve(config: RunConfig) -> Outcome:
    assert config.eos_path is not None
    p = config.params
    eos = load_eos(config.eos_path)
    upstream = FluidState(tau=p["tau0"], u=p["u0"], v=-1.0, s=p["s0"])
    shock = solve_downstream(eos, upstream, ShockStrength(StrengthKind(p["strength_kind"]), p["strength"]))
    if p["tangential"] == "critical":
        shock = galilean_shift(shock, -worksheet_from_shock(shock).V)
    elif p["tangential"] == "zero":
        shock = galilean_shift(shock, 0.0)
    regime = classify(shock.mach1, shock.thermo1.gruneisen, shock.nu)
    logger.info(f"Shock M1={shock.mach1:.6g}, nu={shock.nu:.6g}, regime {regime.regime.value}")
    return Outcome("shock", shock_payload(shock))


def _triple(config: RunConfig) -> tuple[float, float, float, float]:
    p = config.params
    return p["m1"], p["gamma1"], p["nu"], p.get("c1", 1.0)


def _stability_classify(config: RunConfig) -> Outcome:
    mach1, gruneisen1, nu, _ = _triple(config)
    return Outcome("regime", classify(mach1, gruneisen1, nu))


def _stability_v(config: RunConfig) -> Outcome:
    return Outcome("worksheet", solve_v(*_triple(config))[1])


def _stability_cstar(config: RunConfig) -> Outcome:
    speed, phi, beta = c_star(*_triple(config))
    relations = relation_check(*_triple(config))
    return Outcome("cstar", {"c_star": speed, "phi": phi, "beta": beta, "relations": relations})


def _stability_prop1(config: RunConfig) -> Outcome:
    report = proposition1_check(*_triple(config))
    if report.passed:
        return Outcome("prop1", report)
    error = ValidationError(f"critical speeds disagree: gap {report.gap:.3e}", ["prop1_gap"])
    return Outcome("prop1", report, EXIT_INVARIANT, error.to_dict())


def _stability_sweep(config: RunConfig) -> Outcome:
    report = prop1_sweep(config.params["samples"], config.seed, config.threads)
    if not report.failures:
        return Outcome("prop1_sweep", report)
    error = ValidationError(f"{report.failures} of {report.samples} samples exceed the gap tolerance", ["prop1_gap"])
    return Outcome("prop1_sweep", report, EXIT_INVARIANT, error.to_dict())


def _scan_sample(shock: PlanarShock, eta: float) -> Callable[[float], list[float]]:
    def sample(z: float) -> list[float]:
        frequency = FrequencyPoint(complex(z), eta)
        try:
            value = lopatinskii(shock, frequency)
            size = normalized_lopatinskii(shock, frequency)
        except MachStemError:
            return [z, 0.0, eta, math.nan, math.nan, math.nan]
        return [z, 0.0, eta, value.real, value.imag, size]

    return sample


def _lopatinskii_scan(config: RunConfig) -> Outcome:
    assert config.shock_path is not None
    p = config.params
    shock = load_shock(config.shock_path)
    eta = p["eta"]
    scale = (shock.thermo1.c + abs(shock.u_bar)) * eta
    interval = tuple(p["z_range"]) if p.get("z_range") else (-5.0 * scale, 5.0 * scale)
    roots = scan_real_roots(shock, eta, interval, p["grid"])
    zs = [float(z) for z in np.linspace(interval[0], interval[1], p["grid"])]
    rows = map_ordered(_scan_sample(shock, eta), zs, config.threads)
    sizes = [row[-1] for row in rows if not math.isnan(row[-1])]
    payload = {
        "eta": eta,
        "u_bar": shock.u_bar,
        "interval": list(interval),
        "roots": roots,
        "floor": min(sizes) if sizes else None,
    }
    return Outcome("scan", payload, csv=(SCAN_COLUMNS, rows))


def _machstem_build(config: RunConfig) -> Outcome:
    assert config.shock_path is not None and config.eps_grid is not None
    family = continue_family(load_shock(config.shock_path), config.eps_grid)
    outcome = Outcome("family", family_payload(family), csv=(FAMILY_COLUMNS, family_rows(family)))
    if family.failure is not None:
        outcome.exit_code = exit_code_for(family.failure.code)
        outcome.error = {
            "code": family.failure.code,
            "message": family.failure.message,
            "failures": family.failure.failures,
        }
    return outcome


def _machstem_verify(config: RunConfig) -> Outcome:
    assert config.family_path is not None
    family = load_family(config.family_path)
    diagnostics = verify_family(family)
    items = [
        {
            "eps": pattern.eps,
            "rh_max": max(d.rh_residual_s1, d.rh_residual_s2, d.rh_residual_s3, d.rh_residual_cd),
            "pressure_gap": d.pressure_gap,
            "passed": d.passed,
            "failures": d.failures,
        }
        for pattern, d in zip(family.patterns, diagnostics)
    ]
    failed = [item for item in items if not item["passed"]]
    payload = {"patterns": items, "passed": not failed}
    if not failed:
        return Outcome("verify", payload)
    names = sorted({name for item in failed for name in item["failures"]})
    error = ValidationError(f"{len(failed)} stored patterns fail verification", names)
    return Outcome("verify", payload, EXIT_INVARIANT, error.to_dict())


def _asymptotics(config: RunConfig) -> Outcome:
    assert config.shock_path is not None
    report = asymptotic_checks(load_shock(config.shock_path), config.eps_grid)
    if not report.flagged:
        return Outcome("asymptotics", report)
    error = ValidationError("asymptotic coefficients disagree with finite differences", report.flagged)
    return Outcome("asymptotics", report, EXIT_INVARIANT, error.to_dict())


HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "thermo": _thermo,
    "eos.report": _eos_report,
    "eos.find_weak": _eos_find_weak,
    "shock.solve": _shock_solve,
    "stability.classify": _stability_classify,
    "stability.v": _stability_v,
    "stability.cstar": _stability_cstar,
    "stability.prop1": _stability_prop1,
    "stability.sweep": _stability_sweep,
    "lopatinskii.scan": _lopatinskii_scan,
    "machstem.build": _machstem_build,
    "machstem.verify": _machstem_verify,
    "asymptotics": _asymptotics,
}


def _emit(config: RunConfig, outcome: Outcome) -> int:
    if config.output_format == "table":
        text = report_render(outcome.kind, to_plain(outcome.payload))
    else:
        text = dumps(artifact(outcome.kind, outcome.payload)).decode()

    out = config.out
    if out is not None and out.suffix.lower() == ".csv" and outcome.csv is not None:
        write_csv(out, *outcome.csv)
        click.echo(text)
    elif out is not None and config.output_format == "table":
        out.write_text(text + "\n")
    elif out is not None:
        write_artifact(out, outcome.kind, outcome.payload)
    else:
        click.echo(text)

    if config.csv_path is not None and outcome.csv is not None:
        write_csv(config.csv_path, *outcome.csv)
    if outcome.error is not None:
        click.echo(orjson.dumps({"error": outcome.error}).decode(), err=True)
    return outcome.exit_code


def run(config: RunConfig) -> int:
    """Execute one validated invocation and return its exit code."""
    logger.info(f"Running {config.verb}")
    code = _emit(config, HANDLERS[config.verb](config))
    logger.info(f"Finished {config.verb} with exit code {code}")
    return code


# Click plumbing

class MachStemGroup(click.Group):
    """Root group that turns every failure into an error document and an exit code."""

    def main(  # type: ignore[override]
        self,
        args: Optional[Sequence[str]] = None,
        prog_name: Optional[str] = None,
        complete_var: Optional[str] = None,
        standalone_mode: bool = True,
        **extra: Any,
    ) -> Any:
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                              standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else EXIT_OK
        except click.ClickException as exc:
            exc.show()
            code = EXIT_INPUT
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        except MachStemError as exc:
            code = _fail(exc.to_dict(), exit_code_for(exc.code))
        except pydantic.ValidationError as exc:
            code = _fail({"code": ErrorCode.CONFIG.value, "message": str(exc)}, EXIT_INPUT)
        except (OSError, ValueError) as exc:
            code = _fail({"code": ErrorCode.CONFIG.value, "message": str(exc)}, EXIT_INPUT)
        if standalone_mode:
            sys.exit(code)
        return code


def _fail(error: dict[str, Any], code: int) -> int:
    logger.error(f"{error['code']}: {error['message']}")
    click.echo(orjson.dumps({"error": error}).decode(), err=True)
    return code


def _config(ctx: click.Context, verb: str, **fields: Any) -> RunConfig:
    root = ctx.find_root().obj or {}
    return RunConfig(
        verb=verb,
        output_format=root.get("output_format", "json"),
        threads=root.get("threads"),
        **fields,
    )


def _parse_floats(text: str, sep: str) -> list[float]:
    try:
        return [float(part) for part in text.split(sep)]
    except ValueError as exc:
        raise click.BadParameter(f"{text!r} is not a {sep}-separated list of numbers") from exc


def _range_option(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[tuple[float, float]]:
    if value is None:
        return None
    parts = _parse_floats(value, ":")
    if len(parts) != 2:
        raise click.BadParameter("expected a range a:b")
    return parts[0], parts[1]


def _counts_option(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[tuple[int, ...]]:
    if value is None:
        return None
    try:
        return tuple(int(part) for part in value.split(","))
    except ValueError as exc:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of integers") from exc


def parse_eps_grid(text: str) -> list[float]:
    """Parse 'a:b:n' (n log-spaced values from a to b) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise click.BadParameter("expected a:b:n")
        a, b = _parse_floats(":".join(parts[:2]), ":")
        try:
            count = int(parts[2])
        except ValueError as exc:
            raise click.BadParameter(f"{parts[2]!r} is not an integer count") from exc
        if count < 1 or a == 0.0 or b == 0.0 or (a > 0.0) != (b > 0.0):
            raise click.BadParameter("a and b must be nonzero with the same sign, n >= 1")
        return [float(x) for x in np.geomspace(a, b, count)]
    return _parse_floats(text, ",")


def _eps_option(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[list[float]]:
    return None if value is None else parse_eps_grid(value)


EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUTPUT_FILE = click.Path(dir_okay=False, writable=True, path_type=Path)

out_option = click.option("--out", type=OUTPUT_FILE, default=None, help="Write the result here instead of stdout.")
eos_option = click.option("--eos", "eos_path", type=EXISTING_FILE, required=True, help="EOS JSON document.")
shock_option = click.option("--shock", "shock_path", type=EXISTING_FILE, required=True, help="Shock artifact.")


def triple_options(fn: Callable[..., Any]) -> Callable[..., Any]:
    fn = click.option("--c1", type=float, default=1.0, show_default=True, help="Downstream sound speed.")(fn)
    fn = click.option("--nu", type=float, required=True, help="Compression ratio tau0/tau1 - 1.")(fn)
    fn = click.option("--gamma1", type=float, required=True, help="Downstream Gruneisen coefficient.")(fn)
    fn = click.option("--m1", type=float, required=True, help="Downstream Mach number.")(fn)
    return fn


@click.group(cls=MachStemGroup)
@click.version_option(__version__, prog_name="machstem")
@click.option("--format", "output_format", type=click.Choice(["json", "table"]), default="json", show_default=True)
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
              default=None, help="Overrides MACHSTEM_LOG_LEVEL.")
@click.option("--threads", type=click.IntRange(min=1), default=None, help="Overrides MACHSTEM_THREADS.")
@click.pass_context
def cli(ctx: click.Context, output_format: str, log_level: Optional[str], threads: Optional[int]) -> None:
    """Planar shocks, their weak stability and the Mach stem family they bifurcate into."""
    configure_logging(log_level)
    ctx.obj = {"output_format": output_format, "threads": threads}


@cli.command()
@eos_option
@click.option("--tau", type=float, required=True)
@click.option("--s", type=float, required=True)
@out_option
@click.pass_context
def thermo(ctx: click.Context, eos_path: Path, tau: float, s: float, out: Optional[Path]) -> int:
    """Thermodynamic quantities at one (tau, s) point."""
    return run(_config(ctx, "thermo", eos_path=eos_path, params={"tau": tau, "s": s}, out=out))


@cli.group()
def eos() -> None:
    """Equation-of-state checks."""


@eos.command("report")
@eos_option
@click.option("--tau-range", callback=_range_option, required=True, help="a:b")
@click.option("--s-range", callback=_range_option, required=True, help="a:b")
@click.option("--grid", callback=_counts_option, default="20,20", show_default=True, help="n,m")
@out_option
@click.pass_context
def eos_report(ctx: click.Context, eos_path: Path, tau_range: tuple[float, float], s_range: tuple[float, float],
               grid: tuple[int, ...], out: Optional[Path]) -> int:
    """Bethe-Weyl inequalities over a (tau, s) box."""
    if len(grid) != 2:
        raise click.BadParameter("expected n,m", param_hint="--grid")
    params = {"tau_range": tau_range, "s_range": s_range, "grid": grid}
    return run(_config(ctx, "eos.report", eos_path=eos_path, params=params, out=out))


@eos.command("find-weak")
@eos_option
@click.option("--tau0-range", callback=_range_option, required=True, help="a:b")
@click.option("--s0-range", callback=_range_option, required=True, help="a:b")
@click.option("--ratio-range", callback=_range_option, required=True, help="a:b with 0 < a < b < 1")
@click.option("--grid", callback=_counts_option, default="16", show_default=True,
              help="n ratios, or n_tau0,n_s0,n ratios")
@out_option
@click.pass_context
def eos_find_weak(ctx: click.Context, eos_path: Path, tau0_range: tuple[float, float], s0_range: tuple[float, float],
                  ratio_range: tuple[float, float], grid: tuple[int, ...], out: Optional[Path]) -> int:
    """Search for a weakly stable shock of this EOS."""
    if len(grid) == 1:
        grid = (3, 3, grid[0])
    elif len(grid) != 3:
        raise click.BadParameter("expected n or n_tau0,n_s0,n", param_hint="--grid")
    params = {"tau0_range": tau0_range, "s0_range": s0_range, "ratio_range": ratio_range, "grid": grid}
    return run(_config(ctx, "eos.find_weak", eos_path=eos_path, params=params, out=out))


@cli.group()
def shock() -> None:
    """Planar shocks."""


@shock.command("solve")
@eos_option
@click.option("--tau0", type=float, required=True)
@click.option("--s0", type=float, required=True)
@click.option("--u0", type=float, default=0.0, show_default=True, help="Upstream tangential velocity.")
@click.option("--tau1", type=float, default=None)
@click.option("--mass-flux", type=float, default=None)
@click.option("--pressure-ratio", type=float, default=None)
@click.option("--tangential", type=click.Choice(["zero", "critical", "keep"]), default="keep", show_default=True,
              help="Tangential velocity of the stored shock: 0, -V, or --u0.")
@out_option
@click.pass_context
def shock_solve(ctx: click.Context, eos_path: Path, tau0: float, s0: float, u0: float, tau1: Optional[float],
                mass_flux: Optional[float], pressure_ratio: Optional[float], tangential: str,
                out: Optional[Path]) -> int:
    """Solve the jump conditions for the downstream state."""
    given = {
        StrengthKind.TAU1: tau1,
        StrengthKind.MASS_FLUX: mass_flux,
        StrengthKind.PRESSURE_RATIO: pressure_ratio,
    }
    chosen = [(kind, value) for kind, value in given.items() if value is not None]
    if len(chosen) != 1:
        raise click.UsageError("give exactly one of --tau1, --mass-flux, --pressure-ratio")
    kind, value = chosen[0]
    params = {"tau0": tau0, "s0": s0, "u0": u0, "strength_kind": kind.value, "strength": value,
              "tangential": tangential}
    return run(_config(ctx, "shock.solve", eos_path=eos_path, params=params, out=out))


@cli.group()
def stability() -> None:
    """Stability classification and the critical tangential speed."""


def _triple_params(m1: float, gamma1: float, nu: float, c1: float) -> dict[str, float]:
    return {"m1": m1, "gamma1": gamma1, "nu": nu, "c1": c1}


@stability.command("classify")
@triple_options
@out_option
@click.pass_context
def stability_classify(ctx: click.Context, m1: float, gamma1: float, nu: float, c1: float,
                       out: Optional[Path]) -> int:
    """Uniform, weak or violent instability of (M1, Gamma1, nu)."""
    return run(_config(ctx, "stability.classify", params=_triple_params(m1, gamma1, nu, c1), out=out))


@stability.command("v")
@triple_options
@out_option
@click.pass_context
def stability_v(ctx: click.Context, m1: float, gamma1: float, nu: float, c1: float, out: Optional[Path]) -> int:
    """Critical speed V and its worksheet."""
    return run(_config(ctx, "stability.v", params=_triple_params(m1, gamma1, nu, c1), out=out))


@stability.command("cstar")
@triple_options
@out_option
@click.pass_context
def stability_cstar(ctx: click.Context, m1: float, gamma1: float, nu: float, c1: float,
                    out: Optional[Path]) -> int:
    """Critical speed from the S3 front angle."""
    return run(_config(ctx, "stability.cstar", params=_triple_params(m1, gamma1, nu, c1), out=out))


@stability.command("prop1")
@triple_options
@out_option
@click.pass_context
def stability_prop1(ctx: click.Context, m1: float, gamma1: float, nu: float, c1: float,
                    out: Optional[Path]) -> int:
    """Check that both critical-speed routes agree."""
    return run(_config(ctx, "stability.prop1", params=_triple_params(m1, gamma1, nu, c1), out=out))


@stability.command("sweep")
@click.option("--samples", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=int, default=None, help="Defaults to MACHSTEM_SEED.")
@out_option
@click.pass_context
def stability_sweep(ctx: click.Context, samples: int, seed: Optional[int], out: Optional[Path]) -> int:
    """Seeded random sweep of the critical-speed agreement."""
    return run(_config(ctx, "stability.sweep", params={"samples": samples}, seed=seed, out=out))


@cli.group("lopatinskii")
def lopatinskii_group() -> None:
    """Lopatinskii determinant of a stored shock."""


@lopatinskii_group.command("scan")
@shock_option
@click.option("--eta", type=float, default=1.0, show_default=True)
@click.option("--z-range", callback=_range_option, default=None, help="a:b, defaults to five speeds either side")
@click.option("--grid", type=click.IntRange(min=16), default=2000, show_default=True)
@out_option
@click.option("--csv", "csv_path", type=OUTPUT_FILE, default=None, help="Grid samples as CSV.")
@click.pass_context
def lopatinskii_scan(ctx: click.Context, shock_path: Path, eta: float, z_range: Optional[tuple[float, float]],
                     grid: int, out: Optional[Path], csv_path: Optional[Path]) -> int:
    """Real zeros of the determinant; a .csv --out receives the sampled grid."""
    params = {"eta": eta, "z_range": z_range, "grid": grid}
    return run(_config(ctx, "lopatinskii.scan", shock_path=shock_path, params=params, out=out, csv_path=csv_path))


@cli.group("machstem")
def machstem_group() -> None:
    """Mach stem patterns bifurcating from a weakly stable shock."""


@machstem_group.command("build")
@shock_option
@click.option("--eps-grid", callback=_eps_option, required=True, help="a:b:n log-spaced, or a comma list")
@out_option
@click.option("--csv", "csv_path", type=OUTPUT_FILE, default=None, help="One row per pattern.")
@click.pass_context
def machstem_build(ctx: click.Context, shock_path: Path, eps_grid: list[float], out: Optional[Path],
                   csv_path: Optional[Path]) -> int:
    """Continue the pattern family over the eps grid."""
    return run(_config(ctx, "machstem.build", shock_path=shock_path, eps_grid=eps_grid, out=out, csv_path=csv_path))


@machstem_group.command("verify")
@click.argument("family_path", type=EXISTING_FILE)
@out_option
@click.pass_context
def machstem_verify(ctx: click.Context, family_path: Path, out: Optional[Path]) -> int:
    """Re-check every invariant of a stored family."""
    return run(_config(ctx, "machstem.verify", family_path=family_path, out=out))


@cli.command()
@shock_option
@click.option("--eps-grid", callback=_eps_option, default=None, help="Positive eps values, default 2e-3,1e-3,5e-4")
@out_option
@click.pass_context
def asymptotics(ctx: click.Context, shock_path: Path, eps_grid: Optional[list[float]], out: Optional[Path]) -> int:
    """First-order coefficients of the family against finite differences."""
    return run(_config(ctx, "asymptotics", shock_path=shock_path, eps_grid=eps_grid, out=out))
