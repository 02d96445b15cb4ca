"""
Plain-text tables for the --format table output of every verb.
"""

from typing import Any, Mapping

from machstem.services.machstem import PRESSURE_TOL, RH_TOL

RH_FIELDS = ("rh_residual_s1", "rh_residual_s2", "rh_residual_s3", "rh_residual_cd")


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return "-"
    if isinstance(value, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return "[" + ", ".join(_fmt(float(v)) for v in value) + "]"
    return str(value)


def _flatten(payload: Any, prefix: str = "") -> list[tuple[str, str]]:
    if not isinstance(payload, dict):
        return [(prefix or "value", _fmt(payload))]
    rows: list[tuple[str, str]] = []
    for key in sorted(payload):
        name = f"{prefix}.{key}" if prefix else key
        value = payload[key]
        if isinstance(value, dict):
            rows.extend(_flatten(value, name))
        else:
            rows.append((name, _fmt(value)))
    return rows


def _columns(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)
    return "\n".join(lines)


def _status(rh_max: float, pressure_gap: float, failures: list[str]) -> str:
    """PASS when the jump and pressure residuals sit under their tolerances and no check failed."""
    return "PASS" if rh_max < RH_TOL and pressure_gap < PRESSURE_TOL and not failures else "FAIL"


def _pattern_status(diagnostics: Mapping[str, Any]) -> str:
    rh_max = max(float(diagnostics[name]) for name in RH_FIELDS)
    return _status(rh_max, float(diagnostics["pressure_gap"]), list(diagnostics["failures"]))


def _family(payload: dict[str, Any]) -> str:
    patterns = payload.get("patterns") or []
    lines: list[str] = []
    if not patterns:
        lines.append("no patterns")
    else:
        header = ["eps", "theta", "phi", "psi", "lambda", "u", "status", "failures"]
        rows = [
            [
                _fmt(p["eps"]), _fmt(p["theta"]), _fmt(p["phi"]), _fmt(p["psi"]),
                _fmt(p["lam"]), _fmt(p["u_upstream"]), _pattern_status(p["diagnostics"]),
                ",".join(p["diagnostics"]["failures"]) or "-",
            ]
            for p in patterns
        ]
        lines.append(_columns(header, rows))
    failure = payload.get("failure")
    if failure:
        lines.append(f"stopped at eps={_fmt(failure['eps'])}: {failure['code']}: {failure['message']}")
    return "\n".join(lines)


def _sweep(payload: dict[str, Any]) -> str:
    summary = _columns(
        ["samples", "seed", "failures", "min", "max", "median"],
        [[
            _fmt(payload["samples"]), _fmt(payload["seed"]), _fmt(payload["failures"]),
            _fmt(payload["min_gap"]), _fmt(payload["max_gap"]), _fmt(payload["median_gap"]),
        ]],
    )
    worst = payload.get("worst")
    if worst:
        summary += "\n" + _columns(["worst", "value"], [[k, v] for k, v in _flatten(worst)])
    return summary


def _scan(payload: dict[str, Any]) -> str:
    roots = sorted(payload.get("roots") or [], key=lambda r: r["z"])
    head = f"eta={_fmt(payload.get('eta'))} u_bar={_fmt(payload.get('u_bar'))} floor={_fmt(payload.get('floor'))}"
    if not roots:
        return head + "\nno real roots"
    rows = [[_fmt(r["z"]), _fmt(r["normalized_abs"]), r["method"]] for r in roots]
    return head + "\n" + _columns(["z", "|delta|", "method"], rows)


def _verify(payload: dict[str, Any]) -> str:
    rows = [
        [
            _fmt(item["eps"]), _fmt(item["rh_max"]), _fmt(item["pressure_gap"]),
            _status(item["rh_max"], item["pressure_gap"], item["failures"]),
            ",".join(item["failures"]) or "-",
        ]
        for item in payload["patterns"]
    ]
    if not rows:
        return "no patterns"
    return _columns(["eps", "rh_max", "pressure_gap", "status", "failures"], rows)


def report_render(kind: str, payload: Any) -> str:
    """Render a plain artifact payload as a text table."""
    if kind == "family":
        return _family(payload)
    if kind == "prop1_sweep":
        return _sweep(payload)
    if kind == "scan":
        return _scan(payload)
    if kind == "verify":
        return _verify(payload)
    return _columns(["field", "value"], [[k, v] for k, v in _flatten(payload)])
