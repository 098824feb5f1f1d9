"""Command-line front end.

One binary, subcommand style.  Every run is deterministic given its
parameters and seed, and every artifact embeds the full parameter echo
plus a hash, so ``ietspec replay ARTIFACT`` reproduces it byte for byte.
Grid sweeps honour ``--threads`` without changing output (per-point seeds
derive from the energy, not the schedule).

Exit codes: 0 ok, 2 usage, 3 numeric failure.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import click

from . import __version__, kernels
from .gordon import (
    GrowthSpec,
    build_liouville_rotation,
    find_return_times,
    gordon_certificate,
    liouville_gordon_certificate,
)
from .iet import (
    Iet,
    find_alignment,
    golden_rotation,
    iet_from_json_dict,
    keane_falsify,
    orbit,
)
from .permutation import (
    build_graph,
    classify,
    is_irreducible,
    is_type_w,
    parse_permutation,
    rotation_class,
)
from .sampling import function_from_json_dict, pair_witness, scan_discontinuous_power
from .spectral import (
    ac_indicator,
    lyapunov_grid,
    potential,
    spectrum_hausdorff,
    truncated_spectrum,
)

CSV_COMMANDS = {"orbit", "lyapunov", "spectrum"}


def _load_spec(arg: str) -> dict:
    text = Path(arg).read_text() if not arg.lstrip().startswith("{") else arg
    return json.loads(text)


def _resolve_iet(arg: str) -> Iet:
    if arg.strip() == "golden":
        return golden_rotation()
    return iet_from_json_dict(_load_spec(arg))


def _resolve_function(arg: str):
    return function_from_json_dict(_load_spec(arg))


def _config_echo(params: dict) -> tuple[str, str]:
    canon = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return canon, hashlib.sha256(canon.encode()).hexdigest()[:16]


def _json_artifact(params: dict, result) -> str:
    canon, digest = _config_echo(params)
    return json.dumps(
        {
            "tool": "ietspec",
            "version": __version__,
            "config_hash": digest,
            "config": params,
            "result": result,
        },
        indent=2,
    )


def _csv_artifact(params: dict, header: list[str], rows: list[list]) -> str:
    if params.get("format") == "json":
        return _json_artifact(params, {"header": header, "rows": rows})
    canon, digest = _config_echo(params)
    lines = [
        f"# ietspec {__version__}",
        f"# config-hash: {digest}",
        f"# config: {canon}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def execute(params: dict, threads: int = 1) -> str:
    """Run one command from its parameter dictionary; returns the artifact.

    ``threads`` is an execution detail: it never enters the artifact, so
    outputs are identical for any worker-pool size.
    """
    cmd = params["command"]
    runner = _RUNNERS.get(cmd)
    if runner is None:
        raise ValueError(f"unknown command {cmd!r}")
    return runner(params, max(1, threads))


def _run_perm(params: dict, threads: int = 1) -> str:
    p = parse_permutation(params["permutation"])
    result: dict = {"permutation": list(p.image), "irreducible": is_irreducible(p)}
    if not result["irreducible"]:
        result["warning"] = "reducible permutation: graph and Type W analysis skipped"
        result["rotation_class_k"] = rotation_class(p)
    else:
        g = build_graph(p)
        meta = None
        if params.get("function") is not None:
            meta = _resolve_function(params["function"]).metadata
        report = classify(p, meta)
        result["graph"] = g.to_json_dict()
        result["dot"] = g.to_dot()
        trace = is_type_w(p)
        result["type_w_trace"] = {"a": list(trace.a), "s": trace.s, "verdict": trace.verdict}
        result["classification"] = report.to_json_dict()
    return _json_artifact(params, result)


def _run_orbit(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    pts = orbit(t, _parse_point(t, params["w"]), params["n_from"], params["n_to"])
    rows = [[n, float(x)] for n, x in zip(range(params["n_from"], params["n_to"] + 1), pts)]
    return _csv_artifact(params, ["n", "value"], rows)


def _parse_point(t: Iet, w):
    if t.mode == "rational":
        from fractions import Fraction

        return Fraction(str(w))
    return float(w)


def _run_keane(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    v = keane_falsify(t, params["horizon"])
    result = {
        "status": v.status,
        "horizon": v.horizon,
        "min_separation": v.min_separation,
        "witness": None
        if v.witness is None
        else {
            "source_index": v.witness.source_index,
            "step": v.witness.step,
            "target_index": v.witness.target_index,
            "value": str(v.witness.value),
            "distance": v.witness.distance,
        },
    }
    return _json_artifact(params, result)


def _run_scan(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    w = scan_discontinuous_power(t, f, params["n_max"], params["tau"])
    result = None if w is None else {"n": w.n, "wd": w.wd, "gap": w.gap}
    return _json_artifact(params, {"witness": result})


def _run_pair_witness(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    rep = pair_witness(t, f, params["n"], params["wd"], params["depth"], params["ks"])
    result = {
        "n": rep.n,
        "wd": rep.wd,
        "depth": rep.depth,
        "ks": list(rep.ks),
        "expected_gap": rep.expected_gap,
        "forward_gaps": list(rep.forward_gaps),
        "backward_sups": list(rep.backward_sups),
        "forward_converges": rep.forward_converges,
        "backward_shrinks": rep.backward_shrinks,
        "verdict": rep.verdict,
    }
    return _json_artifact(params, result)


def _run_lyapunov(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    energies = _energy_grid(params)
    ests = lyapunov_grid(
        t, f, energies, params["n"], params["m_samples"], params["seed"], threads
    )
    rows = [[e.energy, e.mean, e.stderr, e.n, e.m_samples] for e in ests]
    return _csv_artifact(params, ["E", "mean", "stderr", "n", "m"], rows)


def _energy_grid(params: dict) -> list[float]:
    if params.get("energies"):
        return [float(x) for x in params["energies"]]
    lo, hi, n = params["e_min"], params["e_max"], params["e_points"]
    if n < 1 or hi < lo:
        raise ValueError("bad energy grid")
    if n == 1:
        return [float(lo)]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _run_spectrum(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    m = params["size"]
    v = potential(t, f, params["w"], 0, m)
    sa = truncated_spectrum(v, m)
    rows = [[i, float(ev)] for i, ev in enumerate(sa.eigenvalues)]
    return _csv_artifact(params, ["index", "eigenvalue"], rows)


def _run_ac_report(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    m = params["size"]
    v = potential(t, f, params["w"], 0, m)
    sa = truncated_spectrum(v, m)
    lo = float(sa.eigenvalues[0]) - 0.1
    hi = float(sa.eigenvalues[-1]) + 0.1
    energies = [lo + (hi - lo) * i / (params["e_points"] - 1) for i in range(params["e_points"])]
    ests = lyapunov_grid(
        t, f, energies, params["n"], params["m_samples"], params["seed"], threads
    )
    rep = ac_indicator(ests, sa, params["tau"])
    result = rep.to_json_dict()
    result["grid"] = {"min": lo, "max": hi, "points": params["e_points"]}
    # a second base point probes omega-independence of the spectrum
    if params.get("w2") is not None:
        v2 = potential(t, f, params["w2"], 0, m)
        sb = truncated_spectrum(v2, m)
        result["hausdorff_to_w2"] = spectrum_hausdorff(sa, sb)
    return _json_artifact(params, result)


def _run_gordon(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    f = _resolve_function(params["function"])
    cert = gordon_certificate(t, f, params["w"], params["qs"], params["cs"])
    result = cert.to_json_dict()
    if params.get("return_times"):
        result["return_times"] = [
            {"q": q, "displacement": d}
            for q, d in find_return_times(t, params["w"], params["q_max"], params["top"])
        ]
    return _json_artifact(params, result)


def _run_liouville_build(params: dict, threads: int = 1) -> str:
    growth = GrowthSpec.from_text(params["growth"])
    rot = build_liouville_rotation(growth, params["k_max"], params["dps"])
    result = rot.to_json_dict()
    if params.get("function") is not None:
        f = _resolve_function(params["function"])
        cert = liouville_gordon_certificate(rot, f, params["cs"])
        result["certificate"] = cert.to_json_dict()
    return _json_artifact(params, result)


def _run_align(params: dict, threads: int = 1) -> str:
    t = _resolve_iet(params["iet"])
    l = find_alignment(
        t,
        _parse_point(t, params["w"]),
        _parse_point(t, params["w2"]),
        params["n"],
        params["eps"],
        params["search_limit"],
    )
    return _json_artifact(params, {"l": l})


_RUNNERS = {
    "perm": _run_perm,
    "orbit": _run_orbit,
    "keane": _run_keane,
    "scan": _run_scan,
    "pair-witness": _run_pair_witness,
    "lyapunov": _run_lyapunov,
    "spectrum": _run_spectrum,
    "ac-report": _run_ac_report,
    "gordon": _run_gordon,
    "liouville-build": _run_liouville_build,
    "align": _run_align,
}


# ---------------------------------------------------------------------------
# click wiring


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON file with default parameters for the subcommand.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the artifact here instead of stdout.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Artifact format (commands have a natural default).")
@click.pass_context
def main(ctx, config_path, seed, threads, out_path, fmt):
    """Interval exchange dynamics, cocycles and spectral diagnostics."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = json.loads(Path(config_path).read_text()) if config_path else {}
    ctx.obj["seed"] = seed
    ctx.obj["threads"] = threads
    ctx.obj["out"] = out_path
    ctx.obj["format"] = fmt


def _merge_params(ctx, command: str, explicit: dict) -> dict:
    """Config-file values, overridden only by flags the user actually set."""
    from click.core import ParameterSource

    params = dict(ctx.obj["config"])
    for k, v in explicit.items():
        src = ctx.get_parameter_source(k)
        user_set = src is not None and src != ParameterSource.DEFAULT
        if user_set or k not in params:
            if v is not None or k not in params:
                params[k] = v
    params["command"] = command
    params.setdefault("seed", ctx.obj["seed"])
    if ctx.obj.get("format") and command in CSV_COMMANDS:
        params["format"] = ctx.obj["format"]
    return params


def _emit(ctx, params: dict) -> None:
    try:
        text = execute(params, threads=ctx.obj.get("threads", 1))
    except (ValueError, ArithmeticError, IndexError) as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(3)
        return
    out = ctx.obj.get("out")
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=not text.endswith("\n"))


@main.command("perm")
@click.argument("permutation")
@click.option("--function", default=None, help="Sampling-function JSON (inline or path).")
@click.pass_context
def cmd_perm(ctx, permutation, function):
    """Combinatorial analysis of a permutation in one-line notation."""
    _emit(ctx, _merge_params(ctx, "perm", {"permutation": permutation, "function": function}))


@main.command("orbit")
@click.option("--iet", required=True, help='IET JSON (inline or path), or "golden".')
@click.option("--w", default="0", show_default=True)
@click.option("--from", "n_from", type=int, default=0, show_default=True)
@click.option("--to", "n_to", type=int, default=100, show_default=True)
@click.pass_context
def cmd_orbit(ctx, iet, w, n_from, n_to):
    """Stream an orbit segment as CSV (n, value)."""
    _emit(ctx, _merge_params(ctx, "orbit", {"iet": iet, "w": w, "n_from": n_from, "n_to": n_to}))


@main.group("iet")
def iet_group():
    """IET-level utilities (alias namespace)."""


iet_group.add_command(cmd_orbit, name="orbit")


@main.command("keane")
@click.option("--iet", required=True)
@click.option("--horizon", type=int, default=1000, show_default=True)
@click.pass_context
def cmd_keane(ctx, iet, horizon):
    """Search endpoint orbits for Keane-condition violations."""
    _emit(ctx, _merge_params(ctx, "keane", {"iet": iet, "horizon": horizon}))


@main.command("scan")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--n-max", type=int, default=20, show_default=True)
@click.option("--tau", type=float, default=1e-6, show_default=True)
@click.pass_context
def cmd_scan(ctx, iet, function, n_max, tau):
    """Scan composed powers for a discontinuity witness."""
    _emit(ctx, _merge_params(ctx, "scan", {
        "iet": iet, "function": function, "n_max": n_max, "tau": tau}))


@main.command("pair-witness")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--n", type=int, required=True)
@click.option("--wd", type=float, required=True)
@click.option("--depth", type=int, default=50, show_default=True)
@click.option("--ks", default="100,1000,10000", show_default=True)
@click.pass_context
def cmd_pair_witness(ctx, iet, function, n, wd, depth, ks):
    """Straddling-pair diagnostic at a discontinuity of a composed power."""
    _emit(ctx, _merge_params(ctx, "pair-witness", {
        "iet": iet, "function": function, "n": n, "wd": wd, "depth": depth,
        "ks": [int(x) for x in ks.split(",")]}))


@main.command("lyapunov")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--e-min", type=float, default=-3.0, show_default=True)
@click.option("--e-max", type=float, default=3.0, show_default=True)
@click.option("--e-points", type=int, default=61, show_default=True)
@click.option("--energies", default=None, help="Comma list overriding the grid.")
@click.option("--n", type=int, default=100000, show_default=True)
@click.option("--m-samples", type=int, default=2, show_default=True)
@click.pass_context
def cmd_lyapunov(ctx, iet, function, e_min, e_max, e_points, energies, n, m_samples):
    """Lyapunov-exponent sweep as CSV (E, mean, stderr, n, m)."""
    _emit(ctx, _merge_params(ctx, "lyapunov", {
        "iet": iet, "function": function, "e_min": e_min, "e_max": e_max,
        "e_points": e_points,
        "energies": [float(x) for x in energies.split(",")] if energies else None,
        "n": n, "m_samples": m_samples}))


@main.command("spectrum")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--w", type=float, default=0.0, show_default=True)
@click.option("--size", "-M", type=int, default=200, show_default=True)
@click.pass_context
def cmd_spectrum(ctx, iet, function, w, size):
    """Eigenvalues of the M-site Dirichlet truncation as CSV."""
    _emit(ctx, _merge_params(ctx, "spectrum", {
        "iet": iet, "function": function, "w": w, "size": size}))


@main.command("ac-report")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--w", type=float, default=0.0, show_default=True)
@click.option("--w2", type=float, default=None,
              help="Second base point for the omega-independence probe.")
@click.option("--size", "-M", type=int, default=1000, show_default=True)
@click.option("--e-points", type=int, default=200, show_default=True)
@click.option("--n", type=int, default=100000, show_default=True)
@click.option("--m-samples", type=int, default=2, show_default=True)
@click.option("--tau", type=float, default=0.01, show_default=True)
@click.pass_context
def cmd_ac_report(ctx, iet, function, w, w2, size, e_points, n, m_samples, tau):
    """Low-exponent fraction near the truncated spectrum (JSON report)."""
    _emit(ctx, _merge_params(ctx, "ac-report", {
        "iet": iet, "function": function, "w": w, "w2": w2, "size": size,
        "e_points": e_points, "n": n, "m_samples": m_samples, "tau": tau}))


@main.command("gordon")
@click.option("--iet", required=True)
@click.option("--function", required=True)
@click.option("--w", type=float, default=0.0, show_default=True)
@click.option("--qs", required=True, help="Comma list of scales, strictly increasing.")
@click.option("--cs", default="1", show_default=True)
@click.option("--return-times/--no-return-times", default=False)
@click.option("--q-max", type=int, default=100, show_default=True)
@click.option("--top", type=int, default=10, show_default=True)
@click.pass_context
def cmd_gordon(ctx, iet, function, w, qs, cs, return_times, q_max, top):
    """Enumerated Gordon certificate at explicit scales (JSON)."""
    _emit(ctx, _merge_params(ctx, "gordon", {
        "iet": iet, "function": function, "w": w,
        "qs": [int(x) for x in qs.split(",")],
        "cs": [float(x) for x in cs.split(",")],
        "return_times": return_times, "q_max": q_max, "top": top}))


@main.command("liouville-build")
@click.option("--growth", default="exp:3", show_default=True,
              help='Displacement target: "exp:RATE" or "power:RATE".')
@click.option("--k-max", type=int, default=3, show_default=True)
@click.option("--dps", type=int, default=220, show_default=True)
@click.option("--function", default=None,
              help="Sampling function: also emit its Gordon certificate.")
@click.option("--cs", default="2", show_default=True)
@click.pass_context
def cmd_liouville_build(ctx, growth, k_max, dps, function, cs):
    """Build a rotation number with prescribed near-period decay (JSON)."""
    _emit(ctx, _merge_params(ctx, "liouville-build", {
        "growth": growth, "k_max": k_max, "dps": dps, "function": function,
        "cs": [float(x) for x in cs.split(",")]}))


@main.command("align")
@click.option("--iet", required=True)
@click.option("--w", default="0")
@click.option("--w2", default="0.25")
@click.option("--n", type=int, default=5, show_default=True)
@click.option("--eps", type=float, default=0.05, show_default=True)
@click.option("--search-limit", type=int, default=100000, show_default=True)
@click.pass_context
def cmd_align(ctx, iet, w, w2, n, eps, search_limit):
    """Find a shift aligning two orbits through a whole window (JSON)."""
    _emit(ctx, _merge_params(ctx, "align", {
        "iet": iet, "w": w, "w2": w2, "n": n, "eps": eps,
        "search_limit": search_limit}))


@main.command("replay")
@click.argument("artifact", type=click.Path(exists=True))
@click.pass_context
def cmd_replay(ctx, artifact):
    """Re-run the command embedded in an artifact's config echo."""
    text = Path(artifact).read_text()
    if text.lstrip().startswith("{"):
        params = json.loads(text)["config"]
    else:
        for line in text.splitlines():
            if line.startswith("# config: "):
                params = json.loads(line[len("# config: "):])
                break
        else:
            click.echo("error: artifact carries no config echo", err=True)
            ctx.exit(3)
            return
    _emit(ctx, params)


@main.command("backend")
@click.pass_context
def cmd_backend(ctx):
    """Report which kernel backend is active."""
    click.echo(json.dumps({
        "active": kernels.BACKEND,
        "available": kernels.available_backends(),
        "version": __version__,
    }))


if __name__ == "__main__":
    main()
