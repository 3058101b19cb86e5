"""Command-line client for the qres service.

Runs the sweep endpoints either in process (default) or against a running
server (--server URL), then writes CSV/SVG outputs locally. Configuration
comes from an INI-style file (--config) overridden by command-line flags.

Exit codes: 0 success, 1 verification failure, 2 invalid configuration,
3 solver or interpolation non-convergence.

CSV values use '.' decimals and 12 significant digits. The runtime_s
column is left empty unless --timings is given, so repeated runs with the
same config and seed produce bytewise-identical files; wall times are
always available in the service JSON and the bench latency report.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import httpx
import numpy as np
from pydantic import ValidationError

from .errors import ConvergenceError, InvalidInputError, QresError, ResourceLimitError
from .runner import run_bench, run_ground_state, run_measure, run_verify
from .service.schemas import (
    BenchRequest,
    BenchResponse,
    GroundStateRequest,
    GroundStateResponse,
    MeasureRequest,
    MeasureResponse,
    VerifyRequest,
    VerifyResponse,
)
from .svg import Series, render_line_chart

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2
EXIT_NOT_CONVERGED = 3


class ServiceClient:
    """Dispatches requests in process or over HTTP, same models either way."""

    def __init__(self, server: str | None = None):
        self.server = server.rstrip("/") if server else None

    def _post(self, path: str, req, response_model):
        if self.server is None:
            raise RuntimeError("in-process calls do not go through _post")
        resp = httpx.post(f"{self.server}{path}", json=req.model_dump(), timeout=None)
        resp.raise_for_status()
        return response_model.model_validate(resp.json())

    def ground_state(self, req: GroundStateRequest) -> GroundStateResponse:
        if self.server:
            return self._post("/v1/ground-state", req, GroundStateResponse)
        return run_ground_state(req)

    def measure(self, req: MeasureRequest) -> MeasureResponse:
        if self.server:
            return self._post("/v1/measure", req, MeasureResponse)
        return run_measure(req)

    def verify(self, req: VerifyRequest) -> VerifyResponse:
        if self.server:
            return self._post("/v1/verify", req, VerifyResponse)
        return run_verify(req)

    def bench(self, req: BenchRequest) -> BenchResponse:
        if self.server:
            return self._post("/v1/bench", req, BenchResponse)
        return run_bench(req)


# -- option handling -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qres", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ground-state", "build or load ground states; write the energy table"),
        ("measure", "run a quantifier over the (size, h) sweep; write results CSV"),
        ("verify", "cross-check the sampled quantifier against brute force"),
        ("bench", "call-count scaling table and per-call latency report"),
        ("serve", "start the HTTP service (requires uvicorn)"),
    ):
        p = sub.add_parser(name, help=help_text)
        if name == "serve":
            p.add_argument("--host", default="127.0.0.1")
            p.add_argument("--port", type=int, default=8000)
            continue
        p.add_argument("--config", type=Path, help="INI file with a [run] section")
        p.add_argument("--model", choices=["ising1d", "ising2d"])
        p.add_argument("--sizes", help="comma list: '4,6,8' or '3x3,4x4'")
        p.add_argument("--h", dest="h_values", help="comma list '0.25,0.5' or range '0.1..1.0:10'")
        p.add_argument("--measure", choices=["sre2", "rec"])
        p.add_argument("--chi", type=int, help="input-state bond cap")
        p.add_argument("--xi", type=int, help="interpolation rank cap")
        p.add_argument("--tol", type=float, help="interpolation tolerance")
        p.add_argument("--solver", choices=["ed", "dmrg", "ghz-analytic"])
        p.add_argument("--out", type=Path, help="output directory (default ./qres-out)")
        p.add_argument("--seed", type=int)
        p.add_argument("--no-build", action="store_true", default=None,
                       help="fail instead of building missing ground states")
        p.add_argument("--threads", type=int)
        p.add_argument("--server", help="base URL of a running service; default in-process")
        p.add_argument("--cache-dir", help="snapshot directory (QRES_CACHE_DIR wins)")
        p.add_argument("--timings", action="store_true",
                       help="write real wall times into runtime_s (breaks byte determinism)")
        if name == "measure":
            p.add_argument("--svg", action="store_true", default=None,
                           help="also render a value-vs-h line chart")
        if name == "verify":
            p.add_argument("--tolerance", type=float, help="verification tolerance (default 1e-6)")
    return parser


_CONFIG_KEYS = {
    "model": str,
    "sizes": str,
    "h": str,
    "measure": str,
    "chi": int,
    "xi": int,
    "tol": float,
    "solver": str,
    "out": str,
    "seed": int,
    "no-build": bool,
    "threads": int,
    "server": str,
    "cache-dir": str,
    "svg": bool,
    "timings": bool,
    "tolerance": float,
}


def load_config_file(path: Path) -> dict:
    if not path.exists():
        raise InvalidInputError(f"config file {path} not found")
    parser = configparser.ConfigParser()
    parser.read(path)
    merged: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in _CONFIG_KEYS:
                raise InvalidInputError(f"unknown config key {key!r} in {path}")
            caster = _CONFIG_KEYS[key]
            if caster is bool:
                merged[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                merged[key] = caster(raw.strip())
    return merged


def parse_h_values(spec: str) -> list[float]:
    spec = spec.strip()
    if ".." in spec:
        lo_part, _, rest = spec.partition("..")
        hi_part, _, n_part = rest.partition(":")
        if not n_part:
            raise InvalidInputError(f"range needs a count: '{spec}' (use a..b:n)")
        lo, hi, n = float(lo_part), float(hi_part), int(n_part)
        if n < 1:
            raise InvalidInputError("range count must be >= 1")
        return [float(x) for x in np.linspace(lo, hi, n)]
    return [float(tok) for tok in spec.split(",") if tok.strip()]


def _merge_options(args: argparse.Namespace) -> dict:
    opts: dict = {}
    if getattr(args, "config", None):
        opts.update(load_config_file(args.config))
    flag_map = {
        "model": "model",
        "sizes": "sizes",
        "h_values": "h",
        "measure": "measure",
        "chi": "chi",
        "xi": "xi",
        "tol": "tol",
        "solver": "solver",
        "out": "out",
        "seed": "seed",
        "no_build": "no-build",
        "threads": "threads",
        "server": "server",
        "cache_dir": "cache-dir",
        "svg": "svg",
        "timings": "timings",
        "tolerance": "tolerance",
    }
    for attr, key in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            opts[key] = val
    return opts


def _request_kwargs(opts: dict) -> dict:
    kwargs: dict = {}
    if "model" in opts:
        kwargs["model"] = opts["model"]
    if "sizes" in opts:
        raw = opts["sizes"]
        kwargs["sizes"] = [t.strip() for t in str(raw).split(",") if t.strip()]
    if "h" in opts:
        kwargs["h_values"] = parse_h_values(str(opts["h"]))
    if "measure" in opts:
        kwargs["measure"] = opts["measure"]
    if "chi" in opts:
        kwargs["chi_max"] = opts["chi"]
    if "xi" in opts:
        kwargs["xi_max"] = opts["xi"]
    if "tol" in opts:
        kwargs["tci_tol"] = opts["tol"]
    if "solver" in opts:
        kwargs["solver"] = opts["solver"]
    if "seed" in opts:
        kwargs["seed"] = opts["seed"]
    if opts.get("no-build"):
        kwargs["no_build"] = True
    if "threads" in opts:
        kwargs["threads"] = opts["threads"]
    if "cache-dir" in opts:
        kwargs["cache_dir"] = opts["cache-dir"]
    if "tolerance" in opts:
        kwargs["tolerance"] = opts["tolerance"]
    return kwargs


# -- output formatting ---------------------------------------------------------


def fmt_value(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if x != x:  # nan
            return "nan"
        return f"{x:.12g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _runtime_cell(seconds: float, timings: bool):
    return seconds if timings else None


# -- subcommands ---------------------------------------------------------------


def cmd_ground_state(client: ServiceClient, opts: dict, out_dir: Path) -> int:
    req = GroundStateRequest(**_request_kwargs(opts))
    resp = client.ground_state(req)
    timings = bool(opts.get("timings"))
    rows = [
        [r.size, r.h, r.energy, r.chi_used, r.solver, _runtime_cell(r.runtime_s, timings), r.status]
        for r in resp.rows
    ]
    write_csv(out_dir / "ground_states.csv",
              ["size", "h", "energy", "chi_used", "solver", "runtime_s", "status"], rows)
    print(f"wrote {out_dir / 'ground_states.csv'} ({len(rows)} rows, cache {resp.cache_dir})")
    failures = [r for r in resp.rows if r.status != "ok"]
    for r in failures:
        print(f"  {r.size} h={r.h:g}: {r.status}", file=sys.stderr)
    return EXIT_NOT_CONVERGED if failures else EXIT_OK


def cmd_measure(client: ServiceClient, opts: dict, out_dir: Path) -> int:
    req = MeasureRequest(**_request_kwargs(opts))
    resp = client.measure(req)
    timings = bool(opts.get("timings"))
    rows = [
        [r.measure, r.size, r.h, r.value, r.chi, r.xi, r.n_calls, r.achieved_error,
         _runtime_cell(r.runtime_s, timings)]
        for r in resp.rows
    ]
    write_csv(out_dir / "results.csv",
              ["measure", "size", "h", "value", "chi", "xi", "n_calls",
               "achieved_error", "runtime_s"], rows)
    scaling = [[r.measure, r.h, r.n_sites, r.value] for r in resp.rows]
    scaling.sort(key=lambda row: (row[1], row[2]))
    write_csv(out_dir / "scaling.csv", ["measure", "h", "n_sites", "value"], scaling)
    print(f"wrote {out_dir / 'results.csv'} ({len(rows)} rows)")
    if opts.get("svg"):
        _write_measure_svg(resp, req, out_dir / "results.svg")
        print(f"wrote {out_dir / 'results.svg'}")
    if not resp.all_converged:
        bad = [r for r in resp.rows if not r.converged]
        for r in bad:
            print(f"  not converged: {r.size} h={r.h:g} (xi={r.xi})", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _write_measure_svg(resp: MeasureResponse, req: MeasureRequest, path: Path) -> None:
    series = []
    for size in req.sizes:
        pts = sorted((r.h, r.value) for r in resp.rows if r.size == size)
        if pts:
            series.append(Series(label=f"size {size}", xs=[p[0] for p in pts],
                                 ys=[p[1] for p in pts]))
    name = "SRE2" if req.measure == "sre2" else "REC"
    path.write_text(render_line_chart(series, f"{name} vs field", "h", name))


def cmd_verify(client: ServiceClient, opts: dict, out_dir: Path) -> int:
    req = VerifyRequest(**_request_kwargs(opts))
    resp = client.verify(req)
    rows = [
        [r.measure, r.size, r.h, r.value_tci, r.value_oracle, r.abs_diff, r.within_tol]
        for r in resp.rows
    ]
    write_csv(out_dir / "verify.csv",
              ["measure", "size", "h", "value_tci", "value_oracle", "abs_diff", "within_tol"],
              rows)
    print(f"max deviation {resp.max_deviation:.3e} (tolerance {resp.tolerance:g})")
    if not resp.passed:
        for r in resp.rows:
            if not r.within_tol:
                print(f"  FAIL {r.size} h={r.h:g}: |{r.value_tci:.9g} - {r.value_oracle:.9g}| "
                      f"= {r.abs_diff:.3e}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    print("verify: PASS")
    return EXIT_OK


def cmd_bench(client: ServiceClient, opts: dict, out_dir: Path) -> int:
    req = BenchRequest(**_request_kwargs(opts))
    resp = client.bench(req)
    rows = [
        [r.mode, r.measure, r.size, r.n_sites, r.xi_cap, r.xi_achieved, r.n_calls,
         r.call_budget, r.within_budget]
        for r in resp.rows
    ]
    write_csv(out_dir / "bench.csv",
              ["mode", "measure", "size", "n_sites", "xi_cap", "xi_achieved", "n_calls",
               "call_budget", "within_budget"], rows)
    lat = resp.latency
    report = (
        f"samples: {lat.samples}\n"
        f"cached:   mean {lat.cached_mean_us:.1f} us  p50 {lat.cached_p50_us:.1f} us  "
        f"p90 {lat.cached_p90_us:.1f} us\n"
        f"uncached: mean {lat.uncached_mean_us:.1f} us  p50 {lat.uncached_p50_us:.1f} us  "
        f"p90 {lat.uncached_p90_us:.1f} us\n"
        f"max |cached - uncached| value difference: {lat.values_identical_to:.3e}\n"
    )
    (out_dir / "bench_latency.txt").write_text(report)
    print(f"wrote {out_dir / 'bench.csv'} and bench_latency.txt")
    print(report, end="")
    return EXIT_OK if resp.all_within_budget else EXIT_NOT_CONVERGED


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        import uvicorn
    except ImportError:
        print("serve requires uvicorn (pip install 'qres[serve]')", file=sys.stderr)
        return EXIT_BAD_CONFIG
    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    try:
        opts = _merge_options(args)
        out_dir = Path(opts.get("out", "qres-out"))
        out_dir.mkdir(parents=True, exist_ok=True)
        client = ServiceClient(opts.get("server"))
        handler = {
            "ground-state": cmd_ground_state,
            "measure": cmd_measure,
            "verify": cmd_verify,
            "bench": cmd_bench,
        }[args.command]
        return handler(client, opts, out_dir)
    except (InvalidInputError, ResourceLimitError, ValidationError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except httpx.HTTPStatusError as exc:
        detail = exc.response.json().get("detail", str(exc)) if exc.response else str(exc)
        print(f"server rejected request: {detail}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except httpx.HTTPError as exc:
        print(f"cannot reach server: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except QresError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
