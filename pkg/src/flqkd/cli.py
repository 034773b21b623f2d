"""Command-line front end.

Subcommands::

    flqkd sweep          optimize N_S per (L, K) and emit one CSV row each
    flqkd rate           evaluate one operating point (N_S or snr given)
    flqkd monitor        simulate monitoring scenarios and estimate intrusion
    flqkd constellation  export symbol geometry for plotting

Every CSV is byte-deterministic for a given flag set and seed; floats are
serialized with 17 significant digits.  Results go to --out when given
(stdout otherwise); logs always go to stderr.  Exit codes: 0 success,
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace

from .constellation import boundary_angles, make_kpsk
from .errors import DomainError, QuadratureError, SweepPointError
from .link import GaussianChannel, ProtocolParams, link_budget, modes_per_symbol
from .monitor import DEFAULT_GATE_S, expected_counts, flux_check, intrusion_parameter, simulate_counts
from .optimizer import DEFAULT_NS_BOUNDS, optimize_brightness, sweep
from .rates import EveModel, TabulatedBound, ZeroLeakage, eve_chi, mutual_information, skr_lower_bound
from .receiver import confusion_quadrature

PARAMS_ENV_VAR = "FLQKD_PARAMS"
ROW_HEADER = "L_km,K,N_S_opt,snr,I_AB_bps,chi_bps,skr_lb_bps,secure,at_bound"
MONITOR_HEADER = "f_true,f_E_est,raw,z_flux,pass"
GEOMETRY_HEADER = "record,index,a,b"

log = logging.getLogger("flqkd")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def _parse_int_list(text: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise DomainError(f"expected a comma list of integers, got {text!r}") from exc
    if not values:
        raise DomainError("empty list")
    return values


def _parse_float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise DomainError(f"expected a comma list of numbers, got {text!r}") from exc
    if not values:
        raise DomainError("empty list")
    return values


def _parse_l_spec(text: str) -> list[float]:
    """Path lengths: either a comma list or an inclusive start:stop:step range."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"range syntax is start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(tok) for tok in parts)
        except ValueError as exc:
            raise DomainError(f"range syntax is start:stop:step, got {text!r}") from exc
        if step <= 0 or stop < start:
            raise DomainError(f"need step > 0 and stop >= start, got {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    return _parse_float_list(text)


def _parse_bounds(text: str) -> tuple[float, float]:
    values = _parse_float_list(text)
    if len(values) != 2:
        raise DomainError(f"--ns-bounds takes MIN,MAX, got {text!r}")
    return values[0], values[1]


def _make_eve(spec: str) -> EveModel:
    if spec == "zero":
        return ZeroLeakage()
    if spec.startswith("table:"):
        path = spec[len("table:"):]
        if not path:
            raise DomainError("--eve table: requires a file path")
        return TabulatedBound.from_json(path)
    raise DomainError(f"--eve must be 'zero' or 'table:PATH', got {spec!r}")


def _load_params(args: argparse.Namespace) -> ProtocolParams:
    path = args.params or os.environ.get(PARAMS_ENV_VAR)
    params = ProtocolParams.from_json(path) if path else ProtocolParams()
    overrides = {}
    for field in ("K", "L", "R", "beta", "N_S"):
        value = getattr(args, field, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        params = replace(params, **overrides)
    mode_count = modes_per_symbol(params.W, params.R)
    if mode_count.low_m_warning:
        log.warning("modes per symbol M=%.3g < 10; Gaussian receiver statistics are doubtful",
                    mode_count.modes)
    return params


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _row_line(L: float, K: int, N_S: float | None, snr: float, I_AB: float,
              chi: float, skr_lb: float, secure: bool, at_bound: bool) -> str:
    ns = float("nan") if N_S is None else N_S
    return ",".join([
        _fmt(L), str(K), _fmt(ns), _fmt(snr), _fmt(I_AB), _fmt(chi), _fmt(skr_lb),
        _fmt_bool(secure), _fmt_bool(at_bound),
    ])


def _cmd_sweep(args: argparse.Namespace) -> int:
    params = _load_params(args)
    eve = _make_eve(args.eve)
    ks = _parse_int_list(args.K_list)
    ls = _parse_l_spec(args.L_list)
    bounds = _parse_bounds(args.ns_bounds) if args.ns_bounds else DEFAULT_NS_BOUNDS
    rows = sweep(params, eve, ls, ks, bounds=bounds, tol=args.tol, f_E=args.f_e)
    lines = [ROW_HEADER]
    lines += [
        _row_line(r.L, r.K, r.N_S_opt, r.snr, r.I_AB, r.chi, r.skr_lb, r.secure, r.at_bound)
        for r in rows
    ]
    _emit(lines, args.out)
    return 0


def _resolve_channel(args: argparse.Namespace, params: ProtocolParams, what: str) -> GaussianChannel:
    """Operating point: --snr bypasses the link budget; otherwise brightness
    must be known (flag or params file)."""
    if args.N_S is not None and args.snr is not None:
        raise DomainError(f"{what} takes at most one of --N_S and --snr")
    if args.snr is not None:
        return GaussianChannel.from_snr(args.snr)
    if params.N_S is None:
        raise DomainError(f"{what} requires N_S (flag or params file) or --snr")
    return link_budget(params)


def _cmd_rate(args: argparse.Namespace) -> int:
    params = _load_params(args)
    eve = _make_eve(args.eve)
    channel = _resolve_channel(args, params, "rate")
    if isinstance(eve, TabulatedBound) and params.N_S is None:
        raise DomainError("--eve table requires a brightness N_S (the grid is indexed by it)")
    cm = confusion_quadrature(channel, params.K)
    i_ab = mutual_information(cm, params.R)
    chi = eve_chi(eve, params, args.f_e)
    rate = skr_lower_bound(i_ab, params.beta, chi)
    line = _row_line(params.L, params.K, params.N_S, channel.snr,
                     rate.I_AB, rate.chi, rate.skr_lb, rate.secure, False)
    _emit([ROW_HEADER, line], args.out)
    return 0


def _cmd_monitor(args: argparse.Namespace) -> int:
    params = _load_params(args)
    f_values = _parse_float_list(args.f_true)
    expected = expected_counts(params, 0.0, gate=args.gate)
    lines = [MONITOR_HEADER]
    for i, f_true in enumerate(f_values):
        counts = simulate_counts(params, f_true, args.duration, gate=args.gate,
                                 seed=args.seed, scenario=i)
        est = intrusion_parameter(counts)
        flux = flux_check(counts, expected.S_B)
        lines.append(",".join([
            _fmt(f_true), _fmt(est.value), _fmt(est.raw), _fmt(flux.z), _fmt_bool(flux.passed),
        ]))
    _emit(lines, args.out)
    return 0


def _cmd_constellation(args: argparse.Namespace) -> int:
    params = _load_params(args)
    channel = _resolve_channel(args, params, "constellation")
    c = make_kpsk(params.K)
    lines = [GEOMETRY_HEADER]
    for k in range(c.K):
        pt = c.point(k)
        lines.append(f"point,{k},{_fmt(channel.r * pt.I)},{_fmt(channel.r * pt.Q)}")
    lines.append(f"sigma,0,{_fmt(channel.sigma)},")
    for k, angle in enumerate(boundary_angles(c)):
        lines.append(f"boundary,{k},{_fmt(angle)},")
    _emit(lines, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flqkd",
        description="K-ary PSK floodlight-QKD rate laboratory (CSV output).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", metavar="PATH", default=None,
                        help=f"JSON parameter file (fallback: ${PARAMS_ENV_VAR})")
    common.add_argument("--out", metavar="PATH", default=None,
                        help="output CSV path (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="random-stream seed")
    common.add_argument("--R", type=float, default=None, help="symbol rate override (baud)")
    common.add_argument("--beta", type=float, default=None,
                        help="reconciliation-efficiency override")
    common.add_argument("--eve", default="zero", metavar="MODEL",
                        help="eavesdropper model: zero | table:PATH (default zero)")
    common.add_argument("--f-e", dest="f_e", type=float, default=0.0,
                        help="intrusion parameter assumed for chi (default 0)")

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="optimize N_S over a (distance, alphabet) grid")
    p_sweep.add_argument("--K", dest="K_list", default="2,4,8,32",
                         help="comma list of alphabet sizes (default 2,4,8,32)")
    p_sweep.add_argument("--L", dest="L_list", default="0:150:10",
                         help="path lengths: comma list or start:stop:step km (default 0:150:10)")
    p_sweep.add_argument("--ns-bounds", dest="ns_bounds", default=None, metavar="MIN,MAX",
                         help=f"brightness search interval (default {DEFAULT_NS_BOUNDS[0]:g},{DEFAULT_NS_BOUNDS[1]:g})")
    p_sweep.add_argument("--tol", type=float, default=1e-3,
                         help="relative brightness tolerance of the optimizer (default 1e-3)")
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_rate = sub.add_parser("rate", parents=[common],
                            help="evaluate one operating point without optimization")
    p_rate.add_argument("--K", type=int, default=None, help="alphabet size")
    p_rate.add_argument("--L", type=float, default=None, help="path length (km)")
    p_rate.add_argument("--N_S", type=float, default=None, help="source brightness (photons/mode)")
    p_rate.add_argument("--snr", type=float, default=None,
                        help="direct SNR override (bypasses the link budget)")
    p_rate.set_defaults(handler=_cmd_rate)

    p_mon = sub.add_parser("monitor", parents=[common],
                           help="simulate monitoring scenarios and estimate intrusion")
    p_mon.add_argument("--L", type=float, default=None, help="path length (km)")
    p_mon.add_argument("--N_S", type=float, default=None, help="source brightness (photons/mode)")
    p_mon.add_argument("--f-true", dest="f_true", default="0", metavar="LIST",
                       help="comma list of true intrusion fractions (default 0)")
    p_mon.add_argument("--duration", type=float, default=1.0, help="accumulation time (s)")
    p_mon.add_argument("--gate", type=float, default=DEFAULT_GATE_S,
                       help="coincidence gate width (s, default 1e-9)")
    p_mon.set_defaults(handler=_cmd_monitor)

    p_geo = sub.add_parser("constellation", parents=[common],
                           help="export symbol points, noise radius, and decision boundaries")
    p_geo.add_argument("--K", type=int, default=None, help="alphabet size")
    p_geo.add_argument("--L", type=float, default=None, help="path length (km)")
    p_geo.add_argument("--N_S", type=float, default=None, help="source brightness (photons/mode)")
    p_geo.add_argument("--snr", type=float, default=None,
                       help="direct SNR override (bypasses the link budget)")
    p_geo.set_defaults(handler=_cmd_constellation)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SweepPointError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except QuadratureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
