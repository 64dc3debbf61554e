"""Command-line front end producing deterministic, plot-ready CSV files."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import __version__, verify
from .core import AliasingError
from .ensemble import (
    AnalysisError,
    InitialEnsemble,
    calibrated_resolution,
    convolve_resolution,
    ensemble_distribution,
    fwhm_central_peak,
    normalize_W,
    p0_fraction,
)
from .sequences import PulseTrain, loschmidt_train

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

DEFAULTS = {
    "kicks": 10,
    "epsilon": [1.0],
    "phi": 2.0,
    "sigma_bec": 0.05,
    "resolution": None,  # calibrated from sigma_bec when not set
    "members": 201,
    "nmax": 128,
    "midpoint_mode": "replace",
    "metric": "height",
    "output": None,
}

UNIT_NOTE = (
    "units: momentum in single-photon recoils (hbar*k_L); ladder spacing 2 "
    "recoils; drift durations are the dimensionless scaled period kbar = 8*omega_R*T"
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    kicks: int
    epsilons: list[float]
    phi: float
    sigma_bec: float
    resolution: float
    resolution_calibrated: bool
    members: int
    nmax: int
    midpoint_mode: str
    metric: str
    output: str | None

    def metadata(self, subcommand: str) -> list[str]:
        res_note = " (calibrated for initial width 0.43)" if self.resolution_calibrated else ""
        return [
            f"qkr {subcommand} v{__version__}",
            UNIT_NOTE,
            f"kicks = {self.kicks}",
            "epsilon = " + ", ".join(fmt(e) for e in self.epsilons),
            f"phi = {fmt(self.phi)}",
            f"sigma_bec = {fmt(self.sigma_bec)}",
            f"resolution = {fmt(self.resolution)}{res_note}",
            f"members = {self.members}",
            f"nmax = {self.nmax}",
            f"midpoint_mode = {self.midpoint_mode}",
            f"metric = {self.metric}",
        ]


def fmt(x: float) -> str:
    """Fixed 12-significant-digit representation; the determinism contract."""
    return f"{x:.11e}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkr",
        description="Delta-kicked rotor simulator with Loschmidt time-reversal trains",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_run_flags(p):
        p.add_argument("--kicks", type=int, help="number of kicks N (even, >= 2)")
        p.add_argument(
            "--epsilon",
            type=float,
            action="append",
            help="detuning from the 4*pi resonance; repeat for sweeps",
        )
        p.add_argument("--phi", type=float, help="kick strength phi_d")
        p.add_argument(
            "--sigma-bec", type=float, dest="sigma_bec",
            help="initial momentum spread sigma_p in recoils",
        )
        p.add_argument(
            "--resolution", type=float,
            help="Gaussian resolution width in recoils (default: calibrated)",
        )
        p.add_argument("--members", type=int, help="ensemble members M (odd)")
        p.add_argument("--nmax", type=int, help="momentum grid half-size")
        p.add_argument("--midpoint-mode", choices=("replace", "append"), dest="midpoint_mode")
        p.add_argument("--metric", choices=("height", "integrated"))
        p.add_argument("--output", help="CSV output path (default: stdout)")
        p.add_argument("--config", help="JSON config file; flags take precedence")

    for name, doc in (
        ("echo", "momentum distribution after a Loschmidt train"),
        ("p0-sequence", "zero-momentum peak height after each kick"),
        ("fwhm-sweep", "central-peak width for a list of epsilon values"),
    ):
        add_run_flags(sub.add_parser(name, help=doc))
    sub.add_parser("verify", help="run the built-in oracle checks")
    return parser


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise UsageError(f"cannot read config file: {err}") from err
    except json.JSONDecodeError as err:
        raise UsageError(f"config file is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise UsageError("config file must contain a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    file_cfg = load_config_file(args.config) if args.config else {}

    def pick(key, flag_value):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return file_cfg[key]
        return DEFAULTS[key]

    eps = pick("epsilon", args.epsilon)
    if isinstance(eps, (int, float)):
        eps = [float(eps)]
    eps = [float(e) for e in eps]

    kicks = int(pick("kicks", args.kicks))
    members = int(pick("members", args.members))
    nmax = int(pick("nmax", args.nmax))
    sigma_bec = float(pick("sigma_bec", args.sigma_bec))
    resolution = pick("resolution", args.resolution)
    phi = float(pick("phi", args.phi))
    midpoint_mode = pick("midpoint_mode", args.midpoint_mode)
    metric = pick("metric", args.metric)
    output = pick("output", args.output)

    if kicks < 2 or kicks % 2 != 0:
        raise UsageError(f"--kicks must be even and >= 2, got {kicks}")
    if not eps:
        raise UsageError("at least one --epsilon value is required")
    if members < 1 or members % 2 == 0:
        raise UsageError(f"--members must be odd and >= 1, got {members}")
    if not 16 <= nmax <= 4096:
        raise UsageError(f"--nmax must lie in [16, 4096], got {nmax}")
    if sigma_bec < 0:
        raise UsageError("--sigma-bec must be >= 0")
    if midpoint_mode not in ("replace", "append"):
        raise UsageError(f"invalid midpoint mode {midpoint_mode!r}")
    if metric not in ("height", "integrated"):
        raise UsageError(f"invalid metric {metric!r}")

    calibrated = resolution is None
    if calibrated:
        try:
            resolution = calibrated_resolution(sigma_bec)
        except ValueError as err:
            raise UsageError(str(err)) from err
    resolution = float(resolution)
    if resolution < 0:
        raise UsageError("--resolution must be >= 0")

    return RunConfig(
        kicks=kicks,
        epsilons=eps,
        phi=phi,
        sigma_bec=sigma_bec,
        resolution=resolution,
        resolution_calibrated=calibrated,
        members=members,
        nmax=nmax,
        midpoint_mode=midpoint_mode,
        metric=metric,
        output=output,
    )


def write_csv(output: str | None, meta: list[str], header: str, rows: list[str]) -> None:
    text = "".join(f"# {line}\n" for line in meta)
    text += header + "\n"
    text += "".join(row + "\n" for row in rows)
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def single_epsilon(cfg: RunConfig) -> float:
    if len(cfg.epsilons) != 1:
        raise UsageError("this subcommand takes exactly one --epsilon value")
    return cfg.epsilons[0]


def cmd_echo(cfg: RunConfig) -> int:
    eps = single_epsilon(cfg)
    train = loschmidt_train(cfg.kicks, eps, cfg.phi, cfg.midpoint_mode)
    ens = InitialEnsemble.gaussian(cfg.sigma_bec, cfg.members)
    final = ensemble_distribution(train, ens, cfg.nmax)
    initial = ensemble_distribution(PulseTrain((), label="initial"), ens, cfg.nmax)
    w_p = normalize_W(final, initial)
    convolved = convolve_resolution(final, cfg.resolution)

    meta = cfg.metadata("echo")
    meta.append(f"result fwhm_unconvolved = {fmt(fwhm_central_peak(final))}")
    meta.append(f"result fwhm_convolved = {fmt(fwhm_central_peak(convolved))}")
    meta.append(f"result p0_fraction = {fmt(p0_fraction(convolved, cfg.metric))}")
    rows = [
        f"{fmt(p)},{fmt(raw)},{fmt(wp)},{fmt(conv)}"
        for p, raw, wp, conv in zip(
            final.grid, final.density, w_p.density, convolved.density
        )
    ]
    write_csv(cfg.output, meta, "p_recoils,density_raw,density_Wp,density_convolved", rows)
    return EXIT_OK


def cmd_p0_sequence(cfg: RunConfig) -> int:
    eps = single_epsilon(cfg)
    train = loschmidt_train(cfg.kicks, eps, cfg.phi, cfg.midpoint_mode)
    ens = InitialEnsemble.gaussian(cfg.sigma_bec, cfg.members)
    _, per_kick = ensemble_distribution(train, ens, cfg.nmax, record=True)
    rows = []
    for k, dist in enumerate(per_kick, start=1):
        value = p0_fraction(convolve_resolution(dist, cfg.resolution), cfg.metric)
        rows.append(f"{k},{fmt(value)}")
    write_csv(cfg.output, cfg.metadata("p0-sequence"), "kick_index,p0_fraction", rows)
    return EXIT_OK


def cmd_fwhm_sweep(cfg: RunConfig) -> int:
    ens = InitialEnsemble.gaussian(cfg.sigma_bec, cfg.members)
    rows = []
    for eps in cfg.epsilons:
        train = loschmidt_train(cfg.kicks, eps, cfg.phi, cfg.midpoint_mode)
        final = ensemble_distribution(train, ens, cfg.nmax)
        convolved = convolve_resolution(final, cfg.resolution)
        rows.append(
            f"{fmt(eps)},{fmt(fwhm_central_peak(convolved))},"
            f"{fmt(fwhm_central_peak(final))},{fmt(p0_fraction(convolved, cfg.metric))}"
        )
    write_csv(
        cfg.output,
        cfg.metadata("fwhm-sweep"),
        "epsilon,fwhm_convolved,fwhm_unconvolved,p0_fraction",
        rows,
    )
    return EXIT_OK


def cmd_verify() -> int:
    results = verify.run_checks()
    print(verify.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "verify":
            return cmd_verify()
        cfg = resolve_config(args)
        if args.subcommand == "echo":
            return cmd_echo(cfg)
        if args.subcommand == "p0-sequence":
            return cmd_p0_sequence(cfg)
        return cmd_fwhm_sweep(cfg)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (AliasingError, AnalysisError) as err:
        print(f"numerical guard: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
