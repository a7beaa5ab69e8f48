"""Command-line front end: ``python -m fermion_mbody <subcommand> ...``.

Exit codes: 0 success, 2 an asserted relation failed, 3 bad input.
Reports go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import channels as ch
from .entanglement import (
    ENTROPIES,
    MAJORIZATION_TOL,
    as_spectrum,
    entropy,
    get_entropy,
    majorize_compare,
    normalized_entropy,
)
from .fock import PureState, binom
from .mbody import partner_spectrum_check, rho_m
from .oracles import figure1_csv, figure1_data
from .states import FAMILIES, StateFamilySpec, build_state

EXIT_OK, EXIT_ASSERT, EXIT_INPUT = 0, 2, 3
TOL_ENV = "FERMION_MBODY_TOL"
DEFAULT_TOL = 1e-10


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors, not assertion failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    subcommand: str
    family: StateFamilySpec | None = None
    state_path: str | None = None
    Ms: list[int] = field(default_factory=list)
    entropy: str = "von-neumann"
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    seed: int | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise InputError("tolerance must be positive")


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise InputError(f"{TOL_ENV}={raw!r} is not a number") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_state_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("state source")
    g.add_argument("--state", help="path to a PureState JSON file")
    g.add_argument("--family", choices=FAMILIES)
    g.add_argument("--D", type=int)
    g.add_argument("--k", type=int, default=0)
    g.add_argument("--N", type=int, default=0)
    g.add_argument("--occupied", type=_int_list, default=[])
    g.add_argument("--gamma", help="two-fermion coefficient matrix as JSON (real or [re, im] pairs)")
    g.add_argument("--seed", type=int)


def _family_spec(args, seed=None) -> StateFamilySpec:
    if args.D is None:
        raise InputError("--family needs --D")
    gamma = None
    if args.gamma is not None:
        try:
            raw = np.asarray(json.loads(args.gamma), dtype=float)
        except (json.JSONDecodeError, ValueError) as exc:
            raise InputError(f"cannot parse --gamma: {exc}") from None
        gamma = raw[..., 0] + 1j * raw[..., 1] if raw.ndim == 3 else raw
    return StateFamilySpec(args.family, args.D, list(args.occupied), args.k, args.N,
                           gamma, args.seed if seed is None else seed)


def load_state(path: str) -> PureState:
    try:
        return PureState.from_json(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{path} is not a PureState JSON file: {exc}") from None


def _states(args, trials: int = 1):
    """Yield the state(s) selected on the command line; random trials advance the seed."""
    if args.state:
        if args.family:
            raise InputError("give either --state or --family, not both")
        yield load_state(args.state)
        return
    if not args.family:
        raise InputError("a state source is required (--state or --family)")
    base = args.seed if args.seed is not None else 0
    for t in range(trials):
        yield build_state(_family_spec(args, base + t if args.family == "random" else None))


def _config(args) -> RunConfig:
    tol = args.tol if getattr(args, "tol", None) is not None else default_tol()
    return RunConfig(args.command, None, getattr(args, "state", None),
                     list(getattr(args, "M", None) or []), getattr(args, "entropy", "von-neumann"),
                     tol, getattr(args, "format", "json"), getattr(args, "seed", None))


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state(args) -> int:
    state = next(_states(args))
    text = state.to_json(indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    cfg = _config(args)
    state = next(_states(args))
    Ms = cfg.Ms or list(range(state.N + 1))
    for M in Ms:
        if not 0 <= M <= state.N:
            raise InputError(f"M={M} outside [0, N={state.N}]")
    f = get_entropy(cfg.entropy)
    ok = True
    reports = []
    for M in Ms:
        spec = rho_m(state, M).spectrum()
        trace = float(spec.sum())
        expected = binom(state.N, M) * state.norm() ** 2
        trace_ok = abs(trace - expected) < cfg.tol * max(1.0, expected)
        partner_ok, dev = partner_spectrum_check(state, M, cfg.tol)
        ok &= trace_ok and partner_ok
        rep = {
            "M": M,
            "spectrum": spec.tolist(),
            "trace": trace,
            "expected_trace": expected,
            "trace_ok": trace_ok,
            "partner_deviation": dev,
            "partner_ok": partner_ok,
            "entropy": {"name": f.name, "log_base": f.log_base,
                        "raw": entropy(spec, f),
                        "normalized": normalized_entropy(state, M, f) if 1 <= M < state.N else None},
        }
        reports.append(rep)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["M", "index", "eigenvalue"])
        for rep in reports:
            for i, v in enumerate(rep["spectrum"]):
                w.writerow([rep["M"], i, f"{v:.15g}"])
        sys.stdout.write(buf.getvalue())
    else:
        _emit({"D": state.D, "N": state.N, "reports": reports})
    return EXIT_OK if ok else EXIT_ASSERT


def _outcomes(state, args):
    if args.channel == "single":
        return ch.measure_single_fermion(state)
    if args.channel == "lbody":
        if args.L is None:
            raise InputError("--channel lbody needs --L")
        return ch.measure_l_body(state, args.L)
    if args.mode is None:
        raise InputError("--channel occupancy needs --mode")
    return ch.measure_occupancy(state, args.mode)


def _label(label):
    return list(label) if isinstance(label, tuple) else label


def cmd_measure(args) -> int:
    cfg = _config(args)
    functionals = list(ENTROPIES.values()) if cfg.entropy == "all" else [get_entropy(cfg.entropy)]
    trials = args.trials if args.family == "random" else 1
    asserted = args.channel != "occupancy"
    passes = 0
    runs = []
    for state in _states(args, trials):
        outcomes = _outcomes(state, args)
        N_post = outcomes[0].post_state.N
        Ms = cfg.Ms or list(range(1, N_post + 1))
        checks = {}
        trial_ok = abs(sum(o.probability for o in outcomes) - 1.0) < cfg.tol
        for M in Ms:
            if not 1 <= M <= N_post:
                raise InputError(f"M={M} outside [1, {N_post}] after the measurement")
            c = ch.check_channel(state, outcomes, M, functionals)
            mix_ok = c.mixture_deviation is None or c.mixture_deviation < 1e-12
            trial_ok &= c.holds and c.entropy_holds and mix_ok
            checks[str(M)] = c.to_dict()
        passes += trial_ok
        runs.append({
            "outcomes": [{"outcome": _label(o.label), "probability": o.probability,
                          "spectrum": {str(M): (rho_m(o.post_state, M).spectrum()
                                                / binom(N_post, M)).tolist() for M in Ms}}
                         for o in outcomes],
            "checks": checks,
            "all_hold": bool(trial_ok),
        })
    report = {"channel": args.channel, "trials": len(runs), "passes": passes}
    if len(runs) == 1:
        report.update(runs[0])
        report["violation"] = not runs[0]["all_hold"]
    else:
        report["failed_trials"] = [i for i, r in enumerate(runs) if not r["all_hold"]]
    _emit(report)
    if asserted and passes != len(runs):
        return EXIT_ASSERT
    return EXIT_OK


def _load_map(args, state) -> ch.TransferMap:
    M = args.M[0] if args.M else 1
    name = args.map
    if name == "uniform":
        return ch.uniform_map(state.D, M)
    if name == "mode-tagged":
        return ch.mode_tagged_map(state.D, M)
    if name == "random":
        D_A = args.D_A if args.D_A is not None else state.D
        return ch.random_transfer_map(state.D, D_A, M, args.kraus, args.map_seed)
    try:
        return ch.TransferMap.from_json(Path(name).read_text())
    except OSError as exc:
        raise InputError(f"cannot read map {name}: {exc}") from None
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"{name} is not a TransferMap JSON file: {exc}") from None


def cmd_map(args) -> int:
    trials = args.trials if args.family == "random" or args.map == "random" else 1
    map_seed = args.map_seed if args.map_seed is not None else 0
    states = list(_states(args, trials if args.family == "random" else 1))
    passes = 0
    for t in range(trials):
        state = states[t % len(states)]
        args.map_seed = map_seed + t
        tmap = _load_map(args, state)
        if not tmap.is_complete():
            raise InputError(f"map is not trace preserving (deviation {tmap.completeness_deviation():.3e})")
        rep = ch.verify_transfer_majorization(state, tmap, list(ENTROPIES.values()))
        passes += rep.holds and rep.entropy_holds
    out = {"map": args.map, "trials": trials, "passes": passes}
    if trials == 1:
        out.update(rep.to_dict())
        out["branches"] = [{"outcome": o.label, "probability": o.probability,
                            "spectrum_A": ch.reduced_state_A(o.post_state).spectrum().tolist()}
                           for o in ch.apply_transfer_map(state, tmap)]
    _emit(out)
    return EXIT_OK if passes == trials else EXIT_ASSERT


def _spectrum_arg(text: str, M: int | None) -> np.ndarray:
    """Spectrum from inline numbers, a JSON file (list or PureState), or ``family:key=val,...``."""
    if ":" in text and text.split(":", 1)[0] in FAMILIES:
        fam, rest = text.split(":", 1)
        kw = {}
        for item in filter(None, rest.split(",")):
            key, _, val = item.partition("=")
            if key == "occupied":
                kw[key] = [int(x) for x in val.split("+")]
            elif key in ("D", "k", "N", "seed"):
                kw[key] = int(val)
            else:
                raise InputError(f"unknown family parameter {key!r}")
        state = build_state(StateFamilySpec(fam, **kw))
        return _state_spectrum(state, M)
    p = Path(text)
    if p.exists():
        data = json.loads(p.read_text())
        if isinstance(data, dict):
            return _state_spectrum(PureState.from_dict(data), M)
        return np.asarray(data, dtype=float)
    try:
        return np.asarray([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"cannot interpret {text!r} as a spectrum, file or family") from None


def _state_spectrum(state: PureState, M: int | None) -> np.ndarray:
    if M is None:
        raise InputError("comparing states needs --M")
    return rho_m(state, M).spectrum() / binom(state.N, M)


def cmd_majorize(args) -> int:
    cfg = _config(args)
    M = cfg.Ms[0] if cfg.Ms else None
    a = as_spectrum(_spectrum_arg(args.a, M))
    b = as_spectrum(_spectrum_arg(args.b, M))
    res = majorize_compare(a, b, args.maj_tol)
    out = {
        "verdict": res.verdict.value,
        "first_violation": res.first_violation,
        "second_violation": res.second_violation,
        "prefix_a": res.prefix_a.tolist(),
        "prefix_b": res.prefix_b.tolist(),
    }
    _emit(out)
    if args.expect and args.expect != res.verdict.value:
        print(f"expected {args.expect}, got {res.verdict.value}", file=sys.stderr)
        return EXIT_ASSERT
    return EXIT_OK


def cmd_figure1(args) -> int:
    cfg = _config(args)
    Ms = cfg.Ms or [1, 2, 3, 4]
    if cfg.fmt == "csv":
        sys.stdout.write(figure1_csv(args.D, Ms))
    else:
        _emit([{"k": k, "M": M, "lambda_max": v} for k, M, v in figure1_data(args.D, Ms)])
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fermion-mbody", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_state=True, fmt="json"):
        if with_state:
            _add_state_args(p)
        p.add_argument("--M", type=_int_list, help="comma-separated M values")
        p.add_argument("--tol", type=float, help=f"check tolerance (default ${TOL_ENV} or {DEFAULT_TOL})")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)
        return p

    p = sub.add_parser("state", help="build a named state and print it as JSON")
    _add_state_args(p)
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_state)

    p = common(sub.add_parser("spectrum", help="M-body spectra, trace and partner checks, entropies"))
    p.add_argument("--entropy", default="von-neumann", choices=sorted(ENTROPIES))
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("measure", help="apply a measurement channel and check majorization"))
    p.add_argument("--channel", choices=("single", "lbody", "occupancy"), required=True)
    p.add_argument("--L", type=int)
    p.add_argument("--mode", type=int)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--entropy", default="all", choices=sorted(ENTROPIES) + ["all"])
    p.set_defaults(func=cmd_measure)

    p = common(sub.add_parser("map-bipartite", help="apply a transfer map into a separate register"))
    p.add_argument("--map", default="uniform",
                   help="uniform, mode-tagged, random, or a TransferMap JSON file")
    p.add_argument("--D-A", dest="D_A", type=int, help="register size for random maps")
    p.add_argument("--kraus", type=int, default=2, help="Kraus blocks for random maps")
    p.add_argument("--map-seed", type=int)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_map)

    p = common(sub.add_parser("majorize", help="compare two spectra or two states"), with_state=False)
    p.add_argument("--a", required=True, help="numbers, JSON file, or family:key=val,...")
    p.add_argument("--b", required=True)
    p.add_argument("--maj-tol", type=float, default=MAJORIZATION_TOL)
    p.add_argument("--expect", choices=("FirstMoreMixed", "SecondMoreMixed", "Equivalent", "Incomparable"))
    p.set_defaults(func=cmd_majorize)

    p = common(sub.add_parser("figure1", help="lambda_max against pair number (CSV)"),
               with_state=False, fmt="csv")
    p.add_argument("--D", type=int, required=True)
    p.set_defaults(func=cmd_figure1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
