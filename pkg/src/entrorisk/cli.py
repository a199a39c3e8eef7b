"""
Command-line front end.

Subcommands: ``synth``, ``risk``, ``diversify``, ``scatter``, ``evaluate``.
Options resolve as built-in defaults, then the config file (``--config`` or
``$ENTRORISK_CONFIG``), then command-line flags.  The config file holds
``key = value`` lines, optionally under ``[entrorisk]`` or ``[<command>]``
sections; keys are flag names with or without dashes.

Exit codes: 0 success, 1 domain error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import (
    Dataset,
    generate_synthetic,
    load_dataset,
    load_regime_calendar,
    rolling_windows,
    write_panel,
)
from .errors import EntroRiskError
from .evaluation import (
    bootstrap_compare,
    explanatory_power,
    regime_evaluation,
    rolling_evaluation,
)
from .data import apply_window
from .parallel import task_rng
from .portfolio import diversification_curve, scatter_dataset
from .reporting import header_lines, write_csv, write_json
from .risk import BACKENDS, default_measures, risk_table

CONFIG_ENV = "ENTRORISK_CONFIG"
# Options that never change results and so stay out of the echoed config.
NOT_ECHOED = {"workers", "out", "config"}


class InputError(Exception):
    """Bad usage or unreadable input; exits with status 2."""


# -- option types ------------------------------------------------------------------


def _positive_int(text) -> int:
    try:
        v = int(text)
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _nonneg_float(text) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text!r}")
    return v


def _bins(text):
    if str(text) in ("sqrt", "scott", "fd", "freedman_diaconis"):
        return str(text)
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError(f"bin count must be >= 2, got {v}")
    return v


def _backend(text) -> str:
    if text not in BACKENDS:
        raise argparse.ArgumentTypeError(f"backend must be one of {', '.join(BACKENDS)}")
    return text


def _sizes(text) -> list[int]:
    """Parse ``1..50``, ``1,2,5,10`` or mixtures such as ``1..10,20,50``."""
    out: set[int] = set()
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            a, b = (int(x) for x in part.split("..", 1))
            if a < 1 or b < a:
                raise argparse.ArgumentTypeError(f"bad size range {part!r}")
            out.update(range(a, b + 1))
        elif part:
            v = int(part)
            if v < 1:
                raise argparse.ArgumentTypeError(f"portfolio size must be >= 1, got {v}")
            out.add(v)
    if not out:
        raise argparse.ArgumentTypeError("empty size list")
    return sorted(out)


def _flag(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# name -> (type, default, help)
PANEL = {
    "panel": (str, None, "panel CSV file"),
    "market_col": (str, "MKT", "market return column"),
    "rf_col": (str, "RF", "risk-free rate column"),
    "bins_shannon": (_bins, 175, "histogram bins for Shannon entropy"),
    "bins_renyi": (_bins, 50, "histogram bins for Renyi entropy"),
    "backend": (_backend, "histogram", "entropy density backend"),
}
RUN = {
    "seed": (int, 0, "master random seed"),
    "workers": (_positive_int, 1, "worker threads (never changes output)"),
}
COMMANDS = {
    "synth": {
        "securities": (_positive_int, 150, "number of securities"),
        "days": (_positive_int, 6800, "number of business days"),
        "years": (_positive_int, None, "calendar years of business days (overrides --days)"),
        "start": (str, "1985-01-01", "first calendar date"),
        "market_vol": (_nonneg_float, 0.01, "daily market premium volatility"),
        "market_drift": (float, 0.0004, "daily mean market premium"),
        "beta_low": (float, 0.5, "lower bound of uniform betas"),
        "beta_high": (float, 1.5, "upper bound of uniform betas"),
        "idio_low": (_nonneg_float, 0.01, "lower bound of uniform idiosyncratic vols"),
        "idio_high": (_nonneg_float, 0.02, "upper bound of uniform idiosyncratic vols"),
        "rf": (float, 0.0, "constant daily risk-free rate"),
        "seed": RUN["seed"],
    },
    "risk": {**PANEL},
    "diversify": {
        **PANEL,
        **RUN,
        "sizes": (_sizes, "1..50", "portfolio sizes, e.g. 1..50 or 1,2,5,10"),
        "max_per_size": (_positive_int, 10000, "portfolios per size"),
    },
    "scatter": {
        **PANEL,
        **RUN,
        "sizes": (_sizes, "1,2,5,10", "portfolio sizes"),
        "per_size": (_positive_int, 200, "portfolios per size"),
    },
    "evaluate": {
        **PANEL,
        **RUN,
        "regimes": (str, None, "bull/bear calendar CSV (start,end,label)"),
        "rolling": (_flag, False, "rolling in/out-of-sample windows"),
        "window_years": (_positive_int, 10, "rolling window length in years"),
        "in_years": (_positive_int, 5, "in-sample years per window"),
        "step_years": (_positive_int, 1, "window step in years"),
        "bootstrap": (_nonneg_int, 0, "bootstrap iterations (0 disables)"),
        "drop": (_nonneg_int, 25, "securities removed per bootstrap iteration"),
    },
}
OUT_HELP = {
    "evaluate": "output directory",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrorisk", description="Entropy-based risk estimation.")
    parser.add_argument("--version", action="version", version=f"entrorisk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help=f"key=value config file (default ${CONFIG_ENV})")
        p.add_argument("--out", default=None, help=OUT_HELP.get(name, "output file (default stdout)"))
        for key, (typ, default, help_) in opts.items():
            flag = "--" + key.replace("_", "-")
            if typ is _flag:
                p.add_argument(flag, action="store_const", const=True, default=None, help=help_)
            else:
                p.add_argument(flag, type=typ, default=None, help=f"{help_} (default {default})")
    return parser


def _read_config(path, command: str) -> dict:
    if not path:
        return {}
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read config file ({exc.strerror})") from None
    if not text.lstrip().startswith("["):
        text = "[entrorisk]\n" + text
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise InputError(f"{path}: malformed config file: {exc}") from None
    out = {}
    for section in ("entrorisk", command):
        if cp.has_section(section):
            out.update({k.replace("-", "_"): v for k, v in cp.items(section)})
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags for ``args.command``."""
    opts = COMMANDS[args.command]
    config_path = args.config or os.environ.get(CONFIG_ENV)
    from_file = _read_config(config_path, args.command)
    cfg = {}
    for key, (typ, default, _) in opts.items():
        value = default
        if key in from_file:
            try:
                value = typ(from_file[key])
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise InputError(f"config key '{key}': {exc}") from None
        cli = getattr(args, key)
        if cli is not None:
            value = cli
        if typ is _sizes and isinstance(value, str):
            value = _sizes(value)
        cfg[key] = value
    unknown = set(from_file) - set(opts) - {"out"}
    if unknown:
        raise InputError(f"unknown config keys for '{args.command}': {', '.join(sorted(unknown))}")
    cfg["out"] = args.out if args.out is not None else from_file.get("out")
    cfg["config"] = config_path
    return cfg


def _echo(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k not in NOT_ECHOED}


def _load(cfg: dict) -> Dataset:
    if not cfg.get("panel"):
        raise InputError("--panel is required")
    try:
        return load_dataset(cfg["panel"], cfg["market_col"], cfg["rf_col"])
    except EntroRiskError as exc:
        raise InputError(str(exc)) from None


def _measures(cfg: dict):
    return default_measures(cfg["backend"], cfg["bins_shannon"], cfg["bins_renyi"])


# -- commands ----------------------------------------------------------------------


def cmd_synth(cfg: dict) -> None:
    n = cfg["securities"]
    start = np.datetime64(cfg["start"], "D")
    days = cfg["days"]
    if cfg["years"]:
        end = np.datetime64(f"{start.astype('datetime64[Y]').astype(int) + 1970 + cfg['years']}-01-01")
        days = int(np.busday_count(start, end))
        cfg = {**cfg, "days": days}
    if cfg["beta_high"] < cfg["beta_low"] or cfg["idio_high"] < cfg["idio_low"]:
        raise InputError("upper bounds must not be below lower bounds")
    rng = task_rng(cfg["seed"], 1)
    betas = rng.uniform(cfg["beta_low"], cfg["beta_high"], n)
    idio = rng.uniform(cfg["idio_low"], cfg["idio_high"], n)
    d = generate_synthetic(
        n, days, betas, cfg["market_vol"], idio, cfg["market_drift"], cfg["seed"], cfg["rf"], str(start)
    )
    header = header_lines("synth", _echo(cfg))
    if cfg["out"] in (None, "-"):
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "panel.csv"
            write_panel(d, p, header)
            sys.stdout.write(p.read_text(encoding="utf-8"))
    else:
        write_panel(d, cfg["out"], header)


def cmd_risk(cfg: dict) -> None:
    d = _load(cfg)
    configs = _measures(cfg)
    table = risk_table(d, configs)
    names = [c.name for c in configs]
    rows = ([sid, *(table[m][i] for m in names)] for i, sid in enumerate(d.ids))
    write_csv(cfg["out"], header_lines("risk", _echo(cfg)), ["security_id", *names], rows)


def cmd_diversify(cfg: dict) -> None:
    d = _load(cfg)
    configs = [c for c in _measures(cfg) if c.measure != "beta"]
    curves = diversification_curve(
        d, cfg["sizes"], cfg["max_per_size"], configs, cfg["seed"], cfg["workers"]
    )
    rows = [
        [c.measure, s, m, r, k]
        for c in curves.values()
        for s, m, r, k in zip(c.sizes, c.mean_risk, c.reduction, c.counts)
    ]
    cols = ["measure", "size", "mean_risk", "reduction", "count"]
    write_csv(cfg["out"], header_lines("diversify", _echo(cfg)), cols, rows)


def cmd_scatter(cfg: dict) -> None:
    d = _load(cfg)
    rows = scatter_dataset(d, cfg["sizes"], cfg["per_size"], _measures(cfg), cfg["seed"], cfg["workers"])
    write_csv(cfg["out"], header_lines("scatter", _echo(cfg)), ["measure", "size", "value", "premium"], rows)


def _comparison_rows(rep) -> list[dict]:
    return [
        {
            "sample": rep.sample,
            "direction": rep.direction,
            "measure_a": c.measure_a,
            "measure_b": c.measure_b,
            "t": c.t,
            "df": c.df,
            "p": c.p,
            "significance": c.significance,
            "degenerate": c.degenerate,
        }
        for c in rep.comparisons
    ]


def cmd_evaluate(cfg: dict) -> None:
    d = _load(cfg)
    cal = None
    if cfg["regimes"]:
        try:
            cal = load_regime_calendar(cfg["regimes"])
        except EntroRiskError as exc:
            raise InputError(str(exc)) from None
    out = Path(cfg["out"] or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"{out}: cannot create output directory ({exc.strerror})") from None
    configs = _measures(cfg)
    names = [c.name for c in configs]
    seed, workers = cfg["seed"], cfg["workers"]
    header = header_lines("evaluate", _echo(cfg))

    reports = [explanatory_power(d, configs, "full")]
    if cal is not None:
        reports.extend(regime_evaluation(d, cal, configs))
    results = [row for r in reports for row in r.rows()]
    body: dict = {"results": results}
    res_cols = ["measure", "sample", "direction", "eta", "a0", "a1", "p_a0", "p_a1", "n"]
    write_csv(out / "results.csv", header, res_cols, ([r[c] for c in res_cols] for r in results))

    tests: list[dict] = []
    if cfg["bootstrap"]:
        boot = bootstrap_compare(d, configs, cfg["bootstrap"], cfg["drop"], seed, workers)
        tests.extend(_comparison_rows(boot))
        write_csv(
            out / "bootstrap_r2.csv",
            header,
            ["iteration", *names],
            ([i, *(boot.samples[m][i] for m in names)] for i in range(boot.iterations)),
        )

    if cfg["rolling"]:
        windows = rolling_windows(d, cfg["window_years"], cfg["step_years"], cfg["in_years"])
        roll = rolling_evaluation(d, windows, configs, workers)
        rows = []
        for w, ri, ro in zip(windows, roll.in_reports, roll.out_reports):
            for rep in (ri, ro):
                rows.append(
                    [w.label, *w.in_range, *w.out_range, rep.direction, *(rep.fits[m].r_squared for m in names)]
                )
        cols = ["window", "in_start", "in_end", "out_start", "out_end", "direction", *names]
        write_csv(out / "rolling.csv", header, cols, rows)
        body["rolling"] = {
            "windows": [w.label for w in windows],
            "summary": roll.summary(),
            "results": [row for r in roll.in_reports + roll.out_reports for row in r.rows()],
        }
        if cfg["bootstrap"]:
            for k, w in enumerate(windows):
                d_in, d_out = apply_window(d, w)
                for target in (None, d_out):
                    rep = bootstrap_compare(
                        d_in, configs, cfg["bootstrap"], cfg["drop"], seed + 1 + k, workers, target, w.label
                    )
                    tests.extend(_comparison_rows(rep))

    if cfg["bootstrap"]:
        body["bootstrap"] = {"iterations": cfg["bootstrap"], "drop": cfg["drop"], "comparisons": tests}
        tcols = ["sample", "direction", "measure_a", "measure_b", "t", "df", "p", "significance", "degenerate"]
        write_csv(out / "bootstrap_tests.csv", header, tcols, ([t[c] for c in tcols] for t in tests))
    write_json(out / "summary.json", "evaluate", _echo(cfg), body)


RUNNERS = {
    "synth": cmd_synth,
    "risk": cmd_risk,
    "diversify": cmd_diversify,
    "scatter": cmd_scatter,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        RUNNERS[args.command](cfg)
    except InputError as exc:
        print(f"entrorisk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"entrorisk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (EntroRiskError, ValueError) as exc:
        print(f"entrorisk {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
