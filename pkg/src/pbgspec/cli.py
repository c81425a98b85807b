"""Command-line front end.

Subcommands ``spectrum``, ``darklines``, ``oracle`` and ``figure``; each writes
CSV (``delta_lambda,S``) and JSON summaries atomically and prints the summary
to stdout.  Library errors map to distinct exit codes (see ``errors``).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
import warnings
from pathlib import Path

from .config import RunConfig, load_config
from .darklines import count_peaks, find_zeros, predict_dark_lines
from .errors import PbgSpecError, TruncationWarning, ValidationError
from .oracle import build_comb, compare_spectra, discretized_mode_evolve, solve_volterra, spectrum_from_trajectory
from .presets import CURVES, DEFAULT_GRID, FIGURE_IDS, figure_configs
from .spectra import FrequencyGrid, Normalization, eval_grid

__all__ = ["main", "cmd_spectrum", "cmd_darklines", "cmd_oracle", "cmd_figure", "format_csv", "write_atomic"]

EXIT_IO = 11


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(spec) -> str:
    rows = ["delta_lambda,S"]
    rows.extend(f"{x:.17g},{s:.17g}" for x, s in zip(spec.points.tolist(), spec.values.tolist()))
    return "\n".join(rows) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _summary_path(out: Path) -> Path:
    if out.suffix == ".json":
        return out.with_name(out.name + ".summary.json")
    return out.with_suffix(".json")


def _grid_record(grid: FrequencyGrid):
    return {"min": grid.min, "max": grid.max, "n": grid.n}


def _analyse(cfg: RunConfig):
    """Closed-form spectrum plus its peak count and refined zeros."""
    raw = eval_grid(cfg.emitter, cfg.grid)
    return raw, count_peaks(raw), find_zeros(raw)


def _resolve_out(out, cfg: RunConfig, base: Path | None):
    if out is not None:
        return Path(out)
    if cfg.output is None:
        raise ValidationError("output", "no --out given and the configuration has no output path")
    path = Path(cfg.output)
    return path if path.is_absolute() or base is None else base / path


def cmd_spectrum(cfg: RunConfig, out) -> dict:
    """Closed-form spectrum to ``out`` (CSV) and its summary next to it (JSON)."""
    start = time.perf_counter()
    raw, peaks, zeros = _analyse(cfg)
    out = Path(out)
    write_atomic(out, format_csv(raw.normalized(cfg.normalization)))
    summary = {
        "command": "spectrum",
        "grid": _grid_record(cfg.grid),
        "normalization": cfg.normalization.value,
        "peaks": peaks,
        "zeros": zeros,
        "runtime_ms": round(1e3 * (time.perf_counter() - start), 3),
    }
    write_atomic(_summary_path(out), _json(summary))
    return summary


def cmd_darklines(cfg: RunConfig) -> dict:
    """Predicted dark-line catalogue next to the zeros detected on the grid."""
    start = time.perf_counter()
    _, peaks, zeros = _analyse(cfg)
    return {
        "command": "darklines",
        "grid": _grid_record(cfg.grid),
        "predicted": [line.to_dict() for line in predict_dark_lines(cfg.emitter)],
        "peaks": peaks,
        "zeros": zeros,
        "runtime_ms": round(1e3 * (time.perf_counter() - start), 3),
    }


def run_oracle(cfg: RunConfig, method: str = "volterra"):
    """Raw oracle spectrum on ``cfg.grid``; returns ``(spectrum, warnings)``."""
    em = cfg.emitter
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        if method == "volterra":
            traj = solve_volterra(em, cfg.t_max, cfg.dt)
            spec = spectrum_from_trajectory(traj, cfg.grid)
        elif method == "comb":
            comb = build_comb(em.model, em.g, spacing=cfg.comb_spacing)
            spec, _ = discretized_mode_evolve(em, comb, cfg.grid, cfg.t_max, cfg.dt)
        else:
            raise ValidationError("method", f"unknown oracle method {method!r}")
    notes = [str(w.message) for w in caught if issubclass(w.category, TruncationWarning)]
    return spec, notes


def cmd_oracle(cfg: RunConfig, out, method: str = "volterra") -> dict:
    """Time-domain oracle spectrum to ``out`` plus its distance from the closed form.

    ``peaks`` counts maxima of the oracle spectrum; ``zeros`` are the refined
    zeros of the closed form it is checked against.
    """
    start = time.perf_counter()
    raw, _, zeros = _analyse(cfg)
    spec, notes = run_oracle(cfg, method)
    out = Path(out)
    write_atomic(out, format_csv(spec.normalized(cfg.normalization)))
    summary = {
        "command": "oracle",
        "method": method,
        "grid": _grid_record(cfg.grid),
        "normalization": cfg.normalization.value,
        "t_max": cfg.t_max,
        "dt": cfg.dt,
        "peaks": count_peaks(spec),
        "zeros": zeros,
        "max_rel_err": compare_spectra(raw, spec, 0.1),
        "warnings": notes,
        "runtime_ms": round(1e3 * (time.perf_counter() - start), 3),
    }
    write_atomic(_summary_path(out), _json(summary))
    return summary


def cmd_figure(fig_id: int, outdir, normalization=Normalization.RAW) -> dict:
    """All three curves of a figure preset.

    Per curve ``fig<N>_<curve>.csv`` and the reloadable ``fig<N>_<curve>.json``
    config; ``fig<N>_summary.json`` collects peaks and zeros.  Files carry no
    timing so repeated runs are byte-identical; ``runtime_ms`` is only in the
    returned record.
    """
    start = time.perf_counter()
    outdir = Path(outdir)
    grid = FrequencyGrid(*DEFAULT_GRID)
    curves = {}
    for curve, emitter in figure_configs(fig_id):
        stem = f"fig{fig_id}_{curve}"
        cfg = RunConfig(emitter, grid, normalization=normalization, output=f"{stem}.csv")
        raw, peaks, zeros = _analyse(cfg)
        write_atomic(outdir / f"{stem}.csv", format_csv(raw.normalized(cfg.normalization)))
        write_atomic(outdir / f"{stem}.json", cfg.dumps())
        curves[curve] = {"delta_g": CURVES[curve], "peaks": peaks, "zeros": zeros}
    summary = {
        "command": "figure",
        "figure": fig_id,
        "grid": _grid_record(grid),
        "normalization": Normalization(normalization).value,
        "curves": curves,
    }
    write_atomic(outdir / f"fig{fig_id}_summary.json", _json(summary))
    return dict(summary, runtime_ms=round(1e3 * (time.perf_counter() - start), 3))


def _load(args):
    cfg = load_config(args.config)
    if args.normalize is not None:
        cfg = cfg.with_(normalization=Normalization(args.normalize))
    return cfg, Path(args.config).resolve().parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbgspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--normalize", choices=[n.value for n in Normalization], default=None,
                       help="raw spectrum or unit peak (default: from config, else raw)")
        return p

    p = add("spectrum", "closed-form spectrum to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path (default: 'output' in the config)")

    p = add("darklines", "predicted and detected dark lines")
    p.add_argument("--config", required=True)

    p = add("oracle", "time-domain oracle spectrum and its error")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path (default: 'output' in the config)")
    p.add_argument("--method", choices=["volterra", "comb"], default="volterra")

    p = add("figure", "all curves of one figure preset")
    p.add_argument("--id", type=int, required=True, choices=list(FIGURE_IDS))
    p.add_argument("--outdir", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "figure":
            summary = cmd_figure(args.id, args.outdir, args.normalize or Normalization.RAW)
        else:
            cfg, base = _load(args)
            if args.command == "spectrum":
                summary = cmd_spectrum(cfg, _resolve_out(args.out, cfg, base))
            elif args.command == "darklines":
                summary = cmd_darklines(cfg)
            else:
                summary = cmd_oracle(cfg, _resolve_out(args.out, cfg, base), args.method)
    except PbgSpecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    sys.stdout.write(_json(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
