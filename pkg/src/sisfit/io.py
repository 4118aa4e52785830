"""Reading and writing delimited signal tables, weights, and model files.

All text formats are line based.  Floats are printed with 17 significant
digits so that a save -> load -> save cycle is byte identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import SisModel
from .transform import GridSpec, SignalSet, fiberize

MODEL_MAGIC = "sisfit-model"
MODEL_FORMAT_VERSION = 1


class ParseError(Exception):
    """Malformed input data (bad table, bad model file)."""


class ConfigError(Exception):
    """Inconsistent configuration (grid mismatch, bad weights, ...)."""


def fmt(x: float) -> str:
    """Shortest-faithful decimal form used across all output files."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class RunConfig:
    """Validated command-line parameters shared by the subcommands."""

    axes: tuple[int, ...]
    phases: tuple[int, ...]
    complex_pairs: bool = False
    rank_tol: float = 1e-10
    gap_tol: float = 1e-8

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        try:
            axes = tuple(int(tok) for tok in str(args.axes).replace(",", " ").split())
            phases = tuple(int(tok) for tok in str(args.phases).replace(",", " ").split())
        except ValueError as exc:
            raise ConfigError(f"axes and phases must be integers: {exc}") from None
        return cls(
            axes=axes,
            phases=phases,
            complex_pairs=bool(getattr(args, "complex", False)),
            rank_tol=float(getattr(args, "rank_tol", 1e-10)),
            gap_tol=float(getattr(args, "gap_tol", 1e-8)),
        )

    def grid(self) -> GridSpec:
        if self.rank_tol <= 0 or self.gap_tol <= 0:
            raise ConfigError("tolerances must be positive")
        try:
            return GridSpec(self.axes, self.phases)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def read_table(path) -> np.ndarray:
    """Read a whitespace- or comma-delimited numeric table.

    Blank lines and lines starting with ``#`` are skipped.  Ragged rows and
    non-numeric or non-finite entries raise :class:`ParseError` with the
    offending line number.
    """
    path = Path(path)
    rows: list[list[float]] = []
    width = None
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.replace(",", " ").split()
        try:
            values = [float(tok) for tok in tokens]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric entry") from None
        if not all(np.isfinite(values)):
            raise ParseError(f"{path}:{lineno}: non-finite entry")
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(
                f"{path}:{lineno}: expected {width} columns, got {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def parse_signals(path, config: RunConfig) -> SignalSet:
    """Read a signal table (one column per signal, one row per sample)."""
    grid = config.grid()
    table = read_table(path)
    if table.shape[0] != grid.size:
        raise ParseError(
            f"{path}: expected {grid.size} rows for the configured grid, "
            f"got {table.shape[0]}"
        )
    if config.complex_pairs:
        if table.shape[1] % 2:
            raise ParseError(
                f"{path}: --complex needs an even column count, got {table.shape[1]}"
            )
        samples = table[:, 0::2] + 1j * table[:, 1::2]
    else:
        samples = table.astype(np.complex128)
    return SignalSet(grid, samples.T)


def write_signals(path, samples: np.ndarray) -> None:
    """Write signals (rows) as a table with re/im column pairs."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.complex128))
    with open(path, "w") as fh:
        for k in range(samples.shape[1]):
            cells = []
            for row in samples:
                cells.append(fmt(row[k].real))
                cells.append(fmt(row[k].imag))
            fh.write(" ".join(cells) + "\n")


def load_weights(path, count: int) -> np.ndarray:
    """Read one positive weight per signal from a one-column table."""
    table = read_table(path)
    flat = table.ravel()
    if flat.shape[0] != count:
        raise ConfigError(f"{path}: expected {count} weights, got {flat.shape[0]}")
    if np.any(flat <= 0.0):
        raise ConfigError(f"{path}: weights must be positive")
    return flat


def write_curve(path, curve: np.ndarray, gamma: float | None = None) -> None:
    """Write the error-versus-order table, optionally with the penalized cost."""
    with open(path, "w") as fh:
        if gamma is None:
            fh.write("# n error\n")
            for k, err in enumerate(curve):
                fh.write(f"{k} {fmt(err)}\n")
        else:
            fh.write("# n error cost\n")
            for k, err in enumerate(curve):
                fh.write(f"{k} {fmt(err)} {fmt(err + gamma * k)}\n")


def save_model(path, model: SisModel) -> None:
    """Write a model file: grid, diagnostics, then one line per generator."""
    grid = model.grid
    lines = [
        MODEL_MAGIC,
        f"format_version {MODEL_FORMAT_VERSION}",
        f"d {grid.ndim}",
        "axes " + " ".join(str(n) for n in grid.axes),
        "phases " + " ".join(str(p) for p in grid.phases),
        f"n {model.n}",
        f"rank_tol {fmt(model.rank_rel)}",
        f"gap_tol {fmt(model.gap_rel)}",
        f"unique_flag {int(model.unique_flag)}",
        f"min_gap {fmt(model.min_gap)}",
        f"length_actual {model.length_actual}",
        f"r_min {model.r_min}",
        f"r_max {model.r_max}",
    ]
    for i, gen in enumerate(model.generators):
        cells = []
        for z in gen:
            cells.append(fmt(z.real))
            cells.append(fmt(z.imag))
        lines.append(f"generator {i} " + " ".join(cells))
    lines.append("end")
    Path(path).write_text("\n".join(lines) + "\n")


def _model_fields(path) -> tuple[dict, list[np.ndarray]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None
    lines = text.splitlines()
    if not lines or lines[0].strip() != MODEL_MAGIC:
        raise ParseError(f"{path}:1: not a model file (missing '{MODEL_MAGIC}')")
    fields: dict[str, str] = {}
    generators: list[np.ndarray] = []
    ended = False
    for lineno, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped == "end":
            ended = True
            break
        key, _, rest = stripped.partition(" ")
        if key == "generator":
            toks = rest.split()
            try:
                idx = int(toks[0])
                flat = np.asarray([float(t) for t in toks[1:]])
            except (ValueError, IndexError):
                raise ParseError(f"{path}:{lineno}: malformed generator line") from None
            if idx != len(generators) or flat.shape[0] % 2:
                raise ParseError(f"{path}:{lineno}: malformed generator line")
            generators.append(flat[0::2] + 1j * flat[1::2])
        else:
            fields[key] = rest
    if not ended:
        raise ParseError(f"{path}: missing 'end' line")
    return fields, generators


def load_model(path) -> SisModel:
    """Read a model file back.  The per-fiber form is rebuilt from the
    generators; the synthesis scales are not stored and come back as None."""
    fields, generators = _model_fields(path)
    try:
        version = int(fields["format_version"])
        d = int(fields["d"])
        axes = tuple(int(t) for t in fields["axes"].split())
        phases = tuple(int(t) for t in fields["phases"].split())
        n = int(fields["n"])
        rank_tol = float(fields["rank_tol"])
        gap_tol = float(fields["gap_tol"])
        unique_flag = bool(int(fields["unique_flag"]))
        min_gap = float(fields["min_gap"])
        length_actual = int(fields["length_actual"])
        r_min = int(fields["r_min"])
        r_max = int(fields["r_max"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"{path}: missing or malformed field ({exc})") from None
    if version != MODEL_FORMAT_VERSION:
        raise ParseError(f"{path}: unsupported format_version {version}")
    if len(axes) != d or len(phases) != d:
        raise ParseError(f"{path}: axes/phases do not match d={d}")
    try:
        grid = GridSpec(axes, phases)
    except ValueError as exc:
        raise ParseError(f"{path}: bad grid ({exc})") from None
    if len(generators) != n:
        raise ParseError(f"{path}: expected {n} generator lines, got {len(generators)}")
    if n:
        gens = np.stack(generators)
        if gens.shape[1] != grid.size:
            raise ParseError(
                f"{path}: generator length {gens.shape[1]} does not match the grid"
            )
        fibers = fiberize(SignalSet(grid, gens)).data.transpose(2, 0, 1)
        fibers = np.ascontiguousarray(fibers)
    else:
        gens = np.zeros((0, grid.size), dtype=np.complex128)
        fibers = np.zeros((0, grid.translate_count, grid.fiber_size), dtype=np.complex128)
    return SisModel(
        grid=grid,
        n=n,
        generators=gens,
        fibers=fibers,
        sigma_tilde=None,
        length_actual=length_actual,
        r_min=r_min,
        r_max=r_max,
        unique_flag=unique_flag,
        min_gap=min_gap,
        rank_rel=rank_tol,
        gap_rel=gap_tol,
    )


def format_report(report) -> str:
    """Human-readable fit summary written next to the model file."""
    lines = [
        f"model order            {report.n}",
        f"approximation error    {fmt(report.error)}",
        f"total energy           {fmt(report.total_energy)}",
        f"minimum fiber rank     {report.r_min}",
        f"maximum fiber rank     {report.r_max}",
        f"active orders          {report.length_actual}",
        f"unique optimum         {'yes' if report.unique_flag else 'no'}",
        f"minimum spectral gap   {fmt(report.min_gap)}",
        f"weighted               {'yes' if report.weighted else 'no'}",
    ]
    if report.frame_bounds is not None:
        lo, hi = report.frame_bounds
        lines.append(f"frame bounds           {fmt(lo)} {fmt(hi)}")
    if report.gamma is not None:
        lines.append(f"gamma                  {fmt(report.gamma)}")
        lines.append(f"selected order         {report.selected_n}")
    lines.append("")
    lines.append("# n error")
    for k, err in enumerate(report.curve):
        lines.append(f"{k} {fmt(err)}")
    return "\n".join(lines) + "\n"
