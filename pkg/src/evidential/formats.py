"""Text formats: bpa documents, experiment configs and CSV output.

A bpa document looks like::

    # comment
    frame: a b c d e
    mass 0.5 set a,b
    mass 0.5 set a,c,d

Masses are written with ``repr`` so documents round-trip exactly.
"""

from __future__ import annotations

import io
import math
import re
from typing import Iterable, TextIO

from . import __version__
from .approx import canonical_name, method_from_name
from .core import Bpa, EvidentialError, Frame, UnknownElement, make_bpa
from .testbed import RNG_NAME, ExperimentConfig, GenConfig, RunStats, TrialRecord

_LABEL = re.compile(r"[^\s,#]+")


class BpaSyntaxError(EvidentialError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ConfigError(EvidentialError):
    pass


def _tokens(text: str):
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", text)]


def parse_bpa(text: str) -> Bpa:
    frame = None
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        toks = _tokens(line)
        head, col = toks[0]
        if head == "frame:":
            if frame is not None:
                raise BpaSyntaxError(lineno, col, "frame declared twice")
            labels = [t for t, _ in toks[1:]]
            if not labels:
                raise BpaSyntaxError(lineno, col, "empty frame")
            for label, lcol in toks[1:]:
                if not _LABEL.fullmatch(label):
                    raise BpaSyntaxError(lineno, lcol, f"bad element label {label!r}")
            try:
                frame = Frame(labels)
            except ValueError as exc:
                raise BpaSyntaxError(lineno, col, str(exc)) from None
            continue
        if head != "mass":
            raise BpaSyntaxError(lineno, col, f"expected 'frame:' or 'mass', got {head!r}")
        if frame is None:
            raise BpaSyntaxError(lineno, col, "mass line before frame declaration")
        if len(toks) != 4 or toks[2][0] != "set":
            raise BpaSyntaxError(lineno, col, "expected 'mass <real> set <elem>[,<elem>]*'")
        (value, vcol), (elems, ecol) = toks[1], toks[3]
        try:
            mass = float(value)
        except ValueError:
            raise BpaSyntaxError(lineno, vcol, f"bad mass {value!r}") from None
        if not math.isfinite(mass):
            raise BpaSyntaxError(lineno, vcol, f"bad mass {value!r}")
        labels = elems.split(",")
        bits = 0
        offset = 0
        for label in labels:
            if not label:
                raise BpaSyntaxError(lineno, ecol + offset, "empty element in set")
            try:
                bit = 1 << frame.index(label)
            except UnknownElement:
                raise UnknownElement(
                    f"line {lineno}, column {ecol + offset}: unknown element {label!r}"
                ) from None
            if bits & bit:
                raise BpaSyntaxError(lineno, ecol + offset, f"element {label!r} repeated")
            bits |= bit
            offset += len(label) + 1
        entries.append((bits, mass))
    if frame is None:
        raise BpaSyntaxError(1, 1, "missing frame declaration")
    return make_bpa(frame, entries)


def format_bpa(m: Bpa) -> str:
    out = ["frame: " + " ".join(m.frame.elements)]
    for bits, mass in m.items():
        out.append(f"mass {mass!r} set " + ",".join(m.frame.labels(bits)))
    return "\n".join(out) + "\n"


CONFIG_KEYS = (
    "frame_size", "focal_count", "seed", "rate", "subset_dist",
    "methods", "combinations", "trials", "track",
)


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        out[key] = value
    return out


def build_experiment(settings: dict[str, str]) -> ExperimentConfig:
    """Turn string settings (from a config file or flags) into a config."""
    try:
        gen = GenConfig(
            frame_size=int(settings.get("frame_size", 32)),
            focal_count=int(settings.get("focal_count", 8)),
            rng_seed=int(settings.get("seed", 0)),
            rate=float(settings.get("rate", 1.0)),
            subset_dist=settings.get("subset_dist", "uniform-size"),
        )
        names = settings.get("methods")
        if names:
            methods = {canonical_name(n): method_from_name(n) for n in names.split(",") if n.strip()}
        else:
            methods = ExperimentConfig().methods
        return ExperimentConfig(
            gen=gen,
            methods=methods,
            combinations=int(settings.get("combinations", 5)),
            trials=int(settings.get("trials", 1000)),
            track=settings.get("track", "cumulative"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _num(x: float) -> str:
    return f"{x:.6g}"


def metadata_line(cfg: ExperimentConfig, stats: RunStats | None = None) -> str:
    fields = [
        f"seed={cfg.gen.rng_seed}",
        f"rng={RNG_NAME}",
        f"track={cfg.track}",
        f"subset_dist={cfg.gen.subset_dist}",
        f"frame_size={cfg.gen.frame_size}",
        f"focal_count={cfg.gen.focal_count}",
        f"combinations={cfg.combinations}",
        f"trials={cfg.trials}",
        f"version={__version__}",
    ]
    if stats is not None:
        fields.append(f"aborted={stats.aborted}")
    return "# " + " ".join(fields) + "\n"


TRIAL_HEADER = "method,step,trial,n_original,n_approx,error1,error2,error3\n"


def trial_row(rec: TrialRecord) -> str:
    e = rec.errors
    return (
        f"{rec.method},{rec.step},{rec.trial},{rec.n_original},{rec.n_approx},"
        f"{_num(e.error1)},{e.error2},{e.error3}\n"
    )


def write_stats(out: TextIO, cfg: ExperimentConfig, stats: RunStats) -> None:
    """One row per method: focal-set size columns at the last step plus
    per-step error means."""
    steps = range(1, cfg.combinations + 1)
    header = ["method", "trials", "orig_avg", "orig_min", "orig_max", "approx_avg", "approx_min", "approx_max"]
    for q in ("error1", "error2", "error3"):
        header += [f"{q}_step{s}" for s in steps]
    out.write(metadata_line(cfg, stats))
    out.write(",".join(header) + "\n")
    last = cfg.combinations
    for name in stats.methods:
        if stats.trials == 0:
            out.write(",".join([name, "0"] + ["nan"] * (len(header) - 2)) + "\n")
            continue
        orig = stats.get(name, last, "n_original")
        appr = stats.get(name, last, "n_approx")
        row = [name, str(stats.trials), _num(orig.mean), str(int(orig.min)), str(int(orig.max)),
               _num(appr.mean), str(int(appr.min)), str(int(appr.max))]
        for q in ("error1", "error2", "error3"):
            row += [_num(stats.mean(name, s, q)) for s in steps]
        out.write(",".join(row) + "\n")


def stats_csv(cfg: ExperimentConfig, stats: RunStats) -> str:
    buf = io.StringIO()
    write_stats(buf, cfg, stats)
    return buf.getvalue()


def trials_csv(cfg: ExperimentConfig, records: Iterable[TrialRecord], stats: RunStats | None = None) -> str:
    return metadata_line(cfg, stats) + TRIAL_HEADER + "".join(trial_row(r) for r in records)
