"""Pulse alphabet, fixed-length pulse words and the baseline library.

Codes::

    0  Null
    1  +X pi     2  -X pi     3  +Y pi     4  -Y pi
    5  +X pi/2   6  -X pi/2   7  +Y pi/2   8  -Y pi/2
    9  +X pi/3  10  -X pi/3  11  +Y pi/3  12  -Y pi/3
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .spin import AXES, I2, rotation_unitary

N_CODES = 13
DEFAULT_LENGTH = 24
DEFAULT_TAU = 0.1  # us
DEFAULT_RABI = 2 * np.pi * 10.0  # rad/us, 50 ns pi pulse
NULL_SLOTS = ("pi_slot", "interval_only")


class Pulse(NamedTuple):
    code: int
    axis: str | None
    angle: float


def _alphabet():
    out = [Pulse(0, None, 0.0)]
    for angle in (np.pi, np.pi / 2, np.pi / 3):
        for axis in ("+X", "-X", "+Y", "-Y"):
            out.append(Pulse(len(out), axis, angle))
    return tuple(out)


ALPHABET = _alphabet()
ANGLES = np.array([p.angle for p in ALPHABET])
AXIS_VECTORS = np.array([AXES[p.axis] if p.axis else np.zeros(3) for p in ALPHABET])
IDEAL_UNITARIES = np.array([I2] + [rotation_unitary(p.axis, p.angle) for p in ALPHABET[1:]])


def pulse(code):
    if not 0 <= int(code) < N_CODES:
        raise ValueError(f"pulse code {code} out of range 0..{N_CODES - 1}")
    return ALPHABET[int(code)]


def code_of(axis, angle):
    """Inverse of :func:`pulse`; ``axis=None`` is the Null operation."""
    if axis is None:
        return 0
    for p in ALPHABET[1:]:
        if p.axis == axis and math.isclose(p.angle, angle, rel_tol=1e-12):
            return p.code
    raise ValueError(f"no pulse ({axis}, {angle}) in the alphabet")


def search_space_size(d=DEFAULT_LENGTH, n_codes=N_CODES):
    return n_codes**d


@dataclass(frozen=True)
class PulseSequence:
    """A word of pulse codes plus the timing that realizes it.

    Each slot is a free-evolution window followed by the pulse. With
    ``null_slot="pi_slot"`` every slot lasts ``tau + t_pi`` (shorter pulses
    are preceded by correspondingly longer free evolution and a Null is pure
    free evolution), so all words of equal length share one cycle time. With
    ``"interval_only"`` a slot is ``tau`` plus the pulse's own duration.
    """

    codes: tuple
    tau: float = DEFAULT_TAU
    rabi: float = DEFAULT_RABI
    null_slot: str = "pi_slot"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        codes = tuple(int(c) for c in self.codes)
        object.__setattr__(self, "codes", codes)
        if not codes:
            raise ValueError("a pulse sequence needs at least one slot")
        if any(not 0 <= c < N_CODES for c in codes):
            raise ValueError(f"pulse codes must lie in 0..{N_CODES - 1}")
        if not self.tau > 0 or not self.rabi > 0:
            raise ValueError("tau and rabi must be positive")
        if self.null_slot not in NULL_SLOTS:
            raise ValueError(f"null_slot must be one of {NULL_SLOTS}")

    def __len__(self):
        return len(self.codes)

    @property
    def pulses(self):
        return [ALPHABET[c] for c in self.codes]

    @property
    def t_pi(self):
        return np.pi / self.rabi

    def pulse_durations(self):
        return ANGLES[list(self.codes)] / self.rabi

    def free_durations(self):
        tp = self.pulse_durations()
        if self.null_slot == "pi_slot":
            return self.tau + self.t_pi - tp
        return np.full(len(self), self.tau)

    @property
    def cycle_time(self):
        return float(np.sum(self.free_durations() + self.pulse_durations()))

    def with_codes(self, codes):
        return replace(self, codes=tuple(codes), name="")


@dataclass(frozen=True)
class Protocol:
    """Non-word baselines: free decay or continuous drive along an XY axis."""

    name: str
    kind: str  # "free" or "drive"
    axes: tuple  # initial-state axes that are probed
    drive_axis: str | None = None
    slot: float = DEFAULT_TAU + np.pi / DEFAULT_RABI  # time unit per "cycle", us
    pulses: tuple = ()


def encode(seq):
    return np.array(seq.codes, dtype=int)


def decode(codes, **timing):
    return PulseSequence(tuple(int(c) for c in codes), **timing)


def pulse_matrix(seq_or_codes):
    """One-hot (13, d) matrix; column k marks the code of slot k."""
    codes = np.asarray(getattr(seq_or_codes, "codes", seq_or_codes), dtype=int)
    out = np.zeros((N_CODES, codes.size))
    out[codes, np.arange(codes.size)] = 1.0
    return out


def net_rotation(seq_or_codes):
    """Ordered product ``P_d ... P_1`` of ideal pulse unitaries."""
    codes = getattr(seq_or_codes, "codes", seq_or_codes)
    u = I2.copy()
    for c in codes:
        u = IDEAL_UNITARIES[c] @ u
    return u


def repeat(seq, r):
    if r < 1:
        raise ValueError("repetition count must be >= 1")
    return replace(seq, codes=tuple(seq.codes) * int(r), name=f"{seq.name}^{r}" if seq.name else "")


def random_codes(rng, d=DEFAULT_LENGTH, alphabet=None, size=None):
    """Uniform random words; ``alphabet`` restricts the allowed codes."""
    choices = np.arange(N_CODES) if alphabet is None else np.asarray(alphabet, dtype=int)
    shape = (d,) if size is None else (size, d)
    return choices[rng.integers(0, choices.size, size=shape)]


# -- data files ---------------------------------------------------------------

class SequenceFileError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


PROTOCOL_NAMES = ("ramsey", "spin_lock_x", "spin_lock_y")


def protocol(name, rabi=DEFAULT_RABI, tau=DEFAULT_TAU):
    slot = tau + np.pi / rabi
    if name == "ramsey":
        return Protocol("ramsey", "free", ("x", "y"), None, slot)
    if name in ("spin_lock_x", "spin_lock_y"):
        ax = name[-1]
        other = "y" if ax == "x" else "x"
        return Protocol(name, "drive", (ax, other), "+" + ax.upper(), slot)
    raise ValueError(f"unknown protocol {name!r}")


def parse_sequence_text(text):
    """Parse the sequence file format.

    ``# key: value`` lines set metadata; ``# name: foo`` names the next entry.
    Data lines are comma-separated integer codes or a protocol keyword.
    Returns ``(metadata, entries)`` where each entry is ``(name, codes|None, protocol|None)``.
    """
    meta, entries, pending = {}, [], None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, value = (s.strip() for s in body.split(":", 1))
                if key == "name":
                    pending = value
                else:
                    meta[key] = value
            continue
        if line in PROTOCOL_NAMES:
            entries.append((pending or line, None, line))
        else:
            try:
                codes = tuple(int(tok) for tok in line.split(","))
            except ValueError:
                raise SequenceFileError(f"cannot parse codes {line!r}", lineno) from None
            if any(not 0 <= c < N_CODES for c in codes):
                raise SequenceFileError(f"code out of range in {line!r}", lineno)
            entries.append((pending or f"seq_{len(entries):04d}", codes, None))
        pending = None
    return meta, entries


def read_sequences(path, tau=None, rabi=None, null_slot=None):
    """Load a sequence file into ``PulseSequence`` / ``Protocol`` objects."""
    meta, entries = parse_sequence_text(Path(path).read_text())
    if not entries:
        raise SequenceFileError(f"{path}: no sequences found")
    try:
        tau = float(meta.get("tau", DEFAULT_TAU)) if tau is None else tau
        rabi = float(meta.get("rabi", DEFAULT_RABI)) if rabi is None else rabi
    except ValueError as exc:
        raise SequenceFileError(f"bad timing metadata: {exc}") from None
    null_slot = meta.get("null_slot", "pi_slot") if null_slot is None else null_slot
    out = []
    for name, codes, proto in entries:
        if proto is not None:
            p = protocol(proto, rabi=rabi, tau=tau)
            out.append(replace(p, name=name))
        else:
            out.append(PulseSequence(codes, tau=tau, rabi=rabi, null_slot=null_slot, name=name))
    return meta, out


def format_sequences(seqs, meta=None):
    lines = [f"# {k}: {v}" for k, v in (meta or {}).items()]
    for s in seqs:
        if getattr(s, "name", ""):
            lines.append(f"# name: {s.name}")
        if isinstance(s, Protocol):
            lines.append(s.name if s.name in PROTOCOL_NAMES else "ramsey")
        else:
            lines.append(",".join(str(c) for c in s.codes))
    return "\n".join(lines) + "\n"


def write_sequences(path, seqs, meta=None):
    Path(path).write_text(format_sequences(seqs, meta))


# -- baselines ----------------------------------------------------------------

BASELINE_NAMES = ("ramsey", "xy8", "xy16", "droid_r2d2", "spin_lock_x")

# XY8 x 3 with the first +X pi replaced by +X pi/2: net rotation pi/2 about -X
NET_X_DEMO = (5, 3, 1, 3, 3, 1, 3, 1) + (1, 3, 1, 3, 3, 1, 3, 1) * 2


def _library():
    text = resources.files("doess.data").joinpath("baselines.txt").read_text()
    _, entries = parse_sequence_text(text)
    return {name: codes for name, codes, _ in entries if codes is not None}


def baseline(name, tau=DEFAULT_TAU, rabi=DEFAULT_RABI, null_slot="pi_slot"):
    """Canonical baseline word (or protocol descriptor for ramsey/spin locking)."""
    if name not in BASELINE_NAMES:
        raise ValueError(f"unknown baseline {name!r}; expected one of {BASELINE_NAMES}")
    if name in PROTOCOL_NAMES:
        return protocol(name, rabi=rabi, tau=tau)
    return PulseSequence(_library()[name], tau=tau, rabi=rabi, null_slot=null_slot, name=name)
