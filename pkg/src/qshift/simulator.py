"""Clocked, bit-exact Pauli propagation through a shift register circuit.

The simulator interprets the circuit IR directly from the per-cycle
update rules (CNOT a->b: x_b ^= x_a, z_a ^= z_b; CPHASE: z_a ^= x_b,
z_b ^= x_a; H swaps z and x; P: z ^= x; feedback blocks run their fixed
recursions).  It shares no algebra with the symbolic transfer
computation, so impulse responses provide an independent check of every
closed-form matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gf2poly import LaurentPoly, ParseError, ZERO
from .circuit import FeedbackNode, FiniteSection, ShiftRegisterCircuit
from .symplectic import SympMatrix


@dataclass
class SimState:
    """Mutable per-section memory bits; reset state is the identity Pauli."""

    clock: int = 0
    parts: list = field(default_factory=list)


def reset_state(c: ShiftRegisterCircuit) -> SimState:
    parts = []
    for sec in c.sections:
        if isinstance(sec, FiniteSection):
            parts.append([[[0, 0] for _ in range(d)] for d in sec.depths])
        else:
            m = sec.m
            parts.append([[0, 0] for _ in range(m)])  # cells hold [z, x]
    return SimState(0, parts)


def _step_finite(sec: FiniteSection, cells, frame):
    n = len(sec.depths)
    slots = [[list(frame[w])] + [list(cell) for cell in cells[w]] for w in range(n)]
    for p in sec.placements:
        wa, sa = p.a
        a = slots[wa - 1][sa]
        if p.kind == "H":
            a[0], a[1] = a[1], a[0]
        elif p.kind == "P":
            a[0] ^= a[1]
        else:
            wb, sb = p.b
            b = slots[wb - 1][sb]
            if p.kind == "CNOT":
                b[1] ^= a[1]
                a[0] ^= b[0]
            else:  # CPHASE
                a[0] ^= b[1]
                b[0] ^= a[1]
    out = []
    for w in range(n):
        d = sec.depths[w]
        out.append((slots[w][d][0], slots[w][d][1]))
        cells[w] = slots[w][:d]
    return out


def _step_feedback(sec: FeedbackNode, cells, frame):
    m = sec.m
    taps = sec.poly.support
    w = sec.wire - 1
    z_in, x_in = frame[w]
    prev = [cell[:] for cell in cells]  # recursions read last cycle's state

    if sec.kind == "Z":
        ff_in, fb_in = x_in, z_in
        ff, fb = 1, 0  # feedforward updates the x component
    else:
        ff_in, fb_in = z_in, x_in
        ff, fb = 0, 1

    # feedforward side: out = m_M + f_0 * in; cell_i collects f_{M-i+1} * in
    ff_out = prev[m - 1][ff] ^ (ff_in if 0 in taps else 0)
    cells[0][ff] = ff_in
    for i in range(2, m + 1):
        tap = ff_in if (m - i + 1) in taps else 0
        cells[i - 1][ff] = prev[i - 2][ff] ^ tap
    # feedback side: out = m_M; cell_1 = in + sum_{i<M} f_i * m_{M-i}
    fb_out = prev[m - 1][fb]
    acc = fb_in
    for i in range(m):
        if i in taps:
            acc ^= prev[m - i - 1][fb]
    cells[0][fb] = acc
    for i in range(2, m + 1):
        cells[i - 1][fb] = prev[i - 2][fb]

    out = list(frame)
    out[w] = (fb_out, ff_out) if sec.kind == "Z" else (ff_out, fb_out)
    return out


def step(c: ShiftRegisterCircuit, state: SimState, frame_in):
    """Advance one cycle; returns (state, frame_out).

    ``frame_in`` is a length-n sequence of (z, x) bit pairs; the frame
    flows through every section within the cycle.  ``state`` is updated
    in place and returned for convenience.
    """
    if len(frame_in) != c.n:
        raise ValueError(f"frame width {len(frame_in)} != {c.n}")
    frame = [(int(z) & 1, int(x) & 1) for z, x in frame_in]
    for sec, cells in zip(c.sections, state.parts):
        if isinstance(sec, FiniteSection):
            frame = _step_finite(sec, cells, frame)
        else:
            frame = _step_feedback(sec, cells, frame)
    state.clock += 1
    return state, frame


@dataclass(frozen=True)
class PauliStream:
    """Per-wire z and x bit sequences as Laurent polynomials in D."""

    zs: tuple
    xs: tuple

    def __post_init__(self):
        if len(self.zs) != len(self.xs):
            raise ValueError("z and x parts disagree on wire count")
        object.__setattr__(self, "zs", tuple(self.zs))
        object.__setattr__(self, "xs", tuple(self.xs))

    @property
    def n(self) -> int:
        return len(self.zs)

    @classmethod
    def zero(cls, n: int) -> "PauliStream":
        return cls((ZERO,) * n, (ZERO,) * n)

    @classmethod
    def impulse(cls, n: int, wire: int, kind: str) -> "PauliStream":
        zs = [ZERO] * n
        xs = [ZERO] * n
        one = LaurentPoly.monomial(0)
        if kind == "Z":
            zs[wire - 1] = one
        else:
            xs[wire - 1] = one
        return cls(zs, xs)

    @property
    def max_exp(self) -> int:
        exps = [p.deg for p in self.zs + self.xs if p]
        return max(exps, default=0)

    def frame(self, t: int):
        return [(p.coeff(t), q.coeff(t)) for p, q in zip(self.zs, self.xs)]

    def to_text(self) -> str:
        lines = [f"n {self.n}"]
        if any(self.zs) or any(self.xs):
            lo = min(p.delay for p in self.zs + self.xs if p)
            hi = self.max_exp
            for t in range(min(lo, 0), hi + 1):
                zbits = "".join(str(p.coeff(t)) for p in self.zs)
                xbits = "".join(str(p.coeff(t)) for p in self.xs)
                if "1" in zbits or "1" in xbits:
                    lines.append(f"n={t} z={zbits} x={xbits}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PauliStream":
        n = None
        zs = xs = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("n "):
                try:
                    n = int(line.split()[1])
                except (IndexError, ValueError) as exc:
                    raise ParseError(f"line {lineno}: bad wire count") from exc
                zs = [set() for _ in range(n)]
                xs = [set() for _ in range(n)]
                continue
            if line.startswith("n="):
                if n is None:
                    raise ParseError(f"line {lineno}: frame before 'n <wires>' header")
                try:
                    kv = dict(f.split("=", 1) for f in line.split())
                    t = int(kv["n"])
                    zbits, xbits = kv["z"], kv["x"]
                except (KeyError, ValueError) as exc:
                    raise ParseError(f"line {lineno}: malformed frame line") from exc
                if t < 0:
                    raise ParseError(f"line {lineno}: negative frame index")
                if len(zbits) != n or len(xbits) != n:
                    raise ParseError(f"line {lineno}: expected {n} bits per field")
                for w in range(n):
                    if zbits[w] == "1":
                        zs[w].add(t)
                    elif zbits[w] != "0":
                        raise ParseError(f"line {lineno}: bad bit {zbits[w]!r}")
                    if xbits[w] == "1":
                        xs[w].add(t)
                    elif xbits[w] != "0":
                        raise ParseError(f"line {lineno}: bad bit {xbits[w]!r}")
                continue
            raise ParseError(f"line {lineno}: unrecognized line {line!r}")
        if n is None:
            raise ParseError("missing 'n <wires>' header")
        return cls(tuple(LaurentPoly(s) for s in zs), tuple(LaurentPoly(s) for s in xs))


def run(c: ShiftRegisterCircuit, stream: PauliStream, horizon: int) -> PauliStream:
    """Feed the stream from a reset state and collect outputs at cycles 0..horizon."""
    if stream.n != c.n:
        raise ValueError("stream width mismatch")
    if any(p and p.delay < 0 for p in stream.zs + stream.xs):
        raise ValueError("streams start at cycle 0")
    if horizon < stream.max_exp:
        raise ValueError("horizon must cover the input stream support")
    state = reset_state(c)
    out_z = [set() for _ in range(c.n)]
    out_x = [set() for _ in range(c.n)]
    for t in range(horizon + 1):
        _, frame = step(c, state, stream.frame(t))
        for w, (z, x) in enumerate(frame):
            if z:
                out_z[w].add(t)
            if x:
                out_x[w].add(t)
    return PauliStream(tuple(LaurentPoly(s) for s in out_z),
                       tuple(LaurentPoly(s) for s in out_x))


def _settle_margin(c: ShiftRegisterCircuit) -> int:
    cells = 0
    for sec in c.sections:
        if isinstance(sec, FiniteSection):
            cells += sum(sec.depths)
        else:
            cells += sec.m
    return 2 * cells + len(c.sections) + 2


def recommended_horizon(c: ShiftRegisterCircuit) -> int:
    """Safely past all finite-depth taps: 4 (M + max tap degree) + 8."""
    return 4 * (c.m + c.max_tap_degree) + 8


def impulse_response(c: ShiftRegisterCircuit, horizon: int):
    """Empirical transfer matrix from per-wire Z and X unit impulses.

    Returns (latency, matrix) where the observed absolute response equals
    matrix * D^latency, truncated at the horizon.  For finite-depth
    circuits a quiet settling window past the horizon is required;
    activity there raises ``horizon insufficient``.
    """
    n = c.n
    extra = 0 if c.has_feedback else _settle_margin(c)
    rows = []
    for kind in ("Z", "X"):
        for wire in range(1, n + 1):
            stream = PauliStream.impulse(n, wire, kind)
            state = reset_state(c)
            out_z = [set() for _ in range(n)]
            out_x = [set() for _ in range(n)]
            for t in range(horizon + extra + 1):
                _, frame = step(c, state, stream.frame(t))
                if t > horizon:
                    if any(z or x for z, x in frame):
                        raise ValueError(
                            f"horizon insufficient: output active at cycle {t}")
                    continue
                for w, (z, x) in enumerate(frame):
                    if z:
                        out_z[w].add(t)
                    if x:
                        out_x[w].add(t)
            rows.append([LaurentPoly(s) for s in out_z] +
                        [LaurentPoly(s) for s in out_x])
    absolute = SympMatrix(n, rows)
    lat = absolute.min_delay() if c.has_feedback else absolute.latency_shift()
    return lat, absolute.shifted(-lat)


def symplectic_product(a: PauliStream, b: PauliStream) -> int:
    """0 if the two Pauli operator streams commute, 1 if they anticommute."""
    if a.n != b.n:
        raise ValueError("stream width mismatch")
    acc = 0
    for w in range(a.n):
        acc ^= len(a.zs[w].support & b.xs[w].support) & 1
        acc ^= len(a.xs[w].support & b.zs[w].support) & 1
    return acc
