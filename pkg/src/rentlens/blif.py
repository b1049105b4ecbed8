"""Flat BLIF reader and writer.

Supported: ``.model .inputs .outputs .names .latch .subckt .end``, ``#``
comments and ``\\`` line continuation.  Models after the first are accepted
only as ``.blackbox`` declarations; they supply port directions for
``.subckt`` instances.  Cover rows of ``.names`` are kept verbatim and never
interpreted.
"""

from __future__ import annotations

import io

from .errors import BlifSyntaxError
from .netlist import BlockKind, Netlist, NetlistBuilder

LATCH_TYPES = {"fe", "re", "ah", "al", "as"}


def _logical_lines(text: str):
    """Yield ``(line_no, column, tokens, raw)`` after joining continuations.

    ``line_no`` is the physical line the statement starts on.
    """
    buf = ""
    start = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if start is None:
            start = no
        if line.rstrip().endswith("\\"):
            buf += line.rstrip()[:-1] + " "
            continue
        buf += line
        if buf.strip():
            col = len(buf) - len(buf.lstrip()) + 1
            yield start, col, buf.split(), buf.strip()
        buf = ""
        start = None
    if buf.strip():
        yield start, 1, buf.split(), buf.strip()


class _Model:
    def __init__(self, name, line):
        self.name = name
        self.line = line
        self.inputs: list[str] = []
        self.outputs: list[str] = []
        self.names: list[tuple[list[str], list[str], int]] = []  # (nets, cover rows, line)
        self.latches: list[tuple[list[str], int]] = []
        self.subckts: list[tuple[str, list[tuple[str, str]], int]] = []
        self.blackbox = False
        self.ended = False


def _read_models(text: str) -> list[_Model]:
    models: list[_Model] = []
    cur: _Model | None = None
    cover: list[str] | None = None
    last_line = 0
    for no, col, toks, raw in _logical_lines(text):
        last_line = no
        head = toks[0]
        if not head.startswith("."):
            if cover is None:
                raise BlifSyntaxError(f"unexpected text {raw[:40]!r} outside a .names cover", no, col)
            cover.append(" ".join(toks))
            continue
        cover = None
        if head == ".model":
            if cur is not None and not cur.ended:
                raise BlifSyntaxError(".model inside an unterminated model", no, col)
            cur = _Model(toks[1] if len(toks) > 1 else "top", no)
            models.append(cur)
            continue
        if cur is None or cur.ended:
            raise BlifSyntaxError(f"{head} outside of a .model", no, col)
        if head == ".inputs":
            cur.inputs.extend(toks[1:])
        elif head == ".outputs":
            cur.outputs.extend(toks[1:])
        elif head == ".names":
            if len(toks) < 2:
                raise BlifSyntaxError(".names needs at least an output net", no, col)
            cover = []
            cur.names.append((toks[1:], cover, no))
        elif head == ".latch":
            if len(toks) not in (3, 4, 5, 6):
                raise BlifSyntaxError(".latch expects input output [type control] [init]", no, col)
            if len(toks) >= 5 and toks[3] not in LATCH_TYPES:
                raise BlifSyntaxError(f"unknown latch type {toks[3]!r}", no, col)
            cur.latches.append((toks[1:], no))
        elif head == ".subckt":
            if len(toks) < 2:
                raise BlifSyntaxError(".subckt needs a model name", no, col)
            conns = []
            for tok in toks[2:]:
                formal, eq, actual = tok.partition("=")
                if not eq or not formal or not actual:
                    raise BlifSyntaxError(f"bad .subckt connection {tok!r}", no, col)
                conns.append((formal, actual))
            cur.subckts.append((toks[1], conns, no))
        elif head == ".blackbox":
            cur.blackbox = True
        elif head == ".end":
            cur.ended = True
        else:
            raise BlifSyntaxError(f"unsupported directive {head}", no, col)
    if not models:
        raise BlifSyntaxError("no .model found", max(last_line, 1))
    if not models[-1].ended:
        raise BlifSyntaxError("missing .end", max(last_line, 1))
    for extra in models[1:]:
        if not extra.blackbox:
            raise BlifSyntaxError(f"second model {extra.name!r} is not a .blackbox declaration", extra.line)
    return models


def parse_blif(data) -> Netlist:
    """Parse BLIF text or bytes into a :class:`Netlist`.

    Block naming follows VPR: primary inputs and logic blocks are named
    after the net they drive, primary outputs get an ``out:`` prefix.
    Nets controlling latch clocks are flagged global.
    """
    if isinstance(data, (bytes, bytearray, memoryview)):
        try:
            text = bytes(data).decode("utf-8")
        except UnicodeDecodeError as exc:
            line = bytes(data)[: exc.start].count(b"\n") + 1
            raise BlifSyntaxError("input is not valid UTF-8", line) from None
    else:
        text = data
    if "\x00" in text:
        line = text[: text.index("\x00")].count("\n") + 1
        raise BlifSyntaxError("NUL byte in input", line)

    models = _read_models(text)
    top = models[0]
    decls = {m.name: m for m in models[1:]}
    b = NetlistBuilder(top.name)

    for name in top.inputs:
        blk = b.add_block(name, BlockKind.PRIMARY_INPUT)
        b.drive(name, blk, "inpad", top.line)
    for nets, cover, no in top.names:
        *ins, out = nets
        blk = b.add_block(out, BlockKind.LUT, cover)
        b.drive(out, blk, "out", no)
        for i, net in enumerate(ins):
            b.sink(net, blk, f"in{i}")
    for toks, no in top.latches:
        d, q = toks[0], toks[1]
        if len(toks) >= 4:
            ltype, ctrl = toks[2], toks[3]
            init = toks[4] if len(toks) == 5 else "3"
        else:
            ltype, ctrl = "", ""
            init = toks[2] if len(toks) == 3 else "3"
        blk = b.add_block(q, BlockKind.LATCH, (ltype, ctrl, init))
        b.drive(q, blk, "Q", no)
        b.sink(d, blk, "D")
        if ctrl and ctrl != "NIL":
            b.sink(ctrl, blk, "clk")
            b.mark_global(ctrl)

    # Subckt directions: from a .blackbox declaration when present, else any
    # actual net nobody else drives is taken as an output of the instance.
    pending = []
    for idx, (model, conns, no) in enumerate(top.subckts):
        decl = decls.get(model)
        name = next((a for f, a in conns if decl is not None and f in decl.outputs), None)
        blk = b.add_block(name or f"{model}#{idx}", BlockKind.BLACKBOX, (model,))
        pending.append((blk, decl, conns, no))
    for blk, decl, conns, no in pending:
        if decl is not None:
            for formal, actual in conns:
                if formal in decl.outputs:
                    b.drive(actual, blk, formal, no)
                else:
                    b.sink(actual, blk, formal)
    for blk, decl, conns, no in pending:
        if decl is None:
            for formal, actual in conns:
                if not b.has_driver(actual):
                    b.drive(actual, blk, formal, no)
                else:
                    b.sink(actual, blk, formal)

    for name in top.outputs:
        blk = b.add_block("out:" + name, BlockKind.PRIMARY_OUTPUT)
        b.sink(name, blk, "outpad")
    return b.build()


def write_blif(netlist: Netlist) -> bytes:
    """Serialize a netlist as flat BLIF (UTF-8 bytes)."""
    out = io.StringIO()
    nets = netlist.nets
    out.write(f".model {netlist.name}\n")
    ins = [b for b in netlist.blocks if b.kind is BlockKind.PRIMARY_INPUT]
    outs = [b for b in netlist.blocks if b.kind is BlockKind.PRIMARY_OUTPUT]
    if ins:
        names = [nets[netlist.block_pins[b.id][0][1]].name for b in ins]
        out.write(".inputs " + " ".join(names) + "\n")
    if outs:
        names = [nets[netlist.block_pins[b.id][0][1]].name for b in outs]
        out.write(".outputs " + " ".join(names) + "\n")
    subckt_models = {}
    for blk in netlist.blocks:
        pins = netlist.block_pins[blk.id]
        if blk.kind is BlockKind.LUT:
            drv = [nets[n].name for p, n, d in pins if d]
            sinks = [nets[n].name for p, n, d in pins if not d]
            out.write(".names " + " ".join(sinks + drv) + "\n")
            for row in blk.attrs:
                out.write(row + "\n")
        elif blk.kind is BlockKind.LATCH:
            d = next(nets[n].name for p, n, drv in pins if p == "D")
            q = next(nets[n].name for p, n, drv in pins if drv)
            ltype, ctrl, init = (blk.attrs + ("", "", "3"))[:3] if blk.attrs else ("", "", "3")
            if ltype:
                out.write(f".latch {d} {q} {ltype} {ctrl} {init}\n")
            else:
                out.write(f".latch {d} {q} {init}\n")
        elif blk.kind is BlockKind.BLACKBOX:
            model = blk.attrs[0] if blk.attrs else "blackbox"
            conns = " ".join(f"{p}={nets[n].name}" for p, n, d in pins)
            out.write(f".subckt {model} {conns}\n")
            decl = subckt_models.setdefault(model, ([], []))
            for p, n, d in pins:
                lst = decl[1] if d else decl[0]
                if p not in lst:
                    lst.append(p)
    out.write(".end\n")
    for model, (mins, mouts) in subckt_models.items():
        out.write(f"\n.model {model}\n")
        if mins:
            out.write(".inputs " + " ".join(mins) + "\n")
        if mouts:
            out.write(".outputs " + " ".join(mouts) + "\n")
        out.write(".blackbox\n.end\n")
    return out.getvalue().encode("utf-8")
