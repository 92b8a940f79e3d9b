"""Cycle-approximate model of the accelerator memory system.

Two bank groups of 4*B single-port banks hold one polynomial each; the
transform address streams from ``ntt`` are replayed against the bank model
to check that the reorder discipline really is conflict-free and to count
cycles.  Physical address a lives in bank a % banks at depth a // banks.

Microarchitectural constants the hardware would fix are exposed as config
fields (multiplier pipeline depth, stage drain, read latency) rather than
hard-coded: absolute cycle counts therefore reflect this calibration, which
``calibration_report`` discloses, and are not claimed to match any
particular silicon.

Per-cycle port capability by model: ``1rw`` one access total, ``1r1w`` one
read plus one write, ``2r2w`` two of each.  Butterfly outputs pass through
the reorder unit (RU): 4*B outputs accumulate, then the completed group
drains toward the banks, each bank fronted by a one-word write buffer.
``conflict_count`` tallies same-cycle accesses beyond a bank's ports;
``stall_count`` tallies cycles lost to them or to RU back-pressure.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace

from .ntt import NttPlan


class ConfigMismatch(Exception):
    """Simulator config inconsistent with the transform plan."""


class ScheduleViolation(Exception):
    """A pipeline op touched a bank group in the wrong occupancy state."""


PORT_MODELS = ("1rw", "1r1w", "2r2w")


@dataclass(frozen=True)
class BankConfig:
    n: int
    b: int = 1
    word_bits: int = 30
    port_model: str = "1rw"
    write_buffer_depth: int = 1
    mult_pipeline_depth: int = 3
    read_latency: int = 1
    drain_cycles: int | None = None
    io_words_per_cycle: int = 1
    uniform_samplers: int | None = None  # defaults to 4*b, per-BFU scaling
    binomial_samplers: int = 1

    def __post_init__(self) -> None:
        if self.port_model not in PORT_MODELS:
            raise ValueError(f"port_model must be one of {PORT_MODELS}")

    @property
    def banks_per_group(self) -> int:
        return 4 * self.b

    @property
    def bank_depth(self) -> int:
        return self.n // self.banks_per_group

    @property
    def stage_drain(self) -> int:
        return self.mult_pipeline_depth if self.drain_cycles is None else self.drain_cycles

    @property
    def bfu_latency(self) -> int:
        return self.read_latency + self.mult_pipeline_depth


@dataclass
class BankTrace:
    total_cycles: int = 0
    conflict_count: int = 0
    stall_count: int = 0
    peak_wb_occupancy: int = 0
    peak_write_backlog: int = 0
    butterfly_count: int = 0
    stage_issue_cycles: list[int] = field(default_factory=list)
    stage_butterflies: list[int] = field(default_factory=list)
    peak_resident_polys: int = 0
    events: list[tuple] | None = None

    def summary(self) -> dict:
        return {
            "total_cycles": self.total_cycles,
            "conflicts": self.conflict_count,
            "stalls": self.stall_count,
            "peak_wb_occupancy": self.peak_wb_occupancy,
            "peak_resident_polys": self.peak_resident_polys,
        }


def _port_caps(model: str) -> tuple[int, int, bool]:
    # (reads per cycle, writes per cycle, shared port)
    if model == "1rw":
        return 1, 1, True
    if model == "1r1w":
        return 1, 1, False
    return 2, 2, False


def _naive_stream(n: int):
    """In-place transform address stream without any output reordering."""
    logn = n.bit_length() - 1
    stages = []
    for s in range(logn):
        m = 1 << (s + 1)
        half = m >> 1
        sched = []
        for j in range(half):
            for blk in range(n // m):
                i1 = blk * m + j
                sched.append((i1, i1 + half, i1, i1 + half))
        stages.append(sched)
    return stages


def _reordered_stream(plan: NttPlan):
    stages, _ = plan.schedule
    return [[(rp, rp + 1, w1, w2) for (rp, w1, w2) in st] for st in stages]


def _run_stage(stream, banks: int, cfg: BankConfig, trace: BankTrace,
               start_cycle: int, grouped: bool, group: int) -> int:
    """Replay one stage's butterflies; returns the cycle after full drain."""
    reads_cap, writes_cap, shared = _port_caps(cfg.port_model)
    b = cfg.b
    lat = cfg.bfu_latency
    n_bf = len(stream)
    record = trace.events is not None

    idx = 0
    # double-buffered RU: one half accumulates outputs while the closed
    # group waits for its last output and drains toward the banks
    acc: list[tuple[int, int]] = []
    acc_ready = 0
    closed: tuple[list[tuple[int, int]], int] | None = None
    ru_pending: list[deque] = [deque() for _ in range(banks)]
    ru_outstanding = 0
    buffers: list[deque] = [deque() for _ in range(banks)]
    direct: list[tuple[int, int, int]] = []   # ungrouped writes (ready, w1, w2)
    cycle = start_cycle
    issue_cycles = 0

    def backlog(bank: int) -> int:
        return len(ru_pending[bank]) + len(buffers[bank])

    while (idx < n_bf or acc or closed is not None or ru_outstanding or direct
           or any(buffers[i] for i in range(banks))):
        read_use = [0] * banks

        # release the closed RU group once its last output has arrived and
        # the previous group's writes have all reached the banks
        if closed is not None and cycle >= closed[1] and ru_outstanding == 0:
            writes, _ = closed
            for addr in [w for (w, _) in writes] + [w for (_, w) in writes]:
                ru_pending[addr % banks].append(addr)
            ru_outstanding = 2 * len(writes)
            closed = None

        # ungrouped (no-RU) writes land straight in the bank buffers
        if not grouped:
            still = []
            for item in direct:
                if item[0] <= cycle:
                    for addr in item[1:]:
                        bk = addr % banks
                        buffers[bk].append(addr)
                        if len(buffers[bk]) > cfg.write_buffer_depth:
                            trace.conflict_count += 1
                else:
                    still.append(item)
            direct = still

        # RU feeds each empty write buffer one word
        for bk in range(banks):
            if ru_pending[bk] and not buffers[bk]:
                buffers[bk].append(ru_pending[bk].popleft())

        # issue up to B butterflies, reads have priority on the ports
        issued = 0
        stalled = False
        while idx < n_bf and issued < b and not stalled:
            if grouped and len(acc) >= group and closed is not None:
                # both RU halves full: back-pressure on issue
                trace.stall_count += 1
                break
            if grouped and len(acc) >= group:
                closed = (acc, acc_ready)
                acc = []
            r1, r2, w1, w2 = stream[idx]
            b1, b2 = r1 % banks, r2 % banks
            if b1 == b2 and reads_cap == 1:
                trace.conflict_count += 1
                trace.stall_count += 1
                # serialize the two reads over this and the next cycle
                if read_use[b1] >= reads_cap:
                    break
                read_use[b1] += reads_cap + 1  # saturate: nothing else this cycle
                stalled = True
            else:
                if read_use[b1] >= reads_cap or read_use[b2] >= reads_cap:
                    trace.conflict_count += 1
                    trace.stall_count += 1
                    break
                read_use[b1] += 1
                read_use[b2] += 1
            if record:
                trace.events.append((cycle, b1, "read", r1, f"bfu_{issued}"))
                trace.events.append((cycle, b2, "read", r2, f"bfu_{issued}"))
            if grouped:
                acc.append((w1, w2))
                acc_ready = cycle + lat
            else:
                direct.append((cycle + lat, w1, w2))
            idx += 1
            issued += 1
        if issued:
            issue_cycles += 1

        # close a full accumulating half even when no issue happened
        if grouped and len(acc) == group and closed is None:
            closed = (acc, acc_ready)
            acc = []

        # write phase
        for bk in range(banks):
            if not buffers[bk]:
                continue
            cap = writes_cap
            if shared and read_use[bk] > 0:
                continue  # single port busy with a read; buffered word waits
            while cap > 0 and buffers[bk]:
                addr = buffers[bk].popleft()
                if ru_outstanding:
                    ru_outstanding -= 1
                if record:
                    trace.events.append((cycle, bk, "write", addr, "write_buffer"))
                cap -= 1

        occ = max(len(buffers[bk]) for bk in range(banks))
        trace.peak_wb_occupancy = max(trace.peak_wb_occupancy, occ)
        trace.peak_write_backlog = max(
            trace.peak_write_backlog, max(backlog(bk) for bk in range(banks))
        )
        cycle += 1

    trace.stage_issue_cycles.append(issue_cycles)
    trace.stage_butterflies.append(n_bf)
    trace.butterfly_count += n_bf
    return cycle


def simulate_ntt(plan: NttPlan, cfg: BankConfig, reorder: bool = True,
                 store_trace: bool = False) -> BankTrace:
    """Replay the transform's address stream against the bank model.

    ``reorder=False`` replays the unreordered in-place stream instead, which
    is the comparison case the reorder discipline exists to fix.
    """
    if cfg.n != plan.n:
        raise ConfigMismatch(f"config n={cfg.n} != plan n={plan.n}")
    if cfg.b != plan.bfus:
        raise ConfigMismatch(f"config b={cfg.b} != plan bfus={plan.bfus}")
    trace = BankTrace(events=[] if store_trace else None)
    if reorder:
        stages = _reordered_stream(plan)
        group = plan.group
        grouped = True
    else:
        stages = _naive_stream(plan.n)
        group = 0
        grouped = False
    banks = cfg.banks_per_group
    cycle = 0
    for st in stages:
        cycle = _run_stage(st, banks, cfg, trace, cycle, grouped, group)
        cycle += cfg.stage_drain
    trace.total_cycles = cycle
    return trace


def ntt_cycle_estimate(n: int, cfg: BankConfig) -> int:
    """Closed-form cycle count for one conflict-free transform."""
    logn = n.bit_length() - 1
    per_stage = n // (2 * cfg.b) + cfg.bfu_latency + cfg.stage_drain
    return logn * per_stage


# ---------------------------------------------------------------------------
# datapath pipeline (bank-group occupancy) model


@dataclass(frozen=True)
class PipelineOp:
    kind: str                 # load | ntt | intt | mul | add | store
    bg: int | None = None     # target bank group for load/ntt/intt/store
    poly: str = ""


def _op_cycles(op: PipelineOp, cfg: BankConfig) -> int:
    n = cfg.n
    if op.kind in ("load", "store"):
        return n // cfg.io_words_per_cycle
    if op.kind in ("ntt", "intt"):
        return ntt_cycle_estimate(n, cfg)
    if op.kind in ("mul", "add"):
        return n // cfg.b + cfg.bfu_latency
    raise ValueError(f"unknown op kind {op.kind}")


def simulate_pipeline(op_sequence, cfg: BankConfig,
                      store_trace: bool = False) -> BankTrace:
    """Run a datapath schedule through the two-bank-group occupancy model.

    ``op_sequence`` is a list of steps; each step is a list of PipelineOps
    that execute in parallel (e.g. an in-place transform on BG0 while the
    next polynomial streams into BG1).  mul/add read BG0 and BG1, write
    BG1, and free BG0.  Raises ScheduleViolation when an op touches a bank
    group whose occupancy state does not match.
    """
    trace = BankTrace(events=[] if store_trace else None)
    occupant: list[str | None] = [None, None]
    cycle = 0
    peak = 0
    for step in op_sequence:
        for op in step:
            if op.kind == "load":
                if occupant[op.bg] is not None:
                    raise ScheduleViolation(
                        f"load {op.poly!r} into occupied BG{op.bg} "
                        f"(holds {occupant[op.bg]!r})")
                occupant[op.bg] = op.poly
            elif op.kind in ("ntt", "intt"):
                if occupant[op.bg] is None:
                    raise ScheduleViolation(f"{op.kind} on empty BG{op.bg}")
            elif op.kind in ("mul", "add"):
                if occupant[0] is None or occupant[1] is None:
                    raise ScheduleViolation(f"{op.kind} needs both bank groups")
            elif op.kind == "store":
                if occupant[op.bg] is None:
                    raise ScheduleViolation(f"store from empty BG{op.bg}")
            else:
                raise ValueError(f"unknown op kind {op.kind}")
        peak = max(peak, sum(o is not None for o in occupant))
        step_cycles = max((_op_cycles(op, cfg) for op in step), default=0)
        if trace.events is not None:
            for op in step:
                trace.events.append((cycle, op.bg, op.kind, 0, op.poly))
        cycle += step_cycles
        # post-step occupancy effects
        for op in step:
            if op.kind in ("mul", "add"):
                occupant[1] = f"{op.kind}({occupant[0]},{occupant[1]})"
                occupant[0] = None
            elif op.kind == "store":
                occupant[op.bg] = None
    trace.total_cycles = cycle
    trace.peak_resident_polys = peak
    return trace


# ---------------------------------------------------------------------------
# port-model comparison


def compare_port_models(plan: NttPlan) -> dict:
    """Same transform stream under 2R2W, 1R1W+swap2, 1RW+swap2, 1RW+swap4.

    The area proxy weights total memory bits by port cost: 2.0 for 2R2W,
    1.0 for 1R1W, 0.5 for 1RW (a 2R2W bank is roughly twice a 1R1W bank of
    the same capacity, and 1RW halves that again).
    """
    n = plan.n
    base = BankConfig(n=n, b=plan.bfus)
    results = {}

    def run(label, banks, port, grouped, group, stages, wb_depth=1):
        cfg = replace(base, port_model=port, write_buffer_depth=wb_depth)
        trace = BankTrace()
        cycle = 0
        for st in stages:
            cycle = _run_stage(st, banks, cfg, trace, cycle, grouped, group)
            cycle += cfg.stage_drain
        trace.total_cycles = cycle
        results[label] = trace

    swap2_stages = [[(rp, rp + 1, w1, w2) for (rp, w1, w2) in st]
                    for st in _swap2_stream(n)]
    swap4_stages = _reordered_stream(plan)

    # 2R2W reference: one dual-ported bank, no reorder, two in-flight writes
    run("2r2w", 1, "2r2w", False, 0, _naive_stream(n), wb_depth=2)
    run("1r1w_swap2", 2, "1r1w", True, 2, swap2_stages)
    # same two-bank layout on a single shared port: reads starve the writes
    run("1rw_swap2", 2, "1rw", True, 2, swap2_stages)
    run("1rw_swap4", 4 * plan.bfus, "1rw", True, plan.group, swap4_stages)

    word = 30
    area = {
        "2r2w": 2.0 * n * word,
        "1r1w_swap2": 1.0 * n * word,
        "1rw_swap2": 0.5 * n * word,
        "1rw_swap4": 0.5 * n * word,
    }
    return {
        label: {
            "conflicts": t.conflict_count,
            "stalls": t.stall_count,
            "peak_wb_occupancy": t.peak_wb_occupancy,
            "peak_write_backlog": t.peak_write_backlog,
            "total_cycles": t.total_cycles,
            "relative_memory_area": area[label] / area["1r1w_swap2"],
        }
        for label, t in results.items()
    }


def _swap2_stream(n: int):
    from .ntt import _swap_schedule

    stages, _ = _swap_schedule(n, 2)
    return stages


def calibration_report(plan: NttPlan, cfg: BankConfig) -> dict:
    """Simulated cycle count next to the calibration constants that shape it."""
    trace = simulate_ntt(plan, cfg)
    return {
        "n": plan.n,
        "bfus": plan.bfus,
        "simulated_cycles": trace.total_cycles,
        "estimated_cycles": ntt_cycle_estimate(plan.n, cfg),
        "butterflies": trace.butterfly_count,
        "calibration": {
            "mult_pipeline_depth": cfg.mult_pipeline_depth,
            "read_latency": cfg.read_latency,
            "stage_drain": cfg.stage_drain,
        },
    }
