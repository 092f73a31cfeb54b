"""Builders for the bundled example machines.

Each builder renders DSL source for a parameterized family and parses it, so
the returned model is exactly what a user would get from the matching .asm
file.  The files under data/ are generated from these builders; tests pin the
two against each other.
"""
from __future__ import annotations

from ..lang.model import Model
from ..lang.parser import parse_model

DP_VARIANTS = ("baseline", "bakery")
AODV_TOPOLOGIES = ("partitioned", "line")


def _parse(source: str, filename: str) -> Model:
    result = parse_model(source, filename)
    if not result.ok:
        msgs = "; ".join(d.format() for d in result.diagnostics)
        raise AssertionError(f"builder template failed to parse: {msgs}")
    return result.model


def dining_philosophers_source(n: int = 5, variant: str = "baseline") -> str:
    """DSL source for a ring of ``n`` philosophers sharing ``n`` forks.

    The baseline variant grabs both forks atomically whenever they are free.
    The bakery variant adds a clerk agent that rotates a turn token; a
    philosopher only reaches for forks while the token shows its turn.
    """
    if n < 2:
        raise ValueError("need at least 2 philosophers")
    if variant not in DP_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {DP_VARIANTS}")
    phils = [f"p{i}" for i in range(1, n + 1)]
    forks = [f"f{i}" for i in range(1, n + 1)]
    name = f"dining_philosophers_{n}" if variant == "baseline" else f"dining_philosophers_bakery_{n}"

    out: list[str] = []
    emit = out.append
    emit(f"dasm {name}")
    emit("")
    emit(f"domain philosophers = {{ {', '.join(phils)} }}")
    emit(f"domain forks = {{ {', '.join(forks)} }}")
    if variant == "bakery":
        emit("domain coordinators = { clerk1 }")
    emit("")
    emit("function rightFork : philosophers -> forks static")
    emit("function leftFork : philosophers -> forks static")
    emit("function owner : forks -> philosophers shared")
    if variant == "bakery":
        emit("function next : philosophers -> philosophers static")
        emit("function granted : -> philosophers controlled")
        emit("function isMyTurn : philosophers -> bool shared")
    emit("")
    emit("init {")
    for i, p in enumerate(phils):
        emit(f"    rightFork({p}) := {forks[i]}")
    for i, p in enumerate(phils):
        # the left fork is shared with the counter-clockwise neighbour
        emit(f"    leftFork({p}) := {forks[i - 1]}")
    if variant == "bakery":
        for i, p in enumerate(phils):
            emit(f"    next({p}) := {phils[(i + 1) % n]}")
        emit("    granted() := p1")
        emit("    isMyTurn(p1) := true")
        for p in phils[1:]:
            emit(f"    isMyTurn({p}) := false")
    emit("}")
    emit("")
    emit("rule Philosopher() =")
    emit("{")
    turn = "isMyTurn(self) and " if variant == "bakery" else ""
    emit(
        f"    takeForks: if {turn}owner(rightFork(self)) = undef"
        " and owner(leftFork(self)) = undef then {"
    )
    emit("        owner(rightFork(self)) := self")
    emit("        owner(leftFork(self)) := self")
    emit("    }")
    emit("    releaseForks: if owner(rightFork(self)) = self and owner(leftFork(self)) = self then {")
    emit("        owner(rightFork(self)) := undef")
    emit("        owner(leftFork(self)) := undef")
    emit("    }")
    emit("}")
    emit("")
    if variant == "bakery":
        emit("rule Clerk() =")
        emit("{")
        emit("    advanceTurn: if granted() != undef then {")
        emit("        isMyTurn(granted()) := false")
        emit("        isMyTurn(next(granted())) := true")
        emit("        granted() := next(granted())")
        emit("    }")
        emit("}")
        emit("")
    emit("agent p in philosophers runs Philosopher()")
    if variant == "bakery":
        emit("agent c in coordinators runs Clerk()")
    emit("")
    emit(
        "predicate eating for p in philosophers :="
        " owner(rightFork(p)) = p and owner(leftFork(p)) = p"
    )
    emit(
        "predicate thinking for p in philosophers :="
        " not (owner(rightFork(p)) = p and owner(leftFork(p)) = p)"
    )
    emit("")
    return "\n".join(out)


def build_dining_philosophers(n: int = 5, variant: str = "baseline") -> Model:
    return _parse(dining_philosophers_source(n, variant), f"<dining_philosophers:{n}:{variant}>")


def aodv_source(
    hosts: int = 2,
    topology: str = "partitioned",
    with_timeout: bool = False,
    timeout_init: int = 5,
) -> str:
    """DSL source for route discovery among ``hosts`` hosts.

    Host h1 wants a route to the last host and floods a request when no route
    is known.  Replies arrive from the environment.  Without a timeout the
    initiator waits on replies indefinitely; with one it abandons the request
    after ``timeout_init`` polls.
    """
    if hosts < 2:
        raise ValueError("need at least 2 hosts")
    if topology not in AODV_TOPOLOGIES:
        raise ValueError(f"unknown topology {topology!r}, expected one of {AODV_TOPOLOGIES}")
    if with_timeout and timeout_init < 1:
        raise ValueError("timeout_init must be at least 1")
    names = [f"h{i}" for i in range(1, hosts + 1)]
    suffix = "timeout" if with_timeout else "no_timeout"
    name = f"aodv_{hosts}_{suffix}"

    out: list[str] = []
    emit = out.append
    emit(f"dasm {name}")
    if with_timeout:
        emit("# The request timeout is re-armed whenever a new discovery starts;")
        emit("# without the reset a second attempt would inherit a stale counter.")
        emit("# The counter may pass -1 on the move that also clears waiting; it is")
        emit("# never clamped.")
    emit("")
    emit(f"domain hosts = {{ {', '.join(names)} }}")
    emit("")
    emit("function target : hosts -> hosts static")
    emit("function neighb : hosts -> seq monitored")
    emit("function wishToInitiate : hosts -> bool shared")
    emit("function waiting : hosts -> bool controlled")
    if with_timeout:
        emit("function timeout : hosts -> int controlled")
    emit("function replies : hosts -> seq shared")
    emit("function routingTable : hosts -> seq controlled")
    emit("function requests : hosts -> hosts out")
    emit("")
    emit("init {")
    for h in names[:-1]:
        emit(f"    target({h}) := {names[-1]}")
    emit(f"    target({names[-1]}) := {names[0]}")
    for i, h in enumerate(names):
        if topology == "partitioned":
            emit(f"    neighb({h}) := []")
        else:
            around = [names[j] for j in (i - 1, i + 1) if 0 <= j < hosts]
            emit(f"    neighb({h}) := [{', '.join(around)}]")
    emit(f"    wishToInitiate({names[0]}) := true")
    for h in names[1:]:
        emit(f"    wishToInitiate({h}) := false")
    for h in names:
        emit(f"    waiting({h}) := false")
    if with_timeout:
        for h in names:
            emit(f"    timeout({h}) := 0")
    for h in names:
        emit(f"    replies({h}) := []")
    for h in names:
        emit(f"    routingTable({h}) := []")
    emit("}")
    emit("")
    emit("rule CommunicationSession(d) = skip")
    emit("")
    emit("rule BroadcastRequest(d) =")
    emit("    forall n in hosts do")
    emit("        if n in neighb(self) then")
    emit("            requests(n) := d")
    emit("")
    emit("rule Initiator(dest) =")
    emit("{")
    emit(
        "    startSession: if wishToInitiate(self)"
        " and (dest in routingTable(self) or dest in neighb(self)) then {"
    )
    emit("        CommunicationSession(dest)")
    emit("        wishToInitiate(self) := false")
    emit("    }")
    emit(
        "    sendRequest: if wishToInitiate(self) and waiting(self) = false"
        " and not dest in neighb(self) and not dest in routingTable(self) then {"
    )
    emit("        BroadcastRequest(dest)")
    emit("        waiting(self) := true")
    if with_timeout:
        emit(f"        timeout(self) := {timeout_init}")
    emit("    }")
    emit("    awaitReply: if waiting(self) then {")
    if with_timeout:
        emit("        timeout(self) := timeout(self) - 1")
    emit("        if replies(self) != [] then {")
    emit("            choose r in replies(self) max r do {")
    emit("                routingTable(self) := append(routingTable(self), dest)")
    emit("                CommunicationSession(dest)")
    emit("                wishToInitiate(self) := false")
    emit("                waiting(self) := false")
    emit("                replies(self) := []")
    emit("            }")
    emit("        }")
    emit("    }")
    if with_timeout:
        emit("    expireRequest: if waiting(self) and timeout(self) = 0 then {")
        emit("        wishToInitiate(self) := false")
        emit("        waiting(self) := false")
        emit("    }")
    emit("}")
    emit("")
    emit("agent h in hosts runs Initiator(target(h))")
    emit("")
    emit("predicate waiting for h in hosts := waiting(h)")
    if with_timeout:
        emit("")
        emit("ranking timeout(h) for waiting")
    emit("")
    return "\n".join(out)


def build_aodv(
    hosts: int = 2,
    topology: str = "partitioned",
    with_timeout: bool = False,
    timeout_init: int = 5,
) -> Model:
    suffix = "timeout" if with_timeout else "no_timeout"
    return _parse(
        aodv_source(hosts, topology, with_timeout, timeout_init),
        f"<aodv:{hosts}:{topology}:{suffix}>",
    )
