"""Bounded exploration of the reachable state space.

Exploration branches over which agent moves at each step.  With a scripted
environment whose updates land after step 0, reachability depends on time, so
nodes are (step, state) pairs; otherwise nodes are plain states and revisits
merge.  Each agent move fires all of the mover's applicable rules in parallel,
exactly as in execution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..core.eval import eval_formula
from ..core.state import State, apply_updates
from ..core.values import Atom, format_value
from ..lang.model import Model, PredicateDef
from .envscript import EnvScript
from .executor import agent_step, applicable_rules, initial_state

NodeKey = Union[State, tuple[int, State]]


@dataclass
class StateGraph:
    time_expanded: bool
    initial: NodeKey = None
    nodes: list[NodeKey] = field(default_factory=list)
    succ: dict[NodeKey, list[tuple[Optional[str], NodeKey]]] = field(default_factory=dict)
    quiescent: list[NodeKey] = field(default_factory=list)
    inconsistent: list[tuple[NodeKey, str]] = field(default_factory=list)  # (node, agent)
    truncated: bool = False
    depth_reached: int = 0

    def state_of(self, key: NodeKey) -> State:
        return key[1] if self.time_expanded else key

    def step_of(self, key: NodeKey) -> int:
        return key[0] if self.time_expanded else 0

    def states(self) -> Iterator[State]:
        for k in self.nodes:
            yield self.state_of(k)

    def successors(self, key: NodeKey) -> list[tuple[Optional[str], NodeKey]]:
        return self.succ.get(key, [])

    def __len__(self) -> int:
        return len(self.nodes)


def enumerate_interleavings(
    model: Model,
    *,
    depth: Optional[int] = None,
    env_script: Optional[EnvScript] = None,
    state_budget: int = 100_000,
) -> StateGraph:
    """Breadth-first exploration up to ``depth`` moves and ``state_budget`` nodes."""
    time_expanded = bool(env_script and env_script.time_varying)
    s0 = initial_state(model)
    if env_script:
        s0 = apply_updates(s0, env_script.updates_at(0))
    # past the last scripted batch the dynamics no longer depend on the step
    # count, so step indices saturate there and the graph stays finite
    horizon = env_script.max_step + 1 if time_expanded else 0
    key0: NodeKey = (0, s0) if time_expanded else s0
    graph = StateGraph(time_expanded=time_expanded, initial=key0)
    graph.nodes.append(key0)
    seen: set[NodeKey] = {key0}
    frontier: list[NodeKey] = [key0]
    layer = 0
    agents = model.agents()
    while frontier and (depth is None or layer < depth):
        next_frontier: list[NodeKey] = []
        for key in frontier:
            state = graph.state_of(key)
            step = graph.step_of(key)
            applicable = [a for a in agents if applicable_rules(state, model, a)]
            edges: list[tuple[Optional[str], NodeKey]] = []
            if not applicable:
                if time_expanded and env_script.has_updates_after(step):
                    child_state = apply_updates(state, env_script.updates_at(step + 1))
                    child: NodeKey = (min(step + 1, horizon), child_state)
                    edges.append((None, child))
                    if child not in seen:
                        if len(graph.nodes) >= state_budget:
                            graph.truncated = True
                        else:
                            seen.add(child)
                            graph.nodes.append(child)
                            next_frontier.append(child)
                else:
                    graph.quiescent.append(key)
                graph.succ[key] = edges
                continue
            for a in applicable:
                result = agent_step(state, model, a)
                if result.status == "inconsistent":
                    graph.inconsistent.append((key, a.name))
                    continue
                child_state = result.state
                if time_expanded:
                    child_state = apply_updates(child_state, env_script.updates_at(step + 1))
                    child = (min(step + 1, horizon), child_state)
                else:
                    child = child_state
                edges.append((a.name, child))
                if child not in seen:
                    if len(graph.nodes) >= state_budget:
                        graph.truncated = True
                        continue
                    seen.add(child)
                    graph.nodes.append(child)
                    next_frontier.append(child)
            graph.succ[key] = edges
        frontier = next_frontier
        layer += 1
        graph.depth_reached = layer
    if frontier and depth is not None and layer >= depth:
        # cut off by the depth bound with work left: the graph is partial
        graph.truncated = True
    return graph


def predicate_nodes(graph: StateGraph, model: Model, pred: PredicateDef, agent: Atom) -> list[NodeKey]:
    """Nodes whose state satisfies the predicate for this agent."""
    env = {pred.var: agent}
    return [k for k in graph.nodes if eval_formula(graph.state_of(k), model, env, pred.formula)]


def predicate_cycles(
    graph: StateGraph, model: Model, pred: PredicateDef, agent: Atom
) -> list[list[NodeKey]]:
    """Cycles (SCCs with a self-loop or more than one node) in the subgraph of
    states satisfying the predicate for this agent.  Time-expanded graphs only
    cycle past the script horizon, where step indices saturate."""
    members = set(predicate_nodes(graph, model, pred, agent))
    succ = {
        k: [dst for _, dst in graph.successors(k) if dst in members] for k in members
    }
    # iterative Tarjan
    index: dict[NodeKey, int] = {}
    low: dict[NodeKey, int] = {}
    on_stack: set[NodeKey] = set()
    stack: list[NodeKey] = []
    counter = [0]
    sccs: list[list[NodeKey]] = []

    for root in members:
        if root in index:
            continue
        work: list[tuple[NodeKey, int]] = [(root, 0)]
        while work:
            node, i = work.pop()
            if i == 0:
                index[node] = low[node] = counter[0]
                counter[0] += 1
                stack.append(node)
                on_stack.add(node)
            recurse = False
            children = succ[node]
            while i < len(children):
                child = children[i]
                i += 1
                if child not in index:
                    work.append((node, i))
                    work.append((child, 0))
                    recurse = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if recurse:
                continue
            if low[node] == index[node]:
                scc = []
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    scc.append(x)
                    if x == node:
                        break
                if len(scc) > 1 or node in succ[node]:
                    sccs.append(scc)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return sccs


@dataclass
class CoherenceCheck:
    """Result of running two agents in both orders from one state."""

    first: str
    second: str
    ab_state: Optional[State]  # after first then second; None if a move clashed
    ba_state: Optional[State]

    @property
    def order_independent(self) -> bool:
        return self.ab_state is not None and self.ba_state is not None and self.ab_state == self.ba_state


def check_coherence(model: Model, state: State, a: Atom, b: Atom) -> CoherenceCheck:
    def both(first: Atom, second: Atom) -> Optional[State]:
        r1 = agent_step(state, model, first)
        if r1.status == "inconsistent":
            return None
        r2 = agent_step(r1.state, model, second)
        if r2.status == "inconsistent":
            return None
        return r2.state

    return CoherenceCheck(a.name, b.name, both(a, b), both(b, a))


def agents_independent(model: Model, state: State, a: Atom, b: Atom) -> bool:
    """True when the two agents' moves commute trivially here: write sets are
    disjoint and neither move changes what the other would do."""

    def canon(agent: Atom, at: State) -> frozenset:
        r = agent_step(at, model, agent)
        if r.status != "moved":
            return frozenset()
        return frozenset((repr(loc), format_value(v)) for loc, v in r.updates)

    ua, ub = canon(a, state), canon(b, state)
    writes_a = {pair[0] for pair in ua}
    writes_b = {pair[0] for pair in ub}
    if writes_a & writes_b:
        return False
    ra = agent_step(state, model, a)
    rb = agent_step(state, model, b)
    if ra.status == "inconsistent" or rb.status == "inconsistent":
        return False
    return canon(b, ra.state) == ub and canon(a, rb.state) == ua


def coherence_scan(
    model: Model,
    graph: StateGraph,
    *,
    max_states: Optional[int] = None,
) -> list[tuple[NodeKey, CoherenceCheck]]:
    """Check every agent pair at reachable states; returns the order-dependent cases."""
    agents = model.agents()
    findings: list[tuple[NodeKey, CoherenceCheck]] = []
    nodes = graph.nodes if max_states is None else graph.nodes[:max_states]
    for key in nodes:
        state = graph.state_of(key)
        for i in range(len(agents)):
            for j in range(i + 1, len(agents)):
                check = check_coherence(model, state, agents[i], agents[j])
                if not check.order_independent:
                    findings.append((key, check))
    return findings
