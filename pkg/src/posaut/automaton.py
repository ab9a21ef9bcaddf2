"""Core data model for transition-based parity automata over infinite words.

States are dense integers 0..n-1.  Acceptance is min-even parity on the
transitions: a run is accepting iff the minimal priority produced infinitely
often is even.  The reserved letter token ``eps`` marks epsilon transitions;
it never belongs to the declared alphabet.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
import re

EPS = "eps"

_TOKEN_RE = re.compile(r"^[a-zA-Z0-9_]+$")


class FormatError(ValueError):
    """Raised on malformed text-format input; carries line information."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Transition:
    src: int
    letter: str
    priority: int
    dst: int

    @property
    def is_eps(self):
        return self.letter == EPS

    def __repr__(self):
        return f"{self.src}-{self.letter}:{self.priority}->{self.dst}"


@dataclass(frozen=True)
class ParityAutomaton:
    """A (possibly nondeterministic, possibly epsilon-carrying) parity automaton.

    Immutable.  `deterministic` is a declared flag, checked by `validate`;
    it asserts exactly one a-transition per (state, letter) and no epsilon
    transitions.  `origin` optionally maps each state back to labels of the
    automaton it was derived from, for debugging output.
    """

    n_states: int
    alphabet: tuple[str, ...]
    initial: int
    transitions: tuple[Transition, ...]
    priority_range: tuple[int, int]
    deterministic: bool = False
    origin: tuple[str, ...] | None = None

    # -- derived lookups ---------------------------------------------------

    @cached_property
    def by_src(self) -> tuple[tuple[Transition, ...], ...]:
        out = [[] for _ in range(self.n_states)]
        for t in self.transitions:
            out[t.src].append(t)
        return tuple(tuple(ts) for ts in out)

    @cached_property
    def by_src_letter(self) -> dict[tuple[int, str], tuple[Transition, ...]]:
        out: dict[tuple[int, str], list[Transition]] = {}
        for t in self.transitions:
            out.setdefault((t.src, t.letter), []).append(t)
        return {k: tuple(v) for k, v in out.items()}

    def succ(self, q: int, letter: str) -> tuple[Transition, ...]:
        return self.by_src_letter.get((q, letter), ())

    def dsucc(self, q: int, letter: str) -> Transition:
        """The unique letter-transition from q (deterministic automata)."""
        ts = self.succ(q, letter)
        if len(ts) != 1:
            raise ValueError(f"state {q} has {len(ts)} transitions on {letter!r}")
        return ts[0]

    @property
    def d_min(self):
        return self.priority_range[0]

    @property
    def d_max(self):
        return self.priority_range[1]

    @cached_property
    def has_eps(self):
        return any(t.is_eps for t in self.transitions)

    @cached_property
    def priorities_used(self) -> tuple[int, ...]:
        return tuple(sorted({t.priority for t in self.transitions}))

    def states(self):
        return range(self.n_states)

    def origin_label(self, q: int) -> str:
        if self.origin is None:
            return str(q)
        return self.origin[q]

    # -- validation --------------------------------------------------------

    def validate(self) -> list[str]:
        """Structural diagnostics; an empty list means the automaton is well formed.

        Unreachable states are reported as warnings (prefix ``warning:``),
        everything else is a violation.
        """
        issues = []
        if self.n_states <= 0:
            issues.append("automaton must have at least one state")
            return issues
        if not (0 <= self.initial < self.n_states):
            issues.append(f"initial state {self.initial} out of range")
        seen_alpha = set()
        for a in self.alphabet:
            if not _TOKEN_RE.match(a):
                issues.append(f"bad letter token {a!r}")
            if a == EPS:
                issues.append("reserved token 'eps' occurs in the alphabet")
            if a in seen_alpha:
                issues.append(f"duplicate letter {a!r} in alphabet")
            seen_alpha.add(a)
        dmin, dmax = self.priority_range
        if dmin > dmax:
            issues.append(f"empty priority range [{dmin}, {dmax}]")
        for t in self.transitions:
            if not (0 <= t.src < self.n_states and 0 <= t.dst < self.n_states):
                issues.append(f"transition {t} references an unknown state")
            if t.letter != EPS and t.letter not in seen_alpha:
                issues.append(f"transition {t} uses undeclared letter {t.letter!r}")
            if not (dmin <= t.priority <= dmax):
                issues.append(f"transition {t} priority outside [{dmin}, {dmax}]")
        # completeness over the declared alphabet (eps never counts)
        for q in self.states():
            for a in self.alphabet:
                if not self.succ(q, a):
                    issues.append(f"state {q} missing {a}-transition")
        if self.deterministic:
            for q in self.states():
                for a in self.alphabet:
                    if len(self.succ(q, a)) > 1:
                        issues.append(
                            f"declared deterministic but state {q} has "
                            f"{len(self.succ(q, a))} transitions on {a!r}"
                        )
                if self.succ(q, EPS):
                    issues.append(
                        f"declared deterministic but state {q} has eps-transitions"
                    )
        unreachable = set(self.states()) - set(self.reachable())
        for q in sorted(unreachable):
            issues.append(f"warning: state {q} unreachable from initial")
        return issues

    def check_valid(self):
        problems = [m for m in self.validate() if not m.startswith("warning:")]
        if problems:
            raise ValueError("invalid automaton: " + "; ".join(problems))

    # -- reachability / trimming -------------------------------------------

    def reachable(self, start: int | None = None) -> list[int]:
        start = self.initial if start is None else start
        if not (0 <= start < self.n_states):
            return []
        seen = [False] * self.n_states
        seen[start] = True
        stack = [start]
        order = [start]
        while stack:
            q = stack.pop()
            for t in self.by_src[q]:
                if not seen[t.dst]:
                    seen[t.dst] = True
                    stack.append(t.dst)
                    order.append(t.dst)
        return order

    def trim(self) -> "ParityAutomaton":
        """Drop unreachable states, keeping ids dense and transition order."""
        keep = sorted(self.reachable())
        if len(keep) == self.n_states:
            return self
        remap = {q: i for i, q in enumerate(keep)}
        trans = tuple(
            Transition(remap[t.src], t.letter, t.priority, remap[t.dst])
            for t in self.transitions
            if t.src in remap and t.dst in remap
        )
        origin = tuple(self.origin_label(q) for q in keep)
        return replace(
            self,
            n_states=len(keep),
            initial=remap[self.initial],
            transitions=trans,
            origin=origin,
        )

    def with_initial(self, q: int) -> "ParityAutomaton":
        return replace(self, initial=q)

    # -- simulation helpers (deterministic, eps-free) ------------------------

    def run_state(self, q: int, word) -> int:
        for a in word:
            q = self.dsucc(q, a).dst
        return q

    def run_min_priority(self, q: int, word) -> tuple[int, int | None]:
        """Final state and minimal priority along the run (None for empty word)."""
        m = None
        for a in word:
            t = self.dsucc(q, a)
            m = t.priority if m is None else min(m, t.priority)
            q = t.dst
        return q, m


def access_word(aut: ParityAutomaton, target: int) -> tuple[str, ...] | None:
    """Shortest word reaching `target` from the initial state (eps-free BFS)."""
    if target == aut.initial:
        return ()
    from collections import deque

    prev: dict[int, tuple[int, str]] = {aut.initial: None}
    queue = deque([aut.initial])
    while queue:
        q = queue.popleft()
        for t in aut.by_src[q]:
            if t.is_eps:
                continue
            if t.dst not in prev:
                prev[t.dst] = (q, t.letter)
                if t.dst == target:
                    word = []
                    s = target
                    while prev[s] is not None:
                        s0, a = prev[s]
                        word.append(a)
                        s = s0
                    return tuple(reversed(word))
                queue.append(t.dst)
    return None


# ---------------------------------------------------------------------------
# SCCs, safe components
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scc:
    states: tuple[int, ...]
    recurrent: bool
    positive: bool | None  # parity of the minimal internal priority; None if trivial


@dataclass(frozen=True)
class Congruence:
    """Total map state-id -> class-id with contiguous class ids from 0."""

    class_of: tuple[int, ...]

    @property
    def n_classes(self):
        return max(self.class_of) + 1 if self.class_of else 0

    def members(self, c: int) -> tuple[int, ...]:
        return tuple(q for q, cc in enumerate(self.class_of) if cc == c)

    def classes(self) -> list[tuple[int, ...]]:
        out = [[] for _ in range(self.n_classes)]
        for q, c in enumerate(self.class_of):
            out[c].append(q)
        return [tuple(c) for c in out]

    def same(self, q: int, p: int) -> bool:
        return self.class_of[q] == self.class_of[p]


def congruence_from_classes(n_states: int, classes) -> Congruence:
    class_of = [-1] * n_states
    renum = {}
    for group in classes:
        key = min(group)
        renum[key] = None
        for q in group:
            class_of[q] = key
    for i, key in enumerate(sorted(renum)):
        renum[key] = i
    return Congruence(tuple(renum[c] for c in class_of))


def tarjan_scc(n: int, edges) -> list[list[int]]:
    """Iterative Tarjan; returns components in reverse topological order."""
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(adj[v]):
                w = adj[v][pi]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comps


def scc_decompose(aut: ParityAutomaton) -> list[Scc]:
    """SCCs with recurrence and positive/negative flags, in reverse topological order.

    A singleton with no self-loop is transient; the positive flag is the
    parity of the minimal priority on internal transitions (None when there
    are none).
    """
    comps = tarjan_scc(aut.n_states, ((t.src, t.dst) for t in aut.transitions))
    comp_of = {}
    for i, comp in enumerate(comps):
        for q in comp:
            comp_of[q] = i
    internal_min: list[int | None] = [None] * len(comps)
    has_internal = [False] * len(comps)
    for t in aut.transitions:
        if comp_of[t.src] == comp_of[t.dst]:
            i = comp_of[t.src]
            has_internal[i] = True
            m = internal_min[i]
            internal_min[i] = t.priority if m is None else min(m, t.priority)
    out = []
    for i, comp in enumerate(comps):
        recurrent = len(comp) > 1 or has_internal[i]
        positive = None if internal_min[i] is None else internal_min[i] % 2 == 0
        out.append(Scc(tuple(comp), recurrent, positive))
    return out


def safe_components(aut: ParityAutomaton, x: int) -> tuple[Congruence, list[bool]]:
    """SCC partition of the subautomaton keeping transitions with priority >= x.

    Returns the partition as a Congruence plus a per-class recurrence flag
    (False exactly for trivial singleton components).
    """
    edges = [(t.src, t.dst) for t in aut.transitions if t.priority >= x]
    comps = tarjan_scc(aut.n_states, edges)
    cong = congruence_from_classes(aut.n_states, comps)
    loops = set()
    edge_set = set(edges)
    for comp in comps:
        if len(comp) > 1 or (comp[0], comp[0]) in edge_set:
            if len(comp) > 1 or any(
                t.src == comp[0] and t.dst == comp[0] and t.priority >= x
                for t in aut.by_src[comp[0]]
            ):
                loops.add(cong.class_of[comp[0]])
    recurrent = [c in loops for c in range(cong.n_classes)]
    return cong, recurrent


# ---------------------------------------------------------------------------
# Ultimately periodic words
# ---------------------------------------------------------------------------


def _primitive_root(v: tuple[str, ...]) -> tuple[str, ...]:
    n = len(v)
    for p in range(1, n + 1):
        if n % p == 0 and v == v[: p] * (n // p):
            return v[:p]
    return v


def _min_rotation(v: tuple[str, ...]) -> tuple[str, ...]:
    return min(tuple(v[i:] + v[:i]) for i in range(len(v)))


@dataclass(frozen=True)
class UPWord:
    """Ultimately periodic word u . v^omega; v must be nonempty."""

    u: tuple[str, ...]
    v: tuple[str, ...]

    def __post_init__(self):
        if not self.v:
            raise ValueError("periodic part must be nonempty")

    def canonical(self) -> "UPWord":
        """Canonical representative: v is the lexicographically minimal rotation
        of its primitive root, u the shortest prefix compatible with that v."""
        u, v = list(self.u), list(_primitive_root(self.v))
        # absorb the spine into v as far as possible (shortest u overall)
        while u and u[-1] == v[-1]:
            u.pop()
            v = [v[-1]] + v[:-1]
        v = list(_primitive_root(tuple(v)))
        r = list(_min_rotation(tuple(v)))
        if r != v:
            # re-anchor u on the minimal rotation: u grows by the offset
            k = len(v)
            for i in range(k):
                if v[i:] + v[:i] == r:
                    u = u + v[:i]
                    v = r
                    break
        return UPWord(tuple(u), tuple(v))

    def prefix(self, n: int) -> tuple[str, ...]:
        out = list(self.u)
        while len(out) < n:
            out.extend(self.v)
        return tuple(out[:n])

    def letter(self, i: int) -> str:
        if i < len(self.u):
            return self.u[i]
        return self.v[(i - len(self.u)) % len(self.v)]

    def __str__(self):
        up = " ".join(self.u) if self.u else "-"
        return f"upword: {up} | {' '.join(self.v)}"


def upword(u, v) -> UPWord:
    return UPWord(tuple(u), tuple(v))


def parse_upword(text: str) -> UPWord:
    body = text.strip()
    if body.startswith("upword:"):
        body = body[len("upword:"):]
    if "|" not in body:
        raise FormatError("upword needs 'u | v' with '|' separator")
    left, right = body.split("|", 1)
    u = tuple(left.split())
    if u == ("-",):
        u = ()
    v = tuple(right.split())
    if not v:
        raise FormatError("upword periodic part is empty")
    return UPWord(u, v)


def up_membership(aut: ParityAutomaton, w: UPWord) -> bool:
    """Does the automaton accept u . v^omega?

    Deterministic eps-free automata are simulated directly; otherwise the
    answer is existential over runs whose eps-erasure equals the word, with
    runs ending in an all-eps suffix excluded.
    """
    for a in w.u + w.v:
        if a not in aut.alphabet:
            raise ValueError(f"letter {a!r} not in the alphabet")
    if aut.deterministic and not aut.has_eps:
        return _up_membership_det(aut, w)
    return _up_membership_nd(aut, w)


def _up_membership_det(aut: ParityAutomaton, w: UPWord) -> bool:
    q = aut.initial
    for a in w.u:
        q = aut.dsucc(q, a).dst
    seen: dict[tuple[int, int], int] = {}
    trace: list[int] = []  # priorities along the v-iteration
    pos = 0
    step = 0
    while (q, pos) not in seen:
        seen[(q, pos)] = step
        t = aut.dsucc(q, w.v[pos])
        trace.append(t.priority)
        q = t.dst
        pos = (pos + 1) % len(w.v)
        step += 1
    start = seen[(q, pos)]
    return min(trace[start:]) % 2 == 0


def _up_membership_nd(aut: ParityAutomaton, w: UPWord) -> bool:
    # product of the automaton with the lasso graph; a word is accepted iff
    # some reachable cycle has even minimal priority and consumes a letter
    ulen, vlen = len(w.u), len(w.v)
    total = ulen + vlen

    def advance(pos):
        nxt = pos + 1
        return ulen if nxt == total else nxt

    def letter_at(pos):
        return w.u[pos] if pos < ulen else w.v[pos - ulen]

    nodes = {}

    def node_id(q, pos):
        key = (q, pos)
        if key not in nodes:
            nodes[key] = len(nodes)
        return nodes[key]

    edges = []  # (src_id, dst_id, priority, consumes)
    stack = [(aut.initial, 0)]
    node_id(aut.initial, 0)
    seen = {(aut.initial, 0)}
    while stack:
        q, pos = stack.pop()
        sid = nodes[(q, pos)]
        for t in aut.by_src[q]:
            if t.is_eps:
                tgt = (t.dst, pos)
                consumes = False
            elif t.letter == letter_at(pos):
                tgt = (t.dst, advance(pos))
                consumes = True
            else:
                continue
            tid = node_id(*tgt)
            edges.append((sid, tid, t.priority, consumes))
            if tgt not in seen:
                seen.add(tgt)
                stack.append(tgt)
    n = len(nodes)
    priorities = sorted({p for (_, _, p, _) in edges})
    for x in priorities:
        if x % 2 != 0:
            continue
        sub = [(s, d, p, c) for (s, d, p, c) in edges if p >= x]
        comps = tarjan_scc(n, ((s, d) for (s, d, _, _) in sub))
        comp_of = {}
        for i, comp in enumerate(comps):
            for v_ in comp:
                comp_of[v_] = i
        per_comp_x = set()
        per_comp_consume = set()
        for s, d, p, c in sub:
            if comp_of[s] == comp_of[d]:
                if p == x:
                    per_comp_x.add(comp_of[s])
                if c:
                    per_comp_consume.add(comp_of[s])
        good = per_comp_x & per_comp_consume
        if good:
            return True
    return False


# ---------------------------------------------------------------------------
# Faithful congruences and quotients
# ---------------------------------------------------------------------------


def is_faithful(aut: ParityAutomaton, cong: Congruence, x: int):
    """Check that `cong` is a [0,x]-faithful congruence.

    For every y <= x, y-transitions must be uniform over classes and the
    relation a congruence for them; for priorities > x only the congruence
    property (targets land in one class) is required.  Returns True or a
    string describing the offending transition pair.
    """
    for q in aut.states():
        for p in aut.states():
            if p <= q or not cong.same(q, p):
                continue
            letters = set(aut.alphabet)
            if aut.has_eps:
                letters.add(EPS)
            for a in letters:
                tq, tp = aut.succ(q, a), aut.succ(p, a)
                if not tq and not tp:
                    continue
                if bool(tq) != bool(tp):
                    return f"states {q}~{p}: letter {a!r} enabled on one side only"
                for t1 in tq:
                    if t1.priority <= x:
                        for t2 in tp:
                            if t2.priority != t1.priority:
                                return (
                                    f"states {q}~{p}: {t1} vs {t2} disagree on a "
                                    f"priority <= {x}"
                                )
                            if not cong.same(t1.dst, t2.dst):
                                return f"states {q}~{p}: {t1} vs {t2} leave the class"
                    else:
                        for t2 in tp:
                            if t2.priority <= x:
                                return (
                                    f"states {q}~{p}: {t1} vs {t2} disagree on a "
                                    f"priority <= {x}"
                                )
                            if not cong.same(t1.dst, t2.dst):
                                return f"states {q}~{p}: {t1} vs {t2} leave the class"
    return True


def quotient_leq_x(aut: ParityAutomaton, cong: Congruence, x: int) -> ParityAutomaton:
    """(<=x)-quotient by a [0,x]-faithful congruence (x even).

    Transitions with priority <= x keep it; those above become x+1, the
    least important odd priority of the quotient.
    """
    if x % 2 != 0:
        raise ValueError("quotient level must be even")
    ok = is_faithful(aut, cong, x)
    if ok is not True:
        raise ValueError(f"congruence is not [0,{x}]-faithful: {ok}")
    k = cong.n_classes
    seen = set()
    trans = []
    for t in aut.transitions:
        pr = t.priority if t.priority <= x else x + 1
        key = (cong.class_of[t.src], t.letter, pr, cong.class_of[t.dst])
        if key not in seen:
            seen.add(key)
            trans.append(Transition(*key))
    origin = tuple(
        "+".join(aut.origin_label(q) for q in cong.members(c)) for c in range(k)
    )
    prs = [t.priority for t in trans]
    return ParityAutomaton(
        n_states=k,
        alphabet=aut.alphabet,
        initial=cong.class_of[aut.initial],
        transitions=tuple(trans),
        priority_range=(min(prs), max(prs)),
        deterministic=not aut.has_eps,
        origin=origin,
    )


# ---------------------------------------------------------------------------
# Text format (.dpa)
# ---------------------------------------------------------------------------


def emit_dpa(aut: ParityAutomaton) -> str:
    lines = ["dpa"]
    lines.append("alphabet: " + " ".join(aut.alphabet))
    lines.append(f"states: {aut.n_states}")
    lines.append(f"initial: {aut.initial}")
    lines.append(f"priorities: {aut.d_min} {aut.d_max}")
    lines.append(f"deterministic: {'true' if aut.deterministic else 'false'}")
    for t in aut.transitions:
        lines.append(f"trans: {t.src} {t.letter} {t.priority} {t.dst}")
    return "\n".join(lines) + "\n"


def parse_dpa(text: str) -> ParityAutomaton:
    header = {}
    trans = []
    saw_magic = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not saw_magic:
            if line != "dpa":
                raise FormatError("expected 'dpa' magic line", ln)
            saw_magic = True
            continue
        if ":" not in line:
            raise FormatError(f"expected 'key: value', got {line!r}", ln)
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        if key == "trans":
            parts = value.split()
            if len(parts) != 4:
                raise FormatError("trans needs '<src> <letter|eps> <priority> <dst>'", ln)
            try:
                trans.append(
                    Transition(int(parts[0]), parts[1], int(parts[2]), int(parts[3]))
                )
            except ValueError:
                raise FormatError(f"bad transition fields {value!r}", ln) from None
        elif key in ("alphabet", "states", "initial", "priorities", "deterministic"):
            if key in header:
                raise FormatError(f"duplicate header {key!r}", ln)
            header[key] = (value, ln)
        else:
            raise FormatError(f"unknown key {key!r}", ln)
    if not saw_magic:
        raise FormatError("empty input, expected 'dpa'", 1)
    for need in ("alphabet", "states", "initial", "priorities", "deterministic"):
        if need not in header:
            raise FormatError(f"missing header {need!r}", 1)
    try:
        n = int(header["states"][0])
        initial = int(header["initial"][0])
        pr = tuple(int(x) for x in header["priorities"][0].split())
    except ValueError as e:
        raise FormatError(str(e)) from None
    if len(pr) != 2:
        raise FormatError("priorities header needs two integers", header["priorities"][1])
    det_text = header["deterministic"][0]
    if det_text not in ("true", "false"):
        raise FormatError("deterministic must be true or false", header["deterministic"][1])
    return ParityAutomaton(
        n_states=n,
        alphabet=tuple(header["alphabet"][0].split()),
        initial=initial,
        transitions=tuple(trans),
        priority_range=pr,
        deterministic=det_text == "true",
    )


def build(
    n_states,
    alphabet,
    initial,
    transitions,
    deterministic=None,
    priority_range=None,
    origin=None,
) -> ParityAutomaton:
    """Convenience constructor from (src, letter, priority, dst) tuples."""
    trans = tuple(Transition(*t) for t in transitions)
    if priority_range is None:
        prs = [t.priority for t in trans] or [0]
        priority_range = (min(prs), max(prs))
    if deterministic is None:
        deterministic = not any(t.is_eps for t in trans) and all(
            len([u for u in trans if u.src == t.src and u.letter == t.letter]) == 1
            for t in trans
        )
    return ParityAutomaton(
        n_states=n_states,
        alphabet=tuple(alphabet),
        initial=initial,
        transitions=trans,
        priority_range=priority_range,
        deterministic=deterministic,
        origin=origin,
    )
