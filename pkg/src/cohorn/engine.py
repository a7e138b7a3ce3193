"""Proof search for the three resolution modes.

Matching-only resolution never instantiates a goal, so the subgoals produced
by a clause step are fixed the moment the head matches; conjuncts are solved
independently and no bindings flow between them.  The search is a plain
depth-bounded DFS over a fixed option order:

  1. coinductive (nu) hypotheses, oldest first,
  2. registered lemmata, registration order,
  3. axioms, source order (at most one can match, by non-overlap),
  4. lambda-fact hypotheses, oldest first.

A nu hypothesis is usable only after the goal that introduced it has been
expanded by an axiom step on the current path ("armed").  That is the
operational form of the head-normal-form side condition: the binder's body
is then necessarily headed by a proof-term constant, so every emitted
nu-wrap satisfies HNF by construction (asserted anyway).  Nu hypotheses
resolve any instance of their head; lambda-fact hypotheses are monomorphic
and resolve only their literal atom, mirroring the checker.

Depth counts resolution (Lp-m) nodes on the current path; Lam and Nu steps
are free.  FAILED means the whole finite tree below the limit closed with
no depth cut anywhere; EXHAUSTED means at least one branch was cut.

A single run is single-threaded and fully deterministic (including its
trace); distinct runs may share Program and AxiomEnv values freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .proofs import (
    AxiomEnv,
    CheckError,
    ConstSym,
    Derivation,
    Lambda,
    Nu,
    ProofTerm,
    ProofVar,
    Rule,
    check,
    env_for_program,
    format_proof,
    free_proof_vars,
    is_hnf,
    make_apply,
)
from .terms import (
    App,
    Atom,
    HornClause,
    Program,
    Term,
    Var,
    apply_atom,
    fact,
    format_formula,
    format_subst,
    match,
    subterms,
)


class Mode(Enum):
    INDUCTIVE = "inductive"
    COINDUCTIVE = "coinductive"
    EXTENDED = "extended"


class Outcome(Enum):
    PROVED = "PROVED"
    EXHAUSTED = "EXHAUSTED"
    FAILED = "FAILED"


_ALLOWED_RULES = {
    Mode.INDUCTIVE: frozenset({Rule.LP_M, Rule.LAM}),
    Mode.COINDUCTIVE: frozenset({Rule.LP_M, Rule.NU_PRIME}),
    Mode.EXTENDED: frozenset({Rule.LP_M, Rule.LAM, Rule.NU, Rule.NU_PRIME}),
}


class EngineInvariantError(Exception):
    """An internal invariant failed; a found proof did not re-check."""


class RegistrationError(Exception):
    """A lemma was refused registration."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class Query:
    goal: HornClause
    mode: Mode
    depth_limit: int = 8
    lemmas: tuple[HornClause, ...] = ()
    auto_lemma: bool = False

    def __post_init__(self) -> None:
        if self.depth_limit < 1:
            raise ValueError("depth_limit must be >= 1")


@dataclass(frozen=True)
class TraceEvent:
    kind: str  # goal | try | guarded | cut | dead-end | note
    depth: int
    goal: str
    entry: str = ""
    detail: str = ""


@dataclass(frozen=True)
class LemmaRecord:
    formula: HornClause
    evidence: Optional[ProofTerm]
    registered: bool
    note: str = ""


@dataclass(frozen=True)
class SearchResult:
    outcome: Outcome
    evidence: Optional[ProofTerm]
    derivation: Optional[Derivation]
    trace: tuple[TraceEvent, ...]
    env: AxiomEnv
    lemmas: tuple[LemmaRecord, ...] = ()
    auto_lemma: Optional[HornClause] = None


# ---------------------------------------------------------------------------
# Lemma registration and proposal
# ---------------------------------------------------------------------------


def register_lemma(
    env: AxiomEnv, evidence: ProofTerm, formula: HornClause, mode: Mode
) -> AxiomEnv:
    """Extend the environment with a proved lemma.

    Under the coinductive semantics the evidence (under a leading nu, if
    any) must be in head normal form; that side condition is what makes the
    transformation model-preserving, and it is exactly what rules out
    registering the identity proof of A => A.
    """
    try:
        check(env, evidence, formula)
    except CheckError as err:
        raise RegistrationError("CHECK_FAILED", str(err)) from err
    if mode is not Mode.INDUCTIVE:
        inner = evidence.body if isinstance(evidence, Nu) else evidence
        if not is_hnf(inner):
            raise RegistrationError(
                "HNF_REQUIRED",
                f"evidence {format_proof(evidence)} is not in head normal form",
            )
    if isinstance(evidence, (ConstSym, ProofVar)):
        # A bare entry reference is not a lemma; the entry is already usable.
        return env
    return env.add_lemma(evidence, formula)


def _generalize(s: Term, t: Term, memo: dict, counter: list[int]) -> Term:
    if s == t:
        return s
    if isinstance(s, App) and isinstance(t, App) and s.functor == t.functor:
        return App(s.functor, tuple(_generalize(a, b, memo, counter) for a, b in zip(s.args, t.args)))
    key = (s, t)
    if key not in memo:
        counter[0] += 1
        memo[key] = Var(f"X{counter[0]}")
    return memo[key]


def propose_lemma(goal: Atom, ancestor: Atom) -> Optional[HornClause]:
    """Anti-unify a goal against a structurally embedded ancestor.

    Only unary predicates are generalized; everything ambiguous yields None,
    which is a normal result.
    """
    if goal.predicate != ancestor.predicate:
        return None
    if len(goal.args) != 1 or len(ancestor.args) != 1:
        return None
    g, a = goal.args[0], ancestor.args[0]
    if g == a or a not in set(subterms(g)):
        return None
    memo: dict = {}
    counter = [0]
    head_arg = _generalize(g, a, memo, counter)
    if isinstance(head_arg, Var):
        return None
    body = tuple(Atom(goal.predicate, (v,)) for v in memo.values())
    if not body:
        return None
    return HornClause(body, Atom(goal.predicate, (head_arg,)))


def _embeds(goal: Atom, ancestor: Atom) -> bool:
    if goal.predicate != ancestor.predicate:
        return False
    if len(goal.args) != 1 or len(ancestor.args) != 1:
        return False
    g, a = goal.args[0], ancestor.args[0]
    return g != a and a in set(subterms(g))


# ---------------------------------------------------------------------------
# The searcher
# ---------------------------------------------------------------------------


@dataclass
class _Hyp:
    var: str
    clause: HornClause
    armed: bool = False


class _Search:
    def __init__(
        self,
        axioms: Sequence[tuple[str, HornClause]],
        lemmas: Sequence[tuple[ProofTerm, HornClause]],
        mode: Mode,
        limit: int,
        trace: list[TraceEvent],
    ):
        self.axioms = list(axioms)
        self.lemmas = list(lemmas)
        self.mode = mode
        self.limit = limit
        self.trace = trace
        self.nu_hyps: list[_Hyp] = []
        self.fact_hyps: list[_Hyp] = []
        self.goal_stack: list[Atom] = []
        self.triggers: list[tuple[Atom, Atom]] = []
        self._nu_names = 0
        self._fact_names = 0

    def fresh_nu(self) -> str:
        self._nu_names += 1
        return f"a{self._nu_names}"

    def fresh_fact(self) -> str:
        self._fact_names += 1
        return f"b{self._fact_names}"

    def note(self, kind: str, depth: int, goal, entry: str = "", detail: str = "") -> None:
        self.trace.append(TraceEvent(kind, depth, str(goal), entry, detail))

    # -- queries -------------------------------------------------------------

    def solve_query(self, goal: HornClause) -> tuple[Optional[ProofTerm], bool]:
        if goal.is_atomic:
            return self.solve_atomic(goal.head, 0, ())
        if self.mode is Mode.COINDUCTIVE:
            self.note("note", 0, goal, "", "no rule derives a Horn formula in coinductive mode")
            return None, False
        binders = tuple(self.fresh_fact() for _ in goal.body)
        facts = [_Hyp(b, fact(a)) for b, a in zip(binders, goal.body)]
        self.fact_hyps.extend(facts)
        alpha: Optional[_Hyp] = None
        intro: tuple[_Hyp, ...] = ()
        if self.mode is Mode.EXTENDED:
            alpha = _Hyp(self.fresh_nu(), goal)
            self.nu_hyps.append(alpha)
            intro = (alpha,)
        try:
            # The body goal registers no candidate of its own: cycle closure
            # at the root is the job of the Horn hypothesis.
            ev, exhausted = self.solve_atomic(goal.head, 0, intro, candidate=False)
        finally:
            del self.fact_hyps[len(self.fact_hyps) - len(facts):]
            if alpha is not None:
                self.nu_hyps.pop()
        if ev is None:
            return None, exhausted
        term: ProofTerm = Lambda(binders, ev)
        if alpha is not None and alpha.var in free_proof_vars(ev):
            if not is_hnf(term):
                raise EngineInvariantError("nu body not in HNF despite guard")
            term = Nu(alpha.var, term)
        return term, exhausted

    # -- atomic goals ----------------------------------------------------------

    def solve_atomic(
        self,
        goal: Atom,
        depth: int,
        intro_hyps: tuple[_Hyp, ...] = (),
        candidate: bool = True,
    ) -> tuple[Optional[ProofTerm], bool]:
        cand: Optional[_Hyp] = None
        if candidate and self.mode is not Mode.INDUCTIVE:
            cand = _Hyp(self.fresh_nu(), fact(goal))
            self.nu_hyps.append(cand)
        intro = intro_hyps + ((cand,) if cand is not None else ())
        for anc in reversed(self.goal_stack):
            if _embeds(goal, anc):
                self.triggers.append((goal, anc))
                break
        self.goal_stack.append(goal)
        try:
            ev, exhausted = self._options(goal, depth, intro)
        finally:
            self.goal_stack.pop()
            if cand is not None:
                self.nu_hyps.pop()
        if ev is not None and cand is not None and cand.var in free_proof_vars(ev):
            if not is_hnf(ev):
                raise EngineInvariantError("nu body not in HNF despite guard")
            ev = Nu(cand.var, ev)
        return ev, exhausted

    def _options(
        self, goal: Atom, depth: int, intro: tuple[_Hyp, ...]
    ) -> tuple[Optional[ProofTerm], bool]:
        exhausted = False
        matched_any = False

        for h in list(self.nu_hyps):
            s = match(h.clause.head, goal)
            if s is None:
                continue
            matched_any = True
            if not h.armed:
                self.note("guarded", depth, goal, f"hyp {h.var}")
                continue
            if depth >= self.limit:
                exhausted = True
                self.note("cut", depth, goal, f"hyp {h.var}")
                continue
            self.note("try", depth, goal, f"hyp {h.var}", format_subst(s))
            evs, exh = self.solve_conj(
                [apply_atom(s, b) for b in h.clause.body], depth + 1
            )
            exhausted |= exh
            if evs is not None:
                return make_apply(ProofVar(h.var), evs), exhausted

        for i, (lev, lclause) in enumerate(self.lemmas):
            s = match(lclause.head, goal)
            if s is None:
                continue
            matched_any = True
            if depth >= self.limit:
                exhausted = True
                self.note("cut", depth, goal, f"lemma[{i + 1}]")
                continue
            self.note("try", depth, goal, f"lemma[{i + 1}]", format_subst(s))
            evs, exh = self.solve_conj(
                [apply_atom(s, b) for b in lclause.body], depth + 1
            )
            exhausted |= exh
            if evs is not None:
                return make_apply(lev, evs), exhausted

        matches = []
        for name, clause in self.axioms:
            s = match(clause.head, goal)
            if s is not None:
                matches.append((name, clause, s))
        if len(matches) > 1:
            raise EngineInvariantError(
                f"goal {goal} matched by {len(matches)} axiom heads"
            )
        if matches:
            matched_any = True
            name, clause, s = matches[0]
            if depth >= self.limit:
                exhausted = True
                self.note("cut", depth, goal, name)
            else:
                self.note("try", depth, goal, name, format_subst(s))
                saved = [(h, h.armed) for h in intro]
                for h in intro:
                    h.armed = True
                try:
                    evs, exh = self.solve_conj(
                        [apply_atom(s, b) for b in clause.body], depth + 1
                    )
                finally:
                    for h, was in saved:
                        h.armed = was
                exhausted |= exh
                if evs is not None:
                    return make_apply(ConstSym(name), evs), exhausted

        for h in list(self.fact_hyps):
            s = match(h.clause.head, goal)
            if s is None:
                continue
            if s:
                # Lambda hypotheses are monomorphic: literal uses only.
                self.note("guarded", depth, goal, f"fact {h.var}", "monomorphic")
                continue
            matched_any = True
            if depth >= self.limit:
                exhausted = True
                self.note("cut", depth, goal, f"fact {h.var}")
                continue
            self.note("try", depth, goal, f"fact {h.var}", format_subst(s))
            return ProofVar(h.var), exhausted

        if not matched_any:
            self.note("dead-end", depth, goal)
        return None, exhausted

    def solve_conj(
        self, goals: Sequence[Atom], depth: int
    ) -> tuple[Optional[list[ProofTerm]], bool]:
        evs: list[ProofTerm] = []
        exhausted = False
        for g in goals:
            ev, exh = self.solve_atomic(g, depth)
            exhausted |= exh
            if ev is None:
                return None, exhausted
            evs.append(ev)
        return evs, exhausted


# ---------------------------------------------------------------------------
# Top-level resolution
# ---------------------------------------------------------------------------


def _attempt(
    env0: AxiomEnv,
    axioms: list[tuple[str, HornClause]],
    query: Query,
    lemma_formulas: Sequence[HornClause],
    trace: list[TraceEvent],
) -> tuple[SearchResult, list[tuple[Atom, Atom]]]:
    env = env0
    lemma_pairs: list[tuple[ProofTerm, HornClause]] = []
    records: list[LemmaRecord] = []
    triggers: list[tuple[Atom, Atom]] = []
    for lf in lemma_formulas:
        trace.append(TraceEvent("note", 0, str(lf), "", "proving lemma"))
        search = _Search(axioms, lemma_pairs, query.mode, query.depth_limit, trace)
        ev, exhausted = search.solve_query(lf)
        triggers.extend(search.triggers)
        if ev is None:
            outcome = Outcome.EXHAUSTED if exhausted else Outcome.FAILED
            records.append(LemmaRecord(lf, None, False, "lemma not proved"))
            return (
                SearchResult(outcome, None, None, tuple(trace), env, tuple(records)),
                triggers,
            )
        try:
            env = register_lemma(env, ev, lf, query.mode)
        except RegistrationError as err:
            records.append(LemmaRecord(lf, ev, False, str(err)))
            return (
                SearchResult(Outcome.FAILED, None, None, tuple(trace), env, tuple(records)),
                triggers,
            )
        records.append(LemmaRecord(lf, ev, True))
        lemma_pairs.append((ev, lf))
    search = _Search(axioms, lemma_pairs, query.mode, query.depth_limit, trace)
    ev, exhausted = search.solve_query(query.goal)
    triggers.extend(search.triggers)
    if ev is None:
        outcome = Outcome.EXHAUSTED if exhausted else Outcome.FAILED
        return (
            SearchResult(outcome, None, None, tuple(trace), env, tuple(records)),
            triggers,
        )
    try:
        derivation = check(env, ev, query.goal)
    except CheckError as err:  # engine bug: emitted evidence must re-check
        raise EngineInvariantError(
            f"emitted proof failed to re-check: {err}"
        ) from err
    if not derivation.rules_used() <= _ALLOWED_RULES[query.mode]:
        raise EngineInvariantError(
            f"derivation uses rules outside mode {query.mode.value}"
        )
    return (
        SearchResult(
            Outcome.PROVED, ev, derivation, tuple(trace), env, tuple(records)
        ),
        triggers,
    )


def resolve(
    program: Program, query: Query, names: Optional[Sequence[str]] = None
) -> SearchResult:
    """Run proof search; every PROVED result has been re-checked.

    Lemma formulas are proved and registered first, in order; a lemma that
    cannot be proved or registered aborts the whole query.  With
    `auto_lemma`, a failed search is retried once after proposing a lemma by
    anti-unification from the first goal/ancestor embedding seen in the
    failed run.
    """
    env0 = env_for_program(program, names)
    axioms = [
        (e.evidence.name, e.formula)  # type: ignore[union-attr]
        for e in env0.entries
    ]
    trace: list[TraceEvent] = []
    result, triggers = _attempt(env0, axioms, query, query.lemmas, trace)
    if result.outcome is Outcome.PROVED or not query.auto_lemma:
        return result
    for goal_atom, ancestor in triggers:
        lemma = propose_lemma(goal_atom, ancestor)
        if lemma is None:
            continue
        retry_trace: list[TraceEvent] = [
            TraceEvent(
                "note",
                0,
                str(goal_atom),
                "",
                f"auto-lemma proposed from ancestor {ancestor}: {format_formula(lemma)}",
            )
        ]
        retried, _ = _attempt(
            env0, axioms, query, (lemma,) + query.lemmas, retry_trace
        )
        return SearchResult(
            retried.outcome,
            retried.evidence,
            retried.derivation,
            result.trace + retried.trace,
            retried.env,
            retried.lemmas,
            auto_lemma=lemma,
        )
    return result
