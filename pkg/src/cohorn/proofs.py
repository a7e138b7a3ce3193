"""Proof terms, axiom environments, and the judgement checker.

A judgement env |- e : F is checked against four rules:

  Lp-m  (e : B1,...,Bn => A) in env,  e e1...en : sA  when s matches A on the goal
  Lam   lambda b1...bn. e : B1,...,Bn => A  extends env with facts bi : => Bi
  Nu'   nu a. e : A          extends env with a : => A, e in head normal form
  Nu    nu a. e : B... => A  extends env with the full Horn hypothesis, e in HNF

Checking is search-free: the evidence term dictates the derivation shape and
matchers against a fixed clause head are unique, so for a given judgement the
derivation (or the rejection) is unique.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

from .terms import (
    HornClause,
    Program,
    Subst,
    apply_atom,
    fact,
    format_formula,
    format_subst,
    match,
)


# ---------------------------------------------------------------------------
# Proof term syntax
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstSym:
    name: str


@dataclass(frozen=True)
class ProofVar:
    name: str


@dataclass(frozen=True)
class Apply:
    fun: "ProofTerm"
    arg: "ProofTerm"


@dataclass(frozen=True)
class Lambda:
    binders: tuple[str, ...]
    body: "ProofTerm"

    def __post_init__(self) -> None:
        if not self.binders:
            raise ValueError("Lambda requires at least one binder")


@dataclass(frozen=True)
class Nu:
    binder: str
    body: "ProofTerm"


ProofTerm = Union[ConstSym, ProofVar, Apply, Lambda, Nu]


def spine(e: ProofTerm) -> tuple[ProofTerm, tuple[ProofTerm, ...]]:
    """Unwind left-associated application: e == head a1 ... an."""
    args: list[ProofTerm] = []
    while isinstance(e, Apply):
        args.append(e.arg)
        e = e.fun
    args.reverse()
    return e, tuple(args)


def make_apply(head: ProofTerm, args: Sequence[ProofTerm]) -> ProofTerm:
    out = head
    for a in args:
        out = Apply(out, a)
    return out


def free_proof_vars(e: ProofTerm) -> frozenset[str]:
    if isinstance(e, ConstSym):
        return frozenset()
    if isinstance(e, ProofVar):
        return frozenset((e.name,))
    if isinstance(e, Apply):
        return free_proof_vars(e.fun) | free_proof_vars(e.arg)
    if isinstance(e, Lambda):
        return free_proof_vars(e.body) - frozenset(e.binders)
    return free_proof_vars(e.body) - frozenset((e.binder,))


def is_hnf(e: ProofTerm) -> bool:
    """Head normal form: lambda binders over a constant-headed application."""
    while isinstance(e, Lambda):
        e = e.body
    head, _ = spine(e)
    return isinstance(head, ConstSym)


def _normalize(e: ProofTerm, env: dict[str, str], counter: list[int]) -> ProofTerm:
    if isinstance(e, ConstSym):
        return e
    if isinstance(e, ProofVar):
        return ProofVar(env.get(e.name, e.name))
    if isinstance(e, Apply):
        return Apply(_normalize(e.fun, env, counter), _normalize(e.arg, env, counter))
    if isinstance(e, Lambda):
        inner = dict(env)
        fresh = []
        for b in e.binders:
            counter[0] += 1
            name = f"v{counter[0]}"
            inner[b] = name
            fresh.append(name)
        return Lambda(tuple(fresh), _normalize(e.body, inner, counter))
    counter[0] += 1
    name = f"v{counter[0]}"
    inner = dict(env)
    inner[e.binder] = name
    return Nu(name, _normalize(e.body, inner, counter))


def normalize_binders(e: ProofTerm) -> ProofTerm:
    """Rename bound proof variables to a canonical v1, v2, ... sequence."""
    return _normalize(e, {}, [0])


def alpha_equal(a: ProofTerm, b: ProofTerm) -> bool:
    return normalize_binders(a) == normalize_binders(b)


def format_proof(e: ProofTerm, unicode: bool = False) -> str:
    def fmt(t: ProofTerm, wrap: bool) -> str:
        if isinstance(t, ConstSym) or isinstance(t, ProofVar):
            return t.name
        if isinstance(t, Apply):
            head, args = spine(t)
            parts = [fmt(head, True)] + [fmt(a, True) for a in args]
            s = " ".join(parts)
            return f"({s})" if wrap else s
        if isinstance(t, Lambda):
            names = " ".join(t.binders)
            if unicode:
                s = f"λ {names}. {fmt(t.body, False)}"
            else:
                s = f"\\{names} -> {fmt(t.body, False)}"
            return f"({s})" if wrap else s
        if unicode:
            s = f"ν {t.binder}. {fmt(t.body, False)}"
        else:
            s = f"nu {t.binder}. {fmt(t.body, False)}"
        return f"({s})" if wrap else s

    return fmt(e, False)


# ---------------------------------------------------------------------------
# Axiom environments
# ---------------------------------------------------------------------------


class EntryKind(Enum):
    AXIOM = "axiom"
    HYPOTHESIS = "hypothesis"
    LEMMA = "lemma"


@dataclass(frozen=True)
class EnvEntry:
    evidence: ProofTerm
    formula: HornClause
    # Lambda-bound hypotheses are monomorphic (a dictionary parameter has one
    # type): they resolve only their literal formula.  Axioms, lemmas, and
    # nu-bound hypotheses are implicitly universally quantified and may be
    # used at any instance.  Without this split, lambda hypotheses could be
    # instantiated at unrelated instances, deriving Horn formulas that are
    # invalid in both the least and the greatest model.
    rigid: bool = False

    @property
    def kind(self) -> EntryKind:
        if isinstance(self.evidence, ConstSym):
            return EntryKind.AXIOM
        if isinstance(self.evidence, ProofVar):
            return EntryKind.HYPOTHESIS
        return EntryKind.LEMMA


@dataclass(frozen=True)
class AxiomEnv:
    entries: tuple[EnvEntry, ...] = ()

    def extended(self, *entries: EnvEntry) -> "AxiomEnv":
        return AxiomEnv(self.entries + entries)

    def axiom(self, name: str) -> Optional[EnvEntry]:
        for e in self.entries:
            if isinstance(e.evidence, ConstSym) and e.evidence.name == name:
                return e
        return None

    def hypothesis(self, name: str) -> Optional[EnvEntry]:
        # Newest binding wins, so inner binders shadow outer ones.
        for e in reversed(self.entries):
            if isinstance(e.evidence, ProofVar) and e.evidence.name == name:
                return e
        return None

    def lemma_for(self, evidence: ProofTerm) -> Optional[EnvEntry]:
        for e in self.entries:
            if e.kind is EntryKind.LEMMA and alpha_equal(e.evidence, evidence):
                return e
        return None

    def lemmas(self) -> tuple[EnvEntry, ...]:
        return tuple(e for e in self.entries if e.kind is EntryKind.LEMMA)

    def add_lemma(self, evidence: ProofTerm, formula: HornClause) -> "AxiomEnv":
        if isinstance(evidence, (ConstSym, ProofVar)):
            raise ValueError("lemma evidence must be a compound proof term")
        if free_proof_vars(evidence):
            raise ValueError("lemma evidence must be a closed proof term")
        return self.extended(EnvEntry(evidence, formula))


def env_for_program(program: Program, names: Optional[Sequence[str]] = None) -> AxiomEnv:
    """Axiom entries k1..kn in clause order, per the axiom-environment translation."""
    if names is None:
        names = [f"k{i + 1}" for i in range(len(program.clauses))]
    if len(names) != len(program.clauses):
        raise ValueError("one name per clause is required")
    return AxiomEnv(
        tuple(EnvEntry(ConstSym(n), c) for n, c in zip(names, program.clauses))
    )


# ---------------------------------------------------------------------------
# Judgements, derivations, checking
# ---------------------------------------------------------------------------


class Rule(Enum):
    LP_M = "Lp-m"
    LAM = "Lam"
    NU_PRIME = "Nu'"
    NU = "Nu"


@dataclass(frozen=True)
class Judgement:
    env: AxiomEnv
    evidence: ProofTerm
    formula: HornClause


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    judgement: Judgement
    matcher: Optional[Subst]
    children: tuple["Derivation", ...]

    @property
    def formula(self) -> HornClause:
        return self.judgement.formula

    @property
    def evidence(self) -> ProofTerm:
        return self.judgement.evidence

    def rules_used(self) -> frozenset[Rule]:
        out = {self.rule}
        for c in self.children:
            out |= c.rules_used()
        return frozenset(out)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)


class CheckReason(Enum):
    UNBOUND_VAR = "UNBOUND_VAR"
    NO_MATCH = "NO_MATCH"
    HNF_REQUIRED = "HNF_REQUIRED"
    RULE_SHAPE = "RULE_SHAPE"
    ARITY = "ARITY"


class CheckError(Exception):
    """Rejection of a judgement: deepest-leftmost failing node plus reason."""

    def __init__(
        self,
        reason: CheckReason,
        message: str,
        path: tuple[int, ...],
        evidence: ProofTerm,
        formula: HornClause,
    ):
        self.reason = reason
        self.path = path
        self.evidence = evidence
        self.formula = formula
        loc = "/".join(str(i) for i in path) or "root"
        super().__init__(f"{reason.value} at {loc}: {message}")


def _resolve_head(
    env: AxiomEnv, head: ProofTerm, path: tuple[int, ...], e: ProofTerm, f: HornClause
) -> EnvEntry:
    if isinstance(head, ConstSym):
        entry = env.axiom(head.name)
        if entry is None:
            raise CheckError(
                CheckReason.UNBOUND_VAR, f"unknown constant {head.name}", path, e, f
            )
        return entry
    if isinstance(head, ProofVar):
        entry = env.hypothesis(head.name)
        if entry is None:
            raise CheckError(
                CheckReason.UNBOUND_VAR, f"unbound proof variable {head.name}", path, e, f
            )
        return entry
    entry = env.lemma_for(head)
    if entry is None:
        raise CheckError(
            CheckReason.RULE_SHAPE,
            "application head is not an axiom, hypothesis, or registered lemma",
            path,
            e,
            f,
        )
    return entry


def _check(env: AxiomEnv, e: ProofTerm, f: HornClause, path: tuple[int, ...]) -> Derivation:
    if f.body:
        if isinstance(e, Lambda):
            if len(e.binders) != len(f.body):
                raise CheckError(
                    CheckReason.RULE_SHAPE,
                    f"{len(e.binders)} binder(s) against {len(f.body)} body atom(s)",
                    path,
                    e,
                    f,
                )
            hyps = tuple(
                EnvEntry(ProofVar(b), fact(a), rigid=True)
                for b, a in zip(e.binders, f.body)
            )
            child = _check(env.extended(*hyps), e.body, fact(f.head), path + (0,))
            return Derivation(Rule.LAM, Judgement(env, e, f), None, (child,))
        if isinstance(e, Nu):
            if not is_hnf(e.body):
                raise CheckError(
                    CheckReason.HNF_REQUIRED,
                    "nu body is not in head normal form",
                    path,
                    e,
                    f,
                )
            hyp = EnvEntry(ProofVar(e.binder), f)
            child = _check(env.extended(hyp), e.body, f, path + (0,))
            return Derivation(Rule.NU, Judgement(env, e, f), None, (child,))
        raise CheckError(
            CheckReason.RULE_SHAPE,
            "a Horn formula needs lambda or nu evidence",
            path,
            e,
            f,
        )
    # Atomic formula.
    if isinstance(e, Nu):
        if not is_hnf(e.body):
            raise CheckError(
                CheckReason.HNF_REQUIRED, "nu body is not in head normal form", path, e, f
            )
        hyp = EnvEntry(ProofVar(e.binder), f)
        child = _check(env.extended(hyp), e.body, f, path + (0,))
        return Derivation(Rule.NU_PRIME, Judgement(env, e, f), None, (child,))
    if isinstance(e, Lambda):
        raise CheckError(
            CheckReason.RULE_SHAPE,
            "lambda evidence against an atomic formula",
            path,
            e,
            f,
        )
    head, args = spine(e)
    entry = _resolve_head(env, head, path, e, f)
    clause = entry.formula
    if len(args) != len(clause.body):
        raise CheckError(
            CheckReason.ARITY,
            f"{_entry_label(entry)} expects {len(clause.body)} argument(s), got {len(args)}",
            path,
            e,
            f,
        )
    sigma = match(clause.head, f.head)
    if sigma is None:
        raise CheckError(
            CheckReason.NO_MATCH,
            f"head of {_entry_label(entry)} ({clause.head}) does not match goal {f.head}",
            path,
            e,
            f,
        )
    if entry.rigid and sigma:
        raise CheckError(
            CheckReason.NO_MATCH,
            f"lambda hypothesis {_entry_label(entry)} is monomorphic; "
            f"it cannot be instantiated at {f.head}",
            path,
            e,
            f,
        )
    children = tuple(
        _check(env, arg, fact(apply_atom(sigma, b)), path + (i,))
        for i, (arg, b) in enumerate(zip(args, clause.body))
    )
    return Derivation(Rule.LP_M, Judgement(env, e, f), sigma, children)


def _entry_label(entry: EnvEntry) -> str:
    if isinstance(entry.evidence, (ConstSym, ProofVar)):
        return entry.evidence.name
    return f"lemma ({format_formula(entry.formula)})"


def check(env: AxiomEnv, evidence: ProofTerm, formula: HornClause) -> Derivation:
    """Return the unique derivation of env |- evidence : formula.

    Raises CheckError with the deepest-leftmost failure otherwise.
    """
    return _check(env, evidence, formula, ())


def check_derivation(d: Derivation) -> None:
    """Validate every node of a derivation tree locally against its rule.

    Unlike `check`, this accepts the Nu-with-empty-Lam trees produced by
    `admissibility_view`.  Raises CheckError on the first invalid node.
    """
    env, e, f = d.judgement.env, d.judgement.evidence, d.judgement.formula
    if d.rule is Rule.LP_M:
        again = _check(env, e, f, ())
        if again.rule is not Rule.LP_M or again.matcher != d.matcher:
            raise CheckError(
                CheckReason.RULE_SHAPE, "node does not re-check as Lp-m", (), e, f
            )
        for child in d.children:
            check_derivation(child)
        return
    if d.rule is Rule.LAM:
        if isinstance(e, Lambda):
            _check(env, e, f, ())
        else:
            # Zero-binder form from admissibility_view: same judgement below.
            if f.body or len(d.children) != 1:
                raise CheckError(
                    CheckReason.RULE_SHAPE, "empty Lam must target an atomic formula", (), e, f
                )
            child = d.children[0]
            if child.judgement.evidence != e or child.judgement.formula != f:
                raise CheckError(
                    CheckReason.RULE_SHAPE, "empty Lam child judgement mismatch", (), e, f
                )
        for child in d.children:
            check_derivation(child)
        return
    if d.rule in (Rule.NU, Rule.NU_PRIME):
        if not isinstance(e, Nu):
            raise CheckError(CheckReason.RULE_SHAPE, "nu rule without nu evidence", (), e, f)
        if not is_hnf(e.body):
            raise CheckError(CheckReason.HNF_REQUIRED, "nu body not in HNF", (), e, f)
        if len(d.children) != 1:
            raise CheckError(CheckReason.RULE_SHAPE, "nu node needs one child", (), e, f)
        child = d.children[0]
        if child.judgement.formula != f:
            raise CheckError(CheckReason.RULE_SHAPE, "nu child formula mismatch", (), e, f)
        check_derivation(child)
        return
    raise CheckError(CheckReason.RULE_SHAPE, f"unknown rule {d.rule}", (), e, f)


def admissibility_view(d: Derivation) -> Derivation:
    """Re-express a Nu'-rooted derivation as Nu over a zero-binder Lam child."""
    if d.rule is not Rule.NU_PRIME:
        raise CheckError(
            CheckReason.RULE_SHAPE,
            "admissibility view requires a Nu' root",
            (),
            d.judgement.evidence,
            d.judgement.formula,
        )
    inner = d.children[0]
    lam = Derivation(Rule.LAM, inner.judgement, None, (inner,))
    return Derivation(Rule.NU, d.judgement, None, (lam,))


def format_derivation(d: Derivation, unicode: bool = False, indent: int = 0) -> str:
    pad = "  " * indent
    label = d.rule.value
    if d.matcher is not None:
        head, _ = spine(d.judgement.evidence)
        name = head.name if isinstance(head, (ConstSym, ProofVar)) else "lemma"
        sig = format_subst(d.matcher) if d.matcher else "{}"
        label = f"{label} [{name} {sig}]"
    line = f"{pad}{label} {format_formula(d.judgement.formula)}"
    parts = [line]
    for c in d.children:
        parts.append(format_derivation(c, unicode, indent + 1))
    return "\n".join(parts)
