"""First-order term algebra: terms, atoms, Horn clauses, programs, substitutions.

Resolution in this engine is matching-only (the goal is never instantiated),
so substitutions here are plain dicts from variable names to terms and the
only full unification lives in `unifiable`, which backs the load-time
non-overlap check on axiom heads.

Lexical convention: identifiers starting with an uppercase letter are
variables when they occur in term position.  Predicate names may use any
case (the classic counterexample programs use A, B, D as predicates).

Everything here is a frozen dataclass and every operation is a pure
function, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union


class SignatureError(Exception):
    """A functor or predicate is used with two different arities."""


class ExistentialVariableError(Exception):
    """A clause body mentions a variable that its head does not bind."""

    def __init__(self, clause: "HornClause", variables: Sequence[str]):
        self.clause = clause
        self.variables = tuple(variables)
        names = ", ".join(self.variables)
        super().__init__(
            f"existential variable(s) {names} in clause: {format_clause(clause)}"
        )


class OverlapError(Exception):
    """Two axiom heads unify, violating the non-overlap restriction."""

    def __init__(self, index_a: int, index_b: int, a: "HornClause", b: "HornClause"):
        self.index_a = index_a
        self.index_b = index_b
        self.clause_a = a
        self.clause_b = b
        super().__init__(
            f"axiom heads overlap: clause {index_a + 1} ({format_clause(a)}) "
            f"unifies with clause {index_b + 1} ({format_clause(b)})"
        )


class EmptyUniverseError(Exception):
    """The signature has no constants, so there are no ground terms."""


def is_variable_name(name: str) -> bool:
    return name[:1].isupper()


# ---------------------------------------------------------------------------
# Terms and atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    functor: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(str(a) for a in self.args)})"


Term = Union[Var, App]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class HornClause:
    """body => head; an atomic formula is a clause with an empty body."""

    body: tuple[Atom, ...]
    head: Atom

    @property
    def is_atomic(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        return format_formula(self)


def fact(head: Atom) -> HornClause:
    return HornClause((), head)


def format_clause(clause: HornClause) -> str:
    """Program-line form: the `=>` is printed even for facts."""
    body = ", ".join(str(b) for b in clause.body)
    return f"{body} => {clause.head}" if body else f"=> {clause.head}"


def format_formula(clause: HornClause) -> str:
    """Query form: an atomic formula prints as a bare atom."""
    if clause.is_atomic:
        return str(clause.head)
    return format_clause(clause)


def term_depth(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + max((term_depth(a) for a in t.args), default=0)


def term_vars(t: Term, out: Optional[list[str]] = None) -> list[str]:
    """Variable names in first-occurrence order."""
    if out is None:
        out = []
    if isinstance(t, Var):
        if t.name not in out:
            out.append(t.name)
    else:
        for a in t.args:
            term_vars(a, out)
    return out


def atom_vars(a: Atom, out: Optional[list[str]] = None) -> list[str]:
    if out is None:
        out = []
    for t in a.args:
        term_vars(t, out)
    return out


def clause_vars(c: HornClause) -> list[str]:
    out = atom_vars(c.head)
    for b in c.body:
        atom_vars(b, out)
    return out


def is_ground_term(t: Term) -> bool:
    if isinstance(t, Var):
        return False
    return all(is_ground_term(a) for a in t.args)


def is_ground_atom(a: Atom) -> bool:
    return all(is_ground_term(t) for t in a.args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def term_sort_key(t: Term):
    """Deterministic order: depth first, then name, then arguments."""
    if isinstance(t, Var):
        return (1, t.name, ())
    return (term_depth(t), t.functor, tuple(term_sort_key(a) for a in t.args))


def atom_sort_key(a: Atom):
    return (a.predicate, tuple(term_sort_key(t) for t in a.args))


# ---------------------------------------------------------------------------
# Substitutions
# ---------------------------------------------------------------------------

Subst = dict  # variable name -> Term


def apply_term(s: Mapping[str, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return s.get(t.name, t)
    if not t.args:
        return t
    return App(t.functor, tuple(apply_term(s, a) for a in t.args))


def apply_atom(s: Mapping[str, Term], a: Atom) -> Atom:
    if not a.args:
        return a
    return Atom(a.predicate, tuple(apply_term(s, t) for t in a.args))


def apply_clause(s: Mapping[str, Term], c: HornClause) -> HornClause:
    return HornClause(tuple(apply_atom(s, b) for b in c.body), apply_atom(s, c.head))


def compose(s: Mapping[str, Term], t: Mapping[str, Term]) -> Subst:
    """compose(s, t) applied to x equals s applied to (t applied to x)."""
    out: Subst = {}
    for v, term in t.items():
        mapped = apply_term(s, term)
        if mapped != Var(v):
            out[v] = mapped
    for v, term in s.items():
        if v not in t and term != Var(v):
            out[v] = term
    return out


def format_subst(s: Mapping[str, Term]) -> str:
    inner = ", ".join(f"{v} -> {s[v]}" for v in sorted(s))
    return "{" + inner + "}"


# ---------------------------------------------------------------------------
# Matching and unification
# ---------------------------------------------------------------------------


def _match_term(pattern: Term, target: Term, bindings: Subst) -> bool:
    if isinstance(pattern, Var):
        if pattern.name in bindings:
            return bindings[pattern.name] == target
        bindings[pattern.name] = target
        return True
    if isinstance(target, Var):
        # Matching is one-directional: the target is never instantiated.
        return False
    if pattern.functor != target.functor:
        return False
    if len(pattern.args) != len(target.args):
        raise SignatureError(
            f"functor {pattern.functor} used with arities "
            f"{len(pattern.args)} and {len(target.args)}"
        )
    return all(_match_term(p, t, bindings) for p, t in zip(pattern.args, target.args))


def match(pattern: Atom, target: Atom) -> Optional[Subst]:
    """Matcher s with s(pattern) == target, or None.

    Only pattern variables are bound; failure is a normal result.  An arity
    clash under a shared predicate or functor raises SignatureError.
    """
    if pattern.predicate != target.predicate:
        return None
    if len(pattern.args) != len(target.args):
        raise SignatureError(
            f"predicate {pattern.predicate} used with arities "
            f"{len(pattern.args)} and {len(target.args)}"
        )
    bindings: Subst = {}
    for p, t in zip(pattern.args, target.args):
        if not _match_term(p, t, bindings):
            return None
    return {v: t for v, t in bindings.items() if t != Var(v)}


def _walk(t: Term, s: Subst) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def _occurs(name: str, t: Term, s: Subst) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, s) for a in t.args)


def _unify_term(a: Term, b: Term, s: Subst) -> bool:
    a = _walk(a, s)
    b = _walk(b, s)
    if a == b:
        return True
    if isinstance(a, Var):
        if _occurs(a.name, b, s):
            return False
        s[a.name] = b
        return True
    if isinstance(b, Var):
        return _unify_term(b, a, s)
    if a.functor != b.functor:
        return False
    if len(a.args) != len(b.args):
        raise SignatureError(
            f"functor {a.functor} used with arities {len(a.args)} and {len(b.args)}"
        )
    return all(_unify_term(x, y, s) for x, y in zip(a.args, b.args))


def unifiable(a: Atom, b: Atom) -> bool:
    """First-order unifiability with occurs check (load-time overlap test).

    Callers are expected to rename the atoms apart first.
    """
    if a.predicate != b.predicate:
        return False
    if len(a.args) != len(b.args):
        raise SignatureError(
            f"predicate {a.predicate} used with arities {len(a.args)} and {len(b.args)}"
        )
    s: Subst = {}
    return all(_unify_term(x, y, s) for x, y in zip(a.args, b.args))


def rename_term(t: Term, suffix: str) -> Term:
    if isinstance(t, Var):
        return Var(t.name + suffix)
    return App(t.functor, tuple(rename_term(a, suffix) for a in t.args))


def rename_atom(a: Atom, suffix: str) -> Atom:
    return Atom(a.predicate, tuple(rename_term(t, suffix) for t in a.args))


# ---------------------------------------------------------------------------
# Signatures and programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    functions: Mapping[str, int]
    predicates: Mapping[str, int]

    def constants(self) -> tuple[str, ...]:
        return tuple(sorted(n for n, a in self.functions.items() if a == 0))

    def merged(self, other: "Signature") -> "Signature":
        funcs = dict(self.functions)
        preds = dict(self.predicates)
        for n, a in other.functions.items():
            if funcs.setdefault(n, a) != a:
                raise SignatureError(f"functor {n} used with arities {funcs[n]} and {a}")
        for n, a in other.predicates.items():
            if preds.setdefault(n, a) != a:
                raise SignatureError(f"predicate {n} used with arities {preds[n]} and {a}")
        return Signature(funcs, preds)

    def with_constants(self, names: Iterable[str]) -> "Signature":
        funcs = dict(self.functions)
        for n in names:
            if funcs.setdefault(n, 0) != 0:
                raise SignatureError(f"functor {n} used with arities {funcs[n]} and 0")
        return Signature(funcs, self.predicates)


def _collect_term(t: Term, funcs: dict[str, int]) -> None:
    if isinstance(t, Var):
        return
    if funcs.setdefault(t.functor, len(t.args)) != len(t.args):
        raise SignatureError(
            f"functor {t.functor} used with arities {funcs[t.functor]} and {len(t.args)}"
        )
    for a in t.args:
        _collect_term(a, funcs)


def _collect_atom(a: Atom, funcs: dict[str, int], preds: dict[str, int]) -> None:
    if preds.setdefault(a.predicate, len(a.args)) != len(a.args):
        raise SignatureError(
            f"predicate {a.predicate} used with arities {preds[a.predicate]} and {len(a.args)}"
        )
    for t in a.args:
        _collect_term(t, funcs)


def signature_of_atom(a: Atom) -> Signature:
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}
    _collect_atom(a, funcs, preds)
    return Signature(funcs, preds)


def signature_of_clause(c: HornClause) -> Signature:
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}
    _collect_atom(c.head, funcs, preds)
    for b in c.body:
        _collect_atom(b, funcs, preds)
    return Signature(funcs, preds)


@dataclass(frozen=True)
class Program:
    """A validated clause list.

    Clauses up to `axiom_count` are axioms and must satisfy the type-class
    restrictions: pairwise non-unifiable heads and no existential variables.
    Clauses beyond `axiom_count` are transformation-added (lemma) clauses;
    they are exempt from the overlap restriction but still may not have
    existential variables.
    """

    clauses: tuple[HornClause, ...]
    axiom_count: int = -1
    signature: Signature = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.axiom_count < 0:
            object.__setattr__(self, "axiom_count", len(self.clauses))
        funcs: dict[str, int] = {}
        preds: dict[str, int] = {}
        for c in self.clauses:
            _collect_atom(c.head, funcs, preds)
            for b in c.body:
                _collect_atom(b, funcs, preds)
        object.__setattr__(self, "signature", Signature(funcs, preds))
        for c in self.clauses:
            head_vars = atom_vars(c.head)
            loose = [v for b in c.body for v in atom_vars(b) if v not in head_vars]
            if loose:
                seen: list[str] = []
                for v in loose:
                    if v not in seen:
                        seen.append(v)
                raise ExistentialVariableError(c, seen)
        axioms = self.clauses[: self.axiom_count]
        for i in range(len(axioms)):
            for j in range(i + 1, len(axioms)):
                a = rename_atom(axioms[i].head, "_l")
                b = rename_atom(axioms[j].head, "_r")
                if unifiable(a, b):
                    raise OverlapError(i, j, axioms[i], axioms[j])

    def extended(self, *clauses: HornClause) -> "Program":
        """Add clauses exempt from the overlap restriction."""
        return Program(self.clauses + tuple(clauses), self.axiom_count)


# ---------------------------------------------------------------------------
# Ground enumeration
# ---------------------------------------------------------------------------


def enumerate_ground_terms(
    sig: Signature, depth: int, *, allow_empty: bool = False
) -> list[Term]:
    """All ground terms of depth <= depth, ordered by depth, functor, args."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    funcs = sorted(sig.functions.items())
    layer: list[Term] = [App(n) for n, a in funcs if a == 0]
    if not layer:
        if allow_empty:
            return []
        raise EmptyUniverseError("signature has no constants; the Herbrand universe is empty")
    result: list[Term] = list(layer)
    depths: dict[Term, int] = {t: 1 for t in layer}
    for k in range(2, depth + 1):
        layer = []
        for name, arity in funcs:
            if arity == 0:
                continue
            for args in product(result, repeat=arity):
                if max(depths[a] for a in args) == k - 1:
                    layer.append(App(name, args))
        if not layer:
            break
        for t in layer:
            depths[t] = k
        result.extend(layer)
    return result


def ground_instances(clause: HornClause, universe: Sequence[Term]) -> list[HornClause]:
    """All instantiations of the clause's variables over the universe."""
    names = clause_vars(clause)
    if not names:
        return [clause]
    out = []
    for combo in product(universe, repeat=len(names)):
        s = dict(zip(names, combo))
        out.append(apply_clause(s, clause))
    return out
