"""Executable model theory over depth-bounded Herbrand bases.

The true semantic operator ranges over an infinite base whenever the
signature has a non-constant functor, so every computation here is relative
to a bounded base (all ground atoms whose terms have depth <= d) plus a
boundary policy for clause instances whose body mentions atoms beyond the
base:

  PESSIMISTIC  out-of-base body atoms count as absent; the instance is mute.
  OPTIMISTIC   out-of-base body atoms count as present.

Guarantees, relative to the true models:

  * the pessimistic computations under-approximate: lfp contains only
    genuinely derivable atoms, and the pessimistic gfp is a post-fixed
    point of the true operator, hence inside the true greatest model;
  * the optimistic computations over-approximate: the true least or
    greatest model restricted to the base is contained in them, so absence
    from an optimistic model is sound evidence of non-membership;
  * a Certificate with an empty frontier is a finite post-fixed point of the
    true operator and therefore a sound membership witness; a non-empty
    frontier means the support leans on out-of-base atoms and certifies
    membership in the bounded optimistic model only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterable, Optional, Sequence

from .terms import (
    Atom,
    HornClause,
    Program,
    Signature,
    Subst,
    Term,
    apply_atom,
    atom_sort_key,
    clause_vars,
    enumerate_ground_terms,
    is_ground_atom,
    signature_of_atom,
    signature_of_clause,
)


class Policy(Enum):
    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"


class Semantics(Enum):
    IND = "inductive"
    COIND = "coinductive"


DEFAULT_MAX_ITERS = 10_000


# ---------------------------------------------------------------------------
# Bases and interpretations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HerbrandBase:
    signature: Signature
    depth: int
    universe: tuple[Term, ...]
    atoms: frozenset[Atom]

    def sorted_atoms(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.atoms, key=atom_sort_key))


def herbrand_base(
    signature: Signature, depth: int, extra_constants: Iterable[str] = ()
) -> HerbrandBase:
    sig = signature.with_constants(extra_constants)
    universe = tuple(enumerate_ground_terms(sig, depth, allow_empty=True))
    atoms: set[Atom] = set()
    for pred, arity in sig.predicates.items():
        if arity == 0:
            atoms.add(Atom(pred))
        else:
            for args in product(universe, repeat=arity):
                atoms.add(Atom(pred, args))
    return HerbrandBase(sig, depth, universe, frozenset(atoms))


@dataclass(frozen=True)
class Interpretation:
    atoms: frozenset[Atom]
    base: HerbrandBase
    converged: bool = True

    def sorted_atoms(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.atoms, key=atom_sort_key))


def empty_interpretation(base: HerbrandBase) -> Interpretation:
    return Interpretation(frozenset(), base)


def full_interpretation(base: HerbrandBase) -> Interpretation:
    return Interpretation(base.atoms, base)


# ---------------------------------------------------------------------------
# The semantic operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _GroundInstance:
    head: Atom
    in_base: tuple[Atom, ...]
    out_of_base: tuple[Atom, ...]


def _ground_program(program: Program, base: HerbrandBase) -> list[_GroundInstance]:
    """All clause instances with an in-base head, bodies split by the base."""
    out: list[_GroundInstance] = []
    for clause in program.clauses:
        names = clause_vars(clause)
        assignments = (
            product(base.universe, repeat=len(names)) if names else iter(((),))
        )
        for combo in assignments:
            s = dict(zip(names, combo))
            head = apply_atom(s, clause.head)
            if head not in base.atoms:
                continue
            body = tuple(apply_atom(s, b) for b in clause.body)
            inside = tuple(b for b in body if b in base.atoms)
            outside = tuple(b for b in body if b not in base.atoms)
            out.append(_GroundInstance(head, inside, outside))
    return out


def _step(
    instances: Sequence[_GroundInstance], atoms: frozenset[Atom], policy: Policy
) -> frozenset[Atom]:
    produced = set()
    for inst in instances:
        if inst.out_of_base and policy is Policy.PESSIMISTIC:
            continue
        if all(b in atoms for b in inst.in_base):
            produced.add(inst.head)
    return frozenset(produced)


def tp_step(
    program: Program, interp: Interpretation, policy: Policy = Policy.PESSIMISTIC
) -> Interpretation:
    """One application of the bounded one-step consequence operator."""
    instances = _ground_program(program, interp.base)
    return Interpretation(_step(instances, interp.atoms, policy), interp.base)


def _iterate(
    program: Program,
    base: HerbrandBase,
    start: frozenset[Atom],
    policy: Policy,
    max_iters: int,
) -> Interpretation:
    instances = _ground_program(program, base)
    current = start
    for _ in range(max_iters):
        nxt = _step(instances, current, policy)
        if nxt == current:
            return Interpretation(current, base, converged=True)
        current = nxt
    return Interpretation(current, base, converged=False)


def lfp(
    program: Program,
    depth: int,
    *,
    max_iters: int = DEFAULT_MAX_ITERS,
    extra_constants: Iterable[str] = (),
) -> Interpretation:
    """Least fixed point of the bounded operator, iterated up from empty."""
    base = herbrand_base(program.signature, depth, extra_constants)
    return _iterate(program, base, frozenset(), Policy.PESSIMISTIC, max_iters)


def gfp_bounded(
    program: Program,
    depth: int,
    policy: Policy = Policy.PESSIMISTIC,
    *,
    max_iters: int = DEFAULT_MAX_ITERS,
    extra_constants: Iterable[str] = (),
) -> Interpretation:
    """Greatest fixed point of the bounded operator, iterated down from full."""
    base = herbrand_base(program.signature, depth, extra_constants)
    return _iterate(program, base, base.atoms, policy, max_iters)


def tp_monotone_check(
    program: Program,
    i: Interpretation,
    j: Interpretation,
    policy: Policy = Policy.PESSIMISTIC,
) -> bool:
    if i.base != j.base:
        raise ValueError("interpretations must share a base")
    if not i.atoms <= j.atoms:
        raise ValueError("monotonicity check requires i.atoms <= j.atoms")
    return tp_step(program, i, policy).atoms <= tp_step(program, j, policy).atoms


# ---------------------------------------------------------------------------
# Greatest-model membership certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """A support set S with target in S and S <= T_P(S) under the bounded
    optimistic operator.  `frontier` lists the out-of-base body atoms the
    support leans on; when it is empty the certificate is a post-fixed point
    of the true operator and hence a sound witness of greatest-model
    membership."""

    target: Atom
    support: frozenset[Atom]
    frontier: frozenset[Atom]
    depth: int

    @property
    def exact(self) -> bool:
        return not self.frontier

    def sorted_support(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.support, key=atom_sort_key))

    def sorted_frontier(self) -> tuple[Atom, ...]:
        return tuple(sorted(self.frontier, key=atom_sort_key))


class CertificateInvariantError(Exception):
    """Internal re-validation of a certificate failed (an oracle bug)."""


def certify_gfp(
    program: Program,
    target: Atom,
    search_depth: int,
    *,
    extra_constants: Iterable[str] = (),
) -> Optional[Certificate]:
    """Search for a finite support set witnessing membership of `target`.

    The signature is extended with the target's own symbols, so targets may
    mention constants that the program never writes down.  Returns None when
    no support exists within the bound; that is not a proof of absence.
    """
    if not is_ground_atom(target):
        raise ValueError("certificate targets must be ground atoms")
    sig = program.signature.merged(signature_of_atom(target))
    base = herbrand_base(sig, search_depth, extra_constants)
    if target not in base.atoms:
        return None
    instances = _ground_program(program, base)
    model = _iterate(program, base, base.atoms, Policy.OPTIMISTIC, DEFAULT_MAX_ITERS)
    if target not in model.atoms:
        return None
    by_head: dict[Atom, list[_GroundInstance]] = {}
    for inst in instances:
        by_head.setdefault(inst.head, []).append(inst)
    support: set[Atom] = set()
    frontier: set[Atom] = set()
    queue = [target]
    while queue:
        atom = queue.pop(0)
        if atom in support:
            continue
        support.add(atom)
        chosen = None
        for inst in by_head.get(atom, ()):
            if all(b in model.atoms for b in inst.in_base):
                chosen = inst
                break
        if chosen is None:  # cannot happen for members of the optimistic gfp
            raise CertificateInvariantError(f"no supporting instance for {atom}")
        frontier.update(chosen.out_of_base)
        for b in chosen.in_base:
            if b not in support:
                queue.append(b)
    cert = Certificate(target, frozenset(support), frozenset(frontier), search_depth)
    revalidated = _step(instances, cert.support, Policy.OPTIMISTIC)
    if not cert.support <= revalidated:
        raise CertificateInvariantError("support is not a post-fixed point")
    return cert


# ---------------------------------------------------------------------------
# Validity
# ---------------------------------------------------------------------------


class Verdict(Enum):
    VALID = "VALID"
    INVALID = "INVALID"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ValidityVerdict:
    status: Verdict
    counterexample: Optional[Subst]
    semantics: Semantics
    depth: int
    note: str = ""

    @property
    def is_valid(self) -> bool:
        return self.status is Verdict.VALID


def _groundings(names: Sequence[str], universe: Sequence[Term]):
    if not names:
        yield {}
        return
    if not universe:
        return
    for combo in product(universe, repeat=len(names)):
        yield dict(zip(names, combo))


def valid(
    program: Program,
    formula: HornClause,
    semantics: Semantics,
    depth: int,
    *,
    extra_constants: Iterable[str] = (),
) -> ValidityVerdict:
    """Validity of an atomic or Horn formula in the bounded model.

    Membership is decided three-valued so that verdicts are sound relative
    to the true (unbounded) models: an atom is surely in when the
    pessimistic computation contains it (pessimistic derivations and
    post-fixed points are genuine), surely out when even the optimistic
    over-approximation lacks it, and boundary-uncertain otherwise.  INVALID
    is reported only for a definitive counterexample (bodies surely in,
    head surely out); groundings the bound cannot decide yield UNKNOWN, as
    do formulas with no grounding inside the base.
    """
    sig = program.signature.merged(signature_of_clause(formula))
    base = herbrand_base(sig, depth, extra_constants)
    if semantics is Semantics.IND:
        sure = _iterate(program, base, frozenset(), Policy.PESSIMISTIC, DEFAULT_MAX_ITERS)
        maybe = _iterate(program, base, frozenset(), Policy.OPTIMISTIC, DEFAULT_MAX_ITERS)
    else:
        sure = _iterate(program, base, base.atoms, Policy.PESSIMISTIC, DEFAULT_MAX_ITERS)
        maybe = _iterate(program, base, base.atoms, Policy.OPTIMISTIC, DEFAULT_MAX_ITERS)
    names = clause_vars(formula)
    checked = 0
    undecided = False
    for s in _groundings(names, base.universe):
        head = apply_atom(s, formula.head)
        body = [apply_atom(s, b) for b in formula.body]
        if head not in base.atoms or any(b not in base.atoms for b in body):
            continue
        checked += 1
        if any(b not in maybe.atoms for b in body):
            continue  # some premise surely fails: vacuously satisfied
        if head in sure.atoms:
            continue
        if all(b in sure.atoms for b in body) and head not in maybe.atoms:
            return ValidityVerdict(
                Verdict.INVALID, s, semantics, depth,
                note=f"instance {head} fails at depth {depth}",
            )
        undecided = True
    if checked == 0:
        return ValidityVerdict(
            Verdict.UNKNOWN, None, semantics, depth,
            note="no grounding of the formula fits inside the bounded base",
        )
    if undecided:
        return ValidityVerdict(
            Verdict.UNKNOWN, None, semantics, depth,
            note="some instance is boundary-uncertain at this depth",
        )
    return ValidityVerdict(Verdict.VALID, None, semantics, depth)


# ---------------------------------------------------------------------------
# Model preservation under program transformation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelComparison:
    preserved: bool
    semantics: Semantics
    depth: int
    removed: tuple[Atom, ...]  # in the base program's model only
    added: tuple[Atom, ...]  # in the extended program's model only
    certificates: tuple[tuple[Atom, bool, bool], ...] = ()

    def difference(self) -> tuple[Atom, ...]:
        return tuple(sorted(set(self.removed) | set(self.added), key=atom_sort_key))


def preserves_model(
    program: Program,
    formula: HornClause,
    semantics: Semantics,
    depth: int,
    *,
    extra_constants: Iterable[str] = (),
) -> ModelComparison:
    """Compare the bounded model of P against P extended with `formula`."""
    extended = program.extended(formula)
    base = herbrand_base(extended.signature, depth, extra_constants)
    if semantics is Semantics.IND:
        before = _iterate(program, base, frozenset(), Policy.PESSIMISTIC, DEFAULT_MAX_ITERS)
        after = _iterate(extended, base, frozenset(), Policy.PESSIMISTIC, DEFAULT_MAX_ITERS)
    else:
        before = _iterate(program, base, base.atoms, Policy.OPTIMISTIC, DEFAULT_MAX_ITERS)
        after = _iterate(extended, base, base.atoms, Policy.OPTIMISTIC, DEFAULT_MAX_ITERS)
    removed = tuple(sorted(before.atoms - after.atoms, key=atom_sort_key))
    added = tuple(sorted(after.atoms - before.atoms, key=atom_sort_key))
    certs: list[tuple[Atom, bool, bool]] = []
    if semantics is Semantics.COIND:
        for atom in removed + added:
            in_before = certify_gfp(program, atom, depth, extra_constants=extra_constants)
            in_after = certify_gfp(extended, atom, depth, extra_constants=extra_constants)
            certs.append((atom, in_before is not None, in_after is not None))
    return ModelComparison(
        preserved=not removed and not added,
        semantics=semantics,
        depth=depth,
        removed=removed,
        added=added,
        certificates=tuple(certs),
    )
