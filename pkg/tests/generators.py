"""Shared randomized-input helpers for the test suite."""

from __future__ import annotations

import random

from kedl import KnowledgeBase, Signature
from kedl.syntax import (
    And,
    Atom,
    Bot,
    ConceptExpr,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    RoleKind,
    RoleName,
    Sort,
    Top,
)

P = RoleName("p", RoleKind.OBJ_OBJ)
Q = RoleName("q", RoleKind.ATTR_ATTR)
R = RoleName("r", RoleKind.CROSS)
R_INV = RoleName("r", RoleKind.CROSS_INVERSE)


def diff_signature() -> Signature:
    """2 object atoms, 2 attribute atoms, one role of each family."""
    sig = Signature()
    sig.declare_atom("C1", Sort.OBJECT)
    sig.declare_atom("C2", Sort.OBJECT)
    sig.declare_atom("A1", Sort.ATTRIBUTE)
    sig.declare_atom("A2", Sort.ATTRIBUTE)
    sig.declare_role("p", RoleKind.OBJ_OBJ)
    sig.declare_role("q", RoleKind.ATTR_ATTR)
    sig.declare_role("r", RoleKind.CROSS)
    return sig


def empty_diff_kb() -> KnowledgeBase:
    return KnowledgeBase(sig=diff_signature())


def _leaves(sort: Sort, negated: bool) -> list[ConceptExpr]:
    atoms = ("C1", "C2") if sort is Sort.OBJECT else ("A1", "A2")
    leaves: list[ConceptExpr] = [Atom(a) for a in atoms] + [Top(), Bot()]
    if negated:
        leaves += [Not(Atom(a)) for a in atoms]
    return leaves


def _roles_for(sort: Sort) -> list[RoleName]:
    return [P, R] if sort is Sort.OBJECT else [Q, R_INV]


def gen_nnf(rng: random.Random, sort: Sort, depth: int) -> ConceptExpr:
    """A random well-sorted concept already in negation normal form."""
    if depth == 0:
        return rng.choice(_leaves(sort, negated=True))
    kind = rng.randrange(8)
    if kind < 2:
        return rng.choice(_leaves(sort, negated=True))
    if kind < 4:
        return And(gen_nnf(rng, sort, depth - 1), gen_nnf(rng, sort, depth - 1))
    if kind < 6:
        return Or(gen_nnf(rng, sort, depth - 1), gen_nnf(rng, sort, depth - 1))
    role = rng.choice(_roles_for(sort))
    body = gen_nnf(rng, role.target_sort, depth - 1)
    return Exists(role, body) if kind == 6 else Forall(role, body)


def gen_concept(rng: random.Random, sort: Sort, depth: int) -> ConceptExpr:
    """A random well-sorted concept; negation and arrows included."""
    if depth == 0:
        return rng.choice(_leaves(sort, negated=False))
    kind = rng.randrange(10)
    if kind < 2:
        return rng.choice(_leaves(sort, negated=False))
    if kind == 2:
        return Not(gen_concept(rng, sort, depth - 1))
    if kind < 5:
        return And(gen_concept(rng, sort, depth - 1), gen_concept(rng, sort, depth - 1))
    if kind < 7:
        return Or(gen_concept(rng, sort, depth - 1), gen_concept(rng, sort, depth - 1))
    if kind == 7:
        return Implies(gen_concept(rng, sort, depth - 1), gen_concept(rng, sort, depth - 1))
    if kind == 8:
        return Iff(gen_concept(rng, sort, depth - 1), gen_concept(rng, sort, depth - 1))
    role = rng.choice(_roles_for(sort))
    body = gen_concept(rng, role.target_sort, depth - 1)
    return Exists(role, body) if rng.randrange(2) == 0 else Forall(role, body)
