"""Bounded model finding by exhaustive search over finite interpretations.

Two entry points with different jobs:

* :func:`enumerate_interpretations` -- the plain product enumeration of every
  interpretation up to the bounds, in a fixed deterministic order.  No
  deduplication, no cleverness; small enough to audit by eye.  Used for model
  counting and extension-equality sweeps at tiny bounds.

* :func:`find_model` -- exhaustive search over the same space, organized as a
  depth-first assignment of one symbol slice at a time (individuals, then
  atom extensions, then role successor rows) with interval-based pruning:
  a partial assignment is abandoned only when every completion is already
  doomed.  This is what makes ``NoModelUpToBound`` verdicts at bounds (3,3)
  affordable.  Every returned model is re-checked with the exact evaluator
  before being emitted, so pruning bugs cannot fabricate a Model verdict;
  the pruning itself is property-tested against the plain enumeration.

Verdicts are always bound-qualified: the search never claims unsatisfiability
beyond the domain sizes it actually visited.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .kb import (
    AssertionFormula,
    ConceptAssertion,
    Equivalence,
    Formula,
    Inclusion,
    KnowledgeBase,
    RoleAssertion,
    combined_sort,
)
from .semantics import (
    FormulaReading,
    FunctionalityMode,
    Interpretation,
    extension,
    satisfies_formula,
    satisfies_kb,
    validate_interpretation,
)
from .syntax import (
    And,
    Atom,
    Bot,
    ConceptExpr,
    Exists,
    Forall,
    KedlError,
    Not,
    Or,
    RoleKind,
    RoleName,
    Signature,
    Sort,
    Top,
    check_sort,
    desugar,
    subexprs,
)


@dataclass(frozen=True)
class Bounds:
    max_delta: int = 2
    max_sigma: int = 2
    mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE

    def __post_init__(self) -> None:
        if self.max_delta < 1 or self.max_sigma < 1:
            raise ValueError("domains are non-empty: bounds must be at least (1,1)")

    def __str__(self) -> str:
        return f"({self.max_delta},{self.max_sigma},{self.mode})"


@dataclass(frozen=True)
class Model:
    interpretation: Interpretation


@dataclass(frozen=True)
class NoModelUpToBound:
    bounds: Bounds


@dataclass(frozen=True)
class Countermodel:
    interpretation: Interpretation


@dataclass(frozen=True)
class NoCountermodelUpToBound:
    bounds: Bounds


SatVerdict = Union[Model, NoModelUpToBound]
ValidityVerdict = Union[Countermodel, NoCountermodelUpToBound]


def _subsets(n: int) -> list[frozenset[int]]:
    """All subsets of range(n) in ascending bitmask order (empty set first)."""
    return [frozenset(k for k in range(n) if m >> k & 1) for m in range(1 << n)]


def _cross_rows(s: int, mode: FunctionalityMode) -> list[frozenset[int]]:
    """Successor-set choices for one object element under a cross role."""
    if mode is FunctionalityMode.EXACTLY_ONE:
        return [frozenset({u}) for u in range(s)]
    if mode is FunctionalityMode.AT_MOST_ONE:
        return [frozenset()] + [frozenset({u}) for u in range(s)]
    return _subsets(s)


def enumerate_interpretations(sig: Signature, bounds: Bounds) -> Iterator[Interpretation]:
    """Every interpretation over ``sig`` with domain sizes up to the bounds.

    Deterministic order: domain sizes ascend (object-major), then one axis
    per atom, role row, and individual, rightmost varying fastest.  Nothing
    is deduplicated.
    """
    for d in range(1, bounds.max_delta + 1):
        for s in range(1, bounds.max_sigma + 1):
            yield from _enumerate_at(sig, d, s, bounds.mode)


def _enumerate_at(sig: Signature, d: int, s: int, mode: FunctionalityMode) -> Iterator[Interpretation]:
    obj_atoms = sorted(sig.object_atoms)
    attr_atoms = sorted(sig.attribute_atoms)
    roles = sorted(sig.roles)
    inds = sorted(sig.individuals)

    axes: list[list] = []
    axes.extend([_subsets(d)] * len(obj_atoms))
    axes.extend([_subsets(s)] * len(attr_atoms))
    for name in roles:
        kind = sig.roles[name]
        if kind is RoleKind.OBJ_OBJ:
            pairs = [(a, b) for a in range(d) for b in range(d)]
            axes.append([frozenset(pairs[k] for k in range(len(pairs)) if m >> k & 1)
                         for m in range(1 << len(pairs))])
        elif kind is RoleKind.ATTR_ATTR:
            pairs = [(a, b) for a in range(s) for b in range(s)]
            axes.append([frozenset(pairs[k] for k in range(len(pairs)) if m >> k & 1)
                         for m in range(1 << len(pairs))])
        else:  # cross: one successor-set choice per object element
            per_row = _cross_rows(s, mode)
            axes.append([
                frozenset((x, u) for x, row in enumerate(combo) for u in row)
                for combo in itertools.product(per_row, repeat=d)
            ])
    for name in inds:
        axes.append(list(range(d if sig.individuals[name] is Sort.OBJECT else s)))

    for combo in itertools.product(*axes):
        pos = 0
        concept_ext: dict[str, frozenset[int]] = {}
        for name in obj_atoms + attr_atoms:
            concept_ext[name] = combo[pos]
            pos += 1
        role_ext: dict[str, frozenset[tuple[int, int]]] = {}
        for name in roles:
            role_ext[name] = combo[pos]
            pos += 1
        ind_map: dict[str, int] = {}
        for name in inds:
            ind_map[name] = combo[pos]
            pos += 1
        yield Interpretation(
            sig=sig, n_delta=d, n_sigma=s,
            concept_ext=concept_ext, role_ext=role_ext, ind_map=ind_map, mode=mode,
        )


def count_models(e: ConceptExpr, sig: Signature, bounds: Bounds) -> int:
    """Number of enumerated interpretations with a non-empty extension for e."""
    sort = check_sort(e, sig)
    return sum(
        1 for i in enumerate_interpretations(sig, bounds) if extension(e, i, sort)
    )


# --- Pruned exhaustive search -------------------------------------------------


class _Level:
    """One decision in the search: a symbol slice and its candidate values."""

    __slots__ = ("kind", "name", "row", "choices")

    def __init__(self, kind: str, name: str, row: Optional[int], choices: list) -> None:
        self.kind = kind  # "ind" | "atom" | "row"
        self.name = name
        self.row = row
        self.choices = choices


class _Search:
    """Depth-first assignment of interpretation components at fixed sizes.

    Symbols not mentioned by the goal are frozen to canonical values up
    front (empty extensions; for cross roles under EXACTLY_ONE, the constant
    successor 0) and never enumerated.
    """

    def __init__(
        self,
        sig: Signature,
        d: int,
        s: int,
        mode: FunctionalityMode,
        used_atoms: set[str],
        used_roles: set[str],
        used_inds: set[str],
    ) -> None:
        self.sig = sig
        self.d = d
        self.s = s
        self.mode = mode
        self.atom_ext: dict[str, Optional[frozenset[int]]] = {}
        self.role_rows: dict[str, list[Optional[frozenset[int]]]] = {}
        self.inds: dict[str, Optional[int]] = {}
        self.levels: list[_Level] = []

        for name in sorted(sig.individuals):
            if name in used_inds:
                self.inds[name] = None
                size = d if sig.individuals[name] is Sort.OBJECT else s
                self.levels.append(_Level("ind", name, None, list(range(size))))
            else:
                self.inds[name] = 0

        for name in sorted(sig.object_atoms):
            self._add_atom(name, d, name in used_atoms)
        for name in sorted(sig.attribute_atoms):
            self._add_atom(name, s, name in used_atoms)

        # row assignment order: attribute roles, then cross, then object
        # roles -- deepest-nested symbols first, so contradictions surface
        # before the outer role rows multiply the search
        by_kind = {RoleKind.ATTR_ATTR: [], RoleKind.CROSS: [], RoleKind.OBJ_OBJ: []}
        for name in sorted(sig.roles):
            by_kind[sig.roles[name]].append(name)
        for kind in (RoleKind.ATTR_ATTR, RoleKind.CROSS, RoleKind.OBJ_OBJ):
            for name in by_kind[kind]:
                n_rows = s if kind is RoleKind.ATTR_ATTR else d
                if kind is RoleKind.OBJ_OBJ:
                    choices = _subsets(d)
                elif kind is RoleKind.ATTR_ATTR:
                    choices = _subsets(s)
                else:
                    choices = _cross_rows(s, mode)
                if name in used_roles:
                    self.role_rows[name] = [None] * n_rows
                    for row in range(n_rows):
                        self.levels.append(_Level("row", name, row, choices))
                else:
                    self.role_rows[name] = [choices[0]] * n_rows

    def _add_atom(self, name: str, size: int, used: bool) -> None:
        if used:
            self.atom_ext[name] = None
            self.levels.append(_Level("atom", name, None, _subsets(size)))
        else:
            self.atom_ext[name] = frozenset()

    # -- interval evaluation ----------------------------------------------

    def domain(self, sort: Sort) -> frozenset[int]:
        return frozenset(range(self.d if sort is Sort.OBJECT else self.s))

    def concept_bounds(self, e: ConceptExpr, sort: Sort) -> tuple[frozenset[int], frozenset[int]]:
        """(lower, upper): elements in e under every / at least one completion."""
        dom = self.domain(sort)
        if isinstance(e, Top):
            return dom, dom
        if isinstance(e, Bot):
            return frozenset(), frozenset()
        if isinstance(e, Atom):
            ext = self.atom_ext[e.name]
            if ext is None:
                return frozenset(), dom
            return ext, ext
        if isinstance(e, Not):
            lb, ub = self.concept_bounds(e.expr, sort)
            return dom - ub, dom - lb
        if isinstance(e, And):
            l1, u1 = self.concept_bounds(e.left, sort)
            l2, u2 = self.concept_bounds(e.right, sort)
            return l1 & l2, u1 & u2
        if isinstance(e, Or):
            l1, u1 = self.concept_bounds(e.left, sort)
            l2, u2 = self.concept_bounds(e.right, sort)
            return l1 | l2, u1 | u2
        if isinstance(e, (Exists, Forall)):
            return self._quantifier_bounds(e, sort)
        raise KedlError(f"arrows must be desugared before the search: {e!r}")

    def _quantifier_bounds(self, e, sort: Sort) -> tuple[frozenset[int], frozenset[int]]:
        role: RoleName = e.role
        tgt = role.target_sort
        clb, cub = self.concept_bounds(e.expr, tgt)
        tgt_dom = self.domain(tgt)
        src_dom = self.domain(role.source_sort)
        existential = isinstance(e, Exists)

        if role.kind is RoleKind.CROSS_INVERSE:
            rows = self.role_rows[role.name]
            lower, upper = set(), set()
            for u in src_dom:
                known = [x for x in range(self.d) if rows[x] is not None and u in rows[x]]
                possible = known + [x for x in range(self.d) if rows[x] is None]
                if existential:
                    if any(x in clb for x in known):
                        lower.add(u)
                    if any(x in cub for x in possible):
                        upper.add(u)
                else:
                    if all(x in clb for x in possible):
                        lower.add(u)
                    if all(x in cub for x in known):
                        upper.add(u)
            return frozenset(lower), frozenset(upper)

        rows = self.role_rows[role.name]
        total = role.kind is RoleKind.CROSS and self.mode is FunctionalityMode.EXACTLY_ONE
        lower, upper = set(), set()
        for x in src_dom:
            row = rows[x]
            if row is not None:
                if existential:
                    if any(y in clb for y in row):
                        lower.add(x)
                    if any(y in cub for y in row):
                        upper.add(x)
                else:
                    if all(y in clb for y in row):
                        lower.add(x)
                    if all(y in cub for y in row):
                        upper.add(x)
            else:
                # unassigned row: quantify over every still-possible choice
                if total:
                    if clb == tgt_dom:
                        lower.add(x)
                    if cub:
                        upper.add(x)
                elif existential:
                    if cub:
                        upper.add(x)
                else:
                    if clb == tgt_dom:
                        lower.add(x)
                    upper.add(x)  # the empty row is possible: vacuously true
        return frozenset(lower), frozenset(upper)

    # -- assembling interpretations ----------------------------------------

    def build(self) -> Interpretation:
        concept_ext = {n: (x if x is not None else frozenset()) for n, x in self.atom_ext.items()}
        role_ext = {}
        for name, rows in self.role_rows.items():
            role_ext[name] = frozenset(
                (x, y) for x, row in enumerate(rows) if row is not None for y in row
            )
        ind_map = {n: (v if v is not None else 0) for n, v in self.inds.items()}
        return Interpretation(
            sig=self.sig, n_delta=self.d, n_sigma=self.s,
            concept_ext=concept_ext, role_ext=role_ext, ind_map=ind_map, mode=self.mode,
        )

    def complete_with_defaults(self, level_idx: int) -> None:
        for level in self.levels[level_idx:]:
            if level.kind == "ind" and self.inds[level.name] is None:
                self.inds[level.name] = level.choices[0]
            elif level.kind == "atom" and self.atom_ext[level.name] is None:
                self.atom_ext[level.name] = level.choices[0]
            elif level.kind == "row" and self.role_rows[level.name][level.row] is None:
                self.role_rows[level.name][level.row] = level.choices[0]


class _Objective:
    """What the search is after, with three-way partial verdicts."""

    def status(self, search: _Search) -> Optional[bool]:
        """True: every completion succeeds; False: none can; None: open."""
        raise NotImplementedError

    def holds_exactly(self, i: Interpretation) -> bool:
        raise NotImplementedError


class _ConceptObjective(_Objective):
    def __init__(self, goal: ConceptExpr, sort: Sort) -> None:
        self.goal = desugar(goal)
        self.sort = sort

    def status(self, search: _Search) -> Optional[bool]:
        lb, ub = search.concept_bounds(self.goal, self.sort)
        if lb:
            return True
        if not ub:
            return False
        return None

    def holds_exactly(self, i: Interpretation) -> bool:
        return bool(extension(self.goal, i, self.sort))


class _KbObjective(_Objective):
    def __init__(self, kb: KnowledgeBase) -> None:
        self.kb = kb
        self.formulas: list[Formula] = []
        for f in kb.formulas():
            if isinstance(f, Inclusion):
                self.formulas.append(
                    Inclusion(desugar(f.left), desugar(f.right), _stated_sort(f, kb.sig)))
            elif isinstance(f, Equivalence):
                self.formulas.append(
                    Equivalence(desugar(f.left), desugar(f.right), _stated_sort(f, kb.sig)))
            else:
                self.formulas.append(f)

    def status(self, search: _Search) -> Optional[bool]:
        all_definite = True
        for f in self.formulas:
            verdict = self._formula_status(search, f)
            if verdict is False:
                return False
            if verdict is None:
                all_definite = False
        return True if all_definite else None

    def _formula_status(self, search: _Search, f: Formula) -> Optional[bool]:
        if isinstance(f, AssertionFormula):
            return self._assertion_status(search, f.assertion)
        sort = f.sort
        assert sort is not None
        llb, lub = search.concept_bounds(f.left, sort)
        rlb, rub = search.concept_bounds(f.right, sort)
        if isinstance(f, Inclusion):
            if llb - rub:
                return False
            if lub <= rlb:
                return True
            return None
        if llb - rub or rlb - lub:
            return False
        if lub <= rlb and rub <= llb:
            return True
        return None

    def _assertion_status(self, search: _Search, a) -> Optional[bool]:
        if isinstance(a, ConceptAssertion):
            el = search.inds[a.individual]
            if el is None:
                return None
            sort = search.sig.individuals[a.individual]
            lb, ub = search.concept_bounds(desugar(a.concept), sort)
            if el in lb:
                return True
            if el not in ub:
                return False
            return None
        assert isinstance(a, RoleAssertion)
        src, tgt = search.inds[a.source], search.inds[a.target]
        if src is None or tgt is None:
            return None
        if a.role.kind is RoleKind.CROSS_INVERSE:
            src, tgt = tgt, src
        row = search.role_rows[a.role.name][src]
        if row is None:
            return None
        return tgt in row

    def holds_exactly(self, i: Interpretation) -> bool:
        return satisfies_kb(i, self.kb)


def _stated_sort(f, sig: Signature) -> Sort:
    return combined_sort(f.left, f.right, sig, hint=f.sort)


def _used_symbols(exprs: list[ConceptExpr], kb: Optional[KnowledgeBase] = None):
    atoms: set[str] = set()
    roles: set[str] = set()
    inds: set[str] = set()
    for e in exprs:
        for sub in subexprs(e):
            if isinstance(sub, Atom):
                atoms.add(sub.name)
            elif isinstance(sub, (Exists, Forall)):
                roles.add(sub.role.name)
    if kb is not None:
        for a in kb.abox:
            if isinstance(a, ConceptAssertion):
                inds.add(a.individual)
            else:
                roles.add(a.role.name)
                inds.update((a.source, a.target))
    return atoms, roles, inds


def find_model(
    goal: Union[ConceptExpr, KnowledgeBase],
    bounds: Bounds,
    sig: Optional[Signature] = None,
    sort: Optional[Sort] = None,
) -> SatVerdict:
    """Search for an interpretation within the bounds.

    For a concept goal, a model is an interpretation with a non-empty
    extension for it (``sig`` is required).  For a knowledge base, a model
    satisfies every definition, inclusion (universal reading), and assertion.
    """
    if isinstance(goal, KnowledgeBase):
        sig = goal.sig
        objective: _Objective = _KbObjective(goal)
        exprs = [desugar(f.left) for f in objective.formulas if not isinstance(f, AssertionFormula)]
        exprs += [desugar(f.right) for f in objective.formulas if not isinstance(f, AssertionFormula)]
        exprs += [desugar(a.concept) for a in goal.abox if isinstance(a, ConceptAssertion)]
        used = _used_symbols(exprs, kb=goal)
    else:
        if sig is None:
            raise KedlError("a signature is required to search for concept models")
        goal_sort = check_sort(goal, sig, expected=sort)
        objective = _ConceptObjective(goal, goal_sort)
        used = _used_symbols([desugar(goal)])

    for d in range(1, bounds.max_delta + 1):
        for s in range(1, bounds.max_sigma + 1):
            found = _search_at(sig, d, s, bounds.mode, objective, used)
            if found is not None:
                _require(validate_interpretation(found) == [], "search returned an invalid interpretation")
                _require(objective.holds_exactly(found), "search returned a non-model")
                return Model(found)
    return NoModelUpToBound(bounds)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise KedlError(f"internal oracle error: {message}")


def _search_at(sig, d, s, mode, objective: _Objective, used) -> Optional[Interpretation]:
    used_atoms, used_roles, used_inds = used
    search = _Search(sig, d, s, mode, used_atoms, used_roles, used_inds)

    def dfs(level_idx: int) -> Optional[Interpretation]:
        status = objective.status(search)
        if status is False:
            return None
        if status is True:
            search.complete_with_defaults(level_idx)
            return search.build()
        if level_idx == len(search.levels):
            i = search.build()
            return i if objective.holds_exactly(i) else None
        level = search.levels[level_idx]
        for choice in level.choices:
            if level.kind == "ind":
                search.inds[level.name] = choice
            elif level.kind == "atom":
                search.atom_ext[level.name] = choice
            else:
                search.role_rows[level.name][level.row] = choice
            result = dfs(level_idx + 1)
            if result is not None:
                return result
        if level.kind == "ind":
            search.inds[level.name] = None
        elif level.kind == "atom":
            search.atom_ext[level.name] = None
        else:
            search.role_rows[level.name][level.row] = None
        return None

    return dfs(0)


def check_validity_bounded(f: Formula, bounds: Bounds, sig: Signature) -> ValidityVerdict:
    """Look for an interpretation where the formula fails (universal reading).

    Dual to :func:`find_model`: an inclusion has a countermodel exactly when
    ``left and not right`` has a model at the same bounds.
    """
    if isinstance(f, AssertionFormula):
        for i in enumerate_interpretations(sig, bounds):
            if not satisfies_formula(i, f, FormulaReading.UNIVERSAL):
                return Countermodel(i)
        return NoCountermodelUpToBound(bounds)

    sort = _stated_sort(f, sig)
    candidates = [And(f.left, Not(f.right))]
    if isinstance(f, Equivalence):
        candidates.append(And(f.right, Not(f.left)))
    for concept in candidates:
        verdict = find_model(concept, bounds, sig=sig, sort=sort)
        if isinstance(verdict, Model):
            i = verdict.interpretation
            _require(
                not satisfies_formula(i, f, FormulaReading.UNIVERSAL),
                "countermodel satisfies the formula",
            )
            return Countermodel(i)
    return NoCountermodelUpToBound(bounds)
