"""Tableau decision procedure: satisfiability, consistency, subsumption,
instance checking, and classification.

The engine builds a completion graph of sorted nodes.  TBox inclusions are
internalized per sort (every node of a sort carries ``not L or R`` for each
inclusion of that sort); acyclic definitions are unfolded lazily.  Cross
roles are functional: an object node keeps at most one successor per cross
role (two successors are merged), and under EXACTLY_ONE a successor is
materialized for every declared cross role.

Termination uses pairwise (double) blocking: a generated node is blocked by
an ancestor when both nodes and both their parents carry identical labels
and the connecting edges match.  Subset blocking would be unsound here
because inverse roles propagate constraints upward and functional merging
rewrites edges.  Blocking applies only to nodes created by forward edges;
witnesses created by inverse existentials already own their single cross
edge and never extend the tree through it, so leaving them unblocked keeps
the loop-back model construction functionality-safe without threatening
termination.

Every Satisfiable verdict carries a finite witness interpretation, rebuilt
from the graph (blocked nodes identified with their blockers) and re-checked
with the exact evaluator before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .kb import ConceptAssertion, KnowledgeBase
from .semantics import (
    FunctionalityMode,
    Interpretation,
    extension,
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
    Sort,
    check_sort,
    concept_to_str,
    infer_sort,
    negated_nnf,
    subexprs,
    to_nnf,
)

MAX_TREE_DEPTH = 120
MAX_NODES = 20000


class TableauLimitError(KedlError):
    """The hard expansion budget was hit; inputs are beyond desk scale."""


class InconsistentKBError(KedlError):
    pass


TraceEntry = tuple[str, int, str]  # (rule, node id, concept or role)


def trace_to_text(trace: list[TraceEntry]) -> str:
    return "\n".join(f"{rule}\tn{node}\t{what}" for rule, node, what in trace) + "\n"


@dataclass
class SatResult:
    satisfiable: bool
    witness: Optional[Interpretation] = None
    clash_trace: Optional[list[TraceEntry]] = None
    merged_individuals: list[tuple[str, str]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.satisfiable


class _Node:
    __slots__ = ("id", "sort", "root", "label", "parent", "depth")

    def __init__(self, node_id: int, sort: Sort, root: bool,
                 parent: Optional[tuple[int, str, bool]], depth: int) -> None:
        self.id = node_id
        self.sort = sort
        self.root = root
        self.label: set[ConceptExpr] = set()
        # (parent id, role name, via_inverse); via_inverse means the role
        # edge runs child -> parent (the node witnesses an inverse existential)
        self.parent = parent
        self.depth = depth


class _Graph:
    def __init__(self) -> None:
        self.nodes: dict[int, _Node] = {}
        self.succ: dict[int, dict[str, set[int]]] = {}
        self.ind_node: dict[str, int] = {}
        self.trace: list[TraceEntry] = []
        self.merges: list[tuple[str, str]] = []
        self.next_id = 0

    def new_node(self, sort: Sort, root: bool,
                 parent: Optional[tuple[int, str, bool]] = None) -> _Node:
        depth = 0 if parent is None else self.nodes[parent[0]].depth + 1
        if depth > MAX_TREE_DEPTH or len(self.nodes) >= MAX_NODES:
            raise TableauLimitError("completion graph exceeded its expansion budget")
        node = _Node(self.next_id, sort, root, parent, depth)
        self.next_id += 1
        self.nodes[node.id] = node
        self.succ[node.id] = {}
        return node

    def add_edge(self, src: int, role_name: str, dst: int) -> None:
        self.succ[src].setdefault(role_name, set()).add(dst)

    def successors(self, node_id: int, role_name: str) -> set[int]:
        return self.succ[node_id].get(role_name, set())

    def predecessors(self, node_id: int, role_name: str) -> list[int]:
        return [n for n in sorted(self.succ) if node_id in self.succ[n].get(role_name, ())]

    def adjacent(self, node_id: int, role: RoleName) -> list[int]:
        if role.kind is RoleKind.CROSS_INVERSE:
            return self.predecessors(node_id, role.name)
        return sorted(self.successors(node_id, role.name))

    def clone(self) -> "_Graph":
        g = _Graph()
        g.next_id = self.next_id
        g.ind_node = dict(self.ind_node)
        g.trace = list(self.trace)
        g.merges = list(self.merges)
        for nid, node in self.nodes.items():
            copy = _Node(node.id, node.sort, node.root, node.parent, node.depth)
            copy.label = set(node.label)
            g.nodes[nid] = copy
        g.succ = {nid: {r: set(t) for r, t in targets.items()} for nid, targets in self.succ.items()}
        return g

    def ordered_nodes(self) -> list[_Node]:
        return [self.nodes[i] for i in sorted(self.nodes)]


class Tableau:
    """One reasoning context: a knowledge base plus a functionality mode."""

    def __init__(self, kb: KnowledgeBase, mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE) -> None:
        self.kb = kb
        self.sig = kb.sig
        self.mode = mode
        self.unfold_pos: dict[str, ConceptExpr] = {}
        self.unfold_neg: dict[str, ConceptExpr] = {}
        for name, expr in kb.definitions.items():
            self.unfold_pos[name] = to_nnf(expr)
            self.unfold_neg[name] = negated_nnf(expr)
        self.globals: dict[Sort, list[ConceptExpr]] = {Sort.OBJECT: [], Sort.ATTRIBUTE: []}
        for left, right in kb.inclusions:
            constraint = to_nnf(Or(Not(left), right))
            sort = infer_sort(left, self.sig) or infer_sort(right, self.sig)
            if sort is None:
                # fully polymorphic inclusion (only top/bot): constrain both domains
                self.globals[Sort.OBJECT].append(constraint)
                self.globals[Sort.ATTRIBUTE].append(constraint)
            else:
                self.globals[sort].append(constraint)

    # -- graph construction -------------------------------------------------

    def _init_graph(self, extra: list[tuple[Sort, list[ConceptExpr]]]) -> _Graph:
        g = _Graph()
        for name in sorted(self.sig.individuals):
            node = g.new_node(self.sig.individuals[name], root=True)
            g.ind_node[name] = node.id
            self._seed_label(node)
        for a in self.kb.abox:
            if isinstance(a, ConceptAssertion):
                g.nodes[g.ind_node[a.individual]].label.add(to_nnf(a.concept))
            else:
                src, dst, role = a.source, a.target, a.role
                if role.kind is RoleKind.CROSS_INVERSE:
                    src, dst = dst, src
                g.add_edge(g.ind_node[src], role.name, g.ind_node[dst])
        for sort, concepts in extra:
            node = g.new_node(sort, root=True)
            self._seed_label(node)
            node.label.update(concepts)
        # both domains are non-empty in every model; seed missing sorts so
        # their global constraints are exercised
        for sort in (Sort.OBJECT, Sort.ATTRIBUTE):
            if not any(n.sort is sort for n in g.nodes.values()):
                node = g.new_node(sort, root=True)
                self._seed_label(node)
        return g

    def _seed_label(self, node: _Node) -> None:
        node.label.update(self.globals[node.sort])

    # -- public queries -------------------------------------------------------

    def is_satisfiable(self, expr: ConceptExpr, sort: Optional[Sort] = None) -> SatResult:
        sort = check_sort(expr, self.sig, expected=sort)
        goal = to_nnf(expr)
        g = self._init_graph(extra=[(sort, [goal])])
        return self._run(g, query=(goal, sort))

    def is_consistent(self) -> SatResult:
        g = self._init_graph(extra=[])
        return self._run(g, query=None)

    def subsumes(self, sub: ConceptExpr, sup: ConceptExpr) -> bool:
        left = check_sort(sub, self.sig)
        check_sort(sup, self.sig, expected=left)
        return not self.is_satisfiable(And(sub, Not(sup)), sort=left).satisfiable

    def instance_of(self, individual: str, expr: ConceptExpr) -> bool:
        if individual not in self.sig.individuals:
            raise KedlError(f"undeclared individual: {individual}")
        sort = self.sig.individuals[individual]
        check_sort(expr, self.sig, expected=sort)
        g = self._init_graph(extra=[])
        g.nodes[g.ind_node[individual]].label.add(negated_nnf(expr))
        return not self._run(g, query=None).satisfiable

    # -- expansion loop -------------------------------------------------------

    def _run(self, g: _Graph, query: Optional[tuple[ConceptExpr, Sort]]) -> SatResult:
        result = self._expand(g)
        if not result.satisfiable:
            return result
        witness = result.witness
        assert witness is not None
        problems = validate_interpretation(witness)
        if problems:
            raise KedlError(f"internal tableau error: invalid witness: {problems}")
        if not satisfies_kb(witness, self.kb):
            raise KedlError("internal tableau error: witness does not satisfy the knowledge base")
        if query is not None and not extension(query[0], witness, query[1]):
            raise KedlError("internal tableau error: witness misses the query concept")
        return result

    def _expand(self, g: _Graph) -> SatResult:
        while True:
            clash = self._find_clash(g)
            if clash is not None:
                g.trace.append(clash)
                return SatResult(False, clash_trace=g.trace)

            step = self._find_rule(g)
            if step is None:
                return SatResult(
                    True, witness=self._extract_witness(g), merged_individuals=g.merges)

            kind = step[0]
            if kind == "or":
                _, node, concept = step
                for tag, branch in (("or-left", concept.left), ("or-right", concept.right)):
                    gg = g.clone()
                    gg.trace.append((tag, node.id, concept_to_str(branch)))
                    gg.nodes[node.id].label.add(branch)
                    result = self._expand(gg)
                    if result.satisfiable:
                        return result
                    last = result
                return last
            self._apply(g, step)

    def _find_clash(self, g: _Graph) -> Optional[TraceEntry]:
        for node in g.ordered_nodes():
            for c in sorted(node.label, key=concept_to_str):
                if isinstance(c, Bot):
                    return ("clash", node.id, "bot")
                if isinstance(c, Atom) and Not(c) in node.label:
                    return ("clash", node.id, f"{c.name}, not {c.name}")
        return None

    def _find_rule(self, g: _Graph):
        # deterministic priority; the or-rule fires only when nothing
        # deterministic is left, generating rules only after that; no rule
        # at all is applied to a blocked node (propagation into one from an
        # unblocked neighbour still happens and may unblock it)
        cache: dict[int, bool] = {}
        active = [n for n in g.ordered_nodes() if not self._is_blocked(g, n, cache)]
        for node in active:
            for c in sorted(node.label, key=concept_to_str):
                if isinstance(c, Atom) and c.name in self.unfold_pos:
                    if self.unfold_pos[c.name] not in node.label:
                        return ("unfold", node, c, self.unfold_pos[c.name])
                if isinstance(c, Not) and isinstance(c.expr, Atom) and c.expr.name in self.unfold_neg:
                    if self.unfold_neg[c.expr.name] not in node.label:
                        return ("unfold", node, c, self.unfold_neg[c.expr.name])
                if isinstance(c, And):
                    if c.left not in node.label or c.right not in node.label:
                        return ("and", node, c)
        if self.mode is not FunctionalityMode.FREE:
            for node in active:
                if node.sort is not Sort.OBJECT:
                    continue
                for role_name in sorted(g.succ[node.id]):
                    if self.sig.roles.get(role_name) is RoleKind.CROSS:
                        targets = sorted(g.successors(node.id, role_name))
                        if len(targets) > 1:
                            return ("merge", node, role_name, targets[0], targets[1])
        for node in active:
            for c in sorted(node.label, key=concept_to_str):
                if isinstance(c, Forall):
                    for m in g.adjacent(node.id, c.role):
                        if c.expr not in g.nodes[m].label:
                            return ("forall", node, c, m)
        for node in active:
            for c in sorted(node.label, key=concept_to_str):
                if isinstance(c, Or):
                    if c.left not in node.label and c.right not in node.label:
                        return ("or", node, c)
        for node in active:
            for c in sorted(node.label, key=concept_to_str):
                if isinstance(c, Exists):
                    step = self._exists_step(g, node, c)
                    if step is not None:
                        return step
        if self.mode is FunctionalityMode.EXACTLY_ONE:
            for node in active:
                if node.sort is Sort.OBJECT:
                    for role_name in self.sig.cross_roles():
                        if not g.successors(node.id, role_name):
                            return ("totality", node, role_name)
        return None

    def _exists_step(self, g: _Graph, node: _Node, c: Exists):
        role = c.role
        functional_forward = (
            role.kind is RoleKind.CROSS and self.mode is not FunctionalityMode.FREE
        )
        if functional_forward:
            targets = sorted(g.successors(node.id, role.name))
            if targets:
                if c.expr not in g.nodes[targets[0]].label:
                    return ("exists-reuse", node, c, targets[0])
                return None
            return ("exists", node, c)
        for m in g.adjacent(node.id, role):
            if c.expr in g.nodes[m].label:
                return None
        return ("exists", node, c)

    def _apply(self, g: _Graph, step) -> None:
        kind = step[0]
        if kind == "unfold":
            _, node, trigger, unfolded = step
            g.trace.append(("unfold", node.id, concept_to_str(trigger)))
            node.label.add(unfolded)
        elif kind == "and":
            _, node, c = step
            g.trace.append(("and", node.id, concept_to_str(c)))
            node.label.add(c.left)
            node.label.add(c.right)
        elif kind == "merge":
            _, node, role_name, keep, drop = step
            keep, drop = self._merge_order(g, keep, drop)
            g.trace.append(("merge", node.id, role_name))
            self._merge_nodes(g, keep, drop)
        elif kind == "forall":
            _, node, c, m = step
            g.trace.append(("forall", node.id, concept_to_str(c)))
            g.nodes[m].label.add(c.expr)
        elif kind == "exists-reuse":
            _, node, c, m = step
            g.trace.append(("exists-reuse", node.id, concept_to_str(c)))
            g.nodes[m].label.add(c.expr)
        elif kind == "exists":
            _, node, c = step
            g.trace.append(("exists", node.id, concept_to_str(c)))
            role = c.role
            via_inverse = role.kind is RoleKind.CROSS_INVERSE
            child = g.new_node(role.target_sort, root=False,
                               parent=(node.id, role.name, via_inverse))
            self._seed_label(child)
            child.label.add(c.expr)
            if via_inverse:
                g.add_edge(child.id, role.name, node.id)
            else:
                g.add_edge(node.id, role.name, child.id)
        elif kind == "totality":
            _, node, role_name = step
            g.trace.append(("totality", node.id, role_name))
            child = g.new_node(Sort.ATTRIBUTE, root=False, parent=(node.id, role_name, False))
            self._seed_label(child)
            g.add_edge(node.id, role_name, child.id)
        else:
            raise KedlError(f"unknown rule: {kind}")

    def _merge_order(self, g: _Graph, a: int, b: int) -> tuple[int, int]:
        na, nb = g.nodes[a], g.nodes[b]
        if na.root != nb.root:
            return (a, b) if na.root else (b, a)
        return (min(a, b), max(a, b))

    def _merge_nodes(self, g: _Graph, keep: int, drop: int) -> None:
        keep_node, drop_node = g.nodes[keep], g.nodes[drop]
        if keep_node.root and drop_node.root:
            kept_names = sorted(n for n, i in g.ind_node.items() if i == keep)
            dropped_names = sorted(n for n, i in g.ind_node.items() if i == drop)
            if kept_names and dropped_names:
                g.merges.append((kept_names[0], dropped_names[0]))
        keep_node.label.update(drop_node.label)
        for role_name, targets in g.succ[drop].items():
            g.succ[keep].setdefault(role_name, set()).update(targets)
        del g.succ[drop]
        for targets in (t for per in g.succ.values() for t in per.values()):
            if drop in targets:
                targets.discard(drop)
                targets.add(keep)
        for name, nid in list(g.ind_node.items()):
            if nid == drop:
                g.ind_node[name] = keep
        for other in g.nodes.values():
            if other.parent is not None and other.parent[0] == drop:
                other.parent = (keep, other.parent[1], other.parent[2])
        del g.nodes[drop]

    # -- blocking -------------------------------------------------------------

    def _directly_blocked(self, g: _Graph, node: _Node) -> bool:
        if node.root or node.parent is None or node.parent[2]:
            return False  # roots and inverse-created witnesses are never blocked
        parent = g.nodes[node.parent[0]]
        tag = node.parent[1:]
        anc = parent
        while anc.parent is not None:
            candidate = g.nodes[anc.parent[0]]
            if (
                not anc.root
                and anc.parent[1:] == tag
                and anc.sort is node.sort
                and anc.label == node.label
                and candidate.label == parent.label
            ):
                return True
            anc = candidate
        return False

    def _is_blocked(self, g: _Graph, node: _Node, cache: dict[int, bool]) -> bool:
        if node.id in cache:
            return cache[node.id]
        blocked = self._directly_blocked(g, node)
        if not blocked and node.parent is not None:
            blocked = self._is_blocked(g, g.nodes[node.parent[0]], cache)
        cache[node.id] = blocked
        return blocked

    def _blocker(self, g: _Graph, node: _Node) -> _Node:
        parent = g.nodes[node.parent[0]]
        tag = node.parent[1:]
        anc = parent
        while anc.parent is not None:
            candidate = g.nodes[anc.parent[0]]
            if (
                not anc.root
                and anc.parent[1:] == tag
                and anc.sort is node.sort
                and anc.label == node.label
                and candidate.label == parent.label
            ):
                return anc
            anc = candidate
        raise KedlError("internal tableau error: blocked node without a blocker")

    # -- witness extraction ----------------------------------------------------

    def _extract_witness(self, g: _Graph) -> Interpretation:
        cache: dict[int, bool] = {}
        elements = [n for n in g.ordered_nodes() if not self._is_blocked(g, n, cache)]
        index: dict[int, int] = {}
        n_delta = n_sigma = 0
        for node in elements:
            if node.sort is Sort.OBJECT:
                index[node.id] = n_delta
                n_delta += 1
            else:
                index[node.id] = n_sigma
                n_sigma += 1

        def resolve(nid: int) -> int:
            node = g.nodes[nid]
            if self._directly_blocked(g, node):
                return self._blocker(g, node).id
            return nid

        concept_ext: dict[str, frozenset[int]] = {}
        primitive = (self.sig.object_atoms | self.sig.attribute_atoms) - set(self.kb.definitions)
        for name in primitive:
            members = {
                index[n.id]
                for n in elements
                if n.sort is self.sig.atom_sort(name) and Atom(name) in n.label
            }
            concept_ext[name] = frozenset(members)

        role_ext: dict[str, frozenset[tuple[int, int]]] = {}
        for role_name in self.sig.roles:
            pairs = set()
            for node in elements:
                for target in g.successors(node.id, role_name):
                    pairs.add((index[node.id], index[resolve(target)]))
            role_ext[role_name] = frozenset(pairs)

        ind_map = {name: index[nid] for name, nid in g.ind_node.items()}

        witness = Interpretation(
            sig=self.sig,
            n_delta=n_delta,
            n_sigma=n_sigma,
            concept_ext=concept_ext,
            role_ext=role_ext,
            ind_map=ind_map,
            mode=self.mode,
        )
        # defined atoms denote exactly their definitions; labels only ever
        # carry the unfolded content, so evaluate in dependency order
        for name in self._definition_order():
            sort = self.sig.atom_sort(name)
            witness.concept_ext[name] = extension(self.kb.definitions[name], witness, sort)
        return witness

    def _definition_order(self) -> list[str]:
        order: list[str] = []
        seen: set[str] = set()

        def visit(name: str) -> None:
            if name in seen or name not in self.kb.definitions:
                return
            seen.add(name)
            for sub in subexprs(self.kb.definitions[name]):
                if isinstance(sub, Atom):
                    visit(sub.name)
            order.append(name)

        for name in sorted(self.kb.definitions):
            visit(name)
        return order


# -- module-level operations ---------------------------------------------------


def is_satisfiable(
    expr: ConceptExpr,
    kb: KnowledgeBase,
    mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE,
    sort: Optional[Sort] = None,
) -> SatResult:
    return Tableau(kb, mode).is_satisfiable(expr, sort=sort)


def is_consistent(kb: KnowledgeBase, mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE) -> SatResult:
    return Tableau(kb, mode).is_consistent()


def subsumes(
    kb: KnowledgeBase,
    sub: ConceptExpr,
    sup: ConceptExpr,
    mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE,
) -> bool:
    return Tableau(kb, mode).subsumes(sub, sup)


def instance_of(
    kb: KnowledgeBase,
    individual: str,
    expr: ConceptExpr,
    mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE,
) -> bool:
    return Tableau(kb, mode).instance_of(individual, expr)


@dataclass
class Classification:
    """Subsumption preorder over named atoms, one order per sort.

    Atoms proved equivalent share a cell; ``leq`` relates cell
    representatives (first member alphabetically) reflexively and
    transitively.
    """

    cells: dict[Sort, list[list[str]]]
    leq: dict[Sort, set[tuple[str, str]]]

    def below(self, sort: Sort, sub: str, sup: str) -> bool:
        rep = {m: cell[0] for cell in self.cells[sort] for m in cell}
        return (rep[sub], rep[sup]) in self.leq[sort]


def classify(kb: KnowledgeBase, mode: FunctionalityMode = FunctionalityMode.AT_MOST_ONE) -> Classification:
    tab = Tableau(kb, mode)
    consistent = tab.is_consistent()
    if not consistent.satisfiable:
        raise InconsistentKBError("knowledge base is inconsistent; no subsumption order exists")

    cells: dict[Sort, list[list[str]]] = {}
    leq: dict[Sort, set[tuple[str, str]]] = {}
    for sort, atoms in (
        (Sort.OBJECT, sorted(kb.sig.object_atoms)),
        (Sort.ATTRIBUTE, sorted(kb.sig.attribute_atoms)),
    ):
        pair_leq = {
            (a, b)
            for a in atoms
            for b in atoms
            if a == b or tab.subsumes(Atom(a), Atom(b))
        }
        remaining = list(atoms)
        sort_cells: list[list[str]] = []
        while remaining:
            a = remaining.pop(0)
            cell = [a] + [b for b in remaining if (a, b) in pair_leq and (b, a) in pair_leq]
            for b in cell[1:]:
                remaining.remove(b)
            sort_cells.append(sorted(cell))
        reps = {m: cell[0] for cell in sort_cells for m in cell}
        cells[sort] = sort_cells
        leq[sort] = {(reps[a], reps[b]) for (a, b) in pair_leq}
    return Classification(cells=cells, leq=leq)
