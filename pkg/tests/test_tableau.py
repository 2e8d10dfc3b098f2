"""Tableau procedure: satisfiability, consistency, subsumption, instance
checking, classification, and agreement with the bounded oracle."""

import random

import pytest

from kedl import (
    Atom,
    Bounds,
    Exists,
    KnowledgeBase,
    Model,
    Not,
    Sort,
    classify,
    extension,
    find_model,
    instance_of,
    is_consistent,
    is_satisfiable,
    parse_concept,
    parse_kb,
    satisfies_kb,
    subsumes,
    validate_interpretation,
)
from kedl.semantics import FunctionalityMode
from kedl.tableau import InconsistentKBError, trace_to_text

from generators import P, diff_signature, empty_diff_kb, gen_nnf


@pytest.fixture
def kb():
    return empty_diff_kb()


class TestSatisfiability:
    def test_contradiction(self, kb):
        assert not is_satisfiable(parse_concept("C1 and not C1", kb.sig), kb).satisfiable

    def test_inverse_propagation_clash(self, kb):
        # an attribute value seen back through the cross role must satisfy
        # what all values of its source satisfy
        expr = parse_concept("some inv(r) (all r A1) and not A1", kb.sig)
        assert not is_satisfiable(expr, kb).satisfiable

    def test_functional_successor_is_shared(self, kb):
        expr = parse_concept("some r A1 and all r A2", kb.sig)
        result = is_satisfiable(expr, kb)
        assert result.satisfiable
        i = result.witness
        shared = extension(parse_concept("some r (A1 and A2)", kb.sig), i)
        assert shared

    def test_two_cross_values_clash_unless_free(self, kb):
        expr = parse_concept("some r A1 and some r (not A1)", kb.sig)
        assert not is_satisfiable(expr, kb, mode=FunctionalityMode.AT_MOST_ONE).satisfiable
        assert not is_satisfiable(expr, kb, mode=FunctionalityMode.EXACTLY_ONE).satisfiable
        assert is_satisfiable(expr, kb, mode=FunctionalityMode.FREE).satisfiable

    def test_exactly_one_makes_forall_existential(self, kb):
        # with a mandatory successor, all r A1 and not some r A1 clashes
        expr = parse_concept("all r A1 and not (some r A1)", kb.sig)
        assert is_satisfiable(expr, kb, mode=FunctionalityMode.AT_MOST_ONE).satisfiable
        assert not is_satisfiable(expr, kb, mode=FunctionalityMode.EXACTLY_ONE).satisfiable

    def test_witnesses_are_revalidated_models(self, kb):
        rng = random.Random(4242)
        seen = 0
        for _ in range(60):
            sort = rng.choice([Sort.OBJECT, Sort.ATTRIBUTE])
            e = gen_nnf(rng, sort, 3)
            result = is_satisfiable(e, kb, sort=sort)
            if result.satisfiable:
                seen += 1
                assert validate_interpretation(result.witness) == []
                assert extension(e, result.witness, sort)
        assert seen > 10

    def test_blocking_terminates_gci_loop(self, kb):
        kb.include(Atom("C1"), Exists(P, Atom("C1")))
        result = is_satisfiable(Atom("C1"), kb)
        assert result.satisfiable
        assert satisfies_kb(result.witness, kb)

    def test_blocking_with_cross_and_inverse_chain(self, kb):
        # every object points somewhere, every value looks back at a C1
        kb.include(parse_concept("top", kb.sig), parse_concept("some r A1", kb.sig))
        kb.include(parse_concept("A1", kb.sig), parse_concept("some inv(r) C1", kb.sig))
        result = is_consistent(kb)
        assert result.satisfiable
        assert satisfies_kb(result.witness, kb)

    def test_polymorphic_inclusion_hits_both_sorts(self):
        kb = parse_kb("top <= bot;")
        assert not is_consistent(kb).satisfiable


class TestConsistency:
    def test_definition_with_assertion(self):
        kb = parse_kb(
            """
            oconcept Gas; aconcept GasComposition; xrole has-composite;
            oindividual gas1;
            Gas := some has-composite GasComposition;
            Gas(gas1);
            """
        )
        result = is_consistent(kb)
        assert result.satisfiable
        assert satisfies_kb(result.witness, kb)

    def test_bot_membership_is_inconsistent(self):
        kb = parse_kb("oconcept C; oindividual c1; C <= bot; C(c1);")
        assert not is_consistent(kb).satisfiable

    def test_corpus_with_gas_instance(self):
        import importlib.resources

        text = importlib.resources.files("kedl.data").joinpath("gas.kedl").read_text()
        kb = parse_kb(text + "\noindividual gas1;\nGas(gas1);\n")
        for mode in (FunctionalityMode.AT_MOST_ONE, FunctionalityMode.EXACTLY_ONE):
            result = is_consistent(kb, mode=mode)
            assert result.satisfiable
            assert satisfies_kb(result.witness, kb)

    def test_functional_merge_propagates_clash(self):
        kb = parse_kb(
            """
            aconcept A; xrole has-r;
            oindividual c1; aindividual u1; aindividual u2;
            has-r(c1,u1); has-r(c1,u2);
            A(u1); (not A)(u2);
            """
        )
        result = is_consistent(kb)
        assert not result.satisfiable
        text = trace_to_text(result.clash_trace)
        assert "merge" in text and "clash" in text

    def test_merge_without_clash_is_recorded(self):
        kb = parse_kb(
            """
            aconcept A; xrole has-r;
            oindividual c1; aindividual u1; aindividual u2;
            has-r(c1,u1); has-r(c1,u2); A(u1);
            """
        )
        result = is_consistent(kb)
        assert result.satisfiable
        assert result.merged_individuals == [("u1", "u2")]
        i = result.witness
        assert i.ind_map["u1"] == i.ind_map["u2"]

    def test_clash_trace_is_stable(self):
        kb = parse_kb("oconcept C; oindividual c1; C(c1); (not C)(c1);")
        first = trace_to_text(is_consistent(kb).clash_trace)
        second = trace_to_text(is_consistent(kb).clash_trace)
        assert first == second
        assert first == "clash\tn0\tC, not C\n"

    def test_witnesses_are_deterministic(self):
        kb = empty_diff_kb()
        rng = random.Random(1234)
        for _ in range(20):
            sort = rng.choice([Sort.OBJECT, Sort.ATTRIBUTE])
            e = gen_nnf(rng, sort, 3)
            first = is_satisfiable(e, kb, sort=sort)
            second = is_satisfiable(e, kb, sort=sort)
            assert first.satisfiable == second.satisfiable
            if first.satisfiable:
                assert first.witness == second.witness
            else:
                assert first.clash_trace == second.clash_trace


class TestSubsumption:
    def test_everything_below_top(self, kb):
        assert subsumes(kb, Atom("C1"), parse_concept("top", kb.sig))

    def test_exists_distributes_into_conjunction(self, kb):
        sub = parse_concept("some p (C1 and C2)", kb.sig)
        sup = parse_concept("some p C1 and some p C2", kb.sig)
        assert subsumes(kb, sub, sup)

    def test_exists_not_below_forall(self, kb):
        assert not subsumes(kb, parse_concept("some p C1", kb.sig), parse_concept("all p C1", kb.sig))

    def test_unfolds_definitions(self):
        kb = parse_kb(
            """
            oconcept Gas; aconcept GasComposition; aconcept Temperature;
            xrole has-composite; xrole has-temperature;
            Gas := some has-composite GasComposition and some has-temperature Temperature;
            """
        )
        assert subsumes(
            kb,
            parse_concept("Gas", kb.sig),
            parse_concept("some has-temperature Temperature", kb.sig),
        )

    def test_sort_mismatch_rejected(self, kb):
        from kedl import SortError

        with pytest.raises(SortError):
            subsumes(kb, Atom("C1"), Atom("A1"))


class TestInstanceChecking:
    def test_direct_assertion(self):
        kb = parse_kb("oconcept C; oindividual c1; C(c1);")
        assert instance_of(kb, "c1", Atom("C"))

    def test_through_inclusion(self):
        kb = parse_kb("oconcept C; oconcept D; oindividual c1; C <= D; C(c1);")
        assert instance_of(kb, "c1", Atom("D"))

    def test_negative(self):
        kb = parse_kb("oconcept C; oindividual c1; C(c1);")
        assert not instance_of(kb, "c1", Not(Atom("C")))

    def test_undeclared_individual(self):
        kb = parse_kb("oconcept C;")
        from kedl import KedlError

        with pytest.raises(KedlError):
            instance_of(kb, "ghost", Atom("C"))


class TestClassify:
    def test_definition_places_atom_below_parts(self):
        kb = parse_kb("oconcept C; oconcept D; oconcept E; C := D and E;")
        result = classify(kb)
        assert result.below(Sort.OBJECT, "C", "D")
        assert result.below(Sort.OBJECT, "C", "E")
        assert not result.below(Sort.OBJECT, "D", "E")

    def test_equivalent_atoms_share_a_cell(self):
        kb = parse_kb("aconcept A; aconcept B; A := B or B;")
        result = classify(kb)
        assert ["A", "B"] in result.cells[Sort.ATTRIBUTE]

    def test_inconsistent_kb_is_reported(self):
        kb = parse_kb("oconcept C; oindividual c1; C <= bot; C(c1);")
        with pytest.raises(InconsistentKBError):
            classify(kb)


class TestOracleAgreement:
    def test_unsat_means_no_bounded_model_and_vice_versa(self, kb):
        rng = random.Random(99)
        for trial in range(60):
            sort = Sort.OBJECT if trial % 2 == 0 else Sort.ATTRIBUTE
            mode = (
                FunctionalityMode.AT_MOST_ONE,
                FunctionalityMode.EXACTLY_ONE,
            )[trial % 2]
            e = gen_nnf(rng, sort, 3)
            t = is_satisfiable(e, kb, mode=mode, sort=sort)
            o = find_model(e, Bounds(2, 2, mode), sig=kb.sig, sort=sort)
            assert not (isinstance(o, Model) and not t.satisfiable)

    def test_exactly_one_sat_implies_at_most_one_sat(self, kb):
        rng = random.Random(100)
        for trial in range(40):
            sort = Sort.OBJECT if trial % 2 == 0 else Sort.ATTRIBUTE
            e = gen_nnf(rng, sort, 3)
            strict = is_satisfiable(e, kb, mode=FunctionalityMode.EXACTLY_ONE, sort=sort)
            if strict.satisfiable:
                loose = is_satisfiable(e, kb, mode=FunctionalityMode.AT_MOST_ONE, sort=sort)
                assert loose.satisfiable

    def test_random_kbs_with_gcis_and_definitions(self):
        # satisfiability w.r.t. a KB: whenever the oracle finds a bounded
        # model of the KB plus a fresh witness individual, the tableau must
        # say satisfiable too
        from kedl.kb import ConceptAssertion
        from kedl.syntax import subexprs

        rng = random.Random(424242)
        oracle_models = 0
        for trial in range(120):
            sig = diff_signature()
            kb = KnowledgeBase(sig=sig)
            for _ in range(rng.randrange(3)):
                sort = rng.choice([Sort.OBJECT, Sort.ATTRIBUTE])
                kb.include(gen_nnf(rng, sort, 2), gen_nnf(rng, sort, 2))
            if rng.randrange(2) == 0:
                body = gen_nnf(rng, Sort.OBJECT, 2)
                if not any(isinstance(s, Atom) and s.name == "C1" for s in subexprs(body)):
                    kb.define("C1", body)
            sort = rng.choice([Sort.OBJECT, Sort.ATTRIBUTE])
            query = gen_nnf(rng, sort, 2)
            mode = rng.choice([FunctionalityMode.AT_MOST_ONE, FunctionalityMode.EXACTLY_ONE])

            sat = is_satisfiable(query, kb, mode=mode, sort=sort)

            witness_kb = KnowledgeBase(sig=sig.copy())
            witness_kb.definitions = dict(kb.definitions)
            witness_kb.inclusions = list(kb.inclusions)
            witness_kb.sig.declare_individual("w0", sort)
            witness_kb.abox = [ConceptAssertion(query, "w0")]
            verdict = find_model(witness_kb, Bounds(2, 2, mode))
            if isinstance(verdict, Model):
                oracle_models += 1
                assert sat.satisfiable
        assert oracle_models > 40
