import pytest

from conftest import LIVING_ROOM_ARROWS, chain_scm
from models import (
    CausalDiagram, ConfigError, Intervention, Mechanism, Scm, StructuralError, check_acyclic,
    make_variables, mutilate, row_bits, row_index, topological_order,
)


def test_living_room_is_acyclic(room_variables):
    assert check_acyclic(CausalDiagram(room_variables, LIVING_ROOM_ARROWS)) == (True, None)


def test_cycle_witness_closes_on_itself():
    diagram = CausalDiagram(make_variables(['A', 'B']), {('A', 'B'), ('B', 'A')})
    acyclic, witness = check_acyclic(diagram)
    assert not acyclic
    assert witness[0] == witness[-1]
    assert set(witness) == {'A', 'B'}


def test_dangling_arrow_is_structural_error():
    diagram = CausalDiagram(make_variables(['A']), {('A', 'Z')})
    with pytest.raises(StructuralError):
        check_acyclic(diagram)


def test_duplicate_names_rejected():
    with pytest.raises(StructuralError):
        CausalDiagram(make_variables(['A', 'A']))


def test_topological_order_breaks_ties_by_index(room_variables):
    order = topological_order(CausalDiagram(room_variables, LIVING_ROOM_ARROWS))
    assert order == ['P', 'Pr', 'L', 'H', 'Pow', 'W', 'O', 'T']


def test_empty_diagram_order():
    assert topological_order(CausalDiagram(())) == []


def test_row_index_first_parent_most_significant():
    assert row_index([1, 0]) == 2
    assert row_index([]) == 0
    assert row_bits(2, 2) == (1, 0)
    assert row_bits(5, 3) == (1, 0, 1)


def test_scm_rejects_wrong_row_count():
    diagram = CausalDiagram(make_variables(['A', 'B']), {('A', 'B')})
    with pytest.raises(ConfigError):
        Scm(diagram, {'A': Mechanism((), (0.5,)), 'B': Mechanism(('A',), (0.5, 0.5, 0.5))})


def test_scm_rejects_probability_out_of_range():
    diagram = CausalDiagram(make_variables(['A']))
    with pytest.raises(ConfigError):
        Scm(diagram, {'A': Mechanism((), (1.2,))})


def test_mutilate_cuts_incoming_arrows():
    scm = chain_scm()
    cut = mutilate(scm, Intervention({'B': True}))
    assert cut.diagram.arrows == frozenset()
    assert cut.mechanisms['B'].probabilities == (1.0,)
    assert cut.mechanisms['A'] == scm.mechanisms['A']


def test_empty_intervention_is_identity():
    scm = chain_scm()
    assert mutilate(scm, Intervention()) is scm


def test_intervention_on_unknown_variable():
    with pytest.raises(StructuralError):
        mutilate(chain_scm(), Intervention({'Z': True}))


def test_intervention_label():
    assert Intervention({'A': True, 'B': False}).label() == 'do(A=1;B=0)'


def test_make_variables_marks_non_doable():
    variables = make_variables(['A', 'B'], nd=['B'])
    assert [v.doable for v in variables] == [True, False]
    assert variables[1].index == 1
    with pytest.raises(StructuralError):
        make_variables(['A'], nd=['Z'])
