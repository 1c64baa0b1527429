from fractions import Fraction

import pytest

import saslab

TOY_ORIGINAL = "INPUT(x0)\nINPUT(x1)\nOUTPUT(y)\nnx0 = NOT(x0)\ny = AND(nx0, x1)\n"
TOY_LOCKED = (
    "INPUT(x0)\nINPUT(x1)\nINPUT(keyinput0)\nINPUT(keyinput1)\nOUTPUT(y)\n"
    "t = XOR(x0, keyinput0)\na = AND(t, x1)\ny = XNOR(a, keyinput1)\n"
)


def test_worked_example_averages():
    orig = saslab.Circuit.from_bench(TOY_ORIGINAL)
    locked = saslab.Circuit.from_bench(TOY_LOCKED)
    profile = saslab.error_profile(locked, orig)
    assert profile["e_w"] == Fraction(2, 3)
    assert profile["gamma"] == Fraction(2, 3)
    assert locked.simulate({"x0": 0, "x1": 1, "keyinput0": 1, "keyinput1": 1}) == {"y": True}


def test_lock_attack_roundtrip():
    mult = saslab.array_multiplier(4, 4)
    spec = {"n": 4, "l": 1, "critical_minterms": ["3", "6"]}
    lc = saslab.lock(mult, "rsas", spec, seed=3)
    assert len(lc.correct_key) == 2
    assert lc.circuit.bind_key(lc.correct_key).equivalent(mult)
    res = saslab.sat_attack(lc.circuit, mult, seed=1)
    assert res["termination"] == "exhausted"
    assert lc.circuit.bind_key(res["recovered_key"]).equivalent(mult)
    removed, wires = saslab.removal_attack(lc.circuit)
    assert wires
    assert not removed.equivalent(mult)


def test_closed_forms_and_model():
    assert saslab.expected_iterations(14, 4, 1) == Fraction(8194)
    assert saslab.sas_gamma(4, 2) == Fraction(15, 128)
    stats = saslab.model_attack_sim({"n": 8, "l": 1, "critical_minterms": ["01", "02"]}, 2000, seed=5, threads=2)
    assert abs(stats["mean"] - 129) < 4 * stats["std_error"]


def test_selection_and_errors():
    picked, fallback = saslab.select_critical_minterms([{3: 10, 5: 20, 7: 1}, {3: 10, 5: 20}], 4, 2)
    assert picked == [5, 3] and not fallback
    with pytest.raises(saslab.ParseError):
        saslab.Circuit.from_bench("INPUT(a)\nOUTPUT(y)\ny = FROB(a)\n")
    with pytest.raises(saslab.SpecError):
        saslab.lock(saslab.array_multiplier(4, 4), "nope", {"n": 4, "l": 1, "critical_minterms": ["3", "6"]}, 0)
