"""Smoke test for the Python bindings.

Builds the extension with cargo, copies it next to this script as cantorfam.so and
exercises the main types. Run from anywhere: python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys
import tempfile

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def build():
    subprocess.run(["cargo", "build", "--release", "-p", "cantorfam-py"], cwd=ROOT, check=True)
    shutil.copy(ROOT / "target" / "release" / "libcantorfam_py.so", HERE / "cantorfam.so")
    sys.path.insert(0, str(HERE))


def main():
    build()
    import cantorfam as cf

    t = cf.Theory("1(0)")
    assert str(t) == "1(0)" and t.bit(0) and not t.bit(5)
    assert cf.Theory("11(1)") == cf.Theory("(1)")
    assert len({cf.Theory("(1)"), cf.Theory("1(1)")}) == 1

    s = cf.Sentence("Q0 -> Q1")
    assert s.equivalent("!Q0 | Q1")
    assert s.eval("(1)") and not s.eval("10(0)")
    assert cf.Sentence("Q1 & !Q0").clopen() == (2, ["01"])
    assert cf.Sentence.cylinder("10").equivalent("Q0 & !Q1")

    comb = cf.Family.automaton(2, [(0, 1, 0), (0, 0, 1), (1, 0, 1)], exclude=["(1)"])
    assert "10(0)" in comb and "(1)" not in comb
    assert comb.rank() == (1, 1)
    assert not comb.is_e_closed() and comb.is_accumulation_point("(1)")
    closed = comb.closure()
    assert closed.is_e_closed() and "(1)" in closed
    assert closed.derivative() == cf.Family.explicit(["(1)"])
    assert comb.forces("Q1", "Q0")
    assert cf.Family.empty().rank() == (-1, 0)
    assert cf.Family.full_space().rank() == (None, None)

    diag = cf.Scheme.diagram("(1)")
    assert comb.locally_consistent(diag) and not comb.consistent(diag)
    assert closed.restrict_scheme(diag) == cf.Family.explicit(["(1)"])
    assert closed.forces_scheme(diag, cf.Scheme.finite(["Q0"]))

    summary, tower = cf.build_family(3, 2)
    assert summary == "verified (3,2)" and tower.rank() == (3, 2)
    parts = cf.build_family(1, 2)[1].decompose()
    assert [f.rank() for _, f in parts] == [(1, 1), (1, 1)]
    assert '"omega_limit"' in cf.build_recipe("w+1", 1)
    theory, scheme = cf.nonsdefinable_witness(closed)
    assert str(theory) == "(1)" and "(1)" in str(scheme)

    with tempfile.TemporaryDirectory() as d:
        path = str(pathlib.Path(d) / "comb.fam.json")
        comb.save(path)
        assert cf.Family.load(path) == comb
    assert cf.Family.from_json(comb.to_json()) == comb

    try:
        cf.Sentence("Q0 &")
    except ValueError as e:
        assert "sentence" in str(e)
    else:
        raise AssertionError("bad sentence accepted")

    results = cf.check("sentences", 1)
    assert results and all(passed for _, passed, _ in results)
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
