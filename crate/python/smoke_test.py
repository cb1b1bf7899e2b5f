"""Smoke test for the hazel_kernel extension module.

Build and install first, e.g.

    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/hazel_kernel-*.whl
"""

import hazel_kernel as hk


def main():
    e = hk.Expr("(ap (asc (lam m (plus (var m) (hole 1))) (arrow num num)) (num 2))")
    assert e.synthesize() == "num"
    r = e.evaluate()
    assert r == "(iplus (vnum 2) (ihole 1 ((m (vnum 2)))))", r
    assert e.holes() == [1]

    filler = hk.Expr("(var m)")
    assert hk.resume(r, 1, filler) == "(vnum 4)"
    assert e.fill(1, filler).evaluate() == "(vnum 4)"

    z = hk.EditState.start()
    for a in e.construct_script():
        z = z.apply(a)
    assert z.expr().size() == e.size()
    assert z.expr().evaluate().startswith("(iplus (vnum 2) (ihole ")

    z = hk.EditState("(plus (cursor (hole 0)) (num 1))")
    assert z.cursor_info() == "(analyzed num) (ctx)"
    assert "construct num 0" in z.valid_actions()
    assert "finish" not in z.valid_actions()
    ranked = z.suggest(3)
    assert len(ranked) == 3
    assert abs(sum(p for _, p in z.suggest(100)) - 1.0) < 1e-9

    model = hk.SuggestionModel.train([hk.Expr("(plus (num 1) (num 2))").construct_script()])
    assert model.total() > 0
    assert hk.SuggestionModel.load(model.save()).save() == model.save()

    try:
        z.apply("finish")
    except hk.KernelError as err:
        assert str(err).startswith("E_INVALID_ACTION")
    else:
        raise AssertionError("finish on an empty hole must fail")

    nb = hk.Notebook()
    a = nb.add_cell("a", "(num 2)")
    b = nb.add_cell("b", "(plus (var a) (hole 0))")
    assert nb.result(b) == "(iplus (vnum 2) (ihole 0 ((a (vnum 2)))))"
    assert nb.fill(b, 0, "(num 3)") == [b]
    assert nb.result(b) == "(vnum 5)"
    assert nb.edit(a, "del") == [a, b]
    again = hk.Notebook.load(nb.save())
    assert again.cells() == nb.cells()

    s = hk.Session()
    assert s.handle("new") == "ok"
    assert s.handle("new x (num 1)").startswith("ok c1")
    assert s.handle("bogus").startswith("error E_PARSE")
    assert s.handle("") is None
    print("smoke test passed")


if __name__ == "__main__":
    main()
