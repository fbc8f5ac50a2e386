"""Smoke test for the Python bindings.

Build the extension first:

    cargo build --release -p carlitz-py --features extension-module
    cp target/release/libcarlitz_py.so python/carlitz.so
"""

import carlitz


def main():
    f = carlitz.Field()
    th, z = f.theta(), f.zeta()
    assert f.q == 3 and f.ram == 2

    # theta log(zeta) = pi_tilde
    r = th * z.log() - f.pi_tilde()
    assert r.is_zero() and r.prec >= 190, r

    # exp kills the period
    assert f.pi_tilde().exp().is_zero()

    # parser and arithmetic agree
    x = f.element("1/(th + 1)")
    assert (x * (th + f.element("1")) - f.element("1")).is_zero()
    assert f.element("z^-1") == f.pi() ** 1
    assert (z ** 2) == -th

    # Omega(theta) = -1/pi_tilde
    w = f.omega(t_deg=40).eval(th)
    assert (w * f.pi_tilde() + f.element("1")).is_zero()

    # C_t(x) = theta x + x^q
    y = f.element("th^-1")
    assert y.carlitz_action("t") == th * y + y ** 3

    # L_alpha(theta) = log(alpha)
    a = th ** -1
    assert (carlitz.l_alpha(a).eval(th) - a.log()).is_zero()

    a0 = th ** -2
    red = carlitz.reduce_log(a0.carlitz_action("t^2"), min_steps=2)
    assert red["n"] == 2 and red["action_residual"].is_zero()
    assert (red["alpha"] - a0).carlitz_action("t^2").is_zero()

    try:
        carlitz.reduce_log(f.element("pi^-7"))
    except carlitz.ExtensionRequired:
        pass
    else:
        raise AssertionError("expected ExtensionRequired")

    try:
        f.element("t + 1")
    except carlitz.CarlitzError as e:
        assert "not allowed" in str(e)
    else:
        raise AssertionError("expected a context error")

    m = carlitz.Motive.x_alphas([z], t_deg=20, prec=100)
    assert m.rank == 2
    assert m.check_trivialization()["pass"]
    c, s = m.anderson_det()
    assert s == 1 and c == f.element("1")
    c1 = carlitz.Motive.carlitz_power(f, 1, t_deg=20, prec=100)
    assert m.tensor(c1).check_trivialization()["pass"]

    rep = carlitz.relations(f, [z], dt=1, vlo=-1, vhi=0)
    assert rep["gamma"]["dim"] == 1 and len(rep["relations"]) == 1

    rows = carlitz.selftest(f, only=3)
    assert rows[0]["pass"], rows

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
