"""Smoke test for the compiled extension: build with `maturin develop` first."""

import cmath
import os
import tempfile

import josephson_gates as jg


def main():
    model = jg.RegisterModel(2)
    cnot = jg.TargetGate.builtin("cnot")
    assert abs(cnot.matrix[2][3] - cmath.exp(1j * cmath.pi / 4)) < 1e-15

    zero = [([0.0, 0.0], [0.0, 0.0])] * 4
    expected = 2 * abs(cmath.exp(1j * cmath.pi / 4) - 1) ** 2 + 2 + 2
    assert abs(jg.error_functional(model, cnot, zero) - expected ** 0.5) < 1e-12

    assert jg.vertex_condition(3, 12)
    assert jg.cost_report()["direct_edges"] == 13

    result = jg.synthesize(model, jg.TargetGate.builtin("identity", 2), restarts=1, seed=1)
    assert result.rel_error < 1e-8, result
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "identity.json")
        result.write(path)
        assert jg.SynthesisResult.read(path).vertices == result.vertices
        result.write_schedule(os.path.join(tmp, "schedule.csv"))
    print("ok:", result)


if __name__ == "__main__":
    main()
