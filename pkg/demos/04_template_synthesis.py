"""Inverse-free template synthesis.

A circuit template is an alternating chain of known local layers and
forward slots for an unknown operation; the template language cannot even
express an inverted query. Given an imprimitive generator, the compiler
optimizes the local layers until the evaluated chain lands on a target.
"""

import numpy as np

from seqlocc import (
    LocalLayer,
    Query,
    RunConfig,
    dumps_template,
    evaluate_template,
    exp_xx_form,
    loads_template,
    phase_distance,
    swap_operator,
    synthesize,
    validate_unitary,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
cfg = RunConfig()

print("=== SWAP out of three forward CNOT queries ===")
res = synthesize(validate_unitary(swap_operator(2), 2, 2),
                 validate_unitary(CNOT, 2, 2), cfg)
print(f"queries: {res.template.query_count}, distance to target: {res.delta:.2e}")
got = evaluate_template(res.template, CNOT)
print(f"re-checked: {phase_distance(got, swap_operator(2)):.2e}")
kinds = ["Q" if isinstance(l, Query) else "L" for l in res.template.layers]
print("layer pattern (application order):", " ".join(kinds))

print()
print("=== weak interactions accumulate: exp_xx(1) from exp_xx(0.5) ===")
res2 = synthesize(exp_xx_form(1.0, 2, 2), exp_xx_form(0.5, 2, 2), cfg)
print(f"queries: {res2.template.query_count}, distance: {res2.delta:.2e}")

print()
print("=== templates serialize and round-trip bit-exactly ===")
text = dumps_template(res.template)
back = loads_template(text)
same = all(
    isinstance(a, Query) == isinstance(b, Query)
    and (isinstance(a, Query) or (np.array_equal(a.factor_a, b.factor_a)
                                  and np.array_equal(a.factor_b, b.factor_b)))
    for a, b in zip(res.template.layers, back.layers))
print(f"{len(text)} bytes; round trip identical: {same}")
print("every record is a local layer or a forward query; nothing else exists")
