"""Conformance checking and complete test-suite generation for input/output
labelled transition systems."""

from .errors import IoconfError
from .models import (
    ActionAlphabet,
    ClassReport,
    DeltaIolts,
    Iolts,
    Lts,
    after,
    classify,
    delta_extend,
    distinguishable,
    init_set,
    inp_set,
    is_deterministic,
    is_input_state_minimal,
    out_set,
    quiescent_states,
    validate_model,
)
from .automata import (
    Fsa,
    accepts,
    complement,
    complete,
    concat,
    determinize,
    eliminate_epsilon,
    intersect,
    is_empty,
    language_equivalent,
    lts_to_fsa,
    fsa_to_lts,
    parse_regex,
    shortest_witness,
    union_,
)
from .conformance import (
    TestSuiteFsa,
    Verdict,
    build_test_suite,
    check_adherence,
    check_conf,
    check_ioco,
    finite_witnesses,
    ioco_d_language,
)
from .testgen import (
    FaultModel,
    Multigraph,
    Scheme,
    SchemeSuite,
    TestPurpose,
    build_multigraph,
    complete_test_purpose,
    enumerate_test_purposes,
    gen_fault_model,
    gen_scheme_suite,
    make_input_enabled,
    make_output_deterministic,
    validate_scheme,
    validate_test_purpose,
)
from .runner import (
    CrossProduct,
    RunReport,
    adversarial_family,
    canonical_spec,
    count_lower_bound,
    cross_product,
    defeat_acyclic_fault_model,
    passes,
    run_fault_model,
)

__version__ = "0.1.0"
