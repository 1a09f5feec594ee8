"""Free, monotone and boolean convolutions of probability measures."""

from ._ncconv import (  # noqa: F401
    Atom,
    AtomicMeasure,
    ClassReport,
    ClassWitness,
    ConvolutionResult,
    DensityMeasure,
    TransformHandle,
    bool_add,
    bool_mult_bercovici,
    bool_mult_circle,
    bool_mult_new,
    class_check,
    decompose_free,
    dilate,
    eval_F,
    eval_G,
    eval_K,
    eval_W,
    eval_psi,
    evaluate_expression,
    free_add,
    free_mult,
    haar_circle,
    handle_of,
    make_atomic,
    measure_from_json,
    mixture,
    moments,
    mono_add,
    mono_mult,
    mono_mult_alt,
    mono_mult_circle,
    pretty_print,
    rotate,
    run_command,
    semicircle,
    solve_additive_subordination,
    stieltjes_invert,
    transform_moments,
    translate,
    verify_suite,
    __version__,
)
