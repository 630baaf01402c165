"""Compilers from function tables to gate networks, plus network rewrites."""
from .bounded import emit_bounded, minimal_points, synth_bounded
from .common import (ModeError, Options, SynthesisError, SynthesisTooLarge, emit, floor_pieces,
                     split_outputs, support, synthesize, verification_shape)
from .general import (InterleavePlan, choose_width, emit_general, general_pieces, interleave_plan,
                      layer_targets, synth_general, transient_split, two_layer, two_layer_plan, zeta)
from .recurrent import (main_reduction, meagerize, synth_linear, synth_recurrent,
                        synth_unary_recurrent, unary_primes)
from .report import SynthReport, report
from .rewrite import (counter_bits, feedback_delayer, feedback_toppler, rewrite_feedback,
                      rewrite_unprime)


def compile_function(f, mode: str = "auto", options: Options | None = None):
    """Pick a compiler (``auto`` chooses from the function's shape); returns (network, report)."""
    from ..core import is_bounded

    if mode == "auto":
        comps = split_outputs(f)
        if f.is_zilp:
            mode = "recurrent"
        elif all(is_bounded(c).bounded for c in comps):
            mode = "bounded"
        else:
            mode = "general"
    if mode == "recurrent":
        net, passes = synth_recurrent(f, options, with_passes=True)
    elif mode == "bounded":
        net, passes = synth_bounded(f, options, with_passes=True)
    elif mode == "general":
        net, passes = synth_general(f, options, with_passes=True)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return net, report(net, passes)
