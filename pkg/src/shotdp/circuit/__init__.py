"""
Variational classifier circuits
"""

from shotdp.circuit.ansatz import (
    AnsatzSpec,
    ParamVector,
    TemplateOp,
    check_theta,
    forward,
    output_states,
    prepare_input,
    psr_shifts,
    run_circuit,
    shifted_output_states,
    shifted_states,
    shifted_thetas,
    strongly_entangling_template,
)
from shotdp.circuit.encoding import EncoderSpec, EncodingScheme, encode, encode_batch
from shotdp.circuit.labels import LabelObservables, predict, predict_batch

__all__ = [
    "AnsatzSpec",
    "ParamVector",
    "TemplateOp",
    "check_theta",
    "forward",
    "output_states",
    "prepare_input",
    "psr_shifts",
    "run_circuit",
    "shifted_output_states",
    "shifted_states",
    "shifted_thetas",
    "strongly_entangling_template",
    "EncoderSpec",
    "EncodingScheme",
    "encode",
    "encode_batch",
    "LabelObservables",
    "predict",
    "predict_batch",
]
