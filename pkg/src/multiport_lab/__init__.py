"""multiport-lab: directionally-unbiased linear-optical multiport networks.

Build unitary multiport devices, seal or link their ports into cavities, and
compute the exact effective scattering matrix on the surviving open ports —
plus the sweep/sensitivity tooling for the tunable interferometers those
closures produce.
"""

from .analysis import (
    BiasPoint,
    DeviceModel,
    GridSpec,
    PerturbationResponse,
    SensitivityProfile,
    SlopeCheckWarning,
    SweepCurve,
    find_bias_point,
    max_sensitivity,
    netlist_device,
    perturbation_response,
    resolve_device,
    sensitivity_profile,
    slope,
    solve_phi2_for_sensitivity,
    sweep,
)
from .closure import (
    ClosedDevice,
    Link,
    LinkSet,
    Termination,
    block_diag,
    close_network,
    close_series_truncated,
    closure_spectral_radius,
    link_close,
    seal_ports,
)
from .core import (
    PortState,
    ScatteringMatrix,
    UnitarityCheck,
    apply,
    check_unitary,
    is_permutation_symmetric,
    make_beam_splitter_4port,
    make_grover_coin,
    make_hadamard2,
    make_identity,
    permute_ports,
)
from .devices import (
    MichelsonSupermodeCoeffs,
    Probabilities,
    SingleSealAmplitudes,
    TwoPortAmplitudes,
    bs_cavity_dT_dphi1,
    bs_cavity_probabilities,
    grover_michelson_amplitudes,
    grover_michelson_dT_dphi1,
    grover_michelson_probabilities,
    grover_single_seal_amplitudes,
    grover_single_seal_dT_dphi1,
    grover_single_seal_probabilities,
    michelson_amplitudes,
    michelson_dT_dphi1,
    michelson_probabilities,
    michelson_supermode_coeffs,
)
from .errors import (
    DegeneratePhaseError,
    DimensionError,
    MultiportError,
    ParseError,
    PortError,
    SingularClosureError,
    TargetUnreachableError,
    ValidationError,
)
from .netlist import (
    Netlist,
    builtin_netlist,
    close_netlist,
    parse_netlist,
    render_netlist,
)
from .phase_expr import PhaseExpr, evaluate_phase

__version__ = "0.1.0"

__all__ = [
    "BiasPoint",
    "ClosedDevice",
    "DegeneratePhaseError",
    "DeviceModel",
    "DimensionError",
    "GridSpec",
    "Link",
    "LinkSet",
    "MichelsonSupermodeCoeffs",
    "MultiportError",
    "Netlist",
    "ParseError",
    "PerturbationResponse",
    "PhaseExpr",
    "PortError",
    "PortState",
    "Probabilities",
    "ScatteringMatrix",
    "SensitivityProfile",
    "SingleSealAmplitudes",
    "SingularClosureError",
    "SlopeCheckWarning",
    "SweepCurve",
    "TargetUnreachableError",
    "Termination",
    "TwoPortAmplitudes",
    "UnitarityCheck",
    "ValidationError",
    "__version__",
    "apply",
    "block_diag",
    "bs_cavity_dT_dphi1",
    "bs_cavity_probabilities",
    "builtin_netlist",
    "check_unitary",
    "close_netlist",
    "close_network",
    "close_series_truncated",
    "closure_spectral_radius",
    "evaluate_phase",
    "find_bias_point",
    "grover_michelson_amplitudes",
    "grover_michelson_dT_dphi1",
    "grover_michelson_probabilities",
    "grover_single_seal_amplitudes",
    "grover_single_seal_dT_dphi1",
    "grover_single_seal_probabilities",
    "is_permutation_symmetric",
    "link_close",
    "make_beam_splitter_4port",
    "make_grover_coin",
    "make_hadamard2",
    "make_identity",
    "max_sensitivity",
    "michelson_amplitudes",
    "michelson_dT_dphi1",
    "michelson_probabilities",
    "michelson_supermode_coeffs",
    "netlist_device",
    "parse_netlist",
    "permute_ports",
    "perturbation_response",
    "render_netlist",
    "resolve_device",
    "seal_ports",
    "sensitivity_profile",
    "slope",
    "solve_phi2_for_sensitivity",
    "sweep",
]
