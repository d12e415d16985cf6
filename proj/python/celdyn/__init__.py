"""Second-moment dynamics of a coherently pumped correlated emission laser.

The heavy lifting happens in the compiled ``_celdyn`` extension; this package
only re-exports it.
"""

from ._celdyn import (
    CutoffExceeded,
    DegenerateSpectrum,
    DriftDiffusion,
    Error,
    NumericalError,
    NumericalInstability,
    ReducedParams,
    SingularDrift,
    SpectralDecomposition,
    StepTooLarge,
    SystemParams,
    UnknownPreset,
    ValidationError,
    derive,
    drift_diffusion,
    evolve_fock,
    integrate_moments,
    mean_photon_pairs,
    preset_names,
    quadrature_variances,
    run_preset,
    second_moments,
    spectral,
    steady_state,
    verify,
)

__version__ = "0.1.0"
