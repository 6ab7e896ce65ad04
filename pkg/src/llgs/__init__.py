"""Analysis toolkit and PDE simulator for the axially symmetric 1D
Landau-Lifshitz-Gilbert-Slonczewski equation: wavetrains, essential spectra,
coherent structures and direct cross-validation."""

from .model import (
    AnisotropyRegime,
    Grid1D,
    MagnetizationField,
    ModelParams,
    SphericalField,
    classify_anisotropy,
    dissipation_rate,
    energy,
    from_spherical,
    rhs_landau_lifshitz,
    stereographic,
    to_spherical,
)
from .wavetrains import (
    ExistenceRegion,
    Wavetrain,
    admissible_wavenumbers,
    e3_eigenvalues,
    e3_stability,
    wavetrain_at,
    wavetrain_field,
)
from .spectrum import (
    SidebandReport,
    SpectrumBranch,
    classify_wavetrain_stability,
    dispersion,
    exclusion_checks,
    linearization,
    sideband_polynomial,
    sideband_wavenumber,
    spectrum_curves,
)
from .coherent import (
    CoherentAnsatz,
    CoherentProfile,
    dode_rhs,
    fast_heteroclinic,
    lift_to_ode,
    monotone_drift_check,
    ode_rhs,
    potential,
    small_amplitude_bifurcation,
    stationary_first_integral,
    stationary_homoclinic,
    stationary_portrait,
    superslow_flow,
)
from .simulate import (
    Diagnostics,
    PerturbationSpec,
    SimConfig,
    build_wavetrain_initial,
    measure_growth_rate,
    simulate,
    verify_coherent_profile,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
