//! Post-processing of measured transmission: synthetic Gaussian-beam weighting of
//! far-field scans, calibration normalization and time gating of sweeps.

pub mod gate;
pub mod gaussian;

pub use gate::{time_gate, GateCenter, GateShape, GatedTrace, SweepTrace, DEFAULT_GATE_NS};
pub use gaussian::{
    backproject_farfield, contained_fraction, gaussian_aperture, gaussian_farfield, gaussian_weighting, normalize_calibration,
    waist_for_containment, ApertureGrid, FarFieldGrid, GaussianSpec, DEFAULT_SAMPLE_RADIUS_MM, DEFAULT_W0_MM,
};
