//! Spectra, lineshape features, parameter scans and power-law fits.

pub mod features;
pub mod powerlaw;
pub mod scan;
pub mod spectrum;

pub use features::{extract_features, FeatureWarning, LineshapeFeatures};
pub use powerlaw::{fit_power_law_xy, PowerLawFit};
pub use scan::{
    analyze, detuning_scale, fit_power_law, scan, Analysis, Feature, ScanAxis, ScanPoint, ScanResult,
    zero_field_width,
};
pub use spectrum::{derivative, ConvergenceReport, DeltaGrid, Spectrum, SpectrumKind, SpectrumMeta};
