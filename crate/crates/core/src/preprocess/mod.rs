//! Signal cleaning: FIR bandpass filtering, amplitude artifact
//! annotation, FastICA component removal and muscle flagging.

pub mod annotate;
pub mod fir;
pub mod ica;
pub mod muscle;

pub use annotate::{annotate_amplitude, ArtifactAnnotations, ArtifactKind, ArtifactSpan};
pub use fir::{
    apply_bandpass, design_bandpass, filter_recording, BandpassFilter, FilterSpec, FirWindow,
};
pub use ica::{fit_fastica, remove_components, suggest_eog_components, IcaModel, IcaSettings};
pub use muscle::flag_muscle;
