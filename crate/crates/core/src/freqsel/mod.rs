//! Frequency-domain artifact detection and hard patch selection.
//!
//! Two reconstructions of the same scene are compared band by band in the
//! centered log-magnitude spectrum. The smoothed absolute differences are
//! reduced by a per-bin maximum over bands and restricted to an annulus,
//! giving a frequency variation map. A patch is hard when more than
//! `t_cnt` bins of that map exceed `t_var`.

mod blur;
mod select;
mod spectrum;
mod variation;

pub use blur::{gaussian_blur, gaussian_kernel};
pub use select::{
    classify_patch, judge_pair, select_hard, CountSummary, PatchVerdict, SelectionParams,
    SelectionReport,
};
pub use spectrum::{centered_spectrum, dc_bin, log_magnitude, SpectrumPlan};
pub use variation::{
    bandpass, channel_variations, frequency_variation_map, FreqParams, FrequencyVariationMap,
};
