use crate::fields::GridSpec;
use crate::geometry::{CoriolisPreset, GridPotential, PotentialData, ScalarPreset};
use crate::Result;

/// A Coriolis preset sampled on a grid, with exact derivatives.
#[derive(Clone, Debug)]
pub struct PresetSample {
    pub potential: GridPotential,
    /// Number of nodes inside exclusion regions.
    pub masked: usize,
}

pub fn coriolis_preset(preset: &CoriolisPreset, grid: &GridSpec) -> Result<PresetSample> {
    let p = PotentialData::analytic(ScalarPreset::zero(), preset.clone());
    let potential = p.sample(grid, 0.0)?;
    let masked = potential.mask.as_ref().map_or(0, |m| m.iter().filter(|v| **v).count());
    Ok(PresetSample { potential, masked })
}
