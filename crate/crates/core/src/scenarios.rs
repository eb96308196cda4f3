//! Bundled scenarios on a shared 128-node grid over `[0, 1.27]`.

use std::sync::Arc;

use crate::grid::SpatialGrid;
use crate::media::{Layer, MediumModel, Oscillator};
use crate::poles::Region;

pub const GRID_NODES: usize = 128;
pub const GRID_EXTENT: (f64, f64) = (0.0, 1.27);

/// Gain scale at which the cavity first lases, from the transfer-matrix
/// oracle ([`crate::transfer::lasing_threshold`]).
pub const CAVITY_THRESHOLD: f64 = 0.346379806182;
/// Real frequency of the lasing mode at threshold.
pub const CAVITY_LASING_OMEGA: f64 = 5.170044736803;

pub const NAMES: [&str; 5] = [
    "vacuum",
    "absorbing-slab",
    "gain-slab-subthreshold",
    "gain-cavity-belowthreshold",
    "gain-cavity-overthreshold",
];

pub fn grid() -> Arc<SpatialGrid> {
    Arc::new(SpatialGrid::uniform(GRID_EXTENT.0, GRID_EXTENT.1, GRID_NODES).expect("static grid"))
}

fn osc(f: f64, w: f64, g: f64, p: f64) -> Oscillator {
    Oscillator::new(f, w, g, p).expect("static oscillator")
}

pub fn vacuum() -> MediumModel {
    MediumModel::vacuum()
}

pub fn absorbing_slab() -> MediumModel {
    MediumModel::new(vec![Layer::local(
        0.535,
        0.735,
        vec![osc(1.0, 5.0, 0.5, 3.0)],
    )])
    .expect("static model")
}

/// Weakly inverted slab; peak `Im ε ≈ −0.5` near `ω = 5`.
pub fn gain_slab_subthreshold() -> MediumModel {
    MediumModel::new(vec![Layer::local(
        0.535,
        0.735,
        vec![osc(-0.05, 5.0, 0.5, 5.0)],
    )])
    .expect("static model")
}

/// Gain layer between two metallic mirrors. `scale` multiplies the gain
/// strength `f = −0.05`.
pub fn gain_cavity(scale: f64) -> MediumModel {
    let wp = 8f64.sqrt() * 30.0;
    let mirror = |a, b| Layer::local(a, b, vec![osc(1.0, 30.0, 0.3, wp)]);
    MediumModel::new(vec![
        mirror(0.215, 0.315),
        Layer::local(0.465, 0.775, vec![osc(-0.05 * scale, 5.2, 0.5, 5.0)]),
        mirror(0.925, 1.025),
    ])
    .expect("static model")
}

pub fn by_name(name: &str) -> Option<MediumModel> {
    match name {
        "vacuum" => Some(vacuum()),
        "absorbing-slab" => Some(absorbing_slab()),
        "gain-slab-subthreshold" => Some(gain_slab_subthreshold()),
        "gain-cavity-belowthreshold" => Some(gain_cavity(0.5 * CAVITY_THRESHOLD)),
        "gain-cavity-overthreshold" => Some(gain_cavity(1.2 * CAVITY_THRESHOLD)),
        _ => None,
    }
}

/// Pole-scan rectangle around the cavity modes near the gain line.
pub fn cavity_region() -> Region {
    Region::new(4.0, 7.0, 0.0, 0.4).expect("static region")
}

/// `Re ω ∈ [0.05, 2] × top`, `Im ω ∈ [0, 0.1] × top`.
pub fn default_region(model: &MediumModel) -> Region {
    let top = model.top_resonance().unwrap_or(1.0);
    Region::new(0.05 * top, 2.0 * top, 0.0, 0.1 * top).expect("positive resonance")
}
