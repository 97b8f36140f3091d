//! Shared fixtures, independent oracles and property checks for the
//! integration tests.
#![allow(dead_code)]

pub mod oracle;
pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use srg_core::graph::RegionTable;
use srg_core::matching::{EdgeWeights, VertexWeights};
use srg_core::{build_srg, CostWeights, Geometry, LabelVolume, Model, ScalarVolume};

/// A random matching problem: a fitted model plus an unseen volume cut
/// into super-regions.
pub struct Instance {
    pub model: Model,
    pub scalar: ScalarVolume,
    pub supers: LabelVolume,
    pub n_super: usize,
    pub weights: CostWeights,
}

impl Instance {
    pub fn table(&self) -> RegionTable {
        RegionTable::from_volumes(&self.supers, &self.scalar).unwrap()
    }
}

fn simplex(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let a: f64 = rng.random();
    let b: f64 = rng.random::<f64>() * (1.0 - a);
    [a, b, 1.0 - a - b]
}

pub fn random_weights(rng: &mut ChaCha8Rng) -> CostWeights {
    let v = simplex(rng);
    let e = simplex(rng);
    let mut w = CostWeights::new(
        rng.random(),
        VertexWeights::new(v[0], v[1], v[2]),
        EdgeWeights::new(e[0], e[1], e[2]),
    )
    .unwrap();
    w.empty_penalty = rng.random_range(0.0..20.0);
    w
}

/// Label volume over `geometry` in which every label of `map` appears.
fn covering_labels(rng: &mut ChaCha8Rng, geometry: Geometry, map: &[u32]) -> LabelVolume {
    let mut data: Vec<u32> = (0..geometry.len())
        .map(|_| map[rng.random_range(0..map.len())])
        .collect();
    let mut slots: Vec<usize> = (0..geometry.len()).collect();
    for &l in map {
        let k = rng.random_range(0..slots.len());
        data[slots.swap_remove(k)] = l;
    }
    LabelVolume::new(geometry, data).unwrap()
}

fn random_scalar(rng: &mut ChaCha8Rng, geometry: Geometry) -> ScalarVolume {
    ScalarVolume::new(
        geometry,
        (0..geometry.len())
            .map(|_| rng.random_range(0.0..100.0))
            .collect(),
    )
    .unwrap()
}

/// Model with at most `max_n` vertices fitted on 1–3 random volumes, and a
/// target with at most `max_super` regions.
pub fn random_instance(seed: u64, max_n: usize, max_super: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = [
        rng.random_range(2..6),
        rng.random_range(2..5),
        rng.random_range(1..4),
    ];
    let spacing = [
        rng.random_range(0.5..2.0),
        rng.random_range(0.5..2.0),
        rng.random_range(0.5..2.0),
    ];
    let geometry = Geometry::new(dims, spacing).unwrap();
    let n = rng.random_range(1..=max_n);
    let first = rng.random_range(0..2u32);
    let map: Vec<u32> = (first..first + n as u32).collect();
    let k = rng.random_range(1..=3);
    let srgs: Vec<_> = (0..k)
        .map(|_| {
            let labels = covering_labels(&mut rng, geometry, &map);
            build_srg(&random_scalar(&mut rng, geometry), &labels, &map).unwrap()
        })
        .collect();
    let model = Model::fit(&srgs).unwrap();
    let n_super = rng.random_range(1..=max_super.min(geometry.len()));
    let regions: Vec<u32> = (1..=n_super as u32).collect();
    let supers = covering_labels(&mut rng, geometry, &regions);
    Instance {
        model,
        scalar: random_scalar(&mut rng, geometry),
        supers,
        n_super,
        weights: random_weights(&mut rng),
    }
}

pub fn random_assignment(seed: u64, n_super: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    (0..n_super).map(|_| rng.random_range(0..n)).collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
