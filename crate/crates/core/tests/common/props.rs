//! Property checks shared by the proptest suites and the acceptance run.

use std::collections::VecDeque;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use srg_core::io::{decode_labels, decode_scalar, raw};
use srg_core::matching::{exhaustive_with, greedy_with};
use srg_core::superseg::GradientVolume;
use srg_core::{
    build_srg, dice_report, evaluate, watershed, DistanceSpec, Geometry, LabelVolume, ScalarVolume,
};

use super::{random_assignment, random_instance};

pub const CASES: u32 = 64;

fn geometry(max: usize) -> impl Strategy<Value = Geometry> {
    (
        [1..=max, 1..=max, 1..=max],
        [0.5..2.0f64, 0.5..2.0f64, 0.5..2.0f64],
    )
        .prop_map(|(d, s)| Geometry::new(d, s).unwrap())
}

/// Random intensities and labels `0..4` over a small random grid.
pub fn volume_pair() -> impl Strategy<Value = (ScalarVolume, LabelVolume)> {
    geometry(6).prop_flat_map(|g| {
        (
            prop::collection::vec(-100.0..100.0f64, g.len()),
            prop::collection::vec(0..4u32, g.len()),
        )
            .prop_map(move |(s, l)| {
                (
                    ScalarVolume::new(g, s).unwrap(),
                    LabelVolume::new(g, l).unwrap(),
                )
            })
    })
}

/// Two labelings of one grid.
pub fn label_pair() -> impl Strategy<Value = (LabelVolume, LabelVolume)> {
    geometry(6).prop_flat_map(|g| {
        (
            prop::collection::vec(0..4u32, g.len()),
            prop::collection::vec(0..4u32, g.len()),
        )
            .prop_map(move |(a, b)| {
                (
                    LabelVolume::new(g, a).unwrap(),
                    LabelVolume::new(g, b).unwrap(),
                )
            })
    })
}

/// Non-negative relief with frequent plateaus.
pub fn relief() -> impl Strategy<Value = GradientVolume> {
    geometry(7).prop_flat_map(|g| {
        prop::collection::vec(0..6u8, g.len()).prop_map(move |v| {
            GradientVolume::new(
                ScalarVolume::new(g, v.into_iter().map(f64::from).collect()).unwrap(),
            )
            .unwrap()
        })
    })
}

pub fn finite_f64() -> impl Strategy<Value = f64> {
    use prop::num::f64::{NEGATIVE, NORMAL, POSITIVE, SUBNORMAL, ZERO};
    POSITIVE | NEGATIVE | NORMAL | SUBNORMAL | ZERO
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn antisymmetry((scalar, labels): (ScalarVolume, LabelVolume)) -> Result<(), TestCaseError> {
    let map = labels.distinct_labels_with_background();
    let g = build_srg(&scalar, &labels, &map).unwrap();
    for i in 0..g.n() {
        for j in 0..g.n() {
            if i == j {
                continue;
            }
            let (a, b) = (g.edge(i, j).unwrap(), g.edge(j, i).unwrap());
            for k in 0..3 {
                prop_assert_eq!(a.centroid_vector[k], -b.centroid_vector[k]);
            }
            prop_assert_eq!(a.contrast, -b.contrast);
            prop_assert!(close(a.volume_ratio * b.volume_ratio, 1.0, 1e-12));
        }
    }
    Ok(())
}

/// Embeds the volume at `offset` voxels inside a padded grid.
pub fn translation(
    ((scalar, labels), offset): ((ScalarVolume, LabelVolume), [usize; 3]),
) -> Result<(), TestCaseError> {
    let g = scalar.geometry();
    let dims = [0, 1, 2].map(|k| g.dims[k] + offset[k] + 2);
    let big = Geometry::new(dims, g.spacing).unwrap();
    let inside = |x: usize, y: usize, z: usize| {
        let p = [x, y, z];
        (0..3).all(|k| p[k] >= offset[k] && p[k] - offset[k] < g.dims[k])
    };
    let moved_s = ScalarVolume::from_fn(big, |x, y, z| {
        if inside(x, y, z) {
            scalar.get(x - offset[0], y - offset[1], z - offset[2])
        } else {
            0.0
        }
    })
    .unwrap();
    let moved_l = LabelVolume::from_fn(big, |x, y, z| {
        if inside(x, y, z) {
            labels.get(x - offset[0], y - offset[1], z - offset[2]) + 1
        } else {
            0
        }
    })
    .unwrap();
    let map = labels.distinct_labels_with_background();
    let shifted_map: Vec<u32> = map.iter().map(|l| l + 1).collect();
    let a = build_srg(&scalar, &labels, &map).unwrap();
    let b = build_srg(&moved_s, &moved_l, &shifted_map).unwrap();
    for i in 0..a.n() {
        let (va, vb) = (a.vertex(i).unwrap(), b.vertex(i).unwrap());
        for (k, &o) in offset.iter().enumerate() {
            let expected = va.centroid[k] + o as f64 * g.spacing[k];
            prop_assert!(
                close(vb.centroid[k], expected, 1e-12),
                "{} vs {}",
                vb.centroid[k],
                expected
            );
        }
        prop_assert_eq!(va.mean_intensity, vb.mean_intensity);
        prop_assert_eq!(va.volume, vb.volume);
        for j in 0..a.n() {
            if i != j {
                let (ea, eb) = (a.edge(i, j).unwrap(), b.edge(i, j).unwrap());
                for k in 0..3 {
                    prop_assert!(close(ea.centroid_vector[k], eb.centroid_vector[k], 1e-12));
                }
                prop_assert_eq!(ea.volume_ratio, eb.volume_ratio);
                prop_assert_eq!(ea.contrast, eb.contrast);
            }
        }
    }
    Ok(())
}

pub fn intensity_shift(
    ((scalar, labels), c): ((ScalarVolume, LabelVolume), f64),
) -> Result<(), TestCaseError> {
    let map = labels.distinct_labels_with_background();
    let a = build_srg(&scalar, &labels, &map).unwrap();
    let b = build_srg(&scalar.map(|v| v + c).unwrap(), &labels, &map).unwrap();
    for i in 0..a.n() {
        let (va, vb) = (a.vertex(i).unwrap(), b.vertex(i).unwrap());
        prop_assert!(close(vb.mean_intensity, va.mean_intensity + c, 1e-12));
        prop_assert_eq!(va.centroid, vb.centroid);
        prop_assert_eq!(va.volume, vb.volume);
        for j in 0..a.n() {
            if i != j {
                let (ea, eb) = (a.edge(i, j).unwrap(), b.edge(i, j).unwrap());
                prop_assert!((ea.contrast - eb.contrast).abs() <= 1e-12 * 200.0);
                prop_assert_eq!(ea.centroid_vector, eb.centroid_vector);
            }
        }
    }
    Ok(())
}

/// Cost is affine in alpha between the pure-vertex and pure-edge costs.
pub fn alpha_affinity((seed, alpha): (u64, f64)) -> Result<(), TestCaseError> {
    let inst = random_instance(seed, 3, 5);
    let a = random_assignment(seed, inst.n_super, inst.model.n());
    let cost = |alpha: f64| {
        evaluate(
            &a,
            &inst.supers,
            &inst.scalar,
            &inst.model,
            &inst.weights.with_alpha(alpha),
        )
        .unwrap()
        .report
        .total
    };
    let (t1, t0, t) = (cost(1.0), cost(0.0), cost(alpha));
    let expected = alpha * t1 + (1.0 - alpha) * t0;
    prop_assert!(
        (t - expected).abs() <= 1e-12 * (t1.abs() + t0.abs()),
        "{t} vs {expected}"
    );
    Ok(())
}

/// Rescaling every normalization (and the EMPTY charge with it) by a power
/// of two leaves the greedy and exhaustive choices unchanged.
pub fn argmin_scale((seed, e): (u64, i32)) -> Result<(), TestCaseError> {
    let inst = random_instance(seed, 3, 5);
    let f = 2f64.powi(e);
    let dist = DistanceSpec::from_stats(&inst.model.stats);
    let scaled = dist.scaled(f);
    let table = inst.table();
    let sup = table.super_graph();
    let w = inst.weights;
    prop_assert_eq!(
        greedy_with(&sup, &inst.model.graph, &dist, &w),
        greedy_with(&sup, &inst.model.graph, &scaled, &w)
    );
    let mut ws = w;
    ws.empty_penalty = w.empty_penalty / f;
    let (a, ca) = exhaustive_with(&table, &inst.model, &dist, &w, 1 << 20).unwrap();
    let (b, cb) = exhaustive_with(&table, &inst.model, &scaled, &ws, 1 << 20).unwrap();
    prop_assert_eq!(a, b);
    prop_assert!(close(ca.total / f, cb.total, 1e-15));
    Ok(())
}

fn is_connected(labels: &LabelVolume, label: u32) -> bool {
    let g = labels.geometry();
    let members: Vec<usize> = (0..g.len())
        .filter(|&i| labels.data()[i] == label)
        .collect();
    let Some(&start) = members.first() else {
        return false;
    };
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 0;
    while let Some(i) = queue.pop_front() {
        reached += 1;
        for &j in g.neighbors6(i).as_slice() {
            if !seen[j] && labels.data()[j] == label {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    reached == members.len()
}

pub fn watershed_complete((grad, h): (GradientVolume, f64)) -> Result<(), TestCaseError> {
    let r = watershed(&grad, h).unwrap();
    prop_assert!(r.n_super >= 1);
    prop_assert!(r
        .labels
        .data()
        .iter()
        .all(|&l| l >= 1 && l as usize <= r.n_super));
    for l in 1..=r.n_super as u32 {
        prop_assert!(is_connected(&r.labels, l), "region {} missing or split", l);
    }
    Ok(())
}

pub fn watershed_deterministic((grad, h): (GradientVolume, f64)) -> Result<(), TestCaseError> {
    let a = watershed(&grad, h).unwrap();
    let b = watershed(&grad.clone(), h).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn watershed_monotone((grad, h1, dh): (GradientVolume, f64, f64)) -> Result<(), TestCaseError> {
    let a = watershed(&grad, h1).unwrap().n_super;
    let b = watershed(&grad, h1 + dh).unwrap().n_super;
    prop_assert!(
        b <= a,
        "n_super {} at h={} but {} at h={}",
        a,
        h1,
        b,
        h1 + dh
    );
    Ok(())
}

pub fn dice_bounds_symmetry((a, b): (LabelVolume, LabelVolume)) -> Result<(), TestCaseError> {
    let mut map = a.distinct_labels_with_background();
    map.extend(b.distinct_labels_with_background());
    map.push(9);
    map.sort_unstable();
    map.dedup();
    let ab = dice_report(&a, &b, &map).unwrap();
    let ba = dice_report(&b, &a, &map).unwrap();
    for (x, y) in ab.structures.iter().zip(&ba.structures) {
        prop_assert_eq!(x.dice, y.dice);
        prop_assert!((0.0..=1.0).contains(&x.dice));
    }
    prop_assert_eq!(ab.macro_dice, ba.macro_dice);
    prop_assert!((0.0..=1.0).contains(&ab.macro_dice));
    Ok(())
}

pub fn raw_roundtrip_scalar(v: ScalarVolume) -> Result<(), TestCaseError> {
    let back = decode_scalar(&raw::encode_scalar(&v).unwrap()).unwrap();
    prop_assert_eq!(back.geometry(), v.geometry());
    prop_assert!(back
        .data()
        .iter()
        .zip(v.data())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
    Ok(())
}

pub fn raw_roundtrip_labels(v: LabelVolume) -> Result<(), TestCaseError> {
    let back = decode_labels(&raw::encode_labels(&v).unwrap()).unwrap();
    prop_assert_eq!(back, v);
    Ok(())
}

pub fn any_scalar_volume() -> impl Strategy<Value = ScalarVolume> {
    (
        [1..=5usize, 1..=5usize, 1..=5usize],
        [1e-3..1e3f64, 1e-3..1e3f64, 1e-3..1e3f64],
    )
        .prop_flat_map(|(d, s)| {
            let g = Geometry::new(d, s).unwrap();
            prop::collection::vec(finite_f64(), g.len())
                .prop_map(move |v| ScalarVolume::new(g, v).unwrap())
        })
}

pub fn any_label_volume() -> impl Strategy<Value = LabelVolume> {
    geometry(5).prop_flat_map(|g| {
        prop::collection::vec(any::<u32>(), g.len())
            .prop_map(move |v| LabelVolume::new(g, v).unwrap())
    })
}

fn run<S: Strategy>(
    name: &'static str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
    cases: u32,
) -> (&'static str, Result<(), String>) {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    (name, runner.run(&strategy, test).map_err(|e| e.to_string()))
}

/// Every invariant suite, each over `cases` generated inputs.
pub fn run_all(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        run("edge antisymmetry", volume_pair(), antisymmetry, cases),
        run(
            "translation equivariance",
            (volume_pair(), [0..4usize, 0..4usize, 0..4usize]),
            translation,
            cases,
        ),
        run(
            "intensity shift",
            (volume_pair(), -50.0..50.0f64),
            intensity_shift,
            cases,
        ),
        run(
            "alpha affinity",
            (any::<u64>(), 0.0..=1.0f64),
            alpha_affinity,
            cases,
        ),
        run(
            "argmin scale invariance",
            (any::<u64>(), -3..=3i32),
            argmin_scale,
            cases,
        ),
        run(
            "watershed completeness",
            (relief(), 0.0..4.0f64),
            watershed_complete,
            cases,
        ),
        run(
            "watershed determinism",
            (relief(), 0.0..4.0f64),
            watershed_deterministic,
            cases,
        ),
        run(
            "watershed monotonicity",
            (relief(), 0.0..3.0f64, 0.0..3.0f64),
            watershed_monotone,
            cases,
        ),
        run(
            "dice bounds and symmetry",
            label_pair(),
            dice_bounds_symmetry,
            cases,
        ),
        run(
            "raw round-trip (scalar)",
            any_scalar_volume(),
            raw_roundtrip_scalar,
            cases,
        ),
        run(
            "raw round-trip (labels)",
            any_label_volume(),
            raw_roundtrip_labels,
            cases,
        ),
    ]
}
