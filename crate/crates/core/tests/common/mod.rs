#![allow(dead_code)]

use pastent::{Distribution, FamilyTag};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FAMILIES: [FamilyTag; 4] = [
    FamilyTag::Uniform,
    FamilyTag::Exp,
    FamilyTag::Weibull,
    FamilyTag::Power,
];

/// Parameter box used by the sweeps, per family.
pub fn param_box(tag: FamilyTag) -> &'static [(f64, f64)] {
    match tag {
        FamilyTag::Uniform => &[(0.5, 5.0)],
        FamilyTag::Exp => &[(0.2, 3.0)],
        FamilyTag::Weibull => &[(0.6, 3.0), (0.5, 3.0)],
        FamilyTag::Power => &[(0.3, 3.0), (0.5, 3.0)],
    }
}

/// `n` seeded random members of `tag` drawn uniformly from its box.
pub fn draws(tag: FamilyTag, n: usize, seed: u64) -> Vec<Distribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p: Vec<f64> = param_box(tag)
                .iter()
                .map(|&(lo, hi)| rng.gen_range(lo..hi))
                .collect();
            Distribution::from_params(tag, &p).unwrap()
        })
        .collect()
}

/// Proptest strategy over all families with parameters in their boxes.
pub fn any_dist() -> impl Strategy<Value = Distribution> {
    (0..4usize, 0.0..1.0f64, 0.0..1.0f64).prop_map(|(i, a, b)| {
        let tag = FAMILIES[i];
        let p: Vec<f64> = param_box(tag)
            .iter()
            .zip([a, b])
            .map(|(&(lo, hi), s)| lo + (hi - lo) * s)
            .collect();
        Distribution::from_params(tag, &p).unwrap()
    })
}

/// `n` evenly spaced interior times between `max(0.1, Q(0.02))` and `Q(0.98)`.
pub fn interior_grid(d: &Distribution, n: usize) -> Vec<f64> {
    let lo = d.quantile(0.02).unwrap().max(0.1);
    let hi = d.quantile(0.98).unwrap();
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Five-point central difference.
pub fn diff5<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}
