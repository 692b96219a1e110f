#![allow(dead_code)]

use interpret_core::refmodels::{fit_knn, fit_linear, fit_stump, ReferenceModel};
use interpret_core::{Column, Dataset, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Continuous data with a noisy nonlinear target.
pub fn random_dataset(seed: u64, n: usize, p: usize) -> Dataset<f64> {
    let mut r = rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| r.random_range(-3.0..3.0)).collect())
        .collect();
    let y = rows
        .iter()
        .map(|x| {
            x.iter()
                .enumerate()
                .map(|(j, v)| (j as f64 + 1.0) * v)
                .sum::<f64>()
                + x[0] * x[0]
                + r.random_range(-0.5..0.5)
        })
        .collect();
    Dataset::from_rows(&rows, Some(y)).unwrap()
}

/// Linear, 3-nn and stump models fitted to the same data.
pub fn battery(data: &Dataset<f64>) -> Vec<ReferenceModel<f64>> {
    vec![
        fit_linear(data).unwrap().into(),
        fit_knn(data, 3.min(data.n())).unwrap().into(),
        fit_stump(data).unwrap().into(),
    ]
}

/// Two continuous features and a three-level categorical one.
pub fn mixed_dataset(seed: u64, n: usize) -> Dataset<f64> {
    let mut r = rng(seed);
    let mut m = Matrix::with_capacity(3, n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let a: f64 = r.random_range(0.0..1.0);
        let b: f64 = r.random_range(-1.0..1.0);
        let c = (i % 3) as f64;
        m.push_row(&[a, b, c]);
        y.push(2.0 * a - b + if c == 2.0 { 1.5 } else { 0.0 });
    }
    let cols = vec![
        Column::continuous("a"),
        Column::continuous("b"),
        Column::categorical("c", vec!["lo".into(), "mid".into(), "hi".into()]),
    ];
    Dataset::new(m, cols, Some(y)).unwrap()
}

/// Coalition payouts by bitmask through `value`, then Shapley values as the
/// average marginal contribution over all `p!` orderings.
pub fn shapley_by_orderings(p: usize, value: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut perm: Vec<usize> = (0..p).collect();
    let mut totals = vec![0.0; p];
    let mut count = 0usize;
    permutations(&mut perm, 0, &mut |order| {
        let mut mask = 0usize;
        for &j in order {
            let before = value(mask);
            mask |= 1 << j;
            totals[j] += value(mask) - before;
        }
        count += 1;
    });
    totals.iter().map(|t| t / count as f64).collect()
}

fn permutations(v: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        visit(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, visit);
        v.swap(k, i);
    }
}

pub fn mask_members(mask: usize, p: usize) -> Vec<usize> {
    (0..p).filter(|j| mask & (1 << j) != 0).collect()
}
