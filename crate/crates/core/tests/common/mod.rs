//! Generators and brute-force reference computations shared by the
//! integration tests. Nothing here calls the sweep code under test.

#![allow(dead_code)]

use ipool::kernels::student_t_quantile;
use ipool::{Interval, IntervalDataset, Label, SeedStream};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    SeedStream::new(seed, stream).rng()
}

/// Random dataset where no interval strictly contains another: the pairwise
/// min/max of two sorted samples gives lows and highs that sort together.
pub fn no_nesting<R: Rng>(rng: &mut R, n: usize, spread: f64) -> IntervalDataset {
    let mut a: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..spread)).collect();
    let mut b: Vec<f64> = (0..n).map(|_| rng.gen_range(-spread..spread)).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut items: Vec<Interval> =
        a.iter().zip(&b).map(|(&x, &y)| Interval::new(x.min(y), x.max(y)).unwrap()).collect();
    items.shuffle(rng);
    IntervalDataset::new(items, Label::default())
}

/// Arbitrary dataset, nesting allowed.
pub fn arbitrary<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64, max_width: f64) -> IntervalDataset {
    (0..n)
        .map(|_| {
            let a = rng.gen_range(lo..hi);
            let w = rng.gen_range(0.0..max_width);
            Interval::new(a, a + w).unwrap()
        })
        .collect()
}

/// Point dataset obtained by choosing an endpoint of each interval; bit `i`
/// of `mask` selects the upper endpoint of interval `i`.
pub fn selection(ds: &IntervalDataset, mask: u64) -> Vec<f64> {
    ds.iter().enumerate().map(|(i, x)| if mask >> i & 1 == 1 { x.hi() } else { x.lo() }).collect()
}

pub fn t_limits(xs: &[f64], alpha: f64) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let s2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = student_t_quantile(xs.len() as u32 - 1, 1.0 - alpha / 2.0).unwrap() * (s2 / n).sqrt();
    (mean - half, mean + half)
}

/// `[min L, max U]` over all `2^N` endpoint selections.
pub fn exhaustive_t_hull(ds: &IntervalDataset, alpha: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for mask in 0..1u64 << ds.len() {
        let (l, u) = t_limits(&selection(ds, mask), alpha);
        lo = lo.min(l);
        hi = hi.max(u);
    }
    (lo, hi)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
