#![allow(dead_code)]

//! Brute-force reference implementations over the full power set. Mass
//! functions are dense vectors indexed by bitmask; nothing here calls the
//! library except to convert in and out.

use credal::{Frame, MassFunction, Subset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<f64>;

pub fn to_dense(m: &MassFunction) -> Dense {
    let size = 1usize << m.frame().len();
    (0..size)
        .map(|b| m.mass(Subset::from_bits(b as u32)))
        .collect()
}

pub fn from_dense(frame: &Frame, d: &[f64]) -> MassFunction {
    MassFunction::new(
        frame,
        d.iter()
            .enumerate()
            .map(|(b, &v)| (Subset::from_bits(b as u32), v)),
    )
    .expect("dense vector is normalized")
}

fn pair_rule(m1: &[f64], m2: &[f64], target: impl Fn(usize, usize) -> Option<usize>) -> Dense {
    let mut out = vec![0.0; m1.len()];
    for (a, &x) in m1.iter().enumerate() {
        for (b, &y) in m2.iter().enumerate() {
            if let Some(t) = target(a, b) {
                out[t] += x * y;
            }
        }
    }
    out
}

pub fn conjunctive(m1: &[f64], m2: &[f64]) -> Dense {
    pair_rule(m1, m2, |a, b| Some(a & b))
}

pub fn dempster(m1: &[f64], m2: &[f64]) -> Dense {
    let mut out = conjunctive(m1, m2);
    let k = out[0];
    out[0] = 0.0;
    out.iter_mut().for_each(|v| *v /= 1.0 - k);
    out
}

pub fn disjunctive(m1: &[f64], m2: &[f64]) -> Dense {
    pair_rule(m1, m2, |a, b| Some(a | b))
}

pub fn mixed(m1: &[f64], m2: &[f64]) -> Dense {
    pair_rule(m1, m2, |a, b| match (a & b, a | b) {
        (0, 0) => None,
        (0, u) => Some(u),
        (i, _) => Some(i),
    })
}

/// Three-source mixed rule: the common intersection if nonempty, else the
/// union of all three.
pub fn mixed_joint3(m1: &[f64], m2: &[f64], m3: &[f64]) -> Dense {
    let mut out = vec![0.0; m1.len()];
    for (a, &x) in m1.iter().enumerate() {
        for (b, &y) in m2.iter().enumerate() {
            for (c, &z) in m3.iter().enumerate() {
                let t = if a & b & c != 0 { a & b & c } else { a | b | c };
                if t != 0 {
                    out[t] += x * y * z;
                }
            }
        }
    }
    out
}

pub fn bel(m: &[f64], a: usize) -> f64 {
    (1..m.len()).filter(|&b| b & !a == 0).map(|b| m[b]).sum()
}

pub fn pl(m: &[f64], a: usize) -> f64 {
    (1..m.len()).filter(|&b| b & a != 0).map(|b| m[b]).sum()
}

pub fn betp(m: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            (1..m.len())
                .filter(|&b| b >> i & 1 == 1)
                .map(|b| m[b] / f64::from((b as u32).count_ones()))
                .sum::<f64>()
                / (1.0 - m[0])
        })
        .collect()
}

pub fn jaccard(a: usize, b: usize) -> f64 {
    if a | b == 0 {
        1.0
    } else {
        f64::from(((a & b) as u32).count_ones()) / f64::from(((a | b) as u32).count_ones())
    }
}

pub fn jousselme(m1: &[f64], m2: &[f64]) -> f64 {
    let d: Vec<f64> = m1.iter().zip(m2).map(|(x, y)| x - y).collect();
    let mut q = 0.0;
    for (a, &da) in d.iter().enumerate() {
        for (b, &db) in d.iter().enumerate() {
            q += da * jaccard(a, b) * db;
        }
    }
    (0.5 * q.max(0.0)).sqrt()
}

pub fn max_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Random normalized dense mass function with between 1 and 2^n − 1
/// nonempty focal sets; `with_empty` may also put mass on ∅.
pub fn random_dense(rng: &mut impl Rng, n: usize, with_empty: bool) -> Dense {
    let size = 1usize << n;
    let mut d = vec![0.0; size];
    let focal = rng.random_range(1..size);
    for _ in 0..focal {
        d[rng.random_range(1..size)] += rng.random::<f64>() + 1e-3;
    }
    if with_empty && rng.random_bool(0.3) {
        d[0] = rng.random::<f64>() * 0.3;
    }
    let total: f64 = d.iter().sum();
    d.iter_mut().for_each(|v| *v /= total);
    d
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
