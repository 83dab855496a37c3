//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use isi_ecc::BitSequence;

/// Weight-`i` words of width `m`, by enumerating all words, filtering and
/// sorting by decreasing value.
pub fn enumerate_weight_class(m: u32, i: u32) -> Vec<String> {
    let mut values: Vec<u64> = (0..1u64 << m).filter(|v| v.count_ones() == i).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values
        .into_iter()
        .map(|v| format!("{v:0width$b}", width = m as usize))
        .collect()
}

/// Codebook rows straight from the construction text: message value
/// `2^k - r`, parity body the `r`-th entry of the weight-sorted stack.
pub fn reference_codebook(k: u32, m: u32) -> Vec<String> {
    let size = 1usize << k;
    let mut parity: Vec<(String, u32)> = Vec::new();
    let mut weight = 0;
    while parity.len() < size {
        for p in enumerate_weight_class(m, weight) {
            parity.push((p, weight));
        }
        weight += 1;
    }
    (0..size)
        .map(|r| {
            let msg = format!("{:0width$b}", size - 1 - r, width = k as usize);
            let (p, w) = &parity[r];
            format!("{msg}{p}{}", if w % 2 == 0 { 1 } else { 0 })
        })
        .collect()
}

/// erfc from the Maclaurin series of erf for small arguments and a
/// Lentz-evaluated continued fraction for large ones.
pub fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_oracle(-x);
    }
    if x < 1.5 {
        // erf(x) = 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for j in 1..500 {
            let a = j as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / f
    }
}

/// `sum_{j < i} c_j p_{i-j+1}` with 1-based `i` and `p[0] = p_1`.
pub fn isi_direct(c: &[u8], i: usize, p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for j in 1..i {
        if c[j - 1] == 1 {
            acc += p[i - j];
        }
    }
    acc
}

pub fn bits(s: &str) -> BitSequence {
    s.parse().unwrap()
}
