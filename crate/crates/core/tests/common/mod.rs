//! Oracles shared by the integration tests. They recompute quantities from
//! first principles (group enumeration, closed formulas) without going through
//! the partition machinery under test.
#![allow(dead_code)]

use nalgebra::{Complex, DMatrix, DVector};
use qperm::latin::LatinRectangle;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn catalan(k: usize) -> usize {
    // C_{i+1} = C_i · 2(2i + 1) / (i + 2), exact at every step.
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c as usize
}

/// Bell numbers from the Bell triangle.
pub fn bell(k: usize) -> usize {
    let mut row = vec![1usize];
    for _ in 0..k {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// All permutations of `0..n`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn decode(mut flat: usize, n: usize, k: usize) -> Vec<usize> {
    let mut idx = vec![0; k];
    for t in (0..k).rev() {
        idx[t] = flat % n;
        flat /= n;
    }
    idx
}

fn encode(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// `(1/N!) Σ_σ σ^{⊗k}` as a dense matrix.
pub fn averaging_projector(n: usize, k: usize) -> DMatrix<f64> {
    let dim = n.pow(k as u32);
    let perms = permutations(n);
    let weight = 1.0 / perms.len() as f64;
    let mut p = DMatrix::zeros(dim, dim);
    for sigma in &perms {
        for col in 0..dim {
            let image: Vec<usize> = decode(col, n, k).iter().map(|&i| sigma[i]).collect();
            p[(encode(&image, n), col)] += weight;
        }
    }
    p
}

/// `dim Fix` of `V^{(w_1)} ⊗ ... ⊗ V^{(w_k)}` under the monomial group `H_N^s`,
/// by averaging the character `Π_t tr(g^{(w_t)})` over all `s^N N!` elements.
pub fn monomial_fix_dim(n: usize, s: u32, word: &[u32]) -> f64 {
    let omega = |x: u32| {
        let a = 2.0 * std::f64::consts::PI * f64::from(x % s) / f64::from(s);
        Complex::new(a.cos(), a.sin())
    };
    let perms = permutations(n);
    let phase_count = (s as usize).pow(n as u32);
    let mut total = Complex::new(0.0, 0.0);
    for sigma in &perms {
        for code in 0..phase_count {
            let c: Vec<u32> = decode(code, s as usize, n).into_iter().map(|x| x as u32).collect();
            let mut prod = Complex::new(1.0, 0.0);
            for &a in word {
                let tr: Complex<f64> =
                    (0..n).filter(|&j| sigma[j] == j).map(|j| omega(a * c[j])).sum();
                prod *= tr;
            }
            total += prod;
        }
    }
    let avg = total / (perms.len() * phase_count) as f64;
    assert!(avg.im.abs() < 1e-9);
    avg.re
}

/// Applies the monomial matrix `e_j ↦ ω^{c_{σ(j)}} e_{σ(j)}`, raised to the
/// letter's power on each colored factor, to a tensor.
pub fn apply_monomial(
    n: usize,
    s: u32,
    word: &[u32],
    sigma: &[usize],
    phases: &[u32],
    v: &DVector<f64>,
) -> DVector<Complex<f64>> {
    let k = word.len();
    let mut out = DVector::from_element(v.len(), Complex::new(0.0, 0.0));
    for col in 0..v.len() {
        let image: Vec<usize> = decode(col, n, k).iter().map(|&i| sigma[i]).collect();
        let exp: u32 = image.iter().zip(word).map(|(&i, &a)| a * phases[i]).sum::<u32>() % s;
        let a = 2.0 * std::f64::consts::PI * f64::from(exp) / f64::from(s);
        out[encode(&image, n)] += Complex::new(a.cos(), a.sin()) * v[col];
    }
    out
}

/// First `r` rows of a circulant square with rows, columns and symbols shuffled.
pub fn random_rectangle<R: Rng>(rng: &mut R, n: usize, r: usize) -> LatinRectangle {
    let mut perms: Vec<Vec<usize>> = (0..3).map(|_| (0..n).collect()).collect();
    for p in &mut perms {
        p.shuffle(rng);
    }
    let rows = (0..r)
        .map(|i| (0..n).map(|j| perms[2][(perms[0][i] + n - perms[1][j]) % n]).collect())
        .collect();
    LatinRectangle::new(n, rows).expect("shuffled circulant rows form a Latin rectangle")
}
