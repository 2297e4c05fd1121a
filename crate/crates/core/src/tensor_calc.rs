//! Dense linear algebra on tensor powers of `C^N`.
//!
//! Multi-indices are flattened row-major with the first tensor slot most
//! significant. A [`TensorOperator`] of degrees `(k_in, k_out)` is a
//! `N^k_out × N^k_in` matrix; `k_in = 0` gives a vector of `(C^N)^{⊗k_out}`.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{self, IntMatrix};
use crate::partitions::{delta_unchecked, join, Partition};

/// Default cap on the number of entries of a dense tensor space.
pub const DEFAULT_TENSOR_CAP: u128 = 100_000_000;

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarKind {
    ExactInteger,
    ExactRational,
    Float,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Entries {
    Integer(Vec<i64>),
    Rational(Vec<BigRational>),
    Float(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    n: usize,
    k_in: usize,
    k_out: usize,
    entries: Entries,
}

/// `base^exp` as a `u128`, saturating.
pub fn pow_u128(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

pub(crate) fn check_cap(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        return Err(Error::Resource {
            what: what.to_string(),
            needed,
            cap,
        });
    }
    Ok(())
}

/// Decodes a flat index into `k` digits base `n`, first slot most significant.
pub fn decode_index(mut flat: usize, n: usize, k: usize, out: &mut [usize]) {
    for slot in (0..k).rev() {
        out[slot] = flat % n;
        flat /= n;
    }
}

pub fn encode_index(index: &[usize], n: usize) -> usize {
    index.iter().fold(0, |acc, &i| acc * n + i)
}

impl TensorOperator {
    pub fn from_entries(n: usize, k_in: usize, k_out: usize, entries: Entries) -> Result<Self> {
        let expected = pow_u128(n, k_in + k_out);
        let len = match &entries {
            Entries::Integer(v) => v.len(),
            Entries::Rational(v) => v.len(),
            Entries::Float(v) => v.len(),
        };
        if len as u128 != expected {
            return domain(format!(
                "operator on (C^{n})^{k_in} -> (C^{n})^{k_out} needs {expected} entries, got {len}"
            ));
        }
        Ok(TensorOperator {
            n,
            k_in,
            k_out,
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_in(&self) -> usize {
        self.k_in
    }

    pub fn k_out(&self) -> usize {
        self.k_out
    }

    pub fn rows(&self) -> usize {
        self.n.pow(self.k_out as u32)
    }

    pub fn cols(&self) -> usize {
        self.n.pow(self.k_in as u32)
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scalar_kind(&self) -> ScalarKind {
        match self.entries {
            Entries::Integer(_) => ScalarKind::ExactInteger,
            Entries::Rational(_) => ScalarKind::ExactRational,
            Entries::Float(_) => ScalarKind::Float,
        }
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn entry_f64(&self, row: usize, col: usize) -> f64 {
        let i = row * self.cols() + col;
        match &self.entries {
            Entries::Integer(v) => v[i] as f64,
            Entries::Rational(v) => exact::rational_to_f64(&v[i]),
            Entries::Float(v) => v[i],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.entries {
            Entries::Integer(v) => v.iter().map(|&x| x as f64).collect(),
            Entries::Rational(v) => v.iter().map(exact::rational_to_f64).collect(),
            Entries::Float(v) => v.clone(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.cols(), &self.to_f64_vec())
    }

    /// Exact entries as rationals; `None` for float operators.
    pub fn to_rational_vec(&self) -> Option<Vec<BigRational>> {
        match &self.entries {
            Entries::Integer(v) => Some(
                v.iter()
                    .map(|&x| BigRational::from_integer(BigInt::from(x)))
                    .collect(),
            ),
            Entries::Rational(v) => Some(v.clone()),
            Entries::Float(_) => None,
        }
    }

    /// Exact kinds compare bit-exactly, anything involving floats up to `tol`.
    pub fn approx_eq(&self, other: &TensorOperator, tol: f64) -> bool {
        if (self.n, self.k_in, self.k_out) != (other.n, other.k_in, other.k_out) {
            return false;
        }
        match (self.to_rational_vec(), other.to_rational_vec()) {
            (Some(a), Some(b)) => a == b,
            _ => self
                .to_f64_vec()
                .iter()
                .zip(other.to_f64_vec())
                .all(|(a, b)| (a - b).abs() <= tol),
        }
    }

    pub fn to_json(&self) -> OperatorJson {
        let entries = match &self.entries {
            Entries::Integer(v) => v.iter().map(|&x| serde_json::Value::from(x)).collect(),
            Entries::Rational(v) => v
                .iter()
                .map(|x| serde_json::Value::from(exact::rational_to_string(x)))
                .collect(),
            Entries::Float(v) => v.iter().map(|&x| serde_json::Value::from(x)).collect(),
        };
        OperatorJson {
            shape: [self.rows(), self.cols()],
            n: self.n,
            k_in: self.k_in,
            k_out: self.k_out,
            scalar_kind: self.scalar_kind(),
            entries,
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        let bad = |i: usize| Error::Domain(format!("entry {i} does not match the scalar kind"));
        let entries = match json.scalar_kind {
            ScalarKind::ExactInteger => Entries::Integer(
                json.entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.as_i64().ok_or_else(|| bad(i)))
                    .collect::<Result<_>>()?,
            ),
            ScalarKind::ExactRational => Entries::Rational(
                json.entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.as_str()
                            .and_then(exact::parse_rational)
                            .ok_or_else(|| bad(i))
                    })
                    .collect::<Result<_>>()?,
            ),
            ScalarKind::Float => Entries::Float(
                json.entries
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v.as_f64().ok_or_else(|| bad(i)))
                    .collect::<Result<_>>()?,
            ),
        };
        Self::from_entries(json.n, json.k_in, json.k_out, entries)
    }
}

/// Portable JSON container for operators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorJson {
    pub shape: [usize; 2],
    pub n: usize,
    pub k_in: usize,
    pub k_out: usize,
    pub scalar_kind: ScalarKind,
    pub entries: Vec<serde_json::Value>,
}

/// `T_p^{k,l,N}`: entry `(j, i)` is `δ_p(ij)` where `ij` concatenates the input
/// index `i` (k slots) and the output index `j` (l slots).
pub fn partition_map(p: &Partition, k: usize, l: usize, n: usize) -> Result<TensorOperator> {
    partition_map_with_cap(p, k, l, n, DEFAULT_TENSOR_CAP)
}

pub fn partition_map_with_cap(
    p: &Partition,
    k: usize,
    l: usize,
    n: usize,
    cap: u128,
) -> Result<TensorOperator> {
    if p.k() != k + l {
        return domain(format!("partition of [{}] used as a map of degree ({k}, {l})", p.k()));
    }
    if n == 0 {
        return domain("local dimension N must be at least 1");
    }
    check_cap("partition map", pow_u128(n, k + l), cap)?;
    let rows = n.pow(l as u32);
    let cols = n.pow(k as u32);
    let mut entries = vec![0i64; rows * cols];
    let mut idx = vec![0usize; k + l];
    for row in 0..rows {
        decode_index(row, n, l, &mut idx[k..]);
        for col in 0..cols {
            decode_index(col, n, k, &mut idx[..k]);
            if delta_unchecked(p, &idx) {
                entries[row * cols + col] = 1;
            }
        }
    }
    TensorOperator::from_entries(n, k, l, Entries::Integer(entries))
}

/// `ξ_p ∈ (C^N)^{⊗k}` as a float vector, generated from block assignments
/// instead of scanning all multi-indices.
pub fn partition_vector(p: &Partition, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n.pow(p.k() as u32)];
    fill_partition_vector(p, n, &mut out);
    out
}

pub(crate) fn fill_partition_vector(p: &Partition, n: usize, out: &mut [f64]) {
    let nb = p.num_blocks();
    let mut values = vec![0usize; nb];
    let labels = p.labels();
    loop {
        let flat = labels.iter().fold(0, |acc, &l| acc * n + values[l]);
        out[flat] = 1.0;
        let mut b = nb;
        loop {
            if b == 0 {
                return;
            }
            b -= 1;
            values[b] += 1;
            if values[b] < n {
                break;
            }
            values[b] = 0;
        }
    }
}

/// Exact Gram matrix of partition vectors: `<ξ_p, ξ_q> = N^{|p ∨ q|}`.
pub fn gram_matrix(family: &[Partition], n: usize) -> Result<IntMatrix> {
    if let Some(first) = family.first() {
        if family.iter().any(|p| p.k() != first.k()) {
            return domain("Gram matrix of partitions of different sizes");
        }
    }
    let nb = BigInt::from(n);
    family
        .iter()
        .map(|p| {
            family
                .iter()
                .map(|q| Ok(num_traits::pow(nb.clone(), join(p, q)?.num_blocks())))
                .collect()
        })
        .collect()
}

/// Numerical rank: singular values above `tol · σ_max`.
pub fn span_rank(vectors: &[TensorOperator], tol: f64) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return domain("span_rank over operators of different shapes");
    }
    let cols: Vec<DVector<f64>> = vectors
        .iter()
        .map(|v| DVector::from_vec(v.to_f64_vec()))
        .collect();
    Ok(Subspace::from_vectors(len, &cols, tol).dim())
}

/// Exact rank over `Q`, via the rank of the exact Gram matrix.
pub fn exact_span_rank(vectors: &[TensorOperator]) -> Result<usize> {
    let Some(first) = vectors.first() else {
        return Ok(0);
    };
    let len = first.len();
    if vectors.iter().any(|v| v.len() != len) {
        return domain("exact_span_rank over operators of different shapes");
    }
    let mut scaled: Vec<Vec<BigInt>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let rat = v
            .to_rational_vec()
            .ok_or_else(|| Error::Domain("exact rank of a float operator".into()))?;
        let lcm = rat
            .iter()
            .fold(BigInt::from(1), |acc, x| num_integer::lcm(acc, x.denom().clone()));
        scaled.push(rat.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    let gram: IntMatrix = scaled
        .iter()
        .map(|a| {
            scaled
                .iter()
                .map(|b| {
                    a.iter()
                        .zip(b)
                        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                        .map(|(x, y)| x * y)
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(exact::rank_int(&gram))
}

/// A subspace of `R^n` with an orthonormal basis (columns of `basis`).
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
    tol: f64,
    near_tolerance: bool,
}

fn in_ambiguity_band(x: f64, tol: f64) -> bool {
    x > tol / 10.0 && x < tol * 10.0
}

impl Subspace {
    pub fn zero(ambient_dim: usize, tol: f64) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
            tol,
            near_tolerance: false,
        }
    }

    /// Orthonormalizes a spanning family (columns normalized first, then SVD).
    /// Directions with `σ > tol · σ_max` are kept.
    pub fn from_vectors(ambient_dim: usize, vectors: &[DVector<f64>], tol: f64) -> Self {
        let nonzero: Vec<DVector<f64>> = vectors
            .iter()
            .filter_map(|v| {
                let norm = v.norm();
                (norm > 0.0).then(|| v / norm)
            })
            .collect();
        if nonzero.is_empty() {
            return Self::zero(ambient_dim, tol);
        }
        let a = DMatrix::from_columns(&nonzero);
        Self::from_matrix_columns(a, tol)
    }

    fn from_matrix_columns(a: DMatrix<f64>, tol: f64) -> Self {
        let ambient_dim = a.nrows();
        // The thin SVD needs rows >= cols; fall back to A·Aᵀ's range otherwise.
        let a = if a.ncols() > a.nrows() {
            &a * a.transpose()
        } else {
            a
        };
        let svd = a.svd(true, false);
        let u = svd.u.expect("requested U");
        let sigma = &svd.singular_values;
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return Self::zero(ambient_dim, tol);
        }
        let mut keep = Vec::new();
        let mut near = false;
        for (i, &s) in sigma.iter().enumerate() {
            let rel = s / smax;
            near |= in_ambiguity_band(rel, tol);
            if rel > tol {
                keep.push(u.column(i).into_owned());
            }
        }
        let basis = if keep.is_empty() {
            DMatrix::zeros(ambient_dim, 0)
        } else {
            DMatrix::from_columns(&keep)
        };
        Subspace {
            ambient_dim,
            basis,
            tol,
            near_tolerance: near,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Whether a singular value fell within a factor of 10 of the tolerance.
    pub fn near_tolerance(&self) -> bool {
        self.near_tolerance
    }

    /// Orthogonal projection of `v` onto this subspace.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.dim() == 0 {
            return DVector::zeros(self.ambient_dim);
        }
        &self.basis * (self.basis.transpose() * v)
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        self.distance(v) <= tol * v.norm().max(1.0)
    }

    /// Orthonormal basis of the directions of `self` orthogonal to `other`:
    /// left singular vectors of `(I - Q_o Q_oᵀ) Q_self` whose sines exceed `tol`.
    pub fn complement_within(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 {
            return Subspace::zero(self.ambient_dim, self.tol);
        }
        let residual = if other.dim() == 0 {
            self.basis.clone()
        } else {
            &self.basis - &other.basis * (other.basis.transpose() * &self.basis)
        };
        let svd = residual.svd(true, false);
        let u = svd.u.expect("requested U");
        let keep: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > self.tol)
            .map(|(i, _)| u.column(i).into_owned())
            .collect();
        let basis = if keep.is_empty() {
            DMatrix::zeros(self.ambient_dim, 0)
        } else {
            DMatrix::from_columns(&keep)
        };
        Subspace {
            ambient_dim: self.ambient_dim,
            basis,
            tol: self.tol,
            near_tolerance: self.near_tolerance,
        }
    }

    pub fn to_json(&self) -> OperatorJson {
        let mut entries = Vec::with_capacity(self.ambient_dim * self.dim());
        for r in 0..self.ambient_dim {
            for c in 0..self.dim() {
                entries.push(serde_json::Value::from(self.basis[(r, c)]));
            }
        }
        OperatorJson {
            shape: [self.ambient_dim, self.dim()],
            n: self.ambient_dim,
            k_in: 0,
            k_out: 1,
            scalar_kind: ScalarKind::Float,
            entries,
        }
    }
}

/// Orthonormal basis of `A ∩ B`.
///
/// The principal angles between `A` and `B` are read off as the singular values
/// of `(I - Q_B Q_Bᵀ) Q_A`, which are the sines `sin θ_i`; directions with
/// `sin θ ≤ tol` span the intersection.
pub fn intersect_subspaces(a: &Subspace, b: &Subspace, tol: f64) -> Result<Subspace> {
    if a.ambient_dim != b.ambient_dim {
        return domain(format!(
            "intersecting subspaces of R^{} and R^{}",
            a.ambient_dim, b.ambient_dim
        ));
    }
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(Subspace::zero(a.ambient_dim, tol));
    }
    let residual = &a.basis - &b.basis * (b.basis.transpose() * &a.basis);
    let svd = residual.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut keep = Vec::new();
    let mut near = a.near_tolerance || b.near_tolerance;
    for (i, &sine) in svd.singular_values.iter().enumerate() {
        near |= in_ambiguity_band(sine, tol);
        if sine <= tol {
            let coeffs = v_t.row(i).transpose();
            keep.push(&a.basis * coeffs);
        }
    }
    // A square residual may carry fewer singular values than columns.
    let missing = a.dim().saturating_sub(svd.singular_values.len());
    debug_assert_eq!(missing, 0);
    let basis = if keep.is_empty() {
        DMatrix::zeros(a.ambient_dim, 0)
    } else {
        DMatrix::from_columns(&keep)
    };
    Ok(Subspace {
        ambient_dim: a.ambient_dim,
        basis,
        tol,
        near_tolerance: near,
    })
}

/// Rounds a float Gram entry to the nearest integer, if it is one.
pub fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() < 1e-9).then(|| r.to_i64()).flatten()
}
