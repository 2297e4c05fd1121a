//! Fixed-point subspaces of tensor powers and topological-generation certificates.
//!
//! Every subspace here is a span of partition vectors. For the classical
//! symmetric group the span runs over all partitions of `[k]`; for a quantum
//! permutation group `S_M^+` sitting in the upper-left corner of `S_N^+` it runs
//! over non-crossing partitions on the corner slots, with the fixed basis
//! vectors `e_{M+1}, ..., e_N` placed in the remaining slots. A certificate
//! compares the intersection of a classical and a quantum fix space with the
//! non-crossing span of the big quantum group at one tensor degree.

use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::partitions::{
    enumerate_colored_nc, enumerate_partitions, is_color_admissible, ColoredWord, Partition,
};
use crate::tensor_calc::{
    check_cap, exact_span_rank, fill_partition_vector, intersect_subspaces, partition_map,
    partition_vector, pow_u128, Subspace, DEFAULT_RANK_TOL, DEFAULT_TENSOR_CAP,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixConfig {
    /// Relative rank tolerance and principal-angle sine threshold.
    pub tol: f64,
    /// Largest ambient dimension `N^k` accepted.
    pub tensor_cap: u128,
}

impl Default for FixConfig {
    fn default() -> Self {
        FixConfig {
            tol: DEFAULT_RANK_TOL,
            tensor_cap: DEFAULT_TENSOR_CAP,
        }
    }
}

impl FixConfig {
    pub fn with_tol(tol: f64) -> Self {
        FixConfig {
            tol,
            ..Self::default()
        }
    }
}

/// `S_M^+ < S_N^+` acting on `e_1..e_M` and fixing `e_{M+1}, ..., e_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerEmbedding {
    n: usize,
    m: usize,
}

impl CornerEmbedding {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > n {
            return domain(format!("corner size M = {m} must satisfy 1 <= M <= N = {n}"));
        }
        Ok(CornerEmbedding { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// Classical group acting on colored tensor factors `V^{(i_1)} ⊗ ... ⊗ V^{(i_k)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalGroup {
    /// `S_N` permuting coordinates; colors are invisible to it.
    Symmetric,
    /// The monomial group `H_N^s`.
    Reflection,
}

fn ambient(n: usize, k: usize, cfg: &FixConfig) -> Result<usize> {
    check_cap("tensor space", pow_u128(n, k), cfg.tensor_cap)?;
    Ok(n.pow(k as u32))
}

fn span_of(n: usize, partitions: &[Partition], cfg: &FixConfig) -> Subspace {
    let k = partitions.first().map_or(0, Partition::k);
    let vecs: Vec<DVector<f64>> = partitions
        .iter()
        .map(|p| DVector::from_vec(partition_vector(p, n)))
        .collect();
    Subspace::from_vectors(n.pow(k as u32), &vecs, cfg.tol)
}

/// `Fix_{S_N}((C^N)^{⊗k})` as the span of `ξ_p` over all partitions of `[k]`.
pub fn classical_fix(n: usize, k: usize, cfg: &FixConfig) -> Result<Subspace> {
    if n == 0 {
        return domain("N must be at least 1");
    }
    ambient(n, k, cfg)?;
    Ok(span_of(n, &enumerate_partitions(k, false), cfg))
}

/// Span of `ξ_p` for `p ∈ NC(k)` in `(C^N)^{⊗k}`.
pub fn nc_span(n: usize, k: usize, cfg: &FixConfig) -> Result<Subspace> {
    if n == 0 {
        return domain("N must be at least 1");
    }
    ambient(n, k, cfg)?;
    Ok(span_of(n, &enumerate_partitions(k, true), cfg))
}

/// Span of the colored non-crossing vectors of `w` in `(C^N)^{⊗|w|}`.
pub fn colored_nc_span(n: usize, w: &ColoredWord, cfg: &FixConfig) -> Result<Subspace> {
    if n == 0 {
        return domain("N must be at least 1");
    }
    let dim = ambient(n, w.len(), cfg)?;
    let parts = enumerate_colored_nc(w);
    if parts.is_empty() {
        return Ok(Subspace::zero(dim, cfg.tol));
    }
    Ok(span_of(n, &parts, cfg))
}

/// Generators of a corner fix space. Slots in `S` carry one of the fixed basis
/// vectors `e_{M+1}..e_N`; the other slots carry a partition vector on the
/// corner coordinates, drawn from `corner_partitions(slots)`.
fn corner_generators(
    e: CornerEmbedding,
    k: usize,
    corner_partitions: &dyn Fn(&[usize]) -> Vec<Partition>,
) -> Vec<DVector<f64>> {
    let (n, m) = (e.n, e.m);
    let outside = n - m;
    let dim = n.pow(k as u32);
    let mut gens = Vec::new();
    for mask in 0u32..(1u32 << k) {
        let fixed_slots: Vec<usize> = (0..k).filter(|&t| mask & (1 << t) != 0).collect();
        if !fixed_slots.is_empty() && outside == 0 {
            continue;
        }
        let corner_slots: Vec<usize> = (0..k).filter(|&t| mask & (1 << t) == 0).collect();
        let parts = corner_partitions(&corner_slots);
        if parts.is_empty() {
            continue;
        }
        let assignments = outside.pow(fixed_slots.len() as u32);
        for a in 0..assignments {
            let mut fixed_values = vec![0usize; fixed_slots.len()];
            crate::tensor_calc::decode_index(a, outside.max(1), fixed_slots.len(), &mut fixed_values);
            for p in &parts {
                let mut v = vec![0.0; dim];
                let mut corner_vec = vec![0.0; m.pow(corner_slots.len() as u32)];
                fill_partition_vector(p, m, &mut corner_vec);
                let mut idx = vec![0usize; k];
                for (&slot, &val) in fixed_slots.iter().zip(&fixed_values) {
                    idx[slot] = m + val;
                }
                let mut corner_idx = vec![0usize; corner_slots.len()];
                for (flat, &x) in corner_vec.iter().enumerate() {
                    if x == 0.0 {
                        continue;
                    }
                    crate::tensor_calc::decode_index(flat, m, corner_slots.len(), &mut corner_idx);
                    for (&slot, &val) in corner_slots.iter().zip(&corner_idx) {
                        idx[slot] = val;
                    }
                    v[crate::tensor_calc::encode_index(&idx, n)] = x;
                }
                gens.push(DVector::from_vec(v));
            }
        }
    }
    gens
}

/// Fix space of the corner-embedded `S_M^+`. For `M <= 3`, where `S_M^+ = S_M`,
/// the corner slots use all partitions instead of the non-crossing ones.
pub fn corner_quantum_fix(e: CornerEmbedding, k: usize, cfg: &FixConfig) -> Result<Subspace> {
    let dim = ambient(e.n, k, cfg)?;
    let classical_corner = e.m <= 3;
    let gens = corner_generators(e, k, &|slots: &[usize]| {
        enumerate_partitions(slots.len(), !classical_corner)
    });
    Ok(Subspace::from_vectors(dim, &gens, cfg.tol))
}

/// Fix space of a classical group on colored tensor factors.
///
/// `H_N^s` is the semidirect product of the diagonal phases `Z_s^N` with `S_N`.
/// A basis vector `e_i` picks up the character `c ↦ Π_t ω^{w_t c_{i_t}}`, which
/// is trivial exactly when each block of `ker i` has letter sum `0` mod `s`; the
/// surviving `S_N`-orbit sums span the same space as the `ξ_p` over admissible
/// partitions, since coarsening an admissible partition keeps it admissible.
pub fn reflection_classical_fix(
    n: usize,
    group: ClassicalGroup,
    w: &ColoredWord,
    cfg: &FixConfig,
) -> Result<Subspace> {
    match group {
        ClassicalGroup::Symmetric => classical_fix(n, w.len(), cfg),
        ClassicalGroup::Reflection => {
            if n == 0 {
                return domain("N must be at least 1");
            }
            let dim = ambient(n, w.len(), cfg)?;
            let parts: Vec<Partition> = enumerate_partitions(w.len(), false)
                .into_iter()
                .filter(|p| is_color_admissible(p, w))
                .collect();
            if parts.is_empty() {
                return Ok(Subspace::zero(dim, cfg.tol));
            }
            Ok(span_of(n, &parts, cfg))
        }
    }
}

/// Fix space of `H_M^{s+}` in the corner: colored non-crossing vectors on the
/// corner slots, fixed basis vectors elsewhere.
pub fn reflection_quantum_fix(
    e: CornerEmbedding,
    w: &ColoredWord,
    cfg: &FixConfig,
) -> Result<Subspace> {
    if e.m < 4 {
        return domain(format!("corner size M = {} must be at least 4", e.m));
    }
    let dim = ambient(e.n, w.len(), cfg)?;
    let gens = corner_generators(e, w.len(), &|slots: &[usize]| {
        enumerate_colored_nc(&w.select(slots))
    });
    Ok(Subspace::from_vectors(dim, &gens, cfg.tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Equal,
    StrictlyLarger,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Equal => "EQUAL",
            Verdict::StrictlyLarger => "STRICTLY_LARGER",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertParams {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

impl std::fmt::Display for CertParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "N={}", self.n)?;
        if let Some(m) = self.m {
            write!(f, ";M={m}")?;
        }
        if let Some(s) = self.s {
            write!(f, ";s={s}")?;
        }
        write!(f, ";k={}", self.k)?;
        if let Some(w) = &self.word {
            write!(f, ";w={w}")?;
        }
        Ok(())
    }
}

/// Verdict record for one degree of a topological-generation statement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub statement: String,
    pub params: CertParams,
    /// Dimension of the intersection of the two fix spaces.
    pub dim_lhs: usize,
    /// Dimension of the target non-crossing span.
    pub dim_rhs: usize,
    pub backend: String,
    pub tol: f64,
    pub verdict: Verdict,
    /// Orthonormal basis of the part of the intersection outside the target span.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<Vec<f64>>,
    /// Partitions whose vectors lie in the intersection but not in the target span.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness_partitions: Vec<Partition>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub seconds: f64,
}

struct Comparison<'a> {
    statement: &'static str,
    params: CertParams,
    lhs: Subspace,
    rhs: Subspace,
    exact_rhs: Option<usize>,
    candidates: &'a [Partition],
    n: usize,
    tol: f64,
    started: Instant,
}

fn finish(c: Comparison<'_>) -> Certificate {
    let mut notes = Vec::new();
    let dim_lhs = c.lhs.dim();
    let dim_rhs = c.rhs.dim();
    let defect = c.lhs.complement_within(&c.rhs);
    let mut verdict = if dim_lhs == dim_rhs {
        Verdict::Equal
    } else if dim_lhs > dim_rhs && defect.dim() == dim_lhs - dim_rhs {
        Verdict::StrictlyLarger
    } else {
        notes.push(format!(
            "invariant violated: intersection (dim {dim_lhs}) does not contain the target span (dim {dim_rhs})"
        ));
        Verdict::Inconclusive
    };
    // The target span must sit inside the intersection.
    let escaped = c.rhs.complement_within(&c.lhs);
    if escaped.dim() > 0 && verdict != Verdict::Inconclusive {
        notes.push("target span not contained in the intersection".into());
        verdict = Verdict::Inconclusive;
    }
    if let Some(exact) = c.exact_rhs {
        if exact != dim_rhs {
            notes.push(format!("exact rank {exact} disagrees with numerical rank {dim_rhs}"));
            verdict = Verdict::Inconclusive;
        }
    }
    if c.lhs.near_tolerance() || c.rhs.near_tolerance() {
        notes.push("a singular value lies within a factor of 10 of the tolerance".into());
        verdict = Verdict::Inconclusive;
    }
    let mut witness = Vec::new();
    let mut witness_partitions = Vec::new();
    if verdict == Verdict::StrictlyLarger {
        witness = defect
            .basis()
            .column_iter()
            .map(|col| col.iter().copied().collect())
            .collect();
        for p in c.candidates {
            let v = DVector::from_vec(partition_vector(p, c.n));
            if c.lhs.contains(&v, 1e-8) && !c.rhs.contains(&v, 1e-6) {
                witness_partitions.push(p.clone());
            }
        }
    }
    let backend = if c.exact_rhs.is_some() {
        "float-svd+exact-gram"
    } else {
        "float-svd"
    };
    Certificate {
        statement: c.statement.to_string(),
        params: c.params,
        dim_lhs,
        dim_rhs,
        backend: backend.to_string(),
        tol: c.tol,
        verdict,
        witness,
        witness_partitions,
        notes,
        seconds: c.started.elapsed().as_secs_f64(),
    }
}

/// Degree-`k` instance of "`S_N^+` is topologically generated by `S_N` and the
/// corner `S_M^+`": compares `dim(Fix_{S_N} ∩ Fix_{S_M^+})` with `dim span NC(k)`.
pub fn topgen_certificate(n: usize, m: usize, k: usize, cfg: &FixConfig) -> Result<Certificate> {
    if !(3 <= m && m < n) {
        return domain(format!("topgen needs 3 <= M < N, got N = {n}, M = {m}"));
    }
    let started = Instant::now();
    let e = CornerEmbedding::new(n, m)?;
    let classical = classical_fix(n, k, cfg)?;
    let corner = corner_quantum_fix(e, k, cfg)?;
    let lhs = intersect_subspaces(&classical, &corner, cfg.tol)?;
    let rhs = nc_span(n, k, cfg)?;
    let exact_rhs = exact_nc_rank(n, k);
    let candidates = enumerate_partitions(k, false);
    Ok(finish(Comparison {
        statement: "topgen",
        params: CertParams {
            n,
            m: Some(m),
            s: None,
            k,
            word: None,
        },
        lhs,
        rhs,
        exact_rhs,
        candidates: &candidates,
        n,
        tol: cfg.tol,
        started,
    }))
}

/// Degree-`|w|` instance of "`H_N^{s+}` is topologically generated by `S_N` and
/// `H_{N-1}^{s+}`".
pub fn reflection_topgen_certificate(
    n: usize,
    w: &ColoredWord,
    cfg: &FixConfig,
) -> Result<Certificate> {
    if n < 5 {
        return domain(format!("refl-topgen needs N >= 5, got {n}"));
    }
    let started = Instant::now();
    let e = CornerEmbedding::new(n, n - 1)?;
    let classical = reflection_classical_fix(n, ClassicalGroup::Symmetric, w, cfg)?;
    let corner = reflection_quantum_fix(e, w, cfg)?;
    let lhs = intersect_subspaces(&classical, &corner, cfg.tol)?;
    let rhs = colored_nc_span(n, w, cfg)?;
    let colored = enumerate_colored_nc(w);
    let exact_rhs = exact_partition_rank(n, &colored);
    let candidates = enumerate_partitions(w.len(), false);
    Ok(finish(Comparison {
        statement: "refl-topgen",
        params: CertParams {
            n,
            m: Some(n - 1),
            s: Some(w.modulus()),
            k: w.len(),
            word: Some(w.to_string()),
        },
        lhs,
        rhs,
        exact_rhs,
        candidates: &candidates,
        n,
        tol: cfg.tol,
        started,
    }))
}

fn exact_partition_rank(n: usize, parts: &[Partition]) -> Option<usize> {
    let k = parts.first().map_or(0, Partition::k);
    if k > 6 || pow_u128(n, k) > 1_000_000 {
        return None;
    }
    if parts.is_empty() {
        return Some(0);
    }
    let ops: Vec<_> = parts
        .iter()
        .map(|p| partition_map(p, 0, k, n))
        .collect::<Result<_>>()
        .ok()?;
    exact_span_rank(&ops).ok()
}

fn exact_nc_rank(n: usize, k: usize) -> Option<usize> {
    exact_partition_rank(n, &enumerate_partitions(k, true))
}

/// Certificates for `k = 1..=k_max`, computed concurrently, in degree order.
pub fn topgen_sweep(n: usize, m: usize, k_max: usize, cfg: &FixConfig) -> Result<Vec<Certificate>> {
    (1..=k_max)
        .into_par_iter()
        .map(|k| topgen_certificate(n, m, k, cfg))
        .collect()
}

/// All words of length `1..=max_len` over `Z_s`, shortest first, lexicographic.
pub fn all_words(s: u32, max_len: usize) -> Vec<ColoredWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let count = (s as usize).pow(len as u32);
        for flat in 0..count {
            let mut letters = vec![0usize; len];
            crate::tensor_calc::decode_index(flat, s as usize, len, &mut letters);
            out.push(
                ColoredWord::new(s, letters.into_iter().map(|a| a as u32).collect())
                    .expect("letters below s"),
            );
        }
    }
    out
}

pub fn reflection_sweep(
    n: usize,
    words: &[ColoredWord],
    cfg: &FixConfig,
) -> Result<Vec<Certificate>> {
    words
        .par_iter()
        .map(|w| reflection_topgen_certificate(n, w, cfg))
        .collect()
}

/// Aggregate label for a sweep; never claims more than the degrees checked.
pub fn aggregate_label(certs: &[Certificate]) -> String {
    let k_max = certs.iter().map(|c| c.params.k).max().unwrap_or(0);
    if certs.iter().all(|c| c.verdict == Verdict::Equal) {
        format!("verified up to degree {k_max}")
    } else if let Some(c) = certs.iter().find(|c| c.verdict == Verdict::StrictlyLarger) {
        format!("defect found at degree {} ({})", c.params.k, c.params)
    } else {
        "inconclusive".to_string()
    }
}
