//! Level-by-level comparison of a model's Hopf image with `S_N^+`.
//!
//! For a model `π` with state `φ = tr ∘ π`, the transfer matrix at level `r`
//! is `T[(i), (j)] = φ(u_{i_1 j_1} ... u_{i_r j_r})`. Its `k`-th power is the
//! level-`r` matrix of the convolution power `φ^{*k}`, so the Cesàro limit of
//! the powers is the Haar state of the Hopf image and the dimension of the
//! fixed space of `T` equals `dim Fix(u^{⊗r})` for the Hopf image.

use std::time::Instant;

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::models::{CMat, FlatModel, MagicUnitary, Model, C64};
use crate::tensor_calc::{check_cap, decode_index, pow_u128};
use crate::weingarten::haar_fix_dimension;

/// Default bound on `N^r`, the side of the transfer matrix.
pub const DEFAULT_TRANSFER_CAP: u128 = 20_000;
/// `|λ - 1|` at or below this counts as eigenvalue one.
pub const EIGEN_TOL: f64 = 1e-8;
/// Eigenvalues with `EIGEN_TOL < |λ - 1| < EIGEN_GAP` make the count ambiguous.
pub const EIGEN_GAP: f64 = 1e-6;
/// Maximal number of squarings of the lazy transfer matrix.
pub const CESARO_BUDGET: usize = 64;

/// Normalized trace of `P_{i_1 j_1} ... P_{i_k j_k}` (0-based indices).
pub fn model_state(m: &MagicUnitary, rows: &[usize], cols: &[usize]) -> Result<C64> {
    if rows.len() != cols.len() {
        return domain(format!(
            "row index of length {} against column index of length {}",
            rows.len(),
            cols.len()
        ));
    }
    let n = m.n();
    if let Some(&i) = rows.iter().chain(cols).find(|&&i| i >= n) {
        return domain(format!("index {i} outside 0..{n}"));
    }
    let d = m.d();
    let prod = rows
        .iter()
        .zip(cols)
        .fold(CMat::identity(d, d), |acc, (&i, &j)| acc * m.entry(i, j));
    Ok(prod.trace() / C64::new(d as f64, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferMatrix {
    pub r: usize,
    pub n: usize,
    pub t: DMatrix<C64>,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Real part, when every imaginary part is below `tol`.
    pub fn real(&self, tol: f64) -> Option<DMatrix<f64>> {
        self.t.iter().all(|z| z.im.abs() <= tol).then(|| self.t.map(|z| z.re))
    }
}

fn side(n: usize, r: usize, cap: u128) -> Result<usize> {
    check_cap(
        &format!("transfer matrix at level {r} (use a smaller r)"),
        pow_u128(n, r),
        cap,
    )?;
    Ok(n.pow(r as u32))
}

/// Assembles `T` row by row; along each row the products of the first `r - 1`
/// factors are shared through a depth-first walk over column prefixes.
pub fn transfer_matrix(m: &MagicUnitary, r: usize, cap: u128) -> Result<TransferMatrix> {
    let n = m.n();
    let size = side(n, r, cap)?;
    let d = m.d();
    let norm = 1.0 / d as f64;
    if r == 0 {
        return Ok(TransferMatrix {
            r,
            n,
            t: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        });
    }
    let rows: Vec<Vec<C64>> = (0..size)
        .into_par_iter()
        .map(|row| {
            let mut idx = vec![0; r];
            decode_index(row, n, r, &mut idx);
            let mut out = vec![C64::new(0.0, 0.0); size];
            // Walk column multi-indices; `stack[t]` is the product of the first t factors.
            let mut stack: Vec<CMat> = Vec::with_capacity(r);
            stack.push(CMat::identity(d, d));
            fill_row(m, &idx, 0, 0, &mut stack, &mut out, norm);
            out
        })
        .collect();
    let t = DMatrix::from_fn(size, size, |a, b| rows[a][b]);
    Ok(TransferMatrix { r, n, t })
}

fn fill_row(
    m: &MagicUnitary,
    rows: &[usize],
    depth: usize,
    col_prefix: usize,
    stack: &mut Vec<CMat>,
    out: &mut [C64],
    norm: f64,
) {
    let n = m.n();
    let r = rows.len();
    if depth + 1 == r {
        let a = &stack[depth];
        for j in 0..n {
            let p = m.entry(rows[depth], j);
            // tr(A P) without forming the product.
            let mut acc = C64::new(0.0, 0.0);
            for x in 0..a.nrows() {
                for y in 0..a.ncols() {
                    acc += a[(x, y)] * p[(y, x)];
                }
            }
            out[col_prefix * n + j] = acc * norm;
        }
        return;
    }
    for j in 0..n {
        let next = &stack[depth] * m.entry(rows[depth], j);
        if next.iter().all(|z| z.norm_sqr() == 0.0) {
            // The row of `out` stays zero on this whole column block.
            continue;
        }
        stack.push(next);
        fill_row(m, rows, depth + 1, col_prefix * n + j, stack, out, norm);
        stack.pop();
    }
}

/// Same matrix for a flat model, from the cyclic products
/// `⟨ξ_r, ξ_1⟩⟨ξ_1, ξ_2⟩ ... ⟨ξ_{r-1}, ξ_r⟩ / N`.
pub fn transfer_matrix_flat(m: &FlatModel, r: usize, cap: u128) -> Result<TransferMatrix> {
    let n = m.n();
    let size = side(n, r, cap)?;
    if r == 0 {
        return transfer_matrix(&m.to_magic(), 0, cap);
    }
    let nn = n * n;
    let vs = m.vectors();
    // gram[a][b] = ⟨ξ_a, ξ_b⟩ with conjugate-linear first slot.
    let gram: Vec<C64> = (0..nn * nn).map(|ab| vs[ab / nn].dotc(&vs[ab % nn])).collect();
    let norm = 1.0 / n as f64;
    let rows: Vec<Vec<C64>> = (0..size)
        .into_par_iter()
        .map(|row| {
            let mut ri = vec![0; r];
            let mut ci = vec![0; r];
            decode_index(row, n, r, &mut ri);
            (0..size)
                .map(|col| {
                    decode_index(col, n, r, &mut ci);
                    let pos = |t: usize| ri[t] * n + ci[t];
                    let mut acc = gram[pos(r - 1) * nn + pos(0)];
                    for t in 0..r - 1 {
                        acc *= gram[pos(t) * nn + pos(t + 1)];
                    }
                    acc * norm
                })
                .collect()
        })
        .collect();
    let t = DMatrix::from_fn(size, size, |a, b| rows[a][b]);
    Ok(TransferMatrix { r, n, t })
}

/// Transfer matrix of either kind of model, using the flat formula when it applies.
pub fn model_transfer_matrix(m: &Model, r: usize, cap: u128) -> Result<TransferMatrix> {
    match m {
        Model::Flat(f) => transfer_matrix_flat(f, r, cap),
        Model::General(g) => transfer_matrix(g, r, cap),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixMethod {
    Eigen,
    Cesaro,
}

impl std::str::FromStr for FixMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(FixMethod::Eigen),
            "cesaro" => Ok(FixMethod::Cesaro),
            _ => Err(Error::Usage(format!("unknown method {s:?}; use eigen or cesaro"))),
        }
    }
}

/// Iteration budget per matrix dimension for the Schur decomposition.
const SCHUR_ITERS_PER_DIM: usize = 200;
/// Deflation thresholds tried in turn. Machine epsilon can stall the iteration
/// on transfer matrices with large, partly defective kernels.
const SCHUR_EPS: [f64; 2] = [1e-14, 1e-12];

/// Eigenvalues of `T` from a Schur decomposition. If the iteration does not
/// converge, a looser threshold and then the lazy matrix `(I + T)/2` are tried.
fn eigenvalues(t: &TransferMatrix) -> Result<Vec<C64>> {
    let k = t.dim();
    let iters = SCHUR_ITERS_PER_DIM * k.max(1);
    let one = C64::new(1.0, 0.0);
    let from_lazy = |mu: &C64| mu * 2.0 - one;
    match t.real(0.0) {
        Some(re) => {
            let lazy = (DMatrix::<f64>::identity(k, k) + &re) * 0.5;
            for eps in SCHUR_EPS {
                if let Some(s) = Schur::try_new(re.clone(), eps, iters) {
                    return Ok(s.complex_eigenvalues().iter().copied().collect());
                }
                if let Some(s) = Schur::try_new(lazy.clone(), eps, iters) {
                    return Ok(s.complex_eigenvalues().iter().map(from_lazy).collect());
                }
            }
        }
        None => {
            let lazy = (DMatrix::<C64>::identity(k, k) + &t.t).map(|z| z * 0.5);
            for eps in SCHUR_EPS {
                if let Some(s) = Schur::try_new(t.t.clone(), eps, iters) {
                    return Ok(s.eigenvalues().expect("complex Schur form").iter().copied().collect());
                }
                if let Some(s) = Schur::try_new(lazy.clone(), eps, iters) {
                    return Ok(s.eigenvalues().expect("complex Schur form").iter().map(from_lazy).collect());
                }
            }
        }
    }
    Err(Error::Inconclusive(format!(
        "Schur iteration did not converge on the {k} x {k} transfer matrix; try --method cesaro"
    )))
}

/// Dimension of the fixed space of `T`. The eigenvalue one of a power-bounded
/// matrix is semisimple, so this is its algebraic multiplicity.
pub fn fixed_space_dim(t: &TransferMatrix, tol: f64, method: FixMethod) -> Result<usize> {
    match method {
        FixMethod::Eigen => {
            let gap = EIGEN_GAP.max(100.0 * tol);
            let mut count = 0;
            for lambda in eigenvalues(t)? {
                let dist = (lambda - C64::new(1.0, 0.0)).norm();
                if dist <= tol {
                    count += 1;
                } else if dist < gap {
                    return Err(Error::Inconclusive(format!(
                        "eigenvalue {lambda} lies {dist:.3e} from 1, inside ({tol:e}, {gap:e})"
                    )));
                }
            }
            Ok(count)
        }
        FixMethod::Cesaro => cesaro_dim(t, tol),
    }
}

/// Squares the lazy matrix `S = (I + T)/2` until the powers stop moving. `S` has
/// the fixed space of `T` and no other unimodular eigenvalues, so `S^{2^k}`
/// converges to the Cesàro limit of the powers of `T`, an idempotent whose
/// trace is the fixed dimension.
fn cesaro_dim(t: &TransferMatrix, tol: f64) -> Result<usize> {
    fn run<T>(s: DMatrix<T>, tol: f64) -> Result<usize>
    where
        T: nalgebra::ComplexField<RealField = f64> + Copy,
    {
        let mut s = s;
        for _ in 0..CESARO_BUDGET {
            let next = &s * &s;
            let moved = (&next - &s).norm();
            s = next;
            if moved <= tol * (1.0 + s.norm()) {
                let trace = s.trace().real();
                let dim = trace.round();
                if (trace - dim).abs() > 1e-6 || dim < 0.0 {
                    return Err(Error::Inconclusive(format!(
                        "Cesàro limit has non-integral trace {trace}"
                    )));
                }
                return Ok(dim as usize);
            }
        }
        Err(Error::Inconclusive(format!(
            "Cesàro averages did not settle within 2^{CESARO_BUDGET} steps"
        )))
    }
    let k = t.dim();
    match t.real(0.0) {
        Some(re) => run((DMatrix::identity(k, k) + re) * 0.5, tol),
        None => run(
            (DMatrix::<C64>::identity(k, k) + &t.t).map(|z| z * 0.5),
            tol,
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub r: usize,
    pub fixed_dim: usize,
    pub target_dim: usize,
    pub defect: usize,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "level", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FaithfulnessVerdict {
    MatchesUpTo(usize),
    FailsAt(usize),
}

impl std::fmt::Display for FaithfulnessVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FaithfulnessVerdict::MatchesUpTo(r) => write!(f, "MATCHES_UP_TO({r})"),
            FaithfulnessVerdict::FailsAt(r) => write!(f, "FAILS_AT({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub model_id: String,
    pub n: usize,
    pub method: FixMethod,
    pub tol: f64,
    pub levels: Vec<LevelRecord>,
    pub verdict: FaithfulnessVerdict,
    pub note: String,
}

#[derive(Clone, Copy, Debug)]
pub struct ReportConfig {
    pub tol: f64,
    pub cap: u128,
    pub method: FixMethod,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            tol: EIGEN_TOL,
            cap: DEFAULT_TRANSFER_CAP,
            method: FixMethod::Eigen,
        }
    }
}

/// Compares the fixed dimensions of the model with those of `S_N^+` for
/// `r = 1..=r_max`, stopping at the first level where they differ.
pub fn inner_faithfulness_report(
    m: &Model,
    model_id: &str,
    r_max: usize,
    cfg: &ReportConfig,
) -> Result<FaithfulnessReport> {
    let n = m.to_magic().n();
    if n == 0 {
        return domain("the model is empty");
    }
    let mut levels = Vec::new();
    let mut verdict = FaithfulnessVerdict::MatchesUpTo(r_max);
    for r in 1..=r_max {
        let start = Instant::now();
        let t = model_transfer_matrix(m, r, cfg.cap)?;
        let fixed_dim = fixed_space_dim(&t, cfg.tol, cfg.method)?;
        let target_dim = haar_fix_dimension(r, n)?;
        if fixed_dim < target_dim {
            return Err(Error::Inconclusive(format!(
                "level {r}: fixed dimension {fixed_dim} below the S_N^+ value {target_dim}; \
                 the transfer matrix is numerically unreliable"
            )));
        }
        levels.push(LevelRecord {
            r,
            fixed_dim,
            target_dim,
            defect: fixed_dim - target_dim,
            seconds: start.elapsed().as_secs_f64(),
        });
        if fixed_dim > target_dim {
            verdict = FaithfulnessVerdict::FailsAt(r);
            break;
        }
    }
    let note = match verdict {
        FaithfulnessVerdict::MatchesUpTo(r) => format!(
            "fixed dimensions agree with S_{n}^+ up to level {r}; a necessary condition for \
             inner faithfulness, not a proof"
        ),
        FaithfulnessVerdict::FailsAt(r) => format!(
            "the Hopf image has more invariants than S_{n}^+ at level {r}, so the model is not \
             inner faithful"
        ),
    };
    Ok(FaithfulnessReport {
        model_id: model_id.to_string(),
        n,
        method: cfg.method,
        tol: cfg.tol,
        levels,
        verdict,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latin::LatinSquare;
    use crate::models::{
        coproduct_model, deformed_swap_model, direct_sum, from_latin_standard,
        symmetric_generating_model,
    };

    fn close(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).norm() <= tol
    }

    /// Closure of a set of permutations under composition.
    fn generated_group(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let n = gens[0].len();
        let mut group: Vec<Vec<usize>> = vec![(0..n).collect()];
        let mut seen: std::collections::HashSet<Vec<usize>> = group.iter().cloned().collect();
        let mut frontier = group.clone();
        while let Some(g) = frontier.pop() {
            for h in gens {
                let gh: Vec<usize> = (0..n).map(|x| g[h[x]]).collect();
                if seen.insert(gh.clone()) {
                    group.push(gh.clone());
                    frontier.push(gh);
                }
            }
        }
        group
    }

    /// Orbits of `G` on `[N]^r` by Burnside's lemma.
    fn burnside_orbits(group: &[Vec<usize>], r: usize) -> usize {
        let total: usize = group
            .iter()
            .map(|g| g.iter().enumerate().filter(|(x, y)| x == *y).count().pow(r as u32))
            .sum();
        assert_eq!(total % group.len(), 0);
        total / group.len()
    }

    #[test]
    fn states() {
        let x = deformed_swap_model(4).unwrap().to_magic();
        for i in 0..4 {
            for j in 0..4 {
                let s = model_state(&x, &[i], &[j]).unwrap();
                assert!((s - C64::new(0.25, 0.0)).norm() < 1e-14);
                let p = model_state(&x, &[i, i, i], &[j, j, j]).unwrap();
                assert!(p.im.abs() < 1e-14 && (0.0..=1.0).contains(&p.re));
            }
        }
        assert!(model_state(&x, &[0, 0], &[0, 1]).unwrap().norm() < 1e-14);
        assert!(model_state(&x, &[0], &[]).is_err());
    }

    #[test]
    fn level_one_of_flat_model_is_uniform() {
        let x = deformed_swap_model(5).unwrap();
        let t = transfer_matrix(&x.to_magic(), 1, DEFAULT_TRANSFER_CAP).unwrap();
        let uniform = DMatrix::from_element(5, 5, C64::new(0.2, 0.0));
        assert!(close(&t.t, &uniform, 1e-12));
        assert_eq!(fixed_space_dim(&t, EIGEN_TOL, FixMethod::Eigen).unwrap(), 1);
    }

    #[test]
    fn permutation_model_at_level_one() {
        let perm = [2, 0, 3, 1];
        let m = MagicUnitary::from_permutation(&perm).unwrap();
        let t = transfer_matrix(&m, 1, DEFAULT_TRANSFER_CAP).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if perm[j] == i { 1.0 } else { 0.0 };
                assert_eq!(t.t[(i, j)], C64::new(expect, 0.0));
            }
        }
    }

    #[test]
    fn rows_sum_to_one() {
        let x = deformed_swap_model(4).unwrap().to_magic();
        let y = symmetric_generating_model(4).unwrap().to_magic();
        let s = direct_sum(&[x, y]).unwrap();
        for r in 1..=3 {
            let t = transfer_matrix(&s, r, DEFAULT_TRANSFER_CAP).unwrap();
            for row in t.t.row_iter() {
                let sum: C64 = row.iter().sum();
                assert!((sum - C64::new(1.0, 0.0)).norm() < 1e-12);
            }
            assert!(t.t.iter().all(|z| z.norm() <= 1.0 + 1e-12));
        }
    }

    #[test]
    fn flat_formula_matches_products() {
        let x = deformed_swap_model(4).unwrap();
        for r in 1..=3 {
            let a = transfer_matrix(&x.to_magic(), r, DEFAULT_TRANSFER_CAP).unwrap();
            let b = transfer_matrix_flat(&x, r, DEFAULT_TRANSFER_CAP).unwrap();
            assert!(close(&a.t, &b.t, 1e-12));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let x = deformed_swap_model(5).unwrap().to_magic();
        match transfer_matrix(&x, 7, DEFAULT_TRANSFER_CAP) {
            Err(Error::Resource { .. }) => {}
            other => panic!("expected a resource error, got {other:?}"),
        }
    }

    #[test]
    fn trivial_fixed_spaces() {
        let id = TransferMatrix {
            r: 2,
            n: 3,
            t: DMatrix::identity(9, 9),
        };
        assert_eq!(fixed_space_dim(&id, EIGEN_TOL, FixMethod::Eigen).unwrap(), 9);
        assert_eq!(fixed_space_dim(&id, EIGEN_TOL, FixMethod::Cesaro).unwrap(), 9);
        let mut near = DMatrix::<C64>::identity(2, 2);
        near[(1, 1)] = C64::new(1.0 - 1e-7, 0.0);
        let near = TransferMatrix { r: 1, n: 2, t: near };
        assert!(matches!(
            fixed_space_dim(&near, EIGEN_TOL, FixMethod::Eigen),
            Err(Error::Inconclusive(_))
        ));
    }

    /// `T^k` is the matrix of `φ^{*k}`: the transfer matrix of the coproduct
    /// model of `a` and `b` is `T_a T_b`.
    #[test]
    fn convolution_recursion() {
        let x = deformed_swap_model(4).unwrap().to_magic();
        let y = symmetric_generating_model(4).unwrap().to_magic();
        let s = direct_sum(&[x.clone(), y]).unwrap();
        for r in 1..=2 {
            let ts = transfer_matrix(&s, r, DEFAULT_TRANSFER_CAP).unwrap().t;
            let tx = transfer_matrix(&x, r, DEFAULT_TRANSFER_CAP).unwrap().t;
            let mut power = x.clone();
            let mut expected = tx.clone();
            for _ in 1..=3 {
                power = coproduct_model(&power, if r == 1 { &s } else { &x }).unwrap();
                expected = &expected * if r == 1 { &ts } else { &tx };
                let got = transfer_matrix(&power, r, DEFAULT_TRANSFER_CAP).unwrap().t;
                assert!(close(&got, &expected, 1e-10), "level {r}");
                if power.d() > 64 {
                    break;
                }
            }
        }
    }

    #[test]
    fn burnside_oracle_for_classical_models() {
        let squares = [
            LatinSquare::circulant(3),
            LatinSquare::circulant(4),
            LatinSquare::circulant(5),
            crate::latin::swap_corner_square(4).unwrap(),
            crate::latin::swap_corner_square(5).unwrap(),
        ];
        for sq in squares.iter() {
            let gens: Vec<Vec<usize>> = (0..sq.n()).map(|x| sq.symbol_permutation(x)).collect();
            let group = generated_group(&gens);
            let m = from_latin_standard(sq);
            for r in 1..=3 {
                let t = transfer_matrix_flat(&m, r, DEFAULT_TRANSFER_CAP).unwrap();
                let dim = fixed_space_dim(&t, EIGEN_TOL, FixMethod::Eigen).unwrap();
                assert_eq!(dim, burnside_orbits(&group, r), "{:?} at r={r}", sq.rows());
            }
        }
        let y = symmetric_generating_model(5).unwrap();
        let gens: Vec<Vec<usize>> = (0..5)
            .map(|x| {
                let rows: Vec<Vec<usize>> = (0..5)
                    .map(|i| (0..5).map(|j| y.vector(i, j).iter().position(|z| z.norm() > 0.5).unwrap()).collect())
                    .collect();
                LatinSquare::new(rows).unwrap().symbol_permutation(x)
            })
            .collect();
        assert_eq!(generated_group(&gens).len(), 120);
    }

    #[test]
    fn eigen_and_cesaro_agree() {
        let x = deformed_swap_model(4).unwrap().to_magic();
        let y = symmetric_generating_model(4).unwrap().to_magic();
        let models = [
            x.clone(),
            y.clone(),
            direct_sum(&[x, y]).unwrap(),
            from_latin_standard(&LatinSquare::circulant(4)).to_magic(),
        ];
        for m in &models {
            for r in 1..=3 {
                let t = transfer_matrix(m, r, DEFAULT_TRANSFER_CAP).unwrap();
                assert_eq!(
                    fixed_space_dim(&t, EIGEN_TOL, FixMethod::Eigen).unwrap(),
                    fixed_space_dim(&t, EIGEN_TOL, FixMethod::Cesaro).unwrap()
                );
            }
        }
    }

    #[test]
    fn classical_circulant_fails_early() {
        let m = Model::Flat(from_latin_standard(&LatinSquare::circulant(4)));
        let rep = inner_faithfulness_report(&m, "circulant", 4, &ReportConfig::default()).unwrap();
        assert_eq!(rep.verdict, FaithfulnessVerdict::FailsAt(2));
        assert_eq!(rep.levels.last().unwrap().fixed_dim, 4);
        let again = inner_faithfulness_report(&m, "circulant", 3, &ReportConfig::default()).unwrap();
        assert_eq!(again.verdict, rep.verdict);
    }

    #[test]
    fn mixed_model_matches_at_four() {
        let x = deformed_swap_model(4).unwrap().to_magic();
        let y = symmetric_generating_model(4).unwrap().to_magic();
        let m = Model::General(direct_sum(&[x, y]).unwrap());
        let rep = inner_faithfulness_report(&m, "x+y", 3, &ReportConfig::default()).unwrap();
        assert_eq!(rep.verdict, FaithfulnessVerdict::MatchesUpTo(3));
        let dims: Vec<usize> = rep.levels.iter().map(|l| l.fixed_dim).collect();
        assert_eq!(dims, vec![1, 2, 5]);
    }
}
