//! Exact Weingarten calculus for `S_N^+`.
//!
//! The Haar state on a monomial of the magic-unitary generators is
//! `h(u_{i_1 j_1} ... u_{i_k j_k}) = Σ_{p,q ∈ NC(k)} δ_p(i) δ_q(j) W_{pq}`, with
//! `W` the inverse of the Gram matrix `G_{pq} = N^{|p ∨ q|}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exact::{self, IntMatrix, Ratio, RatMatrix};
use crate::partitions::{delta_unchecked, enumerate_partitions, Partition};
use crate::tensor_calc::gram_matrix;

/// Largest degree for which tables are built.
pub const MAX_DEGREE: usize = 6;

#[derive(Clone, Debug)]
pub struct WeingartenTable {
    k: usize,
    n: usize,
    partitions: Vec<Partition>,
    gram: IntMatrix,
    weingarten: RatMatrix,
}

impl WeingartenTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `NC(k)` in canonical enumeration order; indexes rows and columns.
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn weingarten(&self) -> &RatMatrix {
        &self.weingarten
    }

    pub fn to_json(&self) -> WeingartenJson {
        let ratios = |m: &RatMatrix| -> Vec<Vec<Ratio>> {
            m.iter().map(|r| r.iter().cloned().map(Ratio).collect()).collect()
        };
        WeingartenJson {
            k: self.k,
            n: self.n,
            partitions: self.partitions.clone(),
            gram: ratios(&exact::to_rational(&self.gram)),
            weingarten: ratios(&self.weingarten),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeingartenJson {
    pub k: usize,
    pub n: usize,
    pub partitions: Vec<Partition>,
    pub gram: Vec<Vec<Ratio>>,
    pub weingarten: Vec<Vec<Ratio>>,
}

/// Builds the table, failing with [`Error::Singular`] when `G` is not invertible.
pub fn weingarten_table(k: usize, n: usize) -> Result<WeingartenTable> {
    if k > MAX_DEGREE {
        return domain(format!("Weingarten tables are built for k <= {MAX_DEGREE}, got {k}"));
    }
    if n == 0 {
        return domain("N must be at least 1");
    }
    let partitions = enumerate_partitions(k, true);
    let gram = gram_matrix(&partitions, n)?;
    let weingarten = exact::invert(&exact::to_rational(&gram)).ok_or_else(|| Error::Singular {
        n,
        k,
        rank: exact::rank_int(&gram),
        size: partitions.len(),
    })?;
    Ok(WeingartenTable {
        k,
        n,
        partitions,
        gram,
        weingarten,
    })
}

type Cache = Mutex<HashMap<(usize, usize), Arc<WeingartenTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached [`weingarten_table`]. Two threads missing together both compute the
/// table; the first insertion wins and both get an equal table.
pub fn cached_table(k: usize, n: usize) -> Result<Arc<WeingartenTable>> {
    if let Some(t) = cache().lock().expect("cache poisoned").get(&(k, n)) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(weingarten_table(k, n)?);
    let mut guard = cache().lock().expect("cache poisoned");
    Ok(Arc::clone(guard.entry((k, n)).or_insert(table)))
}

/// Haar state of `u_{i_1 j_1} ... u_{i_k j_k}` (0-based indices).
pub fn haar_moment(n: usize, rows: &[usize], cols: &[usize]) -> Result<BigRational> {
    if rows.len() != cols.len() {
        return domain(format!(
            "row index of length {} against column index of length {}",
            rows.len(),
            cols.len()
        ));
    }
    if let Some(&i) = rows.iter().chain(cols).find(|&&i| i >= n) {
        return domain(format!("index {i} outside 0..{n}"));
    }
    let table = cached_table(rows.len(), n)?;
    let row_hits: Vec<usize> = table
        .partitions
        .iter()
        .enumerate()
        .filter(|(_, p)| delta_unchecked(p, rows))
        .map(|(i, _)| i)
        .collect();
    let col_hits: Vec<usize> = table
        .partitions
        .iter()
        .enumerate()
        .filter(|(_, q)| delta_unchecked(q, cols))
        .map(|(i, _)| i)
        .collect();
    let mut acc = BigRational::zero();
    for &p in &row_hits {
        for &q in &col_hits {
            acc += &table.weingarten[p][q];
        }
    }
    Ok(acc)
}

/// `dim hom_{S_N^+}(V^{⊗k}, 1)`: the Catalan number for `N >= 4`, otherwise the
/// exact rank of the non-crossing Gram matrix.
pub fn haar_fix_dimension(k: usize, n: usize) -> Result<usize> {
    let nc = enumerate_partitions(k, true);
    if n >= 4 {
        return Ok(nc.len());
    }
    if n == 0 {
        return domain("N must be at least 1");
    }
    Ok(exact::rank_int(&gram_matrix(&nc, n)?))
}

/// `[h(u_{i_1 j_1} u_{i_2 j_2})]` indexed by pairs `(i_1, j_1)` and `(i_2, j_2)`
/// (flattened as `i · N + j`). Since the generators are self-adjoint this is
/// the Gram matrix `h(x_a^* x_b)` of the generators in the GNS space.
pub fn degree_two_moment_matrix(n: usize) -> Result<RatMatrix> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    pairs
        .iter()
        .map(|&(i1, j1)| {
            pairs
                .iter()
                .map(|&(i2, j2)| haar_moment(n, &[i1, i2], &[j1, j2]))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn degree_one() {
        for n in 1..=6 {
            let t = weingarten_table(1, n).unwrap();
            assert_eq!(t.weingarten, vec![vec![q(1, n as i64)]]);
            assert_eq!(haar_moment(n, &[0], &[0]).unwrap(), q(1, n as i64));
        }
    }

    #[test]
    fn degree_two_at_four() {
        let t = weingarten_table(2, 4).unwrap();
        assert_eq!(
            t.weingarten,
            vec![vec![q(1, 3), q(-1, 12)], vec![q(-1, 12), q(1, 12)]]
        );
        // (1/48)·[[16, -4], [-4, 4]]
        assert_eq!(t.weingarten[0][0], q(16, 48));
        assert!(exact::is_identity(&exact::mul(&exact::to_rational(&t.gram), &t.weingarten)));
    }

    #[test]
    fn degree_two_at_three_is_defined() {
        let t = weingarten_table(2, 3).unwrap();
        assert!(exact::is_identity(&exact::mul(&exact::to_rational(&t.gram), &t.weingarten)));
    }

    #[test]
    fn singular_tables_are_reported() {
        match weingarten_table(3, 2) {
            Err(Error::Singular { n, k, rank, size }) => {
                assert_eq!((n, k, rank, size), (2, 3, 4, 5));
            }
            other => panic!("expected a singularity error, got {other:?}"),
        }
        assert!(haar_moment(2, &[0, 0, 0], &[0, 0, 0]).is_err());
    }

    #[test]
    fn moments() {
        assert_eq!(haar_moment(5, &[0, 0], &[0, 1]).unwrap(), BigRational::zero());
        for n in 4..=6 {
            let row: BigRational = (0..n).map(|j| haar_moment(n, &[0], &[j]).unwrap()).sum();
            assert!(row.is_one());
        }
        assert!(haar_moment(4, &[0], &[0, 1]).is_err());
        assert!(haar_moment(4, &[4], &[0]).is_err());
        assert!(haar_moment(4, &[], &[]).unwrap().is_one());
    }

    #[test]
    fn orthogonal_row_factors_vanish() {
        for n in [4usize, 5] {
            for k in 2..=3 {
                let total = n.pow(k as u32);
                for fr in 0..total {
                    for fc in 0..total {
                        let mut rows = vec![0; k];
                        let mut cols = vec![0; k];
                        crate::tensor_calc::decode_index(fr, n, k, &mut rows);
                        crate::tensor_calc::decode_index(fc, n, k, &mut cols);
                        let adjacent = (0..k - 1).any(|t| {
                            (rows[t] == rows[t + 1] && cols[t] != cols[t + 1])
                                || (cols[t] == cols[t + 1] && rows[t] != rows[t + 1])
                        });
                        if adjacent {
                            assert!(haar_moment(n, &rows, &cols).unwrap().is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fix_dimensions() {
        assert_eq!(haar_fix_dimension(4, 5).unwrap(), 14);
        assert_eq!(haar_fix_dimension(3, 2).unwrap(), 4);
        assert_eq!(haar_fix_dimension(0, 7).unwrap(), 1);
        assert_eq!(haar_fix_dimension(2, 1).unwrap(), 1);
    }

    #[test]
    fn degree_six_inverts() {
        let t = weingarten_table(6, 4).unwrap();
        assert_eq!(t.partitions.len(), 132);
        assert!(exact::is_identity(&exact::mul(&exact::to_rational(&t.gram), &t.weingarten)));
    }

    #[test]
    fn json_uses_fraction_strings() {
        let json = serde_json::to_string(&weingarten_table(2, 4).unwrap().to_json()).unwrap();
        assert!(json.contains("\"-1/12\""));
        assert!(json.contains("\"01\""));
    }

    #[test]
    fn cache_returns_equal_tables() {
        let a = cached_table(3, 5).unwrap();
        let b = cached_table(3, 5).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }
}
