//! Exact linear algebra over `Z` and `Q` on dense row-major matrices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<BigRational>>;

/// Rank over `Q` of an integer matrix (fraction-free Bareiss elimination).
pub fn rank_int(matrix: &IntMatrix) -> usize {
    let rows = matrix.len();
    if rows == 0 {
        return 0;
    }
    let cols = matrix[0].len();
    let mut a = matrix.clone();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in (rank + 1)..rows {
            for c in (col + 1)..cols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

pub fn to_rational(matrix: &IntMatrix) -> RatMatrix {
    matrix
        .iter()
        .map(|row| row.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect()
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn invert(matrix: &RatMatrix) -> Option<RatMatrix> {
    let n = matrix.len();
    let mut a = matrix.clone();
    let mut inv: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] /= &p;
            inv[col][c] /= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                if !a[col][c].is_zero() {
                    let t = &f * &a[col][c];
                    a[r][c] -= t;
                }
                if !inv[col][c].is_zero() {
                    let t = &f * &inv[col][c];
                    inv[r][c] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = BigRational::zero();
                    for t in 0..inner {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            acc += &a[i][t] * &b[t][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn is_identity(a: &RatMatrix) -> bool {
    a.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}

pub fn rational_to_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Serde adapter writing rationals as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio(pub BigRational);

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&rational_to_string(&self.0))
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s)
            .map(Ratio)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid rational {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(rows: &[&[i64]]) -> IntMatrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_int(&int(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank_int(&int(&[&[4, 4], &[4, 16]])), 2);
        assert_eq!(rank_int(&int(&[&[0, 0, 1], &[0, 0, 2], &[1, 0, 0]])), 2);
        assert_eq!(rank_int(&Vec::new()), 0);
    }

    #[test]
    fn inverse_of_small_gram() {
        let g = to_rational(&int(&[&[4, 4], &[4, 16]]));
        let w = invert(&g).unwrap();
        assert!(is_identity(&mul(&g, &w)));
        assert_eq!(rational_to_string(&w[0][0]), "1/3");
        assert_eq!(rational_to_string(&w[0][1]), "-1/12");
        assert!(invert(&to_rational(&int(&[&[1, 2], &[2, 4]]))).is_none());
    }

    #[test]
    fn rational_strings() {
        let x = parse_rational("-3/6").unwrap();
        assert_eq!(rational_to_string(&x), "-1/2");
        assert_eq!(parse_rational("7").unwrap(), BigRational::from_integer(7.into()));
        assert!(parse_rational("1/0").is_none());
    }
}
