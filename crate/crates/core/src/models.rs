//! Matrix models of the magic unitary: flat models (rank-one projections onto
//! unit vectors of `C^N`), classical Latin models, corner deformations, corner
//! gluing and direct sums.

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::latin::{circulant_corner_square, LatinSquare};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default tolerance for projection and orthonormality checks.
pub const DEFAULT_MODEL_TOL: f64 = 1e-8;

/// `N × N` array of `d × d` projections `P_{ij}`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MagicUnitary {
    n: usize,
    d: usize,
    entries: Vec<CMat>,
    provenance: Vec<String>,
}

impl MagicUnitary {
    /// Builds a model from its entries without checking the magic conditions;
    /// see [`validate`].
    pub fn new(n: usize, entries: Vec<CMat>, provenance: Vec<String>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Validation(format!(
                "expected {} entries for N = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        let d = entries.first().map_or(0, |p| p.nrows());
        if let Some(pos) = entries.iter().position(|p| p.nrows() != d || p.ncols() != d) {
            return Err(Error::Validation(format!(
                "entry ({}, {}) is not {d} x {d}",
                pos / n + 1,
                pos % n + 1
            )));
        }
        Ok(MagicUnitary {
            n,
            d,
            entries,
            provenance,
        })
    }

    /// Scalar model of a permutation: `P_{ij} = 1` iff `perm[j] == i`.
    pub fn from_permutation(perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &x in perm {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return domain(format!("{perm:?} is not a permutation of 0..{n}"));
            }
        }
        let entries = (0..n * n)
            .map(|ij| {
                let v = if perm[ij % n] == ij / n { 1.0 } else { 0.0 };
                CMat::from_element(1, 1, C64::new(v, 0.0))
            })
            .collect();
        Ok(MagicUnitary {
            n,
            d: 1,
            entries,
            provenance: vec![format!("permutation {perm:?}")],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &CMat {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[CMat] {
        &self.entries
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }
}

/// Flat model: `P_{ij}` is the projection onto the unit vector `ξ_{ij} ∈ C^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatModel {
    n: usize,
    vectors: Vec<CVec>,
    provenance: Vec<String>,
}

fn projection(v: &CVec) -> CMat {
    v * v.adjoint()
}

fn basis_vector(n: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

impl FlatModel {
    pub fn new(n: usize, vectors: Vec<CVec>, provenance: Vec<String>) -> Result<Self> {
        if vectors.len() != n * n {
            return Err(Error::Validation(format!(
                "expected {} vectors for N = {n}, got {}",
                n * n,
                vectors.len()
            )));
        }
        if let Some(pos) = vectors.iter().position(|v| v.len() != n) {
            return Err(Error::Validation(format!(
                "vector ({}, {}) does not lie in C^{n}",
                pos / n + 1,
                pos % n + 1
            )));
        }
        Ok(FlatModel {
            n,
            vectors,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self, i: usize, j: usize) -> &CVec {
        &self.vectors[i * self.n + j]
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn to_magic(&self) -> MagicUnitary {
        MagicUnitary {
            n: self.n,
            d: self.n,
            entries: self.vectors.iter().map(projection).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Magic-unitary checks plus the unit-norm check on the vectors.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let mut report = validate(&self.to_magic(), tol);
        let (worst, at) = self
            .vectors
            .iter()
            .enumerate()
            .map(|(pos, v)| ((v.norm() - 1.0).abs(), pos))
            .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
        report.push("unit vectors", worst, Some(self.position_label(at)));
        report
    }

    fn position_label(&self, pos: usize) -> String {
        format!("entry ({}, {})", pos / self.n + 1, pos % self.n + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub worst_deviation: f64,
    pub location: Option<String>,
    pub passed: bool,
}

/// Per-check worst deviations (Frobenius norms) against a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl ValidationReport {
    fn push(&mut self, name: &str, worst: f64, location: Option<String>) {
        let passed = worst <= self.tol;
        self.passed &= passed;
        self.checks.push(Check {
            name: name.to_string(),
            worst_deviation: worst,
            location,
            passed,
        });
    }

    /// Human-readable failure lines such as `row sums: row 2 deviates by 1`.
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.location {
                Some(at) => format!("{}: {at} deviates by {:.3e}", c.name, c.worst_deviation),
                None => format!("{}: deviation {:.3e}", c.name, c.worst_deviation),
            })
            .collect()
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> (f64, usize) {
    values
        .enumerate()
        .fold((0.0, 0), |a, (i, v)| if v > a.0 || v.is_nan() { (v, i) } else { a })
}

/// Checks self-adjointness, idempotence and the row and column resolutions of
/// the identity.
pub fn validate(m: &MagicUnitary, tol: f64) -> ValidationReport {
    let n = m.n;
    let id = CMat::identity(m.d, m.d);
    let label = |pos: usize| format!("entry ({}, {})", pos / n + 1, pos % n + 1);
    let mut report = ValidationReport {
        tol,
        checks: Vec::new(),
        passed: true,
    };
    let (w, at) = argmax(m.entries.iter().map(|p| (p - p.adjoint()).norm()));
    report.push("self-adjoint", w, (n > 0).then(|| label(at)));
    let (w, at) = argmax(m.entries.iter().map(|p| (p * p - p).norm()));
    report.push("idempotent", w, (n > 0).then(|| label(at)));
    let (w, at) = argmax((0..n).map(|i| {
        let s: CMat = (0..n).fold(CMat::zeros(m.d, m.d), |acc, j| acc + m.entry(i, j));
        (s - &id).norm()
    }));
    report.push("row sums", w, (n > 0).then(|| format!("row {}", at + 1)));
    let (w, at) = argmax((0..n).map(|j| {
        let s: CMat = (0..n).fold(CMat::zeros(m.d, m.d), |acc, i| acc + m.entry(i, j));
        (s - &id).norm()
    }));
    report.push("column sums", w, (n > 0).then(|| format!("column {}", at + 1)));
    report
}

/// `ξ_{ij} = basis[L_{ij}]`.
pub fn from_latin(l: &LatinSquare, basis: &[CVec], tol: f64) -> Result<FlatModel> {
    let n = l.n();
    if basis.len() != n || basis.iter().any(|v| v.len() != n) {
        return domain(format!("the basis must consist of {n} vectors of C^{n}"));
    }
    for a in 0..n {
        for b in 0..n {
            let g = basis[a].dotc(&basis[b]);
            let target = if a == b { 1.0 } else { 0.0 };
            if (g - C64::new(target, 0.0)).norm() > tol {
                return Err(Error::Validation(format!(
                    "basis vectors {} and {} violate orthonormality by {:.3e}",
                    a + 1,
                    b + 1,
                    (g - C64::new(target, 0.0)).norm()
                )));
            }
        }
    }
    let vectors = (0..n * n).map(|ij| basis[l.get(ij / n, ij % n)].clone()).collect();
    Ok(FlatModel {
        n,
        vectors,
        provenance: vec![format!("latin {:?}", l.rows())],
    })
}

/// [`from_latin`] with the standard basis: `P_{ij} = E_{L_{ij}, L_{ij}}`.
pub fn from_latin_standard(l: &LatinSquare) -> FlatModel {
    let basis: Vec<CVec> = (0..l.n()).map(|i| basis_vector(l.n(), i)).collect();
    from_latin(l, &basis, DEFAULT_MODEL_TOL).expect("the standard basis is orthonormal")
}

/// Replaces a corner `[[P_a, P_b], [P_b, P_a]]` with orthogonal rank-one `P_a`,
/// `P_b` by `[[P_u, P_v], [P_v, P_u]]` where `u, v = (ξ_a ± ξ_b)/√2`. Only the
/// four corner vectors change.
pub fn deform_corner_2x2(m: &FlatModel, tol: f64) -> Result<FlatModel> {
    let n = m.n;
    if n < 2 {
        return domain("the model needs a 2 x 2 corner");
    }
    let a = m.vector(0, 0);
    let b = m.vector(0, 1);
    let same_line = |x: &CVec, y: &CVec| (x.dotc(y).norm() - 1.0).abs() <= tol;
    if !same_line(a, m.vector(1, 1)) || !same_line(b, m.vector(1, 0)) || a.dotc(b).norm() > tol {
        return Err(Error::Validation(
            "the upper-left corner is not of the form [[P_a, P_b], [P_b, P_a]] with P_a ⟂ P_b".into(),
        ));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = (a + b).map(|z| z * s);
    let v = (a - b).map(|z| z * s);
    let mut vectors = m.vectors.clone();
    vectors[0] = u.clone();
    vectors[n + 1] = u;
    vectors[1] = v.clone();
    vectors[n] = v;
    let mut provenance = m.provenance.clone();
    provenance.push("deform_corner_2x2".into());
    Ok(FlatModel {
        n,
        vectors,
        provenance,
    })
}

/// Largest operator norm of a commutator `[P_{ij}, P_{kl}]`.
pub fn max_commutator_norm(m: &MagicUnitary) -> f64 {
    let count = m.entries.len();
    (0..count)
        .into_par_iter()
        .map(|a| {
            let p = &m.entries[a];
            ((a + 1)..count)
                .map(|b| {
                    let q = &m.entries[b];
                    let c = p * q - q * p;
                    let fro = c.norm();
                    // The Frobenius norm bounds the operator norm from above.
                    if fro <= 1e-14 {
                        fro
                    } else {
                        c.singular_values().max()
                    }
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// True when all entries pairwise commute within `tol` in operator norm.
pub fn is_classical(m: &MagicUnitary, tol: f64) -> bool {
    max_commutator_norm(m) <= tol
}

/// Embeds an `M × M` flat model into the upper-left corner of the square from
/// [`circulant_corner_square`], with `ξ_{ij} = e_{L_{ij}}` elsewhere. The
/// corner vectors are padded with zeros, i.e. identified with `span(e_1..e_M)`.
pub fn glue_corner(inner: &FlatModel, n: usize) -> Result<FlatModel> {
    let m = inner.n;
    let sq = circulant_corner_square(n, m)?;
    let vectors = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            if i < m && j < m {
                let mut v = CVec::zeros(n);
                v.rows_mut(0, m).copy_from(inner.vector(i, j));
                v
            } else {
                basis_vector(n, sq.get(i, j))
            }
        })
        .collect();
    let mut provenance = inner.provenance.clone();
    provenance.push(format!("glue_corner N={n}"));
    Ok(FlatModel {
        n,
        vectors,
        provenance,
    })
}

/// Block-diagonal sum of models of a common size.
pub fn direct_sum(models: &[MagicUnitary]) -> Result<MagicUnitary> {
    let Some(first) = models.first() else {
        return domain("direct_sum needs at least one model");
    };
    let n = first.n;
    if let Some(bad) = models.iter().find(|m| m.n != n) {
        return domain(format!("size mismatch: N = {n} against N = {}", bad.n));
    }
    let d: usize = models.iter().map(|m| m.d).sum();
    let entries = (0..n * n)
        .map(|ij| {
            let mut block = CMat::zeros(d, d);
            let mut off = 0;
            for m in models {
                block.view_mut((off, off), (m.d, m.d)).copy_from(&m.entries[ij]);
                off += m.d;
            }
            block
        })
        .collect();
    let provenance = if models.len() == 1 {
        first.provenance.clone()
    } else {
        let parts: Vec<String> = models.iter().map(|m| m.provenance.join(" > ")).collect();
        vec![format!("direct_sum[{}]", parts.join(" | "))]
    };
    Ok(MagicUnitary {
        n,
        d,
        entries,
        provenance,
    })
}

/// `P_{ij} = Σ_k A_{ik} ⊗ B_{kj}`: the model whose state is the convolution of
/// the states of `a` and `b`.
pub fn coproduct_model(a: &MagicUnitary, b: &MagicUnitary) -> Result<MagicUnitary> {
    if a.n != b.n {
        return domain(format!("size mismatch: N = {} against N = {}", a.n, b.n));
    }
    let n = a.n;
    let entries = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (0..n).fold(CMat::zeros(a.d * b.d, a.d * b.d), |acc, k| {
                acc + a.entry(i, k).kronecker(b.entry(k, j))
            })
        })
        .collect();
    Ok(MagicUnitary {
        n,
        d: a.d * b.d,
        entries,
        provenance: vec![format!(
            "coproduct[{} | {}]",
            a.provenance.join(" > "),
            b.provenance.join(" > ")
        )],
    })
}

/// The Latin square with corner `[[0, 1], [1, 0]]`, its flat model and the
/// deformation of that corner.
pub fn deformed_swap_model(n: usize) -> Result<FlatModel> {
    let sq = crate::latin::swap_corner_square(n)?;
    deform_corner_2x2(&from_latin_standard(&sq), DEFAULT_MODEL_TOL)
}

/// Classical model of `L_{ij} = (τ(i) - j) mod N` with `τ` the transposition of
/// the first two rows. Its symbol permutations generate the full symmetric group
/// for `N >= 2`.
pub fn symmetric_generating_model(n: usize) -> Result<FlatModel> {
    if n < 2 {
        return domain("N must be at least 2");
    }
    let tau = |i: usize| match i {
        0 => 1,
        1 => 0,
        _ => i,
    };
    let rows = (0..n).map(|i| (0..n).map(|j| (tau(i) + n - j) % n).collect()).collect();
    let sq = LatinSquare::new(rows)?;
    let mut m = from_latin_standard(&sq);
    m.provenance = vec![format!("symmetric_generating N={n}")];
    Ok(m)
}

/// Row and column overlap summary of a model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Description {
    pub n: usize,
    pub d: usize,
    pub flat: bool,
    /// `rank P_{ij}` as the rounded trace.
    pub ranks: Vec<Vec<usize>>,
    /// Per row, `max_{j≠k} ‖P_{ij} P_{ik}‖`.
    pub row_overlap: Vec<f64>,
    pub column_overlap: Vec<f64>,
    pub max_commutator: f64,
    pub classical: bool,
    pub provenance: Vec<String>,
}

pub fn describe(m: &MagicUnitary, flat: bool, tol: f64) -> Description {
    let n = m.n;
    let overlap = |pairs: &dyn Fn(usize, usize) -> (usize, usize), line: usize| -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in (a + 1)..n {
                let (p, q) = (pairs(line, a), pairs(line, b));
                let prod = m.entry(p.0, p.1) * m.entry(q.0, q.1);
                worst = worst.max(prod.norm());
            }
        }
        worst
    };
    let max_commutator = max_commutator_norm(m);
    Description {
        n,
        d: m.d,
        flat,
        ranks: (0..n)
            .map(|i| (0..n).map(|j| m.entry(i, j).trace().re.round().max(0.0) as usize).collect())
            .collect(),
        row_overlap: (0..n).map(|i| overlap(&|i, j| (i, j), i)).collect(),
        column_overlap: (0..n).map(|j| overlap(&|j, i| (i, j), j)).collect(),
        max_commutator,
        classical: max_commutator <= tol,
        provenance: m.provenance.clone(),
    }
}

/// Either kind of model, as read from or written to `model.json`.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Flat(FlatModel),
    General(MagicUnitary),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    flat: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrices: Option<Vec<Vec<Vec<Vec<[f64; 2]>>>>>,
    #[serde(default)]
    provenance: Vec<String>,
}

fn c2(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

impl Model {
    pub fn to_magic(&self) -> MagicUnitary {
        match self {
            Model::Flat(f) => f.to_magic(),
            Model::General(m) => m.clone(),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Model::Flat(_))
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        match self {
            Model::Flat(f) => f.validate(tol),
            Model::General(m) => validate(m, tol),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = match self {
            Model::Flat(f) => ModelJson {
                n: f.n,
                d: f.n,
                flat: true,
                vectors: Some(
                    (0..f.n)
                        .map(|i| (0..f.n).map(|j| f.vector(i, j).iter().map(c2).collect()).collect())
                        .collect(),
                ),
                matrices: None,
                provenance: f.provenance.clone(),
            },
            Model::General(m) => ModelJson {
                n: m.n,
                d: m.d,
                flat: false,
                vectors: None,
                matrices: Some(
                    (0..m.n)
                        .map(|i| {
                            (0..m.n)
                                .map(|j| {
                                    let p = m.entry(i, j);
                                    (0..m.d).map(|r| (0..m.d).map(|c| c2(&p[(r, c)])).collect()).collect()
                                })
                                .collect()
                        })
                        .collect(),
                ),
                provenance: m.provenance.clone(),
            },
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses `model.json`, checking shapes. Numerical validity is left to
    /// [`Model::validate`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelJson = serde_json::from_str(text)?;
        let n = doc.n;
        let shape = |what: &str| Error::Validation(format!("model file: {what}"));
        let flatten = |rows: Vec<Vec<Vec<[f64; 2]>>>| -> Result<Vec<Vec<[f64; 2]>>> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(shape(&format!("expected an {n} x {n} array of entries")));
            }
            Ok(rows.into_iter().flatten().collect())
        };
        match (doc.flat, doc.vectors, doc.matrices) {
            (true, Some(vectors), None) => {
                if doc.d != n {
                    return Err(shape("a flat model has d = N"));
                }
                let vectors = flatten(vectors)?
                    .into_iter()
                    .map(|v| {
                        if v.len() != n {
                            return Err(shape(&format!("vectors must have {n} coordinates")));
                        }
                        Ok(CVec::from_iterator(n, v.iter().map(|z| C64::new(z[0], z[1]))))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Model::Flat(FlatModel::new(n, vectors, doc.provenance)?))
            }
            (false, None, Some(matrices)) => {
                let d = doc.d;
                if matrices.len() != n || matrices.iter().any(|r| r.len() != n) {
                    return Err(shape(&format!("expected an {n} x {n} array of matrices")));
                }
                let entries = matrices
                    .into_iter()
                    .flatten()
                    .map(|p| {
                        if p.len() != d || p.iter().any(|r| r.len() != d) {
                            return Err(shape(&format!("matrices must be {d} x {d}")));
                        }
                        Ok(CMat::from_fn(d, d, |r, c| C64::new(p[r][c][0], p[r][c][1])))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Model::General(MagicUnitary::new(n, entries, doc.provenance)?))
            }
            _ => Err(shape("flat models carry `vectors`, general models carry `matrices`")),
        }
    }
}
