//! The fusion ring `R_s` of `H_N^{s+}`: integer combinations of words over
//! `Z_s` with
//! `x_f x_g = Σ_{f = vz, g = z̄w} (x_{vw} + x_{v·w})`, where `z̄` is the
//! involution and `v·w` fuses the boundary letters. The fused term is dropped
//! when `v` or `w` is empty, which makes `x_∅` the unit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::partitions::ColoredWord;

/// Longest word accepted by [`dimension`] and [`restrict`].
pub const MAX_WORD_LEN: usize = 64;

fn neg(a: u32, s: u32) -> u32 {
    (s - a % s) % s
}

/// `(a_1 ... a_k) ↦ (-a_k) ... (-a_1)`.
pub fn involute(w: &ColoredWord) -> ColoredWord {
    let s = w.modulus();
    ColoredWord::new(s, w.letters().iter().rev().map(|&a| neg(a, s)).collect())
        .expect("negation stays in Z_s")
}

/// `(a_1 ... a_k)·(b_1 ... b_l) = (a_1 ... a_{k-1}, a_k + b_1, b_2 ... b_l)`.
pub fn fuse(v: &ColoredWord, w: &ColoredWord) -> Result<ColoredWord> {
    same_modulus(v, w)?;
    if v.is_empty() || w.is_empty() {
        return domain("fusion needs two non-empty words");
    }
    let s = v.modulus();
    let (a, b) = (v.letters(), w.letters());
    let mut out = a[..a.len() - 1].to_vec();
    out.push((a[a.len() - 1] + b[0]) % s);
    out.extend_from_slice(&b[1..]);
    ColoredWord::new(s, out)
}

fn same_modulus(v: &ColoredWord, w: &ColoredWord) -> Result<()> {
    if v.modulus() != w.modulus() {
        return domain(format!(
            "words over Z_{} and Z_{} cannot be combined",
            v.modulus(),
            w.modulus()
        ));
    }
    Ok(())
}

/// Integer combination of basis elements `x_f`; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionElement {
    s: u32,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl FusionElement {
    pub fn zero(s: u32) -> Self {
        FusionElement {
            s,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(s: u32) -> Self {
        Self::basis(&ColoredWord::empty(s))
    }

    pub fn basis(w: &ColoredWord) -> Self {
        let mut e = Self::zero(w.modulus());
        e.add_term(w.letters().to_vec(), 1);
        e
    }

    pub fn modulus(&self) -> u32 {
        self.s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &ColoredWord) -> i64 {
        self.terms.get(w.letters()).copied().unwrap_or(0)
    }

    /// Terms in word order (shorter prefixes first).
    pub fn terms(&self) -> impl Iterator<Item = (ColoredWord, i64)> + '_ {
        self.terms
            .iter()
            .map(|(w, &c)| (ColoredWord::new(self.s, w.clone()).expect("stored words are valid"), c))
    }

    fn add_term(&mut self, word: Vec<u32>, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(word).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.s != other.s {
            return domain(format!(
                "elements of R_{} and R_{} cannot be combined",
                self.s, other.s
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1, other)
    }

    /// `self + c · other`.
    pub fn axpy(&self, c: i64, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, &x) in &other.terms {
            out.add_term(w.clone(), c * x);
        }
        Ok(out)
    }

    /// Bilinear extension of [`multiply`].
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.s);
        for (f, &a) in &self.terms {
            for (g, &b) in &other.terms {
                let f = ColoredWord::new(self.s, f.clone())?;
                let g = ColoredWord::new(self.s, g.clone())?;
                for (w, c) in multiply(&f, &g)?.terms {
                    out.add_term(w, a * b * c);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for FusionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            let sep = if i > 0 { " " } else { "" };
            let mag = c.unsigned_abs();
            let coeff = if mag == 1 { String::new() } else { mag.to_string() };
            let word: Vec<String> = w.iter().map(u32::to_string).collect();
            let word = if w.is_empty() { "∅".to_string() } else { format!("({})", word.join(",")) };
            write!(f, "{sep}{sign}{}{coeff}x_{word}", if i > 0 { " " } else { "" })?;
        }
        Ok(())
    }
}

/// Words are written as comma-joined letters, `""` for the empty word.
impl Serialize for FusionElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.terms.len()))?;
        for (w, c) in &self.terms {
            let key: Vec<String> = w.iter().map(u32::to_string).collect();
            map.serialize_entry(&key.join(","), c)?;
        }
        map.end()
    }
}

/// Parses `"1,0"` (or `""` for the empty word) into a word over `Z_s`.
pub fn parse_word(s: u32, text: &str) -> Result<ColoredWord> {
    let text = text.trim().trim_start_matches('(').trim_end_matches(')');
    if text.is_empty() {
        return ColoredWord::new(s, Vec::new());
    }
    let letters = text
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<i64>()
                .map_err(|_| Error::Usage(format!("invalid letter {a:?} in word {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    ColoredWord::from_ints(s, &letters)
}

/// `x_f x_g` in the word basis.
pub fn multiply(f: &ColoredWord, g: &ColoredWord) -> Result<FusionElement> {
    same_modulus(f, g)?;
    let s = f.modulus();
    let (a, b) = (f.letters(), g.letters());
    let mut out = FusionElement::zero(s);
    // z runs over common lengths with f = v z and g = z̄ w.
    for len in 0..=a.len().min(b.len()) {
        let (v, z) = a.split_at(a.len() - len);
        let (zbar, w) = b.split_at(len);
        if z.iter().rev().zip(zbar).any(|(&x, &y)| y != neg(x, s)) {
            // Once the innermost letters fail to cancel, longer z fail too.
            break;
        }
        let mut vw = v.to_vec();
        vw.extend_from_slice(w);
        out.add_term(vw, 1);
        if let (Some(&last), Some(&first)) = (v.last(), w.first()) {
            let mut fused = v[..v.len() - 1].to_vec();
            fused.push((last + first) % s);
            fused.extend_from_slice(&w[1..]);
            out.add_term(fused, 1);
        }
    }
    Ok(out)
}

/// The ring morphism `R_{st} → R_s` extending the letter map
/// `a ↦ x_(a mod s)` when `a ≢ 0 (mod s)` or `a ≡ 0 (mod st)`, and
/// `a ↦ x_(0) + x_∅` when `a ≡ 0 (mod s)` but `a ≢ 0 (mod st)`.
///
/// Longer words are reached through
/// `x_(a_1) x_(a_2 ...) = x_(a_1 a_2 ...) + x_(a_1 + a_2, ...) + [a_2 = -a_1] x_(a_3 ...)`.
pub fn restrict(f: &FusionElement, s: u32) -> Result<FusionElement> {
    let source = f.modulus();
    if s == 0 || !source.is_multiple_of(s) {
        return domain(format!("{s} does not divide the source modulus {source}"));
    }
    let mut memo = HashMap::new();
    let mut out = FusionElement::zero(s);
    for (w, c) in f.terms() {
        if w.len() > MAX_WORD_LEN {
            return domain(format!("words longer than {MAX_WORD_LEN} are not restricted"));
        }
        out = out.axpy(c, &restrict_word(w.letters(), source, s, &mut memo)?)?;
    }
    Ok(out)
}

/// [`restrict`] on a single basis element.
pub fn restrict_basis(w: &ColoredWord, s: u32) -> Result<FusionElement> {
    restrict(&FusionElement::basis(w), s)
}

fn restrict_letter(a: u32, source: u32, s: u32) -> FusionElement {
    let mut out = FusionElement::zero(s);
    out.add_term(vec![a % s], 1);
    if a.is_multiple_of(s) && !a.is_multiple_of(source) {
        out.add_term(Vec::new(), 1);
    }
    out
}

fn restrict_word(
    w: &[u32],
    source: u32,
    s: u32,
    memo: &mut HashMap<Vec<u32>, FusionElement>,
) -> Result<FusionElement> {
    match w.len() {
        0 => return Ok(FusionElement::one(s)),
        1 => return Ok(restrict_letter(w[0], source, s)),
        _ => {}
    }
    if let Some(hit) = memo.get(w) {
        return Ok(hit.clone());
    }
    let head = restrict_letter(w[0], source, s);
    let mut out = head.mul(&restrict_word(&w[1..], source, s, memo)?)?;
    let mut fused = vec![(w[0] + w[1]) % source];
    fused.extend_from_slice(&w[2..]);
    out = out.sub(&restrict_word(&fused, source, s, memo)?)?;
    if w[1] == neg(w[0], source) {
        out = out.sub(&restrict_word(&w[2..], source, s, memo)?)?;
    }
    memo.insert(w.to_vec(), out.clone());
    Ok(out)
}

type DimCache = Mutex<HashMap<(u32, usize, Vec<u32>), i128>>;

fn dim_cache() -> &'static DimCache {
    static CACHE: OnceLock<DimCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Value at `x_f` of the ring morphism `R_s → Z` with `d(x_∅) = 1` and
/// `d(x_(a)) = N - [a = 0]`.
pub fn dimension(f: &ColoredWord, n: usize) -> Result<i128> {
    if n < 4 {
        return domain(format!("dimensions are defined for N >= 4, got {n}"));
    }
    if f.len() > MAX_WORD_LEN {
        return domain(format!("words longer than {MAX_WORD_LEN} exceed the recursion cap"));
    }
    let key = (f.modulus(), n, f.letters().to_vec());
    if let Some(&d) = dim_cache().lock().expect("cache poisoned").get(&key) {
        return Ok(d);
    }
    let mut memo = HashMap::new();
    let d = dim_word(f.letters(), f.modulus(), n as i128, &mut memo)?;
    let mut cache = dim_cache().lock().expect("cache poisoned");
    for (w, v) in memo {
        cache.entry((f.modulus(), n, w)).or_insert(v);
    }
    Ok(d)
}

/// Dimension of a combination.
pub fn element_dimension(f: &FusionElement, n: usize) -> Result<i128> {
    f.terms().try_fold(0i128, |acc, (w, c)| {
        let d = dimension(&w, n)?;
        d.checked_mul(i128::from(c))
            .and_then(|x| acc.checked_add(x))
            .ok_or_else(|| Error::Domain("dimension overflows i128".into()))
    })
}

fn dim_word(w: &[u32], s: u32, n: i128, memo: &mut HashMap<Vec<u32>, i128>) -> Result<i128> {
    match w.len() {
        0 => return Ok(1),
        1 => return Ok(if w[0] == 0 { n - 1 } else { n }),
        _ => {}
    }
    if let Some(&d) = memo.get(w) {
        return Ok(d);
    }
    let overflow = || Error::Domain("dimension overflows i128".into());
    let head = dim_word(&w[..1], s, n, memo)?;
    let tail = dim_word(&w[1..], s, n, memo)?;
    let mut fused = vec![(w[0] + w[1]) % s];
    fused.extend_from_slice(&w[2..]);
    let mut d = head
        .checked_mul(tail)
        .and_then(|x| x.checked_sub(dim_word(&fused, s, n, memo).ok()?))
        .ok_or_else(overflow)?;
    if w[1] == neg(w[0], s) {
        d -= dim_word(&w[2..], s, n, memo)?;
    }
    memo.insert(w.to_vec(), d);
    Ok(d)
}
