//! Latin rectangles and squares over the symbols `0..N`, and completion of
//! rectangles by bipartite matching.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// `r × N` array whose rows are permutations of `0..N` and whose columns have no
/// repeated symbol.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct LatinRectangle {
    n: usize,
    rows: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct LatinSquare {
    n: usize,
    rows: Vec<Vec<usize>>,
}

fn check_rows(n: usize, rows: &[Vec<usize>]) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Validation(format!(
                "row {i} has length {}, expected {n}",
                row.len()
            )));
        }
        let mut seen = vec![false; n];
        for &x in row {
            if x >= n {
                return Err(Error::Validation(format!("row {i} contains symbol {x} >= {n}")));
            }
            if seen[x] {
                return Err(Error::Validation(format!("row {i} repeats symbol {x}")));
            }
            seen[x] = true;
        }
    }
    for j in 0..n {
        let mut seen = vec![false; n];
        for row in rows {
            let x = row[j];
            if seen[x] {
                return Err(Error::Validation(format!("column {j} repeats symbol {x}")));
            }
            seen[x] = true;
        }
    }
    Ok(())
}

impl LatinRectangle {
    pub fn new(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.len() > n {
            return Err(Error::Validation(format!("{} rows exceed N = {n}", rows.len())));
        }
        check_rows(n, &rows)?;
        Ok(LatinRectangle { n, rows })
    }

    /// Accepts symbols `1..=N`.
    pub fn from_one_based(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().flatten().any(|&x| x == 0) {
            return Err(Error::Validation("symbol 0 in a 1-based rectangle".into()));
        }
        Self::new(n, rows.into_iter().map(|r| r.into_iter().map(|x| x - 1).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

impl TryFrom<Vec<Vec<usize>>> for LatinRectangle {
    type Error = Error;

    fn try_from(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(n, rows)
    }
}

impl From<LatinRectangle> for Vec<Vec<usize>> {
    fn from(r: LatinRectangle) -> Self {
        r.rows
    }
}

impl LatinSquare {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        check_rows(n, &rows)?;
        Ok(LatinSquare { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.rows[i][j]
    }

    /// The cyclic group table `(i - j) mod N`.
    pub fn circulant(n: usize) -> Self {
        LatinSquare {
            n,
            rows: (0..n).map(|i| (0..n).map(|j| (i + n - j) % n).collect()).collect(),
        }
    }

    /// Positions `(i, j)` holding the symbol `x`, one per row, as the permutation `j ↦ i`.
    pub fn symbol_permutation(&self, x: usize) -> Vec<usize> {
        let mut perm = vec![0; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            let j = row.iter().position(|&y| y == x).expect("every row holds every symbol");
            perm[j] = i;
        }
        perm
    }
}

impl TryFrom<Vec<Vec<usize>>> for LatinSquare {
    type Error = Error;

    fn try_from(rows: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<LatinSquare> for Vec<Vec<usize>> {
    fn from(s: LatinSquare) -> Self {
        s.rows
    }
}

/// Kuhn's augmenting-path matching of left vertices into right vertices, trying
/// neighbours in the given order. Returns the right vertex matched to each left
/// vertex when every left vertex is matched.
pub fn perfect_matching(adj: &[Vec<usize>], right_size: usize) -> Option<Vec<usize>> {
    fn augment(
        v: usize,
        adj: &[Vec<usize>],
        visited: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &to in &adj[v] {
            if visited[to] {
                continue;
            }
            visited[to] = true;
            if owner[to].is_none_or(|w| augment(w, adj, visited, owner)) {
                owner[to] = Some(v);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; right_size];
    for v in 0..adj.len() {
        let mut visited = vec![false; right_size];
        if !augment(v, adj, &mut visited, &mut owner) {
            return None;
        }
    }
    let mut matched = vec![0; adj.len()];
    for (to, v) in owner.iter().enumerate() {
        if let Some(v) = v {
            matched[*v] = to;
        }
    }
    Some(matched)
}

/// Lexicographically least completion of a partial row: every empty column gets
/// the smallest symbol for which the remaining columns still admit a perfect
/// matching into the remaining symbols.
fn extend_row(n: usize, rows: &[Vec<usize>], partial: &[Option<usize>]) -> Option<Vec<usize>> {
    let mut col_used = vec![vec![false; n]; n];
    for row in rows {
        for (j, &x) in row.iter().enumerate() {
            col_used[j][x] = true;
        }
    }
    let mut row: Vec<Option<usize>> = partial.to_vec();
    let mut sym_used = vec![false; n];
    for &x in row.iter().flatten() {
        if sym_used[x] {
            return None;
        }
        sym_used[x] = true;
    }
    let feasible = |row: &[Option<usize>], sym_used: &[bool]| -> bool {
        let open: Vec<usize> = (0..n).filter(|&j| row[j].is_none()).collect();
        let adj: Vec<Vec<usize>> = open
            .iter()
            .map(|&j| (0..n).filter(|&x| !sym_used[x] && !col_used[j][x]).collect())
            .collect();
        perfect_matching(&adj, n).is_some()
    };
    if !feasible(&row, &sym_used) {
        return None;
    }
    for j in 0..n {
        if row[j].is_some() {
            continue;
        }
        let mut placed = false;
        for x in 0..n {
            if sym_used[x] || col_used[j][x] {
                continue;
            }
            row[j] = Some(x);
            sym_used[x] = true;
            if feasible(&row, &sym_used) {
                placed = true;
                break;
            }
            row[j] = None;
            sym_used[x] = false;
        }
        if !placed {
            return None;
        }
    }
    Some(row.into_iter().map(|x| x.expect("filled")).collect())
}

/// Completes a Latin rectangle to a square, one row at a time. Each new row is
/// the lexicographically least row compatible with the rows above it; such a
/// row always exists because the column/free-symbol graph is regular.
pub fn complete_rectangle(r: &LatinRectangle) -> Result<LatinSquare> {
    let n = r.n;
    let mut rows = r.rows.clone();
    while rows.len() < n {
        let next = extend_row(n, &rows, &vec![None; n]).ok_or_else(|| {
            Error::Validation(format!("row {} admits no extension", rows.len()))
        })?;
        rows.push(next);
    }
    LatinSquare::new(rows)
}

/// `N × N` square whose upper-left `M × M` block is `(i - j) mod M`, the rest of
/// the first `M` rows filled with the least symbols `>= M`, and the remaining
/// rows completed by [`complete_rectangle`]. Needs `2M <= N`.
pub fn circulant_corner_square(n: usize, m: usize) -> Result<LatinSquare> {
    if m == 0 {
        return domain("corner size M must be positive");
    }
    if 2 * m > n {
        return domain(format!(
            "the corner construction needs 2M <= N, got M = {m}, N = {n}"
        ));
    }
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n);
    for i in 0..m {
        let partial: Vec<Option<usize>> = (0..n)
            .map(|j| (j < m).then(|| (i + m - j) % m))
            .collect();
        let row = extend_row(n, &rows, &partial)
            .ok_or_else(|| Error::Validation(format!("corner row {i} admits no extension")))?;
        rows.push(row);
    }
    complete_rectangle(&LatinRectangle::new(n, rows)?)
}

/// Square whose upper-left `2 × 2` block is `[[0, 1], [1, 0]]`: the first row is
/// `0..N`, the second starts `1, 0`, and everything else is completed. Exists
/// for `N = 2` and `N >= 4`.
pub fn swap_corner_square(n: usize) -> Result<LatinSquare> {
    if n < 2 || n == 3 {
        return domain(format!("no Latin square of size {n} has a [[0,1],[1,0]] corner"));
    }
    let first: Vec<usize> = (0..n).collect();
    let partial: Vec<Option<usize>> = (0..n)
        .map(|j| match j {
            0 => Some(1),
            1 => Some(0),
            _ => None,
        })
        .collect();
    let second = extend_row(n, std::slice::from_ref(&first), &partial)
        .ok_or_else(|| Error::Validation("second row admits no extension".into()))?;
    complete_rectangle(&LatinRectangle::new(n, vec![first, second])?)
}
