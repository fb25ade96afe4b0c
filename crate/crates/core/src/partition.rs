//! Integer partitions, Young diagrams and tableaux.
//!
//! Partitions label both the conjugacy classes and the irreps of `S_n`, and (with at most `d`
//! rows) the irreps of `SU(d)`. Columns of full length `d` are kept in labels, so the same
//! partition names an `S_n` irrep and its `SU(d)` partner.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::factorial;

/// Default bound on the number of standard tableaux enumerated for one shape.
pub const DEFAULT_MAX_SYT: usize = 100_000;

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Validates `parts`; trailing zeros are dropped.
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.is_empty() {
            return Err(Error::InvalidPartition("empty partition".into()));
        }
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing and positive"
            )));
        }
        Ok(Partition { parts })
    }

    pub(crate) fn from_sorted_unchecked(parts: Vec<usize>) -> Self {
        debug_assert!(Partition::new(parts.clone()).is_ok());
        Partition { parts }
    }

    /// The one-row partition `[n]`.
    pub fn row(n: usize) -> Self {
        Partition { parts: vec![n] }
    }

    /// The one-column partition `[1^n]`.
    pub fn column(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `n`, the number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows, `l(lambda)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Row length `p` (0-based), zero past the last row.
    pub fn part(&self, p: usize) -> usize {
        self.parts.get(p).copied().unwrap_or(0)
    }

    pub fn transpose(&self) -> Partition {
        let cols = self.parts[0];
        let parts = (0..cols)
            .map(|c| self.parts.iter().take_while(|&&r| r > c).count())
            .collect();
        Partition { parts }
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.transpose() == *self
    }

    /// `(part, multiplicity)` pairs in decreasing part order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// True when all parts are odd and pairwise distinct.
    pub fn has_distinct_odd_parts(&self) -> bool {
        self.parts.iter().all(|p| p % 2 == 1) && self.parts.windows(2).all(|w| w[0] != w[1])
    }

    /// `+1` for an even cycle type, `-1` for an odd one.
    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.parts.iter().map(|p| p - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Hook length of every box, row by row.
    pub fn hook_lengths(&self) -> Vec<Vec<usize>> {
        let t = self.transpose();
        self.parts
            .iter()
            .enumerate()
            .map(|(r, &len)| (0..len).map(|c| (len - c - 1) + (t.parts[c] - r - 1) + 1).collect())
            .collect()
    }

    /// Exponent notation, e.g. `[3,1^2]`, `[2^2,1]`.
    pub fn exp_notation(&self) -> String {
        let body: Vec<String> = self
            .multiplicities()
            .into_iter()
            .map(|(p, m)| if m == 1 { p.to_string() } else { format!("{p}^{m}") })
            .collect();
        format!("[{}]", body.join(","))
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let bad = |t: &str| Error::Parse(format!("bad part '{t}'"));
        let mut parts = Vec::new();
        // Accepts "3,1,1" and exponent notation such as "2^2,1".
        for t in s.split(',') {
            let t = t.trim();
            match t.split_once('^') {
                Some((p, e)) => {
                    let p: usize = p.trim().parse().map_err(|_| bad(t))?;
                    let e: usize = e.trim().parse().map_err(|_| bad(t))?;
                    parts.extend(std::iter::repeat_n(p, e));
                }
                None => parts.push(t.parse().map_err(|_| bad(t))?),
            }
        }
        Partition::new(parts)
    }
}

/// All partitions of `n` with at most `max_length` rows, in reverse-lexicographic order.
pub fn partitions_of(n: usize, max_length: usize) -> Vec<Partition> {
    fn go(remaining: usize, max_part: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for p in (1..=max_part.min(remaining)).rev() {
            cur.push(p);
            go(remaining - p, p, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    go(n, n, max_length, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the `S_n` irrep `lambda` by the hook-length formula.
pub fn dim_sn(lambda: &Partition) -> u64 {
    let hooks: u128 = lambda.hook_lengths().iter().flatten().map(|&h| h as u128).product();
    let n = lambda.size();
    // n! / prod(h), evaluated in big integers for n > 20.
    if n <= 30 {
        let mut fact: u128 = 1;
        for k in 1..=n as u128 {
            fact *= k;
        }
        (fact / hooks) as u64
    } else {
        let mut fact = BigInt::from(1);
        for k in 1..=n {
            fact *= k;
        }
        (fact / BigInt::from(hooks)).to_u64().unwrap_or(u64::MAX)
    }
}

/// Dimension of the `SU(d)` irrep `lambda` by the Weyl formula with `l_p = d - p + 1 + lambda_p`;
/// zero when `lambda` has more than `d` rows.
pub fn dim_sud(lambda: &Partition, d: usize) -> u64 {
    if lambda.len() > d {
        return 0;
    }
    let l: Vec<i64> = (1..=d)
        .map(|p| d as i64 - p as i64 + 1 + lambda.part(p - 1) as i64)
        .collect();
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for p in 0..d {
        for q in p + 1..d {
            num *= l[p] - l[q];
            den *= (q - p) as i64;
        }
    }
    if den.is_zero() {
        return 0;
    }
    (num / den).to_u64().unwrap_or(u64::MAX)
}

/// Multiset of diagonal hook lengths of a self-conjugate partition: distinct odd parts
/// summing to `n`.
pub fn diagonal_hooks(lambda: &Partition) -> Result<Partition> {
    if !lambda.is_self_conjugate() {
        return Err(Error::NotSelfConjugate(lambda.to_string()));
    }
    let hooks = lambda.hook_lengths();
    let diag: Vec<usize> = (0..lambda.len())
        .take_while(|&i| lambda.parts[i] > i)
        .map(|i| hooks[i][i])
        .collect();
    Partition::new(diag)
}

/// A filling of a Young diagram with `1..n`, strictly increasing along rows and columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StandardTableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl StandardTableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let shape =
            Partition::new(rows.iter().map(|r| r.len()).collect()).map_err(|e| Error::InvalidTableau(e.to_string()))?;
        let n = shape.size();
        let mut seen = vec![false; n + 1];
        for v in rows.iter().flatten() {
            if *v == 0 || *v > n || seen[*v] {
                return Err(Error::InvalidTableau(format!(
                    "{rows:?} does not use each of 1..{n} exactly once"
                )));
            }
            seen[*v] = true;
        }
        let t = StandardTableau { shape, rows };
        if !t.is_increasing(true) {
            return Err(Error::InvalidTableau(format!(
                "{t} is not increasing along rows and columns"
            )));
        }
        Ok(t)
    }

    fn is_increasing(&self, strict_rows: bool) -> bool {
        is_tableau_increasing(&self.rows, strict_rows)
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.shape.size()
    }

    /// `(row, column)`, both 0-based, of the entry `k`.
    pub fn position(&self, k: usize) -> Option<(usize, usize)> {
        self.rows
            .iter()
            .enumerate()
            .find_map(|(r, row)| row.iter().position(|&v| v == k).map(|c| (r, c)))
    }

    /// Content `column - row` of the box holding `k`.
    pub fn content(&self, k: usize) -> i64 {
        let (r, c) = self.position(k).expect("entry present");
        c as i64 - r as i64
    }

    /// Tableau with the largest entry removed.
    pub fn pre(&self) -> Option<StandardTableau> {
        let n = self.size();
        if n <= 1 {
            return None;
        }
        let (r, _) = self.position(n)?;
        let mut rows = self.rows.clone();
        rows[r].pop();
        if rows[r].is_empty() {
            rows.remove(r);
        }
        Some(StandardTableau {
            shape: Partition::new(rows.iter().map(|x| x.len()).collect()).ok()?,
            rows,
        })
    }

    pub fn row_reading_word(&self) -> Vec<usize> {
        self.rows.iter().flatten().copied().collect()
    }

    /// Tableau with `i` and `i + 1` swapped, if the result is still standard.
    pub fn swap_adjacent(&self, i: usize) -> Option<StandardTableau> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| match v {
                        v if v == i => i + 1,
                        v if v == i + 1 => i,
                        v => v,
                    })
                    .collect()
            })
            .collect::<Vec<Vec<usize>>>();
        if is_tableau_increasing(&rows, true) {
            Some(StandardTableau {
                shape: self.shape.clone(),
                rows,
            })
        } else {
            None
        }
    }
}

fn is_tableau_increasing(rows: &[Vec<usize>], strict_rows: bool) -> bool {
    for row in rows {
        for w in row.windows(2) {
            if w[0] > w[1] || (strict_rows && w[0] == w[1]) {
                return false;
            }
        }
    }
    for r in 1..rows.len() {
        for (c, v) in rows[r].iter().enumerate() {
            if rows[r - 1][c] >= *v {
                return false;
            }
        }
    }
    true
}

fn fmt_rows(rows: &[Vec<usize>], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wide = rows.iter().flatten().any(|&v| v >= 10);
    let rendered: Vec<String> = rows
        .iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            cells.join(if wide { "," } else { "" })
        })
        .collect();
    write!(f, "{}", rendered.join("/"))
}

fn parse_rows(s: &str) -> Result<Vec<Vec<usize>>> {
    s.trim()
        .split('/')
        .map(|row| {
            let row = row.trim();
            if row.contains(',') {
                row.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad tableau entry '{t}'")))
                    })
                    .collect()
            } else {
                row.chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as usize)
                            .ok_or_else(|| Error::Parse(format!("bad tableau entry '{c}'")))
                    })
                    .collect()
            }
        })
        .collect()
}

impl fmt::Display for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(&self.rows, f)
    }
}

impl fmt::Debug for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SYT({self})")
    }
}

impl FromStr for StandardTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StandardTableau::new(parse_rows(s)?)
    }
}

/// A filling with values in `{0..d-1}`, weakly increasing along rows and strictly down columns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SemiStandardTableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl SemiStandardTableau {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let shape =
            Partition::new(rows.iter().map(|r| r.len()).collect()).map_err(|e| Error::InvalidTableau(e.to_string()))?;
        if !is_tableau_increasing(&rows, false) {
            return Err(Error::InvalidTableau(format!("{rows:?} is not semistandard")));
        }
        Ok(SemiStandardTableau { shape, rows })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Entries as a sorted multiset.
    pub fn content(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.rows.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for SemiStandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(&self.rows, f)
    }
}

impl fmt::Debug for SemiStandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SSYT({self})")
    }
}

impl FromStr for SemiStandardTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SemiStandardTableau::new(parse_rows(s)?)
    }
}

/// Standard tableaux of shape `lambda`, ordered lexicographically by row-reading word.
pub fn enumerate_syt(lambda: &Partition) -> Result<Vec<StandardTableau>> {
    enumerate_syt_bounded(lambda, DEFAULT_MAX_SYT)
}

pub fn enumerate_syt_bounded(lambda: &Partition, max_count: usize) -> Result<Vec<StandardTableau>> {
    let count = dim_sn(lambda) as usize;
    if count > max_count {
        return Err(Error::BoundExceeded {
            what: "number of standard tableaux",
            value: count,
            bound: max_count,
        });
    }
    let n = lambda.size();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); lambda.len()];
    let mut out = Vec::with_capacity(count);

    // Place 1..n one at a time at any addable corner of the current sub-diagram.
    fn go(k: usize, n: usize, lambda: &Partition, rows: &mut Vec<Vec<usize>>, out: &mut Vec<StandardTableau>) {
        if k > n {
            out.push(StandardTableau {
                shape: lambda.clone(),
                rows: rows.clone(),
            });
            return;
        }
        for r in 0..rows.len() {
            let len = rows[r].len();
            let fits_row = len < lambda.part(r);
            let fits_col = r == 0 || rows[r - 1].len() > len;
            if fits_row && fits_col {
                rows[r].push(k);
                go(k + 1, n, lambda, rows, out);
                rows[r].pop();
            }
        }
    }
    go(1, n, lambda, &mut rows, &mut out);
    out.sort_by_key(|t| t.row_reading_word());
    Ok(out)
}

/// Semistandard tableaux of shape `lambda` over `{0..d-1}`, optionally restricted to a content
/// (a multiset of values, in any order). Ordered lexicographically by row-reading word.
pub fn enumerate_ssyt(lambda: &Partition, d: usize, content: Option<&[usize]>) -> Vec<SemiStandardTableau> {
    if lambda.len() > d {
        return Vec::new();
    }
    let budget: Option<Vec<usize>> = match content {
        Some(c) => {
            if c.len() != lambda.size() || c.iter().any(|&v| v >= d) {
                return Vec::new();
            }
            let mut counts = vec![0usize; d];
            for &v in c {
                counts[v] += 1;
            }
            Some(counts)
        }
        None => None,
    };
    let cells: Vec<(usize, usize)> = (0..lambda.len())
        .flat_map(|r| (0..lambda.part(r)).map(move |c| (r, c)))
        .collect();
    let mut rows: Vec<Vec<usize>> = lambda.parts().iter().map(|&l| vec![0; l]).collect();
    let mut out = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn go(
        idx: usize,
        cells: &[(usize, usize)],
        d: usize,
        lambda: &Partition,
        rows: &mut Vec<Vec<usize>>,
        budget: &mut Option<Vec<usize>>,
        out: &mut Vec<SemiStandardTableau>,
    ) {
        if idx == cells.len() {
            out.push(SemiStandardTableau {
                shape: lambda.clone(),
                rows: rows.clone(),
            });
            return;
        }
        let (r, c) = cells[idx];
        let lo_row = if c > 0 { rows[r][c - 1] } else { 0 };
        let lo_col = if r > 0 { rows[r - 1][c] + 1 } else { 0 };
        for v in lo_row.max(lo_col)..d {
            if let Some(b) = budget.as_mut() {
                if b[v] == 0 {
                    continue;
                }
                b[v] -= 1;
            }
            rows[r][c] = v;
            go(idx + 1, cells, d, lambda, rows, budget, out);
            if let Some(b) = budget.as_mut() {
                b[v] += 1;
            }
        }
    }
    let mut budget = budget;
    go(0, &cells, d, lambda, &mut rows, &mut budget, &mut out);
    out
}

/// Kostka-style count of SSYT per content (sorted multiset), over `{0..d-1}`.
pub fn ssyt_count_by_content(lambda: &Partition, d: usize) -> BTreeMap<Vec<usize>, usize> {
    let mut m = BTreeMap::new();
    for t in enumerate_ssyt(lambda, d, None) {
        *m.entry(t.content()).or_insert(0) += 1;
    }
    m
}

/// Sum over `lambda |- n` of `dim_sn(lambda)^2`, which is `n!`.
pub fn regular_representation_dimension(n: usize) -> u64 {
    partitions_of(n, n).iter().map(|l| dim_sn(l).pow(2)).sum()
}

/// `n!` as a convenience re-export for callers that only import this module.
pub fn group_order(n: usize) -> u64 {
    factorial(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn partitions_of_four() {
        let all = partitions_of(4, 4);
        let expect: Vec<Partition> = [&[4][..], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]]
            .iter()
            .map(|v| part(v))
            .collect();
        assert_eq!(all, expect);
        assert_eq!(partitions_of(4, 2), expect[..3].to_vec());
        assert_eq!(partitions_of(1, 1), vec![part(&[1])]);
        assert_eq!(partitions_of(8, 8).len(), 22);
    }

    #[test]
    fn validation() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![]).is_err());
        assert_eq!(Partition::new(vec![2, 1, 0]).unwrap(), part(&[2, 1]));
        assert_eq!("3,1,1".parse::<Partition>().unwrap(), part(&[3, 1, 1]));
        assert_eq!(part(&[3, 1, 1]).to_string(), "3,1,1");
        assert_eq!(part(&[2, 2, 1]).exp_notation(), "[2^2,1]");
    }

    #[test]
    fn transposes() {
        assert_eq!(part(&[3, 1]).transpose(), part(&[2, 1, 1]));
        assert_eq!(part(&[2, 2]).transpose(), part(&[2, 2]));
        assert_eq!(part(&[5]).transpose(), part(&[1; 5]));
        for l in partitions_of(7, 7) {
            assert_eq!(l.transpose().transpose(), l);
        }
    }

    #[test]
    fn hooks() {
        assert_eq!(part(&[1]).hook_lengths(), vec![vec![1]]);
        assert_eq!(part(&[2, 2]).hook_lengths(), vec![vec![3, 2], vec![2, 1]]);
        let prod: usize = part(&[3, 1]).hook_lengths().iter().flatten().product();
        assert_eq!(prod, 8);
    }

    #[test]
    fn dims() {
        assert_eq!(dim_sn(&part(&[3, 1])), 3);
        assert_eq!(dim_sn(&part(&[3, 1, 1])), 6);
        assert_eq!(dim_sn(&part(&[6])), 1);
        assert_eq!(dim_sud(&part(&[2, 2]), 2), 1);
        assert_eq!(dim_sud(&part(&[3, 1, 1]), 3), 6);
        assert_eq!(dim_sud(&part(&[1, 1, 1, 1]), 3), 0);
        assert_eq!(dim_sud(&part(&[1]), 3), 3);
        // A full column of length d does not change the SU(d) dimension.
        assert_eq!(dim_sud(&part(&[3, 2, 1]), 3), dim_sud(&part(&[2, 1]), 3));
    }

    #[test]
    fn syt_enumeration() {
        let names =
            |l: &[usize]| -> Vec<String> { enumerate_syt(&part(l)).unwrap().iter().map(|t| t.to_string()).collect() };
        assert_eq!(names(&[2, 1, 1]), vec!["12/3/4", "13/2/4", "14/2/3"]);
        assert_eq!(names(&[3, 1]), vec!["123/4", "124/3", "134/2"]);
        assert_eq!(names(&[1]), vec!["1"]);
        assert!(matches!(
            enumerate_syt_bounded(&part(&[3, 2, 1]), 10),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn ssyt_enumeration() {
        let t: Vec<String> = enumerate_ssyt(&part(&[2, 1]), 2, None)
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert_eq!(t, vec!["00/1", "01/1"]);
        let one = enumerate_ssyt(&part(&[3, 1, 1]), 3, Some(&[0, 0, 0, 1, 2]));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].to_string(), "000/1/2");
        assert!(enumerate_ssyt(&part(&[1, 1, 1]), 2, None).is_empty());
        assert_eq!(enumerate_ssyt(&part(&[3, 1]), 3, Some(&[1, 0, 0, 0])).len(), 1);
    }

    #[test]
    fn diagonal_hook_examples() {
        assert_eq!(diagonal_hooks(&part(&[2, 2])).unwrap(), part(&[3, 1]));
        assert_eq!(diagonal_hooks(&part(&[3, 1, 1])).unwrap(), part(&[5]));
        assert_eq!(diagonal_hooks(&part(&[1])).unwrap(), part(&[1]));
        assert!(matches!(
            diagonal_hooks(&part(&[3, 1])),
            Err(Error::NotSelfConjugate(_))
        ));
        for n in 1..=10 {
            for l in partitions_of(n, n).into_iter().filter(|l| l.is_self_conjugate()) {
                let h = diagonal_hooks(&l).unwrap();
                assert!(h.has_distinct_odd_parts());
                assert_eq!(h.size(), n);
            }
        }
    }

    #[test]
    fn tableau_parsing() {
        let t: StandardTableau = "13/2/4".parse().unwrap();
        assert_eq!(t.pre().unwrap().to_string(), "13/2");
        let t: StandardTableau = "14/2/3".parse().unwrap();
        assert_eq!(t.pre().unwrap().to_string(), "1/2/3");
        assert!("21/3".parse::<StandardTableau>().is_err());
        assert!("12/2".parse::<StandardTableau>().is_err());
        assert!("00/0".parse::<SemiStandardTableau>().is_err());
        let t: StandardTableau = "123/4".parse().unwrap();
        assert_eq!(t.content(4), -1);
        assert_eq!(t.content(3), 2);
    }
}
