//! Character tables of `S_n` (Murnaghan-Nakayama) and `A_n` (restriction plus splitting).
//!
//! Classes are listed in ascending lexicographic order of cycle type, irreps in
//! reverse-lexicographic order of partitions. An `A_n` class whose cycle type has distinct odd
//! parts splits into `a` and `b`; class `a` is the `A_n`-class of a fixed representative.
//! A self-conjugate `lambda` splits into `lambda a`, `lambda b`, which differ only on the classes
//! of type `diagonal_hooks(lambda)`, where they take `(x +- sqrt(eps * prod h)) / 2`.
//! `lambda a` takes the `+` root on class `a`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclo::{CycloAccumulator, Cyclotomic};
use crate::error::{Error, Result};
use crate::partition::{diagonal_hooks, dim_sn, partitions_of, Partition};
use crate::perm::{class_size, factorial, GroupKind, Permutation, DEFAULT_MAX_DEGREE};

/// Which half of a split class or irrep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Branch {
    pub fn other(self) -> Branch {
        match self {
            Branch::A => Branch::B,
            Branch::B => Branch::A,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::A => "a",
            Branch::B => "b",
        })
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" => Ok(Branch::A),
            "b" | "B" => Ok(Branch::B),
            other => Err(Error::Parse(format!("unknown branch '{other}', expected a or b"))),
        }
    }
}

fn fmt_split(split: Option<Branch>) -> String {
    split.map(|b| b.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassLabel {
    pub cycle_type: Partition,
    pub split: Option<Branch>,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.cycle_type.exp_notation(), fmt_split(self.split))
    }
}

/// Splits "[3,1]a" into the partition and branch.
fn parse_split_label(s: &str) -> Result<(Partition, Option<Branch>)> {
    let s = s.trim();
    let (body, split) = match s.chars().last() {
        Some(c @ ('a' | 'b')) => (&s[..s.len() - 1], Some(c.to_string().parse()?)),
        _ => (s, None),
    };
    Ok((body.parse()?, split))
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (cycle_type, split) = parse_split_label(s)?;
        Ok(ClassLabel { cycle_type, split })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub partition: Partition,
    pub split: Option<Branch>,
}

impl IrrepLabel {
    pub fn new(partition: Partition, split: Option<Branch>) -> Self {
        IrrepLabel { partition, split }
    }

    pub fn unsplit(partition: Partition) -> Self {
        Self::new(partition, None)
    }
}

impl FromStr for IrrepLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (partition, split) = parse_split_label(s)?;
        Ok(IrrepLabel { partition, split })
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.partition.exp_notation(), fmt_split(self.split))
    }
}

/// A conjugacy class with its size and a representative element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub label: ClassLabel,
    pub size: u64,
    pub representative: Permutation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    group: GroupKind,
    n: usize,
    classes: Vec<ClassInfo>,
    irreps: Vec<IrrepLabel>,
    values: Vec<Vec<Cyclotomic>>,
}

/// Representatives of split `A_n` classes that deviate from the default (consecutive cycles,
/// longest first). This fixes which `A_5` class is `[5]a`: the one containing `(1,2,3,5,4)`.
const CLASS_A_PINS: &[(usize, &[usize], &[usize])] = &[(5, &[5], &[2, 3, 5, 1, 4])];

pub const BRANCH_CONVENTION: &str = "lambda-a takes (x + sqrt(eps*prod h))/2 on class a; class a \
contains the representative with consecutive cycles, longest first, except A5 [5]a which contains (1,2,3,5,4)";

/// `chi^lambda(mu)` by Murnaghan-Nakayama rim-hook removal on beta-sets.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> Result<i64> {
    if lambda.size() != mu.size() {
        return Err(Error::InvalidPartition(format!(
            "{lambda:?} and {mu:?} partition different integers"
        )));
    }
    let mut memo = HashMap::new();
    Ok(mn_rec(lambda.parts(), mu.parts(), &mut memo))
}

fn mn_rec(lambda: &[usize], mu: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&k, rest)) = mu.split_first() else {
        return i64::from(lambda.is_empty());
    };
    let key = (lambda.to_vec(), mu.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let l = lambda.len();
    let beads: Vec<usize> = lambda.iter().enumerate().map(|(i, &p)| p + (l - 1 - i)).collect();
    let mut total = 0i64;
    for (i, &b) in beads.iter().enumerate() {
        if b < k || beads.contains(&(b - k)) {
            continue;
        }
        let target = b - k;
        let between = beads.iter().filter(|&&x| x > target && x < b).count();
        let mut moved = beads.clone();
        moved[i] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let new_lambda: Vec<usize> = moved
            .iter()
            .enumerate()
            .map(|(j, &x)| x - (l - 1 - j))
            .filter(|&p| p > 0)
            .collect();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        total += sign * mn_rec(&new_lambda, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Consecutive cycles, longest first.
fn canonical_representative(mu: &Partition) -> Permutation {
    let n = mu.size();
    let mut cycles = Vec::new();
    let mut next = 1;
    for &p in mu.parts() {
        cycles.push((next..next + p).collect::<Vec<_>>());
        next += p;
    }
    Permutation::from_cycles(n, &cycles).expect("disjoint cycles")
}

fn class_a_representative(mu: &Partition) -> Permutation {
    let n = mu.size();
    for &(pn, ty, images) in CLASS_A_PINS {
        if pn == n && mu.parts() == ty {
            return Permutation::from_images(images).expect("valid pin");
        }
    }
    canonical_representative(mu)
}

fn splits_in_an(mu: &Partition) -> bool {
    mu.size() >= 2 && mu.has_distinct_odd_parts()
}

/// A permutation `h` with `h r h^{-1} = s`, for `r`, `s` of equal cycle type.
fn conjugator(r: &Permutation, s: &Permutation) -> Permutation {
    let sort = |p: &Permutation| {
        let mut c = p.cycles(true).cycles;
        c.sort_by_key(|c| std::cmp::Reverse(c.len()));
        c
    };
    let (cr, cs) = (sort(r), sort(s));
    let mut images = vec![0; r.degree()];
    for (a, b) in cr.iter().zip(&cs) {
        for (&x, &y) in a.iter().zip(b) {
            images[x - 1] = y;
        }
    }
    Permutation::from_images(&images).expect("cycle types match")
}

fn sn_classes(n: usize) -> Result<Vec<ClassInfo>> {
    let mut types = partitions_of(n, n);
    types.sort();
    types
        .into_iter()
        .map(|mu| {
            Ok(ClassInfo {
                size: class_size(&mu)?,
                representative: canonical_representative(&mu),
                label: ClassLabel {
                    cycle_type: mu,
                    split: None,
                },
            })
        })
        .collect()
}

/// Even classes of `S_n`, with split classes listed as `a` then `b` at half size.
pub fn an_classes(n: usize) -> Result<Vec<(ClassLabel, u64)>> {
    Ok(an_class_infos(n)?.into_iter().map(|c| (c.label, c.size)).collect())
}

fn an_class_infos(n: usize) -> Result<Vec<ClassInfo>> {
    check_degree(n, DEFAULT_MAX_DEGREE)?;
    let swap = Permutation::transposition(n.max(2), 1, 2)?;
    let mut out = Vec::new();
    for c in sn_classes(n)? {
        let mu = c.label.cycle_type.clone();
        if mu.sign() < 0 {
            continue;
        }
        if splits_in_an(&mu) {
            let rep_a = class_a_representative(&mu);
            let rep_b = &(&swap * &rep_a) * &swap;
            for (branch, rep) in [(Branch::A, rep_a), (Branch::B, rep_b)] {
                out.push(ClassInfo {
                    label: ClassLabel {
                        cycle_type: mu.clone(),
                        split: Some(branch),
                    },
                    size: c.size / 2,
                    representative: rep,
                });
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn check_degree(n: usize, bound: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidPartition("degree must be at least 1".into()));
    }
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "degree",
            value: n,
            bound,
        });
    }
    Ok(())
}

type TableCache = Mutex<HashMap<(GroupKind, usize), Arc<CharacterTable>>>;

fn table_cache() -> &'static TableCache {
    static CACHE: OnceLock<TableCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached table for `group` at degree `n`, built on first use.
pub fn table(group: GroupKind, n: usize) -> Result<Arc<CharacterTable>> {
    table_bounded(group, n, DEFAULT_MAX_DEGREE)
}

pub fn table_bounded(group: GroupKind, n: usize, max_degree: usize) -> Result<Arc<CharacterTable>> {
    check_degree(n, max_degree)?;
    if let Some(t) = table_cache().lock().unwrap().get(&(group, n)) {
        return Ok(t.clone());
    }
    let t = Arc::new(match group {
        GroupKind::Symmetric => build_sn(n)?,
        GroupKind::Alternating => build_an(n)?,
    });
    table_cache().lock().unwrap().insert((group, n), t.clone());
    Ok(t)
}

pub fn sn_table(n: usize) -> Result<CharacterTable> {
    Ok((*table(GroupKind::Symmetric, n)?).clone())
}

pub fn an_table(n: usize) -> Result<CharacterTable> {
    Ok((*table(GroupKind::Alternating, n)?).clone())
}

fn build_sn(n: usize) -> Result<CharacterTable> {
    let classes = sn_classes(n)?;
    let irreps: Vec<IrrepLabel> = partitions_of(n, n).into_iter().map(IrrepLabel::unsplit).collect();
    let values = irreps
        .iter()
        .map(|ir| {
            classes
                .iter()
                .map(|c| mn_character(&ir.partition, &c.label.cycle_type).map(Cyclotomic::from_integer))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterTable {
        group: GroupKind::Symmetric,
        n,
        classes,
        irreps,
        values,
    })
}

fn build_an(n: usize) -> Result<CharacterTable> {
    let classes = an_class_infos(n)?;
    let mut irreps = Vec::new();
    for lambda in partitions_of(n, n) {
        let t = lambda.transpose();
        if lambda == t && n >= 2 {
            irreps.push(IrrepLabel::new(lambda.clone(), Some(Branch::A)));
            irreps.push(IrrepLabel::new(lambda, Some(Branch::B)));
        } else if lambda.len() < t.len() || (lambda.len() == t.len() && lambda > t) || n < 2 {
            irreps.push(IrrepLabel::unsplit(lambda));
        }
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let mut values = Vec::with_capacity(irreps.len());
    for ir in &irreps {
        let lambda = &ir.partition;
        let mut row = Vec::with_capacity(classes.len());
        let special = match ir.split {
            Some(_) => Some(diagonal_hooks(lambda)?),
            None => None,
        };
        for c in &classes {
            let x = Cyclotomic::from_integer(mn_character(lambda, &c.label.cycle_type)?);
            let v = match (ir.split, &special) {
                (None, _) => x,
                (Some(branch), Some(h)) if *h == c.label.cycle_type => {
                    let r = h.parts().len();
                    let eps: i64 = if ((n - r) / 2).is_multiple_of(2) { 1 } else { -1 };
                    let hooks: i64 = h.parts().iter().map(|&p| p as i64).product();
                    let root = Cyclotomic::sqrt_of_rational(&BigRational::from_integer(BigInt::from(eps * hooks)))?;
                    let plus = c.label.split == Some(branch);
                    let num = if plus { &x + &root } else { &x - &root };
                    num.scale(&half)
                }
                (Some(_), _) => x.scale(&half),
            };
            row.push(v);
        }
        values.push(row);
    }
    Ok(CharacterTable {
        group: GroupKind::Alternating,
        n,
        classes,
        irreps,
        values,
    })
}

impl CharacterTable {
    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        match self.group {
            GroupKind::Symmetric => factorial(self.n),
            GroupKind::Alternating => (factorial(self.n) / 2).max(1),
        }
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn irreps(&self) -> &[IrrepLabel] {
        &self.irreps
    }

    pub fn values(&self) -> &[Vec<Cyclotomic>] {
        &self.values
    }

    /// Overwrites one entry; meant for negative controls.
    pub fn set_value(&mut self, irrep: usize, class: usize, v: Cyclotomic) {
        self.values[irrep][class] = v;
    }

    pub fn irrep_index(&self, label: &IrrepLabel) -> Result<usize> {
        self.irreps
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidLabel {
                label: label.to_string(),
                group: format!("{}{}", self.group, self.n),
            })
    }

    pub fn class_index(&self, label: &ClassLabel) -> Option<usize> {
        self.classes.iter().position(|c| c.label == *label)
    }

    /// Entry at the named irrep and class.
    pub fn value(&self, irrep: &IrrepLabel, class: &ClassLabel) -> Result<&Cyclotomic> {
        let i = self.irrep_index(irrep)?;
        let j = self.class_index(class).ok_or_else(|| Error::InvalidLabel {
            label: class.to_string(),
            group: format!("{}{}", self.group, self.n),
        })?;
        Ok(&self.values[i][j])
    }

    /// Index of the class containing `p`.
    pub fn class_of(&self, p: &Permutation) -> Result<usize> {
        if p.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: p.degree(),
                right: self.n,
            });
        }
        if self.group == GroupKind::Alternating && !p.is_even() {
            return Err(Error::InvalidPermutation(format!("{p} is odd, not in A{}", self.n)));
        }
        let mu = p.cycle_type();
        let mut candidates = self
            .classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.label.cycle_type == mu);
        let (first, info) = candidates.next().expect("every cycle type has a class");
        if info.label.split.is_none() {
            return Ok(first);
        }
        let h = conjugator(&info.representative, p);
        Ok(if h.is_even() { first } else { first + 1 })
    }

    /// `chi_irrep(p)`.
    pub fn character(&self, irrep: usize, p: &Permutation) -> Result<Cyclotomic> {
        Ok(self.values[irrep][self.class_of(p)?].clone())
    }

    /// `chi(e)` for the given irrep.
    pub fn dimension(&self, irrep: usize) -> u64 {
        let ir = &self.irreps[irrep];
        let d = dim_sn(&ir.partition);
        if ir.split.is_some() {
            d / 2
        } else {
            d
        }
    }

    /// Exact row and column orthogonality check.
    #[allow(clippy::needless_range_loop)]
    pub fn verify_orthogonality(&self) -> OrthogonalityReport {
        let order = BigRational::from_integer(BigInt::from(self.order()));
        let weights: Vec<BigRational> = self
            .classes
            .iter()
            .map(|c| BigRational::new(BigInt::from(c.size), BigInt::from(self.order())))
            .collect();
        let conj: Vec<Vec<Cyclotomic>> = self
            .values
            .iter()
            .map(|r| r.iter().map(Cyclotomic::conj).collect())
            .collect();
        let mut violations = Vec::new();
        let r = self.irreps.len();
        for a in 0..r {
            for b in 0..r {
                let mut acc = CycloAccumulator::new();
                for (g, w) in weights.iter().enumerate() {
                    acc.add_product(&conj[a][g].scale(w), &self.values[b][g]);
                }
                let got = acc.finish();
                let expected = Cyclotomic::from_integer(i64::from(a == b));
                if got != expected {
                    violations.push(Violation {
                        relation: Relation::Row,
                        i: a,
                        j: b,
                        got,
                        expected,
                    });
                }
            }
        }
        let k = self.classes.len();
        for g in 0..k {
            for h in 0..k {
                let mut acc = CycloAccumulator::new();
                for a in 0..r {
                    acc.add_product(&conj[a][g], &self.values[a][h]);
                }
                let got = acc.finish();
                let expected = if g == h {
                    Cyclotomic::from_rational(&order / BigRational::from_integer(BigInt::from(self.classes[g].size)))
                } else {
                    Cyclotomic::zero()
                };
                if got != expected {
                    violations.push(Violation {
                        relation: Relation::Column,
                        i: g,
                        j: h,
                        got,
                        expected,
                    });
                }
            }
        }
        OrthogonalityReport {
            square: r == k,
            rows_ok: !violations.iter().any(|v| v.relation == Relation::Row),
            columns_ok: !violations.iter().any(|v| v.relation == Relation::Column),
            violations,
        }
    }

    /// Plain-text rendering with a `Class` row, a `Size` row, then one row per irrep.
    pub fn render_text(&self) -> String {
        let mut grid: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Class".to_string()];
        header.extend(self.classes.iter().map(|c| c.label.to_string()));
        let mut sizes = vec!["Size".to_string()];
        sizes.extend(self.classes.iter().map(|c| c.size.to_string()));
        grid.push(header);
        grid.push(sizes);
        for (ir, row) in self.irreps.iter().zip(&self.values) {
            let mut line = vec![format!("χ{ir}")];
            line.extend(row.iter().map(|v| v.to_string()));
            grid.push(line);
        }
        let cols = grid[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|j| grid.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!("{}{}\n", self.group, self.n);
        for (i, row) in grid.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
            if i == 1 {
                let total: usize = widths.iter().sum::<usize>() + 2 * (cols - 1);
                out.push_str(&"-".repeat(total));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            group: self.group,
            n: self.n,
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    cycle_type: c.label.cycle_type.clone(),
                    split: c.label.split,
                    size: c.size,
                })
                .collect(),
            irreps: self.irreps.clone(),
            values: self.values.clone(),
            branch_convention: (self.group == GroupKind::Alternating).then(|| BRANCH_CONVENTION.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassJson {
    pub cycle_type: Partition,
    pub split: Option<Branch>,
    pub size: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableJson {
    pub group: GroupKind,
    pub n: usize,
    pub classes: Vec<ClassJson>,
    pub irreps: Vec<IrrepLabel>,
    pub values: Vec<Vec<Cyclotomic>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_convention: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Row,
    Column,
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub relation: Relation,
    pub i: usize,
    pub j: usize,
    pub got: Cyclotomic,
    pub expected: Cyclotomic,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub square: bool,
    pub rows_ok: bool,
    pub columns_ok: bool,
    pub violations: Vec<Violation>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.square && self.rows_ok && self.columns_ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::enumerate_group;
    use std::collections::HashSet;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn murnaghan_nakayama_examples() {
        assert_eq!(mn_character(&part("3,2"), &part("2,2,1")).unwrap(), 1);
        assert_eq!(mn_character(&part("2,1,1"), &part("4")).unwrap(), 1);
        for n in 1..=7 {
            for l in partitions_of(n, n) {
                let e = Partition::column(n);
                assert_eq!(mn_character(&l, &e).unwrap() as u64, dim_sn(&l));
            }
        }
        assert!(mn_character(&part("2"), &part("1")).is_err());
    }

    #[test]
    fn conjugate_rows_differ_by_sign() {
        for n in 2..=7 {
            let t = sn_table(n).unwrap();
            for (i, ir) in t.irreps().iter().enumerate() {
                let j = t.irrep_index(&IrrepLabel::unsplit(ir.partition.transpose())).unwrap();
                for (k, c) in t.classes().iter().enumerate() {
                    let s = Cyclotomic::from_integer(c.label.cycle_type.sign() as i64);
                    assert_eq!(t.values()[j][k], &s * &t.values()[i][k]);
                }
            }
        }
    }

    #[test]
    fn a4_a5_class_sizes() {
        let labels = |n| -> Vec<String> {
            an_classes(n)
                .unwrap()
                .iter()
                .map(|(l, s)| format!("{l}({s})"))
                .collect()
        };
        assert_eq!(labels(4), vec!["[1^4](1)", "[2^2](3)", "[3,1]a(4)", "[3,1]b(4)"]);
        assert_eq!(
            labels(5),
            vec!["[1^5](1)", "[2^2,1](15)", "[3,1^2](20)", "[5]a(12)", "[5]b(12)"]
        );
        for n in 1..=8 {
            let total: u64 = an_classes(n).unwrap().iter().map(|(_, s)| s).sum();
            assert_eq!(total, (factorial(n) / 2).max(1));
        }
    }

    #[test]
    fn an_classes_match_explicit_conjugacy() {
        for n in 2..=6 {
            let group = enumerate_group(n, GroupKind::Alternating).unwrap();
            let t = table(GroupKind::Alternating, n).unwrap();
            let mut seen: HashSet<Permutation> = HashSet::new();
            let mut orbits = 0;
            for g in &group {
                if seen.contains(g) {
                    continue;
                }
                let orbit: HashSet<Permutation> = group.iter().map(|h| &(h * g) * &h.inverse()).collect();
                let idx = t.class_of(g).unwrap();
                assert_eq!(orbit.len() as u64, t.classes()[idx].size);
                for x in &orbit {
                    assert_eq!(t.class_of(x).unwrap(), idx);
                }
                seen.extend(orbit);
                orbits += 1;
            }
            assert_eq!(orbits, t.classes().len());
        }
    }

    #[test]
    fn orthogonality_and_negative_control() {
        for n in 1..=6 {
            assert!(sn_table(n).unwrap().verify_orthogonality().passed(), "S{n}");
            assert!(an_table(n).unwrap().verify_orthogonality().passed(), "A{n}");
        }
        let mut t = sn_table(4).unwrap();
        t.set_value(2, 1, Cyclotomic::from_integer(2));
        let report = t.verify_orthogonality();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| v.relation == Relation::Row && v.i == 2 && v.j == 2));
    }

    #[test]
    fn a_n_split_examples() {
        let a4 = an_table(4).unwrap();
        let l22a = IrrepLabel::new(part("2,2"), Some(Branch::A));
        let c31a = ClassLabel {
            cycle_type: part("3,1"),
            split: Some(Branch::A),
        };
        assert_eq!(*a4.value(&l22a, &c31a).unwrap(), Cyclotomic::zeta(3));
        let a3 = an_table(3).unwrap();
        let l21a = IrrepLabel::new(part("2,1"), Some(Branch::A));
        let idx = a3.irrep_index(&l21a).unwrap();
        let c = Permutation::parse("(1,2,3)", 3).unwrap();
        assert_eq!(a3.character(idx, &c).unwrap(), Cyclotomic::zeta(3));
        let a5 = an_table(5).unwrap();
        let z = a5
            .value(
                &IrrepLabel::new(part("3,1,1"), Some(Branch::A)),
                &ClassLabel {
                    cycle_type: part("5"),
                    split: Some(Branch::A),
                },
            )
            .unwrap();
        assert!((z.embed().re - 1.618_033_988_7).abs() < 1e-10);
        let zero = a5
            .value(
                &IrrepLabel::unsplit(part("4,1")),
                &ClassLabel {
                    cycle_type: part("2,2,1"),
                    split: None,
                },
            )
            .unwrap();
        assert!(zero.is_zero());
        assert!(a5.irrep_index(&IrrepLabel::unsplit(part("1,1,1,1,1"))).is_err());
    }

    #[test]
    fn split_rows_sum_to_restriction() {
        for n in 2..=7 {
            let a = an_table(n).unwrap();
            for (i, ir) in a.irreps().iter().enumerate() {
                if ir.split != Some(Branch::A) {
                    continue;
                }
                for (k, c) in a.classes().iter().enumerate() {
                    let sum = &a.values()[i][k] + &a.values()[i + 1][k];
                    let chi = mn_character(&ir.partition, &c.label.cycle_type).unwrap();
                    assert_eq!(sum, Cyclotomic::from_integer(chi));
                }
            }
        }
    }

    #[test]
    fn renders_and_serializes() {
        let text = sn_table(3).unwrap().render_text();
        assert!(text.starts_with("S3\nClass"));
        assert!(text.contains("χ[2,1]"));
        let json = serde_json::to_value(an_table(3).unwrap().to_json()).unwrap();
        assert_eq!(json["group"], "A");
        assert_eq!(json["classes"][1]["split"], "a");
        assert_eq!(json["irreps"][1]["partition"], serde_json::json!([2, 1]));
        assert!(json["branch_convention"].is_string());
    }

    #[test]
    fn labels_round_trip() {
        for t in [sn_table(5).unwrap(), an_table(5).unwrap(), an_table(6).unwrap()] {
            for c in t.classes() {
                assert_eq!(c.label.to_string().parse::<ClassLabel>().unwrap(), c.label);
            }
            for i in t.irreps() {
                assert_eq!(i.to_string().parse::<IrrepLabel>().unwrap(), *i);
            }
        }
        let l: IrrepLabel = "2^2,1".parse().unwrap();
        assert_eq!(l.partition.parts(), &[2, 2, 1]);
        assert!("[3,1]c".parse::<IrrepLabel>().is_err());
    }

    #[test]
    fn bounds() {
        assert!(matches!(sn_table(9), Err(Error::BoundExceeded { .. })));
        assert!(sn_table(0).is_err());
        assert_eq!(sn_table(1).unwrap().values()[0][0], Cyclotomic::one());
        assert_eq!(an_table(1).unwrap().irreps().len(), 1);
    }
}
