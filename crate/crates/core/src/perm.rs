//! Permutations of `{1..n}`.
//!
//! Points are 1-based at the public surface, matching cycle notation. Composition follows
//! the "inner applied first" convention: `compose(outer, inner)(k) = outer(inner(k))`, so
//! applying `sigma` and then `tau` is `compose(tau, sigma)`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Default upper bound on the degree for full group enumeration (8! = 40320 elements).
pub const DEFAULT_MAX_DEGREE: usize = 8;

/// A bijection of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    // 0-based images; lexicographic order of this vector is the enumeration order.
    images: Vec<usize>,
}

/// Which group to enumerate or build tables for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "S")]
    Symmetric,
    #[serde(rename = "A")]
    Alternating,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Symmetric => write!(f, "S"),
            GroupKind::Alternating => write!(f, "A"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(GroupKind::Symmetric),
            "A" | "a" => Ok(GroupKind::Alternating),
            other => Err(Error::Parse(format!("unknown group '{other}', expected S or A"))),
        }
    }
}

/// Disjoint cycles of a permutation, each listed starting from its smallest point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    pub n: usize,
    pub cycles: Vec<Vec<usize>>,
    pub includes_fixed: bool,
}

impl CycleDecomposition {
    /// Multiplies the cycles back together.
    pub fn to_permutation(&self) -> Result<Permutation> {
        Permutation::from_cycles(self.n, &self.cycles)
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from its 1-based image sequence, `images[k-1] = p(k)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &img in images {
            if img == 0 || img > n || seen[img - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 1..{n}"
                )));
            }
            seen[img - 1] = true;
            zero_based.push(img - 1);
        }
        Ok(Permutation { images: zero_based })
    }

    pub(crate) fn from_zero_based_unchecked(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v)
        });
        Permutation { images }
    }

    /// Builds a permutation of degree `n` from (not necessarily disjoint) cycles, multiplied
    /// right to left: the last cycle acts first.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut result = Permutation::identity(n);
        for cycle in cycles.iter().rev() {
            let mut seen = Vec::with_capacity(cycle.len());
            for &pt in cycle {
                if pt == 0 || pt > n {
                    return Err(Error::InvalidPermutation(format!("point {pt} out of range 1..{n}")));
                }
                if seen.contains(&pt) {
                    return Err(Error::InvalidPermutation(format!(
                        "point {pt} repeated in cycle {cycle:?}"
                    )));
                }
                seen.push(pt);
            }
            let mut c = Permutation::identity(n);
            for (i, &pt) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                c.images[pt - 1] = next - 1;
            }
            result = &result * &c;
        }
        Ok(result)
    }

    /// The transposition swapping `a` and `b` (1-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        Permutation::from_cycles(n, &[vec![a, b]])
    }

    /// Parses cycle notation such as `"(1,2,3)(4,5)"` or `"e"` at degree `n`.
    ///
    /// Cycles are multiplied right to left, so non-disjoint input is accepted as a product.
    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "()" {
            return Ok(Permutation::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            if !rest_trim.starts_with('(') {
                return Err(Error::Parse(format!("expected '(' in '{s}'")));
            }
            let close = rest_trim
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in '{s}'")))?;
            let body = &rest_trim[1..close];
            let cycle = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad point '{t}' in '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = rest_trim[close + 1..].trim_start();
        }
        Permutation::from_cycles(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `k`.
    pub fn apply(&self, k: usize) -> usize {
        self.images[k - 1] + 1
    }

    /// 1-based image sequence.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }

    pub(crate) fn zero_based(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i32 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.sign() == 1
    }

    pub fn cycles(&self, include_fixed: bool) -> CycleDecomposition {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.images[j];
            }
            if include_fixed || cycle.len() > 1 {
                cycles.push(cycle);
            }
        }
        CycleDecomposition {
            n,
            cycles,
            includes_fixed: include_fixed,
        }
    }

    /// Cycle lengths, 1-cycles included, as a partition of `n`.
    pub fn cycle_type(&self) -> Partition {
        let mut lengths: Vec<usize> = self.cycles(true).cycles.iter().map(|c| c.len()).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        Partition::from_sorted_unchecked(lengths)
    }
}

/// `compose(outer, inner)(k) = outer(inner(k))`.
pub fn compose(outer: &Permutation, inner: &Permutation) -> Result<Permutation> {
    if outer.degree() != inner.degree() {
        return Err(Error::DegreeMismatch {
            left: outer.degree(),
            right: inner.degree(),
        });
    }
    Ok(outer * inner)
}

/// `h p h^{-1}`.
pub fn conjugate(p: &Permutation, h: &Permutation) -> Result<Permutation> {
    let hp = compose(h, p)?;
    compose(&hp, &h.inverse())
}

/// Product in the "inner applied first" convention. Panics on degree mismatch; use
/// [`compose`] for a checked version.
impl Mul for &Permutation {
    type Output = Permutation;

    fn mul(self, inner: &Permutation) -> Permutation {
        assert_eq!(self.degree(), inner.degree(), "permutation degree mismatch");
        Permutation {
            images: inner.images.iter().map(|&i| self.images[i]).collect(),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cd = self.cycles(false);
        if cd.cycles.is_empty() {
            return write!(f, "e");
        }
        for c in &cd.cycles {
            write!(f, "(")?;
            for (i, pt) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{pt}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Size of the `S_n` conjugacy class with cycle type `lambda`: `n! / prod_p m_p! p^{m_p}`.
pub fn class_size(lambda: &Partition) -> Result<u64> {
    let n = lambda.size();
    if n > 20 {
        return Err(Error::BoundExceeded {
            what: "degree",
            value: n,
            bound: 20,
        });
    }
    let mut denom: u64 = 1;
    for (part, mult) in lambda.multiplicities() {
        denom *= factorial(mult) * (part as u64).pow(mult as u32);
    }
    Ok(factorial(n) / denom)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// All of `S_n` or `A_n` in lexicographic order of image sequences.
pub fn enumerate_group(n: usize, which: GroupKind) -> Result<Vec<Permutation>> {
    enumerate_group_bounded(n, which, DEFAULT_MAX_DEGREE)
}

pub fn enumerate_group_bounded(n: usize, which: GroupKind, max_degree: usize) -> Result<Vec<Permutation>> {
    if n > max_degree {
        return Err(Error::BoundExceeded {
            what: "degree",
            value: n,
            bound: max_degree,
        });
    }
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        let p = Permutation { images: cur.clone() };
        if which == GroupKind::Symmetric || p.is_even() {
            out.push(p);
        }
        if !next_permutation(&mut cur) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    #[test]
    fn compose_examples() {
        let e = Permutation::identity(3);
        let a = p("(1,2)", 3);
        assert_eq!(compose(&e, &a).unwrap(), a);
        assert_eq!(compose(&a, &p("(2,3)", 3)).unwrap(), p("(1,2,3)", 3));
        let q = p("(1,3,2)", 3);
        assert!(compose(&q, &q.inverse()).unwrap().is_identity());
        assert!(matches!(
            compose(&a, &Permutation::identity(4)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(Permutation::identity(4).sign(), 1);
        assert_eq!(p("(1,2)", 3).sign(), -1);
        assert_eq!(p("(1,2,3)", 3).sign(), 1);
        assert_eq!(p("(1,2,3,4)", 4).sign(), -1);
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(p("(1,2,4)(5,6)(3)", 6).cycle_type().parts(), &[3, 2, 1]);
        assert_eq!(Permutation::identity(4).cycle_type().parts(), &[1, 1, 1, 1]);
        assert_eq!(p("(1,2,3,4,5)", 5).cycle_type().parts(), &[5]);
    }

    #[test]
    fn class_sizes() {
        let part = |v: &[usize]| Partition::new(v.to_vec()).unwrap();
        assert_eq!(class_size(&part(&[2, 1, 1])).unwrap(), 6);
        assert_eq!(class_size(&part(&[1, 1, 1, 1, 1])).unwrap(), 1);
        assert_eq!(class_size(&part(&[5])).unwrap(), 24);
        for n in 1..=8 {
            let total: u64 = crate::partition::partitions_of(n, n)
                .iter()
                .map(|l| class_size(l).unwrap())
                .sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_group(4, GroupKind::Symmetric).unwrap().len(), 24);
        let a4 = enumerate_group(4, GroupKind::Alternating).unwrap();
        assert_eq!(a4.len(), 12);
        assert!(a4.iter().all(|q| q.sign() == 1));
        let a3 = enumerate_group(3, GroupKind::Alternating).unwrap();
        assert_eq!(a3, vec![Permutation::identity(3), p("(1,2,3)", 3), p("(1,3,2)", 3)]);
        let s4 = enumerate_group(4, GroupKind::Symmetric).unwrap();
        assert!(s4.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            enumerate_group(9, GroupKind::Symmetric),
            Err(Error::BoundExceeded { .. })
        ));
        assert_eq!(
            enumerate_group_bounded(9, GroupKind::Alternating, 9).unwrap().len(),
            181440
        );
    }

    #[test]
    fn conjugation() {
        let q = p("(1,2,3)", 3);
        assert_eq!(conjugate(&q, &Permutation::identity(3)).unwrap(), q);
        assert_eq!(conjugate(&q, &p("(1,2)", 3)).unwrap(), p("(1,3,2)", 3));
    }

    #[test]
    fn parse_and_print() {
        for s in ["e", "(1,2,3)(4,5)", "(1,3)(2,5,4)"] {
            assert_eq!(p(s, 5).to_string(), s);
        }
        assert!(Permutation::parse("(1,2,6)", 5).is_err());
        assert!(Permutation::parse("(1,1)", 5).is_err());
        assert!(Permutation::parse("1,2", 5).is_err());
        assert!(Permutation::from_images(&[1, 1, 2]).is_err());
    }

    #[test]
    fn cycles_roundtrip() {
        let q = p("(1,4)(2,5,3)", 6);
        let cd = q.cycles(true);
        assert_eq!(cd.cycles.len(), 3);
        assert_eq!(cd.to_permutation().unwrap(), q);
        assert_eq!(q.cycles(false).to_permutation().unwrap(), q);
    }
}
