//! The group algebra `C[S_n]` with cyclotomic coefficients.
//!
//! Products use the same convention as [`compose`](crate::perm::compose): in `a * b` the
//! permutations of `b` act first.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::characters::{table, IrrepLabel};
use crate::cyclo::{CycloAccumulator, Cyclotomic};
use crate::error::{Error, Result};
use crate::partition::{dim_sn, StandardTableau};
use crate::perm::{enumerate_group, factorial, GroupKind, Permutation};

/// A finite formal sum `sum_sigma a_sigma sigma` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    n: usize,
    terms: BTreeMap<Permutation, Cyclotomic>,
}

/// Work threshold (term pairs) above which products are split across threads.
const PARALLEL_PAIRS: usize = 20_000;

impl GroupAlgebraElement {
    pub fn zero(n: usize) -> Self {
        GroupAlgebraElement {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::single(Permutation::identity(n), Cyclotomic::one())
    }

    pub fn single(p: Permutation, c: Cyclotomic) -> Self {
        let mut e = Self::zero(p.degree());
        if !c.is_zero() {
            e.terms.insert(p, c);
        }
        e
    }

    /// Sums repeated permutations; fails on mixed degrees.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Permutation, Cyclotomic)>) -> Result<Self> {
        let mut acc: BTreeMap<Permutation, CycloAccumulator> = BTreeMap::new();
        for (p, c) in terms {
            if p.degree() != n {
                return Err(Error::DegreeMismatch {
                    left: p.degree(),
                    right: n,
                });
            }
            acc.entry(p).or_default().add(&c);
        }
        Ok(Self::from_accumulators(n, acc))
    }

    fn from_accumulators(n: usize, acc: impl IntoIterator<Item = (Permutation, CycloAccumulator)>) -> Self {
        let terms = acc
            .into_iter()
            .map(|(p, a)| (p, a.finish()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        GroupAlgebraElement { n, terms }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &Cyclotomic)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Permutation) -> Cyclotomic {
        self.terms.get(p).cloned().unwrap_or_default()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (p, c) in &other.terms {
            let v = terms.get(p).map_or_else(|| c.clone(), |a| a + c);
            if v.is_zero() {
                terms.remove(p);
            } else {
                terms.insert(p.clone(), v);
            }
        }
        Ok(GroupAlgebraElement { n: self.n, terms })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&Cyclotomic::from_integer(-1)))
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        GroupAlgebraElement {
            n: self.n,
            terms: self.terms.iter().map(|(p, a)| (p.clone(), a * c)).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let rhs: Vec<(&Permutation, &Cyclotomic)> = other.terms.iter().collect();
        let partial = |chunk: &[(&Permutation, &Cyclotomic)]| {
            let mut acc: HashMap<Permutation, CycloAccumulator> = HashMap::new();
            for (s, a) in chunk {
                for (t, b) in &rhs {
                    acc.entry(*s * *t).or_default().add_product(a, b);
                }
            }
            acc
        };
        let lhs: Vec<(&Permutation, &Cyclotomic)> = self.terms.iter().collect();
        if lhs.len() * rhs.len() < PARALLEL_PAIRS {
            return Ok(Self::from_accumulators(self.n, partial(&lhs)));
        }
        let chunk = (lhs.len() / rayon::current_num_threads().max(1)).max(1);
        let parts: Vec<BTreeMap<Permutation, Cyclotomic>> = lhs
            .par_chunks(chunk)
            .map(|c| partial(c).into_iter().map(|(p, a)| (p, a.finish())).collect())
            .collect();
        // Exact arithmetic makes the merge independent of chunking.
        let mut acc: BTreeMap<Permutation, CycloAccumulator> = BTreeMap::new();
        for part in parts {
            for (p, c) in part {
                acc.entry(p).or_default().add(&c);
            }
        }
        Ok(Self::from_accumulators(self.n, acc))
    }

    /// `sigma -> sigma^{-1}` with conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        GroupAlgebraElement {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (p.inverse(), c.conj())).collect(),
        }
    }

    /// The same element inside `C[S_{n+1}]`, with `n + 1` fixed.
    pub fn embed_next(&self) -> Self {
        GroupAlgebraElement {
            n: self.n + 1,
            terms: self
                .terms
                .iter()
                .map(|(p, c)| {
                    let mut images = p.zero_based().to_vec();
                    images.push(self.n);
                    (Permutation::from_zero_based_unchecked(images), c.clone())
                })
                .collect(),
        }
    }

    /// Conjugation `h a h^{-1}`.
    pub fn conjugate_by(&self, h: &Permutation) -> Result<Self> {
        if h.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: h.degree(),
                right: self.n,
            });
        }
        let hinv = h.inverse();
        Ok(GroupAlgebraElement {
            n: self.n,
            terms: self.terms.iter().map(|(p, c)| (&(h * p) * &hinv, c.clone())).collect(),
        })
    }

    /// One `coefficient * cycle-notation` line per term, in permutation order.
    pub fn dump_text(&self) -> String {
        let mut out = String::new();
        for (p, c) in &self.terms {
            let coeff = c.to_string();
            let coeff = if coeff.contains([' ', '+']) || coeff.chars().skip(1).any(|c| c == '-') {
                format!("({coeff})")
            } else {
                coeff
            };
            out.push_str(&format!("{coeff} * {p}\n"));
        }
        out
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("({c})*{p}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// All permutations that preserve each block (setwise), with their signs.
fn block_group(n: usize, blocks: &[Vec<usize>]) -> Vec<(Permutation, i32)> {
    let mut out = vec![(0..n).collect::<Vec<usize>>()];
    for block in blocks.iter().filter(|b| b.len() > 1) {
        let zero: Vec<usize> = block.iter().map(|k| k - 1).collect();
        let arrangements = permutations_of(&zero);
        let zero = &zero;
        let arrangements = &arrangements;
        out = out
            .into_iter()
            .flat_map(|images| {
                arrangements.iter().map(move |arr| {
                    let mut im = images.clone();
                    for (src, dst) in zero.iter().zip(arr) {
                        im[*src] = *dst;
                    }
                    im
                })
            })
            .collect();
    }
    out.into_iter()
        .map(|im| {
            let p = Permutation::from_zero_based_unchecked(im);
            let s = p.sign();
            (p, s)
        })
        .collect()
}

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn columns_of(t: &StandardTableau) -> Vec<Vec<usize>> {
    let rows = t.rows();
    (0..rows[0].len())
        .map(|c| rows.iter().filter_map(|r| r.get(c).copied()).collect())
        .collect()
}

/// `r_T`: the sum of the row group of `T`.
pub fn row_sum(t: &StandardTableau) -> GroupAlgebraElement {
    let n = t.size();
    let terms = block_group(n, t.rows())
        .into_iter()
        .map(|(p, _)| (p, Cyclotomic::one()));
    GroupAlgebraElement::from_terms(n, terms).expect("uniform degree")
}

/// `c_T`: the signed sum of the column group of `T`.
pub fn col_sum(t: &StandardTableau) -> GroupAlgebraElement {
    let n = t.size();
    let terms = block_group(n, &columns_of(t))
        .into_iter()
        .map(|(p, s)| (p, Cyclotomic::from_integer(s as i64)));
    GroupAlgebraElement::from_terms(n, terms).expect("uniform degree")
}

/// `Y_T = (d_lambda / n!) r_T c_T`, an idempotent.
pub fn young_symmetrizer(t: &StandardTableau) -> GroupAlgebraElement {
    let n = t.size();
    let norm = BigRational::new(BigInt::from(dim_sn(t.shape())), BigInt::from(factorial(n)));
    row_sum(t)
        .mul(&col_sum(t))
        .expect("same degree")
        .scale(&Cyclotomic::from_rational(norm))
}

fn gys_cache() -> &'static Mutex<HashMap<StandardTableau, Arc<GroupAlgebraElement>>> {
    static CACHE: OnceLock<Mutex<HashMap<StandardTableau, Arc<GroupAlgebraElement>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Hermitian Young operator: `Y_T` for `n <= 2`, otherwise `G_pre Y_T G_pre` with
/// `G_pre` the operator of `T` minus its largest entry, embedded with `n` fixed.
pub fn generalized_symmetrizer(t: &StandardTableau) -> Arc<GroupAlgebraElement> {
    if let Some(g) = gys_cache().lock().unwrap().get(t) {
        return g.clone();
    }
    let y = young_symmetrizer(t);
    let g = match t.pre() {
        Some(pre) if t.size() > 2 => {
            let outer = generalized_symmetrizer(&pre).embed_next();
            outer.mul(&y).and_then(|x| x.mul(&outer)).expect("same degree")
        }
        _ => y,
    };
    let g = Arc::new(g);
    gys_cache().lock().unwrap().insert(t.clone(), g.clone());
    g
}

/// `P = (d / |G|) sum_{sigma in G} conj(chi(sigma)) sigma` for an irrep of `S_n` or `A_n`.
pub fn projector_element(label: &IrrepLabel, group: GroupKind) -> Result<GroupAlgebraElement> {
    let n = label.partition.size();
    if label.split.is_some() && group == GroupKind::Symmetric {
        return Err(Error::InvalidLabel {
            label: label.to_string(),
            group: format!("S{n}"),
        });
    }
    let t = table(group, n)?;
    let idx = t.irrep_index(label)?;
    let coef = Cyclotomic::from_rational(BigRational::new(
        BigInt::from(t.dimension(idx)),
        BigInt::from(t.order()),
    ));
    let elements = enumerate_group(n, group)?;
    let terms = elements
        .into_iter()
        .map(|p| {
            let chi = t.character(idx, &p)?;
            Ok((p, &chi.conj() * &coef))
        })
        .collect::<Result<Vec<_>>>()?;
    GroupAlgebraElement::from_terms(n, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::Branch;
    use crate::partition::{enumerate_syt, partitions_of, Partition};

    fn perm(s: &str, n: usize) -> Permutation {
        Permutation::parse(s, n).unwrap()
    }

    fn syt(s: &str) -> StandardTableau {
        s.parse().unwrap()
    }

    fn is_idempotent(a: &GroupAlgebraElement) -> bool {
        a.mul(a).unwrap() == *a
    }

    #[test]
    fn basic_products() {
        let a = GroupAlgebraElement::single(perm("(1,2)", 3), Cyclotomic::one());
        assert_eq!(a.mul(&a).unwrap(), GroupAlgebraElement::identity(3));
        let id = GroupAlgebraElement::identity(3);
        let b = GroupAlgebraElement::single(perm("(1,2,3)", 3), Cyclotomic::zeta(3));
        assert_eq!(id.mul(&b).unwrap(), b);
        assert!(a.mul(&GroupAlgebraElement::identity(4)).is_err());
    }

    #[test]
    fn adjoint_example() {
        let a = GroupAlgebraElement::single(perm("(1,2,3)", 3), Cyclotomic::zeta(3));
        let expect = GroupAlgebraElement::single(perm("(1,3,2)", 3), Cyclotomic::zeta_pow(3, 2));
        assert_eq!(a.adjoint(), expect);
        let id = GroupAlgebraElement::identity(4);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn row_and_column_groups() {
        let t = syt("12/34");
        let r = row_sum(&t);
        let expect_r: Vec<Permutation> = ["e", "(1,2)", "(3,4)", "(1,2)(3,4)"]
            .iter()
            .map(|s| perm(s, 4))
            .collect();
        assert_eq!(r.len(), 4);
        for p in &expect_r {
            assert!(r.coeff(p).is_one());
        }
        let c = col_sum(&t);
        for (s, sign) in [("e", 1), ("(1,3)", -1), ("(2,4)", -1), ("(1,3)(2,4)", 1)] {
            assert_eq!(c.coeff(&perm(s, 4)), Cyclotomic::from_integer(sign));
        }
        assert_eq!(row_sum(&syt("1/2/3")), GroupAlgebraElement::identity(3));
    }

    #[test]
    fn small_symmetrizers() {
        let y12 = young_symmetrizer(&syt("12"));
        let half = Cyclotomic::from_frac(1, 2);
        let expect =
            GroupAlgebraElement::from_terms(2, [(perm("e", 2), half.clone()), (perm("(1,2)", 2), half)]).unwrap();
        assert_eq!(y12, expect);
        let y123 = young_symmetrizer(&syt("123"));
        assert_eq!(y123.len(), 6);
        assert!(y123.terms().all(|(_, c)| *c == Cyclotomic::from_frac(1, 6)));
        let y = young_symmetrizer(&syt("123/4"));
        assert_eq!(y.len(), 12);
        assert!(is_idempotent(&y));
    }

    #[test]
    fn young_symmetrizers_idempotent() {
        for n in 1..=5 {
            for l in partitions_of(n, n) {
                for t in enumerate_syt(&l).unwrap() {
                    assert!(is_idempotent(&young_symmetrizer(&t)), "{t}");
                }
            }
        }
    }

    #[test]
    fn plain_symmetrizers_not_orthogonal() {
        // Some pair of distinct standard Young symmetrizers has a nonzero product.
        let ts = enumerate_syt(&"3,2".parse().unwrap()).unwrap();
        let ys: Vec<_> = ts.iter().map(young_symmetrizer).collect();
        let nonzero = ys.iter().enumerate().any(|(i, a)| {
            ys.iter()
                .enumerate()
                .any(|(j, b)| i != j && !a.mul(b).unwrap().is_zero())
        });
        assert!(nonzero);
    }

    #[test]
    fn generalized_symmetrizers_complete_and_orthogonal() {
        for n in 1..=4 {
            let all: Vec<StandardTableau> = partitions_of(n, n)
                .iter()
                .flat_map(|l| enumerate_syt(l).unwrap())
                .collect();
            let gs: Vec<_> = all.iter().map(generalized_symmetrizer).collect();
            let mut sum = GroupAlgebraElement::zero(n);
            for (i, a) in gs.iter().enumerate() {
                assert!(is_idempotent(a));
                assert_eq!(a.adjoint(), **a);
                for (j, b) in gs.iter().enumerate() {
                    if i != j {
                        assert!(a.mul(b).unwrap().is_zero(), "{} {}", all[i], all[j]);
                    }
                }
                sum = sum.add(a).unwrap();
            }
            assert_eq!(sum, GroupAlgebraElement::identity(n));
        }
        assert_eq!(syt("13/2/4").pre().unwrap(), syt("13/2"));
    }

    #[test]
    fn a3_projector_matches_display() {
        let p = projector_element(
            &IrrepLabel::new("2,1".parse().unwrap(), Some(Branch::B)),
            GroupKind::Alternating,
        )
        .unwrap();
        let third = Cyclotomic::from_frac(1, 3);
        let expect = GroupAlgebraElement::from_terms(
            3,
            [
                (perm("e", 3), third.clone()),
                (perm("(1,2,3)", 3), &third * &Cyclotomic::zeta(3)),
                (perm("(1,3,2)", 3), &third * &Cyclotomic::zeta_pow(3, 2)),
            ],
        )
        .unwrap();
        assert_eq!(p, expect);
        assert_eq!(p.adjoint(), p);
    }

    #[test]
    fn projectors_resolve_identity() {
        for n in 1..=5 {
            for group in [GroupKind::Symmetric, GroupKind::Alternating] {
                let t = table(group, n).unwrap();
                let ps: Vec<_> = t
                    .irreps()
                    .iter()
                    .map(|l| projector_element(l, group).unwrap())
                    .collect();
                let mut sum = GroupAlgebraElement::zero(n);
                for (i, a) in ps.iter().enumerate() {
                    assert!(is_idempotent(a), "{group}{n} {}", t.irreps()[i]);
                    assert_eq!(a.adjoint(), *a);
                    for (j, b) in ps.iter().enumerate() {
                        if i != j {
                            assert!(a.mul(b).unwrap().is_zero());
                        }
                    }
                    sum = sum.add(a).unwrap();
                }
                assert_eq!(sum, GroupAlgebraElement::identity(n));
            }
        }
    }

    #[test]
    fn split_projectors_swap_under_odd_conjugation() {
        for (n, lam) in [(3, "2,1"), (4, "2,2"), (5, "3,1,1")] {
            let lambda: Partition = lam.parse().unwrap();
            let pa = projector_element(
                &IrrepLabel::new(lambda.clone(), Some(Branch::A)),
                GroupKind::Alternating,
            )
            .unwrap();
            let pb = projector_element(
                &IrrepLabel::new(lambda.clone(), Some(Branch::B)),
                GroupKind::Alternating,
            )
            .unwrap();
            let full = projector_element(&IrrepLabel::unsplit(lambda), GroupKind::Symmetric).unwrap();
            assert_eq!(pa.add(&pb).unwrap(), full);
            let odd = Permutation::transposition(n, 1, 2).unwrap();
            assert_eq!(pa.conjugate_by(&odd).unwrap(), pb);
        }
    }

    #[test]
    fn trivial_projector() {
        let p = projector_element(&IrrepLabel::unsplit(Partition::row(4)), GroupKind::Symmetric).unwrap();
        assert_eq!(p.len(), 24);
        assert!(p.terms().all(|(_, c)| *c == Cyclotomic::from_frac(1, 24)));
        assert!(projector_element(
            &IrrepLabel::new("2,1".parse().unwrap(), Some(Branch::A)),
            GroupKind::Symmetric
        )
        .is_err());
    }

    #[test]
    fn dump_format() {
        let y = young_symmetrizer(&syt("12"));
        assert_eq!(y.dump_text(), "1/2 * e\n1/2 * (1,2)\n");
    }
}
