//! Parity-detecting states.
//!
//! Two mechanisms produce states whose even-permutation orbit is orthogonal to the odd one: a
//! split half `lambda a` of a self-conjugate irrep, and an equal-weight sum over a conjugate pair
//! `lambda`, `lambda^T` related by the sign intertwiner. This module builds both, checks the
//! orthogonality, forms the two hypothesis density matrices and simulates the measurement.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Roots;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{table, Branch, ClassLabel, IrrepLabel};
use crate::cyclo::{CycloAccumulator, Cyclotomic};
use crate::error::{Error, Result};
use crate::exact::{self, Matrix};
use crate::group_algebra::{generalized_symmetrizer, projector_element};
use crate::linalg::{factor_residual, pivoted_cholesky, CMatrix};
use crate::partition::{
    diagonal_hooks, enumerate_syt, partitions_of, ssyt_count_by_content, Partition, StandardTableau,
};
use crate::perm::{compose, enumerate_group_bounded, GroupKind, Permutation, DEFAULT_MAX_DEGREE};
use crate::state::{next_arrangement, Ket, Mode, Scalar, StateVector, FLOAT_TOL};

/// Largest `d^n` for which dense density matrices are formed.
pub const DEFAULT_DENSE_BOUND: usize = 4096;

/// Largest degree for exact conjugate-pair and split-automorphism solves.
pub const MAX_BASIS_DEGREE: usize = 6;

/// `ceil(sqrt(n))` in integer arithmetic.
pub fn dmin(n: usize) -> usize {
    let r = n.sqrt();
    if r * r < n {
        r + 1
    } else {
        r
    }
}

/// Partitions of `n` admissible at local dimension `d`, sorted into the three sectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub n: usize,
    pub d: usize,
    pub dmin: usize,
    /// Self-conjugate `lambda`.
    pub sector_i: Vec<Partition>,
    /// `lambda != lambda^T` with both admissible; both members are listed.
    pub sector_ii: Vec<Partition>,
    /// Everything else with `l(lambda) <= d`.
    pub sector_iii: Vec<Partition>,
    pub parity_possible: bool,
}

pub fn feasible_mechanisms(n: usize, d: usize) -> FeasibilityReport {
    let mut report = FeasibilityReport {
        n,
        d,
        dmin: dmin(n),
        sector_i: Vec::new(),
        sector_ii: Vec::new(),
        sector_iii: Vec::new(),
        parity_possible: false,
    };
    for lambda in partitions_of(n, d) {
        if lambda.is_self_conjugate() {
            report.sector_i.push(lambda);
        } else if lambda.transpose().len() <= d {
            report.sector_ii.push(lambda);
        } else {
            report.sector_iii.push(lambda);
        }
    }
    report.parity_possible = !(report.sector_i.is_empty() && report.sector_ii.is_empty());
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    SelfConjugate,
    ConjugatePair,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::SelfConjugate => "self_conjugate",
            Method::ConjugatePair => "conjugate_pair",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "self_conjugate" => Ok(Method::SelfConjugate),
            "conjugate_pair" => Ok(Method::ConjugatePair),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// Everything needed to rebuild a parity-detecting state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityStateRecipe {
    pub n: usize,
    pub d: usize,
    pub method: Method,
    pub lambda: Partition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_ket: Option<Ket>,
    /// Weights `phi_k` on the conjugate-pair basis; defaults to `e_1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<Cyclotomic>>,
}

impl ParityStateRecipe {
    pub fn self_conjugate(d: usize, lambda: Partition, branch: Branch, seed_ket: Option<Ket>) -> Self {
        ParityStateRecipe {
            n: lambda.size(),
            d,
            method: Method::SelfConjugate,
            lambda,
            branch: Some(branch),
            seed_ket,
            coefficients: None,
        }
    }

    pub fn conjugate_pair(d: usize, lambda: Partition, coefficients: Option<Vec<Cyclotomic>>) -> Self {
        ParityStateRecipe {
            n: lambda.size(),
            d,
            method: Method::ConjugatePair,
            lambda,
            branch: None,
            seed_ket: None,
            coefficients,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRecipe(m));
        if self.lambda.size() != self.n {
            return bad(format!("lambda {} is not a partition of n = {}", self.lambda, self.n));
        }
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if self.lambda.len() > self.d {
            return bad(format!("l({}) exceeds d = {}", self.lambda, self.d));
        }
        match self.method {
            Method::SelfConjugate => {
                if !self.lambda.is_self_conjugate() {
                    return bad(format!("{} is not self-conjugate", self.lambda));
                }
                if self.coefficients.is_some() {
                    return bad("coefficients apply to the conjugate-pair method only".into());
                }
                if let Some(k) = &self.seed_ket {
                    if k.len() != self.n || k.digits().iter().any(|&x| x >= self.d) {
                        return bad(format!("seed ket {k} does not fit n = {}, d = {}", self.n, self.d));
                    }
                }
            }
            Method::ConjugatePair => {
                if self.lambda.is_self_conjugate() {
                    return bad(format!("{} is self-conjugate", self.lambda));
                }
                if self.lambda.transpose().len() > self.d {
                    return bad(format!("conjugate {} exceeds d = {}", self.lambda.transpose(), self.d));
                }
                if self.branch.is_some() || self.seed_ket.is_some() {
                    return bad("branch and seed ket apply to the self-conjugate method only".into());
                }
                if let Some(c) = &self.coefficients {
                    let dim = crate::partition::dim_sn(&self.lambda) as usize;
                    if c.len() != dim {
                        return bad(format!("expected {dim} coefficients, got {}", c.len()));
                    }
                    if c.iter().all(Cyclotomic::is_zero) {
                        return bad("coefficients are all zero".into());
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the state described by `recipe`.
pub fn build(recipe: &ParityStateRecipe) -> Result<StateVector> {
    match recipe.method {
        Method::SelfConjugate => build_self_conjugate(recipe),
        Method::ConjugatePair => build_conjugate_pair(recipe),
    }
}

/// A recipe for `(n, d)` that yields a parity-detecting state, preferring the self-conjugate
/// mechanism; `None` below `dmin(n)`.
pub fn default_recipe(n: usize, d: usize) -> Option<ParityStateRecipe> {
    let report = feasible_mechanisms(n, d);
    if let Some(l) = report.sector_i.first() {
        return Some(ParityStateRecipe::self_conjugate(d, l.clone(), Branch::A, None));
    }
    report
        .sector_ii
        .first()
        .map(|l| ParityStateRecipe::conjugate_pair(d, l.clone(), None))
}

/// Lexicographically smallest sorted content carrying exactly one SSYT of shape `lambda`.
pub fn single_multiplicity_content(lambda: &Partition, d: usize) -> Result<Vec<usize>> {
    ssyt_count_by_content(lambda, d)
        .into_iter()
        .find(|(_, c)| *c == 1)
        .map(|(k, _)| k)
        .ok_or_else(|| Error::NoSingleMultiplicityContent(lambda.to_string()))
}

/// `P_{lambda, branch} |seed>`, exact. The seed defaults to the single-multiplicity content.
pub fn build_self_conjugate(recipe: &ParityStateRecipe) -> Result<StateVector> {
    recipe.validate()?;
    if recipe.method != Method::SelfConjugate {
        return Err(Error::InvalidRecipe("expected the self-conjugate method".into()));
    }
    let seed = match &recipe.seed_ket {
        Some(k) => k.clone(),
        None => Ket::new(single_multiplicity_content(&recipe.lambda, recipe.d)?, recipe.d)?,
    };
    let label = IrrepLabel::new(recipe.lambda.clone(), Some(recipe.branch.unwrap_or(Branch::A)));
    let p = projector_element(&label, GroupKind::Alternating)?;
    let psi = StateVector::basis(recipe.d, &seed)?.apply_algebra(&p)?;
    if psi.is_zero() {
        return Err(Error::AnnihilatedSeed(seed.to_string()));
    }
    Ok(psi)
}

fn adjacent_transpositions(n: usize) -> Result<Vec<Permutation>> {
    (1..n).map(|i| Permutation::transposition(n, i, i + 1)).collect()
}

fn is_positive_real(c: &Cyclotomic) -> bool {
    c.embed().re > 0.0
}

/// Orthonormal basis of one copy of the irrep `lambda` inside `(C^d)^n`, obtained by applying
/// the Hermitian symmetrizers to kets of a single-multiplicity content. Signs are fixed so that
/// the adjacent transpositions act by Young's orthogonal form (non-negative off-diagonals).
#[derive(Clone, Debug)]
pub struct IrrepBasis {
    pub lambda: Partition,
    pub d: usize,
    pub content: Vec<usize>,
    pub tableaux: Vec<StandardTableau>,
    pub vectors: Vec<StateVector>,
    /// `(i, i+1)` for `i = 1..n-1`.
    pub generators: Vec<Permutation>,
    /// `D(generators[i])` with `sigma u_k = sum_l D[l][k] u_l`.
    pub rep_matrices: Vec<Matrix<Cyclotomic>>,
}

impl IrrepBasis {
    pub fn new(d: usize, lambda: &Partition) -> Result<Self> {
        let n = lambda.size();
        if n > MAX_BASIS_DEGREE {
            return Err(Error::BoundExceeded {
                what: "degree for exact irrep bases",
                value: n,
                bound: MAX_BASIS_DEGREE,
            });
        }
        if lambda.len() > d {
            return Err(Error::ShapeMismatch(format!("l({lambda}) exceeds d = {d}")));
        }
        let content = single_multiplicity_content(lambda, d)?;
        let mut arrangements = Vec::new();
        let mut cur = content.clone();
        loop {
            arrangements.push(Ket::new(cur.clone(), d)?);
            if !next_arrangement(&mut cur) {
                break;
            }
        }
        let tableaux = enumerate_syt(lambda)?;
        let mut raws = Vec::with_capacity(tableaux.len());
        for t in &tableaux {
            let y = generalized_symmetrizer(t);
            let mut found = None;
            for k in &arrangements {
                let v = StateVector::basis(d, k)?.apply_algebra(&y)?;
                if !v.is_zero() {
                    found = Some(v);
                    break;
                }
            }
            raws.push(found.ok_or_else(|| Error::AnnihilatedSeed(format!("content {content:?} for {t}")))?);
        }
        let norms: Vec<Cyclotomic> = raws
            .iter()
            .map(|v| match v.inner(v) {
                Ok(Scalar::Exact(c)) => Ok(c),
                _ => unreachable!("exact state"),
            })
            .collect::<Result<_>>()?;
        let generators = adjacent_transpositions(n)?;
        let m = raws.len();
        let mut mats: Vec<Matrix<Cyclotomic>> = Vec::with_capacity(generators.len());
        for g in &generators {
            let moved: Vec<StateVector> = raws.iter().map(|v| v.act(g)).collect::<Result<_>>()?;
            let mut mat = vec![vec![Cyclotomic::zero(); m]; m];
            for (l, row) in mat.iter_mut().enumerate() {
                for (k, entry) in row.iter_mut().enumerate() {
                    let Scalar::Exact(ip) = raws[l].inner(&moved[k])? else {
                        unreachable!()
                    };
                    if ip.is_zero() {
                        continue;
                    }
                    let nn = (&norms[l] * &norms[k])
                        .to_rational()
                        .cloned()
                        .ok_or_else(|| Error::Singular("irrational basis norm".into()))?;
                    *entry = &ip * &Cyclotomic::sqrt_of_rational(&nn)?.inv()?;
                }
            }
            mats.push(mat);
        }
        // Spanning-tree sign fix from the first tableau.
        let mut signs: Vec<Option<i64>> = vec![None; m];
        signs[0] = Some(1);
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            let sk = signs[k].expect("visited");
            for mat in &mats {
                for (l, row) in mat.iter().enumerate() {
                    if l != k && signs[l].is_none() && !row[k].is_zero() {
                        signs[l] = Some(if is_positive_real(&row[k]) { sk } else { -sk });
                        queue.push_back(l);
                    }
                }
            }
        }
        let signs: Vec<i64> = signs
            .into_iter()
            .map(|s| s.ok_or_else(|| Error::Singular("disconnected generator graph".into())))
            .collect::<Result<_>>()?;
        for mat in mats.iter_mut() {
            for (l, row) in mat.iter_mut().enumerate() {
                for (k, entry) in row.iter_mut().enumerate() {
                    if signs[l] * signs[k] < 0 {
                        *entry = -&*entry;
                    }
                    if l != k && !entry.is_zero() && !is_positive_real(entry) {
                        return Err(Error::Singular(format!(
                            "no consistent sign choice for {lambda} (entry {l},{k})"
                        )));
                    }
                }
            }
        }
        let vectors = raws
            .iter()
            .zip(&norms)
            .zip(&signs)
            .map(|((v, q), &s)| {
                let q = q.to_rational().expect("rational norm");
                let c = Cyclotomic::sqrt_of_rational(q)?.inv()?;
                Ok(v.scale_exact(&if s < 0 { -c } else { c }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IrrepBasis {
            lambda: lambda.clone(),
            d,
            content,
            tableaux,
            vectors,
            generators,
            rep_matrices: mats,
        })
    }

    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }

    pub fn degree(&self) -> usize {
        self.lambda.size()
    }

    /// `D(sigma)` as a product of generator matrices along a reduced word.
    pub fn matrix_of(&self, sigma: &Permutation) -> Result<Matrix<Cyclotomic>> {
        let n = self.degree();
        if sigma.degree() != n {
            return Err(Error::DegreeMismatch {
                left: sigma.degree(),
                right: n,
            });
        }
        // sigma = w s_i with one fewer inversion whenever sigma(i) > sigma(i+1).
        let mut w = sigma.clone();
        let mut word = Vec::new();
        while let Some(i) = (1..n).find(|&i| w.apply(i) > w.apply(i + 1)) {
            w = compose(&w, &self.generators[i - 1])?;
            word.push(i - 1);
        }
        let mut out = exact::identity(self.dimension());
        for &i in word.iter().rev() {
            out = exact::mat_mul(&out, &self.rep_matrices[i]);
        }
        Ok(out)
    }

    /// Generator matrices embedded as floats.
    pub fn rep_matrices_float(&self) -> Vec<Vec<Vec<f64>>> {
        self.rep_matrices.iter().map(to_float_real).collect()
    }
}

pub fn to_float_real(m: &Matrix<Cyclotomic>) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|c| c.embed().re).collect()).collect()
}

fn adjoint(m: &Matrix<Cyclotomic>) -> Matrix<Cyclotomic> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| (0..rows).map(|i| m[i][j].conj()).collect()).collect()
}

/// One-dimensional solution space of `A X + s X B = 0` over all generators, where
/// `(A, B, s)` runs over `pairs`. Returns `X` scaled so that its first column has unit norm.
fn solve_intertwiner(
    pairs: &[(&Matrix<Cyclotomic>, &Matrix<Cyclotomic>)],
    sign: i64,
    m: usize,
) -> Result<Matrix<Cyclotomic>> {
    let s = Cyclotomic::from_integer(sign);
    let mut rows: Matrix<Cyclotomic> = Vec::new();
    for (a, b) in pairs {
        for r in 0..m {
            for c in 0..m {
                let mut row = vec![Cyclotomic::zero(); m * m];
                for l in 0..m {
                    if !a[r][l].is_zero() {
                        row[l * m + c] += &a[r][l];
                    }
                    if !b[l][c].is_zero() {
                        row[r * m + l] += &(&s * &b[l][c]);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let ns = exact::nullspace(&rows);
    if ns.len() != 1 {
        return Err(Error::Singular(format!("intertwiner space has dimension {}", ns.len())));
    }
    let x: Matrix<Cyclotomic> = ns[0].chunks(m).map(|r| r.to_vec()).collect();
    let mut acc = CycloAccumulator::new();
    for row in &x {
        acc.add(&row[0].abs_sq());
    }
    let nsq = acc.finish();
    let q = nsq
        .to_rational()
        .cloned()
        .ok_or_else(|| Error::Singular("intertwiner column norm is irrational".into()))?;
    if q.is_zero() {
        return Err(Error::Singular("intertwiner first column vanishes".into()));
    }
    let scale = Cyclotomic::sqrt_of_rational(&q)?.inv()?;
    Ok(x.into_iter()
        .map(|r| r.into_iter().map(|v| &v * &scale).collect())
        .collect())
}

/// Bases of a conjugate pair `lambda`, `lambda^T` and the intertwiner `T` with
/// `D_{lambda^T}(sigma) = sign(sigma) T D_lambda(sigma) T^dagger`.
///
/// `basis_plus[k]` is `u_k` of `lambda`; `basis_minus[k] = sum_l T[l][k] u'_l`, which carries
/// `sign (x) D_lambda`. The global sign of `T` is fixed by making the first nonzero entry of its
/// first column negative.
#[derive(Clone, Debug)]
pub struct ConjugatePairBasis {
    pub lambda: Partition,
    pub plus: IrrepBasis,
    pub minus: IrrepBasis,
    pub intertwiner: Matrix<Cyclotomic>,
    pub basis_plus: Vec<StateVector>,
    pub basis_minus: Vec<StateVector>,
}

pub fn conjugate_pair_basis(n: usize, d: usize, lambda: &Partition) -> Result<ConjugatePairBasis> {
    if lambda.size() != n {
        return Err(Error::ShapeMismatch(format!("{lambda} is not a partition of {n}")));
    }
    if lambda.is_self_conjugate() {
        return Err(Error::InvalidRecipe(format!("{lambda} is self-conjugate")));
    }
    let conj = lambda.transpose();
    if lambda.len() > d || conj.len() > d {
        return Err(Error::InvalidRecipe(format!(
            "{lambda} and {conj} are not both admissible at d = {d}"
        )));
    }
    let plus = IrrepBasis::new(d, lambda)?;
    let minus = IrrepBasis::new(d, &conj)?;
    let m = plus.dimension();
    // D'(s) T = sign(s) T D(s) with every generator odd: D'(s) T + T D(s) = 0.
    let pairs: Vec<_> = minus.rep_matrices.iter().zip(&plus.rep_matrices).collect();
    let mut t = solve_intertwiner(&pairs, 1, m)?;
    let first = t
        .iter()
        .map(|r| &r[0])
        .find(|c| !c.is_zero())
        .expect("normalized column")
        .embed();
    if first.re > 0.0 || (first.re == 0.0 && first.im > 0.0) {
        t = t.into_iter().map(|r| r.into_iter().map(|v| -v).collect()).collect();
    }
    let basis_minus = (0..m)
        .map(|k| {
            let mut acc = StateVector::zero(n, d, Mode::Exact)?;
            for (l, u) in minus.vectors.iter().enumerate() {
                if !t[l][k].is_zero() {
                    acc = acc.add(&u.scale_exact(&t[l][k]))?;
                }
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConjugatePairBasis {
        lambda: lambda.clone(),
        basis_plus: plus.vectors.clone(),
        plus,
        minus,
        intertwiner: t,
        basis_minus,
    })
}

impl ConjugatePairBasis {
    pub fn dimension(&self) -> usize {
        self.basis_plus.len()
    }

    /// `sum_k phi_k (w_+ |v_k>|s_+> + w_- |v_k>|s_->)` with weights in `{0, 1}` chosen by flags.
    pub fn combine(&self, phi: &[Cyclotomic], plus: bool, minus: bool) -> Result<StateVector> {
        if phi.len() != self.dimension() {
            return Err(Error::InvalidRecipe(format!(
                "expected {} coefficients, got {}",
                self.dimension(),
                phi.len()
            )));
        }
        let first = &self.basis_plus[0];
        let mut acc = StateVector::zero(first.n(), first.d(), Mode::Exact)?;
        for (k, c) in phi.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if plus {
                acc = acc.add(&self.basis_plus[k].scale_exact(c))?;
            }
            if minus {
                acc = acc.add(&self.basis_minus[k].scale_exact(c))?;
            }
        }
        Ok(acc)
    }

    /// `D_{lambda^T}(s) - sign(s) T D_lambda(s) T^dagger` vanishes on every generator.
    pub fn intertwiner_holds(&self) -> bool {
        let t = &self.intertwiner;
        let td = adjoint(t);
        self.minus
            .rep_matrices
            .iter()
            .zip(&self.plus.rep_matrices)
            .all(|(dm, dp)| {
                let rhs = exact::mat_mul(&exact::mat_mul(t, dp), &td);
                dm.iter().zip(&rhs).all(|(a, b)| a.iter().zip(b).all(|(x, y)| *x == -y))
            })
    }
}

/// `sum_k phi_k |v_k>(|s_+> + |s_->)`, exact; `phi` defaults to `e_1`.
pub fn build_conjugate_pair(recipe: &ParityStateRecipe) -> Result<StateVector> {
    recipe.validate()?;
    if recipe.method != Method::ConjugatePair {
        return Err(Error::InvalidRecipe("expected the conjugate-pair method".into()));
    }
    let basis = conjugate_pair_basis(recipe.n, recipe.d, &recipe.lambda)?;
    let phi = match &recipe.coefficients {
        Some(c) => c.clone(),
        None => {
            let mut e = vec![Cyclotomic::zero(); basis.dimension()];
            e[0] = Cyclotomic::one();
            e
        }
    };
    basis.combine(&phi, true, true)
}

/// Outcome of the orbit-orthogonality check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub valid: bool,
    /// `max |<sigma psi|tau psi>| / <psi|psi>` over even `sigma`, odd `tau`.
    pub max_cross_overlap: f64,
    pub n_even: usize,
    pub n_odd: usize,
    pub exact: bool,
}

pub fn verify_parity(psi: &StateVector) -> Result<ParityReport> {
    verify_parity_bounded(psi, DEFAULT_MAX_DEGREE)
}

/// Cross block of the orbit Gram matrix. Since `<sigma psi|tau psi> = <psi|sigma^-1 tau psi>`
/// and `sigma^-1 tau` runs over all odd permutations, the distinct entries are the overlaps
/// `<psi|rho psi>` for odd `rho`.
pub fn verify_parity_bounded(psi: &StateVector, max_degree: usize) -> Result<ParityReport> {
    if psi.is_zero() {
        return Err(Error::ZeroState);
    }
    let n = psi.n();
    let group = enumerate_group_bounded(n, GroupKind::Symmetric, max_degree)?;
    let odd: Vec<&Permutation> = group.iter().filter(|p| !p.is_even()).collect();
    let n_odd = odd.len();
    let n_even = group.len() - n_odd;
    let norm = psi.norm_sq();
    let overlaps: Vec<Scalar> = odd.par_iter().map(|p| psi.inner(&psi.act(p)?)).collect::<Result<_>>()?;
    let exact = psi.mode() == Mode::Exact;
    let max_cross_overlap = overlaps
        .iter()
        .map(|s| s.to_complex().norm() / norm)
        .fold(0.0, f64::max);
    let valid = if exact {
        overlaps.iter().all(|s| s.is_negligible(0.0))
    } else {
        max_cross_overlap <= FLOAT_TOL
    };
    Ok(ParityReport {
        valid,
        max_cross_overlap,
        n_even,
        n_odd,
        exact,
    })
}

/// `rho_0` (even orbit average) and `rho_1 = (1,2) rho_0 (1,2)` as dense matrices.
#[derive(Clone, Debug)]
pub struct HypothesisPair {
    pub n: usize,
    pub d: usize,
    pub rho0: CMatrix,
    pub rho1: CMatrix,
}

pub fn hypothesis_pair(psi: &StateVector) -> Result<HypothesisPair> {
    hypothesis_pair_bounded(psi, DEFAULT_DENSE_BOUND, DEFAULT_MAX_DEGREE)
}

pub fn hypothesis_pair_bounded(psi: &StateVector, max_dim: usize, max_degree: usize) -> Result<HypothesisPair> {
    let (n, d) = (psi.n(), psi.d());
    if n < 2 {
        return Err(Error::ShapeMismatch("hypotheses need n >= 2".into()));
    }
    let dim = psi.dimension();
    if dim > max_dim as u64 {
        return Err(Error::BoundExceeded {
            what: "dense dimension d^n",
            value: dim as usize,
            bound: max_dim,
        });
    }
    let dim = dim as usize;
    let unit = psi.normalized_float()?;
    let even = enumerate_group_bounded(n, GroupKind::Alternating, max_degree)?;
    let weight = 1.0 / even.len() as f64;
    let mut rho0 = CMatrix::zeros(dim, dim);
    for sigma in &even {
        let v = unit.act(sigma)?;
        let entries: Vec<(usize, Complex64)> = v
            .to_dense(dim)?
            .into_iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .collect();
        for &(i, a) in &entries {
            for &(j, b) in &entries {
                rho0.add_at(i, j, a * b.conj() * weight);
            }
        }
    }
    // (1,2) swaps the two leading digits of each basis index.
    let hi = d.pow(n as u32 - 1);
    let lo = d.pow(n as u32 - 2);
    let swap = |i: usize| {
        let a = i / hi;
        let b = (i / lo) % d;
        i - a * hi - b * lo + b * hi + a * lo
    };
    let mut rho1 = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            rho1.set(swap(i), swap(j), rho0.get(i, j));
        }
    }
    Ok(HypothesisPair { n, d, rho0, rho1 })
}

impl HypothesisPair {
    pub fn overlap_trace(&self) -> f64 {
        self.rho0.trace_product(&self.rho1).expect("square").re
    }

    pub fn frobenius_distance(&self) -> f64 {
        self.rho0.sub(&self.rho1).expect("same shape").frobenius_norm()
    }

    /// Unit trace, Hermitian and positive semidefinite, each within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        for (name, rho) in [("rho0", &self.rho0), ("rho1", &self.rho1)] {
            let tr = rho.trace();
            if (tr - Complex64::new(1.0, 0.0)).norm() > tol {
                return Err(Error::ShapeMismatch(format!("{name} has trace {tr}")));
            }
            if rho.hermiticity_defect() > tol {
                return Err(Error::ShapeMismatch(format!("{name} is not Hermitian")));
            }
            let f = pivoted_cholesky(rho, tol)?;
            let r = factor_residual(rho, &f);
            if r > 10.0 * tol {
                return Err(Error::ShapeMismatch(format!("{name} is not PSD (residual {r})")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SimulationOptions {
    pub trials: usize,
    pub seed: u64,
    pub allow_invalid: bool,
    pub max_degree: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            trials: 1000,
            seed: 0,
            allow_invalid: false,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub permutation: String,
    pub even: bool,
    pub p_even: f64,
    pub outcome_even: bool,
    pub success: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub trials: usize,
    pub successes: usize,
    #[serde(rename = "empirical_Ps")]
    pub empirical_ps: Option<f64>,
    pub seed: u64,
    pub log: Vec<TrialRecord>,
}

/// Born probabilities this close to 0 or 1 are snapped, so rounding noise cannot flip a
/// certain outcome.
const PROBABILITY_SNAP: f64 = 1e-12;

/// Orthonormal basis of the span of the even orbit, by twice-iterated Gram-Schmidt.
fn even_span(unit: &StateVector, max_degree: usize) -> Result<Vec<StateVector>> {
    let even = enumerate_group_bounded(unit.n(), GroupKind::Alternating, max_degree)?;
    let mut basis: Vec<StateVector> = Vec::new();
    for sigma in &even {
        let mut v = unit.act(sigma)?;
        for _ in 0..2 {
            for b in &basis {
                let c = b.inner(&v)?.to_complex();
                if c.norm() > 0.0 {
                    v = v.add(&b.scale_float(-c))?;
                }
            }
        }
        let nrm = v.norm_sq().sqrt();
        if nrm > 1e-8 {
            basis.push(v.scale_float(Complex64::new(1.0 / nrm, 0.0)));
        }
    }
    Ok(basis)
}

/// Each trial draws a uniform `sigma` in `S_n` from a generator seeded with `seed + trial`,
/// measures `{Pi_even, 1 - Pi_even}` on `sigma |psi>` and guesses "even" on the first outcome.
pub fn simulate(psi: &StateVector, opts: &SimulationOptions) -> Result<SimulationReport> {
    if opts.trials == 0 {
        return Ok(SimulationReport {
            trials: 0,
            successes: 0,
            empirical_ps: None,
            seed: opts.seed,
            log: Vec::new(),
        });
    }
    if !opts.allow_invalid {
        let report = verify_parity_bounded(psi, opts.max_degree)?;
        if !report.valid {
            return Err(Error::NotParityDetecting(format!(
                "max cross overlap {}",
                report.max_cross_overlap
            )));
        }
    }
    let unit = psi.to_float().normalized_float()?;
    let basis = even_span(&unit, opts.max_degree)?;
    let n = psi.n();
    let log: Vec<TrialRecord> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(trial as u64));
            let mut images: Vec<usize> = (1..=n).collect();
            images.shuffle(&mut rng);
            let sigma = Permutation::from_images(&images)?;
            let moved = unit.act(&sigma)?;
            let mut p = 0.0;
            for b in &basis {
                p += b.inner(&moved)?.to_complex().norm_sqr();
            }
            let p_even = if p < PROBABILITY_SNAP {
                0.0
            } else if p > 1.0 - PROBABILITY_SNAP {
                1.0
            } else {
                p
            };
            let u: f64 = rng.random();
            let outcome_even = u < p_even;
            let even = sigma.is_even();
            Ok(TrialRecord {
                trial,
                permutation: sigma.to_string(),
                even,
                p_even,
                outcome_even,
                success: outcome_even == even,
            })
        })
        .collect::<Result<_>>()?;
    let successes = log.iter().filter(|r| r.success).count();
    Ok(SimulationReport {
        trials: opts.trials,
        successes,
        empirical_ps: Some(successes as f64 / opts.trials as f64),
        seed: opts.seed,
        log,
    })
}

/// The involution `V` on a self-conjugate irrep with `V D(sigma) V^dagger = sign(sigma) D(sigma)`.
/// Its sign is chosen so that `(1 + V)/2` carries the `lambda a` character.
#[derive(Clone, Debug)]
pub struct SplitAutomorphism {
    pub lambda: Partition,
    pub basis: IrrepBasis,
    pub v: Matrix<Cyclotomic>,
}

pub fn split_automorphism(lambda: &Partition) -> Result<SplitAutomorphism> {
    if !lambda.is_self_conjugate() {
        return Err(Error::NotSelfConjugate(lambda.to_string()));
    }
    let n = lambda.size();
    let basis = IrrepBasis::new(lambda.len().max(1), lambda)?;
    let m = basis.dimension();
    let pairs: Vec<_> = basis.rep_matrices.iter().map(|g| (g, g)).collect();
    let v0 = solve_intertwiner(&pairs, 1, m)?;
    let sq = exact::mat_mul(&v0, &v0);
    let s = sq[0][0].clone();
    let scalar_ok = sq.iter().enumerate().all(|(i, r)| {
        r.iter()
            .enumerate()
            .all(|(j, x)| if i == j { *x == s } else { x.is_zero() })
    });
    if !scalar_ok {
        return Err(Error::Singular("V^2 is not scalar".into()));
    }
    let q = s
        .to_rational()
        .cloned()
        .ok_or_else(|| Error::Singular("V^2 is not a rational multiple of identity".into()))?;
    let scale = Cyclotomic::sqrt_of_rational(&q)?.inv()?;
    let v: Matrix<Cyclotomic> = v0
        .into_iter()
        .map(|r| r.into_iter().map(|x| &x * &scale).collect())
        .collect();
    let mut out = SplitAutomorphism {
        lambda: lambda.clone(),
        basis,
        v,
    };
    // Fix the sign of V on the class whose two A_n characters differ.
    let hooks = diagonal_hooks(lambda)?;
    let t = table(GroupKind::Alternating, n)?;
    let class = ClassLabel {
        cycle_type: hooks,
        split: Some(Branch::A),
    };
    let ci = t.class_index(&class).ok_or_else(|| Error::InvalidLabel {
        label: class.to_string(),
        group: format!("A{n}"),
    })?;
    let rep = t.classes()[ci].representative.clone();
    let expected = t
        .value(&IrrepLabel::new(lambda.clone(), Some(Branch::A)), &class)?
        .clone();
    let got = out.branch_trace(Branch::A, &rep)?;
    if got != expected {
        out.v = out.v.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        if out.branch_trace(Branch::A, &rep)? != expected {
            return Err(Error::Singular(format!("neither sign of V reproduces {lambda}a")));
        }
    }
    Ok(out)
}

impl SplitAutomorphism {
    /// `(1 + V)/2` for branch a, `(1 - V)/2` for branch b.
    pub fn projector(&self, branch: Branch) -> Matrix<Cyclotomic> {
        let half = Cyclotomic::from_frac(1, 2);
        let sgn = if branch == Branch::A { half.clone() } else { -&half };
        self.v
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let diag = if i == j { half.clone() } else { Cyclotomic::zero() };
                        &diag + &(&sgn * x)
                    })
                    .collect()
            })
            .collect()
    }

    /// `Tr(D(sigma) P_branch)`, the character of the branch's `A_n` irrep.
    pub fn branch_trace(&self, branch: Branch, sigma: &Permutation) -> Result<Cyclotomic> {
        let d = self.basis.matrix_of(sigma)?;
        let p = self.projector(branch);
        let prod = exact::mat_mul(&d, &p);
        Ok((0..prod.len()).map(|i| prod[i][i].clone()).sum())
    }

    pub fn v_float(&self) -> Vec<Vec<f64>> {
        to_float_real(&self.v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn ket(s: &str) -> Ket {
        Ket::parse(s, 10).unwrap()
    }

    fn exact_state(d: usize, terms: &[(&str, Cyclotomic)]) -> StateVector {
        let n = terms[0].0.len();
        StateVector::from_exact_terms(n, d, terms.iter().map(|(k, c)| (ket(k), c.clone()))).unwrap()
    }

    fn int(k: i64) -> Cyclotomic {
        Cyclotomic::from_integer(k)
    }

    #[test]
    fn dmin_matches_integer_oracle() {
        for n in 1..200usize {
            let oracle = (1..).find(|d: &usize| d * d >= n).unwrap();
            assert_eq!(dmin(n), oracle, "n = {n}");
        }
        assert_eq!((dmin(3), dmin(5), dmin(9), dmin(10)), (2, 3, 3, 4));
    }

    #[test]
    fn sectors() {
        let r = feasible_mechanisms(4, 2);
        assert_eq!(r.sector_i, vec![part("2,2")]);
        let r = feasible_mechanisms(4, 3);
        assert!(r.sector_ii.contains(&part("3,1")) && r.sector_ii.contains(&part("2,1,1")));
        let r = feasible_mechanisms(5, 2);
        assert!(r.sector_i.is_empty() && r.sector_ii.is_empty() && !r.parity_possible);
        for n in 1..=9 {
            for d in 1..=4 {
                assert_eq!(feasible_mechanisms(n, d).parity_possible, d >= dmin(n), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn three_qubit_state() {
        let recipe = ParityStateRecipe::self_conjugate(2, part("2,1"), Branch::B, Some(ket("011")));
        let psi = build(&recipe).unwrap();
        let z = Cyclotomic::zeta(3);
        let golden = exact_state(2, &[("011", int(1)), ("101", z.clone()), ("110", z.pow(2))]);
        assert!(psi.proportional(&golden).is_some());
        let r = verify_parity(&psi).unwrap();
        assert!(r.valid && r.exact && r.max_cross_overlap == 0.0);
        assert_eq!((r.n_even, r.n_odd), (3, 3));
    }

    #[test]
    fn m4_state() {
        let recipe = ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, Some(ket("0011")));
        let psi = build(&recipe).unwrap();
        let z = Cyclotomic::zeta(3);
        let z2 = z.pow(2);
        let golden = exact_state(
            2,
            &[
                ("0011", int(1)),
                ("1100", int(1)),
                ("0101", z.clone()),
                ("1010", z.clone()),
                ("0110", z2.clone()),
                ("1001", z2.clone()),
            ],
        );
        assert!(psi.proportional(&golden).is_some());
        // The automatic seed is the same ket here.
        let auto = build(&ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, None)).unwrap();
        assert_eq!(auto, psi);
    }

    #[test]
    fn annihilated_seed_and_invalid_recipes() {
        let recipe = ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, Some(ket("0000")));
        assert!(matches!(build(&recipe), Err(Error::AnnihilatedSeed(_))));
        let bad = ParityStateRecipe::self_conjugate(2, part("3,1"), Branch::A, None);
        assert!(matches!(bad.validate(), Err(Error::InvalidRecipe(_))));
        let bad = ParityStateRecipe::conjugate_pair(2, part("3,1"), None);
        assert!(bad.validate().is_err());
        let bad = ParityStateRecipe::conjugate_pair(3, part("3,1"), Some(vec![Cyclotomic::zero(); 3]));
        assert!(bad.validate().is_err());
        assert!(default_recipe(5, 2).is_none());
    }

    #[test]
    fn odd_permutation_swaps_branch() {
        let psi = build(&ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, None)).unwrap();
        let pb = projector_element(&IrrepLabel::new(part("2,2"), Some(Branch::B)), GroupKind::Alternating).unwrap();
        for odd in ["(1,2)", "(1,2,3,4)", "(2,4)"] {
            let moved = psi.act(&Permutation::parse(odd, 4).unwrap()).unwrap();
            assert_eq!(moved.apply_algebra(&pb).unwrap(), moved);
        }
    }

    #[test]
    fn parity_check_matches_full_gram_block() {
        for psi in [
            build(&ParityStateRecipe::self_conjugate(2, part("2,1"), Branch::A, None)).unwrap(),
            exact_state(2, &[("0011", int(1)), ("0001", int(2))]),
        ] {
            let n = psi.n();
            let group = crate::perm::enumerate_group(n, GroupKind::Symmetric).unwrap();
            let orbit: Vec<_> = group.iter().map(|p| (p.is_even(), psi.act(p).unwrap())).collect();
            let norm = psi.norm_sq();
            let mut worst = 0.0f64;
            for (e1, a) in &orbit {
                for (e2, b) in &orbit {
                    if *e1 && !*e2 {
                        worst = worst.max(a.inner(b).unwrap().to_complex().norm() / norm);
                    }
                }
            }
            let r = verify_parity(&psi).unwrap();
            assert!((r.max_cross_overlap - worst).abs() < 1e-14);
        }
        let r = verify_parity(&exact_state(2, &[("000", int(1))])).unwrap();
        assert!(!r.valid && (r.max_cross_overlap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn irrep_basis_orthonormal_and_homomorphic() {
        let b = IrrepBasis::new(3, &part("3,1")).unwrap();
        assert_eq!(b.content, vec![0, 0, 0, 1]);
        for (i, u) in b.vectors.iter().enumerate() {
            for (j, w) in b.vectors.iter().enumerate() {
                let ip = u.inner(w).unwrap();
                let expect = if i == j { int(1) } else { int(0) };
                assert_eq!(ip, Scalar::Exact(expect));
            }
        }
        for sigma in crate::perm::enumerate_group(4, GroupKind::Symmetric).unwrap() {
            let d = b.matrix_of(&sigma).unwrap();
            for (k, u) in b.vectors.iter().enumerate() {
                let moved = u.act(&sigma).unwrap();
                for (l, w) in b.vectors.iter().enumerate() {
                    assert_eq!(w.inner(&moved).unwrap(), Scalar::Exact(d[l][k].clone()));
                }
            }
        }
    }

    #[test]
    fn first_basis_vector_of_three_one() {
        let b = IrrepBasis::new(3, &part("3,1")).unwrap();
        let golden = exact_state(
            3,
            &[("1000", int(1)), ("0100", int(1)), ("0010", int(1)), ("0001", int(-3))],
        );
        assert!(b.vectors[0].proportional(&golden).is_some());
    }

    #[test]
    fn conjugate_pair_state_detects_parity() {
        let basis = conjugate_pair_basis(4, 3, &part("3,1")).unwrap();
        assert!(basis.intertwiner_holds());
        for k in 0..3 {
            let mut phi = vec![Cyclotomic::zero(); 3];
            phi[k] = int(1);
            let psi = basis.combine(&phi, true, true).unwrap();
            assert!(verify_parity(&psi).unwrap().valid, "phi = e{}", k + 1);
            let half = basis.combine(&phi, true, false).unwrap();
            assert!(!verify_parity(&half).unwrap().valid);
        }
        // Equal Gram blocks for the two halves.
        for k in 0..3 {
            for l in 0..3 {
                let a = basis.basis_plus[k].inner(&basis.basis_plus[l]).unwrap();
                let b = basis.basis_minus[k].inner(&basis.basis_minus[l]).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn hypotheses_separate_only_above_threshold() {
        let m4 = build(&ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, None)).unwrap();
        let h = hypothesis_pair(&m4).unwrap();
        h.check_invariants(1e-10).unwrap();
        assert!(h.overlap_trace().abs() < 1e-12);
        let below = exact_state(2, &[("00011", int(1))]);
        let h = hypothesis_pair(&below).unwrap();
        h.check_invariants(1e-10).unwrap();
        assert!(h.frobenius_distance() < 1e-12);
        assert!(hypothesis_pair_bounded(&below, 16, 8).unwrap_err().is_bound());
    }

    #[test]
    fn simulation_is_reproducible() {
        let m4 = build(&ParityStateRecipe::self_conjugate(2, part("2,2"), Branch::A, None)).unwrap();
        let opts = SimulationOptions {
            trials: 200,
            seed: 7,
            ..Default::default()
        };
        let a = simulate(&m4, &opts).unwrap();
        assert_eq!(a.empirical_ps, Some(1.0));
        let b = simulate(&m4, &opts).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let empty = simulate(
            &m4,
            &SimulationOptions {
                trials: 0,
                ..opts.clone()
            },
        )
        .unwrap();
        assert!(empty.log.is_empty() && empty.empirical_ps.is_none());
        let bad = exact_state(2, &[("000", int(1))]);
        assert!(matches!(simulate(&bad, &opts), Err(Error::NotParityDetecting(_))));
    }

    #[test]
    fn split_automorphism_involution() {
        for (l, dim) in [("2,1", 2usize), ("2,2", 2), ("3,1,1", 6)] {
            let s = split_automorphism(&part(l)).unwrap();
            let sq = exact::mat_mul(&s.v, &s.v);
            assert_eq!(sq, exact::identity(dim), "{l}");
            let pa = s.projector(Branch::A);
            let tr: Cyclotomic = (0..dim).map(|i| pa[i][i].clone()).sum();
            assert_eq!(tr, Cyclotomic::from_integer(dim as i64 / 2));
        }
    }

    #[test]
    fn split_automorphism_reproduces_an_characters() {
        for l in ["2,1", "2,2", "3,1,1"] {
            let lambda = part(l);
            let s = split_automorphism(&lambda).unwrap();
            let t = table(GroupKind::Alternating, lambda.size()).unwrap();
            for branch in [Branch::A, Branch::B] {
                let irrep = IrrepLabel::new(lambda.clone(), Some(branch));
                for c in t.classes() {
                    let expect = t.value(&irrep, &c.label).unwrap();
                    assert_eq!(
                        &s.branch_trace(branch, &c.representative).unwrap(),
                        expect,
                        "{irrep} on {}",
                        c.label
                    );
                }
            }
        }
    }
}
