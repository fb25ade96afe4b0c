//! Geometric measure of entanglement of a subspace, `E = 1 - max <phi|P|phi>` over product
//! states, estimated by see-saw (one site at a time, each step an exact top-eigenvector solve).

use num_complex::Complex64;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{Branch, IrrepLabel};
use crate::error::{Error, Result};
use crate::group_algebra::projector_element;
use crate::linalg::{dot, hermitian_eigen, norm, pivoted_cholesky, CMatrix};
use crate::parity::DEFAULT_DENSE_BOUND;
use crate::partition::Partition;
use crate::perm::GroupKind;
use crate::state::{dense_operator, StateVector};

const UNIT_TOL: f64 = 1e-12;

/// `|phi_1> (x) ... (x) |phi_n>` with unit local vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductState {
    locals: Vec<Vec<Complex64>>,
}

impl ProductState {
    pub fn new(locals: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = locals.first().map_or(0, |v| v.len());
        if locals.is_empty() || d == 0 || locals.iter().any(|v| v.len() != d) {
            return Err(Error::ShapeMismatch(
                "product state needs n >= 1 local vectors of equal length".into(),
            ));
        }
        if let Some(v) = locals.iter().find(|v| (norm(v) - 1.0).abs() > UNIT_TOL) {
            return Err(Error::ShapeMismatch(format!("local vector has norm {}", norm(v))));
        }
        Ok(ProductState { locals })
    }

    /// Normalizes each local vector.
    pub fn from_unnormalized(locals: Vec<Vec<Complex64>>) -> Result<Self> {
        let locals = locals
            .into_iter()
            .map(|v| {
                let r = norm(&v);
                if r == 0.0 {
                    return Err(Error::ZeroState);
                }
                Ok(v.into_iter().map(|z| z / r).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(locals)
    }

    /// `|i_1 ... i_n>`.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        let locals = digits
            .iter()
            .map(|&i| {
                if i >= d {
                    return Err(Error::ShapeMismatch(format!("digit {i} out of range for d = {d}")));
                }
                let mut v = vec![Complex64::zero(); d];
                v[i] = Complex64::new(1.0, 0.0);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(locals)
    }

    fn random(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Self {
        let locals = (0..n)
            .map(|_| {
                let v: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                    .collect();
                let r = norm(&v);
                v.into_iter().map(|z| z / r).collect()
            })
            .collect();
        ProductState { locals }
    }

    pub fn n(&self) -> usize {
        self.locals.len()
    }

    pub fn d(&self) -> usize {
        self.locals[0].len()
    }

    pub fn locals(&self) -> &[Vec<Complex64>] {
        &self.locals
    }

    /// Dense vector with the first site most significant.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for v in &self.locals {
            out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        out
    }

    pub fn to_state(&self) -> Result<StateVector> {
        StateVector::from_dense(self.n(), self.d(), &self.to_dense())
    }

    /// `[[re, im], ...]` over the concatenated local vectors.
    pub fn flat_pairs(&self) -> Vec<[f64; 2]> {
        self.locals.iter().flatten().map(|z| [z.re, z.im]).collect()
    }

    /// `prod_{j != site} conj(phi_j(I_j))` for every basis index `I` (site 0-based).
    fn conj_weights_except(&self, site: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for (j, v) in self.locals.iter().enumerate() {
            if j == site {
                out = out.iter().flat_map(|a| std::iter::repeat_n(*a, v.len())).collect();
            } else {
                out = out.iter().flat_map(|a| v.iter().map(move |b| a * b.conj())).collect();
            }
        }
        out
    }
}

/// `P = sum_r |f_r><f_r|` on `(C^d)^n`.
#[derive(Clone, Debug)]
pub struct LowRankOperator {
    pub n: usize,
    pub d: usize,
    pub factors: Vec<Vec<Complex64>>,
}

impl LowRankOperator {
    pub fn from_dense(p: &CMatrix, n: usize, d: usize) -> Result<Self> {
        check_dims(p, n, d)?;
        if p.hermiticity_defect() > 1e-12 {
            return Err(Error::ShapeMismatch("operator is not Hermitian".into()));
        }
        let factors = pivoted_cholesky(p, 1e-12)?;
        Ok(LowRankOperator { n, d, factors })
    }

    /// `|psi><psi|` for the normalized state.
    pub fn from_state(psi: &StateVector, max_dim: usize) -> Result<Self> {
        let unit = psi.normalized_float()?;
        Ok(LowRankOperator {
            n: psi.n(),
            d: psi.d(),
            factors: vec![unit.to_dense(max_dim)?],
        })
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn expectation(&self, phi: &ProductState) -> f64 {
        let v = phi.to_dense();
        self.factors.iter().map(|f| dot(f, &v).norm_sqr()).sum()
    }

    /// Reduced operator at a 0-based site.
    fn reduced(&self, phi: &ProductState, site: usize) -> CMatrix {
        let d = self.d;
        let w = phi.conj_weights_except(site);
        let stride = d.pow((self.n - 1 - site) as u32);
        let mut m = CMatrix::zeros(d, d);
        for f in &self.factors {
            let mut g = vec![Complex64::zero(); d];
            for (i, (fi, wi)) in f.iter().zip(&w).enumerate() {
                g[(i / stride) % d] += wi * fi;
            }
            for a in 0..d {
                for b in 0..d {
                    m.add_at(a, b, g[a] * g[b].conj());
                }
            }
        }
        m
    }
}

fn check_dims(p: &CMatrix, n: usize, d: usize) -> Result<()> {
    let dim = (d as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
    if !p.is_square() || p.rows() as u64 != dim {
        return Err(Error::ShapeMismatch(format!(
            "operator is {}x{}, expected d^n = {dim}",
            p.rows(),
            p.cols()
        )));
    }
    Ok(())
}

/// `M` with `<x|M|x> = <phi_1..x..phi_n|P|phi_1..x..phi_n>`, by direct contraction of the dense
/// operator. `site` is 1-based.
pub fn reduced_operator(p: &CMatrix, phi: &ProductState, site: usize) -> Result<CMatrix> {
    let (n, d) = (phi.n(), phi.d());
    check_dims(p, n, d)?;
    if site == 0 || site > n {
        return Err(Error::ShapeMismatch(format!("site {site} outside 1..{n}")));
    }
    let s = site - 1;
    let w = phi.conj_weights_except(s);
    let stride = d.pow((n - 1 - s) as u32);
    let mut m = CMatrix::zeros(d, d);
    for i in 0..p.rows() {
        let a = (i / stride) % d;
        for j in 0..p.cols() {
            let pij = p.get(i, j);
            if pij.is_zero() {
                continue;
            }
            let b = (j / stride) % d;
            m.add_at(a, b, w[i] * pij * w[j].conj());
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
    /// Pin site 1 to `|0>` and never update it.
    pub fix_first_site: bool,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            restarts: 64,
            max_sweeps: 500,
            tol: 1e-12,
            seed: 0,
            fix_first_site: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmeResult {
    pub max_overlap: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub witness: ProductState,
    pub restarts_used: usize,
    pub best_restart: usize,
    /// Sweeps of the best restart.
    pub sweeps: usize,
    pub converged: bool,
    /// Overlap of the best restart: the start value, then one entry per sweep.
    pub history: Vec<f64>,
    /// Overlap after every single-site update, for every restart.
    pub restart_histories: Vec<Vec<f64>>,
}

impl GmeResult {
    /// Every restart's per-update history is nondecreasing up to `slack`.
    pub fn histories_monotone(&self, slack: f64) -> bool {
        self.restart_histories
            .iter()
            .all(|h| h.windows(2).all(|w| w[1] >= w[0] - slack))
    }
}

struct RestartOutcome {
    overlap: f64,
    phi: ProductState,
    sweeps: usize,
    converged: bool,
    per_sweep: Vec<f64>,
    per_update: Vec<f64>,
}

fn run_restart(op: &LowRankOperator, opts: &SeesawOptions, restart: usize) -> Result<RestartOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
    let mut phi = ProductState::random(op.n, op.d, &mut rng);
    let first = if opts.fix_first_site {
        phi.locals[0] = ProductState::basis(op.d, &[0])?.locals.remove(0);
        1
    } else {
        0
    };
    let mut current = op.expectation(&phi);
    let mut per_sweep = vec![current];
    let mut per_update = vec![current];
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < opts.max_sweeps {
        sweeps += 1;
        for site in first..op.n {
            let m = op.reduced(&phi, site);
            let eig = hermitian_eigen(&m)?;
            phi.locals[site] = eig.vector(0);
            current = eig.values[0];
            per_update.push(current);
        }
        let prev = *per_sweep.last().expect("nonempty");
        per_sweep.push(current);
        if current - prev < opts.tol {
            converged = true;
            break;
        }
    }
    // Re-evaluate the objective directly rather than trusting the last eigenvalue.
    let overlap = op.expectation(&phi);
    Ok(RestartOutcome {
        overlap,
        phi,
        sweeps,
        converged,
        per_sweep,
        per_update,
    })
}

/// See-saw maximization of `<phi|P|phi>` for a PSD operator with `||P|| <= 1`.
pub fn seesaw(p: &CMatrix, n: usize, d: usize, opts: &SeesawOptions) -> Result<GmeResult> {
    seesaw_low_rank(&LowRankOperator::from_dense(p, n, d)?, opts)
}

pub fn seesaw_low_rank(op: &LowRankOperator, opts: &SeesawOptions) -> Result<GmeResult> {
    if opts.restarts == 0 {
        return Err(Error::ShapeMismatch("at least one restart is required".into()));
    }
    let outcomes: Vec<RestartOutcome> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| run_restart(op, opts, r))
        .collect::<Result<_>>()?;
    // Maximum, earliest restart on ties: independent of scheduling.
    let best = outcomes
        .iter()
        .enumerate()
        .fold(0, |b, (i, o)| if o.overlap > outcomes[b].overlap { i } else { b });
    let restart_histories = outcomes.iter().map(|o| o.per_update.clone()).collect();
    let o = &outcomes[best];
    Ok(GmeResult {
        max_overlap: o.overlap,
        e: 1.0 - o.overlap,
        witness: o.phi.clone(),
        restarts_used: opts.restarts,
        best_restart: best,
        sweeps: o.sweeps,
        converged: o.converged,
        history: o.per_sweep.clone(),
        restart_histories,
    })
}

/// `E(psi) = 1 - max |<phi|psi>|^2`.
pub fn gme_of_pure_state(psi: &StateVector, opts: &SeesawOptions) -> Result<GmeResult> {
    seesaw_low_rank(&LowRankOperator::from_state(psi, DEFAULT_DENSE_BOUND)?, opts)
}

/// `P |phi*> / ||P |phi*>||` as a float state.
pub fn extremal_witness_state(p: &CMatrix, phi_star: &ProductState) -> Result<StateVector> {
    check_dims(p, phi_star.n(), phi_star.d())?;
    let v = p.mat_vec(&phi_star.to_dense())?;
    let r = norm(&v);
    if r < 1e-12 {
        return Err(Error::ZeroState);
    }
    let v: Vec<Complex64> = v.into_iter().map(|z| z / r).collect();
    StateVector::from_dense(phi_star.n(), phi_star.d(), &v)
}

/// Dense `P_{lambda, branch}` of `A_n` (or `P_lambda` of `S_n` when `branch` is `None`).
pub fn parity_projector(lambda: &Partition, branch: Option<Branch>, d: usize) -> Result<CMatrix> {
    let group = if branch.is_some() {
        GroupKind::Alternating
    } else {
        GroupKind::Symmetric
    };
    let a = projector_element(&IrrepLabel::new(lambda.clone(), branch), group)?;
    dense_operator(&a, d, DEFAULT_DENSE_BOUND)
}
