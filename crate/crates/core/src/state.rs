//! Sparse states on `(C^d)^{(x)n}` and the permutation action on tensor factors.
//!
//! A permutation moves the digit at position `j` to position `sigma(j)`, i.e.
//! `sigma |i_1 ... i_n> = |i_{sigma^-1(1)} ... i_{sigma^-1(n)}>`. Kets are packed base-`d`
//! integers with the leftmost digit most significant, so key order is text order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::characters::table;
use crate::cyclo::{CycloAccumulator, Cyclotomic};
use crate::error::{Error, Result};
use crate::group_algebra::GroupAlgebraElement;
use crate::linalg::CMatrix;
use crate::partition::{dim_sn, dim_sud, partitions_of, Partition};
use crate::perm::{enumerate_group, factorial, GroupKind, Permutation};

/// Tolerance for parallelism tests and orthogonality in float mode.
pub const FLOAT_TOL: f64 = 1e-10;

/// A computational basis ket `|i_1 ... i_n>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ket {
    digits: Vec<usize>,
}

impl Ket {
    pub fn new(digits: Vec<usize>, d: usize) -> Result<Self> {
        if let Some(bad) = digits.iter().find(|&&x| x >= d) {
            return Err(Error::Parse(format!("digit {bad} out of range for d = {d}")));
        }
        Ok(Ket { digits })
    }

    /// Parses `"0011"`; each character is one digit below `d` (so `d <= 10`).
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        let digits = s
            .trim()
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|v| v as usize)
                    .ok_or_else(|| Error::Parse(format!("bad ket digit '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if digits.is_empty() {
            return Err(Error::Parse("empty ket".into()));
        }
        Ket::new(digits, d)
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Sorted multiset of digits.
    pub fn content(&self) -> Vec<usize> {
        let mut c = self.digits.clone();
        c.sort_unstable();
        c
    }
}

impl fmt::Display for Ket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Serialize for Ket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ket::parse(&s, 10).map_err(serde::de::Error::custom)
    }
}

impl FromStr for Ket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ket::parse(s, 10)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A scalar in either mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Cyclotomic),
    Float(Complex64),
}

impl Scalar {
    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.embed(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn as_exact(&self) -> Option<&Cyclotomic> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Float(_) => None,
        }
    }

    /// Exact zero in exact mode, `|z| <= tol` in float mode.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Float(z) => z.norm() <= tol,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Float(z) => write!(f, "{z}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Amps {
    Exact(BTreeMap<u64, Cyclotomic>),
    Float(BTreeMap<u64, Complex64>),
}

/// Sparse amplitude map over kets of length `n` in alphabet `{0..d-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    d: usize,
    amps: Amps,
}

fn check_shape(n: usize, d: usize) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::ShapeMismatch("n and d must be positive".into()));
    }
    if (d as f64).ln() * n as f64 >= 63.0 * std::f64::consts::LN_2 {
        return Err(Error::BoundExceeded {
            what: "Hilbert space dimension (log2)",
            value: ((d as f64).log2() * n as f64).ceil() as usize,
            bound: 63,
        });
    }
    Ok(())
}

/// Digit/index conversion for one `(n, d)`.
#[derive(Clone, Copy, Debug)]
struct Codec {
    n: usize,
    d: u64,
}

impl Codec {
    fn encode(&self, digits: &[usize]) -> u64 {
        digits.iter().fold(0u64, |acc, &x| acc * self.d + x as u64)
    }

    fn decode_into(&self, mut key: u64, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = (key % self.d) as usize;
            key /= self.d;
        }
    }

    fn decode(&self, key: u64) -> Vec<usize> {
        let mut v = vec![0; self.n];
        self.decode_into(key, &mut v);
        v
    }

    /// Key of `sigma |key>`; `targets[j]` is the 0-based destination of position `j`.
    fn permute(&self, key: u64, targets: &[usize], buf: &mut [usize], out: &mut [usize]) -> u64 {
        self.decode_into(key, buf);
        for (j, &t) in targets.iter().enumerate() {
            out[t] = buf[j];
        }
        self.encode(out)
    }
}

fn targets_of(p: &Permutation) -> Vec<usize> {
    (1..=p.degree()).map(|j| p.apply(j) - 1).collect()
}

impl StateVector {
    pub fn zero(n: usize, d: usize, mode: Mode) -> Result<Self> {
        check_shape(n, d)?;
        let amps = match mode {
            Mode::Exact => Amps::Exact(BTreeMap::new()),
            Mode::Float => Amps::Float(BTreeMap::new()),
        };
        Ok(StateVector { n, d, amps })
    }

    /// Exact basis state `|ket>`.
    pub fn basis(d: usize, ket: &Ket) -> Result<Self> {
        Self::from_exact_terms(ket.len(), d, [(ket.clone(), Cyclotomic::one())])
    }

    pub fn from_exact_terms(n: usize, d: usize, terms: impl IntoIterator<Item = (Ket, Cyclotomic)>) -> Result<Self> {
        check_shape(n, d)?;
        let codec = Codec { n, d: d as u64 };
        let mut acc: BTreeMap<u64, CycloAccumulator> = BTreeMap::new();
        for (k, c) in terms {
            Self::check_ket(n, d, &k)?;
            acc.entry(codec.encode(k.digits())).or_default().add(&c);
        }
        let map = acc
            .into_iter()
            .map(|(k, a)| (k, a.finish()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Ok(StateVector {
            n,
            d,
            amps: Amps::Exact(map),
        })
    }

    pub fn from_float_terms(n: usize, d: usize, terms: impl IntoIterator<Item = (Ket, Complex64)>) -> Result<Self> {
        check_shape(n, d)?;
        let codec = Codec { n, d: d as u64 };
        let mut map: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (k, z) in terms {
            Self::check_ket(n, d, &k)?;
            *map.entry(codec.encode(k.digits())).or_default() += z;
        }
        map.retain(|_, z| !z.is_zero());
        Ok(StateVector {
            n,
            d,
            amps: Amps::Float(map),
        })
    }

    /// Float state from a dense vector of length `d^n`.
    pub fn from_dense(n: usize, d: usize, v: &[Complex64]) -> Result<Self> {
        check_shape(n, d)?;
        if v.len() as u64 != (d as u64).pow(n as u32) {
            return Err(Error::ShapeMismatch(format!(
                "dense vector of length {} for d^n = {}^{n}",
                v.len(),
                d
            )));
        }
        let map = v
            .iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .map(|(i, z)| (i as u64, *z))
            .collect();
        Ok(StateVector {
            n,
            d,
            amps: Amps::Float(map),
        })
    }

    fn check_ket(n: usize, d: usize, k: &Ket) -> Result<()> {
        if k.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "ket {k} has length {}, expected {n}",
                k.len()
            )));
        }
        if k.digits().iter().any(|&x| x >= d) {
            return Err(Error::ShapeMismatch(format!("ket {k} has a digit >= {d}")));
        }
        Ok(())
    }

    fn codec(&self) -> Codec {
        Codec {
            n: self.n,
            d: self.d as u64,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mode(&self) -> Mode {
        match self.amps {
            Amps::Exact(_) => Mode::Exact,
            Amps::Float(_) => Mode::Float,
        }
    }

    pub fn len(&self) -> usize {
        match &self.amps {
            Amps::Exact(m) => m.len(),
            Amps::Float(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn dimension(&self) -> u64 {
        (self.d as u64).pow(self.n as u32)
    }

    pub fn ket_of(&self, key: u64) -> Ket {
        Ket {
            digits: self.codec().decode(key),
        }
    }

    pub fn amplitude(&self, ket: &Ket) -> Scalar {
        let key = self.codec().encode(ket.digits());
        match &self.amps {
            Amps::Exact(m) => Scalar::Exact(m.get(&key).cloned().unwrap_or_default()),
            Amps::Float(m) => Scalar::Float(m.get(&key).copied().unwrap_or_default()),
        }
    }

    /// `(ket, amplitude)` pairs in ket order; float states yield their complex values.
    pub fn iter(&self) -> Box<dyn Iterator<Item = (Ket, Scalar)> + '_> {
        match &self.amps {
            Amps::Exact(m) => Box::new(m.iter().map(|(&k, c)| (self.ket_of(k), Scalar::Exact(c.clone())))),
            Amps::Float(m) => Box::new(m.iter().map(|(&k, z)| (self.ket_of(k), Scalar::Float(*z)))),
        }
    }

    pub fn exact_terms(&self) -> Option<&BTreeMap<u64, Cyclotomic>> {
        match &self.amps {
            Amps::Exact(m) => Some(m),
            Amps::Float(_) => None,
        }
    }

    /// Float copy (embedding exact amplitudes).
    pub fn to_float(&self) -> StateVector {
        let map = match &self.amps {
            Amps::Exact(m) => m.iter().map(|(&k, c)| (k, c.embed())).collect(),
            Amps::Float(m) => m.clone(),
        };
        StateVector {
            n: self.n,
            d: self.d,
            amps: Amps::Float(map),
        }
    }

    /// Dense float vector of length `d^n`, bounded by `max_dim`.
    pub fn to_dense(&self, max_dim: usize) -> Result<Vec<Complex64>> {
        let dim = self.dimension();
        if dim > max_dim as u64 {
            return Err(Error::BoundExceeded {
                what: "dense dimension d^n",
                value: dim as usize,
                bound: max_dim,
            });
        }
        let mut v = vec![Complex64::zero(); dim as usize];
        for (k, z) in self.float_map().iter() {
            v[*k as usize] = *z;
        }
        Ok(v)
    }

    fn float_map(&self) -> std::borrow::Cow<'_, BTreeMap<u64, Complex64>> {
        match &self.amps {
            Amps::Float(m) => std::borrow::Cow::Borrowed(m),
            Amps::Exact(m) => std::borrow::Cow::Owned(m.iter().map(|(&k, c)| (k, c.embed())).collect()),
        }
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.n != other.n || self.d != other.d || self.mode() != other.mode() {
            return Err(Error::ShapeMismatch(format!(
                "(n={}, d={}, {:?}) vs (n={}, d={}, {:?})",
                self.n,
                self.d,
                self.mode(),
                other.n,
                other.d,
                other.mode()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        self.check_compatible(other)?;
        let amps = match (&self.amps, &other.amps) {
            (Amps::Exact(a), Amps::Exact(b)) => {
                let mut out = a.clone();
                for (k, c) in b {
                    let v = out.get(k).map_or_else(|| c.clone(), |x| x + c);
                    if v.is_zero() {
                        out.remove(k);
                    } else {
                        out.insert(*k, v);
                    }
                }
                Amps::Exact(out)
            }
            (Amps::Float(a), Amps::Float(b)) => {
                let mut out = a.clone();
                for (k, z) in b {
                    *out.entry(*k).or_default() += z;
                }
                out.retain(|_, z| !z.is_zero());
                Amps::Float(out)
            }
            _ => unreachable!("modes checked"),
        };
        Ok(StateVector {
            n: self.n,
            d: self.d,
            amps,
        })
    }

    pub fn scale_exact(&self, c: &Cyclotomic) -> StateVector {
        let amps = match &self.amps {
            Amps::Exact(m) if c.is_zero() => Amps::Exact(BTreeMap::new()),
            Amps::Exact(m) => Amps::Exact(m.iter().map(|(&k, x)| (k, x * c)).collect()),
            Amps::Float(m) => {
                let z = c.embed();
                Amps::Float(
                    m.iter()
                        .map(|(&k, x)| (k, x * z))
                        .filter(|(_, x)| !x.is_zero())
                        .collect(),
                )
            }
        };
        StateVector {
            n: self.n,
            d: self.d,
            amps,
        }
    }

    /// Scales a float state (exact states are converted first).
    pub fn scale_float(&self, z: Complex64) -> StateVector {
        let m = self.float_map();
        StateVector {
            n: self.n,
            d: self.d,
            amps: Amps::Float(
                m.iter()
                    .map(|(&k, x)| (k, x * z))
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            ),
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Scalar> {
        self.check_compatible(other)?;
        Ok(match (&self.amps, &other.amps) {
            (Amps::Exact(a), Amps::Exact(b)) => {
                let (small, large, swap) = if a.len() <= b.len() {
                    (a, b, false)
                } else {
                    (b, a, true)
                };
                let mut acc = CycloAccumulator::new();
                for (k, x) in small {
                    if let Some(y) = large.get(k) {
                        let (u, v) = if swap { (y, x) } else { (x, y) };
                        acc.add_product(&u.conj(), v);
                    }
                }
                Scalar::Exact(acc.finish())
            }
            (Amps::Float(a), Amps::Float(b)) => Scalar::Float(float_inner(a, b)),
            _ => unreachable!("modes checked"),
        })
    }

    /// `<self|self>` as a float.
    pub fn norm_sq(&self) -> f64 {
        match &self.amps {
            Amps::Exact(m) => m.values().map(|c| c.embed().norm_sqr()).sum(),
            Amps::Float(m) => m.values().map(|z| z.norm_sqr()).sum(),
        }
    }

    /// Float copy scaled to unit norm.
    pub fn normalized_float(&self) -> Result<StateVector> {
        let nrm = self.norm_sq().sqrt();
        if self.is_empty() || nrm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(self.scale_float(Complex64::new(1.0 / nrm, 0.0)))
    }

    /// Exact unit-norm copy; requires a rational squared norm.
    pub fn normalized_exact(&self) -> Result<StateVector> {
        if self.mode() != Mode::Exact {
            return Err(Error::ShapeMismatch("exact normalization of a float state".into()));
        }
        let Scalar::Exact(nsq) = self.inner(self)? else {
            unreachable!()
        };
        if nsq.is_zero() {
            return Err(Error::ZeroState);
        }
        let q = nsq
            .to_rational()
            .ok_or_else(|| Error::ShapeMismatch("squared norm is not rational".into()))?;
        let inv = Cyclotomic::sqrt_of_rational(q)?.inv()?;
        Ok(self.scale_exact(&inv))
    }

    /// `sigma |psi>`.
    pub fn act(&self, sigma: &Permutation) -> Result<StateVector> {
        if sigma.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: sigma.degree(),
                right: self.n,
            });
        }
        let codec = self.codec();
        let targets = targets_of(sigma);
        let mut buf = vec![0; self.n];
        let mut out = vec![0; self.n];
        let amps = match &self.amps {
            Amps::Exact(m) => Amps::Exact(
                m.iter()
                    .map(|(&k, c)| (codec.permute(k, &targets, &mut buf, &mut out), c.clone()))
                    .collect(),
            ),
            Amps::Float(m) => Amps::Float(
                m.iter()
                    .map(|(&k, z)| (codec.permute(k, &targets, &mut buf, &mut out), *z))
                    .collect(),
            ),
        };
        Ok(StateVector {
            n: self.n,
            d: self.d,
            amps,
        })
    }

    /// `sum_sigma a_sigma sigma |psi>`.
    pub fn apply_algebra(&self, a: &GroupAlgebraElement) -> Result<StateVector> {
        if a.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: a.degree(),
                right: self.n,
            });
        }
        let codec = self.codec();
        let terms: Vec<(&Permutation, &Cyclotomic)> = a.terms().collect();
        let chunk = terms.len().div_ceil(rayon::current_num_threads().max(1)).max(8);
        let amps = match &self.amps {
            Amps::Exact(m) => {
                let parts: Vec<HashMap<u64, CycloAccumulator>> = terms
                    .par_chunks(chunk)
                    .map(|block| {
                        let mut acc: HashMap<u64, CycloAccumulator> = HashMap::new();
                        let mut buf = vec![0; self.n];
                        let mut out = vec![0; self.n];
                        for (p, coeff) in block {
                            let targets = targets_of(p);
                            for (&k, c) in m {
                                let key = codec.permute(k, &targets, &mut buf, &mut out);
                                acc.entry(key).or_default().add_product(coeff, c);
                            }
                        }
                        acc
                    })
                    .collect();
                let mut merged: BTreeMap<u64, CycloAccumulator> = BTreeMap::new();
                for part in parts {
                    for (k, a) in part {
                        merged.entry(k).or_default().add(&a.finish());
                    }
                }
                Amps::Exact(
                    merged
                        .into_iter()
                        .map(|(k, a)| (k, a.finish()))
                        .filter(|(_, c)| !c.is_zero())
                        .collect(),
                )
            }
            Amps::Float(m) => {
                let parts: Vec<BTreeMap<u64, Complex64>> = terms
                    .par_chunks(chunk)
                    .map(|block| {
                        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
                        let mut buf = vec![0; self.n];
                        let mut out = vec![0; self.n];
                        for (p, coeff) in block {
                            let targets = targets_of(p);
                            let w = coeff.embed();
                            for (&k, z) in m {
                                let key = codec.permute(k, &targets, &mut buf, &mut out);
                                *acc.entry(key).or_default() += w * z;
                            }
                        }
                        acc
                    })
                    .collect();
                // Chunks are merged in a fixed order, so the result is scheduling-independent.
                let mut merged: BTreeMap<u64, Complex64> = BTreeMap::new();
                for part in parts {
                    for (k, z) in part {
                        *merged.entry(k).or_default() += z;
                    }
                }
                merged.retain(|_, z| !z.is_zero());
                Amps::Float(merged)
            }
        };
        Ok(StateVector {
            n: self.n,
            d: self.d,
            amps,
        })
    }

    /// `c` with `self = c * other`, if the two states are parallel.
    pub fn proportional(&self, other: &StateVector) -> Option<Scalar> {
        self.check_compatible(other).ok()?;
        match (&self.amps, &other.amps) {
            (Amps::Exact(u), Amps::Exact(v)) => {
                if u.len() != v.len() || !u.keys().eq(v.keys()) {
                    return None;
                }
                let (k, y) = v.iter().next()?;
                let c = u[k].checked_div(y).ok()?;
                v.iter().all(|(k, y)| u[k] == &c * y).then_some(Scalar::Exact(c))
            }
            (Amps::Float(u), Amps::Float(v)) => {
                let uu = float_inner(u, u).re;
                let vv = float_inner(v, v).re;
                if uu == 0.0 || vv == 0.0 {
                    return None;
                }
                let vu = float_inner(v, u);
                let cos = vu.norm() / (uu * vv).sqrt();
                ((1.0 - cos).abs() <= FLOAT_TOL).then_some(Scalar::Float(vu / vv))
            }
            _ => None,
        }
    }

    /// `[sigma |psi> for sigma in perms]`.
    pub fn orbit(&self, perms: &[Permutation]) -> Result<Vec<StateVector>> {
        perms.iter().map(|p| self.act(p)).collect()
    }
}

fn float_inner(a: &BTreeMap<u64, Complex64>, b: &BTreeMap<u64, Complex64>) -> Complex64 {
    if a.len() <= b.len() {
        a.iter().filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y)).sum()
    } else {
        b.iter().filter_map(|(k, y)| a.get(k).map(|x| x.conj() * y)).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n: usize,
    d: usize,
    mode: Mode,
    amplitudes: Vec<AmpJson>,
}

#[derive(Serialize, Deserialize)]
struct AmpJson {
    ket: String,
    value: serde_json::Value,
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let amplitudes = self
            .iter()
            .map(|(k, v)| {
                let value = match v {
                    Scalar::Exact(c) => serde_json::to_value(&c).map_err(S::Error::custom)?,
                    Scalar::Float(z) => serde_json::json!([z.re, z.im]),
                };
                Ok(AmpJson {
                    ket: k.to_string(),
                    value,
                })
            })
            .collect::<std::result::Result<Vec<_>, S::Error>>()?;
        StateJson {
            n: self.n,
            d: self.d,
            mode: self.mode(),
            amplitudes,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = StateJson::deserialize(d)?;
        let kets = raw
            .amplitudes
            .iter()
            .map(|a| Ket::parse(&a.ket, raw.d).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        match raw.mode {
            Mode::Exact => {
                let vals = raw
                    .amplitudes
                    .iter()
                    .map(|a| serde_json::from_value::<Cyclotomic>(a.value.clone()).map_err(D::Error::custom))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                StateVector::from_exact_terms(raw.n, raw.d, kets.into_iter().zip(vals)).map_err(D::Error::custom)
            }
            Mode::Float => {
                let vals = raw
                    .amplitudes
                    .iter()
                    .map(|a| {
                        let [re, im]: [f64; 2] = serde_json::from_value(a.value.clone()).map_err(D::Error::custom)?;
                        Ok(Complex64::new(re, im))
                    })
                    .collect::<std::result::Result<Vec<_>, D::Error>>()?;
                StateVector::from_float_terms(raw.n, raw.d, kets.into_iter().zip(vals)).map_err(D::Error::custom)
            }
        }
    }
}

/// Dense index map `I -> sigma(I)` on the computational basis of `(C^d)^n`.
pub fn permutation_index_map(sigma: &Permutation, d: usize, max_dim: usize) -> Result<Vec<usize>> {
    let n = sigma.degree();
    check_shape(n, d)?;
    let dim = (d as u64).pow(n as u32);
    if dim > max_dim as u64 {
        return Err(Error::BoundExceeded {
            what: "dense dimension d^n",
            value: dim as usize,
            bound: max_dim,
        });
    }
    let codec = Codec { n, d: d as u64 };
    let targets = targets_of(sigma);
    let mut buf = vec![0; n];
    let mut out = vec![0; n];
    Ok((0..dim)
        .map(|k| codec.permute(k, &targets, &mut buf, &mut out) as usize)
        .collect())
}

/// Dense matrix of `sum_sigma a_sigma sigma` on `(C^d)^n`.
pub fn dense_operator(a: &GroupAlgebraElement, d: usize, max_dim: usize) -> Result<CMatrix> {
    let n = a.degree();
    check_shape(n, d)?;
    let dim = (d as u64).pow(n as u32);
    if dim > max_dim as u64 {
        return Err(Error::BoundExceeded {
            what: "dense dimension d^n",
            value: dim as usize,
            bound: max_dim,
        });
    }
    let dim = dim as usize;
    let mut m = CMatrix::zeros(dim, dim);
    for (p, c) in a.terms() {
        let z = c.embed();
        for (i, j) in permutation_index_map(p, d, max_dim)?.into_iter().enumerate() {
            m.add_at(j, i, z);
        }
    }
    Ok(m)
}

/// One line of the Schur-Weyl audit.
#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub lambda: Partition,
    pub d_lambda: u64,
    pub m_lambda: u64,
    pub product: u64,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub n: usize,
    pub d: usize,
    pub total: u64,
    pub entries: Vec<AuditEntry>,
    pub balance_ok: bool,
    pub ranks_ok: bool,
    pub balance_line: String,
}

pub const AUDIT_MAX_N: usize = 6;
pub const AUDIT_MAX_D: usize = 4;
const RANK_TOL: f64 = 1e-8;

/// Dimension bookkeeping `sum d_lambda m_lambda = d^n`, cross-checked by the numerical rank of
/// each isotypic projector on the computational basis.
pub fn schur_weyl_audit(n: usize, d: usize) -> Result<AuditReport> {
    if n == 0 || d == 0 {
        return Err(Error::ShapeMismatch("n and d must be positive".into()));
    }
    if n > AUDIT_MAX_N {
        return Err(Error::BoundExceeded {
            what: "audit degree n",
            value: n,
            bound: AUDIT_MAX_N,
        });
    }
    if d > AUDIT_MAX_D {
        return Err(Error::BoundExceeded {
            what: "audit local dimension d",
            value: d,
            bound: AUDIT_MAX_D,
        });
    }
    let lambdas = partitions_of(n, d);
    let ranks = projector_ranks(n, d, &lambdas)?;
    let entries: Vec<AuditEntry> = lambdas
        .iter()
        .zip(ranks)
        .map(|(l, rank)| {
            let d_lambda = dim_sn(l);
            let m_lambda = dim_sud(l, d);
            AuditEntry {
                lambda: l.clone(),
                d_lambda,
                m_lambda,
                product: d_lambda * m_lambda,
                rank,
            }
        })
        .collect();
    let total = (d as u64).pow(n as u32);
    let sum: u64 = entries.iter().map(|e| e.product).sum();
    let terms: Vec<String> = entries.iter().map(|e| e.product.to_string()).collect();
    Ok(AuditReport {
        n,
        d,
        total,
        balance_ok: sum == total,
        ranks_ok: entries.iter().all(|e| e.rank as u64 == e.product),
        balance_line: format!("{total} = {}", terms.join("+")),
        entries,
    })
}

/// Rank of each `P_lambda` on `(C^d)^n`, summed over weight sectors. Sectors whose weights are
/// permutations of one another have equal ranks, so each multiplicity pattern is solved once.
fn projector_ranks(n: usize, d: usize, lambdas: &[Partition]) -> Result<Vec<usize>> {
    let t = table(GroupKind::Symmetric, n)?;
    let group = enumerate_group(n, GroupKind::Symmetric)?;
    let class_of: Vec<usize> = group.iter().map(|p| t.class_of(p)).collect::<Result<_>>()?;
    let coeffs: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|l| {
            let i = t.irrep_index(&crate::characters::IrrepLabel::unsplit(l.clone()))?;
            let scale = dim_sn(l) as f64 / factorial(n) as f64;
            Ok(t.values()[i].iter().map(|v| scale * v.embed().re).collect())
        })
        .collect::<Result<_>>()?;

    let mut memo: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut totals = vec![0usize; lambdas.len()];
    for weight in compositions(n, d) {
        let mut pattern: Vec<usize> = weight.iter().copied().filter(|&w| w > 0).collect();
        pattern.sort_unstable_by(|a, b| b.cmp(a));
        let ranks = memo
            .entry(pattern.clone())
            .or_insert_with(|| sector_ranks(n, &pattern, &group, &class_of, t.classes().len(), &coeffs));
        for (tot, r) in totals.iter_mut().zip(ranks.iter()) {
            *tot += r;
        }
    }
    Ok(totals)
}

fn sector_ranks(
    n: usize,
    pattern: &[usize],
    group: &[Permutation],
    class_of: &[usize],
    n_classes: usize,
    coeffs: &[Vec<f64>],
) -> Vec<usize> {
    // All arrangements of the multiset with `pattern[i]` copies of letter i.
    let mut letters: Vec<usize> = pattern
        .iter()
        .enumerate()
        .flat_map(|(i, &m)| std::iter::repeat_n(i, m))
        .collect();
    let mut kets = Vec::new();
    loop {
        kets.push(letters.clone());
        if !next_arrangement(&mut letters) {
            break;
        }
    }
    let index: HashMap<Vec<usize>, usize> = kets.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let m = kets.len();
    // Class-sum matrices restricted to this sector.
    let mut class_sums = vec![vec![0.0f64; m * m]; n_classes];
    let mut out = vec![0; n];
    for (p, &c) in group.iter().zip(class_of) {
        let targets = targets_of(p);
        for (col, k) in kets.iter().enumerate() {
            for (j, &t) in targets.iter().enumerate() {
                out[t] = k[j];
            }
            let row = index[&out];
            class_sums[c][row * m + col] += 1.0;
        }
    }
    coeffs
        .iter()
        .map(|cs| {
            let mut mat = vec![0.0f64; m * m];
            for (k, &w) in cs.iter().enumerate() {
                if w != 0.0 {
                    for (x, y) in mat.iter_mut().zip(&class_sums[k]) {
                        *x += w * y;
                    }
                }
            }
            numerical_rank(&mut mat, m, RANK_TOL)
        })
        .collect()
}

/// Next multiset permutation in lexicographic order; `false` after the last one.
pub(crate) fn next_arrangement(v: &mut [usize]) -> bool {
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

/// Weight vectors of length `d` summing to `n`.
fn compositions(n: usize, d: usize) -> Vec<Vec<usize>> {
    if d == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, d - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Rank of a real square matrix (row-major) by Gaussian elimination with partial pivoting.
pub(crate) fn numerical_rank(a: &mut [f64], m: usize, tol: f64) -> usize {
    let mut rank = 0;
    for col in 0..m {
        if rank == m {
            break;
        }
        let (p, best) = (rank..m)
            .map(|r| (r, a[r * m + col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        for c in 0..m {
            a.swap(rank * m + c, p * m + c);
        }
        let piv = a[rank * m + col];
        for r in rank + 1..m {
            let f = a[r * m + col] / piv;
            if f != 0.0 {
                for c in col..m {
                    a[r * m + c] -= f * a[rank * m + c];
                }
            }
        }
        rank += 1;
    }
    rank
}
