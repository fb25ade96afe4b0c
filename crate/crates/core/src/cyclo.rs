//! Exact arithmetic in cyclotomic fields `Q(zeta_N)`.
//!
//! A [`Cyclotomic`] stores its conductor `N` and rational coefficients in the power basis
//! `1, zeta_N, ..., zeta_N^{phi(N)-1}`, reduced modulo the `N`-th cyclotomic polynomial.
//! Every value is kept at its minimal conductor (never `2 mod 4`), so equality of values is
//! equality of representations. Arithmetic across conductors happens in the lcm field.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{self, Matrix};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u32,
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn euler_phi(n: u32) -> usize {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result as usize
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Coefficients (low degree first) of the monic cyclotomic polynomial `Phi_n`.
pub(crate) fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = poly_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in divisors(n).into_iter().filter(|&d| d < n) {
        let div = cyclotomic_polynomial(d);
        poly = poly_exact_div(&poly, &div);
    }
    let poly = Arc::new(poly);
    poly_cache().lock().unwrap().insert(n, poly.clone());
    poly
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = num.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for k in (0..=qd).rev() {
        let c = rem[k + dd];
        quot[k] = c;
        for (i, &d) in den.iter().enumerate() {
            rem[k + i] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Reduces a vector of `zeta_l` exponent coefficients (any length) modulo `Phi_l`.
fn reduce_dense(l: u32, mut dense: Vec<BigRational>) -> Vec<BigRational> {
    let phi = cyclotomic_polynomial(l);
    let deg = phi.len() - 1;
    if dense.len() < deg {
        dense.resize(deg, BigRational::zero());
        return dense;
    }
    for k in (deg..dense.len()).rev() {
        if dense[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut dense[k]);
        for (i, &p) in phi[..deg].iter().enumerate() {
            let slot = &mut dense[k - deg + i];
            match p {
                0 => {}
                1 => *slot -= &c,
                -1 => *slot += &c,
                p => *slot -= &c * rat(p),
            }
        }
    }
    dense.truncate(deg);
    dense
}

struct Subfield {
    basis: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    inverse: Matrix<BigRational>,
}

type SubfieldCache = Mutex<HashMap<(u32, u32), Arc<Subfield>>>;

fn subfield_cache() -> &'static SubfieldCache {
    static CACHE: OnceLock<SubfieldCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Embedding data for `Q(zeta_m)` inside `Q(zeta_l)`.
fn subfield(l: u32, m: u32) -> Arc<Subfield> {
    if let Some(s) = subfield_cache().lock().unwrap().get(&(l, m)) {
        return s.clone();
    }
    let step = (l / m) as usize;
    let basis: Vec<Vec<BigRational>> = (0..euler_phi(m))
        .map(|j| {
            let mut dense = vec![BigRational::zero(); l as usize];
            dense[(j * step) % l as usize] = BigRational::one();
            reduce_dense(l, dense)
        })
        .collect();
    let mut t = basis.clone();
    let pivots = exact::rref(&mut t);
    let square: Matrix<BigRational> = pivots
        .iter()
        .map(|&r| basis.iter().map(|b| b[r].clone()).collect())
        .collect();
    let inverse = exact::inverse(&square).expect("subfield basis is independent");
    let s = Arc::new(Subfield { basis, pivots, inverse });
    subfield_cache().lock().unwrap().insert((l, m), s.clone());
    s
}

/// Coefficients of `x` (reduced at conductor `l`) in `Q(zeta_m)`, if it lies there.
fn project(l: u32, m: u32, x: &[BigRational]) -> Option<Vec<BigRational>> {
    let s = subfield(l, m);
    let rhs: Vec<BigRational> = s.pivots.iter().map(|&r| x[r].clone()).collect();
    let y = exact::mat_vec(&s.inverse, &rhs);
    let mut back = vec![BigRational::zero(); x.len()];
    for (c, b) in y.iter().zip(&s.basis) {
        if c.is_zero() {
            continue;
        }
        for (slot, v) in back.iter_mut().zip(b) {
            if !v.is_zero() {
                *slot += c * v;
            }
        }
    }
    (back == x).then_some(y)
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        Cyclotomic {
            conductor: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    /// `p / q`; panics if `q == 0`.
    pub fn from_frac(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// `zeta_n = exp(2 pi i / n)`.
    pub fn zeta(n: u32) -> Self {
        Self::zeta_pow(n, 1)
    }

    /// `zeta_n^k` for any integer `k`.
    pub fn zeta_pow(n: u32, k: i64) -> Self {
        assert!(n > 0, "conductor must be positive");
        let k = k.rem_euclid(n as i64) as usize;
        let mut dense = vec![BigRational::zero(); n as usize];
        dense[k] = BigRational::one();
        Self::from_dense(n, dense)
    }

    /// Builds from coefficients of `1, zeta_n, zeta_n^2, ...` (any length; exponents wrap).
    pub fn from_powers(n: u32, coeffs: &[BigRational]) -> Self {
        let mut dense = vec![BigRational::zero(); n as usize];
        for (j, c) in coeffs.iter().enumerate() {
            dense[j % n as usize] += c;
        }
        Self::from_dense(n, dense)
    }

    fn from_dense(l: u32, dense: Vec<BigRational>) -> Self {
        let reduced = reduce_dense(l, dense);
        Self::minimize(l, reduced)
    }

    fn minimize(mut l: u32, mut x: Vec<BigRational>) -> Self {
        loop {
            if x[1..].iter().all(Zero::is_zero) {
                return Self::from_rational(x.swap_remove(0));
            }
            if l % 4 == 2 {
                x = project(l, l / 2, &x).expect("Q(zeta_2m) = Q(zeta_m) for odd m");
                l /= 2;
                continue;
            }
            let mut moved = false;
            for p in prime_factors(l as u64) {
                let mut m = l / p as u32;
                if m % 4 == 2 {
                    m /= 2;
                }
                if m <= 1 {
                    continue;
                }
                if let Some(y) = project(l, m, &x) {
                    x = y;
                    l = m;
                    moved = true;
                    break;
                }
            }
            if !moved {
                return Cyclotomic {
                    conductor: l,
                    coeffs: x,
                };
            }
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Coefficients in the reduced power basis of the minimal conductor.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coeffs[0].is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.conductor == 1
    }

    pub fn to_rational(&self) -> Option<&BigRational> {
        self.is_rational().then(|| &self.coeffs[0])
    }

    /// Coefficients of `zeta_l^j`, `j < l`, for a multiple `l` of the conductor.
    fn dense_at(&self, l: u32) -> Vec<BigRational> {
        debug_assert_eq!(l % self.conductor, 0);
        let step = (l / self.conductor) as usize;
        let mut dense = vec![BigRational::zero(); l as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            dense[j * step] = c.clone();
        }
        dense
    }

    /// Applies the Galois automorphism `zeta -> zeta^a`, `gcd(a, N) = 1`.
    pub fn galois(&self, a: i64) -> Self {
        if self.is_rational() {
            return self.clone();
        }
        let n = self.conductor as i64;
        assert_eq!(a.gcd(&n), 1, "Galois exponent must be coprime to the conductor");
        let mut dense = vec![BigRational::zero(); n as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            dense[(j as i64 * a).rem_euclid(n) as usize] = c.clone();
        }
        let reduced = reduce_dense(self.conductor, dense);
        Cyclotomic {
            conductor: self.conductor,
            coeffs: reduced,
        }
    }

    /// Complex conjugate, `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Value under `zeta_N -> exp(2 pi i / N)`.
    pub fn embed(&self) -> Complex64 {
        let n = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let theta = std::f64::consts::TAU * j as f64 / n;
                let v = c.to_f64().unwrap_or(f64::NAN);
                Complex64::new(v * theta.cos(), v * theta.sin())
            })
            .sum()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(q.recip()));
        }
        // Solve x * y = 1 with the multiplication-by-x matrix.
        let n = self.conductor;
        let phi = self.coeffs.len();
        let columns: Vec<Vec<BigRational>> = (0..phi)
            .map(|j| {
                let mut dense = vec![BigRational::zero(); n as usize + phi];
                for (i, c) in self.coeffs.iter().enumerate() {
                    dense[i + j] = c.clone();
                }
                reduce_dense(n, dense)
            })
            .collect();
        let m = exact::transpose(&columns);
        let mut rhs = vec![BigRational::zero(); phi];
        rhs[0] = BigRational::one();
        let y = exact::solve(&m, &rhs).ok_or_else(|| Error::Singular("cyclotomic inverse".into()))?;
        Ok(Cyclotomic {
            conductor: n,
            coeffs: y,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `|x|^2 = x * conj(x)`.
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Exact square root of a square-free integer: positive real for `k > 0`, positive
    /// imaginary for `k < 0`. Built from quadratic Gauss sums.
    pub fn from_sqrt_integer(k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::zero());
        }
        let mag = k.unsigned_abs();
        if !is_square_free(mag) {
            return Err(Error::NotSquareFree(k));
        }
        let mut r = Self::one();
        for p in prime_factors(mag) {
            r = &r * &sqrt_prime(p);
        }
        if k < 0 {
            r = &r * &Self::zeta(4);
        }
        let z = r.embed();
        let positive = if k > 0 { z.re > 0.0 } else { z.im > 0.0 };
        Ok(if positive { r } else { -r })
    }

    /// `sqrt(k)` for a positive square-free integer.
    pub fn from_sqrt_rational(k: u64) -> Result<Self> {
        let k = i64::try_from(k).map_err(|_| Error::NotSquareFree(i64::MAX))?;
        Self::from_sqrt_integer(k)
    }

    /// Principal square root of a rational (imaginary for negatives).
    pub fn sqrt_of_rational(q: &BigRational) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::zero());
        }
        // q = a/b = (a b) / b^2, then split off the square part of a b.
        let ab = (q.numer() * q.denom()).abs();
        let ab = ab
            .to_u64()
            .ok_or_else(|| Error::Parse(format!("rational {q} too large for an exact square root")))?;
        let (s, k) = square_part(ab);
        let root = Self::from_sqrt_integer(if q.is_negative() { -(k as i64) } else { k as i64 })?;
        let factor = BigRational::new(BigInt::from(s), q.denom().clone());
        Ok(root.scale(&factor))
    }

    /// Rational `q` with `self == q * zeta_n^k`, searched over the conductor's roots of unity.
    fn as_scaled_root_of_unity(&self) -> Option<(BigRational, u32, i64)> {
        let n = self.conductor;
        for k in 1..n as i64 {
            let z = Self::zeta_pow(n, k);
            if z.conductor != n {
                continue;
            }
            // Compare through the first nonzero coefficient.
            let j = z.coeffs.iter().position(|c| !c.is_zero())?;
            if self.coeffs[j].is_zero() {
                continue;
            }
            let q = &self.coeffs[j] / &z.coeffs[j];
            if z.scale(&q) == *self {
                let (m, e) = reduce_root(n, k);
                return Some((q, m, e));
            }
        }
        None
    }

    /// `(a, b, k)` with `self == a + b sqrt(k)`, `k` square-free and dividing a small multiple of
    /// the conductor.
    fn as_quadratic(&self) -> Option<(BigRational, BigRational, i64)> {
        let n = self.conductor as i64;
        let mut candidates: Vec<i64> = Vec::new();
        let primes = prime_factors(n as u64);
        for mask in 0u32..(1 << primes.len()) {
            let prod: i64 = primes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p as i64)
                .product();
            candidates.push(prod);
            candidates.push(-prod);
        }
        for k in candidates.into_iter().filter(|&k| k != 1) {
            let r = Self::from_sqrt_integer(k).ok()?;
            let l = lcm(self.conductor, r.conductor);
            let x = reduce_dense(l, self.dense_at(l));
            let rv = reduce_dense(l, r.dense_at(l));
            let Some(j) = (1..rv.len()).find(|&j| !rv[j].is_zero()) else {
                continue;
            };
            let b = &x[j] / &rv[j];
            let a = &x[0] - &b * &rv[0];
            if b.is_zero() {
                continue;
            }
            if Self::from_rational(a.clone()) + r.scale(&b) == *self {
                return Some((a, b, k));
            }
        }
        None
    }

    /// Rounds the embedding for display in float contexts.
    pub fn approx_eq(&self, z: Complex64, tol: f64) -> bool {
        (self.embed() - z).norm() <= tol
    }
}

fn reduce_root(n: u32, k: i64) -> (u32, i64) {
    let g = (k as u32).gcd(&n).max(1);
    if k == 0 {
        return (1, 0);
    }
    (n / g, k / g as i64)
}

fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

fn is_square_free(n: u64) -> bool {
    let mut p = 2u64;
    let mut n = n;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// `n = s^2 k` with `k` square-free.
fn square_part(mut n: u64) -> (u64, u64) {
    let mut s = 1;
    let mut k = 1;
    let mut p = 2u64;
    while p * p <= n {
        while n.is_multiple_of(p * p) {
            n /= p * p;
            s *= p;
        }
        if n.is_multiple_of(p) {
            n /= p;
            k *= p;
        }
        p += 1;
    }
    (s, k * n)
}

fn legendre(a: u64, p: u64) -> i64 {
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if result == 1 {
        1
    } else {
        -1
    }
}

/// `+-sqrt(p)` for a prime `p`; the sign is fixed by the caller.
fn sqrt_prime(p: u64) -> Cyclotomic {
    if p == 2 {
        return Cyclotomic::zeta(8) + Cyclotomic::zeta_pow(8, 7);
    }
    let p32 = p as u32;
    let mut dense = vec![BigRational::zero(); p as usize];
    for a in 1..p {
        dense[a as usize] = rat(legendre(a, p));
    }
    let gauss = Cyclotomic::from_dense(p32, dense);
    if p % 4 == 1 {
        gauss
    } else {
        &gauss * &Cyclotomic::zeta(4)
    }
}

fn binary(a: &Cyclotomic, b: &Cyclotomic, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Cyclotomic {
    if a.conductor == b.conductor {
        let coeffs: Vec<BigRational> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f(x, y)).collect();
        return Cyclotomic::minimize(a.conductor, coeffs);
    }
    if b.is_rational() {
        let mut coeffs = a.coeffs.clone();
        coeffs[0] = f(&a.coeffs[0], &b.coeffs[0]);
        coeffs[1..].iter_mut().for_each(|c| *c = f(c, &BigRational::zero()));
        return Cyclotomic {
            conductor: a.conductor,
            coeffs,
        };
    }
    if a.is_rational() {
        let mut coeffs: Vec<BigRational> = b.coeffs.iter().map(|c| f(&BigRational::zero(), c)).collect();
        coeffs[0] = f(&a.coeffs[0], &b.coeffs[0]);
        return Cyclotomic {
            conductor: b.conductor,
            coeffs,
        };
    }
    let l = lcm(a.conductor, b.conductor);
    let dense: Vec<BigRational> = a
        .dense_at(l)
        .iter()
        .zip(b.dense_at(l).iter())
        .map(|(x, y)| f(x, y))
        .collect();
    Cyclotomic::from_dense(l, dense)
}

fn multiply(a: &Cyclotomic, b: &Cyclotomic) -> Cyclotomic {
    if a.is_rational() {
        return b.scale(&a.coeffs[0]);
    }
    if b.is_rational() {
        return a.scale(&b.coeffs[0]);
    }
    let l = lcm(a.conductor, b.conductor) as usize;
    let sa = l / a.conductor as usize;
    let sb = l / b.conductor as usize;
    let mut dense = vec![BigRational::zero(); l];
    for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            dense[(i * sa + j * sb) % l] += x * y;
        }
    }
    Cyclotomic::from_dense(l as u32, dense)
}

/// Sums many cyclotomics (or products) in one lifted buffer and canonicalizes once.
#[derive(Clone, Debug)]
pub struct CycloAccumulator {
    conductor: u32,
    dense: Vec<BigRational>,
}

impl Default for CycloAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl CycloAccumulator {
    pub fn new() -> Self {
        CycloAccumulator {
            conductor: 1,
            dense: vec![BigRational::zero()],
        }
    }

    fn widen(&mut self, n: u32) {
        if self.conductor.is_multiple_of(n) {
            return;
        }
        let l = lcm(self.conductor, n);
        let step = (l / self.conductor) as usize;
        let mut dense = vec![BigRational::zero(); l as usize];
        for (j, c) in std::mem::take(&mut self.dense).into_iter().enumerate() {
            dense[j * step] = c;
        }
        self.conductor = l;
        self.dense = dense;
    }

    pub fn add(&mut self, x: &Cyclotomic) {
        if x.is_zero() {
            return;
        }
        self.widen(x.conductor);
        let step = (self.conductor / x.conductor) as usize;
        for (j, c) in x.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            self.dense[j * step] += c;
        }
    }

    pub fn add_product(&mut self, a: &Cyclotomic, b: &Cyclotomic) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if a.is_rational() && b.is_rational() {
            self.dense[0] += &a.coeffs[0] * &b.coeffs[0];
            return;
        }
        self.widen(a.conductor);
        self.widen(b.conductor);
        let l = self.conductor as usize;
        let sa = l / a.conductor as usize;
        let sb = l / b.conductor as usize;
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                self.dense[(i * sa + j * sb) % l] += x * y;
            }
        }
    }

    pub fn finish(self) -> Cyclotomic {
        Cyclotomic::from_dense(self.conductor, self.dense)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(self, rhs)
            }
        }
        impl $trait<Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Cyclotomic> for Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: &Cyclotomic) -> Cyclotomic {
                $body(&self, rhs)
            }
        }
        impl $trait<Cyclotomic> for &Cyclotomic {
            type Output = Cyclotomic;
            fn $method(self, rhs: Cyclotomic) -> Cyclotomic {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Cyclotomic, b: &Cyclotomic| binary(a, b, |x, y| x + y));
forward_binop!(Sub, sub, |a: &Cyclotomic, b: &Cyclotomic| binary(a, b, |x, y| x - y));
forward_binop!(Mul, mul, multiply);
forward_binop!(Div, div, |a: &Cyclotomic, b: &Cyclotomic| a
    .checked_div(b)
    .expect("division by zero"));

impl AddAssign<&Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Cyclotomic> for Cyclotomic {
    fn sub_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Cyclotomic> for Cyclotomic {
    fn mul_assign(&mut self, rhs: &Cyclotomic) {
        *self = &*self * rhs;
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            conductor: self.conductor,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        -self.clone()
    }
}

impl std::iter::Sum for Cyclotomic {
    fn sum<I: Iterator<Item = Cyclotomic>>(iter: I) -> Self {
        let mut acc = CycloAccumulator::new();
        iter.for_each(|x| acc.add(&x));
        acc.finish()
    }
}

impl From<i64> for Cyclotomic {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for Cyclotomic {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl Default for Cyclotomic {
    fn default() -> Self {
        Self::zero()
    }
}

impl exact::Field for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::zero()
    }
    fn one() -> Self {
        Cyclotomic::one()
    }
    fn is_zero(&self) -> bool {
        Cyclotomic::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_root(m: u32, e: i64) -> String {
    match (m, e) {
        (1, _) => "1".into(),
        (2, _) => "-1".into(),
        (4, 1) => "i".into(),
        (4, 3) => "-i".into(),
        (m, 1) => format!("ζ{m}"),
        (m, e) => format!("ζ{m}^{e}"),
    }
}

fn fmt_sqrt(k: i64) -> String {
    match k {
        -1 => "i".into(),
        k if k < 0 => format!("i√{}", -k),
        k => format!("√{k}"),
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}", fmt_rational(q));
        }
        if let Some((q, m, e)) = self.as_scaled_root_of_unity() {
            let root = fmt_root(m, e);
            return if q.is_one() {
                write!(f, "{root}")
            } else if q == -BigRational::one() {
                match root.strip_prefix('-') {
                    Some(r) => write!(f, "{r}"),
                    None => write!(f, "-{root}"),
                }
            } else {
                write!(f, "{}*{root}", fmt_rational(&q))
            };
        }
        if let Some((a, b, k)) = self.as_quadratic() {
            // (A + B sqrt(k)) / C over a common denominator.
            let c = a.denom().lcm(b.denom());
            let big_a = (&a * BigRational::from_integer(c.clone())).to_integer();
            let big_b = (&b * BigRational::from_integer(c.clone())).to_integer();
            let root = fmt_sqrt(k);
            let bterm = if big_b.is_one() {
                root.clone()
            } else if big_b == -BigInt::one() {
                format!("-{root}")
            } else {
                format!("{big_b}{root}")
            };
            let num = if big_a.is_zero() {
                bterm
            } else if big_b.is_negative() {
                format!("{big_a}{bterm}")
            } else {
                format!("{big_a}+{bterm}")
            };
            return if c.is_one() {
                write!(f, "{num}")
            } else if big_a.is_zero() && !num.contains('+') {
                write!(f, "{num}/{c}")
            } else {
                write!(f, "({num})/{c}")
            };
        }
        let n = self.conductor;
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => fmt_rational(c),
                1 => format!("{}*ζ{n}", fmt_rational(c)),
                j => format!("{}*ζ{n}^{j}", fmt_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One factor of a product term: `p`, `p/q`, `i`, `sqrt(k)` or `zeta(n)` with optional `^e`.
fn parse_factor(f: &str) -> Result<Cyclotomic> {
    let bad = || Error::Parse(format!("bad cyclotomic factor '{f}'"));
    let (base, exp) = match f.rsplit_once('^') {
        Some((b, e)) => (b, e.trim().parse::<u32>().map_err(|_| bad())?),
        None => (f, 1),
    };
    let base = base.trim();
    let inner = |name: &str| {
        base.strip_prefix(name)
            .and_then(|r| r.strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
            .map(str::trim)
    };
    let value = if base == "i" {
        Cyclotomic::zeta(4)
    } else if let Some(k) = inner("sqrt") {
        let q: BigRational = k.parse().map_err(|_| bad())?;
        Cyclotomic::sqrt_of_rational(&q)?
    } else if let Some(n) = inner("zeta") {
        let n: u32 = n.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Cyclotomic::zeta(n)
    } else {
        Cyclotomic::from_rational(base.parse().map_err(|_| bad())?)
    };
    Ok(value.pow(exp))
}

/// Accepts sums of signed products such as `1/2 + 3/2*sqrt(-3)` or `-zeta(3)^2`.
impl std::str::FromStr for Cyclotomic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty cyclotomic".into()));
        }
        let mut terms = Vec::new();
        let (mut depth, mut start) = (0i32, 0);
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '+' | '-' if depth == 0 && i > start && !s[..i].ends_with(['^', '*', '/']) => {
                    terms.push(&s[start..i]);
                    start = i;
                }
                _ => {}
            }
        }
        terms.push(&s[start..]);
        let mut total = Cyclotomic::zero();
        for term in terms {
            let (negate, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(term)),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in '{s}'")));
            }
            let mut value = Cyclotomic::one();
            for f in body.split('*') {
                value = &value * &parse_factor(f)?;
            }
            total += &if negate { -value } else { value };
        }
        Ok(total)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    conductor: u32,
    coeffs: Vec<(String, String)>,
}

impl Serialize for Cyclotomic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| (c.numer().to_string(), c.denom().to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclotomic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CycloJson::deserialize(d)?;
        if raw.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|(p, q)| {
                let p: BigInt = p.parse().map_err(D::Error::custom)?;
                let q: BigInt = q.parse().map_err(D::Error::custom)?;
                if q.is_zero() {
                    return Err(D::Error::custom("zero denominator"));
                }
                Ok(BigRational::new(p, q))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Cyclotomic::from_powers(raw.conductor, &coeffs))
    }
}
