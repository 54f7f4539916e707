//! Exact truncated p-adic arithmetic.
//!
//! [`ZpApprox`] is an element of `Z_p` known modulo `p^digits`, stored as a
//! residue modulo the working modulus `p^N` of its [`ZpRing`]. Every operation
//! reports the precision its inputs justify: additions and products keep the
//! minimum, exact divisions by `p^e` give up `e` digits. A residue whose known
//! digits are all zero is "indistinguishable from zero", never certified zero.
//!
//! [`ZpTSeries`] is the coefficient ring `Z_p[[T]] / (p^N, T^b)`, one
//! [`ZpApprox`] per power of `T`.

use std::cmp::min;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Largest working modulus. Products of two residues fit in `u128` with room
/// for [`ACC_BATCH`] accumulations before a reduction.
const MAX_MODULUS: u64 = 1 << 60;
const ACC_BATCH: u32 = 255;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `v_p(n)`; `n` must be nonzero.
pub fn vp_u64(p: u64, mut n: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(p: u64, n: u64) -> u32 {
    let mut v = 0u64;
    let mut q = n;
    while q > 0 {
        q /= p;
        v += q;
    }
    v as u32
}

/// Smallest `k` with `p^k >= n`.
pub fn ceil_log(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut pk: u128 = 1;
    while pk < n as u128 {
        pk *= p as u128;
        k += 1;
    }
    k
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return if m == 1 { Some(0) } else { None };
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// A valuation that is either known exactly or only bounded below (the value
/// vanished at every known digit or coefficient).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

impl Valuation {
    pub fn value(&self) -> u32 {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Valuation::Exact(_))
    }
}

/// The ring `Z / p^digits`, used as the working ring for `Z_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ZpRing {
    p: u64,
    digits: u32,
    modulus: u64,
}

impl ZpRing {
    pub fn new(p: u64, digits: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if digits == 0 {
            return Err(Error::InvalidProfile("working precision must be at least one digit".into()));
        }
        let mut modulus = 1u64;
        for _ in 0..digits {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(Error::WorkingPrecisionTooLarge { p, digits })?;
        }
        Ok(ZpRing { p, digits, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^k` for `k <= digits`.
    pub fn p_pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.digits);
        self.p.pow(k)
    }

    pub fn zero(&self) -> ZpApprox {
        self.from_u64(0)
    }

    pub fn one(&self) -> ZpApprox {
        self.from_u64(1)
    }

    pub fn from_u64(&self, x: u64) -> ZpApprox {
        ZpApprox { ring: *self, residue: x % self.modulus, digits: self.digits }
    }

    pub fn from_i64(&self, x: i64) -> ZpApprox {
        let r = (x as i128).rem_euclid(self.modulus as i128) as u64;
        ZpApprox { ring: *self, residue: r, digits: self.digits }
    }

    /// An element known only modulo `p^digits` (clamped to the working digits).
    pub fn from_residue(&self, residue: u64, digits: u32) -> ZpApprox {
        ZpApprox { ring: *self, residue: residue % self.modulus, digits: min(digits, self.digits) }
    }
}

/// An element of `Z_p` known modulo `p^digits`.
#[derive(Clone, Copy, Debug)]
pub struct ZpApprox {
    ring: ZpRing,
    residue: u64,
    digits: u32,
}

impl ZpApprox {
    pub fn ring(&self) -> ZpRing {
        self.ring
    }

    /// Raw residue modulo the working modulus; only the low `digits` base-p
    /// digits are meaningful.
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Canonical representative in `[0, p^k)` for `k = min(k, digits)`.
    pub fn residue_mod(&self, k: u32) -> u64 {
        self.residue % self.ring.p_pow(min(k, self.digits))
    }

    pub fn canonical(&self) -> u64 {
        self.residue_mod(self.digits)
    }

    /// True when every known digit is zero.
    pub fn is_zero(&self) -> bool {
        self.canonical() == 0
    }

    pub fn is_unit(&self) -> bool {
        self.digits > 0 && self.residue % self.ring.p != 0
    }

    pub fn with_digits(mut self, k: u32) -> Self {
        self.digits = min(self.digits, k);
        self
    }

    pub fn valuation(&self) -> Valuation {
        let c = self.canonical();
        if c == 0 {
            Valuation::AtLeast(self.digits)
        } else {
            Valuation::Exact(vp_u64(self.ring.p, c))
        }
    }

    /// Congruence modulo `p^min(k, self.digits, other.digits)`.
    pub fn congruent(&self, other: &Self, k: u32) -> bool {
        let k = min(k, min(self.digits, other.digits));
        let m = self.ring.p_pow(k);
        self.residue % m == other.residue % m
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Domain(format!("{} is not a unit mod {}", self.canonical(), self.ring.p)));
        }
        let r = inv_mod(self.residue, self.ring.modulus).expect("unit residue is invertible");
        Ok(ZpApprox { ring: self.ring, residue: r, digits: self.digits })
    }

    /// Exact division by a nonzero integer. Dividing by `p^e * u` costs `e`
    /// digits; the residue must be divisible by `p^e` at the known precision.
    pub fn div_int(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let p = self.ring.p;
        let e = vp_u64(p, n.unsigned_abs());
        if e >= self.digits {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by {n} needs {} digits, only {} known",
                e + 1,
                self.digits
            )));
        }
        let pe = p.pow(e);
        if self.residue % pe != 0 {
            return Err(Error::Domain(format!("{} is not divisible by {p}^{e}", self.canonical())));
        }
        let unit = self.ring.from_i64(n / pe as i64);
        let u_inv = inv_mod(unit.residue, self.ring.modulus).expect("unit part is invertible");
        let shifted = self.residue / pe;
        Ok(ZpApprox {
            ring: self.ring,
            residue: mul_mod(shifted, u_inv, self.ring.modulus),
            digits: self.digits - e,
        })
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let m = self.ring.modulus;
        let mut base = self.residue;
        let mut acc = 1 % m;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, base, m);
            }
            base = mul_mod(base, base, m);
            e >>= 1;
        }
        ZpApprox { ring: self.ring, residue: acc, digits: self.digits }
    }
}

impl PartialEq for ZpApprox {
    /// Equality at the common known precision.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.congruent(other, u32::MAX)
    }
}

impl fmt::Display for ZpApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.canonical(), self.ring.p, self.digits)
    }
}

impl Add for ZpApprox {
    type Output = ZpApprox;
    fn add(self, rhs: ZpApprox) -> ZpApprox {
        debug_assert_eq!(self.ring, rhs.ring);
        let m = self.ring.modulus;
        let s = self.residue + rhs.residue;
        ZpApprox { ring: self.ring, residue: if s >= m { s - m } else { s }, digits: min(self.digits, rhs.digits) }
    }
}

impl Sub for ZpApprox {
    type Output = ZpApprox;
    fn sub(self, rhs: ZpApprox) -> ZpApprox {
        self + (-rhs)
    }
}

impl Neg for ZpApprox {
    type Output = ZpApprox;
    fn neg(self) -> ZpApprox {
        let m = self.ring.modulus;
        ZpApprox { ring: self.ring, residue: (m - self.residue) % m, digits: self.digits }
    }
}

impl Mul for ZpApprox {
    type Output = ZpApprox;
    fn mul(self, rhs: ZpApprox) -> ZpApprox {
        debug_assert_eq!(self.ring, rhs.ring);
        ZpApprox {
            ring: self.ring,
            residue: mul_mod(self.residue, rhs.residue, self.ring.modulus),
            digits: min(self.digits, rhs.digits),
        }
    }
}

/// A truncated element of `Z_p[[T]] / (p^N, T^len)`.
///
/// Coefficient `k` carries its own known precision; a coefficient with zero
/// known digits is unknown.
#[derive(Clone, Debug)]
pub struct ZpTSeries {
    ring: ZpRing,
    res: Vec<u64>,
    digits: Vec<u32>,
}

impl ZpTSeries {
    pub fn zero(ring: ZpRing, len: usize) -> Self {
        assert!(len >= 1, "T-adic precision must be at least 1");
        ZpTSeries { ring, res: vec![0; len], digits: vec![ring.digits; len] }
    }

    pub fn one(ring: ZpRing, len: usize) -> Self {
        Self::constant(ring.one(), len)
    }

    pub fn constant(c: ZpApprox, len: usize) -> Self {
        let mut s = Self::zero(c.ring, len);
        s.set_coeff(0, c);
        s
    }

    /// The variable `T` (zero when `len == 1`).
    pub fn t(ring: ZpRing, len: usize) -> Self {
        let mut s = Self::zero(ring, len);
        if len > 1 {
            s.res[1] = 1 % ring.modulus;
        }
        s
    }

    /// Series with the given integer coefficients, padded with zeros.
    pub fn from_i64s(ring: ZpRing, len: usize, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(ring, len);
        for (k, &c) in coeffs.iter().enumerate().take(len) {
            s.set_coeff(k, ring.from_i64(c));
        }
        s
    }

    pub fn from_coeffs(ring: ZpRing, coeffs: &[ZpApprox]) -> Self {
        assert!(!coeffs.is_empty());
        ZpTSeries {
            ring,
            res: coeffs.iter().map(|c| c.residue).collect(),
            digits: coeffs.iter().map(|c| c.digits).collect(),
        }
    }

    pub fn ring(&self) -> ZpRing {
        self.ring
    }

    /// Number of retained `T`-coefficients.
    pub fn len(&self) -> usize {
        self.res.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, k: usize) -> ZpApprox {
        ZpApprox { ring: self.ring, residue: self.res[k], digits: self.digits[k] }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = ZpApprox> + '_ {
        (0..self.len()).map(move |k| self.coeff(k))
    }

    pub fn set_coeff(&mut self, k: usize, c: ZpApprox) {
        debug_assert_eq!(c.ring, self.ring);
        self.res[k] = c.residue;
        self.digits[k] = c.digits;
    }

    /// Smallest known precision over all coefficients.
    pub fn min_digits(&self) -> u32 {
        self.digits.iter().copied().min().unwrap_or(self.ring.digits)
    }

    /// Lower every coefficient's precision to at most `k` digits.
    pub fn with_digits(mut self, k: u32) -> Self {
        for d in &mut self.digits {
            *d = min(*d, k);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs().all(|c| c.is_zero())
    }

    /// T-adic valuation: index of the first coefficient that is nonzero at
    /// its known precision, or a lower bound `len` if none is.
    pub fn t_valuation(&self) -> Valuation {
        match self.coeffs().position(|c| !c.is_zero()) {
            Some(k) => Valuation::Exact(k as u32),
            None => Valuation::AtLeast(self.len() as u32),
        }
    }

    /// p-adic valuation: minimum over the coefficients.
    pub fn p_valuation(&self) -> Valuation {
        let mut best: Option<u32> = None;
        let mut floor = u32::MAX;
        for c in self.coeffs() {
            match c.valuation() {
                Valuation::Exact(v) => best = Some(best.map_or(v, |b| min(b, v))),
                Valuation::AtLeast(v) => floor = min(floor, v),
            }
        }
        match best {
            Some(v) if v <= floor => Valuation::Exact(v),
            _ => Valuation::AtLeast(min(floor, best.unwrap_or(u32::MAX))),
        }
    }

    /// Coefficientwise congruence at the common known precision, further
    /// capped at `k` digits.
    pub fn congruent(&self, other: &Self, k: u32) -> bool {
        self.len() == other.len() && self.coeffs().zip(other.coeffs()).all(|(a, b)| a.congruent(&b, k))
    }

    /// Keep the first `len` coefficients.
    pub fn truncate(&self, len: usize) -> Self {
        assert!(len >= 1 && len <= self.len());
        ZpTSeries { ring: self.ring, res: self.res[..len].to_vec(), digits: self.digits[..len].to_vec() }
    }

    /// Multiply by `T^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut out = Self::zero(self.ring, self.len());
        for j in k..self.len() {
            out.res[j] = self.res[j - k];
            out.digits[j] = self.digits[j - k];
        }
        out
    }

    /// Divide by `T^k`. The low `k` coefficients must vanish; the top `k`
    /// coefficients of the result are unknown (zero digits).
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k >= self.len() {
            return Err(Error::PrecisionExhausted(format!("cannot divide by T^{k} at T-precision {}", self.len())));
        }
        if self.coeffs().take(k).any(|c| !c.is_zero()) {
            return Err(Error::Domain(format!("series is not divisible by T^{k}")));
        }
        let mut out = Self::zero(self.ring, self.len());
        for j in 0..self.len() {
            if j + k < self.len() {
                out.res[j] = self.res[j + k];
                out.digits[j] = self.digits[j + k];
            } else {
                out.digits[j] = 0;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: ZpApprox) -> Self {
        let m = self.ring.modulus;
        ZpTSeries {
            ring: self.ring,
            res: self.res.iter().map(|&r| mul_mod(r, c.residue, m)).collect(),
            digits: self.digits.iter().map(|&d| min(d, c.digits)).collect(),
        }
    }

    pub fn mul_int(&self, n: i64) -> Self {
        self.scale(self.ring.from_i64(n))
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        let coeffs: Result<Vec<_>> = self.coeffs().map(|c| c.div_int(n)).collect();
        Ok(Self::from_coeffs(self.ring, &coeffs?))
    }

    /// Multiplicative inverse; the constant coefficient must be a p-adic unit.
    pub fn inverse(&self) -> Result<Self> {
        let c0_inv = self.coeff(0).inv()?;
        let n = self.len();
        let mut out = Self::zero(self.ring, n);
        out.set_coeff(0, c0_inv);
        for k in 1..n {
            let mut acc = self.ring.zero();
            for j in 1..=k {
                acc = acc + self.coeff(j) * out.coeff(k - j);
            }
            out.set_coeff(k, -(acc * c0_inv));
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.ring, self.len());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Residues of the coefficients reduced modulo `p^k`.
    pub fn residues_mod(&self, k: u32) -> Vec<u64> {
        self.coeffs().map(|c| c.residue_mod(k)).collect()
    }

    fn add_impl(&self, rhs: &Self, negate: bool) -> Self {
        assert_eq!(self.len(), rhs.len(), "T-precision mismatch");
        debug_assert_eq!(self.ring, rhs.ring);
        let m = self.ring.modulus;
        let res = self
            .res
            .iter()
            .zip(&rhs.res)
            .map(|(&a, &b)| {
                let b = if negate { (m - b) % m } else { b };
                let s = a + b;
                if s >= m {
                    s - m
                } else {
                    s
                }
            })
            .collect();
        let digits = self.digits.iter().zip(&rhs.digits).map(|(&a, &b)| min(a, b)).collect();
        ZpTSeries { ring: self.ring, res, digits }
    }

    fn mul_impl(&self, rhs: &Self) -> Self {
        assert_eq!(self.len(), rhs.len(), "T-precision mismatch");
        debug_assert_eq!(self.ring, rhs.ring);
        let n = self.len();
        let m = self.ring.modulus as u128;
        let mut res = vec![0u64; n];
        let mut digits = vec![0u32; n];
        let (mut da, mut db) = (u32::MAX, u32::MAX);
        for k in 0..n {
            da = min(da, self.digits[k]);
            db = min(db, rhs.digits[k]);
            digits[k] = min(da, db);
            let mut acc: u128 = 0;
            let mut pending = 0;
            for i in 0..=k {
                let a = self.res[i];
                if a == 0 {
                    continue;
                }
                acc += a as u128 * rhs.res[k - i] as u128;
                pending += 1;
                if pending == ACC_BATCH {
                    acc %= m;
                    pending = 0;
                }
            }
            res[k] = (acc % m) as u64;
        }
        ZpTSeries { ring: self.ring, res, digits }
    }
}

impl PartialEq for ZpTSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.congruent(other, u32::MAX)
    }
}

impl fmt::Display for ZpTSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", c.canonical())?,
                1 => write!(f, "{}*T", c.canonical())?,
                _ => write!(f, "{}*T^{k}", c.canonical())?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{}, T^{})", self.ring.p, self.min_digits(), self.len())
    }
}

macro_rules! forward_series_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&ZpTSeries> for &ZpTSeries {
            type Output = ZpTSeries;
            fn $method(self, rhs: &ZpTSeries) -> ZpTSeries {
                $body(self, rhs)
            }
        }
        impl $trait<ZpTSeries> for ZpTSeries {
            type Output = ZpTSeries;
            fn $method(self, rhs: ZpTSeries) -> ZpTSeries {
                $body(&self, &rhs)
            }
        }
        impl $trait<&ZpTSeries> for ZpTSeries {
            type Output = ZpTSeries;
            fn $method(self, rhs: &ZpTSeries) -> ZpTSeries {
                $body(&self, rhs)
            }
        }
    };
}

forward_series_binop!(Add, add, |a: &ZpTSeries, b: &ZpTSeries| a.add_impl(b, false));
forward_series_binop!(Sub, sub, |a: &ZpTSeries, b: &ZpTSeries| a.add_impl(b, true));
forward_series_binop!(Mul, mul, |a: &ZpTSeries, b: &ZpTSeries| a.mul_impl(b));

impl AddAssign<&ZpTSeries> for ZpTSeries {
    fn add_assign(&mut self, rhs: &ZpTSeries) {
        *self = self.add_impl(rhs, false);
    }
}

impl SubAssign<&ZpTSeries> for ZpTSeries {
    fn sub_assign(&mut self, rhs: &ZpTSeries) {
        *self = self.add_impl(rhs, true);
    }
}

impl Neg for &ZpTSeries {
    type Output = ZpTSeries;
    fn neg(self) -> ZpTSeries {
        ZpTSeries::zero(self.ring, self.len()).add_impl(self, true)
    }
}

impl Neg for ZpTSeries {
    type Output = ZpTSeries;
    fn neg(self) -> ZpTSeries {
        -&self
    }
}

/// The universal character `c -> (1+T)^c`, truncated at `len` coefficients.
///
/// Coefficient `k` is the binomial `C(c, k)`, computed from the falling
/// factorial and an exact division by `k!`; its reported precision is
/// `digits(c) - v_p(k!)`.
pub fn one_plus_t_pow(c: ZpApprox, len: usize) -> Result<ZpTSeries> {
    let ring = c.ring;
    let p = ring.p;
    let needed = vp_factorial(p, len.saturating_sub(1) as u64);
    if needed >= c.digits {
        return Err(Error::PrecisionExhausted(format!(
            "(1+T)^c to T^{len} divides by p^{needed} but c carries {} digits",
            c.digits
        )));
    }
    let m = ring.modulus;
    let mut out = ZpTSeries::zero(ring, len);
    let mut falling = 1 % m;
    for k in 0..len {
        if k > 0 {
            let factor = (c.residue as u128 + m as u128 - (k as u128 - 1) % m as u128) % m as u128;
            falling = mul_mod(falling, factor as u64, m);
        }
        let v = vp_factorial(p, k as u64);
        let pv = p.pow(v);
        debug_assert_eq!(falling % pv, 0);
        let mut unit_fact = 1 % m;
        for j in 2..=k as u64 {
            let mut jj = j;
            while jj % p == 0 {
                jj /= p;
            }
            unit_fact = mul_mod(unit_fact, jj % m, m);
        }
        let inv = inv_mod(unit_fact, m).expect("unit part of k! is invertible");
        let coeff = mul_mod(falling / pv, inv, m);
        out.set_coeff(k, ring.from_residue(coeff, c.digits - v));
    }
    Ok(out)
}

/// Precision parameters shared by every computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionProfile {
    pub p: u64,
    /// Target p-adic precision.
    pub a: u32,
    /// T-adic precision (number of retained coefficients).
    pub b: usize,
    /// x-degree truncation of the Dwork basis.
    pub x_degree: usize,
    /// s-degree truncation of L-functions and Fredholm series.
    pub smax: usize,
    /// Largest enumeration degree.
    pub dmax: usize,
    /// Extra p-adic working digits.
    pub guard: u32,
}

impl PrecisionProfile {
    pub fn new(p: u64, a: u32, b: usize, x_degree: usize, smax: usize, dmax: usize, guard: u32) -> Result<Self> {
        let prof = PrecisionProfile { p, a, b, x_degree, smax, dmax, guard };
        prof.validate()?;
        Ok(prof)
    }

    /// Profile with the automatic guard and x-degree for a tower of the
    /// given degree.
    pub fn auto(p: u64, a: u32, b: usize, smax: usize, dmax: usize, tower_degree: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let guard = Self::auto_guard(p, b, smax, dmax);
        let x_degree = Self::auto_x_degree(p, tower_degree, b);
        Self::new(p, a, b, x_degree, smax, dmax, guard)
    }

    /// `v_p(b!) + ceil(log_p(max(smax, dmax)))`.
    pub fn auto_guard(p: u64, b: usize, smax: usize, dmax: usize) -> u32 {
        vp_factorial(p, b as u64) + ceil_log(p, smax.max(dmax) as u64)
    }

    /// Smallest basis truncation that provably retains every coefficient
    /// mod `T^b`, plus one block of margin: every cycle through an index
    /// `|u| > D` has T-adic valuation at least `(p-1)(D+1)/d`.
    pub fn auto_x_degree(p: u64, tower_degree: u64, b: usize) -> usize {
        let d = tower_degree as usize;
        let core = (d * b).div_ceil(p as usize - 1);
        (core + d).max(p as usize)
    }

    /// Smallest guard the profile invariant allows.
    pub fn min_guard(p: u64, b: usize, smax: usize, dmax: usize) -> u32 {
        let mut floor_log = 0;
        let n = smax.max(dmax) as u64;
        while p.pow(floor_log + 1) <= n {
            floor_log += 1;
        }
        vp_factorial(p, b as u64) + floor_log
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        let bad = |m: &str| Err(Error::InvalidProfile(m.to_string()));
        if self.a < 1 {
            return bad("a must be at least 1");
        }
        if self.b < 1 {
            return bad("b must be at least 1");
        }
        if self.x_degree < 1 {
            return bad("x-degree bound must be at least 1");
        }
        if self.smax < 1 {
            return bad("smax must be at least 1");
        }
        if self.dmax < 1 {
            return bad("dmax must be at least 1");
        }
        let min_guard = Self::min_guard(self.p, self.b, self.smax, self.dmax);
        if self.guard < min_guard {
            return Err(Error::InvalidProfile(format!("guard {} is below the required {min_guard}", self.guard)));
        }
        ZpRing::new(self.p, self.working_digits())?;
        Ok(())
    }

    pub fn working_digits(&self) -> u32 {
        self.a + self.guard
    }

    pub fn ring(&self) -> Result<ZpRing> {
        ZpRing::new(self.p, self.working_digits())
    }

    pub fn with_x_degree(&self, x_degree: usize) -> Self {
        PrecisionProfile { x_degree, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> ZpRing {
        ZpRing::new(p, n).unwrap()
    }

    #[test]
    fn rejects_composite_and_oversized() {
        assert_eq!(ZpRing::new(4, 3), Err(Error::NotPrime(4)));
        assert!(matches!(ZpRing::new(2, 61), Err(Error::WorkingPrecisionTooLarge { .. })));
        assert!(ZpRing::new(2, 60).is_ok());
    }

    #[test]
    fn p_adic_valuation() {
        let r = ring(2, 10);
        assert_eq!(r.from_u64(12).valuation(), Valuation::Exact(2));
        assert_eq!(r.zero().valuation(), Valuation::AtLeast(10));
        assert_eq!(r.from_u64(1024 + 8).valuation(), Valuation::Exact(3));
    }

    #[test]
    fn t_adic_valuation() {
        let r = ring(3, 6);
        // T^3 + 3 T^5
        let s = ZpTSeries::from_i64s(r, 8, &[0, 0, 0, 1, 0, 3]);
        assert_eq!(s.t_valuation(), Valuation::Exact(3));
        let z = ZpTSeries::zero(r, 8);
        assert_eq!(z.t_valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn division_tracks_precision() {
        let r = ring(2, 10);
        let x = r.from_u64(24);
        let y = x.div_int(12).unwrap();
        assert_eq!(y.canonical(), 2);
        assert_eq!(y.digits(), 8);
        assert!(matches!(r.from_u64(3).div_int(2), Err(Error::Domain(_))));
        let low = r.from_residue(0, 2);
        assert!(matches!(low.div_int(4), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn unit_inverse() {
        let r = ring(5, 4);
        let x = r.from_i64(-7);
        assert_eq!((x * x.inv().unwrap()).canonical(), 1);
        assert!(r.from_u64(10).inv().is_err());
    }

    #[test]
    fn series_inverse_of_one_plus_t() {
        let r = ring(2, 8);
        let s = ZpTSeries::from_i64s(r, 5, &[1, 1]);
        let inv = s.inverse().unwrap();
        assert_eq!(inv, ZpTSeries::from_i64s(r, 5, &[1, -1, 1, -1, 1]));
    }

    #[test]
    fn shift_down_marks_top_unknown() {
        let r = ring(3, 4);
        let s = ZpTSeries::from_i64s(r, 4, &[0, 0, 5, 1]);
        let d = s.shift_down(2).unwrap();
        assert_eq!(d.coeff(0).canonical(), 5);
        assert_eq!(d.coeff(1).canonical(), 1);
        assert_eq!(d.coeff(2).digits(), 0);
        assert!(ZpTSeries::from_i64s(r, 4, &[0, 1]).shift_down(2).is_err());
    }

    #[test]
    fn one_plus_t_pow_examples() {
        let r = ring(2, 12);
        assert_eq!(one_plus_t_pow(r.zero(), 4).unwrap(), ZpTSeries::one(r, 4));
        assert_eq!(one_plus_t_pow(r.from_u64(2), 3).unwrap(), ZpTSeries::from_i64s(r, 3, &[1, 2, 1]));
        assert_eq!(one_plus_t_pow(r.from_i64(-1), 4).unwrap(), ZpTSeries::from_i64s(r, 4, &[1, -1, 1, -1]));
        let one = one_plus_t_pow(r.one(), 6).unwrap();
        assert_eq!(one, ZpTSeries::from_i64s(r, 6, &[1, 1]));
        assert_eq!(one.min_digits(), 12 - vp_factorial(2, 5));
    }

    #[test]
    fn one_plus_t_pow_precision_exhausted() {
        let r = ring(2, 3);
        assert!(matches!(one_plus_t_pow(r.one(), 5), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn profile_validation() {
        assert!(PrecisionProfile::new(2, 6, 8, 10, 4, 4, 0).is_err());
        let guard = PrecisionProfile::auto_guard(2, 8, 4, 4);
        assert_eq!(guard, 7 + 2);
        assert!(PrecisionProfile::new(2, 6, 8, 10, 4, 4, guard).is_ok());
        assert!(PrecisionProfile::new(2, 0, 8, 10, 4, 4, guard).is_err());
        assert!(PrecisionProfile::new(6, 6, 8, 10, 4, 4, guard).is_err());
    }

    #[test]
    fn helpers() {
        assert_eq!(vp_factorial(2, 8), 7);
        assert_eq!(vp_factorial(7, 64), 10);
        assert_eq!(ceil_log(2, 4), 2);
        assert_eq!(ceil_log(3, 4), 2);
        assert_eq!(ceil_log(7, 1), 0);
    }
}
