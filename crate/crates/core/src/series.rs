//! Truncated power series over `Z_p[[T]]`: series in a formal variable
//! (`t` or `s`) with exp/log, the Artin-Hasse exponential and the element
//! `pi` with `E(pi) = 1 + T`, plus functions and differentials in the
//! coordinate `x` on the affine line or the torus.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{ZpApprox, ZpRing, ZpTSeries};

/// A power series `sum_k c_k v^k` in a formal variable `v`, with
/// coefficients in `Z_p[[T]]`, truncated after `v^order`.
#[derive(Clone, Debug, PartialEq)]
pub struct TSeriesPoly {
    coeffs: Vec<ZpTSeries>,
}

impl TSeriesPoly {
    pub fn from_coeffs(coeffs: Vec<ZpTSeries>) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least its constant term");
        let len = coeffs[0].len();
        assert!(coeffs.iter().all(|c| c.len() == len), "T-precision mismatch");
        TSeriesPoly { coeffs }
    }

    pub fn zero(ring: ZpRing, t_len: usize, order: usize) -> Self {
        TSeriesPoly { coeffs: vec![ZpTSeries::zero(ring, t_len); order + 1] }
    }

    pub fn one(ring: ZpRing, t_len: usize, order: usize) -> Self {
        let mut s = Self::zero(ring, t_len, order);
        s.coeffs[0] = ZpTSeries::one(ring, t_len);
        s
    }

    /// Series with constant (T-free) integer coefficients.
    pub fn from_i64s(ring: ZpRing, t_len: usize, order: usize, coeffs: &[i64]) -> Self {
        let mut s = Self::zero(ring, t_len, order);
        for (k, &c) in coeffs.iter().enumerate().take(order + 1) {
            s.coeffs[k] = ZpTSeries::constant(ring.from_i64(c), t_len);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ring(&self) -> ZpRing {
        self.coeffs[0].ring()
    }

    pub fn t_len(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn coeff(&self, k: usize) -> &ZpTSeries {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ZpTSeries] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ZpTSeries> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        TSeriesPoly { coeffs: self.coeffs[..=order.min(self.order())].to_vec() }
    }

    /// Smallest p-adic precision over all coefficients.
    pub fn min_digits(&self) -> u32 {
        self.coeffs.iter().map(|c| c.min_digits()).min().unwrap()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TSeriesPoly { coeffs: (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TSeriesPoly { coeffs: (0..=n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect() }
    }

    pub fn neg(&self) -> Self {
        TSeriesPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = Self::zero(self.ring(), self.t_len(), n);
        for i in 0..=n {
            if self.coeffs[i].is_zero() && self.coeffs[i].min_digits() == self.ring().digits() {
                continue;
            }
            for j in 0..=n - i {
                out.coeffs[i + j] += &(&self.coeffs[i] * &other.coeffs[j]);
            }
        }
        out
    }

    /// Inverse; the constant term must be invertible in `Z_p[[T]]`.
    pub fn inverse(&self) -> Result<Self> {
        let c0_inv = self.coeffs[0].inverse()?;
        let n = self.order();
        let mut out = Self::zero(self.ring(), self.t_len(), n);
        out.coeffs[0] = c0_inv.clone();
        for k in 1..=n {
            let mut acc = ZpTSeries::zero(self.ring(), self.t_len());
            for j in 1..=k {
                acc += &(&self.coeffs[j] * &out.coeffs[k - j]);
            }
            out.coeffs[k] = -(&acc * &c0_inv);
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// `k * c_k` at index `k` (index 0 is zero): the coefficients of `v D`,
    /// with `D` the formal derivative.
    pub fn log_derivative_weights(&self) -> Vec<ZpTSeries> {
        self.coeffs.iter().enumerate().map(|(k, c)| c.mul_int(k as i64)).collect()
    }

    /// Formal derivative, one order shorter.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(self.ring(), self.t_len(), 0);
        }
        TSeriesPoly { coeffs: (1..=self.order()).map(|k| self.coeffs[k].mul_int(k as i64)).collect() }
    }

    /// Evaluate at a series `x` with `x = 0 mod T` (Horner's rule; every term
    /// beyond `T^len` vanishes).
    pub fn evaluate(&self, x: &ZpTSeries) -> Result<ZpTSeries> {
        if !x.coeff(0).is_zero() {
            return Err(Error::Domain("evaluation point must be divisible by T".into()));
        }
        let mut acc = ZpTSeries::zero(self.ring(), self.t_len());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// `exp` from the weighted coefficients `w_k = k g_k` of the exponent
/// (`w_0` ignored): `n h_n = sum_{k=1}^n w_k h_{n-k}`, so only the final
/// division by `n` costs precision.
pub fn exp_from_weights(weights: &[ZpTSeries], order: usize) -> Result<TSeriesPoly> {
    assert!(weights.len() > order, "need weights up to the requested order");
    let ring = weights[0].ring();
    let t_len = weights[0].len();
    let mut h = TSeriesPoly::one(ring, t_len, order);
    for n in 1..=order {
        let mut acc = ZpTSeries::zero(ring, t_len);
        for k in 1..=n {
            acc += &(&weights[k] * &h.coeffs[n - k]);
        }
        h.coeffs[n] = acc.div_int(n as i64)?;
    }
    Ok(h)
}

/// `exp(g)` truncated after `v^order`; `g` must have zero constant term.
pub fn series_exp(g: &TSeriesPoly, order: usize) -> Result<TSeriesPoly> {
    if !g.coeffs[0].is_zero() {
        return Err(Error::Domain("exp needs a series with zero constant term".into()));
    }
    if g.order() < order {
        return Err(Error::Domain(format!("exponent known to order {}, {} requested", g.order(), order)));
    }
    exp_from_weights(&g.log_derivative_weights(), order)
}

/// `log(g)` truncated after `v^order`; `g` must have constant term 1.
/// Computed as the integral of `g'/g`.
pub fn series_log(g: &TSeriesPoly, order: usize) -> Result<TSeriesPoly> {
    let ring = g.ring();
    let t_len = g.t_len();
    if g.coeffs[0] != ZpTSeries::one(ring, t_len) {
        return Err(Error::Domain("log needs a series with constant term 1".into()));
    }
    if g.order() < order {
        return Err(Error::Domain(format!("series known to order {}, {} requested", g.order(), order)));
    }
    let g = g.truncate(order);
    let q = g.derivative().mul(&g.truncate(order.saturating_sub(1)).inverse()?);
    let mut out = TSeriesPoly::zero(ring, t_len, order);
    for n in 1..=order {
        out.coeffs[n] = q.coeffs[n - 1].div_int(n as i64)?;
    }
    Ok(out)
}

/// Exact rational coefficients of `E(t) = exp(sum_i t^{p^i} / p^i)` up to
/// `t^order`, by `n E_n = sum_{p^i <= n} E_{n - p^i}`.
pub fn artin_hasse_rational(p: u64, order: usize) -> Vec<BigRational> {
    let mut e: Vec<BigRational> = vec![BigRational::one()];
    for n in 1..=order {
        let mut acc = BigRational::zero();
        let mut pk = 1usize;
        while pk <= n {
            acc += &e[n - pk];
            pk *= p as usize;
        }
        e.push(acc / BigRational::from_integer(BigInt::from(n)));
    }
    e
}

/// Reduce a p-integral rational modulo the working modulus.
pub fn reduce_rational(ring: ZpRing, x: &BigRational) -> Result<ZpApprox> {
    let m = BigInt::from(ring.modulus());
    let den = x.denom().mod_floor(&m).to_u64().expect("reduced below the modulus");
    let den = ring.from_u64(den);
    if !den.is_unit() {
        return Err(Error::Domain(format!("{x} is not p-integral for p = {}", ring.p())));
    }
    let mut num = x.numer().mod_floor(&m);
    if num.is_negative() {
        num += &m;
    }
    Ok(ring.from_u64(num.to_u64().expect("reduced below the modulus")) * den.inv()?)
}

/// The Artin-Hasse exponential truncated after `t^order`, with constant
/// `T`-free coefficients. Every coefficient must be p-integral; a failure is
/// reported as an internal error.
pub fn artin_hasse(ring: ZpRing, t_len: usize, order: usize) -> Result<TSeriesPoly> {
    let exact = artin_hasse_rational(ring.p(), order);
    let coeffs = exact
        .iter()
        .map(|c| {
            let r = reduce_rational(ring, c)
                .map_err(|_| Error::Internal(format!("Artin-Hasse coefficient {c} is not p-integral")))?;
            Ok(ZpTSeries::constant(r, t_len))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TSeriesPoly::from_coeffs(coeffs))
}

/// The unique `pi` in `(p, T)` with `E(pi) = 1 + T`, by Newton iteration
/// `pi <- pi - (E(pi) - 1 - T) / E'(pi)` from `pi = T`.
pub fn pi_from_t(ring: ZpRing, t_len: usize) -> Result<ZpTSeries> {
    let order = t_len.max(2) - 1;
    let e = artin_hasse(ring, t_len, order)?;
    let de = e.derivative();
    let target = ZpTSeries::from_i64s(ring, t_len, &[1, 1]);
    let mut pi = ZpTSeries::t(ring, t_len);
    for _ in 0..=2 * (usize::BITS - t_len.leading_zeros()) + 2 {
        let residual = &e.evaluate(&pi)? - &target;
        if residual.is_zero() {
            return Ok(pi);
        }
        let slope = de.evaluate(&pi)?;
        pi = &pi - &(&residual * &slope.inverse()?);
    }
    Err(Error::Internal("Newton iteration for pi did not converge".into()))
}

/// The two one-dimensional geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geometry {
    /// `A^1 = Spec F_p[x]`
    AffineLine,
    /// `G_m = Spec F_p[x, 1/x]`
    Torus,
}

/// Whether an [`XSeries`] is a function or a differential. Differentials are
/// written `g(x) dx` on the affine line and `g(x) dx/x` on the torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    Function,
    Differential,
}

/// A truncated function or differential in `x` with coefficients in
/// `Z_p[[T]]`. Exponents run over `0..=bound` (affine line) or
/// `-bound..=bound` (torus); anything outside is discarded.
#[derive(Clone, Debug, PartialEq)]
pub struct XSeries {
    geometry: Geometry,
    kind: FormKind,
    degree_bound: usize,
    coeffs: Vec<ZpTSeries>,
}

impl XSeries {
    pub fn zero(geometry: Geometry, kind: FormKind, degree_bound: usize, ring: ZpRing, t_len: usize) -> Self {
        let n = match geometry {
            Geometry::AffineLine => degree_bound + 1,
            Geometry::Torus => 2 * degree_bound + 1,
        };
        XSeries { geometry, kind, degree_bound, coeffs: vec![ZpTSeries::zero(ring, t_len); n] }
    }

    pub fn one(geometry: Geometry, degree_bound: usize, ring: ZpRing, t_len: usize) -> Self {
        let mut s = Self::zero(geometry, FormKind::Function, degree_bound, ring, t_len);
        s.set(0, ZpTSeries::one(ring, t_len));
        s
    }

    /// `c x^u` (or `c x^u dx`, `c x^u dx/x`).
    pub fn monomial(
        geometry: Geometry,
        kind: FormKind,
        degree_bound: usize,
        u: i64,
        c: ZpTSeries,
    ) -> Result<Self> {
        let mut s = Self::zero(geometry, kind, degree_bound, c.ring(), c.len());
        if !s.in_range(u) {
            return Err(Error::Domain(format!("exponent {u} outside the {geometry:?} range for bound {degree_bound}")));
        }
        s.set(u, c);
        Ok(s)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn ring(&self) -> ZpRing {
        self.coeffs[0].ring()
    }

    pub fn t_len(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn min_exponent(&self) -> i64 {
        match self.geometry {
            Geometry::AffineLine => 0,
            Geometry::Torus => -(self.degree_bound as i64),
        }
    }

    pub fn max_exponent(&self) -> i64 {
        self.degree_bound as i64
    }

    pub fn exponents(&self) -> std::ops::RangeInclusive<i64> {
        self.min_exponent()..=self.max_exponent()
    }

    pub fn in_range(&self, u: i64) -> bool {
        self.exponents().contains(&u)
    }

    fn index(&self, u: i64) -> usize {
        (u - self.min_exponent()) as usize
    }

    /// Coefficient of `x^u`; `None` outside the stored range.
    pub fn coeff(&self, u: i64) -> Option<&ZpTSeries> {
        if self.in_range(u) {
            Some(&self.coeffs[self.index(u)])
        } else {
            None
        }
    }

    /// Coefficient of `x^u`, zero outside the stored range.
    pub fn coeff_or_zero(&self, u: i64) -> ZpTSeries {
        self.coeff(u).cloned().unwrap_or_else(|| ZpTSeries::zero(self.ring(), self.t_len()))
    }

    pub fn set(&mut self, u: i64, c: ZpTSeries) {
        let i = self.index(u);
        self.coeffs[i] = c;
    }

    /// Nonzero terms, lowest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ZpTSeries)> {
        self.exponents().zip(self.coeffs.iter()).filter(|(_, c)| !c.is_zero())
    }

    /// Same terms under a different truncation bound.
    pub fn with_bound(&self, degree_bound: usize) -> Self {
        let mut out = Self::zero(self.geometry, self.kind, degree_bound, self.ring(), self.t_len());
        for (u, c) in self.terms() {
            if out.in_range(u) {
                out.set(u, c.clone());
            }
        }
        out
    }

    pub fn with_kind(mut self, kind: FormKind) -> Self {
        self.kind = kind;
        self
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GeometryMismatch(format!("{:?} vs {:?}", self.geometry, other.geometry)));
        }
        if self.degree_bound != other.degree_bound {
            return Err(Error::GeometryMismatch(format!(
                "degree bounds {} vs {}",
                self.degree_bound, other.degree_bound
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.kind != other.kind {
            return Err(Error::GeometryMismatch("cannot add a function and a differential".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        Ok(out)
    }

    /// Product, discarding exponents beyond the bound.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let kind = match (self.kind, other.kind) {
            (FormKind::Function, k) | (k, FormKind::Function) => k,
            _ => return Err(Error::GeometryMismatch("product of two differentials".into())),
        };
        let mut out = Self::zero(self.geometry, kind, self.degree_bound, self.ring(), self.t_len());
        for (u, a) in self.terms() {
            for (v, b) in other.terms() {
                let w = u + v;
                if out.in_range(w) {
                    let i = out.index(w);
                    out.coeffs[i] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &ZpTSeries) -> Self {
        let mut out = self.clone();
        for a in &mut out.coeffs {
            *a = &*a * c;
        }
        out
    }

    /// Multiply by `x^shift`, re-truncated at `degree_bound`.
    pub fn shifted(&self, shift: i64, degree_bound: usize) -> Result<Self> {
        if self.geometry == Geometry::AffineLine && shift < 0 {
            return Err(Error::Domain("negative powers of x are not functions on the affine line".into()));
        }
        let mut out = Self::zero(self.geometry, self.kind, degree_bound, self.ring(), self.t_len());
        for (u, c) in self.terms() {
            if out.in_range(u + shift) {
                out.set(u + shift, c.clone());
            }
        }
        Ok(out)
    }

    /// The Frobenius lift `g(x) -> g(x^p)` on functions.
    pub fn sigma(&self) -> Result<Self> {
        if self.kind != FormKind::Function {
            return Err(Error::Domain("sigma is applied to functions".into()));
        }
        let p = self.ring().p() as i64;
        let mut out = Self::zero(self.geometry, self.kind, self.degree_bound, self.ring(), self.t_len());
        for (u, c) in self.terms() {
            if out.in_range(p * u) {
                out.set(p * u, c.clone());
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// Product of two series; thin wrapper used by callers that work with
/// plain functions.
pub fn xseries_mul(g: &XSeries, h: &XSeries) -> Result<XSeries> {
    g.mul(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64, n: u32) -> ZpRing {
        ZpRing::new(p, n).unwrap()
    }

    #[test]
    fn exp_of_zero_and_t() {
        let r = zp(5, 6);
        let z = TSeriesPoly::zero(r, 2, 4);
        assert_eq!(series_exp(&z, 4).unwrap(), TSeriesPoly::one(r, 2, 4));
        let t = TSeriesPoly::from_i64s(r, 2, 3, &[0, 1]);
        let e = series_exp(&t, 3).unwrap();
        let half = r.one().div_int(2).unwrap();
        let sixth = r.one().div_int(6).unwrap();
        assert_eq!(e.coeff(0).coeff(0), r.one());
        assert_eq!(e.coeff(1).coeff(0), r.one());
        assert_eq!(e.coeff(2).coeff(0), half);
        assert_eq!(e.coeff(3).coeff(0), sixth);
    }

    #[test]
    fn exp_rejects_constant_term() {
        let r = zp(5, 6);
        let g = TSeriesPoly::from_i64s(r, 2, 3, &[1, 1]);
        assert!(matches!(series_exp(&g, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_of_log_series_is_linear() {
        // -sum p^d s^d / d = log(1 - p s)
        let p = 3u64;
        let r = zp(p, 12);
        let order = 5;
        let mut g = TSeriesPoly::zero(r, 3, order);
        for d in 1..=order {
            let c = r.from_u64(p.pow(d as u32)).div_int(d as i64).unwrap();
            g.coeffs[d] = -ZpTSeries::constant(c, 3);
        }
        let e = series_exp(&g, order).unwrap();
        assert_eq!(e, TSeriesPoly::from_i64s(r, 3, order, &[1, -(p as i64)]));
        // cross-check: (1 - p s) * exp(-g) = 1
        let inv = series_exp(&g.neg(), order).unwrap();
        let prod = TSeriesPoly::from_i64s(r, 3, order, &[1, -(p as i64)]).mul(&inv);
        assert_eq!(prod, TSeriesPoly::one(r, 3, order));
    }

    #[test]
    fn log_examples() {
        let p = 2u64;
        let r = zp(p, 16);
        assert!(series_log(&TSeriesPoly::one(r, 2, 4), 4).unwrap().is_zero());
        let g = TSeriesPoly::from_i64s(r, 2, 4, &[1, -2]);
        let l = series_log(&g, 4).unwrap();
        for d in 1..=4u32 {
            let expect = -(r.from_u64(2u64.pow(d)).div_int(d as i64).unwrap());
            assert_eq!(l.coeff(d as usize).coeff(0), expect);
        }
        assert!(series_log(&TSeriesPoly::from_i64s(r, 2, 2, &[2, 1]), 2).is_err());
    }

    #[test]
    fn artin_hasse_p2() {
        let r = zp(2, 3);
        let e = artin_hasse(r, 1, 4).unwrap();
        let got: Vec<u64> = (0..=4).map(|k| e.coeff(k).coeff(0).canonical()).collect();
        assert_eq!(got, vec![1, 1, 1, 6, 6]);
    }

    #[test]
    fn pi_low_order_terms() {
        for p in [2, 3, 5, 7] {
            let r = zp(p, 6);
            let pi = pi_from_t(r, 2).unwrap();
            assert_eq!(pi, ZpTSeries::t(r, 2));
        }
        let r = zp(2, 6);
        let pi = pi_from_t(r, 3).unwrap();
        assert_eq!(pi, ZpTSeries::from_i64s(r, 3, &[0, 1, -1]));
    }

    #[test]
    fn pi_round_trip() {
        for (p, b) in [(2, 8), (3, 10), (5, 6), (7, 12)] {
            let r = zp(p, 10);
            let pi = pi_from_t(r, b).unwrap();
            let e = artin_hasse(r, b, b - 1).unwrap();
            assert_eq!(e.evaluate(&pi).unwrap(), ZpTSeries::from_i64s(r, b, &[1, 1]));
        }
    }

    #[test]
    fn xseries_products() {
        let r = zp(3, 4);
        let one = ZpTSeries::one(r, 2);
        let x = XSeries::monomial(Geometry::AffineLine, FormKind::Function, 4, 1, one.clone()).unwrap();
        let x2 = XSeries::monomial(Geometry::AffineLine, FormKind::Function, 4, 2, one.clone()).unwrap();
        assert_eq!(x.mul(&x).unwrap(), x2);
        let unit = XSeries::one(Geometry::AffineLine, 4, r, 2);
        assert_eq!(unit.mul(&x2).unwrap(), x2);

        let xt = XSeries::monomial(Geometry::Torus, FormKind::Function, 3, 1, one.clone()).unwrap();
        let xinv = XSeries::monomial(Geometry::Torus, FormKind::Function, 3, -1, one.clone()).unwrap();
        assert_eq!(xt.mul(&xinv).unwrap(), XSeries::one(Geometry::Torus, 3, r, 2));

        assert!(matches!(x.mul(&xt), Err(Error::GeometryMismatch(_))));
        // truncation discards x^6
        let x3 = XSeries::monomial(Geometry::AffineLine, FormKind::Function, 4, 3, one).unwrap();
        assert!(x3.mul(&x3).unwrap().is_zero());
    }
}
