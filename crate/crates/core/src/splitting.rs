//! Towers `f = sum_u c_u x^u` with `c_u in F_p` and their splitting
//! functions `E_f = prod_u E(pi [c_u] x^u)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{is_prime, PrecisionProfile, ZpRing, ZpTSeries};
use crate::series::{artin_hasse, pi_from_t, Geometry, TSeriesPoly, XSeries};
use crate::unramified::{
    self, teichmuller_zp, UnramifiedApprox, UnramifiedRing, UnramifiedTSeries,
};

/// A Laurent polynomial over `F_p` defining a `Z_p`-tower over `A^1` or
/// `G_m`. The constant term is dropped: it only multiplies the L-function by
/// a global unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerInput {
    p: u64,
    geometry: Geometry,
    coeffs: BTreeMap<i64, u64>,
    dropped_constant: bool,
}

impl TowerInput {
    /// Terms are `(exponent, integer coefficient)`; coefficients are reduced
    /// mod `p` and repeated exponents are summed.
    pub fn new(p: u64, geometry: Geometry, terms: impl IntoIterator<Item = (i64, i64)>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut coeffs: BTreeMap<i64, u64> = BTreeMap::new();
        for (u, c) in terms {
            if geometry == Geometry::AffineLine && u < 0 {
                return Err(Error::InvalidTower(format!("negative exponent {u} on the affine line")));
            }
            let c = (c as i128).rem_euclid(p as i128) as u64;
            let e = coeffs.entry(u).or_insert(0);
            *e = (*e + c) % p;
        }
        let dropped_constant = coeffs.remove(&0).is_some_and(|c| c != 0);
        coeffs.retain(|_, c| *c != 0);
        Ok(TowerInput { p, geometry, coeffs, dropped_constant })
    }

    pub fn zero(p: u64, geometry: Geometry) -> Result<Self> {
        Self::new(p, geometry, [])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Nonzero coefficients by exponent.
    pub fn coefficients(&self) -> &BTreeMap<i64, u64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `max |u|` over the nonzero terms (0 for the zero tower).
    pub fn degree(&self) -> u64 {
        self.coeffs.keys().map(|u| u.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = vec![];
        if self.dropped_constant {
            out.push("constant term of f dropped".to_string());
        }
        if self.is_zero() {
            out.push("f is zero: the L-function is the zeta function".to_string());
        } else if self.degree() % self.p == 0 {
            out.push(format!("degree {} is divisible by p = {}; slope analyses may not apply", self.degree(), self.p));
        }
        out
    }

    /// `f(x)` evaluated at a point of `Z_{p^e}` with Teichmüller coefficients
    /// `[c_u]`. On the torus the point must be a Teichmüller unit.
    pub fn evaluate_lift(&self, x: &UnramifiedApprox) -> Result<UnramifiedApprox> {
        let ring = x.ring();
        let zp = ring.zp();
        let mut acc = unramified::zero(ring);
        for (&u, &c) in &self.coeffs {
            let xu = power(x, u)?;
            acc = acc.add(&xu.scale(teichmuller_zp(zp, c)));
        }
        Ok(acc)
    }
}

/// `x^u`, with `x^{-1} = x^{q-2}` for Teichmüller units.
pub(crate) fn power(x: &UnramifiedApprox, u: i64) -> Result<UnramifiedApprox> {
    if u >= 0 {
        return Ok(x.pow(u as u64));
    }
    let q = x.ring().residue_field_size();
    let inv = x.pow(q - 2);
    if !inv.mul(x).same_residues(&unramified::one(x.ring())) {
        return Err(Error::Domain("negative powers need a Teichmüller unit".into()));
    }
    Ok(inv.pow(u.unsigned_abs()))
}

/// Shared data for building Artin-Hasse factors at one precision.
#[derive(Clone, Debug)]
pub struct SplittingContext {
    ring: ZpRing,
    t_len: usize,
    pi: ZpTSeries,
    artin_hasse: TSeriesPoly,
}

impl SplittingContext {
    pub fn new(ring: ZpRing, t_len: usize) -> Result<Self> {
        let order = t_len.max(2) - 1;
        Ok(SplittingContext { ring, t_len, pi: pi_from_t(ring, t_len)?, artin_hasse: artin_hasse(ring, t_len, order)? })
    }

    pub fn ring(&self) -> ZpRing {
        self.ring
    }

    pub fn t_len(&self) -> usize {
        self.t_len
    }

    pub fn pi(&self) -> &ZpTSeries {
        &self.pi
    }

    pub fn artin_hasse(&self) -> &TSeriesPoly {
        &self.artin_hasse
    }

    /// `E(pi [c] x^u) = sum_k E_k (pi [c])^k x^{ku}`, truncated at
    /// `|ku| <= degree_bound` and `T^t_len`.
    pub fn factor(&self, c: u64, u: i64, geometry: Geometry, degree_bound: usize) -> Result<XSeries> {
        let mut out = XSeries::one(geometry, degree_bound, self.ring, self.t_len);
        if c % self.ring.p() == 0 {
            return Ok(out);
        }
        if u == 0 {
            return Err(Error::Domain("constant terms do not get a splitting factor".into()));
        }
        if geometry == Geometry::AffineLine && u < 0 {
            return Err(Error::Domain(format!("negative exponent {u} on the affine line")));
        }
        let z = self.pi.scale(teichmuller_zp(self.ring, c));
        let mut zk = ZpTSeries::one(self.ring, self.t_len);
        for k in 1..self.t_len {
            zk = &zk * &z;
            let e = k as i64 * u;
            if !out.in_range(e) {
                break;
            }
            out.set(e, &zk * self.artin_hasse.coeff(k));
        }
        Ok(out)
    }
}

/// Convenience wrapper for [`SplittingContext::factor`].
pub fn splitting_factor(c: u64, u: i64, geometry: Geometry, degree_bound: usize, ctx: &SplittingContext) -> Result<XSeries> {
    ctx.factor(c, u, geometry, degree_bound)
}

/// `E_f`, complete modulo `T^t_len`: it is stored up to `|x|`-degree
/// `d * t_len`, beyond which every coefficient vanishes mod `T^t_len`.
#[derive(Clone, Debug)]
pub struct SplittingFunction {
    series: XSeries,
    source: TowerInput,
    pi: ZpTSeries,
}

impl SplittingFunction {
    pub fn build(tower: &TowerInput, ctx: &SplittingContext) -> Result<Self> {
        let bound = (tower.degree().max(1) as usize) * ctx.t_len();
        let mut series = XSeries::one(tower.geometry(), bound, ctx.ring(), ctx.t_len());
        for (&u, &c) in tower.coefficients() {
            series = series.mul(&ctx.factor(c, u, tower.geometry(), bound)?)?;
        }
        Ok(SplittingFunction { series, source: tower.clone(), pi: ctx.pi().clone() })
    }

    pub fn series(&self) -> &XSeries {
        &self.series
    }

    pub fn source(&self) -> &TowerInput {
        &self.source
    }

    pub fn t_len(&self) -> usize {
        self.series.t_len()
    }

    /// The element `pi` the factors were built with.
    pub fn pi(&self) -> &ZpTSeries {
        &self.pi
    }

    pub fn ring(&self) -> ZpRing {
        self.series.ring()
    }

    /// Lower bound `ceil(|k| / d)` on the T-adic valuation of the coefficient
    /// of `x^k`.
    pub fn growth_bound(&self, k: i64) -> u32 {
        let d = self.source.degree();
        if d == 0 {
            return if k == 0 { 0 } else { u32::MAX };
        }
        k.unsigned_abs().div_ceil(d) as u32
    }

    /// Whether every stored coefficient satisfies [`Self::growth_bound`] and
    /// the constant term is `1 mod T`.
    pub fn satisfies_invariants(&self) -> bool {
        let c0 = self.series.coeff_or_zero(0);
        let zp = self.ring();
        if !c0.coeff(0).congruent(&zp.one(), u32::MAX) {
            return false;
        }
        self.series.exponents().all(|k| {
            let c = self.series.coeff_or_zero(k);
            let bound = self.growth_bound(k).min(c.len() as u32);
            c.t_valuation().value() >= bound
        })
    }

    /// `E_f(x)` at a point of `Z_{p^e}`.
    pub fn evaluate(&self, x: &UnramifiedApprox) -> Result<UnramifiedTSeries> {
        let ring = x.ring();
        let mut acc = UnramifiedTSeries::zero(ring, self.t_len());
        for (k, c) in self.series.terms() {
            acc.add_assign(&UnramifiedTSeries::from_product(c, &power(x, k)?));
        }
        Ok(acc)
    }

    /// `N_{k(x)/F_p} E_f(x)`: the product of `E_f` over the Frobenius
    /// conjugates `x, x^p, ..., x^{p^{e-1}}` of a Teichmüller point.
    pub fn fiber_norm(&self, x: &UnramifiedApprox) -> Result<ZpTSeries> {
        let ring = x.ring();
        let p = ring.zp().p();
        let mut acc = UnramifiedTSeries::one(ring, self.t_len());
        let mut conj = x.clone();
        for _ in 0..ring.degree() {
            acc = acc.mul(&self.evaluate(&conj)?);
            conj = conj.pow(p);
        }
        acc.as_base().ok_or_else(|| Error::Internal("norm of E_f does not lie in Z_p[[T]]".into()))
    }
}

/// `E_f` at the profile's T-adic precision.
pub fn build_ef(tower: &TowerInput, prof: &PrecisionProfile) -> Result<SplittingFunction> {
    let ctx = SplittingContext::new(prof.ring()?, prof.b)?;
    SplittingFunction::build(tower, &ctx)
}

/// `(1+T)^{Tr f(x)}` at a Teichmüller point, the value the fiber norm must
/// reproduce.
pub fn fiber_character(tower: &TowerInput, x: &UnramifiedApprox, t_len: usize) -> Result<ZpTSeries> {
    let value = tower.evaluate_lift(x)?;
    crate::padic::one_plus_t_pow(value.trace(), t_len)
}

/// All Teichmüller points of `X(F_{p^e})`, in the standard degree-`e`
/// extension.
pub fn teichmuller_points(zp: ZpRing, geometry: Geometry, e: usize) -> Result<Vec<UnramifiedApprox>> {
    let ring: Arc<UnramifiedRing> = UnramifiedRing::standard(zp, e);
    let q = ring.residue_field_size();
    let p = zp.p();
    let mut out = vec![];
    for idx in 0..q {
        let mut digits = vec![0u64; e];
        let mut n = idx;
        for d in digits.iter_mut() {
            *d = n % p;
            n /= p;
        }
        if geometry == Geometry::Torus && idx == 0 {
            continue;
        }
        out.push(unramified::from_residues(&ring, &digits).teichmuller_lift()?);
    }
    Ok(out)
}
