//! Exponential sums by direct enumeration:
//! `S_f(T, d) = sum_{x in X(F_{p^d})} (1+T)^{Tr f(x^)}` with `x^` the
//! Teichmüller lift of `x`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fredholm::{l_from_traces, LFunctionSeries, Route};
use crate::padic::{one_plus_t_pow, PrecisionProfile, ZpRing, ZpTSeries};
use crate::series::Geometry;
use crate::splitting::{power, TowerInput};
use crate::unramified::{self, fp_poly, UnramifiedApprox, UnramifiedRing};

/// Largest number of points a single sum may enumerate.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSumReport {
    /// `sums[d-1] = S_f(T, d)`.
    pub sums: Vec<ZpTSeries>,
    /// `point_counts[d-1] = #X(F_{p^d})`.
    pub point_counts: Vec<u64>,
}

fn check_budget(p: u64, e: usize) -> Result<u64> {
    let q = (p as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    if q > ENUMERATION_LIMIT as u128 {
        return Err(Error::EnumerationBudget { points: q, limit: ENUMERATION_LIMIT });
    }
    Ok(q as u64)
}

/// Base-`p` digits of `idx`, the coordinates of the field element.
fn digits_of(mut idx: u64, p: u64, e: usize) -> Vec<u64> {
    let mut out = vec![0u64; e];
    for d in out.iter_mut() {
        *d = idx % p;
        idx /= p;
    }
    out
}

fn point_count(geometry: Geometry, q: u64) -> u64 {
    match geometry {
        Geometry::AffineLine => q,
        Geometry::Torus => q - 1,
    }
}

/// Sums `(1+T)^{Tr g(x^)}` over `X(F_{p^e})` in the standard degree-`e`
/// extension.
fn enumerate<F>(zp: ZpRing, geometry: Geometry, e: usize, t_len: usize, g: F) -> Result<ZpTSeries>
where
    F: Fn(&UnramifiedApprox) -> Result<UnramifiedApprox> + Sync,
{
    let q = check_budget(zp.p(), e)?;
    let ring = UnramifiedRing::standard(zp, e);
    let start = match geometry {
        Geometry::AffineLine => 0,
        Geometry::Torus => 1,
    };
    (start..q)
        .into_par_iter()
        .map(|idx| {
            let x = unramified::from_residues(&ring, &digits_of(idx, zp.p(), e)).teichmuller_lift()?;
            one_plus_t_pow(g(&x)?.trace(), t_len)
        })
        .try_reduce(|| ZpTSeries::zero(zp, t_len), |a, b| Ok(&a + &b))
}

/// `S_f(T, d)` at the profile's precision.
pub fn exp_sum(tower: &TowerInput, d: usize, prof: &PrecisionProfile) -> Result<ZpTSeries> {
    if d == 0 {
        return Err(Error::InvalidProfile("degree must be at least 1".into()));
    }
    enumerate(prof.ring()?, tower.geometry(), d, prof.b, |x| tower.evaluate_lift(x))
}

/// `S_f(T, d)` for `d = 1..=dmax`.
pub fn exp_sums(tower: &TowerInput, prof: &PrecisionProfile) -> Result<ExpSumReport> {
    check_budget(tower.p(), prof.dmax)?;
    let mut sums = Vec::with_capacity(prof.dmax);
    let mut point_counts = Vec::with_capacity(prof.dmax);
    for d in 1..=prof.dmax {
        sums.push(exp_sum(tower, d, prof)?);
        point_counts.push(point_count(tower.geometry(), tower.p().pow(d as u32)));
    }
    Ok(ExpSumReport { sums, point_counts })
}

/// `L_f(T, s) = exp(-sum_d S_f(T, d) s^d / d)` from enumerated sums.
pub fn oracle_lfun(tower: &TowerInput, prof: &PrecisionProfile) -> Result<LFunctionSeries> {
    if prof.dmax < prof.smax {
        return Err(Error::InvalidProfile(format!("dmax = {} is below smax = {}", prof.dmax, prof.smax)));
    }
    let report = exp_sums(tower, &PrecisionProfile { dmax: prof.smax, ..*prof })?;
    l_from_traces(&report.sums, prof.smax, Route::Oracle)
}

/// A tower whose coefficients lie in `F_{p^m} = F_p[y]/(g(y))`. Each
/// coefficient is a polynomial in `y` of degree below `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqTower {
    p: u64,
    modulus: Vec<u64>,
    geometry: Geometry,
    coeffs: BTreeMap<i64, Vec<u64>>,
}

impl FqTower {
    /// `modulus` is monic of degree `m`, low coefficient first, and must be
    /// irreducible mod `p`.
    pub fn new(
        p: u64,
        modulus: Vec<u64>,
        geometry: Geometry,
        terms: impl IntoIterator<Item = (i64, Vec<u64>)>,
    ) -> Result<Self> {
        if !crate::padic::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.last() != Some(&1) || modulus.len() < 2 || !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        let m = modulus.len() - 1;
        let mut coeffs = BTreeMap::new();
        for (u, c) in terms {
            if u == 0 {
                continue;
            }
            if geometry == Geometry::AffineLine && u < 0 {
                return Err(Error::InvalidTower(format!("negative exponent {u} on the affine line")));
            }
            let c = fp_poly::rem(&c.iter().map(|x| x % p).collect::<Vec<_>>(), &modulus, p);
            let mut c = fp_poly::trim(c);
            if !c.is_empty() {
                c.resize(m, 0);
                coeffs.insert(u, c);
            }
        }
        Ok(FqTower { p, modulus, geometry, coeffs })
    }

    /// The same tower viewed over `F_{p^m}`.
    pub fn from_prime_field(tower: &TowerInput, modulus: Vec<u64>) -> Result<Self> {
        let terms: Vec<(i64, Vec<u64>)> = tower.coefficients().iter().map(|(&u, &c)| (u, vec![c])).collect();
        Self::new(tower.p(), modulus, tower.geometry(), terms)
    }

    pub fn extension_degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }
}

/// A root of `modulus` in the standard residue field of degree `e`, as
/// residues.
fn find_root(p: u64, modulus: &[u64], e: usize) -> Result<Vec<u64>> {
    let mod_p = ZpRing::new(p, 1)?;
    let field = UnramifiedRing::standard(mod_p, e);
    let q = check_budget(p, e)?;
    for idx in 0..q {
        let alpha = unramified::from_residues(&field, &digits_of(idx, p, e));
        let mut acc = unramified::zero(&field);
        for &c in modulus.iter().rev() {
            acc = acc.mul(&alpha).add(&unramified::embed(&field, mod_p.from_u64(c)));
        }
        if acc.is_zero() {
            return Ok(alpha.residues_mod_p());
        }
    }
    Err(Error::Internal(format!("no root of the degree-{} modulus in F_{p}^{e}", modulus.len() - 1)))
}

/// Sum over `x in X(F_{q^d})`, `q = p^m`, of `(1+T)^{Tr_{F_{q^d}/F_p} f(x^)}`.
pub fn exp_sum_fq(tower: &FqTower, d: usize, prof: &PrecisionProfile) -> Result<ZpTSeries> {
    let zp = prof.ring()?;
    let e = tower.extension_degree() * d;
    check_budget(tower.p, e)?;
    let ring: Arc<UnramifiedRing> = UnramifiedRing::standard(zp, e);
    let mod_p = ZpRing::new(tower.p, 1)?;
    let field = UnramifiedRing::standard(mod_p, e);
    let alpha = unramified::from_residues(&field, &find_root(tower.p, &tower.modulus, e)?);
    let mut lifted = Vec::new();
    for (&u, c) in &tower.coeffs {
        let mut acc = unramified::zero(&field);
        for &ci in c.iter().rev() {
            acc = acc.mul(&alpha).add(&unramified::embed(&field, mod_p.from_u64(ci)));
        }
        let teich = unramified::from_residues(&ring, &acc.residues_mod_p()).teichmuller_lift()?;
        lifted.push((u, teich));
    }
    enumerate(zp, tower.geometry, e, prof.b, |x| {
        let mut acc = unramified::zero(x.ring());
        for (u, c) in &lifted {
            acc = acc.add(&power(x, *u)?.mul(c));
        }
        Ok(acc)
    })
}

/// L-series of an [`FqTower`] over `F_{p^m}`.
pub fn oracle_lfun_fq(tower: &FqTower, prof: &PrecisionProfile) -> Result<LFunctionSeries> {
    let sums: Result<Vec<_>> = (1..=prof.smax).map(|d| exp_sum_fq(tower, d, prof)).collect();
    l_from_traces(&sums?, prof.smax, Route::Oracle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prof(p: u64, b: usize, dmax: usize) -> PrecisionProfile {
        PrecisionProfile::auto(p, 6, b, dmax, dmax, 1).unwrap()
    }

    #[test]
    fn zero_tower_counts_points() {
        let pr = prof(3, 4, 3);
        let r = pr.ring().unwrap();
        let rep = exp_sums(&TowerInput::zero(3, Geometry::AffineLine).unwrap(), &pr).unwrap();
        assert_eq!(rep.sums, vec![
            ZpTSeries::from_i64s(r, 4, &[3]),
            ZpTSeries::from_i64s(r, 4, &[9]),
            ZpTSeries::from_i64s(r, 4, &[27])
        ]);
        let rep = exp_sums(&TowerInput::zero(3, Geometry::Torus).unwrap(), &pr).unwrap();
        assert_eq!(rep.point_counts, vec![2, 8, 26]);
        assert_eq!(rep.sums[1], ZpTSeries::from_i64s(r, 4, &[8]));
    }

    #[test]
    fn hand_enumerations() {
        let pr = prof(2, 3, 2);
        let r = pr.ring().unwrap();
        let f = TowerInput::new(2, Geometry::AffineLine, [(1, 1)]).unwrap();
        assert_eq!(exp_sum(&f, 1, &pr).unwrap(), ZpTSeries::from_i64s(r, 3, &[2, 1]));
        assert_eq!(exp_sum(&f, 2, &pr).unwrap(), ZpTSeries::from_i64s(r, 3, &[4, 0, 3]));
        let l = oracle_lfun(&f, &pr).unwrap();
        assert_eq!(l.coeff(1), &-ZpTSeries::from_i64s(r, 3, &[2, 1]));
    }

    #[test]
    fn budget_is_enforced() {
        let pr = PrecisionProfile::auto(7, 2, 2, 9, 9, 1).unwrap();
        let f = TowerInput::new(7, Geometry::AffineLine, [(1, 1)]).unwrap();
        assert!(matches!(exp_sum(&f, 9, &pr), Err(Error::EnumerationBudget { .. })));
    }

    #[test]
    fn fq_tower_matches_prime_field() {
        let pr = prof(2, 4, 2);
        let f = TowerInput::new(2, Geometry::Torus, [(1, 1), (-1, 1), (3, 1)]).unwrap();
        let over_f4 = FqTower::from_prime_field(&f, vec![1, 1, 1]).unwrap();
        for d in 1..=2 {
            assert_eq!(exp_sum_fq(&over_f4, d, &pr).unwrap(), exp_sum(&f, 2 * d, &pr).unwrap());
        }
        let over_f2 = FqTower::from_prime_field(&f, vec![0, 1]).unwrap();
        assert_eq!(exp_sum_fq(&over_f2, 2, &pr).unwrap(), exp_sum(&f, 2, &pr).unwrap());
    }

    #[test]
    fn fq_tower_with_genuine_coefficient() {
        // f = y x over F_4: the sum over F_4 of (1+T)^{Tr(y x)} is q at T=0
        let pr = prof(2, 4, 1);
        let r = pr.ring().unwrap();
        let t = FqTower::new(2, vec![1, 1, 1], Geometry::AffineLine, [(1, vec![0, 1])]).unwrap();
        let s = exp_sum_fq(&t, 1, &pr).unwrap();
        assert_eq!(s.coeff(0), r.from_u64(4));
        assert!(FqTower::new(2, vec![1, 0, 1], Geometry::AffineLine, []).is_err());
    }
}
