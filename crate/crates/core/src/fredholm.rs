//! Fredholm series `det(1 - s M)`, power traces, and the two ways of
//! assembling `L_f(T, s)`.

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::{ZpRing, ZpTSeries};
use crate::series::{exp_from_weights, TSeriesPoly};

/// `det(1 - s M) mod s^{smax+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FredholmSeries {
    series: TSeriesPoly,
    label: String,
}

impl FredholmSeries {
    pub fn new(series: TSeriesPoly, label: impl Into<String>) -> Self {
        FredholmSeries { series, label: label.into() }
    }

    pub fn series(&self) -> &TSeriesPoly {
        &self.series
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coeff(&self, k: usize) -> &ZpTSeries {
        self.series.coeff(k)
    }

    pub fn smax(&self) -> usize {
        self.series.order()
    }

    /// Every stored coefficient is a residue mod `p^N`, so integrality holds
    /// by construction; this reports whether the constant term is 1 and
    /// every coefficient is known to at least `digits` p-adic digits.
    pub fn is_integral_to(&self, digits: u32) -> bool {
        self.coeff(0) == &ZpTSeries::one(self.series.ring(), self.series.t_len())
            && self.series.coeffs().iter().all(|c| c.min_digits() >= digits)
    }
}

/// Which computation produced an L-series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    TraceFormula,
    PowerTraces,
    Oracle,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::TraceFormula => "trace-formula",
            Route::PowerTraces => "power-traces",
            Route::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LFunctionSeries {
    series: TSeriesPoly,
    route: Route,
}

impl LFunctionSeries {
    pub fn new(series: TSeriesPoly, route: Route) -> Self {
        LFunctionSeries { series, route }
    }

    pub fn series(&self) -> &TSeriesPoly {
        &self.series
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn coeff(&self, k: usize) -> &ZpTSeries {
        self.series.coeff(k)
    }

    pub fn smax(&self) -> usize {
        self.series.order()
    }

    pub fn t_len(&self) -> usize {
        self.series.t_len()
    }

    pub fn ring(&self) -> ZpRing {
        self.series.ring()
    }

    /// Smallest p-adic precision over all coefficients.
    pub fn effective_digits(&self) -> u32 {
        self.series.min_digits()
    }

    /// Residue tables `[s-index][T-index]` modulo `p^digits`.
    pub fn residues(&self, digits: u32) -> Vec<Vec<u64>> {
        self.series.coeffs().iter().map(|c| c.residues_mod(digits)).collect()
    }

    /// Position `(s-index, T-index)` of the first coefficient where `self`
    /// and `other` differ modulo `p^digits`, after truncating both to the
    /// shorter `s`- and `T`-ranges.
    pub fn first_difference(&self, other: &Self, digits: u32) -> Option<(usize, usize)> {
        let order = self.smax().min(other.smax());
        let t_len = self.t_len().min(other.t_len());
        for k in 0..=order {
            let a = self.coeff(k);
            let b = other.coeff(k);
            for j in 0..t_len {
                if !a.coeff(j).congruent(&b.coeff(j), digits) {
                    return Some((k, j));
                }
            }
        }
        None
    }

    /// The constant term in `T`, as a series in `s` with `T`-precision 1.
    pub fn at_t_zero(&self) -> Vec<u64> {
        self.series.coeffs().iter().map(|c| c.coeff(0).residue()).collect()
    }
}

/// Division-free characteristic series via the bordering recurrence
/// `det(1 - s M_{r+1}) = det(1 - s M_r) (1 - a s - sum_j R A^j C s^{j+2})`,
/// where `M_{r+1} = [[A, C], [R, a]]`.
pub fn char_series(m: &SeriesMatrix, smax: usize) -> FredholmSeries {
    let ring = m.ring();
    let t_len = m.t_len();
    let mut acc = TSeriesPoly::one(ring, t_len, smax);
    for r in 0..m.dim() {
        let mut factor = TSeriesPoly::one(ring, t_len, smax);
        let mut coeffs = factor.coeffs().to_vec();
        if smax >= 1 {
            coeffs[1] = -m.get(r, r);
        }
        if smax >= 2 && r > 0 {
            let mut v: Vec<ZpTSeries> = (0..r).map(|i| m.get(i, r).clone()).collect();
            let mut mask: Vec<bool> = (0..r).map(|i| m.is_nonzero(i, r)).collect();
            for j in 0..=smax - 2 {
                if !mask.iter().any(|&b| b) {
                    break;
                }
                let mut dot = ZpTSeries::zero(ring, t_len);
                for k in 0..r {
                    if mask[k] && m.is_nonzero(r, k) {
                        dot += &(m.get(r, k) * &v[k]);
                    }
                }
                coeffs[j + 2] -= &dot;
                if j + 2 < smax {
                    v = m.mul_vec(&v, &mask, r);
                    mask = v.iter().map(|x| !x.is_zero()).collect();
                }
            }
        }
        factor = TSeriesPoly::from_coeffs(coeffs);
        acc = acc.mul(&factor);
    }
    FredholmSeries::new(acc, format!("det(1 - sM), {}x{}", m.dim(), m.dim()))
}

/// `Tr(M^d)` for `d = 1..=dmax`.
pub fn power_traces(m: &SeriesMatrix, dmax: usize) -> Vec<ZpTSeries> {
    let mut out = Vec::with_capacity(dmax);
    if dmax == 0 {
        return out;
    }
    let mut pow = m.clone();
    out.push(pow.trace());
    for _ in 1..dmax {
        pow = pow.mul(m);
        out.push(pow.trace());
    }
    out
}

/// `exp(-sum_d S_d s^d / d) mod s^{smax+1}`.
pub fn l_from_traces(sums: &[ZpTSeries], smax: usize, route: Route) -> Result<LFunctionSeries> {
    if sums.len() < smax {
        return Err(Error::InvalidProfile(format!("{} sums given, {smax} needed", sums.len())));
    }
    let ring = sums.first().map(|s| s.ring());
    let mut weights = Vec::with_capacity(smax + 1);
    match ring {
        Some(r) => weights.push(ZpTSeries::zero(r, sums[0].len())),
        None => return Err(Error::InvalidProfile("no exponential sums given".into())),
    }
    weights.extend(sums[..smax].iter().map(|s| -s));
    Ok(LFunctionSeries::new(exp_from_weights(&weights, smax)?, route))
}

/// `C(psi_0, s) / C(psi_1, s)`.
pub fn l_trace_formula(c0: &FredholmSeries, c1: &FredholmSeries) -> Result<LFunctionSeries> {
    Ok(LFunctionSeries::new(c0.series().div(c1.series())?, Route::TraceFormula))
}

/// `S_d = Tr(psi_0^d) - Tr(psi_1^d)`.
pub fn trace_differences(t0: &[ZpTSeries], t1: &[ZpTSeries]) -> Vec<ZpTSeries> {
    t0.iter().zip(t1).map(|(a, b)| a - b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64, n: u32) -> ZpRing {
        ZpRing::new(p, n).unwrap()
    }

    fn poly(r: ZpRing, t_len: usize, order: usize, c: &[i64]) -> TSeriesPoly {
        TSeriesPoly::from_i64s(r, t_len, order, c)
    }

    #[test]
    fn char_series_examples() {
        let r = zp(2, 8);
        assert_eq!(char_series(&SeriesMatrix::zero(r, 3, 2), 3).series(), &poly(r, 2, 3, &[1]));
        let lam = ZpTSeries::from_i64s(r, 2, &[3, 1]);
        let one = SeriesMatrix::from_rows(r, 1, 2, vec![lam.clone()]);
        let c = char_series(&one, 3);
        assert_eq!(c.coeff(1), &-&lam);
        assert!(c.coeff(2).is_zero());
        // 3x3 theta_0 example for f = 0, p = 2
        let s = |x: i64| ZpTSeries::from_i64s(r, 2, &[x]);
        let m = SeriesMatrix::from_rows(r, 3, 2, vec![s(2), s(0), s(0), s(0), s(0), s(2), s(0), s(0), s(0)]);
        assert_eq!(char_series(&m, 3).series(), &poly(r, 2, 3, &[1, -2]));
        assert_eq!(power_traces(&m, 3), vec![s(2), s(4), s(8)]);
    }

    #[test]
    fn char_series_matches_2x2_determinant() {
        // det(1 - sM) = 1 - tr(M) s + det(M) s^2
        let r = zp(3, 6);
        let e = |c: &[i64]| ZpTSeries::from_i64s(r, 3, c);
        let (a, b, c, d) = (e(&[1, 2]), e(&[0, 1]), e(&[5]), e(&[2, 0, 1]));
        let m = SeriesMatrix::from_rows(r, 2, 3, vec![a.clone(), b.clone(), c.clone(), d.clone()]);
        let cs = char_series(&m, 4);
        assert_eq!(cs.coeff(1), &-(&a + &d));
        assert_eq!(cs.coeff(2), &(&(&a * &d) - &(&b * &c)));
        assert!(cs.coeff(3).is_zero() && cs.coeff(4).is_zero());
        assert!(cs.is_integral_to(6));
    }

    #[test]
    fn l_from_traces_examples() {
        let r = zp(2, 10);
        let pow2: Vec<_> = (1..=4).map(|d| ZpTSeries::from_i64s(r, 3, &[1 << d])).collect();
        let l = l_from_traces(&pow2, 4, Route::Oracle).unwrap();
        assert_eq!(l.series(), &poly(r, 3, 4, &[1, -2]));
        let torus: Vec<_> = (1..=4).map(|d| ZpTSeries::from_i64s(r, 3, &[(1 << d) - 1])).collect();
        let l = l_from_traces(&torus, 4, Route::Oracle).unwrap();
        // (1 - 2s)/(1 - s) = 1 - s - s^2 - s^3 - s^4
        assert_eq!(l.series(), &poly(r, 3, 4, &[1, -1, -1, -1, -1]));
        let zeros = vec![ZpTSeries::zero(r, 3); 4];
        assert_eq!(l_from_traces(&zeros, 4, Route::Oracle).unwrap().series(), &poly(r, 3, 4, &[1]));
        assert!(l_from_traces(&zeros, 5, Route::Oracle).is_err());
    }

    #[test]
    fn trace_formula_quotient() {
        let r = zp(2, 8);
        let c0 = FredholmSeries::new(poly(r, 2, 3, &[1, -2]), "c0");
        let c1 = FredholmSeries::new(poly(r, 2, 3, &[1, -1]), "c1");
        let l = l_trace_formula(&c0, &c1).unwrap();
        assert_eq!(l.series(), &poly(r, 2, 3, &[1, -1, -1, -1]));
        assert_eq!(l.route(), Route::TraceFormula);
        assert_eq!(l.first_difference(&l.clone(), 8), None);
    }
}
