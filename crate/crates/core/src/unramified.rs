//! The unramified extension `Z_{p^d} = Z_p[xi]/(m(xi))` truncated mod `p^N`,
//! with Teichmüller lifts and the ring trace down to `Z_p`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{ZpApprox, ZpRing, ZpTSeries};

/// Polynomials over `F_p`, low degree first, no trailing zeros.
pub mod fp_poly {
    use crate::padic::{inv_mod, mul_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        assert!(!m.is_empty(), "division by the zero polynomial");
        let mut r = trim(a.to_vec());
        let lead_inv = inv_mod(*m.last().unwrap(), p).expect("leading coefficient is a unit");
        while r.len() >= m.len() {
            let shift = r.len() - m.len();
            let c = mul_mod(*r.last().unwrap(), lead_inv, p);
            for (j, &mj) in m.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p - mul_mod(c, mj, p)) % p;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            e >>= 1;
            if e > 0 {
                b = rem(&mul(&b, &b, p), m, p);
            }
        }
        acc
    }

    fn prime_factors(mut n: usize) -> Vec<usize> {
        let mut out = vec![];
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's test: `f` of degree `n` is irreducible iff `x^{p^n} = x mod f`
    /// and `gcd(x^{p^{n/q}} - x, f) = 1` for every prime `q | n`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.iter().map(|c| c % p).collect());
        if f.len() < 2 {
            return false;
        }
        let n = f.len() - 1;
        if n == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        let frob_iter = |k: usize| {
            let mut y = x.clone();
            for _ in 0..k {
                y = pow_mod(&y, p, &f, p);
            }
            y
        };
        if sub(&frob_iter(n), &rem(&x, &f, p), p) != Vec::<u64>::new() {
            return false;
        }
        prime_factors(n).into_iter().all(|q| {
            let h = sub(&frob_iter(n / q), &x, p);
            gcd(&h, &f, p).len() == 1
        })
    }

    /// The lexicographically first monic irreducible polynomial of degree `d`.
    pub fn find_irreducible(p: u64, d: usize) -> Vec<u64> {
        assert!(d >= 1);
        if d == 1 {
            return vec![0, 1];
        }
        let mut lower = vec![0u64; d];
        loop {
            let mut f = lower.clone();
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
            let mut i = 0;
            loop {
                lower[i] += 1;
                if lower[i] < p {
                    break;
                }
                lower[i] = 0;
                i += 1;
                assert!(i < d, "every degree has an irreducible polynomial");
            }
        }
    }
}

/// `Z_p[xi] / (m(xi))` for a monic `m` irreducible mod `p`, with coefficients
/// in the working ring.
#[derive(Debug, PartialEq, Eq)]
pub struct UnramifiedRing {
    zp: ZpRing,
    modulus: Vec<u64>,
}

impl UnramifiedRing {
    /// `modulus` is given low degree first and must be monic and irreducible
    /// mod `p`.
    pub fn new(zp: ZpRing, modulus: &[u64]) -> Result<Arc<Self>> {
        let p = zp.p();
        if modulus.len() < 2 || modulus.last() != Some(&1) {
            return Err(Error::Domain("modulus must be monic of degree at least 1".into()));
        }
        if !fp_poly::is_irreducible(modulus, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Arc::new(UnramifiedRing { zp, modulus: modulus.to_vec() }))
    }

    /// Extension of degree `d` defined by [`fp_poly::find_irreducible`].
    pub fn standard(zp: ZpRing, d: usize) -> Arc<Self> {
        let m = fp_poly::find_irreducible(zp.p(), d);
        Self::new(zp, &m).expect("find_irreducible returns an irreducible polynomial")
    }

    pub fn zp(&self) -> ZpRing {
        self.zp
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Cardinality `p^d` of the residue field.
    pub fn residue_field_size(&self) -> u64 {
        self.zp.p().pow(self.degree() as u32)
    }

    fn reduce(&self, mut prod: Vec<ZpApprox>) -> Vec<ZpApprox> {
        let d = self.degree();
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            for j in 0..d {
                prod[k - d + j] = prod[k - d + j] - c * self.zp.from_u64(self.modulus[j]);
            }
        }
        prod.truncate(d);
        prod
    }
}

pub fn zero(ring: &Arc<UnramifiedRing>) -> UnramifiedApprox {
    UnramifiedApprox { ring: ring.clone(), coords: vec![ring.zp.zero(); ring.degree()] }
}

pub fn one(ring: &Arc<UnramifiedRing>) -> UnramifiedApprox {
    embed(ring, ring.zp.one())
}

pub fn embed(ring: &Arc<UnramifiedRing>, c: ZpApprox) -> UnramifiedApprox {
    let mut z = zero(ring);
    z.coords[0] = c;
    z
}

/// The class of `xi`.
pub fn generator(ring: &Arc<UnramifiedRing>) -> UnramifiedApprox {
    let mut coords = vec![ring.zp.zero(); ring.degree() + 1];
    coords[1] = ring.zp.one();
    UnramifiedApprox { ring: ring.clone(), coords: ring.reduce(coords) }
}

/// The naive lift of a residue-field element given by its coordinates mod `p`.
pub fn from_residues(ring: &Arc<UnramifiedRing>, residues: &[u64]) -> UnramifiedApprox {
    assert_eq!(residues.len(), ring.degree());
    UnramifiedApprox { ring: ring.clone(), coords: residues.iter().map(|&r| ring.zp.from_u64(r)).collect() }
}

/// Teichmüller representative in `Z_p` of a residue `c mod p`.
pub fn teichmuller_zp(zp: ZpRing, c: u64) -> ZpApprox {
    let r = UnramifiedRing::standard(zp, 1);
    let t = from_residues(&r, &[c % zp.p()]).teichmuller_lift().expect("full precision residue");
    t.coords[0]
}

/// An element of `Z_{p^d}` modulo `p^N`.
#[derive(Clone, Debug)]
pub struct UnramifiedApprox {
    ring: Arc<UnramifiedRing>,
    coords: Vec<ZpApprox>,
}

impl UnramifiedApprox {
    pub fn ring(&self) -> &Arc<UnramifiedRing> {
        &self.ring
    }

    pub fn coords(&self) -> &[ZpApprox] {
        &self.coords
    }

    pub fn residues_mod_p(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.residue_mod(1)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + b).collect();
        UnramifiedApprox { ring: self.ring.clone(), coords }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect();
        UnramifiedApprox { ring: self.ring.clone(), coords }
    }

    pub fn scale(&self, c: ZpApprox) -> Self {
        UnramifiedApprox { ring: self.ring.clone(), coords: self.coords.iter().map(|&x| x * c).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert!(Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring);
        let d = self.ring.degree();
        let zp = self.ring.zp;
        let mut prod = vec![zp.zero(); 2 * d - 1];
        for (i, &a) in self.coords.iter().enumerate() {
            if a.is_zero() && a.digits() == zp.digits() {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                prod[i + j] = prod[i + j] + a * b;
            }
        }
        UnramifiedApprox { ring: self.ring.clone(), coords: self.ring.reduce(prod) }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = one(&self.ring);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact equality of the residues at full working precision.
    pub fn same_residues(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a.residue() == b.residue())
    }

    /// Trace of multiplication by `self` in the basis `1, xi, ..., xi^{d-1}`.
    pub fn trace(&self) -> ZpApprox {
        let xi = generator(&self.ring);
        let mut acc = self.ring.zp.zero();
        let mut v = self.clone();
        for j in 0..self.ring.degree() {
            acc = acc + v.coords[j];
            v = v.mul(&xi);
        }
        acc
    }

    /// The Teichmüller representative congruent to `self` mod `p`: the fixed
    /// point of `t -> t^{p^d}`, reached by iterating from `self`.
    pub fn teichmuller_lift(&self) -> Result<Self> {
        if self.coords.iter().any(|c| c.digits() == 0) {
            return Err(Error::PrecisionExhausted("Teichmüller lift needs the residue mod p".into()));
        }
        let q = self.ring.residue_field_size();
        let mut t = from_residues(&self.ring, &self.residues_mod_p());
        for _ in 0..=self.ring.zp.digits() + 1 {
            let next = t.pow(q);
            if next.same_residues(&t) {
                return Ok(next);
            }
            t = next;
        }
        Err(Error::Internal("Teichmüller iteration failed to converge".into()))
    }
}

impl PartialEq for UnramifiedApprox {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.coords == other.coords
    }
}

/// `Z_{p^d}[[T]]` truncated: one T-series per basis coordinate.
#[derive(Clone, Debug)]
pub struct UnramifiedTSeries {
    ring: Arc<UnramifiedRing>,
    coords: Vec<ZpTSeries>,
}

impl UnramifiedTSeries {
    pub fn zero(ring: &Arc<UnramifiedRing>, len: usize) -> Self {
        UnramifiedTSeries { ring: ring.clone(), coords: vec![ZpTSeries::zero(ring.zp, len); ring.degree()] }
    }

    pub fn one(ring: &Arc<UnramifiedRing>, len: usize) -> Self {
        let mut s = Self::zero(ring, len);
        s.coords[0] = ZpTSeries::one(ring.zp, len);
        s
    }

    pub fn coords(&self) -> &[ZpTSeries] {
        &self.coords
    }

    /// `series * x` for a scalar series and an unramified constant.
    pub fn from_product(series: &ZpTSeries, x: &UnramifiedApprox) -> Self {
        UnramifiedTSeries { ring: x.ring.clone(), coords: x.coords.iter().map(|&c| series.scale(c)).collect() }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += b;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.ring.degree();
        let zp = self.ring.zp;
        let len = self.coords[0].len();
        let mut prod = vec![ZpTSeries::zero(zp, len); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate() {
            for (j, b) in other.coords.iter().enumerate() {
                prod[i + j] += &(a * b);
            }
        }
        for k in (d..prod.len()).rev() {
            let c = prod[k].clone();
            for j in 0..d {
                let m = self.ring.modulus[j];
                if m != 0 {
                    prod[k - d + j] -= &c.scale(zp.from_u64(m));
                }
            }
        }
        prod.truncate(d);
        UnramifiedTSeries { ring: self.ring.clone(), coords: prod }
    }

    /// The series when every non-constant coordinate vanishes.
    pub fn as_base(&self) -> Option<ZpTSeries> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zp(p: u64, n: u32) -> ZpRing {
        ZpRing::new(p, n).unwrap()
    }

    #[test]
    fn irreducibility() {
        assert!(fp_poly::is_irreducible(&[1, 1, 1], 2));
        assert!(!fp_poly::is_irreducible(&[1, 0, 1], 2));
        assert!(fp_poly::is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!fp_poly::is_irreducible(&[0, 0, 1], 3));
        assert!(fp_poly::is_irreducible(&[1, 0, 1], 3));
        // x^4 + x^2 + 1 = (x^2+x+1)^2 over F_2
        assert!(!fp_poly::is_irreducible(&[1, 0, 1, 0, 1], 2));
        for p in [2, 3, 5, 7] {
            for d in 1..=6 {
                let f = fp_poly::find_irreducible(p, d);
                assert_eq!(f.len(), d + 1);
                assert!(fp_poly::is_irreducible(&f, p));
            }
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(UnramifiedRing::new(zp(2, 4), &[1, 0, 1]), Err(Error::ReducibleModulus(2)));
    }

    #[test]
    fn teichmuller_trivial_and_p3() {
        let r = UnramifiedRing::standard(zp(2, 5), 1);
        let t = from_residues(&r, &[0]).teichmuller_lift().unwrap();
        assert!(t.is_zero());
        let r = UnramifiedRing::standard(zp(3, 3), 1);
        let t = from_residues(&r, &[2]).teichmuller_lift().unwrap();
        assert_eq!(t.coords()[0].canonical(), 26);
    }

    #[test]
    fn teichmuller_cube_root_of_unity() {
        let r = UnramifiedRing::new(zp(2, 8), &[1, 1, 1]).unwrap();
        let w = generator(&r);
        let t = w.teichmuller_lift().unwrap();
        assert_eq!(t.residues_mod_p(), vec![0, 1]);
        assert!(t.pow(3).same_residues(&one(&r)));
        assert!(t.pow(4).same_residues(&t));
        // 1 + w + w^2 = 0, so Tr(w) = -1
        assert_eq!(t.trace(), zp(2, 8).from_i64(-1));
    }

    #[test]
    fn trace_of_scalars() {
        let r = UnramifiedRing::standard(zp(5, 4), 3);
        assert_eq!(one(&r).trace(), zp(5, 4).from_u64(3));
        let r1 = UnramifiedRing::standard(zp(5, 4), 1);
        assert_eq!(embed(&r1, zp(5, 4).from_u64(5)).trace().canonical(), 5);
    }
}
