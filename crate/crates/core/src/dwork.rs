//! The canonical Dwork operators `theta_0`, `theta_1` and the matrices of
//! `psi_i = theta_i . E_f` in a weighted monomial basis.
//!
//! Concretely, on monomials:
//!
//! * `theta_0(x^u) = p x^{u/p}` when `p | u`, else 0;
//! * affine line: `theta_1(x^u dx) = x^{(u+1)/p - 1} dx` when `p | u+1`, else 0;
//! * torus: `theta_1(x^u dx/x) = x^{u/p} dx/x` when `p | u`, else 0.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::padic::{ZpRing, ZpTSeries};
use crate::series::{FormKind, Geometry, XSeries};
use crate::splitting::SplittingFunction;

/// Which piece of the de Rham complex an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormDegree {
    Zero,
    One,
}

impl FormDegree {
    pub fn index(self) -> usize {
        match self {
            FormDegree::Zero => 0,
            FormDegree::One => 1,
        }
    }

    pub fn kind(self) -> FormKind {
        match self {
            FormDegree::Zero => FormKind::Function,
            FormDegree::One => FormKind::Differential,
        }
    }
}

pub fn theta0_apply(g: &XSeries) -> Result<XSeries> {
    if g.kind() != FormKind::Function {
        return Err(Error::Domain("theta_0 acts on functions".into()));
    }
    let p = g.ring().p() as i64;
    let mut out = XSeries::zero(g.geometry(), FormKind::Function, g.degree_bound(), g.ring(), g.t_len());
    for (u, c) in g.terms() {
        if u.rem_euclid(p) == 0 {
            out.set(u / p, c.mul_int(p));
        }
    }
    Ok(out)
}

pub fn theta1_apply(g: &XSeries) -> Result<XSeries> {
    if g.kind() != FormKind::Differential {
        return Err(Error::Domain("theta_1 acts on differentials".into()));
    }
    let p = g.ring().p() as i64;
    let mut out = XSeries::zero(g.geometry(), FormKind::Differential, g.degree_bound(), g.ring(), g.t_len());
    for (u, c) in g.terms() {
        let target = match g.geometry() {
            Geometry::AffineLine if (u + 1) % p == 0 => (u + 1) / p - 1,
            Geometry::Torus if u.rem_euclid(p) == 0 => u / p,
            _ => continue,
        };
        out.set(target, c.clone());
    }
    Ok(out)
}

/// Applies `theta_0` or `theta_1` according to the form kind.
pub fn theta_apply(g: &XSeries) -> Result<XSeries> {
    match g.kind() {
        FormKind::Function => theta0_apply(g),
        FormKind::Differential => theta1_apply(g),
    }
}

/// Basis exponents `(first, count)` of the truncated space of `i`-forms.
/// Differentials on the affine line use `x^u dx` with `0 <= u <= D-1`.
pub fn basis_range(geometry: Geometry, form: FormDegree, x_degree: usize) -> (i64, usize) {
    let d = x_degree as i64;
    match (geometry, form) {
        (Geometry::AffineLine, FormDegree::Zero) => (0, x_degree + 1),
        (Geometry::AffineLine, FormDegree::One) => (0, x_degree),
        (Geometry::Torus, _) => (-d, 2 * x_degree + 1),
    }
}

/// The exponent of `x` that a basis element carries once written against
/// `dx/x`; the Frobenius action on it is `u -> p u`.
fn function_exponent(geometry: Geometry, form: FormDegree, u: i64) -> i64 {
    match (geometry, form) {
        (Geometry::AffineLine, FormDegree::One) => u + 1,
        _ => u,
    }
}

/// Finite matrix of `psi_i` in the basis `pi^{floor(|u|/c)} x^u`. Column `u`
/// holds the image of basis element `u`.
#[derive(Clone, Debug)]
pub struct NuclearMatrix {
    matrix: SeriesMatrix,
    geometry: Geometry,
    form: FormDegree,
    weight_c: Option<u64>,
    basis_offset: i64,
    tower_degree: u64,
}

impl NuclearMatrix {
    pub fn matrix(&self) -> &SeriesMatrix {
        &self.matrix
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn form(&self) -> FormDegree {
        self.form
    }

    pub fn weight_c(&self) -> Option<u64> {
        self.weight_c
    }

    pub fn basis_offset(&self) -> i64 {
        self.basis_offset
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Exponent of the basis element at position `i`.
    pub fn exponent(&self, i: usize) -> i64 {
        self.basis_offset + i as i64
    }

    /// Entry `(v, u)` indexed by exponents.
    pub fn entry(&self, v: i64, u: i64) -> &ZpTSeries {
        self.matrix.get((v - self.basis_offset) as usize, (u - self.basis_offset) as usize)
    }

    /// Lower bound for `v_T(entry(v, u))`.
    pub fn decay_bound(&self, v: i64, u: i64) -> u32 {
        decay_bound(
            self.geometry,
            self.form,
            self.tower_degree,
            self.weight_c,
            self.matrix.ring().p(),
            v,
            u,
        )
    }
}

fn weight(c: Option<u64>, u: i64) -> i64 {
    match c {
        Some(c) => (u.unsigned_abs() / c) as i64,
        None => 0,
    }
}

fn decay_bound(geometry: Geometry, form: FormDegree, d: u64, c: Option<u64>, p: u64, v: i64, u: i64) -> u32 {
    let k = p as i64 * function_exponent(geometry, form, v) - function_exponent(geometry, form, u);
    let base = if d == 0 {
        0
    } else {
        k.unsigned_abs().div_ceil(d) as i64
    };
    (base + weight(c, u) - weight(c, v)).max(0) as u32
}

/// Assemble the matrix of `psi_i = theta_i . E_f` on the truncated space of
/// `i`-forms with exponents bounded by `x_degree`, keeping `t_len`
/// coefficients in `T`.
///
/// A weighted basis needs `E_f` known to `T`-precision
/// `t_len + floor(x_degree / c)`, since entries get divided by powers of `pi`.
pub fn assemble_matrix(
    ef: &SplittingFunction,
    form: FormDegree,
    x_degree: usize,
    weight_c: Option<u64>,
    t_len: usize,
) -> Result<NuclearMatrix> {
    let ring = ef.ring();
    let p = ring.p();
    let geometry = ef.source().geometry();
    let tower_degree = ef.source().degree();
    if x_degree < p as usize {
        return Err(Error::InvalidProfile(format!("x-degree bound {x_degree} is below p = {p}")));
    }
    if weight_c == Some(0) {
        return Err(Error::InvalidProfile("basis weight must be positive".into()));
    }
    let max_shift = weight(weight_c, x_degree as i64) as usize;
    let needed = t_len + max_shift;
    if ef.t_len() < needed {
        return Err(Error::PrecisionExhausted(format!(
            "E_f is known mod T^{} but the weighted basis needs T^{needed}",
            ef.t_len()
        )));
    }
    let big = ef.t_len();
    let pi = ef.pi();
    let pi_powers = powers(pi, max_shift);
    let pi_unit_inv_powers = if max_shift > 0 {
        let unit = pi.shift_down(1)?.inverse()?;
        powers(&unit, max_shift)
    } else {
        vec![ZpTSeries::one(ring, big)]
    };

    let (offset, n) = basis_range(geometry, form, x_degree);
    let series = ef.series();
    let scale_p = form == FormDegree::Zero;
    let columns: Vec<Result<Vec<ZpTSeries>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let u = offset + j as i64;
            let mut col = Vec::with_capacity(n);
            for i in 0..n {
                let v = offset + i as i64;
                let k = p as i64 * function_exponent(geometry, form, v) - function_exponent(geometry, form, u);
                let mut e = series.coeff_or_zero(k);
                if e.is_zero() {
                    col.push(ZpTSeries::zero(ring, t_len));
                    continue;
                }
                if scale_p {
                    e = e.mul_int(p as i64);
                }
                let shift = weight(weight_c, u) - weight(weight_c, v);
                if shift > 0 {
                    e = &e * &pi_powers[shift as usize];
                } else if shift < 0 {
                    let m = (-shift) as usize;
                    e = e.shift_down(m).map_err(|_| {
                        Error::Internal(format!("entry ({v}, {u}) is not divisible by pi^{m}"))
                    })?;
                    e = &e * &pi_unit_inv_powers[m];
                }
                let e = e.truncate(t_len);
                let bound = decay_bound(geometry, form, tower_degree, weight_c, p, v, u).min(t_len as u32);
                if e.t_valuation().value() < bound {
                    return Err(Error::Internal(format!(
                        "decay certificate fails at ({v}, {u}): v_T = {} < {bound}",
                        e.t_valuation().value()
                    )));
                }
                col.push(e);
            }
            Ok(col)
        })
        .collect();
    let mut matrix = SeriesMatrix::zero(ring, n, t_len);
    for (j, col) in columns.into_iter().enumerate() {
        for (i, e) in col?.into_iter().enumerate() {
            if !e.is_zero() {
                matrix.set(i, j, e);
            }
        }
    }
    Ok(NuclearMatrix { matrix, geometry, form, weight_c, basis_offset: offset, tower_degree })
}

fn powers(x: &ZpTSeries, n: usize) -> Vec<ZpTSeries> {
    let mut out = vec![ZpTSeries::one(x.ring(), x.len())];
    for i in 0..n {
        out.push(&out[i] * x);
    }
    out
}

/// The default basis weight: `c = deg f`, or no weighting for `f = 0`.
pub fn default_weight(tower_degree: u64) -> Option<u64> {
    (tower_degree > 0).then_some(tower_degree)
}

/// Matrix of `theta_i` alone (`E_f = 1`) in the unweighted basis.
pub fn theta_matrix(ring: ZpRing, geometry: Geometry, form: FormDegree, x_degree: usize, t_len: usize) -> SeriesMatrix {
    let p = ring.p() as i64;
    let (offset, n) = basis_range(geometry, form, x_degree);
    let mut m = SeriesMatrix::zero(ring, n, t_len);
    for j in 0..n {
        let u = offset + j as i64;
        for i in 0..n {
            let v = offset + i as i64;
            if p * function_exponent(geometry, form, v) == function_exponent(geometry, form, u) {
                let c = if form == FormDegree::Zero { p } else { 1 };
                m.set(i, j, ZpTSeries::from_i64s(ring, t_len, &[c]));
            }
        }
    }
    m
}
