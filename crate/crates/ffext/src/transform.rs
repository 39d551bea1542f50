//! The extension operator, discrete Fourier transforms, norms, and k-fold
//! convolutions of normalized surface measures.
//!
//! Convolutions come by two independent routes. The counting route
//! enumerates tuples of surface points and returns the exact rational
//! `q^m / |S|^k * |{k-tuples summing to the target}|` (with `m` the ambient
//! dimension). The Fourier route computes `sigma-check`, raises it to the
//! k-th power pointwise and transforms back. The two must agree to 1e-9 on
//! every ambient point, and the counting route must agree exactly with the
//! closed forms in `formulas`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::characters::canonical_char_table;
use crate::field::{FieldSpec, FqElem};
use crate::geometry::{SurfaceKind, SurfaceSpec};
use crate::numeric::{pairwise_sum_c, scaled_lp_norm};
use crate::{Error, Result};

const COST_GUARD: u128 = 100_000_000;

/// A complex-valued function on the points of a surface, stored in surface
/// enumeration order.
#[derive(Clone)]
pub struct SurfaceFunction {
    surface: SurfaceSpec,
    values: Vec<Complex64>,
}

impl std::fmt::Debug for SurfaceFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SurfaceFunction on {:?}", self.surface)
    }
}

impl SurfaceFunction {
    pub fn new(surface: SurfaceSpec, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), surface.point_count());
        assert!(
            values.iter().all(|v| v.re.is_finite() && v.im.is_finite()),
            "surface functions must be finite"
        );
        SurfaceFunction { surface, values }
    }

    pub fn constant(surface: SurfaceSpec, value: Complex64) -> Self {
        let n = surface.point_count();
        SurfaceFunction {
            surface,
            values: vec![value; n],
        }
    }

    /// Indicator of a single surface point.
    pub fn delta(surface: SurfaceSpec, index: usize) -> Self {
        let n = surface.point_count();
        let mut values = vec![Complex64::new(0.0, 0.0); n];
        values[index] = Complex64::new(1.0, 0.0);
        SurfaceFunction { surface, values }
    }

    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm_sqr() == 0.0)
    }
}

/// A complex-valued function on the full ambient space `F_q^dim`, indexed by
/// the flat lexicographic point index.
#[derive(Clone)]
pub struct GridFunction {
    field: Arc<FieldSpec>,
    dim: u32,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(field: Arc<FieldSpec>, dim: u32, values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), (u64::from(field.q()).pow(dim)) as usize);
        GridFunction { field, dim, values }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn at(&self, coords: &[FqElem]) -> Complex64 {
        self.values[crate::geometry::flatten(coords, u64::from(self.field.q())) as usize]
    }
}

/// Dot products of every ambient point with the surface points, evaluated
/// through the canonical character. Shared kernel of `extend` and the
/// Fourier transforms.
struct CharKernel {
    chi: Vec<Complex64>,
}

impl CharKernel {
    fn new(field: &FieldSpec) -> Self {
        CharKernel {
            chi: canonical_char_table(field),
        }
    }

    /// `e(x . xi)` where both points are given by coordinate slices.
    #[inline]
    fn eval(&self, field: &FieldSpec, x: &[FqElem], xi_idx: &[u32]) -> Complex64 {
        let mut dot = FqElem(0);
        for (a, &b) in x.iter().zip(xi_idx) {
            dot = field.add(dot, field.mul(*a, FqElem(b)));
        }
        self.chi[dot.index() as usize]
    }
}

fn decode(mut flat: u64, q: u64, dim: usize, out: &mut [FqElem]) {
    for i in (0..dim).rev() {
        out[i] = FqElem((flat % q) as u32);
        flat /= q;
    }
}

/// The extension operator `(f sigma)-check (x) = |S|^-1 sum_xi f(xi) e(x.xi)`.
pub fn extend(f: &SurfaceFunction) -> GridFunction {
    let s = f.surface();
    let field = s.field();
    let data = s.data();
    let dim = s.ambient_dim() as usize;
    let n = s.point_count();
    let q = u64::from(field.q());
    let total = s.ambient_count();
    let kernel = CharKernel::new(field);
    let scale = 1.0 / n as f64;
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut x = [FqElem(0); 8];
            decode(flat, q, dim, &mut x[..dim]);
            let sum = pairwise_sum_c(n, &|i| {
                let xi = &data.coords[i * dim..(i + 1) * dim];
                kernel.eval(field, &x[..dim], xi) * f.values[i]
            });
            sum * scale
        })
        .collect();
    GridFunction {
        field: Arc::clone(field),
        dim: s.ambient_dim(),
        values,
    }
}

/// Forward transform `g-hat (xi) = sum_x g(x) e(-x.xi)` (counting measure).
pub fn fourier_forward(g: &GridFunction) -> GridFunction {
    fourier_impl(g, true, 1.0)
}

/// Inverse transform `g-check (x) = q^-dim sum_xi g(xi) e(x.xi)`.
pub fn fourier_inverse(g: &GridFunction) -> GridFunction {
    let scale = 1.0 / g.values.len() as f64;
    fourier_impl(g, false, scale)
}

fn fourier_impl(g: &GridFunction, negate: bool, scale: f64) -> GridFunction {
    let field = &g.field;
    let q = u64::from(field.q());
    let dim = g.dim as usize;
    let total = g.values.len() as u64;
    let kernel = CharKernel::new(field);
    // digit table for the whole grid, shared by every output point
    let digits: Vec<u32> = {
        let mut d = Vec::with_capacity(g.values.len() * dim);
        let mut buf = vec![FqElem(0); dim];
        for flat in 0..total {
            decode(flat, q, dim, &mut buf);
            d.extend(buf.iter().map(|e| e.index()));
        }
        d
    };
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|out_flat| {
            let mut xi = vec![FqElem(0); dim];
            decode(out_flat, q, dim, &mut xi);
            if negate {
                for c in xi.iter_mut() {
                    *c = field.neg(*c);
                }
            }
            let sum = pairwise_sum_c(g.values.len(), &|i| {
                let x = &digits[i * dim..(i + 1) * dim];
                let mut dot = FqElem(0);
                for j in 0..dim {
                    dot = field.add(dot, field.mul(FqElem(x[j]), xi[j]));
                }
                kernel.chi[dot.index() as usize] * g.values[i]
            });
            sum * scale
        })
        .collect();
    GridFunction {
        field: Arc::clone(field),
        dim: g.dim,
        values,
    }
}

/// `(sum_x |g(x)|^e)^(1/e)` for `e` in {2, 4, 6}, counting measure.
pub fn lp_norm(g: &GridFunction, exponent: u32) -> f64 {
    scaled_lp_norm(&g.values, exponent)
}

/// `(|S|^-1 sum_xi |f(xi)|^2)^(1/2)`.
pub fn l2_surface_norm(f: &SurfaceFunction) -> f64 {
    let n = f.values.len();
    scaled_lp_norm(&f.values, 2) / (n as f64).sqrt()
}

/// Exact k-fold convolution table of the normalized surface measure.
pub struct ConvolutionTable {
    field: Arc<FieldSpec>,
    ambient_dim: u32,
    surface_size: u64,
    k: u32,
    counts: Vec<u64>,
}

impl std::fmt::Debug for ConvolutionTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ConvolutionTable(k = {}, |S| = {}, F_{}^{})",
            self.k,
            self.surface_size,
            self.field.q(),
            self.ambient_dim
        )
    }
}

impl ConvolutionTable {
    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn ambient_dim(&self) -> u32 {
        self.ambient_dim
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Raw tuple count at an ambient flat index.
    pub fn count_at(&self, flat: u64) -> u64 {
        self.counts[flat as usize]
    }

    /// `sigma^{*k}` at an ambient flat index: `q^m count / |S|^k`, exact.
    pub fn value_at(&self, flat: u64) -> BigRational {
        let qm = BigInt::from(u64::from(self.field.q())).pow(self.ambient_dim);
        let sk = BigInt::from(self.surface_size).pow(self.k);
        BigRational::new(
            qm * BigInt::from(self.counts[flat as usize]),
            sk,
        )
    }

    pub fn value(&self, coords: &[FqElem]) -> BigRational {
        self.value_at(crate::geometry::flatten(coords, u64::from(self.field.q())))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total mass identity: the values sum to `q^m` exactly, i.e. the counts
    /// sum to `|S|^k`.
    pub fn total_mass_is_one(&self) -> bool {
        let total: u128 = self.counts.iter().map(|&c| u128::from(c)).sum();
        total == u128::from(self.surface_size).pow(self.k)
    }

    /// The table as floats, for comparison against the Fourier route.
    pub fn to_floats(&self) -> Vec<f64> {
        let qm = (u64::from(self.field.q()) as f64).powi(self.ambient_dim as i32);
        let sk = (self.surface_size as f64).powi(self.k as i32);
        self.counts.iter().map(|&c| qm * c as f64 / sk).collect()
    }
}

fn surface_pair_counts(s: &SurfaceSpec) -> Vec<u64> {
    let data = s.data();
    let q = u64::from(s.q());
    let dim = s.ambient_dim() as usize;
    let total = s.ambient_count() as usize;
    let field = s.field();
    let n = s.point_count();
    let coords = &data.coords;
    (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; total],
            |mut acc, i| {
                let a = &coords[i * dim..(i + 1) * dim];
                let mut sum = vec![FqElem(0); dim];
                for j in 0..n {
                    let b = &coords[j * dim..(j + 1) * dim];
                    for (t, (&x, &y)) in sum.iter_mut().zip(a.iter().zip(b)) {
                        *t = field.add(FqElem(x), FqElem(y));
                    }
                    acc[crate::geometry::flatten(&sum, q) as usize] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; total],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Exact tuple-counting convolution for any of the supported surfaces.
pub fn convolve_counting(s: &SurfaceSpec, k: u32) -> Result<ConvolutionTable> {
    assert!(k >= 1, "convolution order must be positive");
    let n = s.point_count() as u128;
    if n.pow(k.saturating_sub(1)) > COST_GUARD {
        return Err(Error::CostGuard(n.pow(k - 1)));
    }
    let data = s.data();
    let q = u64::from(s.q());
    let dim = s.ambient_dim() as usize;
    let total = s.ambient_count() as usize;
    let field = s.field();
    let mut counts = vec![0u64; total];
    match k {
        1 => {
            for &flat in &data.flats {
                counts[flat as usize] = 1;
            }
        }
        2 => {
            counts = surface_pair_counts(s);
        }
        _ => {
            // fold the pair counts with one more copy of the surface per level
            counts = surface_pair_counts(s);
            let mut sum = vec![FqElem(0); dim];
            let mut buf = vec![FqElem(0); dim];
            for _level in 3..=k {
                let mut next = vec![0u64; total];
                for (flat, &c) in counts.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    decode(flat as u64, q, dim, &mut buf);
                    for i in 0..s.point_count() {
                        let b = &data.coords[i * dim..(i + 1) * dim];
                        for (t, (&x, &y)) in sum.iter_mut().zip(buf.iter().zip(b)) {
                            *t = field.add(x, FqElem(y));
                        }
                        next[crate::geometry::flatten(&sum, q) as usize] += c;
                    }
                }
                counts = next;
            }
        }
    }
    Ok(ConvolutionTable {
        field: Arc::clone(s.field()),
        ambient_dim: s.ambient_dim(),
        surface_size: s.point_count() as u64,
        k,
        counts,
    })
}

/// Counting convolution for the paraboloid `tau = xi^2` in `F_q^(d+1)` for
/// any `d >= 1`, without going through a first-class surface.
pub fn paraboloid_convolution_counts(
    field: &Arc<FieldSpec>,
    d: u32,
    k: u32,
) -> Result<ConvolutionTable> {
    let q = u64::from(field.q());
    let npoints = q.pow(d) as u128;
    let ambient = q
        .checked_pow(d + 1)
        .filter(|&t| t <= (1 << 24))
        .ok_or(Error::CostGuard(u128::from(q).pow(d + 1)))?;
    if npoints.pow(k.saturating_sub(1)) > COST_GUARD {
        return Err(Error::CostGuard(npoints.pow(k - 1)));
    }
    // accumulate counts by folding the base-point sum with running tau
    let dim = (d + 1) as usize;
    let mut counts = vec![0u64; ambient as usize];
    // enumerate S^k by odometer over k base points in F_q^d
    // level-by-level like convolve_counting
    let mut level: Vec<u64> = vec![0; ambient as usize];
    for base in 0..q.pow(d) {
        let mut xi = vec![FqElem(0); d as usize];
        decode(base, q, d as usize, &mut xi);
        let mut tau = FqElem(0);
        for &c in &xi {
            tau = field.add(tau, field.mul(c, c));
        }
        let mut full = Vec::with_capacity(dim);
        full.extend_from_slice(&xi);
        full.push(tau);
        level[crate::geometry::flatten(&full, q) as usize] += 1;
    }
    counts.copy_from_slice(&level);
    let mut buf = vec![FqElem(0); dim];
    let mut sum = vec![FqElem(0); dim];
    for _ in 2..=k {
        let mut next = vec![0u64; ambient as usize];
        for (flat, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            decode(flat as u64, q, dim, &mut buf);
            for base in 0..q.pow(d) {
                let mut xi = vec![FqElem(0); d as usize];
                decode(base, q, d as usize, &mut xi);
                let mut tau = FqElem(0);
                for &cc in &xi {
                    tau = field.add(tau, field.mul(cc, cc));
                }
                for j in 0..d as usize {
                    sum[j] = field.add(buf[j], xi[j]);
                }
                sum[d as usize] = field.add(buf[d as usize], tau);
                next[crate::geometry::flatten(&sum, q) as usize] += c;
            }
        }
        counts = next;
    }
    Ok(ConvolutionTable {
        field: Arc::clone(field),
        ambient_dim: d + 1,
        surface_size: q.pow(d),
        k,
        counts,
    })
}

/// Fourier-route convolution: `sigma^{*k} = [(sigma-check)^k]-hat`.
pub fn convolve_fourier(s: &SurfaceSpec, k: u32) -> GridFunction {
    let ones = SurfaceFunction::constant(s.clone(), Complex64::new(1.0, 0.0));
    let mut inv = extend(&ones);
    for v in inv.values.iter_mut() {
        *v = v.powu(k);
    }
    fourier_forward(&inv)
}

/// Fourier-route convolution for the generic paraboloid of dimension `d`.
pub fn paraboloid_convolve_fourier(field: &Arc<FieldSpec>, d: u32, k: u32) -> GridFunction {
    let q = u64::from(field.q());
    let dim = (d + 1) as usize;
    let total = q.pow(d + 1);
    let kernel = CharKernel::new(field);
    let npoints = q.pow(d);
    let scale = 1.0 / npoints as f64;
    let values: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut x = vec![FqElem(0); dim];
            decode(flat, q, dim, &mut x);
            let sum = pairwise_sum_c(npoints as usize, &|i| {
                let mut xi = [FqElem(0); 8];
                decode(i as u64, q, d as usize, &mut xi[..d as usize]);
                let mut dot = FqElem(0);
                let mut tau = FqElem(0);
                for j in 0..d as usize {
                    dot = field.add(dot, field.mul(x[j], xi[j]));
                    tau = field.add(tau, field.mul(xi[j], xi[j]));
                }
                dot = field.add(dot, field.mul(x[dim - 1], tau));
                kernel.chi[dot.index() as usize]
            });
            (sum * scale).powu(k)
        })
        .collect();
    let g = GridFunction {
        field: Arc::clone(field),
        dim: d + 1,
        values,
    };
    fourier_forward(&g)
}

/// `sum_xi | sum_{xi_1 + ... + xi_k = xi} prod_i f(xi_i) |^2` by direct
/// enumeration over tuples of surface points.
pub fn combinatorial_lhs(f: &SurfaceFunction, k: u32) -> Result<f64> {
    let acc = combinatorial_sums(f, k)?;
    Ok(acc.iter().map(|z| z.norm_sqr()).sum())
}

/// The inner sums `g(xi) = sum_{tuples summing to xi} prod f`, indexed by
/// ambient flat index.
pub(crate) fn combinatorial_sums(f: &SurfaceFunction, k: u32) -> Result<Vec<Complex64>> {
    assert!(matches!(k, 2 | 3), "combinatorial route supports k = 2, 3");
    let s = f.surface();
    let n = s.point_count() as u128;
    if n.pow(k - 1) > COST_GUARD {
        return Err(Error::CostGuard(n.pow(k - 1)));
    }
    let data = s.data();
    let q = u64::from(s.q());
    let dim = s.ambient_dim() as usize;
    let total = s.ambient_count() as usize;
    let field = s.field();
    let npoints = s.point_count();
    let coords = &data.coords;
    let zero = Complex64::new(0.0, 0.0);
    // pair sums
    let pair: Vec<Complex64> = (0..npoints)
        .into_par_iter()
        .fold(
            || vec![zero; total],
            |mut acc, i| {
                let a = &coords[i * dim..(i + 1) * dim];
                let fa = f.values[i];
                let mut sum = vec![FqElem(0); dim];
                for j in 0..npoints {
                    let b = &coords[j * dim..(j + 1) * dim];
                    for (t, (&x, &y)) in sum.iter_mut().zip(a.iter().zip(b)) {
                        *t = field.add(FqElem(x), FqElem(y));
                    }
                    acc[crate::geometry::flatten(&sum, q) as usize] += fa * f.values[j];
                }
                acc
            },
        )
        .reduce(
            || vec![zero; total],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    if k == 2 {
        return Ok(pair);
    }
    // one more fold with f
    let mut triple = vec![zero; total];
    let mut buf = vec![FqElem(0); dim];
    let mut sum = vec![FqElem(0); dim];
    for (flat, &g) in pair.iter().enumerate() {
        if g.norm_sqr() == 0.0 {
            continue;
        }
        decode(flat as u64, q, dim, &mut buf);
        for i in 0..npoints {
            let b = &coords[i * dim..(i + 1) * dim];
            for (t, (&x, &y)) in sum.iter_mut().zip(buf.iter().zip(b)) {
                *t = field.add(x, FqElem(y));
            }
            triple[crate::geometry::flatten(&sum, q) as usize] += g * f.values[i];
        }
    }
    Ok(triple)
}

/// Outcome of an extension-ratio evaluation.
#[derive(Clone, Debug)]
pub struct RatioReport {
    /// `||(f sigma)-check||_{2k} / ||f||_{L^2(sigma)}`.
    pub value: f64,
    /// The proven sharp constant when one exists for this pair, else NaN.
    pub claimed: f64,
    /// `claimed - value`; NaN when no constant is known.
    pub gap: f64,
    /// `(2, 2k)`.
    pub exponents: (u32, u32),
    pub surface: SurfaceKind,
    pub q: u32,
}

impl RatioReport {
    pub fn has_claim(&self) -> bool {
        !self.claimed.is_nan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::geometry::unflatten;
    use crate::numeric::TOL_ABS;

    fn surface(kind: SurfaceKind, p: u32, n: u32) -> SurfaceSpec {
        SurfaceSpec::new(kind, Arc::new(make_field(p, n).unwrap())).unwrap()
    }

    #[test]
    fn extend_of_constant_has_mass_one_at_zero() {
        let s = surface(SurfaceKind::P1, 5, 1);
        let f = SurfaceFunction::constant(s, Complex64::new(1.0, 0.0));
        let g = extend(&f);
        assert!((g.values()[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn extend_of_delta_has_constant_modulus() {
        let s = surface(SurfaceKind::P2, 3, 1);
        let n = s.point_count() as f64;
        let f = SurfaceFunction::delta(s, 4);
        let g = extend(&f);
        for v in g.values() {
            assert!((v.norm() - 1.0 / n).abs() < 1e-12);
        }
    }

    #[test]
    fn extend_of_constant_on_upsilon_off_cone_value() {
        // (1 nu)-check = -1/(p^2 + p - 1) wherever x^2 - t^2 - s^2 != 0
        let s = surface(SurfaceKind::Upsilon3Full, 5, 1);
        let field = s.field().clone();
        let f = SurfaceFunction::constant(s, Complex64::new(1.0, 0.0));
        let g = extend(&f);
        let expect = -1.0 / 29.0;
        // x = (1, 0, 0, 0): zeta = 1 != 0
        let x = [field.one(), field.zero(), field.zero(), field.zero()];
        assert!((g.at(&x) - Complex64::new(expect, 0.0)).norm() < TOL_ABS);
        // and 1 at the origin
        let z = [field.zero(); 4];
        assert!((g.at(&z) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lp_norm_examples() {
        let field = Arc::new(make_field(5, 1).unwrap());
        let total = 125;
        let ones = GridFunction::new(
            Arc::clone(&field),
            3,
            vec![Complex64::new(1.0, 0.0); total],
        );
        assert!((lp_norm(&ones, 4) - 125f64.powf(0.25)).abs() < 1e-12);
        let mut vals = vec![Complex64::new(0.0, 0.0); total];
        vals[0] = Complex64::new(1.0, 0.0);
        let delta = GridFunction::new(Arc::clone(&field), 3, vals);
        assert!((lp_norm(&delta, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l2_surface_norm_examples() {
        let s = surface(SurfaceKind::P2, 3, 1);
        let ones = SurfaceFunction::constant(s.clone(), Complex64::new(1.0, 0.0));
        assert!((l2_surface_norm(&ones) - 1.0).abs() < 1e-12);
        let delta = SurfaceFunction::delta(s, 0);
        assert!((l2_surface_norm(&delta) - 1.0 / 3.0).abs() < 1e-12);
        // 1 + eps delta_0 on the full cone: (1 - 1/|S| + (1+eps)^2/|S|)^(1/2)
        let cone = surface(SurfaceKind::Upsilon3Full, 5, 1);
        let origin = cone
            .index_of(&[
                cone.field().zero(),
                cone.field().zero(),
                cone.field().zero(),
                cone.field().zero(),
            ])
            .unwrap();
        let eps = 0.37;
        let mut f = SurfaceFunction::constant(cone.clone(), Complex64::new(1.0, 0.0));
        f.values_mut()[origin] += Complex64::new(eps, 0.0);
        let size = cone.point_count() as f64;
        let expect = (1.0 - 1.0 / size + (1.0 + eps) * (1.0 + eps) / size).sqrt();
        assert!((l2_surface_norm(&f) - expect).abs() < 1e-12);
    }

    #[test]
    fn counting_convolution_examples() {
        // P^2 over F_5, critical: 9/5
        let s = surface(SurfaceKind::P2, 5, 1);
        let f = s.field().clone();
        let t = convolve_counting(&s, 2).unwrap();
        let crit = [f.one(), f.zero(), f.half(f.one())];
        assert_eq!(t.value(&crit), BigRational::new(9.into(), 5.into()));
        assert!(t.total_mass_is_one());
        // P^2 over F_7, off-critical: 8/7
        let s7 = surface(SurfaceKind::P2, 7, 1);
        let f7 = s7.field().clone();
        let t7 = convolve_counting(&s7, 2).unwrap();
        let tau = f7.add(f7.half(f7.one()), f7.one()); // 1/2 + 1 is off-critical for xi = (1,0)
        let off = [f7.one(), f7.zero(), tau];
        assert_eq!(t7.value(&off), BigRational::new(8.into(), 7.into()));
        // Gamma_0^3 over F_3 on the punctured cone: 27/49
        let g = surface(SurfaceKind::Gamma3Full, 3, 1);
        let fg = g.field().clone();
        let tg = convolve_counting(&g, 2).unwrap();
        let on_cone = [fg.one(), fg.zero(), fg.one(), fg.one()];
        assert_eq!(tg.value(&on_cone), BigRational::new(27.into(), 49.into()));
        assert!(tg.total_mass_is_one());
    }

    #[test]
    fn fourier_route_examples() {
        // Upsilon_0^3 over F_5 at the origin: 125/29
        let s = surface(SurfaceKind::Upsilon3Full, 5, 1);
        let g = convolve_fourier(&s, 2);
        let expect = 125.0 / 29.0;
        assert!((g.values()[0] - Complex64::new(expect, 0.0)).norm() < TOL_ABS);
        // k = 1 reproduces the weight function q^m/|S| on the surface
        let s3 = surface(SurfaceKind::P1, 5, 1);
        let w = convolve_fourier(&s3, 1);
        let t = convolve_counting(&s3, 1).unwrap();
        let floats = t.to_floats();
        for (i, v) in w.values().iter().enumerate() {
            assert!((v.re - floats[i]).abs() < TOL_ABS && v.im.abs() < TOL_ABS);
        }
    }

    #[test]
    fn three_value_pattern_for_parabola_pairs() {
        // P^1 over F_5, k = 2: 1 - legendre(xi^2/2 - tau) pattern
        let s = surface(SurfaceKind::P1, 5, 1);
        let f = s.field().clone();
        let t = convolve_counting(&s, 2).unwrap();
        for flat in 0..s.ambient_count() {
            let c = unflatten(flat, 5, 2);
            let half_sq = f.half(f.mul(c[0], c[0]));
            let arg = f.sub(half_sq, c[1]);
            let expect = 1 - i64::from(crate::characters::legendre(
                i64::from(arg.index()),
                5,
            ));
            assert_eq!(
                t.value_at(flat),
                BigRational::from(BigInt::from(expect)),
                "pattern at {c:?}"
            );
        }
    }

    #[test]
    fn combinatorial_lhs_examples() {
        // delta: only one target contributes, with product 1
        let s = surface(SurfaceKind::P2, 3, 1);
        let delta = SurfaceFunction::delta(s.clone(), 2);
        assert!((combinatorial_lhs(&delta, 2).unwrap() - 1.0).abs() < 1e-12);
        // constants: sum of squared tuple counts
        let ones = SurfaceFunction::constant(surface(SurfaceKind::P2, 7, 1), Complex64::new(1.0, 0.0));
        let got = combinatorial_lhs(&ones, 2).unwrap();
        let t = convolve_counting(ones.surface(), 2).unwrap();
        let expect: f64 = (0..t.len() as u64)
            .map(|i| (t.count_at(i) as f64).powi(2))
            .sum();
        assert!((got - expect).abs() / expect < 1e-12);
    }

    /// The generic surface-pair counting and the graph-based paraboloid
    /// counting are independent implementations; they must agree exactly.
    #[test]
    fn paraboloid_counting_paths_agree() {
        for (d, k, q) in [(1u32, 2u32, 7u32), (2, 2, 5), (1, 3, 5)] {
            let kind = if d == 1 { SurfaceKind::P1 } else { SurfaceKind::P2 };
            let field = Arc::new(make_field(q, 1).unwrap());
            let s = SurfaceSpec::new(kind, Arc::clone(&field)).unwrap();
            let a = convolve_counting(&s, k).unwrap();
            let b = paraboloid_convolution_counts(&field, d, k).unwrap();
            for flat in 0..s.ambient_count() {
                assert_eq!(a.count_at(flat), b.count_at(flat), "d={d} k={k} q={q}");
            }
        }
    }

    #[test]
    fn fourier_round_trip() {
        let field = Arc::new(make_field(3, 2).unwrap());
        let total = 81usize;
        let vals: Vec<Complex64> = (0..total)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let g = GridFunction::new(Arc::clone(&field), 2, vals.clone());
        let back = fourier_inverse(&fourier_forward(&g));
        for (a, b) in back.values().iter().zip(&vals) {
            assert!((a - b).norm() < TOL_ABS);
        }
    }

    #[test]
    fn cost_guard_fires() {
        let s = surface(SurfaceKind::P2, 13, 1);
        // |S|^2 = 169^2 is fine; force the guard with k = 3 on a big fake
        // by checking the error path on the paraboloid helper instead
        let f = Arc::new(make_field(13, 1).unwrap());
        let err = paraboloid_convolution_counts(&f, 3, 5).unwrap_err();
        assert!(matches!(err, Error::CostGuard(_)));
        let _ = s;
    }
}
