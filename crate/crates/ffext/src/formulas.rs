//! Closed-form convolution tables, sharp extension constants, the explicit
//! maximizer families, and the epsilon-perturbation functionals on the full
//! cones. Everything here is exact: rational arithmetic throughout, floats
//! only at the comparison boundary.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::characters::{jacobi, legendre, roots_of_unity};
use crate::field::{FieldSpec, FqElem};
use crate::geometry::{SurfaceKind, SurfaceSpec};
use crate::transform::SurfaceFunction;
use crate::{Error, Result};

fn is_odd_prime(p: u32) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn ratio_of(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

/// Sign of `eps_p^e` for even `e`: `eps_p` is 1 when `p = 1 (mod 4)` and `i`
/// when `p = 3 (mod 4)`.
fn eps_power_sign(p: u32, e: u32) -> i64 {
    debug_assert!(e % 2 == 0);
    if p % 4 == 1 || (e / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The k-fold convolution of the normalized measure on the paraboloid
/// `tau = xi^2` in `F_p^(d+1)`, evaluated at `target` (residues mod p).
///
/// Values are exact rationals: the two parity branches are rational outright,
/// and in the remaining branch the half-integral powers of `p` cancel.
pub fn predicted_parabola_conv(d: u32, k: u32, p: u32, target: &[u32]) -> Result<BigRational> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(u64::from(p)));
    }
    if p <= k {
        return Err(Error::PrimeTooSmall { p, k });
    }
    assert!(d >= 1, "paraboloid dimension must be at least 1");
    assert_eq!(target.len(), (d + 1) as usize);
    let pp = u64::from(p);
    let xi_sq = target[..d as usize]
        .iter()
        .fold(0u64, |acc, &c| (acc + u64::from(c % p) * u64::from(c % p)) % pp);
    let tau = u64::from(target[d as usize] % p);
    // xi^2 / k - tau in F_p
    let inv_k = {
        let mut acc = 1u64;
        let mut b = u64::from(k % p);
        let mut e = pp - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % pp;
            }
            b = b * b % pp;
            e >>= 1;
        }
        acc
    };
    let diff = (xi_sq * inv_k % pp + pp - tau) % pp;
    let critical = diff == 0;
    let crit_term = if critical {
        i64::from(p) - 1
    } else {
        -1
    };

    let one = BigRational::one();
    if d % 2 == 0 {
        let sign = eps_power_sign(p, d * (k + 1));
        let denom = BigInt::from(p).pow(d * (k - 1) / 2);
        return Ok(one + ratio_of(big(sign * crit_term), denom));
    }
    if k % 2 == 1 {
        let sign = eps_power_sign(p, d * (k + 1));
        let quarter = (u64::from(p) - 1) * (u64::from(k) + 1) / 4;
        let twist = if quarter % 2 == 0 { 1 } else { -1 };
        let jac = i64::from(jacobi(i64::from(p), u64::from(k))?);
        let denom = BigInt::from(p).pow(d * (k - 1) / 2);
        return Ok(one + ratio_of(big(sign * twist * jac * crit_term), denom));
    }
    // d odd, k even: k = 2^nu * ell
    let nu = k.trailing_zeros();
    let ell = k >> nu;
    let sign = eps_power_sign(p, d * (k + 1) + 1);
    let par = (u64::from(p) - 1) * (u64::from(ell) + 1) / 4
        + (u64::from(p) * u64::from(p) - 1) / 8 * u64::from(nu);
    let twist = if par % 2 == 0 { 1 } else { -1 };
    let jac = i64::from(jacobi(i64::from(p), u64::from(ell))?);
    let leg = i64::from(legendre(diff as i64, p));
    let denom = BigInt::from(p).pow((d * (k - 1) - 1) / 2);
    Ok(one + ratio_of(big(sign * twist * jac * leg), denom))
}

/// The piecewise-constant closed form of a supported convolution, keyed by
/// membership in the critical locus / the surface / the origin.
pub struct PredictedConv {
    surface: SurfaceSpec,
    k: u32,
}

impl std::fmt::Debug for PredictedConv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PredictedConv(k = {}, {:?})", self.k, self.surface)
    }
}

/// Closed-form convolution table for the supported (surface, k) pairs:
/// `(P^2, 2)` and `(H^2, 2)` over any `F_q`, `(P^1, 3)` for `p > 3`,
/// `(Upsilon_0^3, 2)` over prime fields, and `(Gamma_0^3, 2)` over prime
/// fields or whenever `q = 3 (mod 4)`.
pub fn predicted_conv(surface: &SurfaceSpec, k: u32) -> Result<PredictedConv> {
    let f = surface.field();
    let supported = match (surface.kind(), k) {
        (SurfaceKind::P2, 2) | (SurfaceKind::H2, 2) => true,
        (SurfaceKind::P1, 3) => f.p() > 3,
        (SurfaceKind::Upsilon3Full, 2) => f.is_prime_field(),
        (SurfaceKind::Gamma3Full, 2) => f.is_prime_field() || f.q() % 4 == 3,
        _ => false,
    };
    if !supported {
        return Err(Error::UnsupportedCombination);
    }
    Ok(PredictedConv {
        surface: surface.clone(),
        k,
    })
}

impl PredictedConv {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn surface(&self) -> &SurfaceSpec {
        &self.surface
    }

    pub fn value(&self, coords: &[FqElem]) -> BigRational {
        let f = self.surface.field();
        let q = i64::from(f.q());
        let sq = |a: FqElem| f.mul(a, a);
        match self.surface.kind() {
            SurfaceKind::P2 => {
                let critical =
                    f.add(coords[2], coords[2]) == f.add(sq(coords[0]), sq(coords[1]));
                let num = match (critical, q % 4 == 1) {
                    (true, true) => 2 * q - 1,
                    (true, false) => 1,
                    (false, true) => q - 1,
                    (false, false) => q + 1,
                };
                ratio_of(big(num), big(q))
            }
            SurfaceKind::H2 => {
                let critical =
                    f.add(coords[2], coords[2]) == f.sub(sq(coords[0]), sq(coords[1]));
                let num = if critical { 2 * q - 1 } else { q - 1 };
                ratio_of(big(num), big(q))
            }
            SurfaceKind::P1 => {
                let critical =
                    f.mul(f.from_int(3), coords[1]) == sq(coords[0]);
                let num = match (critical, q % 3 == 1) {
                    (true, true) => 2 * q - 1,
                    (true, false) => 1,
                    (false, true) => q - 1,
                    (false, false) => q + 1,
                };
                ratio_of(big(num), big(q))
            }
            SurfaceKind::Upsilon3Full => {
                let origin = coords.iter().all(|&c| c == f.zero());
                let on_cone = f.add(sq(coords[2]), sq(coords[3]))
                    == f.add(sq(coords[0]), sq(coords[1]));
                let s = q * q + q - 1;
                let num = if origin {
                    s
                } else if on_cone {
                    2 * q - 1
                } else {
                    q + 1
                };
                ratio_of(big(q) * big(q) * big(q) * big(num), big(s) * big(s))
            }
            SurfaceKind::Gamma3Full => {
                let origin = coords.iter().all(|&c| c == f.zero());
                let on_cone = f.mul(coords[2], coords[3])
                    == f.add(sq(coords[0]), sq(coords[1]));
                let plus = q % 4 == 1;
                let s = if plus { q * q + q - 1 } else { q * q - q + 1 };
                let num = if origin {
                    s
                } else if on_cone {
                    if plus {
                        2 * q - 1
                    } else {
                        1
                    }
                } else if plus {
                    q + 1
                } else {
                    q - 1
                };
                ratio_of(big(q) * big(q) * big(q) * big(num), big(s) * big(s))
            }
            _ => unreachable!("predicted_conv only constructs supported pairs"),
        }
    }

    pub fn value_flat(&self, flat: u64) -> BigRational {
        let coords = crate::geometry::unflatten(
            flat,
            u64::from(self.surface.q()),
            self.surface.ambient_dim(),
        );
        self.value(&coords)
    }
}

fn check_sharp_supported(kind: SurfaceKind, field: &FieldSpec, two_k: u32) -> Result<u32> {
    match (kind, two_k) {
        (SurfaceKind::P2, 4) | (SurfaceKind::H2, 4) => Ok(2),
        (SurfaceKind::P1, 6) => {
            if field.p() > 3 {
                Ok(3)
            } else {
                Err(Error::UnsupportedCombination)
            }
        }
        (SurfaceKind::Gamma3, 4) => {
            if field.q() % 4 == 3 {
                Ok(2)
            } else {
                Err(Error::UnsupportedCombination)
            }
        }
        _ => Err(Error::UnsupportedCombination),
    }
}

/// The exact `2k`-th power of the sharp constant `R*(2 -> 2k)`.
pub fn sharp_constant_pow(kind: SurfaceKind, field: &FieldSpec, two_k: u32) -> Result<BigRational> {
    check_sharp_supported(kind, field, two_k)?;
    let q = big(i64::from(field.q()));
    Ok(match kind {
        SurfaceKind::P2 | SurfaceKind::H2 | SurfaceKind::P1 => {
            // 1 + 1/q - 1/q^2
            ratio_of(&q * &q + &q - BigInt::one(), &q * &q)
        }
        SurfaceKind::Gamma3 => {
            let q2 = &q * &q;
            let num = &q * &q * &q * &q
                * (q.pow(5) - big(2) * q.pow(4) + big(2) * q.pow(3) - big(3) * &q + big(3));
            let den = (&q - BigInt::one()).pow(3) * (&q2 + BigInt::one()).pow(3);
            ratio_of(num, den)
        }
        _ => unreachable!(),
    })
}

/// The sharp constant `R*(2 -> 2k)` as a float.
pub fn sharp_constant(kind: SurfaceKind, field: &FieldSpec, two_k: u32) -> Result<f64> {
    let pow = sharp_constant_pow(kind, field, two_k)?;
    Ok(pow.to_f64().unwrap().powf(1.0 / f64::from(two_k)))
}

/// The best constant of the equivalent combinatorial inequality,
/// `C* = q^-d |S|^k R*^{2k}`, in its independently stated form.
pub fn combinatorial_constant(
    kind: SurfaceKind,
    field: &FieldSpec,
    two_k: u32,
) -> Result<BigRational> {
    check_sharp_supported(kind, field, two_k)?;
    let q = big(i64::from(field.q()));
    Ok(match kind {
        // q + 1 - 1/q
        SurfaceKind::P2 | SurfaceKind::H2 | SurfaceKind::P1 => {
            ratio_of(&q * &q + &q - BigInt::one(), q)
        }
        SurfaceKind::Gamma3 => {
            let num = q.pow(5) - big(2) * q.pow(4) + big(2) * q.pow(3) - big(3) * &q + big(3);
            let den = (&q - BigInt::one()) * (&q * &q + BigInt::one());
            ratio_of(num, den)
        }
        _ => unreachable!(),
    })
}

/// Parameters of the explicit maximizer family.
#[derive(Clone, Debug)]
pub struct MaximizerParams {
    pub lambda: Complex64,
    pub a: FqElem,
    pub b: FqElem,
    pub c: FqElem,
}

/// The family `lambda exp(2 pi i Tr(a eta + b zeta + c eta zeta) / p)` in the
/// null coordinates `xi = eta (1, w) + zeta (1, -w)` on `P^2` (needs
/// `q = 1 (mod 4)`) and `xi = eta (1, 1) + zeta (1, -1)` on `H^2`.
pub fn maximizer_family(surface: &SurfaceSpec, params: &MaximizerParams) -> Result<SurfaceFunction> {
    if params.lambda.norm_sqr() == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let f = surface.field();
    let w = match surface.kind() {
        SurfaceKind::P2 => {
            if f.q() % 4 != 1 {
                return Err(Error::WrongResidueClass {
                    residue: 1,
                    modulus: 4,
                });
            }
            f.sqrt_minus_one()?
        }
        SurfaceKind::H2 => f.one(),
        _ => return Err(Error::UnsupportedSurface),
    };
    let roots = roots_of_unity(f.p());
    let n = surface.point_count();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let pt = surface.point(i);
        let (x1, x2) = (pt.coords[0], pt.coords[1]);
        // eta = (x1 + x2/w)/2, zeta = (x1 - x2/w)/2
        let x2_over_w = f.div(x2, w);
        let eta = f.half(f.add(x1, x2_over_w));
        let zeta = f.half(f.sub(x1, x2_over_w));
        let phase = f.add(
            f.add(f.mul(params.a, eta), f.mul(params.b, zeta)),
            f.mul(params.c, f.mul(eta, zeta)),
        );
        values.push(params.lambda * roots[f.trace(phase) as usize]);
    }
    Ok(SurfaceFunction::new(surface.clone(), values))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Functional {
    Phi,
    Psi,
}

/// The exact rational polynomials behind the perturbation functionals on the
/// full cones: `Phi_p = A_p / B_p` and `Psi_p = C_p / D_p`.
pub struct PhiPolynomials {
    p: u32,
    a: [BigInt; 5],
    c: [BigInt; 5],
}

impl PhiPolynomials {
    pub fn new(p: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(u64::from(p)));
        }
        let pw = |e: u32| BigInt::from(p).pow(e);
        let a = [
            big(2) * pw(5) + pw(6) - big(7) * pw(7) - pw(8) + big(5) * pw(9) + pw(10),
            big(-8) * pw(5) + big(4) * pw(6) + big(8) * pw(7),
            big(-6) * pw(3) + big(6) * pw(4) + big(6) * pw(5),
            big(4) * pw(2),
            pw(2),
        ];
        let c = [
            big(-2) * pw(5) + big(5) * pw(6) - big(5) * pw(7) + big(5) * pw(8) - big(3) * pw(9)
                + pw(10),
            big(4) * pw(6),
            big(6) * pw(3) - big(6) * pw(4) + big(6) * pw(5),
            big(4) * pw(2),
            pw(2),
        ];
        Ok(PhiPolynomials { p, a, c })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn poly_eval(coeffs: &[BigInt; 5], eps: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in coeffs.iter().rev() {
            acc = acc * eps + BigRational::from(c.clone());
        }
        acc
    }

    pub fn a_eval(&self, eps: &BigRational) -> BigRational {
        Self::poly_eval(&self.a, eps)
    }

    pub fn c_eval(&self, eps: &BigRational) -> BigRational {
        Self::poly_eval(&self.c, eps)
    }

    pub fn b_eval(&self, eps: &BigRational) -> BigRational {
        let p = big(i64::from(self.p));
        let head = BigRational::from((&p * &p + &p - BigInt::one()).pow(2));
        let inner = BigRational::from(&p * &p * &p + &p * &p - &p)
            + eps * BigRational::from_integer(2.into())
            + eps * eps;
        head * &inner * &inner
    }

    pub fn d_eval(&self, eps: &BigRational) -> BigRational {
        let p = big(i64::from(self.p));
        let head = BigRational::from((&p * &p - &p + BigInt::one()).pow(2));
        let inner = BigRational::from(&p * &p * &p - &p * &p + &p)
            + eps * BigRational::from_integer(2.into())
            + eps * eps;
        head * &inner * &inner
    }

    /// `Phi_p(eps) = A_p(eps) / B_p(eps)`, exact.
    pub fn phi(&self, eps: &BigRational) -> BigRational {
        self.a_eval(eps) / self.b_eval(eps)
    }

    /// `Psi_p(eps) = C_p(eps) / D_p(eps)`, exact; requires `p = 3 (mod 4)`.
    pub fn psi(&self, eps: &BigRational) -> Result<BigRational> {
        if self.p % 4 != 3 {
            return Err(Error::WrongResidueClass {
                residue: 3,
                modulus: 4,
            });
        }
        Ok(self.c_eval(eps) / self.d_eval(eps))
    }
}

/// Evaluate `Phi_p` or `Psi_p` at a float epsilon, exactly in rationals with
/// the conversion at the boundary.
pub fn phi_psi(p: u32, eps: f64, which: Functional) -> Result<f64> {
    let polys = PhiPolynomials::new(p)?;
    let eps_r = BigRational::from_float(eps).expect("finite epsilon");
    let value = match which {
        Functional::Phi => polys.phi(&eps_r),
        Functional::Psi => polys.psi(&eps_r)?,
    };
    Ok(value.to_f64().unwrap())
}

/// The closed-form first derivatives at zero:
/// `Phi_p'(0) = 4 p^2 (p-2) (p^2-1)^2 / (p^2+p-1)^5` and
/// `Psi_p'(0) = -4 p^2 (p-2) (p-1)^2 (p^2+1) / (p^2-p+1)^5`.
pub fn phi_psi_derivative_at_zero(p: u32, which: Functional) -> Result<BigRational> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(u64::from(p)));
    }
    let pb = big(i64::from(p));
    match which {
        Functional::Phi => {
            let num = big(4)
                * &pb
                * &pb
                * (&pb - big(2))
                * (&pb * &pb - BigInt::one()).pow(2);
            let den = (&pb * &pb + &pb - BigInt::one()).pow(5);
            Ok(ratio_of(num, den))
        }
        Functional::Psi => {
            if p % 4 != 3 {
                return Err(Error::WrongResidueClass {
                    residue: 3,
                    modulus: 4,
                });
            }
            let num = big(-4)
                * &pb
                * &pb
                * (&pb - big(2))
                * (&pb - BigInt::one()).pow(2)
                * (&pb * &pb + BigInt::one());
            let den = (&pb * &pb - &pb + BigInt::one()).pow(5);
            Ok(ratio_of(num, den))
        }
    }
}
