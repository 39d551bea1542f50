//! Additive characters, Legendre/Jacobi symbols and quadratic Gauss sums.
//!
//! Each Gauss-sum evaluation comes in two independent routes: direct
//! summation over the field, and the closed form `(a/p) eps_p sqrt(p)` where
//! `eps_p` is 1 for `p = 1 (mod 4)` and `i` for `p = 3 (mod 4)`. The unit
//! `eps_p` is kept as an exact tag so closed forms are assembled symbolically
//! and only evaluated to floats at the boundary.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::field::{FieldSpec, FqElem};
use crate::numeric::pairwise_sum_c;
use crate::{Error, Result};

/// The additive character `e_a(x) = exp(2 pi i Tr_n(a x) / p)`.
pub struct Character {
    field: Arc<FieldSpec>,
    a: FqElem,
    table: Vec<Complex64>,
}

impl Character {
    pub fn new(field: &Arc<FieldSpec>, a: FqElem) -> Self {
        let roots = roots_of_unity(field.p());
        let table = field
            .elements()
            .map(|x| roots[field.trace(field.mul(a, x)) as usize])
            .collect();
        Character {
            field: Arc::clone(field),
            a,
            table,
        }
    }

    pub fn index(&self) -> FqElem {
        self.a
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// `e_a(x)`.
    #[inline]
    pub fn eval(&self, x: FqElem) -> Complex64 {
        self.table[x.index() as usize]
    }
}

/// `exp(2 pi i j / p)` for `j` in `0..p`.
pub fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p)
        .map(|j| {
            let t = 2.0 * PI * f64::from(j) / f64::from(p);
            Complex64::new(t.cos(), t.sin())
        })
        .collect()
}

/// Per-element table of the canonical nonprincipal character `e = e_1`,
/// indexed by element enumeration. This is the character every transform in
/// the crate is built on.
pub fn canonical_char_table(field: &FieldSpec) -> Vec<Complex64> {
    let roots = roots_of_unity(field.p());
    field
        .elements()
        .map(|x| roots[field.trace(x) as usize])
        .collect()
}

/// The exact value tag of `S(1) / sqrt(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussEps {
    One,
    I,
}

impl GaussEps {
    pub fn for_prime(p: u32) -> Self {
        if p % 4 == 1 {
            GaussEps::One
        } else {
            GaussEps::I
        }
    }

    pub fn to_c64(self) -> Complex64 {
        match self {
            GaussEps::One => Complex64::new(1.0, 0.0),
            GaussEps::I => Complex64::new(0.0, 1.0),
        }
    }
}

/// Legendre symbol `(a/p)` by the Euler criterion.
pub fn legendre(a: i64, p: u32) -> i32 {
    let a = a.rem_euclid(i64::from(p)) as u64;
    if a == 0 {
        return 0;
    }
    let mut acc: u64 = 1;
    let mut b = a % u64::from(p);
    let mut e = (u64::from(p) - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % u64::from(p);
        }
        b = b * b % u64::from(p);
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/m)` for odd positive `m`; `(a/1) = 1`.
pub fn jacobi(a: i64, m: u64) -> Result<i32> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::EvenModulus);
    }
    let mut num = a.rem_euclid(m as i64) as u64;
    let mut den = m;
    let mut acc: i32 = 1;
    loop {
        num %= den;
        if num == 0 {
            return Ok(if den == 1 { acc } else { 0 });
        }
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                acc = -acc;
            }
        }
        if num == 1 {
            return Ok(acc);
        }
        if num % 4 == 3 && den % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut num, &mut den);
    }
}

fn reduced(a: i64, p: u32) -> u64 {
    a.rem_euclid(i64::from(p)) as u64
}

/// `S(a) = sum_x e(a x^2)` over `F_p`, by direct summation.
pub fn gauss_sum(a: i64, p: u32) -> Complex64 {
    let roots = roots_of_unity(p);
    let a = reduced(a, p);
    pairwise_sum_c(p as usize, &|x| {
        let x = x as u64;
        roots[(a * x % u64::from(p) * x % u64::from(p)) as usize]
    })
}

/// Closed form `S(a) = (a/p) eps_p sqrt(p)` (zero for `a = 0` only in the
/// weighted variant; here `S(0) = p`).
pub fn gauss_sum_closed(a: i64, p: u32) -> Complex64 {
    if reduced(a, p) == 0 {
        return Complex64::new(f64::from(p), 0.0);
    }
    let sign = f64::from(legendre(a, p));
    GaussEps::for_prime(p).to_c64() * sign * f64::from(p).sqrt()
}

/// `sum_{x != 0} (x/p) e(a x)` by direct summation.
pub fn weighted_gauss_sum(a: i64, p: u32) -> Complex64 {
    let roots = roots_of_unity(p);
    let a = reduced(a, p);
    pairwise_sum_c(p as usize - 1, &|i| {
        let x = i as u64 + 1;
        let s = f64::from(legendre(x as i64, p));
        roots[(a * x % u64::from(p)) as usize] * s
    })
}

/// Closed form `(a/p) eps_p sqrt(p)`, which vanishes at `a = 0`.
pub fn weighted_gauss_sum_closed(a: i64, p: u32) -> Complex64 {
    let sign = f64::from(legendre(a, p));
    GaussEps::for_prime(p).to_c64() * sign * f64::from(p).sqrt()
}

/// `sum_x e(a x^2 + b x)` by direct summation; requires `a != 0`.
pub fn general_gauss_sum(a: i64, b: i64, p: u32) -> Result<Complex64> {
    let ar = reduced(a, p);
    if ar == 0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let br = reduced(b, p);
    let roots = roots_of_unity(p);
    Ok(pairwise_sum_c(p as usize, &|x| {
        let x = x as u64;
        let v = (ar * x % u64::from(p) * x + br * x) % u64::from(p);
        roots[v as usize]
    }))
}

/// Closed form `e(-b^2/(4a)) (a/p) eps_p sqrt(p)`, with the inverse of `4a`
/// taken in `F_p`.
pub fn general_gauss_sum_closed(a: i64, b: i64, p: u32) -> Result<Complex64> {
    let ar = reduced(a, p);
    if ar == 0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let br = reduced(b, p);
    let inv4a = mod_pow(4 * ar % u64::from(p), u64::from(p) - 2, u64::from(p));
    let shift = (u64::from(p) - br * br % u64::from(p) * inv4a % u64::from(p) % u64::from(p))
        % u64::from(p);
    let roots = roots_of_unity(p);
    Ok(roots[shift as usize]
        * GaussEps::for_prime(p).to_c64()
        * f64::from(legendre(a, p))
        * f64::from(p).sqrt())
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::numeric::{TOL_ABS, TOL_CHAR_CANCEL};

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() < tol,
            "expected {b}, got {a} (|diff| = {})",
            (a - b).norm()
        );
    }

    #[test]
    fn principal_character_is_one() {
        let f = Arc::new(make_field(7, 1).unwrap());
        let chi = Character::new(&f, f.zero());
        for x in f.elements() {
            assert_close(chi.eval(x), Complex64::new(1.0, 0.0), 1e-15);
        }
    }

    #[test]
    fn character_examples() {
        let f5 = Arc::new(make_field(5, 1).unwrap());
        let chi = Character::new(&f5, f5.one());
        let expect = Complex64::new(0.309017, 0.951057);
        assert_close(chi.eval(f5.one()), expect, 1e-6);

        let f9 = Arc::new(make_field(3, 2).unwrap());
        let x = f9.elem_from_coeffs(&[0, 1]);
        let chi9 = Character::new(&f9, f9.one());
        assert_close(chi9.eval(x), Complex64::new(1.0, 0.0), 1e-12); // Tr(x) = 0
    }

    #[test]
    fn characters_are_multiplicative_and_cancel() {
        for (p, n) in [(3u32, 1u32), (5, 1), (7, 1), (3, 2), (5, 2), (11, 1), (13, 1)] {
            let f = Arc::new(make_field(p, n).unwrap());
            for a in f.elements() {
                let chi = Character::new(&f, a);
                for x in f.elements() {
                    for y in f.elements() {
                        assert_close(
                            chi.eval(f.add(x, y)),
                            chi.eval(x) * chi.eval(y),
                            1e-10,
                        );
                    }
                }
                if a != f.zero() {
                    let total = pairwise_sum_c(f.q() as usize, &|i| chi.eval(f.element(i as u32)));
                    assert!(total.norm() < TOL_CHAR_CANCEL, "sum of e_a over F_q");
                }
            }
        }
    }

    /// Midpoint property of additive characters: rho(x) rho(y) = rho((x+y)/2)^2,
    /// together with injectivity of a -> e_a.
    #[test]
    fn midpoint_property_and_uniqueness() {
        for (p, n) in [(5u32, 1u32), (3, 2), (13, 1), (5, 2)] {
            let f = Arc::new(make_field(p, n).unwrap());
            let chars: Vec<Character> = f.elements().map(|a| Character::new(&f, a)).collect();
            for chi in &chars {
                for x in f.elements() {
                    for y in f.elements() {
                        let mid = chi.eval(f.half(f.add(x, y)));
                        assert_close(chi.eval(x) * chi.eval(y), mid * mid, 1e-10);
                    }
                }
            }
            for i in 0..chars.len() {
                for j in i + 1..chars.len() {
                    let differ = f
                        .elements()
                        .any(|x| (chars[i].eval(x) - chars[j].eval(x)).norm() > 1e-6);
                    assert!(differ, "distinct indices give distinct characters");
                }
            }
        }
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(0, 7), 0);
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 5), -1);
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(5, 1).unwrap(), 1);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert_eq!(jacobi(7, 9).unwrap(), 1);
        assert_eq!(jacobi(3, 9).unwrap(), 0);
        assert_eq!(jacobi(2, 4).unwrap_err(), Error::EvenModulus);
        // agrees with Legendre on primes
        for p in [3u32, 5, 7, 11, 13] {
            for a in -6i64..15 {
                assert_eq!(jacobi(a, u64::from(p)).unwrap(), legendre(a, p));
            }
        }
    }

    #[test]
    fn gauss_sum_examples() {
        assert_close(gauss_sum(1, 5), Complex64::new(5f64.sqrt(), 0.0), TOL_ABS);
        assert_close(gauss_sum(1, 3), Complex64::new(0.0, 3f64.sqrt()), TOL_ABS);
        assert_close(gauss_sum(2, 3), Complex64::new(0.0, -(3f64.sqrt())), TOL_ABS);
    }

    #[test]
    fn weighted_gauss_sum_examples() {
        assert_close(weighted_gauss_sum(0, 7), Complex64::new(0.0, 0.0), TOL_ABS);
        assert_close(
            weighted_gauss_sum(1, 5),
            Complex64::new(5f64.sqrt(), 0.0),
            TOL_ABS,
        );
        assert_close(
            weighted_gauss_sum(3, 5),
            Complex64::new(-(5f64.sqrt()), 0.0),
            TOL_ABS,
        );
    }

    #[test]
    fn general_gauss_sum_examples() {
        assert_close(
            general_gauss_sum(1, 0, 3).unwrap(),
            Complex64::new(0.0, 3f64.sqrt()),
            TOL_ABS,
        );
        // e(-1) sqrt(5) at p = 5
        let roots = roots_of_unity(5);
        assert_close(
            general_gauss_sum(1, 2, 5).unwrap(),
            roots[4] * 5f64.sqrt(),
            TOL_ABS,
        );
        assert_eq!(
            general_gauss_sum(0, 1, 5).unwrap_err(),
            Error::ZeroLeadingCoefficient
        );
    }

    #[test]
    fn gauss_sums_match_closed_forms_up_to_53() {
        for p in [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
            for a in 0..p {
                let a = i64::from(a);
                assert_close(gauss_sum(a, p), gauss_sum_closed(a, p), TOL_ABS);
                assert_close(
                    weighted_gauss_sum(a, p),
                    weighted_gauss_sum_closed(a, p),
                    TOL_ABS,
                );
                if a != 0 {
                    for b in 0..p {
                        let b = i64::from(b);
                        assert_close(
                            general_gauss_sum(a, b, p).unwrap(),
                            general_gauss_sum_closed(a, b, p).unwrap(),
                            TOL_ABS,
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_and_supplements() {
        let primes = [3u32, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
        for &p in &primes {
            for &r in &primes {
                if p == r {
                    continue;
                }
                let lhs = legendre(i64::from(p), r) * legendre(i64::from(r), p);
                let e = (u64::from(p) - 1) * (u64::from(r) - 1) / 4;
                let rhs = if e % 2 == 0 { 1 } else { -1 };
                assert_eq!(lhs, rhs, "reciprocity for ({p}, {r})");
            }
            let first = if (p - 1) / 2 % 2 == 0 { 1 } else { -1 };
            assert_eq!(legendre(-1, p), first, "first supplement at {p}");
            let second = if (u64::from(p) * u64::from(p) - 1) / 8 % 2 == 0 {
                1
            } else {
                -1
            };
            assert_eq!(legendre(2, p), second, "second supplement at {p}");
        }
    }
}
