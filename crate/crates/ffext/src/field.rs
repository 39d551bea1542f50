//! Concrete models of `F_q = F_{p^n}` for odd primes `p`.
//!
//! A field is `F_p[x]/(m(x))` where `m` is the canonically chosen monic
//! irreducible modulus of degree `n`: the smallest one when its coefficient
//! vector is read from the highest degree down (equivalently, smallest as a
//! base-`p` integer). Elements are enumerated the same way: the element with
//! coordinates `(c_0, ..., c_{n-1})` in the basis `{1, x, ..., x^{n-1}}` has
//! index `sum_i c_i p^i`, so the constants `0, 1, ..., p-1` come first. Every
//! tie-break in the crate ("the least square root of -1", antipodal
//! representatives, ...) refers to this enumeration.

use crate::{Error, Result};

/// Largest field size the artifact will construct. Exhaustive searches and
/// desk-scale verification stop making sense beyond this.
pub const MAX_FIELD_SIZE: u64 = 10_000;

/// Build full index-by-index multiplication/addition tables up to this size.
const TABLE_MAX_Q: u64 = 1024;

/// An element of `F_q`, stored as its enumeration index.
///
/// All arithmetic goes through [`FieldSpec`]; two elements compare equal iff
/// they have the same coordinates in the same field model.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct FqElem(pub(crate) u32);

impl FqElem {
    /// Position of this element in the field enumeration.
    pub fn index(self) -> u32 {
        self.0
    }
}

/// A concrete model of `F_q = F_p[x]/(m(x))`.
#[derive(Debug)]
pub struct FieldSpec {
    p: u32,
    n: u32,
    q: u32,
    /// Monic modulus, length `n + 1`, constant coefficient first.
    /// For `n = 1` this is the placeholder `x - 0`.
    modulus: Vec<u32>,
    /// Flattened coordinate vectors: element `i` has digits
    /// `digits[i*n .. (i+1)*n]`.
    digits: Vec<u32>,
    /// `x^(n+j) mod m` for `j` in `0..n-1`, used to reduce products.
    red: Vec<Vec<u32>>,
    trace_tab: Vec<u32>,
    inv_tab: Vec<u32>,
    mul_tab: Option<Vec<u32>>,
    add_tab: Option<Vec<u32>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    if m % 2 == 0 {
        return m == 2;
    }
    let mut d = 3;
    while d * d <= m {
        if m % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Construct `F_{p^n}` with the canonical modulus.
pub fn make_field(p: u32, n: u32) -> Result<FieldSpec> {
    if n < 1 {
        return Err(Error::DegreeZero);
    }
    if p < 3 || !is_prime(u64::from(p)) {
        return Err(Error::NotOddPrime(u64::from(p)));
    }
    let mut q: u64 = 1;
    for _ in 0..n {
        q = q.saturating_mul(u64::from(p));
    }
    if q > MAX_FIELD_SIZE {
        return Err(Error::FieldTooLarge(q));
    }
    let q = q as u32;

    let modulus = if n == 1 {
        vec![0, 1]
    } else {
        find_modulus(p, n)
    };

    let mut f = FieldSpec {
        p,
        n,
        q,
        modulus,
        digits: Vec::new(),
        red: Vec::new(),
        trace_tab: Vec::new(),
        inv_tab: Vec::new(),
        mul_tab: None,
        add_tab: None,
    };
    f.digits = {
        let mut d = Vec::with_capacity((q as usize) * (n as usize));
        for v in 0..q {
            let mut rem = v;
            for _ in 0..n {
                d.push(rem % p);
                rem /= p;
            }
        }
        d
    };
    f.red = {
        // x^(n+j) mod m, computed by the recurrence x^(n+j) = x * x^(n+j-1).
        let mut red: Vec<Vec<u32>> = Vec::with_capacity(n as usize);
        if n > 1 {
            // x^n = -(m - x^n), i.e. negate the low coefficients of m.
            let first: Vec<u32> = f.modulus[..n as usize]
                .iter()
                .map(|&c| (p - c % p) % p)
                .collect();
            red.push(first);
            for _ in 1..n {
                let prev = red.last().unwrap().clone();
                let mut next = vec![0u32; n as usize];
                // multiply by x
                for i in (1..n as usize).rev() {
                    next[i] = prev[i - 1];
                }
                let carry = prev[n as usize - 1];
                if carry != 0 {
                    let head = &red[0];
                    for i in 0..n as usize {
                        next[i] = (next[i] + carry * head[i]) % p;
                    }
                }
                red.push(next);
            }
        }
        red
    };
    if u64::from(q) <= TABLE_MAX_Q && n > 1 {
        let mut mul = vec![0u32; (q as usize) * (q as usize)];
        let mut add = vec![0u32; (q as usize) * (q as usize)];
        for a in 0..q {
            for b in 0..q {
                mul[(a as usize) * (q as usize) + b as usize] = f.mul_slow(a, b);
                add[(a as usize) * (q as usize) + b as usize] = f.add_slow(a, b);
            }
        }
        f.mul_tab = Some(mul);
        f.add_tab = Some(add);
    }
    f.trace_tab = (0..q).map(|v| f.trace_slow(FqElem(v))).collect();
    f.inv_tab = (0..q)
        .map(|v| if v == 0 { 0 } else { f.pow(FqElem(v), u64::from(q) - 2).0 })
        .collect();
    Ok(f)
}

/// Scan monic degree-`n` polynomials in canonical order, return the first
/// irreducible one. Coefficients are encoded as base-`p` digits of the scan
/// index, constant coefficient least significant.
fn find_modulus(p: u32, n: u32) -> Vec<u32> {
    let mut count: u64 = 1;
    for _ in 0..n {
        count *= u64::from(p);
    }
    for v in 0..count {
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        let mut rem = v;
        for _ in 0..n {
            coeffs.push((rem % u64::from(p)) as u32);
            rem /= u64::from(p);
        }
        coeffs.push(1);
        if poly_is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

// --- dense polynomial arithmetic over F_p, used only at construction time ---

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| u64::from(c)).collect();
    let dm = m.len() - 1;
    let inv_lead = u64::from(mod_inv_prime(m[dm], p));
    while r.len() > dm {
        let dr = r.len() - 1;
        let factor = (r[dr] % u64::from(p)) * inv_lead % u64::from(p);
        if factor != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                let sub = factor * u64::from(m[i]) % u64::from(p);
                r[idx] = (r[idx] + u64::from(p) - sub) % u64::from(p);
            }
        }
        r.pop();
    }
    let mut out: Vec<u32> = r.iter().map(|&c| (c % u64::from(p)) as u32).collect();
    if out.is_empty() {
        out.push(0);
    }
    poly_trim(&mut out);
    out
}

fn poly_mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + u64::from(ai) * u64::from(bj)) % u64::from(p);
        }
    }
    let prod: Vec<u32> = prod.iter().map(|&c| c as u32).collect();
    poly_rem(&prod, m, p)
}

fn poly_pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1u32];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &b, m, p);
        }
        b = poly_mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let len = a.len().max(b.len());
    let mut out = vec![0u32; len];
    for i in 0..len {
        let ai = a.get(i).copied().unwrap_or(0);
        let bi = b.get(i).copied().unwrap_or(0);
        out[i] = (ai + p - bi) % p;
    }
    poly_trim(&mut out);
    out
}

fn mod_inv_prime(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a != 0 mod p.
    let mut acc: u64 = 1;
    let mut b = u64::from(a % p);
    let mut e = u64::from(p) - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % u64::from(p);
        }
        b = b * b % u64::from(p);
        e >>= 1;
    }
    acc as u32
}

/// Irreducibility of a monic polynomial over F_p: root absence suffices up to
/// degree 3, the Frobenius gcd test covers the general case.
fn poly_is_irreducible(m: &[u32], p: u32) -> bool {
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    // constant term zero means x divides m
    if m[0] == 0 {
        return false;
    }
    if n <= 3 {
        for a in 0..p {
            let mut v: u64 = 0;
            for &c in m.iter().rev() {
                v = (v * u64::from(a) + u64::from(c)) % u64::from(p);
            }
            if v == 0 {
                return false;
            }
        }
        return true;
    }
    // Rabin: x^{p^n} = x (mod m) and gcd(x^{p^{n/r}} - x, m) = 1 for prime r | n.
    let x = vec![0u32, 1];
    let pn = |e: u32| -> Vec<u32> {
        let mut t = x.clone();
        for _ in 0..e {
            t = poly_pow_mod(&t, u64::from(p), m, p);
        }
        t
    };
    let frob_n = pn(n as u32);
    if poly_sub(&frob_n, &x, p) != vec![0] {
        return false;
    }
    let mut divisors = Vec::new();
    let mut rem = n as u32;
    let mut d = 2;
    while d * d <= rem {
        if rem % d == 0 {
            divisors.push(d);
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        divisors.push(rem);
    }
    for r in divisors {
        let g = poly_gcd(&poly_sub(&pn(n as u32 / r), &x, p), m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl FieldSpec {
    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Monic modulus coefficients, constant term first (length `n + 1`).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn is_prime_field(&self) -> bool {
        self.n == 1
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }
    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    /// The element with the given enumeration index.
    pub fn element(&self, index: u32) -> FqElem {
        assert!(index < self.q, "element index {index} out of range");
        FqElem(index)
    }

    /// All elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    /// The image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(i64::from(self.p)) as u32)
    }

    /// Coordinates of `a` in the basis `{1, x, ..., x^{n-1}}`.
    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        let n = self.n as usize;
        self.digits[(a.0 as usize) * n..(a.0 as usize + 1) * n].to_vec()
    }

    pub fn elem_from_coeffs(&self, coeffs: &[u32]) -> FqElem {
        assert_eq!(coeffs.len(), self.n as usize);
        let mut v: u32 = 0;
        for &c in coeffs.iter().rev() {
            v = v * self.p + c % self.p;
        }
        FqElem(v)
    }

    fn digit_slice(&self, a: u32) -> &[u32] {
        let n = self.n as usize;
        &self.digits[(a as usize) * n..(a as usize + 1) * n]
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let da = self.digit_slice(a);
        let db = self.digit_slice(b);
        let mut v: u32 = 0;
        for i in (0..self.n as usize).rev() {
            v = v * self.p + (da[i] + db[i]) % self.p;
        }
        v
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return ((u64::from(a) * u64::from(b)) % u64::from(self.p)) as u32;
        }
        let n = self.n as usize;
        let da = self.digit_slice(a);
        let db = self.digit_slice(b);
        let mut prod = vec![0u64; 2 * n - 1];
        for i in 0..n {
            if da[i] == 0 {
                continue;
            }
            for j in 0..n {
                prod[i + j] += u64::from(da[i]) * u64::from(db[j]);
            }
        }
        let mut out = vec![0u64; n];
        out[..n].copy_from_slice(&prod[..n]);
        for j in 0..n - 1 {
            let c = prod[n + j] % u64::from(self.p);
            if c != 0 {
                for i in 0..n {
                    out[i] += c * u64::from(self.red[j][i]);
                }
            }
        }
        let mut v: u32 = 0;
        for i in (0..n).rev() {
            v = v * self.p + (out[i] % u64::from(self.p)) as u32;
        }
        v
    }

    #[inline]
    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.n == 1 {
            return FqElem((a.0 + b.0) % self.p);
        }
        if let Some(t) = &self.add_tab {
            return FqElem(t[(a.0 as usize) * (self.q as usize) + b.0 as usize]);
        }
        FqElem(self.add_slow(a.0, b.0))
    }

    #[inline]
    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.n == 1 {
            return FqElem(((u64::from(a.0) * u64::from(b.0)) % u64::from(self.p)) as u32);
        }
        if let Some(t) = &self.mul_tab {
            return FqElem(t[(a.0 as usize) * (self.q as usize) + b.0 as usize]);
        }
        FqElem(self.mul_slow(a.0, b.0))
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.n == 1 {
            return FqElem((self.p - a.0) % self.p);
        }
        let da = self.digit_slice(a.0);
        let mut v: u32 = 0;
        for i in (0..self.n as usize).rev() {
            v = v * self.p + (self.p - da[i]) % self.p;
        }
        FqElem(v)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: FqElem) -> FqElem {
        assert!(a.0 != 0, "zero has no multiplicative inverse");
        FqElem(self.inv_tab[a.0 as usize])
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> FqElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FqElem, mut e: u64) -> FqElem {
        let mut acc = self.one();
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// `a / 2`, defined since `p` is odd.
    pub fn half(&self, a: FqElem) -> FqElem {
        self.mul(a, self.inv(self.from_int(2)))
    }

    fn trace_slow(&self, a: FqElem) -> u32 {
        // Tr(a) = a + a^p + ... + a^{p^{n-1}}, a constant in [0, p).
        let mut acc = self.zero();
        let mut frob = a;
        for i in 0..self.n {
            if i > 0 {
                frob = self.pow(frob, u64::from(self.p));
            }
            acc = self.add(acc, frob);
        }
        let c = self.coeffs(acc);
        debug_assert!(c[1..].iter().all(|&x| x == 0), "trace must land in F_p");
        c[0]
    }

    /// `Tr_n(a)` as a residue mod `p`.
    #[inline]
    pub fn trace(&self, a: FqElem) -> u32 {
        self.trace_tab[a.0 as usize]
    }

    /// Euler criterion; zero counts as a square.
    pub fn is_square(&self, a: FqElem) -> bool {
        if a.0 == 0 {
            return true;
        }
        self.pow(a, u64::from(self.q - 1) / 2) == self.one()
    }

    /// The enumeration-least `w` with `w^2 = -1`; requires `q = 1 (mod 4)`.
    pub fn sqrt_minus_one(&self) -> Result<FqElem> {
        if self.q % 4 != 1 {
            return Err(Error::NoSquareRoot);
        }
        let minus_one = self.neg(self.one());
        for w in self.elements() {
            if self.mul(w, w) == minus_one {
                return Ok(w);
            }
        }
        unreachable!("q = 1 (mod 4) guarantees a root")
    }

    /// The two roots of `j^2 + j + 1`, least first; requires `q = 1 (mod 3)`
    /// and `p > 3`. The two roots are mutual inverses.
    pub fn roots_j(&self) -> Result<(FqElem, FqElem)> {
        if self.p == 3 || self.q % 3 != 1 {
            return Err(Error::NoRoot);
        }
        let mut found = Vec::with_capacity(2);
        for j in self.elements() {
            let v = self.add(self.add(self.mul(j, j), j), self.one());
            if v == self.zero() {
                found.push(j);
                if found.len() == 2 {
                    break;
                }
            }
        }
        debug_assert_eq!(found.len(), 2);
        debug_assert_eq!(self.mul(found[0], found[1]), self.one());
        Ok((found[0], found[1]))
    }

    /// The unique `a` with `Tr_n(a e_i) = t_i` for all `i`, found by
    /// exhaustive search. `basis` must be an F_p-basis of F_q.
    pub fn dual_element(&self, basis: &[FqElem], targets: &[u32]) -> Result<FqElem> {
        let n = self.n as usize;
        if basis.len() != n || targets.len() != n {
            return Err(Error::NotABasis);
        }
        if !self.is_basis(basis) {
            return Err(Error::NotABasis);
        }
        for a in self.elements() {
            if (0..n).all(|i| self.trace(self.mul(a, basis[i])) == targets[i] % self.p) {
                return Ok(a);
            }
        }
        unreachable!("the trace pairing is nondegenerate")
    }

    fn is_basis(&self, basis: &[FqElem]) -> bool {
        // Gaussian elimination on the coordinate matrix over F_p.
        let n = self.n as usize;
        let mut rows: Vec<Vec<u32>> = basis.iter().map(|&e| self.coeffs(e)).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let inv = mod_inv_prime(rows[rank][col], self.p);
            for c in 0..n {
                rows[rank][c] = rows[rank][c] * inv % self.p;
            }
            for r in 0..n {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in 0..n {
                        rows[r][c] = (rows[r][c] + (self.p - f) * rows[rank][c]) % self.p;
                    }
                }
            }
            rank += 1;
        }
        rank == n
    }
}
