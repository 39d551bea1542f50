//! Quadratic surfaces in `F_q^d` and their combinatorial decompositions.
//!
//! Surfaces are the parabola `P^1` (`tau = xi^2`), the paraboloid `P^2`, the
//! hyperbolic paraboloid `H^2` (`tau = xi_1^2 - xi_2^2`), the light cone
//! `Gamma^3` (`tau sigma = xi^2`, origin removed) and the Lorentz cone
//! `Upsilon^3` (`tau^2 + sigma^2 = xi^2`, origin removed), plus the "full"
//! cones with the origin restored. Ambient points are encoded by a flat index
//! that orders coordinate tuples lexicographically; all canonical choices
//! (antipodal representatives, line tie-breaks) refer to that order.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use crate::field::{FieldSpec, FqElem};
use crate::{Error, Result};

/// Enumeration budget: no surface lives in an ambient space with more points
/// than this.
const AMBIENT_GUARD: u64 = 1 << 24;

/// Cost guard for tuple enumeration.
const COST_GUARD: u128 = 100_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SurfaceKind {
    P1,
    P2,
    H2,
    Gamma3,
    Gamma3Full,
    Upsilon3,
    Upsilon3Full,
}

impl SurfaceKind {
    pub fn ambient_dim(self) -> u32 {
        match self {
            SurfaceKind::P1 => 2,
            SurfaceKind::P2 | SurfaceKind::H2 => 3,
            _ => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::P1 => "p1",
            SurfaceKind::P2 => "p2",
            SurfaceKind::H2 => "h2",
            SurfaceKind::Gamma3 => "gamma3",
            SurfaceKind::Gamma3Full => "gamma3-full",
            SurfaceKind::Upsilon3 => "upsilon3",
            SurfaceKind::Upsilon3Full => "upsilon3-full",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "p1" => SurfaceKind::P1,
            "p2" => SurfaceKind::P2,
            "h2" => SurfaceKind::H2,
            "gamma3" => SurfaceKind::Gamma3,
            "gamma3-full" => SurfaceKind::Gamma3Full,
            "upsilon3" => SurfaceKind::Upsilon3,
            "upsilon3-full" => SurfaceKind::Upsilon3Full,
            _ => return None,
        })
    }

    fn contains(self, f: &FieldSpec, c: &[FqElem]) -> bool {
        let sq = |a: FqElem| f.mul(a, a);
        match self {
            SurfaceKind::P1 => c[1] == sq(c[0]),
            SurfaceKind::P2 => c[2] == f.add(sq(c[0]), sq(c[1])),
            SurfaceKind::H2 => c[2] == f.sub(sq(c[0]), sq(c[1])),
            SurfaceKind::Gamma3 | SurfaceKind::Gamma3Full => {
                let on = f.mul(c[2], c[3]) == f.add(sq(c[0]), sq(c[1]));
                let origin = c.iter().all(|&x| x == f.zero());
                on && (self == SurfaceKind::Gamma3Full || !origin)
            }
            SurfaceKind::Upsilon3 | SurfaceKind::Upsilon3Full => {
                let on = f.add(sq(c[2]), sq(c[3])) == f.add(sq(c[0]), sq(c[1]));
                let origin = c.iter().all(|&x| x == f.zero());
                on && (self == SurfaceKind::Upsilon3Full || !origin)
            }
        }
    }
}

/// A point of the ambient space `F_q^(d+1)` lying on a surface.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SurfacePoint {
    pub coords: Vec<FqElem>,
}

pub(crate) fn flatten(coords: &[FqElem], q: u64) -> u64 {
    let mut v: u64 = 0;
    for c in coords {
        v = v * q + u64::from(c.index());
    }
    v
}

pub(crate) fn unflatten(mut flat: u64, q: u64, dim: u32) -> Vec<FqElem> {
    let mut out = vec![FqElem(0); dim as usize];
    for i in (0..dim as usize).rev() {
        out[i] = FqElem((flat % q) as u32);
        flat /= q;
    }
    out
}

/// Enumerated surface data shared by the transform layer.
pub(crate) struct SurfaceData {
    /// Flat ambient index of each surface point, ascending.
    pub flats: Vec<u64>,
    /// Coordinates, `npoints x ambient_dim`, element indices.
    pub coords: Vec<u32>,
    /// Position in `flats` for each ambient flat index, `u32::MAX` off-surface.
    pub index_of: Vec<u32>,
}

/// A surface over a concrete field.
#[derive(Clone)]
pub struct SurfaceSpec {
    kind: SurfaceKind,
    field: Arc<FieldSpec>,
    data: OnceLock<Arc<SurfaceData>>,
}

impl PartialEq for SurfaceSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && *self.field == *other.field
    }
}

impl std::fmt::Debug for SurfaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SurfaceSpec({} over F_{})", self.kind.name(), self.field.q())
    }
}

impl SurfaceSpec {
    pub fn new(kind: SurfaceKind, field: Arc<FieldSpec>) -> Result<Self> {
        let m = kind.ambient_dim();
        let count = (0..m).try_fold(1u64, |acc, _| {
            let next = acc.checked_mul(u64::from(field.q()))?;
            (next <= AMBIENT_GUARD).then_some(next)
        });
        if count.is_none() {
            return Err(Error::CostGuard(
                u128::from(field.q()).pow(m),
            ));
        }
        Ok(SurfaceSpec {
            kind,
            field,
            data: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn ambient_dim(&self) -> u32 {
        self.kind.ambient_dim()
    }

    pub fn ambient_count(&self) -> u64 {
        u64::from(self.q()).pow(self.ambient_dim())
    }

    pub(crate) fn data(&self) -> &Arc<SurfaceData> {
        self.data.get_or_init(|| {
            let f = &self.field;
            let q = u64::from(f.q());
            let m = self.ambient_dim();
            let total = self.ambient_count();
            let mut flats = Vec::new();
            let mut coords = Vec::new();
            let mut index_of = vec![u32::MAX; total as usize];
            let mut c = vec![FqElem(0); m as usize];
            for flat in 0..total {
                let mut rem = flat;
                for i in (0..m as usize).rev() {
                    c[i] = FqElem((rem % q) as u32);
                    rem /= q;
                }
                if self.kind.contains(f, &c) {
                    index_of[flat as usize] = flats.len() as u32;
                    flats.push(flat);
                    coords.extend(c.iter().map(|e| e.index()));
                }
            }
            Arc::new(SurfaceData {
                flats,
                coords,
                index_of,
            })
        })
    }

    pub fn point_count(&self) -> usize {
        self.data().flats.len()
    }

    pub fn contains(&self, coords: &[FqElem]) -> bool {
        assert_eq!(coords.len(), self.ambient_dim() as usize);
        self.kind.contains(&self.field, coords)
    }

    /// Position of an ambient point in the surface enumeration.
    pub fn index_of(&self, coords: &[FqElem]) -> Option<usize> {
        let flat = flatten(coords, u64::from(self.q()));
        let i = self.data().index_of[flat as usize];
        (i != u32::MAX).then_some(i as usize)
    }

    pub fn point(&self, index: usize) -> SurfacePoint {
        let m = self.ambient_dim() as usize;
        let coords = self.data().coords[index * m..(index + 1) * m]
            .iter()
            .map(|&v| FqElem(v))
            .collect();
        SurfacePoint { coords }
    }
}

/// All points of the surface, in ambient enumeration order.
pub fn enumerate_surface(s: &SurfaceSpec) -> Vec<SurfacePoint> {
    (0..s.point_count()).map(|i| s.point(i)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    Sphere,
    Saddle,
    Line,
    Slice,
    Critical,
}

/// A finite set of ambient points with canonical (sorted) iteration order.
#[derive(Clone)]
pub struct PointSet {
    field: Arc<FieldSpec>,
    ambient_dim: u32,
    provenance: Provenance,
    flats: BTreeSet<u64>,
}

impl std::fmt::Debug for PointSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PointSet({:?}, {} points in F_{}^{})", self.provenance, self.flats.len(), self.field.q(), self.ambient_dim)
    }
}

impl PointSet {
    fn new(field: &Arc<FieldSpec>, ambient_dim: u32, provenance: Provenance) -> Self {
        PointSet {
            field: Arc::clone(field),
            ambient_dim,
            provenance,
            flats: BTreeSet::new(),
        }
    }

    fn insert(&mut self, coords: &[FqElem]) {
        self.flats.insert(flatten(coords, u64::from(self.field.q())));
    }

    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn contains(&self, coords: &[FqElem]) -> bool {
        self.flats
            .contains(&flatten(coords, u64::from(self.field.q())))
    }

    pub fn iter(&self) -> impl Iterator<Item = SurfacePoint> + '_ {
        let q = u64::from(self.field.q());
        let dim = self.ambient_dim;
        self.flats.iter().map(move |&flat| SurfacePoint {
            coords: unflatten(flat, q, dim),
        })
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        self.flats.intersection(&other.flats).count()
    }

    pub fn union_len(&self, other: &PointSet) -> usize {
        self.flats.union(&other.flats).count()
    }

    pub fn same_points(&self, other: &PointSet) -> bool {
        self.flats == other.flats
    }
}

/// A set of `k`-tuples of surface points with a common sum.
pub struct TupleSet {
    field: Arc<FieldSpec>,
    ambient_dim: u32,
    tuples: Vec<Vec<u64>>,
}

impl std::fmt::Debug for TupleSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TupleSet({} tuples in F_{}^{})", self.tuples.len(), self.field.q(), self.ambient_dim)
    }
}

impl TupleSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<SurfacePoint>> + '_ {
        let q = u64::from(self.field.q());
        let dim = self.ambient_dim;
        self.tuples.iter().map(move |t| {
            t.iter()
                .map(|&flat| SurfacePoint {
                    coords: unflatten(flat, q, dim),
                })
                .collect()
        })
    }
}

/// `|{(x, y) : x^2 - c y^2 = r}|` by exhaustive enumeration.
pub fn count_conic(c: FqElem, r: FqElem, field: &FieldSpec) -> u64 {
    let mut count = 0;
    for x in field.elements() {
        for y in field.elements() {
            if field.sub(field.mul(x, x), field.mul(c, field.mul(y, y))) == r {
                count += 1;
            }
        }
    }
    count
}

fn dot_self(field: &FieldSpec, a: FqElem, b: FqElem) -> FqElem {
    field.add(field.mul(a, a), field.mul(b, b))
}

/// The sphere `{eta in F_q^2 : (gamma - eta) . (gamma - eta) = s}`.
pub fn sphere(center: [FqElem; 2], s: FqElem, field: &Arc<FieldSpec>) -> PointSet {
    let mut set = PointSet::new(field, 2, Provenance::Sphere);
    for e1 in field.elements() {
        for e2 in field.elements() {
            let d1 = field.sub(center[0], e1);
            let d2 = field.sub(center[1], e2);
            if dot_self(field, d1, d2) == s {
                set.insert(&[e1, e2]);
            }
        }
    }
    set
}

/// The saddle `{eta : (gamma - eta) (.) (gamma - eta) = s}` with
/// `xi (.) xi = xi_1^2 - xi_2^2`.
pub fn saddle(center: [FqElem; 2], s: FqElem, field: &Arc<FieldSpec>) -> PointSet {
    let mut set = PointSet::new(field, 2, Provenance::Saddle);
    for e1 in field.elements() {
        for e2 in field.elements() {
            let d1 = field.sub(center[0], e1);
            let d2 = field.sub(center[1], e2);
            if field.sub(field.mul(d1, d1), field.mul(d2, d2)) == s {
                set.insert(&[e1, e2]);
            }
        }
    }
    set
}

/// All `k`-tuples of surface points summing to `target`, by exhaustive
/// enumeration over `S^(k-1)` with a membership test for the last component.
pub fn sigma_set(s: &SurfaceSpec, k: u32, target: &[FqElem]) -> Result<TupleSet> {
    assert!(matches!(k, 2 | 3), "tuple enumeration supports k = 2, 3");
    assert_eq!(target.len(), s.ambient_dim() as usize);
    let npoints = s.point_count() as u128;
    let cost = npoints.pow(k - 1);
    if cost > COST_GUARD {
        return Err(Error::CostGuard(cost));
    }
    let f = s.field();
    let q = u64::from(s.q());
    let m = s.ambient_dim() as usize;
    let data = s.data();
    let n = data.flats.len();
    let coord = |i: usize, j: usize| FqElem(data.coords[i * m + j]);
    let mut tuples = Vec::new();
    let mut last = vec![FqElem(0); m];
    if k == 2 {
        for i in 0..n {
            for j in 0..m {
                last[j] = f.sub(target[j], coord(i, j));
            }
            let flat = flatten(&last, q);
            if data.index_of[flat as usize] != u32::MAX {
                tuples.push(vec![data.flats[i], flat]);
            }
        }
    } else {
        for i1 in 0..n {
            for i2 in 0..n {
                for j in 0..m {
                    last[j] = f.sub(f.sub(target[j], coord(i1, j)), coord(i2, j));
                }
                let flat = flatten(&last, q);
                if data.index_of[flat as usize] != u32::MAX {
                    tuples.push(vec![data.flats[i1], data.flats[i2], flat]);
                }
            }
        }
    }
    Ok(TupleSet {
        field: Arc::clone(f),
        ambient_dim: s.ambient_dim(),
        tuples,
    })
}

/// The locus where the k-fold convolution takes its exceptional value:
/// `2 tau = xi^2` on `P^2`, `3 tau = xi^2` on `P^1` (k = 3, p > 3) and
/// `2 tau = xi (.) xi` on `H^2`.
pub fn critical_set(s: &SurfaceSpec, k: u32) -> Result<PointSet> {
    let f = s.field();
    let mut set = PointSet::new(f, s.ambient_dim(), Provenance::Critical);
    match (s.kind(), k) {
        (SurfaceKind::P2, 2) => {
            for e1 in f.elements() {
                for e2 in f.elements() {
                    let tau = f.half(dot_self(f, e1, e2));
                    set.insert(&[e1, e2, tau]);
                }
            }
        }
        (SurfaceKind::H2, 2) => {
            for e1 in f.elements() {
                for e2 in f.elements() {
                    let tau = f.half(f.sub(f.mul(e1, e1), f.mul(e2, e2)));
                    set.insert(&[e1, e2, tau]);
                }
            }
        }
        (SurfaceKind::P1, 3) => {
            if f.p() == 3 {
                return Err(Error::UnsupportedSurface);
            }
            let third = f.inv(f.from_int(3));
            for e in f.elements() {
                set.insert(&[e, f.mul(third, f.mul(e, e))]);
            }
        }
        _ => return Err(Error::UnsupportedSurface),
    }
    Ok(set)
}

/// The two lines `xi/2 + t (1, +-w)`, `w^2 = -1`, whose union is the
/// zero-radius sphere centered at `xi/2`; requires `q = 1 (mod 4)`.
pub fn sphere_line_decomposition(
    xi: [FqElem; 2],
    field: &Arc<FieldSpec>,
) -> Result<(PointSet, PointSet)> {
    if field.q() % 4 != 1 {
        return Err(Error::WrongResidueClass {
            residue: 1,
            modulus: 4,
        });
    }
    let w = field.sqrt_minus_one()?;
    let half = [field.half(xi[0]), field.half(xi[1])];
    let mut plus = PointSet::new(field, 2, Provenance::Line);
    let mut minus = PointSet::new(field, 2, Provenance::Line);
    for t in field.elements() {
        plus.insert(&[field.add(half[0], t), field.add(half[1], field.mul(t, w))]);
        minus.insert(&[
            field.add(half[0], t),
            field.sub(half[1], field.mul(t, w)),
        ]);
    }
    Ok((plus, minus))
}

/// Decompose the punctured cone `Gamma^3` into `q^2 + 1` disjoint punctured
/// lines; requires `q = 3 (mod 4)`.
///
/// Representatives: the enumeration-least of each antipodal pair on the two
/// quadrics `xi^2 = tau sigma = +-1`, together with `(0, 0, 1, 0)` and
/// `(0, 0, 0, 1)`.
pub fn cone_slicing(field: &Arc<FieldSpec>) -> Result<Vec<(SurfacePoint, PointSet)>> {
    if field.q() % 4 != 3 {
        return Err(Error::WrongResidueClass {
            residue: 3,
            modulus: 4,
        });
    }
    let gamma = SurfaceSpec::new(SurfaceKind::Gamma3, Arc::clone(field))?;
    let q = u64::from(field.q());
    let one = field.one();
    let minus_one = field.neg(one);
    let mut reps: Vec<Vec<FqElem>> = Vec::new();
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    for idx in 0..gamma.point_count() {
        let pt = gamma.point(idx);
        let c = &pt.coords;
        let norm = dot_self(field, c[0], c[1]);
        let prod = field.mul(c[2], c[3]);
        if !((norm == one && prod == one) || (norm == minus_one && prod == minus_one)) {
            continue;
        }
        let flat = flatten(c, q);
        if seen.contains(&flat) {
            continue;
        }
        let neg: Vec<FqElem> = c.iter().map(|&x| field.neg(x)).collect();
        seen.insert(flatten(&neg, q));
        seen.insert(flat);
        reps.push(c.clone());
    }
    let z = field.zero();
    reps.push(vec![z, z, one, z]);
    reps.push(vec![z, z, z, one]);

    let mut out = Vec::with_capacity(reps.len());
    let mut covered: BTreeSet<u64> = BTreeSet::new();
    for rep in reps {
        let mut line = PointSet::new(field, 4, Provenance::Slice);
        for alpha in field.elements() {
            if alpha == field.zero() {
                continue;
            }
            let scaled: Vec<FqElem> = rep.iter().map(|&x| field.mul(alpha, x)).collect();
            line.insert(&scaled);
        }
        for &flat in &line.flats {
            let fresh = covered.insert(flat);
            assert!(fresh, "slicing lines must be pairwise disjoint");
        }
        out.push((SurfacePoint { coords: rep }, line));
    }
    assert_eq!(
        covered.len(),
        gamma.point_count(),
        "slicing lines must cover the punctured cone"
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;

    fn field(p: u32, n: u32) -> Arc<FieldSpec> {
        Arc::new(make_field(p, n).unwrap())
    }

    fn surface(kind: SurfaceKind, p: u32, n: u32) -> SurfaceSpec {
        SurfaceSpec::new(kind, field(p, n)).unwrap()
    }

    #[test]
    fn surface_cardinalities() {
        assert_eq!(surface(SurfaceKind::P2, 3, 1).point_count(), 9);
        assert_eq!(surface(SurfaceKind::Gamma3Full, 3, 1).point_count(), 21);
        assert_eq!(surface(SurfaceKind::Upsilon3Full, 5, 1).point_count(), 145);
        for q in [3u32, 7, 11] {
            let s = surface(SurfaceKind::Gamma3Full, q, 1);
            assert_eq!(s.point_count() as u32, q * (q * q - q + 1), "q = {q}");
            let punctured = surface(SurfaceKind::Gamma3, q, 1);
            assert_eq!(punctured.point_count() as u32, (q - 1) * (q * q + 1));
        }
        for p in [3u32, 5, 7] {
            let s = surface(SurfaceKind::Upsilon3Full, p, 1);
            assert_eq!(s.point_count() as u32, p * (p * p + p - 1), "p = {p}");
        }
        for q in [3u32, 5, 9] {
            assert_eq!(surface(SurfaceKind::H2, if q == 9 { 3 } else { q }, if q == 9 { 2 } else { 1 }).point_count() as u32, q * q);
            assert_eq!(surface(SurfaceKind::P1, if q == 9 { 3 } else { q }, if q == 9 { 2 } else { 1 }).point_count() as u32, q);
        }
    }

    #[test]
    fn membership_agrees_with_equations() {
        for kind in [
            SurfaceKind::P1,
            SurfaceKind::P2,
            SurfaceKind::H2,
            SurfaceKind::Gamma3,
            SurfaceKind::Gamma3Full,
            SurfaceKind::Upsilon3,
            SurfaceKind::Upsilon3Full,
        ] {
            for (p, n) in [(5u32, 1u32), (3, 2), (13, 1)] {
                let s = surface(kind, p, n);
                let f = s.field();
                let q = u64::from(s.q());
                let mut on_surface = 0;
                for flat in 0..s.ambient_count() {
                    let c = unflatten(flat, q, s.ambient_dim());
                    if s.contains(&c) {
                        on_surface += 1;
                        assert!(s.index_of(&c).is_some());
                    } else {
                        assert!(s.index_of(&c).is_none());
                    }
                    let _ = f;
                }
                assert_eq!(on_surface, s.point_count());
            }
        }
    }

    #[test]
    fn conic_counts() {
        let f7 = field(7, 1);
        assert_eq!(count_conic(f7.one(), f7.one(), &f7), 6); // c square, r != 0
        let ns = f7
            .elements()
            .find(|&c| c != f7.zero() && !f7.is_square(c))
            .unwrap();
        assert_eq!(count_conic(ns, f7.one(), &f7), 8); // c nonsquare
        let f5 = field(5, 1);
        assert_eq!(count_conic(f5.zero(), f5.zero(), &f5), 5);
    }

    #[test]
    fn conic_counts_exhaustive() {
        for (p, n) in [(3u32, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let f = field(p, n);
            let q = f.q() as u64;
            for c in f.elements() {
                for r in f.elements() {
                    let got = count_conic(c, r, &f);
                    let expect = if r == f.zero() {
                        if c == f.zero() {
                            q
                        } else if f.is_square(c) {
                            2 * q - 1
                        } else {
                            1
                        }
                    } else if c == f.zero() {
                        // x^2 = r: q solutions in y times #sqrt(r)
                        let roots = f
                            .elements()
                            .filter(|&x| f.mul(x, x) == r)
                            .count() as u64;
                        roots * q
                    } else if f.is_square(c) {
                        q - 1
                    } else {
                        q + 1
                    };
                    assert_eq!(got, expect, "q = {q}, c = {c:?}, r = {r:?}");
                }
            }
        }
    }

    #[test]
    fn sphere_examples() {
        let f5 = field(5, 1);
        let z = f5.zero();
        assert_eq!(sphere([z, z], z, &f5).len(), 9); // q = 1 (mod 4): 2q - 1
        let f7 = field(7, 1);
        let z7 = f7.zero();
        let s0 = sphere([z7, z7], z7, &f7);
        assert_eq!(s0.len(), 1);
        assert!(s0.contains(&[z7, z7]));
        assert_eq!(sphere([z7, z7], f7.one(), &f7).len(), 8); // q + 1
    }

    #[test]
    fn saddle_examples() {
        for q in [3u32, 5, 7] {
            let f = field(q, 1);
            let z = f.zero();
            assert_eq!(saddle([z, z], z, &f).len(), (2 * q - 1) as usize);
        }
        let f5 = field(5, 1);
        assert_eq!(saddle([f5.zero(), f5.zero()], f5.one(), &f5).len(), 4); // q - 1
        let one = f5.one();
        assert!(saddle([one, one], f5.zero(), &f5).contains(&[one, one]));
    }

    #[test]
    fn sigma_set_examples() {
        // P^1, k = 3, q = 7 = 1 (mod 3): 2q - 1 tuples on the critical curve
        let s7 = surface(SurfaceKind::P1, 7, 1);
        let f7 = s7.field().clone();
        let xi = f7.element(1);
        let tau = f7.mul(f7.inv(f7.from_int(3)), f7.mul(xi, xi));
        assert_eq!(sigma_set(&s7, 3, &[xi, tau]).unwrap().len(), 13);
        // q = 5 = 2 (mod 3): singleton
        let s5 = surface(SurfaceKind::P1, 5, 1);
        let f5 = s5.field().clone();
        let xi = f5.element(1);
        let tau = f5.mul(f5.inv(f5.from_int(3)), f5.mul(xi, xi));
        assert_eq!(sigma_set(&s5, 3, &[xi, tau]).unwrap().len(), 1);
        // full cone at the origin: |Gamma_0^3| tuples
        let g3 = surface(SurfaceKind::Gamma3Full, 3, 1);
        let z = g3.field().zero();
        let t = sigma_set(&g3, 2, &[z, z, z, z]).unwrap();
        assert_eq!(t.len(), 21);
        for tuple in t.iter() {
            // each tuple really sums to the target
            let f = g3.field();
            for j in 0..4 {
                let sum = f.add(tuple[0].coords[j], tuple[1].coords[j]);
                assert_eq!(sum, z);
            }
        }
    }

    #[test]
    fn critical_set_sizes() {
        let p2 = surface(SurfaceKind::P2, 5, 1);
        assert_eq!(critical_set(&p2, 2).unwrap().len(), 25);
        let p1 = surface(SurfaceKind::P1, 7, 1);
        assert_eq!(critical_set(&p1, 3).unwrap().len(), 7);
        let h2 = surface(SurfaceKind::H2, 3, 1);
        assert_eq!(critical_set(&h2, 2).unwrap().len(), 9);
        let g = surface(SurfaceKind::Gamma3, 3, 1);
        assert_eq!(critical_set(&g, 2).unwrap_err(), Error::UnsupportedSurface);
        let p1_3 = surface(SurfaceKind::P1, 3, 1);
        assert_eq!(
            critical_set(&p1_3, 3).unwrap_err(),
            Error::UnsupportedSurface
        );
    }

    #[test]
    fn line_decomposition_of_zero_spheres() {
        for (p, n) in [(5u32, 1u32), (13, 1), (3, 2)] {
            let f = field(p, n);
            let q = f.q() as usize;
            let xi = [f.one(), f.from_int(2)];
            let (plus, minus) = sphere_line_decomposition(xi, &f).unwrap();
            assert_eq!(plus.len(), q);
            assert_eq!(minus.len(), q);
            assert_eq!(plus.union_len(&minus), 2 * q - 1);
            assert_eq!(plus.intersection_len(&minus), 1);
            let center = [f.half(xi[0]), f.half(xi[1])];
            assert!(plus.contains(&center) && minus.contains(&center));
            let zero_sphere = sphere(center, f.zero(), &f);
            assert_eq!(zero_sphere.len(), 2 * q - 1);
            let mut union = plus.clone();
            union.flats.extend(&minus.flats);
            assert!(union.same_points(&zero_sphere));
        }
        let f7 = field(7, 1);
        assert_eq!(
            sphere_line_decomposition([f7.zero(), f7.zero()], &f7).unwrap_err(),
            Error::WrongResidueClass {
                residue: 1,
                modulus: 4
            }
        );
    }

    /// Every pair of base points lies on exactly one common sphere
    /// `S((xi1+xi2)/2, (2 tau - (xi1+xi2)^2)/4)` as tau varies.
    #[test]
    fn pair_sees_unique_tau_on_paraboloid() {
        for q in [3u32, 5, 7] {
            let f = field(q, 1);
            let elements: Vec<FqElem> = f.elements().collect();
            for &a1 in &elements {
                for &a2 in &elements {
                    for &b1 in &elements {
                        for &b2 in &elements {
                            let xi = [f.add(a1, b1), f.add(a2, b2)];
                            let center = [f.half(xi[0]), f.half(xi[1])];
                            let xisq = dot_self(&f, xi[0], xi[1]);
                            let quarter = f.inv(f.from_int(4));
                            let mut count = 0;
                            for &tau in &elements {
                                let s = f.mul(
                                    quarter,
                                    f.sub(f.add(tau, tau), xisq),
                                );
                                let sph = sphere(center, s, &f);
                                if sph.contains(&[a1, a2]) && sph.contains(&[b1, b2]) {
                                    count += 1;
                                }
                            }
                            assert_eq!(count, 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unique_line_pair_through_two_points() {
        let f = field(5, 1);
        let w = f.sqrt_minus_one().unwrap();
        let elements: Vec<FqElem> = f.elements().collect();
        for &x1 in &elements {
            for &x2 in &elements {
                for &y1 in &elements {
                    for &y2 in &elements {
                        let mut hits = 0;
                        for &c1 in &elements {
                            for &c2 in &elements {
                                let xi = [c1, c2];
                                // xi1 on L_-(xi), xi2 on L_+(xi)?
                                let h = [f.half(xi[0]), f.half(xi[1])];
                                let t_minus = f.sub(x1, h[0]);
                                let on_minus =
                                    f.sub(x2, h[1]) == f.neg(f.mul(t_minus, w));
                                let t_plus = f.sub(y1, h[0]);
                                let on_plus = f.sub(y2, h[1]) == f.mul(t_plus, w);
                                if on_minus && on_plus {
                                    hits += 1;
                                }
                            }
                        }
                        assert_eq!(hits, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn cone_slicing_small_fields() {
        for q in [3u32, 7, 11] {
            let f = field(q, 1);
            let slices = cone_slicing(&f).unwrap();
            assert_eq!(slices.len(), (q * q + 1) as usize, "q = {q}");
            for (_, line) in &slices {
                assert_eq!(line.len(), (q - 1) as usize);
            }
            // disjointness and coverage are asserted inside cone_slicing;
            // check the two-term decomposition structure on every line.
            let gamma = surface(SurfaceKind::Gamma3, q, 1);
            for (_, line) in &slices {
                for eta in line.iter() {
                    let tuples = sigma_set(&gamma, 2, &eta.coords).unwrap();
                    assert_eq!(tuples.len(), (q - 2) as usize);
                    for t in tuples.iter() {
                        assert!(line.contains(&t[0].coords));
                        assert!(line.contains(&t[1].coords));
                    }
                }
            }
        }
        let f5 = field(5, 1);
        assert_eq!(
            cone_slicing(&f5).unwrap_err(),
            Error::WrongResidueClass {
                residue: 3,
                modulus: 4
            }
        );
    }

    #[test]
    fn sigma_set_counts_match_convolution_counts() {
        // P^2, k = 2 and P^1, k = 3 against the piecewise counts
        for q in [5u32, 7, 9, 11, 13] {
            let (p, n) = if q == 9 { (3, 2) } else { (q, 1) };
            let s = surface(SurfaceKind::P2, p, n);
            let f = s.field().clone();
            for xi1 in f.elements() {
                for xi2 in f.elements() {
                    for tau in f.elements() {
                        let len =
                            sigma_set(&s, 2, &[xi1, xi2, tau]).unwrap().len() as u32;
                        let critical = f.add(tau, tau) == dot_self(&f, xi1, xi2);
                        let expect = match (critical, q % 4 == 1) {
                            (true, true) => 2 * q - 1,
                            (true, false) => 1,
                            (false, true) => q - 1,
                            (false, false) => q + 1,
                        };
                        assert_eq!(len, expect, "P2 q={q} tau={tau:?}");
                    }
                }
            }
            if p > 3 {
                let s1 = surface(SurfaceKind::P1, p, n);
                for xi in f.elements() {
                    for tau in f.elements() {
                        let len = sigma_set(&s1, 3, &[xi, tau]).unwrap().len() as u32;
                        let critical =
                            f.mul(f.from_int(3), tau) == f.mul(xi, xi);
                        let expect = match (critical, q % 3 == 1) {
                            (true, true) => 2 * q - 1,
                            (true, false) => 1,
                            (false, true) => q - 1,
                            (false, false) => q + 1,
                        };
                        assert_eq!(len, expect, "P1 q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn cost_guards_fire() {
        // ambient space too large to enumerate
        let f127 = field(127, 1);
        assert!(matches!(
            SurfaceSpec::new(SurfaceKind::Gamma3Full, f127),
            Err(Error::CostGuard(_))
        ));
        // triple enumeration over a large paraboloid
        let s = surface(SurfaceKind::P2, 101, 1);
        let z = s.field().zero();
        assert!(matches!(
            sigma_set(&s, 3, &[z, z, z]),
            Err(Error::CostGuard(_))
        ));
        // pairs on the same surface stay within budget
        assert!(sigma_set(&s, 2, &[z, z, z]).is_ok());
    }

    #[test]
    fn sigma_set_counts_on_full_cone() {
        for q in [3u32, 7] {
            let s = surface(SurfaceKind::Gamma3Full, q, 1);
            let f = s.field().clone();
            let qq = u64::from(q);
            for flat in 0..s.ambient_count() {
                let c = unflatten(flat, qq, 4);
                let len = sigma_set(&s, 2, &c).unwrap().len() as u32;
                let origin = c.iter().all(|&x| x == f.zero());
                let expect = if origin {
                    q * (q * q - q + 1)
                } else if s.contains(&c) {
                    q
                } else {
                    q * (q - 1)
                };
                assert_eq!(len, expect, "Gamma_0^3 q={q}");
            }
        }
    }
}
