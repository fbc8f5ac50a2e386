//! From an F_{q^e}-kernel basis to K(t)-independent primitive relations.
//!
//! The kernel is closed under the shifts pi^k and t^j that stay inside the
//! bounds, so one relation H shows up as a whole family p(t) H. We look for
//! members whose non-Omega slots sit at a single pi-exponent (so they become
//! F_q[t] after a monomial scaling), strip their F_q[t] content, and keep a
//! K(t)-independent subset.

use super::linalg::Echelon;
use super::{RelationVector, SearchBounds};
use crate::field::{Field, LocalElement, Res, EXACT};
use crate::poly::{FqPoly, TPoly};

/// Column layout: slot-major, then t-degree, then pi-exponent.
pub(crate) struct Layout {
    pub nslots: usize,
    pub d_t: usize,
    pub exps: Vec<i64>,
}

impl Layout {
    pub fn new(bounds: &SearchBounds, ram: i64, nslots: usize) -> Self {
        Layout { nslots, d_t: bounds.d_t, exps: bounds.exponents(ram).collect() }
    }

    pub fn per_slot(&self) -> usize {
        (self.d_t + 1) * self.exps.len()
    }

    pub fn ncols(&self) -> usize {
        self.nslots * self.per_slot()
    }

    pub fn col(&self, s: usize, j: usize, ni: usize) -> usize {
        s * self.per_slot() + j * self.exps.len() + ni
    }

    pub fn to_vec(&self, rel: &RelationVector) -> Vec<Res> {
        let mut v = vec![0; self.ncols()];
        for (s, p) in rel.slots.iter().enumerate() {
            for j in 0..=self.d_t {
                let c = p.coeff(j);
                for (ni, &n) in self.exps.iter().enumerate() {
                    v[self.col(s, j, ni)] = c.coeff(n);
                }
            }
        }
        v
    }

    pub fn to_relation(&self, field: &Field, v: &[Res]) -> RelationVector {
        let slots = (0..self.nslots)
            .map(|s| {
                let coeffs = (0..=self.d_t)
                    .map(|j| {
                        let terms: Vec<_> = self
                            .exps
                            .iter()
                            .enumerate()
                            .map(|(ni, &n)| (n, v[self.col(s, j, ni)]))
                            .filter(|&(_, d)| d != 0)
                            .collect();
                        LocalElement::from_terms(field, &terms, EXACT)
                    })
                    .collect();
                TPoly::new(field, coeffs)
            })
            .collect();
        RelationVector::new(slots)
    }
}

/// Fraction-free row echelon over K(t) for vectors of exact polynomials.
struct KtEchelon {
    rows: Vec<(usize, Vec<TPoly>)>,
}

impl KtEchelon {
    fn push(&mut self, mut v: Vec<TPoly>) -> bool {
        loop {
            let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
            let Some((_, row)) = self.rows.iter().find(|(q, _)| *q == p) else {
                self.rows.push((p, v));
                return true;
            };
            let (a, b) = (row[p].clone(), v[p].clone());
            v = v.iter().zip(row).map(|(x, r)| x.mul(&a).sub(&r.mul(&b))).collect();
        }
    }
}

/// Exact quotient p / g for monic g over F_q, if the division is exact.
fn div_exact(p: &TPoly, g: &FqPoly) -> Option<TPoly> {
    let field = p.field().clone();
    let d = g.degree()?;
    let gl: Vec<LocalElement> = g.coeffs().iter().map(|&c| LocalElement::monomial(&field, c, 0)).collect();
    let mut rem: Vec<LocalElement> = p.coeffs().to_vec();
    if rem.len() <= d {
        return p.is_zero().then(|| TPoly::zero(&field));
    }
    let mut quot = vec![LocalElement::zero(&field); rem.len() - d];
    for i in (d..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        for (k, gk) in gl.iter().enumerate() {
            rem[i - d + k] = rem[i - d + k].sub_ref(&c.mul_ref(gk));
        }
        quot[i - d] = c;
    }
    rem.iter().all(|c| c.is_zero()).then(|| TPoly::new(&field, quot))
}

/// Scale so the first nonzero digit in (slot, t-degree, pi-exponent) order is 1.
pub(crate) fn normalize(rel: RelationVector) -> RelationVector {
    let lead = rel.slots.iter().flat_map(|p| p.coeffs().iter()).find_map(|c| c.leading());
    let Some((_, d)) = lead else { return rel };
    let field = rel.slots[0].field().clone();
    let inv = LocalElement::monomial(&field, field.residue().inv(d).expect("nonzero digit"), 0);
    RelationVector::new(rel.slots.iter().map(|p| p.scale(&inv)).collect())
}

/// Scale a relation whose non-Omega slots live at pi^{n0} into F_q[t] form and
/// remove their common F_q[t] factor.
fn primitive(field: &Field, rel: &RelationVector, n0: i64) -> Option<RelationVector> {
    let shift = LocalElement::monomial(field, 1, -n0);
    let slots: Vec<TPoly> = rel.slots.iter().map(|p| p.scale(&shift)).collect();
    let others = || std::iter::once(0).chain(2..slots.len());
    let lead = others().flat_map(|s| slots[s].coeffs().iter()).find_map(|c| c.leading())?.1;
    let inv = LocalElement::monomial(field, field.residue().inv(lead)?, 0);
    let slots: Vec<TPoly> = slots.iter().map(|p| p.scale(&inv)).collect();
    let mut g: Option<FqPoly> = None;
    for s in others() {
        let digits: Vec<Res> = slots[s].coeffs().iter().map(|c| c.coeff(0)).collect();
        let fq = FqPoly::new(field, digits).ok()?;
        if fq.is_zero() {
            continue;
        }
        g = Some(match g {
            None => fq.monic(),
            Some(h) => h.gcd(&fq),
        });
    }
    let g = g?;
    if g.degree() == Some(0) {
        return Some(RelationVector::new(slots));
    }
    match slots.iter().map(|p| div_exact(p, &g)).collect::<Option<Vec<_>>>() {
        Some(q) => Some(RelationVector::new(q)),
        None => Some(RelationVector::new(slots)),
    }
}

fn size_key(rel: &RelationVector) -> (usize, usize) {
    let deg = rel.slots.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let terms = rel.slots.iter().flat_map(|p| p.coeffs().iter()).map(|c| c.num_terms()).sum();
    (deg, terms)
}

/// A K(t)-basis of the relations spanned by `kernel`, preferring primitive
/// members with F_q[t] non-Omega coefficients. Each is normalized.
pub fn independent_relations(field: &Field, kernel: &[RelationVector], bounds: &SearchBounds) -> Vec<RelationVector> {
    let Some(first) = kernel.first() else { return Vec::new() };
    let layout = Layout::new(bounds, field.ram, first.slots.len());
    let res = field.residue();
    let basis: Vec<Vec<Res>> = kernel.iter().map(|r| layout.to_vec(r)).collect();
    let mut cands = Vec::new();
    for (ni0, &n0) in layout.exps.iter().enumerate() {
        let mut ech = Echelon::new(res, basis.len());
        'cols: for s in (0..layout.nslots).filter(|&s| s != 1) {
            for j in 0..=layout.d_t {
                for ni in (0..layout.exps.len()).filter(|&ni| ni != ni0) {
                    let c = layout.col(s, j, ni);
                    ech.push(basis.iter().map(|b| b[c]).collect());
                    if ech.is_full() {
                        break 'cols;
                    }
                }
            }
        }
        for y in ech.kernel() {
            let mut v = vec![0; layout.ncols()];
            for (yi, b) in y.iter().zip(&basis) {
                if *yi != 0 {
                    for (vc, &bc) in v.iter_mut().zip(b) {
                        *vc = res.add(*vc, res.mul(*yi, bc));
                    }
                }
            }
            if let Some(p) = primitive(field, &layout.to_relation(field, &v), n0) {
                cands.push(p);
            }
        }
    }
    cands.sort_by_key(size_key);
    let mut kt = KtEchelon { rows: Vec::new() };
    let mut out = Vec::new();
    for rel in cands.into_iter().chain(kernel.iter().cloned()) {
        if kt.push(rel.slots.clone()) {
            out.push(normalize(rel));
        }
    }
    out
}
