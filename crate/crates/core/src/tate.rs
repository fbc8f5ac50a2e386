//! Truncated Tate-algebra series in t with certified tails.
//!
//! A [`TateSeries`] stores the coefficients of t^0 .. t^{t_deg - 1}. An optional
//! [`TailBound`] bounds the pi-valuation of every coefficient from t_deg on,
//! which is what makes evaluation outside the unit disk (at t = theta) checkable.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{prec_add, ElementJson, Field, LocalElement, LocalNorm, EXACT};
use crate::poly::TPoly;

// Valuation bounds saturate here; anything this large is "beyond any precision".
const VBIG: i64 = 1 << 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TailKind {
    Omega,
    Lalpha,
    Product,
    User,
}

/// Lower bound j -> v_min(j) on the valuation of the coefficient of t^j.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum TailModel {
    /// Coefficients vanish (polynomials).
    Zero,
    /// v_min(j) = base + slope * j.
    Linear { base: i64, slope: i64 },
    /// v_min(j) = offset + scale * (q + q^2 + ... + q^j).
    Geometric { offset: i64, scale: i64, q: u64 },
}

// serde cannot combine `flatten` with `deny_unknown_fields`; SeriesJson still rejects strays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub kind: TailKind,
    #[serde(flatten)]
    pub model: TailModel,
}

fn sat(x: i128) -> i64 {
    x.clamp(-VBIG as i128, VBIG as i128) as i64
}

impl TailBound {
    pub fn new(kind: TailKind, model: TailModel) -> Self {
        TailBound { kind, model }
    }

    pub fn zero() -> Self {
        Self::new(TailKind::Product, TailModel::Zero)
    }

    pub fn v_min(&self, j: i64) -> i64 {
        match self.model {
            TailModel::Zero => VBIG,
            TailModel::Linear { base, slope } => sat(base as i128 + slope as i128 * j as i128),
            TailModel::Geometric { offset, scale, q } => {
                let mut s: i128 = 0;
                let mut qk: i128 = 1;
                for _ in 0..j {
                    qk = (qk * q as i128).min(VBIG as i128);
                    s = (s + qk).min(VBIG as i128);
                }
                sat(offset as i128 + scale as i128 * s)
            }
        }
    }

    /// (v_min(from), s) with v_min(j) >= v_min(from) + s (j - from) for all j >= from.
    pub fn linear_minorant(&self, from: i64) -> (i64, i64) {
        match self.model {
            TailModel::Zero => (VBIG, VBIG),
            TailModel::Linear { slope, .. } => (self.v_min(from), slope),
            // convex, so the secant at `from` stays below
            TailModel::Geometric { .. } => {
                let (a, b) = (self.v_min(from), self.v_min(from + 1));
                if b >= VBIG {
                    (a, VBIG)
                } else {
                    (a, b - a)
                }
            }
        }
    }

    pub fn twist(&self, n: i64, q: u64) -> Self {
        let k = q.pow(n.unsigned_abs() as u32);
        let model = match self.model {
            TailModel::Zero => TailModel::Zero,
            TailModel::Linear { base, slope } if n >= 0 => {
                TailModel::Linear { base: sat(base as i128 * k as i128), slope: sat(slope as i128 * k as i128) }
            }
            TailModel::Linear { base, slope } => {
                TailModel::Linear { base: base.div_euclid(k as i64), slope: slope.div_euclid(k as i64) }
            }
            TailModel::Geometric { offset, scale, q } if n >= 0 => TailModel::Geometric {
                offset: sat(offset as i128 * k as i128),
                scale: sat(scale as i128 * k as i128),
                q,
            },
            TailModel::Geometric { offset, scale, q } => {
                TailModel::Geometric { offset: offset.div_euclid(k as i64), scale: scale.div_euclid(k as i64), q }
            }
        };
        Self::new(self.kind, model)
    }

    /// min over j >= from of v_min(j) + j * va, or None if that is unbounded below
    /// (the series does not converge at a point of valuation va).
    pub fn certify(&self, from: i64, va: i64) -> Option<i64> {
        match self.model {
            TailModel::Zero => Some(EXACT),
            TailModel::Linear { slope, .. } => {
                (slope + va > 0).then(|| sat(self.v_min(from) as i128 + from as i128 * va as i128))
            }
            TailModel::Geometric { .. } => {
                let g = |j: i64| match self.v_min(j) {
                    v if v >= VBIG => VBIG,
                    v => sat(v as i128 + j as i128 * va as i128),
                };
                let mut j = from;
                let mut best = g(j);
                // convex in j: walk until it stops decreasing
                loop {
                    let next = g(j + 1);
                    if next >= best || best >= VBIG {
                        break;
                    }
                    best = next;
                    j += 1;
                    if j - from > 64 {
                        return None;
                    }
                }
                Some(best)
            }
        }
    }
}

/// A series in t over F_{q^e}((pi)), known modulo t^{t_deg}.
#[derive(Clone)]
pub struct TateSeries {
    field: Field,
    coeffs: Vec<LocalElement>,
    tail: Option<TailBound>,
}

/// JSON form of a [`TateSeries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub t_deg: usize,
    pub coeffs: Vec<ElementJson>,
    pub tail: Option<TailBound>,
}

impl TateSeries {
    pub fn new(field: &Field, coeffs: Vec<LocalElement>, tail: Option<TailBound>) -> Self {
        TateSeries { field: field.clone(), coeffs, tail }
    }

    /// A polynomial viewed as a series: its coefficients past t_deg are zero.
    pub fn from_poly(p: &TPoly, t_deg: usize) -> Self {
        let coeffs = (0..t_deg).map(|k| p.coeff(k)).collect();
        let tail = if p.degree().is_none_or(|d| d < t_deg) { Some(TailBound::zero()) } else { None };
        Self::new(p.field(), coeffs, tail)
    }

    pub fn constant(c: &LocalElement, t_deg: usize) -> Self {
        Self::from_poly(&TPoly::constant(c.clone()), t_deg)
    }

    pub fn one(field: &Field, t_deg: usize) -> Self {
        Self::constant(&LocalElement::one(field), t_deg)
    }

    pub fn zero(field: &Field, t_deg: usize) -> Self {
        Self::constant(&LocalElement::zero(field), t_deg)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t_deg(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[LocalElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &LocalElement {
        &self.coeffs[k]
    }

    pub fn tail(&self) -> Option<&TailBound> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: Option<TailBound>) -> Self {
        self.tail = tail;
        self
    }

    /// Replace coefficient k (used to inject faults in tests and tools).
    pub fn with_coeff(mut self, k: usize, c: LocalElement) -> Self {
        self.coeffs[k] = c;
        self
    }

    /// Smallest coefficient precision.
    pub fn min_prec(&self) -> i64 {
        self.coeffs.iter().map(|c| c.prec()).min().unwrap_or(EXACT)
    }

    pub fn truncate_t(&self, t_deg: usize) -> Self {
        let n = t_deg.min(self.coeffs.len());
        Self::new(&self.field, self.coeffs[..n].to_vec(), self.tail)
    }

    /// Global (alpha, beta) with v(c_j) >= alpha + beta j for every j, head included.
    /// Slopes are clipped at `clip` so steep tails do not drag alpha down through the head.
    fn global_minorant(&self, clip: i64) -> Option<(i64, i64)> {
        let tail = self.tail?;
        let t = self.coeffs.len() as i64;
        let (vt, s) = tail.linear_minorant(t);
        let beta = s.min(clip);
        let mut alpha = sat(vt as i128 - beta as i128 * t as i128);
        for (j, c) in self.coeffs.iter().enumerate() {
            let lb = c.val_lb().min(VBIG);
            alpha = alpha.min(sat(lb as i128 - beta as i128 * j as i128));
        }
        Some((alpha, beta))
    }

    fn clip(&self) -> i64 {
        self.field.ram * self.field.q() as i64
    }

    fn check(&self, other: &Self) {
        assert!(self.field.same_field(&other.field), "mixing series over different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let n = self.t_deg().min(other.t_deg());
        let coeffs = (0..n).map(|k| self.coeffs[k].add_ref(&other.coeffs[k])).collect();
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) => {
                let (va, sa) = a.linear_minorant(n as i64);
                let (vb, sb) = b.linear_minorant(n as i64);
                let slope = sa.min(sb);
                let at = va.min(vb);
                if slope >= VBIG {
                    Some(TailBound::zero())
                } else {
                    let base = sat(at as i128 - slope as i128 * n as i128);
                    Some(TailBound::new(TailKind::Product, TailModel::Linear { base, slope }))
                }
            }
            _ => None,
        };
        Self::new(&self.field, coeffs, tail)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.neg_ref()).collect(), self.tail)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &LocalElement) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.mul_ref(c)).collect();
        let tail = self.tail.map(|t| match t.model {
            TailModel::Zero => t,
            TailModel::Linear { base, slope } => TailBound::new(
                t.kind,
                TailModel::Linear { base: sat(base as i128 + c.val_lb().min(VBIG) as i128), slope },
            ),
            TailModel::Geometric { offset, scale, q } => TailBound::new(
                t.kind,
                TailModel::Geometric { offset: sat(offset as i128 + c.val_lb().min(VBIG) as i128), scale, q },
            ),
        });
        Self::new(&self.field, coeffs, tail)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let n = self.t_deg().min(other.t_deg());
        let mut coeffs = vec![LocalElement::zero(&self.field); n];
        for i in 0..n {
            let a = &self.coeffs[i];
            if a.is_zero() && a.is_exact() {
                continue;
            }
            for j in 0..n - i {
                let b = &other.coeffs[j];
                if b.is_zero() && b.is_exact() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add_ref(&a.mul_ref(b));
            }
        }
        let tail = match (self.tail, other.tail) {
            (Some(a), Some(b)) if a.model == TailModel::Zero && b.model == TailModel::Zero => {
                let da = self.coeffs.iter().rposition(|c| !(c.is_zero() && c.is_exact()));
                let db = other.coeffs.iter().rposition(|c| !(c.is_zero() && c.is_exact()));
                let fits = match (da, db) {
                    (Some(x), Some(y)) => x + y < n,
                    _ => true,
                };
                fits.then(TailBound::zero).or_else(|| self.product_tail(other))
            }
            (Some(_), Some(_)) => self.product_tail(other),
            _ => None,
        };
        Self::new(&self.field, coeffs, tail)
    }

    fn product_tail(&self, other: &Self) -> Option<TailBound> {
        let clip = self.clip().min(other.clip());
        let (a1, b1) = self.global_minorant(clip)?;
        let (a2, b2) = other.global_minorant(clip)?;
        Some(TailBound::new(
            TailKind::Product,
            TailModel::Linear { base: sat(a1 as i128 + a2 as i128), slope: b1.min(b2) },
        ))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.field, self.t_deg());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Coefficientwise twist; ||f^{(n)}|| = ||f||^{q^n}.
    pub fn twist(&self, n: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.twist(n)).collect::<Result<_>>()?;
        let tail = self.tail.map(|t| t.twist(n, self.field.q()));
        Ok(Self::new(&self.field, coeffs, tail))
    }

    /// Inverse of a unit lambda (1 + sum b_i t^i) with every |b_i| < 1.
    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.coeffs.first().ok_or(Error::NotAUnit)?;
        let v0 = c0.valuation().ok_or(Error::NotAUnit)?;
        // dominance: every other coefficient strictly smaller than the constant term
        let mut beta = i64::MAX;
        for (j, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = c.val_lb().min(VBIG) - v0;
            if w <= 0 {
                return Err(Error::NotAUnit);
            }
            beta = beta.min(w.div_euclid(j as i64));
        }
        let n = self.t_deg();
        let tail = match self.tail {
            Some(t) => {
                let (vt, s) = t.linear_minorant(n as i64);
                let wt = vt - v0;
                if wt <= 0 || s <= 0 {
                    return Err(Error::NotAUnit);
                }
                beta = beta.min(s).min(wt.div_euclid(n.max(1) as i64));
                (beta > 0).then(|| TailBound::new(TailKind::Product, TailModel::Linear { base: -v0, slope: beta }))
            }
            None => None,
        };
        if beta <= 0 {
            return Err(Error::NotAUnit);
        }
        let target = match self.min_prec() {
            EXACT => self.field.default_prec,
            p => p,
        };
        let c0_inv = c0.inv_to(prec_add(target, -2 * v0))?;
        let mut g: Vec<LocalElement> = Vec::with_capacity(n);
        g.push(c0_inv.clone());
        for j in 1..n {
            let mut s = LocalElement::zero(&self.field);
            for i in 1..=j {
                s = s.add_ref(&self.coeffs[i].mul_ref(&g[j - i]));
            }
            g.push(s.mul_ref(&c0_inv).neg_ref());
        }
        Ok(Self::new(&self.field, g, tail))
    }

    /// Gauss norm over the stored coefficients.
    pub fn gauss_norm(&self) -> LocalNorm {
        let ram = self.field.ram;
        let vmin = self.coeffs.iter().filter_map(|c| c.valuation()).min();
        let pmin = self.min_prec();
        match vmin {
            Some(v) if v < pmin => LocalNorm { valuation: Some(v), log_q: Ratio::new(-v, ram), upper_bound: false },
            _ => {
                let bound = if pmin == EXACT { i64::MIN } else { -pmin };
                LocalNorm { valuation: None, log_q: Ratio::new(bound, ram), upper_bound: true }
            }
        }
    }

    fn sum_at(&self, a: &LocalElement, cap: i64) -> LocalElement {
        let mut acc = LocalElement::zero(&self.field);
        let mut pw = LocalElement::one(&self.field);
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                pw = pw.mul_ref(a);
            }
            if c.is_zero() && c.is_exact() {
                continue;
            }
            acc = acc.add_ref(&c.mul_to(&pw, cap));
        }
        acc.truncate(cap)
    }

    /// Value at a point of the closed unit disk.
    pub fn eval(&self, a: &LocalElement) -> Result<LocalElement> {
        let va = a.val_lb();
        if va < 0 {
            return Err(Error::OutsideUnitDisk);
        }
        let cap = match self.tail {
            Some(t) => t.certify(self.t_deg() as i64, va.min(VBIG)).unwrap_or(EXACT),
            None => EXACT,
        };
        Ok(self.sum_at(a, cap))
    }

    /// Value at any point, with precision certified by the tail bound.
    pub fn eval_entire(&self, a: &LocalElement) -> Result<LocalElement> {
        let tail = self.tail.ok_or_else(|| Error::InsufficientTruncation("series carries no tail bound".into()))?;
        let va = a
            .valuation()
            .ok_or_else(|| Error::InsufficientTruncation("evaluation point vanishes at its precision".into()))?;
        let cert = tail.certify(self.t_deg() as i64, va).ok_or_else(|| {
            Error::InsufficientTruncation(format!(
                "tail does not decay at a point of valuation {va} from t-degree {}",
                self.t_deg()
            ))
        })?;
        Ok(self.sum_at(a, cert))
    }

    /// Value at `a` certified to at least `target`.
    pub fn eval_entire_to(&self, a: &LocalElement, target: i64) -> Result<LocalElement> {
        let v = self.eval_entire(a)?;
        if v.prec() < target {
            return Err(Error::InsufficientTruncation(format!(
                "certified precision {} is below the requested {target}",
                v.prec()
            )));
        }
        Ok(v)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson { t_deg: self.t_deg(), coeffs: self.coeffs.iter().map(|c| c.to_json()).collect(), tail: self.tail }
    }

    pub fn from_json(field: &Field, j: &SeriesJson) -> Result<Self> {
        if j.coeffs.len() != j.t_deg {
            return Err(Error::Format(format!("t_deg {} does not match {} coefficients", j.t_deg, j.coeffs.len())));
        }
        let coeffs = j.coeffs.iter().map(|c| LocalElement::from_json(field, c)).collect::<Result<_>>()?;
        Ok(Self::new(field, coeffs, j.tail))
    }
}

impl fmt::Debug for TateSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TateSeries(t_deg={}, tail={:?})", self.t_deg(), self.tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn f3() -> Field {
        FieldConfig::default_field()
    }

    fn poly(f: &Field, cs: &[i64]) -> TateSeries {
        let p = TPoly::new(f, cs.iter().map(|&c| LocalElement::from_int(f, c)).collect());
        TateSeries::from_poly(&p, 6)
    }

    #[test]
    fn one_plus_t_times_one_minus_t() {
        let f = f3();
        let a = poly(&f, &[1, 1]);
        let b = poly(&f, &[1, -1]);
        let c = a.mul(&b);
        let expect = poly(&f, &[1, 0, -1]);
        for k in 0..6 {
            assert!(c.coeff(k).agrees_with(expect.coeff(k)));
        }
        assert_eq!(c.tail().unwrap().model, TailModel::Zero);
    }

    #[test]
    fn geometric_inverse() {
        let f = f3();
        let pi = LocalElement::pi(&f);
        let p = TPoly::new(&f, vec![LocalElement::one(&f), pi.neg_ref()]);
        let g = TateSeries::from_poly(&p, 8).invert_unit().unwrap();
        for k in 0..8 {
            assert_eq!(g.coeff(k).clone(), pi.pow(k as i64).unwrap());
        }
        assert!(poly(&f, &[0, 1]).invert_unit().is_err());
    }

    #[test]
    fn eval_contract() {
        let f = f3();
        let s = poly(&f, &[1, 1]);
        let one = LocalElement::one(&f);
        assert_eq!(s.eval(&one).unwrap(), LocalElement::from_int(&f, 2));
        assert_eq!(s.eval(&LocalElement::zero(&f)).unwrap(), one);
        assert_eq!(s.eval(&LocalElement::theta(&f)), Err(Error::OutsideUnitDisk));
        let untailed = s.clone().with_tail(None);
        assert!(matches!(untailed.eval_entire(&LocalElement::theta(&f)), Err(Error::InsufficientTruncation(_))));
    }

    #[test]
    fn twist_of_t_minus_theta() {
        let f = f3();
        let s = TateSeries::from_poly(&TPoly::t_minus_theta(&f), 4).twist(1).unwrap();
        let expect = TPoly::t_minus(&LocalElement::theta_pow(&f, 3));
        for k in 0..4 {
            assert_eq!(s.coeff(k).clone(), expect.coeff(k));
        }
    }

    #[test]
    fn geometric_certificate_walks_to_the_minimum() {
        let t = TailBound::new(TailKind::Omega, TailModel::Geometric { offset: 3, scale: 2, q: 3 });
        assert_eq!(t.v_min(0), 3);
        assert_eq!(t.v_min(2), 3 + 2 * 12);
        // v(theta^q) = -6: g(j) = 3 + (3^{j+1}-3) - 6 j is minimal at j = 1
        assert_eq!(t.certify(0, -6), Some(3 + 6 - 6));
    }
}
