//! Pre-t-motive presentations (Phi, Psi) and their checks.
//!
//! Phi is stored as data S (a polynomial matrix) together with a scalar
//! denominator d and a twist level L, meaning Phi = (S / d)^{(L)}. Logarithm
//! motives need alpha^{(-1)}, a q-th root that usually leaves the working field;
//! storing S = Phi^{(1)} at level -1 avoids it, and the twisted checks only ever
//! need Phi^{(1)}.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::carlitz::{l_alpha, omega};
use crate::error::{Error, Result};
use crate::field::{ElementJson, Field, LocalElement, LocalNorm, EXACT};
use crate::poly::TPoly;
use crate::tate::{SeriesJson, TateSeries};

#[derive(Clone, Debug)]
pub struct TPolyMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<TPoly>,
    level: i64,
    denom: TPoly,
}

fn poly_det(n: usize, m: &[TPoly], field: &Field) -> TPoly {
    match n {
        0 => TPoly::one(field),
        1 => m[0].clone(),
        2 => m[0].mul(&m[3]).sub(&m[1].mul(&m[2])),
        _ => {
            let mut acc = TPoly::zero(field);
            for j in 0..n {
                if m[j].is_zero() && m[j].is_exact() {
                    continue;
                }
                let minor = minor(n, m, 0, j);
                let term = m[j].mul(&poly_det(n - 1, &minor, field));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn minor<T: Clone>(n: usize, m: &[T], r: usize, c: usize) -> Vec<T> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in (0..n).filter(|&i| i != r) {
        for j in (0..n).filter(|&j| j != c) {
            out.push(m[i * n + j].clone());
        }
    }
    out
}

impl TPolyMatrix {
    pub fn new(field: &Field, rows: usize, cols: usize, entries: Vec<TPoly>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(TPolyMatrix { field: field.clone(), rows, cols, entries, level: 0, denom: TPoly::one(field) })
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let entries = (0..n * n).map(|k| if k / n == k % n { TPoly::one(field) } else { TPoly::zero(field) }).collect();
        Self::new(field, n, n, entries).unwrap()
    }

    pub fn scalar(p: TPoly) -> Self {
        let f = p.field().clone();
        Self::new(&f, 1, 1, vec![p]).unwrap()
    }

    /// The same data read as Phi = (S / d)^{(level)}.
    pub fn with_level(mut self, level: i64) -> Self {
        self.level = level;
        self
    }

    pub fn with_denom(mut self, denom: TPoly) -> Self {
        self.denom = denom;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn denom(&self) -> &TPoly {
        &self.denom
    }

    pub fn entries(&self) -> &[TPoly] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &TPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.is_exact()) && self.denom.is_exact()
    }

    fn twist_data(&self, n: i64) -> Result<Self> {
        Ok(TPolyMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.twist(n)).collect::<Result<_>>()?,
            level: self.level - n,
            denom: self.denom.twist(n)?,
        })
    }

    /// The same matrix with its data re-expressed at a lower level.
    pub fn at_level(&self, level: i64) -> Result<Self> {
        if level == self.level {
            Ok(self.clone())
        } else {
            self.twist_data(self.level - level)
        }
    }

    /// Phi itself as level-0 data; fails with NotAQthPower when that needs q-th roots.
    pub fn untwisted(&self) -> Result<Self> {
        self.at_level(0)
    }

    /// Data (N, d) of Phi^{(n)} with N, d polynomial; needs level + n >= 0.
    pub fn twisted_data(&self, n: i64) -> Result<(Vec<TPoly>, TPoly)> {
        let m = self.at_level(-n)?;
        Ok((m.entries, m.denom))
    }

    fn data_mul(a: &[TPoly], b: &[TPoly], n: usize, k: usize, m: usize, field: &Field) -> Vec<TPoly> {
        let mut out = vec![TPoly::zero(field); n * m];
        for i in 0..n {
            for j in 0..m {
                let mut acc = TPoly::zero(field);
                for l in 0..k {
                    acc = acc.add(&a[i * k + l].mul(&b[l * m + j]));
                }
                out[i * m + j] = acc;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("inner dimensions differ".into()));
        }
        let level = self.level.min(other.level);
        let a = self.at_level(level)?;
        let b = other.at_level(level)?;
        let entries = Self::data_mul(&a.entries, &b.entries, self.rows, self.cols, other.cols, &self.field);
        Ok(TPolyMatrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: other.cols,
            entries,
            level,
            denom: a.denom.mul(&b.denom),
        }
        .reduced())
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let level = self.level.min(other.level);
        let a = self.at_level(level)?;
        let b = other.at_level(level)?;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                let x = a.get(i / other.rows, j / other.cols);
                let y = b.get(i % other.rows, j % other.cols);
                entries.push(x.mul(y));
            }
        }
        Ok(TPolyMatrix { field: self.field.clone(), rows: r, cols: c, entries, level, denom: a.denom.mul(&b.denom) }
            .reduced())
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        TPolyMatrix { entries, rows: self.cols, cols: self.rows, ..self.clone() }
    }

    /// (det S, d^rows): det Phi = (det S / d^rows)^{(level)}.
    pub fn det_data(&self) -> Result<(TPoly, TPoly)> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let det = poly_det(self.rows, &self.entries, &self.field);
        Ok((det, self.denom.pow(self.rows as u32)))
    }

    /// (Phi^{-1})^{tr}, kept as adjugate over determinant.
    pub fn inverse_transpose(&self) -> Result<Self> {
        let n = self.rows;
        let (det, _) = self.det_data()?;
        if det.is_zero() {
            return Err(Error::NonInvertible);
        }
        // S^{-1} = adj(S) / det S, so (d S^{-1})^tr = d cof(S)
        let mut cof = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let m = poly_det(n - 1, &minor(n, &self.entries, i, j), &self.field);
                let m = if (i + j) % 2 == 0 { m } else { m.neg() };
                cof.push(m.mul(&self.denom));
            }
        }
        Ok(TPolyMatrix { field: self.field.clone(), rows: n, cols: n, entries: cof, level: self.level, denom: det }
            .reduced())
    }

    /// The point a with t - a the twisted image of t - theta at this level.
    fn theta_at_level(&self) -> Option<LocalElement> {
        (self.level <= 0).then(|| LocalElement::theta(&self.field).twist_to(-self.level, EXACT))
    }

    /// Cancel common factors t - theta^{q^{-level}} between the entries and the denominator.
    fn reduced(mut self) -> Self {
        let Some(a) = self.theta_at_level() else { return self };
        while self.denom.degree().is_some_and(|d| d > 0) {
            let (dq, dr) = self.denom.div_linear(&a);
            if !(dr.is_zero() && dr.is_exact()) {
                break;
            }
            let mut quots = Vec::with_capacity(self.entries.len());
            for e in &self.entries {
                let (q, r) = e.div_linear(&a);
                if !(r.is_zero() && r.is_exact()) {
                    return self;
                }
                quots.push(q);
            }
            self.entries = quots;
            self.denom = dq;
        }
        self
    }

    /// Equality of the rational matrices, compared at a common level.
    pub fn same_as(&self, other: &Self) -> bool {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return false;
        }
        let level = self.level.min(other.level);
        let (Ok(a), Ok(b)) = (self.at_level(level), other.at_level(level)) else { return false };
        a.entries.iter().zip(&b.entries).all(|(x, y)| {
            let d = x.mul(&b.denom).sub(&y.mul(&a.denom));
            d.is_zero()
        })
    }

    pub fn to_tate(&self, t_deg: usize) -> Result<TateMatrix> {
        if self.level != 0 || self.denom.degree() != Some(0) {
            return Err(Error::Context("only level-0 polynomial matrices embed in the Tate algebra".into()));
        }
        let dinv = self.denom.coeff(0).inv()?;
        let entries = self.entries.iter().map(|e| TateSeries::from_poly(&e.scale(&dinv), t_deg)).collect();
        TateMatrix::new(self.rows, self.cols, entries)
    }
}

/// A matrix of Tate series.
#[derive(Clone, Debug)]
pub struct TateMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TateSeries>,
}

impl TateMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<TateSeries>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(TateMatrix { rows, cols, entries })
    }

    pub fn identity(field: &Field, n: usize, t_deg: usize) -> Self {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { TateSeries::one(field, t_deg) } else { TateSeries::zero(field, t_deg) })
            .collect();
        TateMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[TateSeries] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &TateSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: TateSeries) {
        self.entries[i * self.cols + j] = s;
    }

    pub fn t_deg(&self) -> usize {
        self.entries.iter().map(|e| e.t_deg()).min().unwrap_or(0)
    }

    pub fn min_prec(&self) -> i64 {
        self.entries.iter().map(|e| e.min_prec()).min().unwrap_or(EXACT)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch("inner dimensions differ".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<TateSeries> = None;
                for l in 0..self.cols {
                    let p = self.get(i, l).mul(other.get(l, j));
                    acc = Some(match acc {
                        None => p,
                        Some(a) => a.add(&p),
                    });
                }
                entries.push(acc.expect("inner dimension is positive"));
            }
        }
        Ok(TateMatrix { rows: self.rows, cols: other.cols, entries })
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut entries = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                entries.push(self.get(i / other.rows, j / other.cols).mul(other.get(i % other.rows, j % other.cols)));
            }
        }
        TateMatrix { rows: r, cols: c, entries }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect();
        Ok(TateMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale_poly(&self, p: &TPoly) -> Self {
        let s = TateSeries::from_poly(p, self.t_deg());
        TateMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|e| s.mul(e)).collect() }
    }

    pub fn twist(&self, n: i64) -> Result<Self> {
        let entries = self.entries.iter().map(|e| e.twist(n)).collect::<Result<_>>()?;
        Ok(TateMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        TateMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Gauss-Jordan inverse; every pivot must be a unit of the Tate algebra.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::NonInvertible);
        }
        let field = self.entries[0].field().clone();
        let t_deg = self.t_deg();
        let mut a = self.clone();
        let mut inv = TateMatrix::identity(&field, n, t_deg);
        for col in 0..n {
            let (row, pinv) =
                (col..n).find_map(|r| a.get(r, col).invert_unit().ok().map(|p| (r, p))).ok_or(Error::NonInvertible)?;
            if row != col {
                for j in 0..n {
                    a.entries.swap(row * n + j, col * n + j);
                    inv.entries.swap(row * n + j, col * n + j);
                }
            }
            for j in 0..n {
                let x = a.get(col, j).mul(&pinv);
                a.set(col, j, x);
                let y = inv.get(col, j).mul(&pinv);
                inv.set(col, j, y);
            }
            for r in (0..n).filter(|&r| r != col) {
                let f = a.get(r, col).clone();
                if f.coeffs().iter().all(|c| c.is_zero() && c.is_exact()) {
                    continue;
                }
                for j in 0..n {
                    let x = a.get(r, j).sub(&f.mul(a.get(col, j)));
                    a.set(r, j, x);
                    let y = inv.get(r, j).sub(&f.mul(inv.get(col, j)));
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }

    /// Largest Gauss norm over the entries.
    pub fn gauss_norm(&self) -> LocalNorm {
        let norms: Vec<LocalNorm> = self.entries.iter().map(|e| e.gauss_norm()).collect();
        let definite = norms.iter().filter(|n| !n.upper_bound).max_by_key(|n| n.log_q);
        let bound = norms.iter().filter(|n| n.upper_bound).max_by_key(|n| n.log_q);
        match (definite, bound) {
            (Some(d), Some(b)) if b.log_q > d.log_q => b.clone(),
            (Some(d), _) => d.clone(),
            (None, Some(b)) => b.clone(),
            (None, None) => LocalNorm { valuation: None, log_q: Ratio::from_integer(i64::MIN), upper_bound: true },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    One,
    CarlitzN,
    XAlphas,
    Tensor,
    Dual,
}

#[derive(Clone, Debug)]
pub struct MotivePresentation {
    pub name: String,
    pub phi: TPolyMatrix,
    pub psi: TateMatrix,
    pub provenance: Provenance,
    /// Smallest certified coefficient precision of Psi.
    pub prec: i64,
}

/// Outcome of a functional-equation check: the residual's Gauss norm and the
/// precision at which it was certified.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCheck {
    pub residual: LocalNorm,
    pub certified_prec: i64,
    /// log_q of the threshold q^{-certified_prec/ram}.
    pub threshold_log_q: Ratio<i64>,
    pub pass: bool,
}

impl ResidualCheck {
    /// PASS iff the residual vanishes at its certified precision and that
    /// precision reaches `floor`.
    pub fn from_residual(m: &TateMatrix, ram: i64, floor: i64) -> Self {
        let certified_prec = m.min_prec();
        let residual = m.gauss_norm();
        let cp = certified_prec.min(1 << 50);
        ResidualCheck {
            pass: residual.upper_bound && certified_prec >= floor,
            residual,
            certified_prec,
            threshold_log_q: Ratio::new(-cp, ram),
        }
    }
}

// Extra pi-digits carried by constructors so products and twists still reach `prec`.
fn guard(field: &Field) -> i64 {
    2 * field.ram * field.q() as i64
}

fn rank1(name: String, phi: TPolyMatrix, psi: TateSeries, prov: Provenance) -> MotivePresentation {
    let prec = psi.min_prec();
    MotivePresentation { name, phi, psi: TateMatrix::new(1, 1, vec![psi]).unwrap(), provenance: prov, prec }
}

impl MotivePresentation {
    pub fn rank(&self) -> usize {
        self.phi.rows()
    }

    pub fn field(&self) -> &Field {
        &self.phi.field
    }

    pub fn one(field: &Field, t_deg: usize) -> Self {
        rank1("1".into(), TPolyMatrix::identity(field, 1), TateSeries::one(field, t_deg), Provenance::One)
    }

    /// C(n): Phi = (t - theta)^n, Psi = Omega^n.
    pub fn carlitz_power(field: &Field, n: i64, t_deg: usize, prec: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("C(0) is the identity object; use `one`".into()));
        }
        let p = prec + guard(field) * n.abs();
        let om = omega(field, t_deg, p);
        let k = n.unsigned_abs() as u32;
        let tt = TPoly::t_minus_theta(field).pow(k);
        let (phi, psi) = if n > 0 {
            (TPolyMatrix::scalar(tt), om.pow(k))
        } else {
            (TPolyMatrix::scalar(TPoly::one(field)).with_denom(tt), om.invert_unit()?.pow(k))
        };
        Ok(rank1(format!("C({n})"), phi, psi, Provenance::CarlitzN))
    }

    /// X(alpha_1..alpha_r): an extension of 1^r by C with Psi first column
    /// (Omega, Omega L_{alpha_1}, ..., Omega L_{alpha_r}).
    pub fn x_alphas(alphas: &[LocalElement], t_deg: usize, prec: i64) -> Result<Self> {
        let field = alphas
            .first()
            .map(|a| a.field().clone())
            .ok_or_else(|| Error::DimensionMismatch("at least one alpha is required".into()))?;
        if alphas.iter().any(|a| !a.is_exact()) {
            return Err(Error::Format("alpha must be exact".into()));
        }
        let n = alphas.len() + 1;
        let p = prec + guard(&field);
        let om = omega(&field, t_deg, p);
        let tq = TPoly::t_minus(&LocalElement::theta_pow(&field, field.q() as i64));
        // stored data S = Phi^{(1)}
        let mut s = vec![TPoly::zero(&field); n * n];
        let mut psi = TateMatrix::identity(&field, n, t_deg);
        s[0] = tq.clone();
        psi.set(0, 0, om.clone());
        for (i, a) in alphas.iter().enumerate() {
            s[(i + 1) * n] = tq.scale(a);
            s[(i + 1) * n + i + 1] = TPoly::one(&field);
            psi.set(i + 1, 0, om.mul(&l_alpha(a, t_deg, p)?));
        }
        let phi = TPolyMatrix::new(&field, n, n, s)?.with_level(-1);
        let prec = psi.min_prec();
        Ok(MotivePresentation {
            name: format!("X({} alphas)", alphas.len()),
            phi,
            psi,
            provenance: Provenance::XAlphas,
            prec,
        })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let phi = self.phi.kron(&other.phi)?;
        let psi = self.psi.kron(&other.psi);
        let prec = psi.min_prec();
        Ok(MotivePresentation {
            name: format!("{} (x) {}", self.name, other.name),
            phi,
            psi,
            provenance: Provenance::Tensor,
            prec,
        })
    }

    pub fn dual(&self) -> Result<Self> {
        let phi = self.phi.inverse_transpose()?;
        let psi = self.psi.inverse()?.transpose();
        let prec = psi.min_prec();
        Ok(MotivePresentation { name: format!("dual({})", self.name), phi, psi, provenance: Provenance::Dual, prec })
    }

    /// Twisted trivialization check: d^{(L+1)} Psi - S^{(L+1)} Psi^{(1)} vanishes,
    /// where Phi = (S/d)^{(L)}; this is Psi = Phi^{(1)} Psi^{(1)} cleared of denominators.
    pub fn check_trivialization(&self, floor: i64) -> Result<ResidualCheck> {
        let (s, d) = self.phi.twisted_data(1)?;
        let t_deg = self.psi.t_deg();
        let n = self.rank();
        let s_series: Vec<TateSeries> = s.iter().map(|e| TateSeries::from_poly(e, t_deg)).collect();
        let s_mat = TateMatrix::new(n, n, s_series)?;
        let rhs = s_mat.mul(&self.psi.twist(1)?)?;
        let lhs = self.psi.scale_poly(&d);
        let r = lhs.sub(&rhs)?;
        Ok(ResidualCheck::from_residual(&r, self.field().ram, floor))
    }

    /// Anderson criterion det Phi = c (t - theta)^s.
    pub fn check_anderson_det(&self) -> Result<Option<(LocalElement, i64)>> {
        anderson_det(&self.phi)
    }
}

/// Strip factors t - a; returns (what is left, multiplicity).
fn strip_linear(p: &TPoly, a: &LocalElement) -> (TPoly, i64) {
    let mut p = p.clone();
    let mut s = 0;
    while p.degree().is_some_and(|d| d > 0) {
        let (q, r) = p.div_linear(a);
        if !(r.is_zero() && r.is_exact()) {
            break;
        }
        p = q;
        s += 1;
    }
    (p, s)
}

/// det Phi = c (t - theta)^s with c an exact nonzero constant, or None.
pub fn anderson_det(phi: &TPolyMatrix) -> Result<Option<(LocalElement, i64)>> {
    if !phi.is_exact() {
        return Ok(None);
    }
    let level = phi.level().min(0);
    let m = phi.at_level(level)?;
    let (num, den) = m.det_data()?;
    let a = LocalElement::theta(&phi.field).twist_to(-level, EXACT);
    let (rn, sn) = strip_linear(&num, &a);
    let (rd, sd) = strip_linear(&den, &a);
    if rn.degree() != Some(0) || rd.degree() != Some(0) || rn.is_zero() {
        return Ok(None);
    }
    let c = rn.coeff(0).mul_ref(&rd.coeff(0).inv()?);
    // c is the twisted constant; bring it back to level 0 when possible
    let c = c.twist(level).unwrap_or(c);
    Ok(Some((c, sn - sd)))
}

/// Twisted morphism residual B Phi_Q^{(1)} - Phi_P^{(1)} B^{(1)} for B: level-0 exact data.
/// Returns true iff it vanishes identically.
pub fn check_morphism(p: &MotivePresentation, q: &MotivePresentation, b: &TPolyMatrix) -> Result<bool> {
    if b.rows() != p.rank() || b.cols() != q.rank() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, expected {}x{}",
            b.rows(),
            b.cols(),
            p.rank(),
            q.rank()
        )));
    }
    let (sq, dq) = q.phi.twisted_data(1)?;
    let (sp, dp) = p.phi.twisted_data(1)?;
    let f = p.field();
    let b1 = b.twisted_data(1)?.0;
    let lhs = TPolyMatrix::data_mul(&b.entries, &sq, b.rows, q.rank(), q.rank(), f);
    let rhs = TPolyMatrix::data_mul(&sp, &b1, p.rank(), p.rank(), q.rank(), f);
    Ok(lhs.iter().zip(&rhs).all(|(x, y)| x.mul(&dp).sub(&y.mul(&dq)).is_zero()))
}

/// JSON presentation file. `phi_level` and `phi_denom` extend the plain
/// polynomial form for twisted storage and duals; both default to the trivial value.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationJson {
    pub name: String,
    pub r: usize,
    pub phi: Vec<Vec<Vec<ElementJson>>>,
    #[serde(default)]
    pub phi_level: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_denom: Option<Vec<ElementJson>>,
    pub psi: Vec<Vec<SeriesJson>>,
    pub provenance: Provenance,
}

impl MotivePresentation {
    pub fn to_json(&self) -> PresentationJson {
        let n = self.rank();
        let phi = (0..n).map(|i| (0..n).map(|j| self.phi.get(i, j).to_json()).collect()).collect();
        let psi = (0..n).map(|i| (0..n).map(|j| self.psi.get(i, j).to_json()).collect()).collect();
        let denom = self.phi.denom();
        PresentationJson {
            name: self.name.clone(),
            r: n,
            phi,
            phi_level: self.phi.level(),
            phi_denom: (*denom != TPoly::one(self.field())).then(|| denom.to_json()),
            psi,
            provenance: self.provenance,
        }
    }

    pub fn from_json(field: &Field, j: &PresentationJson) -> Result<Self> {
        let n = j.r;
        let phi_ok = j.phi.len() == n && j.phi.iter().all(|r| r.len() == n);
        let psi_ok = j.psi.len() == n && j.psi.iter().all(|r| r.len() == n);
        if !phi_ok || !psi_ok {
            return Err(Error::DimensionMismatch(format!("expected {n}x{n} phi and psi")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &j.phi {
            for e in row {
                entries.push(TPoly::from_json(field, e)?);
            }
        }
        let mut phi = TPolyMatrix::new(field, n, n, entries)?.with_level(j.phi_level);
        if let Some(d) = &j.phi_denom {
            phi = phi.with_denom(TPoly::from_json(field, d)?);
        }
        let mut series = Vec::with_capacity(n * n);
        for row in &j.psi {
            for s in row {
                series.push(TateSeries::from_json(field, s)?);
            }
        }
        let psi = TateMatrix::new(n, n, series)?;
        let prec = psi.min_prec();
        Ok(MotivePresentation { name: j.name.clone(), phi, psi, provenance: j.provenance, prec })
    }
}
