//! Finite-precision search for k[t]-linear relations among 1, Omega and
//! Omega L_alpha, their certification at higher precision, evaluation at
//! t = theta and the linear equations of the Galois group they cut out.

pub mod linalg;
mod reduce;

pub use reduce::independent_relations;

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::carlitz::{carlitz_log, l_alpha, omega, pi_tilde};
use crate::error::{Error, Result};
use crate::field::{ElementJson, Field, LocalElement, LocalNorm, EXACT};
use crate::poly::{FqPoly, RatFun, RatFunJson, TPoly};
use crate::tate::TateSeries;
use linalg::Echelon;
use reduce::Layout;

/// Search-space knobs.
///
/// Coefficients are exact sums of monomials pi^n with ceil(n/ram) in
/// [v_lo, v_hi], i.e. the window counts powers of 1/theta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBounds {
    pub d_t: usize,
    pub v_lo: i64,
    pub v_hi: i64,
    pub prec: i64,
    pub t_deg: usize,
    #[serde(default = "default_margin")]
    pub margin: i64,
}

fn default_margin() -> i64 {
    2
}

impl SearchBounds {
    pub fn new(d_t: usize, v_lo: i64, v_hi: i64, prec: i64, t_deg: usize) -> Self {
        SearchBounds { d_t, v_lo, v_hi, prec, t_deg, margin: 2 }
    }

    pub fn with_margin(self, margin: i64) -> Self {
        SearchBounds { margin, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.v_lo > self.v_hi {
            return Err(Error::InvalidConfig(format!("empty window [{}, {}]", self.v_lo, self.v_hi)));
        }
        if self.prec < 1 || self.t_deg < 1 || self.margin < 1 {
            return Err(Error::InvalidConfig("prec, t_deg and margin must be positive".into()));
        }
        Ok(())
    }

    /// Allowed pi-exponents.
    pub fn exponents(&self, ram: i64) -> RangeInclusive<i64> {
        ram * (self.v_lo - 1) + 1..=ram * self.v_hi
    }

    fn scaled(&self) -> SearchBounds {
        SearchBounds { prec: self.prec * self.margin, t_deg: self.t_deg * self.margin as usize, ..*self }
    }
}

/// Outcome of re-verifying a relation at margin-scaled precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub prec: i64,
    pub t_deg: usize,
    pub residual: LocalNorm,
    /// Precision to which the recomputed combination is known.
    pub certified_prec: i64,
    pub certified: bool,
}

/// Coefficient polynomials for the slots (1, X_0 = Omega, X_i = Omega L_{alpha_i}).
#[derive(Debug, Clone, PartialEq)]
pub struct RelationVector {
    pub slots: Vec<TPoly>,
    pub certification: Option<Certification>,
}

impl RelationVector {
    pub fn new(slots: Vec<TPoly>) -> Self {
        RelationVector { slots, certification: None }
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(|s| s.is_zero())
    }

    pub fn is_certified(&self) -> bool {
        self.certification.as_ref().is_some_and(|c| c.certified)
    }
}

fn check_alphas(alphas: &[LocalElement]) -> Result<()> {
    for a in alphas {
        if !a.is_exact() {
            return Err(Error::Format("alphas must be exact".into()));
        }
        let c = a.field().log_bound();
        if let Some(v) = a.valuation() {
            if v <= -c {
                return Err(Error::OutsideLogDomain { valuation: v, bound: -c });
            }
        }
    }
    Ok(())
}

/// The series 1, Omega, Omega L_{alpha_1}, ..., known modulo t^{t_deg} to about `prec`.
fn slot_series(field: &Field, alphas: &[LocalElement], t_deg: usize, prec: i64) -> Result<Vec<TateSeries>> {
    let guard = 2 * field.ram * field.q() as i64;
    let om = omega(field, t_deg, prec + guard);
    let mut out = vec![TateSeries::one(field, t_deg), om.clone()];
    for a in alphas {
        out.push(om.mul(&l_alpha(a, t_deg, prec + guard)?));
    }
    Ok(out)
}

/// Kernel basis of the coefficient-matching system, normalized so the first
/// nonzero coefficient in (slot, t-degree, pi-exponent) order is 1.
pub fn search_relations(field: &Field, alphas: &[LocalElement], bounds: &SearchBounds) -> Result<Vec<RelationVector>> {
    bounds.validate()?;
    check_alphas(alphas)?;
    let res = field.residue();
    let layout = Layout::new(bounds, field.ram, alphas.len() + 2);
    let exps = &layout.exps;
    let n_min = exps[0];
    let ncols = layout.ncols();
    let series = slot_series(field, alphas, bounds.t_deg, bounds.prec - n_min.min(0))?;

    // rows (k, m): coefficient of t^k pi^m, over every m where all columns are known
    let mut ranges = Vec::with_capacity(bounds.t_deg);
    for k in 0..bounds.t_deg {
        let mut lo = EXACT;
        let mut hi = bounds.prec;
        for g in &series {
            for j in 0..=bounds.d_t.min(k) {
                let c = g.coeff(k - j);
                if let Some(v) = c.valuation() {
                    lo = lo.min(v + n_min);
                }
                if c.prec() != EXACT {
                    hi = hi.min(c.prec() + n_min);
                }
            }
        }
        ranges.push((k, lo, hi));
    }
    // rows below every valuation are identically zero and not counted
    let nrows: usize = ranges.iter().map(|&(_, lo, hi)| (hi - lo).max(0) as usize).sum();
    if nrows < ncols {
        return Err(Error::UnderdeterminedSystem { rows: nrows, cols: ncols });
    }

    let mut ech = Echelon::new(res, ncols);
    'rows: for &(k, lo, hi) in &ranges {
        for m in lo..hi {
            let mut row = vec![0; ncols];
            for (s, g) in series.iter().enumerate() {
                for j in 0..=bounds.d_t.min(k) {
                    let c = g.coeff(k - j);
                    for (ni, &n) in exps.iter().enumerate() {
                        row[layout.col(s, j, ni)] = c.coeff(m - n);
                    }
                }
            }
            ech.push(row);
            if ech.is_full() {
                break 'rows;
            }
        }
    }

    Ok(ech.kernel().iter().map(|v| layout.to_relation(field, v)).collect())
}

fn combination(rel: &RelationVector, series: &[TateSeries], t_deg: usize) -> Result<TateSeries> {
    if rel.slots.len() != series.len() {
        return Err(Error::DimensionMismatch(format!(
            "relation has {} slots, expected {}",
            rel.slots.len(),
            series.len()
        )));
    }
    let mut acc: Option<TateSeries> = None;
    for (a, g) in rel.slots.iter().zip(series) {
        if a.is_zero() {
            continue;
        }
        let term = TateSeries::from_poly(a, t_deg).mul(g);
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term),
        });
    }
    acc.ok_or_else(|| Error::Format("relation vector is zero".into()))
}

/// Recompute the combination with margin-scaled precision and t-truncation.
///
/// CERTIFIED means it vanishes at a precision beyond the search precision; it
/// is evidence at that precision, not a proof.
pub fn certify_relation(
    field: &Field,
    rel: &RelationVector,
    alphas: &[LocalElement],
    bounds: &SearchBounds,
) -> Result<Certification> {
    check_alphas(alphas)?;
    let b = bounds.scaled();
    let n_min = *bounds.exponents(field.ram).start();
    let series = slot_series(field, alphas, b.t_deg, b.prec - n_min.min(0))?;
    let r = combination(rel, &series, b.t_deg)?;
    let certified_prec = r.min_prec().min(b.prec);
    let residual = r.gauss_norm();
    Ok(Certification {
        prec: b.prec,
        t_deg: b.t_deg,
        certified: residual.upper_bound && certified_prec >= bounds.prec,
        residual,
        certified_prec,
    })
}

/// Relations after search, K(t)-reduction and certification.
#[derive(Debug, Clone)]
pub struct Certified {
    /// Dimension of the raw F_{q^e}-kernel.
    pub kernel_dim: usize,
    pub relations: Vec<RelationVector>,
    /// Reduced relations that did not survive certification.
    pub rejected: Vec<RelationVector>,
}

pub fn find_certified(field: &Field, alphas: &[LocalElement], bounds: &SearchBounds) -> Result<Certified> {
    let kernel = search_relations(field, alphas, bounds)?;
    let mut out = Certified { kernel_dim: kernel.len(), relations: Vec::new(), rejected: Vec::new() };
    for mut rel in independent_relations(field, &kernel, bounds) {
        rel.certification = Some(certify_relation(field, &rel, alphas, bounds)?);
        if rel.is_certified() {
            out.relations.push(rel);
        } else {
            out.rejected.push(rel);
        }
    }
    Ok(out)
}

/// The relation at t = theta, multiplied through by -pi_tilde:
/// c_const + c_pitilde pi_tilde + sum c_log[i] log_C(alpha_i) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub c_const: LocalElement,
    pub c_pitilde: LocalElement,
    pub c_log: Vec<LocalElement>,
    /// |c_const|: nonzero values are precision artifacts, not relations.
    pub artifact_norm: LocalNorm,
    /// The emitted identity recomputed from log_C and pi_tilde directly.
    pub identity_residual: LocalElement,
}

pub fn evaluate_relation_at_theta(rel: &RelationVector, alphas: &[LocalElement], prec: i64) -> Result<Evaluation> {
    if !rel.is_certified() {
        return Err(Error::NotCertified);
    }
    if rel.slots.len() != alphas.len() + 2 {
        return Err(Error::DimensionMismatch("slot count does not match alphas".into()));
    }
    let field = rel.slots[0].field().clone();
    let th = LocalElement::theta(&field);
    // Omega(theta) = -1/pi_tilde
    let c_const = rel.slots[1].eval(&th);
    let c_pitilde = rel.slots[0].eval(&th).neg_ref();
    let c_log: Vec<LocalElement> = rel.slots[2..].iter().map(|a| a.eval(&th)).collect();
    let mut id = c_const.add_ref(&c_pitilde.mul_ref(&pi_tilde(&field, prec)));
    for (c, a) in c_log.iter().zip(alphas) {
        if !c.is_zero() {
            let lift = prec - c.valuation().unwrap_or(0).min(0);
            id = id.add_ref(&c.mul_ref(&carlitz_log(a, lift)?));
        }
    }
    Ok(Evaluation { artifact_norm: c_const.norm(), c_const, c_pitilde, c_log, identity_residual: id.truncate(prec) })
}

/// One defining polynomial G = beta_const + beta_0 X_0 + sum beta_i X_i of Gamma_X.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPoly {
    pub x0: RatFun,
    pub xi: Vec<RatFun>,
    pub constant: RatFun,
    /// Scalar lambda with lambda * H giving the F_q(t) coefficients.
    pub scale: LocalElement,
    /// The torsor correction f = lambda H_{X_0} - beta_0.
    pub f: TPoly,
    /// F = X-part of G divided by its first nonzero coefficient.
    pub v_form: Vec<RatFun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSummary {
    pub dim: usize,
    pub polys: Vec<GammaPoly>,
}

pub const GAMMA_DIM_LABEL: &str = "conjectural transcendence degree of k(pi_tilde, log_C alpha_i) over k";

fn to_fq(p: &TPoly, what: &str) -> Result<FqPoly> {
    p.to_fq().ok_or_else(|| Error::GammaExtractionFailed(format!("{what}: coefficients {p} are not in F_q")))
}

pub fn gamma_report(alphas: &[LocalElement], relations: &[RelationVector]) -> Result<GammaSummary> {
    let r = alphas.len();
    let mut polys = Vec::with_capacity(relations.len());
    for rel in relations {
        if !rel.is_certified() {
            return Err(Error::NotCertified);
        }
        if rel.slots.len() != r + 2 {
            return Err(Error::DimensionMismatch("slot count does not match alphas".into()));
        }
        let non_omega: Vec<usize> = std::iter::once(0).chain(2..r + 2).collect();
        let lead = non_omega
            .iter()
            .flat_map(|&s| rel.slots[s].coeffs().iter())
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::GammaExtractionFailed("relation involves only Omega".into()))?;
        let scale = lead.inv()?;
        if !scale.is_exact() {
            return Err(Error::GammaExtractionFailed(format!("leading coefficient {lead} is not a monomial")));
        }
        let scaled: Vec<TPoly> = rel.slots.iter().map(|p| p.scale(&scale)).collect();
        let b_const = to_fq(&scaled[0], "constant slot")?;
        let b_i = (2..r + 2).map(|s| to_fq(&scaled[s], &format!("X_{}", s - 1))).collect::<Result<Vec<_>>>()?;
        let b_0 = b_const.neg();
        let f = scaled[1].sub(&b_0.to_tpoly());
        let v_form = match b_i.iter().find(|b| !b.is_zero()) {
            Some(l) => b_i.iter().map(|b| RatFun::new(b.clone(), l.clone())).collect::<Result<_>>()?,
            None => Vec::new(),
        };
        polys.push(GammaPoly {
            x0: RatFun::from_poly(b_0),
            xi: b_i.into_iter().map(RatFun::from_poly).collect(),
            constant: RatFun::from_poly(b_const),
            scale,
            f,
            v_form,
        });
    }
    Ok(GammaSummary { dim: (r + 1).saturating_sub(relations.len()), polys })
}

/// Everything the `relations` command reports.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub alphas: Vec<LocalElement>,
    pub bounds: SearchBounds,
    pub kernel_dim: usize,
    pub relations: Vec<RelationVector>,
    /// Reduced relations that did not survive certification.
    pub rejected: usize,
    pub evaluated: Vec<Evaluation>,
    pub gamma: GammaSummary,
}

pub fn relation_report(field: &Field, alphas: &[LocalElement], bounds: &SearchBounds) -> Result<RelationReport> {
    let Certified { kernel_dim, relations, rejected } = find_certified(field, alphas, bounds)?;
    let evaluated =
        relations.iter().map(|r| evaluate_relation_at_theta(r, alphas, bounds.prec)).collect::<Result<_>>()?;
    let gamma = gamma_report(alphas, &relations)?;
    Ok(RelationReport {
        alphas: alphas.to_vec(),
        bounds: *bounds,
        kernel_dim,
        relations,
        rejected: rejected.len(),
        evaluated,
        gamma,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormJson {
    /// None: zero at the recorded precision, log_q is then an upper bound.
    pub valuation: Option<i64>,
    pub log_q: String,
    pub upper_bound: bool,
}

impl From<&LocalNorm> for NormJson {
    fn from(n: &LocalNorm) -> Self {
        NormJson { valuation: n.valuation, log_q: n.log_q.to_string(), upper_bound: n.upper_bound }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationJson {
    pub slots: Vec<Vec<ElementJson>>,
    pub certified_prec: Option<i64>,
    pub residual: Option<NormJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationJson {
    pub c_const: ElementJson,
    pub c_pitilde: ElementJson,
    pub c_log: Vec<ElementJson>,
    pub artifact_norm: NormJson,
    pub identity_residual: NormJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaPolyJson {
    #[serde(rename = "X0")]
    pub x0: RatFunJson,
    #[serde(rename = "Xi")]
    pub xi: Vec<RatFunJson>,
    #[serde(rename = "const")]
    pub constant: RatFunJson,
    pub scale: ElementJson,
    pub f: Vec<ElementJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaJson {
    pub dim: usize,
    pub dim_label: String,
    pub polys: Vec<GammaPolyJson>,
    pub v_forms: Vec<Vec<RatFunJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertifiedAt {
    pub prec: i64,
    pub t_deg: usize,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationReportJson {
    pub alphas: Vec<ElementJson>,
    pub bounds: SearchBounds,
    pub kernel_dim: usize,
    pub relations: Vec<RelationJson>,
    pub rejected: usize,
    pub evaluated: Vec<EvaluationJson>,
    pub gamma: GammaJson,
    pub certified_at: CertifiedAt,
}

impl RelationReport {
    pub fn to_json(&self) -> RelationReportJson {
        let scaled = self.bounds.scaled();
        RelationReportJson {
            alphas: self.alphas.iter().map(|a| a.to_json()).collect(),
            bounds: self.bounds,
            kernel_dim: self.kernel_dim,
            relations: self
                .relations
                .iter()
                .map(|r| RelationJson {
                    slots: r.slots.iter().map(|s| s.to_json()).collect(),
                    certified_prec: r.certification.as_ref().map(|c| c.certified_prec),
                    residual: r.certification.as_ref().map(|c| (&c.residual).into()),
                })
                .collect(),
            rejected: self.rejected,
            evaluated: self
                .evaluated
                .iter()
                .map(|e| EvaluationJson {
                    c_const: e.c_const.to_json(),
                    c_pitilde: e.c_pitilde.to_json(),
                    c_log: e.c_log.iter().map(|c| c.to_json()).collect(),
                    artifact_norm: (&e.artifact_norm).into(),
                    identity_residual: (&e.identity_residual.norm()).into(),
                })
                .collect(),
            gamma: GammaJson {
                dim: self.gamma.dim,
                dim_label: GAMMA_DIM_LABEL.into(),
                polys: self
                    .gamma
                    .polys
                    .iter()
                    .map(|g| GammaPolyJson {
                        x0: g.x0.to_json(),
                        xi: g.xi.iter().map(|x| x.to_json()).collect(),
                        constant: g.constant.to_json(),
                        scale: g.scale.to_json(),
                        f: g.f.to_json(),
                    })
                    .collect(),
                v_forms: self.gamma.polys.iter().map(|g| g.v_form.iter().map(|x| x.to_json()).collect()).collect(),
            },
            certified_at: CertifiedAt { prec: scaled.prec, t_deg: scaled.t_deg, label: "verified at precision".into() },
        }
    }
}
