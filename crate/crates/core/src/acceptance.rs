//! The desk-scale acceptance suite shared by `carlitz selftest` and the
//! `acceptance` test target.
//!
//! A residual passes when it vanishes at its own precision and that precision
//! reaches the floor pinned for its criterion, expressed as a loss below the
//! working precision.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::carlitz::{carlitz_exp, carlitz_log, carlitz_t, carlitz_t_pow, l_alpha, omega, pi_tilde, reduce_log_with};
use crate::error::Result;
use crate::field::{Field, LocalElement, EXACT};
use crate::motive::{check_morphism, MotivePresentation, TPolyMatrix};
use crate::poly::{FqPoly, TPoly};
use crate::relations::{relation_report, search_relations, SearchBounds};
use crate::tate::{TailBound, TateSeries};

/// Allowed precision loss, in pi-digits, for identities between elements.
pub const ELEMENT_LOSS: i64 = 10;
/// Allowed loss for L_alpha(theta) against log_C(alpha): evaluating at theta
/// spends ram digits per t-degree, so this one is looser.
pub const LALPHA_VALUE_LOSS: i64 = 50;
/// Motive trivializations pass at half the working precision.
pub const MOTIVE_FLOOR_DIVISOR: i64 = 2;
pub const RANDOM_SAMPLES: usize = 20;
pub const NORM_SAMPLES: usize = 100;

/// Criteria whose statement does not hold; they still run and report FAIL.
pub const KNOWN_FAILURES: &[(u8, &str)] =
    &[(9, "theta + 1 = C_t(1), so theta log_C(theta) - (theta - 1) log_C(theta + 1) = 0 is a genuine relation")];

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub field: Field,
    pub prec: i64,
    pub t_deg: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn known_failure(&self) -> Option<&'static str> {
        KNOWN_FAILURES.iter().find(|(id, _)| *id == self.id).map(|(_, why)| *why)
    }

    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2} {:<28} {} ({:.2?})", self.id, self.name, self.detail, self.elapsed);
        if let (false, Some(why)) = (self.pass, self.known_failure()) {
            s.push_str(&format!(" [known: {why}]"));
        }
        s
    }
}

pub const NAMES: [&str; 12] = [
    "omega functional equation",
    "period link",
    "torsion logarithm",
    "exp kernel",
    "exp/log identities",
    "L_alpha",
    "zeta relation recovery",
    "module-law relation",
    "independence evidence",
    "log reduction",
    "motive algebra",
    "norm laws",
];

/// Collects sub-checks; the criterion passes when all of them do.
struct Checks {
    failures: Vec<String>,
    worst_prec: i64,
    count: usize,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), worst_prec: EXACT, count: 0 }
    }

    fn zero(&mut self, label: &str, x: &LocalElement, floor: i64) {
        self.count += 1;
        self.worst_prec = self.worst_prec.min(x.prec());
        if !x.is_zero() {
            self.failures.push(format!("{label}: residual valuation {:?}", x.valuation()));
        } else if x.prec() < floor {
            self.failures.push(format!("{label}: zero only to O(pi^{}) < floor {floor}", x.prec()));
        }
    }

    fn series_zero(&mut self, label: &str, s: &TateSeries, floor: i64) {
        self.count += 1;
        let n = s.gauss_norm();
        self.worst_prec = self.worst_prec.min(s.min_prec());
        if !n.upper_bound {
            self.failures.push(format!("{label}: residual norm q^{}", n.log_q));
        } else if s.min_prec() < floor {
            self.failures.push(format!("{label}: zero only to O(pi^{}) < floor {floor}", s.min_prec()));
        }
    }

    fn certified(&mut self, label: &str, ok: bool, prec: i64) {
        self.worst_prec = self.worst_prec.min(prec);
        self.ensure(label, ok);
    }

    fn ensure(&mut self, label: &str, ok: bool) {
        self.count += 1;
        if !ok {
            self.failures.push(label.to_string());
        }
    }

    fn finish(self) -> (bool, String) {
        if let Some(first) = self.failures.first() {
            let more = self.failures.len() - 1;
            let tail = if more > 0 { format!(" (+{more} more)") } else { String::new() };
            (false, format!("{first}{tail}"))
        } else if self.worst_prec == EXACT {
            (true, format!("{} checks", self.count))
        } else {
            (true, format!("{} checks, worst O(pi^{})", self.count, self.worst_prec))
        }
    }
}

fn random_element(field: &Field, rng: &mut ChaCha8Rng, v: i64, len: i64) -> LocalElement {
    let n = field.residue().size();
    let mut terms: Vec<_> = (v..v + len).map(|k| (k, rng.random_range(0..n))).collect();
    terms[0].1 = rng.random_range(1..n);
    LocalElement::from_terms(field, &terms, EXACT)
}

fn omega_fe(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let o = omega(f, cfg.t_deg, cfg.prec);
    let tq = TateSeries::from_poly(&TPoly::t_minus(&LocalElement::theta_pow(f, f.q() as i64)), cfg.t_deg);
    c.series_zero("Omega - (t - theta^q) Omega^(1)", &o.sub(&tq.mul(&o.twist(1)?)), cfg.prec - ELEMENT_LOSS);
    Ok(())
}

fn period_link(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let w = omega(f, cfg.t_deg, cfg.prec).eval_entire(&LocalElement::theta(f))?;
    let r = pi_tilde(f, cfg.prec).mul_ref(&w).add_ref(&LocalElement::one(f));
    c.zero("pi_tilde Omega(theta) + 1", &r, cfg.prec - ELEMENT_LOSS);
    Ok(())
}

fn torsion_log(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let l = carlitz_log(&LocalElement::zeta(f), cfg.prec)?;
    let r = LocalElement::theta(f).mul_ref(&l).sub_ref(&pi_tilde(f, cfg.prec));
    c.zero("theta log(zeta) - pi_tilde", &r, cfg.prec - ELEMENT_LOSS);
    Ok(())
}

fn exp_kernel(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let pt = pi_tilde(f, cfg.prec);
    c.zero("exp(pi_tilde)", &carlitz_exp(&pt, cfg.prec), cfg.prec - ELEMENT_LOSS);
    for (label, a) in [("1", vec![1]), ("t", vec![0, 1]), ("t+1", vec![1, 1])] {
        let a = FqPoly::from_ints(f, &a).eval_theta();
        let z = a.mul_ref(&pt);
        c.zero(&format!("exp(({label})(theta) pi_tilde)"), &carlitz_exp(&z, cfg.prec), cfg.prec - ELEMENT_LOSS);
    }
    Ok(())
}

fn exp_log(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let p = cfg.prec;
    let floor = p - ELEMENT_LOSS;
    let th = LocalElement::theta(f);
    let lb = f.log_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    for i in 0..RANDOM_SAMPLES {
        let v = rng.random_range(1 - lb..=lb);
        let z = random_element(f, &mut rng, v, 6);
        let e = carlitz_exp(&z, p);
        let fe = carlitz_exp(&th.mul_ref(&z), p).sub_ref(&th.mul_ref(&e).add_ref(&e.twist(1)?));
        c.zero(&format!("#{i} exp(theta z) = C_t(exp z)"), &fe, floor);
        c.zero(&format!("#{i} log(exp z) = z"), &carlitz_log(&e, p)?.sub_ref(&z), floor);
        c.zero(&format!("#{i} exp(log z) = z"), &carlitz_exp(&carlitz_log(&z, p)?, p).sub_ref(&z), floor);
        // theta z and z^q stay in the log domain once v(z) > ram - c
        if v > f.ram - lb {
            let lhs = th.mul_ref(&carlitz_log(&z, p)?);
            let rhs = carlitz_log(&th.mul_ref(&z), p)?.add_ref(&carlitz_log(&z.twist(1)?, p)?);
            c.zero(&format!("#{i} theta log z = log(theta z) + log(z^q)"), &lhs.sub_ref(&rhs), floor);
        }
        let vw = rng.random_range(1 - lb..=lb);
        let w = random_element(f, &mut rng, vw, 6);
        let add = carlitz_exp(&z.add_ref(&w), p).sub_ref(&e.add_ref(&carlitz_exp(&w, p)));
        c.zero(&format!("#{i} exp additivity"), &add, floor);
    }
    Ok(())
}

fn lalpha(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let th = LocalElement::theta(f);
    let tq = TateSeries::from_poly(&TPoly::t_minus(&LocalElement::theta_pow(f, f.q() as i64)), cfg.t_deg);
    for (label, alpha) in [("zeta", LocalElement::zeta(f)), ("1/theta", th.inv()?), ("theta", th.clone())] {
        let l = l_alpha(&alpha, cfg.t_deg, cfg.prec)?;
        let r = tq.mul(&l).sub(&tq.scale(&alpha).add(&l.twist(1)?));
        c.series_zero(&format!("L_{label} functional equation"), &r, cfg.prec - ELEMENT_LOSS);
        let d = l.eval_entire(&th)?.sub_ref(&carlitz_log(&alpha, cfg.prec)?);
        c.zero(&format!("L_{label}(theta) - log({label})"), &d, cfg.prec - LALPHA_VALUE_LOSS);
    }
    Ok(())
}

fn zeta_relation(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let z = LocalElement::zeta(f);
    let rep = relation_report(f, std::slice::from_ref(&z), &SearchBounds::new(1, -1, 0, cfg.prec, cfg.t_deg))?;
    c.ensure(&format!("{} relations, expected 1", rep.relations.len()), rep.relations.len() == 1);
    let Some(rel) = rep.relations.first() else { return Ok(()) };
    c.ensure("relation certified", rel.is_certified());
    let expect = [TPoly::constant(LocalElement::from_int(f, -1)), TPoly::t_minus_theta(f).scale(&z), TPoly::t(f).neg()];
    let s = rel.slots[0].coeff(0).mul_ref(&expect[0].coeff(0).inv()?);
    let same = rel.slots.iter().zip(&expect).all(|(g, e)| g.sub(&e.scale(&s)).is_zero());
    c.ensure("relation is zeta (t - theta) X_0 - t X_1 - 1 up to scalar", same);
    c.ensure(&format!("dim Gamma = {}, expected 1", rep.gamma.dim), rep.gamma.dim == 1);
    if let Some(g) = rep.gamma.polys.first() {
        let cst = g.constant.num.coeffs()[0];
        let one = FqPoly::one(f);
        c.ensure("G = t X_1 - X_0 + 1", g.xi[0].num == FqPoly::t(f).scale(cst) && g.x0.num == one.scale(cst).neg());
        c.ensure("F = X_1", g.v_form[0].num == one && g.v_form[0].den == one);
        let zf = TPoly::t_minus_theta(f).scale(&z).sub(&TPoly::one(f));
        let r = g.f.coeff(1).mul_ref(&zf.coeff(1).inv()?);
        c.ensure("f = zeta (t - theta) - 1 up to scalar", g.f.sub(&zf.scale(&r)).is_zero());
    }
    for ev in &rep.evaluated {
        c.zero("evaluated identity", &ev.identity_residual, cfg.prec - ELEMENT_LOSS);
    }
    Ok(())
}

fn module_law(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let th = LocalElement::theta(f);
    let a = th.inv()?;
    let a1 = carlitz_t(&a);
    let rep = relation_report(f, &[a.clone(), a1.clone()], &SearchBounds::new(2, -2, 2, cfg.prec, cfg.t_deg))?;
    let (la, la1, pt) = (carlitz_log(&a, cfg.prec)?, carlitz_log(&a1, cfg.prec)?, pi_tilde(f, cfg.prec));
    let mut found = false;
    for (rel, ev) in rep.relations.iter().zip(&rep.evaluated) {
        c.ensure("relation certified", rel.is_certified());
        c.zero("evaluated identity", &ev.identity_residual, cfg.prec - ELEMENT_LOSS);
        if ev.c_log[1].is_zero() {
            continue;
        }
        let s = ev.c_log[1].neg_ref();
        if !ev.c_log[0].sub_ref(&th.mul_ref(&s)).is_zero() || !ev.c_const.is_zero() {
            continue;
        }
        // theta log a - log a' + f(theta) pi_tilde, with f(theta) read off the relation
        let fp = ev.c_pitilde.mul_ref(&s.inv()?);
        let id = th.mul_ref(&la).sub_ref(&la1).add_ref(&fp.mul_ref(&pt));
        c.zero("theta log a - log C_t(a) + f(theta) pi_tilde", &id, cfg.prec - ELEMENT_LOSS);
        found = true;
    }
    c.ensure("no certified module-law relation", found);
    Ok(())
}

fn independence(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let th = LocalElement::theta(f);
    let alphas = [th.clone(), th.add_ref(&LocalElement::one(f))];
    for prec in [cfg.prec, 2 * cfg.prec] {
        let k = search_relations(f, &alphas, &SearchBounds::new(2, -2, 2, prec, cfg.t_deg))?;
        c.ensure(&format!("kernel dimension {} at prec {prec}, expected 0", k.len()), k.is_empty());
    }
    let rep = relation_report(f, &alphas, &SearchBounds::new(2, -2, 2, cfg.prec, cfg.t_deg))?;
    c.ensure(&format!("dim Gamma = {}, expected 3", rep.gamma.dim), rep.gamma.dim == 3);
    Ok(())
}

fn log_reduction(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let a0 = LocalElement::theta_pow(f, -2);
    let beta = carlitz_t_pow(&a0, 2);
    let r = reduce_log_with(&beta, cfg.prec, 2)?;
    c.ensure(&format!("n = {}, expected 2", r.n), r.n == 2);
    c.zero("C_{t^2}(alpha) - beta", &r.action_residual, cfg.prec - ELEMENT_LOSS);
    c.zero("exp(theta^2 log alpha) - beta", &r.exp_residual, cfg.prec - ELEMENT_LOSS);
    c.zero("C_{t^2}(alpha - alpha_0)", &carlitz_t_pow(&r.alpha.sub_ref(&a0), 2), cfg.prec - ELEMENT_LOSS);
    Ok(())
}

fn motives(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let (t_deg, prec) = (cfg.t_deg, cfg.prec);
    let floor = prec / MOTIVE_FLOOR_DIVISOR;
    let z = LocalElement::zeta(f);
    let c1 = MotivePresentation::carlitz_power(f, 1, t_deg, prec)?;
    let x = MotivePresentation::x_alphas(std::slice::from_ref(&z), t_deg, prec)?;
    let cases = [
        MotivePresentation::one(f, t_deg),
        c1.clone(),
        MotivePresentation::carlitz_power(f, -1, t_deg, prec)?,
        MotivePresentation::carlitz_power(f, 2, t_deg, prec)?,
        x.clone(),
        x.tensor(&c1)?,
        x.dual()?,
    ];
    for m in &cases {
        let r = m.check_trivialization(floor)?;
        c.certified(
            &format!("{} trivialization (certified to {})", m.name, r.certified_prec),
            r.pass,
            r.certified_prec,
        );
    }
    let one = LocalElement::one(f);
    c.ensure("det Phi(zeta) = (1, 1)", x.check_anderson_det()? == Some((one.clone(), 1)));
    for n in [-1i64, 1, 2] {
        let m = MotivePresentation::carlitz_power(f, n, t_deg, prec)?;
        c.ensure(&format!("det C({n}) = (1, {n})"), m.check_anderson_det()? == Some((one.clone(), n)));
    }
    let b = TPolyMatrix::new(f, 1, 2, vec![TPoly::one(f), TPoly::zero(f)])?;
    c.ensure("C(1) -> X(zeta) is a morphism", check_morphism(&c1, &x, &b)?);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 11);
    let n = f.residue().size();
    let mut rejected = 0;
    while rejected < 5 {
        let mut poly = || {
            let cs = (0..3)
                .map(|_| {
                    let terms: Vec<_> = (-2..2).map(|k| (k, rng.random_range(0..n))).collect();
                    LocalElement::from_terms(f, &terms, EXACT)
                })
                .collect();
            TPoly::new(f, cs)
        };
        let (b0, b1) = (poly(), poly());
        if b1.is_zero() {
            continue;
        }
        let b = TPolyMatrix::new(f, 1, 2, vec![b0, b1])?;
        c.ensure(&format!("random B #{rejected} is rejected"), !check_morphism(&c1, &x, &b)?);
        rejected += 1;
    }
    Ok(())
}

/// Random exact coefficients below t-degree `t_deg`, stored with room for a
/// product and a zero tail so the norm is attained.
fn random_series(field: &Field, rng: &mut ChaCha8Rng, t_deg: usize) -> TateSeries {
    let len = rng.random_range(1..=t_deg);
    let coeffs = (0..2 * t_deg)
        .map(|k| {
            if k < len && (k == 0 || rng.random_bool(0.7)) {
                let v = rng.random_range(-8..8);
                let len = rng.random_range(1..6);
                random_element(field, rng, v, len)
            } else {
                LocalElement::zero(field)
            }
        })
        .collect();
    TateSeries::new(field, coeffs, Some(TailBound::zero()))
}

fn norm_laws(cfg: &SuiteConfig, c: &mut Checks) -> Result<()> {
    let f = &cfg.field;
    let q = f.q() as i64;
    let t_deg = cfg.t_deg.min(12);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 12);
    for i in 0..NORM_SAMPLES {
        let a = random_series(f, &mut rng, t_deg);
        let b = random_series(f, &mut rng, t_deg);
        let (na, nb) = (a.gauss_norm(), b.gauss_norm());
        let ab = a.mul(&b).gauss_norm();
        c.ensure(&format!("#{i} |fg| = |f||g|"), !ab.upper_bound && ab.log_q == na.log_q + nb.log_q);
        let tw = a.twist(1)?.gauss_norm();
        c.ensure(&format!("#{i} |f^(1)| = |f|^q"), !tw.upper_bound && tw.log_q == na.log_q * q);
    }
    Ok(())
}

type Runner = fn(&SuiteConfig, &mut Checks) -> Result<()>;

const RUNNERS: [Runner; 12] = [
    omega_fe,
    period_link,
    torsion_log,
    exp_kernel,
    exp_log,
    lalpha,
    zeta_relation,
    module_law,
    independence,
    log_reduction,
    motives,
    norm_laws,
];

/// Run criterion `id` (1-based).
pub fn run_one(cfg: &SuiteConfig, id: u8) -> Outcome {
    let idx = usize::from(id) - 1;
    let start = Instant::now();
    let mut checks = Checks::new();
    let (pass, detail) = match RUNNERS[idx](cfg, &mut checks) {
        Ok(()) => checks.finish(),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, name: NAMES[idx], pass, detail, elapsed: start.elapsed() }
}

pub fn run_all(cfg: &SuiteConfig) -> Vec<Outcome> {
    (1..=12).map(|id| run_one(cfg, id)).collect()
}
