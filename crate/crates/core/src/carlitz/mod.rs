//! Carlitz exponential and logarithm, the period, Omega, L_alpha and the module action.

mod newton;

pub use newton::{
    division_points, newton_polygon, reduce_log, reduce_log_with, NewtonPolygon, ReductionResult, Segment,
};

use crate::error::{Error, Result};
use crate::field::{prec_add, Field, LocalElement, EXACT};
use crate::poly::FqPoly;
use crate::tate::{TailBound, TailKind, TailModel, TateSeries};

/// 1/(theta^a - theta^b) for a > b, known to absolute precision `cap`.
///
/// Expands theta^{-a} (1 - theta^{b-a})^{-1} as a geometric series of exact monomials.
fn inv_theta_diff(field: &Field, a: i64, b: i64, cap: i64) -> LocalElement {
    assert!(a > b);
    let ram = field.ram;
    let gap = a - b;
    let mut terms = Vec::new();
    let mut k = 0i64;
    loop {
        let exp_theta = -a - k * gap;
        let v = -ram * exp_theta;
        if v >= cap {
            break;
        }
        let x = LocalElement::theta_pow(field, exp_theta);
        terms.push(x.leading().unwrap());
        k += 1;
    }
    LocalElement::from_terms(field, &terms, cap)
}

fn q_pow(field: &Field, i: u32) -> i64 {
    (field.q() as i64).checked_pow(i).expect("q^i overflows")
}

/// min over i >= 0 of q^i (p + i ram): how far an error of valuation p
/// in the argument can move exp_C.
fn exp_error_valuation(field: &Field, p: i64) -> i64 {
    if p == EXACT {
        return EXACT;
    }
    let ram = field.ram;
    let mut best = p;
    let mut i = 1u32;
    while i < 40 {
        let Some(qi) = (field.q() as i64).checked_pow(i) else { break };
        let v = (p + i as i64 * ram).saturating_mul(qi);
        best = best.min(v);
        if p + i as i64 * ram > 0 {
            break;
        }
        i += 1;
    }
    best
}

/// exp_C(z) = sum_i z^{q^i} / prod_{j<i} (theta^{q^i} - theta^{q^j}), to absolute precision `prec`.
///
/// Term i has valuation q^i (v(z) + i ram), so the sum stops once that passes `prec`
/// on the increasing branch.
pub fn carlitz_exp(z: &LocalElement, prec: i64) -> LocalElement {
    let field = z.field().clone();
    let ram = field.ram;
    let target = prec.min(exp_error_valuation(&field, z.prec()));
    let Some(v) = z.valuation() else {
        return LocalElement::zero_to(&field, target);
    };
    let mut acc = LocalElement::zero(&field);
    let mut i = 0u32;
    loop {
        let qi = q_pow(&field, i);
        let term_val = (v + i as i64 * ram).saturating_mul(qi);
        if v + i as i64 * ram > 0 && term_val >= target {
            break;
        }
        // 1/D_i has valuation ram i q^i; z^{q^i} needs precision target - that
        let dval = ram * i as i64 * qi;
        let zq = z.twist_to(i as i64, prec_add(target, -dval));
        let need = prec_add(target, -qi * v);
        let mut dinv = LocalElement::one(&field);
        for j in 0..i {
            let qj = q_pow(&field, j);
            let f = inv_theta_diff(&field, qi, qj, prec_add(need, -dinv.valuation().unwrap()));
            dinv = dinv.mul_to(&f, need);
        }
        acc = acc.add_ref(&zq.mul_to(&dinv, target));
        i += 1;
    }
    acc.truncate(target)
}

/// log_C(z) = sum_i z^{q^i} / prod_{j=1..i} (theta - theta^{q^j}), for v(z) > -q ram/(q-1).
///
/// With c = q ram/(q-1) and d = v(z) + c > 0, term i has valuation q^i d - c.
pub fn carlitz_log(z: &LocalElement, prec: i64) -> Result<LocalElement> {
    let field = z.field().clone();
    let c = field.log_bound();
    // an error of valuation p > -c in z moves log_C(z) by valuation exactly p
    let target = prec.min(z.prec());
    let Some(v) = z.valuation() else {
        return Ok(LocalElement::zero_to(&field, target));
    };
    if v <= -c {
        return Err(Error::OutsideLogDomain { valuation: v, bound: -c });
    }
    let d = v + c;
    let mut acc = LocalElement::zero(&field);
    let mut linv = LocalElement::one(&field);
    let mut i = 0u32;
    loop {
        let qi = q_pow(&field, i);
        if qi.saturating_mul(d) - c >= target {
            break;
        }
        if i > 0 {
            let need = prec_add(target, -qi * v);
            // 1/(theta - theta^{q^i}) = -1/(theta^{q^i} - theta)
            let f = inv_theta_diff(&field, qi, 1, prec_add(need, -linv.valuation().unwrap()));
            linv = linv.mul_to(&f.neg_ref(), need);
        }
        let lval = linv.valuation().unwrap();
        let zq = z.twist_to(i as i64, prec_add(target, -lval));
        acc = acc.add_ref(&zq.mul_to(&linv, target));
        i += 1;
    }
    Ok(acc.truncate(target))
}

/// The Carlitz period theta zeta_theta prod_{i>=1} (1 - theta^{1-q^i})^{-1}.
pub fn pi_tilde(field: &Field, prec: i64) -> LocalElement {
    let ram = field.ram;
    let c = field.log_bound();
    // relative precision needed for the unit product
    let rel = prec + c;
    let mut prod = LocalElement::one(field).truncate(rel);
    let mut i = 1u32;
    loop {
        let gap = ram * (q_pow(field, i) - 1);
        if gap >= rel {
            break;
        }
        // (1 - theta^{1-q^i})^{-1} = sum_k theta^{k(1-q^i)}
        let mut terms = Vec::new();
        let mut k = 0i64;
        while k * gap < rel {
            let x = LocalElement::theta_pow(field, k * (1 - q_pow(field, i)));
            terms.push(x.leading().unwrap());
            k += 1;
        }
        prod = prod.mul_to(&LocalElement::from_terms(field, &terms, rel), rel);
        i += 1;
    }
    let lead = LocalElement::theta(field).mul_ref(&LocalElement::zeta(field));
    prod.mul_ref(&lead)
}

/// Omega = zeta_theta^{-q} prod_{i>=1} (1 - t / theta^{q^i}).
///
/// Coefficient k is stored to precision prec + ram k, so that evaluation at
/// t = theta (which multiplies it by a monomial of valuation -ram k) keeps `prec`.
pub fn omega(field: &Field, t_deg: usize, prec: i64) -> TateSeries {
    let ram = field.ram;
    let c = field.log_bound();
    let caps: Vec<i64> = (0..t_deg).map(|k| prec + ram * k as i64 - c).collect();
    let top = caps.iter().copied().max().unwrap_or(0);
    let mut b: Vec<LocalElement> =
        (0..t_deg)
            .map(|k| {
                if k == 0 {
                    LocalElement::one(field).truncate(caps[0])
                } else {
                    LocalElement::zero_to(field, caps[k])
                }
            })
            .collect();
    let mut i = 1u32;
    while ram * q_pow(field, i) < top {
        let a = LocalElement::theta_pow(field, -q_pow(field, i));
        for k in (1..t_deg).rev() {
            let next = b[k].sub_ref(&b[k - 1].mul_to(&a, caps[k]));
            b[k] = next;
        }
        i += 1;
    }
    let lead = LocalElement::zeta(field).pow(-(field.q() as i64)).unwrap();
    let coeffs = b.iter().map(|x| x.mul_ref(&lead)).collect();
    let tail = TailBound::new(TailKind::Omega, TailModel::Geometric { offset: c, scale: ram, q: field.q() });
    TateSeries::new(field, coeffs, Some(tail))
}

/// L_alpha = alpha + sum_{i>=1} alpha^{q^i} / ((t - theta^q) ... (t - theta^{q^i})).
///
/// For m >= 1 the coefficient of t^m has valuation at least q d - c + ram q m,
/// d = v(alpha) + c, which is the attached tail.
pub fn l_alpha(alpha: &LocalElement, t_deg: usize, prec: i64) -> Result<TateSeries> {
    let field = alpha.field().clone();
    let ram = field.ram;
    let c = field.log_bound();
    let Some(v) = alpha.valuation() else {
        let coeffs = (0..t_deg).map(|_| LocalElement::zero_to(&field, alpha.prec())).collect();
        return Ok(TateSeries::new(&field, coeffs, Some(TailBound::zero())));
    };
    if v <= -c {
        return Err(Error::OutsideLogDomain { valuation: v, bound: -c });
    }
    let d = v + c;
    let pk: Vec<i64> = (0..t_deg).map(|k| prec + ram * k as i64).collect();
    let mut out: Vec<LocalElement> =
        (0..t_deg).map(|k| if k == 0 { alpha.truncate(pk[0]) } else { LocalElement::zero_to(&field, pk[k]) }).collect();
    // dk[k]: coefficient of t^k in prod_{j<=i} 1/(t - theta^{q^j})
    let mut dk: Vec<LocalElement> =
        (0..t_deg).map(|k| if k == 0 { LocalElement::one(&field) } else { LocalElement::zero(&field) }).collect();
    let mut i = 1u32;
    loop {
        let qi = q_pow(&field, i);
        if qi.saturating_mul(d) - c >= prec {
            break;
        }
        let shift = qi * v;
        let caps: Vec<i64> = pk.iter().map(|&p| prec_add(p, -shift)).collect();
        // h = D / (t - a): h_k = a^{-1} (h_{k-1} - D_k)
        let a_inv = LocalElement::theta_pow(&field, -qi);
        let mut prev = LocalElement::zero(&field);
        for k in 0..t_deg {
            let h = prev.sub_ref(&dk[k]).mul_to(&a_inv, caps[k]);
            dk[k] = h.clone();
            prev = h;
        }
        let aq = alpha.twist_to(i as i64, EXACT);
        for k in 0..t_deg {
            out[k] = out[k].add_ref(&aq.mul_to(&dk[k], pk[k]));
        }
        i += 1;
    }
    let q = field.q() as i64;
    let tail = TailBound::new(TailKind::Lalpha, TailModel::Linear { base: q * d - c, slope: ram * q });
    Ok(TateSeries::new(&field, out, Some(tail)))
}

/// C_t(x) = theta x + x^q.
pub fn carlitz_t(x: &LocalElement) -> LocalElement {
    let th = LocalElement::theta(x.field());
    th.mul_ref(x).add_ref(&x.twist_to(1, EXACT))
}

/// The module action C_a(x) = sum_k a_k C_{t^k}(x).
pub fn carlitz_action(a: &FqPoly, x: &LocalElement) -> LocalElement {
    let field = x.field();
    let mut acc = LocalElement::zero(field);
    let mut y = x.clone();
    for (k, &c) in a.coeffs().iter().enumerate() {
        if k > 0 {
            y = carlitz_t(&y);
        }
        if c != 0 {
            acc = acc.add_ref(&y.scale(c));
        }
    }
    acc
}

/// C_{t^n}(x).
pub fn carlitz_t_pow(x: &LocalElement, n: u32) -> LocalElement {
    (0..n).fold(x.clone(), |y, _| carlitz_t(&y))
}
