//! Newton polygons, t-division points and logarithm reduction.

use std::cmp::Ordering;

use num_rational::Ratio;

use super::{carlitz_exp, carlitz_log, carlitz_t, carlitz_t_pow};
use crate::error::{Error, ExtensionReason, Result};
use crate::field::{prec_add, LocalElement, Res, EXACT};

/// One edge of the lower convex hull.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Delta valuation / delta degree; roots on this edge have valuation -slope.
    pub slope: Ratio<i64>,
    pub length: i64,
    /// Residual polynomial, coefficients from y^0 up.
    pub residual: Vec<Res>,
}

impl Segment {
    pub fn root_valuation(&self) -> Ratio<i64> {
        -self.slope
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, i64)>,
    pub segments: Vec<Segment>,
}

/// Lower hull of (i, v(c_i)) for the polynomial sum c_i x^i.
pub fn newton_polygon(coeffs: &[LocalElement]) -> Result<NewtonPolygon> {
    let lead = coeffs.last().ok_or(Error::IndeterminateValuation)?;
    if lead.valuation().is_none() {
        return Err(Error::IndeterminateValuation);
    }
    let pts: Vec<(i64, i64)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (i as i64, v))).collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or above the segment a -> p
            let cross = (b.0 - a.0) as i128 * (p.1 - a.1) as i128 - (b.1 - a.1) as i128 * (p.0 - a.0) as i128;
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // a vanishing coefficient whose precision sits below the hull could move it
    for (i, c) in coeffs.iter().enumerate() {
        if c.valuation().is_none() && c.prec() != EXACT {
            let i = i as i64;
            if let Some(w) = hull.windows(2).find(|w| w[0].0 <= i && i <= w[1].0) {
                let line = Ratio::new(w[0].1, 1)
                    + Ratio::new(w[1].1 - w[0].1, w[1].0 - w[0].0) * Ratio::from_integer(i - w[0].0);
                if Ratio::from_integer(c.prec()) <= line {
                    return Err(Error::IndeterminateValuation);
                }
            } else if i < hull[0].0 {
                return Err(Error::IndeterminateValuation);
            }
        }
    }
    let segments = hull
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let slope = Ratio::new(b.1 - a.1, b.0 - a.0);
            let step = *slope.denom();
            let residual = (0..=(b.0 - a.0) / step)
                .map(|k| {
                    let i = a.0 + k * step;
                    let v = a.1 + k * step * slope.numer() / slope.denom();
                    coeffs[i as usize].coeff(v)
                })
                .collect();
            Segment { slope, length: b.0 - a.0, residual }
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, segments })
}

/// All x with x^q + theta x = beta, refined to precision min(prec, prec(beta) + ram).
///
/// The map is F_q-linear with kernel F_q zeta_theta, so one root x* gives all q.
/// x* is built digit by digit from the Newton polygon of x^q + theta x - rem:
/// below valuation -c the x^q term leads (take a q-th root of the leading digit),
/// at -c both terms tie (Artin-Schreier residual u^q - u = b), above it theta x
/// leads and the Newton step x += rem/theta converges.
pub fn division_points(beta: &LocalElement, prec: i64) -> Result<Vec<LocalElement>> {
    let field = beta.field().clone();
    let res = field.residue();
    let ram = field.ram;
    let c = field.log_bound();
    let q = field.q() as i64;
    let target = prec.min(prec_add(beta.prec(), ram));
    let theta_inv = LocalElement::theta(&field).inv()?;
    let f = |x: &LocalElement| carlitz_t(x);

    let mut x = LocalElement::zero(&field);
    // exact inputs stay exact while that is cheap, so exact roots come out exact
    let cut = prec_add(target, -ram);
    let mut rem = beta.clone();
    loop {
        if rem.support_end() > cut.saturating_mul(2).max(cut) {
            rem = rem.truncate(cut);
        }
        let Some((b, lead)) = rem.leading() else { break };
        if b >= target - ram {
            break;
        }
        match b.cmp(&-c) {
            Ordering::Less => {
                if b.rem_euclid(q) != 0 {
                    return Err(Error::ExtensionRequired(ExtensionReason::Slope));
                }
                let u = field.frob_q(lead, -1);
                let step = LocalElement::monomial(&field, u, b / q);
                rem = rem.sub_ref(&f(&step));
                x = x.add_ref(&step);
            }
            Ordering::Equal => {
                let u = res
                    .elements()
                    .find(|&u| res.sub(field.frob_q(u, 1), u) == lead)
                    .ok_or(Error::ExtensionRequired(ExtensionReason::Residual))?;
                let step = LocalElement::monomial(&field, u, -c / q);
                rem = rem.sub_ref(&f(&step));
                x = x.add_ref(&step);
            }
            Ordering::Greater => {
                let step = rem.mul_ref(&theta_inv);
                rem = rem.sub_ref(&f(&step));
                x = x.add_ref(&step);
            }
        }
    }
    let x = if rem.is_zero() && rem.is_exact() { x } else { x.truncate(target) };
    let zeta = LocalElement::zeta(&field);
    let roots = res.elements().filter(|&u| field.in_fq(u)).map(|u| x.add_ref(&zeta.scale(u))).collect();
    Ok(roots)
}

/// Larger norm first, then digits compared from the lowest exponent up.
fn root_order(a: &LocalElement, b: &LocalElement) -> Ordering {
    let va = a.valuation().unwrap_or(i64::MAX);
    let vb = b.valuation().unwrap_or(i64::MAX);
    va.cmp(&vb).then_with(|| {
        let hi = a.support_end().max(b.support_end());
        (va..hi).map(|k| a.coeff(k).cmp(&b.coeff(k))).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    })
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub alpha: LocalElement,
    pub n: u32,
    /// C_{t^n}(alpha) - beta.
    pub action_residual: LocalElement,
    /// exp_C(theta^n log_C(alpha)) - beta.
    pub exp_residual: LocalElement,
}

/// Greedy reduction: while |beta| >= |theta|^{q/(q-1)}, replace beta by its
/// t-division point of largest norm.
pub fn reduce_log(beta: &LocalElement, prec: i64) -> Result<ReductionResult> {
    reduce_log_with(beta, prec, 0)
}

/// As [`reduce_log`], but takes at least `min_steps` division steps even when
/// beta is already inside the logarithm domain.
pub fn reduce_log_with(beta: &LocalElement, prec: i64, min_steps: u32) -> Result<ReductionResult> {
    let field = beta.field().clone();
    let c = field.log_bound();
    beta.valuation().ok_or(Error::IndeterminateValuation)?;
    let mut alpha = beta.clone();
    let mut n = 0u32;
    loop {
        let v = alpha.valuation().ok_or(Error::IndeterminateValuation)?;
        if v > -c && n >= min_steps {
            break;
        }
        let mut roots = division_points(&alpha, prec + field.ram * (n as i64 + 1))?;
        roots.sort_by(root_order);
        alpha = roots.into_iter().next().expect("q >= 2 roots");
        n += 1;
    }
    let action_residual = carlitz_t_pow(&alpha, n).sub_ref(beta);
    let lift = prec + field.ram * n as i64;
    let lambda = carlitz_log(&alpha, lift)?.mul_ref(&LocalElement::theta_pow(&field, n as i64));
    let exp_residual = carlitz_exp(&lambda, prec).sub_ref(beta);
    Ok(ReductionResult { alpha, n, action_residual, exp_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, FieldConfig};

    fn f3() -> Field {
        FieldConfig::default_field()
    }

    #[test]
    fn single_segment_for_large_beta() {
        let f = f3();
        let th = LocalElement::theta(&f);
        let beta = LocalElement::monomial(&f, 1, -6);
        let coeffs = vec![beta.neg_ref(), th, LocalElement::zero(&f), LocalElement::one(&f)];
        let np = newton_polygon(&coeffs).unwrap();
        assert_eq!(np.vertices, vec![(0, -6), (3, 0)]);
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].slope, Ratio::from_integer(2));
        assert_eq!(np.segments[0].root_valuation(), Ratio::from_integer(-2));
        assert_eq!(np.segments[0].length, 3);
    }

    #[test]
    fn linear_polynomial() {
        let f = f3();
        let a = LocalElement::monomial(&f, 1, 4);
        let np = newton_polygon(&[a.neg_ref(), LocalElement::one(&f)]).unwrap();
        assert_eq!(np.segments[0].root_valuation(), Ratio::from_integer(4));
    }

    #[test]
    fn torsion_polygon() {
        let f = f3();
        // x^3 + theta x = x (x^2 + theta): root 0 and two roots of valuation -1
        let coeffs = vec![LocalElement::theta(&f), LocalElement::zero(&f), LocalElement::one(&f)];
        let np = newton_polygon(&coeffs).unwrap();
        assert_eq!(np.segments[0].root_valuation(), Ratio::from_integer(-1));
        assert_eq!(np.segments[0].residual, vec![2, 0, 1]);
    }

    #[test]
    fn division_points_of_zero_are_torsion() {
        let f = f3();
        let roots = division_points(&LocalElement::zero(&f), 50).unwrap();
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!(carlitz_t(r).is_zero());
        }
    }

    #[test]
    fn non_integral_slope_needs_extension() {
        let f = f3();
        let beta = LocalElement::monomial(&f, 1, -7);
        assert_eq!(division_points(&beta, 50).unwrap_err(), Error::ExtensionRequired(ExtensionReason::Slope));
    }

    #[test]
    fn artin_schreier_without_root() {
        // q = 3, e = 1: u^3 - u = b has no root in F_3 for b != 0
        let f = f3();
        let beta = LocalElement::monomial(&f, 1, -3);
        assert_eq!(division_points(&beta, 50).unwrap_err(), Error::ExtensionRequired(ExtensionReason::Residual));
    }
}
