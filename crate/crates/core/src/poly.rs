//! Polynomials in t: over the working field ([`TPoly`]) and over F_q ([`FqPoly`], [`RatFun`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ElementJson, Field, LocalElement, Res};

/// A polynomial in t with coefficients in F_{q^e}((pi)); `coeffs[k]` multiplies t^k.
#[derive(Clone)]
pub struct TPoly {
    field: Field,
    coeffs: Vec<LocalElement>,
}

impl TPoly {
    pub fn new(field: &Field, mut coeffs: Vec<LocalElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero() && c.is_exact()) {
            coeffs.pop();
        }
        TPoly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(LocalElement::one(field))
    }

    pub fn constant(c: LocalElement) -> Self {
        let f = c.field().clone();
        Self::new(&f, vec![c])
    }

    pub fn t(field: &Field) -> Self {
        Self::monomial(LocalElement::one(field), 1)
    }

    pub fn monomial(c: LocalElement, deg: usize) -> Self {
        let f = c.field().clone();
        let mut coeffs = vec![LocalElement::zero(&f); deg];
        coeffs.push(c);
        Self::new(&f, coeffs)
    }

    /// t - a.
    pub fn t_minus(a: &LocalElement) -> Self {
        let f = a.field().clone();
        Self::new(&f, vec![a.neg_ref(), LocalElement::one(&f)])
    }

    /// t - theta.
    pub fn t_minus_theta(field: &Field) -> Self {
        Self::t_minus(&LocalElement::theta(field))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[LocalElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> LocalElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| LocalElement::zero(&self.field))
    }

    /// Degree of the last stored coefficient; None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_exact())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add_ref(&other.coeff(k))).collect();
        Self::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|c| c.neg_ref()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(&self.field);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut out = vec![LocalElement::zero(&self.field); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.is_exact() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Self::new(&self.field, out)
    }

    pub fn scale(&self, c: &LocalElement) -> Self {
        Self::new(&self.field, self.coeffs.iter().map(|x| x.mul_ref(c)).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(&self.field), |acc, _| acc.mul(self))
    }

    /// Coefficientwise twist; t is fixed.
    pub fn twist(&self, n: i64) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|c| c.twist(n)).collect::<Result<_>>()?;
        Ok(Self::new(&self.field, coeffs))
    }

    /// Value at t = a.
    pub fn eval(&self, a: &LocalElement) -> LocalElement {
        let mut acc = LocalElement::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(a).add_ref(c);
        }
        acc
    }

    /// Quotient and remainder of division by t - a (synthetic division).
    pub fn div_linear(&self, a: &LocalElement) -> (Self, LocalElement) {
        if self.coeffs.is_empty() {
            return (Self::zero(&self.field), LocalElement::zero(&self.field));
        }
        let n = self.coeffs.len();
        let mut q = vec![LocalElement::zero(&self.field); n - 1];
        let mut carry = LocalElement::zero(&self.field);
        for k in (0..n).rev() {
            let v = self.coeffs[k].add_ref(&carry.mul_ref(a));
            if k == 0 {
                return (Self::new(&self.field, q), v);
            }
            q[k - 1] = v.clone();
            carry = v;
        }
        unreachable!()
    }

    /// The same polynomial in F_q[t], if every coefficient is an exact constant in F_q.
    pub fn to_fq(&self) -> Option<FqPoly> {
        let mut cs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_exact() {
                return None;
            }
            let mut terms = c.terms();
            cs.push(match (terms.next(), terms.next()) {
                (None, _) => 0,
                (Some((0, d)), None) if self.field.in_fq(d) => d,
                _ => return None,
            });
        }
        FqPoly::new(&self.field, cs).ok()
    }

    pub fn to_json(&self) -> Vec<ElementJson> {
        self.coeffs.iter().map(|c| c.to_json()).collect()
    }

    pub fn from_json(field: &Field, j: &[ElementJson]) -> Result<Self> {
        let coeffs = j.iter().map(|c| LocalElement::from_json(field, c)).collect::<Result<_>>()?;
        Ok(Self::new(field, coeffs))
    }
}

impl PartialEq for TPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Debug for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && c.is_exact() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A polynomial in t over F_q, stored as packed residue-field elements fixed by Frobenius.
#[derive(Clone)]
pub struct FqPoly {
    field: Field,
    coeffs: Vec<Res>,
}

impl FqPoly {
    pub fn new(field: &Field, mut coeffs: Vec<Res>) -> Result<Self> {
        if let Some(&c) = coeffs.iter().find(|&&c| !field.in_fq(c)) {
            return Err(Error::Format(format!("coefficient {c} is not in F_q")));
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(FqPoly { field: field.clone(), coeffs })
    }

    fn raw(field: &Field, mut coeffs: Vec<Res>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { field: field.clone(), coeffs }
    }

    /// Polynomial with prime-field coefficients given as integers.
    pub fn from_ints(field: &Field, ints: &[i64]) -> Self {
        let res = field.residue();
        Self::raw(field, ints.iter().map(|&n| res.from_int(n)).collect())
    }

    pub fn zero(field: &Field) -> Self {
        Self::raw(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::raw(field, vec![1])
    }

    pub fn t(field: &Field) -> Self {
        Self::raw(field, vec![0, 1])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Res] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Res> {
        self.coeffs.last().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let res = self.field.residue();
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Res], k: usize| v.get(k).copied().unwrap_or(0);
        Self::raw(&self.field, (0..n).map(|k| res.add(get(&self.coeffs, k), get(&other.coeffs, k))).collect())
    }

    pub fn scale(&self, c: Res) -> Self {
        let res = self.field.residue();
        Self::raw(&self.field, self.coeffs.iter().map(|&x| res.mul(x, c)).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.field.residue().neg_one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let res = self.field.residue();
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = res.add(out[i + j], res.mul(a, b));
            }
        }
        Self::raw(&self.field, out)
    }

    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let res = self.field.residue();
        let lead_inv = d.leading().and_then(|c| res.inv(c)).ok_or(Error::NonInvertible)?;
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(&self.field), self.clone()));
        }
        let mut q = vec![0; r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = res.mul(r[k], lead_inv);
            if c == 0 {
                continue;
            }
            q[k - dd] = c;
            for (i, &di) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = res.sub(r[idx], res.mul(c, di));
            }
        }
        Ok((Self::raw(&self.field, q), Self::raw(&self.field, r)))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(c) => self.scale(self.field.residue().inv(c).unwrap()),
        }
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).expect("divisor is nonzero").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn to_tpoly(&self) -> TPoly {
        let f = &self.field;
        TPoly::new(f, self.coeffs.iter().map(|&c| LocalElement::monomial(f, c, 0)).collect())
    }

    /// a(theta), exact.
    pub fn eval_theta(&self) -> LocalElement {
        self.to_tpoly().eval(&LocalElement::theta(&self.field))
    }

    pub fn to_json(&self) -> Vec<Vec<u32>> {
        self.coeffs.iter().map(|&c| self.field.residue().coords(c)).collect()
    }

    pub fn from_json(field: &Field, j: &[Vec<u32>]) -> Result<Self> {
        let coeffs = j.iter().map(|c| field.residue().from_coords(c)).collect::<Result<_>>()?;
        Self::new(field, coeffs)
    }
}

impl PartialEq for FqPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FqPoly {}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let res = self.field.residue();
        let mut parts = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coords = res.coords(c);
            let cs = if coords.len() == 1 { coords[0].to_string() } else { format!("{coords:?}") };
            parts.push(match (k, cs.as_str()) {
                (0, _) => cs,
                (1, "1") => "t".to_string(),
                (1, _) => format!("{cs}*t"),
                (_, "1") => format!("t^{k}"),
                _ => format!("{cs}*t^{k}"),
            });
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A reduced fraction of F_q[t] polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFun {
    pub num: FqPoly,
    pub den: FqPoly,
}

/// JSON form of a [`RatFun`]: coefficient arrays, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatFunJson {
    pub num: Vec<Vec<u32>>,
    pub den: Vec<Vec<u32>>,
}

impl RatFun {
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NonInvertible);
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g)?.0;
        let den = den.div_rem(&g)?.0;
        let c = den.leading().unwrap();
        let cinv = num.field().residue().inv(c).unwrap();
        Ok(RatFun { num: num.scale(cinv), den: den.scale(cinv) })
    }

    pub fn from_poly(num: FqPoly) -> Self {
        let den = FqPoly::one(num.field());
        RatFun { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
            .expect("denominators are nonzero")
    }

    pub fn neg(&self) -> Self {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("denominators are nonzero")
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn to_json(&self) -> RatFunJson {
        RatFunJson { num: self.num.to_json(), den: self.den.to_json() }
    }

    pub fn from_json(field: &Field, j: &RatFunJson) -> Result<Self> {
        Self::new(FqPoly::from_json(field, &j.num)?, FqPoly::from_json(field, &j.den)?)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    #[test]
    fn synthetic_division_by_t_minus_theta() {
        let f = FieldConfig::default_field();
        let tt = TPoly::t_minus_theta(&f);
        let p = tt.pow(3).scale(&LocalElement::zeta(&f));
        let (q, r) = p.div_linear(&LocalElement::theta(&f));
        assert!(r.is_zero());
        assert_eq!(q, tt.pow(2).scale(&LocalElement::zeta(&f)));
    }

    #[test]
    fn fq_gcd_and_ratfun_reduce() {
        let f = FieldConfig::default_field();
        // (t+1)(t+2) / (t+1)^2 = (t+2)/(t+1)
        let a = FqPoly::from_ints(&f, &[2, 0, 1]);
        let b = FqPoly::from_ints(&f, &[1, 2, 1]);
        let r = RatFun::new(a, b).unwrap();
        assert_eq!(r.num, FqPoly::from_ints(&f, &[2, 1]));
        assert_eq!(r.den, FqPoly::from_ints(&f, &[1, 1]));
        assert!(r.add(&r.neg()).is_zero());
    }

    #[test]
    fn fq_coefficients_enforced() {
        let f = FieldConfig::new(2, 1, 2, 1, 20).unwrap();
        let not_fq = f.residue().elements().find(|&c| !f.in_fq(c)).unwrap();
        assert!(FqPoly::new(&f, vec![not_fq]).is_err());
    }

    #[test]
    fn evaluation_at_theta() {
        let f = FieldConfig::default_field();
        let a = FqPoly::from_ints(&f, &[1, 1]);
        let th = LocalElement::theta(&f);
        assert_eq!(a.eval_theta(), th.add_ref(&LocalElement::one(&f)));
    }
}
