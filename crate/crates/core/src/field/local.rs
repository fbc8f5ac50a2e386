//! Truncated pi-Laurent series over F_{q^e} with absolute precision.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;

use super::config::Field;
use super::residue::Res;
use crate::error::{Error, Result};

/// Precision of an element known exactly (finite support, no truncation).
pub const EXACT: i64 = i64::MAX;

// Finite precisions are clamped here so sums of precisions never overflow.
const CAP: i64 = 1 << 60;

#[inline]
pub(crate) fn prec_add(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        (a + b).clamp(-CAP, CAP)
    }
}

#[inline]
pub(crate) fn prec_scale(a: i64, k: u64) -> i64 {
    if a == EXACT {
        EXACT
    } else {
        (a as i128 * k as i128).clamp(-CAP as i128, CAP as i128) as i64
    }
}

/// An element of F_{q^e}((pi)) known modulo pi^prec.
///
/// `digits[k]` is the coefficient of pi^(start + k). The vector never has a
/// zero first or last entry and never reaches `prec`.
#[derive(Clone)]
pub struct LocalElement {
    field: Field,
    start: i64,
    digits: Vec<Res>,
    prec: i64,
}

/// |x| = q^{log_q}; for elements that vanish at their precision it is an upper bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalNorm {
    pub valuation: Option<i64>,
    pub log_q: Ratio<i64>,
    pub upper_bound: bool,
}

impl LocalElement {
    fn build(field: &Field, start: i64, digits: Vec<Res>, prec: i64) -> Self {
        let mut x = LocalElement { field: field.clone(), start, digits, prec };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.prec != EXACT {
            let keep = (self.prec - self.start).clamp(0, self.digits.len() as i64) as usize;
            self.digits.truncate(keep);
        }
        while self.digits.last() == Some(&0) {
            self.digits.pop();
        }
        let lead = self.digits.iter().take_while(|&&c| c == 0).count();
        if lead == self.digits.len() {
            self.digits.clear();
            self.start = 0;
        } else if lead > 0 {
            self.digits.drain(..lead);
            self.start += lead as i64;
        }
    }

    pub fn zero(field: &Field) -> Self {
        Self::build(field, 0, Vec::new(), EXACT)
    }

    /// Zero known only modulo pi^prec.
    pub fn zero_to(field: &Field, prec: i64) -> Self {
        Self::build(field, 0, Vec::new(), prec)
    }

    pub fn one(field: &Field) -> Self {
        Self::monomial(field, 1, 0)
    }

    pub fn from_int(field: &Field, n: i64) -> Self {
        Self::monomial(field, field.residue().from_int(n), 0)
    }

    /// Exact c * pi^exp.
    pub fn monomial(field: &Field, c: Res, exp: i64) -> Self {
        Self::build(field, exp, vec![c], EXACT)
    }

    pub fn pi(field: &Field) -> Self {
        Self::monomial(field, 1, 1)
    }

    /// theta = -pi^{-ram}.
    pub fn theta(field: &Field) -> Self {
        Self::monomial(field, field.residue().neg_one(), -field.ram)
    }

    /// theta^n = (-1)^n pi^{-ram n}, exact for every integer n.
    pub fn theta_pow(field: &Field, n: i64) -> Self {
        let c = if n.rem_euclid(2) == 1 { field.residue().neg_one() } else { 1 };
        Self::monomial(field, c, -field.ram * n)
    }

    /// zeta_theta = pi^{-ram/(q-1)}, a (q-1)-th root of -theta.
    pub fn zeta(field: &Field) -> Self {
        Self::monomial(field, 1, field.zeta_valuation())
    }

    /// Element from (exponent, coefficient) pairs; terms at or above `prec` are dropped.
    pub fn from_terms(field: &Field, terms: &[(i64, Res)], prec: i64) -> Self {
        let res = field.residue();
        let live: Vec<_> = terms.iter().filter(|(k, c)| *k < prec && *c != 0).collect();
        if live.is_empty() {
            return Self::zero_to(field, prec);
        }
        let lo = live.iter().map(|t| t.0).min().unwrap();
        let hi = live.iter().map(|t| t.0).max().unwrap();
        let mut digits = vec![0; (hi - lo + 1) as usize];
        for &&(k, c) in &live {
            let slot = &mut digits[(k - lo) as usize];
            *slot = res.add(*slot, c);
        }
        Self::build(field, lo, digits, prec)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    /// Zero modulo pi^prec (for exact elements, genuinely zero).
    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        (!self.digits.is_empty()).then_some(self.start)
    }

    /// Valuation, or the precision when the element vanishes at its precision.
    pub fn val_lb(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn leading(&self) -> Option<(i64, Res)> {
        self.digits.first().map(|&c| (self.start, c))
    }

    pub fn coeff(&self, exp: i64) -> Res {
        let k = exp - self.start;
        if k < 0 || k >= self.digits.len() as i64 {
            0
        } else {
            self.digits[k as usize]
        }
    }

    /// One past the largest stored exponent (start if empty).
    pub fn support_end(&self) -> i64 {
        self.start + self.digits.len() as i64
    }

    /// Nonzero (exponent, coefficient) pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Res)> + '_ {
        self.digits.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(k, &c)| (self.start + k as i64, c))
    }

    pub fn num_terms(&self) -> usize {
        self.digits.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &Self) {
        assert!(self.field.same_field(&other.field), "mixing elements of different fields");
    }

    pub fn same_field_as(&self, other: &Self) -> Result<()> {
        if self.field.same_field(&other.field) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch)
        }
    }

    /// Drop everything at or above `prec` (no-op if already coarser).
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::build(&self.field, self.start, self.digits.clone(), prec)
    }

    /// Forget exactness: the same digits, declared known only to `prec`.
    pub fn with_prec(&self, prec: i64) -> Self {
        self.truncate(prec)
    }

    /// Multiplication by pi^k.
    pub fn shift(&self, k: i64) -> Self {
        if self.digits.is_empty() {
            return Self::zero_to(&self.field, prec_add(self.prec, k));
        }
        LocalElement {
            field: self.field.clone(),
            start: self.start + k,
            digits: self.digits.clone(),
            prec: prec_add(self.prec, k),
        }
    }

    pub fn scale(&self, c: Res) -> Self {
        let res = self.field.residue();
        if c == 0 {
            return Self::zero(&self.field);
        }
        let digits = self.digits.iter().map(|&d| res.mul(d, c)).collect();
        Self::build(&self.field, self.start, digits, self.prec)
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check(other);
        let res = self.field.residue();
        let prec = self.prec.min(other.prec);
        if other.digits.is_empty() {
            return self.truncate(prec);
        }
        if self.digits.is_empty() {
            return other.truncate(prec);
        }
        let lo = self.start.min(other.start);
        let hi = self.support_end().max(other.support_end()).min(prec);
        if hi <= lo {
            return Self::zero_to(&self.field, prec);
        }
        let mut digits = vec![0; (hi - lo) as usize];
        for src in [self, other] {
            let off = src.start - lo;
            for (k, &c) in src.digits.iter().enumerate() {
                let idx = off + k as i64;
                if idx >= digits.len() as i64 {
                    break;
                }
                let slot = &mut digits[idx as usize];
                *slot = res.add(*slot, c);
            }
        }
        Self::build(&self.field, lo, digits, prec)
    }

    pub fn neg_ref(&self) -> Self {
        self.scale(self.field.residue().neg_one())
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    /// Product with precision min(prec_a + v_b, prec_b + v_a).
    pub fn mul_ref(&self, other: &Self) -> Self {
        self.mul_to(other, EXACT)
    }

    /// Product, additionally truncated at `cap`.
    pub fn mul_to(&self, other: &Self, cap: i64) -> Self {
        self.check(other);
        let prec = prec_add(self.prec, other.val_lb()).min(prec_add(other.prec, self.val_lb())).min(cap);
        if self.digits.is_empty() || other.digits.is_empty() {
            return Self::zero_to(&self.field, prec);
        }
        let res = self.field.residue();
        let lo = self.start + other.start;
        let full = self.digits.len() + other.digits.len() - 1;
        let len = if prec == EXACT { full } else { ((prec - lo).max(0) as usize).min(full) };
        let mut digits = vec![0; len];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if i >= len {
                break;
            }
            let end = other.digits.len().min(len - i);
            for (j, &b) in other.digits[..end].iter().enumerate() {
                if b != 0 {
                    let slot = &mut digits[i + j];
                    *slot = res.add(*slot, res.mul(a, b));
                }
            }
        }
        Self::build(&self.field, lo, digits, prec)
    }

    /// Inverse known to at most `target` (absolute precision).
    ///
    /// The natural precision of 1/a is prec_a - 2 v(a); exact monomials stay exact.
    pub fn inv_to(&self, target: i64) -> Result<Self> {
        let (v, u0) = self.leading().ok_or(Error::DivisionByIndistinguishableZero)?;
        let res = self.field.residue();
        let u0_inv = res.inv(u0).expect("leading digit is nonzero");
        if self.is_exact() && self.digits.len() == 1 {
            return Ok(Self::monomial(&self.field, u0_inv, -v));
        }
        let prec = prec_add(self.prec, -2 * v).min(target);
        let n = prec_add(prec, v).max(0);
        let n = usize::try_from(n).map_err(|_| Error::DivisionByIndistinguishableZero)?;
        let neg_u0_inv = res.neg(u0_inv);
        let mut out: Vec<Res> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                out.push(u0_inv);
                continue;
            }
            let mut s = 0;
            let top = k.min(self.digits.len() - 1);
            for j in 1..=top {
                let a = self.digits[j];
                if a != 0 {
                    s = res.add(s, res.mul(a, out[k - j]));
                }
            }
            out.push(res.mul(neg_u0_inv, s));
        }
        Ok(Self::build(&self.field, -v, out, prec))
    }

    /// 1/a: exact inputs are expanded to the default precision.
    pub fn inv(&self) -> Result<Self> {
        if self.is_exact() && self.num_terms() == 1 {
            let (k, c) = self.leading().expect("one term");
            let u = self.field.residue().inv(c).expect("nonzero digit");
            return Ok(Self::monomial(&self.field, u, -k));
        }
        let target = if self.is_exact() { self.field.default_prec } else { EXACT };
        self.inv_to(target)
    }

    /// a / b truncated to at most `target`.
    pub fn div_to(&self, b: &Self, target: i64) -> Result<Self> {
        self.check(b);
        let vb = b.valuation().ok_or(Error::DivisionByIndistinguishableZero)?;
        let natural = prec_add(self.prec, -vb).min(prec_add(b.prec, self.val_lb() - 2 * vb));
        let want = natural.min(target);
        let binv = b.inv_to(prec_add(want, -self.val_lb()))?;
        Ok(self.mul_to(&binv, want))
    }

    pub fn div(&self, b: &Self) -> Result<Self> {
        let target = if self.is_exact() && b.is_exact() { self.field.default_prec } else { EXACT };
        self.div_to(b, target)
    }

    /// a^n; negative n goes through `inv`.
    pub fn pow(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(acc)
    }

    /// The twist a^{(n)}: for n >= 0 the q^n-th power, for n < 0 the q^{|n|}-th root.
    pub fn twist(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.twist_to(n, EXACT))
        } else {
            self.untwist(-n)
        }
    }

    /// a^{q^n} (n >= 0) truncated at `cap`; only the digits that survive are expanded.
    pub fn twist_to(&self, n: i64, cap: i64) -> Self {
        assert!(n >= 0);
        let qn = (self.field.q() as i64).checked_pow(n as u32).expect("twist order overflows");
        let prec = prec_scale(self.prec, qn as u64).min(cap);
        if n == 0 {
            return self.truncate(prec);
        }
        let terms: Vec<(i64, Res)> = self
            .terms()
            .map_while(|(k, c)| {
                let kk = k.checked_mul(qn)?;
                (kk < prec).then(|| (kk, self.field.frob_q(c, n)))
            })
            .collect();
        Self::sparse(&self.field, &terms, prec)
    }

    // Sorted, distinct exponents.
    fn sparse(field: &Field, terms: &[(i64, Res)], prec: i64) -> Self {
        match terms.first() {
            None => Self::zero_to(field, prec),
            Some(&(lo, _)) => {
                let hi = terms.last().unwrap().0;
                let mut digits = vec![0; (hi - lo + 1) as usize];
                for &(k, c) in terms {
                    digits[(k - lo) as usize] = c;
                }
                Self::build(field, lo, digits, prec)
            }
        }
    }

    fn untwist(&self, n: i64) -> Result<Self> {
        let qn = (self.field.q() as i64).checked_pow(n as u32).unwrap_or(i64::MAX);
        let mut terms = Vec::with_capacity(self.num_terms());
        for (k, c) in self.terms() {
            if k.rem_euclid(qn) != 0 {
                return Err(Error::NotAQthPower { power: n, exponent: k });
            }
            terms.push((k / qn, self.field.frob_q(c, -n)));
        }
        let prec = if self.prec == EXACT {
            EXACT
        } else {
            // ceil(prec / q^n)
            -((-self.prec).div_euclid(qn))
        };
        Ok(Self::sparse(&self.field, &terms, prec))
    }

    pub fn norm(&self) -> LocalNorm {
        let ram = self.field.ram;
        match self.valuation() {
            Some(v) => LocalNorm { valuation: Some(v), log_q: Ratio::new(-v, ram), upper_bound: false },
            None => {
                let bound = if self.prec == EXACT { i64::MIN } else { -self.prec };
                LocalNorm { valuation: None, log_q: Ratio::new(bound, ram), upper_bound: true }
            }
        }
    }

    /// Whether every coefficient lies in F_q (so the element is fixed by twisting).
    pub fn coefficients_in_fq(&self) -> bool {
        self.digits.iter().all(|&c| self.field.in_fq(c))
    }

    /// Equality of the stored data at the common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.sub_ref(other).is_zero()
    }
}

impl PartialEq for LocalElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field)
            && self.prec == other.prec
            && self.start == other.start
            && self.digits == other.digits
    }
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let res = self.field.residue();
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coords = res.coords(c);
            let cs = if coords.len() == 1 {
                coords[0].to_string()
            } else {
                format!("[{}]", coords.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            };
            match k {
                0 => write!(f, "{cs}")?,
                1 => write!(f, "{cs}*pi")?,
                _ => write!(f, "{cs}*pi^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        if self.prec != EXACT {
            write!(f, " + O(pi^{})", self.prec)?;
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&LocalElement> for &LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: &LocalElement) -> LocalElement {
                self.$imp(rhs)
            }
        }
        impl $tr<LocalElement> for LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: LocalElement) -> LocalElement {
                self.$imp(&rhs)
            }
        }
        impl $tr<&LocalElement> for LocalElement {
            type Output = LocalElement;
            fn $m(self, rhs: &LocalElement) -> LocalElement {
                self.$imp(rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for &LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        self.neg_ref()
    }
}

impl Neg for LocalElement {
    type Output = LocalElement;
    fn neg(self) -> LocalElement {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use proptest::prelude::*;

    fn f3() -> Field {
        FieldConfig::default_field()
    }

    #[test]
    fn theta_times_inverse_is_exactly_one() {
        let f = f3();
        let th = LocalElement::theta(&f);
        let one = th.mul_ref(&th.inv().unwrap());
        assert_eq!(one, LocalElement::one(&f));
        assert!(one.is_exact());
    }

    #[test]
    fn zeta_is_a_root_of_minus_theta() {
        for (p, m, e, ram) in [(3, 1, 1, 2), (2, 1, 1, 1), (5, 1, 1, 8), (2, 2, 1, 3)] {
            let f = FieldConfig::new(p, m, e, ram, 50).unwrap();
            let z = LocalElement::zeta(&f);
            let lhs = z.pow(f.q() as i64 - 1).unwrap();
            assert_eq!(lhs, LocalElement::theta(&f).neg_ref());
        }
    }

    #[test]
    fn geometric_series_inverse() {
        let f = f3();
        let x = LocalElement::one(&f) - LocalElement::pi(&f);
        let y = x.inv().unwrap();
        assert_eq!(y.prec(), 200);
        assert!((0..200).all(|k| y.coeff(k) == 1));
        let back = x.mul_ref(&y);
        assert_eq!(back, LocalElement::one(&f).truncate(200));
    }

    #[test]
    fn twists_of_constants() {
        let f = f3();
        let th = LocalElement::theta(&f);
        assert_eq!(th.twist(1).unwrap(), LocalElement::theta_pow(&f, 3));
        let z = LocalElement::zeta(&f);
        assert_eq!(z.twist(1).unwrap(), th.mul_ref(&z).neg_ref());
        assert!(matches!(th.twist(-1), Err(Error::NotAQthPower { .. })));
    }

    #[test]
    fn norms() {
        let f = f3();
        let n = LocalElement::theta(&f).norm();
        assert_eq!(n.valuation, Some(-2));
        assert_eq!(n.log_q, Ratio::from_integer(1));
        assert_eq!(LocalElement::zeta(&f).norm().log_q, Ratio::new(1, 2));
        let z = LocalElement::zero_to(&f, 10).norm();
        assert!(z.upper_bound);
        assert_eq!(z.log_q, Ratio::new(-5, 1));
    }

    #[test]
    fn multiplication_precision_rule() {
        let f = f3();
        let a = LocalElement::from_terms(&f, &[(-2, 1), (0, 1)], 5);
        let b = LocalElement::from_terms(&f, &[(1, 2)], 8);
        let c = a.mul_ref(&b);
        // min(prec a + v(b), prec b + v(a))
        assert_eq!(c.prec(), 6);
    }

    #[test]
    fn zero_divisor_rejected() {
        let f = f3();
        assert_eq!(LocalElement::zero_to(&f, 10).inv(), Err(Error::DivisionByIndistinguishableZero));
    }

    fn arb_elem(f: Field) -> impl Strategy<Value = LocalElement> {
        let size = f.residue().size();
        (-6i64..6, proptest::collection::vec(0..size, 1..12), 10i64..40).prop_map(move |(start, digits, prec)| {
            let terms: Vec<_> = digits.iter().enumerate().map(|(k, &c)| (start + k as i64, c)).collect();
            LocalElement::from_terms(&f, &terms, prec)
        })
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(FieldConfig::new(3, 1, 1, 2, 60).unwrap()),
            Just(FieldConfig::new(2, 1, 2, 1, 60).unwrap()),
            Just(FieldConfig::new(2, 2, 1, 3, 60).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn ultrametric((a, b) in fields().prop_flat_map(|f| (arb_elem(f.clone()), arb_elem(f)))) {
            let s = a.add_ref(&b);
            if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
                if let Some(vs) = s.valuation() {
                    prop_assert!(vs >= va.min(vb));
                    if va != vb {
                        prop_assert_eq!(vs, va.min(vb));
                    }
                }
                let p = a.mul_ref(&b);
                if p.valuation().is_some() {
                    prop_assert_eq!(p.valuation(), Some(va + vb));
                }
            }
        }

        #[test]
        fn twist_is_a_ring_map((a, b) in fields().prop_flat_map(|f| (arb_elem(f.clone()), arb_elem(f)))) {
            let ta = a.twist(1).unwrap();
            let tb = b.twist(1).unwrap();
            prop_assert!(a.mul_ref(&b).twist(1).unwrap().agrees_with(&ta.mul_ref(&tb)));
            prop_assert!(a.add_ref(&b).twist(1).unwrap().agrees_with(&ta.add_ref(&tb)));
            prop_assert_eq!(ta.twist(-1).unwrap(), a.clone());
            if let Some(v) = a.valuation() {
                prop_assert_eq!(ta.valuation(), Some(v * a.field().q() as i64));
            }
        }

        #[test]
        fn inverse_roundtrip(a in fields().prop_flat_map(arb_elem)) {
            prop_assume!(!a.is_zero());
            let b = a.inv().unwrap();
            let one = a.mul_ref(&b);
            prop_assert!(one.agrees_with(&LocalElement::one(a.field())));
            prop_assert!(one.prec() >= b.prec() + a.valuation().unwrap());
        }
    }
}
