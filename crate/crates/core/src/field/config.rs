use std::fmt;
use std::sync::Arc;

use super::residue::{ResidueField, MAX_FIELD_SIZE};
use crate::error::{Error, Result};

/// Shared handle to a field configuration. Elements compare configurations
/// by their parameters, so two handles built from the same numbers interoperate.
pub type Field = Arc<FieldConfig>;

/// The working field F_{q^e}((pi)) with theta = -pi^{-ram}.
pub struct FieldConfig {
    pub p: u32,
    pub m: u32,
    pub e: u32,
    pub ram: i64,
    pub default_prec: i64,
    q: u64,
    residue: ResidueField,
}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldConfig")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("e", &self.e)
            .field("ram", &self.ram)
            .field("default_prec", &self.default_prec)
            .finish()
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

impl FieldConfig {
    pub fn new(p: u32, m: u32, e: u32, ram: i64, default_prec: i64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidConfig(format!("p = {p} is not prime")));
        }
        if m == 0 || e == 0 {
            return Err(Error::InvalidConfig("m and e must be positive".into()));
        }
        let degree = m.checked_mul(e).ok_or_else(|| Error::InvalidConfig("m*e overflows".into()))?;
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::InvalidConfig(format!("q = {p}^{m} is too large")))?;
        if ram <= 0 || ram % (q as i64 - 1) != 0 {
            return Err(Error::InvalidConfig(format!("ram = {ram} must be a positive multiple of q-1 = {}", q - 1)));
        }
        if default_prec < 1 {
            return Err(Error::InvalidConfig("default_prec must be at least 1".into()));
        }
        let residue = ResidueField::new(p, degree)?;
        Ok(Arc::new(FieldConfig { p, m, e, ram, default_prec, q, residue }))
    }

    /// q = 3, e = 1, ram = 2, precision 200.
    pub fn default_field() -> Field {
        Self::new(3, 1, 1, 2, 200).expect("default configuration is valid")
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn residue(&self) -> &ResidueField {
        &self.residue
    }

    /// Valuation of zeta_theta: -ram/(q-1).
    pub fn zeta_valuation(&self) -> i64 {
        -self.ram / (self.q as i64 - 1)
    }

    /// The log_C domain is v(z) > -log_bound().
    pub fn log_bound(&self) -> i64 {
        self.q as i64 * self.ram / (self.q as i64 - 1)
    }

    /// Same base field, different default precision.
    pub fn with_prec(&self, default_prec: i64) -> Result<Field> {
        Self::new(self.p, self.m, self.e, self.ram, default_prec)
    }

    pub fn same_field(&self, other: &FieldConfig) -> bool {
        self.p == other.p && self.m == other.m && self.e == other.e && self.ram == other.ram
    }

    /// c -> c^{q^n} on the residue field.
    pub fn frob_q(&self, c: u32, n: i64) -> u32 {
        self.residue.frobenius_p(c, n * self.m as i64)
    }

    /// Whether c is fixed by c -> c^q.
    pub fn in_fq(&self, c: u32) -> bool {
        self.frob_q(c, 1) == c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldConfig::new(4, 1, 1, 3, 10).is_err());
        assert!(FieldConfig::new(3, 1, 1, 3, 10).is_err());
        assert!(FieldConfig::new(3, 1, 1, 2, 0).is_err());
        assert!(FieldConfig::new(2, 2, 1, 3, 10).is_ok());
    }

    #[test]
    fn fq_is_the_fixed_field() {
        let f = FieldConfig::new(2, 1, 2, 1, 10).unwrap();
        let fixed = f.residue().elements().filter(|&c| f.in_fq(c)).count();
        assert_eq!(fixed, 2);
    }
}
