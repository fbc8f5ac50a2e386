//! Residue field, working local field and their wire format.

mod config;
mod local;
pub mod residue;

pub use config::{Field, FieldConfig};
pub(crate) use local::prec_add;
pub use local::{LocalElement, LocalNorm, EXACT};
pub use residue::{Res, ResidueField};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON form of a [`LocalElement`]; `prec: null` marks an exact element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub p: u32,
    pub m: u32,
    pub e: u32,
    pub ram: i64,
    pub prec: Option<i64>,
    pub coeffs: Vec<(i64, Vec<u32>)>,
}

impl LocalElement {
    pub fn to_json(&self) -> ElementJson {
        let f = self.field();
        ElementJson {
            p: f.p,
            m: f.m,
            e: f.e,
            ram: f.ram,
            prec: (!self.is_exact()).then_some(self.prec()),
            coeffs: self.terms().map(|(k, c)| (k, f.residue().coords(c))).collect(),
        }
    }

    /// Decode, checking that the encoded field matches `field`.
    pub fn from_json(field: &Field, j: &ElementJson) -> Result<Self> {
        if (j.p, j.m, j.e, j.ram) != (field.p, field.m, field.e, field.ram) {
            return Err(Error::ConfigMismatch);
        }
        if j.coeffs.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Format("coefficient exponents must be strictly increasing".into()));
        }
        let prec = j.prec.unwrap_or(EXACT);
        let mut terms = Vec::with_capacity(j.coeffs.len());
        for (k, coords) in &j.coeffs {
            if *k >= prec {
                return Err(Error::Format(format!("exponent {k} at or above precision {prec}")));
            }
            terms.push((*k, field.residue().from_coords(coords)?));
        }
        Ok(Self::from_terms(field, &terms, prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let f = FieldConfig::new(2, 1, 3, 1, 30).unwrap();
        let x = LocalElement::from_terms(&f, &[(-3, 5), (0, 1), (4, 7)], 12);
        let j = x.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: ElementJson = serde_json::from_str(&text).unwrap();
        assert_eq!(LocalElement::from_json(&f, &back).unwrap(), x);
        let exact = LocalElement::theta(&f);
        assert_eq!(exact.to_json().prec, None);
        let other = FieldConfig::new(3, 1, 1, 2, 30).unwrap();
        assert_eq!(LocalElement::from_json(&other, &j), Err(Error::ConfigMismatch));
    }
}
