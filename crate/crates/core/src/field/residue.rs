//! The residue field F_{q^e} = F_p[x]/(f) with f the lexicographically
//! smallest monic irreducible of degree m*e.
//!
//! Elements are packed as integers: the coordinate of x^i is the i-th base-p
//! digit. Multiplication and addition go through discrete-log and Zech tables,
//! so the field size is capped at [`MAX_FIELD_SIZE`].

use crate::error::{Error, Result};

pub const MAX_FIELD_SIZE: u64 = 1 << 16;

const NO_LOG: u32 = u32::MAX;

/// A packed element of the residue field.
pub type Res = u32;

#[derive(Debug, Clone)]
pub struct ResidueField {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    log: Vec<u32>,
    exp: Vec<u32>,
    // zech[k] = log(1 + g^k), NO_LOG when 1 + g^k = 0
    zech: Vec<u32>,
    neg_one: Res,
}

fn unpack(mut a: u32, p: u32, degree: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(degree as usize);
    for _ in 0..degree {
        out.push(a % p);
        a /= p;
    }
    out
}

fn pack(coords: &[u32], p: u32) -> u32 {
    coords.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p (coefficients low to high).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * mi) % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[u32], p: u32) -> bool {
    let d = f.len() - 1;
    if d <= 1 {
        return true;
    }
    // trial division by every monic polynomial of degree 1..=d/2
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let mut g = unpack(idx as u32, p, k as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible of degree `d` over F_p,
/// comparing the non-leading coefficients from x^{d-1} down to x^0.
pub fn smallest_irreducible(p: u32, d: u32) -> Vec<u32> {
    let count = (p as u64).pow(d);
    for idx in 0..count {
        let mut f = unpack(idx as u32, p, d);
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl ResidueField {
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        let size = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
        if size > MAX_FIELD_SIZE {
            return Err(Error::InvalidConfig(format!(
                "residue field of size {p}^{degree} exceeds the table limit {MAX_FIELD_SIZE}"
            )));
        }
        let size = size as u32;
        let modulus = smallest_irreducible(p, degree);
        let mulmod = |a: u32, b: u32| -> u32 {
            let ca = unpack(a, p, degree);
            let cb = unpack(b, p, degree);
            let mut prod = vec![0u32; 2 * degree as usize];
            for (i, &x) in ca.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in cb.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            pack(&poly_rem(&prod, &modulus, p), p)
        };

        let order = size - 1;
        let mut exp = Vec::new();
        for g in 1..size {
            exp.clear();
            let mut x = 1u32;
            loop {
                exp.push(x);
                x = mulmod(x, g);
                if x == 1 || exp.len() > order as usize {
                    break;
                }
            }
            if exp.len() == order as usize {
                break;
            }
        }
        debug_assert_eq!(exp.len(), order as usize);
        let mut log = vec![NO_LOG; size as usize];
        for (k, &x) in exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        let add_packed = |a: u32, b: u32| -> u32 {
            let ca = unpack(a, p, degree);
            let cb = unpack(b, p, degree);
            let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
            pack(&s, p)
        };
        let zech = (0..order).map(|k| log[add_packed(1, exp[k as usize]) as usize]).collect();
        let neg_one = pack(
            &{
                let mut c = vec![0u32; degree as usize];
                c[0] = p - 1;
                c
            },
            p,
        );
        Ok(ResidueField { p, degree, size, modulus, log, exp, zech, neg_one })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    /// Defining polynomial, coefficients from x^0 up to the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn coords(&self, a: Res) -> Vec<u32> {
        unpack(a, self.p, self.degree)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<Res> {
        if coords.len() != self.degree as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(Error::Format(format!("expected {} coordinates in [0, {})", self.degree, self.p)));
        }
        Ok(pack(coords, self.p))
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Res {
        n.rem_euclid(self.p as i64) as Res
    }

    #[inline]
    pub fn add(&self, a: Res, b: Res) -> Res {
        if a == 0 {
            return b;
        }
        if b == 0 {
            return a;
        }
        let order = self.size - 1;
        let la = self.log[a as usize];
        let lb = self.log[b as usize];
        let d = if lb >= la { lb - la } else { lb + order - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            0
        } else {
            let s = la as u64 + z as u64;
            self.exp[(s % order as u64) as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: Res) -> Res {
        if self.p == 2 {
            a
        } else {
            self.mul(a, self.neg_one)
        }
    }

    #[inline]
    pub fn sub(&self, a: Res, b: Res) -> Res {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Res, b: Res) -> Res {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.size - 1;
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % order as u64) as usize]
    }

    pub fn inv(&self, a: Res) -> Option<Res> {
        if a == 0 {
            return None;
        }
        let order = self.size - 1;
        let l = self.log[a as usize];
        Some(self.exp[((order - l) % order) as usize])
    }

    /// a^n for an arbitrary (possibly negative) exponent; 0^n = 0 for n != 0.
    pub fn pow(&self, a: Res, n: i64) -> Res {
        if n == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as i64;
        let l = self.log[a as usize] as i64;
        let e = (l as i128 * n as i128).rem_euclid(order as i128) as usize;
        self.exp[e]
    }

    /// The automorphism c -> c^{p^k}, k any integer.
    pub fn frobenius_p(&self, a: Res, k: i64) -> Res {
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        let k = k.rem_euclid(self.degree as i64) as u32;
        let mult = (self.p as u64).pow(k) % order.max(1);
        let l = self.log[a as usize] as u64;
        if order == 0 {
            return a;
        }
        self.exp[((l * mult) % order) as usize]
    }

    pub fn neg_one(&self) -> Res {
        self.neg_one
    }

    /// Every element, in packed order.
    pub fn elements(&self) -> impl Iterator<Item = Res> {
        0..self.size
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent arithmetic straight from polynomial multiplication mod f.
    fn naive_mul(f: &ResidueField, a: Res, b: Res) -> Res {
        let (p, d) = (f.p, f.degree);
        let ca = unpack(a, p, d);
        let cb = unpack(b, p, d);
        let mut prod = vec![0u32; 2 * d as usize];
        for i in 0..d as usize {
            for j in 0..d as usize {
                prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p;
            }
        }
        pack(&poly_rem(&prod, &f.modulus, p), p)
    }

    fn naive_add(f: &ResidueField, a: Res, b: Res) -> Res {
        let ca = unpack(a, f.p, f.degree);
        let cb = unpack(b, f.p, f.degree);
        pack(&ca.iter().zip(&cb).map(|(x, y)| (x + y) % f.p).collect::<Vec<_>>(), f.p)
    }

    #[test]
    fn tables_match_brute_force_up_to_81() {
        for (p, d) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 4), (5, 1), (5, 2), (7, 2), (2, 6)] {
            let f = ResidueField::new(p, d).unwrap();
            assert!(f.size() <= 81);
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), naive_mul(&f, a, b), "mul p={p} d={d}");
                    assert_eq!(f.add(a, b), naive_add(&f, a, b), "add p={p} d={d}");
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn moduli_are_lexicographically_minimal() {
        assert_eq!(smallest_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(smallest_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(smallest_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(smallest_irreducible(5, 1), vec![0, 1]);
    }

    #[test]
    fn frobenius_is_an_automorphism_of_order_degree() {
        let f = ResidueField::new(3, 2).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.frobenius_p(f.mul(a, b), 1), f.mul(f.frobenius_p(a, 1), f.frobenius_p(b, 1)));
                assert_eq!(f.frobenius_p(f.add(a, b), 1), f.add(f.frobenius_p(a, 1), f.frobenius_p(b, 1)));
            }
            assert_eq!(f.frobenius_p(a, 2), a);
            assert_eq!(f.frobenius_p(f.frobenius_p(a, 1), -1), a);
        }
    }

    #[test]
    fn oversized_field_rejected() {
        assert!(ResidueField::new(2, 17).is_err());
    }
}
