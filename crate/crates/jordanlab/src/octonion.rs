//! Complex octonions over the basis e0..e7 (e0 the unit).

use crate::numerics::{C64, ZERO};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// `TABLE[i][j] = (sign, k)` means `e_i e_j = sign · e_k`.
///
/// Frozen from a Cayley–Dickson doubling of the quaternions,
/// `(a, b)(c, d) = (ac − d̄b, da + bc̄)` with `e_{4+m} = (0, e_m)`.
pub const TABLE: [[(i8, u8); 8]; 8] = [
    [(1, 0), (1, 1), (1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)],
    [(1, 1), (-1, 0), (1, 3), (-1, 2), (1, 5), (-1, 4), (-1, 7), (1, 6)],
    [(1, 2), (-1, 3), (-1, 0), (1, 1), (1, 6), (1, 7), (-1, 4), (-1, 5)],
    [(1, 3), (1, 2), (-1, 1), (-1, 0), (1, 7), (-1, 6), (1, 5), (-1, 4)],
    [(1, 4), (-1, 5), (-1, 6), (-1, 7), (-1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 5), (1, 4), (-1, 7), (1, 6), (-1, 1), (-1, 0), (-1, 3), (1, 2)],
    [(1, 6), (1, 7), (1, 4), (-1, 5), (-1, 2), (1, 3), (-1, 0), (-1, 1)],
    [(1, 7), (-1, 6), (1, 5), (1, 4), (-1, 3), (-1, 2), (1, 1), (-1, 0)],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Octonion {
    pub coeffs: [C64; 8],
}

impl Octonion {
    pub fn zero() -> Self {
        Octonion { coeffs: [ZERO; 8] }
    }

    pub fn basis(k: usize) -> Self {
        let mut o = Self::zero();
        o.coeffs[k] = C64::new(1.0, 0.0);
        o
    }

    pub fn scalar(z: C64) -> Self {
        let mut o = Self::zero();
        o.coeffs[0] = z;
        o
    }

    pub fn scale(&self, z: C64) -> Self {
        Octonion { coeffs: self.coeffs.map(|c| c * z) }
    }

    /// Complex-bilinear quadratic form Σ coeffs².
    pub fn norm_form(&self) -> C64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

pub fn oct_mul(a: &Octonion, b: &Octonion) -> Octonion {
    let mut out = [ZERO; 8];
    for (i, ai) in a.coeffs.iter().enumerate() {
        if *ai == ZERO {
            continue;
        }
        for (j, bj) in b.coeffs.iter().enumerate() {
            let (sign, k) = TABLE[i][j];
            out[k as usize] += ai * bj * f64::from(sign);
        }
    }
    Octonion { coeffs: out }
}

/// Negates e1..e7; complex coefficients are not conjugated.
pub fn oct_conj(a: &Octonion) -> Octonion {
    let mut c = a.coeffs.map(|z| -z);
    c[0] = a.coeffs[0];
    Octonion { coeffs: c }
}

/// The multiplication table keyed `"i,j"` → `[sign, k]`.
pub fn oct_table_dump() -> BTreeMap<String, [i64; 2]> {
    let mut m = BTreeMap::new();
    for (i, row) in TABLE.iter().enumerate() {
        for (j, (sign, k)) in row.iter().enumerate() {
            m.insert(format!("{i},{j}"), [i64::from(*sign), i64::from(*k)]);
        }
    }
    m
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, o: Octonion) -> Octonion {
        let mut c = self.coeffs;
        for (x, y) in c.iter_mut().zip(o.coeffs) {
            *x += y;
        }
        Octonion { coeffs: c }
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, o: Octonion) -> Octonion {
        self + (-o)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion { coeffs: self.coeffs.map(|z| -z) }
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, o: Octonion) -> Octonion {
        oct_mul(&self, &o)
    }
}

impl Serialize for Octonion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(8))?;
        for c in &self.coeffs {
            seq.serialize_element(&[c.re, c.im])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Octonion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = <[[f64; 2]; 8]>::deserialize(d)?;
        let mut o = Octonion::zero();
        for (c, p) in o.coeffs.iter_mut().zip(pairs) {
            *c = crate::numerics::complex(p[0], p[1]).map_err(serde::de::Error::custom)?;
        }
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{derive_seed, random_scalar, rng_from_seed};

    fn random_oct(seed: u64) -> Octonion {
        let mut rng = rng_from_seed(seed);
        let mut o = Octonion::zero();
        for c in o.coeffs.iter_mut() {
            *c = random_scalar(&mut rng, 1.0);
        }
        o
    }

    // Independent oracle: quaternions as [w, x, y, z] with ij = k, doubled once.
    fn quat_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    fn quat_conj(a: [f64; 4]) -> [f64; 4] {
        [a[0], -a[1], -a[2], -a[3]]
    }

    fn cayley_dickson(x: [f64; 8], y: [f64; 8]) -> [f64; 8] {
        let a = [x[0], x[1], x[2], x[3]];
        let b = [x[4], x[5], x[6], x[7]];
        let c = [y[0], y[1], y[2], y[3]];
        let d = [y[4], y[5], y[6], y[7]];
        let ac = quat_mul(a, c);
        let db = quat_mul(quat_conj(d), b);
        let da = quat_mul(d, a);
        let bc = quat_mul(b, quat_conj(c));
        let mut out = [0.0; 8];
        for k in 0..4 {
            out[k] = ac[k] - db[k];
            out[4 + k] = da[k] + bc[k];
        }
        out
    }

    #[test]
    fn table_matches_cayley_dickson_oracle() {
        for i in 0..8 {
            for j in 0..8 {
                let mut x = [0.0; 8];
                let mut y = [0.0; 8];
                x[i] = 1.0;
                y[j] = 1.0;
                let want = cayley_dickson(x, y);
                let got = oct_mul(&Octonion::basis(i), &Octonion::basis(j));
                for (k, (g, w)) in got.coeffs.iter().zip(want).enumerate() {
                    assert_eq!(g.re, w, "e{i} e{j} coefficient {k}");
                    assert_eq!(g.im, 0.0);
                }
            }
        }
    }

    #[test]
    fn named_products() {
        let e = Octonion::basis;
        assert_eq!(e(1) * e(1), -e(0));
        assert_eq!(e(1) * e(2), e(3));
        assert_eq!(e(2) * e(1), -e(3));
        assert_eq!(e(1) * e(4), e(5));
        assert_eq!(e(2) * e(4), e(6));
        assert_eq!(e(3) * e(4), e(7));
    }

    #[test]
    fn unit_is_two_sided() {
        for s in 0..50 {
            let x = random_oct(derive_seed(1, s));
            assert_eq!(Octonion::basis(0) * x, x);
            assert_eq!(x * Octonion::basis(0), x);
        }
    }

    #[test]
    fn conjugation() {
        assert_eq!(oct_conj(&Octonion::basis(0)), Octonion::basis(0));
        assert_eq!(oct_conj(&Octonion::basis(5)), -Octonion::basis(5));
        let x = random_oct(3);
        assert_eq!(oct_conj(&oct_conj(&x)), x);
    }

    #[test]
    fn table_dump_shape() {
        let t = oct_table_dump();
        assert_eq!(t.len(), 64);
        for k in 0..8 {
            assert_eq!(t[&format!("0,{k}")], [1, k as i64]);
        }
        assert_eq!(t["1,1"], [-1, 0]);
        for i in 1..8 {
            for j in 1..8 {
                if i != j {
                    let a = t[&format!("{i},{j}")];
                    let b = t[&format!("{j},{i}")];
                    assert_eq!(a[1], b[1]);
                    assert_eq!(a[0], -b[0]);
                }
            }
        }
    }

    #[test]
    fn alternative_and_composition_laws() {
        for s in 0..500 {
            let a = random_oct(derive_seed(7, 2 * s));
            let b = random_oct(derive_seed(7, 2 * s + 1));
            assert!(((a * a) * b - a * (a * b)).max_abs() <= 1e-9);
            assert!(((a * b) * b - a * (b * b)).max_abs() <= 1e-9);
            assert!((oct_conj(&(a * b)) - oct_conj(&b) * oct_conj(&a)).max_abs() <= 1e-9);
            assert!((a * oct_conj(&a) - Octonion::scalar(a.norm_form())).max_abs() <= 1e-9);
        }
    }

    #[test]
    fn not_associative() {
        let e = Octonion::basis;
        assert_ne!((e(1) * e(2)) * e(4), e(1) * (e(2) * e(4)));
    }

    #[test]
    fn serde_roundtrip() {
        let x = random_oct(9);
        let text = serde_json::to_string(&x).unwrap();
        let back: Octonion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
