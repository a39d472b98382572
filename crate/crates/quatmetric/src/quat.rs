//! Quaternion scalar arithmetic over the basis {1, i, j, k}.
//!
//! The crate works over a *right* quaternionic module: vectors carry scalars
//! on the right, operators act on the left. At this level that only fixes
//! naming; the Hamilton product itself is the usual non-commutative one,
//! with ij = k, jk = i, ki = j.
//!
//! Every quaternion splits as q = a + b·j with complex a, b (the symplectic
//! split). The split is a reindexing of the four real components, so
//! `join(split(q)) == q` holds bit-exactly.

use num_complex::Complex64;
use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Modulus below which a quaternion is treated as a zero divisor on inversion.
const INVERT_FLOOR: f64 = 1e-300;

/// q = w + x·i + y·j + z·k, components stored as four f64.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Embed a complex number into the span of {1, i}.
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse, conj(q)/|q|².
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.sqrt() < INVERT_FLOOR {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Symplectic split q = a + b·j with a = w + x·i, b = y + z·i.
    ///
    /// The j factor sits on the *right* of b, so that b·j = y·j + z·k.
    pub fn split(self) -> (Complex64, Complex64) {
        (
            Complex64::new(self.w, self.x),
            Complex64::new(self.y, self.z),
        )
    }

    /// Inverse of [`split`](Self::split); pure reindexing, no rounding.
    pub fn join(a: Complex64, b: Complex64) -> Self {
        Self::new(a.re, a.im, b.re, b.im)
    }

    /// True when the j and k components are negligible against `tol`.
    pub fn is_complex(self, tol: f64) -> bool {
        self.y.abs() <= tol && self.z.abs() <= tol
    }

    /// The complex part w + x·i, discarding j and k components.
    pub fn complex_part(self) -> Complex64 {
        Complex64::new(self.w, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w + rhs.w,
            self.x + rhs.x,
            self.y + rhs.y,
            self.z + rhs.z,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, rhs: Quaternion) {
        *self = *self + rhs;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w - rhs.w,
            self.x - rhs.x,
            self.y - rhs.y,
            self.z - rhs.z,
        )
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, rhs: Quaternion) {
        *self = *self - rhs;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

// JSON wire format: [w, x, y, z].
impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&self.w)?;
        seq.serialize_element(&self.x)?;
        seq.serialize_element(&self.y)?;
        seq.serialize_element(&self.z)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct QuatVisitor;
        impl<'de> Visitor<'de> for QuatVisitor {
            type Value = Quaternion;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array [w, x, y, z] of four finite numbers")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Quaternion, A::Error> {
                let mut c = [0.0f64; 4];
                for (idx, slot) in c.iter_mut().enumerate() {
                    *slot = seq
                        .next_element()?
                        .ok_or_else(|| de::Error::invalid_length(idx, &self))?;
                }
                if seq.next_element::<f64>()?.is_some() {
                    return Err(de::Error::invalid_length(5, &self));
                }
                let q = Quaternion::new(c[0], c[1], c[2], c[3]);
                if !q.is_finite() {
                    return Err(de::Error::custom("non-finite quaternion component"));
                }
                Ok(q)
            }
        }
        deserializer.deserialize_seq(QuatVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        let m1 = -Quaternion::ONE;
        assert_eq!(i * i, m1);
        assert_eq!(j * j, m1);
        assert_eq!(k * k, m1);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        // anticommutation of distinct imaginary units
        assert_eq!(i * j, -(j * i));
        assert_eq!(j * k, -(k * j));
        assert_eq!(k * i, -(i * k));
    }

    #[test]
    fn mul_identity() {
        let v = q(1.0, 2.0, 3.0, 4.0);
        assert_eq!(v * Quaternion::ONE, v);
        assert_eq!(Quaternion::ONE * v, v);
    }

    #[test]
    fn jz_squared_is_minus_norm_sqr() {
        // (j·z)·(j·z) = -|z|² for complex z = 3+4i
        let jz = Quaternion::J * q(3.0, 4.0, 0.0, 0.0);
        let r = jz * jz;
        assert!((r - Quaternion::real(-25.0)).norm() < 1e-14);
    }

    #[test]
    fn conjugation() {
        assert_eq!(q(1.0, 2.0, 3.0, 4.0).conj(), q(1.0, -2.0, -3.0, -4.0));
        assert_eq!(Quaternion::real(5.0).conj(), Quaternion::real(5.0));
        // conj(j·z) = -j·z for complex z: purely imaginary quaternion
        let jz = Quaternion::J * q(2.0, -1.0, 0.0, 0.0);
        assert_eq!(jz.conj(), -jz);
        assert_eq!(jz.w, 0.0);
    }

    #[test]
    fn inverses() {
        assert_eq!(Quaternion::I.inverse().unwrap(), -Quaternion::I);
        assert_eq!(Quaternion::real(2.0).inverse().unwrap(), Quaternion::real(0.5));
        // inverse(1+j) = (1-j)/2
        let inv = q(1.0, 0.0, 1.0, 0.0).inverse().unwrap();
        assert!((inv - q(0.5, 0.0, -0.5, 0.0)).norm() < 1e-15);
        // q·q⁻¹ = 1
        let v = q(0.3, -1.2, 0.7, 2.5);
        assert!((v * v.inverse().unwrap() - Quaternion::ONE).norm() < 1e-14);
        assert!(matches!(Quaternion::ZERO.inverse(), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn split_join_convention() {
        let v = q(1.0, 2.0, 3.0, 4.0);
        let (a, b) = v.split();
        assert_eq!(a, Complex64::new(1.0, 2.0));
        assert_eq!(b, Complex64::new(3.0, 4.0));
        assert_eq!(
            Quaternion::join(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            Quaternion::J
        );
    }

    #[test]
    fn right_mul_by_i_in_split_coords() {
        // For q = a + b·j: q·i = a·i - (b·i)·j, exercising j·i = -k.
        let v = q(1.0, 2.0, 3.0, 4.0);
        let (a, b) = v.split();
        let (a2, b2) = (v * Quaternion::I).split();
        let i = Complex64::new(0.0, 1.0);
        assert_eq!(a2, a * i);
        assert_eq!(b2, -(b * i));
    }

    #[test]
    fn json_round_trip() {
        let v = q(1.5, -2.0, 0.25, 1e-8);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.5,-2.0,0.25,1e-8]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<Quaternion>("[1,2,3]").is_err());
        assert!(serde_json::from_str::<Quaternion>("[1,2,3,4,5]").is_err());
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        let c = -10.0f64..10.0;
        (c.clone(), c.clone(), c.clone(), c).prop_map(|(w, x, y, z)| q(w, x, y, z))
    }

    proptest! {
        #[test]
        fn modulus_multiplicative(p in arb_quat(), r in arb_quat()) {
            let lhs = (p * r).norm();
            let rhs = p.norm() * r.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn associative(p in arb_quat(), r in arb_quat(), s in arb_quat()) {
            let lhs = (p * r) * s;
            let rhs = p * (r * s);
            let scale = p.norm() * r.norm() * s.norm();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + scale));
        }

        #[test]
        fn conj_antihomomorphism(p in arb_quat(), r in arb_quat()) {
            let lhs = (p * r).conj();
            let rhs = r.conj() * p.conj();
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + p.norm() * r.norm()));
        }

        #[test]
        fn conj_involutive(p in arb_quat()) {
            prop_assert_eq!(p.conj().conj(), p);
        }

        #[test]
        fn split_join_bit_exact(p in arb_quat()) {
            let (a, b) = p.split();
            prop_assert_eq!(Quaternion::join(a, b), p);
        }

        #[test]
        fn pure_imaginary_iff_conj_negates(p in arb_quat()) {
            let pure = Quaternion::new(0.0, p.x, p.y, p.z);
            prop_assert_eq!(pure.conj(), -pure);
        }
    }
}
