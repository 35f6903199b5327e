//! Complex scalars that stay exact (Gaussian rationals) until something
//! irrational enters, after which they become floats carrying a running
//! magnitude used to decide when a cancellation has produced zero.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Roots;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Relative tolerance below which a float scalar counts as zero.
pub const TAU_ZERO: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact { re: BigRational, im: BigRational },
    /// `scale` bounds the magnitude of everything that was summed into `z`.
    Float { z: Complex64, scale: f64 },
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact { re: rat(n, 1), im: BigRational::zero() }
    }

    /// Panics if `den == 0`.
    pub fn rational(num: i64, den: i64) -> Self {
        Scalar::Exact { re: rat(num, den), im: BigRational::zero() }
    }

    pub fn from_ratio(r: Rational64) -> Self {
        Self::rational(*r.numer(), *r.denom())
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact { re, im }
    }

    pub fn i() -> Self {
        Scalar::Exact { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn float(re: f64, im: f64) -> Self {
        Self::from_c64(Complex64::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Float { z, scale: z.norm() }
    }

    /// `sqrt(n)`, exact when `n` is a perfect square.
    pub fn sqrt_uint(n: u64) -> Self {
        let r = n.sqrt();
        if r * r == n {
            Self::from_int(r as i64)
        } else {
            Self::float((n as f64).sqrt(), 0.0)
        }
    }

    /// `exp(2 pi i index / order)`, exact for the quarter turns `1, i, -1, -i`
    /// and a float scalar otherwise. Arithmetic questions about roots of
    /// unity are answered on `(order, index)`, not on this value.
    pub fn root_of_unity(order: u32, index: u32) -> Self {
        assert!(order > 0, "root of unity of order 0");
        let k = index % order;
        if (4 * k).is_multiple_of(order) {
            return match (4 * k / order) % 4 {
                0 => Scalar::one(),
                1 => Scalar::i(),
                2 => Scalar::from_int(-1),
                _ => -&Scalar::i(),
            };
        }
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (order as f64);
        Scalar::Float { z: Complex64::new(theta.cos(), theta.sin()), scale: 1.0 }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact { .. })
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact { re, im } => Complex64::new(rat_to_f64(re), rat_to_f64(im)),
            Scalar::Float { z, .. } => *z,
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Reference magnitude for the zero test.
    pub fn scale(&self) -> f64 {
        match self {
            Scalar::Exact { .. } => self.abs(),
            Scalar::Float { scale, .. } => *scale,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_zero() && im.is_zero(),
            Scalar::Float { .. } => false,
        }
    }

    /// Exact test for exact scalars; for floats `|z| <= TAU_ZERO * scale`
    /// using the tracked magnitude.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact { .. } => self.is_exact_zero(),
            Scalar::Float { z, scale } => z.norm() <= TAU_ZERO * scale,
        }
    }

    /// Zero test against a caller-supplied reference magnitude.
    pub fn is_zero_rel(&self, scale: f64) -> bool {
        match self {
            Scalar::Exact { .. } => self.is_exact_zero(),
            Scalar::Float { z, .. } => z.norm() <= TAU_ZERO * scale,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => re.is_one() && im.is_zero(),
            Scalar::Float { z, .. } => *z == Complex64::new(1.0, 0.0),
        }
    }

    /// Real exact part, when the scalar is an exact rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact { re, im } if im.is_zero() => Some(re),
            _ => None,
        }
    }

    /// `|z|^2` exactly, for exact scalars.
    pub fn norm_sqr_exact(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact { re, im } => Some(re * re + im * im),
            Scalar::Float { .. } => None,
        }
    }

    pub fn to_float(&self) -> Self {
        match self {
            Scalar::Exact { .. } => Self::from_c64(self.to_c64()),
            f => f.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: re.clone(), im: -im },
            Scalar::Float { z, scale } => Scalar::Float { z: z.conj(), scale: *scale },
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Principal-branch power with a rational exponent.
    pub fn powr(&self, alpha: Rational64) -> Self {
        if alpha.is_integer() {
            let k = *alpha.numer();
            return if k >= 0 {
                self.pow(k as u32)
            } else {
                self.inv().expect("negative power of zero").pow((-k) as u32)
            };
        }
        if self.is_exact() && self.is_one() {
            return Scalar::one();
        }
        let z = self.to_c64();
        let a = *alpha.numer() as f64 / *alpha.denom() as f64;
        let w = if z.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { (z.ln() * a).exp() };
        Scalar::Float { z: w, scale: w.norm() * (self.scale() / z.norm().max(f64::MIN_POSITIVE)).powf(a.abs()) }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        match self {
            Scalar::Exact { re, im } => {
                let n = re * re + im * im;
                if n.is_zero() {
                    None
                } else {
                    Some(Scalar::Exact { re: re / &n, im: -(im / &n) })
                }
            }
            Scalar::Float { z, scale } => {
                let m = z.norm();
                if m == 0.0 {
                    None
                } else {
                    Some(Scalar::Float { z: z.inv(), scale: scale / (m * m) })
                }
            }
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// Compares moduli; exact when both are exact.
    pub fn cmp_abs(&self, other: &Scalar) -> Ordering {
        match (self.norm_sqr_exact(), other.norm_sqr_exact()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.abs().partial_cmp(&other.abs()).unwrap_or(Ordering::Equal),
        }
    }

    fn float_parts(&self) -> (Complex64, f64) {
        match self {
            Scalar::Exact { .. } => {
                let z = self.to_c64();
                (z, z.norm())
            }
            Scalar::Float { z, scale } => (*z, *scale),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => a == c && b == d,
            _ => self.to_c64() == other.to_c64(),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::from_c64(z)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                Scalar::Exact { re: a + c, im: b + d }
            }
            _ => {
                let (x, sx) = self.float_parts();
                let (y, sy) = rhs.float_parts();
                Scalar::Float { z: x + y, scale: sx + sy }
            }
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                Scalar::Exact { re: a - c, im: b - d }
            }
            _ => {
                let (x, sx) = self.float_parts();
                let (y, sy) = rhs.float_parts();
                Scalar::Float { z: x - y, scale: sx + sy }
            }
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact { re: a, im: b }, Scalar::Exact { re: c, im: d }) => {
                Scalar::Exact { re: a * c - b * d, im: a * d + b * c }
            }
            _ => {
                let (x, sx) = self.float_parts();
                let (y, sy) = rhs.float_parts();
                Scalar::Float { z: x * y, scale: sx * sy }
            }
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    /// Panics on division by an exact zero or a float exactly equal to zero.
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact { re, im } => Scalar::Exact { re: -re, im: -im },
            Scalar::Float { z, scale } => Scalar::Float { z: -z, scale: *scale },
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

fn fmt_f64(x: f64) -> String {
    let s = format!("{}", x);
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

impl Scalar {
    /// True when the printed form needs parentheses to be used as a factor.
    pub(crate) fn is_compound(&self) -> bool {
        match self {
            Scalar::Exact { re, im } => !re.is_zero() && !im.is_zero(),
            Scalar::Float { z, .. } => z.re != 0.0 && z.im != 0.0,
        }
    }

    /// True when the printed form starts with a minus sign and is a single
    /// (real or imaginary) part.
    pub(crate) fn is_negative_simple(&self) -> bool {
        if self.is_compound() {
            return false;
        }
        match self {
            Scalar::Exact { re, im } => re.is_negative() || (re.is_zero() && im.is_negative()),
            Scalar::Float { z, .. } => z.re < 0.0 || (z.re == 0.0 && z.im < 0.0),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact { re, im } => {
                let imag = |im: &BigRational| -> String {
                    if im.is_one() {
                        "i".to_string()
                    } else if (-im).is_one() {
                        "-i".to_string()
                    } else {
                        format!("{im}*i")
                    }
                };
                match (re.is_zero(), im.is_zero()) {
                    (_, true) => write!(f, "{re}"),
                    (true, false) => write!(f, "{}", imag(im)),
                    (false, false) => {
                        if im.is_negative() {
                            write!(f, "{re}-{}", imag(&-im))
                        } else {
                            write!(f, "{re}+{}", imag(im))
                        }
                    }
                }
            }
            Scalar::Float { z, .. } => match (z.re == 0.0, z.im == 0.0) {
                (_, true) => write!(f, "{}", fmt_f64(z.re)),
                (true, false) => write!(f, "{}*i", fmt_f64(z.im)),
                (false, false) => {
                    if z.im < 0.0 {
                        write!(f, "{}-{}*i", fmt_f64(z.re), fmt_f64(-z.im))
                    } else {
                        write!(f, "{}+{}*i", fmt_f64(z.re), fmt_f64(z.im))
                    }
                }
            },
        }
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        super::parse::parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::rational(1, 2);
        let b = Scalar::gaussian(rat(1, 3), rat(2, 1));
        let c = &(&a * &b) + &a;
        assert!(c.is_exact());
        assert_eq!(c, Scalar::gaussian(rat(2, 3), rat(1, 1)));
        assert_eq!(&(&b / &b), &Scalar::one());
    }

    #[test]
    fn float_contaminates() {
        let a = Scalar::rational(1, 2);
        let s8 = Scalar::sqrt_uint(8);
        assert!(!s8.is_exact());
        assert!(!(&a * &s8).is_exact());
        assert!(Scalar::sqrt_uint(9).is_exact());
    }

    #[test]
    fn cancellation_is_zero_relative_to_scale() {
        let s8 = Scalar::sqrt_uint(8);
        let sq = &(&s8 * &s8) - &Scalar::from_int(8);
        assert!(sq.is_zero());
        let tiny = Scalar::float(1e-14, 0.0);
        assert!(!tiny.is_zero());
        assert!(tiny.is_zero_rel(1.0));
    }

    #[test]
    fn roots_of_unity() {
        let c = Scalar::root_of_unity(3, 1);
        let one = &c.pow(3) - &Scalar::one();
        assert!(one.is_zero());
        assert_eq!(Scalar::root_of_unity(2, 1).to_c64(), Complex64::new(-1.0, 0.0));
        assert_eq!(Scalar::root_of_unity(4, 3).to_c64(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::rational(-3, 2).to_string(), "-3/2");
        assert_eq!(Scalar::i().to_string(), "i");
        assert_eq!(Scalar::gaussian(rat(1, 1), rat(-2, 1)).to_string(), "1-2*i");
        assert_eq!(Scalar::float(2.0, 0.0).to_string(), "2.0");
        assert_eq!(Scalar::float(0.0, -1.5).to_string(), "-1.5*i");
    }
}
