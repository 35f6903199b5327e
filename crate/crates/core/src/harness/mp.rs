//! Multiprecision complex numbers for the numerical oracle. Binary floats
//! with a 2048-bit significand and an unbounded exponent, so neither deep
//! cancellation nor tiny magnitudes like `t^100` at `t = 1e-4` are a problem.

use dashu_float::FBig;
use dashu_int::ops::{BitTest, UnsignedAbs};
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::symcore::Scalar;

pub const PRECISION: usize = 2048;

type Real = FBig;

fn fix(x: Real) -> Real {
    x.with_precision(PRECISION).value()
}

fn real(x: f64) -> Real {
    fix(Real::try_from(x).expect("finite input"))
}

fn from_bigint(n: &BigInt) -> Real {
    let (sign, bytes) = n.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    fix(Real::from(if sign == Sign::Minus { -mag } else { mag }))
}

fn from_ratio(r: &BigRational) -> Real {
    if r.is_zero() {
        return real(0.0);
    }
    from_bigint(r.numer()) / from_bigint(r.denom())
}

/// `log2 |x|`, `-inf` for zero.
fn log2_abs(x: &Real) -> f64 {
    let r = x.repr();
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let sig = r.significand().clone().unsigned_abs();
    let drop = sig.bit_len().saturating_sub(64);
    let top = (sig >> drop).to_f64().value();
    top.log2() + (drop as isize + r.exponent()) as f64
}

/// `x * 2^k`.
fn shift(x: &Real, k: isize) -> Real {
    fix(x * Real::from_parts(IBig::from(1u8), k))
}

#[derive(Clone, Debug)]
pub struct Mpc {
    re: Real,
    im: Real,
}

impl Mpc {
    pub fn zero() -> Self {
        Mpc { re: real(0.0), im: real(0.0) }
    }

    pub fn one() -> Self {
        Mpc { re: real(1.0), im: real(0.0) }
    }

    pub fn from_c64(z: Complex64) -> Self {
        Mpc { re: real(z.re), im: real(z.im) }
    }

    pub fn from_scalar(s: &Scalar) -> Self {
        match s {
            Scalar::Exact { re, im } => Mpc { re: from_ratio(re), im: from_ratio(im) },
            Scalar::Float { z, .. } => Mpc::from_c64(*z),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.repr().is_zero() && self.im.repr().is_zero()
    }

    pub fn add(&self, o: &Mpc) -> Mpc {
        Mpc { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Mpc) -> Mpc {
        Mpc { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> Mpc {
        Mpc { re: -&self.re, im: -&self.im }
    }

    pub fn mul(&self, o: &Mpc) -> Mpc {
        Mpc { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    pub fn div(&self, o: &Mpc) -> Mpc {
        let d = &o.re * &o.re + &o.im * &o.im;
        let p = self.mul(&Mpc { re: o.re.clone(), im: -&o.im });
        Mpc { re: &p.re / &d, im: &p.im / &d }
    }

    pub fn scale(&self, x: f64) -> Mpc {
        let x = real(x);
        Mpc { re: &self.re * &x, im: &self.im * &x }
    }

    pub fn powu(&self, mut k: u32) -> Mpc {
        let mut base = self.clone();
        let mut acc = Mpc::one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `log2 |z|`, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        let n = &self.re * &self.re + &self.im * &self.im;
        0.5 * log2_abs(&n)
    }

    /// `z * 2^k`.
    pub fn shift(&self, k: isize) -> Mpc {
        Mpc { re: shift(&self.re, k), im: shift(&self.im, k) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    /// `exp(2 pi i index / order)` by Newton steps on `z^order = 1`.
    pub fn root_of_unity(order: u32, index: u32) -> Mpc {
        let mut z = Mpc::from_c64(Scalar::root_of_unity(order, index).to_c64());
        if matches!(order, 1 | 2 | 4) {
            return z;
        }
        for _ in 0..7 {
            let zn1 = z.powu(order - 1);
            let step = zn1.mul(&z).sub(&Mpc::one()).div(&zn1.scale(order as f64));
            z = z.sub(&step);
        }
        z
    }
}

/// `log2` of the Euclidean norm of a vector.
pub fn log2_norm(v: &[Mpc]) -> f64 {
    let top = v.iter().map(Mpc::log2_abs).fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    let k = top.floor() as isize;
    let s: f64 = v.iter().map(|z| z.shift(-k).to_c64().norm_sqr()).sum();
    k as f64 + 0.5 * s.log2()
}

/// The vector rescaled so that its largest entry has modulus near one,
/// converted to machine precision.
pub fn direction(v: &[Mpc]) -> Vec<Complex64> {
    let top = v.iter().map(Mpc::log2_abs).fold(f64::NEG_INFINITY, f64::max);
    let k = if top.is_finite() { top.floor() as isize } else { 0 };
    v.iter().map(|z| z.shift(-k).to_c64()).collect()
}
