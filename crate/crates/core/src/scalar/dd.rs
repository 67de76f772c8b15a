//! Double-double arithmetic: an unevaluated sum `hi + lo` of two `f64`
//! values, giving roughly 106 bits of significand.
//!
//! Exceptional points are where eigenvalues have infinite condition number:
//! an `n`-fold coalescence amplifies a relative perturbation `u` in the
//! matrix to `u^(1/n)` in the eigenvalues. In `f64` a triple point is only
//! resolvable to about `1e-5` relative; in double-double to about `1e-11`.
//!
//! Algorithms follow the classic error-free transformations (Dekker, Knuth)
//! and the QD library's reductions for the elementary functions.

use std::f64::consts;
use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::num::FpCategory;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumCast, One, ToPrimitive, Zero};

/// A double-double floating point number.
#[derive(Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

const PI_DD: DoubleDouble = DoubleDouble::from_parts(consts::PI, 1.2246467991473532e-16);
const E_DD: DoubleDouble = DoubleDouble::from_parts(consts::E, 1.4456468917292502e-16);
const LN_2_DD: DoubleDouble = DoubleDouble::from_parts(consts::LN_2, 2.3190468138462996e-17);
const LN_10_DD: DoubleDouble = DoubleDouble::from_parts(consts::LN_10, -2.1707562233822494e-16);
const SQRT_2_DD: DoubleDouble = DoubleDouble::from_parts(consts::SQRT_2, -9.667293313452913e-17);

/// 2^-104, the spacing of double-double numbers near one.
const EPS: f64 = 4.930380657631324e-32;

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    /// Builds a value from an already normalized pair (`|lo| <= ulp(hi)/2`).
    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    /// Exact conversion from `f64`.
    pub const fn new(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    pub fn from_sum(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, b);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let p2 = p2 + self.lo * b;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }

    /// Exact multiplication by a power of two.
    fn ldexp(self, k: i32) -> Self {
        let mut out = self;
        let mut k = k;
        // f64::powi(2.0, k) is exact only while the factor itself is normal.
        while k != 0 {
            let step = k.clamp(-1000, 1000);
            let f = 2f64.powi(step);
            out = Self { hi: out.hi * f, lo: out.lo * f };
            k -= step;
        }
        out
    }

    fn square(self) -> Self {
        let (p1, p2) = two_prod(self.hi, self.hi);
        let p2 = p2 + 2.0 * self.hi * self.lo;
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }

    fn nint(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            // hi is already an integer, round lo
            let lo = self.lo.round();
            let (hi, lo) = quick_two_sum(hi, lo);
            Self { hi, lo }
        } else {
            let lo = if (hi - self.hi).abs() == 0.5 && self.lo < 0.0 { hi - 1.0 } else { hi };
            Self { hi: lo, lo: 0.0 }
        }
    }

    /// Taylor series for sin and cos on |x| <= pi/4.
    fn sin_cos_taylor(x: Self) -> (Self, Self) {
        if x.is_zero() {
            return (Self::ZERO, Self::ONE);
        }
        let x2 = x.square();
        let mut term = x;
        let mut sin = x;
        let mut n = 1.0;
        loop {
            term = -(term * x2) / Self::new((n + 1.0) * (n + 2.0));
            n += 2.0;
            sin += term;
            if term.hi.abs() <= EPS * 1e-2 * sin.hi.abs() {
                break;
            }
        }
        let mut term = Self::ONE;
        let mut cos = Self::ONE;
        let mut n = 0.0;
        loop {
            term = -(term * x2) / Self::new((n + 1.0) * (n + 2.0));
            n += 2.0;
            cos += term;
            if term.hi.abs() <= EPS * 1e-2 {
                break;
            }
        }
        (sin, cos)
    }

    fn sin_cos_impl(self) -> (Self, Self) {
        if !self.hi.is_finite() {
            return (Self::nan(), Self::nan());
        }
        let two_pi = PI_DD.ldexp(1);
        let z = (self / two_pi).nint();
        let r = self - two_pi * z;
        let half_pi = PI_DD.ldexp(-1);
        let j = (r / half_pi).nint();
        let t = r - half_pi * j;
        let (s, c) = Self::sin_cos_taylor(t);
        match (j.hi as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    /// exp(x) - 1 on a small argument, by Taylor series.
    fn expm1_taylor(x: Self) -> Self {
        let mut term = x;
        let mut sum = x;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * x / Self::new(n);
            sum += term;
            if term.hi.abs() <= EPS * 1e-2 * sum.hi.abs() || n > 60.0 {
                break;
            }
        }
        sum
    }

    fn exp_impl(self) -> Self {
        if self.hi > 709.8 {
            return Self::infinity();
        }
        if self.hi < -745.2 {
            return Self::ZERO;
        }
        if self.is_zero() {
            return Self::ONE;
        }
        let k = (self / LN_2_DD).nint();
        let r = self - LN_2_DD * k;
        // exp(r) = (1 + s)^(2^9) with s = expm1(r / 512)
        let mut s = Self::expm1_taylor(r.ldexp(-9));
        for _ in 0..9 {
            s = s.ldexp(1) + s.square();
        }
        (s + Self::ONE).ldexp(k.hi as i32)
    }

    fn ln_impl(self) -> Self {
        if self.hi < 0.0 || self.is_nan() {
            return Self::nan();
        }
        if self.is_zero() {
            return Self::neg_infinity();
        }
        if self.hi.is_infinite() {
            return Self::infinity();
        }
        // Newton on exp(x) = a, quadratically convergent from the f64 guess.
        let mut x = Self::new(self.hi.ln());
        for _ in 0..2 {
            x = x + self * (-x).exp_impl() - Self::ONE;
        }
        x
    }

    fn atan2_impl(y: Self, x: Self) -> Self {
        if x.is_zero() && y.is_zero() {
            return Self::ZERO;
        }
        if x.is_zero() {
            return if y.hi > 0.0 { PI_DD.ldexp(-1) } else { -PI_DD.ldexp(-1) };
        }
        if y.is_zero() {
            return if x.hi > 0.0 { Self::ZERO } else { PI_DD };
        }
        let r = (x.square() + y.square()).sqrt();
        let xx = x / r;
        let yy = y / r;
        let mut z = Self::new(y.hi.atan2(x.hi));
        for _ in 0..2 {
            let (s, c) = z.sin_cos_impl();
            if xx.hi.abs() > yy.hi.abs() {
                z += (yy - s) / c;
            } else {
                z -= (xx - c) / s;
            }
        }
        z
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let (neg, body) = match s.as_bytes().first()? {
            b'-' => (true, &s[1..]),
            b'+' => (false, &s[1..]),
            _ => (false, s),
        };
        match body.to_ascii_lowercase().as_str() {
            "inf" | "infinity" => {
                return Some(if neg { Self::neg_infinity() } else { Self::infinity() })
            }
            "nan" => return Some(Self::nan()),
            _ => {}
        }
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let mut acc = Self::ZERO;
        let mut frac_digits = 0i32;
        let mut seen_dot = false;
        let mut any = false;
        for ch in mantissa.chars() {
            match ch {
                '0'..='9' => {
                    acc = acc.mul_f64(10.0) + Self::new((ch as u8 - b'0') as f64);
                    if seen_dot {
                        frac_digits += 1;
                    }
                    any = true;
                }
                '.' if !seen_dot => seen_dot = true,
                _ => return None,
            }
        }
        if !any {
            return None;
        }
        let e = exponent - frac_digits;
        let scale = Self::new(10.0).powi(e.abs());
        let v = if e >= 0 { acc * scale } else { acc / scale };
        Some(if neg { -v } else { v })
    }
}

impl From<f64> for DoubleDouble {
    fn from(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }
}

impl From<f32> for DoubleDouble {
    fn from(v: f32) -> Self {
        Self { hi: v as f64, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.hi.is_finite() {
            return write!(f, "{}", self.hi);
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let digits = f.precision().unwrap_or(31).clamp(1, 32);
        let neg = self.hi < 0.0;
        let a = self.abs();
        let mut e = a.hi.log10().floor() as i32;
        let mut r = a / Self::new(10.0).powi(e);
        if r.hi >= 10.0 {
            r /= Self::new(10.0);
            e += 1;
        } else if r.hi < 1.0 {
            r = r.mul_f64(10.0);
            e -= 1;
        }
        let mut ds = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = r.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            r = (r - Self::new(d)).mul_f64(10.0);
        }
        // round half up on the guard digit
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut out = String::with_capacity(digits + 8);
        if neg {
            out.push('-');
        }
        out.push((b'0' + ds[0]) as char);
        if digits > 1 {
            out.push('.');
            for d in &ds[1..] {
                out.push((b'0' + d) as char);
            }
        }
        out.push_str(&format!("e{e}"));
        match f.width() {
            Some(w) => write!(f, "{out:>w$}"),
            None => f.write_str(&out),
        }
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        if !s1.is_finite() {
            return Self::new(s1);
        }
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        if !p1.is_finite() {
            return Self::new(p1);
        }
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        if !q1.is_finite() {
            return Self::new(q1);
        }
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Self { hi: q1, lo: q2 } + Self::new(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        self - b * (self / b).trunc()
    }
}

macro_rules! assign_ops {
    ($($tr:ident $m:ident $op:tt),*) => {$(
        impl $tr for DoubleDouble {
            fn $m(&mut self, rhs: Self) {
                *self = *self $op rhs;
            }
        }
    )*};
}
assign_ops!(AddAssign add_assign +, SubAssign sub_assign -, MulAssign mul_assign *, DivAssign div_assign /, RemAssign rem_assign %);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a DoubleDouble> for DoubleDouble {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + *b)
    }
}

impl Product for DoubleDouble {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ParseDoubleDoubleError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        if radix != 10 {
            return Err(ParseDoubleDoubleError);
        }
        s.parse()
    }
}

/// Returned when a string is not a decimal floating point literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("invalid double-double literal")]
pub struct ParseDoubleDoubleError;

impl FromStr for DoubleDouble {
    type Err = ParseDoubleDoubleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_decimal(s).ok_or(ParseDoubleDoubleError)
    }
}

impl ToPrimitive for DoubleDouble {
    fn to_i64(&self) -> Option<i64> {
        let t = self.trunc();
        let v = t.hi + t.lo;
        if v.is_finite() && v >= i64::MIN as f64 && v <= i64::MAX as f64 {
            Some(t.hi as i64 + t.lo as i64)
        } else {
            None
        }
    }
    fn to_u64(&self) -> Option<u64> {
        let t = self.trunc();
        if t.hi >= 0.0 && t.hi <= u64::MAX as f64 {
            Some((t.hi as i128 + t.lo as i128) as u64)
        } else {
            None
        }
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi + self.lo)
    }
}

impl FromPrimitive for DoubleDouble {
    fn from_i64(n: i64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::from_sum(hi, lo))
    }
    fn from_u64(n: u64) -> Option<Self> {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        Some(Self::from_sum(hi, lo))
    }
    fn from_f64(n: f64) -> Option<Self> {
        Some(Self::new(n))
    }
}

impl NumCast for DoubleDouble {
    fn from<T: ToPrimitive>(n: T) -> Option<Self> {
        n.to_f64().map(Self::new)
    }
}

impl FloatConst for DoubleDouble {
    fn E() -> Self {
        E_DD
    }
    fn FRAC_1_PI() -> Self {
        Self::ONE / PI_DD
    }
    fn FRAC_1_SQRT_2() -> Self {
        SQRT_2_DD.ldexp(-1)
    }
    fn FRAC_2_PI() -> Self {
        Self::new(2.0) / PI_DD
    }
    fn FRAC_2_SQRT_PI() -> Self {
        Self::new(2.0) / PI_DD.sqrt()
    }
    fn FRAC_PI_2() -> Self {
        PI_DD.ldexp(-1)
    }
    fn FRAC_PI_3() -> Self {
        PI_DD / Self::new(3.0)
    }
    fn FRAC_PI_4() -> Self {
        PI_DD.ldexp(-2)
    }
    fn FRAC_PI_6() -> Self {
        PI_DD / Self::new(6.0)
    }
    fn FRAC_PI_8() -> Self {
        PI_DD.ldexp(-3)
    }
    fn LN_10() -> Self {
        LN_10_DD
    }
    fn LN_2() -> Self {
        LN_2_DD
    }
    fn LOG10_E() -> Self {
        Self::ONE / LN_10_DD
    }
    fn LOG2_E() -> Self {
        Self::ONE / LN_2_DD
    }
    fn PI() -> Self {
        PI_DD
    }
    fn SQRT_2() -> Self {
        SQRT_2_DD
    }
    fn TAU() -> Self {
        PI_DD.ldexp(1)
    }
    fn LOG10_2() -> Self {
        LN_2_DD / LN_10_DD
    }
    fn LOG2_10() -> Self {
        LN_10_DD / LN_2_DD
    }
}

impl Float for DoubleDouble {
    fn nan() -> Self {
        Self::new(f64::NAN)
    }
    fn infinity() -> Self {
        Self::new(f64::INFINITY)
    }
    fn neg_infinity() -> Self {
        Self::new(f64::NEG_INFINITY)
    }
    fn neg_zero() -> Self {
        Self::new(-0.0)
    }
    fn min_value() -> Self {
        Self::new(f64::MIN)
    }
    fn min_positive_value() -> Self {
        Self::new(f64::MIN_POSITIVE)
    }
    fn max_value() -> Self {
        Self::new(f64::MAX)
    }
    fn epsilon() -> Self {
        Self::new(EPS)
    }
    fn is_nan(self) -> bool {
        self.hi.is_nan()
    }
    fn is_infinite(self) -> bool {
        self.hi.is_infinite()
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
    fn is_normal(self) -> bool {
        self.hi.is_normal()
    }
    fn classify(self) -> FpCategory {
        self.hi.classify()
    }
    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.floor());
            Self { hi, lo }
        } else {
            Self::new(hi)
        }
    }
    fn ceil(self) -> Self {
        let hi = self.hi.ceil();
        if hi == self.hi {
            let (hi, lo) = quick_two_sum(hi, self.lo.ceil());
            Self { hi, lo }
        } else {
            Self::new(hi)
        }
    }
    fn round(self) -> Self {
        if self.hi >= 0.0 {
            (self + Self::new(0.5)).floor()
        } else {
            (self - Self::new(0.5)).ceil()
        }
    }
    fn trunc(self) -> Self {
        if self.hi >= 0.0 {
            self.floor()
        } else {
            self.ceil()
        }
    }
    fn fract(self) -> Self {
        self - self.trunc()
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn signum(self) -> Self {
        Self::new(self.hi.signum())
    }
    fn is_sign_positive(self) -> bool {
        self.hi.is_sign_positive()
    }
    fn is_sign_negative(self) -> bool {
        self.hi.is_sign_negative()
    }
    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }
    fn recip(self) -> Self {
        Self::ONE / self
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            e >>= 1;
        }
        if n < 0 {
            acc.recip()
        } else {
            acc
        }
    }
    fn powf(self, n: Self) -> Self {
        if n.is_zero() {
            return Self::ONE;
        }
        if self.is_zero() {
            return if n.hi > 0.0 { Self::ZERO } else { Self::infinity() };
        }
        if self.hi < 0.0 {
            if n.fract().is_zero() && n.hi.abs() < 2f64.powi(31) {
                return self.powi(n.hi as i32 + n.lo as i32);
            }
            return Self::nan();
        }
        (n * self.ln()).exp()
    }
    fn sqrt(self) -> Self {
        if self.is_zero() {
            return Self::ZERO;
        }
        if self.hi < 0.0 {
            return Self::nan();
        }
        if self.hi.is_infinite() {
            return self;
        }
        // one Newton step from the f64 root doubles the precision
        let x = Self::new(self.hi.sqrt());
        x + (self - x.square()) / x.ldexp(1)
    }
    fn exp(self) -> Self {
        self.exp_impl()
    }
    fn exp2(self) -> Self {
        (self * LN_2_DD).exp_impl()
    }
    fn ln(self) -> Self {
        self.ln_impl()
    }
    fn log(self, base: Self) -> Self {
        self.ln_impl() / base.ln_impl()
    }
    fn log2(self) -> Self {
        self.ln_impl() / LN_2_DD
    }
    fn log10(self) -> Self {
        self.ln_impl() / LN_10_DD
    }
    fn max(self, other: Self) -> Self {
        if self.is_nan() || other > self {
            other
        } else {
            self
        }
    }
    fn min(self, other: Self) -> Self {
        if self.is_nan() || other < self {
            other
        } else {
            self
        }
    }
    fn abs_sub(self, other: Self) -> Self {
        if self > other {
            self - other
        } else {
            Self::ZERO
        }
    }
    fn cbrt(self) -> Self {
        if self.is_zero() || !self.hi.is_finite() {
            return self;
        }
        let neg = self.hi < 0.0;
        let a = self.abs();
        let mut x = Self::new(a.hi.cbrt());
        for _ in 0..2 {
            x -= (x.square() * x - a) / (x.square() * Self::new(3.0));
        }
        if neg {
            -x
        } else {
            x
        }
    }
    fn hypot(self, other: Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return Self::ZERO;
        }
        let r = small / big;
        big * (Self::ONE + r.square()).sqrt()
    }
    fn sin(self) -> Self {
        self.sin_cos_impl().0
    }
    fn cos(self) -> Self {
        self.sin_cos_impl().1
    }
    fn tan(self) -> Self {
        let (s, c) = self.sin_cos_impl();
        s / c
    }
    fn asin(self) -> Self {
        Self::atan2_impl(self, (Self::ONE - self.square()).sqrt())
    }
    fn acos(self) -> Self {
        Self::atan2_impl((Self::ONE - self.square()).sqrt(), self)
    }
    fn atan(self) -> Self {
        Self::atan2_impl(self, Self::ONE)
    }
    fn atan2(self, other: Self) -> Self {
        Self::atan2_impl(self, other)
    }
    fn sin_cos(self) -> (Self, Self) {
        self.sin_cos_impl()
    }
    fn exp_m1(self) -> Self {
        if self.hi.abs() < 0.5 {
            Self::expm1_taylor(self)
        } else {
            self.exp_impl() - Self::ONE
        }
    }
    fn ln_1p(self) -> Self {
        (Self::ONE + self).ln_impl()
    }
    fn sinh(self) -> Self {
        if self.hi.abs() < 0.5 {
            let a = self.exp_m1();
            let b = (-self).exp_m1();
            (a - b).ldexp(-1)
        } else {
            let e = self.exp_impl();
            (e - e.recip()).ldexp(-1)
        }
    }
    fn cosh(self) -> Self {
        let e = self.exp_impl();
        (e + e.recip()).ldexp(-1)
    }
    fn tanh(self) -> Self {
        let neg = self.hi < 0.0;
        let a = self.abs();
        let t = if a.hi < 0.5 {
            let e = a.ldexp(1).exp_m1();
            e / (e + Self::new(2.0))
        } else {
            let e = (-a.ldexp(1)).exp_impl();
            (Self::ONE - e) / (Self::ONE + e)
        };
        if neg {
            -t
        } else {
            t
        }
    }
    fn asinh(self) -> Self {
        let a = self.abs();
        let r = (a + (a.square() + Self::ONE).sqrt()).ln_impl();
        if self.hi < 0.0 {
            -r
        } else {
            r
        }
    }
    fn acosh(self) -> Self {
        if self.hi < 1.0 {
            return Self::nan();
        }
        (self + (self.square() - Self::ONE).sqrt()).ln_impl()
    }
    fn atanh(self) -> Self {
        ((Self::ONE + self) / (Self::ONE - self)).ln_impl().ldexp(-1)
    }
    fn integer_decode(self) -> (u64, i16, i8) {
        self.hi.integer_decode()
    }
    fn to_degrees(self) -> Self {
        self * Self::new(180.0) / PI_DD
    }
    fn to_radians(self) -> Self {
        self * PI_DD / Self::new(180.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Dd = DoubleDouble;

    fn close(a: Dd, b: Dd, rel: f64) -> bool {
        let d = (a - b).abs();
        d.hi <= rel * b.abs().hi.max(1e-300)
    }

    #[test]
    fn arithmetic_is_exact_beyond_f64() {
        let tiny = Dd::new(1e-20);
        let x = Dd::ONE + tiny;
        assert_eq!(x.hi(), 1.0);
        assert_eq!(x.lo(), 1e-20);
        assert_eq!((x - Dd::ONE).hi(), 1e-20);
        let third = Dd::ONE / Dd::new(3.0);
        let back = third * Dd::new(3.0);
        assert!((back - Dd::ONE).abs().hi() < 1e-31);
    }

    #[test]
    fn sqrt_and_cbrt_invert_powers() {
        for v in [2.0, 0.5, 1e-10, 12345.678, 3.0] {
            let x = Dd::new(v);
            let s = x.sqrt();
            assert!(close(s * s, x, 1e-31), "sqrt {v}");
            let c = x.cbrt();
            assert!(close(c * c * c, x, 1e-31), "cbrt {v}");
            assert!(close((-x).cbrt(), -c, 1e-31));
        }
        assert!(close(Dd::new(2.0).sqrt(), Dd::SQRT_2(), 1e-31));
    }

    #[test]
    fn exp_ln_round_trip() {
        for v in [-30.0, -1.0, -1e-5, 0.3, 1.0, 2.5, 40.0] {
            let x = Dd::new(v);
            let y = x.exp().ln();
            assert!((y - x).abs().hi() <= 1e-30 * v.abs().max(1.0), "exp/ln {v}: {y:?}");
        }
        assert!(close(Dd::ONE.exp(), Dd::E(), 1e-31));
        assert!(close(Dd::new(2.0).ln(), Dd::LN_2(), 1e-31));
        assert!(close(Dd::new(10.0).ln(), Dd::LN_10(), 1e-31));
    }

    #[test]
    fn trig_identities_hold_to_double_double_precision() {
        for v in [0.1, std::f64::consts::FRAC_PI_4, 1.0, 2.0, 4.71238898038469, -3.0, 10.0, 100.0] {
            let x = Dd::new(v);
            let (s, c) = x.sin_cos();
            assert!((s.square() + c.square() - Dd::ONE).abs().hi() < 1e-30, "pythagoras at {v}");
            let back = s.atan2(c);
            let wrapped = x - Dd::TAU() * (x / Dd::TAU()).round();
            assert!((back - wrapped).abs().hi() < 1e-29, "atan2 at {v}: {back} vs {wrapped}");
            assert!((s.hi() - v.sin()).abs() < 1e-15);
        }
        let three_half_pi = Dd::PI() * Dd::new(1.5);
        assert!((three_half_pi.sin() + Dd::ONE).abs().hi() < 1e-31);
        assert!(three_half_pi.cos().abs().hi() < 1e-31);
        let sixth = Dd::FRAC_PI_6().sin();
        assert!((sixth - Dd::new(0.5)).abs().hi() < 1e-31);
    }

    #[test]
    fn tanh_is_accurate_near_saturation_and_origin() {
        let x = Dd::new(1.86);
        let t = x.tanh();
        let via_exp = (x.exp() - (-x).exp()) / (x.exp() + (-x).exp());
        assert!(close(t, via_exp, 1e-30));
        let small = Dd::new(1e-12);
        assert!(close(small.tanh(), small - small.powi(3) / Dd::new(3.0), 1e-30));
        let big = Dd::new(20.0);
        let one_minus = Dd::ONE - big.tanh();
        let expected = Dd::new(2.0) * (-Dd::new(40.0)).exp();
        assert!(close(one_minus, expected, 1e-14));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let x: Dd = "0.1".parse().unwrap();
        let ten_x = x * Dd::new(10.0);
        assert!((ten_x - Dd::ONE).abs().hi() < 1e-31);
        let s = format!("{}", Dd::PI());
        assert!(s.starts_with("3.1415926535897932384626433832"), "{s}");
        let back: Dd = s.parse().unwrap();
        assert!(close(back, Dd::PI(), 1e-30));
        assert_eq!(format!("{:.3}", Dd::new(-1234.5)), "-1.23e3");
        assert!("abc".parse::<Dd>().is_err());
    }

    #[test]
    fn rounding_helpers() {
        let x = Dd::from_sum(3.0, -1e-20);
        assert_eq!(x.floor(), Dd::new(2.0));
        assert_eq!(x.ceil(), Dd::new(3.0));
        assert_eq!(Dd::new(-2.5).trunc(), Dd::new(-2.0));
        assert_eq!(Dd::new(2.5).round(), Dd::new(3.0));
        assert_eq!(Dd::new(7.0) % Dd::new(3.0), Dd::ONE);
        assert_eq!(Dd::new(2.0).powi(-2), Dd::new(0.25));
    }
}
