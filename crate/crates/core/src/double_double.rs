//! Double-double arithmetic: an unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`,
//! good for about 32 significant digits.
//!
//! Only what the extended-precision kernel needs is here: the field
//! operations, square root, exp, sin/cos, sinh/cosh and a complex type on
//! top. Addition and multiplication are commutative bit for bit and
//! negation is exact, so `a − b == −(b − a)` holds exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::numerics::{two_prod, two_sum};

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const FRAC_PI_2: Dd = Dd {
    hi: 1.5707963267948966,
    lo: 6.123233995736766e-17,
};
const LN_2: Dd = Dd {
    hi: 0.6931471805599453,
    lo: 2.3190468138462996e-17,
};

/// Taylor terms kept after argument reduction; enough for |r| ≤ π/4.
const SERIES_TERMS: usize = 30;

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two doubles.
    #[inline]
    pub fn sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn product(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        // exact for powers of two
        Dd {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqr(self) -> Self {
        self * self
    }

    pub fn powi(self, n: u32) -> Self {
        let mut out = Dd::ONE;
        let mut base = self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out * base;
            }
            base = base.sqr();
            n >>= 1;
        }
        out
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = Dd::from_f64(self.hi.sqrt());
        // one Newton step doubles the correct digits
        x + (self - x.sqr()) / x.scale(2.0)
    }

    pub fn round(self) -> f64 {
        let r = self.hi.round();
        if r == self.hi {
            // hi already integral: the fraction sits in lo
            r + self.lo.round()
        } else if (r - self.hi).abs() == 0.5 {
            // ties are broken by the sign of lo
            if self.lo > 0.0 && r < self.hi {
                r + 1.0
            } else if self.lo < 0.0 && r > self.hi {
                r - 1.0
            } else {
                r
            }
        } else {
            r
        }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self / LN_2).round();
        // r in [−ln2/2, ln2/2], then divided by 2^10 so the series is short
        let r = (self - LN_2 * Dd::from_f64(k)).scale(1.0 / 1024.0);
        let mut e = expm1_series(r);
        for _ in 0..10 {
            // (1 + e)² − 1 = e(2 + e)
            e = e * (e + Dd::from_f64(2.0));
        }
        (e + Dd::ONE).scale(2f64.powi(k as i32))
    }

    /// `e^x − 1` without cancellation near zero.
    pub fn exp_m1(self) -> Self {
        if self.hi.abs() < 0.5 {
            let r = self.scale(1.0 / 1024.0);
            let mut e = expm1_series(r);
            for _ in 0..10 {
                e = e * (e + Dd::from_f64(2.0));
            }
            e
        } else {
            self.exp() - Dd::ONE
        }
    }

    /// `(sin x, cos x)`.
    pub fn sin_cos(self) -> (Self, Self) {
        let k = (self / FRAC_PI_2).round();
        let r = self - FRAC_PI_2 * Dd::from_f64(k);
        let (s, c) = (sin_series(r), cos_series(r));
        match (k as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }

    /// `(sinh x, cosh x)`.
    pub fn sinh_cosh(self) -> (Self, Self) {
        if self.hi.abs() < 0.5 {
            let em = self.exp_m1();
            // e^x = 1 + em; sinh = (em + em/(1 + em))/2
            let ep = Dd::ONE + em;
            let sinh = (em + em / ep).scale(0.5);
            let cosh = (ep + ep.recip()).scale(0.5);
            (sinh, cosh)
        } else {
            let e = self.exp();
            let inv = e.recip();
            ((e - inv).scale(0.5), (e + inv).scale(0.5))
        }
    }
}

fn expm1_series(r: Dd) -> Dd {
    // r + r²/2! + ... in Horner form
    let mut acc = Dd::ZERO;
    for n in (1..=SERIES_TERMS).rev() {
        acc = (acc + Dd::ONE) * r / Dd::from_f64(n as f64);
    }
    acc
}

fn sin_series(r: Dd) -> Dd {
    let r2 = r.sqr();
    let mut acc = Dd::ONE;
    for n in (1..=SERIES_TERMS / 2).rev() {
        let d = ((2 * n) * (2 * n + 1)) as f64;
        acc = Dd::ONE - acc * r2 / Dd::from_f64(d);
    }
    acc * r
}

fn cos_series(r: Dd) -> Dd {
    let r2 = r.sqr();
    let mut acc = Dd::ONE;
    for n in (1..=SERIES_TERMS / 2).rev() {
        let d = ((2 * n - 1) * (2 * n)) as f64;
        acc = Dd::ONE - acc * r2 / Dd::from_f64(d);
    }
    acc
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::from_f64(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b * Dd::from_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Dd::from_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

macro_rules! dd_scalar_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<f64> for Dd {
            type Output = Dd;
            #[inline]
            fn $f(self, b: f64) -> Dd {
                $tr::$f(self, Dd::from_f64(b))
            }
        }
        impl $tr<Dd> for f64 {
            type Output = Dd;
            #[inline]
            fn $f(self, b: Dd) -> Dd {
                $tr::$f(Dd::from_f64(self), b)
            }
        }
    )*};
}
dd_scalar_ops!(Add add, Sub sub, Mul mul, Div div);

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: Cdd = Cdd {
        re: Dd::ONE,
        im: Dd::ZERO,
    };
    pub const I: Cdd = Cdd {
        re: Dd::ZERO,
        im: Dd::ONE,
    };

    #[inline]
    pub fn new(re: Dd, im: Dd) -> Self {
        Cdd { re, im }
    }

    #[inline]
    pub fn real(re: Dd) -> Self {
        Cdd { re, im: Dd::ZERO }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Cdd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(self) -> Dd {
        self.re.sqr() + self.im.sqr()
    }

    /// Modulus in double precision, for checks and scales.
    pub fn norm_f64(self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn scale(self, s: Dd) -> Self {
        Cdd {
            re: self.re * s,
            im: self.im * s,
        }
    }

    /// Multiplication by i.
    pub fn mul_i(self) -> Self {
        Cdd {
            re: -self.im,
            im: self.re,
        }
    }

    pub fn recip(self) -> Self {
        // scale by a power of two first so the squared modulus cannot overflow
        let m = self.re.hi.abs().max(self.im.hi.abs());
        if m == 0.0 {
            return Cdd::new(Dd::from_f64(f64::INFINITY), Dd::from_f64(f64::NAN));
        }
        let s = 2f64.powi(-(m.log2().floor() as i32));
        let z = Cdd::new(self.re.scale(s), self.im.scale(s));
        let d = z.norm_sqr();
        Cdd::new(z.re / d, -z.im / d).scale(Dd::from_f64(s))
    }

    /// Principal square root, branch cut on the negative real axis.
    pub fn sqrt(self) -> Self {
        if self.re.hi == 0.0 && self.im.hi == 0.0 {
            return Cdd::ZERO;
        }
        let r = self.norm_sqr().sqrt();
        if self.re.hi >= 0.0 {
            let t = ((r + self.re).scale(0.5)).sqrt();
            Cdd::new(t, self.im / t.scale(2.0))
        } else {
            let t = ((r - self.re).scale(0.5)).sqrt();
            let re = self.im.abs() / t.scale(2.0);
            let im = if self.im.hi < 0.0 { -t } else { t };
            Cdd::new(re, im)
        }
    }

    /// `(sin z, cos z)`.
    pub fn sin_cos(self) -> (Self, Self) {
        let (s, c) = self.re.sin_cos();
        let (sh, ch) = self.im.sinh_cosh();
        (Cdd::new(s * ch, c * sh), Cdd::new(c * ch, -(s * sh)))
    }

    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl From<Dd> for Cdd {
    fn from(x: Dd) -> Self {
        Cdd::real(x)
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    #[inline]
    fn neg(self) -> Cdd {
        Cdd::new(-self.re, -self.im)
    }
}

impl Add for Cdd {
    type Output = Cdd;
    #[inline]
    fn add(self, b: Cdd) -> Cdd {
        Cdd::new(self.re + b.re, self.im + b.im)
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    #[inline]
    fn sub(self, b: Cdd) -> Cdd {
        Cdd::new(self.re - b.re, self.im - b.im)
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    #[inline]
    fn mul(self, b: Cdd) -> Cdd {
        Cdd::new(
            self.re * b.re - self.im * b.im,
            self.re * b.im + self.im * b.re,
        )
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, b: Cdd) -> Cdd {
        self * b.recip()
    }
}

impl Add<Dd> for Cdd {
    type Output = Cdd;
    fn add(self, b: Dd) -> Cdd {
        Cdd::new(self.re + b, self.im)
    }
}

impl Sub<Dd> for Cdd {
    type Output = Cdd;
    fn sub(self, b: Dd) -> Cdd {
        Cdd::new(self.re - b, self.im)
    }
}

impl Mul<Dd> for Cdd {
    type Output = Cdd;
    fn mul(self, b: Dd) -> Cdd {
        self.scale(b)
    }
}
