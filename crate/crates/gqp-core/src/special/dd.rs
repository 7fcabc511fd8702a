//! Minimal double-double arithmetic for the Airy Maclaurin series.
//!
//! On the negative axis the series terms peak ~10 orders of magnitude above
//! the final sum, so plain f64 accumulation would surrender most of its
//! digits to cancellation. A hi/lo pair carries ~32 significant digits
//! through the sum; only the operations the series needs are implemented.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires |a| ≥ |b| (or a = 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Exact product via FMA: p + e = a·b.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, d: f64) -> Dd {
        let (p, e) = two_prod(self.hi, d);
        let (hi, lo) = quick_two_sum(p, e + self.lo * d);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div_f64(self, d: f64) -> Dd {
        let q = self.hi / d;
        let (p, e) = two_prod(q, d);
        let r = ((self.hi - p) - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q, r);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs_hi(self) -> f64 {
        self.hi.abs()
    }
}
