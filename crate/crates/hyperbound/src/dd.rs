//! Minimal double-double arithmetic for summation paths where f64
//! cancellation exceeds the tolerance budget. Based on the usual
//! error-free transformations (two_sum / two_prod with FMA).

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact sum of two f64 values as a Dd.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        // r = self - q1 * o
        let r = self.add(o.mul(Dd::from_f64(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Dd::from_f64(-q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_keeps_low_bits() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-30);
        let s = a.add(b);
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-30);
        // cancellation recovers the small part
        let d = s.add(Dd::from_f64(-1.0));
        assert!((d.value() - 1e-30).abs() < 1e-45);
    }

    #[test]
    fn mul_div_roundtrip() {
        let a = Dd::from_sum(1.0, 1e-20);
        let b = Dd::from_sum(3.0, -2e-19);
        let p = a.mul(b);
        let q = p.div(b);
        let err = q.add(Dd {
            hi: -a.hi,
            lo: -a.lo,
        });
        assert!(err.value().abs() < 1e-30);
    }

    #[test]
    fn geometric_sum_high_precision() {
        // sum of 0.1^k has an exact closed form; dd should beat f64 clearly
        let r = Dd::from_f64(0.1);
        let mut t = Dd::from_f64(1.0);
        let mut s = Dd::from_f64(0.0);
        for _ in 0..40 {
            s = s.add(t);
            t = t.mul(r);
        }
        let exact = 1.0 / 0.9;
        assert!((s.value() - exact).abs() <= f64::EPSILON * exact);
    }
}
