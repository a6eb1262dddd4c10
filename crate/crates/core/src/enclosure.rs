//! Outward-rounded interval enclosures of real numbers.
//!
//! Every operation widens its result by a few ulps on each side, which is
//! enough to absorb the rounding of the correctly rounded operations and the
//! few-ulp error of `ln`, `exp` and `powf` in the platform math library.

use serde::Serialize;

const ELEMENTARY_ULPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

fn down(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_down();
    }
    x
}

fn up(mut x: f64, ulps: u32) -> f64 {
    for _ in 0..ulps {
        x = x.next_up();
    }
    x
}

impl Enclosure {
    pub fn exact(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Self { lo, hi }
    }

    fn widened(lo: f64, hi: f64, ulps: u32) -> Self {
        Self {
            lo: down(lo, ulps),
            hi: up(hi, ulps),
        }
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn add(self, o: Self) -> Self {
        Self::widened(self.lo + o.lo, self.hi + o.hi, 1)
    }

    pub fn sub(self, o: Self) -> Self {
        Self::widened(self.lo - o.hi, self.hi - o.lo, 1)
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi, 1)
    }

    /// Division by an enclosure of strictly positive numbers.
    pub fn div(self, o: Self) -> Self {
        debug_assert!(o.lo > 0.0);
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi, 1)
    }

    /// Natural logarithm of an enclosure of positive numbers.
    pub fn ln(self) -> Self {
        Self::widened(self.lo.ln(), self.hi.ln(), ELEMENTARY_ULPS)
    }

    pub fn exp(self) -> Self {
        Self::widened(self.lo.exp(), self.hi.exp(), ELEMENTARY_ULPS).clamp_non_negative()
    }

    /// `self^y` for a positive base and a point exponent.
    pub fn powf(self, y: f64) -> Self {
        let a = self.lo.powf(y);
        let b = self.hi.powf(y);
        Self::widened(a.min(b), a.max(b), ELEMENTARY_ULPS).clamp_non_negative()
    }

    /// `self^y` for a positive base and an enclosed exponent.
    pub fn powe(self, y: Self) -> Self {
        let c = [
            self.lo.powf(y.lo),
            self.lo.powf(y.hi),
            self.hi.powf(y.lo),
            self.hi.powf(y.hi),
        ];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi, ELEMENTARY_ULPS).clamp_non_negative()
    }

    pub fn sqrt(self) -> Self {
        Self::widened(self.lo.max(0.0).sqrt(), self.hi.sqrt(), 1).clamp_non_negative()
    }

    pub fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    fn clamp_non_negative(self) -> Self {
        Self {
            lo: self.lo.max(0.0),
            hi: self.hi,
        }
    }

    /// Every number in `self` is at most every number in `o`.
    pub fn certainly_le(&self, o: &Self) -> bool {
        self.hi <= o.lo
    }

    /// Some number in `self` is at most some number in `o`.
    pub fn possibly_le(&self, o: &Self) -> bool {
        self.lo <= o.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encloses_simple_identities() {
        let third = Enclosure::exact(1.0).div(Enclosure::exact(3.0));
        assert!(third.mul(Enclosure::exact(3.0)).contains(1.0));
        let two = Enclosure::exact(2.0);
        assert!(two.ln().mul(Enclosure::exact(2.0)).sub(Enclosure::exact(4.0).ln()).contains(0.0));
        assert!(Enclosure::exact(0.25).powf(0.5).contains(0.5));
    }

    #[test]
    fn comparisons() {
        let a = Enclosure::new(1.0, 2.0);
        let b = Enclosure::new(2.0, 3.0);
        assert!(a.certainly_le(&b));
        let c = Enclosure::new(1.5, 3.0);
        assert!(!a.certainly_le(&c));
        assert!(c.possibly_le(&a));
    }
}
