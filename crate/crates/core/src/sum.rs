//! Compensated (Neumaier) summation, real and complex.
//!
//! Parallel reductions in this crate always sum fixed-size chunks and then
//! combine the chunk totals in index order, so results are bit-identical for
//! any thread count.

use std::iter::Sum;
use std::ops::AddAssign;

use num_complex::Complex;
use num_traits::Float;

#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier<F> {
    sum: F,
    comp: F,
}

impl<F: Float> Neumaier<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> F {
        self.sum + self.comp
    }
}

impl<F: Float> AddAssign<F> for Neumaier<F> {
    fn add_assign(&mut self, x: F) {
        self.add(x);
    }
}

impl<F: Float> Sum<F> for Neumaier<F> {
    fn sum<I: Iterator<Item = F>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.for_each(|x| s.add(x));
        s
    }
}

/// Component-wise compensated sum of complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum<F> {
    re: Neumaier<F>,
    im: Neumaier<F>,
}

impl<F: Float> ComplexSum<F> {
    pub fn new() -> Self {
        Self {
            re: Neumaier::new(),
            im: Neumaier::new(),
        }
    }

    pub fn add(&mut self, z: Complex<F>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &Self) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex<F> {
        Complex::new(self.re.value(), self.im.value())
    }
}

impl<F: Float> Sum<Complex<F>> for ComplexSum<F> {
    fn sum<I: Iterator<Item = Complex<F>>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.for_each(|z| s.add(z));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_terms() {
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        let s: Neumaier<f64> = xs.iter().copied().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f32> = (1..=1000).map(|i| 1.0 / i as f32).collect();
        let all: Neumaier<f32> = xs.iter().copied().sum();
        let mut a: Neumaier<f32> = xs[..400].iter().copied().sum();
        let b: Neumaier<f32> = xs[400..].iter().copied().sum();
        a.merge(&b);
        assert!((a.value() - all.value()).abs() <= 1e-6);
    }
}
