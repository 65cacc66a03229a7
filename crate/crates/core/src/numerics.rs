//! Small numerical utilities: a portable seeded generator and compensated
//! accumulation for the identity checkers.

/// 64-bit linear congruential generator.
///
/// `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`;
/// each draw advances the state once and takes its top 53 bits as the
/// mantissa of a uniform double in `[0, 1)`. The constants are Knuth's MMIX
/// multiplier and increment, so any language with wrapping 64-bit integer
/// arithmetic reproduces the same stream.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6_364_136_223_846_793_005;
    pub const INCREMENT: u64 = 1_442_695_040_888_963_407;

    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n` (n > 0), by multiply-high on the top bits.
    pub fn below(&mut self, n: usize) -> usize {
        (((self.next_u64() >> 32) * n as u64) >> 32) as usize
    }

    /// Vector of `n` uniforms in `[lo, hi)`.
    pub fn vector(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }
}

/// Compensated sum of products (Ogita–Rump–Oishi `Dot2`).
///
/// Products are split exactly with a fused multiply-add and the running sum
/// carries a Neumaier correction, so the result is as accurate as if it were
/// computed in twice the working precision.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    err: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        // two-sum without branching
        let z = t - self.sum;
        self.err += (self.sum - (t - z)) + (x - z);
        self.sum = t;
    }

    #[inline]
    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let e = a.mul_add(b, -p);
        self.add(p);
        self.err += e;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

impl std::iter::FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<Accumulator>().value()
}

/// Least-squares slope of `log(err)` against `log(h)`.
///
/// Pairs with a non-positive error are skipped; `None` when fewer than two
/// usable points remain.
pub fn fitted_order(hs: &[f64], errs: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(h, e)| **h > 0.0 && **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_stream_is_reproducible() {
        let mut a = Lcg64::new(7);
        let mut b = Lcg64::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        // first draw from seed 0 is the increment itself
        assert_eq!(Lcg64::new(0).next_u64(), Lcg64::INCREMENT);
    }

    #[test]
    fn uniforms_stay_in_range() {
        let mut r = Lcg64::new(42);
        for _ in 0..10_000 {
            let x = r.uniform(-10.0, 10.0);
            assert!((-10.0..10.0).contains(&x));
            assert!(r.below(5) < 5);
        }
    }

    #[test]
    fn accumulator_recovers_cancellation() {
        let mut acc = Accumulator::new();
        acc.add(1e16);
        acc.add(1.0);
        acc.add(-1e16);
        assert_eq!(acc.value(), 1.0);

        let mut dot = Accumulator::new();
        let a = 1.0 + f64::EPSILON;
        dot.add_product(a, a);
        dot.add(-1.0);
        dot.add(-2.0 * f64::EPSILON);
        assert_eq!(dot.value(), f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn order_fit_on_exact_power_law() {
        let hs = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = hs.iter().map(|h| 3.0 * h * h).collect();
        assert!((fitted_order(&hs, &errs).unwrap() - 2.0).abs() < 1e-12);
    }
}
