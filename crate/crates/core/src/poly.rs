//! Dense real polynomials in monomial form.
//!
//! Every velocity law, flux factor and kernel shape in this crate is a
//! polynomial, so evaluation, derivatives, exact integrals and sup-norms
//! all reduce to the routines here.

/// `coeffs[i]` multiplies `x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

/// Samples used to bracket critical points before bisection.
const CRITICAL_SAMPLES: usize = 10_000;

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| c / (i + 1) as f64),
        );
        Self::new(out)
    }

    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Zeros of `self` in `[a, b]` located by sign changes on a uniform
    /// sample followed by bisection. Roots of even multiplicity are missed,
    /// which is harmless for the extremum searches built on top.
    pub fn roots_in(&self, a: f64, b: f64) -> Vec<f64> {
        if self.degree() == 0 || b <= a {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let step = (b - a) / CRITICAL_SAMPLES as f64;
        let mut x0 = a;
        let mut f0 = self.eval(x0);
        for i in 1..=CRITICAL_SAMPLES {
            let x1 = if i == CRITICAL_SAMPLES { b } else { a + step * i as f64 };
            let f1 = self.eval(x1);
            if f0 == 0.0 {
                roots.push(x0);
            } else if f0 * f1 < 0.0 {
                roots.push(self.bisect(x0, x1, f0));
            }
            x0 = x1;
            f0 = f1;
        }
        if f0 == 0.0 {
            roots.push(b);
        }
        roots.dedup_by(|x, y| (*x - *y).abs() <= step * 1e-6);
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = self.eval(mid);
            if f_mid == 0.0 {
                return mid;
            }
            if f_lo * f_mid < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                f_lo = f_mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `max |p(x)|` over `[a, b]`, attained at an endpoint or a critical point.
    pub fn max_abs_on(&self, a: f64, b: f64) -> f64 {
        let crit = self.derivative().roots_in(a, b);
        crit.into_iter()
            .chain([a, b])
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }
}
