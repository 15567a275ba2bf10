//! Dense power series truncated at a fixed order, with a constant term.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PowerSeries {
    c: Vec<f64>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        Self {
            c: vec![0.0; order + 1],
        }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = value;
        s
    }

    /// The series `u`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.c[1] = 1.0;
        }
        s
    }

    /// Zero constant term, `tail[i]` is the coefficient of `u^(i+1)`, padded or cut to `order`.
    pub fn from_tail(tail: &[f64], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (dst, src) in s.c.iter_mut().skip(1).zip(tail) {
            *dst = *src;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c.get(k).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            c: self.c.iter().map(|v| v * k).collect(),
        }
    }

    pub fn exp(&self) -> Self {
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = self.c[0].exp();
        for m in 1..=n {
            let acc: f64 = (1..=m).map(|k| k as f64 * self.c[k] * g[m - k]).sum();
            g[m] = acc / m as f64;
        }
        Self { c: g }
    }

    /// `(sin f, cos f)` via `sin' = f' cos`, `cos' = -f' sin`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.order();
        let mut s = vec![0.0; n + 1];
        let mut c = vec![0.0; n + 1];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for m in 1..=n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for k in 1..=m {
                let kf = k as f64 * self.c[k];
                acc_s += kf * c[m - k];
                acc_c += kf * s[m - k];
            }
            s[m] = acc_s / m as f64;
            c[m] = -acc_c / m as f64;
        }
        (Self { c: s }, Self { c })
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            c: (0..=n).map(|k| self.c[k] + rhs.c[k]).collect(),
        }
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        PowerSeries {
            c: (0..=n).map(|k| self.c[k] - rhs.c[k]).collect(),
        }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![0.0; n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries { c: out }
    }
}
