//! Quadrature engines: tanh-sinh for compactly supported smooth integrands,
//! composite Gauss–Legendre for long line integrals, and a Legendre-moment
//! Filon rule for integrands carrying a fast `e^{iωt}` factor.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Values the integrators can accumulate (real or complex).
pub trait QValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn abs(self) -> f64;
}

impl QValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl QValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    /// Absolute error estimate (difference of the last two refinement levels).
    pub error: f64,
    /// Quadrature estimate of ∫|f|, used to scale relative tolerances.
    pub l1: f64,
    pub evals: usize,
}

// Integrals this small are zero for every purpose here; relative tests on
// subnormal values are meaningless.
const ABS_FLOOR: f64 = 1e-280;

/// Double-exponential rule on a finite interval.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    /// Relative tolerance (against ∫|f|).
    pub tol: f64,
    pub max_level: u32,
    /// Half-width of the truncated t-range; 3.3 suffices for bounded
    /// integrands, endpoint singularities need about 4.5.
    pub t_max: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        TanhSinh { tol: 1e-12, max_level: 9, t_max: 3.3 }
    }
}

impl TanhSinh {
    pub fn new(tol: f64) -> Self {
        TanhSinh { tol, ..Default::default() }
    }

    /// Integrate `f` over `[a, b]`. Fails with the best estimate attached when
    /// the tolerance is not met at `max_level`.
    pub fn integrate<T: QValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> Result<QuadResult<T>> {
        let r = self.integrate_unchecked(&f, a, b);
        if r.error <= (self.tol * r.l1).max(ABS_FLOOR) {
            Ok(r)
        } else {
            Err(Error::Quadrature {
                estimate: r.value.abs(),
                error: r.error,
                tolerance: self.tol * r.l1,
            })
        }
    }

    /// Integrate over `[a, b]` split into `panels` equal pieces; errors add.
    pub fn integrate_panels<T: QValue, F: Fn(f64) -> T>(
        &self,
        f: F,
        a: f64,
        b: f64,
        panels: usize,
    ) -> Result<QuadResult<T>> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = QuadResult { value: T::zero(), error: 0.0, l1: 0.0, evals: 0 };
        for k in 0..panels {
            let lo = a + h * k as f64;
            let hi = if k + 1 == panels { b } else { lo + h };
            let r = self.integrate_unchecked(&f, lo, hi);
            acc.value = acc.value + r.value;
            acc.error += r.error;
            acc.l1 += r.l1;
            acc.evals += r.evals;
        }
        if acc.error <= (self.tol * acc.l1).max(ABS_FLOOR) {
            Ok(acc)
        } else {
            Err(Error::Quadrature {
                estimate: acc.value.abs(),
                error: acc.error,
                tolerance: self.tol * acc.l1,
            })
        }
    }

    pub fn integrate_unchecked<T: QValue, F: Fn(f64) -> T>(&self, f: &F, a: f64, b: f64) -> QuadResult<T> {
        let half = 0.5 * (b - a);
        let len = b - a;
        // node at parameter t contributes f(a + d) and f(b - d) with
        // d = len / (1 + e^{2v}), v = (π/2) sinh t, weight (π/2) cosh t / cosh² v
        let pair = |t: f64| -> (T, f64, usize) {
            let v = FRAC_PI_2 * t.sinh();
            let w = FRAC_PI_2 * t.cosh() / (v.cosh() * v.cosh());
            if w == 0.0 || !w.is_finite() {
                return (T::zero(), 0.0, 0);
            }
            let d = len / (1.0 + (2.0 * v).exp());
            let fl = f(a + d);
            let fr = f(b - d);
            ((fl + fr) * (w * half), (fl.abs() + fr.abs()) * w * half, 2)
        };
        let mut evals = 1;
        let c = f(a + half);
        let mut sum = c * (FRAC_PI_2 * half);
        let mut sum_abs = c.abs() * FRAC_PI_2 * half;
        let mut h = 1.0;
        let mut k = 1.0;
        while k <= self.t_max {
            let (v, va, e) = pair(k);
            sum = sum + v;
            sum_abs += va;
            evals += e;
            k += 1.0;
        }
        let mut prev = sum * h;
        let mut error = f64::INFINITY;
        let mut l1 = sum_abs * h;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut t = h;
            while t <= self.t_max {
                let (v, va, e) = pair(t);
                sum = sum + v;
                sum_abs += va;
                evals += e;
                t += 2.0 * h;
            }
            let cur = sum * h;
            l1 = sum_abs * h;
            error = (cur - prev).abs();
            prev = cur;
            if error <= self.tol * l1 && level >= 3 {
                break;
            }
        }
        QuadResult { value: prev, error, l1, evals }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<T: QValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64) -> T {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s = s + f(c + h * x) * *w;
        }
        s * h
    }

    /// Composite rule with panels of length at most `max_width`.
    pub fn composite<T: QValue, F: Fn(f64) -> T>(&self, f: F, a: f64, b: f64, max_width: f64) -> T {
        let panels = (((b - a) / max_width).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let mut s = T::zero();
        for k in 0..panels {
            let lo = a + h * k as f64;
            s = s + self.integrate(&f, lo, lo + h);
        }
        s
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Spherical Bessel functions j_0..j_{n-1} at κ ≥ 0, by Miller's backward
/// recurrence normalised with Σ (2k+1) j_k² = 1.
pub fn spherical_bessel_j(n: usize, kappa: f64) -> Vec<f64> {
    let kappa = kappa.abs();
    let mut out = vec![0.0; n];
    if kappa < 1e-8 {
        // leading term κ^k / (2k+1)!!
        let mut term = 1.0;
        for (k, o) in out.iter_mut().enumerate() {
            *o = term;
            term *= kappa / (2 * k + 3) as f64;
        }
        return out;
    }
    let start = n + 40 + (2.0 * kappa) as usize;
    let mut all = vec![0.0; start + 2];
    all[start] = 1.0;
    for k in (1..=start).rev() {
        all[k - 1] = (2 * k + 1) as f64 / kappa * all[k] - all[k + 1];
        if all[k - 1].abs() > 1e100 {
            for v in all[k - 1..].iter_mut() {
                *v *= 1e-100;
            }
        }
    }
    let norm: f64 = all.iter().enumerate().map(|(k, v)| (2 * k + 1) as f64 * v * v).sum::<f64>().sqrt();
    let mut scale = 1.0 / norm;
    let j0 = kappa.sin() / kappa;
    let j1 = kappa.sin() / (kappa * kappa) - kappa.cos() / kappa;
    let sign_ok = if j0.abs() > j1.abs() { j0 * all[0] >= 0.0 } else { j1 * all[1] >= 0.0 };
    if !sign_ok {
        scale = -scale;
    }
    for k in 0..n {
        out[k] = all[k] * scale;
    }
    out
}

/// Filon-type rule for ∫_a^b F(t) e^{iωt} dt: F is projected onto Legendre
/// polynomials on each panel and the oscillatory factor is integrated exactly
/// through ∫_{-1}^{1} P_k(x) e^{iκx} dx = 2 i^k j_k(κ).
#[derive(Debug, Clone)]
pub struct Filon {
    rule: GaussLegendre,
    /// P_k(x_j) for the rule nodes.
    legendre: Vec<Vec<f64>>,
}

impl Filon {
    pub fn new(n: usize) -> Self {
        let rule = GaussLegendre::new(n);
        let legendre = rule
            .nodes
            .iter()
            .map(|&x| {
                let mut row = vec![0.0; n];
                row[0] = 1.0;
                if n > 1 {
                    row[1] = x;
                }
                for k in 2..n {
                    row[k] = ((2 * k - 1) as f64 * x * row[k - 1] - (k - 1) as f64 * row[k - 2]) / k as f64;
                }
                row
            })
            .collect();
        Filon { rule, legendre }
    }

    pub fn panel<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64, omega: f64) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let vals: Vec<Complex64> = self.rule.nodes.iter().map(|x| f(c + h * x)).collect();
        self.panel_values(&vals, a, b, omega)
    }

    /// Nodes of the underlying Gauss rule mapped to [a, b].
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = f64> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.rule.nodes.iter().map(move |x| c + h * x)
    }

    /// As `panel`, from F already sampled at `nodes_on(a, b)`.
    pub fn panel_values(&self, vals: &[Complex64], a: f64, b: f64, omega: f64) -> Complex64 {
        let n = self.rule.nodes.len();
        assert_eq!(vals.len(), n);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let jk = spherical_bessel_j(n, omega * h);
        let sgn = if omega * h < 0.0 { -1.0 } else { 1.0 };
        let mut total = Complex64::new(0.0, 0.0);
        let mut ik = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, sgn);
        for k in 0..n {
            let mut ck = Complex64::new(0.0, 0.0);
            for j in 0..n {
                ck += vals[j] * (self.rule.weights[j] * self.legendre[j][k]);
            }
            ck *= (2 * k + 1) as f64 / 2.0;
            total += ck * ik * (2.0 * jk[k]);
            ik *= i;
        }
        total * h * Complex64::from_polar(1.0, omega * c)
    }

    pub fn composite<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, b: f64, omega: f64, max_width: f64) -> Complex64 {
        let panels = (((b - a) / max_width).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        (0..panels).map(|k| self.panel(&f, a + h * k as f64, a + h * (k + 1) as f64, omega)).sum()
    }
}

/// Result of integrating a decaying integrand over [start, ∞).
#[derive(Debug, Clone, Copy)]
pub struct DecayingIntegral {
    pub value: Complex64,
    /// ∫|f| over the last block before the cutoff; the integrand's envelope
    /// decays, so this bounds what lies beyond.
    pub tail_estimate: f64,
    pub cutoff: f64,
}

/// ∫_start^∞ f by 16-point Gauss–Legendre panels of `width`, taken in blocks
/// of 32 panels (evaluated in parallel); stops after the first block past
/// `min_cutoff` whose ∫|f| is below `tol`/10, or fails at `max_t`.
pub fn integrate_decaying<F>(f: F, start: f64, width: f64, min_cutoff: f64, tol: f64, max_t: f64) -> Result<DecayingIntegral>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    use rayon::prelude::*;
    const BLOCK: usize = 32;
    let gl = GaussLegendre::new(16);
    let mut value = Complex64::new(0.0, 0.0);
    let mut a = start;
    loop {
        let parts: Vec<(Complex64, f64)> = (0..BLOCK)
            .into_par_iter()
            .map(|k| {
                let lo = a + width * k as f64;
                let c = lo + 0.5 * width;
                let h = 0.5 * width;
                let mut v = Complex64::new(0.0, 0.0);
                let mut l1 = 0.0;
                for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                    let y = f(c + h * x);
                    v += y * (w * h);
                    l1 += y.norm() * w * h;
                }
                (v, l1)
            })
            .collect();
        let block_l1: f64 = parts.iter().map(|p| p.1).sum();
        value += parts.iter().map(|p| p.0).sum::<Complex64>();
        a += width * BLOCK as f64;
        if a >= min_cutoff && block_l1 < 0.1 * tol {
            return Ok(DecayingIntegral { value, tail_estimate: block_l1, cutoff: a });
        }
        if a >= max_t {
            return Err(Error::Quadrature { estimate: value.norm(), error: block_l1, tolerance: tol });
        }
    }
}
