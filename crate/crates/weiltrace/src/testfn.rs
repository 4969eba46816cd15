//! Smooth compactly supported test functions on (0, ∞), their Mellin
//! transforms, the involution g* and multiplicative convolution squares.
//!
//! Everything is stored in the additive variable u = log x. A test function
//! is a finite linear combination of atoms c·B(σu)·e^{ku} over a base profile
//! B, which keeps the involution, the reflection x ↦ 1/x and sums exact and
//! lets the Mellin transform of every atom reduce to the base transform:
//! ∫ B(σu) e^{(s+k)u} du = B̂(σ(s+k)) with B̂(z) = ∫ B(v) e^{zv} dv.
//!
//! The additive support length of Remark-style thresholds is t = log(support_hi)
//! for symmetric supports.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quad::{GaussLegendre, TanhSinh};

type C = Complex64;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GRID_NODES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub s: C,
    pub value: C,
    pub quadrature_error_estimate: f64,
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

enum Base {
    Bump { center: f64, radius: f64 },
    Profile { f: Profile, lo: f64, hi: f64 },
    Spline(LogSpline),
}

impl Base {
    fn support(&self) -> (f64, f64) {
        match self {
            Base::Bump { center, radius } => (center - radius, center + radius),
            Base::Profile { lo, hi, .. } => (*lo, *hi),
            Base::Spline(s) => (s.u0, s.u0 + s.h * (s.y.len() - 1) as f64),
        }
    }

    fn eval(&self, v: f64) -> f64 {
        match self {
            Base::Bump { center, radius } => bump_profile((v - center) / radius),
            Base::Profile { f, lo, hi } => {
                if v <= *lo || v >= *hi {
                    0.0
                } else {
                    f(v)
                }
            }
            Base::Spline(s) => s.eval(v),
        }
    }

    /// ∫ B(v) e^{zv} dv
    fn transform(&self, z: C, tol: f64) -> Result<(C, f64)> {
        match self {
            Base::Spline(s) => Ok((s.transform(z), 0.0)),
            Base::Bump { center, radius } => bump_transform(*center, *radius, z, tol),
            Base::Profile { .. } => {
                let (lo, hi) = self.support();
                let len = hi - lo;
                // about two tanh-sinh panels per oscillation of e^{i Im(z) v}
                let panels = 1 + (z.im.abs() * len / (2.0 * PI) * 1.5) as usize;
                let ts = TanhSinh::new(tol);
                let r = ts.integrate_panels(|v: f64| (z * v).exp() * self.eval(v), lo, hi, panels)?;
                Ok((r.value, r.error))
            }
        }
    }
}

/// ∫ B(v) e^{zv} dv for the bump on [c − ρ, c + ρ] by the trapezoid rule in
/// w = (v − c)/ρ. The integrand is C^∞ with all derivatives vanishing at the
/// ends, so the only error is aliasing from frequencies ≥ 2π/h − |ρ Im z|;
/// the bump's Fourier transform decays like exp(−√(2ω)), which fixes the
/// band Ω needed for `tol`. The step is chosen so that even 2h resolves the
/// band, and |T_h − T_{2h}| is reported as the (very conservative) error.
fn bump_transform(c: f64, rho: f64, z: C, tol: f64) -> Result<(C, f64)> {
    let zr = z * rho;
    let band = (tol.max(1e-16).recip().ln() + zr.re.abs() + 12.0).powi(2) / 2.0;
    let h = PI / (zr.im.abs() + band);
    let n = (2.0 / h).ceil() as usize;
    let n = n + (n % 2);
    let h = 2.0 / n as f64;
    let (mut even, mut odd, mut l1) = (C::new(0.0, 0.0), C::new(0.0, 0.0), 0.0);
    for j in 1..n {
        let w = -1.0 + h * j as f64;
        let b = bump_profile(w);
        if b == 0.0 {
            continue;
        }
        let term = (zr * w).exp() * b;
        l1 += term.norm();
        if j % 2 == 0 {
            even += term;
        } else {
            odd += term;
        }
    }
    let scale = (z * c).exp() * rho;
    let fine = (even + odd) * h;
    let coarse = even * (2.0 * h);
    let err = (fine - coarse).norm() * scale.norm();
    let l1 = l1 * h * scale.norm();
    if err > (tol * l1).max(1e-300) {
        return Err(Error::Quadrature { estimate: (fine * scale).norm(), error: err, tolerance: tol * l1 });
    }
    Ok((fine * scale, err))
}

fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

#[derive(Clone)]
struct Atom {
    coef: f64,
    base: Arc<Base>,
    sigma: f64,
    k: f64,
}

impl Atom {
    fn support(&self) -> (f64, f64) {
        let (a, b) = self.base.support();
        if self.sigma > 0.0 {
            (a, b)
        } else {
            (-b, -a)
        }
    }

    fn eval(&self, u: f64) -> f64 {
        let b = self.base.eval(self.sigma * u);
        if b == 0.0 {
            0.0
        } else {
            self.coef * b * (self.k * u).exp()
        }
    }
}

/// A smooth compactly supported real test function g on (0, ∞).
#[derive(Clone)]
pub struct TestFunction {
    atoms: Vec<Atom>,
    pub smooth: bool,
    pub label: String,
    pub tolerance: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.log_support();
        write!(f, "TestFunction({}, log-support [{lo}, {hi}])", self.label)
    }
}

impl TestFunction {
    fn single(base: Base, label: String) -> Self {
        TestFunction {
            atoms: vec![Atom { coef: 1.0, base: Arc::new(base), sigma: 1.0, k: 0.0 }],
            smooth: true,
            label,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// The identically zero function.
    pub fn zero() -> Self {
        TestFunction { atoms: Vec::new(), smooth: true, label: "zero".into(), tolerance: DEFAULT_TOLERANCE }
    }

    /// g(x) = exp(−1/(1−u²)), u = (log x − log_center)/log_radius, on |u| < 1.
    pub fn bump(log_radius: f64, log_center: f64) -> Result<Self> {
        if !(log_radius > 0.0) || !log_radius.is_finite() || !log_center.is_finite() {
            return Err(Error::Parameter(format!("bump needs log_radius > 0, got {log_radius}")));
        }
        Ok(Self::single(
            Base::Bump { center: log_center, radius: log_radius },
            format!("bump(logr={log_radius},center={log_center})"),
        ))
    }

    /// A test function from its profile in u = log x, supported in [lo, hi].
    /// `smooth` records whether the caller vouches for C^∞.
    pub fn from_log_profile<F>(f: F, lo: f64, hi: f64, smooth: bool, label: &str) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Parameter(format!("empty or infinite log-support [{lo}, {hi}]")));
        }
        let mut g = Self::single(Base::Profile { f: Arc::new(f), lo, hi }, label.to_string());
        g.smooth = smooth;
        Ok(g)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Support in u = log x (hull over atoms); (0, 0) for the zero function.
    pub fn log_support(&self) -> (f64, f64) {
        if self.atoms.is_empty() {
            return (0.0, 0.0);
        }
        self.atoms.iter().map(Atom::support).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d)))
    }

    pub fn support_lo(&self) -> f64 {
        self.log_support().0.exp()
    }

    pub fn support_hi(&self) -> f64 {
        self.log_support().1.exp()
    }

    /// g(e^u).
    pub fn profile(&self, u: f64) -> f64 {
        self.atoms.iter().map(|a| a.eval(u)).sum()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        self.profile(x.ln())
    }

    pub fn value_at_one(&self) -> f64 {
        self.profile(0.0)
    }

    fn map_atoms(&self, f: impl Fn(&Atom) -> Atom, label: String) -> Self {
        TestFunction { atoms: self.atoms.iter().map(f).collect(), smooth: self.smooth, label, tolerance: self.tolerance }
    }

    /// g*(x) = g(1/x)/x.
    pub fn involution(&self) -> Self {
        let label = match self.label.strip_suffix("*") {
            Some(l) => l.to_string(),
            None => format!("{}*", self.label),
        };
        self.map_atoms(|a| Atom { coef: a.coef, base: a.base.clone(), sigma: -a.sigma, k: -a.k - 1.0 }, label)
    }

    /// x ↦ g(1/x).
    pub fn reflection(&self) -> Self {
        self.map_atoms(|a| Atom { coef: a.coef, base: a.base.clone(), sigma: -a.sigma, k: -a.k }, format!("{}~", self.label))
    }

    /// (g(x) + g(1/x))/2, the part seen by the continuous-spectral term.
    pub fn symmetrized(&self) -> Self {
        self.scaled(0.5).add(&self.reflection().scaled(0.5)).with_label(format!("sym({})", self.label))
    }

    pub fn scaled(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        self.map_atoms(|a| Atom { coef: a.coef * c, ..a.clone() }, format!("{c}*{}", self.label))
    }

    pub fn add(&self, other: &TestFunction) -> Self {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        TestFunction {
            atoms,
            smooth: self.smooth && other.smooth,
            label: format!("{}+{}", self.label, other.label),
            tolerance: self.tolerance.min(other.tolerance),
        }
    }

    /// ĝ(s) = ∫₀^∞ g(x) x^{s−1} dx.
    pub fn mellin(&self, s: C) -> Result<MellinValue> {
        let mut value = C::new(0.0, 0.0);
        let mut err = 0.0;
        for a in &self.atoms {
            let (v, e) = a.base.transform((s + a.k) * a.sigma, self.tolerance)?;
            value += v * a.coef;
            err += e * a.coef.abs();
        }
        Ok(MellinValue { s, value, quadrature_error_estimate: err })
    }

    /// ĝ(s) without the error bookkeeping; panics are impossible but a failed
    /// tolerance is reported through the `Result` of `mellin`.
    pub fn mellin_value(&self, s: C) -> Result<C> {
        self.mellin(s).map(|m| m.value)
    }

    /// ∫₀^∞ g dx = ĝ(1).
    pub fn integral(&self) -> Result<f64> {
        Ok(self.mellin_value(C::new(1.0, 0.0))?.re)
    }

    /// ∫₀^∞ g* dx = ĝ(0).
    pub fn integral_star(&self) -> Result<f64> {
        Ok(self.mellin_value(C::new(0.0, 0.0))?.re)
    }

    /// Upper envelope of |ĝ(σ+it)| over t ∈ [t0, t0 + width], from 24 samples
    /// inflated by 50% to cover the gaps between them.
    pub fn decay_envelope(&self, sigma: f64, t0: f64, width: f64) -> Result<f64> {
        let n = 24;
        let mut m: f64 = 0.0;
        for j in 0..=n {
            let t = t0 + width * j as f64 / n as f64;
            m = m.max(self.mellin_value(C::new(sigma, t))?.norm());
        }
        Ok(1.5 * m)
    }

    /// g(x) = ∫₀^∞ g0(xy) g0(y) dy, tabulated on a log-uniform grid of
    /// `DEFAULT_GRID_NODES` intervals with a clamped cubic spline.
    pub fn mult_convolve(&self) -> Result<TestFunction> {
        self.mult_convolve_with_grid(DEFAULT_GRID_NODES)
    }

    pub fn mult_convolve_with_grid(&self, intervals: usize) -> Result<TestFunction> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let (a, b) = self.log_support();
        let half = b - a;
        let h = 2.0 * half / intervals as f64;
        let ts = TanhSinh::new(1e-14);
        let g0 = self.clone();
        // (value, error) per node; accuracy is judged against the peak value
        let nodes: Vec<(f64, f64)> = (0..=intervals)
            .into_par_iter()
            .map(|i| {
                if i == 0 || i == intervals {
                    return (0.0, 0.0);
                }
                let u = -half + h * i as f64;
                let lo = a.max(a - u);
                let hi = b.min(b - u);
                if hi <= lo {
                    return (0.0, 0.0);
                }
                let f = |v: f64| g0.profile(u + v) * g0.profile(v) * v.exp();
                let mid = 0.5 * (lo + hi);
                let r1 = ts.integrate_unchecked(&f, lo, mid);
                let r2 = ts.integrate_unchecked(&f, mid, hi);
                (r1.value + r2.value, r1.error + r2.error)
            })
            .collect();
        let peak = nodes.iter().map(|n| n.0.abs()).fold(0.0, f64::max);
        let worst = nodes.iter().map(|n| n.1).fold(0.0, f64::max);
        if worst > self.tolerance * peak {
            return Err(Error::Quadrature { estimate: peak, error: worst, tolerance: self.tolerance * peak });
        }
        let values: Vec<f64> = nodes.into_iter().map(|n| n.0).collect();
        let spline = LogSpline::clamped(-half, h, values);
        let mut g = Self::single(Base::Spline(spline), format!("square({})", self.label));
        g.smooth = self.smooth;
        g.tolerance = self.tolerance;
        Ok(g)
    }

    /// Parse a family spec such as `bump:logr=0.6931,center=0`,
    /// `square:logr=0.3` (convolution square of a centred bump),
    /// `tilted:logr=0.5,slope=0.4` or `twobump:logr=0.5`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (family, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mut logr = None;
        let mut center = 0.0;
        let mut slope = 0.5;
        for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("expected key=value in test-function spec, got '{kv}'")))?;
            let v: f64 = parse_number(v.trim())?;
            match k.trim() {
                "logr" | "log_radius" => logr = Some(v),
                "center" | "log_center" => center = v,
                "slope" => slope = v,
                other => return Err(Error::Parameter(format!("unknown test-function key '{other}'"))),
            }
        }
        let logr = logr.ok_or_else(|| Error::Parameter(format!("test-function spec '{spec}' lacks logr")))?;
        match family.trim() {
            "bump" => Self::bump(logr, center),
            "square" => Self::bump(logr, center)?.mult_convolve(),
            "tilted" => tilted_bump(logr, slope),
            "twobump" => two_bump(logr),
            other => Err(Error::Parameter(format!("unknown test-function family '{other}'"))),
        }
    }
}

/// A number, `log2`/`log4`/`log8`, or a quotient of two such (`log2/2`).
pub fn parse_number(v: &str) -> Result<f64> {
    // accept a couple of symbolic forms that are convenient on the command line
    let v = v.replace(' ', "");
    let simple = |s: &str| -> Option<f64> {
        match s {
            "log2" => Some(2f64.ln()),
            "log4" => Some(4f64.ln()),
            "log8" => Some(8f64.ln()),
            _ => s.parse().ok(),
        }
    };
    if let Some(x) = simple(&v) {
        return Ok(x);
    }
    if let Some((n, d)) = v.split_once('/') {
        if let (Some(n), Some(d)) = (simple(n), simple(d)) {
            return Ok(n / d);
        }
    }
    Err(Error::Parameter(format!("cannot parse number '{v}'")))
}

/// Bump times (1 + slope·u/logr): smooth, non-symmetric, supported in |u| < logr.
pub fn tilted_bump(logr: f64, slope: f64) -> Result<TestFunction> {
    if !(logr > 0.0) {
        return Err(Error::Parameter(format!("tilted bump needs logr > 0, got {logr}")));
    }
    TestFunction::from_log_profile(
        move |u| bump_profile(u / logr) * (1.0 + slope * u / logr),
        -logr,
        logr,
        true,
        &format!("tilted(logr={logr},slope={slope})"),
    )
}

/// Two bumps of radius logr/2 centred at ±logr/2 (support |u| < logr).
pub fn two_bump(logr: f64) -> Result<TestFunction> {
    let a = TestFunction::bump(logr / 2.0, -logr / 2.0)?;
    let b = TestFunction::bump(logr / 2.0, logr / 2.0)?.scaled(0.5);
    Ok(a.add(&b).with_label(format!("twobump(logr={logr})")))
}

/// Clamped cubic spline on a uniform grid in u with zero end slopes.
struct LogSpline {
    u0: f64,
    h: f64,
    y: Vec<f64>,
    /// second derivatives at the nodes
    m: Vec<f64>,
}

impl LogSpline {
    fn clamped(u0: f64, h: f64, y: Vec<f64>) -> Self {
        let n = y.len();
        // tridiagonal system for second derivatives, end slopes zero
        let mut diag = vec![4.0; n];
        let off = 1.0;
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0;
        diag[n - 1] = 2.0;
        rhs[0] = 6.0 * (y[1] - y[0]) / (h * h);
        rhs[n - 1] = -6.0 * (y[n - 1] - y[n - 2]) / (h * h);
        for i in 1..n - 1 {
            rhs[i] = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
        }
        for i in 1..n {
            let w = off / diag[i - 1];
            diag[i] -= w * off;
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - off * m[i + 1]) / diag[i];
        }
        LogSpline { u0, h, y, m }
    }

    fn eval(&self, u: f64) -> f64 {
        let n = self.y.len() - 1;
        let x = (u - self.u0) / self.h;
        if !(x > 0.0 && x < n as f64) {
            return 0.0;
        }
        let i = (x.floor() as usize).min(n - 1);
        let t = x - i as f64;
        let (a, b) = (1.0 - t, t);
        let h2 = self.h * self.h / 6.0;
        a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h2
    }

    /// Local cubic coefficients on interval i: p(v) = c0 + c1 v + c2 v² + c3 v³.
    fn coefs(&self, i: usize) -> [f64; 4] {
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        [y0, (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0, m0 / 2.0, (m1 - m0) / (6.0 * h)]
    }

    /// ∫ S(v) e^{zv} dv, exact up to rounding.
    fn transform(&self, z: C) -> C {
        if z.norm() < 20.0 {
            self.transform_gauss(z)
        } else {
            self.transform_by_parts(z)
        }
    }

    fn transform_gauss(&self, z: C) -> C {
        let n = self.y.len() - 1;
        {
            let gl = gl6();
            let mut total = C::new(0.0, 0.0);
            for i in 0..n {
                let c = self.coefs(i);
                let ui = self.u0 + self.h * i as f64;
                let half = 0.5 * self.h;
                let mut acc = C::new(0.0, 0.0);
                for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                    let v = half * (1.0 + x);
                    let p = c[0] + v * (c[1] + v * (c[2] + v * c[3]));
                    acc += (z * v).exp() * (p * w);
                }
                total += (z * ui).exp() * acc * half;
            }
            total
        }
    }

    fn transform_by_parts(&self, z: C) -> C {
        let n = self.y.len() - 1;
        // integrate by parts on every interval: value, slope and curvature are
        // continuous, so only the jumps of the third derivative survive
        let z1 = z.inv();
        let (z2, z3, z4) = (z1 * z1, z1 * z1 * z1, z1 * z1 * z1 * z1);
        let third = |i: usize| 6.0 * self.coefs(i)[3];
        let end = self.u0 + self.h * n as f64;
        let slope_end = {
            let c = self.coefs(n - 1);
            c[1] + self.h * (2.0 * c[2] + 3.0 * c[3] * self.h)
        };
        let upper = (z * end).exp() * (z1 * self.y[n] - z2 * slope_end + z3 * self.m[n] - z4 * third(n - 1));
        let c0 = self.coefs(0);
        let lower = (z * self.u0).exp() * (z1 * self.y[0] - z2 * c0[1] + z3 * self.m[0] - z4 * third(0));
        let mut jumps = C::new(0.0, 0.0);
        for i in 1..n {
            let d = third(i - 1) - third(i);
            if d != 0.0 {
                jumps += (z * (self.u0 + self.h * i as f64)).exp() * d;
            }
        }
        upper - lower - jumps * z4
    }
}

fn gl6() -> &'static GaussLegendre {
    static RULE: std::sync::OnceLock<GaussLegendre> = std::sync::OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(6))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn bump_basics() {
        let g = TestFunction::bump(1.0, 0.0).unwrap();
        assert!((g.evaluate(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(g.evaluate(std::f64::consts::E), 0.0);
        let g = TestFunction::bump(2f64.ln(), 0.0).unwrap();
        assert!((g.support_lo() - 0.5).abs() < 1e-15 && (g.support_hi() - 2.0).abs() < 1e-15);
        assert!(TestFunction::bump(0.0, 0.0).is_err());
        assert!(TestFunction::bump(-1.0, 0.0).is_err());
    }

    #[test]
    fn bump_is_smooth_numerically() {
        // central differences of order 1..4 stay bounded as the step shrinks
        let g = TestFunction::bump(0.7, 0.1).unwrap();
        for &x in &[0.8, 1.3, 1.9] {
            let mut prev: Option<[f64; 4]> = None;
            for &h in &[4e-3, 2e-3, 1e-3] {
                let f = |k: f64| g.evaluate(x + k * h);
                let d = [
                    (f(1.0) - f(-1.0)) / (2.0 * h),
                    (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / (h * h),
                    (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h.powi(3)),
                    (f(2.0) - 4.0 * f(1.0) + 6.0 * f(0.0) - 4.0 * f(-1.0) + f(-2.0)) / h.powi(4),
                ];
                if let Some(p) = prev {
                    for k in 0..4 {
                        assert!((d[k] - p[k]).abs() <= 0.05 * (1.0 + p[k].abs()), "x={x} order {}", k + 1);
                    }
                }
                prev = Some(d);
            }
        }
    }

    #[test]
    fn involution_laws() {
        let g = TestFunction::bump(1.0, 0.3).unwrap();
        let gs = g.involution();
        assert!((TestFunction::bump(1.0, 0.0).unwrap().involution().evaluate(1.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((gs.support_lo() - 1.0 / g.support_hi()).abs() < 1e-14);
        assert!((gs.support_hi() - 1.0 / g.support_lo()).abs() < 1e-14);
        let gss = gs.involution();
        for i in 0..50 {
            let x = 0.2 + 0.1 * i as f64;
            assert_eq!(gss.evaluate(x), g.evaluate(x));
            assert!((gs.evaluate(x) - g.evaluate(1.0 / x) / x).abs() <= 1e-16);
        }
        for re in [-1.0, -0.25, 0.5, 1.25, 2.0] {
            for im in [-7.0, -1.5, 0.0, 2.0, 9.0] {
                let s = c(re, im);
                let a = gs.mellin(s).unwrap();
                let b = g.mellin(1.0 - s).unwrap();
                // an independent direct quadrature of g* (no atom algebra)
                let direct = TanhSinh::new(1e-13)
                    .integrate_panels(|u: f64| gs.profile(u) * (s * u).exp(), -1.3, 0.7, 8)
                    .unwrap();
                let tol = 10.0 * (a.quadrature_error_estimate + b.quadrature_error_estimate) + 1e-14;
                assert!((a.value - b.value).norm() <= tol.max(1e-13), "{s}");
                assert!((direct.value - b.value).norm() <= 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn mellin_values() {
        let g = TestFunction::bump(1.0, 0.0).unwrap();
        // plain x-space quadrature at two refinements as the oracle
        let gl = GaussLegendre::new(40);
        let coarse = gl.composite(|x: f64| g.evaluate(x), (-1f64).exp(), 1f64.exp(), 0.05);
        let fine = gl.composite(|x: f64| g.evaluate(x), (-1f64).exp(), 1f64.exp(), 0.025);
        assert!((coarse - fine).abs() < 1e-12);
        assert!((g.mellin(c(1.0, 0.0)).unwrap().value.re - fine).abs() < 1e-12);
        // ∫ g dx/x = ∫ e^{-1/(1-u²)} du ≈ 0.443994, ∫ g dx ≈ 0.480089 (mpmath)
        assert!((g.mellin(c(0.0, 0.0)).unwrap().value.re - 0.443993816168079).abs() < 1e-12);
        assert!((g.integral().unwrap() - 0.480089054652307).abs() < 1e-12);
        // decay: |ĝ(½+50i)| = 8.41421600283205e-5 (mpmath), 1.86e-4 of |ĝ(½)|
        assert!((g.mellin(c(0.5, 50.0)).unwrap().value.norm() - 8.41421600283205e-5).abs() < 1e-15);
        let s = c(0.3, 4.0);
        assert!((g.mellin(s.conj()).unwrap().value - g.mellin(s).unwrap().value.conj()).norm() < 1e-15);
    }

    #[test]
    fn decay_on_critical_line() {
        // sup_{|t|∈[40,80]} |ĝ(½+it)| / sup_{|t|≤5} |ĝ(½+it)| for bumps of
        // log-radius r, against mpmath values; the ratio behaves like
        // exp(−√(2r·40)) and only drops below 1e-5 for r ≳ 3
        let oracle = [(0.3, 0.0168813808151169), (1.0, 0.000526665050978636), (2.0, 3.1402289950273e-5), (3.0, 4.36437814333602e-6)];
        let mut last = f64::INFINITY;
        for (r, want) in oracle {
            let g = TestFunction::bump(r, 0.0).unwrap();
            let near = (0..=20).map(|k| g.mellin(c(0.5, k as f64 * 0.25)).unwrap().value.norm()).fold(0.0, f64::max);
            let far = (0..=80).map(|k| g.mellin(c(0.5, 40.0 + k as f64 * 0.5)).unwrap().value.norm()).fold(0.0, f64::max);
            let ratio = far / near;
            assert!((ratio - want).abs() < 1e-9 * want.max(1e-3), "r={r}: {ratio} vs {want}");
            assert!(ratio < last);
            last = ratio;
        }
    }

    #[test]
    fn convolution_square() {
        let g0 = TestFunction::bump(0.4, 0.1).unwrap();
        let g = g0.mult_convolve().unwrap();
        let (lo, hi) = g.log_support();
        assert!((lo + 0.8).abs() < 1e-12 && (hi - 0.8).abs() < 1e-12);
        for t in [0.0, 1.0, 5.0, 30.0] {
            let s = c(0.5, t);
            let a = g.mellin(s).unwrap().value;
            let b = g0.mellin(s).unwrap().value.norm_sqr();
            assert!((a - b).norm() < 1e-11 * (1.0 + b), "t={t}: {a} vs {b}");
            assert!(a.re >= -1e-10 && a.im.abs() <= 1e-10);
        }
        // g* = g for a convolution square
        let gs = g.involution();
        for i in 0..40 {
            let x = 0.46 + 0.04 * i as f64;
            assert!((gs.evaluate(x) - g.evaluate(x)).abs() < 1e-12, "x={x}");
        }
        let sq = TestFunction::bump(0.25, 0.0).unwrap().mult_convolve().unwrap();
        assert!((sq.support_hi().ln() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn spline_transform_paths_agree() {
        let g = TestFunction::bump(0.5, 0.0).unwrap().mult_convolve().unwrap();
        let Base::Spline(sp) = &*g.atoms[0].base else { panic!("spline expected") };
        for z in [c(0.5, 8.0), c(0.5, 20.0), c(-1.0, 45.0), c(2.0, 150.0)] {
            let a = sp.transform_gauss(z);
            let b = sp.transform_by_parts(z);
            assert!((a - b).norm() < 1e-13, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn parse_specs() {
        let g = TestFunction::parse("bump:logr=0.6931,center=0").unwrap();
        assert!((g.support_hi() - 0.6931f64.exp()).abs() < 1e-12);
        let g = TestFunction::parse("bump:logr=log8").unwrap();
        assert!((g.support_hi() - 8.0).abs() < 1e-12);
        let g = TestFunction::parse("bump:logr=log2/2").unwrap();
        assert!((g.support_hi() - 2f64.sqrt()).abs() < 1e-12);
        assert!(TestFunction::parse("bump:center=1").is_err());
        assert!(TestFunction::parse("wiggle:logr=1").is_err());
        assert!(TestFunction::parse("square:logr=0.3").unwrap().support_hi() > 1.8);
    }

    #[test]
    fn linear_structure() {
        let g = TestFunction::bump(0.8, 0.2).unwrap();
        let h = tilted_bump(0.5, 0.7).unwrap();
        let s = c(0.5, 3.0);
        let lhs = g.scaled(2.0).add(&h).mellin(s).unwrap().value;
        let rhs = g.mellin(s).unwrap().value * 2.0 + h.mellin(s).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-15);
        let sym = g.symmetrized();
        for i in 0..20 {
            let x = 0.5 + 0.1 * i as f64;
            assert!((sym.evaluate(x) - sym.evaluate(1.0 / x)).abs() < 1e-15);
        }
        assert_eq!(TestFunction::zero().mellin(s).unwrap().value, c(0.0, 0.0));
    }
}
