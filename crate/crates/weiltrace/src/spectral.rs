//! The truncated continuous-spectral term, the lower bound it implies for
//! sums over zeros, the Weil positivity functional, and the scalar
//! Maaß–Selberg relation.
//!
//! The truncated term is evaluated in the form that follows from the
//! Maaß–Selberg limit,
//!
//!   J^T(g) = g(1) log T − (1/4π)∫ m′/m(it) ĝ(it) dt
//!            + (1/8πi)∫ ĝ(it) [m(−it)T^{2it} − m(it)T^{−2it}]/t dt,
//!
//! i.e. (1/8π)∫ ĝ(it)·‖Λ^T E(·, it)‖² dt, whose last integrand is regular at
//! t = 0. The single-exponential form g(1) log T − (1/4π)∫ m′/m ĝ
//! + (1/4πi) pv∫ m(it)ĝ(it)T^{it}/t dt is evaluated alongside it as a
//! symmetric principal value.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::explicit::{self, Variant, LINE_TOLERANCE};
use crate::quad::{Filon, GaussLegendre};
use crate::special;
use crate::testfn::TestFunction;
use crate::zeros::{self, ZeroList};

type C = Complex64;

/// Lowest height of the SL₂(ℤ) fundamental domain.
pub const MIN_TRUNCATION: f64 = 0.866_025_403_784_438_6;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruncationParams {
    #[serde(rename = "T")]
    pub t: f64,
    /// Half-width of the symmetric exclusion about t = 0 in the principal
    /// value; halved twice for Richardson extrapolation.
    pub pv_epsilon: f64,
    /// Hard ceiling on the line integrals' adaptive cutoff.
    pub line_cutoff: f64,
}

impl TruncationParams {
    pub fn new(t: f64) -> Self {
        TruncationParams { t, pv_epsilon: 1e-2, line_cutoff: 1e5 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::Parameter(format!("truncation height must be positive, got {}", self.t)));
        }
        if !(self.pv_epsilon > 0.0) || !(self.line_cutoff > 10.0) {
            return Err(Error::Parameter("pv_epsilon must be positive and line_cutoff above 10".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TruncatedTerm {
    #[serde(rename = "T")]
    pub t: f64,
    /// J^T in the Maaß–Selberg form.
    pub value: f64,
    pub log_term: f64,
    pub spectral_term: f64,
    /// (1/8πi)∫ ĝ(it)[m(−it)T^{2it} − m(it)T^{−2it}]/t dt.
    pub oscillatory_term: f64,
    /// Single-exponential form with the principal value.
    pub printed_form_value: f64,
    pub pv_term: f64,
    pub pv_extrapolation_error: f64,
    /// Where the t-integrals were cut off, and ∫|integrand| over the last block.
    pub cutoff: f64,
    pub tail_estimate: f64,
}

const PANEL_NODES: usize = 16;
const BLOCK: usize = 32;
/// Start of the Filon range for the principal value.
const FILON_SPLIT: f64 = 5.0;

/// ĝ(it), m(it) and m′/m(it) on Gauss panels over [0, cutoff], shared by
/// every truncation height up to `t_max`. The panel width resolves the
/// oscillation of ĝ(it) ~ e^{itu}, of T^{±2it} and of arg m(it) (which grows
/// like t log t); FILON_SPLIT is a panel boundary.
pub struct AxisTable {
    pub width: f64,
    pub cutoff: f64,
    pub tail_estimate: f64,
    t: Vec<f64>,
    w: Vec<f64>,
    g: Vec<C>,
    m: Vec<C>,
    md: Vec<f64>,
}

impl AxisTable {
    pub fn build(g: &TestFunction, t_max: f64, line_cutoff: f64) -> Result<Self> {
        let (lo, hi) = g.log_support();
        let umax = hi.abs().max(lo.abs());
        let w0 = (2.0 * PI / (umax + 2.0 * t_max.ln().abs() + 8.0)).min(1.0);
        let width = FILON_SPLIT / (FILON_SPLIT / w0).ceil();
        let gl = GaussLegendre::new(PANEL_NODES);
        let log_scale = 1.0 + t_max.ln().abs();
        let mut table = AxisTable { width, cutoff: 0.0, tail_estimate: 0.0, t: vec![], w: vec![], g: vec![], m: vec![], md: vec![] };
        let mut a = 0.0;
        loop {
            let nodes: Vec<(f64, f64)> = (0..BLOCK)
                .flat_map(|k| {
                    let c = a + width * (k as f64 + 0.5);
                    gl.nodes.iter().zip(&gl.weights).map(move |(x, wt)| (c + 0.5 * width * x, 0.5 * width * wt))
                })
                .collect();
            let vals: Vec<(C, C, f64)> = nodes
                .par_iter()
                .map(|&(t, _)| -> Result<(C, C, f64)> {
                    let s = C::new(0.0, t);
                    Ok((g.mellin_value(s)?, special::m_scalar_unchecked(s), special::m_logderiv_unchecked(s).re))
                })
                .collect::<Result<_>>()?;
            let mut l1 = 0.0;
            for (&(t, w), &(gv, mv, mdv)) in nodes.iter().zip(&vals) {
                l1 += w * gv.norm() * (log_scale + mdv.abs() + 1.0 / t.max(1.0));
                table.t.push(t);
                table.w.push(w);
                table.g.push(gv);
                table.m.push(mv);
                table.md.push(mdv);
            }
            a += width * BLOCK as f64;
            if !l1.is_finite() {
                return Err(Error::Quadrature { estimate: f64::NAN, error: f64::NAN, tolerance: LINE_TOLERANCE });
            }
            if a >= 30.0 && l1 < 0.1 * LINE_TOLERANCE {
                table.cutoff = a;
                table.tail_estimate = l1;
                return Ok(table);
            }
            if a >= line_cutoff {
                return Err(Error::Quadrature { estimate: 0.0, error: l1, tolerance: LINE_TOLERANCE });
            }
        }
    }

    /// −(1/4π)∫ m′/m(it) ĝ(it) dt.
    pub fn spectral(&self) -> f64 {
        let mut acc = 0.0;
        for k in (0..self.t.len()).rev() {
            acc += self.w[k] * self.md[k] * self.g[k].re;
        }
        -acc / (2.0 * PI)
    }

    /// (1/8πi)∫ ĝ(it)[m(−it)T^{2it} − m(it)T^{−2it}]/t dt
    /// = −(1/2π)∫₀^∞ Im(m(it)T^{−2it})/t · Re ĝ(it) dt.
    pub fn oscillatory(&self, log_t: f64) -> f64 {
        let mut acc = 0.0;
        for k in (0..self.t.len()).rev() {
            let t = self.t[k];
            let z = self.m[k] * C::from_polar(1.0, -2.0 * t * log_t);
            acc += self.w[k] * z.im / t * self.g[k].re;
        }
        -acc / (2.0 * PI)
    }

    /// Filon part of the principal value: ∫_{split}^{cutoff} F(t)e^{it log T} dt
    /// with F = m(it)ĝ(it)/t.
    fn filon_far(&self, filon: &Filon, log_t: f64) -> C {
        let first = (FILON_SPLIT / self.width).round() as usize;
        let panels = self.t.len() / PANEL_NODES;
        let mut total = C::new(0.0, 0.0);
        for p in (first..panels).rev() {
            let vals: Vec<C> = (p * PANEL_NODES..(p + 1) * PANEL_NODES).map(|k| self.m[k] * self.g[k] / self.t[k]).collect();
            let a = self.width * p as f64;
            total += filon.panel_values(&vals, a, a + self.width, log_t);
        }
        total
    }

    /// ∫_ε^{split} Im(m(it)ĝ(it)T^{it})/t dt: table panels wholly above ε,
    /// plus a fresh Gauss rule on the partial panel.
    fn pv_near(&self, g: &TestFunction, gl: &GaussLegendre, log_t: f64, eps: f64) -> Result<f64> {
        let h = |m: C, gv: C, t: f64| (m * gv * C::from_polar(1.0, t * log_t)).im / t;
        let first_full = (eps / self.width).ceil() as usize;
        let last = (FILON_SPLIT / self.width).round() as usize;
        let mut acc = 0.0;
        for k in (first_full * PANEL_NODES..last * PANEL_NODES).rev() {
            acc += self.w[k] * h(self.m[k], self.g[k], self.t[k]);
        }
        let top = self.width * first_full as f64;
        if top > eps {
            let (c, r) = (0.5 * (eps + top), 0.5 * (top - eps));
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                let t = c + r * x;
                let s = C::new(0.0, t);
                acc += r * wt * h(special::m_scalar_unchecked(s), g.mellin_value(s)?, t);
            }
        }
        Ok(acc)
    }
}

pub fn truncated_spectral_term(g: &TestFunction, params: &TruncationParams) -> Result<TruncatedTerm> {
    Ok(truncated_spectral_terms(g, &[params.t], params)?.remove(0))
}

/// J^T for every T in `heights` from one shared table; `params.t` is ignored.
pub fn truncated_spectral_terms(g: &TestFunction, heights: &[f64], params: &TruncationParams) -> Result<Vec<TruncatedTerm>> {
    for &t in heights {
        TruncationParams { t, ..*params }.validate()?;
    }
    let t_max = heights.iter().fold(1.0f64, |m, &t| m.max(t).max(1.0 / t));
    if g.is_zero() {
        return Ok(heights
            .iter()
            .map(|&t| TruncatedTerm {
                t,
                value: 0.0,
                log_term: 0.0,
                spectral_term: 0.0,
                oscillatory_term: 0.0,
                printed_form_value: 0.0,
                pv_term: 0.0,
                pv_extrapolation_error: 0.0,
                cutoff: 0.0,
                tail_estimate: 0.0,
            })
            .collect());
    }
    let table = AxisTable::build(g, t_max, params.line_cutoff)?;
    let spectral = table.spectral();
    let filon = Filon::new(PANEL_NODES);
    let gl = GaussLegendre::new(PANEL_NODES);
    let g1 = g.value_at_one();
    heights
        .iter()
        .map(|&t| {
            let log_t = t.ln();
            let osc = table.oscillatory(log_t);
            let log_term = g1 * log_t;
            let (pv, pv_err) = principal_value_term(g, &table, &filon, &gl, log_t, params.pv_epsilon)?;
            let value = log_term + spectral + osc;
            if !value.is_finite() || !pv.is_finite() {
                return Err(Error::Quadrature { estimate: value, error: f64::NAN, tolerance: LINE_TOLERANCE });
            }
            Ok(TruncatedTerm {
                t,
                value,
                log_term,
                spectral_term: spectral,
                oscillatory_term: osc,
                printed_form_value: log_term + spectral + pv,
                pv_term: pv,
                pv_extrapolation_error: pv_err,
                cutoff: table.cutoff,
                tail_estimate: table.tail_estimate,
            })
        })
        .collect()
}

/// (1/4πi) pv∫ m(it)ĝ(it)T^{it}/t dt. Pairing ±t turns the symmetric
/// principal value into (1/2π)∫₀^∞ Im(m(it)ĝ(it)T^{it})/t dt; the window
/// [0, ε) is dropped and restored by Richardson extrapolation over ε, ε/2,
/// ε/4 (the dropped piece is ε·h(0) + O(ε²)). Beyond t = 5 the factor T^{it}
/// is integrated by the Filon rule.
fn principal_value_term(
    g: &TestFunction,
    table: &AxisTable,
    filon: &Filon,
    gl: &GaussLegendre,
    log_t: f64,
    eps: f64,
) -> Result<(f64, f64)> {
    let eps = eps.min(table.width);
    let levels = [
        table.pv_near(g, gl, log_t, eps)?,
        table.pv_near(g, gl, log_t, eps / 2.0)?,
        table.pv_near(g, gl, log_t, eps / 4.0)?,
    ];
    let r1 = 2.0 * levels[1] - levels[0];
    let r2 = 2.0 * levels[2] - levels[1];
    let near = (4.0 * r2 - r1) / 3.0;
    let rich_err = (near - r2).abs();
    let far = table.filon_far(filon, log_t).im;
    Ok(((near + far) / (2.0 * PI), rich_err / (2.0 * PI)))
}

/// Everything in the lower bound except the zero sum, for one T.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub pole_term: f64,
    pub prime_term: f64,
    pub archimedean_term: f64,
    pub log_term: f64,
    pub oscillatory_term: f64,
    pub bound: f64,
    pub zero_sum: f64,
    pub zero_tail: f64,
    pub slack: f64,
    /// J^T evaluated directly; equals the slack when the ζ identity holds.
    pub truncated_term: f64,
}

/// Σ_ρ Ĝ(ρ) ≥ Ĝ(1) + ½Ĝ(0) − Σ Λ(n)G(n) − ∫₁^∞{G − G(1)/x²} x dx/(x² − 1)
///   − ½(log π + γ)G(1) − g(1) log T − (1/8πi)∫ ĝ(it)[m(−it)T^{2it} − m(it)T^{−2it}]/t dt,
/// i.e. minus the sign-resolved constant terms, minus the truncation terms;
/// G is the symmetrisation the spectral side depends on.
pub fn lower_bound_rhs(g: &TestFunction, t: f64, zeros: &ZeroList) -> Result<BoundRow> {
    Ok(bound_sweep(g, &[t], zeros)?.remove(0))
}

/// `lower_bound_rhs` over a grid of T, sharing the T-independent terms.
pub fn bound_sweep(g: &TestFunction, grid: &[f64], zeros: &ZeroList) -> Result<Vec<BoundRow>> {
    if grid.is_empty() {
        return Err(Error::Parameter("empty T grid".into()));
    }
    if let Some(&bad) = grid.iter().find(|&&t| !(t > MIN_TRUNCATION)) {
        return Err(Error::Parameter(format!("the lower bound needs T > √3/2, got {bad}")));
    }
    let rep = explicit::weil_rhs_zeta(g, Variant::Thm11SignResolved, zeros)?;
    let constant = rep.pole_term + rep.prime_sum + rep.archimedean_term;
    let terms = truncated_spectral_terms(g, grid, &TruncationParams::new(grid[0]))?;
    Ok(terms
        .into_iter()
        .map(|term| {
            let bound = -constant - term.log_term - term.oscillatory_term;
            BoundRow {
                t: term.t,
                pole_term: rep.pole_term,
                prime_term: rep.prime_sum,
                archimedean_term: rep.archimedean_term,
                log_term: term.log_term,
                oscillatory_term: term.oscillatory_term,
                bound,
                zero_sum: rep.zero_sum_side,
                zero_tail: rep.zero_sum_tail,
                slack: rep.zero_sum_side - bound,
                truncated_term: term.value,
            }
        })
        .collect())
}

/// `n` points log-spaced over (lo, hi], excluding lo.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / n as f64).exp()).collect()
}

pub const BOUND_CSV_HEADER: &str =
    "T,pole_term,prime_term,archimedean_term,log_term,oscillatory_term,bound,zero_sum,zero_tail,slack,truncated_term";

impl BoundRow {
    pub fn csv_fields(&self) -> [f64; 11] {
        [
            self.t,
            self.pole_term,
            self.prime_term,
            self.archimedean_term,
            self.log_term,
            self.oscillatory_term,
            self.bound,
            self.zero_sum,
            self.zero_tail,
            self.slack,
            self.truncated_term,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilValue {
    pub test_function: String,
    /// Σ_ρ ĝ(ρ) for g = g0 ∗ g0*, from the tabulated convolution.
    pub generic: f64,
    /// Σ_γ 2|ĝ0(½+iγ)|², the same sum computed from g0 alone.
    pub abs_square: f64,
    pub tail_bound: f64,
    pub zero_height: f64,
}

/// W(g0 ∗ g0*) = Σ_ρ ĝ(ρ), both as a generic zero sum over the convolution
/// square and through ĝ(½+iγ) = |ĝ0(½+iγ)|².
pub fn weil_functional(g0: &TestFunction, zeros: &ZeroList) -> Result<WeilValue> {
    if g0.is_zero() {
        return Ok(WeilValue {
            test_function: g0.label().to_string(),
            generic: 0.0,
            abs_square: 0.0,
            tail_bound: 0.0,
            zero_height: zeros.height_limit,
        });
    }
    let g = g0.mult_convolve()?;
    let generic = zeros::zero_sum(zeros, None, &g)?;
    let abs_square: f64 = zeros
        .gammas
        .par_iter()
        .map(|&gm| g0.mellin_value(C::new(0.5, gm)).map(|v| 2.0 * v.norm_sqr()))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .rev()
        .sum();
    Ok(WeilValue {
        test_function: g0.label().to_string(),
        generic: generic.value.re,
        abs_square,
        tail_bound: generic.tail_bound,
        zero_height: zeros.height_limit,
    })
}

/// The fixed family of g0 shapes on the additive support [−t/2, t/2], so
/// that g0 ∗ g0* lives on [−t, t].
pub fn weil_family(t: f64) -> Result<Vec<TestFunction>> {
    let r = t / 2.0;
    Ok(vec![
        TestFunction::bump(r, 0.0)?,
        crate::testfn::tilted_bump(r, 1.5)?,
        crate::testfn::tilted_bump(r, -1.5)?,
        crate::testfn::two_bump(r)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub support: f64,
    pub min_functional: f64,
    pub min_label: String,
    pub max_path_disagreement: f64,
    pub tail_bound: f64,
    pub values: Vec<WeilValue>,
}

pub fn positivity_scan(support_grid: &[f64], zeros: &ZeroList) -> Result<Vec<ScanRow>> {
    if support_grid.is_empty() {
        return Err(Error::Parameter("empty support grid".into()));
    }
    support_grid
        .iter()
        .map(|&t| {
            let values = weil_family(t)?
                .iter()
                .map(|g0| weil_functional(g0, zeros))
                .collect::<Result<Vec<_>>>()?;
            let min = values
                .iter()
                .min_by(|a, b| a.generic.partial_cmp(&b.generic).unwrap())
                .expect("family is nonempty");
            Ok(ScanRow {
                support: t,
                min_functional: min.generic,
                min_label: min.test_function.clone(),
                max_path_disagreement: values.iter().map(|v| (v.generic - v.abs_square).abs()).fold(0.0, f64::max),
                tail_bound: values.iter().map(|v| v.tail_bound).fold(0.0, f64::max),
                values,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MsrScalarState {
    pub s1: C,
    pub s2: C,
    pub phi1: C,
    pub phi2: C,
    #[serde(rename = "T")]
    pub t: f64,
}

fn tpow(t: f64, z: C) -> C {
    (z * t.ln()).exp()
}

/// ⟨Λ^T E(s1)φ1, Λ^T E(s2)φ2⟩ in the scalar case:
/// (2/(s1+s2)){φ1φ̄2 T^{s1+s2} − m(s1)·conj(m(s̄2)) φ1φ̄2 T^{−(s1+s2)}}
/// + (2/(s1−s2)){conj(m(s̄2)) φ1φ̄2 T^{s1−s2} − m(s1) φ1φ̄2 T^{−(s1−s2)}}.
pub fn msr_closed_form(st: &MsrScalarState) -> Result<C> {
    let (s1, s2) = (st.s1, st.s2);
    if (s1 + s2).norm() == 0.0 || (s1 - s2).norm() == 0.0 {
        return Err(Error::Domain(format!("Maaß–Selberg closed form needs s1 ± s2 ≠ 0 (s1 = {s1}, s2 = {s2})")));
    }
    if !(st.t > 0.0) {
        return Err(Error::Parameter(format!("T must be positive, got {}", st.t)));
    }
    let pp = st.phi1 * st.phi2.conj();
    let m1 = special::m_scalar(s1)?;
    let m2 = special::m_scalar(s2.conj())?.conj();
    let sum = s1 + s2;
    let diff = s1 - s2;
    Ok(pp * (2.0 / sum * (tpow(st.t, sum) - m1 * m2 * tpow(st.t, -sum))
        + 2.0 / diff * (m2 * tpow(st.t, diff) - m1 * tpow(st.t, -diff))))
}

/// h → 0 limit of the closed form at (s + h, −s):
/// φ1φ̄2 [4 log T − 2 m′/m(s) + (m(−s)T^{2s} − m(s)T^{−2s})/s].
pub fn msr_limit(s: C, t: f64, phi1: C, phi2: C) -> Result<C> {
    if s.norm() == 0.0 {
        return Err(Error::Domain("Maaß–Selberg limit needs s ≠ 0".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter(format!("T must be positive, got {t}")));
    }
    let m = special::m_scalar(s)?;
    let m_neg = special::m_scalar(-s)?;
    let md = special::m_logderiv(s)?;
    let pp = phi1 * phi2.conj();
    Ok(pp * (4.0 * t.ln() - 2.0 * md + (m_neg * tpow(t, 2.0 * s) - m * tpow(t, -2.0 * s)) / s))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MsrConvergence {
    pub s: C,
    #[serde(rename = "T")]
    pub t: f64,
    pub h: [f64; 2],
    /// |closed_form(s + h, −s) − limit| / h at each h.
    pub scaled_error: [f64; 2],
    /// scaled_error at the smaller h over that at the larger.
    pub ratio: f64,
}

pub fn msr_convergence(s: C, t: f64, h: [f64; 2]) -> Result<MsrConvergence> {
    let one = C::new(1.0, 0.0);
    let limit = msr_limit(s, t, one, one)?;
    let mut scaled = [0.0; 2];
    for (k, &hk) in h.iter().enumerate() {
        let v = msr_closed_form(&MsrScalarState { s1: s + hk, s2: -s, phi1: one, phi2: one, t })?;
        scaled[k] = (v - limit).norm() / hk;
    }
    Ok(MsrConvergence { s, t, h, scaled_error: scaled, ratio: scaled[1] / scaled[0] })
}
