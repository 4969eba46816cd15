use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::Path;

use weiltrace::characters::character_by_label;
use weiltrace::explicit::{self, Variant};
use weiltrace::spectral::{self, MIN_TRUNCATION};
use weiltrace::testfn::{parse_number, TestFunction};
use weiltrace::zeros::{self, LFunction, ZeroList};
use weiltrace::{special, Error, Result};

use crate::config::{RunConfig, ZeroSourceSpec};
use crate::output;

type C = Complex64;

/// Half-width of the sign-change check applied to imported zeros.
const IMPORT_CHECK_DELTA: f64 = 1e-6;

pub struct Outcome {
    pub command: &'static str,
    pub passed: bool,
    pub summary: Value,
    pub results: Vec<Value>,
    /// Replaces the generic CSV rendering of `results`.
    pub csv: Option<String>,
    /// One line for the terminal.
    pub message: String,
}

impl Outcome {
    pub fn document(&self, cfg: &RunConfig) -> Value {
        json!({
            "schema_version": output::SCHEMA_VERSION,
            "command": self.command,
            "status": if self.passed { "pass" } else { "fail" },
            "config": {
                "zeros": cfg.zeros.describe(),
                "cache": cfg.cache.as_ref().map(|p| p.display().to_string()),
                "tolerance": cfg.tolerance,
                "precision": cfg.precision.target_abs_error,
            },
            "summary": self.summary,
            "results": self.results,
        })
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// `a`, `bi`, `a+bi`, `a-i`, … with plain decimal parts.
pub fn parse_complex(s: &str) -> Result<C> {
    let bad = || Error::Parameter(format!("cannot parse complex number '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(C::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .unwrap_or(0);
    let (re, im) = body.split_at(split);
    let re: f64 = if re.is_empty() { 0.0 } else { re.parse().map_err(|_| bad())? };
    let im: f64 = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(C::new(re, im))
}

/// `lo:hi:logN` (N log-spaced points, both ends included), `lo:hi:N` or
/// `lo:hi:linN` (linear), or a comma-separated list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, spec] => {
            let (lo, hi) = (parse_number(lo)?, parse_number(hi)?);
            let (log, n) = match spec.strip_prefix("log") {
                Some(n) => (true, n),
                None => (false, spec.strip_prefix("lin").unwrap_or(spec)),
            };
            let n: usize = n.parse().map_err(|_| Error::Parameter(format!("bad point count in grid '{s}'")))?;
            if n < 2 || !(hi > lo) || (log && !(lo > 0.0)) {
                return Err(Error::Parameter(format!("grid '{s}' needs lo < hi, at least 2 points, lo > 0 for log spacing")));
            }
            (0..n)
                .map(|k| {
                    let f = k as f64 / (n - 1) as f64;
                    if log {
                        (lo.ln() + f * (hi.ln() - lo.ln())).exp()
                    } else {
                        lo + f * (hi - lo)
                    }
                })
                .collect()
        }
        [list] => list.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_number(x.trim())).collect::<Result<Vec<_>>>()?,
        _ => return Err(Error::Parameter(format!("cannot parse grid '{s}'"))),
    };
    if grid.is_empty() {
        return Err(Error::Parameter("empty grid".into()));
    }
    Ok(grid)
}

fn load_file_zeros(path: &Path, id: &str) -> Result<ZeroList> {
    let mut z = zeros::load_zeros(path, id)?;
    zeros::verify_zeros(&mut z, IMPORT_CHECK_DELTA)?;
    Ok(z)
}

/// Zeros for `id` from the configured source.
pub fn zero_list(cfg: &RunConfig, id: &str) -> Result<ZeroList> {
    match &cfg.zeros {
        ZeroSourceSpec::Compute(t) => zeros::cached_or_compute(cfg.cache.as_deref(), id, *t),
        ZeroSourceSpec::File(p) => load_file_zeros(p, id),
    }
}

fn test_functions(specs: &[String], default: &str) -> Result<Vec<TestFunction>> {
    if specs.is_empty() {
        return Ok(vec![TestFunction::parse(default)?]);
    }
    specs.iter().map(|s| TestFunction::parse(s)).collect()
}

fn within(residual: Option<f64>, tol: f64) -> bool {
    residual.is_some_and(|r| r.abs() <= tol)
}

pub fn verify_zeta_explicit(cfg: &RunConfig, g_specs: &[String], variant: &str) -> Result<Outcome> {
    let variant = Variant::parse(variant)?;
    let gs = test_functions(g_specs, "bump:logr=log8")?;
    let z = zero_list(cfg, "zeta")?;
    let mut results = Vec::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for g in &gs {
        let rep = explicit::verify_zeta_explicit(g, variant, &z)?;
        let tol = cfg.tolerance * rep.scale();
        let ok = within(rep.residual, tol);
        passed &= ok;
        worst = worst.max(rep.residual.map_or(f64::INFINITY, f64::abs));
        let mut v = to_value(&rep);
        v["tolerance"] = json!(tol);
        v["within_tolerance"] = json!(ok);
        results.push(v);
    }
    Ok(Outcome {
        command: "verify zeta-explicit",
        passed,
        summary: json!({"variant": variant.as_str(), "max_abs_residual": worst, "zero_count": z.len(), "zero_height": z.height_limit}),
        results,
        csv: None,
        message: format!("{} test function(s), max |residual| {worst:.3e}", gs.len()),
    })
}

pub fn verify_hecke_explicit(cfg: &RunConfig, chis: &[String], g_specs: &[String], conjugate_zeros: Option<&Path>) -> Result<Outcome> {
    let labels: Vec<String> = if chis.is_empty() { vec!["1.0".into(), "3.1".into(), "4.1".into()] } else { chis.to_vec() };
    if matches!(cfg.zeros, ZeroSourceSpec::File(_)) && labels.len() != 1 {
        return Err(Error::Parameter("a zeros file serves exactly one character; pass a single --chi".into()));
    }
    let gs = test_functions(g_specs, "bump:logr=log8")?;
    let mut results = Vec::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for label in &labels {
        let lf = LFunction::parse(&format!("dirichlet:{label}"))?;
        let chi = match lf.character() {
            Some(c) => c.clone(),
            None => character_by_label("1.0")?,
        };
        let z = zero_list(cfg, &lf.id())?;
        let conj = if chi.is_real() {
            None
        } else {
            Some(match (&cfg.zeros, conjugate_zeros) {
                (ZeroSourceSpec::Compute(_), _) => zero_list(cfg, &lf.conjugate_id())?,
                (ZeroSourceSpec::File(_), Some(p)) => load_file_zeros(p, &lf.conjugate_id())?,
                (ZeroSourceSpec::File(_), None) => {
                    return Err(Error::Parameter(format!("complex character {label} needs --conjugate-zeros")));
                }
            })
        };
        for g in &gs {
            let rep = explicit::verify_dirichlet(g, &chi, &z, conj.as_ref())?;
            let tol = cfg.tolerance * rep.scale();
            let ok = within(rep.residual, tol);
            passed &= ok;
            worst = worst.max(rep.residual.map_or(f64::INFINITY, f64::abs));
            let mut v = to_value(&rep);
            v["tolerance"] = json!(tol);
            v["within_tolerance"] = json!(ok);
            results.push(v);
        }
    }
    Ok(Outcome {
        command: "verify hecke-explicit",
        passed,
        summary: json!({"characters": labels, "max_abs_residual": worst}),
        results,
        csv: None,
        message: format!("{} check(s), max |residual| {worst:.3e}", labels.len() * gs.len()),
    })
}

/// Cutoff of the truncated integral before extrapolation.
const GAUSS_WEIL_CUTOFF: f64 = 1000.0;

pub fn verify_gauss_weil(cfg: &RunConfig, points: &[String]) -> Result<Outcome> {
    let defaults = ["0.5", "1", "2", "1+i", "0.5+3i"].map(String::from);
    let points = if points.is_empty() { &defaults[..] } else { points };
    let mut results = Vec::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for p in points {
        let s = parse_complex(p)?;
        let pv = special::gauss_weil_pv(s, GAUSS_WEIL_CUTOFF)?;
        let target = -2.0 * special::digamma(s)?;
        let delta = (pv.value - target).norm();
        let ok = delta <= cfg.tolerance;
        passed &= ok;
        worst = worst.max(delta);
        results.push(json!({
            "s": p,
            "s_re": s.re, "s_im": s.im,
            "pv_re": pv.value.re, "pv_im": pv.value.im,
            "pv0_re": pv.value_pv0.re, "pv0_im": pv.value_pv0.im,
            "minus_two_digamma_re": target.re, "minus_two_digamma_im": target.im,
            "delta": delta,
            "extrapolation_error": pv.extrapolation_error,
            "within_tolerance": ok,
        }));
    }
    Ok(Outcome {
        command: "verify gauss-weil",
        passed,
        summary: json!({"max_delta": worst}),
        results,
        csv: None,
        message: format!("|pv + 2ψ(s)| ≤ {worst:.3e} over {} point(s)", points.len()),
    })
}

/// Acceptance band for the ratio of scaled errors at the two step sizes.
pub const MSR_RATIO_BAND: (f64, f64) = (0.8, 1.2);

pub fn verify_maass_selberg(points: &[String], t: f64, h: &[f64]) -> Result<Outcome> {
    let defaults = ["0.3+2i", "0.25+5i"].map(String::from);
    let points = if points.is_empty() { &defaults[..] } else { points };
    let h: [f64; 2] = h
        .try_into()
        .map_err(|_| Error::Parameter(format!("--h needs exactly two step sizes, got {}", h.len())))?;
    if !(h[0] > h[1] && h[1] > 0.0) {
        return Err(Error::Parameter("--h needs two positive step sizes, larger first".into()));
    }
    let mut results = Vec::new();
    let mut passed = true;
    for p in points {
        let s = parse_complex(p)?;
        let c = spectral::msr_convergence(s, t, h)?;
        let ok = c.ratio >= MSR_RATIO_BAND.0 && c.ratio <= MSR_RATIO_BAND.1;
        passed &= ok;
        let mut v = to_value(&c);
        v["s_re"] = json!(s.re);
        v["s_im"] = json!(s.im);
        v["within_band"] = json!(ok);
        results.push(v);
    }
    Ok(Outcome {
        command: "verify maass-selberg",
        passed,
        summary: json!({"ratio_band": [MSR_RATIO_BAND.0, MSR_RATIO_BAND.1]}),
        message: format!("{} point(s), first-order convergence {}", points.len(), if passed { "confirmed" } else { "NOT confirmed" }),
        results,
        csv: None,
    })
}

pub fn bound_sweep(cfg: &RunConfig, g0_spec: &str, grid: Option<&str>) -> Result<Outcome> {
    let grid = match grid {
        Some(s) => parse_grid(s)?,
        None => spectral::log_grid(MIN_TRUNCATION, 100.0, 20),
    };
    let g0 = TestFunction::parse(g0_spec)?;
    let g = g0.mult_convolve()?;
    let z = zero_list(cfg, "zeta")?;
    let rows = spectral::bound_sweep(&g, &grid, &z)?;
    let (min_t, min_slack) = rows.iter().map(|r| (r.t, r.slack)).fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let passed = min_slack >= -cfg.tolerance;
    let csv = output::numeric_csv(spectral::BOUND_CSV_HEADER, rows.iter().map(|r| r.csv_fields().to_vec()));
    Ok(Outcome {
        command: "bound-sweep",
        passed,
        summary: json!({"test_function": g.label(), "min_slack": min_slack, "min_slack_T": min_t, "points": rows.len()}),
        results: rows.iter().map(to_value).collect(),
        csv: Some(csv),
        message: format!("{} points, min slack {min_slack:.6e} at T = {min_t:.6}", rows.len()),
    })
}

pub fn weil_positivity(cfg: &RunConfig, supports: &str) -> Result<Outcome> {
    let grid = parse_grid(supports)?;
    let z = zero_list(cfg, "zeta")?;
    let rows = spectral::positivity_scan(&grid, &z)?;
    let mut passed = true;
    for r in &rows {
        passed &= r.min_functional >= -r.tail_bound && r.max_path_disagreement <= cfg.tolerance;
    }
    let min = rows.iter().map(|r| r.min_functional).fold(f64::INFINITY, f64::min);
    let disagreement = rows.iter().map(|r| r.max_path_disagreement).fold(0.0, f64::max);
    Ok(Outcome {
        command: "weil-positivity",
        passed,
        summary: json!({"min_functional": min, "max_path_disagreement": disagreement}),
        results: rows.iter().map(to_value).collect(),
        csv: None,
        message: format!("{} support(s), min W = {min:.6e}, path disagreement {disagreement:.1e}", rows.len()),
    })
}

fn zeros_summary(z: &ZeroList) -> Value {
    json!({
        "lfunction": z.lfunction_id,
        "count": z.len(),
        "height_limit": z.height_limit,
        "first": z.gammas.first().copied(),
        "source": z.source.as_str(),
    })
}

fn zeros_message(z: &ZeroList) -> String {
    format!("{} zeros of {} up to height {}", z.len(), z.lfunction_id, z.height_limit)
}

pub fn zeros_compute(cfg: &RunConfig, lfunction: &str, t_max: f64) -> Result<Outcome> {
    let id = LFunction::parse(lfunction)?.id();
    let z = zeros::cached_or_compute(cfg.cache.as_deref(), &id, t_max)?;
    Ok(Outcome {
        command: "zeros compute",
        passed: true,
        summary: zeros_summary(&z),
        results: vec![],
        csv: None,
        message: zeros_message(&z),
    })
}

pub fn zeros_import(cfg: &RunConfig, path: &Path, lfunction: &str) -> Result<Outcome> {
    let id = LFunction::parse(lfunction)?.id();
    let cache = cfg.cache.as_deref().ok_or_else(|| Error::Parameter("zeros import needs a cache directory (--zeros-cache or APP_CACHE)".into()))?;
    let z = load_file_zeros(path, &id)?;
    let target = zeros::cache_path(cache, &id);
    zeros::save_zeros(&z, &target)?;
    Ok(Outcome {
        command: "zeros import",
        passed: true,
        summary: zeros_summary(&z),
        results: vec![],
        csv: None,
        message: format!("imported {} into {}", zeros_message(&z), target.display()),
    })
}

pub fn zeros_export(cfg: &RunConfig, path: &Path, lfunction: &str) -> Result<Outcome> {
    let id = LFunction::parse(lfunction)?.id();
    let z = zero_list(cfg, &id)?;
    zeros::save_zeros(&z, path)?;
    Ok(Outcome {
        command: "zeros export",
        passed: true,
        summary: zeros_summary(&z),
        results: vec![],
        csv: None,
        message: format!("wrote {} to {}", zeros_message(&z), path.display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), C::new(0.5, 0.0));
        assert_eq!(parse_complex("1+i").unwrap(), C::new(1.0, 1.0));
        assert_eq!(parse_complex("0.3 + 2i").unwrap(), C::new(0.3, 2.0));
        assert_eq!(parse_complex("-2.5e-1-3i").unwrap(), C::new(-0.25, -3.0));
        assert_eq!(parse_complex("4i").unwrap(), C::new(0.0, 4.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert!(parse_complex("1+xi").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("1:100:log3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 10.0).abs() < 1e-12 && (g[2] - 100.0).abs() < 1e-12);
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0:1:lin2").unwrap(), vec![0.0, 1.0]);
        let l = parse_grid("log2/2,log2").unwrap();
        assert!((l[0] - 2f64.ln() / 2.0).abs() < 1e-15 && l.len() == 2);
        for bad in ["", "1:2", "0:1:log3", "2:1:3", "1:2:1", "a,b"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
