//! Critical-line zeros of ζ and primitive Dirichlet L-functions: sign-change
//! scanning of the rotated completed function, file I/O, and sums of ĝ over
//! zeros with a tail bound.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::characters::{character_by_label, DirichletCharacter};
use crate::error::{Error, Result};
use crate::special;
use crate::testfn::TestFunction;

type C = Complex64;

pub const SCAN_STEP: f64 = 0.05;
pub const BRACKET_WIDTH: f64 = 1e-9;
pub const MAX_HEIGHT: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSource {
    File,
    Computed,
}

impl ZeroSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZeroSource::File => "file",
            ZeroSource::Computed => "computed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZeroList {
    pub gammas: Vec<f64>,
    pub lfunction_id: String,
    pub height_limit: f64,
    pub source: ZeroSource,
    pub rh_verified: bool,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    /// Zeros with lo < γ ≤ hi, keeping metadata.
    pub fn slice(&self, lo: f64, hi: f64) -> ZeroList {
        ZeroList {
            gammas: self.gammas.iter().copied().filter(|&g| g > lo && g <= hi).collect(),
            height_limit: hi.min(self.height_limit),
            ..self.clone()
        }
    }

    /// Maximum of |N(t) − smooth count| over midpoints between consecutive
    /// ordinates (where the counting function is unambiguous).
    pub fn count_deviation(&self) -> Result<f64> {
        let lf = LFunction::parse(&self.lfunction_id)?;
        let mut worst: f64 = 0.0;
        for (k, w) in self.gammas.windows(2).enumerate() {
            let mid = 0.5 * (w[0] + w[1]);
            worst = worst.max(((k + 1) as f64 - lf.smooth_count(mid)).abs());
        }
        Ok(worst)
    }
}

/// The L-functions whose zeros we can compute.
#[derive(Debug, Clone)]
pub enum LFunction {
    Zeta,
    Dirichlet(Box<DirichletCharacter>),
}

impl LFunction {
    /// "zeta" or "dirichlet:q.k"; the trivial character `dirichlet:1.0` is ζ.
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        if id == "zeta" {
            return Ok(LFunction::Zeta);
        }
        let label = id
            .strip_prefix("dirichlet:")
            .ok_or_else(|| Error::Parameter(format!("unknown L-function id '{id}' (want zeta or dirichlet:q.k)")))?;
        let chi = character_by_label(label)?;
        if chi.modulus == 1 {
            return Ok(LFunction::Zeta);
        }
        if !chi.is_primitive {
            return Err(Error::Domain(format!("character {label} is not primitive; its L-function has extra zeros on Re s = 0")));
        }
        Ok(LFunction::Dirichlet(Box::new(chi)))
    }

    pub fn id(&self) -> String {
        match self {
            LFunction::Zeta => "zeta".into(),
            LFunction::Dirichlet(chi) => format!("dirichlet:{}", chi.label()),
        }
    }

    pub fn character(&self) -> Option<&DirichletCharacter> {
        match self {
            LFunction::Zeta => None,
            LFunction::Dirichlet(c) => Some(c),
        }
    }

    /// Id of the conjugate L-function (itself for real characters).
    pub fn conjugate_id(&self) -> String {
        match self {
            LFunction::Zeta => "zeta".into(),
            LFunction::Dirichlet(chi) if chi.is_real() => self.id(),
            LFunction::Dirichlet(chi) => format!("dirichlet:{}", chi.conjugate().label()),
        }
    }

    /// Phase θ making the rotated function real on the critical line.
    pub fn theta(&self, t: f64) -> f64 {
        match self {
            LFunction::Zeta => special::log_gamma_unchecked(C::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln(),
            LFunction::Dirichlet(chi) => {
                let q = chi.modulus as f64;
                special::log_gamma_unchecked(C::new(0.25 + 0.5 * chi.a, 0.5 * t)).im + 0.5 * t * (q / PI).ln()
            }
        }
    }

    /// Real rotated completed function: Z(t) = e^{iθ(t)} ζ(½+it), or
    /// W^{−1/2} e^{iθ_χ(t)} L(½+it, χ).
    pub fn hardy_z(&self, t: f64) -> f64 {
        let s = C::new(0.5, t);
        match self {
            LFunction::Zeta => (C::from_polar(1.0, self.theta(t)) * special::zeta_with_derivative(s).0).re,
            LFunction::Dirichlet(chi) => {
                let w = chi.root_number.expect("primitive");
                let rot = C::from_polar(1.0, self.theta(t) - 0.5 * w.arg());
                let v = rot * chi.l_function(s).expect("s = 1/2 + it is never the pole");
                v.re
            }
        }
    }

    /// Smooth part of the zero-counting function N(T).
    pub fn smooth_count(&self, t: f64) -> f64 {
        match self {
            LFunction::Zeta => t / (2.0 * PI) * (t / (2.0 * PI * std::f64::consts::E)).ln() + 7.0 / 8.0,
            LFunction::Dirichlet(chi) => {
                let l_half = chi.l_function(C::new(0.5, 0.0)).expect("regular at 1/2");
                (self.theta(t) - l_half.arg()) / PI
            }
        }
    }
}

/// Sign-change scan of the rotated function on [0, t_max] with step
/// `SCAN_STEP`, refined by bisection; the count is checked against the
/// smooth counting function at midpoints between consecutive zeros and the
/// scan repeated at half step (twice) if it is off by more than one.
pub fn compute_zeros(lfunction_id: &str, t_max: f64) -> Result<ZeroList> {
    if !(t_max > 0.0) || t_max > MAX_HEIGHT {
        return Err(Error::Parameter(format!("t_max must lie in (0, {MAX_HEIGHT}], got {t_max}")));
    }
    let lf = LFunction::parse(lfunction_id)?;
    let mut step = SCAN_STEP;
    let mut last_bad = None;
    for _attempt in 0..3 {
        let gammas = scan(&lf, t_max, step);
        match first_count_mismatch(&lf, &gammas) {
            None => {
                return Ok(ZeroList {
                    gammas,
                    lfunction_id: lf.id(),
                    height_limit: t_max,
                    source: ZeroSource::Computed,
                    rh_verified: true,
                })
            }
            Some(bad) => last_bad = Some(bad),
        }
        step *= 0.5;
    }
    let (lo, hi, found, expected) = last_bad.expect("loop ran");
    Err(Error::IncompleteScan { lo, hi, found, expected })
}

fn first_count_mismatch(lf: &LFunction, gammas: &[f64]) -> Option<(f64, f64, usize, f64)> {
    for (k, w) in gammas.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        let expected = lf.smooth_count(mid);
        if ((k + 1) as f64 - expected).abs() > 1.0 {
            return Some((w[0], w[1], k + 1, expected));
        }
    }
    None
}

fn scan(lf: &LFunction, t_max: f64, step: f64) -> Vec<f64> {
    let n = (t_max / step).ceil() as usize;
    let chunk = 200;
    let mut found: Vec<f64> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let lo = c * chunk;
            let hi = ((c + 1) * chunk).min(n);
            let mut out = Vec::new();
            // start just above 0 (Z(0) can vanish for Dirichlet L at t = 0 only
            // if L(½) = 0, which does not happen for the characters in reach)
            let t_at = |i: usize| (i as f64 * step).min(t_max).max(1e-6);
            let mut a = t_at(lo);
            let mut za = lf.hardy_z(a);
            for i in lo + 1..=hi {
                let b = t_at(i);
                let zb = lf.hardy_z(b);
                if za == 0.0 {
                    out.push(a);
                } else if za * zb < 0.0 {
                    out.push(bisect(lf, a, b, za));
                }
                a = b;
                za = zb;
            }
            out
        })
        .collect();
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    found.dedup_by(|a, b| (*a - *b).abs() < BRACKET_WIDTH);
    found
}

fn bisect(lf: &LFunction, mut a: f64, mut b: f64, mut za: f64) -> f64 {
    while b - a > BRACKET_WIDTH {
        let m = 0.5 * (a + b);
        let zm = lf.hardy_z(m);
        if zm == 0.0 {
            return m;
        }
        if za * zm < 0.0 {
            b = m;
        } else {
            a = m;
            za = zm;
        }
    }
    0.5 * (a + b)
}

/// Parse a zero file: one decimal γ per line, ascending; '#' starts a comment.
pub fn parse_zeros(text: &str, lfunction_id: &str) -> Result<ZeroList> {
    let mut gammas = Vec::new();
    let mut height_limit = None;
    let mut source = ZeroSource::File;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            // headers written by `save_zeros`
            if let Some(h) = comment.trim().strip_prefix("height_limit:") {
                height_limit = h.trim().parse().ok();
            }
            if comment.trim() == "source: computed" {
                source = ZeroSource::Computed;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let g: f64 = line
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: format!("not a number: '{line}'") })?;
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::Parse { line: i + 1, msg: format!("ordinate must be positive, got {g}") });
        }
        if let Some(&prev) = gammas.last() {
            if g <= prev {
                return Err(Error::Parse { line: i + 1, msg: format!("not ascending: {g} after {prev}") });
            }
        }
        gammas.push(g);
    }
    let last = gammas.last().copied().unwrap_or(0.0);
    let height_limit = height_limit.filter(|&h: &f64| h >= last).unwrap_or(last);
    Ok(ZeroList { gammas, lfunction_id: lfunction_id.to_string(), height_limit, source, rh_verified: false })
}

pub fn load_zeros(path: &Path, lfunction_id: &str) -> Result<ZeroList> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_zeros(&text, lfunction_id)
}

pub fn format_zeros(z: &ZeroList) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# lfunction: {}", z.lfunction_id);
    let _ = writeln!(out, "# height_limit: {}", z.height_limit);
    let _ = writeln!(out, "# source: {}", z.source.as_str());
    for g in &z.gammas {
        let _ = writeln!(out, "{g:.12}");
    }
    out
}

pub fn save_zeros(z: &ZeroList, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, format_zeros(z))?;
    Ok(())
}

/// `<cache>/zeros/<lfunction_id>.txt`, with ':' replaced for portability.
pub fn cache_path(cache_dir: &Path, lfunction_id: &str) -> PathBuf {
    cache_dir.join("zeros").join(format!("{}.txt", lfunction_id.replace(':', "_")))
}

/// Zeros to at least `t_max`, from the cache when it reaches that height,
/// otherwise computed and written back.
pub fn cached_or_compute(cache_dir: Option<&Path>, lfunction_id: &str, t_max: f64) -> Result<ZeroList> {
    let canonical = LFunction::parse(lfunction_id)?.id();
    if let Some(dir) = cache_dir {
        let p = cache_path(dir, &canonical);
        if p.exists() {
            let z = load_zeros(&p, &canonical)?;
            if z.height_limit >= t_max && z.source == ZeroSource::Computed {
                let mut z = z.slice(0.0, t_max);
                z.rh_verified = true;
                return Ok(z);
            }
        }
    }
    let z = compute_zeros(&canonical, t_max)?;
    if let Some(dir) = cache_dir {
        save_zeros(&z, &cache_path(dir, &canonical))?;
    }
    Ok(z)
}

/// Re-check file-supplied zeros: a sign change of the rotated function
/// across [γ − δ, γ + δ] for every γ, and the counting check.
pub fn verify_zeros(z: &mut ZeroList, delta: f64) -> Result<()> {
    let lf = LFunction::parse(&z.lfunction_id)?;
    for &g in &z.gammas {
        let (a, b) = (lf.hardy_z(g - delta), lf.hardy_z(g + delta));
        if a * b > 0.0 {
            return Err(Error::Domain(format!("no sign change of Z around listed zero {g}")));
        }
    }
    if let Some((lo, hi, found, expected)) = first_count_mismatch(&lf, &z.gammas) {
        return Err(Error::IncompleteScan { lo, hi, found, expected });
    }
    z.rh_verified = true;
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroSum {
    /// Σ_ρ ĝ(ρ) over the listed zeros (both signs of γ).
    pub value: C,
    /// Bound on the omitted zeros above the height limit.
    pub tail_bound: f64,
    pub terms: usize,
}

/// Σ_ρ ĝ(ρ) with ρ = ½ ± iγ. For ζ and real χ the zero set is closed under
/// conjugation; for complex χ pass the zero list of χ̄, whose ordinates give
/// the zeros ½ − iγ′ of L(s, χ).
pub fn zero_sum(z: &ZeroList, conjugate: Option<&ZeroList>, g: &TestFunction) -> Result<ZeroSum> {
    if !z.rh_verified {
        return Err(Error::Domain(format!("zero list for {} has not been verified on the critical line", z.lfunction_id)));
    }
    let lf = LFunction::parse(&z.lfunction_id)?;
    let upper: Vec<C> = z
        .gammas
        .par_iter()
        .map(|&gm| g.mellin_value(C::new(0.5, gm)))
        .collect::<Result<_>>()?;
    let lower: Vec<C> = match conjugate {
        None => {
            // g is real, so ĝ(½ − iγ) is the conjugate
            upper.iter().map(|v| v.conj()).collect()
        }
        Some(zc) => zc
            .gammas
            .par_iter()
            .map(|&gm| g.mellin_value(C::new(0.5, -gm)))
            .collect::<Result<_>>()?,
    };
    let mut value = C::new(0.0, 0.0);
    // add from the small (high) end upward
    for v in upper.iter().rev().chain(lower.iter().rev()) {
        value += v;
    }
    let mut height = z.height_limit;
    if let Some(zc) = conjugate {
        height = height.min(zc.height_limit);
    }
    let tail_bound = tail_bound(&lf, g, height)?;
    Ok(ZeroSum { value, tail_bound, terms: upper.len() + lower.len() })
}

/// Like `zero_sum` but fails when the tail bound exceeds `tol`, naming the
/// height at which it would not.
pub fn zero_sum_checked(z: &ZeroList, conjugate: Option<&ZeroList>, g: &TestFunction, tol: f64) -> Result<ZeroSum> {
    let r = zero_sum(z, conjugate, g)?;
    if r.tail_bound > tol {
        let lf = LFunction::parse(&z.lfunction_id)?;
        // searched up to twice the computable height; beyond that report ∞
        let mut need = z.height_limit.max(10.0) * 1.5;
        while tail_bound(&lf, g, need)? > tol {
            need *= 1.5;
            if need > 2.0 * MAX_HEIGHT {
                need = f64::INFINITY;
                break;
            }
        }
        return Err(Error::InsufficientHeight { have: z.height_limit, need });
    }
    Ok(r)
}

/// Σ over zeros above `height` of |ĝ(½+iγ)| + |ĝ(½−iγ)|, bounded window by
/// window: the count in [t_k, t_{k+1}] from the smooth counting function
/// plus 2 (for S(T)), times twice the measured envelope of |ĝ| at the window
/// start. Windows run until the envelope reaches the quadrature noise floor
/// or the height has grown fourfold; the rest is closed off by extrapolating
/// the last window-to-window ratio.
pub fn tail_bound(lf: &LFunction, g: &TestFunction, height: f64) -> Result<f64> {
    let peak = g.mellin_value(C::new(0.5, 0.0))?.norm().max(g.integral()?.abs());
    let floor = 1e-15 * peak;
    let t_stop = (4.0 * height).max(height + 200.0);
    let mut total = 0.0;
    let mut t = height.max(0.0);
    let mut prev_term: Option<f64> = None;
    loop {
        let next = (t * 1.25).max(t + 10.0);
        let count = (lf.smooth_count(next) - lf.smooth_count(t)).max(0.0) + 2.0;
        let env = g.decay_envelope(0.5, t, 2.0)?.max(g.decay_envelope(0.5, -t - 2.0, 2.0)?);
        let term = 2.0 * env * count;
        total += term;
        if env < floor || next > t_stop {
            let ratio = prev_term.map_or(0.9, |p| (term / p).min(0.9));
            total += term * ratio / (1.0 - ratio);
            return Ok(total);
        }
        prev_term = Some(term);
        t = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_first_zeros() {
        let z = compute_zeros("zeta", 30.0).unwrap();
        assert_eq!(z.len(), 3);
        assert!((z.gammas[0] - 14.134725141734693).abs() < 1e-8);
        assert!((z.gammas[1] - 21.022039638771555).abs() < 1e-8);
        assert!((z.gammas[2] - 25.010857580145688).abs() < 1e-8);
        let z = compute_zeros("zeta", 100.0).unwrap();
        assert_eq!(z.len(), 29);
        for &g in &z.gammas {
            assert!(LFunction::Zeta.hardy_z(g).abs() < 1e-6);
        }
    }

    #[test]
    fn dirichlet_first_zero() {
        let z = compute_zeros("dirichlet:4.1", 15.0).unwrap();
        assert!((z.gammas[0] - 6.020948904697597).abs() < 1e-8, "{}", z.gammas[0]);
        assert!(compute_zeros("dirichlet:4.0", 15.0).is_err());
        assert!(compute_zeros("zeta", 2000.0).is_err());
    }

    #[test]
    fn file_round_trip_and_errors() {
        let z = parse_zeros("14.1347251417\n21.0220396388\n25.0108575801\n", "zeta").unwrap();
        assert_eq!(z.len(), 3);
        assert_eq!(z.height_limit, 25.0108575801);
        let computed = compute_zeros("zeta", 26.0).unwrap();
        for (a, b) in z.gammas.iter().zip(&computed.gammas) {
            assert!((a - b).abs() < 1e-9);
        }
        let e = parse_zeros("", "zeta").unwrap();
        assert!(e.is_empty() && e.height_limit == 0.0);
        match parse_zeros("21.0\n14.1\n", "zeta") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_zeros("# header\n14.1\nabc\n", "zeta"), Err(Error::Parse { line: 3, .. })));
        let back = parse_zeros(&format_zeros(&computed), "zeta").unwrap();
        assert_eq!(back.height_limit, 26.0);
        assert_eq!(back.source, ZeroSource::Computed);
        assert_eq!(back.gammas.len(), 3);
    }

    #[test]
    fn verify_file_zeros() {
        let mut z = parse_zeros("14.1347251417\n21.0220396388\n25.0108575801\n", "zeta").unwrap();
        assert!(zero_sum(&z, None, &TestFunction::bump(1.0, 0.0).unwrap()).is_err());
        verify_zeros(&mut z, 1e-6).unwrap();
        assert!(z.rh_verified);
        let mut bad = parse_zeros("14.1347251417\n20.0\n", "zeta").unwrap();
        assert!(verify_zeros(&mut bad, 1e-6).is_err());
    }

    #[test]
    fn zero_sum_basics() {
        let g = TestFunction::bump(2f64.ln(), 0.0).unwrap();
        let empty = ZeroList { gammas: vec![], lfunction_id: "zeta".into(), height_limit: 0.0, source: ZeroSource::File, rh_verified: true };
        let r = zero_sum(&empty, None, &g).unwrap();
        assert_eq!(r.value, C::new(0.0, 0.0));
        assert!(r.tail_bound > 0.0);
        let z = compute_zeros("zeta", 200.0).unwrap();
        let full = zero_sum(&z, None, &g).unwrap();
        let a = zero_sum(&z.slice(0.0, 80.0), None, &g).unwrap();
        let b = zero_sum(&z.slice(80.0, 200.0), None, &g).unwrap();
        assert!((a.value + b.value - full.value).norm() < 1e-15);
        assert!(full.value.im.abs() < 1e-15);
        // the tail bound covers the change from doubling the height
        let z400 = compute_zeros("zeta", 400.0).unwrap();
        let more = zero_sum(&z400, None, &g).unwrap();
        assert!((more.value - full.value).norm() <= full.tail_bound);
        assert!(zero_sum_checked(&z, None, &g, 1e-30).is_err());
    }
}
