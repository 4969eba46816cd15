//! Dirichlet characters (the Hecke characters of ℚ) and the von Mangoldt
//! function.
//!
//! Characters mod q are labelled `q.k`: the unit group is split by CRT into
//! cyclic factors (odd prime powers ascending, then for 2^e the factor
//! generated by −1 followed by the one generated by 5), and k is read as a
//! mixed-radix number whose digits are the exponents χ(g_i) = e(k_i/ord_i),
//! first factor least significant. `q.0` is always the principal character.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::special;

type C = Complex64;

#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub index: u64,
    /// χ(k) for k = 0..q−1.
    pub values: Vec<C>,
    /// 0 for even, 1 for odd.
    pub parity: u8,
    pub conductor: u64,
    pub is_primitive: bool,
    /// W(χ) = τ(χ)/(i^a √q); present for primitive characters.
    pub root_number: Option<C>,
    /// Archimedean ramification w = a + ib; enumeration gives a = parity, b = 0.
    pub a: f64,
    pub b: f64,
}

impl DirichletCharacter {
    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus, self.index)
    }

    pub fn value(&self, n: u64) -> C {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    /// δ_χ: 1 for the trivial character of conductor 1, else 0.
    pub fn delta(&self) -> f64 {
        if self.conductor == 1 {
            1.0
        } else {
            0.0
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.abs() < 1e-12)
    }

    /// Value at n of the primitive character inducing this one.
    pub fn primitive_value(&self, n: u64) -> C {
        let f = self.conductor;
        if gcd(n % f, f) != 1 && f != 1 {
            return C::new(0.0, 0.0);
        }
        let mut a = n % f;
        while gcd(a, self.modulus) != 1 {
            a += f;
        }
        self.value(a)
    }

    /// Conjugate character, with its label inside the same enumeration.
    pub fn conjugate(&self) -> DirichletCharacter {
        let all = enumerate_characters(self.modulus).expect("modulus already validated");
        all.into_iter()
            .find(|c| c.values.iter().zip(&self.values).all(|(x, y)| (x - y.conj()).norm() < 1e-9))
            .expect("conjugate character exists")
    }

    /// L(s, χ) = q^{−s} Σ_a χ(a) ζ(s, a/q), with its s-derivative.
    pub fn l_function_with_derivative(&self, s: C) -> Result<(C, C)> {
        let q = self.modulus as f64;
        if self.modulus == 1 {
            return special::hurwitz_zeta_with_derivative(s, 1.0);
        }
        let mut v = C::new(0.0, 0.0);
        let mut d = C::new(0.0, 0.0);
        for a in 1..self.modulus {
            let chi = self.values[a as usize];
            if chi.norm() == 0.0 {
                continue;
            }
            let (h, dh) = special::hurwitz_zeta_with_derivative(s, a as f64 / q)?;
            v += chi * h;
            d += chi * dh;
        }
        let qs = (-s * q.ln()).exp();
        Ok((qs * v, qs * (d - q.ln() * v)))
    }

    pub fn l_function(&self, s: C) -> Result<C> {
        self.l_function_with_derivative(s).map(|x| x.0)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// One cyclic factor of (ℤ/qℤ)^*: discrete log table on the residues mod `pe`.
struct CyclicFactor {
    pe: u64,
    order: u64,
    /// log[r] for r mod pe (u64::MAX where undefined).
    log: Vec<u64>,
    /// For the factor generated by 5 mod 2^e: logs are taken of ±r.
    sign_fold: bool,
}

impl CyclicFactor {
    fn dlog(&self, n: u64) -> u64 {
        let mut r = n % self.pe;
        if self.sign_fold && r % 4 == 3 {
            r = self.pe - r;
        }
        self.log[r as usize]
    }
}

fn primitive_root(p: u64, pe: u64, phi: u64) -> u64 {
    let prime_factors: Vec<u64> = factorize(phi).into_iter().map(|(f, _)| f).collect();
    (2..pe)
        .find(|&g| gcd(g, p) == 1 && prime_factors.iter().all(|&f| pow_mod(g, phi / f, pe) != 1))
        .unwrap_or(1)
}

fn cyclic_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    let fac = factorize(q);
    let build = |pe: u64, g: u64, order: u64, sign_fold: bool| {
        let mut log = vec![u64::MAX; pe as usize];
        let mut x = 1u64;
        for k in 0..order {
            log[x as usize] = k;
            x = x * g % pe;
        }
        CyclicFactor { pe, order, log, sign_fold }
    };
    for &(p, e) in fac.iter().filter(|(p, _)| *p != 2) {
        let pe = p.pow(e);
        let phi = pe / p * (p - 1);
        out.push(build(pe, primitive_root(p, pe, phi), phi, false));
    }
    if let Some(&(_, e)) = fac.iter().find(|(p, _)| *p == 2) {
        let pe = 1u64 << e;
        if e >= 2 {
            // factor generated by −1: log is 1 exactly for r ≡ 3 mod 4
            let mut log = vec![u64::MAX; pe as usize];
            for r in (1..pe).step_by(2) {
                log[r as usize] = if r % 4 == 3 { 1 } else { 0 };
            }
            out.push(CyclicFactor { pe, order: 2, log, sign_fold: false });
        }
        if e >= 3 {
            out.push(build(pe, 5, pe / 4, true));
        }
    }
    out
}

/// All φ(q) characters mod q, ordered by index.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    if q > 1_000_000 {
        return Err(Error::Parameter(format!("modulus {q} exceeds 10^6")));
    }
    let factors = cyclic_factors(q);
    let count: u64 = factors.iter().map(|f| f.order).product();
    let logs: Vec<Option<Vec<u64>>> = (0..q)
        .map(|n| if gcd(n, q) == 1 { Some(factors.iter().map(|f| f.dlog(n)).collect()) } else { None })
        .collect();
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count {
        let mut digits = Vec::with_capacity(factors.len());
        let mut rest = index;
        for f in &factors {
            digits.push(rest % f.order);
            rest /= f.order;
        }
        let values: Vec<C> = logs
            .iter()
            .map(|l| match l {
                None => C::new(0.0, 0.0),
                Some(l) => {
                    let mut phase = 0.0;
                    for ((k, lg), f) in digits.iter().zip(l).zip(&factors) {
                        phase += ((k * lg) % f.order) as f64 / f.order as f64;
                    }
                    root_of_unity(phase)
                }
            })
            .collect();
        out.push(finish_character(q, index, values));
    }
    Ok(out)
}

fn root_of_unity(phase: f64) -> C {
    let p = phase.fract();
    // exact values at the quarter turns keep real characters exactly real
    let q4 = p * 4.0;
    if (q4 - q4.round()).abs() < 1e-12 {
        return match (q4.round() as i64).rem_euclid(4) {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        };
    }
    C::from_polar(1.0, 2.0 * PI * p)
}

fn finish_character(q: u64, index: u64, values: Vec<C>) -> DirichletCharacter {
    let parity = if q == 1 || values[(q - 1) as usize].re > 0.0 { 0 } else { 1 };
    let conductor = (1..=q)
        .filter(|d| q % d == 0)
        .find(|&d| (1..q.max(2)).filter(|&a| a % d == 1 % d && gcd(a, q) == 1).all(|a| (values[(a % q) as usize] - 1.0).norm() < 1e-9))
        .unwrap_or(q);
    let mut chi = DirichletCharacter {
        modulus: q,
        index,
        values,
        parity,
        conductor,
        is_primitive: conductor == q,
        root_number: None,
        a: parity as f64,
        b: 0.0,
    };
    if chi.is_primitive {
        let tau = gauss_sum(&chi).expect("primitive");
        let ia = if parity == 0 { C::new(1.0, 0.0) } else { C::new(0.0, 1.0) };
        chi.root_number = Some(tau / (ia * (q as f64).sqrt()));
    }
    chi
}

/// Parse a `q.k` label.
pub fn character_by_label(label: &str) -> Result<DirichletCharacter> {
    let (q, k) = label
        .split_once('.')
        .ok_or_else(|| Error::Parameter(format!("character label '{label}' is not of the form q.k")))?;
    let q: u64 = q.trim().parse().map_err(|_| Error::Parameter(format!("bad modulus in '{label}'")))?;
    let k: u64 = k.trim().parse().map_err(|_| Error::Parameter(format!("bad index in '{label}'")))?;
    let all = enumerate_characters(q)?;
    let n = all.len();
    all.into_iter()
        .nth(k as usize)
        .ok_or_else(|| Error::Parameter(format!("index {k} out of range: {n} characters mod {q}")))
}

/// τ(χ) = Σ_a χ(a) e^{2πia/q}.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<C> {
    if !chi.is_primitive {
        return Err(Error::Domain(format!("character {} is not primitive", chi.label())));
    }
    let q = chi.modulus;
    Ok((0..q).map(|a| chi.values[a as usize] * root_of_unity(a as f64 / q as f64)).sum())
}

pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let (p, e) = factorize(n)[0];
    if p.pow(e) == n {
        (p as f64).ln()
    } else {
        0.0
    }
}

/// Λ(n) for n = 0..=n_max by sieve.
pub fn von_mangoldt_table(n_max: usize) -> Vec<f64> {
    let mut lam = vec![0.0; n_max + 1];
    let mut composite = vec![false; n_max + 1];
    for p in 2..=n_max {
        if composite[p] {
            continue;
        }
        let mut m = p * p;
        while m <= n_max {
            composite[m] = true;
            m += p;
        }
        let lp = (p as f64).ln();
        let mut pk = p;
        loop {
            lam[pk] = lp;
            match pk.checked_mul(p) {
                Some(next) if next <= n_max => pk = next,
                _ => break,
            }
        }
    }
    lam
}

#[derive(Debug, Clone, Copy)]
pub struct LocalFactorCheck {
    /// −χ(p) p^{−s} log p / (1 − χ(p) p^{−s})
    pub closed_form: C,
    /// −log p Σ_{n=1}^{terms} χ(p)^n p^{−ns}
    pub series: C,
    pub ramified: bool,
}

/// d/ds log L_p(s, χ) in closed form and as its geometric series.
pub fn local_factor_logderiv_check(p: u64, chi: &DirichletCharacter, s: C, terms: usize) -> Result<LocalFactorCheck> {
    if !is_prime(p) {
        return Err(Error::Parameter(format!("{p} is not prime")));
    }
    if !(s.re > 1.0) {
        return Err(Error::Domain(format!("need Re s > 1, got {s}")));
    }
    if chi.conductor % p == 0 {
        return Ok(LocalFactorCheck { closed_form: C::new(0.0, 0.0), series: C::new(0.0, 0.0), ramified: true });
    }
    let lp = (p as f64).ln();
    let x = chi.primitive_value(p) * (-s * lp).exp();
    let closed_form = -x * lp / (1.0 - x);
    let mut series = C::new(0.0, 0.0);
    let mut pw = x;
    for _ in 0..terms {
        series += pw;
        pw *= x;
    }
    Ok(LocalFactorCheck { closed_form, series: -series * lp, ramified: false })
}
