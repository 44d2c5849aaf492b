//! Generator families, semigroup words and inverse branches.
//!
//! A semigroup element is a [`SemigroupWord`] over a list of
//! [`GeneratorSpec`]s. Words evaluate right to left: the word `(a, b, c)`
//! is `f_a ∘ f_b ∘ f_c`, so `f_c` is applied first.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Residual bound every returned preimage satisfies, relative to `max(1, |w|)`.
pub const FORWARD_CHECK_TOL: f64 = 1e-9;

/// Upper bound on the number of words [`enumerate_words`] will produce.
pub const DEFAULT_WORD_CAP: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `z ↦ λ sin z + c`
    ScaledSine,
    /// `z ↦ λ e^z + c`
    ScaledExp,
    /// `z ↦ z − e^z + 1 + 2πi`
    ZMinusExpShift,
    /// `z ↦ z^d / a`
    PowerOverA,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::ScaledSine => "scaled-sine",
            Family::ScaledExp => "scaled-exp",
            Family::ZMinusExpShift => "z-minus-exp-shift",
            Family::PowerOverA => "power-over-a",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        match name {
            "scaled-sine" => Some(Family::ScaledSine),
            "scaled-exp" => Some(Family::ScaledExp),
            "z-minus-exp-shift" => Some(Family::ZMinusExpShift),
            "power-over-a" => Some(Family::PowerOverA),
            _ => None,
        }
    }

    pub fn is_transcendental(self) -> bool {
        !matches!(self, Family::PowerOverA)
    }
}

/// A parameterized generator. Fields a family does not use are held at zero,
/// so structural equality is equality of the maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    family: Family,
    lambda: Complex64,
    shift: Complex64,
    a: Complex64,
    degree: u32,
}

impl GeneratorSpec {
    pub fn scaled_sine(lambda: Complex64, shift: Complex64) -> Result<Self> {
        Self::transcendental(Family::ScaledSine, lambda, shift)
    }

    pub fn scaled_exp(lambda: Complex64, shift: Complex64) -> Result<Self> {
        Self::transcendental(Family::ScaledExp, lambda, shift)
    }

    pub fn z_minus_exp_shift() -> Self {
        GeneratorSpec {
            family: Family::ZMinusExpShift,
            lambda: Complex64::new(0.0, 0.0),
            shift: Complex64::new(0.0, 0.0),
            a: Complex64::new(0.0, 0.0),
            degree: 0,
        }
    }

    /// `z ↦ z^degree / a` with `|a| > 1`.
    pub fn power_over_a(a: Complex64, degree: u32) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite()) || a.norm() <= 1.0 {
            return Err(Error::InvalidGenerator(format!(
                "power-over-a requires |a| > 1, got a = {a}"
            )));
        }
        Self::power_unchecked(a, degree)
    }

    /// The monic power `z ↦ z^degree`, the one permitted exception to `|a| > 1`.
    pub fn power(degree: u32) -> Result<Self> {
        Self::power_unchecked(Complex64::new(1.0, 0.0), degree)
    }

    /// Rebuilds a generator from raw fields, enforcing the family invariants.
    pub fn from_parts(
        family: Family,
        lambda: Complex64,
        shift: Complex64,
        a: Complex64,
        degree: u32,
    ) -> Result<Self> {
        match family {
            Family::ScaledSine | Family::ScaledExp => Self::transcendental(family, lambda, shift),
            Family::ZMinusExpShift => Ok(Self::z_minus_exp_shift()),
            Family::PowerOverA if a == Complex64::new(1.0, 0.0) => Self::power(degree),
            Family::PowerOverA => Self::power_over_a(a, degree),
        }
    }

    fn transcendental(family: Family, lambda: Complex64, shift: Complex64) -> Result<Self> {
        if !finite(lambda) || !finite(shift) {
            return Err(Error::InvalidGenerator(format!(
                "{} parameters must be finite",
                family.name()
            )));
        }
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidGenerator(format!(
                "{} requires λ ≠ 0",
                family.name()
            )));
        }
        Ok(GeneratorSpec {
            family,
            lambda,
            shift,
            a: Complex64::new(0.0, 0.0),
            degree: 0,
        })
    }

    fn power_unchecked(a: Complex64, degree: u32) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidGenerator(format!(
                "power-over-a requires degree ≥ 2, got {degree}"
            )));
        }
        Ok(GeneratorSpec {
            family: Family::PowerOverA,
            lambda: Complex64::new(0.0, 0.0),
            shift: Complex64::new(0.0, 0.0),
            a,
            degree,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn shift(&self) -> Complex64 {
        self.shift
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Forward evaluation without input validation. Overflow shows up as a
    /// non-finite result.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match self.family {
            Family::ScaledSine => self.lambda * z.sin() + self.shift,
            Family::ScaledExp => self.lambda * z.exp() + self.shift,
            Family::ZMinusExpShift => z - z.exp() + Complex64::new(1.0, TWO_PI),
            Family::PowerOverA => z.powu(self.degree) / self.a,
        }
    }

    #[inline]
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self.family {
            Family::ScaledSine => self.lambda * z.cos(),
            Family::ScaledExp => self.lambda * z.exp(),
            Family::ZMinusExpShift => Complex64::new(1.0, 0.0) - z.exp(),
            Family::PowerOverA => z.powu(self.degree - 1) * self.degree as f64 / self.a,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::ScaledSine => write!(f, "({}) sin z + ({})", self.lambda, self.shift),
            Family::ScaledExp => write!(f, "({}) e^z + ({})", self.lambda, self.shift),
            Family::ZMinusExpShift => write!(f, "z - e^z + 1 + 2πi"),
            Family::PowerOverA => write!(f, "z^{} / ({})", self.degree, self.a),
        }
    }
}

#[inline]
pub(crate) fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn check_finite(z: Complex64) -> Result<()> {
    if finite(z) {
        Ok(())
    } else {
        Err(Error::NonFiniteInput(z.to_string()))
    }
}

pub fn eval_generator(g: &GeneratorSpec, z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    Ok(g.apply(z))
}

/// A non-empty composition sequence of generator indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SemigroupWord(Vec<usize>);

impl SemigroupWord {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(SemigroupWord(indices))
    }

    pub fn single(index: usize) -> Self {
        SemigroupWord(vec![index])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn concat(&self, other: &SemigroupWord) -> SemigroupWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SemigroupWord(v)
    }

    pub fn validate(&self, gen_count: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= gen_count) {
            Some(&index) => Err(Error::IndexOutOfRange {
                index,
                count: gen_count,
            }),
            None => Ok(()),
        }
    }

    /// Applies the word without validation. Indices must be in range.
    #[inline]
    pub fn apply(&self, gens: &[GeneratorSpec], z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(z, |acc, &i| gens[i].apply(acc))
    }

    /// Derivative of the composition by the chain rule.
    pub fn derivative(&self, gens: &[GeneratorSpec], z: Complex64) -> Complex64 {
        let mut acc = z;
        let mut d = Complex64::new(1.0, 0.0);
        for &i in self.0.iter().rev() {
            d *= gens[i].derivative(acc);
            acc = gens[i].apply(acc);
        }
        d
    }
}

impl fmt::Display for SemigroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| format!("f{i}")).collect();
        write!(f, "{}", parts.join("∘"))
    }
}

pub fn eval_word(gens: &[GeneratorSpec], w: &SemigroupWord, z: Complex64) -> Result<Complex64> {
    w.validate(gens.len())?;
    check_finite(z)?;
    Ok(w.apply(gens, z))
}

/// All words of length `1..=max_len` in length-then-lexicographic order.
pub fn enumerate_words(gen_count: usize, max_len: usize) -> Result<Vec<SemigroupWord>> {
    enumerate_words_capped(gen_count, max_len, DEFAULT_WORD_CAP)
}

pub fn enumerate_words_capped(
    gen_count: usize,
    max_len: usize,
    cap: usize,
) -> Result<Vec<SemigroupWord>> {
    if gen_count == 0 {
        return Err(Error::param("gen_count", "must be at least 1"));
    }
    if max_len == 0 {
        return Err(Error::param("max_len", "must be at least 1"));
    }
    let count = word_count(gen_count, max_len);
    if count > cap as u128 {
        return Err(Error::WordCapExceeded { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    for len in 1..=max_len {
        let mut idx = vec![0usize; len];
        'odometer: loop {
            out.push(SemigroupWord(idx.clone()));
            let mut pos = len;
            loop {
                if pos == 0 {
                    break 'odometer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < gen_count {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    Ok(out)
}

/// `Σ_{m=1}^{L} n^m`, saturating.
pub fn word_count(gen_count: usize, max_len: usize) -> u128 {
    let n = gen_count as u128;
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for _ in 0..max_len {
        term = term.saturating_mul(n);
        total = total.saturating_add(term);
    }
    total
}

/// Truncation of countably many inverse branches to a finite window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchRequest {
    pub k_min: i32,
    pub k_max: i32,
    pub newton_tolerance: f64,
    pub newton_max_steps: u32,
    pub seed_spacing: f64,
}

impl Default for BranchRequest {
    fn default() -> Self {
        BranchRequest {
            k_min: -2,
            k_max: 2,
            newton_tolerance: 1e-12,
            newton_max_steps: 60,
            seed_spacing: 1.0,
        }
    }
}

impl BranchRequest {
    pub fn validate(&self) -> Result<()> {
        if self.k_min > self.k_max {
            return Err(Error::param("k_min", "must not exceed k_max"));
        }
        if !(self.newton_tolerance > 0.0) {
            return Err(Error::param("newton_tolerance", "must be positive"));
        }
        if self.newton_max_steps == 0 {
            return Err(Error::param("newton_max_steps", "must be positive"));
        }
        if !(self.seed_spacing > 0.0) {
            return Err(Error::param("seed_spacing", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct InverseImages {
    pub points: Vec<Complex64>,
    /// Set when Newton's method converged from none of its seeds.
    pub newton_failed: bool,
}

/// Preimages of `w` under `g`, truncated to the branch window of `req`.
///
/// Closed-form branches for the sine, exponential and power families; the
/// `z − e^z + 1 + 2πi` family is inverted by Newton's method from a seed
/// lattice (anchored at multiples of `seed_spacing`) plus one asymptotic
/// seed per branch. Branch `k` of that family is the strip
/// `|Im p − Im u − 2πk| ≤ π` with `u = w − 1 − 2πi`.
pub fn inverse_images(g: &GeneratorSpec, w: Complex64, req: &BranchRequest) -> Result<InverseImages> {
    check_finite(w)?;
    req.validate()?;
    let points = match g.family {
        Family::ScaledExp => {
            let s = (w - g.shift) / g.lambda;
            if s == Complex64::new(0.0, 0.0) {
                Vec::new()
            } else {
                let base = s.ln();
                (req.k_min..=req.k_max)
                    .map(|k| base + Complex64::new(0.0, TWO_PI * k as f64))
                    .collect()
            }
        }
        Family::ScaledSine => {
            let s = (w - g.shift) / g.lambda;
            let a = s.asin();
            let mut pts = Vec::new();
            for k in req.k_min..=req.k_max {
                let off = TWO_PI * k as f64;
                pts.push(a + off);
                pts.push(Complex64::new(PI, 0.0) - a + off);
            }
            dedupe(pts, 0.0)
        }
        Family::PowerOverA => power_roots(g.a * w, g.degree),
        Family::ZMinusExpShift => return Ok(invert_z_minus_exp(w, req)),
    };
    Ok(InverseImages {
        points,
        newton_failed: false,
    })
}

fn power_roots(target: Complex64, degree: u32) -> Vec<Complex64> {
    if target == Complex64::new(0.0, 0.0) {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let (r, theta) = target.to_polar();
    let d = degree as f64;
    let rho = r.powf(1.0 / d);
    (0..degree)
        .map(|j| Complex64::from_polar(rho, (theta + TWO_PI * j as f64) / d))
        .collect()
}

fn invert_z_minus_exp(w: Complex64, req: &BranchRequest) -> InverseImages {
    let g = GeneratorSpec::z_minus_exp_shift();
    let u = w - Complex64::new(1.0, TWO_PI);
    let im_lo = u.im + TWO_PI * req.k_min as f64 - PI;
    let im_hi = u.im + TWO_PI * req.k_max as f64 + PI;
    let reach = TWO_PI * (req.k_min.abs().max(req.k_max.abs()) as f64) + PI;
    // Re p = ln|p − u| for every root; bound it by a few fixed-point steps.
    let mut re_hi: f64 = 1.0;
    for _ in 0..8 {
        re_hi = (re_hi.abs() + u.re.abs() + reach).ln();
    }
    re_hi += 1.0;
    let re_lo = (u.re - 1.0).min(0.0) - 1.0;
    let inside = |p: Complex64| p.re >= re_lo && p.re <= re_hi && p.im >= im_lo && p.im <= im_hi;

    let mut seeds = Vec::new();
    // drift root near u when e^u is negligible
    seeds.push(u);
    let eu = u.exp();
    if finite(eu) {
        seeds.push(u + eu);
    }
    // one seed per branch from the contraction p ← log(p − u) + 2πim
    for k in req.k_min..=req.k_max {
        let target_im = u.im + TWO_PI * k as f64;
        let mut p = u + Complex64::new(1.0, TWO_PI * k as f64);
        for _ in 0..6 {
            let l = (p - u).ln();
            if !finite(l) {
                break;
            }
            let m = ((target_im - l.im) / TWO_PI).round();
            p = l + Complex64::new(0.0, TWO_PI * m);
        }
        seeds.push(p);
    }
    let s = req.seed_spacing;
    let mut x = (re_lo / s).ceil() * s;
    while x <= re_hi {
        let mut y = (im_lo / s).ceil() * s;
        while y <= im_hi {
            seeds.push(Complex64::new(x, y));
            y += s;
        }
        x += s;
    }

    let mut roots = Vec::new();
    for seed in seeds {
        if let Some(p) = newton_solve(&g, w, seed, req.newton_tolerance, req.newton_max_steps) {
            if inside(p) {
                roots.push(p);
            }
        }
    }
    let newton_failed = roots.is_empty();
    InverseImages {
        points: dedupe(roots, req.newton_tolerance),
        newton_failed,
    }
}

/// Solves `g(p) = w` by Newton's method from `seed`. Returns the root only if
/// it passes the forward check.
pub fn newton_solve(
    g: &GeneratorSpec,
    w: Complex64,
    seed: Complex64,
    tol: f64,
    max_steps: u32,
) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..max_steps {
        let d = g.derivative(z);
        let step = (g.apply(z) - w) / d;
        if !finite(step) {
            return None;
        }
        z -= step;
        if !finite(z) || z.norm() > 1e8 {
            return None;
        }
        if step.norm() <= tol * z.norm().max(1.0) {
            // one polishing step
            let d = g.derivative(z);
            let polish = (g.apply(z) - w) / d;
            if finite(polish) {
                z -= polish;
            }
            return passes_forward_check(g, z, w).then_some(z);
        }
    }
    passes_forward_check(g, z, w).then_some(z)
}

#[inline]
pub fn passes_forward_check(g: &GeneratorSpec, p: Complex64, w: Complex64) -> bool {
    let r = (g.apply(p) - w).norm();
    r.is_finite() && r <= FORWARD_CHECK_TOL * w.norm().max(1.0)
}

/// Sorts canonically and drops points within `radius · max(1, |p|)` of an
/// earlier kept point.
fn dedupe(mut pts: Vec<Complex64>, radius: f64) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = Vec::with_capacity(pts.len());
    for p in pts {
        let r = radius * p.norm().max(1.0);
        if !out.iter().any(|q| (p - q).norm() <= r) {
            out.push(p);
        }
    }
    out
}
