//! Fatou/Julia classification of points and grids.
//!
//! Normality is approximated by following a small bundle of points: the
//! sample and four probes displaced by `±probe_offset` along the real and
//! imaginary axes. A point is Julia when its orbit escapes (transcendental
//! families) or when the bundle separates by more than `separation_delta`;
//! it is Fatou when the whole bundle settles on one attracting fixed point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{enumerate_words, finite, Family, GeneratorSpec, SemigroupWord};
use crate::error::{Error, Result};
use crate::grid::{Metric, SetMask, Viewport};

/// Probe displacement used when no viewport fixes one.
pub const DEFAULT_PROBE_OFFSET: f64 = 1e-3;

const STREAK: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyParams {
    pub max_iter: u32,
    pub escape_radius: f64,
    pub attract_tolerance: f64,
    pub separation_delta: f64,
    /// `None` selects half the viewport cell size, so the probe cross spans
    /// the cell.
    pub probe_offset: Option<f64>,
    pub undetermined_as_julia: bool,
    /// Classify four sub-cell samples instead of the cell center.
    pub supersample: bool,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            max_iter: 200,
            escape_radius: 50.0,
            attract_tolerance: 1e-6,
            separation_delta: 1.0,
            probe_offset: None,
            undetermined_as_julia: true,
            supersample: false,
        }
    }
}

impl ClassifyParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be positive"));
        }
        if !(self.attract_tolerance > 0.0) {
            return Err(Error::param("attract_tolerance", "must be positive"));
        }
        if !(self.escape_radius > self.attract_tolerance) {
            return Err(Error::param(
                "escape_radius",
                "must exceed attract_tolerance",
            ));
        }
        if !(self.separation_delta > 0.0) {
            return Err(Error::param("separation_delta", "must be positive"));
        }
        if let Some(p) = self.probe_offset {
            if !(p > 0.0) {
                return Err(Error::param("probe_offset", "must be positive"));
            }
        }
        Ok(())
    }

    pub(crate) fn validate_for(&self, vp: &Viewport) -> Result<()> {
        self.validate()?;
        if let Some(p) = self.probe_offset {
            if p >= vp.cell_size() {
                return Err(Error::param(
                    "probe_offset",
                    format!("must be below the cell size {}", vp.cell_size()),
                ));
            }
        }
        Ok(())
    }

    pub fn probe_for(&self, vp: &Viewport) -> f64 {
        self.probe_offset.unwrap_or(vp.cell_size() / 2.0)
    }

    fn probe_or_default(&self) -> f64 {
        self.probe_offset.unwrap_or(DEFAULT_PROBE_OFFSET)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Fatou,
    Julia,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Reason {
    Escaped,
    ConvergedToAttractor,
    Separated,
    Exhausted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrbitClassification {
    pub verdict: Verdict,
    pub iterations_used: u32,
    pub reason: Reason,
}

impl OrbitClassification {
    fn julia(reason: Reason, n: u32) -> Self {
        OrbitClassification {
            verdict: Verdict::Julia,
            iterations_used: n,
            reason,
        }
    }

    /// Whether a mask built with `undetermined_as_julia` marks this point.
    pub fn marks(&self, undetermined_as_julia: bool) -> bool {
        match self.verdict {
            Verdict::Julia => true,
            Verdict::Undetermined => undetermined_as_julia,
            Verdict::Fatou => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Attractor {
    Point(Complex64),
    /// Attracting modulo a translation: the orbit approaches `base + k·period`
    /// for some integer `k`.
    Lattice { base: Complex64, period: Complex64 },
    Infinity,
}

impl Attractor {
    #[inline]
    fn near(&self, z: Complex64, tol: f64, escape_radius: f64) -> bool {
        match *self {
            Attractor::Point(p) => finite(z) && (z - p).norm() <= tol * p.norm().max(1.0),
            Attractor::Lattice { base, period } => {
                if !finite(z) {
                    return false;
                }
                let t = (z - base) / period;
                let k = t.re.round();
                (z - base - period * k).norm() <= tol * z.norm().max(1.0)
            }
            Attractor::Infinity => !finite(z) || z.norm() > escape_radius,
        }
    }
}

/// Plane escape functional, chosen by the family applied last.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EscapeRule {
    RealPart,
    AbsImag,
    Modulus,
}

impl EscapeRule {
    pub fn for_family(f: Family) -> Self {
        match f {
            Family::ScaledExp => EscapeRule::RealPart,
            Family::ScaledSine => EscapeRule::AbsImag,
            Family::ZMinusExpShift => EscapeRule::RealPart,
            Family::PowerOverA => EscapeRule::Modulus,
        }
    }

    #[inline]
    fn exceeded(self, z: Complex64, r: f64) -> bool {
        if !finite(z) {
            return true;
        }
        match self {
            EscapeRule::RealPart => z.re > r,
            EscapeRule::AbsImag => z.im.abs() > r,
            EscapeRule::Modulus => z.norm() > r,
        }
    }
}

/// The metric a generator set lives in: rational sets on the sphere,
/// transcendental sets in the plane.
pub fn metric_for(gens: &[GeneratorSpec]) -> Result<Metric> {
    let rational = gens.iter().filter(|g| g.family() == Family::PowerOverA).count();
    match rational {
        0 => Ok(Metric::Plane),
        n if n == gens.len() => Ok(Metric::Sphere),
        _ => Err(Error::Precondition(
            "rational and transcendental generators cannot be mixed".into(),
        )),
    }
}

fn check_metric(gens: &[GeneratorSpec], vp: &Viewport) -> Result<()> {
    let m = metric_for(gens)?;
    if m != vp.metric() {
        return Err(Error::Precondition(format!(
            "generators need the {m:?} metric but the viewport uses {:?}",
            vp.metric()
        )));
    }
    Ok(())
}

/// A semigroup element prepared for iteration: the word, its attracting
/// fixed points and its escape rule.
#[derive(Clone, Debug)]
pub struct IteratedMap {
    gens: Vec<GeneratorSpec>,
    word: SemigroupWord,
    attractors: Vec<Attractor>,
    escape: EscapeRule,
    metric: Metric,
}

impl IteratedMap {
    pub fn new(gens: &[GeneratorSpec], word: SemigroupWord) -> Result<Self> {
        word.validate(gens.len())?;
        let metric = metric_for(gens)?;
        let last = gens[word.indices()[0]].family();
        let mut map = IteratedMap {
            gens: gens.to_vec(),
            word,
            attractors: Vec::new(),
            escape: EscapeRule::for_family(last),
            metric,
        };
        map.attractors = map.find_attractors();
        Ok(map)
    }

    pub fn single(g: &GeneratorSpec) -> Self {
        Self::new(std::slice::from_ref(g), SemigroupWord::single(0))
            .expect("a single generator is always a valid map")
    }

    pub fn word(&self) -> &SemigroupWord {
        &self.word
    }

    pub fn attractors(&self) -> &[Attractor] {
        &self.attractors
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.word.apply(&self.gens, z)
    }

    fn find_attractors(&self) -> Vec<Attractor> {
        let idx = self.word.indices();
        let used: Vec<&GeneratorSpec> = idx.iter().map(|&i| &self.gens[i]).collect();
        if used.iter().all(|g| g.family() == Family::PowerOverA) {
            // every composition of z^d/a fixes 0 and ∞ superattractingly
            return vec![Attractor::Point(Complex64::new(0.0, 0.0)), Attractor::Infinity];
        }
        if idx.iter().all(|&i| i == idx[0]) && used[0].family() == Family::ZMinusExpShift {
            // iterates commute with z ↦ z + 2πi up to translation and settle on 2πiℤ
            return vec![Attractor::Lattice {
                base: Complex64::new(0.0, 0.0),
                period: Complex64::new(0.0, 2.0 * PI),
            }];
        }
        self.discover_fixed_points()
    }

    /// Attracting fixed points reached from a fixed set of seeds.
    fn discover_fixed_points(&self) -> Vec<Attractor> {
        let mut seeds = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(PI, 0.0),
            Complex64::new(2.0 * PI, 0.0),
        ];
        for g in &self.gens {
            seeds.push(g.shift());
            seeds.push(g.lambda() + g.shift());
        }
        let mut found: Vec<Complex64> = Vec::new();
        for seed in seeds {
            let mut z = seed;
            for _ in 0..4000 {
                let next = self.apply(z);
                if !finite(next) {
                    break;
                }
                let settled = (next - z).norm() <= 1e-13 * z.norm().max(1.0);
                z = next;
                if settled {
                    let m = self.word.derivative(&self.gens, z).norm();
                    if m < 1.0 && !found.iter().any(|p| (p - z).norm() < 1e-8 * z.norm().max(1.0)) {
                        found.push(z);
                    }
                    break;
                }
            }
        }
        found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        found.into_iter().map(Attractor::Point).collect()
    }

    fn attractor_of(&self, z: Complex64, p: &ClassifyParams) -> Option<usize> {
        self.attractors
            .iter()
            .position(|a| a.near(z, p.attract_tolerance, p.escape_radius))
    }

    fn distance(&self, a: Complex64, b: Complex64) -> f64 {
        match self.metric {
            Metric::Plane => {
                if finite(a) && finite(b) {
                    (a - b).norm()
                } else {
                    f64::INFINITY
                }
            }
            Metric::Sphere => chordal(a, b),
        }
    }

    /// Classifies `z` by following it together with its probes.
    pub fn classify(&self, z: Complex64, p: &ClassifyParams, probe: f64) -> OrbitClassification {
        let mut pts = [
            z,
            z + Complex64::new(probe, 0.0),
            z - Complex64::new(probe, 0.0),
            z + Complex64::new(0.0, probe),
            z - Complex64::new(0.0, probe),
        ];
        let mut streak = 0;
        for n in 1..=p.max_iter {
            for q in pts.iter_mut() {
                *q = self.apply(*q);
            }
            let c = pts[0];
            if self.metric == Metric::Plane && self.escape.exceeded(c, p.escape_radius) {
                return OrbitClassification::julia(Reason::Escaped, n);
            }
            if pts[1..].iter().any(|&q| self.distance(c, q) > p.separation_delta) {
                return OrbitClassification::julia(Reason::Separated, n);
            }
            let settled = match self.attractor_of(c, p) {
                Some(i) => pts[1..].iter().all(|&q| self.attractor_of(q, p) == Some(i)),
                None => false,
            };
            streak = if settled { streak + 1 } else { 0 };
            if streak >= STREAK {
                return OrbitClassification {
                    verdict: Verdict::Fatou,
                    iterations_used: n,
                    reason: Reason::ConvergedToAttractor,
                };
            }
        }
        OrbitClassification {
            verdict: Verdict::Undetermined,
            iterations_used: p.max_iter,
            reason: Reason::Exhausted,
        }
    }

    /// Long-run behavior of a single orbit, without probes.
    pub fn fate(&self, z: Complex64, p: &ClassifyParams) -> Fate {
        let mut z = z;
        let mut streak = 0;
        let mut last = None;
        for _ in 0..p.max_iter {
            z = self.apply(z);
            if self.metric == Metric::Plane && self.escape.exceeded(z, p.escape_radius) {
                return Fate::Escaped;
            }
            let a = self.attractor_of(z, p);
            streak = if a.is_some() && a == last { streak + 1 } else { 1 };
            last = a;
            if let Some(i) = a {
                if streak >= STREAK {
                    return Fate::Attracted(i);
                }
            }
        }
        Fate::Unresolved
    }

    /// A point between `a` and `b` on the boundary between their fates, with
    /// the final bracket width. `None` when the fates agree.
    pub fn boundary_point(
        &self,
        a: Complex64,
        b: Complex64,
        p: &ClassifyParams,
        steps: u32,
    ) -> Option<(Complex64, f64)> {
        let fa = self.fate(a, p);
        let fb = self.fate(b, p);
        if fa == fb {
            return None;
        }
        let (mut lo, mut hi) = (a, b);
        for _ in 0..steps {
            let mid = (lo + hi) * 0.5;
            if self.fate(mid, p) == fa {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(((lo + hi) * 0.5, (hi - lo).norm()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fate {
    Escaped,
    Attracted(usize),
    Unresolved,
}

/// Chordal distance on the Riemann sphere; non-finite values are ∞.
pub fn chordal(a: Complex64, b: Complex64) -> f64 {
    const HUGE: f64 = 1e150;
    let inf_a = !finite(a) || a.norm() > HUGE;
    let inf_b = !finite(b) || b.norm() > HUGE;
    match (inf_a, inf_b) {
        (true, true) => 0.0,
        (true, false) => 2.0 / (1.0 + b.norm_sqr()).sqrt(),
        (false, true) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
        (false, false) => {
            2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
        }
    }
}

/// Classification under the cyclic semigroup generated by `g`.
pub fn classify_single(g: &GeneratorSpec, z: Complex64, p: &ClassifyParams) -> Result<OrbitClassification> {
    p.validate()?;
    if !finite(z) {
        return Err(Error::NonFiniteInput(z.to_string()));
    }
    Ok(IteratedMap::single(g).classify(z, p, p.probe_or_default()))
}

fn cell_marked(maps: &[IteratedMap], vp: &Viewport, cell: crate::grid::Cell, p: &ClassifyParams, probe: f64) -> bool {
    let c = vp.cell_center(cell);
    let samples: Vec<Complex64> = if p.supersample {
        let dx = vp.cell_width() / 4.0;
        let dy = vp.cell_height() / 4.0;
        vec![
            c + Complex64::new(-dx, -dy),
            c + Complex64::new(dx, -dy),
            c + Complex64::new(-dx, dy),
            c + Complex64::new(dx, dy),
        ]
    } else {
        vec![c]
    };
    maps.iter().any(|m| {
        samples
            .iter()
            .any(|&z| m.classify(z, p, probe).marks(p.undetermined_as_julia))
    })
}

/// Grid Julia set of the cyclic semigroup `⟨g⟩`.
pub fn julia_mask_single(g: &GeneratorSpec, vp: &Viewport, p: &ClassifyParams) -> Result<SetMask> {
    check_metric(std::slice::from_ref(g), vp)?;
    p.validate_for(vp)?;
    let maps = [IteratedMap::single(g)];
    Ok(mask_for_maps(&maps, vp, p))
}

pub(crate) fn mask_for_maps(maps: &[IteratedMap], vp: &Viewport, p: &ClassifyParams) -> SetMask {
    let probe = p.probe_for(vp);
    SetMask::from_cells(*vp, |cell| cell_marked(maps, vp, cell, p, probe))
}

/// Grid Julia set of the semigroup: a cell is marked when the orbit of its
/// center under some word of length ≤ `word_len` escapes or separates from
/// its probes. Contains `julia_mask_single` of every enumerated word.
pub fn julia_mask_semigroup(
    gens: &[GeneratorSpec],
    vp: &Viewport,
    word_len: usize,
    p: &ClassifyParams,
) -> Result<SetMask> {
    check_metric(gens, vp)?;
    p.validate_for(vp)?;
    let words = enumerate_words(gens.len(), word_len)?;
    let maps: Vec<IteratedMap> = words
        .into_par_iter()
        .map(|w| IteratedMap::new(gens, w))
        .collect::<Result<_>>()?;
    Ok(mask_for_maps(&maps, vp, p))
}

/// Cellwise complement of a Julia mask.
pub fn fatou_mask(j: &SetMask) -> SetMask {
    j.complement()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{hausdorff_cells, raster_annulus};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sine(l: f64, shift: f64) -> GeneratorSpec {
        GeneratorSpec::scaled_sine(c(l, 0.0), c(shift, 0.0)).unwrap()
    }

    fn exp03() -> GeneratorSpec {
        GeneratorSpec::scaled_exp(c(0.3, 0.0), c(0.0, 0.0)).unwrap()
    }

    #[test]
    fn square_map_examples() {
        let sq = GeneratorSpec::power(2).unwrap();
        let p = ClassifyParams::default();
        let inside = classify_single(&sq, c(0.5, 0.0), &p).unwrap();
        assert_eq!(inside.verdict, Verdict::Fatou);
        assert_eq!(inside.reason, Reason::ConvergedToAttractor);
        let on = classify_single(&sq, c(1.0, 0.0), &p).unwrap();
        assert_eq!(on.verdict, Verdict::Julia);
        assert_eq!(on.reason, Reason::Separated);
        let outside = classify_single(&sq, c(1.5, 0.0), &p).unwrap();
        assert_eq!(outside.verdict, Verdict::Fatou);
    }

    #[test]
    fn sine_origin_is_fatou() {
        let r = classify_single(&sine(0.9, 0.0), c(0.0, 0.0), &ClassifyParams::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fatou);
        assert_eq!(r.reason, Reason::ConvergedToAttractor);
    }

    #[test]
    fn exponential_fixed_point_and_escape() {
        // oracle: fixed-point iteration for q = 0.3 e^q
        let mut q = 0.0f64;
        for _ in 0..200 {
            q = 0.3 * q.exp();
        }
        assert!((q - 0.4895).abs() < 1e-4);
        let map = IteratedMap::single(&exp03());
        match map.attractors() {
            [Attractor::Point(p)] => assert!((p.re - q).abs() < 1e-10 && p.im.abs() < 1e-12),
            other => panic!("unexpected attractors {other:?}"),
        }
        let p = ClassifyParams::default();
        assert_eq!(classify_single(&exp03(), c(0.4895, 0.0), &p).unwrap().verdict, Verdict::Fatou);
        // oracle orbit: Re z_n grows without bound from 10
        let mut z = c(10.0, 0.0);
        z = 0.3 * z.exp();
        assert!(z.re > 50.0);
        let r = classify_single(&exp03(), c(10.0, 0.0), &p).unwrap();
        assert_eq!(r.verdict, Verdict::Julia);
        assert_eq!(r.reason, Reason::Escaped);
    }

    #[test]
    fn verdict_reason_pairs_are_consistent() {
        let gens = [sine(0.9, 0.0), exp03(), GeneratorSpec::z_minus_exp_shift()];
        let p = ClassifyParams::default();
        for g in &gens {
            for i in -6..=6 {
                for j in -6..=6 {
                    let r = classify_single(g, c(i as f64 * 0.7, j as f64 * 0.9), &p).unwrap();
                    match r.verdict {
                        Verdict::Julia => assert!(matches!(r.reason, Reason::Escaped | Reason::Separated)),
                        Verdict::Fatou => assert_eq!(r.reason, Reason::ConvergedToAttractor),
                        Verdict::Undetermined => assert_eq!(r.reason, Reason::Exhausted),
                    }
                }
            }
        }
    }

    #[test]
    fn budget_never_turns_julia_into_fatou() {
        let g = sine(0.9, 0.0);
        let small = ClassifyParams { max_iter: 20, ..ClassifyParams::default() };
        let large = ClassifyParams { max_iter: 400, ..ClassifyParams::default() };
        for i in 0..40 {
            let z = c(-3.0 + 0.15 * i as f64, 0.4 + 0.1 * i as f64);
            let a = classify_single(&g, z, &small).unwrap();
            let b = classify_single(&g, z, &large).unwrap();
            if a.verdict == Verdict::Julia {
                assert_eq!(b, a);
            }
            if a.verdict == Verdict::Fatou {
                assert_eq!(b.verdict, Verdict::Fatou);
            }
        }
    }

    #[test]
    fn z_minus_exp_roots_attract_modulo_translation() {
        let g = GeneratorSpec::z_minus_exp_shift();
        let p = ClassifyParams::default();
        assert_eq!(classify_single(&g, c(0.1, 0.2), &p).unwrap().verdict, Verdict::Fatou);
        assert_eq!(classify_single(&g, c(-5.0, 0.3), &p).unwrap().verdict, Verdict::Fatou);
        // Im z = π is invariant and escapes to the right
        assert_eq!(classify_single(&g, c(0.0, PI), &p).unwrap().verdict, Verdict::Julia);
    }

    #[test]
    fn non_finite_input_rejected() {
        assert!(classify_single(&exp03(), c(f64::NAN, 0.0), &ClassifyParams::default()).is_err());
    }

    #[test]
    fn metric_mismatch_rejected() {
        let vp = Viewport::square(c(0.0, 0.0), 2.0, 16, Metric::Plane).unwrap();
        let sq = GeneratorSpec::power(2).unwrap();
        assert!(julia_mask_single(&sq, &vp, &ClassifyParams::default()).is_err());
        let mixed = [sq, exp03()];
        assert!(metric_for(&mixed).is_err());
    }

    #[test]
    fn square_map_mask_is_unit_circle() {
        let vp = Viewport::square(c(0.0, 0.0), 2.0, 512, Metric::Sphere).unwrap();
        let sq = GeneratorSpec::power(2).unwrap();
        let m = julia_mask_single(&sq, &vp, &ClassifyParams::default()).unwrap();
        let circle = raster_annulus(vp, c(0.0, 0.0), 1.0, 1.0);
        let h = hausdorff_cells(&m, &circle).unwrap();
        assert!(h <= 2.0);
    }

    #[test]
    fn cyclic_semigroup_mask_equals_single() {
        let vp = Viewport::square(c(0.0, 0.0), 4.0, 64, Metric::Plane).unwrap();
        let g = sine(0.9, 0.0);
        let p = ClassifyParams::default();
        let single = julia_mask_single(&g, &vp, &p).unwrap();
        let semi = julia_mask_semigroup(&[g], &vp, 3, &p).unwrap();
        assert_eq!(single, semi);
    }

    #[test]
    fn semigroup_contains_generator_masks() {
        let vp = Viewport::square(c(0.0, 0.0), 3.0, 48, Metric::Sphere).unwrap();
        let gens = [
            GeneratorSpec::power(2).unwrap(),
            GeneratorSpec::power_over_a(c(2.0, 0.0), 2).unwrap(),
        ];
        let p = ClassifyParams::default();
        let semi = julia_mask_semigroup(&gens, &vp, 3, &p).unwrap();
        for g in &gens {
            let single = julia_mask_single(g, &vp, &p).unwrap();
            assert!(single.is_subset_of(&semi).unwrap());
            assert!(fatou_mask(&semi).is_subset_of(&fatou_mask(&single)).unwrap());
        }
    }

    #[test]
    fn word_cap_is_enforced() {
        let vp = Viewport::square(c(0.0, 0.0), 3.0, 8, Metric::Sphere).unwrap();
        let gens = [
            GeneratorSpec::power(2).unwrap(),
            GeneratorSpec::power_over_a(c(2.0, 0.0), 2).unwrap(),
        ];
        let r = julia_mask_semigroup(&gens, &vp, 20, &ClassifyParams::default());
        assert!(matches!(r, Err(Error::WordCapExceeded { .. })));
    }

    #[test]
    fn chordal_distance() {
        assert_eq!(chordal(c(0.0, 0.0), c(f64::INFINITY, 0.0)), 2.0);
        assert!((chordal(c(1.0, 0.0), c(-1.0, 0.0)) - 2.0).abs() < 1e-15);
        assert_eq!(chordal(c(f64::NAN, 0.0), c(f64::INFINITY, 0.0)), 0.0);
    }

    #[test]
    fn fatou_mask_complements() {
        let vp = Viewport::square(c(0.0, 0.0), 1.0, 8, Metric::Plane).unwrap();
        assert_eq!(fatou_mask(&SetMask::empty(vp)), SetMask::full(vp));
        let m = SetMask::from_centers(vp, |z| z.re > 0.2);
        assert_eq!(fatou_mask(&fatou_mask(&m)), m);
    }
}
