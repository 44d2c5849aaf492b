//! Grid approximations of the completely invariant hull (forward and
//! backward images, converging to E(S)) and of the backward hull
//! (converging to J(S)).
//!
//! A hull is carried as a core mask together with a few representative
//! points per cell. Representatives are points known to lie within `err`
//! of the set itself: they start as basin-boundary points found by
//! bisection, and are propagated by exact forward images and exact inverse
//! branches with first-order error tracking. Marking cells from exact
//! points instead of from cell corners keeps the hull from inflating under
//! strongly expanding maps. Cells are also added by pulling back the core:
//! a cell is marked when some generator sends its center into a marked cell.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::classify::{ClassifyParams, Fate, IteratedMap, Reason, Verdict};
use crate::dynamics::{enumerate_words, finite, inverse_images, newton_solve, BranchRequest, GeneratorSpec};
use crate::error::{Error, Result};
use crate::grid::{dilate, interior_disk_exists, isolated_cells, touches_boundary, Cell, SetMask, Viewport};

/// Hulls accept at most this many generators.
pub const MAX_HULL_GENERATORS: usize = 4;

const BISECTION_STEPS: u32 = 44;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HullMode {
    /// Forward and backward images (E).
    CompletelyInvariant,
    /// Backward images only (J).
    BackwardOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HullStatus {
    Converged,
    SaturatedWholePlane,
    MaxGenerations,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HullParams {
    pub max_generations: u32,
    pub saturation_fraction: f64,
    pub closure_dilation: usize,
    /// Cap on representative points per cell; in `step_hull`, the number of
    /// forward sample points per marked cell.
    pub forward_samples_per_cell: usize,
    pub branch_request: BranchRequest,
    pub mode: HullMode,
    /// Chebyshev radius of the interior-disk witness.
    pub interior_radius: usize,
}

impl Default for HullParams {
    fn default() -> Self {
        HullParams {
            max_generations: 64,
            saturation_fraction: 0.99,
            closure_dilation: 1,
            forward_samples_per_cell: 4,
            branch_request: BranchRequest {
                seed_spacing: 4.0,
                ..BranchRequest::default()
            },
            mode: HullMode::CompletelyInvariant,
            interior_radius: 5,
        }
    }
}

impl HullParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_generations == 0 {
            return Err(Error::param("max_generations", "must be positive"));
        }
        if !(self.saturation_fraction > 0.5 && self.saturation_fraction <= 1.0) {
            return Err(Error::param("saturation_fraction", "must lie in (0.5, 1]"));
        }
        if self.forward_samples_per_cell == 0 {
            return Err(Error::param("forward_samples_per_cell", "must be at least 1"));
        }
        if self.interior_radius < 2 {
            return Err(Error::param("interior_radius", "must be at least 2"));
        }
        self.branch_request.validate()
    }

    /// Whether two runs share everything but the mode.
    fn matches(&self, other: &HullParams) -> bool {
        HullParams { mode: other.mode, ..*self } == *other
    }
}

#[derive(Clone, Debug)]
pub struct HullResult {
    pub final_mask: SetMask,
    pub status: HullStatus,
    pub generations_run: u32,
    /// Area fraction of the reported mask, starting with the seed.
    pub per_generation_area: Vec<f64>,
    pub interior_witness: Option<Cell>,
    /// Reported mask of the generation that triggered a whole-plane verdict.
    pub evidence_mask: Option<SetMask>,
    pub seed: SetMask,
    pub dropped_forward: u64,
    /// Cells lost from one generation to the next (always 0 for a correct hull).
    pub monotonicity_violations: usize,
    pub params: HullParams,
    pub word_len: usize,
    pub classify: ClassifyParams,
}

/// A point lying within `err` of the set being approximated.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Rep {
    z: Complex64,
    err: f64,
}

fn rep_order(a: &Rep, b: &Rep) -> Ordering {
    a.err
        .total_cmp(&b.err)
        .then(a.z.re.total_cmp(&b.z.re))
        .then(a.z.im.total_cmp(&b.z.im))
}

fn same_point(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * a.norm().max(1.0)
}

#[inline]
fn rounding(z: Complex64) -> f64 {
    8.0 * f64::EPSILON * z.norm().max(1.0)
}

/// Seed mask plus representatives on the seed Julia sets.
#[derive(Clone, Debug)]
pub struct HullSeed {
    pub mask: SetMask,
    reps: Vec<(usize, Rep)>,
}

impl HullSeed {
    pub fn representative_count(&self) -> usize {
        self.reps.len()
    }
}

/// Union of the grid Julia sets of every word of length ≤ `word_len`.
pub fn build_seed(
    gens: &[GeneratorSpec],
    vp: &Viewport,
    word_len: usize,
    p: &ClassifyParams,
) -> Result<SetMask> {
    Ok(build_seed_with_reps(gens, vp, word_len, p)?.mask)
}

pub fn build_seed_with_reps(
    gens: &[GeneratorSpec],
    vp: &Viewport,
    word_len: usize,
    p: &ClassifyParams,
) -> Result<HullSeed> {
    check_generators(gens)?;
    let metric = crate::classify::metric_for(gens)?;
    if metric != vp.metric() {
        return Err(Error::Precondition(format!(
            "generators need the {metric:?} metric but the viewport uses {:?}",
            vp.metric()
        )));
    }
    p.validate_for(vp)?;
    let words = enumerate_words(gens.len(), word_len)?;
    let maps: Vec<IteratedMap> = words
        .into_iter()
        .map(|w| IteratedMap::new(gens, w))
        .collect::<Result<_>>()?;
    let probe = p.probe_for(vp);
    let per_cell: Vec<(bool, Vec<(usize, Rep)>)> = (0..vp.len())
        .into_par_iter()
        .map(|i| {
            let c = vp.cell_center(vp.cell_at(i));
            let mut marked = false;
            let mut reps = Vec::new();
            for m in &maps {
                let cls = m.classify(c, p, probe);
                if !cls.marks(p.undetermined_as_julia) {
                    continue;
                }
                marked = true;
                if cls.verdict != Verdict::Julia {
                    continue;
                }
                if cls.reason == Reason::Escaped {
                    reps.push((i, Rep { z: c, err: 0.0 }));
                    continue;
                }
                if let Some(r) = boundary_rep(m, c, probe, p) {
                    if let Some(cell) = vp.locate(r.z) {
                        reps.push((vp.index(cell), r));
                    }
                }
            }
            (marked, reps)
        })
        .collect();
    let mut bits = Vec::with_capacity(vp.len());
    let mut reps = Vec::new();
    for (b, r) in per_cell {
        bits.push(b);
        reps.extend(r);
    }
    let mask = SetMask::from_bits(*vp, bits)?;
    Ok(HullSeed { mask, reps })
}

/// A basin-boundary point between the center and a probe with a different fate.
fn boundary_rep(m: &IteratedMap, c: Complex64, probe: f64, p: &ClassifyParams) -> Option<Rep> {
    let fc = m.fate(c, p);
    let offsets = [
        Complex64::new(probe, 0.0),
        Complex64::new(-probe, 0.0),
        Complex64::new(0.0, probe),
        Complex64::new(0.0, -probe),
    ];
    for d in offsets {
        let q = c + d;
        let fq = m.fate(q, p);
        if fq == fc || (fc == Fate::Unresolved && fq == Fate::Unresolved) {
            continue;
        }
        if let Some((z, gap)) = m.boundary_point(c, q, p, BISECTION_STEPS) {
            return Some(Rep { z, err: gap + rounding(z) });
        }
    }
    None
}

fn check_generators(gens: &[GeneratorSpec]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::Precondition("at least one generator is required".into()));
    }
    if gens.len() > MAX_HULL_GENERATORS {
        return Err(Error::param(
            "generators",
            format!("hulls support at most {MAX_HULL_GENERATORS} generators"),
        ));
    }
    Ok(())
}

/// Evolving hull: core mask and capped representative lists.
#[derive(Clone, Debug)]
struct HullState {
    vp: Viewport,
    core: SetMask,
    reps: Vec<Vec<Rep>>,
    /// Representatives added in the last step, sorted by cell then rep order.
    frontier: Vec<(usize, Rep)>,
    cap: usize,
    max_err: f64,
}

impl HullState {
    fn new(seed: &HullSeed, cap: usize) -> Self {
        let vp = *seed.mask.viewport();
        let mut st = HullState {
            vp,
            core: seed.mask.clone(),
            reps: vec![Vec::new(); vp.len()],
            frontier: Vec::new(),
            cap,
            max_err: 0.25 * vp.cell_size(),
        };
        let mut cands = seed.reps.clone();
        cands.retain(|(_, r)| r.err <= st.max_err);
        st.merge(cands, Vec::new());
        st
    }

    fn frontier_in(&self, cell: usize) -> &[(usize, Rep)] {
        let lo = self.frontier.partition_point(|(c, _)| *c < cell);
        let hi = self.frontier.partition_point(|(c, _)| *c <= cell);
        &self.frontier[lo..hi]
    }

    fn rep_in_view(&self, z: Complex64, err: f64) -> Option<(usize, Rep)> {
        if !finite(z) || !(err <= self.max_err) {
            return None;
        }
        self.vp.locate(z).map(|c| (self.vp.index(c), Rep { z, err }))
    }

    /// One generation. Returns whether the core changed.
    fn step(&mut self, gens: &[GeneratorSpec], hp: &HullParams, mode: HullMode, dropped: &mut u64) -> bool {
        let vp = self.vp;
        let req = &hp.branch_request;

        // pull-back of the core, with exact preimages of nearby new representatives
        let pulled: Vec<(bool, Vec<(usize, Rep)>)> = (0..vp.len())
            .into_par_iter()
            .map(|i| {
                let c = vp.cell_center(vp.cell_at(i));
                let mut hit = false;
                let mut found = Vec::new();
                for g in gens {
                    let w = g.apply(c);
                    if !finite(w) {
                        continue;
                    }
                    let Some(cell) = vp.locate(w) else { continue };
                    let j = vp.index(cell);
                    if !self.core.get_index(j) {
                        continue;
                    }
                    hit = true;
                    let nearest = self.frontier_in(j).iter().map(|(_, r)| r).min_by(|a, b| {
                        (a.z - w).norm().total_cmp(&(b.z - w).norm()).then(rep_order(a, b))
                    });
                    if let Some(r) = nearest {
                        if let Some(p) = newton_solve(g, r.z, c, req.newton_tolerance, req.newton_max_steps) {
                            let d = g.derivative(p).norm();
                            let err = (r.err + (g.apply(p) - r.z).norm()) / d + rounding(p);
                            found.extend(self.rep_in_view(p, err));
                        }
                    }
                }
                (hit, found)
            })
            .collect();

        // exact inverse branches and (E only) forward images of new representatives
        let images: Vec<(Vec<(usize, Rep)>, u64)> = self
            .frontier
            .par_iter()
            .map(|(_, r)| {
                let mut out = Vec::new();
                let mut lost = 0u64;
                for g in gens {
                    for p in inverse_images(g, r.z, req).map(|i| i.points).unwrap_or_default() {
                        let d = g.derivative(p).norm();
                        let err = (r.err + (g.apply(p) - r.z).norm()) / d + rounding(p);
                        out.extend(self.rep_in_view(p, err));
                    }
                    if mode == HullMode::CompletelyInvariant {
                        let w = g.apply(r.z);
                        if !finite(w) || !vp.contains(w) {
                            lost += 1;
                            continue;
                        }
                        let err = g.derivative(r.z).norm() * r.err + rounding(w);
                        out.extend(self.rep_in_view(w, err));
                    }
                }
                (out, lost)
            })
            .collect();

        let mut marks = Vec::with_capacity(vp.len());
        let mut cands = Vec::new();
        for (hit, found) in pulled {
            marks.push(hit);
            cands.extend(found);
        }
        for (out, lost) in images {
            cands.extend(out);
            *dropped += lost;
        }
        self.merge(cands, marks)
    }

    /// Adds candidate representatives and pull-back marks. Returns whether
    /// the core changed.
    fn merge(&mut self, mut cands: Vec<(usize, Rep)>, marks: Vec<bool>) -> bool {
        cands.par_sort_unstable_by(|a, b| a.0.cmp(&b.0).then(rep_order(&a.1, &b.1)));
        let mut changed = false;
        for (i, &m) in marks.iter().enumerate() {
            if m && !self.core.get_index(i) {
                self.core.set(self.vp.cell_at(i), true);
                changed = true;
            }
        }
        let mut frontier = Vec::new();
        let mut k = 0;
        while k < cands.len() {
            let cell = cands[k].0;
            let end = k + cands[k..].partition_point(|(c, _)| *c == cell);
            let old = std::mem::take(&mut self.reps[cell]);
            let mut merged: Vec<Rep> = old.clone();
            for (_, r) in &cands[k..end] {
                if !merged.iter().any(|m| same_point(m.z, r.z)) {
                    merged.push(*r);
                }
            }
            merged.sort_by(rep_order);
            merged.truncate(self.cap);
            for r in &merged {
                if !old.iter().any(|o| o == r) {
                    frontier.push((cell, *r));
                }
            }
            if !merged.is_empty() && !self.core.get_index(cell) {
                self.core.set(self.vp.cell_at(cell), true);
                changed = true;
            }
            self.reps[cell] = merged;
            k = end;
        }
        self.frontier = frontier;
        changed
    }

    fn absorb(&mut self, other: &SetMask) -> bool {
        let before = self.core.count();
        self.core
            .union_in_place(other)
            .expect("hull states share a viewport");
        self.core.count() != before
    }
}

/// Iterates the hull from the seed until it stops changing, fills the
/// viewport, or runs out of generations.
///
/// The completely invariant mode runs a backward-only hull in lockstep and
/// absorbs it every generation, so its masks always contain the backward
/// hull's masks under the same parameters. A whole-plane verdict reports the
/// full mask and keeps the triggering generation as `evidence_mask`.
pub fn iterate_hull(
    gens: &[GeneratorSpec],
    vp: &Viewport,
    hp: &HullParams,
    cp: &ClassifyParams,
    word_len: usize,
) -> Result<HullResult> {
    hp.validate()?;
    let seed = build_seed_with_reps(gens, vp, word_len, cp)?;
    let mut main = HullState::new(&seed, hp.forward_samples_per_cell);
    let mut shadow = match hp.mode {
        HullMode::CompletelyInvariant => Some(main.clone()),
        HullMode::BackwardOnly => None,
    };
    let mut reported = dilate(&main.core, hp.closure_dilation);
    let mut areas = vec![reported.area_fraction()];
    let mut status = HullStatus::MaxGenerations;
    let mut generations_run = 0;
    let mut witness = None;
    let mut evidence = None;
    let mut dropped = 0u64;
    let mut violations = 0;

    for n in 1..=hp.max_generations {
        let mut changed = main.step(gens, hp, hp.mode, &mut dropped);
        if let Some(s) = shadow.as_mut() {
            let mut ignored = 0;
            changed |= s.step(gens, hp, HullMode::BackwardOnly, &mut ignored);
            changed |= main.absorb(&s.core);
        }
        generations_run = n;
        let next = dilate(&main.core, hp.closure_dilation);
        violations += reported.difference_count(&next)?;
        reported = next;
        areas.push(reported.area_fraction());

        if hp.mode == HullMode::CompletelyInvariant {
            // a backward hull may have interior (an annulus, say); only E blows up
            let grown = main.core.difference(&seed.mask)?;
            witness = interior_disk_exists(&grown, hp.interior_radius)?;
        }
        if reported.area_fraction() >= hp.saturation_fraction || witness.is_some() {
            status = HullStatus::SaturatedWholePlane;
            break;
        }
        if !changed {
            status = HullStatus::Converged;
            break;
        }
    }

    let final_mask = if status == HullStatus::SaturatedWholePlane {
        evidence = Some(reported.clone());
        SetMask::full(*vp)
    } else {
        reported
    };
    Ok(HullResult {
        final_mask,
        status,
        generations_run,
        per_generation_area: areas,
        interior_witness: witness,
        evidence_mask: evidence,
        seed: seed.mask,
        dropped_forward: dropped,
        monotonicity_violations: violations,
        params: *hp,
        word_len,
        classify: *cp,
    })
}

/// Deterministic sample points inside a cell; each prefix of the sequence is
/// kept when `n` grows. Corners come first.
pub fn cell_samples(vp: &Viewport, cell: Cell, n: usize) -> Vec<Complex64> {
    let (lo, hi) = vp.cell_rect(cell);
    let at = |s: f64, t: f64| Complex64::new(lo.re + s * (hi.re - lo.re), lo.im + t * (hi.im - lo.im));
    let fixed = [
        (0.0, 0.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (0.5, 0.5),
        (0.5, 0.0),
        (0.0, 0.5),
        (1.0, 0.5),
        (0.5, 1.0),
    ];
    // plastic-number low-discrepancy sequence after the fixed points
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    (0..n)
        .map(|k| match fixed.get(k) {
            Some(&(s, t)) => at(s, t),
            None => {
                let j = (k - fixed.len() + 1) as f64;
                at((0.5 + A1 * j).fract(), (0.5 + A2 * j).fract())
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutput {
    pub mask: SetMask,
    pub dropped_forward: u64,
}

/// One mask-level hull generation: `m`, its pull-back, the cells of inverse
/// images of marked centers, and (completely invariant mode) the cells of
/// forward images of `forward_samples_per_cell` sample points per marked
/// cell, dilated by `closure_dilation`.
pub fn step_hull(m: &SetMask, gens: &[GeneratorSpec], hp: &HullParams) -> Result<StepOutput> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    hp.validate()?;
    check_generators(gens)?;
    let vp = *m.viewport();
    let req = &hp.branch_request;
    let pulled = SetMask::from_cells(vp, |cell| {
        let c = vp.cell_center(cell);
        gens.iter().any(|g| {
            let w = g.apply(c);
            finite(w) && vp.locate(w).is_some_and(|t| m.get(t))
        })
    });
    let marked: Vec<Cell> = m.cells().collect();
    let pushed: Vec<(Vec<usize>, u64)> = marked
        .par_iter()
        .map(|&cell| {
            let mut out = Vec::new();
            let mut lost = 0;
            let c = vp.cell_center(cell);
            for g in gens {
                for p in inverse_images(g, c, req).map(|i| i.points).unwrap_or_default() {
                    out.extend(vp.locate(p).map(|t| vp.index(t)));
                }
                if hp.mode == HullMode::CompletelyInvariant {
                    for z in cell_samples(&vp, cell, hp.forward_samples_per_cell) {
                        let w = g.apply(z);
                        match vp.locate(w).filter(|_| finite(w)) {
                            Some(t) => out.push(vp.index(t)),
                            None => lost += 1,
                        }
                    }
                }
            }
            (out, lost)
        })
        .collect();
    let mut next = m.clone();
    next.union_in_place(&pulled)?;
    let mut dropped = 0;
    for (cells, lost) in pushed {
        dropped += lost;
        for i in cells {
            next.set(vp.cell_at(i), true);
        }
    }
    Ok(StepOutput {
        mask: dilate(&next, hp.closure_dilation),
        dropped_forward: dropped,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectnessReport {
    pub isolated_count: usize,
    pub locations: Vec<Cell>,
}

pub fn perfectness_report(m: &SetMask) -> Result<PerfectnessReport> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let locations = isolated_cells(m);
    Ok(PerfectnessReport {
        isolated_count: locations.len(),
        locations,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetReport {
    pub violations: usize,
}

/// Cells of the backward hull missing from the completely invariant hull.
pub fn subset_report(j: &HullResult, e: &HullResult) -> Result<SubsetReport> {
    if j.params.mode != HullMode::BackwardOnly || e.params.mode != HullMode::CompletelyInvariant {
        return Err(Error::Precondition(
            "subset_report takes a backward-only hull and a completely invariant hull".into(),
        ));
    }
    if !j.params.matches(&e.params) || j.word_len != e.word_len || j.classify != e.classify {
        return Err(Error::Precondition("hulls were built with different parameters".into()));
    }
    Ok(SubsetReport {
        violations: j.final_mask.difference_count(&e.final_mask)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnboundednessReport {
    pub w_touches_edge: bool,
}

/// Whether the complement of a converged hull reaches the viewport edge.
pub fn unboundedness_report(e: &HullResult) -> Result<UnboundednessReport> {
    if e.status != HullStatus::Converged {
        return Err(Error::Precondition(format!(
            "unboundedness applies to converged hulls, got {:?}",
            e.status
        )));
    }
    let w = e.final_mask.complement();
    if w.is_empty() {
        return Err(Error::Precondition("hull covers the whole viewport".into()));
    }
    Ok(UnboundednessReport {
        w_touches_edge: touches_boundary(&w),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::julia_mask_single;
    use crate::grid::{hausdorff_cells, raster_annulus, Metric};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rational() -> [GeneratorSpec; 2] {
        [
            GeneratorSpec::power(2).unwrap(),
            GeneratorSpec::power_over_a(c(2.0, 0.0), 2).unwrap(),
        ]
    }

    fn sphere(n: usize) -> Viewport {
        Viewport::square(c(0.0, 0.0), 3.0, n, Metric::Sphere).unwrap()
    }

    #[test]
    fn seed_of_square_iterates_is_unit_circle() {
        let vp = sphere(128);
        let sq = [GeneratorSpec::power(2).unwrap()];
        let p = ClassifyParams::default();
        let seed = build_seed(&sq, &vp, 3, &p).unwrap();
        assert_eq!(seed, julia_mask_single(&sq[0], &vp, &p).unwrap());
        let circle = raster_annulus(vp, c(0.0, 0.0), 1.0, 1.0);
        assert!(hausdorff_cells(&seed, &circle).unwrap() <= 2.0);
    }

    #[test]
    fn rational_seed_is_two_circles() {
        let vp = sphere(128);
        let seed = build_seed_with_reps(&rational(), &vp, 1, &ClassifyParams::default()).unwrap();
        let mut circles = raster_annulus(vp, c(0.0, 0.0), 1.0, 1.0);
        circles.union_in_place(&raster_annulus(vp, c(0.0, 0.0), 2.0, 2.0)).unwrap();
        assert!(hausdorff_cells(&seed.mask, &circles).unwrap() <= 2.0);
        // every representative lies on one of the circles
        assert!(seed.representative_count() > 100);
        for (_, r) in &seed.reps {
            let d = (r.z.norm() - 1.0).abs().min((r.z.norm() - 2.0).abs());
            assert!(d <= r.err + 1e-9, "rep {} err {}", r.z, r.err);
        }
    }

    #[test]
    fn step_fixes_unit_circle_up_to_dilation() {
        let vp = sphere(96);
        let sq = [GeneratorSpec::power(2).unwrap()];
        let m = julia_mask_single(&sq[0], &vp, &ClassifyParams::default()).unwrap();
        let hp = HullParams { closure_dilation: 0, ..HullParams::default() };
        let back = step_hull(&m, &sq, &HullParams { mode: HullMode::BackwardOnly, ..hp }).unwrap();
        assert!(m.is_subset_of(&back.mask).unwrap());
        assert!(back.mask.is_subset_of(&dilate(&m, 1)).unwrap());
        // corner samples sit up to a cell off the circle and squaring doubles that
        let full = step_hull(&m, &sq, &hp).unwrap();
        assert!(full.mask.is_subset_of(&dilate(&m, 2)).unwrap());
    }

    #[test]
    fn backward_step_is_contained_in_complete_step() {
        let vp = sphere(64);
        let gens = rational();
        let seed = build_seed(&gens, &vp, 1, &ClassifyParams::default()).unwrap();
        let e = HullParams::default();
        let j = HullParams { mode: HullMode::BackwardOnly, ..e };
        let se = step_hull(&seed, &gens, &e).unwrap().mask;
        let sj = step_hull(&seed, &gens, &j).unwrap().mask;
        assert!(sj.is_subset_of(&se).unwrap());
        assert!(seed.is_subset_of(&sj).unwrap());
    }

    #[test]
    fn step_is_monotone_in_window_and_samples() {
        let vp = sphere(64);
        let gens = rational();
        let seed = build_seed(&gens, &vp, 1, &ClassifyParams::default()).unwrap();
        let base = HullParams { closure_dilation: 0, ..HullParams::default() };
        let more = HullParams { forward_samples_per_cell: 9, ..base };
        let a = step_hull(&seed, &gens, &base).unwrap().mask;
        let b = step_hull(&seed, &gens, &more).unwrap().mask;
        assert!(a.is_subset_of(&b).unwrap());

        let vp = Viewport::square(c(0.0, 0.0), 6.0, 48, Metric::Plane).unwrap();
        let exp = [GeneratorSpec::scaled_exp(c(0.3, 0.0), c(0.0, 0.0)).unwrap()];
        let m = SetMask::from_centers(vp, |z| (z - c(1.0, 1.0)).norm() < 0.5);
        let narrow = HullParams {
            branch_request: BranchRequest { k_min: 0, k_max: 0, ..base.branch_request },
            ..base
        };
        let a = step_hull(&m, &exp, &narrow).unwrap().mask;
        let b = step_hull(&m, &exp, &base).unwrap().mask;
        assert!(a.is_subset_of(&b).unwrap());
        assert_ne!(a, b);
    }

    #[test]
    fn cell_samples_extend_as_prefixes() {
        let vp = sphere(8);
        let cell = Cell::new(3, 4);
        let long = cell_samples(&vp, cell, 20);
        for n in 1..20 {
            assert_eq!(cell_samples(&vp, cell, n), long[..n]);
        }
        let (lo, hi) = vp.cell_rect(cell);
        for z in long {
            assert!(z.re >= lo.re && z.re <= hi.re && z.im >= lo.im && z.im <= hi.im);
        }
    }

    #[test]
    fn empty_mask_step_rejected() {
        let vp = sphere(8);
        assert!(matches!(
            step_hull(&SetMask::empty(vp), &rational(), &HullParams::default()),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn perfectness_counts_stray_cell() {
        let vp = sphere(16);
        let mut m = dilate(&SetMask::from_cells(vp, |c| c == Cell::new(3, 3)), 1);
        assert_eq!(perfectness_report(&m).unwrap().isolated_count, 0);
        m.set(Cell::new(12, 12), true);
        let r = perfectness_report(&m).unwrap();
        assert_eq!(r.isolated_count, 1);
        assert_eq!(r.locations, vec![Cell::new(12, 12)]);
        assert!(perfectness_report(&SetMask::empty(vp)).is_err());
    }

    fn fake_result(mask: SetMask, status: HullStatus, mode: HullMode) -> HullResult {
        HullResult {
            seed: mask.clone(),
            final_mask: mask,
            status,
            generations_run: 1,
            per_generation_area: vec![],
            interior_witness: None,
            evidence_mask: None,
            dropped_forward: 0,
            monotonicity_violations: 0,
            params: HullParams { mode, ..HullParams::default() },
            word_len: 1,
            classify: ClassifyParams::default(),
        }
    }

    #[test]
    fn unboundedness_examples() {
        let vp = sphere(32);
        let blob = SetMask::from_centers(vp, |z| z.norm() < 1.0);
        let r = unboundedness_report(&fake_result(blob, HullStatus::Converged, HullMode::CompletelyInvariant));
        assert!(r.unwrap().w_touches_edge);
        let full = fake_result(SetMask::full(vp), HullStatus::Converged, HullMode::CompletelyInvariant);
        assert!(unboundedness_report(&full).is_err());
        let sat = fake_result(SetMask::full(vp), HullStatus::SaturatedWholePlane, HullMode::CompletelyInvariant);
        assert!(unboundedness_report(&sat).is_err());
    }

    #[test]
    fn subset_report_checks_parameters() {
        let vp = sphere(32);
        let small = SetMask::from_centers(vp, |z| z.norm() < 1.0);
        let big = SetMask::from_centers(vp, |z| z.norm() < 2.0);
        let j = fake_result(small.clone(), HullStatus::Converged, HullMode::BackwardOnly);
        let e = fake_result(big.clone(), HullStatus::Converged, HullMode::CompletelyInvariant);
        assert_eq!(subset_report(&j, &e).unwrap().violations, 0);
        let swapped = fake_result(small, HullStatus::Converged, HullMode::CompletelyInvariant);
        let jbig = fake_result(big, HullStatus::Converged, HullMode::BackwardOnly);
        assert!(subset_report(&jbig, &swapped).unwrap().violations > 0);
        let mut mismatched = e.clone();
        mismatched.params.closure_dilation = 0;
        assert!(subset_report(&j, &mismatched).is_err());
        assert!(subset_report(&e, &j).is_err());
    }

    #[test]
    fn rational_hulls_small_grid() {
        let vp = sphere(128);
        let gens = rational();
        let cp = ClassifyParams::default();
        let e = iterate_hull(&gens, &vp, &HullParams::default(), &cp, 1).unwrap();
        assert_eq!(e.status, HullStatus::SaturatedWholePlane);
        assert_eq!(e.final_mask, SetMask::full(vp));
        assert!(e.evidence_mask.is_some());
        let jp = HullParams { mode: HullMode::BackwardOnly, ..HullParams::default() };
        let j = iterate_hull(&gens, &vp, &jp, &cp, 1).unwrap();
        assert_eq!(j.status, HullStatus::Converged);
        let annulus = raster_annulus(vp, c(0.0, 0.0), 1.0, 2.0);
        assert!(hausdorff_cells(&j.final_mask, &annulus).unwrap() <= 3.0);
        for h in [&e, &j] {
            assert_eq!(h.monotonicity_violations, 0);
            assert!(h.per_generation_area.windows(2).all(|w| w[0] <= w[1]));
        }
        assert_eq!(subset_report(&j, &e).unwrap().violations, 0);
    }

    #[test]
    fn generator_order_does_not_matter() {
        let vp = sphere(64);
        let mut gens = rational();
        let cp = ClassifyParams::default();
        let hp = HullParams { mode: HullMode::BackwardOnly, ..HullParams::default() };
        let a = iterate_hull(&gens, &vp, &hp, &cp, 1).unwrap();
        gens.reverse();
        let b = iterate_hull(&gens, &vp, &hp, &cp, 1).unwrap();
        assert_eq!(a.final_mask, b.final_mask);
        assert_eq!(a.generations_run, b.generations_run);
    }
}
