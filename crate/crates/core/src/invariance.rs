//! Sampled checks of forward, backward and complete invariance of a mask.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{finite, inverse_images, BranchRequest, GeneratorSpec};
use crate::error::{Error, Result};
use crate::grid::{chebyshev_distance_transform, dilate, Cell, SetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvarianceParams {
    pub samples: usize,
    pub seed: u64,
    /// Membership is tested against the mask dilated by this many cells.
    pub tolerance_cells: usize,
    pub branch_request: BranchRequest,
}

impl Default for InvarianceParams {
    fn default() -> Self {
        InvarianceParams {
            samples: 2000,
            seed: 0x5eed,
            tolerance_cells: 1,
            branch_request: BranchRequest::default(),
        }
    }
}

impl InvarianceParams {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::param("samples", "must be positive"));
        }
        self.branch_request.validate()
    }
}

/// Counts are over (sample point, generator) pairs whose images or
/// preimages reach the viewport; pairs landing entirely outside are counted
/// in `outside_viewport` instead.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub direction: Direction,
    pub samples_tested: usize,
    pub violations: usize,
    pub violation_fraction: f64,
    /// The violating sample whose landing is farthest from the mask.
    pub worst_witness: Option<(Complex64, usize)>,
    pub outside_viewport: usize,
}

/// Marked cell centers drawn uniformly with replacement.
fn draw_samples(m: &SetMask, p: &InvarianceParams) -> Result<Vec<Complex64>> {
    p.validate()?;
    let cells: Vec<Cell> = m.cells().collect();
    if cells.is_empty() {
        return Err(Error::EmptyMask);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let vp = m.viewport();
    Ok((0..p.samples)
        .map(|_| vp.cell_center(cells[rng.gen_range(0..cells.len())]))
        .collect())
}

/// Outcome for one (sample, generator) pair: `None` when nothing landed in
/// the viewport, otherwise the worst landing distance in cells (0 = inside
/// the tolerance mask).
type Landing = Option<u32>;

fn judge(m: &SetMask, tol: &SetMask, dist: &[u32], points: impl Iterator<Item = Complex64>) -> Landing {
    let vp = m.viewport();
    let mut out: Landing = None;
    for w in points {
        if !finite(w) {
            continue;
        }
        let Some(cell) = vp.locate(w) else { continue };
        let d = if tol.get(cell) { 0 } else { dist[vp.index(cell)].max(1) };
        out = Some(out.map_or(d, |o| o.max(d)));
    }
    out
}

fn report(
    direction: Direction,
    samples: &[Complex64],
    n_gens: usize,
    landings: Vec<Landing>,
) -> Result<InvarianceReport> {
    let mut tested = 0;
    let mut violations = 0;
    let mut outside = 0;
    let mut worst: Option<(u32, Complex64, usize)> = None;
    for (k, l) in landings.into_iter().enumerate() {
        let Some(d) = l else {
            outside += 1;
            continue;
        };
        tested += 1;
        if d > 0 {
            violations += 1;
            if worst.is_none_or(|(wd, _, _)| d > wd) {
                worst = Some((d, samples[k / n_gens], k % n_gens));
            }
        }
    }
    if tested == 0 {
        return Err(Error::Precondition(
            "no sample landed inside the viewport".into(),
        ));
    }
    Ok(InvarianceReport {
        direction,
        samples_tested: tested,
        violations,
        violation_fraction: violations as f64 / tested as f64,
        worst_witness: worst.map(|(_, z, g)| (z, g)),
        outside_viewport: outside,
    })
}

fn run(
    direction: Direction,
    m: &SetMask,
    gens: &[GeneratorSpec],
    samples: &[Complex64],
    p: &InvarianceParams,
) -> Result<InvarianceReport> {
    if gens.is_empty() {
        return Err(Error::Precondition("at least one generator is required".into()));
    }
    let tol = dilate(m, p.tolerance_cells);
    let dist = chebyshev_distance_transform(m);
    let landings: Vec<Landing> = (0..samples.len() * gens.len())
        .into_par_iter()
        .map(|k| {
            let z = samples[k / gens.len()];
            let g = &gens[k % gens.len()];
            match direction {
                Direction::Forward => judge(m, &tol, &dist, std::iter::once(g.apply(z))),
                Direction::Backward => {
                    let pre = inverse_images(g, z, &p.branch_request)
                        .map(|i| i.points)
                        .unwrap_or_default();
                    judge(m, &tol, &dist, pre.into_iter())
                }
            }
        })
        .collect();
    report(direction, samples, gens.len(), landings)
}

/// A sample is violating when its image under a generator lands inside the
/// viewport but outside the (tolerance-dilated) mask.
pub fn forward_invariance(m: &SetMask, gens: &[GeneratorSpec], p: &InvarianceParams) -> Result<InvarianceReport> {
    let samples = draw_samples(m, p)?;
    run(Direction::Forward, m, gens, &samples, p)
}

/// A sample is violating when some in-viewport preimage under a generator
/// lies outside the (tolerance-dilated) mask.
pub fn backward_invariance(m: &SetMask, gens: &[GeneratorSpec], p: &InvarianceParams) -> Result<InvarianceReport> {
    let samples = draw_samples(m, p)?;
    run(Direction::Backward, m, gens, &samples, p)
}

/// Forward and backward reports over one shared sample set.
pub fn complete_invariance(
    m: &SetMask,
    gens: &[GeneratorSpec],
    p: &InvarianceParams,
) -> Result<(InvarianceReport, InvarianceReport)> {
    let samples = draw_samples(m, p)?;
    Ok((
        run(Direction::Forward, m, gens, &samples, p)?,
        run(Direction::Backward, m, gens, &samples, p)?,
    ))
}
