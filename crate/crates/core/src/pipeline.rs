//! Scenario runs: stages in dependency order (seeds, masks, hulls,
//! reports), artifact emission, and the verification suite.

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;

use crate::classify::{fatou_mask, julia_mask_semigroup, julia_mask_single};
use crate::config::{Output, Scenario, ScenarioConfig};
use crate::dynamics::GeneratorSpec;
use crate::error::{Error, Result};
use crate::grid::{hausdorff_cells, raster_annulus, SetMask, Viewport};
use crate::hull::{
    iterate_hull, perfectness_report, subset_report, unboundedness_report, HullMode, HullResult,
    HullStatus,
};
use crate::invariance::{backward_invariance, complete_invariance, forward_invariance, InvarianceReport};
use crate::output::{emit_mask_image, emit_report, RunManifest, StageRecord, StageStatus, Value};

/// The stated limit of any whole-plane verdict.
pub const SATURATION_NOTE: &str = "note: a whole-plane verdict is evidence from saturating a finite viewport; \
it cannot prove that the completely invariant Julia set is the whole plane";

type Metrics = Vec<(String, Value)>;

/// Lazily computed products shared by the stages.
struct Products<'a> {
    cfg: &'a ScenarioConfig,
    gens: Vec<GeneratorSpec>,
    vp: Viewport,
    singles: Option<Vec<SetMask>>,
    semigroup: Option<SetMask>,
    e: Option<HullResult>,
    j: Option<HullResult>,
}

impl<'a> Products<'a> {
    fn new(cfg: &'a ScenarioConfig) -> Result<Self> {
        Ok(Products {
            cfg,
            gens: cfg.resolved_generators()?,
            vp: cfg.build_viewport()?,
            singles: None,
            semigroup: None,
            e: None,
            j: None,
        })
    }

    fn singles(&mut self) -> Result<&[SetMask]> {
        if self.singles.is_none() {
            let masks = self
                .gens
                .iter()
                .map(|g| julia_mask_single(g, &self.vp, &self.cfg.classify))
                .collect::<Result<_>>()?;
            self.singles = Some(masks);
        }
        Ok(self.singles.as_deref().unwrap_or_default())
    }

    fn semigroup(&mut self) -> Result<&SetMask> {
        if self.semigroup.is_none() {
            let m = julia_mask_semigroup(&self.gens, &self.vp, self.cfg.semigroup_word_len, &self.cfg.classify)?;
            self.semigroup = Some(m);
        }
        Ok(self.semigroup.as_ref().expect("just computed"))
    }

    fn hull(&mut self, mode: HullMode) -> Result<&HullResult> {
        let slot_empty = match mode {
            HullMode::CompletelyInvariant => self.e.is_none(),
            HullMode::BackwardOnly => self.j.is_none(),
        };
        if slot_empty {
            let hp = crate::hull::HullParams { mode, ..self.cfg.hull };
            let r = iterate_hull(&self.gens, &self.vp, &hp, &self.cfg.classify, self.cfg.seed_word_len)?;
            match mode {
                HullMode::CompletelyInvariant => self.e = Some(r),
                HullMode::BackwardOnly => self.j = Some(r),
            }
        }
        Ok(match mode {
            HullMode::CompletelyInvariant => self.e.as_ref(),
            HullMode::BackwardOnly => self.j.as_ref(),
        }
        .expect("just computed"))
    }

    /// The analytic J(S) annulus when the generators are the rational pair.
    fn analytic_annulus(&self) -> Option<SetMask> {
        (self.cfg.scenario == Scenario::RationalPair)
            .then(|| raster_annulus(self.vp, Complex64::new(0.0, 0.0), 1.0, self.cfg.a.norm()))
    }
}

fn hausdorff_metric(metrics: &mut Metrics, name: &str, a: &SetMask, b: &SetMask) {
    if let Ok(h) = hausdorff_cells(a, b) {
        metrics.push((name.into(), h.into()));
    }
}

fn status_name(s: HullStatus) -> &'static str {
    match s {
        HullStatus::Converged => "Converged",
        HullStatus::SaturatedWholePlane => "SaturatedWholePlane",
        HullStatus::MaxGenerations => "MaxGenerations",
    }
}

fn hull_metrics(h: &HullResult, metrics: &mut Metrics) -> Result<()> {
    metrics.push(("status".into(), status_name(h.status).into()));
    metrics.push(("generations_run".into(), h.generations_run.into()));
    metrics.push(("final_area".into(), h.final_mask.area_fraction().into()));
    if let Some(ev) = &h.evidence_mask {
        metrics.push(("evidence_area".into(), ev.area_fraction().into()));
    }
    if let Some(w) = h.interior_witness {
        metrics.push(("interior_witness_col".into(), w.col.into()));
        metrics.push(("interior_witness_row".into(), w.row.into()));
    }
    metrics.push(("dropped_forward".into(), h.dropped_forward.into()));
    metrics.push(("monotonicity_violations".into(), h.monotonicity_violations.into()));
    if !h.final_mask.is_empty() {
        metrics.push(("isolated_count".into(), perfectness_report(&h.final_mask)?.isolated_count.into()));
    }
    if h.status == HullStatus::Converged && h.final_mask.count() < h.final_mask.viewport().len() {
        metrics.push(("w_touches_edge".into(), unboundedness_report(h)?.w_touches_edge.into()));
    }
    Ok(())
}

fn invariance_metrics(label: &str, r: &InvarianceReport, metrics: &mut Metrics) {
    metrics.push((format!("{label}.samples_tested"), r.samples_tested.into()));
    metrics.push((format!("{label}.violations"), r.violations.into()));
    metrics.push((format!("{label}.violation_fraction"), r.violation_fraction.into()));
    metrics.push((format!("{label}.outside_viewport"), r.outside_viewport.into()));
}

struct Emitter<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Emitter<'_> {
    fn image(&mut self, name: &str, m: &SetMask) -> Result<()> {
        let p = self.dir.join(name);
        emit_mask_image(m, &p)?;
        self.files.push(p);
        Ok(())
    }
}

fn stage_julia_single(p: &mut Products, out: &mut Emitter) -> Result<Metrics> {
    let masks = p.singles()?.to_vec();
    let mut metrics = Metrics::new();
    for (i, m) in masks.iter().enumerate() {
        metrics.push((format!("g{i}.area"), m.area_fraction().into()));
        out.image(&format!("julia_single_g{i}.pgm"), m)?;
    }
    for (i, m) in masks.iter().enumerate().skip(1) {
        hausdorff_metric(&mut metrics, &format!("hausdorff_g0_g{i}"), &masks[0], m);
    }
    Ok(metrics)
}

fn stage_julia_semigroup(p: &mut Products, out: &mut Emitter) -> Result<Metrics> {
    let js = p.semigroup()?.clone();
    let mut metrics = vec![
        ("word_len".to_string(), p.cfg.semigroup_word_len.into()),
        ("area".to_string(), js.area_fraction().into()),
    ];
    let g0 = p.singles()?[0].clone();
    hausdorff_metric(&mut metrics, "hausdorff_vs_g0", &js, &g0);
    if let Some(ann) = p.analytic_annulus() {
        hausdorff_metric(&mut metrics, "hausdorff_vs_analytic_annulus", &js, &ann);
    }
    out.image("julia_semigroup.pgm", &js)?;
    Ok(metrics)
}

fn stage_hull(p: &mut Products, out: &mut Emitter, mode: HullMode) -> Result<Metrics> {
    let h = p.hull(mode)?.clone();
    let mut metrics = Metrics::new();
    hull_metrics(&h, &mut metrics)?;
    if h.status != HullStatus::SaturatedWholePlane {
        let g0 = p.singles()?[0].clone();
        hausdorff_metric(&mut metrics, "hausdorff_vs_g0", &h.final_mask, &g0);
    }
    if let Some(ann) = p.analytic_annulus() {
        hausdorff_metric(&mut metrics, "hausdorff_vs_analytic_annulus", &h.final_mask, &ann);
    }
    let name = match mode {
        HullMode::CompletelyInvariant => "e_hull",
        HullMode::BackwardOnly => "j_hull",
    };
    out.image(&format!("{name}.pgm"), &h.final_mask)?;
    if let Some(ev) = &h.evidence_mask {
        out.image(&format!("{name}_evidence.pgm"), ev)?;
    }
    Ok(metrics)
}

fn stage_subset(p: &mut Products) -> Result<Metrics> {
    let e = p.hull(HullMode::CompletelyInvariant)?.clone();
    let j = p.hull(HullMode::BackwardOnly)?;
    Ok(vec![("violations".into(), subset_report(j, &e)?.violations.into())])
}

fn stage_invariance(p: &mut Products) -> Result<Metrics> {
    let ip = p.cfg.invariance;
    let gens = p.gens.clone();
    let js = p.semigroup()?.clone();
    let fs = fatou_mask(&js);
    let mut metrics = Metrics::new();
    if !fs.is_empty() {
        invariance_metrics("fatou.forward", &forward_invariance(&fs, &gens, &ip)?, &mut metrics);
        invariance_metrics("fatou.backward", &backward_invariance(&fs, &gens, &ip)?, &mut metrics);
    }
    if !js.is_empty() {
        invariance_metrics("julia.backward", &backward_invariance(&js, &gens, &ip)?, &mut metrics);
    }
    let e = p.hull(HullMode::CompletelyInvariant)?;
    if e.status == HullStatus::Converged && !e.final_mask.is_empty() {
        let (f, b) = complete_invariance(&e.final_mask, &gens, &ip)?;
        invariance_metrics("e-hull.forward", &f, &mut metrics);
        invariance_metrics("e-hull.backward", &b, &mut metrics);
    }
    Ok(metrics)
}

/// Runs the requested stages and writes their artifacts under `out_dir`.
/// A failing stage is recorded and stops only the stages that need it.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    let mut manifest = RunManifest {
        config_echo: cfg.to_config_string(),
        ..RunManifest::default()
    };
    if cfg.outputs.is_empty() {
        return Ok(manifest);
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut products = Products::new(cfg)?;
    let mut out = Emitter { dir: out_dir, files: Vec::new() };
    let wants = |o: Output| cfg.outputs.contains(&o);

    let mut plan: Vec<(&str, Vec<&str>)> = Vec::new();
    if wants(Output::JuliaSingle) {
        plan.push(("julia-single", vec![]));
    }
    if wants(Output::JuliaSemigroup) {
        plan.push(("julia-semigroup", vec![]));
    }
    if wants(Output::EHull) {
        plan.push(("e-hull", vec![]));
    }
    if wants(Output::JHull) {
        plan.push(("j-hull", vec![]));
    }
    if wants(Output::EHull) && wants(Output::JHull) {
        plan.push(("subset", vec!["e-hull", "j-hull"]));
    }
    if wants(Output::Invariance) {
        let mut deps = vec![];
        if wants(Output::JuliaSemigroup) {
            deps.push("julia-semigroup");
        }
        if wants(Output::EHull) {
            deps.push("e-hull");
        }
        plan.push(("invariance", deps));
    }

    for (name, deps) in plan {
        let t = Instant::now();
        let failed_dep = deps.iter().find(|d| manifest.failed_stages().contains(d)).copied();
        let result = match failed_dep {
            Some(d) => Err(Error::Precondition(format!("upstream stage {d} failed"))),
            None => match name {
                "julia-single" => stage_julia_single(&mut products, &mut out),
                "julia-semigroup" => stage_julia_semigroup(&mut products, &mut out),
                "e-hull" => stage_hull(&mut products, &mut out, HullMode::CompletelyInvariant),
                "j-hull" => stage_hull(&mut products, &mut out, HullMode::BackwardOnly),
                "subset" => stage_subset(&mut products),
                _ => stage_invariance(&mut products),
            },
        };
        let (status, metrics) = match result {
            Ok(m) => (StageStatus::Ok, m),
            Err(e) => (StageStatus::Failed(e.to_string()), Vec::new()),
        };
        manifest.stages.push(StageRecord {
            name: name.to_string(),
            status,
            seconds: t.elapsed().as_secs_f64(),
            metrics,
        });
    }

    if wants(Output::Reports) {
        let p = out_dir.join("report.csv");
        emit_report(&manifest, &p)?;
        out.files.push(p);
    }
    manifest.artifacts = out.files;
    let mpath = out_dir.join("manifest.txt");
    manifest.artifacts.push(mpath.clone());
    std::fs::write(&mpath, manifest.render()).map_err(|e| Error::io(&mpath, e))?;
    Ok(manifest)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct VerifyOutcome {
    pub manifest: RunManifest,
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn num(m: &RunManifest, stage: &str, metric: &str) -> Option<f64> {
    match m.metric(stage, metric)? {
        Value::Num(x) => Some(*x),
        Value::Int(i) => Some(*i as f64),
        Value::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
        Value::Text(_) => None,
    }
}

fn text<'m>(m: &'m RunManifest, stage: &str, metric: &str) -> Option<&'m str> {
    match m.metric(stage, metric)? {
        Value::Text(s) => Some(s),
        _ => None,
    }
}

/// Runs every stage of a preset and checks the invariance, subset and
/// perfectness suite. The report gains one `verify` row per check.
pub fn verify(cfg: &ScenarioConfig, out_dir: &Path) -> Result<VerifyOutcome> {
    let cfg = ScenarioConfig {
        outputs: Output::ALL.to_vec(),
        ..cfg.clone()
    };
    let mut manifest = run_scenario(&cfg, out_dir)?;
    let m = &manifest;
    let mut checks = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.into(), passed, detail });
    };

    let failed = m.failed_stages();
    check("stages-complete", failed.is_empty(), format!("failed: {failed:?}"));

    for hull in ["e-hull", "j-hull"] {
        let v = num(m, hull, "monotonicity_violations");
        check(&format!("{hull}-monotone"), v == Some(0.0), format!("lost cells {v:?}"));
    }
    let v = num(m, "subset", "violations");
    check("subset-j-in-e", v == Some(0.0), format!("violations {v:?}"));

    let converged = text(m, "e-hull", "status") == Some("Converged");
    if converged {
        let iso = num(m, "e-hull", "isolated_count");
        check("e-hull-perfect", iso == Some(0.0), format!("isolated {iso:?}"));
        let w = num(m, "e-hull", "w_touches_edge");
        check("e-hull-complement-unbounded", w == Some(1.0), format!("touches edge {w:?}"));
        for dir in ["forward", "backward"] {
            let f = num(m, "invariance", &format!("e-hull.{dir}.violation_fraction"));
            check(
                &format!("e-hull-{dir}-invariant"),
                f.is_some_and(|f| f <= 0.01),
                format!("fraction {f:?} (≤ 0.01)"),
            );
        }
    }
    if m.metric("invariance", "fatou.forward.violation_fraction").is_some() {
        let f = num(m, "invariance", "fatou.forward.violation_fraction");
        check("fatou-forward-invariant", f.is_some_and(|f| f <= 0.01), format!("fraction {f:?} (≤ 0.01)"));
    }
    let f = num(m, "invariance", "julia.backward.violation_fraction");
    check("julia-backward-invariant", f.is_some_and(|f| f <= 0.01), format!("fraction {f:?} (≤ 0.01)"));
    if cfg.scenario == Scenario::RationalPair {
        let f = num(m, "invariance", "fatou.backward.violation_fraction");
        check(
            "fatou-not-backward-invariant",
            f.is_some_and(|f| f > 0.05),
            format!("fraction {f:?} (> 0.05, negative control)"),
        );
    }

    manifest.stages.push(StageRecord {
        name: "verify".into(),
        status: StageStatus::Ok,
        seconds: 0.0,
        metrics: checks
            .iter()
            .map(|c| (c.name.clone(), Value::from(if c.passed { "pass" } else { "fail" })))
            .collect(),
    });
    emit_report(&manifest, &out_dir.join("report.csv"))?;
    let mpath = out_dir.join("manifest.txt");
    std::fs::write(&mpath, manifest.render()).map_err(|e| Error::io(&mpath, e))?;
    Ok(VerifyOutcome { manifest, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderSet {
    /// Julia set of the first generator.
    Jf,
    /// Julia set of the second generator.
    Jg,
    /// Semigroup Julia set.
    Js,
    /// Completely invariant hull.
    E,
    /// Backward hull.
    J,
}

impl std::str::FromStr for RenderSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jf" => Ok(RenderSet::Jf),
            "jg" => Ok(RenderSet::Jg),
            "js" => Ok(RenderSet::Js),
            "e" => Ok(RenderSet::E),
            "j" => Ok(RenderSet::J),
            _ => Err(Error::param("set", format!("unknown set `{s}`"))),
        }
    }
}

/// Computes one set for a scenario and writes it as a PGM.
pub fn render(cfg: &ScenarioConfig, set: RenderSet, path: &Path) -> Result<SetMask> {
    cfg.validate()?;
    let mut p = Products::new(cfg)?;
    let mask = match set {
        RenderSet::Jf => p.singles()?[0].clone(),
        RenderSet::Jg => p
            .singles()?
            .get(1)
            .cloned()
            .ok_or_else(|| Error::param("set", "scenario has a single generator"))?,
        RenderSet::Js => p.semigroup()?.clone(),
        RenderSet::E => p.hull(HullMode::CompletelyInvariant)?.final_mask.clone(),
        RenderSet::J => p.hull(HullMode::BackwardOnly)?.final_mask.clone(),
    };
    emit_mask_image(&mask, path)?;
    Ok(mask)
}
