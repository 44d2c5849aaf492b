//! Scenario configuration: presets and the `key = value` / `[section]` text
//! format.
//!
//! ```text
//! scenario = rational-pair
//! a = 2
//!
//! [viewport]
//! cols = 256
//! rows = 256
//!
//! [outputs]
//! list = julia-semigroup, j-hull, reports
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::classify::{metric_for, ClassifyParams};
use crate::dynamics::{Family, GeneratorSpec};
use crate::error::{Error, Result};
use crate::grid::{Metric, Viewport};
use crate::hull::{HullParams, MAX_HULL_GENERATORS};
use crate::invariance::InvarianceParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    SinePair,
    ExpPair,
    RationalPair,
    Custom,
}

impl Scenario {
    pub const PRESETS: [Scenario; 3] = [Scenario::SinePair, Scenario::ExpPair, Scenario::RationalPair];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::SinePair => "sine-pair",
            Scenario::ExpPair => "exp-pair",
            Scenario::RationalPair => "rational-pair",
            Scenario::Custom => "custom",
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sine-pair" => Ok(Scenario::SinePair),
            "exp-pair" => Ok(Scenario::ExpPair),
            "rational-pair" => Ok(Scenario::RationalPair),
            "custom" => Ok(Scenario::Custom),
            other => Err(Error::param("scenario", format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    JuliaSingle,
    JuliaSemigroup,
    EHull,
    JHull,
    Invariance,
    Reports,
}

impl Output {
    pub const ALL: [Output; 6] = [
        Output::JuliaSingle,
        Output::JuliaSemigroup,
        Output::EHull,
        Output::JHull,
        Output::Invariance,
        Output::Reports,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::JuliaSingle => "julia-single",
            Output::JuliaSemigroup => "julia-semigroup",
            Output::EHull => "e-hull",
            Output::JHull => "j-hull",
            Output::Invariance => "invariance",
            Output::Reports => "reports",
        }
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Output::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::param("outputs", format!("unknown output `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViewportSpec {
    pub center: Complex64,
    pub half_width: f64,
    pub half_height: f64,
    pub cols: usize,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// λ for the sine and exponential pairs.
    pub lambda: f64,
    /// Divisor of the second rational generator.
    pub a: Complex64,
    /// Generators of a custom scenario.
    pub generators: Vec<GeneratorSpec>,
    pub viewport: ViewportSpec,
    pub classify: ClassifyParams,
    pub hull: HullParams,
    pub invariance: InvarianceParams,
    pub semigroup_word_len: usize,
    pub seed_word_len: usize,
    pub outputs: Vec<Output>,
}

impl ScenarioConfig {
    pub fn preset(s: Scenario) -> Self {
        let transcendental = ViewportSpec {
            center: Complex64::new(0.0, 0.0),
            half_width: 4.0 * PI,
            half_height: 4.0 * PI,
            cols: 512,
            rows: 512,
        };
        let base = ScenarioConfig {
            scenario: s,
            lambda: 0.9,
            a: Complex64::new(2.0, 0.0),
            generators: Vec::new(),
            viewport: transcendental,
            classify: ClassifyParams::default(),
            hull: HullParams::default(),
            invariance: InvarianceParams::default(),
            semigroup_word_len: 2,
            seed_word_len: 1,
            outputs: Output::ALL.to_vec(),
        };
        match s {
            Scenario::SinePair | Scenario::Custom => base,
            Scenario::ExpPair => ScenarioConfig { lambda: 0.3, ..base },
            Scenario::RationalPair => ScenarioConfig {
                viewport: ViewportSpec {
                    half_width: 3.0,
                    half_height: 3.0,
                    ..transcendental
                },
                semigroup_word_len: 8,
                ..base
            },
        }
    }

    /// The generator list: fixed by the preset, or the custom list.
    pub fn resolved_generators(&self) -> Result<Vec<GeneratorSpec>> {
        let l = Complex64::new(self.lambda, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self.scenario {
            Scenario::SinePair => Ok(vec![
                GeneratorSpec::scaled_sine(l, zero)?,
                GeneratorSpec::scaled_sine(l, Complex64::new(2.0 * PI, 0.0))?,
            ]),
            Scenario::ExpPair => Ok(vec![
                GeneratorSpec::scaled_exp(l, zero)?,
                GeneratorSpec::z_minus_exp_shift(),
            ]),
            Scenario::RationalPair => Ok(vec![
                GeneratorSpec::power(2)?,
                GeneratorSpec::power_over_a(self.a, 2)?,
            ]),
            Scenario::Custom => Ok(self.generators.clone()),
        }
    }

    pub fn metric(&self) -> Result<Metric> {
        metric_for(&self.resolved_generators()?)
    }

    pub fn build_viewport(&self) -> Result<Viewport> {
        let v = &self.viewport;
        Viewport::new(v.center, v.half_width, v.half_height, v.cols, v.rows, self.metric()?)
    }

    /// Checks parameter ranges; errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        match self.scenario {
            Scenario::SinePair => {
                if !(self.lambda > 0.0 && self.lambda < 1.0) {
                    return Err(Error::param("lambda", "sine-pair needs 0 < λ < 1"));
                }
            }
            Scenario::ExpPair => {
                if !(self.lambda > 0.0 && self.lambda < (-1.0f64).exp()) {
                    return Err(Error::param("lambda", "exp-pair needs 0 < λ < 1/e"));
                }
            }
            Scenario::RationalPair => {
                if !(self.a.norm() > 1.0) {
                    return Err(Error::param("a", "rational-pair needs |a| > 1"));
                }
            }
            Scenario::Custom => {
                if self.generators.is_empty() {
                    return Err(Error::param("generators", "custom scenarios need generators"));
                }
                if self.generators.len() > MAX_HULL_GENERATORS {
                    return Err(Error::param(
                        "generators",
                        format!("at most {MAX_HULL_GENERATORS} generators"),
                    ));
                }
            }
        }
        if self.semigroup_word_len == 0 {
            return Err(Error::param("semigroup_word_len", "must be positive"));
        }
        if self.seed_word_len == 0 {
            return Err(Error::param("seed_word_len", "must be positive"));
        }
        let vp = self.build_viewport()?;
        self.classify.validate_for(&vp)?;
        self.hull.validate()?;
        self.invariance.validate()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// Canonical text form; parsing it yields an equal config.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let c = &self.classify;
        let h = &self.hull;
        let b = &h.branch_request;
        let i = &self.invariance;
        let v = &self.viewport;
        let _ = writeln!(s, "scenario = {}", self.scenario.name());
        let _ = writeln!(s, "lambda = {}", self.lambda);
        let _ = writeln!(s, "a = {}", fmt_complex(self.a));
        let _ = writeln!(s, "semigroup_word_len = {}", self.semigroup_word_len);
        let _ = writeln!(s, "seed_word_len = {}", self.seed_word_len);
        let _ = writeln!(s, "\n[viewport]");
        let _ = writeln!(s, "center = {}", fmt_complex(v.center));
        let _ = writeln!(s, "half_width = {}", v.half_width);
        let _ = writeln!(s, "half_height = {}", v.half_height);
        let _ = writeln!(s, "cols = {}", v.cols);
        let _ = writeln!(s, "rows = {}", v.rows);
        let _ = writeln!(s, "\n[classify]");
        let _ = writeln!(s, "max_iter = {}", c.max_iter);
        let _ = writeln!(s, "escape_radius = {}", c.escape_radius);
        let _ = writeln!(s, "attract_tolerance = {}", c.attract_tolerance);
        let _ = writeln!(s, "separation_delta = {}", c.separation_delta);
        if let Some(p) = c.probe_offset {
            let _ = writeln!(s, "probe_offset = {p}");
        }
        let _ = writeln!(s, "undetermined_as_julia = {}", c.undetermined_as_julia);
        let _ = writeln!(s, "supersample = {}", c.supersample);
        let _ = writeln!(s, "\n[hull]");
        let _ = writeln!(s, "max_generations = {}", h.max_generations);
        let _ = writeln!(s, "saturation_fraction = {}", h.saturation_fraction);
        let _ = writeln!(s, "closure_dilation = {}", h.closure_dilation);
        let _ = writeln!(s, "forward_samples_per_cell = {}", h.forward_samples_per_cell);
        let _ = writeln!(s, "interior_radius = {}", h.interior_radius);
        let _ = writeln!(s, "k_min = {}", b.k_min);
        let _ = writeln!(s, "k_max = {}", b.k_max);
        let _ = writeln!(s, "newton_tolerance = {}", b.newton_tolerance);
        let _ = writeln!(s, "newton_max_steps = {}", b.newton_max_steps);
        let _ = writeln!(s, "seed_spacing = {}", b.seed_spacing);
        let _ = writeln!(s, "\n[invariance]");
        let _ = writeln!(s, "samples = {}", i.samples);
        let _ = writeln!(s, "seed = {}", i.seed);
        let _ = writeln!(s, "tolerance_cells = {}", i.tolerance_cells);
        let ib = &i.branch_request;
        let _ = writeln!(s, "k_min = {}", ib.k_min);
        let _ = writeln!(s, "k_max = {}", ib.k_max);
        let _ = writeln!(s, "newton_tolerance = {}", ib.newton_tolerance);
        let _ = writeln!(s, "newton_max_steps = {}", ib.newton_max_steps);
        let _ = writeln!(s, "seed_spacing = {}", ib.seed_spacing);
        if !self.generators.is_empty() {
            let _ = writeln!(s, "\n[generators]");
            for (k, g) in self.generators.iter().enumerate() {
                let _ = writeln!(s, "g{k} = {}", generator_line(g));
            }
        }
        let _ = writeln!(s, "\n[outputs]");
        let names: Vec<&str> = self.outputs.iter().map(|o| o.name()).collect();
        let _ = writeln!(s, "list = {}", names.join(", "));
        s
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

fn generator_line(g: &GeneratorSpec) -> String {
    match g.family() {
        Family::ScaledSine | Family::ScaledExp => format!(
            "{} lambda={} shift={}",
            g.family().name(),
            fmt_complex(g.lambda()),
            fmt_complex(g.shift())
        ),
        Family::ZMinusExpShift => g.family().name().to_string(),
        Family::PowerOverA => format!(
            "{} a={} degree={}",
            g.family().name(),
            fmt_complex(g.a()),
            g.degree()
        ),
    }
}

fn syntax(line: usize, reason: impl Into<String>) -> Error {
    Error::ConfigSyntax { line, reason: reason.into() }
}

fn parse_num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| syntax(line, format!("`{key}` expects a number, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(syntax(line, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

/// `re,im` or a bare real.
fn parse_complex(line: usize, key: &str, v: &str) -> Result<Complex64> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_num(line, key, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_num(line, key, re)?, parse_num(line, key, im)?)),
        _ => Err(syntax(line, format!("`{key}` expects `re,im`, got `{v}`"))),
    }
}

fn parse_generator(line: usize, v: &str) -> Result<GeneratorSpec> {
    let mut words = v.split_whitespace();
    let fam_name = words.next().ok_or_else(|| syntax(line, "empty generator"))?;
    let family = Family::parse(fam_name)
        .ok_or_else(|| syntax(line, format!("unknown generator family `{fam_name}`")))?;
    let mut lambda = Complex64::new(1.0, 0.0);
    let mut shift = Complex64::new(0.0, 0.0);
    let mut a = Complex64::new(1.0, 0.0);
    let mut degree = 2u32;
    for kv in words {
        let (k, val) = kv
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, got `{kv}`")))?;
        match k {
            "lambda" => lambda = parse_complex(line, k, val)?,
            "shift" => shift = parse_complex(line, k, val)?,
            "a" => a = parse_complex(line, k, val)?,
            "degree" => degree = parse_num(line, k, val)?,
            _ => return Err(syntax(line, format!("unknown generator parameter `{k}`"))),
        }
    }
    match family {
        Family::ScaledSine => GeneratorSpec::scaled_sine(lambda, shift),
        Family::ScaledExp => GeneratorSpec::scaled_exp(lambda, shift),
        Family::ZMinusExpShift => Ok(GeneratorSpec::z_minus_exp_shift()),
        Family::PowerOverA if a == Complex64::new(1.0, 0.0) => GeneratorSpec::power(degree),
        Family::PowerOverA => GeneratorSpec::power_over_a(a, degree),
    }
}

impl FromStr for ScenarioConfig {
    type Err = Error;

    /// Keys before any section header are scenario-level; a `scenario` key,
    /// if present, must come first because it selects the preset defaults.
    fn from_str(text: &str) -> Result<Self> {
        let mut cfg: Option<ScenarioConfig> = None;
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let t = raw.split('#').next().unwrap_or("").trim();
            if t.is_empty() {
                continue;
            }
            if let Some(name) = t.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| syntax(line, "unterminated section header"))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = t
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected key = value, got `{t}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if section.is_empty() && key == "scenario" {
                if cfg.is_some() {
                    return Err(syntax(line, "`scenario` must be the first setting"));
                }
                cfg = Some(ScenarioConfig::preset(value.parse()?));
                continue;
            }
            let c = cfg.get_or_insert_with(|| ScenarioConfig::preset(Scenario::Custom));
            apply_key(c, &section, key, value, line)?;
        }
        Ok(cfg.unwrap_or_else(|| ScenarioConfig::preset(Scenario::Custom)))
    }
}

fn apply_key(c: &mut ScenarioConfig, section: &str, key: &str, v: &str, line: usize) -> Result<()> {
    let unknown = || syntax(line, format!("unknown key `{key}` in [{section}]"));
    match section {
        "" => match key {
            "lambda" => c.lambda = parse_num(line, key, v)?,
            "a" => c.a = parse_complex(line, key, v)?,
            "semigroup_word_len" => c.semigroup_word_len = parse_num(line, key, v)?,
            "seed_word_len" => c.seed_word_len = parse_num(line, key, v)?,
            _ => return Err(unknown()),
        },
        "viewport" => {
            let vp = &mut c.viewport;
            match key {
                "center" => vp.center = parse_complex(line, key, v)?,
                "half_width" => vp.half_width = parse_num(line, key, v)?,
                "half_height" => vp.half_height = parse_num(line, key, v)?,
                "cols" => vp.cols = parse_num(line, key, v)?,
                "rows" => vp.rows = parse_num(line, key, v)?,
                _ => return Err(unknown()),
            }
        }
        "classify" => {
            let p = &mut c.classify;
            match key {
                "max_iter" => p.max_iter = parse_num(line, key, v)?,
                "escape_radius" => p.escape_radius = parse_num(line, key, v)?,
                "attract_tolerance" => p.attract_tolerance = parse_num(line, key, v)?,
                "separation_delta" => p.separation_delta = parse_num(line, key, v)?,
                "probe_offset" => p.probe_offset = Some(parse_num(line, key, v)?),
                "undetermined_as_julia" => p.undetermined_as_julia = parse_bool(line, key, v)?,
                "supersample" => p.supersample = parse_bool(line, key, v)?,
                _ => return Err(unknown()),
            }
        }
        "hull" => {
            let h = &mut c.hull;
            match key {
                "max_generations" => h.max_generations = parse_num(line, key, v)?,
                "saturation_fraction" => h.saturation_fraction = parse_num(line, key, v)?,
                "closure_dilation" => h.closure_dilation = parse_num(line, key, v)?,
                "forward_samples_per_cell" => h.forward_samples_per_cell = parse_num(line, key, v)?,
                "interior_radius" => h.interior_radius = parse_num(line, key, v)?,
                _ => apply_branch_key(&mut h.branch_request, key, v, line).map_err(|_| unknown())?,
            }
        }
        "invariance" => {
            let i = &mut c.invariance;
            match key {
                "samples" => i.samples = parse_num(line, key, v)?,
                "seed" => i.seed = parse_num(line, key, v)?,
                "tolerance_cells" => i.tolerance_cells = parse_num(line, key, v)?,
                _ => apply_branch_key(&mut i.branch_request, key, v, line).map_err(|_| unknown())?,
            }
        }
        "generators" => c.generators.push(parse_generator(line, v)?),
        "outputs" => match key {
            "list" => {
                c.outputs = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?;
            }
            _ => return Err(unknown()),
        },
        _ => return Err(syntax(line, format!("unknown section [{section}]"))),
    }
    Ok(())
}

fn apply_branch_key(b: &mut crate::dynamics::BranchRequest, key: &str, v: &str, line: usize) -> Result<()> {
    match key {
        "k_min" => b.k_min = parse_num(line, key, v)?,
        "k_max" => b.k_max = parse_num(line, key, v)?,
        "newton_tolerance" => b.newton_tolerance = parse_num(line, key, v)?,
        "newton_max_steps" => b.newton_max_steps = parse_num(line, key, v)?,
        "seed_spacing" => b.seed_spacing = parse_num(line, key, v)?,
        _ => return Err(syntax(line, "unknown key")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip_through_text() {
        for s in Scenario::PRESETS {
            let cfg = ScenarioConfig::preset(s);
            cfg.validate().unwrap();
            let back: ScenarioConfig = cfg.to_config_string().parse().unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn custom_generators_round_trip() {
        let text = "\
scenario = custom
[viewport]
cols = 64
rows = 32
half_height = 2
[generators]
f = scaled-sine lambda=0.9,0 shift=0,0
g = power-over-a a=1 degree=2
[outputs]
list = julia-single
";
        let err = text.parse::<ScenarioConfig>().unwrap().validate();
        assert!(err.is_err(), "mixed families must be rejected");
        let text = text.replace("power-over-a a=1 degree=2", "z-minus-exp-shift");
        let cfg: ScenarioConfig = text.parse().unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.generators.len(), 2);
        assert_eq!(cfg.viewport.cols, 64);
        assert_eq!(cfg.outputs, vec![Output::JuliaSingle]);
        let back: ScenarioConfig = cfg.to_config_string().parse().unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn preset_ranges_enforced() {
        let mut cfg = ScenarioConfig::preset(Scenario::ExpPair);
        cfg.lambda = 0.5;
        match cfg.validate() {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "lambda"),
            other => panic!("unexpected {other:?}"),
        }
        let mut cfg = ScenarioConfig::preset(Scenario::RationalPair);
        cfg.a = Complex64::new(0.5, 0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn preset_generators_are_fixed() {
        let g = ScenarioConfig::preset(Scenario::SinePair).resolved_generators().unwrap();
        assert_eq!(g[1].shift(), Complex64::new(2.0 * PI, 0.0));
        let g = ScenarioConfig::preset(Scenario::ExpPair).resolved_generators().unwrap();
        assert_eq!(g[0].lambda(), Complex64::new(0.3, 0.0));
        assert_eq!(g[1].family(), Family::ZMinusExpShift);
        let cfg = ScenarioConfig::preset(Scenario::RationalPair);
        assert_eq!(cfg.metric().unwrap(), Metric::Sphere);
        assert_eq!(cfg.build_viewport().unwrap().half_width(), 3.0);
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let r = "scenario = sine-pair\n[viewport]\ncols = many\n".parse::<ScenarioConfig>();
        assert!(matches!(r, Err(Error::ConfigSyntax { line: 3, .. })));
        let r = "scenario = sine-pair\nbogus = 1\n".parse::<ScenarioConfig>();
        assert!(matches!(r, Err(Error::ConfigSyntax { line: 2, .. })));
        let r = "[hull\n".parse::<ScenarioConfig>();
        assert!(matches!(r, Err(Error::ConfigSyntax { line: 1, .. })));
        let r = "scenario = moebius\n".parse::<ScenarioConfig>();
        assert!(r.is_err());
    }

    #[test]
    fn empty_output_list_parses() {
        let cfg: ScenarioConfig = "scenario = rational-pair\n[outputs]\nlist =\n".parse().unwrap();
        assert!(cfg.outputs.is_empty());
    }
}
