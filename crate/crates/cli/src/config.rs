//! Run configuration: a flat `key = value` text format with `[section]` headers.
//!
//! ```text
//! # comment
//! [coefficient]
//! kind = mathieu        # or constant
//! gamma = 2
//! delta = 0.5
//! omega = 2
//! [time]
//! horizon = 10pi        # numbers accept a `pi` suffix
//! ```
//!
//! Every key is addressed by its dotted path (`coefficient.gamma`). All field
//! errors are collected before anything runs.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;

use loschmidt::classical::InvertedParams;
use loschmidt::hill::{CoefficientSpec, InitialPhaseData};
use loschmidt::states::{alpha_of_g, Parity, SpecialState, DEFAULT_TRUNCATION};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

struct Entry {
    value: String,
    line: usize,
    used: Cell<bool>,
}

/// Parsed but untyped configuration.
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
    order: Vec<String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, Vec<FieldError>> {
        let mut entries = BTreeMap::new();
        let mut order = Vec::new();
        let mut errors = Vec::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[') {
                match name.strip_suffix(']').map(str::trim) {
                    Some(s) if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') => {
                        section = s.to_string();
                    }
                    _ => errors.push(FieldError {
                        path: format!("line {line}"),
                        message: format!("malformed section header `{content}`"),
                    }),
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(FieldError {
                    path: format!("line {line}"),
                    message: format!("expected `key = value`, found `{content}`"),
                });
                continue;
            };
            let key = key.trim();
            if key.is_empty() {
                errors.push(FieldError {
                    path: format!("line {line}"),
                    message: "empty key".into(),
                });
                continue;
            }
            let path = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            if let Some(prev) = entries.get(&path) {
                let prev: &Entry = prev;
                errors.push(FieldError {
                    path,
                    message: format!("duplicate key (first set on line {})", prev.line),
                });
                continue;
            }
            order.push(path.clone());
            entries.insert(
                path,
                Entry {
                    value: value.trim().to_string(),
                    line,
                    used: Cell::new(false),
                },
            );
        }
        if errors.is_empty() {
            Ok(Self { entries, order })
        } else {
            Err(errors)
        }
    }

    fn get(&self, path: &str) -> Option<&str> {
        self.entries.get(path).map(|e| {
            e.used.set(true);
            e.value.as_str()
        })
    }

    fn has_section(&self, section: &str) -> bool {
        let prefix = format!("{section}.");
        self.entries.keys().any(|k| k.starts_with(&prefix))
    }

    /// Keys of a section in file order.
    fn section_keys(&self, section: &str) -> Vec<String> {
        let prefix = format!("{section}.");
        self.order
            .iter()
            .filter_map(|k| k.strip_prefix(&prefix).map(str::to_string))
            .collect()
    }

    fn unused(&self) -> Vec<FieldError> {
        self.order
            .iter()
            .filter(|k| !self.entries[*k].used.get())
            .map(|k| FieldError {
                path: k.clone(),
                message: "unknown key".into(),
            })
            .collect()
    }
}

/// Parses a real number, optionally with a `pi` suffix (`pi`, `2pi`, `-0.5pi`).
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let value = match t.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(head) => head.trim().trim_end_matches('*').trim().parse::<f64>().ok()? * PI,
        None => t.parse::<f64>().ok()?,
    };
    value.is_finite().then_some(value)
}

struct Reader<'a> {
    raw: &'a RawConfig,
    errors: Vec<FieldError>,
}

impl<'a> Reader<'a> {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(FieldError {
            path: path.to_string(),
            message: message.into(),
        });
    }

    fn opt_num(&mut self, path: &str) -> Option<f64> {
        let text = self.raw.get(path)?;
        match parse_number(text) {
            Some(v) => Some(v),
            None => {
                self.fail(path, format!("expected a finite number, found `{text}`"));
                None
            }
        }
    }

    fn num(&mut self, path: &str, default: f64) -> f64 {
        self.opt_num(path).unwrap_or(default)
    }

    fn required(&mut self, path: &str) -> f64 {
        if self.raw.get(path).is_none() {
            self.fail(path, "required");
            return f64::NAN;
        }
        self.opt_num(path).unwrap_or(f64::NAN)
    }

    fn positive(&mut self, path: &str, default: f64) -> f64 {
        let v = self.num(path, default);
        if !(v > 0.0) {
            self.fail(path, "must be positive");
        }
        v
    }

    fn count(&mut self, path: &str, default: usize) -> usize {
        match self.raw.get(path) {
            None => default,
            Some(text) => match text.parse::<usize>() {
                Ok(v) => v,
                Err(_) => {
                    self.fail(path, format!("expected a non-negative integer, found `{text}`"));
                    default
                }
            },
        }
    }

    fn flag(&mut self, path: &str, default: bool) -> bool {
        match self.raw.get(path) {
            None => default,
            Some("true") => true,
            Some("false") => false,
            Some(text) => {
                self.fail(path, format!("expected true or false, found `{text}`"));
                default
            }
        }
    }

    fn word(&mut self, path: &str) -> Option<String> {
        self.raw.get(path).map(str::to_string)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientConfig {
    Constant { value: f64, period: f64 },
    Mathieu { gamma: f64, delta: f64, omega: f64 },
}

impl CoefficientConfig {
    pub fn build(&self) -> loschmidt::Result<CoefficientSpec> {
        match *self {
            CoefficientConfig::Constant { value, period } => CoefficientSpec::constant(value, period),
            CoefficientConfig::Mathieu { gamma, delta, omega } => CoefficientSpec::mathieu(gamma, delta, omega),
        }
    }

    /// Parameter names accepted by a sweep.
    pub fn parameters(&self) -> &'static [&'static str] {
        match self {
            CoefficientConfig::Constant { .. } => &["value", "period"],
            CoefficientConfig::Mathieu { .. } => &["gamma", "delta", "omega"],
        }
    }

    pub fn with_parameter(&self, name: &str, v: f64) -> Self {
        let mut out = *self;
        match &mut out {
            CoefficientConfig::Constant { value, period } => match name {
                "value" => *value = v,
                "period" => *period = v,
                _ => {}
            },
            CoefficientConfig::Mathieu { gamma, delta, omega } => match name {
                "gamma" => *gamma = v,
                "delta" => *delta = v,
                "omega" => *omega = v,
                _ => {}
            },
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateChoice {
    Special(SpecialState),
    General { alpha: f64, parity: Parity, truncation: usize },
}

impl StateChoice {
    pub fn name(&self) -> &'static str {
        match self {
            StateChoice::Special(SpecialState::PhiG1) => "phi_g1",
            StateChoice::Special(SpecialState::ChiG3) => "chi_g3",
            StateChoice::General { .. } => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseChoice {
    /// `u0 = None` means `u0 = epsilon` (no initial dilation).
    Explicit {
        u0: Option<f64>,
        udot0: f64,
        theta0: f64,
        epsilon: f64,
    },
    Inverted(InvertedParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub x_max: f64,
    pub points: usize,
    pub dt: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub coefficient: CoefficientConfig,
    pub g: f64,
    pub state: StateChoice,
    pub phase: PhaseChoice,
    pub horizon: f64,
    pub step: f64,
    /// Integrate on `[-horizon, horizon]`.
    pub symmetric: bool,
    pub tolerance: f64,
    pub oracle: Option<OracleConfig>,
    pub classical_x0: Option<f64>,
    pub classical_v0: f64,
    pub classical_g: Option<f64>,
    pub name: Option<String>,
}

impl RunConfig {
    pub fn phase_data(&self) -> loschmidt::Result<InitialPhaseData> {
        match self.phase {
            PhaseChoice::Explicit {
                u0,
                udot0,
                theta0,
                epsilon,
            } => InitialPhaseData::new(u0.unwrap_or(epsilon), udot0, theta0, epsilon),
            PhaseChoice::Inverted(p) => p.phase_data(),
        }
    }
}

/// One swept axis: `count` evenly spaced values from `start` to `end`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.start + k as f64 * h).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub axes: Vec<SweepAxis>,
    /// `sweep.workers`; the command-line flag takes precedence.
    pub workers: Option<usize>,
}

impl SweepConfig {
    /// Grid points in lexicographic order of the axes as listed.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for axis in &self.axes {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(*v);
                        q
                    })
                })
                .collect();
        }
        points
    }

    pub fn config_at(&self, point: &[f64]) -> RunConfig {
        let mut cfg = self.base.clone();
        for (axis, v) in self.axes.iter().zip(point) {
            cfg.coefficient = cfg.coefficient.with_parameter(&axis.name, *v);
        }
        cfg
    }
}

fn read_coefficient(r: &mut Reader) -> CoefficientConfig {
    let kind = r.word("coefficient.kind").unwrap_or_else(|| "constant".into());
    match kind.as_str() {
        "constant" => CoefficientConfig::Constant {
            value: r.num("coefficient.value", 1.0),
            period: r.positive("coefficient.period", TAU),
        },
        "mathieu" => CoefficientConfig::Mathieu {
            gamma: r.required("coefficient.gamma"),
            delta: r.num("coefficient.delta", 0.0),
            omega: r.positive("coefficient.omega", 1.0),
        },
        other => {
            r.fail("coefficient.kind", format!("expected constant or mathieu, found `{other}`"));
            CoefficientConfig::Constant {
                value: 1.0,
                period: TAU,
            }
        }
    }
}

fn read_state(r: &mut Reader) -> (StateChoice, f64) {
    let id = r.word("state.id").unwrap_or_else(|| "phi_g1".into());
    let g = r.opt_num("state.g");
    if let Some(g) = g {
        if g < 0.0 {
            r.fail("state.g", "must be non-negative");
        }
    }
    let special = |r: &mut Reader, s: SpecialState, g_fixed: f64| {
        if let Some(g) = g {
            if (g - g_fixed).abs() > 1e-12 {
                r.fail("state.g", format!("state {id} fixes g = {g_fixed}"));
            }
        }
        (StateChoice::Special(s), g_fixed)
    };
    match id.as_str() {
        "phi_g1" => special(r, SpecialState::PhiG1, 1.0),
        "chi_g3" => special(r, SpecialState::ChiG3, 3f64.sqrt()),
        "general" => {
            let parity = match r.word("state.parity").as_deref() {
                None | Some("even") => Parity::Even,
                Some("odd") => Parity::Odd,
                Some(other) => {
                    r.fail("state.parity", format!("expected even or odd, found `{other}`"));
                    Parity::Even
                }
            };
            let truncation = r.count("state.truncation", DEFAULT_TRUNCATION);
            let alpha_key = r.opt_num("state.alpha");
            let (alpha, g) = match (alpha_key, g) {
                (Some(_), Some(_)) => {
                    r.fail("state.alpha", "give either state.alpha or state.g, not both");
                    (f64::NAN, f64::NAN)
                }
                (Some(a), None) => {
                    if !(a >= 1.0) {
                        r.fail("state.alpha", "must be at least 1");
                    }
                    (a, (a * (a - 1.0) / 2.0).max(0.0).sqrt())
                }
                (None, Some(g)) => (alpha_of_g(g.max(0.0)).unwrap_or(f64::NAN), g),
                (None, None) => {
                    r.fail("state.g", "required for state.id = general (or give state.alpha)");
                    (f64::NAN, f64::NAN)
                }
            };
            (
                StateChoice::General {
                    alpha,
                    parity,
                    truncation,
                },
                g,
            )
        }
        other => {
            r.fail("state.id", format!("expected phi_g1, chi_g3 or general, found `{other}`"));
            (StateChoice::Special(SpecialState::PhiG1), 1.0)
        }
    }
}

fn read_phase(r: &mut Reader, raw: &RawConfig, g: f64, coefficient: &CoefficientConfig) -> PhaseChoice {
    if raw.has_section("inverted") {
        let (a, b, c, d) = (
            r.required("inverted.a"),
            r.required("inverted.b"),
            r.required("inverted.c"),
            r.required("inverted.d"),
        );
        let omega = match coefficient {
            CoefficientConfig::Constant { value, .. } if *value < 0.0 => (-value).sqrt(),
            _ => {
                r.fail("inverted", "needs coefficient.kind = constant with a negative value");
                1.0
            }
        };
        if raw.has_section("phase") {
            r.fail("phase", "cannot be combined with [inverted]");
        }
        return match InvertedParams::with_omega(a, b, c, d, omega) {
            Ok(p) => PhaseChoice::Inverted(p),
            Err(e) => {
                if a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite() {
                    r.fail("inverted", e.to_string());
                }
                PhaseChoice::Inverted(InvertedParams {
                    a: 1.0,
                    b: 0.0,
                    c: 0.0,
                    d: 1.0,
                    omega,
                })
            }
        };
    }
    let epsilon = match r.word("phase.epsilon").as_deref() {
        None | Some("auto") => {
            if !(g > 0.0) {
                r.fail("phase.epsilon", "auto needs g > 0; give an explicit value");
                0.0
            } else {
                0.5 * (g * SQRT_2).ln()
            }
        }
        Some(_) => r.opt_num("phase.epsilon").unwrap_or(0.0),
    };
    let u0 = match r.word("phase.u0").as_deref() {
        None | Some("epsilon") => None,
        Some(_) => r.opt_num("phase.u0"),
    };
    PhaseChoice::Explicit {
        u0,
        udot0: r.num("phase.udot0", 0.0),
        theta0: r.num("phase.theta0", 0.0),
        epsilon,
    }
}

fn read_run(raw: &RawConfig, r: &mut Reader) -> RunConfig {
    let coefficient = read_coefficient(r);
    let (state, g) = read_state(r);
    let phase = read_phase(r, raw, g, &coefficient);
    let horizon = r.num("time.horizon", TAU);
    if horizon < 0.0 {
        r.fail("time.horizon", "must be non-negative");
    }
    let step = r.positive("time.step", 0.01);
    let symmetric = r.flag("time.symmetric", false);
    let tolerance = r.num("recurrence.tolerance", 1e-6);
    if !(tolerance > 0.0 && tolerance < 1.0) {
        r.fail("recurrence.tolerance", "must lie in (0, 1)");
    }
    let oracle = if r.flag("oracle.enabled", false) {
        let points = r.count("oracle.points", 4096);
        if points < 16 {
            r.fail("oracle.points", "must be at least 16");
        }
        Some(OracleConfig {
            x_max: r.positive("oracle.x_max", 12.0),
            points,
            dt: r.positive("oracle.dt", 1e-3),
            step: r.positive("oracle.step", PI / 20.0),
        })
    } else {
        for key in ["x_max", "points", "dt", "step"] {
            r.raw.get(&format!("oracle.{key}"));
        }
        None
    };
    let classical_x0 = r.opt_num("classical.x0");
    if classical_x0 == Some(0.0) {
        r.fail("classical.x0", "must be non-zero");
    }
    let classical_g = r.opt_num("classical.g");
    if let Some(cg) = classical_g {
        if !(cg > 0.0) {
            r.fail("classical.g", "must be positive");
        }
    }
    if matches!(phase, PhaseChoice::Inverted(_)) {
        for key in ["classical.x0", "classical.v0", "classical.g"] {
            if raw.entries.contains_key(key) {
                r.fail(key, "determined by [inverted]; remove it");
            }
        }
    }
    let classical_v0 = r.num("classical.v0", 0.0);
    let name = r.word("output.name");
    if let Some(n) = &name {
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            r.fail("output.name", "use letters, digits, '_' or '-'");
        }
    }
    let cfg = RunConfig {
        coefficient,
        g,
        state,
        phase,
        horizon,
        step,
        symmetric,
        tolerance,
        oracle,
        classical_x0,
        classical_v0,
        classical_g,
        name,
    };
    if r.errors.is_empty() {
        if let Err(e) = cfg.coefficient.build() {
            r.fail("coefficient", e.to_string());
        }
        if let Err(e) = cfg.phase_data() {
            r.fail("phase", e.to_string());
        }
    }
    cfg
}

fn finish<T>(raw: &RawConfig, mut errors: Vec<FieldError>, value: T) -> Result<T, Vec<FieldError>> {
    errors.extend(raw.unused());
    if errors.is_empty() {
        Ok(value)
    } else {
        Err(errors)
    }
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, Vec<FieldError>> {
        let raw = RawConfig::parse(text)?;
        let mut r = Reader {
            raw: &raw,
            errors: Vec::new(),
        };
        let cfg = read_run(&raw, &mut r);
        for key in raw.section_keys("sweep") {
            raw.get(&format!("sweep.{key}"));
        }
        let errors = r.errors;
        finish(&raw, errors, cfg)
    }
}

fn parse_axis(name: &str, text: &str) -> Result<SweepAxis, String> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let bad = || format!("expected `start:end:count` or a single number, found `{text}`");
    match parts.as_slice() {
        [v] => {
            let v = parse_number(v).ok_or_else(bad)?;
            Ok(SweepAxis {
                name: name.to_string(),
                start: v,
                end: v,
                count: 1,
            })
        }
        [a, b, n] => {
            let start = parse_number(a).ok_or_else(bad)?;
            let end = parse_number(b).ok_or_else(bad)?;
            let count = n.parse::<usize>().map_err(|_| bad())?;
            if count == 0 {
                return Err("count must be at least 1".into());
            }
            if count > 1 && start == end {
                return Err("range is empty: start equals end".into());
            }
            Ok(SweepAxis {
                name: name.to_string(),
                start,
                end,
                count,
            })
        }
        _ => Err(bad()),
    }
}

impl SweepConfig {
    pub fn from_text(text: &str) -> Result<Self, Vec<FieldError>> {
        let raw = RawConfig::parse(text)?;
        let mut r = Reader {
            raw: &raw,
            errors: Vec::new(),
        };
        let base = read_run(&raw, &mut r);
        let allowed = base.coefficient.parameters();
        let mut axes = Vec::new();
        let mut workers = None;
        for key in raw.section_keys("sweep") {
            let path = format!("sweep.{key}");
            let text = raw.get(&path).unwrap_or_default().to_string();
            if key == "workers" {
                match text.parse::<usize>() {
                    Ok(n) if n >= 1 => workers = Some(n),
                    _ => r.fail(&path, format!("expected a positive integer, found `{text}`")),
                }
                continue;
            }
            if !allowed.contains(&key.as_str()) {
                r.fail(&path, format!("not a parameter of this coefficient (expected one of {})", allowed.join(", ")));
                continue;
            }
            match parse_axis(&key, &text) {
                Ok(axis) => axes.push(axis),
                Err(m) => r.fail(&path, m),
            }
        }
        if axes.is_empty() && r.errors.is_empty() {
            r.fail("sweep", "no swept parameters");
        }
        let errors = r.errors;
        finish(&raw, errors, SweepConfig { base, axes, workers })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("pi"), Some(PI));
        assert_eq!(parse_number("2pi"), Some(TAU));
        assert_eq!(parse_number("-0.5pi"), Some(-0.5 * PI));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("nan"), None);
        assert_eq!(parse_number("two"), None);
    }

    #[test]
    fn defaults_give_circle_run() {
        let cfg = RunConfig::from_text("").unwrap();
        assert_eq!(cfg.coefficient, CoefficientConfig::Constant { value: 1.0, period: TAU });
        assert_eq!(cfg.state, StateChoice::Special(SpecialState::PhiG1));
        assert_eq!(cfg.horizon, TAU);
        let data = cfg.phase_data().unwrap();
        assert_eq!(data.u0, data.epsilon);
        assert!((data.epsilon - 0.5 * SQRT_2.ln()).abs() < 1e-15);
    }

    #[test]
    fn all_errors_are_collected_with_paths() {
        let text = "[coefficient]\nkind = mathieu\nomega = -1\n[time]\nhorizon = x\nbogus = 1\n";
        let errs = RunConfig::from_text(text).unwrap_err();
        let paths: Vec<&str> = errs.iter().map(|e| e.path.as_str()).collect();
        assert!(paths.contains(&"coefficient.gamma"));
        assert!(paths.contains(&"coefficient.omega"));
        assert!(paths.contains(&"time.horizon"));
        assert!(paths.contains(&"time.bogus"));
    }

    #[test]
    fn malformed_lines_are_reported() {
        let errs = RawConfig::parse("[ok]\nnot a pair\n[bad\nk = 1\nk = 2\n").err().unwrap();
        assert_eq!(errs.len(), 3);
        assert!(errs[2].message.contains("duplicate"));
    }

    #[test]
    fn sweep_points_are_lexicographic() {
        let text = "[coefficient]\nkind = mathieu\ngamma = 1\n[sweep]\ngamma = 0:1:2\ndelta = 0:2:3\n";
        let sweep = SweepConfig::from_text(text).unwrap();
        let pts = sweep.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], vec![0.0, 0.0]);
        assert_eq!(pts[1], vec![0.0, 1.0]);
        assert_eq!(pts[3], vec![1.0, 0.0]);
        let cfg = sweep.config_at(&pts[5]);
        assert_eq!(cfg.coefficient, CoefficientConfig::Mathieu { gamma: 1.0, delta: 2.0, omega: 1.0 });
    }

    #[test]
    fn sweep_rejects_foreign_parameter() {
        let errs = SweepConfig::from_text("[sweep]\ngamma = 0:1:3\n").unwrap_err();
        assert_eq!(errs[0].path, "sweep.gamma");
    }

    #[test]
    fn inverted_section_sets_phase_data() {
        let text = "[coefficient]\nvalue = -1\n[inverted]\na = 1\nb = 0\nc = 0\nd = 1\n";
        let cfg = RunConfig::from_text(text).unwrap();
        let data = cfg.phase_data().unwrap();
        assert!((data.u0 - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((data.theta0 + PI / 4.0).abs() < 1e-15);
        let errs = RunConfig::from_text("[inverted]\na = 1\nb = 0\nc = 0\nd = 1\n").unwrap_err();
        assert_eq!(errs[0].path, "inverted");
    }
}
