//! Scenario files: parsing, validation, canonical echo, the end-to-end
//! pipeline and report emission.
//!
//! The format is line oriented. `[section]` headers introduce groups of
//! `key = value` lines; `#` starts a comment line. Vectors are
//! comma-separated reals, lists of vectors or numbers are separated by `;`.
//!
//! ```text
//! [spacetime]
//! name = schwarzschild
//! mass = 1
//!
//! [decay]
//! event = 0, 10, 1.5707963267948966, 0
//!
//! [detector1]
//! target = 20, 12, 1.5707963267948966, 0.6
//!
//! [detector2]
//! tangent = 1.2, -0.1, 0, -0.02
//! proper_time = 15
//!
//! [measurements]
//! a = 0, 0, 1; 1, 0, 0
//! ```

mod pipeline;
mod report;

pub use pipeline::{
    run_scenario, transported_singlet, CorrelationEntry, DecoherenceRow, Diagnostics,
    GeodesicSummary, Report, RotationSummary,
};
pub use report::{emit_report, Format};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::Vector3;

use crate::decoherence::{Mode, DEFAULT_PAIR_BUDGET};
use crate::error::{Error, Result};
use crate::frame::{Gauge, DEFAULT_GAUGE_RAPIDITY};
use crate::geodesic::{BvpConfig, IntegratorConfig};
use crate::spacetime::{make_spacetime, spacetime_parameters, Event, Spacetime, Tangent, Vec4};

const SECTIONS: [&str; 7] = [
    "spacetime",
    "decay",
    "detector1",
    "detector2",
    "measurements",
    "decoherence",
    "output",
];

/// How a particle's world line is specified.
#[derive(Clone, Debug, PartialEq)]
pub enum Detection {
    /// Solve for the geodesic from the decay event to `event`.
    Target {
        event: Event,
        /// Initial coordinate velocity for the shooting iteration.
        guess: Option<Vec4>,
        tau_hint: Option<f64>,
    },
    /// Integrate from the decay event with the given initial tangent.
    Initial { tangent: Vec4, proper_time: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Chsh {
    None,
    /// a = z, a′ = x, b = (x+z)/√2, b′ = (x−z)/√2.
    #[default]
    Canonical,
    /// a, a′ from the first two `a` entries, b, b′ from the first two `b`.
    Listed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measurements {
    /// Axes at detector 1, in its rest triad.
    pub a: Vec<Vector3<f64>>,
    /// Axes at detector 2; ignored when `matched`.
    pub b: Vec<Vector3<f64>>,
    /// Derive each b from the corresponding a through the frame
    /// correspondence.
    pub matched: bool,
    pub chsh: Chsh,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceSpec {
    pub sigma: Vec<f64>,
    pub n_paths: usize,
    pub mode: Mode,
    pub seed: u64,
    pub pair_budget: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub spacetime_name: String,
    pub spacetime_params: BTreeMap<String, f64>,
    pub spacetime: Spacetime,
    pub gauge: Gauge,
    pub integrator: IntegratorConfig,
    pub bvp: BvpConfig,
    pub decay: Event,
    pub detectors: [Detection; 2],
    pub measurements: Measurements,
    pub decoherence: Option<DecoherenceSpec>,
    pub format: Format,
    pub output_path: Option<String>,
}

struct Entry {
    value: String,
    line: usize,
}

struct Section {
    name: &'static str,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry> {
        self.take(key).ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("missing required key '{key}' in [{}]", self.name),
        })
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().min_by_key(|(_, e)| e.line) {
            Some((k, e)) => Err(Error::Parse {
                line: e.line,
                message: format!("unknown key '{k}' in [{}]", self.name),
            }),
            None => Ok(()),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn invalid(line: usize, message: impl Into<String>) -> Error {
    Error::Validation {
        line,
        message: message.into(),
    }
}

fn real(text: &str, line: usize) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("'{}' is not a number", text.trim())))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("'{}' is not finite", text.trim())));
    }
    Ok(v)
}

fn positive(e: &Entry) -> Result<f64> {
    let v = real(&e.value, e.line)?;
    if !(v > 0.0) {
        return Err(parse_err(
            e.line,
            format!("expected a positive number, got {v}"),
        ));
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(e: &Entry) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| parse_err(e.line, format!("'{}' is not a valid integer", e.value)))
}

fn reals(text: &str, line: usize, n: usize) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|t| real(t, line))
        .collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(parse_err(
            line,
            format!("expected {n} comma-separated numbers, got {}", v.len()),
        ));
    }
    Ok(v)
}

fn vec4(e: &Entry) -> Result<Vec4> {
    Ok(Vec4::from_vec(reals(&e.value, e.line, 4)?))
}

fn axes(e: &Entry) -> Result<Vec<Vector3<f64>>> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(';')
        .map(|item| {
            let v = Vector3::from_vec(reals(item, e.line, 3)?);
            if !(v.norm() > 0.0) || !v.norm().is_finite() {
                return Err(parse_err(
                    e.line,
                    "measurement axis must be a nonzero vector",
                ));
            }
            Ok(v)
        })
        .collect()
}

fn boolean(e: &Entry) -> Result<bool> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_err(
            e.line,
            format!("expected true or false, got '{other}'"),
        )),
    }
}

fn tokenize(text: &str) -> Result<(BTreeMap<&'static str, Section>, usize)> {
    let mut sections: BTreeMap<&'static str, Section> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        if let Some(rest) = t.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line, "unterminated section header"))?
                .trim();
            let known = SECTIONS
                .iter()
                .find(|s| **s == name)
                .ok_or_else(|| parse_err(line, format!("unknown section [{name}]")))?;
            if sections.contains_key(known) {
                return Err(parse_err(line, format!("duplicate section [{name}]")));
            }
            sections.insert(
                known,
                Section {
                    name: known,
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(known);
            continue;
        }
        let (key, value) = t
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected 'key = value'"))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_err(line, "empty key"));
        }
        let section = current.ok_or_else(|| parse_err(line, "key outside of any section"))?;
        let entries = &mut sections.get_mut(section).expect("section exists").entries;
        if entries.contains_key(key) {
            return Err(parse_err(line, format!("duplicate key '{key}'")));
        }
        entries.insert(
            key.to_string(),
            Entry {
                value: value.trim().to_string(),
                line,
            },
        );
    }
    Ok((sections, last_line.max(1)))
}

fn domain_message(st: &Spacetime, e: &Event) -> String {
    use crate::spacetime::Geometry;
    let c = &e.coords;
    match st.geometry() {
        Geometry::Schwarzschild { mass, horizon_eps }
            if !(c[1] > 2.0 * mass * (1.0 + horizon_eps)) || !(c[1] > 0.0) =>
        {
            "event inside horizon guard".to_string()
        }
        Geometry::Schwarzschild { .. } => "event on the polar axis of the chart".to_string(),
        _ => "event outside the chart domain".to_string(),
    }
}

fn check_event(st: &Spacetime, e: &Event, line: usize) -> Result<()> {
    if st.validate_event(e) {
        Ok(())
    } else {
        Err(invalid(line, domain_message(st, e)))
    }
}

/// Parses and validates a scenario. Defaults are filled in; the result
/// echoes back through [`Scenario::to_text`].
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let (mut sections, eof) = tokenize(text)?;
    let mut section = |name: &'static str| {
        sections.remove(name).ok_or_else(|| Error::Parse {
            line: eof,
            message: format!("missing section [{name}]"),
        })
    };

    // [spacetime]
    let mut sec = section("spacetime")?;
    let name_entry = sec.require("name")?;
    let name = name_entry.value.clone();
    let allowed = spacetime_parameters(&name)
        .ok_or_else(|| parse_err(name_entry.line, format!("unknown spacetime '{name}'")))?;
    let mut params = BTreeMap::new();
    for key in allowed {
        if let Some(e) = sec.take(key) {
            params.insert(key.to_string(), real(&e.value, e.line)?);
        }
    }
    if params.contains_key("mass") && params.contains_key("M") {
        return Err(parse_err(name_entry.line, "both 'mass' and 'M' given"));
    }
    let spacetime = make_spacetime(&name, &params).map_err(|e| match e {
        Error::Configuration(m) => invalid(name_entry.line, m),
        other => other,
    })?;
    let mut gauge = match sec.take("gauge") {
        Some(e) => e
            .value
            .parse::<Gauge>()
            .map_err(|_| parse_err(e.line, format!("unknown gauge '{}'", e.value)))?,
        None => Gauge::Static,
    };
    if let Some(e) = sec.take("gauge_rapidity") {
        let r = real(&e.value, e.line)?;
        match gauge {
            Gauge::BoostedStatic { .. } => gauge = Gauge::BoostedStatic { rapidity: r },
            Gauge::Static => {
                return Err(parse_err(
                    e.line,
                    "gauge_rapidity requires gauge = boosted_static",
                ))
            }
        }
    }
    let mut integrator = IntegratorConfig::default();
    if let Some(e) = sec.take("tol") {
        integrator.tol = positive(&e)?;
    }
    if let Some(e) = sec.take("max_step_fraction") {
        let v = positive(&e)?;
        if v > 1.0 {
            return Err(parse_err(e.line, "max_step_fraction must not exceed 1"));
        }
        integrator.max_step_fraction = v;
    }
    let mut bvp = BvpConfig::default();
    bvp.integrator.max_step_fraction = integrator.max_step_fraction;
    if let Some(e) = sec.take("bvp_tol") {
        bvp.bvp_tol = positive(&e)?;
    }
    if let Some(e) = sec.take("bvp_max_iter") {
        bvp.max_iter = integer(&e)?;
    }
    if let Some(e) = sec.take("bvp_integrator_tol") {
        bvp.integrator.tol = positive(&e)?;
    }
    sec.finish()?;

    // [decay]
    let mut sec = section("decay")?;
    let e = sec.require("event")?;
    let decay = Event::from_coords(vec4(&e)?);
    check_event(&spacetime, &decay, e.line)?;
    sec.finish()?;

    // [detector1], [detector2]
    let mut detectors = Vec::with_capacity(2);
    for name in ["detector1", "detector2"] {
        let mut sec = section(name)?;
        let target = sec.take("target");
        let tangent = sec.take("tangent");
        let det = match (target, tangent) {
            (Some(t), None) => {
                let event = Event::from_coords(vec4(&t)?);
                check_event(&spacetime, &event, t.line)?;
                let guess = match sec.take("guess") {
                    Some(g) => {
                        let v = vec4(&g)?;
                        check_timelike(&spacetime, &decay, &v, g.line)?;
                        Some(v)
                    }
                    None => None,
                };
                let tau_hint = sec.take("tau_hint").map(|h| positive(&h)).transpose()?;
                Detection::Target {
                    event,
                    guess,
                    tau_hint,
                }
            }
            (None, Some(t)) => {
                let v = vec4(&t)?;
                check_timelike(&spacetime, &decay, &v, t.line)?;
                let proper_time = positive(&sec.require("proper_time")?)?;
                Detection::Initial {
                    tangent: v,
                    proper_time,
                }
            }
            (Some(_), Some(t)) => {
                return Err(parse_err(
                    t.line,
                    format!("[{name}] must give either 'target' or 'tangent', not both"),
                ))
            }
            (None, None) => {
                return Err(parse_err(
                    sec.line,
                    format!("[{name}] needs 'target' or 'tangent'"),
                ))
            }
        };
        sec.finish()?;
        detectors.push(det);
    }
    let detectors: [Detection; 2] = detectors.try_into().expect("two detectors");

    // [measurements]
    let mut measurements = Measurements {
        a: Vec::new(),
        b: Vec::new(),
        matched: true,
        chsh: Chsh::Canonical,
    };
    if let Some(mut sec) = sections.remove("measurements") {
        if let Some(e) = sec.take("a") {
            measurements.a = axes(&e)?;
        }
        let b = sec.take("b");
        if let Some(e) = sec.take("matched") {
            measurements.matched = boolean(&e)?;
        }
        if let Some(e) = b {
            if measurements.matched {
                return Err(parse_err(e.line, "'b' cannot be given when matched = true"));
            }
            measurements.b = axes(&e)?;
        }
        if let Some(e) = sec.take("chsh") {
            measurements.chsh = match e.value.as_str() {
                "none" => Chsh::None,
                "canonical" => Chsh::Canonical,
                "listed" => {
                    let nb = if measurements.matched {
                        measurements.a.len()
                    } else {
                        measurements.b.len()
                    };
                    if measurements.a.len() < 2 || nb < 2 {
                        return Err(invalid(e.line, "chsh = listed needs two a and two b axes"));
                    }
                    Chsh::Listed
                }
                other => return Err(parse_err(e.line, format!("unknown chsh mode '{other}'"))),
            };
        }
        sec.finish()?;
    }

    // [decoherence]
    let decoherence = match sections.remove("decoherence") {
        Some(mut sec) => {
            let e = sec.require("sigma")?;
            let sigma = e
                .value
                .split(';')
                .map(|t| real(t, e.line))
                .collect::<Result<Vec<_>>>()?;
            if sigma.iter().any(|s| *s < 0.0) {
                return Err(parse_err(e.line, "sigma values must be non-negative"));
            }
            let n_paths = match sec.take("n_paths") {
                Some(e) => {
                    let n: usize = integer(&e)?;
                    if n == 0 {
                        return Err(parse_err(e.line, "n_paths must be at least 1"));
                    }
                    n
                }
                None => 200,
            };
            let mode = match sec.take("mode") {
                Some(e) => e
                    .value
                    .parse()
                    .map_err(|_| parse_err(e.line, format!("unknown mode '{}'", e.value)))?,
                None => Mode::Incoherent,
            };
            let seed = match sec.take("seed") {
                Some(e) => integer(&e)?,
                None => 0,
            };
            let pair_budget = match sec.take("pair_budget") {
                Some(e) => {
                    let n: usize = integer(&e)?;
                    if n == 0 {
                        return Err(parse_err(e.line, "pair_budget must be at least 1"));
                    }
                    n
                }
                None => DEFAULT_PAIR_BUDGET,
            };
            sec.finish()?;
            Some(DecoherenceSpec {
                sigma,
                n_paths,
                mode,
                seed,
                pair_budget,
            })
        }
        None => None,
    };

    // [output]
    let mut id = "scenario".to_string();
    let mut format = Format::Table;
    let mut output_path = None;
    if let Some(mut sec) = sections.remove("output") {
        if let Some(e) = sec.take("id") {
            if e.value.is_empty() {
                return Err(parse_err(e.line, "id must not be empty"));
            }
            id = e.value;
        }
        if let Some(e) = sec.take("format") {
            format = e
                .value
                .parse()
                .map_err(|m: Error| parse_err(e.line, m.to_string()))?;
        }
        if let Some(e) = sec.take("path") {
            if e.value.is_empty() {
                return Err(parse_err(e.line, "path must not be empty"));
            }
            output_path = Some(e.value);
        }
        sec.finish()?;
    }

    Ok(Scenario {
        id,
        spacetime_name: name,
        spacetime_params: params,
        spacetime,
        gauge,
        integrator,
        bvp,
        decay,
        detectors,
        measurements,
        decoherence,
        format,
        output_path,
    })
}

fn check_timelike(st: &Spacetime, at: &Event, v: &Vec4, line: usize) -> Result<()> {
    let u = Tangent::new(*at, *v);
    let n = st.inner(&u, &u)?;
    if !(n < 0.0) || v[0] <= 0.0 {
        return Err(invalid(
            line,
            "velocity must be timelike and future-directed",
        ));
    }
    Ok(())
}

fn join<I: IntoIterator<Item = f64>>(v: I, sep: &str) -> String {
    v.into_iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(sep)
}

fn join_axes(v: &[Vector3<f64>]) -> String {
    v.iter()
        .map(|a| join(a.iter().copied(), ", "))
        .collect::<Vec<_>>()
        .join("; ")
}

impl Scenario {
    /// Canonical text of the scenario with every default spelled out.
    /// Parsing it yields an equal scenario.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[spacetime]\nname = {}", self.spacetime_name);
        for (k, v) in &self.spacetime_params {
            let _ = writeln!(s, "{k} = {v:?}");
        }
        let _ = writeln!(s, "gauge = {}", self.gauge);
        if let Gauge::BoostedStatic { rapidity } = self.gauge {
            if rapidity != DEFAULT_GAUGE_RAPIDITY {
                let _ = writeln!(s, "gauge_rapidity = {rapidity:?}");
            }
        }
        let _ = writeln!(s, "tol = {:?}", self.integrator.tol);
        let _ = writeln!(
            s,
            "max_step_fraction = {:?}",
            self.integrator.max_step_fraction
        );
        let _ = writeln!(s, "bvp_tol = {:?}", self.bvp.bvp_tol);
        let _ = writeln!(s, "bvp_max_iter = {}", self.bvp.max_iter);
        let _ = writeln!(s, "bvp_integrator_tol = {:?}", self.bvp.integrator.tol);

        let _ = writeln!(
            s,
            "\n[decay]\nevent = {}",
            join(self.decay.coords.iter().copied(), ", ")
        );
        for (i, d) in self.detectors.iter().enumerate() {
            let _ = writeln!(s, "\n[detector{}]", i + 1);
            match d {
                Detection::Target {
                    event,
                    guess,
                    tau_hint,
                } => {
                    let _ = writeln!(s, "target = {}", join(event.coords.iter().copied(), ", "));
                    if let Some(g) = guess {
                        let _ = writeln!(s, "guess = {}", join(g.iter().copied(), ", "));
                    }
                    if let Some(h) = tau_hint {
                        let _ = writeln!(s, "tau_hint = {h:?}");
                    }
                }
                Detection::Initial {
                    tangent,
                    proper_time,
                } => {
                    let _ = writeln!(s, "tangent = {}", join(tangent.iter().copied(), ", "));
                    let _ = writeln!(s, "proper_time = {proper_time:?}");
                }
            }
        }

        let m = &self.measurements;
        let _ = writeln!(s, "\n[measurements]\na = {}", join_axes(&m.a));
        if !m.matched {
            let _ = writeln!(s, "b = {}", join_axes(&m.b));
        }
        let _ = writeln!(s, "matched = {}", m.matched);
        let chsh = match m.chsh {
            Chsh::None => "none",
            Chsh::Canonical => "canonical",
            Chsh::Listed => "listed",
        };
        let _ = writeln!(s, "chsh = {chsh}");

        if let Some(d) = &self.decoherence {
            let _ = writeln!(
                s,
                "\n[decoherence]\nsigma = {}",
                join(d.sigma.iter().copied(), "; ")
            );
            let _ = writeln!(s, "n_paths = {}", d.n_paths);
            let _ = writeln!(s, "mode = {}", d.mode);
            let _ = writeln!(s, "seed = {}", d.seed);
            let _ = writeln!(s, "pair_budget = {}", d.pair_budget);
        }

        let _ = writeln!(s, "\n[output]\nid = {}\nformat = {}", self.id, self.format);
        if let Some(p) = &self.output_path {
            let _ = writeln!(s, "path = {p}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[spacetime]
name = minkowski

[decay]
event = 0, 0, 0, 0

[detector1]
tangent = 1, 0.3, 0, 0
proper_time = 5

[detector2]
tangent = 1, -0.3, 0, 0
proper_time = 5

[measurements]
a = 0, 0, 1
";

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.gauge, Gauge::Static);
        assert_eq!(s.integrator, IntegratorConfig::default());
        assert!(s.measurements.matched);
        assert_eq!(s.measurements.chsh, Chsh::Canonical);
        assert_eq!(s.measurements.a.len(), 1);
        assert!(s.decoherence.is_none());
        assert_eq!(s.format, Format::Table);
        assert_eq!(s.id, "scenario");
    }

    #[test]
    fn echo_round_trips() {
        let s = parse_scenario(MINIMAL).unwrap();
        let again = parse_scenario(&s.to_text()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.to_text(), again.to_text());
    }

    #[test]
    fn unknown_spacetime() {
        let text = MINIMAL.replace("minkowski", "kerr");
        match parse_scenario(&text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown spacetime"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn event_inside_horizon_guard() {
        let text = MINIMAL
            .replace("name = minkowski", "name = schwarzschild\nmass = 1")
            .replace("event = 0, 0, 0, 0", "event = 0, 1, 1.5, 0");
        match parse_scenario(&text) {
            Err(Error::Validation { line, message }) => {
                assert_eq!(line, 6);
                assert_eq!(message, "event inside horizon guard");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            (
                MINIMAL.replace(
                    "proper_time = 5\n\n[detector2]",
                    "proper_time = 5\nspeed = 2\n\n[detector2]",
                ),
                10,
            ),
            (MINIMAL.replace("event = 0, 0, 0, 0", "event = 0, 0, 0"), 5),
            (
                MINIMAL.replace(
                    "proper_time = 5\n\n[detector2]",
                    "proper_time = 5\nproper_time = 6\n\n[detector2]",
                ),
                10,
            ),
            (format!("{MINIMAL}[nonsense]\n"), 17),
            (MINIMAL.replace("a = 0, 0, 1", "a = 0, 0, 0"), 16),
            (
                MINIMAL.replace("tangent = 1, 0.3, 0, 0", "tangent = 1, 3, 0, 0"),
                8,
            ),
        ];
        for (text, want) in cases {
            match parse_scenario(&text) {
                Err(Error::Parse { line, .. }) | Err(Error::Validation { line, .. }) => {
                    assert_eq!(line, want, "{text}")
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn missing_and_conflicting_detection_modes() {
        let both = MINIMAL.replace(
            "proper_time = 5\n\n[detector2]",
            "proper_time = 5\ntarget = 1, 0, 0, 0\n\n[detector2]",
        );
        assert!(matches!(parse_scenario(&both), Err(Error::Parse { .. })));
        let none = MINIMAL.replace("tangent = 1, -0.3, 0, 0\nproper_time = 5\n", "");
        assert!(matches!(
            parse_scenario(&none),
            Err(Error::Parse { line: 11, .. })
        ));
        let no_section = MINIMAL.replace("[decay]\nevent = 0, 0, 0, 0\n", "");
        assert!(matches!(
            parse_scenario(&no_section),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn full_scenario_round_trips() {
        let text = "\
[spacetime]
name = schwarzschild
M = 1
horizon_eps = 0.01
gauge = boosted_static
gauge_rapidity = 0.5
tol = 1e-11
[decay]
event = 0, 10, 1.5707963267948966, 0
[detector1]
target = 20, 12, 1.5, 0.6
guess = 1.2, 0.1, 0, 0.01
tau_hint = 15
[detector2]
tangent = 1.2, -0.1, 0, -0.02
proper_time = 15
[measurements]
a = 0, 0, 1; 1, 2, 3
b = 1, 0, 0; 0, 1, 0
matched = false
chsh = listed
[decoherence]
sigma = 0; 0.1; 0.2
n_paths = 50
mode = coherent
seed = 42
[output]
id = full test, with comma
format = csv
path = out/report.csv
";
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.gauge, Gauge::BoostedStatic { rapidity: 0.5 });
        assert_eq!(s.measurements.chsh, Chsh::Listed);
        let again = parse_scenario(&s.to_text()).unwrap();
        assert_eq!(s, again);
    }
}
