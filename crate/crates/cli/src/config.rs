//! Scenario configuration files.
//!
//! ```text
//! # comment
//! [grid]
//! ndim = 1
//! n = 256            # one value, or one per axis
//! L = 60
//! mass = 1
//!
//! [packet]
//! center = 1, 0, 0
//! momentum = 0.8
//! width = 1.5
//! polarization = 1, 0, 0:0.3, 0   # re or re:im
//! project_positive = false
//!
//! [kick]                            # repeatable, times strictly increasing
//! time = 0
//! kappa = 0.5
//! potential = linear                # linear | gaussian | file
//! axis = 1                          # linear
//! slope = 1                         # linear
//! center = 0, 0, 0                  # gaussian
//! height = 1                        # gaussian
//! width = 1                         # gaussian
//! path = v.spnf                     # file: 1-component SPNF, real values
//!
//! [run]
//! t_start = 0
//! t_end = 10
//! samples = 101
//!
//! [invariants]
//! trace = p0D_1, x0D_1, gamma0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dirac_core::evolution::{Kick, KickSchedule, Potential};
use dirac_core::field::check_width;
use dirac_core::{GridSpec, ScalarField, WavepacketParams};
use num_complex::Complex64;

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    Linear { axis: usize, slope: f64 },
    Gaussian { center: [f64; 3], height: f64, width: f64 },
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct KickSpec {
    pub time: f64,
    pub kappa: f64,
    pub potential: PotentialSpec,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl RunSpec {
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| self.t_start + (self.t_end - self.t_start) * i as f64 / n as f64)
            .collect()
    }
}

/// A traced quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    P0D(usize),
    X0D(usize),
    X0DExplicit(usize),
    L(usize),
    S(usize),
    Q(usize),
    Gamma0,
    P0Kicked(usize),
    /// Plain momentum (not an invariant under kicks).
    P(usize),
    /// Plain position.
    X(usize),
    H,
}

impl Quantity {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        match s {
            "gamma0" => return Some(Quantity::Gamma0),
            "H" => return Some(Quantity::H),
            _ => {}
        }
        let (name, axis) = s.rsplit_once('_')?;
        let axis: usize = axis.parse().ok().filter(|a| (1..=3).contains(a))?;
        Some(match name {
            "p0D" => Quantity::P0D(axis),
            "x0D" => Quantity::X0D(axis),
            "x0D_explicit" => Quantity::X0DExplicit(axis),
            "L" => Quantity::L(axis),
            "S" => Quantity::S(axis),
            "Q" => Quantity::Q(axis),
            "p0_kicked" => Quantity::P0Kicked(axis),
            "p" => Quantity::P(axis),
            "x" => Quantity::X(axis),
            _ => return None,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Quantity::P0D(a) => format!("p0D_{a}"),
            Quantity::X0D(a) => format!("x0D_{a}"),
            Quantity::X0DExplicit(a) => format!("x0D_explicit_{a}"),
            Quantity::L(a) => format!("L_{a}"),
            Quantity::S(a) => format!("S_{a}"),
            Quantity::Q(a) => format!("Q_{a}"),
            Quantity::Gamma0 => "gamma0".into(),
            Quantity::P0Kicked(a) => format!("p0_kicked_{a}"),
            Quantity::P(a) => format!("p_{a}"),
            Quantity::X(a) => format!("x_{a}"),
            Quantity::H => "H".into(),
        }
    }

    pub fn axis(&self) -> Option<usize> {
        match *self {
            Quantity::P0D(a)
            | Quantity::X0D(a)
            | Quantity::X0DExplicit(a)
            | Quantity::L(a)
            | Quantity::S(a)
            | Quantity::Q(a)
            | Quantity::P0Kicked(a)
            | Quantity::P(a)
            | Quantity::X(a) => Some(a),
            Quantity::Gamma0 | Quantity::H => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub packet: WavepacketParams,
    pub project_positive: bool,
    pub kicks: Vec<KickSpec>,
    pub run: RunSpec,
    pub trace: Vec<Quantity>,
    /// Directory that relative paths are resolved against.
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(None, format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let sections = split_sections(text)?;
        let mut grid = None;
        let mut packet = None;
        let mut run = None;
        let mut kicks = Vec::new();
        let mut trace = Vec::new();
        for s in &sections {
            match s.name.as_str() {
                "grid" => grid = Some(once(grid, s, parse_grid(s)?)?),
                "packet" => packet = Some(once(packet, s, s.line)?),
                "run" => run = Some(once(run, s, parse_run(s)?)?),
                "kick" => kicks.push(parse_kick(s)?),
                "invariants" => trace = parse_trace(s)?,
                other => return Err(CliError::config(Some(s.line), format!("unknown section [{other}]"))),
            }
        }
        let grid = grid.ok_or_else(|| CliError::config(None, "missing [grid] section"))?;
        let run = run.ok_or_else(|| CliError::config(None, "missing [run] section"))?;
        let psec = sections
            .iter()
            .find(|s| s.name == "packet")
            .ok_or_else(|| CliError::config(None, "missing [packet] section"))?;
        let _ = packet;
        let (params, project_positive) = parse_packet(psec, &grid)?;
        let cfg = ScenarioConfig {
            grid,
            packet: params,
            project_positive,
            kicks,
            run,
            trace,
            base_dir: base_dir.to_path_buf(),
        };
        cfg.validate(&sections)?;
        Ok(cfg)
    }

    fn validate(&self, sections: &[Section]) -> Result<(), CliError> {
        let kick_lines: Vec<usize> = sections.iter().filter(|s| s.name == "kick").map(|s| s.line).collect();
        for (i, k) in self.kicks.iter().enumerate() {
            if i > 0 && k.time <= self.kicks[i - 1].time {
                return Err(CliError::config(Some(kick_lines[i]), "kick times must be strictly increasing"));
            }
            if k.time < self.run.t_start || k.time > self.run.t_end {
                return Err(CliError::config(Some(kick_lines[i]), "kick time outside [t_start, t_end]"));
            }
            if let PotentialSpec::Linear { axis, .. } = k.potential {
                if axis > self.grid.ndim() {
                    return Err(CliError::config(Some(kick_lines[i]), format!("axis {axis} > ndim")));
                }
            }
        }
        let line = sections.iter().find(|s| s.name == "invariants").map(|s| s.line);
        for q in &self.trace {
            if let Some(a) = q.axis() {
                if a > self.grid.ndim() {
                    return Err(CliError::config(line, format!("{}: axis beyond ndim", q.name())));
                }
            }
            match q {
                Quantity::L(_) | Quantity::S(_) if self.grid.ndim() != 3 => {
                    return Err(CliError::config(line, format!("{} needs ndim = 3", q.name())));
                }
                Quantity::Q(_) if self.grid.mass() <= 0.0 => {
                    return Err(CliError::config(line, format!("{} needs mass > 0", q.name())));
                }
                _ => {}
            }
        }
        if self.project_positive && self.grid.mass() <= 0.0 {
            return Err(CliError::config(None, "project_positive needs mass > 0"));
        }
        Ok(())
    }

    /// Builds the kick schedule, loading file potentials.
    pub fn schedule(&self) -> Result<KickSchedule, CliError> {
        let mut kicks = Vec::with_capacity(self.kicks.len());
        for k in &self.kicks {
            let potential = match &k.potential {
                PotentialSpec::Linear { axis, slope } => Potential::linear(self.grid, *axis, *slope),
                PotentialSpec::Gaussian { center, height, width } => {
                    Potential::gaussian_bump(self.grid, *center, *height, *width)
                }
                PotentialSpec::File(p) => {
                    let path = self.base_dir.join(p);
                    let f: ScalarField = dirac_core::spnf::load(&path)
                        .map_err(|e| CliError::config(None, format!("{}: {e}", path.display())))?;
                    if f.grid() != &self.grid {
                        return Err(CliError::config(None, format!("{}: grid differs", path.display())));
                    }
                    let pos = f.in_rep(dirac_core::Rep::Position);
                    Potential::from_complex(self.grid, pos.data())
                }
            }
            .map_err(|e| CliError::config(None, e.to_string()))?;
            kicks.push(Kick {
                time: k.time,
                kappa: k.kappa,
                potential,
            });
        }
        KickSchedule::new(kicks).map_err(|e| CliError::config(None, e.to_string()))
    }
}

struct Section {
    name: String,
    line: usize,
    entries: BTreeMap<String, (String, usize)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn require(&self, key: &str) -> Result<(&str, usize), CliError> {
        self.get(key)
            .ok_or_else(|| CliError::config(Some(self.line), format!("[{}] missing key '{key}'", self.name)))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        for (k, (_, line)) in &self.entries {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::config(Some(*line), format!("[{}] unknown key '{k}'", self.name)));
            }
        }
        Ok(())
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        let (v, line) = self.require(key)?;
        parse_f64(v, line, key)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            Some((v, line)) => parse_f64(v, line, key),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str) -> Result<Option<(Vec<f64>, usize)>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some((v, line)) => {
                let vals = v
                    .split(',')
                    .map(|x| parse_f64(x, line, key))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Some((vals, line)))
            }
        }
    }
}

fn once<T>(prev: Option<T>, s: &Section, v: T) -> Result<T, CliError> {
    if prev.is_some() {
        return Err(CliError::config(Some(s.line), format!("duplicate section [{}]", s.name)));
    }
    Ok(v)
}

fn parse_f64(v: &str, line: usize, key: &str) -> Result<f64, CliError> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::config(Some(line), format!("'{key}': '{}' is not a finite number", v.trim())))
}

fn parse_usize(v: &str, line: usize, key: &str) -> Result<usize, CliError> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| CliError::config(Some(line), format!("'{key}': '{}' is not a nonnegative integer", v.trim())))
}

fn split_sections(text: &str) -> Result<Vec<Section>, CliError> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| CliError::config(Some(line), "unterminated section header"))?;
            out.push(Section {
                name: name.trim().to_string(),
                line,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let (k, v) = content
            .split_once('=')
            .ok_or_else(|| CliError::config(Some(line), format!("expected 'key = value', got '{content}'")))?;
        let sec = out
            .last_mut()
            .ok_or_else(|| CliError::config(Some(line), "key outside of any section"))?;
        let key = k.trim().to_string();
        if sec.entries.contains_key(&key) {
            return Err(CliError::config(Some(line), format!("duplicate key '{key}'")));
        }
        sec.entries.insert(key, (v.trim().to_string(), line));
    }
    Ok(out)
}

fn parse_grid(s: &Section) -> Result<GridSpec, CliError> {
    s.check_keys(&["ndim", "n", "L", "mass"])?;
    let (v, line) = s.require("ndim")?;
    let ndim = parse_usize(v, line, "ndim")?;
    if !(1..=3).contains(&ndim) {
        return Err(CliError::config(Some(line), "ndim must be 1, 2 or 3"));
    }
    let per_axis = |key: &str| -> Result<(Vec<f64>, usize), CliError> {
        let (vals, line) = s.list(key)?.ok_or_else(|| CliError::config(Some(s.line), format!("[grid] missing key '{key}'")))?;
        match vals.len() {
            1 => Ok((vec![vals[0]; ndim], line)),
            k if k == ndim => Ok((vals, line)),
            k => Err(CliError::config(Some(line), format!("'{key}' has {k} values for ndim = {ndim}"))),
        }
    };
    let (n, nline) = per_axis("n")?;
    let mut ns = Vec::with_capacity(ndim);
    for v in n {
        if v.fract() != 0.0 || v < 0.0 {
            return Err(CliError::config(Some(nline), format!("'n': {v} is not an integer")));
        }
        ns.push(v as usize);
    }
    let (len, _) = per_axis("L")?;
    let (mv, mline) = s.require("mass")?;
    let mass = parse_f64(mv, mline, "mass")?;
    GridSpec::new(ndim, &ns, &len, mass).map_err(|e| CliError::config(Some(s.line), e.to_string()))
}

fn vec3(vals: Vec<f64>, line: usize, key: &str, ndim: usize) -> Result<[f64; 3], CliError> {
    if vals.len() > 3 {
        return Err(CliError::config(Some(line), format!("'{key}' has more than 3 values")));
    }
    let mut out = [0.0; 3];
    out[..vals.len()].copy_from_slice(&vals);
    if out[ndim..].iter().any(|v| *v != 0.0) {
        return Err(CliError::config(Some(line), format!("'{key}' is nonzero beyond ndim")));
    }
    Ok(out)
}

fn parse_complex(v: &str, line: usize) -> Result<Complex64, CliError> {
    let (re, im) = match v.split_once(':') {
        Some((a, b)) => (parse_f64(a, line, "polarization")?, parse_f64(b, line, "polarization")?),
        None => (parse_f64(v, line, "polarization")?, 0.0),
    };
    Ok(Complex64::new(re, im))
}

fn parse_bool(v: &str, line: usize, key: &str) -> Result<bool, CliError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(CliError::config(Some(line), format!("'{key}': '{other}' is not a boolean"))),
    }
}

fn parse_packet(s: &Section, grid: &GridSpec) -> Result<(WavepacketParams, bool), CliError> {
    s.check_keys(&["center", "momentum", "width", "polarization", "project_positive"])?;
    let nd = grid.ndim();
    let center = match s.list("center")? {
        Some((v, l)) => vec3(v, l, "center", nd)?,
        None => [0.0; 3],
    };
    let momentum = match s.list("momentum")? {
        Some((v, l)) => vec3(v, l, "momentum", nd)?,
        None => [0.0; 3],
    };
    let width = s.f64("width")?;
    check_width(grid, width).map_err(|e| CliError::config(s.get("width").map(|x| x.1), e.to_string()))?;
    let mut params = WavepacketParams::new(center, momentum, width);
    if let Some((v, line)) = s.get("polarization") {
        let parts: Vec<&str> = v.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::config(Some(line), "polarization needs 4 components"));
        }
        let mut pol = [Complex64::new(0.0, 0.0); 4];
        for (p, txt) in pol.iter_mut().zip(parts) {
            *p = parse_complex(txt, line)?;
        }
        if pol.iter().all(|c| c.norm() == 0.0) {
            return Err(CliError::config(Some(line), "polarization must be nonzero"));
        }
        params = params.with_polarization(pol);
    }
    let project = match s.get("project_positive") {
        Some((v, line)) => parse_bool(v, line, "project_positive")?,
        None => false,
    };
    Ok((params, project))
}

fn parse_run(s: &Section) -> Result<RunSpec, CliError> {
    s.check_keys(&["t_start", "t_end", "samples"])?;
    let t_start = s.f64_or("t_start", 0.0)?;
    let t_end = s.f64("t_end")?;
    let (v, line) = s.require("samples")?;
    let samples = parse_usize(v, line, "samples")?;
    if samples < 2 {
        return Err(CliError::config(Some(line), "samples must be at least 2"));
    }
    if t_end <= t_start {
        return Err(CliError::config(s.get("t_end").map(|x| x.1), "t_end must be after t_start"));
    }
    Ok(RunSpec { t_start, t_end, samples })
}

fn parse_kick(s: &Section) -> Result<KickSpec, CliError> {
    s.check_keys(&["time", "kappa", "potential", "axis", "slope", "center", "height", "width", "path"])?;
    let time = s.f64("time")?;
    let kappa = s.f64("kappa")?;
    let (kind, line) = s.require("potential")?;
    let potential = match kind {
        "linear" => {
            let axis = match s.get("axis") {
                Some((v, l)) => parse_usize(v, l, "axis")?,
                None => 1,
            };
            if !(1..=3).contains(&axis) {
                return Err(CliError::config(Some(line), "axis must be 1, 2 or 3"));
            }
            PotentialSpec::Linear {
                axis,
                slope: s.f64_or("slope", 1.0)?,
            }
        }
        "gaussian" => {
            let center = match s.list("center")? {
                Some((v, l)) => vec3(v, l, "center", 3)?,
                None => [0.0; 3],
            };
            let width = s.f64("width")?;
            if width <= 0.0 {
                return Err(CliError::config(s.get("width").map(|x| x.1), "width must be > 0"));
            }
            PotentialSpec::Gaussian {
                center,
                height: s.f64("height")?,
                width,
            }
        }
        "file" => PotentialSpec::File(PathBuf::from(s.require("path")?.0)),
        other => {
            return Err(CliError::config(
                Some(line),
                format!("potential '{other}' is not one of linear, gaussian, file"),
            ))
        }
    };
    Ok(KickSpec { time, kappa, potential })
}

fn parse_trace(s: &Section) -> Result<Vec<Quantity>, CliError> {
    s.check_keys(&["trace"])?;
    let (v, line) = s.require("trace")?;
    let mut out = Vec::new();
    for name in v.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let q = Quantity::parse(name)
            .ok_or_else(|| CliError::config(Some(line), format!("unknown invariant '{name}'")))?;
        if !out.contains(&q) {
            out.push(q);
        }
    }
    Ok(out)
}
