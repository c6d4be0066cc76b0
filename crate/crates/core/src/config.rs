//! Plain-text run configuration.
//!
//! One `key = value` per line; `#` starts a comment. Complex numbers are
//! `re+imj` tokens (`1.5`, `-0.7+0.2j`, `3j`, `-j`), vectors are `[z, z]` and
//! matrices are bracketed row lists `[[z, z], [z, z]]`. A bare number is
//! accepted where a 1x1 matrix is expected. See the README for every key.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gbdt::{GbdtParameters, ReductionCase, SMode};
use crate::grid::{Field, GridSpec};
use crate::matrix::{ComplexMatrix, C64};
use crate::presets::Preset;
use crate::seed::{BlockStructure, SeedKind, SeedSolution};
use crate::verify::Check;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: GbdtParameters,
    pub seed: SeedSolution,
    pub grid: GridSpec,
    pub lambdas: Vec<C64>,
    pub out: Option<PathBuf>,
    pub checks: Vec<Check>,
    pub fields: Vec<Field>,
    pub mode: SMode,
    /// Time slice used by `darboux` and `reflect`.
    pub t: f64,
    /// x at which `darboux` tabulates w_A.
    pub x: f64,
}

impl RunConfig {
    pub fn case(&self) -> ReductionCase {
        self.params.case
    }

    pub fn from_preset(p: &Preset) -> Self {
        Self {
            params: p.params.clone(),
            seed: p.seed.clone(),
            grid: p.grid,
            lambdas: default_lambdas(),
            out: None,
            checks: Check::ALL.to_vec(),
            fields: p.fields.clone(),
            mode: SMode::SylvesterPointwise,
            t: 0.5,
            x: 0.0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        text.parse()
    }

    /// Serializes back to the config grammar. Parsing the output gives an
    /// equal configuration.
    pub fn to_config_string(&self) -> String {
        let p = &self.params;
        let s = p.structure;
        let mut o = String::new();
        let _ = writeln!(o, "case = {}", p.case);
        let _ = writeln!(o, "p = {}", s.p);
        if !p.case.is_scalar() {
            let _ = writeln!(o, "m1 = {}\nm2 = {}", s.m1, s.m2);
        }
        if matches!(p.case, ReductionCase::GeneralMcde | ReductionCase::ScalarCoupled) {
            let _ = writeln!(o, "a1 = {}", fmt_matrix(&p.a1));
            let _ = writeln!(o, "a2 = {}", fmt_matrix(&p.a2));
            let _ = writeln!(o, "pi1 = {}", fmt_matrix(&p.pi1_0));
            let _ = writeln!(o, "pi2 = {}", fmt_matrix(&p.pi2_0));
        } else {
            let _ = writeln!(o, "a = {}", fmt_matrix(&p.a1));
            let _ = writeln!(o, "pi = {}", fmt_matrix(&p.pi1_0));
        }
        let _ = writeln!(o, "s0 = {}", fmt_matrix(&p.s0));
        let _ = writeln!(o, "seed_r = {}", fmt_vector(&self.seed.diag()));
        let g = &self.grid;
        let _ = writeln!(
            o,
            "x_min = {:?}\nx_max = {:?}\nt_min = {:?}\nt_max = {:?}\nnx = {}\nnt = {}",
            g.x_min, g.x_max, g.t_min, g.t_max, g.nx, g.nt
        );
        let _ = writeln!(o, "lambdas = {}", fmt_vector(&self.lambdas));
        if let Some(out) = &self.out {
            let _ = writeln!(o, "out = {}", out.display());
        }
        let checks: Vec<_> = self.checks.iter().map(|c| c.name()).collect();
        let _ = writeln!(o, "checks = {}", checks.join(", "));
        let fields: Vec<_> = self.fields.iter().map(|f| f.name()).collect();
        let _ = writeln!(o, "fields = {}", fields.join(", "));
        match self.mode {
            SMode::SylvesterPointwise => o.push_str("mode = sylvester\n"),
            SMode::OdePropagated { max_step } => {
                let _ = writeln!(o, "mode = ode\node_max_step = {max_step:?}");
            }
        }
        let _ = writeln!(o, "t = {:?}\nx = {:?}", self.t, self.x);
        o
    }
}

pub fn default_lambdas() -> Vec<C64> {
    [(2.1, 0.37), (-1.3, 0.55), (0.45, -0.8), (3.3, 0.1), (-2.7, -0.35)]
        .iter()
        .map(|&(re, im)| C64::new(re, im))
        .collect()
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn get<T>(&mut self, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => f(&v).map(Some).map_err(|m| Error::config(Some(line), key, m)),
        }
    }

    fn require<T>(&mut self, key: &str, f: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        self.get(key, f)?
            .ok_or_else(|| Error::config(None, key, "missing required key"))
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|e| e.line)
    }
}

const KEYS: &[&str] = &[
    "case", "p", "m1", "m2", "a", "a1", "a2", "pi", "pi1", "pi2", "s0", "seed_r", "seed_rho", "x_min", "x_max", "t_min",
    "t_max", "nx", "nt", "lambdas", "out", "checks", "fields", "mode", "ode_max_step", "t", "x",
];

impl std::str::FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::config(Some(line), body, "expected `key = value`"))?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::config(Some(line), key, "unknown key"));
            }
            if let Some(prev) = map.get(&key).map(|e: &Entry| e.line) {
                return Err(Error::config(Some(line), key, format!("duplicate key (first set on line {prev})")));
            }
            map.insert(
                key,
                Entry {
                    line,
                    value: value.trim().to_string(),
                    used: false,
                },
            );
        }
        let mut e = Entries(map);
        let cfg = build(&mut e)?;
        if let Some((k, v)) = e.0.iter().find(|(_, v)| !v.used) {
            return Err(Error::config(Some(v.line), k.clone(), format!("not used by case `{}`", cfg.params.case)));
        }
        Ok(cfg)
    }
}

fn build(e: &mut Entries) -> Result<RunConfig> {
    let case = e.require("case", |s| {
        ReductionCase::parse(s).ok_or_else(|| {
            "expected general, local, nonlocal, ccde, scalar-coupled or scalar-nonlocal".to_string()
        })
    })?;
    let p = e.get("p", parse_p)?.unwrap_or(1);
    let scalar = case.is_scalar();
    let (m1, m2) = if scalar {
        (1, 1)
    } else {
        (e.require("m1", parse_usize)?, e.require("m2", parse_usize)?)
    };
    let structure = BlockStructure::new(m1, m2, p).map_err(|err| Error::config(e.line("m1"), "m1", err.to_string()))?;
    let s0 = e.get("s0", parse_matrix)?;
    let param_err = |key: &str, e: &Entries, err: Error| match err {
        Error::InvalidParameters(_) => err,
        other => Error::config(e.line(key), key, other.to_string()),
    };
    let params = match case {
        ReductionCase::GeneralMcde | ReductionCase::ScalarCoupled => {
            let a1 = e.require("a1", parse_matrix)?;
            let a2 = e.require("a2", parse_matrix)?;
            let pi1 = e.require("pi1", parse_matrix)?;
            let pi2 = e.require("pi2", parse_matrix)?;
            let r = if case == ReductionCase::GeneralMcde {
                GbdtParameters::general(structure, a1, a2, pi1, pi2, s0)
            } else {
                if p != 1 && e.has("p") {
                    return Err(Error::config(e.line("p"), "p", "scalar-coupled requires p = 1"));
                }
                GbdtParameters::scalar_coupled(a1, a2, pi1, pi2, s0)
            };
            r.map_err(|err| param_err("a1", e, err))?
        }
        _ => {
            let a = e.require("a", parse_matrix)?;
            let pi = e.require("pi", parse_matrix)?;
            let r = match case {
                ReductionCase::LocalMatrix => GbdtParameters::local(structure, a, pi, s0),
                ReductionCase::Nonlocal => GbdtParameters::nonlocal(structure, a, pi, s0),
                ReductionCase::Ccde => GbdtParameters::ccde(2 * p as i8 - 1, a, pi, s0),
                _ => GbdtParameters::scalar_nonlocal(p, a, pi, s0),
            };
            r.map_err(|err| param_err("a", e, err))?
        }
    };
    let kind = match (e.get("seed_r", parse_vector)?, e.get("seed_rho", parse_complex)?) {
        (Some(_), Some(_)) => return Err(Error::config(e.line("seed_rho"), "seed_rho", "give seed_r or seed_rho, not both")),
        (Some(d), None) => SeedKind::ConstDiag(d),
        (None, Some(r)) => SeedKind::Scalar(r),
        (None, None) => return Err(Error::config(None, "seed_r", "missing seed: set seed_r or seed_rho")),
    };
    let seed = SeedSolution::new(structure, kind).map_err(|err| Error::config(e.line("seed_r"), "seed_r", err.to_string()))?;

    let d = GridSpec::default();
    let grid = GridSpec {
        x_min: e.get("x_min", parse_f64)?.unwrap_or(d.x_min),
        x_max: e.get("x_max", parse_f64)?.unwrap_or(d.x_max),
        t_min: e.get("t_min", parse_f64)?.unwrap_or(d.t_min),
        t_max: e.get("t_max", parse_f64)?.unwrap_or(d.t_max),
        nx: e.get("nx", parse_usize)?.unwrap_or(d.nx),
        nt: e.get("nt", parse_usize)?.unwrap_or(d.nt),
    };
    grid.validate()?;

    let lambdas = e.get("lambdas", parse_vector)?.unwrap_or_else(default_lambdas);
    let out = e.get("out", |s| Ok(PathBuf::from(s)))?;
    let checks = e.get("checks", |s| parse_list(s, Check::parse, "check"))?.unwrap_or_else(|| Check::ALL.to_vec());
    let fields = e
        .get("fields", |s| parse_list(s, Field::parse, "field"))?
        .unwrap_or_else(|| vec![Field::AbsV, Field::LnAbsRho]);
    let mode = match e.get("mode", |s| Ok(s.to_string()))?.as_deref() {
        None | Some("sylvester") => {
            if e.has("ode_max_step") {
                return Err(Error::config(e.line("ode_max_step"), "ode_max_step", "only meaningful with mode = ode"));
            }
            SMode::SylvesterPointwise
        }
        Some("ode") => match e.get("ode_max_step", parse_f64)? {
            Some(h) if h > 0.0 => SMode::OdePropagated { max_step: h },
            Some(_) => return Err(Error::config(e.line("ode_max_step"), "ode_max_step", "must be positive")),
            None => SMode::ode(),
        },
        Some(other) => return Err(Error::config(e.line("mode"), "mode", format!("expected sylvester or ode, got `{other}`"))),
    };
    let t = e.get("t", parse_f64)?.unwrap_or(0.5);
    let x = e.get("x", parse_f64)?.unwrap_or(0.0);
    Ok(RunConfig {
        params,
        seed,
        grid,
        lambdas,
        out,
        checks,
        fields,
        mode,
        t,
        x,
    })
}

fn parse_list<T>(s: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| f(w).ok_or_else(|| format!("unknown {what} `{w}`")))
        .collect()
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a real number, got `{s}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite value `{s}`"));
    }
    Ok(v)
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.trim().parse().map_err(|_| format!("expected a nonnegative integer, got `{s}`"))
}

fn parse_p(s: &str) -> std::result::Result<u8, String> {
    match s.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(format!("p must be 0 or 1, got `{other}`")),
    }
}

/// Parses `re`, `imj`, `re+imj` or `re-imj` (an `i` suffix is accepted too).
pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("expected a complex number like 1.5-0.2j, got `{s}`");
    if t.is_empty() {
        return Err(bad());
    }
    let z = match t.strip_suffix(['j', 'i']) {
        None => C64::new(t.parse().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let b = body.as_bytes();
            let split = (1..b.len())
                .rev()
                .find(|&k| (b[k] == b'+' || b[k] == b'-') && !matches!(b[k - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                v => v.parse().map_err(|_| bad())?,
            };
            C64::new(re.parse().map_err(|_| bad())?, im)
        }
    };
    if !z.is_finite() {
        return Err(format!("non-finite value `{s}`"));
    }
    Ok(z)
}

fn split_top(inner: &str) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in inner.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(inner[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err("unbalanced `]`".into());
        }
    }
    if depth != 0 {
        return Err("unbalanced `[`".into());
    }
    let last = inner[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    Ok(out)
}

fn bracketed(s: &str) -> Option<&str> {
    s.trim().strip_prefix('[')?.strip_suffix(']')
}

pub fn parse_vector(s: &str) -> std::result::Result<Vec<C64>, String> {
    let inner = bracketed(s).ok_or_else(|| format!("expected a list `[z, ...]`, got `{s}`"))?;
    split_top(inner)?.into_iter().map(parse_complex).collect()
}

pub fn parse_matrix(s: &str) -> std::result::Result<ComplexMatrix, String> {
    let Some(inner) = bracketed(s) else {
        return Ok(ComplexMatrix::scalar(1, parse_complex(s)?));
    };
    let rows: Vec<Vec<C64>> = split_top(inner)?.into_iter().map(parse_vector).collect::<std::result::Result<_, _>>()?;
    if rows.is_empty() {
        return Err("empty matrix".into());
    }
    ComplexMatrix::from_rows(&rows).map_err(|e| e.to_string())
}

/// Shortest token that parses back to the same value.
pub fn fmt_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.re == 0.0 {
        format!("{:?}j", z.im)
    } else {
        let sign = if z.im.is_sign_negative() { "" } else { "+" };
        format!("{:?}{sign}{:?}j", z.re, z.im)
    }
}

pub fn fmt_vector(v: &[C64]) -> String {
    let parts: Vec<_> = v.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn fmt_matrix(m: &ComplexMatrix) -> String {
    let rows: Vec<_> = (0..m.rows())
        .map(|i| fmt_vector(&(0..m.cols()).map(|j| m[(i, j)]).collect::<Vec<_>>()))
        .collect();
    format!("[{}]", rows.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;
    use crate::presets::{preset, PRESET_IDS};

    #[test]
    fn complex_tokens() {
        for (s, z) in [
            ("1.5", c(1.5, 0.0)),
            ("-0.7+0.2j", c(-0.7, 0.2)),
            ("3j", c(0.0, 3.0)),
            ("-j", c(0.0, -1.0)),
            ("1e-3-2e-2j", c(1e-3, -2e-2)),
            ("2.5E+1+1i", c(25.0, 1.0)),
            (" 1 - 2 j ", c(1.0, -2.0)),
        ] {
            assert_eq!(parse_complex(s).unwrap(), z, "{s}");
        }
        for s in ["", "j2", "1+", "nan", "1+2k"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn matrices() {
        let m = parse_matrix("[[1, 2j], [3-1j, -4]]").unwrap();
        assert_eq!(m[(0, 1)], c(0.0, 2.0));
        assert_eq!(m[(1, 0)], c(3.0, -1.0));
        assert_eq!(parse_matrix("0.5+1j").unwrap()[(0, 0)], c(0.5, 1.0));
        assert!(parse_matrix("[[1, 2], [3]]").is_err());
        assert!(parse_matrix("[[1, 2]").is_err());
    }

    #[test]
    fn line_numbers_in_errors() {
        let text = "case = ccde\n\na = [[0.7-0.4j]]\npi = [[1, oops]]\n";
        match text.parse::<RunConfig>() {
            Err(Error::Config { line, field, .. }) => {
                assert_eq!(line, Some(4));
                assert_eq!(field, "pi");
            }
            other => panic!("{other:?}"),
        }
        let err = "case = ccde\nbogus = 1\n".parse::<RunConfig>().unwrap_err();
        assert!(matches!(err, Error::Config { line: Some(2), .. }));
    }

    #[test]
    fn grid_invariants() {
        let base = "case = ccde\na = 0.7-0.4j\npi = [[1, 0.3]]\nseed_r = [1.3, 1.3]\n";
        assert!(format!("{base}nx = 1\n").parse::<RunConfig>().is_err());
        assert!(format!("{base}x_min = 2\nx_max = 1\n").parse::<RunConfig>().is_err());
        assert!(base.parse::<RunConfig>().is_ok());
    }

    #[test]
    fn unused_key_rejected() {
        let text = "case = ccde\na = 0.7-0.4j\npi = [[1, 0.3]]\nseed_r = [1.3, 1.3]\na1 = 1\n";
        assert!(matches!(text.parse::<RunConfig>(), Err(Error::Config { line: Some(5), .. })));
    }

    #[test]
    fn presets_round_trip() {
        for id in PRESET_IDS {
            let cfg = RunConfig::from_preset(&preset(id).unwrap());
            let text = cfg.to_config_string();
            let back: RunConfig = text.parse().unwrap_or_else(|e| panic!("{id}: {e}\n{text}"));
            assert_eq!(back.to_config_string(), text, "{id}");
        }
    }
}
