//! Strict config parsing. The file is a single JSON object; every problem in
//! it is reported in one pass (unknown keys, wrong types, out-of-cap grids),
//! so a CI user fixes the config once, not field by field.

use gribov_core::fock::Truncation;
use gribov_core::GribovParams64;
use serde_json::Value;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    TraceFormula,
    Semigroup,
    Trotter,
    Diagnostics,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::TraceFormula => "trace-formula",
            Command::Semigroup => "semigroup",
            Command::Trotter => "trotter",
            Command::Diagnostics => "diagnostics",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Command-specific grid block. Caps keep a config mistake from turning
/// into an hours-long dense run; they are documented in the README.
#[derive(Clone, Debug)]
pub enum Grids {
    Spectrum,
    TraceFormula {
        n_lo: usize,
        n_hi: usize,
        nodes: usize,
    },
    Semigroup {
        t_values: Vec<f64>,
        delta: f64,
    },
    Trotter {
        t: f64,
        n_values: Vec<usize>,
    },
    Diagnostics {
        epsilons: Vec<f64>,
        delta: f64,
        dims: Vec<usize>,
        t_values: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub params: GribovParams64,
    pub trunc: Truncation,
    pub grids: Grids,
    pub output_path: PathBuf,
    pub format: Format,
    pub seed: u64,
}

pub fn load(path: &std::path::Path) -> Result<RunConfig, Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![format!("config {}: {e}", path.display())])?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<RunConfig, Vec<String>> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| vec![format!("config: invalid JSON: {e}")])?;
    let Some(top) = root.as_object() else {
        return Err(vec!["config: top level must be a JSON object".into()]);
    };

    let mut errs = Vec::new();
    const TOP_KEYS: [&str; 7] = [
        "command",
        "params",
        "trunc",
        "grids",
        "output_path",
        "format",
        "seed",
    ];
    for k in top.keys() {
        if !TOP_KEYS.contains(&k.as_str()) {
            errs.push(format!("{k}: unknown key"));
        }
    }

    let command = match top.get("command") {
        Some(Value::String(s)) => match s.as_str() {
            "spectrum" => Some(Command::Spectrum),
            "trace-formula" => Some(Command::TraceFormula),
            "semigroup" => Some(Command::Semigroup),
            "trotter" => Some(Command::Trotter),
            "diagnostics" => Some(Command::Diagnostics),
            other => {
                errs.push(format!(
                    "command: expected one of spectrum | trace-formula | semigroup | \
                     trotter | diagnostics, got {other:?}"
                ));
                None
            }
        },
        Some(_) => {
            errs.push("command: must be a string".into());
            None
        }
        None => {
            errs.push("command: missing".into());
            None
        }
    };

    let params = parse_params(top.get("params"), &mut errs);
    let trunc = parse_trunc(top.get("trunc"), &mut errs);
    let grids = command.and_then(|c| parse_grids(c, top.get("grids"), &mut errs));

    let output_path = match top.get("output_path") {
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(Value::String(_)) => {
            errs.push("output_path: must not be empty".into());
            None
        }
        Some(_) => {
            errs.push("output_path: must be a string".into());
            None
        }
        None => {
            errs.push("output_path: missing".into());
            None
        }
    };

    let format = match top.get("format") {
        None => Some(Format::Csv),
        Some(Value::String(s)) => match s.as_str() {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            other => {
                errs.push(format!("format: expected csv | json, got {other:?}"));
                None
            }
        },
        Some(_) => {
            errs.push("format: must be a string".into());
            None
        }
    };

    let seed = match top.get("seed") {
        None => Some(0u64),
        Some(v) => match v.as_u64() {
            Some(s) => Some(s),
            None => {
                errs.push(format!("seed: must be a non-negative integer, got {v}"));
                None
            }
        },
    };

    // cross-field: the trace formula pairs eigenvalues against circles of
    // index up to n_hi, which needs headroom in the truncation
    if let (Some(Grids::TraceFormula { n_hi, .. }), Some(t)) = (&grids, &trunc) {
        if t.dim < 4 * (n_hi + 1) {
            errs.push(format!(
                "trunc.dim: trace-formula with n_hi = {n_hi} needs dim >= {}, got {}",
                4 * (n_hi + 1),
                t.dim
            ));
        }
        if t.offset != 0 {
            errs.push(format!(
                "trunc.offset: trace-formula needs the full window (offset 0), got {}",
                t.offset
            ));
        }
    }
    if let (Some(Grids::Diagnostics { .. }), Some(t)) = (&grids, &trunc) {
        if t.dim < 64 {
            errs.push(format!(
                "trunc.dim: diagnostics decay fits need dim >= 64, got {}",
                t.dim
            ));
        }
    }

    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(RunConfig {
        command: command.unwrap(),
        params: params.unwrap(),
        trunc: trunc.unwrap(),
        grids: grids.unwrap(),
        output_path: output_path.unwrap(),
        format: format.unwrap(),
        seed: seed.unwrap(),
    })
}

fn parse_params(v: Option<&Value>, errs: &mut Vec<String>) -> Option<GribovParams64> {
    let Some(v) = v else {
        errs.push("params: missing".into());
        return None;
    };
    let Some(obj) = v.as_object() else {
        errs.push("params: must be an object".into());
        return None;
    };
    const KEYS: [&str; 4] = ["lambda_cubic", "lambda_quartic", "mu", "lambda_triple"];
    for k in obj.keys() {
        if !KEYS.contains(&k.as_str()) {
            errs.push(format!("params.{k}: unknown key"));
        }
    }
    let before = errs.len();
    let mut get = |key: &str| -> f64 {
        match obj.get(key) {
            Some(x) => match x.as_f64() {
                Some(f) if f.is_finite() => f,
                _ => {
                    errs.push(format!("params.{key}: must be a finite number, got {x}"));
                    0.0
                }
            },
            None => {
                errs.push(format!("params.{key}: missing"));
                0.0
            }
        }
    };
    let lc = get("lambda_cubic");
    let lq = get("lambda_quartic");
    let mu = get("mu");
    let lt = get("lambda_triple");
    (errs.len() == before).then(|| GribovParams64::new(lc, lq, mu, lt))
}

fn parse_trunc(v: Option<&Value>, errs: &mut Vec<String>) -> Option<Truncation> {
    let Some(v) = v else {
        errs.push("trunc: missing".into());
        return None;
    };
    let Some(obj) = v.as_object() else {
        errs.push("trunc: must be an object".into());
        return None;
    };
    for k in obj.keys() {
        if k != "dim" && k != "offset" {
            errs.push(format!("trunc.{k}: unknown key"));
        }
    }
    let dim = get_usize(obj.get("dim"), "trunc.dim", errs)?;
    let offset = match obj.get("offset") {
        None => 0,
        some => get_usize(some, "trunc.offset", errs)?,
    };
    if !(4..=1024).contains(&dim) {
        errs.push(format!("trunc.dim: must be in 4..=1024, got {dim}"));
        return None;
    }
    if offset > 8 {
        errs.push(format!("trunc.offset: must be at most 8, got {offset}"));
        return None;
    }
    match Truncation::new(dim, offset) {
        Ok(t) => Some(t),
        Err(e) => {
            errs.push(format!("trunc: {e}"));
            None
        }
    }
}

fn parse_grids(command: Command, v: Option<&Value>, errs: &mut Vec<String>) -> Option<Grids> {
    let Some(v) = v else {
        errs.push("grids: missing".into());
        return None;
    };
    let Some(obj) = v.as_object() else {
        errs.push("grids: must be an object".into());
        return None;
    };
    let allowed: &[&str] = match command {
        Command::Spectrum => &[],
        Command::TraceFormula => &["n_lo", "n_hi", "nodes"],
        Command::Semigroup => &["t_values", "delta"],
        Command::Trotter => &["t", "n_values"],
        Command::Diagnostics => &["epsilons", "delta", "dims", "t_values"],
    };
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            errs.push(format!(
                "grids.{k}: unknown key for command {}",
                command.name()
            ));
        }
    }
    let before = errs.len();
    let grids = match command {
        Command::Spectrum => Some(Grids::Spectrum),
        Command::TraceFormula => {
            let n_lo = get_usize(obj.get("n_lo"), "grids.n_lo", errs);
            let n_hi = get_usize(obj.get("n_hi"), "grids.n_hi", errs);
            let nodes = get_usize(obj.get("nodes"), "grids.nodes", errs);
            if let (Some(n_lo), Some(n_hi), Some(nodes)) = (n_lo, n_hi, nodes) {
                if n_lo < 2 {
                    errs.push(format!("grids.n_lo: must be at least 2, got {n_lo}"));
                }
                if n_hi < n_lo || n_hi > 32 {
                    errs.push(format!("grids.n_hi: must be in {n_lo}..=32, got {n_hi}"));
                }
                if nodes < 64 || nodes > 8192 || nodes % 2 != 0 {
                    errs.push(format!(
                        "grids.nodes: must be even and in 64..=8192, got {nodes}"
                    ));
                }
                Some(Grids::TraceFormula { n_lo, n_hi, nodes })
            } else {
                None
            }
        }
        Command::Semigroup => {
            let t_values = get_f64_list(obj.get("t_values"), "grids.t_values", errs);
            let delta = get_f64(obj.get("delta"), "grids.delta", errs);
            if let (Some(t_values), Some(delta)) = (t_values, delta) {
                if t_values.is_empty() || t_values.len() > 256 {
                    errs.push(format!(
                        "grids.t_values: need 1..=256 entries, got {}",
                        t_values.len()
                    ));
                }
                if t_values.first().copied().unwrap_or(1.0) <= 0.0 {
                    errs.push("grids.t_values: entries must be positive".into());
                }
                if t_values.windows(2).any(|w| w[1] <= w[0]) {
                    errs.push("grids.t_values: must be strictly ascending".into());
                }
                if !(0.5..=4.0).contains(&delta) {
                    errs.push(format!("grids.delta: must be in 0.5..=4, got {delta}"));
                }
                Some(Grids::Semigroup { t_values, delta })
            } else {
                None
            }
        }
        Command::Trotter => {
            let t = get_f64(obj.get("t"), "grids.t", errs);
            let n_values = get_usize_list(obj.get("n_values"), "grids.n_values", errs);
            if let (Some(t), Some(n_values)) = (t, n_values) {
                if !(t > 0.0 && t <= 100.0) {
                    errs.push(format!("grids.t: must be in (0, 100], got {t}"));
                }
                if n_values.is_empty() || n_values.len() > 64 {
                    errs.push(format!(
                        "grids.n_values: need 1..=64 entries, got {}",
                        n_values.len()
                    ));
                }
                if n_values.first().copied().unwrap_or(2) < 2
                    || n_values.last().copied().unwrap_or(2) > 4096
                {
                    errs.push("grids.n_values: entries must be in 2..=4096".into());
                }
                if n_values.windows(2).any(|w| w[1] <= w[0]) {
                    errs.push("grids.n_values: must be strictly ascending".into());
                }
                Some(Grids::Trotter { t, n_values })
            } else {
                None
            }
        }
        Command::Diagnostics => {
            let epsilons = get_f64_list(obj.get("epsilons"), "grids.epsilons", errs);
            let delta = get_f64(obj.get("delta"), "grids.delta", errs);
            let dims = get_usize_list(obj.get("dims"), "grids.dims", errs);
            let t_values = get_f64_list(obj.get("t_values"), "grids.t_values", errs);
            if let (Some(epsilons), Some(delta), Some(dims), Some(t_values)) =
                (epsilons, delta, dims, t_values)
            {
                if epsilons.is_empty() || epsilons.len() > 8 {
                    errs.push(format!(
                        "grids.epsilons: need 1..=8 entries, got {}",
                        epsilons.len()
                    ));
                }
                if epsilons.iter().any(|&e| !(e > 0.0 && e <= 100.0)) {
                    errs.push("grids.epsilons: entries must be in (0, 100]".into());
                }
                if !(delta > 0.0 && delta <= 4.0) {
                    errs.push(format!("grids.delta: must be in (0, 4], got {delta}"));
                }
                if dims.len() < 2 || dims.len() > 8 {
                    errs.push(format!(
                        "grids.dims: need 2..=8 entries, got {}",
                        dims.len()
                    ));
                }
                if dims.first().copied().unwrap_or(8) < 8 || dims.last().copied().unwrap_or(8) > 512
                {
                    errs.push("grids.dims: entries must be in 8..=512".into());
                }
                if dims.windows(2).any(|w| w[1] <= w[0]) {
                    errs.push("grids.dims: must be strictly ascending".into());
                }
                if t_values.len() < 2 || t_values.len() > 64 {
                    errs.push(format!(
                        "grids.t_values: need 2..=64 entries (slope fit), got {}",
                        t_values.len()
                    ));
                }
                if t_values.last().copied().unwrap_or(1.0) <= 0.0 {
                    errs.push("grids.t_values: entries must be positive".into());
                }
                if t_values.windows(2).any(|w| w[1] >= w[0]) {
                    errs.push("grids.t_values: must be strictly descending toward 0".into());
                }
                Some(Grids::Diagnostics {
                    epsilons,
                    delta,
                    dims,
                    t_values,
                })
            } else {
                None
            }
        }
    };
    (errs.len() == before).then_some(grids).flatten()
}

fn get_f64(v: Option<&Value>, path: &str, errs: &mut Vec<String>) -> Option<f64> {
    match v {
        Some(x) => match x.as_f64() {
            Some(f) if f.is_finite() => Some(f),
            _ => {
                errs.push(format!("{path}: must be a finite number, got {x}"));
                None
            }
        },
        None => {
            errs.push(format!("{path}: missing"));
            None
        }
    }
}

fn get_usize(v: Option<&Value>, path: &str, errs: &mut Vec<String>) -> Option<usize> {
    match v {
        Some(x) => match x.as_u64() {
            Some(n) => Some(n as usize),
            None => {
                errs.push(format!("{path}: must be a non-negative integer, got {x}"));
                None
            }
        },
        None => {
            errs.push(format!("{path}: missing"));
            None
        }
    }
}

fn get_f64_list(v: Option<&Value>, path: &str, errs: &mut Vec<String>) -> Option<Vec<f64>> {
    let Some(x) = v else {
        errs.push(format!("{path}: missing"));
        return None;
    };
    let Some(arr) = x.as_array() else {
        errs.push(format!("{path}: must be an array of numbers"));
        return None;
    };
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        match e.as_f64() {
            Some(f) if f.is_finite() => out.push(f),
            _ => {
                errs.push(format!("{path}[{i}]: must be a finite number, got {e}"));
                return None;
            }
        }
    }
    Some(out)
}

fn get_usize_list(v: Option<&Value>, path: &str, errs: &mut Vec<String>) -> Option<Vec<usize>> {
    let Some(x) = v else {
        errs.push(format!("{path}: missing"));
        return None;
    };
    let Some(arr) = x.as_array() else {
        errs.push(format!("{path}: must be an array of integers"));
        return None;
    };
    let mut out = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        match e.as_u64() {
            Some(n) => out.push(n as usize),
            None => {
                errs.push(format!(
                    "{path}[{i}]: must be a non-negative integer, got {e}"
                ));
                return None;
            }
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(command: &str, grids: &str) -> String {
        format!(
            r#"{{
  "command": "{command}",
  "params": {{"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05}},
  "trunc": {{"dim": 64, "offset": 0}},
  "grids": {grids},
  "output_path": "out.csv",
  "format": "csv",
  "seed": 7
}}"#
        )
    }

    #[test]
    fn parses_each_command() {
        assert!(parse(&base("spectrum", "{}")).is_ok());
        assert!(parse(&base(
            "trace-formula",
            r#"{"n_lo": 2, "n_hi": 5, "nodes": 128}"#
        ))
        .is_ok());
        assert!(parse(&base(
            "semigroup",
            r#"{"t_values": [0.01, 0.1], "delta": 0.5}"#
        ))
        .is_ok());
        assert!(parse(&base("trotter", r#"{"t": 1.0, "n_values": [2, 4, 8]}"#)).is_ok());
        assert!(parse(&base(
            "diagnostics",
            r#"{"epsilons": [0.1], "delta": 0.5, "dims": [16, 32], "t_values": [1e-2, 1e-4]}"#
        ))
        .is_ok());
    }

    #[test]
    fn collects_every_offense() {
        let text = r#"{
  "command": "trace-formula",
  "params": {"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05, "rho": 3},
  "trunc": {"dim": 64},
  "grids": {"n_lo": 1, "n_hi": 40, "nodes": 65},
  "output_path": "out.csv",
  "mystery": true
}"#;
        let errs = parse(text).unwrap_err();
        let text = errs.join("\n");
        for needle in [
            "params.rho",
            "grids.n_lo",
            "grids.n_hi",
            "grids.nodes",
            "mystery",
        ] {
            assert!(text.contains(needle), "missing {needle} in:\n{text}");
        }
    }

    #[test]
    fn defaults_format_and_seed() {
        let text = r#"{
  "command": "spectrum",
  "params": {"lambda_cubic": 1.0, "lambda_quartic": 1.0, "mu": 0.1, "lambda_triple": 0.05},
  "trunc": {"dim": 16},
  "grids": {},
  "output_path": "out.csv"
}"#;
        let cfg = parse(text).unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.trunc.offset, 0);
    }

    #[test]
    fn rejects_headroom_violation() {
        let text = base("trace-formula", r#"{"n_lo": 2, "n_hi": 20, "nodes": 128}"#);
        let errs = parse(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("trunc.dim")), "{errs:?}");
    }

    #[test]
    fn rejects_negative_delta_by_name() {
        let text = base("semigroup", r#"{"t_values": [0.1], "delta": -1.0}"#);
        let errs = parse(&text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("grids.delta")), "{errs:?}");
    }
}
