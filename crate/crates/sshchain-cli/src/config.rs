//! Config-file loading and validation.
//!
//! Configs are JSON or TOML files. A run manifest written by an earlier
//! invocation is also accepted: its `config` block is unwrapped and its
//! `settings` become the new baseline, so feeding a manifest back in
//! reproduces the run. Every key is checked against a per-command allowlist;
//! unknown or missing keys abort with a message naming the key instead of
//! running a misconfigured job.

use std::path::Path;

use serde_json::{Map, Value};
use sshchain::model::INV_GOLDEN_RATIO;
use sshchain::sweep::{Axis, ComputeFlags, Selection, SweepSpec, W2Rule};
use sshchain::ModelParams;

const MODEL_KEYS: [&str; 7] = ["t1", "t2", "w1", "w2", "gamma", "beta", "n_cells"];

pub struct LoadedConfig {
    pub config: Value,
    /// Settings block recovered when the file was a run manifest.
    pub manifest_settings: Option<Value>,
}

pub fn load(path: &Path) -> Result<LoadedConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let value = parse_structured(&text)
        .map_err(|e| format!("config {} did not parse: {e}", path.display()))?;
    if let Some(obj) = value.as_object() {
        if obj.contains_key("tool") && obj.contains_key("config") {
            return Ok(LoadedConfig {
                config: obj["config"].clone(),
                manifest_settings: obj.get("settings").cloned(),
            });
        }
    }
    Ok(LoadedConfig {
        config: value,
        manifest_settings: None,
    })
}

fn parse_structured(text: &str) -> Result<Value, String> {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => Ok(v),
        Err(json_err) => match toml::from_str::<toml::Value>(text) {
            Ok(t) => Ok(toml_to_json(t)),
            Err(toml_err) => Err(format!("as JSON: {json_err}; as TOML: {toml_err}")),
        },
    }
}

fn toml_to_json(v: toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s),
        toml::Value::Integer(i) => Value::from(i),
        toml::Value::Float(f) => Value::from(f),
        toml::Value::Boolean(b) => Value::Bool(b),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
        toml::Value::Array(a) => Value::Array(a.into_iter().map(toml_to_json).collect()),
        toml::Value::Table(t) => {
            Value::Object(t.into_iter().map(|(k, v)| (k, toml_to_json(v))).collect())
        }
    }
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, String> {
    v.as_object()
        .ok_or_else(|| format!("{what} must be an object/table"))
}

fn req<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, String> {
    obj.get(key)
        .ok_or_else(|| format!("missing required key \"{key}\""))
}

fn f64_of(v: &Value, key: &str) -> Result<f64, String> {
    v.as_f64()
        .ok_or_else(|| format!("key \"{key}\" must be a number"))
}

fn usize_of(v: &Value, key: &str) -> Result<usize, String> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| format!("key \"{key}\" must be a non-negative integer"))
}

fn req_f64(obj: &Map<String, Value>, key: &str) -> Result<f64, String> {
    f64_of(req(obj, key)?, key)
}

fn opt_f64(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>, String> {
    obj.get(key).map(|v| f64_of(v, key)).transpose()
}

fn opt_bool(obj: &Map<String, Value>, key: &str) -> Result<Option<bool>, String> {
    obj.get(key)
        .map(|v| {
            v.as_bool()
                .ok_or_else(|| format!("key \"{key}\" must be a boolean"))
        })
        .transpose()
}

fn check_unknown(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<(), String> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(format!(
                "unknown key \"{k}\" in {what} (accepted: {})",
                allowed.join(", ")
            ));
        }
    }
    Ok(())
}

pub enum CellsPolicy {
    Required,
    /// The command derives chain sizes elsewhere; `n_cells` is rejected so a
    /// leftover value is never silently ignored.
    Forbidden,
}

fn model_params(obj: &Map<String, Value>, cells: CellsPolicy) -> Result<ModelParams, String> {
    let n_cells = match cells {
        CellsPolicy::Required => usize_of(req(obj, "n_cells")?, "n_cells")?,
        CellsPolicy::Forbidden => {
            if obj.contains_key("n_cells") {
                return Err(
                    "key \"n_cells\" is not allowed here: chain sizes come from \"sizes\"".into(),
                );
            }
            2
        }
    };
    let p = ModelParams {
        t1: req_f64(obj, "t1")?,
        t2: req_f64(obj, "t2")?,
        w1: req_f64(obj, "w1")?,
        w2: req_f64(obj, "w2")?,
        gamma: req_f64(obj, "gamma")?,
        beta: opt_f64(obj, "beta")?.unwrap_or(INV_GOLDEN_RATIO),
        n_cells,
    };
    p.validated().map_err(|e| e.to_string())
}

/// `spectrum` config: model keys at the top level plus an optional
/// `dump_matrix` switch for the triplet CSV.
pub fn spectrum_config(v: &Value) -> Result<(ModelParams, bool), String> {
    let o = as_object(v, "spectrum config")?;
    let p = model_params(o, CellsPolicy::Required)?;
    let dump = opt_bool(o, "dump_matrix")?.unwrap_or(false);
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.push("dump_matrix");
    check_unknown(o, &allowed, "spectrum config")?;
    Ok((p, dump))
}

/// `winding` config: model keys only.
pub fn winding_config(v: &Value) -> Result<ModelParams, String> {
    let o = as_object(v, "winding config")?;
    let p = model_params(o, CellsPolicy::Required)?;
    check_unknown(o, &MODEL_KEYS, "winding config")?;
    Ok(p)
}

/// `snapshot` config: model keys plus an optional `selection`.
pub fn snapshot_config(v: &Value) -> Result<(ModelParams, Selection), String> {
    let o = as_object(v, "snapshot config")?;
    let p = model_params(o, CellsPolicy::Required)?;
    let selection = match o.get("selection") {
        None => Selection::BulkOnly,
        Some(Value::String(s)) => match s.as_str() {
            "all_states" => Selection::All,
            "bulk_only" => Selection::BulkOnly,
            other => {
                return Err(format!(
                    "unknown selection \"{other}\" (accepted: \"all_states\", \"bulk_only\", {{\"lowest_abs_energy\": n}})"
                ))
            }
        },
        Some(Value::Object(m)) => {
            if m.len() == 1 && m.contains_key("lowest_abs_energy") {
                Selection::LowestAbs(usize_of(&m["lowest_abs_energy"], "lowest_abs_energy")?)
            } else {
                return Err(
                    "selection object must hold exactly {\"lowest_abs_energy\": n}".into(),
                );
            }
        }
        Some(_) => return Err("key \"selection\" must be a string or a one-key object".into()),
    };
    let mut allowed = MODEL_KEYS.to_vec();
    allowed.push("selection");
    check_unknown(o, &allowed, "snapshot config")?;
    Ok((p, selection))
}

/// `fss` config: a `model` block (without `n_cells`) plus the `sizes` list.
pub fn fss_config(v: &Value) -> Result<(ModelParams, Vec<usize>), String> {
    let o = as_object(v, "fss config")?;
    let p = model_params(
        as_object(req(o, "model")?, "key \"model\"")?,
        CellsPolicy::Forbidden,
    )?;
    let sizes = req(o, "sizes")?
        .as_array()
        .ok_or("key \"sizes\" must be an array of even site counts")?
        .iter()
        .map(|v| usize_of(v, "sizes"))
        .collect::<Result<Vec<_>, _>>()?;
    check_unknown(o, &["model", "sizes"], "fss config")?;
    Ok((p, sizes))
}

/// `sweep` config: grid plus a `model` block for the base parameters.
pub fn sweep_config(v: &Value) -> Result<SweepSpec, String> {
    let o = as_object(v, "sweep config")?;
    let axis = match req(o, "axis")? {
        Value::String(s) if s == "w1" => Axis::W1,
        Value::String(s) if s == "gamma" => Axis::Gamma,
        Value::String(s) => {
            return Err(format!("unknown axis \"{s}\" (accepted: \"w1\", \"gamma\")"))
        }
        _ => return Err("key \"axis\" must be a string".into()),
    };
    let base = model_params(
        as_object(req(o, "model")?, "key \"model\"")?,
        CellsPolicy::Required,
    )?;
    let spec = SweepSpec {
        axis,
        start: req_f64(o, "start")?,
        stop: req_f64(o, "stop")?,
        num_points: usize_of(req(o, "num_points")?, "num_points")?,
        base,
        w2_rule: o.get("w2_rule").map(parse_w2_rule).transpose()?,
        compute: o
            .get("compute")
            .map(parse_compute)
            .transpose()?
            .unwrap_or_default(),
    };
    check_unknown(
        o,
        &["axis", "start", "stop", "num_points", "model", "w2_rule", "compute"],
        "sweep config",
    )?;
    Ok(spec)
}

fn parse_w2_rule(v: &Value) -> Result<W2Rule, String> {
    const FORMS: &str =
        "\"equal\", {\"constant\": c}, or {\"cosine\": {\"a\": .., \"b\": .., \"c\": ..}}";
    match v {
        Value::String(s) if s == "equal" => Ok(W2Rule::Equal),
        Value::String(s) => Err(format!("unknown w2_rule \"{s}\" (accepted: {FORMS})")),
        Value::Object(m) => {
            if m.len() != 1 {
                return Err(format!(
                    "w2_rule must name exactly one rule (accepted: {FORMS})"
                ));
            }
            let (k, inner) = m.iter().next().expect("one entry");
            match k.as_str() {
                "equal" => Err("w2_rule \"equal\" takes no fields".into()),
                "constant" => Ok(W2Rule::Constant(f64_of(inner, "constant")?)),
                "cosine" => {
                    let o = as_object(inner, "w2_rule cosine")?;
                    let rule = W2Rule::Cosine {
                        a: req_f64(o, "a")?,
                        b: req_f64(o, "b")?,
                        c: req_f64(o, "c")?,
                    };
                    check_unknown(o, &["a", "b", "c"], "w2_rule cosine")?;
                    Ok(rule)
                }
                other => Err(format!("unknown w2_rule \"{other}\" (accepted: {FORMS})")),
            }
        }
        _ => Err(format!("w2_rule must be {FORMS}")),
    }
}

fn parse_compute(v: &Value) -> Result<ComputeFlags, String> {
    let o = as_object(v, "compute")?;
    let mut c = ComputeFlags::default();
    if let Some(b) = opt_bool(o, "winding")? {
        c.winding = b;
    }
    if let Some(b) = opt_bool(o, "localization")? {
        c.localization = b;
    }
    if let Some(b) = opt_bool(o, "edge")? {
        c.edge = b;
    }
    if let Some(b) = opt_bool(o, "spectrum_dump")? {
        c.spectrum_dump = b;
    }
    if let Some(v) = o.get("snapshots_at") {
        c.snapshots_at = v
            .as_array()
            .ok_or("key \"snapshots_at\" must be an array of numbers")?
            .iter()
            .map(|x| f64_of(x, "snapshots_at"))
            .collect::<Result<_, _>>()?;
    }
    check_unknown(
        o,
        &["winding", "localization", "edge", "spectrum_dump", "snapshots_at"],
        "compute",
    )?;
    Ok(c)
}
