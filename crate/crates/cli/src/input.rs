//! Group and cocycle files.

use std::fs;
use std::path::Path;

use margulis_core::{Cocycle, DeformationSpace, Mobius, SchottkyGroup};
use nalgebra::DVector;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// `{ "r": 1, "generators": [[a, b, c, d], …] }` or
/// `{ "r": 1, "preset": "three_holed_sphere", "params": {…} }`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub r: Option<usize>,
    pub generators: Option<Vec<[f64; 4]>>,
    pub preset: Option<String>,
    #[serde(default)]
    pub params: Option<Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleFile {
    pub u: Vec<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SphereParams {
    l1: Option<f64>,
    l2: Option<f64>,
    l3: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusParams {
    l1: Option<f64>,
    l2: Option<f64>,
    twist: Option<f64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

pub fn load_group_file(path: &Path) -> Result<GroupFile, CliError> {
    parse_json(&read(path)?, &path.display().to_string())
}

fn params<T: Default + for<'de> Deserialize<'de>>(v: Option<Value>) -> Result<T, CliError> {
    match v {
        None | Some(Value::Null) => Ok(T::default()),
        Some(v) => {
            serde_json::from_value(v).map_err(|e| CliError::Parse(format!("preset params: {e}")))
        }
    }
}

pub fn build_group(file: GroupFile) -> Result<SchottkyGroup, CliError> {
    match (file.generators, file.preset) {
        (Some(gens), None) => {
            let gens = gens
                .into_iter()
                .map(|[a, b, c, d]| Mobius::new(a, b, c, d))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SchottkyGroup::from_generators(gens)?)
        }
        (None, Some(name)) => preset(&name, file.params),
        (Some(_), Some(_)) => Err(CliError::Parse(
            "give either generators or a preset, not both".into(),
        )),
        (None, None) => Err(CliError::Parse(
            "group file needs generators or a preset".into(),
        )),
    }
}

pub fn preset(name: &str, p: Option<Value>) -> Result<SchottkyGroup, CliError> {
    match name {
        "three_holed_sphere" => {
            let p: SphereParams = params(p)?;
            let (l1, l2) = (p.l1.unwrap_or(4.0), p.l2.unwrap_or(4.0));
            Ok(match p.l3 {
                Some(l3) => SchottkyGroup::three_holed_sphere_with_third(l1, l2, l3)?,
                None => SchottkyGroup::three_holed_sphere(l1, l2)?,
            })
        }
        "one_holed_torus" => {
            let p: TorusParams = params(p)?;
            Ok(SchottkyGroup::one_holed_torus(
                p.l1.unwrap_or(5.0),
                p.l2.unwrap_or(5.0),
                p.twist.unwrap_or(std::f64::consts::FRAC_PI_3),
            )?)
        }
        other => Err(CliError::Parse(format!(
            "unknown preset {other:?} (expected three_holed_sphere or one_holed_torus)"
        ))),
    }
}

pub fn load_cocycle(space: &DeformationSpace, path: &Path) -> Result<Cocycle, CliError> {
    let file: CocycleFile = parse_json(&read(path)?, &path.display().to_string())?;
    if file.u.len() != space.rank() {
        return Err(CliError::Math(margulis_core::Error::DimMismatch {
            expected: space.rank(),
            got: file.u.len(),
        }));
    }
    Ok(space.cocycle(file.u.into_iter().map(DVector::from_vec).collect())?)
}
