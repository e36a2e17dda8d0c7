//! Scenarios shipped with the crate.

use std::path::{Path, PathBuf};

use crate::env::Scenario;
use crate::error::{Error, Result};

const SHIPPED: &[(&str, &str)] = &[
    ("three_goal_2d", include_str!("../scenarios/three_goal_2d.json")),
    ("three_goal_2d_edge", include_str!("../scenarios/three_goal_2d_edge.json")),
    ("three_goal_2d_row", include_str!("../scenarios/three_goal_2d_row.json")),
    ("three_goal_2d_fan", include_str!("../scenarios/three_goal_2d_fan.json")),
    ("three_goal_2d_fan_side", include_str!("../scenarios/three_goal_2d_fan_side.json")),
    ("single_goal_2d", include_str!("../scenarios/single_goal_2d.json")),
    ("seasoning_3d", include_str!("../scenarios/seasoning_3d.json")),
    ("drink_3d", include_str!("../scenarios/drink_3d.json")),
    ("utensil_3d", include_str!("../scenarios/utensil_3d.json")),
];

/// Multi-stage kitchen tasks used for the condition comparison.
pub const KITCHEN_SUITES: [&str; 3] = ["seasoning_3d", "drink_3d", "utensil_3d"];

pub fn names() -> impl Iterator<Item = &'static str> {
    SHIPPED.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Option<Scenario> {
    SHIPPED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_json(text).expect("shipped scenario is valid"))
}

pub fn all() -> Vec<Scenario> {
    names().filter_map(get).collect()
}

/// Shipped 2-D layouts with three candidate goals.
pub fn three_goal_2d() -> Vec<Scenario> {
    all().into_iter().filter(|s| s.dim() == 2 && s.num_stages() == 1 && s.goals.len() == 3).collect()
}

pub fn kitchen_suites() -> Vec<Scenario> {
    KITCHEN_SUITES.iter().filter_map(|n| get(n)).collect()
}

/// Finds a scenario by file path, by `<name>.json` in `dir`, or among the
/// shipped ones, in that order.
pub fn resolve(name_or_path: &str, dir: Option<&Path>) -> Result<Scenario> {
    let as_path = Path::new(name_or_path);
    if name_or_path.ends_with(".json") || as_path.components().count() > 1 {
        return Scenario::load(as_path);
    }
    if let Some(dir) = dir {
        let candidate: PathBuf = dir.join(format!("{name_or_path}.json"));
        if candidate.is_file() {
            return Scenario::load(&candidate);
        }
    }
    get(name_or_path).ok_or_else(|| Error::InvalidScenario(format!("scenario {name_or_path:?} not found")))
}

/// Every scenario in `dir` (`*.json`), sorted by id; shipped ones when `dir` is `None`.
pub fn load_dir(dir: Option<&Path>) -> Result<Vec<Scenario>> {
    let Some(dir) = dir else { return Ok(all()) };
    let entries = std::fs::read_dir(dir).map_err(|e| Error::InvalidScenario(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "json") {
            out.push(Scenario::load(&path)?);
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
