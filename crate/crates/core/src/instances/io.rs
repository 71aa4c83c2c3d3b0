//! JSON instance files.
//!
//! ```json
//! { "name": "...", "n": 3, "capacity": 2,
//!   "items": [ { "value": 2, "weight": 1 }, ... ],
//!   "family_params": { "family": "instance1", "alpha": 0.5, "n": 20 } }
//! ```
//!
//! Floats are written with 17 significant digits so a write/read cycle is bit-exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::to_json_g17;
use crate::problem::{FamilyParams, Item, KnapsackInstance};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: String,
    n: usize,
    capacity: f64,
    items: Vec<Item>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family_params: Option<FamilyParams>,
}

pub fn instance_to_json(instance: &KnapsackInstance) -> String {
    let file = InstanceFile {
        name: instance.name.clone(),
        n: instance.n(),
        capacity: instance.capacity(),
        items: instance.items().to_vec(),
        family_params: instance.family_params.clone(),
    };
    to_json_g17(&file).expect("instance serialization cannot fail")
}

/// Parses and validates an instance document. `origin` labels error messages.
pub fn instance_from_json(text: &str, origin: &Path) -> Result<KnapsackInstance> {
    let parse_err = |message: String| Error::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    if file.items.len() != file.n {
        return Err(parse_err(format!(
            "field `items`: expected n = {} entries, found {}",
            file.n,
            file.items.len()
        )));
    }
    let mut instance =
        KnapsackInstance::new(file.name, file.items, file.capacity).map_err(|e| match e {
            Error::Validation(problems) => parse_err(format!(
                "invariant violated (values, weights and capacity must be positive and finite): {}",
                problems.join("; ")
            )),
            other => other,
        })?;
    instance.family_params = file.family_params;
    Ok(instance)
}

pub fn write_instance(instance: &KnapsackInstance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, instance_to_json(instance)).map_err(|e| Error::io(path, e))
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<KnapsackInstance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(PathBuf::from(path), e))?;
    instance_from_json(&text, path)
}
