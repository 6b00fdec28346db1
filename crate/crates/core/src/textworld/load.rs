//! JSON world files.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use super::catalog::Catalog;
use super::ids::{ObjectId, ReceptacleId};
use super::task::TaskSpec;
use super::world::{BuildError, Capability, ObjectState, World, WorldBuilder};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("world file schema error at line {line}, column {column}: {message}")]
    Schema { line: usize, column: usize, message: String },
    #[error("world file semantic error: {0}")]
    Semantic(#[from] BuildError),
    #[error("world file: receptacle `{id}` declares class `{class}`")]
    ClassMismatch { id: String, class: String },
    #[error("reading world file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldDocument {
    receptacles: Vec<ReceptacleEntry>,
    #[serde(default)]
    objects: Vec<ObjectEntry>,
    task: TaskSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReceptacleEntry {
    id: ReceptacleId,
    class: Option<String>,
    #[serde(default)]
    openable: bool,
    capability: Option<Capability>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectEntry {
    id: ObjectId,
    class: Option<String>,
    location: ReceptacleId,
    #[serde(default)]
    clean: bool,
    #[serde(default)]
    hot: bool,
    #[serde(default)]
    cool: bool,
}

/// Parses a world document using the builtin observation catalog.
pub fn load_world(document: &str) -> Result<World, LoadError> {
    load_world_with(document, Catalog::builtin())
}

pub fn load_world_with(document: &str, catalog: Catalog) -> Result<World, LoadError> {
    let doc: WorldDocument = serde_json::from_str(document).map_err(|e| LoadError::Schema {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut builder = WorldBuilder::new(doc.task).catalog(catalog);
    for r in doc.receptacles {
        check_class(&r.id.to_string(), r.id.class(), r.class.as_deref())?;
        let capability = r.capability.unwrap_or_else(|| Capability::default_for_class(r.id.class()));
        builder = builder.receptacle_with(r.id, r.openable, capability);
    }
    for o in doc.objects {
        check_class(&o.id.to_string(), o.id.class(), o.class.as_deref())?;
        let state = ObjectState { is_clean: o.clean, is_hot: o.hot, is_cool: o.cool };
        builder = builder.object_with(o.id, o.location, state);
    }
    Ok(builder.build()?)
}

pub fn load_world_file(path: &Path) -> Result<World, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    load_world(&text)
}

fn check_class(id: &str, actual: &str, declared: Option<&str>) -> Result<(), LoadError> {
    match declared {
        Some(class) if class != actual => {
            Err(LoadError::ClassMismatch { id: id.to_string(), class: class.to_string() })
        }
        _ => Ok(()),
    }
}
