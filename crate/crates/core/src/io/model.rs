//! JSON model files.
//!
//! ```text
//! {"kind":"hyperplane","w":[...],"theta":...,"meta":{...}}
//! {"kind":"mlp","w1":[[...]],"b1":[...],"w2":[...],"b2":...,"meta":{...}}
//! ```
//!
//! `meta.format_version` is written as 1; files without it are read as 1.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dataset::Hyperplane;
use crate::error::{Error, Result};
use crate::trainers::{MlpModel, Model};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ModelRepr {
    Hyperplane {
        w: Vec<f64>,
        theta: f64,
        #[serde(default)]
        meta: Map<String, Value>,
    },
    Mlp {
        w1: Vec<Vec<f64>>,
        b1: Vec<f64>,
        w2: Vec<f64>,
        b2: f64,
        #[serde(default)]
        meta: Map<String, Value>,
    },
}

/// A model plus free-form metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: Model,
    pub meta: Map<String, Value>,
}

impl ModelFile {
    pub fn new(model: Model) -> Self {
        Self {
            model,
            meta: Map::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        let mut meta = self.meta.clone();
        meta.insert("format_version".into(), FORMAT_VERSION.into());
        let repr = match &self.model {
            Model::Linear(h) => ModelRepr::Hyperplane {
                w: h.w.clone(),
                theta: h.theta,
                meta,
            },
            Model::Mlp(m) => ModelRepr::Mlp {
                w1: m.w1.clone(),
                b1: m.b1.clone(),
                w2: m.w2.clone(),
                b2: m.b2,
                meta,
            },
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ModelRepr =
            serde_json::from_str(text).map_err(|e| Error::SchemaViolation(e.to_string()))?;
        let (model, mut meta) = match repr {
            ModelRepr::Hyperplane { w, theta, meta } => {
                if w.is_empty() {
                    return Err(Error::SchemaViolation("hyperplane has no weights".into()));
                }
                let h =
                    Hyperplane::new(w, theta).map_err(|e| Error::SchemaViolation(e.to_string()))?;
                (Model::Linear(h), meta)
            }
            ModelRepr::Mlp {
                w1,
                b1,
                w2,
                b2,
                meta,
            } => {
                let h = b1.len();
                let p = w1.first().map_or(0, Vec::len);
                if h == 0
                    || p == 0
                    || w1.len() != h
                    || w2.len() != h
                    || w1.iter().any(|r| r.len() != p)
                {
                    return Err(Error::SchemaViolation(format!(
                        "inconsistent network shape: w1 {}x{p}, b1 {h}, w2 {}",
                        w1.len(),
                        w2.len()
                    )));
                }
                let m = MlpModel { w1, b1, w2, b2 };
                if !m.is_finite() {
                    return Err(Error::SchemaViolation(
                        "non-finite network parameter".into(),
                    ));
                }
                (Model::Mlp(m), meta)
            }
        };
        match meta.remove("format_version") {
            None => {}
            Some(v) => match v.as_u64() {
                Some(found) if found == FORMAT_VERSION as u64 => {}
                Some(found) => {
                    return Err(Error::VersionMismatch {
                        found: found.min(u32::MAX as u64) as u32,
                        expected: FORMAT_VERSION,
                    })
                }
                None => {
                    return Err(Error::SchemaViolation(format!(
                        "format_version is not an integer: {v}"
                    )))
                }
            },
        }
        Ok(Self { model, meta })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn save_model(model: &Model, path: impl AsRef<Path>) -> Result<()> {
    ModelFile::new(model.clone()).save(path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    ModelFile::load(path).map(|f| f.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::trainers::{model_decision, MlpConfig};

    fn awkward() -> Hyperplane {
        Hyperplane::new(
            vec![0.1, 1.0 / 3.0, -2.2250738585072014e-308, 1e300, 5e-324],
            -0.7,
        )
        .unwrap()
    }

    #[test]
    fn hyperplane_roundtrip_exact() {
        let file = ModelFile::new(Model::Linear(awkward())).with_meta("trainer", "svm");
        let back = ModelFile::from_json(&file.to_json().unwrap()).unwrap();
        assert_eq!(back, file);
        let json: Value = serde_json::from_str(&file.to_json().unwrap()).unwrap();
        assert_eq!(json["kind"], "hyperplane");
        assert_eq!(json["meta"]["format_version"], 1);
    }

    #[test]
    fn mlp_roundtrip_exact() {
        let m = MlpModel::init(
            4,
            &MlpConfig {
                hidden_units: 3,
                seed: 8,
                ..Default::default()
            },
        );
        let file = ModelFile::new(Model::Mlp(m));
        assert_eq!(
            ModelFile::from_json(&file.to_json().unwrap()).unwrap(),
            file
        );
    }

    #[test]
    fn minimal_files_accepted() {
        let f = ModelFile::from_json(r#"{"kind":"hyperplane","w":[1,2],"theta":0.5}"#).unwrap();
        assert_eq!(
            f.model,
            Model::Linear(Hyperplane::new(vec![1.0, 2.0], 0.5).unwrap())
        );
    }

    #[test]
    fn schema_violations() {
        let text = ModelFile::new(Model::Linear(awkward())).to_json().unwrap();
        for bad in [
            &text[..text.len() / 2],
            r#"{"kind":"forest","trees":[]}"#,
            r#"{"w":[1],"theta":0}"#,
            r#"{"kind":"hyperplane","w":[],"theta":0}"#,
            r#"{"kind":"hyperplane","w":[1],"theta":"x"}"#,
            r#"{"kind":"mlp","w1":[[1,2],[3]],"b1":[0,0],"w2":[1,1],"b2":0}"#,
            r#"{"kind":"mlp","w1":[[1]],"b1":[0,0],"w2":[1],"b2":0}"#,
        ] {
            assert!(
                matches!(ModelFile::from_json(bad), Err(Error::SchemaViolation(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn version_mismatch() {
        let bad = r#"{"kind":"hyperplane","w":[1],"theta":0,"meta":{"format_version":2}}"#;
        assert!(matches!(
            ModelFile::from_json(bad),
            Err(Error::VersionMismatch {
                found: 2,
                expected: 1
            })
        ));
    }

    #[test]
    fn dimension_guard_at_decision_time() {
        let model = Model::Linear(Hyperplane::new(vec![1.0; 10], 0.0).unwrap());
        let d = Dataset::new(vec![0.0; 9 * 2], 9, vec![1, -1]).unwrap();
        assert!(matches!(
            model_decision(&model, &d),
            Err(Error::DimensionMismatch {
                expected: 10,
                found: 9
            })
        ));
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let model = Model::Linear(awkward());
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap(), model);
    }
}
