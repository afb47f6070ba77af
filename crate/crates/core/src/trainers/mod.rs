//! Downstream classifiers and the shared scoring interface.

pub mod mlp;
pub mod perceptron;
pub mod svm;

use serde::{Deserialize, Serialize};

pub use mlp::{mlp_train, MlpConfig, MlpGradient, MlpModel};
pub use perceptron::{perceptron_fit, perceptron_train, PerceptronConfig, PerceptronFit};
pub use svm::{svm_objective, svm_train, svm_train_traced, SvmConfig, SvmFit};

use crate::dataset::{Dataset, Hyperplane, Label, NEGATIVE, POSITIVE};
use crate::error::{Error, Result};

/// Which trainer to run, with its settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum TrainerConfig {
    Svm(SvmConfig),
    Mlp(MlpConfig),
    Perceptron(PerceptronConfig),
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self::Svm(SvmConfig::default())
    }
}

impl TrainerConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Svm(_) => "svm",
            Self::Mlp(_) => "mlp",
            Self::Perceptron(_) => "perceptron",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Self::Svm(c) => c.seed,
            Self::Mlp(c) => c.seed,
            Self::Perceptron(c) => c.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Self::Svm(c) => c.seed = seed,
            Self::Mlp(c) => c.seed = seed,
            Self::Perceptron(c) => c.seed = seed,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Svm(c) => c.validate(),
            Self::Mlp(c) => c.validate(),
            Self::Perceptron(c) if c.max_updates == 0 => Err(Error::InvalidConfig(
                "perceptron.max_updates must be at least 1".into(),
            )),
            Self::Perceptron(_) => Ok(()),
        }
    }

    pub fn train(&self, d: &Dataset) -> Result<Model> {
        match self {
            Self::Svm(c) => svm_train(d, c).map(Model::Linear),
            Self::Mlp(c) => mlp_train(d, c).map(Model::Mlp),
            Self::Perceptron(c) => perceptron_train(d, c).map(|(h, _)| Model::Linear(h)),
        }
    }
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(Hyperplane),
    Mlp(MlpModel),
}

impl From<Hyperplane> for Model {
    fn from(h: Hyperplane) -> Self {
        Self::Linear(h)
    }
}

impl From<MlpModel> for Model {
    fn from(m: MlpModel) -> Self {
        Self::Mlp(m)
    }
}

impl Model {
    pub fn n_inputs(&self) -> usize {
        match self {
            Self::Linear(h) => h.dim(),
            Self::Mlp(m) => m.n_inputs(),
        }
    }

    /// Score at or above which the positive class is predicted.
    pub fn threshold(&self) -> f64 {
        match self {
            Self::Linear(_) => 0.0,
            Self::Mlp(_) => 0.5,
        }
    }

    pub fn predict_score(&self, score: f64) -> Label {
        if score >= self.threshold() {
            POSITIVE
        } else {
            NEGATIVE
        }
    }
}

/// Per-row scores: `w·x + θ` for hyperplanes, positive-class probability
/// for networks.
pub fn model_decision(model: &Model, d: &Dataset) -> Result<Vec<f64>> {
    if model.n_inputs() != d.n_features() {
        return Err(Error::DimensionMismatch {
            expected: model.n_inputs(),
            found: d.n_features(),
        });
    }
    Ok(match model {
        Model::Linear(h) => d.rows().map(|x| h.score(x)).collect(),
        Model::Mlp(m) => d.rows().map(|x| m.probability(x)).collect(),
    })
}

pub fn predict(model: &Model, d: &Dataset) -> Result<Vec<Label>> {
    Ok(model_decision(model, d)?
        .into_iter()
        .map(|s| model.predict_score(s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::decision_value;
    use crate::rng::SeededRng;

    fn random(n: usize, p: usize) -> Dataset {
        let mut rng = SeededRng::new(77);
        let x = (0..n * p).map(|_| rng.normal()).collect();
        let y = (0..n).map(|i| if i % 3 == 0 { 1 } else { -1 }).collect();
        Dataset::new(x, p, y).unwrap()
    }

    #[test]
    fn hyperplane_scores_delegate() {
        let d = random(100, 4);
        let h = Hyperplane::new(vec![0.5, -1.0, 2.0, 0.1], -0.3).unwrap();
        let scores = model_decision(&Model::Linear(h.clone()), &d).unwrap();
        for (x, s) in d.rows().zip(scores) {
            assert_eq!(s, decision_value(&h, x).unwrap());
        }
    }

    #[test]
    fn zero_output_weights_give_constant_score() {
        let d = random(50, 3);
        let mut m = MlpModel::init(3, &MlpConfig::default());
        m.w2.iter_mut().for_each(|w| *w = 0.0);
        m.b2 = 0.7;
        let model = Model::Mlp(m);
        let scores = model_decision(&model, &d).unwrap();
        assert!(scores.iter().all(|&s| s == scores[0] && s.is_finite()));
        assert!(predict(&model, &d).unwrap().iter().all(|&y| y == 1));
    }

    #[test]
    fn dimension_guard() {
        let d = random(10, 3);
        let h = Hyperplane::new(vec![1.0; 4], 0.0).unwrap();
        assert!(matches!(
            model_decision(&Model::Linear(h), &d),
            Err(Error::DimensionMismatch {
                expected: 4,
                found: 3
            })
        ));
    }

    #[test]
    fn config_json_shape() {
        let cfg: TrainerConfig =
            serde_json::from_str(r#"{"algo":"mlp","hidden_units":4}"#).unwrap();
        assert_eq!(
            cfg,
            TrainerConfig::Mlp(MlpConfig {
                hidden_units: 4,
                ..Default::default()
            })
        );
        assert_eq!(cfg.with_seed(5).seed(), 5);
        let svm: TrainerConfig = serde_json::from_str(r#"{"algo":"svm"}"#).unwrap();
        assert_eq!(svm, TrainerConfig::default());
    }
}
