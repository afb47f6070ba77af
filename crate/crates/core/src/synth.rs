//! Seeded synthetic classification data.
//!
//! Both generators draw the teacher vector first and then the rows, all from
//! one [`SeededRng`] stream, so a given spec always yields the same data.

use serde::{Deserialize, Serialize};

use crate::dataset::{class_of, dot, Dataset, Label};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

const STALL_FACTOR: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearGenSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    #[serde(default)]
    pub margin_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyGenSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub margin_gap: f64,
}

fn default_degree() -> usize {
    3
}

/// The labelling vector drawn by a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherVector {
    pub beta: Vec<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthResult {
    pub dataset: Dataset,
    pub teacher: TeacherVector,
    /// Length of the teacher vector; `p` for linear data.
    pub lifted_dim: usize,
}

fn check_shape(n: usize, p: usize, margin_gap: f64) -> Result<()> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidConfig(format!(
            "need n >= 2 and p >= 1, got n={n}, p={p}"
        )));
    }
    if !(margin_gap >= 0.0 && margin_gap.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "margin_gap must be >= 0, got {margin_gap}"
        )));
    }
    Ok(())
}

/// Draw rows until `n` are accepted. `teacher_score` maps a raw row to its
/// teacher decision value (already divided by the teacher norm).
fn draw_rows(
    rng: &mut SeededRng,
    n: usize,
    p: usize,
    margin_gap: f64,
    mut teacher_score: impl FnMut(&[f64]) -> f64,
) -> Result<(Vec<f64>, Vec<Label>)> {
    let mut samples = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    let mut row = vec![0.0; p];
    let mut draws = 0usize;
    while labels.len() < n {
        if draws >= STALL_FACTOR * n {
            return Err(Error::GenerationStalled { draws });
        }
        draws += 1;
        for v in &mut row {
            *v = rng.normal();
        }
        let z = teacher_score(&row);
        if margin_gap > 0.0 && z.abs() < margin_gap {
            continue;
        }
        samples.extend_from_slice(&row);
        labels.push(class_of(z));
    }
    Ok((samples, labels))
}

fn normalized(beta: &[f64]) -> f64 {
    let norm = dot(beta, beta).sqrt();
    if norm > 0.0 {
        norm
    } else {
        1.0
    }
}

/// Standard-normal features labelled by the sign of a standard-normal
/// teacher projection (zero goes to +1).
pub fn gen_linear(spec: &LinearGenSpec) -> Result<SynthResult> {
    check_shape(spec.n, spec.p, spec.margin_gap)?;
    let mut rng = SeededRng::new(spec.seed);
    let beta: Vec<f64> = (0..spec.p).map(|_| rng.normal()).collect();
    let norm = normalized(&beta);
    let (samples, labels) = draw_rows(&mut rng, spec.n, spec.p, spec.margin_gap, |x| {
        dot(&beta, x) / norm
    })?;
    Ok(SynthResult {
        dataset: Dataset::new(samples, spec.p, labels)?,
        lifted_dim: spec.p,
        teacher: TeacherVector {
            beta,
            seed: spec.seed,
        },
    })
}

/// Exponent vector of one monomial.
pub type Monomial = Vec<u32>;

/// Number of monomials of total degree `1..=degree` in `p` variables,
/// `C(p + degree, degree) - 1`.
pub fn basis_size(p: usize, degree: usize) -> Result<usize> {
    let overflow = || Error::BasisOverflow { p, degree };
    // C(p + d, d) built incrementally; each partial product is itself a
    // binomial coefficient so the division is exact.
    let mut c: usize = 1;
    for k in 1..=degree {
        c = c
            .checked_mul(p.checked_add(k).ok_or_else(overflow)?)
            .ok_or_else(overflow)?
            / k;
    }
    Ok(c - 1)
}

/// All monomials with `1 <= total degree <= degree`, grouped by ascending
/// total degree and, within a degree, in descending lexicographic order of
/// the exponent vectors (so `x1` precedes `x2`, and `x1^2` precedes `x1 x2`).
pub fn monomial_basis(p: usize, degree: usize) -> Result<Vec<Monomial>> {
    if p == 0 || degree == 0 {
        return Err(Error::InvalidConfig(format!(
            "monomial basis needs p >= 1 and degree >= 1, got p={p}, degree={degree}"
        )));
    }
    let size = basis_size(p, degree)?;
    let mut out = Vec::with_capacity(size);
    let mut current = vec![0u32; p];
    for total in 1..=degree {
        fill(&mut current, 0, total as u32, &mut out);
    }
    debug_assert_eq!(out.len(), size);
    Ok(out)
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(current, pos + 1, remaining - e, out);
    }
    current[pos] = 0;
}

fn eval_monomials(x: &[f64], basis: &[Monomial], out: &mut [f64]) {
    for (o, mono) in out.iter_mut().zip(basis) {
        let mut v = 1.0;
        for (&xi, &e) in x.iter().zip(mono) {
            if e > 0 {
                v *= xi.powi(e as i32);
            }
        }
        *o = v;
    }
}

/// Row-major `n x |basis|` matrix of monomial values.
pub fn poly_expand(samples: &[f64], p: usize, basis: &[Monomial]) -> Result<Vec<f64>> {
    if let Some(m) = basis.first() {
        if m.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: m.len(),
            });
        }
    }
    if p == 0 || samples.len() % p != 0 {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: samples.len(),
        });
    }
    let m = basis.len();
    let mut out = vec![0.0; samples.len() / p * m];
    for (x, row) in samples.chunks_exact(p).zip(out.chunks_exact_mut(m.max(1))) {
        eval_monomials(x, basis, row);
    }
    Ok(out)
}

/// Lift a whole dataset (labels unchanged).
pub fn poly_expand_dataset(d: &Dataset, degree: usize) -> Result<Dataset> {
    let basis = monomial_basis(d.n_features(), degree)?;
    let lifted = poly_expand(d.samples(), d.n_features(), &basis)?;
    d.with_samples(lifted, basis.len())
}

/// Standard-normal features labelled by the sign of a teacher projection in
/// the polynomial lift. The dataset keeps the original features.
pub fn gen_poly(spec: &PolyGenSpec) -> Result<SynthResult> {
    check_shape(spec.n, spec.p, spec.margin_gap)?;
    if spec.degree < 1 {
        return Err(Error::InvalidConfig("degree must be at least 1".into()));
    }
    let basis = monomial_basis(spec.p, spec.degree)?;
    let m = basis.len();
    let mut rng = SeededRng::new(spec.seed);
    let beta: Vec<f64> = (0..m).map(|_| rng.normal()).collect();
    let norm = normalized(&beta);
    let mut lifted = vec![0.0; m];
    let (samples, labels) = draw_rows(&mut rng, spec.n, spec.p, spec.margin_gap, |x| {
        eval_monomials(x, &basis, &mut lifted);
        dot(&beta, &lifted) / norm
    })?;
    Ok(SynthResult {
        dataset: Dataset::new(samples, spec.p, labels)?,
        lifted_dim: m,
        teacher: TeacherVector {
            beta,
            seed: spec.seed,
        },
    })
}

/// Which generator a data spec refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    Linear,
    Poly,
}

/// Generator parameters as they appear in configs and on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub kind: GenKind,
    pub n: usize,
    pub p: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub margin_gap: f64,
}

impl DataSpec {
    pub fn generate(&self, seed: u64) -> Result<SynthResult> {
        match self.kind {
            GenKind::Linear => gen_linear(&LinearGenSpec {
                n: self.n,
                p: self.p,
                seed,
                margin_gap: self.margin_gap,
            }),
            GenKind::Poly => gen_poly(&PolyGenSpec {
                n: self.n,
                p: self.p,
                seed,
                degree: self.degree,
                margin_gap: self.margin_gap,
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Survey-shaped fixture
// ---------------------------------------------------------------------------

/// Categorical columns of the survey-shaped fixture and their level counts.
const ALUMNI_CATEGORICAL: &[(&str, usize)] = &[
    ("gender", 3),
    ("school", 12),
    ("campus", 26),
    ("education_level", 5),
    ("birth_region", 8),
    ("current_region", 10),
    ("father_education", 7),
    ("mother_education", 7),
    ("parent_occupation", 9),
    ("company_size", 3),
];

/// Numeric columns: name, mean, spread, lower bound, upper bound, decimals.
const ALUMNI_NUMERIC: &[(&str, f64, f64, f64, f64, usize)] = &[
    ("age", 41.0, 11.0, 22.0, 80.0, 0),
    ("graduation_year", 2005.0, 11.0, 1960.0, 2022.0, 0),
    ("working_hours", 45.0, 9.0, 0.0, 90.0, 0),
    ("years_abroad", 1.5, 3.0, 0.0, 40.0, 0),
    ("life_satisfaction", 7.8, 1.4, 1.0, 10.0, 0),
    ("income_satisfaction", 6.9, 1.8, 1.0, 10.0, 0),
    ("social_intelligence", 3.9, 0.6, 1.0, 5.0, 2),
    ("self_knowledge", 3.8, 0.6, 1.0, 5.0, 2),
    ("communication", 4.0, 0.6, 1.0, 5.0, 2),
    ("leadership", 3.7, 0.7, 1.0, 5.0, 2),
    ("teamwork", 4.1, 0.5, 1.0, 5.0, 2),
    ("jobs_held", 3.0, 1.8, 1.0, 15.0, 0),
    ("promotions", 2.0, 1.5, 0.0, 12.0, 0),
    ("salary_index", 100.0, 35.0, 10.0, 400.0, 1),
];

/// Name of the fixture's label column and its positive value.
pub const ALUMNI_LABEL: &str = "would_study_again";
pub const ALUMNI_POSITIVE: &str = "yes";

/// CSV text of a synthetic survey-shaped dataset: 14 numeric and 10 nominal
/// columns (104 features once the nominal columns are one-hot encoded) and an
/// imbalanced yes/no target driven by a noisy logistic model of both. It is a
/// stand-in with realistic shape only; it is not drawn from any real survey.
pub fn alumni_like_csv(n: usize, seed: u64) -> String {
    let mut rng = SeededRng::new(seed);
    // Per-level effects and level popularity for each nominal column.
    let cat_tables: Vec<(Vec<f64>, Vec<f64>)> = ALUMNI_CATEGORICAL
        .iter()
        .map(|&(_, levels)| {
            let effects: Vec<f64> = (0..levels).map(|_| 0.35 * rng.normal()).collect();
            let mut cum = Vec::with_capacity(levels);
            let mut acc = 0.0;
            for _ in 0..levels {
                acc += 0.5 + rng.uniform();
                cum.push(acc);
            }
            let total = acc;
            (effects, cum.into_iter().map(|c| c / total).collect())
        })
        .collect();
    let num_effects: Vec<f64> = ALUMNI_NUMERIC.iter().map(|_| 0.5 * rng.normal()).collect();

    let mut out = String::new();
    let header: Vec<&str> = ALUMNI_NUMERIC
        .iter()
        .map(|c| c.0)
        .chain(ALUMNI_CATEGORICAL.iter().map(|c| c.0))
        .chain(std::iter::once(ALUMNI_LABEL))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');

    for _ in 0..n {
        let mut fields = Vec::with_capacity(header.len());
        let mut logit = 1.6;
        for (&(_, mean, spread, lo, hi, decimals), &effect) in
            ALUMNI_NUMERIC.iter().zip(&num_effects)
        {
            let z = rng.normal();
            let value = (mean + spread * z).clamp(lo, hi);
            logit += effect * (value - mean) / spread;
            fields.push(format!("{value:.decimals$}"));
        }
        for (&(name, _), (effects, cum)) in ALUMNI_CATEGORICAL.iter().zip(&cat_tables) {
            let u = rng.uniform();
            let level = cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1);
            logit += effects[level];
            fields.push(format!("{name}_{level}"));
        }
        // logistic noise
        let u = rng.uniform().clamp(1e-12, 1.0 - 1e-12);
        logit += (u / (1.0 - u)).ln();
        fields.push(if logit >= 0.0 { "yes" } else { "no" }.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_labels_follow_teacher() {
        let r = gen_linear(&LinearGenSpec {
            n: 500,
            p: 4,
            seed: 1,
            margin_gap: 0.0,
        })
        .unwrap();
        for (x, &y) in r.dataset.rows().zip(r.dataset.labels()) {
            assert_eq!(class_of(dot(&r.teacher.beta, x)), y);
        }
        assert_eq!(r.lifted_dim, 4);
    }

    #[test]
    fn linear_margin_respected() {
        let r = gen_linear(&LinearGenSpec {
            n: 500,
            p: 3,
            seed: 2,
            margin_gap: 0.3,
        })
        .unwrap();
        let norm = dot(&r.teacher.beta, &r.teacher.beta).sqrt();
        assert!(r
            .dataset
            .rows()
            .all(|x| dot(&r.teacher.beta, x).abs() / norm >= 0.3));
    }

    #[test]
    fn linear_deterministic() {
        let spec = LinearGenSpec {
            n: 300,
            p: 5,
            seed: 17,
            margin_gap: 0.1,
        };
        assert_eq!(gen_linear(&spec).unwrap(), gen_linear(&spec).unwrap());
    }

    #[test]
    fn linear_class_balance() {
        let r = gen_linear(&LinearGenSpec {
            n: 100_000,
            p: 10,
            seed: 5,
            margin_gap: 0.0,
        })
        .unwrap();
        let (pos, _) = r.dataset.class_counts();
        let frac = pos as f64 / 100_000.0;
        assert!((0.47..=0.53).contains(&frac), "{frac}");
    }

    #[test]
    fn distribution_sanity() {
        let n = 20_000;
        let r = gen_linear(&LinearGenSpec {
            n,
            p: 6,
            seed: 12,
            margin_gap: 0.0,
        })
        .unwrap();
        let tol_mean = 5.0 / (n as f64).sqrt();
        let tol_var = 10.0 / (n as f64).sqrt();
        for j in 0..6 {
            let col: Vec<f64> = r.dataset.rows().map(|x| x[j]).collect();
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            assert!(mean.abs() <= tol_mean, "mean {mean}");
            assert!((var - 1.0).abs() <= tol_var, "var {var}");
        }
    }

    #[test]
    fn impossible_margin_stalls() {
        let err = gen_linear(&LinearGenSpec {
            n: 10,
            p: 2,
            seed: 0,
            margin_gap: 50.0,
        })
        .unwrap_err();
        assert!(matches!(err, Error::GenerationStalled { draws: 10_000 }));
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(monomial_basis(2, 1).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(
            monomial_basis(2, 2).unwrap(),
            vec![vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
        assert_eq!(monomial_basis(10, 3).unwrap().len(), 285);
        assert_eq!(basis_size(10, 3).unwrap(), 285);
        assert_eq!(basis_size(20, 3).unwrap(), 1770);
        assert!(matches!(
            basis_size(usize::MAX / 2, 3),
            Err(Error::BasisOverflow { .. })
        ));
    }

    #[test]
    fn basis_has_no_duplicates() {
        let b = monomial_basis(4, 3).unwrap();
        let mut sorted = b.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), b.len());
        assert!(b.windows(2).all(|w| {
            let (a, c): (u32, u32) = (w[0].iter().sum(), w[1].iter().sum());
            a < c || (a == c && w[0] > w[1])
        }));
    }

    #[test]
    fn expansion_values() {
        let basis = monomial_basis(2, 2).unwrap();
        assert_eq!(
            poly_expand(&[2.0, 3.0], 2, &basis).unwrap(),
            vec![2.0, 3.0, 4.0, 6.0, 9.0]
        );
        let zeros = poly_expand(&[0.0; 3], 3, &monomial_basis(3, 3).unwrap()).unwrap();
        assert!(zeros.iter().all(|&v| v == 0.0));
        let x = [1.5, -2.0, 0.25, 7.0];
        assert_eq!(
            poly_expand(&x, 2, &monomial_basis(2, 1).unwrap()).unwrap(),
            x.to_vec()
        );
    }

    #[test]
    fn poly_labels_follow_lifted_teacher() {
        let spec = PolyGenSpec {
            n: 400,
            p: 3,
            seed: 9,
            degree: 3,
            margin_gap: 0.0,
        };
        let r = gen_poly(&spec).unwrap();
        assert_eq!(r.lifted_dim, 19);
        assert_eq!(r.dataset.n_features(), 3);
        let lifted = poly_expand_dataset(&r.dataset, 3).unwrap();
        for (z, &y) in lifted.rows().zip(lifted.labels()) {
            assert_eq!(class_of(dot(&r.teacher.beta, z)), y);
        }
        assert_eq!(gen_poly(&spec).unwrap(), r);
    }

    #[test]
    fn alumni_fixture_shape() {
        let text = alumni_like_csv(50, 3);
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(header.len(), 25);
        assert_eq!(lines.count(), 50);
        let levels: usize = ALUMNI_CATEGORICAL.iter().map(|c| c.1).sum();
        assert_eq!(ALUMNI_NUMERIC.len() + levels, 104);
        assert_eq!(alumni_like_csv(50, 3), text);
    }
}
