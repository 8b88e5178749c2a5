//! The model file format: a TOML document with keys `d`, `r`, `matrix`
//! (d rows of r reals), `factors` (one table per column), optional
//! `masses` (default uniform) and optional `mvn_tol`.
//!
//! A Hüsler–Reiss factor's `variogram` is indexed by the sorted members
//! of the column's signature; the ambient d×d variogram is never stored.
//! Singleton signatures take an empty variogram `[]`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use mgp_core::linalg::VariogramMatrix;
use mgp_core::{FactorFamily, MixtureModel, ValidationError, MVN_TOL_DEFAULT};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub d: usize,
    pub r: usize,
    pub matrix: Vec<Vec<f64>>,
    pub factors: Vec<FactorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mvn_tol: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FactorSpec {
    Logistic { alpha: f64 },
    HueslerReiss { variogram: Vec<Vec<f64>> },
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("model file serializes")
    }

    /// Validates into a core model. `mvn_tol_override` (from the command
    /// line) wins over the file's `mvn_tol`.
    pub fn build(&self, mvn_tol_override: Option<f64>) -> Result<MixtureModel, CliError> {
        if self.matrix.len() != self.d {
            return Err(CliError::Validation(ValidationError::ShapeMismatch {
                expected: self.d,
                found: self.matrix.len(),
                what: "matrix rows vs d",
            }));
        }
        if self.matrix.iter().any(|row| row.len() != self.r) {
            return Err(CliError::Validation(ValidationError::ShapeMismatch {
                expected: self.r,
                found: self.matrix.iter().map(|r| r.len()).find(|&l| l != self.r).unwrap_or(0),
                what: "matrix columns vs r",
            }));
        }
        let mut families = Vec::with_capacity(self.factors.len());
        for (k, spec) in self.factors.iter().enumerate() {
            let family = match spec {
                FactorSpec::Logistic { alpha } => FactorFamily::logistic(*alpha),
                FactorSpec::HueslerReiss { variogram } => {
                    let g = if variogram.is_empty() {
                        VariogramMatrix::empty()
                    } else {
                        VariogramMatrix::new(variogram).map_err(|reason| {
                            CliError::Validation(ValidationError::BadVariogram {
                                column: k,
                                reason,
                            })
                        })?
                    };
                    FactorFamily::huesler_reiss(g)
                }
            };
            families.push(family);
        }
        let tol = mvn_tol_override.or(self.mvn_tol).unwrap_or(MVN_TOL_DEFAULT);
        Ok(MixtureModel::validate_with(
            &self.matrix,
            families,
            self.masses.clone(),
            tol,
        )?)
    }

    /// The canonical document for a validated model: matrix, factors and
    /// masses as the model actually holds them. Re-parsing yields an
    /// identical model.
    pub fn canonical(model: &MixtureModel) -> Self {
        let factors = model
            .families()
            .iter()
            .map(|f| match f {
                FactorFamily::Logistic { alpha } => FactorSpec::Logistic { alpha: *alpha },
                FactorFamily::HueslerReiss { variogram } => FactorSpec::HueslerReiss {
                    variogram: variogram.rows(),
                },
            })
            .collect();
        ModelFile {
            d: model.d(),
            r: model.r(),
            matrix: model.matrix().rows(),
            factors,
            masses: Some(model.masses().as_slice().to_vec()),
            mvn_tol: Some(model.mvn_tol()),
        }
    }
}
