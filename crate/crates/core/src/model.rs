//! Mixture-model definition and validation.
//!
//! A model is a d×r coefficient matrix `A` with unit row sums and positive
//! column sums, one dependence family per column (logistic or
//! Hüsler–Reiss), and a mass vector `m`. Column `k`'s support
//! `J_k = {j : a_jk > 0}` is its *signature*; the signatures are exactly
//! the extreme directions of the resulting mgp distribution.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::ValidationError;
use crate::linalg::VariogramMatrix;
use crate::stdf::{self, FaceWeights};
use crate::MVN_TOL_DEFAULT;

/// Relative tolerance on unit row sums.
const ROW_SUM_RTOL: f64 = 1e-9;
/// Absolute tolerance on the mass-vector sum.
const MASS_SUM_ATOL: f64 = 1e-12;

/// Validated d×r coefficient matrix: entries in [0, 1], unit row sums,
/// positive column sums. Entries are taken at face value; membership in a
/// signature is `a_jk > 0` exactly, with no epsilon snapping, so a
/// coefficient like 1e-300 is formally a signature member.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientMatrix {
    d: usize,
    r: usize,
    entries: Vec<f64>, // row-major
}

impl CoefficientMatrix {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.r + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.d)
            .map(|j| self.entries[j * self.r..(j + 1) * self.r].to_vec())
            .collect()
    }

    /// Column `k` restricted to the rows in `sig`, in signature order.
    pub fn column_on(&self, k: usize, sig: &Signature) -> Vec<f64> {
        sig.members().iter().map(|&j| self.get(j, k)).collect()
    }

    fn validate(rows: &[Vec<f64>]) -> Result<Self, ValidationError> {
        let d = rows.len();
        if d == 0 {
            return Err(ValidationError::ShapeMismatch {
                expected: 1,
                found: 0,
                what: "matrix rows",
            });
        }
        let r = rows[0].len();
        if r == 0 {
            return Err(ValidationError::ShapeMismatch {
                expected: 1,
                found: 0,
                what: "matrix columns",
            });
        }
        let mut entries = Vec::with_capacity(d * r);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != r {
                return Err(ValidationError::ShapeMismatch {
                    expected: r,
                    found: row.len(),
                    what: "row length",
                });
            }
            for (k, &a) in row.iter().enumerate() {
                if !a.is_finite() || !(0.0..=1.0).contains(&a) {
                    return Err(ValidationError::BadEntry { row: j, column: k, value: a });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_RTOL {
                return Err(ValidationError::RowSum { row: j, sum });
            }
            entries.extend_from_slice(row);
        }
        let m = CoefficientMatrix { d, r, entries };
        for k in 0..r {
            if (0..d).all(|j| m.get(j, k) == 0.0) {
                return Err(ValidationError::EmptyColumn { column: k });
            }
        }
        Ok(m)
    }
}

/// A nonempty set of component indices (zero-based, strictly increasing).
/// `Display` renders the conventional one-based set notation `{1,2,3}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    members: Vec<usize>,
}

impl Signature {
    /// Builds a signature from zero-based indices; sorts and deduplicates.
    pub fn new(mut members: Vec<usize>, d: usize) -> Result<Self, &'static str> {
        if members.is_empty() {
            return Err("signature must be nonempty");
        }
        members.sort_unstable();
        members.dedup();
        if *members.last().unwrap() >= d {
            return Err("signature index out of range");
        }
        Ok(Signature { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }

    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.members.iter().all(|&j| other.contains(j))
    }

    /// Position of component `j` within the signature, if present.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.members.binary_search(&j).ok()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, &j) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "}}")
    }
}

/// Per-column dependence family.
#[derive(Clone, Debug, PartialEq)]
pub enum FactorFamily {
    /// Logistic with dependence parameter `alpha` in (0, 1).
    Logistic { alpha: f64 },
    /// Hüsler–Reiss with a variogram over the column's signature
    /// (0×0 for singleton signatures).
    HueslerReiss { variogram: VariogramMatrix },
}

impl FactorFamily {
    pub fn logistic(alpha: f64) -> Self {
        FactorFamily::Logistic { alpha }
    }

    pub fn huesler_reiss(variogram: VariogramMatrix) -> Self {
        FactorFamily::HueslerReiss { variogram }
    }
}

/// Mixing masses over columns: strictly positive, summing to 1.
/// The mass vector changes the U-generator, never the mgp law.
#[derive(Clone, Debug, PartialEq)]
pub struct MassVector {
    masses: Vec<f64>,
}

impl MassVector {
    pub fn uniform(r: usize) -> Self {
        MassVector { masses: vec![1.0 / r as f64; r] }
    }

    pub fn new(masses: Vec<f64>) -> Result<Self, ValidationError> {
        if masses.iter().any(|&m| m.is_nan() || m <= 0.0 || m > 1.0) {
            return Err(ValidationError::BadMass { reason: "mass outside (0, 1]" });
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_ATOL {
            return Err(ValidationError::BadMass { reason: "masses do not sum to 1" });
        }
        Ok(MassVector { masses })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.masses
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.masses[k]
    }
}

/// Non-fatal findings reported by validation.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelWarning {
    /// Several columns share the same signature. The model is valid
    /// (an equivalent deduplicated model exists) but merging the columns
    /// is nontrivial, so they are kept as given.
    DuplicateSignatures { columns: Vec<usize>, signature: Signature },
}

impl fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelWarning::DuplicateSignatures { columns, signature } => {
                write!(f, "columns ")?;
                for (i, k) in columns.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", k + 1)?;
                }
                write!(f, " share signature {signature}")
            }
        }
    }
}

/// Validated mixture model with all derived quantities precomputed:
/// signatures, face weights, and the normalizing constant `ell(1)`.
/// Immutable after construction and safe to share across threads.
#[derive(Clone, Debug)]
pub struct MixtureModel {
    matrix: CoefficientMatrix,
    families: Vec<FactorFamily>,
    masses: MassVector,
    signatures: Vec<Signature>,
    weights: FaceWeights,
    ell_one: f64,
    mvn_tol: f64,
    warnings: Vec<ModelWarning>,
}

impl MixtureModel {
    /// Validates raw inputs and derives signatures, face weights and
    /// `ell(1)`. `masses` defaults to uniform. Duplicate signatures are
    /// permitted and surface in [`MixtureModel::warnings`].
    pub fn validate(
        rows: &[Vec<f64>],
        families: Vec<FactorFamily>,
        masses: Option<Vec<f64>>,
    ) -> Result<Self, ValidationError> {
        Self::validate_with(rows, families, masses, MVN_TOL_DEFAULT)
    }

    /// [`MixtureModel::validate`] with an explicit MVN CDF tolerance used
    /// for Hüsler–Reiss face-weight computation.
    pub fn validate_with(
        rows: &[Vec<f64>],
        families: Vec<FactorFamily>,
        masses: Option<Vec<f64>>,
        mvn_tol: f64,
    ) -> Result<Self, ValidationError> {
        let matrix = CoefficientMatrix::validate(rows)?;
        let (d, r) = (matrix.d, matrix.r);
        if families.len() != r {
            return Err(ValidationError::ShapeMismatch {
                expected: r,
                found: families.len(),
                what: "families",
            });
        }

        let signatures: Vec<Signature> = (0..r)
            .map(|k| {
                let members: Vec<usize> = (0..d).filter(|&j| matrix.get(j, k) > 0.0).collect();
                Signature { members }
            })
            .collect();

        let mut families = families;
        for (k, family) in families.iter_mut().enumerate() {
            let card = signatures[k].len();
            match family {
                FactorFamily::Logistic { alpha } => {
                    if !alpha.is_finite() || *alpha <= 0.0 || *alpha >= 1.0 {
                        return Err(ValidationError::BadAlpha { column: k, alpha: *alpha });
                    }
                }
                FactorFamily::HueslerReiss { variogram } => {
                    if card == 1 {
                        // canonical singleton form is the empty variogram
                        if variogram.dim() > 1 {
                            return Err(ValidationError::BadVariogram {
                                column: k,
                                reason: "dimension exceeds singleton signature",
                            });
                        }
                        *variogram = VariogramMatrix::empty();
                    } else if variogram.dim() != card {
                        return Err(ValidationError::BadVariogram {
                            column: k,
                            reason: "dimension does not match the signature",
                        });
                    }
                }
            }
        }

        let masses = match masses {
            Some(m) => {
                if m.len() != r {
                    return Err(ValidationError::ShapeMismatch {
                        expected: r,
                        found: m.len(),
                        what: "masses",
                    });
                }
                MassVector::new(m)?
            }
            None => MassVector::uniform(r),
        };

        let (weights, ell_one) =
            stdf::compute_face_weights(&matrix, &signatures, &families, mvn_tol)
                .map_err(|e| ValidationError::BadVariogram {
                    column: usize::MAX,
                    reason: match e {
                        crate::error::EvalError::Linalg(
                            crate::error::LinalgError::NotPositiveDefinite,
                        ) => "anchored covariance not positive definite",
                        crate::error::EvalError::Linalg(
                            crate::error::LinalgError::ToleranceNotReached { .. },
                        ) => "MVN CDF tolerance not reached while computing weights",
                        _ => "face-weight computation failed",
                    },
                })?;

        let mut warnings = Vec::new();
        let mut seen: Vec<(usize, &Signature)> = Vec::new();
        let mut grouped: BTreeSet<usize> = BTreeSet::new();
        for (k, sig) in signatures.iter().enumerate() {
            if grouped.contains(&k) {
                continue;
            }
            let dups: Vec<usize> = signatures
                .iter()
                .enumerate()
                .filter(|(k2, s2)| *k2 > k && *s2 == sig)
                .map(|(k2, _)| k2)
                .collect();
            if !dups.is_empty() {
                let mut columns = vec![k];
                columns.extend(&dups);
                grouped.extend(&dups);
                warnings.push(ModelWarning::DuplicateSignatures {
                    columns,
                    signature: sig.clone(),
                });
            }
            seen.push((k, sig));
        }

        Ok(MixtureModel {
            matrix,
            families,
            masses,
            signatures,
            weights,
            ell_one,
            mvn_tol,
            warnings,
        })
    }

    pub fn d(&self) -> usize {
        self.matrix.d
    }

    pub fn r(&self) -> usize {
        self.matrix.r
    }

    pub fn matrix(&self) -> &CoefficientMatrix {
        &self.matrix
    }

    pub fn families(&self) -> &[FactorFamily] {
        &self.families
    }

    pub fn masses(&self) -> &MassVector {
        &self.masses
    }

    /// Column signatures, in column order, duplicates preserved.
    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    /// Face weights `w_k`, one per column.
    pub fn face_weights(&self) -> &FaceWeights {
        &self.weights
    }

    /// The normalizing constant `ell(1) = E[e^{max U}]`.
    pub fn ell_one(&self) -> f64 {
        self.ell_one
    }

    pub fn mvn_tol(&self) -> f64 {
        self.mvn_tol
    }

    pub fn warnings(&self) -> &[ModelWarning] {
        &self.warnings
    }

    /// Deduplicated extreme directions `{J_k : k}`.
    pub fn extreme_directions(&self) -> Vec<Signature> {
        let set: BTreeSet<&Signature> = self.signatures.iter().collect();
        set.into_iter().cloned().collect()
    }

    /// Whether the tail dependence coefficient `χ_J` is positive: true
    /// iff `J` is a subset of some extreme direction.
    pub fn chi_positive(&self, j_set: &Signature) -> bool {
        self.signatures.iter().any(|sig| j_set.is_subset_of(sig))
    }
}
