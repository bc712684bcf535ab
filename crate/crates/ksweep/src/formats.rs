//! JSON file formats and resolution of command-line map and state sources.
//!
//! Matrices use `{"rows": r, "cols": c, "data": [[re, im], …]}` with `data`
//! in row-major order. A map file is either
//!
//! ```json
//! {"n": 3, "kind": "basis-images", "images": [matrix, …]}
//! {"n": 3, "kind": "choi", "choi": matrix}
//! ```
//!
//! where `images[i·n + j]` is the image of the matrix unit `E_ij` and the
//! Choi matrix is `Σ E_ij ⊗ S(E_ij)` (block `(i, j)` holds `S(E_ij)`).
//! States and witnesses are matrices with an extra `"dims": [d₁, d₂]` field.

use std::fs;
use std::path::Path;

use ksweep_core::stable::{compute_stable_subspace, HSSubspace};
use ksweep_core::witness::{ppt_entangled_state, DensityMatrix};
use ksweep_core::zoo::MapSpec;
use ksweep_core::{ComplexMatrix, SuperOperator};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapBody {
    BasisImages { images: Vec<ComplexMatrix> },
    Choi { choi: ComplexMatrix },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub n: usize,
    #[serde(flatten)]
    pub body: MapBody,
}

impl MapFile {
    pub fn basis_images(s: &SuperOperator) -> Self {
        let n = s.n();
        let images = (0..n * n).map(|idx| s.image(idx / n, idx % n)).collect();
        Self { n, body: MapBody::BasisImages { images } }
    }

    pub fn choi(s: &SuperOperator) -> Self {
        Self { n: s.n(), body: MapBody::Choi { choi: s.choi() } }
    }

    /// Builds the map, rejecting wrong shapes and maps that do not preserve
    /// Hermiticity within `tol`.
    pub fn to_superoperator(&self, tol: f64) -> CliResult<SuperOperator> {
        let s = match &self.body {
            MapBody::BasisImages { images } => SuperOperator::from_basis_images(self.n, images),
            MapBody::Choi { choi } => SuperOperator::from_choi(self.n, choi),
        }
        .map_err(CliError::input)?;
        if !s.is_hermiticity_preserving(tol) {
            return Err(CliError::Input(format!(
                "map is not Hermiticity-preserving (defect {:e})",
                s.hermiticity_defect()
            )));
        }
        Ok(s)
    }
}

/// A bipartite density matrix or witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BipartiteFile {
    #[serde(flatten)]
    pub matrix: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<[usize; 2]>,
}

impl BipartiteFile {
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Self {
        Self { matrix, dims: Some([dims.0, dims.1]) }
    }

    /// Declared dims, or `(d, d)` when the side is a perfect square `d²`.
    pub fn dims(&self) -> CliResult<(usize, usize)> {
        let rows = self.matrix.rows();
        let (a, b) = match self.dims {
            Some([a, b]) => (a, b),
            None => {
                let d = (rows as f64).sqrt().round() as usize;
                (d, d)
            }
        };
        if a * b != rows || !self.matrix.is_square() {
            return Err(CliError::Input(format!(
                "dims {a}x{b} do not match a {}x{} matrix",
                rows,
                self.matrix.cols()
            )));
        }
        Ok((a, b))
    }
}

/// Subspace of `Mₙ` given by an HS-orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceFile {
    pub n: usize,
    pub basis: Vec<ComplexMatrix>,
}

impl From<&HSSubspace> for SubspaceFile {
    fn from(k: &HSSubspace) -> Self {
        Self { n: k.n(), basis: k.basis().to_vec() }
    }
}

impl SubspaceFile {
    pub fn to_subspace(&self, tol: f64) -> CliResult<HSSubspace> {
        HSSubspace::new(self.n, self.basis.clone(), tol).map_err(CliError::input)
    }
}

/// Named states accepted wherever a state file is.
pub const STATE_NAMES: [&str; 2] = ["ppt-entangled", "maximally-mixed"];

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Resolves a zoo name or a map file path.
pub fn load_map(source: &str, tol: f64) -> CliResult<SuperOperator> {
    if let Ok(spec) = source.parse::<MapSpec>() {
        return spec.build().map_err(CliError::numerical);
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::Input(format!(
            "'{source}' is neither a known map ({}, random:<components>:<seed>) nor a file",
            MapSpec::NAMES.join(", ")
        )));
    }
    parse::<MapFile>(path, &read(path)?)?.to_superoperator(tol)
}

/// Resolves a named state or a state file. `dim` sizes the maximally mixed
/// state.
pub fn load_state(source: &str, dim: usize, tol: f64) -> CliResult<(DensityMatrix, (usize, usize))> {
    match source {
        "ppt-entangled" | "paper-ppt" => return Ok((ppt_entangled_state(), (3, 3))),
        "maximally-mixed" => {
            let d = (dim as f64).sqrt().round() as usize;
            return Ok((DensityMatrix::maximally_mixed(dim), (d, dim / d.max(1))));
        }
        _ => {}
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(CliError::Input(format!(
            "'{source}' is neither a known state ({}) nor a file",
            STATE_NAMES.join(", ")
        )));
    }
    let file: BipartiteFile = parse(path, &read(path)?)?;
    let dims = file.dims()?;
    let rho = DensityMatrix::new(file.matrix, tol).map_err(CliError::input)?;
    Ok((rho, dims))
}

/// Stable subspace of a map source, as a subspace file.
pub fn stable_subspace_file(source: &str, tol: f64) -> CliResult<SubspaceFile> {
    let s = load_map(source, tol)?;
    let k = compute_stable_subspace(&s, tol).map_err(CliError::numerical)?;
    Ok(SubspaceFile::from(&k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ksweep_core::zoo::two_block_map;

    #[test]
    fn map_file_roundtrip() {
        let s = two_block_map();
        for file in [MapFile::basis_images(&s), MapFile::choi(&s)] {
            let json = serde_json::to_string(&file).unwrap();
            let back: MapFile = serde_json::from_str(&json).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.to_superoperator(1e-9).unwrap(), s);
        }
    }

    #[test]
    fn map_file_shape() {
        let json = serde_json::to_value(MapFile::choi(&two_block_map())).unwrap();
        assert_eq!(json["kind"], "choi");
        assert_eq!(json["n"], 3);
        assert_eq!(json["choi"]["rows"], 9);
        assert_eq!(json["choi"]["data"][0], serde_json::json!([0.5, 0.0]));
    }

    #[test]
    fn rejects_non_hermiticity_preserving() {
        let mut file = MapFile::basis_images(&SuperOperator::identity(2));
        if let MapBody::BasisImages { images } = &mut file.body {
            images[1] = images[1].scale(ksweep_core::C64::new(0.0, 1.0));
        }
        assert!(matches!(file.to_superoperator(1e-9), Err(CliError::Input(_))));
    }

    #[test]
    fn bipartite_dims() {
        let f = BipartiteFile { matrix: ComplexMatrix::identity(6), dims: Some([2, 3]) };
        assert_eq!(f.dims().unwrap(), (2, 3));
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<BipartiteFile>(&json).unwrap(), f);
        let bad = BipartiteFile { matrix: ComplexMatrix::identity(6), dims: Some([3, 3]) };
        assert!(bad.dims().is_err());
        let implicit = BipartiteFile { matrix: ComplexMatrix::identity(9), dims: None };
        assert_eq!(implicit.dims().unwrap(), (3, 3));
    }

    #[test]
    fn unknown_sources() {
        assert!(matches!(load_map("no-such-map", 1e-9), Err(CliError::Input(_))));
        assert!(matches!(load_state("no-such-state", 9, 1e-9), Err(CliError::Input(_))));
        assert_eq!(load_state("paper-ppt", 9, 1e-9).unwrap().1, (3, 3));
    }
}
