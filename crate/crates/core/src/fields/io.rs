use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::domain::GridDomain;
use super::weights::MatrixWeightField;
use crate::error::{MwlError, Result};
use crate::linalg::{eig_hermitian, GeneralMatrix, HermitianMatrix, C64};

pub const MWF_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MwfFile {
    version: u32,
    domain: GridDomain,
    n: usize,
    data: Vec<Vec<[f64; 2]>>,
}

/// Serializes a weight field as `.mwf.json` (row-major `[re, im]` pairs per point).
pub fn to_mwf_string(w: &MatrixWeightField) -> Result<String> {
    let file = MwfFile {
        version: MWF_VERSION,
        domain: *w.domain(),
        n: w.dim(),
        data: w
            .values()
            .iter()
            .map(|m| m.data().iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

/// Parses `.mwf.json`, symmetrizing each matrix; the first non-PD point is reported by index.
pub fn from_mwf_str(text: &str) -> Result<MatrixWeightField> {
    let file: MwfFile = serde_json::from_str(text)?;
    if file.version != MWF_VERSION {
        return Err(MwlError::Format(format!(
            "unsupported mwf version {}",
            file.version
        )));
    }
    if file.domain.d != 1 {
        return Err(MwlError::Unsupported(format!(
            "spatial dimension {}",
            file.domain.d
        )));
    }
    let domain = GridDomain::new(file.domain.points, file.domain.length)?;
    if file.data.len() != domain.len() {
        return Err(MwlError::Format(format!(
            "expected {} grid points, found {}",
            domain.len(),
            file.data.len()
        )));
    }
    let n = file.n;
    let mut values = Vec::with_capacity(domain.len());
    for (index, entries) in file.data.into_iter().enumerate() {
        if entries.len() != n * n {
            return Err(MwlError::Format(format!(
                "point {index}: expected {} entries, found {}",
                n * n,
                entries.len()
            )));
        }
        let m = GeneralMatrix::from_data(
            n,
            entries
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        )?;
        let h = HermitianMatrix::new(m);
        let e = eig_hermitian(&h)?;
        if !(e.min_value() > 0.0) {
            return Err(MwlError::NotPositiveDefinite {
                index,
                min_eigenvalue: e.min_value(),
            });
        }
        values.push(h);
    }
    MatrixWeightField::new(domain, values)
}

pub fn write_mwf(path: impl AsRef<Path>, w: &MatrixWeightField) -> Result<()> {
    fs::write(path, to_mwf_string(w)?)?;
    Ok(())
}

pub fn read_mwf(path: impl AsRef<Path>) -> Result<MatrixWeightField> {
    from_mwf_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{gen_commuting_pair, SpectralProfile};

    #[test]
    fn round_trip_through_file() {
        let d = GridDomain::unit(16).unwrap();
        let (w, _) =
            gen_commuting_pair(1, 2, d, SpectralProfile::Rough { log_spread: 1.0 }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.mwf.json");
        write_mwf(&path, &w).unwrap();
        let back = read_mwf(&path).unwrap();
        assert_eq!(back.values(), w.values());
    }

    #[test]
    fn identity_file_layout() {
        let d = GridDomain::unit(16).unwrap();
        let s = to_mwf_string(&MatrixWeightField::identity(d, 2)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["domain"]["N"], 16);
        assert_eq!(v["domain"]["d"], 1);
        assert_eq!(v["n"], 2);
        assert_eq!(
            v["data"][3],
            serde_json::json!([[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
        );
    }

    #[test]
    fn loader_symmetrizes_and_rejects_indefinite_points() {
        let point = |a: f64| format!("[[{a},0],[1,0.5],[1,-0.5],[2,0]]");
        let mut pts: Vec<String> = (0..16).map(|_| point(3.0)).collect();
        let text = format!(
            r#"{{"version":1,"domain":{{"d":1,"N":16,"length":1.0}},"n":2,"data":[{}]}}"#,
            pts.join(",")
        );
        let w = from_mwf_str(&text).unwrap();
        assert!(w.value(0).is_hermitian(0.0));
        assert_eq!(w.value(0)[(0, 1)], C64::new(1.0, 0.5));
        pts[5] = point(-1.0);
        let text = format!(
            r#"{{"version":1,"domain":{{"d":1,"N":16,"length":1.0}},"n":2,"data":[{}]}}"#,
            pts.join(",")
        );
        assert!(matches!(
            from_mwf_str(&text),
            Err(MwlError::NotPositiveDefinite { index: 5, .. })
        ));
    }

    #[test]
    fn loader_rejects_bad_version_and_shape() {
        let text = r#"{"version":2,"domain":{"d":1,"N":16,"length":1.0},"n":1,"data":[]}"#;
        assert!(matches!(from_mwf_str(text), Err(MwlError::Format(_))));
        let text = r#"{"version":1,"domain":{"d":1,"N":16,"length":1.0},"n":1,"data":[[[1,0]]]}"#;
        assert!(matches!(from_mwf_str(text), Err(MwlError::Format(_))));
    }
}
