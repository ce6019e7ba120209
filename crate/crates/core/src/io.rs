//! JSON and CSV formats for models, reduction maps and reduced models.
//!
//! Complex numbers are written as `[re, im]` pairs and matrices as lists of
//! rows. JSON floats use the shortest representation that round-trips; CSV
//! floats are written with 17 significant digits.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, StateVector};
use crate::model::{HamiltonianModel, PauliSum};
use crate::pauli::BinaryPauli;
use crate::reduction::{MapSource, ReductionMap};

pub fn complex_to_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|&z| complex_to_pair(z)).collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if let Some(r) = rows.iter().find(|r| r.len() != nc) {
        return Err(Error::DimensionMismatch { expected: nc, got: r.len() });
    }
    Ok(DMatrix::from_fn(nr, nc, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_to_pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_to_pair(z)).collect()
}

pub fn pairs_to_vector(p: &[[f64; 2]]) -> StateVector {
    DVector::from_iterator(p.len(), p.iter().map(|[re, im]| C64::new(*re, *im)))
}

pub mod complex_vector {
    use super::*;

    pub fn serialize<S: serde::Serializer>(v: &StateVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        vector_to_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<StateVector, D::Error> {
        Ok(pairs_to_vector(&Vec::<[f64; 2]>::deserialize(d)?))
    }
}

pub mod complex_matrix {
    use super::*;

    pub fn serialize<S: serde::Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        rows_to_matrix(&rows).map_err(serde::de::Error::custom)
    }
}

pub mod opt_complex_matrix {
    use super::*;

    pub fn serialize<S: serde::Serializer>(m: &Option<ComplexMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.as_ref().map(matrix_to_rows).serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<ComplexMatrix>, D::Error> {
        Option::<Vec<Vec<[f64; 2]>>>::deserialize(d)?
            .map(|rows| rows_to_matrix(&rows).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub mod complex_matrices {
    use super::*;

    pub fn serialize<S: serde::Serializer>(ms: &[ComplexMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        ms.iter().map(matrix_to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<ComplexMatrix>, D::Error> {
        Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?
            .iter()
            .map(|rows| rows_to_matrix(rows).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTermJson {
    pub coeff: f64,
    pub pauli: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamTermJson {
    pub label: String,
    pub paulis: Vec<PauliTermJson>,
}

/// On-disk model: `{"n", "h0": [{coeff, pauli}], "terms": [{label, paulis}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub n: usize,
    #[serde(default)]
    pub h0: Vec<PauliTermJson>,
    pub terms: Vec<ParamTermJson>,
}

fn sum_to_json(s: &PauliSum) -> Vec<PauliTermJson> {
    s.terms().iter().map(|(c, p)| PauliTermJson { coeff: *c, pauli: p.label() }).collect()
}

fn sum_from_json(n: usize, terms: &[PauliTermJson]) -> Result<PauliSum> {
    let parsed = terms
        .iter()
        .map(|t| {
            let p: BinaryPauli = t.pauli.parse()?;
            if p.n() != n {
                return Err(Error::SpinMismatch { left: n, right: p.n() });
            }
            Ok((t.coeff, p))
        })
        .collect::<Result<Vec<_>>>()?;
    PauliSum::new(n, parsed)
}

impl ModelJson {
    pub fn from_model(model: &HamiltonianModel) -> Result<Self> {
        let n = model.n().ok_or_else(|| Error::InvalidModel("only Pauli-sum models can be written".into()))?;
        let h0 = model.h0().and_then(|o| o.as_pauli()).map(sum_to_json).unwrap_or_default();
        let terms = model
            .terms()
            .iter()
            .zip(model.labels())
            .map(|(t, l)| ParamTermJson { label: l.clone(), paulis: sum_to_json(t.as_pauli().expect("Pauli model")) })
            .collect();
        Ok(ModelJson { n, h0, terms })
    }

    pub fn to_model(&self) -> Result<HamiltonianModel> {
        let h0 = if self.h0.is_empty() { None } else { Some(sum_from_json(self.n, &self.h0)?) };
        let terms = self
            .terms
            .iter()
            .map(|t| Ok((t.label.clone(), sum_from_json(self.n, &t.paulis)?)))
            .collect::<Result<Vec<_>>>()?;
        HamiltonianModel::from_pauli(self.n, h0, terms)
    }
}

pub fn read_model(path: &Path) -> Result<HamiltonianModel> {
    let text = fs::read_to_string(path)?;
    let spec: ModelJson = serde_json::from_str(&text)?;
    spec.to_model()
}

pub fn write_model(path: &Path, model: &HamiltonianModel) -> Result<()> {
    let json = serde_json::to_string_pretty(&ModelJson::from_model(model)?)?;
    fs::write(path, json + "\n")?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionMapJson {
    pub d: usize,
    pub r: usize,
    pub source: MapSource,
    pub selected: Vec<usize>,
    pub phi: Vec<Vec<[f64; 2]>>,
}

impl ReductionMapJson {
    pub fn from_map(map: &ReductionMap) -> Self {
        ReductionMapJson {
            d: map.d(),
            r: map.r(),
            source: map.source,
            selected: map.selected.clone(),
            phi: matrix_to_rows(&map.phi),
        }
    }

    pub fn to_map(&self) -> Result<ReductionMap> {
        let phi = rows_to_matrix(&self.phi)?;
        if phi.shape() != (self.d, self.r) {
            return Err(Error::DimensionMismatch { expected: self.d * self.r, got: phi.len() });
        }
        Ok(ReductionMap::new(phi, self.source, self.selected.clone()))
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `Φ` as CSV: one row per basis state, columns `re_j,im_j` per column of `Φ`.
pub fn write_phi_csv<W: Write>(out: W, map: &ReductionMap) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..map.r()).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
    w.write_record(&header).map_err(csv_err)?;
    for row in map.phi.row_iter() {
        let rec: Vec<String> = row.iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]).collect();
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{collective_with_z_field, random_tfim_open, tfim_periodic};
    use crate::reduction::ReducedModel;

    #[test]
    fn model_round_trip() {
        for m in [tfim_periodic(3).unwrap(), random_tfim_open(4).unwrap(), collective_with_z_field(2).unwrap()] {
            let text = serde_json::to_string(&ModelJson::from_model(&m).unwrap()).unwrap();
            let back: ModelJson = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_model().unwrap(), m);
        }
    }

    #[test]
    fn parses_documented_schema() {
        let text = r#"{"n": 2, "h0": [{"coeff": 1.0, "pauli": "ZI"}],
                       "terms": [{"label": "g", "paulis": [{"coeff": 0.5, "pauli": "XX"}]}]}"#;
        let m: ModelJson = serde_json::from_str(text).unwrap();
        let model = m.to_model().unwrap();
        assert_eq!(model.num_params(), 1);
        assert_eq!(model.labels(), &["g".to_string()]);
        let bad = r#"{"n": 2, "terms": [{"label": "g", "paulis": [{"coeff": 1.0, "pauli": "XQ"}]}]}"#;
        assert!(serde_json::from_str::<ModelJson>(bad).unwrap().to_model().is_err());
    }

    #[test]
    fn map_and_reduced_model_round_trip() {
        let phi = DMatrix::from_fn(4, 2, |i, j| C64::new(i as f64 * 0.1, j as f64 - 0.3));
        let map = ReductionMap::new(phi, MapSource::Burnside, vec![0, 3]);
        let j = ReductionMapJson::from_map(&map);
        let back: ReductionMapJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back.to_map().unwrap().phi, map.phi);
        let rm = ReducedModel {
            r: 2,
            labels: vec!["a".into()],
            h0: None,
            terms: vec![DMatrix::from_fn(2, 2, |i, j| C64::new((i + j) as f64 / 3.0, 0.0))],
            v0: DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
        };
        let text = serde_json::to_string(&rm).unwrap();
        assert_eq!(serde_json::from_str::<ReducedModel>(&text).unwrap(), rm);
        let mut buf = Vec::new();
        write_phi_csv(&mut buf, &map).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 5);
        assert!(s.starts_with("re_0,im_0,re_1,im_1"));
    }
}
