//! JSON file formats: codes, half-space descriptors, normalized entries,
//! spherical codes, intersection lattices, and kissing tables. Rationals
//! travel as strings (`"p/q"`, integers, or decimals) so nothing is lost.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::code::{Entry, HyperbolicCode, SphericalCode};
use crate::exact::parse_rational;
use crate::halfspace::HalfSpaceDescriptor;
use crate::lattice::GramLattice;
use crate::lorentz::LorentzVector;
use crate::{HcError, Result};

/// Serde adapter: `BigRational` as a rational string.
pub mod rational_string {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Serde adapter: `BigInt` as a decimal string.
pub mod bigint_string {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(|_| D::Error::custom("bad integer"))
    }
}

/// A vector record: `{"n": 3, "space": [...], "time": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFile {
    pub n: usize,
    pub space: Vec<f64>,
    pub time: f64,
}

impl VectorFile {
    pub fn to_vector(&self) -> Result<LorentzVector> {
        if self.space.len() != self.n {
            return Err(HcError::DimensionMismatch(self.n, self.space.len()));
        }
        Ok(LorentzVector::new(self.space.clone(), self.time))
    }

    pub fn from_vector(v: &LorentzVector) -> Self {
        VectorFile {
            n: v.dim(),
            space: v.space.clone(),
            time: v.time,
        }
    }
}

/// Finite value or the literal string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrInf<T> {
    Finite(T),
    Marker(String),
}

impl<T> OrInf<T> {
    fn finite(self, what: &str) -> Result<Option<T>> {
        match self {
            OrInf::Finite(v) => Ok(Some(v)),
            OrInf::Marker(s) if s == "inf" => Ok(None),
            OrInf::Marker(s) => Err(HcError::InvalidInput(format!(
                "{what}: expected a value or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// A half-space descriptor record; vertical planes use `"inf"` for both
/// center and radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DescriptorFile {
    pub center: OrInf<Vec<f64>>,
    pub radius: OrInf<f64>,
    pub delta: i8,
}

impl DescriptorFile {
    pub fn to_descriptor(&self) -> Result<HalfSpaceDescriptor> {
        if self.delta != 1 && self.delta != -1 {
            return Err(HcError::InvalidInput(format!(
                "delta must be +1 or -1, got {}",
                self.delta
            )));
        }
        match (
            self.center.clone().finite("center")?,
            self.radius.clone().finite("radius")?,
        ) {
            (Some(center), Some(radius)) => Ok(HalfSpaceDescriptor::Sphere {
                center,
                radius,
                delta: self.delta,
            }),
            (None, None) => Ok(HalfSpaceDescriptor::Vertical { delta: self.delta }),
            _ => Err(HcError::InvalidInput(
                "center and radius must both be finite or both \"inf\"".into(),
            )),
        }
    }

    pub fn from_descriptor(d: &HalfSpaceDescriptor) -> Self {
        match d {
            HalfSpaceDescriptor::Sphere {
                center,
                radius,
                delta,
            } => DescriptorFile {
                center: OrInf::Finite(center.clone()),
                radius: OrInf::Finite(*radius),
                delta: *delta,
            },
            HalfSpaceDescriptor::Vertical { delta } => DescriptorFile {
                center: OrInf::Marker("inf".into()),
                radius: OrInf::Marker("inf".into()),
                delta: *delta,
            },
        }
    }
}

/// A code file: vectors, optional witness, optional redundant descriptors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeFile {
    pub n: usize,
    pub vectors: Vec<VectorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<VectorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptors: Option<Vec<DescriptorFile>>,
}

impl CodeFile {
    pub fn to_code(&self) -> Result<HyperbolicCode> {
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for v in &self.vectors {
            let w = v.to_vector()?;
            if w.dim() != self.n {
                return Err(HcError::DimensionMismatch(self.n, w.dim()));
            }
            vectors.push(w);
        }
        let witness = self.witness.as_ref().map(|v| v.to_vector()).transpose()?;
        Ok(HyperbolicCode {
            n: self.n,
            vectors,
            witness,
        })
    }

    /// Build a code from descriptor records when no vectors are given.
    pub fn descriptors_to_code(&self) -> Result<Option<HyperbolicCode>> {
        let Some(descs) = &self.descriptors else {
            return Ok(None);
        };
        if !self.vectors.is_empty() {
            return Ok(None);
        }
        let mut vectors = Vec::with_capacity(descs.len());
        for d in descs {
            vectors.push(crate::halfspace::vector_from_descriptor(
                &d.to_descriptor()?,
            )?);
        }
        Ok(Some(HyperbolicCode {
            n: self.n,
            vectors,
            witness: self.witness.as_ref().map(|v| v.to_vector()).transpose()?,
        }))
    }
}

/// Normalized entries file: `{"entries": [{"z": [...], "d": ...}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntriesFile {
    pub entries: Vec<Entry>,
}

/// Spherical code file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphericalFile {
    pub points: Vec<Vec<f64>>,
    pub phi: f64,
    #[serde(default)]
    pub tau: Option<f64>,
}

impl SphericalFile {
    pub fn to_code(&self) -> SphericalCode {
        SphericalCode {
            points: self.points.clone(),
            min_angle: self.phi,
            max_angle: self.tau.unwrap_or(std::f64::consts::PI),
        }
    }
}

/// Lattice file: rationals as strings, classes and ample as integers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeFile {
    pub rho: usize,
    pub gram: Vec<Vec<String>>,
    pub classes: Vec<Vec<i64>>,
    pub ample: Vec<i64>,
}

impl LatticeFile {
    pub fn to_lattice(&self) -> Result<GramLattice> {
        let gram = self
            .gram
            .iter()
            .map(|row| row.iter().map(|s| parse_rational(s)).collect())
            .collect::<Result<Vec<Vec<BigRational>>>>()?;
        Ok(GramLattice {
            rho: self.rho,
            gram,
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            ample: self.ample.iter().map(|&x| BigInt::from(x)).collect(),
        })
    }
}

/// Kissing table file: a list of rows.
pub type KissingTableFile = Vec<crate::bounds::KissingTableEntry>;

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        HcError::InvalidInput(format!("cannot read {}: {e}", path.display()))
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, raw: &str) -> Result<T> {
    serde_json::from_str(raw).map_err(|e| {
        HcError::InvalidInput(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn load_code(path: &Path) -> Result<HyperbolicCode> {
    let file: CodeFile = parse_json(path, &read_to_string(path)?)?;
    if let Some(code) = file.descriptors_to_code()? {
        return Ok(code);
    }
    file.to_code()
}

pub fn load_entries(path: &Path) -> Result<Vec<Entry>> {
    let file: EntriesFile = parse_json(path, &read_to_string(path)?)?;
    Ok(file.entries)
}

pub fn load_spherical(path: &Path) -> Result<SphericalCode> {
    let file: SphericalFile = parse_json(path, &read_to_string(path)?)?;
    Ok(file.to_code())
}

pub fn load_lattice(path: &Path) -> Result<GramLattice> {
    let file: LatticeFile = parse_json(path, &read_to_string(path)?)?;
    file.to_lattice()
}

pub fn load_kissing_table(path: &Path) -> Result<KissingTableFile> {
    parse_json(path, &read_to_string(path)?)
}
