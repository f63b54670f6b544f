//! Named cones and the JSON cone-spec format.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::realization::ConeRealization;
use super::vsystem::VSystem;
use crate::error::{Error, Result};

/// Built-in realizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `Sym(r, ℝ)`: all `n_i = 1`, every `V_lk = ℝ`.
    Sym(usize),
    /// `n = (2, 1, 1)`, `V_21 = ℝ(1 0)`, `V_31 = ℝ(0 1)`, `V_32 = 0`.
    Vinberg,
    /// `n = (1, 1, 1)`, `V_21 = 0`, `V_31 = V_32 = ℝ`.
    DualVinberg,
    /// Lorentz cone of dimension `m + 2`: `n = (m, 1)`, `V_21 = Mat(1, m)`.
    Lorentz(usize),
    /// 2×2 Hermitian matrices over ℂ, realized as the Lorentz cone with `m = 2`.
    Herm2C,
}

impl Preset {
    /// Parses `sym(3)`, `vinberg`, `dual_vinberg`, `lorentz(2)`, `herm2c`.
    pub fn parse(name: &str) -> Result<Self> {
        let s: String = name.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let arg = |prefix: &str| -> Option<usize> {
            let rest = s.strip_prefix(prefix)?;
            let inner = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).unwrap_or(rest);
            inner.parse().ok()
        };
        let preset = if s == "vinberg" {
            Preset::Vinberg
        } else if s == "dual_vinberg" || s == "dualvinberg" {
            Preset::DualVinberg
        } else if s == "herm2c" {
            Preset::Herm2C
        } else if let Some(r) = arg("sym") {
            Preset::Sym(r)
        } else if let Some(m) = arg("lorentz") {
            Preset::Lorentz(m)
        } else {
            return Err(Error::UnknownPreset(name.to_string()));
        };
        match preset {
            Preset::Sym(0) | Preset::Lorentz(0) => Err(Error::UnknownPreset(name.to_string())),
            p => Ok(p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Preset::Sym(r) => format!("sym({r})"),
            Preset::Vinberg => "vinberg".into(),
            Preset::DualVinberg => "dual_vinberg".into(),
            Preset::Lorentz(m) => format!("lorentz({m})"),
            Preset::Herm2C => "herm2c".into(),
        }
    }

    pub fn vsystem(&self) -> Result<VSystem> {
        let mut blocks = BTreeMap::new();
        let partition = match *self {
            Preset::Sym(r) => {
                for l in 0..r {
                    for k in 0..l {
                        blocks.insert((l, k), vec![DMatrix::from_element(1, 1, 1.0)]);
                    }
                }
                vec![1; r]
            }
            Preset::Vinberg => {
                blocks.insert((1, 0), vec![DMatrix::from_row_slice(1, 2, &[1.0, 0.0])]);
                blocks.insert((2, 0), vec![DMatrix::from_row_slice(1, 2, &[0.0, 1.0])]);
                vec![2, 1, 1]
            }
            Preset::DualVinberg => {
                blocks.insert((2, 0), vec![DMatrix::from_element(1, 1, 1.0)]);
                blocks.insert((2, 1), vec![DMatrix::from_element(1, 1, 1.0)]);
                vec![1, 1, 1]
            }
            Preset::Lorentz(_) | Preset::Herm2C => {
                let m = if let Preset::Lorentz(m) = *self { m } else { 2 };
                let basis = (0..m)
                    .map(|j| DMatrix::from_fn(1, m, |_, c| if c == j { 1.0 } else { 0.0 }))
                    .collect();
                blocks.insert((1, 0), basis);
                vec![m, 1]
            }
        };
        VSystem::new(partition, blocks)
    }

    pub fn build(&self) -> Result<Arc<ConeRealization>> {
        ConeRealization::named(self.label(), self.vsystem()?)
    }
}

/// Shorthand for `Preset::parse(name)?.build()`.
pub fn preset(name: &str) -> Result<Arc<ConeRealization>> {
    Preset::parse(name)?.build()
}

/// JSON cone spec. Block indices `l`, `k` are 1-based; absent blocks are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub partition: Vec<usize>,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockSpec {
    pub l: usize,
    pub k: usize,
    /// Each basis element is either a list of rows or a flat row-major list.
    pub basis: Vec<serde_json::Value>,
}

fn parse_matrix(v: &serde_json::Value, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let bad = || Error::SpecParse(format!("expected a {rows}×{cols} matrix, found {v}"));
    let arr = v.as_array().ok_or_else(bad)?;
    let mut flat = Vec::with_capacity(rows * cols);
    if arr.iter().all(|x| x.is_array()) {
        if arr.len() != rows {
            return Err(bad());
        }
        for row in arr {
            let row = row.as_array().ok_or_else(bad)?;
            if row.len() != cols {
                return Err(bad());
            }
            for x in row {
                flat.push(x.as_f64().ok_or_else(bad)?);
            }
        }
    } else {
        for x in arr {
            flat.push(x.as_f64().ok_or_else(bad)?);
        }
        if flat.len() != rows * cols {
            return Err(bad());
        }
    }
    Ok(DMatrix::from_row_slice(rows, cols, &flat))
}

impl ConeSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpecParse(e.to_string()))
    }

    pub fn vsystem(&self) -> Result<VSystem> {
        let n = &self.partition;
        let mut blocks = BTreeMap::new();
        for b in &self.blocks {
            if b.l < 1 || b.k < 1 || b.l > n.len() || b.k >= b.l {
                return Err(Error::SpecParse(format!("invalid block indices ({}, {})", b.l, b.k)));
            }
            let (l, k) = (b.l - 1, b.k - 1);
            let basis = b
                .basis
                .iter()
                .map(|m| parse_matrix(m, n[l], n[k]))
                .collect::<Result<Vec<_>>>()?;
            if blocks.insert((l, k), basis).is_some() {
                return Err(Error::SpecParse(format!("block ({}, {}) given twice", b.l, b.k)));
            }
        }
        VSystem::new(n.clone(), blocks)
    }

    pub fn build(&self) -> Result<Arc<ConeRealization>> {
        ConeRealization::named(self.name.clone().unwrap_or_else(|| "custom".into()), self.vsystem()?)
    }

    /// The spec of an existing realization.
    pub fn of(cone: &ConeRealization) -> Self {
        let vs = cone.vsystem();
        let blocks = cone
            .slots()
            .iter()
            .filter(|s| s.len > 0)
            .map(|s| BlockSpec {
                l: s.l + 1,
                k: s.k + 1,
                basis: vs
                    .basis(s.l, s.k)
                    .iter()
                    .map(|m| {
                        let rows: Vec<Vec<f64>> =
                            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
                        serde_json::json!(rows)
                    })
                    .collect(),
            })
            .collect();
        Self { name: Some(cone.name().to_string()), partition: cone.partition().to_vec(), blocks }
    }
}

/// Resolves a preset name or a path to a JSON cone spec.
pub fn load_cone(spec: &str) -> Result<Arc<ConeRealization>> {
    match Preset::parse(spec) {
        Ok(p) => p.build(),
        Err(unknown) => {
            let path = Path::new(spec);
            if path.exists() {
                ConeSpec::from_json(&std::fs::read_to_string(path)?)?.build()
            } else {
                Err(unknown)
            }
        }
    }
}

/// As [`load_cone`], but returns the unvalidated V-system with its label.
pub fn load_vsystem(spec: &str) -> Result<(String, VSystem)> {
    match Preset::parse(spec) {
        Ok(p) => Ok((p.label(), p.vsystem()?)),
        Err(unknown) => {
            let path = Path::new(spec);
            if path.exists() {
                let parsed = ConeSpec::from_json(&std::fs::read_to_string(path)?)?;
                Ok((parsed.name.clone().unwrap_or_else(|| "custom".into()), parsed.vsystem()?))
            } else {
                Err(unknown)
            }
        }
    }
}
