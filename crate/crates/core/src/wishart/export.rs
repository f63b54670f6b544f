use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sampling::SampleBatch;
use crate::error::Result;

/// JSON sidecar written next to a CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub cone: String,
    pub weights: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    pub epsilon: Option<Vec<u8>>,
    pub seed: u64,
    pub count: usize,
}

impl SampleBatch {
    pub fn sidecar(&self) -> Sidecar {
        let i = &self.info;
        Sidecar {
            cone: i.cone.clone(),
            weights: i.weights.clone(),
            theta: i.theta.clone(),
            sigma: i.sigma.clone(),
            epsilon: i.epsilon.clone(),
            seed: i.seed,
            count: i.count,
        }
    }

    /// One row per draw, columns in structured-coordinate order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.info.names)?;
        for y in &self.draws {
            w.write_record(y.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `path` and `path` with extension `.json`; returns the sidecar path.
    pub fn export(&self, path: &Path) -> Result<PathBuf> {
        self.write_csv(BufWriter::new(File::create(path)?))?;
        let side = sidecar_path(path);
        let mut f = BufWriter::new(File::create(&side)?);
        serde_json::to_writer_pretty(&mut f, &self.sidecar())?;
        writeln!(f)?;
        f.flush()?;
        Ok(side)
    }
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}
