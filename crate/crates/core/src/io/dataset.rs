use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::axioms::AxiomId;
use crate::expr::Statement;
use crate::kernel::{ProofStep, Theorem, TheoremMeta};

pub const FORMAT_VERSION: u32 = 1;

/// One theorem per JSON line. `initial_condition` repeats the reflexive
/// scaffolding premise so consumers can drop it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub v: u32,
    pub id: String,
    pub goal: Statement,
    pub premises: Vec<Statement>,
    #[serde(default)]
    pub initial_condition: Option<Statement>,
    pub proof: Vec<ProofStep>,
    pub k: usize,
    pub l: usize,
    pub degree: usize,
    pub axiom_order: Vec<AxiomId>,
    pub seed: u64,
}

impl DatasetRecord {
    pub fn from_theorem(t: &Theorem) -> Self {
        let mut r = DatasetRecord {
            v: FORMAT_VERSION,
            id: String::new(),
            goal: t.goal.clone(),
            premises: t.premises.clone(),
            initial_condition: t.meta.initial_condition.clone(),
            proof: t.proof.clone().unwrap_or_default(),
            k: t.meta.k,
            l: t.meta.l,
            degree: t.meta.degree,
            axiom_order: t.meta.axiom_order.clone(),
            seed: t.meta.seed,
        };
        r.id = r.content_hash();
        r
    }

    /// First 16 hex digits of the SHA-256 of the record serialized with an
    /// empty id.
    pub fn content_hash(&self) -> String {
        let blank = DatasetRecord { id: String::new(), ..self.clone() };
        let bytes = serde_json::to_vec(&blank).expect("records always serialize");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }

    pub fn to_theorem(&self) -> Theorem {
        Theorem {
            goal: self.goal.clone(),
            premises: self.premises.clone(),
            proof: Some(self.proof.clone()),
            meta: TheoremMeta {
                k: self.k,
                l: self.l,
                degree: self.degree,
                axiom_order: self.axiom_order.clone(),
                seed: self.seed,
                initial_condition: self.initial_condition.clone(),
            },
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Writes one record per line (LF-terminated) and returns the count.
pub fn write_jsonl<W: Write>(mut w: W, records: &[DatasetRecord]) -> io::Result<usize> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(records.len())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<DatasetRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DatasetRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::Parse { line: i + 1, message: e.to_string() })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn emit_dataset(theorems: &[Theorem], path: &Path) -> Result<usize, DatasetError> {
    let records: Vec<DatasetRecord> = theorems.iter().map(DatasetRecord::from_theorem).collect();
    Ok(write_jsonl(BufWriter::new(File::create(path)?), &records)?)
}

pub fn load_dataset(path: &Path) -> Result<Vec<DatasetRecord>, DatasetError> {
    read_jsonl(BufReader::new(File::open(path)?))
}
