use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chain::ChainConfig;
use super::state::GlobalPriors;
use crate::densities::PriorFamily;
use crate::error::{Error, Result};

/// First eight bytes of every draw file.
pub const STORE_MAGIC: &[u8; 8] = b"HTHSDRW1";

/// Self-describing metadata written ahead of the draw columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreHeader {
    pub family: PriorFamily,
    pub n: usize,
    pub draws: usize,
    pub parameters: Vec<String>,
    pub seed: u64,
    pub config: ChainConfig,
    pub priors: GlobalPriors,
}

/// Retained draws in column-major order, one column per parameter.
///
/// On disk: the magic bytes, the header length as a little-endian `u64`, the
/// JSON header, then every column as consecutive little-endian `f64`s.
#[derive(Clone, Debug, PartialEq)]
pub struct DrawStore {
    header: StoreHeader,
    columns: Vec<Vec<f64>>,
}

impl DrawStore {
    pub(crate) fn new(header: StoreHeader, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() != header.parameters.len() {
            return Err(Error::Format(format!(
                "{} columns for {} parameter names",
                columns.len(),
                header.parameters.len()
            )));
        }
        if let Some(bad) = columns.iter().position(|c| c.len() != header.draws) {
            return Err(Error::Format(format!(
                "column {} holds {} draws, expected {}",
                header.parameters[bad],
                columns[bad].len(),
                header.draws
            )));
        }
        Ok(Self { header, columns })
    }

    pub fn header(&self) -> &StoreHeader {
        &self.header
    }

    pub fn draws(&self) -> usize {
        self.header.draws
    }

    pub fn parameters(&self) -> &[String] {
        &self.header.parameters
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.header.parameters.iter().map(String::as_str).zip(self.columns.iter().map(Vec::as_slice))
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header.parameters.iter().position(|p| p == name).map(|i| self.columns[i].as_slice())
    }

    pub fn phi(&self, i: usize) -> Option<&[f64]> {
        self.column(&format!("phi[{i}]"))
    }

    pub fn log_gamma(&self, i: usize) -> Option<&[f64]> {
        self.column(&format!("log_gamma[{i}]"))
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> Result<()> {
        let header = serde_json::to_vec(&self.header)?;
        writer.write_all(STORE_MAGIC)?;
        writer.write_all(&(header.len() as u64).to_le_bytes())?;
        writer.write_all(&header)?;
        for column in &self.columns {
            for v in column {
                writer.write_all(&v.to_le_bytes())?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut reader: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        reader.read_exact(&mut magic)?;
        if &magic != STORE_MAGIC {
            return Err(Error::Format("not a draw store (bad magic bytes)".into()));
        }
        let mut len = [0u8; 8];
        reader.read_exact(&mut len)?;
        let len = usize::try_from(u64::from_le_bytes(len))
            .map_err(|_| Error::Format("header length does not fit in memory".into()))?;
        let mut header = vec![0u8; len];
        reader.read_exact(&mut header)?;
        let header: StoreHeader = serde_json::from_slice(&header)?;
        let mut columns = Vec::with_capacity(header.parameters.len());
        let mut buf = vec![0u8; header.draws * 8];
        for _ in &header.parameters {
            reader.read_exact(&mut buf)?;
            columns.push(buf.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect());
        }
        let mut rest = Vec::new();
        reader.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes after draw columns", rest.len())));
        }
        Self::new(header, columns)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_to(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(BufReader::new(File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_store() -> DrawStore {
        let header = StoreHeader {
            family: PriorFamily::Hths,
            n: 1,
            draws: 3,
            parameters: vec!["mu".into(), "phi[0]".into()],
            seed: 42,
            config: ChainConfig::default(),
            priors: GlobalPriors::default(),
        };
        DrawStore::new(header, vec![vec![0.0, -1.5, 1e-300], vec![f64::MAX, 2.0, -0.0]]).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let store = sample_store();
        let mut bytes = Vec::new();
        store.write_to(&mut bytes).unwrap();
        assert_eq!(&bytes[..8], STORE_MAGIC);
        let back = DrawStore::read_from(bytes.as_slice()).unwrap();
        assert_eq!(back, store);
        assert_eq!(back.phi(0).unwrap()[0], f64::MAX);
        assert!(back.log_gamma(0).is_none());
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let store = sample_store();
        let mut bytes = Vec::new();
        store.write_to(&mut bytes).unwrap();
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(matches!(DrawStore::read_from(bad_magic.as_slice()), Err(Error::Format(_))));
        assert!(DrawStore::read_from(&bytes[..bytes.len() - 1]).is_err());
        let mut trailing = bytes.clone();
        trailing.push(0);
        assert!(DrawStore::read_from(trailing.as_slice()).is_err());
    }

    #[test]
    fn mismatched_columns_are_rejected() {
        let mut header = sample_store().header().clone();
        header.draws = 2;
        assert!(DrawStore::new(header, vec![vec![0.0; 2], vec![0.0; 3]]).is_err());
    }
}
