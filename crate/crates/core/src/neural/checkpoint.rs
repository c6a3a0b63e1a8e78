//! Binary checkpoint container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic     8 bytes  "CONNECTX"
//! version   u32
//! precision u8       4 (f32) or 8 (f64)
//! hlen      u32
//! header    hlen bytes of JSON: architecture, optimizer settings, metadata
//! tensors   parameters, then Adam first moments, then second moments,
//!           each as raw little-endian floats in header shape order
//! crc32     u32 over every preceding byte
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AdamConfig, AdamState, Architecture, Network, NeuralError, Precision, Real, Tensor};
use crate::board::GameConfig;

const MAGIC: &[u8; 8] = b"CONNECTX";
pub const FORMAT_VERSION: u32 = 1;
const PREFIX: usize = 8 + 4 + 1 + 4;

/// Provenance recorded with each checkpoint.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Training iteration that produced the checkpoint.
    pub iteration: u64,
    /// Iterations at which a candidate was promoted, oldest first.
    pub lineage: Vec<u64>,
    /// Game the network was trained on, if any.
    pub game: Option<GameConfig>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    architecture: Architecture,
    adam: AdamConfig,
    adam_t: u64,
    metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<F> {
    pub network: Network<F>,
    pub adam: AdamState<F>,
    pub metadata: Metadata,
}

fn corrupt(msg: impl Into<String>) -> NeuralError {
    NeuralError::CorruptFile(msg.into())
}

fn precision_tag(p: Precision) -> u8 {
    p.bytes() as u8
}

fn read_prefix(bytes: &[u8]) -> Result<(Precision, usize), NeuralError> {
    if bytes.len() < PREFIX + 4 {
        return Err(corrupt("file too short"));
    }
    if &bytes[..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(NeuralError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let precision = match bytes[12] {
        4 => Precision::F32,
        8 => Precision::F64,
        other => return Err(corrupt(format!("unknown precision tag {other}"))),
    };
    let hlen = u32::from_le_bytes(bytes[13..17].try_into().unwrap()) as usize;
    Ok((precision, hlen))
}

fn verify_checksum(bytes: &[u8]) -> Result<&[u8], NeuralError> {
    if bytes.len() < PREFIX + 4 {
        return Err(corrupt("file too short"));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        return Err(corrupt("checksum mismatch"));
    }
    Ok(body)
}

/// Parameter precision stored in a checkpoint file.
pub fn peek_precision(path: &Path) -> Result<Precision, NeuralError> {
    let bytes = fs::read(path)?;
    verify_checksum(&bytes)?;
    Ok(read_prefix(&bytes)?.0)
}

impl<F: Real> Checkpoint<F> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            architecture: self.network.architecture(),
            adam: self.adam.config,
            adam_t: self.adam.t,
            metadata: self.metadata.clone(),
        };
        let header = serde_json::to_vec(&header).expect("header serializes");
        let mut out = Vec::with_capacity(PREFIX + header.len() + 3 * self.network.param_count() * F::PRECISION.bytes() + 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.push(precision_tag(F::PRECISION));
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for t in self.network.params().iter().chain(&self.adam.m).chain(&self.adam.v) {
            for &x in t.data() {
                x.write_le(&mut out);
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NeuralError> {
        let body = verify_checksum(bytes)?;
        let (precision, hlen) = read_prefix(bytes)?;
        if precision != F::PRECISION {
            return Err(NeuralError::PrecisionMismatch {
                found: precision,
                expected: F::PRECISION,
            });
        }
        let header_end = PREFIX + hlen;
        if body.len() < header_end {
            return Err(corrupt("truncated header"));
        }
        let header: Header =
            serde_json::from_slice(&body[PREFIX..header_end]).map_err(|e| corrupt(format!("bad header: {e}")))?;
        let shapes = header.architecture.shapes();
        let width = precision.bytes();
        let total: usize = shapes.iter().map(|s| s.iter().product::<usize>()).sum::<usize>() * 3;
        let mut data = &body[header_end..];
        if data.len() != total * width {
            return Err(corrupt(format!("expected {} tensor bytes, found {}", total * width, data.len())));
        }
        let mut read_set = || -> Result<Vec<Tensor<F>>, NeuralError> {
            shapes
                .iter()
                .map(|shape| {
                    let n: usize = shape.iter().product();
                    let (chunk, rest) = data.split_at(n * width);
                    data = rest;
                    Tensor::from_vec(shape, chunk.chunks_exact(width).map(F::read_le).collect())
                })
                .collect()
        };
        let params = read_set()?;
        let m = read_set()?;
        let v = read_set()?;
        Ok(Checkpoint {
            network: Network::from_params(header.architecture, params)?,
            adam: AdamState {
                config: header.adam,
                t: header.adam_t,
                m,
                v,
            },
            metadata: header.metadata,
        })
    }

    /// Writes atomically: a temporary sibling file is renamed into place.
    pub fn save(&self, path: &Path) -> Result<(), NeuralError> {
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_bytes())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NeuralError> {
        Self::from_bytes(&fs::read(path)?)
    }
}
