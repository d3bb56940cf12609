//! Model checkpoint container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic      8 bytes   "DISCRELK"
//! version    u32
//! header_len u64
//! header     header_len bytes of UTF-8 JSON: format_version, dtype, spec, tensors[{name, shape}]
//! data       every tensor's values in header order, dtype-sized little-endian
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{ModelSpec, RelationModel};
use crate::error::{Error, Result};
use crate::kernel::{Parameterized, Scalar};

pub const MAGIC: &[u8; 8] = b"DISCRELK";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    dtype: String,
    spec: ModelSpec,
    tensors: Vec<TensorEntry>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::invalid(format!("checkpoint: {}", msg.into()))
}

pub fn write_checkpoint<T: Scalar, W: Write>(model: &RelationModel<T>, w: &mut W) -> Result<()> {
    let mut tensors = Vec::new();
    let mut data = Vec::with_capacity(model.param_count() * T::BYTES);
    model.visit_params(&mut |name, t| {
        tensors.push(TensorEntry {
            name: name.to_string(),
            shape: t.shape().to_vec(),
        });
        for &v in t.values() {
            v.write_le(&mut data);
        }
    });
    let header = Header {
        format_version: FORMAT_VERSION,
        dtype: T::DTYPE.to_string(),
        spec: model.spec().clone(),
        tensors,
    };
    let header = serde_json::to_vec(&header)?;
    w.write_all(MAGIC)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&(header.len() as u64).to_le_bytes())?;
    w.write_all(&header)?;
    w.write_all(&data)?;
    Ok(())
}

pub fn read_checkpoint<T: Scalar, R: Read>(r: &mut R) -> Result<RelationModel<T>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(corrupt("bad magic bytes"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported format version {version}")));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = usize::try_from(u64::from_le_bytes(len)).map_err(|_| corrupt("header too large"))?;
    let mut header = vec![0u8; len];
    r.read_exact(&mut header)?;
    let header: Header = serde_json::from_slice(&header)?;
    if header.dtype != T::DTYPE {
        return Err(corrupt(format!("stored as {}, requested {}", header.dtype, T::DTYPE)));
    }

    let mut model = RelationModel::<T>::zeros(header.spec)?;
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;

    let mut offset = 0;
    let mut index = 0;
    let mut problem: Option<Error> = None;
    model.visit_params_mut(&mut |name, t| {
        if problem.is_some() {
            return;
        }
        let Some(entry) = header.tensors.get(index) else {
            problem = Some(corrupt("fewer tensors than the spec requires"));
            return;
        };
        if entry.name != name || entry.shape != t.shape() {
            problem = Some(corrupt(format!(
                "tensor {index} is {} {:?}, expected {name} {:?}",
                entry.name,
                entry.shape,
                t.shape()
            )));
            return;
        }
        let bytes = t.len() * T::BYTES;
        if data.len() < offset + bytes {
            problem = Some(corrupt(format!("data ends inside tensor {name}")));
            return;
        }
        for (v, chunk) in t
            .values_mut()
            .iter_mut()
            .zip(data[offset..offset + bytes].chunks_exact(T::BYTES))
        {
            *v = T::read_le(chunk);
        }
        offset += bytes;
        index += 1;
    });
    if let Some(e) = problem {
        return Err(e);
    }
    if index != header.tensors.len() || offset != data.len() {
        return Err(corrupt("trailing tensors or bytes"));
    }
    Ok(model)
}

pub fn save_checkpoint<T: Scalar>(model: &RelationModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_checkpoint(model, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_checkpoint<T: Scalar>(path: impl AsRef<Path>) -> Result<RelationModel<T>> {
    let bytes = fs::read(path)?;
    read_checkpoint(&mut bytes.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{BilstmBlock, InputPlan};
    use crate::corpus::SenseInventory;
    use crate::encoder::Pooling;
    use crate::rng::Rng;

    fn model() -> RelationModel<f32> {
        let plan = InputPlan {
            bilstm: Some(BilstmBlock { pooling: Pooling::Max, hidden_dim: 3 }),
            pretrained: Some(2),
            word_pairs: None,
        };
        let senses = SenseInventory::new(vec!["A".into(), "B".into()]).unwrap();
        let spec = ModelSpec::new(plan, Some(4), 4, Some(5), senses).unwrap();
        RelationModel::new(spec, &mut Rng::new(9)).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = model();
        let mut buf = Vec::new();
        write_checkpoint(&m, &mut buf).unwrap();
        let back: RelationModel<f32> = read_checkpoint(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        write_checkpoint(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_wrong_dtype_and_truncation() {
        let mut buf = Vec::new();
        write_checkpoint(&model(), &mut buf).unwrap();
        assert!(read_checkpoint::<f64, _>(&mut buf.as_slice()).is_err());
        let cut = &buf[..buf.len() - 3];
        assert!(read_checkpoint::<f32, _>(&mut &cut[..]).is_err());
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(read_checkpoint::<f32, _>(&mut bad.as_slice()).is_err());
        let mut extra = buf;
        extra.push(0);
        assert!(read_checkpoint::<f32, _>(&mut extra.as_slice()).is_err());
    }
}
