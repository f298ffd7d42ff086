//! Flat binary checkpoints for plans and encoder weights.
//!
//! Both formats are little-endian: 8 magic bytes, u64 dimensions, then
//! row-major f64 payloads. A small JSON sidecar (`<file>.meta.json`)
//! records the format name and dimensions.
//!
//! Plan file (`OTPLAN01`): n1, n2, values (n1*n2), mu1 (n1), mu2 (n2).
//! Encoder file (`OTENC001`): in_dim, hidden, out, step, then the weight
//! tensors w1, b1, w2, b2 followed by the Adam first- and second-moment
//! buffers in the same order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderParams, ParamTensors};
use crate::ot::TransportPlan;
use crate::{Error, Result};

const PLAN_MAGIC: &[u8; 8] = b"OTPLAN01";
const ENCODER_MAGIC: &[u8; 8] = b"OTENC001";

#[derive(Debug, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub format: String,
    pub dims: Vec<u64>,
}

fn write_meta(path: &Path, format: &str, dims: &[u64]) -> Result<()> {
    let meta = CheckpointMeta { format: format.to_string(), dims: dims.to_vec() };
    let sidecar = sidecar_path(path);
    let json = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Checkpoint(format!("sidecar encode failed: {e}")))?;
    std::fs::write(sidecar, json)?;
    Ok(())
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".meta.json");
    std::path::PathBuf::from(os)
}

fn write_u64(out: &mut impl Write, v: u64) -> Result<()> {
    out.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn write_f64s(out: &mut impl Write, vals: impl Iterator<Item = f64>) -> Result<()> {
    for v in vals {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64(inp: &mut impl Read, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    inp.read_exact(&mut buf)
        .map_err(|_| Error::Checkpoint(format!("{}: truncated header", path.display())))?;
    Ok(u64::from_le_bytes(buf))
}

fn read_f64s(inp: &mut impl Read, count: usize, path: &Path) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    inp.read_exact(&mut bytes)
        .map_err(|_| Error::Checkpoint(format!("{}: truncated payload", path.display())))?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

fn check_magic(inp: &mut impl Read, expected: &[u8; 8], path: &Path) -> Result<()> {
    let mut magic = [0u8; 8];
    inp.read_exact(&mut magic)
        .map_err(|_| Error::Checkpoint(format!("{}: file too short for magic", path.display())))?;
    if &magic != expected {
        return Err(Error::Checkpoint(format!(
            "{}: bad magic {:?}, expected {:?}",
            path.display(),
            String::from_utf8_lossy(&magic),
            String::from_utf8_lossy(expected)
        )));
    }
    Ok(())
}

pub fn write_plan(path: impl AsRef<Path>, plan: &TransportPlan) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(PLAN_MAGIC)?;
    let (n1, n2) = (plan.n1() as u64, plan.n2() as u64);
    write_u64(&mut out, n1)?;
    write_u64(&mut out, n2)?;
    write_f64s(&mut out, plan.values().iter().copied())?;
    write_f64s(&mut out, plan.mu1().iter().copied())?;
    write_f64s(&mut out, plan.mu2().iter().copied())?;
    out.flush()?;
    write_meta(path, "plan-v1", &[n1, n2])
}

pub fn read_plan(path: impl AsRef<Path>) -> Result<TransportPlan> {
    let path = path.as_ref();
    let mut inp = BufReader::new(File::open(path)?);
    check_magic(&mut inp, PLAN_MAGIC, path)?;
    let n1 = read_u64(&mut inp, path)? as usize;
    let n2 = read_u64(&mut inp, path)? as usize;
    if n1 == 0 || n2 == 0 || n1.checked_mul(n2).is_none() {
        return Err(Error::Checkpoint(format!("{}: invalid dims {n1}x{n2}", path.display())));
    }
    let values = read_f64s(&mut inp, n1 * n2, path)?;
    let mu1 = read_f64s(&mut inp, n1, path)?;
    let mu2 = read_f64s(&mut inp, n2, path)?;
    let values = Array2::from_shape_vec((n1, n2), values)
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
    TransportPlan::new(values, mu1, mu2)
}

pub fn write_encoder(path: impl AsRef<Path>, params: &EncoderParams) -> Result<()> {
    let path = path.as_ref();
    let (weights, adam_m, adam_v, step) = params.raw();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(ENCODER_MAGIC)?;
    let dims = [params.in_dim() as u64, params.hidden_dim() as u64, params.out_dim() as u64, step];
    for d in dims {
        write_u64(&mut out, d)?;
    }
    for tensors in [weights, adam_m, adam_v] {
        write_f64s(&mut out, tensors.iter().copied())?;
    }
    out.flush()?;
    write_meta(path, "encoder-v1", &dims)
}

pub fn read_encoder(path: impl AsRef<Path>) -> Result<EncoderParams> {
    let path = path.as_ref();
    let mut inp = BufReader::new(File::open(path)?);
    check_magic(&mut inp, ENCODER_MAGIC, path)?;
    let in_dim = read_u64(&mut inp, path)? as usize;
    let hidden = read_u64(&mut inp, path)? as usize;
    let out_dim = read_u64(&mut inp, path)? as usize;
    let step = read_u64(&mut inp, path)?;
    if in_dim == 0 || hidden == 0 || hidden != out_dim {
        return Err(Error::Checkpoint(format!(
            "{}: invalid encoder dims {in_dim}/{hidden}/{out_dim}",
            path.display()
        )));
    }
    let mut tensors = Vec::with_capacity(3);
    for _ in 0..3 {
        let w1 = read_f64s(&mut inp, in_dim * hidden, path)?;
        let b1 = read_f64s(&mut inp, hidden, path)?;
        let w2 = read_f64s(&mut inp, hidden * out_dim, path)?;
        let b2 = read_f64s(&mut inp, out_dim, path)?;
        tensors.push(ParamTensors {
            w1: Array2::from_shape_vec((in_dim, hidden), w1)
                .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?,
            b1: Array1::from_vec(b1),
            w2: Array2::from_shape_vec((hidden, out_dim), w2)
                .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?,
            b2: Array1::from_vec(b2),
        });
    }
    let adam_v = tensors.pop().unwrap();
    let adam_m = tensors.pop().unwrap();
    let weights = tensors.pop().unwrap();
    Ok(EncoderParams::from_raw(weights, adam_m, adam_v, step))
}
