//! Binary network checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "AOIQ"  version:u32  uavs:u32  devices:u32  model:u8  layers:u32  dims:[u32; layers]
//! params:[f64; n]      n = sum over layers of out * in + out
//! ```

use std::path::Path;

use crate::agents::{param_count, QNetwork};
use crate::env::{DirectionModel, Environment};

pub const MAGIC: [u8; 4] = *b"AOIQ";
pub const VERSION: u32 = 1;

/// Dimension lists longer than this are rejected before allocating.
const MAX_LAYERS: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("not a checkpoint: bad magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported checkpoint version {0} (expected {VERSION})")]
    UnsupportedVersion(u32),
    #[error("checkpoint truncated: needed {needed} bytes, found {available}")]
    Truncated { needed: usize, available: usize },
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error("checkpoint shape {checkpoint} does not match configured shape {config}")]
    Incompatible { checkpoint: String, config: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub uavs: u32,
    pub devices: u32,
    pub model: DirectionModel,
    pub net: QNetwork,
}

fn shape(uavs: usize, devices: usize, model: DirectionModel, dims: &[usize]) -> String {
    format!("U={uavs} D={devices} model={} dims={dims:?}", model.tag())
}

impl Checkpoint {
    pub fn new(env: &Environment, net: QNetwork) -> Result<Self, CheckpointError> {
        let cp = Self {
            uavs: env.config().uavs as u32,
            devices: env.config().devices as u32,
            model: env.config().model,
            net,
        };
        cp.ensure_compatible(env)?;
        Ok(cp)
    }

    pub fn shape(&self) -> String {
        shape(self.uavs as usize, self.devices as usize, self.model, self.net.dims())
    }

    /// Input and output widths must agree with the environment.
    pub fn ensure_compatible(&self, env: &Environment) -> Result<(), CheckpointError> {
        let cfg = env.config();
        let dims = self.net.dims();
        let ok = self.uavs as usize == cfg.uavs
            && self.devices as usize == cfg.devices
            && self.model == cfg.model
            && dims.first() == Some(&env.feature_len())
            && dims.last() == Some(&env.action_space().len());
        if ok {
            return Ok(());
        }
        let mut expected = vec![env.feature_len()];
        expected.extend_from_slice(&dims[1..dims.len().saturating_sub(1)]);
        expected.push(env.action_space().len());
        Err(CheckpointError::Incompatible {
            checkpoint: self.shape(),
            config: shape(cfg.uavs, cfg.devices, cfg.model, &expected),
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let dims = self.net.dims();
        let mut out = Vec::with_capacity(21 + 4 * dims.len() + 8 * self.net.params().len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.uavs.to_le_bytes());
        out.extend_from_slice(&self.devices.to_le_bytes());
        out.push(self.model.tag());
        out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
        for &d in dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        for p in self.net.params() {
            out.extend_from_slice(&p.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic: [u8; 4] = r.take(4)?.try_into().expect("four bytes");
        if magic != MAGIC {
            return Err(CheckpointError::BadMagic(magic));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(CheckpointError::UnsupportedVersion(version));
        }
        let uavs = r.u32()?;
        let devices = r.u32()?;
        let tag = r.take(1)?[0];
        let model = DirectionModel::from_tag(tag)
            .ok_or_else(|| CheckpointError::Malformed(format!("unknown direction model tag {tag}")))?;
        let layers = r.u32()? as usize;
        if !(2..=MAX_LAYERS).contains(&layers) {
            return Err(CheckpointError::Malformed(format!("{layers} layer widths")));
        }
        let mut dims = Vec::with_capacity(layers);
        for _ in 0..layers {
            let d = r.u32()? as usize;
            if d == 0 {
                return Err(CheckpointError::Malformed("zero layer width".into()));
            }
            dims.push(d);
        }
        if uavs == 0 || devices == 0 {
            return Err(CheckpointError::Malformed(format!("U={uavs} D={devices}")));
        }
        let inputs = (uavs as usize)
            .checked_mul(3)
            .and_then(|x| x.checked_add(devices as usize));
        let per_uav = (model.directions().len() as u64).checked_mul(u64::from(devices) + 1);
        let outputs = per_uav
            .and_then(|b| b.checked_pow(uavs))
            .and_then(|x| usize::try_from(x).ok());
        if inputs != Some(dims[0]) || outputs != Some(dims[layers - 1]) {
            return Err(CheckpointError::Malformed(format!(
                "layer widths {dims:?} do not fit U={uavs} D={devices} model={tag}"
            )));
        }
        let n = dims
            .windows(2)
            .try_fold(0usize, |acc, w| {
                w[0].checked_mul(w[1])?.checked_add(w[1])?.checked_add(acc)
            })
            .ok_or_else(|| CheckpointError::Malformed("parameter count overflows".into()))?;
        debug_assert_eq!(n, param_count(&dims));
        let needed = n
            .checked_mul(8)
            .and_then(|b| b.checked_add(r.pos))
            .ok_or_else(|| CheckpointError::Malformed("parameter count overflows".into()))?;
        if bytes.len() < needed {
            return Err(CheckpointError::Truncated {
                needed,
                available: bytes.len(),
            });
        }
        if bytes.len() > needed {
            return Err(CheckpointError::Malformed(format!(
                "{} trailing bytes",
                bytes.len() - needed
            )));
        }
        let params = r.bytes[r.pos..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
            .collect();
        let net = QNetwork::from_params(&dims, params).map_err(|e| CheckpointError::Malformed(e.to_string()))?;
        Ok(Self {
            uavs,
            devices,
            model,
            net,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(CheckpointError::Truncated {
                needed: end,
                available: self.bytes.len(),
            });
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("four bytes")))
    }
}

pub fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<(), CheckpointError> {
    super::output::write_atomic(path, &cp.encode()).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let bytes = std::fs::read(path).map_err(|source| CheckpointError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Checkpoint::decode(&bytes)
}
