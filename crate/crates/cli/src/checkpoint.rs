//! The one binary artifact: model parameters in a self-describing
//! container. Layout, all integers little-endian:
//!
//! ```text
//! magic      8  b"E2NCKPT\x01" (trailing byte is the format version)
//! precision  1  bytes per value: 4 = f32, 8 = f64
//! arch       1  0 = gcn, 1 = sage
//! kind       1  1 = classifier (3-class head), 0 = embedder
//! dummy_row  1  1 if a shared trainable dummy-feature row follows
//! seed       8  u64 used at initialization
//! scheme     1+n  length-prefixed UTF-8 init-scheme name
//! in_dim     8  u64
//! hidden     8  u64
//! layers     8  u64, number of graph layers
//! keep       8  f64 dropout keep probability
//! mats       8  u64 matrix count, then per matrix:
//!   rows 8, cols 8, rows*cols values at the stated precision
//! ```
//!
//! Matrices appear in forward order: per graph layer (gcn: weight,
//! bias; sage: self_weight, neigh_weight, bias), then head weight and
//! bias for a classifier, then the dummy row if flagged.

use std::fs;
use std::path::Path;

use edge2node_core::{ArchKind, Dense, GraphLayer, InitMeta, Mat, ModelParams, Scalar};

use crate::error::CliError;
use crate::io::atomic_write;

pub const MAGIC: [u8; 8] = *b"E2NCKPT\x01";

/// A checkpoint read back at whichever precision it was written.
#[derive(Debug)]
pub enum LoadedCheckpoint {
    F32(ModelParams<f32>),
    F64(ModelParams<f64>),
}

impl LoadedCheckpoint {
    pub fn precision_name(&self) -> &'static str {
        match self {
            LoadedCheckpoint::F32(_) => "f32",
            LoadedCheckpoint::F64(_) => "f64",
        }
    }
}

fn push_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn push_mat<S: Scalar>(out: &mut Vec<u8>, m: &Mat<S>) {
    push_u64(out, m.rows() as u64);
    push_u64(out, m.cols() as u64);
    for &v in m.data() {
        v.write_le(out);
    }
}

pub fn save_checkpoint<S: Scalar>(path: &Path, params: &ModelParams<S>) -> Result<(), CliError> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.push(S::BYTES as u8);
    out.push(match params.arch {
        ArchKind::Gcn => 0,
        ArchKind::Sage => 1,
    });
    out.push(u8::from(params.head.is_some()));
    out.push(u8::from(params.dummy_row.is_some()));
    push_u64(&mut out, params.init.seed);
    let scheme = params.init.scheme.as_bytes();
    out.push(u8::try_from(scheme.len()).map_err(|_| {
        CliError::new("bad_checkpoint", "init scheme name longer than 255 bytes")
    })?);
    out.extend_from_slice(scheme);
    push_u64(&mut out, params.in_dim as u64);
    push_u64(&mut out, params.hidden as u64);
    push_u64(&mut out, params.layers.len() as u64);
    out.extend_from_slice(&params.dropout_keep.to_le_bytes());

    let mats = params.mats();
    push_u64(&mut out, mats.len() as u64);
    for m in mats {
        push_mat(&mut out, m);
    }
    atomic_write(path, &out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn bad(&self, what: &str) -> CliError {
        CliError::new(
            "bad_checkpoint",
            format!("{}: {what} at byte {}", self.path.display(), self.pos),
        )
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CliError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let slice = &self.buf[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(self.bad("truncated")),
        }
    }

    fn u8(&mut self) -> Result<u8, CliError> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, CliError> {
        usize::try_from(self.u64()?).map_err(|_| self.bad("oversized count"))
    }

    fn f64(&mut self) -> Result<f64, CliError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn mat<S: Scalar>(&mut self) -> Result<Mat<S>, CliError> {
        let rows = self.usize()?;
        let cols = self.usize()?;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| self.bad("oversized matrix"))?;
        let bytes = self.take(count * S::BYTES)?;
        let data: Vec<S> = bytes
            .chunks_exact(S::BYTES)
            .map(|c| S::read_le(c))
            .collect();
        Ok(Mat::from_vec(rows, cols, data))
    }
}

fn read_params<S: Scalar>(
    r: &mut Reader<'_>,
    arch: ArchKind,
    has_head: bool,
    has_dummy: bool,
    init: InitMeta,
) -> Result<ModelParams<S>, CliError> {
    let in_dim = r.usize()?;
    let hidden = r.usize()?;
    let num_layers = r.usize()?;
    let dropout_keep = r.f64()?;
    let mats_declared = r.usize()?;

    let per_layer = match arch {
        ArchKind::Gcn => 2,
        ArchKind::Sage => 3,
    };
    let expected =
        num_layers * per_layer + usize::from(has_head) * 2 + usize::from(has_dummy);
    if mats_declared != expected {
        return Err(r.bad("matrix count does not match the header"));
    }

    let mut layers = Vec::with_capacity(num_layers);
    for _ in 0..num_layers {
        layers.push(match arch {
            ArchKind::Gcn => GraphLayer::Gcn {
                weight: r.mat()?,
                bias: r.mat()?,
            },
            ArchKind::Sage => GraphLayer::Sage {
                self_weight: r.mat()?,
                neigh_weight: r.mat()?,
                bias: r.mat()?,
            },
        });
    }
    let head = if has_head {
        Some(Dense {
            weight: r.mat()?,
            bias: r.mat()?,
        })
    } else {
        None
    };
    let dummy_row = if has_dummy { Some(r.mat()?) } else { None };
    if r.pos != r.buf.len() {
        return Err(r.bad("trailing bytes"));
    }
    Ok(ModelParams {
        arch,
        in_dim,
        hidden,
        dropout_keep,
        layers,
        head,
        dummy_row,
        init,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<LoadedCheckpoint, CliError> {
    let bytes = fs::read(path).map_err(|e| {
        CliError::new("missing_checkpoint", format!("{}: {e}", path.display()))
    })?;
    let mut r = Reader {
        buf: &bytes,
        pos: 0,
        path,
    };
    if r.take(8)? != &MAGIC[..] {
        return Err(CliError::new(
            "bad_checkpoint",
            format!("{}: not a checkpoint (bad magic)", path.display()),
        ));
    }
    let precision = r.u8()?;
    let arch = match r.u8()? {
        0 => ArchKind::Gcn,
        1 => ArchKind::Sage,
        other => return Err(r.bad(&format!("unknown architecture tag {other}"))),
    };
    let has_head = r.u8()? == 1;
    let has_dummy = r.u8()? == 1;
    let seed = r.u64()?;
    let scheme_len = r.u8()? as usize;
    let scheme = String::from_utf8(r.take(scheme_len)?.to_vec())
        .map_err(|_| r.bad("init scheme is not UTF-8"))?;
    let init = InitMeta { scheme, seed };

    match precision {
        4 => Ok(LoadedCheckpoint::F32(read_params(
            &mut r, arch, has_head, has_dummy, init,
        )?)),
        8 => Ok(LoadedCheckpoint::F64(read_params(
            &mut r, arch, has_head, has_dummy, init,
        )?)),
        other => Err(r.bad(&format!("unknown precision tag {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use edge2node_core::ModelConfig;

    fn sample<S: Scalar>(arch: ArchKind, learned_dummy: bool) -> ModelParams<S> {
        let mut cfg = ModelConfig::new(arch, 42);
        cfg.hidden = 5;
        cfg.num_layers = 3;
        cfg.learned_dummy = learned_dummy;
        ModelParams::new_classifier(&cfg, 7).unwrap()
    }

    #[test]
    fn round_trips_bit_exactly_both_precisions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");

        let p64 = sample::<f64>(ArchKind::Gcn, true);
        save_checkpoint(&path, &p64).unwrap();
        match load_checkpoint(&path).unwrap() {
            LoadedCheckpoint::F64(back) => assert_eq!(back, p64),
            _ => panic!("precision tag lost"),
        }

        let p32 = sample::<f32>(ArchKind::Sage, false);
        save_checkpoint(&path, &p32).unwrap();
        match load_checkpoint(&path).unwrap() {
            LoadedCheckpoint::F32(back) => assert_eq!(back, p32),
            _ => panic!("precision tag lost"),
        }
    }

    #[test]
    fn embedder_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let mut cfg = ModelConfig::new(ArchKind::Sage, 1);
        cfg.hidden = 4;
        let p = ModelParams::<f64>::new_embedder(&cfg, 6).unwrap();
        save_checkpoint(&path, &p).unwrap();
        match load_checkpoint(&path).unwrap() {
            LoadedCheckpoint::F64(back) => assert_eq!(back, p),
            _ => panic!("precision tag lost"),
        }
    }

    #[test]
    fn missing_and_corrupt_files_have_distinct_codes() {
        let dir = tempfile::tempdir().unwrap();
        let absent = dir.path().join("absent.ckpt");
        assert_eq!(
            load_checkpoint(&absent).unwrap_err().code,
            "missing_checkpoint"
        );

        let garbage = dir.path().join("garbage.ckpt");
        fs::write(&garbage, b"not a checkpoint").unwrap();
        assert_eq!(load_checkpoint(&garbage).unwrap_err().code, "bad_checkpoint");

        let path = dir.path().join("model.ckpt");
        save_checkpoint(&path, &sample::<f64>(ArchKind::Gcn, false)).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert_eq!(load_checkpoint(&path).unwrap_err().code, "bad_checkpoint");
    }
}
