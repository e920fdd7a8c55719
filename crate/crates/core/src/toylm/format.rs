//! Binary model file.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic            4 bytes  "VTLM"
//! version          u32      1
//! vocab_size       u32
//! hidden           u32
//! layers           u32
//! heads            u32
//! max_context      u32
//! tied_embeddings  u8       0 | 1
//! trimmed          u8       0 | 1
//! if trimmed:
//!   method         u8       0 unicode, 1 corpus, 2 oracle, 3 full
//!   base_k         u32
//!   source_vocab   u32      vocabulary size before trimming
//!   kept           u32 × vocab_size   original id of each row
//! tensors, in order:
//!   embedding                      [vocab_size, H]
//!   per layer i in 0..layers:
//!     attn_norm.gain [H], attn_norm.bias [H],
//!     qkv.weight [3H, H], qkv.bias [3H],
//!     attn_out.weight [H, H], attn_out.bias [H],
//!     ffn_norm.gain [H], ffn_norm.bias [H],
//!     ffn_up.weight [4H, H], ffn_up.bias [4H],
//!     ffn_down.weight [H, 4H], ffn_down.bias [H]
//!   final_norm.gain [H], final_norm.bias [H]
//!   output [vocab_size, H]         only when tied_embeddings = 0
//! each tensor: rank u32, dims u32 × rank, f32 × prod(dims)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{Layer, Linear, Matrix, ModelConfig, ModelError, ModelWeights, Norm, Result};
use crate::subvocab::{build_mapping, Method};

pub const MAGIC: &[u8; 4] = b"VTLM";
pub const FORMAT_VERSION: u32 = 1;

fn method_code(m: Method) -> u8 {
    match m {
        Method::Unicode => 0,
        Method::Corpus => 1,
        Method::Oracle => 2,
        Method::Full => 3,
    }
}

fn method_from_code(c: u8) -> Result<Method> {
    Ok(match c {
        0 => Method::Unicode,
        1 => Method::Corpus,
        2 => Method::Oracle,
        3 => Method::Full,
        other => return Err(ModelError::Format(format!("unknown method code {other}"))),
    })
}

impl ModelWeights {
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let c = &self.config;
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(FORMAT_VERSION)?;
        for v in [c.vocab_size, c.hidden, c.layers, c.heads, c.max_context] {
            w.write_u32::<LittleEndian>(v as u32)?;
        }
        w.write_u8(u8::from(c.tied_embeddings))?;
        match &self.row_map {
            None => w.write_u8(0)?,
            Some(sub) => {
                w.write_u8(1)?;
                w.write_u8(method_code(sub.method()))?;
                w.write_u32::<LittleEndian>(sub.base_k() as u32)?;
                w.write_u32::<LittleEndian>(sub.vocab_size() as u32)?;
                for &id in sub.kept() {
                    w.write_u32::<LittleEndian>(id)?;
                }
            }
        }
        let mut result = Ok(());
        self.for_each_tensor(|_, dims, data| {
            if result.is_ok() {
                result = write_tensor(w, dims, data);
            }
        });
        result
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<ModelWeights> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(ModelError::BadMagic);
        }
        let version = r.read_u32::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion(version));
        }
        let mut dims = [0usize; 5];
        for d in &mut dims {
            *d = r.read_u32::<LittleEndian>()? as usize;
        }
        let tied = match r.read_u8()? {
            0 => false,
            1 => true,
            other => return Err(ModelError::Format(format!("bad tied flag {other}"))),
        };
        let config = ModelConfig {
            vocab_size: dims[0],
            hidden: dims[1],
            layers: dims[2],
            heads: dims[3],
            max_context: dims[4],
            tied_embeddings: tied,
        };
        config.validate()?;

        let row_map = match r.read_u8()? {
            0 => None,
            1 => {
                let method = method_from_code(r.read_u8()?)?;
                let base_k = r.read_u32::<LittleEndian>()? as usize;
                let source = r.read_u32::<LittleEndian>()? as usize;
                let mut kept = vec![0u32; config.vocab_size];
                r.read_u32_into::<LittleEndian>(&mut kept)?;
                if kept.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ModelError::Format(
                        "row map is not strictly ascending".into(),
                    ));
                }
                let sub = build_mapping(kept, source, method, base_k)
                    .map_err(|e| ModelError::Format(format!("row map: {e}")))?;
                if sub.len() != config.vocab_size {
                    return Err(ModelError::Format(
                        "row map does not match vocab_size (missing retained prefix?)".into(),
                    ));
                }
                Some(sub)
            }
            other => return Err(ModelError::Format(format!("bad trimmed flag {other}"))),
        };

        let h = config.hidden;
        let mut reader = TensorReader { r };
        let embedding = reader.matrix("embedding", config.vocab_size, h)?;
        let mut layers = Vec::with_capacity(config.layers);
        for i in 0..config.layers {
            let p = |n: &str| format!("layers.{i}.{n}");
            let attn_norm = Norm {
                gain: reader.vector(&p("attn_norm.gain"), h)?,
                bias: reader.vector(&p("attn_norm.bias"), h)?,
            };
            let qkv = Linear {
                weight: reader.matrix(&p("qkv.weight"), 3 * h, h)?,
                bias: reader.vector(&p("qkv.bias"), 3 * h)?,
            };
            let attn_out = Linear {
                weight: reader.matrix(&p("attn_out.weight"), h, h)?,
                bias: reader.vector(&p("attn_out.bias"), h)?,
            };
            let ffn_norm = Norm {
                gain: reader.vector(&p("ffn_norm.gain"), h)?,
                bias: reader.vector(&p("ffn_norm.bias"), h)?,
            };
            let ffn_up = Linear {
                weight: reader.matrix(&p("ffn_up.weight"), 4 * h, h)?,
                bias: reader.vector(&p("ffn_up.bias"), 4 * h)?,
            };
            let ffn_down = Linear {
                weight: reader.matrix(&p("ffn_down.weight"), h, 4 * h)?,
                bias: reader.vector(&p("ffn_down.bias"), h)?,
            };
            layers.push(Layer {
                attn_norm,
                qkv,
                attn_out,
                ffn_norm,
                ffn_up,
                ffn_down,
            });
        }
        let final_norm = Norm {
            gain: reader.vector("final_norm.gain", h)?,
            bias: reader.vector("final_norm.bias", h)?,
        };
        let output = if tied {
            None
        } else {
            Some(reader.matrix("output", config.vocab_size, h)?)
        };
        let mut trailing = [0u8; 1];
        if reader.r.read(&mut trailing)? != 0 {
            return Err(ModelError::Format(
                "trailing bytes after last tensor".into(),
            ));
        }

        Ok(ModelWeights {
            config,
            embedding,
            layers,
            final_norm,
            output,
            row_map,
        })
    }

    pub fn load(path: &Path) -> Result<ModelWeights> {
        let mut r = BufReader::with_capacity(1 << 20, File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn write_tensor<W: Write>(w: &mut W, dims: &[usize], data: &[f32]) -> Result<()> {
    w.write_u32::<LittleEndian>(dims.len() as u32)?;
    for &d in dims {
        w.write_u32::<LittleEndian>(d as u32)?;
    }
    let mut buf = Vec::with_capacity(4096);
    for chunk in data.chunks(1024) {
        buf.clear();
        for &v in chunk {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

struct TensorReader<'a, R: Read> {
    r: &'a mut R,
}

impl<R: Read> TensorReader<'_, R> {
    fn read(&mut self, name: &str, expected: &[usize]) -> Result<Vec<f32>> {
        let rank = self.r.read_u32::<LittleEndian>()? as usize;
        if rank != expected.len() {
            return Err(ModelError::Format(format!(
                "tensor {name}: rank {rank}, expected {}",
                expected.len()
            )));
        }
        for &want in expected {
            let got = self.r.read_u32::<LittleEndian>()? as usize;
            if got != want {
                return Err(ModelError::Format(format!(
                    "tensor {name}: shape mismatch (dimension {got}, expected {want})"
                )));
            }
        }
        let mut data = vec![0f32; expected.iter().product()];
        self.r.read_f32_into::<LittleEndian>(&mut data)?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(name.to_string()));
        }
        Ok(data)
    }

    fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        Ok(Matrix::from_vec(
            rows,
            cols,
            self.read(name, &[rows, cols])?,
        ))
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<Vec<f32>> {
        self.read(name, &[len])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toylm::{init_random, trim_model};

    fn config(tied: bool) -> ModelConfig {
        ModelConfig {
            vocab_size: 40,
            hidden: 8,
            layers: 2,
            heads: 2,
            max_context: 16,
            tied_embeddings: tied,
        }
    }

    fn bytes(model: &ModelWeights) -> Vec<u8> {
        let mut buf = Vec::new();
        model.write_to(&mut buf).unwrap();
        buf
    }

    #[test]
    fn header_layout() {
        let buf = bytes(&init_random(&config(true), 0).unwrap());
        assert_eq!(&buf[..4], b"VTLM");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 40);
        assert_eq!(buf[28], 1, "tied flag");
        assert_eq!(buf[29], 0, "trimmed flag");
        // embedding tensor header
        assert_eq!(u32::from_le_bytes(buf[30..34].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(buf[34..38].try_into().unwrap()), 40);
        assert_eq!(u32::from_le_bytes(buf[38..42].try_into().unwrap()), 8);
    }

    #[test]
    fn same_seed_gives_identical_files() {
        let a = bytes(&init_random(&config(false), 11).unwrap());
        let b = bytes(&init_random(&config(false), 11).unwrap());
        let c = bytes(&init_random(&config(false), 12).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn round_trip_full_and_trimmed() {
        for tied in [true, false] {
            let model = init_random(&config(tied), 2).unwrap();
            let back = ModelWeights::read_from(&mut bytes(&model).as_slice()).unwrap();
            assert_eq!(back, model);

            let sub = build_mapping([35, 39], 40, Method::Corpus, 5).unwrap();
            let trimmed = trim_model(&model, &sub).unwrap();
            let back = ModelWeights::read_from(&mut bytes(&trimmed).as_slice()).unwrap();
            assert_eq!(back, trimmed);
            assert_eq!(back.row_map().unwrap().kept(), &[0, 1, 2, 3, 4, 35, 39]);
        }
    }

    #[test]
    fn serialized_tensor_sizes_match_parameter_formula() {
        for tied in [true, false] {
            let cfg = config(tied);
            let buf = bytes(&init_random(&cfg, 1).unwrap());
            // walk the tensor section and sum element counts
            let mut pos = 30;
            let mut elements = 0usize;
            while pos < buf.len() {
                let rank = u32::from_le_bytes(buf[pos..pos + 4].try_into().unwrap()) as usize;
                pos += 4;
                let mut n = 1usize;
                for _ in 0..rank {
                    n *= u32::from_le_bytes(buf[pos..pos + 4].try_into().unwrap()) as usize;
                    pos += 4;
                }
                elements += n;
                pos += 4 * n;
            }
            assert_eq!(pos, buf.len());
            assert_eq!(elements, cfg.parameter_count());
        }
    }

    #[test]
    fn corrupt_files_rejected() {
        let good = bytes(&init_random(&config(true), 0).unwrap());

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(
            ModelWeights::read_from(&mut bad.as_slice()),
            Err(ModelError::BadMagic)
        ));

        let mut bad = good.clone();
        bad[4] = 9;
        assert!(matches!(
            ModelWeights::read_from(&mut bad.as_slice()),
            Err(ModelError::UnsupportedVersion(9))
        ));

        let truncated = &good[..good.len() - 3];
        assert!(matches!(
            ModelWeights::read_from(&mut &truncated[..]),
            Err(ModelError::Io(_))
        ));

        let mut bad = good.clone();
        bad.push(0);
        assert!(matches!(
            ModelWeights::read_from(&mut bad.as_slice()),
            Err(ModelError::Format(_))
        ));

        let mut bad = good.clone();
        let at = 42;
        bad[at..at + 4].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(
            ModelWeights::read_from(&mut bad.as_slice()),
            Err(ModelError::NonFinite(name)) if name == "embedding"
        ));
    }

    #[test]
    fn save_and_load_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let model = init_random(&config(true), 6).unwrap();
        model.save(&path).unwrap();
        assert_eq!(ModelWeights::load(&path).unwrap(), model);
    }
}
