//! Binary parameter checkpoints.
//!
//! Layout (all integers little-endian `u32`, all reals little-endian `f64`):
//!
//! ```text
//! "DROLCKPT" version meta_len meta_utf8 entry_count
//! entry := name_len name_utf8 activation_tag:u8 layer_count
//!          { in out weight[out*in] bias[out] }*
//! ```
//!
//! `meta` is free-form JSON supplied by the caller. Values are stored as raw
//! IEEE-754 bits, so a save/load cycle is bit-exact.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::nn::{Activation, Layer, Mlp};

const MAGIC: &[u8; 8] = b"DROLCKPT";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Checkpoint {
    pub meta: String,
    pub entries: Vec<(String, Mlp)>,
}

fn put_u32<W: Write>(w: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit in u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn get_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

fn get_string<R: Read>(r: &mut R) -> Result<String> {
    let len = get_u32(r)?;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

impl Checkpoint {
    pub fn push(&mut self, name: impl Into<String>, net: &Mlp) {
        self.entries.push((name.into(), net.clone()));
    }

    pub fn get(&self, name: &str) -> Option<&Mlp> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        put_u32(&mut w, VERSION as usize)?;
        put_u32(&mut w, self.meta.len())?;
        w.write_all(self.meta.as_bytes())?;
        put_u32(&mut w, self.entries.len())?;
        for (name, net) in &self.entries {
            put_u32(&mut w, name.len())?;
            w.write_all(name.as_bytes())?;
            w.write_all(&[net.hidden_activation().tag()])?;
            put_u32(&mut w, net.layers().len())?;
            for l in net.layers() {
                put_u32(&mut w, l.in_dim())?;
                put_u32(&mut w, l.out_dim())?;
                for v in l.weight.iter().chain(&l.bias) {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a checkpoint file".into()));
        }
        let version = get_u32(&mut r)?;
        if version != VERSION as usize {
            return Err(Error::Format(format!("unsupported checkpoint version {version}")));
        }
        let meta = get_string(&mut r)?;
        let count = get_u32(&mut r)?;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let name = get_string(&mut r)?;
            let mut tag = [0u8; 1];
            r.read_exact(&mut tag)?;
            let act = Activation::from_tag(tag[0])?;
            let n_layers = get_u32(&mut r)?;
            let mut layers = Vec::with_capacity(n_layers);
            for _ in 0..n_layers {
                let (i, o) = (get_u32(&mut r)?, get_u32(&mut r)?);
                let weight = get_f64s(&mut r, i * o)?;
                let bias = get_f64s(&mut r, o)?;
                layers.push(Layer::new(i, o, weight, bias)?);
            }
            entries.push((name, Mlp::from_layers(layers, act)?));
        }
        Ok(Self { meta, entries })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        self.write(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::read(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn bit_exact_round_trip() {
        let mut r = rng::stream(4, 0);
        let mut ck = Checkpoint {
            meta: r#"{"k":8}"#.into(),
            ..Default::default()
        };
        let mut a = Mlp::new(&[3, 7, 2], Activation::Gelu, &mut r).unwrap();
        a.layers_mut()[0].bias[3] = -0.1 + 1e-17;
        a.layers_mut()[1].weight[0] = f64::MIN_POSITIVE / 3.0;
        ck.push("actor", &a);
        ck.push("tiny", &Mlp::new(&[1, 1], Activation::Identity, &mut r).unwrap());
        let mut buf = Vec::new();
        ck.write(&mut buf).unwrap();
        let back = Checkpoint::read(buf.as_slice()).unwrap();
        assert_eq!(back, ck);
        let bits = |m: &Mlp| m.flat_params().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(back.get("actor").unwrap()), bits(&a));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Checkpoint::read(&b"NOTACKPT\x01\x00\x00\x00"[..]).is_err());
        let mut buf = Vec::new();
        Checkpoint::default().write(&mut buf).unwrap();
        buf.truncate(10);
        assert!(Checkpoint::read(buf.as_slice()).is_err());
    }
}
