//! Model files: the magic `RNETCNN1`, a length-prefixed text block with the
//! configuration, then every weight tensor as a shape header followed by
//! little-endian `f32` values.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::layers::LayerSpec;
use super::model::{AdamConfig, ModelConfig, NeuralModel};
use crate::error::{Error, Result};
use crate::lfr::{Attribute, LfrConfig};
use crate::text::sig17;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"RNETCNN1";
/// Order in which receptive-field tensors are flattened into model inputs.
pub const FLATTEN_ORDER: &str = "field,row,col";

fn config_text(m: &NeuralModel<f32>) -> String {
    let c = &m.config;
    let a = c.adam;
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        s.push_str(k);
        s.push('=');
        s.push_str(&v);
        s.push('\n');
    };
    line("preset", c.name.clone());
    line("input_mode", c.input_mode.name().into());
    line("input", c.input.to_string());
    line("output_len", c.output_len.to_string());
    line("metric", c.metric.name().into());
    line("flatten_order", FLATTEN_ORDER.into());
    line("lfr.w", c.lfr.w.to_string());
    line("lfr.g", c.lfr.g.to_string());
    line("lfr.labeling", c.lfr.labeling.name().into());
    line("lfr.attrs", Attribute::format_list(&c.lfr.attributes));
    line("loss", c.loss.name().into());
    line(
        "adam",
        format!("{},{},{},{}", sig17(a.lr), sig17(a.beta1), sig17(a.beta2), sig17(a.eps)),
    );
    line("seed", c.seed.to_string());
    line("step_count", m.step_count.to_string());
    for l in &c.layers {
        line("layer", l.to_string());
    }
    s
}

pub fn write_checkpoint<W: Write>(m: &NeuralModel<f32>, mut out: W) -> Result<()> {
    let text = config_text(m);
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&(text.len() as u32).to_le_bytes())?;
    out.write_all(text.as_bytes())?;
    let tensors: Vec<(Vec<usize>, &[f32])> = m
        .layers()
        .iter()
        .flat_map(|l| {
            let shapes = l.tensor_shapes();
            let mut start = l.offset;
            shapes.into_iter().map(move |s| {
                let len: usize = s.iter().product();
                let slice = start..start + len;
                start += len;
                (s, slice)
            })
        })
        .map(|(s, r)| (s, &m.params()[r]))
        .collect();
    out.write_all(&(tensors.len() as u32).to_le_bytes())?;
    for (shape, data) in tensors {
        out.write_all(&(shape.len() as u32).to_le_bytes())?;
        for d in shape {
            out.write_all(&(d as u32).to_le_bytes())?;
        }
        for x in data {
            out.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<usize> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b) as usize)
}

fn parse_config(text: &str) -> Result<(ModelConfig, u64)> {
    let mut kv = BTreeMap::new();
    let mut layers = Vec::new();
    for line in text.lines() {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad config line {line:?}")))?;
        if k == "layer" {
            layers.push(v.parse::<LayerSpec>()?);
        } else {
            kv.insert(k, v);
        }
    }
    let get = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::Format(format!("checkpoint lacks {k}")))
    };
    let num = |k: &str| -> Result<u64> {
        get(k)?
            .parse()
            .map_err(|_| Error::Format(format!("bad {k} in checkpoint")))
    };
    if get("flatten_order")? != FLATTEN_ORDER {
        return Err(Error::Format("unsupported flatten order".into()));
    }
    let adam: Vec<f64> = get("adam")?
        .split(',')
        .map(|x| x.parse().map_err(|_| Error::Format("bad adam line".into())))
        .collect::<Result<_>>()?;
    let [lr, beta1, beta2, eps] = adam[..] else {
        return Err(Error::Format("adam needs four values".into()));
    };
    let cfg = ModelConfig {
        name: get("preset")?.to_string(),
        input_mode: get("input_mode")?.parse()?,
        input: get("input")?.parse()?,
        layers,
        output_len: num("output_len")? as usize,
        metric: get("metric")?.parse()?,
        lfr: LfrConfig {
            w: num("lfr.w")? as usize,
            g: num("lfr.g")? as usize,
            labeling: get("lfr.labeling")?.parse()?,
            attributes: Attribute::parse_list(get("lfr.attrs")?)?,
        },
        loss: get("loss")?.parse()?,
        adam: AdamConfig {
            lr,
            beta1,
            beta2,
            eps,
        },
        seed: num("seed")?,
    };
    Ok((cfg, num("step_count")?))
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<NeuralModel<f32>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("not a model checkpoint".into()));
    }
    let len = read_u32(&mut input)?;
    let mut text = vec![0u8; len];
    input.read_exact(&mut text)?;
    let text = String::from_utf8(text).map_err(|_| Error::Format("config is not UTF-8".into()))?;
    let (cfg, steps) = parse_config(&text)?;
    let shell = NeuralModel::<f32>::build(cfg.clone())?;
    let expected: Vec<Vec<usize>> = shell.layers().iter().flat_map(|l| l.tensor_shapes()).collect();
    let count = read_u32(&mut input)?;
    if count != expected.len() {
        return Err(Error::Format(format!(
            "checkpoint has {count} tensors, config needs {}",
            expected.len()
        )));
    }
    let mut params = Vec::with_capacity(shell.param_count());
    for shape in expected {
        let ndim = read_u32(&mut input)?;
        let got: Vec<usize> = (0..ndim).map(|_| read_u32(&mut input)).collect::<Result<_>>()?;
        if got != shape {
            return Err(Error::Shape(format!("tensor shape {got:?}, expected {shape:?}")));
        }
        let n: usize = shape.iter().product();
        let mut bytes = vec![0u8; 4 * n];
        input.read_exact(&mut bytes)?;
        params.extend(
            bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])),
        );
    }
    NeuralModel::from_parts(cfg, params, steps)
}
