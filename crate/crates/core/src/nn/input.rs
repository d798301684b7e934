use super::model::{InputMode, ModelConfig};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lfr::{encode, reshape_square, ReceptiveFieldTensor};

/// Linear interpolation of a curve sampled at `i/(n-1)` onto `len` evenly
/// spaced points of `[0, 1]`.
pub fn resample_curve(values: &[f64], len: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidParameter("curve needs at least two points".into()));
    }
    if len < 2 {
        return Err(Error::InvalidParameter("grid needs at least two points".into()));
    }
    if len == n {
        return Ok(values.to_vec());
    }
    let span = (n - 1) as f64;
    Ok((0..len)
        .map(|j| {
            let x = j as f64 / (len - 1) as f64 * span;
            let i = (x.floor() as usize).min(n - 2);
            let t = x - i as f64;
            values[i] + t * (values[i + 1] - values[i])
        })
        .collect())
}

/// Bilinear resampling of a row-major `n x n` image to `side x side`, with
/// corner pixels aligned.
pub fn resample_square(img: &[f64], n: usize, side: usize) -> Vec<f64> {
    if n == side {
        return img.to_vec();
    }
    if n == 0 {
        return vec![0.0; side * side];
    }
    let scale = if side > 1 { (n - 1) as f64 / (side - 1) as f64 } else { 0.0 };
    let coord = |j: usize| {
        let x = j as f64 * scale;
        let i = (x.floor() as usize).min(n.saturating_sub(2));
        (i, (i + 1).min(n - 1), x - i as f64)
    };
    let mut out = Vec::with_capacity(side * side);
    for r in 0..side {
        let (r0, r1, tr) = coord(r);
        for c in 0..side {
            let (c0, c1, tc) = coord(c);
            let top = img[r0 * n + c0] * (1.0 - tc) + img[r0 * n + c1] * tc;
            let bottom = img[r1 * n + c0] * (1.0 - tc) + img[r1 * n + c1] * tc;
            out.push(top * (1.0 - tr) + bottom * tr);
        }
    }
    out
}

/// Channel-major `h x (W g)` sequence from a receptive-field tensor.
pub fn tensor_to_sequence(t: &ReceptiveFieldTensor) -> Vec<f32> {
    let len = t.w * t.g;
    let mut out = vec![0.0; t.h * len];
    for p in 0..len {
        for j in 0..t.h {
            out[j * len + p] = t.data[p * t.h + j];
        }
    }
    out
}

/// The network input for a graph under the model's input mode.
pub fn prepare_input(g: &Graph, cfg: &ModelConfig) -> Result<Vec<f32>> {
    let x = match cfg.input_mode {
        InputMode::LfrSquare => reshape_square(&encode(g, &cfg.lfr)).data,
        InputMode::LfrSequence => tensor_to_sequence(&encode(g, &cfg.lfr)),
        InputMode::Adjacency => {
            resample_square(&g.adjacency_matrix(), g.node_count(), cfg.input.h)
                .into_iter()
                .map(|v| v as f32)
                .collect()
        }
        InputMode::Raw => {
            return Err(Error::InvalidParameter(
                "model takes raw tensors, not graphs".into(),
            ))
        }
    };
    if x.len() != cfg.input.len() {
        return Err(Error::Shape(format!(
            "prepared input has {} values, model expects {}",
            x.len(),
            cfg.input
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfr::LfrConfig;

    #[test]
    fn resample_examples() {
        let v = [1.0, 0.8, 0.5, 0.4, 1.0];
        assert_eq!(resample_curve(&v, 5).unwrap(), v.to_vec());
        assert_eq!(resample_curve(&[0.3; 7], 4).unwrap(), vec![0.3; 4]);
        let lin: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        for len in [2, 3, 7, 100] {
            let r = resample_curve(&lin, len).unwrap();
            for (j, x) in r.iter().enumerate() {
                assert!((x - j as f64 / (len - 1) as f64).abs() < 1e-15);
            }
        }
        assert!(resample_curve(&[1.0], 3).is_err());
    }

    #[test]
    fn bilinear_keeps_corners_and_constants() {
        let img = [1.0, 0.0, 0.0, 1.0];
        let up = resample_square(&img, 2, 3);
        assert_eq!(up, vec![1.0, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 1.0]);
        assert_eq!(resample_square(&[2.0; 9], 3, 5), vec![2.0; 25]);
    }

    #[test]
    fn sequence_is_channel_major() {
        let t = ReceptiveFieldTensor {
            w: 2,
            g: 1,
            h: 2,
            data: vec![1.0, 2.0, 3.0, 4.0],
            source_n: 2,
        };
        assert_eq!(tensor_to_sequence(&t), vec![1.0, 3.0, 2.0, 4.0]);
    }

    #[test]
    fn inputs_match_presets() {
        let g = Graph::from_edges(5, false, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let lfr = LfrConfig::new(10, 4);
        for cfg in [
            ModelConfig::lfr_cnn(lfr.clone(), 10, 0),
            ModelConfig::patchy1d(lfr.clone(), 10, 0),
            ModelConfig::pcr(8, 10, 0),
        ] {
            assert_eq!(prepare_input(&g, &cfg).unwrap().len(), cfg.input.len());
        }
    }
}
