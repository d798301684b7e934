use std::fmt;
use std::str::FromStr;

use super::scalar::{gemm, Scalar};
use crate::error::{Error, Result};

/// Channels x height x width. One-dimensional signals use `h = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    pub c: usize,
    pub h: usize,
    pub w: usize,
}

impl Shape {
    pub fn new(c: usize, h: usize, w: usize) -> Shape {
        Shape { c, h, w }
    }

    pub fn len(&self) -> usize {
        self.c * self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.c, self.h, self.w)
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Shape> {
        let d = parse_dims(s)?;
        match d[..] {
            [c, h, w] => Ok(Shape { c, h, w }),
            _ => Err(Error::Format(format!("bad shape {s:?}"))),
        }
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|x| x.parse().map_err(|_| Error::Format(format!("bad dimension in {s:?}"))))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Padding {
    /// Output side `ceil(input / stride)`.
    Same,
    /// No padding.
    Valid,
}

impl Padding {
    fn name(self) -> &'static str {
        match self {
            Padding::Same => "same",
            Padding::Valid => "valid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerSpec {
    Conv2d {
        out_channels: usize,
        kernel: (usize, usize),
        stride: (usize, usize),
        padding: Padding,
    },
    Conv1d {
        out_channels: usize,
        kernel: usize,
        stride: usize,
        padding: Padding,
    },
    /// Square max pooling; windows hanging over the edge see zeros.
    MaxPool { size: usize, stride: usize },
    Relu,
    Flatten,
    Dense { units: usize },
}

impl LayerSpec {
    pub fn conv2d(out_channels: usize, k: usize) -> LayerSpec {
        LayerSpec::Conv2d {
            out_channels,
            kernel: (k, k),
            stride: (1, 1),
            padding: Padding::Same,
        }
    }

    pub fn conv1d(out_channels: usize, kernel: usize, stride: usize) -> LayerSpec {
        LayerSpec::Conv1d {
            out_channels,
            kernel,
            stride,
            padding: Padding::Valid,
        }
    }

    pub fn max2() -> LayerSpec {
        LayerSpec::MaxPool { size: 2, stride: 2 }
    }

    pub fn dense(units: usize) -> LayerSpec {
        LayerSpec::Dense { units }
    }

    /// Shape produced from `input`, or a shape error.
    pub fn output_shape(&self, input: Shape) -> Result<Shape> {
        Layer::resolve(*self, input, 0).map(|l| l.output)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::Conv1d { .. } => "conv1d",
            LayerSpec::MaxPool { .. } => "maxpool",
            LayerSpec::Relu => "relu",
            LayerSpec::Flatten => "flatten",
            LayerSpec::Dense { .. } => "dense",
        }
    }
}

impl fmt::Display for LayerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LayerSpec::Conv2d {
                out_channels,
                kernel,
                stride,
                padding,
            } => write!(
                f,
                "conv2d out={out_channels} kernel={}x{} stride={}x{} padding={}",
                kernel.0,
                kernel.1,
                stride.0,
                stride.1,
                padding.name()
            ),
            LayerSpec::Conv1d {
                out_channels,
                kernel,
                stride,
                padding,
            } => write!(
                f,
                "conv1d out={out_channels} kernel={kernel} stride={stride} padding={}",
                padding.name()
            ),
            LayerSpec::MaxPool { size, stride } => write!(f, "maxpool size={size} stride={stride}"),
            LayerSpec::Relu => f.write_str("relu"),
            LayerSpec::Flatten => f.write_str("flatten"),
            LayerSpec::Dense { units } => write!(f, "dense units={units}"),
        }
    }
}

impl FromStr for LayerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<LayerSpec> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or_else(|| Error::Format("empty layer".into()))?;
        let mut kv = std::collections::BTreeMap::new();
        for p in parts {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad layer field {p:?}")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Format(format!("layer {kind} lacks {k}")))
        };
        let num = |k: &str| -> Result<usize> {
            get(k)?
                .parse()
                .map_err(|_| Error::Format(format!("bad {k} in layer {kind}")))
        };
        let pair = |k: &str| -> Result<(usize, usize)> {
            match parse_dims(get(k)?)?[..] {
                [a, b] => Ok((a, b)),
                _ => Err(Error::Format(format!("bad {k} in layer {kind}"))),
            }
        };
        let padding = || -> Result<Padding> {
            match get("padding")? {
                "same" => Ok(Padding::Same),
                "valid" => Ok(Padding::Valid),
                p => Err(Error::Format(format!("bad padding {p:?}"))),
            }
        };
        Ok(match kind {
            "conv2d" => LayerSpec::Conv2d {
                out_channels: num("out")?,
                kernel: pair("kernel")?,
                stride: pair("stride")?,
                padding: padding()?,
            },
            "conv1d" => LayerSpec::Conv1d {
                out_channels: num("out")?,
                kernel: num("kernel")?,
                stride: num("stride")?,
                padding: padding()?,
            },
            "maxpool" => LayerSpec::MaxPool {
                size: num("size")?,
                stride: num("stride")?,
            },
            "relu" => LayerSpec::Relu,
            "flatten" => LayerSpec::Flatten,
            "dense" => LayerSpec::Dense {
                units: num("units")?,
            },
            _ => return Err(Error::Format(format!("unknown layer {kind:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    Conv {
        cin: usize,
        cout: usize,
        kh: usize,
        kw: usize,
        sh: usize,
        sw: usize,
        ph: usize,
        pw: usize,
    },
    Pool {
        k: usize,
        s: usize,
    },
    Relu,
    Flatten,
    Dense {
        nin: usize,
        nout: usize,
    },
}

/// A layer resolved against its input shape.
#[derive(Clone, Debug)]
pub(crate) struct Layer {
    pub op: Op,
    pub input: Shape,
    pub output: Shape,
    /// Offset of the layer's weights in the flat parameter vector.
    pub offset: usize,
    pub weights: usize,
    pub biases: usize,
}

fn conv_out(len: usize, k: usize, s: usize, padding: Padding) -> Result<(usize, usize)> {
    if k == 0 || s == 0 {
        return Err(Error::Shape("kernel and stride must be positive".into()));
    }
    match padding {
        Padding::Same => {
            let out = len.div_ceil(s);
            let total = ((out - 1) * s + k).saturating_sub(len);
            Ok((out, total / 2))
        }
        Padding::Valid => {
            if len < k {
                return Err(Error::Shape(format!("kernel {k} exceeds input side {len}")));
            }
            Ok(((len - k) / s + 1, 0))
        }
    }
}

impl Layer {
    pub fn resolve(spec: LayerSpec, input: Shape, offset: usize) -> Result<Layer> {
        let conv = |cout, kh, kw, sh, sw, padding| -> Result<(Op, Shape)> {
            let (oh, ph) = conv_out(input.h, kh, sh, padding)?;
            let (ow, pw) = conv_out(input.w, kw, sw, padding)?;
            if cout == 0 {
                return Err(Error::Shape("zero output channels".into()));
            }
            let op = Op::Conv {
                cin: input.c,
                cout,
                kh,
                kw,
                sh,
                sw,
                ph,
                pw,
            };
            Ok((op, Shape::new(cout, oh, ow)))
        };
        let (op, output) = match spec {
            LayerSpec::Conv2d {
                out_channels,
                kernel,
                stride,
                padding,
            } => conv(out_channels, kernel.0, kernel.1, stride.0, stride.1, padding)?,
            LayerSpec::Conv1d {
                out_channels,
                kernel,
                stride,
                padding,
            } => {
                if input.h != 1 {
                    return Err(Error::Shape(format!("conv1d needs height 1, got {input}")));
                }
                conv(out_channels, 1, kernel, 1, stride, padding)?
            }
            LayerSpec::MaxPool { size, stride } => {
                if size == 0 || stride == 0 {
                    return Err(Error::Shape("pool size and stride must be positive".into()));
                }
                let side = |len: usize| len.saturating_sub(size).div_ceil(stride) + 1;
                (
                    Op::Pool { k: size, s: stride },
                    Shape::new(input.c, side(input.h), side(input.w)),
                )
            }
            LayerSpec::Relu => (Op::Relu, input),
            LayerSpec::Flatten => (Op::Flatten, Shape::new(input.len(), 1, 1)),
            LayerSpec::Dense { units } => {
                if input.h != 1 || input.w != 1 {
                    return Err(Error::Shape(format!("dense needs a flat input, got {input}")));
                }
                if units == 0 {
                    return Err(Error::Shape("dense layer with zero units".into()));
                }
                (
                    Op::Dense {
                        nin: input.c,
                        nout: units,
                    },
                    Shape::new(units, 1, 1),
                )
            }
        };
        let (weights, biases) = match op {
            Op::Conv {
                cin, cout, kh, kw, ..
            } => (cout * cin * kh * kw, cout),
            Op::Dense { nin, nout } => (nout * nin, nout),
            _ => (0, 0),
        };
        Ok(Layer {
            op,
            input,
            output,
            offset,
            weights,
            biases,
        })
    }

    pub fn param_len(&self) -> usize {
        self.weights + self.biases
    }

    pub fn fan_in(&self) -> usize {
        match self.op {
            Op::Conv { cin, kh, kw, .. } => cin * kh * kw,
            Op::Dense { nin, .. } => nin,
            _ => 0,
        }
    }

    /// Shapes of the weight and bias tensors, for checkpoints.
    pub fn tensor_shapes(&self) -> Vec<Vec<usize>> {
        match self.op {
            Op::Conv {
                cin, cout, kh, kw, ..
            } => vec![vec![cout, cin, kh, kw], vec![cout]],
            Op::Dense { nin, nout } => vec![vec![nout, nin], vec![nout]],
            _ => Vec::new(),
        }
    }
}

/// Per-layer scratch kept from the forward pass for the backward pass.
#[derive(Clone, Debug, Default)]
pub(crate) struct Cache<T> {
    pub col: Vec<T>,
    pub argmax: Vec<usize>,
}

fn im2col<T: Scalar>(x: &[T], input: Shape, out: Shape, op: Op, col: &mut Vec<T>) {
    let Op::Conv {
        cin,
        kh,
        kw,
        sh,
        sw,
        ph,
        pw,
        ..
    } = op
    else {
        unreachable!()
    };
    let (oh, ow) = (out.h, out.w);
    col.clear();
    col.resize(cin * kh * kw * oh * ow, T::zero());
    for c in 0..cin {
        for ki in 0..kh {
            for kj in 0..kw {
                let row = ((c * kh + ki) * kw + kj) * oh * ow;
                for oy in 0..oh {
                    let y = (oy * sh + ki) as isize - ph as isize;
                    if y < 0 || y >= input.h as isize {
                        continue;
                    }
                    let src = (c * input.h + y as usize) * input.w;
                    let dst = row + oy * ow;
                    for ox in 0..ow {
                        let xx = (ox * sw + kj) as isize - pw as isize;
                        if xx >= 0 && xx < input.w as isize {
                            col[dst + ox] = x[src + xx as usize];
                        }
                    }
                }
            }
        }
    }
}

fn col2im<T: Scalar>(col: &[T], input: Shape, out: Shape, op: Op, dx: &mut [T]) {
    let Op::Conv {
        cin,
        kh,
        kw,
        sh,
        sw,
        ph,
        pw,
        ..
    } = op
    else {
        unreachable!()
    };
    let (oh, ow) = (out.h, out.w);
    dx.iter_mut().for_each(|v| *v = T::zero());
    for c in 0..cin {
        for ki in 0..kh {
            for kj in 0..kw {
                let row = ((c * kh + ki) * kw + kj) * oh * ow;
                for oy in 0..oh {
                    let y = (oy * sh + ki) as isize - ph as isize;
                    if y < 0 || y >= input.h as isize {
                        continue;
                    }
                    let dst = (c * input.h + y as usize) * input.w;
                    let src = row + oy * ow;
                    for ox in 0..ow {
                        let xx = (ox * sw + kj) as isize - pw as isize;
                        if xx >= 0 && xx < input.w as isize {
                            dx[dst + xx as usize] = dx[dst + xx as usize] + col[src + ox];
                        }
                    }
                }
            }
        }
    }
}

const PAD: usize = usize::MAX;

impl Layer {
    pub fn forward<T: Scalar>(&self, params: &[T], x: &[T], y: &mut Vec<T>, cache: &mut Cache<T>) {
        y.clear();
        y.resize(self.output.len(), T::zero());
        match self.op {
            Op::Conv { cin, cout, kh, kw, .. } => {
                let k = cin * kh * kw;
                let n = self.output.h * self.output.w;
                im2col(x, self.input, self.output, self.op, &mut cache.col);
                let (w, b) = params[self.offset..self.offset + self.param_len()].split_at(self.weights);
                for (o, &bo) in b.iter().enumerate() {
                    y[o * n..(o + 1) * n].iter_mut().for_each(|v| *v = bo);
                }
                gemm(cout, k, n, w, false, &cache.col, false, T::one(), y);
            }
            Op::Pool { k, s } => {
                let (ih, iw) = (self.input.h, self.input.w);
                let (oh, ow) = (self.output.h, self.output.w);
                cache.argmax.clear();
                cache.argmax.resize(y.len(), PAD);
                for c in 0..self.input.c {
                    for oy in 0..oh {
                        for ox in 0..ow {
                            let mut best = None::<(usize, T)>;
                            let mut clipped = false;
                            for dy in 0..k {
                                for dx in 0..k {
                                    let (yy, xx) = (oy * s + dy, ox * s + dx);
                                    if yy >= ih || xx >= iw {
                                        clipped = true;
                                        continue;
                                    }
                                    let i = (c * ih + yy) * iw + xx;
                                    if best.map_or(true, |(_, v)| x[i] > v) {
                                        best = Some((i, x[i]));
                                    }
                                }
                            }
                            let o = (c * oh + oy) * ow + ox;
                            match best {
                                Some((i, v)) if !(clipped && v < T::zero()) => {
                                    y[o] = v;
                                    cache.argmax[o] = i;
                                }
                                _ => y[o] = T::zero(),
                            }
                        }
                    }
                }
            }
            Op::Relu => {
                for (o, &i) in y.iter_mut().zip(x) {
                    *o = if i > T::zero() { i } else { T::zero() };
                }
            }
            Op::Flatten => y.copy_from_slice(x),
            Op::Dense { nin, nout } => {
                let (w, b) = params[self.offset..self.offset + self.param_len()].split_at(self.weights);
                y.copy_from_slice(b);
                gemm(nout, nin, 1, w, false, x, false, T::one(), y);
            }
        }
    }

    /// Accumulates parameter gradients into `grad` (the layer's slice of the
    /// flat gradient) and writes the input gradient into `dx` when given.
    pub fn backward<T: Scalar>(
        &self,
        params: &[T],
        x: &[T],
        y: &[T],
        dy: &[T],
        cache: &Cache<T>,
        grad: &mut [T],
        dx: Option<&mut Vec<T>>,
    ) {
        let dx = dx.map(|d| {
            d.clear();
            d.resize(self.input.len(), T::zero());
            d
        });
        match self.op {
            Op::Conv { cin, cout, kh, kw, .. } => {
                let k = cin * kh * kw;
                let n = self.output.h * self.output.w;
                let (gw, gb) = grad.split_at_mut(self.weights);
                gemm(cout, n, k, dy, false, &cache.col, true, T::one(), gw);
                for (o, g) in gb.iter_mut().enumerate() {
                    *g = *g + dy[o * n..(o + 1) * n].iter().copied().sum();
                }
                if let Some(dx) = dx {
                    let w = &params[self.offset..self.offset + self.weights];
                    let mut dcol = vec![T::zero(); k * n];
                    gemm(k, cout, n, w, true, dy, false, T::zero(), &mut dcol);
                    col2im(&dcol, self.input, self.output, self.op, dx);
                }
            }
            Op::Pool { .. } => {
                if let Some(dx) = dx {
                    for (o, &i) in cache.argmax.iter().enumerate() {
                        if i != PAD {
                            dx[i] = dx[i] + dy[o];
                        }
                    }
                }
            }
            Op::Relu => {
                if let Some(dx) = dx {
                    for ((d, &g), &o) in dx.iter_mut().zip(dy).zip(y) {
                        *d = if o > T::zero() { g } else { T::zero() };
                    }
                }
            }
            Op::Flatten => {
                if let Some(dx) = dx {
                    dx.copy_from_slice(dy);
                }
            }
            Op::Dense { nin, nout } => {
                let (gw, gb) = grad.split_at_mut(self.weights);
                gemm(nout, 1, nin, dy, false, x, false, T::one(), gw);
                for (g, &d) in gb.iter_mut().zip(dy) {
                    *g = *g + d;
                }
                if let Some(dx) = dx {
                    let w = &params[self.offset..self.offset + self.weights];
                    gemm(nin, nout, 1, w, true, dy, false, T::zero(), dx);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_text_round_trip() {
        for spec in [
            LayerSpec::conv2d(64, 7),
            LayerSpec::conv1d(16, 10, 10),
            LayerSpec::max2(),
            LayerSpec::Relu,
            LayerSpec::Flatten,
            LayerSpec::dense(256),
        ] {
            assert_eq!(spec.to_string().parse::<LayerSpec>().unwrap(), spec);
        }
        assert!("conv2d out=3".parse::<LayerSpec>().is_err());
        assert_eq!("3x4x5".parse::<Shape>().unwrap(), Shape::new(3, 4, 5));
    }

    #[test]
    fn pooled_sides_use_ceil() {
        for (side, expect) in [(100, [50, 25, 13]), (64, [32, 16, 8]), (142, [71, 36, 18])] {
            let mut s = Shape::new(1, side, side);
            for e in expect {
                s = Layer::resolve(LayerSpec::max2(), s, 0).unwrap().output;
                assert_eq!((s.h, s.w), (e, e));
            }
        }
    }

    #[test]
    fn same_and_valid_convolutions() {
        let l = Layer::resolve(LayerSpec::conv2d(4, 7), Shape::new(1, 10, 10), 0).unwrap();
        assert_eq!(l.output, Shape::new(4, 10, 10));
        assert_eq!(l.param_len(), 4 * 49 + 4);
        let l = Layer::resolve(LayerSpec::conv1d(16, 10, 10), Shape::new(2, 1, 100), 0).unwrap();
        assert_eq!(l.output, Shape::new(16, 1, 10));
        assert!(Layer::resolve(LayerSpec::conv1d(1, 3, 1), Shape::new(1, 2, 5), 0).is_err());
        assert!(Layer::resolve(LayerSpec::dense(3), Shape::new(1, 2, 2), 0).is_err());
    }

    #[test]
    fn pool_edge_windows_see_zero_padding() {
        let l = Layer::resolve(LayerSpec::max2(), Shape::new(1, 3, 3), 0).unwrap();
        let x = [-1.0f64, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0, -9.0];
        let mut y = Vec::new();
        let mut cache = Cache::default();
        l.forward(&[], &x, &mut y, &mut cache);
        assert_eq!(y, vec![-1.0, 0.0, 0.0, 0.0]);
    }
}
