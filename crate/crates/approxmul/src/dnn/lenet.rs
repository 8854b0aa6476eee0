//! Float LeNet: conv(1->6,5x5) -> maxpool2 -> conv(6->16,5x5) -> maxpool2 ->
//! dense(120) -> dense(84) -> dense(10) with ReLU activations, on 28x28
//! inputs zero-padded to 32x32. The `plus` variant inserts one extra
//! conv(16->16,3x3) before the flatten.
//!
//! The backward pass works from a recorded forward trace, so the same code
//! serves plain float training and straight-through fine-tuning on
//! dequantized activations.

use crate::rng::SplitMix64;

pub const INPUT_SIDE: usize = 32;
pub const NUM_CLASSES: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Conv {
    pub in_c: usize,
    pub out_c: usize,
    pub k: usize,
    /// `[out_c][in_c][k][k]` row-major.
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    /// `[outputs][inputs]` row-major.
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

fn xavier(rng: &mut SplitMix64, fan_in: usize, fan_out: usize, len: usize) -> Vec<f32> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..len).map(|_| rng.range_f64(-limit, limit) as f32).collect()
}

impl Conv {
    fn new(rng: &mut SplitMix64, in_c: usize, out_c: usize, k: usize) -> Self {
        let len = out_c * in_c * k * k;
        Self {
            in_c,
            out_c,
            k,
            weights: xavier(rng, in_c * k * k, out_c * k * k, len),
            bias: vec![0.0; out_c],
        }
    }
}

impl Dense {
    fn new(rng: &mut SplitMix64, inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: xavier(rng, inputs, outputs, outputs * inputs),
            bias: vec![0.0; outputs],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeNet {
    pub plus: bool,
    pub conv1: Conv,
    pub conv2: Conv,
    pub conv3: Option<Conv>,
    pub fc1: Dense,
    pub fc2: Dense,
    pub fc3: Dense,
}

impl LeNet {
    pub fn new(plus: bool, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let conv1 = Conv::new(&mut rng, 1, 6, 5);
        let conv2 = Conv::new(&mut rng, 6, 16, 5);
        let conv3 = plus.then(|| Conv::new(&mut rng, 16, 16, 3));
        let flatten = if plus { 16 * 3 * 3 } else { 16 * 5 * 5 };
        let fc1 = Dense::new(&mut rng, flatten, 120);
        let fc2 = Dense::new(&mut rng, 120, 84);
        let fc3 = Dense::new(&mut rng, 84, NUM_CLASSES);
        Self { plus, conv1, conv2, conv3, fc1, fc2, fc3 }
    }

    pub fn flatten_len(&self) -> usize {
        if self.plus { 16 * 3 * 3 } else { 16 * 5 * 5 }
    }

    pub fn weight_l2_norm(&self) -> f64 {
        let mut sum = 0.0f64;
        self.visit_weights(|w| sum += w.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>());
        sum.sqrt()
    }

    fn visit_weights(&self, mut f: impl FnMut(&[f32])) {
        f(&self.conv1.weights);
        f(&self.conv2.weights);
        if let Some(c3) = &self.conv3 {
            f(&c3.weights);
        }
        f(&self.fc1.weights);
        f(&self.fc2.weights);
        f(&self.fc3.weights);
    }
}

// ---------------------------------------------------------------------------
// Primitive layers
// ---------------------------------------------------------------------------

pub fn conv_forward(
    c: &Conv,
    input: &[f32],
    in_h: usize,
    in_w: usize,
    out: &mut [f32],
) {
    let (k, oh, ow) = (c.k, in_h - c.k + 1, in_w - c.k + 1);
    for oc in 0..c.out_c {
        let wbase = oc * c.in_c * k * k;
        for oy in 0..oh {
            for ox in 0..ow {
                let mut acc = c.bias[oc];
                for ic in 0..c.in_c {
                    let ibase = ic * in_h * in_w;
                    let wc = wbase + ic * k * k;
                    for ky in 0..k {
                        let irow = ibase + (oy + ky) * in_w + ox;
                        let wrow = wc + ky * k;
                        for kx in 0..k {
                            acc += input[irow + kx] * c.weights[wrow + kx];
                        }
                    }
                }
                out[oc * oh * ow + oy * ow + ox] = acc;
            }
        }
    }
}

/// Backward through a valid convolution: accumulates weight/bias gradients
/// and, when given, the input gradient (`dinput` must be zeroed).
#[allow(clippy::too_many_arguments)]
pub fn conv_backward(
    c: &Conv,
    input: &[f32],
    in_h: usize,
    in_w: usize,
    dout: &[f32],
    mut dinput: Option<&mut [f32]>,
    gw: &mut [f32],
    gb: &mut [f32],
) {
    let (k, oh, ow) = (c.k, in_h - c.k + 1, in_w - c.k + 1);
    for oc in 0..c.out_c {
        let wbase = oc * c.in_c * k * k;
        for oy in 0..oh {
            for ox in 0..ow {
                let d = dout[oc * oh * ow + oy * ow + ox];
                if d == 0.0 {
                    continue;
                }
                gb[oc] += d;
                for ic in 0..c.in_c {
                    let ibase = ic * in_h * in_w;
                    let wc = wbase + ic * k * k;
                    for ky in 0..k {
                        let irow = ibase + (oy + ky) * in_w + ox;
                        let wrow = wc + ky * k;
                        for kx in 0..k {
                            gw[wrow + kx] += d * input[irow + kx];
                            if let Some(di) = dinput.as_deref_mut() {
                                di[irow + kx] += d * c.weights[wrow + kx];
                            }
                        }
                    }
                }
            }
        }
    }
}

/// 2x2 max pooling with stride 2, recording the flat input index of each
/// winner (first of equals) for the backward pass.
pub fn maxpool2_forward(
    input: &[f32],
    channels: usize,
    h: usize,
    w: usize,
    out: &mut [f32],
    argmax: &mut [u32],
) {
    let (oh, ow) = (h / 2, w / 2);
    for ch in 0..channels {
        let base = ch * h * w;
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best_idx = base + (2 * oy) * w + 2 * ox;
                let mut best = input[best_idx];
                for (dy, dx) in [(0, 1), (1, 0), (1, 1)] {
                    let idx = base + (2 * oy + dy) * w + 2 * ox + dx;
                    if input[idx] > best {
                        best = input[idx];
                        best_idx = idx;
                    }
                }
                out[ch * oh * ow + oy * ow + ox] = best;
                argmax[ch * oh * ow + oy * ow + ox] = best_idx as u32;
            }
        }
    }
}

pub fn maxpool2_backward(dout: &[f32], argmax: &[u32], dinput: &mut [f32]) {
    for (i, &d) in dout.iter().enumerate() {
        dinput[argmax[i] as usize] += d;
    }
}

pub fn dense_forward(d: &Dense, input: &[f32], out: &mut [f32]) {
    for j in 0..d.outputs {
        let row = &d.weights[j * d.inputs..(j + 1) * d.inputs];
        let mut acc = d.bias[j];
        for (x, w) in input.iter().zip(row) {
            acc += x * w;
        }
        out[j] = acc;
    }
}

pub fn dense_backward(
    d: &Dense,
    input: &[f32],
    dout: &[f32],
    mut dinput: Option<&mut [f32]>,
    gw: &mut [f32],
    gb: &mut [f32],
) {
    for j in 0..d.outputs {
        let g = dout[j];
        gb[j] += g;
        let row = &d.weights[j * d.inputs..(j + 1) * d.inputs];
        let grow = &mut gw[j * d.inputs..(j + 1) * d.inputs];
        for i in 0..d.inputs {
            grow[i] += g * input[i];
            if let Some(di) = dinput.as_deref_mut() {
                di[i] += g * row[i];
            }
        }
    }
}

pub fn relu_inplace(x: &mut [f32]) {
    for v in x.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Gate a gradient by the stored post-activation values.
pub fn relu_backward(post: &[f32], d: &mut [f32]) {
    for (g, &p) in d.iter_mut().zip(post) {
        if p <= 0.0 {
            *g = 0.0;
        }
    }
}

/// Softmax cross-entropy: returns the loss and writes `p - onehot(label)`
/// into `dlogits`.
pub fn softmax_ce(logits: &[f32], label: u8, dlogits: &mut [f32]) -> f32 {
    let max = logits.iter().cloned().fold(f32::NEG_INFINITY, f32::max);
    let mut sum = 0.0f32;
    for (d, &z) in dlogits.iter_mut().zip(logits) {
        *d = (z - max).exp();
        sum += *d;
    }
    let p_label = dlogits[label as usize] / sum;
    for d in dlogits.iter_mut() {
        *d /= sum;
    }
    dlogits[label as usize] -= 1.0;
    -(p_label.max(1e-30)).ln()
}

/// Zero-pad a `rows x cols` byte image into the 32x32 unit-scale input.
pub fn pad_to_input(image: &[u8], rows: usize, cols: usize, out: &mut [f32]) {
    out.fill(0.0);
    let off_y = (INPUT_SIDE - rows) / 2;
    let off_x = (INPUT_SIDE - cols) / 2;
    for y in 0..rows {
        for x in 0..cols {
            out[(y + off_y) * INPUT_SIDE + x + off_x] = image[y * cols + x] as f32 / 255.0;
        }
    }
}

// ---------------------------------------------------------------------------
// Whole-network forward/backward over a trace
// ---------------------------------------------------------------------------

/// All forward activations of one sample, plus backward scratch.
pub struct Workspace {
    pub x0: Vec<f32>,
    pub a1: Vec<f32>,
    pub p1: Vec<f32>,
    pub arg1: Vec<u32>,
    pub a2: Vec<f32>,
    pub p2: Vec<f32>,
    pub arg2: Vec<u32>,
    pub a3: Vec<f32>,
    pub f1: Vec<f32>,
    pub f2: Vec<f32>,
    pub logits: Vec<f32>,
    // backward scratch, same shapes
    d_a1: Vec<f32>,
    d_p1: Vec<f32>,
    d_a2: Vec<f32>,
    d_p2: Vec<f32>,
    d_a3: Vec<f32>,
    d_f1: Vec<f32>,
    d_f2: Vec<f32>,
    d_logits: Vec<f32>,
}

impl Workspace {
    pub fn new(plus: bool) -> Self {
        Self {
            x0: vec![0.0; 32 * 32],
            a1: vec![0.0; 6 * 28 * 28],
            p1: vec![0.0; 6 * 14 * 14],
            arg1: vec![0; 6 * 14 * 14],
            a2: vec![0.0; 16 * 10 * 10],
            p2: vec![0.0; 16 * 5 * 5],
            arg2: vec![0; 16 * 5 * 5],
            a3: vec![0.0; if plus { 144 } else { 0 }],
            f1: vec![0.0; 120],
            f2: vec![0.0; 84],
            logits: vec![0.0; NUM_CLASSES],
            d_a1: vec![0.0; 6 * 28 * 28],
            d_p1: vec![0.0; 6 * 14 * 14],
            d_a2: vec![0.0; 16 * 10 * 10],
            d_p2: vec![0.0; 16 * 5 * 5],
            d_a3: vec![0.0; if plus { 144 } else { 0 }],
            d_f1: vec![0.0; 120],
            d_f2: vec![0.0; 84],
            d_logits: vec![0.0; NUM_CLASSES],
            _flat: flat,
        }
    }

    fn flatten(&self) -> &[f32] {
        if self.a3.is_empty() { &self.p2 } else { &self.a3 }
    }
}

impl LeNet {
    /// Float forward from `ws.x0`; leaves every activation in the workspace.
    pub fn forward(&self, ws: &mut Workspace) {
        conv_forward(&self.conv1, &ws.x0, 32, 32, &mut ws.a1);
        relu_inplace(&mut ws.a1);
        maxpool2_forward(&ws.a1, 6, 28, 28, &mut ws.p1, &mut ws.arg1);
        conv_forward(&self.conv2, &ws.p1, 14, 14, &mut ws.a2);
        relu_inplace(&mut ws.a2);
        maxpool2_forward(&ws.a2, 16, 10, 10, &mut ws.p2, &mut ws.arg2);
        if let Some(c3) = &self.conv3 {
            conv_forward(c3, &ws.p2, 5, 5, &mut ws.a3);
            relu_inplace(&mut ws.a3);
        }
        let flat: &[f32] = if self.plus { &ws.a3 } else { &ws.p2 };
        // split borrows: forward into local buffers
        let mut f1 = std::mem::take(&mut ws.f1);
        dense_forward(&self.fc1, flat, &mut f1);
        relu_inplace(&mut f1);
        dense_forward(&self.fc2, &f1, &mut ws.f2);
        relu_inplace(&mut ws.f2);
        dense_forward(&self.fc3, &ws.f2, &mut ws.logits);
        ws.f1 = f1;
    }

    /// Backward from the recorded trace, accumulating into `grads`.
    /// Returns the cross-entropy loss of the sample.
    pub fn backward_from_trace(&self, ws: &mut Workspace, label: u8, grads: &mut Grads) -> f32 {
        let loss = softmax_ce(&ws.logits, label, &mut ws.d_logits);
        dense_backward(
            &self.fc3,
            &ws.f2,
            &ws.d_logits,
            Some(&mut ws.d_f2),
            &mut grads.f3w,
            &mut grads.f3b,
        );
        relu_backward(&ws.f2, &mut ws.d_f2);
        dense_backward(
            &self.fc2,
            &ws.f1,
            &ws.d_f2,
            Some(&mut ws.d_f1),
            &mut grads.f2w,
            &mut grads.f2b,
        );
        relu_backward(&ws.f1, &mut ws.d_f1);
        let d_flat: &mut Vec<f32> = if self.plus { &mut ws.d_a3 } else { &mut ws.d_p2 };
        d_flat.fill(0.0);
        let flat_in: &[f32] = if self.plus { &ws.a3 } else { &ws.p2 };
        dense_backward(
            &self.fc1,
            flat_in,
            &ws.d_f1,
            Some(d_flat),
            &mut grads.f1w,
            &mut grads.f1b,
        );
        if let Some(c3) = &self.conv3 {
            relu_backward(&ws.a3, &mut ws.d_a3);
            ws.d_p2.fill(0.0);
            conv_backward(
                c3,
                &ws.p2,
                5,
                5,
                &ws.d_a3,
                Some(&mut ws.d_p2),
                grads.c3w.as_mut().expect("plus grads"),
                grads.c3b.as_mut().expect("plus grads"),
            );
        }
        ws.d_a2.fill(0.0);
        maxpool2_backward(&ws.d_p2, &ws.arg2, &mut ws.d_a2);
        relu_backward(&ws.a2, &mut ws.d_a2);
        ws.d_p1.fill(0.0);
        conv_backward(
            &self.conv2,
            &ws.p1,
            14,
            14,
            &ws.d_a2,
            Some(&mut ws.d_p1),
            &mut grads.c2w,
            &mut grads.c2b,
        );
        ws.d_a1.fill(0.0);
        maxpool2_backward(&ws.d_p1, &ws.arg1, &mut ws.d_a1);
        relu_backward(&ws.a1, &mut ws.d_a1);
        conv_backward(&self.conv1, &ws.x0, 32, 32, &ws.d_a1, None, &mut grads.c1w, &mut grads.c1b);
        loss
    }

    /// Predicted class of a raw byte image.
    pub fn predict(&self, image: &[u8], rows: usize, cols: usize, ws: &mut Workspace) -> u8 {
        pad_to_input(image, rows, cols, &mut ws.x0);
        self.forward(ws);
        argmax_f32(&ws.logits)
    }
}

pub fn argmax_f32(x: &[f32]) -> u8 {
    let mut best = 0usize;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    best as u8
}

// ---------------------------------------------------------------------------
// Gradients and the optimizer step
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Grads {
    pub c1w: Vec<f32>,
    pub c1b: Vec<f32>,
    pub c2w: Vec<f32>,
    pub c2b: Vec<f32>,
    pub c3w: Option<Vec<f32>>,
    pub c3b: Option<Vec<f32>>,
    pub f1w: Vec<f32>,
    pub f1b: Vec<f32>,
    pub f2w: Vec<f32>,
    pub f2b: Vec<f32>,
    pub f3w: Vec<f32>,
    pub f3b: Vec<f32>,
}

impl Grads {
    pub fn zeros_like(model: &LeNet) -> Self {
        Self {
            c1w: vec![0.0; model.conv1.weights.len()],
            c1b: vec![0.0; model.conv1.bias.len()],
            c2w: vec![0.0; model.conv2.weights.len()],
            c2b: vec![0.0; model.conv2.bias.len()],
            c3w: model.conv3.as_ref().map(|c| vec![0.0; c.weights.len()]),
            c3b: model.conv3.as_ref().map(|c| vec![0.0; c.bias.len()]),
            f1w: vec![0.0; model.fc1.weights.len()],
            f1b: vec![0.0; model.fc1.bias.len()],
            f2w: vec![0.0; model.fc2.weights.len()],
            f2b: vec![0.0; model.fc2.bias.len()],
            f3w: vec![0.0; model.fc3.weights.len()],
            f3b: vec![0.0; model.fc3.bias.len()],
        }
    }

    pub fn add(&mut self, other: &Grads) {
        fn axpy(dst: &mut [f32], src: &[f32]) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        axpy(&mut self.c1w, &other.c1w);
        axpy(&mut self.c1b, &other.c1b);
        axpy(&mut self.c2w, &other.c2w);
        axpy(&mut self.c2b, &other.c2b);
        if let (Some(d), Some(s)) = (self.c3w.as_mut(), other.c3w.as_ref()) {
            axpy(d, s);
        }
        if let (Some(d), Some(s)) = (self.c3b.as_mut(), other.c3b.as_ref()) {
            axpy(d, s);
        }
        axpy(&mut self.f1w, &other.f1w);
        axpy(&mut self.f1b, &other.f1b);
        axpy(&mut self.f2w, &other.f2w);
        axpy(&mut self.f2b, &other.f2b);
        axpy(&mut self.f3w, &other.f3w);
        axpy(&mut self.f3b, &other.f3b);
    }

    pub fn has_nan(&self) -> bool {
        let bad = |v: &[f32]| v.iter().any(|x| !x.is_finite());
        bad(&self.c1w)
            || bad(&self.c2w)
            || self.c3w.as_deref().is_some_and(bad)
            || bad(&self.f1w)
            || bad(&self.f2w)
            || bad(&self.f3w)
    }
}

/// One SGD step with momentum, L2 weight decay, and a gradient scale
/// (typically `1 / batch_size`). `target` is updated in place.
pub fn sgd_step(
    target: &mut LeNet,
    grads: &Grads,
    velocity: &mut Grads,
    lr: f32,
    l2: f32,
    momentum: f32,
    scale: f32,
) {
    fn upd(w: &mut [f32], g: &[f32], v: &mut [f32], lr: f32, l2: f32, mom: f32, scale: f32) {
        for i in 0..w.len() {
            let grad = g[i] * scale + l2 * w[i];
            v[i] = mom * v[i] + grad;
            w[i] -= lr * v[i];
        }
    }
    upd(&mut target.conv1.weights, &grads.c1w, &mut velocity.c1w, lr, l2, momentum, scale);
    upd(&mut target.conv1.bias, &grads.c1b, &mut velocity.c1b, lr, 0.0, momentum, scale);
    upd(&mut target.conv2.weights, &grads.c2w, &mut velocity.c2w, lr, l2, momentum, scale);
    upd(&mut target.conv2.bias, &grads.c2b, &mut velocity.c2b, lr, 0.0, momentum, scale);
    if let Some(c3) = target.conv3.as_mut() {
        upd(
            &mut c3.weights,
            grads.c3w.as_ref().expect("plus grads"),
            velocity.c3w.as_mut().expect("plus grads"),
            lr,
            l2,
            momentum,
            scale,
        );
        upd(
            &mut c3.bias,
            grads.c3b.as_ref().expect("plus grads"),
            velocity.c3b.as_mut().expect("plus grads"),
            lr,
            0.0,
            momentum,
            scale,
        );
    }
    upd(&mut target.fc1.weights, &grads.f1w, &mut velocity.f1w, lr, l2, momentum, scale);
    upd(&mut target.fc1.bias, &grads.f1b, &mut velocity.f1b, lr, 0.0, momentum, scale);
    upd(&mut target.fc2.weights, &grads.f2w, &mut velocity.f2w, lr, l2, momentum, scale);
    upd(&mut target.fc2.bias, &grads.f2b, &mut velocity.f2b, lr, 0.0, momentum, scale);
    upd(&mut target.fc3.weights, &grads.f3w, &mut velocity.f3w, lr, l2, momentum, scale);
    upd(&mut target.fc3.bias, &grads.f3b, &mut velocity.f3b, lr, 0.0, momentum, scale);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_chain() {
        for plus in [false, true] {
            let model = LeNet::new(plus, 1);
            let mut ws = Workspace::new(plus);
            ws.x0[40] = 0.7;
            model.forward(&mut ws);
            assert_eq!(ws.logits.len(), 10);
            assert!(ws.logits.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn seeded_init_is_reproducible() {
        assert_eq!(LeNet::new(false, 9), LeNet::new(false, 9));
        assert_ne!(LeNet::new(false, 9).conv1.weights, LeNet::new(false, 10).conv1.weights);
    }

    #[test]
    fn gradients_match_finite_differences() {
        // Spot-check a few parameters of every tensor against central
        // differences on a fixed sample.
        let model = LeNet::new(false, 3);
        let mut ws = Workspace::new(false);
        for (i, v) in ws.x0.iter_mut().enumerate() {
            *v = ((i * 37) % 191) as f32 / 191.0;
        }
        let x0 = ws.x0.clone();
        let label = 4u8;

        let mut grads = Grads::zeros_like(&model);
        model.forward(&mut ws);
        model.backward_from_trace(&mut ws, label, &mut grads);

        let eps = 2e-3f32;
        let mut check = |get: &dyn Fn(&LeNet) -> f32,
                         set: &dyn Fn(&mut LeNet, f32),
                         analytic: f32| {
            let mut m2 = model.clone();
            let base = get(&model);
            set(&mut m2, base + eps);
            let mut w2 = Workspace::new(false);
            w2.x0.copy_from_slice(&x0);
            m2.forward(&mut w2);
            let mut d = vec![0.0; 10];
            let hi = softmax_ce(&w2.logits, label, &mut d);
            set(&mut m2, base - eps);
            w2.x0.copy_from_slice(&x0);
            m2.forward(&mut w2);
            let lo = softmax_ce(&w2.logits, label, &mut d);
            let numeric = (hi - lo) / (2.0 * eps);
            assert!(
                (numeric - analytic).abs() < 2e-2_f32.max(0.15 * analytic.abs()),
                "numeric {numeric} vs analytic {analytic}"
            );
        };

        check(&|m| m.conv1.weights[7], &|m, v| m.conv1.weights[7] = v, grads.c1w[7]);
        check(&|m| m.conv2.weights[100], &|m, v| m.conv2.weights[100] = v, grads.c2w[100]);
        check(&|m| m.fc1.weights[500], &|m, v| m.fc1.weights[500] = v, grads.f1w[500]);
        check(&|m| m.fc3.weights[55], &|m, v| m.fc3.weights[55] = v, grads.f3w[55]);
        check(&|m| m.fc3.bias[2], &|m, v| m.fc3.bias[2] = v, grads.f3b[2]);
    }

    #[test]
    fn pad_centers_image() {
        let img = vec![255u8; 28 * 28];
        let mut out = vec![0.0; 1024];
        pad_to_input(&img, 28, 28, &mut out);
        assert_eq!(out[0], 0.0);
        assert_eq!(out[2 * 32 + 2], 1.0);
        assert_eq!(out[29 * 32 + 29], 1.0);
        assert_eq!(out[31 * 32 + 31], 0.0);
    }
}
