use rand::Rng;

use super::AgentError;

/// Fully connected Q-network: rectifier on hidden layers, identity output.
///
/// Parameters live in one flat vector, layer-major; each layer stores its
/// `out x in` row-major weight matrix followed by its `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct QNetwork {
    dims: Vec<usize>,
    params: Vec<f64>,
    offsets: Vec<usize>,
}

/// Per-layer activations of a batch forward pass. `acts[0]` is the input,
/// `acts[l]` the rectified output of hidden layer `l`.
#[derive(Debug, Clone)]
pub struct Trace {
    pub rows: usize,
    pub acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn last_hidden(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

pub fn param_count(dims: &[usize]) -> usize {
    dims.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

fn layer_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut at = 0;
    offsets.push(0);
    for w in dims.windows(2) {
        at += w[1] * w[0] + w[1];
        offsets.push(at);
    }
    offsets
}

fn check_dims(dims: &[usize]) -> Result<(), AgentError> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(AgentError::Shape(format!("invalid layer dims {dims:?}")));
    }
    Ok(())
}

/// `c (m x n) += a (m x k) * b (k x n)` with explicit row/column strides.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    rsa: usize,
    csa: usize,
    b: &[f64],
    rsb: usize,
    csb: usize,
    c: &mut [f64],
    rsc: usize,
) {
    if m == 0 || n == 0 || k == 0 {
        return;
    }
    assert!(a.len() > (m - 1) * rsa + (k - 1) * csa);
    assert!(b.len() > (k - 1) * rsb + (n - 1) * csb);
    assert!(c.len() > (m - 1) * rsc + (n - 1));
    // SAFETY: the asserts above bound every index the kernel touches.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            rsa as isize,
            csa as isize,
            b.as_ptr(),
            rsb as isize,
            csb as isize,
            1.0,
            c.as_mut_ptr(),
            rsc as isize,
            1,
        );
    }
}

impl QNetwork {
    pub fn zeros(dims: &[usize]) -> Result<Self, AgentError> {
        check_dims(dims)?;
        Ok(Self {
            dims: dims.to_vec(),
            params: vec![0.0; param_count(dims)],
            offsets: layer_offsets(dims),
        })
    }

    /// Weights uniform in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn glorot<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self, AgentError> {
        let mut net = Self::zeros(dims)?;
        for l in 0..net.layer_count() {
            let (fan_in, fan_out) = (net.dims[l], net.dims[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let start = net.offsets[l];
            for p in &mut net.params[start..start + fan_in * fan_out] {
                *p = rng.gen_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn from_params(dims: &[usize], params: Vec<f64>) -> Result<Self, AgentError> {
        check_dims(dims)?;
        if params.len() != param_count(dims) {
            return Err(AgentError::Shape(format!(
                "{} parameters given for dims {dims:?} (expected {})",
                params.len(),
                param_count(dims)
            )));
        }
        Ok(Self {
            dims: dims.to_vec(),
            params,
            offsets: layer_offsets(dims),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn input_len(&self) -> usize {
        self.dims[0]
    }

    pub fn output_len(&self) -> usize {
        self.dims[self.dims.len() - 1]
    }

    pub fn layer_count(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Offsets of layer `l`'s weights and biases in the flat parameter vector.
    pub fn layer_ranges(&self, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        let start = self.offsets[l];
        let w_end = start + self.dims[l] * self.dims[l + 1];
        (start..w_end, w_end..self.offsets[l + 1])
    }

    fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let (w, b) = self.layer_ranges(l);
        (&self.params[w], &self.params[b])
    }

    pub fn copy_from(&mut self, other: &QNetwork) {
        debug_assert_eq!(self.dims, other.dims);
        self.params.copy_from_slice(&other.params);
    }

    fn affine(&self, l: usize, x: &[f64], rows: usize, relu: bool) -> Vec<f64> {
        let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
        let (w, b) = self.layer(l);
        let mut y = Vec::with_capacity(rows * fan_out);
        for _ in 0..rows {
            y.extend_from_slice(b);
        }
        gemm(rows, fan_in, fan_out, x, fan_in, 1, w, 1, fan_in, &mut y, fan_out);
        if relu {
            for v in &mut y {
                *v = v.max(0.0);
            }
        }
        y
    }

    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>, AgentError> {
        if features.len() != self.input_len() {
            return Err(AgentError::Shape(format!(
                "network expects {} features, got {}",
                self.input_len(),
                features.len()
            )));
        }
        Ok(self.forward_batch(features, 1))
    }

    /// Q-values for `rows` stacked inputs, `rows x output_len` row-major.
    pub fn forward_batch(&self, x: &[f64], rows: usize) -> Vec<f64> {
        let trace = self.trace(x, rows);
        self.affine(self.layer_count() - 1, trace.last_hidden(), rows, false)
    }

    /// Forward pass through the hidden layers only.
    pub fn trace(&self, x: &[f64], rows: usize) -> Trace {
        assert_eq!(x.len(), rows * self.input_len(), "input batch shape");
        let mut acts = Vec::with_capacity(self.layer_count());
        acts.push(x.to_vec());
        for l in 0..self.layer_count() - 1 {
            let y = self.affine(l, &acts[l], rows, true);
            acts.push(y);
        }
        Trace { rows, acts }
    }

    /// `Q(s_i, a_i)` for each row, evaluating only the selected output units.
    pub fn gather(&self, trace: &Trace, actions: &[usize]) -> Vec<f64> {
        let l = self.layer_count() - 1;
        let fan_in = self.dims[l];
        let (w, b) = self.layer(l);
        let h = trace.last_hidden();
        actions
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let row = &w[a * fan_in..(a + 1) * fan_in];
                let x = &h[i * fan_in..(i + 1) * fan_in];
                b[a] + row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>()
            })
            .collect()
    }

    /// Accumulates into `grad` the gradient of `sum_i grad_q[i] * Q(s_i, a_i)`.
    pub fn backward_gathered(&self, trace: &Trace, actions: &[usize], grad_q: &[f64], grad: &mut [f64]) {
        assert_eq!(grad.len(), self.params.len());
        let rows = trace.rows;
        let last = self.layer_count() - 1;
        let fan_in = self.dims[last];
        let (w_range, b_range) = self.layer_ranges(last);
        let w = &self.params[w_range.clone()];
        let h = trace.last_hidden();

        let mut delta = vec![0.0; rows * fan_in];
        for (i, (&a, &g)) in actions.iter().zip(grad_q).enumerate() {
            if g == 0.0 {
                continue;
            }
            let x = &h[i * fan_in..(i + 1) * fan_in];
            let gw = &mut grad[w_range.start + a * fan_in..w_range.start + (a + 1) * fan_in];
            for (gw, xv) in gw.iter_mut().zip(x) {
                *gw += g * xv;
            }
            grad[b_range.start + a] += g;
            let row = &w[a * fan_in..(a + 1) * fan_in];
            for ((d, wv), xv) in delta[i * fan_in..(i + 1) * fan_in].iter_mut().zip(row).zip(x) {
                *d = if *xv > 0.0 { g * wv } else { 0.0 };
            }
        }

        for l in (0..last).rev() {
            let (fan_in, fan_out) = (self.dims[l], self.dims[l + 1]);
            let (w_range, b_range) = self.layer_ranges(l);
            let x = &trace.acts[l];
            gemm(
                fan_out,
                rows,
                fan_in,
                &delta,
                1,
                fan_out,
                x,
                fan_in,
                1,
                &mut grad[w_range.clone()],
                fan_in,
            );
            let gb = &mut grad[b_range];
            for r in 0..rows {
                for (g, d) in gb.iter_mut().zip(&delta[r * fan_out..(r + 1) * fan_out]) {
                    *g += d;
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![0.0; rows * fan_in];
            gemm(
                rows,
                fan_out,
                fan_in,
                &delta,
                fan_out,
                1,
                &self.params[w_range],
                fan_in,
                1,
                &mut prev,
                fan_in,
            );
            for (p, xv) in prev.iter_mut().zip(x) {
                if *xv <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }
}
