/// Adam moment accumulators over a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    step: u64,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    pub fn new(param_count: usize) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
            m: vec![0.0; param_count],
            v: vec![0.0; param_count],
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected update of `params` against `grad`.
    pub fn update(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let (b1, b2) = (self.beta1, self.beta2);
        for (((p, g), m), v) in params.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        // with bias correction the first step is lr * g / (|g| + eps)
        let mut adam = Adam::new(2);
        let mut p = vec![1.0, -1.0];
        adam.update(&mut p, &[0.5, -2.0], 0.1);
        assert!((p[0] - 0.9).abs() < 1e-7);
        assert!((p[1] + 0.9).abs() < 1e-7);
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut adam = Adam::new(3);
        let mut p = vec![0.3, 0.2, 0.1];
        adam.update(&mut p, &[0.0; 3], 0.01);
        assert_eq!(p, vec![0.3, 0.2, 0.1]);
        assert_eq!(adam.step_count(), 1);
    }

    #[test]
    fn minimizes_quadratic() {
        let mut adam = Adam::new(1);
        let mut p = vec![5.0];
        for _ in 0..5000 {
            let g = [2.0 * (p[0] - 1.5)];
            adam.update(&mut p, &g, 0.01);
        }
        assert!((p[0] - 1.5).abs() < 1e-3);
    }
}
