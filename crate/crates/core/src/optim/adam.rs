/// Adam hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for Adam {
    fn default() -> Self {
        Self { learning_rate: 0.05, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First and second moment estimates plus the step counter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }
}

impl Adam {
    /// One bias-corrected update, in place. `lr_scale` multiplies the
    /// learning rate (used for warmup).
    pub fn step(&self, state: &mut AdamState, params: &mut [f64], grad: &[f64], lr_scale: f64) {
        assert_eq!(params.len(), grad.len(), "parameter/gradient length");
        assert_eq!(state.m.len(), grad.len(), "optimizer state length");
        state.t += 1;
        let t = state.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        let lr = self.learning_rate * lr_scale;
        for (((x, &g), m), v) in params.iter_mut().zip(grad).zip(&mut state.m).zip(&mut state.v) {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *x -= lr * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
        }
    }
}

pub fn adam_step(adam: &Adam, state: &AdamState, params: &[f64], grad: &[f64]) -> (AdamState, Vec<f64>) {
    let mut s = state.clone();
    let mut p = params.to_vec();
    adam.step(&mut s, &mut p, grad, 1.0);
    (s, p)
}
