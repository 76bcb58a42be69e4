//! Bias-corrected Adam over flat parameter slices.

#[derive(Debug, Clone)]
pub struct Adam {
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
}

/// First and second moment buffers for one parameter tensor.
#[derive(Debug, Clone)]
pub struct AdamSlot {
    m: Vec<f64>,
    v: Vec<f64>,
}

impl AdamSlot {
    pub fn new(len: usize) -> Self {
        AdamSlot {
            m: vec![0.0; len],
            v: vec![0.0; len],
        }
    }
}

impl Adam {
    pub fn new(learning_rate: f64) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step: 0,
        }
    }

    /// Advances the shared step counter; call once per iteration before
    /// updating the slots.
    pub fn begin_step(&mut self) {
        self.step += 1;
    }

    pub fn update(&self, slot: &mut AdamSlot, params: &mut [f64], grad: &[f64]) {
        debug_assert!(self.step > 0, "begin_step not called");
        debug_assert_eq!(params.len(), grad.len());
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        for (((p, &g), m), v) in params
            .iter_mut()
            .zip(grad)
            .zip(slot.m.iter_mut())
            .zip(slot.v.iter_mut())
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= self.learning_rate * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}
