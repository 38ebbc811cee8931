//! Discrete Grünwald–Letnikov differintegral operators.
//!
//! The differintegral of order ν at step size h is approximated by the
//! weighted history sum
//!
//! ```text
//! D^ν f(t_k) ≈ h^{−ν} · Σ_{j=0..k} w_j · f(t_k − j·h)
//! ```
//!
//! with coefficients `w_j = (−1)^j · binom(ν, j)`, computed by the
//! multiplicative recursion `w_0 = 1`, `w_j = w_{j−1}·(1 − (ν+1)/j)` instead
//! of direct gamma-function evaluation. Negative orders integrate, positive
//! orders differentiate, and integer orders recover the classical finite
//! differences exactly (the recursion zeroes every weight past `j = ν`).
//!
//! For use inside a controller the history is truncated to a fixed window
//! ("short memory"): per-sample cost and storage stay bounded at the price
//! of a truncation transient that decays with the window length. History is
//! zero-initialized, i.e. the signal is taken to be zero before start-up.

/// Grünwald–Letnikov weight sequence `w_0..w_n` for the given order.
pub fn gl_weights(order: f64, n: usize) -> Vec<f64> {
    let mut weights = Vec::with_capacity(n + 1);
    let mut w = 1.0;
    weights.push(w);
    for j in 1..=n {
        w *= 1.0 - (order + 1.0) / j as f64;
        weights.push(w);
    }
    weights
}

/// Streaming differintegral of one signal at a fixed order and step size.
///
/// Weights are precomputed once at construction; each `apply` pushes one
/// sample and evaluates the truncated history sum.
#[derive(Debug, Clone)]
pub struct GlOperator {
    order: f64,
    h: f64,
    scale: f64,
    weights: Vec<f64>,
    /// Ring buffer of past samples; `head` indexes the newest.
    history: Vec<f64>,
    head: usize,
    filled: usize,
}

impl GlOperator {
    /// Creates an operator of the given fractional order.
    ///
    /// `memory_len` is the history truncation length in samples and must be
    /// at least 1; `h` is the sampling step and must be positive.
    pub fn new(order: f64, h: f64, memory_len: usize) -> Self {
        assert!(memory_len >= 1, "memory_len must be at least 1");
        assert!(h > 0.0 && h.is_finite(), "step size must be positive");
        assert!(order.is_finite(), "order must be finite");
        Self {
            order,
            h,
            scale: h.powf(-order),
            weights: gl_weights(order, memory_len - 1),
            history: vec![0.0; memory_len],
            head: 0,
            filled: 0,
        }
    }

    /// Fractional order ν of this operator.
    pub fn order(&self) -> f64 {
        self.order
    }

    /// Sampling step h in seconds.
    pub fn step(&self) -> f64 {
        self.h
    }

    /// History truncation length in samples.
    pub fn memory_len(&self) -> usize {
        self.history.len()
    }

    /// Pushes a sample and returns the differintegral at the new instant.
    pub fn apply(&mut self, sample: f64) -> f64 {
        let len = self.history.len();
        self.head = (self.head + len - 1) % len;
        self.history[self.head] = sample;
        if self.filled < len {
            self.filled += 1;
        }

        let mut acc = 0.0;
        for j in 0..self.filled {
            acc += self.weights[j] * self.history[(self.head + j) % len];
        }
        self.scale * acc
    }

    /// Clears the history back to the zero-initialized state.
    pub fn reset(&mut self) {
        self.history.fill(0.0);
        self.head = 0;
        self.filled = 0;
    }

    /// Heap footprint of the weight and history buffers in bytes.
    pub fn buffer_bytes(&self) -> usize {
        (self.weights.capacity() + self.history.capacity()) * std::mem::size_of::<f64>()
    }
}
