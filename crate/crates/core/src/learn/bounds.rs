use crate::{Error, Result};

/// Accuracy and confidence for a PAC sample-size question.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacRequest {
    pub epsilon: f64,
    pub delta: f64,
}

impl PacRequest {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("epsilon", epsilon), ("delta", delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        Ok(PacRequest { epsilon, delta })
    }
}

/// Ceiling that ignores floating-point noise just above an integer.
fn ceil_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Overflow(format!("sample bound {x} is not a finite count")));
    }
    let nearest = x.round();
    let n = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    if n >= u64::MAX as f64 {
        return Err(Error::Overflow(format!("sample bound {x} exceeds u64")));
    }
    Ok(n as u64)
}

/// Samples sufficient for a consistent learner over a finite class:
/// `ceil(ln(class_size / delta) / epsilon)`.
pub fn pac_sample_bound(req: &PacRequest, class_size: u64) -> Result<u64> {
    if class_size == 0 {
        return Err(Error::Validation("class size must be positive".into()));
    }
    let req = PacRequest::new(req.epsilon, req.delta)?;
    ceil_count(((class_size as f64).ln() - req.delta.ln()) / req.epsilon)
}

/// `ceil(constant * (vcd + ln(1 / delta)) / epsilon)`. The true constant is
/// unknown, so the result is an order-of-magnitude figure, not a guarantee.
pub fn vc_sample_bound(req: &PacRequest, vcd: u64, constant: f64) -> Result<u64> {
    if vcd == 0 {
        return Err(Error::Validation("VC dimension must be positive".into()));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::Validation(format!("constant must be positive, got {constant}")));
    }
    let req = PacRequest::new(req.epsilon, req.delta)?;
    ceil_count(constant * (vcd as f64 - req.delta.ln()) / req.epsilon)
}
