use thiserror::Error;

/// Discriminator outputs are clamped into `[LOG_CLAMP, 1 - LOG_CLAMP]` before logs.
pub const LOG_CLAMP: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GanError {
    #[error("{0} is empty")]
    EmptyInput(&'static str),
    #[error("{name}[{index}] = {value} is outside [0, 1]")]
    Domain {
        name: &'static str,
        index: usize,
        value: f64,
    },
}

fn mean_log(name: &'static str, values: &[f64], f: impl Fn(f64) -> f64) -> Result<f64, GanError> {
    if values.is_empty() {
        return Err(GanError::EmptyInput(name));
    }
    let mut sum = 0.0;
    for (index, &value) in values.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(GanError::Domain { name, index, value });
        }
        sum += f(value.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP)).ln();
    }
    Ok(sum / values.len() as f64)
}

/// Empirical adversarial value `mean(log D(x)) + mean(log(1 - D(G(z))))`.
///
/// `d_real` holds discriminator outputs on real strokes, `d_fake` on
/// generated ones. The discriminator maximizes this value, the generator
/// minimizes it; an uninformed discriminator (all 0.5) scores `-2 ln 2`.
pub fn gan_objective(d_real: &[f64], d_fake: &[f64]) -> Result<f64, GanError> {
    let real = mean_log("d_real", d_real, |d| d)?;
    let fake = mean_log("d_fake", d_fake, |d| 1.0 - d)?;
    Ok(real + fake)
}
