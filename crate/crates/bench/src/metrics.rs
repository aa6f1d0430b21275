/// Read edges per second: `m * iterations / runtime`.
pub fn compute_reps(m: u64, iterations: u32, runtime_s: f64) -> f64 {
    m as f64 * iterations as f64 / runtime_s
}

pub fn percentage_error(simulated: f64, truth: f64) -> f64 {
    100.0 * (simulated - truth).abs() / truth
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    let var = xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / xs.len() as f64;
    var.sqrt() / mu
}
