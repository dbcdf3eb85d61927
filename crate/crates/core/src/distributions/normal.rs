use statrs::function::erf::erfc;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `1 - Phi(x)`, computed without cancellation in the upper tail.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal loss function `G(k) = phi(k) - k (1 - Phi(k)) = E[(Z - k)+]`.
pub fn normal_loss(k: f64) -> f64 {
    (std_normal_pdf(k) - k * std_normal_sf(k)).max(0.0)
}
