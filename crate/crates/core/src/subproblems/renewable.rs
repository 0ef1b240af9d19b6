/// Minimiser of `−λ·p + ρ/2 (R − p)²` over `[0, cap]`.
pub fn res_update(lambda: f64, residual: f64, rho: f64, cap: f64) -> f64 {
    (residual + lambda / rho).clamp(0.0, cap)
}
