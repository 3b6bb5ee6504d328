//! Browser bindings for the interactive demo page (`www/index.html`).
//!
//! Three explorers are exposed: the safety-capability Pareto frontier,
//! the safety-safety conflict frontier under capability preservation, and
//! the Monte Carlo tax scaling curve. Curves come back as flat arrays of
//! interleaved coordinates so the page can draw them without extra
//! marshaling.
//!
//! The `ops` module holds the target-independent logic; the exported
//! wrappers only translate errors, so the logic stays testable on the
//! host.

use wasm_bindgen::prelude::*;

mod ops {
    use paretax::conflict::{classify_capability, effective_angle, equal_improvement};
    use paretax::frontier::frontier_curve;
    use paretax::scaling::scaling_series;

    fn stringify(e: paretax::Error) -> String {
        e.to_string()
    }

    fn interleave(curve: &paretax::frontier::FrontierCurve) -> Vec<f64> {
        curve
            .points
            .iter()
            .flat_map(|p| [p.delta_c, p.delta_s])
            .collect()
    }

    pub fn frontier_points(alpha: f64, budget: f64, samples: usize) -> Result<Vec<f64>, String> {
        frontier_curve(alpha, budget, samples)
            .map(|curve| interleave(&curve))
            .map_err(stringify)
    }

    pub fn frontier_summary(alpha: f64, budget: f64) -> Vec<f64> {
        let tax = alpha.cos() * alpha.cos();
        let free = budget * (1.0 - tax).max(0.0).sqrt();
        vec![tax, free, budget * alpha.cos(), budget]
    }

    pub fn conflict_points(rho: f64, a: f64, b: f64, samples: usize) -> Result<Vec<f64>, String> {
        let angle = effective_angle(rho, a, b).map_err(stringify)?;
        frontier_curve(angle.theta, 1.0, samples)
            .map(|curve| interleave(&curve))
            .map_err(stringify)
    }

    pub fn conflict_summary(rho: f64, a: f64, b: f64) -> Result<Vec<f64>, String> {
        let class = classify_capability(rho, a, b).map_err(stringify)?;
        let angle = effective_angle(rho, a, b).map_err(stringify)?;
        Ok(vec![
            angle.cos_theta,
            angle.theta,
            equal_improvement(angle.theta),
            if class.improves_tradeoff { 1.0 } else { 0.0 },
        ])
    }

    pub fn conflict_label(rho: f64, a: f64, b: f64) -> Result<String, String> {
        Ok(classify_capability(rho, a, b)
            .map_err(stringify)?
            .label
            .as_str()
            .to_owned())
    }

    pub fn scaling_points(
        gamma_csv: &str,
        m_prime: usize,
        trials: usize,
        seed: u64,
    ) -> Result<Vec<f64>, String> {
        let gammas = parse_gammas(gamma_csv)?;
        let dims = [16usize, 32, 64, 128, 256];
        let series = scaling_series(&gammas, m_prime, &dims, trials, seed).map_err(stringify)?;
        Ok(series
            .points
            .iter()
            .flat_map(|p| [p.d as f64, p.mean_tax, p.std_error])
            .collect())
    }

    pub fn irreducible_tax_of(gamma_csv: &str) -> Result<f64, String> {
        let gammas = parse_gammas(gamma_csv)?;
        Ok(gammas.iter().fold(0.0, |acc, g| acc + g * g))
    }

    fn parse_gammas(csv: &str) -> Result<Vec<f64>, String> {
        csv.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| format!("bad overlap value \"{s}\""))
            })
            .collect()
    }
}

fn to_js(e: String) -> JsError {
    JsError::new(&e)
}

/// Samples the Pareto frontier: returns `[dc0, ds0, dc1, ds1, ...]`.
#[wasm_bindgen]
pub fn frontier_points(alpha: f64, budget: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    ops::frontier_points(alpha, budget, samples).map_err(to_js)
}

/// Key quantities of a frontier configuration:
/// `[tax, free_safety, peak_dc, peak_ds]` for a single capability at
/// angle `alpha` (so the tax is `cos^2(alpha)`).
#[wasm_bindgen]
pub fn frontier_summary(alpha: f64, budget: f64) -> Vec<f64> {
    ops::frontier_summary(alpha, budget)
}

/// Safety-safety frontier in normalized gains for the effective angle of
/// `(rho, a, b)`: returns `[s2_0, s1_0, s2_1, s1_1, ...]`.
#[wasm_bindgen]
pub fn conflict_points(rho: f64, a: f64, b: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    ops::conflict_points(rho, a, b, samples).map_err(to_js)
}

/// Summary of a conflict configuration:
/// `[cos_theta, theta, equal_gain, improves (0 or 1)]`.
#[wasm_bindgen]
pub fn conflict_summary(rho: f64, a: f64, b: f64) -> Result<Vec<f64>, JsError> {
    ops::conflict_summary(rho, a, b).map_err(to_js)
}

/// Sign-pattern label of a capability against the two safety objectives.
#[wasm_bindgen]
pub fn conflict_label(rho: f64, a: f64, b: f64) -> Result<String, JsError> {
    ops::conflict_label(rho, a, b).map_err(to_js)
}

/// Monte Carlo tax estimates over a fixed dimension ladder:
/// returns `[d0, mean0, stderr0, d1, mean1, stderr1, ...]`.
#[wasm_bindgen]
pub fn scaling_points(
    gamma_csv: String,
    m_prime: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    ops::scaling_points(&gamma_csv, m_prime, trials, seed).map_err(to_js)
}

/// The irreducible tax of a comma-separated overlap list.
#[wasm_bindgen]
pub fn irreducible_tax_of(gamma_csv: String) -> Result<f64, JsError> {
    ops::irreducible_tax_of(&gamma_csv).map_err(to_js)
}
