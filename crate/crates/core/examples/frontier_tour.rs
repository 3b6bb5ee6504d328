//! A quick tour: tax rates, the Pareto frontier, the conflict frontier,
//! and a small scaling run.
//!
//! Run with: `cargo run --example frontier_tour`

use paretax::conflict::{classify_capability, effective_angle_multi, equal_improvement, SafetyPair};
use paretax::frontier::{frontier_curve, max_safety_constrained, optimal_delta_single};
use paretax::geometry::{principal_angle, tax_rate, CapabilitySet, Direction};
use paretax::oracle::{oracle_max_safety, OracleConfig};
use paretax::scaling::scaling_series;

fn main() -> paretax::Result<()> {
    // A safety direction and two capabilities in a toy 4-dimensional
    // activation space. "math" is orthogonal to safety, "reason" overlaps.
    let safety = Direction::new(vec![1.0, 0.0, 0.0, 0.0])?;
    let math = Direction::new(vec![0.0, 1.0, 0.0, 0.0])?;
    let reason = Direction::new(vec![0.6, 0.0, 0.8, 0.0])?;
    let set = CapabilitySet::from_directions(vec![math.clone(), reason.clone()], 1e-10)?;

    let report = tax_rate(&safety, &set)?;
    println!("joint tax        {:.4}", report.joint_tax);
    for (i, tau) in &report.per_task {
        println!("  task {i} tax     {tau:.4}");
    }
    println!("free safety/B    {:.4}", report.free_safety_fraction);

    // The frontier against "reason" alone, and the perturbation that
    // attains it at delta_c = 0.3 under budget 1.
    let alpha = principal_angle(&safety, &reason)?;
    let curve = frontier_curve(alpha, 1.0, 5)?;
    println!("\nfrontier (alpha = {alpha:.4}):");
    for p in &curve.points {
        println!("  delta_c {:+.2}  ->  delta_s {:+.4}", p.delta_c, p.delta_s);
    }
    let delta = optimal_delta_single(&safety, &reason, 1.0, 0.3)?;
    println!(
        "optimal delta at 0.3: norm {:.4}, safety gain {:.4}",
        delta.norm(),
        safety.coords().dot(delta.delta())
    );

    // Independent check by enumeration.
    let cfg = OracleConfig::new(4096)?;
    let brute = oracle_max_safety(&safety, &reason, 1.0, 0.3, &cfg)?;
    println!(
        "enumeration oracle agrees within {:.1e}",
        (safety.coords().dot(delta.delta()) - brute).abs()
    );

    // Holding every capability fixed still leaves the free amount.
    let constrained =
        max_safety_constrained(&safety, &set, &nalgebra::DVector::zeros(4), 1.0)?;
    println!("\nmax safety at zero capability change: {:.4}", constrained.delta_s_max);

    // A second safety objective: how does preserving each capability
    // change the tradeoff between them?
    let helpful = Direction::new(vec![0.5, 0.3, -0.1, 0.8])?;
    let pair = SafetyPair::new(safety.clone(), helpful.clone())?;
    let angle = effective_angle_multi(&pair, &set)?;
    println!(
        "\nsafety pair: rho {:.4}, effective cos(theta) {:.4}, equal gain {:.4}",
        pair.rho(),
        angle.cos_theta,
        equal_improvement(angle.theta)
    );
    for (name, c) in [("math", &math), ("reason", &reason)] {
        let class =
            classify_capability(pair.rho(), c.dot(&safety)?, c.dot(&helpful)?)?;
        println!(
            "  {name:<7} {:<18} effective corr {:+.4} ({})",
            format!("{:?}", class.label),
            class.effective_corr,
            if class.improves_tradeoff { "helps" } else { "neutral or hurts" }
        );
    }

    // How the tax of ten incidental capabilities melts with dimension.
    let series = scaling_series(&[], 10, &[64, 128, 256], 2000, 7)?;
    println!("\nscaling (m' = 10): regime {:?}", series.regime);
    for p in &series.points {
        println!(
            "  d {:>4}: mean tax {:.4} (expected {:.4})",
            p.d,
            p.mean_tax,
            10.0 / p.d as f64
        );
    }
    Ok(())
}
