//! `capacity` and `bochner`: quadrature cross-checks of the continuum
//! quantities the discrete pipeline is measured against.

use std::f64::consts::PI;

use clap::Args;
use cornerhodge::oracles::{
    bochner_identity, capacity_energy, capacity_energy_exact, capacity_schedule,
    defect_upper_bound, l2_defect, TestForm,
};
use cornerhodge::polygeom::PolygonalDomain;
use cornerhodge::report::{fmt_g17, ChartSeries, CsvTable, SvgChart, Verdict};

use crate::config::{CliError, Ctx};

/// Relative agreement required between closed-form and quadrature energy.
const ENERGY_REL_TOL: f64 = 1e-8;

/// Identity tolerance for compliant forms: `|lhs − rhs| ≤ tol · (1 + rhs)`.
const BOCHNER_REL_TOL: f64 = 1e-8;

/// Agreement required of the non-compliant control form with its
/// analytically known boundary contribution.
const VIOLATION_TOL: f64 = 1e-6;

#[derive(Args, Debug, Default)]
pub struct CapacityArgs {
    /// Comma-separated cutoff exponents in (0, 1).
    #[arg(long, value_name = "LIST")]
    pub alpha_series: Option<String>,
    /// Comma-separated cutoff radii in (0, 1).
    #[arg(long, value_name = "LIST")]
    pub eps_series: Option<String>,
    /// Comma-separated sector half-angles in (0, π).
    #[arg(long, value_name = "LIST")]
    pub beta: Option<String>,
    /// Quadrature panels per radial integral.
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// α values for the coupled schedule ε = α^(1/α), decreasing.
    #[arg(long, value_name = "LIST")]
    pub schedule_alphas: Option<String>,
}

pub fn capacity(ctx: &Ctx, args: &CapacityArgs) -> Result<Verdict, CliError> {
    let alphas = ctx.list(args.alpha_series.as_deref(), "alpha-series", &[0.05, 0.1, 0.5])?;
    let epss = ctx.list(args.eps_series.as_deref(), "eps-series", &[1e-4, 1e-2, 0.25])?;
    let betas = ctx.list(args.beta.as_deref(), "beta", &[PI / 4.0, 3.0 * PI / 4.0])?;
    let panels = ctx.scalar(args.quad_points, "quad-points", 64)?;
    let schedule_alphas =
        ctx.list(args.schedule_alphas.as_deref(), "schedule-alphas", &[0.4, 0.2, 0.1, 0.05])?;

    for &a in alphas.iter().chain(&schedule_alphas) {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Usage(format!("alpha must lie in (0,1), got {a}")));
        }
    }
    for &e in &epss {
        if !(e > 0.0 && e < 1.0) {
            return Err(CliError::Usage(format!("eps must lie in (0,1), got {e}")));
        }
    }
    for &b in &betas {
        if !(b > 0.0 && b < PI) {
            return Err(CliError::Usage(format!("beta must lie in (0,pi), got {b}")));
        }
    }

    let mut table =
        CsvTable::new(&["alpha", "eps", "beta", "closed_form", "quadrature", "bound", "defect"]);
    let mut verdict = Verdict::Pass;
    let mut worst_rel = 0.0f64;
    for &alpha in &alphas {
        for &eps in &epss {
            for &beta in &betas {
                let closed = capacity_energy_exact(alpha, eps, beta);
                let quad = capacity_energy(alpha, eps, beta, panels);
                let bound = defect_upper_bound(alpha, eps, beta);
                let defect = l2_defect(alpha, eps, beta, panels);
                let rel = (closed - quad).abs() / closed;
                worst_rel = worst_rel.max(rel);
                if rel > ENERGY_REL_TOL || defect > bound {
                    verdict = Verdict::Fail;
                }
                table.push_row(vec![
                    fmt_g17(alpha),
                    fmt_g17(eps),
                    fmt_g17(beta),
                    fmt_g17(closed),
                    fmt_g17(quad),
                    fmt_g17(bound),
                    fmt_g17(defect),
                ]);
            }
        }
    }
    table.write(&ctx.out_path("capacity.csv"))?;
    println!(
        "energy grid: {} runs, worst relative error {:.3e} (tolerance {ENERGY_REL_TOL:.0e})",
        alphas.len() * epss.len() * betas.len(),
        worst_rel
    );

    // Defect-vs-bound chart for the first β across the α grid.
    let beta0 = betas[0];
    let mut series = Vec::new();
    for &alpha in &alphas {
        let defects: Vec<(f64, f64)> =
            epss.iter().map(|&e| (e, l2_defect(alpha, e, beta0, panels))).collect();
        let bounds: Vec<(f64, f64)> =
            epss.iter().map(|&e| (e, defect_upper_bound(alpha, e, beta0))).collect();
        series.push(ChartSeries { name: format!("defect, alpha={alpha}"), points: defects });
        series.push(ChartSeries { name: format!("bound, alpha={alpha}"), points: bounds });
    }
    SvgChart {
        title: format!("L2 defect vs the a priori bound (beta = {beta0:.4})"),
        x_label: "eps".to_string(),
        y_label: "defect".to_string(),
        log_x: true,
        log_y: true,
        series,
    }
    .write(&ctx.out_path("capacity.svg"))?;

    // Coupled schedule: the total H¹ defect must decrease strictly and
    // end small — the discrete face of "points have zero capacity".
    let mut schedule_table =
        CsvTable::new(&["alpha", "eps", "beta", "energy", "defect", "defect_bound", "h1_total"]);
    for &beta in &betas {
        let rows = capacity_schedule(&schedule_alphas, beta, panels);
        let totals: Vec<f64> = rows.iter().map(|r| r.energy + r.defect).collect();
        let decreasing = totals.windows(2).all(|w| w[1] < w[0]);
        let final_alpha = schedule_alphas[schedule_alphas.len() - 1];
        let final_ok = totals[totals.len() - 1] <= 2.0 * beta * final_alpha * 1.5;
        if !(decreasing && final_ok) {
            verdict = Verdict::Fail;
        }
        for r in &rows {
            schedule_table.push_row(vec![
                fmt_g17(r.alpha),
                fmt_g17(r.eps),
                fmt_g17(beta),
                fmt_g17(r.energy),
                fmt_g17(r.defect),
                fmt_g17(r.defect_bound),
                fmt_g17(r.energy + r.defect),
            ]);
        }
        println!(
            "schedule (beta {beta:.4}): H1 totals {} — {}",
            totals.iter().map(|t| format!("{t:.4}")).collect::<Vec<_>>().join(" > "),
            if decreasing && final_ok { "strictly decreasing" } else { "NOT decreasing" }
        );
    }
    schedule_table.write(&ctx.out_path("capacity_schedule.csv"))?;
    println!("capacity: {verdict}");
    Ok(verdict)
}

#[derive(Args, Debug, Default)]
pub struct BochnerArgs {
    /// Number of seeded compliant test forms.
    #[arg(long)]
    pub count: Option<usize>,
    /// Seed for the test-form generator.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Quadrature panels per integration cell.
    #[arg(long)]
    pub quad_points: Option<usize>,
}

pub fn bochner(ctx: &Ctx, args: &BochnerArgs) -> Result<Verdict, CliError> {
    let count = ctx.scalar(args.count, "count", 10)?;
    let seed = ctx.scalar(args.seed, "seed", 0u64)?;
    let panels = ctx.scalar(args.quad_points, "quad-points", 8)?;

    let mut table = CsvTable::new(&["form", "lhs", "rhs", "discrepancy", "tolerance", "verdict"]);
    let mut residuals = Vec::new();
    let mut verdict = Verdict::Pass;
    for (k, form) in TestForm::seeded_bumps(count, seed).iter().enumerate() {
        let rep = bochner_identity(form, panels);
        let tol = BOCHNER_REL_TOL * (1.0 + rep.rhs);
        let row_ok = rep.discrepancy().abs() <= tol;
        let row_verdict = if row_ok { Verdict::Pass } else { Verdict::Fail };
        verdict = verdict.combine(row_verdict);
        residuals.push((k as f64, rep.discrepancy().abs().max(1e-18)));
        table.push_row(vec![
            rep.name.clone(),
            fmt_g17(rep.lhs),
            fmt_g17(rep.rhs),
            fmt_g17(rep.discrepancy()),
            fmt_g17(tol),
            row_verdict.to_string(),
        ]);
    }
    let worst =
        residuals.iter().map(|&(_, r)| r).fold(0.0f64, f64::max);
    println!("{count} compliant forms: worst |lhs - rhs| = {worst:.3e}");

    // The linear shear is closed and coclosed but ignores the boundary
    // conditions, so the identity misses by exactly twice the area.
    let violation = bochner_identity(&TestForm::linear_shear(), panels);
    let expected_rhs = 2.0 * PolygonalDomain::square_annulus().area();
    let violation_ok = violation.lhs.abs() <= VIOLATION_TOL
        && (violation.rhs - expected_rhs).abs() <= VIOLATION_TOL;
    let violation_verdict = if violation_ok { Verdict::Pass } else { Verdict::Fail };
    verdict = verdict.combine(violation_verdict);
    table.push_row(vec![
        violation.name.clone(),
        fmt_g17(violation.lhs),
        fmt_g17(violation.rhs),
        fmt_g17(violation.discrepancy()),
        fmt_g17(VIOLATION_TOL),
        violation_verdict.to_string(),
    ]);
    println!(
        "violation {}: lhs = {:.3e}, rhs = {:.9} (expected {expected_rhs})",
        violation.name, violation.lhs, violation.rhs
    );

    table.write(&ctx.out_path("bochner.csv"))?;
    SvgChart {
        title: "identity residuals of seeded compliant forms".to_string(),
        x_label: "form index".to_string(),
        y_label: "|lhs - rhs|".to_string(),
        log_x: false,
        log_y: true,
        series: vec![ChartSeries { name: "seeded bump pairs".to_string(), points: residuals }],
    }
    .write(&ctx.out_path("bochner.svg"))?;
    println!("bochner: {verdict} ({count} forms + 1 violation)");
    Ok(verdict)
}
