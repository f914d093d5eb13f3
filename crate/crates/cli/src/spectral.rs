//! `spectrum`, `index` and `gap`: eigensolver-backed kernel studies.

use clap::Args;
use cornerhodge::deccomplex::BoundaryConditionSpec;
use cornerhodge::report::{fmt_g17, ChartSeries, CsvTable, SvgChart, Verdict};
use cornerhodge::spectral::{
    gap_chart_series, gap_study, index_study, lambda_min_chart, spectral_csv, spectrum_report,
    GapStudyConfig, IndexStudy, IndexStudyConfig, SpectralReport, SpectrumParams,
    EIGEN_RESIDUAL_TOL, HARMONIC_CEILING,
};

use crate::config::{CliError, Ctx};
use crate::domains;

/// Acceptance-grade refinement levels: the finer one reaches roughly 1e5
/// triangles on the square annulus.
const DEFAULT_H: [f64; 2] = [0.03125, 0.015625];
const DEFAULT_RHO: [f64; 3] = [0.2, 0.1, 0.05];
/// The gap trend needs an extra coarser level to show stabilization.
const DEFAULT_GAP_H: [f64; 3] = [0.0625, 0.03125, 0.015625];

#[derive(Args, Debug, Default)]
pub struct SpectrumArgs {
    /// Domain name or file.
    #[arg(long)]
    pub domain: Option<String>,
    /// Form degree 0, 1 or 2; omit to run the full kernel table.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Corner treatment: `maximal` or `minimal` (uses --rho).
    #[arg(long)]
    pub bc: Option<String>,
    /// Comma-separated mesh sizes, decreasing.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    /// Comma-separated corner-disk radii for the minimal treatment.
    #[arg(long, value_name = "LIST")]
    pub rho: Option<String>,
    /// Corner-grading exponent for the mesher (1 = uniform).
    #[arg(long)]
    pub grading: Option<f64>,
    /// Eigenvalues requested from the solver.
    #[arg(long)]
    pub num_eigenvalues: Option<usize>,
    /// Eigenpair residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Require this certified kernel dimension (single-case mode).
    #[arg(long)]
    pub expect_kernel: Option<usize>,
}

struct SpectrumCase {
    degree: usize,
    bc: BoundaryConditionSpec,
    expect_kernel: Option<usize>,
}

fn case_label(rep: &SpectralReport) -> String {
    if rep.bc_label == "minimal" {
        format!("deg{} minimal(rho={})", rep.degree, rep.rho)
    } else {
        format!("deg{} maximal", rep.degree)
    }
}

pub fn spectrum(ctx: &Ctx, args: &SpectrumArgs) -> Result<Verdict, CliError> {
    let selector = ctx.string(args.domain.as_deref(), "domain", "square-annulus");
    let domain = domains::resolve(&selector)?;
    let hs = ctx.list(args.h.as_deref(), "h", &DEFAULT_H)?;
    let rhos = ctx.list(args.rho.as_deref(), "rho", &DEFAULT_RHO)?;
    let grading = ctx.scalar(args.grading, "grading", 1.0)?;
    let m = ctx.scalar(args.num_eigenvalues, "num-eigenvalues", 12)?;
    let tol = ctx.scalar(args.tol, "tol", EIGEN_RESIDUAL_TOL)?;
    let degree = ctx.scalar_opt(args.degree, "degree")?;
    let expect = ctx.scalar_opt(args.expect_kernel, "expect-kernel")?;

    let cases: Vec<SpectrumCase> = match degree {
        None => {
            // Full kernel table. Under the maximal treatment the harmonic
            // spaces realize the Betti numbers (1, holes, 0); the minimal
            // treatment must empty the degree-1 kernel at every ρ.
            let holes = domain.holes().len();
            let mut cases = vec![
                SpectrumCase {
                    degree: 0,
                    bc: BoundaryConditionSpec::maximal(),
                    expect_kernel: Some(1),
                },
                SpectrumCase {
                    degree: 1,
                    bc: BoundaryConditionSpec::maximal(),
                    expect_kernel: Some(holes),
                },
                SpectrumCase {
                    degree: 2,
                    bc: BoundaryConditionSpec::maximal(),
                    expect_kernel: Some(0),
                },
            ];
            for &rho in &rhos {
                cases.push(SpectrumCase {
                    degree: 1,
                    bc: BoundaryConditionSpec::minimal(rho),
                    expect_kernel: Some(0),
                });
            }
            cases
        }
        Some(degree) => {
            if degree > 2 {
                return Err(CliError::Usage(format!("degree must be 0, 1 or 2, got {degree}")));
            }
            match ctx.string(args.bc.as_deref(), "bc", "maximal").as_str() {
                "maximal" => vec![SpectrumCase {
                    degree,
                    bc: BoundaryConditionSpec::maximal(),
                    expect_kernel: expect,
                }],
                "minimal" => rhos
                    .iter()
                    .map(|&rho| SpectrumCase {
                        degree,
                        bc: BoundaryConditionSpec::minimal(rho),
                        expect_kernel: expect,
                    })
                    .collect(),
                other => {
                    return Err(CliError::Usage(format!(
                        "bc must be `maximal` or `minimal`, got `{other}`"
                    )))
                }
            }
        }
    };

    let mut reports = Vec::new();
    let mut verdict = Verdict::Pass;
    for case in &cases {
        for &h in &hs {
            let mut rep = spectrum_report(
                &domain,
                &SpectrumParams {
                    degree: case.degree,
                    bc: case.bc,
                    h,
                    grading,
                    num_eigenvalues: m,
                    tol,
                },
            )?;
            if let (Some(k), Some(e)) = (rep.kernel_count, case.expect_kernel) {
                if k != e {
                    rep.verdict = Verdict::Fail;
                }
            }
            verdict = verdict.combine(rep.verdict);
            println!(
                "{} h={h}: kernel {} (gap {:.1e}), lambda_min {:+.3e} [{}]",
                case_label(&rep),
                rep.kernel_count.map_or("ambiguous".to_string(), |k| k.to_string()),
                rep.gap_ratio,
                rep.lambda_min(),
                rep.verdict
            );
            reports.push(rep);
        }
    }

    spectral_csv(&reports).write(&ctx.out_path("spectrum.csv"))?;
    // Chart the first eigenvalue above the certified kernel: it must hold
    // steady under refinement if the kernel count is to be believed.
    let mut series: Vec<ChartSeries> = Vec::new();
    for ci in 0..cases.len() {
        let points: Vec<(f64, f64)> = reports[ci * hs.len()..(ci + 1) * hs.len()]
            .iter()
            .filter_map(|r| {
                let k = r.kernel_count?;
                r.eigenvalues.get(k).map(|&v| (r.h, v))
            })
            .collect();
        series.push(ChartSeries { name: case_label(&reports[ci * hs.len()]), points });
    }
    SvgChart {
        title: format!("first eigenvalue above the kernel on {}", domain.name()),
        x_label: "h".to_string(),
        y_label: "eigenvalue".to_string(),
        log_x: true,
        log_y: true,
        series,
    }
    .write(&ctx.out_path("spectrum.svg"))?;
    println!("spectrum: {verdict} ({} cases x {} levels)", cases.len(), hs.len());
    Ok(verdict)
}

#[derive(Args, Debug, Default)]
pub struct IndexArgs {
    /// Domain name or file.
    #[arg(long)]
    pub domain: Option<String>,
    /// Comma-separated mesh sizes, decreasing.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    /// Comma-separated corner-disk radii for the minimal treatment.
    #[arg(long, value_name = "LIST")]
    pub rho: Option<String>,
    /// Corner-grading exponent for the mesher (1 = uniform).
    #[arg(long)]
    pub grading: Option<f64>,
    /// Eigenvalues requested from the solver.
    #[arg(long)]
    pub num_eigenvalues: Option<usize>,
    /// Eigenpair residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Index the mixed-treatment grid must produce everywhere.
    #[arg(long)]
    pub expected_index: Option<i64>,
}

fn push_index_rows(table: &mut CsvTable, study: &IndexStudy, treatment: &str, expected: i64) {
    for row in &study.rows {
        let (k0, k2) = match row.kernel_even {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        table.push_row(vec![
            treatment.to_string(),
            fmt_g17(row.h),
            if treatment == "maximal" { String::new() } else { fmt_g17(row.rho) },
            k0,
            k2,
            row.kernel_odd.map_or(String::new(), |k| k.to_string()),
            row.index.map_or(String::new(), |i| i.to_string()),
            expected.to_string(),
            row.verdict.to_string(),
        ]);
    }
}

pub fn index(ctx: &Ctx, args: &IndexArgs) -> Result<Verdict, CliError> {
    let selector = ctx.string(args.domain.as_deref(), "domain", "square-annulus");
    let domain = domains::resolve(&selector)?;
    let hs = ctx.list(args.h.as_deref(), "h", &DEFAULT_H)?;
    let rhos = ctx.list(args.rho.as_deref(), "rho", &DEFAULT_RHO)?;
    let grading = ctx.scalar(args.grading, "grading", 1.0)?;
    let m = ctx.scalar(args.num_eigenvalues, "num-eigenvalues", 12)?;
    let tol = ctx.scalar(args.tol, "tol", EIGEN_RESIDUAL_TOL)?;
    let expected = ctx.scalar(args.expected_index, "expected-index", 1)?;

    let study = index_study(
        &domain,
        &IndexStudyConfig {
            h_series: hs.clone(),
            rho_series: rhos.clone(),
            grading,
            odd_treatment_maximal: false,
            expected_index: expected,
            num_eigenvalues: m,
            tol,
        },
    )?;
    for row in &study.rows {
        println!(
            "h={} rho={}: ker(deg0,deg2)={} ker(deg1)={} -> index {} [{}]",
            row.h,
            row.rho,
            row.kernel_even.map_or("?".to_string(), |(a, b)| format!("({a},{b})")),
            row.kernel_odd.map_or("?".to_string(), |k| k.to_string()),
            row.index.map_or("?".to_string(), |i| i.to_string()),
            row.verdict
        );
    }

    // Control: with the maximal treatment on both parities the index must
    // fall back to the Euler characteristic.
    let control_expected = domain.euler_characteristic();
    let control = index_study(
        &domain,
        &IndexStudyConfig {
            h_series: hs.clone(),
            rho_series: rhos.clone(),
            grading,
            odd_treatment_maximal: true,
            expected_index: control_expected,
            num_eigenvalues: m,
            tol,
        },
    )?;
    for row in &control.rows {
        println!(
            "control h={}: index {} (chi = {control_expected}) [{}]",
            row.h,
            row.index.map_or("?".to_string(), |i| i.to_string()),
            row.verdict
        );
    }

    let mut table = CsvTable::new(&[
        "treatment",
        "h",
        "rho",
        "kernel_deg0",
        "kernel_deg2",
        "kernel_deg1",
        "index",
        "expected_index",
        "verdict",
    ]);
    push_index_rows(&mut table, &study, "minimal(rho)", expected);
    push_index_rows(&mut table, &control, "maximal", control_expected);
    table.write(&ctx.out_path("index.csv"))?;

    let mut series: Vec<ChartSeries> = rhos
        .iter()
        .map(|&rho| ChartSeries {
            name: format!("minimal, rho={rho}"),
            points: study
                .rows
                .iter()
                .filter(|r| r.rho == rho)
                .filter_map(|r| r.index.map(|i| (r.h, i as f64)))
                .collect(),
        })
        .collect();
    series.push(ChartSeries {
        name: "maximal control".to_string(),
        points: control.rows.iter().filter_map(|r| r.index.map(|i| (r.h, i as f64))).collect(),
    });
    SvgChart {
        title: format!("kernel-count index on {}", domain.name()),
        x_label: "h".to_string(),
        y_label: "index".to_string(),
        log_x: true,
        log_y: false,
        series,
    }
    .write(&ctx.out_path("index.svg"))?;

    let verdict = study.verdict.combine(control.verdict);
    println!(
        "index: {verdict} (index {expected} at {} grid points; all-maximal control gives {control_expected})",
        study.rows.len()
    );
    Ok(verdict)
}

#[derive(Args, Debug, Default)]
pub struct GapArgs {
    /// Domain name or file.
    #[arg(long)]
    pub domain: Option<String>,
    /// Comma-separated mesh sizes, decreasing; at least two.
    #[arg(long, value_name = "LIST")]
    pub h: Option<String>,
    /// Comma-separated corner-disk radii for the minimal treatment.
    #[arg(long, value_name = "LIST")]
    pub rho: Option<String>,
    /// Corner-grading exponent for the mesher (1 = uniform).
    #[arg(long)]
    pub grading: Option<f64>,
    /// Eigenvalues requested from the solver.
    #[arg(long)]
    pub num_eigenvalues: Option<usize>,
    /// Eigenpair residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub fn gap(ctx: &Ctx, args: &GapArgs) -> Result<Verdict, CliError> {
    let selector = ctx.string(args.domain.as_deref(), "domain", "square-annulus");
    let domain = domains::resolve(&selector)?;
    let hs = ctx.list(args.h.as_deref(), "h", &DEFAULT_GAP_H)?;
    let rhos = ctx.list(args.rho.as_deref(), "rho", &DEFAULT_RHO)?;
    let grading = ctx.scalar(args.grading, "grading", 1.0)?;
    let m = ctx.scalar(args.num_eigenvalues, "num-eigenvalues", 12)?;
    let tol = ctx.scalar(args.tol, "tol", EIGEN_RESIDUAL_TOL)?;

    let study = gap_study(
        &domain,
        &GapStudyConfig {
            rho_series: rhos.clone(),
            h_series: hs.clone(),
            grading,
            maximal_control: false,
            num_eigenvalues: m,
            tol,
        },
    )?;
    for &(rho, lambda) in &study.stabilized {
        println!("rho={rho}: stabilized lambda_min = {lambda:.6e}");
    }
    for note in &study.notes {
        println!("note: {note}");
    }

    let control = gap_study(
        &domain,
        &GapStudyConfig {
            rho_series: rhos.clone(),
            h_series: hs.clone(),
            grading,
            maximal_control: true,
            num_eigenvalues: m,
            tol,
        },
    )?;
    let control_worst =
        control.reports.iter().map(|r| r.lambda_min().abs()).fold(0.0f64, f64::max);
    println!(
        "maximal control: |lambda_min| <= {control_worst:.3e} at every level (ceiling {HARMONIC_CEILING:.0e})"
    );
    for note in &control.notes {
        println!("note: {note}");
    }

    let mut all_reports = study.reports.clone();
    all_reports.extend(control.reports.iter().cloned());
    spectral_csv(&all_reports).write(&ctx.out_path("gap.csv"))?;

    let mut series = gap_chart_series(&study);
    // The control sits at zero up to roundoff; plot its magnitude so the
    // log axis can carry it.
    for (name, points) in gap_chart_series(&control) {
        series.push((
            format!("|{name}|"),
            points.iter().map(|&(h, v)| (h, v.abs().max(1e-18))).collect(),
        ));
    }
    lambda_min_chart(
        &format!("smallest degree-1 eigenvalue on {}", domain.name()),
        &series,
        true,
    )
    .write(&ctx.out_path("gap.svg"))?;

    let verdict = study.verdict.combine(control.verdict);
    println!(
        "gap: {verdict} (uniform constant c = {:.6e} over rho in {:?})",
        study.gap_constant, rhos
    );
    Ok(verdict)
}
