//! Low-end spectra of the Hodge pencils, certified kernel counts, and
//! the refinement studies built on them.
//!
//! Kernel counting is deliberately conservative: an eigenvalue cluster
//! only counts as a kernel when it sits below a relative threshold *and*
//! is separated from the rest of the spectrum by a factor of at least
//! 10³. Anything murkier is reported as ambiguous rather than rounded
//! to an integer.

mod dense;
mod lanczos;

pub use dense::dense_generalized_eigenvalues;
pub use lanczos::{low_spectrum, Eigenpairs};

use crate::deccomplex::{assemble, hodge_laplacian, BoundaryConditionSpec};
use crate::error::{Error, Result};
use crate::meshgen::triangulate;
use crate::polygeom::PolygonalDomain;
use crate::report::{fmt_g17, ChartSeries, CsvTable, SvgChart, Verdict};
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Relative cutoff below which eigenvalues are kernel candidates.
pub const KERNEL_RELATIVE_CUTOFF: f64 = 1e-9;
/// Required separation between kernel cluster and the rest.
pub const KERNEL_GAP_REQUIREMENT: f64 = 1e3;
/// Smallest spectral scale the relative cutoff may anchor to. A top
/// eigenvalue below this is indistinguishable from accumulated rounding
/// noise for the O(1)-normalized pencils assembled here, so no kernel
/// count can be certified from it.
pub const KERNEL_SCALE_FLOOR: f64 = 1e-14;
/// Default residual tolerance for the eigensolver.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-9;
/// Eigenvalues at or below this are "a surviving harmonic form" in the
/// fixed-treatment studies.
pub const HARMONIC_CEILING: f64 = 1e-10;
/// Relative change between the two finest levels accepted as stabilized.
pub const STABILIZATION_REL_CHANGE: f64 = 0.1;

/// A certified kernel count.
#[derive(Debug, Clone, Copy)]
pub struct KernelCount {
    pub dimension: usize,
    pub gap_ratio: f64,
    pub threshold: f64,
}

/// Counts eigenvalues that are zero up to the gap-certified threshold.
///
/// The scale is the median of the top half of the reported values, the
/// cutoff is `1e-9` of that, and the count is only returned when the
/// first retained eigenvalue exceeds the last discarded one by `10³`.
pub fn kernel_dimension(eigenvalues: &[f64]) -> Result<KernelCount> {
    if eigenvalues.is_empty() {
        return Err(Error::solver("kernel_dimension: no eigenvalues supplied"));
    }
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let len = sorted.len();
    let top = &sorted[len / 2..];
    let scale = top[top.len() / 2];
    if scale <= KERNEL_SCALE_FLOOR {
        return Err(Error::AmbiguousKernel(format!(
            "no usable spectral scale: median of the top reported eigenvalues is {scale:.3e} \
             (floor {KERNEL_SCALE_FLOOR:.0e}); request more eigenvalues"
        )));
    }
    let threshold = KERNEL_RELATIVE_CUTOFF * scale;
    let dimension = sorted.iter().take_while(|&&v| v < threshold).count();
    if dimension == len {
        return Err(Error::AmbiguousKernel(format!(
            "all {len} reported eigenvalues lie below the threshold {threshold:.3e}; \
             request more eigenvalues"
        )));
    }
    let floor = 1e-14 * scale;
    let gap_ratio = if dimension == 0 {
        sorted[0] / threshold
    } else {
        sorted[dimension] / sorted[dimension - 1].max(floor)
    };
    if gap_ratio < KERNEL_GAP_REQUIREMENT {
        return Err(Error::AmbiguousKernel(format!(
            "gap ratio {gap_ratio:.3e} below the required {KERNEL_GAP_REQUIREMENT:.0e} \
             (candidate dimension {dimension}, threshold {threshold:.3e})"
        )));
    }
    Ok(KernelCount { dimension, gap_ratio, threshold })
}

/// The low spectrum of one Laplacian pencil on one mesh.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub degree: usize,
    pub bc_label: String,
    pub rho: f64,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
    pub kernel_count: Option<usize>,
    pub gap_ratio: f64,
    pub wall_time: Duration,
    pub verdict: Verdict,
}

impl SpectralReport {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }
}

/// Parameters for a single spectrum computation.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumParams {
    pub degree: usize,
    pub bc: BoundaryConditionSpec,
    pub h: f64,
    /// Mesh grading exponent toward corners; 1 is uniform.
    pub grading: f64,
    pub num_eigenvalues: usize,
    pub tol: f64,
}

impl SpectrumParams {
    pub fn new(degree: usize, bc: BoundaryConditionSpec, h: f64) -> Self {
        SpectrumParams {
            degree,
            bc,
            h,
            grading: 1.0,
            num_eigenvalues: 12,
            tol: EIGEN_RESIDUAL_TOL,
        }
    }
}

/// Meshes the domain, assembles the pencil, solves for the low spectrum
/// and counts the kernel. An ambiguous kernel yields an INCONCLUSIVE
/// report rather than an error; genuine solver failures propagate.
pub fn spectrum_report(domain: &PolygonalDomain, params: &SpectrumParams) -> Result<SpectralReport> {
    let start = Instant::now();
    let mesh = triangulate(domain, params.h, params.grading)?;
    let sys = assemble(mesh, params.bc)?;
    let pencil = hodge_laplacian(&sys, params.degree)?;
    let eig = low_spectrum(&pencil.stiffness, &pencil.mass, params.num_eigenvalues, params.tol)?;
    if eig.values.first().is_some_and(|&v| v < -1e-10) {
        return Err(Error::solver(format!(
            "negative eigenvalue {:.3e} beyond the solver tolerance",
            eig.values[0]
        )));
    }
    let (kernel_count, gap_ratio, verdict) = match kernel_dimension(&eig.values) {
        Ok(k) => (Some(k.dimension), k.gap_ratio, Verdict::Pass),
        Err(Error::AmbiguousKernel(_)) => (None, f64::NAN, Verdict::Inconclusive),
        Err(e) => return Err(e),
    };
    Ok(SpectralReport {
        degree: params.degree,
        bc_label: params.bc.label(),
        rho: params.bc.rho(),
        h: params.h,
        eigenvalues: eig.values,
        kernel_count,
        gap_ratio,
        wall_time: start.elapsed(),
        verdict,
    })
}

/// One grid point of an index study.
#[derive(Debug, Clone)]
pub struct IndexRow {
    pub h: f64,
    pub rho: f64,
    /// Certified kernel dimensions (degree 0, degree 2), both maximal.
    pub kernel_even: Option<(usize, usize)>,
    /// Certified kernel dimension of the degree-1 pencil.
    pub kernel_odd: Option<usize>,
    /// `dim ker(even) − dim ker(odd)` when all three counts certified.
    pub index: Option<i64>,
    pub verdict: Verdict,
}

/// Kernel-count index over an (h, ρ) grid.
#[derive(Debug, Clone)]
pub struct IndexStudy {
    pub domain_name: String,
    pub bc_family: String,
    pub expected_index: i64,
    pub rows: Vec<IndexRow>,
    /// Constituent spectra in grid order (even-parity pairs first per h,
    /// then the odd spectra per (h, ρ) pair).
    pub reports: Vec<SpectralReport>,
    pub verdict: Verdict,
}

/// Configuration of an index study.
#[derive(Debug, Clone)]
pub struct IndexStudyConfig {
    pub h_series: Vec<f64>,
    pub rho_series: Vec<f64>,
    /// Mesh grading exponent toward corners; 1 is uniform.
    pub grading: f64,
    /// When set, the degree-1 pencil also uses the maximal treatment
    /// (the control experiment where the index must equal χ).
    pub odd_treatment_maximal: bool,
    pub expected_index: i64,
    pub num_eigenvalues: usize,
    pub tol: f64,
}

/// Computes `ind = dim ker(degree 0 ⊕ degree 2, maximal) − dim ker(degree 1)`
/// over the grid, with the degree-1 treatment per the configuration.
pub fn index_study(domain: &PolygonalDomain, cfg: &IndexStudyConfig) -> Result<IndexStudy> {
    check_decreasing(&cfg.h_series, "h series")?;
    let rho_series: Vec<f64> = if cfg.odd_treatment_maximal {
        vec![0.0]
    } else {
        if cfg.rho_series.is_empty() {
            return Err(Error::config("index study: empty ρ series"));
        }
        cfg.rho_series.clone()
    };

    // Even-parity spectra depend only on h; compute once per level.
    let evens: Vec<(SpectralReport, SpectralReport)> = cfg
        .h_series
        .par_iter()
        .map(|&h| {
            let bc = BoundaryConditionSpec::maximal();
            let r0 = spectrum_report(
                domain,
                &SpectrumParams { degree: 0, bc, h, grading: cfg.grading, num_eigenvalues: cfg.num_eigenvalues, tol: cfg.tol },
            )?;
            let r2 = spectrum_report(
                domain,
                &SpectrumParams { degree: 2, bc, h, grading: cfg.grading, num_eigenvalues: cfg.num_eigenvalues, tol: cfg.tol },
            )?;
            Ok::<_, Error>((r0, r2))
        })
        .collect::<Result<_>>()?;

    let grid: Vec<(usize, f64)> = cfg
        .h_series
        .iter()
        .enumerate()
        .flat_map(|(hi, _)| rho_series.iter().map(move |&rho| (hi, rho)))
        .collect();
    let odds: Vec<SpectralReport> = grid
        .par_iter()
        .map(|&(hi, rho)| {
            let bc = if cfg.odd_treatment_maximal {
                BoundaryConditionSpec::maximal()
            } else {
                BoundaryConditionSpec::minimal(rho)
            };
            spectrum_report(
                domain,
                &SpectrumParams {
                    degree: 1,
                    bc,
                    h: cfg.h_series[hi],
                    grading: cfg.grading,
                    num_eigenvalues: cfg.num_eigenvalues,
                    tol: cfg.tol,
                },
            )
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(grid.len());
    let mut reports = Vec::new();
    for (hi, (r0, r2)) in evens.iter().enumerate() {
        reports.push(r0.clone());
        reports.push(r2.clone());
        for (gi, &(ghi, rho)) in grid.iter().enumerate() {
            if ghi != hi {
                continue;
            }
            let odd = &odds[gi];
            reports.push(odd.clone());
            let kernel_even = r0.kernel_count.zip(r2.kernel_count);
            let kernel_odd = odd.kernel_count;
            let index = kernel_even
                .zip(kernel_odd)
                .map(|((k0, k2), k1)| (k0 + k2) as i64 - k1 as i64);
            let verdict = match index {
                None => Verdict::Inconclusive,
                Some(i) if i == cfg.expected_index => Verdict::Pass,
                Some(_) => Verdict::Fail,
            };
            rows.push(IndexRow {
                h: cfg.h_series[hi],
                rho,
                kernel_even,
                kernel_odd,
                index,
                verdict,
            });
        }
    }

    let verdict = rows.iter().fold(Verdict::Pass, |acc, r| acc.combine(r.verdict));
    Ok(IndexStudy {
        domain_name: domain.name().to_string(),
        bc_family: if cfg.odd_treatment_maximal {
            "even maximal / odd maximal".to_string()
        } else {
            "even maximal / odd minimal(ρ)".to_string()
        },
        expected_index: cfg.expected_index,
        rows,
        reports,
        verdict,
    })
}

/// Smallest degree-1 eigenvalue per (ρ, h), with stabilization verdicts.
#[derive(Debug, Clone)]
pub struct GapStudy {
    pub domain_name: String,
    pub bc_family: String,
    pub rho_series: Vec<f64>,
    pub h_series: Vec<f64>,
    /// Grid order: for each ρ, all h in the given order.
    pub reports: Vec<SpectralReport>,
    /// (ρ, λ_min at the finest h).
    pub stabilized: Vec<(f64, f64)>,
    /// The reported uniform gap constant: the smallest stabilized λ_min.
    pub gap_constant: f64,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

/// Configuration of a spectral-gap refinement study (degree 1).
#[derive(Debug, Clone)]
pub struct GapStudyConfig {
    pub rho_series: Vec<f64>,
    pub h_series: Vec<f64>,
    /// Mesh grading exponent toward corners; 1 is uniform.
    pub grading: f64,
    /// Run the control experiment with the maximal treatment instead of
    /// minimal(ρ); the harmonic form must then pin λ_min at zero.
    pub maximal_control: bool,
    pub num_eigenvalues: usize,
    pub tol: f64,
}

/// Tracks λ_min of the degree-1 pencil under h-refinement for each ρ.
///
/// Minimal treatment passes when every kernel count is a certified 0 and
/// λ_min moves by less than 10% between the two finest levels of every ρ
/// series. The maximal control passes when λ_min stays at zero
/// (≤ 1e−10) on every level.
pub fn gap_study(domain: &PolygonalDomain, cfg: &GapStudyConfig) -> Result<GapStudy> {
    check_decreasing(&cfg.h_series, "h series")?;
    if cfg.h_series.len() < 2 {
        return Err(Error::config("gap study: need at least two refinement levels"));
    }
    let rho_series: Vec<f64> = if cfg.maximal_control {
        vec![0.0]
    } else {
        if cfg.rho_series.is_empty() {
            return Err(Error::config("gap study: empty ρ series"));
        }
        cfg.rho_series.clone()
    };

    let grid: Vec<(f64, f64)> = rho_series
        .iter()
        .flat_map(|&rho| cfg.h_series.iter().map(move |&h| (rho, h)))
        .collect();
    let reports: Vec<SpectralReport> = grid
        .par_iter()
        .map(|&(rho, h)| {
            let bc = if cfg.maximal_control {
                BoundaryConditionSpec::maximal()
            } else {
                BoundaryConditionSpec::minimal(rho)
            };
            spectrum_report(
                domain,
                &SpectrumParams {
                    degree: 1,
                    bc,
                    h,
                    grading: cfg.grading,
                    num_eigenvalues: cfg.num_eigenvalues,
                    tol: cfg.tol,
                },
            )
        })
        .collect::<Result<_>>()?;

    let nh = cfg.h_series.len();
    let mut stabilized = Vec::new();
    let mut notes = Vec::new();
    let mut verdict = Verdict::Pass;

    for (ri, &rho) in rho_series.iter().enumerate() {
        let series = &reports[ri * nh..(ri + 1) * nh];
        if cfg.maximal_control {
            let worst = series.iter().map(|r| r.lambda_min()).fold(f64::NEG_INFINITY, f64::max);
            let ok = worst <= HARMONIC_CEILING;
            notes.push(format!(
                "maximal treatment: largest λ_min over levels = {worst:.3e} (harmonic ceiling {HARMONIC_CEILING:.0e})"
            ));
            if !ok {
                verdict = verdict.combine(Verdict::Fail);
            }
            stabilized.push((rho, series[nh - 1].lambda_min()));
            continue;
        }

        let finest = series[nh - 1].lambda_min();
        let previous = series[nh - 2].lambda_min();
        let rel_change = (finest - previous).abs() / finest.abs().max(f64::MIN_POSITIVE);
        stabilized.push((rho, finest));

        let kernels_zero = series.iter().all(|r| r.kernel_count == Some(0));
        let any_ambiguous = series.iter().any(|r| r.kernel_count.is_none());
        notes.push(format!(
            "ρ = {rho}: λ_min stabilizes at {finest:.6e} (change {:.2}% between the two finest levels)",
            100.0 * rel_change
        ));
        if any_ambiguous {
            verdict = verdict.combine(Verdict::Inconclusive);
        } else if !kernels_zero || rel_change >= STABILIZATION_REL_CHANGE {
            verdict = verdict.combine(Verdict::Fail);
        }
    }

    let gap_constant = stabilized
        .iter()
        .map(|&(_, v)| v)
        .fold(f64::INFINITY, f64::min);

    Ok(GapStudy {
        domain_name: domain.name().to_string(),
        bc_family: if cfg.maximal_control {
            "maximal".to_string()
        } else {
            "minimal(ρ)".to_string()
        },
        rho_series,
        h_series: cfg.h_series.clone(),
        reports,
        stabilized,
        gap_constant,
        notes,
        verdict,
    })
}

fn check_decreasing(series: &[f64], what: &str) -> Result<()> {
    if series.is_empty() {
        return Err(Error::config(format!("{what} is empty")));
    }
    if series.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(format!("{what} must be strictly decreasing")));
    }
    Ok(())
}

/// Renders spectral reports as a CSV table with a fixed schema:
/// `degree, h, rho, bc, lambda_1..lambda_m, kernel_count, gap_ratio, verdict`.
pub fn spectral_csv(reports: &[SpectralReport]) -> CsvTable {
    let m = reports.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let mut header: Vec<String> = vec!["degree".into(), "h".into(), "rho".into(), "bc".into()];
    for i in 1..=m {
        header.push(format!("lambda_{i}"));
    }
    header.push("kernel_count".into());
    header.push("gap_ratio".into());
    header.push("verdict".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();

    let mut table = CsvTable::new(&header_refs);
    for r in reports {
        let mut row = vec![
            r.degree.to_string(),
            fmt_g17(r.h),
            fmt_g17(r.rho),
            r.bc_label.clone(),
        ];
        for i in 0..m {
            row.push(r.eigenvalues.get(i).map(|&v| fmt_g17(v)).unwrap_or_default());
        }
        row.push(r.kernel_count.map(|k| k.to_string()).unwrap_or_default());
        row.push(if r.gap_ratio.is_finite() { fmt_g17(r.gap_ratio) } else { String::new() });
        row.push(r.verdict.to_string());
        table.push_row(row);
    }
    table
}

/// Line chart of λ_min against h, one series per ρ (or per label).
pub fn lambda_min_chart(
    title: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_y: bool,
) -> SvgChart {
    SvgChart {
        title: title.to_string(),
        x_label: "h".to_string(),
        y_label: "smallest eigenvalue".to_string(),
        log_x: true,
        log_y,
        series: series
            .iter()
            .map(|(name, pts)| ChartSeries { name: name.clone(), points: pts.clone() })
            .collect(),
    }
}

/// Convenience accessor: per-ρ series of (h, λ_min) for charting.
pub fn gap_chart_series(study: &GapStudy) -> Vec<(String, Vec<(f64, f64)>)> {
    let nh = study.h_series.len();
    study
        .rho_series
        .iter()
        .enumerate()
        .map(|(ri, &rho)| {
            let pts: Vec<(f64, f64)> = study.reports[ri * nh..(ri + 1) * nh]
                .iter()
                .map(|r| (r.h, r.lambda_min()))
                .collect();
            let label = if study.bc_family == "maximal" {
                "maximal".to_string()
            } else {
                format!("ρ = {rho}")
            };
            (label, pts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_rule_counts_a_clean_cluster() {
        let vals = [1e-15, 2e-15, 0.5, 0.9, 1.2, 2.0];
        let k = kernel_dimension(&vals).unwrap();
        assert_eq!(k.dimension, 2);
        assert!(k.gap_ratio > 1e10);
    }

    #[test]
    fn kernel_rule_accepts_empty_kernel() {
        let vals = [0.3, 0.5, 0.9, 1.2, 2.0];
        let k = kernel_dimension(&vals).unwrap();
        assert_eq!(k.dimension, 0);
        assert!(k.gap_ratio >= 1e3);
    }

    #[test]
    fn kernel_rule_flags_murky_spectra() {
        // Smooth geometric decay: no 10³ gap anywhere near the cutoff.
        let vals: Vec<f64> = (0..12).map(|i| 1e-12 * 10f64.powi(i)).collect();
        match kernel_dimension(&vals) {
            Err(Error::AmbiguousKernel(_)) => {}
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn kernel_rule_flags_all_zero_input() {
        let vals = [1e-18, 2e-18, 3e-18];
        assert!(matches!(kernel_dimension(&vals), Err(Error::AmbiguousKernel(_))));
    }

    #[test]
    fn kernel_rule_negative_jitter_counts_into_kernel() {
        let vals = [-3e-14, 5e-14, 0.7, 1.0, 1.5];
        let k = kernel_dimension(&vals).unwrap();
        assert_eq!(k.dimension, 2);
    }

    #[test]
    fn csv_schema_is_stable() {
        let rep = SpectralReport {
            degree: 1,
            bc_label: "minimal".into(),
            rho: 0.2,
            h: 0.25,
            eigenvalues: vec![0.3, 0.5],
            kernel_count: Some(0),
            gap_ratio: 3e8,
            wall_time: Duration::from_millis(10),
            verdict: Verdict::Pass,
        };
        let table = spectral_csv(&[rep]);
        let text = table.to_text();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "degree,h,rho,bc,lambda_1,lambda_2,kernel_count,gap_ratio,verdict"
        );
        let row = lines.next().unwrap();
        assert!(row.starts_with("1,"));
        assert!(row.ends_with(",PASS"));
        assert!(row.contains(",minimal,"));
    }

    #[test]
    fn series_validation_rejects_non_decreasing_grids() {
        let domain = PolygonalDomain::square_annulus();
        let cfg = GapStudyConfig {
            rho_series: vec![0.2],
            h_series: vec![0.2, 0.2],
            grading: 1.0,
            maximal_control: false,
            num_eigenvalues: 8,
            tol: EIGEN_RESIDUAL_TOL,
        };
        assert!(gap_study(&domain, &cfg).is_err());
        let cfg2 = IndexStudyConfig {
            h_series: vec![],
            rho_series: vec![0.2],
            grading: 1.0,
            odd_treatment_maximal: false,
            expected_index: 1,
            num_eigenvalues: 8,
            tol: EIGEN_RESIDUAL_TOL,
        };
        assert!(index_study(&domain, &cfg2).is_err());
    }
}
