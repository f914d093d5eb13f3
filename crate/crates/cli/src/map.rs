//! `cornermap`: builds the pentagon→triangle fold map, validates it and
//! reports the Lipschitz scaling study.

use clap::Args;
use cornerhodge::polygeom::{build_fold_pair, lipschitz_after_scaling, FoldPairParams};
use cornerhodge::report::{fmt_g17, ChartSeries, CsvTable, SvgChart, Verdict};

use crate::config::{CliError, Ctx};

/// Agreement required of `max_singular_value(2 r0)` with 1/2.
const HALF_TOL: f64 = 1e-12;

#[derive(Args, Debug, Default)]
pub struct CornermapArgs {
    /// Circumradius of the pentagonal source hole.
    #[arg(long)]
    pub pentagon_circumradius: Option<f64>,
    /// Side length of the triangular target hole.
    #[arg(long)]
    pub triangle_side: Option<f64>,
    /// Size of the boundary notch both domains carry.
    #[arg(long)]
    pub notch_size: Option<f64>,
    /// Source scaling radius for the Lipschitz study; default 2·r0.
    #[arg(long)]
    pub scale: Option<f64>,
}

pub fn cornermap(ctx: &Ctx, args: &CornermapArgs) -> Result<Verdict, CliError> {
    let params = FoldPairParams {
        pentagon_circumradius: ctx
            .scalar(args.pentagon_circumradius, "pentagon-circumradius", 1.0)?,
        triangle_side: ctx.scalar(args.triangle_side, "triangle-side", 1.0)?,
        notch_size: ctx.scalar(args.notch_size, "notch-size", 0.2)?,
    };
    let pair = build_fold_pair(&params)?;
    let report = pair.map.validate()?;
    println!(
        "fold map {} -> {}: {} pieces ({} folds); residuals: continuity {:.2e}, boundary {:.2e}, containment {:.2e}",
        pair.source().name(),
        pair.target().name(),
        report.pieces,
        report.fold_pieces,
        report.continuity_residual,
        report.boundary_residual,
        report.containment_residual,
    );

    // Folds must sit exactly on the two pentagon sides adjacent to the
    // out-and-back corner and nowhere else.
    let p = pair.pentagon;
    let side_names = ["ab", "bc", "cd", "de", "ea"];
    let mut folds_per_side = [0usize; 5];
    for (i, name) in side_names.iter().enumerate() {
        folds_per_side[i] = pair.map.fold_pieces_touching(p[i], p[(i + 1) % 5]);
        println!("folds on pentagon side {name}: {}", folds_per_side[i]);
    }
    let folds_ok = folds_per_side[3] > 0
        && folds_per_side[4] > 0
        && folds_per_side[..3].iter().all(|&c| c == 0);

    let unscaled = lipschitz_after_scaling(&pair.map, 1.0)?;
    let custom_scale = ctx.scalar_opt(args.scale, "scale")?;
    let scale = custom_scale.unwrap_or(2.0 * unscaled.r0);
    let lip = lipschitz_after_scaling(&pair.map, scale)?;
    println!(
        "lipschitz: unscaled constant {}, r0 = {}, max singular value at r = {} is {}",
        fmt_g17(lip.unscaled),
        fmt_g17(lip.r0),
        fmt_g17(scale),
        fmt_g17(lip.max_singular_value)
    );
    // With the default radius 2·r0 the scaled map must be exactly
    // 1/2-Lipschitz; a custom radius only has to stay finite.
    let scaling_ok = lip.r0.is_finite()
        && lip.r0 > 0.0
        && (custom_scale.is_some() || (lip.max_singular_value - 0.5).abs() <= HALF_TOL);

    let verdict = if report.verdict == Verdict::Pass && folds_ok && scaling_ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    };

    let mut table = CsvTable::new(&[
        "pieces",
        "fold_pieces",
        "continuity_residual",
        "boundary_residual",
        "containment_residual",
        "folds_ab",
        "folds_bc",
        "folds_cd",
        "folds_de",
        "folds_ea",
        "r0",
        "scale",
        "max_singular_value",
        "verdict",
    ]);
    table.push_row(vec![
        report.pieces.to_string(),
        report.fold_pieces.to_string(),
        fmt_g17(report.continuity_residual),
        fmt_g17(report.boundary_residual),
        fmt_g17(report.containment_residual),
        folds_per_side[0].to_string(),
        folds_per_side[1].to_string(),
        folds_per_side[2].to_string(),
        folds_per_side[3].to_string(),
        folds_per_side[4].to_string(),
        fmt_g17(lip.r0),
        fmt_g17(scale),
        fmt_g17(lip.max_singular_value),
        verdict.to_string(),
    ]);
    table.write(&ctx.out_path("cornermap.csv"))?;
    pair.map.write(&ctx.out_path("cornermap_pieces.txt"))?;

    // Distribution of per-piece singular values: the folds form a plateau
    // well below the global constant, the collar sits at exactly 1.
    let mut all: Vec<f64> =
        pair.map.pieces().iter().map(|piece| piece.max_singular_value()).collect();
    all.sort_by(f64::total_cmp);
    let folds: Vec<f64> = {
        let idx = pair.map.fold_piece_indices();
        let mut v: Vec<f64> =
            idx.iter().map(|&i| pair.map.pieces()[i].max_singular_value()).collect();
        v.sort_by(f64::total_cmp);
        v
    };
    SvgChart {
        title: "per-piece maximal singular values (sorted)".to_string(),
        x_label: "rank".to_string(),
        y_label: "max singular value".to_string(),
        log_x: false,
        log_y: false,
        series: vec![
            ChartSeries {
                name: "all pieces".to_string(),
                points: all.iter().enumerate().map(|(i, &s)| (i as f64, s)).collect(),
            },
            ChartSeries {
                name: "fold pieces".to_string(),
                points: folds.iter().enumerate().map(|(i, &s)| (i as f64, s)).collect(),
            },
        ],
    }
    .write(&ctx.out_path("cornermap.svg"))?;

    println!("cornermap: {verdict}");
    Ok(verdict)
}
